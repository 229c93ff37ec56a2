//! Minimal SVG line plots.

const W: f64 = 640.0;
const H: f64 = 400.0;
const M: f64 = 40.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Polyline of `pts`, dashed vertical lines at `zeros` (grey) and `marks`
/// (blue), and labelled dots.
pub fn plot(title: &str, xl: &str, yl: &str, pts: &[(f64, f64)], zeros: &[f64], marks: &[f64], dots: &[(f64, f64, &str)]) -> String {
    let finite = pts.iter().filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);

    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        esc(title)
    );
    s += &format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n<text x=\"8\" y=\"{}\" font-size=\"12\">{}</text>\n",
        W - M,
        H - 10.0,
        esc(xl),
        M - 8.0,
        esc(yl)
    );
    s += &format!(
        "<rect x=\"{M}\" y=\"{M}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
        W - 2.0 * M,
        H - 2.0 * M
    );
    if y0 < 0.0 && y1 > 0.0 {
        s += &format!("<line x1=\"{M}\" y1=\"{0:.2}\" x2=\"{1}\" y2=\"{0:.2}\" stroke=\"#ccc\"/>\n", sy(0.0), W - M);
    }
    for (xs, colour) in [(zeros, "#999"), (marks, "#36c")] {
        for &x in xs.iter().filter(|x| (x0..=x1).contains(*x)) {
            s += &format!(
                "<line x1=\"{0:.2}\" y1=\"{M}\" x2=\"{0:.2}\" y2=\"{1}\" stroke=\"{colour}\" stroke-dasharray=\"4 3\"/>\n",
                sx(x),
                H - M
            );
        }
    }
    let poly: Vec<String> = pts
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    s += &format!("<polyline fill=\"none\" stroke=\"#c33\" stroke-width=\"1.5\" points=\"{}\"/>\n", poly.join(" "));
    for &(x, y, label) in dots {
        s += &format!(
            "<circle cx=\"{0:.2}\" cy=\"{1:.2}\" r=\"4\" fill=\"#093\"/>\n<text x=\"{2:.2}\" y=\"{3:.2}\" font-size=\"11\">{4}</text>\n",
            sx(x),
            sy(y),
            sx(x) + 6.0,
            sy(y) - 6.0,
            esc(label)
        );
    }
    s += "</svg>\n";
    s
}
