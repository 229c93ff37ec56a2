//! Adaptive Dormand–Prince 5(4) integrator with dense output.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("maximum number of steps ({0}) exceeded")]
    TooManySteps(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub h0: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { rtol: 1e-12, atol: 1e-14, h0: None, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

impl Options {
    pub fn tol(rtol: f64, atol: f64) -> Self {
        Options { rtol, atol, ..Default::default() }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Continuous extension over one accepted step.
#[derive(Clone, Debug)]
pub struct Dense<const N: usize> {
    pub t0: f64,
    pub h: f64,
    r: [[f64; N]; 5],
}

impl<const N: usize> Dense<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.r;
        std::array::from_fn(|i| r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i]))))
    }
}

/// What the observer wants after an accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Debug)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub rejected: usize,
    /// True when the observer stopped the integration early.
    pub stopped: bool,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` (either direction), calling
/// `observer` after every accepted step.
pub fn integrate<const N: usize, F, O>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &Options,
    mut observer: O,
) -> Result<Outcome<N>, OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&Dense<N>, &[f64; N]) -> Control,
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    if y.iter().chain(&k1).any(|v| !v.is_finite()) {
        return Err(OdeError::NonFinite { t });
    }
    let scale = |y: &[f64; N], i: usize, z: &[f64; N]| opts.atol + opts.rtol * y[i].abs().max(z[i].abs());
    let span = (t1 - t0).abs();
    let mut h = match opts.h0 {
        Some(h) => h.abs(),
        None => {
            let d0 = (0..N).map(|i| (y[i] / scale(&y, i, &y)).powi(2)).sum::<f64>().sqrt();
            let d1 = (0..N).map(|i| (k1[i] / scale(&y, i, &y)).powi(2)).sum::<f64>().sqrt();
            let g = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            g.min(span.max(1e-300))
        }
    }
    .min(opts.h_max);
    let mut out = Outcome { t, y, steps: 0, rejected: 0, stopped: false };
    if span == 0.0 {
        return Ok(out);
    }
    let mut fac_old: f64 = 1e-4;
    loop {
        if out.steps + out.rejected >= opts.max_steps {
            return Err(OdeError::TooManySteps(opts.max_steps));
        }
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;
        if hs.abs() <= 1e-15 * t.abs().max(1.0) * 0.5 && !last {
            return Err(OdeError::StepUnderflow { t });
        }
        let k2 = rhs(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = rhs(t + hs, &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y1 = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = rhs(t + hs, &y1);
        let finite = y1.iter().chain(&k7).all(|v| v.is_finite());
        let err = if finite {
            let s: f64 = (0..N)
                .map(|i| {
                    let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    (e / scale(&y, i, &y1)).powi(2)
                })
                .sum();
            (s / N as f64).sqrt()
        } else {
            f64::INFINITY
        };
        if err <= 1.0 {
            let r2: [f64; N] = std::array::from_fn(|i| y1[i] - y[i]);
            let r3: [f64; N] = std::array::from_fn(|i| hs * k1[i] - r2[i]);
            let r4: [f64; N] = std::array::from_fn(|i| r2[i] - hs * k7[i] - r3[i]);
            let r5: [f64; N] = std::array::from_fn(|i| {
                hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
            });
            let dense = Dense { t0: t, h: hs, r: [y, r2, r3, r4, r5] };
            t = if last { t1 } else { t + hs };
            y = y1;
            k1 = k7;
            out.steps += 1;
            let ctl = observer(&dense, &y);
            out.t = t;
            out.y = y;
            if ctl == Control::Stop {
                out.stopped = true;
                return Ok(out);
            }
            if last {
                break;
            }
            // PI step-size control.
            let e = err.max(1e-10);
            let fac = (0.9 * e.powf(-0.7 / 5.0) * fac_old.powf(0.4 / 5.0)).clamp(0.2, 10.0);
            fac_old = e.max(1e-4);
            h = (hs.abs() * fac).min(opts.h_max);
        } else {
            out.rejected += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.1 };
            h = hs.abs() * fac;
            if h <= 1e-15 * t.abs().max(1.0) {
                return if finite { Err(OdeError::StepUnderflow { t }) } else { Err(OdeError::NonFinite { t }) };
            }
        }
    }
    Ok(out)
}

/// Integrates to `t1` without observation.
pub fn solve<const N: usize, F>(rhs: F, t0: f64, y0: [f64; N], t1: f64, opts: &Options) -> Result<[f64; N], OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    integrate(rhs, t0, y0, t1, opts, |_, _| Control::Continue).map(|o| o.y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential() {
        let y = solve(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 3.0, &Options::default()).unwrap();
        assert!((y[0] - 3f64.exp()).abs() < 1e-10 * 3f64.exp());
        let y = solve(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], -3.0, &Options::default()).unwrap();
        assert!((y[0] - (-3f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn dense_output_matches_exp() {
        let mut worst: f64 = 0.0;
        integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 2.0, &Options::tol(1e-10, 1e-12), |d, _| {
            for j in 0..=10 {
                let t = d.t0 + d.h * j as f64 / 10.0;
                worst = worst.max((d.eval(t)[0] - t.exp()).abs() / t.exp());
            }
            Control::Continue
        })
        .unwrap();
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn harmonic_oscillator() {
        let y = solve(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], 10.0, &Options::default()).unwrap();
        assert!((y[0] - 10f64.sin()).abs() < 1e-10 && (y[1] - 10f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn observer_stops() {
        let o = integrate(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0, &Options::default(), |_, y| {
            if y[0] > 1e6 { Control::Stop } else { Control::Continue }
        })
        .unwrap();
        assert!(o.stopped && o.t < 1.0);
    }
}
