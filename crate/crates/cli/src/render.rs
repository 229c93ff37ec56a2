//! Human-readable rendering of a report value.

use serde_json::Value;

pub fn human(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = v {
        for (k, val) in map {
            if k == "command" {
                continue;
            }
            write(&mut out, k, val, 0);
        }
    } else {
        out.push_str(&scalar(v));
        out.push('\n');
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            format!("[{}]", items.join(", "))
        }
        Value::Array(a) if a.iter().all(|x| x.as_array().is_some_and(|y| y.iter().all(|z| !z.is_object() && !z.is_array()))) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            format!("[{}]", items.join(", "))
        }
        other => other.to_string(),
    }
}

fn is_inline(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(a) => !a.iter().any(|x| x.is_object()),
        _ => true,
    }
}

fn write(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if is_inline(v) {
        if key == "text" {
            out.push_str(&format!("{pad}{key}:\n"));
            for line in v.as_str().unwrap_or_default().lines() {
                out.push_str(&format!("{pad}  {line}\n"));
            }
        } else {
            out.push_str(&format!("{pad}{key}: {}\n", scalar(v)));
        }
        return;
    }
    match v {
        Value::Object(map) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, val) in map {
                write(out, k, val, depth + 1);
            }
        }
        Value::Array(items) => {
            out.push_str(&format!("{pad}{key}: {} item(s)\n", items.len()));
            for item in items {
                match item {
                    Value::Object(map) => {
                        let parts: Vec<String> = map.iter().map(|(k, x)| format!("{k}={}", scalar(x))).collect();
                        out.push_str(&format!("{pad}  - {}\n", parts.join(" ")));
                    }
                    other => out.push_str(&format!("{pad}  - {}\n", scalar(other))),
                }
            }
        }
        _ => unreachable!(),
    }
}
