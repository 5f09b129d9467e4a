//! Deterministic JSON text: keys sorted, floats at 17 significant digits
//! in C `%g` style, non-finite floats as `null`.

use serde_json::Value;

/// `printf("%.17g", v)` with negative zero printed as `0`, or `None` for
/// non-finite input.
pub fn format_g17(v: f64) -> Option<String> {
    if !v.is_finite() {
        return None;
    }
    if v == 0.0 {
        return Some("0".to_string());
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        Some(format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs()))
    } else {
        let fixed = format!("{:.*}", (16 - exp) as usize, v);
        Some(trim_fraction(&fixed).to_string())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_scalar(v: &Value, out: &mut String) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().expect("f64 number");
            out.push_str(&format_g17(f).unwrap_or_else(|| "null".into()));
        }
        other => out.push_str(&other.to_string()),
    }
}

fn write(v: &Value, indent: usize, out: &mut String) {
    let pad = |level: usize| "  ".repeat(level);
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_scalar(item, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write(&map[*key], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => write_scalar(scalar, out),
    }
}

pub fn to_string(v: &Value) -> String {
    let mut out = String::new();
    write(v, 0, &mut out);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (0.5, "0.5"),
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.0, "-2"),
            (1e-5, "1.0000000000000001e-05"),
            (1e20, "1e+20"),
            (123456.789, "123456.789"),
            (1e16, "10000000000000000"),
            (1e17, "1e+17"),
            (0.0001, "0.0001"),
            (-0.0, "0"),
            (2.0 / 3.0, "0.66666666666666663"),
        ];
        for (v, s) in cases {
            assert_eq!(format_g17(v).unwrap(), s, "{v}");
        }
        assert_eq!(format_g17(f64::NAN), None);
    }

    #[test]
    fn output_is_sorted_and_parseable() {
        let v = json!({"b": [1.0, 0.1], "a": {"z": 1, "y": [[1.5, 2.0]]}, "c": null});
        let s = to_string(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.find("\"y\"").unwrap() < s.find("\"z\"").unwrap());
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"][1], json!(0.1));
        assert_eq!(back["a"]["y"][0][1], json!(2));
    }
}
