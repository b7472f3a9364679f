//! Deterministic JSON writer. Objects keep insertion order and every float
//! is written in scientific notation with 17 significant digits, so equal
//! inputs serialize byte-identically and each double survives a write/read
//! round trip exactly.

use std::fmt::Write as _;

pub enum Value {
    Bool(bool),
    UInt(u64),
    Num(f64),
    Str(String),
    Arr(Vec<Value>),
    Obj(Vec<(String, Value)>),
}

/// 17 significant digits: one leading plus sixteen fractional.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn escape(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

impl Value {
    /// Arrays of scalars stay on one line; arrays of composites and all
    /// non-empty objects break across lines at two-space indentation.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Self::Arr(_) | Self::Obj(_))
    }

    fn write(&self, out: &mut String, depth: usize) {
        match self {
            Self::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Self::UInt(u) => {
                let _ = write!(out, "{u}");
            }
            Self::Num(x) => out.push_str(&fmt_f64(*x)),
            Self::Str(s) => escape(s, out),
            Self::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                } else if items.iter().all(Value::is_scalar) {
                    out.push('[');
                    for (i, item) in items.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        item.write(out, depth + 1);
                    }
                    out.push(']');
                } else {
                    out.push_str("[\n");
                    for (i, item) in items.iter().enumerate() {
                        indent(out, depth + 1);
                        item.write(out, depth + 1);
                        if i + 1 < items.len() {
                            out.push(',');
                        }
                        out.push('\n');
                    }
                    indent(out, depth);
                    out.push(']');
                }
            }
            Self::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                } else {
                    out.push_str("{\n");
                    for (i, (key, value)) in fields.iter().enumerate() {
                        indent(out, depth + 1);
                        escape(key, out);
                        out.push_str(": ");
                        value.write(out, depth + 1);
                        if i + 1 < fields.len() {
                            out.push(',');
                        }
                        out.push('\n');
                    }
                    indent(out, depth);
                    out.push('}');
                }
            }
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-1.0 / 3.0), "-3.3333333333333331e-1");
    }

    #[test]
    fn formatted_floats_parse_back_exactly() {
        for &x in &[
            0.1,
            2.0_f64.sqrt(),
            std::f64::consts::PI,
            1e-300,
            -7.25e17,
            f64::MIN_POSITIVE,
        ] {
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn rendering_is_valid_json_with_stable_layout() {
        let v = Value::Obj(vec![
            ("name".into(), Value::Str("a \"b\"\n".into())),
            ("dims".into(), Value::Arr(vec![Value::UInt(2), Value::UInt(3)])),
            (
                "grid".into(),
                Value::Arr(vec![
                    Value::Arr(vec![Value::Num(1.0), Value::Num(0.0)]),
                    Value::Arr(vec![Value::Num(0.0), Value::Num(-0.5)]),
                ]),
            ),
            ("flag".into(), Value::Bool(true)),
        ]);
        let text = v.render();
        assert_eq!(text, v.render());
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["dims"][1], serde_json::json!(3));
        assert_eq!(parsed["grid"][1][1], serde_json::json!(-0.5));
        assert_eq!(parsed["name"], serde_json::json!("a \"b\"\n"));
    }
}
