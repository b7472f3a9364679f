//! Command reports rendered two ways: an aligned text table for reading,
//! and a flat insertion-ordered JSON object that carries every number from
//! the table at full precision, byte-stable for identical inputs.

use crate::json::Value;

enum Row {
    Section(String),
    Bits { label: String, key: String, value: f64 },
    Residual { label: String, key: String, value: f64 },
    BitsList { label: String, key: String, values: Vec<f64> },
    Count { label: String, key: String, value: u64 },
    Text { label: String, key: String, value: String },
    Flag { label: String, key: String, value: bool },
}

pub struct Report {
    command: &'static str,
    rows: Vec<Row>,
}

/// `-0.0` prints as `-0.000000`; fold it onto `+0.0` in both renderings.
fn unsigned_zero(x: f64) -> f64 {
    x + 0.0
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            rows: Vec::new(),
        }
    }

    pub fn section(&mut self, title: &str) {
        self.rows.push(Row::Section(title.into()));
    }

    /// An entropy-like quantity, printed with six decimals.
    pub fn bits(&mut self, label: &str, key: &str, value: f64) {
        self.rows.push(Row::Bits {
            label: label.into(),
            key: key.into(),
            value: unsigned_zero(value),
        });
    }

    /// A residual of an asserted identity, printed in scientific notation.
    pub fn residual(&mut self, label: &str, key: &str, value: f64) {
        self.rows.push(Row::Residual {
            label: label.into(),
            key: key.into(),
            value: unsigned_zero(value),
        });
    }

    pub fn bits_list(&mut self, label: &str, key: &str, values: &[f64]) {
        self.rows.push(Row::BitsList {
            label: label.into(),
            key: key.into(),
            values: values.iter().copied().map(unsigned_zero).collect(),
        });
    }

    pub fn count(&mut self, label: &str, key: &str, value: usize) {
        self.rows.push(Row::Count {
            label: label.into(),
            key: key.into(),
            value: value as u64,
        });
    }

    pub fn text(&mut self, label: &str, key: &str, value: &str) {
        self.rows.push(Row::Text {
            label: label.into(),
            key: key.into(),
            value: value.into(),
        });
    }

    pub fn flag(&mut self, label: &str, key: &str, value: bool) {
        self.rows.push(Row::Flag {
            label: label.into(),
            key: key.into(),
            value,
        });
    }

    pub fn render_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .filter_map(|row| match row {
                Row::Section(_) => None,
                Row::Bits { label, .. }
                | Row::Residual { label, .. }
                | Row::BitsList { label, .. }
                | Row::Count { label, .. }
                | Row::Text { label, .. }
                | Row::Flag { label, .. } => Some(label.len()),
            })
            .max()
            .unwrap_or(0)
            + 2;
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            match row {
                Row::Section(title) => {
                    if i > 0 {
                        out.push('\n');
                    }
                    out.push_str(title);
                    out.push('\n');
                }
                Row::Bits { label, value, .. } => {
                    out.push_str(&format!("  {label:<width$}{value:.6}\n"));
                }
                Row::Residual { label, value, .. } => {
                    out.push_str(&format!("  {label:<width$}{value:.3e}\n"));
                }
                Row::BitsList { label, values, .. } => {
                    let joined = values
                        .iter()
                        .map(|v| format!("{v:.6}"))
                        .collect::<Vec<_>>()
                        .join("  ");
                    out.push_str(&format!("  {label:<width$}{joined}\n"));
                }
                Row::Count { label, value, .. } => {
                    out.push_str(&format!("  {label:<width$}{value}\n"));
                }
                Row::Text { label, value, .. } => {
                    out.push_str(&format!("  {label:<width$}{value}\n"));
                }
                Row::Flag { label, value, .. } => {
                    out.push_str(&format!("  {label:<width$}{value}\n"));
                }
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut fields = vec![("command".to_string(), Value::Str(self.command.into()))];
        for row in &self.rows {
            match row {
                Row::Section(_) => {}
                Row::Bits { key, value, .. } | Row::Residual { key, value, .. } => {
                    fields.push((key.clone(), Value::Num(*value)));
                }
                Row::BitsList { key, values, .. } => {
                    fields.push((
                        key.clone(),
                        Value::Arr(values.iter().copied().map(Value::Num).collect()),
                    ));
                }
                Row::Count { key, value, .. } => fields.push((key.clone(), Value::UInt(*value))),
                Row::Text { key, value, .. } => {
                    fields.push((key.clone(), Value::Str(value.clone())));
                }
                Row::Flag { key, value, .. } => fields.push((key.clone(), Value::Bool(*value))),
            }
        }
        Value::Obj(fields).render()
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.render_json()
        } else {
            self.render_text()
        }
    }
}
