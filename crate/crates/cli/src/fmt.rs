//! Deterministic report, JSON and CSV emission.
//!
//! Reports keep insertion order so text and JSON renderings are byte
//! stable across runs; floats are printed in scientific form with a
//! configurable number of significant digits and `.` decimals.

use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub enum Val {
    Str(String),
    Int(i64),
    UInt(u64),
    Float(f64),
    Bool(bool),
    List(Vec<Val>),
    Nested(Report),
}

impl From<&str> for Val {
    fn from(s: &str) -> Self {
        Val::Str(s.to_string())
    }
}
impl From<String> for Val {
    fn from(s: String) -> Self {
        Val::Str(s)
    }
}
impl From<f64> for Val {
    fn from(x: f64) -> Self {
        Val::Float(x)
    }
}
impl From<i64> for Val {
    fn from(x: i64) -> Self {
        Val::Int(x)
    }
}
impl From<u64> for Val {
    fn from(x: u64) -> Self {
        Val::UInt(x)
    }
}
impl From<usize> for Val {
    fn from(x: usize) -> Self {
        Val::UInt(x as u64)
    }
}
impl From<bool> for Val {
    fn from(x: bool) -> Self {
        Val::Bool(x)
    }
}

/// Ordered key-value report.
#[derive(Debug, Clone, Default)]
pub struct Report {
    fields: Vec<(String, Val)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, val: impl Into<Val>) {
        self.fields.push((key.to_string(), val.into()));
    }

    pub fn push_floats(&mut self, key: &str, vals: &[f64]) {
        self.push(key, Val::List(vals.iter().map(|&v| Val::Float(v)).collect()));
    }

    pub fn push_ints(&mut self, key: &str, vals: &[i64]) {
        self.push(key, Val::List(vals.iter().map(|&v| Val::Int(v)).collect()));
    }

    pub fn push_strs(&mut self, key: &str, vals: &[String]) {
        self.push(
            key,
            Val::List(vals.iter().map(|v| Val::Str(v.clone())).collect()),
        );
    }

    /// Flat `key = value` text with dotted keys for nesting.
    pub fn to_text(&self, precision: usize) -> String {
        let mut out = String::new();
        self.write_text(&mut out, "", precision);
        out
    }

    fn write_text(&self, out: &mut String, prefix: &str, precision: usize) {
        for (k, v) in &self.fields {
            let key = if prefix.is_empty() {
                k.clone()
            } else {
                format!("{prefix}.{k}")
            };
            match v {
                Val::Nested(r) => r.write_text(out, &key, precision),
                other => {
                    let _ = writeln!(out, "{key} = {}", scalar_text(other, precision));
                }
            }
        }
    }

    pub fn to_json(&self, precision: usize) -> String {
        let mut out = String::new();
        self.write_json(&mut out, precision);
        out.push('\n');
        out
    }

    fn write_json(&self, out: &mut String, precision: usize) {
        out.push('{');
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}:", json_string(k));
            write_val_json(v, out, precision);
        }
        out.push('}');
    }
}

fn scalar_text(v: &Val, precision: usize) -> String {
    match v {
        Val::Str(s) => s.clone(),
        Val::Int(x) => x.to_string(),
        Val::UInt(x) => x.to_string(),
        Val::Float(x) => fmt_float(*x, precision),
        Val::Bool(b) => b.to_string(),
        Val::List(items) => {
            let inner: Vec<String> = items.iter().map(|i| scalar_text(i, precision)).collect();
            format!("[{}]", inner.join(", "))
        }
        Val::Nested(_) => unreachable!("nested handled by caller"),
    }
}

fn write_val_json(v: &Val, out: &mut String, precision: usize) {
    match v {
        Val::Str(s) => out.push_str(&json_string(s)),
        Val::Int(x) => {
            let _ = write!(out, "{x}");
        }
        Val::UInt(x) => {
            let _ = write!(out, "{x}");
        }
        Val::Float(x) => out.push_str(&json_float(*x, precision)),
        Val::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Val::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_val_json(item, out, precision);
            }
            out.push(']');
        }
        Val::Nested(r) => r.write_json(out, precision),
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Scientific notation with fixed significant digits, `.` decimal point.
pub fn fmt_float(x: f64, precision: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    format!("{:.*e}", precision.saturating_sub(1), x)
}

fn json_float(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    fmt_float(x, precision)
}

/// CSV writer with a fixed header.
pub struct Csv {
    out: String,
    cols: usize,
    precision: usize,
}

impl Csv {
    pub fn new(header: &[&str], precision: usize) -> Self {
        Csv {
            out: format!("{}\n", header.join(",")),
            cols: header.len(),
            precision,
        }
    }

    pub fn row(&mut self, cells: &[Val]) {
        assert_eq!(cells.len(), self.cols);
        let rendered: Vec<String> = cells
            .iter()
            .map(|c| scalar_text(c, self.precision))
            .collect();
        let _ = writeln!(self.out, "{}", rendered.join(","));
    }

    pub fn finish(self) -> String {
        self.out
    }
}
