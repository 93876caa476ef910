//! Tables and their CSV / JSON rendering.
//!
//! Numbers are printed like C's `%.12g`, so identical inputs give
//! byte-identical files on every platform.

use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => u8::from(*b).to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => fmt_num(*x),
            Cell::Num(_) | Cell::Empty => "null".into(),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// `%.12g`: 12 significant digits, trailing zeros removed, exponent form
/// outside `1e-4 ≤ |x| < 1e12`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    const P: i32 = 12;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Metadata carried alongside a table in JSON output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Envelope {
    pub command: String,
    pub config_sha256: String,
    pub derived: Vec<(String, Cell)>,
    pub summary: Vec<(String, Cell)>,
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

fn json_object(pairs: &[(String, Cell)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{}:{}", json_str(k), v.json())).collect();
    format!("{{{}}}", body.join(","))
}

pub fn to_json(table: &Table, env: &Envelope) -> String {
    let columns: Vec<String> = table.columns.iter().map(|c| json_str(c)).collect();
    let rows: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("[{}]", r.iter().map(Cell::json).collect::<Vec<_>>().join(",")))
        .collect();
    format!(
        "{{\"version\":{},\"command\":{},\"config_sha256\":{},\"derived\":{},\"summary\":{},\"columns\":[{}],\"rows\":[\n{}\n]}}\n",
        json_str(env!("CARGO_PKG_VERSION")),
        json_str(&env.command),
        json_str(&env.config_sha256),
        json_object(&env.derived),
        json_object(&env.summary),
        columns.join(","),
        rows.join(",\n"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printf_g_formatting() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333"),
            (2f64.sqrt() / 3.0, "0.471404520791"),
            (123456.789, "123456.789"),
            (1e-5, "1e-05"),
            (1.5e-7, "1.5e-07"),
            (0.000123, "0.000123"),
            (0.0001, "0.0001"),
            (999999999999.0, "999999999999"),
            (1e12, "1e+12"),
            (9.9999999999999e-1, "1"),
            (-3.2e-300, "-3.2e-300"),
            (f64::NAN, "nan"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_num(x), s, "{x:e}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["t", "x", "flag", "gap"]);
        t.push(vec![0.0.into(), 0.5.into(), true.into(), Cell::Empty]);
        t.push(vec![1.0.into(), Cell::Int(3), false.into(), Some(2.0).into()]);
        assert_eq!(t.to_csv(), "t,x,flag,gap\n0,0.5,1,\n1,3,0,2\n");
        assert_eq!(t.column("flag"), Some(2));
    }

    #[test]
    fn json_envelope_parses() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![1.5.into(), Cell::Empty]);
        t.push(vec![f64::NAN.into(), true.into()]);
        let env = Envelope {
            command: "simulate".into(),
            config_sha256: sha256_hex("{}"),
            derived: vec![("r".into(), 0.1.into())],
            summary: vec![],
        };
        let v: serde_json::Value = serde_json::from_str(&to_json(&t, &env)).unwrap();
        assert_eq!(v["rows"][0][0], 1.5);
        assert!(v["rows"][0][1].is_null());
        assert_eq!(v["rows"][1][1], true);
        assert_eq!(v["derived"]["r"], 0.1);
        assert_eq!(v["config_sha256"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
