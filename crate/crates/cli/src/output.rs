//! Report envelope and the three output formats.

use std::collections::BTreeMap;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// What a command hands back before formatting.
#[derive(Debug)]
pub struct Outcome {
    pub pass: bool,
    pub anomalies: Vec<String>,
    pub tolerances: BTreeMap<String, f64>,
    pub result: Value,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
    pub text: Vec<String>,
}

impl Outcome {
    pub fn new(pass: bool, result: Value) -> Self {
        Outcome {
            pass,
            anomalies: Vec::new(),
            tolerances: BTreeMap::new(),
            result,
            csv_header: Vec::new(),
            csv_rows: Vec::new(),
            text: Vec::new(),
        }
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn csv<I, S>(mut self, header: I, rows: Vec<Vec<String>>) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.csv_header = header.into_iter().map(Into::into).collect();
        self.csv_rows = rows;
        self
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    tolerances: &'a BTreeMap<String, f64>,
    pass: bool,
    anomalies: &'a [String],
    result: &'a Value,
}

pub fn render(out: &Outcome, command: &str, seed: u64, format: Format) -> Result<String, String> {
    match format {
        Format::Json => {
            let env = Envelope {
                tool: "braidforge",
                version: braidforge_core::VERSION,
                command,
                seed,
                tolerances: &out.tolerances,
                pass: out.pass,
                anomalies: &out.anomalies,
                result: &out.result,
            };
            serde_json::to_string_pretty(&env)
                .map(|s| s + "\n")
                .map_err(|e| e.to_string())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if !out.csv_header.is_empty() {
                w.write_record(&out.csv_header).map_err(|e| e.to_string())?;
            }
            for row in &out.csv_rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
        Format::Text => {
            let mut s = format!(
                "braidforge {command}: {}\n",
                if out.pass { "PASS" } else { "FAIL" }
            );
            for line in &out.text {
                s.push_str("  ");
                s.push_str(line);
                s.push('\n');
            }
            for a in &out.anomalies {
                s.push_str(&format!("  anomaly: {a}\n"));
            }
            Ok(s)
        }
    }
}

pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}
