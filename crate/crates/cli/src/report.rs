//! Report assembly: versioned JSON or `series,x,y` CSV.

use serde::Serialize;
use serde_json::Value;

use crate::config::Config;

pub const SCHEMA: u32 = 1;

/// One CSV point.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub series: String,
    pub x: f64,
    pub y: f64,
}

impl Row {
    pub fn new(series: impl Into<String>, x: f64, y: f64) -> Self {
        Self {
            series: series.into(),
            x,
            y,
        }
    }
}

/// What a command hands back for emission.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub result: Value,
    pub rows: Vec<Row>,
}

#[derive(Serialize)]
struct Document<'a> {
    schema: u32,
    command: &'a str,
    status: &'a str,
    config: &'a Config,
    result: &'a Value,
}

pub fn status(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

pub fn to_json(command: &str, config: &Config, out: &Outcome) -> String {
    let doc = Document {
        schema: SCHEMA,
        command,
        status: status(out.passed),
        config,
        result: &out.result,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report values serialize");
    s.push('\n');
    s
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut s = String::from("series,x,y\n");
    for r in rows {
        s.push_str(&format!("{},{},{}\n", r.series, r.x, r.y));
    }
    s
}
