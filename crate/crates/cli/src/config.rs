use std::path::PathBuf;

use clap::ValueEnum;
use partial_theta::numeric::Precision;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Everything that determines a run's output. Embedded in every report.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<Precision>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(subcommand: &'static str) -> Self {
        Self {
            subcommand,
            version: env!("CARGO_PKG_VERSION"),
            ..Self::default()
        }
    }
}

pub fn parse_precision(s: &str) -> Result<Precision, String> {
    match s {
        "auto" => Ok(Precision::Auto),
        "double" => Ok(Precision::Double),
        bits => bits
            .parse::<u32>()
            .map(Precision::Bits)
            .map_err(|_| format!("expected `auto`, `double` or a bit count, got `{s}`")),
    }
}

/// `start:step:end` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number `{t}` in grid"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let (start, step, end) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if step.is_nan() || step <= 0.0 || end < start {
            return Err(format!("grid `{s}` must have step > 0 and end >= start"));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize;
        // round away accumulated binary noise so 0.1 + 2*0.1 prints as 0.3
        return Ok((0..=count)
            .map(|i| {
                let v = start + i as f64 * step;
                format!("{v:.12}").parse().expect("formatted float")
            })
            .collect());
    }
    if parts.len() != 1 {
        return Err(format!("grid `{s}` is neither start:step:end nor a list"));
    }
    s.split(',').map(parse).collect()
}

/// Comma-separated integers or an inclusive range `a..b`.
pub fn parse_orders(s: &str) -> Result<Vec<usize>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad order `{t}`"))
    };
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if b < a {
            return Err(format!("empty order range `{s}`"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}
