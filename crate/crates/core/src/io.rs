//! File formats: channel JSON, CSV tables and JSON reports.
//!
//! Reports print every float with 12 significant digits. Channel dumps are
//! the exception: they keep full precision so that a dumped channel parses
//! back to identical matrices.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chain::AuxiliaryChain;
use crate::channel::{ChannelMatrix, WiretapChannel};
use crate::error::{Error, Result};
use crate::region::{MuStar, RegionBoundary, TraceMethod};

/// Significant digits of every printed float.
pub const SIG_DIGITS: usize = 12;

/// Formats `x` with [`SIG_DIGITS`] significant digits, in positional
/// notation for moderate exponents and scientific notation otherwise.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Rounds `x` to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_sig(x).parse().unwrap_or(x)
    } else {
        x
    }
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with floats rounded to [`SIG_DIGITS`] significant digits.
pub fn to_report_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    serde_json::to_string_pretty(&round_value(v)).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    #[serde(default)]
    name: Option<String>,
    main: Vec<Vec<f64>>,
    eavesdropper: Vec<Vec<f64>>,
}

fn matrix(field: &str, rows: Vec<Vec<f64>>) -> Result<ChannelMatrix> {
    ChannelMatrix::new(rows).map_err(|e| Error::InvalidChannel(format!("field `{field}`: {e}")))
}

/// Parses a channel from JSON text: `{"name"?, "main", "eavesdropper"}`
/// with row-major matrices.
pub fn parse_channel(text: &str) -> Result<WiretapChannel> {
    let file: ChannelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let w = WiretapChannel::new(matrix("main", file.main)?, matrix("eavesdropper", file.eavesdropper)?)?;
    Ok(match file.name {
        Some(n) => w.with_name(n),
        None => w,
    })
}

pub fn load_channel(path: &Path) -> Result<WiretapChannel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_channel(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Full-precision channel JSON.
pub fn dump_channel(w: &WiretapChannel) -> String {
    serde_json::to_string_pretty(w).expect("channel serializes")
}

#[derive(Serialize)]
struct ChainRecord<'a> {
    mu: f64,
    rate: f64,
    equivocation: f64,
    #[serde(flatten)]
    chain: &'a AuxiliaryChain,
}

/// Sidecar written next to a boundary CSV.
#[derive(Serialize)]
struct RegionSidecar<'a> {
    name: Option<&'a str>,
    method: TraceMethod,
    mu_star: Option<MuStar>,
    c_b: f64,
    c_e: f64,
    c_s: f64,
    corner_segment: Option<(usize, usize)>,
    warnings: &'a [String],
    chains: Vec<ChainRecord<'a>>,
}

pub fn region_sidecar(w: &WiretapChannel, b: &RegionBoundary) -> Result<String> {
    to_report_json(&RegionSidecar {
        name: w.name.as_deref(),
        method: b.method,
        mu_star: b.mu_star,
        c_b: b.c_b,
        c_e: b.c_e,
        c_s: b.secrecy_capacity,
        corner_segment: b.corner_segment,
        warnings: &b.warnings,
        chains: b
            .points
            .iter()
            .map(|p| ChainRecord {
                mu: p.mu,
                rate: p.rate,
                equivocation: p.equivocation,
                chain: &p.chain,
            })
            .collect(),
    })
}

/// Parses a CSV with a header line into named columns of floats.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse(format!("CSV line {}: {e}", i + 2)))?;
        if row.len() != header.len() {
            return Err(Error::Parse(format!(
                "CSV line {}: {} fields, header has {}",
                i + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
