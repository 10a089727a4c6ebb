//! Text input and machine-readable output: strict rational/dyadic parsing
//! (decimals are rejected to avoid silent rounding), event config files, and
//! JSON/CSV emission.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::dyadic::DyadicRational;
use crate::events::{EventError, GeneratorEvent};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("decimal input {0:?} rejected: rationals are p/q, dyadics k/2^e")]
    DecimalRejected(String),
    #[error("malformed rational {0:?} (expected p/q or an integer)")]
    MalformedRational(String),
    #[error("malformed dyadic {0:?} (expected k/2^e or an integer)")]
    MalformedDyadic(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("line {line}: expected \"<time> <threshold>\", got {content:?}")]
    MalformedEventLine { line: usize, content: String },
    #[error("line {line}: expected \"key=value\", got {content:?}")]
    MalformedKvLine { line: usize, content: String },
    #[error("line {line}: {source}")]
    BadEvent { line: usize, source: EventError },
}

/// Parse `p/q` or a bare integer. Decimal notation is rejected.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    let s = s.trim();
    if s.contains('.') {
        return Err(ParseError::DecimalRejected(s.to_string()));
    }
    let parse_int = |part: &str| -> Result<BigInt, ParseError> {
        part.trim()
            .parse::<BigInt>()
            .map_err(|_| ParseError::MalformedRational(s.to_string()))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from(parse_int(s)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(ParseError::ZeroDenominator(s.to_string()));
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Parse `k/2^e` or a bare integer.
pub fn parse_dyadic(s: &str) -> Result<DyadicRational, ParseError> {
    let s = s.trim();
    if s.contains('.') {
        return Err(ParseError::DecimalRejected(s.to_string()));
    }
    match s.split_once('/') {
        None => {
            let k = s
                .parse::<BigInt>()
                .map_err(|_| ParseError::MalformedDyadic(s.to_string()))?;
            Ok(DyadicRational::new(k, 0))
        }
        Some((num, den)) => {
            let k = num
                .trim()
                .parse::<BigInt>()
                .map_err(|_| ParseError::MalformedDyadic(s.to_string()))?;
            let den = den.trim();
            let exp = den
                .strip_prefix("2^")
                .ok_or_else(|| ParseError::MalformedDyadic(s.to_string()))?
                .parse::<u64>()
                .map_err(|_| ParseError::MalformedDyadic(s.to_string()))?;
            Ok(DyadicRational::new(k, exp))
        }
    }
}

/// Parse an events config: one `<time> <threshold>` pair of rationals per
/// line, `#` comments and blank lines skipped.
pub fn parse_events_text(text: &str) -> Result<Vec<GeneratorEvent>, ParseError> {
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(t), Some(y), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(ParseError::MalformedEventLine {
                line: i + 1,
                content: line.to_string(),
            });
        };
        let time = parse_rational(t)?;
        let threshold = parse_rational(y)?;
        events.push(GeneratorEvent::new(time, threshold).map_err(|source| {
            ParseError::BadEvent {
                line: i + 1,
                source,
            }
        })?);
    }
    Ok(events)
}

/// Parse a `key=value` config file: one pair per line, `#` comments and
/// blank lines skipped, later keys win.
pub fn parse_kv_text(text: &str) -> Result<std::collections::BTreeMap<String, String>, ParseError> {
    let mut map = std::collections::BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ParseError::MalformedKvLine {
                line: i + 1,
                content: line.to_string(),
            });
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Pretty JSON with a trailing newline.
pub fn write_json(path: &Path, value: &impl Serialize) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut file = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")
}

/// CSV with a header row; callers format rows deterministically.
pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> std::io::Result<()>
where
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut file = fs::File::create(path)?;
    writeln!(file, "{header}")?;
    for row in rows {
        writeln!(file, "{}", row.as_ref())?;
    }
    Ok(())
}
