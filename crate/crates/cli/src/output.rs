use std::io::Write;

use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal form of `round12(x)`.
pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    let r = round12(x);
    if r == 0.0 {
        // no "-0"
        return "0".to_string();
    }
    if (1e-6..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Round every float in a JSON tree. Non-finite floats are already `null`.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map(round12).map_or(Value::Null, Value::from),
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "NaN".to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => fmt12(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        // complex numbers and other small objects inline as compact JSON
        other => other.to_string(),
    }
}

/// Rows of a flat table: an array of objects with scalar fields.
fn as_table(v: &Value) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let rows = v.as_array()?;
    let first = rows.first()?.as_object()?;
    let header: Vec<String> = first.keys().cloned().collect();
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let obj = row.as_object()?;
        out.push(header.iter().map(|k| obj.get(k).map_or_else(String::new, scalar)).collect());
    }
    Some((header, out))
}

fn write_csv(v: &Value, out: &mut dyn Write) -> Result<(), CliError> {
    let (header, rows) = match as_table(v) {
        Some(t) => t,
        None if v.as_array().is_some_and(Vec::is_empty) => (Vec::new(), Vec::new()),
        None => return Err(CliError::Usage("this output is not a flat table; use --format json or pretty".into())),
    };
    let mut w = csv::Writer::from_writer(out);
    if !header.is_empty() {
        w.write_record(&header)?;
    }
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn pretty_table(header: &[String], rows: &[Vec<String>], indent: &str, out: &mut dyn Write) -> std::io::Result<()> {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).chain([header[c].chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        cells.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    writeln!(out, "{indent}{}", line(header))?;
    for r in rows {
        writeln!(out, "{indent}{}", line(r))?;
    }
    Ok(())
}

fn write_pretty(v: &Value, indent: &str, out: &mut dyn Write) -> std::io::Result<()> {
    if let Some((header, rows)) = as_table(v) {
        return pretty_table(&header, &rows, indent, out);
    }
    match v {
        Value::Object(map) => write_object(map, indent, out),
        Value::Array(items) if items.is_empty() => writeln!(out, "{indent}(none)"),
        Value::Array(items) => {
            for (k, item) in items.iter().enumerate() {
                writeln!(out, "{indent}[{k}]")?;
                write_pretty(item, &format!("{indent}  "), out)?;
            }
            Ok(())
        }
        other => writeln!(out, "{indent}{}", scalar(other)),
    }
}

fn write_object(map: &Map<String, Value>, indent: &str, out: &mut dyn Write) -> std::io::Result<()> {
    let nested =
        |v: &Value| v.is_array() || v.as_object().is_some_and(|o| o.values().any(|x| x.is_array() || x.is_object()));
    let width = map.iter().filter(|(_, v)| !nested(v)).map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    for (k, v) in map {
        match v {
            Value::Array(_) => {
                writeln!(out, "{indent}{k}:")?;
                write_pretty(v, &format!("{indent}  "), out)?;
            }
            Value::Object(inner) if nested(v) => {
                writeln!(out, "{indent}{k}:")?;
                write_object(inner, &format!("{indent}  "), out)?;
            }
            _ => writeln!(out, "{indent}{k:<width$}  {}", scalar(v))?,
        }
    }
    Ok(())
}

pub fn emit(value: Value, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let value = round_value(value);
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &value)?;
            writeln!(out)?;
        }
        Format::Csv => write_csv(&value, out)?,
        Format::Pretty => write_pretty(&value, "", out)?,
    }
    Ok(())
}
