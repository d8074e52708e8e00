//! File schemas consumed and produced by the command-line tools.
//!
//! Settings files are JSON documents with three entries `alice`, `bob`,
//! `celine`, each an array of two arrays of three angles in radians. An
//! angle is either a number or an exact literal such as `"pi"`, `"pi/3"`,
//! `"2pi/3"`, `"5pi/3"`, which resolves without decimal truncation.
//!
//! State files are JSON arrays of 27 `[re, im]` pairs in the flat basis
//! order; the norm is validated on load.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::Value;
use thiserror::Error;

use crate::experiment::{MeasurementSettings, PureState};
use crate::sixport::PhaseTriple;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("{path}: {field}: {message}")]
    Schema {
        path: PathBuf,
        field: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        source: crate::error::Error,
    },
}

/// Resolves an exact angle literal of the form `pi`, `Kpi`, `pi/D` or
/// `Kpi/D`, with an optional leading minus sign.
pub fn parse_angle_literal(text: &str) -> Option<f64> {
    let trimmed = text.trim();
    let (sign, rest) = match trimmed.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, trimmed),
    };
    let pi_at = rest.find("pi")?;
    let (numerator, tail) = rest.split_at(pi_at);
    let tail = &tail[2..];

    let k: u32 = if numerator.is_empty() {
        1
    } else {
        numerator.parse().ok()?
    };
    let d: u32 = if tail.is_empty() {
        1
    } else {
        tail.strip_prefix('/')?.parse().ok()?
    };
    if d == 0 {
        return None;
    }
    Some(sign * (f64::from(k) * PI) / f64::from(d))
}

fn angle_from_value(value: &Value) -> Result<f64, String> {
    match value {
        Value::Number(n) => n
            .as_f64()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("{n} is not a finite number")),
        Value::String(s) => parse_angle_literal(s)
            .ok_or_else(|| format!("\"{s}\" is not an angle literal like \"2pi/3\"")),
        other => Err(format!("expected number or angle string, got {other}")),
    }
}

fn schema_error(path: &Path, field: impl Into<String>, message: impl Into<String>) -> LoadError {
    LoadError::Schema {
        path: path.to_path_buf(),
        field: field.into(),
        message: message.into(),
    }
}

fn read_json(path: &Path) -> Result<Value, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| LoadError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_triple(path: &Path, party: &str, setting: usize, value: &Value) -> Result<PhaseTriple, LoadError> {
    let field = format!("{party}[{setting}]");
    let angles = value
        .as_array()
        .ok_or_else(|| schema_error(path, &field, "expected an array of three angles"))?;
    if angles.len() != 3 {
        return Err(schema_error(
            path,
            &field,
            format!("expected 3 angles, got {}", angles.len()),
        ));
    }
    let mut parsed = [0.0f64; 3];
    for (idx, angle) in angles.iter().enumerate() {
        parsed[idx] = angle_from_value(angle)
            .map_err(|message| schema_error(path, format!("{field}[{idx}]"), message))?;
    }
    Ok(PhaseTriple::from(parsed))
}

fn parse_party(path: &Path, doc: &Value, party: &str) -> Result<[PhaseTriple; 2], LoadError> {
    let entry = doc
        .get(party)
        .ok_or_else(|| schema_error(path, party, "missing entry"))?;
    let pair = entry
        .as_array()
        .ok_or_else(|| schema_error(path, party, "expected an array of two settings"))?;
    if pair.len() != 2 {
        return Err(schema_error(
            path,
            party,
            format!("expected 2 settings, got {}", pair.len()),
        ));
    }
    Ok([
        parse_triple(path, party, 0, &pair[0])?,
        parse_triple(path, party, 1, &pair[1])?,
    ])
}

/// Loads a settings file.
pub fn load_settings(path: &Path) -> Result<MeasurementSettings, LoadError> {
    let doc = read_json(path)?;
    if !doc.is_object() {
        return Err(schema_error(path, "document", "expected a JSON object"));
    }
    let alice = parse_party(path, &doc, "alice")?;
    let bob = parse_party(path, &doc, "bob")?;
    let celine = parse_party(path, &doc, "celine")?;
    MeasurementSettings::new(alice, bob, celine).map_err(|source| LoadError::Invalid {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a state file and validates its norm.
pub fn load_state(path: &Path) -> Result<PureState, LoadError> {
    let doc = read_json(path)?;
    let rows = doc
        .as_array()
        .ok_or_else(|| schema_error(path, "document", "expected a JSON array of 27 [re, im] pairs"))?;
    if rows.len() != 27 {
        return Err(schema_error(
            path,
            "document",
            format!("expected 27 amplitudes, got {}", rows.len()),
        ));
    }
    let mut amplitudes = [Complex64::new(0.0, 0.0); 27];
    for (idx, row) in rows.iter().enumerate() {
        let field = format!("[{idx}]");
        let pair = row
            .as_array()
            .ok_or_else(|| schema_error(path, &field, "expected a [re, im] pair"))?;
        if pair.len() != 2 {
            return Err(schema_error(
                path,
                &field,
                format!("expected 2 components, got {}", pair.len()),
            ));
        }
        let component = |slot: usize| -> Result<f64, LoadError> {
            pair[slot]
                .as_f64()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    schema_error(path, format!("{field}[{slot}]"), "expected a finite number")
                })
        };
        amplitudes[idx] = Complex64::new(component(0)?, component(1)?);
    }
    PureState::new(amplitudes).map_err(|source| LoadError::Invalid {
        path: path.to_path_buf(),
        source,
    })
}

/// Settings in the file schema, ready to serialize.
pub fn settings_to_json(settings: &MeasurementSettings) -> Value {
    let triple = |t: &PhaseTriple| serde_json::json!([t.phi1, t.phi2, t.phi3]);
    let party = |pair: &[PhaseTriple; 2]| serde_json::json!([triple(&pair[0]), triple(&pair[1])]);
    serde_json::json!({
        "alice": party(&settings.alice),
        "bob": party(&settings.bob),
        "celine": party(&settings.celine),
    })
}

/// State amplitudes in the file schema.
pub fn state_to_json(state: &PureState) -> Value {
    Value::Array(
        state
            .amplitudes()
            .iter()
            .map(|a| serde_json::json!([a.re, a.im]))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;
    use tempfile::NamedTempFile;

    fn write_file(contents: &str) -> NamedTempFile {
        let mut file = NamedTempFile::new().unwrap();
        file.write_all(contents.as_bytes()).unwrap();
        file
    }

    #[test]
    fn angle_literals_resolve_exactly() {
        assert_eq!(parse_angle_literal("pi"), Some(PI));
        assert_eq!(parse_angle_literal("pi/3"), Some(PI / 3.0));
        assert_eq!(parse_angle_literal("2pi/3"), Some(2.0 * PI / 3.0));
        assert_eq!(parse_angle_literal("5pi/3"), Some(5.0 * PI / 3.0));
        assert_eq!(parse_angle_literal("-pi/2"), Some(-(PI / 2.0)));
        assert_eq!(parse_angle_literal("2pi"), Some(2.0 * PI));
        assert_eq!(parse_angle_literal("pi/0"), None);
        assert_eq!(parse_angle_literal("tau"), None);
        assert_eq!(parse_angle_literal("pix"), None);
        assert_eq!(parse_angle_literal("1.5pi"), None);
    }

    #[test]
    fn settings_round_trip_through_schema() {
        let settings = crate::optimizer::paper_settings();
        let json = settings_to_json(&settings);
        let file = write_file(&serde_json::to_string(&json).unwrap());
        let loaded = load_settings(file.path()).unwrap();
        assert_eq!(loaded, settings);
    }

    #[test]
    fn paper_settings_file_with_literals_is_exact() {
        let file = write_file(
            r#"{
                "alice":  [[0, 0, "2pi/3"], [0, 0, 0]],
                "bob":    [[0, 0, "pi"],    [0, 0, "5pi/3"]],
                "celine": [[0, "pi/3", 0],  [0, "pi", 0]]
            }"#,
        );
        let loaded = load_settings(file.path()).unwrap();
        assert_eq!(loaded, crate::optimizer::paper_settings());
    }

    #[test]
    fn settings_schema_errors_name_the_field() {
        let missing_party = write_file(r#"{"alice": [[0,0,0],[0,0,0]], "bob": [[0,0,0],[0,0,0]]}"#);
        let err = load_settings(missing_party.path()).unwrap_err();
        assert!(err.to_string().contains("celine"), "{err}");

        let short_triple = write_file(
            r#"{"alice": [[0,0],[0,0,0]], "bob": [[0,0,0],[0,0,0]], "celine": [[0,0,0],[0,0,0]]}"#,
        );
        let err = load_settings(short_triple.path()).unwrap_err();
        assert!(err.to_string().contains("alice[0]"), "{err}");

        let bad_literal = write_file(
            r#"{"alice": [[0,0,"tau"],[0,0,0]], "bob": [[0,0,0],[0,0,0]], "celine": [[0,0,0],[0,0,0]]}"#,
        );
        let err = load_settings(bad_literal.path()).unwrap_err();
        assert!(err.to_string().contains("alice[0][2]"), "{err}");

        let truncated = write_file(r#"{"alice": [[0,0,0],"#);
        assert!(matches!(
            load_settings(truncated.path()).unwrap_err(),
            LoadError::Json { .. }
        ));

        assert!(matches!(
            load_settings(Path::new("/nonexistent/settings.json")).unwrap_err(),
            LoadError::Io { .. }
        ));
    }

    #[test]
    fn state_round_trip_and_errors() {
        let ghz = PureState::ghz();
        let file = write_file(&serde_json::to_string(&state_to_json(&ghz)).unwrap());
        assert_eq!(load_state(file.path()).unwrap(), ghz);

        let short = write_file("[[1.0, 0.0]]");
        let err = load_state(short.path()).unwrap_err();
        assert!(err.to_string().contains("expected 27"), "{err}");

        let unnormalized = write_file(&serde_json::to_string(&vec![[0.5f64, 0.0]; 27]).unwrap());
        assert!(matches!(
            load_state(unnormalized.path()).unwrap_err(),
            LoadError::Invalid { .. }
        ));

        let non_numeric = {
            let mut rows: Vec<Value> = (0..27).map(|_| serde_json::json!([0.0, 0.0])).collect();
            rows[0] = serde_json::json!([1.0, "x"]);
            write_file(&serde_json::to_string(&Value::Array(rows)).unwrap())
        };
        let err = load_state(non_numeric.path()).unwrap_err();
        assert!(err.to_string().contains("[0][1]"), "{err}");
    }
}
