//! The `time,status` dataset format and outlier injection tables.

use std::io::{Read, Write};
use std::path::Path;

use censored_mdpd::CensoredObservation;

use crate::error::{CliError, CliResult};

pub const DATASET_HEADER: &str = "time,status";

/// Ten replacement values for the ten largest uncensored survival times,
/// as `(original, replacement)` pairs.
pub const DEFAULT_INJECTION: [(f64, f64); 10] = [
    (1976.0, 36500.0),
    (2102.0, 40555.56),
    (2117.0, 45625.0),
    (2151.0, 52142.86),
    (2183.0, 60833.33),
    (2228.0, 73000.0),
    (2252.0, 91250.0),
    (2295.0, 121666.67),
    (2453.0, 182500.0),
    (2470.0, 365000.0),
];

fn open(path: &Path) -> CliResult<std::fs::File> {
    std::fs::File::open(path)
        .map_err(|e| CliError::user(format!("cannot open {}: {e}", path.display())))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &str) -> CliResult<()> {
    let header = rdr
        .headers()
        .map_err(|e| CliError::user(format!("cannot read header: {e}")))?;
    let got: Vec<&str> = header.iter().collect();
    if got.join(",") != expected {
        return Err(CliError::user(format!(
            "expected header \"{expected}\", found \"{}\"",
            got.join(",")
        )));
    }
    Ok(())
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Reads a dataset; every malformed row is reported with its line number.
pub fn read_dataset<R: Read>(input: R) -> CliResult<Vec<CensoredObservation>> {
    let mut rdr = reader(input);
    check_header(&mut rdr, DATASET_HEADER)?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::user(format!("invalid observation at line {line}: {e}"))
        })?;
        let line = line_of(&record);
        let bad = |why: &str| CliError::user(format!("invalid observation at line {line}: {why}"));
        if record.len() != 2 {
            return Err(bad("expected two fields"));
        }
        let time: f64 = record[0].parse().map_err(|_| bad("time is not a number"))?;
        let delta = match &record[1] {
            "1" => true,
            "0" => false,
            _ => return Err(bad("status must be 0 or 1")),
        };
        out.push(
            CensoredObservation::new(time, delta)
                .map_err(|_| bad("time must be positive and finite"))?,
        );
    }
    Ok(out)
}

pub fn read_dataset_file(path: &Path) -> CliResult<Vec<CensoredObservation>> {
    read_dataset(open(path)?)
}

pub fn write_dataset<W: Write>(mut out: W, observations: &[CensoredObservation]) -> CliResult<()> {
    writeln!(out, "{DATASET_HEADER}")?;
    for o in observations {
        writeln!(out, "{},{}", o.z, u8::from(o.delta))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads an `original,replacement` table.
pub fn read_injection_table<R: Read>(input: R) -> CliResult<Vec<(f64, f64)>> {
    let mut rdr = reader(input);
    check_header(&mut rdr, "original,replacement")?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::user(format!("invalid injection table: {e}")))?;
        let line = line_of(&record);
        let parse = |s: &str| -> CliResult<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .ok_or_else(|| CliError::user(format!("invalid injection entry at line {line}")))
        };
        if record.len() != 2 {
            return Err(CliError::user(format!(
                "invalid injection entry at line {line}"
            )));
        }
        out.push((parse(&record[0])?, parse(&record[1])?));
    }
    Ok(out)
}

pub fn read_injection_file(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    read_injection_table(open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_writes_round_trip() {
        let text = "time,status\n3.5,1\n2,0\n10.25,1\n";
        let obs = read_dataset(text.as_bytes()).unwrap();
        assert_eq!(obs.len(), 3);
        assert!(!obs[1].delta);
        let mut buf = Vec::new();
        write_dataset(&mut buf, &obs).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }

    #[test]
    fn reports_line_numbers() {
        let err = read_dataset("time,status\n1,1\n-2,0\n".as_bytes()).unwrap_err();
        assert_eq!(
            err.to_string(),
            "invalid observation at line 3: time must be positive and finite"
        );
        let err = read_dataset("time,status\n1,2\n".as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("invalid observation at line 2"));
        let err = read_dataset("time,status\nabc,1\n".as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("invalid observation at line 2"));
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(read_dataset("t,s\n1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn injection_table() {
        let t = read_injection_table("original,replacement\n5,10\n6,12.5\n".as_bytes()).unwrap();
        assert_eq!(t, vec![(5.0, 10.0), (6.0, 12.5)]);
        assert!(read_injection_table("original,replacement\n5,-1\n".as_bytes()).is_err());
    }
}
