//! CSV records and per-cell summaries.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{io_error, BenchError};

/// One synthesised instance. `runtime_s` is empty when timing is off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub arch: String,
    pub gadgets: usize,
    pub instance: usize,
    pub cx_count: usize,
    pub cx_depth: usize,
    #[serde(with = "runtime_field")]
    pub runtime_s: Option<f64>,
    pub verified: bool,
}

/// Means over the verified instances of one `(arch, gadgets)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub arch: String,
    pub qubits: usize,
    pub gadgets: usize,
    pub instances: usize,
    #[serde(with = "mean_field")]
    pub cx_count: f64,
    #[serde(with = "mean_field")]
    pub cx_depth: f64,
    #[serde(with = "runtime_field")]
    pub runtime_s: Option<f64>,
}

impl CellSummary {
    /// Summarises the verified records; `None` if there are none.
    pub fn from_records(qubits: usize, records: &[BenchRecord]) -> Option<Self> {
        let ok: Vec<&BenchRecord> = records.iter().filter(|r| r.verified).collect();
        let first = ok.first()?;
        let count = ok.len() as f64;
        let mean = |f: &dyn Fn(&BenchRecord) -> f64| ok.iter().map(|r| f(r)).sum::<f64>() / count;
        let runtime = if ok.iter().all(|r| r.runtime_s.is_some()) {
            Some(mean(&|r| r.runtime_s.unwrap_or(0.0)))
        } else {
            None
        };
        Some(CellSummary {
            arch: first.arch.clone(),
            qubits,
            gadgets: first.gadgets,
            instances: ok.len(),
            cx_count: mean(&|r| r.cx_count as f64),
            cx_depth: mean(&|r| r.cx_depth as f64),
            runtime_s: runtime,
        })
    }
}

mod runtime_field {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_str(&format!("{x:.4}")),
            None => s.serialize_str(""),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let text = String::deserialize(d)?;
        if text.trim().is_empty() {
            return Ok(None);
        }
        text.trim()
            .parse()
            .map(Some)
            .map_err(serde::de::Error::custom)
    }
}

mod mean_field {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:.2}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let text = String::deserialize(d)?;
        text.trim().parse().map_err(serde::de::Error::custom)
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), BenchError> {
    let file = std::fs::File::create(path).map_err(io_error(path))?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(io_error(path))?;
    Ok(())
}

/// Reads every row of a CSV file. Empty files are an error.
pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, BenchError> {
    let file = std::fs::File::open(path).map_err(io_error(path))?;
    let rows = csv::Reader::from_reader(file)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()?;
    if rows.is_empty() {
        return Err(BenchError::Config(format!(
            "{} has no rows",
            path.display()
        )));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(cx: usize, runtime: Option<f64>, verified: bool) -> BenchRecord {
        BenchRecord {
            arch: "line_4".into(),
            gadgets: 3,
            instance: 0,
            cx_count: cx,
            cx_depth: cx / 2,
            runtime_s: runtime,
            verified,
        }
    }

    #[test]
    fn summary_uses_verified_records_only() {
        let rows = [
            record(4, Some(0.5), true),
            record(8, Some(1.5), true),
            record(100, None, false),
        ];
        let s = CellSummary::from_records(4, &rows).unwrap();
        assert_eq!(s.instances, 2);
        assert_eq!(s.cx_count, 6.0);
        assert_eq!(s.cx_depth, 3.0);
        assert_eq!(s.runtime_s, Some(1.0));
        assert!(CellSummary::from_records(4, &[record(1, None, false)]).is_none());
    }

    #[test]
    fn csv_round_trip_with_and_without_timing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rows = vec![record(4, Some(0.12345), true), record(2, None, true)];
        write_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "arch,gadgets,instance,cx_count,cx_depth,runtime_s,verified\n\
             line_4,3,0,4,2,0.1235,true\n\
             line_4,3,0,2,1,,true\n"
        );
        let back: Vec<BenchRecord> = read_csv(&path).unwrap();
        assert_eq!(back[1], rows[1]);
        assert_eq!(back[0].runtime_s, Some(0.1235));
    }

    #[test]
    fn empty_csv_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        std::fs::write(
            &path,
            "arch,gadgets,instance,cx_count,cx_depth,runtime_s,verified\n",
        )
        .unwrap();
        assert!(read_csv::<BenchRecord>(&path).is_err());
    }
}
