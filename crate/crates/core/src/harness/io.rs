//! Reading and writing trial records as CSV or JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::stats::{phase_statistics, PhaseSummary};
use super::{ExperimentConfig, TrialRecord};
use crate::error::{Error, Result};

/// Serde adapter writing a partition as `3-2-1`.
pub mod dashed {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::partition::IntPartition;

    pub fn serialize<S: Serializer>(p: &IntPartition, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&p.to_dashed())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IntPartition, D::Error> {
        let s = String::deserialize(d)?;
        IntPartition::from_dashed(&s).map_err(D::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub summary: PhaseSummary,
}

impl ExperimentOutput {
    pub fn new(config: ExperimentConfig, records: Vec<TrialRecord>) -> Result<Self> {
        let summary = phase_statistics(&records)?;
        Ok(ExperimentOutput {
            schema_version: 1,
            config,
            records,
            summary,
        })
    }
}

pub fn write_csv<W: Write>(records: &[TrialRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn parse_csv<R: Read>(r: R) -> Result<Vec<TrialRecord>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub fn write_output(path: &Path, format: OutputFormat, output: &ExperimentOutput) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut w, output)?;
            w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
        OutputFormat::Csv => write_csv(&output.records, &mut w)?,
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads records from a CSV file or from the JSON written by
/// [`write_output`], whichever the content looks like.
pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut text = String::new();
    BufReader::new(file)
        .read_to_string(&mut text)
        .map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('{') {
        let out: ExperimentOutput = serde_json::from_str(&text)?;
        if out.schema_version != 1 {
            return Err(Error::Parse(format!("unsupported schema_version {}", out.schema_version)));
        }
        Ok(out.records)
    } else {
        parse_csv(text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{simulate, Scheme};
    use crate::partition::IntPartition;

    fn sample() -> (ExperimentConfig, Vec<TrialRecord>) {
        let c = ExperimentConfig::new(8, 20, 11, Scheme::Merge);
        let r = simulate(&c).unwrap();
        (c, r)
    }

    #[test]
    fn csv_header_and_roundtrip() {
        let (_, recs) = sample();
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), "trial,seed,n,scheme,T,t_third,final_cycle_type");
        assert!(text.lines().nth(1).unwrap().starts_with("0,"));
        assert_eq!(parse_csv(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn json_roundtrip_and_schema() {
        let (c, recs) = sample();
        let out = ExperimentOutput::new(c, recs).unwrap();
        let text = serde_json::to_string(&out).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert!(v["records"][0]["final_cycle_type"].is_string());
        assert!(v["records"][0]["T"].is_u64());
        let back: ExperimentOutput = serde_json::from_str(&text).unwrap();
        assert_eq!(back, out);
    }

    #[test]
    fn files_are_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        for format in [OutputFormat::Json, OutputFormat::Csv] {
            let a = dir.path().join("a");
            let b = dir.path().join("b");
            for p in [&a, &b] {
                let (c, recs) = sample();
                write_output(p, format, &ExperimentOutput::new(c, recs).unwrap()).unwrap();
            }
            assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
            assert_eq!(read_records(&a).unwrap(), sample().1);
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(read_records(Path::new("/nonexistent/records.csv")).is_err());
        let bad = "trial,seed,n,scheme,T,t_third,final_cycle_type\n0,1,3,merge,2,0,3-x\n";
        assert!(parse_csv(bad.as_bytes()).is_err());
        let ok = "trial,seed,n,scheme,T,t_third,final_cycle_type\n0,1,3,merge,2,0,2-1\n";
        assert_eq!(parse_csv(ok.as_bytes()).unwrap()[0].final_cycle_type, IntPartition::new(vec![2, 1]));
    }
}
