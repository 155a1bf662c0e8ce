//! CSV rows with a fixed column order and six-decimal floats.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    Weighted,
    Unweighted,
}

impl Mechanism {
    pub const BOTH: [Mechanism; 2] = [Mechanism::Weighted, Mechanism::Unweighted];

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Weighted => "weighted",
            Mechanism::Unweighted => "unweighted",
        }
    }
}

/// `Replicate(r)` rows carry one run; `Mean` rows aggregate a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    Replicate(usize),
    Mean,
}

impl RowKind {
    fn cell(self) -> String {
        match self {
            RowKind::Replicate(r) => r.to_string(),
            RowKind::Mean => "mean".into(),
        }
    }
}

fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

fn opt<T>(x: Option<T>, f: impl Fn(T) -> String) -> String {
    x.map(f).unwrap_or_default()
}

pub trait CsvRow {
    fn header() -> &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep: String,
    pub parameter: String,
    pub value: f64,
    pub spread: Option<String>,
    pub target: Option<String>,
    pub mechanism: Mechanism,
    pub kind: RowKind,
    pub replicate_seed: Option<u64>,
    pub tp_discovery: f64,
    pub fp_discovery: f64,
    pub tp_sd: Option<f64>,
    pub fp_sd: Option<f64>,
}

impl CsvRow for SweepRow {
    fn header() -> &'static [&'static str] {
        &[
            "sweep",
            "parameter",
            "value",
            "spread",
            "target",
            "mechanism",
            "row",
            "replicate_seed",
            "tp_discovery",
            "fp_discovery",
            "tp_sd",
            "fp_sd",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.sweep.clone(),
            self.parameter.clone(),
            fixed(self.value),
            self.spread.clone().unwrap_or_default(),
            self.target.clone().unwrap_or_default(),
            self.mechanism.name().into(),
            self.kind.cell(),
            opt(self.replicate_seed, |s| s.to_string()),
            fixed(self.tp_discovery),
            fixed(self.fp_discovery),
            opt(self.tp_sd, fixed),
            opt(self.fp_sd, fixed),
        ]
    }
}

/// Pre-fill counts for one domain at one coverage. Replicate rows hold
/// totals over all annotators; mean rows average them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefillRow {
    pub domain: String,
    pub coverage: f64,
    pub kind: RowKind,
    pub replicate_seed: Option<u64>,
    pub transitive_equivalence: f64,
    pub subsumption_negativity: f64,
    pub disjointedness: f64,
    pub one_to_one_negativity: f64,
    pub conflicts: f64,
    pub total: f64,
    pub total_sd: Option<f64>,
}

impl CsvRow for PrefillRow {
    fn header() -> &'static [&'static str] {
        &[
            "sweep",
            "domain",
            "coverage",
            "row",
            "replicate_seed",
            "transitive_equivalence",
            "subsumption_negativity",
            "disjointedness",
            "one_to_one_negativity",
            "conflicts",
            "total",
            "total_sd",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            "prefill".into(),
            self.domain.clone(),
            fixed(self.coverage),
            self.kind.cell(),
            opt(self.replicate_seed, |s| s.to_string()),
            fixed(self.transitive_equivalence),
            fixed(self.subsumption_negativity),
            fixed(self.disjointedness),
            fixed(self.one_to_one_negativity),
            fixed(self.conflicts),
            fixed(self.total),
            opt(self.total_sd, fixed),
        ]
    }
}

pub fn write_csv<R: CsvRow, W: Write>(rows: &[R], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(R::header())?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv<R: CsvRow>(rows: &[R], path: &Path) -> Result<(), SimError> {
    write_csv(rows, File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_rows_give_header_only() {
        let mut buf = Vec::new();
        write_csv::<SweepRow, _>(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "sweep,parameter,value,spread,target,mechanism,row,replicate_seed,tp_discovery,fp_discovery,tp_sd,fp_sd\n"
        );
    }

    #[test]
    fn six_decimals() {
        let row = SweepRow {
            sweep: "trust".into(),
            parameter: "expert_ratio".into(),
            value: 0.1,
            spread: None,
            target: None,
            mechanism: Mechanism::Weighted,
            kind: RowKind::Mean,
            replicate_seed: None,
            tp_discovery: 2.0 / 3.0,
            fp_discovery: 0.0,
            tp_sd: Some(0.5),
            fp_sd: Some(0.0),
        };
        let mut buf = Vec::new();
        write_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "trust,expert_ratio,0.100000,,,weighted,mean,,0.666667,0.000000,0.500000,0.000000"
        );
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let err = emit_csv::<SweepRow>(&[], Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(matches!(err, SimError::Io(_)));
    }
}
