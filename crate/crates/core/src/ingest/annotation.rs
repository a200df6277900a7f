use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::timing::DurationVector;

/// Labels dropped by [`durations`] unless the caller says otherwise.
pub const DEFAULT_EXCLUDE: [&str; 2] = ["", "sil"];

/// Shared boundaries written as decimal text may disagree in the last bits.
const BOUNDARY_SLACK_S: f64 = 1e-9;

const HEADER: [&str; 4] = ["tier", "label", "start_s", "end_s"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub label: String,
    pub start_s: f64,
    pub end_s: f64,
}

impl Interval {
    pub fn duration(&self) -> f64 {
        self.end_s - self.start_s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tier {
    pub name: String,
    pub intervals: Vec<Interval>,
}

/// Interval tiers in file order.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Annotation {
    pub tiers: Vec<Tier>,
}

#[derive(Deserialize)]
struct Row {
    tier: String,
    label: String,
    start_s: f64,
    end_s: f64,
}

impl Annotation {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
        Annotation::parse(&text)
    }

    /// Parses tab-separated rows under the header `tier label start_s end_s`.
    /// Rows of one tier must be in time order without overlap.
    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .quoting(false)
            .from_reader(text.as_bytes());
        let header = rdr.headers().map_err(|e| parse_error(1, e))?.clone();
        if header.iter().collect::<Vec<_>>() != HEADER {
            return Err(IngestError::ParseError {
                line: 1,
                msg: format!("header must be `{}`", HEADER.join("\t")),
            });
        }
        let mut ann = Annotation::default();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                parse_error(line, e)
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let row: Row = record
                .deserialize(Some(&header))
                .map_err(|e| parse_error(line, e))?;
            if !(row.start_s.is_finite() && row.end_s.is_finite() && row.start_s >= 0.0) {
                return Err(IngestError::ParseError {
                    line,
                    msg: "times must be finite and non-negative".into(),
                });
            }
            if row.end_s <= row.start_s {
                return Err(IngestError::ParseError {
                    line,
                    msg: format!(
                        "interval ends at {} before it starts at {}",
                        row.end_s, row.start_s
                    ),
                });
            }
            ann.push(
                &row.tier,
                Interval {
                    label: row.label,
                    start_s: row.start_s,
                    end_s: row.end_s,
                },
            )?;
        }
        Ok(ann)
    }

    /// Appends an interval to `tier`, creating the tier if needed.
    pub fn push(&mut self, tier: &str, iv: Interval) -> Result<(), IngestError> {
        let idx = match self.tiers.iter().position(|t| t.name == tier) {
            Some(i) => i,
            None => {
                self.tiers.push(Tier {
                    name: tier.to_string(),
                    intervals: Vec::new(),
                });
                self.tiers.len() - 1
            }
        };
        let t = &mut self.tiers[idx];
        if let Some(prev) = t.intervals.last() {
            if iv.start_s < prev.end_s - BOUNDARY_SLACK_S {
                return Err(IngestError::OverlapError {
                    tier: tier.to_string(),
                    index: t.intervals.len(),
                });
            }
        }
        t.intervals.push(iv);
        Ok(())
    }

    pub fn tier(&self, name: &str) -> Option<&Tier> {
        self.tiers.iter().find(|t| t.name == name)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = HEADER.join("\t");
        out.push('\n');
        for t in &self.tiers {
            for iv in &t.intervals {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    t.name, iv.label, iv.start_s, iv.end_s
                ));
            }
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), IngestError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|e| IngestError::io(path, e))
    }
}

fn parse_error(line: usize, e: impl std::fmt::Display) -> IngestError {
    IngestError::ParseError {
        line,
        msg: e.to_string(),
    }
}

/// Interval durations of `tier`, skipping intervals whose label is in
/// `exclude`.
pub fn durations(
    a: &Annotation,
    tier: &str,
    exclude: &[&str],
) -> Result<DurationVector, IngestError> {
    let t = a
        .tier(tier)
        .ok_or_else(|| IngestError::TierNotFound(tier.to_string()))?;
    let values = t
        .intervals
        .iter()
        .filter(|iv| !exclude.contains(&iv.label.as_str()))
        .map(Interval::duration)
        .collect();
    Ok(DurationVector::new(tier, values))
}
