use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Serialize;

use super::SimError;

/// Sparse counts of observed maxima.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub counts: BTreeMap<u64, u64>,
    pub runs: u64,
}

impl Histogram {
    pub fn from_samples(samples: impl IntoIterator<Item = u64>) -> Self {
        let mut h = Histogram::default();
        for level in samples {
            h.add(level, 1);
        }
        h
    }

    pub fn add(&mut self, level: u64, count: u64) {
        if count > 0 {
            *self.counts.entry(level).or_insert(0) += count;
            self.runs += count;
        }
    }

    pub fn count(&self, level: u64) -> u64 {
        self.counts.get(&level).copied().unwrap_or(0)
    }

    pub fn frequency(&self, level: u64) -> f64 {
        self.count(level) as f64 / self.runs as f64
    }

    pub fn is_empty(&self) -> bool {
        self.runs == 0
    }

    pub fn mean(&self) -> f64 {
        self.counts.iter().map(|(&m, &c)| m as f64 * c as f64).sum::<f64>() / self.runs as f64
    }

    /// `level,count` rows in increasing level order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SimError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["level", "count"])?;
        for (level, count) in &self.counts {
            w.write_record([level.to_string(), count.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `level,count` rows; lines starting with `#` are skipped.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, SimError> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["level", "count"] {
            return Err(SimError::Format(format!("expected header level,count, found {headers:?}")));
        }
        let mut h = Histogram::default();
        for record in r.records() {
            let record = record?;
            let parse = |i: usize| {
                record[i].trim().parse::<u64>().map_err(|e| SimError::Format(format!("{e}: {:?}", &record[i])))
            };
            h.add(parse(0)?, parse(1)?);
        }
        Ok(h)
    }
}

/// Moments and range of the observed maxima.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleStats {
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub min: u64,
    pub max: u64,
}

impl SampleStats {
    pub fn from_histogram(h: &Histogram) -> Option<Self> {
        let min = *h.counts.keys().next()?;
        let max = *h.counts.keys().next_back()?;
        let runs = h.runs as f64;
        let mean = h.mean();
        let variance = if h.runs > 1 {
            h.counts.iter().map(|(&m, &c)| c as f64 * (m as f64 - mean).powi(2)).sum::<f64>() / (runs - 1.0)
        } else {
            0.0
        };
        Some(SampleStats { mean, variance, stderr: (variance / runs).sqrt(), min, max })
    }
}
