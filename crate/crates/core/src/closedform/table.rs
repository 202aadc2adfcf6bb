use std::io::{Read, Write};

use serde::Serialize;

use super::ClosedFormError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PredictionRow {
    pub m: u64,
    pub cdf: f64,
    pub pmf: f64,
}

/// Distribution of `M_n` over levels `m = 0, 1, …`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionTable {
    pub ell: Option<u32>,
    pub p: f64,
    pub n: u64,
    pub rows: Vec<PredictionRow>,
    /// Probability mass allowed to sit beyond the last row.
    pub tail_tolerance: f64,
}

impl PredictionTable {
    /// Rows from consecutive CDF values starting at `m = 0`.
    pub fn from_cdf(ell: Option<u32>, p: f64, n: u64, cdf: impl IntoIterator<Item = f64>) -> Self {
        let mut prev = 0.0;
        let rows = cdf
            .into_iter()
            .enumerate()
            .map(|(m, c)| {
                let row = PredictionRow { m: m as u64, cdf: c, pmf: (c - prev).max(0.0) };
                prev = c;
                row
            })
            .collect();
        PredictionTable { ell, p, n, rows, tail_tolerance: 0.0 }
    }

    /// Rows from `(level, pmf)` pairs in increasing level order.
    pub fn from_pmf(ell: Option<u32>, p: f64, n: u64, pmf: impl IntoIterator<Item = (u64, f64)>) -> Self {
        let mut acc = 0.0;
        let rows = pmf
            .into_iter()
            .map(|(m, w)| {
                acc += w;
                PredictionRow { m, cdf: acc, pmf: w }
            })
            .collect();
        PredictionTable { ell, p, n, rows, tail_tolerance: 0.0 }
    }

    pub fn pmf_at(&self, m: u64) -> f64 {
        self.rows.binary_search_by_key(&m, |r| r.m).map(|i| self.rows[i].pmf).unwrap_or(0.0)
    }

    pub fn cdf_at(&self, m: u64) -> f64 {
        match self.rows.binary_search_by_key(&m, |r| r.m) {
            Ok(i) => self.rows[i].cdf,
            Err(0) => 0.0,
            Err(i) => self.rows[i - 1].cdf,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.rows.iter().map(|r| r.pmf).sum()
    }

    pub fn mean(&self) -> f64 {
        self.rows.iter().map(|r| r.m as f64 * r.pmf).sum::<f64>() / self.total_mass()
    }

    /// Level with the largest pmf (the lowest such level on ties).
    pub fn mode(&self) -> Option<u64> {
        self.rows
            .iter()
            .fold(None, |best: Option<&PredictionRow>, r| match best {
                Some(b) if b.pmf >= r.pmf => Some(b),
                _ => Some(r),
            })
            .map(|r| r.m)
    }

    /// `m,cdf,pmf` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ClosedFormError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["m", "cdf", "pmf"])?;
        for r in &self.rows {
            w.write_record([r.m.to_string(), r.cdf.to_string(), r.pmf.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `m,cdf,pmf` rows, skipping `#` lines. Metadata fields are left
    /// empty.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, ClosedFormError> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["m", "cdf", "pmf"] {
            return Err(ClosedFormError::Format(format!("expected header m,cdf,pmf, found {headers:?}")));
        }
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record?;
            let bad = |i: usize| ClosedFormError::Format(format!("bad field {:?}", &record[i]));
            rows.push(PredictionRow {
                m: record[0].trim().parse().map_err(|_| bad(0))?,
                cdf: record[1].trim().parse().map_err(|_| bad(1))?,
                pmf: record[2].trim().parse().map_err(|_| bad(2))?,
            });
        }
        Ok(PredictionTable { ell: None, p: f64::NAN, n: 0, rows, tail_tolerance: 0.0 })
    }
}
