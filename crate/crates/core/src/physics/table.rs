use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Piecewise-linear sampled function `y(x)` with strictly increasing `x`.
///
/// No extrapolation: queries outside `[x_min, x_max]` are errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampledProfile {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidTable(format!("{} abscissae but {} values", xs.len(), ys.len())));
        }
        if xs.is_empty() {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidTable("non-finite entry".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTable("sample points must be strictly increasing".into()));
        }
        Ok(SampledProfile { xs, ys })
    }

    /// Reads a two-column CSV with a header row.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::InvalidTable(format!("row {} has {} columns, expected 2", line + 2, record.len())));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::InvalidTable(format!("row {}: cannot parse {s:?}: {e}", line + 2)))
            };
            xs.push(parse(&record[0])?);
            ys.push(parse(&record[1])?);
        }
        Self::new(xs, ys)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.x_min() <= lo && hi <= self.x_max()
    }

    pub fn at(&self, x: f64) -> Result<f64> {
        if !(x >= self.x_min() && x <= self.x_max()) {
            return Err(Error::OutOfRange { value: x, min: self.x_min(), max: self.x_max() });
        }
        // first index with xs[k] > x
        let k = self.xs.partition_point(|&s| s <= x);
        let lo = k - 1;
        if self.xs[lo] == x || lo + 1 == self.xs.len() {
            return Ok(self.ys[lo]);
        }
        let (x0, x1) = (self.xs[lo], self.xs[lo + 1]);
        let t = (x - x0) / (x1 - x0);
        Ok(self.ys[lo] + t * (self.ys[lo + 1] - self.ys[lo]))
    }

    /// Same table with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> SampledProfile {
        SampledProfile { xs: self.xs.clone(), ys: self.ys.iter().map(|y| y * factor).collect() }
    }
}
