//! Labeled point sets and their CSV form (`x1,...,xd,y`).

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset is empty")]
    Empty,
    #[error("row {row}: {msg}")]
    BadRow { row: usize, msg: String },
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Points stored row-major with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    x: Vec<f64>,
    y: Vec<bool>,
}

impl Dataset {
    pub fn new(dim: usize, x: Vec<f64>, y: Vec<bool>) -> Result<Self, DatasetError> {
        if dim == 0 || y.is_empty() {
            return Err(DatasetError::Empty);
        }
        if x.len() != dim * y.len() {
            return Err(DatasetError::BadRow {
                row: x.len() / dim,
                msg: format!("{} coordinates for {} labels of dimension {dim}", x.len(), y.len()),
            });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(DatasetError::BadRow { row: i / dim, msg: "non-finite coordinate".into() });
        }
        Ok(Dataset { dim, x, y })
    }

    pub fn from_points(points: &[[f64; 2]], labels: Vec<bool>) -> Result<Self, DatasetError> {
        Dataset::new(2, points.iter().flatten().copied().collect(), labels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.dim)
    }

    pub fn point_vec(&self) -> Vec<&[f64]> {
        self.points().collect()
    }

    pub fn labels(&self) -> &[bool] {
        &self.y
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&b| b).count()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        let mut x = Vec::with_capacity(idx.len() * self.dim);
        let mut y = Vec::with_capacity(idx.len());
        for &i in idx {
            x.extend_from_slice(self.point(i));
            y.push(self.y[i]);
        }
        Dataset { dim: self.dim, x, y }
    }

    /// Seeded random split into `(rest, held_out)` with `round(frac·n)` held out.
    pub fn split(&self, frac: f64, seed: u64) -> (Dataset, Dataset) {
        let n = self.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let k = ((frac * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1));
        let (held, rest) = idx.split_at(k);
        (self.subset(rest), self.subset(held))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), DatasetError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        header.push("y".into());
        out.write_record(&header)?;
        for (p, &y) in self.points().zip(&self.y) {
            let mut rec: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            rec.push(if y { "1" } else { "0" }.into());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads `x1,...,xd[,y]`. Without a `y` column every label is false and
    /// `has_labels` is reported as false.
    pub fn read_csv<R: Read>(r: R) -> Result<(Dataset, bool), DatasetError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let header = rdr.headers()?.clone();
        let cols: Vec<&str> = header.iter().collect();
        let has_labels = cols.last() == Some(&"y");
        let dim = if has_labels { cols.len() - 1 } else { cols.len() };
        for (i, c) in cols.iter().take(dim).enumerate() {
            if *c != format!("x{}", i + 1) {
                return Err(DatasetError::BadHeader(format!("expected x{}, found {c}", i + 1)));
            }
        }
        if dim == 0 {
            return Err(DatasetError::BadHeader("no coordinate columns".into()));
        }
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let bad = |msg: String| DatasetError::BadRow { row: row + 1, msg };
            for k in 0..dim {
                let v: f64 = rec[k].parse().map_err(|_| bad(format!("cannot parse {:?}", &rec[k])))?;
                x.push(v);
            }
            if has_labels {
                y.push(match &rec[dim] {
                    "1" | "1.0" => true,
                    "0" | "0.0" => false,
                    other => return Err(bad(format!("label must be 0 or 1, got {other:?}"))),
                });
            } else {
                y.push(false);
            }
        }
        Ok((Dataset::new(dim, x, y)?, has_labels))
    }
}
