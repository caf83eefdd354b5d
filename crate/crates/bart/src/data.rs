//! Tabular data ingestion, cutpoint grids, outcome scaling, and the probit
//! offset.

use std::fs;
use std::path::Path;

use crate::error::{BartError, Result};
use crate::float::{cnt, cst, Real};
use crate::math::norm_quantile;

/// A fully numeric design matrix plus outcome vector.
///
/// Covariates are stored row-major. All values are finite; binary-outcome
/// checks happen at fit time because the same dataset can back either a
/// continuous or a probit fit.
#[derive(Clone, Debug)]
pub struct Dataset<F> {
    n: usize,
    p: usize,
    x: Vec<F>,
    y: Vec<F>,
    column_names: Vec<String>,
    outcome_name: String,
}

impl<F: Real> Dataset<F> {
    /// Build a dataset from row-major covariates and an outcome vector.
    pub fn new(
        column_names: Vec<String>,
        outcome_name: impl Into<String>,
        x: Vec<F>,
        y: Vec<F>,
    ) -> Result<Self> {
        let p = column_names.len();
        let n = y.len();
        if n == 0 {
            return Err(BartError::InvalidData("dataset has no rows".into()));
        }
        if p == 0 {
            return Err(BartError::InvalidData("dataset has no covariates".into()));
        }
        if x.len() != n * p {
            return Err(BartError::InvalidData(format!(
                "covariate matrix has {} entries, expected {}x{}",
                x.len(),
                n,
                p
            )));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(BartError::InvalidData(
                "dataset contains non-finite values".into(),
            ));
        }
        Ok(Dataset {
            n,
            p,
            x,
            y,
            column_names,
            outcome_name: outcome_name.into(),
        })
    }

    /// Parse a headered CSV file, extracting `outcome_column` as y and keeping
    /// the remaining columns, in file order, as covariates.
    pub fn load_csv(path: impl AsRef<Path>, outcome_column: &str) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| BartError::io(path, e))?;
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());

        let (_, header) = lines
            .next()
            .ok_or_else(|| BartError::parse(path, 1, "file is empty"))?;
        let header: Vec<&str> = header.split(',').map(str::trim).collect();
        let outcome_idx = header
            .iter()
            .position(|h| *h == outcome_column)
            .ok_or_else(|| BartError::OutcomeColumnMissing(outcome_column.to_string()))?;
        let column_names: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != outcome_idx)
            .map(|(_, h)| h.to_string())
            .collect();
        if column_names.is_empty() {
            return Err(BartError::InvalidData(
                "CSV must have at least one covariate column besides the outcome".into(),
            ));
        }

        let mut x = Vec::new();
        let mut y = Vec::new();
        for (line_idx, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != header.len() {
                return Err(BartError::parse(
                    path,
                    line_idx + 1,
                    format!("expected {} fields, found {}", header.len(), fields.len()),
                ));
            }
            for (col, field) in fields.iter().enumerate() {
                let value: F = field.parse().ok().filter(|v: &F| v.is_finite()).ok_or_else(|| {
                    BartError::parse(
                        path,
                        line_idx + 1,
                        format!("column '{}': invalid numeric value '{}'", header[col], field),
                    )
                })?;
                if col == outcome_idx {
                    y.push(value);
                } else {
                    x.push(value);
                }
            }
        }
        Dataset::new(column_names, outcome_column, x, y)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of covariate columns (P).
    pub fn num_covariates(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn x(&self, row: usize, col: usize) -> F {
        self.x[row * self.p + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[F] {
        &self.x[row * self.p..(row + 1) * self.p]
    }

    pub fn y(&self) -> &[F] {
        &self.y
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn outcome_name(&self) -> &str {
        &self.outcome_name
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    /// True when every outcome value is exactly 0 or 1.
    pub fn outcome_is_binary(&self) -> bool {
        self.y.iter().all(|&v| v == F::zero() || v == F::one())
    }

    /// Replace the outcome vector (used by outcome scaling).
    pub(crate) fn with_outcome(&self, y: Vec<F>) -> Self {
        let mut out = self.clone();
        assert_eq!(y.len(), out.n);
        out.y = y;
        out
    }

    /// Copy of the covariate matrix with the given columns negated.
    pub(crate) fn negated_covariates(&self, cols: &[usize]) -> Vec<F> {
        let mut x = self.x.clone();
        for &c in cols {
            for row in 0..self.n {
                x[row * self.p + c] = -x[row * self.p + c];
            }
        }
        x
    }
}

/// Per-covariate candidate split values, strictly inside the observed range.
#[derive(Clone, Debug)]
pub struct CutpointGrid<F> {
    cuts: Vec<Vec<F>>,
}

impl<F: Real> CutpointGrid<F> {
    /// `num_cut` equally spaced interior points per covariate. Covariates with
    /// a single distinct value get an empty list.
    pub fn make(d: &Dataset<F>, num_cut: usize) -> Self {
        assert!(num_cut >= 1, "num_cut must be at least 1");
        Self::from_matrix(&d.x, d.n, d.p, num_cut)
    }

    pub(crate) fn from_matrix(x: &[F], n: usize, p: usize, num_cut: usize) -> Self {
        let mut cuts = Vec::with_capacity(p);
        for col in 0..p {
            let mut lo = F::infinity();
            let mut hi = F::neg_infinity();
            for row in 0..n {
                let v = x[row * p + col];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if !(hi > lo) {
                cuts.push(Vec::new());
                continue;
            }
            let step = (hi - lo) / cnt::<F>(num_cut + 1);
            let col_cuts: Vec<F> = (1..=num_cut).map(|i| lo + step * cnt::<F>(i)).collect();
            cuts.push(col_cuts);
        }
        CutpointGrid { cuts }
    }

    pub fn num_covariates(&self) -> usize {
        self.cuts.len()
    }

    /// Ordered cutpoints for one covariate.
    pub fn cuts(&self, covariate: usize) -> &[F] {
        &self.cuts[covariate]
    }

    /// Number of cutpoints of `covariate` strictly inside the open interval
    /// (lo, hi), together with the index of the first one.
    pub fn cuts_within(&self, covariate: usize, lo: F, hi: F) -> (usize, usize) {
        let cuts = &self.cuts[covariate];
        let start = cuts.partition_point(|c| *c <= lo);
        let end = cuts.partition_point(|c| *c < hi);
        (start, end.saturating_sub(start))
    }
}

/// Affine map carrying a continuous outcome to the [-0.5, 0.5] training range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutcomeScaling<F> {
    pub shift: F,
    pub scale: F,
}

impl<F: Real> OutcomeScaling<F> {
    #[inline]
    pub fn apply(&self, y: F) -> F {
        (y - self.shift) / self.scale
    }

    #[inline]
    pub fn invert(&self, scaled: F) -> F {
        scaled * self.scale + self.shift
    }
}

/// Shift and rescale a continuous outcome so the training range is exactly
/// [-0.5, 0.5]. Fails on a constant outcome.
pub fn scale_outcome<F: Real>(d: &Dataset<F>) -> Result<(Dataset<F>, OutcomeScaling<F>)> {
    let mut lo = F::infinity();
    let mut hi = F::neg_infinity();
    for &v in d.y() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        return Err(BartError::InvalidData(
            "outcome is constant; cannot rescale to [-0.5, 0.5]".into(),
        ));
    }
    let scaling = OutcomeScaling {
        shift: (lo + hi) * cst::<F>(0.5),
        scale: hi - lo,
    };
    let y = d.y().iter().map(|&v| scaling.apply(v)).collect();
    Ok((d.with_outcome(y), scaling))
}

/// Probit offset c = Phi^{-1}(mean(y)), with the mean clamped to
/// [1/(n+1), n/(n+1)] so all-0 or all-1 outcomes stay finite.
pub fn compute_offset<F: Real>(y: &[F]) -> F {
    assert!(!y.is_empty(), "offset needs a nonempty outcome");
    let n = cnt::<F>(y.len());
    let mean = y.iter().fold(F::zero(), |acc, &v| acc + v) / n;
    let lo = F::one() / (n + F::one());
    let hi = n / (n + F::one());
    norm_quantile(mean.max(lo).min(hi))
}
