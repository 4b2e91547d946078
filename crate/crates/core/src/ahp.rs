//! Attribute weights from pairwise comparisons (AHP).
//!
//! A reciprocal comparison matrix is reduced to its principal eigenvector by
//! power iteration; the eigenvector, scaled to sum to one, is the weight
//! vector. Saaty's consistency ratio is reported alongside.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Relative tolerance for `b_ji * b_ij == 1`.
pub const RECIPROCAL_TOLERANCE: f64 = 1e-9;
/// Tolerance on `Σ W_j = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;
/// Consistency ratios above this trigger a warning.
pub const CONSISTENCY_LIMIT: f64 = 0.1;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Random consistency index for n = 1..=15. Entries past 9 are Saaty's
/// extended values.
const RANDOM_INDEX: [f64; 15] = [
    0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49, 1.51, 1.48, 1.56, 1.57, 1.59,
];

pub fn random_index(n: usize) -> f64 {
    match n {
        0 => 0.0,
        n if n <= RANDOM_INDEX.len() => RANDOM_INDEX[n - 1],
        _ => RANDOM_INDEX[RANDOM_INDEX.len() - 1],
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AhpError {
    #[error("comparison matrix must be square with n >= 2: {0}")]
    Dimension(String),
    #[error("comparison matrix is not a valid reciprocal matrix: {0}")]
    Invalid(ValidationReport),
    #[error(
        "power iteration did not converge after {iterations} iterations (last change {residual:e})"
    )]
    Convergence { iterations: usize, residual: f64 },
    #[error("weights must be positive and finite: {0}")]
    Domain(String),
}

/// One defect found by [`validate_matrix`]. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixViolation {
    Diagonal {
        i: usize,
        value: f64,
    },
    NotReciprocal {
        i: usize,
        j: usize,
        b_ij: f64,
        b_ji: f64,
    },
    NonPositive {
        i: usize,
        j: usize,
        value: f64,
    },
}

impl fmt::Display for MatrixViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Diagonal { i, value } => write!(f, "b[{i}][{i}] = {value}, expected 1"),
            Self::NotReciprocal { i, j, b_ij, b_ji } => {
                write!(
                    f,
                    "b[{i}][{j}] = {b_ij} but b[{j}][{i}] = {b_ji}, expected {}",
                    1.0 / b_ij
                )
            }
            Self::NonPositive { i, j, value } => {
                write!(f, "b[{i}][{j}] = {value} is not a positive finite number")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<MatrixViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Square pairwise comparison matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct ComparisonMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl ComparisonMatrix {
    /// Accepts any square matrix with n >= 2; use [`validate_matrix`] to
    /// check the reciprocal structure.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, AhpError> {
        let n = rows.len();
        if n < 2 {
            return Err(AhpError::Dimension(format!("got {n} rows")));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(AhpError::Dimension(format!(
                "row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        Ok(Self {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds `b_ij = w_i / w_j`, a perfectly consistent matrix.
    pub fn from_weights(w: &[f64]) -> Result<Self, AhpError> {
        if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(AhpError::Domain("ratio weights must be positive".into()));
        }
        Self::from_rows(
            w.iter()
                .map(|wi| w.iter().map(|wj| wi / wj).collect())
                .collect(),
        )
    }

    /// Builds a matrix from upper-triangle judgments `(i, j, a_ij)` with
    /// `i < j`; the diagonal is 1 and the lower triangle holds reciprocals.
    /// Judgments must be on the Saaty scale (1..=9 or a reciprocal of one);
    /// unset pairs default to 1.
    pub fn from_judgments(n: usize, judgments: &[(usize, usize, f64)]) -> Result<Self, AhpError> {
        if n < 2 {
            return Err(AhpError::Dimension(format!("got n = {n}")));
        }
        let mut rows = vec![vec![1.0; n]; n];
        for &(i, j, a) in judgments {
            if i >= n || j >= n || i == j {
                return Err(AhpError::Dimension(format!(
                    "judgment ({i}, {j}) out of range for n = {n}"
                )));
            }
            if !is_saaty_value(a) {
                return Err(AhpError::Domain(format!(
                    "judgment ({i}, {j}) = {a} is not on the 1..9 scale or a reciprocal"
                )));
            }
            rows[i][j] = a;
            rows[j][i] = 1.0 / a;
        }
        Self::from_rows(rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        for (row, o) in self.entries.chunks(self.n).zip(out.iter_mut()) {
            *o = row.iter().zip(v).map(|(b, x)| b * x).sum();
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for ComparisonMatrix {
    type Error = AhpError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        Self::from_rows(rows)
    }
}

impl From<ComparisonMatrix> for Vec<Vec<f64>> {
    fn from(m: ComparisonMatrix) -> Self {
        m.rows()
    }
}

fn is_saaty_value(a: f64) -> bool {
    (1..=9).any(|k| {
        let k = k as f64;
        (a - k).abs() < 1e-9 || (a - 1.0 / k).abs() < 1e-9
    })
}

pub fn validate_matrix(b: &ComparisonMatrix) -> ValidationReport {
    let n = b.n();
    let mut violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = b.get(i, j);
            if !(v.is_finite() && v > 0.0) {
                violations.push(MatrixViolation::NonPositive { i, j, value: v });
            }
        }
    }
    for i in 0..n {
        let d = b.get(i, i);
        if d.is_finite() && d > 0.0 && (d - 1.0).abs() > RECIPROCAL_TOLERANCE {
            violations.push(MatrixViolation::Diagonal { i, value: d });
        }
        for j in i + 1..n {
            let (bij, bji) = (b.get(i, j), b.get(j, i));
            let positive = bij.is_finite() && bij > 0.0 && bji.is_finite() && bji > 0.0;
            if positive && (bij * bji - 1.0).abs() > RECIPROCAL_TOLERANCE {
                violations.push(MatrixViolation::NotReciprocal {
                    i,
                    j,
                    b_ij: bij,
                    b_ji: bji,
                });
            }
        }
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub lambda_max: f64,
    /// Principal eigenvector with unit 1-norm.
    pub vector: Vec<f64>,
    pub consistency_ratio: f64,
    pub iterations: usize,
}

impl EigenResult {
    pub fn is_consistent(&self) -> bool {
        self.consistency_ratio <= CONSISTENCY_LIMIT
    }
}

/// `(λ_max − n) / ((n − 1) · RI(n))`, clamped at zero; zero when RI(n) is 0.
pub fn consistency_ratio(lambda_max: f64, n: usize) -> f64 {
    let ri = random_index(n);
    if ri == 0.0 || n < 2 {
        return 0.0;
    }
    ((lambda_max - n as f64) / ((n - 1) as f64 * ri)).max(0.0)
}

/// Power iteration from the uniform vector. Iterates are 1-norm normalized;
/// stops once no component moves by `tol` or more.
pub fn principal_eigenvector(
    b: &ComparisonMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<EigenResult, AhpError> {
    let report = validate_matrix(b);
    if !report.is_ok() {
        return Err(AhpError::Invalid(report));
    }
    let n = b.n();
    let mut v = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        b.mul_vec(&v, &mut next);
        let norm: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= norm);
        residual = v
            .iter()
            .zip(&next)
            .map(|(a, c)| (a - c).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut v, &mut next);
        if residual < tol {
            let lambda_max = rayleigh_quotient(b, &v);
            return Ok(EigenResult {
                lambda_max,
                consistency_ratio: consistency_ratio(lambda_max, n),
                vector: v,
                iterations: iter,
            });
        }
    }
    Err(AhpError::Convergence {
        iterations: max_iter,
        residual,
    })
}

fn rayleigh_quotient(b: &ComparisonMatrix, v: &[f64]) -> f64 {
    let mut bv = vec![0.0; v.len()];
    b.mul_vec(v, &mut bv);
    let num: f64 = v.iter().zip(&bv).map(|(a, c)| a * c).sum();
    let den: f64 = v.iter().map(|a| a * a).sum();
    num / den
}

/// Attribute weights: each strictly inside (0, 1), summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self, AhpError> {
        if weights.len() < 2 {
            return Err(AhpError::Domain(format!(
                "need at least two weights, got {}",
                weights.len()
            )));
        }
        if let Some((j, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0 && **w < 1.0))
        {
            return Err(AhpError::Domain(format!("weight {j} = {w} outside (0, 1)")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(AhpError::Domain(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<f64>::deserialize(d)?;
        Self::new(raw).map_err(serde::de::Error::custom)
    }
}

/// `W_j = V_j / Σ V`.
pub fn normalize_weights(v: &[f64]) -> Result<WeightVector, AhpError> {
    if let Some((j, x)) = v
        .iter()
        .enumerate()
        .find(|(_, x)| !(x.is_finite() && **x > 0.0))
    {
        return Err(AhpError::Domain(format!("entry {j} = {x} is not positive")));
    }
    let sum: f64 = v.iter().sum();
    let mut w: Vec<f64> = v.iter().map(|x| x / sum).collect();
    // Fold the rounding residue into the largest entry so the sum is exact
    // to within one ulp.
    let residue = 1.0 - w.iter().sum::<f64>();
    if let Some(max) = w.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *max += residue;
    }
    WeightVector::new(w)
}

/// Full route: validate, iterate, normalize.
pub fn derive_weights(b: &ComparisonMatrix) -> Result<(WeightVector, EigenResult), AhpError> {
    let eig = principal_eigenvector(b, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)?;
    let w = normalize_weights(&eig.vector)?;
    Ok((w, eig))
}
