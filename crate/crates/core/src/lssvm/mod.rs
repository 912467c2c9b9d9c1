//! Least-squares support-vector-machine regression.
//!
//! Training solves the equality-constrained kernel regression problem via
//! one bordered linear system,
//!
//! ```text
//! [ 0   1ᵀ      ] [ b ]   [ 0 ]
//! [ 1   K + C⁻¹I] [ α ] = [ Y ]
//! ```
//!
//! evaluated in closed form with `H = K + C⁻¹I`:
//!
//! ```text
//! b = (1ᵀ H⁻¹ Y) / (1ᵀ H⁻¹ 1),     α = H⁻¹ (Y − 1 b)
//! ```
//!
//! `H` is factorized once (Cholesky) and the factor reused for both
//! right-hand sides. The fitted function is `f(x) = Σ αᵢ k(x, xᵢ) + b`.
//!
//! Every trained model is verified before being returned: the bordered
//! system residual must stay below [`KKT_RESIDUAL_TOL`] (scaled by
//! `max(1, max|Y|)`) and the dual sum below [`ZERO_SUM_TOL`] (scaled by
//! `1 + max|α|·l`).

mod linalg;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use linalg::{cholesky_factor, cholesky_solve};

/// Residual tolerance for the bordered system, per unit of `max(1, max|Y|)`.
pub const KKT_RESIDUAL_TOL: f64 = 1e-8;
/// Tolerance on `|Σ αᵢ|`, per unit of `1 + max|αᵢ|·l`.
pub const ZERO_SUM_TOL: f64 = 1e-10;

/// Errors from dataset construction, training and prediction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LssvmError {
    #[error("input dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dataset must contain at least one sample")]
    EmptyDataset,
    #[error("targets length {targets} does not match sample count {samples}")]
    TargetLengthMismatch { samples: usize, targets: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("regularization constant must be positive and finite, got {0}")]
    InvalidRegularization(f64),
    #[error("kernel matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("ill-conditioned solve: {check} residual {residual:e} exceeds {tolerance:e}")]
    IllConditioned {
        check: &'static str,
        residual: f64,
        tolerance: f64,
    },
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> LssvmError {
    LssvmError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// Per-feature z-score statistics, fitted on a training set and replayed
/// on every query so the kernel sees unit-free coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats<T> {
    pub mean: Vec<T>,
    pub std: Vec<T>,
}

impl<T: Scalar> NormStats<T> {
    /// Fits per-feature mean and population standard deviation.
    /// Zero-variance features get unit scale so they normalize to 0.
    fn fit(x: &[T], rows: usize, cols: usize) -> Self {
        let n = T::of(rows as f64);
        let mut mean = vec![T::zero(); cols];
        for r in 0..rows {
            for c in 0..cols {
                mean[c] += x[r * cols + c];
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut std = vec![T::zero(); cols];
        for r in 0..rows {
            for c in 0..cols {
                let d = x[r * cols + c] - mean[c];
                std[c] += d * d;
            }
        }
        for s in &mut std {
            *s = (*s / n).sqrt();
            if !(*s > T::zero()) || !s.is_finite() {
                *s = T::one();
            }
        }
        Self { mean, std }
    }

    fn apply_in_place(&self, row: &mut [T]) {
        for (c, v) in row.iter_mut().enumerate() {
            *v = (*v - self.mean[c]) / self.std[c];
        }
    }

    fn apply_flat(&self, x: &mut [T], cols: usize) {
        for row in x.chunks_mut(cols) {
            self.apply_in_place(row);
        }
    }
}

/// A regression training set: row-major inputs and one target per row,
/// with optional z-score statistics that training will honor.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    x: Vec<T>,
    y: Vec<T>,
    rows: usize,
    cols: usize,
    norm: Option<NormStats<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn from_rows(rows: Vec<Vec<T>>, y: Vec<T>) -> Result<Self, LssvmError> {
        let l = rows.len();
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        let mut flat = Vec::with_capacity(l * cols);
        for row in &rows {
            if row.len() != cols {
                return Err(LssvmError::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(flat, l, cols, y)
    }

    pub fn from_flat(x: Vec<T>, rows: usize, cols: usize, y: Vec<T>) -> Result<Self, LssvmError> {
        if rows == 0 || cols == 0 {
            return Err(LssvmError::EmptyDataset);
        }
        if x.len() != rows * cols {
            return Err(LssvmError::DimensionMismatch {
                expected: rows * cols,
                got: x.len(),
            });
        }
        if y.len() != rows {
            return Err(LssvmError::TargetLengthMismatch {
                samples: rows,
                targets: y.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(LssvmError::NonFinite("inputs"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(LssvmError::NonFinite("targets"));
        }
        Ok(Self {
            x,
            y,
            rows,
            cols,
            norm: None,
        })
    }

    /// Attaches z-score statistics fitted on this set; training will
    /// normalize features and store the statistics in the model.
    pub fn with_zscore(mut self) -> Self {
        self.norm = Some(NormStats::fit(&self.x, self.rows, self.cols));
        self
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn dim(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.x[i * self.cols..(i + 1) * self.cols]
    }

    pub fn targets(&self) -> &[T] {
        &self.y
    }

    pub fn norm_stats(&self) -> Option<&NormStats<T>> {
        self.norm.as_ref()
    }

    /// Feature matrix in the coordinates training will use: normalized
    /// when statistics are attached, raw otherwise.
    fn training_features(&self) -> Vec<T> {
        let mut x = self.x.clone();
        if let Some(norm) = &self.norm {
            norm.apply_flat(&mut x, self.cols);
        }
        x
    }

    /// Median pairwise Euclidean distance in the training coordinates:
    /// the usual bandwidth heuristic for the RBF kernel. Falls back to 1
    /// when there are fewer than two samples or all points coincide.
    pub fn rbf_bandwidth_heuristic(&self) -> T {
        if self.rows < 2 {
            return T::one();
        }
        let x = self.training_features();
        let mut dists = Vec::with_capacity(self.rows * (self.rows - 1) / 2);
        for i in 0..self.rows {
            for j in i + 1..self.rows {
                let a = &x[i * self.cols..(i + 1) * self.cols];
                let b = &x[j * self.cols..(j + 1) * self.cols];
                dists.push(squared_distance(a, b).sqrt());
            }
        }
        let mid = dists.len() / 2;
        let (_, median, _) = dists.select_nth_unstable_by(mid, |a, b| {
            a.partial_cmp(b).expect("finite distances")
        });
        if *median > T::zero() {
            *median
        } else {
            T::one()
        }
    }
}

fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Kernel family and hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum KernelSpec<T> {
    /// `exp(−‖x−x'‖² / (2σ²))`.
    Rbf { sigma: T },
    /// `⟨x, x'⟩`.
    Linear,
    /// `(⟨x, x'⟩ + offset)^degree`; `offset ≥ 0` keeps it positive
    /// semidefinite.
    Polynomial { degree: u32, offset: T },
}

impl<T: Scalar> KernelSpec<T> {
    pub fn rbf(sigma: T) -> Self {
        Self::Rbf { sigma }
    }

    pub fn validate(&self) -> Result<(), LssvmError> {
        match self {
            Self::Rbf { sigma } => {
                if !(*sigma > T::zero() && sigma.is_finite()) {
                    return Err(invalid("sigma", format!("must be positive, got {}", sigma)));
                }
            }
            Self::Linear => {}
            Self::Polynomial { degree, offset } => {
                if *degree < 1 {
                    return Err(invalid("degree", "must be at least 1"));
                }
                if !(*offset >= T::zero() && offset.is_finite()) {
                    return Err(invalid("offset", format!("must be >= 0, got {}", offset)));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the kernel; symmetric in its arguments.
    pub fn eval(&self, a: &[T], b: &[T]) -> Result<T, LssvmError> {
        if a.len() != b.len() {
            return Err(LssvmError::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        Ok(self.eval_unchecked(a, b))
    }

    fn eval_unchecked(&self, a: &[T], b: &[T]) -> T {
        match self {
            Self::Rbf { sigma } => {
                let two = T::of(2.0);
                (-squared_distance(a, b) / (two * *sigma * *sigma)).exp()
            }
            Self::Linear => dot(a, b),
            Self::Polynomial { degree, offset } => (dot(a, b) + *offset).powi(*degree as i32),
        }
    }
}

/// Pairwise kernel matrix of the dataset rows (raw coordinates), row-major
/// `l×l`. Each entry is computed once and mirrored, so `K = Kᵀ` exactly.
pub fn gram_matrix<T: Scalar>(
    data: &Dataset<T>,
    kernel: &KernelSpec<T>,
) -> Result<Vec<T>, LssvmError> {
    kernel.validate()?;
    Ok(gram_from_flat(&data.x, data.rows, data.cols, kernel))
}

fn gram_from_flat<T: Scalar>(x: &[T], rows: usize, cols: usize, kernel: &KernelSpec<T>) -> Vec<T> {
    let mut k = vec![T::zero(); rows * rows];
    for i in 0..rows {
        let a = &x[i * cols..(i + 1) * cols];
        for j in i..rows {
            let b = &x[j * cols..(j + 1) * cols];
            let v = kernel.eval_unchecked(a, b);
            k[i * rows + j] = v;
            k[j * rows + i] = v;
        }
    }
    k
}

/// A fitted LSSVM: dual coefficients, bias, retained training inputs (in
/// the normalized coordinates when statistics are present) and the kernel.
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedLssvm<T> {
    kernel: KernelSpec<T>,
    c: T,
    alpha: Vec<T>,
    b: T,
    train_x: Vec<T>,
    dim: usize,
    norm: Option<NormStats<T>>,
}

impl<T: Scalar> TrainedLssvm<T> {
    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn bias(&self) -> T {
        self.b
    }

    pub fn kernel(&self) -> &KernelSpec<T> {
        &self.kernel
    }

    pub fn regularization(&self) -> T {
        self.c
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_stats(&self) -> Option<&NormStats<T>> {
        self.norm.as_ref()
    }

    /// Retained training inputs, row-major, in the model's internal
    /// (normalized) coordinates.
    pub fn train_x(&self) -> &[T] {
        &self.train_x
    }

    pub(crate) fn from_raw_parts(
        kernel: KernelSpec<T>,
        c: T,
        alpha: Vec<T>,
        b: T,
        train_x: Vec<T>,
        dim: usize,
        norm: Option<NormStats<T>>,
    ) -> Result<Self, LssvmError> {
        kernel.validate()?;
        if dim == 0 || alpha.is_empty() || train_x.len() != alpha.len() * dim {
            return Err(LssvmError::DimensionMismatch {
                expected: alpha.len() * dim,
                got: train_x.len(),
            });
        }
        if let Some(norm) = &norm {
            if norm.mean.len() != dim || norm.std.len() != dim {
                return Err(LssvmError::DimensionMismatch {
                    expected: dim,
                    got: norm.mean.len(),
                });
            }
        }
        Ok(Self {
            kernel,
            c,
            alpha,
            b,
            train_x,
            dim,
            norm,
        })
    }

    /// Evaluates `f(x) = Σ αᵢ k(x, xᵢ) + b`.
    pub fn predict(&self, x: &[T]) -> Result<T, LssvmError> {
        if x.len() != self.dim {
            return Err(LssvmError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut query = x.to_vec();
        if let Some(norm) = &self.norm {
            norm.apply_in_place(&mut query);
        }
        let mut acc = self.b;
        for (i, &a) in self.alpha.iter().enumerate() {
            let xi = &self.train_x[i * self.dim..(i + 1) * self.dim];
            acc += a * self.kernel.eval_unchecked(&query, xi);
        }
        Ok(acc)
    }
}

/// Trains an LSSVM on the dataset.
///
/// Builds `H = K + C⁻¹I` in the dataset's training coordinates, factorizes
/// it once, solves `H u = Y` and `H v = 1`, and forms `b = Σu/Σv`,
/// `α = u − b v`. The bordered-system residual and the dual zero-sum are
/// verified before the model is returned.
pub fn train<T: Scalar>(
    data: &Dataset<T>,
    kernel: &KernelSpec<T>,
    c: T,
) -> Result<TrainedLssvm<T>, LssvmError> {
    kernel.validate()?;
    if !(c > T::zero() && c.is_finite()) {
        return Err(LssvmError::InvalidRegularization(c.widen()));
    }
    let l = data.rows;
    let x = data.training_features();
    let mut h = gram_from_flat(&x, l, data.cols, kernel);
    let c_inv = c.recip();
    for i in 0..l {
        h[i * l + i] += c_inv;
    }
    // The factorization overwrites the lower triangle only; keep the
    // diagonal so H can be reassembled for refinement and verification.
    let h_diag: Vec<T> = (0..l).map(|i| h[i * l + i]).collect();
    let factored = {
        cholesky_factor(&mut h, l).map_err(|pivot| LssvmError::NotPositiveDefinite { pivot })?;
        h
    };
    let h_at = |i: usize, j: usize| -> T {
        if i == j {
            h_diag[i]
        } else if i < j {
            factored[i * l + j]
        } else {
            factored[j * l + i]
        }
    };
    // Iterative refinement keeps the large-C (small-ridge) solves
    // accurate; stops as soon as the residual no longer shrinks.
    let solve_refined = |rhs: &[T]| -> Vec<T> {
        let mut sol = rhs.to_vec();
        cholesky_solve(&factored, l, &mut sol);
        let mut best = T::infinity();
        for _ in 0..4 {
            let mut residual = vec![T::zero(); l];
            let mut worst = T::zero();
            for i in 0..l {
                let mut acc = rhs[i];
                for (j, &s) in sol.iter().enumerate() {
                    acc -= h_at(i, j) * s;
                }
                residual[i] = acc;
                worst = worst.max(acc.abs());
            }
            if !(worst < best) || worst == T::zero() {
                break;
            }
            best = worst;
            cholesky_solve(&factored, l, &mut residual);
            for (s, d) in sol.iter_mut().zip(&residual) {
                *s += *d;
            }
        }
        sol
    };
    let u = solve_refined(&data.y);
    let v = solve_refined(&vec![T::one(); l]);
    let sum_u: T = u.iter().copied().sum();
    let sum_v: T = v.iter().copied().sum();
    if !sum_v.is_finite() || sum_v == T::zero() {
        return Err(LssvmError::IllConditioned {
            check: "bias denominator 1ᵀH⁻¹1",
            residual: sum_v.widen(),
            tolerance: 0.0,
        });
    }
    let b = sum_u / sum_v;
    let alpha: Vec<T> = u.iter().zip(&v).map(|(&ui, &vi)| ui - b * vi).collect();

    verify_solution(&factored, &h_diag, l, &alpha, b, &data.y)?;

    TrainedLssvm::from_raw_parts(kernel.clone(), c, alpha, b, x, data.cols, data.norm.clone())
}

/// Checks the trained coefficients against the bordered system. `h` holds
/// the Cholesky factor in its lower triangle and the original upper
/// triangle of `H`; `h_diag` is the pre-factorization diagonal.
fn verify_solution<T: Scalar>(
    h: &[T],
    h_diag: &[T],
    l: usize,
    alpha: &[T],
    b: T,
    y: &[T],
) -> Result<(), LssvmError> {
    let h_at = |i: usize, j: usize| -> T {
        if i == j {
            h_diag[i]
        } else if i < j {
            h[i * l + j]
        } else {
            h[j * l + i]
        }
    };
    let eps = T::epsilon().widen();
    let l_f = l as f64;

    let alpha_sum: f64 = alpha.iter().map(|a| a.widen()).sum();
    let alpha_max = alpha.iter().fold(0.0, |m, a| a.widen().abs().max(m));
    let zero_sum_tol = ZERO_SUM_TOL.max(10.0 * l_f * eps) * (1.0 + alpha_max * l_f);
    if !(alpha_sum.abs() <= zero_sum_tol) {
        return Err(LssvmError::IllConditioned {
            check: "dual zero-sum Σα",
            residual: alpha_sum.abs(),
            tolerance: zero_sum_tol,
        });
    }

    let y_max = y.iter().fold(1.0, |m, v| v.widen().abs().max(m));
    let kkt_tol = KKT_RESIDUAL_TOL.max(100.0 * l_f * eps) * y_max;
    let mut worst = 0.0f64;
    for (i, &yi) in y.iter().enumerate() {
        let mut row = b;
        for (j, &a) in alpha.iter().enumerate() {
            row += h_at(i, j) * a;
        }
        worst = worst.max((row - yi).widen().abs());
    }
    if !(worst <= kkt_tol) {
        return Err(LssvmError::IllConditioned {
            check: "bordered-system residual",
            residual: worst,
            tolerance: kkt_tol,
        });
    }
    Ok(())
}

/// Outcome of a cross-validated hyperparameter search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchOutcome<T> {
    pub c: T,
    pub sigma: T,
    pub cv_rmse: T,
}

/// `count` log-spaced values from `lo` to `hi` inclusive, the usual grid
/// for [`grid_search_rbf`].
pub fn log_grid<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count <= 1 {
        return vec![lo];
    }
    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            let frac = T::of(i as f64) / T::of((count - 1) as f64);
            (log_lo + (log_hi - log_lo) * frac).exp()
        })
        .collect()
}

/// Exhaustive k-fold search over `(C, σ)` for the RBF kernel, with
/// deterministic contiguous folds. A convenience for hyperparameter
/// selection; the winner minimizes mean validation RMSE.
pub fn grid_search_rbf<T: Scalar>(
    data: &Dataset<T>,
    c_grid: &[T],
    sigma_grid: &[T],
    folds: usize,
) -> Result<GridSearchOutcome<T>, LssvmError> {
    if folds < 2 {
        return Err(invalid("folds", "need at least 2"));
    }
    if data.rows < folds {
        return Err(invalid("folds", format!("{} exceeds sample count {}", folds, data.rows)));
    }
    if c_grid.is_empty() || sigma_grid.is_empty() {
        return Err(invalid("grid", "hyperparameter grids must be non-empty"));
    }
    let mut best: Option<GridSearchOutcome<T>> = None;
    for &c in c_grid {
        for &sigma in sigma_grid {
            let kernel = KernelSpec::rbf(sigma);
            let mut sq_sum = T::zero();
            let mut count = 0usize;
            for fold in 0..folds {
                let lo = fold * data.rows / folds;
                let hi = (fold + 1) * data.rows / folds;
                let mut train_rows = Vec::with_capacity(data.rows - (hi - lo));
                let mut train_y = Vec::with_capacity(data.rows - (hi - lo));
                for i in (0..data.rows).filter(|i| *i < lo || *i >= hi) {
                    train_rows.push(data.row(i).to_vec());
                    train_y.push(data.y[i]);
                }
                let mut fold_data = Dataset::from_rows(train_rows, train_y)?;
                if data.norm.is_some() {
                    fold_data = fold_data.with_zscore();
                }
                let model = train(&fold_data, &kernel, c)?;
                for i in lo..hi {
                    let err = model.predict(data.row(i))? - data.y[i];
                    sq_sum += err * err;
                    count += 1;
                }
            }
            let rmse = (sq_sum / T::of(count as f64)).sqrt();
            let better = best.as_ref().map(|b| rmse < b.cv_rmse).unwrap_or(true);
            if better {
                best = Some(GridSearchOutcome { c, sigma, cv_rmse: rmse });
            }
        }
    }
    Ok(best.expect("non-empty grids"))
}
