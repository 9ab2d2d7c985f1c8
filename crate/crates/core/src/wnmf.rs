//! Weighted nonnegative matrix factorization.
//!
//! Minimizes `||W ⊙ (X - UV)||_F^2` where `W` is a binary trust mask: entries
//! with weight zero are ignored entirely. Used downstream of the robust fit,
//! which locates corrupted entries; refitting with those entries masked
//! removes the bias the sparsity penalty leaves in the noise magnitudes.

use alloc::vec::Vec;

use crate::config::{window_converged, FitConfig};
use crate::error::{Error, Result};
use crate::eval::Mask;
use crate::matrix::DenseMatrix;
use crate::nmf::{check_nonnegative, init_factors, multiplicative, Factorization};
use crate::rng::Xoshiro256PlusPlus;

/// Binary weight matrix: 1 = trusted entry, 0 = corrupted/ignored entry.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMask {
    w: DenseMatrix,
}

impl WeightMask {
    /// Validates that every entry is exactly 0 or 1.
    pub fn from_matrix(w: DenseMatrix) -> Result<Self> {
        for (i, &value) in w.data().iter().enumerate() {
            if value != 0.0 && value != 1.0 {
                return Err(Error::NonBinaryMask {
                    row: i / w.cols(),
                    col: i % w.cols(),
                });
            }
        }
        Ok(WeightMask { w })
    }

    pub fn all_ones(rows: usize, cols: usize) -> Self {
        WeightMask {
            w: DenseMatrix::from_fn(rows, cols, |_, _| 1.0),
        }
    }

    /// 0 where the detection mask flags an entry, 1 elsewhere.
    pub fn from_detection(detected: &Mask) -> Self {
        WeightMask {
            w: DenseMatrix::from_fn(detected.rows(), detected.cols(), |r, c| {
                if detected.get(r, c) {
                    0.0
                } else {
                    1.0
                }
            }),
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.w
    }

    pub fn shape(&self) -> (usize, usize) {
        self.w.shape()
    }

    /// Columns whose weights are all zero: nothing constrains them, so the
    /// fit leaves their coefficients at initialization. Callers that care
    /// should warn on a nonempty result.
    pub fn unconstrained_columns(&self) -> Vec<usize> {
        let sums = self.w.col_sums();
        sums.iter()
            .enumerate()
            .filter(|(_, &s)| s == 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

/// Builds the trust mask from a fitted noise split: an entry is distrusted
/// when `|e_pos - e_neg|` exceeds the (absolute) threshold.
pub fn mask_from_noise(
    e_pos: &DenseMatrix,
    e_neg: &DenseMatrix,
    threshold: f64,
) -> Result<WeightMask> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::InvalidConfig("threshold must be nonnegative"));
    }
    let e = e_pos.sub(e_neg)?;
    Ok(WeightMask {
        w: e.map(|v| if v.abs() > threshold { 0.0 } else { 1.0 }),
    })
}

/// `||W ⊙ (X - UV)||_F^2`.
pub fn masked_objective(
    x: &DenseMatrix,
    mask: &WeightMask,
    u: &DenseMatrix,
    v: &DenseMatrix,
) -> Result<f64> {
    let uv = u.matmul(v)?;
    Ok(mask.w.hadamard(&x.sub(&uv)?)?.frobenius_sq())
}

/// Fits `X ≈ UV` on the trusted entries only. With an all-ones mask the
/// trajectory is bit-identical to [`crate::nmf::nmf_fit`] from the same seed.
pub fn wnmf_fit(x: &DenseMatrix, mask: &WeightMask, config: &FitConfig) -> Result<Factorization> {
    config.validate()?;
    check_nonnegative(x)?;
    if mask.shape() != x.shape() {
        return Err(Error::ShapeMismatch {
            op: "wnmf_fit",
            left_rows: x.rows(),
            left_cols: x.cols(),
            right_rows: mask.w.rows(),
            right_cols: mask.w.cols(),
        });
    }

    // Initialize from the masked data so corrupted entries cannot leak into
    // the fit even through the init scale.
    let wx = mask.w.hadamard(x)?;
    let mut rng = Xoshiro256PlusPlus::new(config.seed);
    let (mut u, mut v) = init_factors(&wx, config.k, &mut rng);
    let dead_cols = mask.unconstrained_columns();
    let v_init = v.clone();
    let mut trace = Vec::with_capacity(config.max_iters + 1);
    trace.push(masked_objective(x, mask, &u, &v)?);

    for _ in 0..config.max_iters {
        let vt = v.transpose();
        let wuv = mask.w.hadamard(&u.matmul(&v)?)?;
        let numer_u = wx.matmul(&vt)?;
        let denom_u = wuv.matmul(&vt)?;
        u = multiplicative(&u, &numer_u, &denom_u, config.epsilon);

        let ut = u.transpose();
        let wuv = mask.w.hadamard(&u.matmul(&v)?)?;
        let numer_v = ut.matmul(&wx)?;
        let denom_v = ut.matmul(&wuv)?;
        v = multiplicative(&v, &numer_v, &denom_v, config.epsilon);

        // An all-zero weight column gives a 0/eps update that would collapse
        // the coefficients to zero; keep those columns at initialization.
        for &j in &dead_cols {
            for r in 0..v.rows() {
                v.set(r, j, v_init.get(r, j));
            }
        }

        trace.push(masked_objective(x, mask, &u, &v)?);
        if window_converged(&trace, config.rel_tol) {
            break;
        }
    }

    Ok(Factorization {
        u,
        v,
        objective_trace: trace,
    })
}
