//! The stacked least-squares system behind the robust update of the
//! coefficient and noise blocks.
//!
//! Minimizing the robust objective over `(V, E⁺, E⁻)` with `U` fixed is the
//! same as one nonnegative least-squares problem `||X_aug - U_aug W||_F^2`
//! where the data gains a zero row, the design matrix is
//!
//! ```text
//! U_aug = | U   I   -I  |        X_aug = | X |
//!         | 0  √λe  √λe |                | 0 |
//! ```
//!
//! and `W` stacks `V`, `E⁺`, `E⁻` by rows. Because `U_aug` has negative
//! entries, the plain multiplicative rule does not apply; the update divides
//! by `S·W` instead, where `S = |U_augᵀ U_aug|` elementwise, and clamps at
//! zero afterwards.
//!
//! Two code paths compute the same update:
//! - the dense path materializes `U_aug`, its Gram matrix, and `S` (reference
//!   and correctness oracle);
//! - the structured path uses the block identities of `U_augᵀU_aug` and `S`
//!   and never materializes any `(k+2m)`-sized matrix, costing
//!   `O(mkn + k²n + mn)` per call instead of `O((k+2m)²n)`.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Dense materialization of the stacked system, plus the flag choosing which
/// code path [`AugmentedSystem::update`] takes.
#[derive(Debug, Clone)]
pub struct AugmentedSystem {
    /// `(m+1) x n`: the data with a zero row appended.
    pub x_aug: DenseMatrix,
    /// `(m+1) x (k+2m)`: the block design matrix shown above.
    pub u_aug: DenseMatrix,
    /// When true, `update` uses the block identities instead of the dense
    /// matrices held here.
    pub structured: bool,
}

/// Builds the dense stacked system for data `x`, basis `u`, and penalty
/// weight `lambda`.
pub fn build_augmented(x: &DenseMatrix, u: &DenseMatrix, lambda: f64) -> Result<AugmentedSystem> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidConfig("lambda must be nonnegative"));
    }
    let (m, n) = x.shape();
    if u.rows() != m {
        return Err(Error::ShapeMismatch {
            op: "build_augmented",
            left_rows: m,
            left_cols: n,
            right_rows: u.rows(),
            right_cols: u.cols(),
        });
    }
    let k = u.cols();
    let sqrt_lambda = libm::sqrt(lambda);

    let x_aug = DenseMatrix::from_fn(m + 1, n, |r, c| if r < m { x.get(r, c) } else { 0.0 });
    let u_aug = DenseMatrix::from_fn(m + 1, k + 2 * m, |r, c| {
        if r < m {
            if c < k {
                u.get(r, c)
            } else if c < k + m {
                if c - k == r {
                    1.0
                } else {
                    0.0
                }
            } else if c - k - m == r {
                -1.0
            } else {
                0.0
            }
        } else if c < k {
            0.0
        } else {
            sqrt_lambda
        }
    });

    Ok(AugmentedSystem {
        x_aug,
        u_aug,
        structured: false,
    })
}

/// Elementwise absolute value of the Gram matrix `U_augᵀ U_aug`. Symmetric,
/// nonnegative, and dominating the Gram matrix entrywise.
pub fn abs_gram(u_aug: &DenseMatrix) -> DenseMatrix {
    let ut = u_aug.transpose();
    ut.matmul(u_aug).expect("transpose shapes conform").abs()
}

/// Shared final step of both paths: `w + w (utx - gram_w) / (s_w + eps)`,
/// clamped at zero. A coordinate at exactly zero stays zero (absorbing), and
/// a stationary coordinate (`gram_w == utx`) is returned bit-identically.
fn apply_update(
    stacked: &DenseMatrix,
    gram_w: &DenseMatrix,
    s_w: &DenseMatrix,
    utx: &DenseMatrix,
    epsilon: f64,
) -> DenseMatrix {
    let mut out = stacked.clone();
    for (((o, &g), &s), &t) in out
        .data_mut()
        .iter_mut()
        .zip(gram_w.data())
        .zip(s_w.data())
        .zip(utx.data())
    {
        *o = (*o + *o * (t - g) / (s + epsilon)).max(0.0);
    }
    out
}

/// Dense-path update of the stacked factor: requires `s == abs_gram(u_aug)`.
pub fn update_stacked(
    x_aug: &DenseMatrix,
    u_aug: &DenseMatrix,
    stacked: &DenseMatrix,
    s: &DenseMatrix,
    epsilon: f64,
) -> Result<DenseMatrix> {
    if u_aug.cols() != stacked.rows() || x_aug.cols() != stacked.cols() {
        return Err(Error::ShapeMismatch {
            op: "update_stacked",
            left_rows: u_aug.rows(),
            left_cols: u_aug.cols(),
            right_rows: stacked.rows(),
            right_cols: stacked.cols(),
        });
    }
    let ut = u_aug.transpose();
    let gram_w = ut.matmul(&u_aug.matmul(stacked)?)?;
    let s_w = s.matmul(stacked)?;
    let utx = ut.matmul(x_aug)?;
    Ok(apply_update(stacked, &gram_w, &s_w, &utx, epsilon))
}

impl AugmentedSystem {
    /// Number of data rows `m` (the system has `m + 1`).
    pub fn data_rows(&self) -> usize {
        self.x_aug.rows() - 1
    }

    /// Inner rank `k` recovered from the block layout.
    pub fn rank(&self) -> usize {
        self.u_aug.cols() - 2 * self.data_rows()
    }

    pub fn lambda(&self) -> f64 {
        let m = self.data_rows();
        let s = self.u_aug.get(m, self.rank());
        s * s
    }

    /// Applies one stacked update, via the dense matrices held here or via
    /// the block identities, depending on `structured`.
    pub fn update(&self, stacked: &DenseMatrix, epsilon: f64) -> Result<DenseMatrix> {
        if self.structured {
            let m = self.data_rows();
            let k = self.rank();
            let x = self.x_aug.row_block(0, m);
            let u = self.u_aug.submatrix(0, m, 0, k);
            structured::update_stacked(&x, &u, self.lambda(), stacked, epsilon)
        } else {
            let s = abs_gram(&self.u_aug);
            update_stacked(&self.x_aug, &self.u_aug, stacked, &s, epsilon)
        }
    }
}

/// Block-identity implementations that never materialize the stacked design
/// matrix, its Gram matrix, or `S`.
///
/// With `J` the all-ones `m x m` matrix and `d = |λ-1| - λ`:
///
/// ```text
/// U_augᵀU_aug = | UᵀU   Uᵀ      -Uᵀ    |     S = | UᵀU   Uᵀ      Uᵀ     |
///               | U     I+λJ    -I+λJ  |         | U     I+λJ    λJ+dI  |
///               | -U    -I+λJ   I+λJ   |         | U     λJ+dI   I+λJ   |
/// ```
///
/// and `U_augᵀ X_aug` stacks `UᵀX`, `X`, `-X`.
pub mod structured {
    use super::apply_update;
    use crate::error::{Error, Result};
    use crate::matrix::DenseMatrix;

    pub(crate) struct Blocks {
        pub v: DenseMatrix,
        pub e_pos: DenseMatrix,
        pub e_neg: DenseMatrix,
    }

    pub(crate) fn split_blocks(stacked: &DenseMatrix, k: usize, m: usize) -> Blocks {
        Blocks {
            v: stacked.row_block(0, k),
            e_pos: stacked.row_block(k, m),
            e_neg: stacked.row_block(k + m, m),
        }
    }

    fn check_shapes(
        x: &DenseMatrix,
        u: &DenseMatrix,
        stacked: &DenseMatrix,
        op: &'static str,
    ) -> Result<(usize, usize)> {
        let (m, n) = x.shape();
        let k = u.cols();
        if u.rows() != m || stacked.rows() != k + 2 * m || stacked.cols() != n {
            return Err(Error::ShapeMismatch {
                op,
                left_rows: m,
                left_cols: k,
                right_rows: stacked.rows(),
                right_cols: stacked.cols(),
            });
        }
        Ok((m, k))
    }

    /// Adds `weight * colsum_j` to every entry of column `j`: the `λJ·M`
    /// terms, where `J·M` broadcasts column sums.
    fn add_col_broadcast(target: &mut DenseMatrix, col_sums: &[f64], weight: f64) {
        let cols = target.cols();
        for (i, value) in target.data_mut().iter_mut().enumerate() {
            *value += weight * col_sums[i % cols];
        }
    }

    /// `(U_augᵀ U_aug) · stacked` by blocks.
    pub fn gram_times(
        x_shape_rows: usize,
        u: &DenseMatrix,
        lambda: f64,
        stacked: &DenseMatrix,
    ) -> Result<DenseMatrix> {
        let m = x_shape_rows;
        let k = u.cols();
        let b = split_blocks(stacked, k, m);
        let uv = u.matmul(&b.v)?;
        let e = b.e_pos.sub(&b.e_neg)?;
        let uv_e = uv.add(&e)?;
        let pos_sums: alloc::vec::Vec<f64> = b.e_pos.add(&b.e_neg)?.col_sums();

        let top = u.transpose().matmul(&uv_e)?;
        let mut mid = uv_e.clone();
        add_col_broadcast(&mut mid, &pos_sums, lambda);
        let mut bot = uv_e.scale(-1.0);
        add_col_broadcast(&mut bot, &pos_sums, lambda);
        DenseMatrix::vstack(&[&top, &mid, &bot])
    }

    /// `S · stacked` by blocks.
    pub fn abs_gram_times(
        x_shape_rows: usize,
        u: &DenseMatrix,
        lambda: f64,
        stacked: &DenseMatrix,
    ) -> Result<DenseMatrix> {
        let m = x_shape_rows;
        let k = u.cols();
        let b = split_blocks(stacked, k, m);
        let uv = u.matmul(&b.v)?;
        let e_sum = b.e_pos.add(&b.e_neg)?;
        let pos_sums = e_sum.col_sums();
        let d = libm::fabs(lambda - 1.0) - lambda;

        let top = u.transpose().matmul(&uv.add(&e_sum)?)?;
        // mid = UV + E⁺ + d·E⁻ + λ·colsum;  bot mirrors with the parts swapped.
        let mut mid = uv.add(&b.e_pos)?.add(&b.e_neg.scale(d))?;
        add_col_broadcast(&mut mid, &pos_sums, lambda);
        let mut bot = uv.add(&b.e_neg)?.add(&b.e_pos.scale(d))?;
        add_col_broadcast(&mut bot, &pos_sums, lambda);
        DenseMatrix::vstack(&[&top, &mid, &bot])
    }

    /// `U_augᵀ X_aug = [UᵀX; X; -X]`.
    pub fn design_times_data(u: &DenseMatrix, x: &DenseMatrix) -> Result<DenseMatrix> {
        let top = u.transpose().matmul(x)?;
        let neg = x.scale(-1.0);
        DenseMatrix::vstack(&[&top, x, &neg])
    }

    /// Structured-path update of the stacked factor.
    pub fn update_stacked(
        x: &DenseMatrix,
        u: &DenseMatrix,
        lambda: f64,
        stacked: &DenseMatrix,
        epsilon: f64,
    ) -> Result<DenseMatrix> {
        let (m, _) = check_shapes(x, u, stacked, "structured update_stacked")?;
        let gram_w = gram_times(m, u, lambda, stacked)?;
        let s_w = abs_gram_times(m, u, lambda, stacked)?;
        let utx = design_times_data(u, x)?;
        Ok(apply_update(stacked, &gram_w, &s_w, &utx, epsilon))
    }
}
