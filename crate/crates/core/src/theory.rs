//! Executable form of the majorization argument behind the stacked update.
//!
//! The stacked update works column by column: each column solves a least
//! squares problem `F(v) = ½||t - D v||²` over `v >= 0`, where the design
//! matrix `D` has mixed signs. Descent is guaranteed through a surrogate
//!
//! ```text
//! Z(v, a) = F(a) + (v-a)ᵀ∇F(a) + ½ (v-a)ᵀ K(a) (v-a)
//! ```
//!
//! where `K(a)` is the diagonal majorizer with entries `(S a)_i / a_i` and
//! `S = |DᵀD|` elementwise. `Z` dominates `F` (their gap is a quadratic form
//! in a positive semidefinite rescaling of `K - DᵀD`), touches it at `v = a`,
//! and — because `K` is diagonal — separates over coordinates, so clamping
//! the surrogate minimizer at zero coordinatewise still decreases both `Z`
//! and `F`. This module exposes each of those pieces so tests can check them
//! numerically instead of taking them on faith.

use alloc::vec;
use alloc::vec::Vec;

use crate::augmented::abs_gram;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// One column subproblem: explain `target` with the columns of `design`,
/// expanding around the current nonnegative iterate `anchor`.
#[derive(Debug, Clone)]
pub struct ColumnProblem {
    pub target: Vec<f64>,
    pub design: DenseMatrix,
    pub anchor: Vec<f64>,
}

impl ColumnProblem {
    pub fn new(target: Vec<f64>, design: DenseMatrix, anchor: Vec<f64>) -> Result<Self> {
        if target.len() != design.rows() || anchor.len() != design.cols() {
            return Err(Error::ShapeMismatch {
                op: "column problem",
                left_rows: target.len(),
                left_cols: anchor.len(),
                right_rows: design.rows(),
                right_cols: design.cols(),
            });
        }
        if let Some(index) = anchor.iter().position(|&v| v < 0.0) {
            return Err(Error::NegativeEntry { row: index, col: 0 });
        }
        Ok(ColumnProblem {
            target,
            design,
            anchor,
        })
    }
}

fn check_len(p: &ColumnProblem, v: &[f64], op: &'static str) -> Result<()> {
    if v.len() != p.design.cols() {
        return Err(Error::ShapeMismatch {
            op,
            left_rows: v.len(),
            left_cols: 1,
            right_rows: p.design.rows(),
            right_cols: p.design.cols(),
        });
    }
    Ok(())
}

fn mat_vec(m: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    (0..m.rows())
        .map(|r| m.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn mat_t_vec(m: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.cols()];
    for (r, &w) in v.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (o, &a) in out.iter_mut().zip(m.row(r)) {
            *o += a * w;
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `F(v) = ½ ||target - design·v||²`.
pub fn objective(p: &ColumnProblem, v: &[f64]) -> Result<f64> {
    check_len(p, v, "objective")?;
    let fitted = mat_vec(&p.design, v);
    let value = p
        .target
        .iter()
        .zip(&fitted)
        .map(|(t, f)| {
            let r = t - f;
            r * r
        })
        .sum::<f64>();
    Ok(0.5 * value)
}

/// `∇F(v) = designᵀ(design·v - target)`.
pub fn gradient(p: &ColumnProblem, v: &[f64]) -> Result<Vec<f64>> {
    check_len(p, v, "gradient")?;
    let fitted = mat_vec(&p.design, v);
    let residual: Vec<f64> = fitted.iter().zip(&p.target).map(|(f, t)| f - t).collect();
    Ok(mat_t_vec(&p.design, &residual))
}

/// `S·w` where `S = |designᵀ design|` elementwise.
fn abs_gram_vec(p: &ColumnProblem, w: &[f64]) -> Vec<f64> {
    mat_vec(&abs_gram(&p.design), w)
}

fn diag_at(p: &ColumnProblem, anchor: &[f64]) -> Result<Vec<f64>> {
    let s_anchor = abs_gram_vec(p, anchor);
    anchor
        .iter()
        .zip(&s_anchor)
        .enumerate()
        .map(|(index, (&a, &s))| {
            if a == 0.0 {
                Err(Error::SingularCoordinate { index })
            } else {
                Ok(s / a)
            }
        })
        .collect()
}

/// Diagonal of the majorizer at the problem's anchor: `(S·anchor)_i / anchor_i`.
/// Every anchor coordinate must be strictly positive.
pub fn majorizer_diag(p: &ColumnProblem) -> Result<Vec<f64>> {
    diag_at(p, &p.anchor)
}

/// The surrogate `Z(v, anchor)` expanded around an explicit anchor.
pub fn surrogate(p: &ColumnProblem, v: &[f64], anchor: &[f64]) -> Result<f64> {
    check_len(p, v, "surrogate")?;
    check_len(p, anchor, "surrogate")?;
    let diag = diag_at(p, anchor)?;
    let f_anchor = objective(p, anchor)?;
    let grad = gradient(p, anchor)?;
    let delta: Vec<f64> = v.iter().zip(anchor).map(|(a, b)| a - b).collect();
    let quad: f64 = delta.iter().zip(&diag).map(|(d, k)| d * d * k).sum();
    Ok(f_anchor + dot(&delta, &grad) + 0.5 * quad)
}

/// The quadratic form `μᵀMμ` where `M_ab = a_a [K - DᵀD]_ab a_b` is the
/// anchor-rescaled gap between the majorizer and the true curvature. The
/// diagonal of `K` cancels one anchor factor, so zero anchor coordinates are
/// fine here: `M_ab = δ_ab a_a (S a)_a - a_a (DᵀD)_ab a_b`.
pub fn curvature_form(p: &ColumnProblem, anchor: &[f64], direction: &[f64]) -> Result<f64> {
    check_len(p, anchor, "curvature form")?;
    check_len(p, direction, "curvature form")?;
    let s_anchor = abs_gram_vec(p, anchor);
    let diag_part: f64 = direction
        .iter()
        .zip(anchor)
        .zip(&s_anchor)
        .map(|((&mu, &a), &s)| mu * mu * a * s)
        .sum();
    let gram = p.design.transpose().matmul(&p.design)?;
    let scaled: Vec<f64> = direction.iter().zip(anchor).map(|(m, a)| m * a).collect();
    let gram_scaled = mat_vec(&gram, &scaled);
    let cross = dot(&scaled, &gram_scaled);
    Ok(diag_part - cross)
}

/// The same quadratic form written as the explicit sum of squares
/// `Σ_ab S_ab a_a a_b ½ [μ_a - sgn((DᵀD)_ab) μ_b]²`, which makes the
/// nonnegativity visible term by term.
pub fn curvature_form_expanded(
    p: &ColumnProblem,
    anchor: &[f64],
    direction: &[f64],
) -> Result<f64> {
    check_len(p, anchor, "curvature form")?;
    check_len(p, direction, "curvature form")?;
    let gram = p.design.transpose().matmul(&p.design)?;
    let n = gram.rows();
    let mut total = 0.0;
    for a in 0..n {
        for b in 0..n {
            let g = gram.get(a, b);
            let s = g.abs();
            if s == 0.0 {
                continue;
            }
            let sign = if g > 0.0 { 1.0 } else { -1.0 };
            let bracket = direction[a] - sign * direction[b];
            total += s * anchor[a] * anchor[b] * 0.5 * bracket * bracket;
        }
    }
    Ok(total)
}

/// The unconstrained surrogate minimizer `a - K(a)⁻¹ ∇F(a)`, coordinatewise
/// `a_i - a_i ∇F(a)_i / (S a)_i`. A coordinate whose design column is zero
/// has no gradient and keeps its value.
pub fn unconstrained_step(p: &ColumnProblem, anchor: &[f64]) -> Result<Vec<f64>> {
    check_len(p, anchor, "unconstrained step")?;
    let grad = gradient(p, anchor)?;
    let s_anchor = abs_gram_vec(p, anchor);
    Ok(anchor
        .iter()
        .zip(&grad)
        .zip(&s_anchor)
        .map(|((&a, &g), &s)| if s == 0.0 { a } else { a - a * g / s })
        .collect())
}

/// The surrogate minimizer clamped at zero, coordinatewise. Each clamped
/// coordinate lands between the unconstrained minimizer and the anchor, so
/// the separable surrogate still decreases.
pub fn thresholded_step(p: &ColumnProblem, anchor: &[f64]) -> Result<Vec<f64>> {
    Ok(unconstrained_step(p, anchor)?
        .into_iter()
        .map(|v| v.max(0.0))
        .collect())
}

/// Checks the descent chain for the thresholded step from a strictly
/// positive anchor: `Z(step, anchor) <= Z(anchor, anchor)` and
/// `F(step) <= F(anchor)`, both with slack `1e-10 * (1 + |F(anchor)|)`.
pub fn thresholded_step_is_descent(p: &ColumnProblem, anchor: &[f64]) -> Result<bool> {
    let step = thresholded_step(p, anchor)?;
    let f_anchor = objective(p, anchor)?;
    let slack = 1e-10 * (1.0 + f_anchor.abs());
    let z_anchor = surrogate(p, anchor, anchor)?;
    let z_step = surrogate(p, &step, anchor)?;
    let f_step = objective(p, &step)?;
    Ok(z_step <= z_anchor + slack && f_step <= f_anchor + slack)
}
