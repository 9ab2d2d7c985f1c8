//! Baseline nonnegative matrix factorization by multiplicative updates.
//!
//! Minimizes `||X - UV||_F^2` over elementwise-nonnegative `U` (m x k) and
//! `V` (k x n). Serves as the reference the robust and weighted solvers are
//! checked against: their update rules reduce to these when the noise term
//! vanishes or the weight mask is all ones.

use alloc::vec::Vec;

use crate::config::{window_converged, FitConfig};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::Xoshiro256PlusPlus;

/// A fitted nonnegative factorization together with its objective history.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub u: DenseMatrix,
    pub v: DenseMatrix,
    /// Objective value at initialization and after each iteration.
    pub objective_trace: Vec<f64>,
}

impl Factorization {
    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace never empty")
    }

    /// The reconstruction `UV`.
    pub fn product(&self) -> DenseMatrix {
        self.u.matmul(&self.v).expect("factor shapes conform")
    }
}

/// `||X - UV||_F^2`.
pub fn nmf_objective(x: &DenseMatrix, u: &DenseMatrix, v: &DenseMatrix) -> Result<f64> {
    let uv = u.matmul(v)?;
    Ok(x.sub(&uv)?.frobenius_sq())
}

/// One multiplicative update of `U` then `V` (the `V` rule sees the updated
/// `U`). `epsilon` is added to every denominator entry, so entries at exactly
/// zero stay at zero and nothing divides by zero.
///
/// The denominators are computed as `(UV)V^T` and `U^T(UV)`: the grouping
/// through the full reconstruction is what the weighted and robust variants
/// share, which keeps their no-op reductions exact.
pub fn nmf_step(
    x: &DenseMatrix,
    u: &DenseMatrix,
    v: &DenseMatrix,
    epsilon: f64,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let vt = v.transpose();
    let numer_u = x.matmul(&vt)?;
    let denom_u = u.matmul(v)?.matmul(&vt)?;
    let u_next = multiplicative(u, &numer_u, &denom_u, epsilon);

    let ut = u_next.transpose();
    let numer_v = ut.matmul(x)?;
    let denom_v = ut.matmul(&u_next.matmul(v)?)?;
    let v_next = multiplicative(v, &numer_v, &denom_v, epsilon);

    Ok((u_next, v_next))
}

pub(crate) fn multiplicative(
    base: &DenseMatrix,
    numer: &DenseMatrix,
    denom: &DenseMatrix,
    epsilon: f64,
) -> DenseMatrix {
    let mut out = base.clone();
    for ((o, &n), &d) in out
        .data_mut()
        .iter_mut()
        .zip(numer.data())
        .zip(denom.data())
    {
        *o = *o * n / (d + epsilon);
    }
    out
}

/// Strictly positive random factors with scale `sqrt(mean(X) / k)`, filled
/// `U` first then `V` from the given stream.
pub(crate) fn init_factors(
    x: &DenseMatrix,
    k: usize,
    rng: &mut Xoshiro256PlusPlus,
) -> (DenseMatrix, DenseMatrix) {
    let scale = libm::sqrt(x.mean().max(1e-12) / k as f64);
    let u = DenseMatrix::random_uniform_with(x.rows(), k, rng, scale);
    let v = DenseMatrix::random_uniform_with(k, x.cols(), rng, scale);
    (u, v)
}

pub(crate) fn check_nonnegative(x: &DenseMatrix) -> Result<()> {
    if let Some((row, col)) = x.first_negative() {
        return Err(Error::NegativeEntry { row, col });
    }
    Ok(())
}

/// Fits `X ≈ UV` by multiplicative updates until `max_iters` or the
/// objective flattens over the convergence window.
pub fn nmf_fit(x: &DenseMatrix, config: &FitConfig) -> Result<Factorization> {
    config.validate()?;
    check_nonnegative(x)?;

    let mut rng = Xoshiro256PlusPlus::new(config.seed);
    let (mut u, mut v) = init_factors(x, config.k, &mut rng);

    let mut trace = Vec::with_capacity(config.max_iters + 1);
    trace.push(nmf_objective(x, &u, &v)?);
    for _ in 0..config.max_iters {
        let (u_next, v_next) = nmf_step(x, &u, &v, config.epsilon)?;
        u = u_next;
        v = v_next;
        trace.push(nmf_objective(x, &u, &v)?);
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
