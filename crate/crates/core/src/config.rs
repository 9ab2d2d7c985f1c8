//! Fit configuration shared by the baseline, robust, and weighted solvers.

use crate::error::{Error, Result};
use crate::rng::RngSeed;

/// Number of iterations spanned by the convergence window: a fit stops once
/// the relative objective change across the last `CONVERGENCE_WINDOW`
/// iterations drops below `rel_tol`.
pub const CONVERGENCE_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Inner rank of the factorization.
    pub k: usize,
    /// Weight of the squared column-L1 sparsity penalty (robust solver only).
    pub lambda: f64,
    pub max_iters: usize,
    /// Relative objective-change tolerance over the convergence window.
    pub rel_tol: f64,
    pub seed: RngSeed,
    /// Guard added to every update denominator.
    pub epsilon: f64,
    /// Relative detection threshold: a noise entry counts as nonzero when its
    /// magnitude exceeds `detect_threshold * max(X)`. The default sits above
    /// the residual tail of a partially converged fit (the noise estimate
    /// tracks residuals, so a threshold inside that tail flags float noise)
    /// while genuine outliers land orders of magnitude higher.
    pub detect_threshold: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            k: 10,
            lambda: 0.04,
            max_iters: 500,
            rel_tol: 1e-9,
            seed: RngSeed(0),
            epsilon: 1e-12,
            detect_threshold: 1e-2,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1"));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig("epsilon must be positive"));
        }
        if self.rel_tol.is_nan() || self.rel_tol < 0.0 {
            return Err(Error::InvalidConfig("rel_tol must be nonnegative"));
        }
        if self.lambda.is_nan() || self.lambda < 0.0 {
            return Err(Error::InvalidConfig("lambda must be nonnegative"));
        }
        if self.detect_threshold.is_nan() || self.detect_threshold < 0.0 {
            return Err(Error::InvalidConfig("detect_threshold must be nonnegative"));
        }
        Ok(())
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_seed(mut self, seed: impl Into<RngSeed>) -> Self {
        self.seed = seed.into();
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// True once the trailing window of the objective trace has flattened out:
/// `|trace[n-1-W] - trace[n-1]| <= rel_tol * max(trace[n-1-W], tiny)`.
pub(crate) fn window_converged(trace: &[f64], rel_tol: f64) -> bool {
    let n = trace.len();
    if n < CONVERGENCE_WINDOW + 1 {
        return false;
    }
    let old = trace[n - 1 - CONVERGENCE_WINDOW];
    let new = trace[n - 1];
    (old - new).abs() <= rel_tol * old.abs().max(1e-300)
}
