//! Forward solution of Freud's equations for the even weight.
//!
//! With `t = x̃0²`, `N = n + α + β + γ + 2`, `S1 = Σ_{k<n} ã_k²` and
//! `S2 = Σ_{k<n} (ã_k⁴ + 2ã_k²ã_{k-1}²)`, the identity
//!
//! ```text
//! 2N ã_n²(ã_{n-1}² + ã_n² + ã_{n+1}²) - 2[αt + (n+β+1)(t+1) + γ] ã_n²
//!   + 2(2ã_n² - t - 1) S1 + n t - 2ã_n²ã_{n-1}² + 2 S2 + (2β+1) t odd(n) = 0
//! ```
//!
//! holds for every `n >= 1` with `ã_0 = 0`, and is solved for `ã_{n+1}²`.
//!
//! Both running sums grow like `n/4` and `3n/16`. They are kept centered,
//! `S1 = (n-1)/4 + c1` and `S2 = 3(n-1)/16 + c2`, with compensated
//! accumulation, so `c1` and `c2` stay O(1) for the whole run.

use crate::error::{Error, Result};
use crate::summation::CompensatedSum;
use crate::weights::{odd, WeightModel};

/// Trial runs abort once `ã_n²` leaves `(DIVERGENCE_EPS, 1 - DIVERGENCE_EPS)`.
pub const DIVERGENCE_EPS: f64 = 1e-12;

/// The sequence `ã_n²`, `n = 0..=N`, with the centered partial sums.
///
/// `centered_sq[n] = Σ_{k=1}^{n-1} (ã_k² - 1/4)` and
/// `centered_quartic[n] = Σ_{k=1}^{n-1} (ã_k⁴ + 2ã_k²ã_{k-1}² - 3/16)`,
/// i.e. both hold the sums needed by step `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSequence {
    pub model: WeightModel,
    a_tilde_sq: Vec<f64>,
    centered_sq: Vec<f64>,
    centered_quartic: Vec<f64>,
}

impl CoeffSequence {
    /// Largest index `N`.
    pub fn last_index(&self) -> usize {
        self.a_tilde_sq.len() - 1
    }

    pub fn a_tilde_sq(&self) -> &[f64] {
        &self.a_tilde_sq
    }

    /// `Σ_{k=1}^{n-1} (ã_k² - 1/4)`.
    pub fn sum_sq_centered(&self, n: usize) -> f64 {
        self.centered_sq[n]
    }

    /// `Σ_{k=1}^{n-1} (ã_k⁴ + 2ã_k²ã_{k-1}² - 3/16)`.
    pub fn sum_quartic_centered(&self, n: usize) -> f64 {
        self.centered_quartic[n]
    }

    /// `Σ_{k=1}^{n-1} ã_k²`.
    pub fn raw_sum_sq(&self, n: usize) -> f64 {
        (n as f64 - 1.0) / 4.0 + self.centered_sq[n]
    }

    /// `Σ_{k=1}^{n-1} (ã_k⁴ + 2ã_k²ã_{k-1}²)`.
    pub fn raw_sum_quartic(&self, n: usize) -> f64 {
        3.0 * (n as f64 - 1.0) / 16.0 + self.centered_quartic[n]
    }

    /// `Σ_{k=1}^{n-1} ã_k² - n/4`, whose limit is ξ.
    pub fn xi_partial(&self, n: usize) -> f64 {
        self.centered_sq[n] - 0.25
    }

    /// `Σ_{k=1}^{n-1} (ã_k⁴ + 2ã_k²ã_{k-1}²) - 3n/16`, whose limit is η.
    pub fn eta_partial(&self, n: usize) -> f64 {
        self.centered_quartic[n] - 3.0 / 16.0
    }

    /// `y_n = ã_n² - 1/4`.
    pub fn y(&self, n: usize) -> f64 {
        self.a_tilde_sq[n] - 0.25
    }

    /// Recomputes `ã_{n+1}²` from the stored `ã_{n-1}², ã_n²` and sums.
    pub fn step(&self, n: usize) -> Result<f64> {
        assert!(n >= 1 && n <= self.last_index(), "step index {n} out of range");
        next_a_sq(
            &self.model,
            n,
            self.a_tilde_sq[n - 1],
            self.a_tilde_sq[n],
            self.centered_sq[n],
            self.centered_quartic[n],
        )
    }

    /// Left-hand side of the Freud identity at `n`. Zero up to rounding for
    /// a sequence produced by [`run`].
    ///
    /// Evaluated in deviation form: with `ã_k² = 1/4 + y_k` and the raw sums
    /// rebuilt from the centered ones, every term proportional to `n`
    /// cancels symbolically, so the rounding error stays O(ε) instead of
    /// O(nε). [`CoeffSequence::identity_residual_direct`] evaluates the identity
    /// term by term for comparison.
    pub fn identity_residual(&self, n: usize) -> f64 {
        assert!(n >= 1 && n < self.last_index(), "residual index {n} out of range");
        deviation_residual(
            &self.model,
            n,
            self.y(n - 1),
            self.y(n),
            self.y(n + 1),
            self.centered_sq[n],
            self.centered_quartic[n],
        )
    }

    /// The Freud identity evaluated term by term with the raw sums, as it
    /// is usually printed. Rounding error grows like `n ε`.
    pub fn identity_residual_direct(&self, n: usize) -> f64 {
        assert!(n >= 1 && n < self.last_index(), "residual index {n} out of range");
        let m = &self.model;
        let t = m.x_tilde0_sq();
        let nf = n as f64;
        let big_n = nf + m.alpha + m.beta + m.gamma + 2.0;
        let (prev, cur, next) = (
            self.a_tilde_sq[n - 1],
            self.a_tilde_sq[n],
            self.a_tilde_sq[n + 1],
        );
        let s1 = self.raw_sum_sq(n);
        let s2 = self.raw_sum_quartic(n);
        2.0 * big_n * cur * (prev + cur + next)
            - 2.0 * (m.alpha * t + (nf + m.beta + 1.0) * (t + 1.0) + m.gamma) * cur
            + 2.0 * (2.0 * cur - t - 1.0) * s1
            + nf * t
            - 2.0 * cur * prev
            + 2.0 * s2
            + (2.0 * m.beta + 1.0) * t * odd(n)
    }

    /// Overwrites one stored `ã_n²` without touching the sums; only useful
    /// for probing the sensitivity of the residual diagnostics.
    pub fn perturbed(&self, n: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.a_tilde_sq[n] += delta;
        out
    }

    /// Contracts to the recurrence coefficients of the original weight.
    pub fn contract(&self) -> ContractedCoeffs {
        contract(&self.a_tilde_sq)
    }
}

/// One step of the recurrence: `ã_{n+1}²` from `ã_{n-1}²`, `ã_n²` and the
/// centered sums through index `n - 1`.
///
/// The identity is affine in `ã_{n+1}²` with slope `2N ã_n²`. It is solved
/// for the deviation `y_{n+1} = ã_{n+1}² - 1/4` using the same
/// cancellation-free grouping as [`CoeffSequence::identity_residual`], which
/// keeps the step accurate to a fraction of an ulp of `1/4` at any `n`.
pub fn next_a_sq(
    model: &WeightModel,
    n: usize,
    prev: f64,
    cur: f64,
    centered_sq: f64,
    centered_quartic: f64,
) -> Result<f64> {
    let big_n = n as f64 + model.alpha + model.beta + model.gamma + 2.0;
    let offset = deviation_residual(model, n, prev - 0.25, cur - 0.25, 0.0, centered_sq, centered_quartic);
    let value = 0.25 - offset / (2.0 * big_n * cur);
    if value > DIVERGENCE_EPS && value < 1.0 - DIVERGENCE_EPS {
        Ok(value)
    } else {
        Err(Error::DivergedTrial {
            index: n + 1,
            value,
        })
    }
}

/// The Freud identity in deviation form, `ã_k² = 1/4 + y_k` for
/// `k = n-1, n, n+1` and `S1 = (n-1)/4 + c1`, `S2 = 3(n-1)/16 + c2`.
/// Every term proportional to `n` cancels symbolically.
fn deviation_residual(
    m: &WeightModel,
    n: usize,
    y_prev: f64,
    y_cur: f64,
    y_next: f64,
    c1: f64,
    c2: f64,
) -> f64 {
    let t = m.x_tilde0_sq();
    let nf = n as f64;
    let shift = m.alpha + m.beta + m.gamma + 2.0;
    let big_n = nf + shift;
    let (p, q) = (y_prev, y_cur);
    let p_big = m.alpha * t + (nf + m.beta + 1.0) * (t + 1.0) + m.gamma;
    let p_const = m.alpha * t + (m.beta + 1.0) * (t + 1.0) + m.gamma;
    let constant = 3.0 * shift / 8.0 - p_const / 2.0 + (t + 0.5) / 2.0 - 3.0 / 8.0;
    let sum = p + q + y_next;
    2.0 * big_n * (sum / 4.0 + 0.75 * q + q * sum) - 2.0 * p_big * q
        + q * (nf - 1.0)
        + 2.0 * (2.0 * q - t - 0.5) * c1
        - 2.0 * (0.25 + p) * (0.25 + q)
        + 2.0 * c2
        + (2.0 * m.beta + 1.0) * t * odd(n)
        + constant
}

/// Iterates the recurrence from `ã_1² = a1_sq` up to index `n_max`.
pub fn run(model: &WeightModel, a1_sq: f64, n_max: usize) -> Result<CoeffSequence> {
    if n_max < 1 {
        return Err(Error::Domain("need at least one coefficient (N >= 1)".into()));
    }
    if !(a1_sq > DIVERGENCE_EPS && a1_sq < 1.0 - DIVERGENCE_EPS) {
        return Err(Error::DivergedTrial {
            index: 1,
            value: a1_sq,
        });
    }
    let len = n_max + 1;
    let mut a_sq = Vec::with_capacity(len);
    let mut c1 = Vec::with_capacity(len);
    let mut c2 = Vec::with_capacity(len);
    a_sq.extend([0.0, a1_sq]);
    c1.extend([0.0, 0.0]);
    c2.extend([0.0, 0.0]);

    let mut acc1 = CompensatedSum::new();
    let mut acc2 = CompensatedSum::new();
    for n in 1..n_max {
        let next = next_a_sq(model, n, a_sq[n - 1], a_sq[n], c1[n], c2[n])?;
        let (prev, cur) = (a_sq[n - 1], a_sq[n]);
        acc1.add(cur - 0.25);
        // ã⁴ + 2ã²ã_{-1}² - 3/16 written in deviations from 1/4 to avoid
        // cancelling against 3/16
        let (y, y_prev) = (cur - 0.25, prev - 0.25);
        acc2.add(y + 0.5 * y_prev + y * y + 2.0 * y * y_prev);
        a_sq.push(next);
        c1.push(acc1.value());
        c2.push(acc2.value());
    }
    Ok(CoeffSequence {
        model: *model,
        a_tilde_sq: a_sq,
        centered_sq: c1,
        centered_quartic: c2,
    })
}

/// `a_n` (`n >= 1`) and `b_n` (`n >= 0`) of the original weight.
/// `a[0]` is stored as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractedCoeffs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ContractedCoeffs {
    /// Largest `n` for which both `a_n` and `b_n` are available.
    pub fn last_index(&self) -> usize {
        self.b.len() - 1
    }
}

/// `a_n = 2 ã_{2n-1} ã_{2n}` and `b_n = -1 + 2ã_{2n}² + 2ã_{2n+1}²`, for
/// `n` up to `⌊(N-1)/2⌋`.
pub fn contract(a_tilde_sq: &[f64]) -> ContractedCoeffs {
    assert!(a_tilde_sq.len() >= 2, "contraction needs ã_0 and ã_1");
    let n_max = (a_tilde_sq.len() - 2) / 2;
    let mut a = Vec::with_capacity(n_max + 1);
    let mut b = Vec::with_capacity(n_max + 1);
    a.push(0.0);
    for n in 0..=n_max {
        if n >= 1 {
            a.push(2.0 * (a_tilde_sq[2 * n - 1] * a_tilde_sq[2 * n]).sqrt());
        }
        b.push(-1.0 + 2.0 * a_tilde_sq[2 * n] + 2.0 * a_tilde_sq[2 * n + 1]);
    }
    ContractedCoeffs { a, b }
}
