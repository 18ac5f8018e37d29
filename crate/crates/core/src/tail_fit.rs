//! Tail analysis of `y_n = ã_n² - 1/4`: least-squares extraction of the
//! amplitude, phase and alternating coefficient of
//! `y_n ≈ -(β+1/2)(-1)^n/(2n) + K cos(nθ0 - 2λ log n - φ)/n`,
//! plus the centered diagnostics `z_n`, `u_n` and the exact rewrite of the
//! Freud identity in terms of them.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::freud::CoeffSequence;
use crate::linalg::{self, sample_indices};
use crate::summation::CompensatedSum;
use crate::szego::{phase_distance, ConjectureConstants};

/// Smallest sample accepted by [`fit_tail`].
pub const MIN_SAMPLE: usize = 100;
/// Fitted amplitudes at or below this count as zero.
pub const AMPLITUDE_NOISE_FLOOR: f64 = 1e-3;

/// Values `y_n` at strictly increasing indices `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailSample {
    indices: Vec<usize>,
    y: Vec<f64>,
}

impl TailSample {
    pub fn new(indices: Vec<usize>, y: Vec<f64>) -> Result<Self> {
        if indices.len() != y.len() {
            return Err(Error::Input(format!(
                "{} indices but {} values",
                indices.len(),
                y.len()
            )));
        }
        if indices.first().is_some_and(|&n| n < 2) {
            return Err(Error::Input("tail indices must be >= 2".into()));
        }
        if indices.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("tail indices must be strictly increasing".into()));
        }
        if let Some(v) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite tail value {v}")));
        }
        Ok(Self { indices, y })
    }

    /// `y_n` for `n ∈ [lo, hi]`, thinned to at most `max_points` with a
    /// stride chosen by [`sample_indices`].
    pub fn from_range(seq: &CoeffSequence, lo: usize, hi: usize, max_points: usize) -> Result<Self> {
        if hi > seq.last_index() || lo < 2 || lo > hi {
            return Err(Error::Domain(format!(
                "tail range [{lo}, {hi}] not inside [2, {}]",
                seq.last_index()
            )));
        }
        let indices = sample_indices(lo, hi, max_points, seq.model.theta0);
        let y = indices.iter().map(|&n| seq.y(n)).collect();
        Self::new(indices, y)
    }

    /// The last `window_fraction` of the sequence.
    pub fn from_window(seq: &CoeffSequence, window_fraction: f64, max_points: usize) -> Result<Self> {
        if !(window_fraction > 0.0 && window_fraction < 1.0) {
            return Err(Error::Domain(format!(
                "window fraction {window_fraction} must lie in (0, 1)"
            )));
        }
        let hi = seq.last_index();
        let lo = (((1.0 - window_fraction) * hi as f64).ceil() as usize).max(2);
        Self::from_range(seq, lo, hi, max_points)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// `max |y_n| n` over the sample.
    pub fn scaled_bound(&self) -> f64 {
        self.indices
            .iter()
            .zip(&self.y)
            .map(|(&n, y)| (y * n as f64).abs())
            .fold(0.0, f64::max)
    }

}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub k_hat: f64,
    /// In `(-π, π]`.
    pub phi_hat: f64,
    /// Coefficient of `(-1)^n/n`.
    pub c_alt: f64,
    /// RMS of the residual of `y_n n` after the fit.
    pub rms_residual: f64,
    /// Condition number of the column-equilibrated design matrix.
    pub condition: f64,
}

/// Linear least squares for `(C, S, δc)` in
/// `y_n n + (β+1/2)(-1)^n/2 ≈ C cos ψ_n + S sin ψ_n + δc (-1)^n`,
/// `ψ_n = nθ0 - 2λ log n`. Frequencies are inputs, not fitted.
pub fn fit_tail(sample: &TailSample, beta: f64, theta0: f64, lambda: f64) -> Result<FitResult> {
    if sample.len() < MIN_SAMPLE {
        return Err(Error::Input(format!(
            "tail fit needs at least {MIN_SAMPLE} points, got {}",
            sample.len()
        )));
    }
    if !(theta0 > 1e-3 && theta0 < PI - 1e-3) {
        return Err(Error::IllConditioned(format!(
            "θ0 = {theta0} is within 1e-3 of 0 or π; the oscillation and alternating columns coincide"
        )));
    }
    let known = beta + 0.5;
    let sign = |n: usize| if n % 2 == 0 { 1.0 } else { -1.0 };
    let idx = sample.indices();
    let design = DMatrix::from_fn(idx.len(), 3, |i, j| {
        let n = idx[i];
        let psi = n as f64 * theta0 - 2.0 * lambda * (n as f64).ln();
        match j {
            0 => psi.cos(),
            1 => psi.sin(),
            _ => sign(n),
        }
    });
    let rhs = DVector::from_iterator(
        idx.len(),
        idx.iter()
            .zip(sample.y())
            .map(|(&n, y)| y * n as f64 + known * sign(n) / 2.0),
    );
    let ls = linalg::solve(&design, &rhs)?;
    let (c, s, dc) = (ls.coeffs[0], ls.coeffs[1], ls.coeffs[2]);
    Ok(FitResult {
        k_hat: c.hypot(s),
        phi_hat: s.atan2(c),
        c_alt: -known / 2.0 + dc,
        rms_residual: ls.rms,
        condition: ls.condition,
    })
}

/// `y_n = -(β+1/2)(-1)^n/(2n) + K cos(nθ0 - 2λ log n - φ)/n`.
pub fn model_tail(n: usize, beta: f64, theta0: f64, lambda: f64, k: f64, phi: f64) -> f64 {
    let nf = n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    -(beta + 0.5) * sign / (2.0 * nf) + k * (nf * theta0 - 2.0 * lambda * nf.ln() - phi).cos() / nf
}

/// How the infinite tails in `z_n` and `u_n` are closed beyond `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailClosure {
    /// Sum backward from `N` and drop everything past it; error O(1/N).
    Truncated,
    /// Use the limits `ξ = Σ_{k≥1} y_k - 1/4` and `η`: then
    /// `z_n = ξ_n - ξ` and `u_n = η_n - η` with the partial sums `ξ_n`, `η_n`.
    Limits { xi: f64, eta: f64 },
}

/// `y_n`, `z_n = -Σ_{k≥n} y_k`, `u_n = -y_{n-1}/2 - Σ_{k≥n}(3y_k/2 + y_k² + 2y_k y_{k-1})`,
/// indexed by `n`; `z[0]`, `u[0]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredDeviations {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub u: Vec<f64>,
}

pub fn centered_deviations(seq: &CoeffSequence, closure: TailClosure) -> CenteredDeviations {
    let last = seq.last_index();
    let y: Vec<f64> = (0..=last).map(|n| seq.y(n)).collect();
    let mut z = vec![f64::NAN; last + 1];
    let mut u = vec![f64::NAN; last + 1];
    match closure {
        TailClosure::Truncated => {
            let mut zs = CompensatedSum::new();
            let mut us = CompensatedSum::new();
            for n in (1..=last).rev() {
                zs.add(y[n]);
                us.add(1.5 * y[n] + y[n] * y[n] + 2.0 * y[n] * y[n - 1]);
                z[n] = -zs.value();
                u[n] = -0.5 * y[n - 1] - us.value();
            }
        }
        TailClosure::Limits { xi, eta } => {
            for n in 1..=last {
                z[n] = seq.xi_partial(n) - xi;
                u[n] = seq.eta_partial(n) - eta;
            }
        }
    }
    CenteredDeviations { y, z, u }
}

/// Left side minus right side of the centered recurrence
/// `y_{n+1} - 2x0 y_n + y_{n-1} = [(x0+1)(β+1/2)(-1)^n + 2(x0+2)z_n + y_{n-1} - 4u_n]/N
///   - 16y_n/(1+4y_n) · [(2x0+1)/4 - λ sin θ0 + (x0+1)(β+1/2)(-1)^n + 2(x0+3)z_n - 4u_n]/(4N)
///   - 4(2x0+1)y_n²/(1+4y_n)`, with `N = n+α+β+γ+2`.
pub fn centered_residual(seq: &CoeffSequence, dev: &CenteredDeviations, n: usize) -> f64 {
    assert!(
        n >= 2 && n < seq.last_index(),
        "centered residual index {n} out of range"
    );
    let m = &seq.model;
    let x0 = m.x0;
    let big_n = n as f64 + m.alpha + m.beta + m.gamma + 2.0;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let alt = (x0 + 1.0) * (m.beta + 0.5) * sign;
    let (yp, y, yn) = (dev.y[n - 1], dev.y[n], dev.y[n + 1]);
    let (z, u) = (dev.z[n], dev.u[n]);
    let lhs = yn - 2.0 * x0 * y + yp;
    let denom = 1.0 + 4.0 * y;
    let rhs = (alt + 2.0 * (x0 + 2.0) * z + yp - 4.0 * u) / big_n
        - 16.0 * y / denom
            * ((2.0 * x0 + 1.0) / 4.0 - m.lambda * m.theta0.sin() + alt + 2.0 * (x0 + 3.0) * z
                - 4.0 * u)
            / (4.0 * big_n)
        - 4.0 * (2.0 * x0 + 1.0) * y * y / denom;
    lhs - rhs
}

/// Fit-versus-prediction errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// `|K̂ - K|/K`; `None` when `K = 0`.
    pub amplitude_rel_error: Option<f64>,
    /// Wrapped `|φ̂ - φ|`; `None` when either phase is undefined.
    pub phase_error: Option<f64>,
    /// `|c_alt + (β+1/2)/2|`.
    pub alt_error: f64,
    pub rms_residual: f64,
    /// Prediction is `K = 0` and `K̂` is within the noise floor.
    pub amplitude_consistent_with_zero: bool,
}

pub fn compare(fit: &FitResult, pred: &ConjectureConstants, beta: f64) -> Comparison {
    let amplitude_rel_error = (pred.k > 0.0).then(|| (fit.k_hat - pred.k).abs() / pred.k);
    let phase_error = match pred.phi {
        Some(phi) if fit.k_hat > 0.0 => Some(phase_distance(fit.phi_hat, phi)),
        _ => None,
    };
    Comparison {
        amplitude_rel_error,
        phase_error,
        alt_error: (fit.c_alt + (beta + 0.5) / 2.0).abs(),
        rms_residual: fit.rms_residual,
        amplitude_consistent_with_zero: pred.k == 0.0 && fit.k_hat <= AMPLITUDE_NOISE_FLOOR,
    }
}
