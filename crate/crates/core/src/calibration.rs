//! Linking the free starting value `ã_1²` to the weight.
//!
//! Forward direction: `ã_1² = μ̃_2 / μ̃_0` from the moments of the even
//! weight. Backward direction: the limit `ξ` of `Σ_{k<n} ã_k² - n/4`
//! determines λ, so a requested λ can be reached by shooting on `ã_1²`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::freud::{self, CoeffSequence};
use crate::linalg::{self, sample_indices};
use crate::quadrature::{self, Node, QuadratureSpec};
use crate::weights::{WeightModel, WeightParams};

/// Default share of the sequence used when extracting limits.
pub const DEFAULT_WINDOW: f64 = 0.5;
/// Cap on the number of tail samples entering a least-squares fit.
pub const MAX_FIT_POINTS: usize = 10_000;
/// Limit extraction needs at least this many coefficients.
pub const MIN_LIMIT_LEN: usize = 1_000;

/// `∫ |x|^{2β+1+power} |x² - x̃0²|^γ (1-x²)^α` over `0 < x < x̃0` and over
/// `x̃0 < x < 1`.
fn half_integrals(params: &WeightParams, power: u32, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let p = params.validate()?;
    let xt = ((1.0 + p.x0) / 2.0).sqrt();
    let xt_sq = (1.0 + p.x0) / 2.0;
    let one_minus_xt = (1.0 - xt_sq) / (1.0 + xt);
    let origin_exp = 2.0 * p.beta + 1.0 + power as f64;

    let factor = |base: f64, exponent: f64| if exponent == 0.0 { 0.0 } else { exponent * base.ln() };
    let inner = |n: Node| {
        let x = n.from_left;
        let gap = n.from_right * (xt + x);
        let edge = (one_minus_xt + n.from_right) * (1.0 + x);
        (factor(x, origin_exp) + factor(gap, p.gamma) + factor(edge, p.alpha)).exp()
    };
    let outer = |n: Node| {
        let x = xt + n.from_left;
        let gap = n.from_left * (x + xt);
        let edge = n.from_right * (1.0 + x);
        (factor(x, origin_exp) + factor(gap, p.gamma) + factor(edge, p.alpha)).exp()
    };
    let i_in = quadrature::integrate(inner, 0.0, xt, spec)?;
    let i_out = quadrature::integrate(outer, xt, 1.0, spec)?;
    Ok((i_in, i_out))
}

/// Moment `μ̃_power = ∫_{-1}^{1} x^power w̃(x) dx` of the even weight, with
/// the scales `Ã`, `B̃` applied.
pub fn moment(params: &WeightParams, power: u32, spec: &QuadratureSpec) -> Result<f64> {
    if power % 2 == 1 {
        return Err(Error::Domain(format!(
            "odd moment {power} of an even weight is identically zero"
        )));
    }
    let even = params.derive_even()?;
    let (i_in, i_out) = half_integrals(params, power, spec)?;
    Ok(2.0 * (even.b_tilde * i_in + even.a_tilde * i_out))
}

/// `ã_1² = μ̃_2 / μ̃_0`. Only the ratio `A/B` matters.
pub fn a1_sq_from_weights(params: &WeightParams, spec: &QuadratureSpec) -> Result<f64> {
    let (in0, out0) = half_integrals(params, 0, spec)?;
    let (in2, out2) = half_integrals(params, 2, spec)?;
    // B̃/Ã = B/A; divide through by A
    let ratio = params.b / params.a;
    Ok((ratio * in2 + out2) / (ratio * in0 + out0))
}

/// Starting value and model for the weight, ready for [`freud::run`].
pub fn calibrate(params: &WeightParams, spec: &QuadratureSpec) -> Result<(WeightModel, f64)> {
    let model = WeightModel::from_weight(params)?;
    Ok((model, a1_sq_from_weights(params, spec)?))
}

/// `λ` implied by a value of ξ: `ξ = -(α - β + γ x0 + 2λ sin θ0)/4`.
pub fn lambda_from_xi(model: &WeightModel, xi: f64) -> Result<f64> {
    let s = model.theta0.sin();
    if s.abs() < 1e-6 {
        return Err(Error::IllConditioned(format!(
            "sin θ0 = {s:e} is too small to recover λ"
        )));
    }
    Ok(-(4.0 * xi + model.alpha - model.beta + model.gamma * model.x0) / (2.0 * s))
}

/// Estimate of a partial-sum limit with its fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub value: f64,
    /// λ used for the log-chirped oscillation columns.
    pub lambda: f64,
    pub rms: f64,
}

fn window(seq: &CoeffSequence, window_fraction: f64) -> Result<(usize, usize)> {
    if !(window_fraction > 0.0 && window_fraction < 1.0) {
        return Err(Error::Domain(format!(
            "window fraction {window_fraction} must lie in (0, 1)"
        )));
    }
    let n = seq.last_index();
    if n < MIN_LIMIT_LEN {
        return Err(Error::Domain(format!(
            "limit extraction needs N >= {MIN_LIMIT_LEN}, got {n}"
        )));
    }
    let lo = (((1.0 - window_fraction) * n as f64).ceil() as usize).max(2);
    Ok((lo, n))
}

/// Fits `partial(n) ≈ L + c_alt (-1)^n/n + c_inv/n + (C cos ψ_n + S sin ψ_n)/n`
/// with `ψ_n = nθ0 - 2λ log n` and returns `L`.
fn fit_limit<F: Fn(usize) -> f64>(
    seq: &CoeffSequence,
    (lo, hi): (usize, usize),
    lambda: f64,
    partial: F,
) -> Result<(f64, f64)> {
    let theta0 = seq.model.theta0;
    let oscillating = theta0 > 1e-3 && theta0 < PI - 1e-3;
    let idx = sample_indices(lo, hi, MAX_FIT_POINTS, theta0);
    let cols = if oscillating { 5 } else { 3 };
    let design = DMatrix::from_fn(idx.len(), cols, |i, j| {
        let n = idx[i] as f64;
        let phase = n * theta0 - 2.0 * lambda * n.ln();
        match j {
            0 => 1.0,
            1 => if idx[i] % 2 == 0 { 1.0 / n } else { -1.0 / n },
            2 => 1.0 / n,
            3 => phase.cos() / n,
            _ => phase.sin() / n,
        }
    });
    let rhs = DVector::from_iterator(idx.len(), idx.iter().map(|&n| partial(n)));
    let ls = linalg::solve(&design, &rhs)?;
    Ok((ls.coeffs[0], ls.rms))
}

/// Two-stage estimate of `ξ = lim (Σ_{k<n} ã_k² - n/4)` over the last
/// `window_fraction` of the sequence.
///
/// A plain window average gives a first λ; the oscillatory tail is then
/// removed by a least-squares fit with that λ, and the fit is repeated once
/// with the refined λ.
pub fn xi_estimate_detailed(seq: &CoeffSequence, window_fraction: f64) -> Result<LimitEstimate> {
    let range = window(seq, window_fraction)?;
    let crude = (range.0..=range.1).map(|n| seq.xi_partial(n)).sum::<f64>()
        / (range.1 - range.0 + 1) as f64;
    let mut lambda = lambda_from_xi(&seq.model, crude).unwrap_or(seq.model.lambda);
    let mut xi = crude;
    let mut rms = f64::NAN;
    for _ in 0..2 {
        (xi, rms) = fit_limit(seq, range, lambda, |n| seq.xi_partial(n))?;
        lambda = lambda_from_xi(&seq.model, xi).unwrap_or(lambda);
    }
    Ok(LimitEstimate {
        value: xi,
        lambda,
        rms,
    })
}

pub fn xi_estimate(seq: &CoeffSequence, window_fraction: f64) -> Result<f64> {
    Ok(xi_estimate_detailed(seq, window_fraction)?.value)
}

/// Estimate of `η = lim (Σ_{k<n} (ã_k⁴ + 2ã_k²ã_{k-1}²) - 3n/16)`, using
/// the λ found by [`xi_estimate_detailed`] for the oscillation columns.
pub fn eta_estimate(seq: &CoeffSequence, window_fraction: f64) -> Result<LimitEstimate> {
    let range = window(seq, window_fraction)?;
    let lambda = xi_estimate_detailed(seq, window_fraction)?.lambda;
    let (eta, rms) = fit_limit(seq, range, lambda, |n| seq.eta_partial(n))?;
    Ok(LimitEstimate {
        value: eta,
        lambda,
        rms,
    })
}

/// λ recovered from the computed sequence.
pub fn lambda_estimate(seq: &CoeffSequence) -> Result<f64> {
    let xi = xi_estimate(seq, DEFAULT_WINDOW)?;
    lambda_from_xi(&seq.model, xi)
}

/// Controls for [`solve_a1_for_lambda`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    /// Length of each trial run.
    pub n: usize,
    /// Accepted `|λ̂ - λ|` at the returned starting value.
    pub lambda_tol: f64,
    pub window_fraction: f64,
    pub max_iter: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            n: 100_000,
            lambda_tol: 1e-3,
            window_fraction: DEFAULT_WINDOW,
            max_iter: 200,
        }
    }
}

/// Lower and upper end of the initial bracket for `ã_1²`.
pub const BRACKET: (f64, f64) = (1e-6, 1.0 - 1e-6);

/// Finds `ã_1²` whose run reproduces `model.lambda` through ξ.
///
/// λ̂ decreases as `ã_1²` grows (more mass near the center of the even
/// weight lowers its second moment), and starting values outside the
/// admissible interval blow up within a few steps. A feasible trial is
/// located first by dyadic scanning, then the crossing is bisected;
/// a diverged midpoint always replaces the diverged end of the bracket.
pub fn solve_a1_for_lambda(model: &WeightModel, opts: &ShootingOptions) -> Result<f64> {
    if opts.n < 10_000 {
        return Err(Error::Domain(format!(
            "shooting needs trial runs of N >= 10000, got {}",
            opts.n
        )));
    }
    let target = model.lambda;
    let miss = |a1: f64| -> Result<Option<f64>> {
        match freud::run(model, a1, opts.n) {
            Ok(seq) => {
                let xi = xi_estimate(&seq, opts.window_fraction)?;
                Ok(Some(lambda_from_xi(model, xi)? - target))
            }
            Err(Error::DivergedTrial { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let fail = |reason: String| Error::BracketFailure { target, reason };

    let (lo, hi) = BRACKET;
    let mut feasible = None;
    'scan: for level in 1..=12u32 {
        let parts = 1u64 << level;
        for k in (1..parts).step_by(2) {
            let a1 = lo + (hi - lo) * k as f64 / parts as f64;
            if let Some(g) = miss(a1)? {
                feasible = Some((a1, g));
                break 'scan;
            }
        }
    }
    let (f, gf) = feasible.ok_or_else(|| fail("every trial starting value diverged".into()))?;
    if gf == 0.0 {
        return Ok(f);
    }
    // (position, miss or None when diverged)
    let (mut left, mut right) = if gf > 0.0 {
        ((f, Some(gf)), (hi, miss(hi)?))
    } else {
        ((lo, miss(lo)?), (f, Some(gf)))
    };
    if let (Some(gl), Some(gr)) = (left.1, right.1) {
        if gl.signum() == gr.signum() {
            return Err(fail(format!(
                "λ̂ - λ keeps sign {} over the whole bracket",
                gl.signum()
            )));
        }
    }
    for _ in 0..opts.max_iter {
        let mid = 0.5 * (left.0 + right.0);
        if mid <= left.0 || mid >= right.0 {
            break;
        }
        match miss(mid)? {
            Some(g) if g > 0.0 => left = (mid, Some(g)),
            Some(g) => right = (mid, Some(g)),
            None => match (left.1, right.1) {
                (None, _) => left = (mid, None),
                (_, None) => right = (mid, None),
                _ => return Err(fail(format!("trial {mid} inside a feasible bracket diverged"))),
            },
        }
    }
    let best = [left, right]
        .into_iter()
        .filter_map(|(a, g)| g.map(|g| (a, g)))
        .min_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .ok_or_else(|| fail("bisection ended between two diverged trials".into()))?;
    if best.1.abs() <= opts.lambda_tol {
        Ok(best.0)
    } else {
        Err(fail(format!(
            "closest feasible trial ã_1² = {} gives λ̂ = {}",
            best.0,
            target + best.1
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn elementary_moments() {
        let legendre = WeightParams::new(0.0, 0.0, 0.0, 0.3, 1.0, 1.0);
        assert!((moment(&legendre, 0, &spec()).unwrap() - 2.0).abs() < 1e-14);
        // Ã = B̃ = 1 needs A = B = 2^{-(α+β+γ+1)} = 1/4
        let abs_x = WeightParams::new(0.0, 0.0, 1.0, 0.0, 0.25, 0.25);
        assert!((moment(&abs_x, 0, &spec()).unwrap() - 0.25).abs() < 1e-15);
        assert!(moment(&abs_x, 1, &spec()).is_err());
    }

    #[test]
    fn piecewise_exact_second_moment() {
        // ∫_{-1}^{1} x² |x| |x² - 1/2| dx = ∫_0^1 u |u - 1/2| du = 1/8
        let abs_x = WeightParams::new(0.0, 0.0, 1.0, 0.0, 0.25, 0.25);
        assert!((moment(&abs_x, 2, &spec()).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_and_abs_x_first_coefficient() {
        for x0 in [-0.8, 0.0, 0.25, 0.9] {
            let cheb = WeightParams::new(-0.5, -0.5, 0.0, x0, 1.0, 1.0);
            let v = a1_sq_from_weights(&cheb, &spec()).unwrap();
            assert!((v - 0.5).abs() < 1e-14, "x0 = {x0}: {v}");
        }
        let abs_x = WeightParams::new(0.0, 0.0, 1.0, 0.0, 1.0, 1.0);
        assert!((a1_sq_from_weights(&abs_x, &spec()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn first_coefficient_scale_invariance_and_monotonicity() {
        let base = WeightParams::new(0.3, -0.2, 0.7, 0.25, 1.0, 2.0);
        let v = a1_sq_from_weights(&base, &spec()).unwrap();
        let scaled = WeightParams { a: 7.5, b: 15.0, ..base };
        assert!((a1_sq_from_weights(&scaled, &spec()).unwrap() - v).abs() < 1e-15);
        let m0 = moment(&base, 0, &spec()).unwrap();
        assert!((moment(&scaled, 0, &spec()).unwrap() - 7.5 * m0).abs() < 1e-13 * m0);

        // larger weight on the left of x0 puts more mass near the center of w̃
        let ratios = [0.01, 0.1, 0.3, 0.5, 1.0, 2.0, 3.0, 10.0, 30.0, 100.0];
        let vals: Vec<f64> = ratios
            .iter()
            .map(|&r| a1_sq_from_weights(&WeightParams { a: 1.0, b: r, ..base }, &spec()).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    }

    #[test]
    fn xi_of_chebyshev_and_legendre() {
        let cheb = WeightModel::with_lambda(-0.5, -0.5, 0.0, 0.3, 0.0).unwrap();
        let seq = freud::run(&cheb, 0.5, 10_000).unwrap();
        assert!(xi_estimate(&seq, DEFAULT_WINDOW).unwrap().abs() < 1e-14);
        // centered sum is 1/4: only ã_1² differs from 1/4
        assert!((seq.sum_sq_centered(10_000) - 0.25).abs() < 1e-15);

        let leg = WeightModel::with_lambda(0.0, 0.0, 0.0, 0.3, 0.0).unwrap();
        let seq = freud::run(&leg, 0.5, 20_000).unwrap();
        assert!(xi_estimate(&seq, DEFAULT_WINDOW).unwrap().abs() < 1e-9);
        assert!(lambda_estimate(&seq).unwrap().abs() < 1e-8);
    }

    #[test]
    fn xi_of_symmetric_abs_x() {
        let p = WeightParams::new(0.0, 0.0, 1.0, 0.0, 1.0, 1.0);
        let (m, a1) = calibrate(&p, &spec()).unwrap();
        let seq = freud::run(&m, a1, 20_000).unwrap();
        assert!(xi_estimate(&seq, DEFAULT_WINDOW).unwrap().abs() < 1e-8);
    }

    #[test]
    fn lambda_round_trip_through_weights() {
        let p = WeightParams::new(0.3, -0.2, 0.7, 0.25, 1.0, 2.0);
        let (m, a1) = calibrate(&p, &spec()).unwrap();
        let seq = freud::run(&m, a1, 100_000).unwrap();
        let lam = lambda_estimate(&seq).unwrap();
        assert!((lam - 2f64.ln() / (2.0 * PI)).abs() < 1e-3, "{lam}");

        let p = WeightParams { b: (2.0 * PI).exp(), ..p };
        let (m, a1) = calibrate(&p, &spec()).unwrap();
        let seq = freud::run(&m, a1, 100_000).unwrap();
        let lam = lambda_estimate(&seq).unwrap();
        assert!((lam - 1.0).abs() < 1e-3, "{lam}");
    }

    #[test]
    fn lambda_needs_interior_point() {
        let m = WeightModel::with_lambda(0.0, 0.0, 0.0, -1.0 + 1e-14, 0.0).unwrap();
        assert!(matches!(lambda_from_xi(&m, 0.0), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn window_preconditions() {
        let m = WeightModel::with_lambda(0.0, 0.0, 0.0, 0.3, 0.0).unwrap();
        let short = freud::run(&m, 0.5, 500).unwrap();
        assert!(xi_estimate(&short, 0.5).is_err());
        let long = freud::run(&m, 0.5, 2000).unwrap();
        assert!(xi_estimate(&long, 0.0).is_err());
        assert!(xi_estimate(&long, 1.0).is_err());
    }

    #[test]
    fn shooting_matches_forward_calibration() {
        let sym = WeightParams::new(0.0, 0.0, 1.0, 0.0, 1.0, 1.0);
        let (m, a1) = calibrate(&sym, &spec()).unwrap();
        let opts = ShootingOptions::default();
        let solved = solve_a1_for_lambda(&m, &opts).unwrap();
        assert!((solved - a1).abs() < 1e-6, "{solved} vs {a1}");
    }

    #[test]
    fn unreachable_lambda_fails_to_bracket() {
        let m = WeightModel::with_lambda(0.3, -0.2, 0.7, 0.25, 1e3).unwrap();
        let opts = ShootingOptions {
            n: 10_000,
            ..ShootingOptions::default()
        };
        assert!(matches!(
            solve_a1_for_lambda(&m, &opts),
            Err(Error::BracketFailure { .. })
        ));
        let short = ShootingOptions { n: 100, ..opts };
        assert!(matches!(solve_a1_for_lambda(&m, &short), Err(Error::Domain(_))));
    }
}
