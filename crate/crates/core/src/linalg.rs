//! Dense linear least squares through a Householder QR factorization.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coeffs: Vec<f64>,
    /// Root mean square of the residual vector.
    pub rms: f64,
    /// 2-norm condition number of the column-equilibrated design matrix.
    pub condition: f64,
}

/// Minimizes `‖A x - b‖₂`. Columns are scaled to unit norm before the
/// factorization, so `condition` reflects genuine collinearity rather than
/// the relative size of the basis functions.
pub fn solve(design: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<LeastSquares> {
    let (rows, cols) = design.shape();
    if rows < cols || cols == 0 {
        return Err(Error::IllConditioned(format!(
            "{rows} samples cannot determine {cols} coefficients"
        )));
    }
    let mut scaled = design.clone();
    let mut norms = Vec::with_capacity(cols);
    for mut col in scaled.column_iter_mut() {
        let norm = col.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::IllConditioned("design matrix has a null column".into()));
        }
        col /= norm;
        norms.push(norm);
    }
    let qr = scaled.clone().qr();
    let r = qr.r();
    let singular = r.clone().singular_values();
    let (smax, smin) = singular
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < 1e12) {
        return Err(Error::IllConditioned(format!(
            "design matrix condition number {condition:e}"
        )));
    }
    let qtb = qr.q().transpose() * rhs;
    let y = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::IllConditioned("singular triangular factor".into()))?;
    let coeffs: Vec<f64> = y.iter().zip(&norms).map(|(c, n)| c / n).collect();
    let residual = &scaled * &y - rhs;
    Ok(LeastSquares {
        coeffs,
        rms: residual.norm() / (rows as f64).sqrt(),
        condition,
    })
}

// Minimum distance of the sampled phase step from 0 and π.
const ALIAS_MARGIN: f64 = 0.2;

/// Evenly spaced indices in `[lo, hi]`, at most `max_points` of them.
///
/// The stride is odd so that `(-1)^n` still alternates across the sample,
/// and is chosen so that the step `stride·θ0` of an oscillation at
/// frequency `θ0` stays away from 0 and π modulo 2π; otherwise a regular
/// sample cannot tell that oscillation from a constant or from `(-1)^n`
/// (e.g. stride 3 with `θ0 = π/3`).
pub fn sample_indices(lo: usize, hi: usize, max_points: usize, theta0: f64) -> Vec<usize> {
    if hi < lo || max_points == 0 {
        return Vec::new();
    }
    let count = hi - lo + 1;
    let mut base = count.div_ceil(max_points).max(1);
    if base % 2 == 0 {
        base += 1;
    }
    let aliased = |s: usize| {
        if s == 1 {
            return false;
        }
        let step = (s as f64 * theta0).rem_euclid(2.0 * PI);
        step.min(2.0 * PI - step) < ALIAS_MARGIN || (step - PI).abs() < ALIAS_MARGIN
    };
    let stride = (base..=count.max(base))
        .step_by(2)
        .take(64)
        .find(|&s| !aliased(s))
        .unwrap_or(base);
    (lo..=hi).step_by(stride).collect()
}
