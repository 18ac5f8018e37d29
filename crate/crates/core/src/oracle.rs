//! Brute-force recurrence coefficients for small `n`: the weight is replaced
//! by a discrete measure and orthogonalized directly (discretized Stieltjes
//! procedure). Shares nothing with the Freud recurrence beyond the weight
//! definition, so it serves as an independent cross-check.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::summation::sum;
use crate::szego::ln_gamma;
use crate::weights::WeightParams;

/// Smallest accepted number of nodes per sub-panel.
pub const MIN_POINTS_PER_PANEL: usize = 20;
/// Degree limit of the oracle.
pub const MAX_DEGREE: usize = 40;

/// Nodes in `(-1, 1)`, strictly increasing, with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::Input(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.iter().any(|x| !(x.abs() < 1.0)) {
            return Err(Error::Input("measure nodes must lie in (-1, 1)".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("measure nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Input("measure weights must be positive and finite".into()));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i x_i^power`.
    pub fn moment(&self, power: i32) -> f64 {
        sum(self.nodes.iter().zip(&self.weights).map(|(x, w)| w * x.powi(power)))
    }
}

/// Gauss–Jacobi rule for `(1-t)^a (1+t)^b` on `[-1, 1]` by the
/// Golub–Welsch eigenvalue method. Returns `(nodes, weights)`.
pub fn gauss_jacobi(points: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::Domain(format!("Jacobi exponents ({a}, {b}) must exceed -1")));
    }
    if points == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let ab = a + b;
    let diag = |k: usize| {
        let s = 2.0 * k as f64 + ab;
        if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        }
    };
    let off = |k: usize| {
        // coupling between degrees k-1 and k, k >= 1
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        if k == 1 {
            (4.0 * (1.0 + a) * (1.0 + b) / ((ab + 2.0).powi(2) * (ab + 3.0))).sqrt()
        } else {
            (4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
        }
    };
    let jacobi = DMatrix::from_fn(points, points, |i, j| {
        if i == j {
            diag(i)
        } else if i + 1 == j {
            off(j)
        } else if j + 1 == i {
            off(i)
        } else {
            0.0
        }
    });
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma_real(a + 1.0)? + ln_gamma_real(b + 1.0)?
        - ln_gamma_real(ab + 2.0)?)
    .exp();
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..points)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(pairs.into_iter().unzip())
}

fn ln_gamma_real(x: f64) -> Result<f64> {
    Ok(ln_gamma(Complex64::new(x, 0.0))?.re)
}

/// Discretizes `w` on four sub-panels: `[-1, x0]` and `[x0, 1]` are each
/// halved, and every half carries a Gauss–Jacobi rule matched to the single
/// algebraic singularity at its outer end. The remaining factors are
/// analytic on each half, so the rules converge geometrically.
pub fn discretize(params: &WeightParams, points_per_panel: usize) -> Result<DiscreteMeasure> {
    let p = params.validate()?;
    if points_per_panel < MIN_POINTS_PER_PANEL {
        return Err(Error::Domain(format!(
            "points_per_panel = {points_per_panel} is below {MIN_POINTS_PER_PANEL}"
        )));
    }
    let (alpha, beta, gamma, x0) = (p.alpha, p.beta, p.gamma, p.x0);
    let mid_left = 0.5 * (x0 - 1.0);
    let mid_right = 0.5 * (x0 + 1.0);
    let mut nodes = Vec::with_capacity(4 * points_per_panel);
    let mut weights = Vec::with_capacity(4 * points_per_panel);
    let mut push = |x: f64, w: f64| {
        nodes.push(x);
        weights.push(w);
    };

    // [-1, mid_left]: (1+x)^β singular at -1
    let half = 0.5 * (mid_left + 1.0);
    let (t, w) = gauss_jacobi(points_per_panel, 0.0, beta)?;
    for (t, w) in t.into_iter().zip(w) {
        let x = -1.0 + (1.0 + t) * half;
        let smooth = p.b * (1.0 - x).powf(alpha) * (x0 - x).powf(gamma);
        push(x, w * half.powf(beta + 1.0) * smooth);
    }
    // [mid_left, x0]: (x0-x)^γ singular at x0
    let half = 0.5 * (x0 - mid_left);
    let (t, w) = gauss_jacobi(points_per_panel, gamma, 0.0)?;
    for (t, w) in t.into_iter().zip(w) {
        let x = x0 - (1.0 - t) * half;
        let smooth = p.b * (1.0 - x).powf(alpha) * (1.0 + x).powf(beta);
        push(x, w * half.powf(gamma + 1.0) * smooth);
    }
    // [x0, mid_right]: (x-x0)^γ singular at x0
    let half = 0.5 * (mid_right - x0);
    let (t, w) = gauss_jacobi(points_per_panel, 0.0, gamma)?;
    for (t, w) in t.into_iter().zip(w) {
        let x = x0 + (1.0 + t) * half;
        let smooth = p.a * (1.0 - x).powf(alpha) * (1.0 + x).powf(beta);
        push(x, w * half.powf(gamma + 1.0) * smooth);
    }
    // [mid_right, 1]: (1-x)^α singular at 1
    let half = 0.5 * (1.0 - mid_right);
    let (t, w) = gauss_jacobi(points_per_panel, alpha, 0.0)?;
    for (t, w) in t.into_iter().zip(w) {
        let x = 1.0 - (1.0 - t) * half;
        let smooth = p.a * (x - x0).powf(gamma) * (1.0 + x).powf(beta);
        push(x, w * half.powf(alpha + 1.0) * smooth);
    }
    DiscreteMeasure::new(nodes, weights)
}

/// Orthonormal recurrence coefficients: `a[0] = 0`, `a[n]` for
/// `1 <= n <= n_max`, `b[n]` for `0 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCoeffs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Discretized Stieltjes procedure: `b_n = ⟨x p_n, p_n⟩`,
/// `a_{n+1}² = ‖x p_n - b_n p_n - a_n p_{n-1}‖²`, each new vector
/// renormalized to unit length.
pub fn stieltjes_coeffs(measure: &DiscreteMeasure, n_max: usize) -> Result<OracleCoeffs> {
    if n_max > MAX_DEGREE {
        return Err(Error::Domain(format!("oracle degree {n_max} exceeds {MAX_DEGREE}")));
    }
    if measure.len() < 4 * n_max.max(1) {
        return Err(Error::Domain(format!(
            "{} nodes are too few for degree {n_max}",
            measure.len()
        )));
    }
    let (x, w) = (measure.nodes(), measure.weights());
    let inner = |u: &[f64], v: &[f64]| sum(w.iter().zip(u).zip(v).map(|((w, u), v)| w * u * v));

    let mass = sum(w.iter().copied());
    let mut prev = vec![0.0; x.len()];
    let mut cur = vec![1.0 / mass.sqrt(); x.len()];
    let mut a = vec![0.0; n_max + 1];
    let mut b = vec![0.0; n_max + 1];
    for n in 0..=n_max {
        let xp: Vec<f64> = x.iter().zip(&cur).map(|(x, p)| x * p).collect();
        b[n] = inner(&xp, &cur);
        if n == n_max {
            break;
        }
        let mut next: Vec<f64> = (0..x.len())
            .map(|i| xp[i] - b[n] * cur[i] - a[n] * prev[i])
            .collect();
        let norm_sq = inner(&next, &next);
        if !(norm_sq > 0.0) {
            return Err(Error::LossOfOrthogonality {
                degree: n + 1,
                value: norm_sq,
            });
        }
        let norm = norm_sq.sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        a[n + 1] = norm;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(OracleCoeffs { a, b })
}

/// Default discretization density; enough for degree 40 at full accuracy.
pub const DEFAULT_POINTS_PER_PANEL: usize = 120;

/// `discretize` followed by `stieltjes_coeffs`.
pub fn oracle_coeffs(params: &WeightParams, n_max: usize) -> Result<OracleCoeffs> {
    stieltjes_coeffs(&discretize(params, DEFAULT_POINTS_PER_PANEL)?, n_max)
}

/// Tolerance scale used when comparing to the oracle: differences are
/// measured relative to `max(|reference|, 1/2)`, since `b_n → 0` while
/// `a_n → 1/2`.
pub fn scaled_difference(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(0.5)
}
