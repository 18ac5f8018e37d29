//! Closed-form predictions: limits of the leading-coefficient ratios, the
//! partial-sum limits ξ and η, and the amplitude/phase constants of the
//! O(1/n) oscillation in the recurrence coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::weights::WeightModel;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Limit constants of the Szegő asymptotics for the even weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SzegoConstants {
    /// Limit of `κ'_n/κ_n`.
    pub kappa1: f64,
    /// Limit of `κ''_n/κ_n`.
    pub kappa2: f64,
    /// `-kappa1/4`.
    pub xi: f64,
    /// `(kappa1² - 4 kappa1 - 2 kappa2)/16`.
    pub eta: f64,
}

pub fn kappa_ratios(model: &WeightModel) -> SzegoConstants {
    let WeightModel {
        alpha: a,
        beta: b,
        gamma: g,
        x0,
        theta0: t,
        lambda: l,
        ..
    } = *model;
    let jump = g * x0 + 2.0 * l * t.sin();
    let kappa1 = a - b + jump;
    let kappa2 = (a - b).powi(2) / 2.0
        + (a + b + 1.0) / 2.0
        + (a - b) * jump
        + (g * (g + 2.0) / 4.0 - l * l) * (2.0 * t).cos()
        + l * (g + 1.0) * (2.0 * t).sin()
        + g * g / 4.0
        + l * l;
    SzegoConstants {
        kappa1,
        kappa2,
        xi: -kappa1 / 4.0,
        eta: (kappa1 * kappa1 - 4.0 * kappa1 - 2.0 * kappa2) / 16.0,
    }
}

/// Predicted amplitude and phase constants. Phases are `None` when the
/// amplitude vanishes (`γ = 0` and `λ = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjectureConstants {
    /// Amplitude of the `ã_n²` oscillation.
    pub k: f64,
    pub phi: Option<f64>,
    /// Amplitude of the `a_n`, `b_n` oscillation; `k cos(θ0/2)`.
    pub m: f64,
    pub big_phi: Option<f64>,
}

/// `2 arg Γ(γ/2 + iλ) + arg(γ/2 + iλ)`, or `None` at the origin.
fn gamma_phase(model: &WeightModel) -> Result<Option<f64>> {
    let (re, im) = (model.gamma / 2.0, model.lambda);
    if re == 0.0 && im == 0.0 {
        return Ok(None);
    }
    Ok(Some(2.0 * arg_gamma(re, im)? + im.atan2(re)))
}

fn strength(model: &WeightModel) -> f64 {
    (model.gamma / 2.0).hypot(model.lambda)
}

/// `K = (γ²/4 + λ²)^{1/2} sin(θ0/2)` and
/// `φ = (α+1+γ/2)π - (α+β+γ+1/2)θ0 + 2λ log(2 sin θ0) - 2 argΓ(γ/2+iλ) - arg(γ/2+iλ)`.
pub fn predict_k_phi(model: &WeightModel) -> Result<(f64, Option<f64>)> {
    let WeightModel {
        alpha: a,
        beta: b,
        gamma: g,
        theta0: t,
        lambda: l,
        ..
    } = *model;
    let k = strength(model) * (t / 2.0).sin();
    let phi = gamma_phase(model)?.map(|gp| {
        wrap_phase(
            (a + 1.0 + g / 2.0) * PI - (a + b + g + 0.5) * t + 2.0 * l * (2.0 * t.sin()).ln() - gp,
        )
    });
    Ok((k, phi))
}

/// `M = (γ²/4 + λ²)^{1/2} sin θ0 / 2` and
/// `Φ = (α+γ/2)π - (α+β+γ)θ0 - 2 argΓ(γ/2+iλ) - arg(γ/2+iλ)`.
pub fn predict_m_phi(model: &WeightModel) -> Result<(f64, Option<f64>)> {
    let WeightModel {
        alpha: a,
        beta: b,
        gamma: g,
        theta0: t,
        ..
    } = *model;
    let m = 0.5 * strength(model) * t.sin();
    let big_phi = gamma_phase(model)?
        .map(|gp| wrap_phase((a + g / 2.0) * PI - (a + b + g) * t - gp));
    Ok((m, big_phi))
}

pub fn conjecture_constants(model: &WeightModel) -> Result<ConjectureConstants> {
    let (k, phi) = predict_k_phi(model)?;
    let (m, big_phi) = predict_m_phi(model)?;
    Ok(ConjectureConstants { k, phi, m, big_phi })
}

/// Leading-order `(a_n, b_n)`:
/// `a_n ≈ 1/2 - (M/n) cos[2nθ0 - 2λ log(4n sin θ0) - Φ]`,
/// `b_n ≈ -(2M/n) cos[(2n+1)θ0 - 2λ log(4n sin θ0) - Φ]`.
pub fn conjectured_coeffs(model: &WeightModel, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("conjectured coefficients need n >= 1".into()));
    }
    let t = model.theta0;
    if !(t.sin() > 0.0) {
        return Err(Error::Domain(format!("sin θ0 must be positive, θ0 = {t}")));
    }
    let (m, big_phi) = predict_m_phi(model)?;
    let Some(big_phi) = big_phi else {
        return Ok((0.5, 0.0));
    };
    let nf = n as f64;
    let chirp = 2.0 * model.lambda * (4.0 * nf * t.sin()).ln();
    let a = 0.5 - m / nf * (2.0 * nf * t - chirp - big_phi).cos();
    let b = -2.0 * m / nf * ((2.0 * nf + 1.0) * t - chirp - big_phi).cos();
    Ok((a, b))
}

/// Reduces a phase to `(-π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI { r - 2.0 * PI } else { r }
}

/// `min(|Δ|, 2π - |Δ|)` for the wrapped difference of two phases.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

// Bernoulli numbers B_{2k}/(2k(2k-1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

// Stirling's series is used once Re z reaches this.
const STIRLING_MIN_RE: f64 = 12.0;

/// Complex `log Γ(z)`, continuous along horizontal lines for `Re z > 0`;
/// the imaginary part is only meaningful modulo 2π.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log Γ of non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.re < -1e6 {
        return Err(Error::Domain(format!("log Γ argument {z} too far left")));
    }
    // Γ(z) = Γ(z+m) / (z (z+1) ... (z+m-1))
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < STIRLING_MIN_RE {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv_sq = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING {
        series += power * c;
        power *= inv_sq;
    }
    Ok((w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift)
}

/// Principal argument of `Γ(re + i·im)`, in `(-π, π]`.
pub fn arg_gamma(re: f64, im: f64) -> Result<f64> {
    if im == 0.0 {
        // Γ is real on the axis; its sign alternates between poles
        ln_gamma(Complex64::new(re, 0.0))?;
        let negative = re < 0.0 && (re.floor() as i64).rem_euclid(2) == 1;
        return Ok(if negative { PI } else { 0.0 });
    }
    Ok(wrap_phase(ln_gamma(Complex64::new(re, im))?.im))
}
