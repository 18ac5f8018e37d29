//! Generalized Jacobi weights with one interior algebraic singularity.
//!
//! The weight on `[-1, 1]` is
//!
//! ```text
//! w(x) = B (1-x)^α (x0-x)^γ (1+x)^β   for -1 <= x <= x0
//!      = A (1-x)^α (x-x0)^γ (1+x)^β   for x0 <= x <= 1
//! ```
//!
//! Its recurrence coefficients are obtained through the even weight
//! `w̃(x) = 2|x| w(2x² - 1)`, whose parameters are collected in
//! [`EvenWeightParams`].

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// The six parameters of the weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    /// Exponent at `x = 1`.
    pub alpha: f64,
    /// Exponent at `x = -1`.
    pub beta: f64,
    /// Exponent at the interior point.
    pub gamma: f64,
    /// Interior singular abscissa, in `(-1, 1)`.
    pub x0: f64,
    /// Scale to the right of `x0`.
    pub a: f64,
    /// Scale to the left of `x0`.
    pub b: f64,
}

impl WeightParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, x0: f64, a: f64, b: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            x0,
            a,
            b,
        }
    }

    /// Checks integrability and placement constraints.
    pub fn validate(self) -> Result<Self> {
        validate_shape(self.alpha, self.beta, self.gamma, self.x0)?;
        for (name, v) in [("A", self.a), ("B", self.b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} = {v} must be positive and finite")));
            }
        }
        Ok(self)
    }

    /// `log(B/A) / (2π)`.
    pub fn lambda(&self) -> f64 {
        (self.b.ln() - self.a.ln()) / (2.0 * PI)
    }

    pub fn derive_even(&self) -> Result<EvenWeightParams> {
        let p = self.validate()?;
        let scale = 2f64.powf(p.alpha + p.beta + p.gamma + 1.0);
        Ok(EvenWeightParams {
            x_tilde0: ((1.0 + p.x0) / 2.0).sqrt(),
            a_tilde: scale * p.a,
            b_tilde: scale * p.b,
            theta0: p.x0.acos(),
            lambda: p.lambda(),
        })
    }

    /// The weight itself, mainly for plotting and oracle checks.
    pub fn eval(&self, x: f64) -> f64 {
        let common = (1.0 - x).powf(self.alpha) * (1.0 + x).powf(self.beta);
        if x < self.x0 {
            self.b * common * (self.x0 - x).powf(self.gamma)
        } else {
            self.a * common * (x - self.x0).powf(self.gamma)
        }
    }
}

fn validate_shape(alpha: f64, beta: f64, gamma: f64, x0: f64) -> Result<()> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
        if !(v.is_finite() && v > -1.0) {
            return Err(Error::Domain(format!(
                "exponent {name} = {v} must exceed -1 for integrability"
            )));
        }
    }
    if !(x0 > -1.0 && x0 < 1.0) {
        return Err(Error::Domain(format!("x0 = {x0} must lie strictly inside (-1, 1)")));
    }
    Ok(())
}

/// Parameters of the symmetrized weight
/// `w̃(x) = B̃ |x|^{2β+1} (x̃0² - x²)^γ (1-x²)^α` for `|x| < x̃0` and the same
/// with `Ã` and `(x² - x̃0²)^γ` outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenWeightParams {
    /// Positive root of `2 x̃0² - 1 = x0`.
    pub x_tilde0: f64,
    pub a_tilde: f64,
    pub b_tilde: f64,
    /// `x0 = cos θ0`, `θ0 ∈ (0, π)`.
    pub theta0: f64,
    pub lambda: f64,
}

impl EvenWeightParams {
    /// `x̃0²`, computed without the round trip through a square root.
    pub fn x_tilde0_sq(&self) -> f64 {
        self.x_tilde0 * self.x_tilde0
    }
}

/// Everything the Freud recurrence and the asymptotic predictions need:
/// the exponents, the interior point and the jump parameter λ.
///
/// Absolute scales are irrelevant for the recurrence, so a model can be
/// built either from a full [`WeightParams`] or from a requested λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightModel {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub x0: f64,
    pub x_tilde0: f64,
    pub theta0: f64,
    pub lambda: f64,
}

impl WeightModel {
    pub fn from_weight(params: &WeightParams) -> Result<Self> {
        let even = params.derive_even()?;
        Ok(Self {
            alpha: params.alpha,
            beta: params.beta,
            gamma: params.gamma,
            x0: params.x0,
            x_tilde0: even.x_tilde0,
            theta0: even.theta0,
            lambda: even.lambda,
        })
    }

    pub fn with_lambda(alpha: f64, beta: f64, gamma: f64, x0: f64, lambda: f64) -> Result<Self> {
        validate_shape(alpha, beta, gamma, x0)?;
        if !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda = {lambda} must be finite")));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            x0,
            x_tilde0: ((1.0 + x0) / 2.0).sqrt(),
            theta0: x0.acos(),
            lambda,
        })
    }

    /// `x̃0² = (1 + x0)/2`, exact in one rounding.
    pub fn x_tilde0_sq(&self) -> f64 {
        (1.0 + self.x0) / 2.0
    }
}

/// `(1 - (-1)^n) / 2`.
#[inline]
pub fn odd(n: usize) -> f64 {
    (n & 1) as f64
}

/// `a_n²` for the symmetric case `A = B`, `α = β`, `x0 = 0`, from the
/// Jacobi polynomials in `x²`.
pub fn classical_an_sq(n: usize, alpha: f64, gamma: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::DegenerateCase("a_n is defined for n >= 1".into()));
    }
    let n = n as f64;
    let g = gamma * odd(n as usize);
    let s = 2.0 * n + 2.0 * alpha + gamma;
    let den = (s + 1.0) * (s - 1.0);
    if den == 0.0 {
        return Err(Error::DegenerateCase(format!(
            "2n + 2α + γ = {s} makes the denominator vanish"
        )));
    }
    Ok((n + 2.0 * alpha + g) * (n + g) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validate_accepts_interior_params() {
        let p = WeightParams::new(0.0, 0.0, 1.0, 0.5, 1.0, 1.0);
        assert_eq!(p.validate().unwrap(), p);
    }

    #[test]
    fn validate_rejects_each_constraint() {
        let base = WeightParams::new(0.0, 0.0, 1.0, 0.5, 1.0, 1.0);
        let cases = [
            WeightParams { gamma: -1.0, ..base },
            WeightParams { alpha: -1.5, ..base },
            WeightParams { beta: f64::NAN, ..base },
            WeightParams { x0: 1.0, ..base },
            WeightParams { x0: -1.0, ..base },
            WeightParams { a: 0.0, ..base },
            WeightParams { b: -2.0, ..base },
        ];
        for c in cases {
            assert!(matches!(c.validate(), Err(Error::Domain(_))), "{c:?}");
        }
        let msg = WeightParams { gamma: -1.0, ..base }.validate().unwrap_err().to_string();
        assert!(msg.contains("gamma"), "{msg}");
        let msg = WeightParams { x0: 1.0, ..base }.validate().unwrap_err().to_string();
        assert!(msg.contains("x0"), "{msg}");
    }

    #[test]
    fn derive_even_closed_values() {
        let e = WeightParams::new(0.0, 0.0, 0.0, 0.0, 1.0, 1.0).derive_even().unwrap();
        assert!((e.x_tilde0 - 0.707_106_781_186_547_6).abs() < 1e-16);
        assert_eq!(e.lambda, 0.0);
        assert!((e.theta0 - PI / 2.0).abs() < 1e-15);

        let e = WeightParams::new(0.0, 0.0, 1.0, 0.5, 1.0, 1.0).derive_even().unwrap();
        assert!((e.x_tilde0 - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((e.theta0 - PI / 3.0).abs() < 1e-15);
        assert_eq!(e.a_tilde, 4.0);
        assert_eq!(e.b_tilde, 4.0);
    }

    #[test]
    fn lambda_sign_follows_scale_ratio() {
        let p = WeightParams::new(0.0, 0.0, 1.0, 0.5, 1.0, 2.0);
        assert!((p.lambda() - 2f64.ln() / (2.0 * PI)).abs() < 1e-16);
        assert!(WeightParams { a: 2.0, b: 1.0, ..p }.lambda() < 0.0);
        // extreme ratios stay finite
        let q = WeightParams { a: 1e-300, b: 1e300, ..p };
        assert!((q.lambda() - 600.0 * 10f64.ln() / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn classical_known_values() {
        assert!((classical_an_sq(1, 0.0, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!((classical_an_sq(5, 0.0, 0.0).unwrap() - 25.0 / 99.0).abs() < 1e-16);
        // w = |x|: a1² = μ2/μ0 = (1/2)/1
        assert!((classical_an_sq(1, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-16);
    }

    #[test]
    fn classical_rejects_degenerate_denominator() {
        // 2n + 2α + γ = 1 at n = 1, α = -1/2, γ = 0
        assert!(matches!(
            classical_an_sq(1, -0.5, 0.0),
            Err(Error::DegenerateCase(_))
        ));
        assert!(classical_an_sq(0, 0.0, 0.0).is_err());
    }

    #[test]
    fn model_from_lambda_matches_model_from_weight() {
        let p = WeightParams::new(0.3, -0.2, 0.7, 0.25, 1.0, 2.0);
        let m1 = WeightModel::from_weight(&p).unwrap();
        let m2 = WeightModel::with_lambda(0.3, -0.2, 0.7, 0.25, p.lambda()).unwrap();
        assert_eq!(m1, m2);
        assert!(WeightModel::with_lambda(0.0, 0.0, 0.0, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn weight_eval_picks_side() {
        let p = WeightParams::new(0.0, 0.0, 1.0, 0.0, 1.0, 3.0);
        assert!((p.eval(0.5) - 0.5).abs() < 1e-15);
        assert!((p.eval(-0.5) - 1.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn derive_even_is_scale_invariant(
            alpha in -0.9f64..3.0, beta in -0.9f64..3.0, gamma in -0.9f64..3.0,
            x0 in -0.99f64..0.99, a in 0.01f64..100.0, b in 0.01f64..100.0, c in 0.001f64..1000.0,
        ) {
            let p = WeightParams::new(alpha, beta, gamma, x0, a, b);
            let q = WeightParams::new(alpha, beta, gamma, x0, c * a, c * b);
            let (e, f) = (p.derive_even().unwrap(), q.derive_even().unwrap());
            prop_assert_eq!(e.x_tilde0, f.x_tilde0);
            prop_assert_eq!(e.theta0, f.theta0);
            prop_assert!((e.lambda - f.lambda).abs() < 1e-14);
            prop_assert!(e.x_tilde0 > 0.0 && e.x_tilde0 < 1.0);
            prop_assert!((2.0 * e.x_tilde0_sq() - 1.0 - x0).abs() < 4e-16);
            prop_assert_eq!(e.lambda == 0.0, a == b);
        }

        #[test]
        fn classical_legendre_family(n in 1usize..100_000) {
            let nf = n as f64;
            let v = classical_an_sq(n, 0.0, 0.0).unwrap();
            prop_assert!((v - nf * nf / (4.0 * nf * nf - 1.0)).abs() <= 1e-16);
        }

        #[test]
        fn odd_alternates(n in 0usize..1_000_000) {
            prop_assert_eq!(odd(n) + odd(n + 1), 1.0);
        }
    }
}
