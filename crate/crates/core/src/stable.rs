//! Strictly α-stable parameters and the Lévy data of the Lamperti process.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOpts};
use crate::specfun::{gamma_real, ln_gamma, ComplexValue};

/// Admissible (α, ρ) with derived jump intensities c± and the drift constant a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub rho: f64,
    pub rho_hat: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub drift_a: f64,
}

fn stable_intensity(alpha: f64, r: f64) -> Result<f64> {
    // Γ(α+1)/(Γ(αr)Γ(1-αr)) = Γ(α+1) sin(παr)/π
    Ok(gamma_real(alpha + 1.0)? * (PI * alpha * r).sin() / PI)
}

impl StableParams {
    /// Validate (α, ρ) against the permissible set and derive the constants.
    pub fn new(alpha: f64, rho: f64) -> Result<Self> {
        if !alpha.is_finite() || !rho.is_finite() {
            return Err(Error::Parameter("alpha and rho must be finite".into()));
        }
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0,2), got {alpha}")));
        }
        if alpha < 1.0 {
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::Parameter(format!("for alpha < 1, rho must lie in (0,1), got {rho}")));
            }
        } else if alpha == 1.0 {
            if rho != 0.5 {
                return Err(Error::Parameter(format!("for alpha = 1, rho must equal 1/2, got {rho}")));
            }
        } else {
            let lo = 1.0 - 1.0 / alpha;
            let hi = 1.0 / alpha;
            if !(rho > lo && rho < hi) {
                return Err(Error::Parameter(format!(
                    "for alpha = {alpha} in (1,2), rho must lie in ({lo}, {hi}), got {rho}"
                )));
            }
        }
        let rho_hat = 1.0 - rho;
        let c_plus = stable_intensity(alpha, rho)?;
        let c_minus = stable_intensity(alpha, rho_hat)?;
        let c_minus = if rho == 0.5 { c_plus } else { c_minus };
        let drift_a = if alpha == 1.0 { 0.0 } else { (c_plus - c_minus) / (alpha - 1.0) };
        Ok(StableParams { alpha, rho, rho_hat, c_plus, c_minus, drift_a })
    }

    pub fn is_symmetric(&self) -> bool {
        self.rho == 0.5
    }

    /// Lévy density of the stable process, ν(x).
    pub fn nu_density(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::Domain("nu_density: x must be non-zero".into()));
        }
        let c = if x > 0.0 { self.c_plus } else { self.c_minus };
        Ok(c * x.abs().powf(-1.0 - self.alpha))
    }

    /// Lévy density μ(y) of the Lamperti process ξ*.
    pub fn mu_density(&self, y: f64) -> Result<f64> {
        if y == 0.0 {
            return Err(Error::Domain("mu_density: y must be non-zero".into()));
        }
        Ok(self.mu(y))
    }

    #[inline]
    pub(crate) fn mu(&self, y: f64) -> f64 {
        if y > 0.0 {
            self.c_plus * (-self.alpha * y).exp() * (-(-y).exp_m1()).powf(-1.0 - self.alpha)
        } else {
            self.c_minus * y.exp() * (-y.exp_m1()).powf(-1.0 - self.alpha)
        }
    }

    /// Rate c₋/α at which ξ* is killed (jumps of the stable process below zero).
    pub fn killing_rate(&self) -> f64 {
        self.c_minus / self.alpha
    }

    /// Characteristic exponent Ψ*(θ) of the killed Lamperti process.
    pub fn psi_star(&self, theta: f64) -> ComplexValue {
        let a = self.alpha;
        let ar = a * self.rho_hat;
        let i = ComplexValue::new(0.0, theta);
        let lg = |z: ComplexValue| ln_gamma(z).expect("argument off the poles");
        (lg(a - i) + lg(1.0 + i) - lg(ar - i) - lg(i + 1.0 - ar)).exp()
    }

    /// ∫_u^∞ μ(y) dy for u > 0.
    pub fn mu_tail_pos(&self, u: f64) -> f64 {
        self.c_plus / self.alpha * u.exp_m1().powf(-self.alpha)
    }

    /// ∫_{-∞}^{-u} μ(y) dy for u > 0.
    pub fn mu_tail_neg(&self, u: f64) -> f64 {
        self.c_minus / self.alpha * ((-(-u).exp_m1()).powf(-self.alpha) - 1.0)
    }

    /// Linear term b of the generator −b f′ + ∫(f(x+y) − f(x) − y f′(x) 1_{|y|≤1}) μ(dy).
    pub fn linear_term_b(&self) -> Result<f64> {
        Ok(self.drift_a - self.compensator_gap()?)
    }

    /// ∫₀^∞ [(log u)1{|log u|≤1} − (u−1)1{|u−1|≤1}] ν(u−1) du.
    fn compensator_gap(&self) -> Result<f64> {
        let a = self.alpha;
        let opts = QuadOpts::new(1e-13, 1e-12);
        let left_end = 1.0 - 1.0 / E;
        // u ∈ (0, 1/e): only the (u−1) cutoff is active
        let far_left = if (a - 1.0).abs() < 1e-14 {
            -left_end.ln()
        } else {
            (1.0 - left_end.powf(1.0 - a)) / (1.0 - a)
        };
        // substitute w = e^v to tame w^{1-α}
        let near_left = integrate(
            |v| {
                let w = v.exp();
                if w < 1e-3 {
                    -w.powf(2.0 - a) * (0.5 + w / 3.0 + w * w / 4.0 + w * w * w / 5.0)
                } else {
                    ((-w).ln_1p() + w) * w.powf(-a)
                }
            },
            f64::NEG_INFINITY,
            left_end.ln(),
            opts,
        )?
        .value;
        let near_right = integrate(
            |v| {
                let w = v.exp();
                let g = if w < 1e-3 { -w * w * (0.5 - w / 3.0 + w * w / 4.0 - w * w * w / 5.0) } else { w.ln_1p() - w };
                g * w.powf(-a)
            },
            f64::NEG_INFINITY,
            0.0,
            opts,
        )?
        .value;
        let far_right = integrate(|w| w.ln_1p() * w.powf(-1.0 - a), 1.0, E - 1.0, opts)?.value;
        Ok(self.c_minus * (far_left + near_left) + self.c_plus * (near_right + far_right))
    }

    /// ∫_{ε<|y|≤1} y μ(y) dy.
    pub fn compensated_mean(&self, eps: f64) -> Result<f64> {
        let opts = QuadOpts::new(1e-13, 1e-11);
        let lo = eps.ln();
        let pos = integrate(|v| { let y = v.exp(); y * self.mu(y) * y }, lo, 0.0, opts)?.value;
        let neg = integrate(|v| { let y = v.exp(); -y * self.mu(-y) * y }, lo, 0.0, opts)?.value;
        Ok(pos + neg)
    }

    /// ∫_{|y|≤ε} y² μ(y) dy.
    pub fn small_jump_variance(&self, eps: f64) -> Result<f64> {
        let opts = QuadOpts::new(1e-16, 1e-11);
        let a = self.alpha;
        let d = eps.min(1e-6);
        // μ(y) ≈ c|y|^{-1-α}(1 + (1-α)y/2) below d
        let c = self.c_plus + self.c_minus;
        let skew = (self.c_plus - self.c_minus) * (1.0 - a) / 2.0;
        let head = c * d.powf(2.0 - a) / (2.0 - a) + skew * d.powf(3.0 - a) / (3.0 - a);
        let body = integrate(
            |v| {
                let y = v.exp();
                y * y * (self.mu(y) + self.mu(-y)) * y
            },
            d.ln(),
            eps.ln(),
            opts,
        )?
        .value;
        Ok(head + body)
    }

    /// ∫_{|y|>1} y μ(y) dy.
    pub fn big_jump_mean(&self) -> Result<f64> {
        let opts = QuadOpts::new(1e-13, 1e-12);
        let pos = integrate(|y| y * self.mu(y), 1.0, f64::INFINITY, opts)?.value;
        let neg = integrate(|y| y * self.mu(y), f64::NEG_INFINITY, -1.0, opts)?.value;
        Ok(pos + neg)
    }

    /// E ξ₁ for the Lamperti process with the killing removed (the censored process).
    pub fn censored_mean_by_quadrature(&self) -> Result<f64> {
        Ok(-self.linear_term_b()? + self.big_jump_mean()?)
    }
}

/// Free-function form of [`StableParams::new`].
pub fn validate(alpha: f64, rho: f64) -> Result<StableParams> {
    StableParams::new(alpha, rho)
}
