//! Resurrection kernel q(x, y), the Lévy density π and jump law Π of the
//! compound Poisson overlay, its Fourier transform, and the boundary factor B.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phi::{Phi, PhiMeasure};
use crate::quad::{integrate, integrate_line, QuadOpts};
use crate::specfun::{beta, gauss_2f1, ln_gamma, ln_gamma_real, ComplexValue};
use crate::stable::StableParams;

#[derive(Debug, Clone)]
pub struct ResurrectionKernel {
    pub params: StableParams,
    pub phi: Phi,
    pub opts: QuadOpts,
}

impl ResurrectionKernel {
    pub fn new(params: StableParams, phi: Phi) -> Self {
        // purely relative tolerance keeps q exactly homogeneous under rescaling
        let opts = QuadOpts { abs_tol: 0.0, rel_tol: 1e-12, max_intervals: 4000 };
        ResurrectionKernel { params, phi, opts }
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    /// Density of q(x, ·): c₋ ∫ (x + y/t)^{−1−α} t^{−1} φ(dt).
    pub fn q_density(&self, x: f64, y: f64) -> Result<f64> {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Domain(format!("q_density: need x, y > 0, got ({x}, {y})")));
        }
        let a = self.params.alpha;
        let cm = self.params.c_minus;
        if let Some(at) = self.phi.atom() {
            return Ok(cm / at * (x + y / at).powf(-1.0 - a));
        }
        // t = e^v; the integrand turns over near v = log(y/x)
        let l = (y / x).ln();
        let (lo, hi) = if l < 0.0 { (l, 0.0) } else { (0.0, l) };
        let phi = &self.phi;
        let f = |v: f64| {
            let ld = phi.ln_density(v.exp()).unwrap_or(f64::NEG_INFINITY);
            (ld - (1.0 + a) * (x + y * (-v).exp()).ln()).exp()
        };
        let r = integrate_line(f, &[f64::NEG_INFINITY, lo - 1.0, lo, hi, hi + 1.0, f64::INFINITY], self.opts)?;
        Ok(cm * r.value)
    }

    /// Total mass q(x) = q(x, (0,∞)) = (c₋/α) x^{−α}.
    pub fn q_mass(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("q_mass: need x > 0, got {x}")));
        }
        Ok(self.params.killing_rate() * x.powf(-self.params.alpha))
    }

    /// Lévy density π(y) = q(1, e^y) e^y of the overlay χ.
    pub fn pi_density(&self, y: f64) -> Result<f64> {
        let w = y.exp();
        if w == 0.0 || w.is_infinite() {
            return Ok(0.0);
        }
        Ok(self.q_density(1.0, w)? * w)
    }

    /// The alternative form π(y) = e^{−αy} q(e^{−y}, 1).
    pub fn pi_density_dual(&self, y: f64) -> Result<f64> {
        Ok((-self.params.alpha * y).exp() * self.q_density((-y).exp(), 1.0)?)
    }

    /// Jump law of χ: Π(y) = α e^y ∫ t^α (t + e^y)^{−1−α} φ(dt).
    #[allow(non_snake_case)]
    pub fn Pi_density(&self, y: f64) -> Result<f64> {
        let a = self.params.alpha;
        if let Some(at) = self.phi.atom() {
            return Ok(a * y.exp() * at.powf(a) * (at + y.exp()).powf(-1.0 - a));
        }
        Ok(self.pi_density(y)? / self.params.killing_rate())
    }

    /// Π through the Gauss hypergeometric closed form (polynomial family only).
    #[allow(non_snake_case)]
    pub fn Pi_density_hypergeometric(&self, y: f64) -> Result<f64> {
        let Phi::Poly(p) = &self.phi else {
            return Err(Error::Unsupported("hypergeometric form needs a poly measure".into()));
        };
        let (a, b, g) = (self.params.alpha, p.beta, p.gamma_);
        let ln_pref = a.ln() + ln_gamma_real(g)? - ln_gamma_real(b)? - ln_gamma_real(g - b)?;
        let bf = beta(1.0 + g - b, b + a)?;
        let z = -(-y).exp_m1();
        let f = gauss_2f1(g, 1.0 + g - b, 1.0 + a + g, z)?;
        Ok(ln_pref.exp() * bf * (-(g - b) * y).exp() * f)
    }

    /// Fourier transform π̂(θ) = ∫ e^{iθy} π(y) dy in closed form.
    pub fn pi_hat(&self, theta: f64) -> Result<ComplexValue> {
        let a = self.params.alpha;
        let i = Complex64::new(0.0, theta);
        let g = (ln_gamma(a - i)? + ln_gamma(1.0 + i)? - ln_gamma_real(a)?).exp();
        Ok(self.params.killing_rate() * g * self.phi.mellin(i)?)
    }

    /// ∫ e^{iθy} π(y) dy by quadrature of `pi_density`.
    pub fn pi_hat_quadrature(&self, theta: f64) -> Result<ComplexValue> {
        let opts = QuadOpts::new(1e-11, 1e-10);
        let mut err = None;
        let mut eval = |y: f64| match self.pi_density(y) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        };
        let mut re = 0.0;
        let mut im = 0.0;
        for (lo, hi) in [(f64::NEG_INFINITY, -5.0), (-5.0, 0.0), (0.0, 5.0), (5.0, f64::INFINITY)] {
            re += integrate(|y| (theta * y).cos() * eval(y), lo, hi, opts)?.value;
            im += integrate(|y| (theta * y).sin() * eval(y), lo, hi, opts)?.value;
        }
        if let Some(e) = err {
            return Err(e);
        }
        Ok(Complex64::new(re, im))
    }

    /// Stable jump kernel j(x, y) = ν(y − x).
    pub fn j_density(&self, x: f64, y: f64) -> Result<f64> {
        if x == y {
            return Err(Error::Domain("j_density: x = y".into()));
        }
        self.params.nu_density(y - x)
    }

    /// J = j + q.
    #[allow(non_snake_case)]
    pub fn J_density(&self, x: f64, y: f64) -> Result<f64> {
        if x == y {
            return Err(Error::Domain("J_density: x = y".into()));
        }
        Ok(self.j_density(x, y)? + self.q_density(x, y)?)
    }

    /// B(x, y) = 1 + q(x, y)/j(x, y), with B(x, x) = 1.
    pub fn boundary_factor(&self, x: f64, y: f64) -> Result<f64> {
        if x == y {
            return Ok(1.0);
        }
        Ok(1.0 + self.q_density(x, y)? / self.j_density(x, y)?)
    }
}
