//! Characteristic exponent of ξ̄ = ξ + χ, the sign of E ξ̄₁, critical curves,
//! the recurrent-extension exponent κ* and the boundary-factor sign results.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::ResurrectionKernel;
use crate::phi::{is_symmetric, Phi, PhiMeasure};
use crate::quad::{integrate, QuadOpts};
use crate::roots::{brent, find_root};
use crate::specfun::{arccot, digamma, gamma_real, ln_gamma, ln_gamma_real, ComplexValue};
use crate::stable::StableParams;

/// |E ξ̄₁| at or below this is tagged as the zero-mean boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    InfiniteAbsorption,
    FiniteAbsorptionContinuous,
    BoundaryZeroMean,
}

impl Verdict {
    /// Whether the absorption time is infinite (the zero-mean boundary counts as infinite).
    pub fn absorption_infinite(self) -> bool {
        !matches!(self, Verdict::FiniteAbsorptionContinuous)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub alpha: f64,
    pub rho: f64,
    pub phi: String,
    pub mean_xi1: f64,
    pub verdict: Verdict,
    pub absorption_time_infinite: bool,
    /// L_φ = −∫ log u φ(du)
    pub l_phi: f64,
    pub a_phi: f64,
    /// arccot(−L_φ/π)/π, i.e. a_φ with the opposite sign convention for the log-moment
    pub a_phi_plus_log_convention: f64,
    pub rho_critical: Option<f64>,
    pub kappa_star: Option<f64>,
}

fn lg(z: Complex64) -> Complex64 {
    ln_gamma(z).expect("Gamma argument off the poles")
}

/// Ψ̄(θ) = Γ(α−iθ)Γ(1+iθ)/π · (sin(π(αρ̂−iθ)) − sin(παρ̂) M(iθ)).
pub fn overline_psi(p: &StableParams, phi: &Phi, theta: f64) -> Result<ComplexValue> {
    let a = p.alpha;
    let arh = a * p.rho_hat;
    let i = Complex64::new(0.0, theta);
    let pref = (lg(a - i) + lg(1.0 + i) - PI.ln()).exp();
    let bracket = ((arh - i) * PI).sin() - (PI * arh).sin() * phi.mellin(i)?;
    Ok(pref * bracket)
}

/// Ψ̄ as Ψ* − π̂.
pub fn overline_psi_via_kernel(p: &StableParams, phi: &Phi, theta: f64) -> Result<ComplexValue> {
    let k = ResurrectionKernel::new(*p, phi.clone());
    Ok(p.psi_star(theta) - k.pi_hat(theta)?)
}

/// h(κ) = sin(π(αρ̂−κ)) − sin(παρ̂) M(κ); −∞ once the moment diverges.
pub fn h_kappa(p: &StableParams, phi: &Phi, kappa: f64) -> Result<f64> {
    let arh = p.alpha * p.rho_hat;
    let m = phi.mellin_real(kappa)?;
    if m.is_infinite() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok((PI * (arh - kappa)).sin() - (PI * arh).sin() * m)
}

/// Ψ̄(−iκ) = −log E e^{κ ξ̄₁}, real for real κ in the strip.
pub fn overline_psi_real(p: &StableParams, phi: &Phi, kappa: f64) -> Result<f64> {
    let a = p.alpha;
    let g = (ln_gamma_real(a - kappa)? + ln_gamma_real(1.0 + kappa)?).exp() / PI;
    Ok(g * h_kappa(p, phi, kappa)?)
}

fn require_log_moment(phi: &Phi) -> Result<f64> {
    if !phi.has_finite_abs_log_moment() {
        return Err(Error::Precondition(
            "E|χ₁| is infinite: the return measure needs ∫|log u| φ(du) < ∞".into(),
        ));
    }
    phi.log_moment()
}

/// E ξ̄₁ = Γ(α) sin(παρ̂)/π · (π cot(παρ̂) + ∫ log u φ(du)).
pub fn mean_xi1(p: &StableParams, phi: &Phi) -> Result<f64> {
    let lm = require_log_moment(phi)?;
    Ok(mean_from_log_moment(p, lm))
}

fn mean_from_log_moment(p: &StableParams, lm: f64) -> f64 {
    let arh = p.alpha * p.rho_hat;
    if arh == 0.5 && lm == 0.0 {
        return 0.0;
    }
    let s = (PI * arh).sin();
    let cot_term = PI * (PI * arh).cos() / s;
    gamma_real(p.alpha).unwrap() * s / PI * (cot_term + lm)
}

/// −(Ψ̄(−ih) − Ψ̄(ih))/(2h), the derivative of log E e^{κξ̄₁} at 0.
pub fn mean_xi1_finite_difference(p: &StableParams, phi: &Phi, h: f64) -> Result<f64> {
    let up = overline_psi_real(p, phi, h)?;
    let down = overline_psi_real(p, phi, -h)?;
    Ok(-(up - down) / (2.0 * h))
}

pub fn verdict_for(mean: f64) -> Verdict {
    verdict_with_tol(mean, BOUNDARY_TOL)
}

pub fn verdict_with_tol(mean: f64, tol: f64) -> Verdict {
    if mean.abs() <= tol {
        Verdict::BoundaryZeroMean
    } else if mean > 0.0 {
        Verdict::InfiniteAbsorption
    } else {
        Verdict::FiniteAbsorptionContinuous
    }
}

/// a_φ = arccot(L/π)/π.
pub fn a_phi_from_l(l: f64) -> f64 {
    arccot(l / PI) / PI
}

/// ρ(α) = 1 − arccot(L/π)/(απ): the zero of E ξ̄₁ in ρ when L does not depend on ρ.
pub fn rho_of_alpha(l: f64, alpha: f64) -> f64 {
    1.0 - arccot(l / PI) / (alpha * PI)
}

pub fn classify(p: &StableParams, phi: &Phi) -> Result<ClassificationReport> {
    let mean = mean_xi1(p, phi)?;
    let verdict = verdict_for(mean);
    let l = -phi.log_moment()?;
    let rho_critical = Some(rho_of_alpha(l, p.alpha)).filter(|r| r.is_finite());
    let kappa_star = if verdict == Verdict::FiniteAbsorptionContinuous {
        recurrent_extension_kappa(p, phi).ok()
    } else {
        None
    };
    Ok(ClassificationReport {
        alpha: p.alpha,
        rho: p.rho,
        phi: phi.to_string(),
        mean_xi1: mean,
        verdict,
        absorption_time_infinite: verdict.absorption_infinite(),
        l_phi: l,
        a_phi: a_phi_from_l(l),
        a_phi_plus_log_convention: a_phi_from_l(-l),
        rho_critical,
        kappa_star,
    })
}

/// Critical constants of a family whose L_φ may depend on α.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticalAlphas {
    /// zero of ρ(α) on (0, 1), when there is one
    pub alpha_lower: Option<f64>,
    /// root of π cot(π(α−1)) = L(α) on (1, 2): where the zero curve meets ρ = 1/α
    pub alpha_upper: f64,
    pub rho_star: f64,
}

pub fn critical_alphas<L: Fn(f64) -> f64>(l_of_alpha: L) -> Result<CriticalAlphas> {
    let upper = brent(
        |a| PI / (PI * (a - 1.0)).tan() - l_of_alpha(a),
        1.0 + 1e-9,
        2.0 - 1e-9,
        1e-15,
        300,
    )?;
    let lower = brent(|a| rho_of_alpha(l_of_alpha(a), a), 1e-6, 1.0, 1e-15, 300).ok();
    Ok(CriticalAlphas { alpha_lower: lower, alpha_upper: upper, rho_star: 1.0 / upper })
}

/// α-free L: a_φ and α* = 1 + a_φ in closed form.
pub fn critical_alphas_constant(l: f64) -> CriticalAlphas {
    let a = a_phi_from_l(l);
    CriticalAlphas { alpha_lower: Some(a), alpha_upper: 1.0 + a, rho_star: 1.0 / (1.0 + a) }
}

/// L(α) = ψ(α) − ψ(1) for the resurrected family φ = φ_{1,1+α}.
pub fn l_resurrected(alpha: f64) -> f64 {
    digamma(alpha).unwrap() - digamma(1.0).unwrap()
}

/// L(α) = ψ(1) − ψ(α) for the censored process.
pub fn l_censored(alpha: f64) -> f64 {
    -l_resurrected(alpha)
}

/// E ξ₁ of the censored process: Γ(α) sin(παρ̂)/π (π cot(παρ̂) − (ψ(1) − ψ(α))).
pub fn censored_mean(p: &StableParams) -> f64 {
    mean_from_log_moment(p, -l_censored(p.alpha))
}

/// Root κ* ∈ (0, min(α, κ₀)) of h, i.e. E e^{κ* ξ̄₁} = 1.
pub fn recurrent_extension_kappa(p: &StableParams, phi: &Phi) -> Result<f64> {
    let mean = mean_xi1(p, phi)?;
    if mean >= 0.0 {
        return Err(Error::Precondition(format!(
            "recurrent extension needs E ξ̄₁ < 0 (continuous absorption), got {mean:e}"
        )));
    }
    let k0 = phi.kappa0();
    if !(k0 > 0.0) {
        return Err(Error::Precondition("recurrent extension needs κ₀ > 0".into()));
    }
    let hi = p.alpha.min(k0) - 1e-8;
    let lo = 1e-8_f64.min(hi / 2.0);
    brent(|k| h_kappa(p, phi, k).unwrap_or(f64::NAN), lo, hi, 1e-15, 300)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
    Undetermined,
}

impl Sign {
    pub fn of(v: f64, tol: f64) -> Sign {
        if v.abs() <= tol {
            Sign::Zero
        } else if v > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymmetricRegion {
    pub predicted: Sign,
    pub mean_xi1: f64,
}

/// Sign of E ξ̄₁ for a symmetric resurrection kernel, read off from (α, ρ̂) alone.
pub fn symmetric_region(p: &StableParams, phi: &Phi) -> Result<SymmetricRegion> {
    if !is_symmetric(phi, p.alpha).symmetric {
        return Err(Error::Precondition(format!("{phi} does not give a symmetric kernel at alpha = {}", p.alpha)));
    }
    let (a, rh) = (p.alpha, p.rho_hat);
    let predicted = if a > 1.0 && rh >= 1.0 / (2.0 * a) && rh < 1.0 / a {
        Sign::Negative
    } else if a == 1.0 && rh == 0.5 {
        Sign::Zero
    } else if a <= 1.0 && rh > 0.0 && rh <= 1.0 / (2.0 * a) {
        Sign::Positive
    } else {
        Sign::Undetermined
    };
    Ok(SymmetricRegion { predicted, mean_xi1: mean_xi1(p, phi)? })
}

/// Boundary factor B of a jump kernel B(x,y)|x−y|^{−1−α}.
#[derive(Debug, Clone)]
pub enum BoundaryFactor {
    /// B(x, y) = (y/x)^γ
    Power { gamma: f64 },
    /// B = 1 + q/j from a resurrection kernel with symmetric φ and ρ = 1/2
    Resurrected(ResurrectionKernel),
}

impl BoundaryFactor {
    /// B(1, e^y)
    fn at(&self, y: f64) -> f64 {
        match self {
            BoundaryFactor::Power { gamma } => (gamma * y).exp(),
            BoundaryFactor::Resurrected(k) => k.boundary_factor(1.0, y.exp()).unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModifiedMean {
    /// ∫₀^∞ y (μ^B(y) − μ^B(−y)) dy
    pub sigma_route: f64,
    /// −b̄ + ∫_{|y|≥1} y μ^B(y) dy
    pub quadrature_route: f64,
    pub predicted: Sign,
}

/// σ_γ(y) = μ^B(y) − μ^B(−y) for B = e^{γy} and unit jump intensity:
/// e^{−(1+γ)y}(e^{(2γ−α+1)y} − 1)/(1 − e^{−y})^{1+α}.
pub fn sigma_gamma(alpha: f64, gamma: f64, y: f64) -> f64 {
    (-(1.0 + gamma) * y).exp() * ((2.0 * gamma - alpha + 1.0) * y).exp_m1() * (-(-y).exp_m1()).powf(-1.0 - alpha)
}

/// E ξ̄₁ for the pssMp with jump kernel B(x,y)|x−y|^{−1−α}, computed two ways.
pub fn modified_kernel_mean(alpha: f64, boundary: &BoundaryFactor) -> Result<ModifiedMean> {
    let p = StableParams::new(alpha, 0.5)?;
    let predicted = match boundary {
        BoundaryFactor::Power { gamma } => {
            if !(*gamma > -1.0 && *gamma < alpha) {
                return Err(Error::Parameter(format!("power boundary needs gamma in (-1, alpha), got {gamma}")));
            }
            let t = 1.0 + 2.0 * gamma;
            if alpha < t { Sign::Positive } else if alpha == t { Sign::Zero } else { Sign::Negative }
        }
        BoundaryFactor::Resurrected(k) => {
            if k.params.rho != 0.5 || k.params.alpha != alpha {
                return Err(Error::Precondition("resurrected boundary factor needs the same alpha and rho = 1/2".into()));
            }
            if !is_symmetric(&k.phi, alpha).symmetric {
                return Err(Error::Precondition("boundary factor is not symmetric".into()));
            }
            if alpha < 1.0 { Sign::Positive } else if alpha == 1.0 { Sign::Zero } else { Sign::Negative }
        }
    };
    let opts = QuadOpts::new(1e-13, 1e-11);
    // unit-intensity Lévy density of the symmetric stable Lamperti process
    let mu = |y: f64| p.mu(y) / p.c_plus;
    let sigma = |y: f64| match boundary {
        BoundaryFactor::Power { gamma } => sigma_gamma(alpha, *gamma, y),
        BoundaryFactor::Resurrected(_) => sigma_gamma(alpha, 0.0, y) * boundary.at(y),
    };
    // below |y| = e^{V0} the integrands are power laws in y; their tails are added in closed form
    const V0: f64 = -30.0;
    let power_tail = |k: f64| k * ((2.0 - alpha) * V0).exp() / (2.0 - alpha);
    let sigma_route = if matches!(predicted, Sign::Zero) && matches!(boundary, BoundaryFactor::Power { .. })
        || (alpha == 1.0 && matches!(boundary, BoundaryFactor::Resurrected(_)))
    {
        // σ vanishes identically
        0.0
    } else {
        let k = match boundary {
            BoundaryFactor::Power { gamma } => 2.0 * gamma - alpha + 1.0,
            BoundaryFactor::Resurrected(_) => 1.0 - alpha,
        };
        power_tail(k)
            + integrate(|v| { let y = v.exp(); y * sigma(y) * y }, V0, 0.0, opts)?.value
            + integrate(|y| y * sigma(y), 1.0, f64::INFINITY, opts)?.value
    };

    let b = p.linear_term_b()? / p.c_plus;
    let correction = match boundary {
        BoundaryFactor::Power { gamma } => {
            let mut c = 2.0 * power_tail(*gamma);
            for sign in [-1.0f64, 1.0] {
                c += integrate(
                    |v| {
                        let y = sign * v.exp();
                        y * (gamma * y).exp_m1() * mu(y) * v.exp()
                    },
                    V0,
                    0.0,
                    opts,
                )?
                .value;
            }
            c
        }
        // (B − 1)μ = π/c₊ for the resurrected kernel
        BoundaryFactor::Resurrected(k) => {
            let mut err = None;
            let mut c = 0.0;
            for sign in [-1.0f64, 1.0] {
                c += integrate(
                    |v| {
                        let y = sign * v.exp();
                        match k.pi_density(y) {
                            Ok(pi) => y * pi / p.c_plus * v.exp(),
                            Err(e) => {
                                err.get_or_insert(e);
                                0.0
                            }
                        }
                    },
                    f64::NEG_INFINITY,
                    0.0,
                    opts,
                )?
                .value;
            }
            if let Some(e) = err {
                return Err(e);
            }
            c
        }
    };
    let b_bar = b - correction;
    let big = integrate(|y| y * boundary.at(y) * mu(y), 1.0, f64::INFINITY, opts)?.value
        + integrate(|y| y * boundary.at(y) * mu(y), f64::NEG_INFINITY, -1.0, opts)?.value;
    Ok(ModifiedMean { sigma_route, quadrature_route: -b_bar + big, predicted })
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionRow {
    pub alpha: f64,
    pub rho: f64,
    /// "+", "-", "0", or "inadmissible"
    pub sign: String,
    pub mean: Option<f64>,
}

/// Sign of E ξ̄₁ over a product grid; `phi_of(α, ρ)` builds the return measure.
pub fn region_grid<F>(alphas: &[f64], rhos: &[f64], phi_of: F) -> Vec<RegionRow>
where
    F: Fn(f64, f64) -> Result<Phi> + Sync,
{
    let cells: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| rhos.iter().map(move |&r| (a, r))).collect();
    cells
        .par_iter()
        .map(|&(alpha, rho)| {
            let mean = StableParams::new(alpha, rho).and_then(|p| mean_xi1(&p, &phi_of(alpha, rho)?));
            match mean {
                Ok(m) => RegionRow {
                    alpha,
                    rho,
                    sign: match Sign::of(m, BOUNDARY_TOL) {
                        Sign::Positive => "+",
                        Sign::Negative => "-",
                        _ => "0",
                    }
                    .into(),
                    mean: Some(m),
                },
                Err(_) => RegionRow { alpha, rho, sign: "inadmissible".into(), mean: None },
            }
        })
        .collect()
}

/// Admissible open interval of ρ at a given α.
pub fn rho_range(alpha: f64) -> Option<(f64, f64)> {
    if alpha > 0.0 && alpha < 1.0 {
        Some((0.0, 1.0))
    } else if alpha == 1.0 {
        Some((0.5, 0.5))
    } else if alpha > 1.0 && alpha < 2.0 {
        Some((1.0 - 1.0 / alpha, 1.0 / alpha))
    } else {
        None
    }
}

/// The ρ at which E ξ̄₁ changes sign for fixed α, if it does inside the admissible range.
pub fn critical_rho<F>(alpha: f64, phi_of: F) -> Option<f64>
where
    F: Fn(f64, f64) -> Result<Phi>,
{
    let (lo, hi) = rho_range(alpha)?;
    if lo == hi {
        return None;
    }
    let f = |r: f64| {
        StableParams::new(alpha, r)
            .and_then(|p| mean_xi1(&p, &phi_of(alpha, r)?))
            .unwrap_or(f64::NAN)
    };
    let d = (hi - lo) * 1e-9;
    find_root(f, lo + d, hi - d).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::PolyPhi;

    fn sp(a: f64, r: f64) -> StableParams {
        StableParams::new(a, r).unwrap()
    }

    fn trace(a: f64, r: f64) -> Phi {
        Phi::Poly(PolyPhi::trace(a, r).unwrap())
    }

    #[test]
    fn psi_bar_vanishes_at_zero_and_is_conjugate_symmetric() {
        let p = sp(1.3, 0.6);
        let phi = Phi::exp(1.0, 2.0, 1.0).unwrap();
        assert!(overline_psi(&p, &phi, 0.0).unwrap().norm() < 1e-15);
        for t in [0.3, 1.0, 2.7] {
            let a = overline_psi(&p, &phi, t).unwrap();
            let b = overline_psi(&p, &phi, -t).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn psi_bar_forms_agree() {
        for (p, phi) in [
            (sp(1.3, 0.6), Phi::poly(0.4, 1.1).unwrap()),
            (sp(0.7, 0.3), Phi::dirac(2.0).unwrap()),
            (sp(1.8, 0.5), Phi::exp(1.5, 0.5, 2.0).unwrap()),
        ] {
            for t in [0.3, 1.0, 2.7] {
                let a = overline_psi(&p, &phi, t).unwrap();
                let b = overline_psi_via_kernel(&p, &phi, t).unwrap();
                assert!((a - b).norm() < 1e-10, "{phi} theta={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn psi_bar_large_theta_finite() {
        let p = sp(1.5, 0.5);
        let phi = Phi::poly(1.0, 2.5).unwrap();
        for t in [-50.0, 20.0, 50.0] {
            let v = overline_psi(&p, &phi, t).unwrap();
            assert!(v.re.is_finite() && v.im.is_finite());
        }
    }

    #[test]
    fn trace_mean_examples() {
        assert_eq!(mean_xi1(&sp(1.0, 0.5), &trace(1.0, 0.5)).unwrap(), 0.0);
        // γ = 1 family: −Γ(α) sin(π(αρ̂−β))/sin(πβ)
        let (a, r, b) = (0.8, 0.5, 0.3);
        let m = mean_xi1(&sp(a, r), &Phi::poly(b, 1.0).unwrap()).unwrap();
        let expect = -gamma_real(a).unwrap() * (PI * (a * (1.0 - r) - b)).sin() / (PI * b).sin();
        assert!((m - expect).abs() < 1e-13);
    }

    #[test]
    fn finite_difference_oracle() {
        for (p, phi) in [
            (sp(1.5, 0.6), trace(1.5, 0.6)),
            (sp(0.6, 0.2), Phi::exp(1.0, 0.5, 1.0).unwrap()),
            (sp(1.2, 0.55), Phi::dirac(0.4).unwrap()),
        ] {
            let m = mean_xi1(&p, &phi).unwrap();
            let fd = mean_xi1_finite_difference(&p, &phi, 1e-5).unwrap();
            assert!((m - fd).abs() < 1e-6, "{phi}: {m} vs {fd}");
        }
    }

    #[test]
    fn classification_examples() {
        let r = classify(&sp(1.5, 0.6), &trace(1.5, 0.6)).unwrap();
        assert_eq!(r.verdict, Verdict::FiniteAbsorptionContinuous);
        assert!(r.kappa_star.is_some());
        for rho in [0.1, 0.5, 0.9] {
            let r = classify(&sp(0.7, rho), &trace(0.7, rho)).unwrap();
            assert_eq!(r.verdict, Verdict::InfiniteAbsorption);
        }
        let r = classify(&sp(1.0, 0.5), &Phi::dirac(1.0).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::BoundaryZeroMean);
        assert!(r.absorption_time_infinite);
    }

    #[test]
    fn a_phi_examples() {
        for (b, a_expect) in [(1.0 / 3.0, 1.0 / 3.0), (2.0 / 3.0, 2.0 / 3.0)] {
            let l = -Phi::poly(b, 1.0).unwrap().log_moment().unwrap();
            let c = critical_alphas_constant(l);
            assert!((c.alpha_lower.unwrap() - a_expect).abs() < 1e-10);
            assert!((c.alpha_upper - (1.0 + a_expect)).abs() < 1e-10);
            assert!(rho_of_alpha(l, c.alpha_lower.unwrap()).abs() < 1e-10);
            let rooted = critical_alphas(|_| l).unwrap();
            assert!((rooted.alpha_lower.unwrap() - a_expect).abs() < 1e-10);
            assert!((rooted.alpha_upper - (1.0 + a_expect)).abs() < 1e-10);
        }
        assert!((a_phi_from_l(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exponential_family_a_phi_conventions() {
        for (b, stated, plus_log) in [(0.1, 0.093_178_7, 0.906_821), (1e5, 0.915_205, 0.084_794_5)] {
            let phi = Phi::exp(1.0, b, 1.0).unwrap();
            let r = classify(&sp(0.5, 0.5), &phi).unwrap();
            assert!((r.a_phi - stated).abs() < 1e-6, "{}", r.a_phi);
            assert!((r.a_phi_plus_log_convention - plus_log).abs() < 1e-6);
        }
    }

    #[test]
    fn resurrected_and_censored_constants() {
        let c = critical_alphas(l_resurrected).unwrap();
        assert!((c.alpha_upper - 1.443_861_819).abs() < 1e-8);
        assert!((c.rho_star - 0.692_587_051).abs() < 1e-8);
        assert!((c.alpha_lower.unwrap() - 0.596_050_638).abs() < 1e-8);
        let c = critical_alphas(l_censored).unwrap();
        assert!((c.alpha_upper - 1.567_353_753).abs() < 1e-8);
        assert!((c.rho_star - 0.638_018_059).abs() < 1e-8);
        assert!(c.alpha_lower.is_none());
    }

    #[test]
    fn censored_mean_examples() {
        assert!(censored_mean(&sp(1.0, 0.5)).abs() < 1e-15);
        for a in [0.3, 0.9, 1.1, 1.2] {
            let p = sp(a, 0.8);
            assert!(censored_mean(&p) > 0.0, "alpha={a}");
        }
        for r in [0.48, 0.5, 0.52] {
            assert!(censored_mean(&sp(1.9, r)) < 0.0);
        }
        let p = sp(1.3, 0.6);
        assert!((censored_mean(&p) - p.censored_mean_by_quadrature().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn kappa_star_trace_and_resurrected() {
        for (a, r) in [(1.4, 0.5), (1.2, 0.5), (1.6, 0.55), (1.9, 0.49)] {
            let p = sp(a, r);
            let phi = trace(a, r);
            assert!(h_kappa(&p, &phi, a - 1.0).unwrap().abs() < 1e-12);
            let k = recurrent_extension_kappa(&p, &phi).unwrap();
            assert!((k - (a - 1.0)).abs() < 1e-9);
        }
        let p = sp(1.8, 0.55);
        let phi = Phi::poly(1.0, 2.8).unwrap();
        assert!(mean_xi1(&p, &phi).unwrap() < 0.0);
        let k = recurrent_extension_kappa(&p, &phi).unwrap();
        assert!(k > 0.0 && k < 1.8);
        assert!(h_kappa(&p, &phi, k).unwrap().abs() < 1e-10);
        assert_eq!(h_kappa(&p, &phi, 0.0).unwrap(), 0.0);
        assert!(recurrent_extension_kappa(&sp(0.7, 0.5), &trace(0.7, 0.5)).is_err());
    }

    #[test]
    fn symmetric_region_examples() {
        let phi = |a: f64| Phi::poly(1.0, a + 1.0).unwrap();
        let r = symmetric_region(&sp(1.6, 0.5), &phi(1.6)).unwrap();
        assert_eq!(r.predicted, Sign::Negative);
        assert!(r.mean_xi1 < 0.0);
        let r = symmetric_region(&sp(0.4, 0.5), &phi(0.4)).unwrap();
        assert_eq!(r.predicted, Sign::Positive);
        assert!(r.mean_xi1 > 0.0);
        let r = symmetric_region(&sp(1.0, 0.5), &phi(1.0)).unwrap();
        assert!(r.mean_xi1.abs() < 1e-10);
        assert!(symmetric_region(&sp(1.0, 0.5), &Phi::exp(1.0, 1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn modified_kernel_examples() {
        let m = modified_kernel_mean(1.6, &BoundaryFactor::Power { gamma: 0.3 }).unwrap();
        assert_eq!(m.predicted, Sign::Zero);
        assert!(m.sigma_route.abs() < 1e-10 && m.quadrature_route.abs() < 1e-6, "{m:?}");
        for (alpha, gamma) in [(1.3, 0.7), (1.5, 0.9), (0.5, 0.25)] {
            let m = modified_kernel_mean(alpha, &BoundaryFactor::Power { gamma }).unwrap();
            assert_eq!(m.predicted, Sign::Positive);
            assert!(m.sigma_route > 0.0 && (m.sigma_route - m.quadrature_route).abs() < 1e-6);
        }
        let m = modified_kernel_mean(1.8, &BoundaryFactor::Power { gamma: -0.2 }).unwrap();
        assert!(m.sigma_route < 0.0 && (m.sigma_route - m.quadrature_route).abs() < 1e-6);
        assert!(modified_kernel_mean(1.0, &BoundaryFactor::Power { gamma: 1.2 }).is_err());
        let alpha = 0.7;
        let k = ResurrectionKernel::new(sp(alpha, 0.5), Phi::poly(1.0, 1.0 + alpha).unwrap());
        let m = modified_kernel_mean(alpha, &BoundaryFactor::Resurrected(k)).unwrap();
        assert_eq!(m.predicted, Sign::Positive);
        assert!(m.sigma_route > 0.0 && (m.sigma_route - m.quadrature_route).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn region_and_zero_curve_for_dirac_one() {
        let alphas: Vec<f64> = (1..10).map(|i| 0.2 * i as f64).collect();
        let rhos: Vec<f64> = (1..20).map(|i| 0.05 * i as f64).collect();
        let rows = region_grid(&alphas, &rhos, |_, _| Phi::dirac(1.0));
        assert_eq!(rows.len(), alphas.len() * rhos.len());
        for row in &rows {
            if let Some(m) = row.mean {
                let arh = row.alpha * (1.0 - row.rho);
                if (arh - 0.5).abs() > 1e-9 {
                    assert_eq!(m > 0.0, arh < 0.5, "({}, {})", row.alpha, row.rho);
                }
            }
        }
        for a in [0.6, 0.9, 1.2, 1.5] {
            if let Some(r) = critical_rho(a, |_, _| Phi::dirac(1.0)) {
                assert!((a * (1.0 - r) - 0.5).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn single_sign_flip_along_rho() {
        let phi = Phi::poly(1.0 / 3.0, 1.0).unwrap();
        for a in [0.5, 0.8, 1.2, 1.3] {
            let (lo, hi) = rho_range(a).unwrap();
            let mut flips = 0;
            let mut last_sign = 0.0;
            for i in 1..100 {
                let r = lo + (hi - lo) * i as f64 / 100.0;
                let m = mean_xi1(&sp(a, r), &phi).unwrap();
                if last_sign != 0.0 && m.signum() != last_sign {
                    flips += 1;
                }
                last_sign = m.signum();
            }
            assert!(flips <= 1);
        }
        // the zero curve meets ρ = 1/α at α* = 4/3
        let l = -phi.log_moment().unwrap();
        assert!((rho_of_alpha(l, 4.0 / 3.0) - 0.75).abs() < 1e-10);
    }
}
