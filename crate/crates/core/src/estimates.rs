//! Two-sided envelopes for q(x, y) and a numeric comparability verifier.
//!
//! "q ≍ E" is operationalised as: the ratio q/E stays within a bounded band on a
//! finite log grid. The verifier reports the empirical band; constants are not
//! asserted.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::ResurrectionKernel;
use crate::phi::{Phi, PhiMeasure};
use crate::quad::{integrate, QuadOpts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScalingKind {
    /// lower weak scaling at zero
    L1,
    /// upper weak scaling at zero
    U1,
    /// lower weak scaling at infinity
    LInf,
    /// upper weak scaling at infinity
    UInf,
}

impl ScalingKind {
    fn at_zero(self) -> bool {
        matches!(self, ScalingKind::L1 | ScalingKind::U1)
    }
    fn lower(self) -> bool {
        matches!(self, ScalingKind::L1 | ScalingKind::LInf)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingCertificate {
    pub kind: ScalingKind,
    pub exponent: f64,
    /// best constant on the grid (c ≤ 1 for lower, C ≥ 1 for upper)
    pub constant: f64,
    pub passed: bool,
    /// pair (r, R) where the constant is attained
    pub witness: (f64, f64),
}

#[derive(Debug, Clone, Copy)]
pub struct ScalingGrid {
    pub points: usize,
    /// lower certificates need c ≥ this
    pub min_lower: f64,
    /// upper certificates need C ≤ this
    pub max_upper: f64,
}

impl Default for ScalingGrid {
    fn default() -> Self {
        ScalingGrid { points: 200, min_lower: 1e-2, max_upper: 1e2 }
    }
}

/// Test g(R)/g(r) ≥ c (R/r)^β (lower) or ≤ C (R/r)^β (upper) over all grid pairs
/// r ≤ R in (1e-6, 1) or [1, 1e6).
pub fn check_weak_scaling<G: Fn(f64) -> f64>(g: G, kind: ScalingKind, exponent: f64, grid: ScalingGrid) -> Result<ScalingCertificate> {
    let n = grid.points;
    let (lo, hi) = if kind.at_zero() { (-6.0, 0.0) } else { (0.0, 6.0) };
    let pts: Vec<f64> = (0..n)
        .map(|i| {
            let u = lo + (hi - lo) * i as f64 / n as f64;
            10f64.powf(if kind.at_zero() { u + (hi - lo) / n as f64 * 0.5 } else { u })
        })
        .collect();
    let lg: Vec<f64> = pts.iter().map(|&t| g(t).ln()).collect();
    if let Some(i) = lg.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("weak scaling: g must be positive and finite, g({}) fails", pts[i])));
    }
    let mut best = if kind.lower() { f64::INFINITY } else { f64::NEG_INFINITY };
    let mut witness = (pts[0], pts[0]);
    for i in 0..n {
        for j in i..n {
            let v = lg[j] - lg[i] - exponent * (pts[j] / pts[i]).ln();
            if (kind.lower() && v < best) || (!kind.lower() && v > best) {
                best = v;
                witness = (pts[i], pts[j]);
            }
        }
    }
    let constant = best.exp();
    let passed = if kind.lower() { constant >= grid.min_lower } else { constant <= grid.max_upper };
    Ok(ScalingCertificate { kind, exponent, constant, passed, witness })
}

/// Envelope families with explicit branch tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EnvelopeFamily {
    /// φ with compact support in (0, ∞)
    CompactSupport,
    /// φ(t) ≍ log(e+t)^{δ₊} log(e+1/t)^{δ₋} t^{β−1}(1+t)^{−γ}
    LogPower { beta: f64, gamma: f64, delta_plus: f64, delta_minus: f64 },
    /// φ(t) ≍ t^{β−1} e^{−a t^γ}
    Exponential { beta: f64 },
    /// integral forms, valid under the weak scaling hypotheses
    Integral,
}

impl EnvelopeFamily {
    pub fn for_phi(phi: &Phi) -> Self {
        match phi {
            Phi::Dirac(_) => EnvelopeFamily::CompactSupport,
            Phi::Poly(p) => EnvelopeFamily::LogPower { beta: p.beta, gamma: p.gamma_, delta_plus: 0.0, delta_minus: 0.0 },
            Phi::Exp(e) => EnvelopeFamily::Exponential { beta: e.beta },
            Phi::Table(_) => EnvelopeFamily::Integral,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EnvelopeFamily::CompactSupport => "compact_support",
            EnvelopeFamily::LogPower { .. } => "log_power",
            EnvelopeFamily::Exponential { .. } => "exponential",
            EnvelopeFamily::Integral => "integral",
        }
    }
}

const SPLIT: f64 = 5.0;
const EXACT: f64 = 1e-12;

/// Branch factor for the log-power tables: r^p (log r)^δ, with the critical case p = 0.
fn power_log_branch(p: f64, delta: f64, r: f64) -> (f64, &'static str) {
    let lr = r.ln();
    if p > EXACT {
        (r.powf(p) * lr.powf(delta), "power")
    } else if p.abs() <= EXACT {
        if delta > -1.0 {
            (lr.powf(1.0 + delta), "log")
        } else if delta == -1.0 {
            (lr.ln(), "loglog")
        } else {
            (1.0, "const")
        }
    } else {
        (1.0, "const")
    }
}

#[derive(Debug, Clone)]
pub struct Envelope {
    pub alpha: f64,
    pub family: EnvelopeFamily,
    phi: Phi,
}

impl Envelope {
    pub fn new(alpha: f64, phi: &Phi) -> Self {
        Envelope { alpha, family: EnvelopeFamily::for_phi(phi), phi: phi.clone() }
    }

    pub fn with_family(alpha: f64, phi: &Phi, family: EnvelopeFamily) -> Self {
        Envelope { alpha, family, phi: phi.clone() }
    }

    /// Envelope value for q(x, y) and the name of the branch used.
    pub fn eval_branch(&self, x: f64, y: f64) -> Result<(f64, String)> {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Domain(format!("envelope: need x, y > 0, got ({x}, {y})")));
        }
        let a = self.alpha;
        let (s, l) = if x <= y { (x, y) } else { (y, x) };
        if l <= SPLIT * s {
            return Ok((s.powf(-1.0 - a), "near_diagonal".into()));
        }
        let outward = x < y;
        let r = l / s;
        let base = l.powf(-1.0 - a);
        let (factor, label) = match &self.family {
            EnvelopeFamily::CompactSupport => ((l / (l - s)).powf(1.0 + a), "compact".to_string()),
            EnvelopeFamily::LogPower { beta, gamma, delta_plus, delta_minus } => {
                if outward {
                    let (f, k) = power_log_branch(a + beta - gamma, *delta_plus, r);
                    (f, format!("outward_{k}"))
                } else {
                    let (f, k) = power_log_branch(1.0 - beta, *delta_minus, r);
                    (f, format!("inward_{k}"))
                }
            }
            EnvelopeFamily::Exponential { beta } => {
                if outward {
                    (1.0, "outward_const".to_string())
                } else {
                    let (f, k) = power_log_branch(1.0 - beta, 0.0, r);
                    (f, format!("inward_{k}"))
                }
            }
            EnvelopeFamily::Integral => {
                let opts = QuadOpts::new(0.0, 1e-9);
                let phi = &self.phi;
                if outward {
                    // ∫_1^{r−1} t^α φ(t) dt, in log variable
                    let v = integrate(|u: f64| ((1.0 + a) * u + phi.ln_density(u.exp()).unwrap()).exp(), 0.0, (r - 1.0).ln(), opts)?.value;
                    (v, "outward_integral".to_string())
                } else {
                    // ∫_{s/(l−s)}^1 φ(t) dt/t
                    let v = integrate(|u: f64| phi.ln_density(u.exp()).unwrap().exp(), (s / (l - s)).ln(), 0.0, opts)?.value;
                    (v, "inward_integral".to_string())
                }
            }
        };
        Ok((base * factor, label))
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.eval_branch(x, y)?.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// x/y spans [10^{-decades}, 10^{decades}]
    pub decades: u32,
    pub per_decade: u32,
    pub budget: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { decades: 6, per_decade: 25, budget: 1e3 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparability {
    pub family: String,
    pub branch: String,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// x/y where the extreme ratios occur
    pub argmin: f64,
    pub argmax: f64,
    /// max/min of the ratio restricted to 1/5 ≤ x/y ≤ 5
    pub near_diagonal_spread: f64,
    pub pass: bool,
}

/// Sweep q(x, 1)/E(x, 1) over x on a log grid; homogeneity covers every other y.
pub fn verify_comparability(kernel: &ResurrectionKernel, envelope: &Envelope, grid: GridSpec) -> Result<Comparability> {
    let n = (2 * grid.decades * grid.per_decade + 1) as i64;
    let half = (grid.decades * grid.per_decade) as i64;
    let rows: Vec<Result<(f64, f64, String)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = 10f64.powf((i - half) as f64 / grid.per_decade as f64);
            let q = kernel.q_density(x, 1.0)?;
            let (e, b) = envelope.eval_branch(x, 1.0)?;
            Ok((x, q / e, b))
        })
        .collect();
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    let (mut argmin, mut argmax) = (0.0, 0.0);
    let (mut dmin, mut dmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut branches: Vec<String> = Vec::new();
    for row in rows {
        let (x, r, b) = row?;
        if !branches.contains(&b) {
            branches.push(b);
        }
        if r < ratio_min {
            ratio_min = r;
            argmin = x;
        }
        if r > ratio_max {
            ratio_max = r;
            argmax = x;
        }
        if (1.0 / SPLIT..=SPLIT).contains(&x) {
            dmin = dmin.min(r);
            dmax = dmax.max(r);
        }
    }
    branches.sort();
    Ok(Comparability {
        family: envelope.family.name().into(),
        branch: branches.join(";"),
        ratio_min,
        ratio_max,
        argmin,
        argmax,
        near_diagonal_spread: dmax / dmin,
        pass: ratio_min > 0.0 && ratio_max / ratio_min <= grid.budget,
    })
}

/// Envelope for π(u): 1 on |u| ≤ log 5, e^u φ(e^u) beyond.
pub fn pi_envelope(phi: &Phi, u: f64) -> Result<f64> {
    if u.abs() <= SPLIT.ln() {
        return Ok(1.0);
    }
    phi.ln_density(u.exp())
        .map(|l| (u + l).exp())
        .ok_or_else(|| Error::Unsupported("π envelope needs a density".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::StableParams;

    fn kernel(alpha: f64, phi: Phi) -> ResurrectionKernel {
        ResurrectionKernel::new(StableParams::new(alpha, 0.5).unwrap(), phi)
    }

    #[test]
    fn poly_density_scaling_certificates() {
        for (b, g) in [(0.5, 1.0), (2.0, 3.5), (1.0, 1.5)] {
            let p = Phi::poly(b, g).unwrap();
            let d = |t: f64| p.density(t).unwrap();
            let grid = ScalingGrid::default();
            assert!(check_weak_scaling(d, ScalingKind::L1, b - 1.0, grid).unwrap().passed);
            assert!(check_weak_scaling(d, ScalingKind::U1, b - 1.0, grid).unwrap().passed);
            assert!(check_weak_scaling(d, ScalingKind::UInf, b - 1.0 - g, grid).unwrap().passed);
            assert!(check_weak_scaling(d, ScalingKind::LInf, b - 1.0 - g, grid).unwrap().passed);
        }
        let c = check_weak_scaling(|t| if t <= 1.0 { 1.0 } else { 0.5 }, ScalingKind::L1, 0.0, ScalingGrid::default()).unwrap();
        assert!(c.passed && (c.constant - 1.0).abs() < 1e-15);
        let c = check_weak_scaling(|t| if t <= 1.0 { 1.0 } else { 0.5 }, ScalingKind::U1, 0.0, ScalingGrid::default()).unwrap();
        assert!(c.passed && (c.constant - 1.0).abs() < 1e-15);
    }

    #[test]
    fn violated_scaling_reports_witness() {
        // exponential growth breaks any power-law upper bound at infinity
        let c = check_weak_scaling(|t: f64| (t.min(700.0)).exp(), ScalingKind::UInf, 1.0, ScalingGrid::default()).unwrap();
        assert!(!c.passed && c.witness.0 < c.witness.1);
    }

    #[test]
    fn envelope_scaling_degree() {
        for phi in [Phi::poly(0.5, 1.0).unwrap(), Phi::exp(1.0, 0.5, 1.0).unwrap(), Phi::dirac(1.0).unwrap(), Phi::poly(1.0, 2.5).unwrap()] {
            let e = Envelope::new(1.5, &phi);
            for &(x, y) in &[(1.0, 1.2), (0.01, 1.0), (3.0, 0.001), (1.0, 4.9), (1.0, 5.1)] {
                for lam in [0.1, 3.0, 40.0] {
                    let a = e.eval(lam * x, lam * y).unwrap();
                    let b = e.eval(x, y).unwrap() * lam.powf(-2.5);
                    assert!((a / b - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    fn split_jump(e: &Envelope, x: f64, y: f64) -> f64 {
        let at = e.eval(x, y).unwrap();
        let (xx, yy) = if x < y { (x, y * (1.0 + 1e-9)) } else { (x * (1.0 + 1e-9), y) };
        let past = e.eval(xx, yy).unwrap();
        (at / past).max(past / at)
    }

    #[test]
    fn envelope_jump_at_split_is_bounded() {
        for phi in [Phi::poly(0.5, 1.0).unwrap(), Phi::poly(0.3, 3.0).unwrap(), Phi::exp(1.0, 2.0, 1.0).unwrap(), Phi::dirac(1.0).unwrap()] {
            let e = Envelope::new(0.3, &phi);
            for (x, y) in [(1.0, 5.0), (5.0, 1.0)] {
                let jump = split_jump(&e, x, y);
                assert!(jump <= 10.0, "{phi}: jump {jump}");
            }
        }
    }

    #[test]
    fn split_jump_is_five_to_one_plus_alpha_minus_exponent() {
        let e = Envelope::new(1.8, &Phi::poly(0.5, 1.0).unwrap());
        // outward exponent α+β−γ = 1.3, inward 1−β = 0.5
        assert!((split_jump(&e, 1.0, 5.0) / 5f64.powf(1.5) - 1.0).abs() < 1e-6);
        assert!((split_jump(&e, 5.0, 1.0) / 5f64.powf(2.3) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn branch_examples() {
        let e = Envelope::new(0.5, &Phi::poly(0.5, 1.0).unwrap());
        let v = e.eval(2.0, 3.0).unwrap();
        assert!((v - 2f64.powf(-1.5)).abs() < 1e-15);
        // q(y,x) at (x,y) = (0.01, 1): y^{-1-α}(y/x)^{1-β}
        let v = e.eval(1.0, 0.01).unwrap();
        assert!((v - 100f64.powf(0.5)).abs() < 1e-12);
        let d = Envelope::new(0.5, &Phi::dirac(1.0).unwrap());
        assert!((d.eval(1.0, 10.0).unwrap() - 9f64.powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn dirac_ratio_constant_near_diagonal() {
        let k = kernel(0.5, Phi::dirac(1.0).unwrap());
        let e = Envelope::new(0.5, &k.phi);
        let grid = GridSpec { decades: 1, per_decade: 40, budget: 1e3 };
        let c = verify_comparability(&k, &e, grid).unwrap();
        assert!(c.pass && c.near_diagonal_spread < 10.0);
    }

    #[test]
    fn exponential_family_passes() {
        for (a, b, g) in [(1.0, 0.5, 1.0), (1.0, 2.0, 1.0), (2.0, 1.0, 0.5)] {
            let k = kernel(0.8, Phi::exp(a, b, g).unwrap());
            let e = Envelope::new(0.8, &k.phi);
            let c = verify_comparability(&k, &e, GridSpec { decades: 4, per_decade: 6, budget: 1e3 }).unwrap();
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn integral_forms_track_closed_branches() {
        let phi = Phi::poly(0.5, 1.0).unwrap();
        let k = kernel(1.2, phi.clone());
        let e = Envelope::with_family(1.2, &phi, EnvelopeFamily::Integral);
        let c = verify_comparability(&k, &e, GridSpec { decades: 4, per_decade: 5, budget: 1e3 }).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn pi_envelope_heavy_tailed_poly() {
        let phi = Phi::poly(0.5, 1.0).unwrap();
        let k = kernel(1.5, phi.clone());
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for i in 0..=60 {
            let u = -12.0 + 0.4 * i as f64;
            let r = k.pi_density(u).unwrap() / pi_envelope(&phi, u).unwrap();
            lo = lo.min(r);
            hi = hi.max(r);
        }
        assert!(hi / lo < 1e2, "{lo} {hi}");
    }
}
