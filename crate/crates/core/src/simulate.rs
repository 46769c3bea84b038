//! Monte Carlo for ξ̄ = ξ + χ, the Lamperti time change, and the step process Y.
//!
//! ξ is simulated with jumps of size |y| > ε as a compound Poisson process (the
//! truncated jump law of μ is inverted in closed form), compensating drift, and an
//! optional Gaussian stand-in for the small jumps. χ is compound Poisson with rate
//! c₋/α and jumps W + log V.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::mean_xi1;
use crate::error::{Error, Result};
use crate::phi::{Phi, PhiMeasure};
use crate::stable::StableParams;

/// Relative increment of I over the last decade of time below which the clock
/// counts as having plateaued.
pub const PLATEAU_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    /// small-jump cutoff for ξ
    pub epsilon: f64,
    /// horizon for ξ̄
    pub horizon: f64,
    /// spacing of the recorded grid (in ξ̄ time)
    pub dt_out: f64,
    pub seed: u64,
    pub n_paths: usize,
    /// `None` switches the Gaussian small-jump term on for α ≥ 1
    pub gaussian_compensation: Option<bool>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { epsilon: 1e-3, horizon: 1.0, dt_out: 0.01, seed: 0, n_paths: 1000, gaussian_compensation: None }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 0.1) {
            return Err(Error::Parameter(format!("epsilon must lie in (0, 0.1], got {}", self.epsilon)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Parameter(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.dt_out > 0.0) {
            return Err(Error::Parameter(format!("dt_out must be positive, got {}", self.dt_out)));
        }
        if self.n_paths == 0 {
            return Err(Error::Parameter("n_paths must be positive".into()));
        }
        Ok(())
    }

    pub fn compensation_on(&self, alpha: f64) -> bool {
        self.gaussian_compensation.unwrap_or(alpha >= 1.0)
    }

    /// Independent generator for path `index`.
    pub fn rng_for(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// Piecewise-linear path with jumps: between knots the path is linear from
/// `values[k-1]` to `left_limits[k]`; at a knot it jumps to `values[k]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevyPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub left_limits: Vec<f64>,
    pub chi_jumps: usize,
}

impl LevyPath {
    pub fn end_value(&self) -> f64 {
        *self.values.last().expect("path has a start point")
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("path has a start point")
    }

    /// Right-continuous value at time t.
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.values[0];
        }
        if k == self.times.len() {
            return self.end_value();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (a, b) = (self.values[k - 1], self.left_limits[k]);
        a + (b - a) * (t - t0) / (t1 - t0)
    }

    /// I_t = ∫₀^t e^{αξ_s} ds at every knot, exact for the linear pieces.
    pub fn exponential_clock(&self, alpha: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.times.len());
        let mut acc = 0.0;
        out.push(0.0);
        for k in 1..self.times.len() {
            acc += linear_exp_integral(alpha, self.values[k - 1], self.left_limits[k], self.times[k] - self.times[k - 1]);
            out.push(acc);
        }
        out
    }
}

/// ∫ e^{α(a + (b−a)s/h)} ds over [0, h].
fn linear_exp_integral(alpha: f64, a: f64, b: f64, h: f64) -> f64 {
    let d = alpha * (b - a);
    let base = (alpha * a).exp() * h;
    if d.abs() < 1e-12 {
        base * (1.0 + 0.5 * d)
    } else {
        base * d.exp_m1() / d
    }
}

/// Solve ∫₀^u e^{α(a + (b−a)s/h)} ds = target for u ∈ [0, h].
fn linear_exp_inverse(alpha: f64, a: f64, b: f64, h: f64, target: f64) -> f64 {
    let slope = alpha * (b - a) / h;
    let scaled = target * (-alpha * a).exp();
    if slope.abs() < 1e-12 {
        return scaled.min(h);
    }
    ((slope * scaled).ln_1p() / slope).clamp(0.0, h)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PssmpPath {
    pub start: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub absorbed: bool,
    /// x^α I_H when the clock has plateaued; a horizon-truncated estimate of ζ
    pub absorption_time: Option<f64>,
}

/// Draw W with density α e^y (1+e^y)^{−1−α}.
pub fn sample_w<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    w_from_uniform(alpha, u)
}

/// Inverse CDF of W: F(y) = 1 − (1+e^y)^{−α}.
pub fn w_from_uniform(alpha: f64, u: f64) -> f64 {
    ((-(-u).ln_1p() / alpha).exp_m1()).ln()
}

/// One jump of χ: W + log V with V ~ φ.
pub fn sample_chi_jump<R: Rng + ?Sized>(p: &StableParams, phi: &Phi, rng: &mut R) -> f64 {
    sample_w(p.alpha, rng) + phi.sample(rng).ln()
}

/// Rates and samplers for ξ̄ under a fixed truncation level.
#[derive(Debug, Clone)]
pub struct XiBarSampler {
    pub params: StableParams,
    pub phi: Phi,
    pub epsilon: f64,
    /// −b − ∫_{ε<|y|≤1} y μ(dy)
    pub drift: f64,
    /// standard deviation per unit time of the Gaussian small-jump term
    pub sigma: f64,
    pub rate_pos: f64,
    pub rate_neg: f64,
    pub rate_chi: f64,
    neg_scale: f64,
}

impl XiBarSampler {
    pub fn new(p: &StableParams, phi: &Phi, epsilon: f64, gaussian: bool) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.1) {
            return Err(Error::Parameter(format!("epsilon must lie in (0, 0.1], got {epsilon}")));
        }
        let drift = -p.linear_term_b()? - p.compensated_mean(epsilon)?;
        let sigma = if gaussian { p.small_jump_variance(epsilon)?.sqrt() } else { 0.0 };
        let rate_pos = p.mu_tail_pos(epsilon);
        let rate_neg = p.mu_tail_neg(epsilon);
        let neg_scale = (-(-epsilon).exp_m1()).powf(-p.alpha) - 1.0;
        if ![drift, sigma, rate_pos, rate_neg].iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric("non-finite truncated triple".into()));
        }
        Ok(XiBarSampler {
            params: p.clone(),
            phi: phi.clone(),
            epsilon,
            drift,
            sigma,
            rate_pos,
            rate_neg,
            rate_chi: p.killing_rate(),
            neg_scale,
        })
    }

    pub fn from_config(p: &StableParams, phi: &Phi, cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        XiBarSampler::new(p, phi, cfg.epsilon, cfg.compensation_on(p.alpha))
    }

    pub fn total_rate(&self) -> f64 {
        self.rate_pos + self.rate_neg + self.rate_chi
    }

    /// Jump of μ restricted to y > ε: the tail ((e^y−1)/(e^ε−1))^{−α} is uniform.
    pub fn positive_jump(&self, u: f64) -> f64 {
        (self.epsilon.exp_m1() * u.powf(-1.0 / self.params.alpha)).ln_1p()
    }

    /// Jump of μ restricted to y < −ε.
    pub fn negative_jump(&self, u: f64) -> f64 {
        let w = (self.neg_scale * u).ln_1p() * (-1.0 / self.params.alpha);
        // 1 − e^{−|y|} = e^{w}
        (-w.exp()).ln_1p()
    }

    /// One event: (jump, is_chi).
    fn event<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, bool) {
        let pick = rng.random::<f64>() * self.total_rate();
        let u = 1.0 - rng.random::<f64>();
        if pick < self.rate_pos {
            (self.positive_jump(u), false)
        } else if pick < self.rate_pos + self.rate_neg {
            (self.negative_jump(u), false)
        } else {
            (sample_chi_jump(&self.params, &self.phi, rng), true)
        }
    }

    /// ξ̄ at time `t` and the number of χ jumps, without storing the path.
    pub fn sample_endpoint<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> (f64, u64) {
        let n = Poisson::new(self.total_rate() * t).map(|d| d.sample(rng) as u64).unwrap_or(0);
        let mut jumps = Vec::with_capacity(n as usize);
        let mut chi = 0;
        for _ in 0..n {
            let (y, is_chi) = self.event(rng);
            jumps.push(y);
            chi += is_chi as u64;
        }
        let mut v = self.drift * t + crate::stats::pairwise_sum(&jumps);
        if self.sigma > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            v += self.sigma * t.sqrt() * z;
        }
        (v, chi)
    }

    /// Full path on [0, horizon], with knots at every jump and on the dt_out grid.
    pub fn sample_path<R: Rng + ?Sized>(&self, horizon: f64, dt_out: f64, rng: &mut R) -> LevyPath {
        let exp = Exp::new(self.total_rate()).expect("positive total rate");
        let mut times = vec![0.0];
        let mut values = vec![0.0];
        let mut left_limits = vec![0.0];
        let mut chi_jumps = 0;
        let mut t = 0.0;
        let mut x = 0.0;
        let mut next_jump = exp.sample(rng);
        let mut k_grid = 1u64;
        loop {
            let next_grid = (k_grid as f64 * dt_out).min(horizon);
            let (tn, is_jump) = if next_jump < next_grid { (next_jump, true) } else { (next_grid, false) };
            let dt = tn - t;
            let mut left = x + self.drift * dt;
            if self.sigma > 0.0 && dt > 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                left += self.sigma * dt.sqrt() * z;
            }
            let mut right = left;
            if is_jump {
                let (y, is_chi) = self.event(rng);
                right += y;
                chi_jumps += is_chi as usize;
                next_jump = tn + exp.sample(rng);
            } else {
                k_grid += 1;
            }
            times.push(tn);
            left_limits.push(left);
            values.push(right);
            t = tn;
            x = right;
            if !is_jump && tn >= horizon {
                break;
            }
        }
        LevyPath { times, values, left_limits, chi_jumps }
    }
}

/// ξ̄ on [0, cfg.horizon] for one path.
pub fn sample_xi_bar_path<R: Rng + ?Sized>(p: &StableParams, phi: &Phi, cfg: &SimConfig, rng: &mut R) -> Result<LevyPath> {
    let s = XiBarSampler::from_config(p, phi, cfg)?;
    Ok(s.sample_path(cfg.horizon, cfg.dt_out, rng))
}

/// Has the clock I stopped growing: relative increment over the last decade of
/// ξ̄ time below [`PLATEAU_TOL`].
pub fn clock_plateaued(path: &LevyPath, clock: &[f64]) -> bool {
    let h = path.horizon();
    let k = path.times.partition_point(|&s| s <= h / 10.0).max(1) - 1;
    let total = *clock.last().unwrap_or(&0.0);
    total > 0.0 && (total - clock[k]) / total < PLATEAU_TOL
}

/// X_t = x exp(ξ̄_{τ(x^{−α} t)}), evaluated at the knots of `xi`. `drifts_down`
/// should be the sign information E ξ̄₁ < 0; absorption is only declared then.
pub fn lamperti_transform(xi: &LevyPath, x: f64, alpha: f64, drifts_down: bool) -> Result<PssmpPath> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("start must be positive, got {x}")));
    }
    let clock = xi.exponential_clock(alpha);
    let scale = x.powf(alpha);
    let times: Vec<f64> = clock.iter().map(|i| scale * i).collect();
    let values: Vec<f64> = xi.values.iter().map(|v| x * v.exp()).collect();
    let absorbed = drifts_down && clock_plateaued(xi, &clock);
    let absorption_time = absorbed.then(|| scale * clock.last().copied().unwrap_or(0.0));
    Ok(PssmpPath { start: x, times, values, absorbed, absorption_time })
}

/// τ(s) = inf{u : I_u > s}; `None` when s is beyond the simulated clock.
pub fn inverse_clock(xi: &LevyPath, clock: &[f64], alpha: f64, s: f64) -> Option<f64> {
    if s < 0.0 || s > *clock.last()? {
        return None;
    }
    let k = clock.partition_point(|&c| c <= s);
    if k == 0 {
        return Some(0.0);
    }
    if k == clock.len() {
        return Some(xi.horizon());
    }
    let h = xi.times[k] - xi.times[k - 1];
    let u = linear_exp_inverse(alpha, xi.values[k - 1], xi.left_limits[k], h, s - clock[k - 1]);
    Some(xi.times[k - 1] + u)
}

/// X at pssMp time t; `None` past the simulated clock.
pub fn pssmp_value_at(xi: &LevyPath, clock: &[f64], x: f64, alpha: f64, t: f64) -> Option<f64> {
    let u = inverse_clock(xi, clock, alpha, x.powf(-alpha) * t)?;
    Some(x * xi.value_at(u).exp())
}

/// The regular step process: holding rate (c₋/α) z^{−α}, jumps z → z V e^W.
pub fn simulate_step_process<R: Rng + ?Sized>(p: &StableParams, phi: &Phi, x: f64, n_jumps: usize, rng: &mut R) -> Result<PssmpPath> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("start must be positive, got {x}")));
    }
    let rate = p.killing_rate();
    let mut times = Vec::with_capacity(n_jumps + 1);
    let mut values = Vec::with_capacity(n_jumps + 1);
    let mut t = 0.0;
    let mut z = x;
    times.push(t);
    values.push(z);
    for _ in 0..n_jumps {
        let e: f64 = rng.sample(rand_distr::Exp1);
        t += e / (rate * z.powf(-p.alpha));
        z *= sample_chi_jump(p, phi, rng).exp();
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::Numeric(format!("step process left (0, ∞): {z}")));
        }
        times.push(t);
        values.push(z);
    }
    Ok(PssmpPath { start: x, times, values, absorbed: false, absorption_time: None })
}

/// ξ̄(horizon) and χ jump counts for cfg.n_paths independent paths.
pub fn simulate_endpoints(p: &StableParams, phi: &Phi, cfg: &SimConfig) -> Result<Vec<(f64, u64)>> {
    let s = XiBarSampler::from_config(p, phi, cfg)?;
    Ok((0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| s.sample_endpoint(cfg.horizon, &mut cfg.rng_for(i)))
        .collect())
}

/// cfg.n_paths pssMp paths started at x.
pub fn simulate_paths(p: &StableParams, phi: &Phi, x: f64, cfg: &SimConfig) -> Result<Vec<(LevyPath, PssmpPath)>> {
    let s = XiBarSampler::from_config(p, phi, cfg)?;
    let down = mean_xi1(p, phi)? < 0.0;
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let xi = s.sample_path(cfg.horizon, cfg.dt_out, &mut cfg.rng_for(i));
            let y = lamperti_transform(&xi, x, p.alpha, down)?;
            Ok((xi, y))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::overline_psi;
    use crate::kernels::ResurrectionKernel;
    use crate::phi::PolyPhi;
    use crate::stats::{chi_square, chi_square_critical_1pct, ks_statistic, ks_critical_1pct, mean_and_se};

    fn sp(a: f64, r: f64) -> StableParams {
        StableParams::new(a, r).unwrap()
    }

    #[test]
    fn w_inverse_cdf_fixed_point() {
        for a in [0.5, 1.0, 1.7] {
            let u = 1.0 - 2f64.powf(-a);
            assert!(w_from_uniform(a, u).abs() < 1e-14);
        }
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::default().validate().is_ok());
        assert!(SimConfig { epsilon: 0.2, ..Default::default() }.validate().is_err());
        assert!(SimConfig { horizon: 0.0, ..Default::default() }.validate().is_err());
        assert!(SimConfig::default().compensation_on(1.0));
        assert!(!SimConfig::default().compensation_on(0.9));
    }

    #[test]
    fn truncated_jump_inverses_match_tails() {
        let p = sp(1.3, 0.6);
        let s = XiBarSampler::new(&p, &Phi::dirac(1.0).unwrap(), 1e-2, true).unwrap();
        for u in [0.9, 0.5, 1e-3] {
            let y = s.positive_jump(u);
            assert!((p.mu_tail_pos(y) / s.rate_pos - u).abs() < 1e-12);
            let y = s.negative_jump(u);
            assert!((p.mu_tail_neg(-y) / s.rate_neg - u).abs() < 1e-12);
        }
        assert!((s.positive_jump(1.0) - 1e-2).abs() < 1e-15);
        assert!((s.negative_jump(1.0) + 1e-2).abs() < 1e-15);
    }

    #[test]
    fn chi_jumps_follow_big_pi() {
        let p = sp(0.5, 0.5);
        let phi = Phi::dirac(1.0).unwrap();
        let k = ResurrectionKernel::new(p.clone(), phi.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_chi_jump(&p, &phi, &mut rng)).collect();
        // Π(y) = α e^y (1 + e^y)^{−1−α} for the unit atom: CDF 1 − (1+e^y)^{−α}
        let d = ks_statistic(&xs, |y| 1.0 - (1.0 + y.exp()).powf(-0.5));
        assert!(d < ks_critical_1pct(n));
        let edges: Vec<f64> = (0..=20).map(|i| -8.0 + 0.8 * i as f64).collect();
        let mut counts = vec![0u64; 20];
        for &x in &xs {
            if x >= edges[0] && x < edges[20] {
                counts[((x - edges[0]) / 0.8) as usize] += 1;
            }
        }
        let inside: u64 = counts.iter().sum();
        let probs: Vec<f64> = edges
            .windows(2)
            .map(|w| crate::quad::quad(|y| k.Pi_density(y).unwrap(), w[0], w[1], Default::default()).unwrap())
            .collect();
        let tot: f64 = probs.iter().sum();
        let probs: Vec<f64> = probs.iter().map(|q| q / tot).collect();
        assert!(inside > 0);
        assert!(chi_square(&counts, &probs) < chi_square_critical_1pct(19));
    }

    #[test]
    fn endpoint_mean_and_characteristic_function() {
        let p = sp(0.7, 0.5);
        let phi = Phi::dirac(1.0).unwrap();
        let cfg = SimConfig { epsilon: 1e-2, n_paths: 20_000, seed: 3, ..Default::default() };
        let ends: Vec<f64> = simulate_endpoints(&p, &phi, &cfg).unwrap().into_iter().map(|e| e.0).collect();
        let (m, se) = mean_and_se(&ends);
        let expect = mean_xi1(&p, &phi).unwrap();
        assert!((m - expect).abs() < 3.0 * se, "{m} ± {se} vs {expect}");
        for theta in [0.5, 1.0] {
            let target = (-overline_psi(&p, &phi, theta).unwrap()).exp();
            let re: Vec<f64> = ends.iter().map(|x| (theta * x).cos()).collect();
            let im: Vec<f64> = ends.iter().map(|x| (theta * x).sin()).collect();
            let (mr, sr) = mean_and_se(&re);
            let (mi, si) = mean_and_se(&im);
            // the ε-truncation shifts Ψ̄ by O(ε^{2−α}) without compensation
            assert!((mr - target.re).abs() < 3.0 * sr + 2e-3, "θ={theta}");
            assert!((mi - target.im).abs() < 3.0 * si + 2e-3, "θ={theta}");
        }
    }

    #[test]
    fn constant_path_gives_constant_process() {
        let xi = LevyPath { times: vec![0.0, 0.5, 1.0], values: vec![0.0; 3], left_limits: vec![0.0; 3], chi_jumps: 0 };
        let clock = xi.exponential_clock(1.3);
        assert!((clock[2] - 1.0).abs() < 1e-15);
        let x = lamperti_transform(&xi, 2.0, 1.3, false).unwrap();
        assert!(x.values.iter().all(|&v| v == 2.0));
        for t in [0.0, 0.3, 1.0, 2.0] {
            let v = pssmp_value_at(&xi, &clock, 2.0, 1.3, t).unwrap();
            assert_eq!(v, 2.0);
        }
        assert!(pssmp_value_at(&xi, &clock, 2.0, 1.3, 100.0).is_none());
    }

    #[test]
    fn clock_is_exact_and_invertible() {
        let xi = LevyPath { times: vec![0.0, 1.0, 2.0], values: vec![0.0, -1.0, 0.5], left_limits: vec![0.0, 2.0, -1.0], chi_jumps: 0 };
        let a = 0.8;
        let clock = xi.exponential_clock(a);
        let i1 = ((2.0 * a).exp() - 1.0) / (2.0 * a);
        assert!((clock[1] - i1).abs() < 1e-14);
        let i2 = i1 + (-a).exp() * 1.0;
        assert!((clock[2] - i2).abs() < 1e-14);
        for u in [0.1, 0.7, 1.0, 1.4, 1.99] {
            let k = if u <= 1.0 { 0 } else { 1 };
            let end = xi.value_at(u - 1e-300);
            let at_u = xi.values[k] + (xi.left_limits[k + 1] - xi.values[k]) * (u - xi.times[k]);
            assert!(u == 1.0 || (end - at_u).abs() < 1e-12);
            let partial = clock[k] + linear_exp_integral(a, xi.values[k], at_u, u - xi.times[k]);
            let back = inverse_clock(&xi, &clock, a, partial).unwrap();
            assert!((back - u).abs() < 1e-12, "{u} {back}");
        }
        for w in clock.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn recorded_path_is_consistent() {
        let p = sp(1.2, 0.55);
        let phi = Phi::Poly(PolyPhi::trace(1.2, 0.55).unwrap());
        let cfg = SimConfig { epsilon: 0.05, horizon: 2.0, dt_out: 0.1, ..Default::default() };
        let xi = sample_xi_bar_path(&p, &phi, &cfg, &mut cfg.rng_for(0)).unwrap();
        assert_eq!(xi.values[0], 0.0);
        assert!((xi.horizon() - 2.0).abs() < 1e-12);
        for w in xi.times.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for k in 1..=20 {
            let t = 0.1 * k as f64;
            assert!(xi.times.iter().any(|&s| (s - t).abs() < 1e-9));
        }
    }

    #[test]
    fn step_process_holding_rate() {
        let p = sp(0.5, 0.5);
        let phi = Phi::dirac(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let holds: Vec<f64> = (0..20_000)
            .map(|_| {
                let y = simulate_step_process(&p, &phi, 2.0, 1, &mut rng).unwrap();
                y.times[1]
            })
            .collect();
        let (m, se) = mean_and_se(&holds);
        let expect = 0.5 / p.c_minus * 2f64.sqrt();
        assert!((m - expect).abs() < 3.0 * se);
        assert!(simulate_step_process(&p, &phi, 0.0, 1, &mut rng).is_err());
    }

    #[test]
    fn streams_are_reproducible() {
        let p = sp(0.7, 0.5);
        let phi = Phi::dirac(1.0).unwrap();
        let cfg = SimConfig { epsilon: 0.05, n_paths: 64, seed: 9, ..Default::default() };
        let a = simulate_endpoints(&p, &phi, &cfg).unwrap();
        let b = simulate_endpoints(&p, &phi, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
