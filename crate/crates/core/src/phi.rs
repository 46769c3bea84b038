//! Return measures φ on (0,∞): a restart from an exit position z < 0 lands in
//! A with probability φ(A/|z|).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{digamma, ln_gamma, ln_gamma_real, ComplexValue};

/// Capability shared by every return measure.
pub trait PhiMeasure {
    /// ∫ u^s φ(du) on the strip where it converges.
    fn mellin(&self, s: ComplexValue) -> Result<ComplexValue>;
    /// ∫ (log u) φ(du).
    fn log_moment(&self) -> Result<f64>;
    fn has_finite_abs_log_moment(&self) -> bool {
        true
    }
    /// sup{κ : ∫ u^κ φ(du) < ∞}; `f64::INFINITY` when all moments exist.
    fn kappa0(&self) -> f64;
    /// log of the Lebesgue density, `None` for atoms.
    fn ln_density(&self, t: f64) -> Option<f64>;
    fn density(&self, t: f64) -> Option<f64> {
        self.ln_density(t).map(f64::exp)
    }
    fn cdf(&self, t: f64) -> Option<f64>;
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;

    /// Mellin transform at a real argument, +∞ once the moment diverges.
    fn mellin_real(&self, kappa: f64) -> Result<f64> {
        if kappa >= self.kappa0() {
            return Ok(f64::INFINITY);
        }
        Ok(self.mellin(Complex64::new(kappa, 0.0))?.re)
    }
}

fn strip_error(s: ComplexValue, lo: f64, hi: f64) -> Error {
    Error::Divergence(format!("Mellin transform diverges at s = {s}: need {lo} < Re s < {hi}"))
}

/// φ(t) = Γ(γ)/(Γ(β)Γ(γ−β)) t^{β−1}(1+t)^{−γ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyPhi {
    pub beta: f64,
    pub gamma_: f64,
}

impl PolyPhi {
    pub fn new(beta: f64, gamma_: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameter(format!("poly: beta must be positive, got {beta}")));
        }
        if !(gamma_ > beta && gamma_.is_finite()) {
            return Err(Error::Parameter(format!("poly: gamma must exceed beta, got beta={beta}, gamma={gamma_}")));
        }
        Ok(PolyPhi { beta, gamma_ })
    }

    /// The trace (path-censored) kernel β = 1 − αρ, γ = 1.
    pub fn trace(alpha: f64, rho: f64) -> Result<Self> {
        PolyPhi::new(1.0 - alpha * rho, 1.0)
    }

    fn ln_norm(&self) -> f64 {
        let (b, g) = (self.beta, self.gamma_);
        ln_gamma_real(g).unwrap() - ln_gamma_real(b).unwrap() - ln_gamma_real(g - b).unwrap()
    }
}

impl PhiMeasure for PolyPhi {
    fn mellin(&self, s: ComplexValue) -> Result<ComplexValue> {
        let (b, g) = (self.beta, self.gamma_);
        if !(s.re > -b && s.re < g - b) {
            return Err(strip_error(s, -b, g - b));
        }
        let lg = |z: ComplexValue| ln_gamma(z);
        let v = lg(s + b)? + lg(g - b - s)? - ln_gamma_real(b)? - ln_gamma_real(g - b)?;
        Ok(v.exp())
    }

    fn log_moment(&self) -> Result<f64> {
        Ok(digamma(self.beta)? - digamma(self.gamma_ - self.beta)?)
    }

    fn kappa0(&self) -> f64 {
        self.gamma_ - self.beta
    }

    fn ln_density(&self, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(f64::NEG_INFINITY);
        }
        Some(self.ln_norm() + (self.beta - 1.0) * t.ln() - self.gamma_ * t.ln_1p())
    }

    fn cdf(&self, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(0.0);
        }
        Some(statrs::function::beta::beta_reg(self.beta, self.gamma_ - self.beta, t / (1.0 + t)))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // U/(1−U) with U ~ Beta(β, γ−β), written as a ratio of Gamma variates
        let g1 = Gamma::new(self.beta, 1.0).unwrap().sample(rng);
        let g2 = Gamma::new(self.gamma_ - self.beta, 1.0).unwrap().sample(rng);
        (g1 / g2).clamp(f64::MIN_POSITIVE, f64::MAX)
    }
}

/// φ(t) = γ a^{β/γ}/Γ(β/γ) t^{β−1} e^{−a t^γ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpPhi {
    pub a: f64,
    pub beta: f64,
    pub gamma_: f64,
}

impl ExpPhi {
    pub fn new(a: f64, beta: f64, gamma_: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("beta", beta), ("gamma", gamma_)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("exp: {name} must be positive, got {v}")));
            }
        }
        Ok(ExpPhi { a, beta, gamma_ })
    }
}

impl PhiMeasure for ExpPhi {
    fn mellin(&self, s: ComplexValue) -> Result<ComplexValue> {
        let (a, b, g) = (self.a, self.beta, self.gamma_);
        if !(s.re > -b) {
            return Err(strip_error(s, -b, f64::INFINITY));
        }
        let v = -s / g * a.ln() + ln_gamma((s + b) / g)? - ln_gamma_real(b / g)?;
        Ok(v.exp())
    }

    fn log_moment(&self) -> Result<f64> {
        Ok((digamma(self.beta / self.gamma_)? - self.a.ln()) / self.gamma_)
    }

    fn kappa0(&self) -> f64 {
        f64::INFINITY
    }

    fn ln_density(&self, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(f64::NEG_INFINITY);
        }
        let (a, b, g) = (self.a, self.beta, self.gamma_);
        let norm = g.ln() + b / g * a.ln() - ln_gamma_real(b / g).unwrap();
        Some(norm + (b - 1.0) * t.ln() - a * t.powf(g))
    }

    fn cdf(&self, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(0.0);
        }
        Some(statrs::function::gamma::gamma_lr(self.beta / self.gamma_, self.a * t.powf(self.gamma_)))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g = Gamma::new(self.beta / self.gamma_, 1.0).unwrap().sample(rng);
        (g / self.a).powf(1.0 / self.gamma_).max(f64::MIN_POSITIVE)
    }
}

/// Point mass at a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracPhi {
    pub a: f64,
}

impl DiracPhi {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Parameter(format!("dirac: a must be positive, got {a}")));
        }
        Ok(DiracPhi { a })
    }
}

impl PhiMeasure for DiracPhi {
    fn mellin(&self, s: ComplexValue) -> Result<ComplexValue> {
        Ok((s * self.a.ln()).exp())
    }

    fn log_moment(&self) -> Result<f64> {
        Ok(self.a.ln())
    }

    fn kappa0(&self) -> f64 {
        f64::INFINITY
    }

    fn ln_density(&self, _t: f64) -> Option<f64> {
        None
    }

    fn cdf(&self, t: f64) -> Option<f64> {
        Some(if t >= self.a { 1.0 } else { 0.0 })
    }

    fn sample<R: Rng + ?Sized>(&self, _rng: &mut R) -> f64 {
        self.a
    }
}

/// Density tabulated on a geometric grid, log-linear in between and with
/// power-law tails fitted on the outermost decade at each end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedPhi {
    log_t: Vec<f64>,
    log_f: Vec<f64>,
    left_exp: f64,
    right_exp: f64,
    /// cumulative mass at each grid node, starting with the left tail mass
    cum: Vec<f64>,
    source: Option<String>,
}

/// Integral of e^{c + k u} over [u0, u1].
fn exp_linear_integral(c: f64, k: f64, u0: f64, u1: f64) -> f64 {
    if k.abs() < 1e-12 {
        c.exp() * (u1 - u0)
    } else {
        (c + k * u0).exp() * (k * (u1 - u0)).exp_m1() / k
    }
}

impl TabulatedPhi {
    /// Build from positive density samples at strictly increasing points t.
    /// The samples are renormalised to a probability density.
    pub fn from_samples(t: &[f64], density: &[f64]) -> Result<Self> {
        if t.len() != density.len() || t.len() < 4 {
            return Err(Error::Parameter("table: need at least 4 (t, density) pairs of equal length".into()));
        }
        for w in t.windows(2) {
            if !(w[0] > 0.0 && w[1] > w[0]) {
                return Err(Error::Parameter("table: t must be positive and strictly increasing".into()));
            }
        }
        if let Some(d) = density.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(Error::Parameter(format!("table: densities must be positive and finite, got {d}")));
        }
        let log_t: Vec<f64> = t.iter().map(|x| x.ln()).collect();
        let log_f: Vec<f64> = density.iter().map(|x| x.ln()).collect();
        let n = log_t.len();
        let decade = 10f64.ln();
        let left_i = log_t.iter().position(|&u| u >= log_t[0] + decade).unwrap_or(n - 1).max(1);
        let right_i = log_t.iter().rposition(|&u| u <= log_t[n - 1] - decade).unwrap_or(0).min(n - 2);
        let left_exp = (log_f[left_i] - log_f[0]) / (log_t[left_i] - log_t[0]);
        let right_exp = (log_f[n - 1] - log_f[right_i]) / (log_t[n - 1] - log_t[right_i]);
        if left_exp <= -1.0 + 1e-9 {
            return Err(Error::Divergence(format!(
                "table: density ~ t^{left_exp:.6} at 0 is not integrable"
            )));
        }
        if right_exp >= -1.0 - 1e-9 {
            return Err(Error::Divergence(format!(
                "table: density ~ t^{right_exp:.6} at infinity is not integrable"
            )));
        }
        let mut cum = Vec::with_capacity(n + 1);
        // ∫_0^{t0} f0 (t/t0)^p dt
        let mut acc = (log_f[0] + log_t[0]).exp() / (left_exp + 1.0);
        cum.push(acc);
        for i in 0..n - 1 {
            let k = (log_f[i + 1] - log_f[i]) / (log_t[i + 1] - log_t[i]);
            let c = log_f[i] - k * log_t[i];
            acc += exp_linear_integral(c, k + 1.0, log_t[i], log_t[i + 1]);
            cum.push(acc);
        }
        acc += -(log_f[n - 1] + log_t[n - 1]).exp() / (right_exp + 1.0);
        cum.push(acc);
        let total = acc;
        let shift = total.ln();
        let log_f = log_f.into_iter().map(|v| v - shift).collect();
        let cum = cum.into_iter().map(|v| v / total).collect();
        Ok(TabulatedPhi { log_t, log_f, left_exp, right_exp, cum, source: None })
    }

    /// Read a two-column CSV `t,density` (an optional header line is skipped).
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut t = Vec::new();
        let mut d = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, b) = (cols.next(), cols.next());
            match (a.and_then(|s| s.parse::<f64>().ok()), b.and_then(|s| s.parse::<f64>().ok())) {
                (Some(x), Some(y)) => {
                    t.push(x);
                    d.push(y);
                }
                _ if lineno == 0 => continue,
                _ => return Err(Error::Parameter(format!("table: cannot parse line {}: {line}", lineno + 1))),
            }
        }
        let mut phi = TabulatedPhi::from_samples(&t, &d)?;
        phi.source = Some(path.display().to_string());
        Ok(phi)
    }

    /// φ(t) = f(t + 1/t)/(1+t)^{1+α}, tabulated on a grid symmetric about t = 1.
    /// The grid spans 1e-8..1e8, cut back symmetrically where f underflows.
    pub fn from_generator<F: Fn(f64) -> f64>(f: F, alpha: f64) -> Result<Self> {
        let per_decade = 1000;
        let decades = 8;
        let ln10 = 10f64.ln();
        // right half, t ≥ 1
        let mut right: Vec<(f64, f64)> = Vec::new();
        for i in 0..=decades * per_decade {
            let x = (i as f64 / per_decade as f64 * ln10).exp();
            let v = f(x + 1.0 / x) * (-(1.0 + alpha) * x.ln_1p()).exp();
            if v.is_nan() || v.is_infinite() || v < 0.0 {
                return Err(Error::Parameter(format!("generator must be positive and finite, got f({}) = {v}", x + 1.0 / x)));
            }
            if v == 0.0 {
                break;
            }
            right.push((x, v));
        }
        if right.len() < 2 * per_decade {
            return Err(Error::Parameter("generator vanishes within two decades of t = 1".into()));
        }
        // mirror with φ(1/t) = t^{1+α} φ(t), which also fixes rounding of t + 1/t
        let mut t = Vec::with_capacity(2 * right.len() - 1);
        let mut d = Vec::with_capacity(2 * right.len() - 1);
        for &(x, v) in right.iter().skip(1).rev() {
            t.push(1.0 / x);
            d.push(v * ((1.0 + alpha) * x.ln()).exp());
        }
        for &(x, v) in &right {
            t.push(x);
            d.push(v);
        }
        TabulatedPhi::from_samples(&t, &d)
    }

    pub fn tail_exponents(&self) -> (f64, f64) {
        (self.left_exp, self.right_exp)
    }

    fn segment(&self, u: f64) -> Option<usize> {
        let n = self.log_t.len();
        if u < self.log_t[0] || u > self.log_t[n - 1] {
            return None;
        }
        let i = self.log_t.partition_point(|&x| x <= u);
        Some(i.saturating_sub(1).min(n - 2))
    }

    fn slope(&self, i: usize) -> f64 {
        (self.log_f[i + 1] - self.log_f[i]) / (self.log_t[i + 1] - self.log_t[i])
    }

    /// Visit the pieces (c, k, u0, u1) with log φ(e^u) = c + k u on (u0, u1).
    fn pieces(&self) -> Vec<(f64, f64, f64, f64)> {
        let n = self.log_t.len();
        let mut out = Vec::with_capacity(n + 1);
        out.push((self.log_f[0] - self.left_exp * self.log_t[0], self.left_exp, f64::NEG_INFINITY, self.log_t[0]));
        for i in 0..n - 1 {
            let k = self.slope(i);
            out.push((self.log_f[i] - k * self.log_t[i], k, self.log_t[i], self.log_t[i + 1]));
        }
        out.push((self.log_f[n - 1] - self.right_exp * self.log_t[n - 1], self.right_exp, self.log_t[n - 1], f64::INFINITY));
        out
    }
}

impl PhiMeasure for TabulatedPhi {
    fn mellin(&self, s: ComplexValue) -> Result<ComplexValue> {
        let lo = -(self.left_exp + 1.0);
        let hi = self.kappa0();
        if !(s.re > lo && s.re < hi) {
            return Err(strip_error(s, lo, hi));
        }
        // exact integral of the interpolant: ∫ e^{c + (k+1+s)u} du per piece
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k, u0, u1) in self.pieces() {
            let m = s + k + 1.0;
            let e0 = if u0.is_finite() { (m * u0).exp() } else { Complex64::new(0.0, 0.0) };
            let e1 = if u1.is_finite() { (m * u1).exp() } else { Complex64::new(0.0, 0.0) };
            let term = if m.norm() < 1e-12 { Complex64::new(u1 - u0, 0.0) } else { (e1 - e0) / m };
            acc += term * c.exp();
        }
        Ok(acc)
    }

    fn log_moment(&self) -> Result<f64> {
        let mut acc = 0.0;
        for (c, k, u0, u1) in self.pieces() {
            let m = k + 1.0;
            // ∫ u e^{c + m u} du
            let anti = |u: f64| {
                if !u.is_finite() {
                    0.0
                } else if m.abs() < 1e-12 {
                    0.5 * u * u * c.exp()
                } else {
                    (c + m * u).exp() * (u / m - 1.0 / (m * m))
                }
            };
            acc += anti(u1) - anti(u0);
        }
        Ok(acc)
    }

    fn kappa0(&self) -> f64 {
        -self.right_exp - 1.0
    }

    fn ln_density(&self, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(f64::NEG_INFINITY);
        }
        let u = t.ln();
        let n = self.log_t.len();
        Some(match self.segment(u) {
            Some(i) => self.log_f[i] + self.slope(i) * (u - self.log_t[i]),
            None if u < self.log_t[0] => self.log_f[0] + self.left_exp * (u - self.log_t[0]),
            None => self.log_f[n - 1] + self.right_exp * (u - self.log_t[n - 1]),
        })
    }

    fn cdf(&self, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(0.0);
        }
        let u = t.ln();
        let pieces = self.pieces();
        let mut below = 0.0;
        for (idx, (c, k, u0, u1)) in pieces.iter().copied().enumerate() {
            if u >= u1 {
                below = self.cum[idx];
                continue;
            }
            let part = if u0.is_finite() {
                exp_linear_integral(c, k + 1.0, u0, u)
            } else {
                (c + (k + 1.0) * u).exp() / (k + 1.0)
            };
            return Some((below + part).min(1.0));
        }
        Some(1.0)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p: f64 = rng.random();
        let pieces = self.pieces();
        let idx = self.cum.partition_point(|&c| c < p).min(pieces.len() - 1);
        let below = if idx == 0 { 0.0 } else { self.cum[idx - 1] };
        let (c, k, u0, u1) = pieces[idx];
        let m = k + 1.0;
        let r = p - below;
        // solve ∫_{u0}^{u} e^{c+m v} dv = r
        let u = if !u0.is_finite() {
            ((r * m).ln() - c) / m
        } else if m.abs() < 1e-12 {
            u0 + r / c.exp()
        } else {
            let base = (c + m * u0).exp();
            let arg = 1.0 + r * m / base;
            if arg <= 0.0 { u1 } else { u0 + arg.ln() / m }
        };
        u.exp().clamp(f64::MIN_POSITIVE, f64::MAX)
    }
}

/// Any of the supported return measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Phi {
    Poly(PolyPhi),
    Exp(ExpPhi),
    Dirac(DiracPhi),
    Table(TabulatedPhi),
}

impl Phi {
    pub fn poly(beta: f64, gamma_: f64) -> Result<Self> {
        Ok(Phi::Poly(PolyPhi::new(beta, gamma_)?))
    }
    pub fn exp(a: f64, beta: f64, gamma_: f64) -> Result<Self> {
        Ok(Phi::Exp(ExpPhi::new(a, beta, gamma_)?))
    }
    pub fn dirac(a: f64) -> Result<Self> {
        Ok(Phi::Dirac(DiracPhi::new(a)?))
    }
    pub fn atom(&self) -> Option<f64> {
        match self {
            Phi::Dirac(d) => Some(d.a),
            _ => None,
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            Phi::Poly($p) => $e,
            Phi::Exp($p) => $e,
            Phi::Dirac($p) => $e,
            Phi::Table($p) => $e,
        }
    };
}

impl PhiMeasure for Phi {
    fn mellin(&self, s: ComplexValue) -> Result<ComplexValue> {
        dispatch!(self, p => p.mellin(s))
    }
    fn log_moment(&self) -> Result<f64> {
        dispatch!(self, p => p.log_moment())
    }
    fn has_finite_abs_log_moment(&self) -> bool {
        dispatch!(self, p => p.has_finite_abs_log_moment())
    }
    fn kappa0(&self) -> f64 {
        dispatch!(self, p => p.kappa0())
    }
    fn ln_density(&self, t: f64) -> Option<f64> {
        dispatch!(self, p => p.ln_density(t))
    }
    fn cdf(&self, t: f64) -> Option<f64> {
        dispatch!(self, p => p.cdf(t))
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        dispatch!(self, p => p.sample(rng))
    }
}

impl fmt::Display for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::Poly(p) => write!(f, "poly:beta={},gamma={}", p.beta, p.gamma_),
            Phi::Exp(p) => write!(f, "exp:a={},beta={},gamma={}", p.a, p.beta, p.gamma_),
            Phi::Dirac(p) => write!(f, "dirac:a={}", p.a),
            Phi::Table(t) => match &t.source {
                Some(s) => write!(f, "table:path={s}"),
                None => write!(f, "table:inline"),
            },
        }
    }
}

/// Parse `key=value` pairs; values are plain numbers.
pub(crate) fn parse_kv(body: &str) -> Result<Vec<(String, String)>> {
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("expected key=value, got '{kv}'")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

impl FromStr for Phi {
    type Err = Error;

    /// `poly:beta=..,gamma=..`, `exp:a=..,beta=..,gamma=..`, `dirac:a=..`, `table:path=FILE`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("phi descriptor '{s}' lacks a family prefix")))?;
        let kv = parse_kv(body)?;
        let get = |name: &str| -> Result<f64> {
            let raw = kv
                .iter()
                .find(|(k, _)| k == name)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Parameter(format!("phi '{family}' needs '{name}'")))?;
            raw.parse::<f64>()
                .map_err(|_| Error::Parameter(format!("cannot parse {name}={raw}")))
        };
        match family.trim() {
            "poly" => Phi::poly(get("beta")?, get("gamma")?),
            "exp" => Phi::exp(get("a")?, get("beta")?, get("gamma")?),
            "dirac" => Phi::dirac(get("a")?),
            "table" => {
                let path = kv
                    .iter()
                    .find(|(k, _)| k == "path")
                    .map(|(_, v)| v.clone())
                    .ok_or_else(|| Error::Parameter("table needs path=FILE".into()))?;
                Ok(Phi::Table(TabulatedPhi::from_csv(Path::new(&path))?))
            }
            other => Err(Error::Parameter(format!("unknown phi family '{other}'"))),
        }
    }
}

/// Outcome of the density-level symmetry test φ(1/t) = t^{1+α} φ(t).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymmetryVerdict {
    pub symmetric: bool,
    pub residual: f64,
    pub worst_t: f64,
}

pub const SYMMETRY_TOL: f64 = 1e-8;

/// sup over t ∈ [1e-4, 1e4] of |φ(1/t) − t^{1+α}φ(t)| / (φ(1/t) + t^{1+α}φ(t)).
pub fn symmetry_residual(phi: &Phi, alpha: f64) -> (f64, f64) {
    if let Some(a) = phi.atom() {
        // δ_a maps to δ_{1/a}; relative mismatch of the atoms
        let r = ((a.ln()).abs() / 2.0).tanh();
        return (r, a);
    }
    let n = 801;
    let mut worst = (0.0, 1.0);
    for i in 0..n {
        let u = (-4.0 + 8.0 * i as f64 / (n - 1) as f64) * 10f64.ln();
        let t = u.exp();
        let l1 = phi.ln_density(1.0 / t).unwrap();
        let l2 = (1.0 + alpha) * u + phi.ln_density(t).unwrap();
        let r = if l1 == f64::NEG_INFINITY && l2 == f64::NEG_INFINITY { 0.0 } else { ((l1 - l2).abs() / 2.0).tanh() };
        if r > worst.0 {
            worst = (r, t);
        }
    }
    worst
}

pub fn is_symmetric(phi: &Phi, alpha: f64) -> SymmetryVerdict {
    let (residual, worst_t) = symmetry_residual(phi, alpha);
    let symmetric = match phi {
        Phi::Poly(p) => (p.gamma_ - (alpha + 2.0 * p.beta - 1.0)).abs() <= 1e-12 * p.gamma_.max(1.0),
        Phi::Dirac(d) => d.a == 1.0,
        _ => residual <= SYMMETRY_TOL,
    };
    SymmetryVerdict { symmetric, residual, worst_t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOpts};
    use crate::stats::ks_statistic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn families() -> Vec<Phi> {
        vec![
            Phi::poly(0.5, 1.0).unwrap(),
            Phi::poly(1.0, 1.5).unwrap(),
            Phi::exp(1.0, 2.0, 1.0).unwrap(),
            Phi::exp(2.0, 1.0, 0.5).unwrap(),
            Phi::dirac(2.0).unwrap(),
        ]
    }

    #[test]
    fn mellin_at_zero_is_one() {
        for phi in families() {
            let m = phi.mellin(c(0.0)).unwrap();
            assert!((m - 1.0).norm() < 1e-13, "{phi}");
        }
    }

    #[test]
    fn mellin_closed_forms() {
        let p = PolyPhi::new(1.0, 1.5).unwrap();
        let f = |u: f64| u.powf(0.3) * p.density(u).unwrap();
        let q = integrate(f, 0.0, f64::INFINITY, QuadOpts::new(1e-12, 1e-11)).unwrap().value;
        assert!((p.mellin(c(0.3)).unwrap().re - q).abs() < 1e-9);
        let d = DiracPhi::new(3.0).unwrap();
        let v = d.mellin(Complex64::new(0.0, 1.3)).unwrap();
        assert!((v - Complex64::new(0.0, 1.3 * 3f64.ln()).exp()).norm() < 1e-15);
        assert!(matches!(p.mellin(c(0.5)), Err(Error::Divergence(_))));
    }

    #[test]
    fn mellin_on_imaginary_axis_matches_quadrature() {
        let p = PolyPhi::new(0.7, 1.9).unwrap();
        for k in 0..=8 {
            let theta = -10.0 + 2.5 * k as f64;
            // substitute t = e^v
            let re = integrate(
                |v: f64| (theta * v).cos() * p.density(v.exp()).unwrap() * v.exp(),
                f64::NEG_INFINITY,
                f64::INFINITY,
                QuadOpts::new(1e-12, 1e-11),
            )
            .unwrap()
            .value;
            let im = integrate(
                |v: f64| (theta * v).sin() * p.density(v.exp()).unwrap() * v.exp(),
                f64::NEG_INFINITY,
                f64::INFINITY,
                QuadOpts::new(1e-12, 1e-11),
            )
            .unwrap()
            .value;
            let m = p.mellin(Complex64::new(0.0, theta)).unwrap();
            assert!((m - Complex64::new(re, im)).norm() < 1e-8, "theta={theta}");
        }
    }

    #[test]
    fn log_moments() {
        let t = PolyPhi::trace(1.0, 0.5).unwrap();
        assert!(t.log_moment().unwrap().abs() < 1e-15);
        let e = ExpPhi::new(1.0, 0.8, 1.0).unwrap();
        assert!((e.log_moment().unwrap() - digamma(0.8).unwrap()).abs() < 1e-15);
        let d = DiracPhi::new(std::f64::consts::E).unwrap();
        assert!((d.log_moment().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kappa0_values() {
        assert!((PolyPhi::new(1.0, 1.5).unwrap().kappa0() - 0.5).abs() < 1e-15);
        assert!(ExpPhi::new(1.0, 2.0, 1.0).unwrap().kappa0().is_infinite());
        assert!(DiracPhi::new(3.0).unwrap().kappa0().is_infinite());
    }

    #[test]
    fn mellin_log_convex_in_real_argument() {
        for phi in [Phi::poly(0.8, 2.5).unwrap(), Phi::exp(1.5, 0.7, 2.0).unwrap()] {
            let k0 = phi.kappa0().min(3.0);
            for i in 1..8 {
                let s = k0 * i as f64 / 9.0;
                let h = k0 / 20.0;
                let l = |x: f64| phi.mellin_real(x).unwrap().ln();
                assert!(l(s - h) + l(s + h) - 2.0 * l(s) >= -1e-12);
            }
        }
    }

    #[test]
    fn poly_sampler_ks() {
        let p = PolyPhi::new(0.5, 1.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| p.sample(&mut rng)).collect();
        let d = ks_statistic(&xs, |t| p.cdf(t).unwrap());
        assert!(d < 1.63 / (n as f64).sqrt(), "KS {d}");
    }

    #[test]
    fn exp_sampler_chi_square() {
        let e = ExpPhi::new(2.0, 1.5, 0.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| e.sample(&mut rng)).collect();
        // equiprobable bins from the density by quadrature
        let bins = 20;
        let mut edges = vec![0.0];
        for k in 1..bins {
            let target = k as f64 / bins as f64;
            let x = crate::roots::find_root(
                |t| {
                    integrate(|s| e.density(s).unwrap(), 0.0, t, QuadOpts::new(1e-13, 1e-11)).unwrap().value - target
                },
                1e-12,
                1e3,
            )
            .unwrap();
            edges.push(x);
        }
        edges.push(f64::INFINITY);
        let stat = crate::stats::chi_square_equiprobable(&xs, &edges);
        assert!(stat < crate::stats::chi_square_critical_1pct(bins - 1), "chi2 {stat}");
    }

    #[test]
    fn dirac_sampler_constant() {
        let d = DiracPhi::new(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| d.sample(&mut rng) == 2.0));
    }

    #[test]
    fn sampled_log_mean_matches_log_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for phi in families() {
            let n = 100_000;
            let logs: Vec<f64> = (0..n).map(|_| phi.sample(&mut rng).ln()).collect();
            let (m, se) = crate::stats::mean_and_se(&logs);
            let lm = phi.log_moment().unwrap();
            assert!((m - lm).abs() <= 4.0 * se.max(1e-12), "{phi}: {m} vs {lm} (se {se})");
        }
    }

    #[test]
    fn symmetry_examples() {
        for alpha in [0.5, 1.5] {
            let v = is_symmetric(&Phi::poly(1.0, 1.0 + alpha).unwrap(), alpha);
            assert!(v.symmetric && v.residual < 1e-12);
            let e = is_symmetric(&Phi::exp(1.0, 2.0, 1.0).unwrap(), alpha);
            assert!(!e.symmetric && e.residual > 0.1);
        }
        assert!(is_symmetric(&Phi::dirac(1.0).unwrap(), 0.7).symmetric);
        assert!(!is_symmetric(&Phi::dirac(2.0).unwrap(), 0.7).symmetric);
        let asym = is_symmetric(&Phi::poly(1.0, 1.2).unwrap(), 0.5);
        assert!(!asym.symmetric && asym.residual > 1e-3);
    }

    #[test]
    fn generator_constant_reproduces_poly() {
        let t = TabulatedPhi::from_generator(|_| 1.0, 1.0).unwrap();
        let p = PolyPhi::new(1.0, 2.0).unwrap();
        for x in [1e-3, 0.1, 0.7, 1.0, 3.0, 50.0, 1e4] {
            let r = t.density(x).unwrap() / p.density(x).unwrap();
            assert!((r - 1.0).abs() < 1e-6, "t={x}: ratio {r}");
        }
        let phi = Phi::Table(t);
        assert!(is_symmetric(&phi, 1.0).symmetric);
        assert!((phi.mellin(c(0.0)).unwrap().re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn generator_outputs_are_symmetric() {
        for (alpha, f) in [(0.6, (|s: f64| 1.0 / s) as fn(f64) -> f64), (1.4, |s: f64| (-s).exp()), (1.0, |s: f64| s.powf(-2.5))] {
            let t = Phi::Table(TabulatedPhi::from_generator(f, alpha).unwrap());
            let v = is_symmetric(&t, alpha);
            assert!(v.symmetric, "alpha={alpha}: residual {}", v.residual);
        }
    }

    #[test]
    fn generator_identity_is_not_normalizable() {
        // f(s) = s gives φ(t) ~ 1/t at zero
        let r = TabulatedPhi::from_generator(|s| s, 1.0);
        assert!(matches!(r, Err(Error::Divergence(_))));
    }

    #[test]
    fn table_interpolates_and_samples() {
        let p = PolyPhi::new(0.6, 1.8).unwrap();
        let ts: Vec<f64> = (0..=480).map(|i| 10f64.powf(-6.0 + i as f64 / 40.0)).collect();
        let ds: Vec<f64> = ts.iter().map(|&t| p.density(t).unwrap()).collect();
        let tab = TabulatedPhi::from_samples(&ts, &ds).unwrap();
        assert!((tab.kappa0() - p.kappa0()).abs() < 1e-3);
        assert!((tab.log_moment().unwrap() - p.log_moment().unwrap()).abs() < 1e-3);
        let m = tab.mellin(Complex64::new(0.2, 1.0)).unwrap();
        assert!((m - p.mellin(Complex64::new(0.2, 1.0)).unwrap()).norm() < 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..50_000).map(|_| tab.sample(&mut rng)).collect();
        let d = ks_statistic(&xs, |t| tab.cdf(t).unwrap());
        assert!(d < 1.63 / (xs.len() as f64).sqrt());
        assert!((tab.cdf(1e9).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn descriptor_round_trip() {
        for s in ["poly:beta=0.5,gamma=1", "exp:a=1,beta=2,gamma=1", "dirac:a=1"] {
            let phi: Phi = s.parse().unwrap();
            let again: Phi = phi.to_string().parse().unwrap();
            assert_eq!(phi, again);
        }
        assert!("poly:beta=2,gamma=1".parse::<Phi>().is_err());
        assert!("wat:a=1".parse::<Phi>().is_err());
    }

    #[test]
    fn table_from_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("phi.csv");
        let p = PolyPhi::new(1.0, 2.0).unwrap();
        let mut text = String::from("t,density\n");
        for i in 0..=8000 {
            let t = 10f64.powf(-4.0 + i as f64 / 1000.0);
            text.push_str(&format!("{t},{}\n", p.density(t).unwrap()));
        }
        std::fs::write(&path, text).unwrap();
        let phi: Phi = format!("table:path={}", path.display()).parse().unwrap();
        assert!(phi.to_string().starts_with("table:path="));
        assert!((phi.density(1.0).unwrap() - 0.25).abs() < 1e-6);
    }
}
