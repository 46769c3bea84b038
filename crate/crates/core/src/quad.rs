//! Adaptive Gauss–Kronrod (10/21) quadrature on finite and infinite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_808_418_018_917,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct QuadOpts {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

impl QuadOpts {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOpts { abs_tol, rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    if !kronrod.is_finite() {
        return Err(Error::Numeric(format!("quadrature: non-finite integrand on [{a}, {b}]")));
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let asc = asc * half.abs();
    let value = kronrod * half;
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    Ok((value, err))
}

/// Adaptive integration over a finite interval.
pub fn integrate_finite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOpts) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_err: 0.0, intervals: 0 });
    }
    let (v, e) = gk21(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Numeric(format!(
                "quadrature on [{a}, {b}] did not converge: estimate {total:e}, error {total_err:e}, tolerance {tol:e}"
            )));
        }
        let seg = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // interval exhausted at machine precision; accept what we have
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk21(&mut f, seg.a, mid)?;
        let (v2, e2) = gk21(&mut f, mid, seg.b)?;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, err: e2 });
    }
    // re-sum to shed accumulated update error
    let mut value = 0.0;
    let mut abs_err = 0.0;
    let intervals = heap.len();
    for s in heap {
        value += s.value;
        abs_err += s.err;
    }
    Ok(QuadResult { value, abs_err, intervals })
}

/// Adaptive integration over [a, b] where either end may be infinite.
/// Half-lines are mapped to (0, 1] through x = a + (1 - t)/t.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOpts) -> Result<QuadResult> {
    integrate_dyn(&mut f, a, b, opts)
}

fn integrate_dyn(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, opts: QuadOpts) -> Result<QuadResult> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::Domain("quadrature: NaN bound".into()));
    }
    if a > b {
        let r = integrate_dyn(f, b, a, opts)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate_finite(f, a, b, opts),
        (true, false) => integrate_finite(
            |t| {
                let x = a + (1.0 - t) / t;
                let v = f(x);
                // 0·∞ from under/overflow at extreme abscissae
                if v == 0.0 || v.is_nan() { 0.0 } else { v / (t * t) }
            },
            0.0,
            1.0,
            opts,
        ),
        (false, true) => integrate_finite(
            |t| {
                let x = b - (1.0 - t) / t;
                let v = f(x);
                // 0·∞ from under/overflow at extreme abscissae
                if v == 0.0 || v.is_nan() { 0.0 } else { v / (t * t) }
            },
            0.0,
            1.0,
            opts,
        ),
        (false, false) => {
            let l = integrate_dyn(f, f64::NEG_INFINITY, 0.0, opts)?;
            let r = integrate_dyn(f, 0.0, f64::INFINITY, opts)?;
            Ok(QuadResult { value: l.value + r.value, abs_err: l.abs_err + r.abs_err, intervals: l.intervals + r.intervals })
        }
    }
}

/// Integrate across consecutive breakpoints (ends may be infinite), summing the pieces.
pub fn integrate_line<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], opts: QuadOpts) -> Result<QuadResult> {
    let mut acc = QuadResult { value: 0.0, abs_err: 0.0, intervals: 0 };
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let r = integrate(&mut f, w[0], w[1], opts)?;
        acc.value += r.value;
        acc.abs_err += r.abs_err;
        acc.intervals += r.intervals;
    }
    Ok(acc)
}

/// Complex-valued integrand, integrated component-wise.
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(mut f: F, points: &[f64], opts: QuadOpts) -> Result<Complex64> {
    let re = integrate_line(|x| f(x).re, points, opts)?.value;
    let im = integrate_line(|x| f(x).im, points, opts)?.value;
    Ok(Complex64::new(re, im))
}

/// Convenience: value only.
pub fn quad<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOpts) -> Result<f64> {
    Ok(integrate(f, a, b, opts)?.value)
}
