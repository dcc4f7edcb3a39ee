//! Estimators and hypothesis tests.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::special::{kolmogorov_sf, normal_cdf};
use crate::{Error, Result};

/// Mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    pub stderr: f64,
    pub count: u64,
}

impl MomentEstimate {
    /// `|value − target| / stderr`, or `0`/`∞` when the stderr vanishes.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.value - target).abs();
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target) <= sigmas
    }
}

/// Streaming mean and variance, mergeable across chunks.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        self.m2 / (self.count - 1) as f64
    }

    pub fn estimate(&self) -> Result<MomentEstimate> {
        if self.count < 2 {
            return Err(Error::InsufficientData("a moment estimate needs at least two samples"));
        }
        Ok(MomentEstimate {
            value: self.mean,
            stderr: (self.variance() / self.count as f64).sqrt(),
            count: self.count,
        })
    }
}

/// Componentwise accumulator for complex samples.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexWelford {
    pub re: Welford,
    pub im: Welford,
}

impl ComplexWelford {
    pub fn push(&mut self, z: Complex64) {
        self.re.push(z.re);
        self.im.push(z.im);
    }

    pub fn merge(&mut self, other: &Self) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }
}

/// Sample mean with `stderr = sd/√N`.
pub fn mc_moment<I: IntoIterator<Item = f64>>(samples: I) -> Result<MomentEstimate> {
    let mut w = Welford::new();
    for x in samples {
        w.push(x);
    }
    w.estimate()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::Domain("samples contain NaN"));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Minimum sample size for [`ks_two_sample`].
pub const KS_MIN_SIZE: usize = 50;

/// Two-sample Kolmogorov–Smirnov test. Ties are stepped through together.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<KsResult> {
    if xs.len() < KS_MIN_SIZE || ys.len() < KS_MIN_SIZE {
        return Err(Error::InsufficientData("KS two-sample test needs at least 50 points per sample"));
    }
    let a = sorted(xs)?;
    let b = sorted(ys)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    Ok(KsResult { statistic: d, p_value: kolmogorov_sf(ne.sqrt() * d) })
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> Result<KsResult> {
    if xs.len() < KS_MIN_SIZE {
        return Err(Error::InsufficientData("KS test needs at least 50 points"));
    }
    let a = sorted(xs)?;
    let n = a.len() as f64;
    let mut d = 0.0f64;
    for (k, &x) in a.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - k as f64 / n).max((k + 1) as f64 / n - f);
    }
    Ok(KsResult { statistic: d, p_value: kolmogorov_sf(n.sqrt() * d) })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalityReport {
    pub mean: MomentEstimate,
    pub variance: MomentEstimate,
    pub skewness: MomentEstimate,
    pub excess_kurtosis: MomentEstimate,
    /// KS against the normal law with the sample mean and deviation.
    pub ks: KsResult,
}

/// Moments up to order four, with large-sample standard errors, and a KS test
/// against the fitted normal.
pub fn normality_check(xs: &[f64]) -> Result<NormalityReport> {
    if xs.len() < 1000 {
        return Err(Error::InsufficientData("normality check needs at least 1000 points"));
    }
    let n = xs.len() as f64;
    let count = xs.len() as u64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let var = m2 * n / (n - 1.0);
    let sd = var.sqrt();
    let est = |value: f64, stderr: f64| MomentEstimate { value, stderr, count };
    let ks = ks_one_sample(xs, |x| normal_cdf((x - mean) / sd))?;
    Ok(NormalityReport {
        mean: est(mean, (var / n).sqrt()),
        variance: est(var, ((m4 - m2 * m2) / n).max(0.0).sqrt()),
        skewness: est(m3 / m2.powf(1.5), (6.0 / n).sqrt()),
        excess_kurtosis: est(m4 / (m2 * m2) - 3.0, (24.0 / n).sqrt()),
        ks,
    })
}

/// Least-squares slope with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(Error::Domain("fit inputs must have equal length"));
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData("a slope fit needs at least three points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("fit abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(SlopeFit { slope, intercept, stderr: (rss / (n - 2.0) / sxx).sqrt(), points: xs.len() })
}

/// Weighted least squares with weights proportional to inverse variances.
/// The slope stderr assumes the weights are exact inverse variances.
pub fn weighted_linear_fit(xs: &[f64], ys: &[f64], ws: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() || xs.len() != ws.len() {
        return Err(Error::Domain("fit inputs must have equal length"));
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData("a slope fit needs at least three points"));
    }
    let sw: f64 = ws.iter().sum();
    let mx = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(ws).map(|(x, w)| w * (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).zip(ws).map(|((x, y), w)| w * (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("fit abscissae are all equal"));
    }
    let slope = sxy / sxx;
    Ok(SlopeFit { slope, intercept: my - slope * mx, stderr: (1.0 / sxx).sqrt(), points: xs.len() })
}

/// Log-binned window for [`tail_slope`]: `decades` decades ending at the
/// `quantile`-th sample quantile, split into `bins` logarithmic bins.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailWindow {
    pub quantile: f64,
    pub decades: f64,
    pub bins: usize,
    pub max_empty_fraction: f64,
}

impl Default for TailWindow {
    fn default() -> Self {
        Self { quantile: 0.05, decades: 2.0, bins: 20, max_empty_fraction: 0.2 }
    }
}

/// Minimum sample size for [`tail_slope`].
pub const TAIL_MIN_SIZE: usize = 100_000;

/// Empirical `q`-quantile of sorted data (lower order statistic).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() as f64 * q).floor() as usize).min(sorted.len() - 1);
    sorted[idx]
}

/// Slope of log histogram density against log `ε` near zero, each bin
/// weighted by its count.
pub fn tail_slope(samples: &[f64], window: TailWindow) -> Result<SlopeFit> {
    if samples.len() < TAIL_MIN_SIZE {
        return Err(Error::InsufficientData("tail slope needs at least 1e5 samples"));
    }
    if samples.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::Domain("tail slope needs positive samples"));
    }
    let s = sorted(samples)?;
    let hi = quantile_sorted(&s, window.quantile);
    let lo = hi * 10f64.powf(-window.decades);
    let (lhi, llo) = (hi.ln(), lo.ln());
    let step = (lhi - llo) / window.bins as f64;
    let mut counts = alloc::vec![0u64; window.bins];
    let start = s.partition_point(|&x| x < lo);
    for &x in &s[start..] {
        if x >= hi {
            break;
        }
        let k = (((x.ln() - llo) / step) as usize).min(window.bins - 1);
        counts[k] += 1;
    }
    let empty = counts.iter().filter(|&&c| c == 0).count();
    if empty as f64 > window.max_empty_fraction * window.bins as f64 {
        return Err(Error::InsufficientData("too many empty bins in the tail window"));
    }
    let n = s.len() as f64;
    let (mut xs, mut ys, mut ws) = (Vec::new(), Vec::new(), Vec::new());
    for (k, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let a = (llo + k as f64 * step).exp();
        let b = (llo + (k + 1) as f64 * step).exp();
        xs.push(0.5 * (a.ln() + b.ln()));
        ys.push((c as f64 / (n * (b - a))).ln());
        // A log count has variance close to 1/count.
        ws.push(c as f64);
    }
    weighted_linear_fit(&xs, &ys, &ws)
}

/// Slope of `log h(ε)` against `log ε` where `h(ε) = E[g(ε/W)/W]` is the
/// density of `V·W` for a positive `V` with density `g`, independent of `W`.
pub fn conditional_density_slope<G: Fn(f64) -> f64>(eps: &[f64], w: &[f64], g: G) -> Result<SlopeFit> {
    if w.is_empty() {
        return Err(Error::InsufficientData("no conditioning samples"));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &e in eps {
        let h = w.iter().map(|&wi| g(e / wi) / wi).sum::<f64>() / w.len() as f64;
        if !(h > 0.0) {
            return Err(Error::InsufficientData("density estimate vanished"));
        }
        xs.push(e.ln());
        ys.push(h.ln());
    }
    linear_fit(&xs, &ys)
}

/// `count` logarithmically spaced points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1).max(1) as f64).exp()).collect()
}

/// Pearson correlation with asymptotic standard error `1/√N`.
pub fn corr(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::Domain("correlation inputs must have equal length"));
    }
    if xs.len() < 1000 {
        return Err(Error::InsufficientData("correlation needs at least 1000 pairs"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok(((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0), 1.0 / n.sqrt()))
}
