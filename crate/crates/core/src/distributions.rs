//! Scalar sampling primitives: uniform points on real and complex spheres,
//! beta and `f_{s,t}` variables, tilted sphere coordinates and cosine-power
//! angles.
//!
//! Every sampler is a pure function of its parameters and the [`RngStream`]
//! state, so replaying a stream replays the draws bit for bit.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::{Error, Result, RngStream};

/// Smallest admissible distance of `Re δ` above `-1/2`.
pub const DELTA_MARGIN: f64 = 1e-9;

pub fn sample_complex_sphere(dim: usize, rng: &mut RngStream) -> Result<Vec<Complex64>> {
    if dim == 0 {
        return Err(Error::Domain("sphere dimension must be at least 1"));
    }
    Ok(complex_sphere(dim, 1.0, rng))
}

// Uniform on the complex sphere of the given radius; dim >= 1.
pub(crate) fn complex_sphere(dim: usize, radius: f64, rng: &mut RngStream) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            let f = radius / norm;
            return v.into_iter().map(|z| z * f).collect();
        }
    }
}

pub fn sample_real_sphere(dim: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(Error::Domain("sphere dimension must be at least 1"));
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return Ok(v.into_iter().map(|x| x / norm).collect());
        }
    }
}

fn gamma(shape: f64, rng: &mut RngStream) -> f64 {
    // Shapes are validated by callers.
    Gamma::new(shape, 1.0).expect("positive gamma shape").sample(rng)
}

/// Independent `(Γ_a, Γ_b)` draws, both strictly positive, so that
/// `Γ_a/(Γ_a+Γ_b)` and `Γ_b/(Γ_a+Γ_b)` are `B_{a,b}` and `1 − B_{a,b}`
/// without cancellation.
pub(crate) fn gamma_pair(a: f64, b: f64, rng: &mut RngStream) -> (f64, f64) {
    loop {
        let x = gamma(a, rng);
        let y = gamma(b, rng);
        if x > 0.0 && y > 0.0 {
            return (x, y);
        }
    }
}

/// Beta variable `B_{a,b}`; `b = 0` is the degenerate law `B_{a,0} ≡ 1`.
pub fn sample_beta(a: f64, b: f64, rng: &mut RngStream) -> Result<f64> {
    if !(a > 0.0) || !(b >= 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain("beta shapes need a > 0 and b >= 0"));
    }
    Ok(beta_unchecked(a, b, rng))
}

pub(crate) fn beta_unchecked(a: f64, b: f64, rng: &mut RngStream) -> f64 {
    if b == 0.0 {
        return 1.0;
    }
    loop {
        let x = gamma(a, rng);
        let y = gamma(b, rng);
        let t = x / (x + y);
        if t > 0.0 && t < 1.0 {
            return t;
        }
    }
}

/// `B_{1,b}` by inversion of its CDF `1 − (1 − t)^b`.
pub fn sample_beta_one(b: f64, rng: &mut RngStream) -> f64 {
    if b == 0.0 {
        return 1.0;
    }
    loop {
        let t = -(rng.open01().ln() / b).exp_m1();
        if t > 0.0 && t < 1.0 {
            return t;
        }
    }
}

/// Variable on (-1, 1) with density `f_{s,t}(x) ∝ (1−x)^{s−1}(1+x)^{t−1}`.
pub fn sample_fst(s: f64, t: f64, rng: &mut RngStream) -> Result<f64> {
    if !(s > 0.0 && t > 0.0) {
        return Err(Error::Domain("f_{s,t} shapes must be positive"));
    }
    Ok(fst_unchecked(s, t, rng))
}

pub(crate) fn fst_unchecked(s: f64, t: f64, rng: &mut RngStream) -> f64 {
    1.0 - 2.0 * beta_unchecked(s, t, rng)
}

/// Law of a sphere coordinate `x = e^{iθ}√B_{1,λ}` reweighted by
/// `(1−x)^{δ̄}(1−x̄)^{δ}`.
///
/// `lambda = 0` puts the base law on the unit circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TiltedLaw {
    lambda: f64,
    delta: Complex64,
}

impl TiltedLaw {
    pub fn new(lambda: f64, delta: Complex64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain("tilted law needs lambda >= 0"));
        }
        if !(delta.re > -0.5 + DELTA_MARGIN) || !delta.im.is_finite() {
            return Err(Error::Domain("tilted law needs Re(delta) > -1/2"));
        }
        Ok(Self { lambda, delta })
    }

    pub fn untilted(lambda: f64) -> Result<Self> {
        Self::new(lambda, Complex64::new(0.0, 0.0))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta(&self) -> Complex64 {
        self.delta
    }

    /// Sampling weight `(1−x)^{δ̄}(1−x̄)^{δ} = |1−x|^{2Re δ} e^{2 Im δ · arg(1−x)}`.
    pub fn weight(&self, x: Complex64) -> f64 {
        let w = Complex64::new(1.0, 0.0) - x;
        w.norm().powf(2.0 * self.delta.re) * (2.0 * self.delta.im * w.arg()).exp()
    }

    /// Draw from the untilted base law.
    pub fn sample_base(&self, rng: &mut RngStream) -> Complex64 {
        let r = sample_beta_one(self.lambda, rng).sqrt();
        Complex64::from_polar(r, rng.angle())
    }

    /// Rejection against the base law; needs `Re δ ≥ 0` so the weight is
    /// bounded by `4^{Re δ} e^{π|Im δ|}`.
    pub fn sample_by_rejection(&self, rng: &mut RngStream) -> Result<Complex64> {
        if self.delta.re < 0.0 {
            return Err(Error::Domain("rejection route needs Re(delta) >= 0"));
        }
        let bound = 4f64.powf(self.delta.re) * (PI * self.delta.im.abs()).exp();
        loop {
            let x = self.sample_base(rng);
            if rng.open01() * bound < self.weight(x) {
                return Ok(x);
            }
        }
    }

    /// Angle-times-beta representation:
    /// `1 − Y = 2cosφ e^{iφ} B_{λ+1+δ+δ̄, λ}` with `φ` from the cosine-power law
    /// with `z = λ + δ`.
    pub fn sample_by_angle_beta(&self, rng: &mut RngStream) -> Complex64 {
        let phi = cospower_unchecked(self.lambda + self.delta.re, self.delta.im, rng);
        let radial = beta_unchecked(self.lambda + 1.0 + 2.0 * self.delta.re, self.lambda, rng);
        Complex64::new(1.0, 0.0) - Complex64::from_polar(2.0 * phi.cos() * radial, phi)
    }

    /// `log(1 − Y)` on the principal branch, from the angle-times-beta
    /// parts: `log(2cosφ) + log B + iφ`. Nothing cancels, so this stays
    /// accurate when `1 − Y` is tiny.
    pub fn sample_log_one_minus(&self, rng: &mut RngStream) -> Complex64 {
        let phi = cospower_unchecked(self.lambda + self.delta.re, self.delta.im, rng);
        let ln_radial = if self.lambda == 0.0 {
            0.0
        } else {
            let (x, y) = gamma_pair(self.lambda + 1.0 + 2.0 * self.delta.re, self.lambda, rng);
            x.ln() - (x + y).ln()
        };
        Complex64::new((2.0 * phi.cos()).ln() + ln_radial, phi)
    }

    pub fn sample(&self, rng: &mut RngStream) -> Complex64 {
        if self.delta.re == 0.0 && self.delta.im == 0.0 {
            self.sample_base(rng)
        } else if self.delta.im == 0.0 && self.delta.re > 0.0 {
            self.sample_by_rejection(rng).expect("Re(delta) > 0")
        } else {
            self.sample_by_angle_beta(rng)
        }
    }
}

pub fn sample_tilted_coord(law: &TiltedLaw, rng: &mut RngStream) -> Complex64 {
    law.sample(rng)
}

/// Angle on (−π/2, π/2) with density proportional to
/// `(1+e^{2iφ})^{z̄}(1+e^{−2iφ})^{z} = (2cosφ)^{2m} e^{2dφ}`, `z = m + i d`.
pub fn sample_cospower_angle(m: f64, d: f64, rng: &mut RngStream) -> Result<f64> {
    if !(m > -0.5) || !d.is_finite() {
        return Err(Error::Domain("cosine-power angle needs m > -1/2"));
    }
    Ok(cospower_unchecked(m, d, rng))
}

fn cospower_unchecked(m: f64, d: f64, rng: &mut RngStream) -> f64 {
    // sin φ = 2 B_{m+1/2, m+1/2} − 1 for the untwisted density.
    let shape = m + 0.5;
    loop {
        let phi = (2.0 * beta_unchecked(shape, shape, rng) - 1.0).asin();
        if d == 0.0 || rng.open01() < (2.0 * d * phi - PI * d.abs()).exp() {
            return phi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    fn assert_mean(xs: &[f64], target: f64) {
        let (m, se) = mean_and_se(xs);
        assert!((m - target).abs() <= 4.0 * se, "mean {m} vs {target} (se {se})");
    }

    #[test]
    fn sphere_norms_and_errors() {
        let mut rng = RngStream::new(1, 0);
        assert!(sample_complex_sphere(0, &mut rng).is_err());
        assert!(sample_real_sphere(0, &mut rng).is_err());
        for dim in 1..8 {
            let v = sample_complex_sphere(dim, &mut rng).unwrap();
            let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
            let r = sample_real_sphere(dim, &mut rng).unwrap();
            let n: f64 = r.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        let z = sample_complex_sphere(1, &mut rng).unwrap()[0];
        assert!((z.norm() - 1.0).abs() < 1e-12);
        let x = sample_real_sphere(1, &mut rng).unwrap()[0];
        assert!(x == 1.0 || x == -1.0);
    }

    #[test]
    fn complex_sphere_first_coordinate_mean() {
        let mut rng = RngStream::new(2, 0);
        let xs: Vec<f64> =
            (0..100_000).map(|_| sample_complex_sphere(4, &mut rng).unwrap()[0].norm_sqr()).collect();
        assert_mean(&xs, 0.25);
    }

    #[test]
    fn real_sphere_first_coordinate_centered() {
        let mut rng = RngStream::new(3, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| sample_real_sphere(3, &mut rng).unwrap()[0]).collect();
        assert_mean(&xs, 0.0);
    }

    #[test]
    fn beta_conventions_and_errors() {
        let mut rng = RngStream::new(4, 0);
        assert_eq!(sample_beta(1.0, 0.0, &mut rng).unwrap(), 1.0);
        assert!(sample_beta(0.0, 1.0, &mut rng).is_err());
        assert!(sample_beta(1.0, -0.1, &mut rng).is_err());
        let xs: Vec<f64> = (0..100_000).map(|_| sample_beta(1.0, 1.0, &mut rng).unwrap()).collect();
        assert!(xs.iter().all(|&x| x > 0.0 && x < 1.0));
        assert_mean(&xs, 0.5);
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert_mean(&sq, 1.0 / 3.0);
    }

    #[test]
    fn beta_one_mean() {
        let mut rng = RngStream::new(5, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| sample_beta_one(3.0, &mut rng)).collect();
        assert_mean(&xs, 0.25);
        assert_eq!(sample_beta_one(0.0, &mut rng), 1.0);
    }

    #[test]
    fn fst_moments() {
        let mut rng = RngStream::new(6, 0);
        assert!(sample_fst(0.0, 1.0, &mut rng).is_err());
        let sym: Vec<f64> = (0..100_000).map(|_| sample_fst(2.5, 2.5, &mut rng).unwrap()).collect();
        assert_mean(&sym, 0.0);
        let xs: Vec<f64> = (0..100_000).map(|_| sample_fst(1.0, 3.0, &mut rng).unwrap()).collect();
        assert_mean(&xs, 0.5);
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert_mean(&sq, 0.4);
    }

    #[test]
    fn tilted_law_validation() {
        assert!(TiltedLaw::new(-1.0, Complex64::new(0.0, 0.0)).is_err());
        assert!(TiltedLaw::new(1.0, Complex64::new(-0.5, 0.0)).is_err());
        assert!(TiltedLaw::new(1.0, Complex64::new(-0.5 + 1e-10, 0.0)).is_err());
        assert!(TiltedLaw::new(1.0, Complex64::new(-0.4, 0.0)).is_ok());
        let neg = TiltedLaw::new(1.0, Complex64::new(-0.25, 0.0)).unwrap();
        assert!(neg.sample_by_rejection(&mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn tilted_weight_is_real_positive() {
        let law = TiltedLaw::new(2.0, Complex64::new(0.7, -1.3)).unwrap();
        let mut rng = RngStream::new(8, 0);
        for _ in 0..1000 {
            let x = law.sample_base(&mut rng);
            let one = Complex64::new(1.0, 0.0);
            let direct = (one - x).powc(law.delta.conj()) * (one - x.conj()).powc(law.delta);
            let w = law.weight(x);
            assert!(w > 0.0);
            assert!((direct - w).norm() < 1e-10 * w.max(1.0));
        }
    }

    #[test]
    fn tilted_second_moment_lambda_one() {
        // E|1−Y|² = E|1−x|⁴ / E|1−x|² = (10/3)/(3/2)
        let law = TiltedLaw::new(1.0, Complex64::new(1.0, 0.0)).unwrap();
        let mut rng = RngStream::new(9, 0);
        let one = Complex64::new(1.0, 0.0);
        let xs: Vec<f64> = (0..100_000).map(|_| (one - law.sample(&mut rng)).norm_sqr()).collect();
        assert_mean(&xs, 20.0 / 9.0);
        let ys: Vec<f64> =
            (0..100_000).map(|_| (one - law.sample_by_angle_beta(&mut rng)).norm_sqr()).collect();
        assert_mean(&ys, 20.0 / 9.0);
    }

    #[test]
    fn tilted_circle_cosine_mean() {
        // density of arg Y ∝ 2 − 2cosθ gives E cos(arg Y) = −1/2
        let law = TiltedLaw::new(0.0, Complex64::new(1.0, 0.0)).unwrap();
        let mut rng = RngStream::new(10, 0);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| {
                let y = law.sample(&mut rng);
                assert!((y.norm() - 1.0).abs() < 1e-12);
                y.arg().cos()
            })
            .collect();
        assert_mean(&xs, -0.5);
    }

    #[test]
    fn cospower_moments() {
        let mut rng = RngStream::new(11, 0);
        assert!(sample_cospower_angle(-0.5, 0.0, &mut rng).is_err());
        let xs: Vec<f64> = (0..100_000)
            .map(|_| {
                let phi = sample_cospower_angle(0.0, 0.0, &mut rng).unwrap();
                assert!(phi.abs() < PI / 2.0);
                4.0 * phi.cos() * phi.cos()
            })
            .collect();
        assert_mean(&xs, 2.0);
        let ys: Vec<f64> =
            (0..100_000).map(|_| (2.0 * sample_cospower_angle(1.0, 0.0, &mut rng).unwrap()).cos()).collect();
        assert_mean(&ys, 0.5);
    }

    #[test]
    fn cospower_twist_shifts_mass_toward_sign_of_d() {
        let mut rng = RngStream::new(12, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| sample_cospower_angle(1.0, 0.8, &mut rng).unwrap()).collect();
        let (m, se) = mean_and_se(&xs);
        assert!(m > 10.0 * se);
    }

    #[test]
    fn replay() {
        let law = TiltedLaw::new(3.0, Complex64::new(0.5, 0.5)).unwrap();
        let a: Vec<Complex64> = {
            let mut r = RngStream::new(42, 9);
            (0..50).map(|_| law.sample(&mut r)).collect()
        };
        let b: Vec<Complex64> = {
            let mut r = RngStream::new(42, 9);
            (0..50).map(|_| law.sample(&mut r)).collect()
        };
        assert_eq!(a, b);
    }
}
