//! Derivatives of characteristic polynomials at pinned eigenvalues, by the
//! matrix route and by products of independent variables.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::distributions::{beta_unchecked, fst_unchecked, gamma_pair, TiltedLaw};
use crate::measures::EigenangleSet;
use crate::reflections::Reflection;
use crate::special::ln_gamma;
use crate::{Error, Result, RngStream};

pub fn factorial(p: usize) -> f64 {
    (1..=p).map(|k| k as f64).product()
}

/// `∏ₖ (1 − r_kk^{(k)})` for reflections with pivots `0, 1, …, m−1` in order.
pub fn det_id_minus_product(reflections: &[Reflection]) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for (position, r) in reflections.iter().enumerate() {
        if r.pivot() != position {
            return Err(Error::PivotOrder { position, found: r.pivot() });
        }
        acc *= Complex64::new(1.0, 0.0) - r.pivot_entry();
    }
    Ok(acc)
}

/// `p! ∏ (1 − e^{iθ_k})` over the angles left after deflating `p` pinned ones.
pub fn z_derivative(angles: &EigenangleSet, p: usize) -> Result<Complex64> {
    let rest = angles.deflate(p)?;
    let prod: Complex64 = rest.iter().map(|&t| Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, t)).product();
    Ok(prod * factorial(p))
}

/// `log p! + Σ log(1 − e^{iθ_k})` with principal-branch logs, so the imaginary
/// part stays in `(−(n−p)π/2, (n−p)π/2)`.
pub fn log_z(angles: &EigenangleSet, p: usize) -> Result<Complex64> {
    let rest = angles.deflate(p)?;
    let mut acc = Complex64::new(ln_gamma(p as f64 + 1.0), 0.0);
    for &t in &rest {
        let w = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, t);
        if w.norm() == 0.0 {
            return Err(Error::Singular);
        }
        acc += w.ln();
    }
    Ok(acc)
}

/// Running product that moves its modulus into a log-scale once factors get
/// small or the product leaves `[1e-300, 1e300]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductAccumulator {
    value: Complex64,
    log_scale: f64,
}

impl Default for ProductAccumulator {
    fn default() -> Self {
        Self { value: Complex64::new(1.0, 0.0), log_scale: 0.0 }
    }
}

impl ProductAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, factor: Complex64) {
        let small = factor.norm() < 1e-6;
        self.value *= factor;
        let m = self.value.norm();
        if small || !(1e-300..=1e300).contains(&m) {
            self.rescale();
        }
    }

    fn rescale(&mut self) {
        let m = self.value.norm();
        if m > 0.0 && m.is_finite() {
            self.log_scale += m.ln();
            self.value /= m;
        }
    }

    /// `log|∏|`.
    pub fn ln_modulus(&self) -> f64 {
        self.log_scale + self.value.norm().ln()
    }

    pub fn arg(&self) -> f64 {
        self.value.arg()
    }

    /// The product itself, which may underflow to zero or overflow.
    pub fn value(&self) -> Complex64 {
        self.value * self.log_scale.exp()
    }
}

fn check_unitary_p(n: usize, p: usize) -> Result<()> {
    if n == 0 || p >= n {
        return Err(Error::Domain("need n >= 1 and p < n"));
    }
    Ok(())
}

/// Tilted laws `TiltedLaw(ℓ − 1, p)` for `ℓ = 1..n−p`.
pub fn unitary_factor_laws(n: usize, p: usize) -> Result<Vec<TiltedLaw>> {
    check_unitary_p(n, p)?;
    let delta = Complex64::new(p as f64, 0.0);
    (0..n - p).map(|l| TiltedLaw::new(l as f64, delta)).collect()
}

/// `p! ∏_{ℓ=1}^{n−p} (1 − X_ℓ)` with independent `X_ℓ ∼ TiltedLaw(ℓ − 1, p)`.
pub fn sample_z_product_unitary(n: usize, p: usize, rng: &mut RngStream) -> Result<Complex64> {
    let laws = unitary_factor_laws(n, p)?;
    let mut acc = ProductAccumulator::new();
    for law in &laws {
        acc.push(Complex64::new(1.0, 0.0) - law.sample(rng));
    }
    Ok(acc.value() * factorial(p))
}

/// `log Z^{(p)}` along the product route, each factor's principal log drawn
/// directly in log form.
pub fn sample_log_z_product_unitary(laws: &[TiltedLaw], p: usize, rng: &mut RngStream) -> Complex64 {
    let mut acc = Complex64::new(ln_gamma(p as f64 + 1.0), 0.0);
    for law in laws {
        acc += law.sample_log_one_minus(rng);
    }
    acc
}

/// Shapes `(s(k), t(k))`, `k = 0..2n−2`, of independent α-coefficients with
/// densities `f_{s,t}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSchedule {
    pairs: Vec<(f64, f64)>,
}

impl AlphaSchedule {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() || pairs.len() % 2 == 0 {
            return Err(Error::Domain("schedule length must be 2n - 1"));
        }
        if pairs.iter().any(|&(s, t)| !(s > 0.0 && t > 0.0 && s.is_finite() && t.is_finite())) {
            return Err(Error::Domain("schedule shapes must be positive"));
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    /// Matrix size `n`.
    pub fn n(&self) -> usize {
        (self.pairs.len() + 1) / 2
    }
}

/// Schedule for the Jacobi ensemble with parameters `(β, a, b)`.
pub fn alpha_schedule_general(beta: f64, a: f64, b: f64, n: usize) -> Result<AlphaSchedule> {
    if !(beta > 0.0 && a > -1.0 && b > -1.0) || n == 0 {
        return Err(Error::Domain("need beta > 0, a > -1, b > -1, n >= 1"));
    }
    let pairs = (0..2 * n - 1)
        .map(|k| {
            let m = (2 * n - k) as f64;
            if k % 2 == 0 {
                let base = (m - 2.0) * beta / 4.0;
                (base + a + 1.0, base + b + 1.0)
            } else {
                ((m - 3.0) * beta / 4.0 + a + b + 2.0, (m - 1.0) * beta / 4.0)
            }
        })
        .collect();
    AlphaSchedule::new(pairs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    So,
    Usp,
}

impl Group {
    /// Jacobi edge exponents `(a, b)` for the given pinned multiplicities.
    pub fn jacobi_exponents(self, p_plus: usize, p_minus: usize) -> (f64, f64) {
        let shift = match self {
            Group::So => -0.5,
            Group::Usp => 0.5,
        };
        (2.0 * p_plus as f64 + shift, 2.0 * p_minus as f64 + shift)
    }
}

/// Schedule for `SO(2n + 2p⁺ + 2p⁻)` or `USp(2n + 2p⁺ + 2p⁻)` conditioned on
/// `2p⁺` eigenvalues at 1 and `2p⁻` at −1.
pub fn alpha_schedule_group(group: Group, n: usize, p_plus: usize, p_minus: usize) -> Result<AlphaSchedule> {
    if n == 0 {
        return Err(Error::Domain("need n >= 1"));
    }
    let pp = 2.0 * p_plus as f64;
    let pm = 2.0 * p_minus as f64;
    let pairs = (0..2 * n - 1)
        .map(|k| {
            let m = (2 * n - k) as f64;
            match (group, k % 2) {
                (Group::So, 0) => ((m - 1.0) / 2.0 + pp, (m - 1.0) / 2.0 + pm),
                (Group::So, _) => ((m - 1.0) / 2.0 + pp + pm, (m - 1.0) / 2.0),
                (Group::Usp, 0) => ((m + 1.0) / 2.0 + pp, (m + 1.0) / 2.0 + pm),
                (Group::Usp, _) => ((m + 3.0) / 2.0 + pp + pm, (m - 1.0) / 2.0),
            }
        })
        .collect();
    AlphaSchedule::new(pairs)
}

/// `(det(2Id − u), det(2Id + u))`, or in eigenvalue terms
/// `(∏(2 − x_k), ∏(2 + x_k))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativePair {
    pub z_plus: f64,
    pub z_minus: f64,
}

impl DerivativePair {
    /// The derivatives `Z^{(2p⁺)}(1) = (2p⁺)! 2^{2p⁻} z₊` and
    /// `Z^{(2p⁻)}(−1) = (2p⁻)! 2^{2p⁺} z₋`.
    pub fn unnormalized(&self, p_plus: usize, p_minus: usize) -> (f64, f64) {
        let pp = 2 * p_plus;
        let pm = 2 * p_minus;
        (
            factorial(pp) * 2f64.powi(pm as i32) * self.z_plus,
            factorial(pm) * 2f64.powi(pp as i32) * self.z_minus,
        )
    }
}

/// Independent `α_k ∼ f_{s(k),t(k)}`.
pub fn sample_alphas(schedule: &AlphaSchedule, rng: &mut RngStream) -> Vec<f64> {
    schedule.pairs().iter().map(|&(s, t)| fst_unchecked(s, t, rng)).collect()
}

/// `(2∏(1 − α_k), 2∏(1 + (−1)^k α_k))`.
pub fn det_pair_from_alphas(alphas: &[f64]) -> DerivativePair {
    let mut plus = 2.0;
    let mut minus = 2.0;
    for (k, &a) in alphas.iter().enumerate() {
        plus *= 1.0 - a;
        minus *= if k % 2 == 0 { 1.0 + a } else { 1.0 - a };
    }
    DerivativePair { z_plus: plus, z_minus: minus }
}

/// Draws `α_k ∼ f_{s(k),t(k)}` independently and returns
/// `(2∏(1 − α_k), 2∏(1 + (−1)^k α_k))`.
pub fn sample_jacobi_det_pair(schedule: &AlphaSchedule, rng: &mut RngStream) -> DerivativePair {
    let (lp, lm) = sample_log_jacobi_det_pair(schedule, rng);
    DerivativePair { z_plus: lp.exp(), z_minus: lm.exp() }
}

/// Logarithms of [`sample_jacobi_det_pair`]. With `α = 1 − 2B_{s,t}`,
/// `1 − α = 2B` and `1 + α = 2(1 − B)` are formed from the two gamma draws so
/// neither loses precision near the edges.
pub fn sample_log_jacobi_det_pair(schedule: &AlphaSchedule, rng: &mut RngStream) -> (f64, f64) {
    let ln2 = core::f64::consts::LN_2;
    let mut plus = ln2;
    let mut minus = ln2;
    for (k, &(s, t)) in schedule.pairs().iter().enumerate() {
        let (x, y) = gamma_pair(s, t, rng);
        let ln_sum = (x + y).ln();
        let one_minus = ln2 + x.ln() - ln_sum;
        let one_plus = ln2 + y.ln() - ln_sum;
        plus += one_minus;
        minus += if k % 2 == 0 { one_plus } else { one_minus };
    }
    (plus, minus)
}

/// Single eigenvalue of the Jacobi ensemble with density `∝ (2−x)^a(2+x)^b`
/// on `(−2, 2)`.
pub fn sample_jacobi_n1(a: f64, b: f64, rng: &mut RngStream) -> Result<f64> {
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::Domain("need a > -1 and b > -1"));
    }
    Ok(2.0 - 4.0 * beta_unchecked(a + 1.0, b + 1.0, rng))
}

/// Normalized pair `(∏(2 − x_k), ∏(2 + x_k))` for conditioned `SO` or `USp`.
pub fn so_usp_derivative_pair(
    group: Group,
    n: usize,
    p_plus: usize,
    p_minus: usize,
    rng: &mut RngStream,
) -> Result<DerivativePair> {
    let schedule = alpha_schedule_group(group, n, p_plus, p_minus)?;
    Ok(sample_jacobi_det_pair(&schedule, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{eigenangles, sample_conditional_haar, sample_reflections, product, UnitaryMatrix};
    use crate::linalg::CMatrix;
    use alloc::vec;
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_small_cases() {
        let mut rng = RngStream::new(1, 0);
        let rs = sample_reflections(1, 1, &mut rng).unwrap();
        assert_eq!(det_id_minus_product(&rs).unwrap(), c(1.0, 0.0) - rs[0].pivot_entry());
        let rs = sample_reflections(4, 4, &mut rng).unwrap();
        let u = product(&rs).unwrap();
        let direct = CMatrix::identity(4).sub(&u).det();
        assert!((det_id_minus_product(&rs).unwrap() - direct).norm() < 4e-9);
        let rs = sample_reflections(5, 3, &mut rng).unwrap();
        let u = product(&rs).unwrap();
        assert!(CMatrix::identity(5).sub(&u).det().norm() < 1e-9);
        let swapped = vec![rs[1].clone(), rs[0].clone()];
        assert_eq!(det_id_minus_product(&swapped), Err(Error::PivotOrder { position: 0, found: 1 }));
    }

    #[test]
    fn z_and_log_examples() {
        let a = EigenangleSet::from_angles(vec![0.0, PI, PI]);
        assert!((z_derivative(&a, 1).unwrap() - c(4.0, 0.0)).norm() < 1e-15);
        let b = EigenangleSet::from_angles(vec![PI, PI]);
        assert!((log_z(&b, 0).unwrap() - c(4f64.ln(), 0.0)).norm() < 1e-15);
        let q = EigenangleSet::from_angles(vec![PI / 2.0]);
        assert!((log_z(&q, 0).unwrap() - c(0.5 * 2f64.ln(), -PI / 4.0)).norm() < 1e-15);
        let zero = EigenangleSet::from_angles(vec![0.0]);
        assert_eq!(log_z(&zero, 0), Err(Error::Singular));
        assert!(z_derivative(&b, 1).is_err());
    }

    // Coefficients of ∏ (z − e^{iθ}), lowest degree first.
    fn expand(angles: &[f64]) -> Vec<Complex64> {
        let mut coeffs = vec![c(1.0, 0.0)];
        for &t in angles {
            let root = Complex64::from_polar(1.0, t);
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * root;
            }
            coeffs = next;
        }
        coeffs
    }

    fn derivative_at(coeffs: &[Complex64], order: usize, x: Complex64) -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for (k, &a) in coeffs.iter().enumerate().skip(order) {
            let falling: f64 = (k - order + 1..=k).map(|j| j as f64).product();
            acc += a * falling * x.powu((k - order) as u32);
        }
        acc
    }

    #[test]
    fn z_matches_polynomial_derivative() {
        let mut rng = RngStream::new(2, 0);
        for _ in 0..20 {
            let u = sample_conditional_haar(6, 2, &mut rng).unwrap();
            let a = eigenangles(&u).unwrap();
            let z = z_derivative(&a, 2).unwrap();
            let direct = derivative_at(&expand(a.angles()), 2, c(1.0, 0.0));
            assert!((z - direct).norm() <= 1e-6 * z.norm(), "{z} vs {direct}");
            let l = log_z(&a, 2).unwrap();
            assert!((l.exp() - z).norm() <= 1e-8 * z.norm());
            assert!(l.im.abs() < 4.0 * PI / 2.0);
        }
    }

    #[test]
    fn group_derivative_normalization() {
        // n = 1, p⁺ = p⁻ = 1: P(x) = (x−1)²(x+1)²(x² − 2cosθ x + 1).
        for &theta in &[0.3, 1.1, 2.7] {
            let x = 2.0 * f64::cos(theta);
            let angles = [0.0, 0.0, PI, PI, theta, -theta];
            let coeffs = expand(&angles);
            let at_one = derivative_at(&coeffs, 2, c(1.0, 0.0));
            let at_minus = derivative_at(&coeffs, 2, c(-1.0, 0.0));
            let pair = DerivativePair { z_plus: 2.0 - x, z_minus: 2.0 + x };
            let (zp, zm) = pair.unnormalized(1, 1);
            assert!((at_one - c(zp, 0.0)).norm() < 1e-10, "{at_one} vs {zp}");
            assert!((at_minus - c(zm, 0.0)).norm() < 1e-10, "{at_minus} vs {zm}");
        }
    }

    #[test]
    fn schedules() {
        let s = alpha_schedule_general(2.0, 0.0, 0.0, 2).unwrap();
        assert_eq!(s.pairs(), &[(2.0, 2.0), (2.0, 1.0), (1.0, 1.0)]);
        let s = alpha_schedule_general(1.3, 0.4, -0.2, 1).unwrap();
        assert_eq!(s.pairs(), &[(1.4, 0.8)]);
        let so = alpha_schedule_group(Group::So, 2, 0, 0).unwrap();
        assert_eq!(so.pairs(), &[(1.5, 1.5), (1.0, 1.0), (0.5, 0.5)]);
        for n in 1..=6 {
            for pp in 0..=3 {
                for pm in 0..=3 {
                    for g in [Group::So, Group::Usp] {
                        let (a, b) = g.jacobi_exponents(pp, pm);
                        let lhs = alpha_schedule_group(g, n, pp, pm).unwrap();
                        let rhs = alpha_schedule_general(2.0, a, b, n).unwrap();
                        for (x, y) in lhs.pairs().iter().zip(rhs.pairs()) {
                            assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
                        }
                    }
                }
            }
        }
        assert!(alpha_schedule_general(0.0, 0.0, 0.0, 2).is_err());
        assert!(alpha_schedule_general(2.0, -1.0, 0.0, 2).is_err());
        assert!(AlphaSchedule::new(vec![(1.0, 1.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn pair_identity_at_one_level() {
        let s = alpha_schedule_general(2.0, 1.5, -0.5, 1).unwrap();
        let mut rng = RngStream::new(3, 0);
        for _ in 0..1000 {
            let mut r2 = rng.clone();
            let (x, y) = gamma_pair(2.5, 0.5, &mut r2);
            let alpha = 1.0 - 2.0 * x / (x + y);
            let d = sample_jacobi_det_pair(&s, &mut rng);
            assert!((d.z_plus * d.z_minus - 4.0 * (1.0 - alpha * alpha)).abs() < 1e-12);
            assert!(d.z_plus > 0.0 && d.z_plus <= 4.0 && d.z_minus > 0.0 && d.z_minus <= 4.0);
        }
    }

    #[test]
    fn accumulator_survives_underflow() {
        let mut acc = ProductAccumulator::new();
        for _ in 0..400 {
            acc.push(c(0.0, 1e-3));
        }
        assert!((acc.ln_modulus() - 400.0 * 1e-3f64.ln()).abs() < 1e-9);
        assert_eq!(acc.value(), c(0.0, 0.0));
        let mut big = ProductAccumulator::new();
        for _ in 0..400 {
            big.push(c(1e3, 0.0));
        }
        assert!((big.ln_modulus() - 400.0 * 1e3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn product_route_basics() {
        let mut rng = RngStream::new(4, 0);
        let z = sample_z_product_unitary(1, 0, &mut rng).unwrap();
        assert!(((c(1.0, 0.0) - z).norm() - 1.0).abs() < 1e-12);
        assert!(sample_z_product_unitary(3, 3, &mut rng).is_err());
        let laws = unitary_factor_laws(5, 1).unwrap();
        for _ in 0..100 {
            let l = sample_log_z_product_unitary(&laws, 1, &mut rng);
            assert!(l.im.abs() < 5.0 * PI / 2.0);
            assert!(l.re < 5.0 * 2f64.ln() + 1e-12);
        }
        let alphas = [0.5, -0.25, 0.1];
        let d = det_pair_from_alphas(&alphas);
        assert!((d.z_plus - 2.0 * 0.5 * 1.25 * 0.9).abs() < 1e-15);
        assert!((d.z_minus - 2.0 * 1.5 * 1.25 * 1.1).abs() < 1e-15);
        assert!(sample_jacobi_n1(-1.0, 0.0, &mut rng).is_err());
        let x = sample_jacobi_n1(0.0, 0.0, &mut rng).unwrap();
        assert!(x > -2.0 && x < 2.0);
        let _ = UnitaryMatrix::new(CMatrix::identity(1)).unwrap();
    }
}
