//! Closed-form transforms, eigenvalue densities and exact moment oracles.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::charpoly::{factorial, AlphaSchedule, Group};
use crate::quadrature::{integrate, integrate_2d, QuadOptions};
use crate::special::{digamma, gamma_ratio, gamma_ratio_complex, ln_gamma, trigamma};
use crate::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `E[B_{a,b}^s] = Γ(a+s)Γ(a+b) / (Γ(a)Γ(a+b+s))`.
pub fn beta_mellin(a: f64, b: f64, s: f64) -> Result<f64> {
    if !(a > 0.0 && b >= 0.0) || !(s > -a) {
        return Err(Error::Domain("beta Mellin transform needs a > 0, b >= 0, s > -a"));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    if b == 0.0 {
        return Ok(1.0);
    }
    gamma_ratio(&[a + s, a + b], &[a, a + b + s])
}

fn check_query(t: f64, s: f64) -> Result<()> {
    if !(t.is_finite() && s.is_finite()) {
        return Err(Error::Domain("transform arguments must be finite"));
    }
    Ok(())
}

/// `E(|X|^t e^{is·arg X})` for `X = 1 + e^{iθ}√B_{1,λ}`:
/// `Γ(λ+1)Γ(λ+1+t) / (Γ(λ+1+(t+s)/2) Γ(λ+1+(t−s)/2))`.
pub fn mf_one_plus_sphere_coord(lambda: f64, t: f64, s: f64) -> Result<f64> {
    check_query(t, s)?;
    if !(lambda >= 0.0) {
        return Err(Error::Domain("need lambda >= 0"));
    }
    if !(lambda + 1.0 + t > 0.0 && lambda + 1.0 + (t + s) / 2.0 > 0.0 && lambda + 1.0 + (t - s) / 2.0 > 0.0) {
        return Err(Error::Domain("transform argument outside its domain"));
    }
    if t == 0.0 && s == 0.0 {
        return Ok(1.0);
    }
    let l = lambda + 1.0;
    gamma_ratio(&[l, l + t], &[l + (t + s) / 2.0, l + (t - s) / 2.0])
}

/// `E(|X|^t e^{is·arg X})` for `X = 2cosφ e^{iφ}` with `φ` from the
/// cosine-power law with parameter `z` (density `∝ (2cosφ)^{2Re z} e^{2 Im z·φ}`).
pub fn mf_cospower(z: Complex64, t: f64, s: f64) -> Result<Complex64> {
    check_query(t, s)?;
    if !(z.re > -0.5) {
        return Err(Error::Domain("cosine-power law needs Re z > -1/2"));
    }
    if t == 0.0 && s == 0.0 {
        return Ok(c(1.0, 0.0));
    }
    let one = c(1.0, 0.0);
    let zz = c(2.0 * z.re, 0.0);
    let a = (t + s) / 2.0;
    let b = (t - s) / 2.0;
    gamma_ratio_complex(
        &[z + one, z.conj() + one, zz + t + 1.0],
        &[zz + one, z.conj() + a + 1.0, z + b + 1.0],
    )
}

/// `E(|1−Y|^t e^{is·arg(1−Y)})` for `Y ∼ TiltedLaw(λ, δ)`:
///
/// ```text
/// Γ(λ+1+t+δ+δ̄) Γ(λ+1+δ̄) Γ(λ+1+δ) / [Γ(λ+1+(t+s)/2+δ̄) Γ(λ+1+(t−s)/2+δ) Γ(λ+1+δ+δ̄)]
/// ```
pub fn mf_tilted_coord(lambda: f64, delta: Complex64, t: f64, s: f64) -> Result<Complex64> {
    check_query(t, s)?;
    if !(lambda >= 0.0) || !(delta.re > -0.5) {
        return Err(Error::Domain("need lambda >= 0 and Re(delta) > -1/2"));
    }
    if t == 0.0 && s == 0.0 {
        return Ok(c(1.0, 0.0));
    }
    let l = c(lambda + 1.0, 0.0);
    let dd = 2.0 * delta.re;
    let a = (t + s) / 2.0;
    let b = (t - s) / 2.0;
    gamma_ratio_complex(
        &[l + t + dd, l + delta.conj(), l + delta],
        &[l + a + delta.conj(), l + b + delta, l + dd],
    )
}

/// Transform of `1 − X` where `X = Y − (1 − |Y|²) B_{1,λ−1} / (1 − Ȳ)` with
/// `Y ∼ TiltedLaw(λ, δ)`. The remainder `X` has law `TiltedLaw(λ − 1, δ + 1)`,
/// so this is [`mf_tilted_coord`] at those parameters.
pub fn mf_tilted_update_target(lambda: f64, delta: Complex64, t: f64, s: f64) -> Result<Complex64> {
    if !(lambda >= 1.0) {
        return Err(Error::Domain("need lambda >= 1"));
    }
    mf_tilted_coord(lambda - 1.0, delta + 1.0, t, s)
}

fn vandermonde_sq(points: &[Complex64]) -> f64 {
    let mut acc = 1.0;
    for k in 0..points.len() {
        for l in k + 1..points.len() {
            acc *= (points[k] - points[l]).norm_sqr();
        }
    }
    acc
}

/// `(1/n!) ∏_{k<l} |e^{iθ_k} − e^{iθ_l}|²`, to be integrated against
/// `dθ/(2π)^n` over `(−π, π]^n`.
pub fn weyl_density_unitary(angles: &[f64]) -> f64 {
    let pts: Vec<Complex64> = angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    vandermonde_sq(&pts) / factorial(angles.len())
}

/// Unnormalized `∏_{k<l}|e^{iθ_k} − e^{iθ_l}|² ∏_j |1 − e^{iθ_j}|^{2p}` on the
/// `n − p` free angles.
pub fn conditional_density_unitary(angles: &[f64], p: usize) -> f64 {
    let pts: Vec<Complex64> = angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let edge: f64 = pts.iter().map(|z| (c(1.0, 0.0) - z).norm_sqr().powi(p as i32)).product();
    vandermonde_sq(&pts) * edge
}

fn quad_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-10, rel_tol: 1e-12, max_intervals: 20_000 }
}

/// `∫ conditional_density_unitary dθ` over `(−π, π]^m`, for `m ∈ {1, 2}`.
pub fn conditional_normalizer(m: usize, p: usize) -> Result<f64> {
    match m {
        1 => Ok(integrate(|t| conditional_density_unitary(&[t], p), -PI, PI, quad_opts())?.value),
        2 => Ok(integrate_2d(|x, y| conditional_density_unitary(&[x, y], p), (-PI, PI), (-PI, PI), quad_opts())?
            .value),
        _ => Err(Error::Domain("numerical normalizer only for one or two free angles")),
    }
}

/// Unnormalized Jacobi ensemble density
/// `|Δ(x)|^β ∏ (2 − x_j)^a (2 + x_j)^b` on `(−2, 2)^n`.
pub fn jacobi_density(xs: &[f64], beta: f64, a: f64, b: f64) -> f64 {
    let mut vdm = 1.0;
    for k in 0..xs.len() {
        for l in k + 1..xs.len() {
            vdm *= (xs[k] - xs[l]).abs();
        }
    }
    let edge: f64 = xs.iter().map(|&x| (2.0 - x).powf(a) * (2.0 + x).powf(b)).product();
    vdm.powf(beta) * edge
}

/// Unnormalized eigenangle statistics on `(0, π)^n`: `∏(cosθ_k − cosθ_l)²`
/// for `SO`, times `∏(1 − cosθ_i)(1 + cosθ_i)` for `USp`.
pub fn so_usp_density(angles: &[f64], group: Group) -> f64 {
    let cs: Vec<f64> = angles.iter().map(|t| t.cos()).collect();
    let mut acc = 1.0;
    for k in 0..cs.len() {
        for l in k + 1..cs.len() {
            acc *= (cs[k] - cs[l]).powi(2);
        }
    }
    match group {
        Group::So => acc,
        Group::Usp => acc * cs.iter().map(|x| (1.0 - x) * (1.0 + x)).product::<f64>(),
    }
}

fn g_ratio(lambda: f64, q: f64) -> f64 {
    (ln_gamma(lambda + 1.0) + ln_gamma(lambda + 1.0 + 2.0 * q) - 2.0 * ln_gamma(lambda + 1.0 + q)).exp()
}

/// Exact `E|Z^{(p)}/p!|²` under the conditional measure on `U(n)`:
/// `∏_{ℓ=1}^{n−p} G(ℓ−1, p+1) / G(ℓ−1, p)` with
/// `G(λ, q) = Γ(λ+1)Γ(λ+1+2q)/Γ(λ+1+q)²`.
pub fn expected_sq_modulus_zp(n: usize, p: usize) -> Result<f64> {
    if n == 0 || p >= n {
        return Err(Error::Domain("need n >= 1 and p < n"));
    }
    Ok((1..=n - p)
        .map(|l| {
            let lam = (l - 1) as f64;
            g_ratio(lam, p as f64 + 1.0) / g_ratio(lam, p as f64)
        })
        .product())
}

/// Density of `B_{a,b}` at `x ∈ (0, 1)`.
pub fn beta_pdf(a: f64, b: f64, x: f64) -> f64 {
    if !(x > 0.0 && x < 1.0) {
        return 0.0;
    }
    (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p()).exp()
}

/// Density `f_{s,t}(x) = 2^{1−s−t} Γ(s+t)/(Γ(s)Γ(t)) (1−x)^{s−1}(1+x)^{t−1}`.
pub fn fst_pdf(s: f64, t: f64, x: f64) -> f64 {
    if !(x > -1.0 && x < 1.0) {
        return 0.0;
    }
    0.5 * beta_pdf(s, t, (1.0 - x) / 2.0)
}

/// Mean `(t − s)/(t + s)` of `f_{s,t}`.
pub fn fst_mean(s: f64, t: f64) -> f64 {
    (t - s) / (t + s)
}

/// `E[(1 − α)^q]` for `α ∼ f_{s,t}`, i.e. `2^q E[B_{s,t}^q]`.
pub fn fst_one_minus_moment(s: f64, t: f64, q: f64) -> Result<f64> {
    Ok(2f64.powf(q) * beta_mellin(s, t, q)?)
}

/// `E[(1 + α)^q]` for `α ∼ f_{s,t}`.
pub fn fst_one_plus_moment(s: f64, t: f64, q: f64) -> Result<f64> {
    fst_one_minus_moment(t, s, q)
}

/// Normalized density of the cosine-power angle on `(−π/2, π/2)`:
/// `Γ(z+1)Γ(z̄+1)/(πΓ(z+z̄+1)) (2cosφ)^{2m} e^{2dφ}` with `z = m + id`.
pub fn cospower_pdf(m: f64, d: f64, phi: f64) -> f64 {
    if !(phi.abs() < PI / 2.0) {
        return 0.0;
    }
    let z = c(m, d);
    let one = c(1.0, 0.0);
    let log_norm = crate::special::ln_gamma_complex(z + one).re * 2.0 - ln_gamma(2.0 * m + 1.0) - PI.ln();
    (log_norm + 2.0 * m * (2.0 * phi.cos()).ln() + 2.0 * d * phi).exp()
}

/// Density of the angle of `TiltedLaw(0, p)`, `p` real: the unit circle
/// reweighted by `|1 − e^{iθ}|^{2p}`.
pub fn tilted_circle_pdf(p: f64, theta: f64) -> f64 {
    let log_norm = 2.0 * ln_gamma(p + 1.0) - ln_gamma(2.0 * p + 1.0) - (2.0 * PI).ln();
    let w = 2.0 - 2.0 * theta.cos();
    (log_norm + p * w.ln()).exp()
}

/// Density on `(0, 2)` of `|1 − X|` for `X ∼ TiltedLaw(0, p)`:
/// `4C ρ^{2p}/√(4 − ρ²)` with `C = Γ(p+1)²/(2πΓ(2p+1))`.
pub fn tilted_circle_modulus_pdf(p: f64, rho: f64) -> f64 {
    if !(rho > 0.0 && rho < 2.0) {
        return 0.0;
    }
    let log_c = 2.0 * ln_gamma(p + 1.0) - ln_gamma(2.0 * p + 1.0) - (2.0 * PI).ln();
    4.0 * (log_c + 2.0 * p * rho.ln()).exp() / (4.0 - rho * rho).sqrt()
}

/// Exact first and second moments of `(log det⁺, log det⁻)` along the
/// α-coefficient route.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairLogMoments {
    pub mean_plus: f64,
    pub mean_minus: f64,
    pub var_plus: f64,
    pub var_minus: f64,
    pub cov: f64,
}

impl PairLogMoments {
    pub fn corr(&self) -> f64 {
        self.cov / (self.var_plus * self.var_minus).sqrt()
    }
}

/// With `1 − α = 2B`, `1 + α = 2(1 − B)` and `B ∼ B_{s,t}`:
/// `E log B = ψ(s) − ψ(s+t)`, `Var log B = ψ'(s) − ψ'(s+t)` and
/// `Cov(log B, log(1 − B)) = −ψ'(s+t)`.
pub fn jacobi_log_moments(schedule: &AlphaSchedule) -> PairLogMoments {
    let ln2 = core::f64::consts::LN_2;
    let mut m = PairLogMoments { mean_plus: ln2, mean_minus: ln2, var_plus: 0.0, var_minus: 0.0, cov: 0.0 };
    for (k, &(s, t)) in schedule.pairs().iter().enumerate() {
        let e_minus = ln2 + digamma(s) - digamma(s + t);
        let v_minus = trigamma(s) - trigamma(s + t);
        m.mean_plus += e_minus;
        m.var_plus += v_minus;
        if k % 2 == 0 {
            m.mean_minus += ln2 + digamma(t) - digamma(s + t);
            m.var_minus += trigamma(t) - trigamma(s + t);
            m.cov -= trigamma(s + t);
        } else {
            m.mean_minus += e_minus;
            m.var_minus += v_minus;
            m.cov += v_minus;
        }
    }
    m
}

/// Exact moments of `log Z^{(p)}` on `U(n)`: mean (real), and the variances of
/// real and imaginary parts. The two parts are uncorrelated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryLogMoments {
    pub mean: f64,
    pub var_re: f64,
    pub var_im: f64,
}

pub fn unitary_log_moments(n: usize, p: usize) -> Result<UnitaryLogMoments> {
    if n == 0 || p >= n {
        return Err(Error::Domain("need n >= 1 and p < n"));
    }
    let pf = p as f64;
    let mut m = UnitaryLogMoments { mean: ln_gamma(pf + 1.0), var_re: 0.0, var_im: 0.0 };
    for l in 0..n - p {
        let lam = l as f64 + 1.0;
        m.mean += digamma(lam + 2.0 * pf) - digamma(lam + pf);
        m.var_re += trigamma(lam + 2.0 * pf) - 0.5 * trigamma(lam + pf);
        m.var_im += 0.5 * trigamma(lam + pf);
    }
    Ok(m)
}

/// `E[(1 − α)^{−(1+a)}]` for `α ∼ f_{s,t}`:
/// `2^{−(1+a)} Γ(s−1−a)Γ(s+t) / (Γ(s)Γ(s+t−1−a))`, finite for `s > 1 + a`.
pub fn fst_inverse_moment(s: f64, t: f64, a: f64) -> Result<f64> {
    if !(s > 1.0 + a) {
        return Err(Error::Domain("inverse moment needs s > 1 + a"));
    }
    Ok(2f64.powf(-(1.0 + a)) * gamma_ratio(&[s - 1.0 - a, s + t], &[s, s + t - 1.0 - a])?)
}

/// Constant `c(n)` in `h_n(ε) ∼ c(n) ε^a` for the density of `det(2Id − u)`
/// under the Jacobi ensemble:
/// `Γ(a+b+2)/(2^{2(1+a)}Γ(a+1)Γ(b+1)) ∏_{k ≤ 2n−3} E[(1 − α_k)^{−(1+a)}]`.
pub fn jacobi_edge_constant(beta: f64, a: f64, b: f64, n: usize) -> Result<f64> {
    let schedule = crate::charpoly::alpha_schedule_general(beta, a, b, n)?;
    let lead = gamma_ratio(&[a + b + 2.0], &[a + 1.0, b + 1.0])? * 2f64.powf(-2.0 * (1.0 + a));
    let mut acc = lead;
    for &(s, t) in &schedule.pairs()[..schedule.count() - 1] {
        acc *= fst_inverse_moment(s, t, a)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn beta_mellin_values() {
        assert_eq!(beta_mellin(2.0, 3.0, 0.0).unwrap(), 1.0);
        assert!(close(beta_mellin(1.0, 1.0, 2.0).unwrap(), 1.0 / 3.0, 1e-14));
        assert!(close(beta_mellin(1.0, 4.0, 1.0).unwrap(), 0.2, 1e-14));
        assert!(beta_mellin(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn sphere_coord_values() {
        assert_eq!(mf_one_plus_sphere_coord(1.0, 0.0, 0.0).unwrap(), 1.0);
        assert!(close(mf_one_plus_sphere_coord(1.0, 2.0, 0.0).unwrap(), 1.5, 1e-14));
        assert!(close(mf_one_plus_sphere_coord(1.0, 2.0, 2.0).unwrap(), 1.0, 1e-14));
        assert!(close(mf_one_plus_sphere_coord(0.0, 2.0, 0.0).unwrap(), 2.0, 1e-14));
        let mut prev = 1.0;
        for k in 1..40 {
            let v = mf_one_plus_sphere_coord(2.5, k as f64 * 0.25, 0.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn cospower_values() {
        assert_eq!(mf_cospower(c(0.3, 0.2), 0.0, 0.0).unwrap(), c(1.0, 0.0));
        assert!((mf_cospower(c(0.0, 0.0), 2.0, 0.0).unwrap() - c(2.0, 0.0)).norm() < 1e-13);
        assert!((mf_cospower(c(1.0, 0.0), 0.0, 2.0).unwrap() - c(0.5, 0.0)).norm() < 1e-13);
        assert!(mf_cospower(c(-0.5, 0.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn cospower_matches_quadrature() {
        for &(m, d) in &[(0.0, 0.0), (1.0, 0.0), (0.7, 0.4), (2.0, -0.8)] {
            for &(t, s) in &[(1.0, 1.0), (2.0, 0.0), (2.0, 2.0), (4.0, 0.0)] {
                let re = integrate(
                    |p| cospower_pdf(m, d, p) * (2.0 * p.cos()).powf(t) * (s * p).cos(),
                    -PI / 2.0,
                    PI / 2.0,
                    quad_opts(),
                )
                .unwrap()
                .value;
                let im = integrate(
                    |p| cospower_pdf(m, d, p) * (2.0 * p.cos()).powf(t) * (s * p).sin(),
                    -PI / 2.0,
                    PI / 2.0,
                    quad_opts(),
                )
                .unwrap()
                .value;
                let exact = mf_cospower(c(m, d), t, s).unwrap();
                assert!((exact - c(re, im)).norm() < 1e-8, "m={m} d={d} t={t} s={s}: {exact} vs {re}+{im}i");
            }
        }
    }

    #[test]
    fn tilted_reduces_to_sphere_coordinate() {
        // δ = 0: 1 − Y with Y rotation invariant is 1 + Y in law.
        for &lam in &[0.0, 1.0, 3.0] {
            for &(t, s) in &[(1.0, 1.0), (2.0, 0.0), (2.0, 2.0), (4.0, 0.0)] {
                let a = mf_tilted_coord(lam, c(0.0, 0.0), t, s).unwrap();
                let b = mf_one_plus_sphere_coord(lam, t, s).unwrap();
                assert!((a - c(b, 0.0)).norm() < 1e-12);
            }
        }
        assert!((mf_tilted_coord(1.0, c(1.0, 0.0), 2.0, 0.0).unwrap() - c(20.0 / 9.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn update_target_at_zero_tilt() {
        // Reweighting by |1 − x|² turns the plain transform into a ratio.
        for &(t, s) in &[(1.0, 1.0), (2.0, 0.0), (2.0, 2.0), (4.0, 0.0)] {
            let lhs = mf_tilted_update_target(3.0, c(0.0, 0.0), t, s).unwrap();
            let rhs =
                mf_one_plus_sphere_coord(2.0, t + 2.0, s).unwrap() / mf_one_plus_sphere_coord(2.0, 2.0, 0.0).unwrap();
            assert!((lhs - c(rhs, 0.0)).norm() < 1e-12);
        }
        assert_eq!(mf_tilted_update_target(3.0, c(0.5, 0.5), 0.0, 0.0).unwrap(), c(1.0, 0.0));
        assert!(mf_tilted_update_target(0.5, c(0.0, 0.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn density_examples() {
        assert_eq!(weyl_density_unitary(&[0.3]), 1.0);
        assert!(close(weyl_density_unitary(&[0.0, PI]), 2.0, 1e-14));
        assert!(close(conditional_density_unitary(&[PI], 1), 4.0, 1e-14));
        assert_eq!(jacobi_density(&[0.5, 0.5], 2.0, 1.0, 1.0), 0.0);
        assert!(close(jacobi_density(&[0.5], 2.0, 1.5, 0.5), 1.5f64.powf(1.5) * 2.5f64.sqrt(), 1e-14));
        assert_eq!(so_usp_density(&[1.0], Group::So), 1.0);
        assert!(close(so_usp_density(&[PI / 2.0], Group::Usp), 1.0, 1e-14));
    }

    #[test]
    fn weyl_second_moment_of_trace() {
        let r = integrate_2d(
            |x, y| {
                weyl_density_unitary(&[x, y]) * (Complex64::from_polar(1.0, x) + Complex64::from_polar(1.0, y)).norm_sqr()
            },
            (-PI, PI),
            (-PI, PI),
            quad_opts(),
        )
        .unwrap();
        assert!((r.value / (4.0 * PI * PI) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn conditional_normalizers() {
        let one = conditional_normalizer(1, 1).unwrap();
        assert!(close(one, 4.0 * PI, 1e-10));
        let two = conditional_normalizer(2, 0).unwrap();
        assert!(close(two, 2.0 * 4.0 * PI * PI, 1e-9));
        for theta in [-2.0, 0.4, 3.0] {
            let normalized = conditional_density_unitary(&[theta], 1) / one;
            assert!(close(normalized, tilted_circle_pdf(1.0, theta), 1e-10));
        }
        assert!(conditional_normalizer(3, 0).is_err());
    }

    #[test]
    fn change_of_variables_to_jacobi() {
        let g = |x: f64| (0.7 * x).exp() + x * x;
        let so = integrate(|t| so_usp_density(&[t], Group::So) * g(2.0 * t.cos()), 0.0, PI, quad_opts()).unwrap();
        let so_x = integrate(|x| jacobi_density(&[x], 2.0, -0.5, -0.5) * g(x), -2.0, 2.0, quad_opts()).unwrap();
        assert!((so.value - so_x.value).abs() < 1e-6, "{} vs {}", so.value, so_x.value);
        let usp = integrate(|t| so_usp_density(&[t], Group::Usp) * g(2.0 * t.cos()), 0.0, PI, quad_opts()).unwrap();
        let usp_x = integrate(|x| jacobi_density(&[x], 2.0, 0.5, 0.5) * g(x), -2.0, 2.0, quad_opts()).unwrap();
        assert!((usp.value - 0.25 * usp_x.value).abs() < 1e-8);
    }

    #[test]
    fn jacobi_two_level_mean_matches_alpha_route() {
        let (beta, a, b) = (2.0, 0.5, 0.5);
        let norm =
            integrate_2d(|x, y| jacobi_density(&[x, y], beta, a, b), (-2.0, 2.0), (-2.0, 2.0), quad_opts()).unwrap();
        let num = integrate_2d(
            |x, y| jacobi_density(&[x, y], beta, a, b) * (2.0 - x) * (2.0 - y),
            (-2.0, 2.0),
            (-2.0, 2.0),
            quad_opts(),
        )
        .unwrap();
        let schedule = crate::charpoly::alpha_schedule_general(beta, a, b, 2).unwrap();
        let alpha_route: f64 =
            2.0 * schedule.pairs().iter().map(|&(s, t)| fst_one_minus_moment(s, t, 1.0).unwrap()).product::<f64>();
        assert!((num.value / norm.value - alpha_route).abs() < 1e-4);
    }

    #[test]
    fn second_moment_oracle() {
        for n in 1..8 {
            assert!(close(expected_sq_modulus_zp(n, 0).unwrap(), n as f64 + 1.0, 1e-12));
        }
        assert!(close(expected_sq_modulus_zp(2, 1).unwrap(), 3.0, 1e-12));
        assert!(expected_sq_modulus_zp(2, 2).is_err());
        // One factor with λ = 1, δ = 1 contributes 20/9.
        assert!(close(g_ratio(1.0, 2.0) / g_ratio(1.0, 1.0), 20.0 / 9.0, 1e-12));
    }

    #[test]
    fn pdfs_normalize() {
        let cases: [(f64, f64); 3] = [(0.5, 0.5), (2.0, 3.0), (1.0, 1.0)];
        for (s, t) in cases {
            let r = integrate(|x| fst_pdf(s, t, x), -1.0, 1.0, quad_opts()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-7);
        }
        let r = integrate(|p| cospower_pdf(0.8, 0.6, p), -PI / 2.0, PI / 2.0, quad_opts()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        let r = integrate(|t| tilted_circle_pdf(2.0, t), -PI, PI, quad_opts()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        let r = integrate(|x| tilted_circle_modulus_pdf(1.0, x), 0.0, 2.0, quad_opts()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-7);
        assert!(close(fst_mean(1.0, 3.0), 0.5, 1e-15));
    }

    #[test]
    fn log_moment_oracles() {
        // n = 1 Jacobi: log det⁺ = log 4 + log B_{a+1,b+1}.
        let s = crate::charpoly::alpha_schedule_general(2.0, 0.0, 0.0, 1).unwrap();
        let m = jacobi_log_moments(&s);
        assert!(close(m.mean_plus, 4f64.ln() + digamma(1.0) - digamma(2.0), 1e-14));
        assert!(close(m.var_plus, trigamma(1.0) - trigamma(2.0), 1e-14));
        assert!(m.corr() < 0.0);
        let u = unitary_log_moments(1, 0).unwrap();
        assert!(u.mean.abs() < 1e-12);
        // log|1 − e^{iθ}| has variance π²/12 and arg(1 − e^{iθ}) is uniform on (−π/2, π/2).
        assert!(close(u.var_re, PI * PI / 12.0, 1e-12));
        assert!(close(u.var_im, PI * PI / 12.0, 1e-12));
    }

    #[test]
    fn edge_constant_at_one_level() {
        // n = 1: det⁺ = 4B_{a+1,b+1}, whose density near zero is
        // Γ(a+b+2)/(Γ(a+1)Γ(b+1)) 4^{−(a+1)} ε^a.
        let (a, b) = (0.5, 1.5);
        let c1 = jacobi_edge_constant(2.0, a, b, 1).unwrap();
        let direct = gamma_ratio(&[a + b + 2.0], &[a + 1.0, b + 1.0]).unwrap() * 4f64.powf(-(a + 1.0));
        assert!(close(c1, direct, 1e-14));
        assert!(fst_inverse_moment(1.0, 1.0, 0.5).is_err());
    }
}
