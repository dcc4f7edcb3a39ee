//! Reflections in the sense of rank-one perturbations of the identity:
//! unitary `r` with `rank(r − Id) ≤ 1` that fixes `e_0, …, e_{k−1}`.
//!
//! A reflection with pivot `k` (0-based) is stored by its generating column,
//! the image of `e_k` restricted to coordinates `k..n`. Writing `m₁` for that
//! column, the non-trivial block is
//!
//! ```text
//! m = (m₁, e₂ − κ c₂, …, e_d − κ c_d),   κ = m₁ − e₁,   c_j = conj(m₁ⱼ) / (1 − conj(m₁₁))
//! ```
//!
//! which is `Id + κ vᵀ` with `v = (1, −c₂, …, −c_d)`. Application to a vector
//! therefore costs `O(n − k)`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::distributions::{complex_sphere, sample_real_sphere, TiltedLaw};
use crate::linalg::CMatrix;
use crate::{Error, Result, RngStream};

/// Columns with `|1 − m₁₁|` at or below this are treated as the identity.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Reflection {
    n: usize,
    pivot: usize,
    column: Vec<Complex64>,
    // 1 − m₁₁, computed without cancellation.
    gap: Complex64,
    // c_j for j = 1..d (index 0 unused, kept as zero).
    coeffs: Vec<Complex64>,
}

/// `1 − m₁₁` for a unit column. Near `m₁₁ = 1` the real part is recovered
/// from `1 − x² = y² + Σ_{j≥2} |m_j|²`.
fn one_minus_head(column: &[Complex64]) -> Complex64 {
    let head = column[0];
    if head.re <= 0.5 {
        return Complex64::new(1.0 - head.re, -head.im);
    }
    let rest: f64 = column[1..].iter().map(|z| z.norm_sqr()).sum::<f64>() + head.im * head.im;
    Complex64::new(rest / (1.0 + head.re), -head.im)
}

impl Reflection {
    /// Builds the reflection of `U(n)` with the given 0-based pivot from its
    /// unit generating column of length `n − pivot`.
    pub fn from_column(n: usize, pivot: usize, column: Vec<Complex64>) -> Result<Self> {
        if pivot >= n {
            return Err(Error::Domain("pivot must be below the dimension"));
        }
        if column.len() != n - pivot {
            return Err(Error::Domain("generating column must have length n - pivot"));
        }
        let norm2: f64 = column.iter().map(|z| z.norm_sqr()).sum();
        if (norm2.sqrt() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("generating column must have unit norm"));
        }
        let gap = one_minus_head(&column);
        if gap.norm() <= DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateReflection);
        }
        let denom = gap.conj();
        let mut coeffs = Vec::with_capacity(column.len());
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend(column[1..].iter().map(|m| m.conj() / denom));
        Ok(Self { n, pivot, column, gap, coeffs })
    }

    /// The trivial element `Id`, only reachable as the `+1` outcome of a real
    /// reflection at the last pivot.
    fn identity_at_last(n: usize) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { n, pivot: n - 1, column: alloc::vec![one], gap: zero, coeffs: alloc::vec![zero] }
    }

    pub fn is_identity(&self) -> bool {
        self.column[0] == Complex64::new(1.0, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn column(&self) -> &[Complex64] {
        &self.column
    }

    /// The diagonal entry `r_kk` at the pivot.
    pub fn pivot_entry(&self) -> Complex64 {
        self.column[0]
    }

    /// Non-trivial eigenvalue `−(1 − r_kk)/(1 − conj(r_kk))`.
    /// Returns `1` for the identity element.
    pub fn nontrivial_eigenvalue(&self) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        if self.is_identity() {
            return one;
        }
        -self.gap / self.gap.conj()
    }

    /// `(1 − r_kk)^{δ̄}(1 − conj r_kk)^{δ}`, real and positive.
    pub fn tilt_weight(&self, delta: Complex64) -> f64 {
        let w = self.gap;
        w.norm().powf(2.0 * delta.re) * (2.0 * delta.im * w.arg()).exp()
    }

    /// In-place `x ← r x`.
    pub fn apply(&self, x: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.n);
        let sub = &mut x[self.pivot..];
        let mut vx = sub[0];
        for (c, xi) in self.coeffs.iter().zip(sub.iter()).skip(1) {
            vx -= c * xi;
        }
        if vx == Complex64::new(0.0, 0.0) {
            return;
        }
        // κ = m₁ − e₁
        sub[0] -= self.gap * vx;
        for (xi, m) in sub.iter_mut().zip(&self.column).skip(1) {
            *xi += m * vx;
        }
    }

    /// In-place `M ← r M`, column by column.
    pub fn apply_left(&self, m: &mut CMatrix) {
        let n = self.n;
        let mut col = alloc::vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for (i, c) in col.iter_mut().enumerate() {
                *c = m[(i, j)];
            }
            self.apply(&mut col);
            for (i, c) in col.iter().enumerate() {
                m[(i, j)] = *c;
            }
        }
    }

    /// Dense `n × n` realization `Id_k ⊕ m`.
    pub fn to_matrix(&self) -> CMatrix {
        let n = self.n;
        let k = self.pivot;
        let mut out = CMatrix::identity(n);
        let kappa0 = -self.gap;
        for (a, &m) in self.column.iter().enumerate() {
            let kappa = if a == 0 { kappa0 } else { m };
            out[(k + a, k)] = if a == 0 { self.column[0] } else { m };
            for b in 1..self.column.len() {
                let base = if a == b { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                out[(k + a, k + b)] = base - kappa * self.coeffs[b];
            }
        }
        out
    }
}

fn resample<F: FnMut(&mut RngStream) -> Vec<Complex64>>(
    n: usize,
    pivot: usize,
    rng: &mut RngStream,
    mut draw: F,
) -> Reflection {
    loop {
        let column = draw(rng);
        if one_minus_head(&column).norm() <= DEGENERACY_THRESHOLD {
            continue;
        }
        return Reflection::from_column(n, pivot, column).expect("valid sampled column");
    }
}

fn check_pivot(n: usize, pivot: usize) -> Result<()> {
    if pivot >= n {
        return Err(Error::Domain("pivot must satisfy pivot < n"));
    }
    Ok(())
}

/// Reflection whose generating column is uniform on the complex sphere of
/// dimension `n − pivot`.
pub fn sample_nu(n: usize, pivot: usize, rng: &mut RngStream) -> Result<Reflection> {
    check_pivot(n, pivot)?;
    Ok(resample(n, pivot, rng, |r| complex_sphere(n - pivot, 1.0, r)))
}

/// Tilted reflection: the pivot entry follows `TiltedLaw(n − pivot − 1, δ)`
/// and the rest of the column is uniform on the sphere of the remaining radius.
pub fn sample_nu_delta(n: usize, pivot: usize, delta: Complex64, rng: &mut RngStream) -> Result<Reflection> {
    check_pivot(n, pivot)?;
    let law = TiltedLaw::new((n - pivot - 1) as f64, delta)?;
    Ok(sample_nu_with_law(n, pivot, &law, rng))
}

pub(crate) fn sample_nu_with_law(n: usize, pivot: usize, law: &TiltedLaw, rng: &mut RngStream) -> Reflection {
    let d = n - pivot;
    resample(n, pivot, rng, |r| {
        let head = law.sample(r);
        let mut column = Vec::with_capacity(d);
        column.push(head);
        if d > 1 {
            let radius = (1.0 - head.norm_sqr()).max(0.0).sqrt();
            column.extend(complex_sphere(d - 1, radius, r));
        }
        column
    })
}

/// Real reflection: generating column uniform on the real sphere. At the
/// last pivot the column is `±1` with equal probability, and `+1` yields the
/// identity.
pub fn sample_nu_real(n: usize, pivot: usize, rng: &mut RngStream) -> Result<Reflection> {
    check_pivot(n, pivot)?;
    if pivot == n - 1 {
        return Ok(if rng.open01() < 0.5 {
            Reflection::identity_at_last(n)
        } else {
            Reflection::from_column(n, pivot, alloc::vec![Complex64::new(-1.0, 0.0)])?
        });
    }
    Ok(resample(n, pivot, rng, |r| {
        sample_real_sphere(n - pivot, r)
            .expect("positive dimension")
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect()
    }))
}
