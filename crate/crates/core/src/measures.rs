//! Haar and conditional Haar measures on `U(n)` and `O(n)` as products of
//! independent reflections, and eigenangle extraction.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::CMatrix;
use crate::reflections::{sample_nu, sample_nu_delta, sample_nu_real, Reflection};
use crate::{Error, Result, RngStream, DEFLATION_TOLERANCE};

/// Allowed `‖u*u − Id‖_max`.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;
/// Allowed `||det u| − 1|`.
pub const DET_MODULUS_TOLERANCE: f64 = 1e-8;
/// Cap on attempts for [`sample_conditioned_on_abs_z`].
pub const MAX_CONDITIONING_ATTEMPTS: u64 = 1_000_000;

/// A dense matrix checked to be unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let deviation = m.unitarity_defect();
        if !(deviation <= UNITARITY_TOLERANCE) {
            return Err(Error::NotUnitary { deviation });
        }
        let det = m.det().norm();
        if !((det - 1.0).abs() <= DET_MODULUS_TOLERANCE) {
            return Err(Error::NotUnitary { deviation: (det - 1.0).abs() });
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `Tr u²` without forming the square.
    pub fn trace_of_square(&self) -> Complex64 {
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.0[(i, j)] * self.0[(j, i)];
            }
        }
        acc
    }

    /// `det(Id − u)` by LU.
    pub fn det_id_minus(&self) -> Complex64 {
        CMatrix::identity(self.dim()).sub(&self.0).det()
    }

    pub fn is_real(&self) -> bool {
        self.0.as_slice().iter().all(|z| z.im == 0.0)
    }
}

/// Maps an angle into `(−π, π]`.
pub fn canonical_angle(theta: f64) -> f64 {
    let mut t = libm::remainder(theta, 2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

/// Sorted eigenangles in `(−π, π]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenangleSet {
    angles: Vec<f64>,
}

impl EigenangleSet {
    pub fn from_angles(mut angles: Vec<f64>) -> Self {
        for a in angles.iter_mut() {
            *a = canonical_angle(*a);
        }
        angles.sort_by(f64::total_cmp);
        Self { angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// `∏ (z − e^{iθ_k})`.
    pub fn char_poly_at(&self, z: Complex64) -> Complex64 {
        self.angles.iter().map(|&t| z - Complex64::from_polar(1.0, t)).product()
    }

    /// Number of angles within the deflation tolerance of zero.
    pub fn pinned_count(&self) -> usize {
        self.angles.iter().filter(|t| t.abs() <= DEFLATION_TOLERANCE).count()
    }

    pub fn min_abs(&self) -> f64 {
        self.angles.iter().fold(f64::INFINITY, |m, t| m.min(t.abs()))
    }

    /// Removes the `p` angles closest to zero, which must all lie within the
    /// deflation tolerance, and returns the others in sorted order.
    pub fn deflate(&self, p: usize) -> Result<Vec<f64>> {
        if p > self.len() {
            return Err(Error::Conditioning { expected: p, found: self.len() });
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&i, &j| self.angles[i].abs().total_cmp(&self.angles[j].abs()));
        let found = self.pinned_count();
        if found < p {
            return Err(Error::Conditioning { expected: p, found });
        }
        let mut keep: Vec<usize> = idx[p..].to_vec();
        keep.sort_unstable();
        Ok(keep.into_iter().map(|i| self.angles[i]).collect())
    }
}

/// Eigenangles of a unitary matrix.
pub fn eigenangles(u: &UnitaryMatrix) -> Result<EigenangleSet> {
    let eig = u.matrix().eigenvalues()?;
    let mut angles = Vec::with_capacity(eig.len());
    for z in &eig {
        let deviation = (z.norm() - 1.0).abs();
        if deviation > 1e-8 {
            return Err(Error::NotUnitary { deviation });
        }
        angles.push(z.arg());
    }
    Ok(EigenangleSet::from_angles(angles))
}

/// `r₁ r₂ ⋯ r_m`, accumulated right to left onto the identity.
pub fn product(reflections: &[Reflection]) -> Result<CMatrix> {
    let Some(first) = reflections.first() else {
        return Err(Error::Domain("empty reflection product"));
    };
    let n = first.dim();
    if reflections.iter().any(|r| r.dim() != n) {
        return Err(Error::Domain("reflections must share a dimension"));
    }
    let mut m = CMatrix::identity(n);
    for r in reflections.iter().rev() {
        r.apply_left(&mut m);
    }
    Ok(m)
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("dimension must be positive"));
    }
    Ok(())
}

fn check_p(n: usize, p: usize) -> Result<()> {
    check_dim(n)?;
    if p >= n {
        return Err(Error::Domain("conditioning order must satisfy p < n"));
    }
    Ok(())
}

/// Independent draws `r^{(k)} ∼ ν^{(k)}` for pivots `0..m`.
pub fn sample_reflections(n: usize, m: usize, rng: &mut RngStream) -> Result<Vec<Reflection>> {
    check_dim(n)?;
    if m > n {
        return Err(Error::Domain("more reflections than the dimension"));
    }
    (0..m).map(|k| sample_nu(n, k, rng)).collect()
}

pub fn sample_haar_unitary(n: usize, rng: &mut RngStream) -> Result<UnitaryMatrix> {
    sample_conditional_haar(n, 0, rng)
}

/// Haar measure conditioned to have `p` eigenvalues equal to one:
/// `ν^{(1)} ⋯ ν^{(n−p)}`.
pub fn sample_conditional_haar(n: usize, p: usize, rng: &mut RngStream) -> Result<UnitaryMatrix> {
    check_p(n, p)?;
    let rs = sample_reflections(n, n - p, rng)?;
    UnitaryMatrix::new(product(&rs)?)
}

/// Same spectral law as [`sample_conditional_haar`], as a product of `n − p`
/// reflections tilted by `δ = p` at pivots `p..n`.
pub fn sample_conditional_slipped(n: usize, p: usize, rng: &mut RngStream) -> Result<UnitaryMatrix> {
    check_p(n, p)?;
    let delta = Complex64::new(p as f64, 0.0);
    let rs: Vec<Reflection> = (p..n).map(|k| sample_nu_delta(n, k, delta, rng)).collect::<Result<_>>()?;
    UnitaryMatrix::new(product(&rs)?)
}

/// `e^{iθ} r^{(1)} ⋯ r^{(n−1)}` with `θ` uniform and independent.
pub fn sample_rotated_conditional(n: usize, rng: &mut RngStream) -> Result<UnitaryMatrix> {
    check_dim(n)?;
    let rs = sample_reflections(n, n - 1, rng)?;
    let phase = Complex64::from_polar(1.0, rng.angle());
    let m = if rs.is_empty() { CMatrix::identity(n) } else { product(&rs)? };
    UnitaryMatrix::new(m.scale(phase))
}

/// The pair `(r_{δ₁}^{(1)} ⋯ r_{δ_m}^{(m)}, r_{δ₁+1}^{(2)} ⋯ r_{δ_m+1}^{(m+1)})`,
/// drawn independently. Both have the same spectral law.
pub fn sample_generalized_slip(
    n: usize,
    deltas: &[Complex64],
    rng: &mut RngStream,
) -> Result<(UnitaryMatrix, UnitaryMatrix)> {
    check_dim(n)?;
    let m = deltas.len();
    if m == 0 || m > n - 1 {
        return Err(Error::Domain("need 1 <= len(deltas) <= n - 1"));
    }
    let lower: Vec<Reflection> =
        deltas.iter().enumerate().map(|(k, &d)| sample_nu_delta(n, k, d, rng)).collect::<Result<_>>()?;
    let one = Complex64::new(1.0, 0.0);
    let upper: Vec<Reflection> =
        deltas.iter().enumerate().map(|(k, &d)| sample_nu_delta(n, k + 1, d + one, rng)).collect::<Result<_>>()?;
    Ok((UnitaryMatrix::new(product(&lower)?)?, UnitaryMatrix::new(product(&upper)?)?))
}

/// A draw conditioned on `|det(Id − u)| = x`, with its reflection factors and
/// the number of rejection rounds used.
#[derive(Clone, Debug)]
pub struct ConditionedOnAbsZ {
    pub reflections: Vec<Reflection>,
    pub attempts: u64,
}

impl ConditionedOnAbsZ {
    pub fn matrix(&self) -> Result<UnitaryMatrix> {
        UnitaryMatrix::new(product(&self.reflections)?)
    }
}

/// Rejects `ν^{(1)} ⋯ ν^{(n−1)}` until `∏|1 − r_kk| > x/2`, then closes with
/// `r_nn = exp(±2i·arcsin(x / (2∏|1 − r_kk|)))`, each sign with probability ½.
pub fn sample_conditioned_on_abs_z(n: usize, x: f64, rng: &mut RngStream) -> Result<ConditionedOnAbsZ> {
    check_dim(n)?;
    if !(x > 0.0 && x < 2f64.powi(n as i32)) {
        return Err(Error::Domain("need 0 < x < 2^n"));
    }
    for attempt in 1..=MAX_CONDITIONING_ATTEMPTS {
        let mut rs = sample_reflections(n, n - 1, rng)?;
        let prod: f64 = rs.iter().map(|r| (Complex64::new(1.0, 0.0) - r.pivot_entry()).norm()).product();
        if prod <= x / 2.0 {
            continue;
        }
        let half = (x / (2.0 * prod)).asin();
        let sign = if rng.open01() < 0.5 { 1.0 } else { -1.0 };
        let last = Complex64::from_polar(1.0, sign * 2.0 * half);
        rs.push(Reflection::from_column(n, n - 1, alloc::vec![last])?);
        return Ok(ConditionedOnAbsZ { reflections: rs, attempts: attempt });
    }
    Err(Error::RejectionExhausted { attempts: MAX_CONDITIONING_ATTEMPTS })
}

/// `ν_ℝ^{(1)} ⋯ ν_ℝ^{(n−p)}`: a real orthogonal matrix with eigenvalue one of
/// multiplicity at least `p`.
pub fn sample_conditional_orthogonal(n: usize, p: usize, rng: &mut RngStream) -> Result<UnitaryMatrix> {
    check_p(n, p)?;
    let rs: Vec<Reflection> = (0..n - p).map(|k| sample_nu_real(n, k, rng)).collect::<Result<_>>()?;
    UnitaryMatrix::new(product(&rs)?)
}
