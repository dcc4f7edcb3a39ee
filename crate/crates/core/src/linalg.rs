//! Small dense complex linear algebra: products, LU determinant, eigenvalues
//! via Hessenberg reduction and shifted QR, and singular values via one-sided
//! Jacobi.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Domain("matrix data length must be n*n"));
        }
        Ok(Self { n, data })
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&x| x * c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `max |(u*u − Id)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).sub(&Self::identity(self.n)).max_abs()
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
                .unwrap();
            if a[pivot * n + col] == ZERO {
                return ZERO;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for i in col + 1..n {
                let f = a[i * n + col] / p;
                if f == ZERO {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[i * n + j] -= f * v;
                }
            }
        }
        det
    }

    /// All eigenvalues (unordered).
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let mut h = self.clone();
        h.reduce_to_hessenberg();
        h.hessenberg_qr_eigenvalues()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        one_sided_jacobi(self)
    }

    fn reduce_to_hessenberg(&mut self) {
        let n = self.n;
        if n < 3 {
            return;
        }
        for k in 0..n - 2 {
            let norm: f64 = (k + 1..n).map(|i| self[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let x0 = self[(k + 1, k)];
            let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
            let alpha = -phase * norm;
            let mut v: Vec<Complex64> = (k + 1..n).map(|i| self[(i, k)]).collect();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            // H = I - 2 v v* / (v* v); apply H A H.
            for j in 0..n {
                let s: Complex64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * self[(k + 1 + t, j)]).sum();
                let f = s * (2.0 / vnorm2);
                for (t, vi) in v.iter().enumerate() {
                    self[(k + 1 + t, j)] -= vi * f;
                }
            }
            for i in 0..n {
                let s: Complex64 = v.iter().enumerate().map(|(t, vi)| self[(i, k + 1 + t)] * vi).sum();
                let f = s * (2.0 / vnorm2);
                for (t, vi) in v.iter().enumerate() {
                    self[(i, k + 1 + t)] -= f * vi.conj();
                }
            }
            for i in k + 2..n {
                self[(i, k)] = ZERO;
            }
        }
    }

    fn hessenberg_qr_eigenvalues(mut self) -> Result<Vec<Complex64>> {
        let n = self.n;
        let mut eig = vec![ZERO; n];
        if n == 0 {
            return Ok(eig);
        }
        let mut hi = n - 1;
        let mut iter_since_deflation = 0usize;
        let mut total = 0usize;
        loop {
            if hi == 0 {
                eig[0] = self[(0, 0)];
                break;
            }
            // Find the start of the active unreduced block.
            let mut lo = hi;
            while lo > 0 {
                let sub = self[(lo, lo - 1)].norm();
                let scale = self[(lo, lo)].norm() + self[(lo - 1, lo - 1)].norm();
                if sub <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
                    self[(lo, lo - 1)] = ZERO;
                    break;
                }
                lo -= 1;
            }
            if lo == hi {
                eig[hi] = self[(hi, hi)];
                hi -= 1;
                iter_since_deflation = 0;
                continue;
            }
            if lo + 1 == hi {
                // 2×2 block: closed form, also when its eigenvalues coincide.
                let (l1, l2) = eigenvalues_2x2(self[(lo, lo)], self[(lo, hi)], self[(hi, lo)], self[(hi, hi)]);
                eig[lo] = l1;
                eig[hi] = l2;
                if lo == 0 {
                    break;
                }
                hi = lo - 1;
                iter_since_deflation = 0;
                continue;
            }
            total += 1;
            iter_since_deflation += 1;
            if total > 100 * n.max(10) {
                return Err(Error::NoConvergence("Hessenberg QR"));
            }
            let shift = if iter_since_deflation % 11 == 10 {
                // Exceptional shift off the real axis to break cycles.
                self[(hi, hi)] + Complex64::new(0.75, 0.4375) * self[(hi, hi - 1)].norm()
            } else {
                wilkinson_shift(self[(hi - 1, hi - 1)], self[(hi - 1, hi)], self[(hi, hi - 1)], self[(hi, hi)])
            };
            self.qr_step(lo, hi, shift);
        }
        Ok(eig)
    }

    // One explicit shifted QR sweep on rows/cols lo..=hi via Givens rotations.
    fn qr_step(&mut self, lo: usize, hi: usize, shift: Complex64) {
        let n = self.n;
        for i in lo..=hi {
            self[(i, i)] -= shift;
        }
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let a = self[(k, k)];
            let b = self[(k + 1, k)];
            let (c, s) = givens(a, b);
            // Rows k, k+1: [c s; -conj(s) c]
            for j in k..n {
                let x = self[(k, j)];
                let y = self[(k + 1, j)];
                self[(k, j)] = x * c + s * y;
                self[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            // Columns k, k+1 multiplied by G^*.
            for i in 0..k + 2 {
                let x = self[(i, k)];
                let y = self[(i, k + 1)];
                self[(i, k)] = x * c + y * s.conj();
                self[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..=hi {
            self[(i, i)] += shift;
        }
    }
}

fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

fn eigenvalues_2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    (mid + disc, mid - disc)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let (l1, l2) = eigenvalues_2x2(a, b, c, d);
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn one_sided_jacobi(m: &CMatrix) -> Vec<f64> {
    let n = m.n;
    // Work on columns.
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| m.column(j)).collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|x| x.norm_sqr()).sum();
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= 1e-300 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let x = cols[p][i];
                    let y = cols[q][i] * phase.conj();
                    cols[p][i] = x * c - y * s;
                    cols[q][i] = (x * s + y * c) * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}
