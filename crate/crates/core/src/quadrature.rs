//! Adaptive Gauss–Kronrod (7, 15) quadrature in one and two dimensions.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
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
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kron += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Segment { a, b, value: kron * half, error: ((kron - gauss) * half).abs() }
}

/// Integrates `f` over `[a, b]` by global adaptive bisection.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration bounds must be finite"));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&mut f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);
    let mut settled = alloc::vec::Vec::new();
    let mut settled_error = 0.0;
    while error - settled_error > opts.abs_tol.max(opts.rel_tol * value.abs()) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::NoConvergence("adaptive quadrature hit its interval budget"));
        }
        let Some(worst) = heap.pop() else { break };
        let scale = worst.a.abs().max(worst.b.abs());
        if worst.b - worst.a <= 1e-12 * scale {
            // Too narrow to split without nodes collapsing onto the ends.
            settled_error += worst.error;
            settled.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if !value.is_finite() {
            return Err(Error::NoConvergence("integrand is not finite"));
        }
    }
    // Resum to shed the drift from incremental updates.
    let (v, e) = heap.iter().chain(settled.iter()).fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(QuadResult { value: v, error: e })
}

/// Integrates `f(x, y)` over the rectangle `[ax, bx] × [ay, by]` as an
/// iterated integral, the inner integral solved to a tighter tolerance.
pub fn integrate_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    opts: QuadOptions,
) -> Result<QuadResult> {
    let inner_opts = QuadOptions { abs_tol: opts.abs_tol / (bx - ax).abs().max(1.0) / 10.0, ..opts };
    let mut failure = None;
    let mut inner_err = 0.0f64;
    let outer = integrate(
        |x| match integrate(|y| f(x, y), ay, by, inner_opts) {
            Ok(r) => {
                inner_err = inner_err.max(r.error);
                r.value
            }
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        ax,
        bx,
        opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(QuadResult { value: outer.value, error: outer.error + inner_err * (bx - ax).abs() })
}
