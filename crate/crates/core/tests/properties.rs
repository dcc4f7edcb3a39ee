use condhaar_core::analytics::{mf_cospower, mf_one_plus_sphere_coord, mf_tilted_coord, mf_tilted_update_target};
use condhaar_core::charpoly::{alpha_schedule_general, alpha_schedule_group, det_id_minus_product, Group};
use condhaar_core::distributions::{sample_beta, TiltedLaw};
use condhaar_core::linalg::CMatrix;
use condhaar_core::measures::{eigenangles, product, sample_conditional_haar, sample_reflections};
use condhaar_core::reflections::Reflection;
use condhaar_core::special::ln_gamma;
use condhaar_core::stats::{ks_two_sample, Welford};
use condhaar_core::{Complex64, RngStream};
use proptest::prelude::*;

fn unit_column() -> impl Strategy<Value = Vec<Complex64>> {
    (1usize..8)
        .prop_flat_map(|d| prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d))
        .prop_filter_map("nonzero", |v| {
            let col: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            (norm > 1e-3).then(|| col.into_iter().map(|z| z / norm).collect())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reflection_invariants(column in unit_column(), extra in 0usize..4, dr in -0.45f64..3.0, di in -2.0f64..2.0) {
        let pivot = extra;
        let n = pivot + column.len();
        let r = match Reflection::from_column(n, pivot, column) {
            Ok(r) => r,
            Err(_) => return Ok(()),
        };
        let m = r.to_matrix();
        prop_assert!(m.unitarity_defect() <= 1e-10);
        for j in 0..pivot {
            for i in 0..n {
                let e = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                prop_assert_eq!(m[(i, j)], e);
            }
        }
        let sv = m.sub(&CMatrix::identity(n)).singular_values();
        if n > 1 {
            prop_assert!(sv[1] <= 1e-10);
        }
        prop_assert!((r.nontrivial_eigenvalue().norm() - 1.0).abs() <= 1e-12);
        let w = r.tilt_weight(Complex64::new(dr, di));
        prop_assert!(w.is_finite() && w > 0.0);
        let mut dense = CMatrix::identity(n);
        r.apply_left(&mut dense);
        prop_assert!(dense.sub(&m).max_abs() <= 1e-12);
    }

    #[test]
    fn determinant_factorizes_over_reflections(seed: u64, n in 1usize..=10) {
        let mut rng = RngStream::new(seed, 0);
        let rs = sample_reflections(n, n, &mut rng).unwrap();
        let direct = CMatrix::identity(n).sub(&product(&rs).unwrap()).det();
        let factored = det_id_minus_product(&rs).unwrap();
        prop_assert!((direct - factored).norm() <= 1e-9 * n as f64);
    }

    #[test]
    fn conditional_spectra_are_canonical(seed: u64, n in 2usize..=8, p_frac in 0.0f64..1.0) {
        let p = ((n as f64 * p_frac) as usize).min(n - 1);
        let mut rng = RngStream::new(seed, 1);
        let u = sample_conditional_haar(n, p, &mut rng).unwrap();
        let a = eigenangles(&u).unwrap();
        prop_assert!(a.pinned_count() >= p);
        prop_assert!(a.angles().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(a.angles().iter().all(|&t| t > -std::f64::consts::PI && t <= std::f64::consts::PI));
    }

    #[test]
    fn transforms_are_normalized(lambda in 0.0f64..6.0, dr in -0.45f64..3.0, di in -2.0f64..2.0) {
        let delta = Complex64::new(dr, di);
        let one = Complex64::new(1.0, 0.0);
        prop_assert_eq!(mf_one_plus_sphere_coord(lambda, 0.0, 0.0).unwrap(), 1.0);
        prop_assert_eq!(mf_cospower(Complex64::new(lambda, di), 0.0, 0.0).unwrap(), one);
        prop_assert_eq!(mf_tilted_coord(lambda, delta, 0.0, 0.0).unwrap(), one);
        if lambda >= 1.0 {
            prop_assert_eq!(mf_tilted_update_target(lambda, delta, 0.0, 0.0).unwrap(), one);
        }
    }

    #[test]
    fn sphere_transform_increases_in_t(lambda in 0.0f64..6.0, t in 0.0f64..5.0, dt in 0.01f64..2.0) {
        let lo = mf_one_plus_sphere_coord(lambda, t, 0.0).unwrap();
        let hi = mf_one_plus_sphere_coord(lambda, t + dt, 0.0).unwrap();
        prop_assert!(hi >= lo * (1.0 - 1e-12));
    }

    #[test]
    fn group_schedules_are_jacobi_schedules(n in 1usize..30, pp in 0usize..4, pm in 0usize..4, usp: bool) {
        let g = if usp { Group::Usp } else { Group::So };
        let (a, b) = g.jacobi_exponents(pp, pm);
        let direct = alpha_schedule_group(g, n, pp, pm).unwrap();
        let general = alpha_schedule_general(2.0, a, b, n).unwrap();
        prop_assert_eq!(direct.count(), 2 * n - 1);
        for (x, y) in direct.pairs().iter().zip(general.pairs()) {
            prop_assert!((x.0 - y.0).abs() <= 1e-12 && (x.1 - y.1).abs() <= 1e-12);
        }
    }

    #[test]
    fn general_schedule_shapes(beta in 0.1f64..8.0, a in -0.99f64..5.0, b in -0.99f64..5.0, n in 1usize..40) {
        let s = alpha_schedule_general(beta, a, b, n).unwrap();
        for (k, &(x, y)) in s.pairs().iter().enumerate() {
            prop_assert!(x > 0.0 && y > 0.0);
            let m = (2 * n - k) as f64;
            let (ex, ey) = if k % 2 == 0 {
                ((m - 2.0) * beta / 4.0 + a + 1.0, (m - 2.0) * beta / 4.0 + b + 1.0)
            } else {
                ((m - 3.0) * beta / 4.0 + a + b + 2.0, (m - 1.0) * beta / 4.0)
            };
            prop_assert!((x - ex).abs() <= 1e-12 && (y - ey).abs() <= 1e-12);
        }
    }

    #[test]
    fn welford_merge_is_order_free(xs in prop::collection::vec(-1e3f64..1e3, 2..200), cut in 0.0f64..1.0) {
        let k = ((xs.len() as f64) * cut) as usize;
        let mut whole = Welford::new();
        xs.iter().for_each(|&x| whole.push(x));
        let (mut left, mut right) = (Welford::new(), Welford::new());
        xs[..k].iter().for_each(|&x| left.push(x));
        xs[k..].iter().for_each(|&x| right.push(x));
        left.merge(&right);
        prop_assert_eq!(left.count(), whole.count());
        prop_assert!((left.mean() - whole.mean()).abs() <= 1e-9 * (1.0 + whole.mean().abs()));
        prop_assert!((left.variance() - whole.variance()).abs() <= 1e-7 * (1.0 + whole.variance()));
    }

    #[test]
    fn ks_is_symmetric_and_bounded(xs in prop::collection::vec(-5.0f64..5.0, 50..120), ys in prop::collection::vec(-5.0f64..5.0, 50..120)) {
        let a = ks_two_sample(&xs, &ys).unwrap();
        let b = ks_two_sample(&ys, &xs).unwrap();
        prop_assert_eq!(a.statistic, b.statistic);
        prop_assert!((0.0..=1.0).contains(&a.p_value));
        prop_assert!((0.0..=1.0).contains(&a.statistic));
    }

    #[test]
    fn streams_replay(seed: u64, idx: u64, lambda in 0.0f64..5.0, dr in 0.0f64..2.0, di in -1.0f64..1.0) {
        let law = TiltedLaw::new(lambda, Complex64::new(dr, di)).unwrap();
        let draw = |rng: &mut RngStream| (0..8).map(|_| law.sample(rng)).collect::<Vec<_>>();
        let first = draw(&mut RngStream::new(seed, idx));
        prop_assert_eq!(&first, &draw(&mut RngStream::new(seed, idx)));
        prop_assert!(first.iter().all(|y| y.norm() <= 1.0 + 1e-12));
    }

    #[test]
    fn beta_draws_stay_open(seed: u64, a in 0.05f64..20.0, b in 0.05f64..20.0) {
        let mut rng = RngStream::new(seed, 2);
        for _ in 0..16 {
            let x = sample_beta(a, b, &mut rng).unwrap();
            prop_assert!(x > 0.0 && x < 1.0);
        }
    }

    #[test]
    fn log_gamma_recurrence(x in 0.01f64..150.0) {
        let lhs = ln_gamma(x + 1.0);
        let rhs = ln_gamma(x) + x.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
    }
}
