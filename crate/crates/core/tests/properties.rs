mod common;

use common::{random_matrix, random_orthogonal, random_point, FdCheck};
use grassmann_mv::baselines::{maxvol_trace, PermutationChart};
use grassmann_mv::experiments::csvio::write_sweep;
use grassmann_mv::experiments::rng::UniformStream;
use grassmann_mv::experiments::{run_error_sweep, ExperimentConfig, Method, Scenario, TranscendentalCurve};
use grassmann_mv::interpolant::{fit_hermite, fit_lagrange};
use grassmann_mv::kernels::{cholesky_spd, householder_qr, solve_triangular, svd, Side, Triangle};
use grassmann_mv::manifold::{
    build_chart, projector_velocity_error, reconstruct, reconstruct_velocity, subspace_error, to_coordinates,
    MvCoordinates,
};
use grassmann_mv::polybasis::{
    chebyshev_nodes, cva_eval, cva_fit_augmented, cva_fit_surrogate, equispaced, va_eval, va_fit,
};
use grassmann_mv::{DenseMatrix, HermiteApproach, RefIndex};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig::with_cases(cases)
}

/// Horner evaluation of a polynomial and its derivative.
fn poly(coeffs: &[f64], t: f64) -> (f64, f64) {
    coeffs.iter().rev().fold((0.0, 0.0), |(v, d), &c| (v * t + c, d * t + v))
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn qr_residuals(seed in any::<u64>(), n in 1usize..120, p in 1usize..16) {
        let p = p.min(n);
        let mut rng = UniformStream::new(seed);
        let m = random_matrix(n, p, &mut rng);
        let (q_full, r) = householder_qr(&m).unwrap();
        prop_assert!(q_full.orthonormality_defect() <= 1e-13 * (n as f64).sqrt());
        let q = q_full.col_block(0, p);
        let scale = m.frobenius_norm();
        prop_assert!(q.matmul(&r).sub(&m).frobenius_norm() <= 1e-13 * scale);
        prop_assert!(q.orthonormality_defect() <= 1e-13 * (p as f64).sqrt().max(1.0));
        for i in 0..p {
            prop_assert!(r[(i, i)] >= 0.0);
        }
        let (again, _) = householder_qr(&m).unwrap();
        prop_assert!(again.as_slice().iter().zip(q_full.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn cholesky_inverts_shifted_gram(seed in any::<u64>(), rows in 1usize..40, p in 1usize..10) {
        let mut rng = UniformStream::new(seed);
        let xi = random_matrix(rows, p, &mut rng).scaled(3.0);
        let mut a = xi.t_matmul(&xi);
        a.axpy(1.0, &DenseMatrix::identity(p));
        let l = cholesky_spd(&a).unwrap();
        let y = solve_triangular(&l, &DenseMatrix::identity(p), Side::Left, Triangle::Lower, false).unwrap();
        let inv = solve_triangular(&l, &y, Side::Left, Triangle::Lower, true).unwrap();
        prop_assert!(a.matmul(&inv).sub(&DenseMatrix::identity(p)).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues(seed in any::<u64>(), rows in 1usize..30, cols in 1usize..12) {
        let mut rng = UniformStream::new(seed);
        let m = random_matrix(rows, cols, &mut rng);
        let ours = svd(&m).unwrap().sigma;
        let gram = nalgebra::DMatrix::from_column_slice(cols, cols, m.t_matmul(&m).as_slice());
        let mut oracle: Vec<f64> = gram.symmetric_eigenvalues().iter().map(|&l| l.max(0.0).sqrt()).collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        oracle.truncate(ours.len());
        let top = oracle[0].max(1.0);
        for (s, o) in ours.iter().zip(&oracle) {
            // squaring costs half the digits at the bottom of the spectrum
            prop_assert!((s - o).abs() <= 1e-12 * top + 1e-7 * top.sqrt(), "{s} vs {o}");
        }
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn round_trip(seed in any::<u64>(), n in 3usize..60, p in 1usize..6, size in 0.0f64..10.0) {
        let p = p.min(n - 1);
        let mut rng = UniformStream::new(seed);
        let chart = build_chart(&[random_point(n, p, &mut rng)], 0).unwrap();
        let mut xi = random_matrix(n - p, p, &mut rng);
        let norm = xi.frobenius_norm();
        xi = xi.scaled(size / norm);
        let u = reconstruct(&chart, &MvCoordinates::new(xi.clone())).unwrap();
        prop_assert!(u.orthonormality_defect() <= 1e-12);
        let back = to_coordinates(&chart, &u).unwrap().xi;
        prop_assert!(back.sub(&xi).frobenius_norm() <= 1e-11 * (1.0 + size));
    }

    #[test]
    fn gauge_invariance(seed in any::<u64>(), n in 3usize..60, p in 1usize..6) {
        let p = p.min(n - 1);
        let mut rng = UniformStream::new(seed);
        let chart = build_chart(&[random_point(n, p, &mut rng)], 0).unwrap();
        let u = random_point(n, p, &mut rng);
        let g = random_orthogonal(p, &mut rng);
        let a = to_coordinates(&chart, &u);
        let b = to_coordinates(&chart, &u.regauged(&g));
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(a.xi.sub(&b.xi).frobenius_norm() <= 1e-11 * (1.0 + a.xi.frobenius_norm()));
        }
    }

    #[test]
    fn isometry_at_origin(seed in any::<u64>(), n in 3usize..40, p in 1usize..5) {
        let p = p.min(n - 1);
        let mut rng = UniformStream::new(seed);
        let chart = build_chart(&[random_point(n, p, &mut rng)], 0).unwrap();
        let mut delta = random_matrix(n - p, p, &mut rng);
        let norm = delta.frobenius_norm();
        delta = delta.scaled(1.0 / norm);
        let base = reconstruct(&chart, &MvCoordinates::new(DenseMatrix::zeros(n - p, p))).unwrap();
        let direction = chart.from_local(DenseMatrix::zeros(p, p).vstack(&delta));
        let mut previous = f64::INFINITY;
        for eps in [1e-3, 1e-4, 1e-5] {
            let u = reconstruct(&chart, &MvCoordinates::new(delta.scaled(eps))).unwrap();
            let mut d = u.matrix().sub(base.matrix()).scaled(1.0 / eps);
            d.axpy(-1.0, &direction);
            let err = d.frobenius_norm();
            // first order in eps, plus rounding of the difference quotient
            prop_assert!(err <= eps + 1e-15 / eps, "eps {eps}: {err}");
            prop_assert!(err < previous);
            previous = err;
        }
    }

    #[test]
    fn linearized_error_bound(seed in any::<u64>(), n in 3usize..40, p in 1usize..5, size in 1e-9f64..1e-6) {
        let p = p.min(n - 1);
        let mut rng = UniformStream::new(seed);
        let chart = build_chart(&[random_point(n, p, &mut rng)], 0).unwrap();
        let mut delta = random_matrix(n - p, p, &mut rng);
        let norm = delta.frobenius_norm();
        delta = delta.scaled(size / norm);
        let exact = reconstruct(&chart, &MvCoordinates::new(DenseMatrix::zeros(n - p, p))).unwrap();
        let perturbed = reconstruct(&chart, &MvCoordinates::new(delta)).unwrap();
        let u1 = chart.to_local(exact.matrix()).row_block(0, p);
        let u1_norm = svd(&u1).unwrap().sigma[0];
        let err = subspace_error(&perturbed, &exact).absolute;
        prop_assert!(err <= std::f64::consts::SQRT_2 * u1_norm * size * (1.0 + 1e-3), "{err} vs {size}");
    }

    #[test]
    fn reconstructed_velocity_is_horizontal(seed in any::<u64>(), n in 3usize..40, p in 1usize..5) {
        let p = p.min(n - 1);
        let mut rng = UniformStream::new(seed);
        let chart = build_chart(&[random_point(n, p, &mut rng)], 0).unwrap();
        let xi = random_matrix(n - p, p, &mut rng).scaled(2.0);
        let xi_dot = random_matrix(n - p, p, &mut rng);
        let (u, lift) = reconstruct_velocity(&chart, &MvCoordinates::with_velocity(xi, xi_dot)).unwrap();
        let defect = u.matrix().t_matmul(lift.matrix()).frobenius_norm();
        prop_assert!(defect <= 1e-10 * lift.matrix().frobenius_norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn arnoldi_basis_stays_orthonormal(m in 2usize..42, a in -5.0f64..5.0, len in 0.1f64..10.0) {
        let nodes = equispaced(m, a, a + len);
        let model = va_fit(&nodes, &DenseMatrix::zeros(m, 1), m - 1).unwrap();
        prop_assert!(model.basis().orthonormality_defect() <= 1e-12);
    }

    #[test]
    fn polynomial_reproduction(seed in any::<u64>(), k in 0usize..20, extra in 0usize..5, a in -3.0f64..3.0, len in 0.5f64..4.0) {
        let mut rng = UniformStream::new(seed);
        let coeffs: Vec<f64> = (0..=k).map(|_| rng.next_symmetric()).collect();
        // shifted so that the monomial coefficients stay O(1) on the interval
        let center = a + 0.5 * len;
        let half = 0.5 * len;
        let f = |t: f64| poly(&coeffs, (t - center) / half);
        let m = k + 1 + extra;
        let nodes = chebyshev_nodes(m, a, a + len);
        let values = DenseMatrix::from_fn(m, 1, |i, _| f(nodes[i]).0);
        let derivs = DenseMatrix::from_fn(m, 1, |i, _| f(nodes[i]).1 / half);
        let probes = equispaced(37, a, a + len);
        let bound = 1e-12 * (1.0 + coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()) * (k as f64 + 1.0).powi(2);

        let lagrange = va_eval(&va_fit(&nodes, &values, k).unwrap(), &probes).unwrap();
        let hermite = cva_eval(&cva_fit_augmented(&nodes, &values, &derivs, k).unwrap(), &probes).unwrap().0;
        for (i, &t) in probes.iter().enumerate() {
            prop_assert!((lagrange[(i, 0)] - f(t).0).abs() <= bound, "V+A at {t}");
            prop_assert!((hermite[(i, 0)] - f(t).0).abs() <= bound, "CV+A at {t}");
        }
    }

    #[test]
    fn interpolation_at_nodes(seed in any::<u64>(), m in 2usize..12) {
        let mut rng = UniformStream::new(seed);
        let nodes = chebyshev_nodes(m, 0.0, 1.0);
        let values = random_matrix(m, 3, &mut rng);
        let derivs = random_matrix(m, 3, &mut rng);
        let lagrange = va_eval(&va_fit(&nodes, &values, m - 1).unwrap(), &nodes).unwrap();
        prop_assert!(lagrange.sub(&values).max_abs() <= 1e-11);
        for model in [
            cva_fit_augmented(&nodes, &values, &derivs, 2 * m - 1).unwrap(),
            cva_fit_surrogate(&nodes, &values, &derivs, 2 * m - 1, None).unwrap(),
        ] {
            let (v, d) = cva_eval(&model, &nodes).unwrap();
            prop_assert!(v.sub(&values).max_abs() <= 1e-10);
            prop_assert!(d.sub(&derivs).max_abs() <= 1e-10);
        }
    }

    #[test]
    fn approaches_agree_on_smooth_data(m in 3usize..13, a in 0.0f64..2.0) {
        let nodes = chebyshev_nodes(m, a, a + 1.0);
        let values = DenseMatrix::from_fn(m, 2, |i, c| (nodes[i] * (1.0 + c as f64)).sin());
        let derivs = DenseMatrix::from_fn(m, 2, |i, c| (1.0 + c as f64) * (nodes[i] * (1.0 + c as f64)).cos());
        let k = (2 * m - 1).min(23);
        let aug = cva_fit_augmented(&nodes, &values, &derivs, k).unwrap();
        let sur = cva_fit_surrogate(&nodes, &values, &derivs, k, None).unwrap();
        let probes = equispaced(41, a, a + 1.0);
        let (va, _) = cva_eval(&aug, &probes).unwrap();
        let (vs, _) = cva_eval(&sur, &probes).unwrap();
        prop_assert!(va.sub(&vs).frobenius_norm() <= 1e-9 * va.frobenius_norm());
    }

    #[test]
    fn derivative_output_is_the_derivative(seed in any::<u64>(), m in 2usize..10, t in 0.05f64..0.95) {
        let mut rng = UniformStream::new(seed);
        let nodes = chebyshev_nodes(m, 0.0, 1.0);
        let values = random_matrix(m, 2, &mut rng);
        let derivs = random_matrix(m, 2, &mut rng);
        let model = cva_fit_augmented(&nodes, &values, &derivs, 2 * m - 1).unwrap();
        let exact = cva_eval(&model, &[t]).unwrap().1;
        let check = FdCheck::run(|s| cva_eval(&model, &[s]).unwrap().0, t, &exact);
        prop_assert!(check.passes(), "{} {} ratio {}", check.coarse, check.fine, check.ratio());
    }

    #[test]
    fn confluent_vandermonde_lies_in_the_basis(m in 1usize..9) {
        let nodes = chebyshev_nodes(m, -1.0, 1.0);
        let degree = 2 * m - 1;
        let model = cva_fit_augmented(&nodes, &DenseMatrix::zeros(m, 1), &DenseMatrix::zeros(m, 1), degree).unwrap();
        let q = model.basis();
        let x: Vec<f64> = nodes.iter().map(|&t| model.map().apply(t)).collect();
        for j in 0..=degree {
            let col = DenseMatrix::from_fn(2 * m, 1, |i, _| {
                if i < m {
                    x[i].powi(j as i32)
                } else if j == 0 {
                    0.0
                } else {
                    j as f64 * x[i - m].powi(j as i32 - 1)
                }
            });
            let mut residual = col.clone();
            residual.axpy(-1.0, &q.matmul(&q.t_matmul(&col)));
            prop_assert!(residual.frobenius_norm() <= 1e-8 * col.frobenius_norm().max(1.0), "column {j}");
        }
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn interpolant_reproduces_samples(seed in any::<u64>(), n in 12usize..80, p in 1usize..5, m in 2usize..9) {
        let curve = TranscendentalCurve::new(n, p, seed).unwrap();
        let nodes = chebyshev_nodes(m, 0.0, 1.0);
        let (samples, lifts): (Vec<_>, Vec<_>) = nodes.iter().map(|&t| curve.sample(t).unwrap()).unzip();
        let lagrange = fit_lagrange(&nodes, &samples, None, RefIndex::Midpoint).unwrap();
        for (u, truth) in lagrange.evaluate_many(&nodes).unwrap().iter().zip(&samples) {
            prop_assert!(subspace_error(u, truth).absolute <= 1e-9);
            prop_assert!(u.orthonormality_defect() <= 1e-12);
        }
        let hermite = fit_hermite(&nodes, &samples, &lifts, None, HermiteApproach::Augmented, RefIndex::Midpoint).unwrap();
        for ((u, d), (truth, lift)) in hermite.evaluate_many_with_velocity(&nodes).unwrap().iter().zip(samples.iter().zip(&lifts)) {
            prop_assert!(subspace_error(u, truth).absolute <= 1e-9);
            prop_assert!(projector_velocity_error(u, d, truth, lift).0 <= 1e-8);
        }
    }

    #[test]
    fn gauge_robustness(seed in any::<u64>(), n in 12usize..60, p in 1usize..5, m in 3usize..8) {
        let curve = TranscendentalCurve::new(n, p, seed).unwrap();
        let mut rng = UniformStream::new(seed ^ 0x5eed);
        let nodes = chebyshev_nodes(m, 0.0, 1.0);
        let (samples, lifts): (Vec<_>, Vec<_>) = nodes.iter().map(|&t| curve.sample(t).unwrap()).unzip();
        let gauges: Vec<_> = (0..m).map(|_| random_orthogonal(p, &mut rng)).collect();
        let moved: Vec<_> = samples.iter().zip(&gauges).map(|(u, g)| u.regauged(g)).collect();
        let moved_lifts: Vec<_> = lifts
            .iter()
            .zip(&moved)
            .zip(&gauges)
            .map(|((d, u), g)| grassmann_mv::TangentLift::new(u, d.matrix().matmul(g)).unwrap())
            .collect();
        let probes = equispaced(25, 0.0, 1.0);
        let a = fit_hermite(&nodes, &samples, &lifts, None, HermiteApproach::Augmented, RefIndex::Midpoint).unwrap();
        let b = fit_hermite(&nodes, &moved, &moved_lifts, None, HermiteApproach::Augmented, RefIndex::Midpoint).unwrap();
        for (x, y) in a.evaluate_many(&probes).unwrap().iter().zip(&b.evaluate_many(&probes).unwrap()) {
            prop_assert!(subspace_error(x, y).absolute <= 1e-10);
        }
    }

    #[test]
    fn surrogate_matches_augmented_on_curves(seed in any::<u64>(), m in 3usize..10) {
        let curve = TranscendentalCurve::new(40, 3, seed).unwrap();
        let nodes = chebyshev_nodes(m, 0.0, 1.0);
        let (samples, lifts): (Vec<_>, Vec<_>) = nodes.iter().map(|&t| curve.sample(t).unwrap()).unzip();
        let probes = equispaced(31, 0.0, 1.0);
        let fit = |approach| {
            fit_hermite(&nodes, &samples, &lifts, None, approach, RefIndex::Midpoint)
                .unwrap()
                .evaluate_many(&probes)
                .unwrap()
        };
        for (x, y) in fit(HermiteApproach::Augmented).iter().zip(&fit(HermiteApproach::Surrogate)) {
            prop_assert!(subspace_error(x, y).absolute <= 1e-8);
        }
    }

    #[test]
    fn maxvol_never_increases(seed in any::<u64>(), n in 6usize..50, p in 1usize..5, count in 1usize..6) {
        let p = p.min(n / 2);
        let mut rng = UniformStream::new(seed);
        let samples: Vec<_> = (0..count).map(|_| random_point(n, p, &mut rng)).collect();
        let (chart, history) = maxvol_trace(&samples, 200).unwrap();
        prop_assert!(history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(chart.objective(&samples) <= PermutationChart::identity(n, p).objective(&samples));
        prop_assert_eq!(chart.objective(&samples), *history.last().unwrap());
    }
}

#[test]
fn spectral_convergence_in_node_count() {
    let mut errors = Vec::new();
    for m in [4, 6, 8, 10, 12] {
        let mut config = ExperimentConfig::for_scenario(Scenario::Example1, 0).small();
        config.m = m;
        config.degree = 2 * m - 1;
        config.methods = vec![Method::MvCva];
        errors.push(run_error_sweep(&config).unwrap().max_error(Method::MvCva));
    }
    let floor = 1e-12;
    for w in errors.windows(2) {
        assert!(w[1] <= w[0] || w[1] <= 10.0 * floor, "{errors:?}");
    }
    assert!(errors[errors.len() - 1] < 1e-10, "{errors:?}");
}

#[test]
fn sweep_csv_is_deterministic() {
    let mut config = ExperimentConfig::for_scenario(Scenario::Example2, 11).small();
    config.probes = 30;
    let run = || {
        let mut buf = Vec::new();
        write_sweep(&run_error_sweep(&config).unwrap().records, &mut buf).unwrap();
        buf
    };
    assert_eq!(run(), run());
}
