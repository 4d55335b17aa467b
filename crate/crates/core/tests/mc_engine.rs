use srheat_core::free_lie::LieElement;
use srheat_core::mc_engine::{
    brownian_increments, brownian_lift, estimate_diag, kde_estimate, levy_characteristic, sample_mean,
    simulate_group_point, simulate_group_samples, Bandwidth, RngStream,
};
use srheat_core::signature::{log_signature, PiecewiseLinearPath};
use srheat_core::steptwo::{group_mul, StructureConstants};
use srheat_core::Error;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Mean and standard error of a slice.
fn moments(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn increments_have_the_right_law() {
    let c = StructureConstants::abelian(2);
    let t = 0.7;
    let data = simulate_group_samples(&c, t, 1, 1_000_000, 3, 0).unwrap();
    for i in 0..2 {
        let (m, se) = sample_mean(&data, 2, |r| r[i]);
        assert!(m.abs() < 4.0 * se, "mean {m} se {se}");
        let (v, _) = sample_mean(&data, 2, |r| r[i] * r[i]);
        assert!((v - t).abs() < 0.01 * t);
    }
    let (cov, _) = sample_mean(&data, 2, |r| r[0] * r[1]);
    assert!(cov.abs() < 0.01 * t);
    let s = RngStream::new(9, 1);
    assert_eq!(brownian_increments(3, 1.0, 10, &s).unwrap(), brownian_increments(3, 1.0, 10, &s).unwrap());
    assert!(matches!(brownian_increments(2, 1.0, 0, &s), Err(Error::InvalidArgument(_))));
    assert!(matches!(brownian_increments(2, -1.0, 4, &s), Err(Error::InvalidArgument(_))));
}

#[test]
fn lift_odd_grades_flip_under_negation() {
    for stream in 0..20 {
        let inc = brownian_increments(3, 1.0, 30, &RngStream::new(4, stream)).unwrap();
        let neg: Vec<Vec<f64>> = inc.iter().map(|d| d.iter().map(|v| -v).collect()).collect();
        let a = log_signature(&PiecewiseLinearPath::from_increments(&inc).unwrap(), 4).unwrap();
        let b = log_signature(&PiecewiseLinearPath::from_increments(&neg).unwrap(), 4).unwrap();
        for i in 0..a.coeffs().len() {
            let sign = if a.basis().grade(i) % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(b.coeffs()[i], sign * a.coeffs()[i]);
        }
    }
}

#[test]
fn lift_scaling_in_law() {
    // Δ_c U_1 and U_{c²} have the same law; compare second moments of a few
    // coordinates of the step-3 lift for c = 1/2.
    let count = 20_000u64;
    let c = 0.5;
    let lifts = |t: f64, seed: u64| -> Vec<LieElement<f64>> {
        (0..count).map(|i| brownian_lift(2, 3, t, 40, &RngStream::new(seed, i)).unwrap()).collect()
    };
    let a: Vec<LieElement<f64>> = lifts(1.0, 10).iter().map(|u| u.dilate(&c)).collect();
    let b = lifts(c * c, 11);
    for idx in 0..5 {
        for f in [|x: f64| x * x, |x: f64| x.abs()] {
            let va: Vec<f64> = a.iter().map(|u| f(u.coeffs()[idx])).collect();
            let vb: Vec<f64> = b.iter().map(|u| f(u.coeffs()[idx])).collect();
            let (ma, sa) = moments(&va);
            let (mb, sb) = moments(&vb);
            assert!((ma - mb).abs() < 3.0 * (sa * sa + sb * sb).sqrt(), "coordinate {idx}: {ma} vs {mb}");
        }
    }
}

#[test]
fn heisenberg_area_moments() {
    let c = StructureConstants::heisenberg();
    let data = simulate_group_samples(&c, 1.0, 200, 200_000, 5, 0).unwrap();
    let (mz, sz) = sample_mean(&data, 3, |r| r[2]);
    assert!(mz.abs() < 3.0 * sz);
    let (vz, svz) = sample_mean(&data, 3, |r| r[2] * r[2]);
    // −d²/dλ² of 1/cosh(λ/2) at 0 is 1/4; the piecewise-linear area loses
    // a fraction 1/(2m²)... of it, far below the statistical error here.
    assert!((vz - 0.25).abs() < 3.0 * svz, "Var z = {vz} ± {svz}");
}

#[test]
fn group_increments_compose_in_law() {
    let c = StructureConstants::heisenberg();
    let count = 100_000u64;
    let whole: Vec<Vec<f64>> = (0..count)
        .map(|i| {
            let g = simulate_group_point(&c, 1.0, 100, &RngStream::new(21, i)).unwrap();
            vec![g.x[0], g.z[0]]
        })
        .collect();
    let halves: Vec<Vec<f64>> = (0..count)
        .map(|i| {
            let a = simulate_group_point(&c, 0.5, 50, &RngStream::new(22, i)).unwrap();
            let b = simulate_group_point(&c, 0.5, 50, &RngStream::new(23, i)).unwrap();
            let g = group_mul(&a, &b, &c).unwrap();
            vec![g.x[0], g.z[0]]
        })
        .collect();
    for k in 0..2 {
        for pow in [1, 2] {
            let (ma, sa) = moments(&whole.iter().map(|r| r[k].powi(pow)).collect::<Vec<_>>());
            let (mb, sb) = moments(&halves.iter().map(|r| r[k].powi(pow)).collect::<Vec<_>>());
            assert!((ma - mb).abs() < 3.0 * (sa * sa + sb * sb).sqrt(), "k={k} pow={pow}: {ma} vs {mb}");
        }
    }
}

#[test]
fn kde_on_gaussian_samples() {
    let c = StructureConstants::abelian(2);
    let data = simulate_group_samples(&c, 1.0, 1, 1_000_000, 8, 0).unwrap();
    let truth = 1.0 / TWO_PI;
    let est = kde_estimate(&data, 2, &[0.0, 0.0], &[0.05, 0.05]).unwrap();
    assert!((est.value - truth).abs() < 0.03 * truth);
    // At the origin the smoothed density is 1/(2π(1+h²)), increasing to the truth.
    let sweep: Vec<_> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&h| kde_estimate(&data, 2, &[0.0, 0.0], &[h, h]).unwrap())
        .collect();
    assert!(sweep[0].value < sweep[1].value && sweep[1].value < sweep[2].value + 2.0 * est.stderr);
    for (e, h) in sweep.iter().zip([0.2, 0.1, 0.05]) {
        let smoothed = truth / (1.0 + h * h);
        assert!((e.value - smoothed).abs() < 3.0 * e.stderr, "h={h}: {} vs {smoothed}", e.value);
    }
    let far = kde_estimate(&data, 2, &[40.0, 40.0], &[0.1, 0.1]).unwrap();
    assert!(far.value < 1e-300);
    assert!(kde_estimate(&data, 2, &[0.0, 0.0], &[-0.1, 0.1]).is_err());
}

#[test]
fn abelian_diagonal_estimate() {
    let est = estimate_diag(&StructureConstants::abelian(2), 1.0, 1_000_000, 1, &Bandwidth::Fixed(0.05), 17).unwrap();
    let truth = 1.0 / TWO_PI;
    assert!((est.value - truth).abs() < 0.03 * truth);
    assert_eq!(est.samples, 1_000_000);
    assert_eq!(est.h, Some(vec![0.05, 0.05]));
    let plug = estimate_diag(&StructureConstants::abelian(2), 1.0, 100_000, 1, &Bandwidth::PlugIn, 17).unwrap();
    let h = plug.h.unwrap();
    assert!((h[0] - 1.06 * 1e5f64.powf(-1.0 / 6.0)).abs() < 0.02);
}

#[test]
fn heisenberg_diagonal_scaling() {
    // p_t(e,e) = t^{-2} p_1(e,e); bandwidths scale like the coordinates.
    let c = StructureConstants::heisenberg();
    let a = estimate_diag(&c, 1.0, 200_000, 100, &Bandwidth::PerAxis(vec![0.15, 0.15, 0.05]), 31).unwrap();
    let b = estimate_diag(&c, 0.25, 200_000, 100, &Bandwidth::PerAxis(vec![0.075, 0.075, 0.0125]), 32).unwrap();
    assert!((b.value / 16.0 - a.value).abs() < 0.1 * a.value, "{} vs {}", b.value / 16.0, a.value);
}

#[test]
fn characteristic_function_of_area() {
    let est = levy_characteristic(&[0.0, 1.0], 1.0, 200_000, 100, 0.1, 3).unwrap();
    // At λ = 0 this is the smoothed Gaussian density 1/(2π(1+h²)).
    let g0 = 1.0 / (TWO_PI * 1.01);
    assert!((est[0].value - g0).abs() < 3.0 * est[0].stderr);
    assert!(est[1].value < est[0].value);
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let c = StructureConstants::heisenberg();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| estimate_diag(&c, 1.0, 20_000, 20, &Bandwidth::PlugIn, 99).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    assert_eq!(a.h, b.h);
}
