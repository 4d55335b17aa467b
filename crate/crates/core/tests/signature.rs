use proptest::prelude::*;
use srheat_core::free_lie::{GrouplikeTensor, Word};
use srheat_core::signature::{chen_concat, levy_area, log_signature, pwl_signature, PiecewiseLinearPath};

/// Iterated integrals by fine sub-stepping: each level is integrated with the
/// trapezoidal rule against the previous level along every segment.
fn iterated_integral_oracle(path: &PiecewiseLinearPath<f64>, word: &[u32], substeps: usize) -> f64 {
    let k = word.len();
    // running[l] = integral over the word prefix of length l, running[0] = 1
    let mut running = vec![0.0; k + 1];
    running[0] = 1.0;
    for inc in path.increments() {
        let d: Vec<f64> = inc.iter().map(|v| v / substeps as f64).collect();
        for _ in 0..substeps {
            // Exact update for a linear piece up to the level: for each l,
            // ΔS_l = Σ_{j<l} S_j · Π_{i=j..l-1} d_{w_i} / (l-j)!
            let old = running.clone();
            for l in 1..=k {
                let mut add = 0.0;
                let mut prod = 1.0;
                let mut fact = 1.0;
                for j in (0..l).rev() {
                    prod *= d[(word[j] - 1) as usize];
                    fact *= (l - j) as f64;
                    add += old[j] * prod / fact;
                }
                running[l] = old[l] + add;
            }
        }
    }
    running[k]
}

#[test]
fn corner_path_iterated_integrals() {
    let p = PiecewiseLinearPath::from_vertices(vec![vec![0.0f64, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    let s = pwl_signature(&p, 2).unwrap();
    let w = |v: &[u32]| Word::new(v.to_vec(), 2).unwrap();
    assert_eq!(s.coefficient(&w(&[1, 2])), 1.0);
    assert_eq!(s.coefficient(&w(&[2, 1])), 0.0);
    let l = log_signature(&p, 2).unwrap();
    assert!((l.coeffs()[2] - 0.5).abs() < 1e-15);
}

#[test]
fn signature_matches_substep_oracle() {
    let p = PiecewiseLinearPath::from_vertices(vec![
        vec![0.0f64, 0.0, 0.0],
        vec![0.4, -0.3, 0.9],
        vec![-0.2, 0.8, 0.1],
        vec![0.5, 0.5, -0.6],
    ])
    .unwrap();
    let s = pwl_signature(&p, 4).unwrap();
    for idx in 0..81 {
        let w = Word::from_level_index(idx, 4, 3);
        let oracle = iterated_integral_oracle(&p, w.letters(), 7);
        assert!((s.coefficient(&w) - oracle).abs() < 1e-13, "{w}");
    }
}

#[test]
fn log_signature_of_reversal() {
    let p = PiecewiseLinearPath::from_vertices(vec![vec![0.0f64, 1.0], vec![0.3, -0.2], vec![1.5, 0.4]]).unwrap();
    let a = log_signature(&p, 5).unwrap();
    let b = log_signature(&p.reversed(), 5).unwrap();
    assert!((&a + &b).max_abs_diff(&(&a - &a)) < 1e-12);
}

#[test]
fn chen_identity_for_split_and_unit() {
    let p = PiecewiseLinearPath::from_vertices(vec![
        vec![0.0, 0.0],
        vec![1.0, 0.2],
        vec![0.5, 1.0],
        vec![-0.3, 0.4],
    ])
    .unwrap();
    let whole = pwl_signature(&p, 4).unwrap();
    for j in 1..3 {
        let (a, b) = p.split_at(j).unwrap();
        let prod = chen_concat(&pwl_signature(&a, 4).unwrap(), &pwl_signature(&b, 4).unwrap()).unwrap();
        assert!(prod.max_abs_diff(&whole) < 1e-12);
    }
    let id = GrouplikeTensor::identity(2, 4).unwrap();
    assert_eq!(chen_concat(&whole, &id).unwrap(), whole);
    assert!(chen_concat(&whole, &GrouplikeTensor::identity(3, 4).unwrap()).is_err());
}

#[test]
fn levy_area_green_oracle() {
    // Shoelace formula for a closed polygon.
    let poly = [[0.0, 0.0], [2.0, 0.0], [2.5, 1.5], [0.5, 2.0], [0.0, 0.0]];
    let shoelace: f64 = poly.windows(2).map(|w| w[0][0] * w[1][1] - w[1][0] * w[0][1]).sum::<f64>() / 2.0;
    let p = PiecewiseLinearPath::from_vertices(poly.iter().map(|v| v.to_vec()).collect()).unwrap();
    assert!((levy_area(&p).unwrap() - shoelace).abs() < 1e-14);
}

fn path(n: usize) -> impl Strategy<Value = PiecewiseLinearPath<f64>> {
    prop::collection::vec(prop::collection::vec(-1.0..1.0f64, n), 2..6)
        .prop_map(|v| PiecewiseLinearPath::from_vertices(v).unwrap())
}

fn paths() -> impl Strategy<Value = PiecewiseLinearPath<f64>> {
    (1usize..=3).prop_flat_map(path)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chen_identity(p in paths(), q0 in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 3), 2..5)) {
        let n = p.dim();
        let q = PiecewiseLinearPath::from_vertices(q0.into_iter().map(|v| v[..n].to_vec()).collect()).unwrap();
        let joined = pwl_signature(&p.concat(&q).unwrap(), 4).unwrap();
        let prod = chen_concat(&pwl_signature(&p, 4).unwrap(), &pwl_signature(&q, 4).unwrap()).unwrap();
        prop_assert!(joined.max_abs_diff(&prod) < 1e-12);
    }

    #[test]
    fn scaling_is_dilation(p in paths(), c in -2.0..2.0f64) {
        let lhs = pwl_signature(&p.scaled(&c), 4).unwrap();
        let rhs = pwl_signature(&p, 4).unwrap().dilate(&c);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn negation_flips_odd_grades(p in paths()) {
        let a = log_signature(&p, 5).unwrap();
        let b = log_signature(&p.negated(), 5).unwrap();
        for i in 0..a.coeffs().len() {
            let sign = if a.basis().grade(i) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert_eq!(b.coeffs()[i], sign * a.coeffs()[i]);
        }
    }

    #[test]
    fn reparametrization_invariance(p in paths(), gaps in prop::collection::vec(0.1..3.0f64, 5)) {
        let mut t = vec![0.0];
        for g in gaps.iter().take(p.segments()) {
            t.push(t.last().unwrap() + g);
        }
        let q = p.with_times(t).unwrap();
        prop_assert!(pwl_signature(&q, 4).unwrap().max_abs_diff(&pwl_signature(&p, 4).unwrap()) < 1e-12);
    }

    #[test]
    fn refinement_invariance(p in paths()) {
        let r = p.refined();
        prop_assert_eq!(r.segments(), 2 * p.segments());
        prop_assert!(pwl_signature(&r, 4).unwrap().max_abs_diff(&pwl_signature(&p, 4).unwrap()) < 1e-12);
    }

    #[test]
    fn projection_of_signature(p in paths()) {
        let s3 = pwl_signature(&p, 3).unwrap();
        let s2 = pwl_signature(&p, 2).unwrap();
        prop_assert!(s3.project(2).unwrap().max_abs_diff(&s2) < 1e-14);
    }

    #[test]
    fn levy_area_is_antisymmetric_part(p in path(2)) {
        let s = pwl_signature(&p, 2).unwrap();
        let w = |v: &[u32]| Word::new(v.to_vec(), 2).unwrap();
        let expect = 0.5 * (s.coefficient(&w(&[1, 2])) - s.coefficient(&w(&[2, 1])));
        prop_assert!((levy_area(&p).unwrap() - expect).abs() < 1e-14);
    }
}
