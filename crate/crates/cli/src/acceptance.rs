//! Acceptance suite: one check per criterion, each printing a single
//! pass/fail line. Shared by `srheat verify` and the `acceptance` test target.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srheat_core::free_lie::{bch, hall_basis, witt_dimension, LieElement, Word};
use srheat_core::leading::{
    c0_contact3d, c0_cr, c0_riemannian, c0_steptwo, gauss_legendre, x_over_sinh, Measure, QuadOptions,
};
use srheat_core::mc_engine::{kde_estimate, levy_characteristic_from, simulate_group_point, simulate_group_samples, RngStream};
use srheat_core::signature::{chen_concat, log_signature, pwl_signature, PiecewiseLinearPath};
use srheat_core::steptwo::{
    group_inv, group_mul, heat_kernel_at, nilpotent_kernel, oscillatory_kernel, rotation, GroupPoint,
    StructureConstants,
};
use srheat_core::vf_analyzer::examples::{
    constant_frame, contact3d_frame, heisenberg_frame, martinet_frame, riemannian_frame,
};
use srheat_core::vf_analyzer::{
    check_equiregular, filtration, ode_flow, taylor_f, tensor_pushforward, Frame, PolyVectorField, Polynomial,
    DEFAULT_RANK_TOL,
};
use srheat_core::{BigRational, Scalar};

use crate::cli::run_cli;
use crate::structure::StructureSpec;

type Q = BigRational;

pub const CRITERIA: [u8; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];

/// Seed of every random draw in the suite.
pub const SEED: u64 = 7;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

/// Accumulates sub-checks of one criterion.
#[derive(Default)]
struct Checks {
    ok: bool,
    notes: Vec<String>,
    failures: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            ok: true,
            ..Default::default()
        }
    }

    fn check(&mut self, pass: bool, note: impl Into<String>) {
        let note = note.into();
        if !pass {
            self.ok = false;
            self.failures.push(note.clone());
        }
        self.notes.push(note);
    }

    fn finish(self) -> (bool, String) {
        if self.ok {
            (true, self.notes.join("; "))
        } else {
            (false, format!("failed: {}", self.failures.join("; ")))
        }
    }
}

pub fn name(id: u8) -> &'static str {
    match id {
        1 => "Levy-area characteristic function",
        2 => "contact/Heisenberg constant 1/4",
        3 => "Riemannian constant",
        4 => "CR family constants",
        5 => "step-two constant vs kernel scaling",
        6 => "step-two kernel sanity",
        7 => "free Lie algebra suite",
        8 => "Chen and scaling suite",
        9 => "pushforward of exp(u) vs nested operators",
        10 => "stochastic Taylor expansion order",
        11 => "filtration correctness",
        12 => "determinism",
        _ => "unknown criterion",
    }
}

/// Runs criterion `id`; `quick` shrinks Monte Carlo and quadrature sizes.
pub fn run(id: u8, quick: bool) -> CriterionResult {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(|| match id {
        1 => levy_area(quick),
        2 => contact_constant(quick),
        3 => riemannian(),
        4 => cr_family(),
        5 => steptwo_cross(),
        6 => kernel_sanity(quick),
        7 => algebra_suite(),
        8 => chen_suite(),
        9 => pushforward_identity(),
        10 => taylor_order(),
        11 => filtrations(),
        12 => determinism(quick),
        _ => (false, format!("no criterion {id}")),
    });
    let (passed, detail) = outcome.unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        (false, format!("panicked: {msg}"))
    });
    CriterionResult {
        id,
        name: name(id),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Heisenberg samples `(w¹, w², S)` at `t = 1`, shared by criteria 1 and 2.
fn heisenberg_samples(quick: bool) -> &'static (Vec<f64>, usize, usize) {
    static FULL: OnceLock<(Vec<f64>, usize, usize)> = OnceLock::new();
    static QUICK: OnceLock<(Vec<f64>, usize, usize)> = OnceLock::new();
    let (cell, count, m) = if quick {
        (&QUICK, 100_000, 200)
    } else {
        (&FULL, 1_000_000, 1000)
    };
    cell.get_or_init(|| {
        let c = StructureConstants::heisenberg();
        let data = simulate_group_samples(&c, 1.0, m, count, SEED, 0).expect("valid parameters");
        (data, count, m)
    })
}

fn levy_area(quick: bool) -> (bool, String) {
    let (data, count, m) = heisenberg_samples(quick);
    let lambdas = [0.5, 1.0, 3.0];
    let est = levy_characteristic_from(data, &lambdas, 0.05, *m, SEED).expect("valid bandwidth");
    let mut c = Checks::new();
    for (l, e) in lambdas.iter().zip(&est) {
        let exact = (l / 2.0) / (l / 2.0).sinh() / (2.0 * PI);
        let tol = (3.0 * e.stderr).max(0.02 * exact);
        c.check(
            (e.value - exact).abs() <= tol,
            format!("λ={l}: {:.5}±{:.5} vs {:.5}", e.value, e.stderr, exact),
        );
    }
    c.notes.push(format!("N={count}, m={m}, h=0.05"));
    c.finish()
}

fn contact_constant(quick: bool) -> (bool, String) {
    let mut c = Checks::new();
    let opts = QuadOptions::default();
    let r = c0_contact3d(&opts).expect("quadrature");
    c.check((r.value - 0.25).abs() < 1e-8, format!("c0 = {:.12} (ν={})", r.value, r.nu));
    c.check(r.nu == 4, "ν = 4");

    // estimate_diag(Heisenberg, t = 1) on the shared samples.
    let (data, count, _) = heisenberg_samples(quick);
    let h = [0.1, 0.1, 0.03];
    let e = kde_estimate(data, 3, &[0.0; 3], &h).expect("valid bandwidth");
    c.check(
        rel(e.value, 0.25) < 0.05,
        format!("MC p_1(e,e) = {:.4}±{:.4} (N={count}, h={h:?})", e.value, e.stderr),
    );

    let heis = StructureConstants::heisenberg();
    let e0 = GroupPoint::identity(&heis);
    let base = heat_kernel_at(1.0, &heis, &e0, &opts).expect("kernel").value;
    let worst = [0.25, 0.5, 2.0, 4.0]
        .iter()
        .map(|&t| {
            let v = heat_kernel_at(t, &heis, &e0, &opts).expect("kernel").value * t * t;
            (v - base).abs()
        })
        .fold(0.0, f64::max);
    c.check(worst < 1e-12, format!("max |p̂_t(e)t² − p̂_1(e)| = {worst:.1e}"));
    c.finish()
}

fn riemannian() -> (bool, String) {
    let mut c = Checks::new();
    for d in 1..=3 {
        let r = c0_riemannian(d).expect("closed form");
        let exact = (2.0 * PI).powf(-(d as f64) / 2.0);
        c.check(r.value == exact && r.nu == d, format!("d={d}: {:.15}", r.value));
    }
    c.finish()
}

/// Composite Simpson on `[0, b]` with `2m` panels, independent of the
/// Gauss–Legendre machinery.
fn simpson(f: impl Fn(f64) -> f64, b: f64, m: usize) -> f64 {
    let h = b / (2 * m) as f64;
    let mut s = f(0.0) + f(b);
    for i in 1..2 * m {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

fn cr_family() -> (bool, String) {
    let mut c = Checks::new();
    let opts = QuadOptions::default();
    let pi2 = 2.0 * simpson(|l| x_over_sinh(l / 2.0), 120.0, 200_000);
    let c1 = c0_cr(1, &opts).expect("quadrature");
    let oracle1 = 0.5 * pi2 / (4.0 * PI * PI);
    c.check(
        (c1.value - 0.125).abs() < 1e-8 && (c1.value - oracle1).abs() < 1e-8,
        format!("k=1: {:.12} (Simpson oracle {:.12})", c1.value, oracle1),
    );
    let c2 = c0_cr(2, &opts).expect("quadrature");
    let sq = 2.0 * simpson(|l| x_over_sinh(l / 2.0).powi(2), 80.0, 200_000);
    let oracle2 = 0.5 / (2.0 * PI) * sq / (4.0 * PI * PI);
    c.check(
        (c2.value - oracle2).abs() < 1e-6 && (c2.value - 1.0 / (24.0 * PI)).abs() < 1e-6,
        format!("k=2: {:.12} (Simpson oracle {:.12}, 1/(24π) = {:.12})", c2.value, oracle2, 1.0 / (24.0 * PI)),
    );
    c.finish()
}

fn rank2_example() -> StructureConstants {
    StructureConstants::new(
        4,
        vec![
            rotation(4, 0, 1, 1.0) + rotation(4, 2, 3, 0.5),
            rotation(4, 0, 2, 1.0) + rotation(4, 1, 3, -0.7),
        ],
    )
    .expect("skew matrices")
}

fn steptwo_cross() -> (bool, String) {
    let mut c = Checks::new();
    let opts = QuadOptions::default();
    for (label, s) in [("Heisenberg", StructureConstants::heisenberg()), ("n=4,p=2", rank2_example())] {
        let c0 = c0_steptwo(&s, Measure::Lebesgue, &opts).expect("quadrature");
        let e = GroupPoint::identity(&s);
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for &t in &[0.5, 1.0, 2.0] {
            let k = nilpotent_kernel(t, &s, &e, &e, &opts).expect("kernel");
            let f = t.powf(c0.nu as f64 / 2.0);
            let diff = (k.value * f - c0.value).abs();
            ok &= diff <= c0.error + k.error * f + 1e-12 * c0.value;
            worst = worst.max(diff);
        }
        c.check(ok, format!("{label}: c0 = {:.10}, max diff {worst:.1e}", c0.value));
    }
    let s = rank2_example();
    let base = c0_steptwo(&s, Measure::Lebesgue, &opts).expect("quadrature");
    let a = DMatrix::from_fn(4, 4, |i, j| ((3 * i + 5 * j) as f64 + 0.5).cos());
    let q = a.qr().q();
    let rot = c0_steptwo(&s.conjugated(&q).expect("orthogonal"), Measure::Lebesgue, &opts).expect("quadrature");
    let tol = 10.0 * (base.error + rot.error) + 1e-10 * base.value;
    c.check(
        (rot.value - base.value).abs() <= tol,
        format!("QᵀCQ invariance diff {:.1e}", (rot.value - base.value).abs()),
    );
    c.finish()
}

/// `∫ p̂_1` over `[−6,6]² × [−3,3]` by tensor Gauss–Legendre (evenness used).
pub fn heisenberg_mass(nodes: usize) -> f64 {
    let c = StructureConstants::heisenberg();
    let opts = QuadOptions {
        rel_tol: 1e-9,
        ..QuadOptions::default()
    };
    let rule = gauss_legendre(nodes);
    let (xs, ws) = (&rule.0, &rule.1);
    let map = |a: f64, s: f64| a * (s + 1.0) / 2.0;
    let mut total = 0.0;
    for (i, (&s1, &w1)) in xs.iter().zip(ws).enumerate() {
        for (&s2, &w2) in xs.iter().zip(ws).skip(i) {
            let sym = if s2 == s1 { 1.0 } else { 2.0 };
            for (&s3, &w3) in xs.iter().zip(ws) {
                let g = GroupPoint::new(vec![map(6.0, s1), map(6.0, s2)], vec![map(3.0, s3)]);
                let v = heat_kernel_at(1.0, &c, &g, &opts).expect("kernel").value;
                total += sym * w1 * w2 * w3 * 3.0 * 3.0 * 1.5 * v;
            }
        }
    }
    8.0 * total
}

fn kernel_sanity(quick: bool) -> (bool, String) {
    let mut c = Checks::new();
    let mass = heisenberg_mass(if quick { 12 } else { 20 });
    c.check((0.99..=1.001).contains(&mass), format!("6σ-box mass {mass:.6}"));

    let heis = StructureConstants::heisenberg();
    let opts = QuadOptions {
        rel_tol: 1e-7,
        start_nodes: 17,
        ..QuadOptions::default()
    };
    let (s, t) = (0.25, 0.75);
    let count = if quick { 2000 } else { 8000 };
    let samples: Vec<GroupPoint> = (0..count)
        .map(|i| simulate_group_point(&heis, s, 200, &RngStream::new(SEED, 1_000_000 + i)).expect("sample"))
        .collect();
    for g in [
        GroupPoint::identity(&heis),
        GroupPoint::new(vec![0.5, -0.3], vec![0.2]),
        GroupPoint::new(vec![-0.8, 0.6], vec![-0.4]),
    ] {
        let mean = samples
            .iter()
            .map(|h| {
                let u = group_mul(&group_inv(h, &heis).expect("shape"), &g, &heis).expect("shape");
                heat_kernel_at(t, &heis, &u, &opts).expect("kernel").value
            })
            .sum::<f64>()
            / count as f64;
        let exact = heat_kernel_at(s + t, &heis, &g, &opts).expect("kernel").value;
        c.check(
            rel(mean, exact) < 0.03,
            format!("(p̂_{s}∗p̂_{t})({:?},{:?}) = {mean:.5} vs {exact:.5}", g.x, g.z),
        );
    }

    let x = [0.3, -0.4, 1.1];
    let y = [-0.2, 0.5, 0.0];
    let k = oscillatory_kernel(0.8, &DMatrix::zeros(3, 3), &x, &y).expect("kernel");
    let r2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
    let gauss = (2.0 * PI * 0.8).powf(-1.5) * (-r2 / 1.6).exp();
    c.check(
        (k.re - gauss).abs() < 1e-12 && k.im.abs() < 1e-12,
        format!("Ξ=0 Gaussian diff {:.1e}", (k.re - gauss).abs()),
    );
    c.finish()
}

fn random_lie(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> LieElement<f64> {
    let b = hall_basis(n, depth).expect("small basis");
    let coeffs = (0..b.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    LieElement::new(b, coeffs).expect("matching length")
}

/// Lyndon words of length `k` over `n` letters, by brute force.
fn lyndon_count(n: usize, k: usize) -> usize {
    (0..n.pow(k as u32))
        .filter(|&idx| {
            let w = Word::from_level_index(idx, k, n);
            let l = w.letters();
            (1..k).all(|r| {
                let rot: Vec<u32> = l[r..].iter().chain(&l[..r]).copied().collect();
                l < rot.as_slice()
            })
        })
        .count()
}

fn algebra_suite() -> (bool, String) {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cases = 120;
    let mut worst = [0.0f64; 5];
    for _ in 0..cases {
        let n = rng.random_range(1..=3);
        let depth = rng.random_range(1..=5);
        let (a, b, d) = (random_lie(&mut rng, n, depth), random_lie(&mut rng, n, depth), random_lie(&mut rng, n, depth));
        let zero = LieElement::zero(n, depth).expect("small basis");
        let bch2 = |x: &LieElement<f64>, y: &LieElement<f64>| bch(x, y).expect("same algebra");
        worst[0] = worst[0].max(a.exp().log().expect("grouplike").max_abs_diff(&a));
        worst[1] = worst[1]
            .max(bch2(&a, &zero).max_abs_diff(&a))
            .max(bch2(&a, &-&a).max_abs_diff(&zero))
            .max(bch2(&bch2(&a, &b), &d).max_abs_diff(&bch2(&a, &bch2(&b, &d))));
        let s = rng.random_range(-1.0..1.0);
        worst[2] = worst[2].max(bch2(&a.dilate(&s), &b.dilate(&s)).max_abs_diff(&bch2(&a, &b).dilate(&s)));
        let k = rng.random_range(1..=depth);
        let p = |x: &LieElement<f64>| x.project(k).expect("k <= depth");
        worst[3] = worst[3]
            .max(p(&bch2(&a, &b)).max_abs_diff(&bch2(&p(&a), &p(&b))))
            .max(p(&a.dilate(&s)).max_abs_diff(&p(&a).dilate(&s)))
            .max(a.exp().project(k).expect("k <= depth").max_abs_diff(&p(&a).exp()));
    }
    let names = ["exp/log", "BCH group axioms", "dilation automorphism", "projection consistency"];
    for (name, w) in names.iter().zip(worst) {
        c.check(w < 1e-12, format!("{name} max err {w:.1e}"));
    }
    c.notes.push(format!("{cases} random cases, n≤3, N≤5"));
    let mut witt_ok = true;
    for n in 1..=4 {
        for depth in 1..=6 {
            let sizes = hall_basis(n, depth).expect("small basis").grade_sizes();
            witt_ok &= (1..=depth).all(|k| sizes[k - 1] == lyndon_count(n, k) && sizes[k - 1] == witt_dimension(n, k));
        }
    }
    c.check(witt_ok, "Hall grading = Witt counts (n≤4, N≤6)");
    c.finish()
}

fn random_path(rng: &mut ChaCha8Rng, n: usize) -> PiecewiseLinearPath<f64> {
    let m = rng.random_range(2..6);
    let v = (0..m).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    PiecewiseLinearPath::from_vertices(v).expect("valid path")
}

fn chen_suite() -> (bool, String) {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut chen, mut scale) = (0.0f64, 0.0f64);
    let mut parity = true;
    for _ in 0..100 {
        let n = rng.random_range(1..=3);
        let p = random_path(&mut rng, n);
        let q = random_path(&mut rng, n);
        let joined = pwl_signature(&p.concat(&q).expect("same dim"), 4).expect("signature");
        let prod = chen_concat(&pwl_signature(&p, 4).expect("signature"), &pwl_signature(&q, 4).expect("signature"))
            .expect("same algebra");
        chen = chen.max(joined.max_abs_diff(&prod));
        let s = rng.random_range(-2.0..2.0);
        let lhs = pwl_signature(&p.scaled(&s), 4).expect("signature");
        scale = scale.max(lhs.max_abs_diff(&pwl_signature(&p, 4).expect("signature").dilate(&s)));
        let a = log_signature(&p, 5).expect("log");
        let b = log_signature(&p.negated(), 5).expect("log");
        for i in 0..a.coeffs().len() {
            let sign = if a.basis().grade(i) % 2 == 0 { 1.0 } else { -1.0 };
            parity &= b.coeffs()[i] == sign * a.coeffs()[i];
        }
    }
    c.check(chen < 1e-12, format!("Chen identity max err {chen:.1e}"));
    c.check(scale < 1e-12, format!("Δ_c scaling max err {scale:.1e}"));
    c.check(parity, "grade parity flip under negation exact");
    c.notes.push("100 random paths".into());
    c.finish()
}

fn random_frame(rng: &mut ChaCha8Rng) -> Frame<f64> {
    let mut poly = || {
        let mut terms = Vec::new();
        for a in 0..=2u32 {
            for b in 0..=2 - a {
                for e in 0..=2 - a - b {
                    terms.push((vec![a, b, e], rng.random_range(-1.0..1.0)));
                }
            }
        }
        Polynomial::from_terms(3, terms).expect("three variables")
    };
    let fields = (0..2)
        .map(|_| PolyVectorField::new(vec![poly(), poly(), poly()]).expect("d = 3"))
        .collect();
    Frame::new(fields).expect("consistent frame")
}

/// `Σ_k 1/k! Σ_{|J1|+…+|Jk| ≤ N} (V_[J1] ⋯ V_[Jk] Id)(x) u^{J1} ⋯ u^{Jk}`,
/// expanded tuple by tuple.
fn nested_operator_sum(frame: &Frame<f64>, x: &[f64], u: &LieElement<f64>) -> Vec<f64> {
    let basis = u.basis().clone();
    let fields = frame.hall_fields(u.depth()).expect("fields");
    let d = frame.dim();
    let mut out = vec![0.0; d];
    let mut stack: Vec<(Vec<Polynomial<f64>>, f64, usize, usize)> =
        vec![((0..d).map(|i| Polynomial::var(d, i)).collect(), 1.0, 0, 0)];
    while let Some((funcs, weight, k, grade)) = stack.pop() {
        for j in 0..basis.len() {
            let g = grade + basis.grade(j);
            if g > u.depth() {
                continue;
            }
            let next: Vec<Polynomial<f64>> = funcs.iter().map(|p| fields[j].apply(p)).collect();
            let w = weight * u.coeffs()[j] / (k + 1) as f64;
            for (o, p) in out.iter_mut().zip(&next) {
                *o += w * p.eval_f64(x);
            }
            stack.push((next, w, k + 1, g));
        }
    }
    out
}

fn pushforward_identity() -> (bool, String) {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst = 0.0f64;
    let frames = 50;
    for case in 0..frames {
        let depth = 1 + case % 4;
        let frame = random_frame(&mut rng);
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let u = {
            let b = hall_basis(2, depth).expect("small basis");
            let coeffs = (0..b.len()).map(|_| rng.random_range(-0.5..0.5)).collect();
            LieElement::new(b, coeffs).expect("matching length")
        };
        let lhs = tensor_pushforward(&frame, &x, &u.exp()).expect("pushforward");
        let rhs = nested_operator_sum(&frame, &x, &u);
        for (a, b) in lhs.iter().zip(&rhs) {
            worst = worst.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    c.check(worst < 1e-9, format!("{frames} random frames (d=3, n=2, N≤4), max err {worst:.1e}"));
    c.finish()
}

/// Least-squares slope of `ln err` against `ln ε`.
fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
}

fn taylor_order() -> (bool, String) {
    let start = Instant::now();
    let mut c = Checks::new();
    // Contact normal frame with non-vanishing β = x3, γ = x1 away from 0.
    let frame = contact3d_frame(&Polynomial::var(3, 2), &Polynomial::var(3, 0));
    let x = [0.1, -0.2, 0.3];
    let pi2 = 2.0 * PI;
    let driver = |eps: f64| {
        let v = (0..=64)
            .map(|j| {
                let s = j as f64 / 64.0;
                vec![eps * ((pi2 * s).sin() + s), eps * (1.0 - (pi2 * s).cos() + s * s / 2.0)]
            })
            .collect();
        PiecewiseLinearPath::from_vertices(v).expect("valid path")
    };
    for depth in 1..=3 {
        let pts: Vec<(f64, f64)> = (3..=8)
            .map(|e| {
                let eps = 2f64.powi(-e);
                let h = driver(eps);
                let y = ode_flow(&frame, &x, &h, 1e-15).expect("flow");
                let f = taylor_f(&frame, &x, &log_signature(&h, depth).expect("log")).expect("taylor");
                let err = (0..3).map(|i| (y[i] - x[i] - f[i]).abs()).fold(0.0, f64::max);
                (eps.ln(), err.ln())
            })
            .collect();
        let slope = loglog_slope(&pts);
        c.check(slope >= depth as f64 + 0.7, format!("N={depth}: slope {slope:.2}"));
    }
    let secs = start.elapsed().as_secs_f64();
    c.check(secs < 60.0, format!("{secs:.1} s"));
    c.finish()
}

/// Rank of a rational matrix by Gaussian elimination.
fn exact_rank(mut rows: Vec<Vec<Q>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone() / rows[rank][col].clone();
                for k in col..ncols {
                    let sub = f.clone() * rows[rank][k].clone();
                    rows[r][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Growth vector from exact brackets at a rational point.
fn symbolic_growth(frame: &Frame<Q>, x: &[Q], nmax: usize) -> Vec<usize> {
    let d = frame.dim();
    let mut growth = Vec::new();
    for k in 1..=nmax {
        let fields = frame.hall_fields(k).expect("fields");
        let rows: Vec<Vec<Q>> = fields.iter().map(|v| v.eval(x)).collect();
        let r = exact_rank(rows);
        growth.push(r);
        if r == d {
            break;
        }
    }
    growth
}

fn nu_from(growth: &[usize]) -> usize {
    let mut prev = 0;
    growth
        .iter()
        .enumerate()
        .map(|(k, &g)| {
            let v = (k + 1) * (g - prev);
            prev = g;
            v
        })
        .sum()
}

fn filtrations() -> (bool, String) {
    let mut c = Checks::new();
    let q = |v: i64| Q::from_int(v);
    let mut compare = |label: &str, frame: &Frame<Q>, x: Vec<Q>, expect: &[usize], nu: usize| {
        let oracle = symbolic_growth(frame, &x, 6);
        let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
        let r = filtration(&frame.to_f64(), &xf, 6, DEFAULT_RANK_TOL).expect("certified");
        c.check(
            r.growth == oracle && oracle == expect && r.nu == Some(nu) && nu_from(&oracle) == nu && r.step == Some(expect.len()),
            format!("{label}: growth {:?} (oracle {:?}), ν={:?}, step {:?}", r.growth, oracle, r.nu, r.step),
        );
    };
    compare("Heisenberg", &heisenberg_frame(), vec![q(0); 3], &[2, 3], 4);
    compare("Martinet at 0", &martinet_frame(), vec![q(0); 3], &[2, 2, 3], 5);
    compare("Martinet at (1,0,0)", &martinet_frame(), vec![q(1), q(0), q(0)], &[2, 3], 4);
    let cols: Vec<Vec<Q>> = vec![
        vec![q(2), q(0), q(0)],
        vec![Q::from_ratio(1, 3), q(1), q(0)],
        vec![q(-1), Q::from_ratio(1, 2), q(3)],
    ];
    compare("constant Riemannian frame", &constant_frame(&cols).expect("square"), vec![q(1), q(-1), q(2)], &[3], 3);

    let grid: Vec<Vec<f64>> = [-0.5, 0.0, 0.5]
        .iter()
        .flat_map(|&a| [-0.2, 0.3].map(|b| vec![a, b, 0.1]))
        .collect();
    let v = check_equiregular(&martinet_frame(), &grid, 6, DEFAULT_RANK_TOL).expect("reports");
    c.check(!v.equiregular, format!("Martinet straddling grid flagged non-equiregular (first disagreement at point {:?})", v.first_disagreement));
    let contact = contact3d_frame(&Polynomial::var(3, 2), &Polynomial::var(3, 0));
    let near0: Vec<Vec<f64>> = [-0.1, 0.0, 0.1]
        .iter()
        .flat_map(|&a| [-0.1, 0.1].map(|b| vec![a, b, 0.05]))
        .collect();
    let v = check_equiregular(&contact, &near0, 6, DEFAULT_RANK_TOL).expect("reports");
    c.check(v.equiregular && v.all_certified, "contact frame equiregular near 0");

    for d in 1..=3usize {
        let g = DMatrix::from_fn(d, d, |i, j| if i == j { 2.0 + i as f64 } else { 0.3 });
        let f = riemannian_frame(&g).expect("positive definite");
        let r = filtration(&f, &vec![0.1; d], 3, DEFAULT_RANK_TOL).expect("certified");
        c.check(r.nu == Some(d) && r.step == Some(1), format!("Riemannian d={d}: ν={:?}", r.nu));
    }
    c.finish()
}

fn determinism(quick: bool) -> (bool, String) {
    let mut c = Checks::new();
    let dir = std::env::temp_dir();
    let path = dir.join(format!("srheat-acceptance-{}.json", std::process::id()));
    let spec = StructureSpec::from_constants(&StructureConstants::heisenberg());
    std::fs::write(&path, serde_json::to_string(&spec).expect("serialisable")).expect("temp file");
    let p = path.to_string_lossy().to_string();
    let samples = if quick { "20000" } else { "100000" };
    let run = |args: &[&str]| -> (i32, Vec<u8>) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(args.iter().copied(), &mut out, &mut err);
        (code, out)
    };
    let sim = |threads: &str| {
        run(&[
            "srheat", "--threads", threads, "simulate", "--structure", &p, "--time", "1", "--samples", samples,
            "--substeps", "50", "--seed", "12345",
        ])
    };
    let (a, b, d) = (sim("1"), sim("1"), sim("3"));
    c.check(
        a.0 == 0 && a == b && a == d,
        format!("simulate byte-identical over runs and 1/3 threads ({} bytes)", a.1.len()),
    );
    let c0 = |threads: &str| run(&["srheat", "--threads", threads, "c0", "--case", "steptwo", "--structure", &p]);
    let (e, f) = (c0("1"), c0("3"));
    c.check(e.0 == 0 && e == f && e == c0("1"), "c0 byte-identical over runs and 1/3 threads");
    let _ = std::fs::remove_file(&path);
    c.finish()
}
