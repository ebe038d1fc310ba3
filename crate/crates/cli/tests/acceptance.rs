//! One PASS/FAIL line per acceptance criterion.
//!
//! Always exits 0 so the workspace test run reports the numbers without
//! aborting; set ACCEPTANCE_STRICT=1 to exit 1 when any criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use fracseries::compare::compare;
use fracseries::engine::{
    detect_closed_form, he_polynomials, iterate, load_problem, FieldRef, NonlinearTerm,
    ResidualEvaluator, SolutionBundle,
};
use fracseries::natural_transform::{
    default_su_grid, exponent_value, nt_caputo_image, nt_forward_numeric, nt_of_power, TableEntry,
};
use fracseries::reference_oracle::{l1_solve, L1Config, OracleGrid};
use fracseries::spatial_expr::{basis, sample_distance, sample_points, MultiIndex, SpatialExpr};
use fracseries::special_functions::{gamma, mittag_leffler};
use fracseries::{FracOrder, FracSeries, TimeSignal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// (β, v', v(0)) for v = t^β/Γ(β+1).
type CaputoCase = (f64, fn(f64) -> f64, f64);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn solve(name: &str, alpha: f64, terms: usize) -> SolutionBundle {
    iterate(&load_problem(&fixture(name), Some(alpha)).unwrap(), terms).unwrap()
}

fn simpson(f: impl Fn(f64) -> f64, end: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = end / n as f64;
    let inner: f64 = (1..n)
        .map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h))
        .sum();
    (f(0.0) + f(end) + inner) * h / 3.0
}

fn c1_transform_table() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for entry in TableEntry::defaults() {
        let sig = entry.signal();
        for (s, u) in default_su_grid() {
            let err = match nt_forward_numeric(&sig, s, u) {
                Ok(q) => (q.value - entry.closed_form(s, u)).abs(),
                Err(_) => f64::INFINITY,
            };
            worst = worst.max(err);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-6 && secs < 5.0,
        format!("max err {worst:.2e} (tol 1e-6) over 25 (s,u) points, {secs:.2} s (limit 5 s)"),
    )
}

/// D^α v(t) = 1/Γ(2−α) ∫_0^{t^(1−α)} v'(t − w^(1/(1−α))) dw.
fn caputo_by_quadrature(dv: fn(f64) -> f64, alpha: f64, t: f64) -> f64 {
    if alpha == 1.0 {
        return dv(t);
    }
    let p = 1.0 / (1.0 - alpha);
    simpson(|w| dv(t - w.powf(p)), t.powf(1.0 - alpha), 400) / gamma(2.0 - alpha).unwrap()
}

fn c2_caputo_image() -> Outcome {
    let cases: [CaputoCase; 3] = [(0.0, |_| 0.0, 1.0), (1.0, |_| 1.0, 0.0), (2.0, |t| t, 0.0)];
    let mut worst = 0.0_f64;
    for alpha in [0.3, 0.5, 0.9, 1.0] {
        let order = FracOrder::new(alpha).unwrap();
        for (beta, dv, v0) in cases {
            let image = nt_caputo_image(&nt_of_power(beta), order, v0).unwrap();
            let sig =
                TimeSignal::new(move |t| caputo_by_quadrature(dv, alpha, t)).with_growth(1e3, 10.0);
            for (s, u) in [(1.0, 1.0), (2.0, 0.5), (3.0, 2.0), (1.0, 0.6)] {
                let numeric = nt_forward_numeric(&sig, s, u)
                    .map(|q| q.value)
                    .unwrap_or(f64::NAN);
                let err = (image.eval(s, u) - numeric).abs();
                worst = if err.is_nan() {
                    f64::INFINITY
                } else {
                    worst.max(err)
                };
            }
        }
    }
    outcome(
        worst <= 1e-5,
        format!("max err {worst:.2e} (tol 1e-5), v in {{1, t, t^2/2}}, 4 orders"),
    )
}

/// erfc via the Maclaurin series of erf, independent of the library.
fn erfc(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    for n in 1..60 {
        term *= -x * x / n as f64;
        sum += term / (2 * n + 1) as f64;
    }
    1.0 - 2.0 / PI.sqrt() * sum
}

fn c3_mittag_leffler() -> Outcome {
    let mut worst = 0.0_f64;
    for i in 0..=100 {
        let z = -5.0 + 0.1 * i as f64;
        worst = worst.max((mittag_leffler(FracOrder::ONE, z).unwrap() - z.exp()).abs());
    }
    let half = mittag_leffler(FracOrder::new(0.5).unwrap(), -1.0).unwrap();
    let want = std::f64::consts::E * erfc(1.0);
    let err = (half - want).abs();
    outcome(
        worst <= 1e-10 && err <= 1e-8,
        format!(
            "|E_1 - exp| max {worst:.2e} (tol 1e-10); |E_1/2(-1) - e*erfc(1)| {err:.2e} (tol 1e-8)"
        ),
    )
}

fn c4_burgers() -> Outcome {
    let start = Instant::now();
    let sin_x = SpatialExpr::parse("sin(x)").unwrap();
    let mut coeff_err = 0.0_f64;
    let mut detected = true;
    for alpha in [0.5, 0.75, 1.0] {
        let sol = solve("burgers.frac", alpha, 6);
        for s in &sol.series {
            for k in 0..=6 {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let want = sin_x.scale(sign / gamma(k as f64 * alpha + 1.0).unwrap());
                coeff_err = coeff_err.max(sample_distance(&s.coeff(k), &want));
            }
            detected &= detect_closed_form(s).is_some_and(|cf| {
                (cf.lambda + 1.0).abs() < 1e-9 && sample_distance(&cf.profile, &sin_x) < 1e-9
            });
        }
    }
    let sol = solve("burgers.frac", 1.0, 20);
    let mut worst = 0.0_f64;
    for i in 0..=50 {
        let x = PI * i as f64 / 50.0;
        for j in 0..=50 {
            let t = j as f64 / 50.0;
            for s in &sol.series {
                worst = worst.max((s.eval(&[x], t, 20).unwrap() - (-t).exp() * x.sin()).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        coeff_err <= 1e-9 && detected && worst <= 1e-8 && secs < 10.0,
        format!(
            "coeff dist {coeff_err:.2e} (tol 1e-9), closed form (-1, sin x) {}, alpha=1 N=20 max err {worst:.2e} (tol 1e-8), {secs:.2} s",
            if detected { "detected" } else { "MISSING" }
        ),
    )
}

/// Coefficient of p^n in Π_f Σ_j p^j d_{f,j}, by plain polynomial multiplication.
fn expand_in_p(
    term: &NonlinearTerm,
    iterates: &[Vec<SpatialExpr>],
    n: usize,
    point: &[f64],
) -> f64 {
    let mut poly = vec![term.coeff];
    for f in &term.factors {
        let factor: Vec<f64> = iterates[f.component][..=n]
            .iter()
            .map(|v| v.partial(f.deriv).eval(point))
            .collect();
        let mut next = vec![0.0; poly.len() + factor.len() - 1];
        for (i, a) in poly.iter().enumerate() {
            for (j, b) in factor.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        poly = next;
    }
    poly[n]
}

fn c5_he_listings() -> Outcome {
    let sol = solve("burgers_gradient.frac", 0.5, 5);
    let prof: Vec<Vec<SpatialExpr>> = sol
        .iterates
        .iter()
        .map(|its| its.iter().enumerate().map(|(n, s)| s.coeff(n)).collect())
        .collect();
    let (v, w) = (&prof[0], &prof[1]);
    let dx = |e: &SpatialExpr| e.diff(0, 1);
    let listings = [
        [
            v[0].mul(&dx(&v[0])),
            v[0].mul(&dx(&v[1])).add(&v[1].mul(&dx(&v[0]))),
            v[0].mul(&dx(&v[2]))
                .add(&v[1].mul(&dx(&v[1])))
                .add(&v[2].mul(&dx(&v[0]))),
        ],
        [
            w[0].mul(&dx(&w[0])),
            w[0].mul(&dx(&w[1])).add(&w[1].mul(&dx(&w[0]))),
            w[0].mul(&dx(&w[2]))
                .add(&w[1].mul(&dx(&w[1])))
                .add(&w[2].mul(&dx(&w[0]))),
        ],
        [
            dx(&v[0]).mul(&dx(&w[0])),
            dx(&v[0]).mul(&dx(&w[1])).add(&dx(&v[1]).mul(&dx(&w[0]))),
            dx(&v[2])
                .mul(&dx(&w[0]))
                .add(&dx(&v[1]).mul(&dx(&w[1])))
                .add(&dx(&v[0]).mul(&dx(&w[2]))),
        ],
    ];
    let x1 = MultiIndex::along(0, 1);
    let pair = |a, b| NonlinearTerm {
        coeff: 1.0,
        factors: vec![a, b],
    };
    let terms = [
        pair(FieldRef::plain(0), FieldRef::new(0, x1)),
        pair(FieldRef::plain(1), FieldRef::new(1, x1)),
        pair(FieldRef::new(0, x1), FieldRef::new(1, x1)),
    ];
    let mut listing_err = 0.0_f64;
    let mut oracle_err = 0.0_f64;
    for (term, listing) in terms.iter().zip(&listings) {
        for (n, expected) in listing.iter().enumerate() {
            listing_err = listing_err.max(sample_distance(
                &he_polynomials(term, &prof, n).unwrap(),
                expected,
            ));
        }
        for n in 0..=4 {
            let h = he_polynomials(term, &prof, n).unwrap();
            for p in sample_points(1, 16, 5) {
                let want = expand_in_p(term, &prof, n, &p);
                oracle_err = oracle_err.max((h.eval(&p) - want).abs() / want.abs().max(1.0));
            }
        }
    }
    outcome(
        listing_err <= 1e-9 && oracle_err <= 1e-9,
        format!("H0..H2 vs listings {listing_err:.2e}, H0..H4 vs p-expansion {oracle_err:.2e} (tol 1e-9)"),
    )
}

fn c6_three_dimensional() -> Outcome {
    let ic = SpatialExpr::parse("exp(x + y + z)").unwrap();
    let mut coeff_err = 0.0_f64;
    for alpha in [0.5, 0.75, 1.0] {
        let sol = solve("diffusion3d.frac", alpha, 10);
        for k in 0..=10 {
            let want = ic.scale((-3.0f64).powi(k as i32) / gamma(k as f64 * alpha + 1.0).unwrap());
            let scale = want.max_abs_on(&sample_points(3, 32, 1)).max(1.0);
            coeff_err = coeff_err.max(sample_distance(&sol.series[0].coeff(k), &want) / scale);
        }
    }
    let spec = load_problem(&fixture("diffusion3d.frac"), Some(1.0)).unwrap();
    let sol = iterate(&spec, 15).unwrap();
    let samples: Vec<(Vec<f64>, f64)> = sample_points(3, 40, 8)
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            (
                p.iter().map(|c| (c + 1.5) / 3.0).collect(),
                0.5 * i as f64 / 39.0,
            )
        })
        .collect();
    let ev = ResidualEvaluator::new(&spec, &sol, 15).unwrap();
    let engine = samples
        .iter()
        .map(|(p, t)| ev.eval(p, *t).unwrap()[0])
        .fold(0.0, f64::max);
    let mut decaying = sol.clone();
    decaying.series = vec![FracSeries::mittag_leffler(FracOrder::ONE, -1.0, &ic, 20)];
    decaying.diagnostics.order = 20;
    let ev = ResidualEvaluator::new(&spec, &decaying, 20).unwrap();
    let decaying_min = samples
        .iter()
        .map(|(p, t)| ev.eval(p, *t).unwrap()[0])
        .fold(f64::INFINITY, f64::min);
    let lambda = sol.diagnostics.closed_forms[0].as_ref().map(|c| c.lambda);
    outcome(
        coeff_err <= 1e-12 && engine <= 1e-6 && decaying_min >= 1.0 && lambda.is_some_and(|l| (l + 3.0).abs() < 1e-9),
        format!(
            "a_k rel dist {coeff_err:.2e}, lambda {lambda:?}, N=15 residual max {engine:.2e} (tol 1e-6), exp(x+y+z-t) residual min {decaying_min:.3} (need >= 1)"
        ),
    )
}

fn exact_diffusion(x: f64, t: f64) -> f64 {
    x.sin() * mittag_leffler(FracOrder::new(0.5).unwrap(), -t.sqrt()).unwrap()
}

fn diffusion_oracle(n_x: usize, n_t: usize) -> OracleGrid {
    let cfg = L1Config {
        alpha: FracOrder::new(0.5).unwrap(),
        diffusivity: 1.0,
        domain: (0.0, PI),
        n_x,
        n_t,
        t_end: 0.5,
    };
    l1_solve(&cfg, &SpatialExpr::parse("sin(x)").unwrap(), |_, _| 0.0).unwrap()
}

fn c7_oracle() -> Outcome {
    let spec = load_problem(&fixture("diffusion1d.frac"), Some(0.5)).unwrap();
    let sol = iterate(&spec, 12).unwrap();
    let report = compare(&sol.series[0], &diffusion_oracle(201, 2000), 12).unwrap();

    // error against the exact solution: max over all t > 0, and at t = T
    let errors: Vec<(f64, f64)> = [500, 1000, 2000]
        .into_iter()
        .map(|n_t| {
            let g = diffusion_oracle(201, n_t);
            let mut all = 0.0_f64;
            let mut last = 0.0_f64;
            for (i, (&t, row)) in g.ts().iter().zip(g.values()).enumerate().skip(1) {
                let e = g
                    .xs()
                    .iter()
                    .zip(row)
                    .map(|(&x, &v)| (v - exact_diffusion(x, t)).abs())
                    .fold(0.0, f64::max);
                all = all.max(e);
                if i == n_t {
                    last = e;
                }
            }
            (all, last)
        })
        .collect();
    let rate = |f: fn(&(f64, f64)) -> f64| -> Vec<f64> {
        errors
            .windows(2)
            .map(|w| (f(&w[0]) / f(&w[1])).log2())
            .collect()
    };
    let all_rates = rate(|e| e.0);
    let final_rates = rate(|e| e.1);
    let target = 2.0 - 0.5;
    let order_ok = final_rates.iter().all(|r| (r - target).abs() <= 0.3);
    outcome(
        report.max_abs <= 5e-3 && order_ok,
        format!(
            "series vs L1 max abs {:.2e} (tol 5e-3); observed order at t=T {:.2?}, max over t>0 {:.2?} (want 1.5 +- 0.3)",
            report.max_abs, final_rates, all_rates
        ),
    )
}

fn c8_inverse_pairs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let b = basis(1);
    let points = sample_points(1, 16, 3);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let alpha = FracOrder::new(rng.gen_range(0.05..=1.0)).unwrap();
        let len = rng.gen_range(1..=6);
        let coeffs = (0..len)
            .map(|_| b[rng.gen_range(0..b.len())].scale(rng.gen_range(-2.0..2.0)))
            .collect();
        let v = FracSeries::new(alpha, 1, coeffs);
        let left = v.frac_integral().caputo_derivative();
        let right = v.caputo_derivative().frac_integral();
        let minus_a0 = v
            .sub(&FracSeries::constant_in_time(alpha, v.coeff(0)))
            .unwrap();
        for p in &points {
            for t in [0.1, 0.5, 1.0] {
                let v_val = v.eval(p, t, v.order()).unwrap();
                worst = worst.max((left.eval(p, t, left.order()).unwrap() - v_val).abs());
                let want = minus_a0.eval(p, t, minus_a0.order()).unwrap();
                worst = worst.max((right.eval(p, t, right.order()).unwrap() - want).abs());
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("50 random series, max pointwise err {worst:.2e} (tol 1e-12)"),
    )
}

fn c9_transform_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut exponents_exact = true;
    let mut coeff_err = 0.0_f64;
    for _ in 0..50 {
        let a = rng.gen_range(0.05..=1.0);
        let alpha = FracOrder::new(a).unwrap();
        let len = rng.gen_range(1..=8);
        let coeffs = (0..len)
            .map(|_| SpatialExpr::constant(1, rng.gen_range(-3.0..3.0)))
            .collect();
        let v = FracSeries::new(alpha, 1, coeffs);
        let lhs = v.frac_integral().transform_image().unwrap();
        let rhs = v.transform_image().unwrap().integrate_fractional(alpha);
        exponents_exact &= lhs.atoms().len() == rhs.atoms().len();
        for (x, y) in lhs.atoms().iter().zip(rhs.atoms()) {
            exponents_exact &= x.beta == y.beta && exponent_value(x.beta) >= 0.0;
            coeff_err = coeff_err.max((x.coeff - y.coeff).abs() / y.coeff.abs());
        }
    }
    outcome(
        exponents_exact && coeff_err <= 1e-13,
        format!(
            "50 random series, rational exponents {}, coefficient rel err {coeff_err:.2e} (tol 1e-13)",
            if exponents_exact { "identical" } else { "DIFFER" }
        ),
    )
}

fn c10_cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_fracseries");
    let dir = std::env::temp_dir().join(format!("fracseries-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut identical = true;
    for name in [
        "burgers.frac",
        "burgers_gradient.frac",
        "diffusion1d.frac",
        "diffusion3d.frac",
    ] {
        let outs: Vec<Vec<u8>> = ["a.csv", "b.csv"]
            .iter()
            .map(|f| {
                let out = dir.join(f);
                let status = Command::new(bin)
                    .args([
                        "solve",
                        "--problem",
                        fixture(name).to_str().unwrap(),
                        "--out",
                        out.to_str().unwrap(),
                    ])
                    .output()
                    .unwrap()
                    .status;
                if status.success() {
                    std::fs::read(&out).unwrap()
                } else {
                    Vec::new()
                }
            })
            .collect();
        identical &= !outs[0].is_empty() && outs[0] == outs[1];
    }
    let _ = std::fs::remove_dir_all(&dir);
    let check = Command::new(bin)
        .arg("transform-check")
        .output()
        .unwrap()
        .status
        .code();
    outcome(
        identical && check == Some(0),
        format!(
            "solve CSV byte-identical across runs on 4 fixtures: {identical}; transform-check exit {check:?}"
        ),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("transform table", c1_transform_table),
        ("Caputo image rule", c2_caputo_image),
        ("Mittag-Leffler", c3_mittag_leffler),
        ("coupled Burgers series", c4_burgers),
        ("He polynomial listings", c5_he_listings),
        ("3-D diffusion example", c6_three_dimensional),
        ("oracle agreement", c7_oracle),
        ("inverse pairs", c8_inverse_pairs),
        ("transform consistency", c9_transform_consistency),
        ("CLI determinism", c10_cli),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
