//! Acceptance criteria. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.

use std::process::ExitCode;
use std::time::Instant;

use num::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use refined_inertia::engine::{
    char_poly, char_poly_with, count_roots_in_strip, max_row_sum_f64, refined_inertia_exact,
    refined_inertia_numeric, CharPolyMethod, NumericTolerance, QMatrix, RationalPoly,
};
use refined_inertia::hn::{
    falsify_requires, fixture_suite, hn_set, run_lemma_suite, witness_suite, LemmaId, Verdict,
};
use refined_inertia::json::to_canonical_string;
use refined_inertia::pattern::{family_pattern, sgn_of_matrix, Family, Sign, SignPattern};
use refined_inertia::realization::{
    deflate_repeated, derive_seed, embed_witness, sample_arrow, ArrowMatrix, RealizationConfig,
};
use refined_inertia::Rational;

const SEED: u64 = 7;
const ORDERS: std::ops::RangeInclusive<usize> = 4..=10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn lambda_plus(b: &Rational) -> RationalPoly {
    RationalPoly::new(vec![b.clone(), Rational::one()])
}

/// Requires-property; returns the canonical reports for the determinism check.
fn requires_property(reports: &mut Vec<String>) -> Outcome {
    let cfg = RealizationConfig::default().with_seed(SEED);
    let mut worst_family_secs: f64 = 0.0;
    let mut bad = Vec::new();
    let mut exact = 0;
    for f in Family::ALL {
        let start = Instant::now();
        for n in ORDERS {
            let p = family_pattern(f, n).unwrap();
            let hn = hn_set(n).unwrap();
            let r = falsify_requires(&p, 5000, &cfg).unwrap();
            exact += r.exact_checks;
            if r.verdict == Verdict::CounterexampleFound || r.histogram.keys().any(|k| !hn.contains(k)) {
                bad.push(format!("{f} n={n}: {:?}", r.histogram.keys().collect::<Vec<_>>()));
            }
            reports.push(to_canonical_string(&r.to_json()));
        }
        worst_family_secs = worst_family_secs.max(start.elapsed().as_secs_f64());
    }
    let within_time = worst_family_secs <= 120.0;
    outcome(
        bad.is_empty() && within_time,
        format!(
            "21 runs x 5000 samples, {exact} exact checks, slowest family {worst_family_secs:.1}s{}",
            if bad.is_empty() { String::new() } else { format!("; outside H_n: {}", bad.join(", ")) }
        ),
    )
}

fn allows_property() -> Outcome {
    let mut bad = Vec::new();
    for f in Family::ALL {
        for n in ORDERS {
            let suite = match witness_suite(f, n) {
                Ok(s) => s,
                Err(e) => {
                    bad.push(format!("{f} n={n}: {e}"));
                    continue;
                }
            };
            let pattern = family_pattern(f, n).unwrap();
            let mut want = hn_set(n).unwrap().members().to_vec();
            want.sort();
            if suite.witnesses.keys().copied().collect::<Vec<_>>() != want {
                bad.push(format!("{f} n={n}: keys"));
            }
            // re-certify with the other characteristic-polynomial algorithm
            for (ri, w) in &suite.witnesses {
                let m = w.to_matrix();
                let p = char_poly_with(&m, CharPolyMethod::FaddeevLeVerrier);
                if sgn_of_matrix(&m) != pattern || refined_inertia_exact(&p).unwrap() != *ri {
                    bad.push(format!("{f} n={n} {ri}"));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("3 families x 7 orders x 3 witnesses{}", fmt_bad(&bad)))
}

fn embedding_identity() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for f in Family::ALL {
        let base = fixture_suite(f).unwrap();
        for b4 in base.witnesses.values() {
            let p4 = char_poly(&b4.to_matrix());
            let factor = lambda_plus(&b4.b()[0]);
            for n in 5..=10 {
                let bn = embed_witness(b4, n, f).unwrap();
                let expected = &factor.pow(n - 4) * &p4;
                checked += 1;
                if char_poly(&bn.to_matrix()) != expected || !bn.in_family(f) {
                    bad.push(format!("{f} n={n}"));
                }
            }
        }
    }
    outcome(bad.is_empty() && checked == 54, format!("{checked} lifts{}", fmt_bad(&bad)))
}

fn deflation_identity() -> Outcome {
    let cfg = RealizationConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = Vec::new();
    for k in 0..500u64 {
        let f = Family::ALL[rng.random_range(0..3)];
        let n = rng.random_range(5..=10);
        let s = sample_arrow(f, n, &cfg.with_seed(derive_seed(SEED, k))).unwrap();
        let mut b = s.b().to_vec();
        b[1] = b[0].clone();
        let forced = ArrowMatrix::new(s.a().to_vec(), b).unwrap();
        let d = deflate_repeated(&forced).unwrap();
        let lhs = char_poly(&forced.to_matrix());
        let rhs = &lambda_plus(&forced.b()[0]) * &char_poly(&d.reduced.to_matrix());
        if lhs != rhs || d.eigenvalue != -forced.b()[0].clone() || d.reduced.order() != n - 1 {
            bad.push(format!("sample {k}"));
        }
    }
    outcome(bad.is_empty(), format!("500 arrows with b1 = b2{}", fmt_bad(&bad)))
}

fn lemma_suite() -> Outcome {
    let cfg = RealizationConfig::default().with_seed(SEED);
    let mut bad = Vec::new();
    let mut checks = 0u64;
    for f in Family::ALL {
        for n in 5..=10 {
            let r = run_lemma_suite(f, n, 1000, &cfg, 1).unwrap();
            for (id, (pass, fail, skipped)) in &r.tally {
                checks += pass;
                // distinct b_j are enforced, so nothing may be skipped
                if *fail > 0 || *skipped > 0 || *pass != 1000 {
                    bad.push(format!("{f} n={n} {id}: {pass}/{fail}/{skipped}"));
                }
            }
            if r.tally.len() != LemmaId::ALL.len() {
                bad.push(format!("{f} n={n}: missing checks"));
            }
        }
    }
    outcome(bad.is_empty(), format!("18 suites x 1000 samples, {checks} passing checks{}", fmt_bad(&bad)))
}

fn engine_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let tol = NumericTolerance::default();
    let total = 1000;
    let (mut agree, mut near_axis, mut unexplained) = (0, 0, Vec::new());
    for k in 0..total {
        let n = rng.random_range(3..=8);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-9..=9)).collect()).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let q = QMatrix::from_i64_rows(&refs).unwrap();
        let p = char_poly(&q);
        let exact = refined_inertia_exact(&p).unwrap();
        let f = q.to_f64();
        let numeric = refined_inertia_numeric(&f, tol).ok();
        if numeric == Some(exact) {
            agree += 1;
            continue;
        }
        let scale = max_row_sum_f64(&f);
        let delta = Rational::from_float(10.0 * tol.axis_eps * scale).unwrap();
        if count_roots_in_strip(&p, &delta).unwrap() > 0 {
            near_axis += 1;
        } else {
            unexplained.push(format!("#{k} exact {exact} numeric {numeric:?}"));
        }
    }
    let rate = agree as f64 / total as f64;
    outcome(
        unexplained.is_empty() && rate >= 0.999,
        format!(
            "raw agreement {agree}/{total} ({:.2}%), {near_axis} disagreements certified near-axis{}",
            100.0 * rate,
            fmt_bad(&unexplained)
        ),
    )
}

fn negative_control() -> Outcome {
    let p = SignPattern::filled(4, Sign::Plus).unwrap();
    let r = falsify_requires(&p, 1000, &RealizationConfig::default().with_seed(SEED)).unwrap();
    let hn = hn_set(4).unwrap();
    let strong = r.histogram.keys().filter(|k| !hn.contains(k) && k.n_plus >= 3).count();
    let certified = r
        .counterexample
        .as_ref()
        .map(|c| {
            let ri = refined_inertia_exact(&char_poly(&c.matrix)).unwrap();
            ri == c.inertia && !hn.contains(&ri) && sgn_of_matrix(&c.matrix) == p
        })
        .unwrap_or(false);
    outcome(
        r.verdict == Verdict::CounterexampleFound && strong > 0 && certified,
        format!(
            "verdict {}, {strong} tuples with n+ >= 3 outside H_4, counterexample {}",
            r.verdict,
            r.counterexample.map(|c| c.inertia.to_string()).unwrap_or_default()
        ),
    )
}

fn determinism(first: &[String]) -> Outcome {
    let mut second = Vec::new();
    requires_property(&mut second);
    let identical = first.len() == 21 && first == second.as_slice();
    let bytes: usize = first.iter().map(|s| s.len()).sum();
    outcome(identical, format!("21 reports, {bytes} bytes, byte-identical: {identical}"))
}

fn fmt_bad(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        let shown: Vec<&str> = bad.iter().take(5).map(String::as_str).collect();
        format!("; failures ({}): {}", bad.len(), shown.join(", "))
    }
}

fn main() -> ExitCode {
    let mut reports = Vec::new();
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut timed = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} criterion {id} ({name}): {} [{secs:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((id, name, o, secs));
    };
    timed(1, "requires H_n", &mut || requires_property(&mut reports));
    timed(2, "allows H_n", &mut allows_property);
    timed(3, "embedding identity", &mut embedding_identity);
    timed(4, "deflation identity", &mut deflation_identity);
    timed(5, "lemma suite", &mut lemma_suite);
    timed(6, "engine cross-validation", &mut engine_cross_validation);
    timed(7, "negative control", &mut negative_control);
    timed(8, "determinism", &mut || determinism(&reports));

    let failed = results.iter().filter(|r| !r.2.pass).count();
    println!("acceptance: {}/{} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
