use std::collections::BTreeMap;
use std::fmt;

use num::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::hn_set;
use crate::engine::{arrow_shift_det, char_poly, count_eigen_re_leq, refined_inertia_exact};
use crate::pattern::Family;
use crate::realization::{derive_seed, sample_arrow, ArrowMatrix, RealizationConfig};
use crate::{Error, Result, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LemmaId {
    /// Closed form of `det(b_j I + B)` agrees with elimination.
    Det,
    /// Sign of `det(b_j I + B)`.
    Sign,
    /// No `-b_j` is an eigenvalue.
    Excl,
    /// Lower bound on `n_-`.
    Low,
    /// `sgn det B = (-1)^n`, no zero eigenvalue, `n_- ≡ n (mod 2)`.
    Par,
    /// `n_-(b_j I + B) ≡ Δ(b_j) (mod 2)`, and its parity follows the sign table.
    Delta,
    /// `n_- >= n - 2`.
    K,
    /// `Δ(b_j) ≡ j (mod 2)` for the third family.
    Chain,
    /// `Δ` increases strictly along the sorted `b_j`.
    Gap,
    /// Refined inertia lies in `H_n`.
    Theorem,
}

impl LemmaId {
    pub const ALL: [LemmaId; 10] = [
        LemmaId::Det,
        LemmaId::Sign,
        LemmaId::Excl,
        LemmaId::Low,
        LemmaId::Par,
        LemmaId::Delta,
        LemmaId::K,
        LemmaId::Chain,
        LemmaId::Gap,
        LemmaId::Theorem,
    ];

    pub fn label(self) -> &'static str {
        match self {
            LemmaId::Det => "L-det",
            LemmaId::Sign => "L-sign",
            LemmaId::Excl => "L-excl",
            LemmaId::Low => "L-low",
            LemmaId::Par => "L-par",
            LemmaId::Delta => "L-delta",
            LemmaId::K => "L-k",
            LemmaId::Chain => "L-chain",
            LemmaId::Gap => "L-gap",
            LemmaId::Theorem => "L-hn",
        }
    }

    /// Needs pairwise distinct `b_j`.
    fn needs_distinct_b(self) -> bool {
        matches!(
            self,
            LemmaId::Det | LemmaId::Sign | LemmaId::Excl | LemmaId::Delta | LemmaId::Chain | LemmaId::Gap
        )
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaCheck {
    pub id: LemmaId,
    pub status: CheckStatus,
    pub detail: String,
}

impl LemmaCheck {
    fn verdict(id: LemmaId, failures: Vec<String>) -> Self {
        if failures.is_empty() {
            LemmaCheck { id, status: CheckStatus::Pass, detail: String::new() }
        } else {
            LemmaCheck { id, status: CheckStatus::Fail, detail: failures.join("; ") }
        }
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

fn sign_name(x: &Rational) -> &'static str {
    if x.is_positive() {
        "+"
    } else if x.is_negative() {
        "-"
    } else {
        "0"
    }
}

/// Run every identity check on `b ∈ Q(A_i)` in arrow form.
///
/// The `b_j` are first sorted into decreasing order by a permutation
/// similarity. Checks that need distinct `b_j` are reported as skipped
/// when two of them coincide.
pub fn validate_lemmas(b: &ArrowMatrix, family: Family) -> Result<Vec<LemmaCheck>> {
    if !b.in_family(family) {
        return Err(Error::NotInClass(family.index()));
    }
    let s = b.sorted_descending();
    let n = s.order();
    let bs = s.b();
    let m = s.to_matrix();
    let p = char_poly(&m);
    let ri = refined_inertia_exact(&p)?;
    let distinct = s.has_distinct_b();

    let mut checks = Vec::new();

    // Δ(b_j) for every j, only meaningful with distinct b_j
    let delta: Vec<usize> = if distinct {
        bs.iter().map(|bj| count_eigen_re_leq(&m, bj)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    for id in LemmaId::ALL {
        if id.needs_distinct_b() && !distinct {
            checks.push(LemmaCheck {
                id,
                status: CheckStatus::Skipped,
                detail: "repeated b_j".into(),
            });
            continue;
        }
        let mut bad = Vec::new();
        match id {
            LemmaId::Det => {
                for j in 1..=n - 2 {
                    if let Err(e) = arrow_shift_det(&s, j) {
                        bad.push(format!("j={j}: {e}"));
                    }
                }
            }
            LemmaId::Sign => {
                let last = if family == Family::A3 { n - 3 } else { n - 2 };
                for j in 1..=last {
                    let d = m.shifted(&bs[j - 1]).det();
                    let odd = match family {
                        Family::A1 => j % 2 == 0,
                        Family::A2 | Family::A3 => j % 2 == 1,
                    };
                    let ok = if odd { d.is_negative() } else { d.is_positive() };
                    if !ok {
                        bad.push(format!("j={j}: det has sign {}", sign_name(&d)));
                    }
                }
            }
            LemmaId::Excl => {
                for (j, bj) in bs.iter().enumerate() {
                    if p.eval(&-bj.clone()).is_zero() {
                        bad.push(format!("-b_{} is an eigenvalue", j + 1));
                    }
                }
            }
            LemmaId::Low => {
                let bound = if family == Family::A3 { n - 4 } else { n - 3 };
                if ri.n_minus < bound {
                    bad.push(format!("n- = {} < {bound}", ri.n_minus));
                }
            }
            LemmaId::Par => {
                let d = m.det();
                let want_negative = n % 2 == 1;
                if d.is_zero() || d.is_negative() != want_negative {
                    bad.push(format!("det B has sign {}", sign_name(&d)));
                }
                if ri.n_zero != 0 {
                    bad.push(format!("n0 = {}", ri.n_zero));
                }
                if ri.n_minus % 2 != n % 2 {
                    bad.push(format!("n- = {} has parity of {}", ri.n_minus, n + 1));
                }
            }
            LemmaId::Delta => {
                for j in 1..=n - 3 {
                    let shifted = refined_inertia_exact(&char_poly(&m.shifted(&bs[j - 1])))?;
                    if shifted.n_minus % 2 != delta[j - 1] % 2 {
                        bad.push(format!("j={j}: n-(b_j I + B) = {} but Δ = {}", shifted.n_minus, delta[j - 1]));
                    }
                    let odd = match family {
                        Family::A1 => j % 2 == 0,
                        Family::A2 | Family::A3 => j % 2 == 1,
                    };
                    if (shifted.n_minus % 2 == 1) != odd {
                        bad.push(format!("j={j}: n-(b_j I + B) = {}", shifted.n_minus));
                    }
                }
            }
            LemmaId::K => {
                if ri.n_minus + 2 < n {
                    bad.push(format!("n- = {} < {}", ri.n_minus, n - 2));
                }
            }
            LemmaId::Chain => {
                if family == Family::A3 {
                    for j in 1..=n - 3 {
                        if delta[j - 1] % 2 != j % 2 {
                            bad.push(format!("j={j}: Δ = {}", delta[j - 1]));
                        }
                    }
                }
            }
            LemmaId::Gap => {
                let last = if family == Family::A3 { n.saturating_sub(4) } else { n - 3 };
                for j in 1..=last {
                    if delta[j] <= delta[j - 1] {
                        bad.push(format!("j={j}: Δ(b_{}) = {} <= Δ(b_{j}) = {}", j + 1, delta[j], delta[j - 1]));
                    }
                }
            }
            LemmaId::Theorem => {
                if !hn_set(n)?.contains(&ri) {
                    bad.push(format!("refined inertia {ri} outside H_{n}"));
                }
            }
        }
        checks.push(LemmaCheck::verdict(id, bad));
    }
    Ok(checks)
}

/// An arrow-form member of `Q(A_i)` with pairwise distinct `b_j`.
pub fn sample_distinct_arrow(family: Family, n: usize, cfg: &RealizationConfig) -> Result<ArrowMatrix> {
    for attempt in 0..1000 {
        let b = sample_arrow(family, n, &cfg.with_seed(derive_seed(cfg.seed, attempt)))?;
        if b.has_distinct_b() {
            return Ok(b);
        }
    }
    Err(Error::SearchExhausted {
        budget: 1000,
        inertia: "distinct b_j".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaSuiteReport {
    pub family: Family,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// `(pass, fail, skipped)` per check.
    pub tally: BTreeMap<LemmaId, (u64, u64, u64)>,
    /// First few failures as `(sample, check, detail)`.
    pub failures: Vec<(u64, LemmaId, String)>,
}

impl LemmaSuiteReport {
    pub fn all_passed(&self) -> bool {
        self.tally.values().all(|t| t.1 == 0)
    }

    pub fn to_json(&self) -> Value {
        let tally: Vec<Value> = self
            .tally
            .iter()
            .map(|(id, (p, f, s))| json!({"check": id.label(), "pass": p, "fail": f, "skipped": s}))
            .collect();
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|(k, id, d)| json!({"sample": k, "check": id.label(), "detail": d}))
            .collect();
        json!({
            "family": self.family.index(),
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "checks": tally,
            "failures": failures,
            "all_passed": self.all_passed(),
        })
    }
}

const MAX_REPORTED_FAILURES: usize = 20;

/// Validate the identities on `samples` random members with distinct `b_j`.
pub fn run_lemma_suite(
    family: Family,
    n: usize,
    samples: u64,
    cfg: &RealizationConfig,
    jobs: usize,
) -> Result<LemmaSuiteReport> {
    cfg.validate()?;
    if jobs == 0 {
        return Err(Error::InvalidConfig("jobs must be at least 1".into()));
    }
    let run = |k: u64| -> Result<Vec<LemmaCheck>> {
        let b = sample_distinct_arrow(family, n, &cfg.with_seed(derive_seed(cfg.seed, k)))?;
        validate_lemmas(&b, family)
    };
    let results: Vec<Vec<LemmaCheck>> = if jobs == 1 {
        (0..samples).map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        pool.install(|| (0..samples).into_par_iter().map(run).collect::<Result<_>>())?
    };

    let mut tally: BTreeMap<LemmaId, (u64, u64, u64)> = LemmaId::ALL.iter().map(|&id| (id, (0, 0, 0))).collect();
    let mut failures = Vec::new();
    for (k, checks) in results.into_iter().enumerate() {
        for c in checks {
            let t = tally.get_mut(&c.id).expect("every check is tallied");
            match c.status {
                CheckStatus::Pass => t.0 += 1,
                CheckStatus::Fail => {
                    t.1 += 1;
                    if failures.len() < MAX_REPORTED_FAILURES {
                        failures.push((k as u64, c.id, c.detail));
                    }
                }
                CheckStatus::Skipped => t.2 += 1,
            }
        }
    }
    Ok(LemmaSuiteReport {
        family,
        n,
        samples,
        seed: cfg.seed,
        tally,
        failures,
    })
}
