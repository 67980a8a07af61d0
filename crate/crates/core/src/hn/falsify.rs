use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{hn_set, HnSet};
use crate::engine::{
    char_poly, classify_eigenvalues, max_row_sum_f64, numeric_eigenvalues, refined_inertia_of,
    NumericTolerance, QMatrix, RefinedInertia,
};
use crate::pattern::SignPattern;
use crate::realization::{derive_seed, sample_realization, RealizationConfig};
use crate::{Error, Result, Rational};

/// Factor on the numeric threshold below which a sample is re-checked exactly.
const NEAR_AXIS_FACTOR: f64 = 10.0;
const BISECTION_STEPS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    /// No sample left `H_n`.
    ConsistentWithRequires,
    /// Some sample has certified refined inertia outside `H_n`.
    CounterexampleFound,
    /// No sample left `H_n` and every member of `H_n` was observed.
    AllowsConfirmed,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::ConsistentWithRequires => "ConsistentWithRequires",
            Verdict::CounterexampleFound => "CounterexampleFound",
            Verdict::AllowsConfirmed => "AllowsConfirmed",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub sample_index: u64,
    pub original: QMatrix,
    pub original_inertia: RefinedInertia,
    /// Entries pushed toward `±1` while the certified inertia stays outside `H_n`.
    pub matrix: QMatrix,
    pub inertia: RefinedInertia,
}

impl Counterexample {
    pub fn to_json(&self) -> Value {
        json!({
            "sample_index": self.sample_index,
            "original": self.original.to_json(),
            "original_inertia": self.original_inertia.to_json(),
            "matrix": self.matrix.to_json(),
            "inertia": self.inertia.to_json(),
            "char_poly": char_poly(&self.matrix).to_json(),
        })
    }
}

/// Classification of one sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleOutcome {
    pub inertia: RefinedInertia,
    /// Settled by the exact engine rather than the eigensolver.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FalsifyOptions {
    pub budget: u64,
    pub realization: RealizationConfig,
    pub tolerance: NumericTolerance,
    pub jobs: usize,
    pub minimize: bool,
}

impl FalsifyOptions {
    pub fn new(budget: u64, realization: RealizationConfig) -> Self {
        FalsifyOptions {
            budget,
            realization,
            tolerance: NumericTolerance::default(),
            jobs: 1,
            minimize: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub pattern: SignPattern,
    pub samples: u64,
    pub seed: u64,
    pub histogram: BTreeMap<RefinedInertia, u64>,
    pub exact_checks: u64,
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
}

impl AnalysisReport {
    pub fn order(&self) -> usize {
        self.pattern.order()
    }

    pub fn to_json(&self) -> Value {
        let hn = hn_set(self.order()).expect("report order is at least 3");
        let histogram: Vec<Value> = self
            .histogram
            .iter()
            .map(|(ri, count)| {
                json!({
                    "inertia": ri.to_json(),
                    "count": count,
                    "in_hn": hn.contains(ri),
                })
            })
            .collect();
        json!({
            "pattern": self.pattern.to_json(),
            "n": self.order(),
            "samples": self.samples,
            "seed": self.seed,
            "histogram": histogram,
            "exact_checks": self.exact_checks,
            "verdict": self.verdict.name(),
            "counterexample": self.counterexample.as_ref().map(Counterexample::to_json),
        })
    }

    /// `n_plus,n_minus,n_zero,two_n_p,count`, one row per tuple.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n_plus,n_minus,n_zero,two_n_p,count\n");
        for (ri, count) in &self.histogram {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                ri.n_plus, ri.n_minus, ri.n_zero, ri.two_n_p, count
            ));
        }
        out
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "order {}, {} samples, seed {}", self.order(), self.samples, self.seed)?;
        for (ri, count) in &self.histogram {
            writeln!(f, "  {ri}: {count}")?;
        }
        writeln!(f, "exact checks: {}", self.exact_checks)?;
        write!(f, "verdict: {}", self.verdict)?;
        if let Some(c) = &self.counterexample {
            write!(f, "\ncounterexample (sample {}), refined inertia {}:\n{}", c.sample_index, c.inertia, c.matrix)?;
        }
        Ok(())
    }
}

/// Numeric classification, falling back to the exact engine when the
/// tuple is outside `H_n`, an eigenvalue is within `10 · eps · ‖B‖∞` of the
/// imaginary axis, or the eigensolver fails.
pub fn classify_sample(b: &QMatrix, hn: &HnSet, tol: NumericTolerance) -> Result<SampleOutcome> {
    let f = b.to_f64();
    let scale = max_row_sum_f64(&f);
    if let Ok(eigs) = numeric_eigenvalues(&f) {
        let ri = classify_eigenvalues(&eigs, tol.axis_eps * scale);
        let near_axis = eigs
            .iter()
            .any(|l| l.re.abs() <= NEAR_AXIS_FACTOR * tol.axis_eps * scale);
        if ri.two_n_p % 2 == 0 && !near_axis && hn.contains(&ri) {
            return Ok(SampleOutcome { inertia: ri, exact: false });
        }
    }
    Ok(SampleOutcome {
        inertia: refined_inertia_of(b)?,
        exact: true,
    })
}

pub fn falsify_requires(p: &SignPattern, budget: u64, cfg: &RealizationConfig) -> Result<AnalysisReport> {
    falsify_requires_with(p, &FalsifyOptions::new(budget, cfg.clone()))
}

/// Sample `budget` members of `Q(P)` and tabulate their refined inertia.
///
/// Sample `k` is drawn from seed `derive_seed(seed, k)`, so the report does
/// not depend on `jobs`.
pub fn falsify_requires_with(p: &SignPattern, opts: &FalsifyOptions) -> Result<AnalysisReport> {
    opts.realization.validate()?;
    if opts.jobs == 0 {
        return Err(Error::InvalidConfig("jobs must be at least 1".into()));
    }
    let hn = hn_set(p.order())?;
    let seed = opts.realization.seed;
    let run = |k: u64| -> Result<(u64, SampleOutcome)> {
        let b = sample_realization(p, &opts.realization.with_seed(derive_seed(seed, k)));
        Ok((k, classify_sample(&b, &hn, opts.tolerance)?))
    };
    let outcomes: Vec<(u64, SampleOutcome)> = if opts.jobs == 1 {
        (0..opts.budget).map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        pool.install(|| (0..opts.budget).into_par_iter().map(run).collect::<Result<_>>())?
    };

    let mut histogram = BTreeMap::new();
    let mut exact_checks = 0;
    let mut first_bad = None;
    for (k, o) in &outcomes {
        *histogram.entry(o.inertia).or_insert(0) += 1;
        exact_checks += o.exact as u64;
        if first_bad.is_none() && !hn.contains(&o.inertia) {
            first_bad = Some((*k, o.inertia));
        }
    }

    let counterexample = match first_bad {
        None => None,
        Some((k, ri)) => {
            let original = sample_realization(p, &opts.realization.with_seed(derive_seed(seed, k)));
            let (matrix, inertia) = if opts.minimize {
                minimize_counterexample(&original, &hn)?
            } else {
                (original.clone(), ri)
            };
            Some(Counterexample {
                sample_index: k,
                original,
                original_inertia: ri,
                matrix,
                inertia,
            })
        }
    };
    let verdict = if counterexample.is_some() {
        Verdict::CounterexampleFound
    } else if hn.members().iter().all(|m| histogram.contains_key(m)) {
        Verdict::AllowsConfirmed
    } else {
        Verdict::ConsistentWithRequires
    };
    Ok(AnalysisReport {
        pattern: p.clone(),
        samples: opts.budget,
        seed,
        histogram,
        exact_checks,
        verdict,
        counterexample,
    })
}

/// Move each nonzero entry, in row-major order, toward `±1` while the exact
/// refined inertia stays outside `H_n`: jump straight there when possible,
/// otherwise bisect a few times.
pub fn minimize_counterexample(b: &QMatrix, hn: &HnSet) -> Result<(QMatrix, RefinedInertia)> {
    let outside = |m: &QMatrix| -> Result<Option<RefinedInertia>> {
        let ri = refined_inertia_of(m)?;
        Ok((!hn.contains(&ri)).then_some(ri))
    };
    let mut cur = b.clone();
    let mut ri = outside(&cur)?.ok_or_else(|| Error::CheckFailed("matrix is not a counterexample".into()))?;
    let n = cur.order();
    for r in 0..n {
        for c in 0..n {
            let x = cur.get(r, c).clone();
            if x.is_zero() {
                continue;
            }
            let target = if x.is_positive() { Rational::one() } else { -Rational::one() };
            if x == target {
                continue;
            }
            let mut trial = cur.clone();
            trial.set(r, c, target.clone());
            if let Some(t) = outside(&trial)? {
                cur = trial;
                ri = t;
                continue;
            }
            let (mut good, mut bad) = (x, target);
            for _ in 0..BISECTION_STEPS {
                let mid = (&good + &bad) / Rational::from_integer(2.into());
                trial.set(r, c, mid.clone());
                match outside(&trial)? {
                    Some(_) => good = mid,
                    None => bad = mid,
                }
            }
            cur.set(r, c, good);
            ri = outside(&cur)?.expect("kept entries preserve the certificate");
        }
    }
    Ok((cur, ri))
}
