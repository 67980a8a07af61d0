use std::collections::BTreeMap;

use num::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::hn_set;
use crate::engine::{char_poly, refined_inertia_exact, RefinedInertia};
use crate::json::{field, usize_field};
use crate::pattern::{family_pattern, Family, SignPattern};
use crate::realization::{derive_seed, embed_witness, sample_arrow, ArrowMatrix, RealizationConfig};
use crate::{Error, Result, Rational};

/// Seed the committed order-4 fixtures were generated with.
pub const FIXTURE_SEED: u64 = 2014;

const SEARCH_BUDGET: usize = 200_000;

static FIXTURES: &str = include_str!("../../fixtures/witnesses_4x4.json");

/// One certified member of `Q(A_i)` for each element of `H_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSuite {
    pub family: Family,
    pub n: usize,
    pub witnesses: BTreeMap<RefinedInertia, ArrowMatrix>,
}

impl WitnessSuite {
    pub fn pattern(&self) -> SignPattern {
        family_pattern(self.family, self.n).expect("suite order is at least 4")
    }

    /// Re-check membership, order and exact inertia of every witness, and
    /// that the keys are exactly `H_n`.
    pub fn certify(&self) -> Result<()> {
        let hn = hn_set(self.n)?;
        let keys: Vec<_> = self.witnesses.keys().copied().collect();
        let mut members = hn.members().to_vec();
        members.sort();
        if keys != members {
            return Err(Error::CheckFailed(format!("witness keys {keys:?} are not H_{}", self.n)));
        }
        for (ri, w) in &self.witnesses {
            if w.order() != self.n || !w.in_family(self.family) {
                return Err(Error::NotInClass(self.family.index()));
            }
            let got = refined_inertia_exact(&char_poly(&w.to_matrix()))?;
            if got != *ri {
                return Err(Error::CheckFailed(format!("witness for {ri} has refined inertia {got}")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let witnesses: Vec<Value> = self
            .witnesses
            .iter()
            .map(|(ri, w)| {
                let m = w.to_matrix();
                json!({
                    "inertia": ri.to_json(),
                    "arrow": w.to_json(),
                    "matrix": m.to_json(),
                    "char_poly": char_poly(&m).to_json(),
                })
            })
            .collect();
        json!({
            "family": self.family.index(),
            "n": self.n,
            "pattern": self.pattern().to_json(),
            "witnesses": witnesses,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let family = Family::from_index(usize_field(v, "family")? as u8)?;
        let n = usize_field(v, "n")?;
        let mut witnesses = BTreeMap::new();
        for w in field(v, "witnesses")?
            .as_array()
            .ok_or_else(|| Error::Json("witnesses must be an array".into()))?
        {
            let ri: RefinedInertia = serde_json::from_value(field(w, "inertia")?.clone())?;
            witnesses.insert(ri, ArrowMatrix::from_json(field(w, "arrow")?)?);
        }
        Ok(WitnessSuite { family, n, witnesses })
    }
}

fn search_config() -> RealizationConfig {
    RealizationConfig {
        lo: Rational::new(1.into(), 10.into()),
        hi: Rational::from_integer(10.into()),
        denominator_bound: 10,
        seed: 0,
    }
}

/// Order-4 witnesses for `A_i`.
///
/// `(0,4,0,0)` and `(2,2,0,0)` are open conditions and come from random
/// search. `(0,2,0,2)` lies on a variety, so it is built by prescribing
/// `det(λI - B) = (λ² + ω)(λ² + αλ + β)` and solving for the arrow
/// parameters, resampling the free choices until the signs fit `A_i`.
pub fn find_4x4_witnesses(family: Family, seed: u64) -> Result<WitnessSuite> {
    let cfg = search_config();
    let hn = hn_set(4)?;
    let [stable, hopf, unstable] = *hn.members();
    let mut witnesses = BTreeMap::new();

    for i in 0..SEARCH_BUDGET as u64 {
        let b = sample_arrow(family, 4, &cfg.with_seed(derive_seed(seed, i)))?;
        let ri = refined_inertia_exact(&b.char_poly())?;
        if (ri == stable || ri == unstable) && !witnesses.contains_key(&ri) {
            witnesses.insert(ri, b);
        }
        if witnesses.len() == 2 {
            break;
        }
    }
    for target in [stable, unstable] {
        if !witnesses.contains_key(&target) {
            return Err(Error::SearchExhausted {
                budget: SEARCH_BUDGET,
                inertia: target.to_string(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
    let hopf_witness = (0..SEARCH_BUDGET)
        .find_map(|_| {
            let mut draw = || cfg.sample_magnitude(&mut rng);
            let b1 = draw();
            let b2 = if family == Family::A3 { -draw() } else { draw() };
            let (alpha, beta, omega) = (draw(), draw(), draw());
            match_hopf_coefficients(&b1, &b2, &alpha, &beta, &omega)
                .filter(|b| b.in_family(family))
        })
        .ok_or_else(|| Error::SearchExhausted {
            budget: SEARCH_BUDGET,
            inertia: hopf.to_string(),
        })?;
    witnesses.insert(hopf, hopf_witness);

    let suite = WitnessSuite { family, n: 4, witnesses };
    suite.certify()?;
    Ok(suite)
}

/// Solve for `(a1, a2, a3, a4)` so that the order-4 arrow matrix with
/// diagonal parameters `(b1, b2)` has characteristic polynomial
/// `(λ² + ω)(λ² + αλ + β)`.
fn match_hopf_coefficients(
    b1: &Rational,
    b2: &Rational,
    alpha: &Rational,
    beta: &Rational,
    omega: &Rational,
) -> Option<ArrowMatrix> {
    if b1 == b2 {
        return None;
    }
    // det(λI - B) = λ⁴ + (S - a1)λ³ + (P - a1 S - a2 - a3 - a4)λ²
    //             + (-a1 P - a2 S - a3 b2 - a4 b1)λ - a2 P
    let s = b1 + b2;
    let p = b1 * b2;
    if p.is_zero() {
        return None;
    }
    let a1 = &s - alpha;
    let a2 = -(beta * omega) / &p;
    let t = &p - &a1 * &s - &a2 - (beta + omega);
    let u = -(&a1 * &p) - &a2 * &s - alpha * omega;
    let a3 = (&u - b1 * &t) / (b2 - b1);
    let a4 = &t - &a3;
    ArrowMatrix::new(vec![a1, a2, a3, a4], vec![b1.clone(), b2.clone()]).ok()
}

/// The committed order-4 suite for `family`, re-certified on load.
pub fn fixture_suite(family: Family) -> Result<WitnessSuite> {
    let v: Value = serde_json::from_str(FIXTURES)?;
    let suites = field(&v, "suites")?
        .as_array()
        .ok_or_else(|| Error::Json("suites must be an array".into()))?;
    for s in suites {
        let suite = WitnessSuite::from_json(s)?;
        if suite.family == family {
            suite.certify()?;
            return Ok(suite);
        }
    }
    Err(Error::Json(format!("no fixture for family {family}")))
}

/// The fixture file contents for a given search seed.
pub fn fixtures_json(seed: u64) -> Result<Value> {
    let suites = Family::ALL
        .into_iter()
        .map(|f| find_4x4_witnesses(f, seed).map(|s| s.to_json()))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "seed": seed, "suites": suites }))
}

/// Lift an order-4 suite to order `n` and certify the result.
pub fn witness_suite_from(base: &WitnessSuite, n: usize) -> Result<WitnessSuite> {
    if base.n != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: base.n });
    }
    if n < 4 {
        return Err(Error::OrderTooSmall { found: n, min: 4 });
    }
    if n == 4 {
        base.certify()?;
        return Ok(base.clone());
    }
    let mut witnesses = BTreeMap::new();
    for (ri, b4) in &base.witnesses {
        let lifted = RefinedInertia::new(ri.n_plus, ri.n_minus + n - 4, ri.n_zero, ri.two_n_p);
        witnesses.insert(lifted, embed_witness(b4, n, base.family)?);
    }
    let suite = WitnessSuite {
        family: base.family,
        n,
        witnesses,
    };
    suite.certify()?;
    Ok(suite)
}

/// Certified witnesses for every member of `H_n` in `Q(A_i)`, `n >= 4`.
pub fn witness_suite(family: Family, n: usize) -> Result<WitnessSuite> {
    witness_suite_from(&fixture_suite(family)?, n)
}
