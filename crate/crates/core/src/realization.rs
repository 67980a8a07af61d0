//! Members of a qualitative class: random sampling, the arrow normal form,
//! the witness embedding that lifts an order-4 arrow matrix to order `n`,
//! and deflation of a repeated diagonal parameter.

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::engine::{QMatrix, RationalPoly};
use crate::json::{field, rationals_from_json, rationals_to_json};
use crate::pattern::{family_of, family_pattern, sgn_of_matrix, Family, Sign, SignPattern};
use crate::{Error, Result, Rational};

/// Arrow matrix
///
/// ```text
/// [ a1  1    1    ...  1       ]
/// [ a2  0                      ]
/// [ a3      -b1                ]
/// [ ...          ...           ]
/// [ an                -b_{n-2} ]
/// ```
///
/// `a` holds the first column (`a[0]` is the corner), `b` the negated
/// trailing diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArrowMatrix {
    a: Vec<Rational>,
    b: Vec<Rational>,
}

impl ArrowMatrix {
    pub const MIN_ORDER: usize = 4;

    pub fn new(a: Vec<Rational>, b: Vec<Rational>) -> Result<Self> {
        let n = a.len();
        if n < Self::MIN_ORDER {
            return Err(Error::OrderTooSmall {
                found: n,
                min: Self::MIN_ORDER,
            });
        }
        if b.len() != n - 2 {
            return Err(Error::MalformedArrow(format!(
                "order {n} needs {} diagonal parameters, got {}",
                n - 2,
                b.len()
            )));
        }
        Ok(ArrowMatrix { a, b })
    }

    pub fn from_i64(a: &[i64], b: &[i64]) -> Result<Self> {
        let q = |v: &[i64]| v.iter().map(|&x| Rational::from_integer(x.into())).collect();
        Self::new(q(a), q(b))
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn to_matrix(&self) -> QMatrix {
        let n = self.order();
        let mut m = QMatrix::zeros(n);
        for k in 0..n {
            m.set(k, 0, self.a[k].clone());
            if k > 0 {
                m.set(0, k, Rational::one());
            }
            if k >= 2 {
                m.set(k, k, -self.b[k - 2].clone());
            }
        }
        m
    }

    /// `det(λI - B) = λ(λ - a1)∏(λ + b_j) - a2∏(λ + b_j) - λ Σ_j a_{j+2} ∏_{m≠j}(λ + b_m)`.
    pub fn char_poly(&self) -> RationalPoly {
        let x = RationalPoly::from_i64(&[0, 1]);
        let factors: Vec<RationalPoly> = self.b.iter().map(|b| RationalPoly::linear(&-b.clone())).collect();
        let all = factors.iter().fold(RationalPoly::one(), |acc, f| &acc * f);
        let head = &(&x * &RationalPoly::linear(&self.a[0])) * &all;
        let second = all.scale(&self.a[1]);
        let mut sum = RationalPoly::zero();
        for j in 0..self.b.len() {
            let others = factors
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .fold(RationalPoly::one(), |acc, (_, f)| &acc * f);
            sum = &sum + &others.scale(&self.a[j + 2]);
        }
        &(&head - &second) - &(&x * &sum)
    }

    pub fn sign_pattern(&self) -> SignPattern {
        sgn_of_matrix(&self.to_matrix())
    }

    pub fn in_family(&self, family: Family) -> bool {
        family_pattern(family, self.order()).is_ok_and(|p| p == self.sign_pattern())
    }

    pub fn family(&self) -> Option<Family> {
        family_of(&self.sign_pattern())
    }

    pub fn has_distinct_b(&self) -> bool {
        let mut sorted = self.b.clone();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Permutation similarity fixing rows 1 and 2 that orders the diagonal
    /// parameters decreasingly, `b1 >= b2 >= ... `.
    pub fn sorted_descending(&self) -> ArrowMatrix {
        let mut idx: Vec<usize> = (0..self.b.len()).collect();
        idx.sort_by(|&i, &j| self.b[j].cmp(&self.b[i]).then(i.cmp(&j)));
        let mut a = self.a[..2].to_vec();
        a.extend(idx.iter().map(|&i| self.a[i + 2].clone()));
        let b = idx.iter().map(|&i| self.b[i].clone()).collect();
        ArrowMatrix { a, b }
    }

    /// `{"a": [...], "b": [...]}`.
    pub fn to_json(&self) -> Value {
        json!({ "a": rationals_to_json(&self.a), "b": rationals_to_json(&self.b) })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        Self::new(rationals_from_json(field(v, "a")?)?, rationals_from_json(field(v, "b")?)?)
    }
}

/// Sampling parameters for [`sample_realization`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizationConfig {
    pub lo: Rational,
    pub hi: Rational,
    pub denominator_bound: u64,
    pub seed: u64,
}

impl Default for RealizationConfig {
    fn default() -> Self {
        RealizationConfig {
            lo: Rational::new(1.into(), 1000.into()),
            hi: Rational::from_integer(1000.into()),
            denominator_bound: 10_000,
            seed: 0,
        }
    }
}

impl RealizationConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        RealizationConfig {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lo.is_positive() || self.lo >= self.hi {
            return Err(Error::InvalidConfig(format!(
                "magnitude range must satisfy 0 < lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.denominator_bound == 0 {
            return Err(Error::InvalidConfig("denominator bound must be positive".into()));
        }
        Ok(())
    }

    /// Log-uniform magnitude in `[lo, hi]` rounded to `k / denominator_bound`.
    pub fn sample_magnitude<R: Rng>(&self, rng: &mut R) -> Rational {
        let lo = self.lo.to_f64().unwrap().ln();
        let hi = self.hi.to_f64().unwrap().ln();
        let x = (lo + rng.random::<f64>() * (hi - lo)).exp();
        let den = self.denominator_bound;
        let k = (x * den as f64).round() as i64;
        let q = Rational::new(BigInt::from(k), BigInt::from(den));
        q.clamp(self.lo.clone(), self.hi.clone())
    }
}

/// Splitmix64-style mixing of a base seed and a stream index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(seed.wrapping_add(mix(index.wrapping_add(0x9e37_79b9_7f4a_7c15))))
}

/// A random member of `Q(P)`, deterministic in `cfg.seed`.
pub fn sample_realization(p: &SignPattern, cfg: &RealizationConfig) -> QMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    sample_realization_with(p, cfg, &mut rng)
}

pub fn sample_realization_with<R: Rng>(p: &SignPattern, cfg: &RealizationConfig, rng: &mut R) -> QMatrix {
    let n = p.order();
    let mut m = QMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            match p.get(r, c) {
                Sign::Zero => {}
                Sign::Plus => m.set(r, c, cfg.sample_magnitude(rng)),
                Sign::Minus => m.set(r, c, -cfg.sample_magnitude(rng)),
            }
        }
    }
    m
}

/// The diagonal similarity `B ↦ D B D⁻¹` used to reach arrow form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalSimilarity {
    pub family: Family,
    /// `D = diag(1, B12, ..., B1n)`.
    pub d: Vec<Rational>,
}

impl DiagonalSimilarity {
    pub fn apply(&self, b: &QMatrix) -> QMatrix {
        let n = b.order();
        let mut out = b.clone();
        for r in 0..n {
            for c in 0..n {
                if !b.get(r, c).is_zero() {
                    out.set(r, c, &self.d[r] * b.get(r, c) / &self.d[c]);
                }
            }
        }
        out
    }
}

/// Normalize a member of some `Q(A_i)` to arrow form with `D B D⁻¹`,
/// `D = diag(1, B12, ..., B1n)`; the first row becomes `(a1, 1, ..., 1)` and
/// `a_k = B1k · Bk1`.
pub fn to_arrow_form(b: &QMatrix) -> Result<(ArrowMatrix, DiagonalSimilarity)> {
    let family = family_of(&sgn_of_matrix(b)).ok_or(Error::NotInFamily)?;
    let n = b.order();
    let mut d = vec![Rational::one()];
    d.extend((1..n).map(|k| b.get(0, k).clone()));
    let mut a = vec![b.get(0, 0).clone()];
    a.extend((1..n).map(|k| b.get(0, k) * b.get(k, 0)));
    let bs = (2..n).map(|k| -b.get(k, k).clone()).collect();
    Ok((ArrowMatrix::new(a, bs)?, DiagonalSimilarity { family, d }))
}

/// Lift an order-4 arrow matrix to order `n`: `a3` is split into `n - 3`
/// equal parts, each against `-b1`, and `a4` stays against `-b2`. The
/// result satisfies `det(λI - B_n) = (λ + b1)^{n-4} det(λI - B_4)`.
pub fn embed_witness(b4: &ArrowMatrix, n: usize, family: Family) -> Result<ArrowMatrix> {
    if n < 5 {
        return Err(Error::OrderTooSmall { found: n, min: 5 });
    }
    if b4.order() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: b4.order(),
        });
    }
    if !b4.in_family(family) {
        return Err(Error::NotInClass(family.index()));
    }
    let copies = n - 3;
    let share = &b4.a[2] / Rational::from_integer(BigInt::from(copies));
    let mut a = vec![b4.a[0].clone(), b4.a[1].clone()];
    a.extend(std::iter::repeat_n(share, copies));
    a.push(b4.a[3].clone());
    let mut b: Vec<Rational> = std::iter::repeat_n(b4.b[0].clone(), copies).collect();
    b.push(b4.b[1].clone());
    ArrowMatrix::new(a, b)
}

/// One deflation step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deflation {
    /// The split-off eigenvalue `-b_j`.
    pub eigenvalue: Rational,
    pub reduced: ArrowMatrix,
    /// 1-based indices `j < k` of the merged diagonal parameters.
    pub merged: (usize, usize),
}

/// Split off `-b_j` for the first repeated pair `b_j = b_k` (`j < k`),
/// merging `a_{k+2}` into `a_{j+2}` and dropping row and column `k + 2`.
pub fn deflate_repeated(b: &ArrowMatrix) -> Result<Deflation> {
    let bs = &b.b;
    let (j, k) = (0..bs.len())
        .flat_map(|j| (j + 1..bs.len()).map(move |k| (j, k)))
        .find(|&(j, k)| bs[j] == bs[k])
        .ok_or(Error::NoRepeatedB)?;
    if b.order() - 1 < ArrowMatrix::MIN_ORDER {
        return Err(Error::OrderTooSmall {
            found: b.order() - 1,
            min: ArrowMatrix::MIN_ORDER,
        });
    }
    let merged = &b.a[j + 2] + &b.a[k + 2];
    if merged.is_zero() {
        return Err(Error::DegenerateMerge { j: j + 1, k: k + 1 });
    }
    let mut a = b.a.clone();
    a[j + 2] = merged;
    a.remove(k + 2);
    let mut nb = bs.clone();
    nb.remove(k);
    Ok(Deflation {
        eigenvalue: -bs[j].clone(),
        reduced: ArrowMatrix::new(a, nb)?,
        merged: (j + 1, k + 1),
    })
}

/// Deflate repeatedly until the diagonal parameters are distinct (or the
/// order reaches 4). Returns the split-off eigenvalues and the remainder.
pub fn deflate_all(b: &ArrowMatrix) -> Result<(Vec<Rational>, ArrowMatrix)> {
    let mut eigenvalues = Vec::new();
    let mut cur = b.clone();
    loop {
        match deflate_repeated(&cur) {
            Ok(step) => {
                eigenvalues.push(step.eigenvalue);
                cur = step.reduced;
            }
            Err(Error::NoRepeatedB) | Err(Error::OrderTooSmall { .. }) => return Ok((eigenvalues, cur)),
            Err(e) => return Err(e),
        }
    }
}

/// Sample an arrow-form member of `Q(A_i)` of order `n`.
pub fn sample_arrow(family: Family, n: usize, cfg: &RealizationConfig) -> Result<ArrowMatrix> {
    let p = family_pattern(family, n)?;
    Ok(to_arrow_form(&sample_realization(&p, cfg))?.0)
}
