//! Sign patterns over `{+, -, 0}`, the families `A1`, `A2`, `A3`, and the
//! equivalence transformations (transposition, permutation similarity,
//! signature similarity).
//!
//! Indices are 0-based internally. Error messages and reports are 1-based.

use std::fmt;

use nalgebra::DMatrix;
use num::{Signed, Zero};
use serde_json::Value;

use crate::engine::QMatrix;
use crate::{Error, Result};

/// Sign of a real number. The derived order `Minus < Zero < Plus` is the
/// canonical order used when comparing patterns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn of<T: Signed + Zero>(x: &T) -> Sign {
        if x.is_zero() {
            Sign::Zero
        } else if x.is_positive() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn of_f64(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Plus
        } else if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Sign::Minus => "-",
            Sign::Zero => "0",
            Sign::Plus => "+",
        }
    }

    pub fn from_token(tok: &str) -> Option<Sign> {
        match tok {
            "+" => Some(Sign::Plus),
            "-" => Some(Sign::Minus),
            "0" => Some(Sign::Zero),
            _ => None,
        }
    }

    /// `+1`, `0`, `-1`.
    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }

    pub fn from_i8(x: i8) -> Sign {
        Sign::of_f64(x as f64)
    }

    pub fn times(self, other: Sign) -> Sign {
        Sign::from_i8(self.to_i8() * other.to_i8())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A square sign pattern, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignPattern {
    n: usize,
    entries: Vec<Sign>,
}

impl SignPattern {
    pub fn new(n: usize, entries: Vec<Sign>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Ok(SignPattern { n, entries })
    }

    pub fn from_rows(rows: &[Vec<Sign>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    row: row + 1,
                    found: r.len(),
                    expected: n,
                });
            }
        }
        Self::new(n, rows.concat())
    }

    pub fn filled(n: usize, sign: Sign) -> Result<Self> {
        Self::new(n, vec![sign; n * n])
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Sign {
        self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, sign: Sign) {
        self.entries[row * self.n + col] = sign;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Sign]> {
        self.entries.chunks(self.n)
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|s| **s != Sign::Zero).count()
    }

    /// Parse the text format: one row per line, tokens `+`, `-`, `0`
    /// separated by whitespace. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let row_no = rows.len() + 1;
            let row = line
                .split_whitespace()
                .enumerate()
                .map(|(c, tok)| {
                    Sign::from_token(tok).ok_or_else(|| Error::IllegalToken {
                        token: tok.to_string(),
                        row: row_no,
                        col: c + 1,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    /// Canonical text: single spaces between tokens, newline after each row.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<&str> = row.iter().map(|s| s.token()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// JSON: an array of row strings, e.g. `["+ +", "- 0"]`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows()
                .map(|row| {
                    let toks: Vec<&str> = row.iter().map(|s| s.token()).collect();
                    Value::String(toks.join(" "))
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Json("pattern must be an array of row strings".into()))?;
        let mut text = String::new();
        for r in rows {
            let r = r
                .as_str()
                .ok_or_else(|| Error::Json("pattern rows must be strings".into()))?;
            text.push_str(r);
            text.push('\n');
        }
        Self::parse(&text)
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for r in 0..n {
            for c in 0..n {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The three arrow-shaped families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A1,
    A2,
    A3,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::A1, Family::A2, Family::A3];

    pub fn index(self) -> u8 {
        match self {
            Family::A1 => 1,
            Family::A2 => 2,
            Family::A3 => 3,
        }
    }

    pub fn from_index(i: u8) -> Result<Family> {
        match i {
            1 => Ok(Family::A1),
            2 => Ok(Family::A2),
            3 => Ok(Family::A3),
            other => Err(Error::UnknownFamily(other)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.index())
    }
}

/// The family pattern of order `n >= 4`.
///
/// Row 1 is `+` off the diagonal; column 1 below the corner, the corner and
/// the trailing diagonal depend on the family; everything off the first row
/// and column is zero, and position (2,2) is zero.
pub fn family_pattern(family: Family, n: usize) -> Result<SignPattern> {
    use Sign::*;
    if n < 4 {
        return Err(Error::OrderTooSmall { found: n, min: 4 });
    }
    let mut p = SignPattern::filled(n, Zero)?;
    let corner = if family == Family::A1 { Plus } else { Minus };
    p.set(0, 0, corner);
    for k in 1..n {
        p.set(0, k, Plus);
        let col = match family {
            Family::A1 => Minus,
            Family::A2 if k == 1 => Minus,
            Family::A2 => Plus,
            Family::A3 if k == n - 1 => Minus,
            Family::A3 => Plus,
        };
        p.set(k, 0, col);
    }
    for k in 2..n {
        p.set(k, k, Minus);
    }
    if family == Family::A3 {
        p.set(n - 1, n - 1, Plus);
    }
    Ok(p)
}

/// Which family pattern, if any, `p` equals.
pub fn family_of(p: &SignPattern) -> Option<Family> {
    Family::ALL
        .into_iter()
        .find(|&f| family_pattern(f, p.order()).is_ok_and(|q| q == *p))
}

/// True iff the digraph with an arc `j -> k` for every nonzero entry
/// `(j, k)` is strongly connected.
pub fn is_irreducible(p: &SignPattern) -> bool {
    let n = p.order();
    let reaches_all = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                let arc = if forward { p.get(v, w) } else { p.get(w, v) };
                if arc != Sign::Zero && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    reaches_all(true) && reaches_all(false)
}

/// A permutation of `0..n`, acting by `P^T A P` with
/// `(P^T A P)[i][j] = A[map[i]][map[j]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n {
                return Err(Error::InvalidPermutation(format!("index {m} out of range")));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidPermutation(format!("index {m} repeated")));
            }
        }
        Ok(Permutation(map))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.0
    }

    /// The permutation whose similarity equals applying `self`, then `next`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        Permutation(next.0.iter().map(|&i| self.0[i]).collect())
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

/// A diagonal `±1` matrix acting by `D A D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature(Vec<i8>);

impl Signature {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidSignature);
        }
        Ok(Signature(signs))
    }

    pub fn identity(n: usize) -> Self {
        Signature(vec![1; n])
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn all(n: usize) -> Vec<Signature> {
        (0..1u32 << n)
            .map(|mask| Signature((0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transform {
    Transpose,
    PermSim(Permutation),
    SigSim(Signature),
}

pub fn transform(p: &SignPattern, op: &Transform) -> Result<SignPattern> {
    let n = p.order();
    match op {
        Transform::Transpose => Ok(p.transpose()),
        Transform::PermSim(perm) => {
            if perm.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: perm.len(),
                });
            }
            let m = perm.map();
            let mut out = p.clone();
            for i in 0..n {
                for j in 0..n {
                    out.set(i, j, p.get(m[i], m[j]));
                }
            }
            Ok(out)
        }
        Transform::SigSim(sig) => {
            if sig.signs().len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: sig.signs().len(),
                });
            }
            let d = sig.signs();
            let mut out = p.clone();
            for i in 0..n {
                for j in 0..n {
                    out.set(i, j, p.get(i, j).times(Sign::from_i8(d[i] * d[j])));
                }
            }
            Ok(out)
        }
    }
}

/// Witness that two patterns are equivalent: `to = D (P^T X P) D` where
/// `X = from^T` if `transpose`, else `from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub transpose: bool,
    pub permutation: Permutation,
    pub signature: Signature,
}

impl Equivalence {
    pub fn apply(&self, p: &SignPattern) -> Result<SignPattern> {
        let x = if self.transpose { p.transpose() } else { p.clone() };
        let x = transform(&x, &Transform::PermSim(self.permutation.clone()))?;
        transform(&x, &Transform::SigSim(self.signature.clone()))
    }
}

/// Largest order for which [`find_equivalence`] searches the whole group.
pub const MAX_EQUIVALENCE_ORDER: usize = 5;

/// Exhaustive search over all `n! * 2^n * 2` transformations.
pub fn find_equivalence(from: &SignPattern, to: &SignPattern) -> Result<Option<Equivalence>> {
    let n = from.order();
    if to.order() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: to.order(),
        });
    }
    if n > MAX_EQUIVALENCE_ORDER {
        return Err(Error::InvalidConfig(format!(
            "equivalence search is limited to order {MAX_EQUIVALENCE_ORDER}"
        )));
    }
    // cheap invariant: nonzero count
    if from.nonzero_count() != to.nonzero_count() {
        return Ok(None);
    }
    let signatures = Signature::all(n);
    for transpose in [false, true] {
        for permutation in Permutation::all(n) {
            for signature in &signatures {
                let eq = Equivalence {
                    transpose,
                    permutation: permutation.clone(),
                    signature: signature.clone(),
                };
                if eq.apply(from)? == *to {
                    return Ok(Some(eq));
                }
            }
        }
    }
    Ok(None)
}

/// Entrywise sign of an exact matrix.
pub fn sgn_of_matrix(b: &QMatrix) -> SignPattern {
    let n = b.order();
    let entries = (0..n * n).map(|k| Sign::of(b.get(k / n, k % n))).collect();
    SignPattern::new(n, entries).expect("QMatrix order is at least 1")
}

/// Entrywise sign of a floating-point matrix.
pub fn sgn_of_real_matrix(b: &DMatrix<f64>) -> Result<SignPattern> {
    let n = b.nrows();
    if b.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.ncols(),
        });
    }
    let entries = (0..n * n).map(|k| Sign::of_f64(b[(k / n, k % n)])).collect();
    SignPattern::new(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pat(s: &str) -> SignPattern {
        SignPattern::parse(s).unwrap()
    }

    #[test]
    fn parse_two_by_two() {
        let p = pat("+ +\n- 0");
        assert_eq!(p.order(), 2);
        assert_eq!(p.get(0, 0), Sign::Plus);
        assert_eq!(p.get(0, 1), Sign::Plus);
        assert_eq!(p.get(1, 0), Sign::Minus);
        assert_eq!(p.get(1, 1), Sign::Zero);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(SignPattern::parse(""), Err(Error::EmptyInput));
        assert_eq!(SignPattern::parse("  \n\n"), Err(Error::EmptyInput));
        assert_eq!(
            SignPattern::parse("+ +\n- 0 +"),
            Err(Error::NotSquare {
                row: 2,
                found: 3,
                expected: 2
            })
        );
        assert_eq!(
            SignPattern::parse("+ +\n- x"),
            Err(Error::IllegalToken {
                token: "x".into(),
                row: 2,
                col: 2
            })
        );
    }

    #[test]
    fn parser_tolerates_whitespace() {
        let p = pat("  +\t+ \n\n -   0\n");
        assert_eq!(p.render(), "+ +\n- 0\n");
    }

    #[test]
    fn json_rows() {
        let p = pat("+ -\n0 +");
        let v = p.to_json();
        assert_eq!(v, serde_json::json!(["+ -", "0 +"]));
        assert_eq!(SignPattern::from_json(&v).unwrap(), p);
    }

    #[test]
    fn family_one_order_four() {
        let expected = pat("+ + + +\n- 0 0 0\n- 0 - 0\n- 0 0 -");
        assert_eq!(family_pattern(Family::A1, 4).unwrap(), expected);
    }

    #[test]
    fn family_three_order_five() {
        let p = family_pattern(Family::A3, 5).unwrap();
        let col: Vec<Sign> = (0..5).map(|r| p.get(r, 0)).collect();
        let row: Vec<Sign> = (0..5).map(|c| p.get(0, c)).collect();
        let diag: Vec<Sign> = (0..5).map(|k| p.get(k, k)).collect();
        use Sign::*;
        assert_eq!(col, vec![Minus, Plus, Plus, Plus, Minus]);
        assert_eq!(row, vec![Minus, Plus, Plus, Plus, Plus]);
        assert_eq!(diag, vec![Minus, Zero, Minus, Minus, Plus]);
        assert_eq!(p.nonzero_count(), 2 * 4 + 4);
    }

    #[test]
    fn family_two_order_four() {
        let expected = pat("- + + +\n- 0 0 0\n+ 0 - 0\n+ 0 0 -");
        assert_eq!(family_pattern(Family::A2, 4).unwrap(), expected);
    }

    #[test]
    fn family_requires_order_four() {
        assert_eq!(
            family_pattern(Family::A1, 3),
            Err(Error::OrderTooSmall { found: 3, min: 4 })
        );
        assert_eq!(Family::from_index(4), Err(Error::UnknownFamily(4)));
    }

    #[test]
    fn family_entry_census() {
        for f in Family::ALL {
            for n in 4..=12 {
                let p = family_pattern(f, n).unwrap();
                let off_diag = (0..n)
                    .flat_map(|r| (0..n).map(move |c| (r, c)))
                    .filter(|&(r, c)| r != c && p.get(r, c) != Sign::Zero)
                    .count();
                assert_eq!(off_diag, 2 * (n - 1));
                for r in 1..n {
                    for c in 1..n {
                        if r != c {
                            assert_eq!(p.get(r, c), Sign::Zero);
                        }
                    }
                }
                // diagonal: (corner, 0, nonzero...)
                assert_eq!(p.get(1, 1), Sign::Zero);
                assert!((2..n).all(|k| p.get(k, k) != Sign::Zero));
                assert_eq!(family_of(&p), Some(f));
            }
        }
    }

    /// Transitive closure by repeated squaring of the reachability relation.
    fn irreducible_oracle(p: &SignPattern) -> bool {
        let n = p.order();
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
            for (j, r) in row.iter_mut().enumerate() {
                if p.get(i, j) != Sign::Zero {
                    *r = true;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        reach.iter().all(|row| row.iter().all(|&x| x))
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&family_pattern(Family::A1, 5).unwrap()));
        assert!(irreducible_oracle(&family_pattern(Family::A1, 5).unwrap()));
        assert!(!is_irreducible(&pat("+ 0\n0 +")));
        assert!(is_irreducible(&pat("0")));
        for f in Family::ALL {
            for n in 4..=12 {
                assert!(is_irreducible(&family_pattern(f, n).unwrap()));
            }
        }
    }

    #[test]
    fn identity_transforms() {
        let p = family_pattern(Family::A2, 6).unwrap();
        let sig = Transform::SigSim(Signature::identity(6));
        assert_eq!(transform(&p, &sig).unwrap(), p);
        let t = transform(&transform(&p, &Transform::Transpose).unwrap(), &Transform::Transpose);
        assert_eq!(t.unwrap(), p);
        assert!(transform(&p, &Transform::PermSim(Permutation::identity(5))).is_err());
        assert_eq!(Signature::new(vec![1, 0]), Err(Error::InvalidSignature));
        assert!(Permutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn family_one_equivalent_to_flipped_arrow() {
        let a1 = family_pattern(Family::A1, 4).unwrap();
        let target = pat("+ - - -\n+ 0 0 0\n+ 0 - 0\n+ 0 0 -");
        let eq = find_equivalence(&a1, &target).unwrap().expect("equivalent");
        assert_eq!(eq.apply(&a1).unwrap(), target);
        // family 1 and family 2 have different diagonals, so they cannot be equivalent
        let a2 = family_pattern(Family::A2, 4).unwrap();
        assert_eq!(find_equivalence(&a1, &a2).unwrap(), None);
    }

    #[test]
    fn permutation_enumeration() {
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Signature::all(3).len(), 8);
    }

    #[test]
    fn sign_of_matrices() {
        let b = DMatrix::from_row_slice(2, 2, &[1.5, -2.0, 0.0, 3.0]);
        assert_eq!(sgn_of_real_matrix(&b).unwrap(), pat("+ -\n0 +"));
        let z = QMatrix::zeros(3);
        assert_eq!(sgn_of_matrix(&z), SignPattern::filled(3, Sign::Zero).unwrap());
    }

    fn arb_pattern() -> impl Strategy<Value = SignPattern> {
        (1usize..7).prop_flat_map(|n| {
            proptest::collection::vec(prop_oneof![Just(Sign::Minus), Just(Sign::Zero), Just(Sign::Plus)], n * n)
                .prop_map(move |e| SignPattern::new(n, e).unwrap())
        })
    }

    fn arb_pattern_with_perms() -> impl Strategy<Value = (SignPattern, Permutation, Permutation, Signature)> {
        arb_pattern().prop_flat_map(|p| {
            let n = p.order();
            let perm = Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|m| Permutation::new(m).unwrap());
            let sig = proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n)
                .prop_map(|s| Signature::new(s).unwrap());
            (Just(p), perm.clone(), perm, sig)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn render_parse_round_trip(p in arb_pattern()) {
            let text = p.render();
            prop_assert_eq!(SignPattern::parse(&text).unwrap(), p.clone());
            // sloppy spacing normalizes to the canonical form
            let sloppy = text.replace(' ', "   \t");
            prop_assert_eq!(SignPattern::parse(&sloppy).unwrap().render(), text);
        }

        #[test]
        fn permutation_similarity_composes((p, s, t, _d) in arb_pattern_with_perms()) {
            let twice = transform(&transform(&p, &Transform::PermSim(s.clone())).unwrap(), &Transform::PermSim(t.clone())).unwrap();
            let once = transform(&p, &Transform::PermSim(s.then(&t))).unwrap();
            prop_assert_eq!(twice, once);
        }

        #[test]
        fn equivalences_preserve_irreducibility((p, s, _t, d) in arb_pattern_with_perms()) {
            let expected = irreducible_oracle(&p);
            prop_assert_eq!(is_irreducible(&p), expected);
            for op in [Transform::Transpose, Transform::PermSim(s), Transform::SigSim(d.clone())] {
                prop_assert_eq!(is_irreducible(&transform(&p, &op).unwrap()), expected);
            }
            // signature similarity is an involution
            let dd = transform(&transform(&p, &Transform::SigSim(d.clone())).unwrap(), &Transform::SigSim(d)).unwrap();
            prop_assert_eq!(dd, p);
        }
    }
}
