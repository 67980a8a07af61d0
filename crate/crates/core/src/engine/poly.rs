//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::integer::Integer;
use num::{BigInt, One, Signed, Zero};
use serde_json::{json, Value};

use crate::json::{field, rationals_from_json, rationals_to_json};
use crate::{Result, Rational};

/// Polynomial with ascending coefficients; the zero polynomial has none.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

/// Evaluation point for sign counts, including the two infinities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    NegInf,
    At(Rational),
    PosInf,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// `λ - root`.
    pub fn linear(root: &Rational) -> Self {
        Self::new(vec![-root.clone(), Rational::one()])
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => {
                let lc = lc.clone();
                Self::new(self.coeffs.iter().map(|c| c / &lc).collect())
            }
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Multiplicity of the root `0`.
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divide by `λ^k`; the low coefficients must be zero.
    pub fn shift_down(&self, k: usize) -> Self {
        debug_assert!(self.coeffs.iter().take(k).all(|c| c.is_zero()));
        Self::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    /// `p(λ + c)`, by repeated synthetic division.
    pub fn taylor_shift(&self, c: &Rational) -> Self {
        let mut a = self.coeffs.clone();
        let d = a.len();
        if c.is_zero() || d < 2 {
            return self.clone();
        }
        for i in 0..d - 1 {
            for k in (i..d - 1).rev() {
                let t = &a[k + 1] * c;
                a[k] += t;
            }
        }
        Self::new(a)
    }

    /// Integer polynomial whose roots are `q·(r - c)` for the roots `r` of
    /// `self`, where `c = p/q` in lowest terms. Same refined inertia as
    /// `taylor_shift(c)`, computed without rational arithmetic.
    pub fn scaled_taylor_shift(&self, c: &Rational) -> Self {
        let (num, den) = (c.numer(), c.denom());
        // q^d p(y/q), then y = μ + p by integer synthetic division
        let ints = self.primitive_integer();
        let d = ints.len();
        let mut a: Vec<BigInt> = Vec::with_capacity(d);
        let mut pow = BigInt::one();
        for k in (0..d).rev() {
            a.push(&ints[k] * &pow);
            pow *= den;
        }
        a.reverse();
        if !num.is_zero() {
            for i in 0..d.saturating_sub(1) {
                for k in (i..d - 1).rev() {
                    let t = &a[k + 1] * num;
                    a[k] += t;
                }
            }
        }
        Self::new(a.into_iter().map(Rational::from_integer).collect())
    }

    /// Split `p(λ) = E(λ²) + λ·O(λ²)`.
    pub fn even_odd_split(&self) -> (Self, Self) {
        let even = self.coeffs.iter().step_by(2).cloned().collect();
        let odd = self.coeffs.iter().skip(1).step_by(2).cloned().collect();
        (Self::new(even), Self::new(odd))
    }

    /// `p(λ²)`.
    pub fn compose_square(&self) -> Self {
        let mut coeffs = vec![Rational::zero(); (2 * self.coeffs.len()).saturating_sub(1)];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * k] = c.clone();
        }
        Self::new(coeffs)
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &rem[k + dd] / &lc;
            if !c.is_zero() {
                for (i, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Exact quotient, or `None` when the remainder is nonzero.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        // primitive pseudo-remainder sequence over Z
        let (mut a, mut b) = (self.primitive_integer(), other.primitive_integer());
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = primitive(pseudo_rem(&a, &b));
            a = b;
            b = r;
        }
        Self::new(a.into_iter().map(Rational::from_integer).collect()).monic()
    }

    /// Ascending integer coefficients of a positive multiple of `self`
    /// with content 1 and positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let d = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut v = primitive(self.coeffs.iter().map(|c| c.numer() * (&d / c.denom())).collect());
        if v.last().is_some_and(|c| c.is_negative()) {
            v.iter_mut().for_each(|c| *c = -&*c);
        }
        v
    }

    /// Yun's algorithm: `p = c · ∏ f_k^k` with each `f_k` monic, squarefree
    /// and pairwise coprime. Returns the nonconstant `(f_k, k)`.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.exact_div(&a0).expect("gcd divides");
        let mut c = df.exact_div(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut k = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), k));
            }
            b = b.exact_div(&a).expect("gcd divides");
            c = d.exact_div(&a).expect("gcd divides");
            d = &c - &b.derivative();
            k += 1;
        }
        out
    }

    /// Sign at a point, including the infinities.
    pub fn sign_at(&self, x: &Point) -> i8 {
        let Some(lc) = self.leading() else { return 0 };
        let s = |q: &Rational| {
            if q.is_zero() {
                0
            } else if q.is_positive() {
                1
            } else {
                -1
            }
        };
        match x {
            Point::PosInf => s(lc),
            Point::NegInf => {
                let d = self.degree().unwrap();
                if d % 2 == 0 {
                    s(lc)
                } else {
                    -s(lc)
                }
            }
            Point::At(q) => s(&self.eval(q)),
        }
    }

    /// Signed remainder sequence `f0, f1, f_{k+1} = -rem(f_{k-1}, f_k)`.
    pub fn signed_remainder_sequence(f0: &Self, f1: &Self) -> Vec<Self> {
        let mut seq = vec![f0.clone()];
        if f1.is_zero() {
            return seq;
        }
        seq.push(f1.clone());
        loop {
            let n = seq.len();
            let r = -&seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    /// The Sturm sequence `p, p', ...`.
    pub fn sturm_sequence(&self) -> Vec<Self> {
        Self::signed_remainder_sequence(self, &self.derivative())
    }

    /// Distinct real roots in `(lo, hi]`; `lo` must not be a root.
    pub fn count_distinct_real_roots(&self, lo: &Point, hi: &Point) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let seq = self.sturm_sequence();
        let lo_v = sign_variations(&seq, lo);
        let hi_v = sign_variations(&seq, hi);
        lo_v.saturating_sub(hi_v)
    }

    /// Real roots strictly below zero, counted with multiplicity.
    /// `p(0)` must be nonzero.
    pub fn count_negative_roots(&self) -> usize {
        self.squarefree_decomposition()
            .iter()
            .map(|(f, k)| k * f.count_distinct_real_roots(&Point::NegInf, &Point::At(Rational::zero())))
            .sum()
    }

    /// `{"coeffs": [[num, den], ...]}`, ascending.
    pub fn to_json(&self) -> Value {
        json!({ "coeffs": rationals_to_json(&self.coeffs) })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        Ok(Self::new(rationals_from_json(field(v, "coeffs")?)?))
    }
}

/// Sign changes in a sequence evaluated at `x`, zeros skipped.
pub fn sign_variations(seq: &[RationalPoly], x: &Point) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let s = p.sign_at(x);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Divide by the (positive) content; trailing zeros are trimmed.
pub(crate) fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        v.iter_mut().for_each(|c| *c = &*c / &g);
    }
    v
}

/// `lc(b)^(deg a - deg b + 1) · a mod b` over Z, ascending coefficients.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let lb = b.last().expect("nonzero divisor");
    let db = b.len() - 1;
    while r.len() > db && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        r.iter_mut().for_each(|c| *c *= lb);
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] -= &lr * bk;
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let show_coeff = !mag.is_one() || k == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("λ")?,
                _ => write!(f, "λ^{k}")?,
            }
        }
        Ok(())
    }
}
