use num::integer::Integer;
use num::{BigInt, One, Zero};

use super::{QMatrix, RationalPoly};
use crate::Rational;

/// Exact characteristic-polynomial algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharPolyMethod {
    /// Division-free, `O(n^4)`.
    Berkowitz,
    /// Trace recurrence, divides by `1..n`.
    FaddeevLeVerrier,
}

pub const DEFAULT_METHOD: CharPolyMethod = CharPolyMethod::Berkowitz;

/// `det(λI - B)`, monic of degree `n`.
pub fn char_poly(b: &QMatrix) -> RationalPoly {
    char_poly_with(b, DEFAULT_METHOD)
}

pub fn char_poly_with(b: &QMatrix, method: CharPolyMethod) -> RationalPoly {
    match method {
        CharPolyMethod::Berkowitz => berkowitz(b),
        CharPolyMethod::FaddeevLeVerrier => faddeev_leverrier(b),
    }
}

fn faddeev_leverrier(a: &QMatrix) -> RationalPoly {
    let n = a.order();
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k
    let mut m = QMatrix::zeros(n);
    for k in 1..=n {
        m = a.mul(&m).shifted(&c[n - k + 1]);
        let am = a.mul(&m);
        c[n - k] = -am.trace() / Rational::from_integer(BigInt::from(k));
    }
    RationalPoly::new(c)
}

/// Builds the polynomial of each leading principal submatrix from the
/// previous one with a Toeplitz product. The algorithm never divides, so it
/// runs on the integer matrix `D·A`, `D` the common denominator, and the
/// coefficients are rescaled at the end.
fn berkowitz(a: &QMatrix) -> RationalPoly {
    let n = a.order();
    let d = a
        .entries()
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let m: Vec<BigInt> = a
        .entries()
        .iter()
        .map(|x| x.numer() * (&d / x.denom()))
        .collect();
    let at = |i: usize, j: usize| &m[i * n + j];

    // descending coefficients of the 1x1 leading block
    let mut poly: Vec<BigInt> = vec![BigInt::one(), -at(0, 0)];
    for r in 1..n {
        // A_{r+1} = [[M, c], [R, a_rr]] with M the leading r x r block
        let row: Vec<&BigInt> = (0..r).map(|j| at(r, j)).collect();
        // first column of the Toeplitz matrix: 1, -a_rr, -R c, -R M c, ...
        let mut t = Vec::with_capacity(r + 2);
        t.push(BigInt::one());
        t.push(-at(r, r));
        let mut v: Vec<BigInt> = (0..r).map(|i| at(i, r).clone()).collect();
        for _ in 0..r {
            t.push(-dot(row.iter().copied(), &v));
            v = (0..r).map(|i| dot((0..r).map(|j| at(i, j)), &v)).collect();
        }
        let mut next = vec![BigInt::zero(); r + 2];
        for (i, out) in next.iter_mut().enumerate() {
            for (j, p) in poly.iter().enumerate().take(i + 1) {
                if !p.is_zero() && !t[i - j].is_zero() {
                    *out += &t[i - j] * p;
                }
            }
        }
        poly = next;
    }
    // descending index k holds the coefficient of λ^(n-k), scaled by D^k
    let mut scale = BigInt::one();
    let mut coeffs = Vec::with_capacity(n + 1);
    for c in poly {
        coeffs.push(Rational::new(c, scale.clone()));
        scale *= &d;
    }
    coeffs.reverse();
    RationalPoly::new(coeffs)
}

fn dot<'a>(xs: impl Iterator<Item = &'a BigInt>, ys: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (x, y) in xs.zip(ys) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}
