//! Refined inertia `(n+, n-, nz, 2np)`.
//!
//! The exact path works on the characteristic polynomial:
//!
//! 1. `nz` is the multiplicity of the root `0`.
//! 2. Write the rest as `q(λ) = E(λ²) + λ·O(λ²)` and let `g = gcd(E, O)`.
//!    `G(λ) = g(λ²)` collects every pair of roots symmetric about the
//!    origin; its purely imaginary roots are the negative real roots of `g`,
//!    counted with multiplicity through a squarefree decomposition and Sturm
//!    sequences. The other roots of `G` split evenly between half-planes.
//! 3. `s = q / G` has no roots on the imaginary axis and no symmetric pairs,
//!    so its Routh array has no zero row. Its right-half-plane count comes
//!    from the first-column sign changes, or, when a leading element
//!    vanishes, from the Cauchy index of the Routh–Hurwitz pair computed
//!    with a signed remainder sequence.

use std::fmt;

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::charpoly::char_poly;
use super::matrix::max_row_sum_f64;
use super::poly::{sign_variations, Point, RationalPoly};
use super::QMatrix;
use crate::{Error, Result, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RefinedInertia {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
    pub two_n_p: usize,
}

impl RefinedInertia {
    pub fn new(n_plus: usize, n_minus: usize, n_zero: usize, two_n_p: usize) -> Self {
        assert!(two_n_p % 2 == 0, "two_n_p must be even, got {two_n_p}");
        RefinedInertia {
            n_plus,
            n_minus,
            n_zero,
            two_n_p,
        }
    }

    pub fn order(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero + self.two_n_p
    }

    /// Eigenvalues on the imaginary axis, zero included.
    pub fn on_axis(&self) -> usize {
        self.n_zero + self.two_n_p
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain struct")
    }
}

impl fmt::Display for RefinedInertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.n_plus, self.n_minus, self.n_zero, self.two_n_p
        )
    }
}

/// Relative threshold for the numeric engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericTolerance {
    pub axis_eps: f64,
}

impl NumericTolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(axis_eps: f64) -> Result<Self> {
        if !(axis_eps > 0.0 && axis_eps.is_finite()) {
            return Err(Error::InvalidConfig(format!("axis_eps must be positive, got {axis_eps}")));
        }
        Ok(NumericTolerance { axis_eps })
    }
}

impl Default for NumericTolerance {
    fn default() -> Self {
        NumericTolerance {
            axis_eps: Self::DEFAULT_EPS,
        }
    }
}

/// Exact refined inertia of the roots of `p`.
pub fn refined_inertia_exact(p: &RationalPoly) -> Result<RefinedInertia> {
    let degree = p.degree().ok_or(Error::ZeroPolynomial)?;
    let n_zero = p.trailing_zeros();
    // a positive integer multiple has the same roots and avoids rational
    // normalization in the steps below
    let q = RationalPoly::new(
        p.shift_down(n_zero)
            .primitive_integer()
            .into_iter()
            .map(Rational::from_integer)
            .collect(),
    );
    if q.degree() == Some(0) {
        return Ok(RefinedInertia::new(0, 0, n_zero, 0));
    }

    let (even, odd) = q.even_odd_split();
    let g = even.gcd(&odd);
    if g.degree() == Some(0) {
        let n_plus = rhp_count(&q)?;
        return Ok(RefinedInertia::new(n_plus, degree - n_zero - n_plus, n_zero, 0));
    }
    let two_n_p = 2 * g.count_negative_roots();
    let symmetric = g.compose_square();
    let symmetric_deg = symmetric.degree().unwrap_or(0);
    let s = q
        .exact_div(&symmetric)
        .ok_or_else(|| Error::CheckFailed("symmetric factor does not divide".into()))?;

    let off_axis_pairs = symmetric_deg - two_n_p;
    debug_assert!(off_axis_pairs % 2 == 0);
    let n_plus = rhp_count(&s)? + off_axis_pairs / 2;
    let n_minus = degree - n_zero - two_n_p - n_plus;
    Ok(RefinedInertia::new(n_plus, n_minus, n_zero, two_n_p))
}

/// Right-half-plane roots of a polynomial with no symmetric root pairs.
fn rhp_count(s: &RationalPoly) -> Result<usize> {
    match routh_sign_changes(s) {
        Some(k) => Ok(k),
        None => cauchy_index_rhp_count(s),
    }
}

/// First-column sign changes of the Routh array, or `None` when a leading
/// element vanishes (a zero row counts as vanishing too).
pub fn routh_sign_changes(p: &RationalPoly) -> Option<usize> {
    let d = p.degree()?;
    // fraction-free: each row is kept as a positive multiple of the
    // textbook row, which leaves the first-column signs unchanged
    let c = p.primitive_integer();
    let mut prev: Vec<BigInt> = (0..=d).rev().step_by(2).map(|k| c[k].clone()).collect();
    let mut cur: Vec<BigInt> = if d == 0 {
        Vec::new()
    } else {
        (0..d).rev().step_by(2).map(|k| c[k].clone()).collect()
    };
    let mut first_col = vec![prev[0].sign()];
    for _ in 0..d {
        let lead = cur.first().cloned().unwrap_or_else(BigInt::zero);
        if lead.is_zero() {
            return None;
        }
        first_col.push(lead.sign());
        let width = prev.len().max(cur.len());
        let zero = BigInt::zero();
        let at = |v: &[BigInt], k: usize| v.get(k).unwrap_or(&zero).clone();
        let flip = lead.is_negative();
        let next: Vec<BigInt> = (0..width.saturating_sub(1))
            .map(|k| {
                let x = &lead * at(&prev, k + 1) - &prev[0] * at(&cur, k + 1);
                if flip {
                    -x
                } else {
                    x
                }
            })
            .collect();
        prev = cur;
        cur = content_free(next);
    }
    Some(first_col.windows(2).filter(|w| w[0] != w[1]).count())
}

fn content_free(mut v: Vec<BigInt>) -> Vec<BigInt> {
    use num::Integer;
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g > BigInt::one() {
        v.iter_mut().for_each(|x| *x = &*x / &g);
    }
    v
}

/// Generalized Routh–Hurwitz: with `s(iω) = i^d [D(ω) - i N(ω)]`, the
/// Cauchy index of `N/D` over the real line equals `d - 2·n+`.
/// Requires that `s` has no roots on the imaginary axis.
pub fn cauchy_index_rhp_count(s: &RationalPoly) -> Result<usize> {
    let d = s.degree().ok_or(Error::ZeroPolynomial)?;
    let alt = |start: usize| {
        let mut coeffs = vec![Rational::zero(); start + 1];
        let mut k = start as isize;
        let mut sign = true;
        while k >= 0 {
            let c = s.coeff(k as usize);
            coeffs[k as usize] = if sign { c } else { -c };
            sign = !sign;
            k -= 2;
        }
        RationalPoly::new(coeffs)
    };
    let den = alt(d);
    let num = if d == 0 { RationalPoly::zero() } else { alt(d - 1) };
    let seq = RationalPoly::signed_remainder_sequence(&den, &num);
    if seq.last().is_some_and(|g| g.degree().unwrap_or(0) > 0) {
        return Err(Error::CheckFailed(
            "Routh–Hurwitz pair shares a factor; roots on the imaginary axis".into(),
        ));
    }
    let index = sign_variations(&seq, &Point::NegInf) as isize - sign_variations(&seq, &Point::PosInf) as isize;
    let twice = d as isize - index;
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::CheckFailed(format!("Cauchy index {index} inconsistent with degree {d}")));
    }
    Ok((twice / 2) as usize)
}

/// Roots of `p` with real part below `x` (`inclusive`: at most `x`).
pub fn count_roots_re_below(p: &RationalPoly, x: &Rational, inclusive: bool) -> Result<usize> {
    // roots of p(λ + x) are the roots of p moved left by x
    let ri = refined_inertia_exact(&p.scaled_taylor_shift(x))?;
    Ok(if inclusive { ri.n_minus + ri.on_axis() } else { ri.n_minus })
}

/// Roots of `p` with `|Re λ| <= half_width`.
pub fn count_roots_in_strip(p: &RationalPoly, half_width: &Rational) -> Result<usize> {
    Ok(count_roots_re_below(p, half_width, true)? - count_roots_re_below(p, &-half_width.clone(), false)?)
}

/// `Δ(r)`: eigenvalues of `b` with real part at most `-r`, with multiplicity.
pub fn count_eigen_re_leq(b: &QMatrix, r: &Rational) -> Result<usize> {
    count_roots_re_below(&char_poly(b), &-r.clone(), true)
}

/// Eigenvalues of a dense real matrix.
pub fn numeric_eigenvalues(b: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if !b.is_square() {
        return Err(Error::DimensionMismatch {
            expected: b.nrows(),
            found: b.ncols(),
        });
    }
    if b.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenSolverFailed);
    }
    let schur = |m: DMatrix<f64>| nalgebra::Schur::try_new(m, f64::EPSILON, 10_000);
    // Francis iterations without exceptional shifts can stall on highly
    // symmetric spectra; retry once on an orthogonally similar matrix.
    let schur = schur(b.clone())
        .or_else(|| schur(householder_conjugate(b)))
        .ok_or(Error::EigenSolverFailed)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// `H B H` with the reflector `H = I - 2vvᵀ/vᵀv`, `v = (1, 2, ..., n)`.
fn householder_conjugate(b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = b.nrows();
    let v = nalgebra::DVector::from_fn(n, |i, _| (i + 1) as f64);
    let h = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / v.norm_squared());
    &h * b * &h
}

/// Classify eigenvalues with the absolute threshold `eps`.
pub fn classify_eigenvalues(eigs: &[Complex64], eps: f64) -> RefinedInertia {
    let mut ri = RefinedInertia::default();
    for l in eigs {
        if l.norm() <= eps {
            ri.n_zero += 1;
        } else if l.re.abs() <= eps {
            ri.two_n_p += 1;
        } else if l.re > 0.0 {
            ri.n_plus += 1;
        } else {
            ri.n_minus += 1;
        }
    }
    ri
}

/// Numeric refined inertia with threshold `axis_eps · ‖B‖∞`.
pub fn refined_inertia_numeric(b: &DMatrix<f64>, tol: NumericTolerance) -> Result<RefinedInertia> {
    let eigs = numeric_eigenvalues(b)?;
    let ri = classify_eigenvalues(&eigs, tol.axis_eps * max_row_sum_f64(b));
    if ri.two_n_p % 2 != 0 {
        // an unpaired near-axis value: the solver split a conjugate pair
        return Err(Error::CheckFailed(format!("unpaired imaginary-axis eigenvalue in {ri}")));
    }
    Ok(ri)
}

/// Nearest distance of a numeric eigenvalue to the imaginary axis,
/// relative to `‖B‖∞`.
pub fn relative_axis_distance(eigs: &[Complex64], scale: f64) -> f64 {
    let m = eigs.iter().map(|l| l.re.abs()).fold(f64::INFINITY, f64::min);
    if scale > 0.0 {
        m / scale
    } else {
        m
    }
}

/// `det(b_j I + B)` for an arrow matrix by the closed form
/// `-a_{j+2} b_j ∏_{m≠j} (b_j - b_m)`, checked against direct elimination.
/// `j` is 1-based.
pub fn arrow_shift_det(b: &crate::realization::ArrowMatrix, j: usize) -> Result<Rational> {
    let bs = b.b();
    if j == 0 || j > bs.len() {
        return Err(Error::MalformedArrow(format!("index j={j} outside 1..={}", bs.len())));
    }
    if !b.has_distinct_b() {
        return Err(Error::RepeatedB);
    }
    let formula = arrow_shift_det_formula(b, j);
    let direct = b.to_matrix().shifted(&bs[j - 1]).det();
    if formula != direct {
        return Err(Error::CheckFailed(format!(
            "det(b_{j} I + B): formula {formula} != direct {direct}"
        )));
    }
    Ok(formula)
}

pub(crate) fn arrow_shift_det_formula(b: &crate::realization::ArrowMatrix, j: usize) -> Rational {
    let bs = b.b();
    let bj = &bs[j - 1];
    let prod: Rational = bs
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != j - 1)
        .map(|(_, bm)| bj - bm)
        .product();
    -(&b.a()[j + 1]) * bj * prod
}

/// Exact refined inertia of an exact matrix.
pub fn refined_inertia_of(b: &QMatrix) -> Result<RefinedInertia> {
    refined_inertia_exact(&char_poly(b))
}

#[cfg(test)]
pub(crate) fn big(x: i64) -> Rational {
    Rational::from_integer(num::BigInt::from(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::ArrowMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn from_roots(roots: &[i64]) -> RationalPoly {
        roots
            .iter()
            .fold(RationalPoly::one(), |acc, &r| &acc * &RationalPoly::linear(&big(r)))
    }

    fn poly(c: &[i64]) -> RationalPoly {
        RationalPoly::from_i64(c)
    }

    #[test]
    fn textbook_cases() {
        assert_eq!(refined_inertia_exact(&poly(&[1, 0, 1])).unwrap(), RefinedInertia::new(0, 0, 0, 2));
        assert_eq!(refined_inertia_exact(&from_roots(&[-1, -2, 3])).unwrap(), RefinedInertia::new(1, 2, 0, 0));
        // λ (λ² + 4) (λ + 5)²
        let p = &(&poly(&[0, 1]) * &poly(&[4, 0, 1])) * &from_roots(&[-5, -5]);
        assert_eq!(refined_inertia_exact(&p).unwrap(), RefinedInertia::new(0, 2, 1, 2));
        assert_eq!(refined_inertia_exact(&RationalPoly::zero()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn repeated_imaginary_roots_keep_multiplicity() {
        // (λ² + 1)² (λ² + 9) (λ - 2)
        let p = &(&poly(&[1, 0, 1]).pow(2) * &poly(&[9, 0, 1])) * &from_roots(&[2]);
        assert_eq!(refined_inertia_exact(&p).unwrap(), RefinedInertia::new(1, 0, 0, 6));
    }

    #[test]
    fn symmetric_real_pairs_split_evenly() {
        // (λ² - 4)(λ + 1)(λ² + 1): roots ±2, -1, ±i
        let p = &(&poly(&[-4, 0, 1]) * &from_roots(&[-1])) * &poly(&[1, 0, 1]);
        assert_eq!(refined_inertia_exact(&p).unwrap(), RefinedInertia::new(1, 2, 0, 2));
        // (λ-1)²(λ+1): one symmetric pair plus an extra root at 1
        assert_eq!(refined_inertia_exact(&from_roots(&[1, 1, -1])).unwrap(), RefinedInertia::new(2, 1, 0, 0));
        // λ⁴ + 4 has roots ±1±i
        assert_eq!(refined_inertia_exact(&poly(&[4, 0, 0, 0, 1])).unwrap(), RefinedInertia::new(2, 2, 0, 0));
    }

    #[test]
    fn zero_leading_element_uses_cauchy_index() {
        // λ⁴ + λ³ + 2λ² + 2λ + 3: the third Routh row starts with zero
        let p = poly(&[3, 2, 2, 1, 1]);
        assert_eq!(routh_sign_changes(&p), None);
        let ri = refined_inertia_exact(&p).unwrap();
        assert_eq!(ri, RefinedInertia::new(2, 2, 0, 0));
        assert_eq!(numeric_cross_check(&p), ri);
    }

    #[test]
    fn routh_and_cauchy_agree_when_regular() {
        // (λ+1)(λ+2)(λ-3) has no λ² term, so its second Routh row starts with 0
        assert_eq!(routh_sign_changes(&from_roots(&[-1, -2, 3])), None);
        assert_eq!(cauchy_index_rhp_count(&from_roots(&[-1, -2, 3])).unwrap(), 1);
        for (p, plus) in [
            (from_roots(&[1, -2, -4]), 1),
            (poly(&[1, 1, 1]), 0),
            (from_roots(&[4, 5, -6, -7, 8]), 3),
            (poly(&[6, 11, 6, 1]), 0),
        ] {
            assert_eq!(routh_sign_changes(&p), Some(plus));
            assert_eq!(cauchy_index_rhp_count(&p).unwrap(), plus);
        }
    }

    #[test]
    fn strip_and_half_plane_counts() {
        let p = from_roots(&[-3, -1, 0, 2]);
        assert_eq!(count_roots_re_below(&p, &big(0), false).unwrap(), 2);
        assert_eq!(count_roots_re_below(&p, &big(0), true).unwrap(), 3);
        assert_eq!(count_roots_in_strip(&p, &Rational::new(1.into(), 2.into())).unwrap(), 1);
        assert_eq!(count_roots_in_strip(&p, &big(1)).unwrap(), 2);
    }

    #[test]
    fn delta_on_diagonal() {
        let d = QMatrix::diagonal(&[big(-1), big(-2), big(-3)]);
        assert_eq!(count_eigen_re_leq(&d, &Rational::new(3.into(), 2.into())).unwrap(), 2);
        assert_eq!(count_eigen_re_leq(&d, &big(100)).unwrap(), 0);
        assert_eq!(count_eigen_re_leq(&d, &big(1)).unwrap(), 3);
    }

    #[test]
    fn numeric_basics() {
        let tol = NumericTolerance::default();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -2.0, -3.0]));
        assert_eq!(refined_inertia_numeric(&d, tol).unwrap(), RefinedInertia::new(0, 3, 0, 0));
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert_eq!(refined_inertia_numeric(&rot, tol).unwrap(), RefinedInertia::new(0, 0, 0, 2));
        assert!(NumericTolerance::new(0.0).is_err());
        let nan = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert_eq!(refined_inertia_numeric(&nan, tol), Err(Error::EigenSolverFailed));
    }

    #[test]
    fn arrow_shift_det_example() {
        let a = ArrowMatrix::from_i64(&[1, 1, 1, 1, 1], &[3, 2, 1]).unwrap();
        assert_eq!(arrow_shift_det(&a, 1).unwrap(), big(-6));
        // a_{j+2} = 0 kills the determinant
        let z = ArrowMatrix::from_i64(&[1, 1, 1, 0, 1], &[3, 2, 1]).unwrap();
        assert_eq!(arrow_shift_det(&z, 2).unwrap(), big(0));
        let rep = ArrowMatrix::from_i64(&[1, 1, 1, 1, 1], &[2, 2, 1]).unwrap();
        assert_eq!(arrow_shift_det(&rep, 1), Err(Error::RepeatedB));
        assert!(arrow_shift_det(&a, 4).is_err());
    }

    /// Roots by the numeric eigenvalues of the companion matrix; used only
    /// on polynomials whose roots are well away from the axis.
    fn numeric_cross_check(p: &RationalPoly) -> RefinedInertia {
        use num::ToPrimitive;
        let d = p.degree().unwrap();
        let p = p.monic();
        let mut c = DMatrix::<f64>::zeros(d, d);
        for i in 1..d {
            c[(i, i - 1)] = 1.0;
        }
        for i in 0..d {
            c[(i, d - 1)] = -p.coeff(i).to_f64().unwrap();
        }
        classify_eigenvalues(&numeric_eigenvalues(&c).unwrap(), 1e-7)
    }

    #[test]
    fn brute_force_numeric_oracle_on_random_root_sets() {
        // build polynomials from chosen roots so the expected tuple is known,
        // then also compare against companion-matrix rooting
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let mut p = RationalPoly::one();
            let mut expected = RefinedInertia::default();
            for _ in 0..rng.random_range(1..=4) {
                match rng.random_range(0..4) {
                    0 => {
                        let r = rng.random_range(-6i64..=6);
                        p = &p * &from_roots(&[r]);
                        match r.signum() {
                            1 => expected.n_plus += 1,
                            -1 => expected.n_minus += 1,
                            _ => expected.n_zero += 1,
                        }
                    }
                    1 => {
                        let w = rng.random_range(1i64..=5);
                        p = &p * &poly(&[w * w, 0, 1]);
                        expected.two_n_p += 2;
                    }
                    _ => {
                        // (λ - a)² + b², roots a ± bi
                        let a = rng.random_range(-4i64..=4);
                        let b = rng.random_range(1i64..=4);
                        p = &p * &poly(&[a * a + b * b, -2 * a, 1]);
                        match a.signum() {
                            1 => expected.n_plus += 2,
                            -1 => expected.n_minus += 2,
                            _ => expected.two_n_p += 2,
                        }
                    }
                }
            }
            assert_eq!(refined_inertia_exact(&p).unwrap(), expected, "p = {p}");
            if expected.on_axis() == 0 {
                assert_eq!(numeric_cross_check(&p), expected, "p = {p}");
            }
        }
    }
}
