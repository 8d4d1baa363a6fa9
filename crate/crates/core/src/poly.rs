//! The polynomial ring A = F_q[T].

use crate::abs::AbsValue;
use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};

/// A polynomial over F_q, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(FieldElem::ONE)
    }

    /// The indeterminate `T`.
    pub fn t() -> Self {
        Poly::monomial(FieldElem::ONE, 1)
    }

    pub fn constant(c: FieldElem) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c T^k`
    pub fn monomial(c: FieldElem, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElem::ZERO; k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Ascending coefficients; empty for the zero polynomial.
    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> FieldElem {
        self.coeffs.get(k).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` stands for `-inf` (zero polynomial).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as a signed integer with the zero polynomial at `-1`.
    /// Only for comparisons where `-inf` and `-1` behave alike.
    pub(crate) fn deg_i(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Option<FieldElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FieldElem::ONE)
    }

    /// `|a| = q^{deg a}`, `|0| = 0`.
    pub fn abs(&self) -> AbsValue {
        match self.degree() {
            None => AbsValue::Zero,
            Some(d) => AbsValue::Pow(d as i64),
        }
    }

    pub fn add(&self, rhs: &Poly, f: &FieldSpec) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|k| f.add(self.coeff(k), rhs.coeff(k)))
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Poly, f: &FieldSpec) -> Poly {
        self.add(&rhs.neg(f), f)
    }

    pub fn neg(&self, f: &FieldSpec) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: FieldElem, f: &FieldSpec) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&x| f.mul(c, x)).collect())
    }

    /// `T^k * self`
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElem::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    pub fn mul(&self, rhs: &Poly, f: &FieldSpec) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, mut e: u32, f: &FieldSpec) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f);
            }
        }
        acc
    }

    /// Euclidean division: `self = quot * d + rem` with `deg rem < deg d`.
    pub fn divmod(&self, d: &Poly, f: &FieldSpec) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = f.inv(d.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![FieldElem::ZERO; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = f.mul(rem[k], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[k - dd] = c;
            for (i, &di) in d.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] = f.sub(rem[idx], f.mul(c, di));
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn eval(&self, x: FieldElem, f: &FieldSpec) -> FieldElem {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// `(c, c * self)` with `c = 1 / lead(self)` so the second entry is monic.
    pub fn monicize(&self, f: &FieldSpec) -> Result<(FieldElem, Poly)> {
        let lead = self
            .leading()
            .ok_or_else(|| Error::domain("cannot monicize the zero polynomial"))?;
        let c = f.inv(lead)?;
        Ok((c, self.scale(c, f)))
    }

    /// Monic gcd (zero when both inputs are zero).
    pub fn gcd(&self, rhs: &Poly, f: &FieldSpec) -> Poly {
        let (mut a, mut b) = (self.clone(), rhs.clone());
        while !b.is_zero() {
            let (_, r) = a.divmod(&b, f).expect("b is nonzero");
            a = b;
            b = r;
        }
        match a.monicize(f) {
            Ok((_, g)) => g,
            Err(_) => Poly::zero(),
        }
    }
}

/// Which polynomials [`enumerate`] produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// Every polynomial of degree `<= d` (q^{d+1} of them).
    All,
    /// Monic polynomials of degree exactly `d` (q^d of them).
    Monic,
}

/// Deterministic enumeration. Coefficient vectors are counted like base-q
/// numerals with the constant term as the fastest-moving digit and field
/// elements in index order.
pub fn enumerate(f: &FieldSpec, d: usize, constraint: Constraint) -> PolyIter {
    let free = match constraint {
        Constraint::All => d + 1,
        Constraint::Monic => d,
    };
    PolyIter {
        q: f.q(),
        digits: vec![0; free],
        monic_top: constraint == Constraint::Monic,
        done: false,
    }
}

/// Iterator returned by [`enumerate`].
pub struct PolyIter {
    q: u32,
    digits: Vec<u32>,
    monic_top: bool,
    done: bool,
}

impl Iterator for PolyIter {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.done {
            return None;
        }
        let mut coeffs: Vec<FieldElem> = self
            .digits
            .iter()
            .map(|&i| FieldElem::from_raw(i))
            .collect();
        if self.monic_top {
            coeffs.push(FieldElem::ONE);
        }
        let out = Poly::from_coeffs(coeffs);
        // advance the counter
        let mut k = 0;
        loop {
            if k == self.digits.len() {
                self.done = true;
                break;
            }
            self.digits[k] += 1;
            if self.digits[k] < self.q {
                break;
            }
            self.digits[k] = 0;
            k += 1;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use proptest::prelude::*;

    fn p(f: &FieldSpec, cs: &[i64]) -> Poly {
        Poly::from_coeffs(cs.iter().map(|&c| f.from_int(c)).collect())
    }

    #[test]
    fn frobenius_square_in_char_2() {
        let f = FieldSpec::prime(2).unwrap();
        let t1 = p(&f, &[1, 1]);
        assert_eq!(t1.mul(&t1, &f), p(&f, &[1, 0, 1]));
    }

    #[test]
    fn divmod_examples() {
        let f = FieldSpec::prime(2).unwrap();
        let (q, r) = p(&f, &[1, 0, 1]).divmod(&Poly::t(), &f).unwrap();
        assert_eq!(q, Poly::t());
        assert_eq!(r, Poly::one());
        assert_eq!(
            Poly::t().divmod(&Poly::zero(), &f).unwrap_err(),
            Error::DivisionByZero
        );
    }

    #[test]
    fn scalar_times_poly_f3() {
        let f = FieldSpec::prime(3).unwrap();
        let a = p(&f, &[1, 2]);
        assert_eq!(a.scale(f.from_int(2), &f), p(&f, &[2, 1]));
        let (c, m) = a.monicize(&f).unwrap();
        assert_eq!(c, f.from_int(2));
        assert_eq!(m, p(&f, &[2, 1]));
        assert!(Poly::zero().monicize(&f).is_err());
    }

    #[test]
    fn abs_values() {
        let f2 = FieldSpec::prime(2).unwrap();
        assert_eq!(p(&f2, &[0, 1, 0, 1]).abs(), AbsValue::Pow(3));
        assert_eq!(Poly::zero().abs(), AbsValue::Zero);
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(p(&f3, &[2]).abs(), AbsValue::ONE);
    }

    #[test]
    fn enumeration_counts() {
        let f2 = FieldSpec::prime(2).unwrap();
        let monic1: Vec<Poly> = enumerate(&f2, 1, Constraint::Monic).collect();
        assert_eq!(monic1, vec![Poly::t(), p(&f2, &[1, 1])]);
        assert_eq!(enumerate(&f2, 2, Constraint::All).count(), 8);
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(enumerate(&f3, 2, Constraint::Monic).count(), 9);
        let f4 = FieldSpec::with_order(4).unwrap();
        let all: Vec<Poly> = enumerate(&f4, 2, Constraint::All).collect();
        assert_eq!(all.len(), 64);
        let set: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), 64);
        assert!(all.iter().all(|a| a.degree().is_none_or(|d| d <= 2)));
    }

    #[test]
    fn divmod_round_trip_exhaustive_q2() {
        let f = FieldSpec::prime(2).unwrap();
        let all: Vec<Poly> = enumerate(&f, 6, Constraint::All).collect();
        for a in &all {
            for b in all.iter().filter(|b| !b.is_zero()) {
                let (q, r) = a.divmod(b, &f).unwrap();
                assert!(r.deg_i() < b.deg_i());
                assert_eq!(&q.mul(b, &f).add(&r, &f), a);
            }
        }
    }

    #[test]
    fn monicize_is_idempotent_on_monic() {
        let f = FieldSpec::prime(5).unwrap();
        for a in enumerate(&f, 2, Constraint::Monic) {
            assert_eq!(a.monicize(&f).unwrap(), (f.one(), a.clone()));
        }
    }

    fn arb_poly(q: u32, max_deg: usize) -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::vec(0..q, 0..=max_deg + 1)
    }

    proptest! {
        #[test]
        fn abs_is_multiplicative_and_ultrametric(
            q in prop::sample::select(vec![2u32, 3, 4, 5, 7, 8, 9]),
            a in arb_poly(9, 8),
            b in arb_poly(9, 8),
        ) {
            let f = FieldSpec::with_order(q).unwrap();
            let a = Poly::from_coeffs(a.iter().map(|&i| f.elem(i % q).unwrap()).collect());
            let b = Poly::from_coeffs(b.iter().map(|&i| f.elem(i % q).unwrap()).collect());
            prop_assert_eq!(a.mul(&b, &f).abs(), a.abs() * b.abs());
            let s = a.add(&b, &f).abs();
            prop_assert!(s <= a.abs().max(b.abs()));
            if a.abs() != b.abs() {
                prop_assert_eq!(s, a.abs().max(b.abs()));
            }
            if !b.is_zero() {
                let (qq, r) = a.divmod(&b, &f).unwrap();
                prop_assert_eq!(qq.mul(&b, &f).add(&r, &f), a.clone());
            }
            if !a.is_zero() {
                let (c, m) = a.monicize(&f).unwrap();
                prop_assert!(m.is_monic());
                prop_assert_eq!(a.scale(c, &f), m.clone());
                prop_assert_eq!(m.abs(), a.abs());
            }
        }
    }
}
