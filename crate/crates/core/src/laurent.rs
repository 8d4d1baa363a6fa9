//! Truncated Laurent series in 1/T, i.e. elements of F_q((1/T)) known down
//! to an explicit floor.
//!
//! A series stores the coefficients of `T^k` for `floor <= k <= top`. When
//! `exact` is set every coefficient below the floor is zero; otherwise those
//! coefficients are unknown and every operation propagates a floor below
//! which nothing is reported.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::abs::AbsValue;
use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::poly::Poly;
use crate::text;

/// Absolute value of a series: a power of q, or undecidable at the tracked
/// precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesAbs {
    Known(AbsValue),
    /// Every tracked coefficient vanishes but the series is not exact.
    Indeterminate,
}

impl SeriesAbs {
    pub fn known(self) -> Option<AbsValue> {
        match self {
            SeriesAbs::Known(v) => Some(v),
            SeriesAbs::Indeterminate => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    floor: i64,
    /// `coeffs[i]` is the coefficient of `T^(floor + i)`; no zeros on top.
    coeffs: Vec<FieldElem>,
    exact: bool,
}

impl LaurentSeries {
    fn build(floor: i64, mut coeffs: Vec<FieldElem>, exact: bool) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        LaurentSeries {
            floor,
            coeffs,
            exact,
        }
    }

    /// The exact zero.
    pub fn zero() -> Self {
        LaurentSeries::build(0, Vec::new(), true)
    }

    /// A series known to vanish at every exponent `>= floor` and unknown
    /// below.
    pub fn indeterminate(floor: i64) -> Self {
        LaurentSeries::build(floor, Vec::new(), false)
    }

    /// `c T^k`, exact.
    pub fn monomial(c: FieldElem, k: i64) -> Self {
        LaurentSeries::build(k, vec![c], true)
    }

    pub fn from_poly(a: &Poly) -> Self {
        LaurentSeries::build(0, a.coeffs().to_vec(), true)
    }

    /// Builds a series from `(exponent, coefficient)` pairs. With
    /// `floor = None` the result is exact; otherwise it is known down to the
    /// given floor and terms below it are rejected.
    pub fn from_terms(terms: &[(i64, FieldElem)], floor: Option<i64>, f: &FieldSpec) -> Result<Self> {
        let lo = terms.iter().map(|t| t.0).min();
        let base = match (floor, lo) {
            (Some(fl), Some(lo)) if lo < fl => {
                return Err(Error::domain(format!(
                    "term T^{lo} lies below the precision floor {fl}"
                )))
            }
            (Some(fl), _) => fl,
            (None, Some(lo)) => lo.min(0),
            (None, None) => 0,
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap_or(base - 1);
        let mut coeffs = vec![FieldElem::ZERO; (hi - base + 1).max(0) as usize];
        for &(k, c) in terms {
            let slot = &mut coeffs[(k - base) as usize];
            *slot = f.add(*slot, c);
        }
        Ok(LaurentSeries::build(base, coeffs, floor.is_none()))
    }

    /// Parses the Laurent text grammar. Without an `O(T^k)` term the result
    /// is exact; `O(T^k)` leaves the exponents `<= k` unknown.
    pub fn parse(s: &str, f: &FieldSpec) -> Result<Self> {
        let lt = text::parse_laurent_terms(s, f)?;
        LaurentSeries::from_terms(&lt.terms, lt.big_o.map(|k| k + 1), f)
    }

    /// `a / b` with every coefficient of exponent `>= -prec` exact. The
    /// result is exact when the division terminates above the floor.
    pub fn from_rational(a: &Poly, b: &Poly, prec: i64, f: &FieldSpec) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // a T^prec = Q b + R, so a/b = Q T^-prec + R / (b T^prec) with the
        // second part below T^-prec.
        let (num, den) = if prec >= 0 {
            (a.shift(prec as usize), b.clone())
        } else {
            (a.clone(), b.shift((-prec) as usize))
        };
        let (quot, rem) = num.divmod(&den, f)?;
        Ok(LaurentSeries::build(-prec, quot.coeffs().to_vec(), rem.is_zero()))
    }

    /// The same coefficients with everything below the floor unknown.
    pub fn inexact(&self) -> Self {
        LaurentSeries {
            exact: false,
            ..self.clone()
        }
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn top(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.floor + self.coeffs.len() as i64 - 1)
        }
    }

    /// Upper bound on the exponent of any nonzero term, used for error
    /// propagation: the top if there is one, otherwise `floor - 1`.
    fn top_bound(&self) -> i64 {
        self.top().unwrap_or(self.floor - 1)
    }

    /// Exact zero, as opposed to zero to precision.
    pub fn is_zero(&self) -> bool {
        self.exact && self.coeffs.is_empty()
    }

    /// Lowest exponent that may carry an unknown coefficient, `None` for
    /// exact series.
    pub fn precision_floor(&self) -> Option<i64> {
        (!self.exact).then_some(self.floor)
    }

    /// Coefficient of `T^k`.
    pub fn coeff(&self, k: i64) -> Result<FieldElem> {
        if k < self.floor {
            if self.exact {
                return Ok(FieldElem::ZERO);
            }
            return Err(Error::precision(format!(
                "coefficient of T^{k} requested below the floor {}",
                self.floor
            )));
        }
        Ok(self
            .coeffs
            .get((k - self.floor) as usize)
            .copied()
            .unwrap_or(FieldElem::ZERO))
    }

    /// Nonzero `(exponent, coefficient)` pairs, descending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FieldElem)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, &c)| (self.floor + i as i64, c))
    }

    pub fn abs(&self) -> SeriesAbs {
        match self.top() {
            Some(t) => SeriesAbs::Known(AbsValue::Pow(t)),
            None if self.exact => SeriesAbs::Known(AbsValue::Zero),
            None => SeriesAbs::Indeterminate,
        }
    }

    /// Drops everything below `new_floor`. Exactness survives only if the
    /// dropped coefficients were all zero.
    pub fn truncate(&self, new_floor: i64) -> Self {
        if new_floor <= self.floor {
            return self.clone();
        }
        let cut = ((new_floor - self.floor) as usize).min(self.coeffs.len());
        let dropped_zero = self.coeffs[..cut].iter().all(|c| c.is_zero());
        LaurentSeries::build(
            new_floor,
            self.coeffs[cut..].to_vec(),
            self.exact && dropped_zero,
        )
    }

    fn window(&self, lo: i64, hi: i64) -> Vec<FieldElem> {
        (lo..=hi)
            .map(|k| {
                if k < self.floor {
                    FieldElem::ZERO
                } else {
                    self.coeffs
                        .get((k - self.floor) as usize)
                        .copied()
                        .unwrap_or(FieldElem::ZERO)
                }
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self, f: &FieldSpec) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let floor = match (self.exact, rhs.exact) {
            (true, true) => self.floor.min(rhs.floor),
            (true, false) => rhs.floor,
            (false, true) => self.floor,
            (false, false) => self.floor.max(rhs.floor),
        };
        let hi = self.top_bound().max(rhs.top_bound());
        let a = self.window(floor, hi);
        let b = rhs.window(floor, hi);
        let coeffs = a.iter().zip(&b).map(|(&x, &y)| f.add(x, y)).collect();
        LaurentSeries::build(floor, coeffs, self.exact && rhs.exact)
    }

    pub fn neg(&self, f: &FieldSpec) -> Self {
        self.scale(f.neg(FieldElem::ONE), f)
    }

    pub fn sub(&self, rhs: &Self, f: &FieldSpec) -> Self {
        self.add(&rhs.neg(f), f)
    }

    pub fn scale(&self, c: FieldElem, f: &FieldSpec) -> Self {
        if c.is_zero() {
            return LaurentSeries::zero();
        }
        LaurentSeries::build(
            self.floor,
            self.coeffs.iter().map(|&x| f.mul(c, x)).collect(),
            self.exact,
        )
    }

    /// `T^k * self`
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries::build(self.floor + k, self.coeffs.clone(), self.exact)
    }

    /// Product. For inexact factors the floor is
    /// `max(top(x) + floor(y), top(y) + floor(x))` over the inexact ones.
    pub fn mul(&self, rhs: &Self, f: &FieldSpec) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return LaurentSeries::zero();
        }
        let exact = self.exact && rhs.exact;
        let mut floor = self.floor + rhs.floor;
        if !self.exact {
            floor = floor.max(self.floor + rhs.top_bound());
        }
        if !rhs.exact {
            floor = floor.max(rhs.floor + self.top_bound());
        }
        let hi = self.top_bound() + rhs.top_bound();
        if hi < floor {
            return LaurentSeries::indeterminate(floor);
        }
        let mut out = vec![FieldElem::ZERO; (hi - floor + 1) as usize];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ea = self.floor + i as i64;
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                let e = ea + rhs.floor + j as i64;
                if e < floor {
                    continue;
                }
                let slot = &mut out[(e - floor) as usize];
                *slot = f.add(*slot, f.mul(a, b));
            }
        }
        LaurentSeries::build(floor, out, exact)
    }

    pub fn mul_poly(&self, a: &Poly, f: &FieldSpec) -> Self {
        self.mul(&LaurentSeries::from_poly(a), f)
    }

    /// Reciprocal, reported down to `max(min_floor, floor - 2 * top)`.
    ///
    /// Exact inputs other than monomials have infinite reciprocals, so for
    /// them `min_floor` is the only bound. Inverting an exact zero is a
    /// division by zero; inverting a series that is zero to precision has
    /// indeterminate valuation and fails with precision exhausted.
    pub fn inv(&self, f: &FieldSpec, min_floor: i64) -> Result<Self> {
        let t = match self.top() {
            Some(t) => t,
            None if self.exact => return Err(Error::DivisionByZero),
            None => {
                return Err(Error::precision(format!(
                    "indeterminate valuation: zero down to T^{}",
                    self.floor
                )))
            }
        };
        let lead = self.coeffs[self.coeffs.len() - 1];
        let lead_inv = f.inv(lead)?;
        let monomial = self.coeffs.iter().filter(|c| !c.is_zero()).count() == 1;
        if self.exact && monomial {
            return Ok(LaurentSeries::monomial(lead_inv, -t));
        }
        let floor = if self.exact {
            min_floor
        } else {
            min_floor.max(self.floor - 2 * t)
        };
        if floor > -t {
            return Ok(LaurentSeries::indeterminate(floor));
        }
        let len = (-t - floor + 1) as usize;
        // self = lead T^t (1 + u), u = sum_{k>=1} u_k T^-k
        let u: Vec<FieldElem> = (0..len)
            .map(|k| {
                let e = t - k as i64;
                let c = if e < self.floor {
                    FieldElem::ZERO
                } else {
                    self.coeffs[(e - self.floor) as usize]
                };
                f.mul(c, lead_inv)
            })
            .collect();
        let v = series_inverse(&u, len, f);
        let mut out: Vec<FieldElem> = v.iter().map(|&c| f.mul(c, lead_inv)).collect();
        out.reverse();
        Ok(LaurentSeries::build(floor, out, false))
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, e: u64, f: &FieldSpec) -> Self {
        let mut acc = LaurentSeries::monomial(FieldElem::ONE, 0);
        let mut base = self.clone();
        let mut e = e;
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

    /// `self^q`. Coefficients lie in F_q, so this only spreads exponents;
    /// an unknown tail `δ` turns into `δ^q`.
    pub fn frobenius(&self, f: &FieldSpec) -> Self {
        let q = f.q() as i64;
        let floor = if self.exact {
            q * self.floor
        } else {
            q * (self.floor - 1) + 1
        };
        let Some(t) = self.top() else {
            return LaurentSeries::build(floor, Vec::new(), self.exact);
        };
        let mut out = vec![FieldElem::ZERO; (q * t - floor + 1) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[(q * (self.floor + i as i64) - floor) as usize] = c;
        }
        LaurentSeries::build(floor, out, self.exact)
    }

    /// Keeps `rel` coefficients below the leading one and forgets the rest.
    pub fn relative(&self, rel: i64) -> Self {
        match self.top() {
            Some(t) if self.exact => LaurentSeries::build(t - rel, self.window(t - rel, t), false),
            Some(t) => self.truncate(t - rel),
            None => self.clone(),
        }
    }

    /// Terms of exponent `>= 0`.
    pub fn polypart(&self) -> Result<Poly> {
        if !self.exact && self.floor > 0 {
            return Err(Error::precision(format!(
                "polynomial part needs the floor at or below T^0, have T^{}",
                self.floor
            )));
        }
        let top = self.top().unwrap_or(-1);
        let coeffs = (0..=top.max(-1))
            .map(|k| self.coeff(k).unwrap_or(FieldElem::ZERO))
            .collect();
        Ok(Poly::from_coeffs(coeffs))
    }

    /// Distance `min_a |x - a|` to A and the nearest polynomial (the
    /// polynomial part).
    pub fn nearest_norm(&self) -> Result<(SeriesAbs, Poly)> {
        if !self.exact && self.floor > -1 {
            return Err(Error::precision(format!(
                "fractional part needs the floor at or below T^-1, have T^{}",
                self.floor
            )));
        }
        let nearest = self.polypart()?;
        let frac_top = (self.floor..0)
            .rev()
            .find(|&k| !self.coeff(k).unwrap_or(FieldElem::ZERO).is_zero());
        let norm = match frac_top {
            Some(k) => SeriesAbs::Known(AbsValue::Pow(k)),
            None if self.exact => SeriesAbs::Known(AbsValue::Zero),
            None => SeriesAbs::Indeterminate,
        };
        Ok((norm, nearest))
    }

    /// True when both series have the same coefficients at every exponent
    /// `>= down_to` (requesting coefficients below a floor fails).
    pub fn agrees_down_to(&self, other: &Self, down_to: i64) -> Result<bool> {
        let hi = self.top_bound().max(other.top_bound());
        for k in down_to..=hi {
            if self.coeff(k)? != other.coeff(k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Text form, e.g. `T + T^-1 + O(T^-4)`.
    pub fn render(&self, f: &FieldSpec) -> String {
        let body = text::format_terms(self.terms(), f, " + ");
        if self.exact {
            body
        } else if self.coeffs.is_empty() {
            format!("O(T^{})", self.floor - 1)
        } else {
            format!("{body} + O(T^{})", self.floor - 1)
        }
    }

    pub fn to_json(&self, f: &FieldSpec) -> Value {
        let coeffs: serde_json::Map<String, Value> = self
            .terms()
            .map(|(k, c)| (k.to_string(), text::elem_to_json(c, f)))
            .collect();
        json!({
            "top": self.top(),
            "floor": self.floor,
            "exact": self.exact,
            "coeffs": coeffs,
        })
    }

    pub fn from_json(v: &Value, f: &FieldSpec) -> Result<Self> {
        let bad = |what: &str| Error::parse(0, format!("laurent JSON: {what}"));
        let floor = v["floor"].as_i64().ok_or_else(|| bad("missing floor"))?;
        let exact = v["exact"].as_bool().ok_or_else(|| bad("missing exact"))?;
        let obj = v["coeffs"].as_object().ok_or_else(|| bad("missing coeffs"))?;
        let mut terms = BTreeMap::new();
        for (k, c) in obj {
            let k: i64 = k.parse().map_err(|_| bad("non-integer exponent"))?;
            if k < floor {
                return Err(bad("coefficient below the floor"));
            }
            terms.insert(k, text::elem_from_json(c, f)?);
        }
        let top = terms.keys().next_back().copied();
        if v["top"].as_i64() != top.filter(|_| terms.values().any(|c| !c.is_zero())) {
            return Err(bad("top does not match the coefficients"));
        }
        let hi = top.unwrap_or(floor - 1);
        let coeffs = (floor..=hi)
            .map(|k| terms.get(&k).copied().unwrap_or(FieldElem::ZERO))
            .collect();
        Ok(LaurentSeries::build(floor, coeffs, exact))
    }
}

/// `1 / (1 + u_1 s + u_2 s^2 + ...)` as a power series in `s` to `len`
/// terms; `u[0]` is ignored and taken to be 1.
pub(crate) fn series_inverse(u: &[FieldElem], len: usize, f: &FieldSpec) -> Vec<FieldElem> {
    let mut v = vec![FieldElem::ZERO; len];
    if len == 0 {
        return v;
    }
    v[0] = FieldElem::ONE;
    for k in 1..len {
        let mut acc = FieldElem::ZERO;
        for i in 1..=k.min(u.len().saturating_sub(1)) {
            if !u[i].is_zero() {
                acc = f.add(acc, f.mul(u[i], v[k - i]));
            }
        }
        v[k] = f.neg(acc);
    }
    v
}
