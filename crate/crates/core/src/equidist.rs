//! Character sums over `A f mod A`.
//!
//! The basic character is `e₀(g) = ζ_p^{Tr c₋₁(g)}`. Sums are kept as
//! exponent histograms over `Z/p`; two histograms give the same element of
//! `Z[ζ_p]` exactly when they differ by a multiple of the all-ones vector,
//! because `1 + ζ_p + … + ζ_p^{p-1} = 0` generates the relations.

use serde_json::{json, Value};

use crate::cf::RealHandle;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::laurent::LaurentSeries;
use crate::poly::{enumerate, Constraint, Poly};
use crate::text;

/// Largest degree searched for a shift `b` with `e(x_b) ≠ 1`.
pub const SHIFT_DEGREE_BUDGET: usize = 3;

/// `Tr c₋₁(b g)`, the exponent of `e₀(b g)`.
pub fn char_exponent(g: &LaurentSeries, b: &Poly, f: &FieldSpec) -> Result<u32> {
    if b.is_zero() {
        return Err(Error::domain("character multiplier b must be nonzero"));
    }
    let c = g.mul_poly(b, f).coeff(-1)?;
    Ok(f.trace(c))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylSum {
    /// `histogram[j]` counts the `a` with exponent `j`.
    pub histogram: Vec<u64>,
    pub d: usize,
    pub b: Poly,
    /// `|Σ_j histogram[j] ζ_p^j| / q^{d+1}`.
    pub normalized_magnitude: f64,
}

impl WeylSum {
    fn from_histogram(histogram: Vec<u64>, d: usize, b: Poly, q: u32) -> Self {
        let p = histogram.len() as f64;
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (j, &c) in histogram.iter().enumerate() {
            let th = std::f64::consts::TAU * j as f64 / p;
            re += c as f64 * th.cos();
            im += c as f64 * th.sin();
        }
        let mut mag = re.hypot(im) / (q as f64).powi(d as i32 + 1);
        // keep exact zeros exact in the report
        if reduced_of(&histogram).iter().all(|&c| c == 0) {
            mag = 0.0;
        }
        WeylSum { histogram, d, b, normalized_magnitude: mag }
    }

    pub fn total(&self) -> u64 {
        self.histogram.iter().sum()
    }

    /// Canonical representative of the sum in `Z[ζ_p]`: counts minus their
    /// minimum.
    pub fn reduced(&self) -> Vec<u64> {
        reduced_of(&self.histogram)
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(|&c| c == 0)
    }

    pub fn to_json(&self, f: &FieldSpec) -> Value {
        json!({
            "d": self.d,
            "b": text::format_poly(&self.b, f),
            "histogram": self.histogram,
            "reduced": self.reduced(),
            "normalized_magnitude": self.normalized_magnitude,
        })
    }
}

fn reduced_of(h: &[u64]) -> Vec<u64> {
    let m = h.iter().copied().min().unwrap_or(0);
    h.iter().map(|&c| c - m).collect()
}

/// Coefficients `c₋₁₋ₖ(b f)` for `k = 0..=d`, which determine every
/// exponent `Tr c₋₁(a b f)` with `deg a <= d`.
fn dual_coeffs(h: &RealHandle, b: &Poly, d: usize) -> Result<Vec<crate::field::FieldElem>> {
    let f = h.field();
    let db = b.degree().ok_or_else(|| Error::domain("character multiplier b must be nonzero"))?;
    let x = h.to_laurent((db + d + 1) as i64)?;
    let bx = x.mul_poly(b, f);
    (0..=d).map(|k| bx.coeff(-1 - k as i64)).collect()
}

/// Σ_{deg a <= d} e₀(b a f), by enumerating every `a`.
pub fn weyl_sum(h: &RealHandle, b: &Poly, d: usize) -> Result<WeylSum> {
    let f = h.field();
    let w = dual_coeffs(h, b, d)?;
    let p = f.p() as usize;
    let mut hist = vec![0u64; p];
    for a in enumerate(f, d, Constraint::All) {
        let mut c = f.zero();
        for (k, &ak) in a.coeffs().iter().enumerate() {
            c = f.add(c, f.mul(ak, w[k]));
        }
        hist[f.trace(c) as usize] += 1;
    }
    Ok(WeylSum::from_histogram(hist, d, b.clone(), f.q()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TelescopingReport {
    /// Shift with `e(x_b) ≠ 1`.
    pub b: Poly,
    pub searched: bool,
    pub delta: usize,
    /// Exponent of `e(x_b)`.
    pub shift_exponent: u32,
    /// Sums for `d = δ, …, d_max`.
    pub sums: Vec<WeylSum>,
    /// Reduced value at `d = δ`.
    pub value: Vec<u64>,
    /// First `d` whose sum differs from the value at `δ`.
    pub mismatch: Option<usize>,
}

impl TelescopingReport {
    pub fn constant(&self) -> bool {
        self.mismatch.is_none()
    }

    pub fn to_json(&self, f: &FieldSpec) -> Value {
        json!({
            "b": text::format_poly(&self.b, f),
            "searched": self.searched,
            "delta": self.delta,
            "shift_exponent": self.shift_exponent,
            "value": self.value,
            "constant": self.constant(),
            "mismatch": self.mismatch,
            "sums": self.sums.iter().map(|s| s.to_json(f)).collect::<Vec<_>>(),
        })
    }
}

/// First monic `b` (by degree, then enumeration order) with `e₀(b f) ≠ 1`.
pub fn find_shift(h: &RealHandle, budget: usize) -> Result<Poly> {
    let f = h.field();
    let x = h.to_laurent(budget as i64 + 1)?;
    for d in 0..=budget {
        for b in enumerate(f, d, Constraint::Monic) {
            if char_exponent(&x, &b, f)? != 0 {
                return Ok(b);
            }
        }
    }
    Err(Error::domain(format!(
        "no suitable b with deg b <= {budget}"
    )))
}

/// Checks that `Σ_{deg a <= d} e₀(a f)` is the same element of `Z[ζ_p]` for
/// every `δ <= d <= d_max`, where `δ = deg b`.
pub fn telescoping_check(h: &RealHandle, b: Option<&Poly>, d_max: usize) -> Result<TelescopingReport> {
    let f = h.field();
    let (b, searched) = match b {
        Some(b) => (b.clone(), false),
        None => (find_shift(h, SHIFT_DEGREE_BUDGET)?, true),
    };
    let delta = b.degree().ok_or_else(|| Error::domain("shift b must be nonzero"))?;
    let x = h.to_laurent(delta as i64 + 1)?;
    let shift_exponent = char_exponent(&x, &b, f)?;
    if shift_exponent == 0 {
        return Err(Error::domain("e(x_b) = 1 for the given b"));
    }
    let mut sums = Vec::new();
    for d in delta..=d_max.max(delta) {
        sums.push(weyl_sum(h, &Poly::one(), d)?);
    }
    let value = sums[0].reduced();
    let mismatch = sums.iter().find(|s| s.reduced() != value).map(|s| s.d);
    Ok(TelescopingReport { b, searched, delta, shift_exponent, sums, value, mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_poly;

    fn golden(f: &FieldSpec) -> RealHandle {
        RealHandle::quadratic(Poly::zero(), vec![], vec![Poly::t()], f).unwrap()
    }

    #[test]
    fn exponent_of_inverse_t() {
        let f = FieldSpec::prime(2).unwrap();
        let g = LaurentSeries::monomial(f.one(), -1);
        assert_eq!(char_exponent(&g, &Poly::one(), &f).unwrap(), 1);
        let a = LaurentSeries::from_poly(&parse_poly("T^3+T+1", &f).unwrap());
        assert_eq!(char_exponent(&a, &Poly::t(), &f).unwrap(), 0);
    }

    #[test]
    fn golden_small_sums() {
        let f = FieldSpec::prime(2).unwrap();
        let g = golden(&f);
        let s0 = weyl_sum(&g, &Poly::one(), 0).unwrap();
        assert_eq!(s0.histogram, vec![1, 1]);
        assert_eq!(s0.normalized_magnitude, 0.0);
        let s4 = weyl_sum(&g, &Poly::one(), 4).unwrap();
        assert_eq!(s4.total(), 32);
        assert!(s4.is_zero());
    }

    #[test]
    fn polynomial_has_unit_magnitude() {
        let f = FieldSpec::with_order(4).unwrap();
        let h = RealHandle::rational(&Poly::t(), &Poly::one(), &f).unwrap();
        for d in 0..4 {
            let s = weyl_sum(&h, &parse_poly("T+[0,1]", &f).unwrap(), d).unwrap();
            assert_eq!(s.histogram[0], 4u64.pow(d as u32 + 1));
            assert_eq!(s.normalized_magnitude, 1.0);
        }
        assert!(matches!(telescoping_check(&h, None, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn golden_telescopes_to_zero() {
        let f = FieldSpec::prime(2).unwrap();
        let r = telescoping_check(&golden(&f), None, 8).unwrap();
        assert_eq!(r.b, Poly::one());
        assert!(r.constant());
        assert_eq!(r.value, vec![0, 0]);
    }

    #[test]
    fn cubic_field_sums_are_constant() {
        let f = FieldSpec::prime(3).unwrap();
        let p = |s: &str| parse_poly(s, &f).unwrap();
        let h = RealHandle::quadratic(p("1"), vec![p("T^2")], vec![p("T+2"), p("2*T^2+T")], &f).unwrap();
        let r = telescoping_check(&h, None, 6).unwrap();
        assert!(r.constant(), "{:?}", r.mismatch);
        for s in &r.sums {
            assert_eq!(s.total(), 3u64.pow(s.d as u32 + 1));
        }
    }
}
