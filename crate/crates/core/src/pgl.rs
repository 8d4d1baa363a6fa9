//! Möbius action of `GL_2(A)` on handles.
//!
//! Quadratic handles are pushed through the homographic continued fraction
//! algorithm: the state `(αx + β)/(γx + δ)` swallows partial quotients of
//! the input and emits those of the output whenever its integer part no
//! longer depends on the unread tail. Once a normalized state recurs at the
//! same phase of the input period, the output is periodic from there on.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::cf::{HandleKind, RealHandle};
use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::laurent::LaurentSeries;
use crate::poly::Poly;
use crate::text;

/// Steps of the homographic algorithm before period detection gives up.
pub const PERIOD_STEP_LIMIT: usize = 10_000;

/// `[[r, s], [t, u]]` acting as `x ↦ (rx + s)/(tx + u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub r: Poly,
    pub s: Poly,
    pub t: Poly,
    pub u: Poly,
}

impl Mobius {
    pub fn new(r: Poly, s: Poly, t: Poly, u: Poly) -> Self {
        Mobius { r, s, t, u }
    }

    pub fn identity() -> Self {
        Mobius::new(Poly::one(), Poly::zero(), Poly::zero(), Poly::one())
    }

    /// `x ↦ x + a`
    pub fn translation(a: Poly) -> Self {
        Mobius::new(Poly::one(), a, Poly::zero(), Poly::one())
    }

    /// `x ↦ 1/x`
    pub fn inversion() -> Self {
        Mobius::new(Poly::zero(), Poly::one(), Poly::one(), Poly::zero())
    }

    /// `x ↦ c x`
    pub fn scaling(c: FieldElem) -> Self {
        Mobius::new(Poly::constant(c), Poly::zero(), Poly::zero(), Poly::one())
    }

    /// Matrix product `self · other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Mobius, f: &FieldSpec) -> Mobius {
        let m = |a: &Poly, b: &Poly, c: &Poly, d: &Poly| a.mul(b, f).add(&c.mul(d, f), f);
        Mobius::new(
            m(&self.r, &other.r, &self.s, &other.t),
            m(&self.r, &other.s, &self.s, &other.u),
            m(&self.t, &other.r, &self.u, &other.t),
            m(&self.t, &other.s, &self.u, &other.u),
        )
    }

    pub fn det(&self, f: &FieldSpec) -> Poly {
        self.r.mul(&self.u, f).sub(&self.s.mul(&self.t, f), f)
    }

    /// Parses `r,s,t,u` (four polynomials separated by commas).
    pub fn parse(s: &str, f: &FieldSpec) -> Result<Self> {
        let mut parts = Vec::new();
        let mut offset = 0;
        for piece in s.split(',') {
            let p = text::parse_poly(piece, f).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: pos + offset, msg },
                other => other,
            })?;
            parts.push(p);
            offset += piece.len() + 1;
        }
        if parts.len() != 4 {
            return Err(Error::parse(0, format!("expected 4 entries r,s,t,u, got {}", parts.len())));
        }
        let u = parts.pop().unwrap();
        let t = parts.pop().unwrap();
        let s = parts.pop().unwrap();
        let r = parts.pop().unwrap();
        Ok(Mobius::new(r, s, t, u))
    }

    pub fn to_json(&self, f: &FieldSpec) -> Value {
        json!([
            text::format_poly(&self.r, f),
            text::format_poly(&self.s, f),
            text::format_poly(&self.t, f),
            text::format_poly(&self.u, f),
        ])
    }
}

/// The handle of `(r f + s)/(t f + u)`.
pub fn pgl_transform(h: &RealHandle, m: &Mobius) -> Result<RealHandle> {
    let f = h.field();
    let det = m.det(f);
    if det.degree() != Some(0) {
        return Err(Error::domain("det M must be a nonzero constant"));
    }
    match h.kind() {
        HandleKind::Rational { a, b } => {
            let num = m.r.mul(a, f).add(&m.s.mul(b, f), f);
            let den = m.t.mul(a, f).add(&m.u.mul(b, f), f);
            if den.is_zero() {
                return Err(Error::domain("t f + u vanishes"));
            }
            RealHandle::rational(&num, &den, f)
        }
        HandleKind::Truncated(x) => {
            let num = x.mul_poly(&m.r, f).add(&LaurentSeries::from_poly(&m.s), f);
            let den = x.mul_poly(&m.t, f).add(&LaurentSeries::from_poly(&m.u), f);
            let inv = den.inv(f, den.floor())?;
            RealHandle::truncated(num.mul(&inv, f), f)
        }
        HandleKind::QuadraticCf => homographic(h, m),
    }
}

type State = [Poly; 4];

fn normalized(st: &State, f: &FieldSpec) -> State {
    let lead = st
        .iter()
        .find(|p| !p.is_zero())
        .and_then(|p| p.leading())
        .unwrap_or(FieldElem::ONE);
    let c = f.inv(lead).expect("leading coefficients are units");
    [st[0].scale(c, f), st[1].scale(c, f), st[2].scale(c, f), st[3].scale(c, f)]
}

fn homographic(h: &RealHandle, m: &Mobius) -> Result<RealHandle> {
    let f = h.field();
    let cf = h.cf();
    let start = cf.preperiod().len() + 1;
    let period = cf.period().len();
    let mut st: State = [m.r.clone(), m.s.clone(), m.t.clone(), m.u.clone()];
    let mut out: Vec<Poly> = Vec::new();
    let mut seen: HashMap<(State, usize), usize> = HashMap::new();
    for i in 0..PERIOD_STEP_LIMIT {
        let a = if i == 0 { cf.a0().clone() } else { h.partial(i)?.clone() };
        let [al, be, ga, de] = st;
        st = [
            al.mul(&a, f).add(&be, f),
            al,
            ga.mul(&a, f).add(&de, f),
            ga,
        ];
        // the unread tail x' satisfies |x'| > 1
        while !st[2].is_zero() && st[3].deg_i() <= st[2].deg_i() {
            let (b, _) = st[0].divmod(&st[2], f)?;
            let [al, be, ga, de] = st;
            let na = al.sub(&b.mul(&ga, f), f);
            let nb = be.sub(&b.mul(&de, f), f);
            st = [ga, de, na, nb];
            out.push(b);
        }
        if i >= start && !out.is_empty() {
            let key = (normalized(&st, f), (i - start) % period);
            if let Some(&k) = seen.get(&key) {
                if k == out.len() || k == 0 {
                    return Err(Error::PeriodDetection(i));
                }
                let b0 = out[0].clone();
                let pre = out[1..k].to_vec();
                let per = out[k..].to_vec();
                return RealHandle::quadratic(b0, pre, per, f);
            }
            seen.insert(key, out.len());
        }
    }
    Err(Error::PeriodDetection(PERIOD_STEP_LIMIT))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_poly;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn golden(f: &FieldSpec) -> RealHandle {
        RealHandle::quadratic(Poly::zero(), vec![], vec![Poly::t()], f).unwrap()
    }

    #[test]
    fn identity_is_trivial() {
        let f = f2();
        let g = golden(&f);
        let h = pgl_transform(&g, &Mobius::identity()).unwrap();
        assert_eq!(h.cf(), g.cf());
    }

    #[test]
    fn inversion_shifts_the_expansion() {
        let f = FieldSpec::prime(3).unwrap();
        let p = |s: &str| parse_poly(s, &f).unwrap();
        let g = RealHandle::quadratic(Poly::zero(), vec![p("T+1")], vec![p("T"), p("T^2+2")], &f).unwrap();
        let h = pgl_transform(&g, &Mobius::inversion()).unwrap();
        assert_eq!(h.cf().a0(), &p("T+1"));
        for i in 1..12 {
            assert_eq!(h.partial(i).unwrap(), g.partial(i + 1).unwrap());
        }
    }

    #[test]
    fn translation_changes_only_a0() {
        let f = f2();
        let g = golden(&f);
        let h = pgl_transform(&g, &Mobius::translation(Poly::t())).unwrap();
        assert_eq!(h.cf().a0(), &Poly::t());
        assert_eq!(h.cf().period(), g.cf().period());
    }

    #[test]
    fn series_agree_after_transform() {
        let f = FieldSpec::prime(3).unwrap();
        let p = |s: &str| parse_poly(s, &f).unwrap();
        let g = RealHandle::quadratic(p("T"), vec![], vec![p("T^2+1"), p("2*T")], &f).unwrap();
        let m = Mobius::new(p("T+1"), p("T"), p("1"), p("1"));
        assert_eq!(m.det(&f), p("1"));
        let h = pgl_transform(&g, &m).unwrap();
        let x = g.to_laurent(40).unwrap();
        let want = x
            .mul_poly(&m.r, &f)
            .add(&LaurentSeries::from_poly(&m.s), &f)
            .mul(
                &x.mul_poly(&m.t, &f)
                    .add(&LaurentSeries::from_poly(&m.u), &f)
                    .inv(&f, -60)
                    .unwrap(),
                &f,
            );
        let got = h.to_laurent(40).unwrap();
        let down = want.floor().max(got.floor());
        assert!(got.agrees_down_to(&want, down).unwrap());
    }

    #[test]
    fn rational_stays_rational() {
        let f = f2();
        let p = |s: &str| parse_poly(s, &f).unwrap();
        let g = RealHandle::rational(&p("T^2+1"), &p("T"), &f).unwrap();
        let h = pgl_transform(&g, &Mobius::inversion()).unwrap();
        assert_eq!(h.rational_parts(), Some((&p("T"), &p("T^2+1"))));
    }

    #[test]
    fn degenerate_matrix_is_rejected() {
        let f = f2();
        let m = Mobius::new(Poly::t(), Poly::zero(), Poly::zero(), Poly::one());
        assert!(matches!(pgl_transform(&golden(&f), &m), Err(Error::Domain(_))));
    }

    #[test]
    fn parse_matrix() {
        let f = f2();
        let m = Mobius::parse("0,1,1,T", &f).unwrap();
        assert_eq!(m.u, Poly::t());
        assert!(matches!(Mobius::parse("0,1,1", &f), Err(Error::Parse { .. })));
        assert!(matches!(Mobius::parse("0,1,1,T^", &f), Err(Error::Parse { pos, .. }) if pos >= 6));
    }
}
