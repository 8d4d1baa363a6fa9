//! Text grammar shared by every input and output.
//!
//! Polynomials are sums of terms `c*T^k`, `T^k`, `T` or `c`, joined by `+`
//! or `-`. Coefficients are decimal integers (reduced mod p) or bracketed
//! coordinate vectors `[c0,c1,...]` in the power basis of the field. Laurent
//! series additionally allow negative exponents and one `O(T^k)` term.
//! Whitespace is ignored everywhere; error positions are byte offsets.

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::poly::Poly;

/// A coefficient as written: a single integer or a coordinate vector.
#[derive(Clone, Debug, PartialEq, Eq)]
enum RawCoeff {
    Int(i64),
    Coords(Vec<i64>),
}

#[derive(Clone, Debug)]
struct RawTerm {
    pos: usize,
    coeff: RawCoeff,
    negate: bool,
    exp: i64,
}

#[derive(Debug, Default)]
struct RawSum {
    terms: Vec<RawTerm>,
    /// Exponent `k` of an `O(T^k)` term and its position.
    big_o: Option<(i64, usize)>,
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
    var: u8,
}

impl<'a> Lexer<'a> {
    fn new(s: &'a str, var: u8) -> Self {
        Lexer {
            s: s.as_bytes(),
            pos: 0,
            var,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected '{}'", c as char)))
        }
    }

    fn unexpected(&mut self, what: &str) -> Error {
        match self.peek() {
            Some(c) => Error::parse(self.pos, format!("{what}, found '{}'", c as char)),
            None => Error::parse(self.pos, format!("{what}, found end of input")),
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn uint(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::parse(start, "number too large"))
    }

    fn int(&mut self) -> Result<i64> {
        if self.eat(b'(') {
            let v = self.int()?;
            self.expect(b')')?;
            return Ok(v);
        }
        let neg = self.eat(b'-');
        let v = self.uint()?;
        Ok(if neg { -v } else { v })
    }

    fn coeff(&mut self) -> Result<RawCoeff> {
        if self.eat(b'[') {
            let mut coords = vec![self.int()?];
            while self.eat(b',') {
                coords.push(self.int()?);
            }
            self.expect(b']')?;
            Ok(RawCoeff::Coords(coords))
        } else {
            Ok(RawCoeff::Int(self.uint()?))
        }
    }

    /// `var` or `var^k`; returns the exponent.
    fn power(&mut self) -> Result<i64> {
        self.expect(self.var)?;
        if self.eat(b'^') {
            self.int()
        } else {
            Ok(1)
        }
    }

    fn starts_coeff(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'[')
    }

    /// Parses a signed sum of terms, stopping at the first character that
    /// cannot continue it.
    fn sum(&mut self, allow_big_o: bool) -> Result<RawSum> {
        let mut out = RawSum::default();
        let mut first = true;
        loop {
            let negate = if self.eat(b'-') {
                true
            } else if first || self.eat(b'+') {
                false
            } else {
                break;
            };
            first = false;
            let pos = {
                self.skip_ws();
                self.pos
            };
            if allow_big_o && self.peek() == Some(b'O') {
                if out.big_o.is_some() {
                    return Err(Error::parse(pos, "more than one O(...) term"));
                }
                self.pos += 1;
                self.expect(b'(')?;
                let k = self.power()?;
                self.expect(b')')?;
                out.big_o = Some((k, pos));
                continue;
            }
            let term = if self.starts_coeff() {
                let coeff = self.coeff()?;
                let explicit_mul = self.eat(b'*');
                let exp = if explicit_mul || self.peek() == Some(self.var) {
                    self.power()?
                } else {
                    0
                };
                RawTerm {
                    pos,
                    coeff,
                    negate,
                    exp,
                }
            } else if self.peek() == Some(self.var) {
                RawTerm {
                    pos,
                    coeff: RawCoeff::Int(1),
                    negate,
                    exp: self.power()?,
                }
            } else {
                return Err(self.unexpected("expected a term"));
            };
            out.terms.push(term);
        }
        if first {
            return Err(self.unexpected("expected a term"));
        }
        Ok(out)
    }
}

fn raw_to_elem(c: &RawCoeff, pos: usize, f: &FieldSpec) -> Result<FieldElem> {
    match c {
        RawCoeff::Int(n) => Ok(f.from_int(*n)),
        RawCoeff::Coords(v) => {
            if v.len() > f.r() as usize {
                return Err(Error::parse(
                    pos,
                    format!("coordinate vector longer than the extension degree {}", f.r()),
                ));
            }
            f.from_coords(v)
                .map_err(|e| Error::parse(pos, e.to_string()))
        }
    }
}

/// Collects terms into a map exponent -> coefficient (ascending).
fn collect_terms(
    sum: &RawSum,
    f: &FieldSpec,
    allow_negative: bool,
) -> Result<std::collections::BTreeMap<i64, FieldElem>> {
    let mut map = std::collections::BTreeMap::new();
    for t in &sum.terms {
        if t.exp < 0 && !allow_negative {
            return Err(Error::parse(t.pos, "negative exponent in a polynomial"));
        }
        let mut c = raw_to_elem(&t.coeff, t.pos, f)?;
        if t.negate {
            c = f.neg(c);
        }
        let slot = map.entry(t.exp).or_insert(FieldElem::ZERO);
        *slot = f.add(*slot, c);
    }
    Ok(map)
}

fn map_to_poly(map: &std::collections::BTreeMap<i64, FieldElem>) -> Poly {
    let top = map.keys().next_back().copied().unwrap_or(-1);
    let mut coeffs = vec![FieldElem::ZERO; (top + 1).max(0) as usize];
    for (&k, &c) in map {
        coeffs[k as usize] = c;
    }
    Poly::from_coeffs(coeffs)
}

fn finish(lx: &mut Lexer) -> Result<()> {
    if lx.at_end() {
        Ok(())
    } else {
        Err(lx.unexpected("unexpected trailing input"))
    }
}

fn poly_in(lx: &mut Lexer, f: &FieldSpec) -> Result<Poly> {
    let sum = lx.sum(false)?;
    Ok(map_to_poly(&collect_terms(&sum, f, false)?))
}

/// Parses a polynomial in `T`.
pub fn parse_poly(s: &str, f: &FieldSpec) -> Result<Poly> {
    let mut lx = Lexer::new(s, b'T');
    let p = poly_in(&mut lx, f)?;
    finish(&mut lx)?;
    Ok(p)
}

/// Parsed Laurent text: terms plus the optional `O(T^k)` bound.
pub struct LaurentText {
    /// Ascending `(exponent, coefficient)` pairs, zero coefficients dropped.
    pub terms: Vec<(i64, FieldElem)>,
    /// `k` from an `O(T^k)` term.
    pub big_o: Option<i64>,
}

/// Parses a Laurent series in `T`. Terms at or below an `O(T^k)` bound are
/// rejected, since they would carry no information.
pub fn parse_laurent_terms(s: &str, f: &FieldSpec) -> Result<LaurentText> {
    let mut lx = Lexer::new(s, b'T');
    let sum = lx.sum(true)?;
    finish(&mut lx)?;
    if let Some((k, pos)) = sum.big_o {
        if let Some(t) = sum.terms.iter().find(|t| t.exp <= k) {
            return Err(Error::parse(
                t.pos,
                format!("term T^{} is absorbed by O(T^{k}) at position {pos}", t.exp),
            ));
        }
    }
    let map = collect_terms(&sum, f, true)?;
    Ok(LaurentText {
        terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        big_o: sum.big_o.map(|(k, _)| k),
    })
}

/// Parses `a/b`, `(a)/(b)` or a bare polynomial `a` (denominator 1).
pub fn parse_rational(s: &str, f: &FieldSpec) -> Result<(Poly, Poly)> {
    let mut lx = Lexer::new(s, b'T');
    let side = |lx: &mut Lexer| -> Result<Poly> {
        if lx.eat(b'(') {
            let p = poly_in(lx, f)?;
            lx.expect(b')')?;
            Ok(p)
        } else {
            poly_in(lx, f)
        }
    };
    let a = side(&mut lx)?;
    let b = if lx.eat(b'/') {
        lx.skip_ws();
        let pos = lx.pos;
        let b = side(&mut lx)?;
        if b.is_zero() {
            return Err(Error::domain(format!("zero denominator at position {pos}")));
        }
        b
    } else {
        Poly::one()
    };
    finish(&mut lx)?;
    Ok((a, b))
}

/// A continued fraction as written: `[a0; a1, ..., ak | p1, ..., pm]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfText {
    pub a0: Poly,
    pub preperiod: Vec<Poly>,
    pub period: Vec<Poly>,
    /// Byte offsets of every partial quotient after `a0`, in order.
    pub positions: Vec<usize>,
}

pub fn parse_cf(s: &str, f: &FieldSpec) -> Result<CfText> {
    let mut lx = Lexer::new(s, b'T');
    lx.expect(b'[')?;
    let a0 = poly_in(&mut lx, f)?;
    let mut preperiod = Vec::new();
    let mut period = Vec::new();
    let mut positions = Vec::new();
    if lx.eat(b';') {
        let mut list = |lx: &mut Lexer, out: &mut Vec<Poly>| -> Result<()> {
            if matches!(lx.peek(), Some(b'|') | Some(b']')) {
                return Ok(());
            }
            loop {
                lx.skip_ws();
                positions.push(lx.pos);
                out.push(poly_in(lx, f)?);
                if !lx.eat(b',') {
                    return Ok(());
                }
            }
        };
        list(&mut lx, &mut preperiod)?;
        if lx.eat(b'|') {
            list(&mut lx, &mut period)?;
            if period.is_empty() {
                return Err(lx.unexpected("expected a nonempty period"));
            }
        }
    }
    lx.expect(b']')?;
    finish(&mut lx)?;
    Ok(CfText {
        a0,
        preperiod,
        period,
        positions,
    })
}

/// Parses a modulus polynomial over F_p in the variable `x`; returns
/// ascending integer coefficients reduced mod p.
pub fn parse_modulus(s: &str, p: u32) -> Result<Vec<u32>> {
    let mut lx = Lexer::new(s, b'x');
    let sum = lx.sum(false)?;
    finish(&mut lx)?;
    let mut coeffs: Vec<i64> = Vec::new();
    for t in &sum.terms {
        let c = match &t.coeff {
            RawCoeff::Int(n) => *n,
            RawCoeff::Coords(_) => {
                return Err(Error::parse(t.pos, "modulus coefficients must be integers"))
            }
        };
        if t.exp < 0 {
            return Err(Error::parse(t.pos, "negative exponent in a polynomial"));
        }
        let k = t.exp as usize;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, 0);
        }
        coeffs[k] += if t.negate { -c } else { c };
    }
    Ok(coeffs
        .into_iter()
        .map(|c| c.rem_euclid(p as i64) as u32)
        .collect())
}

/// An integer for elements of the prime subfield, `[c0,c1,...]` otherwise.
pub fn format_elem(c: FieldElem, f: &FieldSpec) -> String {
    let coords = f.coords(c);
    if coords[1..].iter().all(|&x| x == 0) {
        coords[0].to_string()
    } else {
        let parts: Vec<String> = coords.iter().map(|x| x.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

fn format_term(c: FieldElem, k: i64, f: &FieldSpec) -> String {
    let mono = match k {
        0 => String::new(),
        1 => "T".to_string(),
        _ => format!("T^{k}"),
    };
    if k == 0 {
        format_elem(c, f)
    } else if c.is_one() {
        mono
    } else {
        format!("{}*{mono}", format_elem(c, f))
    }
}

/// Terms in descending order joined by `sep`; `"0"` when empty.
pub(crate) fn format_terms(
    terms: impl Iterator<Item = (i64, FieldElem)>,
    f: &FieldSpec,
    sep: &str,
) -> String {
    let parts: Vec<String> = terms
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| format_term(c, k, f))
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(sep)
    }
}

/// Canonical text form, e.g. `T^3+[1,1]*T+1`.
pub fn format_poly(a: &Poly, f: &FieldSpec) -> String {
    format_terms(
        a.coeffs()
            .iter()
            .enumerate()
            .rev()
            .map(|(k, &c)| (k as i64, c)),
        f,
        "+",
    )
}

/// `[a0; a1, ..., ak | p1, ..., pm]`, omitting empty parts.
pub fn format_cf(a0: &Poly, preperiod: &[Poly], period: &[Poly], f: &FieldSpec) -> String {
    let join = |v: &[Poly]| {
        v.iter()
            .map(|p| format_poly(p, f))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut s = format!("[{}", format_poly(a0, f));
    if !preperiod.is_empty() || !period.is_empty() {
        s.push(';');
        if !preperiod.is_empty() {
            s.push(' ');
            s.push_str(&join(preperiod));
        }
        if !period.is_empty() {
            s.push_str(" | ");
            s.push_str(&join(period));
        }
    }
    s.push(']');
    s
}

/// JSON form of a field element: integer or coordinate array.
pub fn elem_to_json(c: FieldElem, f: &FieldSpec) -> serde_json::Value {
    if f.r() == 1 {
        serde_json::Value::from(c.index())
    } else {
        serde_json::Value::from(f.coords(c))
    }
}

pub fn elem_from_json(v: &serde_json::Value, f: &FieldSpec) -> Result<FieldElem> {
    let bad = || Error::parse(0, format!("bad field element {v}"));
    if let Some(n) = v.as_i64() {
        return Ok(f.from_int(n));
    }
    let arr = v.as_array().ok_or_else(bad)?;
    let coords = arr
        .iter()
        .map(|x| x.as_i64().ok_or_else(bad))
        .collect::<Result<Vec<_>>>()?;
    f.from_coords(&coords).map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    #[test]
    fn polynomial_round_trip() {
        let f4 = FieldSpec::with_order(4).unwrap();
        let a = parse_poly("T^3+[1,1]*T+1", &f4).unwrap();
        assert_eq!(a.degree(), Some(3));
        assert_eq!(format_poly(&a, &f4), "T^3+[1,1]*T+1");
        assert_eq!(parse_poly(&format_poly(&a, &f4), &f4).unwrap(), a);
        let f3 = FieldSpec::prime(3).unwrap();
        let b = parse_poly(" 2 * T ^ 2 - T + 4 ", &f3).unwrap();
        assert_eq!(format_poly(&b, &f3), "2*T^2+2*T+1");
    }

    #[test]
    fn like_terms_combine() {
        let a = parse_poly("T+T+1", &f2()).unwrap();
        assert_eq!(a, Poly::one());
        assert_eq!(format_poly(&Poly::zero(), &f2()), "0");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let f = f2();
        assert_eq!(
            parse_poly("T^2+*", &f).unwrap_err(),
            Error::parse(4, "expected a term, found '*'")
        );
        match parse_poly("T^-1", &f).unwrap_err() {
            Error::Parse { pos, .. } => assert_eq!(pos, 0),
            e => panic!("{e:?}"),
        }
        match parse_poly("T+1)", &f).unwrap_err() {
            Error::Parse { pos, .. } => assert_eq!(pos, 3),
            e => panic!("{e:?}"),
        }
        assert!(parse_poly("", &f).is_err());
        assert!(parse_poly("t", &f).is_err());
    }

    #[test]
    fn rational_forms() {
        let f = f2();
        let (a, b) = parse_rational("(T^2+1)/T", &f).unwrap();
        assert_eq!(format_poly(&a, &f), "T^2+1");
        assert_eq!(format_poly(&b, &f), "T");
        let (a, b) = parse_rational("T^2+1/T", &f).unwrap();
        assert_eq!((format_poly(&a, &f), format_poly(&b, &f)), ("T^2+1".into(), "T".into()));
        assert_eq!(parse_rational("T", &f).unwrap().1, Poly::one());
        assert!(matches!(
            parse_rational("1/(T+T)", &f),
            Err(Error::Domain(m)) if m.contains("position 2")
        ));
    }

    #[test]
    fn continued_fraction_forms() {
        let f = f2();
        let cf = parse_cf("[0; T | T^2, T]", &f).unwrap();
        assert_eq!(cf.preperiod.len(), 1);
        assert_eq!(cf.period.len(), 2);
        assert_eq!(format_cf(&cf.a0, &cf.preperiod, &cf.period, &f), "[0; T | T^2, T]");
        let cf = parse_cf("[0; | T]", &f).unwrap();
        assert!(cf.preperiod.is_empty());
        assert_eq!(format_cf(&cf.a0, &cf.preperiod, &cf.period, &f), "[0; | T]");
        let cf = parse_cf("[T; T]", &f).unwrap();
        assert_eq!(format_cf(&cf.a0, &cf.preperiod, &cf.period, &f), "[T; T]");
        assert!(parse_cf("[T]", &f).unwrap().preperiod.is_empty());
        assert!(parse_cf("[0; T |]", &f).is_err());
        assert!(parse_cf("[0; T", &f).is_err());
    }

    #[test]
    fn laurent_terms_and_big_o() {
        let f = f2();
        let lt = parse_laurent_terms("T + T^-1 + O(T^-5)", &f).unwrap();
        assert_eq!(lt.terms.len(), 2);
        assert_eq!(lt.big_o, Some(-5));
        assert!(parse_laurent_terms("T^-6 + O(T^-5)", &f).is_err());
        assert!(parse_laurent_terms("O(T^-1) + O(T^-2)", &f).is_err());
        let lt = parse_laurent_terms("T^(-2)", &f).unwrap();
        assert_eq!(lt.terms[0].0, -2);
    }

    #[test]
    fn modulus_in_x() {
        assert_eq!(parse_modulus("x^2+x+1", 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(parse_modulus("x^2-1", 3).unwrap(), vec![2, 0, 1]);
        assert!(parse_modulus("T^2+1", 2).is_err());
    }

    #[test]
    fn element_json() {
        let f9 = FieldSpec::with_order(9).unwrap();
        let g = f9.from_coords(&[0, 1]).unwrap();
        let v = elem_to_json(g, &f9);
        assert_eq!(v, serde_json::json!([0, 1]));
        assert_eq!(elem_from_json(&v, &f9).unwrap(), g);
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(elem_to_json(f3.from_int(2), &f3), serde_json::json!(2));
    }
}
