//! Continued fractions `f = [a0; a1, a2, ...]` over F_q((1/T)), exact handles
//! for rational and quadratic elements, and the convergent recursions.

use std::fmt;
use std::sync::RwLock;

use serde_json::{json, Value};

use crate::abs::AbsValue;
use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::laurent::{LaurentSeries, SeriesAbs};
use crate::poly::Poly;
use crate::text::{self, CfText};

/// How the stored partial quotients continue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfTail {
    /// The expansion ends with the last stored term.
    Finite,
    /// `a_i = a_{i + m}` for all `i >= start`, where `m` is the number of
    /// stored terms from `start` on.
    Periodic { start: usize },
    /// Only a prefix is known.
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfClass {
    Rational,
    Quadratic,
    Undetermined,
}

impl CfClass {
    pub fn name(self) -> &'static str {
        match self {
            CfClass::Rational => "rational",
            CfClass::Quadratic => "quadratic",
            CfClass::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    a0: Poly,
    /// `partials[i - 1] = a_i`; for periodic tails exactly one period is
    /// stored after the preperiod.
    partials: Vec<Poly>,
    tail: CfTail,
}

fn check_partials(partials: &[Poly]) -> Result<()> {
    match partials.iter().position(|a| a.degree().unwrap_or(0) == 0) {
        Some(i) => Err(Error::domain(format!(
            "partial quotient a_{} must have degree >= 1",
            i + 1
        ))),
        None => Ok(()),
    }
}

impl CfExpansion {
    pub fn finite(a0: Poly, partials: Vec<Poly>) -> Result<Self> {
        check_partials(&partials)?;
        Ok(CfExpansion {
            a0,
            partials,
            tail: CfTail::Finite,
        })
    }

    /// Known prefix of an expansion that continues.
    pub fn open(a0: Poly, partials: Vec<Poly>) -> Result<Self> {
        check_partials(&partials)?;
        Ok(CfExpansion {
            a0,
            partials,
            tail: CfTail::Open,
        })
    }

    /// Eventually periodic expansion, reduced to the shortest preperiod and
    /// period.
    pub fn periodic(a0: Poly, preperiod: Vec<Poly>, period: Vec<Poly>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::domain("period must be nonempty"));
        }
        let mut pre = preperiod;
        let mut per = period;
        check_partials(&pre)?;
        check_partials(&per)
            .map_err(|_| Error::domain("period entries must have degree >= 1"))?;
        // Shortest period: the smallest divisor block that tiles it.
        let m = per.len();
        if let Some(d) = (1..m).find(|&d| m.is_multiple_of(d) && (d..m).all(|i| per[i] == per[i - d])) {
            per.truncate(d);
        }
        // Shortest preperiod: absorb trailing preperiod terms into the period.
        while pre.last().is_some_and(|a| Some(a) == per.last()) {
            pre.pop();
            per.rotate_right(1);
        }
        let start = pre.len() + 1;
        pre.extend(per);
        Ok(CfExpansion {
            a0,
            partials: pre,
            tail: CfTail::Periodic { start },
        })
    }

    pub fn a0(&self) -> &Poly {
        &self.a0
    }

    pub fn tail(&self) -> CfTail {
        self.tail
    }

    /// Stored partial quotients `a_1, a_2, ...` (one period for periodic
    /// expansions).
    pub fn stored(&self) -> &[Poly] {
        &self.partials
    }

    pub fn preperiod(&self) -> &[Poly] {
        match self.tail {
            CfTail::Periodic { start } => &self.partials[..start - 1],
            _ => &self.partials,
        }
    }

    pub fn period(&self) -> &[Poly] {
        match self.tail {
            CfTail::Periodic { start } => &self.partials[start - 1..],
            _ => &[],
        }
    }

    /// Number of available partial quotients; `None` when unbounded.
    pub fn available(&self) -> Option<usize> {
        match self.tail {
            CfTail::Periodic { .. } => None,
            _ => Some(self.partials.len()),
        }
    }

    /// `a_i` for `i >= 1`, unrolling the period.
    pub fn partial(&self, i: usize) -> Option<&Poly> {
        assert!(i >= 1, "partial quotients are indexed from 1");
        match self.tail {
            CfTail::Periodic { start } => {
                let m = self.partials.len() + 1 - start;
                let j = if i < start { i } else { start + (i - start) % m };
                self.partials.get(j - 1)
            }
            _ => self.partials.get(i - 1),
        }
    }

    /// `a_i` or an insufficient-terms error.
    pub fn require(&self, i: usize) -> Result<&Poly> {
        self.partial(i).ok_or(Error::InsufficientTerms {
            available: self.partials.len(),
            needed: i,
        })
    }

    pub fn classify(&self) -> CfClass {
        match self.tail {
            CfTail::Finite => CfClass::Rational,
            CfTail::Periodic { .. } => CfClass::Quadratic,
            CfTail::Open => CfClass::Undetermined,
        }
    }

    /// First `n` partial quotients as an open prefix (or the whole finite
    /// expansion if it is shorter).
    pub fn prefix(&self, n: usize) -> CfExpansion {
        if self.available().is_some_and(|k| k <= n) {
            return self.clone();
        }
        CfExpansion {
            a0: self.a0.clone(),
            partials: (1..=n).map(|i| self.partial(i).unwrap().clone()).collect(),
            tail: CfTail::Open,
        }
    }

    pub fn render(&self, f: &FieldSpec) -> String {
        match self.tail {
            CfTail::Periodic { .. } => {
                text::format_cf(&self.a0, self.preperiod(), self.period(), f)
            }
            CfTail::Finite => text::format_cf(&self.a0, &self.partials, &[], f),
            CfTail::Open => {
                let s = text::format_cf(&self.a0, &self.partials, &[], f);
                let sep = if self.partials.is_empty() { "; ..." } else { ", ..." };
                format!("{}{sep}]", &s[..s.len() - 1])
            }
        }
    }

    pub fn to_json(&self, f: &FieldSpec) -> Value {
        let polys = |v: &[Poly]| -> Vec<String> { v.iter().map(|p| text::format_poly(p, f)).collect() };
        json!({
            "a0": text::format_poly(&self.a0, f),
            "partials": polys(&self.partials),
            "period_start": match self.tail {
                CfTail::Periodic { start } => Some(start),
                _ => None,
            },
            "class": self.classify().name(),
            "text": self.render(f),
        })
    }

    pub fn from_json(v: &Value, f: &FieldSpec) -> Result<Self> {
        let bad = |w: &str| Error::parse(0, format!("continued fraction JSON: {w}"));
        let a0 = text::parse_poly(v["a0"].as_str().ok_or_else(|| bad("missing a0"))?, f)?;
        let partials = v["partials"]
            .as_array()
            .ok_or_else(|| bad("missing partials"))?
            .iter()
            .map(|p| text::parse_poly(p.as_str().ok_or_else(|| bad("partial"))?, f))
            .collect::<Result<Vec<_>>>()?;
        match (v["period_start"].as_u64(), v["class"].as_str()) {
            (Some(s), _) => {
                let s = s as usize;
                if s == 0 || s > partials.len() {
                    return Err(bad("period_start out of range"));
                }
                let period = partials[s - 1..].to_vec();
                CfExpansion::periodic(a0, partials[..s - 1].to_vec(), period)
            }
            (None, Some("rational")) => CfExpansion::finite(a0, partials),
            (None, Some("undetermined")) => CfExpansion::open(a0, partials),
            _ => Err(bad("unknown class")),
        }
    }
}

/// One row of the convergent table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentRow {
    pub n: usize,
    pub q: Poly,
    pub q_perp: Poly,
    /// Inverse of the leading coefficient of `q`.
    pub c: FieldElem,
    pub q_bar: Poly,
    pub q_bar_perp: Poly,
    /// `sum_{i<=n} deg a_i = deg q_n`.
    pub deg: i64,
    /// `||q_n f||`, when `a_{n+1}` is known or the expansion ends at `n`.
    pub err: Option<AbsValue>,
}

impl ConvergentRow {
    pub fn errlog(&self) -> Option<i64> {
        self.err.and_then(|e| e.log())
    }

    pub fn to_json(&self, f: &FieldSpec) -> Value {
        let p = |a: &Poly| text::format_poly(a, f);
        json!({
            "n": self.n,
            "q": p(&self.q),
            "q_perp": p(&self.q_perp),
            "c": text::elem_to_json(self.c, f),
            "q_bar": p(&self.q_bar),
            "q_bar_perp": p(&self.q_bar_perp),
            "deg": self.deg,
            "err": self.err.map(|e| e.to_string()),
            "errlog": self.errlog(),
        })
    }
}

/// How a handle represents its element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HandleKind {
    /// `a / b` with `gcd(a, b) = 1` and `b` monic.
    Rational { a: Poly, b: Poly },
    /// Stored eventually periodic expansion.
    QuadraticCf,
    /// A series known to finite precision.
    Truncated(LaurentSeries),
}

/// An element of F_q((1/T)) with an exact or truncated representation, its
/// continued fraction, and a lazily grown convergent table.
pub struct RealHandle {
    field: FieldSpec,
    kind: HandleKind,
    cf: CfExpansion,
    rows: RwLock<Vec<ConvergentRow>>,
}

impl Clone for RealHandle {
    fn clone(&self) -> Self {
        RealHandle {
            field: self.field.clone(),
            kind: self.kind.clone(),
            cf: self.cf.clone(),
            rows: RwLock::new(self.rows.read().unwrap().clone()),
        }
    }
}

impl fmt::Debug for RealHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealHandle({})", self.describe())
    }
}

impl PartialEq for RealHandle {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.kind == other.kind && self.cf == other.cf
    }
}

/// Euclidean algorithm on `a / b`.
fn euclid_cf(a: &Poly, b: &Poly, f: &FieldSpec) -> Result<CfExpansion> {
    let (a0, mut r) = {
        let (q, r) = a.divmod(b, f)?;
        (q, r)
    };
    let mut prev = b.clone();
    let mut partials = Vec::new();
    while !r.is_zero() {
        let (q, rr) = prev.divmod(&r, f)?;
        partials.push(q);
        prev = r;
        r = rr;
    }
    CfExpansion::finite(a0, partials)
}

/// Partial quotients of a truncated series, emitting each only when its
/// polynomial part and the residual's valuation are determined by exact
/// coefficients.
fn certified_cf(x: &LaurentSeries, f: &FieldSpec) -> Result<CfExpansion> {
    let a0 = x.polypart()?;
    let mut r = x.sub(&LaurentSeries::from_poly(&a0), f);
    let mut partials = Vec::new();
    loop {
        match r.abs() {
            SeriesAbs::Indeterminate => break,
            SeriesAbs::Known(AbsValue::Zero) => return CfExpansion::finite(a0, partials),
            SeriesAbs::Known(_) => {}
        }
        let y = r.inv(f, i64::MIN)?;
        let a = match y.polypart() {
            Ok(a) => a,
            Err(_) => break,
        };
        r = y.sub(&LaurentSeries::from_poly(&a), f);
        partials.push(a);
    }
    CfExpansion::open(a0, partials)
}

impl RealHandle {
    fn with_cf(field: FieldSpec, kind: HandleKind, cf: CfExpansion) -> Self {
        RealHandle {
            field,
            kind,
            cf,
            rows: RwLock::new(Vec::new()),
        }
    }

    /// `a / b`, normalized to coprime numerator and monic denominator.
    pub fn rational(a: &Poly, b: &Poly, f: &FieldSpec) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = a.gcd(b, f);
        let (a, b) = (a.divmod(&g, f)?.0, b.divmod(&g, f)?.0);
        let (c, b) = b.monicize(f)?;
        let a = a.scale(c, f);
        let cf = euclid_cf(&a, &b, f)?;
        Ok(RealHandle::with_cf(
            f.clone(),
            HandleKind::Rational { a, b },
            cf,
        ))
    }

    /// The quadratic element `[a0; preperiod | period]`.
    pub fn quadratic(a0: Poly, preperiod: Vec<Poly>, period: Vec<Poly>, f: &FieldSpec) -> Result<Self> {
        let cf = CfExpansion::periodic(a0, preperiod, period)?;
        Ok(RealHandle::with_cf(f.clone(), HandleKind::QuadraticCf, cf))
    }

    /// From a continued fraction text. Without a period the expansion is
    /// finite and yields a rational handle.
    pub fn from_cf_text(t: CfText, f: &FieldSpec) -> Result<Self> {
        let all: Vec<&Poly> = t.preperiod.iter().chain(&t.period).collect();
        if let Some(i) = all.iter().position(|a| a.degree().unwrap_or(0) == 0) {
            return Err(Error::parse(
                t.positions[i],
                format!("partial quotient a_{} must have degree >= 1", i + 1),
            ));
        }
        if t.period.is_empty() {
            let cf = CfExpansion::finite(t.a0, t.preperiod)?;
            let (num, den) = evaluate_finite(&cf, f);
            RealHandle::rational(&num, &den, f)
        } else {
            RealHandle::quadratic(t.a0, t.preperiod, t.period, f)
        }
    }

    /// A series. Exact series are Laurent polynomials and become rational
    /// handles; otherwise the partial quotients are expanded as far as the
    /// precision certifies them.
    pub fn truncated(x: LaurentSeries, f: &FieldSpec) -> Result<Self> {
        if x.is_exact() {
            let lo = x.terms().map(|t| t.0).min().unwrap_or(0).min(0);
            let shifted = x.shift(-lo);
            let num = shifted.polypart()?;
            let den = Poly::monomial(FieldElem::ONE, (-lo) as usize);
            return RealHandle::rational(&num, &den, f);
        }
        let cf = certified_cf(&x, f)?;
        Ok(RealHandle::with_cf(f.clone(), HandleKind::Truncated(x), cf))
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn kind(&self) -> &HandleKind {
        &self.kind
    }

    pub fn cf(&self) -> &CfExpansion {
        &self.cf
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.kind, HandleKind::Rational { .. })
    }

    /// Exact handles are rational or quadratic.
    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, HandleKind::Truncated(_))
    }

    pub fn classify(&self) -> CfClass {
        self.cf.classify()
    }

    /// `(a, b)` for rational handles.
    pub fn rational_parts(&self) -> Option<(&Poly, &Poly)> {
        match &self.kind {
            HandleKind::Rational { a, b } => Some((a, b)),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            HandleKind::Rational { a, b } => format!(
                "({})/({})",
                text::format_poly(a, &self.field),
                text::format_poly(b, &self.field)
            ),
            HandleKind::QuadraticCf => self.cf.render(&self.field),
            HandleKind::Truncated(x) => x.render(&self.field),
        }
    }

    pub fn partial(&self, i: usize) -> Result<&Poly> {
        self.cf.require(i)
    }

    /// `S_k = sum_{i=1}^k deg a_i`.
    pub fn deg_sum(&self, k: usize) -> Result<i64> {
        let mut s = 0;
        for i in 1..=k {
            s += self.partial(i)?.deg_i();
        }
        Ok(s)
    }

    /// Row `n` of the convergent table, growing the cache as needed.
    pub fn row(&self, n: usize) -> Result<ConvergentRow> {
        if let Some(r) = self.rows.read().unwrap().get(n) {
            return Ok(r.clone());
        }
        let mut rows = self.rows.write().unwrap();
        while rows.len() <= n {
            let k = rows.len();
            let next = self.next_row(&rows, k)?;
            rows.push(next);
        }
        Ok(rows[n].clone())
    }

    /// Rows `0..=n`.
    pub fn rows(&self, n: usize) -> Result<Vec<ConvergentRow>> {
        self.row(n)?;
        Ok(self.rows.read().unwrap()[..=n].to_vec())
    }

    fn next_row(&self, rows: &[ConvergentRow], k: usize) -> Result<ConvergentRow> {
        let f = &self.field;
        let (q, q_perp) = match k {
            0 => (Poly::one(), self.cf.a0.clone()),
            _ => {
                let a = self.partial(k)?;
                let (q1, p1) = (&rows[k - 1].q, &rows[k - 1].q_perp);
                let (q2, p2) = if k >= 2 {
                    (rows[k - 2].q.clone(), rows[k - 2].q_perp.clone())
                } else {
                    (Poly::zero(), Poly::one())
                };
                (a.mul(q1, f).add(&q2, f), a.mul(p1, f).add(&p2, f))
            }
        };
        let (c, q_bar) = q.monicize(f)?;
        let q_bar_perp = q_perp.scale(c, f);
        let deg = q.deg_i();
        let err = match self.cf.partial(k + 1) {
            Some(a) => Some(AbsValue::Pow(-(deg + a.deg_i()))),
            None if self.cf.tail() == CfTail::Finite => Some(AbsValue::Zero),
            None => None,
        };
        Ok(ConvergentRow {
            n: k,
            q,
            q_perp,
            c,
            q_bar,
            q_bar_perp,
            deg,
            err,
        })
    }

    /// `||q_n f|| = q^{-S_{n+1}}`; zero at the last row of a rational.
    pub fn error(&self, n: usize) -> Result<AbsValue> {
        if let Some(m) = self.cf.available() {
            if n > m {
                return Err(Error::InsufficientTerms {
                    available: m,
                    needed: n + 1,
                });
            }
        }
        self.row(n)?.err.ok_or(Error::InsufficientTerms {
            available: self.cf.stored().len(),
            needed: n + 1,
        })
    }

    /// The element to absolute precision `T^-prec`: every coefficient of
    /// exponent `>= -prec` is exact.
    pub fn to_laurent(&self, prec: i64) -> Result<LaurentSeries> {
        let f = &self.field;
        match &self.kind {
            HandleKind::Rational { a, b } => LaurentSeries::from_rational(a, b, prec, f),
            HandleKind::Truncated(x) => match x.precision_floor() {
                Some(fl) if fl > -prec => Err(Error::precision(format!(
                    "series is known only down to T^{fl}, requested T^{}",
                    -prec
                ))),
                _ => Ok(x.truncate(-prec)),
            },
            HandleKind::QuadraticCf => {
                // |f - q_n^perp / q_n| = q^{-(S_n + S_{n+1})}
                let mut n = 0;
                loop {
                    let s_n = self.deg_sum(n)?;
                    let s_n1 = s_n + self.partial(n + 1)?.deg_i();
                    if s_n + s_n1 > prec {
                        break;
                    }
                    n += 1;
                }
                let r = self.row(n)?;
                let x = LaurentSeries::from_rational(&r.q_perp, &r.q, prec, f)?;
                Ok(x.truncate(-prec).inexact())
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let f = &self.field;
        match &self.kind {
            HandleKind::Rational { a, b } => json!({
                "kind": "rational",
                "a": text::format_poly(a, f),
                "b": text::format_poly(b, f),
                "cf": self.cf.to_json(f),
            }),
            HandleKind::QuadraticCf => json!({
                "kind": "quadratic",
                "cf": self.cf.to_json(f),
            }),
            HandleKind::Truncated(x) => json!({
                "kind": "truncated",
                "series": x.to_json(f),
                "cf": self.cf.to_json(f),
            }),
        }
    }
}

/// `(num, den)` of a finite continued fraction, not reduced.
pub fn evaluate_finite(cf: &CfExpansion, f: &FieldSpec) -> (Poly, Poly) {
    let (mut num, mut den) = (cf.a0.clone(), Poly::one());
    let (mut num_prev, mut den_prev) = (Poly::one(), Poly::zero());
    for a in &cf.partials {
        let n = a.mul(&num, f).add(&num_prev, f);
        let d = a.mul(&den, f).add(&den_prev, f);
        num_prev = std::mem::replace(&mut num, n);
        den_prev = std::mem::replace(&mut den, d);
    }
    (num, den)
}

/// Continued fraction of a handle with at most `max_terms` partial
/// quotients. Longer expansions come back as an open prefix; a truncated
/// series that cannot certify `max_terms` terms is an error naming the last
/// certified index.
pub fn cf_expand(h: &RealHandle, max_terms: usize) -> Result<CfExpansion> {
    let cf = h.cf();
    match h.kind() {
        HandleKind::QuadraticCf => Ok(cf.clone()),
        HandleKind::Rational { .. } => Ok(cf.prefix(max_terms)),
        HandleKind::Truncated(_) => {
            let k = cf.stored().len();
            if cf.tail() == CfTail::Open && k < max_terms {
                Err(Error::precision(format!(
                    "partial quotients certified only through a_{k}"
                )))
            } else {
                Ok(cf.prefix(max_terms))
            }
        }
    }
}
