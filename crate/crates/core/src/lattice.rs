//! The ε-approximation lattice `Λ_ε(f) = {λ ∈ A : ||λ f|| < ε}`.
//!
//! ε only matters through the breakpoints `ε = q^{l - S_{N+1}}` with
//! `0 < l <= deg a_{N+1}`, where `S_k = deg a_1 + ... + deg a_k`. At such an
//! ε the lattice is spanned by `T^r q̄_N` for `r < l` followed by the full
//! blocks `T^r q̄_n`, `r < deg a_{n+1}`, for every `n > N`.
//!
//! For a rational `a/b` with `M` partial quotients the table stops at
//! `q̄_M = b`, whose multiples are all exact. Indices `N >= M` are virtual:
//! they continue the schedule with `ε = |b|^{-1} q^{-(N-M)}` and `l = 1`,
//! where the lattice is the ideal `bA`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::abs::AbsValue;
use crate::cf::{CfTail, RealHandle};
use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::poly::{enumerate, Constraint, Poly};
use crate::text;

/// A breakpoint `(N, l)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpsIndex {
    pub n: usize,
    pub l: i64,
}

impl EpsIndex {
    pub fn new(n: usize, l: i64) -> Self {
        EpsIndex { n, l }
    }

    /// `log_q ε` after checking `0 < l <= deg a_{N+1}` and `ε < 1`.
    pub fn log_eps(&self, h: &RealHandle) -> Result<i64> {
        let (deg_next, s_next) = match rational_len(h) {
            Some(m) if self.n >= m => {
                let s_m = h.deg_sum(m)?;
                (1, s_m + (self.n - m) as i64 + 1)
            }
            _ => {
                let d = h.partial(self.n + 1)?.deg_i();
                (d, h.deg_sum(self.n)? + d)
            }
        };
        if self.l < 1 || self.l > deg_next {
            return Err(Error::domain(format!(
                "l = {} outside 1..={deg_next} at N = {}",
                self.l, self.n
            )));
        }
        let e = self.l - s_next;
        if e >= 0 {
            return Err(Error::domain(format!(
                "ε = q^{e} at (N, l) = ({}, {}) is not below 1",
                self.n, self.l
            )));
        }
        Ok(e)
    }

    /// The breakpoint whose lattice equals `Λ_ε` for `ε = q^e`, `e < 0`.
    /// (Norms are integral powers of q, so any real exponent may be
    /// rounded up to an integer first.)
    pub fn from_log_eps(h: &RealHandle, e: i64) -> Result<Self> {
        if e >= 0 {
            return Err(Error::domain("ε must be below 1"));
        }
        let m = rational_len(h);
        let mut s_n = 0;
        let mut n = 0;
        loop {
            if let Some(m) = m {
                if n >= m {
                    // virtual: e = -S_M - (N - M)
                    let s_m = h.deg_sum(m)?;
                    return Ok(EpsIndex::new(m + (-e - s_m) as usize, 1));
                }
            }
            let s_next = s_n + h.partial(n + 1)?.deg_i();
            // N covers log ε in [1 - S_{N+1}, -S_N]
            if e >= 1 - s_next {
                return Ok(EpsIndex::new(n, e + s_next));
            }
            s_n = s_next;
            n += 1;
        }
    }

    pub fn to_json(&self, h: &RealHandle) -> Value {
        let log = self.log_eps(h).ok();
        json!({
            "N": self.n,
            "l": self.l,
            "log_eps": log,
            "eps": log.map(|e| AbsValue::Pow(e).render(h.field().q())),
        })
    }
}

/// Number of partial quotients of a rational handle.
pub(crate) fn rational_len(h: &RealHandle) -> Option<usize> {
    (h.cf().tail() == CfTail::Finite).then(|| h.cf().stored().len())
}

/// All breakpoints with `N <= n_max` in decreasing ε, skipping `ε = 1`.
/// Distinct indices never share an ε (index N covers the exponents
/// `1 - S_{N+1} ..= -S_N`), so collisions would keep the larger N.
pub fn eps_schedule(h: &RealHandle, n_max: usize) -> Result<Vec<EpsIndex>> {
    let mut out: Vec<(i64, EpsIndex)> = Vec::new();
    let m = rational_len(h);
    for n in 0..=n_max {
        let deg_next = match m {
            Some(m) if n >= m => 1,
            _ => h.partial(n + 1)?.deg_i(),
        };
        for l in (1..=deg_next).rev() {
            let e = EpsIndex::new(n, l);
            match e.log_eps(h) {
                Ok(log) => out.push((log, e)),
                Err(Error::Domain(_)) => continue,
                Err(err) => return Err(err),
            }
        }
    }
    out.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.n.cmp(&a.1.n)));
    out.dedup_by(|later, kept| later.0 == kept.0);
    Ok(out.into_iter().map(|(_, e)| e).collect())
}

/// One basis vector `T^r q̄_n` together with its dual and error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisEntry {
    pub r: usize,
    pub n: usize,
    pub poly: Poly,
    /// `T^r q̄_n^⊥`
    pub dual: Poly,
    /// `||T^r q̄_n f|| = q^{r - S_{n+1}}` (zero for multiples of the
    /// denominator of a rational).
    pub err: AbsValue,
}

impl BasisEntry {
    pub fn degree(&self) -> i64 {
        self.poly.deg_i()
    }
}

/// Basis vectors of `Λ_ε` up to a degree bound, in increasing degree (one
/// vector per occurring degree).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaBasis {
    pub eps: EpsIndex,
    pub log_eps: i64,
    pub deg_bound: i64,
    pub entries: Vec<BasisEntry>,
}

pub fn lambda_basis(h: &RealHandle, e: EpsIndex, deg_bound: i64) -> Result<LambdaBasis> {
    let log_eps = e.log_eps(h)?;
    let m = rational_len(h);
    let mut entries = Vec::new();
    let push_block = |n: usize, r_count: Option<i64>, entries: &mut Vec<BasisEntry>| -> Result<bool> {
        let row = h.row(n)?;
        let mut r = 0i64;
        while r_count.is_none_or(|c| r < c) {
            if row.deg + r > deg_bound {
                return Ok(false);
            }
            let err = row
                .err
                .ok_or(Error::InsufficientTerms {
                    available: h.cf().stored().len(),
                    needed: n + 1,
                })?
                * AbsValue::Pow(r);
            entries.push(BasisEntry {
                r: r as usize,
                n,
                poly: row.q_bar.shift(r as usize),
                dual: row.q_bar_perp.shift(r as usize),
                err,
            });
            r += 1;
        }
        Ok(true)
    };
    match m {
        Some(m) if e.n >= m => {
            push_block(m, None, &mut entries)?;
        }
        _ => {
            let mut more = push_block(e.n, Some(e.l), &mut entries)?;
            let mut n = e.n + 1;
            while more {
                if m == Some(n) {
                    push_block(n, None, &mut entries)?;
                    break;
                }
                if h.row(n)?.deg > deg_bound {
                    break;
                }
                let d = h.partial(n + 1)?.deg_i();
                more = push_block(n, Some(d), &mut entries)?;
                n += 1;
            }
        }
    }
    Ok(LambdaBasis {
        eps: e,
        log_eps,
        deg_bound,
        entries,
    })
}

/// An element `Σ coords[i] · entries[i]` of a [`LambdaBasis`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeElement {
    pub coords: Vec<FieldElem>,
}

impl LatticeElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Index of the highest-degree basis vector in the support.
    pub fn top(&self) -> Option<usize> {
        self.coords.iter().rposition(|c| !c.is_zero())
    }
}

impl LambdaBasis {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in block order with `r` descending inside each block; along
    /// this order the errors strictly decrease.
    pub fn error_order(&self) -> Vec<&BasisEntry> {
        let mut v: Vec<&BasisEntry> = self.entries.iter().collect();
        v.sort_by(|a, b| a.n.cmp(&b.n).then(b.r.cmp(&a.r)));
        v
    }

    /// Smallest degree of a nonzero element (that of `q̄_N`).
    pub fn min_degree(&self) -> Option<i64> {
        self.entries.first().map(|e| e.degree())
    }

    pub fn element(&self, elem: &LatticeElement, f: &FieldSpec) -> Poly {
        self.combine(elem, f, |e| &e.poly)
    }

    fn combine(&self, elem: &LatticeElement, f: &FieldSpec, pick: impl Fn(&BasisEntry) -> &Poly) -> Poly {
        let mut acc = Poly::zero();
        for (c, e) in elem.coords.iter().zip(&self.entries) {
            if !c.is_zero() {
                acc = acc.add(&pick(e).scale(*c, f), f);
            }
        }
        acc
    }

    /// Concise form `n -> c_n(T)` with `λ = Σ c_n(T) q̄_n`.
    pub fn concise(&self, elem: &LatticeElement, f: &FieldSpec) -> BTreeMap<usize, Poly> {
        let mut out: BTreeMap<usize, Poly> = BTreeMap::new();
        for (c, e) in elem.coords.iter().zip(&self.entries) {
            if !c.is_zero() {
                let slot = out.entry(e.n).or_insert_with(Poly::zero);
                *slot = slot.add(&Poly::monomial(*c, e.r), f);
            }
        }
        out
    }

    /// Monic iff the top coordinate is 1 (every `q̄_n` is monic and degrees
    /// strictly increase along the entries).
    pub fn is_monic(&self, elem: &LatticeElement) -> bool {
        elem.top().is_some_and(|i| elem.coords[i].is_one())
    }

    pub fn to_json(&self, f: &FieldSpec) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|e| {
                    json!({
                        "r": e.r,
                        "n": e.n,
                        "poly": text::format_poly(&e.poly, f),
                        "errlog": e.err.log(),
                    })
                })
                .collect(),
        )
    }
}

/// `λ^⊥ = Σ c_n(T) q̄_n^⊥`.
pub fn lambda_dual(basis: &LambdaBasis, elem: &LatticeElement, f: &FieldSpec) -> Poly {
    basis.combine(elem, f, |e| &e.dual)
}

/// `||λ f||`, the largest error among the basis vectors in the support.
pub fn lambda_error(basis: &LambdaBasis, elem: &LatticeElement) -> Result<AbsValue> {
    elem.coords
        .iter()
        .zip(&basis.entries)
        .filter(|(c, _)| !c.is_zero())
        .map(|(_, e)| e.err)
        .max()
        .ok_or_else(|| Error::domain("the zero element has no error"))
}

/// Base-q counter over coordinate vectors, lowest position fastest.
struct Counter {
    q: u32,
    digits: Vec<u32>,
    done: bool,
}

impl Counter {
    fn new(q: u32, len: usize) -> Self {
        Counter {
            q,
            digits: vec![0; len],
            done: false,
        }
    }

    fn next(&mut self) -> Option<Vec<FieldElem>> {
        if self.done {
            return None;
        }
        let out = self.digits.iter().map(|&d| FieldElem::from_raw(d)).collect();
        let mut i = 0;
        loop {
            if i == self.digits.len() {
                self.done = true;
                break;
            }
            self.digits[i] += 1;
            if self.digits[i] < self.q {
                break;
            }
            self.digits[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

/// Monic lattice elements of degree `<= deg_bound`, ordered by top basis
/// vector and then by the lower coordinates (lowest fastest).
pub fn lambda_enumerate_monic(
    basis: &LambdaBasis,
    deg_bound: i64,
    f: &FieldSpec,
) -> impl Iterator<Item = LatticeElement> {
    let k = basis.entries.iter().take_while(|e| e.degree() <= deg_bound).count();
    let q = f.q();
    (0..k).flat_map(move |top| {
        let mut counter = Counter::new(q, top);
        std::iter::from_fn(move || {
            counter.next().map(|mut lower| {
                lower.push(FieldElem::ONE);
                lower.resize(k, FieldElem::ZERO);
                LatticeElement { coords: lower }
            })
        })
    })
}

/// Every `F_q`-combination of the basis vectors of degree `<= deg_bound`.
pub fn lambda_span(basis: &LambdaBasis, deg_bound: i64, f: &FieldSpec) -> Vec<Poly> {
    let k = basis.entries.iter().take_while(|e| e.degree() <= deg_bound).count();
    let mut counter = Counter::new(f.q(), k);
    let mut out = Vec::new();
    while let Some(mut coords) = counter.next() {
        coords.resize(basis.len(), FieldElem::ZERO);
        out.push(basis.element(&LatticeElement { coords }, f));
    }
    out
}

/// Brute force: every `λ` with `deg λ <= deg_bound` and `||λ f|| < ε`,
/// decided from the series of `f` at a precision that makes each norm
/// exact. Output follows [`enumerate`] order.
pub fn lambda_member_oracle(h: &RealHandle, e: EpsIndex, deg_bound: i64) -> Result<Vec<Poly>> {
    let f = h.field();
    let log_eps = e.log_eps(h)?;
    // λ f must be known down to T^{log ε}: floor(λ f) = -prec + deg λ.
    let prec = deg_bound.max(0) - log_eps;
    let x = h.to_laurent(prec)?;
    let mut out = Vec::new();
    for lambda in enumerate(f, deg_bound.max(0) as usize, Constraint::All) {
        let y = x.mul_poly(&lambda, f);
        let mut member = true;
        for k in log_eps..0 {
            if !y.coeff(k)?.is_zero() {
                member = false;
                break;
            }
        }
        if member {
            out.push(lambda);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_poly;
    use std::collections::HashSet;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn golden(f: &FieldSpec) -> RealHandle {
        RealHandle::quadratic(Poly::zero(), vec![], vec![Poly::t()], f).unwrap()
    }

    fn cf(f: &FieldSpec, a0: &str, pre: &[&str], per: &[&str]) -> RealHandle {
        let p = |s: &&str| parse_poly(s, f).unwrap();
        RealHandle::quadratic(p(&a0), pre.iter().map(p).collect(), per.iter().map(p).collect(), f).unwrap()
    }

    fn logs(h: &RealHandle, n_max: usize) -> Vec<i64> {
        eps_schedule(h, n_max)
            .unwrap()
            .iter()
            .map(|e| e.log_eps(h).unwrap())
            .collect()
    }

    #[test]
    fn schedule_all_degree_one() {
        let f = f2();
        assert_eq!(logs(&golden(&f), 3), [-1, -2, -3]);
    }

    #[test]
    fn schedule_mixed_degrees() {
        let f = f2();
        let h = cf(&f, "0", &["T"], &["T^2"]);
        assert_eq!(logs(&h, 1), [-1, -2]);
        let h = cf(&f, "0", &[], &["T^3"]);
        assert_eq!(eps_schedule(&h, 0).unwrap(), [EpsIndex::new(0, 2), EpsIndex::new(0, 1)]);
        assert_eq!(logs(&h, 0), [-1, -2]);
    }

    #[test]
    fn log_eps_round_trip() {
        let f = f2();
        let h = cf(&f, "T", &["T^2"], &["T", "T^3+T"]);
        for e in eps_schedule(&h, 6).unwrap() {
            assert_eq!(EpsIndex::from_log_eps(&h, e.log_eps(&h).unwrap()).unwrap(), e);
        }
        let r = RealHandle::rational(&parse_poly("T^3+1", &f).unwrap(), &parse_poly("T^2+T+1", &f).unwrap(), &f).unwrap();
        for e in eps_schedule(&r, 5).unwrap() {
            assert_eq!(EpsIndex::from_log_eps(&r, e.log_eps(&r).unwrap()).unwrap(), e);
        }
        assert!(EpsIndex::new(0, 1).log_eps(&golden(&f)).is_err());
        assert!(EpsIndex::new(1, 2).log_eps(&golden(&f)).is_err());
    }

    #[test]
    fn golden_basis() {
        let f = f2();
        let b = lambda_basis(&golden(&f), EpsIndex::new(1, 1), 4).unwrap();
        let polys: Vec<String> = b.entries.iter().map(|e| text::format_poly(&e.poly, &f)).collect();
        assert_eq!(polys, ["T", "T^2+1", "T^3", "T^4+T^2+1"]);
        let errs: Vec<i64> = b.entries.iter().map(|e| e.err.log().unwrap()).collect();
        assert_eq!(errs, [-2, -3, -4, -5]);
        assert!(lambda_basis(&golden(&f), EpsIndex::new(3, 1), 2).unwrap().is_empty());
    }

    #[test]
    fn first_block_with_l_two() {
        let f = f2();
        let h = cf(&f, "0", &[], &["T^2"]);
        let b = lambda_basis(&h, EpsIndex::new(1, 2), 6).unwrap();
        let rn: Vec<(usize, usize)> = b.entries.iter().map(|e| (e.r, e.n)).collect();
        assert_eq!(rn, [(0, 1), (1, 1), (0, 2), (1, 2), (0, 3)]);
        let po: Vec<(usize, usize)> = b.error_order().iter().map(|e| (e.r, e.n)).collect();
        assert_eq!(po, [(1, 1), (0, 1), (1, 2), (0, 2), (0, 3)]);
        let errs: Vec<i64> = b.error_order().iter().map(|e| e.err.log().unwrap()).collect();
        assert!(errs.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn rational_lattice_is_the_ideal() {
        let f = f2();
        let h = RealHandle::rational(&parse_poly("T^2+1", &f).unwrap(), &Poly::t(), &f).unwrap();
        let e = EpsIndex::new(1, 1);
        assert_eq!(e.log_eps(&h).unwrap(), -1);
        let oracle: HashSet<Poly> = lambda_member_oracle(&h, e, 3).unwrap().into_iter().collect();
        let multiples: HashSet<Poly> = enumerate(&f, 2, Constraint::All).map(|a| a.shift(1)).collect();
        assert_eq!(oracle, multiples);
        let b = lambda_basis(&h, e, 3).unwrap();
        let span: HashSet<Poly> = lambda_span(&b, 3, &f).into_iter().collect();
        assert_eq!(span, oracle);
        assert!(b.entries.iter().all(|e| e.err == AbsValue::Zero));
    }

    #[test]
    fn golden_membership() {
        let f = f2();
        let set = lambda_member_oracle(&golden(&f), EpsIndex::new(1, 1), 4).unwrap();
        assert!(set.contains(&Poly::t()));
        assert!(!set.contains(&parse_poly("T^2", &f).unwrap()));
        assert!(set.contains(&Poly::zero()));
    }

    #[test]
    fn enumerate_golden_monic() {
        let f = f2();
        let b = lambda_basis(&golden(&f), EpsIndex::new(1, 1), 3).unwrap();
        let got: Vec<String> = lambda_enumerate_monic(&b, 3, &f)
            .map(|e| text::format_poly(&b.element(&e, &f), &f))
            .collect();
        assert_eq!(got, ["T", "T^2+1", "T^2+T+1", "T^3", "T^3+T", "T^3+T^2+1", "T^3+T^2+T+1"]);
        assert_eq!(lambda_enumerate_monic(&b, 0, &f).count(), 0);
    }

    #[test]
    fn duals_and_errors() {
        let f = f2();
        let h = golden(&f);
        let b = lambda_basis(&h, EpsIndex::new(1, 1), 5).unwrap();
        let one = LatticeElement { coords: vec![FieldElem::ONE, FieldElem::ZERO] };
        assert_eq!(lambda_error(&b, &one).unwrap(), AbsValue::Pow(-2));
        assert_eq!(lambda_dual(&b, &one, &f), h.row(1).unwrap().q_bar_perp);
        let both = LatticeElement { coords: vec![FieldElem::ONE, FieldElem::ONE] };
        assert_eq!(lambda_error(&b, &both).unwrap(), AbsValue::Pow(-2));
        let zero = LatticeElement { coords: vec![FieldElem::ZERO; 2] };
        assert!(lambda_error(&b, &zero).is_err());
        assert!(lambda_dual(&b, &zero, &f).is_zero());
        let x = h.to_laurent(30).unwrap();
        for elem in lambda_enumerate_monic(&b, 5, &f) {
            let lam = b.element(&elem, &f);
            let diff = x.mul_poly(&lam, &f).sub(&crate::LaurentSeries::from_poly(&lambda_dual(&b, &elem, &f)), &f);
            assert_eq!(diff.abs().known(), Some(lambda_error(&b, &elem).unwrap()));
        }
    }

    #[test]
    fn concise_form_and_monic_flag() {
        let f = f2();
        let h = cf(&f, "0", &[], &["T^2"]);
        let b = lambda_basis(&h, EpsIndex::new(1, 2), 5).unwrap();
        let elem = LatticeElement { coords: vec![FieldElem::ONE, FieldElem::ONE, FieldElem::ZERO, FieldElem::ONE] };
        let c = b.concise(&elem, &f);
        assert_eq!(text::format_poly(&c[&1], &f), "T+1");
        assert_eq!(text::format_poly(&c[&2], &f), "T");
        assert!(b.is_monic(&elem));
    }
}
