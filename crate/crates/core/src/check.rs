//! The invariant suite behind `jqt check` and the acceptance tests. Each
//! criterion produces one [`Verdict`] with counterexamples on failure.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cf::{evaluate_finite, RealHandle};
use crate::corpus::{quadratic_corpus, rational_corpus};
use crate::equidist::{telescoping_check, weyl_sum};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::invariant::{delta_g_eps, j_eps, j_tilde, jqt_limit_set, ClassValue, JResult, JValue};
use crate::laurent::{LaurentSeries, SeriesAbs};
use crate::lattice::{eps_schedule, lambda_basis, lambda_member_oracle, lambda_span, EpsIndex};
use crate::pgl::{pgl_transform, Mobius};
use crate::poly::{enumerate, Constraint, Poly};
use crate::text;
use crate::zeta::zeta_eps;

const MAX_DUMP: usize = 5;

/// Default precision per field order.
pub fn default_prec(q: u32) -> i64 {
    match q {
        2 => 20,
        3 => 24,
        4 => 18,
        _ => 20,
    }
}

/// Largest `N` swept by the size law over `F_q`.
pub fn size_law_nmax(q: u32) -> usize {
    match q {
        2 => 8,
        3 => 5,
        _ => 3,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub counterexamples: Vec<String>,
}

impl Verdict {
    fn new(id: u8, name: &str, bad: Vec<String>, detail: String) -> Self {
        Verdict {
            id,
            name: name.to_string(),
            pass: bad.is_empty(),
            counterexamples: bad.into_iter().take(MAX_DUMP).collect(),
            detail,
        }
    }

    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("{tag} {:>2} {}: {}", self.id, self.name, self.detail)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "pass": self.pass,
            "detail": self.detail,
            "counterexamples": self.counterexamples,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub fields: Vec<FieldSpec>,
    pub seed: u64,
    /// Overrides [`default_prec`].
    pub prec: Option<i64>,
    /// Random quadratic handles added to the fixed ones per field.
    pub random: usize,
}

impl SuiteParams {
    pub fn new(fields: Vec<FieldSpec>, seed: u64) -> Self {
        SuiteParams { fields, seed, prec: None, random: 5 }
    }

    fn prec(&self, f: &FieldSpec) -> i64 {
        self.prec.unwrap_or_else(|| default_prec(f.q()))
    }
}

fn at(h: &RealHandle, e: EpsIndex) -> String {
    format!("q={} {} ({},{})", h.field().q(), h.describe(), e.n, e.l)
}

/// `j_ε` over the schedule of every quadratic corpus handle.
pub struct JTable {
    pub rows: Vec<(RealHandle, EpsIndex, JResult)>,
}

pub fn j_table(p: &SuiteParams) -> Result<JTable> {
    let mut rows = Vec::new();
    for f in &p.fields {
        for h in quadratic_corpus(f, p.seed, p.random)? {
            for e in eps_schedule(&h, size_law_nmax(f.q()))? {
                let r = j_eps(&h, e, p.prec(f))?;
                rows.push((clone_handle(&h)?, e, r));
            }
        }
    }
    Ok(JTable { rows })
}

fn clone_handle(h: &RealHandle) -> Result<RealHandle> {
    let f = h.field();
    match h.kind() {
        crate::cf::HandleKind::Rational { a, b } => RealHandle::rational(a, b, f),
        crate::cf::HandleKind::QuadraticCf => {
            let cf = h.cf();
            RealHandle::quadratic(cf.a0().clone(), cf.preperiod().to_vec(), cf.period().to_vec(), f)
        }
        crate::cf::HandleKind::Truncated(x) => RealHandle::truncated(x.clone(), f),
    }
}

/// Criterion 1: `|j_ε| = q^{2q-1}` at every index of the table.
pub fn size_law(t: &JTable) -> Verdict {
    let mut bad = Vec::new();
    let mut seen: BTreeMap<(u32, Option<i64>), usize> = BTreeMap::new();
    for (h, e, r) in &t.rows {
        let q = h.field().q();
        let want = 2 * q as i64 - 1;
        let got = r.abs_log();
        *seen.entry((q, got)).or_default() += 1;
        if got != Some(want) {
            bad.push(format!("{}: log_q|j| = {:?}, expected {want}", at(h, *e), got));
        }
    }
    let hist: Vec<String> = seen
        .iter()
        .map(|((q, l), n)| match l {
            Some(l) => format!("q={q}:{l}x{n}"),
            None => format!("q={q}:infx{n}"),
        })
        .collect();
    let detail = format!(
        "{} of {} indices off q^(2q-1); observed log_q|j| {}",
        bad.len(),
        t.rows.len(),
        hist.join(" ")
    );
    Verdict::new(1, "size law |j_eps| = q^(2q-1)", bad, detail)
}

/// Criterion 2: `|J̃_ε| = 1` at every index of the table.
pub fn j_tilde_unit(t: &JTable) -> Result<Verdict> {
    let mut bad = Vec::new();
    for (h, e, r) in &t.rows {
        let f = h.field();
        let dg = delta_g_eps(h, *e, r.work_prec)?;
        let floor = dg.z1.value.floor().min(dg.z2.value.floor()) - 4;
        let jt = j_tilde(&dg.z1, &dg.z2, f, floor)?;
        match jt.abs() {
            SeriesAbs::Known(a) if a.log() == Some(0) => {}
            other => bad.push(format!("{}: |J~| = {:?}", at(h, *e), other)),
        }
    }
    let detail = format!("{} indices, {} with |J~| != 1", t.rows.len(), bad.len());
    Ok(Verdict::new(2, "|J~_eps| = 1", bad, detail))
}

fn sort_polys(v: &mut [Poly]) {
    v.sort_by_key(|p| p.coeffs().iter().map(|c| c.index()).collect::<Vec<_>>());
}

/// Criterion 3: Rationals give `Λ_ε = bA` at `ε = |b|^{-1}` and a certified infinity
/// from there on; no quadratic handle of the table gives infinity.
pub fn rationality(p: &SuiteParams, t: &JTable) -> Result<Verdict> {
    let mut bad = Vec::new();
    let mut tested = 0;
    let mut infinities = 0;
    for f in &p.fields {
        let count = if f.q() == 2 { 12 } else { 4 };
        for h in rational_corpus(f, p.seed, count, 6)? {
            tested += 1;
            let (_, b) = h.rational_parts().expect("rational corpus");
            let db = b.deg_i();
            let e0 = EpsIndex::from_log_eps(&h, -db)?;
            let bound = 5.max(db + 1);
            let mut oracle = lambda_member_oracle(&h, e0, bound)?;
            let mut multiples: Vec<Poly> = enumerate(f, (bound - db) as usize, Constraint::All)
                .map(|c| c.mul(b, f))
                .collect();
            sort_polys(&mut oracle);
            sort_polys(&mut multiples);
            if oracle != multiples {
                bad.push(format!("{}: Lambda at |b|^-1 is not bA up to degree {bound}", h.describe()));
            }
            let n_max = e0.n + 2;
            for e in eps_schedule(&h, n_max)? {
                if e.log_eps(&h)? > -db {
                    continue;
                }
                let r = j_eps(&h, e, p.prec(f))?;
                infinities += 1;
                if r.value != (JValue::Infinity { certified: true }) {
                    bad.push(format!("{}: j = {}", at(&h, e), r.render(f)));
                }
            }
        }
    }
    for (h, e, r) in &t.rows {
        if r.is_infinite() {
            bad.push(format!("{}: irrational handle gives infinity", at(h, *e)));
        }
    }
    let detail = format!(
        "{tested} rationals, {infinities} certified infinities checked, {} quadratic indices finite",
        t.rows.len()
    );
    Ok(Verdict::new(3, "rationality criterion", bad, detail))
}

fn all_handles(f: &FieldSpec, p: &SuiteParams) -> Result<Vec<RealHandle>> {
    let mut hs = quadratic_corpus(f, p.seed, p.random)?;
    hs.extend(rational_corpus(f, p.seed, 3, 4)?);
    Ok(hs)
}

/// Criterion 4: The span of the basis equals the brute-force membership set.
pub fn basis_oracle(p: &SuiteParams, n_max: usize, deg_bound: i64) -> Result<Verdict> {
    let mut bad = Vec::new();
    let mut tested = 0;
    for f in &p.fields {
        for h in all_handles(f, p)? {
            for e in eps_schedule(&h, n_max)? {
                tested += 1;
                let basis = lambda_basis(&h, e, deg_bound)?;
                let mut span = lambda_span(&basis, deg_bound, f);
                let mut oracle = lambda_member_oracle(&h, e, deg_bound)?;
                sort_polys(&mut span);
                sort_polys(&mut oracle);
                if span != oracle {
                    bad.push(format!(
                        "{}: span has {} elements, oracle {}",
                        at(&h, e),
                        span.len(),
                        oracle.len()
                    ));
                }
            }
        }
    }
    let detail = format!("{tested} indices, deg_bound {deg_bound}, N <= {n_max}");
    Ok(Verdict::new(4, "basis span equals membership oracle", bad, detail))
}

fn is_member(x: &LaurentSeries, log_eps: i64, lambda: &Poly, f: &FieldSpec) -> Result<bool> {
    let y = x.mul_poly(lambda, f);
    for k in log_eps..0 {
        if !y.coeff(k)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Criterion 5: The membership set is an `F_q`-space, and not an ideal when `f` is
/// irrational.
pub fn vector_space(p: &SuiteParams, n_max: usize, deg_bound: i64) -> Result<Verdict> {
    let mut bad = Vec::new();
    let mut tested = 0;
    for f in &p.fields {
        for h in all_handles(f, p)? {
            for e in eps_schedule(&h, n_max)? {
                tested += 1;
                let set = lambda_member_oracle(&h, e, deg_bound)?;
                let members: HashSet<&Poly> = set.iter().collect();
                let closed = set.iter().all(|u| {
                    set.iter().all(|v| members.contains(&u.add(v, f)))
                        && f.units().all(|c| members.contains(&u.scale(c, f)))
                });
                if !closed {
                    bad.push(format!("{}: not closed under F_q-combinations", at(&h, e)));
                }
                if h.is_rational() {
                    continue;
                }
                // aλ with a = T^k, λ from the membership set or the first
                // basis vector (which may lie above deg_bound)
                let log_eps = e.log_eps(&h)?;
                let mut lambdas: Vec<Poly> = set.iter().filter(|l| !l.is_zero()).cloned().collect();
                let first = h.row(e.n)?.q_bar;
                let top = first.deg_i().max(deg_bound) + 3;
                lambdas.push(first);
                let x = h.to_laurent(top - log_eps)?;
                let mut witness = false;
                'search: for lambda in &lambdas {
                    for k in 1..=3 {
                        let a = Poly::monomial(f.one(), k);
                        if !is_member(&x, log_eps, &a.mul(lambda, f), f)? {
                            witness = true;
                            break 'search;
                        }
                    }
                }
                if !witness {
                    bad.push(format!("{}: no witness a*lambda outside Lambda", at(&h, e)));
                }
            }
        }
    }
    let detail = format!("{tested} indices, closure and non-ideal witnesses up to degree {deg_bound}");
    Ok(Verdict::new(5, "vector space, not an ideal", bad, detail))
}

/// Criterion 6: `||q_n f|| |q_{n+1}| = 1`, `|q_n| = q^{S_n}`, rational round trip.
pub fn cf_identities(p: &SuiteParams) -> Result<Verdict> {
    let mut bad = Vec::new();
    let mut tested = 0;
    for f in &p.fields {
        let mut hs = quadratic_corpus(f, p.seed, p.random)?;
        hs.extend(rational_corpus(f, p.seed, 10, 6)?);
        for h in hs {
            let top = match h.cf().available() {
                Some(m) => m.min(10),
                None => 10,
            };
            let x = h.to_laurent(200)?;
            for n in 0..=top {
                tested += 1;
                let r = h.row(n)?;
                if r.q.deg_i() != h.deg_sum(n)? {
                    bad.push(format!("{} n={n}: deg q_n != S_n", h.describe()));
                }
                let y = x.mul_poly(&r.q, f).sub(&LaurentSeries::from_poly(&r.q_perp), f);
                let norm = y.top();
                let next = h.partial(n + 1).ok().map(|a| a.deg_i() + r.q.deg_i());
                match (norm, next) {
                    (Some(k), Some(d)) if k + d == 0 => {}
                    (None, None) if h.is_rational() => {}
                    (k, d) => bad.push(format!(
                        "{} n={n}: log||q_n f|| = {k:?}, deg q_(n+1) = {d:?}",
                        h.describe()
                    )),
                }
            }
            if let Some((a, b)) = h.rational_parts() {
                let (num, den) = evaluate_finite(h.cf(), f);
                let back = RealHandle::rational(&num, &den, f)?;
                if back.rational_parts() != Some((a, b)) {
                    bad.push(format!("{}: continued fraction does not evaluate back", h.describe()));
                }
                let s = format!("({})/({})", text::format_poly(a, f), text::format_poly(b, f));
                let (pa, pb) = text::parse_rational(&s, f)?;
                if RealHandle::rational(&pa, &pb, f)?.rational_parts() != Some((a, b)) {
                    bad.push(format!("{s}: text round trip differs"));
                }
            }
        }
    }
    let detail = format!("{tested} convergent rows checked against series");
    Ok(Verdict::new(6, "continued fraction identities", bad, detail))
}

/// Criterion 7: Weyl sums are constant in `d` past `deg b`, and vanish for the golden
/// analog over `F_2`.
pub fn telescoping(p: &SuiteParams, d_max: usize) -> Result<Verdict> {
    let mut bad = Vec::new();
    let mut tested = 0;
    for f in &p.fields {
        for h in quadratic_corpus(f, p.seed, p.random)? {
            tested += 1;
            let r = telescoping_check(&h, None, d_max)?;
            if let Some(d) = r.mismatch {
                bad.push(format!("q={} {}: sum at d={d} differs from d={}", f.q(), h.describe(), r.delta));
            }
            for s in &r.sums {
                if s.total() != u64::from(f.q()).pow(s.d as u32 + 1) {
                    bad.push(format!("q={} {}: histogram total wrong at d={}", f.q(), h.describe(), s.d));
                }
            }
        }
        if f.q() == 2 {
            let g = RealHandle::quadratic(Poly::zero(), vec![], vec![Poly::t()], f)?;
            for d in 0..=d_max {
                if !weyl_sum(&g, &Poly::one(), d)?.is_zero() {
                    bad.push(format!("golden analog: sum at d={d} is not 0"));
                }
            }
        }
    }
    let detail = format!("{tested} handles, d <= {d_max}");
    Ok(Verdict::new(7, "Weyl sums telescope", bad, detail))
}

fn class_set(h: &RealHandle, n_max: usize, prec: i64) -> Result<BTreeSet<String>> {
    let ls = jqt_limit_set(h, n_max, prec)?;
    Ok(ls.values().iter().map(|v| v.render(h.field())).collect())
}

/// Criterion 8: Limit classes agree for `f`, `f + T`, `1/f` and `1/(f + T)`.
pub fn pgl_invariance(f: &FieldSpec, n_max: usize, prec: i64) -> Result<Verdict> {
    let p = |s: &str| text::parse_poly(s, f);
    let handles = vec![
        RealHandle::quadratic(Poly::zero(), vec![], vec![Poly::t()], f)?,
        RealHandle::quadratic(Poly::zero(), vec![], vec![p("T")?, p("T^2+1")?], f)?,
        RealHandle::quadratic(Poly::zero(), vec![], vec![p("T^2")?], f)?,
    ];
    let shift = Mobius::translation(Poly::t());
    let inv = Mobius::inversion();
    let maps = [("f+T", shift.clone()), ("1/f", inv.clone()), ("1/(f+T)", inv.compose(&shift, f))];
    let mut bad = Vec::new();
    for h in &handles {
        let base = class_set(h, n_max, prec)?;
        for (name, m) in &maps {
            let g = pgl_transform(h, m)?;
            let other = class_set(&g, n_max, prec)?;
            if other != base {
                bad.push(format!(
                    "{} under {name}: {} classes vs {}, {} shared",
                    h.describe(),
                    other.len(),
                    base.len(),
                    other.intersection(&base).count()
                ));
            }
        }
    }
    let detail = format!("{} handles x {} maps, P = {prec}, N_max = {n_max}", handles.len(), maps.len());
    Ok(Verdict::new(8, "PGL_2(A) invariance of limit classes", bad, detail))
}

/// Criterion 9: The explorer stabilizes at `N_max = 2·period + 6` and finite classes
/// have size `q^{2q-1}`.
pub fn limit_behavior(p: &SuiteParams) -> Result<Verdict> {
    let mut bad = Vec::new();
    let mut tested = 0;
    let mut multi = 0;
    let mut unstable = 0;
    for f in &p.fields {
        let want = 2 * f.q() as i64 - 1;
        for h in quadratic_corpus(f, p.seed, p.random)? {
            tested += 1;
            let n_max = 2 * h.cf().period().len() + 6;
            let ls = jqt_limit_set(&h, n_max, p.prec(f))?;
            if !ls.stabilized {
                unstable += 1;
                bad.push(format!("q={} {}: not stabilized at N_max = {n_max}", f.q(), h.describe()));
            }
            if ls.classes.len() >= 2 {
                multi += 1;
            }
            for c in &ls.classes {
                if let ClassValue::Finite(x) = &c.value {
                    let log = match x.abs() {
                        SeriesAbs::Known(a) => a.log(),
                        SeriesAbs::Indeterminate => None,
                    };
                    if log != Some(want) {
                        bad.push(format!(
                            "q={} {}: class of size q^{:?}, expected q^{want}",
                            f.q(),
                            h.describe(),
                            log
                        ));
                    }
                }
            }
        }
    }
    let detail = format!(
        "{tested} handles, {unstable} not stabilized, {multi} with >= 2 classes"
    );
    Ok(Verdict::new(9, "limit-set behavior", bad, detail))
}

/// Criterion 10: Recomputing at `P + 6` changes nothing at or above the old floor.
pub fn precision_soundness(p: &SuiteParams, spots: usize) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed.wrapping_add(10));
    let mut pool = Vec::new();
    for f in &p.fields {
        for h in quadratic_corpus(f, p.seed, p.random)? {
            pool.push(h);
        }
    }
    let mut bad = Vec::new();
    for _ in 0..spots {
        let h = &pool[rng.random_range(0..pool.len())];
        let f = h.field();
        let q = f.q() as u64;
        let sched = eps_schedule(h, 4)?;
        let e = sched[rng.random_range(0..sched.len())];
        let prec = rng.random_range(2 * q as i64..=p.prec(f));
        let (lo, hi, what) = match rng.random_range(0..3) {
            0 => (zeta_eps(h, e, q - 1, prec)?.value, zeta_eps(h, e, q - 1, prec + 6)?.value, "zeta(q-1)"),
            1 => (
                zeta_eps(h, e, q * q - 1, prec)?.value,
                zeta_eps(h, e, q * q - 1, prec + 6)?.value,
                "zeta(q^2-1)",
            ),
            _ => {
                let a = j_eps(h, e, prec)?;
                let b = j_eps(h, e, prec + 6)?;
                match (a.value, b.value) {
                    (JValue::Finite(x), JValue::Finite(y)) => (x, y, "j"),
                    _ => {
                        bad.push(format!("{} P={prec}: j not finite", at(h, e)));
                        continue;
                    }
                }
            }
        };
        if !hi.agrees_down_to(&lo, lo.floor())? {
            bad.push(format!("{} {what} P={prec}: coefficient changed at P+6", at(h, e)));
        }
    }
    let detail = format!("{spots} spot checks over {} handles", pool.len());
    Ok(Verdict::new(10, "precision soundness", bad, detail))
}

/// Every criterion over the given fields, with sizes scaled for the CLI.
pub fn run_suite(p: &SuiteParams) -> Result<Vec<Verdict>> {
    if let Some(prec) = p.prec {
        for f in &p.fields {
            if prec < crate::invariant::min_j_prec(f) {
                return Err(Error::PrecisionExhausted(format!(
                    "j_eps needs prec >= {} over F_{}",
                    crate::invariant::min_j_prec(f),
                    f.q()
                )));
            }
        }
    }
    let t = j_table(p)?;
    let mut out = vec![size_law(&t), j_tilde_unit(&t)?, rationality(p, &t)?];
    let small: Vec<FieldSpec> = p.fields.iter().filter(|f| f.q() <= 3).cloned().collect();
    let sp = SuiteParams { fields: small, ..p.clone() };
    out.push(basis_oracle(&sp, 3, 5)?);
    let f2: Vec<FieldSpec> = p.fields.iter().filter(|f| f.q() == 2).cloned().collect();
    out.push(vector_space(&SuiteParams { fields: f2, ..p.clone() }, 3, 5)?);
    out.push(cf_identities(p)?);
    out.push(telescoping(p, 8)?);
    let f0 = &p.fields[0];
    out.push(pgl_invariance(f0, 8, p.prec.unwrap_or(16))?);
    out.push(limit_behavior(p)?);
    out.push(precision_soundness(p, 100)?);
    Ok(out)
}
