//! Discriminant, `g` and the j-invariant of `Λ_ε(f)`, and the set of values
//! `j_ε` accumulates at as ε shrinks.

use serde_json::{json, Value};

use crate::cf::{HandleKind, RealHandle};
use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::laurent::{LaurentSeries, SeriesAbs};
use crate::lattice::{eps_schedule, lambda_basis, lambda_member_oracle, lambda_span, rational_len, EpsIndex};
use crate::poly::Poly;
use crate::zeta::{zeta_eps, ZetaValue};

/// `[k] = T^{q^k} - T`.
pub fn bracket(k: u32, f: &FieldSpec) -> Poly {
    let e = f.q().pow(k) as usize;
    Poly::monomial(FieldElem::ONE, e).sub(&Poly::t(), f)
}

/// `Δ_ε` and `g_ε` with the zeta values they came from.
#[derive(Clone, Debug)]
pub struct DeltaG {
    pub delta: LaurentSeries,
    pub g: LaurentSeries,
    pub z1: ZetaValue,
    pub z2: ZetaValue,
}

/// `g = -[1] ζ(q-1)` and `Δ = -[2] ζ(q²-1) + [1]^q ζ(q-1)^{q+1}`.
pub fn delta_g_eps(h: &RealHandle, e: EpsIndex, prec: i64) -> Result<DeltaG> {
    let f = h.field();
    let q = f.q() as u64;
    let z1 = zeta_eps(h, e, q - 1, prec)?;
    let z2 = zeta_eps(h, e, q * q - 1, prec)?;
    Ok(delta_g_from(&z1, &z2, f))
}

fn delta_g_from(z1: &ZetaValue, z2: &ZetaValue, f: &FieldSpec) -> DeltaG {
    let q = f.q() as u64;
    let b1 = bracket(1, f);
    let b2 = bracket(2, f);
    let g = z1.value.mul_poly(&b1, f).neg(f);
    let delta = z2
        .value
        .mul_poly(&b2, f)
        .neg(f)
        .add(&z1.value.pow(q + 1, f).mul_poly(&b1.pow(q as u32, f), f), f);
    DeltaG {
        delta,
        g,
        z1: z1.clone(),
        z2: z2.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JValue {
    Finite(LaurentSeries),
    /// `Δ_ε = 0`. Certified when the lattice is known to be the rank-one
    /// ideal `bA`; otherwise `Δ_ε` merely vanished to working precision.
    Infinity { certified: bool },
}

#[derive(Clone, Debug)]
pub struct JResult {
    pub eps: EpsIndex,
    pub log_eps: i64,
    /// Requested precision.
    pub prec: i64,
    /// Precision the zeta values were finally computed at.
    pub work_prec: i64,
    pub value: JValue,
    /// Floor of `Δ_ε` at the last attempt; for an uncertified infinity this
    /// is how far down `Δ_ε` was seen to vanish.
    pub delta_floor: i64,
    /// Whether `1/(1/[1] - J_ε)` reproduced the value on their common
    /// coefficients; `None` when that route had no certain coefficient.
    pub identity_ok: Option<bool>,
}

impl JResult {
    pub fn is_infinite(&self) -> bool {
        matches!(self.value, JValue::Infinity { .. })
    }

    pub fn finite(&self) -> Option<&LaurentSeries> {
        match &self.value {
            JValue::Finite(x) => Some(x),
            JValue::Infinity { .. } => None,
        }
    }

    /// `log_q |j_ε|` for a finite value.
    pub fn abs_log(&self) -> Option<i64> {
        match self.finite()?.abs() {
            SeriesAbs::Known(a) => a.log(),
            SeriesAbs::Indeterminate => None,
        }
    }

    pub fn to_json(&self, h: &RealHandle) -> Value {
        let f = h.field();
        let (kind, certified, value) = match &self.value {
            JValue::Finite(x) => ("finite", true, x.to_json(f)),
            JValue::Infinity { certified } => ("infinity", *certified, Value::Null),
        };
        json!({
            "eps": self.eps.to_json(h),
            "kind": kind,
            "certified": certified,
            "abs_log": self.abs_log(),
            "value": value,
            "text": self.render(f),
            "prec": self.prec,
            "work_prec": self.work_prec,
            "delta_floor": self.delta_floor,
            "identity_ok": self.identity_ok,
        })
    }

    pub fn render(&self, f: &FieldSpec) -> String {
        match &self.value {
            JValue::Finite(x) => x.render(f),
            JValue::Infinity { certified: true } => "inf".to_string(),
            JValue::Infinity { certified: false } => {
                format!("inf (uncertified, Delta = O(T^{}))", self.delta_floor - 1)
            }
        }
    }
}

/// `J̃_ε = ζ(q²-1) / ζ(q-1)^{q+1}`.
pub fn j_tilde(z1: &ZetaValue, z2: &ZetaValue, f: &FieldSpec, min_floor: i64) -> Result<LaurentSeries> {
    let q = f.q() as u64;
    let den = z1.value.pow(q + 1, f).inv(f, min_floor)?;
    Ok(z2.value.mul(&den, f))
}

/// Smallest precision accepted by [`j_eps`].
pub fn min_j_prec(f: &FieldSpec) -> i64 {
    2 * f.q() as i64
}

/// Largest working precision [`j_eps`] escalates to.
pub fn max_j_work(prec: i64) -> i64 {
    16 * prec + 256
}

/// `j_ε = g_ε^{q+1} / Δ_ε`.
///
/// The leading terms of `Δ_ε` cancel by an amount that depends on the
/// lattice, so the zeta values are recomputed at doubled precision until
/// `Δ_ε` keeps `prec - q + 1` certain coefficients below its leading one
/// (and `j_ε` with it), or [`max_j_work`] is reached.
pub fn j_eps(h: &RealHandle, e: EpsIndex, prec: i64) -> Result<JResult> {
    let f = h.field();
    let q = f.q() as i64;
    let log_eps = e.log_eps(h)?;
    if prec < min_j_prec(f) {
        return Err(Error::precision(format!(
            "j needs prec >= {} over F_{q}",
            min_j_prec(f)
        )));
    }
    let ideal_index = rational_len(h).is_some_and(|m| e.n >= m);
    let target = prec - q + 1;
    let mut work = prec;
    let mut dg = delta_g_eps(h, e, work)?;
    loop {
        let rel = dg.delta.top().map_or(-1, |t| t - dg.delta.floor());
        if rel >= target || work >= max_j_work(prec) || (ideal_index && dg.delta.top().is_none()) {
            break;
        }
        let next = (2 * work).min(max_j_work(prec));
        match delta_g_eps(h, e, next) {
            Ok(d) => dg = d,
            Err(Error::InsufficientTerms { .. }) | Err(Error::PrecisionExhausted(_)) => break,
            Err(err) => return Err(err),
        }
        work = next;
    }
    let mut out = JResult {
        eps: e,
        log_eps,
        prec,
        work_prec: work,
        value: JValue::Infinity { certified: false },
        delta_floor: dg.delta.floor(),
        identity_ok: None,
    };
    if dg.delta.top().is_none() {
        if ideal_index {
            out.value = JValue::Infinity {
                certified: ideal_certificate(h, e)?,
            };
        }
        return Ok(out);
    }
    let g_pow = dg.g.pow(q as u64 + 1, f);
    let d_inv = dg.delta.inv(f, dg.delta.floor())?;
    let j = g_pow.mul(&d_inv, f);
    out.identity_ok = identity_check(&j, &dg, f)?;
    // report exactly `target` coefficients below the leading one, so that
    // raising `prec` only ever extends the value
    out.value = JValue::Finite(j.relative(target));
    Ok(out)
}

/// Checks `Λ_ε = bA` against the membership oracle for all `λ` of degree
/// up to `deg b + 2`.
fn ideal_certificate(h: &RealHandle, e: EpsIndex) -> Result<bool> {
    let HandleKind::Rational { b, .. } = h.kind() else {
        return Ok(false);
    };
    let f = h.field();
    let bound = b.deg_i() + 2;
    let basis = lambda_basis(h, e, bound)?;
    let mut spanned = lambda_span(&basis, bound, f);
    let mut oracle = lambda_member_oracle(h, e, bound)?;
    spanned.sort_by_key(|p| p.coeffs().iter().map(|c| c.index()).collect::<Vec<_>>());
    oracle.sort_by_key(|p| p.coeffs().iter().map(|c| c.index()).collect::<Vec<_>>());
    let ideal = spanned.iter().all(|p| p.divmod(b, f).map(|(_, r)| r.is_zero()).unwrap_or(false));
    Ok(ideal && spanned == oracle)
}

fn identity_check(j: &LaurentSeries, dg: &DeltaG, f: &FieldSpec) -> Result<Option<bool>> {
    let q = f.q() as u64;
    let b1 = LaurentSeries::from_poly(&bracket(1, f));
    let b2 = bracket(2, f);
    let min_floor = j.floor().min(dg.delta.floor()) - 2 * (q * q) as i64 - 8;
    let jt = j_tilde(&dg.z1, &dg.z2, f, min_floor)?;
    let inv1 = b1.inv(f, min_floor)?;
    let inv1q = b1.pow(q + 1, f).inv(f, min_floor)?;
    let inner = inv1.sub(&inv1q.mul_poly(&b2, f).mul(&jt, f), f);
    let j2 = match inner.inv(f, min_floor) {
        Ok(x) => x,
        Err(Error::PrecisionExhausted(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let down = j.floor().max(j2.floor());
    if j.top().is_some_and(|t| t < down) {
        return Ok(None);
    }
    j.agrees_down_to(&j2, down).map(Some)
}

/// One accumulation value of `j_ε` and the breakpoints that realise it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitClass {
    pub value: ClassValue,
    pub indices: Vec<EpsIndex>,
}

/// A value of `j_ε` reduced to the reporting precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassValue {
    Finite(LaurentSeries),
    Infinity,
}

impl ClassValue {
    pub fn render(&self, f: &FieldSpec) -> String {
        match self {
            ClassValue::Finite(x) => x.render(f),
            ClassValue::Infinity => "inf".to_string(),
        }
    }

    pub fn to_json(&self, f: &FieldSpec) -> Value {
        match self {
            ClassValue::Finite(x) => json!({"kind": "finite", "series": x.to_json(f), "text": x.render(f)}),
            ClassValue::Infinity => json!({"kind": "infinity"}),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LimitSet {
    /// Values taken in the last full period of the schedule.
    pub classes: Vec<LimitClass>,
    /// Values seen earlier that do not recur.
    pub transient: Vec<LimitClass>,
    pub prec: i64,
    pub n_max: usize,
    pub period: usize,
    /// The last two periods agree index by index and lie past the
    /// preperiod.
    pub stabilized: bool,
}

impl LimitSet {
    pub fn values(&self) -> Vec<&ClassValue> {
        self.classes.iter().map(|c| &c.value).collect()
    }

    pub fn to_json(&self, h: &RealHandle) -> Value {
        let f = h.field();
        let class = |c: &LimitClass| {
            json!({
                "value": c.value.to_json(f),
                "indices": c.indices.iter().map(|e| json!([e.n, e.l])).collect::<Vec<_>>(),
            })
        };
        json!({
            "prec": self.prec,
            "n_max": self.n_max,
            "period": self.period,
            "stabilized": self.stabilized,
            "classes": self.classes.iter().map(class).collect::<Vec<_>>(),
            "transient": self.transient.iter().map(class).collect::<Vec<_>>(),
        })
    }
}

/// Working precision used for each `j_ε` so that coefficients down to
/// `T^{-prec}` are determined.
pub fn limit_work_prec(prec: i64, f: &FieldSpec) -> i64 {
    prec + 3 * f.q() as i64
}

/// The values `j_ε` takes over the schedule up to `n_max`, grouped into
/// classes that agree down to `T^{-prec}`.
pub fn jqt_limit_set(h: &RealHandle, n_max: usize, prec: i64) -> Result<LimitSet> {
    let f = h.field();
    let (period, pre) = match h.kind() {
        HandleKind::Truncated(_) => {
            return Err(Error::domain("limit sets need a rational or quadratic handle"))
        }
        HandleKind::Rational { .. } => (1, rational_len(h).unwrap_or(0)),
        HandleKind::QuadraticCf => (h.cf().period().len(), h.cf().preperiod().len()),
    };
    let work = limit_work_prec(prec, f);
    let schedule = eps_schedule(h, n_max)?;
    let mut values: Vec<(EpsIndex, ClassValue)> = Vec::with_capacity(schedule.len());
    for e in schedule {
        let mut r = j_eps(h, e, work)?;
        // |j_ε| varies with the lattice, so the absolute floor may need
        // more precision than the default margin.
        while let Some(x) = r.finite() {
            if x.floor() <= -prec || r.prec >= max_j_work(work) {
                break;
            }
            let more = r.prec + (x.floor() + prec) + f.q() as i64;
            r = j_eps(h, e, more)?;
        }
        let v = match r.value {
            JValue::Finite(x) => {
                if x.floor() > -prec {
                    return Err(Error::precision(format!(
                        "j at ({}, {}) only known down to T^{}",
                        e.n,
                        e.l,
                        x.floor()
                    )));
                }
                ClassValue::Finite(x.truncate(-prec).inexact())
            }
            JValue::Infinity { .. } => ClassValue::Infinity,
        };
        values.push((e, v));
    }
    let last_start = (n_max + 1).saturating_sub(period);
    let mut classes: Vec<LimitClass> = Vec::new();
    let mut transient: Vec<LimitClass> = Vec::new();
    for (e, v) in &values {
        if e.n < last_start {
            continue;
        }
        if !classes.iter().any(|c| &c.value == v) {
            classes.push(LimitClass {
                value: v.clone(),
                indices: Vec::new(),
            });
        }
    }
    for (e, v) in &values {
        if let Some(c) = classes.iter_mut().find(|c| &c.value == v) {
            c.indices.push(*e);
        } else if let Some(c) = transient.iter_mut().find(|c| &c.value == v) {
            c.indices.push(*e);
        } else {
            transient.push(LimitClass {
                value: v.clone(),
                indices: vec![*e],
            });
        }
    }
    let stabilized = n_max + 1 >= 2 * period && last_start >= period + pre && {
        values.iter().filter(|(e, _)| e.n >= last_start).all(|(e, v)| {
            values
                .iter()
                .find(|(o, _)| o.n + period == e.n && o.l == e.l)
                .is_some_and(|(_, w)| w == v)
        })
    };
    Ok(LimitSet {
        classes,
        transient,
        prec,
        n_max,
        period,
        stabilized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_poly;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    #[test]
    fn brackets() {
        let f = FieldSpec::prime(3).unwrap();
        assert_eq!(bracket(1, &f), parse_poly("T^3-T", &f).unwrap());
        assert_eq!(bracket(2, &f), parse_poly("T^9-T", &f).unwrap());
    }

    #[test]
    fn golden_j_is_constant_along_the_schedule() {
        let f = f2();
        let h = RealHandle::quadratic(Poly::zero(), vec![], vec![Poly::t()], &f).unwrap();
        let first = j_eps(&h, EpsIndex::new(1, 1), 16).unwrap();
        for n in 1..5 {
            let r = j_eps(&h, EpsIndex::new(n, 1), 16).unwrap();
            assert_eq!(r.identity_ok, Some(true));
            assert_eq!(r.abs_log(), first.abs_log(), "N = {n}");
        }
    }

    #[test]
    fn small_precision_is_refused() {
        let f = f2();
        let h = RealHandle::quadratic(Poly::zero(), vec![], vec![Poly::t()], &f).unwrap();
        assert!(matches!(j_eps(&h, EpsIndex::new(1, 1), 3), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn rational_tail_is_certified_infinity() {
        let f = f2();
        let a = parse_poly("T+1", &f).unwrap();
        let b = parse_poly("T^2+T+1", &f).unwrap();
        let h = RealHandle::rational(&a, &b, &f).unwrap();
        let m = rational_len(&h).unwrap();
        let r = j_eps(&h, EpsIndex::new(m + 1, 1), 8).unwrap();
        assert_eq!(r.value, JValue::Infinity { certified: true });
    }
}
