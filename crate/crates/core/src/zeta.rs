//! Zeta sums over monic lattice elements, `Σ λ^{-n}`.
//!
//! The sum is grouped by the top basis vector `b_t` of each monic element
//! `λ = b_t + Σ_{i<t} c_i b_i`, `D = deg b_t`. Down to an absolute floor
//! `F`, `λ^{-n} = T^{-nD} (1 + u)^{-n}` depends only on the `R = -nD - F`
//! coefficients of `λ` just below `T^D`. A lower basis vector of degree
//! `< D - R` never touches that window, so summing over its coefficient
//! multiplies the group by q, which is zero in characteristic p. Only
//! groups whose lower vectors all reach the window survive, and those are
//! summed exactly.

use serde_json::{json, Value};

use crate::cf::RealHandle;
use crate::error::Result;
use crate::field::{FieldElem, FieldSpec};
use crate::laurent::{series_inverse, LaurentSeries};
use crate::lattice::{lambda_basis, rational_len, EpsIndex};
use crate::poly::Poly;

/// An ε-zeta value (or `ζ_A` when `eps` is `None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaValue {
    pub value: LaurentSeries,
    pub n: u64,
    pub eps: Option<EpsIndex>,
    /// Coefficients tracked below the leading exponent `-n deg q̄_N`.
    pub prec: i64,
    /// Every omitted contribution is bounded by `q^{tail_bound_log}`.
    pub tail_bound_log: i64,
}

impl ZetaValue {
    pub fn to_json(&self, f: &FieldSpec) -> Value {
        json!({
            "n": self.n,
            "prec": self.prec,
            "tail_bound_log": self.tail_bound_log,
            "value": self.value.to_json(f),
        })
    }
}

fn mul_trunc(a: &[FieldElem], b: &[FieldElem], len: usize, f: &FieldSpec) -> Vec<FieldElem> {
    let mut out = vec![FieldElem::ZERO; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

fn pow_trunc(a: &[FieldElem], mut e: u64, len: usize, f: &FieldSpec) -> Vec<FieldElem> {
    let mut acc = vec![FieldElem::ZERO; len];
    acc[0] = FieldElem::ONE;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_trunc(&acc, &base, len, f);
        }
        e >>= 1;
        if e > 0 {
            base = mul_trunc(&base, &base, len, f);
        }
    }
    acc
}

/// `Σ λ^{-n}` over the monic F_q-combinations of `basis`, reported down to
/// the absolute exponent `floor`.
///
/// Same contract as [`lattice_zeta_enum`], computed in closed form per
/// group: with `V_t = span(b_0, ..., b_{t-1})` and the subspace polynomial
/// `P_t(X) = Π_{v ∈ V_t} (X - v) = Σ a_i X^{q^i}`, the reciprocals of the
/// coset `b_t + V_t` are the roots of a polynomial whose only elementary
/// symmetric functions below degree `q^t` are `e_{q^i} = ± a_i / P_t(b_t)`.
/// Newton's identities then give the power sums directly.
pub fn lattice_zeta(basis: &[Poly], n: u64, floor: i64, f: &FieldSpec) -> LaurentSeries {
    assert!(n >= 1);
    let Some(d0) = basis.first().map(|b| b.deg_i()) else {
        return LaurentSeries::zero();
    };
    let top = -(n as i64) * d0;
    if top < floor {
        return LaurentSeries::indeterminate(floor);
    }
    let mut rel = top - floor + 4;
    while rel <= 1 << 12 {
        let z = subspace_sums(basis, n, floor, rel, f);
        if z.floor() <= floor {
            return z.truncate(floor);
        }
        rel *= 2;
    }
    lattice_zeta_enum(basis, n, floor, f)
}

fn subspace_sums(basis: &[Poly], n: u64, floor: i64, rel: i64, f: &FieldSpec) -> LaurentSeries {
    let q = f.q() as u64;
    let mut powers = vec![1u64];
    while powers.last().unwrap() * q <= n {
        powers.push(powers.last().unwrap() * q);
    }
    let mut a: Vec<LaurentSeries> = vec![LaurentSeries::zero(); powers.len()];
    a[0] = LaurentSeries::monomial(FieldElem::ONE, 0);
    let mut e: Vec<LaurentSeries> = basis
        .iter()
        .map(|b| LaurentSeries::from_poly(b).relative(rel))
        .collect();
    // For t >= 1 every `a_i / P_t(b_t)` lies below `T^{-q^t}`, so the
    // group sum does too and nothing past `q^t > -floor` is visible.
    let mut groups = 1;
    let mut qt = q as i64;
    while groups < basis.len() && qt <= -floor {
        groups += 1;
        qt = qt.saturating_mul(q as i64);
    }
    e.truncate(groups);
    let mut acc = LaurentSeries::zero();
    for t in 0..groups {
        if -(n as i64) * basis[t].deg_i() < floor {
            break;
        }
        let c = &e[t];
        let ct = c.top().expect("basis vectors are independent");
        let ci = match c.inv(f, -ct - rel) {
            Ok(x) => x,
            Err(_) => return LaurentSeries::indeterminate(0),
        };
        let r: Vec<LaurentSeries> = a.iter().map(|ai| ai.mul(&ci, f)).collect();
        let mut p: Vec<LaurentSeries> = Vec::with_capacity(n as usize + 1);
        p.push(LaurentSeries::zero());
        for k in 1..=n {
            let mut s = if k == 1 { r[0].clone() } else { LaurentSeries::zero() };
            for (i, &qi) in powers.iter().enumerate() {
                if qi < k && !r[i].is_zero() {
                    s = s.add(&r[i].mul(&p[(k - qi) as usize], f), f);
                }
            }
            p.push(s);
        }
        acc = acc.add(&p[n as usize], f);
        let w = c.pow(q - 1, f).relative(rel);
        for s in e.iter_mut().skip(t + 1) {
            *s = s.frobenius(f).sub(&w.mul(s, f), f).relative(rel);
        }
        let prev = a.clone();
        for i in 0..a.len() {
            let mut x = w.mul(&prev[i], f).neg(f);
            if i > 0 {
                x = x.add(&prev[i - 1].frobenius(f), f);
            }
            a[i] = x.relative(rel);
        }
    }
    acc
}

/// `Σ λ^{-n}` over the monic F_q-combinations of `basis`, reported down to
/// the absolute exponent `floor`, by enumerating the surviving groups.
///
/// `basis` must consist of monic polynomials of strictly increasing degree
/// and contain every basis vector of degree `<= (d0 - floor) / (n + 1)`,
/// `d0` the smallest degree; groups above that degree vanish above the
/// floor.
pub fn lattice_zeta_enum(basis: &[Poly], n: u64, floor: i64, f: &FieldSpec) -> LaurentSeries {
    assert!(n >= 1);
    let n_i = n as i64;
    let degs: Vec<i64> = basis.iter().map(|b| b.deg_i()).collect();
    let Some(&d0) = degs.first() else {
        return LaurentSeries::zero();
    };
    let top = -n_i * d0;
    if top < floor {
        return LaurentSeries::indeterminate(floor);
    }
    let mut acc = vec![FieldElem::ZERO; (top - floor + 1) as usize];
    for (t, &d) in degs.iter().enumerate() {
        let r = -n_i * d - floor;
        if r < 0 {
            break;
        }
        if d0 < d - r {
            continue;
        }
        let len = r as usize + 1;
        // window[k] = coefficient of T^{d-k}
        let window = |p: &Poly| -> Vec<FieldElem> {
            (0..len)
                .map(|k| {
                    let e = d - k as i64;
                    if e < 0 {
                        FieldElem::ZERO
                    } else {
                        p.coeff(e as usize)
                    }
                })
                .collect()
        };
        let lower: Vec<Vec<FieldElem>> = basis[..t].iter().map(window).collect();
        let mut group = vec![FieldElem::ZERO; len];
        let start = window(&basis[t]);
        dfs(&lower, start, n, f, &mut group);
        let off = (top - (-n_i * d)) as usize;
        for (k, c) in group.into_iter().enumerate() {
            acc[off + k] = f.add(acc[off + k], c);
        }
    }
    acc.reverse();
    LaurentSeries::from_terms(
        &acc.iter()
            .enumerate()
            .map(|(i, &c)| (floor + i as i64, c))
            .collect::<Vec<_>>(),
        Some(floor),
        f,
    )
    .expect("terms lie above the floor")
}

fn dfs(lower: &[Vec<FieldElem>], cur: Vec<FieldElem>, n: u64, f: &FieldSpec, out: &mut [FieldElem]) {
    match lower.split_last() {
        None => {
            let len = cur.len();
            let inv = series_inverse(&cur, len, f);
            let term = pow_trunc(&inv, n, len, f);
            for (o, c) in out.iter_mut().zip(term) {
                *o = f.add(*o, c);
            }
        }
        Some((v, rest)) => {
            for c in f.elements() {
                let next: Vec<FieldElem> = if c.is_zero() {
                    cur.clone()
                } else {
                    cur.iter().zip(v).map(|(&x, &y)| f.add(x, f.mul(c, y))).collect()
                };
                dfs(rest, next, n, f, out);
            }
        }
    }
}

/// Degree of the lowest nonzero element of `Λ_ε`, i.e. `deg q̄_N`.
pub fn min_degree(h: &RealHandle, e: EpsIndex) -> Result<i64> {
    e.log_eps(h)?;
    match rational_len(h) {
        Some(m) if e.n >= m => h.deg_sum(m),
        _ => h.deg_sum(e.n),
    }
}

/// `ζ_{f,ε}(n) = Σ λ^{-n}` over nonzero monic `λ ∈ Λ_ε(f)`, known to `prec`
/// coefficients below its leading term `T^{-n deg q̄_N}`.
pub fn zeta_eps(h: &RealHandle, e: EpsIndex, n: u64, prec: i64) -> Result<ZetaValue> {
    let f = h.field();
    let d0 = min_degree(h, e)?;
    let floor = -(n as i64 * d0 + prec);
    let deg_bound = (d0 - floor) / (n as i64 + 1);
    let basis = lambda_basis(h, e, deg_bound)?;
    let polys: Vec<Poly> = basis.entries.iter().map(|b| b.poly.clone()).collect();
    Ok(ZetaValue {
        value: lattice_zeta(&polys, n, floor, f),
        n,
        eps: Some(e),
        prec,
        tail_bound_log: floor - 1,
    })
}

/// `ζ_A(n) = Σ a^{-n}` over monic `a ∈ A`, down to `T^{-prec}`.
pub fn zeta_a(n: u64, prec: i64, f: &FieldSpec) -> ZetaValue {
    let deg_bound = prec.max(0) / (n as i64 + 1);
    let basis: Vec<Poly> = (0..=deg_bound as usize)
        .map(|k| Poly::monomial(FieldElem::ONE, k))
        .collect();
    ZetaValue {
        value: lattice_zeta(&basis, n, -prec, f),
        n,
        eps: None,
        prec,
        tail_bound_log: -prec - 1,
    }
}

/// `ζ_{F_q}(n) = Σ_{c ∈ F_q^×} c^{-n}`.
pub fn zeta_fq(n: i64, f: &FieldSpec) -> FieldElem {
    f.units().fold(FieldElem::ZERO, |acc, c| {
        f.add(acc, f.pow(c, -n).expect("units are invertible"))
    })
}
