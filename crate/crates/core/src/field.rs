//! Finite fields F_q, q = p^r, in a power basis over F_p.
//!
//! Elements are stored as their coordinate vector packed into one integer,
//! `index = c_0 + c_1 p + ... + c_{r-1} p^{r-1}`, so the natural order on
//! indices is the order on coordinate vectors used by every enumeration in
//! the crate. All arithmetic goes through precomputed tables owned by a
//! shared [`FieldSpec`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_ORDER: u32 = 1024;

/// An element of F_q, meaningful only together with its [`FieldSpec`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// Packed coordinate index in `[0, q)`.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Unchecked construction from a packed index known to be below q.
    pub(crate) fn from_raw(index: u32) -> FieldElem {
        FieldElem(index)
    }

    pub fn is_one(self) -> bool {
        self.0 == 1
    }
}

struct Tables {
    p: u32,
    r: u32,
    q: u32,
    /// Monic modulus over F_p, ascending coefficients, length r + 1.
    modulus: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    trace: Vec<u16>,
}

/// A validated finite field F_{p^r} with its arithmetic tables.
///
/// Cloning is cheap (the tables are shared).
#[derive(Clone)]
pub struct FieldSpec(Arc<Tables>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.modulus == other.0.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec(F_{}", self.q())?;
        if self.r() > 1 {
            write!(f, ", modulus {}", self.modulus_text())?;
        }
        write!(f, ")")
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomial helpers over F_p, ascending coefficients, used only to
// validate moduli and build the multiplication table.

fn fp_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut a = fp_trim(a.to_vec());
    let m = fp_trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = fp_inv(m[dm], p);
    while a.len() > dm {
        let da = a.len() - 1;
        let c = a[da] * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            let k = da - dm + i;
            a[k] = (a[k] + p * p - c * mi % p) % p;
        }
        a = fp_trim(a);
    }
    a
}

fn fp_inv(a: u32, p: u32) -> u32 {
    // p is small; Fermat.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn fp_is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    // Trial division by every monic polynomial of degree 1..=deg/2.
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                cand.push((x % p as u64) as u32);
                x /= p as u64;
            }
            cand.push(1);
            if fp_rem(m, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn default_modulus(p: u32, r: u32) -> Vec<u32> {
    // Least monic irreducible by packed index of the non-leading coefficients.
    let count = (p as u64).pow(r);
    for idx in 0..count {
        let mut m = Vec::with_capacity(r as usize + 1);
        let mut x = idx;
        for _ in 0..r {
            m.push((x % p as u64) as u32);
            x /= p as u64;
        }
        m.push(1);
        if m[0] != 0 && fp_is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    /// Builds F_{p^r}. For `r > 1` a monic degree-`r` modulus over F_p may be
    /// supplied (ascending coefficients); otherwise the least monic
    /// irreducible by packed coefficient index is used.
    pub fn new(p: u32, r: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if r == 0 {
            return Err(Error::InvalidField("extension degree r must be >= 1".into()));
        }
        let q = (p as u64).checked_pow(r).filter(|&q| q <= MAX_ORDER as u64);
        let q = match q {
            Some(q) => q as u32,
            None => {
                return Err(Error::InvalidField(format!(
                    "field order {p}^{r} exceeds the supported maximum {MAX_ORDER}"
                )))
            }
        };
        let modulus = match (r, modulus) {
            (1, None) => vec![0, 1],
            (1, Some(_)) => {
                return Err(Error::InvalidField(
                    "a modulus is only meaningful for r > 1".into(),
                ))
            }
            (_, None) => default_modulus(p, r),
            (_, Some(m)) => {
                let m: Vec<u32> = fp_trim(m.iter().map(|c| c % p).collect());
                if m.len() != r as usize + 1 {
                    return Err(Error::InvalidField(format!(
                        "modulus must have degree {r}, got {}",
                        m.len() as i64 - 1
                    )));
                }
                let lead_inv = fp_inv(m[r as usize], p);
                let m: Vec<u32> = m.iter().map(|c| c * lead_inv % p).collect();
                if !fp_is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus { p });
                }
                m
            }
        };
        Ok(FieldSpec(Arc::new(build_tables(p, r, q, modulus))))
    }

    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// F_q for a prime power q with the default modulus.
    pub fn with_order(q: u32) -> Result<Self> {
        let (p, r) = split_prime_power(q)?;
        Self::new(p, r, None)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn r(&self) -> u32 {
        self.0.r
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Monic modulus, ascending coefficients over F_p.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn modulus_text(&self) -> String {
        let mut terms = Vec::new();
        for (k, &c) in self.0.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            terms.push(match (c, k) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        terms.join("+")
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// Element with the given packed index.
    pub fn elem(&self, index: u32) -> Result<FieldElem> {
        if index < self.q() {
            Ok(FieldElem(index))
        } else {
            Err(Error::InvalidField(format!(
                "index {index} out of range for F_{}",
                self.q()
            )))
        }
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p() as i64) as u32)
    }

    /// Element from coordinates in the power basis; coordinates are reduced mod p.
    pub fn from_coords(&self, coords: &[i64]) -> Result<FieldElem> {
        if coords.len() > self.r() as usize {
            return Err(Error::InvalidField(format!(
                "expected at most {} coordinates, got {}",
                self.r(),
                coords.len()
            )));
        }
        let p = self.p() as i64;
        let mut idx = 0u32;
        for &c in coords.iter().rev() {
            idx = idx * self.p() + c.rem_euclid(p) as u32;
        }
        Ok(FieldElem(idx))
    }

    pub fn coords(&self, a: FieldElem) -> Vec<u32> {
        let mut x = a.0;
        (0..self.r())
            .map(|_| {
                let c = x % self.p();
                x /= self.p();
                c
            })
            .collect()
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.q()).map(FieldElem)
    }

    /// The nonzero elements in index order.
    pub fn units(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (1..self.q()).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.0.add[(a.0 * self.0.q + b.0) as usize] as u32)
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.0.neg[a.0 as usize] as u32)
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.0.mul[(a.0 * self.0.q + b.0) as usize] as u32)
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(FieldElem(self.0.inv[a.0 as usize] as u32))
        }
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`; negative exponents go through the inverse.
    pub fn pow(&self, a: FieldElem, e: i64) -> Result<FieldElem> {
        let base = if e < 0 { self.inv(a)? } else { a };
        let mut e = e.unsigned_abs();
        let mut acc = FieldElem::ONE;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Absolute trace F_q -> F_p, `c + c^p + ... + c^{p^{r-1}}`.
    #[inline]
    pub fn trace(&self, a: FieldElem) -> u32 {
        self.0.trace[a.0 as usize] as u32
    }
}

/// Splits a prime power into `(p, r)`.
pub fn split_prime_power(q: u32) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::InvalidField(format!("{q} is not a prime power")));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
    let (mut x, mut r) = (q, 0);
    while x % p == 0 {
        x /= p;
        r += 1;
    }
    if x != 1 {
        return Err(Error::InvalidField(format!("{q} is not a prime power")));
    }
    Ok((p, r))
}

fn build_tables(p: u32, r: u32, q: u32, modulus: Vec<u32>) -> Tables {
    let qs = q as usize;
    let coords = |x: u32| -> Vec<u32> {
        let mut x = x;
        (0..r)
            .map(|_| {
                let c = x % p;
                x /= p;
                c
            })
            .collect()
    };
    let pack = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &c| acc * p + c) };

    let mut add = vec![0u16; qs * qs];
    let mut mul = vec![0u16; qs * qs];
    let mut neg = vec![0u16; qs];
    for a in 0..q {
        let ca = coords(a);
        neg[a as usize] = pack(&ca.iter().map(|&c| (p - c) % p).collect::<Vec<_>>()) as u16;
        for b in 0..q {
            let cb = coords(b);
            let s: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
            add[(a * q + b) as usize] = pack(&s) as u16;
            let mut prod = vec![0u32; 2 * r as usize];
            for (i, x) in ca.iter().enumerate() {
                for (j, y) in cb.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let mut red = fp_rem(&prod, &modulus, p);
            red.resize(r as usize, 0);
            mul[(a * q + b) as usize] = pack(&red) as u16;
        }
    }
    let mut inv = vec![0u16; qs];
    for a in 1..q {
        let b = (1..q)
            .find(|&b| mul[(a * q + b) as usize] == 1)
            .expect("nonzero elements of a field are invertible");
        inv[a as usize] = b as u16;
    }
    let mut trace = vec![0u16; qs];
    for a in 0..q {
        let mut acc = 0u32;
        let mut x = a;
        for _ in 0..r {
            acc = add[(acc * q + x) as usize] as u32;
            // x <- x^p
            let mut y = 1u32;
            for _ in 0..p {
                y = mul[(y * q + x) as usize] as u32;
            }
            x = y;
        }
        debug_assert!(acc < p, "trace must land in the prime field");
        trace[a as usize] = acc as u16;
    }
    Tables {
        p,
        r,
        q,
        modulus,
        add,
        mul,
        neg,
        inv,
        trace,
    }
}
