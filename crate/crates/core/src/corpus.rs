//! Seeded test corpus: quadratic handles with short periods and small
//! partial quotients, and random rationals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cf::RealHandle;
use crate::field::{FieldElem, FieldSpec};
use crate::poly::Poly;
use crate::text::parse_poly;
use crate::Result;

pub const DEFAULT_SEED: u64 = 2024;

/// Random polynomial of exact degree `d`.
fn random_poly(rng: &mut ChaCha8Rng, d: usize, f: &FieldSpec) -> Poly {
    let q = f.q();
    let mut c: Vec<FieldElem> = (0..d)
        .map(|_| f.elem(rng.random_range(0..q)).expect("index below q"))
        .collect();
    c.push(f.elem(rng.random_range(1..q)).expect("index below q"));
    Poly::from_coeffs(c)
}

fn fixed(f: &FieldSpec) -> Vec<(&'static str, Vec<&'static str>, Vec<&'static str>)> {
    match f.q() {
        2 => vec![
            ("0", vec![], vec!["T"]),
            ("0", vec![], vec!["T", "T+1"]),
            ("T", vec![], vec!["T+1"]),
            ("0", vec![], vec!["T", "T^2+1"]),
            ("1", vec!["T^2"], vec!["T^2+T", "T"]),
            ("0", vec![], vec!["T^2"]),
            ("0", vec![], vec!["T^2+T", "T^2+1"]),
        ],
        3 => vec![
            ("0", vec![], vec!["T"]),
            ("0", vec![], vec!["T", "2*T^2+1"]),
            ("T", vec![], vec!["T^2+2"]),
        ],
        _ => vec![("0", vec![], vec!["T"]), ("0", vec![], vec!["T^2", "T+1"])],
    }
}

/// Quadratic handles: a few fixed expansions (period patterns of degree
/// `{1}`, `{1,2}`, `{2,2}`) followed by `random` seeded ones with period
/// length at most 3 and partial quotients of degree at most 2.
pub fn quadratic_corpus(f: &FieldSpec, seed: u64, random: usize) -> Result<Vec<RealHandle>> {
    let p = |s: &str| parse_poly(s, f);
    let mut out = Vec::new();
    for (a0, pre, per) in fixed(f) {
        let pre = pre.into_iter().map(p).collect::<Result<Vec<_>>>()?;
        let per = per.into_iter().map(p).collect::<Result<Vec<_>>>()?;
        out.push(RealHandle::quadratic(p(a0)?, pre, per, f)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(f.q()));
    for _ in 0..random {
        let a0 = if rng.random_bool(0.5) { Poly::zero() } else { random_poly(&mut rng, 1, f) };
        let pre_len = rng.random_range(0..=1);
        let per_len = rng.random_range(1..=3);
        let mut part = |n: usize| -> Vec<Poly> {
            (0..n)
                .map(|_| {
                    let d = rng.random_range(1..=2);
                    random_poly(&mut rng, d, f)
                })
                .collect()
        };
        let pre = part(pre_len);
        let per = part(per_len);
        out.push(RealHandle::quadratic(a0, pre, per, f)?);
    }
    Ok(out)
}

/// Random rationals `a/b` with `deg a, deg b <= max_deg` and `deg b >= 1`.
pub fn rational_corpus(f: &FieldSpec, seed: u64, count: usize, max_deg: usize) -> Result<Vec<RealHandle>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31) ^ u64::from(f.q()));
    let mut out = Vec::new();
    while out.len() < count {
        let da = rng.random_range(0..=max_deg);
        let db = rng.random_range(1..=max_deg);
        let a = random_poly(&mut rng, da, f);
        let b = random_poly(&mut rng, db, f);
        let h = RealHandle::rational(&a, &b, f)?;
        // skip fractions that collapse into A
        if h.rational_parts().is_some_and(|(_, b)| b.degree() != Some(0)) {
            out.push(h);
        }
    }
    Ok(out)
}
