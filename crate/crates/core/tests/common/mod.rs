//! Naive arithmetic over a prime field, independent of the library: dense
//! polynomials as `Vec<u32>` (ascending), and series in fixed point, where
//! the polynomial `X` stands for `X / T^K`.

#![allow(dead_code)]

#[derive(Clone, Copy, Debug)]
pub struct Fp {
    pub p: u32,
}

pub type P = Vec<u32>;

impl Fp {
    pub fn trim(&self, mut a: P) -> P {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn deg(&self, a: &P) -> i64 {
        a.len() as i64 - 1
    }

    pub fn add(&self, a: &P, b: &P) -> P {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        self.trim(out)
    }

    pub fn neg(&self, a: &P) -> P {
        a.iter().map(|&c| (self.p - c) % self.p).collect()
    }

    pub fn sub(&self, a: &P, b: &P) -> P {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &P, b: &P) -> P {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += (x * y) as u64;
            }
        }
        self.trim(out.into_iter().map(|c| (c % self.p as u64) as u32).collect())
    }

    pub fn pow(&self, a: &P, e: u64) -> P {
        let mut r = vec![1];
        for _ in 0..e {
            r = self.mul(&r, a);
        }
        r
    }

    fn inv(&self, c: u32) -> u32 {
        (1..self.p).find(|&x| x * c % self.p == 1).expect("nonzero")
    }

    pub fn divmod(&self, a: &P, b: &P) -> (P, P) {
        let b = self.trim(b.clone());
        let db = b.len() - 1;
        let li = self.inv(b[db]);
        let mut r = self.trim(a.clone());
        if r.len() < b.len() {
            return (vec![], r);
        }
        let mut q = vec![0u32; r.len() - db];
        while r.len() > db && !r.is_empty() {
            let s = r.len() - 1 - db;
            let c = r[r.len() - 1] * li % self.p;
            q[s] = c;
            for (i, &y) in b.iter().enumerate() {
                r[s + i] = (r[s + i] + self.p * self.p - c * y % self.p) % self.p;
            }
            r = self.trim(r);
        }
        (self.trim(q), r)
    }

    pub fn shift(&self, a: &P, k: usize) -> P {
        if a.is_empty() {
            return vec![];
        }
        let mut out = vec![0; k];
        out.extend_from_slice(a);
        out
    }

    /// `T^{q^k} - T`.
    pub fn bracket(&self, k: u32) -> P {
        let e = (self.p as usize).pow(k);
        let mut v = vec![0; e + 1];
        v[e] = 1;
        v[1] = self.p - 1;
        v
    }

    pub fn reduce(&self, coeffs: &[u32]) -> P {
        self.trim(coeffs.iter().map(|c| c % self.p).collect())
    }
}

/// Fixed-point series with `k` fractional places.
#[derive(Clone, Copy, Debug)]
pub struct Fixed {
    pub fp: Fp,
    pub k: usize,
}

impl Fixed {
    pub fn lift(&self, a: &P) -> P {
        self.fp.shift(a, self.k)
    }

    pub fn mul(&self, x: &P, y: &P) -> P {
        let z = self.fp.mul(x, y);
        if z.len() <= self.k {
            vec![]
        } else {
            z[self.k..].to_vec()
        }
    }

    pub fn mul_poly(&self, x: &P, a: &P) -> P {
        self.fp.mul(x, a)
    }

    /// `1 / x`, for `x` in fixed point.
    pub fn inv(&self, x: &P) -> P {
        let mut one = vec![0; 2 * self.k + 1];
        one[2 * self.k] = 1;
        self.fp.divmod(&one, x).0
    }

    /// `a / b` for polynomials.
    pub fn ratio(&self, a: &P, b: &P) -> P {
        self.fp.divmod(&self.fp.shift(a, self.k), b).0
    }

    /// Coefficient of `T^e`.
    pub fn coeff(&self, x: &P, e: i64) -> u32 {
        let i = e + self.k as i64;
        if i < 0 {
            return 0;
        }
        x.get(i as usize).copied().unwrap_or(0)
    }

    /// Exponent of the leading term.
    pub fn top(&self, x: &P) -> Option<i64> {
        let x = self.fp.trim(x.clone());
        (!x.is_empty()).then(|| x.len() as i64 - 1 - self.k as i64)
    }
}

/// `p_k / q_k` of `[a0; a1, a2, ...]` for the first `count` partials.
pub fn convergent(fp: Fp, a0: &P, partials: &[P]) -> (P, P) {
    let (mut p_prev, mut p) = (vec![1], a0.clone());
    let (mut q_prev, mut q) = (vec![], vec![1]);
    for a in partials {
        let np = fp.add(&fp.mul(a, &p), &p_prev);
        let nq = fp.add(&fp.mul(a, &q), &q_prev);
        p_prev = std::mem::replace(&mut p, np);
        q_prev = std::mem::replace(&mut q, nq);
    }
    (p, q)
}

/// Every monic polynomial of degree `<= d`.
pub fn monics(fp: Fp, d: usize) -> Vec<P> {
    let mut out = Vec::new();
    for deg in 0..=d {
        let count = (fp.p as usize).pow(deg as u32);
        for mut idx in 0..count {
            let mut v = Vec::with_capacity(deg + 1);
            for _ in 0..deg {
                v.push((idx % fp.p as usize) as u32);
                idx /= fp.p as usize;
            }
            v.push(1);
            out.push(v);
        }
    }
    out
}

/// Whether the coefficients of `λ f` at `T^{log ε}, …, T^{-1}` all vanish.
pub fn is_member(fx: Fixed, f_series: &P, lam: &P, log_eps: i64) -> bool {
    (log_eps..0).all(|k| {
        let s: u64 = lam
            .iter()
            .enumerate()
            .map(|(i, &c)| c as u64 * fx.coeff(f_series, k - i as i64) as u64)
            .sum();
        s.is_multiple_of(fx.fp.p as u64)
    })
}

/// Brute-force `g_ε`, `Δ_ε` from all monic members of degree `<= b`.
pub struct Brute {
    pub g: P,
    pub delta: P,
    pub z1: P,
    pub z2: P,
    pub members: usize,
    pub d0: i64,
    /// Below this exponent the truncation to degree `<= b` may matter.
    pub valid_g: i64,
    pub valid_delta: i64,
}

pub fn brute_force(fx: Fixed, f_series: &P, log_eps: i64, b: usize) -> Brute {
    let fp = fx.fp;
    let q = fp.p as u64;
    let mut z1 = vec![];
    let mut z2 = vec![];
    let mut members = 0;
    let mut d0 = i64::MAX;
    for lam in monics(fp, b) {
        if is_member(fx, f_series, &lam, log_eps) {
            members += 1;
            d0 = d0.min(fp.deg(&lam));
            z1 = fp.add(&z1, &fx.inv(&fx.lift(&fp.pow(&lam, q - 1))));
            z2 = fp.add(&z2, &fx.inv(&fx.lift(&fp.pow(&lam, q * q - 1))));
        }
    }
    let b1 = fx.lift(&fp.bracket(1));
    let b2 = fx.lift(&fp.bracket(2));
    let g = fp.neg(&fx.mul(&b1, &z1));
    let mut z1p = fx.lift(&vec![1]);
    for _ in 0..=q {
        z1p = fx.mul(&z1p, &z1);
    }
    let mut b1q = fx.lift(&vec![1]);
    for _ in 0..q {
        b1q = fx.mul(&b1q, &b1);
    }
    let delta = fp.add(&fp.neg(&fx.mul(&b2, &z2)), &fx.mul(&b1q, &z1p));
    let qi = q as i64;
    let omitted1 = -(qi - 1) * (b as i64 + 1);
    let omitted2 = -(qi * qi - 1) * (b as i64 + 1);
    let valid_g = qi + omitted1;
    let z1_top = -(qi - 1) * d0;
    let valid_delta = (qi * qi + omitted2).max(qi * qi + qi * z1_top + omitted1);
    Brute { g, delta, z1, z2, members, d0, valid_g, valid_delta }
}
