use proptest::prelude::*;

use jqt_core::lattice::{eps_schedule, lambda_basis, lambda_member_oracle, lambda_span};
use jqt_core::{
    char_exponent, pgl_transform, weyl_sum, zeta_eps, FieldSpec, LaurentSeries, Mobius, Poly, RealHandle,
};

fn field(q: u32) -> FieldSpec {
    FieldSpec::with_order(q).unwrap()
}

fn poly(c: &[u32], f: &FieldSpec) -> Poly {
    Poly::from_coeffs(c.iter().map(|&i| f.elem(i % f.q()).unwrap()).collect())
}

fn nonconstant(c: &[u32], f: &FieldSpec) -> Poly {
    let mut v: Vec<u32> = c.iter().map(|&i| i % f.q()).collect();
    if v.is_empty() {
        v.push(0);
    }
    v.push(1);
    poly(&v, f)
}

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..4, 0..=max_len)
}

/// `[a0; | p1, p2]` from coefficient vectors, with `p1`, `p2` of positive degree.
fn quadratic(a0: &[u32], p1: &[u32], p2: &[u32], f: &FieldSpec) -> RealHandle {
    RealHandle::quadratic(poly(a0, f), vec![], vec![nonconstant(p1, f), nonconstant(p2, f)], f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mobius_action_matches_series(
        q in prop::sample::select(vec![2u32, 3, 4]),
        a0 in coeffs(2), p1 in coeffs(2), p2 in coeffs(2), shift in coeffs(2),
    ) {
        let f = field(q);
        let h = quadratic(&a0, &p1, &p2, &f);
        let a = poly(&shift, &f);
        let m = Mobius::inversion().compose(&Mobius::translation(a.clone()), &f);
        let g = pgl_transform(&h, &m).unwrap();
        let x = h.to_laurent(30).unwrap();
        let y = x.add(&LaurentSeries::from_poly(&a), &f);
        let want = y.inv(&f, -30).unwrap();
        let got = g.to_laurent(20).unwrap();
        prop_assert!(got.agrees_down_to(&want, -20).unwrap());
    }

    #[test]
    fn char_exponent_is_additive(
        q in prop::sample::select(vec![2u32, 3, 4]),
        a0 in coeffs(2), p1 in coeffs(2), p2 in coeffs(2), b1 in coeffs(3), b2 in coeffs(3),
    ) {
        let f = field(q);
        let x = quadratic(&a0, &p1, &p2, &f).to_laurent(8).unwrap();
        let (b1, b2) = (nonconstant(&b1, &f), nonconstant(&b2, &f));
        let s = b1.add(&b2, &f);
        prop_assume!(!s.is_zero());
        let p = f.p();
        let lhs = char_exponent(&x, &s, &f).unwrap();
        let rhs = (char_exponent(&x, &b1, &f).unwrap() + char_exponent(&x, &b2, &f).unwrap()) % p;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn weyl_histogram_counts_every_multiplier(
        q in prop::sample::select(vec![2u32, 3, 4]),
        a0 in coeffs(2), p1 in coeffs(2), p2 in coeffs(2), b in coeffs(2), d in 0usize..4,
    ) {
        let f = field(q);
        let h = quadratic(&a0, &p1, &p2, &f);
        let s = weyl_sum(&h, &nonconstant(&b, &f), d).unwrap();
        prop_assert_eq!(s.total(), (q as u64).pow(d as u32 + 1));
        prop_assert_eq!(s.histogram.len(), f.p() as usize);
        prop_assert!(s.normalized_magnitude <= 1.0 + 1e-12);
    }

    #[test]
    fn convergent_error_matches_next_denominator(
        q in prop::sample::select(vec![2u32, 3, 4]),
        a0 in coeffs(2), p1 in coeffs(2), p2 in coeffs(2), n in 0usize..6,
    ) {
        let f = field(q);
        let h = quadratic(&a0, &p1, &p2, &f);
        let x = h.to_laurent(60).unwrap();
        let r = h.row(n).unwrap();
        let next = h.row(n + 1).unwrap();
        let e = x.mul_poly(&r.q, &f).sub(&LaurentSeries::from_poly(&r.q_perp), &f);
        prop_assert_eq!(e.top(), Some(-next.deg));
        prop_assert_eq!(h.error(n).unwrap().log(), Some(-next.deg));
    }

    #[test]
    fn basis_span_equals_membership(
        q in prop::sample::select(vec![2u32, 3]),
        num in coeffs(4), den in coeffs(4), pick in any::<prop::sample::Index>(),
    ) {
        let f = field(q);
        let den = nonconstant(&den, &f);
        let num = poly(&num, &f);
        let h = RealHandle::rational(&num, &den, &f).unwrap();
        let sched = eps_schedule(&h, 4).unwrap();
        prop_assume!(!sched.is_empty());
        let e = sched[pick.index(sched.len())];
        let basis = lambda_basis(&h, e, 4).unwrap();
        let mut span = lambda_span(&basis, 4, &f);
        let mut oracle = lambda_member_oracle(&h, e, 4).unwrap();
        span.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
        oracle.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
        prop_assert_eq!(span, oracle);
    }

    #[test]
    fn more_precision_only_extends_zeta(
        q in prop::sample::select(vec![2u32, 3]),
        a0 in coeffs(2), p1 in coeffs(2), p2 in coeffs(2), pick in any::<prop::sample::Index>(),
        prec in 4i64..14,
    ) {
        let f = field(q);
        let h = quadratic(&a0, &p1, &p2, &f);
        let sched = eps_schedule(&h, 3).unwrap();
        let e = sched[pick.index(sched.len())];
        let n = q as u64 - 1;
        let lo = zeta_eps(&h, e, n, prec).unwrap().value;
        let hi = zeta_eps(&h, e, n, prec + 6).unwrap().value;
        prop_assert!(hi.agrees_down_to(&lo, lo.floor()).unwrap());
    }
}
