use num_bigint::BigInt;
use proptest::prelude::*;
use tticad::parse::poly;
use tticad::projection::{normalize, squarefree_basis};
use tticad::realalg::{compare, roots_over, Coord};
use tticad::Poly;

fn arb_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((0u32..3, 0u32..3, -4i64..=4), 1..5).prop_map(|ts| {
        let src: Vec<String> = ts.iter().map(|(a, b, c)| format!("({})*x^{}*y^{}", c, a, b)).collect();
        poly(&src.join("+"), "x,y")
    })
}

fn arb_univariate() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-5i64..=5, 2..6).prop_map(|cs| {
        Poly::from_coeffs(0, cs.into_iter().map(|c| Poly::Const(BigInt::from(c))).collect())
    })
}

#[test]
fn arithmetic_basics() {
    let v = "x,y";
    let p = poly("(x+y)^2", v);
    assert_eq!(p, poly("x^2+2*x*y+y^2", v));
    assert_eq!(p.degree(0), 2);
    assert_eq!(p.derivative(1), poly("2*x+2*y", v));
    assert_eq!(p.div_exact(&poly("x+y", v)), Some(poly("x+y", v)));
    assert_eq!(p.div_exact(&poly("x-y", v)), None);
    assert_eq!(poly("6*x^2*y-4*x*y", v).canonical(), poly("3*x^2*y-2*x*y", v));
    assert_eq!(poly("-x+1", v).canonical(), poly("x-1", v));
    assert_eq!(poly("x^2 y + x y^2", v).content(1), poly("x", v));
}

proptest! {
    #[test]
    fn canonical_idempotent(p in arb_poly()) {
        let c = p.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        if !p.is_zero() {
            prop_assert!(p.div_exact(&c).map_or(false, |q| q.is_const()));
        }
    }

    #[test]
    fn gcd_divides_both(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        let (a, b) = (&a * &c, &b * &c);
        prop_assume!(!a.is_zero() && !b.is_zero());
        let g = a.gcd(&b);
        prop_assert!(a.div_exact(&g).is_some());
        prop_assert!(b.div_exact(&g).is_some());
        if !c.is_zero() {
            prop_assert!(g.div_exact(&c.canonical()).is_some());
        }
    }

    #[test]
    fn resultant_antisymmetry(a in arb_poly(), b in arb_poly()) {
        let (da, db) = (a.degree(1), b.degree(1));
        let r = a.resultant(&b, 1);
        let s = b.resultant(&a, 1);
        if (da * db) % 2 == 1 {
            prop_assert_eq!(r, -s);
        } else {
            prop_assert_eq!(r, s);
        }
    }

    #[test]
    fn basis_is_coprime_and_covers(ps in prop::collection::vec(arb_poly(), 1..4), c in arb_poly()) {
        let ps: Vec<Poly> = ps
            .into_iter()
            .map(|p| &p * &c)
            .filter_map(|p| p.mvar().map(|v| p.prim(v)))
            .collect();
        let b = squarefree_basis(&ps);
        for (i, x) in b.iter().enumerate() {
            for y in &b[i + 1..] {
                prop_assert!(x.gcd(y).is_const());
            }
            prop_assert!(ps.iter().any(|p| p.div_exact(x).is_some()));
        }
        // every input is a product of basis elements up to multiplicity and constants
        for p in &ps {
            let mut rest = normalize(&p.squarefree_part());
            for x in &b {
                if let Some(r) = rest.as_ref().and_then(|r| r.div_exact(x)) {
                    rest = normalize(&r);
                }
            }
            prop_assert!(rest.is_none(), "{:?} not covered", p);
        }
    }

    #[test]
    fn compare_is_total_order(p in arb_univariate(), q in arb_univariate()) {
        let mut pts: Vec<Coord> = Vec::new();
        for f in [&p, &q] {
            if !f.is_const() {
                pts.extend(roots_over(&mut [], f).unwrap());
            }
        }
        pts.push(Coord::int(0));
        pts.push(Coord::int(-1));
        use std::cmp::Ordering::*;
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let (mut a, mut b) = (pts[i].clone(), pts[j].clone());
                let ab = compare(&mut [], &mut a, &mut b);
                let ba = compare(&mut [], &mut b, &mut a);
                prop_assert_eq!(ab, ba.reverse());
                if i == j {
                    prop_assert_eq!(ab, Equal);
                }
                for k in 0..pts.len() {
                    let mut c = pts[k].clone();
                    let bc = compare(&mut [], &mut b, &mut c);
                    if ab == Less && bc == Less {
                        prop_assert_eq!(compare(&mut [], &mut a, &mut c), Less);
                    }
                }
            }
        }
    }
}
