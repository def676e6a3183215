use num_bigint::BigInt;
use num_rational::BigRational;
use tticad::parse::poly;
use tticad::realalg::*;
use tticad::uroots;

fn sqrt2() -> Coord {
    let mut r = roots_over(&mut [], &poly("x^2-2", "x")).unwrap();
    r.pop().unwrap()
}

#[test]
fn univariate_isolation_matches_sturm() {
    for src in ["16x^4-16x^2+1", "x^2+1", "x^3-x", "(x-1)^2*(x+2)*(3x-1)", "x^5-3x+1"] {
        let p = poly(src, "x");
        let d = uroots::to_dense(&p);
        let (_, roots) = uroots::isolate(&d);
        assert_eq!(roots.len(), uroots::sturm_count(&d), "{src}");
    }
    let r = roots_over(&mut [], &poly("(x-1)^2*(x+2)*(3x-1)", "x")).unwrap();
    assert_eq!(r.len(), 3);
    assert!(r[0].bounds().0 <= BigRational::from_integer(BigInt::from(-2)));
}

#[test]
fn signs_over_algebraic_point() {
    let mut pt = vec![sqrt2()];
    assert_eq!(sign_at(&mut pt, &poly("x^2-2", "x")), 0);
    assert_eq!(sign_at(&mut pt, &poly("x-1", "x")), 1);
    assert_eq!(sign_at(&mut pt, &poly("10x-15", "x")), -1);
    let ys = roots_over(&mut pt, &poly("y^2-x^2", "x,y")).unwrap();
    assert_eq!(ys.len(), 2);
    let mut full = pt.clone();
    full.push(ys[1].clone());
    assert_eq!(sign_at(&mut full, &poly("y-x", "x,y")), 0);
    assert_eq!(sign_at(&mut full, &poly("y+x", "x,y")), 1);
    assert_eq!(sign_at(&mut full, &poly("y^2-2", "x,y")), 0);
    // y^2 = x has two irrational roots +-2^(1/4)
    let ys = roots_over(&mut pt, &poly("y^2-x", "x,y")).unwrap();
    assert_eq!(ys.len(), 2);
    // x*y - 2 over sqrt2: y = sqrt2
    let ys = roots_over(&mut pt, &poly("(x*y-2)*(y-x)", "x,y")).unwrap();
    assert_eq!(ys.len(), 1);
    // nullified
    assert!(matches!(roots_over(&mut pt, &poly("(x^2-2)*y", "x,y")), Err(Nullified)));
}

#[test]
fn rational_root_over_algebraic_point() {
    let mut pt = vec![sqrt2()];
    let ys = roots_over(&mut pt, &poly("(y-1)*(y^2-x^2-1)", "x,y")).unwrap();
    assert_eq!(ys.len(), 3);
    assert!(ys[1].is_rational());
    let mut ys = ys;
    let s = stack_samples(&mut pt, &mut ys);
    assert_eq!(s.len(), 7);
}

#[test]
fn merge_dedupes() {
    let mut pt = vec![sqrt2()];
    let mut a = roots_over(&mut pt, &poly("y^2-2", "x,y")).unwrap();
    a.extend(roots_over(&mut pt, &poly("y-x", "x,y")).unwrap());
    a.extend(roots_over(&mut pt, &poly("y", "x,y")).unwrap());
    let m = merge_roots(&mut pt, a);
    assert_eq!(m.len(), 3);
}

#[test]
fn simplest() {
    let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    assert_eq!(simplest_between(&q(1, 3), &q(1, 2)), q(2, 5));
    assert_eq!(simplest_between(&q(-1, 3), &q(1, 2)), q(0, 1));
    assert_eq!(simplest_between(&q(3, 1), &q(7, 2)), q(10, 3));
    assert_eq!(simplest_between(&q(-7, 2), &q(-3, 1)), q(-10, 3));
}
