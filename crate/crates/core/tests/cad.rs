use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tticad::cad::*;
use tticad::parse::poly;
use tticad::projection::Projector;
use tticad::qff::{self, family, QffList, Scheme};
use tticad::realalg::{compare, Coord};

fn fixture(name: &str) -> QffList {
    let path = format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name);
    qff::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn cad(q: &QffList, s: Scheme) -> Cad {
    let mut c = build(q, s, &Projector::default(), &Sequential).unwrap();
    c.evaluate(q, &Sequential);
    c
}

/// Stacks partition their parents, indices are 1..=2k+1 in order, and sample
/// coordinates strictly increase along each stack.
fn check_cylindrical(c: &Cad) {
    for k in 0..c.nvars() {
        let cells = &c.levels[k];
        let mut groups: BTreeMap<Option<usize>, Vec<usize>> = BTreeMap::new();
        for (i, cell) in cells.iter().enumerate() {
            assert_eq!(cell.index.len(), k + 1);
            groups.entry(cell.parent).or_default().push(i);
        }
        if k > 0 {
            let covered: usize = groups.values().map(Vec::len).sum();
            assert_eq!(covered, cells.len());
            for (p, parent) in c.levels[k - 1].iter().enumerate() {
                let kids = &groups[&Some(p)];
                assert_eq!(parent.children, kids[0]..kids[kids.len() - 1] + 1);
                assert_eq!(&cells[kids[0]].index[..k], &parent.index[..]);
            }
        }
        for kids in groups.values() {
            assert_eq!(kids.len() % 2, 1);
            for (j, &i) in kids.iter().enumerate() {
                assert_eq!(cells[i].index[k] as usize, j + 1);
            }
            for w in kids.windows(2) {
                let mut lower = cells[w[0]].sample[..k].to_vec();
                let mut a = cells[w[0]].sample[k].clone();
                let mut b = cells[w[1]].sample[k].clone();
                assert_eq!(compare(&mut lower, &mut a, &mut b), std::cmp::Ordering::Less);
            }
        }
    }
}

#[test]
fn cylindrical_on_examples() {
    for (f, s) in [("phi.qff", Scheme::Tti), ("phi.qff", Scheme::Sign), ("spheres.qff", Scheme::Tti), ("exclp.qff", Scheme::Tti)] {
        check_cylindrical(&cad(&fixture(f), s));
    }
}

#[test]
fn cylindrical_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..15 {
        let mut src = String::from("vars x, y;\n");
        for _ in 0..2 {
            let c: Vec<i32> = (0..6).map(|_| rng.gen_range(-3..=3)).collect();
            src.push_str(&format!(
                "[ec] {}*x^2 + {}*x*y + y^2 + {}*x + {} = 0 /\\ {}*y - x + {} > 0;\n",
                c[0], c[1], c[2], c[3], c[4], c[5]
            ));
        }
        let q = qff::parse(&src).unwrap();
        for s in [Scheme::Tti, Scheme::Sign] {
            if let Ok(c) = build(&q, s, &Projector::default(), &Sequential) {
                check_cylindrical(&c);
            }
        }
    }
}

#[test]
fn deterministic_and_order_insensitive() {
    let phi = fixture("phi.qff");
    let a = cad(&phi, Scheme::Tti);
    let b = cad(&phi, Scheme::Tti);
    assert_eq!(a.level_counts(), b.level_counts());
    assert_eq!(a.truth_buckets(), b.truth_buckets());
    // permuting the conjuncts inside each formula changes nothing
    let swapped = qff::parse(
        "vars x, y;\n[ec] x^2 + y^2 - 1 = 0 /\\ x*y - 1/4 < 0;\n(x-4)*(y-1) - 1/4 < 0 /\\ [ec] (x-4)^2 + (y-1)^2 - 1 = 0;",
    )
    .unwrap();
    let c = cad(&swapped, Scheme::Tti);
    assert_eq!(c.level_counts(), a.level_counts());
    assert_eq!(c.truth_buckets(), a.truth_buckets());
}

#[test]
fn monotone_across_schemes() {
    for j in 2..=3 {
        let q = family(j, false);
        let t = build(&q, Scheme::Tti, &Projector::default(), &Sequential).unwrap().leaves().len();
        let e = build(&q, Scheme::Ec, &Projector::default(), &Sequential).unwrap().leaves().len();
        let s = build(&q, Scheme::Sign, &Projector::default(), &Sequential).unwrap().leaves().len();
        assert!(t <= e && e <= s, "{} {} {}", t, e, s);
    }
}

#[test]
fn rescad_matches_tticad() {
    let phi = fixture("phi.qff");
    let r = cad(&phi, Scheme::ResCad);
    let t = cad(&phi, Scheme::Tti);
    assert_eq!(r.leaves().len(), 105);
    assert_eq!(r.truth_buckets(), t.truth_buckets());
}

#[test]
fn truth_buckets_sum_to_leaves() {
    let c = cad(&fixture("psi.qff"), Scheme::Tti);
    assert_eq!(c.truth_buckets().values().sum::<usize>(), c.leaves().len());
}

#[test]
fn failures_carry_a_witness() {
    let q = fixture("tti_fail.qff");
    let f = build(&q, Scheme::Tti, &Projector::default(), &Sequential).unwrap_err();
    assert_eq!(f.kind, FailKind::TtiNotWellOriented);
    assert_eq!(f.level, 3);
    assert_eq!(f.cell.len(), 3);
    assert_eq!(f.poly, poly("z+y*w", "x,y,z,w"));
    // the sign-invariant construction has no such restriction here
    assert!(build(&q, Scheme::Sign, &Projector::default(), &Sequential).is_ok());

    let q = qff::parse("vars x, y, z, w, v;\nx*v + y*w + z < 0;").unwrap();
    let f = build(&q, Scheme::Sign, &Projector::default(), &Sequential).unwrap_err();
    assert_eq!(f.kind, FailKind::NotWellOriented);
    assert!(f.to_string().contains("not well oriented"));
}

#[test]
fn locate_finds_samples() {
    let c = cad(&fixture("spheres.qff"), Scheme::Tti);
    for (i, leaf) in c.leaves().iter().enumerate().step_by(7) {
        assert_eq!(c.locate(&leaf.sample), Some(i));
    }
    // a rational point off every sample still lands in exactly one leaf
    let r = |a: i64, b: i64| Coord::Rat(BigRational::new(a.into(), b.into()));
    let pt = vec![r(1, 3), r(1, 5), r(-7, 9)];
    assert!(c.locate(&pt).is_some());
}

#[test]
fn univariate_problem() {
    let q = qff::parse("vars x;\n[ec] x^2 - 2 = 0;\nx^3 - x > 0;").unwrap();
    let c = cad(&q, Scheme::Sign);
    assert_eq!(c.level_counts(), [11]);
    let t = cad(&q, Scheme::Tti);
    assert!(t.leaves().len() <= 11);
}

#[test]
fn split_cubics_beat_merged() {
    let q = fixture("cubics.qff");
    let tti = cad(&q, Scheme::Tti);
    assert_eq!(tti.level_counts(), vec![7, 31]);
    // the merged EC has 6 base roots, so at least 7*5 + 6*3 = 53 cells
    let ec = build(&q, Scheme::Ec, &Projector::default(), &Sequential).unwrap();
    assert_eq!(ec.level_counts(), vec![13, 61]);
    let qe = q.merged();
    let ndrr_split = qff::ndrr(&qff::projection_levels(&q, Scheme::Tti, &Projector::default())[0]);
    let ndrr_merged = qff::ndrr(&qff::projection_levels(&qe, Scheme::Ec, &Projector::default())[0]);
    assert!(ndrr_split < ndrr_merged, "{} vs {}", ndrr_split, ndrr_merged);
}
