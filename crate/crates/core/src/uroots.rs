//! Real root isolation for integer univariate polynomials (Descartes / VCA
//! bisection) plus a Sturm-sequence counter kept for cross-checking.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dyadic::Dyadic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum URoot {
    Exact(BigRational),
    /// Exactly one root in the open interval; the reduced polynomial is nonzero
    /// at both endpoints.
    Open(Dyadic, Dyadic),
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.len() > 1 && p.last().map_or(false, Zero::is_zero) {
        p.pop();
    }
    p
}

fn sign_variations(p: &[BigInt]) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for c in p {
        let s = if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

/// `p(x + 1)` in place, ascending coefficients.
fn taylor_shift1(p: &mut [BigInt]) {
    let n = p.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = p[j + 1].clone();
            p[j] += t;
        }
    }
}

/// Number of sign variations of `(x+1)^n p(1/(x+1))`, bounding the roots in (0,1).
fn descartes01(p: &[BigInt]) -> usize {
    let mut q: Vec<BigInt> = p.iter().rev().cloned().collect();
    taylor_shift1(&mut q);
    sign_variations(&q)
}

/// Divide by `(x - 1)`, assuming it is a factor.
fn deflate_at_one(p: &[BigInt]) -> Vec<BigInt> {
    let n = p.len() - 1;
    let mut q = vec![BigInt::zero(); n];
    let mut acc = BigInt::zero();
    for i in (0..n).rev() {
        acc += &p[i + 1];
        q[i] = acc.clone();
    }
    q
}

/// Roots of `p` in `(c/2^k, (c+1)/2^k)`, where `p` is the original polynomial
/// rescaled so that interval maps to `(0,1)`.
fn vca(p: Vec<BigInt>, c: BigInt, k: i64, out: &mut Vec<(BigInt, i64, bool)>) {
    if p.len() <= 1 {
        return;
    }
    let v = descartes01(&p);
    if v == 0 {
        return;
    }
    if v == 1 {
        out.push((c, k, false));
        return;
    }
    let n = p.len() - 1;
    // left half: 2^n p(x/2)
    let left: Vec<BigInt> = p.iter().enumerate().map(|(i, a)| a << (n - i)).collect();
    let mut right = left.clone();
    taylor_shift1(&mut right);
    let c2 = &c << 1usize;
    if right[0].is_zero() {
        // the midpoint itself is a root
        vca(deflate_at_one(&left), c2.clone(), k + 1, out);
        out.push((&c2 + 1u32, k + 1, true));
        vca(right[1..].to_vec(), &c2 + 1u32, k + 1, out);
    } else {
        vca(left, c2.clone(), k + 1, out);
        vca(right, c2 + 1u32, k + 1, out);
    }
}

fn bound_exp(p: &[BigInt]) -> i64 {
    let n = p.len() - 1;
    let lead = p[n].bits() as i64;
    let mx = p[..n].iter().map(|c| c.bits() as i64).max().unwrap_or(0);
    (mx - lead + 2).max(1)
}

/// Positive roots of `p` (with `p(0) != 0`), as (numerator, k, exact) over 2^(k-s).
fn positive_roots(p: &[BigInt]) -> Vec<URoot> {
    let s = bound_exp(p);
    // q(x) = p(2^s x)
    let q: Vec<BigInt> = p.iter().enumerate().map(|(i, a)| a << (s as usize * i)).collect();
    let mut raw = Vec::new();
    vca(q, BigInt::zero(), 0, &mut raw);
    raw.into_iter()
        .map(|(c, k, exact)| {
            let lo = Dyadic::new(c.clone(), s - k);
            if exact {
                URoot::Exact(lo.to_rational())
            } else {
                URoot::Open(lo, Dyadic::new(c + 1u32, s - k))
            }
        })
        .collect()
}

/// Squarefree part of an integer polynomial (ascending coefficients).
pub fn squarefree(p: &[BigInt]) -> Vec<BigInt> {
    let poly = crate::poly::Poly::from_coeffs(0, p.iter().cloned().map(crate::poly::Poly::Const).collect());
    let s = poly.squarefree_part();
    to_dense(&s)
}

pub fn to_dense(p: &crate::poly::Poly) -> Vec<BigInt> {
    match p {
        crate::poly::Poly::Const(c) => vec![c.clone()],
        crate::poly::Poly::Rec(_, cs) => cs
            .iter()
            .map(|c| c.as_const().cloned().expect("univariate polynomial"))
            .collect(),
    }
}

/// Isolate all real roots of `p`. Returns the roots in increasing order
/// together with the squarefree polynomial left after dividing out every
/// exact rational root found; open intervals isolate roots of that polynomial.
pub fn isolate(p: &[BigInt]) -> (Vec<BigInt>, Vec<URoot>) {
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return (p, Vec::new());
    }
    let mut sq = squarefree(&p);
    let mut roots = Vec::new();
    let zero_root = sq[0].is_zero();
    if zero_root {
        sq.remove(0);
    }
    let neg: Vec<BigInt> = sq
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
        .collect();
    let mut nroots: Vec<URoot> = positive_roots(&neg)
        .into_iter()
        .map(|r| match r {
            URoot::Exact(x) => URoot::Exact(-x),
            URoot::Open(a, b) => URoot::Open(b.neg(), a.neg()),
        })
        .collect();
    nroots.reverse();
    roots.extend(nroots);
    if zero_root {
        roots.push(URoot::Exact(BigRational::zero()));
    }
    roots.extend(positive_roots(&sq));
    let mut reduced = sq;
    for r in &roots {
        if let URoot::Exact(x) = r {
            if x.is_zero() {
                continue;
            }
            // divide by (den x - num)
            reduced = divide_linear(&reduced, x.numer(), x.denom());
        }
    }
    (reduced, roots)
}

fn divide_linear(p: &[BigInt], num: &BigInt, den: &BigInt) -> Vec<BigInt> {
    // Synthetic division by (den*x - num); exact by construction.
    let n = p.len() - 1;
    let mut q = vec![BigInt::zero(); n];
    let mut rem = BigInt::zero();
    for i in (0..n).rev() {
        let cur = &p[i + 1] + &rem;
        let (qi, r) = cur.div_rem(den);
        debug_assert!(r.is_zero());
        q[i] = qi;
        rem = &q[i] * num;
    }
    let g = q.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in q.iter_mut() {
            *c = &*c / &g;
        }
    }
    q
}

pub fn eval_frac_sign(p: &[BigInt], num: &BigInt, den: &BigInt) -> i8 {
    let n = p.len() - 1;
    let mut acc = p[n].clone();
    let mut dp = BigInt::one();
    for i in (0..n).rev() {
        dp *= den;
        acc = acc * num + &p[i] * &dp;
    }
    match acc.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
    }
}

/// Number of distinct real roots via a Sturm sequence (test oracle).
pub fn sturm_count(p: &[BigInt]) -> usize {
    use crate::poly::Poly;
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return 0;
    }
    let f = Poly::from_coeffs(0, p.iter().cloned().map(Poly::Const).collect());
    let f = f.squarefree_part();
    let mut seq = vec![f.clone(), f.derivative(0)];
    while seq[seq.len() - 1].degree(0) > 0 {
        let a = &seq[seq.len() - 2];
        let b = &seq[seq.len() - 1];
        let mut r = a.prem(b, 0);
        let e = a.degree(0) - b.degree(0) + 1;
        if e % 2 == 1 && b.lbc().is_negative() {
            r = -r;
        }
        r = -r;
        if r.is_zero() {
            break;
        }
        let c = r.int_content();
        seq.push(r.div_exact(&Poly::Const(c)).expect("content divides"));
    }
    let at = |neg: bool| -> usize {
        let signs: Vec<BigInt> = seq
            .iter()
            .map(|q| {
                let d = q.degree(0);
                let lc = q.lbc().clone();
                if neg && d % 2 == 1 {
                    -lc
                } else {
                    lc
                }
            })
            .collect();
        sign_variations(&signs)
    };
    at(true) - at(false)
}
