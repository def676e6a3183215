//! Sample points with real algebraic coordinates.
//!
//! A point is a tower: coordinate `k` is either rational or a root of a
//! polynomial in `x_0..x_k` that is squarefree once the lower coordinates are
//! substituted, isolated by a dyadic interval. Signs are decided by interval
//! evaluation; when an interval keeps straddling zero we fall back to an exact
//! test (gcd with the defining polynomial over the lower point), so no answer
//! ever depends on numerical luck.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dyadic::{eval_interval, Dyadic, Interval};
use crate::poly::Poly;
use crate::uroots::{self, URoot};

/// Interval rounds tried before the exact zero test kicks in.
pub const ZERO_TEST_AFTER: usize = 2;

#[derive(Clone, Debug)]
pub struct Alg {
    /// Defining polynomial with main variable equal to this coordinate's index.
    pub poly: Arc<Poly>,
    pub lo: Dyadic,
    pub hi: Dyadic,
    /// Sign of the defining polynomial at `lo` (over the lower point).
    pub sign_lo: i8,
}

#[derive(Clone, Debug)]
pub enum Coord {
    Rat(BigRational),
    Alg(Alg),
}

impl Coord {
    pub fn int(n: i64) -> Coord {
        Coord::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Coord::Rat(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coord::Rat(r) => Some(r),
            Coord::Alg(_) => None,
        }
    }

    /// Closed rational enclosure of the value.
    pub fn bounds(&self) -> (BigRational, BigRational) {
        match self {
            Coord::Rat(r) => (r.clone(), r.clone()),
            Coord::Alg(a) => (a.lo.to_rational(), a.hi.to_rational()),
        }
    }

    /// Approximate value for display.
    pub fn approx(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (ratio_to_f64(&lo) + ratio_to_f64(&hi)) / 2.0
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    // Scale to keep ~60 significant bits without relying on std float parsing.
    let n = r.numer();
    let d = r.denom();
    let shift = (n.bits() as i64 - d.bits() as i64) - 60;
    let (n2, d2) = if shift > 0 {
        (n.clone(), d << shift as usize)
    } else {
        (n << (-shift) as usize, d.clone())
    };
    let q = n2 / d2;
    let qf = bigint_to_f64(&q);
    qf * libm_exp2(shift)
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    let neg = n.is_negative();
    let mut acc = 0f64;
    for d in n.magnitude().iter_u64_digits().rev() {
        acc = acc * 18446744073709551616.0 + d as f64;
    }
    if neg {
        -acc
    } else {
        acc
    }
}

fn libm_exp2(k: i64) -> f64 {
    let mut r = 1f64;
    let mut b = if k >= 0 { 2f64 } else { 0.5f64 };
    let mut e = k.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            r *= b;
        }
        b *= b;
        e >>= 1;
    }
    r
}

fn sgn(n: &BigInt) -> i8 {
    if n.is_positive() {
        1
    } else if n.is_negative() {
        -1
    } else {
        0
    }
}

/// Substitute every rational coordinate of `pt` into `f` (sign-preserving scaling).
pub fn subst_rationals(pt: &[Coord], f: &Poly) -> Poly {
    let mut g = f.clone();
    for v in (0..pt.len().min(f.level())).rev() {
        if let Coord::Rat(r) = &pt[v] {
            if g.has_var(v) {
                g = g.subst_rat(v, r);
            }
        }
    }
    g
}

fn boxes(pt: &[Coord]) -> Vec<Option<Interval>> {
    pt.iter()
        .map(|c| match c {
            Coord::Rat(_) => None,
            Coord::Alg(a) => Some(Interval { lo: a.lo.clone(), hi: a.hi.clone() }),
        })
        .collect()
}

/// Interval enclosure of `g` (rational coordinates already substituted).
pub fn enclose(pt: &[Coord], g: &Poly) -> Interval {
    eval_interval(g, &boxes(&pt[..g.level().min(pt.len())]))
}

/// Exact sign of `f` at the point (`f` may only use the first `pt.len()` variables).
pub fn sign_at(pt: &mut [Coord], f: &Poly) -> i8 {
    if let Poly::Const(c) = f {
        return sgn(c);
    }
    let k = f.level();
    assert!(k <= pt.len(), "polynomial has more variables than the point");
    let pt = &mut pt[..k];
    let mut g = subst_rationals(pt, f);
    let mut round = 0;
    loop {
        if let Poly::Const(c) = &g {
            return sgn(c);
        }
        if let Some(s) = enclose(pt, &g).sign() {
            return s;
        }
        if round == ZERO_TEST_AFTER && is_zero_at(pt, &g) {
            return 0;
        }
        let mut changed = false;
        for v in g.vars() {
            changed |= refine_at(pt, v);
        }
        if changed {
            g = subst_rationals(pt, &g);
        }
        round += 1;
    }
}

/// Bisect coordinate `v`; returns true if it turned out to be rational.
pub fn refine_at(pt: &mut [Coord], v: usize) -> bool {
    let (lower, rest) = pt.split_at_mut(v);
    bisect(lower, &mut rest[0])
}

/// Halve the isolating interval of `c`, a coordinate sitting on top of `lower`.
pub fn bisect(lower: &mut [Coord], c: &mut Coord) -> bool {
    let Coord::Alg(a) = c else { return false };
    let v = lower.len();
    let m = a.lo.mid(&a.hi);
    let (num, den) = m.to_frac();
    let at = a.poly.subst_frac(v, &num, &den);
    let s = sign_at(lower, &at);
    if s == 0 {
        *c = Coord::Rat(BigRational::new(num, den));
        return true;
    }
    if s == a.sign_lo {
        a.lo = m;
    } else {
        a.hi = m;
    }
    false
}

/// Exact test whether `g` (rational coordinates substituted, main variable an
/// algebraic coordinate) vanishes at the point.
fn is_zero_at(pt: &mut [Coord], g: &Poly) -> bool {
    let Some(j) = g.mvar() else { return g.is_zero() };
    let Coord::Alg(a) = &pt[j] else {
        return sign_at(pt, &subst_rationals(pt, g)) == 0;
    };
    let (q, lo, hi) = (a.poly.clone(), a.lo.clone(), a.hi.clone());
    let lower = &mut pt[..j];
    let h = gcd_at(lower, &q, g, j);
    if h.degree(j) == 0 {
        return false;
    }
    let (ln, ld) = lo.to_frac();
    let (hn, hd) = hi.to_frac();
    let s_lo = sign_at(lower, &h.subst_frac(j, &ln, &ld));
    let s_hi = sign_at(lower, &h.subst_frac(j, &hn, &hd));
    s_lo * s_hi < 0
}

/// Drop leading coefficients (w.r.t. `x_v`) that vanish at `lower`.
pub fn strip(lower: &mut [Coord], p: Poly, v: usize) -> Poly {
    let mut p = p;
    loop {
        match &p {
            Poly::Rec(w, cs) if *w == v => {
                if sign_at(lower, &cs[cs.len() - 1]) != 0 {
                    return p;
                }
                let mut cs = cs.clone();
                cs.pop();
                p = Poly::from_coeffs(v, cs);
            }
            _ => {
                return if sign_at(lower, &p) == 0 { Poly::zero() } else { p };
            }
        }
    }
}

fn primitive_in(p: Poly, v: usize) -> Poly {
    if p.mvar() != Some(v) {
        return if p.is_zero() { p } else { Poly::one() };
    }
    let c = p.int_content();
    let p = if c.is_one() { p } else { p.div_exact(&Poly::Const(c)).expect("content divides") };
    let (cont, prim) = p.content_prim(v);
    if cont.is_const() {
        p
    } else {
        prim
    }
}

/// Gcd of `a` and `b` as polynomials in `x_v` over the point `lower`
/// (`lower.len() == v`). The result has a leading coefficient that does not
/// vanish at `lower`, and its degree is the degree of the true gcd there.
/// If both vanish identically the zero polynomial is returned.
pub fn gcd_at(lower: &mut [Coord], a: &Poly, b: &Poly, v: usize) -> Poly {
    debug_assert_eq!(lower.len(), v);
    let a = strip(lower, subst_rationals(lower, a), v);
    let b = strip(lower, subst_rationals(lower, b), v);
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    let (mut a, mut b) = if a.degree(v) >= b.degree(v) { (a, b) } else { (b, a) };
    if b.degree(v) == 0 {
        return Poly::one();
    }
    // Over a rational base the ordinary gcd is exact and cheaper.
    if a.is_univariate_in(v) && b.is_univariate_in(v) {
        return a.gcd(&b);
    }
    a = primitive_in(a, v);
    b = primitive_in(b, v);
    loop {
        if b.degree(v) == 0 {
            return Poly::one();
        }
        let r = strip(lower, a.prem(&b, v), v);
        if r.is_zero() {
            return b;
        }
        a = b;
        b = primitive_in(r, v);
    }
}

/// Quotient `a / b` over the point, up to a factor nonzero there.
pub fn quo_at(lower: &mut [Coord], a: &Poly, b: &Poly, v: usize) -> Poly {
    if b.degree(v) == 0 {
        return a.clone();
    }
    if let Some(q) = a.div_exact(b) {
        return q;
    }
    let (q, _) = a.pseudo_divrem(b, v);
    strip(lower, q, v)
}

/// The point is over `lower`; the result is `f(lower, x_v)` with rationals
/// substituted and vanishing leading coefficients stripped. Zero means `f` is
/// nullified at `lower`.
pub fn specialize(lower: &mut [Coord], f: &Poly) -> Poly {
    let v = lower.len();
    strip(lower, subst_rationals(lower, f), v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nullified;

/// Real roots in `x_v` (`v = lower.len()`) of `f` over `lower`, increasing.
pub fn roots_over(lower: &mut [Coord], f: &Poly) -> Result<Vec<Coord>, Nullified> {
    let g = specialize(lower, f);
    if g.is_zero() {
        return Err(Nullified);
    }
    Ok(roots_of_specialized(lower, &g))
}

/// Roots of a polynomial already specialised by [`specialize`].
pub fn roots_of_specialized(lower: &mut [Coord], g: &Poly) -> Vec<Coord> {
    let v = lower.len();
    if g.mvar() != Some(v) {
        return Vec::new();
    }
    if g.is_univariate_in(v) {
        return univariate_roots(g, v);
    }
    let d = g.derivative(v);
    let h = gcd_at(lower, g, &d, v);
    let sq = if h.degree(v) == 0 { g.clone() } else { quo_at(lower, g, &h, v) };
    sturm_roots(lower, &sq, v)
}

fn univariate_roots(g: &Poly, v: usize) -> Vec<Coord> {
    let dense = uroots::to_dense(g);
    let (reduced, roots) = uroots::isolate(&dense);
    let rp = Arc::new(Poly::from_coeffs(v, reduced.iter().cloned().map(Poly::Const).collect()));
    roots
        .into_iter()
        .map(|r| match r {
            URoot::Exact(x) => Coord::Rat(x),
            URoot::Open(lo, hi) => {
                let (n, d) = lo.to_frac();
                let s = uroots::eval_frac_sign(&reduced, &n, &d);
                Coord::Alg(Alg { poly: rp.clone(), lo, hi, sign_lo: s })
            }
        })
        .collect()
}

struct Sturm {
    seq: Vec<Poly>,
    v: usize,
}

impl Sturm {
    fn new(lower: &mut [Coord], p: &Poly, v: usize) -> Sturm {
        let mut seq = vec![p.clone()];
        let d = strip(lower, p.derivative(v), v);
        if !d.is_zero() {
            seq.push(d);
        }
        while seq.len() >= 2 && seq[seq.len() - 1].degree(v) > 0 {
            let a = &seq[seq.len() - 2];
            let b = &seq[seq.len() - 1];
            let e = a.degree(v) - b.degree(v) + 1;
            let mut r = a.prem(b, v);
            if e % 2 == 1 && sign_at(lower, &b.lc(v)) < 0 {
                r = -r;
            }
            r = -r;
            let r = strip(lower, r, v);
            if r.is_zero() {
                break;
            }
            let ic = r.int_content();
            let mut r = r.div_exact(&Poly::Const(ic)).expect("content divides");
            if r.mvar() == Some(v) {
                let (c, pr) = r.content_prim(v);
                if !c.is_const() {
                    r = if sign_at(lower, &c) < 0 { -pr } else { pr };
                }
            }
            seq.push(r);
        }
        Sturm { seq, v }
    }

    /// (sign variations, sign of the first polynomial) at `x_v = x`.
    fn variations(&self, lower: &mut [Coord], x: &Dyadic) -> (usize, i8) {
        let (n, d) = x.to_frac();
        let mut last = 0i8;
        let mut count = 0;
        let mut first = 0;
        for (i, s) in self.seq.iter().enumerate() {
            let sg = sign_at(lower, &s.subst_frac(self.v, &n, &d));
            if i == 0 {
                first = sg;
            }
            if sg != 0 {
                if last != 0 && sg != last {
                    count += 1;
                }
                last = sg;
            }
        }
        (count, first)
    }
}

fn root_bound_exp(lower: &mut [Coord], p: &Poly, v: usize) -> i64 {
    let cs = p.coeffs(v);
    let n = cs.len() - 1;
    let mut lead = enclose(lower, &cs[n]);
    let mut guard = 0;
    while lead.sign().map_or(true, |s| s == 0) {
        for w in cs[n].vars() {
            refine_at(lower, w);
        }
        let g = subst_rationals(lower, &cs[n]);
        lead = enclose(lower, &g);
        guard += 1;
        assert!(guard < 10_000, "leading coefficient vanishes at the point");
    }
    let lead_log = lead.mig().log2_floor();
    let mut mx = i64::MIN;
    for c in &cs[..n] {
        if c.is_zero() {
            continue;
        }
        let m = enclose(lower, &subst_rationals(lower, c)).mag();
        if !m.is_zero() {
            mx = mx.max(m.log2_ceil());
        }
    }
    if mx == i64::MIN {
        return 1;
    }
    (mx - lead_log + 2).max(1)
}

fn sturm_roots(lower: &mut [Coord], p: &Poly, v: usize) -> Vec<Coord> {
    let p = strip(lower, p.clone(), v);
    if p.degree(v) == 0 {
        return Vec::new();
    }
    let sturm = Sturm::new(lower, &p, v);
    let s = root_bound_exp(lower, &p, v);
    let b = Dyadic::pow2(s);
    let nb = b.neg();
    let (va, sa) = sturm.variations(lower, &nb);
    let (vb, _) = sturm.variations(lower, &b);
    let parc = Arc::new(p);
    let mut out = Vec::new();
    isolate_rec(lower, &sturm, &parc, nb, b, va, sa, vb, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn isolate_rec(
    lower: &mut [Coord],
    st: &Sturm,
    p: &Arc<Poly>,
    a: Dyadic,
    b: Dyadic,
    va: usize,
    sa: i8,
    vb: usize,
    out: &mut Vec<Coord>,
) {
    let n = va.saturating_sub(vb);
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push(Coord::Alg(Alg { poly: p.clone(), lo: a, hi: b, sign_lo: sa }));
        return;
    }
    let m = a.mid(&b);
    let (vm, sm) = st.variations(lower, &m);
    if sm != 0 {
        isolate_rec(lower, st, p, a, m.clone(), va, sa, vm, out);
        isolate_rec(lower, st, p, m, b, vm, sm, vb, out);
        return;
    }
    // The midpoint is a rational root: carve out a small neighbourhood.
    let mut d = b.sub(&a).half().half();
    loop {
        let l = m.sub(&d);
        let r = m.add(&d);
        let (vl, sl) = st.variations(lower, &l);
        let (vr, sr) = st.variations(lower, &r);
        if sl != 0 && sr != 0 && vl == vr + 1 {
            isolate_rec(lower, st, p, a, l, va, sa, vl, out);
            out.push(Coord::Rat(m.to_rational()));
            isolate_rec(lower, st, p, r, b, vr, sr, vb, out);
            return;
        }
        d = d.half();
    }
}

fn upper_of(c: &Coord) -> BigRational {
    match c {
        Coord::Rat(r) => r.clone(),
        Coord::Alg(a) => a.hi.to_rational(),
    }
}

fn lower_of(c: &Coord) -> BigRational {
    match c {
        Coord::Rat(r) => r.clone(),
        Coord::Alg(a) => a.lo.to_rational(),
    }
}

/// Exact comparison of two coordinates living over the same lower point.
pub fn compare(lower: &mut [Coord], a: &mut Coord, b: &mut Coord) -> Ordering {
    let v = lower.len();
    let mut round = 0usize;
    loop {
        match (&*a, &*b) {
            (Coord::Rat(x), Coord::Rat(y)) => return x.cmp(y),
            (Coord::Rat(x), Coord::Alg(bb)) => {
                let x = x.clone();
                if bb.lo.cmp_rational(&x) != Ordering::Less {
                    return Ordering::Less;
                }
                if bb.hi.cmp_rational(&x) != Ordering::Greater {
                    return Ordering::Greater;
                }
                let s = sign_at(lower, &bb.poly.subst_rat(v, &x));
                if s == 0 {
                    return Ordering::Equal;
                }
                bisect(lower, b);
            }
            (Coord::Alg(_), Coord::Rat(_)) => return compare(lower, b, a).reverse(),
            (Coord::Alg(aa), Coord::Alg(bb)) => {
                if aa.hi <= bb.lo {
                    return Ordering::Less;
                }
                if bb.hi <= aa.lo {
                    return Ordering::Greater;
                }
                if round == ZERO_TEST_AFTER {
                    let lo = if aa.lo > bb.lo { aa.lo.clone() } else { bb.lo.clone() };
                    let hi = if aa.hi < bb.hi { aa.hi.clone() } else { bb.hi.clone() };
                    let (pa, pb) = (aa.poly.clone(), bb.poly.clone());
                    if Arc::ptr_eq(&pa, &pb) || pa == pb {
                        // Same defining polynomial: overlapping isolating
                        // intervals of a squarefree polynomial share their root.
                        return Ordering::Equal;
                    }
                    let h = gcd_at(lower, &pa, &pb, v);
                    if h.degree(v) > 0 {
                        let (ln, ld) = lo.to_frac();
                        let (hn, hd) = hi.to_frac();
                        let s1 = sign_at(lower, &h.subst_frac(v, &ln, &ld));
                        let s2 = sign_at(lower, &h.subst_frac(v, &hn, &hd));
                        if s1 * s2 < 0 {
                            return Ordering::Equal;
                        }
                    }
                }
                let wa = aa.hi.sub(&aa.lo);
                let wb = bb.hi.sub(&bb.lo);
                if wa >= wb {
                    bisect(lower, a);
                } else {
                    bisect(lower, b);
                }
            }
        }
        round += 1;
    }
}

/// Sort and deduplicate roots over the same lower point.
pub fn merge_roots(lower: &mut [Coord], roots: Vec<Coord>) -> Vec<Coord> {
    let mut out: Vec<Coord> = Vec::with_capacity(roots.len());
    'next: for mut r in roots {
        // insertion by binary-ish linear scan; stacks are small
        let mut i = out.len();
        while i > 0 {
            match compare(lower, &mut out[i - 1], &mut r) {
                Ordering::Less => break,
                Ordering::Equal => continue 'next,
                Ordering::Greater => i -= 1,
            }
        }
        if i < out.len() {
            // also check equality against the element we now precede
            if compare(lower, &mut r, &mut out[i]) == Ordering::Equal {
                continue 'next;
            }
        }
        out.insert(i, r);
    }
    out
}

/// Simplest rational strictly between `a < b`.
pub fn simplest_between(a: &BigRational, b: &BigRational) -> BigRational {
    debug_assert!(a < b);
    let zero = BigRational::zero();
    if *a < zero && *b > zero {
        return zero;
    }
    if *b <= zero {
        return -simplest_between(&-b, &-a);
    }
    let fa = a.floor();
    let n = &fa + BigRational::one();
    if n < *b {
        return n;
    }
    let frac_a = a - &fa;
    let frac_b = b - &fa;
    if frac_a.is_zero() {
        let s = (frac_b.recip()).floor() + BigRational::one();
        return fa + s.recip();
    }
    let s = simplest_between(&frac_b.recip(), &frac_a.recip());
    fa + s.recip()
}

/// A rational sample strictly between two sorted, distinct roots.
pub fn sample_between(lower: &mut [Coord], a: &mut Coord, b: &mut Coord) -> BigRational {
    loop {
        let ua = upper_of(a);
        let lb = lower_of(b);
        match ua.cmp(&lb) {
            Ordering::Less => return simplest_between(&ua, &lb),
            Ordering::Equal if !a.is_rational() && !b.is_rational() => return ua,
            _ => {
                if a.is_rational() {
                    bisect(lower, b);
                } else if b.is_rational() {
                    bisect(lower, a);
                } else {
                    bisect(lower, a);
                    bisect(lower, b);
                }
            }
        }
    }
}

pub fn sample_below(c: &Coord) -> BigRational {
    BigRational::from_integer(lower_of(c).floor().to_integer() - BigInt::one())
}

pub fn sample_above(c: &Coord) -> BigRational {
    BigRational::from_integer(upper_of(c).ceil().to_integer() + BigInt::one())
}

/// Stack samples for a sorted list of section coordinates: alternating
/// sector, section, sector, ..., `2s + 1` in total.
pub fn stack_samples(lower: &mut [Coord], roots: &mut [Coord]) -> Vec<Coord> {
    let s = roots.len();
    if s == 0 {
        return vec![Coord::int(0)];
    }
    let mut out = Vec::with_capacity(2 * s + 1);
    out.push(Coord::Rat(sample_below(&roots[0])));
    for i in 0..s {
        out.push(roots[i].clone());
        if i + 1 < s {
            let (l, r) = roots.split_at_mut(i + 1);
            out.push(Coord::Rat(sample_between(lower, &mut l[i], &mut r[0])));
        }
    }
    out.push(Coord::Rat(sample_above(&roots[s - 1])));
    // Refinement during sampling may have turned roots rational; keep sections current.
    for i in 0..s {
        out[2 * i + 1] = roots[i].clone();
    }
    out
}

/// Exact value at a point whose coordinates are all rational.
pub fn rational_point(pt: &[Coord]) -> Option<Vec<BigRational>> {
    pt.iter().map(|c| c.as_rational().cloned()).collect()
}
