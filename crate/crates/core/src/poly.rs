//! Sparse recursive multivariate polynomials over the integers.
//!
//! A polynomial is either an integer constant or a polynomial in its main
//! variable whose coefficients only involve strictly lower variables.
//! Variables are indexed from 0 (lowest, `x1`) upwards, so the recursive
//! form always has the highest variable on the outside. This is the shape
//! every CAD operation wants: coefficients, resultants and discriminants are
//! all taken with respect to the main variable.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Poly {
    Const(BigInt),
    /// `Rec(v, cs)` is `sum cs[i] * x_v^i`; `cs.len() >= 2`, the last entry is
    /// nonzero and every entry has main variable below `v`.
    Rec(usize, Vec<Poly>),
}

impl Default for Poly {
    fn default() -> Self {
        Poly::zero()
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::Const(BigInt::zero())
    }

    pub fn one() -> Self {
        Poly::Const(BigInt::one())
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        Poly::Const(c.into())
    }

    pub fn var(v: usize) -> Self {
        Poly::Rec(v, vec![Poly::zero(), Poly::one()])
    }

    /// `x_v^d`.
    pub fn monomial(v: usize, d: usize) -> Self {
        if d == 0 {
            return Poly::one();
        }
        let mut cs = vec![Poly::zero(); d + 1];
        cs[d] = Poly::one();
        Poly::Rec(v, cs)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Poly::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Poly::Const(c) if c.is_one())
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Poly::Const(_))
    }

    pub fn as_const(&self) -> Option<&BigInt> {
        match self {
            Poly::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn mvar(&self) -> Option<usize> {
        match self {
            Poly::Const(_) => None,
            Poly::Rec(v, _) => Some(*v),
        }
    }

    /// Number of variables the polynomial lives in: `mvar + 1`, or 0 for constants.
    pub fn level(&self) -> usize {
        self.mvar().map_or(0, |v| v + 1)
    }

    pub fn degree(&self, v: usize) -> usize {
        match self {
            Poly::Const(_) => 0,
            Poly::Rec(w, cs) => match (*w).cmp(&v) {
                Ordering::Less => 0,
                Ordering::Equal => cs.len() - 1,
                Ordering::Greater => cs.iter().map(|c| c.degree(v)).max().unwrap_or(0),
            },
        }
    }

    /// Degree in the main variable (0 for constants).
    pub fn mdeg(&self) -> usize {
        match self {
            Poly::Const(_) => 0,
            Poly::Rec(_, cs) => cs.len() - 1,
        }
    }

    /// Coefficients with respect to `x_v`, ascending. Requires `v >= mvar`.
    pub fn coeffs(&self, v: usize) -> Vec<Poly> {
        match self {
            Poly::Rec(w, cs) if *w == v => cs.clone(),
            _ => {
                debug_assert!(self.mvar().map_or(true, |w| w < v));
                vec![self.clone()]
            }
        }
    }

    fn coeff_slice(&self, v: usize) -> &[Poly] {
        match self {
            Poly::Rec(w, cs) if *w == v => cs,
            _ => core::slice::from_ref(self),
        }
    }

    /// Build `sum cs[i] x_v^i`, normalising away vanishing top coefficients.
    pub fn from_coeffs(v: usize, mut cs: Vec<Poly>) -> Poly {
        while cs.len() > 1 && cs.last().map_or(false, |c| c.is_zero()) {
            cs.pop();
        }
        match cs.len() {
            0 => Poly::zero(),
            1 => cs.pop().unwrap_or_default(),
            _ => Poly::Rec(v, cs),
        }
    }

    /// Leading coefficient with respect to `x_v` (`v >= mvar`).
    pub fn lc(&self, v: usize) -> Poly {
        match self {
            Poly::Rec(w, cs) if *w == v => cs[cs.len() - 1].clone(),
            _ => self.clone(),
        }
    }

    fn lc_ref(&self, v: usize) -> &Poly {
        match self {
            Poly::Rec(w, cs) if *w == v => &cs[cs.len() - 1],
            _ => self,
        }
    }

    /// Leading base coefficient: follow leading coefficients down to an integer.
    pub fn lbc(&self) -> &BigInt {
        match self {
            Poly::Const(c) => c,
            Poly::Rec(_, cs) => cs[cs.len() - 1].lbc(),
        }
    }

    /// Trailing (degree-0) coefficient with respect to the main variable.
    pub fn tail(&self) -> &Poly {
        match self {
            Poly::Const(_) => self,
            Poly::Rec(_, cs) => &cs[0],
        }
    }

    pub fn is_univariate_in(&self, v: usize) -> bool {
        match self {
            Poly::Const(_) => true,
            Poly::Rec(w, cs) => *w == v && cs.iter().all(|c| c.is_const()),
        }
    }

    /// Bitmask-free variable listing: `out[i]` is set when `x_i` occurs.
    pub fn vars_into(&self, out: &mut Vec<bool>) {
        if let Poly::Rec(v, cs) = self {
            if out.len() <= *v {
                out.resize(*v + 1, false);
            }
            out[*v] = true;
            for c in cs {
                c.vars_into(out);
            }
        }
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut m = Vec::new();
        self.vars_into(&mut m);
        m.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect()
    }

    pub fn has_var(&self, v: usize) -> bool {
        match self {
            Poly::Const(_) => false,
            Poly::Rec(w, cs) => match (*w).cmp(&v) {
                Ordering::Less => false,
                Ordering::Equal => true,
                Ordering::Greater => cs.iter().any(|c| c.has_var(v)),
            },
        }
    }

    pub fn num_terms(&self) -> usize {
        match self {
            Poly::Const(c) => usize::from(!c.is_zero()),
            Poly::Rec(_, cs) => cs.iter().map(Poly::num_terms).sum(),
        }
    }

    // ----- arithmetic -------------------------------------------------------

    pub fn add_assign_ref(&mut self, other: &Poly) {
        if other.is_zero() {
            return;
        }
        match (&mut *self, other) {
            (Poly::Const(a), Poly::Const(b)) => *a += b,
            _ => {
                let (va, vb) = (self.mvar(), other.mvar());
                match va.cmp(&vb) {
                    Ordering::Greater => {
                        if let Poly::Rec(_, cs) = self {
                            cs[0].add_assign_ref(other);
                        }
                    }
                    Ordering::Less => {
                        let mine = core::mem::take(self);
                        let mut r = other.clone();
                        if let Poly::Rec(_, cs) = &mut r {
                            cs[0].add_assign_ref(&mine);
                        }
                        *self = r;
                    }
                    Ordering::Equal => {
                        let v = va.unwrap_or(0);
                        let mut cs = match core::mem::take(self) {
                            Poly::Rec(_, cs) => cs,
                            Poly::Const(_) => unreachable!(),
                        };
                        let ocs = other.coeff_slice(v);
                        if cs.len() < ocs.len() {
                            cs.resize(ocs.len(), Poly::zero());
                        }
                        for (c, o) in cs.iter_mut().zip(ocs) {
                            c.add_assign_ref(o);
                        }
                        *self = Poly::from_coeffs(v, cs);
                    }
                }
            }
        }
    }

    pub fn neg_assign(&mut self) {
        match self {
            Poly::Const(c) => *c = -core::mem::take(c),
            Poly::Rec(_, cs) => cs.iter_mut().for_each(Poly::neg_assign),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        match self {
            Poly::Const(c) => Poly::Const(c * k),
            Poly::Rec(v, cs) => Poly::Rec(*v, cs.iter().map(|c| c.scale(k)).collect()),
        }
    }

    pub fn mul_ref(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        match (self, other) {
            (Poly::Const(a), Poly::Const(b)) => Poly::Const(a * b),
            (Poly::Const(a), _) => other.scale(a),
            (_, Poly::Const(b)) => self.scale(b),
            (Poly::Rec(va, ca), Poly::Rec(vb, cb)) => match va.cmp(vb) {
                Ordering::Greater => Poly::Rec(*va, ca.iter().map(|c| c.mul_ref(other)).collect()),
                Ordering::Less => Poly::Rec(*vb, cb.iter().map(|c| self.mul_ref(c)).collect()),
                Ordering::Equal => {
                    let mut out = vec![Poly::zero(); ca.len() + cb.len() - 1];
                    for (i, a) in ca.iter().enumerate() {
                        if a.is_zero() {
                            continue;
                        }
                        for (j, b) in cb.iter().enumerate() {
                            if b.is_zero() {
                                continue;
                            }
                            out[i + j].add_assign_ref(&a.mul_ref(b));
                        }
                    }
                    Poly::from_coeffs(*va, out)
                }
            },
        }
    }

    /// `self * x_v^d` where `v >= mvar(self)`.
    pub fn shift(&self, v: usize, d: usize) -> Poly {
        if d == 0 || self.is_zero() {
            return self.clone();
        }
        let mut cs = vec![Poly::zero(); d];
        cs.extend(self.coeff_slice(v).iter().cloned());
        Poly::Rec(v, cs)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, v: usize) -> Poly {
        match self {
            Poly::Const(_) => Poly::zero(),
            Poly::Rec(w, cs) => match (*w).cmp(&v) {
                Ordering::Less => Poly::zero(),
                Ordering::Equal => Poly::from_coeffs(
                    v,
                    cs.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, c)| c.scale(&BigInt::from(i)))
                        .collect(),
                ),
                Ordering::Greater => {
                    Poly::from_coeffs(*w, cs.iter().map(|c| c.derivative(v)).collect())
                }
            },
        }
    }

    /// Gcd of all integer coefficients (nonnegative; 0 for the zero polynomial).
    pub fn int_content(&self) -> BigInt {
        fn go(p: &Poly, acc: &mut BigInt) {
            if acc.is_one() {
                return;
            }
            match p {
                Poly::Const(c) => *acc = acc.gcd(c),
                Poly::Rec(_, cs) => cs.iter().for_each(|c| go(c, acc)),
            }
        }
        let mut g = BigInt::zero();
        go(self, &mut g);
        g
    }

    /// Divide out the integer content and make the leading base coefficient positive.
    pub fn canonical(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.int_content();
        if self.lbc().is_negative() {
            c = -c;
        }
        if c.is_one() {
            self.clone()
        } else {
            self.div_int(&c)
        }
    }

    pub fn sign_normalized(&self) -> Poly {
        if self.lbc().is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn div_int(&self, k: &BigInt) -> Poly {
        match self {
            Poly::Const(c) => Poly::Const(c / k),
            Poly::Rec(v, cs) => Poly::Rec(*v, cs.iter().map(|c| c.div_int(k)).collect()),
        }
    }

    fn div_int_exact(&self, k: &BigInt) -> Option<Poly> {
        match self {
            Poly::Const(c) => {
                let (q, r) = c.div_rem(k);
                r.is_zero().then_some(Poly::Const(q))
            }
            Poly::Rec(v, cs) => {
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    out.push(c.div_int_exact(k)?);
                }
                Some(Poly::Rec(*v, out))
            }
        }
    }

    /// Exact division; `None` when `d` does not divide `self` in `Z[x]`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Poly::Const(k) = d {
            return self.div_int_exact(k);
        }
        let (va, vd) = (self.mvar(), d.mvar());
        match va.cmp(&vd) {
            Ordering::Less => None,
            Ordering::Greater => {
                let Poly::Rec(v, cs) = self else { unreachable!() };
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    out.push(c.div_exact(d)?);
                }
                Some(Poly::Rec(*v, out))
            }
            Ordering::Equal => {
                let v = vd.unwrap_or(0);
                let dd = d.mdeg();
                let dl = d.lc_ref(v);
                let mut r = self.clone();
                let mut q = vec![Poly::zero(); self.mdeg() + 1 - dd.min(self.mdeg() + 1)];
                if self.mdeg() < dd {
                    return None;
                }
                while !r.is_zero() && r.mvar() == Some(v) && r.mdeg() >= dd {
                    let k = r.mdeg() - dd;
                    let t = r.lc_ref(v).div_exact(dl)?;
                    let sub = d.mul_ref(&t).shift(v, k);
                    r = r - sub;
                    q[k] = t;
                }
                if !r.is_zero() {
                    return None;
                }
                Some(Poly::from_coeffs(v, q))
            }
        }
    }

    /// Pseudo-division with respect to `x_v`: returns `(q, r)` with
    /// `lc(b)^(deg a - deg b + 1) a = q b + r`, `deg r < deg b`.
    pub fn pseudo_divrem(&self, b: &Poly, v: usize) -> (Poly, Poly) {
        let db = b.degree(v);
        let da = self.degree(v);
        if da < db || self.is_zero() {
            return (Poly::zero(), self.clone());
        }
        assert!(db > 0 || !b.is_zero());
        let lb = b.lc(v);
        let mut r = self.clone();
        let mut q = Poly::zero();
        let mut e = da - db + 1;
        while !r.is_zero() && r.degree(v) >= db {
            let k = r.degree(v) - db;
            let t = r.lc(v);
            q = q.mul_ref(&lb) + t.shift(v, k);
            r = r.mul_ref(&lb) - b.mul_ref(&t).shift(v, k);
            e -= 1;
        }
        if e > 0 {
            let f = lb.pow(e as u32);
            q = q.mul_ref(&f);
            r = r.mul_ref(&f);
        }
        (q, r)
    }

    pub fn prem(&self, b: &Poly, v: usize) -> Poly {
        let db = b.degree(v);
        let da = self.degree(v);
        if da < db || self.is_zero() {
            return self.clone();
        }
        let lb = b.lc(v);
        let mut r = self.clone();
        let mut e = da - db + 1;
        while !r.is_zero() && r.degree(v) >= db {
            let k = r.degree(v) - db;
            let t = r.lc(v);
            r = r.mul_ref(&lb) - b.mul_ref(&t).shift(v, k);
            e -= 1;
        }
        if e > 0 {
            r = r.mul_ref(&lb.pow(e as u32));
        }
        r
    }

    // ----- gcd, content -------------------------------------------------------

    /// Greatest common divisor in `Z[x]`, with positive leading base coefficient.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.sign_normalized();
        }
        if other.is_zero() {
            return self.sign_normalized();
        }
        match (self, other) {
            (Poly::Const(a), Poly::Const(b)) => Poly::Const(a.gcd(b)),
            (Poly::Const(a), _) => Poly::Const(a.gcd(&other.int_content())),
            (_, Poly::Const(b)) => Poly::Const(b.gcd(&self.int_content())),
            (Poly::Rec(va, ca), Poly::Rec(vb, cb)) => match va.cmp(vb) {
                Ordering::Greater => gcd_many(ca.iter(), other.clone()),
                Ordering::Less => gcd_many(cb.iter(), self.clone()),
                Ordering::Equal => {
                    if self == other {
                        return self.sign_normalized();
                    }
                    let v = *va;
                    let (ca, pa) = self.content_prim(v);
                    let (cb, pb) = other.content_prim(v);
                    let c = ca.gcd(&cb);
                    let g = prs_gcd(&pa, &pb, v);
                    c.mul_ref(&g).sign_normalized()
                }
            },
        }
    }

    /// Content with respect to `x_v` (`v >= mvar`): gcd of the coefficients,
    /// sign-normalised. For a polynomial not involving `x_v` this is itself.
    pub fn content(&self, v: usize) -> Poly {
        match self {
            Poly::Rec(w, cs) if *w == v => gcd_many(cs.iter(), Poly::zero()),
            _ => self.sign_normalized(),
        }
    }

    /// `(content, primitive part)` with respect to `x_v`; the primitive part has
    /// positive leading base coefficient and `content * prim == self` up to sign.
    pub fn content_prim(&self, v: usize) -> (Poly, Poly) {
        let c = self.content(v);
        if c.is_zero() {
            return (Poly::zero(), Poly::zero());
        }
        let p = if c.is_one() {
            self.clone()
        } else {
            self.div_exact(&c).expect("content divides")
        };
        (c, p)
    }

    /// Primitive part with respect to `x_v`, positive leading base coefficient.
    pub fn prim(&self, v: usize) -> Poly {
        self.content_prim(v).1.sign_normalized()
    }

    // ----- resultants ---------------------------------------------------------

    /// Sylvester resultant eliminating `x_v` (subresultant PRS).
    pub fn resultant(&self, other: &Poly, v: usize) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let (da, db) = (self.degree(v), other.degree(v));
        if da == 0 {
            return self.pow(db as u32);
        }
        if db == 0 {
            return other.pow(da as u32);
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        let mut s = false;
        if da < db {
            core::mem::swap(&mut a, &mut b);
            if da % 2 == 1 && db % 2 == 1 {
                s = !s;
            }
        }
        let mut g = Poly::one();
        let mut h = Poly::one();
        loop {
            let (deg_a, dbb) = (a.degree(v), b.degree(v));
            let delta = deg_a - dbb;
            if deg_a % 2 == 1 && dbb % 2 == 1 {
                s = !s;
            }
            let r = a.prem(&b, v);
            a = b;
            let den = g.mul_ref(&h.pow(delta as u32));
            b = r.div_exact(&den).expect("subresultant division is exact");
            g = a.lc(v);
            h = match delta {
                0 => h,
                1 => g.clone(),
                _ => g
                    .pow(delta as u32)
                    .div_exact(&h.pow(delta as u32 - 1))
                    .expect("subresultant division is exact"),
            };
            if b.degree(v) == 0 {
                break;
            }
        }
        if b.is_zero() {
            return Poly::zero();
        }
        let deg_a = a.degree(v) as u32;
        let res = if deg_a == 1 {
            b
        } else {
            b.pow(deg_a)
                .div_exact(&h.pow(deg_a - 1))
                .expect("subresultant division is exact")
        };
        if s {
            -res
        } else {
            res
        }
    }

    /// `(-1)^(d(d-1)/2) res(f, f') / lc(f)` with respect to `x_v`; degree ≥ 2 required.
    pub fn discriminant(&self, v: usize) -> Option<Poly> {
        let d = self.degree(v);
        if d < 2 {
            return None;
        }
        let r = self.resultant(&self.derivative(v), v);
        let q = r.div_exact(&self.lc(v)).expect("leading coefficient divides res(f, f')");
        Some(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
    }

    // ----- squarefree ---------------------------------------------------------

    /// Yun's squarefree decomposition with respect to the main variable of a
    /// primitive polynomial: `(factor, multiplicity)` pairs, each factor primitive
    /// and of positive degree.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let Some(v) = self.mvar() else { return Vec::new() };
        let f = self.prim(v);
        let df = f.derivative(v);
        let a0 = f.gcd(&df);
        if a0.degree(v) == 0 {
            return vec![(f, 1)];
        }
        let mut b = f.div_exact(&a0).expect("gcd divides");
        let mut c = df.div_exact(&a0).expect("gcd divides");
        let mut d = c - b.derivative(v);
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree(v) > 0 {
            let a = b.gcd(&d);
            b = b.div_exact(&a).expect("gcd divides");
            c = d.div_exact(&a).expect("gcd divides");
            d = c - b.derivative(v);
            if a.degree(v) > 0 {
                out.push((a.prim(v), i));
            }
            i += 1;
        }
        out
    }

    /// Squarefree part of the primitive part with respect to the main
    /// variable; the content is dropped.
    pub fn squarefree_part(&self) -> Poly {
        let Some(v) = self.mvar() else { return self.clone() };
        let g = self.gcd(&self.derivative(v));
        if g.degree(v) == 0 {
            return self.clone();
        }
        self.div_exact(&g).expect("gcd divides")
    }

    // ----- evaluation and substitution --------------------------------------

    /// `den^D * self(x_v = num/den)` with `D = deg_v(self)`; `den > 0` keeps the sign.
    pub fn subst_frac(&self, v: usize, num: &BigInt, den: &BigInt) -> Poly {
        let d = self.degree(v);
        if d == 0 {
            return self.clone();
        }
        let mut dpow = Vec::with_capacity(d + 1);
        dpow.push(BigInt::one());
        for i in 0..d {
            let next = &dpow[i] * den;
            dpow.push(next);
        }
        self.subst_scaled(v, num, &dpow, d)
    }

    fn subst_scaled(&self, v: usize, num: &BigInt, dpow: &[BigInt], d: usize) -> Poly {
        match self {
            Poly::Const(c) => Poly::Const(c * &dpow[d]),
            Poly::Rec(w, cs) => match (*w).cmp(&v) {
                Ordering::Less => self.scale(&dpow[d]),
                Ordering::Greater => Poly::from_coeffs(
                    *w,
                    cs.iter().map(|c| c.subst_scaled(v, num, dpow, d)).collect(),
                ),
                Ordering::Equal => {
                    // Horner in homogenised form: sum c_i num^i den^(d-i).
                    let n = cs.len() - 1;
                    let mut acc = cs[n].clone();
                    for i in (0..n).rev() {
                        acc = acc.scale(num) + cs[i].scale(&dpow[n - i]);
                    }
                    // acc = sum c_i num^i den^(n-i); lift to D = d.
                    acc.scale(&dpow[d - n])
                }
            },
        }
    }

    pub fn subst_rat(&self, v: usize, r: &BigRational) -> Poly {
        self.subst_frac(v, r.numer(), r.denom())
    }

    /// Substitute a polynomial for `x_v` (used for variable renaming and
    /// derivative tests); result recomputed from scratch.
    pub fn compose_var(&self, v: usize, p: &Poly) -> Poly {
        match self {
            Poly::Const(_) => self.clone(),
            Poly::Rec(w, cs) => {
                let cs2: Vec<Poly> = cs.iter().map(|c| c.compose_var(v, p)).collect();
                let x = if *w == v { p.clone() } else { Poly::var(*w) };
                let mut acc = Poly::zero();
                for c in cs2.iter().rev() {
                    acc = acc.mul_ref(&x) + c.clone();
                }
                acc
            }
        }
    }

    /// Exact value at a rational point (`pt[i]` is the value of `x_i`).
    pub fn eval_rat(&self, pt: &[BigRational]) -> BigRational {
        match self {
            Poly::Const(c) => BigRational::from_integer(c.clone()),
            Poly::Rec(v, cs) => {
                let x = &pt[*v];
                let mut acc = BigRational::zero();
                for c in cs.iter().rev() {
                    acc = acc * x + c.eval_rat(pt);
                }
                acc
            }
        }
    }

    // ----- distributed view ---------------------------------------------------

    /// Terms as `(exponents, coefficient)` with `exponents.len() == nvars`.
    pub fn terms(&self, nvars: usize) -> Vec<(Vec<u32>, BigInt)> {
        fn go(p: &Poly, exps: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, BigInt)>) {
            match p {
                Poly::Const(c) => {
                    if !c.is_zero() {
                        out.push((exps.clone(), c.clone()));
                    }
                }
                Poly::Rec(v, cs) => {
                    for (i, c) in cs.iter().enumerate() {
                        exps[*v] = i as u32;
                        go(c, exps, out);
                    }
                    exps[*v] = 0;
                }
            }
        }
        let mut exps = vec![0u32; nvars.max(self.level())];
        let mut out = Vec::new();
        go(self, &mut exps, &mut out);
        out
    }

    pub fn from_terms(terms: &[(Vec<u32>, BigInt)]) -> Poly {
        let mut acc = Poly::zero();
        for (e, c) in terms {
            let mut t = Poly::Const(c.clone());
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul_ref(&Poly::monomial(v, k as usize));
                }
            }
            acc.add_assign_ref(&t);
        }
        acc
    }

    pub fn total_degree(&self) -> usize {
        match self {
            Poly::Const(_) => 0,
            Poly::Rec(_, cs) => cs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| i + c.total_degree())
                .max()
                .unwrap_or(0),
        }
    }

    /// Sum over monomials of their total degree.
    pub fn sum_total_degree(&self) -> usize {
        fn go(p: &Poly, base: usize) -> usize {
            match p {
                Poly::Const(c) => {
                    if c.is_zero() {
                        0
                    } else {
                        base
                    }
                }
                Poly::Rec(_, cs) => cs.iter().enumerate().map(|(i, c)| go(c, base + i)).sum(),
            }
        }
        go(self, 0)
    }

    /// Rename variables: `x_i` becomes `x_{perm[i]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> Poly {
        let n = perm.len();
        let terms = self.terms(n);
        let moved: Vec<(Vec<u32>, BigInt)> = terms
            .into_iter()
            .map(|(e, c)| {
                let mut e2 = vec![0u32; n];
                for (i, k) in e.into_iter().enumerate() {
                    e2[perm[i]] = k;
                }
                (e2, c)
            })
            .collect();
        Poly::from_terms(&moved)
    }

    pub fn display<'a>(&'a self, names: &'a [alloc::string::String]) -> PolyDisplay<'a> {
        PolyDisplay { p: self, names }
    }
}

fn gcd_many<'a>(it: impl Iterator<Item = &'a Poly>, init: Poly) -> Poly {
    let mut g = init;
    for c in it {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g.sign_normalized()
}

/// Gcd of two primitive polynomials of positive degree in `x_v`.
fn prs_gcd(a: &Poly, b: &Poly, v: usize) -> Poly {
    let (mut a, mut b) = if a.degree(v) >= b.degree(v) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    if b.degree(v) == 0 {
        return Poly::one();
    }
    if a.div_exact(&b).is_some() {
        return b.prim(v);
    }
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let delta = a.degree(v) - b.degree(v);
        let r = a.prem(&b, v);
        if r.is_zero() {
            return b.prim(v);
        }
        if r.degree(v) == 0 {
            return Poly::one();
        }
        a = b;
        let den = g.mul_ref(&h.pow(delta as u32));
        b = r.div_exact(&den).expect("subresultant division is exact");
        g = a.lc(v);
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => g
                .pow(delta as u32)
                .div_exact(&h.pow(delta as u32 - 1))
                .expect("subresultant division is exact"),
        };
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(mut self) -> Poly {
        self.neg_assign();
        self
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self.add_assign_ref(&rhs);
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self.add_assign_ref(&-rhs);
        self
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        self.mul_ref(&rhs)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut r = self.clone();
        r.add_assign_ref(rhs);
        r
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut r = rhs.clone();
        r.neg_assign();
        r.add_assign_ref(self);
        r
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_ref(rhs)
    }
}

impl From<i64> for Poly {
    fn from(c: i64) -> Self {
        Poly::Const(BigInt::from(c))
    }
}

pub struct PolyDisplay<'a> {
    p: &'a Poly,
    names: &'a [alloc::string::String],
}

impl core::fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let n = self.p.level();
        let mut terms = self.p.terms(n);
        if terms.is_empty() {
            return write!(f, "0");
        }
        // Highest variable first, then descending exponents.
        terms.sort_by(|a, b| b.0.iter().rev().cmp(a.0.iter().rev()));
        for (k, (e, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const = e.iter().all(|&x| x == 0);
            let mut first = true;
            if !mag.is_one() || is_const {
                write!(f, "{}", mag)?;
                first = false;
            }
            for v in (0..e.len()).rev() {
                if e[v] == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                match self.names.get(v) {
                    Some(name) => write!(f, "{}", name)?,
                    None => write!(f, "x{}", v + 1)?,
                }
                if e[v] > 1 {
                    write!(f, "^{}", e[v])?;
                }
            }
        }
        Ok(())
    }
}
