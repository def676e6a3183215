//! Dyadic rationals `m * 2^e` and closed intervals over them.
//!
//! Isolating intervals only ever get bisected, so their endpoints stay
//! dyadic; multiplying dyadics needs no gcd, which keeps interval evaluation
//! of projection polynomials cheap.

use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn new(m: BigInt, e: i64) -> Self {
        let mut d = Dyadic { m, e };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.m.is_zero() {
            self.e = 0;
            return;
        }
        let tz = self.m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.m >>= tz as usize;
            self.e += tz as i64;
        }
    }

    pub fn zero() -> Self {
        Dyadic { m: BigInt::zero(), e: 0 }
    }

    pub fn from_int(n: BigInt) -> Self {
        Dyadic::new(n, 0)
    }

    pub fn pow2(k: i64) -> Self {
        Dyadic { m: BigInt::one(), e: k }
    }

    pub fn signum(&self) -> i8 {
        if self.m.is_zero() {
            0
        } else if self.m.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    /// `(num, den)` with `den = 2^k > 0`.
    pub fn to_frac(&self) -> (BigInt, BigInt) {
        if self.e >= 0 {
            (&self.m << self.e as usize, BigInt::one())
        } else {
            (self.m.clone(), BigInt::one() << (-self.e) as usize)
        }
    }

    pub fn to_rational(&self) -> BigRational {
        let (n, d) = self.to_frac();
        BigRational::new(n, d)
    }

    pub fn floor(&self) -> BigInt {
        if self.e >= 0 {
            &self.m << self.e as usize
        } else {
            self.m.div_floor(&(BigInt::one() << (-self.e) as usize))
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.e >= 0 {
            &self.m << self.e as usize
        } else {
            self.m.div_ceil(&(BigInt::one() << (-self.e) as usize))
        }
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &o.m << (o.e - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { m: -self.m.clone(), e: self.e }
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() || o.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { m: &self.m * &o.m, e: self.e + o.e }
    }

    pub fn mul_int(&self, k: &BigInt) -> Dyadic {
        Dyadic::new(&self.m * k, self.e)
    }

    pub fn half(&self) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { m: self.m.clone(), e: self.e - 1 }
    }

    pub fn mid(&self, o: &Dyadic) -> Dyadic {
        self.add(o).half()
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { m: self.m.abs(), e: self.e }
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        let (n, d) = self.to_frac();
        (n * r.denom()).cmp(&(r.numer() * d))
    }

    /// Smallest `k` with `|self| <= 2^k` (for nonzero values).
    pub fn log2_ceil(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN / 4;
        }
        let bits = self.m.abs().bits() as i64;
        // |m| < 2^bits, equality impossible unless |m| == 1 (odd normalised).
        if self.m.abs().is_one() {
            self.e
        } else {
            self.e + bits
        }
    }

    /// Largest `k` with `2^k <= |self|` (for nonzero values).
    pub fn log2_floor(&self) -> i64 {
        let bits = self.m.abs().bits() as i64;
        self.e + bits - 1
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        match self.sub(o).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn point(d: Dyadic) -> Self {
        Interval { lo: d.clone(), hi: d }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.add(&o.lo), hi: self.hi.add(&o.hi) }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        // Fast paths for sign-definite operands.
        let (a, b, c, d) = (&self.lo, &self.hi, &o.lo, &o.hi);
        if a.signum() >= 0 && c.signum() >= 0 {
            return Interval { lo: a.mul(c), hi: b.mul(d) };
        }
        let p = [a.mul(c), a.mul(d), b.mul(c), b.mul(d)];
        let mut lo = p[0].clone();
        let mut hi = p[0].clone();
        for x in &p[1..] {
            if *x < lo {
                lo = x.clone();
            }
            if *x > hi {
                hi = x.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn mul_int(&self, k: &BigInt) -> Interval {
        if k.is_negative() {
            Interval { lo: self.hi.mul_int(k), hi: self.lo.mul_int(k) }
        } else {
            Interval { lo: self.lo.mul_int(k), hi: self.hi.mul_int(k) }
        }
    }

    /// Sign of every value in the interval, if it is constant.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.signum() > 0 {
            Some(1)
        } else if self.hi.signum() < 0 {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn mag(&self) -> Dyadic {
        let (a, b) = (self.lo.abs(), self.hi.abs());
        if a > b {
            a
        } else {
            b
        }
    }

    /// Smallest absolute value, assuming 0 is excluded.
    pub fn mig(&self) -> Dyadic {
        let (a, b) = (self.lo.abs(), self.hi.abs());
        if a < b {
            a
        } else {
            b
        }
    }
}

/// Horner evaluation of `p` with `x_v` ranging over `boxes[v]`.
pub fn eval_interval(p: &Poly, boxes: &[Option<Interval>]) -> Interval {
    match p {
        Poly::Const(c) => Interval::point(Dyadic::from_int(c.clone())),
        Poly::Rec(v, cs) => {
            let x = boxes[*v].as_ref().expect("interval for every variable");
            let mut acc = eval_interval(&cs[cs.len() - 1], boxes);
            for c in cs[..cs.len() - 1].iter().rev() {
                acc = acc.mul(x);
                if !c.is_zero() {
                    acc = acc.add(&eval_interval(c, boxes));
                }
            }
            acc
        }
    }
}
