//! The (m,d)-property calculus and dominant-term cell-count bounds.
//!
//! Everything is exact: set counts are `u64`, bounds are `BigUint` (they are
//! doubly exponential in `n`).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, Pow};

use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MdProperty {
    pub m: usize,
    pub d: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundScheme {
    SignInv,
    Ec,
    TtiAllEc,
    EcImplicit,
    TtiGeneral,
}

impl BoundScheme {
    pub const ALL: [BoundScheme; 5] = [
        BoundScheme::SignInv,
        BoundScheme::Ec,
        BoundScheme::TtiAllEc,
        BoundScheme::EcImplicit,
        BoundScheme::TtiGeneral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundScheme::SignInv => "sign",
            BoundScheme::Ec => "ec",
            BoundScheme::TtiAllEc => "tti",
            BoundScheme::EcImplicit => "ec-implicit",
            BoundScheme::TtiGeneral => "tti-general",
        }
    }

    pub fn parse(s: &str) -> Option<BoundScheme> {
        Some(match s {
            "sign" | "si" | "sign-inv" => BoundScheme::SignInv,
            "ec" => BoundScheme::Ec,
            "tti" | "tti-all-ec" => BoundScheme::TtiAllEc,
            "ec-implicit" | "implicit" => BoundScheme::EcImplicit,
            "tti-general" | "general" => BoundScheme::TtiGeneral,
            _ => return None,
        })
    }
}

/// Parameters of a bound. `e`, `m_e`, `m_n` matter only for the general
/// TTICAD scheme; `t` for the TTICAD and implicit-EC schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundScenario {
    pub scheme: BoundScheme,
    pub n: u32,
    pub m: u64,
    pub d: u64,
    pub t: u64,
    pub e: u64,
    pub m_e: u64,
    pub m_n: u64,
}

impl BoundScenario {
    pub fn new(scheme: BoundScheme, n: u32, m: u64, d: u64) -> Self {
        BoundScenario { scheme, n, m, d, t: 1, e: 0, m_e: 0, m_n: m }
    }

    pub fn with_t(mut self, t: u64) -> Self {
        self.t = t;
        self
    }

    /// General split: `e` formulae with an EC use `m_e` polynomials, the rest
    /// use `m - m_e` more.
    pub fn with_split(mut self, e: u64, m_e: u64) -> Self {
        self.e = e;
        self.m_e = m_e;
        self.m_n = self.m.saturating_sub(m_e);
        self
    }

    pub fn check(&self) -> Result<(), ParamError> {
        if self.n == 0 || self.m == 0 || self.d == 0 {
            return Err(ParamError("n, m and d must be positive"));
        }
        match self.scheme {
            BoundScheme::SignInv | BoundScheme::Ec => Ok(()),
            BoundScheme::TtiAllEc | BoundScheme::EcImplicit => {
                if self.t == 0 || self.t > self.m {
                    Err(ParamError("need 1 <= t <= m"))
                } else {
                    Ok(())
                }
            }
            BoundScheme::TtiGeneral => {
                if self.t == 0 || self.e > self.t {
                    Err(ParamError("need t >= 1 and e <= t"))
                } else if self.m_e + self.m_n != self.m {
                    Err(ParamError("need m_e + m_n = m"))
                } else if self.e > self.m_e || (self.e == 0 && self.m_e != 0) {
                    Err(ParamError("need e <= m_e, and m_e = 0 when e = 0"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Number of polynomials used in the final lift when it is restricted to
    /// the equational constraints.
    pub fn final_lift_count(&self) -> u64 {
        match self.scheme {
            BoundScheme::SignInv => self.m,
            BoundScheme::Ec => 1,
            BoundScheme::TtiAllEc | BoundScheme::EcImplicit => self.t,
            BoundScheme::TtiGeneral => self.m_n + self.e,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamError(pub &'static str);

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

pub fn m_sign(m: u64) -> u64 {
    (m + 1) * (m + 1) / 2
}

pub fn m_ec(m: u64) -> u64 {
    (3 * m + 1) / 2
}

pub fn m_tti(m: u64, t: u64) -> u64 {
    m_ec(m) + t * (t - 1) / 2
}

pub fn m_ec_implicit(m: u64, t: u64) -> u64 {
    (2 * m - t + 1) * t / 2 + (m + 1) / 2
}

/// The general TTICAD count as first derived: two separately floored halves.
pub fn m_tti_general_split(m_n: u64, m_e: u64, e: u64) -> u64 {
    (m_n + 1) * (m_n + 1) / 2 + (3 * m_e + 1) / 2 + pairs_with(e, m_n)
}

/// The improved general count, pairing the leftover sets of both halves.
pub fn m_tti_general(m_n: u64, m_e: u64, e: u64) -> u64 {
    ((m_n + 1) * (m_n + 1) + 3 * m_e) / 2 + pairs_with(e, m_n)
}

/// `e(e - 1 + 2 m_n) / 2`: resultants among the `e` constraints and between
/// them and the other polynomials.
fn pairs_with(e: u64, m_n: u64) -> u64 {
    if e == 0 {
        0
    } else {
        e * (e - 1 + 2 * m_n) / 2
    }
}

/// Number of sets after the first projection (the `M` of the growth table).
pub fn m_after_projection(s: &BoundScenario) -> Result<u64, ParamError> {
    s.check()?;
    Ok(match s.scheme {
        BoundScheme::SignInv => m_sign(s.m),
        BoundScheme::Ec => m_ec(s.m),
        BoundScheme::TtiAllEc => m_tti(s.m, s.t),
        BoundScheme::EcImplicit => m_ec_implicit(s.m, s.t),
        BoundScheme::TtiGeneral => m_tti_general(s.m_n, s.m_e, s.e),
    })
}

/// A row entry of the form `2^two · d^d · M^big_m · m^m`, kept symbolically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Term {
    pub two: u64,
    pub d: u64,
    pub big_m: u64,
    pub m: u64,
}

impl Term {
    pub fn mul(self, o: Term) -> Term {
        Term {
            two: self.two + o.two,
            d: self.d + o.d,
            big_m: self.big_m + o.big_m,
            m: self.m + o.m,
        }
    }

    pub fn eval(self, big_m: u64, m: u64, d: u64) -> BigUint {
        let p = |b: u64, e: u64| -> BigUint { Pow::pow(BigUint::from(b), e) };
        p(2, self.two) * p(d, self.d) * p(big_m, self.big_m) * p(m, self.m)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut push = |name: &str, e: u64| match e {
            0 => {}
            1 => parts.push(alloc::string::String::from(name)),
            _ => parts.push(alloc::format!("{}^{}", name, e)),
        };
        push("2", self.two);
        push("M", self.big_m);
        push("m", self.m);
        push("d", self.d);
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("·"))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymRow {
    /// Number of variables at this level; `None` for the product row.
    pub vars: Option<u32>,
    pub number: Term,
    pub degree: Term,
}

impl SymRow {
    pub fn product(&self) -> Term {
        self.number.mul(self.degree)
    }
}

/// The expression-growth table for `n` variables, symbolically: level
/// `n - r` (r ≥ 1) holds `M^(2^(r-1))` sets of combined degree
/// `2^(2^r - 1) d^(2^r)`. The last row is the column-wise product.
pub fn growth_table_symbolic(n: u32) -> Vec<SymRow> {
    let mut rows = vec![SymRow {
        vars: Some(n),
        number: Term { m: 1, ..Term::default() },
        degree: Term { d: 1, ..Term::default() },
    }];
    for r in 1..n {
        let e = 1u64 << r;
        rows.push(SymRow {
            vars: Some(n - r),
            number: Term { big_m: e / 2, ..Term::default() },
            degree: Term { two: e - 1, d: e, ..Term::default() },
        });
    }
    let mut number = Term::default();
    let mut degree = Term::default();
    for r in &rows {
        number = number.mul(r.number);
        degree = degree.mul(r.degree);
    }
    rows.push(SymRow { vars: None, number, degree });
    rows
}

/// Closed form of the product row, as printed under the table.
pub fn product_row_closed(n: u32) -> SymRow {
    let full = 1u64 << n;
    SymRow {
        vars: None,
        number: Term { big_m: full / 2 - 1, m: 1, ..Term::default() },
        degree: Term { two: full - 1 - n as u64, d: full - 1, ..Term::default() },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthRow {
    pub vars: Option<u32>,
    pub number: BigUint,
    pub degree: BigUint,
    pub product: BigUint,
}

pub fn growth_table(big_m: u64, m: u64, d: u64, n: u32) -> Vec<GrowthRow> {
    growth_table_symbolic(n)
        .into_iter()
        .map(|r| GrowthRow {
            vars: r.vars,
            number: r.number.eval(big_m, m, d),
            degree: r.degree.eval(big_m, m, d),
            product: r.product().eval(big_m, m, d),
        })
        .collect()
}

/// Which factor ends the dominant term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FinalLift {
    /// Lift with all `m` input polynomials.
    All,
    /// Lift with only the equational constraints (see `final_lift_count`).
    Reduced,
}

/// `2^(2^n-1) d^(2^n-1) M^(2^(n-1)-1) k` with the exact (floored) `M`, where
/// `k` is `m` or the reduced final-lift count.
pub fn dominant_cell_bound(s: &BoundScenario, lift: FinalLift) -> Result<BigUint, ParamError> {
    let big_m = m_after_projection(s)?;
    let k = match lift {
        FinalLift::All => s.m,
        FinalLift::Reduced => s.final_lift_count(),
    };
    let full = 1u64 << s.n;
    let t = Term { two: full - 1, d: full - 1, big_m: full / 2 - 1, m: 0 };
    Ok(t.eval(big_m, 1, s.d) * BigUint::from(k))
}

/// The same dominant term with the floor in `M` dropped, in the closed forms
/// printed alongside each lemma: `2^(2^(n-1)) d^(2^n-1) (2M)^(2^(n-1)-1) k`.
pub fn dominant_cell_bound_unfloored(s: &BoundScenario, lift: FinalLift) -> Result<BigUint, ParamError> {
    s.check()?;
    let (m, t) = (s.m, s.t);
    let twice_m = match s.scheme {
        BoundScheme::SignInv => (m + 1) * (m + 1),
        BoundScheme::Ec => 3 * m + 1,
        BoundScheme::TtiAllEc => 3 * m + t * t - t + 1,
        BoundScheme::EcImplicit => t * (2 * m - t + 1) + m + 1,
        BoundScheme::TtiGeneral => {
            let (mn, me, e) = (s.m_n, s.m_e, s.e);
            (mn + 1) * (mn + 1) + (3 * me + 1) + e * e.saturating_sub(1) + 2 * e * mn - 1
        }
    };
    let k = match lift {
        FinalLift::All => s.m,
        FinalLift::Reduced => s.final_lift_count(),
    };
    let full = 1u64 << s.n;
    let t = Term { two: full / 2, d: full - 1, big_m: full / 2 - 1, m: 0 };
    Ok(t.eval(twice_m, 1, s.d) * BigUint::from(k))
}

/// Product over the table of `(2K + 1)`, `K` running through the Product
/// column: the full (non-dominant) cell-count bound.
pub fn full_cell_bound(big_m: u64, m: u64, d: u64, n: u32) -> BigUint {
    let rows = growth_table(big_m, m, d, n);
    rows[..rows.len() - 1]
        .iter()
        .fold(BigUint::one(), |acc, r| acc * (&r.product * 2u32 + 1u32))
}

// ---------------------------------------------------------------------------
// (m,d)-property

pub fn degree_vector(p: &Poly, nvars: usize) -> Vec<usize> {
    (0..nvars).map(|v| p.degree(v)).collect()
}

fn nvars_of(s: &[Poly]) -> usize {
    s.iter().map(|p| p.level()).max().unwrap_or(0)
}

/// Maximum over variables of the degree of the product of `s`.
pub fn combined_degree(s: &[Poly]) -> usize {
    let n = nvars_of(s);
    (0..n).map(|v| s.iter().map(|p| p.degree(v)).sum()).max().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvalidPartition;

impl fmt::Display for InvalidPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("partition does not cover the set exactly once")
    }
}

fn check_partition(len: usize, partition: &[Vec<usize>]) -> Result<(), InvalidPartition> {
    let mut seen = vec![false; len];
    for &i in partition.iter().flatten() {
        if i >= len || seen[i] {
            return Err(InvalidPartition);
        }
        seen[i] = true;
    }
    if seen.iter().all(|&b| b) && partition.iter().all(|b| !b.is_empty()) {
        Ok(())
    } else {
        Err(InvalidPartition)
    }
}

pub fn verify_md(s: &[Poly], partition: &[Vec<usize>], claim: MdProperty) -> Result<bool, InvalidPartition> {
    check_partition(s.len(), partition)?;
    if partition.len() > claim.m {
        return Ok(false);
    }
    Ok(partition.iter().all(|block| {
        let ps: Vec<Poly> = block.iter().map(|&i| s[i].clone()).collect();
        combined_degree(&ps) <= claim.d
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestMd {
    pub md: MdProperty,
    pub partition: Vec<Vec<usize>>,
    /// False when the set was too large for exhaustive search.
    pub optimal: bool,
}

pub const EXHAUSTIVE_CAP: usize = 12;

fn block_degree(acc: &[usize]) -> usize {
    acc.iter().copied().max().unwrap_or(0)
}

/// Smallest `d` such that `s` has the `(m, d)`-property (with at most `m`
/// blocks). Exhaustive up to `EXHAUSTIVE_CAP` elements, greedy beyond.
pub fn best_md_for_m(s: &[Poly], m: usize) -> BestMd {
    assert!(m >= 1 && !s.is_empty());
    let n = nvars_of(s);
    let degs: Vec<Vec<usize>> = s.iter().map(|p| degree_vector(p, n)).collect();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by_key(|&i| core::cmp::Reverse(degs[i].iter().sum::<usize>()));

    if s.len() > EXHAUSTIVE_CAP {
        let (d, partition) = greedy(&degs, &order, m);
        return BestMd { md: MdProperty { m, d }, partition, optimal: false };
    }
    let (mut best, mut best_part) = greedy(&degs, &order, m);
    let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    search(&degs, &order, 0, m, &mut blocks, 0, &mut best, &mut best_part);
    BestMd { md: MdProperty { m, d: best }, partition: best_part, optimal: true }
}

/// Each element goes into whichever block ends up with the smallest combined
/// degree (largest elements first).
fn greedy(degs: &[Vec<usize>], order: &[usize], m: usize) -> (usize, Vec<Vec<usize>>) {
    let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for &i in order {
        let cost = |acc: &Vec<usize>| block_degree(&acc.iter().zip(&degs[i]).map(|(a, b)| a + b).collect::<Vec<_>>());
        let target = if blocks.len() < m {
            None
        } else {
            (0..blocks.len()).min_by_key(|&b| cost(&blocks[b].1))
        };
        match target {
            Some(b) => {
                for (a, x) in blocks[b].1.iter_mut().zip(&degs[i]) {
                    *a += x;
                }
                blocks[b].0.push(i);
            }
            None => blocks.push((vec![i], degs[i].clone())),
        }
    }
    let d = blocks.iter().map(|b| block_degree(&b.1)).max().unwrap_or(0);
    (d, blocks.into_iter().map(|b| b.0).collect())
}

#[allow(clippy::too_many_arguments)]
fn search(
    degs: &[Vec<usize>],
    order: &[usize],
    k: usize,
    m: usize,
    blocks: &mut Vec<(Vec<usize>, Vec<usize>)>,
    cur: usize,
    best: &mut usize,
    best_part: &mut Vec<Vec<usize>>,
) {
    if cur >= *best {
        return;
    }
    if k == order.len() {
        *best = cur;
        *best_part = blocks.iter().map(|b| b.0.clone()).collect();
        return;
    }
    let i = order[k];
    for b in 0..blocks.len() {
        for (a, x) in blocks[b].1.iter_mut().zip(&degs[i]) {
            *a += x;
        }
        blocks[b].0.push(i);
        let d = cur.max(block_degree(&blocks[b].1));
        search(degs, order, k + 1, m, blocks, d, best, best_part);
        blocks[b].0.pop();
        for (a, x) in blocks[b].1.iter_mut().zip(&degs[i]) {
            *a -= x;
        }
    }
    // A fresh block is interchangeable with any other fresh block, so only
    // one is tried.
    if blocks.len() < m {
        blocks.push((vec![i], degs[i].clone()));
        let d = cur.max(block_degree(&degs[i]));
        search(degs, order, k + 1, m, blocks, d, best, best_part);
        blocks.pop();
    }
}

/// Union consecutive groups of `ell` blocks: an `(m,d)` partition becomes a
/// `(⌈m/ell⌉, ell·d)` one.
pub fn merge_blocks(partition: &[Vec<usize>], ell: usize) -> Vec<Vec<usize>> {
    assert!(ell >= 1);
    partition.chunks(ell).map(|c| c.concat()).collect()
}

/// A partition of a squarefree basis inheriting an `(m,d)` partition of the
/// original set: each basis element joins the first block containing a
/// polynomial it divides.
pub fn inherit_partition(s: &[Poly], partition: &[Vec<usize>], basis: &[Poly]) -> Option<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); partition.len()];
    for (j, b) in basis.iter().enumerate() {
        let home = partition
            .iter()
            .position(|block| block.iter().any(|&i| s[i].div_exact(b).is_some()))?;
        out[home].push(j);
    }
    out.retain(|b| !b.is_empty());
    Some(out)
}
