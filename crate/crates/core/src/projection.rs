//! Projection operators: McCallum's full operator, the equational-constraint
//! reduction, its truth-table-invariant generalisation over several formulae,
//! the ResCAD set and the excluded polynomials.
//!
//! Everything is kept in canonical form (integer-primitive, positive leading
//! base coefficient) and constants are dropped, so sets compare structurally.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::poly::Poly;
use crate::uroots;

pub type PolySet = BTreeSet<Poly>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Content,
    Coefficient,
    Discriminant,
    ResultantWithin,
    CrossResultant,
    Excluded,
}

impl Tag {
    pub fn name(self) -> &'static str {
        match self {
            Tag::Content => "content",
            Tag::Coefficient => "coefficient",
            Tag::Discriminant => "discriminant",
            Tag::ResultantWithin => "resultant-within",
            Tag::CrossResultant => "cross-resultant",
            Tag::Excluded => "excluded",
        }
    }
}

/// A projection set; each polynomial keeps the first (smallest) tag it was produced under.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProjectionSet {
    pub polys: BTreeMap<Poly, Tag>,
}

impl ProjectionSet {
    pub fn insert(&mut self, p: &Poly, tag: Tag) {
        if let Some(p) = normalize(p) {
            let e = self.polys.entry(p).or_insert(tag);
            if tag < *e {
                *e = tag;
            }
        }
    }

    pub fn extend(&mut self, other: &ProjectionSet) {
        for (p, t) in &other.polys {
            self.insert(p, *t);
        }
    }

    pub fn set(&self) -> PolySet {
        self.polys.keys().cloned().collect()
    }

    pub fn with_tag(&self, tag: Tag) -> PolySet {
        self.polys.iter().filter(|(_, t)| **t == tag).map(|(p, _)| p.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }
}

/// Canonical representative, or `None` for constants.
pub fn normalize(p: &Poly) -> Option<Poly> {
    if p.is_const() {
        None
    } else {
        Some(p.canonical())
    }
}

pub fn canonical_set<'a, I: IntoIterator<Item = &'a Poly>>(ps: I) -> PolySet {
    ps.into_iter().filter_map(normalize).collect()
}

/// Per-formula input: the polynomials `A[i]` and equational constraints `E[i] ⊆ A[i]`.
#[derive(Clone, Debug)]
pub struct ProjectionInput {
    pub a: Vec<PolySet>,
    pub e: Vec<PolySet>,
    pub nvars: usize,
}

impl ProjectionInput {
    pub fn new(a: Vec<PolySet>, e: Vec<PolySet>, nvars: usize) -> Self {
        assert_eq!(a.len(), e.len());
        assert!(!a.is_empty());
        ProjectionInput { a, e, nvars }
    }

    pub fn t(&self) -> usize {
        self.a.len()
    }

    pub fn all(&self) -> PolySet {
        self.a.iter().flatten().cloned().collect()
    }

    pub fn all_ec(&self) -> PolySet {
        self.e.iter().flatten().cloned().collect()
    }

    pub fn has_ec(&self, i: usize) -> bool {
        self.e[i] != self.a[i]
    }
}

/// Can the given polynomials (in the lower variables) vanish simultaneously
/// at a real point? Exact for univariate sets in one variable, conservative
/// (answers yes) otherwise.
pub fn may_vanish_together(cs: &[Poly]) -> bool {
    if cs.iter().any(|c| c.is_const() && !c.is_zero()) {
        return false;
    }
    let cs: Vec<&Poly> = cs.iter().filter(|c| !c.is_zero()).collect();
    let Some(first) = cs.first() else { return true };
    let Some(w) = first.mvar() else { return true };
    if !cs.iter().all(|c| c.is_univariate_in(w)) {
        return true;
    }
    let mut g = (*first).clone();
    for c in &cs[1..] {
        g = g.gcd(c);
        if g.is_const() {
            return false;
        }
    }
    let (_, roots) = uroots::isolate(&uroots::to_dense(&g));
    !roots.is_empty()
}

/// Projection options.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Projector {
    /// Take only the coefficients needed for delineability (see [`Projector::coefficients`]).
    pub truncate: bool,
}

impl Default for Projector {
    fn default() -> Self {
        Projector { truncate: true }
    }
}

impl Projector {
    pub fn full_coefficients() -> Self {
        Projector { truncate: false }
    }

    /// Coefficients of `f` in `x_v` needed for delineability, highest first.
    ///
    /// Lower coefficients only matter where every coefficient taken so far
    /// vanishes on a cell of positive dimension (to keep the degree constant
    /// there). So we stop at a nonzero constant, once the taken coefficients
    /// can only vanish together at isolated points (always the case over ℝ¹),
    /// and before a coefficient that cannot vanish together with them.
    pub fn coefficients(&self, f: &Poly, v: usize) -> Vec<Poly> {
        let cs = f.coeffs(v);
        if !self.truncate {
            return cs.into_iter().rev().filter(|c| !c.is_zero()).collect();
        }
        let mut taken: Vec<Poly> = Vec::new();
        for c in cs.into_iter().rev() {
            if c.is_zero() {
                continue;
            }
            if taken.is_empty() {
                let stop = c.is_const() || v == 1;
                taken.push(c);
                if stop {
                    break;
                }
                continue;
            }
            taken.push(c);
            if !may_vanish_together(&taken) {
                taken.pop();
                break;
            }
        }
        taken
    }

    fn add_coeffs_discs(&self, out: &mut ProjectionSet, b: &[Poly], v: usize) {
        for f in b {
            for c in self.coefficients(f, v) {
                out.insert(&c, Tag::Coefficient);
            }
            if let Some(d) = f.discriminant(v) {
                out.insert(&d, Tag::Discriminant);
            }
        }
    }

    /// McCallum's operator applied to a squarefree basis of level `v` (no contents).
    pub fn project_basis(&self, b: &[Poly], v: usize) -> ProjectionSet {
        let mut out = ProjectionSet::default();
        self.add_coeffs_discs(&mut out, b, v);
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                out.insert(&b[i].resultant(&b[j], v), Tag::ResultantWithin);
            }
        }
        out
    }

    /// `P(A)` eliminating `x_v`.
    pub fn proj_full(&self, a: &PolySet, v: usize) -> ProjectionSet {
        let (cont, b) = split_contents(a.iter(), v);
        let mut out = ProjectionSet::default();
        for c in &cont {
            out.insert(c, Tag::Content);
        }
        out.extend(&self.project_basis(&b, v));
        out
    }

    /// `P_E(A)` eliminating `x_v`.
    pub fn proj_ec(&self, a: &PolySet, e: &PolySet, v: usize) -> ProjectionSet {
        let input = ProjectionInput::new(vec![a.clone()], vec![e.clone()], v + 1);
        self.proj_tti(&input, v)
    }

    /// `P_ℰ(𝒜)` eliminating `x_v` (the top variable).
    pub fn proj_tti(&self, input: &ProjectionInput, v: usize) -> ProjectionSet {
        TopLevel::new(input, v).projection(self)
    }

    /// `ExclP_E(A) = P(A) \ P_E(A)` in its expanded form: coefficients,
    /// discriminants and mutual resultants of the non-EC basis elements.
    pub fn excluded_polys(&self, a: &PolySet, e: &PolySet, v: usize) -> PolySet {
        let top = TopLevel::new(&ProjectionInput::new(vec![a.clone()], vec![e.clone()], v + 1), v);
        self.excluded_for(&top, 0).set()
    }

    pub fn excluded_for(&self, top: &TopLevel, i: usize) -> ProjectionSet {
        let rest: Vec<Poly> = top.b[i]
            .iter()
            .filter(|k| !top.f[i].contains(k))
            .map(|&k| top.basis[k].clone())
            .collect();
        let mut out = ProjectionSet::default();
        for (p, _) in self.project_basis(&rest, top.v).polys {
            out.insert(&p, Tag::Excluded);
        }
        out
    }

    /// Projection factors of every level: `levels[k]` is a sorted squarefree
    /// gcd-free basis of polynomials with main variable `x_k`, closed under
    /// contents and McCallum projection from the top level down.
    pub fn closure<'a, I: IntoIterator<Item = &'a Poly>>(&self, polys: I, nvars: usize) -> Vec<Vec<Poly>> {
        let mut buckets: Vec<PolySet> = vec![PolySet::new(); nvars];
        let add = |buckets: &mut Vec<PolySet>, p: &Poly| {
            if let Some(p) = normalize(p) {
                let v = p.mvar().expect("nonconstant");
                buckets[v].insert(p);
            }
        };
        for p in polys {
            add(&mut buckets, p);
        }
        let mut levels = vec![Vec::new(); nvars];
        for v in (0..nvars).rev() {
            let bucket = core::mem::take(&mut buckets[v]);
            let (cont, b) = split_contents(bucket.iter(), v);
            for c in &cont {
                add(&mut buckets, c);
            }
            if v > 0 {
                for p in self.project_basis(&b, v).polys.keys() {
                    add(&mut buckets, p);
                }
            }
            levels[v] = b;
        }
        levels
    }
}

/// Contents (lower-level, canonical, nonconstant) and a squarefree gcd-free
/// basis of the primitive parts with main variable `x_v`.
pub fn split_contents<'a, I: IntoIterator<Item = &'a Poly>>(a: I, v: usize) -> (PolySet, Vec<Poly>) {
    let mut cont = PolySet::new();
    let mut prims = Vec::new();
    for p in a {
        if p.mvar() == Some(v) {
            let (c, pr) = p.content_prim(v);
            if let Some(c) = normalize(&c) {
                cont.insert(c);
            }
            prims.push(pr);
        } else if let Some(c) = normalize(p) {
            cont.insert(c);
        }
    }
    (cont, squarefree_basis(&prims))
}

/// Squarefree, pairwise coprime polynomials whose products give every input
/// up to constants and multiplicities; sorted, canonical, nonconstant.
/// Inputs should be primitive in their main variable (contents are dropped).
pub fn squarefree_basis(ps: &[Poly]) -> Vec<Poly> {
    let mut basis: Vec<Poly> = Vec::new();
    for p in ps {
        let Some(mut p) = normalize(&p.squarefree_part()) else { continue };
        let mut i = 0;
        while i < basis.len() && !p.is_const() {
            let g = basis[i].gcd(&p);
            if g.is_const() {
                i += 1;
                continue;
            }
            let b = basis[i].div_exact(&g).expect("gcd divides");
            p = p.div_exact(&g).expect("gcd divides");
            basis[i] = g.canonical();
            if let Some(b) = normalize(&b) {
                basis.push(b);
            }
            i += 1;
        }
        if let Some(p) = normalize(&p) {
            basis.push(p);
        }
    }
    basis.sort();
    basis.dedup();
    basis
}

/// Top-level data of the multi-formula reduction: one global basis of all
/// primitive parts, with per-formula index lists `b[i]` (factors of `A[i]`)
/// and `f[i]` (factors of `E[i]`).
#[derive(Clone, Debug)]
pub struct TopLevel {
    pub v: usize,
    pub contents: PolySet,
    pub basis: Vec<Poly>,
    pub b: Vec<Vec<usize>>,
    pub f: Vec<Vec<usize>>,
}

impl TopLevel {
    pub fn new(input: &ProjectionInput, v: usize) -> TopLevel {
        let all = input.all();
        let (contents, basis) = split_contents(all.iter(), v);
        let divides = |k: usize, set: &PolySet| {
            set.iter().any(|p| p.mvar() == Some(v) && !basis[k].gcd(&p.prim(v)).is_const())
        };
        let b = input.a.iter().map(|a| (0..basis.len()).filter(|&k| divides(k, a)).collect()).collect();
        let f = input.e.iter().map(|e| (0..basis.len()).filter(|&k| divides(k, e)).collect()).collect();
        TopLevel { v, contents, basis, b, f }
    }

    /// Union of the `F[i]`, i.e. the reduced lifting set.
    pub fn ec_basis(&self) -> Vec<Poly> {
        let ks: BTreeSet<usize> = self.f.iter().flatten().copied().collect();
        ks.into_iter().map(|k| self.basis[k].clone()).collect()
    }

    pub fn basis_of(&self, ks: &[usize]) -> Vec<Poly> {
        ks.iter().map(|&k| self.basis[k].clone()).collect()
    }

    pub fn projection(&self, pr: &Projector) -> ProjectionSet {
        let v = self.v;
        let mut out = ProjectionSet::default();
        for c in &self.contents {
            out.insert(c, Tag::Content);
        }
        for i in 0..self.b.len() {
            let f = self.basis_of(&self.f[i]);
            out.extend(&pr.project_basis(&f, v));
            for &k in &self.b[i] {
                if self.f[i].contains(&k) {
                    continue;
                }
                for ff in &f {
                    out.insert(&ff.resultant(&self.basis[k], v), Tag::ResultantWithin);
                }
            }
        }
        for i in 0..self.f.len() {
            for j in i + 1..self.f.len() {
                for &a in &self.f[i] {
                    for &b in &self.f[j] {
                        if a != b {
                            out.insert(&self.basis[a].resultant(&self.basis[b], v), Tag::CrossResultant);
                        }
                    }
                }
            }
        }
        out
    }
}

/// `ℛ = E ∪ ⋃ᵢ { res(f, g) | f ∈ Eᵢ, g ∈ Aᵢ \ Eᵢ }`.
pub fn rescad_set(input: &ProjectionInput) -> PolySet {
    let v = input.nvars - 1;
    let mut out: PolySet = input.all_ec();
    for (a, e) in input.a.iter().zip(&input.e) {
        for f in e {
            for g in a.difference(e) {
                if let Some(r) = normalize(&f.resultant(g, v)) {
                    out.insert(r);
                }
            }
        }
    }
    out
}

/// Sorted squarefree basis of an arbitrary set (all levels mixed), used to
/// compare projection sets modulo factorisation.
pub fn basis_modulo_factors(set: &PolySet) -> Vec<Poly> {
    let mut pending: BTreeMap<usize, Vec<Poly>> = BTreeMap::new();
    for p in set {
        pending.entry(p.mvar().expect("nonconstant")).or_default().push(p.clone());
    }
    let mut out = Vec::new();
    while let Some((v, bucket)) = pending.pop_last() {
        let (cont, b) = split_contents(bucket.iter(), v);
        for c in cont {
            pending.entry(c.mvar().expect("nonconstant")).or_default().push(c);
        }
        out.extend(b);
    }
    out.sort();
    out
}

/// Whether two sets have the same irreducible factors (up to constants),
/// decided without factoring: refine both against one common basis.
pub fn same_factors(a: &PolySet, b: &PolySet) -> bool {
    let union: PolySet = a.union(b).cloned().collect();
    let hits = |s: &PolySet, x: &Poly| s.iter().any(|p| p.div_exact(x).is_some());
    basis_modulo_factors(&union).iter().all(|x| hits(a, x) == hits(b, x))
}
