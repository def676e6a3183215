//! Lifting: stacks over cells, order-invariant CADW recursion, and the
//! truth-table invariant construction with its reduced lifting sets.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::poly::Poly;
use crate::projection::{Projector, TopLevel};
use crate::qff::{projection_levels, QffList, Scheme};
use crate::realalg::{
    bisect, compare, gcd_at, merge_roots, roots_over, sign_at, specialize, stack_samples, Coord,
};

/// Runs independent jobs; implementations must return results in input order.
pub trait Executor: Sync {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        items.into_iter().map(f).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    /// 1-based stack positions; odd = sector, even = section.
    pub index: Vec<u32>,
    pub sample: Vec<Coord>,
    pub parent: Option<usize>,
    /// Children in the next level (empty for leaves).
    pub children: Range<usize>,
    /// Polynomials whose real roots over this cell separate its children.
    pub stack_polys: Arc<Vec<Poly>>,
    /// One truth value per formula (leaves only, once evaluated).
    pub truth: Option<Vec<bool>>,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.index.iter().filter(|&&i| i % 2 == 1).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailKind {
    /// A projection factor vanishes identically over a cell of positive dimension.
    NotWellOriented,
    /// An equational constraint vanishes over a positive-dimensional cell and
    /// the excluded projection polynomials are not constant there.
    TtiNotWellOriented,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fail {
    pub kind: FailKind,
    /// Dimension of the space containing the offending cell.
    pub level: usize,
    pub cell: Vec<u32>,
    pub poly: Poly,
}

impl fmt::Display for Fail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            FailKind::NotWellOriented => "not well oriented",
            FailKind::TtiNotWellOriented => "not well oriented with respect to the equational constraints",
        };
        write!(f, "{} (nullified on cell {:?} of level {})", what, self.cell, self.level)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Cells where a designated EC was nullified and the excluded projection
    /// polynomials were found constant, so the lift was widened instead of failing.
    pub exclp_cells: usize,
    /// Zero-dimensional cells where a designated EC was nullified.
    pub ec_nullified_points: usize,
    /// Zero-dimensional cells lifted with a delineating polynomial.
    pub delineated_points: usize,
}

#[derive(Clone, Debug)]
pub struct Cad {
    pub scheme: Scheme,
    pub vars: alloc::vec::Vec<alloc::string::String>,
    /// `levels[k]` holds the cells of ℝ^(k+1).
    pub levels: Vec<Vec<Cell>>,
    pub root_polys: Arc<Vec<Poly>>,
    /// Projection factors per level (the top entry is the generic lifting set).
    pub proj: Vec<Vec<Poly>>,
    pub stats: Stats,
}

impl Cad {
    pub fn nvars(&self) -> usize {
        self.levels.len()
    }

    pub fn leaves(&self) -> &[Cell] {
        &self.levels[self.levels.len() - 1]
    }

    pub fn level_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }

    fn children_of(&self, level: usize, parent: Option<usize>) -> (Range<usize>, Arc<Vec<Poly>>) {
        match parent {
            None => (0..self.levels[0].len(), self.root_polys.clone()),
            Some(p) => {
                let c = &self.levels[level - 1][p];
                (c.children.clone(), c.stack_polys.clone())
            }
        }
    }

    /// Leaf containing `pt` (coordinates may be algebraic). `None` means the
    /// point's stack structure disagrees with the decomposition somewhere.
    pub fn locate(&self, pt: &[Coord]) -> Option<usize> {
        let mut pt: Vec<Coord> = pt.to_vec();
        let mut parent = None;
        for k in 0..self.nvars() {
            let (range, polys) = self.children_of(k, parent);
            let (lower, rest) = pt.split_at_mut(k);
            let mut roots = Vec::new();
            for p in polys.iter() {
                if let Ok(r) = roots_over(lower, p) {
                    roots.extend(r);
                }
            }
            let roots = merge_roots(lower, roots);
            if 2 * roots.len() + 1 != range.len() {
                return None;
            }
            let mut local = 2 * roots.len();
            for (i, r) in roots.into_iter().enumerate() {
                let mut r = r;
                match compare(lower, &mut rest[0], &mut r) {
                    Ordering::Less => {
                        local = 2 * i;
                        break;
                    }
                    Ordering::Equal => {
                        local = 2 * i + 1;
                        break;
                    }
                    Ordering::Greater => {}
                }
            }
            parent = Some(range.start + local);
        }
        parent
    }

    /// A random rational point inside a full-dimensional leaf.
    pub fn random_interior(&self, leaf: usize, rng: &mut dyn FnMut() -> u64) -> Vec<BigRational> {
        let n = self.nvars();
        let mut path = vec![0usize; n];
        path[n - 1] = leaf;
        for k in (1..n).rev() {
            path[k - 1] = self.levels[k][path[k]].parent.expect("non-root cell has parent");
        }
        let mut pt: Vec<Coord> = Vec::with_capacity(n);
        let mut parent = None;
        for k in 0..n {
            let (range, polys) = self.children_of(k, parent);
            let local = path[k] - range.start;
            assert!(local % 2 == 0, "sector cells only");
            let mut roots = Vec::new();
            for p in polys.iter() {
                if let Ok(r) = roots_over(&mut pt, p) {
                    roots.extend(r);
                }
            }
            let mut roots = merge_roots(&mut pt, roots);
            let j = local / 2;
            let u = BigRational::new(BigInt::from(1 + (rng() % 65535)), BigInt::from(65536));
            let four = BigRational::from_integer(BigInt::from(4));
            let x = if roots.is_empty() {
                (u - BigRational::new(BigInt::one(), BigInt::from(2))) * BigRational::from_integer(BigInt::from(20))
            } else if j == 0 {
                let lo = roots[0].bounds().0;
                lo - (BigRational::one() - u) * four
            } else if j == roots.len() {
                let hi = roots[j - 1].bounds().1;
                hi + (BigRational::one() - u) * four
            } else {
                let (l, r) = roots.split_at_mut(j);
                let (lo, hi) = separate(&mut pt, &mut l[j - 1], &mut r[0]);
                &lo + (hi - &lo) * u
            };
            pt.push(Coord::Rat(x));
            parent = Some(path[k]);
        }
        pt.into_iter().map(|c| c.as_rational().cloned().expect("rational")).collect()
    }

    /// Evaluate every formula on every leaf.
    pub fn evaluate<E: Executor>(&mut self, q: &QffList, exec: &E) {
        let leaves = core::mem::take(self.levels.last_mut().unwrap());
        let out = exec.map(leaves, |mut c| {
            c.truth = Some(truth_at(q, &mut c.sample));
            c
        });
        *self.levels.last_mut().unwrap() = out;
    }

    /// Leaf counts per truth vector.
    pub fn truth_buckets(&self) -> alloc::collections::BTreeMap<Vec<bool>, usize> {
        let mut m = alloc::collections::BTreeMap::new();
        for c in self.leaves() {
            if let Some(t) = &c.truth {
                *m.entry(t.clone()).or_insert(0) += 1;
            }
        }
        m
    }
}

/// Truth vector of the formulae at a point.
pub fn truth_at(q: &QffList, pt: &mut [Coord]) -> Vec<bool> {
    let mut cache: Vec<(Poly, i8)> = Vec::new();
    q.formulas
        .iter()
        .map(|f| {
            f.eval_by(&mut |p| {
                if let Some((_, s)) = cache.iter().find(|(c, _)| c == p) {
                    return Some(*s);
                }
                let s = sign_at(&mut pt[..p.level()], p);
                cache.push((p.clone(), s));
                Some(s)
            })
            .expect("every atom has a sign")
        })
        .collect()
}

/// Truth vector at a rational point.
pub fn truth_at_rational(q: &QffList, pt: &[BigRational]) -> Vec<bool> {
    q.formulas
        .iter()
        .map(|f| {
            f.eval_by(&mut |p| {
                let v = p.eval_rat(pt);
                Some(if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                })
            })
            .expect("every atom has a sign")
        })
        .collect()
}

/// Rationals `lo < hi` with `a ≤ lo` and `hi ≤ b`, for roots `a < b`.
fn separate(lower: &mut [Coord], a: &mut Coord, b: &mut Coord) -> (BigRational, BigRational) {
    loop {
        let ua = a.bounds().1;
        let lb = b.bounds().0;
        if ua < lb {
            return (ua, lb);
        }
        if !a.is_rational() {
            bisect(lower, a);
        }
        if !b.is_rational() {
            bisect(lower, b);
        }
    }
}

// ----- lifting machinery -----------------------------------------------------

/// How the polynomials lifted over a given cell are chosen.
trait Chooser: Sync {
    fn choose(&self, sample: &mut Vec<Coord>, cell: &Cell, stats: &mut Stats) -> Result<Vec<Poly>, Fail>;
}

struct Lifted {
    polys: Arc<Vec<Poly>>,
    sample: Vec<Coord>,
    children: Vec<Vec<Coord>>,
    stats: Stats,
}

fn stack(sample: &mut Vec<Coord>, polys: &[Poly]) -> Vec<Vec<Coord>> {
    let mut roots = Vec::new();
    for p in polys {
        if let Ok(r) = roots_over(sample, p) {
            roots.extend(r);
        }
    }
    let mut roots = merge_roots(sample, roots);
    stack_samples(sample, &mut roots)
        .into_iter()
        .map(|c| {
            let mut s = sample.clone();
            s.push(c);
            s
        })
        .collect()
}

fn add_stats(a: &mut Stats, b: &Stats) {
    a.exclp_cells += b.exclp_cells;
    a.ec_nullified_points += b.ec_nullified_points;
    a.delineated_points += b.delineated_points;
}

fn lift_level<E: Executor>(
    exec: &E,
    parents: &mut [Cell],
    chooser: &dyn Chooser,
    stats: &mut Stats,
) -> Result<Vec<Cell>, Fail> {
    let jobs: Vec<(usize, Cell)> = parents.iter().cloned().enumerate().collect();
    let results = exec.map(jobs, |(i, cell)| {
        let mut sample = cell.sample.clone();
        let mut st = Stats::default();
        let polys = chooser.choose(&mut sample, &cell, &mut st)?;
        let children = stack(&mut sample, &polys);
        Ok::<_, Fail>((i, Lifted { polys: Arc::new(polys), sample, children, stats: st }))
    });
    let mut out = Vec::new();
    for r in results {
        let (i, l) = r?;
        add_stats(stats, &l.stats);
        let start = out.len();
        let parent = &mut parents[i];
        for (j, s) in l.children.into_iter().enumerate() {
            let mut index = parent.index.clone();
            index.push(j as u32 + 1);
            out.push(Cell {
                index,
                sample: s,
                parent: Some(i),
                children: 0..0,
                stack_polys: Arc::new(Vec::new()),
                truth: None,
            });
        }
        parent.children = start..out.len();
        parent.stack_polys = l.polys;
        parent.sample = l.sample;
    }
    Ok(out)
}

fn base_level(polys: &[Poly]) -> Vec<Cell> {
    let mut empty = Vec::new();
    stack(&mut empty, polys)
        .into_iter()
        .enumerate()
        .map(|(j, s)| Cell {
            index: vec![j as u32 + 1],
            sample: s,
            parent: None,
            children: 0..0,
            stack_polys: Arc::new(Vec::new()),
            truth: None,
        })
        .collect()
}

/// All partial derivatives of `p` of total order `m` in `x_0..x_{v-1}`.
fn partials(p: &Poly, v: usize, m: usize) -> Vec<Poly> {
    fn go(p: &Poly, from: usize, v: usize, m: usize, out: &mut Vec<Poly>) {
        if p.is_zero() {
            return;
        }
        if m == 0 {
            out.push(p.clone());
            return;
        }
        for w in from..v {
            go(&p.derivative(w), w, v, m - 1, out);
        }
    }
    let mut out = Vec::new();
    go(p, 0, v, m, &mut out);
    out
}

/// Delineating polynomial of `p`, nullified over the point `sample`
/// (`x_v` is the lifting variable): the gcd over the point of the
/// lowest-order partial derivatives that are not nullified there.
pub fn delineating(sample: &mut [Coord], p: &Poly, v: usize) -> Option<Poly> {
    let max = p.total_degree();
    for m in 1..=max {
        let live: Vec<Poly> = partials(p, v, m)
            .into_iter()
            .filter(|d| !specialize(sample, d).is_zero())
            .collect();
        if live.is_empty() {
            continue;
        }
        let mut g = specialize(sample, &live[0]);
        for d in &live[1..] {
            if g.degree(v) == 0 {
                break;
            }
            g = gcd_at(sample, &g, d, v);
        }
        return (g.degree(v) > 0).then_some(g);
    }
    None
}

/// Order-invariant lifting with the given projection factors.
struct Cadw<'a> {
    polys: &'a [Poly],
}

impl Chooser for Cadw<'_> {
    fn choose(&self, sample: &mut Vec<Coord>, cell: &Cell, stats: &mut Stats) -> Result<Vec<Poly>, Fail> {
        let v = sample.len();
        let mut out = Vec::new();
        for p in self.polys {
            if !specialize(sample, p).is_zero() {
                out.push(p.clone());
                continue;
            }
            if cell.dim() > 0 {
                return Err(Fail {
                    kind: FailKind::NotWellOriented,
                    level: v,
                    cell: cell.index.clone(),
                    poly: p.clone(),
                });
            }
            stats.delineated_points += 1;
            if let Some(d) = delineating(sample, p, v) {
                out.push(d);
            }
        }
        Ok(out)
    }
}

/// Sign-invariant top lift: nullified polynomials vanish on the whole
/// cylinder and are simply dropped.
struct SkipNullified<'a> {
    polys: &'a [Poly],
}

impl Chooser for SkipNullified<'_> {
    fn choose(&self, sample: &mut Vec<Coord>, _: &Cell, _: &mut Stats) -> Result<Vec<Poly>, Fail> {
        Ok(self.polys.iter().filter(|p| !specialize(sample, p).is_zero()).cloned().collect())
    }
}

/// Final lift of the truth-table invariant construction.
struct TtiLift<'a> {
    top: &'a TopLevel,
    ec: Vec<Option<Poly>>,
    excluded: Vec<Vec<Poly>>,
    /// Projection factors per lower level, used to decide which coordinates
    /// are constant on a cell.
    lower: &'a [Vec<Poly>],
}

impl TtiLift<'_> {
    /// Is coordinate `j` constant on the cell?
    fn fixed(&self, sample: &mut [Coord], cell: &Cell, j: usize) -> bool {
        if cell.index[j] % 2 == 1 {
            return false;
        }
        self.lower[j].iter().any(|p| p.is_univariate_in(j) && sign_at(&mut sample[..=j], p) == 0)
    }

    fn constant_on(&self, sample: &mut [Coord], cell: &Cell, e: &Poly) -> bool {
        let n = sample.len();
        let fixed: Vec<bool> = if cell.dim() == 0 {
            vec![true; n]
        } else {
            (0..n).map(|j| self.fixed(sample, cell, j)).collect()
        };
        let mut groups: alloc::collections::BTreeMap<Vec<u32>, Vec<(Vec<u32>, BigInt)>> = Default::default();
        for (ex, c) in e.terms(n) {
            let key: Vec<u32> = ex.iter().enumerate().map(|(j, &k)| if fixed[j] { 0 } else { k }).collect();
            let rest: Vec<u32> = ex.iter().enumerate().map(|(j, &k)| if fixed[j] { k } else { 0 }).collect();
            groups.entry(key).or_default().push((rest, c));
        }
        groups.into_iter().all(|(key, terms)| {
            key.iter().all(|&k| k == 0) || sign_at(sample, &Poly::from_terms(&terms)) == 0
        })
    }
}

impl Chooser for TtiLift<'_> {
    fn choose(&self, sample: &mut Vec<Coord>, cell: &Cell, stats: &mut Stats) -> Result<Vec<Poly>, Fail> {
        let mut ks: Vec<usize> = self.top.f.iter().flatten().copied().collect();
        for (i, ec) in self.ec.iter().enumerate() {
            let Some(f) = ec else { continue };
            if !specialize(sample, f).is_zero() {
                continue;
            }
            if cell.dim() == 0 {
                stats.ec_nullified_points += 1;
            } else if self.excluded[i].iter().all(|e| self.constant_on(sample, cell, e)) {
                stats.exclp_cells += 1;
            } else {
                return Err(Fail {
                    kind: FailKind::TtiNotWellOriented,
                    level: sample.len(),
                    cell: cell.index.clone(),
                    poly: f.clone(),
                });
            }
            ks.extend(self.top.b[i].iter().copied());
        }
        ks.sort_unstable();
        ks.dedup();
        Ok(ks
            .into_iter()
            .map(|k| &self.top.basis[k])
            .filter(|p| !specialize(sample, p).is_zero())
            .cloned()
            .collect())
    }
}

fn lower_levels<E: Executor>(exec: &E, levels: &[Vec<Poly>], stats: &mut Stats) -> Result<Vec<Vec<Cell>>, Fail> {
    let mut out = vec![base_level(&levels[0])];
    for v in 1..levels.len() {
        let mut parents = out.pop().unwrap();
        let next = lift_level(exec, &mut parents, &Cadw { polys: &levels[v] }, stats)?;
        out.push(parents);
        out.push(next);
    }
    Ok(out)
}

fn assemble(scheme: Scheme, q: &QffList, levels: Vec<Vec<Cell>>, proj: Vec<Vec<Poly>>, stats: Stats) -> Cad {
    let root_polys = Arc::new(proj[0].clone());
    Cad { scheme, vars: q.vars.clone(), levels, root_polys, proj, stats }
}

/// Order-invariant CAD of ℝⁿ for all polynomials of `q` (FAILs on
/// positive-dimensional nullification at any level).
pub fn cadw<E: Executor>(q: &QffList, pr: &Projector, exec: &E) -> Result<Cad, Fail> {
    let proj = pr.closure(q.all_polys().iter(), q.nvars());
    let mut stats = Stats::default();
    let levels = lower_levels(exec, &proj, &mut stats)?;
    Ok(assemble(Scheme::Sign, q, levels, proj, stats))
}

fn sign_invariant_of<E: Executor>(
    scheme: Scheme,
    q: &QffList,
    proj: Vec<Vec<Poly>>,
    exec: &E,
) -> Result<Cad, Fail> {
    let n = proj.len();
    let mut stats = Stats::default();
    if n == 1 {
        return Ok(assemble(scheme, q, vec![base_level(&proj[0])], proj, stats));
    }
    let mut levels = lower_levels(exec, &proj[..n - 1], &mut stats)?;
    let mut parents = levels.pop().unwrap();
    let top = lift_level(exec, &mut parents, &SkipNullified { polys: &proj[n - 1] }, &mut stats)?;
    levels.push(parents);
    levels.push(top);
    Ok(assemble(scheme, q, levels, proj, stats))
}

/// Sign-invariant CAD for every polynomial in `q`.
pub fn sign_cad<E: Executor>(q: &QffList, pr: &Projector, exec: &E) -> Result<Cad, Fail> {
    sign_invariant_of(Scheme::Sign, q, projection_levels(q, Scheme::Sign, pr), exec)
}

/// Full projection pipeline applied to the ResCAD set.
pub fn rescad<E: Executor>(q: &QffList, pr: &Projector, exec: &E) -> Result<Cad, Fail> {
    sign_invariant_of(Scheme::ResCad, q, projection_levels(q, Scheme::ResCad, pr), exec)
}

/// Truth-table invariant CAD for the formula list.
pub fn tticad<E: Executor>(q: &QffList, pr: &Projector, exec: &E) -> Result<Cad, Fail> {
    tti_with(Scheme::Tti, q, pr, exec)
}

/// Single-formula EC-based CAD; several formulae are merged first.
pub fn ec_cad<E: Executor>(q: &QffList, pr: &Projector, exec: &E) -> Result<Cad, Fail> {
    tti_with(Scheme::Ec, &q.merged(), pr, exec)
}

fn tti_with<E: Executor>(scheme: Scheme, q: &QffList, pr: &Projector, exec: &E) -> Result<Cad, Fail> {
    let n = q.nvars();
    let input = q.projection_input();
    let mut stats = Stats::default();
    let top = TopLevel::new(&input, n - 1);
    if n == 1 {
        let proj = vec![top.ec_basis()];
        return Ok(assemble(scheme, q, vec![base_level(&proj[0])], proj, stats));
    }
    let mut proj = pr.closure(top.projection(pr).polys.keys(), n - 1);
    let mut levels = lower_levels(exec, &proj, &mut stats)?;
    let ec: Vec<Option<Poly>> = (0..q.t())
        .map(|i| if input.has_ec(i) { q.formulas[i].ec_poly().cloned() } else { None })
        .collect();
    let excluded: Vec<Vec<Poly>> = (0..q.t())
        .map(|i| pr.excluded_for(&top, i).polys.into_keys().collect())
        .collect();
    let chooser = TtiLift { top: &top, ec, excluded, lower: &proj };
    let mut parents = levels.pop().unwrap();
    let last = lift_level(exec, &mut parents, &chooser, &mut stats)?;
    levels.push(parents);
    levels.push(last);
    proj.push(top.ec_basis());
    Ok(assemble(scheme, q, levels, proj, stats))
}

/// Build a CAD of the requested kind.
pub fn build<E: Executor>(q: &QffList, scheme: Scheme, pr: &Projector, exec: &E) -> Result<Cad, Fail> {
    match scheme {
        Scheme::Sign => sign_cad(q, pr, exec),
        Scheme::Ec => ec_cad(q, pr, exec),
        Scheme::Tti => tticad(q, pr, exec),
        Scheme::ResCad => rescad(q, pr, exec),
    }
}
