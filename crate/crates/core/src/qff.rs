//! Quantifier-free formulae: parsing, truth evaluation and the formulation
//! heuristics (variable ordering, choice of equational constraints).

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::parse::{tokenize, ExprParser, ParseError, Tok};
use crate::poly::Poly;
use crate::projection::{canonical_set, normalize, PolySet, ProjectionInput, Projector, TopLevel};
use crate::realalg::{merge_roots, roots_over};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Rel {
    pub fn holds(self, sign: i8) -> bool {
        match self {
            Rel::Eq => sign == 0,
            Rel::Ne => sign != 0,
            Rel::Lt => sign < 0,
            Rel::Gt => sign > 0,
            Rel::Le => sign <= 0,
            Rel::Ge => sign >= 0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Lt => "<",
            Rel::Gt => ">",
            Rel::Le => "<=",
            Rel::Ge => ">=",
        }
    }
}

/// `poly REL 0`, with `poly` nonconstant and integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub poly: Poly,
    pub rel: Rel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Atom(usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    fn eval(&self, atom: &mut dyn FnMut(usize) -> Option<bool>) -> Option<bool> {
        Some(match self {
            Formula::Atom(i) => atom(*i)?,
            Formula::Not(f) => !f.eval(atom)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(atom)? {
                        return Some(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(atom)? {
                        return Some(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !a.eval(atom)? || b.eval(atom)?,
        })
    }

    /// Atom indices that are top-level conjuncts.
    pub fn conjunct_atoms(&self) -> Vec<usize> {
        match self {
            Formula::Atom(i) => vec![*i],
            Formula::And(fs) => fs.iter().flat_map(|f| f.conjunct_atoms()).collect(),
            _ => Vec::new(),
        }
    }

    fn shift_atoms(&self, by: usize) -> Formula {
        match self {
            Formula::Atom(i) => Formula::Atom(i + by),
            Formula::Not(f) => Formula::Not(Box::new(f.shift_atoms(by))),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.shift_atoms(by)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.shift_atoms(by)).collect()),
            Formula::Implies(a, b) => Formula::Implies(Box::new(a.shift_atoms(by)), Box::new(b.shift_atoms(by))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qff {
    pub atoms: Vec<Atom>,
    pub tree: Formula,
    /// Index of the designated equational constraint among `atoms`.
    pub ec: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissingSign(pub Poly);

impl Qff {
    pub fn ec_poly(&self) -> Option<&Poly> {
        self.ec.map(|i| &self.atoms[i].poly)
    }

    pub fn polys(&self) -> PolySet {
        canonical_set(self.atoms.iter().map(|a| &a.poly))
    }

    /// Evaluate with per-atom signs supplied lazily.
    pub fn eval_by(&self, sign: &mut dyn FnMut(&Poly) -> Option<i8>) -> Option<bool> {
        let atoms = &self.atoms;
        self.tree.eval(&mut |i| Some(atoms[i].rel.holds(sign(&atoms[i].poly)?)))
    }

    /// Evaluate from a table of signs keyed by the atoms' polynomials.
    pub fn eval_truth(&self, signs: &BTreeMap<Poly, i8>) -> Result<bool, MissingSign> {
        let mut missing = None;
        let r = self.eval_by(&mut |p| {
            let s = signs.get(p).copied();
            if s.is_none() {
                missing = Some(p.clone());
            }
            s
        });
        r.ok_or_else(|| MissingSign(missing.expect("recorded")))
    }

    /// Drop the EC designation.
    pub fn without_ec(&self) -> Qff {
        Qff { ec: None, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QffList {
    /// Variables in ascending order (`vars[0]` is projected last).
    pub vars: Vec<String>,
    pub formulas: Vec<Qff>,
}

impl QffList {
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn t(&self) -> usize {
        self.formulas.len()
    }

    pub fn all_polys(&self) -> PolySet {
        self.formulas.iter().flat_map(|q| q.polys()).collect()
    }

    /// `A_i` = all polynomials of formula i; `E_i` = its designated EC or `A_i`.
    pub fn projection_input(&self) -> ProjectionInput {
        let a: Vec<PolySet> = self.formulas.iter().map(|q| q.polys()).collect();
        let e = self
            .formulas
            .iter()
            .zip(&a)
            .map(|(q, a)| match q.ec_poly().and_then(normalize) {
                Some(f) => [f].into_iter().collect(),
                None => a.clone(),
            })
            .collect();
        ProjectionInput::new(a, e, self.nvars())
    }

    /// Same problem under another variable order; `order[i]` is the current
    /// index of the variable that becomes `x_i`.
    pub fn reordered(&self, order: &[usize]) -> QffList {
        let n = self.nvars();
        assert_eq!(order.len(), n);
        let mut perm = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            perm[old] = new;
        }
        QffList {
            vars: order.iter().map(|&i| self.vars[i].clone()).collect(),
            formulas: self
                .formulas
                .iter()
                .map(|q| Qff {
                    atoms: q.atoms.iter().map(|a| Atom { poly: a.poly.permute_vars(&perm), rel: a.rel }).collect(),
                    tree: q.tree.clone(),
                    ec: q.ec,
                })
                .collect(),
        }
    }

    /// Single-formula version: `φ_1 ∨ … ∨ φ_t`, conjoined with the product of
    /// the ECs as designated EC when every formula has one (it is then implied).
    pub fn merged(&self) -> QffList {
        if self.t() == 1 {
            return self.clone();
        }
        let all_ec = self.formulas.iter().all(|q| q.ec.is_some());
        let mut atoms = Vec::new();
        if all_ec {
            let prod = self.formulas.iter().fold(Poly::one(), |acc, q| acc * q.ec_poly().unwrap().clone());
            atoms.push(Atom { poly: prod, rel: Rel::Eq });
        }
        let mut disj = Vec::new();
        for q in &self.formulas {
            disj.push(q.tree.shift_atoms(atoms.len()));
            atoms.extend(q.atoms.iter().cloned());
        }
        let (tree, ec) = if all_ec {
            (Formula::And(vec![Formula::Atom(0), Formula::Or(disj)]), Some(0))
        } else {
            (Formula::Or(disj), None)
        };
        QffList { vars: self.vars.clone(), formulas: vec![Qff { atoms, tree, ec }] }
    }

    pub fn to_source(&self) -> String {
        let mut s = format!("vars {};\n", self.vars.join(", "));
        for q in &self.formulas {
            s.push_str(&self.formula_source(q, &q.tree));
            s.push_str(";\n");
        }
        s
    }

    fn formula_source(&self, q: &Qff, f: &Formula) -> String {
        match f {
            Formula::Atom(i) => {
                let a = &q.atoms[*i];
                let mark = if q.ec == Some(*i) { "[ec] " } else { "" };
                format!("{}{} {} 0", mark, a.poly.display(&self.vars), a.rel.symbol())
            }
            Formula::Not(g) => format!("~({})", self.formula_source(q, g)),
            Formula::And(gs) => {
                let parts: Vec<String> = gs.iter().map(|g| self.wrap(q, g)).collect();
                parts.join(" /\\ ")
            }
            Formula::Or(gs) => {
                let parts: Vec<String> = gs.iter().map(|g| self.wrap(q, g)).collect();
                parts.join(" \\/ ")
            }
            Formula::Implies(a, b) => format!("{} -> {}", self.wrap(q, a), self.wrap(q, b)),
        }
    }

    fn wrap(&self, q: &Qff, f: &Formula) -> String {
        match f {
            Formula::Atom(_) | Formula::Not(_) => self.formula_source(q, f),
            _ => format!("({})", self.formula_source(q, f)),
        }
    }
}

impl fmt::Display for QffList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_source())
    }
}

// ----- parsing ---------------------------------------------------------------

struct FormulaParser<'a> {
    ex: ExprParser<'a>,
    atoms: Vec<Atom>,
    ec: Option<usize>,
}

impl<'a> FormulaParser<'a> {
    fn implies(&mut self) -> Result<Formula, ParseError> {
        let a = self.or()?;
        if self.ex.peek() == Some(&Tok::Implies) {
            self.ex.pos += 1;
            let b = self.implies()?;
            return Ok(Formula::Implies(Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut fs = vec![self.and()?];
        while self.ex.peek() == Some(&Tok::Or) {
            self.ex.pos += 1;
            fs.push(self.and()?);
        }
        Ok(if fs.len() == 1 { fs.pop().unwrap() } else { Formula::Or(fs) })
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut fs = vec![self.unary()?];
        while self.ex.peek() == Some(&Tok::And) {
            self.ex.pos += 1;
            match self.unary()? {
                Formula::And(inner) => fs.extend(inner),
                f => fs.push(f),
            }
        }
        if fs.len() == 1 {
            return Ok(fs.pop().unwrap());
        }
        // flatten a leading nested conjunction too
        let mut flat = Vec::new();
        for f in fs {
            match f {
                Formula::And(inner) => flat.extend(inner),
                f => flat.push(f),
            }
        }
        Ok(Formula::And(flat))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.ex.peek() {
            Some(Tok::Not) => {
                self.ex.pos += 1;
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Some(Tok::EcMark) => {
                self.ex.pos += 1;
                if self.ec.is_some() {
                    return Err(self.ex.error("more than one designated equational constraint"));
                }
                let at = self.ex.pos;
                let f = self.atom()?;
                let Formula::Atom(i) = f else { unreachable!() };
                if self.atoms[i].rel != Rel::Eq {
                    self.ex.pos = at;
                    return Err(self.ex.error("[ec] must mark an equality atom"));
                }
                self.ec = Some(i);
                Ok(f)
            }
            Some(Tok::LParen) => {
                let save = self.ex.pos;
                let natoms = self.atoms.len();
                match self.atom() {
                    Ok(f) => Ok(f),
                    Err(atom_err) => {
                        self.ex.pos = save + 1;
                        self.atoms.truncate(natoms);
                        let f = match self.implies() {
                            Ok(f) => f,
                            Err(e) => return Err(if e.line > atom_err.line || (e.line == atom_err.line && e.col >= atom_err.col) { e } else { atom_err }),
                        };
                        self.ex.expect(&Tok::RParen, "`)`")?;
                        Ok(f)
                    }
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let start = self.ex.pos;
        let lhs = self.ex.expr()?;
        let rel = match self.ex.peek() {
            Some(Tok::Eq) => Rel::Eq,
            Some(Tok::Ne) => Rel::Ne,
            Some(Tok::Lt) => Rel::Lt,
            Some(Tok::Gt) => Rel::Gt,
            Some(Tok::Le) => Rel::Le,
            Some(Tok::Ge) => Rel::Ge,
            _ => return Err(self.ex.error("expected relation")),
        };
        self.ex.pos += 1;
        let rhs = self.ex.expr()?;
        let poly = lhs.add(&rhs.neg()).reduced().num;
        if poly.is_const() {
            let pos = self.ex.pos;
            self.ex.pos = start;
            let e = self.ex.error("atom polynomial is constant");
            self.ex.pos = pos;
            return Err(e);
        }
        self.atoms.push(Atom { poly, rel });
        Ok(Formula::Atom(self.atoms.len() - 1))
    }
}

/// Parse `vars x, y; φ₁; φ₂; …`.
pub fn parse(src: &str) -> Result<QffList, ParseError> {
    let toks = tokenize(src)?;
    let mut pos = 0;
    let err_at = |i: usize, msg: &str| {
        let t = toks.get(i).or_else(|| toks.last());
        ParseError { line: t.map_or(1, |t| t.line), col: t.map_or(1, |t| t.col), msg: msg.to_string() }
    };
    match toks.first().map(|t| &t.tok) {
        Some(Tok::Ident(k)) if k == "vars" => pos += 1,
        _ => return Err(err_at(0, "expected `vars` declaration")),
    }
    let mut vars: Vec<String> = Vec::new();
    loop {
        match toks.get(pos).map(|t| &t.tok) {
            Some(Tok::Ident(v)) => {
                if vars.contains(v) {
                    return Err(err_at(pos, "duplicate variable"));
                }
                vars.push(v.clone());
                pos += 1;
            }
            _ => return Err(err_at(pos, "expected variable name")),
        }
        match toks.get(pos).map(|t| &t.tok) {
            Some(Tok::Comma) => pos += 1,
            Some(Tok::Semi) => {
                pos += 1;
                break;
            }
            _ => return Err(err_at(pos, "expected `,` or `;`")),
        }
    }
    let mut formulas = Vec::new();
    while pos < toks.len() {
        if toks[pos].tok == Tok::Semi {
            pos += 1;
            continue;
        }
        let end = toks[pos..].iter().position(|t| t.tok == Tok::Semi).map_or(toks.len(), |k| pos + k);
        let mut fp = FormulaParser { ex: ExprParser::new(&toks[..end], &vars), atoms: Vec::new(), ec: None };
        fp.ex.pos = pos;
        let tree = fp.implies()?;
        if fp.ex.pos != end {
            return Err(fp.ex.error("unexpected token"));
        }
        if let Some(i) = fp.ec {
            if !tree.conjunct_atoms().contains(&i) {
                return Err(err_at(pos, "[ec] atom must be a top-level conjunct of its formula"));
            }
        }
        formulas.push(Qff { atoms: fp.atoms, tree, ec: fp.ec });
        pos = end;
    }
    if formulas.is_empty() {
        return Err(err_at(toks.len(), "no formulae"));
    }
    Ok(QffList { vars, formulas })
}

// ----- heuristics ------------------------------------------------------------

/// Brown's criteria for eliminating variable `v` first; smaller is better.
pub fn brown_key(polys: &PolySet, nvars: usize, v: usize) -> (usize, usize, usize) {
    let mut deg = 0;
    let mut tdeg = 0;
    let mut terms = 0;
    for p in polys {
        for (e, _) in p.terms(nvars) {
            if e[v] > 0 {
                deg = deg.max(e[v] as usize);
                tdeg = tdeg.max(e.iter().map(|&k| k as usize).sum());
                terms += 1;
            }
        }
    }
    (deg, tdeg, terms)
}

/// Variable order chosen by Brown's heuristic, ascending (`order[0]` is
/// projected last). Ties keep the declared order.
pub fn brown_order(q: &QffList) -> Vec<usize> {
    let polys = q.all_polys();
    let n = q.nvars();
    let mut elim: Vec<usize> = (0..n).collect();
    // eliminate-first = smallest key; ties: later declared first
    elim.sort_by_key(|&v| (brown_key(&polys, n, v), core::cmp::Reverse(v)));
    elim.reverse();
    elim
}

/// Every permutation of the variables, each as an ascending order.
pub fn all_orders(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Sign,
    Ec,
    Tti,
    ResCad,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Sign => "sign",
            Scheme::Ec => "ec",
            Scheme::Tti => "tti",
            Scheme::ResCad => "rescad",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        Some(match s {
            "sign" => Scheme::Sign,
            "ec" => Scheme::Ec,
            "tti" => Scheme::Tti,
            "rescad" => Scheme::ResCad,
            _ => return None,
        })
    }
}

/// Projection polynomials of every level for a scheme (top level = the
/// polynomials lifted over generic cells).
pub fn projection_levels(q: &QffList, scheme: Scheme, pr: &Projector) -> Vec<Vec<Poly>> {
    let n = q.nvars();
    match scheme {
        Scheme::Sign => pr.closure(q.all_polys().iter(), n),
        Scheme::ResCad => pr.closure(crate::projection::rescad_set(&q.projection_input()).iter(), n),
        Scheme::Ec | Scheme::Tti => {
            let q = if scheme == Scheme::Ec { q.merged() } else { q.clone() };
            let input = q.projection_input();
            if n == 1 {
                let top = TopLevel::new(&input, 0);
                return vec![top.ec_basis()];
            }
            let top = TopLevel::new(&input, n - 1);
            let proj = top.projection(pr);
            let mut levels = pr.closure(proj.polys.keys(), n - 1);
            levels.push(top.ec_basis());
            levels
        }
    }
}

/// Sum over all projection polynomials of the total degrees of their monomials.
pub fn sotd(levels: &[Vec<Poly>]) -> usize {
    levels.iter().flatten().map(|p| p.sum_total_degree()).sum()
}

/// Number of distinct real roots of a set of univariate polynomials.
pub fn ndrr(univariate: &[Poly]) -> usize {
    let mut roots = Vec::new();
    for p in univariate {
        roots.extend(roots_over(&mut [], p).expect("nonzero univariate polynomial"));
    }
    merge_roots(&mut [], roots).len()
}

/// Designation choices: for each formula, each equality atom that is a
/// top-level conjunct (or no EC when there is none); at most `cap` results.
pub fn ec_designation_candidates(q: &QffList, cap: usize) -> Vec<QffList> {
    let choices: Vec<Vec<Option<usize>>> = q
        .formulas
        .iter()
        .map(|f| {
            let c: Vec<Option<usize>> = f
                .tree
                .conjunct_atoms()
                .into_iter()
                .filter(|&i| f.atoms[i].rel == Rel::Eq)
                .map(Some)
                .collect();
            if c.is_empty() {
                vec![None]
            } else {
                c
            }
        })
        .collect();
    let mut out = vec![Vec::new()];
    for ch in &choices {
        let mut next = Vec::new();
        'outer: for prefix in &out {
            for c in ch {
                if next.len() >= cap {
                    break 'outer;
                }
                let mut p: Vec<Option<usize>> = prefix.clone();
                p.push(*c);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|sel| QffList {
            vars: q.vars.clone(),
            formulas: q.formulas.iter().zip(sel).map(|(f, e)| Qff { ec: e, ..f.clone() }).collect(),
        })
        .collect()
}

/// The circle/hyperbola family: clause k (0-based) uses centre (4k, k).
/// With `psi` the last clause has no EC (`f < 0` instead of `f = 0`).
pub fn family(j: usize, psi: bool) -> QffList {
    assert!(j >= 1);
    let mut src = String::from("vars x, y;\n");
    for k in 0..j {
        let (a, b) = (4 * k, k);
        let f = format!("(x-{a})^2+(y-{b})^2-1");
        let g = format!("(x-{a})*(y-{b})-1/4");
        if psi && k == j - 1 {
            src.push_str(&format!("{f} < 0 /\\ {g} < 0;\n"));
        } else {
            src.push_str(&format!("[ec] {f} = 0 /\\ {g} < 0;\n"));
        }
    }
    parse(&src).expect("family source parses")
}
