use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tticad::cad::{build, Executor};
use tticad::projection::Projector;
use tticad::qff::{all_orders, brown_order, ec_designation_candidates, ndrr, projection_levels, sotd, QffList, Scheme};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    /// Ascending variable order.
    pub order: Vec<String>,
    /// Designated equational constraint per formula, if any.
    pub designation: Vec<Option<String>>,
    pub brown: bool,
    pub sotd: usize,
    pub ndrr: usize,
    /// Leaf cells when built; `None` when not requested or the build failed.
    pub cells: Option<usize>,
    pub fail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicsReport {
    pub scheme: String,
    pub candidates: Vec<Candidate>,
    /// Indices into `candidates` picked by each measure (ties: first).
    pub pick_sotd: usize,
    pub pick_ndrr: usize,
    pub pick_cells: Option<usize>,
}

pub struct Options {
    pub scheme: Scheme,
    pub designations: bool,
    pub build: bool,
    pub cap: usize,
}

pub fn run<E: Executor>(q: &QffList, opts: &Options, exec: &E) -> Result<HeuristicsReport, String> {
    let orders = all_orders(q.nvars());
    let designs = if opts.designations {
        let d = ec_designation_candidates(q, opts.cap + 1);
        if d.len() > opts.cap {
            return Err(format!("more than {} designations; raise --cap", opts.cap));
        }
        d
    } else {
        vec![q.clone()]
    };
    let total = orders.len() * designs.len();
    if total > opts.cap {
        return Err(format!("{} candidates exceed the cap of {}; raise --cap", total, opts.cap));
    }
    let brown = brown_order(q);
    let pr = Projector::default();
    let mut candidates = Vec::with_capacity(total);
    for d in &designs {
        let designation: Vec<Option<String>> = d
            .formulas
            .iter()
            .map(|f| f.ec_poly().map(|p| format!("{} = 0", p.display(&d.vars))))
            .collect();
        for o in &orders {
            let r = d.reordered(o);
            let levels = projection_levels(&r, opts.scheme, &pr);
            let (cells, fail) = if opts.build {
                match build(&r, opts.scheme, &pr, exec) {
                    Ok(c) => (Some(c.leaves().len()), None),
                    Err(f) => (None, Some(f.to_string())),
                }
            } else {
                (None, None)
            };
            candidates.push(Candidate {
                order: o.iter().map(|&i| q.vars[i].clone()).collect(),
                designation: designation.clone(),
                brown: *o == brown,
                sotd: sotd(&levels),
                ndrr: ndrr(&levels[0]),
                cells,
                fail,
            });
        }
    }
    let argmin = |key: &dyn Fn(&Candidate) -> Option<usize>| {
        candidates
            .iter()
            .enumerate()
            .filter_map(|(i, c)| key(c).map(|k| (k, i)))
            .min()
            .map(|(_, i)| i)
    };
    let pick_sotd = argmin(&|c| Some(c.sotd)).unwrap_or(0);
    let pick_ndrr = argmin(&|c| Some(c.ndrr)).unwrap_or(0);
    let pick_cells = argmin(&|c| c.cells);
    Ok(HeuristicsReport { scheme: opts.scheme.name().to_string(), candidates, pick_sotd, pick_ndrr, pick_cells })
}

impl HeuristicsReport {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scheme: {}", self.scheme);
        let _ = writeln!(s, "{:>3}  {:<14} {:>6} {:>5} {:>7}  picks  designation", "#", "order", "sotd", "ndrr", "cells");
        for (i, c) in self.candidates.iter().enumerate() {
            let mut picks = String::new();
            if c.brown {
                picks.push('B');
            }
            if i == self.pick_sotd {
                picks.push('S');
            }
            if i == self.pick_ndrr {
                picks.push('N');
            }
            if Some(i) == self.pick_cells {
                picks.push('*');
            }
            let cells = match (&c.cells, &c.fail) {
                (Some(n), _) => n.to_string(),
                (None, Some(_)) => "FAIL".to_string(),
                _ => "-".to_string(),
            };
            let des: Vec<&str> = c.designation.iter().map(|d| d.as_deref().unwrap_or("none")).collect();
            let _ = writeln!(
                s,
                "{:>3}  {:<14} {:>6} {:>5} {:>7}  {:<5}  {}",
                i,
                c.order.join("<"),
                c.sotd,
                c.ndrr,
                cells,
                picks,
                des.join("; ")
            );
        }
        let _ = writeln!(s, "B = Brown's order, S = least sotd, N = least ndrr, * = fewest cells");
        s
    }
}
