use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tticad::cad::{Cad, Fail};
use tticad::qff::Scheme;
use tticad::realalg::Coord;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailReport {
    /// `NotWellOriented` or `TtiNotWellOriented`.
    pub kind: String,
    pub message: String,
    pub level: usize,
    pub cell: Vec<u32>,
    pub poly: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub exclp_cells: usize,
    pub ec_nullified_points: usize,
    pub delineated_points: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellReport {
    pub index: Vec<u32>,
    pub dim: usize,
    /// Exact coordinates: `p/q`, or `root of P in [lo, hi]`.
    pub sample: Vec<String>,
    pub truth: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scheme: String,
    pub order: Vec<String>,
    pub levels: Vec<usize>,
    pub leaves: usize,
    /// Truth vectors as strings of `T`/`F`, one letter per formula.
    pub truth_buckets: BTreeMap<String, usize>,
    pub fail: Option<FailReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<Stats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<CellReport>>,
}

fn truth_key(t: &[bool]) -> String {
    t.iter().map(|&b| if b { 'T' } else { 'F' }).collect()
}

pub fn coord_string(c: &Coord, vars: &[String]) -> String {
    match c {
        Coord::Rat(r) => r.to_string(),
        Coord::Alg(a) => format!(
            "root of {} in [{}, {}]",
            a.poly.display(vars),
            a.lo.to_rational(),
            a.hi.to_rational()
        ),
    }
}

impl RunReport {
    pub fn from_cad(cad: &Cad, with_cells: bool) -> Self {
        let truth_buckets = cad.truth_buckets().into_iter().map(|(k, v)| (truth_key(&k), v)).collect();
        let cells = with_cells.then(|| {
            cad.leaves()
                .iter()
                .map(|c| CellReport {
                    index: c.index.clone(),
                    dim: c.dim(),
                    sample: c.sample.iter().map(|x| coord_string(x, &cad.vars)).collect(),
                    truth: c.truth.as_deref().map(truth_key).unwrap_or_default(),
                })
                .collect()
        });
        RunReport {
            scheme: cad.scheme.name().to_string(),
            order: cad.vars.clone(),
            levels: cad.level_counts(),
            leaves: cad.leaves().len(),
            truth_buckets,
            fail: None,
            stats: Some(Stats {
                exclp_cells: cad.stats.exclp_cells,
                ec_nullified_points: cad.stats.ec_nullified_points,
                delineated_points: cad.stats.delineated_points,
            }),
            timing_ms: None,
            cells,
        }
    }

    pub fn from_fail(scheme: Scheme, vars: &[String], f: &Fail) -> Self {
        RunReport {
            scheme: scheme.name().to_string(),
            order: vars.to_vec(),
            levels: Vec::new(),
            leaves: 0,
            truth_buckets: BTreeMap::new(),
            fail: Some(FailReport {
                kind: format!("{:?}", f.kind),
                message: f.to_string(),
                level: f.level,
                cell: f.cell.clone(),
                poly: f.poly.display(vars).to_string(),
            }),
            stats: None,
            timing_ms: None,
            cells: None,
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scheme: {}", self.scheme);
        let _ = writeln!(s, "order: {}", self.order.join(" < "));
        if let Some(f) = &self.fail {
            let _ = writeln!(s, "FAIL: {}", f.message);
            let _ = writeln!(s, "  level {}, cell {:?}, polynomial {}", f.level, f.cell, f.poly);
            return s;
        }
        let levels: Vec<String> = self.levels.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(s, "cells per level: {}", levels.join(" "));
        let _ = writeln!(s, "leaves: {}", self.leaves);
        if let Some(st) = &self.stats {
            if st.exclp_cells + st.ec_nullified_points + st.delineated_points > 0 {
                let _ = writeln!(
                    s,
                    "nullification: {} cells via excluded polynomials, {} constraint points, {} delineated points",
                    st.exclp_cells, st.ec_nullified_points, st.delineated_points
                );
            }
        }
        if let Some(t) = self.timing_ms {
            let _ = writeln!(s, "time: {:.1} ms", t);
        }
        let _ = writeln!(s, "truth table:");
        for (k, v) in &self.truth_buckets {
            let _ = writeln!(s, "  {}  {}", k, v);
        }
        if let Some(cells) = &self.cells {
            let _ = writeln!(s, "cells:");
            for c in cells {
                let _ = writeln!(s, "  {:?} dim {} {} ({})", c.index, c.dim, c.truth, c.sample.join(", "));
            }
        }
        s
    }
}
