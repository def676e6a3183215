//! Problem files, reports and command implementations behind the `tticad`
//! binary.

pub mod bounds;
pub mod heuristics;
pub mod report;

use rayon::prelude::*;
use tticad::cad::Executor;
use tticad::qff::{self, QffList, Scheme};

/// Parallel stack construction on a dedicated rayon pool.
pub struct Rayon {
    pool: rayon::ThreadPool,
}

impl Rayon {
    /// `threads == 0` means one per available core.
    pub fn new(threads: usize) -> Result<Self, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        Ok(Rayon { pool })
    }
}

impl Executor for Rayon {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        self.pool.install(|| items.into_par_iter().map(f).collect())
    }
}

/// A formula list plus the options a problem file may carry in `@` lines:
///
/// ```text
/// @scheme tti
/// @order y, x
/// ```
#[derive(Clone, Debug)]
pub struct Problem {
    pub qff: QffList,
    pub scheme: Option<Scheme>,
    pub order: Option<Vec<String>>,
}

pub fn parse_problem(src: &str) -> Result<Problem, String> {
    let mut scheme = None;
    let mut order = None;
    let mut body = String::with_capacity(src.len());
    for (no, line) in src.lines().enumerate() {
        let t = line.trim_start();
        if let Some(d) = t.strip_prefix('@') {
            let d = d.split('#').next().unwrap_or("").trim();
            let (key, val) = d.split_once(char::is_whitespace).unwrap_or((d, ""));
            match key {
                "scheme" => {
                    scheme = Some(
                        Scheme::parse(val.trim()).ok_or_else(|| format!("line {}: unknown scheme `{}`", no + 1, val.trim()))?,
                    )
                }
                "order" => order = Some(split_names(val)),
                _ => return Err(format!("line {}: unknown directive `@{}`", no + 1, key)),
            }
            // keep line numbers stable for parse errors
            body.push('\n');
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let qff = qff::parse(&body).map_err(|e| format!("line {}, column {}: {}", e.line, e.col, e.msg))?;
    Ok(Problem { qff, scheme, order })
}

pub fn split_names(s: &str) -> Vec<String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

/// Reorder variables; `names` lists them in ascending order (the first is
/// projected last).
pub fn apply_order(q: &QffList, names: &[String]) -> Result<QffList, String> {
    if names.len() != q.nvars() {
        return Err(format!("order names {} variables, problem has {}", names.len(), q.nvars()));
    }
    let mut idx = Vec::with_capacity(names.len());
    for n in names {
        let i = q.vars.iter().position(|v| v == n).ok_or_else(|| format!("unknown variable `{}` in order", n))?;
        if idx.contains(&i) {
            return Err(format!("variable `{}` repeated in order", n));
        }
        idx.push(i);
    }
    Ok(q.reordered(&idx))
}
