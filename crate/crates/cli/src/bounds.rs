use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tticad::complexity::*;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub variables: String,
    pub number: String,
    pub degree: String,
    pub product: String,
    pub number_value: String,
    pub degree_value: String,
    pub product_value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub scheme: String,
    pub n: u32,
    pub m: u64,
    pub d: u64,
    pub t: u64,
    pub e: u64,
    pub m_e: u64,
    pub m_n: u64,
    #[serde(rename = "M")]
    pub big_m: u64,
    pub table: Vec<Row>,
    /// Dominant term of the cell-count bound with the exact (floored) M.
    pub dominant: String,
    /// Same, lifting only with the equational constraints at the end.
    pub dominant_reduced: String,
    /// The printed closed forms (floor in M dropped), before and after the reduction.
    pub dominant_unfloored: String,
    pub dominant_unfloored_reduced: String,
}

pub fn report(s: &BoundScenario) -> Result<BoundsReport, ParamError> {
    let big_m = m_after_projection(s)?;
    let sym = growth_table_symbolic(s.n);
    let num = growth_table(big_m, s.m, s.d, s.n);
    let table = sym
        .iter()
        .zip(&num)
        .map(|(a, b)| Row {
            variables: a.vars.map_or_else(|| "Product".to_string(), |v| v.to_string()),
            number: a.number.to_string(),
            degree: a.degree.to_string(),
            product: a.product().to_string(),
            number_value: b.number.to_string(),
            degree_value: b.degree.to_string(),
            product_value: b.product.to_string(),
        })
        .collect();
    Ok(BoundsReport {
        scheme: s.scheme.name().to_string(),
        n: s.n,
        m: s.m,
        d: s.d,
        t: s.t,
        e: s.e,
        m_e: s.m_e,
        m_n: s.m_n,
        big_m,
        table,
        dominant: dominant_cell_bound(s, FinalLift::All)?.to_string(),
        dominant_reduced: dominant_cell_bound(s, FinalLift::Reduced)?.to_string(),
        dominant_unfloored: dominant_cell_bound_unfloored(s, FinalLift::All)?.to_string(),
        dominant_unfloored_reduced: dominant_cell_bound_unfloored(s, FinalLift::Reduced)?.to_string(),
    })
}

impl BoundsReport {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "scheme {}: n={} m={} d={} t={} e={} m_e={} m_n={}",
            self.scheme, self.n, self.m, self.d, self.t, self.e, self.m_e, self.m_n
        );
        let _ = writeln!(s, "M = {}", self.big_m);
        let w = [9, 18, 22, 28];
        let _ = writeln!(s, "{:<w0$} {:<w1$} {:<w2$} {:<w3$}", "Variables", "Number", "Degree", "Product", w0 = w[0], w1 = w[1], w2 = w[2], w3 = w[3]);
        for r in &self.table {
            let _ = writeln!(
                s,
                "{:<w0$} {:<w1$} {:<w2$} {:<w3$}",
                r.variables,
                r.number,
                r.degree,
                r.product,
                w0 = w[0],
                w1 = w[1],
                w2 = w[2],
                w3 = w[3]
            );
            let _ = writeln!(
                s,
                "{:<w0$} {:<w1$} {:<w2$} {:<w3$}",
                "",
                r.number_value,
                r.degree_value,
                r.product_value,
                w0 = w[0],
                w1 = w[1],
                w2 = w[2],
                w3 = w[3]
            );
        }
        let _ = writeln!(s, "dominant term:               {}", self.dominant);
        let _ = writeln!(s, "  reduced final lift:        {}", self.dominant_reduced);
        let _ = writeln!(s, "  floor dropped:             {}", self.dominant_unfloored);
        let _ = writeln!(s, "  floor dropped, reduced:    {}", self.dominant_unfloored_reduced);
        s
    }
}

/// `M` of two schemes side by side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub m_a: u64,
    pub m_b: u64,
    /// `M_b - M_a`.
    pub difference: i64,
}

pub fn compare(base: &BoundScenario, a: BoundScheme, b: BoundScheme) -> Result<Comparison, ParamError> {
    let m_a = m_after_projection(&BoundScenario { scheme: a, ..*base })?;
    let m_b = m_after_projection(&BoundScenario { scheme: b, ..*base })?;
    Ok(Comparison {
        a: a.name().to_string(),
        b: b.name().to_string(),
        m_a,
        m_b,
        difference: m_b as i64 - m_a as i64,
    })
}
