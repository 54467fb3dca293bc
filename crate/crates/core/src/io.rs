//! JSON schemas for presentations, twist data, modules and polynomials.
//!
//! Generator indices are one-based in every file format.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ncpoly::{Monomial, NCPoly, Presentation};
use crate::series::{format_rational, parse_rational, SeriesMatrix, SeriesScalar};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermFile {
    pub coeff: String,
    pub h_pow: usize,
    pub expo: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RelationFile {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<TermFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PresentationFile {
    pub name: String,
    pub trunc_order: usize,
    pub generators: Vec<String>,
    pub relations: Vec<RelationFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TwistTermFile {
    pub sign: i64,
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TwistFile {
    pub base: PresentationFile,
    pub r: Vec<TwistTermFile>,
}

/// `actions[g][row][col]` is a series (coefficients by h-power).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModuleFile {
    #[serde(default)]
    pub name: String,
    pub rank: usize,
    pub actions: Vec<Vec<Vec<Vec<String>>>>,
}

pub fn poly_to_terms(p: &NCPoly) -> Vec<TermFile> {
    let mut out = Vec::new();
    for (m, c) in p.terms() {
        for (k, x) in c.coeffs().iter().enumerate() {
            if !num_traits::Zero::is_zero(x) {
                out.push(TermFile { coeff: format_rational(x), h_pow: k, expo: m.0.clone() });
            }
        }
    }
    out
}

/// Terms above `order` must vanish unless `drop_high` is set.
pub fn poly_from_terms(terms: &[TermFile], n: usize, order: usize, drop_high: bool) -> Result<NCPoly> {
    let mut p = NCPoly::zero(n, order);
    for t in terms {
        if t.expo.len() != n {
            return Err(Error::Parse(format!("exponent vector {:?} has length {}, expected {n}", t.expo, t.expo.len())));
        }
        let c = parse_rational(&t.coeff)?;
        if t.h_pow > order {
            if drop_high || num_traits::Zero::is_zero(&c) {
                continue;
            }
            return Err(Error::Parse(format!("term h^{} exceeds truncation order {order}", t.h_pow)));
        }
        p.add_term(Monomial(t.expo.clone()), &SeriesScalar::monomial(c, t.h_pow, order));
    }
    Ok(p)
}

impl PresentationFile {
    pub fn max_h_power(&self) -> usize {
        self.relations.iter().flat_map(|r| r.terms.iter().map(|t| t.h_pow)).max().unwrap_or(0)
    }

    /// Builds the presentation at `trunc` (default: the file's own order).
    pub fn to_presentation(&self, trunc: Option<usize>) -> Result<Presentation> {
        let order = trunc.unwrap_or(self.trunc_order);
        let rel = self.relation_map(order)?;
        Presentation::new(self.name.clone(), self.generators.clone(), order, rel)
    }

    /// Unvalidated variant for negative controls.
    pub fn to_presentation_unchecked(&self, trunc: Option<usize>) -> Result<Presentation> {
        let order = trunc.unwrap_or(self.trunc_order);
        let rel = self.relation_map(order)?;
        Presentation::new_unchecked(self.name.clone(), self.generators.clone(), order, rel)
    }

    fn relation_map(&self, order: usize) -> Result<BTreeMap<(usize, usize), NCPoly>> {
        let n = self.generators.len();
        let mut rel: BTreeMap<(usize, usize), NCPoly> = BTreeMap::new();
        for r in &self.relations {
            if r.i == 0 || r.j == 0 || r.i >= r.j || r.j > n {
                return Err(Error::Parse(format!("relation ({}, {}) must satisfy 1 ≤ i < j ≤ {n}", r.i, r.j)));
            }
            let p = poly_from_terms(&r.terms, n, order, false)?;
            rel.entry((r.i - 1, r.j - 1)).or_insert_with(|| NCPoly::zero(n, order)).add_assign(&p);
        }
        Ok(rel)
    }

    pub fn from_presentation(p: &Presentation) -> Self {
        let relations = p
            .relations()
            .into_iter()
            .map(|((i, j), g)| RelationFile { i: i + 1, j: j + 1, terms: poly_to_terms(&g) })
            .collect();
        PresentationFile {
            name: p.name().to_string(),
            trunc_order: p.trunc_order(),
            generators: p.names().to_vec(),
            relations,
        }
    }
}

pub fn parse_presentation(text: &str, trunc: Option<usize>) -> Result<Presentation> {
    let f: PresentationFile = parse_json(text)?;
    f.to_presentation(trunc)
}

pub fn presentation_to_json(p: &Presentation) -> serde_json::Value {
    serde_json::to_value(PresentationFile::from_presentation(p)).expect("serialisable")
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

pub fn series_to_json(s: &SeriesScalar) -> Vec<String> {
    s.to_strings()
}

impl ModuleFile {
    pub fn to_matrices(&self, order: usize) -> Result<Vec<SeriesMatrix>> {
        self.actions
            .iter()
            .enumerate()
            .map(|(g, rows)| {
                if rows.len() != self.rank || rows.iter().any(|r| r.len() != self.rank) {
                    return Err(Error::Parse(format!("action of generator {} is not {}x{}", g + 1, self.rank, self.rank)));
                }
                let rows = rows
                    .iter()
                    .map(|r| r.iter().map(|s| SeriesScalar::from_strings(s, order)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                if self.rank == 0 {
                    return Ok(SeriesMatrix::zeros(0, 0, order));
                }
                SeriesMatrix::from_rows(rows, order)
            })
            .collect()
    }
}
