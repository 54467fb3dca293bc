//! Koszul resolutions of the trivial module and their h-deformations.
//!
//! A chain in `U_h ⊗ Λ^q` is a map from exterior indices to PBW polynomials;
//! differentials are left-module maps stored by their values on `1 ⊗ ω`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hopf::FPresentation;
use crate::io::{poly_from_terms, poly_to_terms, TermFile};
use crate::ncpoly::{Monomial, NCPoly, Presentation};
use crate::series::{int, Rational, SeriesScalar};

/// Strictly increasing tuple of generator indices, a basis vector of `Λ^q`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ExteriorIndex(pub Vec<usize>);

impl ExteriorIndex {
    pub fn new(mut v: Vec<usize>) -> Option<Self> {
        let before = v.clone();
        v.sort_unstable();
        v.dedup();
        (v == before).then_some(ExteriorIndex(v))
    }

    pub fn empty() -> Self {
        ExteriorIndex(Vec::new())
    }

    pub fn top(n: usize) -> Self {
        ExteriorIndex((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    /// All `q`-subsets of `0..n` in lexicographic order.
    pub fn all(n: usize, q: usize) -> Vec<ExteriorIndex> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(q);
        subsets(n, q, 0, &mut cur, &mut out);
        out
    }

    pub fn remove_at(&self, k: usize) -> ExteriorIndex {
        let mut v = self.0.clone();
        v.remove(k);
        ExteriorIndex(v)
    }

    /// `e_a ∧ self` rewritten in increasing order, with its sign; `None` if `a` repeats.
    pub fn wedge_front(&self, a: usize) -> Option<(i64, ExteriorIndex)> {
        match self.0.binary_search(&a) {
            Ok(_) => None,
            Err(pos) => {
                let mut v = self.0.clone();
                v.insert(pos, a);
                Some((if pos % 2 == 0 { 1 } else { -1 }, ExteriorIndex(v)))
            }
        }
    }

    /// Complement in `0..n`.
    pub fn complement(&self, n: usize) -> ExteriorIndex {
        ExteriorIndex((0..n).filter(|a| !self.contains(*a)).collect())
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|a| a + 1).collect()
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0.iter().map(|&a| names.get(a).cloned().unwrap_or_else(|| format!("e{}", a + 1))).collect::<Vec<_>>().join("∧")
    }
}

fn subsets(n: usize, q: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<ExteriorIndex>) {
    if cur.len() == q {
        out.push(ExteriorIndex(cur.clone()));
        return;
    }
    for a in start..n {
        if n - a < q - cur.len() {
            break;
        }
        cur.push(a);
        subsets(n, q, a + 1, cur, out);
        cur.pop();
    }
}

/// Element of `U_h ⊗ Λ^q`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Chain {
    terms: BTreeMap<ExteriorIndex, NCPoly>,
}

impl Chain {
    pub fn new() -> Self {
        Chain::default()
    }

    pub fn single(w: ExteriorIndex, p: NCPoly) -> Self {
        let mut c = Chain::new();
        c.add(w, &p);
        c
    }

    pub fn terms(&self) -> &BTreeMap<ExteriorIndex, NCPoly> {
        &self.terms
    }

    pub fn get(&self, w: &ExteriorIndex) -> Option<&NCPoly> {
        self.terms.get(w)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, w: ExteriorIndex, p: &NCPoly) {
        if p.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                v.add_assign(p);
                if v.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, p.clone());
            }
        }
    }

    pub fn add_chain(&mut self, other: &Chain) {
        for (w, p) in &other.terms {
            self.add(w.clone(), p);
        }
    }

    pub fn sub_chain(&mut self, other: &Chain) {
        for (w, p) in &other.terms {
            self.add(w.clone(), &p.neg());
        }
    }

    pub fn map(&self, f: impl Fn(&NCPoly) -> NCPoly) -> Chain {
        let mut c = Chain::new();
        for (w, p) in &self.terms {
            c.add(w.clone(), &f(p));
        }
        c
    }

    pub fn neg(&self) -> Chain {
        self.map(NCPoly::neg)
    }

    pub fn mod_h(&self) -> Chain {
        self.map(NCPoly::mod_h)
    }

    pub fn h_coeff(&self, k: usize) -> Chain {
        self.map(|p| p.h_coeff(k))
    }

    pub fn shift_up(&self, k: usize) -> Chain {
        self.map(|p| p.shift_up(k))
    }

    pub fn valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(NCPoly::valuation).min()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.values().filter_map(NCPoly::degree).max()
    }

    pub fn homogeneous_part(&self, d: usize) -> Chain {
        self.map(|p| p.homogeneous_part(d))
    }

    /// Largest absolute value among all rational coefficients.
    pub fn max_abs(&self) -> Rational {
        let mut m = Rational::zero();
        for p in self.terms.values() {
            for c in p.terms().values() {
                for x in c.coeffs() {
                    if x.abs() > m {
                        m = x.abs();
                    }
                }
            }
        }
        m
    }
}

/// `∂_q(1 ⊗ ω)` for every basis vector ω of `Λ^q`, q = 1..n.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    presentation: Arc<Presentation>,
    diffs: Vec<BTreeMap<ExteriorIndex, Chain>>,
}

impl PartialEq for ChainComplex {
    fn eq(&self, other: &Self) -> bool {
        *self.presentation == *other.presentation && self.diffs == other.diffs
    }
}

impl ChainComplex {
    pub fn from_parts(presentation: Arc<Presentation>, diffs: Vec<BTreeMap<ExteriorIndex, Chain>>) -> Self {
        ChainComplex { presentation, diffs }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn presentation_arc(&self) -> Arc<Presentation> {
        self.presentation.clone()
    }

    pub fn n(&self) -> usize {
        self.presentation.n()
    }

    /// Highest degree with a stored differential.
    pub fn len(&self) -> usize {
        self.diffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diffs.is_empty()
    }

    /// `∂_q(1 ⊗ ω)`, q ≥ 1.
    pub fn differential(&self, q: usize, w: &ExteriorIndex) -> &Chain {
        &self.diffs[q - 1][w]
    }

    pub fn differentials(&self, q: usize) -> &BTreeMap<ExteriorIndex, Chain> {
        &self.diffs[q - 1]
    }

    pub fn set_differential(&mut self, q: usize, w: ExteriorIndex, c: Chain) {
        self.diffs[q - 1].insert(w, c);
    }

    /// Applies `∂_q` (q ≥ 1) to a chain of degree q.
    pub fn apply(&self, q: usize, x: &Chain) -> Result<Chain> {
        let p = &self.presentation;
        let mut out = Chain::new();
        for (w, u) in x.terms() {
            let Some(img) = self.diffs[q - 1].get(w) else {
                return Err(Error::NotACycle(format!("{:?} is not a basis vector of degree {q}", w.one_based())));
            };
            for (t, v) in img.terms() {
                out.add(t.clone(), &p.mul(u, v)?);
            }
        }
        Ok(out)
    }

    /// Counit on a degree-0 chain.
    pub fn augment(&self, x: &Chain) -> SeriesScalar {
        x.get(&ExteriorIndex::empty()).map(NCPoly::constant_term).unwrap_or_else(|| SeriesScalar::zero(self.presentation.trunc_order()))
    }
}

/// Coefficient data used for the bracket part of the Koszul differential.
fn bracket_coefficient(p: &Presentation, i: usize, j: usize, a: usize, h_scaled: bool) -> SeriesScalar {
    let order = p.trunc_order();
    if h_scaled {
        // h·C where C is the h^1 linear coefficient of the bracket.
        let c = p.bracket(i, j).coeff(&Monomial::generator(p.n(), a)).coeff(1);
        SeriesScalar::monomial(c, 1, order)
    } else {
        SeriesScalar::constant(p.structure_constant(i, j, a).clone(), order)
    }
}

/// The two-sum Koszul formula on `1 ⊗ ω`.
fn koszul_entry(p: &Presentation, w: &ExteriorIndex, h_scaled: bool) -> Chain {
    let n = p.n();
    let order = p.trunc_order();
    let mut c = Chain::new();
    for k in 0..w.len() {
        let sign = if k % 2 == 0 { int(1) } else { int(-1) };
        c.add(w.remove_at(k), &p.gen(w.0[k]).scale_rat(&sign));
    }
    for k in 0..w.len() {
        for l in (k + 1)..w.len() {
            let rest = w.remove_at(l).remove_at(k);
            let sign = if (k + l) % 2 == 0 { 1 } else { -1 };
            for a in 0..n {
                let coef = bracket_coefficient(p, w.0[k], w.0[l], a, h_scaled);
                if coef.is_zero() {
                    continue;
                }
                if let Some((s, target)) = rest.wedge_front(a) {
                    let v = coef.scale(&int(sign * s));
                    c.add(target, &NCPoly::constant(v, n).with_order(order));
                }
            }
        }
    }
    c
}

fn build_classical(p: Arc<Presentation>, h_scaled: bool) -> ChainComplex {
    let n = p.n();
    let diffs = (1..=n)
        .map(|q| ExteriorIndex::all(n, q).into_iter().map(|w| {
            let e = koszul_entry(&p, &w, h_scaled);
            (w, e)
        }).collect())
        .collect();
    ChainComplex { presentation: p, diffs }
}

/// Classical Koszul complex built from the structure constants of `p`.
pub fn classical_koszul(p: &Presentation) -> ChainComplex {
    build_classical(Arc::new(p.clone()), false)
}

/// Euler-homotopy preimage of a top-degree symbol: `η(s ⊗ ω) = Σ_j ∂_j s ⊗ e_j ∧ ω / (d + |ω|)`.
fn homotopy(sym: &Chain, d: usize, order: usize) -> Chain {
    let mut out = Chain::new();
    for (w, poly) in sym.terms() {
        let denom = Rational::from_integer((d + w.len()).into());
        for (m, c) in poly.terms() {
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let Some((s, target)) = w.wedge_front(j) else { continue };
                let coef = c.scale(&(int(s * e as i64) / &denom));
                out.add(target, &NCPoly::monomial(m.without(j), coef.with_order(order)));
            }
        }
    }
    out
}

/// Solves `∂_q^cl y = z` for a classical (h-free) cycle `z`, degree by degree.
fn classical_solve(c: &ChainComplex, q: usize, z: &Chain) -> Result<Chain> {
    let order = c.presentation().trunc_order();
    let mut w = z.clone();
    let mut y = Chain::new();
    while let Some(d) = w.degree() {
        let sym = w.homogeneous_part(d);
        let eta = homotopy(&sym, d, order);
        if eta.is_zero() {
            return Err(Error::NotACycle(format!("residual of degree {d} in homological degree {} has no preimage", q - 1)));
        }
        let img = c.apply(q, &eta)?.mod_h();
        w.sub_chain(&img);
        y.add_chain(&eta);
        if let Some(nd) = w.degree() {
            if nd >= d {
                return Err(Error::CapOverflow { cap: d, what: format!("residual degree failed to decrease in degree {q}") });
            }
        }
    }
    Ok(y)
}

/// Finds `x` with `∂_q x = target`, order by order in h.
pub fn lift_preimage(c: &ChainComplex, q: usize, target: &Chain) -> Result<Chain> {
    if q == 0 || q > c.len() {
        return Err(Error::NotACycle(format!("no differential in degree {q}")));
    }
    if q >= 2 && !c.apply(q - 1, target)?.is_zero() {
        return Err(Error::NotACycle("target is not a cycle".into()));
    }
    if q == 1 && !c.augment(target).is_zero() {
        return Err(Error::NotACycle("target has nonzero augmentation".into()));
    }
    let order = c.presentation().trunc_order();
    let mut resid = target.clone();
    let mut x = Chain::new();
    for r in 0..=order {
        let z = resid.h_coeff(r);
        if z.is_zero() {
            continue;
        }
        let y = classical_solve(c, q, &z)?.shift_up(r);
        resid.sub_chain(&c.apply(q, &y)?);
        x.add_chain(&y);
    }
    if !resid.is_zero() {
        return Err(Error::NotACycle("residual survived all h-orders".into()));
    }
    Ok(x)
}

/// `Σ_a P^a_ij ⊗ e_a` with `g_ij − linear = Σ_a P^a_ij e_a`, factoring out the highest generator.
fn q2_correction(p: &Presentation, i: usize, j: usize, h_scaled: bool) -> Chain {
    let mut c = Chain::new();
    for (m, coef) in p.bracket(i, j).terms() {
        let mut coef = coef.clone();
        if m.degree() == 1 {
            let a = m.first().expect("degree one");
            coef -= &bracket_coefficient(p, i, j, a, h_scaled);
            if coef.is_zero() {
                continue;
            }
        }
        let l = m.last().expect("brackets have no constant terms");
        c.add(ExteriorIndex(vec![l]), &NCPoly::monomial(m.without(l), coef));
    }
    c
}

fn deform(p: Arc<Presentation>, h_scaled: bool) -> Result<ChainComplex> {
    let n = p.n();
    let mut c = build_classical(p.clone(), h_scaled);
    for q in 2..=n {
        for w in ExteriorIndex::all(n, q) {
            let shaped = c.differential(q, &w).clone();
            let fixed = if q == 2 {
                let mut e = shaped;
                e.sub_chain(&q2_correction(&p, w.0[0], w.0[1], h_scaled));
                e
            } else {
                let defect = c.apply(q - 1, &shaped)?;
                if defect.is_zero() {
                    shaped
                } else {
                    let mut e = shaped;
                    e.add_chain(&lift_preimage(&c, q - 1, &defect.neg())?);
                    e
                }
            };
            c.set_differential(q, w, fixed);
        }
    }
    Ok(c)
}

/// Deformed Koszul resolution of the trivial `U_h`-module.
pub fn deform_koszul(p: &Presentation) -> Result<ChainComplex> {
    deform(Arc::new(p.clone()), false)
}

/// Result of checking the two complex invariants.
#[derive(Clone, Debug)]
pub struct ComplexReport {
    /// `(q, ω)` with `∂_{q-1}∂_q(1⊗ω) ≠ 0`.
    pub dd_failures: Vec<(usize, ExteriorIndex)>,
    pub dd_max_abs: Rational,
    /// `(q, ω)` whose reduction mod h differs from the classical entry.
    pub limit_failures: Vec<(usize, ExteriorIndex)>,
}

impl ComplexReport {
    pub fn is_clean(&self) -> bool {
        self.dd_failures.is_empty() && self.limit_failures.is_empty()
    }
}

fn check_against(c: &ChainComplex, reference: &ChainComplex) -> Result<ComplexReport> {
    let mut dd_failures = Vec::new();
    let mut dd_max_abs = Rational::zero();
    let mut limit_failures = Vec::new();
    for q in 1..=c.len() {
        for (w, img) in c.differentials(q) {
            if q == 1 {
                let eps = c.augment(img);
                if !eps.is_zero() {
                    dd_failures.push((q, w.clone()));
                    for x in eps.coeffs() {
                        if x.abs() > dd_max_abs {
                            dd_max_abs = x.abs();
                        }
                    }
                }
            } else {
                let dd = c.apply(q - 1, img)?;
                if !dd.is_zero() {
                    dd_max_abs = dd_max_abs.max(dd.max_abs());
                    dd_failures.push((q, w.clone()));
                }
            }
            if img.mod_h() != reference.differential(q, w).mod_h() {
                limit_failures.push((q, w.clone()));
            }
        }
    }
    Ok(ComplexReport { dd_failures, dd_max_abs, limit_failures })
}

/// Verifies `∂∂ = 0` exactly and that `h = 0` recovers the classical Koszul complex.
pub fn complex_check(c: &ChainComplex) -> Result<ComplexReport> {
    let reference = classical_koszul(c.presentation());
    check_against(c, &reference)
}

/// Outcome of the QFSHA construction and its ∨ companion.
#[derive(Clone, Debug)]
pub struct QfshaResolution {
    pub f_complex: ChainComplex,
    pub vee_complex: ChainComplex,
    /// Entries whose correction `α = y/h` has a constant term not divisible by h.
    pub alpha_outside_ideal: Vec<(usize, ExteriorIndex)>,
    /// Entries where `∂ = h·∂̌` fails after rescaling.
    pub conjugation_failures: Vec<(usize, ExteriorIndex)>,
}

/// Rescales an F-side chain entry to the ∨ side: divide by h, then `x = h·ě`.
fn rescale_to_vee(c: &Chain, order: usize) -> Result<Chain> {
    let mut out = Chain::new();
    for (w, poly) in c.terms() {
        let mut v = NCPoly::zero(poly.nvars(), order);
        for (m, coef) in poly.terms() {
            let d = m.degree();
            for (k, x) in coef.coeffs().iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if k + d == 0 {
                    return Err(Error::InexactDivision(format!("entry on {:?} has an h-free constant", w.one_based())));
                }
                let e = k + d - 1;
                if e <= order {
                    v.add_term(m.clone(), &SeriesScalar::monomial(x.clone(), e, order));
                }
            }
        }
        out.add(w.clone(), &v);
    }
    Ok(out)
}

/// Resolution of the trivial module over a QFSHA with explicit h-scaled brackets,
/// plus the companion complex over its ∨ presentation.
///
/// The F side is built one h-order deeper than requested so that rescaling
/// (which lowers h-orders of constant terms by one) stays exact through order N.
pub fn deform_koszul_qfsha(f: &FPresentation) -> Result<QfshaResolution> {
    let p = f.presentation();
    let order = p.trunc_order();
    let deep = Arc::new(p.with_order(order + 1)?);
    let fc_deep = deform(deep.clone(), true)?;
    let vee = Arc::new(crate::hopf::vee_presentation(f)?);
    let n = p.n();
    let mut alpha_outside_ideal = Vec::new();
    let mut vee_diffs = Vec::new();
    let mut f_diffs = Vec::new();
    let shallow = Arc::new(p.clone());
    for q in 1..=n {
        let mut vd = BTreeMap::new();
        let mut fd = BTreeMap::new();
        for (w, img) in fc_deep.differentials(q) {
            let shaped = koszul_entry(&deep, w, true);
            let mut y = img.clone();
            y.sub_chain(&shaped);
            if q >= 2 && !y.is_zero() {
                // y = h·α; α ∈ I means its x-constant part is divisible by h.
                let ok = y.terms().values().all(|poly| poly.constant_term().valuation().is_none_or(|v| v >= 2));
                if !ok {
                    alpha_outside_ideal.push((q, w.clone()));
                }
            }
            vd.insert(w.clone(), rescale_to_vee(img, order)?);
            fd.insert(w.clone(), img.map(|p| p.with_order(order)));
        }
        vee_diffs.push(vd);
        f_diffs.push(fd);
    }
    let vee_complex = ChainComplex { presentation: vee.clone(), diffs: rewrap(vee_diffs, n, order) };
    let f_complex = ChainComplex { presentation: shallow, diffs: f_diffs };
    let conjugation_failures = conjugation_check(&f_complex, &vee_complex);
    Ok(QfshaResolution { f_complex, vee_complex, alpha_outside_ideal, conjugation_failures })
}

fn rewrap(diffs: Vec<BTreeMap<ExteriorIndex, Chain>>, _n: usize, order: usize) -> Vec<BTreeMap<ExteriorIndex, Chain>> {
    diffs.into_iter().map(|d| d.into_iter().map(|(w, c)| (w, c.map(|p| p.with_order(order)))).collect()).collect()
}

/// Checks `∂_q = h·∂̌_q` term by term wherever both sides are known at order N.
fn conjugation_check(f: &ChainComplex, v: &ChainComplex) -> Vec<(usize, ExteriorIndex)> {
    let order = f.presentation().trunc_order();
    let mut bad = Vec::new();
    for q in 1..=f.len() {
        for (w, fimg) in f.differentials(q) {
            let vimg = v.differential(q, w);
            let mut ok = true;
            let targets: std::collections::BTreeSet<_> = fimg.terms().keys().chain(vimg.terms().keys()).cloned().collect();
            for t in targets {
                let zero_f = NCPoly::zero(f.n(), order);
                let fp = fimg.get(&t).unwrap_or(&zero_f);
                let vp = vimg.get(&t).unwrap_or(&zero_f);
                let monos: std::collections::BTreeSet<_> = fp.terms().keys().chain(vp.terms().keys()).cloned().collect();
                for m in monos {
                    let d = m.degree();
                    let fc = fp.coeff(&m);
                    let vc = vp.coeff(&m);
                    // F order k  ↔  ∨ order k + d − 1
                    for k in 0..=order {
                        if k + d == 0 {
                            if !fc.coeff(k).is_zero() {
                                ok = false;
                            }
                            continue;
                        }
                        let e = k + d - 1;
                        if e <= order && fc.coeff(k) != vc.coeff(e) {
                            ok = false;
                        }
                    }
                    for e in 0..=order {
                        if e + 1 >= d {
                            let k = e + 1 - d;
                            if k <= order && fc.coeff(k) != vc.coeff(e) {
                                ok = false;
                            }
                        } else if !vc.coeff(e).is_zero() {
                            ok = false;
                        }
                    }
                }
            }
            if !ok {
                bad.push((q, w.clone()));
            }
        }
    }
    bad
}

/// Serialised complex: `differentials[q-1]` lists `{source, targets}` with one-based subsets.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComplexFile {
    pub schema: u32,
    pub presentation: String,
    pub trunc_order: usize,
    pub n: usize,
    pub differentials: Vec<Vec<EntryFile>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EntryFile {
    pub source: Vec<usize>,
    pub targets: Vec<TargetFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TargetFile {
    pub subset: Vec<usize>,
    pub poly: Vec<TermFile>,
}

impl ComplexFile {
    pub fn from_complex(c: &ChainComplex) -> Self {
        let differentials = (1..=c.len())
            .map(|q| {
                c.differentials(q)
                    .iter()
                    .map(|(w, img)| EntryFile {
                        source: w.one_based(),
                        targets: img.terms().iter().map(|(t, p)| TargetFile { subset: t.one_based(), poly: poly_to_terms(p) }).collect(),
                    })
                    .collect()
            })
            .collect();
        ComplexFile {
            schema: 1,
            presentation: c.presentation().name().to_string(),
            trunc_order: c.presentation().trunc_order(),
            n: c.n(),
            differentials,
        }
    }

    pub fn to_complex(&self, p: Arc<Presentation>) -> Result<ChainComplex> {
        let n = p.n();
        let order = p.trunc_order();
        if n != self.n || order != self.trunc_order {
            return Err(Error::Parse("complex does not match the presentation".into()));
        }
        let parse_subset = |v: &[usize]| -> Result<ExteriorIndex> {
            if v.iter().any(|&a| a == 0 || a > n) {
                return Err(Error::Parse(format!("subset {v:?} out of range")));
            }
            ExteriorIndex::new(v.iter().map(|a| a - 1).collect()).ok_or_else(|| Error::Parse(format!("subset {v:?} not increasing")))
        };
        let mut diffs = Vec::new();
        for entries in &self.differentials {
            let mut d = BTreeMap::new();
            for e in entries {
                let mut chain = Chain::new();
                for t in &e.targets {
                    chain.add(parse_subset(&t.subset)?, &poly_from_terms(&t.poly, n, order, false)?);
                }
                d.insert(parse_subset(&e.source)?, chain);
            }
            diffs.push(d);
        }
        Ok(ChainComplex { presentation: p, diffs })
    }
}
