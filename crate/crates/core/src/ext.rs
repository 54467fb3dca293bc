//! Dual complexes, the modular character θ, module-valued Ext and Tor, and
//! the Poincaré duality comparison.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hopf::{vee_presentation, FPresentation};
use crate::koszul::{deform_koszul, deform_koszul_qfsha, Chain, ChainComplex, ExteriorIndex};
use crate::linalg::{Echelon, SparseRow};
use crate::ncpoly::{Monomial, NCPoly, Presentation};
use crate::series::{binomial, Divisor, Rational, SeriesMatrix, SeriesScalar};

/// Default PBW-degree cap for θ witnesses.
pub const DEFAULT_WITNESS_DEGREE: usize = 8;

/// Transposed differentials `^t∂_q : Hom(Λ^{q−1}) → Hom(Λ^q)` with coefficients on the right.
///
/// `codiffs[q-1][τ][ω] = u_{ωτ}` where `∂_q(1⊗ω) = Σ_τ u_{ωτ} ⊗ τ`.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    presentation: Arc<Presentation>,
    codiffs: Vec<BTreeMap<ExteriorIndex, BTreeMap<ExteriorIndex, NCPoly>>>,
}

pub fn transpose_complex(c: &ChainComplex) -> CochainComplex {
    let n = c.n();
    let codiffs = (1..=c.len())
        .map(|q| {
            let mut m: BTreeMap<ExteriorIndex, BTreeMap<ExteriorIndex, NCPoly>> =
                ExteriorIndex::all(n, q - 1).into_iter().map(|t| (t, BTreeMap::new())).collect();
            for (w, img) in c.differentials(q) {
                for (t, u) in img.terms() {
                    m.get_mut(t).expect("all subsets present").insert(w.clone(), u.clone());
                }
            }
            m
        })
        .collect();
    CochainComplex { presentation: c.presentation_arc(), codiffs }
}

impl CochainComplex {
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn n(&self) -> usize {
        self.presentation.n()
    }

    pub fn len(&self) -> usize {
        self.codiffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codiffs.is_empty()
    }

    /// `^t∂_q(τ* ⊗ 1) = Σ_ω ω* ⊗ u_{ωτ}`.
    pub fn codifferential(&self, q: usize, t: &ExteriorIndex) -> &BTreeMap<ExteriorIndex, NCPoly> {
        &self.codiffs[q - 1][t]
    }

    /// `(^t∂_q φ)(ω) = Σ_τ u_{ωτ} φ(τ)` for a cochain `φ` of degree q−1.
    pub fn apply(&self, q: usize, phi: &Chain) -> Result<Chain> {
        let p = &self.presentation;
        let mut out = Chain::new();
        for (t, a) in phi.terms() {
            let Some(col) = self.codiffs[q - 1].get(t) else {
                return Err(Error::NotACycle(format!("{:?} is not a basis vector of degree {}", t.one_based(), q - 1)));
            };
            for (w, u) in col {
                out.add(w.clone(), &p.mul(u, a)?);
            }
        }
        Ok(out)
    }

    /// Checks `^t∂_{q+1} ∘ ^t∂_q = 0` on every basis cochain.
    pub fn is_complex(&self) -> Result<bool> {
        let order = self.presentation.trunc_order();
        for q in 1..self.len() {
            for t in self.codiffs[q - 1].keys() {
                let phi = Chain::single(t.clone(), NCPoly::one(self.n(), order));
                if !self.apply(q + 1, &self.apply(q, &phi)?)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Transposes back to the left complex.
    pub fn to_chain_complex(&self) -> ChainComplex {
        let n = self.n();
        let diffs = (1..=self.len())
            .map(|q| {
                let mut m: BTreeMap<ExteriorIndex, Chain> = ExteriorIndex::all(n, q).into_iter().map(|w| (w, Chain::new())).collect();
                for (t, col) in &self.codiffs[q - 1] {
                    for (w, u) in col {
                        m.get_mut(w).expect("all subsets present").add(t.clone(), u);
                    }
                }
                m
            })
            .collect();
        ChainComplex::from_parts(self.presentation.clone(), diffs)
    }
}

/// θ together with its witnesses: `e_i − θ(e_i) = Σ_τ u_τ μ_i(τ)` where `u_τ` are the top entries.
#[derive(Clone, Debug)]
pub struct Character {
    pub theta: Vec<SeriesScalar>,
    pub degree: usize,
    /// Representative σ of the generating top class (always 1 here).
    pub cocycle: NCPoly,
    pub witnesses: Vec<Chain>,
}

impl Character {
    /// Multiplicative extension to PBW monomials.
    pub fn eval_monomial(&self, m: &Monomial) -> SeriesScalar {
        let order = self.cocycle.trunc_order();
        let mut v = SeriesScalar::one(order);
        for (i, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                v = &v * &self.theta[i];
            }
        }
        v
    }

    pub fn eval(&self, p: &NCPoly) -> SeriesScalar {
        let mut v = SeriesScalar::zero(self.cocycle.trunc_order());
        for (m, c) in p.terms() {
            v += &(c * &self.eval_monomial(m));
        }
        v
    }

    /// Relations `(i, j)` with `θ(g_ij) ≠ 0`; empty for a genuine character.
    pub fn relation_failures(&self, p: &Presentation) -> Vec<(usize, usize)> {
        p.relations().into_iter().filter(|(_, g)| !self.eval(g).is_zero()).map(|(k, _)| k).collect()
    }
}

struct TopEntry {
    tau: ExteriorIndex,
    sign: Rational,
    rest: NCPoly,
}

/// Right-ideal reduction modulo the entries of `∂_n(1 ⊗ top)`.
struct TopReducer<'a> {
    c: &'a ChainComplex,
    entries: Vec<TopEntry>,
    cap: usize,
}

impl<'a> TopReducer<'a> {
    fn new(c: &'a ChainComplex, cap: usize) -> Result<Self> {
        let n = c.n();
        if c.len() != n {
            return Err(Error::NoUnitCocycle("complex does not reach the top degree".into()));
        }
        let top = ExteriorIndex::top(n);
        let img = c.differential(n, &top);
        let mut entries: Vec<Option<TopEntry>> = (0..n).map(|_| None).collect();
        for (tau, u) in img.terms() {
            let lin = u.mod_h().homogeneous_part(1);
            let shape_err = || Error::NoUnitCocycle(format!("top entry on {:?} is not ±e_j plus lower terms", tau.one_based()));
            if lin.len() != 1 {
                return Err(shape_err());
            }
            let (m, coef) = lin.terms().iter().next().expect("one term");
            let j = m.first().expect("degree one");
            let s = coef.constant_term().clone();
            if (s != Rational::from_integer(1.into()) && s != Rational::from_integer((-1).into())) || tau.complement(n).0 != vec![j] {
                return Err(shape_err());
            }
            let rest = u.sub(&p_gen_scaled(c.presentation(), j, &s));
            if rest.mod_h().degree().unwrap_or(0) > 0 {
                return Err(shape_err());
            }
            entries[j] = Some(TopEntry { tau: tau.clone(), sign: s, rest });
        }
        let entries = entries
            .into_iter()
            .enumerate()
            .map(|(j, e)| e.ok_or_else(|| Error::NoUnitCocycle(format!("no top entry involves e{}", j + 1))))
            .collect::<Result<Vec<_>>>()?;
        Ok(TopReducer { c, entries, cap })
    }

    /// Reduces `x` to a constant modulo `Σ_τ u_τ A`, returning it with the witness μ.
    fn reduce(&self, x: &NCPoly) -> Result<(SeriesScalar, Chain)> {
        let p = self.c.presentation();
        let order = p.trunc_order();
        let mut x = x.clone();
        let mut mu = Chain::new();
        loop {
            let mut pick: Option<(usize, usize, Monomial)> = None;
            for (m, c) in x.terms() {
                if m.is_one() {
                    continue;
                }
                let Some(r) = c.valuation() else { continue };
                let d = m.degree();
                let better = match &pick {
                    None => true,
                    Some((br, bd, bm)) => r < *br || (r == *br && (d > *bd || (d == *bd && m > bm))),
                };
                if better {
                    pick = Some((r, d, m.clone()));
                }
            }
            let Some((r, _, m)) = pick else { break };
            let j = m.first().expect("nonconstant");
            let tail = m.without(j);
            if tail.degree() > self.cap {
                return Err(Error::CapOverflow { cap: self.cap, what: "theta witness degree".into() });
            }
            let e = &self.entries[j];
            let coef = SeriesScalar::monomial(x.coeff(&m).coeff(r), r, order);
            let step = NCPoly::monomial(tail.clone(), coef.scale(&e.sign));
            x.add_term(m.clone(), &-&coef);
            x.sub_assign(&p.mul(&e.rest, &step)?);
            mu.add(e.tau.clone(), &step);
        }
        Ok((x.constant_term(), mu))
    }
}

fn p_gen_scaled(p: &Presentation, j: usize, s: &Rational) -> NCPoly {
    p.gen(j).scale_rat(s)
}

/// Extracts θ from the top differential of a resolution and verifies every witness.
pub fn theta_from_complex(c: &ChainComplex, witness_cap: usize) -> Result<Character> {
    let p = c.presentation();
    let n = p.n();
    let order = p.trunc_order();
    let reducer = TopReducer::new(c, witness_cap)?;
    let top = ExteriorIndex::top(n);
    let mut theta = Vec::with_capacity(n);
    let mut witnesses = Vec::with_capacity(n);
    for i in 0..n {
        let (t, mu) = reducer.reduce(&p.gen(i))?;
        // e_i − θ_i = Σ_τ u_τ μ(τ)
        let mut lhs = p.gen(i);
        lhs.add_term(Monomial::one(n), &-&t);
        let mut rhs = NCPoly::zero(n, order);
        for (tau, m) in mu.terms() {
            let u = c.differential(n, &top).get(tau).expect("witness on a top entry");
            rhs.add_assign(&p.mul(u, m)?);
        }
        if lhs != rhs {
            return Err(Error::Inconsistent(format!("witness for e{} does not verify", i + 1)));
        }
        theta.push(t);
        witnesses.push(mu);
    }
    Ok(Character { theta, degree: n, cocycle: NCPoly::one(n, order), witnesses })
}

/// θ of `U_h` from its deformed Koszul resolution.
pub fn theta_character(p: &Presentation, witness_cap: usize) -> Result<Character> {
    theta_from_complex(&deform_koszul(p)?, witness_cap)
}

/// Comparison `θ_F(x_i) = h·θ_{F∨}(ě_i)`.
#[derive(Clone, Debug)]
pub struct LinkReport {
    pub theta_f: Vec<SeriesScalar>,
    pub theta_vee: Vec<SeriesScalar>,
    /// Generators where some coefficient disagrees.
    pub mismatches: Vec<usize>,
    pub alpha_outside_ideal: usize,
    pub conjugation_failures: usize,
}

impl LinkReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.conjugation_failures == 0
    }
}

pub fn theta_link_check(f: &FPresentation, witness_cap: usize) -> Result<LinkReport> {
    let res = deform_koszul_qfsha(f)?;
    let chf = theta_from_complex(&res.f_complex, witness_cap)?;
    let vee = vee_presentation(f)?;
    let chv = theta_character(&vee, witness_cap)?;
    let order = f.presentation().trunc_order();
    let mut mismatches = Vec::new();
    for i in 0..f.presentation().n() {
        let a = &chf.theta[i];
        let b = &chv.theta[i];
        let ok = a.coeff(0).is_zero() && (1..=order).all(|k| a.coeff(k) == b.coeff(k - 1));
        if !ok {
            mismatches.push(i);
        }
    }
    Ok(LinkReport {
        theta_f: chf.theta,
        theta_vee: chv.theta,
        mismatches,
        alpha_outside_ideal: res.alpha_outside_ideal.len(),
        conjugation_failures: res.conjugation_failures.len(),
    })
}

/// Left module of finite rank over the truncated ring.
#[derive(Clone, Debug)]
pub struct ModulePresentation {
    rank: usize,
    order: usize,
    actions: Vec<SeriesMatrix>,
}

impl ModulePresentation {
    /// Validates `ρ(e_i)ρ(e_j) − ρ(e_j)ρ(e_i) = ρ(g_ij)`.
    pub fn new(p: &Presentation, rank: usize, actions: Vec<SeriesMatrix>) -> Result<Self> {
        let order = p.trunc_order();
        if actions.len() != p.n() {
            return Err(Error::InconsistentModule(format!("{} action matrices for {} generators", actions.len(), p.n())));
        }
        if actions.iter().any(|a| a.rows() != rank || a.cols() != rank || a.trunc_order() != order) {
            return Err(Error::InconsistentModule("action matrices have the wrong shape or order".into()));
        }
        let m = ModulePresentation { rank, order, actions };
        for i in 0..p.n() {
            for j in (i + 1)..p.n() {
                let lhs = m.actions[i].mul(&m.actions[j])?.sub(&m.actions[j].mul(&m.actions[i])?);
                if lhs != m.act(p.bracket(i, j))? {
                    return Err(Error::InconsistentModule(format!("relation ({}, {}) fails", i + 1, j + 1)));
                }
            }
        }
        Ok(m)
    }

    /// The trivial module K (every generator acts by 0).
    pub fn trivial(p: &Presentation) -> Self {
        let order = p.trunc_order();
        ModulePresentation { rank: 1, order, actions: vec![SeriesMatrix::zeros(1, 1, order); p.n()] }
    }

    pub fn zero(p: &Presentation) -> Self {
        let order = p.trunc_order();
        ModulePresentation { rank: 0, order, actions: vec![SeriesMatrix::zeros(0, 0, order); p.n()] }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self, i: usize) -> &SeriesMatrix {
        &self.actions[i]
    }

    fn power(&self, m: &SeriesMatrix, e: u32) -> Result<SeriesMatrix> {
        let mut out = SeriesMatrix::identity(self.rank, self.order);
        for _ in 0..e {
            out = out.mul(m)?;
        }
        Ok(out)
    }

    /// `ρ(e^m) = ρ(e_1)^{m_1} ⋯ ρ(e_n)^{m_n}`.
    pub fn act_monomial(&self, m: &Monomial) -> Result<SeriesMatrix> {
        let mut out = SeriesMatrix::identity(self.rank, self.order);
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                out = out.mul(&self.power(&self.actions[i], e)?)?;
            }
        }
        Ok(out)
    }

    pub fn act(&self, p: &NCPoly) -> Result<SeriesMatrix> {
        let mut out = SeriesMatrix::zeros(self.rank, self.rank, self.order);
        for (m, c) in p.terms() {
            let a = self.act_monomial(m)?.scale(c);
            for i in 0..self.rank {
                for j in 0..self.rank {
                    out.add_to(i, j, a.get(i, j));
                }
            }
        }
        Ok(out)
    }
}

/// A finitely generated module over `Q[h]/(h^(N+1))`: `K^free ⊕ ⊕_e K/(h^e)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Homology {
    pub free: usize,
    /// Torsion exponents, ascending, each in `1..=N`.
    pub torsion: Vec<usize>,
}

impl Homology {
    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for Homology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.free > 0 {
            parts.push(if self.free == 1 { "K".to_string() } else { format!("K^{}", self.free) });
        }
        for e in &self.torsion {
            parts.push(format!("K/h^{e}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" ⊕ "))
        }
    }
}

/// Homology at a free module of rank `dim` between `incoming: K^a → K^dim` and `outgoing: K^dim → K^b`.
pub fn homology_at(incoming: Option<&SeriesMatrix>, outgoing: Option<&SeriesMatrix>, dim: usize, order: usize) -> Result<Homology> {
    if dim == 0 {
        return Ok(Homology::default());
    }
    let full = order + 1;
    // kernel of the outgoing map in Smith coordinates: z_i ∈ h^{s_i} K, s_i = N+1−k_i
    let (ks, rinv) = match outgoing.filter(|b| b.rows() > 0) {
        Some(b) => {
            let snf = b.smith_normal_form();
            let ks: Vec<usize> = (0..dim)
                .map(|i| match snf.divisors.get(i) {
                    Some(Divisor::Power(k)) => *k,
                    _ => full,
                })
                .collect();
            (ks, snf.right_inv)
        }
        None => (vec![full; dim], SeriesMatrix::identity(dim, order)),
    };
    let acols = incoming.map_or(0, SeriesMatrix::cols);
    let mut m = SeriesMatrix::zeros(dim, acols + dim, order);
    if let Some(a) = incoming.filter(|a| a.cols() > 0) {
        let ap = rinv.mul(a)?;
        for i in 0..dim {
            let s = full - ks[i];
            for j in 0..acols {
                let v = ap.get(i, j);
                if v.is_zero() {
                    continue;
                }
                let w = v.div_h(s).map_err(|_| Error::Inconsistent("image does not lie in the kernel".into()))?;
                m.set(i, j, w);
            }
        }
    }
    for i in 0..dim {
        if ks[i] < full {
            m.set(i, acols + i, SeriesScalar::h_power(ks[i], order));
        }
    }
    let snf = m.smith_normal_form();
    let mut h = Homology::default();
    for i in 0..dim {
        match snf.divisors.get(i) {
            Some(Divisor::Power(0)) => {}
            Some(Divisor::Power(e)) => h.torsion.push(*e),
            _ => h.free += 1,
        }
    }
    h.torsion.sort_unstable();
    Ok(h)
}

fn index_of(n: usize, q: usize) -> HashMap<ExteriorIndex, usize> {
    ExteriorIndex::all(n, q).into_iter().enumerate().map(|(i, w)| (w, i)).collect()
}

fn place_block(target: &mut SeriesMatrix, r0: usize, c0: usize, block: &SeriesMatrix) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            let v = block.get(i, j);
            if !v.is_zero() {
                target.add_to(r0 + i, c0 + j, v);
            }
        }
    }
}

/// `Ext^q(K, M)` for q = 0..n from `Hom_A(L, M)`: `(δφ)(ω) = Σ_τ ρ(u_{ωτ}) φ(τ)`.
pub fn ext_homology(c: &ChainComplex, m: &ModulePresentation) -> Result<Vec<Homology>> {
    let n = c.n();
    let order = c.presentation().trunc_order();
    let r = m.rank;
    // delta[q] : C^{q-1} → C^q, q = 1..n
    let mut delta: Vec<Option<SeriesMatrix>> = vec![None];
    for q in 1..=n {
        let rows = index_of(n, q);
        let cols = index_of(n, q - 1);
        let mut d = SeriesMatrix::zeros(rows.len() * r, cols.len() * r, order);
        for (w, img) in c.differentials(q) {
            for (t, u) in img.terms() {
                place_block(&mut d, rows[w] * r, cols[t] * r, &m.act(u)?);
            }
        }
        delta.push(Some(d));
    }
    (0..=n)
        .map(|q| {
            let dim = binomial(n as u32, q as u32).to_integer().try_into().unwrap_or(0usize) * r;
            let incoming = if q >= 1 { delta[q].as_ref() } else { None };
            let outgoing = if q < n { delta[q + 1].as_ref() } else { None };
            homology_at(incoming, outgoing, dim, order)
        })
        .collect()
}

/// Presentation of `A^op` on `f_k = e_{n−1−k}` with generators shifted by the character:
/// `f'_k = f_k − θ(f_k)`, so the right module Ω becomes the trivial left `A^op`-module.
pub fn opposite_shifted(p: &Presentation, theta: &[SeriesScalar]) -> Result<Presentation> {
    let n = p.n();
    let order = p.trunc_order();
    let th: Vec<&SeriesScalar> = (0..n).map(|k| &theta[n - 1 - k]).collect();
    let mut rel = BTreeMap::new();
    for k in 0..n {
        for l in (k + 1)..n {
            let (i, j) = (n - 1 - l, n - 1 - k);
            let g = p.bracket(i, j);
            if g.is_zero() {
                continue;
            }
            let mut out = NCPoly::zero(n, order);
            for (m, c) in g.terms() {
                // e^m read in A^op is f^{reversed(m)}; expand each (f'_k + θ_k)^b.
                let b = m.reversed();
                let mut acc = NCPoly::constant(c.clone(), n).with_order(order);
                for (k2, &e) in b.0.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let mut factor = NCPoly::zero(n, order);
                    for a in 0..=e {
                        let mut mono = vec![0u32; n];
                        mono[k2] = a;
                        let mut coef = SeriesScalar::constant(binomial(e, a), order);
                        for _ in 0..(e - a) {
                            coef = &coef * th[k2];
                        }
                        factor.add_term(Monomial(mono), &coef);
                    }
                    acc = ordered_product(&acc, &factor);
                }
                out.add_assign(&acc);
            }
            if !out.constant_term().is_zero() {
                return Err(Error::Inconsistent(format!("θ does not annihilate relation ({}, {})", i + 1, j + 1)));
            }
            out.add_term(Monomial::one(n), &-&out.constant_term());
            rel.insert((k, l), out);
        }
    }
    let names: Vec<String> = (0..n).map(|k| format!("f{}", k + 1)).collect();
    Presentation::new(format!("{}-op", p.name()), names, order, rel)
}

/// Product `a·b` where every monomial of `b` uses only variables after those of `a`.
fn ordered_product(a: &NCPoly, b: &NCPoly) -> NCPoly {
    let mut out = NCPoly::zero(a.nvars(), a.trunc_order());
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            out.add_term(ma.mul_commutative(mb), &(ca * cb));
        }
    }
    out
}

/// `Tor_q(Ω, M)` for q = 0..n, with Ω the right module K on which `e_i` acts by `θ(e_i)`.
pub fn tor_homology(p: &Presentation, theta: &[SeriesScalar], m: &ModulePresentation) -> Result<Vec<Homology>> {
    let n = p.n();
    let order = p.trunc_order();
    let r = m.rank;
    let op = opposite_shifted(p, theta)?;
    let c = deform_koszul(&op)?;
    // ρ(f'_k) = ρ(e_{n−1−k}) − θ(e_{n−1−k})
    let shifted: Vec<SeriesMatrix> = (0..n)
        .map(|k| {
            let e = n - 1 - k;
            let mut a = m.actions[e].clone();
            for d in 0..r {
                a.add_to(d, d, &-&theta[e]);
            }
            a
        })
        .collect();
    // A^op monomial f'^b acts as ρ(f'_{n−1})^{b_{n−1}} ⋯ ρ(f'_0)^{b_0}
    let act = |u: &NCPoly| -> Result<SeriesMatrix> {
        let mut out = SeriesMatrix::zeros(r, r, order);
        for (mono, coef) in u.terms() {
            let mut mat = SeriesMatrix::identity(r, order);
            for k in (0..n).rev() {
                for _ in 0..mono.0[k] {
                    mat = mat.mul(&shifted[k])?;
                }
            }
            place_block(&mut out, 0, 0, &mat.scale(coef));
        }
        Ok(out)
    };
    // bd[q] : C_q → C_{q−1}
    let mut bd: Vec<Option<SeriesMatrix>> = vec![None];
    for q in 1..=n {
        let rows = index_of(n, q - 1);
        let cols = index_of(n, q);
        let mut d = SeriesMatrix::zeros(rows.len() * r, cols.len() * r, order);
        for (w, img) in c.differentials(q) {
            for (t, u) in img.terms() {
                place_block(&mut d, rows[t] * r, cols[w] * r, &act(u)?);
            }
        }
        bd.push(Some(d));
    }
    (0..=n)
        .map(|q| {
            let dim = binomial(n as u32, q as u32).to_integer().try_into().unwrap_or(0usize) * r;
            let incoming = if q < n { bd[q + 1].as_ref() } else { None };
            let outgoing = if q >= 1 { bd[q].as_ref() } else { None };
            homology_at(incoming, outgoing, dim, order)
        })
        .collect()
}

/// Degreewise comparison of `Ext^i(K, M)` and `Tor_{n−i}(Ω, M)`.
#[derive(Clone, Debug)]
pub struct PoincareReport {
    pub ext: Vec<Homology>,
    pub tor: Vec<Homology>,
    pub theta: Vec<SeriesScalar>,
    /// Degrees i where `Ext^i ≠ Tor_{n−i}`.
    pub mismatches: Vec<usize>,
}

impl PoincareReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn poincare_check(p: &Presentation, m: &ModulePresentation, witness_cap: usize) -> Result<PoincareReport> {
    let c = deform_koszul(p)?;
    let ch = theta_from_complex(&c, witness_cap)?;
    let ext = ext_homology(&c, m)?;
    let tor = tor_homology(p, &ch.theta, m)?;
    let n = p.n();
    let mismatches = (0..=n).filter(|&i| ext[i] != tor[n - i]).collect();
    Ok(PoincareReport { ext, tor, theta: ch.theta, mismatches })
}

/// Q-linear coordinates for cochains `Λ^q → A` truncated in PBW degree.
struct Coords {
    index: HashMap<(ExteriorIndex, Monomial, usize), usize>,
}

impl Coords {
    fn new() -> Self {
        Coords { index: HashMap::new() }
    }

    fn row(&mut self, c: &Chain) -> SparseRow {
        let mut row = SparseRow::new();
        for (w, p) in c.terms() {
            for (m, s) in p.terms() {
                for (k, x) in s.coeffs().iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let next = self.index.len();
                    let id = *self.index.entry((w.clone(), m.clone(), k)).or_insert(next);
                    row.insert(id, x.clone());
                }
            }
        }
        row
    }
}

fn basis_cochains(n: usize, q: usize, degree: usize, order: usize) -> Vec<Chain> {
    let mut out = Vec::new();
    for w in ExteriorIndex::all(n, q) {
        for m in Monomial::all_up_to(n, degree) {
            for k in 0..=order {
                out.push(Chain::single(w.clone(), NCPoly::monomial(m.clone(), SeriesScalar::h_power(k, order))));
            }
        }
    }
    out
}

/// Result of the degree-capped test of `Ext^q(K, A_h) = 0` for q < n.
#[derive(Clone, Debug)]
pub struct ExtVanishingReport {
    pub degree_cap: usize,
    /// `(q, dim Z^q at the cap, cocycles not reached by coboundaries)`.
    pub degrees: Vec<(usize, usize, usize)>,
    /// Whether the class of `1 ⊗ top*` is nonzero, i.e. `1 ∉ Σ u_τ A` at the cap.
    pub top_class_nonzero: bool,
}

impl ExtVanishingReport {
    pub fn passed(&self) -> bool {
        self.top_class_nonzero && self.degrees.iter().all(|&(_, _, bad)| bad == 0)
    }
}

/// Checks that every cocycle of PBW degree ≤ D is a coboundary of a cochain of degree ≤ D + 2.
pub fn ext_vanishing(c: &ChainComplex, degree_cap: usize) -> Result<ExtVanishingReport> {
    let t = transpose_complex(c);
    let n = c.n();
    let order = c.presentation().trunc_order();
    let slack = degree_cap + 2;
    let mut degrees = Vec::new();
    for q in 0..n {
        let mut coords = Coords::new();
        // coboundaries from degree ≤ D+2 cochains in C^{q−1}
        let mut bnd = Echelon::new(0);
        if q >= 1 {
            for phi in basis_cochains(n, q - 1, slack, order) {
                let row = coords.row(&t.apply(q, &phi)?);
                bnd.insert_homogeneous(row);
            }
        }
        // cocycles of degree ≤ D via the kernel of δ on tagged rows
        let cands = basis_cochains(n, q, degree_cap, order);
        let mut img_coords = Coords::new();
        const TAG: usize = 1 << 40;
        let mut ker = Echelon::new(0);
        let mut kernel_rows = Vec::new();
        for (b, phi) in cands.iter().enumerate() {
            let mut row = img_coords.row(&t.apply(q + 1, phi)?);
            row.insert(TAG + b, Rational::from_integer(1.into()));
            let (red, _) = ker.reduce(row.clone(), Rational::zero());
            if red.keys().next().is_some_and(|&k| k >= TAG) {
                kernel_rows.push(red.clone());
            }
            ker.insert_homogeneous(row);
        }
        let mut bad = 0;
        for kr in &kernel_rows {
            let mut z = Chain::new();
            for (&k, x) in kr {
                let phi = &cands[k - TAG];
                z.add_chain(&phi.map(|p| p.scale_rat(x)));
            }
            let row = coords.row(&z);
            if !bnd.contains(&row) {
                bad += 1;
            }
        }
        degrees.push((q, kernel_rows.len(), bad));
    }
    // top class: 1 ∈ span{u_τ·a : deg a ≤ D+2}?
    let mut coords = Coords::new();
    let mut bnd = Echelon::new(0);
    for phi in basis_cochains(n, n - 1, slack, order) {
        bnd.insert_homogeneous(coords.row(&t.apply(n, &phi)?));
    }
    let one = Chain::single(ExteriorIndex::top(n), NCPoly::one(n, order));
    let top_class_nonzero = !bnd.contains(&coords.row(&one));
    Ok(ExtVanishingReport { degree_cap, degrees, top_class_nonzero })
}
