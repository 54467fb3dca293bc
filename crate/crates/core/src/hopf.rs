//! Coproducts, exponential twists, the dual pairing with ξ-generators, and the
//! presentation-level ∨ functor.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::io::TwistFile;
use crate::ncpoly::{Monomial, NCPoly, Presentation};
use crate::series::{binomial, factorial, int, Rational, SeriesMatrix, SeriesScalar};

/// Element of `U^{⊗legs}` with every leg in PBW normal form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tensor {
    legs: usize,
    nvars: usize,
    order: usize,
    terms: BTreeMap<Vec<Monomial>, SeriesScalar>,
}

impl Tensor {
    pub fn zero(legs: usize, nvars: usize, order: usize) -> Self {
        Tensor { legs, nvars, order, terms: BTreeMap::new() }
    }

    pub fn unit(legs: usize, nvars: usize, order: usize) -> Self {
        let mut t = Tensor::zero(legs, nvars, order);
        t.add_term(vec![Monomial::one(nvars); legs], &SeriesScalar::one(order));
        t
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn trunc_order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Monomial>, SeriesScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &[Monomial]) -> SeriesScalar {
        self.terms.get(key).cloned().unwrap_or_else(|| SeriesScalar::zero(self.order))
    }

    pub fn add_term(&mut self, key: Vec<Monomial>, c: &SeriesScalar) {
        debug_assert_eq!(key.len(), self.legs);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &Tensor) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c);
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), &-c);
        }
        out
    }

    pub fn scale(&self, c: &SeriesScalar) -> Tensor {
        let mut out = Tensor::zero(self.legs, self.nvars, self.order);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &(v * c));
        }
        out
    }

    /// Leg-wise product in `p^{⊗legs}`.
    pub fn mul(&self, other: &Tensor, p: &Presentation) -> Result<Tensor> {
        let mut out = Tensor::zero(self.legs, self.nvars, self.order);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let c = ca * cb;
                if c.is_zero() {
                    continue;
                }
                let mut partial: Vec<(Vec<Monomial>, SeriesScalar)> = vec![(Vec::new(), c)];
                for (a, b) in ka.iter().zip(kb) {
                    let prod = p.mul_monomials(a, b)?;
                    let mut next = Vec::with_capacity(partial.len() * prod.len());
                    for (key, c) in &partial {
                        for (m, d) in prod.terms() {
                            let v = c * d;
                            if v.is_zero() {
                                continue;
                            }
                            let mut k = key.clone();
                            k.push(m.clone());
                            next.push((k, v));
                        }
                    }
                    partial = next;
                }
                for (k, v) in partial {
                    out.add_term(k, &v);
                }
            }
        }
        Ok(out)
    }

    /// Applies the counit to leg `leg`, removing it.
    pub fn counit_leg(&self, leg: usize) -> Tensor {
        let mut out = Tensor::zero(self.legs - 1, self.nvars, self.order);
        for (k, c) in &self.terms {
            if k[leg].is_one() {
                let mut k = k.clone();
                k.remove(leg);
                out.add_term(k, c);
            }
        }
        out
    }

    /// Single-leg tensor as a polynomial.
    pub fn to_poly(&self) -> NCPoly {
        assert_eq!(self.legs, 1);
        let mut p = NCPoly::zero(self.nvars, self.order);
        for (k, c) in &self.terms {
            p.add_term(k[0].clone(), c);
        }
        p
    }

    pub fn from_poly(p: &NCPoly) -> Tensor {
        let mut t = Tensor::zero(1, p.nvars(), p.trunc_order());
        for (m, c) in p.terms() {
            t.add_term(vec![m.clone()], c);
        }
        t
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in &self.terms {
            let legs: Vec<String> = k.iter().map(|m| m.fmt_with(names)).collect();
            let body = legs.join("⊗");
            let cs = c.to_string();
            let piece = if cs == "1" {
                body
            } else if cs == "-1" {
                format!("-{body}")
            } else if cs.contains(" + ") || cs.contains(" - ") {
                format!("({cs}) {body}")
            } else {
                format!("{cs} {body}")
            };
            if out.is_empty() {
                out = piece;
            } else if let Some(rest) = piece.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&piece);
            }
        }
        out
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("e{i}")).collect();
        f.write_str(&self.fmt_with(&names))
    }
}

/// `Δ(X^m) = Σ_{a ≤ m} Π_i C(m_i, a_i) X^a ⊗ X^{m−a}` (generators primitive).
pub fn coproduct_pbw(m: &Monomial, order: usize) -> Tensor {
    let n = m.nvars();
    let mut t = Tensor::zero(2, n, order);
    let mut a = vec![0u32; n];
    loop {
        let mut c = Rational::one();
        for i in 0..n {
            c *= binomial(m.0[i], a[i]);
        }
        let b: Vec<u32> = m.0.iter().zip(&a).map(|(x, y)| x - y).collect();
        t.add_term(vec![Monomial(a.clone()), Monomial(b)], &SeriesScalar::constant(c, order));
        // odometer over 0..=m_i
        let mut i = 0;
        loop {
            if i == n {
                return t;
            }
            if a[i] < m.0[i] {
                a[i] += 1;
                break;
            }
            a[i] = 0;
            i += 1;
        }
    }
}

/// Coproduct of an arbitrary element, leg-linear extension of [`coproduct_pbw`].
pub fn coproduct_poly(u: &NCPoly) -> Tensor {
    let mut t = Tensor::zero(2, u.nvars(), u.trunc_order());
    for (m, c) in u.terms() {
        t.add_assign(&coproduct_pbw(m, u.trunc_order()).scale(c));
    }
    t
}

/// Presentation of a quantum formal series Hopf algebra: every bracket lies in `h·(…)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FPresentation(Presentation);

impl FPresentation {
    pub fn new(p: Presentation) -> Result<Self> {
        for ((i, j), g) in p.relations() {
            if g.terms().values().any(|c| !c.coeff(0).is_zero()) {
                return Err(Error::InexactDivision(format!("bracket ({}, {}) is not divisible by h", i + 1, j + 1)));
            }
        }
        Ok(FPresentation(p))
    }

    pub fn presentation(&self) -> &Presentation {
        &self.0
    }

    pub fn into_inner(self) -> Presentation {
        self.0
    }
}

/// Shifts every term `c h^k x^m` to `c h^(k + |m| + offset) x^m`.
fn rescale_relation(g: &NCPoly, offset: i64, order: usize) -> Result<NCPoly> {
    let mut out = NCPoly::zero(g.nvars(), order);
    for (m, c) in g.terms() {
        let shift = m.degree() as i64 + offset;
        for (k, x) in c.coeffs().iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let e = k as i64 + shift;
            if e < 0 {
                return Err(Error::InexactDivision(format!("term {x} h^{k} {} by h^{}", m.fmt_with(&[]), -shift)));
            }
            if (e as usize) <= order {
                out.add_term(m.clone(), &SeriesScalar::monomial(x.clone(), e as usize, order));
            }
        }
    }
    Ok(out)
}

/// ∨ presentation on `ě_i = h^{-1} x_i`: `c h^k x^m ↦ c h^(k+|m|−2) e^m`.
///
/// Relation polynomials are read as exact, so the output keeps the input order.
pub fn vee_presentation(f: &FPresentation) -> Result<Presentation> {
    let p = f.presentation();
    let order = p.trunc_order();
    let mut rel = BTreeMap::new();
    for ((i, j), g) in p.relations() {
        rel.insert((i, j), rescale_relation(&g, -2, order)?);
    }
    let names = p.names().to_vec();
    Presentation::new(format!("{}-vee", p.name()), names, order, rel)
}

/// Inverse of [`vee_presentation`]: `c h^k e^m ↦ c h^(k+2−|m|) x^m`.
///
/// Linear terms move up one h-order, so the result is built at order N+1 to stay exact.
pub fn f_presentation(p: &Presentation) -> Result<FPresentation> {
    let order = p.trunc_order() + 1;
    let mut rel = BTreeMap::new();
    for ((i, j), g) in p.relations() {
        let g = g.with_order(order);
        let mut out = NCPoly::zero(p.n(), order);
        for (m, c) in g.terms() {
            for (k, x) in c.coeffs().iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let e = k as i64 + 2 - m.degree() as i64;
                if e < 1 {
                    return Err(Error::InexactDivision(format!(
                        "term {x} h^{k} {} of bracket ({}, {}) has no h-divisible F form",
                        m.fmt_with(p.names()),
                        i + 1,
                        j + 1
                    )));
                }
                if (e as usize) <= order {
                    out.add_term(m.clone(), &SeriesScalar::monomial(x.clone(), e as usize, order));
                }
            }
        }
        rel.insert((i, j), out);
    }
    let name = p.name().strip_suffix("-vee").map(str::to_string).unwrap_or_else(|| format!("{}-F", p.name()));
    FPresentation::new(Presentation::new(name, p.names().to_vec(), order, rel)?)
}

/// Twist `R = exp(h·r)` with `r = Σ ±X_i ⊗ X_j` over a classical base.
#[derive(Debug)]
pub struct TwistData {
    base: Arc<Presentation>,
    r: Vec<(i64, usize, usize)>,
    r_tensor: Tensor,
    r_inv_tensor: Tensor,
    cache: Mutex<HashMap<Monomial, Tensor>>,
    pairing: Mutex<HashMap<(Monomial, Monomial), SeriesScalar>>,
}

impl Clone for TwistData {
    fn clone(&self) -> Self {
        TwistData::new(self.base.as_ref().clone(), self.r.clone()).expect("validated on construction")
    }
}

fn exp_tensor(x: &Tensor, p: &Presentation) -> Result<Tensor> {
    let mut out = Tensor::unit(x.legs, x.nvars, x.order);
    let mut power = out.clone();
    for k in 1..=x.order + 1 {
        power = power.mul(x, p)?;
        if power.is_zero() {
            break;
        }
        out.add_assign(&power.scale(&SeriesScalar::constant(factorial(k as u32).recip(), x.order)));
    }
    Ok(out)
}

impl TwistData {
    /// `r` entries are `(sign, i, j)` with zero-based generator indices.
    pub fn new(base: Presentation, r: Vec<(i64, usize, usize)>) -> Result<Self> {
        if !base.is_classical() {
            return Err(Error::InvalidPresentation("twist base must carry no h-corrections".into()));
        }
        let n = base.n();
        let order = base.trunc_order();
        let mut hr = Tensor::zero(2, n, order);
        for &(s, i, j) in &r {
            if i >= n || j >= n {
                return Err(Error::InvalidPresentation(format!("twist index ({}, {}) out of range", i + 1, j + 1)));
            }
            hr.add_term(vec![Monomial::generator(n, i), Monomial::generator(n, j)], &SeriesScalar::monomial(int(s), 1, order));
        }
        let r_tensor = exp_tensor(&hr, &base)?;
        let r_inv_tensor = exp_tensor(&hr.scale(&SeriesScalar::constant(int(-1), order)), &base)?;
        Ok(TwistData {
            base: Arc::new(base),
            r,
            r_tensor,
            r_inv_tensor,
            cache: Mutex::new(HashMap::new()),
            pairing: Mutex::new(HashMap::new()),
        })
    }

    pub fn from_file(f: &TwistFile, trunc: Option<usize>) -> Result<Self> {
        let base = f.base.to_presentation(trunc)?;
        let n = base.n();
        let mut r = Vec::new();
        for t in &f.r {
            if t.i == 0 || t.j == 0 || t.i > n || t.j > n {
                return Err(Error::Parse(format!("twist term ({}, {}) out of range", t.i, t.j)));
            }
            r.push((t.sign, t.i - 1, t.j - 1));
        }
        TwistData::new(base, r)
    }

    /// Same twist at another truncation order.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        TwistData::new(self.base.with_order(order)?, self.r.clone())
    }

    pub fn base(&self) -> &Presentation {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn trunc_order(&self) -> usize {
        self.base.trunc_order()
    }

    pub fn r_exponential(&self) -> &Tensor {
        &self.r_tensor
    }

    pub fn r_inverse(&self) -> &Tensor {
        &self.r_inv_tensor
    }

    /// `R^{-1} Δ(X^m) R` computed literally.
    pub fn twist_coproduct_literal(&self, m: &Monomial) -> Result<Tensor> {
        let d = coproduct_pbw(m, self.trunc_order());
        self.r_inv_tensor.mul(&d, &self.base)?.mul(&self.r_tensor, &self.base)
    }

    /// `Δ^R(X^m)`, built multiplicatively from generator images and memoised.
    pub fn twist_coproduct(&self, m: &Monomial) -> Result<Tensor> {
        if let Some(t) = self.cache.lock().expect("cache").get(m) {
            return Ok(t.clone());
        }
        let t = match m.last() {
            None => Tensor::unit(2, self.n(), self.trunc_order()),
            Some(_) if m.degree() == 1 => self.twist_coproduct_literal(m)?,
            Some(l) => {
                let head = self.twist_coproduct(&m.without(l))?;
                let tail = self.twist_coproduct(&Monomial::generator(self.n(), l))?;
                head.mul(&tail, &self.base)?
            }
        };
        self.cache.lock().expect("cache").insert(m.clone(), t.clone());
        Ok(t)
    }

    /// `Δ^R` applied to one leg of a tensor, producing one more leg.
    pub fn coproduct_on_leg(&self, t: &Tensor, leg: usize) -> Result<Tensor> {
        let mut out = Tensor::zero(t.legs + 1, t.nvars, t.order);
        for (k, c) in t.terms() {
            for (dk, dc) in self.twist_coproduct(&k[leg])?.terms() {
                let mut key = k[..leg].to_vec();
                key.extend(dk.iter().cloned());
                key.extend(k[leg + 1..].iter().cloned());
                out.add_term(key, &(c * dc));
            }
        }
        Ok(out)
    }

    /// `⟨ξ^α, X^β⟩` where `ξ^α = ξ_1^{α_1} ·_h … ·_h ξ_n^{α_n}` and `·_h` is dual to `Δ^R`.
    pub fn pairing(&self, alpha: &Monomial, beta: &Monomial) -> Result<SeriesScalar> {
        let order = self.trunc_order();
        let Some(j) = alpha.last() else {
            return Ok(if beta.is_one() { SeriesScalar::one(order) } else { SeriesScalar::zero(order) });
        };
        if alpha.degree() == 1 {
            return Ok(if *beta == *alpha { SeriesScalar::one(order) } else { SeriesScalar::zero(order) });
        }
        let key = (alpha.clone(), beta.clone());
        if let Some(v) = self.pairing.lock().expect("pairing").get(&key) {
            return Ok(v.clone());
        }
        let head = alpha.without(j);
        let xj = Monomial::generator(self.n(), j);
        let mut v = SeriesScalar::zero(order);
        for (k, c) in self.twist_coproduct(beta)?.terms() {
            if k[1] == xj {
                let w = self.pairing(&head, &k[0])?;
                if !w.is_zero() {
                    v += &(c * &w);
                }
            }
        }
        self.pairing.lock().expect("pairing").insert(key, v.clone());
        Ok(v)
    }

    /// `P[α, β] = ⟨ξ^α, X^β⟩` for `|α|, |β| ≤ D`, rows and columns in [`Monomial::all_up_to`] order.
    pub fn pairing_matrix(&self, degree_cap: usize) -> Result<(Vec<Monomial>, SeriesMatrix)> {
        let basis = Monomial::all_up_to(self.n(), degree_cap);
        let order = self.trunc_order();
        let mut m = SeriesMatrix::zeros(basis.len(), basis.len(), order);
        for (r, a) in basis.iter().enumerate() {
            for (c, b) in basis.iter().enumerate() {
                m.set(r, c, self.pairing(a, b)?);
            }
        }
        Ok((basis, m))
    }

    /// Expands a functional given on PBW monomials in the ξ basis up to degree `D`,
    /// then checks the expansion reproduces it through degree `D + 2`.
    fn expand_functional(&self, degree_cap: usize, f: impl Fn(&Monomial) -> Result<SeriesScalar>) -> Result<NCPoly> {
        let n = self.n();
        let order = self.trunc_order();
        let guard = Monomial::all_up_to(n, degree_cap + 2);
        let values: Vec<SeriesScalar> = guard.iter().map(&f).collect::<Result<_>>()?;
        let mut coeffs: BTreeMap<Monomial, SeriesScalar> = BTreeMap::new();
        let residual = |coeffs: &BTreeMap<Monomial, SeriesScalar>, idx: usize| -> Result<SeriesScalar> {
            let beta = &guard[idx];
            let mut r = values[idx].clone();
            for (a, c) in coeffs {
                let p = self.pairing(a, beta)?;
                if !p.is_zero() {
                    r -= &(c * &p);
                }
            }
            Ok(r)
        };
        for _ in 0..=order + 1 {
            let mut changed = false;
            let mut updates = Vec::new();
            for (idx, beta) in guard.iter().enumerate() {
                if beta.degree() > degree_cap {
                    break;
                }
                let r = residual(&coeffs, idx)?;
                if !r.is_zero() {
                    let fact: Rational = beta.0.iter().map(|&e| factorial(e)).product();
                    updates.push((beta.clone(), r.scale(&fact.recip())));
                }
            }
            for (b, u) in updates {
                changed = true;
                let e = coeffs.entry(b.clone()).or_insert_with(|| SeriesScalar::zero(order));
                *e += &u;
                if e.is_zero() {
                    coeffs.remove(&b);
                }
            }
            if !changed {
                break;
            }
        }
        for (idx, beta) in guard.iter().enumerate() {
            if !residual(&coeffs, idx)?.is_zero() {
                return Err(Error::GuardViolation { cap: degree_cap, degree: beta.degree() });
            }
        }
        Ok(NCPoly::from_terms(n, order, coeffs))
    }

    /// `ξ_i ·_h ξ_j − ξ_j ·_h ξ_i` in the ξ basis (exponent vectors index ordered ξ-products).
    pub fn dual_product(&self, i: usize, j: usize, degree_cap: usize) -> Result<NCPoly> {
        let n = self.n();
        let xi = Monomial::generator(n, i);
        let xj = Monomial::generator(n, j);
        self.expand_functional(degree_cap, |beta| {
            let t = self.twist_coproduct(beta)?;
            Ok(&t.coeff(&[xi.clone(), xj.clone()]) - &t.coeff(&[xj.clone(), xi.clone()]))
        })
    }

    /// `Δ_h(ξ_i)` in the `ξ ⊗ ξ` basis: the transpose of multiplication on the base.
    pub fn dual_coproduct(&self, i: usize, degree_cap: usize) -> Result<Tensor> {
        let n = self.n();
        let order = self.trunc_order();
        let xi = Monomial::generator(n, i);
        let mons = Monomial::all_up_to(n, degree_cap + 2);
        let mut pairs = Vec::new();
        for a in &mons {
            for b in &mons {
                if a.degree() + b.degree() <= degree_cap + 2 {
                    pairs.push((a.clone(), b.clone()));
                }
            }
        }
        let mut g: HashMap<(Monomial, Monomial), SeriesScalar> = HashMap::new();
        for (a, b) in &pairs {
            let v = self.base.mul_monomials(a, b)?.coeff(&xi);
            if !v.is_zero() {
                g.insert((a.clone(), b.clone()), v);
            }
        }
        let mut rows: HashMap<Monomial, Vec<(Monomial, SeriesScalar)>> = HashMap::new();
        let mut row = |alpha: &Monomial| -> Result<Vec<(Monomial, SeriesScalar)>> {
            if let Some(r) = rows.get(alpha) {
                return Ok(r.clone());
            }
            let mut r = Vec::new();
            for b in &mons {
                let v = self.pairing(alpha, b)?;
                if !v.is_zero() {
                    r.push((b.clone(), v));
                }
            }
            rows.insert(alpha.clone(), r.clone());
            Ok(r)
        };
        let mut d: BTreeMap<(Monomial, Monomial), SeriesScalar> = BTreeMap::new();
        let mut residual = |d: &BTreeMap<(Monomial, Monomial), SeriesScalar>| -> Result<HashMap<(Monomial, Monomial), SeriesScalar>> {
            let mut r = g.clone();
            for ((al, ga), c) in d {
                let ra = row(al)?;
                let rg = row(ga)?;
                for (a, pa) in &ra {
                    for (b, pb) in &rg {
                        if a.degree() + b.degree() > degree_cap + 2 {
                            continue;
                        }
                        let v = &(c * pa) * pb;
                        let e = r.entry((a.clone(), b.clone())).or_insert_with(|| SeriesScalar::zero(order));
                        *e -= &v;
                    }
                }
            }
            r.retain(|_, v| !v.is_zero());
            Ok(r)
        };
        for _ in 0..=order + 1 {
            let r = residual(&d)?;
            let mut changed = false;
            for ((a, b), v) in r {
                if a.degree() + b.degree() > degree_cap {
                    continue;
                }
                let fact: Rational = a.0.iter().chain(&b.0).map(|&e| factorial(e)).product();
                let e = d.entry((a.clone(), b.clone())).or_insert_with(|| SeriesScalar::zero(order));
                *e += &v.scale(&fact.recip());
                changed = true;
            }
            d.retain(|_, v| !v.is_zero());
            if !changed {
                break;
            }
        }
        let r = residual(&d)?;
        if let Some(deg) = r.keys().map(|(a, b)| a.degree() + b.degree()).min() {
            return Err(Error::GuardViolation { cap: degree_cap, degree: deg });
        }
        let mut t = Tensor::zero(2, n, order);
        for ((a, b), c) in d {
            t.add_term(vec![a, b], &c);
        }
        Ok(t)
    }
}

/// The ξ-side QFSHA presentation and its ∨ companion obtained from a twist.
#[derive(Clone, Debug)]
pub struct TwistDual {
    /// Brackets `[ξ_i, ξ_j]` at order N+1.
    pub f: FPresentation,
    /// ∨ presentation at the twist's order N.
    pub vee: Presentation,
    /// `Δ_h(ξ_i)` for every generator, at order N.
    pub coproducts: Vec<Tensor>,
}

/// Runs the full dual pipeline. Pairings are computed one h-order deeper so that
/// the linear terms of the ∨ relations are exact at order N.
pub fn twist_dual(t: &TwistData, degree_cap: usize, name: &str) -> Result<TwistDual> {
    let n = t.n();
    let order = t.trunc_order();
    let deep = t.with_order(order + 1)?;
    let mut rel = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let g = deep.dual_product(i, j, degree_cap)?;
            if !g.is_zero() {
                rel.insert((i, j), g);
            }
        }
    }
    let names: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
    let fp = FPresentation::new(Presentation::new(name.to_string(), names, order + 1, rel)?)?;
    let vee = vee_presentation(&fp)?.with_order(order)?;
    let vee = Presentation::new(name.to_string(), vee.names().to_vec(), order, vee.relations())?;
    let coproducts = (0..n).map(|i| t.dual_coproduct(i, degree_cap)).collect::<Result<Vec<_>>>()?;
    Ok(TwistDual { f: fp, vee, coproducts })
}

/// `Δ(e_i)` on the ∨ side: `c h^k ξ^a ⊗ ξ^b ↦ c h^(k+|a|+|b|−1) e^a ⊗ e^b`.
pub fn vee_coproduct(t: &Tensor) -> Result<Tensor> {
    let order = t.trunc_order();
    let mut out = Tensor::zero(t.legs(), t.nvars(), order);
    for (k, c) in t.terms() {
        let deg: usize = k.iter().map(Monomial::degree).sum();
        for (p, x) in c.coeffs().iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let e = p as i64 + deg as i64 - 1;
            if e < 0 {
                return Err(Error::InexactDivision("coproduct term of degree zero".into()));
            }
            if e as usize <= order {
                out.add_term(k.clone(), &SeriesScalar::monomial(x.clone(), e as usize, order));
            }
        }
    }
    Ok(out)
}
