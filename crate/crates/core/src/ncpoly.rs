//! PBW-normal-form polynomials over a deformed enveloping algebra.
//!
//! A [`Presentation`] fixes generators `e_0 < … < e_{n-1}` and, for each `i < j`,
//! the right-hand side `g_ij` of `e_i e_j − e_j e_i`. Products are normalised by
//! rewriting inversions `e_j e_i → e_i e_j − g_ij` (j > i). Generator indices are
//! zero-based throughout the library; files and reports use one-based indices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::series::{format_rational, Rational, SeriesScalar};

/// Default rewrite budget per top-level normalisation.
pub const STEP_BUDGET: u64 = 10_000_000;

/// Exponent vector of an ordered monomial `e_0^{a_0} ⋯ e_{n-1}^{a_{n-1}}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn generator(n: usize, i: usize) -> Self {
        let mut m = vec![0; n];
        m[i] = 1;
        Monomial(m)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Largest index with positive exponent.
    pub fn last(&self) -> Option<usize> {
        self.0.iter().rposition(|&a| a > 0)
    }

    /// Smallest index with positive exponent.
    pub fn first(&self) -> Option<usize> {
        self.0.iter().position(|&a| a > 0)
    }

    pub fn times_gen(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.0[i] += 1;
        m
    }

    /// Removes one factor `e_i`; panics if absent.
    pub fn without(&self, i: usize) -> Self {
        let mut m = self.clone();
        assert!(m.0[i] > 0, "monomial lacks the requested generator");
        m.0[i] -= 1;
        m
    }

    pub fn mul_commutative(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Letters in PBW order, e.g. `e_0^2 e_2` gives `[0, 0, 2]`.
    pub fn letters(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(i, &a)| std::iter::repeat_n(i, a as usize)).collect()
    }

    /// Exponent-reversed monomial (index `i` becomes `n-1-i`).
    pub fn reversed(&self) -> Monomial {
        Monomial(self.0.iter().rev().copied().collect())
    }

    /// All exponent vectors in `n` variables with total degree ≤ `d`,
    /// ordered by degree and then lexicographically.
    pub fn all_up_to(n: usize, d: usize) -> Vec<Monomial> {
        let mut out = Vec::new();
        for deg in 0..=d {
            let mut cur = vec![0u32; n];
            fill(&mut cur, 0, deg as u32, &mut out);
        }
        out
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let name = names.get(i).cloned().unwrap_or_else(|| format!("e{}", i + 1));
            parts.push(if a == 1 { name } else { format!("{name}^{a}") });
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("")
        }
    }
}

fn fill(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Monomial>) {
    if cur.is_empty() {
        if left == 0 {
            out.push(Monomial(vec![]));
        }
        return;
    }
    if i == cur.len() - 1 {
        cur[i] = left;
        out.push(Monomial(cur.clone()));
        cur[i] = 0;
        return;
    }
    for a in (0..=left).rev() {
        cur[i] = a;
        fill(cur, i + 1, left - a, out);
    }
    cur[i] = 0;
}

/// Element of `U_h` in PBW normal form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NCPoly {
    nvars: usize,
    order: usize,
    terms: BTreeMap<Monomial, SeriesScalar>,
}

impl NCPoly {
    pub fn zero(nvars: usize, order: usize) -> Self {
        NCPoly { nvars, order, terms: BTreeMap::new() }
    }

    pub fn constant(c: SeriesScalar, nvars: usize) -> Self {
        let order = c.trunc_order();
        Self::monomial(Monomial::one(nvars), c).with_shape(nvars, order)
    }

    pub fn one(nvars: usize, order: usize) -> Self {
        Self::constant(SeriesScalar::one(order), nvars)
    }

    pub fn generator(i: usize, nvars: usize, order: usize) -> Self {
        Self::monomial(Monomial::generator(nvars, i), SeriesScalar::one(order))
    }

    pub fn monomial(m: Monomial, c: SeriesScalar) -> Self {
        let mut p = NCPoly { nvars: m.nvars(), order: c.trunc_order(), terms: BTreeMap::new() };
        p.add_term(m, &c);
        p
    }

    fn with_shape(mut self, nvars: usize, order: usize) -> Self {
        self.nvars = nvars;
        self.order = order;
        self
    }

    pub fn from_terms(nvars: usize, order: usize, terms: impl IntoIterator<Item = (Monomial, SeriesScalar)>) -> Self {
        let mut p = Self::zero(nvars, order);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn trunc_order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, SeriesScalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, SeriesScalar> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> SeriesScalar {
        self.terms.get(m).cloned().unwrap_or_else(|| SeriesScalar::zero(self.order))
    }

    pub fn add_term(&mut self, m: Monomial, c: &SeriesScalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.nvars(), self.nvars);
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &NCPoly, c: &SeriesScalar) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), &(v * c));
        }
    }

    pub fn add_assign(&mut self, other: &NCPoly) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v);
        }
    }

    pub fn sub_assign(&mut self, other: &NCPoly) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), &-v);
        }
    }

    pub fn add(&self, other: &NCPoly) -> NCPoly {
        let mut p = self.clone();
        p.add_assign(other);
        p
    }

    pub fn sub(&self, other: &NCPoly) -> NCPoly {
        let mut p = self.clone();
        p.sub_assign(other);
        p
    }

    pub fn neg(&self) -> NCPoly {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, c: &SeriesScalar) -> NCPoly {
        self.map_coeffs(|v| v * c)
    }

    pub fn scale_rat(&self, c: &Rational) -> NCPoly {
        self.map_coeffs(|v| v.scale(c))
    }

    pub fn map_coeffs(&self, f: impl Fn(&SeriesScalar) -> SeriesScalar) -> NCPoly {
        let mut p = NCPoly::zero(self.nvars, self.order);
        for (m, v) in &self.terms {
            p.add_term(m.clone(), &f(v));
        }
        p
    }

    /// Multiplies by `h^k`.
    pub fn shift_up(&self, k: usize) -> NCPoly {
        self.map_coeffs(|v| v.shift_up(k))
    }

    /// Divides by `h^k`; every coefficient must be divisible.
    pub fn div_h(&self, k: usize) -> Result<NCPoly> {
        let mut p = NCPoly::zero(self.nvars, self.order);
        for (m, v) in &self.terms {
            p.add_term(m.clone(), &v.div_h(k)?);
        }
        Ok(p)
    }

    pub fn with_order(&self, order: usize) -> NCPoly {
        let mut p = NCPoly::zero(self.nvars, order);
        for (m, v) in &self.terms {
            p.add_term(m.clone(), &v.with_order(order));
        }
        p
    }

    /// Coefficient of `h^k`, as a polynomial with constant-order coefficients of the same order.
    pub fn h_coeff(&self, k: usize) -> NCPoly {
        let mut p = NCPoly::zero(self.nvars, self.order);
        for (m, v) in &self.terms {
            p.add_term(m.clone(), &SeriesScalar::constant(v.coeff(k), self.order));
        }
        p
    }

    /// Lowest h-order present.
    pub fn valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(SeriesScalar::valuation).min()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Part of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: usize) -> NCPoly {
        let mut p = NCPoly::zero(self.nvars, self.order);
        for (m, v) in &self.terms {
            if m.degree() == d {
                p.add_term(m.clone(), v);
            }
        }
        p
    }

    /// Projection to `h = 0`.
    pub fn mod_h(&self) -> NCPoly {
        self.h_coeff(0)
    }

    pub fn constant_term(&self) -> SeriesScalar {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let mono = m.fmt_with(names);
            let nonzero: Vec<_> = c.coeffs().iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
            let single = nonzero.len() == 1;
            let text = if single {
                let (k, x) = nonzero[0];
                let neg = x.is_negative();
                let mag = x.abs();
                let mut s = String::new();
                if !mag.is_one() || (k == 0 && m.is_one()) {
                    s.push_str(&format_rational(&mag));
                }
                match k {
                    0 => {}
                    1 => s.push('h'),
                    _ => s.push_str(&format!("h^{k}")),
                }
                if !m.is_one() {
                    s.push_str(&mono);
                }
                if s.is_empty() {
                    s.push('1');
                }
                (neg, s)
            } else {
                (false, format!("({c}){}", if m.is_one() { String::new() } else { mono }))
            };
            match (idx, text.0) {
                (0, true) => out.push_str(&format!("-{}", text.1)),
                (0, false) => out.push_str(&text.1),
                (_, true) => out.push_str(&format!(" - {}", text.1)),
                (_, false) => out.push_str(&format!(" + {}", text.1)),
            }
        }
        out
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("e{i}")).collect();
        write!(f, "{}", self.fmt_with(&names))
    }
}

struct Budget {
    left: u64,
    limit: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        if self.left == 0 {
            return Err(Error::StepBudget(self.limit));
        }
        self.left -= 1;
        Ok(())
    }
}

/// Generators, structure constants and deformed brackets defining `U_h`.
pub struct Presentation {
    name: String,
    names: Vec<String>,
    order: usize,
    /// `g[i][j]` for all ordered pairs; `g[j][i] = −g[i][j]`.
    brackets: Vec<Vec<NCPoly>>,
    /// `classical[i][j][a] = C^a_ij`.
    classical: Vec<Vec<Vec<Rational>>>,
    budget: u64,
    gen_cache: Mutex<HashMap<(Monomial, usize), NCPoly>>,
}

impl Clone for Presentation {
    fn clone(&self) -> Self {
        Presentation {
            name: self.name.clone(),
            names: self.names.clone(),
            order: self.order,
            brackets: self.brackets.clone(),
            classical: self.classical.clone(),
            budget: self.budget,
            gen_cache: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presentation").field("name", &self.name).field("names", &self.names).field("order", &self.order).finish()
    }
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.order == other.order && self.brackets == other.brackets
    }
}

impl Presentation {
    /// Validated constructor. `relations` holds `g_ij` for `i < j`; missing pairs are zero.
    pub fn new(
        name: impl Into<String>,
        names: Vec<String>,
        order: usize,
        relations: BTreeMap<(usize, usize), NCPoly>,
    ) -> Result<Self> {
        let p = Self::build(name.into(), names, order, relations)?;
        p.validate()?;
        Ok(p)
    }

    /// Skips the classical-limit and Jacobi checks; used for negative controls.
    pub fn new_unchecked(
        name: impl Into<String>,
        names: Vec<String>,
        order: usize,
        relations: BTreeMap<(usize, usize), NCPoly>,
    ) -> Result<Self> {
        Self::build(name.into(), names, order, relations)
    }

    fn build(name: String, names: Vec<String>, order: usize, relations: BTreeMap<(usize, usize), NCPoly>) -> Result<Self> {
        let n = names.len();
        let mut brackets = vec![vec![NCPoly::zero(n, order); n]; n];
        let mut classical = vec![vec![vec![Rational::zero(); n]; n]; n];
        for ((i, j), g) in relations {
            if i >= j || j >= n {
                return Err(Error::InvalidPresentation(format!("relation index ({}, {}) must satisfy i < j ≤ n", i + 1, j + 1)));
            }
            if g.nvars() != n {
                return Err(Error::InvalidPresentation(format!("relation ({}, {}) has wrong arity", i + 1, j + 1)));
            }
            let g = g.with_order(order);
            for (m, c) in g.terms() {
                if m.degree() == 1 {
                    let a = m.first().expect("degree one");
                    classical[i][j][a] = c.coeff(0);
                    classical[j][i][a] = -c.coeff(0);
                }
            }
            brackets[j][i] = g.neg();
            brackets[i][j] = g;
        }
        Ok(Presentation { name, names, order, brackets, classical, budget: STEP_BUDGET, gen_cache: Mutex::new(HashMap::new()) })
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        for i in 0..n {
            for j in (i + 1)..n {
                for (m, c) in self.brackets[i][j].terms() {
                    if m.is_one() {
                        return Err(Error::InvalidPresentation(format!("g_{}{} has a constant term", i + 1, j + 1)));
                    }
                    if m.degree() != 1 && !c.coeff(0).is_zero() {
                        return Err(Error::InvalidPresentation(format!(
                            "g_{}{} has a term of degree {} without a factor of h",
                            i + 1,
                            j + 1,
                            m.degree()
                        )));
                    }
                }
            }
        }
        if let Some((i, j, k)) = self.jacobi_failure() {
            return Err(Error::InvalidPresentation(format!(
                "structure constants violate the Jacobi identity at ({}, {}, {})",
                i + 1,
                j + 1,
                k + 1
            )));
        }
        Ok(())
    }

    /// First triple on which the classical constants fail Jacobi.
    pub fn jacobi_failure(&self) -> Option<(usize, usize, usize)> {
        let n = self.n();
        let c = &self.classical;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for b in 0..n {
                        let mut s = Rational::zero();
                        for a in 0..n {
                            s += &c[i][j][a] * &c[a][k][b];
                            s += &c[j][k][a] * &c[a][i][b];
                            s += &c[k][i][a] * &c[a][j][b];
                        }
                        if !s.is_zero() {
                            return Some((i, j, k));
                        }
                    }
                }
            }
        }
        None
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn trunc_order(&self) -> usize {
        self.order
    }

    /// `g_ij` for any ordered pair (antisymmetric, zero on the diagonal).
    pub fn bracket(&self, i: usize, j: usize) -> &NCPoly {
        &self.brackets[i][j]
    }

    /// `C^a_ij` for any ordered pair.
    pub fn structure_constant(&self, i: usize, j: usize, a: usize) -> &Rational {
        &self.classical[i][j][a]
    }

    /// Relations `g_ij` for `i < j`, zero ones omitted.
    pub fn relations(&self) -> BTreeMap<(usize, usize), NCPoly> {
        let n = self.n();
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if !self.brackets[i][j].is_zero() {
                    out.insert((i, j), self.brackets[i][j].clone());
                }
            }
        }
        out
    }

    /// Same relations viewed at another truncation order.
    pub fn with_order(&self, order: usize) -> Result<Presentation> {
        Presentation::new(self.name.clone(), self.names.clone(), order, self.relations())
    }

    /// The undeformed algebra `U(a)` with brackets `C^a_ij`, at truncation `order`.
    pub fn classical_limit(&self, order: usize) -> Presentation {
        let n = self.n();
        let mut rel = BTreeMap::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let g = NCPoly::from_terms(
                    n,
                    order,
                    (0..n).map(|a| (Monomial::generator(n, a), SeriesScalar::constant(self.classical[i][j][a].clone(), order))),
                );
                if !g.is_zero() {
                    rel.insert((i, j), g);
                }
            }
        }
        Presentation::build(self.name.clone(), self.names.clone(), order, rel).expect("classical data is well formed")
    }

    /// True when every bracket is linear with constant coefficients.
    pub fn is_classical(&self) -> bool {
        self.brackets.iter().flatten().all(|g| g.terms().iter().all(|(m, c)| m.degree() == 1 && c.coeffs().iter().skip(1).all(Zero::is_zero)))
    }

    fn budget(&self) -> Budget {
        Budget { left: self.budget, limit: self.budget }
    }

    fn mono_gen(&self, m: &Monomial, j: usize, b: &mut Budget) -> Result<NCPoly> {
        let n = self.n();
        let order = self.order;
        match m.last() {
            None => return Ok(NCPoly::generator(j, n, order)),
            Some(l) if j >= l => return Ok(NCPoly::monomial(m.times_gen(j), SeriesScalar::one(order))),
            _ => {}
        }
        let key = (m.clone(), j);
        if let Some(hit) = self.gen_cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        b.tick()?;
        let l = m.last().expect("nonempty");
        let mp = m.without(l);
        // e^{m'} e_l e_j = (e^{m'} e_j) e_l − e^{m'} g_jl
        let a = self.mono_gen(&mp, j, b)?;
        let mut out = self.poly_gen(&a, l, b)?;
        for (t, c) in self.brackets[j][l].terms() {
            let prod = self.mono_mono(&mp, t, b)?;
            out.add_scaled(&prod, &-c);
        }
        self.gen_cache.lock().expect("cache lock").insert(key, out.clone());
        Ok(out)
    }

    fn poly_gen(&self, p: &NCPoly, j: usize, b: &mut Budget) -> Result<NCPoly> {
        let mut out = NCPoly::zero(self.n(), self.order);
        for (m, c) in p.terms() {
            let prod = self.mono_gen(m, j, b)?;
            out.add_scaled(&prod, c);
        }
        Ok(out)
    }

    fn mono_mono(&self, a: &Monomial, t: &Monomial, b: &mut Budget) -> Result<NCPoly> {
        let mut cur = NCPoly::monomial(a.clone(), SeriesScalar::one(self.order));
        for l in t.letters() {
            cur = self.poly_gen(&cur, l, b)?;
        }
        Ok(cur)
    }

    /// Normal form of a word (zero-based letters).
    pub fn normal_form(&self, word: &[usize]) -> Result<NCPoly> {
        let n = self.n();
        if let Some(&bad) = word.iter().find(|&&l| l >= n) {
            return Err(Error::InvalidPresentation(format!("letter {} outside 1..{n}", bad + 1)));
        }
        let mut b = self.budget();
        let mut cur = NCPoly::one(n, self.order);
        for &l in word {
            cur = self.poly_gen(&cur, l, &mut b)?;
        }
        Ok(cur)
    }

    /// Product `a·b` in normal form.
    pub fn mul(&self, a: &NCPoly, b: &NCPoly) -> Result<NCPoly> {
        if a.trunc_order() != self.order || b.trunc_order() != self.order {
            return Err(Error::TruncationMismatch(a.trunc_order().max(b.trunc_order()), self.order));
        }
        let mut budget = self.budget();
        let mut out = NCPoly::zero(self.n(), self.order);
        for (s, cs) in a.terms() {
            for (t, ct) in b.terms() {
                let c = cs * ct;
                if c.is_zero() {
                    continue;
                }
                let prod = self.mono_mono(s, t, &mut budget)?;
                out.add_scaled(&prod, &c);
            }
        }
        Ok(out)
    }

    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Result<NCPoly> {
        let mut budget = self.budget();
        self.mono_mono(a, b, &mut budget)
    }

    /// `e_i e_j − e_j e_i` computed by rewriting.
    pub fn commutator(&self, i: usize, j: usize) -> Result<NCPoly> {
        Ok(self.normal_form(&[i, j])?.sub(&self.normal_form(&[j, i])?))
    }

    pub fn gen(&self, i: usize) -> NCPoly {
        NCPoly::generator(i, self.n(), self.order)
    }

    pub fn one(&self) -> NCPoly {
        NCPoly::one(self.n(), self.order)
    }

    pub fn zero(&self) -> NCPoly {
        NCPoly::zero(self.n(), self.order)
    }
}

/// A disagreement between two reductions of the same word.
#[derive(Clone, Debug)]
pub struct Discrepancy {
    /// Zero-based letters of the ambiguous word.
    pub word: Vec<usize>,
    pub difference: NCPoly,
}

#[derive(Clone, Debug)]
pub struct ConfluenceReport {
    pub triples_checked: usize,
    pub associativity_checks: usize,
    pub discrepancies: Vec<Discrepancy>,
}

impl ConfluenceReport {
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Resolves every overlap `e_k e_j e_i` (k > j > i) both ways, then spot-checks
/// associativity `(u e_a) e_b = u (e_a e_b)` for PBW monomials `u` of degree ≤ D − 2.
pub fn confluence_check(p: &Presentation, degree_cap: usize) -> Result<ConfluenceReport> {
    if degree_cap < 3 {
        return Err(Error::CapOverflow { cap: degree_cap, what: "confluence needs a degree cap of at least 3".into() });
    }
    let n = p.n();
    let mut discrepancies = Vec::new();
    let mut triples = 0;
    for k in 0..n {
        for j in 0..k {
            for i in 0..j {
                triples += 1;
                // (e_k e_j) e_i → (e_j e_k − g_jk) e_i
                let mut left = p.normal_form(&[j, k, i])?;
                let gjk_ei = p.mul(p.bracket(j, k), &p.gen(i))?;
                left.sub_assign(&gjk_ei);
                // e_k (e_j e_i) → e_k (e_i e_j − g_ij)
                let mut right = p.normal_form(&[k, i, j])?;
                let ek_gij = p.mul(&p.gen(k), p.bracket(i, j))?;
                right.sub_assign(&ek_gij);
                let diff = left.sub(&right);
                if !diff.is_zero() {
                    discrepancies.push(Discrepancy { word: vec![k, j, i], difference: diff });
                }
            }
        }
    }
    let mut checks = 0;
    if discrepancies.is_empty() {
        for u in Monomial::all_up_to(n, degree_cap - 2) {
            let up = NCPoly::monomial(u.clone(), SeriesScalar::one(p.trunc_order()));
            for a in 0..n {
                let ua = p.mul(&up, &p.gen(a))?;
                for b in 0..n {
                    checks += 1;
                    let left = p.mul(&ua, &p.gen(b))?;
                    let right = p.mul(&up, &p.normal_form(&[a, b])?)?;
                    let diff = left.sub(&right);
                    if !diff.is_zero() {
                        let mut word = u.letters();
                        word.extend([a, b]);
                        discrepancies.push(Discrepancy { word, difference: diff });
                    }
                }
            }
        }
    }
    Ok(ConfluenceReport { triples_checked: triples, associativity_checks: checks, discrepancies })
}

/// Replaces each generator `e_i` by `h^{k_i} e_i`.
pub fn substitute_rescale(a: &NCPoly, k_per_gen: &[i64]) -> Result<NCPoly> {
    let order = a.trunc_order();
    let mut out = NCPoly::zero(a.nvars(), order);
    for (m, c) in a.terms() {
        let shift: i64 = m.0.iter().zip(k_per_gen).map(|(&e, &k)| e as i64 * k).sum();
        let v = c.h_shift(shift).map_err(|_| Error::InexactDivision(format!("coefficient {c} of {} by h^{}", m.fmt_with(&[]), -shift)))?;
        out.add_term(m.clone(), &v.value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{int, rat};

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("e{i}")).collect()
    }

    fn term(n: usize, order: usize, c: Rational, h: usize, expo: &[u32]) -> (Monomial, SeriesScalar) {
        let mut m = vec![0; n];
        m[..expo.len()].copy_from_slice(expo);
        (Monomial(m), SeriesScalar::monomial(c, h, order))
    }

    fn heisenberg() -> Presentation {
        let mut rel = BTreeMap::new();
        rel.insert((0, 1), NCPoly::from_terms(3, 2, [term(3, 2, int(1), 0, &[0, 0, 1])]));
        Presentation::new("h3", names(3), 2, rel).unwrap()
    }

    #[test]
    fn monomial_enumeration() {
        let all = Monomial::all_up_to(2, 2);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], Monomial(vec![0, 0]));
        assert_eq!(Monomial::all_up_to(0, 3), vec![Monomial(vec![])]);
    }

    #[test]
    fn heisenberg_rewriting() {
        let p = heisenberg();
        let nf = p.normal_form(&[1, 0]).unwrap();
        let expected = NCPoly::from_terms(3, 2, [term(3, 2, int(1), 0, &[1, 1]), term(3, 2, int(-1), 0, &[0, 0, 1])]);
        assert_eq!(nf, expected);
        assert_eq!(p.commutator(0, 1).unwrap(), p.bracket(0, 1).clone());
        assert!(confluence_check(&p, 4).unwrap().is_clean());
    }

    #[test]
    fn rejects_unscaled_nonlinear_terms() {
        let mut rel = BTreeMap::new();
        rel.insert((0, 1), NCPoly::from_terms(2, 2, [term(2, 2, int(1), 0, &[2, 0])]));
        assert!(matches!(Presentation::new("bad", names(2), 2, rel), Err(Error::InvalidPresentation(_))));
    }

    #[test]
    fn jacobi_violation_is_rejected_and_detected() {
        // [e1,e2] = e2, [e2,e3] = e1, [e1,e3] = 0
        let mut rel = BTreeMap::new();
        rel.insert((0, 1), NCPoly::from_terms(3, 1, [term(3, 1, int(1), 0, &[0, 1])]));
        rel.insert((1, 2), NCPoly::from_terms(3, 1, [term(3, 1, int(1), 0, &[1])]));
        assert!(Presentation::new("bad", names(3), 1, rel.clone()).is_err());
        let p = Presentation::new_unchecked("bad", names(3), 1, rel).unwrap();
        let r = confluence_check(&p, 3).unwrap();
        assert_eq!(r.discrepancies.len(), 1);
        assert_eq!(r.discrepancies[0].word, vec![2, 1, 0]);
    }

    #[test]
    fn rescaling() {
        let a = NCPoly::from_terms(2, 3, [term(2, 3, int(1), 2, &[1, 1])]);
        let b = substitute_rescale(&a, &[-1, -1]).unwrap();
        assert_eq!(b, NCPoly::from_terms(2, 3, [term(2, 3, int(1), 0, &[1, 1])]));
        let c = NCPoly::from_terms(2, 3, [term(2, 3, int(2), 1, &[1])]);
        assert_eq!(substitute_rescale(&c, &[-1, -1]).unwrap(), NCPoly::from_terms(2, 3, [term(2, 3, int(2), 0, &[1])]));
        assert!(substitute_rescale(&c, &[-2, 0]).is_err());
        let d = NCPoly::from_terms(5, 6, [term(5, 6, rat(2, 3), 4, &[3])]);
        let e = substitute_rescale(&d, &[-1; 5]).unwrap();
        assert_eq!(e, NCPoly::from_terms(5, 6, [term(5, 6, rat(2, 3), 1, &[3])]));
    }

    #[test]
    fn step_budget_is_enforced() {
        let p = heisenberg().with_budget(0);
        assert!(matches!(p.normal_form(&[1, 0]), Err(Error::StepBudget(0))));
    }

    #[test]
    fn empty_presentation() {
        let p = Presentation::new("k", vec![], 3, BTreeMap::new()).unwrap();
        assert_eq!(p.normal_form(&[]).unwrap(), NCPoly::one(0, 3));
    }
}
