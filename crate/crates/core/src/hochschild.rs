//! Hochschild and Chevalley–Eilenberg cochains over the classical algebra `U(a)`,
//! star-product expansion, coboundary solving, gauge transforms and centers.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::io::poly_to_terms;
use crate::koszul::ExteriorIndex;
use crate::linalg::{Echelon, Insert, SparseRow};
use crate::ncpoly::{Monomial, NCPoly, Presentation};
use crate::series::{Divisor, Rational, SeriesMatrix, SeriesScalar};

/// Multilinear map `U(a)^{⊗k} → U(a)` stored on PBW monomial tuples of total degree ≤ cap.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    arity: usize,
    nvars: usize,
    cap: usize,
    values: BTreeMap<Vec<Monomial>, NCPoly>,
}

/// Monomial tuples of the given arity with total degree ≤ cap.
pub fn domain(arity: usize, nvars: usize, cap: usize) -> Vec<Vec<Monomial>> {
    let mons = Monomial::all_up_to(nvars, cap);
    let mut out: Vec<Vec<Monomial>> = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::new();
        for t in &out {
            let used: usize = t.iter().map(Monomial::degree).sum();
            for m in &mons {
                if used + m.degree() <= cap {
                    let mut v = t.clone();
                    v.push(m.clone());
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}

impl Cochain {
    pub fn zero(arity: usize, nvars: usize, cap: usize) -> Self {
        Cochain { arity, nvars, cap, values: BTreeMap::new() }
    }

    /// Tabulates `f` on the whole domain.
    pub fn from_fn(arity: usize, nvars: usize, cap: usize, mut f: impl FnMut(&[Monomial]) -> Result<NCPoly>) -> Result<Self> {
        let mut c = Cochain::zero(arity, nvars, cap);
        for t in domain(arity, nvars, cap) {
            let v = f(&t)?;
            c.set(t, v);
        }
        Ok(c)
    }

    /// 0-cochain with value `c`.
    pub fn constant(c: NCPoly, cap: usize) -> Self {
        let mut out = Cochain::zero(0, c.nvars(), cap);
        out.set(Vec::new(), c);
        out
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn values(&self) -> &BTreeMap<Vec<Monomial>, NCPoly> {
        &self.values
    }

    pub fn set(&mut self, args: Vec<Monomial>, v: NCPoly) {
        if v.is_zero() {
            self.values.remove(&args);
        } else {
            self.values.insert(args, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eval_mono(&self, args: &[Monomial]) -> Result<NCPoly> {
        let deg: usize = args.iter().map(Monomial::degree).sum();
        if deg > self.cap || args.len() != self.arity {
            return Err(Error::CapOverflow { cap: self.cap, what: format!("cochain argument of degree {deg}") });
        }
        Ok(self.values.get(args).cloned().unwrap_or_else(|| NCPoly::zero(self.nvars, 0)))
    }

    /// Multilinear extension to polynomial arguments.
    pub fn eval(&self, args: &[NCPoly]) -> Result<NCPoly> {
        let mut partial: Vec<(Vec<Monomial>, Rational)> = vec![(Vec::new(), Rational::one())];
        for a in args {
            let mut next = Vec::new();
            for (t, c) in &partial {
                for (m, s) in a.terms() {
                    let mut t = t.clone();
                    t.push(m.clone());
                    next.push((t, c * s.constant_term()));
                }
            }
            partial = next;
        }
        let mut out = NCPoly::zero(self.nvars, 0);
        for (t, c) in partial {
            out.add_assign(&self.eval_mono(&t)?.scale_rat(&c));
        }
        Ok(out)
    }

    /// Sparse JSON form: one entry per nonzero value, argument exponents one per slot.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .values
            .iter()
            .map(|(args, v)| serde_json::json!({ "args": args.iter().map(|m| m.0.clone()).collect::<Vec<_>>(), "value": poly_to_terms(v) }))
            .collect();
        serde_json::json!({ "arity": self.arity, "cap": self.cap, "values": entries })
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        let mut out = self.clone();
        for (k, v) in &other.values {
            let cur = out.values.get(k).cloned().unwrap_or_else(|| NCPoly::zero(self.nvars, 0));
            out.set(k.clone(), cur.sub(v));
        }
        out
    }
}

fn mono_poly(m: &Monomial) -> NCPoly {
    NCPoly::monomial(m.clone(), SeriesScalar::one(0))
}

/// Classical `U(a)` (order 0) underlying a presentation.
pub fn classical_algebra(p: &Presentation) -> Presentation {
    p.classical_limit(0)
}

/// `μ_r(u, v)` for r = 1..=r_max on monomial pairs of total degree ≤ D:
/// the h^r coefficient of the deformed product.
pub fn mu_series(p: &Presentation, r_max: usize, cap: usize) -> Result<Vec<Cochain>> {
    if r_max > p.trunc_order() {
        return Err(Error::CapOverflow { cap: p.trunc_order(), what: format!("μ_{r_max} beyond the truncation order") });
    }
    let n = p.n();
    let mut out: Vec<Cochain> = (0..r_max).map(|_| Cochain::zero(2, n, cap)).collect();
    for t in domain(2, n, cap) {
        let prod = p.mul_monomials(&t[0], &t[1])?;
        for (r, c) in out.iter_mut().enumerate() {
            c.set(t.clone(), prod.h_coeff(r + 1).with_order(0));
        }
    }
    Ok(out)
}

/// `b(f)(a_0..a_k) = a_0 f(a_1..) + Σ_{i=1}^k (−1)^i f(.., a_{i−1}a_i, ..) + (−1)^{k+1} f(a_0..a_{k−1}) a_k`.
pub fn hochschild_b(u: &Presentation, f: &Cochain) -> Result<Cochain> {
    let k = f.arity;
    Cochain::from_fn(k + 1, f.nvars, f.cap, |a| {
        let mut v = u.mul(&mono_poly(&a[0]), &f.eval_mono(&a[1..])?)?;
        for i in 1..=k {
            let prod = u.mul_monomials(&a[i - 1], &a[i])?;
            let mut args: Vec<NCPoly> = a.iter().map(mono_poly).collect();
            args.splice((i - 1)..=i, [prod]);
            let term = f.eval(&args)?;
            if i % 2 == 0 {
                v.add_assign(&term);
            } else {
                v.sub_assign(&term);
            }
        }
        let last = u.mul(&f.eval_mono(&a[..k])?, &mono_poly(&a[k]))?;
        if (k + 1) % 2 == 0 {
            v.add_assign(&last);
        } else {
            v.sub_assign(&last);
        }
        Ok(v)
    })
}

/// Alternating map `Λ^q(a) → U(a)` given on sorted generator subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct CECochain {
    q: usize,
    nvars: usize,
    values: BTreeMap<ExteriorIndex, NCPoly>,
}

impl CECochain {
    pub fn zero(q: usize, nvars: usize) -> Self {
        CECochain { q, nvars, values: BTreeMap::new() }
    }

    /// Builds a cochain from values on sorted subsets.
    pub fn from_values(q: usize, nvars: usize, values: impl IntoIterator<Item = (ExteriorIndex, NCPoly)>) -> Self {
        let mut c = CECochain::zero(q, nvars);
        for (w, v) in values {
            c.set(w, v);
        }
        c
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    /// Sparse JSON form keyed by one-based subsets.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> =
            self.values.iter().map(|(w, v)| serde_json::json!({ "subset": w.one_based(), "value": poly_to_terms(v) })).collect();
        serde_json::json!({ "degree": self.q, "values": entries })
    }

    pub fn values(&self) -> &BTreeMap<ExteriorIndex, NCPoly> {
        &self.values
    }

    pub fn set(&mut self, w: ExteriorIndex, v: NCPoly) {
        assert_eq!(w.len(), self.q);
        if v.is_zero() {
            self.values.remove(&w);
        } else {
            self.values.insert(w, v.with_order(0));
        }
    }

    pub fn get(&self, w: &ExteriorIndex) -> NCPoly {
        self.values.get(w).cloned().unwrap_or_else(|| NCPoly::zero(self.nvars, 0))
    }

    /// Value on an unsorted argument list, with the alternating sign.
    pub fn eval_gens(&self, args: &[usize]) -> NCPoly {
        let mut v = args.to_vec();
        let mut sign = 1i64;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                if v[j] == v[j + 1] {
                    return NCPoly::zero(self.nvars, 0);
                }
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return NCPoly::zero(self.nvars, 0);
        }
        self.get(&ExteriorIndex(v)).scale_rat(&Rational::from_integer(sign.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

/// `d(f)(z_1..z_{q+1}) = Σ (−1)^{i−1} z_i·f(..ẑ_i..) + Σ_{i<j} (−1)^{i+j} f([z_i,z_j], ..ẑ_i..ẑ_j..)`
/// with the adjoint action `z·u = zu − uz`.
pub fn ce_differential(u: &Presentation, f: &CECochain) -> Result<CECochain> {
    let n = u.n();
    let q = f.q;
    let mut out = CECochain::zero(q + 1, n);
    for w in ExteriorIndex::all(n, q + 1) {
        let z = &w.0;
        let mut v = NCPoly::zero(n, 0);
        for i in 0..z.len() {
            let rest = w.remove_at(i);
            let fv = f.get(&rest);
            let zi = u.gen(z[i]);
            let ad = u.mul(&zi, &fv)?.sub(&u.mul(&fv, &zi)?);
            if i % 2 == 0 {
                v.add_assign(&ad);
            } else {
                v.sub_assign(&ad);
            }
        }
        for i in 0..z.len() {
            for j in (i + 1)..z.len() {
                let rest = w.remove_at(j).remove_at(i);
                let sign = if (i + j) % 2 == 0 { Rational::one() } else { -Rational::one() };
                for a in 0..n {
                    let c = u.structure_constant(z[i], z[j], a);
                    if c.is_zero() {
                        continue;
                    }
                    let mut args = vec![a];
                    args.extend(rest.0.iter().copied());
                    v.add_assign(&f.eval_gens(&args).scale_rat(&(c * &sign)));
                }
            }
        }
        out.set(w, v);
    }
    Ok(out)
}

fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    if k == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            let moved = (p.len() - pos) as i64;
            out.push((q, if moved % 2 == 0 { s } else { -s }));
        }
    }
    out
}

/// `Ψ*(f)(z_1..z_k) = Σ_σ ε(σ) f(z_σ(1), …, z_σ(k))` on generators.
pub fn antisymmetrize(f: &Cochain) -> Result<CECochain> {
    let n = f.nvars;
    let k = f.arity;
    let mut out = CECochain::zero(k, n);
    let perms = permutations(k);
    for w in ExteriorIndex::all(n, k) {
        let mut v = NCPoly::zero(n, 0);
        for (p, s) in &perms {
            let args: Vec<Monomial> = p.iter().map(|&i| Monomial::generator(n, w.0[i])).collect();
            v.add_assign(&f.eval_mono(&args)?.scale_rat(&Rational::from_integer((*s).into())));
        }
        out.set(w, v);
    }
    Ok(out)
}

/// Restriction of a 1-cochain to generators, as a CE 1-cochain.
pub fn restrict_to_generators(f: &Cochain) -> Result<CECochain> {
    antisymmetrize(f)
}

/// Affine expression `constant + Σ_v x_v · poly_v` in the unknown generator values.
#[derive(Clone, Debug)]
struct Affine {
    terms: BTreeMap<Option<usize>, NCPoly>,
}

impl Affine {
    fn constant(p: NCPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(None, p);
        }
        Affine { terms }
    }

    fn add(&mut self, other: &Affine, sign: &Rational) {
        for (k, p) in &other.terms {
            let e = self.terms.entry(*k).or_insert_with(|| NCPoly::zero(p.nvars(), 0));
            e.add_assign(&p.scale_rat(sign));
            if e.is_zero() {
                self.terms.remove(k);
            }
        }
    }

    fn map(&self, f: impl Fn(&NCPoly) -> Result<NCPoly>) -> Result<Affine> {
        let mut terms = BTreeMap::new();
        for (k, p) in &self.terms {
            let v = f(p)?;
            if !v.is_zero() {
                terms.insert(*k, v);
            }
        }
        Ok(Affine { terms })
    }
}

/// Solves `b(α) = μ` for a 1-cochain on monomials of degree ≤ D.
///
/// α is determined by its generator values through
/// `α(e_i·w) = e_i α(w) + α(e_i) w − μ(e_i, w)` (e_i the first letter);
/// the remaining pairs give a linear system whose free variables are set to zero.
/// A supplied `seed` for the generator values is used when it satisfies the system.
pub fn solve_coboundary(u: &Presentation, mu: &Cochain, seed: Option<&[NCPoly]>) -> Result<Cochain> {
    let n = u.n();
    let cap = mu.cap;
    let gen_degree = mu.values.values().filter_map(NCPoly::degree).max().unwrap_or(0);
    let var_monos = Monomial::all_up_to(n, gen_degree);
    let nvar = n * var_monos.len();
    let var = |i: usize, k: usize| i * var_monos.len() + k;
    // α(m) for every monomial of degree ≤ cap, as affine expressions
    let mut alpha: HashMap<Monomial, Affine> = HashMap::new();
    // b(α)(1, 1) = α(1)
    alpha.insert(Monomial::one(n), Affine::constant(mu.eval_mono(&[Monomial::one(n), Monomial::one(n)])?));
    let gen_affine = |i: usize| -> Affine {
        let mut terms = BTreeMap::new();
        for (k, m) in var_monos.iter().enumerate() {
            terms.insert(Some(var(i, k)), mono_poly(m));
        }
        Affine { terms }
    };
    let ordered = Monomial::all_up_to(n, cap);
    for m in ordered.iter().filter(|m| m.degree() >= 1) {
        let i = m.first().expect("nonconstant");
        let rest = m.without(i);
        let value = if rest.is_one() {
            gen_affine(i)
        } else {
            let ei = u.gen(i);
            let mut v = alpha[&rest].map(|p| u.mul(&ei, p))?;
            let rp = mono_poly(&rest);
            v.add(&gen_affine(i).map(|p| u.mul(p, &rp))?, &Rational::one());
            v.add(&Affine::constant(mu.eval_mono(&[Monomial::generator(n, i), rest.clone()])?), &-Rational::one());
            v
        };
        alpha.insert(m.clone(), value);
    }
    let eval_affine_poly = |p: &NCPoly| -> Result<Affine> {
        let mut acc = Affine::constant(NCPoly::zero(n, 0));
        for (m, c) in p.terms() {
            let a = alpha.get(m).ok_or_else(|| Error::CapOverflow { cap, what: "coboundary product degree".into() })?;
            acc.add(a, c.constant_term());
        }
        Ok(acc)
    };
    // equations: e_i α(w) − α(e_i w) + α(e_i) w − μ(e_i, w) = 0 for i > first(w)
    let mut eqs: Vec<(SparseRow, Rational)> = Vec::new();
    for w in ordered.iter().filter(|w| w.degree() >= 1 && w.degree() < cap) {
        let f = w.first().expect("nonconstant");
        for i in (f + 1)..n {
            let ei = u.gen(i);
            let wp = mono_poly(w);
            let mut e = alpha[w].map(|p| u.mul(&ei, p))?;
            e.add(&eval_affine_poly(&u.mul(&ei, &wp)?)?, &-Rational::one());
            e.add(&gen_affine(i).map(|p| u.mul(p, &wp))?, &Rational::one());
            e.add(&Affine::constant(mu.eval_mono(&[Monomial::generator(n, i), w.clone()])?), &-Rational::one());
            let mut monos: BTreeMap<Monomial, (SparseRow, Rational)> = BTreeMap::new();
            for (k, p) in &e.terms {
                for (m, c) in p.terms() {
                    let entry = monos.entry(m.clone()).or_insert_with(|| (SparseRow::new(), Rational::zero()));
                    match k {
                        Some(v) => {
                            entry.0.insert(*v, c.constant_term().clone());
                        }
                        None => entry.1 -= c.constant_term(),
                    }
                }
            }
            eqs.extend(monos.into_values());
        }
    }
    let satisfies = |x: &[Rational]| {
        eqs.iter().all(|(row, rhs)| {
            let mut s = Rational::zero();
            for (k, v) in row {
                s += v * &x[*k];
            }
            s == *rhs
        })
    };
    let seed_vec = seed.and_then(|s| {
        let mut x = vec![Rational::zero(); nvar];
        for (i, p) in s.iter().enumerate().take(n) {
            for (m, c) in p.terms() {
                let k = var_monos.iter().position(|v| v == m)?;
                x[var(i, k)] = c.constant_term().clone();
            }
        }
        Some(x)
    });
    let x = match seed_vec.filter(|x| satisfies(x)) {
        Some(x) => x,
        None => {
            let mut ech = Echelon::new(nvar);
            for (row, rhs) in &eqs {
                if ech.insert(row.clone(), rhs.clone()) == Insert::Inconsistent {
                    return Err(Error::Inconsistent("μ is not a Hochschild coboundary at this cap".into()));
                }
            }
            ech.solve()
        }
    };
    let substitute = |a: &Affine| -> NCPoly {
        let mut out = NCPoly::zero(n, 0);
        for (k, p) in &a.terms {
            match k {
                None => out.add_assign(p),
                Some(v) => {
                    if !x[*v].is_zero() {
                        out.add_assign(&p.scale_rat(&x[*v]));
                    }
                }
            }
        }
        out
    };
    let mut result = Cochain::zero(1, n, cap);
    for m in &ordered {
        result.set(vec![m.clone()], substitute(&alpha[m]));
    }
    let check = hochschild_b(u, &result)?;
    if !check.sub(mu).is_zero() {
        return Err(Error::Inconsistent("solved α does not reproduce μ".into()));
    }
    Ok(result)
}

/// Linear endomorphism of `U(a)[[h]]` given on PBW monomials.
pub trait MonomialMap {
    fn apply_monomial(&self, m: &Monomial) -> Result<NCPoly>;
}

impl MonomialMap for Cochain {
    fn apply_monomial(&self, m: &Monomial) -> Result<NCPoly> {
        self.eval_mono(std::slice::from_ref(m))
    }
}

/// α extended past any cap by `α(e_i·w) = e_i α(w) + α(e_i) w − μ_1(e_i, w)`,
/// with `μ_1` read from the deformed presentation.
pub struct RecursiveAlpha<'a> {
    deformed: &'a Presentation,
    classical: Presentation,
    gens: Vec<NCPoly>,
    memo: Mutex<HashMap<Monomial, NCPoly>>,
}

impl<'a> RecursiveAlpha<'a> {
    pub fn new(deformed: &'a Presentation, gens: Vec<NCPoly>) -> Self {
        let gens = gens.into_iter().map(|g| g.with_order(0)).collect();
        RecursiveAlpha { deformed, classical: classical_algebra(deformed), gens, memo: Mutex::new(HashMap::new()) }
    }

    pub fn from_cochain(deformed: &'a Presentation, alpha: &Cochain) -> Result<Self> {
        let n = deformed.n();
        let gens = (0..n).map(|i| alpha.eval_mono(&[Monomial::generator(n, i)])).collect::<Result<Vec<_>>>()?;
        Ok(RecursiveAlpha::new(deformed, gens))
    }
}

impl MonomialMap for RecursiveAlpha<'_> {
    fn apply_monomial(&self, m: &Monomial) -> Result<NCPoly> {
        let n = self.classical.n();
        if let Some(v) = self.memo.lock().expect("memo").get(m) {
            return Ok(v.clone());
        }
        let v = match m.first() {
            None => NCPoly::zero(n, 0),
            Some(i) if m.degree() == 1 => self.gens[i].clone(),
            Some(i) => {
                let rest = m.without(i);
                let u = &self.classical;
                let ei = u.gen(i);
                let mut v = u.mul(&ei, &self.apply_monomial(&rest)?)?;
                v.add_assign(&u.mul(&self.gens[i], &mono_poly(&rest))?);
                let mu1 = self.deformed.mul(&self.deformed.gen(i), &NCPoly::monomial(rest.clone(), SeriesScalar::one(self.deformed.trunc_order())))?;
                v.sub_assign(&mu1.h_coeff(1).with_order(0));
                v
            }
        };
        self.memo.lock().expect("memo").insert(m.clone(), v.clone());
        Ok(v)
    }
}

/// Applies a monomial map coefficientwise to an element of `U(a)[[h]]`.
fn apply_map(a: &dyn MonomialMap, x: &NCPoly) -> Result<NCPoly> {
    let order = x.trunc_order();
    let mut out = NCPoly::zero(x.nvars(), order);
    for (m, c) in x.terms() {
        for (t, d) in a.apply_monomial(m)?.terms() {
            out.add_term(t.clone(), &c.scale(d.constant_term()));
        }
    }
    Ok(out)
}

/// `β_h^{-1}(x) = Σ_k h^k α^k(x)`.
fn beta_inverse(a: &dyn MonomialMap, x: &NCPoly) -> Result<NCPoly> {
    let order = x.trunc_order();
    let mut out = x.clone();
    let mut cur = x.clone();
    for k in 1..=order {
        cur = apply_map(a, &cur)?.with_order(order);
        if cur.is_zero() {
            break;
        }
        out.add_assign(&cur.shift_up(k));
    }
    Ok(out)
}

/// `e_i ·' e_j − e_j ·' e_i` for i < j, where `u ·' v = β^{-1}(β(u) · β(v))`, `β = id − hα`.
pub fn gauge_transform(p: &Presentation, alpha: &dyn MonomialMap) -> Result<BTreeMap<(usize, usize), NCPoly>> {
    let n = p.n();
    let order = p.trunc_order();
    let beta_gen = |i: usize| -> Result<NCPoly> {
        let a = alpha.apply_monomial(&Monomial::generator(n, i))?.with_order(order);
        Ok(p.gen(i).sub(&a.shift_up(1)))
    };
    let f: Vec<NCPoly> = (0..n).map(beta_gen).collect::<Result<_>>()?;
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let c = p.mul(&f[i], &f[j])?.sub(&p.mul(&f[j], &f[i])?);
            let v = beta_inverse(alpha, &c)?;
            if !v.is_zero() {
                out.insert((i, j), v);
            }
        }
    }
    Ok(out)
}

/// Presentation of `(U(a)[[h]], ·')` in the generators `e_i`: each bracket
/// `[f_i, f_j]` with `f_i = e_i − hα(e_i)` is rewritten in ordered f-monomials.
pub fn gauge_presentation(p: &Presentation, alpha: &dyn MonomialMap) -> Result<Presentation> {
    let n = p.n();
    let order = p.trunc_order();
    let f: Vec<NCPoly> = (0..n)
        .map(|i| Ok(p.gen(i).sub(&alpha.apply_monomial(&Monomial::generator(n, i))?.with_order(order).shift_up(1))))
        .collect::<Result<_>>()?;
    let mut fmono: HashMap<Monomial, NCPoly> = HashMap::new();
    let mut fpow = |m: &Monomial| -> Result<NCPoly> {
        if let Some(v) = fmono.get(m) {
            return Ok(v.clone());
        }
        let mut v = NCPoly::one(n, order);
        for l in m.letters() {
            v = p.mul(&v, &f[l])?;
        }
        fmono.insert(m.clone(), v.clone());
        Ok(v)
    };
    let mut rel = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut w = p.mul(&f[i], &f[j])?.sub(&p.mul(&f[j], &f[i])?);
            let mut g = NCPoly::zero(n, order);
            for k in 0..=order {
                while let Some((m, c)) = w.terms().iter().find(|(_, c)| !c.coeff(k).is_zero()).map(|(m, c)| (m.clone(), c.coeff(k))) {
                    let s = SeriesScalar::monomial(c, k, order);
                    g.add_term(m.clone(), &s);
                    w.sub_assign(&fpow(&m)?.scale(&s));
                }
            }
            if !g.is_zero() {
                rel.insert((i, j), g);
            }
        }
    }
    Presentation::new(format!("{}-gauge", p.name()), p.names().to_vec(), order, rel)
}

/// Central elements up to degree D as a module over the truncated ring.
#[derive(Clone, Debug)]
pub struct CenterBasis {
    /// Free generators in reduced echelon form (unit pivots, pivots ascending).
    pub free: Vec<NCPoly>,
    /// Generators `z` with `h^e z = 0` but `h^{e−1} z ≠ 0`, stored as `(e, z)`.
    pub torsion: Vec<(usize, NCPoly)>,
}

impl CenterBasis {
    /// Leading PBW monomials (at h = 0) of the free generators.
    pub fn free_profile(&self) -> Vec<Monomial> {
        self.free.iter().filter_map(|z| z.mod_h().terms().keys().next().cloned()).collect()
    }
}

/// Solves `[z, e_i] = 0` for all i over `z = Σ_{|m| ≤ D} z_m e^m`.
pub fn center_basis(p: &Presentation, degree_cap: usize) -> Result<CenterBasis> {
    let n = p.n();
    let order = p.trunc_order();
    let cols = Monomial::all_up_to(n, degree_cap);
    let mut row_index: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    let mut entries: Vec<(usize, usize, SeriesScalar)> = Vec::new();
    for (c, m) in cols.iter().enumerate() {
        let mp = NCPoly::monomial(m.clone(), SeriesScalar::one(order));
        for i in 0..n {
            let comm = p.mul(&mp, &p.gen(i))?.sub(&p.mul(&p.gen(i), &mp)?);
            for (t, v) in comm.terms() {
                let next = row_index.len();
                let r = *row_index.entry((i, t.clone())).or_insert(next);
                entries.push((r, c, v.clone()));
            }
        }
    }
    let mut mat = SeriesMatrix::zeros(row_index.len(), cols.len(), order);
    for (r, c, v) in entries {
        mat.add_to(r, c, &v);
    }
    let to_poly = |v: &[SeriesScalar]| -> NCPoly {
        let mut z = NCPoly::zero(n, order);
        for (k, s) in v.iter().enumerate() {
            z.add_term(cols[k].clone(), s);
        }
        z
    };
    let (free_vecs, torsion) = if row_index.is_empty() {
        let free = (0..cols.len())
            .map(|k| (0..cols.len()).map(|j| if j == k { SeriesScalar::one(order) } else { SeriesScalar::zero(order) }).collect::<Vec<_>>())
            .collect();
        (free, Vec::new())
    } else {
        let snf = mat.smith_normal_form();
        let mut free = Vec::new();
        let mut torsion = Vec::new();
        for i in 0..cols.len() {
            let col: Vec<SeriesScalar> = (0..cols.len()).map(|r| snf.right.get(r, i).clone()).collect();
            match snf.divisors.get(i) {
                Some(Divisor::Power(0)) => {}
                Some(Divisor::Power(k)) => {
                    let s = order + 1 - k;
                    let v: Vec<SeriesScalar> = col.iter().map(|x| x.shift_up(s)).collect();
                    torsion.push((order + 1 - s, to_poly(&v)));
                }
                _ => free.push(col),
            }
        }
        (free, torsion)
    };
    let free = k_rref(free_vecs, cols.len())?.iter().map(|v| to_poly(v)).collect();
    Ok(CenterBasis { free, torsion })
}

/// Reduced echelon form over the truncated ring for vectors with unit content.
fn k_rref(mut vecs: Vec<Vec<SeriesScalar>>, ncols: usize) -> Result<Vec<Vec<SeriesScalar>>> {
    let mut done: Vec<(usize, Vec<SeriesScalar>)> = Vec::new();
    for col in 0..ncols {
        let Some(pos) = vecs.iter().position(|v| v[col].is_unit()) else { continue };
        let mut piv = vecs.remove(pos);
        let inv = piv[col].invert()?;
        for x in piv.iter_mut() {
            *x = &*x * &inv;
        }
        for v in vecs.iter_mut().chain(done.iter_mut().map(|(_, v)| v)) {
            let f = v[col].clone();
            if f.is_zero() {
                continue;
            }
            for k in 0..ncols {
                let d = &f * &piv[k];
                v[k] -= &d;
            }
        }
        done.push((col, piv));
    }
    if vecs.iter().any(|v| v.iter().any(|x| !x.is_zero())) {
        return Err(Error::Inconsistent("free central generator without unit content".into()));
    }
    Ok(done.into_iter().map(|(_, v)| v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        let total: i64 = perms.iter().map(|(_, s)| s).sum();
        assert_eq!(total, 0);
        for (p, s) in &perms {
            let inversions = (0..3).flat_map(|i| ((i + 1)..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            assert_eq!(*s, if inversions % 2 == 0 { 1 } else { -1 }, "{p:?}");
        }
    }

    #[test]
    fn alternating_evaluation() {
        let n = 3;
        let v = NCPoly::monomial(Monomial::generator(n, 0), SeriesScalar::one(0));
        let f = CECochain::from_values(2, n, [(ExteriorIndex(vec![0, 2]), v.clone())]);
        assert_eq!(f.eval_gens(&[2, 0]), v.neg());
        assert!(f.eval_gens(&[1, 1]).is_zero());
    }

    #[test]
    fn domain_respects_cap() {
        let d = domain(2, 2, 1);
        assert_eq!(d.len(), 5);
        assert!(d.iter().all(|t| t.iter().map(Monomial::degree).sum::<usize>() <= 1));
    }
}
