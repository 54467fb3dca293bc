//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls the rewriting, Koszul or θ code of the library; the only
//! library input is the table of classical structure constants.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_traits::{One, Zero};
use qdeform::hochschild::{CECochain, Cochain};
use qdeform::io::parse_presentation;
use qdeform::koszul::ExteriorIndex;
use qdeform::{Monomial, NCPoly, Presentation, Rational, SeriesMatrix, SeriesScalar};
use rand::rngs::StdRng;
use rand::Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(format!("{name}.json"))
}

pub fn load(name: &str) -> Presentation {
    let text = std::fs::read_to_string(data_path(name)).expect("data file");
    parse_presentation(&text, None).expect("valid presentation")
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Polynomial in words of the free algebra.
pub type WordPoly = BTreeMap<Vec<usize>, Rational>;

/// Antisymmetric table `c[a][b][k]` with `[e_a, e_b] = Σ_k c[a][b][k] e_k`.
pub struct LieTable {
    pub n: usize,
    pub c: Vec<Vec<Vec<Rational>>>,
}

impl LieTable {
    pub fn from_presentation(p: &Presentation) -> Self {
        let n = p.n();
        let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
        for a in 0..n {
            for b in (a + 1)..n {
                for k in 0..n {
                    let v = p.structure_constant(a, b, k).clone();
                    c[b][a][k] = -v.clone();
                    c[a][b][k] = v;
                }
            }
        }
        LieTable { n, c }
    }

    pub fn trace_ad(&self, i: usize) -> Rational {
        (0..self.n).map(|a| self.c[i][a][a].clone()).sum()
    }
}

fn add_word(p: &mut WordPoly, w: Vec<usize>, c: Rational) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(w.clone()).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&w);
    }
}

/// Classical PBW normal form by repeatedly swapping the first descending pair:
/// `u e_a e_b v = u e_b e_a v + u [e_a, e_b] v`.
pub fn naive_normal_form(t: &LieTable, word: &[usize]) -> WordPoly {
    let mut todo: WordPoly = BTreeMap::new();
    add_word(&mut todo, word.to_vec(), Rational::one());
    let mut done: WordPoly = BTreeMap::new();
    while let Some((w, c)) = todo.pop_first() {
        match (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) {
            None => add_word(&mut done, w, c),
            Some(i) => {
                let (a, b) = (w[i], w[i + 1]);
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                add_word(&mut todo, swapped, c.clone());
                for k in 0..t.n {
                    if t.c[a][b][k].is_zero() {
                        continue;
                    }
                    let mut shorter = w[..i].to_vec();
                    shorter.push(k);
                    shorter.extend_from_slice(&w[i + 2..]);
                    add_word(&mut todo, shorter, &c * &t.c[a][b][k]);
                }
            }
        }
    }
    done
}

pub fn word_poly_to_ncpoly(p: &WordPoly, n: usize, order: usize) -> NCPoly {
    let mut out = NCPoly::zero(n, order);
    for (w, c) in p {
        let mut e = vec![0u32; n];
        for &l in w {
            e[l] += 1;
        }
        out.add_term(Monomial(e), &SeriesScalar::constant(c.clone(), order));
    }
    out
}

fn sorted_word(m: &[usize]) -> Vec<usize> {
    let mut v = m.to_vec();
    v.sort_unstable();
    v
}

/// Multiplies two sorted words classically and normalises.
fn product(t: &LieTable, a: &[usize], b: &[usize]) -> WordPoly {
    let mut w = a.to_vec();
    w.extend_from_slice(b);
    naive_normal_form(t, &w)
}

/// `[e_0 … e_{n-1}]`-boundary entries `u_τ` for every `τ = top \ {k}`, as word polynomials.
///
/// `∂(x_1∧…∧x_n) = Σ_k (−1)^{k+1} x_k ⊗ x̂_k + Σ_{k<l} (−1)^{k+l} 1 ⊗ [x_k,x_l]∧x̂_k∧x̂_l` (1-based k, l).
pub fn top_boundary(t: &LieTable) -> Vec<WordPoly> {
    let n = t.n;
    let mut u: Vec<WordPoly> = vec![BTreeMap::new(); n];
    for k in 0..n {
        let s = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
        add_word(&mut u[k], vec![k], s);
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let s = if (k + l) % 2 == 0 { Rational::one() } else { -Rational::one() };
            let rest: Vec<usize> = (0..n).filter(|&x| x != k && x != l).collect();
            for c in [k, l] {
                let coef = &t.c[k][l][c];
                if coef.is_zero() {
                    continue;
                }
                // e_c ∧ rest sorted: sign from moving e_c past the smaller entries
                let pos = rest.iter().filter(|&&x| x < c).count();
                let sign = if pos % 2 == 0 { s.clone() } else { -s.clone() };
                let missing = if c == k { l } else { k };
                add_word(&mut u[missing], Vec::new(), coef * &sign);
            }
        }
    }
    u
}

/// Dense Gaussian elimination; returns one solution of `A x = b` or `None`.
pub fn solve_dense(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>, ncols: usize) -> Option<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        b.swap(r, p);
        let inv = Rational::one() / &a[r][c];
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        b[r] *= &inv;
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..ncols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
                let d = &f * &b[r];
                b[i] -= d;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Some(x)
}

/// θ(e_i) of a classical Lie algebra: the scalar c with `e_i − c ∈ Σ_τ u_τ U(a)`,
/// found by solving the membership problem among words of degree ≤ 3.
pub fn brute_theta(t: &LieTable) -> Vec<Option<Rational>> {
    let n = t.n;
    let u = top_boundary(t);
    let mut multipliers: Vec<Vec<usize>> = vec![Vec::new()];
    for a in 0..n {
        multipliers.push(vec![a]);
        for b in a..n {
            multipliers.push(vec![a, b]);
        }
    }
    let mut columns: Vec<WordPoly> = Vec::new();
    for ut in &u {
        for m in &multipliers {
            let mut col = BTreeMap::new();
            for (w, c) in ut {
                for (x, d) in product(t, w, m) {
                    add_word(&mut col, x, c * &d);
                }
            }
            columns.push(col);
        }
    }
    // unknowns: θ then one coefficient per column; equation rows are PBW words
    let mut rows: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for col in &columns {
        for w in col.keys() {
            let k = rows.len();
            rows.entry(sorted_word(w)).or_insert(k);
        }
    }
    for w in std::iter::once(Vec::new()).chain((0..n).map(|i| vec![i])) {
        let k = rows.len();
        rows.entry(w).or_insert(k);
    }
    let ncols = columns.len() + 1;
    (0..n)
        .map(|i| {
            let mut a = vec![vec![Rational::zero(); ncols]; rows.len()];
            let mut b = vec![Rational::zero(); rows.len()];
            a[rows[&Vec::new()]][0] = Rational::one();
            for (j, col) in columns.iter().enumerate() {
                for (w, c) in col {
                    a[rows[w]][j + 1] += c;
                }
            }
            b[rows[&vec![i]]] = Rational::one();
            solve_dense(a, b, ncols).map(|x| x[0].clone())
        })
        .collect()
}

/// Builds `Σ (num/den) h^k e^expo`.
pub fn poly(n: usize, order: usize, terms: &[(i64, i64, usize, &[u32])]) -> NCPoly {
    let mut p = NCPoly::zero(n, order);
    for &(num, den, k, e) in terms {
        assert_eq!(e.len(), n);
        p.add_term(Monomial(e.to_vec()), &SeriesScalar::monomial(rat(num, den), k, order));
    }
    p
}

pub fn rank_dense(a: Vec<Vec<Rational>>, ncols: usize) -> usize {
    let rows = a.len();
    let mut a = a;
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in (r + 1)..rows {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for j in c..ncols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

fn subsets(n: usize, q: usize) -> Vec<Vec<usize>> {
    if q == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for s in subsets(n, q - 1) {
        let start = s.last().map_or(0, |&x| x + 1);
        for x in start..n {
            let mut t = s.clone();
            t.push(x);
            out.push(t);
        }
    }
    out
}

/// Betti numbers of Lie algebra cohomology with trivial coefficients:
/// `(dφ)(x_0..x_q) = Σ_{i<j} (−1)^{i+j} φ([x_i,x_j], x_0..x̂_i..x̂_j..x_q)`.
pub fn ce_betti(t: &LieTable) -> Vec<usize> {
    let n = t.n;
    let mut ranks = vec![0usize; n + 2];
    for q in 0..n {
        let src = subsets(n, q);
        let dst = subsets(n, q + 1);
        let index: BTreeMap<Vec<usize>, usize> = src.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut mat = vec![vec![Rational::zero(); src.len()]; dst.len()];
        for (r, x) in dst.iter().enumerate() {
            for i in 0..x.len() {
                for j in (i + 1)..x.len() {
                    let s = if (i + j) % 2 == 0 { Rational::one() } else { -Rational::one() };
                    let rest: Vec<usize> = x.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &v)| v).collect();
                    for c in 0..n {
                        let coef = &t.c[x[i]][x[j]][c];
                        if coef.is_zero() || rest.contains(&c) {
                            continue;
                        }
                        let pos = rest.iter().filter(|&&v| v < c).count();
                        let mut key = rest.clone();
                        key.insert(pos, c);
                        let sign = if pos % 2 == 0 { s.clone() } else { -s.clone() };
                        mat[r][index[&key]] += coef * &sign;
                    }
                }
            }
        }
        ranks[q + 1] = rank_dense(mat, src.len());
    }
    (0..=n).map(|q| subsets(n, q).len() - ranks[q + 1] - ranks[q]).collect()
}

pub fn small_rat(rng: &mut StdRng) -> Rational {
    rat(rng.gen_range(-3..=3), rng.gen_range(1..=2))
}

pub fn random_series(rng: &mut StdRng, order: usize) -> SeriesScalar {
    SeriesScalar::from_coeffs((0..=order).map(|_| if rng.gen_bool(0.5) { small_rat(rng) } else { Rational::zero() }).collect(), order)
}

pub fn random_poly(rng: &mut StdRng, n: usize, order: usize, max_deg: usize, terms: usize) -> NCPoly {
    let monos = Monomial::all_up_to(n, max_deg);
    let mut p = NCPoly::zero(n, order);
    for _ in 0..rng.gen_range(0..=terms) {
        let m = monos[rng.gen_range(0..monos.len())].clone();
        p.add_term(m, &random_series(rng, order));
    }
    p
}

pub fn random_word(rng: &mut StdRng, n: usize, max_len: usize) -> Vec<usize> {
    (0..rng.gen_range(0..=max_len)).map(|_| rng.gen_range(0..n)).collect()
}

pub fn random_cochain(rng: &mut StdRng, arity: usize, n: usize, cap: usize) -> Cochain {
    Cochain::from_fn(arity, n, cap, |_| Ok(random_poly(rng, n, 0, 2, 2))).unwrap()
}

pub fn random_ce(rng: &mut StdRng, q: usize, n: usize) -> CECochain {
    CECochain::from_values(q, n, ExteriorIndex::all(n, q).into_iter().map(|w| (w, random_poly(rng, n, 0, 2, 2))).collect::<Vec<_>>())
}

/// Random invertible matrix: unit lower triangular times upper triangular with unit diagonal.
pub fn random_invertible(rng: &mut StdRng, k: usize, order: usize) -> SeriesMatrix {
    let upper = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => SeriesScalar::constant(rat(rng.gen_range(1..=3), 1), order),
                    std::cmp::Ordering::Less => random_series(rng, order),
                    std::cmp::Ordering::Greater => SeriesScalar::zero(order),
                })
                .collect()
        })
        .collect();
    let lower = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => SeriesScalar::one(order),
                    std::cmp::Ordering::Greater => random_series(rng, order),
                    std::cmp::Ordering::Less => SeriesScalar::zero(order),
                })
                .collect()
        })
        .collect();
    SeriesMatrix::from_rows(lower, order).unwrap().mul(&SeriesMatrix::from_rows(upper, order).unwrap()).unwrap()
}
