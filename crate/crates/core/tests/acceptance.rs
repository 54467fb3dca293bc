//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p qdeform --test acceptance`. Exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use qdeform::ext::{ext_vanishing, poincare_check, theta_character, theta_link_check, ModulePresentation};
use qdeform::hochschild::*;
use qdeform::hopf::{f_presentation, twist_dual, Tensor, TwistData};
use qdeform::io::{parse_json, TwistFile};
use qdeform::koszul::{complex_check, deform_koszul, ExteriorIndex};
use qdeform::ncpoly::confluence_check;
use qdeform::series::Divisor;
use qdeform::{Monomial, NCPoly, SeriesMatrix, SeriesScalar};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

const SHIPPED: [&str; 7] = ["sec7", "scaled5", "solvable2", "heisenberg3", "abelian1", "abelian2", "abelian3"];
const DEGREE: usize = 6;
const WITNESS: usize = 8;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn twist(trunc: Option<usize>) -> TwistData {
    let text = std::fs::read_to_string(data_path("sec7-twist")).unwrap();
    let f: TwistFile = parse_json(&text).unwrap();
    TwistData::from_file(&f, trunc).unwrap()
}

fn x1(n: usize, k: u32) -> Vec<u32> {
    let mut v = vec![0; n];
    v[0] = k;
    v
}

fn criterion_1() -> Outcome {
    let dual = twist_dual(&twist(None), DEGREE, "sec7").map_err(|e| e.to_string())?;
    let (n, order) = (5, 7);
    let mut want = BTreeMap::new();
    for ((i, j), num, den, k) in [((2, 4), 2, 1, 1), ((3, 5), 2, 3, 3), ((4, 5), -1, 6, 4), ((2, 5), -1, 1, 2), ((3, 4), -1, 1, 2)] {
        want.insert((i - 1, j - 1), poly(n, order, &[(num, den, 1, &x1(n, k))]));
    }
    ensure(dual.f.presentation().relations() == want, "ξ-side commutators differ")?;
    ensure(dual.vee.relations() == load("sec7").relations(), "∨ presentation differs from sec7.json")?;
    Ok("five ξ commutators exact; ∨ side equals sec7.json".into())
}

fn criterion_2() -> Outcome {
    let t = twist(None);
    let n = 5;
    let g = |i: usize| Monomial::generator(n, i - 1);
    let xi1 = |k: u32| Monomial(x1(n, k));
    let one = Monomial::one(n);
    let expected = |i: usize, extra: &[(usize, u32, i64, i64)]| {
        let mut x = Tensor::zero(2, n, 6);
        x.add_term(vec![g(i), one.clone()], &SeriesScalar::one(6));
        x.add_term(vec![one.clone(), g(i)], &SeriesScalar::one(6));
        for &(a, k, num, den) in extra {
            x.add_term(vec![g(a), xi1(k)], &SeriesScalar::constant(rat(num, den), 6));
        }
        x
    };
    let cases = [
        (3, expected(3, &[(2, 1, -1, 1)])),
        (4, expected(4, &[(3, 1, -1, 1), (2, 2, 1, 2)])),
        (5, expected(5, &[(4, 1, -1, 1), (3, 2, 1, 2), (2, 3, -1, 6)])),
    ];
    for (i, want) in cases {
        let got = t.dual_coproduct(i - 1, DEGREE).map_err(|e| e.to_string())?;
        ensure(got == want, format!("Δ(ξ{i}) differs"))?;
    }
    Ok("Δ(ξ3), Δ(ξ4), Δ(ξ5) exact".into())
}

fn criterion_3() -> Outcome {
    let p = load("sec7");
    let c = deform_koszul(&p).map_err(|e| e.to_string())?;
    let r = complex_check(&c).map_err(|e| e.to_string())?;
    ensure(r.dd_failures.is_empty(), "∂∂ ≠ 0")?;
    ensure(r.limit_failures.is_empty(), "graded limit is not the classical Koszul complex")?;
    let ch = theta_character(&p, WITNESS).map_err(|e| e.to_string())?;
    ensure(ch.theta.iter().all(SeriesScalar::is_zero), "θ ≠ 0")?;
    Ok("∂∂ = 0 at N = 6, classical limit, θ ≡ 0".into())
}

fn criterion_4() -> Outcome {
    let p = load("scaled5");
    let ch = theta_character(&p, WITNESS).map_err(|e| e.to_string())?;
    ensure(ch.theta[..4].iter().all(SeriesScalar::is_zero), "θ(e_i) ≠ 0 for some i < 5")?;
    ensure(ch.theta[4] == SeriesScalar::monomial(rat(-1, 1), 1, p.trunc_order()), format!("θ(e5) = {}", ch.theta[4]))?;
    Ok("θ(e5) = -h, others 0".into())
}

fn criterion_5() -> Outcome {
    let p = load("solvable2");
    let t = LieTable::from_presentation(&p);
    let brute = brute_theta(&t);
    let ch = theta_character(&p, WITNESS).map_err(|e| e.to_string())?;
    for i in 0..2 {
        let b = brute[i].clone().ok_or("oracle found no θ")?;
        ensure(b == t.trace_ad(i), "oracle disagrees with Tr ad")?;
        ensure(ch.theta[i] == SeriesScalar::constant(b, p.trunc_order()), format!("θ(e{}) = {}", i + 1, ch.theta[i]))?;
    }
    ensure(ch.theta[0] == SeriesScalar::one(p.trunc_order()), "θ(e1) ≠ 1")?;
    Ok("θ = (1, 0) = Tr ad = brute-force oracle".into())
}

fn criterion_6() -> Outcome {
    for name in ["abelian1", "abelian2", "abelian3", "sec7", "scaled5"] {
        let f = f_presentation(&load(name)).map_err(|e| e.to_string())?;
        let r = theta_link_check(&f, WITNESS).map_err(|e| e.to_string())?;
        ensure(r.passed(), format!("{name}: mismatches at {:?}", r.mismatches))?;
    }
    Ok("θ_F = h·θ_∨ on abelian, sec7, scaled5".into())
}

fn criterion_7() -> Outcome {
    let p = load("sec7");
    let n = 5;
    let u = classical_algebra(&p);
    let mu = mu_series(&p, 1, 4).map_err(|e| e.to_string())?;
    let mu1 = &mu[0];
    let g = |i: usize| Monomial::generator(n, i - 1);
    let e1sq = poly(n, 0, &[(1, 1, 0, &x1(n, 2))]);
    let ev = |a: usize, b: usize| mu1.eval_mono(&[g(a), g(b)]).unwrap();
    ensure(ev(4, 3) == e1sq && ev(3, 4).is_zero() && ev(5, 2) == e1sq && ev(2, 5).is_zero(), "μ1 table")?;
    let alpha = solve_coboundary(&u, mu1, None).map_err(|e| e.to_string())?;
    let a3 = poly(n, 0, &[(-1, 2, 0, &[1, 1, 0, 0, 0])]);
    let a5 = poly(n, 0, &[(-1, 2, 0, &[1, 0, 0, 1, 0])]);
    let want = [NCPoly::zero(n, 0), NCPoly::zero(n, 0), a3.clone(), NCPoly::zero(n, 0), a5.clone()];
    for (i, w) in want.iter().enumerate() {
        ensure(&alpha.eval_mono(&[g(i + 1)]).unwrap() == w, format!("α(e{})", i + 1))?;
    }
    let seed = CECochain::from_values(1, n, [(ExteriorIndex(vec![2]), a3), (ExteriorIndex(vec![4]), a5)]);
    let psi = antisymmetrize(mu1).map_err(|e| e.to_string())?;
    ensure(ce_differential(&u, &seed).map_err(|e| e.to_string())? == psi, "Ψ*(μ1) ≠ d(seed)")?;
    let ra = RecursiveAlpha::from_cochain(&p, &alpha).map_err(|e| e.to_string())?;
    let comm = gauge_transform(&p, &ra).map_err(|e| e.to_string())?;
    ensure(comm.get(&(2, 4)) == Some(&poly(n, 6, &[(1, 6, 2, &x1(n, 3))])), "e3·'e5 − e5·'e3")?;
    ensure(comm.get(&(3, 4)) == Some(&poly(n, 6, &[(-1, 6, 3, &x1(n, 4))])), "e4·'e5 − e5·'e4")?;
    Ok("μ1 table, α, Ψ*(μ1) = d(seed), e3·'e5 − e5·'e3 = h²e1³/6".into())
}

fn criterion_8() -> Outcome {
    let p = load("sec7");
    let u = classical_algebra(&p);
    let mu = mu_series(&p, 1, 4).map_err(|e| e.to_string())?;
    let alpha = solve_coboundary(&u, &mu[0], None).map_err(|e| e.to_string())?;
    let ra = RecursiveAlpha::from_cochain(&p, &alpha).map_err(|e| e.to_string())?;
    let gp = gauge_presentation(&p, &ra).map_err(|e| e.to_string())?;
    let deformed = center_basis(&gp, 2).map_err(|e| e.to_string())?.free_profile();
    let trivial = center_basis(&p.classical_limit(p.trunc_order()), 2).map_err(|e| e.to_string())?.free_profile();
    ensure(deformed.iter().all(|m| m.0[1..].iter().all(|&x| x == 0)), "deformed center has a non-e1 generator")?;
    for i in [1, 3, 5] {
        ensure(trivial.contains(&Monomial::generator(5, i - 1)), format!("trivial center lacks e{i}"))?;
    }
    ensure(deformed != trivial, "profiles coincide")?;
    Ok(format!("deformed profile {} generators (powers of e1), trivial {}", deformed.len(), trivial.len()))
}

fn criterion_9() -> Outcome {
    for name in ["sec7", "scaled5", "abelian1", "abelian2", "abelian3"] {
        let p = load(name);
        let r = poincare_check(&p, &ModulePresentation::trivial(&p), WITNESS).map_err(|e| e.to_string())?;
        ensure(r.passed(), format!("{name}: Ext/Tor mismatch in degrees {:?}", r.mismatches))?;
        let cap = if p.n() >= 4 { 1 } else { 2 };
        let v = ext_vanishing(&deform_koszul(&p).map_err(|e| e.to_string())?, cap).map_err(|e| e.to_string())?;
        ensure(v.passed(), format!("{name}: Ext^i(K, A) ≠ 0 below the top at cap {cap}: {:?}", v.degrees))?;
    }
    Ok("Ext(K,K) ≅ Tor(Ω,K) and Ext^i(K,A) = 0 for i < n on sec7, scaled5, abelian1-3".into())
}

fn criterion_10() -> Outcome {
    for name in SHIPPED {
        let r = confluence_check(&load(name), DEGREE).map_err(|e| e.to_string())?;
        ensure(r.is_clean(), format!("{name}: {} discrepancies", r.discrepancies.len()))?;
    }
    let mut rng = StdRng::seed_from_u64(20_240_601);
    let ps = [load("sec7"), load("scaled5"), load("solvable2"), load("heisenberg3")];
    for k in 0..500 {
        let p = &ps[k % ps.len()];
        let a = random_word(&mut rng, p.n(), 4);
        let b = random_word(&mut rng, p.n(), 4);
        let ab: Vec<usize> = a.iter().chain(&b).copied().collect();
        let lhs = p.normal_form(&ab).map_err(|e| e.to_string())?;
        let rhs = p.mul(&p.normal_form(&a).unwrap(), &p.normal_form(&b).unwrap()).map_err(|e| e.to_string())?;
        ensure(lhs == rhs, format!("rewriting not multiplicative on {a:?}·{b:?}"))?;
    }
    let u = classical_algebra(&ps[0]);
    for k in 0..100 {
        let f = random_cochain(&mut rng, 1, 5, 2);
        ensure(hochschild_b(&u, &hochschild_b(&u, &f).unwrap()).unwrap().is_zero(), "b∘b ≠ 0")?;
        let lhs = antisymmetrize(&hochschild_b(&u, &f).unwrap()).unwrap();
        ensure(lhs == ce_differential(&u, &antisymmetrize(&f).unwrap()).unwrap(), "Ψ* does not intertwine")?;
        let c = random_ce(&mut rng, k % 4, 5);
        ensure(ce_differential(&u, &ce_differential(&u, &c).unwrap()).unwrap().is_zero(), "d∘d ≠ 0")?;
    }
    for _ in 0..100 {
        let order = 3;
        let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let m = SeriesMatrix::from_rows((0..r).map(|_| (0..c).map(|_| random_series(&mut rng, order)).collect()).collect(), order).unwrap();
        let pmq = random_invertible(&mut rng, r, order).mul(&m).unwrap().mul(&random_invertible(&mut rng, c, order)).unwrap();
        let d1: Vec<Divisor> = m.smith_normal_form().divisors;
        ensure(d1 == pmq.smith_normal_form().divisors, "Smith form changed under an invertible transform")?;
    }
    Ok("confluence on 7 presentations; 500 words; 100 cochains; 100 Smith forms".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("ξ-side relations from the twist", Duration::from_secs(60), criterion_1),
        ("dual coproducts", Duration::from_secs(60), criterion_2),
        ("deformed Koszul resolution and θ of sec7", Duration::from_secs(120), criterion_3),
        ("scaled-bracket θ", Duration::from_secs(60), criterion_4),
        ("classical limit against the oracle", Duration::from_secs(10), criterion_5),
        ("θ link across quantum duality", Duration::from_secs(120), criterion_6),
        ("Hochschild suite", Duration::from_secs(60), criterion_7),
        ("center separation", Duration::from_secs(60), criterion_8),
        ("Poincaré duality and Ext vanishing", Duration::from_secs(300), criterion_9),
        ("structural properties", Duration::from_secs(300), criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > *limit => Err(format!("{msg}, but took longer than {:?}", limit)),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {:>2}: PASS ({:.2}s) {name}: {msg}", k + 1, elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2}: FAIL ({:.2}s) {name}: {msg}", k + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
