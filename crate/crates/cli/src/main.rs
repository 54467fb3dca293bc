//! `qdeform` command-line driver.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qdeform::ext::{self, ModulePresentation};
use qdeform::hochschild;
use qdeform::hopf::{self, FPresentation, Tensor, TwistData};
use qdeform::io::{self, ModuleFile, PresentationFile, TwistFile};
use qdeform::koszul::{self, ComplexFile, ExteriorIndex};
use qdeform::ncpoly;
use qdeform::{Monomial, NCPoly, Presentation, SeriesScalar};

#[derive(Parser, Debug)]
#[command(name = "qdeform", version, about = "Exact computations in h-adic deformations of enveloping algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Truncation order N (default: the order stored in the input file).
    #[arg(long, global = true)]
    trunc: Option<usize>,
    /// Degree cap D (per-command default when omitted).
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Witness degree cap for θ extraction.
    #[arg(long = "witness-degree", global = true, default_value_t = ext::DEFAULT_WITNESS_DEGREE)]
    witness_degree: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resolve all overlap ambiguities and spot-check associativity (default D = 6).
    Confluence { presentation: PathBuf },
    /// Build the deformed Koszul resolution and check ∂∂ = 0 and the classical limit.
    Koszul { presentation: PathBuf },
    /// Modular character θ of the top Ext group.
    Theta { presentation: PathBuf },
    /// ∨ presentation of an F-side (QFSHA) presentation.
    Vee { presentation: PathBuf },
    /// Compare θ on an F-side presentation with θ on its ∨ presentation.
    Link { presentation: PathBuf },
    /// Dual presentation and coproducts of a twisted enveloping algebra (default D = 6).
    TwistDual { twist: PathBuf },
    /// μ_1, its coboundary α and the gauge-transformed commutators (default D = 4).
    Hochschild { presentation: PathBuf },
    /// Central elements up to degree D (default D = 2).
    Center {
        presentation: PathBuf,
        /// Use the gauge-transformed product instead of the given one.
        #[arg(long)]
        gauge: bool,
    },
    /// Ext^i(K, M) against Tor_{n−i}(Ω, M); M defaults to the trivial module.
    Poincare { presentation: PathBuf, module: Option<PathBuf> },
}

struct Report {
    ok: bool,
    json: Value,
    text: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => match emit(&cli, &report) {
            Ok(()) => ExitCode::from(if report.ok { 0 } else { 1 }),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<()> {
    let body = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json)?;
            s.push('\n');
            s
        }
        Format::Text => report.text.clone(),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_presentation(path: &Path, trunc: Option<usize>) -> Result<Presentation> {
    let text = read(path)?;
    io::parse_presentation(&text, trunc).with_context(|| format!("in {}", path.display()))
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), json!(1));
    }
    v
}

fn series(s: &SeriesScalar) -> Value {
    json!(s.to_strings())
}

fn poly(p: &NCPoly) -> Value {
    json!(io::poly_to_terms(p))
}

fn tensor_json(t: &Tensor) -> Value {
    let terms: Vec<Value> = t
        .terms()
        .iter()
        .map(|(k, c)| json!({ "legs": k.iter().map(|m| m.0.clone()).collect::<Vec<_>>(), "coeff": series(c) }))
        .collect();
    json!(terms)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let trunc = cli.trunc;
    let dw = cli.witness_degree;
    if cli.degree == Some(0) || dw == 0 {
        anyhow::bail!("degree caps must be positive");
    }
    match &cli.command {
        Command::Confluence { presentation } => {
            let p = load_presentation(presentation, trunc)?;
            let d = cli.degree.unwrap_or(6);
            let r = ncpoly::confluence_check(&p, d)?;
            let names = p.names();
            let disc: Vec<Value> = r
                .discrepancies
                .iter()
                .map(|x| json!({ "word": x.word.iter().map(|i| i + 1).collect::<Vec<_>>(), "difference": poly(&x.difference) }))
                .collect();
            let mut text = format!(
                "{}: {} overlaps, {} associativity checks, {} discrepancies\n",
                p.name(),
                r.triples_checked,
                r.associativity_checks,
                r.discrepancies.len()
            );
            for x in &r.discrepancies {
                let w: Vec<&str> = x.word.iter().map(|&i| names[i].as_str()).collect();
                text.push_str(&format!("  {}: {}\n", w.join(" "), x.difference.fmt_with(names)));
            }
            text.push_str(&format!("{}\n", verdict(r.is_clean())));
            Ok(Report {
                ok: r.is_clean(),
                json: with_schema(json!({
                    "command": "confluence",
                    "presentation": p.name(),
                    "degree": d,
                    "triples_checked": r.triples_checked,
                    "associativity_checks": r.associativity_checks,
                    "discrepancies": disc,
                    "clean": r.is_clean(),
                })),
                text,
            })
        }
        Command::Koszul { presentation } => {
            let p = load_presentation(presentation, trunc)?;
            let c = koszul::deform_koszul(&p)?;
            let r = koszul::complex_check(&c)?;
            let fails = |v: &[(usize, ExteriorIndex)]| -> Vec<Value> { v.iter().map(|(q, w)| json!({ "q": q, "subset": w.one_based() })).collect() };
            let file = ComplexFile::from_complex(&c);
            let names = p.names();
            let mut text = format!("{}: Koszul complex of length {}\n", p.name(), c.len());
            for q in (1..=c.n()).rev() {
                for (w, ch) in c.differentials(q) {
                    let parts: Vec<String> = ch.terms().iter().map(|(t, v)| format!("({})⊗{}", v.fmt_with(names), t.fmt_with(names))).collect();
                    text.push_str(&format!("  ∂{q}({}) = {}\n", w.fmt_with(names), if parts.is_empty() { "0".into() } else { parts.join(" + ") }));
                }
            }
            text.push_str(&format!(
                "∂∂ failures: {}, classical limit failures: {}\n{}\n",
                r.dd_failures.len(),
                r.limit_failures.len(),
                verdict(r.is_clean())
            ));
            Ok(Report {
                ok: r.is_clean(),
                json: with_schema(json!({
                    "command": "koszul",
                    "presentation": p.name(),
                    "complex": serde_json::to_value(&file)?,
                    "dd_failures": fails(&r.dd_failures),
                    "limit_failures": fails(&r.limit_failures),
                    "clean": r.is_clean(),
                })),
                text,
            })
        }
        Command::Theta { presentation } => {
            let p = load_presentation(presentation, trunc)?;
            let ch = ext::theta_character(&p, dw)?;
            let failures = ch.relation_failures(&p);
            let ok = failures.is_empty();
            let mut text = format!("{}: θ\n", p.name());
            for (name, t) in p.names().iter().zip(&ch.theta) {
                text.push_str(&format!("  θ({name}) = {t}\n"));
            }
            text.push_str(&format!("{}\n", verdict(ok)));
            Ok(Report {
                ok,
                json: with_schema(json!({
                    "command": "theta",
                    "presentation": p.name(),
                    "theta": ch.theta.iter().map(series).collect::<Vec<_>>(),
                    "witness_degree": ch.degree,
                    "relation_failures": failures.iter().map(|(i, j)| [i + 1, j + 1]).collect::<Vec<_>>(),
                })),
                text,
            })
        }
        Command::Vee { presentation } => {
            let f = FPresentation::new(load_presentation(presentation, trunc)?)?;
            let v = hopf::vee_presentation(&f)?;
            let mut text = format!("{}\n", v.name());
            for ((i, j), g) in v.relations() {
                text.push_str(&format!("  [{}, {}] = {}\n", v.names()[i], v.names()[j], g.fmt_with(v.names())));
            }
            Ok(Report { ok: true, json: with_schema(io::presentation_to_json(&v)), text })
        }
        Command::Link { presentation } => {
            let f = FPresentation::new(load_presentation(presentation, trunc)?)?;
            let r = ext::theta_link_check(&f, dw)?;
            let ok = r.passed();
            let names = f.presentation().names();
            let mut text = format!("{}: θ_F = h·θ_∨\n", f.presentation().name());
            for (k, name) in names.iter().enumerate() {
                text.push_str(&format!("  {name}: θ_F = {}, θ_∨ = {}\n", r.theta_f[k], r.theta_vee[k]));
            }
            text.push_str(&format!("{}\n", verdict(ok)));
            Ok(Report {
                ok,
                json: with_schema(json!({
                    "command": "link",
                    "presentation": f.presentation().name(),
                    "theta_f": r.theta_f.iter().map(series).collect::<Vec<_>>(),
                    "theta_vee": r.theta_vee.iter().map(series).collect::<Vec<_>>(),
                    "mismatches": r.mismatches.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "alpha_outside_ideal": r.alpha_outside_ideal,
                    "conjugation_failures": r.conjugation_failures,
                    "passed": ok,
                })),
                text,
            })
        }
        Command::TwistDual { twist } => {
            let file: TwistFile = io::parse_json(&read(twist)?).with_context(|| format!("in {}", twist.display()))?;
            let t = TwistData::from_file(&file, trunc)?;
            let d = cli.degree.unwrap_or(6);
            let name = file.base.name.strip_suffix("-base").unwrap_or(&file.base.name).to_string();
            let dual = hopf::twist_dual(&t, d, &name)?;
            let fp = dual.f.presentation();
            let xi: Vec<String> = (1..=t.n()).map(|i| format!("ξ{i}")).collect();
            let mut text = format!("{name}: dual relations\n");
            for ((i, j), g) in fp.relations() {
                text.push_str(&format!("  [{}, {}] = {}\n", xi[i], xi[j], g.fmt_with(&xi)));
            }
            text.push_str("coproducts\n");
            for (i, c) in dual.coproducts.iter().enumerate() {
                text.push_str(&format!("  Δ({}) = {}\n", xi[i], c.fmt_with(&xi)));
            }
            text.push_str("∨ presentation\n");
            for ((i, j), g) in dual.vee.relations() {
                text.push_str(&format!("  [{}, {}] = {}\n", dual.vee.names()[i], dual.vee.names()[j], g.fmt_with(dual.vee.names())));
            }
            let mut out = serde_json::to_value(PresentationFile::from_presentation(&dual.vee))?;
            if let Value::Object(m) = &mut out {
                m.insert("command".into(), json!("twist-dual"));
                m.insert("degree".into(), json!(d));
                m.insert("dual_relations".into(), serde_json::to_value(PresentationFile::from_presentation(fp))?["relations"].clone());
                m.insert("coproducts".into(), json!(dual.coproducts.iter().map(tensor_json).collect::<Vec<_>>()));
            }
            Ok(Report { ok: true, json: with_schema(out), text })
        }
        Command::Hochschild { presentation } => {
            let p = load_presentation(presentation, trunc)?;
            hochschild_report(&p, cli.degree.unwrap_or(4))
        }
        Command::Center { presentation, gauge } => {
            let p = load_presentation(presentation, trunc)?;
            let d = cli.degree.unwrap_or(2);
            let q = if *gauge { gauge_of(&p, 4)? } else { p.clone() };
            let cb = hochschild::center_basis(&q, d)?;
            let names = p.names();
            let mut text = format!("{}: center up to degree {d}\n", q.name());
            for z in &cb.free {
                text.push_str(&format!("  free: {}\n", z.fmt_with(names)));
            }
            for (e, z) in &cb.torsion {
                text.push_str(&format!("  h^{e}-torsion: {}\n", z.fmt_with(names)));
            }
            Ok(Report {
                ok: true,
                json: with_schema(json!({
                    "command": "center",
                    "presentation": q.name(),
                    "degree": d,
                    "free": cb.free.iter().map(poly).collect::<Vec<_>>(),
                    "torsion": cb.torsion.iter().map(|(e, z)| json!({ "exponent": e, "element": poly(z) })).collect::<Vec<_>>(),
                    "free_profile": cb.free_profile().iter().map(|m| m.0.clone()).collect::<Vec<_>>(),
                })),
                text,
            })
        }
        Command::Poincare { presentation, module } => {
            let p = load_presentation(presentation, trunc)?;
            let m = match module {
                None => ModulePresentation::trivial(&p),
                Some(path) => {
                    let mf: ModuleFile = io::parse_json(&read(path)?).with_context(|| format!("in {}", path.display()))?;
                    ModulePresentation::new(&p, mf.rank, mf.to_matrices(p.trunc_order())?)?
                }
            };
            let r = ext::poincare_check(&p, &m, dw)?;
            let ok = r.passed();
            let n = p.n();
            let mut text = format!("{}: Ext^i(K, M) vs Tor_(n-i)(Ω, M)\n", p.name());
            for i in 0..=n {
                text.push_str(&format!("  i = {i}: {} | {}\n", r.ext[i], r.tor[n - i]));
            }
            text.push_str(&format!("{}\n", verdict(ok)));
            Ok(Report {
                ok,
                json: with_schema(json!({
                    "command": "poincare",
                    "presentation": p.name(),
                    "ext": r.ext.iter().map(|h| json!({ "free": h.free, "torsion": h.torsion })).collect::<Vec<_>>(),
                    "tor": r.tor.iter().map(|h| json!({ "free": h.free, "torsion": h.torsion })).collect::<Vec<_>>(),
                    "theta": r.theta.iter().map(series).collect::<Vec<_>>(),
                    "mismatches": r.mismatches,
                    "passed": ok,
                })),
                text,
            })
        }
    }
}

fn gauge_of(p: &Presentation, d: usize) -> Result<Presentation> {
    let u = hochschild::classical_algebra(p);
    let mu = hochschild::mu_series(p, 1, d)?;
    let alpha = hochschild::solve_coboundary(&u, &mu[0], None)?;
    let ra = hochschild::RecursiveAlpha::from_cochain(p, &alpha)?;
    Ok(hochschild::gauge_presentation(p, &ra)?)
}

fn hochschild_report(p: &Presentation, d: usize) -> Result<Report> {
    let n = p.n();
    let names = p.names();
    let u = hochschild::classical_algebra(p);
    let mu = hochschild::mu_series(p, 1, d)?;
    let mu1 = &mu[0];
    let cocycle = hochschild::hochschild_b(&u, mu1)?.is_zero();
    let psi = hochschild::antisymmetrize(mu1)?;
    let alpha = hochschild::solve_coboundary(&u, mu1, None)?;
    let alpha_gens = hochschild::restrict_to_generators(&alpha)?;
    let identity = hochschild::ce_differential(&u, &alpha_gens)? == psi;
    let ra = hochschild::RecursiveAlpha::from_cochain(p, &alpha)?;
    let comm = hochschild::gauge_transform(p, &ra)?;
    let h1_killed = comm.values().all(|g| g.h_coeff(1).is_zero());
    let ok = cocycle && identity && h1_killed;

    let g = |i| Monomial::generator(n, i);
    let mut mu_gens = Vec::new();
    let mut text = format!("{}: Hochschild data at degree cap {d}\n", p.name());
    for i in 0..n {
        for j in 0..n {
            let v = mu1.eval_mono(&[g(i), g(j)])?;
            if !v.is_zero() {
                text.push_str(&format!("  μ1({}, {}) = {}\n", names[i], names[j], v.fmt_with(names)));
                mu_gens.push(json!({ "args": [i + 1, j + 1], "value": poly(&v) }));
            }
        }
    }
    let mut alpha_json = Vec::new();
    for i in 0..n {
        let v = alpha.eval_mono(&[g(i)])?;
        text.push_str(&format!("  α({}) = {}\n", names[i], v.fmt_with(names)));
        alpha_json.push(poly(&v));
    }
    for ((i, j), v) in &comm {
        text.push_str(&format!("  {a}·'{b} − {b}·'{a} = {}\n", v.fmt_with(names), a = names[*i], b = names[*j]));
    }
    text.push_str(&format!(
        "b(μ1) = 0: {}\nΨ*(μ1) = d(α|a): {}\nh¹ terms removed: {}\n{}\n",
        verdict(cocycle),
        verdict(identity),
        verdict(h1_killed),
        verdict(ok)
    ));
    Ok(Report {
        ok,
        json: with_schema(json!({
            "command": "hochschild",
            "presentation": p.name(),
            "degree": d,
            "mu1_on_generators": mu_gens,
            "mu1": mu1.to_json(),
            "psi_mu1": psi.to_json(),
            "alpha_on_generators": alpha_json,
            "gauge_commutators": comm.iter().map(|((i, j), v)| json!({ "i": i + 1, "j": j + 1, "value": poly(v) })).collect::<Vec<_>>(),
            "mu1_is_cocycle": cocycle,
            "psi_identity": identity,
            "h1_removed": h1_killed,
        })),
        text,
    })
}
