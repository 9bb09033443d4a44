//! `pclh`: verify pseudoalgebra specs, compute brackets and differentials,
//! and replay the graph examples.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pclh::graphs::Graph;
use pclh::operad::{
    ad, check_cycle_condition, check_invariance, check_linearity, find_nonzero, fmt_witness, master_from_pseudoalgebra,
    phi, star_bracket, star_master, CochainConfig, ProbeSuite,
};
use pclh::parse::parse_element;
use pclh::pseudoalg::{self, fmt_lambda, to_lambda, PseudoAlgebra};
use pclh::suites::{self, Check, SelftestOptions, SuiteReport};
use pclh::Error;

#[derive(Parser)]
#[command(name = "pclh", version, about = "Exact checks for Poisson pseudoalgebras and their classical operad")]
struct Cli {
    /// Seed for every randomized probe.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Probe vectors: generators (0), first derivatives (1), quadratic monomials (2).
    #[arg(long, global = true, default_value_t = 2)]
    probe_degree: usize,
    /// Longest oriented cycle tested by the second cycle condition.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..))]
    cycle_bound: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Pseudoalgebra axioms, Leibniz rules, the master equation and the
    /// operad axioms of the master element.
    Verify { spec: String },
    /// The pseudobracket `[a * b]` of two elements.
    Bracket {
        spec: String,
        a: String,
        b: String,
        /// Print as a λ-bracket (abelian H only).
        #[arg(long)]
        lambda: bool,
    },
    /// Evaluate `X □ X` on all acyclic 3-graphs.
    Master { spec: String },
    /// Apply `ad_{X*}` to a cochain, or check `[X*, X*] = 0` without one.
    Cohomology { spec: String, cochain: Option<PathBuf> },
    /// Enumerate acyclic graphs and replay cocompositions.
    #[command(subcommand)]
    Graphs(GraphsCommand),
    /// Run every suite on the built-in examples.
    Selftest,
}

#[derive(Subcommand)]
enum GraphsCommand {
    /// List the acyclic n-graphs.
    Enumerate {
        n: usize,
        #[arg(long, default_value_t = 6)]
        bound: usize,
    },
    /// Replay the stored examples.
    Golden,
    /// Cocomposition of a graph such as `"5; 1->2, 3->1"` by a partition like `2,1,2`.
    Cocompose {
        graph: String,
        #[arg(value_delimiter = ',')]
        parts: Vec<usize>,
    },
}

/// Outcome of a command: print it, then exit 0 or 1.
struct Outcome {
    text: String,
    json: serde_json::Value,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j as usize).build_global();
    }
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Text => print!("{}", out.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable")),
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn opts(cli: &Cli) -> SelftestOptions {
    SelftestOptions { seed: cli.seed, probe_degree: cli.probe_degree, cycle_bound: cli.cycle_bound as usize }
}

/// A spec file, or `builtin:NAME`.
fn load_spec(spec: &str) -> Result<Arc<PseudoAlgebra>, Error> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return pseudoalg::builtin(name)
            .map(Arc::new)
            .ok_or_else(|| Error::UnknownSymbol(format!("{name} (builtins: {})", pseudoalg::BUILTIN_NAMES.join(", "))));
    }
    let text = read(Path::new(spec))?;
    Ok(Arc::new(pseudoalg::load_json(&text).map_err(|e| in_file(spec, e))?))
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn in_file(path: &str, e: Error) -> Error {
    match e {
        Error::Parse { col, msg } => Error::Parse { col, msg: format!("{path}: {msg}") },
        other => other,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let o = opts(cli);
    match &cli.command {
        Command::Verify { spec } => verify(&load_spec(spec)?, &o),
        Command::Bracket { spec, a, b, lambda } => bracket(&load_spec(spec)?, a, b, *lambda),
        Command::Master { spec } => {
            let pa = load_spec(spec)?;
            let probe = ProbeSuite::new(pa.module(), o.probe_degree, o.seed);
            Ok(suites_outcome(pa.name(), vec![suites::master_suite(&pa, &probe)]))
        }
        Command::Cohomology { spec, cochain } => cohomology(&load_spec(spec)?, cochain.as_deref(), &o),
        Command::Graphs(g) => graphs(g),
        Command::Selftest => {
            let r = suites::selftest(&o);
            let text = render_suites(&r.suites);
            let passed = r.passed;
            Ok(Outcome { text, json: serde_json::to_value(&r).expect("serializable"), passed })
        }
    }
}

fn render_suites(list: &[SuiteReport]) -> String {
    let mut out = String::new();
    let mut total = 0;
    let mut failed = 0;
    for s in list {
        for c in &s.checks {
            total += 1;
            failed += usize::from(!c.passed);
            out.push_str(&render_check(&s.suite, c));
        }
    }
    out.push_str(&format!("{}: {}/{} checks passed\n", if failed == 0 { "PASS" } else { "FAIL" }, total - failed, total));
    out
}

fn render_check(suite: &str, c: &Check) -> String {
    let status = if c.passed { "PASS" } else { "FAIL" };
    let mut line = format!("{status} {suite}: {} [{}]", c.name, c.instances);
    if let Some(r) = &c.residual {
        line.push_str(&format!(" {r}"));
    }
    line.push('\n');
    line
}

#[derive(Serialize)]
struct SuitesJson<'a> {
    spec: &'a str,
    passed: bool,
    suites: &'a [SuiteReport],
}

fn suites_outcome(name: &str, list: Vec<SuiteReport>) -> Outcome {
    let passed = list.iter().all(SuiteReport::passed);
    let json = serde_json::to_value(SuitesJson { spec: name, passed, suites: &list }).expect("serializable");
    Outcome { text: render_suites(&list), json, passed }
}

fn verify(pa: &Arc<PseudoAlgebra>, o: &SelftestOptions) -> Result<Outcome, Error> {
    let mut list = vec![suites::pseudoalgebra_suite(pa)];
    if pa.module().has_product() {
        list.push(suites::leibniz_suite(pa, o.seed, 100));
    }
    let probe = ProbeSuite::new(pa.module(), o.probe_degree, o.seed);
    list.push(suites::master_suite(pa, &probe));

    let x = master_from_pseudoalgebra(pa);
    let module = pa.module();
    let mut axioms = SuiteReport { suite: "master element axioms".into(), checks: Vec::new(), masters: Vec::new() };
    let mut inv = Check::new("invariance under S2");
    inv.record(check_invariance(&x, &probe).err().map(|e| e.to_string()));
    let mut cyc = Check::new("cycle conditions");
    cyc.record(check_cycle_condition(&x, o.cycle_bound, &probe).map(|w| fmt_witness(module, &w)));
    let mut lin = Check::new("componentwise linearity");
    lin.record(check_linearity(&x, &probe).map(|w| fmt_witness(module, &w)));
    axioms.checks = vec![inv, cyc, lin];
    list.push(axioms);
    Ok(suites_outcome(pa.name(), list))
}

fn bracket(pa: &Arc<PseudoAlgebra>, a: &str, b: &str, lambda: bool) -> Result<Outcome, Error> {
    let m = pa.module();
    let av = parse_element(m, a, pa.central())?;
    let bv = parse_element(m, b, pa.central())?;
    let t = pa.try_bracket(&av, &bv)?;
    let value = if lambda { fmt_lambda(m, &to_lambda(m, &t)?) } else { m.fmt_pseudo(&t) };
    let json = serde_json::json!({ "a": m.fmt_element(&av), "b": m.fmt_element(&bv), "lambda": lambda, "value": value });
    Ok(Outcome { text: format!("{value}\n"), json, passed: true })
}

fn cohomology(pa: &Arc<PseudoAlgebra>, cochain: Option<&Path>, o: &SelftestOptions) -> Result<Outcome, Error> {
    let module = Arc::clone(pa.module());
    let xs = star_master(Arc::clone(&module), pa.bracket_fn());
    let (label, f) = match cochain {
        Some(p) => {
            let cfg = CochainConfig::from_json(&read(p)?).map_err(|e| in_file(&p.display().to_string(), e))?;
            (p.display().to_string(), cfg.build(pa)?)
        }
        None => ("X*".to_string(), xs.clone()),
    };
    let degree = f.arity() as i64 - 1;
    let leibniz = suites::variational_leibniz(&f)?;
    if !leibniz {
        return Err(Error::Validation(format!("{label} does not satisfy the variational Leibniz condition")));
    }
    let image = star_bracket(&xs, &f)?;
    let mut values = Vec::new();
    for t in generator_tuples(&module, image.arity()) {
        let v = image.eval_monomials(&t);
        if !v.is_zero() {
            let args: Vec<String> = t.iter().map(|m| module.fmt_monomial(m)).collect();
            values.push((args.join(" ⊗ "), module.fmt_pseudo(&v)));
        }
    }
    let closed = values.is_empty();
    // the same question in the full operad, through φ
    let probe = suites::probe_for(&module, o);
    let x = master_from_pseudoalgebra(pa);
    let classical = ad(&x, &phi(&f))?;
    let classical_residual = find_nonzero(&classical, &probe).map(|w| fmt_witness(&module, &w));

    let mut text = format!("cochain {label} of degree {degree}\nvariational leibniz: ok\n");
    if closed {
        text.push_str("ad_X* f = 0 on generator tuples: closed\n");
    } else {
        for (args, v) in &values {
            text.push_str(&format!("ad_X* f ({args}) = {v}\n"));
        }
        text.push_str("not closed\n");
    }
    match &classical_residual {
        None => text.push_str("ad_X phi(f) = 0 on probes\n"),
        Some(w) => text.push_str(&format!("ad_X phi(f) nonzero: {w}\n")),
    }
    let image_json: Vec<serde_json::Value> =
        values.iter().map(|(a, v)| serde_json::json!({ "args": a, "value": v })).collect();
    let json = serde_json::json!({
        "spec": pa.name(),
        "cochain": label,
        "degree": degree,
        "variational_leibniz": leibniz,
        "image": image_json,
        "closed": closed,
        "classical_residual": classical_residual,
    });
    Ok(Outcome { text, json, passed: true })
}

fn generator_tuples(module: &pclh::hmodule::Module, n: usize) -> Vec<Vec<pclh::hmodule::Monomial>> {
    let ids: Vec<usize> = (0..module.generator_count()).collect();
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|p| ids.iter().map(move |&g| [p.clone(), vec![g]].concat())).collect();
    }
    out.iter().map(|t| pclh::operad::generator_tuple(t, module.dim())).collect()
}

fn graphs(cmd: &GraphsCommand) -> Result<Outcome, Error> {
    match cmd {
        GraphsCommand::Enumerate { n, bound } => {
            let list = Graph::enumerate_acyclic(*n, *bound)?;
            let names: Vec<String> = list.iter().map(Graph::to_string).collect();
            let mut text: String = names.iter().map(|g| format!("{g}\n")).collect();
            text.push_str(&format!("{} acyclic {n}-graphs\n", list.len()));
            let json = serde_json::json!({ "n": n, "count": list.len(), "graphs": names });
            Ok(Outcome { text, json, passed: true })
        }
        GraphsCommand::Golden => {
            let r = suites::graph_golden_suite();
            let ok = r.checks.iter().filter(|c| c.passed).count();
            let mut text = render_suites(std::slice::from_ref(&r));
            text.push_str(&format!("{ok}/{} match\n", r.checks.len()));
            let passed = r.passed();
            Ok(Outcome { text, json: serde_json::to_value(&r).expect("serializable"), passed })
        }
        GraphsCommand::Cocompose { graph, parts } => {
            let g: Graph = graph.parse()?;
            let (d0, dk) = g.cocompose(parts)?;
            let ext: Vec<Vec<usize>> = (1..=g.n())
                .map(|k| g.externally_connected(parts, k).map(|s| s.into_iter().collect()))
                .collect::<Result<_, _>>()?;
            let mut text = format!("outer: {d0}\n");
            for (i, h) in dk.iter().enumerate() {
                text.push_str(&format!("group {}: {h}\n", i + 1));
            }
            for (k, e) in ext.iter().enumerate() {
                text.push_str(&format!("E({}) = {e:?}\n", k + 1));
            }
            let json = serde_json::json!({
                "graph": g.to_string(),
                "parts": parts,
                "outer": d0.to_string(),
                "inner": dk.iter().map(Graph::to_string).collect::<Vec<_>>(),
                "externally_connected": ext,
            });
            Ok(Outcome { text, json, passed: true })
        }
    }
}
