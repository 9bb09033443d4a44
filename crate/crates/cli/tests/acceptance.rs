//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria run concurrently; the exit status is nonzero if any fails.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use pclh::graphs::Graph;
use pclh::operad::ProbeSuite;
use pclh::pseudoalg;
use pclh::suites::{self, SelftestOptions, SuiteReport, POISSON_BUILTINS};

const SEED: u64 = 42;

type Criterion = Box<dyn Fn() -> Verdict + Send + Sync>;

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn from_reports(reports: &[SuiteReport], extra: Vec<(bool, String)>) -> Verdict {
        let mut notes = Vec::new();
        let mut passed = true;
        let mut checks = 0;
        for r in reports {
            for c in &r.checks {
                checks += 1;
                if !c.passed {
                    passed = false;
                    notes.push(format!("{}: {} failed ({})", r.suite, c.name, c.residual.as_deref().unwrap_or("")));
                }
            }
        }
        for (ok, note) in extra {
            passed &= ok;
            if !ok {
                notes.push(note);
            }
        }
        let detail = if notes.is_empty() { format!("{checks} checks") } else { notes.join("; ") };
        Verdict { passed, detail }
    }
}

fn count(r: &SuiteReport, name: &str) -> usize {
    r.check(name).map_or(0, |c| c.instances)
}

/// Brute force: every orientation of every edge subset of the complete
/// graph, kept when the underlying undirected graph is a forest.
fn brute_force_acyclic(n: usize) -> BTreeSet<String> {
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let mut out = BTreeSet::new();
    // each pair: absent, i->j, j->i
    let total = 3usize.pow(pairs.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut edges = Vec::new();
        for &(i, j) in &pairs {
            match c % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            c /= 3;
        }
        let mut parent: Vec<usize> = (0..=n).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        let forest = edges.iter().all(|&(a, b)| {
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            parent[ra] = rb;
            ra != rb
        });
        if forest {
            out.insert(Graph::new(n, &edges).expect("valid graph").to_string());
        }
    }
    out
}

fn hopf() -> Verdict {
    let r = suites::hopf_suite(SEED, 200, 4);
    let algebras = suites::hopf_test_algebras().len();
    let few = r.checks.iter().filter(|c| c.instances < 200).count();
    Verdict::from_reports(&[r], vec![(algebras == 4 && few == 0, format!("{few} checks below 200 samples"))])
}

fn graph_golden() -> Verdict {
    let golden = suites::graph_golden_suite();
    let counts = suites::graph_count_suite();
    let mut extra = Vec::new();
    for (n, expected) in [(2, 3), (3, 19)] {
        let oracle = brute_force_acyclic(n);
        let listed: BTreeSet<String> =
            Graph::enumerate_acyclic(n, 6).expect("small n").iter().map(Graph::to_string).collect();
        extra.push((
            oracle.len() == expected && listed == oracle,
            format!("n={n}: brute force {} graphs, enumerator {}", oracle.len(), listed.len()),
        ));
    }
    extra.push((golden.checks.len() == 5, format!("{} golden examples", golden.checks.len())));
    Verdict::from_reports(&[golden, counts], extra)
}

fn cooperad() -> Verdict {
    let r = suites::cooperad_suite(SEED, 500, 8);
    let short = count(&r, "coequivariance") < 500 || count(&r, "edge bijection") < 500;
    Verdict::from_reports(&[r], vec![(!short, "fewer than 500 instances".into())])
}

fn operad_axioms(opts: &SelftestOptions) -> Verdict {
    let mut reports = Vec::new();
    let mut extra = Vec::new();
    let mut instances = 0;
    for name in ["boson", "w_d1"] {
        let pa = Arc::new(pseudoalg::builtin(name).expect("builtin"));
        let probe = suites::probe_for(pa.module(), opts);
        let r = suites::operad_suite(&pa, SEED, 60, &probe, opts.cycle_bound);
        let before = count(&r, "associativity: parallel insertion before");
        let after = count(&r, "associativity: parallel insertion after");
        let nonzero = count(&r, "nonzero left-hand sides");
        extra.push((before > 0 && after > 0, format!("{name}: a parallel case was never sampled")));
        extra.push((nonzero > 0, format!("{name}: every sampled composition vanished")));
        instances += ["associativity: nested insertion", "equivariance", "unit laws"].iter().map(|c| count(&r, c)).sum::<usize>()
            + before
            + after;
        reports.push(r);
    }
    extra.push((instances >= 100, format!("only {instances} instances")));
    let mut v = Verdict::from_reports(&reports, extra);
    if v.passed {
        v.detail = format!("{instances} axiom instances, {}", v.detail);
    }
    v
}

fn pseudoalgebra_axioms() -> Verdict {
    let required = ["w_d1", "w_d2", "w_d_nonabelian", "boson", "fermion", "affine", "type_w", "type_k"];
    let missing: Vec<&str> = required.iter().copied().filter(|n| pseudoalg::builtin(n).is_none()).collect();
    let reports: Vec<SuiteReport> = required
        .iter()
        .filter_map(|n| pseudoalg::builtin(n))
        .map(|pa| suites::pseudoalgebra_suite(&pa))
        .collect();
    Verdict::from_reports(&reports, vec![(missing.is_empty(), format!("missing builtins {missing:?}"))])
}

fn leibniz() -> Verdict {
    let reports: Vec<SuiteReport> = POISSON_BUILTINS
        .iter()
        .map(|n| suites::leibniz_suite(&pseudoalg::builtin(n).expect("builtin"), SEED, 100))
        .collect();
    let chains = reports.iter().all(|r| count(r, "chain identity") == 100);
    Verdict::from_reports(&reports, vec![(chains, "chain identity below 100 instances".into())])
}

fn master(opts: &SelftestOptions) -> Verdict {
    let mut reports = Vec::new();
    let mut extra = Vec::new();
    for name in POISSON_BUILTINS {
        let pa = Arc::new(pseudoalg::builtin(name).expect("builtin"));
        let probe = ProbeSuite::new(pa.module(), opts.probe_degree, SEED);
        let r = suites::master_suite(&pa, &probe);
        let graphs: usize = r.masters.iter().map(|m| m.graphs).sum();
        extra.push((graphs == 19, format!("{name}: {graphs} graphs checked")));
        reports.push(r);
    }
    reports.push(suites::master_controls_suite(opts.probe_degree, SEED));
    Verdict::from_reports(&reports, extra)
}

fn lambda() -> Verdict {
    Verdict::from_reports(&[suites::lambda_suite(SEED, 100)], Vec::new())
}

fn cohomology(opts: &SelftestOptions) -> Verdict {
    let boson = Arc::new(pseudoalg::boson());
    let probe = suites::probe_for(boson.module(), opts);
    let r = suites::cohomology_suite(&boson, SEED, 20, &probe);
    let enough = count(&r, "ad_X squared vanishes") == 20;
    Verdict::from_reports(&[r], vec![(enough, "fewer than 20 cochains".into())])
}

fn determinism() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_pclh"))
            .args(["selftest", "--seed", "42", "--format", "json"])
            .output()
            .expect("spawn pclh")
    };
    let (a, b) = std::thread::scope(|s| {
        let a = s.spawn(run);
        let b = s.spawn(run);
        (a.join().expect("run"), b.join().expect("run"))
    });
    let parsed = serde_json::from_slice::<serde_json::Value>(&a.stdout).is_ok();
    let same = a.stdout == b.stdout;
    let passed = same && parsed && a.status.success() && b.status.success();
    let detail = format!(
        "{} bytes, identical: {same}, valid json: {parsed}, exit codes {:?}/{:?}",
        a.stdout.len(),
        a.status.code(),
        b.status.code()
    );
    Verdict { passed, detail }
}

fn main() -> ExitCode {
    let opts = SelftestOptions { seed: SEED, ..SelftestOptions::default() };
    let criteria: Vec<(&str, Criterion)> = vec![
        ("Hopf algebra identities", Box::new(hopf)),
        ("graph golden examples and counts", Box::new(graph_golden)),
        ("cooperad laws", Box::new(cooperad)),
        ("operad axioms", Box::new(move || operad_axioms(&opts))),
        ("pseudoalgebra axioms", Box::new(pseudoalgebra_axioms)),
        ("Leibniz rules", Box::new(leibniz)),
        ("master element", Box::new(move || master(&opts))),
        ("lambda dictionary", Box::new(lambda)),
        ("cohomology", Box::new(move || cohomology(&opts))),
        ("determinism", Box::new(determinism)),
    ];
    let start = Instant::now();
    let verdicts: Vec<(Verdict, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    (f(), t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (v, secs))) in criteria.iter().zip(&verdicts).enumerate() {
        let status = if v.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!v.passed);
        println!("{status} criterion {:>2}: {name} ({secs:.1}s): {}", i + 1, v.detail);
    }
    println!("{}/{} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
