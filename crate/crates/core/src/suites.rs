//! Reusable verification suites. Each returns a [`SuiteReport`] whose checks
//! carry an instance count and the first nonzero residual found.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graphs::{clasp_parts, Graph};
use crate::hmodule::{AlgebraElement, Module, Monomial, PseudoTensor};
use crate::hopf::{HTensor, HopfAlgebra, HopfElement, LieAlgebraSpec, MultiIndex};
use crate::operad::{
    ad, bracket, check_cycle_condition, check_linearity, check_master, check_variational_leibniz, compose,
    compose_reversed, find_difference, find_nonzero, fmt_witness, grade_component, master_from_bracket,
    master_from_parts, master_from_pseudoalgebra, phi, star_bracket, star_master, MasterReport, OperadElement,
    ProbeSuite, ProductFn, SamplePool, StarElement,
};
use crate::perm::Perm;
use crate::pseudoalg::{self, fmt_lambda, from_lambda, to_lambda, BracketFn, PseudoAlgebra};
use crate::{q, Q};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Check { name: name.into(), passed: true, instances: 0, residual: None }
    }

    /// Count one instance; `residual` is `Some` when it failed.
    pub fn record(&mut self, residual: Option<String>) {
        self.instances += 1;
        if let Some(r) = residual {
            if self.passed {
                self.residual = Some(r);
            }
            self.passed = false;
        }
    }

    fn expect(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.record(if ok { None } else { Some(detail()) });
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub masters: Vec<MasterReport>,
}

impl SuiteReport {
    fn new(suite: impl Into<String>) -> Self {
        SuiteReport { suite: suite.into(), checks: Vec::new(), masters: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn pseudo_residual(module: &Module, t: &PseudoTensor) -> Option<String> {
    (!t.is_zero()).then(|| module.fmt_pseudo(t))
}

// ---------------------------------------------------------------------------
// Hopf algebra identities

/// A random element of `U(d)` with 1 to 3 PBW terms of degree `≤ max_degree`.
pub fn random_hopf_element(rng: &mut impl Rng, dim: usize, max_degree: u32) -> HopfElement {
    let mut h = HopfElement::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let d = rng.gen_range(0..=max_degree);
        let mut idx = vec![0u32; dim];
        for _ in 0..d {
            idx[rng.gen_range(0..dim)] += 1;
        }
        let c = *[-3i64, -2, -1, 1, 2, 3].choose(rng).unwrap();
        h.add_term(MultiIndex(idx), q(c));
    }
    h
}

/// The test algebras: abelian of dimension 1 to 3 and Heisenberg with `M = 1`.
pub fn hopf_test_algebras() -> Vec<(&'static str, HopfAlgebra)> {
    vec![
        ("abelian N=1", HopfAlgebra::abelian(1)),
        ("abelian N=2", HopfAlgebra::abelian(2)),
        ("abelian N=3", HopfAlgebra::abelian(3)),
        ("heisenberg M=1", HopfAlgebra::new(LieAlgebraSpec::heisenberg(1))),
    ]
}

pub fn hopf_suite(seed: u64, samples: usize, max_degree: u32) -> SuiteReport {
    let mut report = SuiteReport::new("hopf");
    for (label, h) in hopf_test_algebras() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ h.dim() as u64 ^ (h.is_abelian() as u64) << 8);
        let names = [
            "coassociativity",
            "cocommutativity",
            "counit",
            "antipode",
            "antipode with a third leg",
            "antipode on the last legs",
            "coproduct is multiplicative",
            "antipode is antimultiplicative",
        ];
        let mut checks: Vec<Check> = names.iter().map(|n| Check::new(format!("{label}: {n}"))).collect();
        let one = h.one();
        for _ in 0..samples {
            let x = random_hopf_element(&mut rng, h.dim(), max_degree);
            let y = random_hopf_element(&mut rng, h.dim(), max_degree);
            let eps = h.counit(&x);
            let d = h.coproduct(&x);
            let single = HTensor::pure(std::slice::from_ref(&x));

            let l = h.coproduct_on_leg(&d, 0);
            let r = h.coproduct_on_leg(&d, 1);
            checks[0].expect(l == r, || format!("{x}: {l} vs {r}"));
            checks[1].expect(d.swap() == d, || format!("{x}: {d}"));
            let c0 = h.counit_on_leg(&d, 0);
            let c1 = h.counit_on_leg(&d, 1);
            checks[2].expect(c0 == single && c1 == single, || format!("{x}: {c0}, {c1}"));

            let scalar = HTensor::pure(&[one.scale(&eps)]);
            let a = h.contract_legs(&h.antipode_on_leg(&d, 0), 0);
            let b = h.contract_legs(&h.antipode_on_leg(&d, 1), 0);
            checks[3].expect(a == scalar && b == scalar, || format!("{x}: {a}, {b}"));

            let d3 = h.iter_coproduct(&x, 3);
            let one_x = HTensor::pure(&[one.clone(), x.clone()]);
            let x_one = HTensor::pure(&[x.clone(), one.clone()]);
            let t1 = h.contract_legs(&h.antipode_on_leg(&d3, 0), 0);
            let t2 = h.contract_legs(&h.antipode_on_leg(&d3, 1), 0);
            checks[4].expect(t1 == one_x && t2 == one_x, || format!("{x}: {t1}, {t2}"));
            let t3 = h.contract_legs(&h.antipode_on_leg(&d3, 1), 1);
            let t4 = h.contract_legs(&h.antipode_on_leg(&d3, 2), 1);
            checks[5].expect(t3 == x_one && t4 == x_one, || format!("{x}: {t3}, {t4}"));

            let xy = h.mul(&x, &y);
            let lhs = h.coproduct(&xy);
            let rhs = h.htensor_multiply(&d, &h.coproduct(&y)).expect("equal arities");
            checks[6].expect(lhs == rhs, || format!("{x} · {y}: {lhs} vs {rhs}"));
            let s1 = h.antipode(&xy);
            let s2 = h.mul(&h.antipode(&y), &h.antipode(&x));
            checks[7].expect(s1 == s2, || format!("{x} · {y}: {s1} vs {s2}"));
        }
        report.checks.extend(checks);
    }
    report
}

// ---------------------------------------------------------------------------
// Graph golden examples

fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::new(n, edges).expect("valid golden graph")
}

/// The stored golden examples; each check compares a computed listing
/// against the expected text.
pub fn graph_golden_suite() -> SuiteReport {
    let mut report = SuiteReport::new("graphs-golden");
    let mut golden = |name: &str, got: String, want: &str| {
        let mut c = Check::new(name);
        c.expect(got == want, || format!("got `{got}`, expected `{want}`"));
        report.checks.push(c);
    };

    let ten = graph(10, &[(1, 4), (2, 3), (4, 5), (5, 8), (6, 10), (8, 9)]);
    let parts = [2, 4, 1, 3];
    let (d0, dk) = ten.cocompose(&parts).expect("partition of 10");
    let listing: Vec<String> = std::iter::once(&d0).chain(dk.iter()).map(|g| format!("[{g}]")).collect();
    golden(
        "cocomposition (2,4,1,3) of the 10-graph",
        listing.join(" "),
        "[4; 1->2, 1->2, 2->4, 2->4] [2;] [4; 2->3] [1;] [3; 1->2]",
    );

    let sets: Vec<String> = (1..=10)
        .map(|k| {
            let e = ten.externally_connected(&parts, k).expect("vertex in range");
            let items: Vec<String> = e.iter().map(usize::to_string).collect();
            format!("{k}:{{{}}}", items.join(","))
        })
        .collect();
    golden(
        "external connectedness in the 10-graph",
        sets.join(" "),
        "1:{1,2,4} 2:{1,2,4} 3:{1,2,4} 4:{1,2,4} 5:{1,2,4} 6:{1,2,4} 7:{} 8:{1,2,4} 9:{} 10:{1,2,4}",
    );

    let five = graph(5, &[(1, 2), (1, 3), (4, 1), (5, 4)]);
    let sigma = Perm::from_cycles(5, &[&[1, 2], &[3, 5, 4]]).expect("valid cycles");
    golden(
        "relabeling by (12)(354)",
        five.permute(&sigma).expect("same size").to_string(),
        "5; 2->1, 2->5, 3->2, 4->3",
    );

    let g = graph(5, &[(1, 3), (2, 4)]);
    let sigma = Perm::from_cycles(5, &[&[1, 4, 5], &[2, 3]]).expect("valid cycles");
    let moved = g.permute(&sigma).expect("same size");
    golden(
        "component permutation for (145)(23)",
        format!("{:?} {}", moved.components(), g.tilde_sigma(&sigma).expect("same size")),
        "[[1], [2, 4], [3, 5]] (132)",
    );

    let seven = graph(7, &[(1, 5), (3, 4), (6, 7)]);
    let (g0, gk) = seven.cocompose(&clasp_parts(5, 4, 3)).expect("partition of 7");
    let rho = seven.rho(4, 3).expect("acyclic clasp");
    golden(
        "rho_4 on the 7-graph",
        format!("[{g0}] [{}] {:?}", gk[3], rho.images()),
        "[5; 1->4, 3->4, 4->5] [3;] [3, 1, 4, 2]",
    );

    report
}

/// Sizes of `G₀(n)` for `n ≤ 3`.
pub fn graph_count_suite() -> SuiteReport {
    let mut report = SuiteReport::new("graphs-count");
    for (n, want) in [(1, 1), (2, 3), (3, 19)] {
        let got = Graph::enumerate_acyclic(n, 6).expect("within bound").len();
        let mut c = Check::new(format!("acyclic {n}-graphs"));
        c.expect(got == want, || format!("got {got}, expected {want}"));
        report.checks.push(c);
    }
    report
}

// ---------------------------------------------------------------------------
// Cooperad laws on random graphs

/// A random acyclic graph on `n` vertices: a random forest with random
/// orientations and labels.
pub fn random_acyclic(rng: &mut impl Rng, n: usize) -> Graph {
    let mut edges = Vec::new();
    for v in 2..=n {
        if rng.gen_bool(0.7) {
            let u = rng.gen_range(1..v);
            edges.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
        }
    }
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let sigma = Perm::from_images(&labels.iter().map(|i| i + 1).collect::<Vec<_>>()).expect("a permutation");
    Graph::new(n, &edges).expect("valid forest").permute(&sigma).expect("same size")
}

/// A random composition of `n` into positive parts.
pub fn random_composition(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut parts = vec![1usize];
    for _ in 1..n {
        if rng.gen_bool(0.5) {
            parts.push(1);
        } else {
            *parts.last_mut().unwrap() += 1;
        }
    }
    parts
}

fn random_perm(rng: &mut impl Rng, n: usize) -> Perm {
    let mut images: Vec<usize> = (1..=n).collect();
    images.shuffle(rng);
    Perm::from_images(&images).expect("a permutation")
}

pub fn cooperad_suite(seed: u64, instances: usize, max_vertices: usize) -> SuiteReport {
    let mut report = SuiteReport::new("cooperad");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outer = Check::new("coassociativity: outer graphs");
    let mut middle = Check::new("coassociativity: middle graphs");
    let mut inner = Check::new("coassociativity: inner graphs");
    let mut coeq = Check::new("coequivariance");
    let mut edges = Check::new("edge bijection");
    let mut comps = Check::new("component count s+t-1");
    for _ in 0..instances {
        let total = rng.gen_range(1..=max_vertices);
        let g = random_acyclic(&mut rng, total);
        let l = random_composition(&mut rng, total);
        let m = random_composition(&mut rng, l.len());
        let n = m.len();
        // M_i and K_j
        let mut big_m = vec![0usize];
        for &x in &m {
            big_m.push(big_m.last().unwrap() + x);
        }
        let k: Vec<usize> = (0..n).map(|j| l[big_m[j]..big_m[j + 1]].iter().sum()).collect();
        let (l0, lk) = g.cocompose(&l).expect("partition of the graph");
        let (m0, mk) = l0.cocompose(&m).expect("partition of the outer graph");
        let (k0, kk) = g.cocompose(&k).expect("partition of the graph");
        outer.expect(m0 == k0, || format!("{g} l={l:?} m={m:?}: {m0} vs {k0}"));
        for i in 0..n {
            let sub = &l[big_m[i]..big_m[i + 1]];
            let (a0, ak) = kk[i].cocompose(sub).expect("partition of a group");
            middle.expect(mk[i] == a0, || format!("{g} l={l:?} m={m:?} i={}: {} vs {a0}", i + 1, mk[i]));
            for j in 0..sub.len() {
                let left = &lk[big_m[i] + j];
                inner.expect(*left == ak[j], || format!("{g} l={l:?} m={m:?} i={} j={}", i + 1, j + 1));
            }
        }

        // coequivariance for the partition l with random σ and τᵢ
        let sigma = random_perm(&mut rng, l.len());
        let taus: Vec<Perm> = l.iter().map(|&x| random_perm(&mut rng, x)).collect();
        let block = Perm::block_compose(&sigma, &taus);
        let inv = sigma.inverse();
        let moved_parts: Vec<usize> = (1..=l.len()).map(|i| l[inv.apply(i) - 1]).collect();
        let moved = g.permute(&block).expect("same size");
        let (c0, ck) = moved.cocompose(&moved_parts).expect("permuted partition");
        let mut ok = c0 == l0.permute(&sigma).expect("same size");
        for i in 1..=l.len() {
            let src = inv.apply(i);
            ok &= ck[i - 1] == lk[src - 1].permute(&taus[src - 1]).expect("same size");
        }
        coeq.expect(ok, || format!("{g} l={l:?} σ={sigma}"));

        let count = l0.edges().len() + lk.iter().map(|x| x.edges().len()).sum::<usize>();
        edges.expect(count == g.edges().len(), || format!("{g} l={l:?}: {count}"));

        // component count for a single clasp (1,…,m,…,1)
        let mm = rng.gen_range(1..=total);
        let nn = total + 1 - mm;
        let kpos = rng.gen_range(1..=nn);
        let (d0, dk) = g.cocompose(&clasp_parts(nn, kpos, mm)).expect("clasp partition");
        if d0.is_acyclic() {
            let (s, t) = (dk[kpos - 1].component_count(), d0.component_count());
            comps.expect(g.component_count() == s + t - 1, || format!("{g} k={kpos} m={mm}"));
        }
    }
    report.checks = vec![outer, middle, inner, coeq, edges, comps];
    report
}

// ---------------------------------------------------------------------------
// Operad axioms

fn diff(a: &OperadElement, b: &OperadElement, probe: &ProbeSuite) -> Option<String> {
    match find_difference(a, b, probe) {
        Ok(None) => None,
        Ok(Some(w)) => Some(fmt_witness(a.module(), &w)),
        Err(e) => Some(e.to_string()),
    }
}

fn nonzero(a: &OperadElement, probe: &ProbeSuite) -> Option<String> {
    find_nonzero(a, probe).map(|w| fmt_witness(a.module(), &w))
}

/// Associativity, equivariance, unit laws and the axioms of the outputs on
/// `rounds` random triples from the sample pool of `pa`.
pub fn operad_suite(pa: &Arc<PseudoAlgebra>, seed: u64, rounds: usize, probe: &ProbeSuite, cycle_bound: usize) -> SuiteReport {
    let mut report = SuiteReport::new(format!("operad axioms ({})", pa.name()));
    let pool = SamplePool::new(pa);
    let module = Arc::clone(pa.module());
    let unit = OperadElement::unit(Arc::clone(&module));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nested = Check::new("associativity: nested insertion");
    let mut before = Check::new("associativity: parallel insertion before");
    let mut after = Check::new("associativity: parallel insertion after");
    let mut equiv = Check::new("equivariance");
    let mut units = Check::new("unit laws");
    let mut cycle = Check::new("cycle condition of compositions");
    let mut linear = Check::new("componentwise linearity of compositions");
    let mut order = Check::new("order independence of the twisted action");
    let mut grades = Check::new("grade additivity");
    let mut nonzero_lhs = 0usize;
    for _ in 0..rounds {
        let l = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(0..=2);
        let (Some(z), Some(y), Some(x)) = (pool.random(&mut rng, l), pool.random(&mut rng, n), pool.random(&mut rng, m))
        else {
            continue;
        };
        let i = rng.gen_range(1..=l);
        let j = rng.gen_range(1..=l + n - 1);
        let zy = compose(&z, i, &y).expect("slot in range");
        let lhs = compose(&zy, j, &x).expect("slot in range");
        if find_nonzero(&lhs, probe).is_some() {
            nonzero_lhs += 1;
        }
        let sgn = if y.is_odd() && x.is_odd() { q(-1) } else { q(1) };
        if j < i {
            let rhs = compose(&compose(&z, j, &x).unwrap(), i + m - 1, &y).unwrap().scale(&sgn);
            before.record(diff(&lhs, &rhs, probe));
        } else if j < i + n {
            let rhs = compose(&z, i, &compose(&y, j - i + 1, &x).unwrap()).unwrap();
            nested.record(diff(&lhs, &rhs, probe));
        } else {
            let rhs = compose(&compose(&z, j - n + 1, &x).unwrap(), i, &y).unwrap().scale(&sgn);
            after.record(diff(&lhs, &rhs, probe));
        }

        let sigma = random_perm(&mut rng, l);
        let tau = random_perm(&mut rng, m);
        let i2 = rng.gen_range(1..=l);
        let lhs = compose(&z.permute(&sigma).unwrap(), i2, &x.permute(&tau).unwrap()).unwrap();
        let rhs = compose(&z, sigma.apply(i2), &x).unwrap().permute(&Perm::circle(&sigma, i2, &tau)).unwrap();
        equiv.record(diff(&lhs, &rhs, probe));

        let left = compose(&unit, 1, &y).unwrap();
        let right = compose(&y, rng.gen_range(1..=n), &unit).unwrap();
        units.record(diff(&left, &y, probe).or_else(|| diff(&right, &y, probe)));

        cycle.record(check_cycle_condition(&zy, cycle_bound, probe).map(|w| fmt_witness(&module, &w)));
        linear.record(check_linearity(&zy, probe).map(|w| fmt_witness(&module, &w)));
        order.record(diff(&zy, &compose_reversed(&z, i, &y).unwrap(), probe));

        let r = rng.gen_range(0..l);
        let s = rng.gen_range(0..n);
        let part = compose(&grade_component(&z, r), i, &grade_component(&y, s)).unwrap();
        let off = part.restrict("off-degree", move |g| g.edges().len() != r + s);
        grades.record(nonzero(&off, probe));
    }
    let mut lhs = Check::new("nonzero left-hand sides");
    lhs.instances = nonzero_lhs;
    lhs.passed = nonzero_lhs > 0;
    report.checks = vec![nested, before, after, equiv, units, cycle, linear, order, grades, lhs];
    report
}

// ---------------------------------------------------------------------------
// Pseudoalgebra axioms

pub fn pseudoalgebra_suite(pa: &PseudoAlgebra) -> SuiteReport {
    let module = pa.module();
    let gens: Vec<AlgebraElement> = (0..module.generator_count()).map(|g| module.gen_element(g)).collect();
    let mut skew = Check::new("skewsymmetry");
    let mut jacobi = Check::new("jacobi");
    for a in &gens {
        for b in &gens {
            skew.record(pseudo_residual(module, &pa.skew_residual(a, b)));
            for c in &gens {
                jacobi.record(pseudo_residual(module, &pa.jacobi_residual(a, b, c)));
            }
        }
    }
    SuiteReport { suite: format!("pseudoalgebra ({})", pa.name()), checks: vec![skew, jacobi], masters: Vec::new() }
}

/// Left and right Leibniz rules on all probe monomials of degree `≤ 2`, the
/// λ-form of the left rule when `H` is abelian, and the chain identity on
/// `chain_samples` random triples.
pub fn leibniz_suite(pa: &PseudoAlgebra, seed: u64, chain_samples: usize) -> SuiteReport {
    let module = pa.module();
    let mut report = SuiteReport::new(format!("leibniz ({})", pa.name()));
    if !module.has_product() {
        return report;
    }
    let vs = module.probe_vectors(2);
    let mut left = Check::new("left leibniz");
    let mut right = Check::new("right leibniz");
    let mut lam = Check::new("lambda leibniz");
    let abelian = pa.hopf().is_abelian();
    for a in &vs {
        for b in &vs {
            for c in &vs {
                let r = pa.left_leibniz_residual(a, b, c).map_err(|e| e.to_string());
                left.record(match r {
                    Ok(t) => pseudo_residual(module, &t),
                    Err(e) => Some(e),
                });
                let r = pa.right_leibniz_residual(a, b, c).map_err(|e| e.to_string());
                right.record(match r {
                    Ok(t) => pseudo_residual(module, &t),
                    Err(e) => Some(e),
                });
                if abelian {
                    lam.record(lambda_leibniz_residual(pa, a, b, c));
                }
            }
        }
    }
    let mut chain = Check::new("chain identity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..chain_samples {
        let mut pick = || {
            let a = vs.choose(&mut rng).unwrap();
            let b = vs.choose(&mut rng).unwrap();
            let c = q(rng.gen_range(1..=3));
            a.add(&b.scale(&c))
        };
        let (a, b, c) = (pick(), pick(), pick());
        chain.record(match pa.chain_identity(&a, &b, &c) {
            Ok([x, y, z]) if x == y && y == z => None,
            Ok([x, y, z]) => Some(format!("{} | {} | {}", module.fmt_pseudo(&x), module.fmt_pseudo(&y), module.fmt_pseudo(&z))),
            Err(e) => Some(e.to_string()),
        });
    }
    report.checks = vec![left, right];
    if abelian {
        report.checks.push(lam);
    }
    report.checks.push(chain);
    report
}

/// `[a_λ bc] − [a_λ b]c − (−1)^{p(b)p(c)}[a_λ c]b` with each term converted
/// to a λ-polynomial separately.
fn lambda_leibniz_residual(pa: &PseudoAlgebra, a: &AlgebraElement, b: &AlgebraElement, c: &AlgebraElement) -> Option<String> {
    let m = pa.module();
    let run = || -> crate::Result<Option<String>> {
        let (pb, pc) = (m.parity(b).unwrap_or(false), m.parity(c).unwrap_or(false));
        let whole = to_lambda(m, &pa.bracket(a, &m.multiply(b, c)?))?;
        let first = to_lambda(m, &m.mul_right(&pa.bracket(a, b), c)?)?;
        let second = to_lambda(m, &m.mul_right(&pa.bracket(a, c), b)?)?;
        let sign = if pb && pc { q(-1) } else { q(1) };
        let rhs = from_lambda(m, &first)?.add(&from_lambda(m, &second)?.scale(&sign));
        let res = from_lambda(m, &whole)?.sub(&rhs);
        Ok((!res.is_zero()).then(|| fmt_lambda(m, &to_lambda(m, &res).unwrap_or_default())))
    };
    run().unwrap_or_else(|e| Some(e.to_string()))
}

// ---------------------------------------------------------------------------
// Master elements

/// `[a * b]` with every term involving a product dropped; H-bilinear and
/// skew, but incompatible with the Leibniz rule.
pub fn truncated_bracket(pa: &Arc<PseudoAlgebra>) -> BracketFn {
    let me = Arc::clone(pa);
    Arc::new(move |a: &AlgebraElement, b: &AlgebraElement| {
        let keep = |v: &AlgebraElement| AlgebraElement::from_terms(v.terms().iter().filter(|(m, _)| m.len() == 1).map(|(m, c)| (m.clone(), c.clone())));
        me.bracket(&keep(a), &keep(b))
    })
}

/// `ab` scaled by 2 when both factors are quadratic; commutative but not
/// associative.
pub fn skewed_product(module: &Arc<Module>) -> ProductFn {
    let m = Arc::clone(module);
    Arc::new(move |a: &AlgebraElement, b: &AlgebraElement| {
        let mut out = AlgebraElement::zero();
        for (x, cx) in a.terms() {
            for (y, cy) in b.terms() {
                let w = if x.len() == 2 && y.len() == 2 { q(2) } else { q(1) };
                let p = m.mul(&AlgebraElement::from_monomial(x.clone()), &AlgebraElement::from_monomial(y.clone()));
                out = out.add(&p.scale(&(cx * cy * w)));
            }
        }
        out
    })
}

/// Affine algebra of a 3-dimensional `g` whose bracket violates Jacobi:
/// `[e1,e2] = e3`, `[e3,e1] = e1`.
pub fn jacobi_broken() -> PseudoAlgebra {
    let mut s = vec![vec![Vec::new(); 3]; 3];
    s[0][1] = vec![(2, q(1))];
    s[1][0] = vec![(2, q(-1))];
    s[2][0] = vec![(0, q(1))];
    s[0][2] = vec![(0, q(-1))];
    let zero = vec![vec![Q::from_integer(0.into()); 3]; 3];
    pseudoalg::affine(&["e1", "e2", "e3"], &s, &zero)
}

pub fn master_suite(pa: &Arc<PseudoAlgebra>, probe: &ProbeSuite) -> SuiteReport {
    let mut report = SuiteReport::new(format!("master ({})", pa.name()));
    let x = master_from_pseudoalgebra(pa);
    let mut c = Check::new("X □ X vanishes on all acyclic 3-graphs");
    match check_master(pa.name(), &x, probe) {
        Ok(r) => {
            c.instances = r.graphs;
            c.passed = r.passed();
            c.residual = r.cases.iter().find_map(|k| k.residual.as_ref().map(|s| format!("{}: {s}", k.graph)));
            report.masters.push(r);
        }
        Err(e) => c.record(Some(e.to_string())),
    }
    report.checks.push(c);
    report
}

/// The three negative controls. Each must fail on the named graph.
pub fn master_controls_suite(probe_degree: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("master negative controls");
    let boson = Arc::new(pseudoalg::boson());
    let broken = Arc::new(jacobi_broken());
    let cases: Vec<(&str, &str, OperadElement, Arc<Module>)> = vec![
        ("jacobi-broken bracket fails on G1", "G1", master_from_pseudoalgebra(&broken), Arc::clone(broken.module())),
        (
            "leibniz-broken bracket fails on G2",
            "G2",
            master_from_bracket(Arc::clone(boson.module()), truncated_bracket(&boson)),
            Arc::clone(boson.module()),
        ),
        (
            "non-associative product fails on G3",
            "G3",
            master_from_parts(Arc::clone(boson.module()), boson.bracket_fn(), skewed_product(boson.module())),
            Arc::clone(boson.module()),
        ),
    ];
    for (name, case, x, module) in cases {
        let probe = ProbeSuite::new(&module, probe_degree, seed);
        let mut c = Check::new(name);
        match check_master(name, &x, &probe) {
            Ok(r) => {
                let failing = r.failing_cases();
                c.expect(failing.iter().any(|f| f == case), || format!("failing cases {failing:?}"));
                c.residual = Some(format!("failing cases {failing:?}"));
                report.masters.push(r);
            }
            Err(e) => c.record(Some(e.to_string())),
        }
        report.checks.push(c);
    }
    report
}

// ---------------------------------------------------------------------------
// λ-brackets

pub fn lambda_suite(seed: u64, samples: usize) -> SuiteReport {
    let mut report = SuiteReport::new("lambda");
    let boson = pseudoalg::boson();
    let m = boson.module();
    let u = m.gen_element(0);
    let mut c = Check::new("boson bracket is -λ");
    let got = to_lambda(m, &boson.bracket(&u, &u)).map(|l| fmt_lambda(m, &l));
    c.expect(got.as_deref() == Ok("-λ"), || format!("{got:?}"));
    report.checks.push(c);

    let mut rt = Check::new("round trip");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vs = m.probe_vectors(2);
    for _ in 0..samples {
        let t = random_bracket(&mut rng, m, &vs, 3);
        let back = to_lambda(m, &t).and_then(|l| from_lambda(m, &l));
        rt.expect(back.as_ref() == Ok(&t), || format!("{} -> {back:?}", m.fmt_pseudo(&t)));
    }
    report.checks.push(rt);

    let mut non = Check::new("non-abelian H is rejected");
    let k = pseudoalg::type_k(q(1));
    let e = k.module().gen_element(0);
    non.expect(to_lambda(k.module(), &k.bracket(&e, &e)).is_err(), || "accepted".into());
    report.checks.push(non);
    report
}

/// A random element of `(H ⊗ H) ⊗_H V` with up to three terms of total
/// `H`-degree `≤ max_degree`.
pub fn random_bracket(rng: &mut impl Rng, module: &Module, vs: &[AlgebraElement], max_degree: u32) -> PseudoTensor {
    let hopf = module.hopf();
    let mut out = PseudoTensor::zero(2);
    for _ in 0..rng.gen_range(1..=3) {
        let f = random_hopf_element(rng, hopf.dim(), max_degree);
        let g = HopfElement::mono(MultiIndex(vec![rng.gen_range(0..=max_degree); hopf.dim()]));
        let v = vs.choose(rng).unwrap();
        out.add_assign(&module.normalize(&HTensor::pure(&[f, g]), v));
    }
    out
}

// ---------------------------------------------------------------------------
// Cohomology

fn generator_tuples(module: &Module, n: usize) -> Vec<Vec<Monomial>> {
    let dim = module.dim();
    let gens: Vec<Monomial> = (0..module.generator_count()).map(|g| Monomial::atom(g, MultiIndex::zero(dim))).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Monomial>| {
                gens.iter().map(move |g| {
                    let mut p = p.clone();
                    p.push(g.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Generators and one first derivative: the factors `b` of the variational
/// Leibniz check.
pub fn leibniz_factors(module: &Module) -> Vec<Monomial> {
    let dim = module.dim();
    let mut out: Vec<Monomial> = (0..module.generator_count()).map(|g| Monomial::atom(g, MultiIndex::zero(dim))).collect();
    out.push(Monomial::atom(0, MultiIndex::unit(dim, 0)));
    out
}

pub fn variational_leibniz(f: &StarElement) -> crate::Result<bool> {
    let module = f.module();
    let tuples = generator_tuples(module, f.arity());
    Ok(check_variational_leibniz(f, &tuples, &leibniz_factors(module))?.is_none())
}

/// A random cochain of degree −1 (a class) or 0 (an arity-1 element).
pub fn random_cochain(rng: &mut impl Rng, module: &Arc<Module>, pool: &SamplePool, degree: i32) -> OperadElement {
    if degree < 0 {
        let vs = module.probe_vectors(2);
        loop {
            let a = vs.choose(rng).unwrap();
            let b = vs.choose(rng).unwrap();
            let v = a.add(&b.scale(&q(rng.gen_range(1..=3))));
            if module.parity(&v).is_some() && !v.is_zero() {
                if let Ok(c) = OperadElement::class(Arc::clone(module), &v) {
                    return c;
                }
            }
        }
    }
    pool.random(rng, 1).expect("arity 1 is always populated")
}

pub fn cohomology_suite(pa: &Arc<PseudoAlgebra>, seed: u64, cochains: usize, probe: &ProbeSuite) -> SuiteReport {
    let mut report = SuiteReport::new(format!("cohomology ({})", pa.name()));
    let module = Arc::clone(pa.module());
    let x = master_from_pseudoalgebra(pa);
    let x0 = grade_component(&x, 0);
    let x1 = grade_component(&x, 1);
    let pool = SamplePool::new(pa);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut sq = Check::new("ad_X squared vanishes");
    for i in 0..cochains {
        let f = random_cochain(&mut rng, &module, &pool, if i % 2 == 0 { -1 } else { 0 });
        let dd = ad(&x, &f).and_then(|d| ad(&x, &d));
        sq.record(match dd {
            Ok(dd) => nonzero(&dd, probe).map(|w| format!("{}: {w}", f.label())),
            Err(e) => Some(e.to_string()),
        });
    }
    report.checks.push(sq);

    let mut dec = Check::new("X = X0 + X1");
    dec.record(diff(&x, &x0.add(&x1).expect("same arity"), probe));
    report.checks.push(dec);
    for (name, a, b) in [("[X0,X0] = 0", &x0, &x0), ("[X1,X1] = 0", &x1, &x1), ("[X0,X1] = 0", &x0, &x1)] {
        let mut c = Check::new(name);
        c.record(bracket(a, b).map_err(|e| e.to_string()).map(|y| nonzero(&y, probe)).unwrap_or_else(Some));
        report.checks.push(c);
    }

    let xs = star_master(Arc::clone(&module), pa.bracket_fn());
    let mut c = Check::new("[X*,X*] = 0");
    c.record(match star_bracket(&xs, &xs) {
        Ok(b) => generator_tuples(&module, 3).iter().find_map(|t| pseudo_residual(&module, &b.eval_monomials(t))),
        Err(e) => Some(e.to_string()),
    });
    report.checks.push(c);

    let mut c = Check::new("phi(X*) = X0");
    c.record(diff(&phi(&xs), &x0, probe));
    report.checks.push(c);

    // star cochains: a class, derivations, a non-derivation when there is a product
    let dim = module.dim();
    let mut derivations: Vec<OperadElement> = vec![OperadElement::euler(Arc::clone(&module))];
    let images: Vec<AlgebraElement> =
        (0..module.generator_count()).map(|g| AlgebraElement::atom(g, MultiIndex::unit(dim, 0))).collect();
    derivations.push(OperadElement::derivation(Arc::clone(&module), false, images).expect("valid images"));
    let vs = module.probe_vectors(2);
    for _ in 0..3 {
        let images: Vec<AlgebraElement> = (0..module.generator_count())
            .map(|g| {
                let want = module.gen_odd(g);
                let same: Vec<&AlgebraElement> = vs.iter().filter(|v| module.parity(v) == Some(want)).collect();
                same.choose(&mut rng).map(|v| v.scale(&q(rng.gen_range(1..=3)))).unwrap_or_default()
            })
            .collect();
        derivations.push(OperadElement::derivation(Arc::clone(&module), false, images).expect("valid images"));
    }
    let class = OperadElement::class(Arc::clone(&module), &module.gen_element(0)).expect("generator is homogeneous");

    let mut accepts = Check::new("variational leibniz accepts X*, classes and derivations");
    let mut probes: Vec<StarElement> = vec![xs.clone(), StarElement::from_operad(&class)];
    probes.extend(derivations.iter().map(StarElement::from_operad));
    for f in &probes {
        accepts.record(match variational_leibniz(f) {
            Ok(true) => None,
            Ok(false) => Some(format!("rejected {}", f.label())),
            Err(e) => Some(e.to_string()),
        });
    }
    report.checks.push(accepts);
    if module.has_product() {
        let mut rejects = Check::new("variational leibniz rejects a non-derivation");
        let proj = StarElement::from_operad(&OperadElement::degree_projection(Arc::clone(&module), 1));
        rejects.record(match variational_leibniz(&proj) {
            Ok(false) => None,
            Ok(true) => Some("accepted the degree-1 projection".into()),
            Err(e) => Some(e.to_string()),
        });
        report.checks.push(rejects);
        probes.push(proj);
    }

    let mut compat = Check::new("phi intertwines ad_X* and ad_X0");
    let mut decide = Check::new("ad_X1 phi(f) = 0 iff variational leibniz");
    for f in &probes {
        compat.record(match star_bracket(&xs, f) {
            Ok(b) => diff(&phi(&b), &ad(&x0, &phi(f)).expect("invariant input"), probe),
            Err(e) => Some(e.to_string()),
        });
        let closed = find_nonzero(&ad(&x1, &phi(f)).expect("invariant input"), probe).is_none();
        let leib = variational_leibniz(f).unwrap_or(false);
        decide.expect(closed == leib, || format!("{}: ad_X1 zero {closed}, leibniz {leib}", f.label()));
    }
    report.checks.push(compat);
    report.checks.push(decide);
    report
}

// ---------------------------------------------------------------------------
// Everything

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

#[derive(Clone, Copy, Debug)]
pub struct SelftestOptions {
    pub seed: u64,
    pub probe_degree: usize,
    pub cycle_bound: usize,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions { seed: 42, probe_degree: 2, cycle_bound: 3 }
    }
}

pub const POISSON_BUILTINS: &[&str] = &["boson", "fermion", "affine"];

pub fn probe_for(module: &Module, opts: &SelftestOptions) -> ProbeSuite {
    let mut p = ProbeSuite::new(module, opts.probe_degree, opts.seed);
    p.max_tuples = 16;
    p.max_graphs = 16;
    p
}

pub fn selftest(opts: &SelftestOptions) -> SelftestReport {
    let seed = opts.seed;
    let mut suites = vec![hopf_suite(seed, 200, 4), graph_golden_suite(), graph_count_suite(), cooperad_suite(seed, 500, 8)];
    for name in ["boson", "w_d1"] {
        let pa = Arc::new(pseudoalg::builtin(name).expect("builtin"));
        let probe = probe_for(pa.module(), opts);
        suites.push(operad_suite(&pa, seed, 40, &probe, opts.cycle_bound));
    }
    let mut seen = BTreeSet::new();
    for name in pseudoalg::BUILTIN_NAMES {
        let pa = pseudoalg::builtin(name).expect("builtin");
        if seen.insert(name) {
            suites.push(pseudoalgebra_suite(&pa));
        }
    }
    for name in POISSON_BUILTINS {
        let pa = pseudoalg::builtin(name).expect("builtin");
        suites.push(leibniz_suite(&pa, seed, 100));
    }
    for name in POISSON_BUILTINS {
        let pa = Arc::new(pseudoalg::builtin(name).expect("builtin"));
        let probe = ProbeSuite::new(pa.module(), opts.probe_degree, seed);
        suites.push(master_suite(&pa, &probe));
    }
    suites.push(master_controls_suite(opts.probe_degree, seed));
    suites.push(lambda_suite(seed, 100));
    let boson = Arc::new(pseudoalg::boson());
    let probe = probe_for(boson.module(), opts);
    suites.push(cohomology_suite(&boson, seed, 20, &probe));
    let passed = suites.iter().all(SuiteReport::passed);
    SelftestReport { seed, passed, suites }
}
