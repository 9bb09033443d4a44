//! Extensional checks of the defining axioms on a probe suite.

use std::collections::BTreeSet;

use super::{for_each_monomial_tuple, OperadElement, ProbeSuite, Witness};
use crate::graphs::Graph;
use crate::hmodule::{AlgebraElement, PseudoTensor};
use crate::hopf::HopfElement;

/// Graphs with at least one oriented cycle of length `≤ bound`, obtained by
/// adding one edge to an acyclic graph.
pub fn cyclic_probe_graphs(suite: &ProbeSuite, n: usize, bound: usize) -> Vec<(Graph, Vec<Vec<usize>>)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for g in suite.graphs(n) {
        for a in 1..=n {
            for b in 1..=n {
                if a == b {
                    continue;
                }
                let mut edges = g.edges().to_vec();
                edges.push((a, b));
                let h = Graph::new(n, &edges).expect("valid labels");
                if !seen.insert(h.clone()) {
                    continue;
                }
                let cycles = h.oriented_cycles(bound);
                if !cycles.is_empty() {
                    out.push((h, cycles));
                }
            }
        }
    }
    out
}

/// `Σ_{e∈C} Y^{Γ∖e} = 0` for every oriented cycle `C` of length `≤ bound`.
pub fn check_cycle_condition(y: &OperadElement, bound: usize, suite: &ProbeSuite) -> Option<Witness> {
    let tuples = suite.tuples(y.arity());
    for (g, cycles) in cyclic_probe_graphs(suite, y.arity(), bound) {
        for c in cycles {
            for t in &tuples {
                let mut acc: Option<PseudoTensor> = None;
                for &e in &c {
                    let v = y.eval_unchecked(&g.remove_edge(e), t);
                    acc = Some(match acc {
                        None => v,
                        Some(a) => a.add(&v),
                    });
                }
                if let Some(v) = acc.filter(|v| !v.is_zero()) {
                    return Some(Witness { graph: g.clone(), args: t.clone(), value: v });
                }
            }
        }
    }
    None
}

/// `Y^Γ(∂ᵢ ·_{Γ_k} v) = (1 ⊗ ⋯ ⊗ ∂ᵢ ⊗ ⋯ ⊗ 1) Y^Γ(v)` for every acyclic `Γ`,
/// component `k` and generator `∂ᵢ`.
pub fn check_linearity(y: &OperadElement, suite: &ProbeSuite) -> Option<Witness> {
    let module = y.module();
    let hopf = module.hopf();
    let tuples = suite.tuples(y.arity());
    for g in suite.graphs(y.arity()) {
        let comps = g.components();
        for (k, comp) in comps.iter().enumerate() {
            for i in 0..hopf.dim() {
                let h = hopf.gen(i);
                for t in &tuples {
                    let lhs = act_on_component(y, &g, comp, &h, t);
                    let rhs = module
                        .act_component(&h, k + 1, &y.eval_unchecked(&g, t))
                        .expect("component in range");
                    let d = lhs.sub(&rhs);
                    if !d.is_zero() {
                        return Some(Witness { graph: g.clone(), args: t.clone(), value: d });
                    }
                }
            }
        }
    }
    None
}

fn act_on_component(
    y: &OperadElement,
    g: &Graph,
    comp: &[usize],
    h: &HopfElement,
    t: &[AlgebraElement],
) -> PseudoTensor {
    let module = y.module();
    let split = module.hopf().iter_coproduct(h, comp.len());
    let mut out = PseudoTensor::zero(super::output_arity(g));
    for (legs, c) in split.terms() {
        let mut args = t.to_vec();
        for (&v, leg) in comp.iter().zip(legs) {
            args[v - 1] = module.act(&HopfElement::mono(leg.clone()), &args[v - 1]);
        }
        for_each_monomial_tuple(&args, |ms, d| {
            out.add_scaled(&y.eval_monomials(g, ms), &(c * d));
        });
    }
    out
}
