//! Master elements of Poisson pseudoalgebras and their `X □ X` reports.

use std::sync::Arc;

use serde::Serialize;

use super::{box_product, fmt_witness, output_arity, probe_graphs, sign, EvalFn, OperadElement, ProbeSuite};
use crate::graphs::Graph;
use crate::hmodule::{AlgebraElement, Module, PseudoTensor};
use crate::pseudoalg::{BracketFn, PseudoAlgebra};

/// The odd element `X ∈ P(2)` with
/// `[a∗b] = (−1)^{p(a)} X^{• •}(a ⊗ b)` and `ab = (−1)^{p(a)} X^{•→•}(a ⊗ b)`.
/// On `2 → 1` it is fixed by the second cycle condition. Without a product
/// (free modules) it vanishes on graphs with edges.
pub fn master_from_bracket(module: Arc<Module>, bracket: BracketFn) -> OperadElement {
    let m = Arc::clone(&module);
    let product: ProductFn = Arc::new(move |a, b| m.mul(a, b));
    master_from_parts(module, bracket, product)
}

/// A product `V ⊗ V → V`, e.g. a deliberately broken one for controls.
pub type ProductFn = Arc<dyn Fn(&AlgebraElement, &AlgebraElement) -> AlgebraElement + Send + Sync>;

/// As [`master_from_bracket`] with an explicit product in place of the module's.
pub fn master_from_parts(module: Arc<Module>, bracket: BracketFn, product: ProductFn) -> OperadElement {
    let m = Arc::clone(&module);
    let f: EvalFn = Arc::new(move |g, args| {
        let (a, b) = (&args[0], &args[1]);
        let sa = sign(m.monomial_odd(a));
        let av = AlgebraElement::from_monomial(a.clone());
        let bv = AlgebraElement::from_monomial(b.clone());
        match g.edges() {
            [] => bracket(&av, &bv).scale(&sa),
            [e] if m.has_product() => {
                let v = PseudoTensor::from_vector(&product(&av, &bv).scale(&sa));
                if *e == (1, 2) {
                    v
                } else {
                    v.neg()
                }
            }
            _ => PseudoTensor::zero(output_arity(g)),
        }
    });
    OperadElement::from_fn(module, 2, true, "X", f)
}

pub fn master_from_pseudoalgebra(pa: &Arc<PseudoAlgebra>) -> OperadElement {
    master_from_bracket(Arc::clone(pa.module()), pa.bracket_fn())
}

/// The three graphs on which `X □ X` encodes Jacobi, Leibniz and associativity.
pub fn g_graphs() -> [(&'static str, Graph); 3] {
    [
        ("G1", Graph::edgeless(3)),
        ("G2", Graph::new(3, &[(2, 3)]).expect("valid graph")),
        ("G3", Graph::new(3, &[(1, 2), (2, 3)]).expect("valid graph")),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub graph: String,
    /// `G1`, `G2` or `G3` when the graph is one of those, otherwise empty.
    pub case: String,
    pub tuples: usize,
    pub zero: bool,
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MasterReport {
    pub name: String,
    pub graphs: usize,
    pub zero_graphs: usize,
    pub cases: Vec<CaseReport>,
}

impl MasterReport {
    pub fn passed(&self) -> bool {
        self.zero_graphs == self.graphs
    }

    /// The named cases among `G1`–`G3` with nonzero residual.
    pub fn failing_cases(&self) -> Vec<String> {
        self.cases.iter().filter(|c| !c.zero && !c.case.is_empty()).map(|c| c.case.clone()).collect()
    }
}

/// Evaluate `X □ X` on every acyclic 3-graph and every tuple of the suite.
pub fn check_master(name: &str, x: &OperadElement, suite: &ProbeSuite) -> crate::Result<MasterReport> {
    use rayon::prelude::*;
    let sq = box_product(x, x)?;
    let module = Arc::clone(x.module());
    let named = g_graphs();
    let tuples = suite.tuples(3);
    let cases: Vec<CaseReport> = probe_graphs(3)
        .par_iter()
        .map(|g| {
            let mut residual = None;
            for t in &tuples {
                let v = sq.eval_unchecked(g, t);
                if !v.is_zero() {
                    let w = super::Witness { graph: g.clone(), args: t.clone(), value: v };
                    residual = Some(fmt_witness(&module, &w));
                    break;
                }
            }
            let case = named.iter().find(|(_, h)| h == g).map(|(n, _)| n.to_string()).unwrap_or_default();
            CaseReport { graph: g.to_string(), case, tuples: tuples.len(), zero: residual.is_none(), residual }
        })
        .collect();
    let zero_graphs = cases.iter().filter(|c| c.zero).count();
    Ok(MasterReport { name: name.to_string(), graphs: cases.len(), zero_graphs, cases })
}
