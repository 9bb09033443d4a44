//! The universal Lie superalgebra: □-product, bracket, and the edge grading.

use std::sync::Arc;

use super::{compose, find_difference, fmt_witness, output_arity, EvalFn, OperadElement, ProbeSuite};
use crate::error::{Error, Result};
use crate::hmodule::PseudoTensor;
use crate::perm::Perm;
use crate::Q;

/// Sum of several elements of equal arity and parity.
pub(crate) fn sum(module: &Arc<crate::hmodule::Module>, arity: usize, odd: bool, label: &str, parts: Vec<(OperadElement, Q)>) -> OperadElement {
    let f: EvalFn = Arc::new(move |g, args| {
        let mut out = PseudoTensor::zero(output_arity(g));
        for (p, c) in &parts {
            out.add_scaled(&p.eval_monomials(g, args), c);
        }
        out
    });
    OperadElement::from_fn(Arc::clone(module), arity, odd, label, f)
}

/// `f □ g = Σ_{σ ∈ S_{m+1,n}} (f ∘₁ g)^{σ⁻¹}` for `f ∈ W_n`, `g ∈ W_m`.
pub fn box_product(f: &OperadElement, g: &OperadElement) -> Result<OperadElement> {
    let module = f.module();
    let odd = f.is_odd() ^ g.is_odd();
    let label = format!("({} □ {})", f.label(), g.label());
    if f.arity() == 0 {
        // W₋₁ □ anything vanishes; the degree is n + m
        let arity = g.arity().saturating_sub(1);
        return Ok(OperadElement::zero(Arc::clone(module), arity, odd).with_label(&label));
    }
    let n = f.arity() - 1;
    let m1 = g.arity();
    let c = compose(f, 1, g)?;
    let parts = Perm::shuffles(m1, n)
        .into_iter()
        .map(|s| Ok((c.permute(&s.inverse())?, Q::from_integer(1.into()))))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum(module, c.arity(), odd, &label, parts))
}

/// `[f, g] = f □ g − (−1)^{p̄(f)p̄(g)} g □ f`.
pub fn bracket(f: &OperadElement, g: &OperadElement) -> Result<OperadElement> {
    let a = box_product(f, g)?;
    let b = box_product(g, f)?;
    let c = if f.is_odd() && g.is_odd() { Q::from_integer(1.into()) } else { Q::from_integer((-1).into()) };
    if a.arity() != b.arity() {
        return Err(Error::ArityMismatch { expected: a.arity(), found: b.arity() });
    }
    let label = format!("[{}, {}]", f.label(), g.label());
    Ok(sum(f.module(), a.arity(), a.is_odd(), &label, vec![(a, Q::from_integer(1.into())), (b, c)]))
}

/// `ad_X f = [X, f]`.
pub fn ad(x: &OperadElement, f: &OperadElement) -> Result<OperadElement> {
    bracket(x, f)
}

/// Check `Y^τ = Y` for the adjacent transpositions generating `S_n`.
pub fn check_invariance(y: &OperadElement, suite: &ProbeSuite) -> Result<()> {
    for t in Perm::adjacent_transpositions(y.arity()) {
        if let Some(w) = find_difference(&y.permute(&t)?, y, suite)? {
            return Err(Error::InvarianceViolation(format!(
                "{} is not fixed by {}: {}",
                y.label(),
                t,
                fmt_witness(y.module(), &w)
            )));
        }
    }
    Ok(())
}

/// The part of `Y` supported on graphs with exactly `r` edges.
pub fn grade_component(y: &OperadElement, r: usize) -> OperadElement {
    y.restrict(&format!("{}_{}", y.label(), r), move |g| g.edges().len() == r)
}

/// `Y = Y₀ + Y₁ + ⋯`, one part per possible edge count of an acyclic graph.
pub fn grade_decompose(y: &OperadElement) -> Vec<OperadElement> {
    let top = y.arity().saturating_sub(1);
    (0..=top).map(|r| grade_component(y, r)).collect()
}
