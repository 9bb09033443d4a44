//! The `∘ₖ`-products of the operad.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{output_arity, pbar, sign, EvalFn, OperadElement};
use crate::error::{Error, Result};
use crate::graphs::{clasp_parts, Graph};
use crate::hmodule::{AlgebraElement, Module, Monomial, PseudoTensor};
use crate::hopf::{HTensor, HopfElement, MultiIndex};
use crate::Q;

/// `Y ∘ₖ X` for `k` in `1..=arity(Y)`. An `X` of arity 0 is inserted as an
/// isolated vertex whose output slot is killed by the counit.
pub fn compose(y: &OperadElement, k: usize, x: &OperadElement) -> Result<OperadElement> {
    compose_ordered(y, k, x, false)
}

/// `Y ∘ₖ X` with the twisted legs of the components of `Δₖ` applied in
/// reverse order. The actions hit disjoint vertex sets, so this must agree
/// with [`compose`].
pub fn compose_reversed(y: &OperadElement, k: usize, x: &OperadElement) -> Result<OperadElement> {
    compose_ordered(y, k, x, true)
}

/// `(⋯((Y ∘₁ X₁) ∘_{M₁+1} X₂) ⋯) ∘_{M_{n−1}+1} Xₙ`.
pub fn compose_many(y: &OperadElement, xs: &[OperadElement]) -> Result<OperadElement> {
    if xs.len() != y.arity() {
        return Err(Error::ArityMismatch { expected: y.arity(), found: xs.len() });
    }
    let mut acc = y.clone();
    let mut pos = 1;
    for x in xs {
        acc = compose(&acc, pos, x)?;
        pos += x.arity();
    }
    Ok(acc)
}

fn compose_ordered(y: &OperadElement, k: usize, x: &OperadElement, reverse: bool) -> Result<OperadElement> {
    let n = y.arity();
    if k == 0 || k > n {
        return Err(Error::SlotOutOfRange { slot: k, arity: n });
    }
    if !Arc::ptr_eq(y.module(), x.module()) && y.module().spec() != x.module().spec() {
        return Err(Error::Validation("elements live on different modules".into()));
    }
    let m = x.arity();
    let (yc, xc) = (y.clone(), x.clone());
    let module = Arc::clone(y.module());
    let f: EvalFn = if m == 0 {
        Arc::new(move |g, args| compose_nullary(&module, &yc, k, &xc, g, args))
    } else {
        Arc::new(move |g, args| compose_at(&module, &yc, k, &xc, g, args, reverse))
    };
    Ok(OperadElement::from_fn(
        Arc::clone(y.module()),
        n + m - 1,
        y.is_odd() ^ x.is_odd(),
        &format!("({} o{} {})", y.label(), k, x.label()),
        f,
    ))
}

fn koszul(module: &Module, x: &OperadElement, args: &[Monomial], k: usize) -> bool {
    x.is_odd() && args[..k - 1].iter().filter(|a| pbar(module, a)).count() % 2 == 1
}

fn full(module: &Module, slots: &[MultiIndex]) -> Vec<MultiIndex> {
    let mut s = slots.to_vec();
    s.push(MultiIndex::zero(module.dim()));
    s
}

fn compose_nullary(
    module: &Module,
    y: &OperadElement,
    k: usize,
    x: &OperadElement,
    g: &Graph,
    args: &[Monomial],
) -> PseudoTensor {
    let total = g.n();
    let mut out = PseudoTensor::zero(output_arity(g));
    let shift = |v: usize| if v >= k { v + 1 } else { v };
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(a, b)| (shift(a), shift(b))).collect();
    let big = Graph::new(total + 1, &edges).expect("relabeled graph is valid");
    let iso = big.component_index()[k - 1];
    let xv = x.eval_monomials(&Graph::edgeless(0), &[]);
    // the class is represented by an ordinary vector
    let rep = xv.as_vector().unwrap_or_else(|| {
        AlgebraElement::from_terms(xv.terms().iter().map(|((_, m), c)| (m.clone(), c.clone())))
    });
    let mut wargs: Vec<AlgebraElement> =
        args.iter().map(|a| AlgebraElement::from_monomial(a.clone())).collect();
    wargs.insert(k - 1, rep);
    let t = y.eval_unchecked(&big, &wargs);
    let neg = koszul(module, x, args, k);
    for ((slots, mono), c) in t.terms() {
        let mut fs = full(module, slots);
        if !fs[iso].is_zero() {
            continue;
        }
        fs.remove(iso);
        if fs.is_empty() {
            fs.push(MultiIndex::zero(module.dim()));
        }
        module.normalize_into(&mut out, &fs, mono, &(c * sign(neg)));
    }
    out
}

fn compose_at(
    module: &Module,
    y: &OperadElement,
    k: usize,
    x: &OperadElement,
    g: &Graph,
    args: &[Monomial],
    reverse: bool,
) -> PseudoTensor {
    let total = g.n();
    let m = x.arity();
    let n = total + 1 - m;
    let mut out = PseudoTensor::zero(output_arity(g));
    let parts = clasp_parts(n, k, m);
    let (d0, dk) = g.cocompose(&parts).expect("partition matches the graph");
    if !d0.is_acyclic() {
        return out;
    }
    let inner = &dk[k - 1];
    let rho = g.rho(k, m).expect("clasped graph is acyclic");
    let s = inner.component_count();
    let t = d0.component_count();
    let q = d0.component_index()[k - 1];

    // positions in the output for each Δₖ component and each other Δ₀ component
    let pos_inner: Vec<usize> = (0..s).map(|l| rho.apply0(l)).collect();
    let mut pos_outer: Vec<Option<usize>> = vec![None; t];
    let mut idx = s;
    for (j, slot) in pos_outer.iter_mut().enumerate() {
        if j != q {
            *slot = Some(rho.apply0(idx));
            idx += 1;
        }
    }

    // outer groups receiving the action of each Δₖ component
    let reach: Vec<Vec<usize>> = inner
        .components()
        .iter()
        .map(|comp| {
            let mut set = BTreeSet::new();
            for &v in comp {
                set.extend(g.externally_connected(&parts, k - 1 + v).expect("vertex in range"));
            }
            set.remove(&k);
            set.into_iter().collect()
        })
        .collect();

    let tx = x.eval_monomials(inner, &args[k - 1..k - 1 + m]);
    let neg = koszul(module, x, args, k);
    let hopf = module.hopf();

    for ((xslots, xmono), xc) in tx.terms() {
        let fx = full(module, xslots);
        let legs: Vec<Vec<(MultiIndex, MultiIndex, Q)>> =
            fx.iter().map(|f| hopf.twisted_legs(&HopfElement::mono(f.clone()))).collect();
        for_each_choice(&legs, |choice| {
            // choice[l] = (f₍₁₎, f₍₋₂₎, coefficient) for component l
            let mut coef = xc * sign(neg);
            for (_, _, c) in choice {
                coef *= c;
            }
            let mut base: Vec<AlgebraElement> = Vec::with_capacity(n);
            for j in 1..=n {
                let a = if j < k {
                    AlgebraElement::from_monomial(args[j - 1].clone())
                } else if j == k {
                    AlgebraElement::from_monomial(xmono.clone())
                } else {
                    AlgebraElement::from_monomial(args[j + m - 2].clone())
                };
                base.push(a);
            }
            let mut wlist: Vec<(Vec<AlgebraElement>, Q)> = vec![(base, coef)];
            let mut order: Vec<usize> = (0..s).collect();
            if reverse {
                order.reverse();
            }
            for l in order {
                let f2 = &choice[l].1;
                let targets = &reach[l];
                if targets.is_empty() {
                    if !f2.is_zero() {
                        wlist.clear();
                        break;
                    }
                    continue;
                }
                if f2.is_zero() {
                    continue;
                }
                let split = hopf.mono_coproduct(f2, targets.len());
                let mut next = Vec::with_capacity(wlist.len() * split.len());
                for (w, c) in &wlist {
                    for (pieces, d) in &split {
                        let mut w2 = w.clone();
                        for (&tj, piece) in targets.iter().zip(pieces) {
                            w2[tj - 1] = module.act(&HopfElement::mono(piece.clone()), &w2[tj - 1]);
                        }
                        if w2.iter().all(|v| !v.is_zero()) {
                            next.push((w2, c * d));
                        }
                    }
                }
                wlist = next;
            }
            for (w, c) in wlist {
                let ty = y.eval_unchecked(&d0, &w);
                for ((yslots, ymono), yc) in ty.terms() {
                    let gy = full(module, yslots);
                    for (gq, d) in hopf.mono_coproduct(&gy[q], s) {
                        let mut factors: Vec<HopfElement> = vec![HopfElement::zero(); s + t - 1];
                        for l in 0..s {
                            factors[pos_inner[l]] = hopf.mul_mono(&choice[l].0, &gq[l]);
                        }
                        for (j, p) in pos_outer.iter().enumerate() {
                            if let Some(p) = p {
                                factors[*p] = HopfElement::mono(gy[j].clone());
                            }
                        }
                        let cc = &c * yc * &d;
                        for (key, e) in HTensor::pure(&factors).terms() {
                            module.normalize_into(&mut out, key, ymono, &(&cc * e));
                        }
                    }
                }
            }
        });
    }
    out
}

fn for_each_choice<T>(lists: &[Vec<T>], mut f: impl FnMut(&[&T])) {
    if lists.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        let pick: Vec<&T> = lists.iter().zip(&idx).map(|(l, &i)| &l[i]).collect();
        f(&pick);
        let mut p = lists.len();
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < lists[p].len() {
                break;
            }
            idx[p] = 0;
        }
    }
}
