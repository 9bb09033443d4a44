//! The pseudoalgebra operad `P*_H(ΠV)` and its Lie superalgebra `W*`.
//!
//! Elements are maps `V^{⊗n} → H^{⊗n} ⊗_H V` with no graph attached. The
//! compositions here are written directly from the `P*` formulas rather than
//! by restricting the graph operad, so `phi` can be used as a cross-check.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::One;

use super::{for_each_monomial_tuple, output_arity, pbar, permute_args, sign, EvalFn, OperadElement};
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::hmodule::{AlgebraElement, Module, Monomial, PseudoTensor};
use crate::hopf::{HTensor, HopfElement, MultiIndex};
use crate::perm::Perm;
use crate::pseudoalg::BracketFn;
use crate::Q;

pub type StarFn = Arc<dyn Fn(&[Monomial]) -> PseudoTensor + Send + Sync>;

type Cache = Arc<RwLock<HashMap<Vec<Monomial>, PseudoTensor>>>;

#[derive(Clone)]
pub struct StarElement {
    arity: usize,
    odd: bool,
    module: Arc<Module>,
    label: String,
    eval: StarFn,
    cache: Cache,
}

impl fmt::Debug for StarElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StarElement({}, arity {})", self.label, self.arity)
    }
}

impl StarElement {
    pub fn from_fn(module: Arc<Module>, arity: usize, odd: bool, label: &str, f: StarFn) -> Self {
        StarElement { arity, odd, module, label: label.to_string(), eval: f, cache: Cache::default() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn module(&self) -> &Arc<Module> {
        &self.module
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval_monomials(&self, args: &[Monomial]) -> PseudoTensor {
        if let Some(v) = self.cache.read().unwrap_or_else(|e| e.into_inner()).get(args) {
            return v.clone();
        }
        let v = (self.eval)(args);
        self.cache.write().unwrap_or_else(|e| e.into_inner()).insert(args.to_vec(), v.clone());
        v
    }

    pub fn eval(&self, args: &[AlgebraElement]) -> Result<PseudoTensor> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: args.len() });
        }
        let mut out = PseudoTensor::zero(self.arity);
        for_each_monomial_tuple(args, |ms, c| out.add_scaled(&self.eval_monomials(ms), c));
        Ok(out)
    }

    /// The edgeless part of an operad element.
    pub fn from_operad(y: &OperadElement) -> Self {
        let (yc, g) = (y.clone(), Graph::edgeless(y.arity()));
        let f: StarFn = Arc::new(move |args| yc.eval_monomials(&g, args));
        Self::from_fn(Arc::clone(y.module()), y.arity(), y.is_odd(), y.label(), f)
    }

    pub fn combine(&self, other: &StarElement, c: &Q) -> Result<Self> {
        if self.arity != other.arity || self.odd != other.odd {
            return Err(Error::Validation("cannot add star elements of different shape".into()));
        }
        let (a, b, c) = (self.clone(), other.clone(), c.clone());
        let f: StarFn = Arc::new(move |args| {
            let mut t = a.eval_monomials(args);
            t.add_scaled(&b.eval_monomials(args), &c);
            t
        });
        Ok(Self::from_fn(Arc::clone(&self.module), self.arity, self.odd, &self.label, f))
    }

    /// `Y^σ(v) = (σ⁻¹ ⊗_H 1) Y(σv)`.
    pub fn permute(&self, sigma: &Perm) -> Result<Self> {
        if sigma.len() != self.arity {
            return Err(Error::SizeMismatch { expected: self.arity, found: sigma.len() });
        }
        let (a, s) = (self.clone(), sigma.clone());
        let inv = sigma.inverse();
        let module = Arc::clone(&self.module);
        let f: StarFn = Arc::new(move |args| {
            let (moved, neg) = permute_args(&module, &s, args);
            let t = module.permute_slots(&inv, &a.eval_monomials(&moved)).expect("arity agrees");
            if neg {
                t.neg()
            } else {
                t
            }
        });
        Ok(Self::from_fn(Arc::clone(&self.module), self.arity, self.odd, &self.label, f))
    }
}

/// `φ(f*) = f`: the element of the graph operad equal to `f*` on the edgeless
/// graph and zero on graphs with edges.
pub fn phi(f: &StarElement) -> OperadElement {
    let fc = f.clone();
    let e: EvalFn = Arc::new(move |g, args| {
        if g.is_edgeless() {
            fc.eval_monomials(args)
        } else {
            PseudoTensor::zero(output_arity(g))
        }
    });
    OperadElement::from_fn(Arc::clone(f.module()), f.arity(), f.is_odd(), f.label(), e)
}

/// `X*(a ⊗ b) = (−1)^{p(a)} [a∗b]`.
pub fn star_master(module: Arc<Module>, bracket: BracketFn) -> StarElement {
    let m = Arc::clone(&module);
    let f: StarFn = Arc::new(move |args| {
        let av = AlgebraElement::from_monomial(args[0].clone());
        let bv = AlgebraElement::from_monomial(args[1].clone());
        bracket(&av, &bv).scale(&sign(m.monomial_odd(&args[0])))
    });
    StarElement::from_fn(module, 2, true, "X*", f)
}

/// `Y ∘ₖ X` in `P*_H`:
/// `(g₁ ⊗ ⋯ ⊗ f₁g_{k(1)} ⊗ ⋯ ⊗ f_m g_{k(m)} ⊗ ⋯ ⊗ gₙ) ⊗_H y(v₁ ⊗ ⋯ ⊗ x(⋯) ⊗ ⋯)`.
pub fn star_compose(y: &StarElement, k: usize, x: &StarElement) -> Result<StarElement> {
    let n = y.arity();
    if k == 0 || k > n {
        return Err(Error::SlotOutOfRange { slot: k, arity: n });
    }
    let m = x.arity();
    let (yc, xc) = (y.clone(), x.clone());
    let module = Arc::clone(y.module());
    let f: StarFn = Arc::new(move |args| {
        let neg = xc.is_odd() && args[..k - 1].iter().filter(|a| pbar(&module, a)).count() % 2 == 1;
        let total = n + m - 1;
        let mut out = PseudoTensor::zero(total);
        let tx = xc.eval_monomials(&args[k - 1..k - 1 + m]);
        let dim = module.dim();
        for ((xs, xm), xcoef) in tx.terms() {
            let mut fx = xs.clone();
            if m > 0 {
                fx.push(MultiIndex::zero(dim));
            }
            let mut w: Vec<Monomial> = args[..k - 1].to_vec();
            w.push(xm.clone());
            w.extend_from_slice(&args[k - 1 + m..]);
            let ty = yc.eval_monomials(&w);
            for ((ys, ym), ycoef) in ty.terms() {
                let mut gy = ys.clone();
                gy.push(MultiIndex::zero(dim));
                let c = xcoef * ycoef * sign(neg);
                if m == 0 {
                    // ε on the slot of the inserted class
                    if !gy[k - 1].is_zero() {
                        continue;
                    }
                    let mut rest = gy.clone();
                    rest.remove(k - 1);
                    if rest.is_empty() {
                        rest.push(MultiIndex::zero(dim));
                    }
                    module.normalize_into(&mut out, &rest, ym, &c);
                    continue;
                }
                for (split, d) in module.hopf().mono_coproduct(&gy[k - 1], m) {
                    let mut factors: Vec<HopfElement> = Vec::with_capacity(total);
                    for g in &gy[..k - 1] {
                        factors.push(HopfElement::mono(g.clone()));
                    }
                    for (fi, gi) in fx.iter().zip(&split) {
                        factors.push(module.hopf().mul_mono(fi, gi));
                    }
                    for g in &gy[k..] {
                        factors.push(HopfElement::mono(g.clone()));
                    }
                    for (key, e) in HTensor::pure(&factors).terms() {
                        module.normalize_into(&mut out, key, ym, &(&c * &d * e));
                    }
                }
            }
        }
        out
    });
    Ok(StarElement::from_fn(
        Arc::clone(y.module()),
        n + m - 1,
        y.is_odd() ^ x.is_odd(),
        &format!("({} o{} {})", y.label(), k, x.label()),
        f,
    ))
}

fn star_sum(module: &Arc<Module>, arity: usize, odd: bool, label: &str, parts: Vec<(StarElement, Q)>) -> StarElement {
    let f: StarFn = Arc::new(move |args| {
        let mut out = PseudoTensor::zero(arity);
        for (p, c) in &parts {
            out.add_scaled(&p.eval_monomials(args), c);
        }
        out
    });
    StarElement::from_fn(Arc::clone(module), arity, odd, label, f)
}

pub fn star_box_product(f: &StarElement, g: &StarElement) -> Result<StarElement> {
    let odd = f.is_odd() ^ g.is_odd();
    let label = format!("({} □ {})", f.label(), g.label());
    if f.arity() == 0 {
        let arity = g.arity().saturating_sub(1);
        return Ok(star_sum(f.module(), arity, odd, &label, Vec::new()));
    }
    let c = star_compose(f, 1, g)?;
    let parts = Perm::shuffles(g.arity(), f.arity() - 1)
        .into_iter()
        .map(|s| Ok((c.permute(&s.inverse())?, Q::one())))
        .collect::<Result<Vec<_>>>()?;
    Ok(star_sum(f.module(), c.arity(), odd, &label, parts))
}

pub fn star_bracket(f: &StarElement, g: &StarElement) -> Result<StarElement> {
    let a = star_box_product(f, g)?;
    let b = star_box_product(g, f)?;
    let c = if f.is_odd() && g.is_odd() { Q::one() } else { -Q::one() };
    let label = format!("[{}, {}]", f.label(), g.label());
    Ok(star_sum(f.module(), a.arity(), a.is_odd(), &label, vec![(a, Q::one()), (b, c)]))
}

/// Whether `f` satisfies the Leibniz rule in every slot on the given
/// arguments and factors:
/// `Y(⋯ b aᵢ ⋯) = (−1)^{p(b)(p̄(Y)+Σ_{k<i} p̄(a_k))} b ·ᵢ Y(⋯ aᵢ ⋯)
///  + (−1)^{p(aᵢ)(p(b)+p̄(Y)+Σ_{k<i} p̄(a_k))} aᵢ ·ᵢ Y(⋯ b ⋯)`.
///
/// Returns the first failing slot, arguments and factor. Modules without a
/// product impose no condition.
pub fn check_variational_leibniz(
    f: &StarElement,
    tuples: &[Vec<Monomial>],
    factors: &[Monomial],
) -> Result<Option<(usize, Vec<Monomial>, Monomial)>> {
    let module = f.module();
    if !module.has_product() || f.arity() == 0 {
        return Ok(None);
    }
    for t in tuples {
        if t.len() != f.arity() {
            return Err(Error::ArityMismatch { expected: f.arity(), found: t.len() });
        }
        for i in 1..=f.arity() {
            let passed = t[..i - 1].iter().filter(|a| pbar(module, a)).count() % 2 == 1;
            for b in factors {
                let a = &t[i - 1];
                let (pa, pb) = (module.monomial_odd(a), module.monomial_odd(b));
                let bv = AlgebraElement::from_monomial(b.clone());
                let av = AlgebraElement::from_monomial(a.clone());
                let mut args: Vec<AlgebraElement> =
                    t.iter().map(|m| AlgebraElement::from_monomial(m.clone())).collect();
                args[i - 1] = module.mul(&bv, &av);
                let lhs = f.eval(&args)?;
                let first = module.dot_slot(&bv, i, &f.eval_monomials(t))?;
                let mut tb = t.clone();
                tb[i - 1] = b.clone();
                let second = module.dot_slot(&av, i, &f.eval_monomials(&tb))?;
                let s1 = sign(pb && (f.is_odd() ^ passed));
                let s2 = sign(pa && (pb ^ f.is_odd() ^ passed));
                let rhs = first.scale(&s1).add(&second.scale(&s2));
                if !lhs.sub(&rhs).is_zero() {
                    return Ok(Some((i, t.clone(), b.clone())));
                }
            }
        }
    }
    Ok(None)
}
