//! `H`-modules `V`: free modules `H ⊗ g` and symmetric superalgebras `S(H ⊗ g)`,
//! together with the spaces `H^{⊗n} ⊗_H V` where pseudobrackets take values.
//!
//! A basis vector of `V` is a [`Monomial`]: a sorted product of atoms `∂^I u`.
//! Pseudotensors are stored in the normal form `(h₁ ⊗ ⋯ ⊗ h_{n−1} ⊗ 1) ⊗_H v`,
//! which is unique, so equality of normal forms is equality in `H^{⊗n} ⊗_H V`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hopf::{add_to_map, format_linear, HTensor, HopfAlgebra, HopfElement, MultiIndex};
use crate::linalg::Echelon;
use crate::perm::Perm;
use crate::Q;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub odd: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleKind {
    /// `V = H ⊗ g`, no product.
    Free,
    /// `V = S(H ⊗ g)`, supercommutative with unit.
    SymmetricAlgebra,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModuleSpec {
    pub generators: Vec<Generator>,
    pub kind: ModuleKind,
}

/// `∂^I u` for the generator with index `gen`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Atom {
    pub gen: usize,
    pub idx: MultiIndex,
}

/// A sorted product of atoms; the empty product is the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(pub Vec<Atom>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(gen: usize, idx: MultiIndex) -> Self {
        Monomial(vec![Atom { gen, idx }])
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    /// Polynomial degree (number of atoms).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total number of derivatives.
    pub fn d_degree(&self) -> u32 {
        self.0.iter().map(|a| a.idx.degree()).sum()
    }

    /// Generator indices with multiplicity.
    pub fn content(&self) -> Vec<usize> {
        self.0.iter().map(|a| a.gen).collect()
    }
}

/// A finite linear combination of monomials.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<Monomial, Q>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn one() -> Self {
        Self::from_monomial(Monomial::unit())
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let mut t = BTreeMap::new();
        t.insert(m, Q::one());
        AlgebraElement { terms: t }
    }

    pub fn atom(gen: usize, idx: MultiIndex) -> Self {
        Self::from_monomial(Monomial::atom(gen, idx))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Q)>>(it: I) -> Self {
        let mut out = AlgebraElement::zero();
        for (m, c) in it {
            out.add_term(m, c);
        }
        out
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        add_to_map(&mut self.terms, m, c);
    }

    pub fn add(&self, other: &AlgebraElement) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &AlgebraElement) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return AlgebraElement::zero();
        }
        AlgebraElement { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    /// Largest total derivative count present.
    pub fn d_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::d_degree).max().unwrap_or(0)
    }
}

/// An element of `H^{⊗n} ⊗_H V` in normal form; arity 0 is a class in `V/H₊V`
/// stored by its reduced representative.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PseudoTensor {
    arity: usize,
    terms: BTreeMap<(Vec<MultiIndex>, Monomial), Q>,
}

impl PseudoTensor {
    pub fn zero(arity: usize) -> Self {
        PseudoTensor { arity, terms: BTreeMap::new() }
    }

    /// `v ∈ V ≅ H ⊗_H V`.
    pub fn from_vector(v: &AlgebraElement) -> Self {
        let mut out = PseudoTensor::zero(1);
        for (m, c) in &v.terms {
            out.add_term(Vec::new(), m.clone(), c.clone());
        }
        out
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeMap<(Vec<MultiIndex>, Monomial), Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `c · (slots ⊗ 1) ⊗ m` for slots already in normal position.
    pub fn add_term(&mut self, slots: Vec<MultiIndex>, m: Monomial, c: Q) {
        debug_assert_eq!(slots.len() + 1, self.arity.max(1));
        add_to_map(&mut self.terms, (slots, m), c);
    }

    pub fn add_assign(&mut self, other: &PseudoTensor) {
        assert_eq!(self.arity, other.arity, "pseudotensor arities differ");
        for (k, c) in &other.terms {
            add_to_map(&mut self.terms, k.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &PseudoTensor, s: &Q) {
        assert_eq!(self.arity, other.arity, "pseudotensor arities differ");
        if s.is_zero() {
            return;
        }
        for (k, c) in &other.terms {
            add_to_map(&mut self.terms, k.clone(), c * s);
        }
    }

    pub fn add(&self, other: &PseudoTensor) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &PseudoTensor) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = PseudoTensor::zero(self.arity);
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    /// The vector part of an arity-1 tensor, or the representative of a class.
    pub fn as_vector(&self) -> Option<AlgebraElement> {
        if self.arity > 1 {
            return None;
        }
        Some(AlgebraElement::from_terms(self.terms.iter().map(|((_, m), c)| (m.clone(), c.clone()))))
    }

    /// Largest derivative count among vector parts.
    pub fn d_degree(&self) -> u32 {
        self.terms.keys().map(|(_, m)| m.d_degree()).max().unwrap_or(0)
    }
}

type ActKey = (MultiIndex, Monomial);

/// A module `V` over a shared Hopf algebra, with memoized action.
#[derive(Debug)]
pub struct Module {
    hopf: Arc<HopfAlgebra>,
    spec: ModuleSpec,
    act_cache: RwLock<HashMap<ActKey, AlgebraElement>>,
}

impl Module {
    pub fn new(hopf: Arc<HopfAlgebra>, spec: ModuleSpec) -> Result<Self> {
        let mut names = BTreeSet::new();
        for g in &spec.generators {
            let ok = g.name.chars().next().is_some_and(char::is_alphabetic)
                && g.name.chars().all(|c| c.is_alphanumeric() || c == '_')
                && g.name != "d";
            if !ok {
                return Err(Error::Validation(format!("bad generator name `{}`", g.name)));
            }
            if !names.insert(g.name.clone()) {
                return Err(Error::Validation(format!("duplicate generator `{}`", g.name)));
            }
        }
        if spec.generators.is_empty() {
            return Err(Error::Validation("at least one generator is required".into()));
        }
        Ok(Module { hopf, spec, act_cache: RwLock::default() })
    }

    pub fn hopf(&self) -> &Arc<HopfAlgebra> {
        &self.hopf
    }

    pub fn spec(&self) -> &ModuleSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.hopf.dim()
    }

    pub fn kind(&self) -> ModuleKind {
        self.spec.kind
    }

    pub fn has_product(&self) -> bool {
        self.spec.kind == ModuleKind::SymmetricAlgebra
    }

    pub fn generator_count(&self) -> usize {
        self.spec.generators.len()
    }

    pub fn generator(&self, name: &str) -> Option<usize> {
        self.spec.generators.iter().position(|g| g.name == name)
    }

    pub fn gen_odd(&self, gen: usize) -> bool {
        self.spec.generators[gen].odd
    }

    /// The generator itself, `∂^0 u`.
    pub fn gen_element(&self, gen: usize) -> AlgebraElement {
        AlgebraElement::atom(gen, MultiIndex::zero(self.dim()))
    }

    pub fn monomial_odd(&self, m: &Monomial) -> bool {
        m.0.iter().filter(|a| self.gen_odd(a.gen)).count() % 2 == 1
    }

    /// Split into parity-homogeneous parts `(even, odd)`.
    pub fn split_parity(&self, v: &AlgebraElement) -> (AlgebraElement, AlgebraElement) {
        let mut even = AlgebraElement::zero();
        let mut odd = AlgebraElement::zero();
        for (m, c) in &v.terms {
            if self.monomial_odd(m) {
                odd.add_term(m.clone(), c.clone());
            } else {
                even.add_term(m.clone(), c.clone());
            }
        }
        (even, odd)
    }

    /// Parity of a homogeneous element; `None` if mixed, `Some(false)` for zero.
    pub fn parity(&self, v: &AlgebraElement) -> Option<bool> {
        let mut it = v.terms.keys().map(|m| self.monomial_odd(m));
        let first = it.next().unwrap_or(false);
        if it.all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Sort atoms into a monomial, with the Koszul sign; `None` if an odd atom repeats.
    pub fn sort_atoms(&self, mut atoms: Vec<Atom>) -> Option<(bool, Monomial)> {
        let mut neg = false;
        // insertion sort, counting odd-odd transpositions
        for i in 1..atoms.len() {
            let mut j = i;
            while j > 0 && atoms[j - 1] > atoms[j] {
                if self.gen_odd(atoms[j - 1].gen) && self.gen_odd(atoms[j].gen) {
                    neg = !neg;
                }
                atoms.swap(j - 1, j);
                j -= 1;
            }
        }
        for w in atoms.windows(2) {
            if w[0] == w[1] && self.gen_odd(w[0].gen) {
                return None;
            }
        }
        Some((neg, Monomial(atoms)))
    }

    fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
        let mut atoms = a.0.clone();
        atoms.extend(b.0.iter().cloned());
        self.sort_atoms(atoms)
    }

    /// Supercommutative product.
    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        if !self.has_product() {
            return Err(Error::NoProduct);
        }
        Ok(self.mul(a, b))
    }

    pub(crate) fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some((neg, m)) = self.mul_monomials(ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// `∂^I · m`, distributing over atoms by the iterated coproduct.
    pub fn act_mono(&self, h: &MultiIndex, m: &Monomial) -> AlgebraElement {
        if h.is_zero() {
            return AlgebraElement::from_monomial(m.clone());
        }
        if m.is_unit() {
            return AlgebraElement::zero();
        }
        if m.len() == 1 {
            let a = &m.0[0];
            let mut out = AlgebraElement::zero();
            for (k, c) in self.hopf.mul_mono(h, &a.idx).terms() {
                out.add_term(Monomial::atom(a.gen, k.clone()), c.clone());
            }
            return out;
        }
        let key = (h.clone(), m.clone());
        if let Some(v) = self.act_cache.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return v.clone();
        }
        let mut out = AlgebraElement::zero();
        for (legs, c) in self.hopf.mono_coproduct(h, m.len()) {
            // each atom becomes a combination of atoms; expand the product
            let mut partial: Vec<(Vec<Atom>, Q)> = vec![(Vec::new(), c)];
            for (leg, atom) in legs.iter().zip(&m.0) {
                let moved = self.hopf.mul_mono(leg, &atom.idx);
                let mut next = Vec::with_capacity(partial.len() * moved.terms().len());
                for (atoms, c) in &partial {
                    for (k, d) in moved.terms() {
                        let mut a2 = atoms.clone();
                        a2.push(Atom { gen: atom.gen, idx: k.clone() });
                        next.push((a2, c * d));
                    }
                }
                partial = next;
            }
            for (atoms, c) in partial {
                if let Some((neg, mono)) = self.sort_atoms(atoms) {
                    out.add_term(mono, if neg { -c } else { c });
                }
            }
        }
        self.act_cache.write().unwrap_or_else(|e| e.into_inner()).insert(key, out.clone());
        out
    }

    pub fn act(&self, h: &HopfElement, v: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (i, c) in h.terms() {
            for (m, d) in &v.terms {
                for (m2, e) in &self.act_mono(i, m).terms {
                    out.add_term(m2.clone(), c * d * e);
                }
            }
        }
        out
    }

    /// Bring `c · (slots) ⊗_H m` into normal form and add it to `out`.
    ///
    /// `(h₁ ⊗ ⋯ ⊗ hₙ) ⊗ m = Σ (h₁S(hₙ₍₁₎) ⊗ ⋯ ⊗ hₙ₋₁S(hₙ₍ₙ₋₁₎) ⊗ 1) ⊗ hₙ₍ₙ₎m`.
    pub fn normalize_into(&self, out: &mut PseudoTensor, slots: &[MultiIndex], m: &Monomial, c: &Q) {
        let s = slots.len();
        assert_eq!(s, out.arity.max(1), "slot count must match the arity");
        if out.arity == 0 {
            // H ⊗_H V ≅ V, then pass to the class
            let v = self.act_mono(&slots[0], m).scale(c);
            out.add_assign(&self.class(&v));
            return;
        }
        let last = &slots[s - 1];
        if last.is_zero() {
            add_to_map(&mut out.terms, (slots[..s - 1].to_vec(), m.clone()), c.clone());
            return;
        }
        for (legs, d) in self.hopf.mono_coproduct(last, s) {
            let factors: Vec<HopfElement> = (0..s - 1)
                .map(|k| {
                    let sk = self.hopf.antipode_mono(&legs[k]);
                    self.hopf.mul(&HopfElement::mono(slots[k].clone()), &sk)
                })
                .collect();
            let moved = self.act_mono(&legs[s - 1], m);
            let cd = c * d;
            for (key, e) in HTensor::pure(&factors).terms() {
                for (m2, f) in moved.terms() {
                    add_to_map(&mut out.terms, (key.clone(), m2.clone()), &cd * e * f);
                }
            }
        }
    }

    /// Normal form of `t ⊗_H v` for a tensor `t ∈ H^{⊗n}`; `n = 1` gives `V`.
    pub fn normalize(&self, t: &HTensor, v: &AlgebraElement) -> PseudoTensor {
        let mut out = PseudoTensor::zero(t.arity());
        for (slots, c) in t.terms() {
            for (m, d) in &v.terms {
                self.normalize_into(&mut out, slots, m, &(c * d));
            }
        }
        out
    }

    /// The same tensor with every slot written out, last slot `1`.
    pub fn raw_terms(t: &PseudoTensor) -> Vec<(Vec<MultiIndex>, Monomial, Q)> {
        t.terms.iter().map(|((s, m), c)| (s.clone(), m.clone(), c.clone())).collect()
    }

    fn full_slots(&self, slots: &[MultiIndex]) -> Vec<MultiIndex> {
        let mut s = slots.to_vec();
        s.push(MultiIndex::zero(self.dim()));
        s
    }

    /// `(1 ⊗ ⋯ ⊗ h ⊗ ⋯ ⊗ 1) t` with `h` multiplied on the left of slot `k` (1-based).
    pub fn act_component(&self, h: &HopfElement, k: usize, t: &PseudoTensor) -> Result<PseudoTensor> {
        if k == 0 || k > t.arity {
            return Err(Error::SlotOutOfRange { slot: k, arity: t.arity });
        }
        let mut out = PseudoTensor::zero(t.arity);
        for ((slots, m), c) in &t.terms {
            let full = self.full_slots(slots);
            for (i, d) in h.terms() {
                for (j, e) in self.hopf.mul_mono(i, &full[k - 1]).terms() {
                    let mut s2 = full.clone();
                    s2[k - 1] = j.clone();
                    self.normalize_into(&mut out, &s2, m, &(c * d * e));
                }
            }
        }
        Ok(out)
    }

    /// `σ ⊗_H 1`: slot `i` moves to position `σ(i)`.
    pub fn permute_slots(&self, sigma: &Perm, t: &PseudoTensor) -> Result<PseudoTensor> {
        if sigma.len() != t.arity {
            return Err(Error::SizeMismatch { expected: t.arity, found: sigma.len() });
        }
        if t.arity <= 1 {
            return Ok(t.clone());
        }
        let mut out = PseudoTensor::zero(t.arity);
        for ((slots, m), c) in &t.terms {
            let full = self.full_slots(slots);
            let mut s2 = full.clone();
            for (i, x) in full.into_iter().enumerate() {
                s2[sigma.apply0(i)] = x;
            }
            self.normalize_into(&mut out, &s2, m, c);
        }
        Ok(out)
    }

    /// `b ·ᵢ A = Σ (g₁ ⊗ ⋯ ⊗ gᵢ₍₁₎ ⊗ ⋯ ⊗ gₙ) ⊗_H (gᵢ₍₋₂₎ b) v` for a raw presentation
    /// `A = Σ (g₁ ⊗ ⋯ ⊗ gₙ) ⊗_H v`, slot `i` 1-based.
    pub fn dot_slot_raw(&self, b: &AlgebraElement, i: usize, a: &HTensor, v: &AlgebraElement) -> Result<PseudoTensor> {
        self.require_product()?;
        let n = a.arity();
        if i == 0 || i > n {
            return Err(Error::SlotOutOfRange { slot: i, arity: n });
        }
        let mut out = PseudoTensor::zero(n);
        for (slots, c) in a.terms() {
            for (x1, x2, d) in self.hopf.twisted_legs(&HopfElement::mono(slots[i - 1].clone())) {
                let moved = self.act_mono_elem(&x2, b);
                let w = self.mul(&moved, v);
                let mut s2 = slots.clone();
                s2[i - 1] = x1;
                for (m, e) in &w.terms {
                    self.normalize_into(&mut out, &s2, m, &(c * &d * e));
                }
            }
        }
        Ok(out)
    }

    /// `b ·ᵢ A` on a normal-form tensor.
    pub fn dot_slot(&self, b: &AlgebraElement, i: usize, a: &PseudoTensor) -> Result<PseudoTensor> {
        self.require_product()?;
        if i == 0 || i > a.arity {
            return Err(Error::SlotOutOfRange { slot: i, arity: a.arity });
        }
        let mut out = PseudoTensor::zero(a.arity);
        for ((slots, m), c) in &a.terms {
            let full = self.full_slots(slots);
            for (x1, x2, d) in self.hopf.twisted_legs(&HopfElement::mono(full[i - 1].clone())) {
                let w = self.mul(&self.act_mono_elem(&x2, b), &AlgebraElement::from_monomial(m.clone()));
                let mut s2 = full.clone();
                s2[i - 1] = x1;
                for (m2, e) in &w.terms {
                    self.normalize_into(&mut out, &s2, m2, &(c * &d * e));
                }
            }
        }
        Ok(out)
    }

    fn act_mono_elem(&self, h: &MultiIndex, v: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (m, c) in &v.terms {
            for (m2, d) in &self.act_mono(h, m).terms {
                out.add_term(m2.clone(), c * d);
            }
        }
        out
    }

    fn require_product(&self) -> Result<()> {
        if self.has_product() {
            Ok(())
        } else {
            Err(Error::NoProduct)
        }
    }

    /// `A c` for `A ∈ H^{⊗2} ⊗_H V`: `(f ⊗ g₍₁₎) ⊗_H b(g₍₋₂₎c)`.
    pub fn mul_right(&self, a: &PseudoTensor, c: &AlgebraElement) -> Result<PseudoTensor> {
        self.require_product()?;
        // in normal form the last slot is 1, so this is (f ⊗ 1) ⊗ bc
        let mut out = PseudoTensor::zero(a.arity);
        for ((slots, m), k) in &a.terms {
            let w = self.mul(&AlgebraElement::from_monomial(m.clone()), c);
            for (m2, d) in &w.terms {
                add_to_map(&mut out.terms, (slots.clone(), m2.clone()), k * d);
            }
        }
        Ok(out)
    }

    /// `a B` for `B ∈ H^{⊗2} ⊗_H V`: `(f₍₁₎ ⊗ g) ⊗_H (f₍₋₂₎a) b`.
    pub fn mul_left(&self, a: &AlgebraElement, b: &PseudoTensor) -> Result<PseudoTensor> {
        if b.arity != 2 {
            return Err(Error::ArityMismatch { expected: 2, found: b.arity });
        }
        self.dot_slot(a, 1, b)
    }

    /// `A c` on a raw presentation `A = Σ (f ⊗ g) ⊗_H b`.
    pub fn mul_right_raw(&self, a: &HTensor, b: &AlgebraElement, c: &AlgebraElement) -> Result<PseudoTensor> {
        self.require_product()?;
        if a.arity() != 2 {
            return Err(Error::ArityMismatch { expected: 2, found: a.arity() });
        }
        let mut out = PseudoTensor::zero(2);
        for (slots, k) in a.terms() {
            for (g1, g2, d) in self.hopf.twisted_legs(&HopfElement::mono(slots[1].clone())) {
                let w = self.mul(b, &self.act_mono_elem(&g2, c));
                let s2 = vec![slots[0].clone(), g1];
                for (m, e) in &w.terms {
                    self.normalize_into(&mut out, &s2, m, &(k * &d * e));
                }
            }
        }
        Ok(out)
    }

    /// `a B` on a raw presentation `B = Σ (f ⊗ g) ⊗_H b`.
    pub fn mul_left_raw(&self, a: &AlgebraElement, bt: &HTensor, b: &AlgebraElement) -> Result<PseudoTensor> {
        if bt.arity() != 2 {
            return Err(Error::ArityMismatch { expected: 2, found: bt.arity() });
        }
        self.dot_slot_raw(a, 1, bt, b)
    }

    /// Monomials with the given content and derivative count at most `bound`.
    fn monomials_with_content(&self, content: &[usize], bound: u32) -> Vec<Monomial> {
        let dim = self.dim();
        let mut idxs: Vec<Vec<MultiIndex>> = vec![Vec::new(); (bound + 1) as usize];
        for d in 0..=bound {
            idxs[d as usize] = multi_indices_of_degree(dim, d);
        }
        let mut out = BTreeSet::new();
        let mut stack: Vec<(Vec<Atom>, u32)> = vec![(Vec::new(), 0)];
        while let Some((atoms, used)) = stack.pop() {
            if atoms.len() == content.len() {
                if let Some((_, m)) = self.sort_atoms(atoms) {
                    out.insert(m);
                }
                continue;
            }
            let g = content[atoms.len()];
            for d in 0..=(bound - used) {
                for i in &idxs[d as usize] {
                    let mut a2 = atoms.clone();
                    a2.push(Atom { gen: g, idx: i.clone() });
                    stack.push((a2, used + d));
                }
            }
        }
        out.into_iter().collect()
    }

    /// Canonical representative of the class of `v` in `V/H₊V`.
    ///
    /// Works blockwise on generator content, reducing modulo the images
    /// `∂ᵢ · w` of monomials `w` with at most `bound − 1` derivatives. Columns
    /// are ordered with more derivatives first, so the representative keeps
    /// as few derivatives as possible.
    pub fn quotient_class(&self, v: &AlgebraElement, bound: u32) -> AlgebraElement {
        let mut blocks: BTreeMap<Vec<usize>, AlgebraElement> = BTreeMap::new();
        for (m, c) in &v.terms {
            blocks.entry(m.content()).or_default().add_term(m.clone(), c.clone());
        }
        let mut out = AlgebraElement::zero();
        for (content, part) in blocks {
            if content.is_empty() {
                // constants never lie in H₊V
                out = out.add(&part);
                continue;
            }
            let bound = bound.max(part.d_degree());
            let mut ech: Echelon<(std::cmp::Reverse<u32>, Monomial)> = Echelon::new();
            if bound > 0 {
                for w in self.monomials_with_content(&content, bound - 1) {
                    for i in 0..self.dim() {
                        let img = self.act_mono(&MultiIndex::unit(self.dim(), i), &w);
                        ech.insert(&to_row(&img));
                    }
                }
            }
            let r = ech.reduce(&to_row(&part));
            for ((_, m), c) in r {
                out.add_term(m, c);
            }
        }
        out
    }

    /// `v` as an arity-0 pseudotensor (its class in `V/H₊V`).
    pub fn class(&self, v: &AlgebraElement) -> PseudoTensor {
        let r = self.quotient_class(v, v.d_degree());
        let mut out = PseudoTensor::zero(0);
        for (m, c) in r.terms {
            out.terms.insert((Vec::new(), m), c);
        }
        out
    }

    /// Whether `v ∈ H₊V`.
    pub fn in_augmentation_image(&self, v: &AlgebraElement) -> bool {
        self.quotient_class(v, v.d_degree()).is_zero()
    }

    pub fn fmt_monomial(&self, m: &Monomial) -> String {
        if m.is_unit() {
            return "1".into();
        }
        let parts: Vec<String> = m
            .0
            .iter()
            .map(|a| {
                let name = &self.spec.generators[a.gen].name;
                if a.idx.is_zero() {
                    name.clone()
                } else {
                    format!("{} {}", a.idx, name)
                }
            })
            .collect();
        parts.join(" * ")
    }

    pub fn fmt_element(&self, v: &AlgebraElement) -> String {
        let items: Vec<(String, Q)> =
            v.terms.iter().map(|(m, c)| (self.fmt_monomial(m), c.clone())).collect();
        format_linear(&items, " * ")
    }

    /// `(h₁|…|hₙ) @ v` per term; classes print as `[v]`.
    pub fn fmt_pseudo(&self, t: &PseudoTensor) -> String {
        if t.arity == 0 {
            let v = t.as_vector().unwrap();
            return if v.is_zero() { "0".into() } else { format!("[{}]", self.fmt_element(&v)) };
        }
        let items: Vec<(String, Q)> = t
            .terms
            .iter()
            .map(|((slots, m), c)| {
                let mut s: Vec<String> = slots.iter().map(MultiIndex::to_string).collect();
                s.push("1".into());
                (format!("({}) @ {}", s.join("|"), self.fmt_monomial(m)), c.clone())
            })
            .collect();
        format_linear(&items, " ")
    }

    /// Probe vectors: generators, their first derivatives and, with a
    /// product, degree-2 monomials; capped by `degree`.
    pub fn probe_vectors(&self, degree: usize) -> Vec<AlgebraElement> {
        let dim = self.dim();
        let mut atoms: Vec<Monomial> = Vec::new();
        for g in 0..self.generator_count() {
            atoms.push(Monomial::atom(g, MultiIndex::zero(dim)));
        }
        let mut out: Vec<AlgebraElement> = atoms.iter().cloned().map(AlgebraElement::from_monomial).collect();
        if degree >= 1 {
            for g in 0..self.generator_count() {
                for i in 0..dim {
                    out.push(AlgebraElement::atom(g, MultiIndex::unit(dim, i)));
                }
            }
        }
        if degree >= 2 && self.has_product() {
            let first: Vec<Monomial> = (0..self.generator_count())
                .flat_map(|g| {
                    std::iter::once(Monomial::atom(g, MultiIndex::zero(dim)))
                        .chain(std::iter::once(Monomial::atom(g, MultiIndex::unit(dim, 0))))
                })
                .collect();
            let mut seen = BTreeSet::new();
            for a in &atoms {
                for b in &first {
                    let p = self.mul(&AlgebraElement::from_monomial(a.clone()), &AlgebraElement::from_monomial(b.clone()));
                    if !p.is_zero() && seen.insert(p.terms.keys().next().cloned()) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

fn to_row(v: &AlgebraElement) -> BTreeMap<(std::cmp::Reverse<u32>, Monomial), Q> {
    v.terms.iter().map(|(m, c)| ((std::cmp::Reverse(m.d_degree()), m.clone()), c.clone())).collect()
}

/// All multi-indices of `dim` entries summing to `d`.
pub fn multi_indices_of_degree(dim: usize, d: u32) -> Vec<MultiIndex> {
    fn rec(dim: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if cur.len() + 1 == dim {
            cur.push(d);
            out.push(MultiIndex(cur.clone()));
            cur.pop();
            return;
        }
        for x in (0..=d).rev() {
            cur.push(x);
            rec(dim, d - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, d, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::LieAlgebraSpec;
    use crate::q;

    fn boson() -> Module {
        Module::new(
            Arc::new(HopfAlgebra::abelian(1)),
            ModuleSpec {
                generators: vec![Generator { name: "u".into(), odd: false }],
                kind: ModuleKind::SymmetricAlgebra,
            },
        )
        .unwrap()
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn odd_square_vanishes() {
        let m = Module::new(
            Arc::new(HopfAlgebra::abelian(1)),
            ModuleSpec {
                generators: vec![Generator { name: "psi".into(), odd: true }],
                kind: ModuleKind::SymmetricAlgebra,
            },
        )
        .unwrap();
        let p = m.gen_element(0);
        assert!(m.multiply(&p, &p).unwrap().is_zero());
        let dp = AlgebraElement::atom(0, mi(&[1]));
        let a = m.multiply(&p, &dp).unwrap();
        let b = m.multiply(&dp, &p).unwrap();
        assert_eq!(a, b.scale(&q(-1)));
    }

    #[test]
    fn leibniz_action() {
        let m = boson();
        let u = m.gen_element(0);
        let uu = m.multiply(&u, &u).unwrap();
        let got = m.act(&m.hopf().gen(0), &uu);
        let want = m.multiply(&AlgebraElement::atom(0, mi(&[1])), &u).unwrap().scale(&q(2));
        assert_eq!(got, want);
        assert!(m.act(&m.hopf().gen(0), &AlgebraElement::one()).is_zero());
    }

    #[test]
    fn normal_form_moves_last_slot() {
        let m = boson();
        let mut t = HTensor::zero(2);
        t.add_term(vec![mi(&[0]), mi(&[1])], q(1));
        // (1 ⊗ ∂) ⊗ u = −(∂ ⊗ 1) ⊗ u + (1 ⊗ 1) ⊗ ∂u
        let got = m.normalize(&t, &m.gen_element(0));
        let mut want = PseudoTensor::zero(2);
        want.add_term(vec![mi(&[1])], Monomial::atom(0, mi(&[0])), q(-1));
        want.add_term(vec![mi(&[0])], Monomial::atom(0, mi(&[1])), q(1));
        assert_eq!(got, want);
        assert_eq!(m.fmt_pseudo(&got), "(1|1) @ d[1] u - (d[1]|1) @ u");
    }

    #[test]
    fn quotient_by_total_derivatives() {
        let m = boson();
        let u = m.gen_element(0);
        let du = AlgebraElement::atom(0, mi(&[1]));
        assert!(m.in_augmentation_image(&du));
        // u ∂u = ∂(u²)/2
        assert!(m.in_augmentation_image(&m.multiply(&u, &du).unwrap()));
        assert!(!m.in_augmentation_image(&u));
        let ddu = AlgebraElement::atom(0, mi(&[2]));
        let a = m.multiply(&u, &ddu).unwrap();
        let b = m.multiply(&du, &du).unwrap().scale(&q(-1));
        assert_eq!(m.class(&a), m.class(&b));
    }

    #[test]
    fn heisenberg_action_on_free_module() {
        let h = Arc::new(HopfAlgebra::new(LieAlgebraSpec::heisenberg(1)));
        let m = Module::new(
            h,
            ModuleSpec { generators: vec![Generator { name: "e".into(), odd: false }], kind: ModuleKind::Free },
        )
        .unwrap();
        let e1 = AlgebraElement::atom(0, mi(&[0, 1, 0]));
        let got = m.act(&m.hopf().gen(2), &e1);
        let want = AlgebraElement::from_terms([
            (Monomial::atom(0, mi(&[0, 1, 1])), q(1)),
            (Monomial::atom(0, mi(&[1, 0, 0])), q(-1)),
        ]);
        assert_eq!(got, want);
        assert_eq!(m.multiply(&e1, &e1), Err(Error::NoProduct));
    }
}
