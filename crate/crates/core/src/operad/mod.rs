//! The operad of graph-indexed `H`-polylinear maps on `ΠV`.
//!
//! An element `Y` of arity `n` assigns to every `n`-graph `Γ` with `s`
//! connected components a map `(ΠV)^{⊗n} → H^{⊗s} ⊗_H ΠV`, vanishing on graphs
//! with cycles. Elements are evaluated lazily through closures; compositions,
//! the symmetric group action and Lie brackets build new closures.
//!
//! Parities: every sign in this module uses the parity `p̄ = 1 − p` of `ΠV`,
//! except where a vector acts by multiplication in `V`.

mod axioms;
mod circle;
mod cochain;
mod master;
mod samples;
mod star;
mod wlie;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::One;

pub use axioms::{check_cycle_condition, check_linearity, cyclic_probe_graphs};
pub use circle::{compose, compose_many, compose_reversed};
pub use cochain::CochainConfig;
pub use master::{
    check_master, g_graphs, master_from_bracket, master_from_parts, ProductFn, master_from_pseudoalgebra, CaseReport, MasterReport,
};
pub use samples::{generator_tuple, SamplePool};
pub use star::{
    check_variational_leibniz, phi, star_bracket, star_box_product, star_compose, star_master, StarElement,
    StarFn,
};
pub use wlie::{ad, box_product, bracket, check_invariance, grade_component, grade_decompose};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::hmodule::{AlgebraElement, Module, Monomial, PseudoTensor};
use crate::perm::Perm;
use crate::Q;

/// Evaluation on an acyclic graph and monomial arguments.
pub type EvalFn = Arc<dyn Fn(&Graph, &[Monomial]) -> PseudoTensor + Send + Sync>;

type Cache = Arc<RwLock<HashMap<(Graph, Vec<Monomial>), PseudoTensor>>>;

#[derive(Clone)]
pub struct OperadElement {
    arity: usize,
    odd: bool,
    module: Arc<Module>,
    label: String,
    eval: EvalFn,
    cache: Cache,
}

impl fmt::Debug for OperadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperadElement({}, arity {}, {})", self.label, self.arity, if self.odd { "odd" } else { "even" })
    }
}

/// Parity of a monomial in `ΠV`.
pub fn pbar(module: &Module, m: &Monomial) -> bool {
    !module.monomial_odd(m)
}

pub(crate) fn sign(neg: bool) -> Q {
    if neg {
        -Q::one()
    } else {
        Q::one()
    }
}

/// Output arity of an element evaluated on `Γ`: the number of components.
pub fn output_arity(g: &Graph) -> usize {
    if g.n() == 0 {
        0
    } else {
        g.component_count()
    }
}

impl OperadElement {
    /// Wrap a closure. `f` sees only acyclic graphs with `arity` vertices and
    /// monomial arguments; linearity and the cycle condition are supplied here.
    pub fn from_fn(module: Arc<Module>, arity: usize, odd: bool, label: &str, f: EvalFn) -> Self {
        OperadElement { arity, odd, module, label: label.to_string(), eval: f, cache: Cache::default() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Parity `p̄(Y)`.
    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn module(&self) -> &Arc<Module> {
        &self.module
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// `Y^Γ(m₁ ⊗ ⋯ ⊗ mₙ)` on monomials; zero on graphs with cycles.
    pub fn eval_monomials(&self, g: &Graph, args: &[Monomial]) -> PseudoTensor {
        if !g.is_acyclic() {
            return PseudoTensor::zero(output_arity(g));
        }
        let key = (g.clone(), args.to_vec());
        if let Some(v) = self.cache.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return v.clone();
        }
        let v = (self.eval)(g, args);
        debug_assert_eq!(v.arity(), output_arity(g), "{} returned a wrong arity", self.label);
        self.cache.write().unwrap_or_else(|e| e.into_inner()).insert(key, v.clone());
        v
    }

    /// `Y^Γ(v₁ ⊗ ⋯ ⊗ vₙ)`, extended multilinearly.
    pub fn eval(&self, g: &Graph, args: &[AlgebraElement]) -> Result<PseudoTensor> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: args.len() });
        }
        if g.n() != self.arity {
            return Err(Error::SizeMismatch { expected: self.arity, found: g.n() });
        }
        Ok(self.eval_unchecked(g, args))
    }

    pub(crate) fn eval_unchecked(&self, g: &Graph, args: &[AlgebraElement]) -> PseudoTensor {
        let mut out = PseudoTensor::zero(output_arity(g));
        if !g.is_acyclic() {
            return out;
        }
        for_each_monomial_tuple(args, |ms, c| {
            out.add_scaled(&self.eval_monomials(g, ms), c);
        });
        out
    }

    /// The identity `1 ∈ P(1)`.
    pub fn unit(module: Arc<Module>) -> Self {
        let f: EvalFn = Arc::new(|_g, args| PseudoTensor::from_vector(&AlgebraElement::from_monomial(args[0].clone())));
        Self::from_fn(module, 1, false, "1", f)
    }

    /// The zero element of a given arity and parity.
    pub fn zero(module: Arc<Module>, arity: usize, odd: bool) -> Self {
        let f: EvalFn = Arc::new(|g, _| PseudoTensor::zero(output_arity(g)));
        Self::from_fn(module, arity, odd, "0", f)
    }

    /// An element of arity 0: the class of `v` in `V/H₊V`. Its parity in `ΠV`
    /// is opposite to that of `v`, which must be homogeneous.
    pub fn class(module: Arc<Module>, v: &AlgebraElement) -> Result<Self> {
        let p = module
            .parity(v)
            .ok_or_else(|| Error::Validation("a class must be parity-homogeneous".into()))?;
        let t = module.class(v);
        let f: EvalFn = Arc::new(move |_g, _| t.clone());
        Ok(Self::from_fn(module, 0, !p, "class", f))
    }

    /// An `H`-linear map `V → V` of arity 1 given on monomials.
    pub fn linear_map(
        module: Arc<Module>,
        odd: bool,
        label: &str,
        f: impl Fn(&Monomial) -> AlgebraElement + Send + Sync + 'static,
    ) -> Self {
        let e: EvalFn = Arc::new(move |_g, args| PseudoTensor::from_vector(&f(&args[0])));
        Self::from_fn(module, 1, odd, label, e)
    }

    /// The derivation with `D(uᵢ) = images[i]`, `D(∂^I u) = ∂^I D(u)`,
    /// extended by `D(ab) = D(a)b + (−1)^{p(a)p̄(D)} a D(b)`.
    pub fn derivation(module: Arc<Module>, odd: bool, images: Vec<AlgebraElement>) -> Result<Self> {
        if images.len() != module.generator_count() {
            return Err(Error::SizeMismatch { expected: module.generator_count(), found: images.len() });
        }
        for (g, im) in images.iter().enumerate() {
            if let Some(p) = module.parity(im) {
                if !im.is_zero() && p != (module.gen_odd(g) ^ odd) {
                    return Err(Error::Validation(format!("image of generator {g} has the wrong parity")));
                }
            } else {
                return Err(Error::Validation("derivation images must be homogeneous".into()));
            }
        }
        let m = Arc::clone(&module);
        let f = move |mono: &Monomial| derive(&m, odd, &images, mono);
        Ok(Self::linear_map(module, odd, "derivation", f))
    }

    /// The Euler operator: multiplication by polynomial degree.
    pub fn euler(module: Arc<Module>) -> Self {
        Self::linear_map(module, false, "euler", |m| {
            AlgebraElement::from_monomial(m.clone()).scale(&Q::from_integer(m.len().into()))
        })
    }

    /// Projection onto polynomial degree `k`; not a derivation for `k ≥ 1`.
    pub fn degree_projection(module: Arc<Module>, k: usize) -> Self {
        Self::linear_map(module, false, &format!("proj{k}"), move |m| {
            if m.len() == k {
                AlgebraElement::from_monomial(m.clone())
            } else {
                AlgebraElement::zero()
            }
        })
    }

    /// The algebra endomorphism with `φ(uᵢ) = images[i]` (even images of matching parity).
    pub fn algebra_endomorphism(module: Arc<Module>, images: Vec<AlgebraElement>) -> Result<Self> {
        if images.len() != module.generator_count() {
            return Err(Error::SizeMismatch { expected: module.generator_count(), found: images.len() });
        }
        for (g, im) in images.iter().enumerate() {
            if !im.is_zero() && module.parity(im) != Some(module.gen_odd(g)) {
                return Err(Error::Validation(format!("image of generator {g} has the wrong parity")));
            }
        }
        let m = Arc::clone(&module);
        let f = move |mono: &Monomial| {
            let mut acc = AlgebraElement::one();
            for a in &mono.0 {
                let img = m.act(&crate::hopf::HopfElement::mono(a.idx.clone()), &images[a.gen]);
                acc = m.mul(&acc, &img);
            }
            acc
        };
        Ok(Self::linear_map(module, false, "endomorphism", f))
    }

    /// `self + other`.
    pub fn add(&self, other: &OperadElement) -> Result<Self> {
        self.combine(other, &Q::one())
    }

    /// `self + c · other`.
    pub fn combine(&self, other: &OperadElement, c: &Q) -> Result<Self> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: other.arity });
        }
        if self.odd != other.odd {
            return Err(Error::Validation("cannot add elements of different parity".into()));
        }
        let (a, b, c) = (self.clone(), other.clone(), c.clone());
        let f: EvalFn = Arc::new(move |g, args| {
            let mut t = a.eval_monomials(g, args);
            t.add_scaled(&b.eval_monomials(g, args), &c);
            t
        });
        Ok(Self::from_fn(Arc::clone(&self.module), self.arity, self.odd, &format!("({} + {})", self.label, other.label), f))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let (a, c) = (self.clone(), c.clone());
        let f: EvalFn = Arc::new(move |g, args| a.eval_monomials(g, args).scale(&c));
        Self::from_fn(Arc::clone(&self.module), self.arity, self.odd, &self.label, f)
    }

    /// The restriction to graphs satisfying `keep`, zero elsewhere.
    pub fn restrict(&self, label: &str, keep: impl Fn(&Graph) -> bool + Send + Sync + 'static) -> Self {
        let a = self.clone();
        let f: EvalFn = Arc::new(move |g, args| {
            if keep(g) {
                a.eval_monomials(g, args)
            } else {
                PseudoTensor::zero(output_arity(g))
            }
        });
        Self::from_fn(Arc::clone(&self.module), self.arity, self.odd, label, f)
    }

    /// The right action `Y^σ`:
    /// `(Y^σ)^Γ(v) = (σ̃ ⊗_H 1)(Y^{σΓ}(σv))`, `σv = ε_v(σ) v_{σ⁻¹(1)} ⊗ ⋯ ⊗ v_{σ⁻¹(n)}`.
    pub fn permute(&self, sigma: &Perm) -> Result<Self> {
        if sigma.len() != self.arity {
            return Err(Error::SizeMismatch { expected: self.arity, found: sigma.len() });
        }
        if sigma.is_identity() {
            return Ok(self.clone());
        }
        let (a, s) = (self.clone(), sigma.clone());
        let module = Arc::clone(&self.module);
        let f: EvalFn = Arc::new(move |g, args| {
            let moved = g.permute(&s).expect("sizes agree");
            let tilde = g.tilde_sigma(&s).expect("sizes agree");
            let (permuted, neg) = permute_args(&module, &s, args);
            let t = a.eval_monomials(&moved, &permuted);
            let t = module.permute_slots(&tilde, &t).expect("component count agrees");
            if neg {
                t.neg()
            } else {
                t
            }
        });
        Ok(Self::from_fn(Arc::clone(&self.module), self.arity, self.odd, &format!("{}^{}", self.label, sigma), f))
    }
}

/// `σv` with its Koszul sign computed from `p̄`.
pub(crate) fn permute_args(module: &Module, sigma: &Perm, args: &[Monomial]) -> (Vec<Monomial>, bool) {
    let mut out = args.to_vec();
    for (i, m) in args.iter().enumerate() {
        out[sigma.apply0(i)] = m.clone();
    }
    let mut neg = false;
    for (i, j) in sigma.inversions() {
        if pbar(module, &args[i]) && pbar(module, &args[j]) {
            neg = !neg;
        }
    }
    (out, neg)
}

/// Call `f` on every tuple of monomials drawn from `args`, with the product coefficient.
pub(crate) fn for_each_monomial_tuple(args: &[AlgebraElement], mut f: impl FnMut(&[Monomial], &Q)) {
    let lists: Vec<Vec<(&Monomial, &Q)>> = args.iter().map(|a| a.terms().iter().collect()).collect();
    if lists.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; lists.len()];
    let mut ms: Vec<Monomial> = Vec::with_capacity(lists.len());
    loop {
        ms.clear();
        let mut c = Q::one();
        for (l, &i) in lists.iter().zip(&idx) {
            ms.push(l[i].0.clone());
            c *= l[i].1;
        }
        f(&ms, &c);
        let mut k = lists.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < lists[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn derive(module: &Module, odd: bool, images: &[AlgebraElement], m: &Monomial) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    let mut passed_odd = false;
    for (i, a) in m.0.iter().enumerate() {
        let img = module.act(&crate::hopf::HopfElement::mono(a.idx.clone()), &images[a.gen]);
        let before = AlgebraElement::from_monomial(Monomial(m.0[..i].to_vec()));
        let after = AlgebraElement::from_monomial(Monomial(m.0[i + 1..].to_vec()));
        let term = module.mul(&module.mul(&before, &img), &after);
        out = out.add(&term.scale(&sign(odd && passed_odd)));
        if module.gen_odd(a.gen) {
            passed_odd = !passed_odd;
        }
    }
    out
}

/// A fixed battery of graphs and arguments on which elements are compared.
#[derive(Clone, Debug)]
pub struct ProbeSuite {
    /// Generators first, then derivatives and degree-2 products.
    pub vectors: Vec<AlgebraElement>,
    pub generators: usize,
    /// Cap on argument tuples per graph. Beyond it, all tuples of generators
    /// are kept (up to the cap) and the rest is a seeded sample.
    pub max_tuples: usize,
    /// Cap on graphs per arity; larger sets are sampled with the seed.
    pub max_graphs: usize,
    pub seed: u64,
}

impl ProbeSuite {
    pub fn new(module: &Module, degree: usize, seed: u64) -> Self {
        ProbeSuite {
            vectors: module.probe_vectors(degree),
            generators: module.generator_count(),
            max_tuples: 64,
            max_graphs: 64,
            seed,
        }
    }

    /// Argument tuples for arity `n`.
    pub fn tuples(&self, n: usize) -> Vec<Vec<AlgebraElement>> {
        let k = self.vectors.len();
        let all = |base: usize| -> Vec<Vec<usize>> {
            let total = base.pow(n as u32);
            (0..total)
                .map(|mut x| {
                    let mut t = vec![0; n];
                    for slot in t.iter_mut().rev() {
                        *slot = x % base;
                        x /= base;
                    }
                    t
                })
                .collect()
        };
        use rand::Rng;
        let fits = |base: usize| (base as u128).checked_pow(n as u32).is_some_and(|t| t <= self.max_tuples as u128);
        let idx: Vec<Vec<usize>> = if fits(k) {
            all(k)
        } else {
            let mut rng = self.rng(n as u64);
            let mut out: std::collections::BTreeSet<Vec<usize>> = if fits(self.generators) {
                all(self.generators).into_iter().collect()
            } else {
                Default::default()
            };
            let mut attempts = 0;
            while out.len() < self.max_tuples && attempts < 16 * self.max_tuples {
                out.insert((0..n).map(|_| rng.gen_range(0..k)).collect());
                attempts += 1;
            }
            out.into_iter().collect()
        };
        idx.into_iter().map(|t| t.into_iter().map(|i| self.vectors[i].clone()).collect()).collect()
    }

    /// Acyclic `n`-graphs to probe: all of them, or a seeded sample that always
    /// contains the edgeless graph.
    pub fn graphs(&self, n: usize) -> Vec<Graph> {
        use rand::seq::SliceRandom;
        let all = probe_graphs(n);
        if all.len() <= self.max_graphs {
            return all;
        }
        let mut rng = self.rng(1000 + n as u64);
        let mut pick: Vec<Graph> = all.choose_multiple(&mut rng, self.max_graphs - 1).cloned().collect();
        let edgeless = Graph::edgeless(n);
        if !pick.contains(&edgeless) {
            pick.push(edgeless);
        }
        pick.sort();
        pick
    }

    fn rng(&self, salt: u64) -> rand_chacha::ChaCha8Rng {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
    }
}

/// A graph and arguments on which two elements differ.
#[derive(Clone, Debug)]
pub struct Witness {
    pub graph: Graph,
    pub args: Vec<AlgebraElement>,
    pub value: PseudoTensor,
}

/// All acyclic `n`-graphs, memoized per `n`.
pub fn probe_graphs(n: usize) -> Vec<Graph> {
    use std::sync::{Mutex, OnceLock};
    static MEMO: OnceLock<Mutex<HashMap<usize, Vec<Graph>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(v) = memo.lock().unwrap_or_else(|e| e.into_inner()).get(&n) {
        return v.clone();
    }
    let v = Graph::enumerate_acyclic(n, 6).expect("arity within enumeration bound");
    memo.lock().unwrap_or_else(|e| e.into_inner()).insert(n, v.clone());
    v
}

/// First place where `y` is nonzero on the suite, if any.
pub fn find_nonzero(y: &OperadElement, suite: &ProbeSuite) -> Option<Witness> {
    use rayon::prelude::*;
    let graphs = suite.graphs(y.arity());
    let tuples = suite.tuples(y.arity());
    let jobs: Vec<(usize, usize)> =
        (0..graphs.len()).flat_map(|g| (0..tuples.len()).map(move |t| (g, t))).collect();
    jobs.par_iter()
        .find_map_first(|&(gi, ti)| {
            let v = y.eval_unchecked(&graphs[gi], &tuples[ti]);
            if v.is_zero() {
                None
            } else {
                Some(Witness { graph: graphs[gi].clone(), args: tuples[ti].clone(), value: v })
            }
        })
}

/// First place where `a` and `b` differ.
pub fn find_difference(a: &OperadElement, b: &OperadElement, suite: &ProbeSuite) -> Result<Option<Witness>> {
    let d = a.combine(b, &-Q::one())?;
    Ok(find_nonzero(&d, suite))
}

pub fn fmt_witness(module: &Module, w: &Witness) -> String {
    let args: Vec<String> = w.args.iter().map(|a| module.fmt_element(a)).collect();
    format!("graph [{}], args ({}): {}", w.graph, args.join(", "), module.fmt_pseudo(&w.value))
}
