//! Lie pseudoalgebras and Poisson pseudoalgebras given by a bracket table on
//! generators.
//!
//! The bracket `[a * b] ∈ H^{⊗2} ⊗_H V` is extended from generators by
//! `H`-bilinearity `[ha * gb] = ((h ⊗ g) ⊗_H 1)[a * b]` and, on `S(H ⊗ g)`,
//! by the iterated Leibniz rule.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hmodule::{AlgebraElement, Atom, Generator, Module, ModuleKind, ModuleSpec, Monomial, PseudoTensor};
use crate::hopf::{add_to_map, format_q, HTensor, HopfAlgebra, HopfElement, LieAlgebraSpec, MultiIndex};
use crate::parse::{parse_hopf, parse_pseudo, parse_rational};
use crate::perm::Perm;
use crate::Q;

/// A pseudoalgebra: module, bracket table on generators, and memoized extension.
#[derive(Debug)]
pub struct PseudoAlgebra {
    name: String,
    module: Arc<Module>,
    /// `table[a][b] = [a * b]` in normal form.
    table: Vec<Vec<PseudoTensor>>,
    central: BTreeMap<String, Q>,
    cache: RwLock<HashMap<(Monomial, Monomial), PseudoTensor>>,
}

fn sign(neg: bool) -> Q {
    if neg {
        -Q::one()
    } else {
        Q::one()
    }
}

impl PseudoAlgebra {
    /// Build from generator brackets. Missing entries `[b * a]` are completed
    /// by skewsymmetry from `[a * b]`; pairs with neither entry bracket to zero.
    pub fn new(
        name: &str,
        module: Arc<Module>,
        entries: BTreeMap<(usize, usize), PseudoTensor>,
        central: BTreeMap<String, Q>,
    ) -> Result<Self> {
        let n = module.generator_count();
        let mut table = vec![vec![PseudoTensor::zero(2); n]; n];
        for ((a, b), t) in &entries {
            if *a >= n || *b >= n {
                return Err(Error::Validation(format!("bracket entry ({a}, {b}) names no generator")));
            }
            if t.arity() != 2 {
                return Err(Error::ArityMismatch { expected: 2, found: t.arity() });
            }
            table[*a][*b] = t.clone();
        }
        let swap = Perm::from_cycles(2, &[&[1, 2]]).unwrap();
        for ((a, b), t) in &entries {
            if !entries.contains_key(&(*b, *a)) {
                let odd = module.gen_odd(*a) && module.gen_odd(*b);
                let s = module.permute_slots(&swap, t)?;
                table[*b][*a] = s.scale(&sign(!odd));
            }
        }
        // brackets must land in V with the parity p(a) + p(b)
        for a in 0..n {
            for b in 0..n {
                let want = module.gen_odd(a) ^ module.gen_odd(b);
                for (_, m) in table[a][b].terms().keys() {
                    if module.monomial_odd(m) != want {
                        return Err(Error::Validation(format!(
                            "[{} * {}] is not of parity {}",
                            module.spec().generators[a].name,
                            module.spec().generators[b].name,
                            if want { "odd" } else { "even" }
                        )));
                    }
                    if !module.has_product() && m.len() != 1 {
                        return Err(Error::Validation("a free module bracket must be linear in generators".into()));
                    }
                }
            }
        }
        Ok(PseudoAlgebra { name: name.to_string(), module, table, central, cache: RwLock::default() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn module(&self) -> &Arc<Module> {
        &self.module
    }

    pub fn hopf(&self) -> &Arc<HopfAlgebra> {
        self.module.hopf()
    }

    pub fn central(&self) -> &BTreeMap<String, Q> {
        &self.central
    }

    pub fn is_poisson(&self) -> bool {
        self.module.has_product()
    }

    /// `[a * b]` on generators.
    pub fn table_entry(&self, a: usize, b: usize) -> &PseudoTensor {
        &self.table[a][b]
    }

    /// `[∂^I a * ∂^J b] = ((∂^I ⊗ ∂^J) ⊗_H 1)[a * b]`.
    pub fn bracket_atoms(&self, x: &Atom, y: &Atom) -> PseudoTensor {
        let base = &self.table[x.gen][y.gen];
        if x.idx.is_zero() && y.idx.is_zero() {
            return base.clone();
        }
        let hopf = self.hopf();
        let mut out = PseudoTensor::zero(2);
        for ((slots, m), c) in base.terms() {
            for (f, d) in hopf.mul_mono(&x.idx, &slots[0]).terms() {
                let s2 = [f.clone(), y.idx.clone()];
                self.module.normalize_into(&mut out, &s2, m, &(c * d));
            }
        }
        out
    }

    /// Bracket of monomials by the iterated Leibniz rule:
    /// `[A * B] = Σ εᵢⱼ (A∖aᵢ)[aᵢ * bⱼ](B∖bⱼ)` with
    /// `εᵢⱼ = (−1)^{p(aᵢ)(p(aᵢ₊₁)+⋯+p(a_m)) + p(bⱼ)(p(b₁)+⋯+p(bⱼ₋₁))}`.
    pub fn bracket_monomials(&self, a: &Monomial, b: &Monomial) -> PseudoTensor {
        if a.is_unit() || b.is_unit() {
            return PseudoTensor::zero(2);
        }
        if a.len() == 1 && b.len() == 1 {
            return self.bracket_atoms(&a.0[0], &b.0[0]);
        }
        let key = (a.clone(), b.clone());
        if let Some(v) = self.cache.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return v.clone();
        }
        let m = &self.module;
        let odd = |x: &Atom| m.gen_odd(x.gen);
        let mut out = PseudoTensor::zero(2);
        for (i, ai) in a.0.iter().enumerate() {
            let after = a.0[i + 1..].iter().filter(|x| odd(x)).count();
            let a_rest = Monomial(a.0.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, x)| x.clone()).collect());
            for (j, bj) in b.0.iter().enumerate() {
                let before = b.0[..j].iter().filter(|x| odd(x)).count();
                let e = (odd(ai) && after % 2 == 1) ^ (odd(bj) && before % 2 == 1);
                let b_rest = Monomial(b.0.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect());
                let core = self.bracket_atoms(ai, bj);
                let right = m.mul_right(&core, &AlgebraElement::from_monomial(b_rest)).expect("symmetric algebra");
                let full = m.dot_slot(&AlgebraElement::from_monomial(a_rest.clone()), 1, &right).expect("symmetric algebra");
                out.add_scaled(&full, &sign(e));
            }
        }
        self.cache.write().unwrap_or_else(|e| e.into_inner()).insert(key, out.clone());
        out
    }

    /// `[a * b]`, bilinear in both arguments.
    pub fn bracket(&self, a: &AlgebraElement, b: &AlgebraElement) -> PseudoTensor {
        let mut out = PseudoTensor::zero(2);
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                out.add_scaled(&self.bracket_monomials(ma, mb), &(ca * cb));
            }
        }
        out
    }

    /// Checked bracket: free modules only accept linear inputs.
    pub fn try_bracket(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<PseudoTensor> {
        if !self.is_poisson() {
            for v in [a, b] {
                if v.terms().keys().any(|m| m.len() != 1) {
                    return Err(Error::NoProduct);
                }
            }
        }
        Ok(self.bracket(a, b))
    }

    /// `[[a * b] * c] = Σ (fᵢ fᵢⱼ₍₁₎ ⊗ fᵢⱼ₍₂₎ ⊗ 1) ⊗_H eᵢⱼ`.
    pub fn compose_left(&self, a: &AlgebraElement, b: &AlgebraElement, c: &AlgebraElement) -> PseudoTensor {
        let hopf = self.hopf();
        let mut out = PseudoTensor::zero(3);
        for ((s1, e), k1) in self.bracket(a, b).terms() {
            let inner = self.bracket(&AlgebraElement::from_monomial(e.clone()), c);
            for ((s2, e2), k2) in inner.terms() {
                for (legs, d) in hopf.mono_coproduct(&s2[0], 2) {
                    let prod = hopf.mul_mono(&s1[0], &legs[0]);
                    for (f, x) in prod.terms() {
                        let slots = vec![f.clone(), legs[1].clone()];
                        add_to_map_pt(&mut out, slots, e2.clone(), k1 * k2 * &d * x);
                    }
                }
            }
        }
        out
    }

    /// `[a * [b * c]] = Σ (hᵢⱼ ⊗ hᵢ ⊗ 1) ⊗_H dᵢⱼ`.
    pub fn compose_right(&self, a: &AlgebraElement, b: &AlgebraElement, c: &AlgebraElement) -> PseudoTensor {
        let mut out = PseudoTensor::zero(3);
        for ((s1, d1), k1) in self.bracket(b, c).terms() {
            let inner = self.bracket(a, &AlgebraElement::from_monomial(d1.clone()));
            for ((s2, d2), k2) in inner.terms() {
                add_to_map_pt(&mut out, vec![s2[0].clone(), s1[0].clone()], d2.clone(), k1 * k2);
            }
        }
        out
    }

    fn homogeneous_parts(&self, v: &AlgebraElement) -> Vec<(AlgebraElement, bool)> {
        let (e, o) = self.module.split_parity(v);
        let mut out = Vec::new();
        if !e.is_zero() {
            out.push((e, false));
        }
        if !o.is_zero() {
            out.push((o, true));
        }
        out
    }

    /// `[b * a] + (−1)^{p(a)p(b)} (σ ⊗_H 1)[a * b]`.
    pub fn skew_residual(&self, a: &AlgebraElement, b: &AlgebraElement) -> PseudoTensor {
        let swap = Perm::from_cycles(2, &[&[1, 2]]).unwrap();
        let mut out = PseudoTensor::zero(2);
        for (a, pa) in self.homogeneous_parts(a) {
            for (b, pb) in self.homogeneous_parts(b) {
                out.add_assign(&self.bracket(&b, &a));
                let s = self.module.permute_slots(&swap, &self.bracket(&a, &b)).unwrap();
                out.add_scaled(&s, &sign(pa && pb));
            }
        }
        out
    }

    /// `[a * [b * c]] − (−1)^{p(a)p(b)} (σ₁₂ ⊗_H 1)[b * [a * c]] − [[a * b] * c]`.
    pub fn jacobi_residual(&self, a: &AlgebraElement, b: &AlgebraElement, c: &AlgebraElement) -> PseudoTensor {
        let swap = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let mut out = PseudoTensor::zero(3);
        for (a, pa) in self.homogeneous_parts(a) {
            for (b, pb) in self.homogeneous_parts(b) {
                out.add_assign(&self.compose_right(&a, &b, c));
                let t = self.module.permute_slots(&swap, &self.compose_right(&b, &a, c)).unwrap();
                out.add_scaled(&t, &-sign(pa && pb));
                out.add_scaled(&self.compose_left(&a, &b, c), &-Q::one());
            }
        }
        out
    }

    /// `[a * bc] − [a * b]c − (−1)^{p(b)p(c)}[a * c]b`.
    pub fn left_leibniz_residual(&self, a: &AlgebraElement, b: &AlgebraElement, c: &AlgebraElement) -> Result<PseudoTensor> {
        let m = &self.module;
        let mut out = PseudoTensor::zero(2);
        for (b, pb) in self.homogeneous_parts(b) {
            for (c, pc) in self.homogeneous_parts(c) {
                out.add_assign(&self.bracket(a, &m.multiply(&b, &c)?));
                out.add_scaled(&m.mul_right(&self.bracket(a, &b), &c)?, &-Q::one());
                out.add_scaled(&m.mul_right(&self.bracket(a, &c), &b)?, &-sign(pb && pc));
            }
        }
        Ok(out)
    }

    /// `[ab * c] − a[b * c] − (−1)^{p(a)p(b)} b[a * c]`.
    pub fn right_leibniz_residual(&self, a: &AlgebraElement, b: &AlgebraElement, c: &AlgebraElement) -> Result<PseudoTensor> {
        let m = &self.module;
        let mut out = PseudoTensor::zero(2);
        for (a, pa) in self.homogeneous_parts(a) {
            for (b, pb) in self.homogeneous_parts(b) {
                out.add_assign(&self.bracket(&m.multiply(&a, &b)?, c));
                out.add_scaled(&m.mul_left(&a, &self.bracket(&b, c))?, &-Q::one());
                out.add_scaled(&m.mul_left(&b, &self.bracket(&a, c))?, &-sign(pa && pb));
            }
        }
        Ok(out)
    }

    /// The three expressions of the chain identity, all equal to `c[a * b]` up to sign:
    /// `−(−1)^{p(a)p(b)}(σ ⊗ 1)([b * a]c)`, `Σ (fᵢ₍₁₎ ⊗ gᵢ) ⊗_H eᵢ(fᵢ₍₋₂₎c)` and
    /// `(−1)^{(p(a)+p(b))p(c)} c[a * b]`.
    pub fn chain_identity(&self, a: &AlgebraElement, b: &AlgebraElement, c: &AlgebraElement) -> Result<[PseudoTensor; 3]> {
        let m = &self.module;
        let swap = Perm::from_cycles(2, &[&[1, 2]]).unwrap();
        let mut first = PseudoTensor::zero(2);
        let mut second = PseudoTensor::zero(2);
        let mut third = PseudoTensor::zero(2);
        for (a, pa) in self.homogeneous_parts(a) {
            for (b, pb) in self.homogeneous_parts(b) {
                for (c, pc) in self.homogeneous_parts(c) {
                    let ba_c = m.mul_right(&self.bracket(&b, &a), &c)?;
                    first.add_scaled(&m.permute_slots(&swap, &ba_c)?, &-sign(pa && pb));
                    let ab = self.bracket(&a, &b);
                    for ((slots, e), k) in ab.terms() {
                        // (f₍₁₎ ⊗ 1) ⊗_H e(f₍₋₂₎c)
                        for (f1, f2, d) in self.hopf().twisted_legs(&HopfElement::mono(slots[0].clone())) {
                            let moved = m.act(&HopfElement::mono(f2), &c);
                            let w = m.multiply(&AlgebraElement::from_monomial(e.clone()), &moved)?;
                            let mut t = HTensor::zero(2);
                            t.add_term(vec![f1, MultiIndex::zero(m.dim())], k * &d);
                            second.add_assign(&m.normalize(&t, &w));
                        }
                    }
                    third.add_scaled(&m.mul_left(&c, &ab)?, &sign((pa ^ pb) && pc));
                }
            }
        }
        Ok([first, second, third])
    }

    /// The bracket as a closure, for building operad elements.
    pub fn bracket_fn(self: &Arc<Self>) -> BracketFn {
        let me = Arc::clone(self);
        Arc::new(move |a: &AlgebraElement, b: &AlgebraElement| me.bracket(a, b))
    }

    pub fn fmt_table(&self) -> String {
        let names: Vec<&str> = self.module.spec().generators.iter().map(|g| g.name.as_str()).collect();
        let mut out = String::new();
        for (a, na) in names.iter().enumerate() {
            for (b, nb) in names.iter().enumerate() {
                let _ = writeln!(out, "[{na} * {nb}] = {}", self.module.fmt_pseudo(&self.table[a][b]));
            }
        }
        out
    }
}

pub type BracketFn = Arc<dyn Fn(&AlgebraElement, &AlgebraElement) -> PseudoTensor + Send + Sync>;

fn add_to_map_pt(out: &mut PseudoTensor, slots: Vec<MultiIndex>, m: Monomial, c: Q) {
    out.add_term(slots, m, c);
}

/// `Σ λ^I v_I` for `λ = (λ₁,…,λ_N)`, the λ-bracket picture over abelian `H`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LambdaPoly {
    terms: BTreeMap<(MultiIndex, Monomial), Q>,
}

impl LambdaPoly {
    pub fn terms(&self) -> &BTreeMap<(MultiIndex, Monomial), Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `(f(∂) ⊗ 1) ⊗_H v ↦ f(−λ) v`.
pub fn to_lambda(module: &Module, t: &PseudoTensor) -> Result<LambdaPoly> {
    if !module.hopf().is_abelian() {
        return Err(Error::Unsupported("λ-brackets need an abelian Lie algebra".into()));
    }
    if t.arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: t.arity() });
    }
    let mut out = LambdaPoly::default();
    for ((slots, m), c) in t.terms() {
        let s = sign(slots[0].degree() % 2 == 1);
        add_to_map(&mut out.terms, (slots[0].clone(), m.clone()), c * s);
    }
    Ok(out)
}

/// Inverse of [`to_lambda`].
pub fn from_lambda(module: &Module, p: &LambdaPoly) -> Result<PseudoTensor> {
    if !module.hopf().is_abelian() {
        return Err(Error::Unsupported("λ-brackets need an abelian Lie algebra".into()));
    }
    let mut out = PseudoTensor::zero(2);
    for ((i, m), c) in &p.terms {
        out.add_term(vec![i.clone()], m.clone(), c * sign(i.degree() % 2 == 1));
    }
    Ok(out)
}

pub fn fmt_lambda(module: &Module, p: &LambdaPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let dim = module.dim();
    let mut out = String::new();
    for (idx, ((i, m), c)) in p.terms.iter().enumerate() {
        let neg = c < &Q::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        out.push_str(match (idx, neg) {
            (0, true) => "-",
            (0, false) => "",
            (_, true) => " - ",
            (_, false) => " + ",
        });
        let mut factors: Vec<String> = Vec::new();
        for (k, &e) in i.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let var = if dim == 1 { "λ".to_string() } else { format!("λ{}", k + 1) };
            factors.push(if e == 1 { var } else { format!("{var}^{e}") });
        }
        let lam = factors.join(" ");
        let body = match (lam.is_empty(), m.is_unit()) {
            (true, true) => format_q(&mag),
            (true, false) => prefix(&mag, &module.fmt_monomial(m)),
            (false, true) => prefix(&mag, &lam),
            (false, false) => prefix(&mag, &format!("{lam} * {}", module.fmt_monomial(m))),
        };
        out.push_str(&body);
    }
    out
}

fn prefix(c: &Q, body: &str) -> String {
    if c.is_one() {
        body.to_string()
    } else {
        format!("{} {body}", format_q(c))
    }
}

// ---------------------------------------------------------------------------
// JSON configuration

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HopfBracketConfig {
    pub i: usize,
    pub j: usize,
    pub value: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct HopfConfig {
    pub dim: usize,
    #[serde(default)]
    pub brackets: Vec<HopfBracketConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub name: String,
    #[serde(default = "even")]
    pub parity: String,
}

fn even() -> String {
    "even".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BracketConfig {
    pub a: String,
    pub b: String,
    pub value: String,
}

/// On-disk description of a pseudoalgebra.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PseudoAlgebraConfig {
    #[serde(default)]
    pub name: String,
    pub hopf: HopfConfig,
    pub generators: Vec<GeneratorConfig>,
    pub kind: ModuleKind,
    #[serde(default)]
    pub bracket_table: Vec<BracketConfig>,
    #[serde(default)]
    pub central: BTreeMap<String, serde_json::Value>,
}

impl PseudoAlgebraConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse { col: e.column(), msg: format!("line {}: {e}", e.line()) })
    }

    pub fn build(&self) -> Result<PseudoAlgebra> {
        let dim = self.hopf.dim;
        let scratch = HopfAlgebra::abelian(dim.max(1));
        let mut entries = Vec::new();
        for br in &self.hopf.brackets {
            let h = parse_hopf(&scratch, &br.value)?;
            let mut lin = Vec::new();
            for (k, c) in h.terms() {
                if k.degree() != 1 {
                    return Err(Error::Validation(format!("[d{}, d{}] must be linear in the generators", br.i, br.j)));
                }
                lin.push((k.0.iter().position(|&x| x == 1).unwrap(), c.clone()));
            }
            entries.push((br.i, br.j, lin));
        }
        let hopf = Arc::new(HopfAlgebra::new(LieAlgebraSpec::new(dim, &entries)?));
        let mut generators = Vec::new();
        for g in &self.generators {
            let odd = match g.parity.as_str() {
                "even" | "0" => false,
                "odd" | "1" => true,
                other => return Err(Error::Validation(format!("parity `{other}` of `{}`", g.name))),
            };
            generators.push(Generator { name: g.name.clone(), odd });
        }
        let module = Arc::new(Module::new(hopf, ModuleSpec { generators, kind: self.kind })?);
        let mut central = BTreeMap::new();
        for (k, v) in &self.central {
            let q = match v {
                serde_json::Value::Number(n) => parse_rational(&n.to_string())?,
                serde_json::Value::String(s) => parse_rational(s)?,
                _ => return Err(Error::Validation(format!("central value of `{k}`"))),
            };
            central.insert(k.clone(), q);
        }
        let mut table = BTreeMap::new();
        for br in &self.bracket_table {
            let a = module.generator(&br.a).ok_or_else(|| Error::UnknownSymbol(br.a.clone()))?;
            let b = module.generator(&br.b).ok_or_else(|| Error::UnknownSymbol(br.b.clone()))?;
            let t = parse_pseudo(&module, &br.value, &central, Some(2))?;
            if table.insert((a, b), t).is_some() {
                return Err(Error::Validation(format!("[{} * {}] given twice", br.a, br.b)));
            }
        }
        PseudoAlgebra::new(&self.name, module, table, central)
    }
}

/// Parse and build in one step.
pub fn load_json(s: &str) -> Result<PseudoAlgebra> {
    PseudoAlgebraConfig::from_json(s)?.build()
}

// ---------------------------------------------------------------------------
// Built-in examples

fn module_of(hopf: LieAlgebraSpec, gens: &[(&str, bool)], kind: ModuleKind) -> Arc<Module> {
    let generators = gens.iter().map(|(n, o)| Generator { name: n.to_string(), odd: *o }).collect();
    Arc::new(Module::new(Arc::new(HopfAlgebra::new(hopf)), ModuleSpec { generators, kind }).expect("valid module"))
}

fn pure2(module: &Module, f: &HopfElement, g: &HopfElement, v: &AlgebraElement) -> PseudoTensor {
    module.normalize(&HTensor::pure(&[f.clone(), g.clone()]), v)
}

/// `[(1⊗a) * (1⊗b)] = (1⊗1)⊗(1⊗[a,b]) + (b⊗1)⊗(1⊗a) − (1⊗a)⊗(1⊗b)` on basis vectors
/// `wᵢ = 1 ⊗ ∂ᵢ`, inside `module` whose first `N` generators are the `wᵢ`.
fn w_bracket(module: &Module, a: usize, b: usize) -> PseudoTensor {
    let hopf = module.hopf();
    let one = hopf.one();
    let mut t = PseudoTensor::zero(2);
    let mut lin = AlgebraElement::zero();
    for (k, c) in hopf.spec().bracket(a, b) {
        lin.add_term(Monomial::atom(*k, MultiIndex::zero(hopf.dim())), c.clone());
    }
    t.add_assign(&pure2(module, &one, &one, &lin));
    t.add_assign(&pure2(module, &hopf.gen(b), &one, &module.gen_element(a)));
    t.add_assign(&pure2(module, &one, &hopf.gen(a), &module.gen_element(b)).neg());
    t
}

fn all_pairs(n: usize, f: impl Fn(usize, usize) -> PseudoTensor) -> BTreeMap<(usize, usize), PseudoTensor> {
    let mut out = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            out.insert((a, b), f(a, b));
        }
    }
    out
}

fn w_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("w{i}")).collect()
}

/// `W(d) = H ⊗ d` as a free module.
pub fn w_d(d: LieAlgebraSpec) -> PseudoAlgebra {
    let n = d.dim();
    let names = w_names(n);
    let gens: Vec<(&str, bool)> = names.iter().map(|s| (s.as_str(), false)).collect();
    let module = module_of(d, &gens, ModuleKind::Free);
    let table = all_pairs(n, |a, b| w_bracket(&module, a, b));
    PseudoAlgebra::new(&format!("W_d(N={n})"), module, table, BTreeMap::new()).expect("W(d)")
}

/// `W(d)` for `d` two-dimensional with `[∂₁,∂₂] = ∂₂`.
pub fn w_d_nonabelian() -> PseudoAlgebra {
    let d = LieAlgebraSpec::new(2, &[(0, 1, vec![(1, Q::one())])]).unwrap();
    let mut w = w_d(d);
    w.name = "W_d(N=2, nonabelian)".into();
    w
}

/// Boson: `V = S(F[∂]u)`, `[u * u] = (∂ ⊗ 1) ⊗_H 1`.
pub fn boson() -> PseudoAlgebra {
    let module = module_of(LieAlgebraSpec::abelian(1), &[("u", false)], ModuleKind::SymmetricAlgebra);
    let t = pure2(&module, &module.hopf().gen(0), &module.hopf().one(), &AlgebraElement::one());
    PseudoAlgebra::new("boson", module, [((0, 0), t)].into_iter().collect(), BTreeMap::new()).unwrap()
}

/// Fermion: one odd generator `ψ`, `[ψ * ψ] = (1 ⊗ 1) ⊗_H 1`.
pub fn fermion() -> PseudoAlgebra {
    let module = module_of(LieAlgebraSpec::abelian(1), &[("psi", true)], ModuleKind::SymmetricAlgebra);
    let one = module.hopf().one();
    let t = pure2(&module, &one, &one, &AlgebraElement::one());
    PseudoAlgebra::new("fermion", module, [((0, 0), t)].into_iter().collect(), BTreeMap::new()).unwrap()
}

/// Affine: `[a * b] = (1 ⊗ 1) ⊗_H [a,b] + κ(a,b)(∂ ⊗ 1) ⊗_H 1` over `F[∂]`.
///
/// `structure[a][b]` lists `[a,b]` in the basis of `g`; `kappa` must be
/// symmetric and invariant. Panics otherwise; see [`try_affine`].
pub fn affine(names: &[&str], structure: &[Vec<Vec<(usize, Q)>>], kappa: &[Vec<Q>]) -> PseudoAlgebra {
    try_affine(names, structure, kappa).expect("invariant symmetric form")
}

/// Checks `κ(a,b) = κ(b,a)` and `κ([a,b],c) = κ(a,[b,c])` on basis triples.
pub fn check_invariant_form(structure: &[Vec<Vec<(usize, Q)>>], kappa: &[Vec<Q>]) -> Result<()> {
    let n = kappa.len();
    let pair = |lin: &[(usize, Q)], c: usize, left: bool| -> Q {
        lin.iter().map(|(k, x)| x * if left { &kappa[*k][c] } else { &kappa[c][*k] }).sum()
    };
    for a in 0..n {
        for b in 0..n {
            if kappa[a][b] != kappa[b][a] {
                return Err(Error::Validation(format!("κ is not symmetric at ({a},{b})")));
            }
            for c in 0..n {
                if pair(&structure[a][b], c, true) != pair(&structure[b][c], a, false) {
                    return Err(Error::Validation(format!("κ([a,b],c) ≠ κ(a,[b,c]) at ({a},{b},{c})")));
                }
            }
        }
    }
    Ok(())
}

pub fn try_affine(names: &[&str], structure: &[Vec<Vec<(usize, Q)>>], kappa: &[Vec<Q>]) -> Result<PseudoAlgebra> {
    if structure.len() != names.len() || kappa.len() != names.len() {
        return Err(Error::Validation("structure constants and form must match the basis".into()));
    }
    check_invariant_form(structure, kappa)?;
    let gens: Vec<(&str, bool)> = names.iter().map(|s| (*s, false)).collect();
    let module = module_of(LieAlgebraSpec::abelian(1), &gens, ModuleKind::SymmetricAlgebra);
    let hopf = module.hopf().clone();
    let table = all_pairs(names.len(), |a, b| {
        let mut lin = AlgebraElement::zero();
        for (k, c) in &structure[a][b] {
            lin.add_term(Monomial::atom(*k, MultiIndex::zero(1)), c.clone());
        }
        let mut t = pure2(&module, &hopf.one(), &hopf.one(), &lin);
        t.add_assign(&pure2(&module, &hopf.gen(0), &hopf.one(), &AlgebraElement::one()).scale(&kappa[a][b]));
        t
    });
    PseudoAlgebra::new("affine", module, table, BTreeMap::new())
}

/// Affine algebra of the one-dimensional `g` with `β(a,a) = ∂`.
pub fn affine_1d() -> PseudoAlgebra {
    affine(&["a"], &[vec![vec![]]], &[vec![Q::one()]])
}

/// Affine `sl₂` at level 1 with the trace form `κ(e,f) = κ(f,e) = 1`, `κ(h,h) = 2`.
pub fn affine_sl2() -> PseudoAlgebra {
    let q = |n: i64| Q::from_integer(n.into());
    // basis e, h, f: [e,f] = h, [h,e] = 2e, [h,f] = −2f
    let mut s = vec![vec![Vec::new(); 3]; 3];
    s[0][2] = vec![(1, q(1))];
    s[2][0] = vec![(1, q(-1))];
    s[1][0] = vec![(0, q(2))];
    s[0][1] = vec![(0, q(-2))];
    s[1][2] = vec![(2, q(-2))];
    s[2][1] = vec![(2, q(2))];
    let kappa = vec![vec![q(0), q(0), q(1)], vec![q(0), q(2), q(0)], vec![q(1), q(0), q(0)]];
    let mut a = affine(&["e", "h", "f"], &s, &kappa);
    a.name = "affine_sl2".into();
    a
}

/// Type W over `d = F∂`: `S(H ⊗ d)` with `[w * w] = W-bracket + (β(∂,∂) ⊗ 1) ⊗_H 1`, `β(∂,∂) = ∂`.
pub fn type_w() -> PseudoAlgebra {
    let module = module_of(LieAlgebraSpec::abelian(1), &[("w", false)], ModuleKind::SymmetricAlgebra);
    let hopf = module.hopf().clone();
    let mut t = w_bracket(&module, 0, 0);
    t.add_assign(&pure2(&module, &hopf.gen(0), &hopf.one(), &AlgebraElement::one()));
    PseudoAlgebra::new("type_W", module, [((0, 0), t)].into_iter().collect(), BTreeMap::new()).unwrap()
}

/// Type K on the 3-dimensional Heisenberg algebra (`[∂₁,∂₂] = ∂₀`):
/// `[e * e] = α ⊗_H e + c(∂₀ ⊗ 1) ⊗_H 1` with
/// `α = 1 ⊗ ∂₀ − ∂₀ ⊗ 1 + ∂₁ ⊗ ∂₂ − ∂₂ ⊗ ∂₁`.
pub fn type_k(c: Q) -> PseudoAlgebra {
    let module = module_of(LieAlgebraSpec::heisenberg(1), &[("e", false)], ModuleKind::SymmetricAlgebra);
    let h = module.hopf().clone();
    let e = module.gen_element(0);
    let one = h.one();
    let mut t = pure2(&module, &one, &h.gen(0), &e);
    t.add_assign(&pure2(&module, &h.gen(0), &one, &e).neg());
    t.add_assign(&pure2(&module, &h.gen(1), &h.gen(2), &e));
    t.add_assign(&pure2(&module, &h.gen(2), &h.gen(1), &e).neg());
    t.add_assign(&pure2(&module, &h.gen(0), &one, &AlgebraElement::one()).scale(&c));
    let mut central = BTreeMap::new();
    central.insert("C".to_string(), c);
    PseudoAlgebra::new("type_K", module, [((0, 0), t)].into_iter().collect(), central).unwrap()
}

/// Look up a built-in example by name.
pub fn builtin(name: &str) -> Option<PseudoAlgebra> {
    Some(match name {
        "boson" => boson(),
        "fermion" => fermion(),
        "affine" => affine_1d(),
        "affine_sl2" => affine_sl2(),
        "w_d1" => w_d(LieAlgebraSpec::abelian(1)),
        "w_d2" => w_d(LieAlgebraSpec::abelian(2)),
        "w_d_nonabelian" => w_d_nonabelian(),
        "type_w" => type_w(),
        "type_k" => type_k(Q::one()),
        _ => return None,
    })
}

pub const BUILTIN_NAMES: &[&str] =
    &["boson", "fermion", "affine", "affine_sl2", "w_d1", "w_d2", "w_d_nonabelian", "type_w", "type_k"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boson_lambda_bracket() {
        let b = boson();
        let u = b.module().gen_element(0);
        let t = b.bracket(&u, &u);
        let l = to_lambda(b.module(), &t).unwrap();
        assert_eq!(fmt_lambda(b.module(), &l), "-λ");
        assert_eq!(from_lambda(b.module(), &l).unwrap(), t);
    }

    #[test]
    fn completion_by_skewsymmetry() {
        let w = w_d(LieAlgebraSpec::abelian(1));
        let m = w.module();
        let x = m.gen_element(0);
        assert!(w.skew_residual(&x, &x).is_zero());
    }

    #[test]
    fn free_module_rejects_products() {
        let w = w_d(LieAlgebraSpec::abelian(1));
        let m = w.module();
        let x = m.gen_element(0);
        let bad = AlgebraElement::one();
        assert!(w.try_bracket(&x, &bad).is_err());
    }
}
