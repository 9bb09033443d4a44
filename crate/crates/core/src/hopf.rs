//! The cocommutative Hopf algebra `H = U(d)` in PBW normal form.
//!
//! `d` is given by structure constants `[∂ᵢ,∂ⱼ] = Σₖ cᵏᵢⱼ ∂ₖ`. Elements are finite
//! sums of ordered monomials `∂^I = ∂₁^{i₁}⋯∂_N^{i_N}` with exact rational
//! coefficients. The abelian case is the polynomial algebra `F[∂₁,…,∂_N]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::RwLock;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::Q;

/// Exponent vector `I = (i₁,…,i_N)` of the PBW monomial `∂^I`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, `None` unless `other ≤ self`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }
}

impl fmt::Display for MultiIndex {
    /// `d[i₁,…,i_N]`, or `1` for the zero index.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "d[{}]", parts.join(","))
    }
}

/// An element of `H`: a finite map `MultiIndex → Q` with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct HopfElement {
    terms: BTreeMap<MultiIndex, Q>,
}

impl HopfElement {
    pub fn zero() -> Self {
        HopfElement { terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::mono(MultiIndex::zero(dim))
    }

    pub fn mono(i: MultiIndex) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(i, Q::one());
        HopfElement { terms }
    }

    /// The generator `∂ᵢ` (0-based `i`).
    pub fn gen(dim: usize, i: usize) -> Self {
        Self::mono(MultiIndex::unit(dim, i))
    }

    pub fn scalar(dim: usize, c: Q) -> Self {
        let mut h = HopfElement::zero();
        h.add_term(MultiIndex::zero(dim), c);
        h
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, Q)>>(it: I) -> Self {
        let mut h = HopfElement::zero();
        for (i, c) in it {
            h.add_term(i, c);
        }
        h
    }

    pub fn add_term(&mut self, i: MultiIndex, c: Q) {
        add_to_map(&mut self.terms, i, c);
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, i: &MultiIndex) -> Q {
        self.terms.get(i).cloned().unwrap_or_else(Q::zero)
    }

    /// Largest PBW degree present, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return HopfElement::zero();
        }
        HopfElement { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn neg(&self) -> Self {
        HopfElement { terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect() }
    }

    pub fn add(&self, other: &HopfElement) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &HopfElement) -> Self {
        self.add(&other.neg())
    }

    fn dims_ok(&self, dim: usize) -> bool {
        self.terms.keys().all(|k| k.dim() == dim)
    }
}

impl fmt::Display for HopfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<(String, Q)> =
            self.terms.iter().map(|(k, c)| (k.to_string(), c.clone())).collect();
        write!(f, "{}", format_linear(&items, " "))
    }
}

/// Render `Σ cᵢ·xᵢ` with the usual sign and unit-coefficient conventions.
pub(crate) fn format_linear(items: &[(String, Q)], joiner: &str) -> String {
    if items.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (body, c)) in items.iter().enumerate() {
        let neg = c < &Q::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if body == "1" {
            out.push_str(&format_q(&mag));
        } else if mag.is_one() {
            out.push_str(body);
        } else {
            out.push_str(&format_q(&mag));
            out.push_str(joiner);
            out.push_str(body);
        }
    }
    out
}

pub(crate) fn format_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// An element of `H^{⊗n}`; arity 0 is a bare scalar stored under the empty key.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HTensor {
    arity: usize,
    terms: BTreeMap<Vec<MultiIndex>, Q>,
}

impl HTensor {
    pub fn zero(arity: usize) -> Self {
        HTensor { arity, terms: BTreeMap::new() }
    }

    pub fn scalar(c: Q) -> Self {
        let mut t = HTensor::zero(0);
        t.add_term(Vec::new(), c);
        t
    }

    /// Expand a pure tensor `h₁ ⊗ ⋯ ⊗ hₙ`.
    pub fn pure(factors: &[HopfElement]) -> Self {
        let mut t = HTensor::zero(factors.len());
        let mut acc: Vec<(Vec<MultiIndex>, Q)> = vec![(Vec::new(), Q::one())];
        for h in factors {
            let mut next = Vec::with_capacity(acc.len() * h.terms.len());
            for (key, c) in &acc {
                for (i, d) in &h.terms {
                    let mut k = key.clone();
                    k.push(i.clone());
                    next.push((k, c * d));
                }
            }
            acc = next;
        }
        for (k, c) in acc {
            t.add_term(k, c);
        }
        t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeMap<Vec<MultiIndex>, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Vec<MultiIndex>, c: Q) {
        debug_assert_eq!(key.len(), self.arity);
        add_to_map(&mut self.terms, key, c);
    }

    pub fn add(&self, other: &HTensor) -> Result<HTensor> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: other.arity });
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> HTensor {
        let mut out = HTensor::zero(self.arity);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    /// Swap of the two legs of an arity-2 tensor.
    pub fn swap(&self) -> HTensor {
        let mut out = HTensor::zero(self.arity);
        for (k, c) in &self.terms {
            let mut k2 = k.clone();
            k2.reverse();
            out.add_term(k2, c.clone());
        }
        out
    }

    /// Contract slots with the product `k₀ · k₁ ⋯` is left to callers; this
    /// returns the scalar of an arity-0 tensor.
    pub fn as_scalar(&self) -> Option<Q> {
        if self.arity != 0 {
            return None;
        }
        Some(self.terms.get(&Vec::new()).cloned().unwrap_or_else(Q::zero))
    }
}

impl fmt::Display for HTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<(String, Q)> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let slots: Vec<String> = k.iter().map(MultiIndex::to_string).collect();
                let body = if self.arity == 0 { "1".to_string() } else { format!("({})", slots.join("|")) };
                (body, c.clone())
            })
            .collect();
        write!(f, "{}", format_linear(&items, " "))
    }
}

/// Structure constants of an `N`-dimensional Lie algebra `d`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieAlgebraSpec {
    dim: usize,
    /// `brackets[i][j]` lists `(k, cᵏᵢⱼ)` with nonzero coefficients.
    brackets: Vec<Vec<Vec<(usize, Q)>>>,
}

impl LieAlgebraSpec {
    pub fn abelian(dim: usize) -> Self {
        LieAlgebraSpec { dim, brackets: vec![vec![Vec::new(); dim]; dim] }
    }

    /// Heisenberg algebra of dimension `2M+1` with `[∂ᵢ, ∂_{M+i}] = ∂₀`.
    pub fn heisenberg(m: usize) -> Self {
        let dim = 2 * m + 1;
        let mut entries = Vec::new();
        for i in 1..=m {
            entries.push((i, m + i, vec![(0, Q::one())]));
        }
        Self::new(dim, &entries).expect("Heisenberg constants are valid")
    }

    /// Build from brackets `[∂ᵢ,∂ⱼ] = Σ c ∂ₖ` (0-based); the opposite order is
    /// filled in by antisymmetry. Jacobi is verified exactly.
    pub fn new(dim: usize, entries: &[(usize, usize, Vec<(usize, Q)>)]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("Lie algebra dimension must be positive".into()));
        }
        let mut table: Vec<Vec<BTreeMap<usize, Q>>> = vec![vec![BTreeMap::new(); dim]; dim];
        let mut given = vec![vec![false; dim]; dim];
        for (i, j, val) in entries {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim || val.iter().any(|(k, _)| *k >= dim) {
                return Err(Error::DimensionMismatch { expected: dim, found: i.max(j) + 1 });
            }
            let mut m = BTreeMap::new();
            for (k, c) in val {
                let e = m.entry(*k).or_insert_with(Q::zero);
                *e += c.clone();
            }
            m.retain(|_, c: &mut Q| !c.is_zero());
            if i == j {
                if !m.is_empty() {
                    return Err(Error::Validation(format!(
                        "antisymmetry: [d{i},d{i}] must vanish"
                    )));
                }
                continue;
            }
            let neg: BTreeMap<usize, Q> = m.iter().map(|(k, c)| (*k, -c.clone())).collect();
            if given[j][i] && table[j][i] != neg {
                return Err(Error::Validation(format!(
                    "antisymmetry: c^k_{{{i}{j}}} = -c^k_{{{j}{i}}} fails"
                )));
            }
            if given[i][j] && table[i][j] != m {
                return Err(Error::Validation(format!("conflicting values for [d{i},d{j}]")));
            }
            table[i][j] = m;
            table[j][i] = neg;
            given[i][j] = true;
            given[j][i] = true;
        }
        let brackets: Vec<Vec<Vec<(usize, Q)>>> = table
            .into_iter()
            .map(|row| row.into_iter().map(|m| m.into_iter().collect()).collect())
            .collect();
        let spec = LieAlgebraSpec { dim, brackets };
        spec.check_jacobi()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bracket(&self, i: usize, j: usize) -> &[(usize, Q)] {
        &self.brackets[i][j]
    }

    pub fn is_abelian(&self) -> bool {
        self.brackets.iter().all(|row| row.iter().all(Vec::is_empty))
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dim;
        // [[x,y],z] as a coefficient vector
        let bb = |i: usize, j: usize, k: usize| -> Vec<Q> {
            let mut out = vec![Q::zero(); n];
            for (l, c) in &self.brackets[i][j] {
                for (m, d) in &self.brackets[*l][k] {
                    out[*m] += c * d;
                }
            }
            out
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = bb(i, j, k);
                    let b = bb(j, k, i);
                    let c = bb(k, i, j);
                    if (0..n).any(|m| !(a[m].clone() + b[m].clone() + c[m].clone()).is_zero()) {
                        return Err(Error::Validation(format!(
                            "Jacobi identity of the structure constants fails on (d{i}, d{j}, d{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

type Memo<K, V> = RwLock<HashMap<K, V>>;

fn memo_get<K: std::hash::Hash + Eq, V: Clone>(m: &Memo<K, V>, k: &K) -> Option<V> {
    m.read().unwrap_or_else(|e| e.into_inner()).get(k).cloned()
}

fn memo_put<K: std::hash::Hash + Eq, V>(m: &Memo<K, V>, k: K, v: V) {
    m.write().unwrap_or_else(|e| e.into_inner()).insert(k, v);
}

/// `H = U(d)` with memoized normal ordering, coproducts and antipode.
///
/// The caches sit behind `RwLock`s, so a shared `HopfAlgebra` may be used from
/// several threads at once.
#[derive(Debug)]
pub struct HopfAlgebra {
    spec: LieAlgebraSpec,
    mono_gen: Memo<(MultiIndex, usize), HopfElement>,
    mono_mono: Memo<(MultiIndex, MultiIndex), HopfElement>,
    antipode: Memo<MultiIndex, HopfElement>,
    iter_cop: Memo<(MultiIndex, usize), Vec<(Vec<MultiIndex>, Q)>>,
}

impl Clone for HopfAlgebra {
    fn clone(&self) -> Self {
        HopfAlgebra::new(self.spec.clone())
    }
}

impl PartialEq for HopfAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl HopfAlgebra {
    pub fn new(spec: LieAlgebraSpec) -> Self {
        HopfAlgebra {
            spec,
            mono_gen: RwLock::default(),
            mono_mono: RwLock::default(),
            antipode: RwLock::default(),
            iter_cop: RwLock::default(),
        }
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new(LieAlgebraSpec::abelian(dim))
    }

    pub fn spec(&self) -> &LieAlgebraSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn is_abelian(&self) -> bool {
        self.spec.is_abelian()
    }

    pub fn one(&self) -> HopfElement {
        HopfElement::one(self.dim())
    }

    pub fn gen(&self, i: usize) -> HopfElement {
        HopfElement::gen(self.dim(), i)
    }

    fn check(&self, h: &HopfElement) -> Result<()> {
        if h.dims_ok(self.dim()) {
            Ok(())
        } else {
            let found = h.terms.keys().map(MultiIndex::dim).find(|&d| d != self.dim()).unwrap_or(0);
            Err(Error::DimensionMismatch { expected: self.dim(), found })
        }
    }

    /// `∂^I · ∂ⱼ` in normal form.
    fn mul_mono_gen(&self, i: &MultiIndex, j: usize) -> HopfElement {
        // last generator present in ∂^I
        let r = i.0.iter().rposition(|&x| x > 0);
        match r {
            None => return HopfElement::mono(MultiIndex::unit(self.dim(), j)),
            Some(r) if r <= j => {
                let mut k = i.clone();
                k.0[j] += 1;
                return HopfElement::mono(k);
            }
            _ => {}
        }
        let key = (i.clone(), j);
        if let Some(v) = memo_get(&self.mono_gen, &key) {
            return v;
        }
        let r = r.unwrap();
        // ∂^I ∂ⱼ = (∂^{I-e_r} ∂ⱼ) ∂_r + ∂^{I-e_r} [∂_r, ∂ⱼ]
        let mut rest = i.clone();
        rest.0[r] -= 1;
        let first = self.mul_mono_gen(&rest, j);
        let mut out = HopfElement::zero();
        for (m, c) in &first.terms {
            for (m2, c2) in &self.mul_mono_gen(m, r).terms {
                out.add_term(m2.clone(), c * c2);
            }
        }
        for (k, c) in self.spec.bracket(r, j) {
            for (m2, c2) in &self.mul_mono_gen(&rest, *k).terms {
                out.add_term(m2.clone(), c * c2);
            }
        }
        memo_put(&self.mono_gen, key, out.clone());
        out
    }

    /// `∂^I · ∂^J` in normal form.
    pub fn mul_mono(&self, i: &MultiIndex, j: &MultiIndex) -> HopfElement {
        if j.is_zero() {
            return HopfElement::mono(i.clone());
        }
        if i.is_zero() {
            return HopfElement::mono(j.clone());
        }
        // fast path: every generator of I precedes every generator of J
        let last_i = i.0.iter().rposition(|&x| x > 0).unwrap();
        let first_j = j.0.iter().position(|&x| x > 0).unwrap();
        if self.is_abelian() || last_i <= first_j {
            return HopfElement::mono(i.add(j));
        }
        let key = (i.clone(), j.clone());
        if let Some(v) = memo_get(&self.mono_mono, &key) {
            return v;
        }
        let mut acc = HopfElement::mono(i.clone());
        for (g, &e) in j.0.iter().enumerate() {
            for _ in 0..e {
                let mut next = HopfElement::zero();
                for (m, c) in &acc.terms {
                    for (m2, c2) in &self.mul_mono_gen(m, g).terms {
                        next.add_term(m2.clone(), c * c2);
                    }
                }
                acc = next;
            }
        }
        memo_put(&self.mono_mono, key, acc.clone());
        acc
    }

    /// PBW product; callers guarantee matching dimensions.
    pub fn mul(&self, a: &HopfElement, b: &HopfElement) -> HopfElement {
        let mut out = HopfElement::zero();
        for (i, c) in &a.terms {
            for (j, d) in &b.terms {
                let cd = c * d;
                for (k, e) in &self.mul_mono(i, j).terms {
                    out.add_term(k.clone(), &cd * e);
                }
            }
        }
        out
    }

    /// Checked PBW product.
    pub fn pbw_multiply(&self, a: &HopfElement, b: &HopfElement) -> Result<HopfElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn counit(&self, h: &HopfElement) -> Q {
        h.coefficient(&MultiIndex::zero(self.dim()))
    }

    /// `Δ(h)` as an arity-2 tensor.
    pub fn coproduct(&self, h: &HopfElement) -> HTensor {
        self.iter_coproduct(h, 2)
    }

    /// `Δ^{(n)}(h)` for `n ≥ −1`, an element of `H^{⊗(n+1)}`.
    pub fn iterated_coproduct(&self, h: &HopfElement, n: i64) -> Result<HTensor> {
        if n < -1 {
            return Err(Error::InvalidArity(n));
        }
        self.check(h)?;
        Ok(self.iter_coproduct(h, (n + 1) as usize))
    }

    /// Split `h` into `legs` tensor factors; `legs = 0` is the counit.
    pub fn iter_coproduct(&self, h: &HopfElement, legs: usize) -> HTensor {
        let mut out = HTensor::zero(legs);
        if legs == 0 {
            out.add_term(Vec::new(), self.counit(h));
            return out;
        }
        for (i, c) in &h.terms {
            for (k, d) in self.mono_coproduct(i, legs).iter() {
                out.add_term(k.clone(), c * d);
            }
        }
        out
    }

    /// `Δ^{(legs-1)}(∂^I) = Σ multinomial · ∂^{A₁} ⊗ ⋯ ⊗ ∂^{A_legs}`.
    pub fn mono_coproduct(&self, i: &MultiIndex, legs: usize) -> Vec<(Vec<MultiIndex>, Q)> {
        if legs == 1 {
            return vec![(vec![i.clone()], Q::one())];
        }
        let key = (i.clone(), legs);
        if let Some(v) = memo_get(&self.iter_cop, &key) {
            return v;
        }
        let dim = self.dim();
        // per generator: all compositions of the exponent into `legs` parts
        let mut acc: Vec<(Vec<MultiIndex>, Q)> = vec![(vec![MultiIndex::zero(dim); legs], Q::one())];
        for g in 0..dim {
            let e = i.0[g];
            if e == 0 {
                continue;
            }
            let comps = compositions(e, legs);
            let mut next = Vec::with_capacity(acc.len() * comps.len());
            for (key, c) in &acc {
                for comp in &comps {
                    let mut k2 = key.clone();
                    for (leg, &part) in comp.iter().enumerate() {
                        k2[leg].0[g] = part;
                    }
                    next.push((k2, c * multinomial(e, comp)));
                }
            }
            acc = next;
        }
        memo_put(&self.iter_cop, key, acc.clone());
        acc
    }

    /// `S(∂^I) = (−1)^{|I|} ∂_N^{i_N} ⋯ ∂₁^{i₁}` normal ordered.
    pub fn antipode_mono(&self, i: &MultiIndex) -> HopfElement {
        if self.is_abelian() || i.degree() <= 1 {
            let sign = if i.degree().is_multiple_of(2) { Q::one() } else { -Q::one() };
            return HopfElement::mono(i.clone()).scale(&sign);
        }
        if let Some(v) = memo_get(&self.antipode, i) {
            return v;
        }
        let dim = self.dim();
        let mut acc = HopfElement::one(dim);
        for g in (0..dim).rev() {
            for _ in 0..i.0[g] {
                let mut next = HopfElement::zero();
                for (m, c) in &acc.terms {
                    for (m2, c2) in &self.mul_mono_gen(m, g).terms {
                        next.add_term(m2.clone(), c * c2);
                    }
                }
                acc = next;
            }
        }
        if i.degree() % 2 == 1 {
            acc = acc.neg();
        }
        memo_put(&self.antipode, i.clone(), acc.clone());
        acc
    }

    pub fn antipode(&self, h: &HopfElement) -> HopfElement {
        let mut out = HopfElement::zero();
        for (i, c) in &h.terms {
            for (k, d) in &self.antipode_mono(i).terms {
                out.add_term(k.clone(), c * d);
            }
        }
        out
    }

    /// `(id ⊗ S)Δ(h) = h₍₁₎ ⊗ h₍₋₂₎`.
    pub fn twisted_coproduct_right(&self, h: &HopfElement) -> HTensor {
        self.twist(h, false)
    }

    /// `(S ⊗ id)Δ(h) = h₍₋₁₎ ⊗ h₍₂₎`.
    pub fn twisted_coproduct_left(&self, h: &HopfElement) -> HTensor {
        self.twist(h, true)
    }

    fn twist(&self, h: &HopfElement, left: bool) -> HTensor {
        let mut out = HTensor::zero(2);
        let leg = if left { 0 } else { 1 };
        for (key, c) in &self.coproduct(h).terms {
            let s = self.antipode_mono(&key[leg]);
            for (m, d) in &s.terms {
                let mut k2 = key.clone();
                k2[leg] = m.clone();
                out.add_term(k2, c * d);
            }
        }
        out
    }

    /// Pairs `(h₍₁₎, h₍₋₂₎)` of the right-twisted coproduct, one per term.
    pub fn twisted_legs(&self, h: &HopfElement) -> Vec<(MultiIndex, MultiIndex, Q)> {
        self.twisted_coproduct_right(h)
            .terms
            .into_iter()
            .map(|(k, c)| (k[0].clone(), k[1].clone(), c))
            .collect()
    }

    /// Slotwise PBW product of two tensors of equal arity.
    pub fn htensor_multiply(&self, a: &HTensor, b: &HTensor) -> Result<HTensor> {
        if a.arity != b.arity {
            return Err(Error::ArityMismatch { expected: a.arity, found: b.arity });
        }
        let mut out = HTensor::zero(a.arity);
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                let factors: Vec<HopfElement> =
                    ka.iter().zip(kb).map(|(x, y)| self.mul_mono(x, y)).collect();
                let prod = HTensor::pure(&factors);
                let c = ca * cb;
                for (k, d) in prod.terms {
                    out.add_term(k, &c * d);
                }
            }
        }
        Ok(out)
    }

    /// `σ(h₁ ⊗ ⋯ ⊗ hₙ) = h_{σ⁻¹(1)} ⊗ ⋯ ⊗ h_{σ⁻¹(n)}`: slot `i` moves to position `σ(i)`.
    pub fn htensor_permute(&self, sigma: &Perm, a: &HTensor) -> Result<HTensor> {
        if sigma.len() != a.arity {
            return Err(Error::SizeMismatch { expected: a.arity, found: sigma.len() });
        }
        let mut out = HTensor::zero(a.arity);
        for (k, c) in &a.terms {
            let mut k2 = k.clone();
            for (i, m) in k.iter().enumerate() {
                k2[sigma.apply0(i)] = m.clone();
            }
            out.add_term(k2, c.clone());
        }
        Ok(out)
    }

    /// Tensor of `Δ` applied to one leg: `(id ⊗ ⋯ ⊗ Δ ⊗ ⋯ ⊗ id)`.
    pub fn coproduct_on_leg(&self, t: &HTensor, leg: usize) -> HTensor {
        let mut out = HTensor::zero(t.arity + 1);
        for (k, c) in &t.terms {
            for (split, d) in self.mono_coproduct(&k[leg], 2) {
                let mut k2 = k[..leg].to_vec();
                k2.extend(split);
                k2.extend_from_slice(&k[leg + 1..]);
                out.add_term(k2, c * d);
            }
        }
        out
    }

    /// Apply `S` to one leg of a tensor.
    pub fn antipode_on_leg(&self, t: &HTensor, leg: usize) -> HTensor {
        let mut out = HTensor::zero(t.arity);
        for (k, c) in &t.terms {
            for (m, d) in &self.antipode_mono(&k[leg]).terms {
                let mut k2 = k.clone();
                k2[leg] = m.clone();
                out.add_term(k2, c * d);
            }
        }
        out
    }

    /// Multiply legs `a` and `a+1` together, lowering the arity by one.
    pub fn contract_legs(&self, t: &HTensor, a: usize) -> HTensor {
        let mut out = HTensor::zero(t.arity - 1);
        for (k, c) in &t.terms {
            for (m, d) in &self.mul_mono(&k[a], &k[a + 1]).terms {
                let mut k2 = k[..a].to_vec();
                k2.push(m.clone());
                k2.extend_from_slice(&k[a + 2..]);
                out.add_term(k2, c * d);
            }
        }
        out
    }

    /// Apply `ε` to one leg, lowering the arity by one.
    pub fn counit_on_leg(&self, t: &HTensor, leg: usize) -> HTensor {
        let mut out = HTensor::zero(t.arity - 1);
        for (k, c) in &t.terms {
            if k[leg].is_zero() {
                let mut k2 = k.clone();
                k2.remove(leg);
                out.add_term(k2, c.clone());
            }
        }
        out
    }
}

/// Add `c` at `key`, dropping the entry if it cancels.
pub(crate) fn add_to_map<K: Ord>(map: &mut BTreeMap<K, Q>, key: K, c: Q) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// All ways to write `e` as an ordered sum of `parts` nonnegative integers.
fn compositions(e: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![e]];
    }
    let mut out = Vec::new();
    for first in 0..=e {
        for mut rest in compositions(e - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn multinomial(e: u32, parts: &[u32]) -> Q {
    let mut num = num_bigint::BigInt::one();
    for k in 2..=e {
        num *= k;
    }
    let mut den = num_bigint::BigInt::one();
    for &p in parts {
        for k in 2..=p {
            den *= k;
        }
    }
    Q::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn heisenberg_reordering() {
        let h = HopfAlgebra::new(LieAlgebraSpec::heisenberg(1));
        let got = h.mul(&h.gen(2), &h.gen(1));
        let want = HopfElement::from_terms([(mi(&[0, 1, 1]), q(1)), (mi(&[1, 0, 0]), q(-1))]);
        assert_eq!(got, want);
    }

    #[test]
    fn coproduct_of_square() {
        let h = HopfAlgebra::abelian(1);
        let t = h.coproduct(&HopfElement::mono(mi(&[2])));
        assert_eq!(t.terms().len(), 3);
        assert_eq!(t.terms()[&vec![mi(&[1]), mi(&[1])]], q(2));
    }

    #[test]
    fn counit_and_scalar_arity() {
        let h = HopfAlgebra::abelian(1);
        let t = h.iterated_coproduct(&h.gen(0), -1).unwrap();
        assert_eq!(t.as_scalar(), Some(q(0)));
        assert!(h.iterated_coproduct(&h.gen(0), -2).is_err());
    }

    #[test]
    fn rejects_bad_constants() {
        let bad = LieAlgebraSpec::new(2, &[(0, 0, vec![(1, q(1))])]);
        assert!(bad.is_err());
        // [∂0,∂1]=∂2, [∂1,∂2]=∂1 violates Jacobi
        let bad = LieAlgebraSpec::new(3, &[(0, 1, vec![(2, q(1))]), (1, 2, vec![(1, q(1))])]);
        assert!(bad.is_err());
    }
}
