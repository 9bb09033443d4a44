//! Seeded sample elements for property checks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{compose, grade_component, master_from_pseudoalgebra, OperadElement};
use crate::hmodule::{AlgebraElement, Monomial};
use crate::hopf::MultiIndex;
use crate::perm::Perm;
use crate::pseudoalg::PseudoAlgebra;
use crate::Q;

/// Elements of arities 0 to 3 built from a pseudoalgebra.
pub struct SamplePool {
    by_arity: Vec<Vec<OperadElement>>,
}

impl SamplePool {
    pub fn new(pa: &Arc<PseudoAlgebra>) -> Self {
        let module = Arc::clone(pa.module());
        let dim = module.dim();
        let x = master_from_pseudoalgebra(pa);
        let mut pool: Vec<Vec<OperadElement>> = vec![Vec::new(); 4];

        let u = module.gen_element(0);
        if let Ok(c) = OperadElement::class(Arc::clone(&module), &u) {
            pool[0].push(c);
        }
        if module.has_product() {
            let du = AlgebraElement::atom(0, MultiIndex::unit(dim, 0));
            let uu = module.mul(&u, &du);
            if let Ok(c) = OperadElement::class(Arc::clone(&module), &uu) {
                pool[0].push(c);
            }
        }

        pool[1].push(OperadElement::unit(Arc::clone(&module)));
        pool[1].push(OperadElement::euler(Arc::clone(&module)));
        pool[1].push(OperadElement::degree_projection(Arc::clone(&module), 1));
        // a derivation shifting every generator by a derivative of itself
        let images: Vec<AlgebraElement> = (0..module.generator_count())
            .map(|g| AlgebraElement::atom(g, MultiIndex::unit(dim, 0)))
            .collect();
        if let Ok(d) = OperadElement::derivation(Arc::clone(&module), false, images) {
            pool[1].push(d);
        }

        pool[2].push(x.clone());
        pool[2].push(grade_component(&x, 0));
        if module.has_product() {
            pool[2].push(grade_component(&x, 1));
        }

        pool[3].push(compose(&x, 1, &x).expect("arities match"));
        pool[3].push(compose(&x, 2, &x).expect("arities match"));
        SamplePool { by_arity: pool }
    }

    pub fn has_arity(&self, n: usize) -> bool {
        self.by_arity.get(n).is_some_and(|v| !v.is_empty())
    }

    /// A random element of arity `n`: a pool element under a random
    /// permutation, plus a small multiple of another of the same parity.
    pub fn random(&self, rng: &mut impl Rng, n: usize) -> Option<OperadElement> {
        let list = self.by_arity.get(n)?;
        let a = list.choose(rng)?.clone();
        let sigma = Perm::all(n).choose(rng).cloned().unwrap_or_else(|| Perm::identity(n));
        let a = a.permute(&sigma).ok()?;
        let same: Vec<&OperadElement> = list.iter().filter(|b| b.is_odd() == a.is_odd()).collect();
        let b = same.choose(rng)?;
        let c = Q::from_integer(rng.gen_range(1i64..=2).into());
        a.combine(b, &c).ok()
    }
}

/// Convenience for tests: a monomial tuple from generator indices.
pub fn generator_tuple(ids: &[usize], dim: usize) -> Vec<Monomial> {
    ids.iter().map(|&g| Monomial::atom(g, MultiIndex::zero(dim))).collect()
}
