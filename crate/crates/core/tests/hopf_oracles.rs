use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

use pclh::hopf::{HTensor, HopfAlgebra, HopfElement, LieAlgebraSpec, MultiIndex};
use pclh::{q, Q};

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Δ(∂^a) = Σ_{b ≤ a} C(a,b) ∂^b ⊗ ∂^{a−b} in the commutative case.
fn binomial_coproduct(a: &MultiIndex) -> HTensor {
    let mut out = HTensor::zero(2);
    let mut b = vec![0u32; a.dim()];
    loop {
        let coeff: BigInt = a.0.iter().zip(&b).map(|(&n, &k)| binomial(n, k)).product();
        let rest: Vec<u32> = a.0.iter().zip(&b).map(|(&n, &k)| n - k).collect();
        out.add_term(vec![MultiIndex(b.clone()), MultiIndex(rest)], Q::from_integer(coeff));
        let mut i = 0;
        loop {
            if i == b.len() {
                return out;
            }
            if b[i] < a.0[i] {
                b[i] += 1;
                break;
            }
            b[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn abelian_coproduct_is_binomial() {
    let h = HopfAlgebra::abelian(3);
    for a in [vec![0, 0, 0], vec![1, 0, 0], vec![2, 1, 0], vec![3, 0, 2], vec![1, 1, 1], vec![4, 2, 1]] {
        let a = MultiIndex(a);
        assert_eq!(h.coproduct(&HopfElement::mono(a.clone())), binomial_coproduct(&a), "Δ∂^{a}");
    }
}

#[test]
fn abelian_antipode_is_a_sign() {
    let h = HopfAlgebra::abelian(2);
    for a in [vec![0, 0], vec![1, 0], vec![2, 3], vec![1, 4]] {
        let a = MultiIndex(a);
        let sign = if a.degree().is_multiple_of(2) { q(1) } else { q(-1) };
        assert_eq!(h.antipode(&HopfElement::mono(a.clone())), HopfElement::mono(a).scale(&sign));
    }
}

#[test]
fn heisenberg_relations() {
    let h = HopfAlgebra::new(LieAlgebraSpec::heisenberg(1));
    let (z, x, y) = (h.gen(0), h.gen(1), h.gen(2));
    // yx = xy − z
    assert_eq!(h.mul(&y, &x), h.mul(&x, &y).sub(&z));
    // S(xy) = S(y)S(x) = yx
    assert_eq!(h.antipode(&h.mul(&x, &y)), h.mul(&y, &x));
    // z is central
    assert_eq!(h.mul(&z, &x), h.mul(&x, &z));
    assert_eq!(h.counit(&h.mul(&x, &y)), Q::from_integer(0.into()));
    assert_eq!(h.counit(&h.one()), Q::one());
}

fn element(dim: usize) -> impl Strategy<Value = HopfElement> {
    prop::collection::vec((prop::collection::vec(0u32..3, dim), -3i64..=3), 1..4).prop_map(|terms| {
        HopfElement::from_terms(terms.into_iter().map(|(e, c)| (MultiIndex(e), q(c))))
    })
}

fn heisenberg() -> HopfAlgebra {
    HopfAlgebra::new(LieAlgebraSpec::heisenberg(1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coproduct_is_multiplicative(a in element(3), b in element(3)) {
        let h = heisenberg();
        let lhs = h.coproduct(&h.mul(&a, &b));
        let rhs = h.htensor_multiply(&h.coproduct(&a), &h.coproduct(&b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn antipode_convolution_is_counit(a in element(3)) {
        // m(S ⊗ 1)Δ(a) = ε(a) 1
        let h = heisenberg();
        let mut acc = HopfElement::zero();
        for (legs, c) in h.coproduct(&a).terms() {
            let left = h.antipode(&HopfElement::mono(legs[0].clone()));
            acc = acc.add(&h.mul(&left, &HopfElement::mono(legs[1].clone())).scale(c));
        }
        prop_assert_eq!(acc, HopfElement::scalar(3, h.counit(&a)));
    }

    #[test]
    fn antipode_reverses_products(a in element(3), b in element(3)) {
        let h = heisenberg();
        prop_assert_eq!(h.antipode(&h.mul(&a, &b)), h.mul(&h.antipode(&b), &h.antipode(&a)));
    }
}
