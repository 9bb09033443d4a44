use std::sync::Arc;

use pclh::graphs::Graph;
use pclh::hmodule::PseudoTensor;
use pclh::hopf::HopfElement;
use pclh::operad::{
    ad, check_master, compose, generator_tuple, find_difference, find_nonzero, grade_component, master_from_pseudoalgebra, phi,
    star_bracket, star_master, OperadElement, ProbeSuite,
};
use pclh::pseudoalg::{self, PseudoAlgebra};
use pclh::q;

fn load(name: &str) -> Arc<PseudoAlgebra> {
    Arc::new(pseudoalg::builtin(name).unwrap())
}

fn probe(pa: &PseudoAlgebra) -> ProbeSuite {
    let mut p = ProbeSuite::new(pa.module(), 2, 9);
    p.max_tuples = 12;
    p.max_graphs = 12;
    p
}

fn edge(a: usize, b: usize) -> Graph {
    Graph::new(2, &[(a, b)]).unwrap()
}

#[test]
fn boson_master_values() {
    let pa = load("boson");
    let m = pa.module();
    let x = master_from_pseudoalgebra(&pa);
    let u = m.gen_element(0);
    let uu = m.multiply(&u, &u).unwrap();
    // u is even: edgeless part is the bracket itself, 1->2 is the product
    assert_eq!(x.eval(&Graph::edgeless(2), &[u.clone(), u.clone()]).unwrap(), pa.bracket(&u, &u));
    assert_eq!(x.eval(&edge(1, 2), &[u.clone(), u.clone()]).unwrap(), PseudoTensor::from_vector(&uu));
    assert_eq!(x.eval(&edge(2, 1), &[u.clone(), u.clone()]).unwrap(), PseudoTensor::from_vector(&uu).neg());
}

#[test]
fn fermion_master_signs() {
    let pa = load("fermion");
    let m = pa.module();
    let x = master_from_pseudoalgebra(&pa);
    let psi = m.gen_element(0);
    let dpsi = m.act(&HopfElement::gen(1, 0), &psi);
    // ψ is odd, so both parts pick up a minus sign
    assert_eq!(x.eval(&Graph::edgeless(2), &[psi.clone(), psi.clone()]).unwrap(), pa.bracket(&psi, &psi).neg());
    let prod = m.multiply(&psi, &dpsi).unwrap();
    assert!(!prod.is_zero());
    assert_eq!(x.eval(&edge(1, 2), &[psi.clone(), dpsi.clone()]).unwrap(), PseudoTensor::from_vector(&prod).neg());
    // ψ² = 0 in the exterior algebra
    assert!(x.eval(&edge(1, 2), &[psi.clone(), psi]).unwrap().is_zero());
}

#[test]
fn master_vanishes_on_all_three_graphs() {
    for name in ["boson", "fermion", "affine"] {
        let pa = load(name);
        let x = master_from_pseudoalgebra(&pa);
        let r = check_master(name, &x, &ProbeSuite::new(pa.module(), 1, 5)).unwrap();
        assert_eq!(r.graphs, 19, "{name}");
        assert!(r.passed(), "{name}: {:?}", r.failing_cases());
    }
}

#[test]
fn unit_laws() {
    let pa = load("boson");
    let x = master_from_pseudoalgebra(&pa);
    let one = OperadElement::unit(Arc::clone(pa.module()));
    let p = probe(&pa);
    for y in [compose(&x, 1, &one).unwrap(), compose(&x, 2, &one).unwrap(), compose(&one, 1, &x).unwrap()] {
        assert!(find_difference(&y, &x, &p).unwrap().is_none());
    }
}

#[test]
fn parallel_insertion_of_odd_elements_needs_the_koszul_sign() {
    // (X ∘₁ X) ∘₃ X = −(X ∘₂ X) ∘₁ X, and both sides are nonzero
    let pa = load("boson");
    let x = master_from_pseudoalgebra(&pa);
    let p = probe(&pa);
    let lhs = compose(&compose(&x, 1, &x).unwrap(), 3, &x).unwrap();
    let rhs = compose(&compose(&x, 2, &x).unwrap(), 1, &x).unwrap();
    assert!(find_nonzero(&lhs, &p).is_some());
    assert!(find_difference(&lhs, &rhs.scale(&q(-1)), &p).unwrap().is_none());
    assert!(find_difference(&lhs, &rhs, &p).unwrap().is_some());
}

#[test]
fn nested_insertion_is_associative() {
    let pa = load("w_d1");
    let x = master_from_pseudoalgebra(&pa);
    let p = probe(&pa);
    let lhs = compose(&compose(&x, 1, &x).unwrap(), 2, &x).unwrap();
    let rhs = compose(&x, 1, &compose(&x, 2, &x).unwrap()).unwrap();
    assert!(find_difference(&lhs, &rhs, &p).unwrap().is_none());
}

#[test]
fn class_of_a_total_derivative_vanishes() {
    let pa = load("boson");
    let m = Arc::clone(pa.module());
    let u = m.gen_element(0);
    let du = m.act(&HopfElement::gen(1, 0), &u);
    let class = OperadElement::class(Arc::clone(&m), &du).unwrap();
    assert!(class.eval(&Graph::edgeless(0), &[]).unwrap().is_zero());
    let class = OperadElement::class(m, &u).unwrap();
    assert!(!class.eval(&Graph::edgeless(0), &[]).unwrap().is_zero());
}

#[test]
fn differential_squares_to_zero() {
    let pa = load("boson");
    let m = Arc::clone(pa.module());
    let x = master_from_pseudoalgebra(&pa);
    let p = probe(&pa);
    let u = m.gen_element(0);
    let u3 = m.multiply(&m.multiply(&u, &u).unwrap(), &u).unwrap();
    for f in [OperadElement::class(Arc::clone(&m), &u3).unwrap(), OperadElement::euler(Arc::clone(&m))] {
        let d = ad(&x, &f).unwrap();
        assert!(find_nonzero(&d, &p).is_some(), "{}", f.label());
        assert!(find_nonzero(&ad(&x, &d).unwrap(), &p).is_none(), "{}", f.label());
    }
}

#[test]
fn star_master_embeds_as_edgeless_part() {
    let pa = load("affine");
    let x = master_from_pseudoalgebra(&pa);
    let xs = star_master(Arc::clone(pa.module()), pa.bracket_fn());
    assert!(find_difference(&phi(&xs), &grade_component(&x, 0), &probe(&pa)).unwrap().is_none());
}

#[test]
fn derivation_follows_leibniz_rule() {
    let pa = load("boson");
    let m = Arc::clone(pa.module());
    let u = m.gen_element(0);
    let du = m.act(&HopfElement::gen(1, 0), &u);
    // D(u) = ∂u, so D(u²) = 2 u ∂u
    let d = OperadElement::derivation(Arc::clone(&m), false, vec![du.clone()]).unwrap();
    let uu = m.multiply(&u, &u).unwrap();
    let expected = m.multiply(&u, &du).unwrap().scale(&q(2));
    assert_eq!(d.eval(&Graph::edgeless(1), &[uu]).unwrap(), PseudoTensor::from_vector(&expected));
}

#[test]
fn star_master_squares_to_zero_exactly_when_jacobi_holds() {
    let broken = Arc::new(pclh::suites::jacobi_broken());
    for (pa, jacobi) in [(load("boson"), true), (load("affine_sl2"), true), (broken, false)] {
        let m = Arc::clone(pa.module());
        let xs = star_master(Arc::clone(&m), pa.bracket_fn());
        let sq = star_bracket(&xs, &xs).unwrap();
        let n = m.generator_count();
        let mut zero = true;
        for t in 0..n * n * n {
            let ids = [t / (n * n), t / n % n, t % n];
            zero &= sq.eval_monomials(&generator_tuple(&ids, m.dim())).is_zero();
        }
        assert_eq!(zero, jacobi, "{}", pa.name());
    }
}
