use std::collections::BTreeMap;

use pclh::parse::{parse_element, parse_pseudo};
use pclh::pseudoalg::{self, fmt_lambda, from_lambda, to_lambda, BUILTIN_NAMES};

#[test]
fn w_d_bracket_matches_hand_normal_form() {
    // [w1 * w2] = (∂₂ ⊗ 1) ⊗ w1 − (1 ⊗ ∂₁) ⊗ w2, and (1 ⊗ ∂) ⊗ v = −(∂ ⊗ 1) ⊗ v + (1 ⊗ 1) ⊗ ∂v
    let pa = pseudoalg::builtin("w_d2").unwrap();
    let m = pa.module();
    let none = BTreeMap::new();
    let w1 = parse_element(m, "w1", &none).unwrap();
    let w2 = parse_element(m, "w2", &none).unwrap();
    let expected = parse_pseudo(m, "(d[0,1]|1) @ w1 + (d[1,0]|1) @ w2 - (1|1) @ d[1,0] w2", &none, Some(2)).unwrap();
    assert_eq!(pa.bracket(&w1, &w2), expected);
}

#[test]
fn lambda_brackets() {
    let cases = [("boson", "u", "u", "-λ"), ("affine_sl2", "e", "f", "h - λ"), ("affine_sl2", "h", "e", "2 e")];
    for (name, a, b, expected) in cases {
        let pa = pseudoalg::builtin(name).unwrap();
        let m = pa.module();
        let av = parse_element(m, a, pa.central()).unwrap();
        let bv = parse_element(m, b, pa.central()).unwrap();
        let t = pa.bracket(&av, &bv);
        let l = to_lambda(m, &t).unwrap();
        assert_eq!(fmt_lambda(m, &l), expected, "{name}: [{a}_λ {b}]");
        assert_eq!(from_lambda(m, &l).unwrap(), t);
    }
}

#[test]
fn table_entries_survive_printing() {
    for name in BUILTIN_NAMES {
        let pa = pseudoalg::builtin(name).unwrap();
        let m = pa.module();
        for i in 0..m.generator_count() {
            for j in 0..m.generator_count() {
                let t = pa.table_entry(i, j);
                let back = parse_pseudo(m, &m.fmt_pseudo(t), pa.central(), Some(2)).unwrap();
                assert_eq!(&back, t, "{name} ({i},{j})");
            }
        }
    }
}

#[test]
fn builtins_satisfy_the_axioms_on_quadratic_probes() {
    for name in ["boson", "fermion", "affine"] {
        let pa = pseudoalg::builtin(name).unwrap();
        let vs = pa.module().probe_vectors(1);
        for a in &vs {
            for b in &vs {
                assert!(pa.skew_residual(a, b).is_zero(), "{name}");
                for c in &vs {
                    assert!(pa.jacobi_residual(a, b, c).is_zero(), "{name}");
                    assert!(pa.left_leibniz_residual(a, b, c).unwrap().is_zero(), "{name}");
                }
            }
        }
    }
}

#[test]
fn type_k_has_no_lambda_form() {
    let pa = pseudoalg::builtin("type_k").unwrap();
    let e = pa.module().gen_element(0);
    assert!(to_lambda(pa.module(), &pa.bracket(&e, &e)).is_err());
}

#[test]
fn affine_form_must_be_invariant() {
    use pclh::q;
    // sl₂ in the basis e, h, f
    let mut s = vec![vec![Vec::new(); 3]; 3];
    s[0][2] = vec![(1, q(1))];
    s[2][0] = vec![(1, q(-1))];
    s[1][0] = vec![(0, q(2))];
    s[0][1] = vec![(0, q(-2))];
    s[1][2] = vec![(2, q(-2))];
    s[2][1] = vec![(2, q(2))];
    let form = |hh: i64| vec![vec![q(0), q(0), q(1)], vec![q(0), q(hh), q(0)], vec![q(1), q(0), q(0)]];
    assert!(pseudoalg::check_invariant_form(&s, &form(2)).is_ok());
    // κ([e,f],h) = κ(h,h) must equal κ(e,[f,h]) = 2
    assert!(pseudoalg::try_affine(&["e", "h", "f"], &s, &form(1)).is_err());
}
