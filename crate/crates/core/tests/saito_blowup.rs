use std::collections::HashMap;

use germ_moduli::blowup::*;
use germ_moduli::cli::catalog;
use germ_moduli::coeffcore::linalg::{sparse, Rref};
use germ_moduli::coeffcore::{poly_divide_exact, BivariatePoly, Fe};
use germ_moduli::saito::*;
use germ_moduli::Error;

fn p(t: &[(u32, u32, i64)]) -> BivariatePoly {
    BivariatePoly::from_ints(t)
}

fn vf(a: &[(u32, u32, i64)], b: &[(u32, u32, i64)]) -> VectorField {
    VectorField::from_ints(a, b)
}

fn x() -> BivariatePoly {
    BivariatePoly::x()
}

fn y() -> BivariatePoly {
    BivariatePoly::y()
}

fn cat(name: &str) -> BivariatePoly {
    catalog::lookup(name).unwrap().equation_or_eliminate(32).unwrap()
}

fn in_span(slice: &TangentModuleSlice, v: &VectorField) -> bool {
    let mut idx: HashMap<(u8, u32, u32), usize> = HashMap::new();
    let mut vec_of = |x: &VectorField| {
        let mut entries = Vec::new();
        for (comp, q) in [(0u8, &x.a), (1u8, &x.b)] {
            for (m, c) in q.terms() {
                let n = idx.len();
                let k = *idx.entry((comp, m.0, m.1)).or_insert(n);
                entries.push((k, c.clone()));
            }
        }
        sparse(entries)
    };
    let mut e = Rref::new();
    for f in &slice.fields {
        e.insert(&vec_of(f));
    }
    e.contains(&vec_of(v))
}

#[test]
fn slice_of_two_lines_contains_the_diagonal_fields() {
    let s = tangent_slice(&p(&[(1, 1, 1)]), 1).unwrap();
    assert!(in_span(&s, &vf(&[(1, 0, 1)], &[])));
    assert!(in_span(&s, &vf(&[], &[(0, 1, 1)])));
    assert!(!in_span(&s, &vf(&[(0, 1, 1)], &[])));
}

#[test]
fn slice_of_smooth_branch() {
    let s = tangent_slice(&x(), 1).unwrap();
    for f in [vf(&[(1, 0, 1)], &[]), vf(&[], &[(0, 0, 1)]), vf(&[], &[(1, 0, 1)])] {
        assert!(in_span(&s, &f), "{f}");
    }
    assert!(!in_span(&s, &vf(&[(0, 0, 1)], &[])));
}

#[test]
fn slice_of_conic_contains_radial_and_rotation() {
    let s = tangent_slice(&p(&[(2, 0, 1), (0, 2, 1)]), 1).unwrap();
    assert!(in_span(&s, &VectorField::radial()));
    assert!(in_span(&s, &vf(&[(0, 1, 1)], &[(1, 0, -1)])));
}

#[test]
fn slice_valuations_are_sorted_and_members_tangent() {
    for name in ["double-cusp", "four-lines", "xn-yn-5"] {
        let f = cat(name);
        let s = tangent_slice(&f, 6).unwrap();
        let v = s.valuations();
        assert!(v.windows(2).all(|w| w[0] <= w[1]), "{name}: {v:?}");
        assert!(s.fields.iter().all(|x| x.is_tangent(&f)));
    }
}

#[test]
fn criterion_examples() {
    let (ok, u) = criterion_check(&vf(&[(1, 0, 1)], &[]), &vf(&[], &[(0, 1, 1)]), &p(&[(1, 1, 1)]));
    assert!(ok);
    assert_eq!(u.unwrap(), BivariatePoly::one());
    let (ok, u) = criterion_check(&vf(&[(0, 0, 1)], &[]), &vf(&[], &[(1, 0, 1)]), &x());
    assert!(ok);
    assert_eq!(u.unwrap(), BivariatePoly::one());
    let r = VectorField::radial();
    assert_eq!(criterion_check(&r, &r.scale(&Fe::int(3)), &p(&[(1, 1, 1)])), (false, None));
}

#[test]
fn saito_numbers() {
    let n = saito_number(&cat("double-cusp")).unwrap();
    assert_eq!(n, SaitoNumber { value: 2, certified: true });
    assert_eq!(saito_number(&p(&[(1, 1, 1)])).unwrap().value, 1);
    assert_eq!(saito_number(&cat("xn-yn-6")).unwrap().value, 2);
    // the literal homogeneous sextic carries the Euler field
    assert_eq!(saito_number(&p(&[(6, 0, 1), (0, 6, 1)])).unwrap().value, 1);
}

#[test]
fn double_cusp_printed_field_is_tangent() {
    let x1 = VectorField::new(BivariatePoly::from_terms([(2, 0, Fe::int(2)), (0, 3, Fe::frac(5, 2)), (3, 1, Fe::frac(-9, 2))]), p(&[(1, 1, 3), (2, 2, -3)]));
    let f = cat("double-cusp");
    assert!(x1.is_tangent(&f));
    assert_eq!(x1.valuation(), Some(2));
}

#[test]
fn basis_shapes() {
    let cases: [(&str, (u32, u32), &str); 6] = [
        ("smooth", (0, 1), "O"),
        ("two-lines", (1, 1), "E"),
        ("three-lines", (1, 2), "Od'"),
        ("four-lines", (1, 3), "Ed'"),
        ("five-lines", (2, 2), "Od"),
        ("xn-yn-5", (2, 2), "Od"),
    ];
    for (name, nus, label) in cases {
        let f = cat(name);
        let b = find_saito_basis(&f).unwrap();
        assert!(verify_basis(&b.x1, &b.x2, &f), "{name}");
        assert_eq!(((b.nu1(), b.nu2()), b.type_name()), (nus, label), "{name}");
    }
    let b = find_saito_basis(&product(&[x(), y(), p(&[(3, 0, 1), (0, 3, -1), (2, 2, 1)])])).unwrap();
    assert_eq!((b.nu1(), b.nu2(), b.type_name()), (2, 2, "Od"));
    let b = find_saito_basis(&p(&[(5, 0, 1), (0, 5, 1)])).unwrap();
    assert_eq!((b.nu1(), b.nu2(), b.type_name()), (1, 4, "unclassified"));
}

#[test]
fn add_line_to_smooth_branch() {
    let b = find_saito_basis(&x()).unwrap();
    let nb = add_line(&b, &x(), &y()).unwrap();
    assert!(criterion_check(&nb.x1, &nb.x2, &p(&[(1, 1, 1)])).0);
    assert_eq!((nb.nu1(), nb.nu2()), (1, 1));
}

#[test]
fn add_and_remove_generic_line_on_quintic() {
    let f = cat("xn-yn-5");
    let b = find_saito_basis(&f).unwrap();
    let l = p(&[(1, 0, 1), (0, 1, 2), (2, 0, 3)]);
    let fl = f.mul(&l);
    let nb = add_line(&b, &f, &l).unwrap();
    assert!(verify_basis(&nb.x1, &nb.x2, &fl));
    let nu = fl.order().unwrap();
    assert!([nu - 1, nu].contains(&(nb.nu1() + nb.nu2())));
    let back = remove_line(&nb, &f, &l).unwrap();
    assert!(verify_basis(&back.x1, &back.x2, &f));
    assert!([nb.nu1() - 1, nb.nu1()].contains(&back.nu1()));
    assert_eq!(back.nu1(), 2);
}

#[test]
fn remove_line_from_two_lines() {
    let b = SaitoBasis { x1: vf(&[(1, 0, 1)], &[]), x2: vf(&[], &[(0, 1, 1)]), unit: BivariatePoly::one(), type_label: None };
    let nb = remove_line(&b, &y(), &x()).unwrap();
    assert!(verify_basis(&nb.x1, &nb.x2, &y()));
    assert_eq!(nb.nu1(), 0);
    // x + y is not a component of xy
    let r = remove_line(&b, &y(), &p(&[(1, 0, 1), (0, 1, 1)]));
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn dicriticality() {
    assert!(VectorField::radial().is_dicritical());
    assert!(!VectorField::hamiltonian(&p(&[(1, 1, 1)])).is_dicritical());
    let b = find_saito_basis(&cat("five-lines")).unwrap();
    assert!(b.x1.is_dicritical());
}

#[test]
fn curve_tangency_loci() {
    for n in 3..=8 {
        assert!(curve_tangency(&cat(&format!("xn-yn-{n}"))).is_empty());
    }
    // y(y + x^n): both strict transforms pass through slope 0; the order is
    // the intersection multiplicity of the strict transform with the divisor
    for n in 2..=5 {
        let t = curve_tangency(&product(&[y(), p(&[(0, 1, 1), (n, 0, 1)])]));
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].point, DivisorPoint::Slope(Fe::zero()));
        assert_eq!(t[0].order, 2);
    }
}

#[test]
fn quasi_homogeneous_quintic_has_euler_field() {
    // x^6 lies in m·J(x^5 + y^5), so this curve is analytically homogeneous
    let f = p(&[(5, 0, 1), (0, 5, 1), (6, 0, 1)]);
    let r = classify(&f).unwrap();
    assert_eq!((r.nu1(), r.nu2(), r.basis.type_name()), (1, 4, "unclassified"));
    assert_eq!(r.radial, RadialStatus::Radial);
    assert!(tangency_locus(&r.basis.x1).unwrap().is_empty());
    assert_eq!(r.dimension, None);
}

#[test]
fn tangencies_of_generic_optimal_fields() {
    for n in 5..=8u32 {
        let f = cat(&format!("xn-yn-{n}"));
        let b = find_saito_basis(&f).unwrap();
        let (_, weight) = free_tangency(&b.x1, &f).unwrap();
        assert_eq!(weight, n.div_ceil(2) - 2, "n = {n}");
    }
}

#[test]
fn radial_statuses() {
    assert_eq!(radial_tests(&cat("four-lines")).unwrap(), RadialStatus::PureRadial);
    assert_eq!(radial_tests(&x()).unwrap(), RadialStatus::NotRadial);
    assert_eq!(radial_tests(&cat("xn-yn-5")).unwrap(), RadialStatus::Radial);
}

#[test]
fn nu0_and_free_point_counts() {
    let f = cat("xn-yn-6");
    let b = find_saito_basis(&f).unwrap();
    assert_eq!(nu0_and_free_points(&b, &f).unwrap().nu0, 1);
    let f = cat("five-lines");
    let b = find_saito_basis(&f).unwrap();
    assert_eq!(nu0_and_free_points(&b, &f).unwrap().with_multiplicity, 1);
    for n in 5..=8u32 {
        let f = cat(&format!("xn-yn-{n}"));
        let b = find_saito_basis(&f).unwrap();
        let fp = nu0_and_free_points(&b, &f).unwrap();
        assert_eq!((fp.nu0, fp.with_multiplicity), (1, n.div_ceil(2) - 2), "n = {n}");
    }
}

#[test]
fn dimension_formulas() {
    assert_eq!(moduli_dimension(2, 3, 6, Some(1)).unwrap(), 4);
    assert_eq!(moduli_dimension(2, 2, 5, Some(1)).unwrap(), 2);
    assert_eq!(moduli_dimension(1, 1, 2, None).unwrap(), 0);
    assert!(moduli_dimension(1, 1, 5, None).is_err());
}

#[test]
fn smooth_pairs_have_no_moduli() {
    for n in 2..=5 {
        let r = classify(&product(&[y(), p(&[(0, 1, 1), (n, 0, 1)])])).unwrap();
        assert_eq!(r.dimension, Some(0), "n = {n}");
    }
}

#[test]
fn index_sum_on_non_dicritical_fields() {
    for d in catalog::entries() {
        let f = d.equation_or_eliminate(32).unwrap();
        let b = find_saito_basis(&f).unwrap();
        for x in [&b.x1, &b.x2] {
            if !x.is_dicritical() {
                let sum: usize = index_locus(x).unwrap().iter().map(TangencyPoint::weight).sum();
                assert_eq!(sum as u32, x.valuation().unwrap() + 1, "{:?}", d.name);
            }
        }
    }
}

/// Divisor-adic order and the restriction of the cofactor to the divisor.
fn split_divisor(q: &BivariatePoly, chart: u8) -> (u32, Vec<(u32, Fe)>) {
    let on = |m: (u32, u32)| if chart == 1 { (m.0, m.1) } else { (m.1, m.0) };
    let e = q.terms().map(|(m, _)| on((m.0, m.1)).0).min().unwrap();
    (e, q.terms().filter(|(m, _)| on((m.0, m.1)).0 == e).map(|(m, c)| (on((m.0, m.1)).1, c.clone())).collect())
}

#[test]
fn blown_up_basis_satisfies_local_criterion() {
    for d in catalog::entries() {
        let f = d.equation_or_eliminate(32).unwrap();
        let b = find_saito_basis(&f).unwrap();
        let both_invariant = !b.x1.is_dicritical() && !b.x2.is_dicritical();
        let (b1, b2, s) = (blow_up_field(&b.x1), blow_up_field(&b.x2), blow_up_poly(&f));
        for c in 0..2 {
            let (q, exact) = poly_divide_exact(&b1[c].field.wedge(&b2[c].field), &s[c].poly);
            assert!(exact, "{:?} chart {}", d.name, c + 1);
            let (e, rest) = split_divisor(&q, c as u8 + 1);
            assert_eq!(e, both_invariant as u32, "{:?} chart {}", d.name, c + 1);
            if c == 0 {
                // a unit at every point of the divisor in chart 1: constant restriction
                assert!(rest.len() == 1 && rest[0].0 == 0, "{:?}", d.name);
            } else {
                assert!(rest.iter().any(|(k, _)| *k == 0), "{:?}", d.name);
            }
        }
    }
}

#[test]
fn valuation_sum_and_dicriticality_on_catalog() {
    for d in catalog::entries() {
        let f = d.equation_or_eliminate(32).unwrap();
        let b = find_saito_basis(&f).unwrap();
        let nu = f.order().unwrap();
        let s = b.nu1() + b.nu2();
        assert!(s == nu || s + 1 == nu, "{:?}", d.name);
        let [d1, d2] = b.dicritical();
        if d1 && s < nu {
            assert!(d2, "{:?}", d.name);
        }
        if d1 && s == nu {
            assert!(!d2, "{:?}", d.name);
        }
    }
}

#[test]
fn lower_bounds_and_radial_exclusion_on_generic_catalog() {
    for d in catalog::entries() {
        let f = d.equation_or_eliminate(32).unwrap();
        let (slice, b) = saito_data(&f).unwrap();
        let nu = f.order().unwrap();
        let radial = radial_status(&b) != RadialStatus::NotRadial;
        let bound = if radial { nu.div_ceil(2) - 1 } else { nu / 2 };
        assert!(b.nu1() >= bound, "{:?}", d.name);
        if radial {
            assert!(slice.tier(nu / 2).iter().all(|x| x.is_dicritical()), "{:?}", d.name);
        }
    }
}
