//! Acceptance criteria, one PASS/FAIL line each. Criterion 7 is advisory:
//! its failures are reported but do not fail the run.
//!
//! All comparisons are exact; there are no numeric tolerances. Random
//! instances come from fixed ChaCha seeds so every run sees the same inputs.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{random_curve, window_mismatch, Arrangement};
use germ_moduli::blowup::{classify, curve_tangency, nu0_and_free_points, RadialStatus};
use germ_moduli::cli::catalog;
use germ_moduli::coeffcore::{BivariatePoly, Fe, TruncatedSeries};
use germ_moduli::curvegerm::{truncate_ring_element, Branch, CurveGerm};
use germ_moduli::normalform::{act, normal_form, normalize, JetTuple};
use germ_moduli::saito::*;
use germ_moduli::semiring::{canon, minimal_generators, ValueTuple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Instances per randomized property in criterion 6.
const CASES: usize = 50;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn cat(name: &str) -> BivariatePoly {
    catalog::lookup(name).unwrap().equation_or_eliminate(32).unwrap()
}

fn rat(rng: &mut impl Rng, nonzero: bool) -> Fe {
    loop {
        let n = rng.gen_range(-5i64..=5);
        if n != 0 || !nonzero {
            return Fe::frac(n, rng.gen_range(1..=3));
        }
    }
}

fn jet(coeffs: &[Fe], n: usize) -> TruncatedSeries {
    TruncatedSeries::from_terms(coeffs.iter().enumerate().map(|(k, c)| (k + 1, c.clone())), n)
}

fn line_cusp() -> CurveGerm {
    CurveGerm::from_branches(vec![Branch::from_ints(&[(1, 1)], &[]).unwrap(), Branch::from_ints(&[(2, 1)], &[(3, 1)]).unwrap()]).unwrap()
}

fn exponents(s: &TruncatedSeries) -> Vec<usize> {
    s.terms().map(|(k, _)| k).collect()
}

fn golden_pipeline() -> Outcome {
    let curve = line_cusp();
    let (sigma, g) = curve.semiring().map_err(|e| e.to_string())?;
    ensure!(sigma == [3, 5], "conductor {sigma:?}");
    let abs: Vec<Vec<Option<u32>>> = g.absolute_points().unwrap().iter().map(|t| t.0.iter().map(|v| v.fin()).collect()).collect();
    let want = vec![vec![Some(1), Some(2)], vec![Some(2), Some(4)], vec![Some(3), None], vec![None, Some(3)]];
    ensure!(abs == want, "absolute points {abs:?}");
    let mg = minimal_generators(&curve, &g).unwrap();
    let gens: Vec<ValueTuple> = mg.values.clone();
    let want = [ValueTuple::of(&[Some(1), Some(2)]), ValueTuple::of(&[Some(3), None]), ValueTuple::of(&[None, Some(3)])];
    ensure!(gens == want, "generators {gens:?}");
    let ng = normal_form(&curve).unwrap();
    let labels: Vec<_> = ng.positions.iter().map(|p| p.label()).collect();
    ensure!(labels == [(1, 2, 2), (1, 2, 4), (2, 2, 4)], "free positions {labels:?}");
    let [g1, g2] = &ng.generators;
    ensure!(exponents(&g1.on_branches[0]) == [1] && g1.on_branches[0].coeff(1) == Fe::one(), "G1 on the line");
    ensure!(exponents(&g1.on_branches[1]).iter().all(|k| [2, 4].contains(k)), "G1 on the cusp: {:?}", exponents(&g1.on_branches[1]));
    ensure!(!g1.on_branches[1].coeff(2).is_zero(), "a = 0");
    ensure!(g2.on_branches[0].is_zero(), "G2 on the line");
    ensure!(exponents(&g2.on_branches[1]).iter().all(|k| [3, 4].contains(k)) && g2.on_branches[1].coeff(3) == Fe::one(), "G2 on the cusp");
    Ok(format!("conductor {sigma:?}, 4 absolute points, 3 generators, positions {labels:?}"))
}

#[allow(clippy::too_many_arguments)]
fn action_formula(a: &Fe, b: &Fe, c: &Fe, u: &Fe, v: &Fe, al: &Fe, be: &Fe, ga: &Fe) -> Vec<Fe> {
    let i = |n| Fe::int(n);
    let a2 = &(a * &al.pow(2)) / u;
    let num = &(&(&(&(-&(&a.pow(2) * &al.pow(4)) * v) - &(&(&(&i(2) * a) * &al.pow(2)) * &(&(be * c) * &u.pow(2)))) + &(&(&al.pow(4) * b) * &u.pow(2)))
        + &(&(&(&i(2) * a) * &(al * ga)) * &u.pow(2)))
        - &(&(&(&i(5) * a) * &be.pow(2)) * &u.pow(2));
    vec![a2, &num / &u.pow(3), &(al * c) + &(&(&i(3) * be) / al)]
}

fn action_on_line_cusp() -> Outcome {
    let ctx = normal_form(&line_cusp()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..10 {
        let (u, v, al, be, ga, de) =
            (rat(&mut rng, true), rat(&mut rng, false), rat(&mut rng, true), rat(&mut rng, false), rat(&mut rng, false), rat(&mut rng, false));
        let (a, b, c) = (rat(&mut rng, true), rat(&mut rng, false), rat(&mut rng, false));
        let phi = JetTuple::new(vec![jet(&[u.clone(), v.clone()], 3), jet(&[al.clone(), be.clone(), ga.clone(), de], 5)]).unwrap();
        let got = act(&phi, &[a.clone(), b.clone(), c.clone()], &ctx).map_err(|e| e.to_string())?;
        let want = action_formula(&a, &b, &c, &u, &v, &al, &be, &ga);
        ensure!(got == want, "trial {trial}: got {got:?}, expected {want:?}");
    }
    Ok("10 random tuples match the closed form".into())
}

fn power_sum_dimensions() -> Outcome {
    let mut dims = Vec::new();
    for (n, want) in [(4u32, 1u32), (5, 2), (6, 4), (7, 6), (8, 9)] {
        let f = cat(&format!("xn-yn-{n}"));
        let r = classify(&f).map_err(|e| format!("n = {n}: {e}"))?;
        let closed = if n % 2 == 0 { (n - 2).pow(2) / 4 } else { (n - 1) * (n - 3) / 4 };
        ensure!(closed == want, "closed form at n = {n}");
        ensure!(r.dimension == Some(want), "n = {n}: dimension {:?}", r.dimension);
        ensure!(r.nu1() == n.div_ceil(2) - 1, "n = {n}: saito number {}", r.nu1());
        if n >= 5 {
            let fp = r.free.as_ref().ok_or(format!("n = {n}: no free-point data"))?;
            ensure!(fp.with_multiplicity == n.div_ceil(2) - 2, "n = {n}: free points {}", fp.with_multiplicity);
            ensure!(fp.nu0 == 1, "n = {n}: nu0 {}", fp.nu0);
        }
        dims.push(want);
    }
    Ok(format!("dimensions {dims:?} for n = 4..8"))
}

fn double_cusp() -> Outcome {
    let f = cat("double-cusp");
    let x1 = VectorField::new(
        BivariatePoly::from_terms([(2, 0, Fe::int(2)), (0, 3, Fe::frac(5, 2)), (3, 1, Fe::frac(-9, 2))]),
        BivariatePoly::from_ints(&[(1, 1, 3), (2, 2, -3)]),
    );
    ensure!(x1.is_tangent(&f), "printed X1 is not tangent");
    let s = saito_number(&f).map_err(|e| e.to_string())?;
    ensure!(s == SaitoNumber { value: 2, certified: true }, "saito number {s:?}");
    Ok("printed X1 tangent, saito number 2".into())
}

fn line_arrangement_rows() -> Outcome {
    let rows = [
        ("smooth", 1, 0, 1, "O", None),
        ("two-lines", 2, 1, 1, "E", None),
        ("three-lines", 3, 1, 2, "Od'", None),
        ("four-lines", 4, 1, 3, "Ed'", None),
        ("five-lines", 5, 2, 2, "Od", Some(1)),
        ("six-lines", 6, 2, 3, "Ed", Some(1)),
    ];
    for (name, nu, n1, n2, ty, free) in rows {
        let f = cat(name);
        let b = find_saito_basis(&f).map_err(|e| format!("{name}: {e}"))?;
        ensure!(verify_basis(&b.x1, &b.x2, &f), "{name}: basis fails the criterion");
        let got = (f.order().unwrap(), b.nu1(), b.nu2(), b.type_name());
        ensure!(got == (nu, n1, n2, ty), "{name}: got {got:?}");
        if let Some(k) = free {
            let fp = nu0_and_free_points(&b, &f).map_err(|e| format!("{name}: {e}"))?;
            ensure!(fp.with_multiplicity == k, "{name}: {} free points", fp.with_multiplicity);
        }
    }
    Ok("six rows reproduce (nu, nu1, nu2, type) and free points".into())
}

fn saito_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..CASES {
        let a = Arrangement::random(&mut rng, 2..=5);
        let f = a.poly();
        let nu = f.order().unwrap();
        let b = find_saito_basis(&f).map_err(|e| format!("{a:?}: {e}"))?;
        ensure!(verify_basis(&b.x1, &b.x2, &f), "case {case} {a:?}: unverified basis");
        let s = b.nu1() + b.nu2();
        ensure!(s <= nu && s + 1 >= nu, "case {case} {a:?}: nu1 + nu2 = {s}, nu = {nu}");
        ensure!(2 * b.nu1() <= nu, "case {case} {a:?}: saito number {} above nu/2", b.nu1());
        let [d1, d2] = b.dicritical();
        ensure!(!(d1 && s < nu) || d2, "case {case} {a:?}: X1 dicritical, X2 not, sum nu - 1");
        ensure!(!(d1 && s == nu) || !d2, "case {case} {a:?}: both dicritical with sum nu");
    }
    for case in 0..CASES {
        let a = Arrangement::random(&mut rng, 2..=4);
        let f = a.poly();
        let l = a.fresh_line(rng.gen_range(-2..=2));
        let fl = f.mul(&l);
        let b = find_saito_basis(&f).map_err(|e| format!("{a:?}: {e}"))?;
        let nb = add_line(&b, &f, &l).map_err(|e| format!("{a:?}: add_line {e}"))?;
        ensure!(verify_basis(&nb.x1, &nb.x2, &fl), "case {case} {a:?}: add_line basis unverified");
        let back = remove_line(&nb, &f, &l).map_err(|e| format!("{a:?}: remove_line {e}"))?;
        ensure!(verify_basis(&back.x1, &back.x2, &f) && back.nu1() == b.nu1(), "case {case} {a:?}: round trip");
        let s_union = find_saito_basis(&fl).map_err(|e| e.to_string())?.nu1();
        ensure!(b.nu1() == s_union || b.nu1() + 1 == s_union, "case {case} {a:?}: s(S) = {}, s(S+l) = {s_union}", b.nu1());
    }
    Ok(format!("{CASES} bases (inequalities, dicriticality), {CASES} line round trips"))
}

fn semiring_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..CASES {
        let curve = random_curve(&mut rng, 5);
        let (sigma, g) = curve.semiring().map_err(|e| e.to_string())?;
        let members = g.members();
        for (i, a) in members.iter().enumerate().step_by(3) {
            for b in members.iter().skip(i).step_by(5) {
                ensure!(g.contains(&a.oplus(b)) && g.contains(&a.odot(b)), "case {case}: closure fails at {a}, {b}");
            }
        }
        for (key, w) in g.witnesses() {
            ensure!(&canon(&w.valuation(), &sigma) == key, "case {case}: witness for {key:?}");
        }
        ensure!(window_mismatch(&curve).is_none(), "case {case}: window differs from the rank oracle");
        let mg = minimal_generators(&curve, &g).unwrap();
        let p: Vec<u32> = sigma.iter().map(|s| (s + rng.gen_range(0..3)).saturating_sub(1)).collect();
        for e in &mg.elements {
            let t = truncate_ring_element(&curve, &sigma, e, &p).map_err(|e| e.to_string())?;
            ensure!(canon(&t.valuation(), &sigma) == canon(&e.valuation(), &sigma), "case {case}: truncation changed a value");
        }
    }
    let mut done = 0;
    while done < CASES {
        let curve = random_curve(&mut rng, 5);
        let Ok(ng) = normal_form(&curve) else { continue };
        let (sigma, g) = curve.semiring().unwrap();
        let mg = minimal_generators(&curve, &g).unwrap();
        let (i, j) = mg.pair.unwrap();
        let (g1, g2) = (&mg.elements[i], &mg.elements[j]);
        let (c, d) = (Fe::int(rng.gen_range(-3..=3)), Fe::int(rng.gen_range(-3..=3)));
        let h1 = g1.add_scaled(&c, &g1.mul(g2));
        let h2 = g2.add_scaled(&d, &g1.mul(g2));
        if canon(&h1.valuation(), &sigma) != canon(&g1.valuation(), &sigma) || canon(&h2.valuation(), &sigma) != canon(&g2.valuation(), &sigma) {
            continue;
        }
        let other = normalize(&h1, &h2, &curve).map_err(|e| e.to_string())?;
        ensure!(other.positions == ng.positions && other.coeffs == ng.coeffs, "normal form depends on the witnesses");
        done += 1;
    }
    Ok(format!("{CASES} curves (closure, witnesses, rank oracle, truncation), {CASES} normalizations"))
}

/// Soft checks: returns the list of violations instead of failing.
fn genericity() -> (usize, Vec<String>) {
    let mut checked = 0;
    let mut issues = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for name in ["two-lines", "three-lines", "four-lines", "xn-yn-4", "xn-yn-5", "double-cusp"] {
        let f = cat(name);
        let nu = f.order().unwrap();
        // stay above the Newton boundary so the topological type is kept
        let deg = if curve_tangency(&f).is_empty() { nu + 1 } else { nu + 2 };
        for _ in 0..3 {
            let mut g = f.clone();
            for _ in 0..2 {
                let j = rng.gen_range(0..=deg);
                g = g.add(&BivariatePoly::term(rat(&mut rng, true), deg - j, j));
            }
            checked += 1;
            let Ok(r) = classify(&g) else {
                issues.push(format!("{name} perturbed: no basis"));
                continue;
            };
            let radial = r.radial != RadialStatus::NotRadial;
            let bound = if radial { nu.div_ceil(2) - 1 } else { nu / 2 };
            if r.nu1() < bound {
                issues.push(format!("{name} perturbed: saito number {} below {bound}", r.nu1()));
            }
        }
    }
    // a straight line would keep homogeneous arrangements homogeneous
    let line = BivariatePoly::from_ints(&[(0, 1, 1), (1, 0, -7), (2, 0, -1)]);
    for name in ["smooth", "four-lines", "xn-yn-4", "six-lines", "xn-yn-6"] {
        let f = cat(name);
        let b = find_saito_basis(&f).unwrap();
        let expect: &[&str] = match b.type_name() {
            "O" => &["E"],
            "Ed" | "Ed'" => &["Od", "Od'"],
            _ => continue,
        };
        checked += 1;
        match find_saito_basis(&f.mul(&line)) {
            Ok(u) if expect.contains(&u.type_name()) => {}
            Ok(u) => issues.push(format!("{name} ({}) plus a line is {}", b.type_name(), u.type_name())),
            Err(e) => issues.push(format!("{name} plus a line: {e}")),
        }
    }
    (checked, issues)
}

fn report(id: &str, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
    let secs = t.elapsed().as_secs_f64();
    match &r {
        Ok(detail) => println!("[PASS] {id} {title}: {detail} ({secs:.1}s)"),
        Err(detail) => println!("[FAIL] {id} {title}: {detail} ({secs:.1}s)"),
    }
    r.is_ok()
}

fn main() {
    let mut ok = true;
    ok &= report("1", "golden line + cusp pipeline", golden_pipeline);
    ok &= report("2", "action formula on the line + cusp", action_on_line_cusp);
    ok &= report("3", "generic x^n + y^n dimensions", power_sum_dimensions);
    ok &= report("4", "double cusp", double_cusp);
    ok &= report("5", "catalog table rows", line_arrangement_rows);
    ok &= report("6a", "Saito basis properties", saito_properties);
    ok &= report("6b", "semiring and normal form properties", semiring_properties);
    let t = Instant::now();
    let (n, issues) = genericity();
    let secs = t.elapsed().as_secs_f64();
    if issues.is_empty() {
        println!("[PASS] 7 genericity checks (advisory): {n} instances ({secs:.1}s)");
    } else {
        println!("[FAIL] 7 genericity checks (advisory, not fatal): {} of {n} instances: {} ({secs:.1}s)", issues.len(), issues.join("; "));
    }
    if !ok {
        std::process::exit(1);
    }
}
