//! One blow-up of the origin: chart transforms of functions and vector fields,
//! tangency and index loci on the exceptional divisor, the six-shape
//! classification and the closed-form moduli dimension.

use std::fmt;

use serde_json::json;

use crate::coeffcore::upoly::UPoly;
use crate::coeffcore::{poly_divide_exact, BivariatePoly, Fe};
use crate::error::{Error, Result};
use crate::saito::{saito_data, SaitoBasis, SaitoType, TangentModuleSlice, VectorField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartPoly {
    /// 1: (x, y) = (x1, x1 y1), divisor x1 = 0.  2: (x, y) = (x2 y2, y2), divisor y2 = 0.
    pub chart: u8,
    pub poly: BivariatePoly,
    /// Power of the divisor coordinate removed.
    pub exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartField {
    pub chart: u8,
    pub field: VectorField,
    /// E*X was divided by the divisor coordinate to this power (−1 when X(0) ≠ 0).
    pub exponent: i32,
}

fn chart_maps(chart: u8) -> (BivariatePoly, BivariatePoly) {
    let xy = BivariatePoly::from_ints(&[(1, 1, 1)]);
    match chart {
        1 => (BivariatePoly::x(), xy),
        _ => (xy, BivariatePoly::y()),
    }
}

fn divisor_order(p: &BivariatePoly, chart: u8) -> Option<u32> {
    if chart == 1 {
        p.x_adic_order()
    } else {
        p.y_adic_order()
    }
}

fn divide_divisor(p: &BivariatePoly, chart: u8, k: u32) -> BivariatePoly {
    if p.is_zero() {
        return p.clone();
    }
    if chart == 1 {
        p.div_mono(k, 0)
    } else {
        p.div_mono(0, k)
    }
}

pub fn blow_up_poly(f: &BivariatePoly) -> [ChartPoly; 2] {
    [1u8, 2].map(|chart| {
        let (sx, sy) = chart_maps(chart);
        let g = f.substitute(&sx, &sy);
        let k = divisor_order(&g, chart).unwrap_or(0);
        ChartPoly { chart, poly: divide_divisor(&g, chart, k), exponent: k }
    })
}

/// X^E in both charts, divided by the maximal power of the divisor.
pub fn blow_up_field(x: &VectorField) -> [ChartField; 2] {
    [1u8, 2].map(|chart| {
        let (sx, sy) = chart_maps(chart);
        let a = x.a.substitute(&sx, &sy);
        let b = x.b.substitute(&sx, &sy);
        // multiplied by the divisor coordinate so that both components are polynomial
        let w = match chart {
            1 => VectorField::new(a.mul(&BivariatePoly::x()), b.sub(&a.mul(&BivariatePoly::y()))),
            _ => VectorField::new(a.sub(&b.mul(&BivariatePoly::x())), b.mul(&BivariatePoly::y())),
        };
        let k = match (divisor_order(&w.a, chart), divisor_order(&w.b, chart)) {
            (Some(p), Some(q)) => p.min(q),
            (p, q) => p.or(q).unwrap_or(0),
        };
        let field = VectorField::new(divide_divisor(&w.a, chart, k), divide_divisor(&w.b, chart, k));
        ChartField { chart, field, exponent: k as i32 - 1 }
    })
}

/// A point of the exceptional divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisorPoint {
    /// y1 = c in the first chart (the direction y = c x).
    Slope(Fe),
    /// x2 = 0 in the second chart (the direction x = 0).
    Infinity,
    /// The roots of an irreducible-or-squarefree monic factor in y1 without
    /// rational roots; `degree` conjugate points.
    Factor { coeffs: Vec<Fe>, degree: usize },
}

impl DivisorPoint {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            DivisorPoint::Slope(c) => json!({ "slope": c.to_json() }),
            DivisorPoint::Infinity => json!({ "slope": "inf" }),
            DivisorPoint::Factor { coeffs, degree } => {
                json!({ "factor": coeffs.iter().map(Fe::to_json).collect::<Vec<_>>(), "degree": degree })
            }
        }
    }

    /// Number of geometric points the record stands for.
    pub fn count(&self) -> usize {
        match self {
            DivisorPoint::Factor { degree, .. } => *degree,
            _ => 1,
        }
    }
}

impl fmt::Display for DivisorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivisorPoint::Slope(c) => write!(f, "y1={c}"),
            DivisorPoint::Infinity => write!(f, "x2=0"),
            DivisorPoint::Factor { coeffs, degree } => {
                let u = UPoly::from_fe(coeffs.clone());
                write!(f, "roots of degree-{degree} factor {:?}", u.coeff_fe().iter().map(|c| c.to_string()).collect::<Vec<_>>())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangencyPoint {
    pub point: DivisorPoint,
    /// Order at each geometric point of the record.
    pub order: usize,
}

impl TangencyPoint {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.point.to_json();
        v["order"] = json!(self.order);
        v
    }

    /// Order summed over the geometric points of the record.
    pub fn weight(&self) -> usize {
        self.order * self.point.count()
    }
}

fn derivative(p: &UPoly) -> UPoly {
    UPoly::from_fe(p.coeff_fe().iter().enumerate().skip(1).map(|(k, c)| c * &Fe::int(k as i64)).collect())
}

/// Squarefree decomposition (Yun): pairs (factor, multiplicity).
fn squarefree(p: &UPoly) -> Vec<(UPoly, usize)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = derivative(p);
    let mut a = p.gcd(&dp);
    let mut b = p.divrem(&a).0;
    let mut c = dp.divrem(&a).0;
    let mut d = c.sub(&derivative(&b));
    let mut k = 1;
    while b.degree().unwrap_or(0) > 0 {
        a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), k));
        }
        b = b.divrem(&a).0;
        c = d.divrem(&a).0;
        d = c.sub(&derivative(&b));
        k += 1;
    }
    out
}

fn upoly_of(coeffs: Vec<Fe>) -> UPoly {
    UPoly::from_fe(coeffs)
}

/// Points of the divisor from the first-chart restriction p(y1) and the order
/// at infinity read in the second chart.
fn locus(p: &UPoly, inf_order: usize, min_order: usize) -> Vec<TangencyPoint> {
    let mut out = Vec::new();
    let mut rest = p.clone();
    for (c, m) in p.rational_roots() {
        let lin = UPoly::from_fe(vec![Fe::from_q(-c.clone()), Fe::one()]);
        for _ in 0..m {
            rest = rest.divrem(&lin).0;
        }
        if m >= min_order {
            out.push(TangencyPoint { point: DivisorPoint::Slope(Fe::from_q(c)), order: m });
        }
    }
    // the field may be an extension: rational_roots only sees rational coefficients
    for (g, m) in squarefree(&rest) {
        if m < min_order {
            continue;
        }
        let g = g.monic();
        let degree = g.degree().unwrap();
        if degree == 1 {
            let c = -g.coeff_fe()[0].clone();
            out.push(TangencyPoint { point: DivisorPoint::Slope(c), order: m });
        } else {
            out.push(TangencyPoint { point: DivisorPoint::Factor { coeffs: g.coeff_fe().to_vec(), degree }, order: m });
        }
    }
    if inf_order >= min_order.max(1) {
        out.push(TangencyPoint { point: DivisorPoint::Infinity, order: inf_order });
    }
    out
}

fn restrict_y0(p: &BivariatePoly) -> Vec<Fe> {
    p.substitute(&BivariatePoly::y(), &BivariatePoly::x()).restrict_x0()
}

fn order_at_zero(c: &[Fe]) -> Option<usize> {
    c.iter().position(|x| !x.is_zero())
}

/// Tan(X^E, D): zeros on D of X^E·F for a local equation F of D.
pub fn tangency_locus(x: &VectorField) -> Result<Vec<TangencyPoint>> {
    let [c1, c2] = blow_up_field(x);
    let p = upoly_of(c1.field.a.restrict_x0());
    if p.is_zero() {
        return Err(Error::Precondition("the divisor is invariant; use the index locus".into()));
    }
    let inf = order_at_zero(&restrict_y0(&c2.field.b)).unwrap_or(0);
    Ok(locus(&p, inf, 1))
}

/// Indices of X^E along an invariant divisor (non-dicritical X).
pub fn index_locus(x: &VectorField) -> Result<Vec<TangencyPoint>> {
    let [c1, c2] = blow_up_field(x);
    if !c1.field.a.restrict_x0().iter().all(Fe::is_zero) {
        return Err(Error::Precondition("the divisor is not invariant; use the tangency locus".into()));
    }
    let p = upoly_of(c1.field.b.restrict_x0());
    if p.is_zero() {
        return Err(Error::Precondition("the blown-up field vanishes along the divisor".into()));
    }
    let inf = order_at_zero(&restrict_y0(&c2.field.a)).unwrap_or(0);
    Ok(locus(&p, inf, 1))
}

/// Tan(S^E, D): directions of the tangent cone where the strict transform is
/// not transverse to D, with the intersection multiplicity of S^E and D there.
pub fn curve_tangency(f: &BivariatePoly) -> Vec<TangencyPoint> {
    let [c1, c2] = blow_up_poly(f);
    let p = upoly_of(c1.poly.restrict_x0());
    let inf = order_at_zero(&restrict_y0(&c2.poly)).unwrap_or(0);
    locus(&p, inf, 2)
}

/// ind(X, {x=0}, 0) = ν_y(b(0,y)) for an invariant axis.
pub fn index(x: &VectorField) -> Result<u32> {
    if !x.a.restrict_x0().iter().all(Fe::is_zero) {
        return Err(Error::Precondition("{x=0} is not invariant; the index is undefined".into()));
    }
    order_at_zero(&x.b.restrict_x0()).map(|k| k as u32).ok_or_else(|| Error::Precondition("b(0,y) vanishes identically".into()))
}

/// tan(X, {x=0}, 0) = ν_y(a(0,y)) for a non-invariant axis.
pub fn tangency_order(x: &VectorField) -> Result<u32> {
    order_at_zero(&x.a.restrict_x0()).map(|k| k as u32).ok_or_else(|| Error::Precondition("{x=0} is invariant; the tangency order is undefined".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialStatus {
    NotRadial,
    Radial,
    PureRadial,
}

impl RadialStatus {
    pub fn label(self) -> &'static str {
        match self {
            RadialStatus::NotRadial => "not_radial",
            RadialStatus::Radial => "radial",
            RadialStatus::PureRadial => "pure_radial",
        }
    }
}

/// Radial iff every optimal field is dicritical; pure radial iff the adapted
/// basis has one of the two primed shapes.
pub fn radial_status(basis: &SaitoBasis) -> RadialStatus {
    let [d1, d2] = basis.dicritical();
    let radial = d1 && (basis.nu1() < basis.nu2() || d2);
    match (radial, basis.type_label.is_some_and(SaitoType::is_pure_radial)) {
        (false, _) => RadialStatus::NotRadial,
        (true, false) => RadialStatus::Radial,
        (true, true) => RadialStatus::PureRadial,
    }
}

pub fn radial_tests(f: &BivariatePoly) -> Result<RadialStatus> {
    let (_, b) = saito_data(f)?;
    Ok(radial_status(&b))
}

/// Binary-form gcd through the dehomogenization at x = 1.
pub fn form_gcd(p: &BivariatePoly, q: &BivariatePoly) -> BivariatePoly {
    if p.is_zero() {
        return q.clone();
    }
    if q.is_zero() {
        return p.clone();
    }
    let dehom = |f: &BivariatePoly| {
        let d = f.degree().unwrap();
        let mut c = vec![Fe::zero(); d as usize + 1];
        for (m, v) in f.terms() {
            c[m.1 as usize] = v.clone();
        }
        let u = UPoly::from_fe(c);
        let at_inf = d as usize - u.degree().unwrap();
        (u, at_inf)
    };
    let (u, ku) = dehom(p);
    let (v, kv) = dehom(q);
    let g = u.gcd(&v);
    let dg = g.degree().unwrap();
    let xpow = ku.min(kv) as u32;
    BivariatePoly::from_terms(g.coeff_fe().iter().enumerate().map(|(j, c)| ((dg - j) as u32 + xpow, j as u32, c.clone())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreePoints {
    pub nu0: u32,
    /// ν(X1) − ν0, counted with tangency order.
    pub with_multiplicity: u32,
    /// Distinct geometric points, when X1 is dicritical.
    pub distinct: Option<u32>,
    /// Tangency-order count from the blow-up, when X1 is dicritical.
    pub from_tangency: Option<u32>,
}

/// ν0 = deg gcd of the initial parts (proportional primitive parts), and the
/// free-point counts of X1.
pub fn nu0_and_free_points(basis: &SaitoBasis, f: &BivariatePoly) -> Result<FreePoints> {
    let nu = f.order().unwrap();
    if basis.nu1() + basis.nu2() + 1 != nu {
        return Err(Error::Precondition("ν0 is defined when ν1 + ν2 = ν(S) − 1".into()));
    }
    let i1 = basis.x1.initial();
    let i2 = basis.x2.initial();
    let g1 = form_gcd(&i1.a, &i1.b);
    let g2 = form_gcd(&i2.a, &i2.b);
    let prim = |i: &VectorField, g: &BivariatePoly| {
        let (a, ea) = poly_divide_exact(&i.a, g);
        let (b, eb) = poly_divide_exact(&i.b, g);
        debug_assert!((ea || i.a.is_zero()) && (eb || i.b.is_zero()));
        VectorField::new(a, b)
    };
    let (p1, p2) = (prim(&i1, &g1), prim(&i2, &g2));
    if !p1.wedge(&p2).is_zero() {
        return Err(Error::Inconsistent("initial parts of the adapted basis are not proportional".into()));
    }
    let g = form_gcd(&g1, &g2);
    let nu0 = g.degree().unwrap() + p1.degree().unwrap_or(0);
    let with_multiplicity = basis.nu1().checked_sub(nu0).ok_or_else(|| Error::Inconsistent("ν0 exceeds ν(X1)".into()))?;
    let (distinct, from_tangency) = if basis.x1.is_dicritical() {
        let (d, w) = free_tangency(&basis.x1, f)?;
        (Some(d), Some(w))
    } else {
        (None, None)
    };
    Ok(FreePoints { nu0, with_multiplicity, distinct, from_tangency })
}

/// Tangency points of X1^E off Tan(S^E, D): (distinct count, count with order).
pub fn free_tangency(x1: &VectorField, f: &BivariatePoly) -> Result<(u32, u32)> {
    let tx = tangency_locus(x1)?;
    let ts = curve_tangency(f);
    let [c1, _] = blow_up_poly(f);
    let cone = UPoly::from_fe(c1.poly.restrict_x0());
    // multiple roots of the tangent cone, as one squarefree polynomial
    let multiple = squarefree(&cone).into_iter().filter(|(_, m)| *m >= 2).fold(UPoly::one(), |acc, (g, _)| acc.mul(&g));
    let (mut distinct, mut weight) = (0u32, 0u32);
    for t in &tx {
        let on_curve = match &t.point {
            DivisorPoint::Infinity => ts.iter().any(|s| s.point == DivisorPoint::Infinity),
            DivisorPoint::Slope(c) => multiple.eval(c).is_zero(),
            DivisorPoint::Factor { coeffs, .. } => multiple.gcd(&UPoly::from_fe(coeffs.clone())).degree().unwrap_or(0) > 0,
        };
        if !on_curve {
            distinct += t.point.count() as u32;
            weight += t.weight() as u32;
        }
    }
    Ok((distinct, weight))
}

fn tri(k: u32) -> u32 {
    // (k−1)(k−2)/2 as a binomial, so k = 0 contributes nothing
    if k < 3 {
        0
    } else {
        (k - 1) * (k - 2) / 2
    }
}

pub fn moduli_dimension(nu1: u32, nu2: u32, nus: u32, nu0: Option<u32>) -> Result<u32> {
    let base = tri(nu1) + tri(nu2);
    if nu1 + nu2 == nus {
        return Ok(base);
    }
    if nu1 + nu2 + 1 == nus {
        let nu0 = nu0.ok_or_else(|| Error::Precondition("ν0 is required when ν1 + ν2 = ν(S) − 1".into()))?;
        return (base + nus).checked_sub(2 + nu0).ok_or_else(|| Error::Inconsistent("negative dimension".into()));
    }
    Err(Error::Precondition(format!("ν1 + ν2 = {} is outside {{ν(S) − 1, ν(S)}} = {{{}, {}}}", nu1 + nu2, nus - 1, nus)))
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub nu_s: u32,
    pub basis: SaitoBasis,
    pub radial: RadialStatus,
    pub free: Option<FreePoints>,
    pub tan_s: Vec<TangencyPoint>,
    pub dimension: Option<u32>,
    /// Why the dimension is absent, or which rule produced it.
    pub dimension_note: Option<String>,
    pub degree_bound: u32,
}

impl ClassificationReport {
    pub fn nu1(&self) -> u32 {
        self.basis.nu1()
    }

    pub fn nu2(&self) -> u32 {
        self.basis.nu2()
    }

    pub fn type_label(&self) -> Option<SaitoType> {
        self.basis.type_label
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "nuS": self.nu_s,
            "nu1": self.nu1(),
            "nu2": self.nu2(),
            "type": self.basis.type_name(),
            "dicritical": self.basis.dicritical(),
            "radial": self.radial.label(),
            "nu0": self.free.map(|f| f.nu0),
            "free_points": self.free.map(|f| f.with_multiplicity),
            "free_points_distinct": self.free.and_then(|f| f.distinct),
            "tan_S": self.tan_s.iter().map(TangencyPoint::to_json).collect::<Vec<_>>(),
            "dimension": self.dimension,
            "dimension_note": self.dimension_note,
            "saito_basis": self.basis.to_json(),
        })
    }
}

/// Saito basis → adapted shape → dicriticality → ν0 and free points → dimension.
pub fn classify(f: &BivariatePoly) -> Result<ClassificationReport> {
    let (slice, basis) = saito_data(f)?;
    classify_with(f, &slice, basis)
}

pub fn classify_with(f: &BivariatePoly, slice: &TangentModuleSlice, basis: SaitoBasis) -> Result<ClassificationReport> {
    let nu_s = f.order().unwrap();
    let tan_s = curve_tangency(f);
    let radial = radial_status(&basis);
    let free = if basis.nu1() + basis.nu2() + 1 == nu_s { Some(nu0_and_free_points(&basis, f)?) } else { None };
    let (dimension, note) = if nu_s <= 2 {
        (Some(0), Some("multiplicity at most 2: the moduli space is a point".to_string()))
    } else if !tan_s.is_empty() {
        (None, Some("unsupported: the curve is not resolved by a single blow-up".to_string()))
    } else if basis.type_label.is_none() {
        (None, Some("unsupported: the adapted basis has no generic shape, so the curve is not generic in its moduli".to_string()))
    } else {
        match moduli_dimension(basis.nu1(), basis.nu2(), nu_s, free.map(|x| x.nu0)) {
            Ok(d) => (Some(d), None),
            Err(e) => (None, Some(format!("unsupported: {e}"))),
        }
    };
    Ok(ClassificationReport { nu_s, basis, radial, free, tan_s, dimension, dimension_note: note, degree_bound: slice.degree_bound })
}
