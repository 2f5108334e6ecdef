//! Logarithmic vector fields along a plane curve: degree-bounded slices of the
//! tangent module, Saito bases and their adapted shapes, and the surgeries that
//! add or remove a smooth component.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::json;

use crate::coeffcore::linalg::{nullspace, solve, Rref, SparseVec};
use crate::coeffcore::{poly_divide_exact, BivariatePoly, Fe, Mono};
use crate::error::{Error, Result};

/// X = a ∂x + b ∂y with polynomial components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub a: BivariatePoly,
    pub b: BivariatePoly,
}

impl VectorField {
    pub fn new(a: BivariatePoly, b: BivariatePoly) -> Self {
        VectorField { a, b }
    }

    pub fn from_ints(a: &[(u32, u32, i64)], b: &[(u32, u32, i64)]) -> Self {
        VectorField::new(BivariatePoly::from_ints(a), BivariatePoly::from_ints(b))
    }

    pub fn zero() -> Self {
        VectorField::new(BivariatePoly::zero(), BivariatePoly::zero())
    }

    /// x ∂x + y ∂y
    pub fn radial() -> Self {
        VectorField::new(BivariatePoly::x(), BivariatePoly::y())
    }

    /// f_x ∂y − f_y ∂x
    pub fn hamiltonian(f: &BivariatePoly) -> Self {
        VectorField::new(f.dy().neg(), f.dx())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn valuation(&self) -> Option<u32> {
        match (self.a.order(), self.b.order()) {
            (Some(p), Some(q)) => Some(p.min(q)),
            (p, q) => p.or(q),
        }
    }

    pub fn degree(&self) -> Option<u32> {
        match (self.a.degree(), self.b.degree()) {
            (Some(p), Some(q)) => Some(p.max(q)),
            (p, q) => p.or(q),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        VectorField::new(self.a.homogeneous_part(d), self.b.homogeneous_part(d))
    }

    pub fn initial(&self) -> Self {
        match self.valuation() {
            Some(v) => self.homogeneous_part(v),
            None => Self::zero(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        VectorField::new(self.a.add(&o.a), self.b.add(&o.b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        VectorField::new(self.a.sub(&o.a), self.b.sub(&o.b))
    }

    pub fn scale(&self, s: &Fe) -> Self {
        VectorField::new(self.a.scale(s), self.b.scale(s))
    }

    pub fn mul_poly(&self, p: &BivariatePoly) -> Self {
        VectorField::new(self.a.mul(p), self.b.mul(p))
    }

    /// a₁b₂ − a₂b₁
    pub fn wedge(&self, o: &Self) -> BivariatePoly {
        self.a.mul(&o.b).sub(&o.a.mul(&self.b))
    }

    /// X·f
    pub fn apply(&self, f: &BivariatePoly) -> BivariatePoly {
        self.a.mul(&f.dx()).add(&self.b.mul(&f.dy()))
    }

    /// X·f ∈ (f), checked by exact division.
    pub fn is_tangent(&self, f: &BivariatePoly) -> bool {
        let xf = self.apply(f);
        xf.is_zero() || poly_divide_exact(&xf, f).1
    }

    /// Initial part is a multiple of the radial field: y·A − x·B ≡ 0.
    pub fn is_dicritical(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let i = self.initial();
        i.a.mul(&BivariatePoly::y()).sub(&i.b.mul(&BivariatePoly::x())).is_zero()
    }

    /// Exchange the roles of x and y.
    pub fn swapped(&self) -> Self {
        let (x, y) = (BivariatePoly::x(), BivariatePoly::y());
        VectorField::new(self.b.substitute(&y, &x), self.a.substitute(&y, &x))
    }

    /// Substitute into both components (no Jacobian factor).
    pub fn substitute(&self, xs: &BivariatePoly, ys: &BivariatePoly) -> Self {
        VectorField::new(self.a.substitute(xs, ys), self.b.substitute(xs, ys))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "a": self.a.to_json(), "b": self.b.to_json() })
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})∂x + ({})∂y", self.a, self.b)
    }
}

/// The six generic shapes of an adapted Saito basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SaitoType {
    E,
    Ed,
    EdPrime,
    O,
    Od,
    OdPrime,
}

impl SaitoType {
    pub fn label(self) -> &'static str {
        match self {
            SaitoType::E => "E",
            SaitoType::Ed => "Ed",
            SaitoType::EdPrime => "Ed'",
            SaitoType::O => "O",
            SaitoType::Od => "Od",
            SaitoType::OdPrime => "Od'",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::E, Self::Ed, Self::EdPrime, Self::O, Self::Od, Self::OdPrime].into_iter().find(|t| t.label() == s)
    }

    /// Match (ν(S), ν1, ν2, dicritical flags) against the table of shapes.
    pub fn from_data(nu: u32, nu1: u32, nu2: u32, d1: bool, d2: bool) -> Option<Self> {
        let (n1, n2) = (nu1 as i64, nu2 as i64);
        let nu = nu as i64;
        let t = if nu % 2 == 0 {
            let m = nu / 2;
            match (n1 - m, n2 - m, d1, d2) {
                (0, 0, false, false) => SaitoType::E,
                (-1, 0, true, true) => SaitoType::Ed,
                (-1, 1, true, false) => SaitoType::EdPrime,
                _ => return None,
            }
        } else {
            let m = (nu - 1) / 2;
            match (n1 - m, n2 - m, d1, d2) {
                (0, 1, false, false) => SaitoType::O,
                (0, 0, true, true) => SaitoType::Od,
                (0, 1, true, false) => SaitoType::OdPrime,
                _ => return None,
            }
        };
        Some(t)
    }

    pub fn is_pure_radial(self) -> bool {
        matches!(self, SaitoType::EdPrime | SaitoType::OdPrime)
    }
}

impl fmt::Display for SaitoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug)]
pub struct SaitoBasis {
    pub x1: VectorField,
    pub x2: VectorField,
    /// X1 ∧ X2 = unit · f
    pub unit: BivariatePoly,
    pub type_label: Option<SaitoType>,
}

impl SaitoBasis {
    pub fn nu1(&self) -> u32 {
        self.x1.valuation().unwrap_or(0)
    }

    pub fn nu2(&self) -> u32 {
        self.x2.valuation().unwrap_or(0)
    }

    pub fn dicritical(&self) -> [bool; 2] {
        [self.x1.is_dicritical(), self.x2.is_dicritical()]
    }

    pub fn type_name(&self) -> &'static str {
        self.type_label.map_or("unclassified", SaitoType::label)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "nu1": self.nu1(),
            "nu2": self.nu2(),
            "type": self.type_name(),
            "unit_constant": self.unit.constant_term().to_json(),
            "x1": self.x1.to_json(),
            "x2": self.x2.to_json(),
        })
    }
}

/// Deterministic generic scalars: the primes 2, 3, 5, 7, ...
pub fn generic_scalar(k: usize) -> Fe {
    let mut found = 0;
    let mut n: i64 = 1;
    loop {
        n += 1;
        if (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0) {
            if found == k {
                return Fe::int(n);
            }
            found += 1;
        }
    }
}

/// Polynomial members of the tangent module with deg a, deg b ≤ D, echelonized
/// so that valuations are non-decreasing and each tier spans the initial parts
/// of that valuation.
#[derive(Clone, Debug)]
pub struct TangentModuleSlice {
    pub degree_bound: u32,
    pub fields: Vec<VectorField>,
}

impl TangentModuleSlice {
    pub fn valuations(&self) -> Vec<u32> {
        self.fields.iter().map(|x| x.valuation().unwrap()).collect()
    }

    pub fn min_valuation(&self) -> Option<u32> {
        self.fields.first().and_then(VectorField::valuation)
    }

    /// Members whose valuation is exactly v.
    pub fn tier(&self, v: u32) -> Vec<&VectorField> {
        self.fields.iter().filter(|x| x.valuation() == Some(v)).collect()
    }
}

struct Layout {
    coords: Vec<(u32, u32, u8)>,
}

impl Layout {
    // ordered by total degree first so that echelon pivots track valuation
    fn new(d: u32) -> Self {
        let mut coords = Vec::new();
        for deg in 0..=d {
            for i in (0..=deg).rev() {
                coords.push((i, deg - i, 0));
                coords.push((i, deg - i, 1));
            }
        }
        Layout { coords }
    }

    fn field(&self, v: &SparseVec) -> VectorField {
        let mut x = VectorField::zero();
        for (k, c) in v {
            let (i, j, comp) = self.coords[*k];
            if comp == 0 {
                x.a.add_term(i, j, c);
            } else {
                x.b.add_term(i, j, c);
            }
        }
        x
    }
}

fn check_curve(f: &BivariatePoly) -> Result<()> {
    if f.is_zero() || !f.constant_term().is_zero() {
        return Err(Error::Precondition("the equation must vanish at the origin".into()));
    }
    Ok(())
}

pub fn tangent_slice(f: &BivariatePoly, d: u32) -> Result<TangentModuleSlice> {
    check_curve(f)?;
    let (fx, fy) = (f.dx(), f.dy());
    let lay = Layout::new(d);
    let nab = lay.coords.len();
    // deg(a f_x + b f_y) < D + deg f forces deg h ≤ D − 1
    let mut hmonos = Vec::new();
    if d > 0 {
        for deg in 0..d {
            for i in (0..=deg).rev() {
                hmonos.push((i, deg - i));
            }
        }
    }
    let mut rows: BTreeMap<(u32, u32), SparseVec> = BTreeMap::new();
    for (col, &(i, j, comp)) in lay.coords.iter().enumerate() {
        let g = if comp == 0 { &fx } else { &fy };
        for (m, c) in g.terms() {
            rows.entry((m.0 + i, m.1 + j)).or_default().insert(col, c.clone());
        }
    }
    for (k, &(i, j)) in hmonos.iter().enumerate() {
        for (m, c) in f.terms() {
            rows.entry((m.0 + i, m.1 + j)).or_default().insert(nab + k, -c);
        }
    }
    let rows: Vec<SparseVec> = rows.into_values().collect();
    let mut e = Rref::new();
    for v in nullspace(&rows, nab + hmonos.len()) {
        let p: SparseVec = v.into_iter().filter(|(k, _)| *k < nab).collect();
        e.insert(&p);
    }
    let fields: Vec<VectorField> = e.rows().map(|(_, r)| lay.field(r)).collect();
    if let Some(bad) = fields.iter().find(|x| !x.is_tangent(f)) {
        return Err(Error::Inconsistent(format!("slice member {bad} fails the exact tangency identity")));
    }
    Ok(TangentModuleSlice { degree_bound: d, fields })
}

/// (X1∧X2)/f when the division is exact; ok iff the quotient is a unit.
pub fn criterion_check(x1: &VectorField, x2: &VectorField, f: &BivariatePoly) -> (bool, Option<BivariatePoly>) {
    let w = x1.wedge(x2);
    if w.is_zero() {
        return (false, None);
    }
    let (q, exact) = poly_divide_exact(&w, f);
    if !exact {
        return (false, None);
    }
    let ok = !q.constant_term().is_zero();
    (ok, Some(q))
}

/// Criterion plus tangency of both fields.
pub fn verify_basis(x1: &VectorField, x2: &VectorField, f: &BivariatePoly) -> bool {
    criterion_check(x1, x2, f).0 && x1.is_tangent(f) && x2.is_tangent(f)
}

pub fn default_degree_bound(f: &BivariatePoly) -> u32 {
    2 * f.degree().unwrap_or(1).max(1)
}

fn combine(fields: &[&VectorField], seed: usize) -> VectorField {
    fields.iter().enumerate().fold(VectorField::zero(), |acc, (k, x)| acc.add(&x.scale(&generic_scalar(seed + k))))
}

fn wedge_constant(x1: &VectorField, y: &VectorField, f: &BivariatePoly) -> Fe {
    let w = x1.wedge(y);
    if w.is_zero() {
        return Fe::zero();
    }
    let (q, exact) = poly_divide_exact(&w, f);
    if exact {
        q.constant_term()
    } else {
        Fe::zero()
    }
}

/// Basis read off one slice, or None when the slice is too small to contain one.
pub fn find_saito_basis_in(f: &BivariatePoly, slice: &TangentModuleSlice) -> Result<Option<SaitoBasis>> {
    find_saito_basis_seeded(f, slice, 0)
}

/// As [`find_saito_basis_in`], drawing generic scalars from index `seed` on.
pub fn find_saito_basis_seeded(f: &BivariatePoly, slice: &TangentModuleSlice, seed: usize) -> Result<Option<SaitoBasis>> {
    let Some(s) = slice.min_valuation() else {
        return Ok(None);
    };
    let tier = slice.tier(s);
    let all_dic = tier.iter().all(|x| x.is_dicritical());
    let x1 = (0..8)
        .map(|k| combine(&tier, seed + k * tier.len()))
        .find(|x| x.is_dicritical() == all_dic)
        .ok_or_else(|| Error::Bound("no generic optimal field among the tried scalars".into()))?;
    // complement of largest valuation; the slice is sorted, so the last hit wins
    let Some(x2) = slice.fields.iter().rev().find(|y| !wedge_constant(&x1, y, f).is_zero()) else {
        return Ok(None);
    };
    let (_, unit) = criterion_check(&x1, x2, f);
    let basis = SaitoBasis { x1, x2: x2.clone(), unit: unit.unwrap(), type_label: None };
    adapt_basis_seeded(&basis, f, seed).map(Some)
}

/// Slice and verified basis, escalating the degree bound up to twice the default.
pub fn saito_data(f: &BivariatePoly) -> Result<(TangentModuleSlice, SaitoBasis)> {
    saito_data_with(f, default_degree_bound(f))
}

/// Bounds tried in order: ν+1, doubled while below D, then D and 2D. Any
/// verified basis fixes the adapted shape, so small bounds only save time.
pub fn degree_schedule(f: &BivariatePoly, d: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut b = f.order().unwrap_or(1) + 1;
    while b < d {
        out.push(b);
        b *= 2;
    }
    out.extend([d, 2 * d]);
    out
}

pub fn saito_data_with(f: &BivariatePoly, d: u32) -> Result<(TangentModuleSlice, SaitoBasis)> {
    saito_data_seeded(f, d, 0)
}

pub fn saito_data_seeded(f: &BivariatePoly, d: u32, seed: usize) -> Result<(TangentModuleSlice, SaitoBasis)> {
    check_curve(f)?;
    for bound in degree_schedule(f, d) {
        let slice = tangent_slice(f, bound)?;
        if let Some(b) = find_saito_basis_seeded(f, &slice, seed)? {
            return Ok((slice, b));
        }
    }
    Err(Error::Bound(format!("no Saito basis with polynomial degree ≤ {}", 2 * d)))
}

pub fn find_saito_basis(f: &BivariatePoly) -> Result<SaitoBasis> {
    saito_data(f).map(|(_, b)| b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SaitoNumber {
    pub value: u32,
    /// False when only a lower bound from the slice is known.
    pub certified: bool,
}

/// A verified basis certifies the minimum; without one the slice minimum at 2D
/// is returned as a lower bound.
pub fn saito_number(f: &BivariatePoly) -> Result<SaitoNumber> {
    match saito_data(f) {
        Ok((_, b)) => Ok(SaitoNumber { value: b.nu1(), certified: true }),
        Err(Error::Bound(_)) => {
            let slice = tangent_slice(f, 2 * default_degree_bound(f))?;
            let value = slice.min_valuation().ok_or_else(|| Error::Bound("empty tangent slice".into()))?;
            Ok(SaitoNumber { value, certified: false })
        }
        Err(e) => Err(e),
    }
}

/// Homogeneous h of degree k with h·init1 = target, if any.
fn solve_multiplier(init1: &VectorField, target: &VectorField, k: u32) -> Option<BivariatePoly> {
    let monos: Vec<(u32, u32)> = (0..=k).rev().map(|i| (i, k - i)).collect();
    let mut rows: BTreeMap<(u8, u32, u32), SparseVec> = BTreeMap::new();
    for (col, &(i, j)) in monos.iter().enumerate() {
        for (comp, p) in [(0u8, &init1.a), (1u8, &init1.b)] {
            for (m, c) in p.terms() {
                rows.entry((comp, m.0 + i, m.1 + j)).or_default().insert(col, c.clone());
            }
        }
    }
    for (comp, p) in [(0u8, &target.a), (1u8, &target.b)] {
        for (m, _) in p.terms() {
            rows.entry((comp, m.0, m.1)).or_default();
        }
    }
    let rhs: Vec<Fe> = rows.keys().map(|&(comp, i, j)| if comp == 0 { target.a.coeff(i, j) } else { target.b.coeff(i, j) }).collect();
    let rows: Vec<SparseVec> = rows.into_values().collect();
    let sol = solve(&rows, &rhs, monos.len())?;
    Some(BivariatePoly::from_terms(sol.into_iter().map(|(k, c)| (monos[k].0, monos[k].1, c))))
}

/// Raise ν(X2) through X2 − hX1 as far as it goes, make the choice generic,
/// and record the shape.
pub fn adapt_basis(basis: &SaitoBasis, f: &BivariatePoly) -> Result<SaitoBasis> {
    adapt_basis_seeded(basis, f, 0)
}

pub fn adapt_basis_seeded(basis: &SaitoBasis, f: &BivariatePoly, seed: usize) -> Result<SaitoBasis> {
    let (ok, _) = criterion_check(&basis.x1, &basis.x2, f);
    if !ok {
        return Err(Error::Precondition("adapt_basis needs a verified Saito basis".into()));
    }
    let (mut x1, mut x2) = (basis.x1.clone(), basis.x2.clone());
    if x1.valuation() > x2.valuation() {
        std::mem::swap(&mut x1, &mut x2);
    }
    let v1 = x1.valuation().unwrap();
    let init1 = x1.initial();
    loop {
        let v2 = x2.valuation().unwrap();
        if v2 < v1 {
            std::mem::swap(&mut x1, &mut x2);
            return adapt_basis_seeded(&SaitoBasis { x1, x2, unit: basis.unit.clone(), type_label: None }, f, seed);
        }
        match solve_multiplier(&init1, &x2.homogeneous_part(v2), v2 - v1) {
            Some(h) => x2 = x2.sub(&x1.mul_poly(&h)),
            None => break,
        }
    }
    let v2 = x2.valuation().unwrap();
    if v1 == v2 {
        let (c1, c2) = (generic_scalar(seed), generic_scalar(seed + 1));
        let n1 = x1.add(&x2.scale(&c1));
        let n2 = x2.add(&x1.scale(&c2));
        x1 = n1;
        x2 = n2;
    } else {
        let k = v2 - v1;
        let h = BivariatePoly::from_terms((0..=k).map(|i| (i, k - i, generic_scalar(seed + i as usize + 2))));
        x2 = x2.add(&x1.mul_poly(&h));
    }
    let (ok, unit) = criterion_check(&x1, &x2, f);
    if !ok {
        return Err(Error::Inconsistent("adapted pair lost the Saito criterion".into()));
    }
    let nu = f.order().unwrap();
    let type_label = SaitoType::from_data(nu, x1.valuation().unwrap(), x2.valuation().unwrap(), x1.is_dicritical(), x2.is_dicritical());
    Ok(SaitoBasis { x1, x2, unit: unit.unwrap(), type_label })
}

/// Coordinates (u, v) = (x − e(y), y), possibly after exchanging x and y, in
/// which a smooth graph component becomes {u = 0}.
struct GraphChart {
    swap: bool,
    e: BivariatePoly,
    de: BivariatePoly,
}

fn swap_poly(p: &BivariatePoly) -> BivariatePoly {
    p.substitute(&BivariatePoly::y(), &BivariatePoly::x())
}

impl GraphChart {
    fn new(l: &BivariatePoly) -> Result<Self> {
        for swap in [false, true] {
            let l2 = if swap { swap_poly(l) } else { l.clone() };
            let c = l2.coeff(1, 0);
            if c.is_zero() || !l2.terms().all(|(m, _)| m.0 == 0 || m == Mono(1, 0)) {
                continue;
            }
            let e = l2.sub(&BivariatePoly::term(c.clone(), 1, 0)).scale(&-c.inv());
            return Ok(GraphChart { swap, de: e.dy(), e });
        }
        Err(Error::Unsupported("the component must be a polynomial graph x = e(y) or y = e(x)".into()))
    }

    fn field_in(&self, x: &VectorField) -> VectorField {
        let x = if self.swap { x.swapped() } else { x.clone() };
        let a = x.a.sub(&self.de.mul(&x.b));
        let sx = BivariatePoly::x().add(&self.e);
        VectorField::new(a, x.b).substitute(&sx, &BivariatePoly::y())
    }

    fn field_out(&self, x: &VectorField) -> VectorField {
        let a = x.a.add(&self.de.mul(&x.b));
        let sx = BivariatePoly::x().sub(&self.e);
        let out = VectorField::new(a, x.b.clone()).substitute(&sx, &BivariatePoly::y());
        if self.swap {
            out.swapped()
        } else {
            out
        }
    }
}

fn restrict_x0(p: &BivariatePoly) -> BivariatePoly {
    BivariatePoly::from_terms(p.restrict_x0().into_iter().enumerate().map(|(j, c)| (0, j as u32, c)))
}

/// Pick the pair so that r2 has the minimal order k; return (x1, x2, r1/y^k, r2/y^k).
fn order_pair(x1: VectorField, x2: VectorField, r1: BivariatePoly, r2: BivariatePoly) -> Result<(VectorField, VectorField, BivariatePoly, BivariatePoly)> {
    let k = match (r1.order(), r2.order()) {
        (Some(p), Some(q)) => p.min(q),
        (p, q) => p.or(q).ok_or_else(|| Error::Inconsistent("both fields vanish identically on the line".into()))?,
    };
    let (x1, x2, r1, r2) = if r2.order() == Some(k) { (x1, x2, r1, r2) } else { (x2, x1, r2, r1) };
    Ok((x1, x2, r1.div_mono(0, k), r2.div_mono(0, k)))
}

fn smooth_component(l: &BivariatePoly) -> Result<()> {
    if l.order() != Some(1) {
        return Err(Error::Precondition("the added or removed component must be smooth".into()));
    }
    Ok(())
}

/// Saito basis of f·L from one of f, for a smooth graph L not dividing f.
pub fn add_line(basis: &SaitoBasis, f: &BivariatePoly, l: &BivariatePoly) -> Result<SaitoBasis> {
    smooth_component(l)?;
    if poly_divide_exact(f, l).1 {
        return Err(Error::Precondition("the line is already a component".into()));
    }
    if !verify_basis(&basis.x1, &basis.x2, f) {
        return Err(Error::Precondition("not a Saito basis of the curve".into()));
    }
    let ch = GraphChart::new(l)?;
    let (x1, x2) = (ch.field_in(&basis.x1), ch.field_in(&basis.x2));
    // in the chart the line is {x = 0}; r_i = X_i·x restricted to it
    let (r1, r2) = (restrict_x0(&x1.a), restrict_x0(&x2.a));
    let (x1, x2, c1, c2) = order_pair(x1, x2, r1, r2)?;
    let n1 = x1.mul_poly(&c2).sub(&x2.mul_poly(&c1));
    let n2 = x2.mul_poly(&BivariatePoly::x());
    let (n1, n2) = (ch.field_out(&n1), ch.field_out(&n2));
    let fl = f.mul(l);
    if !verify_basis(&n1, &n2, &fl) {
        return Err(Error::Inconsistent("added-line pair fails the Saito criterion".into()));
    }
    let unit = criterion_check(&n1, &n2, &fl).1.unwrap();
    adapt_basis(&SaitoBasis { x1: n1, x2: n2, unit, type_label: None }, &fl)
}

/// Saito basis of f from one of f·L, for a smooth graph component L.
pub fn remove_line(basis: &SaitoBasis, f: &BivariatePoly, l: &BivariatePoly) -> Result<SaitoBasis> {
    smooth_component(l)?;
    let fl = f.mul(l);
    if !verify_basis(&basis.x1, &basis.x2, &fl) {
        return Err(Error::Precondition("not a Saito basis of the curve with the component".into()));
    }
    check_curve(f).map_err(|_| Error::Precondition("removing the line leaves no singular curve".into()))?;
    let ch = GraphChart::new(l)?;
    let (x1, x2) = (ch.field_in(&basis.x1), ch.field_in(&basis.x2));
    let (b1, b2) = (restrict_x0(&x1.b), restrict_x0(&x2.b));
    let (x1, x2, c1, c2) = order_pair(x1, x2, b1, b2)?;
    let y = x1.mul_poly(&c2).sub(&x2.mul_poly(&c1));
    let divisible = |p: &BivariatePoly| p.x_adic_order().is_none_or(|o| o >= 1);
    if !divisible(&y.a) || !divisible(&y.b) {
        return Err(Error::Inconsistent("combination is not divisible by the line".into()));
    }
    let y = VectorField::new(if y.a.is_zero() { y.a } else { y.a.div_mono(1, 0) }, if y.b.is_zero() { y.b } else { y.b.div_mono(1, 0) });
    let (n1, n2) = (ch.field_out(&y), ch.field_out(&x2));
    if !verify_basis(&n1, &n2, f) {
        return Err(Error::Inconsistent("reduced pair fails the Saito criterion".into()));
    }
    let unit = criterion_check(&n1, &n2, f).1.unwrap();
    adapt_basis(&SaitoBasis { x1: n1, x2: n2, unit, type_label: None }, f)
}

/// Tangent fields Y satisfy Y∧X2 ∈ (f) and X1∧Y ∈ (f), so the coefficients of Y in the
/// basis are holomorphic.
pub fn decomposes(basis: &SaitoBasis, y: &VectorField, f: &BivariatePoly) -> bool {
    let ok = |w: BivariatePoly| w.is_zero() || poly_divide_exact(&w, f).1;
    ok(y.wedge(&basis.x2)) && ok(basis.x1.wedge(y))
}

/// Curve helpers shared by tests and the catalog.
pub fn product(factors: &[BivariatePoly]) -> BivariatePoly {
    factors.iter().fold(BivariatePoly::one(), |acc, p| acc.mul(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: &[(u32, u32, i64)]) -> BivariatePoly {
        BivariatePoly::from_ints(t)
    }

    #[test]
    fn criterion_examples() {
        let xy = p(&[(1, 1, 1)]);
        let (ok, u) = criterion_check(&VectorField::from_ints(&[(1, 0, 1)], &[]), &VectorField::from_ints(&[], &[(0, 1, 1)]), &xy);
        assert!(ok);
        assert_eq!(u.unwrap(), BivariatePoly::one());
        let x = p(&[(1, 0, 1)]);
        let (ok, u) = criterion_check(&VectorField::from_ints(&[(0, 0, 1)], &[]), &VectorField::from_ints(&[], &[(1, 0, 1)]), &x);
        assert!(ok);
        assert_eq!(u.unwrap(), BivariatePoly::one());
        let r = VectorField::radial();
        assert!(!criterion_check(&r, &r.scale(&Fe::int(3)), &xy).0);
    }

    #[test]
    fn slice_of_two_lines() {
        let xy = p(&[(1, 1, 1)]);
        let s = tangent_slice(&xy, 1).unwrap();
        assert_eq!(s.valuations(), vec![1, 1]);
        let b = find_saito_basis(&xy).unwrap();
        assert_eq!((b.nu1(), b.nu2(), b.type_label), (1, 1, Some(SaitoType::E)));
    }

    #[test]
    fn conic_slice_contains_rotation() {
        let f = p(&[(2, 0, 1), (0, 2, 1)]);
        let s = tangent_slice(&f, 1).unwrap();
        assert_eq!(s.fields.len(), 2);
        assert!(VectorField::from_ints(&[(0, 1, 1)], &[(1, 0, -1)]).is_tangent(&f));
    }

    #[test]
    fn dicriticality() {
        assert!(VectorField::radial().is_dicritical());
        assert!(!VectorField::hamiltonian(&p(&[(1, 1, 1)])).is_dicritical());
    }

    #[test]
    fn graph_chart_round_trip() {
        let ch = GraphChart::new(&p(&[(0, 1, 1), (2, 0, -3)])).unwrap();
        let x = VectorField::from_ints(&[(1, 1, 2), (0, 0, 1)], &[(3, 0, 1)]);
        assert_eq!(ch.field_out(&ch.field_in(&x)), x);
    }

    #[test]
    fn primes() {
        let v: Vec<Fe> = (0..5).map(generic_scalar).collect();
        assert_eq!(v, [2, 3, 5, 7, 11].map(Fe::int).to_vec());
    }
}
