//! Marked curve germs given by polynomial branch parametrizations.

use num_integer::Integer;

use crate::coeffcore::linalg::{solve, SparseVec};
use crate::coeffcore::{poly_divide_exact, BivariatePoly, Fe, TruncatedSeries};
use crate::error::{Error, Result};
use crate::semiring::{for_each_product, RingElement, ValueSemiring};

/// Default working precision while the conductor is unknown.
pub const DEFAULT_N0: usize = 32;

/// A branch t -> (x(t), y(t)) with polynomial components.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    x: TruncatedSeries,
    y: TruncatedSeries,
}

impl Branch {
    pub fn new(x: TruncatedSeries, y: TruncatedSeries) -> Result<Branch> {
        let n = x.degree().unwrap_or(0).max(y.degree().unwrap_or(0)) + 1;
        let x = x.extend_order(n).truncate(n);
        let y = y.extend_order(n).truncate(n);
        let vx = x.valuation();
        let vy = y.valuation();
        if vx == Some(0) || vy == Some(0) {
            return Err(Error::Input("branch does not pass through the origin".into()));
        }
        if vx.is_none() && vy.is_none() {
            return Err(Error::Input("constant branch".into()));
        }
        let g = x.terms().chain(y.terms()).fold(0usize, |g, (k, _)| g.gcd(&k));
        if g > 1 {
            return Err(Error::Input(format!("parametrization is not primitive (exponents divisible by {g})")));
        }
        Ok(Branch { x, y })
    }

    pub fn from_terms(x: &[(usize, Fe)], y: &[(usize, Fe)]) -> Result<Branch> {
        Branch::new(TruncatedSeries::from_terms(x.iter().cloned(), usize::MAX / 4), TruncatedSeries::from_terms(y.iter().cloned(), usize::MAX / 4))
    }

    /// Integer-coefficient shorthand.
    pub fn from_ints(x: &[(usize, i64)], y: &[(usize, i64)]) -> Result<Branch> {
        let c = |v: &[(usize, i64)]| v.iter().map(|(k, c)| (*k, Fe::int(*c))).collect::<Vec<_>>();
        Branch::from_terms(&c(x), &c(y))
    }

    pub fn x(&self) -> &TruncatedSeries {
        &self.x
    }

    pub fn y(&self) -> &TruncatedSeries {
        &self.y
    }

    /// Components as series known to order n (exact, the branch is polynomial).
    pub fn at(&self, n: usize) -> (TruncatedSeries, TruncatedSeries) {
        (self.x.extend_order(n).truncate(n), self.y.extend_order(n).truncate(n))
    }

    pub fn multiplicity(&self) -> u32 {
        let a = self.x.valuation().unwrap_or(usize::MAX);
        let b = self.y.valuation().unwrap_or(usize::MAX);
        a.min(b) as u32
    }

    /// Local equation; the flag says whether it is exact or only vanishes to order `prec`.
    pub fn local_equation(&self, prec: usize) -> Result<(BivariatePoly, bool)> {
        if self.x.valuation() == Some(1) {
            return smooth_eliminant(&self.x, &self.y, prec, false);
        }
        if self.y.valuation() == Some(1) {
            return smooth_eliminant(&self.y, &self.x, prec, true);
        }
        let f = resultant_eliminant(&self.x, &self.y)?;
        if f.order() != Some(self.multiplicity()) {
            return Err(Error::Unsupported("polynomial parametrization meets the origin more than once".into()));
        }
        Ok((f, true))
    }
}

fn series_poly(s: &TruncatedSeries) -> Vec<(u32, Fe)> {
    s.terms().map(|(k, c)| (k as u32, c.clone())).collect()
}

// u = s(t) with val 1; express the other coordinate as a series in u.
fn smooth_eliminant(u: &TruncatedSeries, v: &TruncatedSeries, prec: usize, swapped: bool) -> Result<(BivariatePoly, bool)> {
    let lead = u.coeff(1);
    let exact = u.num_terms() == 1;
    let n = prec.max(2);
    let w = if exact {
        // v(t) with t = u / lead
        let inv = lead.inv();
        let mut s = TruncatedSeries::zero(usize::MAX / 4);
        for (k, c) in v.terms() {
            s.set(k, c * &inv.pow(k as u32));
        }
        s
    } else {
        let un = u.extend_order(n).truncate(n).scale(&lead.inv());
        let h = un.sub(&TruncatedSeries::t(n));
        let s = TruncatedSeries::t(n);
        // fixed point psi = s - h(psi), one order per step
        let mut psi = s.clone();
        for _ in 0..n {
            psi = s.sub(&h.compose(&psi)?);
        }
        // t = psi(u / lead)
        let mut q = TruncatedSeries::zero(n);
        for (k, c) in psi.terms() {
            q.set(k, c * &lead.pow(k as u32).inv());
        }
        v.extend_order(n).truncate(n).compose(&q)?
    };
    let mut f = BivariatePoly::zero();
    // other - w(u)
    for (k, c) in series_poly(&w) {
        if swapped {
            f.add_term(0, k, &-c);
        } else {
            f.add_term(k, 0, &-c);
        }
    }
    if swapped {
        f.add_term(1, 0, &Fe::one());
    } else {
        f.add_term(0, 1, &Fe::one());
    }
    Ok((f, exact))
}

// Res_t(x - X(t), y - Y(t)) by fraction-free elimination on the Sylvester matrix.
fn resultant_eliminant(xs: &TruncatedSeries, ys: &TruncatedSeries) -> Result<BivariatePoly> {
    let coeffs = |s: &TruncatedSeries, var: BivariatePoly| -> Vec<BivariatePoly> {
        let d = s.degree().unwrap_or(0);
        let mut v: Vec<BivariatePoly> = (0..=d).map(|k| BivariatePoly::constant(s.coeff(k))).collect();
        v[0] = v[0].sub(&var);
        v
    };
    let a = coeffs(xs, BivariatePoly::x());
    let b = coeffs(ys, BivariatePoly::y());
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    let mut mat = vec![vec![BivariatePoly::zero(); size]; size];
    for i in 0..n {
        for (k, c) in a.iter().enumerate() {
            mat[i][i + m - k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in b.iter().enumerate() {
            mat[n + i][i + n - k] = c.clone();
        }
    }
    let mut det = bareiss(mat)?;
    // normalize: the initial-form term with the largest y-exponent gets coefficient 1
    let init = det.initial();
    if let Some((_, c)) = init.terms().max_by_key(|(mo, _)| mo.1) {
        det = det.scale(&c.inv());
    }
    Ok(det)
}

fn bareiss(mut m: Vec<Vec<BivariatePoly>>) -> Result<BivariatePoly> {
    let n = m.len();
    let mut prev = BivariatePoly::one();
    let mut sign = false;
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|i| !m[*i][k].is_zero()) else {
                return Ok(BivariatePoly::zero());
            };
            m.swap(k, p);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                let (q, ok) = poly_divide_exact(&num, &prev);
                if !ok {
                    return Err(Error::Inconsistent("inexact division in fraction-free elimination".into()));
                }
                m[i][j] = q;
            }
            m[i][k] = BivariatePoly::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if sign { d.neg() } else { d })
}

/// Equation of the union: product of the branch eliminants.
pub fn equation_from_branches(branches: &[Branch], prec: usize) -> Result<BivariatePoly> {
    let mut f = BivariatePoly::one();
    let mut locals = Vec::new();
    for b in branches {
        let (e, _) = b.local_equation(prec)?;
        locals.push(e);
    }
    for (i, bi) in branches.iter().enumerate() {
        for (j, e) in locals.iter().enumerate() {
            if i != j {
                let (x, y) = bi.at(prec);
                if e.eval_series(&x, &y).is_zero() {
                    return Err(Error::Input(format!("branches {i} and {j} coincide")));
                }
            }
        }
    }
    for e in &locals {
        f = f.mul(e);
    }
    Ok(f)
}

/// (C_1 . C_2): order of the local equation of b2 along b1.
pub fn intersection_multiplicity(b1: &Branch, b2: &Branch, prec: usize) -> Result<u32> {
    let (e, exact) = b2.local_equation(prec)?;
    let (x, y) = b1.at(prec);
    match e.eval_series(&x, &y).valuation() {
        Some(v) => Ok(v as u32),
        None if exact => Err(Error::Precondition("branches coincide".into())),
        None => Err(Error::Truncation(format!("intersection exceeds precision {prec}"))),
    }
}

/// A marked curve germ: ordered branches and a reduced equation.
#[derive(Clone, Debug)]
pub struct CurveGerm {
    pub branches: Vec<Branch>,
    pub equation: BivariatePoly,
    pub multiplicity: u32,
    pub intersections: Vec<Vec<Option<u32>>>,
    pub n0: usize,
}

impl CurveGerm {
    /// Builds the germ; a supplied equation is checked to vanish on every branch
    /// to order `n0`.
    pub fn new(branches: Vec<Branch>, equation: Option<BivariatePoly>, n0: usize) -> Result<CurveGerm> {
        if branches.is_empty() {
            return Err(Error::Input("no branches".into()));
        }
        let r = branches.len();
        let mut inter = vec![vec![None; r]; r];
        for i in 0..r {
            for j in i + 1..r {
                let v = intersection_multiplicity(&branches[i], &branches[j], n0)?;
                inter[i][j] = Some(v);
                inter[j][i] = Some(v);
            }
        }
        let equation = match equation {
            Some(f) => {
                for (l, b) in branches.iter().enumerate() {
                    let (x, y) = b.at(n0);
                    if !f.eval_series(&x, &y).is_zero() {
                        return Err(Error::Input(format!("equation does not vanish on branch {l}")));
                    }
                }
                f
            }
            None => equation_from_branches(&branches, n0)?,
        };
        let multiplicity = equation.order().ok_or_else(|| Error::Input("zero equation".into()))?;
        let sum: u32 = branches.iter().map(|b| b.multiplicity()).sum();
        if multiplicity != sum {
            return Err(Error::Input(format!("equation multiplicity {multiplicity} differs from branch multiplicities {sum}")));
        }
        Ok(CurveGerm { branches, equation, multiplicity, intersections: inter, n0 })
    }

    pub fn from_branches(branches: Vec<Branch>) -> Result<CurveGerm> {
        CurveGerm::new(branches, None, DEFAULT_N0)
    }

    pub fn r(&self) -> usize {
        self.branches.len()
    }

    /// Reorder branches: new branch i is old branch perm[i].
    pub fn remark(&self, perm: &[usize]) -> Result<CurveGerm> {
        let mut seen = vec![false; self.r()];
        if perm.len() != self.r() || perm.iter().any(|p| *p >= self.r() || std::mem::replace(&mut seen[*p], true)) {
            return Err(Error::Input("marking is not a permutation of the branches".into()));
        }
        let branches = perm.iter().map(|p| self.branches[*p].clone()).collect();
        let inter = perm.iter().map(|i| perm.iter().map(|j| self.intersections[*i][*j]).collect()).collect();
        Ok(CurveGerm { branches, equation: self.equation.clone(), multiplicity: self.multiplicity, intersections: inter, n0: self.n0 })
    }

    /// Branch series known to the given orders.
    pub fn series_at(&self, orders: &[usize]) -> Vec<(TruncatedSeries, TruncatedSeries)> {
        self.branches.iter().zip(orders).map(|(b, n)| b.at(*n)).collect()
    }

    /// The conductor and the semiring window it defines.
    pub fn semiring(&self) -> Result<(Vec<u32>, ValueSemiring)> {
        let sigma = conductor_candidate(self)?;
        let orders: Vec<usize> = sigma.iter().map(|s| *s as usize + 2).collect();
        let g = ValueSemiring::compute(&self.series_at(&orders), &sigma)?;
        if self.r() > 1 {
            verify_minimal(&g, &sigma)?;
            verify_saturated(self, &sigma)?;
        }
        Ok((sigma, g))
    }
}

/// Conductor of the value semigroup of one branch, certified at precision n.
pub fn branch_conductor(b: &Branch, n: usize) -> Result<u32> {
    let nn = n as u32;
    let g = ValueSemiring::compute(&[b.at(n)], &[nn])?;
    let m = b.multiplicity();
    let mut c = nn;
    while c > 0 && g.contains_reduced(&[c - 1]) {
        c -= 1;
    }
    if c + m > nn.saturating_sub(1) {
        return Err(Error::Truncation(format!("branch conductor not certified at precision {n}")));
    }
    Ok(c)
}

/// sigma_l = c_l + sum_{j != l} (C_l . C_j), checked for saturation and minimality.
pub fn conductor(curve: &CurveGerm) -> Result<Vec<u32>> {
    Ok(curve.semiring()?.0)
}

fn conductor_candidate(curve: &CurveGerm) -> Result<Vec<u32>> {
    let r = curve.r();
    let mut sigma = Vec::with_capacity(r);
    for (l, b) in curve.branches.iter().enumerate() {
        let mut n = curve.n0;
        let c = loop {
            match branch_conductor(b, n) {
                Ok(c) => break c,
                Err(Error::Truncation(_)) if n < 8 * curve.n0 => n *= 2,
                Err(e) => return Err(e),
            }
        };
        let s: u32 = (0..r).filter(|j| *j != l).map(|j| curve.intersections[l][j].unwrap_or(0)).sum();
        sigma.push(c + s);
    }
    Ok(sigma)
}

// Minimality: sigma - e_l is not a value even allowing anything >= sigma elsewhere.
fn verify_minimal(g: &ValueSemiring, sigma: &[u32]) -> Result<()> {
    for l in 0..sigma.len() {
        if sigma[l] == 0 {
            continue;
        }
        let mut t = sigma.to_vec();
        t[l] -= 1;
        if g.contains_reduced(&t) {
            return Err(Error::Inconsistent(format!("conductor {sigma:?} is not minimal at branch {l}")));
        }
    }
    Ok(())
}

// Saturation of sigma + [0,1]^r, by ranks of the restriction space modulo
// t^(sigma_l + 2): tau is a value iff lowering the filtration in any finite
// coordinate strictly drops the dimension.
fn verify_saturated(curve: &CurveGerm, sigma: &[u32]) -> Result<()> {
    use crate::coeffcore::linalg::{sparse, Rref};
    let cap: Vec<usize> = sigma.iter().map(|s| *s as usize + 2).collect();
    let series = curve.series_at(&cap);
    let mut off = vec![0usize];
    for c in &cap {
        off.push(off.last().unwrap() + c);
    }
    let d = *cap.iter().max().unwrap() as u32;
    let mut rows: Vec<Vec<(usize, Fe)>> = Vec::new();
    for deg in 0..=d {
        for j in 0..=deg {
            let m = BivariatePoly::term(Fe::one(), deg - j, j);
            let mut row = Vec::new();
            for (l, (x, y)) in series.iter().enumerate() {
                for (k, c) in m.eval_series(x, y).terms() {
                    row.push((off[l] + k, c.clone()));
                }
            }
            rows.push(row);
        }
    }
    let rank = |keep: &dyn Fn(usize, usize) -> bool| {
        let mut e = Rref::new();
        for row in &rows {
            e.insert(&sparse(
                row.iter()
                    .filter(|(c, _)| {
                        let l = off.iter().rposition(|o| o <= c).unwrap();
                        keep(l, c - off[l])
                    })
                    .cloned(),
            ));
        }
        e.rank()
    };
    let total = rank(&|_, _| true);
    let dim = |tau: &[usize]| total - rank(&|l, k| k < tau[l]);
    let mut ok = true;
    for_each_product(&sigma.iter().map(|s| vec![*s as usize, *s as usize + 1]).collect::<Vec<_>>(), &mut |tau: &[usize]| {
        let base = dim(tau);
        for l in 0..tau.len() {
            let mut up = tau.to_vec();
            up[l] += 1;
            if dim(&up) == base {
                ok = false;
            }
        }
        ok
    });
    if ok {
        Ok(())
    } else {
        Err(Error::Inconsistent(format!("conductor {sigma:?} fails saturation")))
    }
}

/// Truncate each component at exponent p_l (inclusive) and certify the result
/// is a function on the curve by solving for a polynomial representative.
pub fn truncate_ring_element(curve: &CurveGerm, sigma: &[u32], g: &RingElement, p: &[u32]) -> Result<RingElement> {
    if p.len() != sigma.len() || p.iter().zip(sigma).any(|(a, s)| a + 1 < *s) {
        return Err(Error::Precondition("truncation below the conductor bound".into()));
    }
    let on: Vec<TruncatedSeries> = g.on_branches.iter().zip(p).map(|(s, k)| s.truncate(*k as usize + 1).extend_order(s.trunc_order())).collect();
    let orders: Vec<usize> = on.iter().map(|s| s.trunc_order()).collect();
    let expr = represent(curve, &on, &orders)?.ok_or_else(|| Error::Inconsistent("truncated element has no polynomial representative".into()))?;
    Ok(RingElement::from_parts(on, expr))
}

/// A polynomial whose restriction to branch l agrees with target_l below orders_l.
pub fn represent(curve: &CurveGerm, target: &[TruncatedSeries], orders: &[usize]) -> Result<Option<BivariatePoly>> {
    let maxo = *orders.iter().max().unwrap_or(&1);
    let branches = curve.series_at(orders);
    let mut d = 1u32;
    loop {
        let monos: Vec<(u32, u32)> = (0..=d).flat_map(|s| (0..=s).map(move |j| (s - j, j))).collect();
        let evals: Vec<Vec<TruncatedSeries>> = monos.iter().map(|(i, j)| branches.iter().map(|(x, y)| x.pow(*i).mul(&y.pow(*j))).collect()).collect();
        let mut rows: Vec<SparseVec> = Vec::new();
        let mut rhs: Vec<Fe> = Vec::new();
        for l in 0..branches.len() {
            for k in 0..orders[l] {
                let row: SparseVec = evals
                    .iter()
                    .enumerate()
                    .filter_map(|(c, e)| {
                        let v = e[l].coeff(k);
                        (!v.is_zero()).then_some((c, v))
                    })
                    .collect();
                rows.push(row);
                rhs.push(target[l].coeff(k));
            }
        }
        if let Some(sol) = solve(&rows, &rhs, monos.len()) {
            let p = BivariatePoly::from_terms(sol.into_iter().map(|(c, v)| (monos[c].0, monos[c].1, v)));
            return Ok(Some(p));
        }
        if d as usize >= maxo {
            return Ok(None);
        }
        d += 1;
    }
}
