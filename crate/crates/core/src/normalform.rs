//! Reduction of exponent families, normalized generator pairs, and the action
//! of branch reparametrizations on their coefficients.

use std::collections::BTreeSet;

use serde_json::json;

use crate::coeffcore::linalg::{solve, sparse, Rref, SparseVec};
use crate::coeffcore::{Fe, TruncatedSeries};
use crate::curvegerm::CurveGerm;
use crate::error::{Error, Result};
use crate::semiring::{canon, for_each_product, minimal_generators, RingElement, ValueSemiring, ValueTuple, V};

/// Per-branch finite exponent sets; infinity is implicitly in every set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentFamily {
    pub sets: Vec<BTreeSet<u32>>,
}

impl ExponentFamily {
    pub fn new(sets: Vec<BTreeSet<u32>>) -> Self {
        ExponentFamily { sets }
    }

    /// The starting family of a generator with value g whose coefficient at
    /// (lead, g_lead) is normalized to 1.
    pub fn initial(g: &ValueTuple, lead: usize, sigma: &[u32]) -> Self {
        let sets =
            g.0.iter()
                .zip(sigma)
                .enumerate()
                .map(|(l, (v, s))| match v {
                    V::Inf => BTreeSet::new(),
                    V::Fin(k) => {
                        let lo = if l == lead { k + 1 } else { *k };
                        (lo..=(s.saturating_sub(1)).max(*k)).collect()
                    }
                })
                .collect();
        ExponentFamily { sets }
    }

    pub fn r(&self) -> usize {
        self.sets.len()
    }

    /// Tuples of the product family other than the all-infinity tuple.
    pub fn tuples(&self) -> Vec<ValueTuple> {
        let choices: Vec<Vec<V>> = self.sets.iter().map(|s| s.iter().map(|k| V::Fin(*k)).chain([V::Inf]).collect()).collect();
        let mut out = Vec::new();
        for_each_product(&choices, &mut |t: &[V]| {
            if t.iter().any(|v| !v.is_inf()) {
                out.push(ValueTuple(t.to_vec()));
            }
            true
        });
        out
    }

    pub fn is_reduced(&self, gamma: &ValueSemiring) -> bool {
        self.tuples().iter().all(|t| !gamma.contains(t))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self.sets.iter().map(|s| s.iter().map(|k| json!(k)).chain([json!("inf")]).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

/// Removal of n_coord from P_coord, justified by n in Gamma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub n: ValueTuple,
    pub coord: usize,
}

/// First coordinate where n is finite and differs from g.
fn init_coord(n: &ValueTuple, g: &ValueTuple) -> Option<usize> {
    (0..n.r()).find(|k| !n.0[*k].is_inf() && n.0[*k] != g.0[*k])
}

/// A maximal sequence of reductions of `p` relative to the generator value
/// `g`, and the reduced family it ends in. Each step takes the candidate with
/// the smallest initial coordinate, then the smallest entry there, then the
/// lexicographically smallest tuple.
pub fn reduce_family(p: &ExponentFamily, gamma: &ValueSemiring, g: &ValueTuple) -> Result<(Vec<ReductionStep>, ExponentFamily)> {
    let mut fam = p.clone();
    let mut steps = Vec::new();
    loop {
        let mut best: Option<((usize, u32, ValueTuple), usize)> = None;
        for n in fam.tuples() {
            if !gamma.contains(&n) {
                continue;
            }
            let k = init_coord(&n, g).ok_or_else(|| Error::Inconsistent(format!("{n} has no initial coordinate relative to {g}")))?;
            let key = (k, n.0[k].fin().unwrap(), n.clone());
            if best.as_ref().is_none_or(|(b, _)| key < *b) {
                best = Some((key, k));
            }
        }
        let Some(((_, e, n), k)) = best else {
            return Ok((steps, fam));
        };
        fam.sets[k].remove(&e);
        steps.push(ReductionStep { n, coord: k });
    }
}

/// A coefficient slot: generator i, branch l, exponent k (all zero-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub generator: usize,
    pub branch: usize,
    pub exponent: usize,
}

impl Position {
    /// One-based (i, l, k) label.
    pub fn label(&self) -> (usize, usize, usize) {
        (self.generator + 1, self.branch + 1, self.exponent)
    }
}

/// The normalized generator pair of a marked curve and everything needed to
/// renormalize after a reparametrization.
#[derive(Clone, Debug)]
pub struct NormalizedGenerators {
    pub sigma: Vec<u32>,
    pub values: [ValueTuple; 2],
    pub lead: [usize; 2],
    /// Truncation order of generator i on branch l.
    pub caps: [Vec<usize>; 2],
    /// Common working precision per branch.
    pub orders: Vec<usize>,
    pub logs: [Vec<ReductionStep>; 2],
    pub families: [ExponentFamily; 2],
    pub generators: [RingElement; 2],
    pub positions: Vec<Position>,
    pub coeffs: Vec<Fe>,
}

impl NormalizedGenerators {
    pub fn r(&self) -> usize {
        self.sigma.len()
    }

    /// The coefficient vector, ordered branch-major, then exponent, then generator.
    pub fn coeff_vector(&self) -> &[Fe] {
        &self.coeffs
    }

    fn removed(&self, i: usize) -> Vec<(usize, usize)> {
        self.logs[i].iter().map(|s| (s.coord, s.n.0[s.coord].fin().unwrap() as usize)).collect()
    }

    /// Generator series rebuilt from a coefficient vector.
    pub fn generators_from(&self, a: &[Fe]) -> Result<[Vec<TruncatedSeries>; 2]> {
        if a.len() != self.positions.len() {
            return Err(Error::Input(format!("expected {} coefficients, got {}", self.positions.len(), a.len())));
        }
        let mut out: [Vec<TruncatedSeries>; 2] = [0, 1].map(|_| self.orders.iter().map(|n| TruncatedSeries::zero(*n)).collect());
        for i in 0..2 {
            let l = self.lead[i];
            out[i][l].set(self.values[i].0[l].fin().unwrap() as usize, Fe::one());
        }
        for (p, c) in self.positions.iter().zip(a) {
            out[p.generator][p.branch].set(p.exponent, c.clone());
        }
        Ok(out)
    }

    /// The curve parametrized by (G1, G2) for the given coefficients.
    pub fn curve_from(&self, a: &[Fe]) -> Result<CurveGerm> {
        let [g1, g2] = self.generators_from(a)?;
        let branches = g1
            .into_iter()
            .zip(g2)
            .map(|(x, y)| crate::curvegerm::Branch::new(x.extend_order(usize::MAX / 4), y.extend_order(usize::MAX / 4)))
            .collect::<Result<Vec<_>>>()?;
        CurveGerm::from_branches(branches)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<serde_json::Value> = (0..2)
            .map(|i| {
                json!({
                    "value": self.values[i].to_json(),
                    "lead_branch": self.lead[i] + 1,
                    "components": self.generators[i].on_branches.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                    "reductions": self.logs[i].iter().map(|s| json!({"n": s.n.to_json(), "coord": s.coord + 1})).collect::<Vec<_>>(),
                    "free_family": self.families[i].to_json(),
                })
            })
            .collect();
        json!({
            "conductor": self.sigma,
            "generators": gens,
            "positions": self.positions.iter().map(|p| { let (i, l, k) = p.label(); json!([i, l, k]) }).collect::<Vec<_>>(),
            "coefficients": self.coeffs.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }

    fn coeff_at(g: &RingElement, l: usize, k: usize) -> Fe {
        g.on_branches[l].coeff(k)
    }

    /// Monomials (G1)^b1 (G2)^b2, b != 0, bounded as described in `find_w`.
    fn monomials(&self, pair: &[RingElement; 2], wide: bool) -> Vec<RingElement> {
        let v = &self.values;
        let keep = |b1: u32, b2: u32| -> bool {
            let mut any = false;
            for l in 0..self.r() {
                let e = v[0].0[l].mul_n(b1).add(v[1].0[l].mul_n(b2));
                if let V::Fin(e) = e {
                    if wide {
                        any |= (e as usize) < self.orders[l];
                    } else if e > self.sigma[l] {
                        return false;
                    } else {
                        any = true;
                    }
                }
            }
            any
        };
        let mut out = Vec::new();
        let mut p1 = RingElement::series_only(self.orders.iter().map(|n| TruncatedSeries::constant(Fe::one(), *n)).collect());
        let mut b1 = 0;
        while b1 == 0 || keep(b1, 0) {
            let mut m = p1.clone();
            let mut b2 = 0;
            while (b1, b2) == (0, 0) || keep(b1, b2) {
                if (b1, b2) != (0, 0) {
                    out.push(m.clone());
                }
                m = m.mul(&pair[1]);
                b2 += 1;
            }
            p1 = p1.mul(&pair[0]);
            b1 += 1;
        }
        out
    }

    /// A combination W of monomials in the pair meeting the coefficient
    /// constraints ((l, k), value). The tight bound keeps monomials whose finite
    /// value entries stay within the conductor; the retry keeps every monomial
    /// that is nonzero at working precision.
    fn find_w(&self, pair: &[RingElement; 2], cons: &[((usize, usize), Fe)]) -> Result<RingElement> {
        for wide in [false, true] {
            let monos = self.monomials(pair, wide);
            let rows: Vec<SparseVec> = cons.iter().map(|((l, k), _)| sparse(monos.iter().enumerate().map(|(c, m)| (c, Self::coeff_at(m, *l, *k))))).collect();
            let rhs: Vec<Fe> = cons.iter().map(|(_, v)| v.clone()).collect();
            if let Some(sol) = solve(&rows, &rhs, monos.len()) {
                let mut w = RingElement::series_only(self.orders.iter().map(|n| TruncatedSeries::zero(*n)).collect());
                let mut first = true;
                for (c, v) in sol {
                    w = if first { monos[c].scale(&v) } else { w.add_scaled(&v, &monos[c]) };
                    first = false;
                }
                return Ok(w);
            }
        }
        Err(Error::Bound("no combination of the generator pair meets the reduction constraints".into()))
    }

    /// Bring an arbitrary pair with the recorded values into normalized shape,
    /// replaying the fixed reduction logs.
    fn renormalize(&self, mut pair: [RingElement; 2]) -> Result<[RingElement; 2]> {
        for i in 0..2 {
            pair[i] = pair[i].truncate(&self.orders);
            let l = self.lead[i];
            let c = Self::coeff_at(&pair[i], l, self.values[i].0[l].fin().unwrap() as usize);
            if c.is_zero() {
                return Err(Error::Precondition("generator lost its leading coefficient".into()));
            }
            pair[i] = pair[i].scale(&c.inv());
        }
        for i in 0..2 {
            for step in &self.logs[i] {
                let kc = step.coord;
                let e = step.n.0[kc].fin().unwrap() as usize;
                let a = Self::coeff_at(&pair[i], kc, e);
                if a.is_zero() {
                    continue;
                }
                let mut cons = Vec::new();
                for l in 0..self.r() {
                    let top = step.n.0[l].fin().map_or(self.orders[l], |v| v as usize).min(self.orders[l]);
                    for k in 0..top {
                        cons.push(((l, k), Fe::zero()));
                    }
                }
                cons.push(((kc, e), Fe::one()));
                let w = self.find_w(&pair, &cons)?;
                pair[i] = pair[i].add_scaled(&-a, &w);
            }
            // a later step may have refilled an earlier slot; settle all at once
            let removed = self.removed(i);
            if removed.iter().any(|(l, k)| !Self::coeff_at(&pair[i], *l, *k).is_zero()) {
                let mut cons = Vec::new();
                for l in 0..self.r() {
                    let low = self.values[i].0[l].fin().map_or(self.caps[i][l], |v| v as usize);
                    for k in 0..self.caps[i][l] {
                        if k < low || (l == self.lead[i] && k == low) {
                            cons.push(((l, k), Fe::zero()));
                        } else if removed.contains(&(l, k)) {
                            cons.push(((l, k), Self::coeff_at(&pair[i], l, k)));
                        }
                    }
                }
                let w = self.find_w(&pair, &cons)?;
                pair[i] = pair[i].add_scaled(&-Fe::one(), &w);
            }
        }
        for i in 0..2 {
            let on = pair[i].on_branches.iter().zip(&self.caps[i]).zip(&self.orders).map(|((s, c), n)| s.truncate(*c).extend_order(*n)).collect();
            pair[i] = match pair[i].expression() {
                Some(e) => RingElement::from_parts(on, e),
                None => RingElement::series_only(on),
            };
        }
        Ok(pair)
    }

    fn extract(&self, pair: &[RingElement; 2]) -> Vec<Fe> {
        self.positions.iter().map(|p| Self::coeff_at(&pair[p.generator], p.branch, p.exponent)).collect()
    }
}

trait MulN {
    fn mul_n(self, n: u32) -> V;
}

impl MulN for V {
    fn mul_n(self, n: u32) -> V {
        match self {
            _ if n == 0 => V::Fin(0),
            V::Fin(a) => V::Fin(a * n),
            V::Inf => V::Inf,
        }
    }
}

/// The value an element stands for: its exact valuation when that is a
/// generator value, otherwise the unique generator value in the same window
/// class, otherwise the exact valuation.
fn value_of(g: &RingElement, gens: &[ValueTuple], sigma: &[u32]) -> ValueTuple {
    let v = g.valuation();
    if gens.contains(&v) {
        return v;
    }
    let c = canon(&v, sigma);
    let same: Vec<&ValueTuple> = gens.iter().filter(|t| canon(t, sigma) == c).collect();
    match same.as_slice() {
        [t] => (*t).clone(),
        _ => v,
    }
}

fn two_smooth_branches(curve: &CurveGerm) -> bool {
    curve.r() == 2 && curve.branches.iter().all(|b| b.multiplicity() == 1)
}

/// Normalize a generator pair of the curve. The pair is ordered by value.
pub fn normalize(g1: &RingElement, g2: &RingElement, curve: &CurveGerm) -> Result<NormalizedGenerators> {
    let (sigma, gamma) = curve.semiring()?;
    normalize_in(g1, g2, &gamma, &sigma, two_smooth_branches(curve))
}

fn normalize_in(g1: &RingElement, g2: &RingElement, gamma: &ValueSemiring, sigma: &[u32], smooth_pair: bool) -> Result<NormalizedGenerators> {
    if smooth_pair {
        return Err(Error::Unsupported("two smooth branches: the normal form is y(y+x^n) with no moduli".into()));
    }
    if let (Some([a, b]), Some([c, d])) = (g1.linear_part(), g2.linear_part()) {
        if (&(&a * &d) - &(&b * &c)).is_zero() {
            return Err(Error::Precondition("generator linear parts are dependent".into()));
        }
    }
    let mut pair = [g1.clone(), g2.clone()];
    let gens = gamma.generator_values()?;
    let mut values = [value_of(g1, &gens, sigma), value_of(g2, &gens, sigma)];
    if values[1] < values[0] {
        pair.swap(0, 1);
        values.swap(0, 1);
    }
    let r = sigma.len();
    let mut lead = [0usize; 2];
    let mut caps: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for i in 0..2 {
        if !gamma.contains(&values[i]) {
            return Err(Error::Inconsistent(format!("{} is not a value of the curve", values[i])));
        }
        lead[i] = values[i].finite_coords().first().copied().ok_or_else(|| Error::Precondition("generator vanishes on every branch".into()))?;
        caps[i] = (0..r)
            .map(|l| match values[i].0[l] {
                V::Fin(k) => (sigma[l].saturating_sub(1)).max(k) as usize + 1,
                V::Inf => sigma[l] as usize,
            })
            .collect();
    }
    let orders: Vec<usize> = (0..r).map(|l| caps[0][l].max(caps[1][l])).collect();
    for g in &pair {
        if g.on_branches.iter().zip(&orders).any(|(s, n)| s.trunc_order() < *n) {
            return Err(Error::Truncation("generator known below the conductor".into()));
        }
    }
    let mut logs: [Vec<ReductionStep>; 2] = [Vec::new(), Vec::new()];
    let mut families = [ExponentFamily::new(vec![]), ExponentFamily::new(vec![])];
    for i in 0..2 {
        let p0 = ExponentFamily::initial(&values[i], lead[i], sigma);
        let (steps, fam) = reduce_family(&p0, gamma, &values[i])?;
        logs[i] = steps;
        families[i] = fam;
    }
    let mut positions = Vec::new();
    for l in 0..r {
        let ks: BTreeSet<u32> = families[0].sets[l].union(&families[1].sets[l]).copied().collect();
        for k in ks {
            for (i, fam) in families.iter().enumerate() {
                if fam.sets[l].contains(&k) {
                    positions.push(Position { generator: i, branch: l, exponent: k as usize });
                }
            }
        }
    }
    let mut ng =
        NormalizedGenerators { sigma: sigma.to_vec(), values, lead, caps, orders, logs, families, generators: pair.clone(), positions, coeffs: Vec::new() };
    let pair = ng.renormalize(pair)?;
    ng.coeffs = ng.extract(&pair);
    ng.generators = pair;
    Ok(ng)
}

/// Normal form of the curve's generator pair.
pub fn normal_form(curve: &CurveGerm) -> Result<NormalizedGenerators> {
    let (sigma, gamma) = curve.semiring()?;
    let mg = minimal_generators(curve, &gamma)?;
    let (i, j) = mg.pair.ok_or_else(|| Error::Inconsistent("fewer than two generators with independent linear parts".into()))?;
    normalize_in(&mg.elements[i], &mg.elements[j], &gamma, &sigma, two_smooth_branches(curve))
}

/// The coefficient point and its position labels. Curves that are smooth or a
/// pair of smooth branches have no free positions.
pub fn moduli_point(curve: &CurveGerm) -> Result<(Vec<Position>, Vec<Fe>)> {
    if curve.multiplicity == 1 || two_smooth_branches(curve) {
        return Ok((Vec::new(), Vec::new()));
    }
    let ng = normal_form(curve)?;
    Ok((ng.positions, ng.coeffs))
}

/// One jet per branch: phi_l(0) = 0, phi_l'(0) != 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetTuple(pub Vec<TruncatedSeries>);

impl JetTuple {
    pub fn new(jets: Vec<TruncatedSeries>) -> Result<JetTuple> {
        for j in &jets {
            if j.valuation() != Some(1) {
                return Err(Error::Input("jet must vanish at 0 with nonzero derivative".into()));
            }
        }
        Ok(JetTuple(jets))
    }

    pub fn identity(orders: &[usize]) -> JetTuple {
        JetTuple(orders.iter().map(|n| TruncatedSeries::t(*n)).collect())
    }

    /// (self ∘ inner)_l = self_l(inner_l(t)).
    pub fn compose(&self, inner: &JetTuple) -> Result<JetTuple> {
        Ok(JetTuple(self.0.iter().zip(&inner.0).map(|(a, b)| a.compose(b)).collect::<Result<_>>()?))
    }

    /// Compositional inverse at the jets' own orders.
    pub fn inverse(&self) -> Result<JetTuple> {
        let mut out = Vec::with_capacity(self.0.len());
        for j in &self.0 {
            let n = j.trunc_order();
            let c = j.coeff(1).inv();
            let t = TruncatedSeries::t(n);
            let mut psi = t.scale(&c);
            for _ in 0..n {
                let err = j.compose(&psi)?.sub(&t);
                if err.is_zero() {
                    break;
                }
                psi = psi.sub(&err.scale(&c));
            }
            out.push(psi);
        }
        Ok(JetTuple(out))
    }
}

/// The coefficients of the normalized pair of the reparametrized curve:
/// compose each branch component with phi_l and renormalize along the fixed
/// reduction logs.
pub fn act(phi: &JetTuple, a: &[Fe], ctx: &NormalizedGenerators) -> Result<Vec<Fe>> {
    if phi.0.len() != ctx.r() {
        return Err(Error::Input("jet count differs from branch count".into()));
    }
    for j in &phi.0 {
        if j.valuation() != Some(1) {
            return Err(Error::Input("jet derivative vanishes at 0".into()));
        }
    }
    let gs = ctx.generators_from(a)?;
    let mut pair: Vec<RingElement> = Vec::with_capacity(2);
    for g in &gs {
        let on = g.iter().zip(&phi.0).zip(&ctx.orders).map(|((s, p), n)| s.compose(&p.truncate(*n).extend_order(*n))).collect::<Result<Vec<_>>>()?;
        pair.push(RingElement::series_only(on));
    }
    let pair: [RingElement; 2] = pair.try_into().unwrap();
    let out = ctx.renormalize(pair)?;
    Ok(ctx.extract(&out))
}

/// A distinguished point of an orbit and the jet reaching it.
#[derive(Clone, Debug)]
pub struct OrbitRep {
    pub point: Vec<Fe>,
    pub phi: JetTuple,
    /// Indices set to zero by the unipotent stage.
    pub killed: Vec<usize>,
    /// Indices scaled to one by the torus stage.
    pub unit: Vec<usize>,
    /// Remaining indices that are nonzero at the representative: the moduli
    /// at a generic point.
    pub free: Vec<usize>,
}

const NEWTON_STEPS: usize = 24;

fn unipotent_jet(ctx: &NormalizedGenerators, params: &[(usize, usize)], vals: &[Fe]) -> JetTuple {
    let mut jets: Vec<TruncatedSeries> = ctx.orders.iter().map(|n| TruncatedSeries::t(*n)).collect();
    for ((l, d), v) in params.iter().zip(vals) {
        let c = &jets[*l].coeff(*d) + v;
        jets[*l].set(*d, c);
    }
    JetTuple(jets)
}

/// Derivative at h = 0 of h -> act(t + h t^d on branch l, a), exactly: the map
/// is polynomial in h, so fit samples and check one extra point.
fn derivative(ctx: &NormalizedGenerators, a: &[Fe], l: usize, d: usize) -> Result<Vec<Fe>> {
    let mut deg = 4usize;
    let mut samples: Vec<Vec<Fe>> = Vec::new();
    while deg <= 64 {
        while samples.len() < deg + 2 {
            let h = Fe::int(samples.len() as i64);
            samples.push(act(&unipotent_jet(ctx, &[(l, d)], &[h]), a, ctx)?);
        }
        let m = a.len();
        let mut deriv = Vec::with_capacity(m);
        let mut ok = true;
        for c in 0..m {
            // Newton divided differences on nodes 0..=deg
            let ys: Vec<Fe> = samples[..=deg].iter().map(|s| s[c].clone()).collect();
            let coef = newton_coeffs(&ys);
            let pred = newton_eval(&coef, &Fe::int(deg as i64 + 1));
            if pred != samples[deg + 1][c] {
                ok = false;
                break;
            }
            deriv.push(newton_linear(&coef));
        }
        if ok {
            return Ok(deriv);
        }
        deg *= 2;
    }
    Err(Error::Bound("action is not polynomial of low degree in the jet parameter".into()))
}

fn newton_coeffs(ys: &[Fe]) -> Vec<Fe> {
    let mut c = ys.to_vec();
    let n = c.len();
    for j in 1..n {
        for i in (j..n).rev() {
            c[i] = &(&c[i] - &c[i - 1]) / &Fe::int(j as i64);
        }
    }
    c
}

fn newton_eval(c: &[Fe], x: &Fe) -> Fe {
    let mut acc = Fe::zero();
    for i in (0..c.len()).rev() {
        acc = &(&acc * &(x - &Fe::int(i as i64))) + &c[i];
    }
    acc
}

// coefficient of h in sum_i c_i h (h-1) ... (h-i+1)
fn newton_linear(c: &[Fe]) -> Fe {
    let mut acc = Fe::zero();
    // the linear coefficient of prod_{j<i}(h - j) is prod_{0<j<i}(-j)
    let mut p = Fe::one();
    for (i, ci) in c.iter().enumerate().skip(1) {
        if i > 1 {
            p = &p * &Fe::int(-(i as i64 - 1));
        }
        acc = &acc + &(ci * &p);
    }
    acc
}

/// Reduce to a distinguished orbit point: first cancel coefficients, lowest
/// exponent first, with jets tangent to the identity (exact Newton steps on
/// a square subsystem), then scale surviving coefficients to 1 with linear
/// rescalings. Coefficients that neither stage fixes are the moduli.
pub fn orbit_reduce(a: &[Fe], ctx: &NormalizedGenerators) -> Result<OrbitRep> {
    let m = a.len();
    let mut phi = JetTuple::identity(&ctx.orders);
    let mut cur = a.to_vec();
    let params: Vec<(usize, usize)> = {
        let mut v: Vec<(usize, usize)> = (0..ctx.r()).flat_map(|l| (2..ctx.sigma[l] as usize).map(move |d| (l, d))).collect();
        v.sort_by_key(|(l, d)| (*d, *l));
        v
    };
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|i| {
        let p = ctx.positions[*i];
        (p.exponent, p.branch, p.generator)
    });

    let jac = |pt: &[Fe]| -> Result<Vec<Vec<Fe>>> {
        // columns: params; rows: coefficient indices
        let cols: Vec<Vec<Fe>> = params.iter().map(|(l, d)| derivative(ctx, pt, *l, *d)).collect::<Result<_>>()?;
        Ok((0..m).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
    };

    let mut killed: Vec<usize> = Vec::new();
    if !params.is_empty() && m > 0 {
        let j = jac(&cur)?;
        let mut e = Rref::new();
        for &i in &order {
            if e.insert(&sparse(j[i].iter().cloned().enumerate())) {
                killed.push(i);
            }
        }
        let pivots: Vec<usize> = e.pivots().collect();
        let mut j = j;
        for step in 0..NEWTON_STEPS {
            if killed.iter().all(|i| cur[*i].is_zero()) {
                break;
            }
            if step > 0 {
                j = jac(&cur)?;
            }
            let rows: Vec<SparseVec> = killed.iter().map(|i| sparse(pivots.iter().enumerate().map(|(c, p)| (c, j[*i][*p].clone())))).collect();
            let rhs: Vec<Fe> = killed.iter().map(|i| -cur[*i].clone()).collect();
            let Some(sol) = solve(&rows, &rhs, pivots.len()) else {
                break;
            };
            let vals: Vec<Fe> = (0..pivots.len()).map(|c| sol.get(&c).cloned().unwrap_or_else(Fe::zero)).collect();
            let ps: Vec<(usize, usize)> = pivots.iter().map(|p| params[*p]).collect();
            let delta = unipotent_jet(ctx, &ps, &vals);
            cur = act(&delta, &cur, ctx)?;
            phi = phi.compose(&delta)?;
        }
        killed.retain(|i| cur[*i].is_zero());
    }

    // torus stage
    let r = ctx.r();
    let mut used = vec![false; r];
    let mut unit = Vec::new();
    for &i in &order {
        if killed.contains(&i) || cur[i].is_zero() {
            continue;
        }
        let p = ctx.positions[i];
        let g = p.generator;
        let mut w = vec![0i64; r];
        w[p.branch] += p.exponent as i64;
        w[ctx.lead[g]] -= ctx.values[g].0[ctx.lead[g]].fin().unwrap() as i64;
        let Some(l) = (0..r).find(|l| !used[*l] && w[*l].abs() == 1) else {
            continue;
        };
        // a coefficient already equal to 1 still pins its branch scaling
        if !cur[i].is_one() {
            let c = if w[l] == 1 { cur[i].inv() } else { cur[i].clone() };
            let mut jets: Vec<TruncatedSeries> = ctx.orders.iter().map(|n| TruncatedSeries::t(*n)).collect();
            jets[l] = TruncatedSeries::monomial(c, 1, ctx.orders[l]);
            let tj = JetTuple(jets);
            cur = act(&tj, &cur, ctx)?;
            phi = phi.compose(&tj)?;
        }
        for k in 0..r {
            if w[k] != 0 {
                used[k] = true;
            }
        }
        unit.push(i);
    }
    let free = (0..m).filter(|i| !killed.contains(i) && !unit.contains(i) && !cur[*i].is_zero()).collect();
    Ok(OrbitRep { point: cur, phi, killed, unit, free })
}

/// Whether two marked curves with the same semiring are analytically
/// equivalent as marked curves: both normalized points are reduced to their
/// orbit representatives, and equality is certified by the connecting jet.
pub fn marked_equivalence_probe(c1: &CurveGerm, c2: &CurveGerm) -> Result<bool> {
    let (s1, g1) = c1.semiring()?;
    let (s2, g2) = c2.semiring()?;
    if s1 != s2 || !g1.window_eq(&g2) {
        return Err(Error::Precondition("the curves have different semirings".into()));
    }
    if c1.multiplicity == 1 || two_smooth_branches(c1) {
        return Ok(true);
    }
    let n1 = normal_form(c1)?;
    let n2 = normal_form(c2)?;
    if n1.values != n2.values || n1.positions != n2.positions {
        return Ok(false);
    }
    let r1 = orbit_reduce(&n1.coeffs, &n1)?;
    let r2 = orbit_reduce(&n2.coeffs, &n1)?;
    if r1.point != r2.point {
        return Ok(false);
    }
    let phi = r1.phi.compose(&r2.phi.inverse()?)?;
    Ok(act(&phi, &n1.coeffs, &n1)? == n2.coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffcore::BivariatePoly;
    use crate::curvegerm::Branch;

    fn line_cusp() -> CurveGerm {
        CurveGerm::from_branches(vec![Branch::from_ints(&[(1, 1)], &[]).unwrap(), Branch::from_ints(&[(2, 1)], &[(3, 1)]).unwrap()]).unwrap()
    }

    fn fam(sets: &[&[u32]]) -> ExponentFamily {
        ExponentFamily::new(sets.iter().map(|s| s.iter().copied().collect()).collect())
    }

    #[test]
    fn line_cusp_reductions() {
        let c = line_cusp();
        let (_, g) = c.semiring().unwrap();
        let g1 = ValueTuple::fin(&[1, 2]);
        let p = ExponentFamily::initial(&g1, 0, &[3, 5]);
        assert_eq!(p, fam(&[&[2], &[2, 3, 4]]));
        let (steps, end) = reduce_family(&p, &g, &g1).unwrap();
        assert_eq!(steps, vec![ReductionStep { n: ValueTuple::fin(&[2, 3]), coord: 0 }, ReductionStep { n: ValueTuple::of(&[None, Some(3)]), coord: 1 }]);
        assert_eq!(end, fam(&[&[], &[2, 4]]));
        assert!(end.is_reduced(&g));
        let g2 = ValueTuple::of(&[None, Some(3)]);
        let p2 = ExponentFamily::initial(&g2, 1, &[3, 5]);
        assert!(reduce_family(&p2, &g, &g2).unwrap().0.is_empty());
    }

    #[test]
    fn line_cusp_normal_form() {
        let c = line_cusp();
        let orders = [3usize, 5];
        let br = c.series_at(&orders);
        let x = RingElement::from_poly(&BivariatePoly::x(), &br);
        let y = RingElement::from_poly(&BivariatePoly::y(), &br);
        let ng = normalize(&x, &y, &c).unwrap();
        let labels: Vec<_> = ng.positions.iter().map(|p| p.label()).collect();
        assert_eq!(labels, vec![(1, 2, 2), (1, 2, 4), (2, 2, 4)]);
        assert_eq!(ng.coeffs, vec![Fe::one(), Fe::zero(), Fe::zero()]);
        assert_eq!(ng.generators[0].on_branches[0], TruncatedSeries::t(3));
        // a different witness for the same generator values
        let x2 = RingElement::from_poly(&BivariatePoly::from_ints(&[(1, 0, 2), (0, 2, 1), (2, 1, 3)]), &br);
        let y2 = RingElement::from_poly(&BivariatePoly::from_ints(&[(0, 1, -1), (0, 2, 1), (1, 1, 7)]), &br);
        let ng2 = normalize(&x2, &y2, &c).unwrap();
        let ng3 = normalize(&x, &y, &c).unwrap();
        assert_eq!(ng2.coeffs, ng3.coeffs);
    }

    #[test]
    fn smooth_pair_has_no_moduli() {
        let c = CurveGerm::from_branches(vec![Branch::from_ints(&[(1, 1)], &[]).unwrap(), Branch::from_ints(&[(1, 1)], &[(3, -1)]).unwrap()]).unwrap();
        assert!(moduli_point(&c).unwrap().0.is_empty());
    }

    #[test]
    fn jet_inverse() {
        let j = JetTuple::new(vec![TruncatedSeries::from_terms([(1, Fe::int(2)), (2, Fe::int(3)), (4, Fe::int(-1))], 6)]).unwrap();
        let id = j.compose(&j.inverse().unwrap()).unwrap();
        assert_eq!(id, JetTuple::identity(&[6]));
    }
}
