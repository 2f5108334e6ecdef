//! Instance generators and the rank oracle shared by the integration tests.
#![allow(dead_code)]

use germ_moduli::coeffcore::linalg::{sparse, Rref};
use germ_moduli::coeffcore::{BivariatePoly, Fe};
use germ_moduli::curvegerm::{Branch, CurveGerm};
use germ_moduli::saito::product;
use germ_moduli::semiring::for_each_product;
use rand::seq::SliceRandom;
use rand::Rng;

/// A branch (t^m, Σ c_k t^k) with k > m, or its swap; slope terms only for
/// smooth branches.
pub fn branch_from(m: usize, cs: &[i64], swap: bool, slope: i64) -> Option<Branch> {
    let mut y: Vec<(usize, i64)> = cs.iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, c)| (m + 1 + i, *c)).collect();
    if m > 1 && !y.iter().any(|(k, _)| num_integer::gcd(*k, m) == 1) {
        y.push((m + 1, 1));
    }
    if m == 1 && slope != 0 {
        y.push((1, slope));
    }
    let x = vec![(m, 1i64)];
    if swap { Branch::from_ints(&y, &x) } else { Branch::from_ints(&x, &y) }.ok()
}

pub fn random_branch(rng: &mut impl Rng) -> Branch {
    loop {
        let m = rng.gen_range(1..=3);
        let cs: Vec<i64> = (0..6).map(|_| rng.gen_range(-3..=3)).collect();
        if let Some(b) = branch_from(m, &cs, rng.gen(), rng.gen_range(-2..=2)) {
            return b;
        }
    }
}

/// One or two branches with total multiplicity at most `max_mult`.
pub fn random_curve(rng: &mut impl Rng, max_mult: u32) -> CurveGerm {
    loop {
        let mut bs = vec![random_branch(rng)];
        if rng.gen() {
            bs.push(random_branch(rng));
        }
        if bs.iter().map(|b| b.multiplicity()).sum::<u32>() > max_mult {
            continue;
        }
        if let Ok(c) = CurveGerm::from_branches(bs) {
            return c;
        }
    }
}

/// y − s x − c x², or x − c y² for the vertical slot.
pub fn component(slope: Option<i64>, c: i64) -> BivariatePoly {
    match slope {
        Some(s) => BivariatePoly::from_ints(&[(0, 1, 1), (1, 0, -s), (2, 0, -c)]),
        None => BivariatePoly::from_ints(&[(1, 0, 1), (0, 2, -c)]),
    }
}

/// Lines through the origin with distinct tangents, quadratic tails on at
/// most two of them, and an optional cusp tangent to y = 5x.
#[derive(Clone, Debug)]
pub struct Arrangement {
    pub slopes: Vec<Option<i64>>,
    pub tails: Vec<i64>,
    pub cusp: bool,
}

impl Arrangement {
    pub fn slots() -> Vec<Option<i64>> {
        std::iter::once(None).chain((-3..=3).map(Some)).collect()
    }

    pub fn new(slots: &[Option<i64>], k: usize, tails: &[i64], cusp: bool) -> Arrangement {
        let tails = (0..k).map(|i| tails.get(i).copied().unwrap_or(0)).collect();
        Arrangement { slopes: slots[..k].to_vec(), tails, cusp: cusp && k <= 3 }
    }

    pub fn random(rng: &mut impl Rng, lines: std::ops::RangeInclusive<usize>) -> Arrangement {
        let mut slots = Self::slots();
        slots.shuffle(rng);
        let k = rng.gen_range(lines);
        let tails = [rng.gen_range(-2..=2), rng.gen_range(-2..=2)];
        Arrangement::new(&slots, k, &tails, rng.gen())
    }

    pub fn factors(&self) -> Vec<BivariatePoly> {
        let mut fs: Vec<BivariatePoly> = self.slopes.iter().zip(&self.tails).map(|(s, c)| component(*s, *c)).collect();
        if self.cusp {
            fs.push(BivariatePoly::from_ints(&[(0, 2, 1), (1, 1, -10), (2, 0, 25), (3, 0, -1)]));
        }
        fs
    }

    pub fn poly(&self) -> BivariatePoly {
        product(&self.factors())
    }

    /// A smooth component whose tangent is not used yet; straight when a cusp
    /// is present, which keeps the Saito degree bound small.
    pub fn fresh_line(&self, c: i64) -> BivariatePoly {
        let slope = Self::slots().into_iter().find(|s| !self.slopes.contains(s)).unwrap();
        component(slope, if self.cusp { 0 } else { c })
    }
}

/// The semiring window from an independent rank criterion: a reduced tuple
/// tau is a value iff, in the space V of restrictions of all polynomials
/// modulo t^sigma, dim V_tau > dim V_{tau + e_l} for every l with
/// tau_l < sigma_l.
pub struct Oracle {
    // one row per monomial, columns (l, k) flattened
    rows: Vec<Vec<(usize, Fe)>>,
    offsets: Vec<usize>,
    total: usize,
}

impl Oracle {
    pub fn new(curve: &CurveGerm, sigma: &[u32]) -> Oracle {
        let orders: Vec<usize> = sigma.iter().map(|s| *s as usize).collect();
        let series = curve.series_at(&orders);
        let mut offsets = vec![0];
        for s in sigma {
            offsets.push(offsets.last().unwrap() + *s as usize);
        }
        let d = sigma.iter().max().copied().unwrap_or(0);
        let mut rows = Vec::new();
        for deg in 0..=d {
            for j in 0..=deg {
                let m = BivariatePoly::term(Fe::one(), deg - j, j);
                let mut row = Vec::new();
                for (l, (x, y)) in series.iter().enumerate() {
                    let v = m.eval_series(x, y);
                    for (k, c) in v.terms() {
                        row.push((offsets[l] + k, c.clone()));
                    }
                }
                rows.push(row);
            }
        }
        let mut o = Oracle { rows, offsets, total: 0 };
        o.total = o.rank(|_| true);
        o
    }

    fn rank(&self, cols: impl Fn(usize) -> bool) -> usize {
        let mut e = Rref::new();
        for r in &self.rows {
            e.insert(&sparse(r.iter().filter(|(c, _)| cols(*c)).cloned()));
        }
        e.rank()
    }

    // dim V_tau = rank(all) - rank(columns below tau)
    fn dim(&self, tau: &[u32]) -> usize {
        let below = |c: usize| {
            let l = self.offsets.iter().rposition(|o| *o <= c).unwrap();
            (c - self.offsets[l]) < tau[l] as usize
        };
        self.total - self.rank(below)
    }

    pub fn member(&self, tau: &[u32], sigma: &[u32]) -> bool {
        let d = self.dim(tau);
        (0..tau.len()).filter(|l| tau[*l] < sigma[*l]).all(|l| {
            let mut up = tau.to_vec();
            up[l] += 1;
            self.dim(&up) < d
        })
    }
}

/// First tuple where the window and the oracle disagree.
pub fn window_mismatch(curve: &CurveGerm) -> Option<Vec<u32>> {
    let (sigma, g) = curve.semiring().unwrap();
    let oracle = Oracle::new(curve, &sigma);
    let choices: Vec<Vec<u32>> = sigma.iter().map(|s| (0..=*s).collect()).collect();
    let mut bad = None;
    for_each_product(&choices, &mut |t: &[u32]| {
        if g.contains_reduced(t) != oracle.member(t, &sigma) {
            bad = Some(t.to_vec());
            return false;
        }
        true
    });
    bad
}
