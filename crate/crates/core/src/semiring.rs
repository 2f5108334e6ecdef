//! The tropical semiring of values of a marked curve, computed inside the
//! conductor window by a product/cancellation closure.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::coeffcore::linalg::{axpy, nullspace, solve, sparse, SparseVec};
use crate::coeffcore::{BivariatePoly, Fe, TruncatedSeries};
use crate::error::{Error, Result};

/// An entry of a value tuple: a natural number or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum V {
    Fin(u32),
    Inf,
}

impl V {
    pub fn add(self, o: V) -> V {
        match (self, o) {
            (V::Fin(a), V::Fin(b)) => V::Fin(a + b),
            _ => V::Inf,
        }
    }
    pub fn is_inf(self) -> bool {
        self == V::Inf
    }
    pub fn fin(self) -> Option<u32> {
        match self {
            V::Fin(a) => Some(a),
            V::Inf => None,
        }
    }
    pub fn from_opt(v: Option<usize>) -> V {
        v.map_or(V::Inf, |k| V::Fin(k as u32))
    }
    pub fn to_json(self) -> serde_json::Value {
        match self {
            V::Fin(a) => serde_json::json!(a),
            V::Inf => serde_json::json!("inf"),
        }
    }
}

impl fmt::Display for V {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            V::Fin(a) => write!(f, "{a}"),
            V::Inf => write!(f, "∞"),
        }
    }
}

/// Element of (N ∪ {∞})^r. The derived order is lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValueTuple(pub Vec<V>);

impl ValueTuple {
    pub fn new(v: Vec<V>) -> Self {
        ValueTuple(v)
    }

    pub fn fin(v: &[u32]) -> Self {
        ValueTuple(v.iter().map(|k| V::Fin(*k)).collect())
    }

    /// Shorthand for tests: `None` is infinity.
    pub fn of(v: &[Option<u32>]) -> Self {
        ValueTuple(v.iter().map(|k| k.map_or(V::Inf, V::Fin)).collect())
    }

    pub fn infinity(r: usize) -> Self {
        ValueTuple(vec![V::Inf; r])
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    pub fn oplus(&self, o: &Self) -> Self {
        ValueTuple(self.0.iter().zip(&o.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn odot(&self, o: &Self) -> Self {
        ValueTuple(self.0.iter().zip(&o.0).map(|(a, b)| a.add(*b)).collect())
    }

    /// Product order.
    pub fn le(&self, o: &Self) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn is_infinity(&self) -> bool {
        self.0.iter().all(|v| v.is_inf())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| *v == V::Fin(0))
    }

    /// Indices of finite coordinates.
    pub fn finite_coords(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|i| !self.0[*i].is_inf()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.0.iter().map(|v| v.to_json()).collect())
    }
}

impl fmt::Display for ValueTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// How an element was built from x and y; materialized on demand.
#[derive(Debug)]
pub enum Recipe {
    One,
    X,
    Y,
    Poly(BivariatePoly),
    Mul(Arc<Recipe>, Arc<Recipe>),
    /// a + c * b
    Lin(Arc<Recipe>, Fe, Arc<Recipe>),
    /// Known only through its restrictions to the branches.
    Opaque,
}

fn materialize(r: &Arc<Recipe>, memo: &mut HashMap<*const Recipe, Option<BivariatePoly>>) -> Option<BivariatePoly> {
    let key = Arc::as_ptr(r);
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let p = match &**r {
        Recipe::One => Some(BivariatePoly::one()),
        Recipe::X => Some(BivariatePoly::x()),
        Recipe::Y => Some(BivariatePoly::y()),
        Recipe::Poly(p) => Some(p.clone()),
        Recipe::Mul(a, b) => materialize(a, memo).zip(materialize(b, memo)).map(|(a, b)| a.mul(&b)),
        Recipe::Lin(a, c, b) => materialize(a, memo).zip(materialize(b, memo)).map(|(a, b)| a.add(&b.scale(c))),
        Recipe::Opaque => None,
    };
    memo.insert(key, p.clone());
    p
}

// Constant term and linear part (c0, cx, cy) of a recipe.
fn jet1(r: &Arc<Recipe>, memo: &mut HashMap<*const Recipe, Option<[Fe; 3]>>) -> Option<[Fe; 3]> {
    let key = Arc::as_ptr(r);
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let z = Fe::zero;
    let p = match &**r {
        Recipe::One => Some([Fe::one(), z(), z()]),
        Recipe::X => Some([z(), Fe::one(), z()]),
        Recipe::Y => Some([z(), z(), Fe::one()]),
        Recipe::Poly(p) => Some([p.coeff(0, 0), p.coeff(1, 0), p.coeff(0, 1)]),
        Recipe::Mul(a, b) => {
            jet1(a, memo).zip(jet1(b, memo)).map(|(a, b)| [&a[0] * &b[0], &(&a[0] * &b[1]) + &(&a[1] * &b[0]), &(&a[0] * &b[2]) + &(&a[2] * &b[0])])
        }
        Recipe::Lin(a, c, b) => jet1(a, memo).zip(jet1(b, memo)).map(|(a, b)| [&a[0] + &(c * &b[0]), &a[1] + &(c * &b[1]), &a[2] + &(c * &b[2])]),
        Recipe::Opaque => None,
    };
    memo.insert(key, p.clone());
    p
}

/// A function on the curve: its restrictions to the branches, together with
/// an (x, y)-expression producing them.
#[derive(Clone, Debug)]
pub struct RingElement {
    pub on_branches: Vec<TruncatedSeries>,
    recipe: Arc<Recipe>,
}

impl RingElement {
    pub fn from_parts(on_branches: Vec<TruncatedSeries>, expr: BivariatePoly) -> Self {
        RingElement { on_branches, recipe: Arc::new(Recipe::Poly(expr)) }
    }

    /// Evaluate a polynomial on parametrized branches.
    pub fn from_poly(p: &BivariatePoly, branches: &[(TruncatedSeries, TruncatedSeries)]) -> Self {
        let on = branches.iter().map(|(x, y)| p.eval_series(x, y)).collect();
        Self::from_parts(on, p.clone())
    }

    fn seed(on_branches: Vec<TruncatedSeries>, recipe: Recipe) -> Self {
        RingElement { on_branches, recipe: Arc::new(recipe) }
    }

    /// Element known only by its branch restrictions.
    pub fn series_only(on_branches: Vec<TruncatedSeries>) -> Self {
        RingElement { on_branches, recipe: Arc::new(Recipe::Opaque) }
    }

    /// The (x, y)-expression, when the element was built from one.
    pub fn expression(&self) -> Option<BivariatePoly> {
        materialize(&self.recipe, &mut HashMap::new())
    }

    /// Linear part (coefficients of x and y) of the expression.
    pub fn linear_part(&self) -> Option<[Fe; 2]> {
        jet1(&self.recipe, &mut HashMap::new()).map(|[_, a, b]| [a, b])
    }

    pub fn r(&self) -> usize {
        self.on_branches.len()
    }

    pub fn valuation(&self) -> ValueTuple {
        ValueTuple(self.on_branches.iter().map(|s| V::from_opt(s.valuation())).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        RingElement {
            on_branches: self.on_branches.iter().zip(&o.on_branches).map(|(a, b)| a.mul(b)).collect(),
            recipe: Arc::new(Recipe::Mul(self.recipe.clone(), o.recipe.clone())),
        }
    }

    /// self + c * o
    pub fn add_scaled(&self, c: &Fe, o: &Self) -> Self {
        RingElement {
            on_branches: self.on_branches.iter().zip(&o.on_branches).map(|(a, b)| a.add(&b.scale(c))).collect(),
            recipe: Arc::new(Recipe::Lin(self.recipe.clone(), c.clone(), o.recipe.clone())),
        }
    }

    pub fn scale(&self, c: &Fe) -> Self {
        let zero = RingElement {
            on_branches: self.on_branches.iter().map(|s| TruncatedSeries::zero(s.trunc_order())).collect(),
            recipe: Arc::new(Recipe::Poly(BivariatePoly::zero())),
        };
        zero.add_scaled(c, self)
    }

    /// Component-wise truncation to the given orders.
    pub fn truncate(&self, orders: &[usize]) -> Self {
        RingElement { on_branches: self.on_branches.iter().zip(orders).map(|(s, n)| s.truncate(*n)).collect(), recipe: self.recipe.clone() }
    }

    /// Valuation with each coordinate clipped at sigma_l (sigma_l stands for
    /// "at least sigma_l, or infinity").
    pub fn clipped(&self, sigma: &[u32]) -> Vec<u32> {
        self.on_branches.iter().zip(sigma).map(|(s, &c)| s.valuation().map_or(c, |v| (v as u32).min(c))).collect()
    }
}

/// Mixed-radix index over the reduced window prod [0, sigma_l].
#[derive(Clone, Debug)]
struct Window {
    sigma: Vec<u32>,
    strides: Vec<usize>,
    size: usize,
}

impl Window {
    fn new(sigma: &[u32]) -> Result<Window> {
        let mut strides = Vec::with_capacity(sigma.len());
        let mut size: usize = 1;
        for s in sigma {
            strides.push(size);
            size = size
                .checked_mul(*s as usize + 1)
                .filter(|n| *n <= MAX_WINDOW)
                .ok_or_else(|| Error::Unsupported(format!("semiring window too large for conductor {sigma:?}")))?;
        }
        Ok(Window { sigma: sigma.to_vec(), strides, size })
    }

    fn index(&self, t: &[u32]) -> usize {
        t.iter().zip(&self.strides).map(|(a, s)| *a as usize * s).sum()
    }

    fn tuple(&self, mut idx: usize) -> Vec<u32> {
        self.sigma
            .iter()
            .map(|s| {
                let m = *s as usize + 1;
                let v = idx % m;
                idx /= m;
                v as u32
            })
            .collect()
    }
}

/// Largest reduced window the closure will attempt.
pub const MAX_WINDOW: usize = 400_000;

/// Budget on processed candidates in one closure run.
const CLOSURE_BUDGET: usize = 4_000_000;

/// Reduce a full tuple to the window: finite entries clip at sigma_l and
/// infinity is identified with sigma_l (conductor saturation).
pub fn canon(t: &ValueTuple, sigma: &[u32]) -> Vec<u32> {
    t.0.iter().zip(sigma).map(|(v, s)| v.fin().map_or(*s, |k| k.min(*s))).collect()
}

/// Gamma restricted to the conductor window.
#[derive(Clone, Debug)]
pub struct ValueSemiring {
    r: usize,
    sigma: Vec<u32>,
    window: Window,
    members: Vec<bool>,
    witnesses: BTreeMap<Vec<u32>, RingElement>,
}

struct Closure<'a> {
    win: &'a Window,
    members: Vec<bool>,
    wit: BTreeMap<Vec<u32>, Vec<RingElement>>,
    // every witness, in discovery order, with its reduced value
    all: Vec<(Vec<u32>, RingElement)>,
    // per value: echelon witnesses (pivot, normalized leading vector, element)
    ech: BTreeMap<Vec<u32>, Vec<(usize, Vec<Fe>, RingElement)>>,
    queue: VecDeque<RingElement>,
    processed: usize,
}

fn lead_vec(e: &RingElement, t: &[u32], sigma: &[u32]) -> Vec<Fe> {
    (0..t.len()).filter(|l| t[*l] < sigma[*l]).map(|l| e.on_branches[l].coeff(t[l] as usize)).collect()
}

impl Closure<'_> {
    fn is_member(&self, t: &[u32]) -> bool {
        self.members[self.win.index(t)]
    }

    // True when every tuple the cancellation of values a (cancelled at l) and b
    // could produce is already known.
    fn region_known(&self, a: &[u32], b: &[u32], l: usize) -> bool {
        let sigma = &self.win.sigma;
        let r = a.len();
        let mut lo = vec![0u32; r];
        let mut hi = vec![0u32; r];
        let mut boxsize: usize = 1;
        for j in 0..r {
            if j == l {
                lo[j] = (a[j] + 1).min(sigma[j]);
                hi[j] = sigma[j];
            } else if a[j] == b[j] {
                lo[j] = a[j];
                hi[j] = sigma[j];
            } else {
                lo[j] = a[j].min(b[j]);
                hi[j] = lo[j];
            }
            boxsize *= (hi[j] - lo[j] + 1) as usize;
        }
        if boxsize > 4096 {
            return false;
        }
        let mut known = true;
        for_each_product(&(0..r).map(|j| (lo[j]..=hi[j]).collect()).collect::<Vec<Vec<u32>>>(), &mut |t: &[u32]| {
            known &= self.is_member(t);
            known
        });
        known
    }

    fn push_cancel(&mut self, c: &RingElement, w: &RingElement, l: usize, tc: &[u32]) {
        let k = tc[l] as usize;
        let lam = &c.on_branches[l].coeff(k) / &w.on_branches[l].coeff(k);
        self.queue.push_back(c.add_scaled(&-lam, w));
    }

    // Subtract recorded witnesses while the leading vector is in their span.
    fn reduce(&self, mut c: RingElement) -> (Vec<u32>, RingElement) {
        let sigma = &self.win.sigma;
        loop {
            let tc = c.clipped(sigma);
            if tc == *sigma {
                return (tc, c);
            }
            let Some(lst) = self.ech.get(&tc) else {
                return (tc, c);
            };
            let mut lv = lead_vec(&c, &tc, sigma);
            for (p, lw, w) in lst {
                let coef = lv[*p].clone();
                if !coef.is_zero() {
                    c = c.add_scaled(&-&coef, w);
                    for (a, b) in lv.iter_mut().zip(lw) {
                        *a = &*a - &(&coef * b);
                    }
                }
            }
            // a vanished entry means the value moved; reduce again there
            if lv.iter().all(|x| !x.is_zero()) {
                return (tc, c);
            }
        }
    }

    // Record c (already reduced) in the echelon list of its value.
    fn record(&mut self, tc: &[u32], c: &RingElement) {
        let sigma = &self.win.sigma;
        let lv = lead_vec(c, tc, sigma);
        let p = lv.iter().position(|x| !x.is_zero()).expect("reduced element has a leading vector");
        let inv = lv[p].inv();
        let lw: Vec<Fe> = lv.iter().map(|x| x * &inv).collect();
        self.ech.entry(tc.to_vec()).or_default().push((p, lw, c.scale(&inv)));
    }

    fn run(&mut self) -> Result<()> {
        let sigma = self.win.sigma.clone();
        let r = sigma.len();
        while let Some(c) = self.queue.pop_front() {
            self.processed += 1;
            if self.processed > CLOSURE_BUDGET {
                return Err(Error::Bound("semiring closure exceeded its work budget".into()));
            }
            let (tc, c) = self.reduce(c);
            if tc == sigma {
                continue;
            }
            let finite: Vec<usize> = (0..r).filter(|l| tc[*l] < sigma[*l]).collect();
            let fresh = !self.wit.contains_key(&tc);
            let zero = tc.iter().all(|v| *v == 0);
            // products with every witness, and with itself
            if !zero {
                let mut prods = Vec::new();
                for (tb, w) in self.all.iter().chain(std::iter::once(&(tc.clone(), c.clone()))) {
                    if tb.iter().all(|v| *v == 0) {
                        continue;
                    }
                    if tc.iter().zip(tb).zip(&sigma).all(|((a, b), s)| a + b >= *s) {
                        continue;
                    }
                    prods.push(c.mul(w));
                }
                self.queue.extend(prods);
            }
            if fresh {
                self.members[self.win.index(&tc)] = true;
                // generic sums realize the minimum
                let mut sums = Vec::new();
                for (tb, lst) in &self.wit {
                    let m: Vec<u32> = tc.iter().zip(tb).map(|(a, b)| *a.min(b)).collect();
                    if self.is_member(&m) {
                        continue;
                    }
                    let w = &lst[0];
                    let clash = |lam: i64| {
                        (0..r).any(|l| {
                            tc[l] == tb[l]
                                && tc[l] < sigma[l]
                                && (&c.on_branches[l].coeff(tc[l] as usize) + &(&Fe::int(lam) * &w.on_branches[l].coeff(tc[l] as usize))).is_zero()
                        })
                    };
                    let mut lam = 1i64;
                    while clash(lam) {
                        lam += 1;
                    }
                    sums.push(c.add_scaled(&Fe::int(lam), w));
                }
                self.queue.extend(sums);
                // cancellations against other values sharing a coordinate
                let mut cancels = Vec::new();
                for (tb, lst) in &self.wit {
                    for &l in &finite {
                        if tb[l] == tc[l] && !self.region_known(&tc, tb, l) {
                            cancels.push((lst[0].clone(), l));
                        }
                    }
                }
                for (w, l) in cancels {
                    self.push_cancel(&c, &w, l, &tc);
                }
                self.wit.insert(tc.clone(), vec![c.clone()]);
            } else {
                // independent leading vector at a known value
                let lst = self.wit[&tc].clone();
                for w in &lst {
                    for &l in &finite {
                        if !self.region_known(&tc, &tc, l) {
                            self.push_cancel(&c, w, l, &tc);
                        }
                    }
                }
                self.wit.get_mut(&tc).unwrap().push(c.clone());
            }
            self.record(&tc, &c);
            self.all.push((tc, c));
        }
        Ok(())
    }
}

impl ValueSemiring {
    /// Closure from the coordinate functions on the given branch
    /// parametrizations, inside the window of `sigma`.
    pub fn compute(branches: &[(TruncatedSeries, TruncatedSeries)], sigma: &[u32]) -> Result<ValueSemiring> {
        let r = branches.len();
        if r == 0 || sigma.len() != r {
            return Err(Error::Precondition("branch count and conductor length differ".into()));
        }
        for ((x, y), s) in branches.iter().zip(sigma) {
            if x.trunc_order().min(y.trunc_order()) < *s as usize {
                return Err(Error::Truncation(format!("branch known to order {} below conductor {s}", x.trunc_order().min(y.trunc_order()))));
            }
        }
        let win = Window::new(sigma)?;
        let orders: Vec<usize> = sigma.iter().map(|s| *s as usize).collect();
        let xs: Vec<TruncatedSeries> = branches.iter().zip(&orders).map(|((x, _), n)| x.truncate(*n)).collect();
        let ys: Vec<TruncatedSeries> = branches.iter().zip(&orders).map(|((_, y), n)| y.truncate(*n)).collect();
        let ones: Vec<TruncatedSeries> = orders.iter().map(|n| TruncatedSeries::constant(Fe::one(), *n)).collect();
        let mut cl = Closure {
            win: &win,
            members: vec![false; win.size],
            wit: BTreeMap::new(),
            all: Vec::new(),
            ech: BTreeMap::new(),
            queue: VecDeque::new(),
            processed: 0,
        };
        cl.queue.push_back(RingElement::seed(ones, Recipe::One));
        cl.queue.push_back(RingElement::seed(xs, Recipe::X));
        cl.queue.push_back(RingElement::seed(ys, Recipe::Y));
        cl.run()?;
        let mut members = cl.members;
        // saturation: the tuple sigma stands for every tuple >= sigma
        members[win.index(sigma)] = true;
        let witnesses = cl.wit.into_iter().map(|(k, v)| (k, v.into_iter().next().unwrap())).collect();
        Ok(ValueSemiring { r, sigma: sigma.to_vec(), window: win, members, witnesses })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn sigma(&self) -> &[u32] {
        &self.sigma
    }

    pub fn contains(&self, t: &ValueTuple) -> bool {
        self.members[self.window.index(&canon(t, &self.sigma))]
    }

    pub fn contains_reduced(&self, t: &[u32]) -> bool {
        self.members[self.window.index(t)]
    }

    /// Members of the reduced window, in index order.
    pub fn reduced_members(&self) -> Vec<Vec<u32>> {
        (0..self.window.size).filter(|i| self.members[*i]).map(|i| self.window.tuple(i)).collect()
    }

    /// Members of the full window prod([0, sigma_l] ∪ {∞}), sorted.
    pub fn members(&self) -> Vec<ValueTuple> {
        let mut out = Vec::new();
        for t in self.reduced_members() {
            expand(&t, &self.sigma, &mut out);
        }
        out.sort();
        out
    }

    /// Realized witnesses keyed by reduced tuple.
    pub fn witnesses(&self) -> &BTreeMap<Vec<u32>, RingElement> {
        &self.witnesses
    }

    /// A witness whose valuation is window-equivalent to t.
    pub fn witness(&self, t: &ValueTuple) -> Option<&RingElement> {
        self.witnesses.get(&canon(t, &self.sigma))
    }

    /// Same conductor and same window.
    pub fn window_eq(&self, o: &ValueSemiring) -> bool {
        self.sigma == o.sigma && self.members == o.members
    }

    /// No decomposition a ⊙ b = alpha with a, b in Gamma different from alpha.
    pub fn is_irreducible(&self, alpha: &ValueTuple) -> Result<bool> {
        self.require_member(alpha)?;
        let opts: Vec<Vec<V>> = self.sigma.iter().map(|s| (0..=*s).map(V::Fin).chain([V::Inf]).collect()).collect();
        for a in self.members() {
            if a == *alpha {
                continue;
            }
            // per coordinate, the admissible values of b
            let mut choices: Vec<Vec<V>> = Vec::with_capacity(self.r);
            let mut ok = true;
            for i in 0..self.r {
                match (alpha.0[i], a.0[i]) {
                    (V::Fin(x), V::Fin(y)) if y <= x => choices.push(vec![V::Fin(x - y)]),
                    (V::Fin(_), _) => {
                        ok = false;
                        break;
                    }
                    (V::Inf, V::Inf) => choices.push(opts[i].clone()),
                    (V::Inf, V::Fin(_)) => choices.push(vec![V::Inf]),
                }
            }
            if !ok {
                continue;
            }
            let mut found = false;
            for_each_product(&choices, &mut |b: &[V]| {
                let b = ValueTuple(b.to_vec());
                if b != *alpha && self.contains(&b) {
                    found = true;
                }
                !found
            });
            if found {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every F_J(alpha), J nonempty proper subset of the finite coordinates, is empty.
    pub fn is_absolute(&self, alpha: &ValueTuple) -> Result<bool> {
        self.require_member(alpha)?;
        let ia = alpha.finite_coords();
        let k = ia.len();
        if k < 2 {
            return Ok(true);
        }
        for mask in 1..(1u32 << k) - 1 {
            // J = coordinates of ia selected by mask; the others must exceed alpha
            let mut choices: Vec<Vec<u32>> = Vec::with_capacity(self.r);
            for i in 0..self.r {
                let s = self.sigma[i];
                let pos = ia.iter().position(|x| *x == i);
                let exceed = pos.is_some_and(|p| mask & (1 << p) == 0);
                match alpha.0[i] {
                    V::Inf => choices.push(vec![s]),
                    V::Fin(a) if exceed => choices.push(((a + 1).min(s)..=s).collect()),
                    V::Fin(a) => choices.push(vec![a.min(s)]),
                }
            }
            let mut found = false;
            for_each_product(&choices, &mut |t: &[u32]| {
                if self.contains_reduced(t) {
                    found = true;
                }
                !found
            });
            if found {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Absolute points as reported: nonzero absolute members, where tuples in
    /// the saturated region (every finite entry at least sigma) are kept only
    /// when irreducible.
    pub fn absolute_points(&self) -> Result<Vec<ValueTuple>> {
        let mut out = Vec::new();
        for a in self.members() {
            if a.is_zero() || a.is_infinity() || !self.is_absolute(&a)? {
                continue;
            }
            if self.saturated(&a) && !self.is_irreducible(&a)? {
                continue;
            }
            out.push(a);
        }
        Ok(out)
    }

    fn saturated(&self, a: &ValueTuple) -> bool {
        a.0.iter().zip(&self.sigma).all(|(v, s)| v.fin().is_none_or(|k| k >= *s))
    }

    /// Irreducible absolute points, lexicographically sorted.
    pub fn generator_values(&self) -> Result<Vec<ValueTuple>> {
        let mut out = Vec::new();
        for a in self.members() {
            if a.is_zero() || a.is_infinity() {
                continue;
            }
            if self.is_absolute(&a)? && self.is_irreducible(&a)? {
                out.push(a);
            }
        }
        Ok(out)
    }

    fn require_member(&self, a: &ValueTuple) -> Result<()> {
        if a.r() != self.r {
            return Err(Error::Precondition("tuple length differs from branch count".into()));
        }
        if !self.contains(a) {
            return Err(Error::Precondition(format!("{a} is not in the semiring")));
        }
        Ok(())
    }

    /// The sub-semiring generated by the given values under ⊙ and ⊕ within
    /// the window, plus conductor saturation, as a reduced membership table.
    pub fn generated_by(&self, gens: &[ValueTuple]) -> Vec<bool> {
        let mut mem = vec![false; self.window.size];
        let zero = vec![0u32; self.r];
        mem[self.window.index(&zero)] = true;
        mem[self.window.index(&self.sigma)] = true;
        let g: Vec<Vec<u32>> = gens.iter().map(|t| canon(t, &self.sigma)).collect();
        let mut changed = true;
        while changed {
            changed = false;
            let cur: Vec<Vec<u32>> = (0..self.window.size).filter(|i| mem[*i]).map(|i| self.window.tuple(i)).collect();
            for a in &cur {
                for b in g.iter().chain(cur.iter()) {
                    let s: Vec<u32> = a.iter().zip(b).zip(&self.sigma).map(|((x, y), c)| (x + y).min(*c)).collect();
                    let m: Vec<u32> = a.iter().zip(b).map(|(x, y)| *x.min(y)).collect();
                    for t in [s, m] {
                        let i = self.window.index(&t);
                        if !mem[i] {
                            mem[i] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        mem
    }

    pub fn members_table(&self) -> &[bool] {
        &self.members
    }
}

/// Irreducible absolute values with witnesses.
#[derive(Clone, Debug)]
pub struct MinimalGenerators {
    pub values: Vec<ValueTuple>,
    pub elements: Vec<RingElement>,
    /// Indices of the two generators with independent linear parts.
    pub pair: Option<(usize, usize)>,
}

/// Generator values with exact witnesses, and the first pair (in
/// lexicographic order) whose witnesses have independent linear parts.
pub fn minimal_generators(curve: &crate::curvegerm::CurveGerm, gamma: &ValueSemiring) -> Result<MinimalGenerators> {
    let values = gamma.generator_values()?;
    let elements = values.iter().map(|g| realize(curve, g, &gamma.sigma)).collect::<Result<Vec<_>>>()?;
    let lin: Vec<Option<[Fe; 2]>> = elements.iter().map(|e| e.linear_part()).collect();
    let mut pair = None;
    'outer: for i in 0..values.len() {
        for j in i + 1..values.len() {
            if let (Some([a, b]), Some([c, d])) = (&lin[i], &lin[j]) {
                if !(&(a * d) - &(b * c)).is_zero() {
                    pair = Some((i, j));
                    break 'outer;
                }
            }
        }
    }
    Ok(MinimalGenerators { values, elements, pair })
}

/// A polynomial function with exact value g: finite entries are attained
/// (branch l is evaluated to order max(sigma_l, g_l + 1)), infinite entries
/// vanish to order sigma_l, which suffices by conductor saturation.
pub fn realize(curve: &crate::curvegerm::CurveGerm, g: &ValueTuple, sigma: &[u32]) -> Result<RingElement> {
    let r = curve.r();
    if g.r() != r || sigma.len() != r {
        return Err(Error::Precondition("tuple length differs from branch count".into()));
    }
    let lead = *g.finite_coords().first().ok_or_else(|| Error::Precondition("cannot realize the infinite tuple".into()))?;
    let orders: Vec<usize> = (0..r).map(|l| g.0[l].fin().map_or(sigma[l] as usize, |k| (sigma[l] as usize).max(k as usize + 1))).collect();
    let branches = curve.series_at(&orders);
    let top = *orders.iter().max().unwrap() as u32;
    for d in 1..=top.max(1) {
        let monos: Vec<(u32, u32)> = (1..=d).flat_map(|s| (0..=s).map(move |j| (s - j, j))).collect();
        let evals: Vec<Vec<TruncatedSeries>> = monos.iter().map(|(i, j)| branches.iter().map(|(x, y)| x.pow(*i).mul(&y.pow(*j))).collect()).collect();
        let col = |l: usize, k: usize| -> SparseVec { sparse(evals.iter().enumerate().map(|(c, e)| (c, e[l].coeff(k)))) };
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for l in 0..r {
            let below = g.0[l].fin().map_or(orders[l], |k| k as usize);
            for k in 0..below {
                rows.push(col(l, k));
                rhs.push(Fe::zero());
            }
        }
        rows.push(col(lead, g.0[lead].fin().unwrap() as usize));
        rhs.push(Fe::one());
        let Some(p) = solve(&rows, &rhs, monos.len()) else {
            continue;
        };
        let kernel = nullspace(&rows, monos.len());
        // move inside the solution space until every finite entry is attained
        for attempt in 0..=4 * kernel.len() as i64 {
            let mut v = p.clone();
            for (j, n) in kernel.iter().enumerate() {
                axpy(&mut v, &Fe::int((attempt + j as i64) % 5 * (j as i64 % 3 + 1) * attempt.signum()), n);
            }
            let poly = BivariatePoly::from_terms(v.iter().map(|(c, x)| (monos[*c].0, monos[*c].1, x.clone())));
            let e = RingElement::from_poly(&poly, &branches);
            if e.valuation() == *g {
                return Ok(e);
            }
        }
    }
    Err(Error::Inconsistent(format!("{g} is not realized by a polynomial of degree at most {top}")))
}

/// Window equality of a curve's semiring with a reference; a conductor
/// mismatch is an error rather than `false`.
pub fn semiring_equal(curve: &crate::curvegerm::CurveGerm, reference: &ValueSemiring) -> Result<bool> {
    let (sigma, g) = curve.semiring()?;
    if sigma != reference.sigma {
        return Err(Error::Precondition(format!("conductor {sigma:?} differs from reference {:?}", reference.sigma)));
    }
    Ok(g.window_eq(reference))
}

/// Expand a reduced tuple into the full-window tuples it stands for.
pub fn expand(t: &[u32], sigma: &[u32], out: &mut Vec<ValueTuple>) {
    let choices: Vec<Vec<V>> = t.iter().zip(sigma).map(|(v, s)| if v == s { vec![V::Fin(*s), V::Inf] } else { vec![V::Fin(*v)] }).collect();
    for_each_product(&choices, &mut |c: &[V]| {
        out.push(ValueTuple(c.to_vec()));
        true
    });
}

/// Visit the cartesian product; the callback returns false to stop.
pub fn for_each_product<T: Clone>(choices: &[Vec<T>], f: &mut dyn FnMut(&[T]) -> bool) {
    if choices.iter().any(|c| c.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; choices.len()];
    let mut cur: Vec<T> = choices.iter().map(|c| c[0].clone()).collect();
    loop {
        if !f(&cur) {
            return;
        }
        let mut j = 0;
        loop {
            if j == choices.len() {
                return;
            }
            idx[j] += 1;
            if idx[j] < choices[j].len() {
                cur[j] = choices[j][idx[j]].clone();
                break;
            }
            idx[j] = 0;
            cur[j] = choices[j][0].clone();
            j += 1;
        }
    }
}
