//! Sparse bivariate polynomials in x, y.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::field::Fe;
use super::series::TruncatedSeries;

/// Exponent pair (i, j) of x^i y^j, ordered graded-lexicographically with x > y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub u32, pub u32);

impl Mono {
    pub fn deg(self) -> u32 {
        self.0 + self.1
    }
    pub fn divides(self, o: Mono) -> bool {
        self.0 <= o.0 && self.1 <= o.1
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.deg(), self.0).cmp(&(o.deg(), o.0))
    }
}
impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BivariatePoly {
    t: BTreeMap<Mono, Fe>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Fe) -> Self {
        Self::term(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(Fe::one())
    }

    pub fn term(c: Fe, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.set(i, j, c);
        p
    }

    pub fn x() -> Self {
        Self::term(Fe::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::term(Fe::one(), 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, u32, Fe)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (i, j, c) in it {
            p.add_term(i, j, &c);
        }
        p
    }

    /// Integer-coefficient shorthand used by tests and the catalog.
    pub fn from_ints(terms: &[(u32, u32, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|(i, j, c)| (*i, *j, Fe::int(*c))))
    }

    pub fn coeff(&self, i: u32, j: u32) -> Fe {
        self.t.get(&Mono(i, j)).cloned().unwrap_or_else(Fe::zero)
    }

    pub fn set(&mut self, i: u32, j: u32, c: Fe) {
        if c.is_zero() {
            self.t.remove(&Mono(i, j));
        } else {
            self.t.insert(Mono(i, j), c);
        }
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: &Fe) {
        if c.is_zero() {
            return;
        }
        let m = Mono(i, j);
        let s = match self.t.get(&m) {
            Some(a) => a + c,
            None => c.clone(),
        };
        if s.is_zero() {
            self.t.remove(&m);
        } else {
            self.t.insert(m, s);
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (Mono, &Fe)> {
        self.t.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.t.len()
    }

    pub fn is_zero(&self) -> bool {
        self.t.is_empty()
    }

    /// Minimal total degree of a term; `None` for the zero polynomial.
    pub fn order(&self) -> Option<u32> {
        self.t.keys().next().map(|m| m.deg())
    }

    pub fn degree(&self) -> Option<u32> {
        self.t.keys().next_back().map(|m| m.deg())
    }

    pub fn leading(&self) -> Option<(Mono, &Fe)> {
        self.t.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn constant_term(&self) -> Fe {
        self.coeff(0, 0)
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        BivariatePoly { t: self.t.iter().filter(|(m, _)| m.deg() == d).map(|(m, c)| (*m, c.clone())).collect() }
    }

    /// Initial form: the homogeneous part of lowest degree.
    pub fn initial(&self) -> Self {
        match self.order() {
            Some(d) => self.homogeneous_part(d),
            None => Self::zero(),
        }
    }

    /// Terms of total degree <= d.
    pub fn truncate_degree(&self, d: u32) -> Self {
        BivariatePoly { t: self.t.iter().filter(|(m, _)| m.deg() <= d).map(|(m, c)| (*m, c.clone())).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.t {
            r.add_term(m.0, m.1, c);
        }
        r
    }

    pub fn neg(&self) -> Self {
        BivariatePoly { t: self.t.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.t {
            r.add_term(m.0, m.1, &-c);
        }
        r
    }

    pub fn scale(&self, s: &Fe) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        BivariatePoly { t: self.t.iter().map(|(m, c)| (*m, c * s)).collect() }
    }

    pub fn mul_mono(&self, i: u32, j: u32) -> Self {
        BivariatePoly { t: self.t.iter().map(|(m, c)| (Mono(m.0 + i, m.1 + j), c.clone())).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut acc: BTreeMap<Mono, Fe> = BTreeMap::new();
        for (a, ca) in &self.t {
            for (b, cb) in &o.t {
                let m = Mono(a.0 + b.0, a.1 + b.1);
                let e = acc.entry(m).or_insert_with(Fe::zero);
                *e = &*e + &(ca * cb);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        BivariatePoly { t: acc }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn dx(&self) -> Self {
        BivariatePoly { t: self.t.iter().filter(|(m, _)| m.0 > 0).map(|(m, c)| (Mono(m.0 - 1, m.1), c * &Fe::int(m.0 as i64))).collect() }
    }

    pub fn dy(&self) -> Self {
        BivariatePoly { t: self.t.iter().filter(|(m, _)| m.1 > 0).map(|(m, c)| (Mono(m.0, m.1 - 1), c * &Fe::int(m.1 as i64))).collect() }
    }

    pub fn eval(&self, x: &Fe, y: &Fe) -> Fe {
        self.t.iter().map(|(m, c)| c * &(x.pow(m.0) * y.pow(m.1))).sum()
    }

    /// p(X, Y) for polynomial substitutions X, Y.
    pub fn substitute(&self, xs: &Self, ys: &Self) -> Self {
        let (mi, mj) = self.t.keys().fold((0, 0), |(a, b), m| (a.max(m.0), b.max(m.1)));
        let xp = powers(xs, mi, Self::one(), |a, b| a.mul(b));
        let yp = powers(ys, mj, Self::one(), |a, b| a.mul(b));
        let mut acc = Self::zero();
        for (m, c) in &self.t {
            acc = acc.add(&xp[m.0 as usize].mul(&yp[m.1 as usize]).scale(c));
        }
        acc
    }

    /// p(x(t), y(t)) as a truncated series.
    pub fn eval_series(&self, xs: &TruncatedSeries, ys: &TruncatedSeries) -> TruncatedSeries {
        let n = xs.trunc_order().min(ys.trunc_order());
        let (mi, mj) = self.t.keys().fold((0, 0), |(a, b), m| (a.max(m.0), b.max(m.1)));
        let one = TruncatedSeries::constant(Fe::one(), n);
        let xp = powers(&xs.truncate(n), mi, one.clone(), |a, b| a.mul(b));
        let yp = powers(&ys.truncate(n), mj, one, |a, b| a.mul(b));
        let mut acc = TruncatedSeries::zero(n);
        for (m, c) in &self.t {
            acc = acc.add(&xp[m.0 as usize].mul(&yp[m.1 as usize]).scale(c));
        }
        acc
    }

    /// Largest k with x^k dividing p (None for zero).
    pub fn x_adic_order(&self) -> Option<u32> {
        self.t.keys().map(|m| m.0).min()
    }

    pub fn y_adic_order(&self) -> Option<u32> {
        self.t.keys().map(|m| m.1).min()
    }

    /// Divide by x^a y^b; panics unless exact.
    pub fn div_mono(&self, a: u32, b: u32) -> Self {
        BivariatePoly {
            t: self
                .t
                .iter()
                .map(|(m, c)| {
                    assert!(m.0 >= a && m.1 >= b, "monomial division not exact");
                    (Mono(m.0 - a, m.1 - b), c.clone())
                })
                .collect(),
        }
    }

    /// Restriction to x = 0 as coefficients in y, low degree first.
    pub fn restrict_x0(&self) -> Vec<Fe> {
        let mut v = Vec::new();
        for (m, c) in &self.t {
            if m.0 == 0 {
                let j = m.1 as usize;
                if v.len() <= j {
                    v.resize(j + 1, Fe::zero());
                }
                v[j] = c.clone();
            }
        }
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.t.iter().map(|(m, c)| serde_json::json!([m.0, m.1, c.to_json()])).collect())
    }
}

fn powers<T: Clone>(base: &T, top: u32, one: T, mul: impl Fn(&T, &T) -> T) -> Vec<T> {
    let mut v = Vec::with_capacity(top as usize + 1);
    v.push(one);
    for k in 1..=top as usize {
        let next = mul(&v[k - 1], base);
        v.push(next);
    }
    v
}

/// Exact division: returns (q, true) when num = q * den, else (partial, false).
/// Multivariate division in graded-lex order, confirmed by re-multiplication.
pub fn poly_divide_exact(num: &BivariatePoly, den: &BivariatePoly) -> (BivariatePoly, bool) {
    assert!(!den.is_zero(), "division by the zero polynomial");
    let (lm, lc) = den.leading().map(|(m, c)| (m, c.clone())).unwrap();
    let lci = lc.inv();
    let mut r = num.clone();
    let mut quo = BivariatePoly::zero();
    while let Some((m, c)) = r.leading().map(|(m, c)| (m, c.clone())) {
        if !lm.divides(m) {
            return (quo, false);
        }
        let (a, b) = (m.0 - lm.0, m.1 - lm.1);
        let coef = &c * &lci;
        r = r.sub(&den.mul_mono(a, b).scale(&coef));
        quo.add_term(a, b, &coef);
    }
    let ok = quo.mul(den) == *num;
    (quo, ok)
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.t.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mono = match (m.0, m.1) {
                (0, 0) => String::new(),
                (i, 0) => {
                    if i == 1 {
                        "x".into()
                    } else {
                        format!("x^{i}")
                    }
                }
                (0, j) => {
                    if j == 1 {
                        "y".into()
                    } else {
                        format!("y^{j}")
                    }
                }
                (i, j) => format!("{}*{}", if i == 1 { "x".into() } else { format!("x^{i}") }, if j == 1 { "y".into() } else { format!("y^{j}") }),
            };
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{c}*{mono}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: &[(u32, u32, i64)]) -> BivariatePoly {
        BivariatePoly::from_ints(t)
    }

    #[test]
    fn exact_division_examples() {
        let (qq, ok) = poly_divide_exact(&p(&[(1, 1, 1)]), &p(&[(1, 0, 1)]));
        assert!(ok);
        assert_eq!(qq, p(&[(0, 1, 1)]));
        let (_, ok) = poly_divide_exact(&p(&[(2, 0, 1), (0, 2, 1)]), &p(&[(1, 0, 1)]));
        assert!(!ok);
    }

    #[test]
    fn wedge_of_euler_pair_divides() {
        // X1 = x d/dx, X2 = y d/dy: a1 b2 - a2 b1 = xy
        let w = p(&[(1, 0, 1)]).mul(&p(&[(0, 1, 1)]));
        let (qq, ok) = poly_divide_exact(&w, &p(&[(1, 1, 1)]));
        assert!(ok);
        assert_eq!(qq, BivariatePoly::one());
    }

    #[test]
    fn homogeneous_parts() {
        let f = p(&[(2, 0, 1), (1, 1, 1), (0, 3, 1)]);
        assert_eq!(f.homogeneous_part(2), p(&[(2, 0, 1), (1, 1, 1)]));
        assert!(f.homogeneous_part(1).is_zero());
        assert_eq!(f.order(), Some(2));
        assert_eq!(BivariatePoly::zero().order(), None);
    }

    #[test]
    fn series_evaluation_of_cusp() {
        let f = p(&[(0, 2, 1), (3, 0, -1)]);
        let n = 12;
        let xs = TruncatedSeries::monomial(Fe::one(), 2, n);
        let ys = TruncatedSeries::monomial(Fe::one(), 3, n);
        assert!(f.eval_series(&xs, &ys).is_zero());
    }

    #[test]
    fn grlex_leading_term() {
        let f = p(&[(0, 3, 1), (2, 1, 5), (1, 1, 1)]);
        assert_eq!(f.leading().unwrap().0, Mono(2, 1));
    }
}
