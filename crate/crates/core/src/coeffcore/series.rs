//! Truncated power series in one variable with sparse exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use super::field::Fe;
use crate::error::{Error, Result};

/// Sum of c_k v^k for k < `n`; exponents at or above the truncation order
/// are never stored, and neither are zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    var: char,
    n: usize,
    c: BTreeMap<usize, Fe>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
}

impl TruncatedSeries {
    pub fn zero(n: usize) -> Self {
        TruncatedSeries { var: 't', n, c: BTreeMap::new() }
    }

    pub fn with_var(mut self, var: char) -> Self {
        self.var = var;
        self
    }

    pub fn monomial(coef: Fe, k: usize, n: usize) -> Self {
        let mut s = Self::zero(n);
        s.set(k, coef);
        s
    }

    /// The identity series t.
    pub fn t(n: usize) -> Self {
        Self::monomial(Fe::one(), 1, n)
    }

    pub fn constant(c: Fe, n: usize) -> Self {
        Self::monomial(c, 0, n)
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, Fe)>>(terms: I, n: usize) -> Self {
        let mut s = Self::zero(n);
        for (k, c) in terms {
            let cur = s.coeff(k);
            s.set(k, &cur + &c);
        }
        s
    }

    pub fn var(&self) -> char {
        self.var
    }

    pub fn trunc_order(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Fe)> {
        self.c.iter().map(|(k, v)| (*k, v))
    }

    pub fn num_terms(&self) -> usize {
        self.c.len()
    }

    pub fn coeff(&self, k: usize) -> Fe {
        self.c.get(&k).cloned().unwrap_or_else(Fe::zero)
    }

    pub fn set(&mut self, k: usize, v: Fe) {
        if k >= self.n || v.is_zero() {
            self.c.remove(&k);
        } else {
            self.c.insert(k, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Valuation; `None` stands for infinity (no stored term).
    pub fn valuation(&self) -> Option<usize> {
        self.c.keys().next().copied()
    }

    /// Highest stored exponent.
    pub fn degree(&self) -> Option<usize> {
        self.c.keys().next_back().copied()
    }

    pub fn leading(&self) -> Option<(usize, &Fe)> {
        self.c.iter().next().map(|(k, v)| (*k, v))
    }

    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.n);
        TruncatedSeries { var: self.var, n, c: self.c.range(..n).map(|(k, v)| (*k, v.clone())).collect() }
    }

    /// Raise the nominal truncation order without adding information; only
    /// meaningful for series known to be polynomials.
    pub fn extend_order(&self, n: usize) -> Self {
        TruncatedSeries { var: self.var, n: n.max(self.n), c: self.c.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.var, o.var);
        let n = self.n.min(o.n);
        let mut c: BTreeMap<usize, Fe> = self.c.range(..n).map(|(k, v)| (*k, v.clone())).collect();
        for (k, v) in o.c.range(..n) {
            let s = match c.get(k) {
                Some(a) => a + v,
                None => v.clone(),
            };
            if s.is_zero() {
                c.remove(k);
            } else {
                c.insert(*k, s);
            }
        }
        TruncatedSeries { var: self.var, n, c }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { var: self.var, n: self.n, c: self.c.iter().map(|(k, v)| (*k, -v)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Fe) -> Self {
        if s.is_zero() {
            return Self::zero(self.n).with_var(self.var);
        }
        TruncatedSeries { var: self.var, n: self.n, c: self.c.iter().map(|(k, v)| (*k, v * s)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.var, o.var);
        let n = self.n.min(o.n);
        let mut acc: BTreeMap<usize, Fe> = BTreeMap::new();
        for (i, a) in self.c.range(..n) {
            for (j, b) in o.c.range(..n - i) {
                let e = acc.entry(i + j).or_insert_with(Fe::zero);
                *e = &*e + &(a * b);
            }
        }
        acc.retain(|_, v| !v.is_zero());
        TruncatedSeries { var: self.var, n, c: acc }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Fe::one(), self.n).with_var(self.var);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiply by v^k (the truncation order is kept).
    pub fn shift_up(&self, k: usize) -> Self {
        TruncatedSeries { var: self.var, n: self.n, c: self.c.iter().filter(|(e, _)| **e + k < self.n).map(|(e, v)| (e + k, v.clone())).collect() }
    }

    /// Divide by v^k; requires valuation >= k. The truncation order drops by k.
    pub fn shift_down(&self, k: usize) -> Self {
        assert!(self.valuation().is_none_or(|v| v >= k), "shift_down below valuation");
        TruncatedSeries { var: self.var, n: self.n.saturating_sub(k), c: self.c.iter().map(|(e, v)| (e - k, v.clone())).collect() }
    }

    /// Multiplicative inverse of a unit (nonzero constant term).
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return Err(Error::Precondition("series inverse needs a nonzero constant term".into()));
        }
        let inv0 = c0.inv();
        let mut out = Self::zero(self.n).with_var(self.var);
        out.set(0, inv0.clone());
        for k in 1..self.n {
            let mut s = Fe::zero();
            for (i, a) in self.c.range(1..=k) {
                s = &s + &(a * &out.coeff(k - i));
            }
            out.set(k, -(&s * &inv0));
        }
        Ok(out)
    }

    /// Quotient of two series whose quotient is a series (valuation of the
    /// divisor not above that of the dividend).
    pub fn div(&self, o: &Self) -> Result<Self> {
        let Some(vo) = o.valuation() else {
            return Err(Error::Precondition("division by the zero series".into()));
        };
        if self.is_zero() {
            return Ok(Self::zero(o.n.saturating_sub(vo).min(self.n)).with_var(self.var));
        }
        let vs = self.valuation().unwrap();
        if vs < vo {
            return Err(Error::Precondition("series quotient is not a series".into()));
        }
        let den = o.shift_down(vo);
        let num = self.shift_down(vo);
        Ok(num.mul(&den.inverse()?))
    }

    pub fn derivative(&self) -> Self {
        TruncatedSeries {
            var: self.var,
            n: self.n.saturating_sub(1),
            c: self.c.iter().filter(|(k, _)| **k > 0).map(|(k, v)| (k - 1, v * &Fe::int(*k as i64))).collect(),
        }
    }

    /// outer(inner(v)); the result is truncated at the smaller order.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.valuation().is_some_and(|v| v == 0) {
            return Err(Error::Precondition("inner series must vanish at the origin".into()));
        }
        let n = self.n.min(inner.n);
        let inner = inner.truncate(n);
        let mut acc = Self::zero(n).with_var(inner.var);
        let mut p = Self::constant(Fe::one(), n).with_var(inner.var);
        let top = self.degree().unwrap_or(0);
        for k in 0..=top {
            if k > 0 {
                p = p.mul(&inner);
                if p.is_zero() {
                    break;
                }
            }
            let c = self.coeff(k);
            if !c.is_zero() {
                acc = acc.add(&p.scale(&c));
            }
        }
        Ok(acc)
    }

    pub fn eval_poly(&self, x: &Fe) -> Fe {
        let mut acc = Fe::zero();
        let mut p = Fe::one();
        let mut last = 0;
        for (k, v) in &self.c {
            p = &p * &x.pow((*k - last) as u32);
            last = *k;
            acc = &acc + &(v * &p);
        }
        acc
    }
}

/// Checked add/mul with the variable-mismatch rule.
pub fn series_arith(lhs: &TruncatedSeries, rhs: &TruncatedSeries, op: SeriesOp) -> Result<TruncatedSeries> {
    if lhs.var != rhs.var {
        return Err(Error::Input(format!("variable mismatch: {} vs {}", lhs.var, rhs.var)));
    }
    Ok(match op {
        SeriesOp::Add => lhs.add(rhs),
        SeriesOp::Mul => lhs.mul(rhs),
    })
}

/// Checked composition (also rejects variable mismatch).
pub fn series_compose(outer: &TruncatedSeries, inner: &TruncatedSeries) -> Result<TruncatedSeries> {
    if outer.var != inner.var {
        return Err(Error::Input(format!("variable mismatch: {} vs {}", outer.var, inner.var)));
    }
    outer.compose(inner)
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "O({}^{})", self.var, self.n);
        }
        for (i, (k, v)) in self.c.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{v}")?,
                1 => write!(f, "{v}*{}", self.var)?,
                _ => write!(f, "{v}*{}^{k}", self.var)?,
            }
        }
        write!(f, " + O({}^{})", self.var, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(terms: &[(usize, i64)], n: usize) -> TruncatedSeries {
        TruncatedSeries::from_terms(terms.iter().map(|(k, c)| (*k, Fe::int(*c))), n)
    }

    #[test]
    fn product_truncates() {
        let a = s(&[(1, 1), (2, 1)], 5);
        let b = s(&[(1, 1)], 5);
        assert_eq!(a.mul(&b), s(&[(2, 1), (3, 1)], 5));
        let c = s(&[(3, 1), (4, 2)], 5);
        assert!(c.mul(&c).is_zero());
    }

    #[test]
    fn add_zero_is_identity() {
        let a = s(&[(0, 3), (4, -1)], 6);
        assert_eq!(a.add(&TruncatedSeries::zero(6)), a);
    }

    #[test]
    fn compose_binomial() {
        // t^2 o (2t + 3t^2) = 4t^2 + 12t^3 + 9t^4
        let outer = s(&[(2, 1)], 8);
        let inner = s(&[(1, 2), (2, 3)], 8);
        assert_eq!(outer.compose(&inner).unwrap(), s(&[(2, 4), (3, 12), (4, 9)], 8));
        assert_eq!(outer.compose(&TruncatedSeries::t(8)).unwrap(), outer);
    }

    #[test]
    fn compose_rejects_unit_inner() {
        let outer = s(&[(2, 1)], 8);
        assert!(outer.compose(&s(&[(0, 1), (1, 1)], 8)).is_err());
    }

    #[test]
    fn mismatched_variables_rejected() {
        let a = s(&[(1, 1)], 4);
        let b = s(&[(1, 1)], 4).with_var('u');
        assert!(series_arith(&a, &b, SeriesOp::Add).is_err());
    }

    #[test]
    fn inverse_and_division() {
        let a = s(&[(0, 1), (1, 1)], 6);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, s(&[(0, 1), (1, -1), (2, 1), (3, -1), (4, 1), (5, -1)], 6));
        let num = s(&[(2, 2), (3, 2)], 8);
        let den = s(&[(2, 1)], 8);
        assert_eq!(num.div(&den).unwrap(), s(&[(0, 2), (1, 2)], 6));
    }
}
