//! Exact scalars: rationals and elements of a simple extension Q[z]/(m(z)).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parse "p", "-p" or "p/q".
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Canonical "p/q" (or "p" when integral) rendering.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Monic minimal polynomial of the extension generator, low degree first.
#[derive(Debug, PartialEq, Eq)]
pub struct MinPoly {
    pub var: String,
    pub coeffs: Vec<Q>,
}

impl MinPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// The ground field: Q itself or Q[z]/(m(z)).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FieldSpec {
    pub ext: Option<Arc<MinPoly>>,
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec { ext: None }
    }

    pub fn extension(var: &str, minpoly: Vec<Q>) -> Result<Self> {
        if minpoly.len() < 2 {
            return Err(Error::Input("minimal polynomial must have degree >= 1".into()));
        }
        if !minpoly.last().unwrap().is_one() {
            return Err(Error::Input("minimal polynomial must be monic".into()));
        }
        if minpoly.len() == 2 {
            // degree one: the extension is Q itself
            return Ok(FieldSpec::rationals());
        }
        Ok(FieldSpec { ext: Some(Arc::new(MinPoly { var: var.to_string(), coeffs: minpoly })) })
    }

    pub fn degree(&self) -> usize {
        self.ext.as_ref().map_or(1, |m| m.degree())
    }

    /// The generator z (or an error over Q).
    pub fn generator(&self) -> Result<Fe> {
        match &self.ext {
            None => Err(Error::Input("the rationals have no extension generator".into())),
            Some(m) => Ok(Fe::from_coeffs(vec![Q::zero(), Q::one()], Some(m.clone()))),
        }
    }

    pub fn from_coeffs(&self, c: Vec<Q>) -> Fe {
        Fe::from_coeffs(c, self.ext.clone())
    }
}

/// An exact field element. Pure rationals carry no modulus and mix freely
/// with elements of any extension.
#[derive(Clone, Debug)]
pub struct Fe {
    c: Vec<Q>,
    m: Option<Arc<MinPoly>>,
}

impl PartialEq for Fe {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}
impl Eq for Fe {}

impl Hash for Fe {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.c.hash(state)
    }
}

fn trim(c: &mut Vec<Q>) {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
}

fn pick(a: &Option<Arc<MinPoly>>, b: &Option<Arc<MinPoly>>) -> Option<Arc<MinPoly>> {
    match (a, b) {
        (Some(x), Some(y)) => {
            assert!(Arc::ptr_eq(x, y) || x == y, "mixing elements of different extensions");
            Some(x.clone())
        }
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    }
}

// Remainder of a modulo the monic polynomial m.
fn reduce(mut a: Vec<Q>, m: &[Q]) -> Vec<Q> {
    let d = m.len() - 1;
    while a.len() > d {
        let lead = a.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = a.len() - d;
        for (i, mi) in m[..d].iter().enumerate() {
            a[shift + i] -= &lead * mi;
        }
    }
    trim(&mut a);
    a
}

fn pmul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

// Extended Euclid over Q[z]: returns s with s*a = 1 mod m (m irreducible).
fn inv_mod(a: &[Q], m: &[Q]) -> Vec<Q> {
    use super::upoly::UPoly;
    let (g, s, _) = UPoly::new(a.to_vec()).ext_gcd(&UPoly::new(m.to_vec()));
    assert!(g.degree() == Some(0), "element not invertible: minimal polynomial is reducible");
    let inv = g.coeffs()[0].recip();
    reduce(s.coeffs().iter().map(|x| x * &inv).collect(), m)
}

impl Fe {
    pub fn zero() -> Fe {
        Fe { c: Vec::new(), m: None }
    }
    pub fn one() -> Fe {
        Fe { c: vec![Q::one()], m: None }
    }
    pub fn from_q(x: Q) -> Fe {
        let mut c = vec![x];
        trim(&mut c);
        Fe { c, m: None }
    }
    pub fn int(n: i64) -> Fe {
        Fe::from_q(q(n))
    }
    pub fn frac(n: i64, d: i64) -> Fe {
        Fe::from_q(qf(n, d))
    }
    pub fn from_coeffs(c: Vec<Q>, m: Option<Arc<MinPoly>>) -> Fe {
        let c = match &m {
            Some(mp) => reduce(c, &mp.coeffs),
            None => {
                let mut c = c;
                trim(&mut c);
                assert!(c.len() <= 1, "extension coefficients without a minimal polynomial");
                c
            }
        };
        Fe { c, m }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }
    pub fn is_rational(&self) -> bool {
        self.c.len() <= 1
    }
    /// The rational value, if the element lies in Q.
    pub fn as_q(&self) -> Option<Q> {
        match self.c.len() {
            0 => Some(Q::zero()),
            1 => Some(self.c[0].clone()),
            _ => None,
        }
    }
    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }
    pub fn modulus(&self) -> Option<&Arc<MinPoly>> {
        self.m.as_ref()
    }

    pub fn inv(&self) -> Fe {
        assert!(!self.is_zero(), "division by zero");
        if self.c.len() == 1 {
            return Fe { c: vec![self.c[0].recip()], m: self.m.clone() };
        }
        let m = self.m.as_ref().expect("extension element without modulus");
        Fe { c: inv_mod(&self.c, &m.coeffs), m: self.m.clone() }
    }

    pub fn pow(&self, mut e: u32) -> Fe {
        let mut base = self.clone();
        let mut acc = Fe::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Field-element rendering used in JSON: a rational string, or a
    /// coefficient vector in the extension generator.
    pub fn to_json(&self) -> serde_json::Value {
        if self.is_rational() {
            serde_json::Value::String(fmt_q(&self.as_q().unwrap()))
        } else {
            serde_json::Value::Array(self.c.iter().map(|x| serde_json::Value::String(fmt_q(x))).collect())
        }
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", fmt_q(&self.as_q().unwrap()));
        }
        let var = self.m.as_ref().map_or("z", |m| m.var.as_str());
        let mut first = true;
        write!(f, "(")?;
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let sign = if x.is_negative() { "-" } else { "+" };
            if first {
                if x.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = x.abs();
            match i {
                0 => write!(f, "{}", fmt_q(&a))?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{}*", fmt_q(&a))?;
                    }
                    if i == 1 {
                        write!(f, "{var}")?
                    } else {
                        write!(f, "{var}^{i}")?
                    }
                }
            }
        }
        write!(f, ")")
    }
}

impl Add for &Fe {
    type Output = Fe;
    fn add(self, o: &Fe) -> Fe {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let x = match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            c.push(x);
        }
        trim(&mut c);
        Fe { c, m: pick(&self.m, &o.m) }
    }
}

impl Sub for &Fe {
    type Output = Fe;
    fn sub(self, o: &Fe) -> Fe {
        self + &(-o)
    }
}

impl Neg for &Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        Fe { c: self.c.iter().map(|x| -x).collect(), m: self.m.clone() }
    }
}

impl Mul for &Fe {
    type Output = Fe;
    fn mul(self, o: &Fe) -> Fe {
        if self.is_zero() || o.is_zero() {
            return Fe::zero();
        }
        let m = pick(&self.m, &o.m);
        if self.c.len() == 1 || o.c.len() == 1 {
            let (s, v) = if self.c.len() == 1 { (&self.c[0], &o.c) } else { (&o.c[0], &self.c) };
            return Fe { c: v.iter().map(|x| x * s).collect(), m };
        }
        let prod = pmul(&self.c, &o.c);
        let c = reduce(prod, &m.as_ref().unwrap().coeffs);
        Fe { c, m }
    }
}

impl Div for &Fe {
    type Output = Fe;
    fn div(self, o: &Fe) -> Fe {
        self * &o.inv()
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Fe {
            type Output = Fe;
            fn $f(self, o: Fe) -> Fe { (&self).$f(&o) }
        }
        impl $tr<&Fe> for Fe {
            type Output = Fe;
            fn $f(self, o: &Fe) -> Fe { (&self).$f(o) }
        }
        impl $tr<Fe> for &Fe {
            type Output = Fe;
            fn $f(self, o: Fe) -> Fe { self.$f(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        -&self
    }
}

impl std::iter::Sum for Fe {
    fn sum<I: Iterator<Item = Fe>>(iter: I) -> Fe {
        iter.fold(Fe::zero(), |a, b| a + b)
    }
}
