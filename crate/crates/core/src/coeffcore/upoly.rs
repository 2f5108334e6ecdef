//! Dense univariate polynomials over the working field (gcd of binary forms,
//! extension inverses).

use super::field::{Fe, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    c: Vec<Fe>,
}

impl UPoly {
    pub fn new(c: Vec<Q>) -> UPoly {
        UPoly::from_fe(c.into_iter().map(Fe::from_q).collect())
    }

    pub fn from_fe(mut c: Vec<Fe>) -> UPoly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> UPoly {
        UPoly { c: Vec::new() }
    }

    pub fn one() -> UPoly {
        UPoly { c: vec![Fe::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeff_fe(&self) -> &[Fe] {
        &self.c
    }

    /// Rational coefficients (panics on extension coefficients).
    pub fn coeffs(&self) -> Vec<Q> {
        self.c.iter().map(|x| x.as_q().expect("rational coefficient")).collect()
    }

    pub fn lead(&self) -> Option<&Fe> {
        self.c.last()
    }

    /// Order of vanishing at 0.
    pub fn order(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn monic(&self) -> UPoly {
        match self.lead() {
            None => self.clone(),
            Some(l) => {
                let li = l.inv();
                UPoly { c: self.c.iter().map(|x| x * &li).collect() }
            }
        }
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                _ => unreachable!(),
            })
            .collect();
        UPoly::from_fe(c)
    }

    pub fn neg(&self) -> UPoly {
        UPoly { c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![Fe::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        UPoly::from_fe(c)
    }

    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.c.len() - 1;
        let li = d.lead().unwrap().inv();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quo = vec![Fe::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let coef = &r[k] * &li;
            if coef.is_zero() {
                continue;
            }
            for (i, di) in d.c.iter().enumerate() {
                let idx = k - dd + i;
                r[idx] = &r[idx] - &(&coef * di);
            }
            quo[k - dd] = coef;
        }
        r.truncate(dd);
        (UPoly::from_fe(quo), UPoly::from_fe(r))
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// (g, s, t) with s*self + t*o = g (g not normalized).
    pub fn ext_gcd(&self, o: &UPoly) -> (UPoly, UPoly, UPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (UPoly::one(), UPoly::zero());
        let (mut t0, mut t1) = (UPoly::zero(), UPoly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1);
            let s = s0.sub(&qq.mul(&s1));
            let t = t0.sub(&qq.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        (r0, s0, t0)
    }

    pub fn eval(&self, x: &Fe) -> Fe {
        let mut acc = Fe::zero();
        for c in self.c.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Rational roots (with multiplicity) of a polynomial with rational coefficients.
    pub fn rational_roots(&self) -> Vec<(Q, usize)> {
        use num_integer::Integer;
        use num_traits::{One, Signed, Zero};
        if self.is_zero() || self.c.iter().any(|x| !x.is_rational()) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut p = self.clone();
        let z = p.order().unwrap_or(0);
        if z > 0 {
            out.push((Q::zero(), z));
            p = UPoly { c: p.c[z..].to_vec() };
        }
        // clear denominators
        let qs = p.coeffs();
        let mut l = num_bigint::BigInt::one();
        for x in &qs {
            l = l.lcm(x.denom());
        }
        let ints: Vec<num_bigint::BigInt> = qs.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        if a0.is_zero() {
            return out;
        }
        let divisors = |n: &num_bigint::BigInt| -> Vec<num_bigint::BigInt> {
            let mut v = Vec::new();
            let mut d = num_bigint::BigInt::one();
            while &d * &d <= *n {
                if (n % &d).is_zero() {
                    v.push(d.clone());
                    v.push(n / &d);
                }
                d += 1;
            }
            v
        };
        let mut cands: Vec<Q> = Vec::new();
        for pn in divisors(&a0) {
            for qd in divisors(&an) {
                for s in [1, -1] {
                    let c = Q::new(pn.clone() * s, qd.clone());
                    if !cands.contains(&c) {
                        cands.push(c);
                    }
                }
            }
        }
        cands.sort();
        for c in cands {
            let lin = UPoly::from_fe(vec![Fe::from_q(-c.clone()), Fe::one()]);
            let mut m = 0;
            loop {
                let (qq, r) = p.divrem(&lin);
                if !r.is_zero() {
                    break;
                }
                p = qq;
                m += 1;
            }
            if m > 0 {
                out.push((c, m));
            }
        }
        out
    }
}
