//! Exact sparse Gaussian elimination.

use std::collections::BTreeMap;

use super::field::Fe;

pub type SparseVec = BTreeMap<usize, Fe>;

pub fn sparse(entries: impl IntoIterator<Item = (usize, Fe)>) -> SparseVec {
    let mut v = SparseVec::new();
    for (k, c) in entries {
        axpy(&mut v, &c, &SparseVec::from([(k, Fe::one())]));
    }
    v
}

/// v += s * w
pub fn axpy(v: &mut SparseVec, s: &Fe, w: &SparseVec) {
    if s.is_zero() {
        return;
    }
    for (k, c) in w {
        let add = s * c;
        match v.get_mut(k) {
            Some(cur) => {
                let n = &*cur + &add;
                if n.is_zero() {
                    v.remove(k);
                } else {
                    *cur = n;
                }
            }
            None => {
                if !add.is_zero() {
                    v.insert(*k, add);
                }
            }
        }
    }
}

/// Reduced row echelon form, built incrementally. Pivots are the smallest
/// column index of each row, so callers choose the column order that makes
/// pivots meaningful.
#[derive(Clone, Debug, Default)]
pub struct Rref {
    rows: BTreeMap<usize, SparseVec>,
}

impl Rref {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseVec)> {
        self.rows.iter().map(|(k, v)| (*k, v))
    }

    /// Reduce v against the current pivots.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let hits: Vec<(usize, Fe)> = v.iter().filter(|(k, _)| self.rows.contains_key(k)).map(|(k, c)| (*k, c.clone())).collect();
        for (k, c) in hits {
            axpy(&mut v, &-c, &self.rows[&k]);
        }
        v
    }

    /// Insert a row; returns true if it increased the rank.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some((&p, pc)) = r.iter().next() else {
            return false;
        };
        let inv = pc.inv();
        let r: SparseVec = r.iter().map(|(k, c)| (*k, c * &inv)).collect();
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&p).cloned() {
                axpy(row, &-c, &r);
            }
        }
        self.rows.insert(p, r);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Basis of {v : A v = 0} for the given rows over `ncols` unknowns.
pub fn nullspace(rows: &[SparseVec], ncols: usize) -> Vec<SparseVec> {
    let mut e = Rref::new();
    for r in rows {
        e.insert(r);
    }
    let mut out = Vec::new();
    for f in 0..ncols {
        if e.rows.contains_key(&f) {
            continue;
        }
        let mut v = SparseVec::new();
        v.insert(f, Fe::one());
        for (p, row) in &e.rows {
            if let Some(c) = row.get(&f) {
                v.insert(*p, -c);
            }
        }
        out.push(v);
    }
    out
}

/// A particular solution of A v = b (free unknowns set to zero), if any.
pub fn solve(rows: &[SparseVec], rhs: &[Fe], ncols: usize) -> Option<SparseVec> {
    // augment with column `ncols` holding -b; pivots never land there unless inconsistent
    let mut e = Rref::new();
    for (r, b) in rows.iter().zip(rhs) {
        let mut a = r.clone();
        if !b.is_zero() {
            a.insert(ncols, -b);
        }
        e.insert(&a);
    }
    if e.rows.contains_key(&ncols) {
        return None;
    }
    let mut sol = SparseVec::new();
    for (p, row) in &e.rows {
        if let Some(c) = row.get(&ncols) {
            sol.insert(*p, -c);
        }
    }
    Some(sol)
}
