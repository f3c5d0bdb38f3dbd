use std::fmt;

use crate::scalar::Scalar;

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseVec<S> {
    entries: Vec<(usize, S)>,
}

impl<S> Default for SparseVec<S> {
    fn default() -> Self {
        SparseVec { entries: Vec::new() }
    }
}

impl<S: Scalar> SparseVec<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(index: usize, field: &S::Field) -> Self {
        SparseVec { entries: vec![(index, S::one(field))] }
    }

    /// Builds a vector from arbitrary `(index, value)` pairs, summing repeats
    /// and dropping zeros.
    pub fn from_pairs<I: IntoIterator<Item = (usize, S)>>(pairs: I) -> Self {
        let mut entries: Vec<(usize, S)> = pairs.into_iter().collect();
        entries.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, S)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match out.last_mut() {
                Some((j, w)) if *j == i => *w = w.add_ref(&v),
                _ => out.push((i, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseVec { entries: out }
    }

    /// Builds from a dense slice.
    pub fn from_dense(values: &[S]) -> Self {
        SparseVec { entries: values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect() }
    }

    pub fn to_dense(&self, len: usize, field: &S::Field) -> Vec<S> {
        let mut out = vec![S::zero(field); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(i, _)| *i)
    }

    pub fn get(&self, index: usize) -> Option<&S> {
        self.entries.binary_search_by_key(&index, |(i, _)| *i).ok().map(|k| &self.entries[k].1)
    }

    pub fn leading(&self) -> Option<(usize, &S)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    /// One past the largest stored index.
    pub fn support_bound(&self) -> usize {
        self.entries.last().map_or(0, |(i, _)| i + 1)
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SparseVec { entries: self.entries.iter().map(|(i, v)| (*i, v.mul_ref(c))).collect() }
    }

    pub fn neg(&self) -> Self {
        SparseVec { entries: self.entries.iter().map(|(i, v)| (*i, v.neg_ref())).collect() }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &S, other: &Self) -> Self {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, c.mul_ref(y)));
                        b.next();
                    } else {
                        let s = x.add_ref(&c.mul_ref(y));
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, c.mul_ref(y)));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        match other.entries.first() {
            None => self.clone(),
            Some((_, v)) => self.add_scaled(&S::one(&v.field()), other),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        match other.entries.first() {
            None => self.clone(),
            Some((_, v)) => self.add_scaled(&S::one(&v.field()).neg_ref(), other),
        }
    }

    pub fn dot(&self, other: &Self) -> Option<S> {
        let mut acc: Option<S> = None;
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        while let (Some((i, x)), Some((j, y))) = (a.peek(), b.peek()) {
            if i < j {
                a.next();
            } else if j < i {
                b.next();
            } else {
                let p = x.mul_ref(y);
                acc = Some(match acc {
                    None => p,
                    Some(s) => s.add_ref(&p),
                });
                a.next();
                b.next();
            }
        }
        acc
    }

    /// Re-indexes through `map`; indices mapping to `None` are dropped.
    pub fn reindex(&self, map: impl Fn(usize) -> Option<usize>) -> Self {
        Self::from_pairs(self.entries.iter().filter_map(|(i, v)| map(*i).map(|j| (j, v.clone()))))
    }

    /// Keeps the entries in `[start, end)`, shifted down by `start`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        SparseVec {
            entries: self.entries.iter().filter(|(i, _)| *i >= start && *i < end).map(|(i, v)| (i - start, v.clone())).collect(),
        }
    }

    /// Shifts every index up by `offset`.
    pub fn shift(&self, offset: usize) -> Self {
        SparseVec { entries: self.entries.iter().map(|(i, v)| (i + offset, v.clone())).collect() }
    }

    /// Field of the stored entries, if any.
    pub fn field(&self) -> Option<S::Field> {
        self.entries.first().map(|(_, v)| v.field())
    }
}

impl<S: fmt::Display> fmt::Debug for SparseVec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (i, v)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}: {v}")?;
        }
        f.write_str("}")
    }
}
