use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::matrix::SparseMatrix;
use crate::linalg::vector::SparseVec;
use crate::scalar::Scalar;

/// A subspace of `K^n` held by its reduced row echelon basis.
///
/// The basis is canonical: two subspaces are equal exactly when their bases
/// are, so `PartialEq` compares subspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<S: Scalar> {
    ambient: usize,
    field: S::Field,
    pivots: Vec<usize>,
    rows: Vec<SparseVec<S>>,
}

/// Incremental echelon form used only for rank: rows keep distinct leading
/// columns but are not back-reduced.
pub struct RankEchelon<S: Scalar> {
    rows: HashMap<usize, SparseVec<S>>,
}

impl<S: Scalar> Default for RankEchelon<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> RankEchelon<S> {
    pub fn new() -> Self {
        RankEchelon { rows: HashMap::new() }
    }

    pub fn insert(&mut self, mut v: SparseVec<S>) -> bool {
        loop {
            let Some((lead, c)) = v.leading() else {
                return false;
            };
            match self.rows.get(&lead) {
                Some(row) => {
                    let c = c.neg_ref();
                    v = v.add_scaled(&c, row);
                }
                None => {
                    let inv = c.inv().expect("nonzero leading entry");
                    self.rows.insert(lead, v.scale(&inv));
                    return true;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

impl<S: Scalar> Subspace<S> {
    pub fn new(ambient: usize, field: &S::Field) -> Self {
        Subspace { ambient, field: field.clone(), pivots: Vec::new(), rows: Vec::new() }
    }

    pub fn full(ambient: usize, field: &S::Field) -> Self {
        Subspace {
            ambient,
            field: field.clone(),
            pivots: (0..ambient).collect(),
            rows: (0..ambient).map(|i| SparseVec::unit(i, field)).collect(),
        }
    }

    pub fn spanned_by<I>(ambient: usize, field: &S::Field, vectors: I) -> Self
    where
        I: IntoIterator<Item = SparseVec<S>>,
    {
        let mut s = Self::new(ambient, field);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn field(&self) -> &S::Field {
        &self.field
    }

    pub fn basis(&self) -> &[SparseVec<S>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub(crate) fn into_rows(self) -> Vec<SparseVec<S>> {
        self.rows
    }

    fn pivot_row(&self, col: usize) -> Option<usize> {
        self.pivots.binary_search(&col).ok()
    }

    /// Remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &SparseVec<S>) -> SparseVec<S> {
        // Rows are zero at each other's pivots, so the coefficients can be
        // read off `v` up front.
        let mut out = v.clone();
        for (col, c) in v.iter() {
            if let Some(k) = self.pivot_row(col) {
                out = out.add_scaled(&c.neg_ref(), &self.rows[k]);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec<S>) -> bool {
        self.reduce(v).is_zero()
    }

    /// Coordinates of `v` with respect to [`Subspace::basis`], if it is a member.
    pub fn coordinates(&self, v: &SparseVec<S>) -> Option<SparseVec<S>> {
        if !self.contains(v) {
            return None;
        }
        Some(SparseVec::from_pairs(v.iter().filter_map(|(col, c)| self.pivot_row(col).map(|k| (k, c.clone())))))
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: SparseVec<S>) -> bool {
        debug_assert!(v.support_bound() <= self.ambient, "vector longer than ambient space");
        let r = self.reduce(&v);
        let Some((p, lead)) = r.leading() else {
            return false;
        };
        let r = r.scale(&lead.inv().expect("nonzero leading entry"));
        for row in &mut self.rows {
            if let Some(c) = row.get(p) {
                let c = c.neg_ref();
                *row = row.add_scaled(&c, &r);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }

    pub fn extend<I: IntoIterator<Item = SparseVec<S>>>(&mut self, vectors: I) -> usize {
        vectors.into_iter().filter(|v| self.insert(v.clone())).count()
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.rows.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.extend(other.rows.iter().cloned());
        s
    }

    /// Intersection by the Zassenhaus trick: reduce the rows `(u, u)` and
    /// `(w, 0)`; rows with vanishing left half carry the intersection.
    pub fn intersect(&self, other: &Self) -> Self {
        let n = self.ambient;
        let mut z = Subspace::new(2 * n, &self.field);
        for u in &self.rows {
            z.insert(u.add(&u.shift(n)));
        }
        for w in &other.rows {
            z.insert(w.clone());
        }
        let rows = z.rows.iter().zip(&z.pivots).filter(|(_, &p)| p >= n).map(|(r, _)| r.slice(n, 2 * n));
        Subspace::spanned_by(n, &self.field, rows)
    }

    /// Indices of standard basis vectors completing this subspace to the
    /// whole space (the non-pivot columns).
    pub fn complement_indices(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&i| !is_pivot[i]).collect()
    }

    /// Image under a linear map given by the images of basis vectors.
    pub fn map(&self, target_dim: usize, images: &[SparseVec<S>]) -> Self {
        Subspace::spanned_by(target_dim, &self.field, self.rows.iter().map(|v| apply(images, v)))
    }
}

/// Applies the linear map sending basis vector `i` to `images[i]`.
pub fn apply<S: Scalar>(images: &[SparseVec<S>], v: &SparseVec<S>) -> SparseVec<S> {
    let mut out = SparseVec::zero();
    for (i, c) in v.iter() {
        out = out.add_scaled(c, &images[i]);
    }
    out
}

fn check_len<S: Scalar>(dim: usize, v: &SparseVec<S>) -> Result<()> {
    if v.support_bound() > dim {
        Err(Error::DimensionMismatch { expected: dim, found: v.support_bound() })
    } else {
        Ok(())
    }
}

/// Expresses `v` as a combination of `span` (vectors of length `dim`).
///
/// Returns `Ok(None)` when `v` is not in the span. Free coefficients are set
/// to zero, so the answer is deterministic.
pub fn membership<S: Scalar>(
    dim: usize,
    field: &S::Field,
    span: &[SparseVec<S>],
    v: &SparseVec<S>,
) -> Result<Option<SparseVec<S>>> {
    check_len(dim, v)?;
    for s in span {
        check_len(dim, s)?;
    }
    let n = span.len();
    let mut columns = span.to_vec();
    columns.push(v.clone());
    let rref = SparseMatrix::from_columns(dim, field, &columns)?.rref();
    if rref.pivots.last() == Some(&n) {
        return Ok(None);
    }
    let coords = rref.pivots.iter().enumerate().filter_map(|(r, &p)| rref.reduced.row(r).get(n).map(|c| (p, c.clone())));
    Ok(Some(SparseVec::from_pairs(coords)))
}

/// Indices of standard basis vectors that project to a basis of
/// `K^ambient / span(sub)`.
pub fn quotient_basis<S: Scalar>(sub: &[SparseVec<S>], ambient: usize, field: &S::Field) -> Result<Vec<usize>> {
    for s in sub {
        check_len(ambient, s)?;
    }
    Ok(Subspace::spanned_by(ambient, field, sub.iter().cloned()).complement_indices())
}

/// A quotient `total / sub` of subspaces with explicit coordinates.
#[derive(Clone, Debug)]
pub struct QuotientSpace<S: Scalar> {
    sub: Subspace<S>,
    complement: Subspace<S>,
}

impl<S: Scalar> QuotientSpace<S> {
    /// `sub` need not lie inside `total`; the quotient is `(total + sub) / sub`.
    pub fn new(total: &Subspace<S>, sub: &Subspace<S>) -> Self {
        let complement = Subspace::spanned_by(total.ambient_dim(), total.field(), total.basis().iter().map(|v| sub.reduce(v)));
        QuotientSpace { sub: sub.clone(), complement }
    }

    pub fn dim(&self) -> usize {
        self.complement.dim()
    }

    pub fn sub(&self) -> &Subspace<S> {
        &self.sub
    }

    /// Representatives of the quotient basis.
    pub fn representatives(&self) -> &[SparseVec<S>] {
        self.complement.basis()
    }

    /// Coordinates of the class of `v`; `None` if `v` is outside `total + sub`.
    pub fn coordinates(&self, v: &SparseVec<S>) -> Option<SparseVec<S>> {
        self.complement.coordinates(&self.sub.reduce(v))
    }

    pub fn lift(&self, coords: &SparseVec<S>) -> SparseVec<S> {
        apply(self.complement.basis(), coords)
    }
}
