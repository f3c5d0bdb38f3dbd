use crate::error::{Error, Result};
use crate::linalg::echelon::{RankEchelon, Subspace};
use crate::linalg::vector::SparseVec;
use crate::scalar::Scalar;

/// Exact sparse matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix<S: Scalar> {
    rows: usize,
    cols: usize,
    field: S::Field,
    data: Vec<SparseVec<S>>,
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref<S: Scalar> {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub reduced: SparseMatrix<S>,
}

impl<S: Scalar> SparseMatrix<S> {
    pub fn zero(rows: usize, cols: usize, field: &S::Field) -> Self {
        SparseMatrix { rows, cols, field: field.clone(), data: vec![SparseVec::zero(); rows] }
    }

    pub fn identity(n: usize, field: &S::Field) -> Self {
        SparseMatrix { rows: n, cols: n, field: field.clone(), data: (0..n).map(|i| SparseVec::unit(i, field)).collect() }
    }

    /// Builds a matrix from row vectors, checking widths and fields.
    pub fn from_rows(cols: usize, field: &S::Field, rows: Vec<SparseVec<S>>) -> Result<Self> {
        for row in &rows {
            if row.support_bound() > cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.support_bound() });
            }
            for (_, v) in row.iter() {
                let f = v.field();
                if &f != field {
                    return Err(Error::FieldMismatch { expected: field.to_string(), found: f.to_string() });
                }
            }
        }
        Ok(SparseMatrix { rows: rows.len(), cols, field: field.clone(), data: rows })
    }

    /// Builds a matrix from `(row, col, value)` triples; repeated positions add.
    pub fn from_entries<I>(rows: usize, cols: usize, field: &S::Field, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, S)>,
    {
        let mut buckets: Vec<Vec<(usize, S)>> = vec![Vec::new(); rows];
        for (r, c, v) in entries {
            if r >= rows {
                return Err(Error::DimensionMismatch { expected: rows, found: r + 1 });
            }
            if c >= cols {
                return Err(Error::DimensionMismatch { expected: cols, found: c + 1 });
            }
            buckets[r].push((c, v));
        }
        Self::from_rows(cols, field, buckets.into_iter().map(SparseVec::from_pairs).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, field: &S::Field, columns: &[SparseVec<S>]) -> Result<Self> {
        let entries = columns.iter().enumerate().flat_map(|(c, v)| v.iter().map(move |(r, x)| (r, c, x.clone())));
        Self::from_entries(rows, columns.len(), field, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &S::Field {
        &self.field
    }

    pub fn row(&self, i: usize) -> &SparseVec<S> {
        &self.data[i]
    }

    pub fn row_vectors(&self) -> &[SparseVec<S>] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&S> {
        self.data[r].get(c)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(SparseVec::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(SparseVec::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut buckets: Vec<Vec<(usize, S)>> = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row.iter() {
                buckets[c].push((r, v.clone()));
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            field: self.field.clone(),
            data: buckets.into_iter().map(SparseVec::from_pairs).collect(),
        }
    }

    /// Matrix-vector product `self · v`.
    pub fn mul_vec(&self, v: &SparseVec<S>) -> SparseVec<S> {
        SparseVec::from_pairs(self.data.iter().enumerate().filter_map(|(r, row)| row.dot(v).map(|x| (r, x))))
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch { expected: self.field.to_string(), found: other.field.to_string() });
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = SparseVec::zero();
                for (k, a) in row.iter() {
                    acc = acc.add_scaled(a, &other.data[k]);
                }
                acc
            })
            .collect();
        Ok(SparseMatrix { rows: self.rows, cols: other.cols, field: self.field.clone(), data })
    }

    pub fn rank(&self) -> usize {
        let mut ech = RankEchelon::new();
        for row in &self.data {
            ech.insert(row.clone());
        }
        ech.rank()
    }

    /// Reduced row echelon form. The nonzero rows come first, ordered by
    /// pivot column; the pivot entries are 1.
    pub fn rref(&self) -> Rref<S> {
        let ech = Subspace::spanned_by(self.cols, &self.field, self.data.iter().cloned());
        let pivots = ech.pivots().to_vec();
        let rank = pivots.len();
        let mut data: Vec<SparseVec<S>> = ech.into_rows();
        data.resize(self.rows, SparseVec::zero());
        Rref { rank, pivots, reduced: SparseMatrix { rows: self.rows, cols: self.cols, field: self.field.clone(), data } }
    }

    /// Basis of the right null space `{v : self · v = 0}`, one vector per
    /// non-pivot column.
    pub fn kernel_basis(&self) -> Vec<SparseVec<S>> {
        let rref = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &rref.pivots {
            is_pivot[p] = true;
        }
        let one = S::one(&self.field);
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut pairs = vec![(free, one.clone())];
                for (r, &p) in rref.pivots.iter().enumerate() {
                    if let Some(v) = rref.reduced.data[r].get(free) {
                        pairs.push((p, v.neg_ref()));
                    }
                }
                SparseVec::from_pairs(pairs)
            })
            .collect()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self::from_rows(self.cols, &self.field, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{PrimeField, RationalField};
    use crate::{Fp, Rational};

    fn qm(rows: &[&[i64]]) -> SparseMatrix<Rational> {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| SparseVec::from_dense(&r.iter().map(|&x| Rational::from_i64(&RationalField, x)).collect::<Vec<_>>()))
            .collect();
        SparseMatrix::from_rows(cols, &RationalField, data).unwrap()
    }

    #[test]
    fn rref_of_identity_and_zero() {
        let id = SparseMatrix::<Rational>::identity(2, &RationalField);
        let r = id.rref();
        assert_eq!((r.rank, r.pivots.clone()), (2, vec![0, 1]));
        let z = SparseMatrix::<Rational>::zero(3, 4, &RationalField);
        let r = z.rref();
        assert_eq!((r.rank, r.pivots.len()), (0, 0));
        assert_eq!(r.reduced, z);
    }

    #[test]
    fn proportional_rows_have_rank_one() {
        let m = qm(&[&[1, 2], &[2, 4]]);
        let r = m.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(
            m.kernel_basis(),
            vec![SparseVec::from_dense(&[Rational::from_i64(&RationalField, -2), Rational::from_i64(&RationalField, 1)])]
        );
    }

    #[test]
    fn kernel_of_difference_row() {
        let m = qm(&[&[1, -1]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        let one = Rational::from_i64(&RationalField, 1);
        assert_eq!(k[0], SparseVec::from_dense(&[one.clone(), one]));
        assert!(qm(&[&[1, 0], &[0, 1]]).kernel_basis().is_empty());
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let f5 = PrimeField::new(5).unwrap();
        let f7 = PrimeField::new(7).unwrap();
        let row = SparseVec::from_pairs(vec![(0, f5.element(1)), (1, f7.element(1))]);
        let err = SparseMatrix::<Fp>::from_rows(2, &f5, vec![row]).unwrap_err();
        assert!(matches!(err, Error::FieldMismatch { .. }));
        let a = SparseMatrix::<Fp>::identity(2, &f5);
        let b = SparseMatrix::<Fp>::identity(2, &f7);
        assert!(matches!(a.mul(&b), Err(Error::FieldMismatch { .. })));
    }

    #[test]
    fn product_and_transpose() {
        let a = qm(&[&[1, 2, 0], &[0, 1, 3]]);
        let b = a.transpose();
        let p = a.mul(&b).unwrap();
        assert_eq!(p, qm(&[&[5, 2], &[2, 10]]));
    }
}
