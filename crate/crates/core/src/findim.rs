//! Finite-dimensional Lie algebras given by structure constants.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::free_lie::{render_named, BracketAlgebra, FreeLieAlgebra};
use crate::linalg::{apply, SparseMatrix, SparseVec, Subspace};
use crate::scalar::Scalar;

/// Multidegree of a basis element. The total degree is the sum of entries.
pub type Weight = Vec<u32>;

/// A Lie algebra with a fixed ordered basis and a complete bracket table.
///
/// When a grading is present it is a multigrading: each basis element has a
/// weight vector and brackets add weights. Free nilpotent algebras are
/// graded by letter content, which lets homology split into small blocks.
#[derive(Clone, PartialEq, Eq)]
pub struct FinDimLie<S: Scalar> {
    names: Vec<String>,
    field: S::Field,
    /// `table[i * dim + j] = [b_i, b_j]`.
    table: Vec<SparseVec<S>>,
    weights: Option<Vec<Weight>>,
}

/// Result of [`FinDimLie::quotient_algebra`].
#[derive(Clone, Debug)]
pub struct Quotient<S: Scalar> {
    pub algebra: FinDimLie<S>,
    /// Image of each basis vector of the source.
    pub projection: Vec<SparseVec<S>>,
    /// Source basis indices that survive as the quotient basis.
    pub complement: Vec<usize>,
}

impl<S: Scalar> FinDimLie<S> {
    /// Builds an algebra from a full table, `table[i][j] = [b_i, b_j]`, and
    /// validates antisymmetry and the Jacobi identity.
    pub fn from_structure_constants(names: Vec<String>, field: &S::Field, table: Vec<Vec<SparseVec<S>>>) -> Result<Self> {
        let n = names.len();
        check_names(&names)?;
        if table.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: table.len() });
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in table {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for v in row {
                if v.support_bound() > n {
                    return Err(Error::DimensionMismatch { expected: n, found: v.support_bound() });
                }
                if let Some(f) = v.field() {
                    if f != *field {
                        return Err(Error::FieldMismatch { expected: field.to_string(), found: f.to_string() });
                    }
                }
                flat.push(v);
            }
        }
        let l = FinDimLie { names, field: field.clone(), table: flat, weights: None };
        l.check_antisymmetry()?;
        l.check_jacobi()?;
        Ok(l)
    }

    /// Builds an algebra from the nonzero brackets `[b_i, b_j] = v`; the
    /// entries for `[b_j, b_i]` are filled in by antisymmetry. Giving both
    /// orders is allowed only if they agree.
    pub fn from_brackets<I>(names: Vec<String>, field: &S::Field, brackets: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), SparseVec<S>)>,
    {
        let n = names.len();
        let mut given: BTreeMap<(usize, usize), SparseVec<S>> = BTreeMap::new();
        for ((i, j), v) in brackets {
            if i >= n || j >= n {
                return Err(Error::OutOfRange { what: "basis index", value: i.max(j), max: n.saturating_sub(1) });
            }
            if given.insert((i, j), v).is_some() {
                return Err(Error::DuplicateName(format!("[{},{}]", names[i], names[j])));
            }
        }
        let mut table = vec![vec![SparseVec::zero(); n]; n];
        for (&(i, j), v) in &given {
            let bad = || Error::AntisymmetryViolation(names[i].clone(), names[j].clone());
            if i == j && !v.is_zero() {
                return Err(bad());
            }
            if let Some(w) = given.get(&(j, i)) {
                if *w != v.neg() {
                    return Err(bad());
                }
            }
            table[i][j] = v.clone();
            table[j][i] = v.neg();
        }
        Self::from_structure_constants(names, field, table)
    }

    pub fn abelian(n: usize, field: &S::Field) -> Self {
        let names = if n <= 3 {
            ["x", "y", "z"].iter().take(n).map(|s| s.to_string()).collect()
        } else {
            (1..=n).map(|i| format!("e{i}")).collect()
        };
        FinDimLie {
            names,
            field: field.clone(),
            table: vec![SparseVec::zero(); n * n],
            weights: Some((0..n).map(|i| unit_weight(i, n)).collect()),
        }
    }

    /// Heisenberg algebra `x, y, z` with `[x,y] = z`, graded by letter content.
    pub fn heisenberg(field: &S::Field) -> Self {
        let names = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        let l = Self::from_brackets(names, field, [((0, 1), SparseVec::unit(2, field))]).expect("valid table");
        l.with_weights(vec![vec![1, 0], vec![0, 1], vec![1, 1]]).expect("homogeneous")
    }

    /// `F / γ_{c+1}(F)` for `F` free of the given rank, in the Lyndon basis
    /// of degree at most `class`.
    pub fn free_nilpotent(rank: usize, class: usize, field: &S::Field) -> Result<Self> {
        Ok(Self::free_nilpotent_with_free(rank, class, field)?.0)
    }

    /// Like [`free_nilpotent`](Self::free_nilpotent), also returning the
    /// truncated free algebra whose flattened coordinates match this basis.
    pub fn free_nilpotent_with_free(rank: usize, class: usize, field: &S::Field) -> Result<(Self, FreeLieAlgebra<S>)> {
        if rank == 0 {
            return Err(Error::OutOfRange { what: "rank", value: 0, max: usize::MAX });
        }
        let free = FreeLieAlgebra::with_rank(rank, class, field)?;
        Ok((Self::from_free(&free), free))
    }

    /// The algebra `F / γ_{D+1}(F)` for a truncated free Lie algebra of
    /// truncation degree `D`.
    pub fn from_free(free: &FreeLieAlgebra<S>) -> Self {
        let n = free.total_dim();
        let rank = free.rank();
        let words: Vec<_> = (0..n).map(|i| free.word_at(i).clone()).collect();
        let names =
            words.iter().map(|w| free.basis_element(w).expect("Lyndon").bracket_trees()[0].0.render(free.alphabet())).collect();
        let elems: Vec<_> = words.iter().map(|w| free.basis_element(w).expect("Lyndon")).collect();
        let table: Vec<SparseVec<S>> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                free.to_vector(&free.bracket(&elems[i], &elems[j]).expect("same algebra"))
            })
            .collect();
        let weights = words
            .iter()
            .map(|w| {
                let mut wt = vec![0u32; rank];
                for &l in w {
                    wt[l as usize] += 1;
                }
                wt
            })
            .collect();
        FinDimLie { names, field: free.field().clone(), table, weights: Some(weights) }
    }

    /// Assembles an algebra without validation; callers guarantee the
    /// table is a Lie bracket.
    pub(crate) fn from_parts(
        names: Vec<String>,
        field: &S::Field,
        table: Vec<SparseVec<S>>,
        weights: Option<Vec<Weight>>,
    ) -> Self {
        debug_assert_eq!(table.len(), names.len() * names.len());
        FinDimLie { names, field: field.clone(), table, weights }
    }

    /// Images of all Lyndon basis elements of a truncated free algebra under
    /// the homomorphism sending generator `i` to `generator_images[i]`.
    /// Requires this algebra to be nilpotent of class at most the truncation
    /// degree, so that the homomorphism exists.
    pub fn free_hom(&self, free: &FreeLieAlgebra<S>, generator_images: &[SparseVec<S>]) -> Vec<SparseVec<S>> {
        let n = free.total_dim();
        let mut images: Vec<SparseVec<S>> = Vec::with_capacity(n);
        // Flattened order is degree-major, so both factors come earlier.
        for k in 0..n {
            let w = free.word_at(k);
            let image = if w.len() == 1 {
                generator_images[w[0] as usize].clone()
            } else {
                let (u, v) = crate::free_lie::standard_factorization(w);
                let iu = &images[free.flat_index(u).expect("Lyndon factor")];
                let iv = &images[free.flat_index(v).expect("Lyndon factor")];
                self.bracket(iu, iv)
            };
            images.push(image);
        }
        images
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn field(&self) -> &S::Field {
        &self.field
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn weights(&self) -> Option<&[Weight]> {
        self.weights.as_deref()
    }

    pub fn is_graded(&self) -> bool {
        self.weights.is_some()
    }

    /// Total degree of basis element `i`, if graded.
    pub fn degree(&self, i: usize) -> Option<usize> {
        self.weights.as_ref().map(|w| w[i].iter().map(|&x| x as usize).sum())
    }

    /// Dimensions of the graded pieces, indexed by degree (entry 0 unused).
    pub fn graded_dims(&self) -> Option<Vec<usize>> {
        let mut out = vec![0];
        for i in 0..self.dim() {
            let d = self.degree(i)?;
            if out.len() <= d {
                out.resize(d + 1, 0);
            }
            out[d] += 1;
        }
        Some(out)
    }

    /// Attaches a multigrading after checking that every bracket is homogeneous.
    /// All weights must be nonzero and of equal length.
    pub fn with_weights(mut self, weights: Vec<Weight>) -> Result<Self> {
        if weights.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: weights.len() });
        }
        let len = weights.first().map_or(0, Vec::len);
        if weights.iter().any(|w| w.len() != len || w.iter().all(|&x| x == 0)) {
            return Err(Error::Inhomogeneous("weights must be nonzero and of equal length".into()));
        }
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let target = add_weights(&weights[i], &weights[j]);
                if self.table[i * n + j].indices().any(|k| weights[k] != target) {
                    return Err(Error::Inhomogeneous(format!("[{},{}]", self.names[i], self.names[j])));
                }
            }
        }
        self.weights = Some(weights);
        Ok(self)
    }

    /// Attaches a grading by positive integer degrees.
    pub fn with_degrees(self, degrees: &[usize]) -> Result<Self> {
        self.with_weights(degrees.iter().map(|&d| vec![d as u32]).collect())
    }

    pub fn without_grading(mut self) -> Self {
        self.weights = None;
        self
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> &SparseVec<S> {
        &self.table[i * self.dim() + j]
    }

    pub fn basis_vector(&self, i: usize) -> SparseVec<S> {
        SparseVec::unit(i, &self.field)
    }

    /// `[b_i, v]`.
    pub fn bracket_basis_with(&self, i: usize, v: &SparseVec<S>) -> SparseVec<S> {
        let mut out = SparseVec::zero();
        for (j, c) in v.iter() {
            out = out.add_scaled(c, self.basis_bracket(i, j));
        }
        out
    }

    pub fn bracket(&self, a: &SparseVec<S>, b: &SparseVec<S>) -> SparseVec<S> {
        let mut out = SparseVec::zero();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                let t = self.basis_bracket(i, j);
                if !t.is_zero() {
                    out = out.add_scaled(&x.mul_ref(y), t);
                }
            }
        }
        out
    }

    /// Matrix of `ad v = [v, ·]`, acting on column vectors.
    pub fn ad_matrix(&self, v: &SparseVec<S>) -> SparseMatrix<S> {
        let cols: Vec<_> = (0..self.dim()).map(|j| self.bracket(v, &self.basis_vector(j))).collect();
        SparseMatrix::from_columns(self.dim(), &self.field, &cols).expect("consistent dimensions")
    }

    /// Renders a vector in terms of basis names.
    pub fn render(&self, v: &SparseVec<S>) -> String {
        render_named(v.iter().map(|(i, c)| (self.names[i].clone(), c)))
    }

    fn check_antisymmetry(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                if self.basis_bracket(i, j).neg() != *self.basis_bracket(j, i) || (i == j && !self.basis_bracket(i, i).is_zero())
                {
                    return Err(Error::AntisymmetryViolation(self.names[i].clone(), self.names[j].clone()));
                }
            }
        }
        Ok(())
    }

    /// First basis triple `i < j < k` violating the Jacobi identity.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        (0..n).into_par_iter().find_map_first(|i| {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = self.bracket(self.basis_bracket(i, j), &self.basis_vector(k));
                    let b = self.bracket(self.basis_bracket(j, k), &self.basis_vector(i));
                    let c = self.bracket(self.basis_bracket(k, i), &self.basis_vector(j));
                    if !a.add(&b).add(&c).is_zero() {
                        return Some((i, j, k));
                    }
                }
            }
            None
        })
    }

    pub fn check_jacobi(&self) -> Result<()> {
        match self.jacobi_violation() {
            None => Ok(()),
            Some((i, j, k)) => Err(Error::JacobiViolation(self.names[i].clone(), self.names[j].clone(), self.names[k].clone())),
        }
    }

    pub fn full(&self) -> Subspace<S> {
        Subspace::full(self.dim(), &self.field)
    }

    pub fn zero_subspace(&self) -> Subspace<S> {
        Subspace::new(self.dim(), &self.field)
    }

    pub fn span<I: IntoIterator<Item = SparseVec<S>>>(&self, vectors: I) -> Subspace<S> {
        Subspace::spanned_by(self.dim(), &self.field, vectors)
    }

    /// `[A, B]`, the span of all brackets of basis vectors.
    pub fn bracket_subspaces(&self, a: &Subspace<S>, b: &Subspace<S>) -> Subspace<S> {
        let products: Vec<SparseVec<S>> =
            a.basis().par_iter().flat_map_iter(|u| b.basis().iter().map(move |v| self.bracket(u, v))).collect();
        self.span(products)
    }

    /// `γ₁ = L, γ₂, …`, stopping at the first repeated term. For a nilpotent
    /// algebra the last entry is the zero subspace.
    pub fn lower_central_series(&self) -> Vec<Subspace<S>> {
        let full = self.full();
        let mut series = vec![full.clone()];
        loop {
            let last = series.last().expect("nonempty");
            if last.is_zero() {
                break;
            }
            let next = self.bracket_subspaces(&full, last);
            if next == *last {
                break;
            }
            series.push(next);
        }
        series
    }

    /// `γ_j(L)` for `j ≥ 1`.
    pub fn gamma(&self, j: usize) -> Subspace<S> {
        assert!(j >= 1, "lower central series starts at 1");
        let series = self.lower_central_series();
        series.get(j - 1).cloned().unwrap_or_else(|| series.last().expect("nonempty").clone())
    }

    /// Smallest ideal containing `gens`.
    ///
    /// Each round brackets every basis element with the vectors that
    /// entered in the previous round; the span only grows, so this ends
    /// after at most `dim L` rounds.
    pub fn ideal_closure<I: IntoIterator<Item = SparseVec<S>>>(&self, gens: I) -> Subspace<S> {
        let mut span = self.zero_subspace();
        let mut frontier: Vec<SparseVec<S>> = gens.into_iter().filter(|v| span.insert(v.clone())).collect();
        while !frontier.is_empty() {
            let products: Vec<SparseVec<S>> =
                frontier.par_iter().flat_map_iter(|v| (0..self.dim()).map(move |i| self.bracket_basis_with(i, v))).collect();
            frontier = products.into_iter().filter(|v| span.insert(v.clone())).collect();
        }
        span
    }

    /// Smallest subalgebra containing `gens`.
    pub fn subalgebra_closure<I: IntoIterator<Item = SparseVec<S>>>(&self, gens: I) -> Subspace<S> {
        let mut span = self.zero_subspace();
        let mut added: Vec<SparseVec<S>> = gens.into_iter().filter(|v| span.insert(v.clone())).collect();
        let mut all = added.clone();
        while !added.is_empty() {
            let products: Vec<SparseVec<S>> =
                added.par_iter().flat_map_iter(|u| all.iter().map(move |v| self.bracket(u, v))).collect();
            added = products.into_iter().filter(|v| span.insert(v.clone())).collect();
            all.extend(added.iter().cloned());
        }
        span
    }

    /// Whether `[L, I] ⊆ I`; on failure returns a basis vector of `I` that
    /// is pushed outside.
    pub fn ideal_violation(&self, ideal: &Subspace<S>) -> Option<SparseVec<S>> {
        ideal.basis().iter().find(|v| (0..self.dim()).any(|i| !ideal.contains(&self.bracket_basis_with(i, v)))).cloned()
    }

    pub fn is_ideal(&self, sub: &Subspace<S>) -> bool {
        self.ideal_violation(sub).is_none()
    }

    /// `{v : [v, b_i] = 0 for all i}`, the kernel of the stacked adjoint maps.
    pub fn center(&self) -> Subspace<S> {
        let n = self.dim();
        // Row (i, k) of the stacked matrix holds the k-th coordinate of
        // [b_j, b_i] as j varies.
        let mut rows: HashMap<(usize, usize), Vec<(usize, S)>> = HashMap::new();
        for j in 0..n {
            for i in 0..n {
                for (k, c) in self.basis_bracket(j, i).iter() {
                    rows.entry((i, k)).or_default().push((j, c.clone()));
                }
            }
        }
        let mut keys: Vec<_> = rows.keys().copied().collect();
        keys.sort_unstable();
        let data = keys.into_iter().map(|key| SparseVec::from_pairs(rows.remove(&key).expect("key"))).collect();
        let m = SparseMatrix::from_rows(n, &self.field, data).expect("consistent dimensions");
        self.span(m.kernel_basis())
    }

    /// `L / I` on the complement spanned by the non-pivot basis vectors of
    /// `I`. The grading survives when `I` is spanned by homogeneous vectors.
    pub fn quotient_algebra(&self, ideal: &Subspace<S>) -> Result<Quotient<S>> {
        if let Some(v) = self.ideal_violation(ideal) {
            return Err(Error::NotAnIdeal { basis: self.render(&v) });
        }
        let complement = ideal.complement_indices();
        let mut position = vec![None; self.dim()];
        for (k, &i) in complement.iter().enumerate() {
            position[i] = Some(k);
        }
        let project = |v: &SparseVec<S>| ideal.reduce(v).reindex(|i| position[i]);
        let projection: Vec<_> = (0..self.dim()).map(|i| project(&self.basis_vector(i))).collect();
        let m = complement.len();
        let table = complement.iter().map(|&i| complement.iter().map(|&j| project(self.basis_bracket(i, j))).collect()).collect();
        let names = complement.iter().map(|&i| self.names[i].clone()).collect();
        let mut algebra = FinDimLie { names, field: self.field.clone(), table: Vec::new(), weights: None };
        algebra.table = flatten(table, m);
        if let Some(w) = &self.weights {
            if ideal.basis().iter().all(|v| is_homogeneous(w, v)) {
                algebra.weights = Some(complement.iter().map(|&i| w[i].clone()).collect());
            }
        }
        Ok(Quotient { algebra, projection, complement })
    }

    /// Subalgebra spanned by `sub`, in the coordinates of its echelon basis.
    pub fn subalgebra(&self, sub: &Subspace<S>) -> Result<Self> {
        let basis = sub.basis();
        let mut table = Vec::with_capacity(basis.len() * basis.len());
        for u in basis {
            for v in basis {
                let w = self.bracket(u, v);
                table.push(sub.coordinates(&w).ok_or_else(|| Error::NotSubalgebra(self.render(&w)))?);
            }
        }
        let names = sub.pivots().iter().map(|&p| self.names[p].clone()).collect();
        let weights = self.weights.as_ref().and_then(|w| {
            basis
                .iter()
                .map(|v| is_homogeneous(w, v).then(|| w[v.leading().expect("nonzero").0].clone()))
                .collect::<Option<Vec<_>>>()
        });
        Ok(FinDimLie { names, field: self.field.clone(), table, weights })
    }

    /// `A ⊕ B`. Clashing names from `B` get a trailing `'`. The result is
    /// graded when both summands are, with weights placed side by side.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch { expected: self.field.to_string(), found: other.field.to_string() });
        }
        let (n, m) = (self.dim(), other.dim());
        let mut names = self.names.clone();
        for name in &other.names {
            let mut name = name.clone();
            while names.contains(&name) {
                name.push('\'');
            }
            names.push(name);
        }
        let mut table = vec![SparseVec::zero(); (n + m) * (n + m)];
        for i in 0..n {
            for j in 0..n {
                table[i * (n + m) + j] = self.basis_bracket(i, j).clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                table[(n + i) * (n + m) + n + j] = other.basis_bracket(i, j).shift(n);
            }
        }
        let weights = match (&self.weights, &other.weights) {
            (Some(a), Some(b)) => {
                let (la, lb) = (a.first().map_or(0, Vec::len), b.first().map_or(0, Vec::len));
                let pad = |w: &Weight, before: usize, after: usize| {
                    let mut out = vec![0; before];
                    out.extend_from_slice(w);
                    out.resize(before + w.len() + after, 0);
                    out
                };
                Some(a.iter().map(|w| pad(w, 0, lb)).chain(b.iter().map(|w| pad(w, la, 0))).collect())
            }
            _ => None,
        };
        Ok(FinDimLie { names, field: self.field.clone(), table, weights })
    }

    /// `B ⋊ Q` with basis `B` then `Q`. `action[q][b]` is `q · b ∈ B`, and
    /// `[q, b] = q · b`. Each `q` must act by a derivation, and the result
    /// must satisfy the Jacobi identity (which forces the action to respect
    /// brackets of `Q`).
    pub fn semidirect_sum(b: &Self, q: &Self, action: &[Vec<SparseVec<S>>]) -> Result<Self> {
        if b.field != q.field {
            return Err(Error::FieldMismatch { expected: b.field.to_string(), found: q.field.to_string() });
        }
        let (nb, nq) = (b.dim(), q.dim());
        if action.len() != nq || action.iter().any(|row| row.len() != nb) {
            return Err(Error::InvalidAction(format!("expected a {nq} x {nb} table of images")));
        }
        for (k, row) in action.iter().enumerate() {
            if row.iter().any(|v| v.support_bound() > nb) {
                return Err(Error::InvalidAction(format!("image under {} leaves B", q.names[k])));
            }
            for i in 0..nb {
                for j in i + 1..nb {
                    let lhs = apply(row, b.basis_bracket(i, j));
                    let rhs = b.bracket(&row[i], &b.basis_vector(j)).add(&b.bracket(&b.basis_vector(i), &row[j]));
                    if lhs != rhs {
                        return Err(Error::InvalidAction(format!(
                            "{} is not a derivation on ({}, {})",
                            q.names[k], b.names[i], b.names[j]
                        )));
                    }
                }
            }
        }
        let n = nb + nq;
        let mut names = b.names.clone();
        for name in &q.names {
            let mut name = name.clone();
            while names.contains(&name) {
                name.push('\'');
            }
            names.push(name);
        }
        let mut table = vec![SparseVec::zero(); n * n];
        for i in 0..nb {
            for j in 0..nb {
                table[i * n + j] = b.basis_bracket(i, j).clone();
            }
        }
        for k in 0..nq {
            for l in 0..nq {
                table[(nb + k) * n + nb + l] = q.basis_bracket(k, l).shift(nb);
            }
            for i in 0..nb {
                table[(nb + k) * n + i] = action[k][i].clone();
                table[i * n + nb + k] = action[k][i].neg();
            }
        }
        let l = FinDimLie { names, field: b.field.clone(), table, weights: None };
        l.check_jacobi()?;
        Ok(l)
    }

    /// First basis pair `(i, j)` where the linear map with the given images
    /// fails to preserve brackets.
    pub fn homomorphism_violation(&self, target: &Self, images: &[SparseVec<S>]) -> Option<(usize, usize)> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| apply(images, self.basis_bracket(i, j)) != target.bracket(&images[i], &images[j]))
    }
}

fn check_names(names: &[String]) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(Error::DuplicateName(n.clone()));
        }
    }
    Ok(())
}

fn flatten<S: Scalar>(table: Vec<Vec<SparseVec<S>>>, n: usize) -> Vec<SparseVec<S>> {
    let flat: Vec<_> = table.into_iter().flatten().collect();
    debug_assert_eq!(flat.len(), n * n);
    flat
}

fn unit_weight(i: usize, n: usize) -> Weight {
    let mut w = vec![0; n];
    w[i] = 1;
    w
}

pub(crate) fn add_weights(a: &[u32], b: &[u32]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn is_homogeneous<S: Scalar>(weights: &[Weight], v: &SparseVec<S>) -> bool {
    let mut it = v.indices();
    match it.next() {
        None => true,
        Some(first) => it.all(|i| weights[i] == weights[first]),
    }
}

impl<S: Scalar> fmt::Debug for FinDimLie<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinDimLie({:?} over {})", self.names, self.field)
    }
}

impl<S: Scalar> BracketAlgebra for FinDimLie<S> {
    type Scalar = S;
    type Element = SparseVec<S>;

    fn scalar_field(&self) -> &S::Field {
        &self.field
    }

    fn named_generator(&self, name: &str) -> Result<SparseVec<S>> {
        self.index_of(name).map(|i| self.basis_vector(i)).ok_or_else(|| Error::UnboundName(name.to_string()))
    }

    fn zero_element(&self) -> SparseVec<S> {
        SparseVec::zero()
    }

    fn add_elements(&self, a: &SparseVec<S>, b: &SparseVec<S>) -> SparseVec<S> {
        a.add(b)
    }

    fn scale_element(&self, a: &SparseVec<S>, c: &S) -> SparseVec<S> {
        a.scale(c)
    }

    fn bracket_elements(&self, a: &SparseVec<S>, b: &SparseVec<S>) -> Result<SparseVec<S>> {
        Ok(self.bracket(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_lie::witt_dimension;
    use crate::scalar::{PrimeField, RationalField};
    use crate::{Fp, Rational};

    type L = FinDimLie<Rational>;

    fn q(n: i64) -> Rational {
        Rational::from_i64(&RationalField, n)
    }

    fn e(i: usize) -> SparseVec<Rational> {
        SparseVec::unit(i, &RationalField)
    }

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn structure_constant_validation() {
        assert!(L::from_brackets(names(&["a", "b"]), &RationalField, []).is_ok());
        let h = L::from_brackets(names(&["x", "y", "z"]), &RationalField, [((0, 1), e(2))]).unwrap();
        assert_eq!(h.bracket(&e(1), &e(0)), e(2).neg());
        let bad = L::from_brackets(names(&["x", "y", "z"]), &RationalField, [((0, 1), e(2)), ((1, 0), e(2))]);
        assert_eq!(bad.unwrap_err(), Error::AntisymmetryViolation("x".into(), "y".into()));
        // [x,y]=y, [x,z]=z, [y,z]=x violates Jacobi.
        let bad = L::from_brackets(names(&["x", "y", "z"]), &RationalField, [((0, 1), e(1)), ((0, 2), e(2)), ((1, 2), e(0))]);
        assert!(matches!(bad, Err(Error::JacobiViolation(..))));
    }

    #[test]
    fn sl2_is_accepted() {
        // [h,e]=2e, [h,f]=-2f, [e,f]=h.
        let sl2 = L::from_brackets(
            names(&["h", "e", "f"]),
            &RationalField,
            [((0, 1), e(1).scale(&q(2))), ((0, 2), e(2).scale(&q(-2))), ((1, 2), e(0))],
        )
        .unwrap();
        assert_eq!(sl2.lower_central_series().len(), 1);
        assert!(sl2.center().is_zero());
    }

    #[test]
    fn free_nilpotent_dimensions() {
        assert_eq!(L::free_nilpotent(2, 1, &RationalField).unwrap().dim(), 2);
        let f22 = L::free_nilpotent(2, 2, &RationalField).unwrap();
        assert_eq!(f22.names(), &["x", "y", "[x,y]"]);
        assert_eq!(f22.bracket(&e(0), &e(1)), e(2));
        assert_eq!(L::free_nilpotent(2, 3, &RationalField).unwrap().dim(), 5);
        for (r, c) in [(2, 5), (3, 3)] {
            let f = L::free_nilpotent(r, c, &RationalField).unwrap();
            let dims = f.graded_dims().unwrap();
            for n in 1..=c {
                assert_eq!(dims[n], witt_dimension(r, n));
            }
            assert!(f.jacobi_violation().is_none());
        }
    }

    #[test]
    fn lower_central_series_examples() {
        let dims = |l: &L| l.lower_central_series().iter().map(Subspace::dim).collect::<Vec<_>>();
        assert_eq!(dims(&L::abelian(3, &RationalField)), vec![3, 0]);
        assert_eq!(dims(&L::heisenberg(&RationalField)), vec![3, 1, 0]);
        let f23 = L::free_nilpotent(2, 3, &RationalField).unwrap();
        assert_eq!(dims(&f23), vec![5, 3, 2, 0]);
        assert_eq!(L::heisenberg(&RationalField).gamma(2), L::heisenberg(&RationalField).span([e(2)]));
    }

    #[test]
    fn ideal_closure_examples() {
        let h = L::heisenberg(&RationalField);
        assert!(h.ideal_closure([]).is_zero());
        assert_eq!(h.ideal_closure([e(2)]), h.span([e(2)]));
        assert_eq!(h.ideal_closure([e(0)]), h.span([e(0), e(2)]));
    }

    #[test]
    fn centers() {
        assert_eq!(L::abelian(4, &RationalField).center().dim(), 4);
        let h = L::heisenberg(&RationalField);
        assert_eq!(h.center(), h.span([e(2)]));
        let f23 = L::free_nilpotent(2, 3, &RationalField).unwrap();
        assert_eq!(f23.center(), f23.span([e(3), e(4)]));
        let hh = h.direct_sum(&h).unwrap();
        assert_eq!(hh.dim(), 6);
        assert_eq!(hh.center().dim(), 2);
    }

    #[test]
    fn quotients() {
        let h = L::heisenberg(&RationalField);
        let same = h.quotient_algebra(&h.zero_subspace()).unwrap();
        assert_eq!(same.algebra, h);
        assert_eq!(h.quotient_algebra(&h.full()).unwrap().algebra.dim(), 0);
        let ab = h.quotient_algebra(&h.span([e(2)])).unwrap();
        assert_eq!(ab.algebra.dim(), 2);
        assert!(ab.algebra.bracket(&e(0), &e(1)).is_zero());
        assert!(h.homomorphism_violation(&ab.algebra, &ab.projection).is_none());
        assert!(matches!(h.quotient_algebra(&h.span([e(0)])), Err(Error::NotAnIdeal { .. })));
    }

    #[test]
    fn semidirect_examples() {
        let a1 = L::abelian(1, &RationalField);
        let trivial = L::semidirect_sum(&a1, &a1, &[vec![SparseVec::zero()]]).unwrap();
        assert_eq!(trivial.without_grading(), a1.direct_sum(&a1).unwrap().without_grading());
        let affine = L::semidirect_sum(&a1, &a1, &[vec![e(0)]]).unwrap();
        assert_eq!(affine.gamma(2), affine.span([e(0)]));
        let bad = L::semidirect_sum(&L::heisenberg(&RationalField), &a1, &[vec![e(0), SparseVec::zero(), SparseVec::zero()]]);
        assert!(matches!(bad, Err(Error::InvalidAction(_))));
    }

    #[test]
    fn semidirect_recovers_graded_dims_of_free_nilpotent() {
        let f = L::free_nilpotent(2, 3, &RationalField).unwrap();
        let g2 = f.gamma(2);
        let b = f.subalgebra(&g2).unwrap();
        let q = L::abelian(2, &RationalField);
        let action: Vec<Vec<_>> =
            (0..2).map(|k| g2.basis().iter().map(|v| g2.coordinates(&f.bracket(&e(k), v)).unwrap()).collect()).collect();
        let s = L::semidirect_sum(&b, &q, &action).unwrap();
        let degrees: Vec<usize> = (0..3).map(|i| b.degree(i).unwrap()).chain([1, 1]).collect();
        let s = s.with_degrees(&degrees).unwrap();
        assert_eq!(s.graded_dims(), f.graded_dims());
    }

    #[test]
    fn works_over_fp() {
        let field = PrimeField::new(7).unwrap();
        let f = FinDimLie::<Fp>::free_nilpotent(2, 4, &field).unwrap();
        assert!(f.jacobi_violation().is_none());
        assert_eq!(f.center().dim(), 3);
    }
}
