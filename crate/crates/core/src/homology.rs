//! Homology with trivial coefficients through the Chevalley–Eilenberg
//! complex, the Hopf formula for `H₂`, and the graded relation sequence of
//! a free nilpotent quotient.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::findim::{FinDimLie, Weight};
use crate::free_lie::{witt_dimension, FreeLieAlgebra};
use crate::linalg::{QuotientSpace, RankEchelon, SparseMatrix, SparseVec, Subspace};
use crate::presentations::Presentation;
use crate::scalar::Scalar;

/// All `n`-element subsets of `0..dim`, in lexicographic order.
pub fn exterior_basis(dim: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n > dim {
        return out;
    }
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // Advance the rightmost index that still has room.
        let Some(i) = (0..n).rev().find(|&i| cur[i] < dim - n + i) else {
            return out;
        };
        cur[i] += 1;
        for k in i + 1..n {
            cur[k] = cur[k - 1] + 1;
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `∂(b_{i₁}∧…∧b_{iₙ}) = Σ_{s<t} (−1)^{s+t} [b_{i_s}, b_{i_t}] ∧ b_{i₁} ∧ … ŝ … t̂ … ∧ b_{iₙ}`
/// (positions 1-based), as a vector over the `(n−1)`-wedges.
fn boundary_image<S: Scalar>(l: &FinDimLie<S>, wedge: &[usize], index: &HashMap<Vec<usize>, usize>) -> SparseVec<S> {
    let n = wedge.len();
    let mut terms: BTreeMap<usize, S> = BTreeMap::new();
    let mut rest = Vec::with_capacity(n.saturating_sub(1));
    for s in 0..n {
        for t in s + 1..n {
            let br = l.basis_bracket(wedge[s], wedge[t]);
            if br.is_zero() {
                continue;
            }
            rest.clear();
            rest.extend(wedge.iter().enumerate().filter(|&(k, _)| k != s && k != t).map(|(_, &b)| b));
            let outer_negative = (s + t) % 2 == 1;
            for (k, c) in br.iter() {
                let pos = match rest.binary_search(&k) {
                    Ok(_) => continue,
                    Err(p) => p,
                };
                let mut target = rest.clone();
                target.insert(pos, k);
                let negative = outer_negative ^ (pos % 2 == 1);
                let c = if negative { c.neg_ref() } else { c.clone() };
                let idx = index[&target];
                let entry = terms.remove(&idx).map_or(c.clone(), |old| old.add_ref(&c));
                if !entry.is_zero() {
                    terms.insert(idx, entry);
                }
            }
        }
    }
    SparseVec::from_pairs(terms)
}

fn wedge_index(wedges: &[Vec<usize>]) -> HashMap<Vec<usize>, usize> {
    wedges.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect()
}

/// Matrix of `∂_n : Λⁿ L → Λⁿ⁻¹ L`; rows index `(n−1)`-wedges, columns
/// `n`-wedges, both in lexicographic order.
pub fn ce_boundary<S: Scalar>(l: &FinDimLie<S>, n: usize) -> Result<SparseMatrix<S>> {
    if n == 0 || n > l.dim() {
        return Err(Error::OutOfRange { what: "chain degree", value: n, max: l.dim() });
    }
    let source = exterior_basis(l.dim(), n);
    let target = exterior_basis(l.dim(), n - 1);
    let index = wedge_index(&target);
    let columns: Vec<SparseVec<S>> = source.par_iter().map(|w| boundary_image(l, w, &index)).collect();
    SparseMatrix::from_columns(target.len(), l.field(), &columns)
}

/// The whole Chevalley–Eilenberg complex of `L`.
#[derive(Clone, Debug)]
pub struct ChainComplex<S: Scalar> {
    /// `dims[n] = dim Λⁿ L`.
    pub dims: Vec<usize>,
    /// `boundaries[n-1] = ∂_n` for `n = 1..=dim L`.
    pub boundaries: Vec<SparseMatrix<S>>,
}

impl<S: Scalar> ChainComplex<S> {
    pub fn new(l: &FinDimLie<S>) -> Self {
        let d = l.dim();
        ChainComplex {
            dims: (0..=d).map(|n| binomial(d, n)).collect(),
            boundaries: (1..=d).map(|n| ce_boundary(l, n).expect("degree in range")).collect(),
        }
    }

    /// First `n` with `∂_{n−1} ∘ ∂_n ≠ 0`.
    pub fn square_violation(&self) -> Option<usize> {
        (2..=self.boundaries.len()).find(|&n| !self.boundaries[n - 2].mul(&self.boundaries[n - 1]).expect("composable").is_zero())
    }

    pub fn betti(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.boundaries.iter().map(SparseMatrix::rank).collect();
        let rank = |n: usize| if n == 0 || n > ranks.len() { 0 } else { ranks[n - 1] };
        (0..self.dims.len()).map(|n| self.dims[n] - rank(n) - rank(n + 1)).collect()
    }
}

/// Betti numbers `b_0..b_k` of a named algebra over a named field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    pub algebra: String,
    pub field: String,
    pub betti: Vec<usize>,
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.betti.iter().map(ToString::to_string).collect();
        write!(f, "{} over {}: [{}]", self.algebra, self.field, b.join(", "))
    }
}

/// `n`-wedges grouped by total weight. Ungraded algebras form one block.
fn wedge_blocks<S: Scalar>(l: &FinDimLie<S>, n: usize) -> BTreeMap<Weight, Vec<Vec<usize>>> {
    let mut blocks: BTreeMap<Weight, Vec<Vec<usize>>> = BTreeMap::new();
    for w in exterior_basis(l.dim(), n) {
        let weight = match l.weights() {
            Some(ws) => {
                let mut acc = vec![0; ws.first().map_or(0, Vec::len)];
                for &i in &w {
                    for (a, b) in acc.iter_mut().zip(&ws[i]) {
                        *a += b;
                    }
                }
                acc
            }
            None => Vec::new(),
        };
        blocks.entry(weight).or_default().push(w);
    }
    blocks
}

/// Rank of `∂_n`, summed over weight blocks (the differential preserves weight).
fn boundary_rank<S: Scalar>(l: &FinDimLie<S>, n: usize) -> usize {
    if n == 0 || n > l.dim() {
        return 0;
    }
    let index = wedge_index(&exterior_basis(l.dim(), n - 1));
    let blocks = wedge_blocks(l, n);
    blocks
        .par_iter()
        .map(|(_, wedges)| {
            let mut ech = RankEchelon::new();
            for w in wedges {
                ech.insert(boundary_image(l, w, &index));
            }
            ech.rank()
        })
        .sum()
}

/// `b_n = dim Λⁿ − rank ∂_n − rank ∂_{n+1}` for `n ≤ up_to`; entries past
/// `dim L` are zero.
pub fn betti_numbers<S: Scalar>(l: &FinDimLie<S>, name: &str, up_to: usize) -> BettiTable {
    let d = l.dim();
    let top = up_to.min(d);
    let ranks: Vec<usize> = (0..=top + 1).into_par_iter().map(|n| boundary_rank(l, n)).collect();
    let betti = (0..=up_to).map(|n| if n > d { 0 } else { binomial(d, n) - ranks[n] - ranks[n + 1] }).collect();
    BettiTable { algebra: name.to_string(), field: l.field().to_string(), betti }
}

/// Comparison of `b_n(A ⊕ B)` with `Σ_i b_i(A) b_{n−i}(B)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KunnethReport {
    pub degree: usize,
    pub expected: usize,
    pub computed: usize,
    pub holds: bool,
}

/// Künneth comparison in every degree `0..=up_to`.
pub fn kunneth_table<S: Scalar>(a: &FinDimLie<S>, b: &FinDimLie<S>, up_to: usize) -> Result<Vec<KunnethReport>> {
    let sum = a.direct_sum(b)?;
    let ba = betti_numbers(a, "A", up_to).betti;
    let bb = betti_numbers(b, "B", up_to).betti;
    let bs = betti_numbers(&sum, "A+B", up_to).betti;
    Ok((0..=up_to)
        .map(|n| {
            let expected = (0..=n).map(|i| ba[i] * bb[n - i]).sum();
            KunnethReport { degree: n, expected, computed: bs[n], holds: expected == bs[n] }
        })
        .collect())
}

pub fn kunneth_check<S: Scalar>(a: &FinDimLie<S>, b: &FinDimLie<S>, n: usize) -> Result<KunnethReport> {
    Ok(kunneth_table(a, b, n)?.pop().expect("nonempty"))
}

/// `H₂(F/R) ≅ (R ∩ [F,F]) / [R,F]`, computed in `F/γ_{c+2}(F)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HopfReport {
    pub presentation: String,
    pub class: usize,
    pub dim: usize,
    /// Representatives of a basis, rendered in the Lyndon basis.
    pub basis: Vec<String>,
}

/// Hopf's formula for a presentation whose quotient has class at most `c`.
///
/// Nilpotency is certified by checking `γ_{c+1} ⊆ R` inside
/// `W = F/γ_{c+2}(F)`. Since `R` and `[F,F]` then both contain
/// `γ_{c+2}(F)`, and `[R,F] ⊇ γ_{c+2}(F)` too, the quotient computed in `W`
/// is exactly `(R ∩ [F,F]) / [R,F]`.
pub fn hopf_h2<S: Scalar>(pres: &Presentation, class: usize, field: &S::Field) -> Result<HopfReport> {
    if class == 0 {
        return Err(Error::EmptyDegree);
    }
    let free = FreeLieAlgebra::<S>::new(pres.alphabet().clone(), class + 1, field)?;
    let w = FinDimLie::from_free(&free);
    let relators: Vec<SparseVec<S>> = pres.relator_elements(&free)?.iter().map(|r| free.to_vector(r)).collect();
    let r = w.ideal_closure(relators);
    let series = w.lower_central_series();
    let gamma = |j: usize| series.get(j - 1).cloned().unwrap_or_else(|| w.zero_subspace());
    if !gamma(class + 1).is_subspace_of(&r) {
        return Err(Error::NotNilpotent { class });
    }
    let total = r.intersect(&gamma(2));
    let rf = w.bracket_subspaces(&r, &w.full());
    let q = QuotientSpace::new(&total, &rf);
    let basis = q.representatives().iter().map(|v| free.from_vector(v).render()).collect();
    Ok(HopfReport { presentation: pres.label().to_string(), class, dim: q.dim(), basis })
}

/// Graded dimensions `dim 𝒰(Q)_n`, `n = 0..=max_degree`, of the enveloping
/// algebra of a graded Lie algebra with `dims[k]` basis elements in degree
/// `k`: the coefficients of `∏_k (1 − t^k)^{−dims[k]}`.
pub fn pbw_dims(dims: &[usize], max_degree: usize) -> Vec<u128> {
    let mut a = vec![0u128; max_degree + 1];
    a[0] = 1;
    for (k, &m) in dims.iter().enumerate().skip(1) {
        for _ in 0..m {
            for n in k..=max_degree {
                a[n] += a[n - k];
            }
        }
    }
    a
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationSequenceRow {
    pub degree: usize,
    /// `dim (N/[N,N])_n`, by linear algebra in the free algebra.
    pub relation_module: usize,
    /// `d · dim 𝒰(Q)_{n−1} − dim 𝒰(Q)_n + [n = 0]`.
    pub euler: i128,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationSequenceReport {
    pub rank: usize,
    pub class: usize,
    pub rows: Vec<RelationSequenceRow>,
    pub holds: bool,
}

/// Checks, degree by degree, the Euler characteristic of the exact sequence
/// `0 → N^{ab} → 𝒰(Q)^d → 𝒰(Q) → K → 0` for `N = γ_{c+1}(F)`, `Q = F/N`.
pub fn relation_sequence_check<S: Scalar>(
    rank: usize,
    class: usize,
    max_degree: usize,
    field: &S::Field,
) -> Result<RelationSequenceReport> {
    if class == 0 {
        return Err(Error::EmptyDegree);
    }
    let free = FreeLieAlgebra::<S>::with_rank(rank, max_degree.max(1), field)?;
    // N_n is all of F_n from degree c+1 on; [N,N]_n is spanned by brackets of
    // basis elements of degrees i, j ≥ c+1 with i + j = n.
    let nn: Vec<usize> = (0..=max_degree)
        .into_par_iter()
        .map(|n| {
            let mut span = Subspace::new(free.dim(n), field);
            for i in class + 1..n {
                let j = n - i;
                if j < i {
                    break;
                }
                for (a, u) in free.basis(i).iter().enumerate() {
                    let eu = free.basis_element(u).expect("Lyndon");
                    let skip = if i == j { a + 1 } else { 0 };
                    for v in free.basis(j).iter().skip(skip) {
                        let ev = free.basis_element(v).expect("Lyndon");
                        span.insert(free.degree_vector(&eu.bracket(&ev).expect("same algebra"), n));
                    }
                }
            }
            span.dim()
        })
        .collect();
    let q_dims: Vec<usize> = (0..=class).map(|k| if k == 0 { 0 } else { witt_dimension(rank, k) }).collect();
    let u = pbw_dims(&q_dims, max_degree);
    let rows: Vec<RelationSequenceRow> = (0..=max_degree)
        .map(|n| {
            let relation_module = if n > class { free.dim(n) - nn[n] } else { 0 };
            let prev = if n == 0 { 0 } else { u[n - 1] as i128 };
            let euler = rank as i128 * prev - u[n] as i128 + i128::from(n == 0);
            RelationSequenceRow { degree: n, relation_module, euler, holds: relation_module as i128 == euler }
        })
        .collect();
    let holds = rows.iter().all(|r| r.holds);
    Ok(RelationSequenceReport { rank, class, rows, holds })
}
