//! Subalgebras of direct sums of nilpotent algebras, examined degree by
//! degree: projections to groups of factors, intersections with single
//! factors, and containment of lower central terms.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::findim::FinDimLie;
use crate::free_lie::{FreeLieAlgebra, FreeLieElement};
use crate::linalg::{membership, SparseVec, Subspace};
use crate::scalar::Scalar;

/// Direct sum of finite-dimensional algebras whose basis elements carry
/// degrees, re-indexed so that ambient coordinates run degree by degree.
///
/// With that order the pivot of an echelon row sits at its lowest-degree
/// component, so counting pivots per degree gives the dimensions of the
/// associated graded of any subspace (the true graded dimensions when the
/// subspace is graded).
#[derive(Clone, Debug)]
pub struct GradedSum<S: Scalar> {
    ambient: FinDimLie<S>,
    labels: Vec<String>,
    factors: Vec<FinDimLie<S>>,
    /// `positions[i][j]`: ambient index of basis element `j` of factor `i`.
    positions: Vec<Vec<usize>>,
    /// Ambient index to `(factor, basis index)`.
    origin: Vec<(usize, usize)>,
    degrees: Vec<usize>,
    max_degree: usize,
}

impl<S: Scalar> GradedSum<S> {
    /// `factors` are `(label, algebra, degree of each basis element)`.
    pub fn new(factors: Vec<(String, FinDimLie<S>, Vec<usize>)>) -> Result<Self> {
        let Some(first) = factors.first() else {
            return Err(Error::OutOfRange { what: "factor count", value: 0, max: usize::MAX });
        };
        let field = first.1.field().clone();
        let mut entries = Vec::new();
        for (i, (_, l, degrees)) in factors.iter().enumerate() {
            if *l.field() != field {
                return Err(Error::FieldMismatch { expected: field.to_string(), found: l.field().to_string() });
            }
            if degrees.len() != l.dim() {
                return Err(Error::DimensionMismatch { expected: l.dim(), found: degrees.len() });
            }
            entries.extend(degrees.iter().enumerate().map(|(j, &d)| (d, i, j)));
        }
        entries.sort_unstable();
        let mut positions: Vec<Vec<usize>> = factors.iter().map(|(_, l, _)| vec![0; l.dim()]).collect();
        let mut origin = Vec::with_capacity(entries.len());
        let mut degrees = Vec::with_capacity(entries.len());
        let mut names = Vec::with_capacity(entries.len());
        for (k, &(d, i, j)) in entries.iter().enumerate() {
            positions[i][j] = k;
            origin.push((i, j));
            degrees.push(d);
            names.push(format!("{}.{}", factors[i].0, factors[i].1.names()[j]));
        }
        let n = entries.len();
        let mut table = vec![SparseVec::zero(); n * n];
        for a in 0..n {
            for b in 0..n {
                let ((i, j), (i2, j2)) = (origin[a], origin[b]);
                if i == i2 {
                    let pos = &positions[i];
                    table[a * n + b] = factors[i].1.basis_bracket(j, j2).reindex(|t| Some(pos[t]));
                }
            }
        }
        let ambient = FinDimLie::from_parts(names, &field, table, None);
        let max_degree = degrees.iter().copied().max().unwrap_or(0);
        let labels = factors.iter().map(|f| f.0.clone()).collect();
        let factors = factors.into_iter().map(|f| f.1).collect();
        Ok(GradedSum { ambient, labels, factors, positions, origin, degrees, max_degree })
    }

    pub fn ambient(&self) -> &FinDimLie<S> {
        &self.ambient
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn factor(&self, i: usize) -> &FinDimLie<S> {
        &self.factors[i]
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    /// `(factor, basis index)` of an ambient coordinate.
    pub fn origin(&self, index: usize) -> (usize, usize) {
        self.origin[index]
    }

    pub fn degree(&self, index: usize) -> usize {
        self.degrees[index]
    }

    /// Ambient vector of an element of factor `i`.
    pub fn embed(&self, i: usize, v: &SparseVec<S>) -> SparseVec<S> {
        let pos = &self.positions[i];
        v.reindex(|j| Some(pos[j]))
    }

    /// Component of an ambient vector in factor `i`, in factor coordinates.
    pub fn component(&self, i: usize, v: &SparseVec<S>) -> SparseVec<S> {
        v.reindex(|k| {
            let (f, j) = self.origin[k];
            (f == i).then_some(j)
        })
    }

    /// Keeps only the coordinates of the listed factors.
    pub fn restrict(&self, factors: &[usize], v: &SparseVec<S>) -> SparseVec<S> {
        v.reindex(|k| factors.contains(&self.origin[k].0).then_some(k))
    }

    /// The factor `i` as a coordinate subspace of the ambient sum.
    pub fn factor_subspace(&self, i: usize) -> Subspace<S> {
        let field = self.ambient.field();
        self.ambient.span(self.positions[i].iter().map(|&k| SparseVec::unit(k, field)))
    }

    /// Dimension per degree (index 0 unused) of the associated graded of `sub`.
    pub fn profile(&self, sub: &Subspace<S>) -> Vec<usize> {
        let mut dims = vec![0; self.max_degree + 1];
        for &p in sub.pivots() {
            dims[self.degrees[p]] += 1;
        }
        dims
    }

    /// Dimension per degree of the sum of the listed factors.
    pub fn target_profile(&self, factors: &[usize]) -> Vec<usize> {
        let mut dims = vec![0; self.max_degree + 1];
        for (k, &(f, _)) in self.origin.iter().enumerate() {
            if factors.contains(&f) {
                dims[self.degrees[k]] += 1;
            }
        }
        dims
    }
}

/// Dimension of a subspace in one degree next to the dimension available there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeRow {
    pub degree: usize,
    pub dim: usize,
    pub target: usize,
}

fn rows(dims: &[usize], target: &[usize]) -> Vec<DegreeRow> {
    (1..dims.len()).map(|d| DegreeRow { degree: d, dim: dims[d], target: target[d] }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub factors: Vec<String>,
    pub class: usize,
    pub per_degree: Vec<DegreeRow>,
    pub deficient_at: Option<usize>,
    pub surjective: bool,
    pub verdict: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionReport<S: Scalar> {
    pub factor: String,
    pub class: usize,
    /// `dim` is that of `L ∩ F_i`, `target` that of `F_i`.
    pub per_degree: Vec<DegreeRow>,
    #[serde(skip)]
    pub subspace: Subspace<S>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaFactorRow {
    pub factor: String,
    pub checked: usize,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaReport {
    /// Index `j` of the lower central term `γ_j(F_i)` tested.
    pub term: usize,
    pub class: usize,
    pub factors: Vec<GammaFactorRow>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub factor: String,
    pub inputs: Vec<String>,
    /// The left-normed bracket of the lifts, written in ambient coordinates.
    pub witness: String,
    pub expected: String,
    pub in_subalgebra: bool,
    pub matches: bool,
}

/// A subalgebra `L` of `F_1 ⊕ … ⊕ F_k` given by generators, held as the
/// echelon basis of its closure in a class-`c` truncation.
#[derive(Clone, Debug)]
pub struct SubdirectSum<S: Scalar> {
    class: usize,
    sum: GradedSum<S>,
    frees: Vec<Option<FreeLieAlgebra<S>>>,
    generators: Vec<SparseVec<S>>,
    span: Subspace<S>,
}

impl<S: Scalar> SubdirectSum<S> {
    /// Subalgebra of a sum of truncated free algebras (all of truncation
    /// degree `class`) generated by tuples, failing if it is not subdirect.
    pub fn build(class: usize, factors: Vec<(String, FreeLieAlgebra<S>)>, tuples: &[Vec<FreeLieElement<S>>]) -> Result<Self> {
        let s = Self::generated(class, factors, tuples)?;
        if let Some((factor, degree)) = s.subdirect_violation() {
            return Err(Error::NotSubdirect { factor, degree });
        }
        Ok(s)
    }

    /// Like [`build`](Self::build) without the subdirectness requirement.
    pub fn generated(class: usize, factors: Vec<(String, FreeLieAlgebra<S>)>, tuples: &[Vec<FreeLieElement<S>>]) -> Result<Self> {
        let mut parts = Vec::new();
        for (label, free) in &factors {
            if free.max_degree() != class {
                return Err(Error::DimensionMismatch { expected: class, found: free.max_degree() });
            }
            let degrees = (0..free.total_dim()).map(|k| free.word_at(k).len()).collect();
            parts.push((label.clone(), FinDimLie::from_free(free), degrees));
        }
        let sum = GradedSum::new(parts)?;
        let mut generators = Vec::new();
        for t in tuples {
            if t.len() != factors.len() {
                return Err(Error::DimensionMismatch { expected: factors.len(), found: t.len() });
            }
            let mut v = SparseVec::zero();
            for (i, (e, (_, free))) in t.iter().zip(&factors).enumerate() {
                if !free.same_algebra(e.algebra()) {
                    return Err(Error::AlgebraMismatch);
                }
                v = v.add(&sum.embed(i, &free.to_vector(e)));
            }
            generators.push(v);
        }
        let frees = factors.into_iter().map(|(_, f)| Some(f)).collect();
        Ok(Self::from_sum(class, sum, frees, generators))
    }

    /// Closure of `generators` (ambient vectors) inside `sum`.
    pub fn from_sum(
        class: usize,
        sum: GradedSum<S>,
        frees: Vec<Option<FreeLieAlgebra<S>>>,
        generators: Vec<SparseVec<S>>,
    ) -> Self {
        let span = sum.ambient().subalgebra_closure(generators.iter().cloned());
        SubdirectSum { class, sum, frees, generators, span }
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub fn sum(&self) -> &GradedSum<S> {
        &self.sum
    }

    pub fn span(&self) -> &Subspace<S> {
        &self.span
    }

    pub fn generators(&self) -> &[SparseVec<S>] {
        &self.generators
    }

    pub fn factor_count(&self) -> usize {
        self.sum.factor_count()
    }

    pub fn free(&self, i: usize) -> Option<&FreeLieAlgebra<S>> {
        self.frees.get(i).and_then(Option::as_ref)
    }

    pub fn per_degree(&self) -> Vec<usize> {
        self.sum.profile(&self.span)
    }

    /// Whether bracketing the basis with itself stays inside the span.
    pub fn is_closed(&self) -> bool {
        let basis = self.span.basis();
        let amb = self.sum.ambient();
        basis.par_iter().all(|u| basis.iter().all(|v| self.span.contains(&amb.bracket(u, v))))
    }

    pub fn contains(&self, v: &SparseVec<S>) -> bool {
        self.span.contains(v)
    }

    /// First `(factor, degree)` where a single projection falls short.
    pub fn subdirect_violation(&self) -> Option<(usize, usize)> {
        (0..self.factor_count()).find_map(|i| self.projection(&[i]).ok()?.deficient_at.map(|d| (i + 1, d)))
    }

    /// Image of `L` under projection to the listed factors (0-based indices).
    pub fn projection(&self, factors: &[usize]) -> Result<ProjectionReport> {
        if let Some(&bad) = factors.iter().find(|&&i| i >= self.factor_count()) {
            return Err(Error::OutOfRange { what: "factor", value: bad + 1, max: self.factor_count() });
        }
        let amb = self.sum.ambient();
        let image = amb.span(self.span.basis().iter().map(|v| self.sum.restrict(factors, v)));
        let dims = self.sum.profile(&image);
        let target = self.sum.target_profile(factors);
        let deficient_at = (1..dims.len()).find(|&d| dims[d] < target[d]);
        let verdict = match deficient_at {
            None => format!("surjective up to class {}", self.class),
            Some(d) => format!("deficient at degree {d}"),
        };
        Ok(ProjectionReport {
            factors: factors.iter().map(|&i| self.sum.labels()[i].clone()).collect(),
            class: self.class,
            per_degree: rows(&dims, &target),
            surjective: deficient_at.is_none(),
            deficient_at,
            verdict,
        })
    }

    /// Projections to every pair of factors.
    pub fn pairwise_projections(&self) -> Vec<ProjectionReport> {
        let k = self.factor_count();
        (0..k).flat_map(|i| (i + 1..k).map(move |j| [i, j])).map(|p| self.projection(&p).expect("valid indices")).collect()
    }

    /// `L ∩ F_i`.
    pub fn intersect_factor(&self, i: usize) -> Result<IntersectionReport<S>> {
        if i >= self.factor_count() {
            return Err(Error::OutOfRange { what: "factor", value: i + 1, max: self.factor_count() });
        }
        let subspace = self.span.intersect(&self.sum.factor_subspace(i));
        let dims = self.sum.profile(&subspace);
        let target = self.sum.target_profile(&[i]);
        Ok(IntersectionReport {
            factor: self.sum.labels()[i].clone(),
            class: self.class,
            per_degree: rows(&dims, &target),
            subspace,
        })
    }

    /// Checks `γ_j(F_i) ⊆ L` for every factor, basis vector by basis vector.
    pub fn gamma_containment(&self, j: usize) -> GammaReport {
        let factors: Vec<GammaFactorRow> = (0..self.factor_count())
            .map(|i| {
                let f = self.sum.factor(i);
                let gamma = f.gamma(j.max(1));
                let failure = gamma.basis().iter().find(|v| !self.span.contains(&self.sum.embed(i, v)));
                GammaFactorRow {
                    factor: self.sum.labels()[i].clone(),
                    checked: gamma.dim(),
                    first_failure: failure.map(|v| f.render(v)),
                }
            })
            .collect();
        let holds = factors.iter().all(|r| r.first_failure.is_none());
        GammaReport { term: j, class: self.class, factors, holds }
    }

    /// Finds `a ∈ L` whose component in factor `target` is `f` and whose
    /// component in factor `zero` vanishes.
    pub fn lift(&self, target: usize, zero: usize, f: &SparseVec<S>) -> Result<Option<SparseVec<S>>> {
        let amb = self.sum.ambient();
        let basis = self.span.basis();
        let projected: Vec<SparseVec<S>> = basis.iter().map(|b| self.sum.restrict(&[target, zero], b)).collect();
        let wanted = self.sum.embed(target, f);
        Ok(membership(amb.dim(), amb.field(), &projected, &wanted)?.map(|coeffs| crate::linalg::apply(basis, &coeffs)))
    }

    /// The left-normed witness: for `f_1..f_{k−1}` in factor `target`, lift
    /// each `f_m` to `a_m ∈ L` with component `f_m` in `target` and zero in
    /// the `m`-th other factor; then `[a_1, …, a_{k−1}]` should equal
    /// `[f_1, …, f_{k−1}]` placed in `target`.
    pub fn witness(&self, target: usize, fs: &[FreeLieElement<S>]) -> Result<WitnessReport> {
        let k = self.factor_count();
        let free = self.free(target).ok_or_else(|| Error::OutOfRange { what: "free factor", value: target + 1, max: k })?;
        let others: Vec<usize> = (0..k).filter(|&i| i != target).collect();
        if fs.len() != others.len() || fs.is_empty() {
            return Err(Error::DimensionMismatch { expected: others.len(), found: fs.len() });
        }
        let amb = self.sum.ambient();
        let mut acc: Option<SparseVec<S>> = None;
        let mut expected: Option<FreeLieElement<S>> = None;
        for (f, &other) in fs.iter().zip(&others) {
            let a = self.lift(target, other, &free.to_vector(f))?.ok_or_else(|| {
                Error::NotSurjective(format!(
                    "({}, 0) is not in the projection to {} and {}",
                    f.render(),
                    self.sum.labels()[target],
                    self.sum.labels()[other]
                ))
            })?;
            acc = Some(match acc {
                None => a,
                Some(prev) => amb.bracket(&prev, &a),
            });
            expected = Some(match expected {
                None => f.clone(),
                Some(prev) => prev.bracket(f)?,
            });
        }
        let witness = acc.expect("nonempty");
        let expected = expected.expect("nonempty");
        let expected_vec = self.sum.embed(target, &free.to_vector(&expected));
        Ok(WitnessReport {
            factor: self.sum.labels()[target].clone(),
            inputs: fs.iter().map(FreeLieElement::render).collect(),
            witness: amb.render(&witness),
            expected: expected.render(),
            in_subalgebra: self.span.contains(&witness),
            matches: witness == expected_vec,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_lie::Alphabet;
    use crate::scalar::RationalField;
    use crate::Rational;

    type Free = FreeLieAlgebra<Rational>;

    fn free(names: &[&str], c: usize) -> Free {
        Free::new(Alphabet::new(names.iter().copied()).unwrap(), c, &RationalField).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_i64(&RationalField, n)
    }

    /// Kernel of the summed abelianization map on three rank-2 factors.
    pub(crate) fn abelianization_kernel(c: usize) -> SubdirectSum<Rational> {
        let fs: Vec<Free> = (1..=3).map(|i| free(&[&format!("x{i}"), &format!("y{i}")], c)).collect();
        let z = |i: usize| fs[i].zero();
        let g = |i: usize, l: u8| fs[i].generator(l);
        let mut tuples = vec![
            vec![g(0, 0), g(1, 0).neg(), z(2)],
            vec![g(0, 0), z(1), g(2, 0).neg()],
            vec![g(0, 1), g(1, 1).neg(), z(2)],
            vec![g(0, 1), z(1), g(2, 1).neg()],
        ];
        for i in 0..3 {
            let mut t = vec![z(0), z(1), z(2)];
            t[i] = fs[i].basis_element(&[0, 1]).unwrap();
            tuples.push(t);
        }
        let factors = fs.into_iter().enumerate().map(|(i, f)| (format!("F{}", i + 1), f)).collect();
        SubdirectSum::build(c, factors, &tuples).unwrap()
    }

    #[test]
    fn single_factor_is_everything() {
        let f = free(&["x", "y"], 3);
        let s = SubdirectSum::build(3, vec![("F".into(), f.clone())], &[vec![f.generator(0)], vec![f.generator(1)]]).unwrap();
        assert_eq!(s.per_degree(), vec![0, 2, 1, 2]);
        assert!(s.is_closed());
    }

    #[test]
    fn diagonal() {
        let f = free(&["x", "y"], 3);
        let s = SubdirectSum::build(
            3,
            vec![("A".into(), f.clone()), ("B".into(), f.clone())],
            &[vec![f.generator(0), f.generator(0)], vec![f.generator(1), f.generator(1)]],
        )
        .unwrap();
        let p = s.projection(&[0, 1]).unwrap();
        assert_eq!(p.deficient_at, Some(1));
        assert_eq!(p.per_degree[0], DegreeRow { degree: 1, dim: 2, target: 4 });
        for i in 0..2 {
            assert!(s.intersect_factor(i).unwrap().subspace.is_zero());
        }
    }

    #[test]
    fn non_subdirect_is_rejected() {
        let f = free(&["x", "y"], 2);
        let r = SubdirectSum::build(
            2,
            vec![("A".into(), f.clone()), ("B".into(), f.clone())],
            &[vec![f.generator(0), f.generator(1)]],
        );
        assert_eq!(r.unwrap_err(), Error::NotSubdirect { factor: 1, degree: 1 });
    }

    #[test]
    fn abelianization_kernel_example() {
        let s = abelianization_kernel(4);
        assert!(s.is_closed());
        for p in s.pairwise_projections() {
            assert!(p.surjective, "{p:?}");
        }
        for i in 0..3 {
            let r = s.intersect_factor(i).unwrap();
            let dims: Vec<usize> = r.per_degree.iter().map(|row| row.dim).collect();
            assert_eq!(dims, vec![0, 1, 2, 3]);
        }
        assert!(s.gamma_containment(2).holds);
        assert!(!s.gamma_containment(1).holds);
    }

    #[test]
    fn witness_identity() {
        let s = abelianization_kernel(4);
        let f = s.free(0).unwrap().clone();
        let fs = vec![f.generator(0).add(&f.generator(1).scale(&q(2))), f.basis_element(&[0, 1]).unwrap()];
        let w = s.witness(0, &fs).unwrap();
        assert!(w.in_subalgebra && w.matches, "{w:?}");
        assert_eq!(w.expected, "[x1,[x1,y1]] - 2*[[x1,y1],y1]");
    }
}
