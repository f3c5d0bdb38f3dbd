//! Finitely presented Lie algebras `⟨X | R⟩`, their nilpotent quotients,
//! and degree-by-degree evidence for finite generation of the relation
//! module.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::findim::{FinDimLie, Quotient};
use crate::free_lie::{lyndon_words, Alphabet, BracketExpr, BracketTree, FreeLieAlgebra, FreeLieElement};
use crate::linalg::{QuotientSpace, SparseMatrix, SparseVec, Subspace};
use crate::scalar::Scalar;

/// Generators and relators. Relators are kept as expressions and evaluated
/// over whichever field a computation uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    label: String,
    alphabet: Alphabet,
    relators: Vec<BracketExpr>,
}

impl Presentation {
    pub fn new(label: &str, alphabet: Alphabet, relators: Vec<BracketExpr>) -> Result<Self> {
        for r in &relators {
            for name in r.names() {
                if alphabet.index_of(&name).is_none() {
                    return Err(Error::UnboundName(name));
                }
            }
        }
        Ok(Presentation { label: label.to_string(), alphabet, relators })
    }

    /// The free algebra on the alphabet.
    pub fn free(label: &str, alphabet: Alphabet) -> Self {
        Presentation { label: label.to_string(), alphabet, relators: Vec::new() }
    }

    /// Parses `<x, y | [x,[x,y]], [y,[x,y]]>`; the `| ...` part may be omitted.
    pub fn parse(label: &str, text: &str) -> Result<Self> {
        let t = text.trim();
        let inner = t
            .strip_prefix('<')
            .and_then(|s| s.strip_suffix('>'))
            .ok_or_else(|| Error::Syntax { column: 1, message: "presentation must be enclosed in < >".into() })?;
        let (gens, rels) = match inner.find('|') {
            Some(k) => (&inner[..k], &inner[k + 1..]),
            None => (inner, ""),
        };
        let offset = text.len() - text.trim_start().len() + 1;
        let names: Vec<&str> = gens.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        for n in &names {
            if !n.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') || n.starts_with(|c: char| c.is_ascii_digit()) {
                return Err(Error::Syntax { column: offset + 1, message: format!("invalid generator name `{n}`") });
            }
        }
        let alphabet = Alphabet::new(names)?;
        let base = offset + 1 + gens.len() + 1;
        let mut relators = Vec::new();
        for (start, piece) in split_top_level(rels) {
            if piece.trim().is_empty() {
                continue;
            }
            let e = BracketExpr::parse(piece).map_err(|e| match e {
                Error::Syntax { column, message } => Error::Syntax { column: column + base + start - 1, message },
                other => other,
            })?;
            relators.push(e);
        }
        Self::new(label, alphabet, relators)
    }

    /// `⟨x₁..x_d | all Lyndon brackets of degree c+1⟩`, presenting
    /// `F/γ_{c+1}(F)`.
    pub fn free_nilpotent(label: &str, rank: usize, class: usize) -> Result<Self> {
        let alphabet = crate::free_lie::default_alphabet(rank)?;
        let relators = lyndon_words(rank, class + 1)?
            .iter()
            .map(|w| tree_expr(&crate::free_lie::standard_bracketing(w).expect("Lyndon"), &alphabet))
            .collect();
        Self::new(label, alphabet, relators)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rank(&self) -> usize {
        self.alphabet.len()
    }

    pub fn relators(&self) -> &[BracketExpr] {
        &self.relators
    }

    /// Upper bound on the degree of every relator term.
    pub fn max_relator_degree(&self) -> usize {
        self.relators.iter().map(expr_degree_bound).max().unwrap_or(0)
    }

    /// Relators evaluated in `free`. Relators that vanish identically are
    /// dropped with a warning.
    pub fn relator_elements<S: Scalar>(&self, free: &FreeLieAlgebra<S>) -> Result<Vec<FreeLieElement<S>>> {
        if free.alphabet() != &self.alphabet {
            return Err(Error::AlgebraMismatch);
        }
        let exact = FreeLieAlgebra::<S>::new(self.alphabet.clone(), self.max_relator_degree().max(1), free.field())?;
        let mut out = Vec::new();
        for r in &self.relators {
            if r.evaluate(&exact)?.is_zero() {
                log::warn!("relator `{r}` of {} is zero and is dropped", self.label);
                continue;
            }
            out.push(r.evaluate(free)?);
        }
        Ok(out)
    }

    /// Whether every relator is homogeneous (checked over the given field).
    pub fn homogeneity_violation<S: Scalar>(&self, field: &S::Field) -> Result<Option<&BracketExpr>> {
        let exact = FreeLieAlgebra::<S>::new(self.alphabet.clone(), self.max_relator_degree().max(1), field)?;
        for r in &self.relators {
            if !r.evaluate(&exact)?.is_homogeneous() {
                return Ok(Some(r));
            }
        }
        Ok(None)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}", self.alphabet.names().join(", "))?;
        if !self.relators.is_empty() {
            let rels: Vec<String> = self.relators.iter().map(ToString::to_string).collect();
            write!(f, " | {}", rels.join(", "))?;
        }
        f.write_str(">")
    }
}

/// Splits at commas outside brackets and parentheses, returning byte offsets.
pub(crate) fn split_top_level(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' | '(' | '{' => depth += 1,
            ']' | ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

pub(crate) fn tree_expr(t: &BracketTree, alphabet: &Alphabet) -> BracketExpr {
    match t {
        BracketTree::Leaf(l) => BracketExpr::name(alphabet.name(*l)),
        BracketTree::Node(a, b) => BracketExpr::bracket(tree_expr(a, alphabet), tree_expr(b, alphabet)),
    }
}

/// Largest number of generator occurrences in a bracket monomial.
pub fn expr_degree_bound(e: &BracketExpr) -> usize {
    match e {
        BracketExpr::Zero => 0,
        BracketExpr::Name(_) => 1,
        BracketExpr::Bracket(a, b) => expr_degree_bound(a) + expr_degree_bound(b),
        BracketExpr::Add(a, b) | BracketExpr::Sub(a, b) => expr_degree_bound(a).max(expr_degree_bound(b)),
        BracketExpr::Neg(a) | BracketExpr::Scale(_, _, a) => expr_degree_bound(a),
    }
}

/// `F / (R + γ_{c+1}(F))` realized inside `free_nilpotent(rank, c)`.
#[derive(Clone, Debug)]
pub struct NilpotentQuotient<S: Scalar> {
    pub class: usize,
    pub free: FreeLieAlgebra<S>,
    /// `free_nilpotent(rank, c)`, whose coordinates are those of `free`.
    pub ambient: FinDimLie<S>,
    pub relators: Vec<SparseVec<S>>,
    /// Image of `R` in the ambient algebra.
    pub relator_ideal: Subspace<S>,
    pub quotient: Quotient<S>,
    /// Images of the generators in the quotient.
    pub generator_images: Vec<SparseVec<S>>,
}

impl<S: Scalar> NilpotentQuotient<S> {
    pub fn algebra(&self) -> &FinDimLie<S> {
        &self.quotient.algebra
    }

    /// Dimension of each degree of the quotient (entry 0 unused).
    pub fn graded_dims(&self) -> Vec<usize> {
        let mut dims = vec![0; self.class + 1];
        for &i in &self.quotient.complement {
            dims[self.free.word_at(i).len()] += 1;
        }
        dims
    }

    /// Image of an element of the free algebra in the quotient.
    pub fn project(&self, e: &FreeLieElement<S>) -> SparseVec<S> {
        crate::linalg::apply(&self.quotient.projection, &self.free.to_vector(e))
    }
}

pub fn nilpotent_quotient<S: Scalar>(pres: &Presentation, class: usize, field: &S::Field) -> Result<NilpotentQuotient<S>> {
    if class == 0 {
        return Err(Error::EmptyDegree);
    }
    let free = FreeLieAlgebra::<S>::new(pres.alphabet().clone(), class, field)?;
    let ambient = FinDimLie::from_free(&free);
    let relators: Vec<SparseVec<S>> = pres.relator_elements(&free)?.iter().map(|r| free.to_vector(r)).collect();
    let relator_ideal = ambient.ideal_closure(relators.iter().cloned());
    let quotient = ambient.quotient_algebra(&relator_ideal)?;
    let generator_images = (0..pres.rank()).map(|i| quotient.projection[i].clone()).collect();
    Ok(NilpotentQuotient { class, free, ambient, relators, relator_ideal, quotient, generator_images })
}

/// Semi-decision for finite generation (type FP₁).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fp1Report {
    pub presentation: String,
    pub finitely_generated: bool,
    pub generators: usize,
    /// Dimension of the abelianization, i.e. the minimal number of generators.
    pub minimal_generators: usize,
    /// Whether the class-2 quotient has the same abelianization.
    pub stable: bool,
}

pub fn fp1_check<S: Scalar>(pres: &Presentation, field: &S::Field) -> Result<Fp1Report> {
    let abelian_dim = |c: usize| -> Result<usize> {
        let nq = nilpotent_quotient::<S>(pres, c, field)?;
        let l = nq.algebra();
        Ok(l.dim() - l.gamma(2).dim())
    };
    let m1 = abelian_dim(1)?;
    let m2 = abelian_dim(2)?;
    Ok(Fp1Report {
        presentation: pres.label().to_string(),
        finitely_generated: true,
        generators: pres.rank(),
        minimal_generators: m1,
        stable: m1 == m2,
    })
}

/// The relation ideal `R` of a homogeneous presentation and its relation
/// module `R/[R,R]`, degree by degree up to a bound. All subspaces live in
/// degree-`n` Lyndon coordinates of the free algebra.
#[derive(Clone, Debug)]
pub struct RelationModule<S: Scalar> {
    pub free: FreeLieAlgebra<S>,
    /// `ideal[n] = R_n`.
    pub ideal: Vec<Subspace<S>>,
    /// `commutator[n] = [R,R]_n`.
    pub commutator: Vec<Subspace<S>>,
    /// `module[n] = R_n / [R,R]_n`.
    pub module: Vec<QuotientSpace<S>>,
}

impl<S: Scalar> RelationModule<S> {
    /// Requires homogeneous relators, for which every degree is computed
    /// exactly.
    pub fn new(pres: &Presentation, max_degree: usize, field: &S::Field) -> Result<Self> {
        if max_degree == 0 {
            return Err(Error::EmptyDegree);
        }
        if let Some(r) = pres.homogeneity_violation::<S>(field)? {
            return Err(Error::Inhomogeneous(r.to_string()));
        }
        let free = FreeLieAlgebra::<S>::new(pres.alphabet().clone(), max_degree, field)?;
        let relators = pres.relator_elements(&free)?;
        let gens = free.generators();
        let mut ideal = vec![Subspace::new(0, field)];
        for n in 1..=max_degree {
            let mut r_n = Subspace::new(free.dim(n), field);
            for r in relators.iter().filter(|r| r.degree() == n) {
                r_n.insert(free.degree_vector(r, n));
            }
            let prev = &ideal[n - 1];
            let images: Vec<SparseVec<S>> = prev
                .basis()
                .par_iter()
                .flat_map_iter(|v| {
                    let e = free.from_degree_vector(n - 1, v);
                    let free = &free;
                    gens.iter().map(move |g| free.degree_vector(&e.bracket(g).expect("same algebra"), n))
                })
                .collect();
            r_n.extend(images);
            ideal.push(r_n);
        }
        let commutator: Vec<Subspace<S>> = (0..=max_degree)
            .into_par_iter()
            .map(|n| {
                let mut span = Subspace::new(free.dim(n), field);
                for i in 1..n {
                    let j = n - i;
                    if i > j {
                        break;
                    }
                    for (a, u) in ideal[i].basis().iter().enumerate() {
                        let eu = free.from_degree_vector(i, u);
                        let start = if i == j { a + 1 } else { 0 };
                        for v in &ideal[j].basis()[start.min(ideal[j].dim())..] {
                            let ev = free.from_degree_vector(j, v);
                            span.insert(free.degree_vector(&eu.bracket(&ev).expect("same algebra"), n));
                        }
                    }
                }
                span
            })
            .collect();
        let module = ideal.iter().zip(&commutator).map(|(r, c)| QuotientSpace::new(r, c)).collect();
        Ok(RelationModule { free, ideal, commutator, module })
    }

    pub fn max_degree(&self) -> usize {
        self.free.max_degree()
    }

    /// Matrix of the maps `(R/[R,R])_{n-1} → (R/[R,R])_n`, `m ↦ m ∘ x`, one
    /// block of columns per generator `x` (in alphabet order).
    pub fn adjoint_matrix(&self, n: usize) -> Result<SparseMatrix<S>> {
        if n < 2 || n > self.max_degree() {
            return Err(Error::OutOfRange { what: "degree", value: n, max: self.max_degree() });
        }
        let field = self.free.field();
        let source = &self.module[n - 1];
        let target = &self.module[n];
        let mut columns = Vec::new();
        for g in self.free.generators() {
            for rep in source.representatives() {
                let e = self.free.from_degree_vector(n - 1, rep);
                let image = self.free.degree_vector(&e.bracket(&g)?, n);
                columns.push(target.coordinates(&image).expect("R is an ideal"));
            }
        }
        SparseMatrix::from_columns(target.dim(), field, &columns)
    }

    /// Dimension of the part of `(R/[R,R])_n` generated by lower degrees.
    pub fn generated_from_below(&self, n: usize) -> usize {
        if n < 2 {
            return 0;
        }
        self.adjoint_matrix(n).map(|m| m.rank()).unwrap_or(0)
    }
}

/// Degree profile of the relation module, a semi-decision for type FP₂.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fp2Evidence {
    pub presentation: String,
    pub max_degree: usize,
    pub per_degree: Vec<Fp2Row>,
    /// Largest degree that needs new module generators (0 if `R = 0`),
    /// when that degree is below the bound.
    pub generated_by: Option<usize>,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fp2Row {
    pub degree: usize,
    pub module_dim: usize,
    pub from_below: usize,
    pub new_generators: usize,
}

pub fn fp2_evidence<S: Scalar>(pres: &Presentation, max_degree: usize, field: &S::Field) -> Result<Fp2Evidence> {
    let m = RelationModule::<S>::new(pres, max_degree, field)?;
    let per_degree: Vec<Fp2Row> = (1..=max_degree)
        .map(|n| {
            let module_dim = m.module[n].dim();
            let from_below = m.generated_from_below(n);
            Fp2Row { degree: n, module_dim, from_below, new_generators: module_dim - from_below }
        })
        .collect();
    let last = per_degree.iter().filter(|r| r.new_generators > 0).map(|r| r.degree).max().unwrap_or(0);
    let (generated_by, verdict) = if last == max_degree {
        (None, format!("growth persists at {max_degree}"))
    } else {
        (Some(last), format!("generated by degree <= {last} through degree {max_degree}"))
    };
    Ok(Fp2Evidence { presentation: pres.label().to_string(), max_degree, per_degree, generated_by, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::RationalField;
    use crate::Rational;

    fn pres(text: &str) -> Presentation {
        Presentation::parse("L", text).unwrap()
    }

    #[test]
    fn parsing() {
        let p = pres("<x, y | [x,[x,y]], [y,[x,y]]>");
        assert_eq!(p.rank(), 2);
        assert_eq!(p.relators().len(), 2);
        assert_eq!(pres("<x,y>").relators().len(), 0);
        assert_eq!(pres("<x,y | >").relators().len(), 0);
        assert_eq!(Presentation::parse("L", &p.to_string()).unwrap(), p);
        assert!(matches!(Presentation::parse("L", "<x | y>"), Err(Error::UnboundName(_))));
        match Presentation::parse("L", "<x,y | [x,y>") {
            Err(Error::Syntax { column, .. }) => assert_eq!(column, 12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nilpotent_quotient_examples() {
        let nq = nilpotent_quotient::<Rational>(&pres("<x,y>"), 2, &RationalField).unwrap();
        assert_eq!(nq.algebra().dim(), 3);
        let nq = nilpotent_quotient::<Rational>(&pres("<x,y | [x,y]>"), 3, &RationalField).unwrap();
        assert_eq!(nq.algebra().dim(), 2);
        let nq = nilpotent_quotient::<Rational>(&pres("<x,y | [x,[x,y]], [y,[x,y]]>"), 3, &RationalField).unwrap();
        assert_eq!(nq.algebra().dim(), 3);
        assert_eq!(nq.graded_dims(), vec![0, 2, 1, 0]);
        for r in &nq.relators {
            assert!(crate::linalg::apply(&nq.quotient.projection, r).is_zero());
        }
    }

    #[test]
    fn zero_relators_are_dropped() {
        let p = pres("<x,y | [x,x], [x,y] + [y,x]>");
        let free = FreeLieAlgebra::<Rational>::new(p.alphabet().clone(), 3, &RationalField).unwrap();
        assert!(p.relator_elements(&free).unwrap().is_empty());
    }

    #[test]
    fn fp1_examples() {
        let r = fp1_check::<Rational>(&pres("<x,y>"), &RationalField).unwrap();
        assert_eq!((r.minimal_generators, r.stable), (2, true));
        assert_eq!(fp1_check::<Rational>(&pres("<x,y | x>"), &RationalField).unwrap().minimal_generators, 1);
        assert_eq!(fp1_check::<Rational>(&pres("<x,y | [x,y]>"), &RationalField).unwrap().minimal_generators, 2);
    }

    #[test]
    fn fp2_examples() {
        let ev = fp2_evidence::<Rational>(&pres("<x,y | [x,y]>"), 6, &RationalField).unwrap();
        assert_eq!(ev.generated_by, Some(2));
        let dims: Vec<usize> = ev.per_degree.iter().map(|r| r.module_dim).collect();
        assert_eq!(dims, vec![0, 1, 2, 3, 4, 5]);
        let ev = fp2_evidence::<Rational>(&pres("<x>"), 4, &RationalField).unwrap();
        assert_eq!(ev.generated_by, Some(0));
        let g3 = Presentation::free_nilpotent("F", 2, 2).unwrap();
        let ev = fp2_evidence::<Rational>(&g3, 6, &RationalField).unwrap();
        assert_eq!(ev.generated_by, Some(3));
        assert!(matches!(fp2_evidence::<Rational>(&pres("<x,y | x - [x,y]>"), 4, &RationalField), Err(Error::Inhomogeneous(_))));
    }

    #[test]
    fn adjoint_matrix_examples() {
        let m = RelationModule::<Rational>::new(&pres("<x,y | [x,y]>"), 4, &RationalField).unwrap();
        assert_eq!(m.adjoint_matrix(3).unwrap().rank(), 2);
        let m = RelationModule::<Rational>::new(&pres("<x,y>"), 4, &RationalField).unwrap();
        let a = m.adjoint_matrix(3).unwrap();
        assert_eq!((a.rows(), a.cols()), (0, 0));
    }
}
