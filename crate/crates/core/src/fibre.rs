//! Fibre sums `P = {(h₁, h₂) : π₁(h₁) = π₂(h₂)}` of presented algebras over a
//! common quotient, the finitely presented cover `P̃ → P` with abelian
//! kernel, and fibre sums over a split extension.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::findim::FinDimLie;
use crate::free_lie::{Alphabet, BracketExpr, FreeLieAlgebra, Substitution};
use crate::linalg::{apply, SparseMatrix, SparseVec, Subspace};
use crate::presentations::{expr_degree_bound, nilpotent_quotient, NilpotentQuotient, Presentation};
use crate::scalar::Scalar;
use crate::subdirect::{GradedSum, SubdirectSum};

/// Two presented algebras mapping onto a presented quotient. Each generator
/// goes to a generator of the quotient or to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibreSpec {
    pub label: String,
    pub left: Presentation,
    pub right: Presentation,
    pub quotient: Presentation,
    /// Image of each generator of `left`, as an index into the quotient's generators.
    pub left_map: Vec<Option<usize>>,
    pub right_map: Vec<Option<usize>>,
}

impl FibreSpec {
    /// Builds the maps from `name -> image` assignments (`None` for zero).
    /// Unassigned generators go to the quotient generator of the same name
    /// if there is one, and to zero otherwise.
    pub fn new(
        label: &str,
        left: Presentation,
        right: Presentation,
        quotient: Presentation,
        left_assign: &[(String, Option<String>)],
        right_assign: &[(String, Option<String>)],
    ) -> Result<Self> {
        let left_map = resolve_map(&left, &quotient, left_assign)?;
        let right_map = resolve_map(&right, &quotient, right_assign)?;
        let spec = FibreSpec { label: label.to_string(), left, right, quotient, left_map, right_map };
        for (side, map) in [(&spec.left, &spec.left_map), (&spec.right, &spec.right_map)] {
            for q in 0..spec.quotient.rank() {
                if !map.contains(&Some(q)) {
                    return Err(Error::NotSurjective(format!(
                        "no generator of {} maps to {}",
                        side.label(),
                        spec.quotient.alphabet().name(q as u8)
                    )));
                }
            }
        }
        Ok(spec)
    }

    fn section(map: &[Option<usize>], q: usize) -> usize {
        map.iter().position(|m| *m == Some(q)).expect("surjective")
    }
}

fn resolve_map(src: &Presentation, quotient: &Presentation, assign: &[(String, Option<String>)]) -> Result<Vec<Option<usize>>> {
    let mut map: Vec<Option<usize>> =
        src.alphabet().names().iter().map(|n| quotient.alphabet().index_of(n).map(usize::from)).collect();
    let mut seen = Vec::new();
    for (from, to) in assign {
        let i = src.alphabet().index_of(from).ok_or_else(|| Error::UnboundName(from.clone()))? as usize;
        if seen.contains(&i) {
            return Err(Error::DuplicateName(from.clone()));
        }
        seen.push(i);
        map[i] = match to {
            None => None,
            Some(t) => Some(quotient.alphabet().index_of(t).ok_or_else(|| Error::UnboundName(t.clone()))? as usize),
        };
    }
    Ok(map)
}

fn quotient_degrees<S: Scalar>(nq: &NilpotentQuotient<S>) -> Vec<usize> {
    nq.quotient.complement.iter().map(|&i| nq.free.word_at(i).len()).collect()
}

/// Dimension per degree of a subspace of a nilpotent quotient, read off
/// pivots (quotient coordinates are ordered by degree).
fn nq_profile<S: Scalar>(nq: &NilpotentQuotient<S>, sub: &Subspace<S>) -> Vec<usize> {
    let degrees = quotient_degrees(nq);
    let mut dims = vec![0; nq.class + 1];
    for &p in sub.pivots() {
        dims[degrees[p]] += 1;
    }
    dims
}

/// Images of the quotient basis of `src` under the homomorphism into
/// `target` given on generators. Fails if a relator of `src` survives.
fn induced_map<S: Scalar>(
    src: &NilpotentQuotient<S>,
    target: &FinDimLie<S>,
    generator_images: &[SparseVec<S>],
) -> Result<Vec<SparseVec<S>>> {
    let images = target.free_hom(&src.free, generator_images);
    for r in &src.relators {
        let image = apply(&images, r);
        if !image.is_zero() {
            return Err(Error::MapsDisagree(src.free.from_vector(r).render()));
        }
    }
    Ok(src.quotient.complement.iter().map(|&i| images[i].clone()).collect())
}

/// Per-degree dimensions of the two constructions of a fibre sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibreRow {
    pub degree: usize,
    pub generated: usize,
    pub kernel: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibreReport {
    pub label: String,
    pub class: usize,
    pub per_degree: Vec<FibreRow>,
    /// The generated subalgebra and the kernel of `π₁ − π₂` coincide.
    pub agree: bool,
    pub subdirect: bool,
    /// Per-degree dimensions of `P ∩ L₁` and `P ∩ L₂`.
    pub left_intersection: Vec<usize>,
    pub right_intersection: Vec<usize>,
    pub verdict: String,
}

/// A fibre sum computed in the class-`c` quotients of both sides.
#[derive(Clone, Debug)]
pub struct FibreSum<S: Scalar> {
    pub label: String,
    pub left: NilpotentQuotient<S>,
    pub right: NilpotentQuotient<S>,
    pub quotient: NilpotentQuotient<S>,
    /// `π₁` and `π₂` on the quotient bases.
    pub left_projection: Vec<SparseVec<S>>,
    pub right_projection: Vec<SparseVec<S>>,
    /// Subalgebra generated by lifts of the quotient's generators and the
    /// generators of both kernels.
    pub generated: SubdirectSum<S>,
    /// `ker(π₁ − π₂)` computed directly.
    pub kernel: Subspace<S>,
}

pub fn fibre_sum<S: Scalar>(spec: &FibreSpec, class: usize, field: &S::Field) -> Result<FibreSum<S>> {
    let left = nilpotent_quotient::<S>(&spec.left, class, field)?;
    let right = nilpotent_quotient::<S>(&spec.right, class, field)?;
    let quotient = nilpotent_quotient::<S>(&spec.quotient, class, field)?;
    let qalg = quotient.algebra();
    let images = |map: &[Option<usize>]| -> Vec<SparseVec<S>> {
        map.iter().map(|m| m.map_or_else(SparseVec::zero, |q| quotient.generator_images[q].clone())).collect()
    };
    let left_projection = induced_map(&left, qalg, &images(&spec.left_map))?;
    let right_projection = induced_map(&right, qalg, &images(&spec.right_map))?;

    let sum = GradedSum::new(vec![
        (spec.left.label().to_string(), left.algebra().clone(), quotient_degrees(&left)),
        (spec.right.label().to_string(), right.algebra().clone(), quotient_degrees(&right)),
    ])?;

    let columns: Vec<SparseVec<S>> = (0..sum.dim())
        .map(|k| match sum.origin(k) {
            (0, j) => left_projection[j].clone(),
            (_, j) => right_projection[j].neg(),
        })
        .collect();
    let kernel = sum.ambient().span(SparseMatrix::from_columns(qalg.dim(), field, &columns)?.kernel_basis());

    let mut generators = Vec::new();
    for q in 0..spec.quotient.rank() {
        let l = &left.generator_images[FibreSpec::section(&spec.left_map, q)];
        let r = &right.generator_images[FibreSpec::section(&spec.right_map, q)];
        generators.push(sum.embed(0, l).add(&sum.embed(1, r)));
    }
    for (side, nq, map) in [(0, &left, &spec.left_map), (1, &right, &spec.right_map)] {
        for (g, m) in map.iter().enumerate() {
            let v = match m {
                None => nq.generator_images[g].clone(),
                Some(q) => nq.generator_images[g].sub(&nq.generator_images[FibreSpec::section(map, *q)]),
            };
            if !v.is_zero() {
                generators.push(sum.embed(side, &v));
            }
        }
        let images: HashMap<String, SparseVec<S>> = (0..spec.quotient.rank())
            .map(|q| {
                let name = spec.quotient.alphabet().name(q as u8).to_string();
                (name, nq.generator_images[FibreSpec::section(map, q)].clone())
            })
            .collect();
        let subst = Substitution { algebra: nq.algebra(), images };
        for s in spec.quotient.relators() {
            generators.push(sum.embed(side, &s.evaluate(&subst)?));
        }
    }
    let generated = SubdirectSum::from_sum(class, sum, vec![None, None], generators);
    Ok(FibreSum { label: spec.label.clone(), left, right, quotient, left_projection, right_projection, generated, kernel })
}

impl<S: Scalar> FibreSum<S> {
    pub fn class(&self) -> usize {
        self.generated.class()
    }

    pub fn agree(&self) -> bool {
        self.generated.span().is_subspace_of(&self.kernel) && self.kernel.is_subspace_of(self.generated.span())
    }

    pub fn report(&self) -> FibreReport {
        let sum = self.generated.sum();
        let generated = sum.profile(self.generated.span());
        let kernel = sum.profile(&self.kernel);
        let target = sum.target_profile(&[0, 1]);
        let per_degree = (1..generated.len())
            .map(|d| FibreRow { degree: d, generated: generated[d], kernel: kernel[d], target: target[d] })
            .collect();
        let intersection = |i: usize| -> Vec<usize> {
            let r = self.generated.intersect_factor(i).expect("two factors");
            r.per_degree.iter().map(|row| row.dim).collect()
        };
        let agree = self.agree();
        let subdirect = self.generated.subdirect_violation().is_none();
        let verdict = match (agree, subdirect) {
            (true, true) => format!("constructions agree up to class {}", self.class()),
            (false, _) => "generated subalgebra differs from the kernel".to_string(),
            (true, false) => "a coordinate projection is not surjective".to_string(),
        };
        FibreReport {
            label: self.label.clone(),
            class: self.class(),
            per_degree,
            agree,
            subdirect,
            left_intersection: intersection(0),
            right_intersection: intersection(1),
            verdict,
        }
    }
}

/// The cover `P̃ = ⟨X ∪ A₀ | R₂ ∪ R₃ ∪ R₄⟩` of the fibre sum of
/// `L₁ = ⟨X ∪ A₀ | R₁ ∪ R₂ ∪ R₃⟩ → Q = ⟨X | r_i⟩` and the free algebra on `X`.
///
/// `R₁` holds the relators `b_i = r_i(x) − w_i(a)`, `R₂` the relators
/// `[a_j, x] − v_{j,x}(a)`, `R₃` relators in `A₀` alone; `R₄ = {[b_i, a_j]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TildePresentation {
    pub source: Presentation,
    pub x: Vec<String>,
    pub a: Vec<String>,
    pub r1: Vec<BracketExpr>,
    /// `(a_j, x, v_{j,x})` for each relator of `R₂`, rendered.
    pub r2_terms: Vec<(String, String, String)>,
    pub r2: Vec<BracketExpr>,
    pub r3: Vec<BracketExpr>,
    pub r4: Vec<BracketExpr>,
    /// `r_i(x)` and `w_i(a)` for each relator of `R₁`, rendered.
    pub r1_terms: Vec<(String, String)>,
}

impl TildePresentation {
    /// Sorts the relators of `source` into the three families, given the
    /// generator names forming `A₀`; the remaining generators form `X`.
    pub fn build<S: Scalar>(source: &Presentation, a_names: &[String], field: &S::Field) -> Result<Self> {
        let alphabet = source.alphabet();
        for a in a_names {
            alphabet.index_of(a).ok_or_else(|| Error::UnboundName(a.clone()))?;
        }
        let is_a: Vec<bool> = alphabet.names().iter().map(|n| a_names.contains(n)).collect();
        let x: Vec<String> = alphabet.names().iter().zip(&is_a).filter(|(_, &a)| !a).map(|(n, _)| n.clone()).collect();
        let a: Vec<String> = alphabet.names().iter().zip(&is_a).filter(|(_, &a)| a).map(|(n, _)| n.clone()).collect();
        let degree = source.relators().iter().map(expr_degree_bound).max().unwrap_or(1).max(2);
        let free = FreeLieAlgebra::<S>::new(alphabet.clone(), degree, field)?;

        let mut out = TildePresentation {
            source: source.clone(),
            x,
            a,
            r1: Vec::new(),
            r2_terms: Vec::new(),
            r2: Vec::new(),
            r3: Vec::new(),
            r4: Vec::new(),
            r1_terms: Vec::new(),
        };
        let mut covered = Vec::new();
        for expr in source.relators() {
            let e = expr.evaluate(&free)?;
            let part = |keep: &dyn Fn(&[u8]) -> bool| {
                free.from_terms(e.terms().filter(|(w, _)| keep(w)).map(|(w, c)| (w.clone(), c.clone())))
            };
            let pure_x = part(&|w| w.iter().all(|&l| !is_a[l as usize]))?;
            let pure_a = part(&|w| w.iter().all(|&l| is_a[l as usize]))?;
            let mixed = part(&|w| w.iter().any(|&l| is_a[l as usize]) && w.iter().any(|&l| !is_a[l as usize]))?;
            if mixed.is_zero() {
                if pure_x.is_zero() {
                    if !pure_a.is_zero() {
                        out.r3.push(expr.clone());
                    }
                } else {
                    out.r1_terms.push((pure_x.render(), pure_a.neg().render()));
                    out.r1.push(expr.clone());
                }
                continue;
            }
            let shape = || Error::MalformedPresentation(format!("`{expr}` is not of the form [a, x] - v(a)"));
            let mut terms = mixed.terms();
            let (w, c) = terms.next().expect("nonzero");
            if terms.next().is_some() || w.len() != 2 || !pure_x.is_zero() {
                return Err(shape());
            }
            // The Lyndon word of length two is `[w0, w1]` with `w0 < w1`.
            let (aj, xl, coeff) = if is_a[w[0] as usize] { (w[0], w[1], c.clone()) } else { (w[1], w[0], c.neg_ref()) };
            let v = pure_a.scale(&coeff.inv().expect("nonzero")).neg();
            covered.push((aj, xl));
            out.r2_terms.push((alphabet.name(aj).to_string(), alphabet.name(xl).to_string(), v.render()));
            out.r2.push(expr.clone());
        }
        for aj in &out.a {
            let aj = alphabet.index_of(aj).expect("checked");
            for xl in out.x.iter().map(|n| alphabet.index_of(n).expect("checked")) {
                if !covered.contains(&(aj, xl)) {
                    return Err(Error::MalformedPresentation(format!(
                        "no relator of the form [{}, {}] - v(a)",
                        alphabet.name(aj),
                        alphabet.name(xl)
                    )));
                }
            }
        }
        for b in &out.r1 {
            for aj in &out.a {
                out.r4.push(BracketExpr::bracket(b.clone(), BracketExpr::name(aj)));
            }
        }
        Ok(out)
    }

    /// `P̃` itself.
    pub fn presentation(&self) -> Presentation {
        let relators = self.r2.iter().chain(&self.r3).chain(&self.r4).cloned().collect();
        Presentation::new(&format!("{}~", self.source.label()), self.source.alphabet().clone(), relators)
            .expect("names come from the source alphabet")
    }

    /// The quotient `Q = ⟨X | r_i⟩`.
    pub fn quotient(&self) -> Result<Presentation> {
        let alphabet = Alphabet::new(self.x.iter().cloned())?;
        let relators = self.r1_terms.iter().map(|(r, _)| BracketExpr::parse(r)).collect::<Result<_>>()?;
        Presentation::new(&format!("{}/A", self.source.label()), alphabet, relators)
    }

    /// The free algebra on `X`.
    pub fn free_side(&self) -> Result<Presentation> {
        Ok(Presentation::free("F", Alphabet::new(self.x.iter().cloned())?))
    }

    /// `δ` on generators: `x ↦ (x, x)`, `a ↦ (a, 0)`.
    pub fn delta(&self) -> Vec<(String, String)> {
        self.source
            .alphabet()
            .names()
            .iter()
            .map(|n| {
                let image = if self.a.contains(n) { format!("({n}, 0)") } else { format!("({n}, {n})") };
                (n.clone(), image)
            })
            .collect()
    }
}

/// Per-degree dimensions of `Δ = ker δ` and `Ã ∩ B̃`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TildeRow {
    pub degree: usize,
    pub delta: usize,
    pub intersection: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TildeReport {
    pub presentation: String,
    pub class: usize,
    pub relators_killed: bool,
    pub commutator_vanishes: bool,
    pub delta_in_intersection: bool,
    pub intersection_in_delta: bool,
    pub delta_abelian: bool,
    pub per_degree: Vec<TildeRow>,
    /// `dim Ã/[Ã,Ã]` and `dim A/[A,A]` in the truncation; informational.
    pub tilde_a_abelianization: usize,
    pub a_abelianization: usize,
    pub holds: bool,
    pub verdict: String,
}

/// Checks inside the class-`c` quotient of `P̃` that `[Ã, B̃] = 0`, that
/// `Δ = ker δ` equals `Ã ∩ B̃` (each inclusion separately) and that `Δ` is
/// abelian, where `Ã` and `B̃` are the ideals generated by `A₀` and the `b_i`.
pub fn verify_delta_abelian<S: Scalar>(tp: &TildePresentation, class: usize, field: &S::Field) -> Result<TildeReport> {
    let tilde = tp.presentation();
    let nq = nilpotent_quotient::<S>(&tilde, class, field)?;
    let left = nilpotent_quotient::<S>(&tp.source, class, field)?;
    let right = nilpotent_quotient::<S>(&tp.free_side()?, class, field)?;
    let sum = GradedSum::new(vec![
        ("L1".to_string(), left.algebra().clone(), quotient_degrees(&left)),
        ("F".to_string(), right.algebra().clone(), quotient_degrees(&right)),
    ])?;
    let alphabet = tp.source.alphabet();
    let generator_images: Vec<SparseVec<S>> = alphabet
        .names()
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let l = sum.embed(0, &left.generator_images[i]);
            match tp.x.iter().position(|x| x == n) {
                Some(k) => l.add(&sum.embed(1, &right.generator_images[k])),
                None => l,
            }
        })
        .collect();
    let free_images = sum.ambient().free_hom(&nq.free, &generator_images);
    let relators_killed = nq.relators.iter().all(|r| apply(&free_images, r).is_zero());
    let delta: Vec<SparseVec<S>> = nq.quotient.complement.iter().map(|&i| free_images[i].clone()).collect();

    let p = nq.algebra();
    let kernel = p.span(SparseMatrix::from_columns(sum.dim(), field, &delta)?.kernel_basis());
    let a_gens = tp.a.iter().map(|n| nq.generator_images[alphabet.index_of(n).expect("checked") as usize].clone());
    let a_tilde = p.ideal_closure(a_gens);
    let b_gens = tp.r1.iter().map(|b| Ok(nq.project(&b.evaluate(&nq.free)?))).collect::<Result<Vec<_>>>()?;
    let b_tilde = p.ideal_closure(b_gens);
    let meet = a_tilde.intersect(&b_tilde);

    let commutator_vanishes = p.bracket_subspaces(&a_tilde, &b_tilde).is_zero();
    let delta_in_intersection = kernel.is_subspace_of(&meet);
    let intersection_in_delta = meet.is_subspace_of(&kernel);
    let delta_abelian = p.bracket_subspaces(&kernel, &kernel).is_zero();

    let dk = nq_profile(&nq, &kernel);
    let dm = nq_profile(&nq, &meet);
    let per_degree = (1..=class).map(|d| TildeRow { degree: d, delta: dk[d], intersection: dm[d] }).collect();

    let l1 = left.algebra();
    let a_in_l1 =
        l1.ideal_closure(tp.a.iter().map(|n| left.generator_images[alphabet.index_of(n).expect("checked") as usize].clone()));
    let tilde_a_abelianization = a_tilde.dim() - p.bracket_subspaces(&a_tilde, &a_tilde).dim();
    let a_abelianization = a_in_l1.dim() - l1.bracket_subspaces(&a_in_l1, &a_in_l1).dim();

    let holds = relators_killed && commutator_vanishes && delta_in_intersection && intersection_in_delta && delta_abelian;
    let verdict = if holds {
        format!("Δ = Ã ∩ B̃ is abelian up to class {class}")
    } else {
        let failed: Vec<&str> = [
            (relators_killed, "δ does not kill the relators"),
            (commutator_vanishes, "[Ã, B̃] ≠ 0"),
            (delta_in_intersection, "Δ ⊄ Ã ∩ B̃"),
            (intersection_in_delta, "Ã ∩ B̃ ⊄ Δ"),
            (delta_abelian, "[Δ, Δ] ≠ 0"),
        ]
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, m)| *m)
        .collect();
        failed.join("; ")
    };
    Ok(TildeReport {
        presentation: tilde.to_string(),
        class,
        relators_killed,
        commutator_vanishes,
        delta_in_intersection,
        intersection_in_delta,
        delta_abelian,
        per_degree,
        tilde_a_abelianization,
        a_abelianization,
        holds,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitFibreReport {
    pub dim: usize,
    pub b_is_ideal: bool,
    pub embedding_is_hom: bool,
    /// `P / B` is isomorphic to `L₁` through the embedded copy.
    pub quotient_matches: bool,
    /// `ψ(b, l) = (l, (b, π l))` is an injective homomorphism into
    /// `L₁ ⊕ (B ⋊ Q)` with image `{(h₁, h₂) : π₁ h₁ = π₂ h₂}`.
    pub psi_is_hom: bool,
    pub psi_injective: bool,
    pub image_is_fibre: bool,
    pub holds: bool,
}

/// The fibre sum of `π: L₁ → Q` and `B ⋊ Q → Q`, built as `B ⋊ L₁` with `L₁`
/// acting through `π`.
#[derive(Clone, Debug)]
pub struct SplitFibre<S: Scalar> {
    pub algebra: FinDimLie<S>,
    /// Images of the basis of `L₁` in `algebra`.
    pub embedding: Vec<SparseVec<S>>,
    pub report: SplitFibreReport,
}

/// `action[q][b]` is `q · b` for basis elements of `Q` and `B`;
/// `projection[l]` is `π` of basis element `l` of `L₁`.
pub fn split_fibre<S: Scalar>(
    b: &FinDimLie<S>,
    q: &FinDimLie<S>,
    action: &[Vec<SparseVec<S>>],
    l1: &FinDimLie<S>,
    projection: &[SparseVec<S>],
) -> Result<SplitFibre<S>> {
    if projection.len() != l1.dim() {
        return Err(Error::DimensionMismatch { expected: l1.dim(), found: projection.len() });
    }
    if let Some((i, j)) = l1.homomorphism_violation(q, projection) {
        return Err(Error::MapsDisagree(format!("[{}, {}]", l1.names()[i], l1.names()[j])));
    }
    if q.span(projection.iter().cloned()).dim() != q.dim() {
        return Err(Error::NotSurjective(format!("image of {} has dimension below {}", "L1", q.dim())));
    }
    // Validates the action itself.
    let l2 = FinDimLie::semidirect_sum(b, q, action)?;
    let pulled: Vec<Vec<SparseVec<S>>> = projection
        .iter()
        .map(|p| {
            (0..b.dim()).map(|k| p.iter().fold(SparseVec::zero(), |acc, (qi, c)| acc.add(&action[qi][k].scale(c)))).collect()
        })
        .collect();
    let p = FinDimLie::semidirect_sum(b, l1, &pulled)?;
    let (nb, nl, nq) = (b.dim(), l1.dim(), q.dim());
    let embedding: Vec<SparseVec<S>> = (0..nl).map(|i| SparseVec::unit(nb + i, p.field())).collect();

    let b_sub = p.span((0..nb).map(|i| p.basis_vector(i)));
    let b_is_ideal = p.is_ideal(&b_sub);
    let embedding_is_hom = l1.homomorphism_violation(&p, &embedding).is_none();
    let quotient_matches = match p.quotient_algebra(&b_sub) {
        Ok(quot) => {
            let images: Vec<SparseVec<S>> = embedding.iter().map(|e| apply(&quot.projection, e)).collect();
            quot.algebra.dim() == nl
                && l1.homomorphism_violation(&quot.algebra, &images).is_none()
                && quot.algebra.span(images).dim() == nl
        }
        Err(_) => false,
    };

    // Target L₁ ⊕ L₂ with L₂ = B ⋊ Q, coordinates: L₁ first, then B, then Q.
    let target = l1.direct_sum(&l2)?;
    let psi: Vec<SparseVec<S>> = (0..nb)
        .map(|i| SparseVec::unit(nl + i, p.field()))
        .chain((0..nl).map(|l| SparseVec::unit(l, p.field()).add(&projection[l].shift(nl + nb))))
        .collect();
    let psi_is_hom = p.homomorphism_violation(&target, &psi).is_none();
    let image = target.span(psi.iter().cloned());
    let psi_injective = image.dim() == p.dim();
    let columns: Vec<SparseVec<S>> = (0..target.dim())
        .map(|k| {
            if k < nl {
                projection[k].clone()
            } else if k < nl + nb {
                SparseVec::zero()
            } else {
                SparseVec::unit(k - nl - nb, p.field()).neg()
            }
        })
        .collect();
    let fibre = target.span(SparseMatrix::from_columns(nq, p.field(), &columns)?.kernel_basis());
    let image_is_fibre = image.is_subspace_of(&fibre) && fibre.is_subspace_of(&image);
    let holds = b_is_ideal && embedding_is_hom && quotient_matches && psi_is_hom && psi_injective && image_is_fibre;
    let report = SplitFibreReport {
        dim: p.dim(),
        b_is_ideal,
        embedding_is_hom,
        quotient_matches,
        psi_is_hom,
        psi_injective,
        image_is_fibre,
        holds,
    };
    Ok(SplitFibre { algebra: p, embedding, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::RationalField;
    use crate::Rational;

    fn pres(label: &str, text: &str) -> Presentation {
        Presentation::parse(label, text).unwrap()
    }

    fn heisenberg_fibre() -> FibreSpec {
        FibreSpec::new(
            "P",
            pres("H", "<x, y, z | [x,y] - z, [x,z], [y,z]>"),
            pres("F", "<x, y>"),
            pres("Q", "<x, y | [x,y]>"),
            &[],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn zero_quotient_gives_direct_sum() {
        let to_q = |g: &str| vec![(g.to_string(), Some("q".to_string()))];
        let spec =
            FibreSpec::new("P", pres("A", "<x, y | [x,y]>"), pres("B", "<u>"), pres("Q", "<q | q>"), &to_q("x"), &to_q("u"))
                .unwrap();
        let f = fibre_sum::<Rational>(&spec, 3, &RationalField).unwrap();
        let r = f.report();
        assert!(r.agree && r.subdirect);
        assert!(r.per_degree.iter().all(|row| row.generated == row.target));
    }

    #[test]
    fn identity_maps_give_diagonal() {
        let spec = FibreSpec::new("P", pres("F", "<x, y>"), pres("G", "<x, y>"), pres("Q", "<x, y>"), &[], &[]).unwrap();
        let r = fibre_sum::<Rational>(&spec, 3, &RationalField).unwrap().report();
        assert!(r.agree);
        let dims: Vec<usize> = r.per_degree.iter().map(|row| row.generated).collect();
        assert_eq!(dims, vec![2, 1, 2]);
        assert_eq!(r.left_intersection, vec![0, 0, 0]);
    }

    #[test]
    fn heisenberg_over_abelian() {
        let f = fibre_sum::<Rational>(&heisenberg_fibre(), 3, &RationalField).unwrap();
        let r = f.report();
        assert!(r.agree && r.subdirect, "{r:?}");
        // P ∩ H is the centre, P ∩ F is γ₂(F).
        let h = f.left.algebra();
        let left = f.generated.intersect_factor(0).unwrap();
        let centre: Subspace<Rational> =
            f.generated.sum().ambient().span(h.center().basis().iter().map(|v| f.generated.sum().embed(0, v)));
        assert!(left.subspace.is_subspace_of(&centre) && centre.is_subspace_of(&left.subspace));
        assert_eq!(r.right_intersection, vec![0, 1, 2]);
    }

    #[test]
    fn maps_must_agree_on_relators() {
        let spec = FibreSpec::new("P", pres("F", "<x, y>"), pres("G", "<x, y | x>"), pres("Q", "<x, y>"), &[], &[]).unwrap();
        assert!(matches!(fibre_sum::<Rational>(&spec, 2, &RationalField), Err(Error::MapsDisagree(_))));
    }

    #[test]
    fn unmapped_quotient_generator() {
        let r = FibreSpec::new("P", pres("F", "<x>"), pres("G", "<x, y>"), pres("Q", "<x, y>"), &[], &[]);
        assert!(matches!(r, Err(Error::NotSurjective(_))));
    }

    fn heisenberg_tilde() -> TildePresentation {
        let h = pres("H", "<x, y, z | [x,y] - z, [z,x], [z,y]>");
        TildePresentation::build::<Rational>(&h, &["z".to_string()], &RationalField).unwrap()
    }

    #[test]
    fn heisenberg_tilde_families() {
        let tp = heisenberg_tilde();
        let shown = |v: &[BracketExpr]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        assert_eq!(shown(&tp.r2), vec!["[z,x]", "[z,y]"]);
        assert!(tp.r3.is_empty());
        assert_eq!(tp.r4, vec![BracketExpr::parse("[[x,y] - z, z]").unwrap()]);
        assert_eq!(tp.r1_terms, vec![("[x,y]".to_string(), "z".to_string())]);
        assert_eq!(tp.r2_terms[0], ("z".to_string(), "x".to_string(), "0".to_string()));
    }

    #[test]
    fn heisenberg_tilde_verdicts() {
        for c in 1..=4 {
            let r = verify_delta_abelian::<Rational>(&heisenberg_tilde(), c, &RationalField).unwrap();
            assert!(r.holds, "class {c}: {r:?}");
        }
    }

    #[test]
    fn empty_a0_is_free() {
        let q = pres("Q", "<x, y | [x,[x,y]]>");
        let tp = TildePresentation::build::<Rational>(&q, &[], &RationalField).unwrap();
        assert!(tp.r2.is_empty() && tp.r3.is_empty() && tp.r4.is_empty());
        assert!(tp.presentation().relators().is_empty());
        let r = verify_delta_abelian::<Rational>(&tp, 3, &RationalField).unwrap();
        assert!(r.holds);
        assert!(r.per_degree.iter().all(|row| row.delta == 0));
    }

    #[test]
    fn malformed_mixed_relator() {
        let h = pres("H", "<x, y, z | [x,[x,z]], [z,x], [z,y]>");
        assert!(matches!(
            TildePresentation::build::<Rational>(&h, &["z".to_string()], &RationalField),
            Err(Error::MalformedPresentation(_))
        ));
        let h = pres("H", "<x, y, z | [z,x]>");
        assert!(matches!(
            TildePresentation::build::<Rational>(&h, &["z".to_string()], &RationalField),
            Err(Error::MalformedPresentation(_))
        ));
    }

    #[test]
    fn split_fibre_scaling_action() {
        let f = &RationalField;
        let b = FinDimLie::<Rational>::abelian(1, f);
        let q = FinDimLie::<Rational>::abelian(1, f);
        let action = vec![vec![SparseVec::unit(0, f)]];
        let h = FinDimLie::<Rational>::heisenberg(f);
        let projection = vec![SparseVec::unit(0, f), SparseVec::zero(), SparseVec::zero()];
        let s = split_fibre(&b, &q, &action, &h, &projection).unwrap();
        assert_eq!(s.report.dim, 4);
        assert!(s.report.holds, "{:?}", s.report);
    }

    #[test]
    fn split_fibre_degenerate_cases() {
        let f = &RationalField;
        let h = FinDimLie::<Rational>::heisenberg(f);
        let zero = FinDimLie::<Rational>::abelian(0, f);
        let s = split_fibre(&zero, &zero, &[], &h, &[SparseVec::zero(), SparseVec::zero(), SparseVec::zero()]).unwrap();
        assert_eq!(s.report.dim, 3);
        assert!(s.report.holds);
        let b = FinDimLie::<Rational>::abelian(2, f);
        let s = split_fibre(&b, &zero, &[], &h, &[SparseVec::zero(), SparseVec::zero(), SparseVec::zero()]).unwrap();
        assert_eq!(s.report.dim, 5);
        assert!(s.algebra.center().dim() == 3 && s.report.holds);
    }
}
