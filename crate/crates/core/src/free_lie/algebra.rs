use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::free_lie::assoc::{render_terms, AssocPoly};
use crate::free_lie::words::{
    bracketing_unchecked, is_lyndon, lyndon_words, standard_factorization, Alphabet, BracketTree, Word,
};
use crate::linalg::SparseVec;
use crate::scalar::Scalar;

/// Free Lie algebra on a finite alphabet, truncated at a fixed degree.
///
/// Elements are combinations of Lyndon words, each standing for its
/// standard bracketing. Brackets are computed by expanding into the free
/// associative algebra and reading the result back by triangular
/// elimination; anything beyond the truncation degree is dropped.
///
/// Cloning is cheap: the handle shares its basis tables and caches.
#[derive(Clone)]
pub struct FreeLieAlgebra<S: Scalar> {
    inner: Arc<Inner<S>>,
}

type Terms<S> = Arc<Vec<(Word, S)>>;

struct Inner<S: Scalar> {
    alphabet: Alphabet,
    max_degree: usize,
    field: S::Field,
    /// `basis[n]` lists the Lyndon words of length `n` in lexicographic order.
    basis: Vec<Vec<Word>>,
    index: HashMap<Word, usize>,
    /// Offset of degree `n` in the flattened coordinate vector.
    offsets: Vec<usize>,
    expansions: RwLock<HashMap<Word, Arc<AssocPoly<S>>>>,
    brackets: RwLock<HashMap<(Word, Word), Terms<S>>>,
}

/// Element of a [`FreeLieAlgebra`].
#[derive(Clone)]
pub struct FreeLieElement<S: Scalar> {
    algebra: FreeLieAlgebra<S>,
    coords: BTreeMap<Word, S>,
}

impl<S: Scalar> FreeLieAlgebra<S> {
    pub fn new(alphabet: Alphabet, max_degree: usize, field: &S::Field) -> Result<Self> {
        if max_degree == 0 {
            return Err(Error::EmptyDegree);
        }
        let mut basis = vec![Vec::new()];
        let mut index = HashMap::new();
        let mut offsets = vec![0, 0];
        for n in 1..=max_degree {
            let words = lyndon_words(alphabet.len(), n)?;
            for (i, w) in words.iter().enumerate() {
                index.insert(w.clone(), i);
            }
            offsets.push(offsets[n] + words.len());
            basis.push(words);
        }
        Ok(FreeLieAlgebra {
            inner: Arc::new(Inner {
                alphabet,
                max_degree,
                field: field.clone(),
                basis,
                index,
                offsets,
                expansions: RwLock::new(HashMap::new()),
                brackets: RwLock::new(HashMap::new()),
            }),
        })
    }

    /// Free Lie algebra on `rank` generators named `x, y, z` (or `x1..xn`
    /// beyond three).
    pub fn with_rank(rank: usize, max_degree: usize, field: &S::Field) -> Result<Self> {
        Self::new(default_alphabet(rank)?, max_degree, field)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.inner.alphabet
    }

    pub fn rank(&self) -> usize {
        self.inner.alphabet.len()
    }

    pub fn max_degree(&self) -> usize {
        self.inner.max_degree
    }

    pub fn field(&self) -> &S::Field {
        &self.inner.field
    }

    pub fn same_algebra(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.alphabet == other.inner.alphabet
                && self.inner.max_degree == other.inner.max_degree
                && self.inner.field == other.inner.field)
    }

    /// Lyndon words of length `n` (empty beyond the truncation degree).
    pub fn basis(&self, n: usize) -> &[Word] {
        self.inner.basis.get(n).map_or(&[], Vec::as_slice)
    }

    pub fn dim(&self, n: usize) -> usize {
        self.basis(n).len()
    }

    /// Dimension of the whole truncated algebra.
    pub fn total_dim(&self) -> usize {
        self.inner.offsets[self.inner.max_degree + 1]
    }

    /// Position of a Lyndon word in the flattened coordinates.
    pub fn flat_index(&self, w: &[u8]) -> Option<usize> {
        self.inner.index.get(w).map(|i| self.inner.offsets[w.len()] + i)
    }

    /// Position of a Lyndon word within its degree.
    pub fn index_in_degree(&self, w: &[u8]) -> Option<usize> {
        self.inner.index.get(w).copied()
    }

    /// Lyndon word at a flattened position.
    pub fn word_at(&self, flat: usize) -> &Word {
        let n = self.inner.offsets.partition_point(|&o| o <= flat) - 1;
        &self.inner.basis[n][flat - self.inner.offsets[n]]
    }

    pub fn zero(&self) -> FreeLieElement<S> {
        FreeLieElement { algebra: self.clone(), coords: BTreeMap::new() }
    }

    pub fn generator(&self, letter: u8) -> FreeLieElement<S> {
        self.basis_element_unchecked(vec![letter])
    }

    pub fn generator_named(&self, name: &str) -> Result<FreeLieElement<S>> {
        self.alphabet().index_of(name).map(|l| self.generator(l)).ok_or_else(|| Error::UnboundName(name.to_string()))
    }

    pub fn generators(&self) -> Vec<FreeLieElement<S>> {
        (0..self.rank() as u8).map(|l| self.generator(l)).collect()
    }

    /// The basis element attached to a Lyndon word.
    pub fn basis_element(&self, w: &[u8]) -> Result<FreeLieElement<S>> {
        if !is_lyndon(w) || w.iter().any(|&l| l as usize >= self.rank()) {
            return Err(Error::NotLyndon(self.alphabet().render_word(w)));
        }
        if w.len() > self.max_degree() {
            return Ok(self.zero());
        }
        Ok(self.basis_element_unchecked(w.to_vec()))
    }

    fn basis_element_unchecked(&self, w: Word) -> FreeLieElement<S> {
        let mut coords = BTreeMap::new();
        coords.insert(w, S::one(self.field()));
        FreeLieElement { algebra: self.clone(), coords }
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, S)>>(&self, terms: I) -> Result<FreeLieElement<S>> {
        let mut e = self.zero();
        for (w, c) in terms {
            if !is_lyndon(&w) {
                return Err(Error::NotLyndon(self.alphabet().render_word(&w)));
            }
            if w.len() <= self.max_degree() {
                e.add_term(w, c);
            }
        }
        Ok(e)
    }

    /// Associative expansion of the standard bracketing of a Lyndon word.
    pub fn expansion(&self, w: &[u8]) -> Arc<AssocPoly<S>> {
        if let Some(p) = self.inner.expansions.read().unwrap().get(w) {
            return p.clone();
        }
        let p = if w.len() == 1 {
            AssocPoly::letter(w[0], self.field())
        } else {
            let (u, v) = standard_factorization(w);
            let (pu, pv) = (self.expansion(u), self.expansion(v));
            pu.commutator(&pv, usize::MAX)
        };
        let p = Arc::new(p);
        self.inner.expansions.write().unwrap().insert(w.to_vec(), p.clone());
        p
    }

    pub fn to_associative(&self, e: &FreeLieElement<S>) -> AssocPoly<S> {
        let mut p = AssocPoly::zero();
        for (w, c) in &e.coords {
            p.add_scaled(c, &self.expansion(w));
        }
        p
    }

    /// Inverse of [`to_associative`](Self::to_associative) on Lie elements.
    ///
    /// The expansion of a Lyndon word `w` is `w` plus lexicographically larger
    /// words of the same length, so repeatedly cancelling the smallest word
    /// recovers the coordinates. Returns `None` if `p` is not a Lie element
    /// (including a nonzero constant term or words past the truncation).
    pub fn from_associative_lie(&self, p: &AssocPoly<S>) -> Option<FreeLieElement<S>> {
        let mut e = self.zero();
        for (n, terms) in p.homogeneous_parts() {
            if n == 0 || n > self.max_degree() {
                return None;
            }
            for (w, c) in self.back_substitute(terms)? {
                e.coords.insert(w, c);
            }
        }
        Some(e)
    }

    fn back_substitute(&self, mut terms: BTreeMap<Word, S>) -> Option<Vec<(Word, S)>> {
        let mut out = Vec::new();
        while let Some((w, c)) = terms.pop_first() {
            if !is_lyndon(&w) {
                return None;
            }
            let expansion = self.expansion(&w);
            for (u, x) in expansion.terms() {
                if *u == w {
                    continue;
                }
                let delta = c.mul_ref(x).neg_ref();
                match terms.get_mut(u) {
                    Some(v) => {
                        let s = v.add_ref(&delta);
                        if s.is_zero() {
                            terms.remove(u);
                        } else {
                            *v = s;
                        }
                    }
                    None => {
                        terms.insert(u.clone(), delta);
                    }
                }
            }
            out.push((w, c));
        }
        Some(out)
    }

    /// Bracket of two Lyndon basis elements, in Lyndon coordinates, by the
    /// usual rewriting: `[u, v]` for `u < v` is the basis element `uv` when
    /// `u` is a letter or the right factor of `u` is at least `v`, and
    /// otherwise expands through the Jacobi identity.
    fn bracket_basis(&self, u: &[u8], v: &[u8]) -> Terms<S> {
        if u == v || u.len() + v.len() > self.max_degree() {
            return Arc::new(Vec::new());
        }
        if u > v {
            let t = self.bracket_basis(v, u);
            return Arc::new(t.iter().map(|(w, c)| (w.clone(), c.neg_ref())).collect());
        }
        let key = (u.to_vec(), v.to_vec());
        if let Some(t) = self.inner.brackets.read().unwrap().get(&key) {
            return t.clone();
        }
        let t = if u.len() == 1 || standard_factorization(u).1 >= v {
            // `uv` is Lyndon with standard factorization `(u, v)`.
            let mut w = u.to_vec();
            w.extend_from_slice(v);
            vec![(w, S::one(self.field()))]
        } else {
            // [[u1,u2],v] = [u1,[u2,v]] + [[u1,v],u2]
            let (u1, u2) = standard_factorization(u);
            let mut acc = self.zero();
            for (a, c) in self.bracket_basis(u2, v).iter() {
                for (w, d) in self.bracket_basis(u1, a).iter() {
                    acc.add_term(w.clone(), c.mul_ref(d));
                }
            }
            for (a, c) in self.bracket_basis(u1, v).iter() {
                for (w, d) in self.bracket_basis(a, u2).iter() {
                    acc.add_term(w.clone(), c.mul_ref(d));
                }
            }
            acc.coords.into_iter().collect()
        };
        let t = Arc::new(t);
        self.inner.brackets.write().unwrap().insert(key, t.clone());
        t
    }

    /// Bracket computed independently of the rewriting rules: expand both
    /// sides into the associative algebra, take the commutator and read it
    /// back in the Lyndon basis.
    pub fn bracket_by_expansion(&self, a: &FreeLieElement<S>, b: &FreeLieElement<S>) -> Result<FreeLieElement<S>> {
        if !self.same_algebra(&a.algebra) || !self.same_algebra(&b.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        let comm = self.to_associative(a).commutator(&self.to_associative(b), self.max_degree());
        Ok(self.from_associative_lie(&comm).expect("commutators are Lie elements"))
    }

    /// Lie bracket; terms past the truncation degree are dropped.
    pub fn bracket(&self, a: &FreeLieElement<S>, b: &FreeLieElement<S>) -> Result<FreeLieElement<S>> {
        if !self.same_algebra(&a.algebra) || !self.same_algebra(&b.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = self.zero();
        for (u, x) in &a.coords {
            for (v, y) in &b.coords {
                if u.len() + v.len() > self.max_degree() {
                    continue;
                }
                let xy = x.mul_ref(y);
                for (w, c) in self.bracket_basis(u, v).iter() {
                    out.add_term(w.clone(), xy.mul_ref(c));
                }
            }
        }
        Ok(out)
    }

    /// Right adjoint action `r ∘ f`, with `r ∘ (x₁⋯xₙ) = [⋯[r, x₁], ⋯, xₙ]`
    /// and `r ∘ 1 = r`.
    pub fn adjoint_apply(&self, r: &FreeLieElement<S>, f: &AssocPoly<S>) -> Result<FreeLieElement<S>> {
        if !self.same_algebra(&r.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = self.zero();
        for (word, c) in f.terms() {
            let mut t = r.clone();
            for &letter in word {
                if letter as usize >= self.rank() {
                    return Err(Error::OutOfRange { what: "letter", value: letter as usize, max: self.rank() - 1 });
                }
                t = self.bracket(&t, &self.generator(letter))?;
                if t.is_zero() {
                    break;
                }
            }
            out = out.add(&t.scale(c));
        }
        Ok(out)
    }

    /// Flattened coordinate vector (degree-major, lexicographic within degree).
    pub fn to_vector(&self, e: &FreeLieElement<S>) -> SparseVec<S> {
        SparseVec::from_pairs(e.coords.iter().map(|(w, c)| (self.flat_index(w).expect("basis word"), c.clone())))
    }

    pub fn from_vector(&self, v: &SparseVec<S>) -> FreeLieElement<S> {
        let mut e = self.zero();
        for (i, c) in v.iter() {
            e.coords.insert(self.word_at(i).clone(), c.clone());
        }
        e
    }

    /// Coordinates of the degree-`n` component, indexed within that degree.
    pub fn degree_vector(&self, e: &FreeLieElement<S>, n: usize) -> SparseVec<S> {
        SparseVec::from_pairs(e.coords.iter().filter(|(w, _)| w.len() == n).map(|(w, c)| (self.inner.index[w], c.clone())))
    }

    pub fn from_degree_vector(&self, n: usize, v: &SparseVec<S>) -> FreeLieElement<S> {
        let mut e = self.zero();
        for (i, c) in v.iter() {
            e.coords.insert(self.inner.basis[n][i].clone(), c.clone());
        }
        e
    }
}

/// `x, y, z` for ranks up to three, `x1, …, xn` otherwise.
pub fn default_alphabet(rank: usize) -> Result<Alphabet> {
    if rank <= 3 {
        Alphabet::new(["x", "y", "z"].into_iter().take(rank))
    } else {
        Alphabet::numbered("x", rank)
    }
}

impl<S: Scalar> fmt::Debug for FreeLieAlgebra<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeLieAlgebra({:?}, D = {}, {})", self.alphabet(), self.max_degree(), self.field())
    }
}

impl<S: Scalar> FreeLieElement<S> {
    pub fn algebra(&self) -> &FreeLieAlgebra<S> {
        &self.algebra
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &S)> + '_ {
        self.coords.iter()
    }

    pub fn coefficient(&self, w: &[u8]) -> Option<&S> {
        self.coords.get(w)
    }

    fn add_term(&mut self, w: Word, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coords.get_mut(&w) {
            Some(v) => {
                let s = v.add_ref(&c);
                if s.is_zero() {
                    self.coords.remove(&w);
                } else {
                    *v = s;
                }
            }
            None => {
                self.coords.insert(w, c);
            }
        }
    }

    /// Highest degree present (0 for zero).
    pub fn degree(&self) -> usize {
        self.coords.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Lowest degree present (0 for zero).
    pub fn min_degree(&self) -> usize {
        self.coords.keys().map(Vec::len).min().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.min_degree()
    }

    pub fn component(&self, n: usize) -> Self {
        FreeLieElement {
            algebra: self.algebra.clone(),
            coords: self.coords.iter().filter(|(w, _)| w.len() == n).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut e = self.clone();
        for (w, c) in &other.coords {
            e.add_term(w.clone(), c.clone());
        }
        e
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut e = self.clone();
        for (w, c) in &other.coords {
            e.add_term(w.clone(), c.neg_ref());
        }
        e
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return self.algebra.zero();
        }
        FreeLieElement {
            algebra: self.algebra.clone(),
            coords: self.coords.iter().map(|(w, x)| (w.clone(), x.mul_ref(c))).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        FreeLieElement {
            algebra: self.algebra.clone(),
            coords: self.coords.iter().map(|(w, x)| (w.clone(), x.neg_ref())).collect(),
        }
    }

    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.algebra.bracket(self, other)
    }

    /// Standard bracketings of the basis words, one per term.
    pub fn bracket_trees(&self) -> Vec<(BracketTree, S)> {
        self.coords.iter().map(|(w, c)| (bracketing_unchecked(w), c.clone())).collect()
    }

    /// Renders as a combination of standard bracketings, e.g. `[x,y] - 2*[x,[x,y]]`.
    pub fn render(&self) -> String {
        let ab = self.algebra.alphabet();
        // Degree-major order reads better than raw lexicographic order.
        let mut terms: Vec<(&Word, &S)> = self.coords.iter().collect();
        terms.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        render_terms(terms.into_iter().map(|(w, c)| (bracketing_unchecked(w).render(ab), c)))
    }
}

impl<S: Scalar> PartialEq for FreeLieElement<S> {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.same_algebra(&other.algebra) && self.coords == other.coords
    }
}

impl<S: Scalar> Eq for FreeLieElement<S> {}

impl<S: Scalar> fmt::Debug for FreeLieElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<S: Scalar> fmt::Display for FreeLieElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{PrimeField, RationalField};
    use crate::{Fp, Rational};

    fn q(n: i64) -> Rational {
        Rational::from_i64(&RationalField, n)
    }

    fn free2(d: usize) -> FreeLieAlgebra<Rational> {
        FreeLieAlgebra::with_rank(2, d, &RationalField).unwrap()
    }

    #[test]
    fn associative_expansions() {
        let f = free2(4);
        let x = f.generator(0);
        assert_eq!(f.to_associative(&x), AssocPoly::letter(0, &RationalField));
        let xy = f.basis_element(&[0, 1]).unwrap();
        let expected = AssocPoly::from_terms([(vec![0, 1], q(1)), (vec![1, 0], q(-1))]);
        assert_eq!(f.to_associative(&xy), expected);
        let xxy = f.basis_element(&[0, 0, 1]).unwrap();
        let expected = AssocPoly::from_terms([(vec![0, 0, 1], q(1)), (vec![0, 1, 0], q(-2)), (vec![1, 0, 0], q(1))]);
        assert_eq!(f.to_associative(&xxy), expected);
    }

    #[test]
    fn symmetric_part_is_not_lie() {
        let f = free2(3);
        let p = AssocPoly::from_terms([(vec![0, 1], q(1)), (vec![1, 0], q(1))]);
        assert!(f.from_associative_lie(&p).is_none());
        let p = AssocPoly::from_terms([(vec![0, 1], q(1)), (vec![1, 0], q(-1))]);
        assert_eq!(f.from_associative_lie(&p).unwrap(), f.basis_element(&[0, 1]).unwrap());
        assert!(f.from_associative_lie(&AssocPoly::unit(&RationalField)).is_none());
    }

    #[test]
    fn bracket_examples() {
        let f = free2(4);
        let (x, y) = (f.generator(0), f.generator(1));
        assert!(x.bracket(&x).unwrap().is_zero());
        assert_eq!(x.bracket(&y).unwrap(), f.basis_element(&[0, 1]).unwrap());
        let xy = f.basis_element(&[0, 1]).unwrap();
        assert_eq!(xy.bracket(&x).unwrap(), f.basis_element(&[0, 0, 1]).unwrap().neg());
    }

    #[test]
    fn rewriting_agrees_with_expansion() {
        let f = FreeLieAlgebra::<Rational>::with_rank(3, 6, &RationalField).unwrap();
        let words: Vec<Word> = (1..=5).flat_map(|n| f.basis(n).to_vec()).collect();
        for u in &words {
            for v in &words {
                if u.len() + v.len() > 6 {
                    continue;
                }
                let (a, b) = (f.basis_element(u).unwrap(), f.basis_element(v).unwrap());
                assert_eq!(a.bracket(&b).unwrap(), f.bracket_by_expansion(&a, &b).unwrap(), "{u:?} {v:?}");
            }
        }
    }

    #[test]
    fn truncation_drops_high_degrees() {
        let f = free2(2);
        let xy = f.basis_element(&[0, 1]).unwrap();
        assert!(xy.bracket(&f.generator(0)).unwrap().is_zero());
        assert!(f.basis_element(&[0, 0, 1]).unwrap().is_zero());
    }

    #[test]
    fn adjoint_action_examples() {
        let f = free2(4);
        let (x, y) = (f.generator(0), f.generator(1));
        let unit = AssocPoly::unit(&RationalField);
        let xy = f.basis_element(&[0, 1]).unwrap();
        assert_eq!(f.adjoint_apply(&xy, &unit).unwrap(), xy);
        assert_eq!(f.adjoint_apply(&x, &AssocPoly::letter(1, &RationalField)).unwrap(), xy);
        let xx = AssocPoly::monomial(vec![0, 0], q(1));
        let expected = xy.bracket(&x).unwrap().bracket(&x).unwrap();
        assert_eq!(f.adjoint_apply(&xy, &xx).unwrap(), expected);
        assert!(!expected.is_zero());
        let _ = y;
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let f = free2(3);
        let g = free2(4);
        assert_eq!(f.bracket(&f.generator(0), &g.generator(1)), Err(Error::AlgebraMismatch));
    }

    #[test]
    fn works_over_prime_fields() {
        let field = PrimeField::new(7).unwrap();
        let f = FreeLieAlgebra::<Fp>::with_rank(2, 5, &field).unwrap();
        let (x, y) = (f.generator(0), f.generator(1));
        let xy = x.bracket(&y).unwrap();
        assert_eq!(xy.bracket(&y).unwrap().bracket(&x).unwrap().degree(), 4);
    }

    #[test]
    fn flattened_vectors_round_trip() {
        let f = free2(5);
        let e = f.basis_element(&[0, 0, 1, 1]).unwrap().add(&f.generator(1).scale(&q(3)));
        let v = f.to_vector(&e);
        assert_eq!(f.from_vector(&v), e);
        assert_eq!(f.total_dim(), 2 + 1 + 2 + 3 + 6);
    }

    #[test]
    fn render_uses_standard_bracketing() {
        let f = free2(3);
        let e = f.basis_element(&[0, 0, 1]).unwrap().scale(&q(-2)).add(&f.generator(0));
        assert_eq!(e.render(), "x - 2*[x,[x,y]]");
    }
}
