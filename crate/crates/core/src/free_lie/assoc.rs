use std::collections::BTreeMap;

use crate::free_lie::words::{Alphabet, Word};
use crate::scalar::Scalar;

/// Element of the free associative algebra (the enveloping algebra of a
/// free Lie algebra): a finite combination of words. The empty word is the
/// unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocPoly<S> {
    terms: BTreeMap<Word, S>,
}

impl<S> Default for AssocPoly<S> {
    fn default() -> Self {
        AssocPoly { terms: BTreeMap::new() }
    }
}

impl<S: Scalar> AssocPoly<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(word: Word, c: S) -> Self {
        let mut p = Self::zero();
        p.add_term(word, c);
        p
    }

    pub fn unit(field: &S::Field) -> Self {
        Self::monomial(Vec::new(), S::one(field))
    }

    pub fn scalar(c: S) -> Self {
        Self::monomial(Vec::new(), c)
    }

    pub fn letter(letter: u8, field: &S::Field) -> Self {
        Self::monomial(vec![letter], S::one(field))
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, S)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn add_term(&mut self, word: Word, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&word) {
            Some(v) => {
                let s = v.add_ref(&c);
                if s.is_zero() {
                    self.terms.remove(&word);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(word, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &S)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &[u8]) -> Option<&S> {
        self.terms.get(word)
    }

    pub fn constant_term(&self) -> Option<&S> {
        self.terms.get(&Vec::new())
    }

    /// Largest word length present (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (w, c) in &other.terms {
            p.add_term(w.clone(), c.clone());
        }
        p
    }

    pub fn add_scaled(&mut self, c: &S, other: &Self) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &other.terms {
            self.add_term(w.clone(), c.mul_ref(x));
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (w, c) in &other.terms {
            p.add_term(w.clone(), c.neg_ref());
        }
        p
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        AssocPoly { terms: self.terms.iter().map(|(w, x)| (w.clone(), x.mul_ref(c))).collect() }
    }

    /// Product, dropping words longer than `max_len`.
    pub fn mul_truncated(&self, other: &Self, max_len: usize) -> Self {
        let mut p = Self::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if u.len() + v.len() > max_len {
                    continue;
                }
                let mut w = Vec::with_capacity(u.len() + v.len());
                w.extend_from_slice(u);
                w.extend_from_slice(v);
                p.add_term(w, a.mul_ref(b));
            }
        }
        p
    }

    /// `ab - ba`, truncated at `max_len`.
    pub fn commutator(&self, other: &Self, max_len: usize) -> Self {
        self.mul_truncated(other, max_len).sub(&other.mul_truncated(self, max_len))
    }

    /// Splits off the homogeneous component of each length.
    pub fn homogeneous_parts(&self) -> BTreeMap<usize, BTreeMap<Word, S>> {
        let mut out: BTreeMap<usize, BTreeMap<Word, S>> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(w.len()).or_default().insert(w.clone(), c.clone());
        }
        out
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        render_terms(self.terms.iter().map(|(w, c)| (alphabet.render_word(w), c)))
    }
}

/// Formats `c1*t1 + c2*t2 - ...`, eliding unit coefficients.
pub(crate) fn render_terms<'a, S: Scalar + 'a>(terms: impl Iterator<Item = (String, &'a S)>) -> String {
    let mut out = String::new();
    for (t, c) in terms {
        let one = S::one(&c.field());
        let (neg, coeff) = if *c == one {
            (false, String::new())
        } else if c.neg_ref() == one {
            (true, String::new())
        } else {
            let s = c.to_string();
            match s.strip_prefix('-') {
                Some(m) => (true, format!("{m}*")),
                None => (false, format!("{s}*")),
            }
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&coeff);
        out.push_str(&t);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
