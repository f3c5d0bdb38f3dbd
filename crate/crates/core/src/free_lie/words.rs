use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A word over an alphabet, stored as letter indices.
pub type Word = Vec<u8>;

/// Ordered, named generating set. Letter order is declaration order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Arc<[String]>,
}

impl Alphabet {
    pub fn new<I, T>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::MalformedPresentation("alphabet must be nonempty".into()));
        }
        if names.len() > u8::MAX as usize {
            return Err(Error::OutOfRange { what: "alphabet size", value: names.len(), max: u8::MAX as usize });
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateName(n.clone()));
            }
        }
        Ok(Alphabet { names: names.into() })
    }

    /// `x1, x2, ...` style alphabet of the given size.
    pub fn numbered(prefix: &str, size: usize) -> Result<Self> {
        Self::new((1..=size).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, letter: u8) -> &str {
        &self.names[letter as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<u8> {
        self.names.iter().position(|n| n == name).map(|i| i as u8)
    }

    /// Renders a word by juxtaposing letter names (with `·` between
    /// multi-character names).
    pub fn render_word(&self, w: &[u8]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let single = self.names.iter().all(|n| n.chars().count() == 1);
        let parts: Vec<&str> = w.iter().map(|&l| self.name(l)).collect();
        if single {
            parts.concat()
        } else {
            parts.join("·")
        }
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

/// Whether `w` is strictly smaller than each of its proper rotations.
pub fn is_lyndon(w: &[u8]) -> bool {
    if w.is_empty() {
        return false;
    }
    let n = w.len();
    (1..n).all(|k| {
        let rotated = w[k..].iter().chain(&w[..k]);
        w.iter().lt(rotated)
    })
}

/// All Lyndon words of exactly `degree` letters over `size` letters, in
/// lexicographic order (Duval's generation algorithm).
pub fn lyndon_words(size: usize, degree: usize) -> Result<Vec<Word>> {
    if degree == 0 {
        return Err(Error::EmptyDegree);
    }
    let mut out = Vec::new();
    if size == 0 {
        return Ok(out);
    }
    let k = size as u8;
    let mut w: Vec<u8> = vec![0];
    loop {
        if w.len() == degree {
            out.push(w.clone());
        }
        // Extend periodically to full length, then increment.
        let m = w.len();
        while w.len() < degree {
            let c = w[w.len() - m];
            w.push(c);
        }
        while matches!(w.last(), Some(&c) if c == k - 1) {
            w.pop();
        }
        match w.last_mut() {
            Some(c) => *c += 1,
            None => break,
        }
    }
    Ok(out)
}

/// Dimension of the degree-`degree` component of the free Lie algebra of the
/// given rank: `(1/n) Σ_{d|n} μ(d) rank^{n/d}`.
pub fn witt_dimension(rank: usize, degree: usize) -> usize {
    assert!(degree >= 1, "degree must be at least 1");
    let r = rank as i128;
    let mut sum: i128 = 0;
    for d in 1..=degree {
        if degree.is_multiple_of(d) {
            let mu = mobius(d);
            if mu != 0 {
                let p = r.checked_pow((degree / d) as u32).expect("Witt dimension overflow");
                sum += mu as i128 * p;
            }
        }
    }
    (sum / degree as i128) as usize
}

fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Binary bracket tree over letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BracketTree {
    Leaf(u8),
    Node(Box<BracketTree>, Box<BracketTree>),
}

impl BracketTree {
    pub fn degree(&self) -> usize {
        match self {
            BracketTree::Leaf(_) => 1,
            BracketTree::Node(a, b) => a.degree() + b.degree(),
        }
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        match self {
            BracketTree::Leaf(l) => alphabet.name(*l).to_string(),
            BracketTree::Node(a, b) => format!("[{},{}]", a.render(alphabet), b.render(alphabet)),
        }
    }
}

/// Right standard factorization `w = u·v`, with `v` the longest proper
/// Lyndon suffix. `w` must be a Lyndon word of length at least 2.
pub fn standard_factorization(w: &[u8]) -> (&[u8], &[u8]) {
    debug_assert!(w.len() >= 2);
    let k = (1..w.len()).find(|&k| is_lyndon(&w[k..])).expect("single letters are Lyndon");
    (&w[..k], &w[k..])
}

/// The bracketing attached to a Lyndon word through its standard factorization.
pub fn standard_bracketing(w: &[u8]) -> Result<BracketTree> {
    if !is_lyndon(w) {
        return Err(Error::NotLyndon(format!("{w:?}")));
    }
    Ok(bracketing_unchecked(w))
}

pub(crate) fn bracketing_unchecked(w: &[u8]) -> BracketTree {
    if w.len() == 1 {
        return BracketTree::Leaf(w[0]);
    }
    let (u, v) = standard_factorization(w);
    BracketTree::Node(Box::new(bracketing_unchecked(u)), Box::new(bracketing_unchecked(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force: every word of the given length, filtered by the rotation test.
    fn brute_lyndon(size: usize, n: usize) -> Vec<Word> {
        let total = size.pow(n as u32);
        let mut out: Vec<Word> = (0..total)
            .map(|mut k| {
                let mut w = vec![0u8; n];
                for i in (0..n).rev() {
                    w[i] = (k % size) as u8;
                    k /= size;
                }
                w
            })
            .filter(|w| is_lyndon(w))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn lyndon_words_small_cases() {
        assert_eq!(lyndon_words(2, 1).unwrap(), vec![vec![0], vec![1]]);
        assert_eq!(lyndon_words(2, 3).unwrap(), vec![vec![0, 0, 1], vec![0, 1, 1]]);
        assert_eq!(lyndon_words(2, 0), Err(Error::EmptyDegree));
    }

    #[test]
    fn generation_matches_brute_force() {
        for size in 1..=3 {
            for n in 1..=7 {
                assert_eq!(lyndon_words(size, n).unwrap(), brute_lyndon(size, n), "size {size} n {n}");
            }
        }
    }

    #[test]
    fn witt_values() {
        // Frozen from the brute-force enumeration above.
        let expected = [2, 1, 2, 3, 6, 9, 18, 30];
        for (n, &e) in (1..=8).zip(expected.iter()) {
            assert_eq!(witt_dimension(2, n), e, "degree {n}");
            assert_eq!(brute_lyndon(2, n).len(), e);
        }
        for n in 1..=7 {
            assert_eq!(witt_dimension(3, n), brute_lyndon(3, n).len());
        }
        assert_eq!(witt_dimension(1, 1), 1);
        assert_eq!(witt_dimension(1, 2), 0);
    }

    #[test]
    fn standard_bracketing_examples() {
        let ab = Alphabet::new(["x", "y"]).unwrap();
        assert_eq!(standard_bracketing(&[0]).unwrap(), BracketTree::Leaf(0));
        assert_eq!(standard_bracketing(&[0, 1]).unwrap().render(&ab), "[x,y]");
        assert_eq!(standard_bracketing(&[0, 0, 1]).unwrap().render(&ab), "[x,[x,y]]");
        assert_eq!(standard_bracketing(&[0, 1, 1]).unwrap().render(&ab), "[[x,y],y]");
        assert!(matches!(standard_bracketing(&[1, 0]), Err(Error::NotLyndon(_))));
    }

    #[test]
    fn alphabet_rejects_duplicates() {
        assert!(matches!(Alphabet::new(["x", "x"]), Err(Error::DuplicateName(_))));
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
    }
}
