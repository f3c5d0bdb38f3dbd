use lief_core::free_lie::{
    is_lyndon, lyndon_words, standard_bracketing, witt_dimension, Alphabet, BracketExpr, FreeLieAlgebra, FreeLieElement,
};
use lief_core::{Fp, PrimeField, Rational, RationalField, Scalar};
use proptest::prelude::*;

/// All words of length `n` over `m` letters.
fn all_words(m: u8, n: usize) -> Vec<Vec<u8>> {
    let mut words = vec![Vec::new()];
    for _ in 0..n {
        words = words.into_iter().flat_map(|w| (0..m).map(move |l| [w.clone(), vec![l]].concat())).collect();
    }
    words
}

/// Lyndon by definition: strictly smaller than every proper rotation.
fn lyndon_by_rotation(w: &[u8]) -> bool {
    (1..w.len()).all(|k| {
        let rotated: Vec<u8> = w[k..].iter().chain(&w[..k]).copied().collect();
        w < rotated.as_slice()
    })
}

#[test]
fn lyndon_counts_match_brute_force() {
    for m in 2..=3u8 {
        for n in 1..=8 {
            let brute: Vec<Vec<u8>> = all_words(m, n).into_iter().filter(|w| lyndon_by_rotation(w)).collect();
            let listed = lyndon_words(m as usize, n).unwrap();
            assert_eq!(listed, brute, "m = {m}, n = {n}");
            assert_eq!(witt_dimension(m as usize, n), brute.len(), "m = {m}, n = {n}");
            assert!(listed.iter().all(|w| is_lyndon(w)));
        }
    }
    assert_eq!([3, 4, 6].map(|n| witt_dimension(2, n)), [2, 3, 9]);
}

fn check_axioms<S: Scalar>(rank: usize, max_total: usize, field: &S::Field) {
    let free = FreeLieAlgebra::<S>::with_rank(rank, max_total, field).unwrap();
    let basis: Vec<FreeLieElement<S>> =
        (1..max_total).flat_map(|n| free.basis(n).to_vec()).map(|w| free.basis_element(&w).unwrap()).collect();
    for a in &basis {
        assert!(a.bracket(a).unwrap().is_zero());
        for b in &basis {
            if a.degree() + b.degree() > max_total {
                continue;
            }
            let ab = a.bracket(b).unwrap();
            assert_eq!(ab, b.bracket(a).unwrap().neg(), "[{a}, {b}]");
            for c in &basis {
                if a.degree() + b.degree() + c.degree() > max_total {
                    continue;
                }
                let j = ab
                    .bracket(c)
                    .unwrap()
                    .add(&b.bracket(c).unwrap().bracket(a).unwrap())
                    .add(&c.bracket(a).unwrap().bracket(b).unwrap());
                assert!(j.is_zero(), "Jacobi fails on ({a}, {b}, {c})");
            }
        }
    }
}

#[test]
fn antisymmetry_and_jacobi_over_rationals() {
    check_axioms::<Rational>(2, 6, &RationalField);
    check_axioms::<Rational>(3, 6, &RationalField);
}

#[test]
fn antisymmetry_and_jacobi_over_f7() {
    let f7 = PrimeField::new(7).unwrap();
    check_axioms::<Fp>(2, 6, &f7);
    check_axioms::<Fp>(3, 6, &f7);
}

#[test]
fn standard_bracketing_expands_to_leading_word() {
    let free = FreeLieAlgebra::<Rational>::with_rank(3, 6, &RationalField).unwrap();
    for n in 1..=6 {
        for w in free.basis(n) {
            let tree = standard_bracketing(w).unwrap();
            assert_eq!(tree.degree(), n);
            let p = free.expansion(w);
            // The Lyndon word is the smallest word in its own expansion, with coefficient 1.
            let smallest = p.terms().map(|(u, _)| u.clone()).min().unwrap();
            assert_eq!(&smallest, w);
            assert!(p.coefficient(w).unwrap().is_one());
        }
    }
}

fn element_strategy(rank: u8, max_degree: usize) -> impl Strategy<Value = Vec<(Vec<u8>, i64)>> {
    let word = (1..=max_degree).prop_flat_map(move |n| proptest::collection::vec(0..rank, n));
    proptest::collection::vec((word, -3i64..=3), 0..5)
}

/// Sum of left-normed brackets of the letters of each word.
fn element_from_words(free: &FreeLieAlgebra<Rational>, terms: &[(Vec<u8>, i64)]) -> FreeLieElement<Rational> {
    terms.iter().fold(free.zero(), |acc, (w, c)| {
        let mut e = free.generator(w[0]);
        for &l in &w[1..] {
            e = e.bracket(&free.generator(l)).unwrap();
        }
        acc.add(&e.scale(&Rational::from_i64(&RationalField, *c)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rewriting_agrees_with_associative_expansion(a in element_strategy(3, 3), b in element_strategy(3, 3)) {
        let free = FreeLieAlgebra::<Rational>::with_rank(3, 6, &RationalField).unwrap();
        let (a, b) = (element_from_words(&free, &a), element_from_words(&free, &b));
        prop_assert_eq!(free.bracket(&a, &b).unwrap(), free.bracket_by_expansion(&a, &b).unwrap());
    }

    #[test]
    fn associative_round_trip(a in element_strategy(2, 5)) {
        let free = FreeLieAlgebra::<Rational>::with_rank(2, 5, &RationalField).unwrap();
        let a = element_from_words(&free, &a);
        prop_assert_eq!(free.from_associative_lie(&free.to_associative(&a)).unwrap(), a);
    }

    #[test]
    fn rendered_elements_parse_back(a in element_strategy(2, 4)) {
        let free = FreeLieAlgebra::<Rational>::new(Alphabet::new(["x", "y"]).unwrap(), 4, &RationalField).unwrap();
        let a = element_from_words(&free, &a);
        let parsed = BracketExpr::parse(&a.render()).unwrap();
        prop_assert_eq!(parsed.evaluate(&free).unwrap(), a.clone());
        prop_assert_eq!(BracketExpr::parse(&parsed.to_string()).unwrap(), parsed);
    }

    #[test]
    fn vector_round_trip(a in element_strategy(3, 4)) {
        let free = FreeLieAlgebra::<Rational>::with_rank(3, 4, &RationalField).unwrap();
        let a = element_from_words(&free, &a);
        prop_assert_eq!(free.from_vector(&free.to_vector(&a)), a);
    }
}
