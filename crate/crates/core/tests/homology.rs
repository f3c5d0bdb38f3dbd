use lief_core::findim::FinDimLie;
use lief_core::free_lie::witt_dimension;
use lief_core::homology::{betti_numbers, hopf_h2, kunneth_table, pbw_dims, relation_sequence_check, ChainComplex};
use lief_core::presentations::Presentation;
use lief_core::{Fp, PrimeField, QLie, Rational, RationalField, Scalar};
use proptest::prelude::*;

fn zoo<S: Scalar>(field: &S::Field) -> Vec<(String, FinDimLie<S>)> {
    let mut out: Vec<(String, FinDimLie<S>)> = (1..=4).map(|n| (format!("abelian({n})"), FinDimLie::abelian(n, field))).collect();
    out.push(("heisenberg".into(), FinDimLie::heisenberg(field)));
    for c in 2..=4 {
        out.push((format!("free_nilpotent(2,{c})"), FinDimLie::free_nilpotent(2, c, field).unwrap()));
    }
    for c in 2..=3 {
        out.push((format!("free_nilpotent(3,{c})"), FinDimLie::free_nilpotent(3, c, field).unwrap()));
    }
    out
}

fn pascal(n: usize) -> Vec<usize> {
    let mut row = vec![1usize];
    for _ in 0..n {
        let mut next = vec![1; row.len() + 1];
        for k in 1..row.len() {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
    }
    row
}

#[test]
fn boundary_squares_to_zero_on_zoo() {
    for (name, l) in zoo::<Rational>(&RationalField) {
        assert_eq!(ChainComplex::new(&l).square_violation(), None, "{name}");
    }
}

#[test]
fn heisenberg_and_abelian_betti() {
    let h = QLie::heisenberg(&RationalField);
    assert_eq!(betti_numbers(&h, "H", 3).betti, vec![1, 2, 2, 1]);
    for n in 1..=5 {
        let a = QLie::abelian(n, &RationalField);
        assert_eq!(betti_numbers(&a, "A", n).betti, pascal(n));
    }
}

/// Betti numbers over 𝔽_p from dense boundary matrices written out from the
/// structure constants, with a plain Gaussian elimination.
fn dense_betti(l: &FinDimLie<Fp>, p: u64) -> Vec<usize> {
    let d = l.dim();
    let subsets = |k: usize| -> Vec<Vec<usize>> {
        (0u32..1 << d).filter(|m| m.count_ones() as usize == k).map(|m| (0..d).filter(|i| m & (1 << i) != 0).collect()).collect()
    };
    let c = |i: usize, j: usize, k: usize| -> u64 { l.basis_bracket(i, j).get(k).map_or(0, |v| v.value() as u64) };
    let rank = |rows: Vec<Vec<u64>>| -> usize {
        let mut m = rows;
        let mut r = 0;
        let cols = m.first().map_or(0, Vec::len);
        for col in 0..cols {
            let Some(piv) = (r..m.len()).find(|&i| m[i][col] != 0) else { continue };
            m.swap(r, piv);
            let inv = (1..p).find(|x| x * m[r][col] % p == 1).unwrap();
            for x in m[r].iter_mut() {
                *x = *x * inv % p;
            }
            for i in 0..m.len() {
                if i != r && m[i][col] != 0 {
                    let f = m[i][col];
                    for j in 0..cols {
                        m[i][j] = (m[i][j] + p * p - f * m[r][j] % p) % p;
                    }
                }
            }
            r += 1;
        }
        r
    };
    let mut ranks = vec![0; d + 2];
    for n in 2..=d {
        let src = subsets(n);
        let dst = subsets(n - 1);
        let index = |s: &[usize]| dst.iter().position(|t| t == s);
        let mut rows = Vec::new();
        for s in &src {
            let mut row = vec![0u64; dst.len()];
            for a in 0..n {
                for b in a + 1..n {
                    let sign_ab = (a + b) % 2 == 1;
                    for k in 0..d {
                        let coeff = c(s[a], s[b], k);
                        if coeff == 0 {
                            continue;
                        }
                        let mut rest: Vec<usize> =
                            s.iter().enumerate().filter(|&(i, _)| i != a && i != b).map(|(_, &x)| x).collect();
                        if rest.contains(&k) {
                            continue;
                        }
                        // Place k in front, then sort, tracking the sign.
                        rest.insert(0, k);
                        let mut sign = sign_ab;
                        for i in 0..rest.len() {
                            for j in 0..rest.len() - 1 - i {
                                if rest[j] > rest[j + 1] {
                                    rest.swap(j, j + 1);
                                    sign = !sign;
                                }
                            }
                        }
                        let col = index(&rest).unwrap();
                        let v = if sign { (p - coeff) % p } else { coeff };
                        row[col] = (row[col] + v) % p;
                    }
                }
            }
            rows.push(row);
        }
        ranks[n] = rank(rows);
    }
    (0..=d).map(|n| pascal(d)[n] - ranks[n] - ranks[n + 1]).collect()
}

#[test]
fn betti_matches_dense_oracle_over_fp() {
    let p = 101;
    let field = PrimeField::new(p).unwrap();
    for (name, l) in zoo::<Fp>(&field) {
        if l.dim() > 10 {
            continue;
        }
        assert_eq!(betti_numbers(&l, &name, l.dim()).betti, dense_betti(&l, p), "{name}");
    }
}

#[test]
fn kunneth_on_zoo_pairs() {
    let zoo = zoo::<Rational>(&RationalField);
    for (na, a) in &zoo {
        for (nb, b) in &zoo {
            for row in kunneth_table(a, b, 4).unwrap() {
                assert!(row.holds, "{na} + {nb}: {row:?}");
            }
        }
    }
}

#[test]
fn hopf_formula_against_witt_and_betti() {
    for d in 1..=3 {
        for c in 1..=3 {
            let pres = Presentation::free_nilpotent("F", d, c).unwrap();
            let h = hopf_h2::<Rational>(&pres, c, &RationalField).unwrap();
            let b2 = betti_numbers(&QLie::free_nilpotent(d, c, &RationalField).unwrap(), "F", 2).betti[2];
            assert_eq!(h.dim, witt_dimension(d, c + 1), "d = {d}, c = {c}");
            assert_eq!(h.dim, b2, "d = {d}, c = {c}");
        }
    }
    let h = hopf_h2::<Rational>(&Presentation::free_nilpotent("F", 2, 2).unwrap(), 2, &RationalField).unwrap();
    assert_eq!(h.dim, 2);
}

#[test]
fn relation_sequence_euler_identity() {
    for d in 2..=3 {
        for c in 1..=2 {
            let r = relation_sequence_check::<Rational>(d, c, 8, &RationalField).unwrap();
            assert!(r.holds, "d = {d}, c = {c}: {:?}", r.rows);
        }
    }
    // For c = 1 the relation module in degree 3 is all of F_3, since
    // brackets of two elements of degree ≥ 2 start in degree 4.
    let r = relation_sequence_check::<Rational>(2, 1, 8, &RationalField).unwrap();
    assert_eq!(r.rows[3].relation_module, witt_dimension(2, 3));
    assert_eq!(r.rows[3].relation_module, 2);
}

#[test]
fn pbw_dims_of_abelian_are_monomial_counts() {
    // 𝒰 of abelian(d) is polynomial in d variables.
    for d in 1..=4 {
        let dims = pbw_dims(&[0, d], 6);
        for (n, &v) in dims.iter().enumerate() {
            let exact = (0..n).fold(1u128, |acc, k| acc * (d + k) as u128) / (1..=n as u128).product::<u128>().max(1);
            assert_eq!(v, exact, "d = {d}, n = {n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The Euler characteristic of the complex vanishes for nonzero algebras.
    #[test]
    fn euler_characteristic_vanishes(i in 0usize..10, p in prop::sample::select(vec![2u64, 3, 5, 7, 32003])) {
        let field = PrimeField::new(p).unwrap();
        let zoo = zoo::<Fp>(&field);
        let (name, l) = &zoo[i % zoo.len()];
        prop_assume!(l.dim() <= 10);
        let b = betti_numbers(l, name, l.dim()).betti;
        let chi: i64 = b.iter().enumerate().map(|(n, &v)| if n % 2 == 0 { v as i64 } else { -(v as i64) }).sum();
        prop_assert_eq!(chi, 0);
        prop_assert_eq!(b[1], l.dim() - l.gamma(2).dim());
    }

    #[test]
    fn center_of_direct_sum(i in 0usize..10, j in 0usize..10) {
        let zoo = zoo::<Rational>(&RationalField);
        let (a, b) = (&zoo[i % zoo.len()].1, &zoo[j % zoo.len()].1);
        let s = a.direct_sum(b).unwrap();
        prop_assert_eq!(s.center().dim(), a.center().dim() + b.center().dim());
        prop_assert!(s.check_jacobi().is_ok());
    }
}
