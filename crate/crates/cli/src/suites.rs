//! Bundled scenario scripts. Each suite is an ordinary `.lie` script, so
//! `lief suite <name>` and `lief run` on the printed text give the same report.

use std::fmt::Write;

pub const SUITES: [&str; 6] = ["theorem-a", "theorem-c", "hopf", "kunneth", "relation-sequence", "fibre"];

/// Accepted alternative suite names.
const ALIASES: [(&str, &str); 1] = [("lemma-4.2", "relation-sequence")];

pub fn canonical(name: &str) -> Option<&'static str> {
    SUITES.iter().copied().find(|s| *s == name).or_else(|| ALIASES.iter().find(|(a, _)| *a == name).map(|(_, s)| *s))
}

pub fn script(name: &str) -> Option<String> {
    Some(match canonical(name)? {
        "theorem-a" => THEOREM_A.to_string(),
        "theorem-c" => THEOREM_C.to_string(),
        "hopf" => hopf(),
        "kunneth" => kunneth(),
        "relation-sequence" => relation_sequence(),
        "fibre" => FIBRE.to_string(),
        _ => unreachable!(),
    })
}

const THEOREM_A: &str = "\
# Kernel of F1 + F2 + F3 -> Z^2 summing abelianizations, three free factors of rank 2.
field Q
class 4
free F1 = free(x1, y1)
free F2 = free(x2, y2)
free F3 = free(x3, y3)
subdirect S in F1 + F2 + F3 gens {
  (x1, -x2, 0), (x1, 0, -x3),
  (y1, -y2, 0), (y1, 0, -y3),
  ([x1,y1], 0, 0), (0, [x2,y2], 0), (0, 0, [x3,y3])
}
check subdirect S
check projection S 1 2
check projection S 1 3
check projection S 2 3
check intersect S 1
check intersect S 2
check intersect S 3
check gamma S 2
check witness S 1 20
check witness S 2 20
check witness S 3 20
check contains S ([x1,[x1,y1]], 0, 0)
";

const THEOREM_C: &str = "\
# Heisenberg algebra as an extension of the abelian plane by its center.
field Q
class 4
present H = <x, y, z | [x,y] - z, [z,x], [z,y]>
present Ab = <x, y | [x,y]>
free F = free(x, y)
check tilde H z
check tilde H z class 2
fibre P = pullback(H -> Ab, F -> Ab) map { z -> 0 ; x -> x, y -> y }
check fibre P
fibre D = pullback(H -> Ab, H -> Ab) map { z -> 0 ; z -> 0 }
check fibre D
";

const FIBRE: &str = "\
field Q
class 4
present H = <x, y, z | [x,y] - z, [x,z], [y,z]>
free F = free(x, y)
present Ab = <x, y | [x,y]>
present M = <x, y, a | [a,x], [a,y] - a>
present T = <x, y | [x,[x,y]]>
present H2 = <x, y | [x,[x,y]], [y,[x,y]]>
present U = <x, y | [y,[x,y]]>
fibre P1 = pullback(H -> Ab, F -> Ab) map { z -> 0 }
fibre P2 = pullback(F -> F, F -> F)
fibre P3 = pullback(M -> H2, T -> H2) map { a -> 0 }
fibre P4 = pullback(T -> Ab, U -> Ab)
check fibre P1
check fibre P2
check fibre P3
check fibre P4
check fibre P1 class 2
check fibre P3 class 3
";

fn hopf() -> String {
    let mut s = String::from("# Hopf's formula against Witt dimensions and Chevalley-Eilenberg b2.\nfield Q\nclass 4\n");
    for d in 1..=3 {
        for c in 1..=3 {
            writeln!(s, "present N{d}{c} = free_nilpotent({d}, {c})\ncheck hopf N{d}{c}").unwrap();
        }
    }
    s
}

fn kunneth() -> String {
    let zoo = [
        ("A1", "abelian(1)"),
        ("A2", "abelian(2)"),
        ("A3", "abelian(3)"),
        ("A4", "abelian(4)"),
        ("H", "heisenberg"),
        ("N22", "nilpotent(2, 2)"),
        ("N23", "nilpotent(2, 3)"),
        ("N24", "nilpotent(2, 4)"),
        ("N32", "nilpotent(3, 2)"),
        ("N33", "nilpotent(3, 3)"),
    ];
    let mut s = String::from("# Betti numbers of direct sums over all ordered pairs from the zoo.\nfield Q\nclass 4\n");
    for (name, def) in &zoo {
        writeln!(s, "algebra {name} = {def}").unwrap();
    }
    for (a, _) in &zoo {
        for (b, _) in &zoo {
            writeln!(s, "check kunneth {a} {b} 4").unwrap();
        }
    }
    s
}

fn relation_sequence() -> String {
    let mut s =
        String::from("# Euler characteristic of the relation-module sequence for N = gamma_{c+1}(F).\nfield Q\nclass 4\n");
    for d in 2..=3 {
        for c in 1..=2 {
            writeln!(s, "check relation-sequence {d} {c} 8").unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::parse_script;

    #[test]
    fn every_suite_parses() {
        for name in SUITES {
            let text = script(name).unwrap();
            parse_script(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert_eq!(canonical("lemma-4.2"), Some("relation-sequence"));
        assert!(script("nope").is_none());
    }
}
