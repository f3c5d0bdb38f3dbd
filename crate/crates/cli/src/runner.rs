//! Evaluates a parsed script: declarations build objects, checks produce
//! verdicts collected into a [`Report`].

use std::collections::HashMap;
use std::time::Instant;

use lief_core::fibre::{fibre_sum, verify_delta_abelian, FibreSpec, TildePresentation};
use lief_core::findim::FinDimLie;
use lief_core::free_lie::{lyndon_words, witt_dimension, Alphabet, BracketExpr, FreeLieAlgebra, FreeLieElement};
use lief_core::homology::{betti_numbers, hopf_h2, kunneth_table, relation_sequence_check};
use lief_core::linalg::SparseVec;
use lief_core::presentations::{fp2_evidence, nilpotent_quotient, Presentation};
use lief_core::subdirect::SubdirectSum;
use lief_core::{PrimeField, RationalField, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::script::{parse_script, AlgebraDef, Check, CheckKind, Decl, FieldChoice, PresentBody, Script, ScriptError};

pub const DEFAULT_CLASS: usize = 4;
/// Seed for the pseudo-random choices made by `check witness`.
const WITNESS_SEED: u64 = 0x5eed_0001;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub field: Option<FieldChoice>,
    pub class: Option<usize>,
    pub timings: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectiveResult {
    pub line: usize,
    pub directive: String,
    pub check: String,
    pub class: usize,
    pub passed: bool,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_degree: Option<Value>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub input_digest: String,
    pub field: String,
    pub class: usize,
    pub results: Vec<DirectiveResult>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let mark = if r.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{mark}] line {}: {}: {}", r.line, r.directive, r.verdict));
            if let Some(ms) = r.elapsed_ms {
                out.push_str(&format!(" ({ms} ms)"));
            }
            out.push('\n');
        }
        let passed = self.results.iter().filter(|r| r.passed).count();
        out.push_str(&format!("{passed}/{} checks passed\n", self.results.len()));
        out
    }
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Parses and runs `text`. Declaration errors abort with their location;
/// errors inside a check make that check fail.
pub fn run(text: &str, opts: &RunOptions) -> Result<Report, ScriptError> {
    let script = parse_script(text)?;
    let field = opts.field.or(script.field()).unwrap_or(FieldChoice::Rational);
    let class = opts.class.or(script.class()).unwrap_or(DEFAULT_CLASS);
    let results = match field {
        FieldChoice::Rational => Runner::<lief_core::Rational>::new(&script, RationalField, class, opts.timings).run()?,
        FieldChoice::Prime(p) => {
            let f = PrimeField::new(p).map_err(|e| ScriptError { line: 0, column: 1, message: e.to_string() })?;
            Runner::<lief_core::Fp>::new(&script, f, class, opts.timings).run()?
        }
    };
    let field_name = match field {
        FieldChoice::Rational => "Q".to_string(),
        FieldChoice::Prime(p) => format!("Fp:{p}"),
    };
    Ok(Report {
        tool: "lief".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        input_digest: digest(text),
        field: field_name,
        class,
        passed: results.iter().all(|r| r.passed),
        results,
    })
}

/// Evaluates declarations only and returns the named algebra's Betti numbers.
pub fn betti_of(text: &str, algebra: &str, degree: usize, opts: &RunOptions) -> Result<Vec<usize>, ScriptError> {
    let script = parse_script(text)?;
    let field = opts.field.or(script.field()).unwrap_or(FieldChoice::Rational);
    let class = opts.class.or(script.class()).unwrap_or(DEFAULT_CLASS);
    let missing = || ScriptError { line: 0, column: 1, message: format!("no algebra named `{algebra}`") };
    macro_rules! go {
        ($s:ty, $f:expr) => {{
            let mut r = Runner::<$s>::new(&script, $f, class, false);
            r.declare_all()?;
            let l = r.algebras.get(algebra).ok_or_else(missing)?;
            Ok(betti_numbers(l, algebra, degree).betti)
        }};
    }
    match field {
        FieldChoice::Rational => go!(lief_core::Rational, RationalField),
        FieldChoice::Prime(p) => {
            let f = PrimeField::new(p).map_err(|e| ScriptError { line: 0, column: 1, message: e.to_string() })?;
            go!(lief_core::Fp, f)
        }
    }
}

struct SubdirectDecl {
    factors: Vec<String>,
    tuples: Vec<Vec<BracketExpr>>,
}

struct Outcome {
    passed: bool,
    verdict: String,
    data: Value,
}

fn outcome<T: Serialize>(passed: bool, verdict: impl Into<String>, data: &T) -> Outcome {
    Outcome { passed, verdict: verdict.into(), data: serde_json::to_value(data).expect("serializable") }
}

fn list<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

struct Runner<'a, S: Scalar> {
    script: &'a Script,
    field: S::Field,
    class: usize,
    timings: bool,
    presentations: HashMap<String, (Presentation, Option<(usize, usize)>)>,
    algebras: HashMap<String, FinDimLie<S>>,
    subdirects: HashMap<String, SubdirectDecl>,
    built: HashMap<(String, usize), SubdirectSum<S>>,
    fibres: HashMap<String, FibreSpec>,
}

impl<'a, S: Scalar> Runner<'a, S> {
    fn new(script: &'a Script, field: S::Field, class: usize, timings: bool) -> Self {
        Runner {
            script,
            field,
            class,
            timings,
            presentations: HashMap::new(),
            algebras: HashMap::new(),
            subdirects: HashMap::new(),
            built: HashMap::new(),
            fibres: HashMap::new(),
        }
    }

    fn declare_all(&mut self) -> Result<(), ScriptError> {
        for (line, decl) in self.script.items() {
            if !matches!(decl, Decl::Check(_)) {
                self.declare(decl).map_err(|e| located(line, e))?;
            }
        }
        Ok(())
    }

    fn run(mut self) -> Result<Vec<DirectiveResult>, ScriptError> {
        let mut results = Vec::new();
        for (line, decl) in self.script.items() {
            let Decl::Check(check) = decl else {
                self.declare(decl).map_err(|e| located(line, e))?;
                continue;
            };
            let class = check.class.unwrap_or(self.class);
            let start = Instant::now();
            let outcome = self.check(check, class).unwrap_or_else(|e| Outcome {
                passed: false,
                verdict: format!("error: {e}"),
                data: Value::Null,
            });
            let elapsed_ms = self.timings.then(|| start.elapsed().as_millis());
            let per_degree = outcome.data.get("per_degree").cloned();
            log::info!("line {line}: {} -> {}", check, outcome.passed);
            results.push(DirectiveResult {
                line,
                directive: check.to_string(),
                check: check.kind.name().to_string(),
                class,
                passed: outcome.passed,
                verdict: outcome.verdict,
                per_degree,
                data: outcome.data,
                elapsed_ms,
            });
        }
        Ok(results)
    }

    fn declare(&mut self, decl: &Decl) -> anyhow::Result<()> {
        match decl {
            Decl::Field(_) | Decl::Class(_) | Decl::Check(_) => {}
            Decl::Free { name, generators } => {
                let p = Presentation::free(name, Alphabet::new(generators.iter().cloned())?);
                self.presentations.insert(name.clone(), (p, None));
            }
            Decl::Present { name, body } => {
                let entry = match body {
                    PresentBody::Explicit(p) => (p.clone(), None),
                    PresentBody::FreeNilpotent { rank, class } => {
                        (Presentation::free_nilpotent(name, *rank, *class)?, Some((*rank, *class)))
                    }
                };
                self.presentations.insert(name.clone(), entry);
            }
            Decl::Algebra { name, def } => {
                let l = self.algebra(def)?;
                self.algebras.insert(name.clone(), l);
            }
            Decl::Subdirect { name, factors, tuples } => {
                self.subdirects.insert(name.clone(), SubdirectDecl { factors: factors.clone(), tuples: tuples.clone() });
                // Build eagerly so that malformed tuples are reported at the declaration.
                self.subdirect(name, self.class)?;
            }
            Decl::Fibre { name, left, right, quotient, left_map, right_map } => {
                let spec = FibreSpec::new(
                    name,
                    self.presentation(left)?.0.clone(),
                    self.presentation(right)?.0.clone(),
                    self.presentation(quotient)?.0.clone(),
                    left_map,
                    right_map,
                )?;
                self.fibres.insert(name.clone(), spec);
            }
        }
        Ok(())
    }

    fn presentation(&self, name: &str) -> anyhow::Result<&(Presentation, Option<(usize, usize)>)> {
        self.presentations.get(name).ok_or_else(|| anyhow::anyhow!("no presentation named `{name}`"))
    }

    fn algebra_named(&self, name: &str) -> anyhow::Result<&FinDimLie<S>> {
        self.algebras.get(name).ok_or_else(|| anyhow::anyhow!("no algebra named `{name}`"))
    }

    fn algebra(&self, def: &AlgebraDef) -> anyhow::Result<FinDimLie<S>> {
        let f = &self.field;
        Ok(match def {
            AlgebraDef::Constants { basis, brackets } => {
                let abelian = FinDimLie::<S>::from_brackets(basis.clone(), f, std::iter::empty())?;
                let index = |n: &str| basis.iter().position(|b| b == n).expect("parser adds every name");
                let entries = brackets
                    .iter()
                    .map(|(a, b, e)| Ok(((index(a), index(b)), e.evaluate(&abelian)?)))
                    .collect::<lief_core::Result<Vec<_>>>()?;
                FinDimLie::from_brackets(basis.clone(), f, entries)?
            }
            AlgebraDef::Abelian(n) => FinDimLie::abelian(*n, f),
            AlgebraDef::Heisenberg => FinDimLie::heisenberg(f),
            AlgebraDef::Nilpotent { rank, class } => FinDimLie::free_nilpotent(*rank, *class, f)?,
            AlgebraDef::Sum(a, b) => self.algebra_named(a)?.direct_sum(self.algebra_named(b)?)?,
            AlgebraDef::Quotient { presentation, class } => {
                let p = &self.presentation(presentation)?.0;
                nilpotent_quotient::<S>(p, class.unwrap_or(self.class), f)?.algebra().clone()
            }
        })
    }

    fn subdirect(&mut self, name: &str, class: usize) -> anyhow::Result<&SubdirectSum<S>> {
        let key = (name.to_string(), class);
        if !self.built.contains_key(&key) {
            let decl = self.subdirects.get(name).ok_or_else(|| anyhow::anyhow!("no subdirect sum named `{name}`"))?;
            let mut factors = Vec::new();
            for f in &decl.factors {
                let alphabet = self.presentation(f)?.0.alphabet().clone();
                factors.push((f.clone(), FreeLieAlgebra::<S>::new(alphabet, class, &self.field)?));
            }
            let tuples = decl
                .tuples
                .iter()
                .map(|t| t.iter().zip(&factors).map(|(e, (_, free))| e.evaluate(free)).collect::<lief_core::Result<Vec<_>>>())
                .collect::<lief_core::Result<Vec<_>>>()?;
            let s = SubdirectSum::generated(class, factors, &tuples)?;
            self.built.insert(key.clone(), s);
        }
        Ok(&self.built[&key])
    }

    fn check(&mut self, check: &Check, class: usize) -> anyhow::Result<Outcome> {
        let f = self.field.clone();
        Ok(match &check.kind {
            CheckKind::Betti { algebra, degree, expect } => {
                let table = betti_numbers(self.algebra_named(algebra)?, algebra, *degree);
                let passed = expect.as_ref().is_none_or(|e| *e == table.betti);
                let mut verdict = format!("b = [{}]", list(&table.betti));
                if let (false, Some(e)) = (passed, expect) {
                    verdict.push_str(&format!(", expected [{}]", list(e)));
                }
                outcome(passed, verdict, &table)
            }
            CheckKind::Kunneth { left, right, degree } => {
                let rows = kunneth_table(self.algebra_named(left)?, self.algebra_named(right)?, *degree)?;
                let failed = rows.iter().find(|r| !r.holds);
                let verdict = match failed {
                    None => format!("b_n of the sum matches the convolution for n <= {degree}"),
                    Some(r) => format!("degree {}: computed {}, expected {}", r.degree, r.computed, r.expected),
                };
                outcome(failed.is_none(), verdict, &json!({ "per_degree": rows }))
            }
            CheckKind::Jacobi { algebra } => {
                let l = self.algebra_named(algebra)?;
                match l.check_jacobi() {
                    Ok(()) => outcome(true, "Jacobi identity holds", &json!({ "dim": l.dim() })),
                    Err(e) => outcome(false, e.to_string(), &json!({ "dim": l.dim() })),
                }
            }
            CheckKind::Hopf { presentation } => {
                let (p, nilpotent) = self.presentation(presentation)?;
                let c = nilpotent.map_or(class, |(_, k)| k);
                let h = hopf_h2::<S>(p, c, &f)?;
                let nq = nilpotent_quotient::<S>(p, c, &f)?;
                let b2 = betti_numbers(nq.algebra(), presentation, 2).betti[2];
                let witt = nilpotent.map(|(d, k)| witt_dimension(d, k + 1));
                let passed = h.dim == b2 && witt.is_none_or(|w| w == h.dim);
                let verdict = match witt {
                    Some(w) => format!("H2 = {} (Hopf), b2 = {b2}, Witt = {w}", h.dim),
                    None => format!("H2 = {} (Hopf), b2 = {b2}", h.dim),
                };
                outcome(passed, verdict, &json!({ "hopf": h, "betti2": b2, "witt": witt }))
            }
            CheckKind::RelationSequence { rank, class: c, degree } => {
                let r = relation_sequence_check::<S>(*rank, *c, *degree, &f)?;
                let verdict = match r.rows.iter().find(|row| !row.holds) {
                    None => format!("Euler identity holds through degree {degree}"),
                    Some(row) => format!("fails in degree {}", row.degree),
                };
                outcome(r.holds, verdict, &json!({ "rank": r.rank, "class": r.class, "per_degree": r.rows }))
            }
            CheckKind::Witt { rank, degree, expect } => {
                let w = witt_dimension(*rank, *degree);
                let lyndon = lyndon_words(*rank, *degree)?.len();
                let passed = w == lyndon && expect.is_none_or(|e| e == w);
                outcome(passed, format!("dim = {w}, Lyndon words = {lyndon}"), &json!({ "witt": w, "lyndon": lyndon }))
            }
            CheckKind::Quotient { presentation, expect } => {
                let p = &self.presentation(presentation)?.0;
                let nq = nilpotent_quotient::<S>(p, class, &f)?;
                let dims = nq.graded_dims()[1..].to_vec();
                let passed = expect.as_ref().is_none_or(|e| *e == dims);
                outcome(passed, format!("graded dims [{}]", list(&dims)), &json!({ "dims": dims, "dim": nq.algebra().dim() }))
            }
            CheckKind::Fp2 { presentation, degree } => {
                let ev = fp2_evidence::<S>(&self.presentation(presentation)?.0, *degree, &f)?;
                outcome(ev.generated_by.is_some(), ev.verdict.clone(), &ev)
            }
            CheckKind::Subdirect { sum } => {
                let s = self.subdirect(sum, class)?;
                let rows: Vec<_> = (0..s.factor_count()).map(|i| s.projection(&[i]).expect("valid index")).collect();
                let bad = s.subdirect_violation();
                let verdict = match bad {
                    None => format!("subdirect up to class {class}"),
                    Some((i, d)) => format!("projection to factor {i} deficient at degree {d}"),
                };
                outcome(bad.is_none(), verdict, &json!({ "per_degree": s.per_degree()[1..].to_vec(), "projections": rows }))
            }
            CheckKind::Projection { sum, factors } => {
                let s = self.subdirect(sum, class)?;
                let idx: Vec<usize> = factors.iter().map(|i| i - 1).collect();
                let r = s.projection(&idx)?;
                outcome(r.surjective, r.verdict.clone(), &r)
            }
            CheckKind::Intersect { sum, factor } => {
                let s = self.subdirect(sum, class)?;
                let r = s.intersect_factor(factor.checked_sub(1).ok_or_else(|| anyhow::anyhow!("factors start at 1"))?)?;
                let dims: Vec<usize> = r.per_degree.iter().map(|row| row.dim).collect();
                let nonzero = !r.subspace.is_zero();
                let verdict = format!("dims of L ∩ {} per degree: [{}]", r.factor, list(&dims));
                outcome(nonzero, verdict, &json!({ "factor": r.factor, "class": r.class, "per_degree": r.per_degree }))
            }
            CheckKind::Gamma { sum, term } => {
                let r = self.subdirect(sum, class)?.gamma_containment(*term);
                let verdict = match r.factors.iter().find(|row| row.first_failure.is_some()) {
                    None => format!("γ_{term} of every factor lies in L up to class {class}"),
                    Some(row) => {
                        format!("{} of γ_{term}({}) is not in L", row.first_failure.as_deref().unwrap_or_default(), row.factor)
                    }
                };
                outcome(r.holds, verdict, &r)
            }
            CheckKind::Witness { sum, factor, trials } => {
                let s = self.subdirect(sum, class)?;
                let t = factor
                    .checked_sub(1)
                    .filter(|&t| t < s.factor_count())
                    .ok_or_else(|| anyhow::anyhow!("bad factor {factor}"))?;
                let free = s.free(t).expect("script factors are free").clone();
                let k = s.factor_count();
                if k < 2 {
                    anyhow::bail!("witness needs at least two factors");
                }
                let max_degree = (class / (k - 1)).max(1);
                let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
                let mut reports = Vec::new();
                for _ in 0..*trials {
                    let fs: Vec<_> = (0..k - 1).map(|_| random_element(&free, max_degree, &mut rng)).collect();
                    reports.push(s.witness(t, &fs)?);
                }
                let good = reports.iter().filter(|r| r.in_subalgebra && r.matches).count();
                let verdict = format!("{good}/{trials} witnesses land in factor {factor} as predicted");
                outcome(good == *trials, verdict, &json!({ "factor": factor, "trials": reports }))
            }
            CheckKind::Contains { sum, tuple } => {
                let s = self.subdirect(sum, class)?;
                let mut v = SparseVec::zero();
                for (i, e) in tuple.iter().enumerate() {
                    let free = s.free(i).ok_or_else(|| anyhow::anyhow!("tuple longer than the number of factors"))?;
                    v = v.add(&s.sum().embed(i, &free.to_vector(&e.evaluate(free)?)));
                }
                if tuple.len() != s.factor_count() {
                    anyhow::bail!("expected {} coordinates", s.factor_count());
                }
                let inside = s.contains(&v);
                let shown = tuple.iter().map(ToString::to_string).collect::<Vec<_>>();
                let verdict = if inside {
                    format!("({}) lies in {sum}", list(&shown))
                } else {
                    let lowest = v.indices().map(|k| s.sum().degree(k)).min();
                    format!("({}) is not in {sum} (lowest degree {})", list(&shown), lowest.unwrap_or(0))
                };
                outcome(inside, verdict, &json!({ "tuple": shown }))
            }
            CheckKind::Fibre { fibre } => {
                let spec = self.fibres.get(fibre).ok_or_else(|| anyhow::anyhow!("no fibre sum named `{fibre}`"))?;
                let r = fibre_sum::<S>(spec, class, &f)?.report();
                outcome(r.agree && r.subdirect, r.verdict.clone(), &r)
            }
            CheckKind::Tilde { presentation, a } => {
                let p = &self.presentation(presentation)?.0;
                let tp = TildePresentation::build::<S>(p, a, &f)?;
                let r = verify_delta_abelian::<S>(&tp, class, &f)?;
                let shown = |v: &[BracketExpr]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
                let data = json!({
                    "presentation": r.presentation,
                    "R2": shown(&tp.r2),
                    "R3": shown(&tp.r3),
                    "R4": shown(&tp.r4),
                    "delta": tp.delta(),
                    "report": r,
                    "per_degree": r.per_degree,
                });
                outcome(r.holds, r.verdict.clone(), &data)
            }
        })
    }
}

fn located(line: usize, e: anyhow::Error) -> ScriptError {
    ScriptError { line, column: 1, message: e.to_string() }
}

/// A nonzero combination of up to three basis elements of degree at most
/// `max_degree`, with small integer coefficients.
pub(crate) fn random_element<S: Scalar>(free: &FreeLieAlgebra<S>, max_degree: usize, rng: &mut ChaCha8Rng) -> FreeLieElement<S> {
    let words: Vec<_> = (1..=max_degree.min(free.max_degree())).flat_map(|n| free.basis(n).to_vec()).collect();
    loop {
        let terms = (0..rng.gen_range(1..=3)).map(|_| {
            let w = words[rng.gen_range(0..words.len())].clone();
            (w, S::from_i64(free.field(), rng.gen_range(-3..=3)))
        });
        let e = free.from_terms(terms).expect("Lyndon words");
        if !e.is_zero() {
            return e;
        }
    }
}
