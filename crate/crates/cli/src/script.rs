//! The line-oriented `.lie` input format: parsing and canonical printing.

use std::collections::HashMap;
use std::fmt;

use lief_core::free_lie::{Alphabet, BracketExpr};
use lief_core::presentations::Presentation;
use lief_core::Error as CoreError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ScriptError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldChoice {
    Rational,
    Prime(u64),
}

impl fmt::Display for FieldChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldChoice::Rational => f.write_str("Q"),
            FieldChoice::Prime(p) => write!(f, "Fp {p}"),
        }
    }
}

impl FieldChoice {
    /// Accepts `Q`, `Fp:<p>` and `Fp <p>`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "Q" {
            return Some(FieldChoice::Rational);
        }
        let rest = s.strip_prefix("Fp")?.trim_start_matches([':', ' ']);
        rest.parse().ok().map(FieldChoice::Prime)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresentBody {
    Explicit(Presentation),
    FreeNilpotent { rank: usize, class: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraDef {
    /// Basis names, then `[a,b] = expr` entries.
    Constants {
        basis: Vec<String>,
        brackets: Vec<(String, String, BracketExpr)>,
    },
    Abelian(usize),
    Heisenberg,
    Nilpotent {
        rank: usize,
        class: usize,
    },
    Sum(String, String),
    Quotient {
        presentation: String,
        class: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Betti {
        algebra: String,
        degree: usize,
        expect: Option<Vec<usize>>,
    },
    Kunneth {
        left: String,
        right: String,
        degree: usize,
    },
    Jacobi {
        algebra: String,
    },
    Hopf {
        presentation: String,
    },
    RelationSequence {
        rank: usize,
        class: usize,
        degree: usize,
    },
    Witt {
        rank: usize,
        degree: usize,
        expect: Option<usize>,
    },
    Quotient {
        presentation: String,
        expect: Option<Vec<usize>>,
    },
    Fp2 {
        presentation: String,
        degree: usize,
    },
    Subdirect {
        sum: String,
    },
    /// 1-based factor indices.
    Projection {
        sum: String,
        factors: Vec<usize>,
    },
    Intersect {
        sum: String,
        factor: usize,
    },
    Gamma {
        sum: String,
        term: usize,
    },
    Witness {
        sum: String,
        factor: usize,
        trials: usize,
    },
    Contains {
        sum: String,
        tuple: Vec<BracketExpr>,
    },
    Fibre {
        fibre: String,
    },
    Tilde {
        presentation: String,
        a: Vec<String>,
    },
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Betti { .. } => "betti",
            CheckKind::Kunneth { .. } => "kunneth",
            CheckKind::Jacobi { .. } => "jacobi",
            CheckKind::Hopf { .. } => "hopf",
            CheckKind::RelationSequence { .. } => "relation-sequence",
            CheckKind::Witt { .. } => "witt",
            CheckKind::Quotient { .. } => "quotient",
            CheckKind::Fp2 { .. } => "fp2",
            CheckKind::Subdirect { .. } => "subdirect",
            CheckKind::Projection { .. } => "projection",
            CheckKind::Intersect { .. } => "intersect",
            CheckKind::Gamma { .. } => "gamma",
            CheckKind::Witness { .. } => "witness",
            CheckKind::Contains { .. } => "contains",
            CheckKind::Fibre { .. } => "fibre",
            CheckKind::Tilde { .. } => "tilde",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub kind: CheckKind,
    /// Per-directive truncation class.
    pub class: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Field(FieldChoice),
    Class(usize),
    Free {
        name: String,
        generators: Vec<String>,
    },
    Present {
        name: String,
        body: PresentBody,
    },
    Algebra {
        name: String,
        def: AlgebraDef,
    },
    Subdirect {
        name: String,
        factors: Vec<String>,
        tuples: Vec<Vec<BracketExpr>>,
    },
    Fibre {
        name: String,
        left: String,
        right: String,
        quotient: String,
        left_map: Vec<(String, Option<String>)>,
        right_map: Vec<(String, Option<String>)>,
    },
    Check(Check),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Free,
    Presentation,
    Algebra,
    Subdirect,
    Fibre,
}

impl Kind {
    fn describe(self) -> &'static str {
        match self {
            Kind::Free => "free algebra",
            Kind::Presentation => "presentation",
            Kind::Algebra => "algebra",
            Kind::Subdirect => "subdirect sum",
            Kind::Fibre => "fibre sum",
        }
    }
}

/// A parsed script. Equality compares declarations only, not line numbers.
#[derive(Clone, Debug, Default)]
pub struct Script {
    pub decls: Vec<Decl>,
    pub lines: Vec<usize>,
}

impl PartialEq for Script {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls
    }
}

impl Eq for Script {}

impl Script {
    pub fn field(&self) -> Option<FieldChoice> {
        self.decls.iter().find_map(|d| match d {
            Decl::Field(f) => Some(*f),
            _ => None,
        })
    }

    pub fn class(&self) -> Option<usize> {
        self.decls.iter().find_map(|d| match d {
            Decl::Class(c) => Some(*c),
            _ => None,
        })
    }

    pub fn items(&self) -> impl Iterator<Item = (usize, &Decl)> {
        self.lines.iter().copied().zip(&self.decls)
    }
}

/// Joins physical lines into statements: a statement continues while a
/// `(`, `[` or `{` is open. Comments run from `#` to the end of the line.
fn statements(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let mut depth = 0i32;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if current.trim().is_empty() {
            current.clear();
            start = i + 1;
        } else {
            current.push(' ');
        }
        current.push_str(line);
        depth += line
            .chars()
            .map(|c| match c {
                '(' | '[' | '{' => 1,
                ')' | ']' | '}' => -1,
                _ => 0,
            })
            .sum::<i32>();
        if depth <= 0 && !current.trim().is_empty() {
            out.push((start, std::mem::take(&mut current)));
            depth = 0;
        }
    }
    if !current.trim().is_empty() {
        out.push((start, current));
    }
    out
}

struct Ctx<'a> {
    line: usize,
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, at: &str, message: impl Into<String>) -> ScriptError {
        // `at` is a subslice of `text` whenever possible.
        let offset =
            (at.as_ptr() as usize).checked_sub(self.text.as_ptr() as usize).filter(|&o| o <= self.text.len()).unwrap_or(0);
        ScriptError { line: self.line, column: offset + 1, message: message.into() }
    }

    fn column_of(&self, at: &str) -> usize {
        self.err(at, "").column
    }

    fn core(&self, at: &str, e: CoreError) -> ScriptError {
        match e {
            CoreError::Syntax { column, message } => {
                ScriptError { line: self.line, column: self.column_of(at) + column - 1, message }
            }
            other => self.err(at, other.to_string()),
        }
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Splits off the first whitespace-delimited word.
fn word(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    let end = s.find(char::is_whitespace).unwrap_or(s.len());
    (&s[..end], &s[end..])
}

/// Contents of `open ... close` at the start of `s` (after whitespace),
/// matched with nesting, and the remainder.
fn delimited(s: &str, open: char, close: char) -> Option<(&str, &str)> {
    let s = s.trim_start();
    if !s.starts_with(open) {
        return None;
    }
    let mut depth = 0;
    for (i, c) in s.char_indices() {
        if c == open {
            depth += 1;
        } else if c == close {
            depth -= 1;
            if depth == 0 {
                return Some((&s[1..i], &s[i + 1..]));
            }
        }
    }
    None
}

/// Splits at commas outside brackets and parentheses.
fn split_commas(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    if out.len() == 1 && out[0].trim().is_empty() {
        out.clear();
    }
    out
}

struct Parser {
    names: HashMap<String, Kind>,
    field_seen: bool,
    class_seen: bool,
}

pub fn parse_script(text: &str) -> Result<Script, ScriptError> {
    let mut p = Parser { names: HashMap::new(), field_seen: false, class_seen: false };
    let mut script = Script::default();
    for (line, stmt) in statements(text) {
        let ctx = Ctx { line, text: &stmt };
        let decl = p.statement(&ctx, &stmt)?;
        script.decls.push(decl);
        script.lines.push(line);
    }
    Ok(script)
}

impl Parser {
    fn declare(&mut self, ctx: &Ctx, at: &str, name: &str, kind: Kind) -> Result<(), ScriptError> {
        if !is_ident(name) {
            return Err(ctx.err(at, format!("invalid name `{name}`")));
        }
        if self.names.contains_key(name) {
            return Err(ctx.err(at, format!("duplicate name `{name}`")));
        }
        self.names.insert(name.to_string(), kind);
        Ok(())
    }

    fn lookup(&self, ctx: &Ctx, at: &str, name: &str, allowed: &[Kind]) -> Result<String, ScriptError> {
        match self.names.get(name) {
            None => Err(ctx.err(at, format!("undeclared name `{name}`"))),
            Some(k) if !allowed.contains(k) => {
                Err(ctx.err(at, format!("`{name}` is a {}, expected a {}", k.describe(), allowed[0].describe())))
            }
            Some(_) => Ok(name.to_string()),
        }
    }

    fn number(&self, ctx: &Ctx, s: &str) -> Result<usize, ScriptError> {
        s.trim().parse().map_err(|_| ctx.err(s.trim_start(), format!("expected a number, found `{}`", s.trim())))
    }

    /// `name = rest`.
    fn binding<'s>(&self, ctx: &Ctx, s: &'s str) -> Result<(&'s str, &'s str), ScriptError> {
        let eq = s.find('=').ok_or_else(|| ctx.err(s, "expected `name = ...`"))?;
        Ok((s[..eq].trim(), s[eq + 1..].trim()))
    }

    fn statement(&mut self, ctx: &Ctx, stmt: &str) -> Result<Decl, ScriptError> {
        let (kw, rest) = word(stmt);
        match kw {
            "field" => {
                if self.field_seen {
                    return Err(ctx.err(kw, "field declared twice"));
                }
                self.field_seen = true;
                FieldChoice::parse(rest).map(Decl::Field).ok_or_else(|| ctx.err(rest.trim_start(), "expected `Q` or `Fp <p>`"))
            }
            "class" => {
                if self.class_seen {
                    return Err(ctx.err(kw, "class declared twice"));
                }
                self.class_seen = true;
                let c = self.number(ctx, rest)?;
                if c == 0 {
                    return Err(ctx.err(rest.trim_start(), "class must be at least 1"));
                }
                Ok(Decl::Class(c))
            }
            "free" => self.free(ctx, rest),
            "present" => self.present(ctx, rest),
            "algebra" => self.algebra(ctx, rest),
            "subdirect" => self.subdirect(ctx, rest),
            "fibre" => self.fibre(ctx, rest),
            "check" => self.check(ctx, rest).map(Decl::Check),
            _ => Err(ctx.err(kw, format!("unknown declaration `{kw}`"))),
        }
    }

    fn free(&mut self, ctx: &Ctx, rest: &str) -> Result<Decl, ScriptError> {
        let (name, body) = self.binding(ctx, rest)?;
        let inner = body
            .strip_prefix("free")
            .and_then(|b| delimited(b, '(', ')'))
            .filter(|(_, tail)| tail.trim().is_empty())
            .ok_or_else(|| ctx.err(body, "expected `free(x, y, ...)`"))?
            .0;
        let generators: Vec<String> = split_commas(inner).iter().map(|g| g.trim().to_string()).collect();
        Alphabet::new(generators.iter().cloned()).map_err(|e| ctx.core(inner, e))?;
        if let Some(bad) = generators.iter().find(|g| !is_ident(g)) {
            return Err(ctx.err(inner, format!("invalid generator name `{bad}`")));
        }
        self.declare(ctx, name, name, Kind::Free)?;
        Ok(Decl::Free { name: name.to_string(), generators })
    }

    fn present(&mut self, ctx: &Ctx, rest: &str) -> Result<Decl, ScriptError> {
        let (name, body) = self.binding(ctx, rest)?;
        let body = if let Some(b) = body.strip_prefix("free_nilpotent") {
            let (inner, tail) = delimited(b, '(', ')').ok_or_else(|| ctx.err(b, "expected `free_nilpotent(rank, class)`"))?;
            let args = split_commas(inner);
            if args.len() != 2 || !tail.trim().is_empty() {
                return Err(ctx.err(b, "expected `free_nilpotent(rank, class)`"));
            }
            let (rank, class) = (self.number(ctx, args[0])?, self.number(ctx, args[1])?);
            Presentation::free_nilpotent(name, rank, class).map_err(|e| ctx.core(b, e))?;
            PresentBody::FreeNilpotent { rank, class }
        } else {
            PresentBody::Explicit(Presentation::parse(name, body).map_err(|e| ctx.core(body, e))?)
        };
        self.declare(ctx, name, name, Kind::Presentation)?;
        Ok(Decl::Present { name: name.to_string(), body })
    }

    fn algebra(&mut self, ctx: &Ctx, rest: &str) -> Result<Decl, ScriptError> {
        let (name, body) = self.binding(ctx, rest)?;
        let call = |prefix: &str| -> Option<Vec<&str>> {
            let b = body.strip_prefix(prefix)?;
            let (inner, tail) = delimited(b, '(', ')')?;
            tail.trim().is_empty().then(|| split_commas(inner))
        };
        let def = if body == "heisenberg" {
            AlgebraDef::Heisenberg
        } else if let Some(b) = body.strip_prefix("constants") {
            self.constants(ctx, b)?
        } else if let Some(args) = call("abelian") {
            match args[..] {
                [n] => AlgebraDef::Abelian(self.number(ctx, n)?),
                _ => return Err(ctx.err(body, "expected `abelian(n)`")),
            }
        } else if let Some(args) = call("nilpotent") {
            match args[..] {
                [r, c] => AlgebraDef::Nilpotent { rank: self.number(ctx, r)?, class: self.number(ctx, c)? },
                _ => return Err(ctx.err(body, "expected `nilpotent(rank, class)`")),
            }
        } else if let Some(args) = call("sum") {
            match args[..] {
                [a, b] => AlgebraDef::Sum(
                    self.lookup(ctx, a.trim(), a.trim(), &[Kind::Algebra])?,
                    self.lookup(ctx, b.trim(), b.trim(), &[Kind::Algebra])?,
                ),
                _ => return Err(ctx.err(body, "expected `sum(A, B)`")),
            }
        } else if let Some(args) = call("quotient") {
            let (p, class) = match args[..] {
                [p] => (p, None),
                [p, c] => (p, Some(self.number(ctx, c)?)),
                _ => return Err(ctx.err(body, "expected `quotient(L)` or `quotient(L, class)`")),
            };
            AlgebraDef::Quotient { presentation: self.lookup(ctx, p.trim(), p.trim(), &[Kind::Presentation, Kind::Free])?, class }
        } else {
            return Err(
                ctx.err(body, "expected constants{...}, abelian(n), heisenberg, nilpotent(r, c), sum(A, B) or quotient(L)")
            );
        };
        self.declare(ctx, name, name, Kind::Algebra)?;
        Ok(Decl::Algebra { name: name.to_string(), def })
    }

    fn constants(&self, ctx: &Ctx, b: &str) -> Result<AlgebraDef, ScriptError> {
        let (inner, tail) = delimited(b, '{', '}').ok_or_else(|| ctx.err(b, "expected `constants{ ... }`"))?;
        if !tail.trim().is_empty() {
            return Err(ctx.err(tail, "unexpected input after `}`"));
        }
        let mut basis: Vec<String> = Vec::new();
        let mut brackets = Vec::new();
        let add = |n: &str, basis: &mut Vec<String>| {
            if !basis.iter().any(|b| b == n) {
                basis.push(n.to_string());
            }
        };
        for entry in split_commas(inner) {
            let e = entry.trim();
            match e.find('=') {
                None => {
                    if !is_ident(e) {
                        return Err(ctx.err(entry, format!("invalid basis name `{e}`")));
                    }
                    add(e, &mut basis);
                }
                Some(eq) => {
                    let lhs = e[..eq].trim();
                    let (pair, tail) = delimited(lhs, '[', ']').ok_or_else(|| ctx.err(entry, "expected `[a,b] = ...`"))?;
                    let names: Vec<&str> = split_commas(pair).into_iter().map(str::trim).collect();
                    if names.len() != 2 || !tail.trim().is_empty() || !names.iter().all(|n| is_ident(n)) {
                        return Err(ctx.err(entry, "expected `[a,b] = ...` with basis names a, b"));
                    }
                    let rhs_text = &e[eq + 1..];
                    let rhs = BracketExpr::parse(rhs_text).map_err(|err| ctx.core(rhs_text, err))?;
                    if has_bracket(&rhs) {
                        return Err(ctx.err(rhs_text, "right-hand side must be a linear combination of basis names"));
                    }
                    add(names[0], &mut basis);
                    add(names[1], &mut basis);
                    for n in rhs.names() {
                        add(&n, &mut basis);
                    }
                    brackets.push((names[0].to_string(), names[1].to_string(), rhs));
                }
            }
        }
        Ok(AlgebraDef::Constants { basis, brackets })
    }

    fn subdirect(&mut self, ctx: &Ctx, rest: &str) -> Result<Decl, ScriptError> {
        let (name, after) = word(rest);
        let (kw, after) = word(after);
        if kw != "in" {
            return Err(ctx.err(kw, "expected `subdirect S in F1 + F2 gens { ... }`"));
        }
        let gens_at = after.find("gens").ok_or_else(|| ctx.err(after, "expected `gens { ... }`"))?;
        let mut factors = Vec::new();
        for f in after[..gens_at].split('+') {
            factors.push(self.lookup(ctx, f.trim_start(), f.trim(), &[Kind::Free])?);
        }
        let body = &after[gens_at + 4..];
        let (inner, tail) = delimited(body, '{', '}').ok_or_else(|| ctx.err(body, "expected `{ (..), ... }`"))?;
        if !tail.trim().is_empty() {
            return Err(ctx.err(tail, "unexpected input after `}`"));
        }
        let mut tuples = Vec::new();
        for t in split_commas(inner) {
            let (items, extra) =
                delimited(t, '(', ')').ok_or_else(|| ctx.err(t.trim_start(), "expected a tuple `(e1, e2, ...)`"))?;
            if !extra.trim().is_empty() {
                return Err(ctx.err(extra, "unexpected input after tuple"));
            }
            tuples.push(self.tuple(ctx, items, factors.len())?);
        }
        self.declare(ctx, name, name, Kind::Subdirect)?;
        Ok(Decl::Subdirect { name: name.to_string(), factors, tuples })
    }

    fn tuple(&self, ctx: &Ctx, items: &str, len: usize) -> Result<Vec<BracketExpr>, ScriptError> {
        let parts = split_commas(items);
        if parts.len() != len {
            return Err(ctx.err(items, format!("expected {len} coordinates, found {}", parts.len())));
        }
        parts.iter().map(|p| BracketExpr::parse(p).map_err(|e| ctx.core(p, e))).collect()
    }

    fn fibre(&mut self, ctx: &Ctx, rest: &str) -> Result<Decl, ScriptError> {
        let (name, body) = self.binding(ctx, rest)?;
        let b = body.strip_prefix("pullback").ok_or_else(|| ctx.err(body, "expected `pullback(L1 -> Q, L2 -> Q)`"))?;
        let (inner, tail) = delimited(b, '(', ')').ok_or_else(|| ctx.err(b, "expected `pullback(L1 -> Q, L2 -> Q)`"))?;
        let arms = split_commas(inner);
        let arrow = |s: &str| -> Option<(String, String)> {
            let (a, q) = s.split_once("->")?;
            Some((a.trim().to_string(), q.trim().to_string()))
        };
        let (Some((left, q1)), Some((right, q2))) = (arms.first().and_then(|s| arrow(s)), arms.get(1).and_then(|s| arrow(s)))
        else {
            return Err(ctx.err(inner, "expected `L1 -> Q, L2 -> Q`"));
        };
        if arms.len() != 2 || q1 != q2 {
            return Err(ctx.err(inner, "both arms must map to the same quotient"));
        }
        let kinds = [Kind::Presentation, Kind::Free];
        let left = self.lookup(ctx, inner, &left, &kinds)?;
        let right = self.lookup(ctx, inner, &right, &kinds)?;
        let quotient = self.lookup(ctx, inner, &q1, &kinds)?;
        let (mut left_map, mut right_map) = (Vec::new(), Vec::new());
        let tail = tail.trim();
        if !tail.is_empty() {
            let m = tail.strip_prefix("map").ok_or_else(|| ctx.err(tail, "expected `map { ... }`"))?;
            let (maps, extra) = delimited(m, '{', '}').ok_or_else(|| ctx.err(m, "expected `map { ... }`"))?;
            if !extra.trim().is_empty() {
                return Err(ctx.err(extra, "unexpected input after `}`"));
            }
            let (l, r) = maps.split_once(';').unwrap_or((maps, ""));
            left_map = self.assignments(ctx, l)?;
            right_map = self.assignments(ctx, r)?;
        }
        self.declare(ctx, name, name, Kind::Fibre)?;
        Ok(Decl::Fibre { name: name.to_string(), left, right, quotient, left_map, right_map })
    }

    fn assignments(&self, ctx: &Ctx, s: &str) -> Result<Vec<(String, Option<String>)>, ScriptError> {
        split_commas(s)
            .into_iter()
            .map(|a| {
                let (from, to) = a.split_once("->").ok_or_else(|| ctx.err(a.trim_start(), "expected `g -> q` or `g -> 0`"))?;
                let (from, to) = (from.trim(), to.trim());
                if !is_ident(from) || !(to == "0" || is_ident(to)) {
                    return Err(ctx.err(a.trim_start(), "expected `g -> q` or `g -> 0`"));
                }
                Ok((from.to_string(), (to != "0").then(|| to.to_string())))
            })
            .collect()
    }

    fn check(&self, ctx: &Ctx, rest: &str) -> Result<Check, ScriptError> {
        // Optional trailing `class <c>`.
        let mut body = rest.trim();
        let mut class = None;
        if let Some(pos) = body.rfind(" class ") {
            let tail = &body[pos + 7..];
            if let Ok(c) = tail.trim().parse::<usize>() {
                if c == 0 {
                    return Err(ctx.err(tail, "class must be at least 1"));
                }
                class = Some(c);
                body = body[..pos].trim_end();
            }
        }
        let (kind_word, args_text) = word(body);
        let args: Vec<&str> = args_text.split_whitespace().collect();
        let expect_pos = args.iter().position(|a| *a == "expect");
        let (args, expect) = match expect_pos {
            Some(k) => (&args[..k], Some(args[k + 1..].join(" "))),
            None => (&args[..], None),
        };
        let expect_list = |e: &Option<String>| -> Result<Option<Vec<usize>>, ScriptError> {
            e.as_ref().map(|s| s.split(',').map(|n| self.number(ctx, n)).collect::<Result<Vec<_>, _>>()).transpose()
        };
        let arity = |n: usize| -> Result<(), ScriptError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(ctx.err(kind_word, format!("`check {kind_word}` takes {n} argument(s)")))
            }
        };
        let alg = |s: &str| self.lookup(ctx, args_text.trim_start(), s, &[Kind::Algebra]);
        let pres = |s: &str| self.lookup(ctx, args_text.trim_start(), s, &[Kind::Presentation, Kind::Free]);
        let sub = |s: &str| self.lookup(ctx, args_text.trim_start(), s, &[Kind::Subdirect]);
        let kind = match kind_word {
            "betti" => {
                arity(2)?;
                CheckKind::Betti { algebra: alg(args[0])?, degree: self.number(ctx, args[1])?, expect: expect_list(&expect)? }
            }
            "kunneth" => {
                arity(3)?;
                CheckKind::Kunneth { left: alg(args[0])?, right: alg(args[1])?, degree: self.number(ctx, args[2])? }
            }
            "jacobi" => {
                arity(1)?;
                CheckKind::Jacobi { algebra: alg(args[0])? }
            }
            "hopf" => {
                arity(1)?;
                CheckKind::Hopf { presentation: pres(args[0])? }
            }
            "relation-sequence" => {
                arity(3)?;
                CheckKind::RelationSequence {
                    rank: self.number(ctx, args[0])?,
                    class: self.number(ctx, args[1])?,
                    degree: self.number(ctx, args[2])?,
                }
            }
            "witt" => {
                arity(2)?;
                let expect = expect.as_deref().map(|e| self.number(ctx, e)).transpose()?;
                CheckKind::Witt { rank: self.number(ctx, args[0])?, degree: self.number(ctx, args[1])?, expect }
            }
            "quotient" => {
                arity(1)?;
                CheckKind::Quotient { presentation: pres(args[0])?, expect: expect_list(&expect)? }
            }
            "fp2" => {
                arity(2)?;
                CheckKind::Fp2 { presentation: pres(args[0])?, degree: self.number(ctx, args[1])? }
            }
            "subdirect" => {
                arity(1)?;
                CheckKind::Subdirect { sum: sub(args[0])? }
            }
            "projection" => {
                if args.len() < 2 {
                    return Err(ctx.err(kind_word, "`check projection S i ...` needs factor indices"));
                }
                let factors = args[1..].iter().map(|a| self.number(ctx, a)).collect::<Result<Vec<_>, _>>()?;
                if factors.contains(&0) {
                    return Err(ctx.err(args_text.trim_start(), "factor indices start at 1"));
                }
                CheckKind::Projection { sum: sub(args[0])?, factors }
            }
            "intersect" => {
                arity(2)?;
                CheckKind::Intersect { sum: sub(args[0])?, factor: self.number(ctx, args[1])? }
            }
            "gamma" => {
                arity(2)?;
                CheckKind::Gamma { sum: sub(args[0])?, term: self.number(ctx, args[1])? }
            }
            "witness" => {
                arity(3)?;
                CheckKind::Witness { sum: sub(args[0])?, factor: self.number(ctx, args[1])?, trials: self.number(ctx, args[2])? }
            }
            "contains" => {
                let (s, t) = word(args_text);
                let sum = sub(s)?;
                let (items, extra) = delimited(t, '(', ')').ok_or_else(|| ctx.err(t.trim_start(), "expected a tuple"))?;
                if !extra.trim().is_empty() {
                    return Err(ctx.err(extra, "unexpected input after tuple"));
                }
                let tuple = split_commas(items)
                    .iter()
                    .map(|p| BracketExpr::parse(p).map_err(|e| ctx.core(p, e)))
                    .collect::<Result<Vec<_>, _>>()?;
                CheckKind::Contains { sum, tuple }
            }
            "fibre" => {
                arity(1)?;
                CheckKind::Fibre { fibre: self.lookup(ctx, args_text.trim_start(), args[0], &[Kind::Fibre])? }
            }
            "tilde" => {
                if args.is_empty() {
                    return Err(ctx.err(kind_word, "`check tilde L a1 a2 ...` needs a presentation"));
                }
                CheckKind::Tilde { presentation: pres(args[0])?, a: args[1..].iter().map(|s| s.to_string()).collect() }
            }
            _ => return Err(ctx.err(kind_word, format!("unknown check `{kind_word}`"))),
        };
        Ok(Check { kind, class })
    }
}

fn has_bracket(e: &BracketExpr) -> bool {
    match e {
        BracketExpr::Zero | BracketExpr::Name(_) => false,
        BracketExpr::Bracket(..) => true,
        BracketExpr::Add(a, b) | BracketExpr::Sub(a, b) => has_bracket(a) || has_bracket(b),
        BracketExpr::Neg(a) | BracketExpr::Scale(_, _, a) => has_bracket(a),
    }
}

fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

fn render_map(m: &[(String, Option<String>)]) -> String {
    join(&m.iter().map(|(a, b)| format!("{a} -> {}", b.as_deref().unwrap_or("0"))).collect::<Vec<_>>(), ", ")
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check {}", self.kind.name())?;
        let list = |v: &[usize]| join(v, ",");
        match &self.kind {
            CheckKind::Betti { algebra, degree, expect } => {
                write!(f, " {algebra} {degree}")?;
                if let Some(e) = expect {
                    write!(f, " expect {}", list(e))?;
                }
            }
            CheckKind::Kunneth { left, right, degree } => write!(f, " {left} {right} {degree}")?,
            CheckKind::Jacobi { algebra } => write!(f, " {algebra}")?,
            CheckKind::Hopf { presentation } => write!(f, " {presentation}")?,
            CheckKind::RelationSequence { rank, class, degree } => write!(f, " {rank} {class} {degree}")?,
            CheckKind::Witt { rank, degree, expect } => {
                write!(f, " {rank} {degree}")?;
                if let Some(e) = expect {
                    write!(f, " expect {e}")?;
                }
            }
            CheckKind::Quotient { presentation, expect } => {
                write!(f, " {presentation}")?;
                if let Some(e) = expect {
                    write!(f, " expect {}", list(e))?;
                }
            }
            CheckKind::Fp2 { presentation, degree } => write!(f, " {presentation} {degree}")?,
            CheckKind::Subdirect { sum } => write!(f, " {sum}")?,
            CheckKind::Projection { sum, factors } => write!(f, " {sum} {}", join(factors, " "))?,
            CheckKind::Intersect { sum, factor } => write!(f, " {sum} {factor}")?,
            CheckKind::Gamma { sum, term } => write!(f, " {sum} {term}")?,
            CheckKind::Witness { sum, factor, trials } => write!(f, " {sum} {factor} {trials}")?,
            CheckKind::Contains { sum, tuple } => write!(f, " {sum} ({})", join(tuple, ", "))?,
            CheckKind::Fibre { fibre } => write!(f, " {fibre}")?,
            CheckKind::Tilde { presentation, a } => {
                write!(f, " {presentation}")?;
                for n in a {
                    write!(f, " {n}")?;
                }
            }
        }
        if let Some(c) = self.class {
            write!(f, " class {c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Field(c) => write!(f, "field {c}"),
            Decl::Class(c) => write!(f, "class {c}"),
            Decl::Free { name, generators } => write!(f, "free {name} = free({})", generators.join(", ")),
            Decl::Present { name, body: PresentBody::Explicit(p) } => write!(f, "present {name} = {p}"),
            Decl::Present { name, body: PresentBody::FreeNilpotent { rank, class } } => {
                write!(f, "present {name} = free_nilpotent({rank}, {class})")
            }
            Decl::Algebra { name, def } => {
                write!(f, "algebra {name} = ")?;
                match def {
                    AlgebraDef::Constants { basis, brackets } => {
                        let mut entries: Vec<String> = basis.clone();
                        entries.extend(brackets.iter().map(|(a, b, e)| format!("[{a},{b}] = {e}")));
                        write!(f, "constants{{ {} }}", entries.join(", "))
                    }
                    AlgebraDef::Abelian(n) => write!(f, "abelian({n})"),
                    AlgebraDef::Heisenberg => f.write_str("heisenberg"),
                    AlgebraDef::Nilpotent { rank, class } => write!(f, "nilpotent({rank}, {class})"),
                    AlgebraDef::Sum(a, b) => write!(f, "sum({a}, {b})"),
                    AlgebraDef::Quotient { presentation, class: None } => write!(f, "quotient({presentation})"),
                    AlgebraDef::Quotient { presentation, class: Some(c) } => write!(f, "quotient({presentation}, {c})"),
                }
            }
            Decl::Subdirect { name, factors, tuples } => {
                let tuples: Vec<String> = tuples.iter().map(|t| format!("({})", join(t, ", "))).collect();
                write!(f, "subdirect {name} in {} gens {{ {} }}", factors.join(" + "), tuples.join(", "))
            }
            Decl::Fibre { name, left, right, quotient, left_map, right_map } => {
                write!(f, "fibre {name} = pullback({left} -> {quotient}, {right} -> {quotient})")?;
                if !left_map.is_empty() || !right_map.is_empty() {
                    write!(f, " map {{ {} ; {} }}", render_map(left_map), render_map(right_map))?;
                }
                Ok(())
            }
            Decl::Check(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_declaration() {
        let s = parse_script("free F = free(x,y)").unwrap();
        assert_eq!(s.decls, vec![Decl::Free { name: "F".into(), generators: vec!["x".into(), "y".into()] }]);
    }

    #[test]
    fn presentation_declaration() {
        let s = parse_script("present L = <x,y | [x,y]>").unwrap();
        match &s.decls[0] {
            Decl::Present { body: PresentBody::Explicit(p), .. } => assert_eq!(p.relators().len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unclosed_bracket_is_located() {
        let err = parse_script("present L = <x,y | [x,y>").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.column >= 20, "{err}");
    }

    #[test]
    fn names_must_exist_and_be_unique() {
        assert!(parse_script("check betti H 3").unwrap_err().message.contains("undeclared"));
        let err = parse_script("algebra H = heisenberg\nalgebra H = abelian(2)").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("duplicate"));
        assert!(parse_script("free F = free(x)\ncheck betti F 2").unwrap_err().message.contains("expected a algebra"));
    }

    #[test]
    fn single_field_and_class() {
        assert!(parse_script("field Q\nfield Fp 7").is_err());
        assert!(parse_script("class 3\nclass 4").is_err());
        assert_eq!(parse_script("field Fp:7").unwrap().field(), Some(FieldChoice::Prime(7)));
    }

    #[test]
    fn multi_line_statements_and_comments() {
        let text = "free A = free(x1, y1) # first\nfree B = free(x2, y2)\nsubdirect S in A + B gens {\n  (x1, x2),\n  (y1, 0)\n}\ncheck projection S 1 2 class 3\n";
        let s = parse_script(text).unwrap();
        assert_eq!(s.lines, vec![1, 2, 3, 7]);
        match &s.decls[3] {
            Decl::Check(c) => assert_eq!(c.class, Some(3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constants_infer_basis() {
        let s = parse_script("algebra H = constants{ [x,y]=z }").unwrap();
        match &s.decls[0] {
            Decl::Algebra { def: AlgebraDef::Constants { basis, .. }, .. } => assert_eq!(basis, &["x", "y", "z"]),
            other => panic!("{other:?}"),
        }
        assert!(parse_script("algebra H = constants{ [x,y]=[x,z] }").is_err());
    }

    #[test]
    fn fibre_maps() {
        let text = "present H = <x, y, z | [x,y] - z>\nfree F = free(x, y)\npresent Q = <x, y | [x,y]>\nfibre P = pullback(H -> Q, F -> Q) map { z -> 0 ; x -> x }";
        let s = parse_script(text).unwrap();
        match &s.decls[3] {
            Decl::Fibre { left_map, right_map, .. } => {
                assert_eq!(left_map, &[("z".to_string(), None)]);
                assert_eq!(right_map, &[("x".to_string(), Some("x".to_string()))]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pretty_print_round_trip() {
        let text = "field Fp 7\nclass 3\nfree F = free(x,y)\nfree G = free(u, v)\npresent L = <x,y | [x,[x,y]], 2*[y,[x,y]]>\n\
            present N = free_nilpotent(2,2)\nalgebra H = constants{ [x,y]=z }\nalgebra A = abelian(2)\nalgebra S2 = sum(H, A)\n\
            algebra QL = quotient(L, 3)\nsubdirect S in F + G gens { (x, u), ([x,y], 0), (0, -1/2*[u,v]) }\n\
            fibre P = pullback(L -> N, F -> N) map { x -> x ; y -> y }\ncheck betti H 3 expect 1,2,2,1\ncheck kunneth H A 4\n\
            check contains S (x, u) class 2\ncheck tilde L y\ncheck witt 2 6 expect 9\n";
        let s = parse_script(text).unwrap();
        let printed = s.to_string();
        let again = parse_script(&printed).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_string(), printed);
    }
}
