//! Line-oriented lexicon language.
//!
//! ```text
//! # comment
//! domain colour continuous 3 [0,360] [0,1] [0,1]
//! domain sentence lattice tuplemax 2
//! domain food lattice tree (food (fruit apples bananas) beer)
//! space N = colour * taste * texture
//! property yellow on colour box [45,75]x[0.5,1]x[0,1]
//! property fruity on taste hull sweet sour
//! property good on sentence set {(1,0), (1,1)}
//! noun banana = [60,95]x[0.75,1]x[0.25,1] * hull(sweet bitter) * [0.2,0.5]
//! adj yellow diag yellow
//! adj soft diag cells { banana & (full * full * [0,0.35]) ; apple & (full * full * [0,0.6]) }
//! adj odd cells { banana -> apple }
//! verb taste type n.r s n.l cells { "green banana" x {(0,0)} x bitter ; ... }
//! pronoun which subjectrel
//! ```
//!
//! A state expression is a product of factors (`*` and `x` both separate
//! factors) laid over the target space from left to right; each factor
//! covers as many domains as it needs. Factors are box literals (`x` glued
//! between intervals with no spaces), lattice sets `{...}`, `full`,
//! property or word names, quoted phrases (evaluated), `hull(...)`,
//! parenthesised expressions and `cells { a ; b }` unions. `&` intersects.
//! A lone property name on a larger space is lifted to it.
//! Statements end at a newline outside brackets.

use std::fmt::Write as _;
use std::path::Path;

use crate::convex::{hull, ConvexSet, Label, Shape};
use crate::domain::{AtomicDomain, Domain, DomainKind, Interval, LatticeOrigin, Point, TreeNode};
use crate::error::{Error, Result};
use crate::pregroup::{parse_type_string, TypeString};
use crate::relation::{Cell, Relation, Space};
use crate::scalar::{fmt_decimal, parse_scalar, Scalar};
use crate::semantics::{
    adjective_type, evaluate_phrase, lift_property, noun_type, relative_pronoun_type, LexicalEntry, Lexicon, Meaning,
};

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MalformedInput(format!("cannot read {}: {e}", path.display())))?;
    parse_lexicon(&text)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Sym(&'static str),
    Newline,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
    /// Whitespace (or line start) directly before the token.
    spaced: bool,
}

const SYMBOLS: [&str; 12] = ["->", "[", "]", "(", ")", "{", "}", ",", "*", "&", ";", "="];

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut depth: i32 = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        let mut spaced = true;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let err = |message: String| Error::Syntax { line, column: col, message };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                spaced = true;
                i += 1;
                continue;
            }
            let tok = if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || matches!(chars[i], '_' | '.' | '\'')) {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_digit() || matches!(chars[i], '.' | '/')) {
                    i += 1;
                }
                Tok::Number(chars[start..i].iter().collect())
            } else if c == '"' {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(err("unterminated string".into()));
                }
                i += 1;
                Tok::Str(chars[start..i - 1].iter().collect())
            } else if let Some(sym) = SYMBOLS.iter().find(|s| raw[char_offset(raw, i)..].starts_with(**s)) {
                i += sym.chars().count();
                match *sym {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => depth -= 1,
                    _ => {}
                }
                if depth < 0 {
                    return Err(err(format!("unbalanced `{sym}`")));
                }
                Tok::Sym(sym)
            } else {
                return Err(err(format!("unexpected character `{c}`")));
            };
            out.push(Token { tok, line, col, spaced });
            spaced = false;
        }
        if depth == 0 {
            out.push(Token { tok: Tok::Newline, line, col: chars.len() + 1, spaced: true });
        }
    }
    if depth != 0 {
        let line = text.lines().count().max(1);
        return Err(Error::Syntax { line, column: 1, message: "unclosed bracket at end of input".into() });
    }
    Ok(out)
}

fn char_offset(s: &str, chars: usize) -> usize {
    s.char_indices().nth(chars).map(|(b, _)| b).unwrap_or(s.len())
}

/// Parsed state expression, before it is laid over a space.
#[derive(Debug, Clone)]
enum Expr {
    Box(Vec<Interval>),
    Full,
    Lattice(Vec<String>),
    Name(String),
    Phrase(String),
    Hull(Vec<Expr>),
    Product(Vec<Expr>),
    Inter(Vec<Expr>),
    Union(Vec<Expr>),
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    lex: &'a mut Lexicon,
}

pub fn parse_lexicon(text: &str) -> Result<Lexicon> {
    let mut lexicon = Lexicon::new();
    let mut p = Parser { toks: lex(text)?, pos: 0, lex: &mut lexicon };
    while p.pos < p.toks.len() {
        if p.peek_is(&Tok::Newline) {
            p.pos += 1;
            continue;
        }
        p.statement()?;
    }
    Ok(lexicon)
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_is(&self, t: &Tok) -> bool {
        self.pos < self.toks.len() && &self.toks[self.pos].tok == t
    }

    fn peek_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s) && self.pos < self.toks.len()
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let t = self.peek();
        Error::Syntax { line: t.line, column: t.col, message: message.into() }
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        self.pos += 1;
        t
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{kw}`"))),
        }
    }

    fn sym(&mut self, s: &str) -> Result<()> {
        if self.peek_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    fn number(&mut self) -> Result<Scalar> {
        match &self.peek().tok {
            Tok::Number(s) => {
                let v = parse_scalar(s).ok_or_else(|| self.error(format!("bad number `{s}`")))?;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.error("expected a number")),
        }
    }

    fn end_of_statement(&mut self) -> Result<()> {
        if self.peek_is(&Tok::Newline) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error("expected end of line"))
        }
    }

    fn statement(&mut self) -> Result<()> {
        let kw = self.ident("a declaration keyword")?;
        match kw.as_str() {
            "domain" => self.domain()?,
            "space" => self.space()?,
            "property" => self.property()?,
            "noun" => self.noun()?,
            "adj" => self.adjective()?,
            "verb" => self.verb()?,
            "pronoun" => self.pronoun()?,
            _ => {
                self.pos -= 1;
                return Err(self.error(format!("unknown declaration `{kw}`")));
            }
        }
        self.end_of_statement()
    }

    fn interval(&mut self) -> Result<Interval> {
        let at = self.peek().clone();
        self.sym("[")?;
        let lo = self.number()?;
        self.sym(",")?;
        let hi = self.number()?;
        self.sym("]")?;
        Interval::new(lo, hi).map_err(|e| Error::Syntax { line: at.line, column: at.col, message: e.to_string() })
    }

    fn domain(&mut self) -> Result<()> {
        let name = self.ident("a domain name")?;
        let kind = self.ident("`continuous` or `lattice`")?;
        let domain = match kind.as_str() {
            "continuous" => {
                let dim = self.number()?;
                let dim: usize = dim
                    .to_integer()
                    .try_into()
                    .ok()
                    .filter(|d| *d > 0 && dim.is_integer())
                    .ok_or_else(|| self.error("dimension must be a positive integer"))?;
                let mut bounds = Vec::new();
                for _ in 0..dim {
                    bounds.push(self.interval()?);
                }
                AtomicDomain::continuous(&name, bounds)
            }
            "lattice" => match self.ident("`tuplemax` or `tree`")?.as_str() {
                "tuplemax" => {
                    let k = self.number()?;
                    let k: usize = k.to_integer().try_into().ok().filter(|_| k.is_integer()).ok_or_else(|| self.error("bad width"))?;
                    AtomicDomain::tuple_max(&name, k)
                }
                "tree" => {
                    let root = self.tree()?;
                    AtomicDomain::tree(&name, root)
                }
                other => return Err(self.error(format!("unknown lattice kind `{other}`"))),
            },
            other => return Err(self.error(format!("unknown domain kind `{other}`"))),
        }
        .map_err(|e| validation(&name, e))?;
        self.lex.add_domain(domain)
    }

    fn tree(&mut self) -> Result<TreeNode> {
        if !self.peek_sym("(") {
            return Ok(TreeNode::leaf(self.ident("a tree node")?));
        }
        self.sym("(")?;
        let name = self.ident("a tree node")?;
        let mut children = Vec::new();
        while !self.peek_sym(")") {
            children.push(self.tree()?);
        }
        self.sym(")")?;
        Ok(TreeNode::node(name, children))
    }

    fn space(&mut self) -> Result<()> {
        let name = self.ident("a space name")?;
        self.sym("=")?;
        let mut factors = Vec::new();
        loop {
            let d = self.ident("a domain name")?;
            let domain = self.lex.domain(&d).cloned().ok_or_else(|| invalid(&name, format!("unknown domain `{d}`")))?;
            factors.push(domain);
            if self.peek_sym("*") {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.lex.add_space(&name, Space::new(factors))
    }

    fn property(&mut self) -> Result<()> {
        let name = self.ident("a property name")?;
        self.keyword("on")?;
        let dname = self.ident("a domain name")?;
        let domain = self.lex.domain(&dname).cloned().ok_or_else(|| invalid(&name, format!("unknown domain `{dname}`")))?;
        let how = self.ident("`box`, `hull` or `set`")?;
        let set = match how.as_str() {
            "box" => {
                let Expr::Box(ivs) = self.box_literal()? else { unreachable!() };
                ConvexSet::boxed(&domain, ivs).map_err(|e| validation(&name, e))?
            }
            "hull" => {
                let mut items = Vec::new();
                while !self.peek_is(&Tok::Newline) {
                    items.push(self.atom()?);
                }
                if items.is_empty() {
                    return Err(self.error("expected hull parts"));
                }
                let r = self.eval(&Expr::Hull(items), std::slice::from_ref(&domain), &name)?;
                r.cells()[0].components()[0].clone()
            }
            "set" => {
                let e = self.atom()?;
                let Expr::Lattice(_) = e else { return Err(self.error("expected `{...}`")) };
                let r = self.eval(&e, std::slice::from_ref(&domain), &name)?;
                r.cells()[0].components()[0].clone()
            }
            other => return Err(self.error(format!("unknown property form `{other}`"))),
        };
        self.lex.add_property(&name, set)
    }

    fn noun_space(&self, word: &str) -> Result<Space> {
        self.lex.interpretation().interpret(&noun_type()).map_err(|e| validation(word, e))
    }

    fn noun(&mut self) -> Result<()> {
        let word = self.ident("a word")?;
        self.sym("=")?;
        let expr = self.expr()?;
        let space = self.noun_space(&word)?;
        let state = self.eval_state(&expr, &space, &word)?;
        self.lex.add_entry(LexicalEntry { word, ty: noun_type(), meaning: Meaning::State(state) })
    }

    fn adjective(&mut self) -> Result<()> {
        let word = self.ident("a word")?;
        let how = self.ident("`diag` or `cells`")?;
        let space = self.noun_space(&word)?;
        let meaning = match how.as_str() {
            "diag" => {
                let expr = self.expr()?;
                Meaning::Diagonal(self.eval_state(&expr, &space, &word)?)
            }
            "cells" => {
                self.sym("{")?;
                let mut cells = Vec::new();
                loop {
                    let from = self.expr()?;
                    self.sym("->")?;
                    let to = self.expr()?;
                    let a = self.eval_state(&from, &space, &word)?;
                    let b = self.eval_state(&to, &space, &word)?;
                    cells.extend(a.tensor(&b).cells().iter().cloned());
                    if self.peek_sym(";") {
                        self.pos += 1;
                        if self.peek_sym("}") {
                            break;
                        }
                    } else {
                        break;
                    }
                }
                self.sym("}")?;
                Meaning::Map(Relation::new(space.clone(), space, cells).map_err(|e| validation(&word, e))?)
            }
            other => return Err(self.error(format!("unknown adjective form `{other}`"))),
        };
        self.lex.add_entry(LexicalEntry { word, ty: adjective_type(), meaning })
    }

    fn verb(&mut self) -> Result<()> {
        let word = self.ident("a word")?;
        self.keyword("type")?;
        let at = self.peek().clone();
        let mut parts = Vec::new();
        while let Tok::Ident(s) = &self.peek().tok {
            if s == "cells" {
                break;
            }
            parts.push(s.clone());
            self.pos += 1;
        }
        let ty: TypeString = parse_type_string(&parts.join(" ")).map_err(|e| match e {
            Error::Syntax { message, .. } => Error::Syntax { line: at.line, column: at.col, message },
            other => other,
        })?;
        if ty.is_empty() {
            return Err(self.error("expected a type"));
        }
        self.keyword("cells")?;
        let space = self.lex.interpretation().interpret(&ty).map_err(|e| validation(&word, e))?;
        let body = self.braced_union()?;
        let state = self.eval_state(&body, &space, &word)?;
        self.lex.add_entry(LexicalEntry { word, ty, meaning: Meaning::State(state) })
    }

    fn pronoun(&mut self) -> Result<()> {
        let word = self.ident("a word")?;
        self.keyword("subjectrel")?;
        self.lex.add_entry(LexicalEntry { word, ty: relative_pronoun_type(), meaning: Meaning::SubjectRelative })
    }

    fn braced_union(&mut self) -> Result<Expr> {
        self.sym("{")?;
        let mut items = Vec::new();
        while !self.peek_sym("}") {
            items.push(self.expr()?);
            if self.peek_sym(";") {
                self.pos += 1;
            } else if !self.peek_sym("}") {
                return Err(self.error("expected `;` or `}`"));
            }
        }
        self.sym("}")?;
        if items.is_empty() {
            return Err(self.error("empty cell list"));
        }
        Ok(Expr::Union(items))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut parts = vec![self.product()?];
        while self.peek_sym("&") {
            self.pos += 1;
            parts.push(self.product()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Inter(parts) })
    }

    fn product(&mut self) -> Result<Expr> {
        let mut parts = vec![self.atom()?];
        loop {
            if self.peek_sym("*") || self.peek_is(&Tok::Ident("x".into())) {
                self.pos += 1;
                parts.push(self.atom()?);
            } else {
                break;
            }
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Product(parts) })
    }

    fn box_literal(&mut self) -> Result<Expr> {
        let mut ivs = vec![self.interval()?];
        // `]x[` with nothing in between continues the box
        while let (Some(x), Some(b)) = (self.toks.get(self.pos), self.toks.get(self.pos + 1)) {
            if x.tok == Tok::Ident("x".into()) && !x.spaced && b.tok == Tok::Sym("[") && !b.spaced {
                self.pos += 1;
                ivs.push(self.interval()?);
            } else {
                break;
            }
        }
        Ok(Expr::Box(ivs))
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Sym("[") => self.box_literal(),
            Tok::Sym("(") => {
                self.pos += 1;
                let e = self.expr()?;
                self.sym(")")?;
                Ok(e)
            }
            Tok::Sym("{") => {
                self.pos += 1;
                let mut names = Vec::new();
                while !self.peek_sym("}") {
                    names.push(self.element()?);
                    if self.peek_sym(",") {
                        self.pos += 1;
                    }
                }
                self.sym("}")?;
                Ok(Expr::Lattice(names))
            }
            Tok::Str(s) => {
                self.pos += 1;
                Ok(Expr::Phrase(s.clone()))
            }
            Tok::Ident(s) if s == "full" => {
                self.pos += 1;
                Ok(Expr::Full)
            }
            Tok::Ident(s) if s == "cells" => {
                self.pos += 1;
                self.braced_union()
            }
            Tok::Ident(s) if s == "hull" && self.toks.get(self.pos + 1).is_some_and(|n| n.tok == Tok::Sym("(")) => {
                self.pos += 2;
                let mut items = Vec::new();
                while !self.peek_sym(")") {
                    items.push(self.atom()?);
                }
                self.sym(")")?;
                if items.is_empty() {
                    return Err(self.error("expected hull parts"));
                }
                Ok(Expr::Hull(items))
            }
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(Expr::Name(s.clone()))
            }
            _ => Err(self.error("expected a set")),
        }
    }

    /// A lattice element: a name, a number or a parenthesised tuple,
    /// returned as written without spaces.
    fn element(&mut self) -> Result<String> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) | Tok::Number(s) => Ok(s),
            Tok::Sym("(") => {
                let mut out = String::from("(");
                let mut depth = 1;
                while depth > 0 {
                    let t = self.next();
                    match t.tok {
                        Tok::Sym(s) => {
                            match s {
                                "(" => depth += 1,
                                ")" => depth -= 1,
                                _ => {}
                            }
                            out.push_str(s);
                        }
                        Tok::Ident(s) | Tok::Number(s) => out.push_str(&s),
                        _ => {
                            self.pos -= 1;
                            return Err(self.error("bad lattice element"));
                        }
                    }
                }
                Ok(out)
            }
            _ => {
                self.pos -= 1;
                Err(self.error("expected a lattice element"))
            }
        }
    }

    /// Lays `expr` over all of `space`, lifting a lone property name.
    fn eval_state(&mut self, expr: &Expr, space: &Space, entry: &str) -> Result<Relation> {
        if let Expr::Name(n) = expr {
            let word_fits = self.lex.entry(n).is_some_and(|e| matches!(&e.meaning, Meaning::State(r) if r.target() == space));
            if !word_fits {
                if let Some(p) = self.lex.property(n) {
                    if space.len() > 1 || p.domain() != &space.factors()[0] {
                        return lift_property(p, space).map_err(|e| validation(entry, e));
                    }
                }
            }
        }
        let r = self.eval(expr, space.factors(), entry)?;
        if r.target().len() != space.len() {
            return Err(invalid(entry, format!("expression covers {} but {space} is needed", r.target())));
        }
        Ok(r)
    }

    /// Lays `expr` over a prefix of `domains`; the result's target says
    /// how many domains it used.
    fn eval(&mut self, expr: &Expr, domains: &[Domain], entry: &str) -> Result<Relation> {
        let first = || {
            domains.first().cloned().ok_or_else(|| invalid(entry, "more factors than the space has"))
        };
        let single = |set: ConvexSet| -> Result<Relation> {
            Relation::state(Space::new(vec![set.domain().clone()]), vec![Cell::new(vec![set])])
        };
        match expr {
            Expr::Box(ivs) => {
                let d = first()?;
                single(ConvexSet::boxed(&d, ivs.clone()).map_err(|e| validation(entry, e))?)
            }
            Expr::Full => single(ConvexSet::full(&first()?)),
            Expr::Lattice(names) => {
                let d = first()?;
                let mut members = Vec::new();
                for n in names {
                    members.push(d.element_index(n).ok_or_else(|| invalid(entry, format!("`{n}` is not an element of `{}`", d.name())))?);
                }
                single(ConvexSet::lattice_set(&d, members).map_err(|e| validation(entry, e))?)
            }
            Expr::Name(n) => {
                if let Some(e) = self.lex.entry(n) {
                    if let Meaning::State(r) = &e.meaning {
                        let k = r.target().len();
                        if domains.len() >= k && r.target().factors() == &domains[..k] {
                            return Ok(r.clone());
                        }
                    }
                }
                let d = first()?;
                match self.lex.property(n) {
                    Some(p) if p.domain() == &d => single(p.clone()),
                    Some(p) => Err(invalid(entry, format!("`{n}` is on `{}`, expected `{}`", p.domain().name(), d.name()))),
                    None => Err(invalid(entry, format!("`{n}` is neither a property nor a word fitting here"))),
                }
            }
            Expr::Phrase(text) => {
                // type bases are conventionally the lower-cased space names
                let ti = self.lex.interpretation();
                let mut names: Vec<String> = self.lex.spaces().keys().cloned().collect();
                names.sort();
                for name in names {
                    let s = &self.lex.spaces()[&name];
                    if domains.len() >= s.len() && s.factors() == &domains[..s.len()] {
                        let lower = name.to_lowercase();
                        let base = if ti.base(&lower).ok() == Some(s) { lower } else { name };
                        return evaluate_phrase(self.lex, text, &base).map_err(|e| validation(entry, e));
                    }
                }
                Err(invalid(entry, format!("no declared space fits phrase \"{text}\"")))
            }
            Expr::Hull(items) => {
                let parts: Vec<Relation> = items.iter().map(|i| self.eval(i, domains, entry)).collect::<Result<_>>()?;
                let k = parts[0].target().len();
                if parts.iter().any(|p| p.target().len() != k) {
                    return Err(invalid(entry, "hull parts cover different domains"));
                }
                let label = items
                    .iter()
                    .map(|i| if let Expr::Name(n) = i { Some(n.clone()) } else { None })
                    .collect::<Option<Vec<String>>>()
                    .map(Label::Hull);
                let mut comps = Vec::with_capacity(k);
                for f in 0..k {
                    let sets: Vec<ConvexSet> =
                        parts.iter().flat_map(|p| p.cells().iter().map(move |c| c.components()[f].clone())).collect();
                    let mut h = hull(&domains[f], &sets).map_err(|e| validation(entry, e))?;
                    if let Some(l) = &label {
                        h = h.with_label(l.clone());
                    }
                    comps.push(h);
                }
                Relation::state(Space::new(domains[..k].to_vec()), vec![Cell::new(comps)])
            }
            Expr::Product(items) => {
                let mut acc = Relation::full_state(&Space::unit());
                let mut used = 0;
                for i in items {
                    let r = self.eval(i, &domains[used..], entry)?;
                    used += r.target().len();
                    acc = acc.tensor(&r);
                }
                Ok(acc)
            }
            Expr::Inter(items) => {
                let parts: Vec<Relation> = items.iter().map(|i| self.eval(i, domains, entry)).collect::<Result<_>>()?;
                let mut acc = parts[0].clone();
                for p in &parts[1..] {
                    if p.target() != acc.target() {
                        return Err(invalid(entry, "`&` sides cover different domains"));
                    }
                    let mut cells = Vec::new();
                    for a in acc.cells() {
                        for b in p.cells() {
                            if a.meets(b)? {
                                let comps = a
                                    .components()
                                    .iter()
                                    .zip(b.components())
                                    .map(|(x, y)| x.intersect(y))
                                    .collect::<Result<Vec<_>>>()
                                    .map_err(|e| validation(entry, e))?;
                                cells.push(Cell::new(comps));
                            }
                        }
                    }
                    acc = Relation::state(acc.target().clone(), cells)?;
                }
                Ok(acc)
            }
            Expr::Union(items) => {
                let parts: Vec<Relation> = items.iter().map(|i| self.eval(i, domains, entry)).collect::<Result<_>>()?;
                let target = parts[0].target().clone();
                let mut cells = Vec::new();
                for p in parts {
                    if p.target() != &target {
                        return Err(invalid(entry, "cells cover different domains"));
                    }
                    cells.extend(p.cells().iter().cloned());
                }
                Relation::state(target, cells)
            }
        }
    }
}

fn invalid(entry: &str, message: impl Into<String>) -> Error {
    Error::Validation { entry: entry.to_string(), message: message.into() }
}

fn validation(entry: &str, e: Error) -> Error {
    match e {
        Error::Validation { .. } | Error::Syntax { .. } => e,
        other => invalid(entry, other.to_string()),
    }
}

/// Renders a lexicon in the DSL. Lattice domains given by an explicit join
/// table have no DSL form and are written as comments.
pub fn print_lexicon(lex: &Lexicon) -> String {
    let mut out = String::new();
    for d in lex.domains().values() {
        let _ = writeln!(out, "{}", print_domain(d));
    }
    for (name, s) in lex.spaces() {
        let names: Vec<&str> = s.factors().iter().map(|d| d.name()).collect();
        let _ = writeln!(out, "space {name} = {}", names.join(" * "));
    }
    for (name, set) in lex.properties() {
        let body = match (set.shape(), set.label()) {
            (Shape::Box(ivs), _) => format!("box {}", print_box(ivs)),
            (Shape::Lattice(_), _) => format!("set {}", print_set(lex, set, false)),
            (Shape::Polytope(_), Some(Label::Hull(parts))) if named_parts(lex, set, parts) => {
                format!("hull {}", parts.join(" "))
            }
            (Shape::Polytope(_), _) => format!("hull {}", vertex_boxes(set)),
        };
        let _ = writeln!(out, "property {name} on {} {body}", set.domain().name());
    }
    let noun = noun_type();
    for e in lex.entries().values() {
        let line = match &e.meaning {
            Meaning::State(r) if e.ty == noun => format!("noun {} = {}", e.word, print_cells(lex, r, &[r.target().clone()])),
            Meaning::State(r) => {
                let wires = lex.interpretation().wires(&e.ty).unwrap_or_else(|_| vec![r.target().clone()]);
                format!("verb {} type {} cells {{ {} }}", e.word, e.ty, print_cell_list(lex, r, &wires))
            }
            Meaning::Diagonal(r) => format!("adj {} diag {}", e.word, print_cells(lex, r, &[r.target().clone()])),
            Meaning::Map(r) => {
                let cells: Vec<String> = r
                    .cells()
                    .iter()
                    .map(|c| {
                        let (a, b) = c.components().split_at(r.source().len());
                        format!("{} -> {}", print_product(lex, a, &[r.source().clone()]), print_product(lex, b, &[r.target().clone()]))
                    })
                    .collect();
                format!("adj {} cells {{ {} }}", e.word, cells.join(" ; "))
            }
            Meaning::SubjectRelative => format!("pronoun {} subjectrel", e.word),
        };
        let _ = writeln!(out, "{line}");
    }
    out
}

fn print_domain(d: &Domain) -> String {
    match d.kind() {
        DomainKind::Continuous { bounds } => {
            let ivs: Vec<String> = bounds.iter().map(print_interval).collect();
            format!("domain {} continuous {} {}", d.name(), bounds.len(), ivs.join(" "))
        }
        DomainKind::Lattice { origin: LatticeOrigin::TupleMax(k), .. } => {
            format!("domain {} lattice tuplemax {k}", d.name())
        }
        DomainKind::Lattice { origin: LatticeOrigin::Tree(root), .. } => {
            let tree = if root.children.is_empty() { format!("({})", root.name) } else { root.to_string() };
            format!("domain {} lattice tree {tree}", d.name())
        }
        DomainKind::Lattice { origin: LatticeOrigin::Table, .. } => {
            format!("# domain {} has an explicit join table", d.name())
        }
    }
}

fn print_interval(iv: &Interval) -> String {
    format!("[{},{}]", fmt_decimal(&iv.lo), fmt_decimal(&iv.hi))
}

fn print_box(ivs: &[Interval]) -> String {
    ivs.iter().map(print_interval).collect::<Vec<_>>().join("x")
}

fn print_set(lex: &Lexicon, set: &ConvexSet, use_names: bool) -> String {
    if use_names {
        if let Some(Label::Name(n)) = set.label() {
            if lex.property(n) == Some(set) {
                return n.clone();
            }
        }
    }
    match set.shape() {
        _ if set.is_full() => "full".into(),
        Shape::Box(ivs) => print_box(ivs),
        Shape::Lattice(ms) => {
            let names: Vec<&str> = ms.iter().map(|&m| set.domain().element_name(m)).collect();
            format!("{{{}}}", names.join(", "))
        }
        Shape::Polytope(_) => match set.label() {
            Some(Label::Hull(parts)) if named_parts(lex, set, parts) => format!("hull({})", parts.join(" ")),
            _ => format!("hull({})", vertex_boxes(set)),
        },
    }
}

fn named_parts(lex: &Lexicon, set: &ConvexSet, parts: &[String]) -> bool {
    parts.iter().all(|p| lex.property(p).is_some_and(|q| q.domain() == set.domain()))
}

fn vertex_boxes(set: &ConvexSet) -> String {
    set.extreme_points()
        .iter()
        .map(|p| match p {
            Point::Coords(x) => x.iter().map(|v| format!("[{0},{0}]", fmt_decimal(v))).collect::<Vec<_>>().join("x"),
            Point::Element(_) => unreachable!("polytopes are continuous"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Components grouped by wire; a wire with several factors is
/// parenthesised when there is more than one wire.
fn print_product(lex: &Lexicon, comps: &[ConvexSet], wires: &[Space]) -> String {
    // a cell spanning one whole word hull, e.g. hull(banana apple)
    if wires.len() == 1 {
        if let Some(Label::Hull(parts)) = comps[0].label() {
            let same = comps.iter().all(|c| c.label() == comps[0].label());
            let words = parts.iter().all(|p| {
                lex.entry(p).is_some_and(|e| matches!(&e.meaning, Meaning::State(r) if r.target() == &wires[0]))
            });
            if same && words && hull_of_words(lex, comps, parts) {
                return format!("hull({})", parts.join(" "));
            }
        }
    }
    let mut groups = Vec::new();
    let mut at = 0;
    for w in wires {
        let sets: Vec<String> = comps[at..at + w.len()].iter().map(|c| print_set(lex, c, true)).collect();
        at += w.len();
        if sets.len() > 1 && wires.len() > 1 {
            groups.push(format!("({})", sets.join(" * ")));
        } else {
            groups.push(sets.join(" * "));
        }
    }
    groups.join(" x ")
}

fn hull_of_words(lex: &Lexicon, comps: &[ConvexSet], words: &[String]) -> bool {
    comps.iter().enumerate().all(|(f, c)| {
        let sets: Option<Vec<ConvexSet>> = words
            .iter()
            .map(|w| match &lex.entry(w)?.meaning {
                Meaning::State(r) if r.cells().len() == 1 => Some(r.cells()[0].components()[f].clone()),
                _ => None,
            })
            .collect();
        sets.and_then(|s| hull(c.domain(), &s).ok()).is_some_and(|h| &h == c)
    })
}

fn print_cell_list(lex: &Lexicon, r: &Relation, wires: &[Space]) -> String {
    r.cells().iter().map(|c| print_product(lex, c.components(), wires)).collect::<Vec<_>>().join(" ; ")
}

fn print_cells(lex: &Lexicon, r: &Relation, wires: &[Space]) -> String {
    match r.cells().len() {
        1 => print_product(lex, r.cells()[0].components(), wires),
        _ => format!("cells {{ {} }}", print_cell_list(lex, r, wires)),
    }
}
