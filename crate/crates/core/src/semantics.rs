//! From pregroup reductions to meanings.
//!
//! Each simple type of a phrase becomes one wire carrying the space its base
//! is interpreted as (adjoints share the space). Word meanings are tensored
//! into one lazy state diagram, the links of a reduction become cups and the
//! surviving wires are read off as the phrase meaning.

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;

use crate::convex::{hull, ConvexSet, Label};
use crate::diagram::{LazyRelation, Spider, StateDiagram, Term};
use crate::domain::{AtomicDomain, Domain, Interval};
use crate::error::{Error, Result};
use crate::pregroup::{parse_type_string, reduce, LinkDiagram, SimpleType, TypeString};
use crate::relation::{covers, Cell, Relation, Space, WirePlan};
use crate::scalar::{int, ratio, Scalar};

/// Base symbol ↦ space. Lookups try the symbol as written, then upper-cased,
/// so base `n` finds a space declared as `N`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeInterpretation {
    map: BTreeMap<String, Space>,
}

impl TypeInterpretation {
    pub fn new(map: BTreeMap<String, Space>) -> Self {
        TypeInterpretation { map }
    }

    pub fn base(&self, base: &str) -> Result<&Space> {
        self.map
            .get(base)
            .or_else(|| self.map.get(&base.to_uppercase()))
            .ok_or_else(|| Error::UnknownBase(base.to_string()))
    }

    pub fn wires(&self, ts: &TypeString) -> Result<Vec<Space>> {
        ts.simples.iter().map(|s| self.base(&s.base).cloned()).collect()
    }

    pub fn interpret(&self, ts: &TypeString) -> Result<Space> {
        Ok(self.wires(ts)?.iter().fold(Space::unit(), |acc, w| acc.tensor(w)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Meaning {
    /// A state on the interpreted type.
    State(Relation),
    /// `{(x, x) | x ∈ region}` for a region state on the noun space.
    Diagonal(Relation),
    /// A relation from the noun space to itself; on the wires of `n n.l`
    /// the output comes first.
    Map(Relation),
    /// The subject relative pronoun: copies the noun wire into the clause and
    /// discards the clause's sentence wire.
    SubjectRelative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalEntry {
    pub word: String,
    pub ty: TypeString,
    pub meaning: Meaning,
}

impl LexicalEntry {
    pub fn is_relative_pronoun(&self) -> bool {
        matches!(self.meaning, Meaning::SubjectRelative)
    }

    /// The entry as a state diagram over its wires.
    pub fn diagram(&self, ti: &TypeInterpretation) -> Result<StateDiagram> {
        match &self.meaning {
            Meaning::State(r) => Ok(StateDiagram::from_relation(r)),
            Meaning::Diagonal(region) => Ok(LazyRelation::diagonal_on(region)?.body().clone()),
            Meaning::Map(r) => Ok(StateDiagram::from_relation(&r.converse())),
            Meaning::SubjectRelative => subject_relative(ti),
        }
    }

    /// Materialised meaning, where one exists as a finite union of cells.
    pub fn state(&self, ti: &TypeInterpretation) -> Result<Relation> {
        match &self.meaning {
            Meaning::State(r) => Ok(r.clone()),
            _ => self.diagram(ti)?.to_state(),
        }
    }
}

/// Wires `n.r n s.l n`: one spider per noun factor across the three `n`
/// wires, sentence legs discarded.
fn subject_relative(ti: &TypeInterpretation) -> Result<StateDiagram> {
    let n = ti.base("n")?;
    let s = ti.base("s")?;
    let (k, m) = (n.len(), s.len());
    let mut factors = n.factors().to_vec();
    factors.extend(n.factors().iter().cloned());
    factors.extend(s.factors().iter().cloned());
    factors.extend(n.factors().iter().cloned());
    let mut spiders: Vec<Spider> = n
        .factors()
        .iter()
        .enumerate()
        .map(|(i, d)| Spider { regions: vec![ConvexSet::full(d)], legs: vec![i, k + i, 2 * k + m + i] })
        .collect();
    spiders.extend(
        s.factors()
            .iter()
            .enumerate()
            .map(|(i, d)| Spider { regions: vec![ConvexSet::full(d)], legs: vec![2 * k + i] }),
    );
    StateDiagram::new(factors, vec![Term { spiders }])
}

pub fn relative_pronoun_type() -> TypeString {
    TypeString::new(vec![
        SimpleType::new("n", 1),
        SimpleType::plain("n"),
        SimpleType::new("s", -1),
        SimpleType::plain("n"),
    ])
}

pub fn adjective_type() -> TypeString {
    TypeString::new(vec![SimpleType::plain("n"), SimpleType::new("n", -1)])
}

pub fn noun_type() -> TypeString {
    TypeString::new(vec![SimpleType::plain("n")])
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    domains: IndexMap<String, Domain>,
    spaces: IndexMap<String, Space>,
    properties: IndexMap<String, ConvexSet>,
    entries: IndexMap<String, LexicalEntry>,
}

fn invalid(entry: &str, message: impl Into<String>) -> Error {
    Error::Validation { entry: entry.to_string(), message: message.into() }
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty() && self.spaces.is_empty() && self.properties.is_empty() && self.entries.is_empty()
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if self.domains.contains_key(name) || self.spaces.contains_key(name) || self.properties.contains_key(name) {
            return Err(invalid(name, "name already declared"));
        }
        Ok(())
    }

    pub fn add_domain(&mut self, domain: Domain) -> Result<()> {
        let name = domain.name().to_string();
        self.check_fresh(&name)?;
        self.domains.insert(name, domain);
        Ok(())
    }

    pub fn add_space(&mut self, name: &str, space: Space) -> Result<()> {
        self.check_fresh(name)?;
        for d in space.factors() {
            if self.domains.get(d.name()) != Some(d) {
                return Err(invalid(name, format!("domain `{}` is not declared", d.name())));
            }
        }
        self.spaces.insert(name.to_string(), space);
        Ok(())
    }

    /// Stores `set` under `name`, labelling it with the name.
    pub fn add_property(&mut self, name: &str, set: ConvexSet) -> Result<()> {
        self.check_fresh(name)?;
        if self.domains.get(set.domain().name()) != Some(set.domain()) {
            return Err(invalid(name, format!("domain `{}` is not declared", set.domain().name())));
        }
        self.properties.insert(name.to_string(), set.with_label(Label::Name(name.to_string())));
        Ok(())
    }

    /// Adds a word after checking its meaning against its type.
    pub fn add_entry(&mut self, entry: LexicalEntry) -> Result<()> {
        let word = entry.word.clone();
        if self.entries.contains_key(&word) {
            return Err(invalid(&word, "word already defined"));
        }
        let ti = self.interpretation();
        let wires = ti.wires(&entry.ty).map_err(|e| invalid(&word, e.to_string()))?;
        let whole = wires.iter().fold(Space::unit(), |acc, w| acc.tensor(w));
        match &entry.meaning {
            Meaning::State(r) => {
                if !r.is_state() || r.target() != &whole {
                    return Err(invalid(&word, format!("meaning lives on {}, type `{}` needs {whole}", r.space(), entry.ty)));
                }
            }
            Meaning::Diagonal(r) | Meaning::Map(r) => {
                let single = wires.first().cloned().unwrap_or_else(Space::unit);
                let two_matching = wires.len() == 2 && wires[0] == wires[1];
                let fits = match &entry.meaning {
                    Meaning::Diagonal(_) => r.is_state() && r.target() == &single,
                    _ => r.source() == &single && r.target() == &single,
                };
                if !two_matching || !fits {
                    return Err(invalid(&word, format!("adjective meaning does not fit type `{}`", entry.ty)));
                }
            }
            Meaning::SubjectRelative => {
                if entry.ty != relative_pronoun_type() {
                    return Err(invalid(&word, format!("relative pronoun needs type `{}`", relative_pronoun_type())));
                }
                subject_relative(&ti).map_err(|e| invalid(&word, e.to_string()))?;
            }
        }
        for r in entry_relations(&entry) {
            for cell in r.cells() {
                for c in cell.components() {
                    if self.domains.get(c.domain().name()) != Some(c.domain()) {
                        return Err(invalid(&word, format!("domain `{}` is not declared", c.domain().name())));
                    }
                }
            }
        }
        self.entries.insert(word, entry);
        Ok(())
    }

    pub fn domains(&self) -> &IndexMap<String, Domain> {
        &self.domains
    }

    pub fn spaces(&self) -> &IndexMap<String, Space> {
        &self.spaces
    }

    pub fn properties(&self) -> &IndexMap<String, ConvexSet> {
        &self.properties
    }

    pub fn entries(&self) -> &IndexMap<String, LexicalEntry> {
        &self.entries
    }

    pub fn domain(&self, name: &str) -> Option<&Domain> {
        self.domains.get(name)
    }

    pub fn property(&self, name: &str) -> Option<&ConvexSet> {
        self.properties.get(name)
    }

    pub fn entry(&self, word: &str) -> Option<&LexicalEntry> {
        self.entries.get(word)
    }

    /// Exact match first, then with a plural or third-person `s` removed.
    pub fn lookup(&self, token: &str) -> Result<&LexicalEntry> {
        let lower = token.to_lowercase();
        if let Some(e) = self.entries.get(&lower) {
            return Ok(e);
        }
        if let Some(stem) = lower.strip_suffix('s') {
            if let Some(e) = self.entries.get(stem) {
                return Ok(e);
            }
        }
        Err(Error::UnknownWord(token.to_string()))
    }

    pub fn interpretation(&self) -> TypeInterpretation {
        TypeInterpretation::new(self.spaces.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
    }
}

fn entry_relations(entry: &LexicalEntry) -> Vec<&Relation> {
    match &entry.meaning {
        Meaning::State(r) | Meaning::Diagonal(r) | Meaning::Map(r) => vec![r],
        Meaning::SubjectRelative => vec![],
    }
}

pub fn tokenize(phrase: &str) -> Vec<String> {
    phrase.split_whitespace().map(|w| w.to_lowercase()).collect()
}

/// One simple type per wire, links become cups, survivors are kept.
pub fn plan_from_diagram(words: &[&LexicalEntry], diagram: &LinkDiagram, ti: &TypeInterpretation) -> Result<WirePlan> {
    let mut wires = Vec::new();
    for w in words {
        wires.extend(ti.wires(&w.ty)?);
    }
    for &(a, b) in &diagram.links {
        if a >= wires.len() || b >= wires.len() {
            return Err(Error::MalformedPlan(format!("link ({a},{b}) outside {} wires", wires.len())));
        }
        if wires[a] != wires[b] {
            return Err(Error::SpaceMismatch(format!("link joins {} with {}", wires[a], wires[b])));
        }
    }
    Ok(WirePlan { wires, cups: diagram.links.clone(), survivors: diagram.survivors.clone() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parse {
    pub diagram: LinkDiagram,
    pub meaning: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub words: Vec<String>,
    pub types: TypeString,
    pub target: TypeString,
    /// First reduction first; more only when all parses were requested.
    pub parses: Vec<Parse>,
}

impl Evaluation {
    pub fn meaning(&self) -> &Relation {
        &self.parses[0].meaning
    }

    pub fn diagram(&self) -> &LinkDiagram {
        &self.parses[0].diagram
    }

    /// Whether every parse gives the same meaning.
    pub fn parses_agree(&self) -> Result<bool> {
        for p in &self.parses[1..] {
            if !p.meaning.equivalent(self.meaning())? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Meaning of `words` reduced to `target` using the first reduction.
pub fn evaluate(lex: &Lexicon, words: &[&str], target: &TypeString) -> Result<Relation> {
    Ok(evaluate_parses(lex, words, target, false)?.parses.swap_remove(0))
        .map(|p| p.meaning)
}

pub fn evaluate_phrase(lex: &Lexicon, phrase: &str, target: &str) -> Result<Relation> {
    let words = tokenize(phrase);
    let refs: Vec<&str> = words.iter().map(String::as_str).collect();
    evaluate(lex, &refs, &parse_type_string(target)?)
}

pub fn evaluate_parses(lex: &Lexicon, words: &[&str], target: &TypeString, all: bool) -> Result<Evaluation> {
    let entries: Vec<&LexicalEntry> = words.iter().map(|w| lex.lookup(w)).collect::<Result<_>>()?;
    let types = entries.iter().fold(TypeString::unit(), |acc, e| acc.concat(&e.ty));
    let diagrams = reduce(&types, target);
    if diagrams.is_empty() {
        return Err(Error::NoReduction { phrase: words.join(" "), target: target.to_string() });
    }
    let ti = lex.interpretation();
    let mut combined: Option<StateDiagram> = None;
    for e in &entries {
        let d = e.diagram(&ti)?;
        combined = Some(match combined {
            None => d,
            Some(c) => c.tensor(&d),
        });
    }
    let combined = combined.expect("a reduction needs at least one word unless the target is empty");
    let take = if all { diagrams.len() } else { 1 };
    let mut parses = Vec::with_capacity(take);
    for diagram in diagrams.into_iter().take(take) {
        let plan = plan_from_diagram(&entries, &diagram, &ti)?;
        let meaning = combined.apply_plan(&plan)?.to_state()?;
        parses.push(Parse { diagram, meaning });
    }
    Ok(Evaluation { words: words.iter().map(|w| w.to_string()).collect(), types, target: target.clone(), parses })
}

/// Single-cell state with `property` on its domain and full sets elsewhere.
pub fn lift_property(property: &ConvexSet, space: &Space) -> Result<Relation> {
    let at = space
        .factors()
        .iter()
        .position(|d| d == property.domain())
        .ok_or_else(|| Error::DomainMismatch(format!("`{}` is not a factor of {space}", property.domain().name())))?;
    let comps = space
        .factors()
        .iter()
        .enumerate()
        .map(|(i, d)| if i == at { property.clone() } else { ConvexSet::full(d) })
        .collect();
    Relation::state(space.clone(), vec![Cell::new(comps)])
}

/// The diagonal restricted to `noun`, as an adjective `N → N`.
pub fn intersective_adjective(noun: &Relation) -> Result<LazyRelation> {
    LazyRelation::diagonal_on(noun)
}

/// `a` entails `b`: on all-lattice spaces every point of `a` is in `b`;
/// otherwise every cell of `a` lies factor-wise inside a cell of `b`.
pub fn entails(a: &Relation, b: &Relation) -> Result<bool> {
    if a.source() != b.source() || a.target() != b.target() {
        return Err(Error::SpaceMismatch(format!("entails between {} and {}", a.space(), b.space())));
    }
    if a.space().is_all_lattice() {
        return Ok(a.points()?.is_subset(&b.points()?));
    }
    covers(b, a)
}

/// `head which verb object` built by hand: merge the head with the verb's
/// subject, delete the sentence wire, cup the verb's object with `object`.
pub fn relative_clause_by_hand(head: &Relation, verb: &Relation, object: &Relation) -> Result<Relation> {
    let n = head.target().clone();
    let s = Space::new(verb.target().factors()[n.len()..verb.target().len() - n.len()].to_vec());
    let pipeline = LazyRelation::merge(&n).tensor(&LazyRelation::delete(&s))?.tensor(&LazyRelation::cup(&n))?;
    let input = StateDiagram::from_relation(&head.tensor(verb).tensor(object));
    pipeline.apply(&input)?.to_state()
}

impl fmt::Display for LexicalEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} = ", self.word, self.ty)?;
        match &self.meaning {
            Meaning::State(r) => write!(f, "{r}"),
            Meaning::Diagonal(r) => write!(f, "diag({r})"),
            Meaning::Map(r) => {
                let parts: Vec<String> = r
                    .cells()
                    .iter()
                    .map(|c| {
                        let (a, b) = c.components().split_at(r.source().len());
                        format!("{} ↦ {}", Cell::new(a.to_vec()), Cell::new(b.to_vec()))
                    })
                    .collect();
                write!(f, "{{{}}}", parts.join(" ∪ "))
            }
            Meaning::SubjectRelative => write!(f, "subject relative pronoun"),
        }
    }
}

fn iv(lo: Scalar, hi: Scalar) -> Interval {
    Interval::new(lo, hi).expect("valid interval")
}

fn ints(lo: i64, hi: i64) -> Interval {
    iv(int(lo), int(hi))
}

/// `[a, b]` with bounds given in hundredths.
fn cents(lo: i64, hi: i64) -> Interval {
    iv(ratio(lo, 100), ratio(hi, 100))
}

pub const TASTES: [&str; 5] = ["sweet", "sour", "bitter", "salt", "savoury"];

/// The food-and-drink lexicon.
pub fn demo_lexicon() -> Lexicon {
    build_demo().expect("demo lexicon is valid")
}

fn build_demo() -> Result<Lexicon> {
    let mut lex = Lexicon::new();
    let colour = AtomicDomain::continuous("colour", vec![ints(0, 360), ints(0, 1), ints(0, 1)])?;
    let taste = AtomicDomain::continuous("taste", vec![ints(0, 1); 5])?;
    let texture = AtomicDomain::continuous("texture", vec![ints(0, 1)])?;
    let sentence = AtomicDomain::tuple_max("sentence", 2)?;
    for d in [&colour, &taste, &texture, &sentence] {
        lex.add_domain(d.clone())?;
    }
    let n = Space::new(vec![colour.clone(), taste.clone(), texture.clone()]);
    let s = Space::new(vec![sentence.clone()]);
    lex.add_space("N", n.clone())?;
    lex.add_space("S", s.clone())?;

    lex.add_property("yellow", ConvexSet::boxed(&colour, vec![ints(45, 75), cents(50, 100), ints(0, 1)])?)?;
    lex.add_property("green", ConvexSet::boxed(&colour, vec![ints(75, 135), cents(50, 100), ints(0, 1)])?)?;
    lex.add_property("brown", ConvexSet::boxed(&colour, vec![ints(0, 45), cents(80, 100), cents(20, 40)])?)?;
    for (k, name) in TASTES.iter().enumerate().take(3) {
        let ivs = (0..5).map(|l| if l == k { cents(50, 100) } else { cents(0, 50) }).collect();
        lex.add_property(name, ConvexSet::boxed(&taste, ivs)?)?;
    }
    let prop = |lex: &Lexicon, name: &str| lex.property(name).cloned().expect("declared above");
    let taste_hull = |lex: &Lexicon, parts: &[&str]| -> Result<ConvexSet> {
        let sets: Vec<ConvexSet> = parts.iter().map(|p| prop(lex, p)).collect();
        Ok(hull(&taste, &sets)?.with_label(Label::Hull(parts.iter().map(|p| p.to_string()).collect())))
    };

    let noun = |word: &str, cells: Vec<Cell>| -> Result<LexicalEntry> {
        Ok(LexicalEntry { word: word.into(), ty: noun_type(), meaning: Meaning::State(Relation::state(n.clone(), cells)?) })
    };
    let banana = Cell::new(vec![
        ConvexSet::boxed(&colour, vec![ints(60, 95), cents(75, 100), cents(25, 100)])?,
        taste_hull(&lex, &["sweet", "bitter"])?,
        ConvexSet::boxed(&texture, vec![cents(20, 50)])?,
    ]);
    let apple = Cell::new(vec![
        ConvexSet::boxed(&colour, vec![ints(0, 105), cents(75, 100), cents(50, 100)])?,
        taste_hull(&lex, &["sweet", "sour"])?,
        ConvexSet::boxed(&texture, vec![cents(50, 80)])?,
    ]);
    let beer = Cell::new(vec![
        ConvexSet::boxed(&colour, vec![ints(40, 50), cents(85, 100), cents(10, 70)])?,
        taste_hull(&lex, &["sweet", "sour", "bitter"])?,
        ConvexSet::boxed(&texture, vec![cents(0, 1)])?,
    ]);
    let fruit = Cell::new(
        banana
            .components()
            .iter()
            .zip(apple.components())
            .map(|(b, a)| {
                let h = hull(b.domain(), &[b.clone(), a.clone()])?;
                Ok(h.with_label(Label::Hull(vec!["banana".into(), "apple".into()])))
            })
            .collect::<Result<_>>()?,
    );
    lex.add_entry(noun("banana", vec![banana.clone()])?)?;
    lex.add_entry(noun("apple", vec![apple.clone()])?)?;
    lex.add_entry(noun("beer", vec![beer])?)?;
    lex.add_entry(noun("fruit", vec![fruit])?)?;
    for name in &TASTES[..3] {
        let lifted = lift_property(&prop(&lex, name), &n)?;
        lex.add_entry(LexicalEntry { word: name.to_string(), ty: noun_type(), meaning: Meaning::State(lifted) })?;
    }

    for name in ["yellow", "green", "brown"] {
        let region = lift_property(&prop(&lex, name), &n)?;
        lex.add_entry(LexicalEntry { word: name.into(), ty: adjective_type(), meaning: Meaning::Diagonal(region) })?;
    }
    let soft_cell = |noun: &Cell, max_texture: Scalar| -> Result<Cell> {
        let comps = noun.components();
        let limit = ConvexSet::boxed(&texture, vec![iv(int(0), max_texture)])?;
        Ok(Cell::new(vec![comps[0].clone(), comps[1].clone(), comps[2].intersect(&limit)?]))
    };
    let soft = Relation::state(n.clone(), vec![soft_cell(&banana, ratio(35, 100))?, soft_cell(&apple, ratio(60, 100))?])?;
    lex.add_entry(LexicalEntry { word: "soft".into(), ty: adjective_type(), meaning: Meaning::Diagonal(soft) })?;

    let phrase = |lex: &Lexicon, text: &str| -> Result<Relation> { evaluate_phrase(lex, text, "n") };
    let green_banana = phrase(&lex, "green banana")?;
    let yellow_banana = phrase(&lex, "yellow banana")?;
    let state_of = |lex: &Lexicon, w: &str| match &lex.entry(w).expect("declared above").meaning {
        Meaning::State(r) => r.clone(),
        _ => unreachable!("noun"),
    };
    let point = |label: &str| -> Result<Relation> {
        let e = sentence.element_index(label).expect("tuple label");
        Relation::state(s.clone(), vec![Cell::new(vec![ConvexSet::lattice_set(&sentence, [e])?])])
    };
    let (sweet, bitter, beer) = (state_of(&lex, "sweet"), state_of(&lex, "bitter"), state_of(&lex, "beer"));
    let rows = [
        (&green_banana, "(0,0)", &bitter),
        (&green_banana, "(1,1)", &sweet),
        (&yellow_banana, "(1,0)", &sweet),
        (&beer, "(0,1)", &sweet),
        (&beer, "(1,0)", &bitter),
    ];
    let mut cells = Vec::new();
    for (subject, outcome, object) in rows {
        cells.extend(subject.tensor(&point(outcome)?).tensor(object).cells().iter().cloned());
    }
    let verb_space = n.tensor(&s).tensor(&n);
    lex.add_entry(LexicalEntry {
        word: "taste".into(),
        ty: parse_type_string("n.r s n.l")?,
        meaning: Meaning::State(Relation::state(verb_space, cells)?),
    })?;
    lex.add_entry(LexicalEntry { word: "which".into(), ty: relative_pronoun_type(), meaning: Meaning::SubjectRelative })?;
    Ok(lex)
}
