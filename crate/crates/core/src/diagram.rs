//! Lazy string diagrams over convex relations.
//!
//! The cap, cup, copy, merge and delete relations are diagonals and are not
//! finite unions of product cells. They are kept here as *spiders*: a spider
//! ties several legs to one common point that must lie in every region it
//! carries. A [`StateDiagram`] is a union of terms, each term a set of
//! independent spiders covering every leg exactly once. An ordinary cell is
//! the special case of one single-leg spider per factor.
//!
//! Contracting two legs with a cup fuses their spiders (their regions become
//! a conjunction); a term whose conjunction is empty under `meets` drops
//! out. Regions are only intersected when a result is materialised.

use std::collections::BTreeSet;

use crate::convex::{intersect_all, meets_all, ConvexSet, Shape};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::relation::{cartesian, Cell, Relation, Space, WirePlan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spider {
    /// The shared point lies in every region.
    pub regions: Vec<ConvexSet>,
    pub legs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub spiders: Vec<Spider>,
}

/// A state `I → factors[0] ⊗ … ⊗ factors[n-1]` as a union of spider terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDiagram {
    factors: Vec<Domain>,
    terms: Vec<Term>,
}

impl StateDiagram {
    pub fn new(factors: Vec<Domain>, terms: Vec<Term>) -> Result<Self> {
        for (t, term) in terms.iter().enumerate() {
            let mut seen = vec![false; factors.len()];
            for spider in &term.spiders {
                for &leg in &spider.legs {
                    if leg >= factors.len() || std::mem::replace(&mut seen[leg], true) {
                        return Err(Error::MalformedPlan(format!("term {t}: leg {leg} duplicated or out of range")));
                    }
                    for r in &spider.regions {
                        if r.domain() != &factors[leg] {
                            return Err(Error::DomainMismatch(format!(
                                "term {t}: region on `{}` attached to `{}` leg",
                                r.domain().name(),
                                factors[leg].name()
                            )));
                        }
                    }
                }
                if spider.regions.is_empty() {
                    return Err(Error::MalformedInput(format!("term {t}: spider without a region")));
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::MalformedPlan(format!("term {t} leaves a leg uncovered")));
            }
        }
        Ok(StateDiagram { factors, terms })
    }

    /// Each cell becomes a term of single-leg spiders. Source factors come
    /// first, as in the relation's cells.
    pub fn from_relation(r: &Relation) -> Self {
        let factors = r.space().factors().to_vec();
        let terms = r
            .cells()
            .iter()
            .map(|cell| Term {
                spiders: cell
                    .components()
                    .iter()
                    .enumerate()
                    .map(|(leg, c)| Spider { regions: vec![c.clone()], legs: vec![leg] })
                    .collect(),
            })
            .collect();
        StateDiagram { factors, terms }
    }

    pub fn factors(&self) -> &[Domain] {
        &self.factors
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn space(&self) -> Space {
        Space::new(self.factors.clone())
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Side-by-side composition; `other`'s legs follow `self`'s.
    pub fn tensor(&self, other: &StateDiagram) -> StateDiagram {
        let shift = self.factors.len();
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut spiders = a.spiders.clone();
                spiders.extend(b.spiders.iter().map(|s| Spider {
                    regions: s.regions.clone(),
                    legs: s.legs.iter().map(|l| l + shift).collect(),
                }));
                terms.push(Term { spiders });
            }
        }
        StateDiagram { factors, terms }
    }

    pub fn union(&self, other: &StateDiagram) -> Result<StateDiagram> {
        if self.factors != other.factors {
            return Err(Error::SpaceMismatch(format!("union of {} and {}", self.space(), other.space())));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(StateDiagram { factors: self.factors.clone(), terms })
    }

    /// Joins each leg pair with a cup, keeps `keep` (in that order) and
    /// discards every other leg.
    pub fn contract(&self, pairs: &[(usize, usize)], keep: &[usize]) -> Result<StateDiagram> {
        let n = self.factors.len();
        let mut used = vec![false; n];
        for &leg in pairs.iter().flat_map(|(a, b)| [a, b]).chain(keep) {
            if leg >= n {
                return Err(Error::MalformedPlan(format!("leg {leg} out of range (have {n})")));
            }
            if std::mem::replace(&mut used[leg], true) {
                return Err(Error::MalformedPlan(format!("leg {leg} used twice")));
            }
        }
        for &(a, b) in pairs {
            if self.factors[a] != self.factors[b] {
                return Err(Error::MalformedPlan(format!(
                    "cup joins `{}` with `{}`",
                    self.factors[a].name(),
                    self.factors[b].name()
                )));
            }
        }
        let mut renumber = vec![usize::MAX; n];
        for (new, &old) in keep.iter().enumerate() {
            renumber[old] = new;
        }
        let factors = keep.iter().map(|&l| self.factors[l].clone()).collect();

        let mut terms = Vec::new();
        for term in &self.terms {
            if let Some(t) = contract_term(term, n, pairs, &renumber)? {
                terms.push(t);
            }
        }
        Ok(StateDiagram { factors, terms })
    }

    pub fn apply_plan(&self, plan: &WirePlan) -> Result<StateDiagram> {
        if plan.input_space().factors() != self.factors.as_slice() {
            return Err(Error::SpaceMismatch(format!(
                "plan expects {}, state lives on {}",
                plan.input_space(),
                self.space()
            )));
        }
        let (pairs, keep) = plan.to_factor_plan()?;
        self.contract(&pairs, &keep)
    }

    /// Materialises as a state whose cells span all factors.
    pub fn to_state(&self) -> Result<Relation> {
        self.to_relation(0)
    }

    /// Materialises as a relation whose first `source_len` factors are the
    /// source. Fails if a spider still ties two legs together.
    pub fn to_relation(&self, source_len: usize) -> Result<Relation> {
        let mut cells = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let mut comps: Vec<Option<ConvexSet>> = vec![None; self.factors.len()];
            for spider in &term.spiders {
                if spider.legs.len() > 1 {
                    return Err(Error::NonProductResult(format!(
                        "legs {:?} are still tied by a diagonal",
                        spider.legs
                    )));
                }
                comps[spider.legs[0]] = Some(intersect_all(&spider.regions)?);
            }
            cells.push(Cell::new(comps.into_iter().map(|c| c.expect("every leg covered")).collect()));
        }
        let space = self.space();
        let (src, tgt) = space.factors().split_at(source_len);
        Relation::new(Space::new(src.to_vec()), Space::new(tgt.to_vec()), cells)?.canonical()
    }

    /// All tuples of an all-lattice diagram.
    pub fn points(&self) -> Result<BTreeSet<Vec<usize>>> {
        if let Some(d) = self.factors.iter().find(|d| !d.is_lattice()) {
            return Err(Error::DomainMismatch(format!("`{}` is continuous", d.name())));
        }
        let mut out = BTreeSet::new();
        for term in &self.terms {
            let choices: Vec<Vec<usize>> = term
                .spiders
                .iter()
                .map(|s| {
                    let mut common: Option<BTreeSet<usize>> = None;
                    for r in &s.regions {
                        let Shape::Lattice(ms) = r.shape() else { unreachable!() };
                        common = Some(match common {
                            None => ms.clone(),
                            Some(c) => c.intersection(ms).copied().collect(),
                        });
                    }
                    common.unwrap_or_default().into_iter().collect()
                })
                .collect();
            for pick in cartesian(&choices) {
                let mut tuple = vec![0; self.factors.len()];
                for (spider, value) in term.spiders.iter().zip(pick) {
                    for &leg in &spider.legs {
                        tuple[leg] = value;
                    }
                }
                out.insert(tuple);
            }
        }
        Ok(out)
    }
}

fn contract_term(term: &Term, n: usize, pairs: &[(usize, usize)], renumber: &[usize]) -> Result<Option<Term>> {
    let mut spiders: Vec<Option<Spider>> = term.spiders.iter().cloned().map(Some).collect();
    let mut owner = vec![0; n];
    for (i, s) in term.spiders.iter().enumerate() {
        for &l in &s.legs {
            owner[l] = i;
        }
    }
    let mut touched = vec![false; spiders.len()];
    for &(a, b) in pairs {
        let (sa, sb) = (owner[a], owner[b]);
        if sa != sb {
            let absorbed = spiders[sb].take().expect("live spider");
            for &l in &absorbed.legs {
                owner[l] = sa;
            }
            let target = spiders[sa].as_mut().expect("live spider");
            for r in absorbed.regions {
                if !target.regions.contains(&r) {
                    target.regions.push(r);
                }
            }
            target.legs.extend(absorbed.legs);
            touched[sa] = true;
        }
        let s = spiders[sa].as_mut().expect("live spider");
        s.legs.retain(|&l| l != a && l != b);
    }
    let mut out = Vec::new();
    for (i, slot) in spiders.into_iter().enumerate() {
        let Some(mut spider) = slot else { continue };
        if touched[i] && spider.regions.len() > 1 && !meets_all(&spider.regions)? {
            return Ok(None);
        }
        spider.legs = spider.legs.iter().filter(|&&l| renumber[l] != usize::MAX).map(|&l| renumber[l]).collect();
        if !spider.legs.is_empty() {
            spider.legs.sort_unstable();
            out.push(spider);
        }
    }
    out.sort_by_key(|s| s.legs[0]);
    Ok(Some(Term { spiders: out }))
}

/// A relation `source → target` kept as a diagram over `source ⊗ target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LazyRelation {
    source: Space,
    target: Space,
    body: StateDiagram,
}

impl LazyRelation {
    pub fn from_relation(r: &Relation) -> Self {
        LazyRelation { source: r.source().clone(), target: r.target().clone(), body: StateDiagram::from_relation(r) }
    }

    /// One full-region spider per factor of `space`, with `copies` legs each,
    /// laid out as `copies` consecutive blocks.
    fn spiders(space: &Space, copies: usize, regions: Option<&Cell>) -> StateDiagram {
        let n = space.len();
        let spiders = space
            .factors()
            .iter()
            .enumerate()
            .map(|(k, d)| Spider {
                regions: vec![match regions {
                    Some(cell) => cell.components()[k].clone(),
                    None => ConvexSet::full(d),
                }],
                legs: (0..copies).map(|c| c * n + k).collect(),
            })
            .collect();
        let mut factors = Vec::with_capacity(n * copies);
        for _ in 0..copies {
            factors.extend(space.factors().iter().cloned());
        }
        StateDiagram { factors, terms: vec![Term { spiders }] }
    }

    pub fn identity(space: &Space) -> Self {
        LazyRelation { source: space.clone(), target: space.clone(), body: Self::spiders(space, 2, None) }
    }

    /// `{(*, (a, a))}`
    pub fn cap(space: &Space) -> Self {
        LazyRelation { source: Space::unit(), target: space.tensor(space), body: Self::spiders(space, 2, None) }
    }

    /// `{((a, a), *)}`
    pub fn cup(space: &Space) -> Self {
        LazyRelation { source: space.tensor(space), target: Space::unit(), body: Self::spiders(space, 2, None) }
    }

    /// `{(a, (a, a))}`
    pub fn copy(space: &Space) -> Self {
        LazyRelation { source: space.clone(), target: space.tensor(space), body: Self::spiders(space, 3, None) }
    }

    /// `{((a, a), a)}`, the converse of copy.
    pub fn merge(space: &Space) -> Self {
        LazyRelation { source: space.tensor(space), target: space.clone(), body: Self::spiders(space, 3, None) }
    }

    /// `{(a, *)}`
    pub fn delete(space: &Space) -> Self {
        LazyRelation { source: space.clone(), target: Space::unit(), body: Self::spiders(space, 1, None) }
    }

    /// `{(x, x) | x ∈ region}`, a union of restricted diagonals (one per
    /// cell of `region`).
    pub fn diagonal_on(region: &Relation) -> Result<Self> {
        if !region.is_state() {
            return Err(Error::SpaceMismatch("diagonal needs a state".into()));
        }
        let space = region.target().clone();
        let mut terms = Vec::new();
        for cell in region.cells() {
            terms.extend(Self::spiders(&space, 2, Some(cell)).terms);
        }
        let mut factors = space.factors().to_vec();
        factors.extend(space.factors().iter().cloned());
        Ok(LazyRelation { source: space.clone(), target: space, body: StateDiagram { factors, terms } })
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn body(&self) -> &StateDiagram {
        &self.body
    }

    /// `self` first, then `then`.
    pub fn compose(&self, then: &LazyRelation) -> Result<LazyRelation> {
        if self.target != then.source {
            return Err(Error::SpaceMismatch(format!("compose {} with {}", self.target, then.source)));
        }
        let (a, b, c) = (self.source.len(), self.target.len(), then.target.len());
        let joined = self.body.tensor(&then.body);
        let pairs: Vec<(usize, usize)> = (0..b).map(|k| (a + k, a + b + k)).collect();
        let keep: Vec<usize> = (0..a).chain(a + 2 * b..a + 2 * b + c).collect();
        Ok(LazyRelation { source: self.source.clone(), target: then.target.clone(), body: joined.contract(&pairs, &keep)? })
    }

    pub fn converse(&self) -> Result<LazyRelation> {
        let (a, b) = (self.source.len(), self.target.len());
        let keep: Vec<usize> = (a..a + b).chain(0..a).collect();
        Ok(LazyRelation { source: self.target.clone(), target: self.source.clone(), body: self.body.contract(&[], &keep)? })
    }

    pub fn tensor(&self, other: &LazyRelation) -> Result<LazyRelation> {
        let (a, b) = (self.source.len(), self.target.len());
        let (c, d) = (other.source.len(), other.target.len());
        let joined = self.body.tensor(&other.body);
        let keep: Vec<usize> =
            (0..a).chain(a + b..a + b + c).chain(a..a + b).chain(a + b + c..a + b + c + d).collect();
        Ok(LazyRelation {
            source: self.source.tensor(&other.source),
            target: self.target.tensor(&other.target),
            body: joined.contract(&[], &keep)?,
        })
    }

    /// Image of a state `I → source` under this relation.
    pub fn apply(&self, state: &StateDiagram) -> Result<StateDiagram> {
        if state.factors() != self.source.factors() {
            return Err(Error::SpaceMismatch(format!("apply to {} expects {}", state.space(), self.source)));
        }
        let (a, b) = (self.source.len(), self.target.len());
        let joined = state.tensor(&self.body);
        let pairs: Vec<(usize, usize)> = (0..a).map(|k| (k, a + k)).collect();
        let keep: Vec<usize> = (2 * a..2 * a + b).collect();
        joined.contract(&pairs, &keep)
    }

    pub fn apply_relation(&self, state: &Relation) -> Result<Relation> {
        self.apply(&StateDiagram::from_relation(state))?.to_state()
    }

    pub fn to_relation(&self) -> Result<Relation> {
        self.body.to_relation(self.source.len())
    }

    /// Source-then-target tuples on all-lattice spaces.
    pub fn points(&self) -> Result<BTreeSet<Vec<usize>>> {
        self.body.points()
    }
}
