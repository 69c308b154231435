//! Convex relations between tensor products of atomic domains.
//!
//! A [`Relation`] is a finite union of product [`Cell`]s over
//! `source ⊗ target`. Composition, converse and tensor act cell by cell and
//! are exact for relations of this form. The structural relations (cap,
//! cup, copy, merge, delete) are diagonals, which are not finite cell
//! unions, so they live in [`crate::diagram`] and are only resolved when
//! applied to states.

use std::collections::BTreeSet;
use std::fmt;

use crate::convex::{ConvexSet, Shape};
use crate::diagram::StateDiagram;
use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::scalar::{half, Scalar};

/// An ordered tensor product of atomic domains; the empty product is `I`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Space {
    factors: Vec<Domain>,
}

impl Space {
    pub fn new(factors: Vec<Domain>) -> Self {
        Space { factors }
    }

    pub fn unit() -> Self {
        Space::default()
    }

    pub fn factors(&self) -> &[Domain] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn tensor(&self, other: &Space) -> Space {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Space { factors }
    }

    pub fn is_all_lattice(&self) -> bool {
        self.factors.iter().all(|d| d.is_lattice())
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "I");
        }
        let names: Vec<&str> = self.factors.iter().map(|d| d.name()).collect();
        write!(f, "{}", names.join(" ⊗ "))
    }
}

/// One convex set per factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    components: Vec<ConvexSet>,
}

impl Cell {
    pub fn new(components: Vec<ConvexSet>) -> Self {
        Cell { components }
    }

    pub fn components(&self) -> &[ConvexSet] {
        &self.components
    }

    pub fn into_components(self) -> Vec<ConvexSet> {
        self.components
    }

    pub fn concat(&self, other: &Cell) -> Cell {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Cell { components }
    }

    fn fits(&self, space: &Space) -> bool {
        self.components.len() == space.len()
            && self.components.iter().zip(space.factors()).all(|(c, d)| c.domain() == d)
    }

    /// Factor-wise containment.
    pub fn subsumed_by(&self, other: &Cell) -> Result<bool> {
        for (a, b) in self.components.iter().zip(&other.components) {
            if !a.subset(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Factor-wise `meets`.
    pub fn meets(&self, other: &Cell) -> Result<bool> {
        for (a, b) in self.components.iter().zip(&other.components) {
            if !a.meets(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn member(&self, point: &[Point]) -> Result<bool> {
        for (c, p) in self.components.iter().zip(point) {
            if !c.member(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "{{*}}");
        }
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join("×"))
    }
}

/// A convex relation `source → target` as a finite union of product cells.
/// With `source = I` it is a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    source: Space,
    target: Space,
    cells: Vec<Cell>,
}

impl Relation {
    pub fn new(source: Space, target: Space, cells: Vec<Cell>) -> Result<Self> {
        let whole = source.tensor(&target);
        for (i, cell) in cells.iter().enumerate() {
            if !cell.fits(&whole) {
                return Err(Error::SpaceMismatch(format!("cell {i} ({cell}) does not span {whole}")));
            }
        }
        Ok(Relation { source, target, cells })
    }

    pub fn state(target: Space, cells: Vec<Cell>) -> Result<Self> {
        Relation::new(Space::unit(), target, cells)
    }

    pub fn empty(source: Space, target: Space) -> Self {
        Relation { source, target, cells: Vec::new() }
    }

    /// The state holding every point of `space` (one full cell).
    pub fn full_state(space: &Space) -> Self {
        let cell = Cell::new(space.factors().iter().map(ConvexSet::full).collect());
        Relation { source: Space::unit(), target: space.clone(), cells: vec![cell] }
    }

    /// Identity on an all-lattice space as an explicit union of point cells.
    pub fn discrete_identity(space: &Space) -> Result<Self> {
        let tuples = lattice_tuples(space)?;
        let mut cells = Vec::with_capacity(tuples.len());
        for t in tuples {
            let comps: Vec<ConvexSet> = space
                .factors()
                .iter()
                .zip(&t)
                .map(|(d, &e)| ConvexSet::lattice_set(d, [e]))
                .collect::<Result<_>>()?;
            let mut both = comps.clone();
            both.extend(comps);
            cells.push(Cell::new(both));
        }
        Relation::new(space.clone(), space.clone(), cells)
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_state(&self) -> bool {
        self.source.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `source ⊗ target`
    pub fn space(&self) -> Space {
        self.source.tensor(&self.target)
    }

    /// Relational composition, `self` first: `A → B` then `B → C`.
    pub fn compose(&self, then: &Relation) -> Result<Relation> {
        if self.target != then.source {
            return Err(Error::SpaceMismatch(format!("compose {} with {}", self.target, then.source)));
        }
        let a = self.source.len();
        let b = then.source.len();
        let mut cells = Vec::new();
        for left in &self.cells {
            let (outer, middle) = left.components.split_at(a);
            for right in &then.cells {
                let (inner, rest) = right.components.split_at(b);
                if Cell::new(middle.to_vec()).meets(&Cell::new(inner.to_vec()))? {
                    let mut comps = outer.to_vec();
                    comps.extend(rest.iter().cloned());
                    cells.push(Cell::new(comps));
                }
            }
        }
        Relation { source: self.source.clone(), target: then.target.clone(), cells }.canonical()
    }

    /// Relational converse (the dagger).
    pub fn converse(&self) -> Relation {
        let a = self.source.len();
        let cells = self
            .cells
            .iter()
            .map(|c| {
                let (src, tgt) = c.components.split_at(a);
                let mut comps = tgt.to_vec();
                comps.extend(src.iter().cloned());
                Cell::new(comps)
            })
            .collect();
        Relation { source: self.target.clone(), target: self.source.clone(), cells }
    }

    /// Monoidal product: `A → B` and `C → D` give `A ⊗ C → B ⊗ D`.
    pub fn tensor(&self, other: &Relation) -> Relation {
        let (a, c) = (self.source.len(), other.source.len());
        let mut cells = Vec::with_capacity(self.cells.len() * other.cells.len());
        for x in &self.cells {
            let (xa, xb) = x.components.split_at(a);
            for y in &other.cells {
                let (yc, yd) = y.components.split_at(c);
                let mut comps = xa.to_vec();
                comps.extend(yc.iter().cloned());
                comps.extend(xb.iter().cloned());
                comps.extend(yd.iter().cloned());
                cells.push(Cell::new(comps));
            }
        }
        Relation {
            source: self.source.tensor(&other.source),
            target: self.target.tensor(&other.target),
            cells,
        }
    }

    /// Drops duplicate cells and cells contained factor-wise in another.
    pub fn canonical(self) -> Result<Relation> {
        let mut kept: Vec<Cell> = Vec::new();
        for cell in self.cells {
            let mut subsumed = false;
            for k in &kept {
                if cell.subsumed_by(k)? {
                    subsumed = true;
                    break;
                }
            }
            if subsumed {
                continue;
            }
            let mut next = Vec::with_capacity(kept.len() + 1);
            for k in kept {
                if !k.subsumed_by(&cell)? {
                    next.push(k);
                }
            }
            next.push(cell);
            kept = next;
        }
        Ok(Relation { source: self.source, target: self.target, cells: kept })
    }

    /// Contracts and permutes the wires of a state.
    pub fn apply_wire_plan(&self, plan: &WirePlan) -> Result<Relation> {
        if !self.is_state() {
            return Err(Error::SpaceMismatch("wire plans apply to states".into()));
        }
        StateDiagram::from_relation(self).apply_plan(plan)?.to_state()
    }

    /// All tuples of an all-lattice relation (source coordinates first).
    pub fn points(&self) -> Result<BTreeSet<Vec<usize>>> {
        let space = self.space();
        if !space.is_all_lattice() {
            return Err(Error::DomainMismatch(format!("{space} has continuous factors")));
        }
        let mut out = BTreeSet::new();
        for cell in &self.cells {
            let members: Vec<Vec<usize>> = cell
                .components
                .iter()
                .map(|c| match c.shape() {
                    Shape::Lattice(ms) => ms.iter().copied().collect(),
                    _ => unreachable!("lattice factor"),
                })
                .collect();
            for t in cartesian(&members) {
                out.insert(t);
            }
        }
        Ok(out)
    }

    /// Set equality. Exact point comparison on all-lattice spaces, mutual
    /// cell-wise subsumption otherwise.
    pub fn equivalent(&self, other: &Relation) -> Result<bool> {
        if self.source != other.source || self.target != other.target {
            return Ok(false);
        }
        if self.space().is_all_lattice() {
            return Ok(self.points()? == other.points()?);
        }
        Ok(covers(other, self)? && covers(self, other)?)
    }

    /// Checks the relation is closed under mixing, exhaustively on lattice
    /// spaces and by midpoint sampling across cells otherwise.
    pub fn convexity_audit(&self) -> Result<AuditReport> {
        let space = self.space();
        if space.is_all_lattice() {
            return self.audit_lattice(&space);
        }
        let samples: Vec<Vec<Vec<Point>>> = self.cells.iter().map(sample_points).collect();
        let mut violations = Vec::new();
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                for p in &samples[i] {
                    for q in &samples[j] {
                        let mid: Vec<Point> = space
                            .factors()
                            .iter()
                            .zip(p.iter().zip(q))
                            .map(|(d, (x, y))| midpoint(d, x, y))
                            .collect();
                        if !self.contains_point(&mid)? {
                            violations.push(Violation {
                                cells: (i, j),
                                witness: show_tuple(&space, &mid),
                            });
                        }
                    }
                }
            }
        }
        Ok(AuditReport { exhaustive: false, violations })
    }

    fn audit_lattice(&self, space: &Space) -> Result<AuditReport> {
        let points = self.points()?;
        let mut violations = Vec::new();
        for p in &points {
            for q in &points {
                if p >= q {
                    continue;
                }
                let joined: Vec<usize> =
                    space.factors().iter().zip(p.iter().zip(q)).map(|(d, (a, b))| d.join(*a, *b)).collect();
                if !points.contains(&joined) {
                    let owner = |t: &Vec<usize>| {
                        let pt: Vec<Point> = t.iter().map(|&e| Point::Element(e)).collect();
                        self.cells.iter().position(|c| c.member(&pt).unwrap_or(false)).unwrap_or(0)
                    };
                    let pt: Vec<Point> = joined.iter().map(|&e| Point::Element(e)).collect();
                    violations.push(Violation { cells: (owner(p), owner(q)), witness: show_tuple(space, &pt) });
                }
            }
        }
        Ok(AuditReport { exhaustive: true, violations })
    }

    pub fn contains_point(&self, point: &[Point]) -> Result<bool> {
        for cell in &self.cells {
            if cell.member(point)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cells.is_empty() {
            return write!(f, "∅");
        }
        // A state on a single lattice factor reads best as one point set.
        if self.is_state() && self.target.len() == 1 && self.target.is_all_lattice() {
            if let Ok(points) = self.points() {
                let d = &self.target.factors()[0];
                let names: Vec<&str> = points.iter().map(|t| d.element_name(t[0])).collect();
                return write!(f, "{{{}}}", names.join(", "));
            }
        }
        let parts: Vec<String> = self.cells.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

/// Every cell of `inner` is contained factor-wise in some cell of `outer`.
pub fn covers(outer: &Relation, inner: &Relation) -> Result<bool> {
    'cells: for c in &inner.cells {
        for d in &outer.cells {
            if c.subsumed_by(d)? {
                continue 'cells;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Indices of the two cells whose points were mixed.
    pub cells: (usize, usize),
    /// The mixture that lies in no cell.
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub exhaustive: bool,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Factor-level contraction recipe for a state whose factors are grouped
/// into wires (one wire per simple type).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WirePlan {
    /// Layout of the state: each wire carries one space.
    pub wires: Vec<Space>,
    /// Wire pairs joined by a cup.
    pub cups: Vec<(usize, usize)>,
    /// Wires kept, in output order. Wires in neither list are discarded.
    pub survivors: Vec<usize>,
}

impl WirePlan {
    /// Identity plan on a layout.
    pub fn identity(wires: Vec<Space>) -> Self {
        let survivors = (0..wires.len()).collect();
        WirePlan { wires, cups: Vec::new(), survivors }
    }

    pub fn output_space(&self) -> Space {
        self.survivors.iter().fold(Space::unit(), |acc, &w| acc.tensor(&self.wires[w]))
    }

    pub fn input_space(&self) -> Space {
        self.wires.iter().fold(Space::unit(), |acc, w| acc.tensor(w))
    }

    /// Factor-level `(pairs, keep)`.
    pub fn to_factor_plan(&self) -> Result<(Vec<(usize, usize)>, Vec<usize>)> {
        let n = self.wires.len();
        let mut seen = vec![false; n];
        let mut mark = |w: usize| -> Result<()> {
            if w >= n {
                return Err(Error::MalformedPlan(format!("wire {w} out of range (have {n})")));
            }
            if std::mem::replace(&mut seen[w], true) {
                return Err(Error::MalformedPlan(format!("wire {w} used twice")));
            }
            Ok(())
        };
        for &(a, b) in &self.cups {
            mark(a)?;
            mark(b)?;
            if self.wires[a] != self.wires[b] {
                return Err(Error::MalformedPlan(format!(
                    "cup joins wire {a} ({}) with wire {b} ({})",
                    self.wires[a], self.wires[b]
                )));
            }
        }
        for &s in &self.survivors {
            mark(s)?;
        }
        let mut start = Vec::with_capacity(n);
        let mut offset = 0;
        for w in &self.wires {
            start.push(offset);
            offset += w.len();
        }
        let mut pairs = Vec::new();
        for &(a, b) in &self.cups {
            for k in 0..self.wires[a].len() {
                pairs.push((start[a] + k, start[b] + k));
            }
        }
        let keep = self.survivors.iter().flat_map(|&s| start[s]..start[s] + self.wires[s].len()).collect();
        Ok((pairs, keep))
    }
}

fn sample_points(cell: &Cell) -> Vec<Vec<Point>> {
    let centre: Vec<Point> = cell.components.iter().map(ConvexSet::center).collect();
    let low: Vec<Point> = cell.components.iter().map(|c| c.extreme_points().swap_remove(0)).collect();
    let high: Vec<Point> = cell.components.iter().map(|c| c.extreme_points().pop().expect("nonempty")).collect();
    let mut out = vec![centre];
    for s in [low, high] {
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn midpoint(domain: &Domain, x: &Point, y: &Point) -> Point {
    match (x, y) {
        (Point::Coords(a), Point::Coords(b)) => {
            Point::Coords(a.iter().zip(b).map(|(u, v)| (u + v) * half()).collect::<Vec<Scalar>>())
        }
        (Point::Element(a), Point::Element(b)) => Point::Element(domain.join(*a, *b)),
        _ => unreachable!("points of one domain"),
    }
}

fn show_tuple(space: &Space, point: &[Point]) -> String {
    let parts: Vec<String> = space.factors().iter().zip(point).map(|(d, p)| d.show_point(p)).collect();
    format!("⟨{}⟩", parts.join(", "))
}

pub(crate) fn lattice_tuples(space: &Space) -> Result<Vec<Vec<usize>>> {
    let mut ranges = Vec::with_capacity(space.len());
    for d in space.factors() {
        match d.len() {
            Some(n) => ranges.push((0..n).collect::<Vec<usize>>()),
            None => return Err(Error::DomainMismatch(format!("`{}` is continuous", d.name()))),
        }
    }
    Ok(cartesian(&ranges))
}

pub(crate) fn cartesian(choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(choices.len())];
    for options in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |&o| {
                    let mut next = prefix.clone();
                    next.push(o);
                    next
                })
            })
            .collect();
    }
    out
}
