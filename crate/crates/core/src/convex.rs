//! Convex subsets of atomic domains and the queries the relation engine
//! needs from them: membership, meeting, containment, intersection, hull.
//!
//! Continuous sets are either axis-aligned boxes or V-represented polytopes.
//! Lattice sets are join-closed subsets of a finite semilattice.
//!
//! `meets` on continuous domains is deliberately stricter than closed-set
//! intersection: two sets meet only if their relative interiors share a
//! point, where a box only demands strict slack in coordinates in which
//! every participating set has positive width. Sets that merely touch along
//! a face (such as the `sweet` and `bitter` taste regions, which share the
//! face `t_sweet = 1/2 = t_bitter`) do not meet.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::domain::{Domain, DomainKind, Interval, Point};
use crate::error::{Error, Result};
use crate::hrep;
use crate::lp::{maximize, Cmp, Outcome};
use crate::scalar::{fmt_decimal, int, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Box(Vec<Interval>),
    /// Extreme points only, sorted lexicographically.
    Polytope(Vec<Vec<Scalar>>),
    Lattice(BTreeSet<usize>),
}

/// Where a set came from; used only for printing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Name(String),
    Hull(Vec<String>),
}

impl Label {
    /// `hull(sweet∪bitter)`
    pub fn human(&self) -> String {
        match self {
            Label::Name(n) => n.clone(),
            Label::Hull(parts) => format!("hull({})", parts.join("∪")),
        }
    }

    /// `hull(sweet bitter)`
    pub fn source(&self) -> String {
        match self {
            Label::Name(n) => n.clone(),
            Label::Hull(parts) => format!("hull({})", parts.join(" ")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvexSet {
    domain: Domain,
    shape: Shape,
    label: Option<Label>,
}

/// Structural equality (labels ignored). See [`ConvexSet::equivalent`] for
/// set equality.
impl PartialEq for ConvexSet {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.shape == other.shape
    }
}

impl Eq for ConvexSet {}

impl ConvexSet {
    pub fn boxed(domain: &Domain, intervals: Vec<Interval>) -> Result<Self> {
        let Some(bounds) = domain.bounds() else {
            return Err(Error::DomainMismatch(format!("box on lattice domain `{}`", domain.name())));
        };
        if intervals.len() != bounds.len() {
            return Err(Error::DomainMismatch(format!(
                "box has {} intervals, `{}` has {} dimensions",
                intervals.len(),
                domain.name(),
                bounds.len()
            )));
        }
        for (k, (iv, b)) in intervals.iter().zip(bounds).enumerate() {
            if !b.contains_interval(iv) {
                return Err(Error::DomainMismatch(format!(
                    "interval {iv} leaves bound {b} of `{}` in coordinate {k}",
                    domain.name()
                )));
            }
        }
        Ok(ConvexSet { domain: domain.clone(), shape: Shape::Box(intervals), label: None })
    }

    /// Convex hull of `vertices`; redundant points are removed.
    pub fn polytope(domain: &Domain, vertices: Vec<Vec<Scalar>>) -> Result<Self> {
        if domain.is_lattice() {
            return Err(Error::DomainMismatch(format!("polytope on lattice domain `{}`", domain.name())));
        }
        if vertices.is_empty() {
            return Err(Error::MalformedInput("polytope needs at least one vertex".into()));
        }
        for v in &vertices {
            domain.check_point(&Point::Coords(v.clone()))?;
        }
        Ok(ConvexSet { domain: domain.clone(), shape: Shape::Polytope(canonical_vertices(vertices)?), label: None })
    }

    /// A join-closed, nonempty subset of a lattice domain.
    pub fn lattice_set(domain: &Domain, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let Some(n) = domain.len() else {
            return Err(Error::DomainMismatch(format!("element set on continuous domain `{}`", domain.name())));
        };
        let members: BTreeSet<usize> = members.into_iter().collect();
        if members.is_empty() {
            return Err(Error::MalformedInput(format!("empty subset of `{}`", domain.name())));
        }
        if let Some(bad) = members.iter().find(|&&m| m >= n) {
            return Err(Error::DomainMismatch(format!("element #{bad} not in `{}`", domain.name())));
        }
        for &a in &members {
            for &b in &members {
                let j = domain.join(a, b);
                if !members.contains(&j) {
                    return Err(Error::MalformedInput(format!(
                        "subset of `{}` is not join-closed: {} ∨ {} = {} missing",
                        domain.name(),
                        domain.element_name(a),
                        domain.element_name(b),
                        domain.element_name(j)
                    )));
                }
            }
        }
        Ok(ConvexSet { domain: domain.clone(), shape: Shape::Lattice(members), label: None })
    }

    /// The whole domain.
    pub fn full(domain: &Domain) -> Self {
        let shape = match domain.kind() {
            DomainKind::Continuous { bounds } => Shape::Box(bounds.clone()),
            DomainKind::Lattice { elements, .. } => Shape::Lattice((0..elements.len()).collect()),
        };
        ConvexSet { domain: domain.clone(), shape, label: None }
    }

    pub fn singleton(domain: &Domain, point: Point) -> Result<Self> {
        domain.check_point(&point)?;
        match point {
            Point::Coords(x) => {
                let intervals = x.into_iter().map(|v| Interval { lo: v.clone(), hi: v }).collect();
                ConvexSet::boxed(domain, intervals)
            }
            Point::Element(e) => ConvexSet::lattice_set(domain, [e]),
        }
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = Some(label);
        self
    }

    pub fn without_label(mut self) -> Self {
        self.label = None;
        self
    }

    pub fn label(&self) -> Option<&Label> {
        self.label.as_ref()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_full(&self) -> bool {
        *self == ConvexSet::full(&self.domain)
    }

    fn same_domain(&self, other: &ConvexSet) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!("`{}` vs `{}`", self.domain.name(), other.domain.name())))
        }
    }

    /// Box corners, polytope vertices or lattice members.
    pub fn extreme_points(&self) -> Vec<Point> {
        match &self.shape {
            Shape::Box(ivs) => box_corners(ivs).into_iter().map(Point::Coords).collect(),
            Shape::Polytope(vs) => vs.iter().cloned().map(Point::Coords).collect(),
            Shape::Lattice(ms) => ms.iter().copied().map(Point::Element).collect(),
        }
    }

    /// A point of the relative interior (join of all members on lattices).
    pub fn center(&self) -> Point {
        match &self.shape {
            Shape::Box(ivs) => Point::Coords(ivs.iter().map(Interval::midpoint).collect()),
            Shape::Polytope(vs) => {
                let n = Scalar::from_integer(vs.len().into());
                let mut acc = vec![Scalar::zero(); vs[0].len()];
                for v in vs {
                    for (a, x) in acc.iter_mut().zip(v) {
                        *a += x;
                    }
                }
                Point::Coords(acc.into_iter().map(|a| a / &n).collect())
            }
            Shape::Lattice(ms) => {
                let top = ms.iter().copied().reduce(|a, b| self.domain.join(a, b)).expect("nonempty");
                Point::Element(top)
            }
        }
    }

    /// Per-coordinate extent (max - min). Empty for lattice sets.
    fn widths(&self) -> Vec<Scalar> {
        match &self.shape {
            Shape::Box(ivs) => ivs.iter().map(Interval::width).collect(),
            Shape::Polytope(vs) => (0..vs[0].len())
                .map(|k| {
                    let max = vs.iter().map(|v| &v[k]).max().unwrap();
                    let min = vs.iter().map(|v| &v[k]).min().unwrap();
                    max - min
                })
                .collect(),
            Shape::Lattice(_) => Vec::new(),
        }
    }

    pub fn member(&self, point: &Point) -> Result<bool> {
        self.domain.check_point(point)?;
        Ok(match (&self.shape, point) {
            (Shape::Box(ivs), Point::Coords(x)) => ivs.iter().zip(x).all(|(iv, v)| iv.contains(v)),
            (Shape::Polytope(vs), Point::Coords(x)) => in_hull(vs, x),
            (Shape::Lattice(ms), Point::Element(e)) => ms.contains(e),
            _ => unreachable!("point checked against domain"),
        })
    }

    /// True iff the relative interiors meet; see the module docs.
    pub fn meets(&self, other: &ConvexSet) -> Result<bool> {
        self.same_domain(other)?;
        meets_all(&[self.clone(), other.clone()])
    }

    pub fn subset(&self, other: &ConvexSet) -> Result<bool> {
        self.same_domain(other)?;
        Ok(match (&self.shape, &other.shape) {
            (Shape::Box(a), Shape::Box(b)) => a.iter().zip(b).all(|(x, y)| y.contains_interval(x)),
            (Shape::Lattice(a), Shape::Lattice(b)) => a.is_subset(b),
            (_, Shape::Box(b)) => self.extreme_points().iter().all(|p| match p {
                Point::Coords(x) => b.iter().zip(x).all(|(iv, v)| iv.contains(v)),
                Point::Element(_) => false,
            }),
            (_, Shape::Polytope(vs)) => self.extreme_points().iter().all(|p| match p {
                Point::Coords(x) => in_hull(vs, x),
                Point::Element(_) => false,
            }),
            _ => unreachable!("same domain"),
        })
    }

    /// Mutual containment.
    pub fn equivalent(&self, other: &ConvexSet) -> Result<bool> {
        Ok(self.subset(other)? && other.subset(self)?)
    }

    pub fn intersect(&self, other: &ConvexSet) -> Result<ConvexSet> {
        self.same_domain(other)?;
        if !self.meets(other)? {
            return Err(Error::EmptyIntersection(format!("{self} ∩ {other}")));
        }
        intersect_met(self, other)
    }

    pub fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ConvexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Box(ivs) => {
                let parts: Vec<String> = ivs.iter().map(|iv| iv.to_string()).collect();
                write!(f, "{}", parts.join("×"))
            }
            Shape::Polytope(vs) => match &self.label {
                Some(label) => write!(f, "{}", label.human()),
                None => {
                    let pts: Vec<String> =
                        vs.iter().map(|v| self.domain.show_point(&Point::Coords(v.clone()))).collect();
                    write!(f, "hull{{{}}}", pts.join(", "))
                }
            },
            Shape::Lattice(ms) => {
                let names: Vec<&str> = ms.iter().map(|&m| self.domain.element_name(m)).collect();
                write!(f, "{{{}}}", names.join(", "))
            }
        }
    }
}

/// Intersection of two sets already known to meet.
fn intersect_met(a: &ConvexSet, b: &ConvexSet) -> Result<ConvexSet> {
    match (&a.shape, &b.shape) {
        (Shape::Box(x), Shape::Box(y)) => {
            let ivs: Vec<Interval> = x
                .iter()
                .zip(y)
                .map(|(p, q)| Interval { lo: (&p.lo).max(&q.lo).clone(), hi: (&p.hi).min(&q.hi).clone() })
                .collect();
            Ok(keep_label(a, b, Shape::Box(ivs)))
        }
        (Shape::Lattice(x), Shape::Lattice(y)) => {
            Ok(keep_label(a, b, Shape::Lattice(x.intersection(y).copied().collect())))
        }
        _ => {
            if a.subset(b)? {
                Ok(a.clone())
            } else if b.subset(a)? {
                Ok(b.clone())
            } else {
                intersect_by_constraints(&[a.clone(), b.clone()])
            }
        }
    }
}

fn keep_label(a: &ConvexSet, b: &ConvexSet, shape: Shape) -> ConvexSet {
    if shape == a.shape {
        a.clone()
    } else if shape == b.shape {
        b.clone()
    } else {
        ConvexSet { domain: a.domain.clone(), shape, label: None }
    }
}

/// Intersection of several sets on one domain (used when spiders merge).
pub fn intersect_all(sets: &[ConvexSet]) -> Result<ConvexSet> {
    let Some(first) = sets.first() else {
        return Err(Error::MalformedInput("intersection of no sets".into()));
    };
    for s in sets {
        first.same_domain(s)?;
    }
    if !meets_all(sets)? {
        let parts: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        return Err(Error::EmptyIntersection(parts.join(" ∩ ")));
    }
    let mut distinct: Vec<ConvexSet> = Vec::new();
    for s in sets {
        if !distinct.contains(s) {
            distinct.push(s.clone());
        }
    }
    // Fold boxes (and lattice sets) together first; they intersect exactly.
    let mut combined: Option<ConvexSet> = None;
    let mut polytopes = Vec::new();
    for s in distinct {
        match s.shape {
            Shape::Polytope(_) => polytopes.push(s),
            _ => {
                combined = Some(match combined {
                    None => s,
                    Some(c) => intersect_met(&c, &s)?,
                })
            }
        }
    }
    let mut candidates: Vec<ConvexSet> = polytopes;
    candidates.extend(combined);
    // Keep only minimal candidates.
    let mut minimal: Vec<ConvexSet> = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let mut dominated = false;
        for (j, d) in candidates.iter().enumerate() {
            if i != j && d.subset(c)? && (!c.subset(d)? || j < i) {
                dominated = true;
                break;
            }
        }
        if !dominated {
            minimal.push(c.clone());
        }
    }
    match minimal.len() {
        1 => Ok(minimal.pop().unwrap()),
        _ => intersect_by_constraints(&minimal),
    }
}

/// Exact intersection of continuous sets through their half-space
/// descriptions. Gives up on polytopes with too many vertices for the
/// brute-force facet search.
fn intersect_by_constraints(sets: &[ConvexSet]) -> Result<ConvexSet> {
    let unsupported = || {
        let parts: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        Error::UnsupportedIntersection(parts.join(" and "))
    };
    let domain = &sets[0].domain;
    let mut constraints = Vec::new();
    for s in sets {
        match &s.shape {
            Shape::Box(ivs) => {
                let bounds: Vec<(Scalar, Scalar)> = ivs.iter().map(|iv| (iv.lo.clone(), iv.hi.clone())).collect();
                constraints.extend(hrep::box_constraints(&bounds));
            }
            Shape::Polytope(vs) => constraints.extend(hrep::polytope_constraints(vs).ok_or_else(unsupported)?),
            Shape::Lattice(_) => return Err(unsupported()),
        }
    }
    let points = hrep::vertices(&constraints, domain.dim()).ok_or_else(unsupported)?;
    if points.is_empty() {
        return Err(Error::EmptyIntersection(sets.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ∩ ")));
    }
    ConvexSet::polytope(domain, points)
}

/// Whether the relative interiors of all `sets` share a point.
pub fn meets_all(sets: &[ConvexSet]) -> Result<bool> {
    let Some(first) = sets.first() else {
        return Err(Error::MalformedInput("meets of no sets".into()));
    };
    for s in sets {
        first.same_domain(s)?;
    }
    if first.domain.is_lattice() {
        let mut common: Option<BTreeSet<usize>> = None;
        for s in sets {
            let Shape::Lattice(ms) = &s.shape else { unreachable!() };
            common = Some(match common {
                None => ms.clone(),
                Some(c) => c.intersection(ms).copied().collect(),
            });
        }
        return Ok(!common.unwrap().is_empty());
    }

    let dim = first.domain.dim();
    let widths: Vec<Vec<Scalar>> = sets.iter().map(|s| s.widths()).collect();
    let strict: Vec<bool> = (0..dim).map(|k| widths.iter().all(|w| w[k].is_positive())).collect();

    let polys: Vec<&Vec<Vec<Scalar>>> = sets
        .iter()
        .filter_map(|s| match &s.shape {
            Shape::Polytope(vs) => Some(vs),
            _ => None,
        })
        .collect();
    let boxes: Vec<&Vec<Interval>> = sets
        .iter()
        .filter_map(|s| match &s.shape {
            Shape::Box(ivs) => Some(ivs),
            _ => None,
        })
        .collect();

    if polys.is_empty() {
        return Ok((0..dim).all(|k| {
            let lo = boxes.iter().map(|b| &b[k].lo).max().unwrap();
            let hi = boxes.iter().map(|b| &b[k].hi).min().unwrap();
            if strict[k] {
                lo < hi
            } else {
                lo <= hi
            }
        }));
    }

    // Variables: t, then for each polytope its weights written as t + mu_i
    // with mu_i >= 0, so every weight is at least t.
    let mut offsets = Vec::with_capacity(polys.len());
    let mut nvars = 1;
    for p in &polys {
        offsets.push(nvars);
        nvars += p.len();
    }
    // Coordinate k of polytope j's point as a linear form.
    let coord = |j: usize, k: usize| {
        let mut row = vec![Scalar::zero(); nvars];
        for (i, v) in polys[j].iter().enumerate() {
            row[0] += &v[k];
            row[offsets[j] + i] = v[k].clone();
        }
        row
    };
    let mut a = Vec::new();
    let mut cmps = Vec::new();
    let mut b = Vec::new();
    for (j, p) in polys.iter().enumerate() {
        let mut row = vec![Scalar::zero(); nvars];
        row[0] = Scalar::from_integer(p.len().into());
        for i in 0..p.len() {
            row[offsets[j] + i] = int(1);
        }
        a.push(row);
        cmps.push(Cmp::Eq);
        b.push(int(1));
    }
    for j in 1..polys.len() {
        for k in 0..dim {
            let row: Vec<Scalar> = coord(j, k).into_iter().zip(coord(0, k)).map(|(x, y)| x - y).collect();
            a.push(row);
            cmps.push(Cmp::Eq);
            b.push(Scalar::zero());
        }
    }
    for ivs in &boxes {
        for k in 0..dim {
            let slack = if strict[k] { int(1) } else { Scalar::zero() };
            let mut lower = coord(0, k);
            lower[0] -= &slack;
            a.push(lower);
            cmps.push(Cmp::Ge);
            b.push(ivs[k].lo.clone());
            let mut upper = coord(0, k);
            upper[0] += &slack;
            a.push(upper);
            cmps.push(Cmp::Le);
            b.push(ivs[k].hi.clone());
        }
    }
    let mut cap = vec![Scalar::zero(); nvars];
    cap[0] = int(1);
    a.push(cap);
    cmps.push(Cmp::Le);
    b.push(int(1));

    let mut objective = vec![Scalar::zero(); nvars];
    objective[0] = int(1);
    Ok(match maximize(&objective, &a, &cmps, &b) {
        Outcome::Optimal { value, .. } => value.is_positive(),
        Outcome::Infeasible => false,
        Outcome::Unbounded => unreachable!("t is capped"),
    })
}

/// Convex hull of the parts. Continuous parts give a polytope over all their
/// extreme points; lattice parts give the join closure of their union.
pub fn hull(domain: &Domain, parts: &[ConvexSet]) -> Result<ConvexSet> {
    if parts.is_empty() {
        return Err(Error::MalformedInput("hull of no parts".into()));
    }
    for p in parts {
        if &p.domain != domain {
            return Err(Error::DomainMismatch(format!("hull part on `{}`, expected `{}`", p.domain.name(), domain.name())));
        }
    }
    if domain.is_lattice() {
        let mut members = BTreeSet::new();
        for p in parts {
            if let Shape::Lattice(ms) = &p.shape {
                members.extend(ms.iter().copied());
            }
        }
        return ConvexSet::lattice_set(domain, join_closure(domain, members));
    }
    let mut points = Vec::new();
    for p in parts {
        for e in p.extreme_points() {
            if let Point::Coords(x) = e {
                points.push(x);
            }
        }
    }
    ConvexSet::polytope(domain, points)
}

pub fn join_closure(domain: &Domain, members: BTreeSet<usize>) -> BTreeSet<usize> {
    let mut closed = members;
    loop {
        let mut added = Vec::new();
        for &a in &closed {
            for &b in &closed {
                let j = domain.join(a, b);
                if !closed.contains(&j) {
                    added.push(j);
                }
            }
        }
        if added.is_empty() {
            return closed;
        }
        closed.extend(added);
    }
}

fn box_corners(ivs: &[Interval]) -> Vec<Vec<Scalar>> {
    let mut corners: Vec<Vec<Scalar>> = vec![Vec::with_capacity(ivs.len())];
    for iv in ivs {
        let ends: Vec<&Scalar> = if iv.is_degenerate() { vec![&iv.lo] } else { vec![&iv.lo, &iv.hi] };
        corners = corners
            .into_iter()
            .flat_map(|c| {
                ends.iter().map(move |e| {
                    let mut next = c.clone();
                    next.push((*e).clone());
                    next
                })
            })
            .collect();
    }
    corners
}

/// Is `x` a convex combination of `vertices`? One phase-one LP over the weights.
fn in_hull(vertices: &[Vec<Scalar>], x: &[Scalar]) -> bool {
    if vertices.iter().any(|v| v.as_slice() == x) {
        return true;
    }
    let n = vertices.len();
    let mut a = Vec::with_capacity(x.len() + 1);
    a.push(vec![Scalar::one(); n]);
    for k in 0..x.len() {
        a.push(vertices.iter().map(|v| v[k].clone()).collect());
    }
    let mut b = vec![Scalar::one()];
    b.extend(x.iter().cloned());
    let cmps = vec![Cmp::Eq; a.len()];
    !matches!(maximize(&vec![Scalar::zero(); n], &a, &cmps, &b), Outcome::Infeasible)
}

/// Points rescaled to a common denominator, when every coordinate fits
/// comfortably in `i64` (so the prefilters below cannot overflow `i128`).
fn scaled(points: &[Vec<Scalar>]) -> Option<Vec<Vec<i128>>> {
    let lcm = points.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let bound = BigInt::from(1u64 << 40);
    points
        .iter()
        .map(|p| {
            p.iter()
                .map(|x| {
                    let v = x.numer() * (&lcm / x.denom());
                    if v.abs() > bound { None } else { v.to_i128() }
                })
                .collect()
        })
        .collect()
}

/// Cheap sufficient test for extremeness: `points[i]` is the unique
/// maximiser of a functional pointing away from the centroid.
fn exposed(points: &[Vec<i128>], i: usize) -> bool {
    let m = points.len() as i128;
    let dim = points[i].len();
    let sum: Vec<i128> = (0..dim).map(|k| points.iter().map(|v| v[k]).sum()).collect();
    let away: Vec<i128> = (0..dim).map(|k| m * points[i][k] - sum[k]).collect();
    let signs: Vec<i128> = away.iter().map(|a| a.signum()).collect();
    let dot = |c: &[i128], x: &[i128]| c.iter().zip(x).map(|(a, b)| a * b).sum::<i128>();
    [away, signs].iter().any(|c| {
        let top = dot(c, &points[i]);
        points.iter().enumerate().all(|(j, v)| j == i || dot(c, v) < top)
    })
}

/// Whether `x` lies on a segment between two of `points`.
fn on_segment(points: &[Vec<i128>], x: &[i128]) -> bool {
    points.iter().enumerate().any(|(a, p)| {
        points[a + 1..].iter().any(|q| {
            let dx: Vec<i128> = x.iter().zip(p).map(|(u, v)| u - v).collect();
            let dq: Vec<i128> = q.iter().zip(p).map(|(u, v)| u - v).collect();
            let Some(k) = dq.iter().position(|&d| d != 0) else { return false };
            (0..dx.len()).all(|l| dx[l] * dq[k] == dx[k] * dq[l])
                && dx[k] * dq[k] >= 0
                && dx[k].abs() <= dq[k].abs()
        })
    })
}

/// Deduplicates, removes every point lying in the hull of the others, sorts.
fn canonical_vertices(mut vertices: Vec<Vec<Scalar>>) -> Result<Vec<Vec<Scalar>>> {
    let dim = vertices[0].len();
    if vertices.iter().any(|v| v.len() != dim) {
        return Err(Error::MalformedInput("polytope vertices of mixed dimension".into()));
    }
    vertices.sort();
    vertices.dedup();
    let mut ints = scaled(&vertices);
    let mut i = 0;
    while i < vertices.len() && vertices.len() > 1 {
        if ints.as_ref().is_some_and(|p| exposed(p, i)) {
            i += 1;
            continue;
        }
        let candidate = vertices.remove(i);
        let int_candidate = ints.as_mut().map(|p| p.remove(i));
        let on_edge = match (&ints, &int_candidate) {
            (Some(p), Some(c)) => on_segment(p, c),
            _ => false,
        };
        if on_edge || in_hull(&vertices, &candidate) {
            continue;
        }
        vertices.insert(i, candidate);
        if let (Some(p), Some(c)) = (ints.as_mut(), int_candidate) {
            p.insert(i, c);
        }
        i += 1;
    }
    Ok(vertices)
}

/// Formats a coordinate vector the way boxes print their bounds.
pub fn show_coords(x: &[Scalar]) -> String {
    let parts: Vec<String> = x.iter().map(fmt_decimal).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::AtomicDomain;
    use crate::scalar::ratio;

    fn iv(lo: Scalar, hi: Scalar) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn unit() -> Interval {
        iv(int(0), int(1))
    }

    fn taste() -> Domain {
        AtomicDomain::continuous("taste", vec![unit(); 5]).unwrap()
    }

    /// Coordinate `which` in [1/2, 1], the rest in [0, 1/2].
    fn taste_box(d: &Domain, which: usize) -> ConvexSet {
        let ivs = (0..5)
            .map(|k| if k == which { iv(ratio(1, 2), int(1)) } else { iv(int(0), ratio(1, 2)) })
            .collect();
        ConvexSet::boxed(d, ivs).unwrap()
    }

    fn colour() -> Domain {
        AtomicDomain::continuous("colour", vec![iv(int(0), int(360)), unit(), unit()]).unwrap()
    }

    fn colour_box(h: (i64, i64), s: (Scalar, Scalar), v: (Scalar, Scalar)) -> ConvexSet {
        ConvexSet::boxed(&colour(), vec![iv(int(h.0), int(h.1)), iv(s.0, s.1), iv(v.0, v.1)]).unwrap()
    }

    #[test]
    fn box_membership() {
        let yellow = colour_box((45, 75), (ratio(1, 2), int(1)), (int(0), int(1)));
        let p = Point::Coords(vec![int(60), ratio(3, 4), ratio(1, 2)]);
        assert!(yellow.member(&p).unwrap());
        let q = Point::Coords(vec![int(80), ratio(3, 4), ratio(1, 2)]);
        assert!(!yellow.member(&q).unwrap());
    }

    #[test]
    fn hull_contains_mixed_midpoint() {
        let d = taste();
        let (sweet, bitter) = (taste_box(&d, 0), taste_box(&d, 2));
        let h = hull(&d, &[sweet.clone(), bitter.clone()]).unwrap();
        // (1,0,0,0,0) from sweet and (0,0,1,0,0) from bitter, lambda = (1/2, 1/2).
        let mid = Point::Coords(vec![ratio(1, 2), int(0), ratio(1, 2), int(0), int(0)]);
        assert!(h.member(&mid).unwrap());
        for v in sweet.extreme_points() {
            assert!(h.member(&v).unwrap());
        }
    }

    #[test]
    fn hull_before_canonicalisation_has_all_corners() {
        let d = taste();
        let (sweet, bitter) = (taste_box(&d, 0), taste_box(&d, 2));
        let raw: Vec<Point> = sweet.extreme_points().into_iter().chain(bitter.extreme_points()).collect();
        assert_eq!(raw.len(), 2 * 32);
        let h = hull(&d, &[sweet, bitter]).unwrap();
        let Shape::Polytope(vs) = h.shape() else { panic!() };
        // Corners with t_sweet = t_bitter = 1/2 are interior to the hull.
        assert_eq!(vs.len(), 64 - 2 * 8);
        for p in raw {
            assert!(h.member(&p).unwrap());
        }
    }

    #[test]
    fn sweet_and_bitter_only_touch() {
        let d = taste();
        let (sweet, bitter) = (taste_box(&d, 0), taste_box(&d, 2));
        assert!(!sweet.meets(&bitter).unwrap());
        assert!(!bitter.meets(&sweet).unwrap());
        let h = hull(&d, &[sweet.clone(), bitter]).unwrap();
        assert!(h.meets(&sweet).unwrap());
        assert!(sweet.meets(&h).unwrap());
        // a point strictly inside sweet, inside the hull
        let inner = Point::Coords(vec![ratio(3, 4), ratio(1, 4), ratio(1, 4), ratio(1, 4), ratio(1, 4)]);
        assert!(sweet.member(&inner).unwrap() && h.member(&inner).unwrap());
    }

    #[test]
    fn disjoint_textures_do_not_meet() {
        let tex = AtomicDomain::continuous("texture", vec![unit()]).unwrap();
        let banana = ConvexSet::boxed(&tex, vec![iv(ratio(1, 5), ratio(1, 2))]).unwrap();
        let beer = ConvexSet::boxed(&tex, vec![iv(int(0), ratio(1, 100))]).unwrap();
        assert!(!banana.meets(&beer).unwrap());
    }

    #[test]
    fn degenerate_coordinates_use_closed_meeting() {
        let tex = AtomicDomain::continuous("texture", vec![unit()]).unwrap();
        let point = ConvexSet::boxed(&tex, vec![iv(ratio(1, 2), ratio(1, 2))]).unwrap();
        let upper = ConvexSet::boxed(&tex, vec![iv(ratio(1, 2), int(1))]).unwrap();
        assert!(point.meets(&upper).unwrap());
        let poly_point = ConvexSet::polytope(&tex, vec![vec![ratio(1, 2)]]).unwrap();
        assert!(poly_point.meets(&upper).unwrap());
        assert!(poly_point.meets(&poly_point).unwrap());
    }

    #[test]
    fn hue_intersection() {
        let yellow = colour_box((45, 75), (ratio(1, 2), int(1)), (int(0), int(1)));
        let banana = colour_box((60, 95), (ratio(3, 4), int(1)), (ratio(1, 4), int(1)));
        let both = yellow.intersect(&banana).unwrap();
        assert_eq!(both, colour_box((60, 75), (ratio(3, 4), int(1)), (ratio(1, 4), int(1))));
        assert_eq!(banana.intersect(&banana).unwrap(), banana);
    }

    #[test]
    fn touching_boxes_have_empty_intersection() {
        let yellow = colour_box((45, 75), (ratio(1, 2), int(1)), (int(0), int(1)));
        let green = colour_box((75, 135), (ratio(1, 2), int(1)), (int(0), int(1)));
        assert!(matches!(yellow.intersect(&green), Err(Error::EmptyIntersection(_))));
    }

    #[test]
    fn containment_shortcut_for_polytopes() {
        let d = colour();
        let banana = colour_box((60, 95), (ratio(3, 4), int(1)), (ratio(1, 4), int(1)));
        let apple = colour_box((0, 105), (ratio(3, 4), int(1)), (ratio(1, 2), int(1)));
        let fruit = hull(&d, &[banana, apple]).unwrap();
        let green_banana = colour_box((75, 95), (ratio(3, 4), int(1)), (ratio(1, 4), int(1)));
        assert!(green_banana.subset(&fruit).unwrap());
        assert!(!fruit.subset(&green_banana).unwrap());
        assert_eq!(fruit.intersect(&green_banana).unwrap(), green_banana);
        assert_eq!(green_banana.intersect(&fruit).unwrap(), green_banana);
    }

    #[test]
    fn unsupported_polytope_intersection() {
        let d = taste();
        let a = hull(&d, &[taste_box(&d, 0), taste_box(&d, 1)]).unwrap();
        let b = hull(&d, &[taste_box(&d, 0), taste_box(&d, 2)]).unwrap();
        assert!(a.meets(&b).unwrap());
        assert!(matches!(a.intersect(&b), Err(Error::UnsupportedIntersection(_))));
    }

    #[test]
    fn subset_sweet_bitter() {
        let d = taste();
        assert!(!taste_box(&d, 0).subset(&taste_box(&d, 2)).unwrap());
        assert!(taste_box(&d, 0).subset(&taste_box(&d, 0)).unwrap());
    }

    #[test]
    fn lattice_hull_is_join_closure() {
        let s = AtomicDomain::tuple_max("sentence", 2).unwrap();
        let e = |l: &str| s.element_index(l).unwrap();
        let a = ConvexSet::lattice_set(&s, [e("(1,0)")]).unwrap();
        let b = ConvexSet::lattice_set(&s, [e("(0,1)")]).unwrap();
        let h = hull(&s, &[a, b]).unwrap();
        assert_eq!(h, ConvexSet::lattice_set(&s, [e("(1,0)"), e("(0,1)"), e("(1,1)")]).unwrap());
        assert!(ConvexSet::lattice_set(&s, [e("(1,0)"), e("(0,1)")]).is_err());
    }

    #[test]
    fn hull_of_one_part_is_that_part() {
        let d = taste();
        let sweet = taste_box(&d, 0);
        let h = hull(&d, std::slice::from_ref(&sweet)).unwrap();
        assert!(matches!(h.shape(), Shape::Polytope(vs) if vs.len() == 32));
        assert!(h.equivalent(&sweet).unwrap());
        assert_eq!(hull(&d, &[sweet.clone(), sweet]).unwrap(), h);
        assert!(matches!(hull(&d, &[]), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn intersect_all_prefers_minimal_sets() {
        let d = colour();
        let full = ConvexSet::full(&d);
        let banana = colour_box((60, 95), (ratio(3, 4), int(1)), (ratio(1, 4), int(1)));
        let apple = colour_box((0, 105), (ratio(3, 4), int(1)), (ratio(1, 2), int(1)));
        let fruit = hull(&d, &[banana, apple]).unwrap();
        let green_banana = colour_box((75, 95), (ratio(3, 4), int(1)), (ratio(1, 4), int(1)));
        let got = intersect_all(&[full, fruit.clone(), green_banana.clone()]).unwrap();
        assert_eq!(got, green_banana);
        assert_eq!(intersect_all(&[fruit.clone(), fruit.clone()]).unwrap(), fruit);
    }

    #[test]
    fn polytope_vertices_must_lie_in_bounds() {
        let d = taste();
        let outside = vec![vec![int(2), int(0), int(0), int(0), int(0)]];
        assert!(matches!(ConvexSet::polytope(&d, outside), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn domain_mismatch_is_reported() {
        let d = taste();
        let c = colour();
        assert!(matches!(taste_box(&d, 0).meets(&ConvexSet::full(&c)), Err(Error::DomainMismatch(_))));
        assert!(matches!(
            taste_box(&d, 0).member(&Point::Coords(vec![int(0)])),
            Err(Error::DomainMismatch(_))
        ));
    }
}
