//! Atomic domains: the quality dimensions a conceptual space is built from.
//!
//! A domain is either a bounded box of rational coordinates, mixed by
//! weighted averaging, or a finite join semilattice, where mixing discards
//! the weights and takes the join of everything with nonzero weight.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{fmt_decimal, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo > hi {
            return Err(Error::MalformedInput(format!(
                "interval [{}, {}] has lo > hi",
                fmt_decimal(&lo),
                fmt_decimal(&hi)
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn midpoint(&self) -> Scalar {
        (&self.lo + &self.hi) / Scalar::from_integer(2.into())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", fmt_decimal(&self.lo), fmt_decimal(&self.hi))
    }
}

/// A node of a hierarchy; the join of two nodes is their lowest common ancestor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeNode {
    pub name: String,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn leaf(name: impl Into<String>) -> Self {
        TreeNode { name: name.into(), children: Vec::new() }
    }

    pub fn node(name: impl Into<String>, children: Vec<TreeNode>) -> Self {
        TreeNode { name: name.into(), children }
    }
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            return write!(f, "{}", self.name);
        }
        write!(f, "({}", self.name)?;
        for child in &self.children {
            write!(f, " {child}")?;
        }
        write!(f, ")")
    }
}

/// How a lattice was declared; kept so it can be printed back.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LatticeOrigin {
    /// `{0,1}^k` under element-wise max.
    TupleMax(usize),
    Tree(TreeNode),
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DomainKind {
    Continuous { bounds: Vec<Interval> },
    Lattice { elements: Vec<String>, join: Vec<Vec<usize>>, origin: LatticeOrigin },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomicDomain {
    name: String,
    kind: DomainKind,
}

pub type Domain = Arc<AtomicDomain>;

/// A point of an atomic domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Coords(Vec<Scalar>),
    Element(usize),
}

impl AtomicDomain {
    pub fn continuous(name: impl Into<String>, bounds: Vec<Interval>) -> Result<Domain> {
        if bounds.is_empty() {
            return Err(Error::MalformedInput("continuous domain needs at least one dimension".into()));
        }
        Ok(Arc::new(AtomicDomain { name: name.into(), kind: DomainKind::Continuous { bounds } }))
    }

    /// A lattice from an explicit join table; the semilattice laws are
    /// checked exhaustively.
    pub fn lattice(name: impl Into<String>, elements: Vec<String>, join: Vec<Vec<usize>>) -> Result<Domain> {
        Self::lattice_with_origin(name.into(), elements, join, LatticeOrigin::Table)
    }

    fn lattice_with_origin(
        name: String,
        elements: Vec<String>,
        join: Vec<Vec<usize>>,
        origin: LatticeOrigin,
    ) -> Result<Domain> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::MalformedInput(format!("lattice `{name}` has no elements")));
        }
        for (i, a) in elements.iter().enumerate() {
            if elements[..i].contains(a) {
                return Err(Error::MalformedInput(format!("lattice `{name}` repeats element `{a}`")));
            }
        }
        if join.len() != n || join.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
            return Err(Error::MalformedInput(format!("lattice `{name}` join table is not {n}x{n}")));
        }
        for a in 0..n {
            if join[a][a] != a {
                return Err(Error::MalformedInput(format!("lattice `{name}`: join not idempotent at {}", elements[a])));
            }
            for b in 0..n {
                if join[a][b] != join[b][a] {
                    return Err(Error::MalformedInput(format!(
                        "lattice `{name}`: join not commutative at ({}, {})",
                        elements[a], elements[b]
                    )));
                }
                for c in 0..n {
                    if join[a][join[b][c]] != join[join[a][b]][c] {
                        return Err(Error::MalformedInput(format!(
                            "lattice `{name}`: join not associative at ({}, {}, {})",
                            elements[a], elements[b], elements[c]
                        )));
                    }
                }
            }
        }
        Ok(Arc::new(AtomicDomain { name, kind: DomainKind::Lattice { elements, join, origin } }))
    }

    /// `{0,1}^k` ordered lexicographically, e.g. `(0,0) (0,1) (1,0) (1,1)`.
    pub fn tuple_max(name: impl Into<String>, k: usize) -> Result<Domain> {
        if k == 0 || k > 16 {
            return Err(Error::MalformedInput(format!("tuplemax arity {k} out of range 1..=16")));
        }
        let n = 1usize << k;
        let label = |bits: usize| {
            let parts: Vec<String> = (0..k).rev().map(|b| ((bits >> b) & 1).to_string()).collect();
            format!("({})", parts.join(","))
        };
        let elements = (0..n).map(label).collect();
        let join = (0..n).map(|a| (0..n).map(|b| a | b).collect()).collect();
        Self::lattice_with_origin(name.into(), elements, join, LatticeOrigin::TupleMax(k))
    }

    /// Every node of `root` is an element (preorder); join is the lowest
    /// common ancestor.
    pub fn tree(name: impl Into<String>, root: TreeNode) -> Result<Domain> {
        let mut elements = Vec::new();
        let mut parent = Vec::new();
        fn walk(node: &TreeNode, up: Option<usize>, elements: &mut Vec<String>, parent: &mut Vec<Option<usize>>) {
            let me = elements.len();
            elements.push(node.name.clone());
            parent.push(up);
            for child in &node.children {
                walk(child, Some(me), elements, parent);
            }
        }
        walk(&root, None, &mut elements, &mut parent);
        let ancestors = |mut v: usize| {
            let mut chain = vec![v];
            while let Some(p) = parent[v] {
                chain.push(p);
                v = p;
            }
            chain
        };
        let n = elements.len();
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            let up_a = ancestors(a);
            for b in 0..n {
                let up_b = ancestors(b);
                join[a][b] = *up_a.iter().find(|x| up_b.contains(x)).expect("tree has a single root");
            }
        }
        Self::lattice_with_origin(name.into(), elements, join, LatticeOrigin::Tree(root))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.kind, DomainKind::Lattice { .. })
    }

    /// Coordinate count (continuous) or 1 (lattice).
    pub fn dim(&self) -> usize {
        match &self.kind {
            DomainKind::Continuous { bounds } => bounds.len(),
            DomainKind::Lattice { .. } => 1,
        }
    }

    pub fn bounds(&self) -> Option<&[Interval]> {
        match &self.kind {
            DomainKind::Continuous { bounds } => Some(bounds),
            DomainKind::Lattice { .. } => None,
        }
    }

    pub fn elements(&self) -> Option<&[String]> {
        match &self.kind {
            DomainKind::Lattice { elements, .. } => Some(elements),
            DomainKind::Continuous { .. } => None,
        }
    }

    pub fn len(&self) -> Option<usize> {
        self.elements().map(|e| e.len())
    }

    pub fn element_index(&self, label: &str) -> Option<usize> {
        self.elements()?.iter().position(|e| e == label)
    }

    pub fn element_name(&self, index: usize) -> &str {
        match &self.kind {
            DomainKind::Lattice { elements, .. } => &elements[index],
            DomainKind::Continuous { .. } => panic!("element_name on continuous domain `{}`", self.name),
        }
    }

    /// Lattice join. Panics on continuous domains.
    pub fn join(&self, a: usize, b: usize) -> usize {
        match &self.kind {
            DomainKind::Lattice { join, .. } => join[a][b],
            DomainKind::Continuous { .. } => panic!("join on continuous domain `{}`", self.name),
        }
    }

    pub fn contains(&self, point: &Point) -> bool {
        match (&self.kind, point) {
            (DomainKind::Continuous { bounds }, Point::Coords(x)) => {
                x.len() == bounds.len() && bounds.iter().zip(x).all(|(b, v)| b.contains(v))
            }
            (DomainKind::Lattice { elements, .. }, Point::Element(e)) => *e < elements.len(),
            _ => false,
        }
    }

    pub fn check_point(&self, point: &Point) -> Result<()> {
        if self.contains(point) {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!("{} is not a point of `{}`", self.show_point(point), self.name)))
        }
    }

    pub fn show_point(&self, point: &Point) -> String {
        match point {
            Point::Coords(x) => {
                let parts: Vec<String> = x.iter().map(fmt_decimal).collect();
                format!("({})", parts.join(","))
            }
            Point::Element(e) => match self.elements() {
                Some(els) if *e < els.len() => els[*e].clone(),
                _ => format!("#{e}"),
            },
        }
    }

    /// The mixing operation: evaluates a formal convex sum to a point.
    pub fn mix(&self, sum: &FormalConvexSum) -> Result<Point> {
        sum.validate()?;
        for (_, p) in &sum.entries {
            self.check_point(p)?;
        }
        match &self.kind {
            DomainKind::Continuous { bounds } => {
                let mut acc = vec![Scalar::zero(); bounds.len()];
                for (w, p) in &sum.entries {
                    let Point::Coords(x) = p else { unreachable!("checked above") };
                    for (a, v) in acc.iter_mut().zip(x) {
                        *a += w * v;
                    }
                }
                Ok(Point::Coords(acc))
            }
            DomainKind::Lattice { join, .. } => {
                let joined = sum
                    .entries
                    .iter()
                    .filter(|(w, _)| !w.is_zero())
                    .map(|(_, p)| match p {
                        Point::Element(e) => *e,
                        Point::Coords(_) => unreachable!("checked above"),
                    })
                    .reduce(|a, b| join[a][b]);
                joined
                    .map(Point::Element)
                    .ok_or_else(|| Error::MalformedSum("no entry with nonzero weight".into()))
            }
        }
    }

    /// Checks the flattening law for one nested sum: mixing the flattened sum
    /// agrees with mixing the inner mixes.
    pub fn flatten_check(&self, nested: &[(Scalar, FormalConvexSum)]) -> Result<bool> {
        let outer = FormalConvexSum::new(nested.iter().map(|(p, _)| (p.clone(), Point::Element(0))).collect());
        outer.validate()?;
        let mut flat = Vec::new();
        let mut inner_mixes = Vec::new();
        for (p, inner) in nested {
            for (q, a) in &inner.entries {
                flat.push((p * q, a.clone()));
            }
            inner_mixes.push((p.clone(), self.mix(inner)?));
        }
        let left = self.mix(&FormalConvexSum::new(flat))?;
        let right = self.mix(&FormalConvexSum::new(inner_mixes))?;
        Ok(left == right)
    }
}

/// `Σ p_i |a_i⟩` with rational weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalConvexSum {
    pub entries: Vec<(Scalar, Point)>,
}

impl FormalConvexSum {
    pub fn new(entries: Vec<(Scalar, Point)>) -> Self {
        FormalConvexSum { entries }
    }

    pub fn point(p: Point) -> Self {
        FormalConvexSum { entries: vec![(Scalar::one(), p)] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::MalformedSum("empty sum".into()));
        }
        if let Some((w, _)) = self.entries.iter().find(|(w, _)| w.is_negative()) {
            return Err(Error::MalformedSum(format!("negative weight {}", fmt_decimal(w))));
        }
        let total: Scalar = self.entries.iter().map(|(w, _)| w).sum();
        if !total.is_one() {
            return Err(Error::MalformedSum(format!("weights sum to {}", fmt_decimal(&total))));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn unit_line() -> Domain {
        AtomicDomain::continuous("line", vec![Interval::new(int(0), int(1)).unwrap()]).unwrap()
    }

    fn coords(v: Scalar) -> Point {
        Point::Coords(vec![v])
    }

    #[test]
    fn singleton_mix_returns_the_point() {
        let line = unit_line();
        let sum = FormalConvexSum::point(coords(ratio(7, 10)));
        assert_eq!(line.mix(&sum).unwrap(), coords(ratio(7, 10)));
    }

    #[test]
    fn continuous_mix_is_a_weighted_average() {
        let line = unit_line();
        let sum = FormalConvexSum::new(vec![(ratio(1, 4), coords(int(0))), (ratio(3, 4), coords(int(1)))]);
        assert_eq!(line.mix(&sum).unwrap(), coords(ratio(3, 4)));
    }

    #[test]
    fn sentence_lattice_mixes_by_elementwise_max() {
        let s = AtomicDomain::tuple_max("sentence", 2).unwrap();
        let a = Point::Element(s.element_index("(1,0)").unwrap());
        let b = Point::Element(s.element_index("(0,1)").unwrap());
        let sum = FormalConvexSum::new(vec![(ratio(1, 2), a), (ratio(1, 2), b)]);
        let mixed = s.mix(&sum).unwrap();
        assert_eq!(s.show_point(&mixed), "(1,1)");
    }

    #[test]
    fn lattice_mix_ignores_zero_weights() {
        let s = AtomicDomain::tuple_max("sentence", 2).unwrap();
        let sum = FormalConvexSum::new(vec![(int(1), Point::Element(0)), (int(0), Point::Element(3))]);
        assert_eq!(s.mix(&sum).unwrap(), Point::Element(0));
    }

    #[test]
    fn mix_errors() {
        let line = unit_line();
        let bad_weights = FormalConvexSum::new(vec![(ratio(1, 2), coords(int(0)))]);
        assert!(matches!(line.mix(&bad_weights), Err(Error::MalformedSum(_))));
        let negative = FormalConvexSum::new(vec![(int(2), coords(int(0))), (int(-1), coords(int(1)))]);
        assert!(matches!(line.mix(&negative), Err(Error::MalformedSum(_))));
        let outside = FormalConvexSum::point(coords(int(2)));
        assert!(matches!(line.mix(&outside), Err(Error::DomainMismatch(_))));
        let wrong_kind = FormalConvexSum::point(Point::Element(0));
        assert!(matches!(line.mix(&wrong_kind), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn tree_join_is_lowest_common_ancestor() {
        let food = AtomicDomain::tree(
            "food",
            TreeNode::node(
                "food",
                vec![TreeNode::node("fruit", vec![TreeNode::leaf("apples"), TreeNode::leaf("bananas")]), TreeNode::leaf("beer")],
            ),
        )
        .unwrap();
        let idx = |s: &str| food.element_index(s).unwrap();
        assert_eq!(food.join(idx("apples"), idx("bananas")), idx("fruit"));
        assert_eq!(food.join(idx("bananas"), idx("beer")), idx("food"));
        assert_eq!(food.join(idx("fruit"), idx("apples")), idx("fruit"));
    }

    #[test]
    fn broken_join_tables_are_rejected() {
        let els = vec!["a".to_string(), "b".to_string()];
        let not_commutative = vec![vec![0, 0], vec![1, 1]];
        assert!(AtomicDomain::lattice("bad", els.clone(), not_commutative).is_err());
        let not_idempotent = vec![vec![1, 1], vec![1, 1]];
        assert!(AtomicDomain::lattice("bad", els.clone(), not_idempotent).is_err());
        let fine = vec![vec![0, 1], vec![1, 1]];
        assert!(AtomicDomain::lattice("ok", els, fine).is_ok());
    }

    #[test]
    fn flatten_check_on_a_rational_example() {
        let line = unit_line();
        let inner1 = FormalConvexSum::new(vec![(ratio(1, 3), coords(int(0))), (ratio(2, 3), coords(int(1)))]);
        let inner2 = FormalConvexSum::point(coords(ratio(1, 5)));
        let nested = vec![(ratio(1, 2), inner1), (ratio(1, 2), inner2)];
        assert!(line.flatten_check(&nested).unwrap());
    }
}
