//! Oracles and generators shared by the integration tests and the
//! acceptance runner. Nothing here calls back into the engine's own
//! algebra: pair sets, tree shapes and box corners are computed directly.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use convexsem::convex::{join_closure, ConvexSet, Shape};
use convexsem::diagram::LazyRelation;
use convexsem::domain::{AtomicDomain, Domain, FormalConvexSum, Interval, Point, TreeNode};
use convexsem::pregroup::{brute_force_reduce, parse_type_string, reduce_with_cap, SimpleType, TypeString};
use convexsem::relation::{Cell, Relation, Space};
use convexsem::scalar::{int, ratio, Scalar};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Trees and lattices

fn tree_from_parents(parent: &[usize]) -> TreeNode {
    fn build(v: usize, kids: &BTreeMap<usize, Vec<usize>>) -> TreeNode {
        let children = kids.get(&v).map(|cs| cs.iter().map(|&c| build(c, kids)).collect()).unwrap_or_default();
        TreeNode::node(format!("e{v}"), children)
    }
    let mut kids: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &p) in parent.iter().enumerate().skip(1) {
        kids.entry(p).or_default().push(i);
    }
    build(0, &kids)
}

/// A random tree with `1..=max_nodes` nodes (node `i > 0` hangs under a
/// uniformly chosen earlier node).
pub fn random_tree(rng: &mut impl Rng, max_nodes: usize) -> TreeNode {
    let n = rng.gen_range(1..=max_nodes);
    let parent: Vec<usize> = (0..n).map(|i| if i == 0 { 0 } else { rng.gen_range(0..i) }).collect();
    tree_from_parents(&parent)
}

fn shape_key(parent: &[usize], v: usize) -> String {
    let mut kids: Vec<String> =
        (1..parent.len()).filter(|&c| parent[c] == v).map(|c| shape_key(parent, c)).collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Steps an odometer over `parent[i] in 0..i`.
fn next_parents(parent: &mut [usize]) -> bool {
    for i in (1..parent.len()).rev() {
        if parent[i] + 1 < i {
            parent[i] += 1;
            parent[i + 1..].iter_mut().for_each(|p| *p = 0);
            return true;
        }
    }
    false
}

/// One representative of every unlabelled rooted tree with at most
/// `max_nodes` nodes.
pub fn all_tree_shapes(max_nodes: usize) -> Vec<TreeNode> {
    let mut out = Vec::new();
    for n in 1..=max_nodes {
        let mut seen = BTreeSet::new();
        let mut parent = vec![0usize; n];
        loop {
            if seen.insert(shape_key(&parent, 0)) {
                out.push(tree_from_parents(&parent));
            }
            if !next_parents(&mut parent) {
                break;
            }
        }
    }
    out
}

pub fn random_lattice_set(rng: &mut impl Rng, d: &Domain) -> ConvexSet {
    let n = d.len().expect("lattice domain");
    if rng.gen_ratio(1, 6) {
        return ConvexSet::full(d);
    }
    let mut picked = BTreeSet::new();
    picked.insert(rng.gen_range(0..n));
    for e in 0..n {
        if rng.gen_ratio(1, 4) {
            picked.insert(e);
        }
    }
    ConvexSet::lattice_set(d, join_closure(d, picked)).expect("join-closed")
}

pub fn random_space(rng: &mut impl Rng, pool: &[Domain]) -> Space {
    let k = rng.gen_range(1..=2);
    Space::new((0..k).map(|_| pool.choose(rng).expect("nonempty pool").clone()).collect())
}

/// A union of 0..=3 random product cells.
pub fn random_relation(rng: &mut impl Rng, source: &Space, target: &Space) -> Relation {
    let cells = (0..rng.gen_range(0..=3))
        .map(|_| {
            Cell::new(source.factors().iter().chain(target.factors()).map(|d| random_lattice_set(rng, d)).collect())
        })
        .collect();
    Relation::new(source.clone(), target.clone(), cells).expect("cells fit")
}

// ---------------------------------------------------------------------------
// Pair-set relational algebra

pub type Tuple = Vec<usize>;
pub type PairSet = BTreeSet<(Tuple, Tuple)>;

pub fn split(points: BTreeSet<Tuple>, at: usize) -> PairSet {
    points.into_iter().map(|t| (t[..at].to_vec(), t[at..].to_vec())).collect()
}

pub fn pairs(r: &Relation) -> PairSet {
    split(r.points().expect("lattice relation"), r.source().len())
}

pub fn lazy_pairs(r: &LazyRelation) -> PairSet {
    split(r.points().expect("lattice relation"), r.source().len())
}

/// Every tuple of an all-lattice space, by odometer.
pub fn tuples(space: &Space) -> Vec<Tuple> {
    let sizes: Vec<usize> = space.factors().iter().map(|d| d.len().expect("lattice")).collect();
    let mut out = vec![Vec::new()];
    for n in sizes {
        out = out.into_iter().flat_map(|t| (0..n).map(move |e| [t.clone(), vec![e]].concat())).collect();
    }
    out
}

pub fn oracle_identity(space: &Space) -> PairSet {
    tuples(space).into_iter().map(|t| (t.clone(), t)).collect()
}

pub fn oracle_compose(r: &PairSet, s: &PairSet) -> PairSet {
    let mut out = PairSet::new();
    for (a, b) in r {
        for (b2, c) in s {
            if b == b2 {
                out.insert((a.clone(), c.clone()));
            }
        }
    }
    out
}

pub fn oracle_converse(r: &PairSet) -> PairSet {
    r.iter().map(|(a, b)| (b.clone(), a.clone())).collect()
}

pub fn oracle_tensor(r: &PairSet, s: &PairSet) -> PairSet {
    let mut out = PairSet::new();
    for (a, b) in r {
        for (c, d) in s {
            out.insert(([a.clone(), c.clone()].concat(), [b.clone(), d.clone()].concat()));
        }
    }
    out
}

fn same(what: &str, got: &PairSet, want: &PairSet) -> Check {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: engine has {} pairs, oracle {}", got.len(), want.len()))
    }
}

fn ok<T>(what: &str, r: convexsem::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

/// Runs every category law on `rounds` rounds of fresh random relations
/// (three per round). Returns how many relations were generated.
pub fn check_category_laws(seed: u64, rounds: usize) -> Result<usize, String> {
    let mut rng = rng(seed);
    for round in 0..rounds {
        let pool: Vec<Domain> = (0..2)
            .map(|k| AtomicDomain::tree(format!("t{k}"), random_tree(&mut rng, 8)).expect("tree"))
            .collect();
        let (a, b, c, d) = (
            random_space(&mut rng, &pool),
            random_space(&mut rng, &pool),
            random_space(&mut rng, &pool),
            random_space(&mut rng, &pool),
        );
        let r = random_relation(&mut rng, &a, &b);
        let s = random_relation(&mut rng, &b, &c);
        let t = random_relation(&mut rng, &c, &d);
        laws(&a, &b, &r, &s, &t).map_err(|e| format!("round {round} (seed {seed}): {e}"))?;
    }
    Ok(rounds * 3)
}

fn laws(a: &Space, b: &Space, r: &Relation, s: &Relation, t: &Relation) -> Check {
    let (pr, ps, pt) = (pairs(r), pairs(s), pairs(t));

    let rs = ok("compose", r.compose(s))?;
    same("compose", &pairs(&rs), &oracle_compose(&pr, &ps))?;
    same("converse", &pairs(&r.converse()), &oracle_converse(&pr))?;
    same("tensor", &pairs(&r.tensor(s)), &oracle_tensor(&pr, &ps))?;

    let id_a = ok("identity", Relation::discrete_identity(a))?;
    let id_b = ok("identity", Relation::discrete_identity(b))?;
    same("identity is the diagonal", &pairs(&id_a), &oracle_identity(a))?;
    same("left unit", &pairs(&ok("compose", id_a.compose(r))?), &pr)?;
    same("right unit", &pairs(&ok("compose", r.compose(&id_b))?), &pr)?;

    let left = ok("compose", rs.compose(t))?;
    let right = ok("compose", r.compose(&ok("compose", s.compose(t))?))?;
    same("associativity", &pairs(&left), &pairs(&right))?;
    same("triple compose", &pairs(&left), &oracle_compose(&oracle_compose(&pr, &ps), &pt))?;

    same("dagger involution", &pairs(&r.converse().converse()), &pr)?;
    let rev = ok("compose", s.converse().compose(&r.converse()))?;
    same("dagger reverses composition", &pairs(&rs.converse()), &pairs(&rev))?;

    // the spider engine against the same oracle
    let (lr, ls) = (LazyRelation::from_relation(r), LazyRelation::from_relation(s));
    same("lazy compose", &lazy_pairs(&ok("lazy compose", lr.compose(&ls))?), &oracle_compose(&pr, &ps))?;
    same("lazy converse", &lazy_pairs(&ok("lazy converse", lr.converse())?), &oracle_converse(&pr))?;
    same("lazy tensor", &lazy_pairs(&ok("lazy tensor", lr.tensor(&ls))?), &oracle_tensor(&pr, &ps))?;
    same("lazy identity", &lazy_pairs(&LazyRelation::identity(a)), &oracle_identity(a))?;
    let via_id = ok("lazy compose", LazyRelation::identity(a).compose(&lr))?;
    same("lazy left unit", &lazy_pairs(&via_id), &pr)?;
    same("lazy materialises", &pairs(&ok("materialise", lr.to_relation())?), &pr)?;

    snake_and_frobenius(a)
}

/// Both snake equations and `copy ; merge = id`, `copy ; (id ⊗ delete) = id`.
pub fn snake_and_frobenius(a: &Space) -> Check {
    let id = LazyRelation::identity(a);
    let want = oracle_identity(a);
    let cap = LazyRelation::cap(a);
    let cup = LazyRelation::cup(a);

    let down = ok("tensor", cap.tensor(&id))?;
    let up = ok("tensor", id.tensor(&cup))?;
    same("snake (cap ⊗ 1 ; 1 ⊗ cup)", &lazy_pairs(&ok("compose", down.compose(&up))?), &want)?;
    let down = ok("tensor", id.tensor(&cap))?;
    let up = ok("tensor", cup.tensor(&id))?;
    same("snake (1 ⊗ cap ; cup ⊗ 1)", &lazy_pairs(&ok("compose", down.compose(&up))?), &want)?;

    let copy = LazyRelation::copy(a);
    let special = ok("compose", copy.compose(&LazyRelation::merge(a)))?;
    same("merge ∘ copy", &lazy_pairs(&special), &want)?;
    let counit = ok("compose", copy.compose(&ok("tensor", id.tensor(&LazyRelation::delete(a)))?))?;
    same("copy then delete", &lazy_pairs(&counit), &want)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Convex algebra axioms

fn weights(pattern: &[(i64, i64)]) -> Vec<Scalar> {
    pattern.iter().map(|&(n, d)| ratio(n, d)).collect()
}

fn sum(ws: &[Scalar], ps: &[Point]) -> FormalConvexSum {
    FormalConvexSum::new(ws.iter().cloned().zip(ps.iter().cloned()).collect())
}

/// Unit and flattening laws on every lattice of at most eight elements
/// (every tree shape plus the tuple lattices). Flattening is checked for
/// every choice of three points in the nested shape `p|a⟩ + (1-p)(q|b⟩ +
/// (1-q)|c⟩)` under weight patterns with and without zeros. Returns the
/// number of laws checked.
pub fn check_convex_algebra_lattices() -> Result<usize, String> {
    let mut domains: Vec<Domain> = all_tree_shapes(8)
        .into_iter()
        .enumerate()
        .map(|(i, t)| AtomicDomain::tree(format!("tree{i}"), t).expect("tree"))
        .collect();
    for k in 1..=3 {
        domains.push(AtomicDomain::tuple_max(format!("bits{k}"), k).expect("tuple lattice"));
    }
    let patterns = [
        (weights(&[(1, 2), (1, 2)]), weights(&[(1, 3), (2, 3)])),
        (weights(&[(1, 1), (0, 1)]), weights(&[(1, 2), (1, 2)])),
        (weights(&[(1, 4), (3, 4)]), weights(&[(0, 1), (1, 1)])),
    ];
    let mut checked = 0;
    for d in &domains {
        let n = d.len().expect("lattice");
        for a in 0..n {
            let p = Point::Element(a);
            if d.mix(&FormalConvexSum::point(p.clone())) != Ok(p) {
                return Err(format!("unit law fails on {} at {a}", d.name()));
            }
            checked += 1;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let [pa, pb, pc] = [a, b, c].map(Point::Element);
                    for (outer, inner) in &patterns {
                        let nested = vec![
                            (outer[0].clone(), FormalConvexSum::point(pa.clone())),
                            (outer[1].clone(), sum(inner, &[pb.clone(), pc.clone()])),
                        ];
                        if d.flatten_check(&nested) != Ok(true) {
                            return Err(format!("flattening fails on {} at ({a},{b},{c})", d.name()));
                        }
                        // the lattice mix is the join of the nonzero-weight points
                        let mut live = Vec::new();
                        if !outer[0].is_zero() {
                            live.push(a);
                        }
                        if !outer[1].is_zero() {
                            live.extend(inner.iter().zip([b, c]).filter(|(w, _)| !w.is_zero()).map(|(_, e)| e));
                        }
                        let want = live.into_iter().reduce(|x, y| d.join(x, y)).expect("some weight");
                        let inner_mix = d.mix(&sum(inner, &[pb.clone(), pc.clone()])).map_err(|e| e.to_string())?;
                        let got = d.mix(&sum(outer, &[pa.clone(), inner_mix])).map_err(|e| e.to_string())?;
                        if got != Point::Element(want) {
                            return Err(format!("mix on {} disagrees with the join oracle", d.name()));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(checked)
}

fn random_weights(rng: &mut impl Rng, k: usize) -> Vec<Scalar> {
    loop {
        let raw: Vec<i64> = (0..k).map(|_| if rng.gen_ratio(1, 8) { 0 } else { rng.gen_range(1..=9) }).collect();
        let total: i64 = raw.iter().sum();
        if total > 0 {
            return raw.into_iter().map(|w| ratio(w, total)).collect();
        }
    }
}

fn random_coords(rng: &mut impl Rng, k: usize) -> Point {
    Point::Coords(
        (0..k)
            .map(|_| {
                let d = rng.gen_range(1..=12);
                ratio(rng.gen_range(0..=d), d)
            })
            .collect(),
    )
}

/// `count` random nested sums over `[0,1]^k`, `k` in `1..=5`. Both sides of
/// the flattening law are also recomputed here coordinate by coordinate.
pub fn check_convex_algebra_cubes(seed: u64, count: usize) -> Result<usize, String> {
    let mut rng = rng(seed);
    let cubes: Vec<Domain> = (1..=5)
        .map(|k| {
            AtomicDomain::continuous(format!("cube{k}"), vec![Interval::new(int(0), int(1)).expect("unit"); k])
                .expect("cube")
        })
        .collect();
    for i in 0..count {
        let k = rng.gen_range(1..=5);
        let d = &cubes[k - 1];
        let width = rng.gen_range(1..=4);
        let outer = random_weights(&mut rng, width);
        let nested: Vec<(Scalar, FormalConvexSum)> = outer
            .iter()
            .map(|p| {
                let m = rng.gen_range(1..=4);
                let qs = random_weights(&mut rng, m);
                let pts: Vec<Point> = (0..m).map(|_| random_coords(&mut rng, k)).collect();
                (p.clone(), sum(&qs, &pts))
            })
            .collect();
        let a = random_coords(&mut rng, k);
        if d.mix(&FormalConvexSum::point(a.clone())) != Ok(a) {
            return Err(format!("unit law fails on sum {i}"));
        }
        if d.flatten_check(&nested) != Ok(true) {
            return Err(format!("flattening fails on sum {i}"));
        }
        let mut want = vec![Scalar::zero(); k];
        for (p, inner) in &nested {
            for (q, x) in &inner.entries {
                let Point::Coords(x) = x else { unreachable!() };
                for (w, v) in want.iter_mut().zip(x) {
                    *w += p * q * v;
                }
            }
        }
        let inner_mixes: Vec<(Scalar, Point)> =
            nested.iter().map(|(p, s)| (p.clone(), d.mix(s).expect("valid sum"))).collect();
        if d.mix(&FormalConvexSum::new(inner_mixes)) != Ok(Point::Coords(want)) {
            return Err(format!("mix disagrees with the coordinate oracle on sum {i}"));
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Pregroups

pub fn random_simple(rng: &mut impl Rng) -> SimpleType {
    SimpleType::new(*["n", "s"].choose(rng).expect("bases"), rng.gen_range(-1..=1))
}

/// Half uniformly random strings, half grown from the target by inserting
/// contracting pairs, so that many of them reduce. Length at most 8.
pub fn random_type_string(rng: &mut impl Rng) -> (TypeString, TypeString) {
    let target = match rng.gen_range(0..3) {
        0 => TypeString::unit(),
        1 => parse_type_string("s").expect("type"),
        _ => parse_type_string("n").expect("type"),
    };
    let simples = if rng.gen_bool(0.5) {
        (0..rng.gen_range(0..=8)).map(|_| random_simple(rng)).collect()
    } else {
        let mut s = target.simples.clone();
        while s.len() + 2 <= 8 && rng.gen_ratio(3, 4) {
            let x = random_simple(rng);
            let pair = if rng.gen_bool(0.5) {
                [SimpleType::new(x.base.clone(), x.z - 1), x]
            } else {
                let r = SimpleType::new(x.base.clone(), x.z + 1);
                [x, r]
            };
            let at = rng.gen_range(0..=s.len());
            s.splice(at..at, pair);
        }
        s
    };
    (TypeString::new(simples), target)
}

/// Returns `(strings checked, strings that reduce)`.
pub fn check_pregroup_completeness(seed: u64, count: usize) -> Result<(usize, usize), String> {
    let mut rng = rng(seed);
    let mut reducible = 0;
    for _ in 0..count {
        let (ts, target) = random_type_string(&mut rng);
        let fast = reduce_with_cap(&ts, &target, usize::MAX);
        let slow = brute_force_reduce(&ts, &target).map_err(|e| e.to_string())?;
        let as_set = |v: &[convexsem::pregroup::LinkDiagram]| v.iter().cloned().collect::<BTreeSet<_>>();
        if as_set(&fast) != as_set(&slow) || fast.len() != slow.len() {
            return Err(format!("`{ts}` to `{target}`: reduce found {}, brute force {}", fast.len(), slow.len()));
        }
        if !fast.is_empty() {
            reducible += 1;
        }
    }
    Ok((count, reducible))
}

// ---------------------------------------------------------------------------
// Demo constants, written out from the raw numbers

pub fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
    Interval::new(ratio(lo.0, lo.1), ratio(hi.0, hi.1)).expect("interval")
}

/// Corners of the taste box that puts coordinate `k` in `[1/2, 1]` and the
/// rest in `[0, 1/2]`.
fn taste_corners(k: usize) -> Vec<Vec<Scalar>> {
    let mut out = Vec::new();
    for mask in 0..32u32 {
        out.push(
            (0..5)
                .map(|l| {
                    let high = mask & (1 << l) != 0;
                    match (l == k, high) {
                        (true, false) => ratio(1, 2),
                        (true, true) => Scalar::one(),
                        (false, false) => Scalar::zero(),
                        (false, true) => ratio(1, 2),
                    }
                })
                .collect(),
        );
    }
    out
}

/// The set is the convex hull of the given taste boxes (0 sweet, 1 sour,
/// 2 bitter): every vertex is a box corner and every corner is a member.
pub fn is_taste_hull(set: &ConvexSet, boxes: &[usize]) -> Check {
    let corners: Vec<Vec<Scalar>> = boxes.iter().flat_map(|&k| taste_corners(k)).collect();
    let Shape::Polytope(vs) = set.shape() else {
        return Err(format!("taste component is not a polytope: {set}"));
    };
    if let Some(v) = vs.iter().find(|v| !corners.contains(v)) {
        return Err(format!("vertex {v:?} is not a box corner"));
    }
    for c in corners {
        if !set.member(&Point::Coords(c.clone())).map_err(|e| e.to_string())? {
            return Err(format!("corner {c:?} missing from the hull"));
        }
    }
    Ok(())
}

pub struct NounCell {
    pub colour: [Interval; 3],
    pub taste: Vec<usize>,
    pub texture: Interval,
}

/// `[75,95]×[0.75,1]×[0.25,1]×hull(sweet∪bitter)×[0.2,0.5]`
pub fn green_banana() -> NounCell {
    NounCell {
        colour: [iv((75, 1), (95, 1)), iv((3, 4), (1, 1)), iv((1, 4), (1, 1))],
        taste: vec![0, 2],
        texture: iv((1, 5), (1, 2)),
    }
}

/// `[60,75]×[0.75,1]×[0.25,1]×hull(sweet∪bitter)×[0.2,0.5]`
pub fn yellow_banana() -> NounCell {
    NounCell { colour: [iv((60, 1), (75, 1)), iv((3, 4), (1, 1)), iv((1, 4), (1, 1))], ..green_banana() }
}

/// `[0,105]×[0.75,1]×[0.5,1]×hull(sweet∪sour)×[1/2,3/5]`
pub fn soft_apple() -> NounCell {
    NounCell {
        colour: [iv((0, 1), (105, 1)), iv((3, 4), (1, 1)), iv((1, 2), (1, 1))],
        taste: vec![0, 1],
        texture: iv((1, 2), (3, 5)),
    }
}

/// A one-cell state on `colour × taste × texture` matching `want` exactly.
pub fn is_noun_cell(r: &Relation, want: &NounCell) -> Check {
    let [cell] = r.cells() else {
        return Err(format!("expected one cell, got {}: {r}", r.cells().len()));
    };
    let comps = cell.components();
    if comps.len() != 3 {
        return Err(format!("expected colour × taste × texture, got {}", r.target()));
    }
    match comps[0].shape() {
        Shape::Box(ivs) if ivs[..] == want.colour[..] => {}
        _ => return Err(format!("colour is {}", comps[0])),
    }
    is_taste_hull(&comps[1], &want.taste)?;
    match comps[2].shape() {
        Shape::Box(ivs) if ivs[..] == [want.texture.clone()] => {}
        _ => return Err(format!("texture is {}", comps[2])),
    }
    Ok(())
}

/// Names of the sentence-lattice points of a state on `S`.
pub fn sentence_points(r: &Relation) -> Result<BTreeSet<String>, String> {
    let d = &r.target().factors()[0];
    Ok(r.points().map_err(|e| e.to_string())?.into_iter().map(|t| d.element_name(t[0]).to_string()).collect())
}
