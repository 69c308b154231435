//! Half-space descriptions of small polytopes, used to intersect a polytope
//! with boxes or other polytopes exactly.
//!
//! Facets are found by brute force over vertex subsets and intersection
//! vertices by brute force over constraint subsets, so both give up (return
//! `None`) once the number of subsets exceeds [`SUBSET_BUDGET`].

use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

pub(crate) const SUBSET_BUDGET: u128 = 200_000;

/// `a·x = b` or `a·x <= b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Constraint {
    pub a: Vec<Scalar>,
    pub b: Scalar,
    pub equality: bool,
}

impl Constraint {
    fn holds(&self, x: &[Scalar]) -> bool {
        let v = dot(&self.a, x);
        if self.equality { v == self.b } else { v <= self.b }
    }
}

fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn choose(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k as u128).fold(1, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut [Vec<Scalar>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = Scalar::one() / &m[row][col];
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..m[r].len() {
                    let delta = &f * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// Basis of `{x : m x = 0}` for an `r × cols` matrix.
fn nullspace(mut m: Vec<Vec<Scalar>>, cols: usize) -> Vec<Vec<Scalar>> {
    let pivots = rref(&mut m, cols);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Scalar::zero(); cols];
            v[free] = Scalar::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

/// Unique solution of the square system `a x = b`, if any.
fn solve(rows: &[&Constraint], dim: usize) -> Option<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = rows
        .iter()
        .map(|c| {
            let mut r = c.a.clone();
            r.push(c.b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, dim);
    if pivots.len() < dim {
        return None;
    }
    Some((0..dim).map(|r| m[r][dim].clone()).collect())
}

/// Calls `visit` on every `k`-subset of `0..n`, in lexicographic order.
fn subsets(n: usize, k: usize, visit: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, acc: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if acc.len() == k {
            visit(acc);
            return;
        }
        for i in start..n {
            if n - i < k - acc.len() {
                break;
            }
            acc.push(i);
            go(i + 1, n, k, acc, visit);
            acc.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), visit);
}

/// The affine hull as equalities plus one inequality per facet (taken
/// relative to the affine hull, so lower-dimensional polytopes work too).
pub(crate) fn polytope_constraints(vertices: &[Vec<Scalar>]) -> Option<Vec<Constraint>> {
    let dim = vertices[0].len();
    let v0 = &vertices[0];
    let diffs: Vec<Vec<Scalar>> =
        vertices[1..].iter().map(|v| v.iter().zip(v0).map(|(x, y)| x - y).collect()).collect();
    let mut out: Vec<Constraint> = nullspace(diffs.clone(), dim)
        .into_iter()
        .map(|e| Constraint { b: dot(&e, v0), a: e, equality: true })
        .collect();

    let mut span = diffs;
    let pivots = rref(&mut span, dim);
    let basis: Vec<Vec<Scalar>> = span[..pivots.len()].to_vec();
    let k = basis.len();
    if k == 0 {
        return Some(out);
    }
    if choose(vertices.len(), k) > SUBSET_BUDGET {
        return None;
    }
    let mut facets = std::collections::BTreeSet::new();
    subsets(vertices.len(), k, &mut |s| {
        let s0 = &vertices[s[0]];
        let m: Vec<Vec<Scalar>> = s[1..]
            .iter()
            .map(|&i| {
                let d: Vec<Scalar> = vertices[i].iter().zip(s0).map(|(x, y)| x - y).collect();
                basis.iter().map(|l| dot(l, &d)).collect()
            })
            .collect();
        let ns = nullspace(m, k);
        if ns.len() != 1 {
            return;
        }
        let a: Vec<Scalar> =
            (0..dim).map(|j| basis.iter().zip(&ns[0]).map(|(l, c)| &l[j] * c).sum()).collect();
        let b = dot(&a, s0);
        let values: Vec<Scalar> = vertices.iter().map(|v| dot(&a, v)).collect();
        let (a, b) = if values.iter().all(|v| v <= &b) {
            (a, b)
        } else if values.iter().all(|v| v >= &b) {
            (a.iter().map(|x| -x).collect(), -b)
        } else {
            return;
        };
        let scale = a.iter().find(|x| !x.is_zero()).map(|x| x.abs()).expect("nonzero normal");
        facets.insert((a.iter().map(|x| x / &scale).collect::<Vec<_>>(), b / &scale));
    });
    out.extend(facets.into_iter().map(|(a, b)| Constraint { a, b, equality: false }));
    Some(out)
}

/// `lo <= x_k <= hi` for each axis.
pub(crate) fn box_constraints(bounds: &[(Scalar, Scalar)]) -> Vec<Constraint> {
    let dim = bounds.len();
    let axis = |k: usize, sign: i64| -> Vec<Scalar> {
        (0..dim).map(|j| if j == k { Scalar::from_integer(sign.into()) } else { Scalar::zero() }).collect()
    };
    let mut out = Vec::with_capacity(2 * dim);
    for (k, (lo, hi)) in bounds.iter().enumerate() {
        out.push(Constraint { a: axis(k, 1), b: hi.clone(), equality: false });
        out.push(Constraint { a: axis(k, -1), b: -lo.clone(), equality: false });
    }
    out
}

/// Vertices of the bounded set cut out by `constraints` (which must include
/// enough bounds to make it a polytope).
pub(crate) fn vertices(constraints: &[Constraint], dim: usize) -> Option<Vec<Vec<Scalar>>> {
    let mut rows: Vec<&Constraint> = Vec::new();
    for c in constraints {
        if !rows.contains(&c) {
            rows.push(c);
        }
    }
    if choose(rows.len(), dim) > SUBSET_BUDGET {
        return None;
    }
    let mut found: Vec<Vec<Scalar>> = Vec::new();
    subsets(rows.len(), dim, &mut |s| {
        let picked: Vec<&Constraint> = s.iter().map(|&i| rows[i]).collect();
        if let Some(x) = solve(&picked, dim) {
            if rows.iter().all(|c| c.holds(&x)) && !found.contains(&x) {
                found.push(x);
            }
        }
    });
    Some(found)
}
