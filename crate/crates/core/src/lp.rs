//! Exact rational linear programming.
//!
//! A dense two-phase simplex with Bland's rule. Systems here are desk sized
//! (a few hundred variables at most), so a dense tableau over [`Scalar`] is
//! both simple and fast enough, and it never rounds.
//!
//! [`feasible`] is the entry point used by the geometry layer. Variables are
//! free; each inequality row may be flagged strict. The witness returned is
//! the point that maximises the smallest slack over the inequality rows
//! (capped at 1), so `{x >= 0, x <= 1}` yields `x = 1/2`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{int, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<Scalar>,
    pub cmp: Cmp,
    pub rhs: Scalar,
    /// Only meaningful for `Le`/`Ge`: the row must hold with positive slack.
    pub strict: bool,
}

/// A system of linear constraints over free variables.
#[derive(Debug, Clone, Default)]
pub struct System {
    num_vars: usize,
    rows: Vec<Row>,
}

impl System {
    pub fn new(num_vars: usize) -> Self {
        System { num_vars, rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn add(&mut self, coeffs: Vec<Scalar>, cmp: Cmp, rhs: Scalar, strict: bool) {
        self.rows.push(Row { coeffs, cmp, rhs, strict });
    }

    /// Convenience for sparse rows: `terms` are `(variable, coefficient)`.
    pub fn add_sparse(&mut self, terms: &[(usize, Scalar)], cmp: Cmp, rhs: Scalar, strict: bool) {
        let mut coeffs = vec![Scalar::zero(); self.num_vars];
        for (var, coeff) in terms {
            coeffs[*var] += coeff;
        }
        self.add(coeffs, cmp, rhs, strict);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    /// Every row holds (strict flags ignored).
    pub feasible: bool,
    /// Every row holds and every strict row has positive slack.
    pub strictly_feasible: bool,
    pub witness: Option<Vec<Scalar>>,
}

/// Decides feasibility of `system` exactly.
pub fn feasible(system: &System) -> Result<Verdict> {
    let n = system.num_vars;
    for (i, row) in system.rows.iter().enumerate() {
        if row.coeffs.len() != n {
            return Err(Error::MalformedInput(format!(
                "row {i} has {} coefficients for {n} variables",
                row.coeffs.len()
            )));
        }
    }

    let everything = |row: &Row| row.cmp != Cmp::Eq;
    let (slack, witness) = match max_min_slack(system, everything)? {
        None => return Ok(Verdict { feasible: false, strictly_feasible: false, witness: None }),
        Some(found) => found,
    };
    if slack.is_negative() {
        return Ok(Verdict { feasible: false, strictly_feasible: false, witness: None });
    }
    let has_strict = system.rows.iter().any(|r| r.strict && r.cmp != Cmp::Eq);
    if !has_strict || slack.is_positive() {
        return Ok(Verdict { feasible: true, strictly_feasible: true, witness: Some(witness) });
    }

    // Some non-strict row is forced tight; retry giving slack to strict rows only.
    let strict_only = |row: &Row| row.strict && row.cmp != Cmp::Eq;
    match max_min_slack(system, strict_only)? {
        Some((s, w)) if s.is_positive() => {
            Ok(Verdict { feasible: true, strictly_feasible: true, witness: Some(w) })
        }
        _ => Ok(Verdict { feasible: true, strictly_feasible: false, witness: Some(witness) }),
    }
}

/// Maximises `t <= 1` such that each row selected by `with_slack` holds with
/// slack `t`; other rows hold exactly as written. `None` when even that is
/// infeasible (only possible if unselected rows conflict).
fn max_min_slack(system: &System, with_slack: impl Fn(&Row) -> bool) -> Result<Option<(Scalar, Vec<Scalar>)>> {
    let n = system.num_vars;
    // Columns: x+ (n), x- (n), t+, t-.
    let width = 2 * n + 2;
    let (tp, tm) = (2 * n, 2 * n + 1);
    let mut a = Vec::with_capacity(system.rows.len() + 1);
    let mut cmps = Vec::with_capacity(system.rows.len() + 1);
    let mut b = Vec::with_capacity(system.rows.len() + 1);
    for row in &system.rows {
        let mut line = vec![Scalar::zero(); width];
        for (j, c) in row.coeffs.iter().enumerate() {
            line[j] = c.clone();
            line[n + j] = -c;
        }
        if with_slack(row) {
            let sign = if row.cmp == Cmp::Le { int(1) } else { int(-1) };
            line[tp] = sign.clone();
            line[tm] = -sign;
        }
        a.push(line);
        cmps.push(row.cmp);
        b.push(row.rhs.clone());
    }
    let mut cap = vec![Scalar::zero(); width];
    cap[tp] = int(1);
    cap[tm] = int(-1);
    a.push(cap);
    cmps.push(Cmp::Le);
    b.push(int(1));

    let mut objective = vec![Scalar::zero(); width];
    objective[tp] = int(1);
    objective[tm] = int(-1);

    match maximize(&objective, &a, &cmps, &b) {
        Outcome::Infeasible => Ok(None),
        Outcome::Unbounded => Err(Error::MalformedInput("slack objective unbounded".into())),
        Outcome::Optimal { value, point } => {
            let x = (0..n).map(|j| &point[j] - &point[n + j]).collect();
            Ok(Some((value, x)))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Optimal { value: Scalar, point: Vec<Scalar> },
    Infeasible,
    Unbounded,
}

/// Maximises `objective · x` subject to `a x (cmp) b`, `x >= 0`.
pub fn maximize(objective: &[Scalar], a: &[Vec<Scalar>], cmps: &[Cmp], b: &[Scalar]) -> Outcome {
    let n = objective.len();
    let m = a.len();

    // Normalise to b >= 0.
    let mut rows: Vec<(Vec<Scalar>, Cmp, Scalar)> = Vec::with_capacity(m);
    for i in 0..m {
        if b[i].is_negative() {
            let flipped = match cmps[i] {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
            rows.push((a[i].iter().map(|v| -v).collect(), flipped, -&b[i]));
        } else {
            rows.push((a[i].clone(), cmps[i], b[i].clone()));
        }
    }

    let num_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
    let num_art = rows.iter().filter(|r| r.1 != Cmp::Le).count();
    let art_start = n + num_slack;
    let total = art_start + num_art;

    let mut tableau = Tableau {
        cells: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        width: total,
    };
    let (mut next_slack, mut next_art) = (n, art_start);
    for (coeffs, cmp, rhs) in rows {
        let mut line = coeffs;
        line.resize(total, Scalar::zero());
        match cmp {
            Cmp::Le => {
                line[next_slack] = int(1);
                tableau.basis.push(next_slack);
                next_slack += 1;
            }
            Cmp::Ge => {
                line[next_slack] = int(-1);
                next_slack += 1;
                line[next_art] = int(1);
                tableau.basis.push(next_art);
                next_art += 1;
            }
            Cmp::Eq => {
                line[next_art] = int(1);
                tableau.basis.push(next_art);
                next_art += 1;
            }
        }
        tableau.cells.push(line);
        tableau.rhs.push(rhs);
    }

    if num_art > 0 {
        let mut phase_one = vec![Scalar::zero(); total];
        for cost in &mut phase_one[art_start..] {
            *cost = int(-1);
        }
        match tableau.optimize(&phase_one, total) {
            Some(value) if value.is_zero() => {}
            _ => return Outcome::Infeasible,
        }
        tableau.evict_artificials(art_start);
    }

    let mut costs = objective.to_vec();
    costs.resize(total, Scalar::zero());
    match tableau.optimize(&costs, art_start) {
        None => Outcome::Unbounded,
        Some(value) => {
            let mut point = vec![Scalar::zero(); n];
            for (i, &var) in tableau.basis.iter().enumerate() {
                if var < n {
                    point[var] = tableau.rhs[i].clone();
                }
            }
            Outcome::Optimal { value, point }
        }
    }
}

struct Tableau {
    cells: Vec<Vec<Scalar>>,
    rhs: Vec<Scalar>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    /// Runs primal simplex for `costs` (maximisation), letting only columns
    /// `< allowed` enter. Returns the optimum, or `None` if unbounded.
    fn optimize(&mut self, costs: &[Scalar], allowed: usize) -> Option<Scalar> {
        loop {
            // Reduced costs z_j - c_j; Bland: first improving column.
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut z = -&costs[j];
                for (i, &var) in self.basis.iter().enumerate() {
                    if !self.cells[i][j].is_zero() && !costs[var].is_zero() {
                        z += &costs[var] * &self.cells[i][j];
                    }
                }
                if z.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                let mut value = Scalar::zero();
                for (i, &var) in self.basis.iter().enumerate() {
                    value += &costs[var] * &self.rhs[i];
                }
                return Some(value);
            };

            let mut leaving: Option<(usize, Scalar)> = None;
            for i in 0..self.cells.len() {
                let pivot = &self.cells[i][col];
                if !pivot.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / pivot;
                let better = match &leaving {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio || (ratio == *best_ratio && self.basis[i] < self.basis[*best])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let (row, _) = leaving?;
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let factor = self.cells[row][col].clone();
        if !factor.is_one() {
            for v in self.cells[row].iter_mut() {
                *v /= &factor;
            }
            self.rhs[row] /= &factor;
        }
        let pivot_row = self.cells[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.cells.len() {
            if i == row || self.cells[i][col].is_zero() {
                continue;
            }
            let mult = self.cells[i][col].clone();
            for j in 0..self.width {
                if !pivot_row[j].is_zero() {
                    let delta = &mult * &pivot_row[j];
                    self.cells[i][j] -= delta;
                }
            }
            self.rhs[i] -= &mult * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// After a successful phase one, pivots zero-valued artificials out of the
    /// basis and drops rows that turn out to be redundant.
    fn evict_artificials(&mut self, art_start: usize) {
        let mut i = 0;
        while i < self.cells.len() {
            if self.basis[i] < art_start {
                i += 1;
                continue;
            }
            match (0..art_start).find(|&j| !self.cells[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.cells.remove(i);
                    self.rhs.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}
