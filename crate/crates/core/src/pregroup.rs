//! Pregroup types and reduction by planar contraction.
//!
//! A simple type is a base symbol with an adjoint degree: `n` is degree 0,
//! `n.l` is -1, `n.r` is +1 and suffixes iterate (`n.l.l` is -2). Adjacent
//! simples `x^(z) x^(z+1)` contract to the unit. A reduction to a target is
//! a non-crossing set of such links whose unlinked simples, read left to
//! right, spell the target. Indices are 0-based; [`LinkDiagram`]'s
//! `Display` prints them 1-based.

use std::fmt;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DIAGRAMS: usize = 16;
pub const MAX_DIAGRAMS_VAR: &str = "CONVEXSEM_MAX_DIAGRAMS";
pub const BRUTE_FORCE_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleType {
    pub base: String,
    pub z: i32,
}

impl SimpleType {
    pub fn new(base: impl Into<String>, z: i32) -> Self {
        SimpleType { base: base.into(), z }
    }

    pub fn plain(base: impl Into<String>) -> Self {
        Self::new(base, 0)
    }

    /// True when `self · right` contracts to the unit.
    pub fn contracts_with(&self, right: &SimpleType) -> bool {
        self.base == right.base && right.z == self.z + 1
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base)?;
        let suffix = if self.z < 0 { ".l" } else { ".r" };
        for _ in 0..self.z.unsigned_abs() {
            f.write_str(suffix)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeString {
    pub simples: Vec<SimpleType>,
}

impl TypeString {
    pub fn new(simples: Vec<SimpleType>) -> Self {
        TypeString { simples }
    }

    pub fn unit() -> Self {
        TypeString::default()
    }

    pub fn len(&self) -> usize {
        self.simples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simples.is_empty()
    }

    pub fn concat(&self, other: &TypeString) -> TypeString {
        let mut simples = self.simples.clone();
        simples.extend(other.simples.iter().cloned());
        TypeString { simples }
    }

    pub fn bases(&self) -> impl Iterator<Item = &str> {
        self.simples.iter().map(|s| s.base.as_str())
    }
}

impl fmt::Display for TypeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.simples.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for TypeString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_type_string(s)
    }
}

/// Reads `Simple+` with `Simple := BASE ("." ("l"|"r"))*`. Blank input is
/// the unit type. Errors carry a 1-based column on line 1.
pub fn parse_type_string(text: &str) -> Result<TypeString> {
    let chars: Vec<char> = text.chars().collect();
    let err = |col: usize, message: String| Error::Syntax { line: 1, column: col + 1, message };
    let mut simples = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        if !(chars[i].is_alphabetic() || chars[i] == '_') {
            return Err(err(i, format!("expected a base type, found `{}`", chars[i])));
        }
        let start = i;
        while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
            i += 1;
        }
        let base: String = chars[start..i].iter().collect();
        let mut z = 0;
        while i < chars.len() && chars[i] == '.' {
            match chars.get(i + 1) {
                Some('l') => z -= 1,
                Some('r') => z += 1,
                Some(c) => return Err(err(i + 1, format!("expected `l` or `r` after `.`, found `{c}`"))),
                None => return Err(err(i + 1, "expected `l` or `r` after `.`".into())),
            }
            i += 2;
        }
        if i < chars.len() && !chars[i].is_whitespace() {
            return Err(err(i, format!("unexpected `{}` after `{base}`", chars[i])));
        }
        simples.push(SimpleType { base, z });
    }
    Ok(TypeString { simples })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkDiagram {
    /// Sorted pairs `(i, j)`, `i < j`.
    pub links: Vec<(usize, usize)>,
    pub survivors: Vec<usize>,
}

impl LinkDiagram {
    pub fn new(mut links: Vec<(usize, usize)>, survivors: Vec<usize>) -> Self {
        links.sort_unstable();
        LinkDiagram { links, survivors }
    }

    pub fn links_one_based(&self) -> Vec<(usize, usize)> {
        self.links.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
    }

    pub fn survivors_one_based(&self) -> Vec<usize> {
        self.survivors.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for LinkDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("links")?;
        if self.links.is_empty() {
            f.write_str(" none")?;
        }
        for (i, j) in self.links_one_based() {
            write!(f, " ({i},{j})")?;
        }
        f.write_str("; survivors")?;
        if self.survivors.is_empty() {
            f.write_str(" none")?;
        }
        for i in self.survivors_one_based() {
            write!(f, " {i}")?;
        }
        Ok(())
    }
}

/// Cap from `CONVEXSEM_MAX_DIAGRAMS`, else the default. Zero or garbage
/// falls back to the default.
pub fn max_diagrams() -> usize {
    std::env::var(MAX_DIAGRAMS_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MAX_DIAGRAMS)
}

pub fn reduce(ts: &TypeString, target: &TypeString) -> Vec<LinkDiagram> {
    reduce_with_cap(ts, target, max_diagrams())
}

/// All reductions of `ts` to `target`, sorted by link pairs and truncated
/// to `cap`.
pub fn reduce_with_cap(ts: &TypeString, target: &TypeString, cap: usize) -> Vec<LinkDiagram> {
    let s = &ts.simples;
    let n = s.len();
    let unit = unit_table(s);
    let feas = feasibility(s, &unit, &target.simples);
    if !feas[0][0] {
        return Vec::new();
    }
    let mut matchings = Matchings { s, unit: &unit, memo: vec![None; (n + 1) * (n + 1)] };
    let mut out = Vec::new();
    let mut walk = Walk { target: &target.simples, feas: &feas, out: &mut out };
    walk.top_level(&mut matchings, 0, 0, Vec::new(), Vec::new());
    out.sort();
    out.dedup();
    out.truncate(cap);
    out
}

/// `unit[i][j]`: the span `i..j` contracts fully (cubic recogniser).
fn unit_table(s: &[SimpleType]) -> Vec<Vec<bool>> {
    let n = s.len();
    let mut unit = vec![vec![false; n + 1]; n + 1];
    for i in 0..=n {
        unit[i][i] = true;
    }
    for len in (2..=n).step_by(2) {
        for i in 0..=n - len {
            let j = i + len;
            unit[i][j] = (i + 1..j)
                .step_by(2)
                .any(|k| s[i].contracts_with(&s[k]) && unit[i + 1][k] && unit[k + 1][j]);
        }
    }
    unit
}

/// `feas[p][t]`: survivors chosen from `p..` can spell `target[t..]` with
/// every gap contracting fully.
fn feasibility(s: &[SimpleType], unit: &[Vec<bool>], target: &[SimpleType]) -> Vec<Vec<bool>> {
    let (n, m) = (s.len(), target.len());
    let mut feas = vec![vec![false; m + 1]; n + 1];
    for p in (0..=n).rev() {
        feas[p][m] = unit[p][n];
        for t in 0..m {
            feas[p][t] = (p..n).any(|q| unit[p][q] && s[q] == target[t] && feas[q + 1][t + 1]);
        }
    }
    feas
}

struct Matchings<'a> {
    s: &'a [SimpleType],
    unit: &'a [Vec<bool>],
    memo: Vec<Option<Vec<Vec<(usize, usize)>>>>,
}

impl Matchings<'_> {
    /// Every full contraction of the span `i..j`.
    fn of(&mut self, i: usize, j: usize) -> Vec<Vec<(usize, usize)>> {
        let n = self.s.len();
        if let Some(m) = &self.memo[i * (n + 1) + j] {
            return m.clone();
        }
        let mut out = Vec::new();
        if i == j {
            out.push(Vec::new());
        } else if self.unit[i][j] {
            for k in (i + 1..j).step_by(2) {
                if !(self.s[i].contracts_with(&self.s[k]) && self.unit[i + 1][k] && self.unit[k + 1][j]) {
                    continue;
                }
                let inner = self.of(i + 1, k);
                let rest = self.of(k + 1, j);
                for a in &inner {
                    for b in &rest {
                        let mut links = vec![(i, k)];
                        links.extend(a.iter().copied());
                        links.extend(b.iter().copied());
                        out.push(links);
                    }
                }
            }
        }
        self.memo[i * (n + 1) + j] = Some(out.clone());
        out
    }
}

struct Walk<'a> {
    target: &'a [SimpleType],
    feas: &'a [Vec<bool>],
    out: &'a mut Vec<LinkDiagram>,
}

impl Walk<'_> {
    fn top_level(
        &mut self,
        m: &mut Matchings<'_>,
        from: usize,
        t: usize,
        links: Vec<(usize, usize)>,
        survivors: Vec<usize>,
    ) {
        let n = m.s.len();
        if t == self.target.len() {
            for tail in m.of(from, n) {
                let mut all = links.clone();
                all.extend(tail);
                self.out.push(LinkDiagram::new(all, survivors.clone()));
            }
            return;
        }
        for p in from..n {
            if !(m.unit[from][p] && m.s[p] == self.target[t] && self.feas[p + 1][t + 1]) {
                continue;
            }
            for gap in m.of(from, p) {
                let mut all = links.clone();
                all.extend(gap);
                let mut surv = survivors.clone();
                surv.push(p);
                self.top_level(m, p + 1, t + 1, all, surv);
            }
        }
    }
}

/// Checks indices, planarity, the contraction rule, that no survivor sits
/// under a link, that every simple is used once, and that the survivors
/// spell `target`.
pub fn validate_diagram(ts: &TypeString, diagram: &LinkDiagram, target: &TypeString) -> bool {
    let s = &ts.simples;
    let n = s.len();
    let mut used = vec![false; n];
    for &(i, j) in &diagram.links {
        if i >= j || j >= n || used[i] || used[j] {
            return false;
        }
        used[i] = true;
        used[j] = true;
        if !s[i].contracts_with(&s[j]) {
            return false;
        }
    }
    for &p in &diagram.survivors {
        if p >= n || used[p] {
            return false;
        }
        used[p] = true;
    }
    if used.iter().any(|u| !u) {
        return false;
    }
    if diagram.survivors.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    for &(i, j) in &diagram.links {
        for &(k, l) in &diagram.links {
            if i < k && k < j && j < l {
                return false;
            }
        }
        if diagram.survivors.iter().any(|&p| i < p && p < j) {
            return false;
        }
    }
    diagram.survivors.len() == target.len()
        && diagram.survivors.iter().zip(&target.simples).all(|(&p, t)| &s[p] == t)
}

/// Exhaustive search over every partial matching; the oracle for
/// [`reduce`]. Output is sorted like `reduce` but never truncated.
pub fn brute_force_reduce(ts: &TypeString, target: &TypeString) -> Result<Vec<LinkDiagram>> {
    let n = ts.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::InputTooLarge(format!("{n} simples (limit {BRUTE_FORCE_LIMIT})")));
    }
    let mut out = Vec::new();
    let mut partner = vec![None; n];
    enumerate(0, &mut partner, &mut |partner| {
        let mut links = Vec::new();
        let mut survivors = Vec::new();
        for (i, p) in partner.iter().enumerate() {
            match p {
                Some(j) if *j > i => links.push((i, *j)),
                Some(_) => {}
                None => survivors.push(i),
            }
        }
        let d = LinkDiagram::new(links, survivors);
        if validate_diagram(ts, &d, target) {
            out.push(d);
        }
    });
    out.sort();
    Ok(out)
}

fn enumerate(i: usize, partner: &mut Vec<Option<usize>>, visit: &mut dyn FnMut(&[Option<usize>])) {
    let n = partner.len();
    if i == n {
        visit(partner);
        return;
    }
    if partner[i].is_some() {
        enumerate(i + 1, partner, visit);
        return;
    }
    enumerate(i + 1, partner, visit);
    for j in i + 1..n {
        if partner[j].is_none() {
            partner[i] = Some(j);
            partner[j] = Some(i);
            enumerate(i + 1, partner, visit);
            partner[i] = None;
            partner[j] = None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> TypeString {
        parse_type_string(s).unwrap()
    }

    #[test]
    fn parses_adjoints() {
        assert_eq!(
            ts("n.r s n.l").simples,
            vec![SimpleType::new("n", 1), SimpleType::new("s", 0), SimpleType::new("n", -1)]
        );
        assert_eq!(ts("n.l.l").simples, vec![SimpleType::new("n", -2)]);
        assert_eq!(ts("  ").len(), 0);
        assert_eq!(ts("n.l.r").simples, vec![SimpleType::plain("n")]);
        assert_eq!(ts("n.r s n.l").to_string(), "n.r s n.l");
    }

    #[test]
    fn syntax_errors_have_columns() {
        match parse_type_string("n.x") {
            Err(Error::Syntax { line: 1, column: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_type_string("n s.") {
            Err(Error::Syntax { column: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_type_string("n ,").is_err());
    }

    #[test]
    fn clowns_tell_jokes() {
        let d = reduce(&ts("n n.r s n.l n"), &ts("s"));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].links_one_based(), vec![(1, 2), (4, 5)]);
        assert_eq!(d[0].survivors_one_based(), vec![3]);
        assert_eq!(d[0].to_string(), "links (1,2) (4,5); survivors 3");
        assert!(validate_diagram(&ts("n n.r s n.l n"), &d[0], &ts("s")));
    }

    #[test]
    fn trivial_reductions() {
        assert_eq!(reduce(&ts("s"), &ts("s")), vec![LinkDiagram::new(vec![], vec![0])]);
        assert!(reduce(&ts("n n"), &ts("s")).is_empty());
        assert_eq!(reduce(&ts(""), &ts("")), vec![LinkDiagram::default_empty()]);
    }

    #[test]
    fn rejects_crossing_and_bad_degrees() {
        let t = ts("n n n.r n.r");
        let crossing = LinkDiagram::new(vec![(0, 2), (1, 3)], vec![]);
        assert!(!validate_diagram(&t, &crossing, &TypeString::unit()));
        let nested = LinkDiagram::new(vec![(0, 3), (1, 2)], vec![]);
        assert!(validate_diagram(&t, &nested, &TypeString::unit()));
        let same = ts("n n");
        assert!(!validate_diagram(&same, &LinkDiagram::new(vec![(0, 1)], vec![]), &TypeString::unit()));
    }

    #[test]
    fn survivor_under_a_link_is_invalid() {
        let t = ts("n s n.r");
        let d = LinkDiagram::new(vec![(0, 2)], vec![1]);
        assert!(!validate_diagram(&t, &d, &ts("s")));
        assert!(reduce(&t, &ts("s")).is_empty());
    }

    #[test]
    fn cap_truncates_in_order() {
        let t = ts("n n.l n n.r n n.l n n.r n");
        let all = reduce_with_cap(&t, &ts("n"), 100);
        assert!(all.len() > 1);
        let two = reduce_with_cap(&t, &ts("n"), 2);
        assert_eq!(two, all[..2].to_vec());
        assert_eq!(all, brute_force_reduce(&t, &ts("n")).unwrap());
    }

    #[test]
    fn brute_force_limit() {
        let long = ts(&["n"; 11].join(" "));
        assert!(matches!(brute_force_reduce(&long, &long), Err(Error::InputTooLarge(_))));
        assert_eq!(brute_force_reduce(&ts(""), &ts("")).unwrap().len(), 1);
    }

    impl LinkDiagram {
        fn default_empty() -> Self {
            LinkDiagram::new(vec![], vec![])
        }
    }
}
