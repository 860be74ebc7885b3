//! Periodic patterns on trees as validated combinatorial objects.
//!
//! A pattern is a period `n` together with a family of discrete components:
//! subsets of the time-labeled points `0..n-1` whose bipartite incidence
//! graph (points vs. components) is a tree. The shift dynamics is implicit:
//! point `i` maps to `i + 1 mod n`. Pattern equality is up to label
//! rotation, realized through a lexicographic canonical form.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated periodic pattern: period plus discrete components.
///
/// Components are stored sorted (each ascending, the list lexicographic),
/// so two `Pattern` values compare equal iff they are equal as labeled
/// combinatorial objects. Use [`Pattern::equivalent`] for equality up to
/// rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPattern")]
pub struct Pattern {
    period: usize,
    components: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawPattern {
    period: usize,
    components: Vec<Vec<usize>>,
}

impl TryFrom<RawPattern> for Pattern {
    type Error = Error;

    fn try_from(raw: RawPattern) -> Result<Self> {
        Pattern::validate(raw.period, raw.components)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

impl Pattern {
    /// Validates raw components against the hypertree conditions and builds
    /// a pattern in normalized (sorted) representation.
    pub fn validate(period: usize, raw_components: Vec<Vec<usize>>) -> Result<Self> {
        if period == 0 {
            return Err(Error::OutOfRange { point: 0, period });
        }
        let mut components: Vec<Vec<usize>> = Vec::with_capacity(raw_components.len());
        for c in raw_components {
            if c.is_empty() {
                return Err(Error::EmptyComponent);
            }
            let set: BTreeSet<usize> = c.into_iter().collect();
            let c: Vec<usize> = set.into_iter().collect();
            if let Some(&p) = c.iter().find(|&&p| p >= period) {
                return Err(Error::OutOfRange { point: p, period });
            }
            if c.len() < 2 && period >= 2 {
                return Err(Error::SingletonComponent(c));
            }
            components.push(c);
        }
        components.sort();
        components.dedup();
        if components.is_empty() {
            return Err(Error::EmptyComponent);
        }
        for i in 0..components.len() {
            for j in (i + 1)..components.len() {
                let (a, b) = (&components[i], &components[j]);
                if is_subset(a, b) {
                    return Err(Error::NonMaximal(a.clone(), b.clone()));
                }
                if is_subset(b, a) {
                    return Err(Error::NonMaximal(b.clone(), a.clone()));
                }
                if intersection_size(a, b) >= 2 {
                    return Err(Error::OverlapTooLarge(a.clone(), b.clone()));
                }
            }
        }
        // Acyclicity: each component must join pairwise-distinct classes.
        let mut uf = UnionFind::new(period);
        for c in &components {
            let mut roots = BTreeSet::new();
            for &p in c {
                if !roots.insert(uf.find(p)) {
                    return Err(Error::Cyclic);
                }
            }
            for &p in &c[1..] {
                uf.union(c[0], p);
            }
        }
        let root = uf.find(0);
        for p in 1..period {
            if uf.find(p) != root {
                return Err(Error::NotConnected);
            }
        }
        Ok(Pattern { period, components })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// True iff the pattern has a single discrete component.
    pub fn is_trivial(&self) -> bool {
        self.components.len() == 1
    }

    /// Relabels every point by `x -> (x + s) mod n`.
    pub fn rotate(&self, s: usize) -> Pattern {
        let n = self.period;
        let mut components: Vec<Vec<usize>> = self
            .components
            .iter()
            .map(|c| {
                let mut v: Vec<usize> = c.iter().map(|&x| (x + s) % n).collect();
                v.sort_unstable();
                v
            })
            .collect();
        components.sort();
        Pattern {
            period: n,
            components,
        }
    }

    /// The lexicographically least representation over all rotations.
    pub fn canonical_form(&self) -> Pattern {
        (0..self.period)
            .map(|s| self.rotate(s))
            .min()
            .expect("period is positive")
    }

    /// Equality up to label rotation.
    pub fn equivalent(&self, other: &Pattern) -> bool {
        self.period == other.period && self.canonical_form() == other.canonical_form()
    }

    /// Number of discrete components containing point `i`.
    pub fn valence(&self, i: usize) -> usize {
        self.components.iter().filter(|c| c.contains(&i)).count()
    }

    /// Points of valence 1.
    pub fn endpoints(&self) -> Vec<usize> {
        (0..self.period).filter(|&i| self.valence(i) == 1).collect()
    }

    /// Builds the bipartite incidence tree realizing this pattern.
    pub fn incidence_tree(&self) -> IncidenceTree {
        IncidenceTree::build(self)
    }

    /// Point sequence along the incidence-tree path from `a` to `b`
    /// (hub nodes elided, endpoints included).
    pub fn tree_path(&self, a: usize, b: usize) -> Vec<usize> {
        self.incidence_tree().path_points(a, b)
    }

    /// Classifies the pattern against the star-pattern shapes.
    pub fn star_class(&self) -> StarClass {
        let n = self.period;
        if self.components.len() == 1 {
            return StarClass::TrivialStar(n);
        }
        let valences: Vec<usize> = (0..n).map(|i| self.valence(i)).collect();
        let max_valence = valences.iter().copied().max().unwrap_or(0);
        let all_binary = self.components.iter().all(|c| c.len() == 2);
        if all_binary {
            if max_valence <= 2 {
                return StarClass::IntervalPattern;
            }
            let branched: Vec<usize> = (0..n).filter(|&i| valences[i] >= 3).collect();
            if branched.len() == 1 {
                return StarClass::SimplicialStar(valences[branched[0]]);
            }
            return StarClass::NotStar;
        }
        let big: Vec<&Vec<usize>> = self.components.iter().filter(|c| c.len() >= 3).collect();
        if big.len() == 1 && max_valence <= 2 {
            return StarClass::NonSimplicialStar(big[0].len());
        }
        StarClass::NotStar
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.len() < b.len() && a.iter().all(|x| b.contains(x))
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|x| b.contains(x)).count()
}

/// Shape classification of a pattern with respect to star realizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarClass {
    /// Single discrete component of `k` points.
    TrivialStar(usize),
    /// All components binary, all valences at most 2.
    IntervalPattern,
    /// All components binary, a unique point of valence `k >= 3`.
    SimplicialStar(usize),
    /// One branching component of `k >= 3` points, all valences at most 2.
    NonSimplicialStar(usize),
    NotStar,
}

impl StarClass {
    /// The star valence `k`, when the pattern is a star pattern.
    pub fn star_valence(&self) -> Option<usize> {
        match *self {
            StarClass::TrivialStar(k) => Some(k),
            StarClass::IntervalPattern => Some(2),
            StarClass::SimplicialStar(k) => Some(k),
            StarClass::NonSimplicialStar(k) => Some(k),
            StarClass::NotStar => None,
        }
    }
}

impl fmt::Display for StarClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarClass::TrivialStar(k) => write!(f, "trivial star ({k})"),
            StarClass::IntervalPattern => write!(f, "interval pattern"),
            StarClass::SimplicialStar(k) => write!(f, "simplicial {k}-star"),
            StarClass::NonSimplicialStar(k) => write!(f, "non-simplicial {k}-star"),
            StarClass::NotStar => write!(f, "not a star pattern"),
        }
    }
}

/// Bipartite tree of point-nodes `0..n-1` and one hub-node per component.
///
/// Hub for component `j` (in canonical order) is node `n + j`. All path and
/// hull computations run on this tree; any topological model of the pattern
/// induces the same point paths.
pub struct IncidenceTree {
    point_count: usize,
    adjacency: Vec<Vec<usize>>,
    parent: Vec<usize>,
    depth: Vec<usize>,
}

impl IncidenceTree {
    fn build(pattern: &Pattern) -> Self {
        let n = pattern.period();
        let m = pattern.components().len();
        let mut adjacency = vec![Vec::new(); n + m];
        for (j, c) in pattern.components().iter().enumerate() {
            for &p in c {
                adjacency[p].push(n + j);
                adjacency[n + j].push(p);
            }
        }
        let mut parent = vec![usize::MAX; n + m];
        let mut depth = vec![0usize; n + m];
        let mut queue = std::collections::VecDeque::from([0usize]);
        parent[0] = 0;
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        IncidenceTree {
            point_count: n,
            adjacency,
            parent,
            depth,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Node sequence (points and hubs) from `a` to `b`, inclusive.
    pub fn node_path(&self, mut a: usize, mut b: usize) -> Vec<usize> {
        let mut left = vec![a];
        let mut right = vec![b];
        while self.depth[a] > self.depth[b] {
            a = self.parent[a];
            left.push(a);
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b];
            right.push(b);
        }
        while a != b {
            a = self.parent[a];
            left.push(a);
            b = self.parent[b];
            right.push(b);
        }
        right.pop();
        left.extend(right.into_iter().rev());
        left
    }

    /// Point sequence from `a` to `b` with hub nodes elided.
    pub fn path_points(&self, a: usize, b: usize) -> Vec<usize> {
        self.node_path(a, b)
            .into_iter()
            .filter(|&v| v < self.point_count)
            .collect()
    }
}

impl fmt::Display for Pattern {
    /// Text format: `n: a b c | d e | ...`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.period)?;
        for (j, c) in self.components.iter().enumerate() {
            if j > 0 {
                write!(f, " |")?;
            }
            for p in c {
                write!(f, " {p}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in {s:?}")))?;
        let period: usize = head
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad period {:?}", head.trim())))?;
        let mut components = Vec::new();
        for group in body.split('|') {
            let mut c = Vec::new();
            for tok in group.split_whitespace() {
                let p: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point {tok:?}")))?;
                c.push(p);
            }
            components.push(c);
        }
        Pattern::validate(period, components)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    fn p2() -> Pattern {
        pat("4: 0 2 | 0 1 | 1 3")
    }

    fn exemples4() -> Pattern {
        pat("6: 0 1 | 4 5 | 1 2 3 4")
    }

    #[test]
    fn validate_accepts_six_periodic_example() {
        let p = exemples4();
        assert_eq!(p.period(), 6);
        assert_eq!(p.components(), &[vec![0, 1], vec![1, 2, 3, 4], vec![4, 5]]);
    }

    #[test]
    fn validate_rejects_two_islands() {
        let err = Pattern::validate(4, vec![vec![0, 1], vec![2, 3]]).unwrap_err();
        assert_eq!(err, Error::NotConnected);
    }

    #[test]
    fn validate_rejects_three_cycle() {
        let err = Pattern::validate(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap_err();
        assert_eq!(err, Error::Cyclic);
    }

    #[test]
    fn validate_rejects_bad_inputs() {
        assert_eq!(
            Pattern::validate(3, vec![vec![0, 1], vec![2]]).unwrap_err(),
            Error::SingletonComponent(vec![2])
        );
        assert_eq!(
            Pattern::validate(2, vec![vec![0, 2]]).unwrap_err(),
            Error::OutOfRange {
                point: 2,
                period: 2
            }
        );
        assert!(matches!(
            Pattern::validate(4, vec![vec![0, 1, 2, 3], vec![1, 2]]).unwrap_err(),
            Error::NonMaximal(..)
        ));
        assert!(matches!(
            Pattern::validate(5, vec![vec![0, 1, 2], vec![1, 2, 3], vec![3, 4]]).unwrap_err(),
            Error::OverlapTooLarge(..)
        ));
    }

    #[test]
    fn degenerate_periods_are_valid() {
        assert!(Pattern::validate(1, vec![vec![0]]).is_ok());
        assert!(Pattern::validate(2, vec![vec![0, 1]]).is_ok());
    }

    #[test]
    fn rotate_relabels_and_inverts() {
        let p = pat("3: 0 1 | 1 2");
        assert_eq!(p.rotate(1), pat("3: 1 2 | 2 0"));
        assert_eq!(p.rotate(0), p);
        let q = exemples4();
        for s in 0..6 {
            assert_eq!(q.rotate(s).rotate(6 - s), q);
        }
    }

    #[test]
    fn canonical_form_of_p2() {
        let c = p2().canonical_form();
        assert_eq!(c.components(), &[vec![0, 1], vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn canonical_form_is_idempotent_and_rotation_invariant() {
        let p = exemples4();
        let c = p.canonical_form();
        assert_eq!(c.canonical_form(), c);
        for s in 0..p.period() {
            assert_eq!(p.rotate(s).canonical_form(), c);
        }
    }

    #[test]
    fn equivalent_patterns() {
        assert!(pat("3: 0 1 | 1 2").equivalent(&pat("3: 0 2 | 1 2")));
        assert!(!pat("3: 0 1 2").equivalent(&pat("3: 0 1 | 1 2")));
        let p = exemples4();
        assert!(p.equivalent(&p.rotate(4)));
    }

    #[test]
    fn incidence_tree_shape() {
        let p = p2();
        let t = p.incidence_tree();
        assert_eq!(t.node_count(), 4 + 3);
        assert_eq!(t.edge_count(), 4 + 3 - 1);
        let star = pat("5: 0 1 2 3 4");
        let t = star.incidence_tree();
        assert_eq!(t.node_count(), 6);
        assert_eq!(t.edge_count(), 5);
    }

    #[test]
    fn tree_path_examples() {
        assert_eq!(exemples4().tree_path(0, 5), vec![0, 1, 4, 5]);
        assert_eq!(p2().tree_path(2, 3), vec![2, 0, 1, 3]);
        assert_eq!(p2().tree_path(3, 3), vec![3]);
        assert_eq!(exemples4().tree_path(5, 0), vec![5, 4, 1, 0]);
    }

    #[test]
    fn two_points_consecutive_iff_path_has_no_third() {
        let p = exemples4();
        for a in 0..6 {
            for b in (a + 1)..6 {
                let share = p
                    .components()
                    .iter()
                    .any(|c| c.contains(&a) && c.contains(&b));
                assert_eq!(p.tree_path(a, b).len() == 2, share, "pair ({a},{b})");
            }
        }
    }

    #[test]
    fn valence_and_endpoints() {
        let p = exemples4();
        assert_eq!(p.valence(1), 2);
        assert_eq!(p.valence(0), 1);
        assert_eq!(p.endpoints(), vec![0, 2, 3, 5]);
        assert_eq!(p2().valence(0), 2);
        assert_eq!(p2().endpoints(), vec![2, 3]);
        let trivial = pat("4: 0 1 2 3");
        assert_eq!(trivial.endpoints().len(), 4);
    }

    #[test]
    fn star_classification() {
        assert_eq!(p2().star_class(), StarClass::IntervalPattern);
        assert_eq!(exemples4().star_class(), StarClass::NonSimplicialStar(4));
        assert_eq!(
            pat("4: 0 1 | 1 2 | 1 3").star_class(),
            StarClass::SimplicialStar(3)
        );
        assert_eq!(pat("3: 0 1 2").star_class(), StarClass::TrivialStar(3));
        // two branch points of valence 3 cannot sit on a star
        let h = pat("8: 0 1 | 1 2 | 1 3 | 3 4 | 3 5 | 5 6 | 6 7");
        assert_eq!(h.star_class(), StarClass::NotStar);
    }

    #[test]
    fn star_class_is_rotation_invariant() {
        let p = exemples4();
        for s in 0..p.period() {
            assert_eq!(p.rotate(s).star_class(), p.star_class());
        }
    }

    #[test]
    fn nonsimplicial_star_valence_counts_endpoints() {
        let p = exemples4();
        if let StarClass::NonSimplicialStar(k) = p.star_class() {
            assert_eq!(k, p.endpoints().len());
        } else {
            panic!("expected non-simplicial star");
        }
    }

    #[test]
    fn text_round_trip() {
        for s in ["4: 0 2 | 0 1 | 1 3", "6: 0 1 | 1 2 3 4 | 4 5", "1: 0"] {
            let p: Pattern = s.parse().unwrap();
            assert_eq!(p.to_string().parse::<Pattern>().unwrap(), p);
        }
    }

    #[test]
    fn json_round_trip() {
        let p = p2();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Pattern>(&json).unwrap(), p);
        // deserialization re-validates
        assert!(
            serde_json::from_str::<Pattern>(r#"{"period":4,"components":[[0,1],[2,3]]}"#).is_err()
        );
    }
}
