//! Trivial block structures, the combinatorial collapse, and the recursive
//! strong-collapsibility decider with replayable certificates.
//!
//! Blocks are always the residue classes mod `p` with `0` in block `0`:
//! under the shift `i -> i+1 mod n`, a partition permuted cyclically by the
//! dynamics is forced to consist of exactly these classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::Pattern;

/// A block structure: a strict divisor `p` of the period and the residue
/// classes mod `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockStructure {
    pub p: usize,
    pub blocks: Vec<Vec<usize>>,
    pub trivial: bool,
    pub maximal: bool,
}

/// Residue classes `{i, i+p, ...}` of `0..n` for a divisor `p`.
pub fn residue_blocks(n: usize, p: usize) -> Vec<Vec<usize>> {
    (0..p).map(|i| (i..n).step_by(p).collect()).collect()
}

fn class_in_single_component(pattern: &Pattern, class: &[usize]) -> bool {
    pattern
        .components()
        .iter()
        .any(|c| class.iter().all(|x| c.contains(x)))
}

/// All strict divisors `p` of the period whose residue classes are each
/// contained in a single discrete component, ascending.
pub fn trivial_block_divisors(pattern: &Pattern) -> Vec<usize> {
    let n = pattern.period();
    let mut out = Vec::new();
    for p in 2..n {
        if !n.is_multiple_of(p) {
            continue;
        }
        let blocks = residue_blocks(n, p);
        if blocks.iter().all(|b| class_in_single_component(pattern, b)) {
            debug_assert!(blocks.iter().all(|b| {
                // block hulls meet no other marked points in the incidence tree
                let hull = hull_points(pattern, b);
                hull.iter().all(|x| b.contains(x))
            }));
            out.push(p);
        }
    }
    out
}

/// The trivial structure with blocks of maximum cardinality (smallest
/// divisor), if any.
pub fn maximal_trivial_structure(pattern: &Pattern) -> Option<BlockStructure> {
    let p = trivial_block_divisors(pattern).into_iter().next()?;
    Some(BlockStructure {
        p,
        blocks: residue_blocks(pattern.period(), p),
        trivial: true,
        maximal: true,
    })
}

/// Shrinks every block of a trivial maximal structure to a point, producing
/// the period-`p` collapsed pattern.
///
/// The components of the collapse are the maximal sets of block indices met
/// by a single component of the input; the pair condition is re-verified
/// after construction and any violation is a hard error.
pub fn combinatorial_collapse(pattern: &Pattern, structure: &BlockStructure) -> Result<Pattern> {
    if !structure.trivial || !structure.maximal {
        return Err(Error::CollapseInvalid(
            "structure must be trivial and maximal".into(),
        ));
    }
    let p = structure.p;
    let meets: Vec<Vec<usize>> = pattern
        .components()
        .iter()
        .map(|c| {
            let mut idx: Vec<usize> = c.iter().map(|&x| x % p).collect();
            idx.sort_unstable();
            idx.dedup();
            idx
        })
        .collect();
    let mut kept: Vec<Vec<usize>> = meets.iter().filter(|s| s.len() >= 2).cloned().collect();
    kept.sort();
    kept.dedup();
    let maximal: Vec<Vec<usize>> = kept
        .iter()
        .filter(|s| {
            !kept
                .iter()
                .any(|t| t.len() > s.len() && s.iter().all(|x| t.contains(x)))
        })
        .cloned()
        .collect();
    let collapsed = Pattern::validate(p, maximal)
        .map_err(|e| Error::CollapseInvalid(format!("collapse is not a valid pattern: {e}")))?;
    for i in 0..p {
        for j in (i + 1)..p {
            let in_collapse = collapsed
                .components()
                .iter()
                .any(|c| c.contains(&i) && c.contains(&j));
            let in_source = meets.iter().any(|s| s.contains(&i) && s.contains(&j));
            if in_collapse != in_source {
                return Err(Error::CollapseInvalid(format!(
                    "pair ({i},{j}) coverage mismatch"
                )));
            }
        }
    }
    Ok(collapsed)
}

/// All points lying on some incidence-tree path between members of `x`.
pub fn hull_points(pattern: &Pattern, x: &[usize]) -> Vec<usize> {
    let mut hull = std::collections::BTreeSet::new();
    if x.is_empty() {
        return Vec::new();
    }
    let tree = pattern.incidence_tree();
    for &b in x {
        hull.extend(tree.path_points(x[0], b));
    }
    hull.into_iter().collect()
}

/// The full chain of collapses witnessing zero entropy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseCertificate {
    /// Block cardinalities `(p_0, ..., p_r)`; their product is the period.
    pub factors: Vec<usize>,
    /// The sequence `P_0, ..., P_r` with `P_r` the certified pattern.
    pub patterns: Vec<Pattern>,
    /// Star valences `(k_0, ..., k_r)` when every stage is a star pattern.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valences: Option<Vec<usize>>,
}

impl CollapseCertificate {
    /// Number of collapse steps `r`.
    pub fn depth(&self) -> usize {
        self.patterns.len() - 1
    }

    /// Replays the chain: each pattern must collapse (via its maximal
    /// structure) to its predecessor, periods must multiply out, and the
    /// bottom pattern must be trivial.
    pub fn verify(&self) -> Result<()> {
        if self.patterns.is_empty() || self.patterns.len() != self.factors.len() {
            return Err(Error::CollapseInvalid("malformed certificate".into()));
        }
        if !self.patterns[0].is_trivial() {
            return Err(Error::CollapseInvalid(
                "bottom pattern is not trivial".into(),
            ));
        }
        let mut expected_period = 1;
        for (i, (pat, &factor)) in self.patterns.iter().zip(&self.factors).enumerate() {
            expected_period *= factor;
            if pat.period() != expected_period {
                return Err(Error::CollapseInvalid(format!(
                    "stage {i} period {} != factor product {expected_period}",
                    pat.period()
                )));
            }
            if i == 0 {
                continue;
            }
            if pat.is_trivial() {
                return Err(Error::CollapseInvalid(format!("stage {i} is trivial")));
            }
            let structure = maximal_trivial_structure(pat).ok_or_else(|| {
                Error::CollapseInvalid(format!("stage {i} has no trivial structure"))
            })?;
            if structure.p != self.patterns[i - 1].period() {
                return Err(Error::CollapseInvalid(format!(
                    "stage {i} maximal structure has {} blocks, expected {}",
                    structure.p,
                    self.patterns[i - 1].period()
                )));
            }
            let collapsed = combinatorial_collapse(pat, &structure)?;
            if collapsed != self.patterns[i - 1] {
                return Err(Error::CollapseInvalid(format!(
                    "stage {i} does not collapse to stage {}",
                    i - 1
                )));
            }
        }
        Ok(())
    }
}

/// Decides zero entropy by iterated collapsing; returns the certificate
/// chain when the pattern is strongly collapsible.
pub fn is_strongly_collapsible(pattern: &Pattern) -> Option<CollapseCertificate> {
    fn build(pattern: &Pattern) -> Option<(Vec<Pattern>, Vec<usize>)> {
        if pattern.is_trivial() {
            return Some((vec![pattern.clone()], vec![pattern.period()]));
        }
        let structure = maximal_trivial_structure(pattern)?;
        let collapsed = combinatorial_collapse(pattern, &structure)
            .expect("collapse over the maximal trivial structure is well formed");
        let (mut patterns, mut factors) = build(&collapsed)?;
        factors.push(pattern.period() / structure.p);
        patterns.push(pattern.clone());
        Some((patterns, factors))
    }

    let (patterns, factors) = build(pattern)?;
    let valences: Option<Vec<usize>> = patterns
        .iter()
        .map(|p| p.star_class().star_valence())
        .collect();
    Some(CollapseCertificate {
        factors,
        patterns,
        valences,
    })
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

    fn topcol2() -> Pattern {
        pat("8: 0 2 6 | 0 1 3 4 5 7")
    }

    fn exemples4() -> Pattern {
        pat("6: 0 1 | 4 5 | 1 2 3 4")
    }

    #[test]
    fn divisors_of_topcol2() {
        assert_eq!(trivial_block_divisors(&topcol2()), vec![4]);
    }

    #[test]
    fn divisors_with_two_structures() {
        let p = pat("8: 0 2 4 6 | 1 3 5 7 | 0 1");
        assert_eq!(trivial_block_divisors(&p), vec![2, 4]);
    }

    #[test]
    fn exemples4_has_no_trivial_structure() {
        assert_eq!(trivial_block_divisors(&exemples4()), Vec::<usize>::new());
        assert!(maximal_trivial_structure(&exemples4()).is_none());
    }

    #[test]
    fn prime_periods_admit_no_divisors() {
        for p in ["5: 0 1 | 1 2 | 2 3 | 3 4", "7: 0 1 2 3 4 5 6"] {
            assert!(trivial_block_divisors(&pat(p)).is_empty());
        }
    }

    #[test]
    fn maximal_structure_examples() {
        let s = maximal_trivial_structure(&pat("8: 0 2 4 6 | 1 3 5 7 | 0 1")).unwrap();
        assert_eq!(s.p, 2);
        assert_eq!(s.blocks, vec![vec![0, 2, 4, 6], vec![1, 3, 5, 7]]);
        let s = maximal_trivial_structure(&topcol2()).unwrap();
        assert_eq!(s.p, 4);
        assert_eq!(
            s.blocks,
            vec![vec![0, 4], vec![1, 5], vec![2, 6], vec![3, 7]]
        );
    }

    #[test]
    fn collapse_of_topcol2() {
        let p = topcol2();
        let s = maximal_trivial_structure(&p).unwrap();
        let c = combinatorial_collapse(&p, &s).unwrap();
        assert_eq!(c, pat("4: 0 2 | 0 1 3"));
    }

    #[test]
    fn collapse_drops_singleton_meets() {
        let p = pat("4: 0 1 2 | 1 3");
        let s = maximal_trivial_structure(&p).unwrap();
        assert_eq!(s.p, 2);
        assert_eq!(combinatorial_collapse(&p, &s).unwrap(), pat("2: 0 1"));
        let s = maximal_trivial_structure(&p2()).unwrap();
        assert_eq!(combinatorial_collapse(&p2(), &s).unwrap(), pat("2: 0 1"));
    }

    #[test]
    fn strongly_collapsible_p2() {
        let cert = is_strongly_collapsible(&p2()).unwrap();
        assert_eq!(cert.factors, vec![2, 2]);
        assert_eq!(cert.patterns, vec![pat("2: 0 1"), p2()]);
        cert.verify().unwrap();
    }

    #[test]
    fn strongly_collapsible_topcol2_chain() {
        let cert = is_strongly_collapsible(&topcol2()).unwrap();
        assert_eq!(cert.factors, vec![2, 2, 2]);
        assert_eq!(
            cert.patterns,
            vec![pat("2: 0 1"), pat("4: 0 2 | 0 1 3"), topcol2()]
        );
        cert.verify().unwrap();
    }

    #[test]
    fn exemples4_is_not_collapsible() {
        assert!(is_strongly_collapsible(&exemples4()).is_none());
        assert!(!crate::entropy::is_zero_entropy_spectral(&exemples4()));
    }

    #[test]
    fn hull_point_examples() {
        assert_eq!(hull_points(&exemples4(), &[0, 5]), vec![0, 1, 4, 5]);
        assert_eq!(hull_points(&exemples4(), &[3]), vec![3]);
        assert_eq!(hull_points(&topcol2(), &[0, 4]), vec![0, 4]);
    }

    #[test]
    fn certificate_json_shape() {
        let cert = is_strongly_collapsible(&p2()).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        assert!(json.starts_with("{\"factors\":[2,2],\"patterns\":"));
        let back: CollapseCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn tampered_certificate_fails_audit() {
        let mut cert = is_strongly_collapsible(&topcol2()).unwrap();
        cert.patterns[1] = pat("4: 0 1 | 1 2 | 2 3");
        assert!(cert.verify().is_err());
    }
}
