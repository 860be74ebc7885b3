//! 2-explosions: the inverse of collapsing. Doubles a pattern under an
//! explicit lift policy and post-verifies that collapsing the result via
//! its maximal structure recovers the input.

use crate::collapse::{combinatorial_collapse, maximal_trivial_structure};
use crate::error::{Error, Result};
use crate::pattern::Pattern;

/// How the points of each component are lifted into the doubled pattern.
///
/// The lift rules are deterministic reconstructions; the verifier (collapse
/// round trip plus endpoint accounting) is the source of truth, with a
/// bounded backtracking search over custom assignments as fallback.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftPolicy {
    /// Keeps the endpoint count; every point of valence >= 2 has its lifts
    /// split across both copies.
    NonExpanding,
    /// Expanding explosion at a simplicial pivot: the pivot gains one
    /// valence and its high copy becomes a fresh endpoint.
    Ee2 { pivot: usize },
    /// Explicit high/low choice per (component, member), both in canonical
    /// component order.
    Custom(Vec<Vec<bool>>),
}

/// The single-component pattern on `{0..p0-1}`.
pub fn base_pattern(p0: usize) -> Pattern {
    assert!(p0 >= 1, "base pattern needs a positive period");
    Pattern::validate(p0, vec![(0..p0).collect()]).expect("trivial pattern is valid")
}

fn membership(pattern: &Pattern) -> Vec<Vec<usize>> {
    let mut memb = vec![Vec::new(); pattern.period()];
    for (ci, c) in pattern.components().iter().enumerate() {
        for &x in c {
            memb[x].push(ci);
        }
    }
    memb
}

fn set_high(pattern: &Pattern, high: &mut [Vec<bool>], ci: usize, point: usize) {
    let pos = pattern.components()[ci]
        .binary_search(&point)
        .expect("point belongs to component");
    high[ci][pos] = true;
}

fn lex_assignment(pattern: &Pattern, policy: &LiftPolicy) -> Result<Vec<Vec<bool>>> {
    let comps = pattern.components();
    let mut high: Vec<Vec<bool>> = comps.iter().map(|c| vec![false; c.len()]).collect();
    let memb = membership(pattern);
    match policy {
        LiftPolicy::Custom(a) => {
            if a.len() != comps.len() || a.iter().zip(comps).any(|(r, c)| r.len() != c.len()) {
                return Err(Error::PolicyMismatch(
                    "custom assignment shape does not match components".into(),
                ));
            }
            high = a.clone();
        }
        LiftPolicy::NonExpanding => {
            for (x, owners) in memb.iter().enumerate() {
                match owners.len() {
                    0 | 1 => {}
                    // split across both copies; one component takes the
                    // high copy, chosen as the lexicographically largest
                    _ => set_high(pattern, &mut high, *owners.last().unwrap(), x),
                }
            }
        }
        LiftPolicy::Ee2 { pivot } => {
            if comps.iter().any(|c| c.len() != 2) {
                return Err(Error::PolicyMismatch(
                    "EE2 needs a simplicial pattern".into(),
                ));
            }
            if *pivot >= pattern.period() {
                return Err(Error::PolicyMismatch(format!("pivot {pivot} out of range")));
            }
            let max_valence = memb.iter().map(Vec::len).max().unwrap_or(0);
            if memb[*pivot].len() != max_valence {
                return Err(Error::PolicyMismatch(format!(
                    "pivot {pivot} does not attain the maximum valence"
                )));
            }
            if max_valence >= 3 && memb.iter().filter(|o| o.len() == max_valence).count() > 1 {
                return Err(Error::PolicyMismatch(
                    "maximum valence is not attained at a unique point".into(),
                ));
            }
            for (x, owners) in memb.iter().enumerate() {
                if x == *pivot || owners.len() <= 1 {
                    continue; // pivot and endpoints stay low
                }
                set_high(pattern, &mut high, *owners.last().unwrap(), x);
            }
        }
    }
    Ok(high)
}

fn build_candidate(pattern: &Pattern, high: &[Vec<bool>]) -> Result<Pattern> {
    let m = pattern.period();
    let mut components: Vec<Vec<usize>> = (0..m).map(|j| vec![j, j + m]).collect();
    for (c, flags) in pattern.components().iter().zip(high) {
        let lifted: Vec<usize> = c
            .iter()
            .zip(flags)
            .map(|(&x, &h)| if h { x + m } else { x })
            .collect();
        components.push(lifted);
    }
    Pattern::validate(2 * m, components)
}

fn verify_candidate(pattern: &Pattern, policy: &LiftPolicy, candidate: &Pattern) -> bool {
    let m = pattern.period();
    let structure = match maximal_trivial_structure(candidate) {
        Some(s) if s.p == m => s,
        _ => return false,
    };
    match combinatorial_collapse(candidate, &structure) {
        Ok(c) if c == *pattern => {}
        _ => return false,
    }
    let old = pattern.endpoints().len();
    let new = candidate.endpoints().len();
    match policy {
        LiftPolicy::NonExpanding => new == old,
        // a valence-1 pivot stops being an endpoint while its high copy
        // becomes one, so the count only grows for interior pivots
        LiftPolicy::Ee2 { pivot } => new == old + usize::from(pattern.valence(*pivot) >= 2),
        LiftPolicy::Custom(_) => true,
    }
}

const SEARCH_BIT_CAP: usize = 22;

fn backtrack_search(pattern: &Pattern, policy: &LiftPolicy) -> Option<Pattern> {
    let sizes: Vec<usize> = pattern.components().iter().map(Vec::len).collect();
    let bits: usize = sizes.iter().sum();
    if bits > SEARCH_BIT_CAP {
        return None;
    }
    for mask in 0u64..(1u64 << bits) {
        let mut high: Vec<Vec<bool>> = Vec::with_capacity(sizes.len());
        let mut offset = 0;
        for &s in &sizes {
            high.push((0..s).map(|i| mask >> (offset + i) & 1 == 1).collect());
            offset += s;
        }
        if let Ok(candidate) = build_candidate(pattern, &high) {
            if verify_candidate(pattern, policy, &candidate) {
                return Some(candidate);
            }
        }
    }
    None
}

/// Doubles the period: every point `j` becomes a block `{j, j+m}` (a full
/// component) and every old component is lifted by the policy's low/high
/// choices.
pub fn double(pattern: &Pattern, policy: &LiftPolicy) -> Result<Pattern> {
    let m = pattern.period();
    if m == 1 {
        return Ok(base_pattern(2));
    }
    let high = lex_assignment(pattern, policy)?;
    let candidate = build_candidate(pattern, &high)?;
    if verify_candidate(pattern, policy, &candidate) {
        return Ok(candidate);
    }
    if !matches!(policy, LiftPolicy::Custom(_)) {
        if let Some(found) = backtrack_search(pattern, policy) {
            return Ok(found);
        }
    }
    Err(Error::VerificationFailed(format!(
        "no valid 2-explosion of {pattern} under {policy:?}"
    )))
}

/// Folds [`double`] over `base_pattern(p0)`.
pub fn explode_sequence(p0: usize, policies: &[LiftPolicy]) -> Result<Pattern> {
    let mut pattern = base_pattern(p0);
    for policy in policies {
        pattern = double(&pattern, policy)?;
    }
    Ok(pattern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::is_strongly_collapsible;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    fn p2() -> Pattern {
        pat("4: 0 2 | 0 1 | 1 3")
    }

    fn p3() -> Pattern {
        pat("8: 0 4 | 1 5 | 2 6 | 3 7 | 0 2 | 0 1 | 3 5")
    }

    #[test]
    fn double_trivial_three() {
        let d = double(&base_pattern(3), &LiftPolicy::NonExpanding).unwrap();
        assert_eq!(d, pat("6: 0 1 2 | 0 3 | 1 4 | 2 5"));
    }

    #[test]
    fn double_p2_with_ee2_gives_p3() {
        let d = double(&p2(), &LiftPolicy::Ee2 { pivot: 0 }).unwrap();
        assert_eq!(d, p3());
    }

    #[test]
    fn double_p3_nonexpanding() {
        let d = double(&p3(), &LiftPolicy::NonExpanding).unwrap();
        let mut expected: Vec<Vec<usize>> = (0..8).map(|j| vec![j, j + 8]).collect();
        expected.extend([
            vec![4, 8],
            vec![5, 9],
            vec![6, 10],
            vec![7, 11],
            vec![0, 2],
            vec![0, 1],
            vec![3, 13],
        ]);
        assert_eq!(d, Pattern::validate(16, expected).unwrap());
        let mut endpoints = d.endpoints();
        endpoints.sort_unstable();
        assert_eq!(endpoints, vec![12, 14, 15]);
        let s = maximal_trivial_structure(&d).unwrap();
        assert_eq!(combinatorial_collapse(&d, &s).unwrap(), p3());
    }

    #[test]
    fn doubling_the_two_point_base_yields_p2() {
        for policy in [LiftPolicy::NonExpanding, LiftPolicy::Ee2 { pivot: 0 }] {
            let d = double(&base_pattern(2), &policy).unwrap();
            assert!(d.equivalent(&p2()));
        }
    }

    #[test]
    fn base_pattern_shapes() {
        assert_eq!(base_pattern(3), pat("3: 0 1 2"));
        assert_eq!(base_pattern(1), pat("1: 0"));
        assert_eq!(
            base_pattern(5).star_class(),
            crate::pattern::StarClass::TrivialStar(5)
        );
    }

    #[test]
    fn explode_sequence_examples() {
        assert_eq!(
            explode_sequence(3, &[LiftPolicy::NonExpanding]).unwrap(),
            pat("6: 0 1 2 | 0 3 | 1 4 | 2 5")
        );
        assert_eq!(explode_sequence(4, &[]).unwrap(), base_pattern(4));
        let p = explode_sequence(2, &[LiftPolicy::Ee2 { pivot: 0 }]).unwrap();
        assert!(p.equivalent(&p2()));
    }

    #[test]
    fn ee2_rejects_non_simplicial_input() {
        let err = double(
            &pat("6: 0 1 | 4 5 | 1 2 3 4"),
            &LiftPolicy::Ee2 { pivot: 1 },
        );
        assert!(matches!(err, Err(Error::PolicyMismatch(_))));
    }

    #[test]
    fn endpoint_accounting() {
        let d = double(&p2(), &LiftPolicy::NonExpanding).unwrap();
        assert_eq!(d.endpoints().len(), p2().endpoints().len());
        let e = double(&p2(), &LiftPolicy::Ee2 { pivot: 0 }).unwrap();
        assert_eq!(e.endpoints().len(), p2().endpoints().len() + 1);
    }

    #[test]
    fn doubles_stay_zero_entropy() {
        let mut p = base_pattern(3);
        for _ in 0..3 {
            p = double(&p, &LiftPolicy::NonExpanding).unwrap();
            assert!(is_strongly_collapsible(&p).is_some());
            assert!(crate::entropy::is_zero_entropy_spectral(&p));
        }
        assert_eq!(p.period(), 24);
    }

    #[test]
    fn collapse_roundtrip_on_corpus() {
        let corpus = [
            base_pattern(2),
            base_pattern(3),
            base_pattern(5),
            p2(),
            p3(),
            pat("8: 0 2 6 | 0 1 3 4 5 7"),
            pat("6: 0 1 2 | 0 3 | 1 4 | 2 5"),
        ];
        for p in &corpus {
            let d = double(p, &LiftPolicy::NonExpanding).unwrap();
            let s = maximal_trivial_structure(&d).unwrap();
            assert_eq!(s.p, p.period());
            assert_eq!(combinatorial_collapse(&d, &s).unwrap(), *p);
        }
    }
}
