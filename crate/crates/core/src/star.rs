//! Zero-entropy star patterns: the `(n, k)` existence predicate and the
//! certified constructors for every admissible pair.

use crate::collapse::is_strongly_collapsible;
use crate::error::{Error, Result};
use crate::explode::{base_pattern, double, LiftPolicy};
use crate::pattern::Pattern;

/// Which constructive case an admissible pair `(n, k)` falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarZeroCase {
    /// `n = k * 2^q`: rigid rotation doubled `q` times.
    RotationDoubling { n: usize, k: usize, q: usize },
    /// `n = 2^q` with `q >= k`: the simplicial chain, doubled non-expandingly.
    SimplicialChain { n: usize, k: usize, q: usize },
    /// `n = 2^(k-1)`: the simplicial `(k-1)`-chain with its pivot split open.
    CentralSplit { n: usize, k: usize },
}

/// Whether a zero-entropy `k`-star pattern of period `n` exists, with the
/// orbit required to visit every branch: true iff `n = k * 2^q` or
/// `n = 2^q` with `q >= k - 1`.
pub fn zero_possible(n: usize, k: usize) -> Result<bool> {
    if n < k || k < 3 {
        return Err(Error::BadRange { n, k });
    }
    let doubled_rotation = n.is_multiple_of(k) && (n / k).is_power_of_two();
    let tall_power = n.is_power_of_two() && n.trailing_zeros() as usize >= k - 1;
    Ok(doubled_rotation || tall_power)
}

/// The relaxed predicate where the orbit may miss branches: true iff
/// `n = l * 2^q` for some `1 <= l <= k`, i.e. the odd part of `n` is at
/// most `k`.
pub fn zero_possible_relaxed(n: usize, k: usize) -> bool {
    debug_assert!(n >= 1 && k >= 3);
    let odd_part = n >> n.trailing_zeros();
    odd_part <= k
}

fn check_star(pattern: &Pattern, k: usize, what: &str) -> Result<()> {
    if pattern.star_class().star_valence() != Some(k) {
        return Err(Error::VerificationFailed(format!(
            "{what}: expected a {k}-star, got {}",
            pattern.star_class()
        )));
    }
    if pattern.endpoints().len() != k.min(pattern.period()) {
        return Err(Error::VerificationFailed(format!(
            "{what}: endpoint count {} != {k}",
            pattern.endpoints().len()
        )));
    }
    if is_strongly_collapsible(pattern).is_none() {
        return Err(Error::VerificationFailed(format!(
            "{what}: not strongly collapsible"
        )));
    }
    Ok(())
}

fn bit_reverse(i: usize, q: usize) -> usize {
    (0..q).fold(0, |acc, b| (acc << 1) | ((i >> b) & 1))
}

/// Period `k * 2^q` non-simplicial `k`-star pattern in closed form: the
/// inner component `{0..k-1}` plus, on each branch `b`, a chain threaded in
/// `q`-bit-reversed order.
pub fn bitrev_pattern(k: usize, q: usize) -> Result<Pattern> {
    if k < 3 {
        return Err(Error::BadRange { n: k << q, k });
    }
    let levels = 1usize << q;
    let mut components: Vec<Vec<usize>> = vec![(0..k).collect()];
    for b in 0..k {
        for i in 0..levels - 1 {
            components.push(vec![
                b + k * bit_reverse(i, q),
                b + k * bit_reverse(i + 1, q),
            ]);
        }
    }
    let pattern = Pattern::validate(k << q, components)
        .map_err(|e| Error::VerificationFailed(format!("bitrev pattern invalid: {e}")))?;
    check_star(&pattern, k, "bitrev pattern")?;
    let cert = is_strongly_collapsible(&pattern).expect("checked above");
    if cert.factors[0] != k || cert.factors[1..].iter().any(|&f| f != 2) {
        return Err(Error::VerificationFailed(format!(
            "bitrev pattern has factors {:?}, expected ({k}, 2, ..)",
            cert.factors
        )));
    }
    Ok(pattern)
}

/// `P_k`: the period-`2^k` simplicial `k`-star pattern with pivot `0`, built
/// by repeated expanding 2-explosions at `0` from `P_2 = {{0,2},{0,1},{1,3}}`.
pub fn ee2_chain(k: usize) -> Result<Pattern> {
    if k < 2 {
        return Err(Error::BadRange { n: 1 << k, k });
    }
    let mut pattern =
        Pattern::validate(4, vec![vec![0, 2], vec![0, 1], vec![1, 3]]).expect("P_2 is valid");
    for _ in 2..k {
        pattern = double(&pattern, &LiftPolicy::Ee2 { pivot: 0 })?;
    }
    if pattern.period() != 1 << k || pattern.valence(0) != k {
        return Err(Error::VerificationFailed(format!(
            "EE2 chain for k = {k} has period {} and pivot valence {}",
            pattern.period(),
            pattern.valence(0)
        )));
    }
    check_star(&pattern, k, "EE2 chain")?;
    Ok(pattern)
}

/// Opens a simplicial pattern at its maximum-valence pivot: the pivot's
/// two-point components merge into one branching component, turning a
/// simplicial `(k-1)`-star of period `2^(k-1)` into a non-simplicial
/// `k`-star of the same period.
pub fn central_split(pattern: &Pattern) -> Result<Pattern> {
    if pattern.components().iter().any(|c| c.len() != 2) {
        return Err(Error::PivotNotFound);
    }
    let n = pattern.period();
    let kappa = (0..n).map(|x| pattern.valence(x)).max().unwrap_or(0);
    if kappa < 2 {
        return Err(Error::PivotNotFound);
    }
    let pivot = (0..n)
        .find(|&x| pattern.valence(x) == kappa)
        .expect("some point attains the maximum valence");
    let mut merged = vec![pivot];
    let mut components = Vec::new();
    for c in pattern.components() {
        if c.contains(&pivot) {
            merged.extend(c.iter().filter(|&&x| x != pivot));
        } else {
            components.push(c.clone());
        }
    }
    merged.sort_unstable();
    components.push(merged);
    let split = Pattern::validate(n, components)
        .map_err(|e| Error::VerificationFailed(format!("central split invalid: {e}")))?;
    check_star(&split, kappa + 1, "central split")?;
    Ok(split)
}

/// Whether the pattern certifies a zero-entropy map on a `k`-star, returning
/// the `k`; `None` when it does not.
///
/// Zero pattern entropy alone is not enough: the entropy-minimizing model of
/// a star-shaped pattern may live on a tree that is not a star (the hull of
/// the branching component can be realized with several vertices, as in an
/// H-shaped tree), and every model on the actual star can have positive
/// entropy. A certificate transfers to the star exactly when its valence
/// sequence is constant (rigid rotation doubled, period `k * 2^r`) or its
/// first explosion factor is 2 with `k <= r + 2` (the simplicial route,
/// period `2^(r+1)` with a possible final split at the pivot).
pub fn star_map_witness(pattern: &Pattern) -> Option<usize> {
    let k = pattern.star_class().star_valence()?;
    let cert = is_strongly_collapsible(pattern)?;
    let valences = cert.valences.as_ref()?; // every stage star-classified
    if *valences.last().unwrap() != k || cert.factors[1..].iter().any(|&f| f != 2) {
        return None;
    }
    let r = cert.depth();
    let t = (0..=r)
        .find(|&i| valences[i..].iter().all(|&v| v == k))
        .unwrap();
    if t == 0 || (cert.factors[0] == 2 && k <= r + 2) {
        Some(k)
    } else {
        None
    }
}

/// Classifies an admissible pair into its constructive case.
pub fn star_zero_case(n: usize, k: usize) -> Result<StarZeroCase> {
    if !zero_possible(n, k)? {
        return Err(Error::NotRepresentable { n, k });
    }
    if n.is_power_of_two() {
        let q = n.trailing_zeros() as usize;
        if q == k - 1 {
            return Ok(StarZeroCase::CentralSplit { n, k });
        }
        if q >= k {
            return Ok(StarZeroCase::SimplicialChain { n, k, q });
        }
    }
    let q = (n / k).trailing_zeros() as usize;
    Ok(StarZeroCase::RotationDoubling { n, k, q })
}

/// A certified zero-entropy `k`-star pattern of period `n`, or
/// `NotRepresentable` when no such pattern exists. `k = 2` is routed to
/// interval patterns.
pub fn star_zero_pattern(n: usize, k: usize) -> Result<Pattern> {
    if k == 2 {
        if !n.is_power_of_two() {
            return Err(Error::NotRepresentable { n, k });
        }
        let mut pattern = if n >= 4 {
            ee2_chain(2)?
        } else {
            base_pattern(n)
        };
        while pattern.period() < n {
            pattern = double(&pattern, &LiftPolicy::NonExpanding)?;
        }
        check_star(&pattern, 2, "interval chain")?;
        return Ok(pattern);
    }
    let pattern = match star_zero_case(n, k)? {
        StarZeroCase::CentralSplit { .. } => central_split(&ee2_chain(k - 1)?)?,
        StarZeroCase::SimplicialChain { q, .. } => {
            let mut pattern = ee2_chain(k)?;
            for _ in k..q {
                pattern = double(&pattern, &LiftPolicy::NonExpanding)?;
            }
            pattern
        }
        StarZeroCase::RotationDoubling { q, .. } => bitrev_pattern(k, q)?,
    };
    check_star(&pattern, k, "star construction")?;
    Ok(pattern)
}
