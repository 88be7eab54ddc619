//! Outlier-match rejection from pairwise neighbor constraints.
//!
//! Two matches are consistent when the distance between their query
//! vertices matches the distance between their target vertices within the
//! neighbor threshold: a rigid motion preserves pairwise distances, so two
//! correct matches always agree while a wrong match disagrees with most
//! others. Matches whose consistency count stays below an `eta` fraction
//! of the match count are greedily removed, worst first.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::SemanticGraph;
use crate::matching::MatchSet;

/// Default size cap for [`brute_force_max_consistent`].
pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 18;

/// What the rejection-loop guard compares a match's consistency count
/// against: an `eta` fraction of the current survivor count, or of the
/// original match count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaDenominator {
    Current,
    Original,
}

/// Binary m×m pairwise-consistency matrix with cached row sums. Symmetric
/// with a unit diagonal by construction.
#[derive(Debug, Clone)]
pub struct ConstraintMatrix {
    size: usize,
    bits: Vec<u8>,
    row_sums: Vec<u32>,
}

impl ConstraintMatrix {
    /// Builds the matrix from a symmetric pairwise predicate. The predicate
    /// is evaluated for every (i, j); it must be symmetric for the matrix
    /// invariants to hold.
    pub fn from_pairwise<F>(size: usize, pred: F) -> Self
    where
        F: Fn(usize, usize) -> bool + Sync + Send,
    {
        let pred = &pred;
        let bits: Vec<u8> = (0..size)
            .into_par_iter()
            .flat_map_iter(|i| (0..size).map(move |j| u8::from(pred(i, j))))
            .collect();
        let row_sums = bits
            .chunks_exact(size.max(1))
            .map(|row| row.iter().map(|&b| b as u32).sum())
            .collect();
        Self { size, bits, row_sums }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.size + j] != 0
    }

    /// Row sums V (the diagonal self-consistency is included).
    pub fn row_sums(&self) -> &[u32] {
        &self.row_sums
    }
}

/// Builds the neighbor-constraint matrix for a match set: entry (i, j) is 1
/// iff the query-side distance of matches i and j agrees with their
/// target-side distance within `nei_threshold` (strict):
/// `|Dq(qi, qj) − Dt(ti, tj)| < nei_threshold`. Two far-apart pairs with
/// equal distances agree just like two near pairs; the diagonal is always 1.
///
/// Note the paper states the constraint both as this distance-difference
/// test (its pseudocode) and as equality of boolean neighbor predicates;
/// only the distance-difference form separates wrong matches from correct
/// ones at any scene scale, so that is what is implemented.
pub fn build_constraint_matrix(
    gq: &SemanticGraph,
    gt: &SemanticGraph,
    m0: &MatchSet,
    nei_threshold: f64,
) -> Result<ConstraintMatrix> {
    if m0.is_empty() {
        return Err(Error::EmptyMatchSet);
    }
    if !(nei_threshold > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "nei_threshold must be positive, got {nei_threshold}"
        )));
    }
    m0.validate(gq, gt)?;
    let pairs = &m0.pairs;
    let dq = gq.distance_matrix();
    let dt = gt.distance_matrix();
    Ok(ConstraintMatrix::from_pairwise(pairs.len(), |i, j| {
        let (qi, ti) = pairs[i];
        let (qj, tj) = pairs[j];
        (dq[(qi, qj)] - dt[(ti, tj)]).abs() < nei_threshold
    }))
}

/// Runs the greedy rejection loop on a prebuilt constraint matrix and
/// returns the surviving match indices in original order.
///
/// Each round removes the surviving match with the smallest consistency
/// count V (ties: lowest index) while that count is strictly below
/// `eta` times the denominator; removing a match subtracts its matrix row
/// from V, so V always counts consistencies against survivors only. On
/// return every survivor satisfies `V_i >= eta * survivor_count` under the
/// `Current` denominator.
pub fn reject_indices(
    mat: &ConstraintMatrix,
    eta: f64,
    denominator: EtaDenominator,
) -> Result<Vec<usize>> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eta must be in (0, 1), got {eta}"
        )));
    }
    let m = mat.size();
    let mut v: Vec<i64> = mat.row_sums().iter().map(|&s| s as i64).collect();
    let mut alive = vec![true; m];
    let mut alive_count = m;
    while alive_count > 0 {
        // argmin over survivors, ties to the lowest index
        let mut worst = usize::MAX;
        let mut worst_v = i64::MAX;
        for i in 0..m {
            if alive[i] && v[i] < worst_v {
                worst = i;
                worst_v = v[i];
            }
        }
        let denom = match denominator {
            EtaDenominator::Current => alive_count,
            EtaDenominator::Original => m,
        };
        if (worst_v as f64) < eta * denom as f64 {
            for j in 0..m {
                if alive[j] {
                    v[j] -= i64::from(mat.get(worst, j));
                }
            }
            alive[worst] = false;
            alive_count -= 1;
        } else {
            break;
        }
    }
    Ok((0..m).filter(|&i| alive[i]).collect())
}

/// Neighbor-constraint rejection with the `Current` denominator (the guard
/// tracks the shrinking survivor count).
pub fn reject(
    gq: &SemanticGraph,
    gt: &SemanticGraph,
    m0: &MatchSet,
    nei_threshold: f64,
    eta: f64,
) -> Result<MatchSet> {
    reject_with(gq, gt, m0, nei_threshold, eta, EtaDenominator::Current)
}

/// Neighbor-constraint rejection with an explicit guard denominator.
/// Survivors keep their original order. An empty result is valid and means
/// every match was rejected (localization failure upstream).
pub fn reject_with(
    gq: &SemanticGraph,
    gt: &SemanticGraph,
    m0: &MatchSet,
    nei_threshold: f64,
    eta: f64,
    denominator: EtaDenominator,
) -> Result<MatchSet> {
    let mat = build_constraint_matrix(gq, gt, m0, nei_threshold)?;
    let survivors = reject_indices(&mat, eta, denominator)?;
    Ok(m0.select(&survivors))
}

/// Exhaustive maximum fully-consistent subset (maximum clique on the
/// consistency graph), for test-oracle use on small instances. Ties are
/// broken lexicographically on the sorted index sequence. Errors when the
/// matrix is larger than `limit` (and `limit` is capped at 24 to bound the
/// 2^m search).
pub fn brute_force_max_consistent(mat: &ConstraintMatrix, limit: usize) -> Result<Vec<usize>> {
    let m = mat.size();
    if limit > 24 {
        return Err(Error::InvalidParameter(format!(
            "brute-force limit {limit} exceeds hard cap 24"
        )));
    }
    if m > limit {
        return Err(Error::SizeLimitExceeded { size: m, limit });
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    // Row bitmasks, diagonal included.
    let adj: Vec<u32> = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| mat.get(i, j))
                .fold(0u32, |acc, j| acc | (1 << j))
        })
        .collect();
    // valid[s] = subset s is pairwise consistent; built by peeling the
    // lowest set bit, whose row must cover the whole subset.
    let mut valid = vec![false; 1usize << m];
    valid[0] = true;
    let mut best: u32 = 0;
    let mut best_count = 0u32;
    for mask in 1u32..(1u32 << m) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let ok = valid[rest as usize] && (adj[low] & mask) == mask;
        valid[mask as usize] = ok;
        if !ok {
            continue;
        }
        let count = mask.count_ones();
        if count > best_count {
            best = mask;
            best_count = count;
        } else if count == best_count && mask != best {
            // Lexicographic tie-break on sorted index sequences: the smaller
            // sequence owns the lowest set bit of the symmetric difference.
            let diff = mask ^ best;
            if mask & (1u32 << diff.trailing_zeros()) != 0 {
                best = mask;
            }
        }
    }
    Ok((0..m).filter(|&i| best & (1 << i) != 0).collect())
}
