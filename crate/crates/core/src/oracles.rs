//! Independent reference implementations used to cross-check the fast paths.
//!
//! Everything here deliberately avoids the code it checks: hop counts come
//! from matrix-style relaxation instead of BFS, Hausdorff distances from a
//! raw double scan, and minimum cuts from exhaustive subset enumeration.
//! The implementations are slow and guarded to small instances; they exist
//! so the property campaigns and the acceptance suite can demand exact
//! agreement.

use crate::error::{CoarseError, Result};
use crate::metric::{ExtLength, FiniteMetricSpace, PointId, Subset};

const RELAXATION_LIMIT: usize = 256;
const ENUMERATION_LIMIT: usize = 20;

/// All-pairs hop counts at scale `r` by iterated relaxation: start from the
/// one-step table and relax n times. `None` marks unreachable pairs.
pub fn hop_distances_by_relaxation(
    space: &FiniteMetricSpace,
    r: f64,
) -> Result<Vec<Vec<Option<u32>>>> {
    let n = space.len();
    if n > RELAXATION_LIMIT {
        return Err(CoarseError::InvalidInput(format!(
            "relaxation oracle is limited to {RELAXATION_LIMIT} points, got {n}"
        )));
    }
    if !(r > 0.0) {
        return Err(CoarseError::InvalidScale {
            name: "r",
            value: r,
            reason: "must be positive",
        });
    }
    const UNREACHED: u32 = u32::MAX;
    let mut table = vec![vec![UNREACHED; n]; n];
    for i in 0..n {
        table[i][i] = 0;
        for j in 0..n {
            if j != i && space.dist(i, j) < r {
                table[i][j] = 1;
            }
        }
    }
    for _round in 0..n {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut best = table[i][j];
                for k in 0..n {
                    if table[i][k] != UNREACHED && table[k][j] == 1 {
                        let via = table[i][k] + 1;
                        if via < best {
                            best = via;
                        }
                    }
                }
                if best != table[i][j] {
                    table[i][j] = best;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(table
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| if v == UNREACHED { None } else { Some(v) })
                .collect()
        })
        .collect())
}

/// Hausdorff distance by the definition: the double supremum of pointwise
/// minima, written out directly.
pub fn hausdorff_by_double_scan(
    space: &FiniteMetricSpace,
    a: &Subset,
    b: &Subset,
) -> ExtLength {
    let a_ids: Vec<PointId> = a.iter().collect();
    let b_ids: Vec<PointId> = b.iter().collect();
    match (a_ids.is_empty(), b_ids.is_empty()) {
        (true, true) => return ExtLength::ZERO,
        (true, false) | (false, true) => return ExtLength::Infinite,
        _ => {}
    }
    let directed = |from: &[PointId], to: &[PointId]| -> f64 {
        let mut sup = 0.0f64;
        for &p in from {
            let mut inf = f64::INFINITY;
            for &q in to {
                let d = space.dist(p, q);
                if d < inf {
                    inf = d;
                }
            }
            if inf > sup {
                sup = inf;
            }
        }
        sup
    };
    ExtLength::Finite(directed(&a_ids, &b_ids).max(directed(&b_ids, &a_ids)))
}

/// Smallest vertex set outside `a ∪ b` disconnecting `a` from `b` at scale
/// `r`, found by enumerating candidate sets in increasing cardinality and,
/// within a cardinality, in lexicographic id order. Connectivity after
/// removal is decided by a local depth-first search.
pub fn min_cut_by_enumeration(
    space: &FiniteMetricSpace,
    a: &Subset,
    b: &Subset,
    r: f64,
) -> Result<Subset> {
    space.check_subset(a)?;
    space.check_subset(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(CoarseError::Precondition(
            "cut enumeration needs nonempty sides".to_string(),
        ));
    }
    if !a.intersection(b).is_empty() {
        return Err(CoarseError::NoInteriorCut("sides overlap".to_string()));
    }
    let n = space.len();
    let free: Vec<PointId> = (0..n).filter(|&v| !a.contains(v) && !b.contains(v)).collect();
    if free.len() > ENUMERATION_LIMIT {
        return Err(CoarseError::InvalidInput(format!(
            "enumeration oracle is limited to {ENUMERATION_LIMIT} free vertices, got {}",
            free.len()
        )));
    }
    if !(r > 0.0) {
        return Err(CoarseError::InvalidScale {
            name: "r",
            value: r,
            reason: "must be positive",
        });
    }

    let connects = |removed: &[bool]| -> bool {
        // Depth-first over the strict r-neighborhoods, kept separate from
        // the ChainGraph machinery on purpose.
        let mut seen = vec![false; n];
        let mut stack: Vec<PointId> = a.iter().filter(|&x| !removed[x]).collect();
        for &x in &stack {
            seen[x] = true;
        }
        while let Some(u) = stack.pop() {
            if b.contains(u) {
                return true;
            }
            for v in 0..n {
                if !seen[v] && !removed[v] && v != u && space.dist(u, v) < r {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        false
    };

    // Direct adjacency between the sides defeats every interior cut.
    for x in a.iter() {
        for y in b.iter() {
            if space.dist(x, y) < r {
                return Err(CoarseError::NoInteriorCut(format!(
                    "points {x} and {y} are directly chained at scale {r}"
                )));
            }
        }
    }

    let mut removed = vec![false; n];
    if !connects(&removed) {
        return Ok(Subset::named("MIN_CUT", []));
    }

    fn next_combination(chosen: &mut [usize], n: usize) -> bool {
        let k = chosen.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if chosen[i] != n - k + i {
                chosen[i] += 1;
                for j in (i + 1)..k {
                    chosen[j] = chosen[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    for size in 1..=free.len() {
        let mut chosen: Vec<usize> = (0..size).collect();
        loop {
            for flag in removed.iter_mut() {
                *flag = false;
            }
            for &idx in &chosen {
                removed[free[idx]] = true;
            }
            if !connects(&removed) {
                return Ok(Subset::named("MIN_CUT", chosen.iter().map(|&i| free[i])));
            }
            if !next_combination(&mut chosen, free.len()) {
                break;
            }
        }
    }
    unreachable!("removing every free vertex disconnects non-adjacent sides")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::chain_metric;
    use crate::cuts::find_min_cut;
    use crate::metric::Norm;

    fn line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_coords(
            "line",
            (0..n).map(|i| vec![i as f64]).collect(),
            Norm::L2,
        )
        .unwrap()
    }

    #[test]
    fn relaxation_matches_bfs_on_a_line() {
        let space = line(12);
        let table = hop_distances_by_relaxation(&space, 2.0).unwrap();
        for x in 0..12 {
            for y in 0..12 {
                assert_eq!(table[x][y], chain_metric(&space, x, y, 2.0).unwrap());
            }
        }
    }

    #[test]
    fn double_scan_matches_fast_hausdorff() {
        let space = line(15);
        let a = Subset::from_ids([0, 3, 7]);
        let b = Subset::from_ids([2, 8, 14]);
        assert_eq!(
            hausdorff_by_double_scan(&space, &a, &b),
            space.hausdorff_distance(&a, &b)
        );
        assert_eq!(
            hausdorff_by_double_scan(&space, &Subset::empty(), &b),
            ExtLength::Infinite
        );
    }

    #[test]
    fn enumeration_matches_flow_on_a_path() {
        let space = line(7);
        let a = Subset::from_ids([0]);
        let b = Subset::from_ids([6]);
        let enumerated = min_cut_by_enumeration(&space, &a, &b, 1.5).unwrap();
        let flowed = find_min_cut(&space, &a, &b, 1.5).unwrap();
        assert_eq!(enumerated.len(), 1);
        assert_eq!(enumerated.len(), flowed.len());
    }
}
