//! Capacitated bipartite matching: each left vertex `i` needs `demand[i]`
//! distinct right partners, all partner sets disjoint.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("Hall condition fails: left set {deficient:?} needs {demand} partners but sees only {neighbors}")]
pub struct HallViolation {
    /// Left indices whose total demand exceeds their joint neighbourhood.
    pub deficient: Vec<usize>,
    pub demand: usize,
    pub neighbors: usize,
}

/// Assigns each left vertex its demanded number of right vertices, or returns a
/// deficient left set.
///
/// `adj[i]` lists the right vertices in `[0, n_right)` allowed for left `i`.
/// Augmenting paths are searched breadth-first; the left set reachable from a
/// stuck vertex is the certificate.
pub fn generalized_matching(
    adj: &[Vec<usize>],
    demand: &[usize],
    n_right: usize,
) -> Result<Vec<Vec<usize>>, HallViolation> {
    assert_eq!(adj.len(), demand.len());
    let n_left = adj.len();
    let mut owner = vec![usize::MAX; n_right];
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); n_left];
    // Right vertex through which the search reached each right/left vertex.
    let mut via = vec![usize::MAX; n_right];
    let mut entered_by = vec![usize::MAX; n_left];
    let mut seen_left = vec![usize::MAX; n_left];
    for i in 0..n_left {
        while assigned[i].len() < demand[i] {
            let stamp = i * (n_right + 1) + assigned[i].len();
            seen_left[i] = stamp;
            let mut queue = VecDeque::from([i]);
            let mut reached = vec![i];
            let mut touched = Vec::new();
            let mut free_end = None;
            'search: while let Some(u) = queue.pop_front() {
                for &r in &adj[u] {
                    if owner[r] == u || via[r] != usize::MAX {
                        continue;
                    }
                    via[r] = u;
                    touched.push(r);
                    let w = owner[r];
                    if w == usize::MAX {
                        free_end = Some(r);
                        break 'search;
                    }
                    if seen_left[w] != stamp {
                        seen_left[w] = stamp;
                        entered_by[w] = r;
                        reached.push(w);
                        queue.push_back(w);
                    }
                }
            }
            let outcome = free_end.ok_or(());
            if let Ok(mut r) = outcome {
                loop {
                    let u = via[r];
                    owner[r] = u;
                    assigned[u].push(r);
                    if u == i {
                        break;
                    }
                    let give_up = entered_by[u];
                    assigned[u].retain(|&x| x != give_up);
                    r = give_up;
                }
            }
            for &r in &touched {
                via[r] = usize::MAX;
            }
            if outcome.is_err() {
                reached.sort_unstable();
                let mut nbrs: Vec<usize> =
                    reached.iter().flat_map(|&a| adj[a].iter().copied()).collect();
                nbrs.sort_unstable();
                nbrs.dedup();
                let demand = reached.iter().map(|&a| demand[a]).sum();
                return Err(HallViolation {
                    deficient: reached,
                    demand,
                    neighbors: nbrs.len(),
                });
            }
        }
    }
    for a in assigned.iter_mut() {
        a.sort_unstable();
    }
    Ok(assigned)
}

/// Plain maximum-cardinality-style perfect matching of the left side.
pub fn perfect_left_matching(adj: &[Vec<usize>], n_right: usize) -> Result<Vec<usize>, HallViolation> {
    let demand = vec![1; adj.len()];
    generalized_matching(adj, &demand, n_right).map(|a| a.into_iter().map(|v| v[0]).collect())
}

/// Checks that a claimed certificate really violates the generalised Hall condition.
pub fn is_hall_violation(adj: &[Vec<usize>], demand: &[usize], left: &[usize]) -> bool {
    let mut nbrs: Vec<usize> = left.iter().flat_map(|&a| adj[a].iter().copied()).collect();
    nbrs.sort_unstable();
    nbrs.dedup();
    left.iter().map(|&a| demand[a]).sum::<usize>() > nbrs.len()
}
