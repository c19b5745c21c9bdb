use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GraphError, MultiGraph};

/// Samples a simple `d`-regular graph on `n` vertices with girth at least
/// `min_girth`, or `Ok(None)` after `max_tries` failed attempts.
///
/// Each attempt runs the pairing model incrementally: a random unmatched
/// point is paired with a uniformly random partner among those that keep the
/// partial graph simple and free of cycles shorter than `min_girth`. An
/// attempt that runs out of admissible partners is rejected and restarted.
pub fn random_regular(
    n: usize,
    d: usize,
    min_girth: usize,
    seed: u64,
    max_tries: u64,
) -> Result<Option<MultiGraph>, GraphError> {
    if (n * d) % 2 == 1 {
        return Err(GraphError::Infeasible(format!("n·d = {} is odd", n * d)));
    }
    if d < 3 || d >= n {
        return Err(GraphError::Infeasible(format!(
            "need 3 ≤ d < n, got d = {d}, n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_tries {
        if let Some(edges) = attempt(n, d, min_girth, &mut rng) {
            let names = (1..=n)
                .map(|i| format!("v{i:0w$}", w = n.to_string().len()))
                .collect();
            let g = MultiGraph::from_indices(names, edges).canonicalize().0;
            debug_assert!(g.is_simple() && g.is_regular(d));
            return Ok(Some(g));
        }
    }
    Ok(None)
}

fn attempt(
    n: usize,
    d: usize,
    min_girth: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<(usize, usize)>> {
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
    points.shuffle(rng);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges = Vec::with_capacity(n * d / 2);
    while let Some(a) = points.pop() {
        let candidates: Vec<usize> = (0..points.len())
            .filter(|&i| {
                let b = points[i];
                b != a
                    && !adj[a].contains(&b)
                    && (min_girth <= 3 || !within(&adj, a, b, min_girth - 2))
            })
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let i = candidates[rng.gen_range(0..candidates.len())];
        let b = points.swap_remove(i);
        adj[a].push(b);
        adj[b].push(a);
        edges.push((a, b));
    }
    Some(edges)
}

/// Whether `b` is reachable from `a` in at most `limit` hops.
fn within(adj: &[Vec<usize>], a: usize, b: usize, limit: usize) -> bool {
    let mut frontier = vec![a];
    let mut seen = vec![a];
    for _ in 0..limit {
        let mut next = Vec::new();
        for &x in &frontier {
            for &y in &adj[x] {
                if y == b {
                    return true;
                }
                if !seen.contains(&y) {
                    seen.push(y);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    false
}
