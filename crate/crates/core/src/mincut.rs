//! Global minimum cuts of small dense weighted graphs.

use alloc::vec::Vec;

/// A cut `(S, V \ S)` with `S` the smaller side (ties keep the side that
/// contains the lowest vertex index out of `S`).
#[derive(Debug, Clone, PartialEq)]
pub struct MinCut {
    pub weight: f64,
    pub side: Vec<usize>,
}

/// Connected components of the graph with an edge wherever `w[i*n+j] > eps`,
/// each sorted, ordered by smallest member.
pub fn components(w: &[f64], n: usize, eps: f64) -> Vec<Vec<usize>> {
    let mut comp = alloc::vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut stack = alloc::vec![s];
        let mut members = Vec::new();
        while let Some(u) = stack.pop() {
            members.push(u);
            for v in 0..n {
                if comp[v] == usize::MAX && w[u * n + v] > eps {
                    comp[v] = id;
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Stoer-Wagner on a symmetric nonnegative weight matrix, `O(n^3)`.
/// Deterministic: ties in the maximum-adjacency order go to the lower index.
pub fn stoer_wagner(w: &[f64], n: usize) -> MinCut {
    assert!(n >= 2, "a cut needs two vertices");
    let mut w = w.to_vec();
    // members[v]: original vertices merged into super-vertex v
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| alloc::vec![v]).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    let mut best_side: Vec<usize> = Vec::new();
    let mut key = alloc::vec![0.0; n];
    let mut added = alloc::vec![false; n];
    while alive.len() > 1 {
        for &v in &alive {
            key[v] = 0.0;
            added[v] = false;
        }
        let mut prev = alive[0];
        let mut last = alive[0];
        for step in 0..alive.len() {
            let mut sel = usize::MAX;
            for &v in &alive {
                if !added[v] && (sel == usize::MAX || key[v] > key[sel]) {
                    sel = v;
                }
            }
            added[sel] = true;
            if step + 1 == alive.len() {
                if key[sel] < best {
                    best = key[sel];
                    best_side = members[sel].clone();
                }
                prev = last;
                last = sel;
                break;
            }
            prev = last;
            last = sel;
            for &v in &alive {
                if !added[v] {
                    key[v] += w[sel * n + v];
                }
            }
        }
        // merge last into prev
        let moved = core::mem::take(&mut members[last]);
        members[prev].extend(moved);
        for &v in &alive {
            let add = w[last * n + v];
            w[prev * n + v] += add;
            w[v * n + prev] = w[prev * n + v];
        }
        w[prev * n + prev] = 0.0;
        alive.retain(|&v| v != last);
    }
    best_side.sort_unstable();
    if 2 * best_side.len() > n || (2 * best_side.len() == n && best_side.first() == Some(&0)) {
        let mut inside = alloc::vec![false; n];
        for &v in &best_side {
            inside[v] = true;
        }
        best_side = (0..n).filter(|&v| !inside[v]).collect();
    }
    MinCut {
        weight: best,
        side: best_side,
    }
}

/// Weight of the cut between `side` and the rest.
pub fn cut_weight(w: &[f64], n: usize, side: &[usize]) -> f64 {
    let mut inside = alloc::vec![false; n];
    for &v in side {
        inside[v] = true;
    }
    let mut total = 0.0;
    for &u in side {
        for v in 0..n {
            if !inside[v] {
                total += w[u * n + v];
            }
        }
    }
    total
}
