//! Exact optima for tiny instances and a 2-opt upper bound for larger ones.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Metric;
use crate::instances::Instance;
use crate::tour::{tour_length, Tour};

/// Largest instance [`held_karp_opt`] accepts.
pub const HELD_KARP_LIMIT: usize = 20;
/// Largest instance [`permutation_opt`] accepts.
pub const PERMUTATION_LIMIT: usize = 10;
/// Candidate neighbours per vertex in [`two_opt_improve`].
pub const TWO_OPT_NEIGHBORS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    HeldKarpDp,
    Permutation,
    TwoOpt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub tour: Tour,
    pub length: f64,
    pub method: OracleMethod,
}

fn guard(inst: &Instance, what: &'static str, limit: usize) -> Result<()> {
    if inst.len() > limit {
        return Err(Error::SizeGuard {
            what,
            limit,
            got: inst.len(),
        });
    }
    if inst.len() < 3 {
        return Err(Error::Precondition(alloc::format!(
            "{what} needs at least 3 vertices, got {}",
            inst.len()
        )));
    }
    Ok(())
}

/// Canonical tour and its length summed in canonical order, so that equal
/// cycles found by different methods report bit-identical lengths.
fn finish(
    order: Vec<usize>,
    inst: &Instance,
    metric: Metric,
    method: OracleMethod,
) -> OracleResult {
    let tour = Tour::for_instance(order, inst)
        .expect("oracles produce permutations")
        .canonical();
    OracleResult {
        length: tour_length(&tour, inst, metric),
        tour,
        method,
    }
}

/// Bitmask dynamic program over subsets of `1..n`, vertex 0 fixed as start.
pub fn held_karp_opt(inst: &Instance, metric: Metric) -> Result<OracleResult> {
    guard(inst, "Held-Karp", HELD_KARP_LIMIT)?;
    let n = inst.len();
    let d = inst.distance_matrix(metric);
    let k = n - 1; // vertices 1..n as bits 0..k
    let full = (1usize << k) - 1;
    let mut cost = alloc::vec![f64::INFINITY; (full + 1) * k];
    let mut parent = alloc::vec![u8::MAX; (full + 1) * k];
    for j in 0..k {
        cost[(1 << j) * k + j] = d[j + 1];
    }
    for mask in 1..=full {
        for j in 0..k {
            if mask >> j & 1 == 0 {
                continue;
            }
            let cur = cost[mask * k + j];
            if cur == f64::INFINITY {
                continue;
            }
            let row = &d[(j + 1) * n..(j + 2) * n];
            let mut rest = full & !mask;
            while rest != 0 {
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let next = mask | 1 << t;
                let c = cur + row[t + 1];
                if c < cost[next * k + t] {
                    cost[next * k + t] = c;
                    parent[next * k + t] = j as u8;
                }
            }
        }
    }
    let mut last = 0;
    let mut best = f64::INFINITY;
    for j in 0..k {
        let c = cost[full * k + j] + d[j + 1];
        if c < best {
            best = c;
            last = j;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    let mut j = last;
    loop {
        order.push(j + 1);
        let p = parent[mask * k + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    order.push(0);
    order.reverse();
    Ok(finish(order, inst, metric, OracleMethod::HeldKarpDp))
}

/// Exhaustive search over the `(n-1)!/2` cyclic orders.
pub fn permutation_opt(inst: &Instance, metric: Metric) -> Result<OracleResult> {
    guard(inst, "permutation search", PERMUTATION_LIMIT)?;
    let n = inst.len();
    let d = inst.distance_matrix(metric);
    let mut perm: Vec<usize> = (1..n).collect();
    let mut best = f64::INFINITY;
    let mut best_perm = perm.clone();
    let mut eval = |p: &[usize]| {
        // each cycle is seen in both directions; keep one
        if p[0] > p[p.len() - 1] {
            return;
        }
        let mut len = d[p[0]] + d[p[p.len() - 1]];
        for w in p.windows(2) {
            len += d[w[0] * n + w[1]];
        }
        if len < best {
            best = len;
            best_perm.copy_from_slice(p);
        }
    };
    heap_permutations(&mut perm, &mut eval);
    let mut order = alloc::vec![0];
    order.extend(best_perm);
    Ok(finish(order, inst, metric, OracleMethod::Permutation))
}

/// Heap's algorithm, iterative.
fn heap_permutations(a: &mut [usize], f: &mut impl FnMut(&[usize])) {
    let n = a.len();
    let mut c = alloc::vec![0usize; n];
    f(a);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(a);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// First-improvement 2-opt over 16-nearest-neighbour candidate lists.
///
/// Vertices are scanned in index order; for each vertex `a` both tour
/// neighbours are tried against its candidates, and the first move that
/// shortens the tour by more than `1e-10` is applied. The scan restarts until
/// a full pass finds nothing.
pub fn two_opt_improve(t: &Tour, inst: &Instance, metric: Metric) -> Tour {
    let n = t.len();
    if n < 5 {
        return t.clone();
    }
    let d = inst.distance_matrix(metric);
    let dist = |a: usize, b: usize| d[a * n + b];
    let neigh: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            let mut cand: Vec<usize> = (0..n).filter(|&b| b != a).collect();
            cand.sort_by(|&x, &y| dist(a, x).total_cmp(&dist(a, y)).then(x.cmp(&y)));
            cand.truncate(TWO_OPT_NEIGHBORS);
            cand
        })
        .collect();
    let mut order = t.order().to_vec();
    let mut pos = alloc::vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let reverse = |order: &mut [usize], pos: &mut [usize], i: usize, j: usize| {
        // reverse order[i..=j] cyclically, choosing the shorter side
        let inner = (j + n - i) % n + 1;
        let (mut a, mut b, len) = if 2 * inner <= n {
            (i, j, inner)
        } else {
            ((j + 1) % n, (i + n - 1) % n, n - inner)
        };
        for _ in 0..len / 2 {
            order.swap(a, b);
            pos[order[a]] = a;
            pos[order[b]] = b;
            a = (a + 1) % n;
            b = (b + n - 1) % n;
        }
    };
    let mut improved = true;
    while improved {
        improved = false;
        for a in 0..n {
            for succ_side in [true, false] {
                let pa = pos[a];
                let b = if succ_side {
                    order[(pa + 1) % n]
                } else {
                    order[(pa + n - 1) % n]
                };
                let dab = dist(a, b);
                for &c in &neigh[a] {
                    let dac = dist(a, c);
                    if dac >= dab {
                        break;
                    }
                    let pc = pos[c];
                    let dd = if succ_side {
                        order[(pc + 1) % n]
                    } else {
                        order[(pc + n - 1) % n]
                    };
                    if c == b || dd == a {
                        continue;
                    }
                    let delta = dac + dist(b, dd) - dab - dist(c, dd);
                    if delta < -1e-10 {
                        if succ_side {
                            // a b ... c dd  ->  a c ... b dd
                            reverse(&mut order, &mut pos, (pa + 1) % n, pc);
                        } else {
                            // dd c ... b a  ->  dd b ... c a
                            reverse(&mut order, &mut pos, pc, (pa + n - 1) % n);
                        }
                        improved = true;
                        break;
                    }
                }
            }
        }
    }
    Tour::new(order, n).expect("2-opt keeps a permutation")
}

/// [`two_opt_improve`] wrapped with its length.
pub fn two_opt_result(t: &Tour, inst: &Instance, metric: Metric) -> OracleResult {
    let tour = two_opt_improve(t, inst, metric);
    OracleResult {
        length: tour_length(&tour, inst, metric),
        tour,
        method: OracleMethod::TwoOpt,
    }
}
