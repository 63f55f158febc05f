#![allow(dead_code)]

use std::collections::BTreeSet;

use mpqc_core::device::{DeviceGraph, Link};
use mpqc_core::partition::UnitGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random recursive spanning tree on `n` nodes plus `extra` distinct random
/// chords.
pub fn random_connected_edges(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Vec<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for v in 1..n {
        edges.insert((rng.random_range(0..v), v));
    }
    let max = n * (n - 1) / 2;
    let target = (n - 1 + extra).min(max);
    while edges.len() < target {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    edges.into_iter().collect()
}

pub fn device_from_edges(rng: &mut ChaCha8Rng, n: usize, edges: &[(usize, usize)]) -> DeviceGraph {
    let links = edges.iter().map(|&(a, b)| Link { a, b, error: rng.random_range(0.005..0.05) }).collect();
    let qubit_errors = (0..n).map(|_| rng.random_range(1e-4..2e-3)).collect();
    let readout_errors = (0..n).map(|_| rng.random_range(0.01..0.05)).collect();
    DeviceGraph::new(n, links, qubit_errors, readout_errors).unwrap()
}

pub fn edges_of(g: &DeviceGraph) -> Vec<(usize, usize)> {
    g.links().iter().map(|l| (l.a.min(l.b), l.a.max(l.b))).collect()
}

/// Checks units are disjoint, cover every qubit, are connected and have
/// `m` qubits except for residuals, and that H holds exactly the
/// cross-unit links. Returns the number of undersized units.
pub fn check_units(g: &DeviceGraph, ug: &UnitGraph, m: usize) -> Result<usize, String> {
    let n = g.num_qubits();
    let mut owner = vec![usize::MAX; n];
    for (i, u) in ug.units.iter().enumerate() {
        if u.id != i {
            return Err(format!("unit {i} has id {}", u.id));
        }
        if u.qubits.is_empty() || u.qubits.len() > m {
            return Err(format!("unit {i} has {} qubits", u.qubits.len()));
        }
        if u.residual != (u.qubits.len() < m) {
            return Err(format!("unit {i} residual flag wrong"));
        }
        if !g.is_connected_subset(&u.qubits) {
            return Err(format!("unit {i} not connected"));
        }
        for &q in &u.qubits {
            if owner[q] != usize::MAX {
                return Err(format!("qubit {q} in two units"));
            }
            owner[q] = i;
        }
    }
    if let Some(q) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(format!("qubit {q} uncovered"));
    }
    if owner != ug.qubit_to_unit {
        return Err("qubit_to_unit disagrees with units".into());
    }
    let expected: BTreeSet<(usize, usize)> = edges_of(g)
        .into_iter()
        .filter(|&(a, b)| owner[a] != owner[b])
        .map(|(a, b)| (owner[a].min(owner[b]), owner[a].max(owner[b])))
        .collect();
    if expected != ug.edges {
        return Err("unit graph edges differ from cross-unit links".into());
    }
    Ok(ug.units.iter().filter(|u| u.qubits.len() < m).count())
}

/// Fewest undersized parts over all partitions of the nodes into connected
/// parts of at most `m` nodes. Exhaustive; keep `n` small.
pub fn min_fragments(n: usize, edges: &[(usize, usize)], m: usize) -> usize {
    let mut adj = vec![0u64; n];
    for &(a, b) in edges {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let mut best = usize::MAX;
    search(&adj, m, (1u64 << n) - 1, 0, &mut best);
    best
}

fn search(adj: &[u64], m: usize, free: u64, fragments: usize, best: &mut usize) {
    if free != 0 && fragments + uneven_components(adj, m, free) >= *best {
        return;
    }
    if free == 0 {
        *best = fragments;
        return;
    }
    let root = free.trailing_zeros() as usize;
    let mut seen = BTreeSet::new();
    let mut parts = Vec::new();
    connected_parts(adj, free, 1 << root, m, &mut seen, &mut parts);
    // full parts first so a good bound is found early
    parts.sort_by_key(|p: &u64| std::cmp::Reverse(p.count_ones()));
    for p in parts {
        let small = (p.count_ones() as usize) < m;
        search(adj, m, free & !p, fragments + small as usize, best);
    }
}

fn connected_parts(adj: &[u64], free: u64, set: u64, m: usize, seen: &mut BTreeSet<u64>, out: &mut Vec<u64>) {
    if !seen.insert(set) {
        return;
    }
    out.push(set);
    if set.count_ones() as usize == m {
        return;
    }
    let mut frontier = 0u64;
    let mut s = set;
    while s != 0 {
        let v = s.trailing_zeros() as usize;
        frontier |= adj[v];
        s &= s - 1;
    }
    frontier &= free & !set;
    while frontier != 0 {
        let v = frontier.trailing_zeros();
        connected_parts(adj, free, set | 1 << v, m, seen, out);
        frontier &= frontier - 1;
    }
}

/// Components of `free` whose size is not a multiple of `m`; each needs a
/// fragment.
fn uneven_components(adj: &[u64], m: usize, free: u64) -> usize {
    let mut left = free;
    let mut count = 0;
    while left != 0 {
        let mut comp = 1u64 << left.trailing_zeros();
        loop {
            let mut grown = comp;
            let mut s = comp;
            while s != 0 {
                grown |= adj[s.trailing_zeros() as usize] & free;
                s &= s - 1;
            }
            if grown == comp {
                break;
            }
            comp = grown;
        }
        left &= !comp;
        count += usize::from(!(comp.count_ones() as usize).is_multiple_of(m));
    }
    count
}
