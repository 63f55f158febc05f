//! SABRE-style layout and routing restricted to one region.
//!
//! Routing works in a region-local index space: physical qubits of the
//! region are renumbered `0..R` and the program's logical qubits are the
//! first `k` of `R` virtual qubits (the rest are idle placeholders that
//! SWAPs may move around).

use crate::circuit::Gate;
use crate::device::DeviceGraph;
use crate::partition::Region;

#[derive(Clone, Debug, PartialEq)]
pub struct RouterConfig {
    /// Two-qubit gates beyond the front layer scored by the lookahead term.
    pub lookahead: usize,
    /// Weight of the lookahead term.
    pub lookahead_weight: f64,
    /// Forward/reverse layout refinement rounds.
    pub layout_passes: usize,
    pub decay_delta: f64,
    /// Decay values reset after this many consecutive SWAPs.
    pub decay_reset: usize,
}

impl Default for RouterConfig {
    fn default() -> Self {
        RouterConfig { lookahead: 20, lookahead_weight: 0.5, layout_passes: 3, decay_delta: 0.001, decay_reset: 5 }
    }
}

/// Region-local view of the coupling graph with all-pairs distances.
pub(crate) struct RegionTopology {
    /// Local index → physical qubit.
    pub physical: Vec<usize>,
    pub adj: Vec<Vec<usize>>,
    /// Hop distance with a small error-dependent surcharge per link.
    pub dist: Vec<Vec<f64>>,
    /// Hop count, used to pick release-valve paths.
    pub next_hop: Vec<Vec<usize>>,
}

impl RegionTopology {
    pub fn new(region: &Region, g: &DeviceGraph) -> Self {
        let physical = region.qubits.clone();
        let r = physical.len();
        let local = |p: usize| physical.binary_search(&p).ok();
        let mut adj = vec![Vec::new(); r];
        let mut dist = vec![vec![f64::INFINITY; r]; r];
        let mut next_hop = vec![vec![usize::MAX; r]; r];
        for (i, &p) in physical.iter().enumerate() {
            dist[i][i] = 0.0;
            next_hop[i][i] = i;
            for l in g.incident_links(p) {
                if let Some(j) = local(l.other(p)) {
                    adj[i].push(j);
                    dist[i][j] = 1.0 - (1.0 - l.error).ln();
                    next_hop[i][j] = j;
                }
            }
            adj[i].sort_unstable();
        }
        for k in 0..r {
            for i in 0..r {
                for j in 0..r {
                    let via = dist[i][k] + dist[k][j];
                    if via < dist[i][j] {
                        dist[i][j] = via;
                        next_hop[i][j] = next_hop[i][k];
                    }
                }
            }
        }
        RegionTopology { physical, adj, dist, next_hop }
    }

    pub fn len(&self) -> usize {
        self.physical.len()
    }

    pub fn linked(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }
}

/// Outcome of one routing pass, in local indices.
pub(crate) struct RoutedPass {
    pub gates: Vec<Gate>,
    /// Virtual → local physical at the end of the pass.
    pub final_v2p: Vec<usize>,
    pub swaps: usize,
}

struct Dag {
    succs: Vec<Vec<usize>>,
    preds: Vec<usize>,
}

impl Dag {
    fn new(gates: &[Gate], width: usize) -> Self {
        let mut last: Vec<Option<usize>> = vec![None; width];
        let mut succs = vec![Vec::new(); gates.len()];
        let mut preds = vec![0; gates.len()];
        for (i, g) in gates.iter().enumerate() {
            let mut seen = Vec::new();
            for q in g.operands() {
                if let Some(p) = last[q] {
                    if !seen.contains(&p) {
                        seen.push(p);
                        succs[p].push(i);
                        preds[i] += 1;
                    }
                }
                last[q] = Some(i);
            }
        }
        Dag { succs, preds }
    }
}

/// Routes `gates` (virtual operands, no swaps) starting from `v2p`.
pub(crate) fn route_pass(gates: &[Gate], topo: &RegionTopology, init_v2p: &[usize], cfg: &RouterConfig) -> RoutedPass {
    let r = topo.len();
    let dag = Dag::new(gates, r);
    let mut preds = dag.preds.clone();
    let mut v2p = init_v2p.to_vec();
    let mut p2v = vec![usize::MAX; r];
    for (v, &p) in v2p.iter().enumerate() {
        p2v[p] = v;
    }
    let mut front: Vec<usize> = (0..gates.len()).filter(|&i| preds[i] == 0).collect();
    let mut out = Vec::with_capacity(gates.len() * 2);
    let mut decay = vec![1.0f64; r];
    let mut swaps = 0;
    let mut swaps_since_progress = 0;
    let mut swaps_since_reset = 0;
    let valve = 10 * r.max(2);

    let executable = |g: &Gate, v2p: &[usize]| match *g {
        Gate::Cx { control, target } => topo.linked(v2p[control], v2p[target]),
        _ => true,
    };

    loop {
        // drain everything executable
        let mut progressed = false;
        let mut i = 0;
        while i < front.len() {
            let gi = front[i];
            if executable(&gates[gi], &v2p) {
                front.swap_remove(i);
                out.push(gates[gi].remap(|v| v2p[v]));
                for &s in &dag.succs[gi] {
                    preds[s] -= 1;
                    if preds[s] == 0 {
                        front.push(s);
                    }
                }
                progressed = true;
                i = 0;
            } else {
                i += 1;
            }
        }
        if front.is_empty() {
            break;
        }
        front.sort_unstable();
        if progressed {
            decay.iter_mut().for_each(|d| *d = 1.0);
            swaps_since_progress = 0;
            swaps_since_reset = 0;
        }

        if swaps_since_progress >= valve {
            // walk the first blocked gate's control towards its target
            let gi = front[0];
            if let Gate::Cx { control, target } = gates[gi] {
                while !topo.linked(v2p[control], v2p[target]) {
                    let (a, b) = (v2p[control], topo.next_hop[v2p[control]][v2p[target]]);
                    apply_swap(a, b, &mut v2p, &mut p2v, &mut out);
                    swaps += 1;
                }
            }
            swaps_since_progress = 0;
            continue;
        }

        let extended = extended_set(gates, &dag, &preds, &front, cfg.lookahead);
        let mut candidates: Vec<(usize, usize)> = Vec::new();
        for &gi in &front {
            if let Gate::Cx { control, target } = gates[gi] {
                for p in [v2p[control], v2p[target]] {
                    for &n in &topo.adj[p] {
                        let pair = (p.min(n), p.max(n));
                        if !candidates.contains(&pair) {
                            candidates.push(pair);
                        }
                    }
                }
            }
        }
        candidates.sort_unstable();
        let mut best = candidates[0];
        let mut best_score = f64::INFINITY;
        for &(a, b) in &candidates {
            let moved = |p: usize| {
                if p == a {
                    b
                } else if p == b {
                    a
                } else {
                    p
                }
            };
            let cost = |list: &[usize]| -> f64 {
                list.iter()
                    .filter_map(|&gi| match gates[gi] {
                        Gate::Cx { control, target } => Some(topo.dist[moved(v2p[control])][moved(v2p[target])]),
                        _ => None,
                    })
                    .sum::<f64>()
            };
            let n_front = front.iter().filter(|&&gi| gates[gi].is_two_qubit()).count().max(1) as f64;
            let mut score = cost(&front) / n_front;
            if !extended.is_empty() {
                score += cfg.lookahead_weight * cost(&extended) / extended.len() as f64;
            }
            score *= decay[a].max(decay[b]);
            if score < best_score - 1e-12 {
                best_score = score;
                best = (a, b);
            }
        }
        apply_swap(best.0, best.1, &mut v2p, &mut p2v, &mut out);
        swaps += 1;
        swaps_since_progress += 1;
        swaps_since_reset += 1;
        decay[best.0] += cfg.decay_delta;
        decay[best.1] += cfg.decay_delta;
        if swaps_since_reset >= cfg.decay_reset {
            decay.iter_mut().for_each(|d| *d = 1.0);
            swaps_since_reset = 0;
        }
    }
    RoutedPass { gates: out, final_v2p: v2p, swaps }
}

fn apply_swap(a: usize, b: usize, v2p: &mut [usize], p2v: &mut [usize], out: &mut Vec<Gate>) {
    out.push(Gate::cx(a, b));
    out.push(Gate::cx(b, a));
    out.push(Gate::cx(a, b));
    let (va, vb) = (p2v[a], p2v[b]);
    p2v.swap(a, b);
    v2p[va] = b;
    v2p[vb] = a;
}

/// Up to `limit` two-qubit gates reachable from the front layer.
fn extended_set(gates: &[Gate], dag: &Dag, preds: &[usize], front: &[usize], limit: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut remaining = preds.to_vec();
    let mut queue: std::collections::VecDeque<usize> = front.iter().copied().collect();
    while let Some(gi) = queue.pop_front() {
        for &s in &dag.succs[gi] {
            remaining[s] -= 1;
            if remaining[s] == 0 {
                if gates[s].is_two_qubit() {
                    out.push(s);
                    if out.len() >= limit {
                        return out;
                    }
                }
                queue.push_back(s);
            }
        }
    }
    out
}

/// Region qubits in best-first BFS order from the highest-utility qubit.
pub(crate) fn seed_order(topo: &RegionTopology, g: &DeviceGraph) -> Vec<usize> {
    let r = topo.len();
    let util: Vec<f64> = topo.physical.iter().map(|&p| g.qubit_utility(p)).collect();
    let better = |a: usize, b: usize| util[a].total_cmp(&util[b]).reverse().then(a.cmp(&b));
    let root = (0..r).min_by(|&a, &b| better(a, b)).expect("non-empty region");
    let mut order = vec![root];
    let mut taken = vec![false; r];
    taken[root] = true;
    while order.len() < r {
        let next = order
            .iter()
            .flat_map(|&q| topo.adj[q].iter().copied())
            .filter(|&n| !taken[n])
            .min_by(|&a, &b| better(a, b));
        let Some(n) = next else {
            // disconnected remainder; append by utility
            let mut rest: Vec<usize> = (0..r).filter(|&q| !taken[q]).collect();
            rest.sort_by(|&a, &b| better(a, b));
            order.extend(rest);
            break;
        };
        taken[n] = true;
        order.push(n);
    }
    order
}

/// Chooses the virtual → local-physical layout by forward/reverse passes over
/// the two-qubit gates, keeping the round whose forward routing needs the
/// fewest SWAPs.
pub(crate) fn choose_layout(gates: &[Gate], topo: &RegionTopology, g: &DeviceGraph, cfg: &RouterConfig) -> Vec<usize> {
    let mut layout = vec![0; topo.len()];
    for (v, p) in seed_order(topo, g).into_iter().enumerate() {
        layout[v] = p;
    }
    let two_qubit: Vec<Gate> = gates.iter().filter(|g| g.is_two_qubit()).cloned().collect();
    if two_qubit.is_empty() {
        return layout;
    }
    let reversed: Vec<Gate> = two_qubit.iter().rev().cloned().collect();
    let mut best = layout.clone();
    let mut best_swaps = route_pass(&two_qubit, topo, &layout, cfg).swaps;
    for _ in 0..cfg.layout_passes {
        let fwd = route_pass(&two_qubit, topo, &layout, cfg);
        let back = route_pass(&reversed, topo, &fwd.final_v2p, cfg);
        layout = back.final_v2p;
        let swaps = route_pass(&two_qubit, topo, &layout, cfg).swaps;
        if swaps < best_swaps {
            best_swaps = swaps;
            best = layout.clone();
        }
    }
    best
}
