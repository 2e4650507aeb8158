//! Graph algorithms behind the global property suite.
//!
//! Everything operates on [`CollocationNetwork`] adjacency views. Path and
//! clustering measures ignore edge direction and self-loops so that they are
//! computable uniformly across all six network variants; components and
//! diameter expose both direction modes.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::netbuild::CollocationNetwork;

/// PRNG used for all seeded sampling in this crate; the identity is recorded
/// in report metadata for reproducibility.
pub const PRNG_NAME: &str = "chacha8";

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("diameter undefined on empty graph")]
    EmptyGraph,
    #[error("path length undefined")]
    PathLengthUndefined,
    #[error("edge count {m} exceeds simple-graph capacity {cap}")]
    OverCapacity { m: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentMode {
    Weak,
    Strong,
}

/// Result of a component labeling pass.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    pub mode: ComponentMode,
    pub labels: Vec<u32>,
    pub count: usize,
    pub giant_size: usize,
}

/// Undirected adjacency with self-loops dropped and duplicates removed.
pub fn undirected_adjacency(net: &CollocationNetwork) -> Vec<Vec<u32>> {
    let n = net.n_vertices();
    let mut adj = vec![Vec::new(); n];
    for (a, b) in net.edges() {
        if a == b {
            continue;
        }
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Directed out-adjacency with self-loops dropped.
pub fn directed_adjacency(net: &CollocationNetwork) -> Vec<Vec<u32>> {
    let n = net.n_vertices();
    let mut adj = vec![Vec::new(); n];
    for (a, b) in net.edges() {
        if a == b {
            continue;
        }
        adj[a as usize].push(b);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Number of distinct undirected non-loop edges (the simple undirected
/// projection used by path, clustering, and baseline computations).
pub fn undirected_simple_edge_count(net: &CollocationNetwork) -> usize {
    undirected_adjacency(net).iter().map(|l| l.len()).sum::<usize>() / 2
}

fn weak_components(net: &CollocationNetwork) -> ComponentLabeling {
    let adj = undirected_adjacency(net);
    let n = adj.len();
    let mut labels = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start] != u32::MAX {
            continue;
        }
        let comp = sizes.len() as u32;
        let mut size = 0usize;
        labels[start] = comp;
        queue.push_back(start as u32);
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in &adj[v as usize] {
                if labels[w as usize] == u32::MAX {
                    labels[w as usize] = comp;
                    queue.push_back(w);
                }
            }
        }
        sizes.push(size);
    }
    ComponentLabeling {
        mode: ComponentMode::Weak,
        labels,
        count: sizes.len(),
        giant_size: sizes.iter().copied().max().unwrap_or(0),
    }
}

/// Iterative Tarjan SCC.
fn strong_components(net: &CollocationNetwork) -> ComponentLabeling {
    let adj = directed_adjacency(net);
    let n = adj.len();
    let mut index = vec![u32::MAX; n];
    let mut lowlink = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut labels = vec![u32::MAX; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    let mut next_index = 0u32;
    // call stack of (vertex, next child position)
    let mut call: Vec<(u32, usize)> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != u32::MAX {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = next_index;
        lowlink[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut child)) = call.last_mut() {
            if *child < adj[v as usize].len() {
                let w = adj[v as usize][*child];
                *child += 1;
                if index[w as usize] == u32::MAX {
                    index[w as usize] = next_index;
                    lowlink[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, 0));
                } else if on_stack[w as usize] {
                    lowlink[v as usize] = lowlink[v as usize].min(index[w as usize]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    lowlink[parent as usize] = lowlink[parent as usize].min(lowlink[v as usize]);
                }
                if lowlink[v as usize] == index[v as usize] {
                    let comp = sizes.len() as u32;
                    let mut size = 0usize;
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w as usize] = false;
                        labels[w as usize] = comp;
                        size += 1;
                        if w == v {
                            break;
                        }
                    }
                    sizes.push(size);
                }
            }
        }
    }
    ComponentLabeling {
        mode: ComponentMode::Strong,
        labels,
        count: sizes.len(),
        giant_size: sizes.iter().copied().max().unwrap_or(0),
    }
}

/// Weak or strong component labeling. For undirected networks strong mode is
/// equivalent to weak mode.
pub fn components(net: &CollocationNetwork, mode: ComponentMode) -> ComponentLabeling {
    match mode {
        ComponentMode::Weak => weak_components(net),
        ComponentMode::Strong => {
            if net.directed {
                strong_components(net)
            } else {
                let mut labeling = weak_components(net);
                labeling.mode = ComponentMode::Strong;
                labeling
            }
        }
    }
}

fn bfs_distances(adj: &[Vec<u32>], source: u32, dist: &mut [u32], queue: &mut VecDeque<u32>) {
    dist.fill(u32::MAX);
    dist[source as usize] = 0;
    queue.clear();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize];
        for &w in &adj[v as usize] {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = d + 1;
                queue.push_back(w);
            }
        }
    }
}

/// Longest finite shortest-path length over all ordered vertex pairs, by BFS
/// from every vertex. Self-loops are ignored.
pub fn diameter(net: &CollocationNetwork, respect_direction: bool) -> Result<u32, GraphError> {
    if net.n_vertices() == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let adj = if respect_direction && net.directed {
        directed_adjacency(net)
    } else {
        undirected_adjacency(net)
    };
    let n = adj.len();
    let mut best = 0u32;
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n as u32 {
        bfs_distances(&adj, s, &mut dist, &mut queue);
        for &d in dist.iter() {
            if d != u32::MAX && d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Mean shortest-path length over all unordered connected vertex pairs,
/// direction ignored. Infinite (disconnected) pairs are excluded.
pub fn avg_path_length(net: &CollocationNetwork) -> Result<f64, GraphError> {
    if net.n_vertices() < 2 {
        return Err(GraphError::PathLengthUndefined);
    }
    let adj = undirected_adjacency(net);
    let n = adj.len();
    let mut total = 0.0f64;
    let mut pairs = 0u64;
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n as u32 {
        bfs_distances(&adj, s, &mut dist, &mut queue);
        for (t, &d) in dist.iter().enumerate() {
            if t as u32 > s && d != u32::MAX {
                total += d as f64;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        return Err(GraphError::PathLengthUndefined);
    }
    Ok(total / pairs as f64)
}

/// Diameter (undirected), average path length, and per-vertex BFS reach in a
/// single undirected sweep. Used by the property assembler to avoid repeating
/// the all-pairs pass.
pub fn undirected_sweep(net: &CollocationNetwork) -> (u32, Option<f64>) {
    let adj = undirected_adjacency(net);
    let n = adj.len();
    let mut best = 0u32;
    let mut total = 0.0f64;
    let mut pairs = 0u64;
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n as u32 {
        bfs_distances(&adj, s, &mut dist, &mut queue);
        for (t, &d) in dist.iter().enumerate() {
            if d == u32::MAX {
                continue;
            }
            if d > best {
                best = d;
            }
            if t as u32 > s {
                total += d as f64;
                pairs += 1;
            }
        }
    }
    let apl = if pairs > 0 { Some(total / pairs as f64) } else { None };
    (best, apl)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusteringKind {
    Global,
    AvgLocal,
}

/// Per-vertex triangle membership counts plus degrees, direction ignored.
fn triangle_census(adj: &[Vec<u32>]) -> Vec<u64> {
    let n = adj.len();
    // rank vertices by (degree, id); count each triangle at its lowest-rank
    // vertex pair using forward adjacency intersection
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by_key(|&v| (adj[v as usize].len(), v));
    let mut rank = vec![0u32; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v as usize] = r as u32;
    }
    let mut forward: Vec<Vec<u32>> = vec![Vec::new(); n];
    for v in 0..n as u32 {
        for &w in &adj[v as usize] {
            if rank[w as usize] > rank[v as usize] {
                forward[v as usize].push(w);
            }
        }
        forward[v as usize].sort_unstable_by_key(|&w| rank[w as usize]);
    }
    let mut tri = vec![0u64; n];
    let mut mark = vec![false; n];
    for &v in &order {
        for &w in &forward[v as usize] {
            mark[w as usize] = true;
        }
        for &w in &forward[v as usize] {
            for &x in &forward[w as usize] {
                if mark[x as usize] {
                    tri[v as usize] += 1;
                    tri[w as usize] += 1;
                    tri[x as usize] += 1;
                }
            }
        }
        for &w in &forward[v as usize] {
            mark[w as usize] = false;
        }
    }
    tri
}

/// Clustering coefficient, direction and self-loops ignored.
///
/// Global: 3 × triangles / connected vertex triples. Average local: mean over
/// vertices of the edge density among neighbors, with degree-<2 vertices
/// contributing 0. A graph with no connected triple has global clustering 0.
pub fn clustering(net: &CollocationNetwork, kind: ClusteringKind) -> f64 {
    let adj = undirected_adjacency(net);
    let n = adj.len();
    if n == 0 {
        return 0.0;
    }
    let tri = triangle_census(&adj);
    match kind {
        ClusteringKind::Global => {
            let closed: u64 = tri.iter().sum(); // = 3 × triangle count
            let triples: u64 = adj
                .iter()
                .map(|l| {
                    let d = l.len() as u64;
                    d * d.saturating_sub(1) / 2
                })
                .sum();
            if triples == 0 {
                0.0
            } else {
                closed as f64 / triples as f64
            }
        }
        ClusteringKind::AvgLocal => {
            let mut sum = 0.0;
            for v in 0..n {
                let d = adj[v].len() as u64;
                if d >= 2 {
                    sum += tri[v] as f64 / (d * (d - 1) / 2) as f64;
                }
            }
            sum / n as f64
        }
    }
}

/// Uniform simple G(n, m) random graph, loop-free, deterministic per seed.
pub fn gnm_random(n: usize, m: usize, directed: bool, seed: u64) -> Result<CollocationNetwork, GraphError> {
    let cap = if directed { n * n.saturating_sub(1) } else { n * n.saturating_sub(1) / 2 };
    if m > cap {
        return Err(GraphError::OverCapacity { m, cap });
    }
    let mut net = CollocationNetwork::new(directed, false, None);
    for i in 0..n {
        net.intern(&format!("v{i}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if m * 2 > cap {
        // dense regime: enumerate all candidate edges and partial shuffle
        let mut all: Vec<(u32, u32)> = Vec::with_capacity(cap);
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                if a == b {
                    continue;
                }
                if directed || a < b {
                    all.push((a, b));
                }
            }
        }
        for i in 0..m {
            let j = rng.gen_range(i..all.len());
            all.swap(i, j);
            net.add_edge(all[i].0, all[i].1);
        }
    } else {
        while net.n_edges() < m {
            let a = rng.gen_range(0..n as u32);
            let b = rng.gen_range(0..n as u32);
            if a == b {
                continue;
            }
            net.add_edge(a, b);
        }
    }
    Ok(net)
}
