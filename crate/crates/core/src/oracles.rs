//! Exact, non-streaming verifiers.
//!
//! Every generator and reduction in this crate is paired with a closed-form
//! expected value; the functions here recompute those values from the raw
//! edge list so the two routes can be compared. The structural workhorse is
//! [`decompose`], which inventories a max-degree-2 graph into cycles, paths,
//! and isolated vertices. The parameter oracles (matching, cut, odd cycles,
//! acyclic size) are closed forms over that inventory; MST and connectivity
//! use general algorithms.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("vertex {vertex} has degree {degree}, oracle requires max degree 2")]
    DegreeTooHigh { vertex: u32, degree: usize },
    #[error("vertex {vertex} out of range for n={n}")]
    VertexOutOfRange { vertex: u32, n: usize },
    #[error("vertex {vertex} has {direction}-degree {degree}, expected at most 1")]
    DirectedDegreeTooHigh {
        vertex: u32,
        direction: &'static str,
        degree: usize,
    },
}

/// Inventory of a max-degree-2 graph: cycle lengths and path lengths are in
/// edges, so a path of length `e` covers `e + 1` vertices. The conservation
/// identity `sum(cycles) + sum(paths + 1) + isolated == n` always holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub cycles: Vec<usize>,
    pub paths: Vec<usize>,
    pub isolated: usize,
}

impl Decomposition {
    pub fn total_edges(&self) -> usize {
        self.cycles.iter().sum::<usize>() + self.paths.iter().sum::<usize>()
    }

    pub fn total_vertices(&self) -> usize {
        self.cycles.iter().sum::<usize>()
            + self.paths.iter().map(|e| e + 1).sum::<usize>()
            + self.isolated
    }

    pub fn cycles_of_len(&self, len: usize) -> usize {
        self.cycles.iter().filter(|&&c| c == len).count()
    }

    pub fn paths_of_len(&self, len: usize) -> usize {
        self.paths.iter().filter(|&&p| p == len).count()
    }

    pub fn has_cycle_of_len(&self, len: usize) -> bool {
        self.cycles_of_len(len) > 0
    }
}

fn adjacency(edges: &[(u32, u32)], n: usize) -> Result<Vec<Vec<(u32, usize)>>, StructureError> {
    let mut adj: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
    for (idx, &(u, v)) in edges.iter().enumerate() {
        for w in [u, v] {
            if w as usize >= n {
                return Err(StructureError::VertexOutOfRange { vertex: w, n });
            }
        }
        adj[u as usize].push((v, idx));
        adj[v as usize].push((u, idx));
    }
    for (v, nbrs) in adj.iter().enumerate() {
        if nbrs.len() > 2 {
            return Err(StructureError::DegreeTooHigh {
                vertex: v as u32,
                degree: nbrs.len(),
            });
        }
    }
    Ok(adj)
}

/// Exact inventory of a max-degree-2 graph by component walking.
///
/// Cycle and path length multisets come back sorted so inventories compare
/// with `==` regardless of edge order.
pub fn decompose(edges: &[(u32, u32)], n: usize) -> Result<Decomposition, StructureError> {
    let adj = adjacency(edges, n)?;
    let mut edge_used = vec![false; edges.len()];
    let mut vertex_seen = vec![false; n];
    let mut cycles = Vec::new();
    let mut paths = Vec::new();
    let mut isolated = 0usize;

    // Paths first: walk from every degree-1 endpoint.
    for start in 0..n {
        if vertex_seen[start] || adj[start].len() != 1 {
            continue;
        }
        let mut len = 0usize;
        let mut cur = start as u32;
        vertex_seen[start] = true;
        loop {
            let step = adj[cur as usize]
                .iter()
                .find(|&&(_, idx)| !edge_used[idx])
                .copied();
            match step {
                Some((next, idx)) => {
                    edge_used[idx] = true;
                    len += 1;
                    cur = next;
                    vertex_seen[cur as usize] = true;
                }
                None => break,
            }
        }
        paths.push(len);
    }

    // Remaining unseen vertices with edges lie on cycles.
    for start in 0..n {
        if vertex_seen[start] {
            continue;
        }
        if adj[start].is_empty() {
            isolated += 1;
            vertex_seen[start] = true;
            continue;
        }
        let mut len = 0usize;
        let mut cur = start as u32;
        vertex_seen[start] = true;
        loop {
            let step = adj[cur as usize]
                .iter()
                .find(|&&(_, idx)| !edge_used[idx])
                .copied();
            match step {
                Some((next, idx)) => {
                    edge_used[idx] = true;
                    len += 1;
                    cur = next;
                    vertex_seen[cur as usize] = true;
                }
                None => break,
            }
        }
        cycles.push(len);
    }

    cycles.sort_unstable();
    paths.sort_unstable();
    Ok(Decomposition {
        cycles,
        paths,
        isolated,
    })
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            self.parent[x] = self.find(self.parent[x]);
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.rank[ra] < self.rank[rb] {
            self.parent[ra] = rb;
        } else if self.rank[ra] > self.rank[rb] {
            self.parent[rb] = ra;
        } else {
            self.parent[rb] = ra;
            self.rank[ra] += 1;
        }
        self.components -= 1;
        true
    }
}

/// Exact MST weight by Kruskal; `None` when the graph is disconnected.
pub fn mst_weight(edges: &[(u32, u32, u64)], n: usize) -> Option<u64> {
    if n == 0 {
        return Some(0);
    }
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by_key(|&i| edges[i].2);
    let mut uf = UnionFind::new(n);
    let mut weight = 0u64;
    for i in order {
        let (u, v, w) = edges[i];
        if uf.union(u as usize, v as usize) {
            weight += w;
        }
    }
    if uf.components == 1 {
        Some(weight)
    } else {
        None
    }
}

/// Maximum matching size of a max-degree-2 graph: `floor(c/2)` per cycle of
/// length `c` plus `ceil(e/2)` per path with `e` edges.
pub fn matching_size_deg2(edges: &[(u32, u32)], n: usize) -> Result<usize, StructureError> {
    let d = decompose(edges, n)?;
    Ok(d.cycles.iter().map(|c| c / 2).sum::<usize>()
        + d.paths.iter().map(|e| e.div_ceil(2)).sum::<usize>())
}

/// Maximum cut of a max-degree-2 graph: every edge of a path and of an even
/// cycle crosses, odd cycles leave exactly one edge out.
pub fn maxcut_deg2(edges: &[(u32, u32)], n: usize) -> Result<usize, StructureError> {
    let d = decompose(edges, n)?;
    Ok(d.cycles.iter().map(|c| c - (c % 2)).sum::<usize>() + d.paths.iter().sum::<usize>())
}

pub fn odd_cycle_count(edges: &[(u32, u32)], n: usize) -> Result<usize, StructureError> {
    let d = decompose(edges, n)?;
    Ok(d.cycles.iter().filter(|&&c| c % 2 == 1).count())
}

pub fn cycle_count(edges: &[(u32, u32)], n: usize) -> Result<usize, StructureError> {
    let d = decompose(edges, n)?;
    Ok(d.cycles.len())
}

/// Number of connected components, isolated vertices included.
pub fn components(edges: &[(u32, u32)], n: usize) -> usize {
    let mut uf = UnionFind::new(n);
    for &(u, v) in edges {
        uf.union(u as usize, v as usize);
    }
    uf.components
}

/// Size of the largest acyclic subgraph of a digraph whose components are
/// vertex-disjoint directed paths and cycles: edge count minus cycle count.
/// Inputs where some vertex has in- or out-degree above 1 are rejected.
pub fn acyclic_size_directed(edges: &[(u32, u32)], n: usize) -> Result<usize, StructureError> {
    let mut succ: Vec<Option<u32>> = vec![None; n];
    let mut in_deg = vec![0usize; n];
    for &(u, v) in edges {
        for w in [u, v] {
            if w as usize >= n {
                return Err(StructureError::VertexOutOfRange { vertex: w, n });
            }
        }
        if succ[u as usize].is_some() {
            return Err(StructureError::DirectedDegreeTooHigh {
                vertex: u,
                direction: "out",
                degree: 2,
            });
        }
        succ[u as usize] = Some(v);
        in_deg[v as usize] += 1;
        if in_deg[v as usize] > 1 {
            return Err(StructureError::DirectedDegreeTooHigh {
                vertex: v,
                direction: "in",
                degree: in_deg[v as usize],
            });
        }
    }

    let mut visited = vec![false; n];
    // Consume directed paths starting at in-degree-0 vertices.
    for v in 0..n {
        if in_deg[v] == 0 && !visited[v] {
            let mut cur = v;
            visited[cur] = true;
            while let Some(next) = succ[cur] {
                cur = next as usize;
                visited[cur] = true;
            }
        }
    }
    // Whatever is left with edges lies on directed cycles.
    let mut cycles = 0usize;
    for v in 0..n {
        if visited[v] || succ[v].is_none() {
            continue;
        }
        cycles += 1;
        let mut cur = v;
        while !visited[cur] {
            visited[cur] = true;
            cur = succ[cur].expect("cycle vertex has a successor") as usize;
        }
    }
    Ok(edges.len() - cycles)
}

pub mod exhaustive {
    //! Brute-force reference implementations, used only to cross-check the
    //! closed-form oracles on small graphs. Deliberately naive and written
    //! without touching [`decompose`](super::decompose) or the union-find,
    //! so an agreement between the two routes is meaningful.

    /// All simple graphs on `n` labeled vertices with max degree 2, as edge
    /// lists. DFS over the candidate edge set with degree pruning.
    pub fn max_deg2_graphs(n: usize) -> Vec<Vec<(u32, u32)>> {
        let mut candidates = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                candidates.push((u, v));
            }
        }
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        let mut deg = vec![0usize; n];
        fn rec(
            candidates: &[(u32, u32)],
            i: usize,
            chosen: &mut Vec<(u32, u32)>,
            deg: &mut [usize],
            out: &mut Vec<Vec<(u32, u32)>>,
        ) {
            if i == candidates.len() {
                out.push(chosen.clone());
                return;
            }
            rec(candidates, i + 1, chosen, deg, out);
            let (u, v) = candidates[i];
            if deg[u as usize] < 2 && deg[v as usize] < 2 {
                deg[u as usize] += 1;
                deg[v as usize] += 1;
                chosen.push((u, v));
                rec(candidates, i + 1, chosen, deg, out);
                chosen.pop();
                deg[u as usize] -= 1;
                deg[v as usize] -= 1;
            }
        }
        rec(&candidates, 0, &mut chosen, &mut deg, &mut out);
        out
    }

    /// Maximum matching by DFS over edge subsets with a saturation mask.
    pub fn matching(edges: &[(u32, u32)], _n: usize) -> usize {
        fn rec(edges: &[(u32, u32)], i: usize, used: u64, size: usize) -> usize {
            if i == edges.len() {
                return size;
            }
            let mut best = rec(edges, i + 1, used, size);
            let (u, v) = edges[i];
            let mask = (1u64 << u) | (1u64 << v);
            if used & mask == 0 {
                best = best.max(rec(edges, i + 1, used | mask, size + 1));
            }
            best
        }
        rec(edges, 0, 0, 0)
    }

    /// Maximum cut by trying all 2^n bipartitions.
    pub fn maxcut(edges: &[(u32, u32)], n: usize) -> usize {
        let mut best = 0;
        for side in 0u64..(1u64 << n) {
            let crossing = edges
                .iter()
                .filter(|&&(u, v)| (side >> u) & 1 != (side >> v) & 1)
                .count();
            best = best.max(crossing);
        }
        best
    }

    /// Minimum number of edges to delete for bipartiteness: best 2-coloring.
    pub fn distance_to_bipartite(edges: &[(u32, u32)], n: usize) -> usize {
        let mut best = edges.len();
        for color in 0u64..(1u64 << n) {
            let mono = edges
                .iter()
                .filter(|&&(u, v)| (color >> u) & 1 == (color >> v) & 1)
                .count();
            best = best.min(mono);
        }
        best
    }

    /// Connected components by flood fill.
    pub fn components(edges: &[(u32, u32)], n: usize) -> usize {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u as usize].push(v as usize);
            adj[v as usize].push(u as usize);
        }
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Cycle count for undirected graphs: connected components in which
    /// every vertex has degree exactly 2 (valid for max-degree-2 inputs).
    pub fn cycle_count(edges: &[(u32, u32)], n: usize) -> usize {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u as usize].push(v as usize);
            adj[v as usize].push(u as usize);
        }
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for s in 0..n {
            if seen[s] || adj[s].is_empty() {
                continue;
            }
            let mut stack = vec![s];
            seen[s] = true;
            let mut members = Vec::new();
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            if members.iter().all(|&v| adj[v].len() == 2) {
                cycles += 1;
            }
        }
        cycles
    }

    /// Minimum spanning tree weight by trying all edge subsets of size n-1.
    pub fn mst_weight(edges: &[(u32, u32, u64)], n: usize) -> Option<u64> {
        if n == 0 {
            return Some(0);
        }
        if n == 1 {
            return Some(0);
        }
        let m = edges.len();
        assert!(m <= 63, "too many edges for subset search");
        if m < n - 1 {
            return None;
        }
        let mut best: Option<u64> = None;
        for subset in 0u64..(1u64 << m) {
            if subset.count_ones() as usize != n - 1 {
                continue;
            }
            let chosen: Vec<(u32, u32)> = (0..m)
                .filter(|&i| (subset >> i) & 1 == 1)
                .map(|i| (edges[i].0, edges[i].1))
                .collect();
            if components(&chosen, n) != 1 {
                continue;
            }
            let w: u64 = (0..m)
                .filter(|&i| (subset >> i) & 1 == 1)
                .map(|i| edges[i].2)
                .sum();
            best = Some(best.map_or(w, |b: u64| b.min(w)));
        }
        best
    }

    /// Largest acyclic edge subset of a digraph by subset search with a
    /// DFS-based cycle test.
    pub fn acyclic_size_directed(edges: &[(u32, u32)], n: usize) -> usize {
        fn has_cycle(edges: &[(u32, u32)], n: usize) -> bool {
            let mut adj = vec![Vec::new(); n];
            for &(u, v) in edges {
                adj[u as usize].push(v as usize);
            }
            // 0 = unvisited, 1 = on stack, 2 = done
            let mut state = vec![0u8; n];
            fn dfs(v: usize, adj: &[Vec<usize>], state: &mut [u8]) -> bool {
                state[v] = 1;
                for &w in &adj[v] {
                    if state[w] == 1 {
                        return true;
                    }
                    if state[w] == 0 && dfs(w, adj, state) {
                        return true;
                    }
                }
                state[v] = 2;
                false
            }
            (0..n).any(|v| state[v] == 0 && dfs(v, &adj, &mut state))
        }

        let m = edges.len();
        assert!(m <= 63, "too many edges for subset search");
        let mut best = 0usize;
        for subset in 0u64..(1u64 << m) {
            let size = subset.count_ones() as usize;
            if size <= best {
                continue;
            }
            let chosen: Vec<(u32, u32)> = (0..m)
                .filter(|&i| (subset >> i) & 1 == 1)
                .map(|i| edges[i])
                .collect();
            if !has_cycle(&chosen, n) {
                best = size;
            }
        }
        best
    }
}
