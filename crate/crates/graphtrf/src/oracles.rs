//! Exact reference solvers.
//!
//! These produce gold answers at generation time and judge model responses:
//! union-find for connectivity, DFS for cycle detection, Kahn's algorithm for
//! topological sort, Dijkstra for shortest path, Edmonds-Karp for maximum
//! flow, Hopcroft-Karp for bipartite matching, and backtracking for Hamilton
//! path. Tie-breaking is deterministic (minimum node id) so gold witnesses
//! are reproducible.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::GraphInstance;

fn check_node(graph: &GraphInstance, node: usize) -> Result<()> {
    if node >= graph.node_count {
        return Err(Error::InvalidNode {
            node,
            node_count: graph.node_count,
        });
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// True iff `u` and `v` share a connected component (union-find).
pub fn connectivity(graph: &GraphInstance, u: usize, v: usize) -> Result<bool> {
    check_node(graph, u)?;
    check_node(graph, v)?;
    let mut uf = UnionFind::new(graph.node_count);
    for e in &graph.edges {
        uf.union(e.u, e.v);
    }
    Ok(uf.find(u) == uf.find(v))
}

/// True iff the undirected graph contains a simple cycle (DFS back edge).
pub fn has_cycle(graph: &GraphInstance) -> bool {
    let adj = graph.adjacency();
    let mut visited = vec![false; graph.node_count];
    for start in 0..graph.node_count {
        if visited[start] {
            continue;
        }
        // Iterative DFS carrying the parent edge to skip the tree edge back.
        let mut stack = vec![(start, usize::MAX)];
        visited[start] = true;
        while let Some((node, parent)) = stack.pop() {
            let mut skipped_parent = false;
            for &nbr in &adj[node] {
                if nbr == parent && !skipped_parent {
                    skipped_parent = true;
                    continue;
                }
                if visited[nbr] {
                    return true;
                }
                visited[nbr] = true;
                stack.push((nbr, node));
            }
        }
    }
    false
}

/// Kahn's algorithm with a min-node-id frontier, so the returned ordering is
/// canonical. Errors on cyclic input.
pub fn topo_sort(graph: &GraphInstance) -> Result<Vec<usize>> {
    let n = graph.node_count;
    let adj = graph.adjacency();
    let mut indegree = vec![0usize; n];
    for e in &graph.edges {
        indegree[e.v] += 1;
    }
    let mut frontier: BinaryHeap<Reverse<usize>> = (0..n)
        .filter(|&v| indegree[v] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(node)) = frontier.pop() {
        order.push(node);
        for &nbr in &adj[node] {
            indegree[nbr] -= 1;
            if indegree[nbr] == 0 {
                frontier.push(Reverse(nbr));
            }
        }
    }
    if order.len() != n {
        return Err(Error::CycleDetected);
    }
    Ok(order)
}

/// Dijkstra with min-node-id tie-breaking; returns the minimal total weight
/// and a path realizing it.
pub fn shortest_path(graph: &GraphInstance, u: usize, v: usize) -> Result<(u64, Vec<usize>)> {
    check_node(graph, u)?;
    check_node(graph, v)?;
    if u == v {
        return Ok((0, vec![u]));
    }
    let adj = graph.adjacency_weighted();
    let mut dist = vec![u64::MAX; graph.node_count];
    let mut prev = vec![usize::MAX; graph.node_count];
    dist[u] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, u)));
    while let Some(Reverse((d, node))) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(nbr, w) in &adj[node] {
            let nd = d + w as u64;
            if nd < dist[nbr] || (nd == dist[nbr] && node < prev[nbr]) {
                dist[nbr] = nd;
                prev[nbr] = node;
                heap.push(Reverse((nd, nbr)));
            }
        }
    }
    if dist[v] == u64::MAX {
        return Err(Error::Unreachable { start: u, target: v });
    }
    let mut path = vec![v];
    let mut cur = v;
    while cur != u {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    Ok((dist[v], path))
}

/// Edmonds-Karp maximum flow; edge weights are reused as capacities.
/// Parallel residual bookkeeping uses a dense capacity matrix (N <= 30).
pub fn max_flow(graph: &GraphInstance, s: usize, t: usize) -> Result<u64> {
    check_node(graph, s)?;
    check_node(graph, t)?;
    let n = graph.node_count;
    let mut cap = vec![vec![0i64; n]; n];
    for e in &graph.edges {
        let w = e.weight.unwrap_or(1) as i64;
        cap[e.u][e.v] += w;
        if !graph.directed {
            cap[e.v][e.u] += w;
        }
    }
    let mut flow = 0i64;
    loop {
        // BFS over the residual graph.
        let mut parent = vec![usize::MAX; n];
        parent[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(node) = queue.pop_front() {
            for next in 0..n {
                if parent[next] == usize::MAX && cap[node][next] > 0 {
                    parent[next] = node;
                    queue.push_back(next);
                }
            }
        }
        if parent[t] == usize::MAX {
            break;
        }
        let mut bottleneck = i64::MAX;
        let mut cur = t;
        while cur != s {
            let p = parent[cur];
            bottleneck = bottleneck.min(cap[p][cur]);
            cur = p;
        }
        let mut cur = t;
        while cur != s {
            let p = parent[cur];
            cap[p][cur] -= bottleneck;
            cap[cur][p] += bottleneck;
            cur = p;
        }
        flow += bottleneck;
    }
    Ok(flow as u64)
}

/// Hopcroft-Karp maximum bipartite matching size.
pub fn max_bipartite_matching(graph: &GraphInstance) -> Result<u64> {
    let split = graph.bipartite.ok_or(Error::NotBipartite)?;
    let hosts = split.host_count;
    let tasks = split.task_count;
    let mut adj = vec![Vec::new(); hosts];
    for e in &graph.edges {
        if e.u >= hosts || e.v < hosts || e.v >= hosts + tasks {
            return Err(Error::NotBipartite);
        }
        adj[e.u].push(e.v - hosts);
    }
    for nbrs in &mut adj {
        nbrs.sort_unstable();
    }

    const NIL: usize = usize::MAX;
    let mut match_host = vec![NIL; hosts];
    let mut match_task = vec![NIL; tasks];
    let mut dist = vec![0u32; hosts];

    let bfs = |match_host: &[usize], match_task: &[usize], dist: &mut [u32]| -> bool {
        let mut queue = VecDeque::new();
        for h in 0..hosts {
            if match_host[h] == NIL {
                dist[h] = 0;
                queue.push_back(h);
            } else {
                dist[h] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(h) = queue.pop_front() {
            for &t in &adj[h] {
                match match_task[t] {
                    NIL => found = true,
                    h2 if dist[h2] == u32::MAX => {
                        dist[h2] = dist[h] + 1;
                        queue.push_back(h2);
                    }
                    _ => {}
                }
            }
        }
        found
    };

    fn dfs(
        h: usize,
        adj: &[Vec<usize>],
        match_host: &mut [usize],
        match_task: &mut [usize],
        dist: &mut [u32],
    ) -> bool {
        for i in 0..adj[h].len() {
            let t = adj[h][i];
            let ok = match match_task[t] {
                NIL => true,
                h2 if dist[h2] == dist[h] + 1 => dfs(h2, adj, match_host, match_task, dist),
                _ => false,
            };
            if ok {
                match_host[h] = t;
                match_task[t] = h;
                return true;
            }
        }
        dist[h] = u32::MAX;
        false
    }

    let mut matching = 0u64;
    while bfs(&match_host, &match_task, &mut dist) {
        for h in 0..hosts {
            if match_host[h] == NIL && dfs(h, &adj, &mut match_host, &mut match_task, &mut dist) {
                matching += 1;
            }
        }
    }
    Ok(matching)
}

/// Backtracking search for a Hamiltonian path starting at `start`.
/// Absence is a value, not an error.
pub fn hamilton_path_from(graph: &GraphInstance, start: usize) -> Option<Vec<usize>> {
    if start >= graph.node_count {
        return None;
    }
    let n = graph.node_count;
    if n == 1 {
        return Some(vec![start]);
    }
    let adj = graph.adjacency();
    let mut path = vec![start];
    let mut visited = 1u64 << start;
    if backtrack(&adj, n, &mut path, &mut visited) {
        Some(path)
    } else {
        None
    }
}

fn backtrack(adj: &[Vec<usize>], n: usize, path: &mut Vec<usize>, visited: &mut u64) -> bool {
    if path.len() == n {
        return true;
    }
    let last = *path.last().unwrap();
    // Prune: any unvisited node with no unvisited neighbor (and not adjacent
    // to the path head's frontier) can never be reached.
    for cand in 0..n {
        if *visited & (1 << cand) != 0 || cand == last {
            continue;
        }
        let reachable = adj[cand]
            .iter()
            .any(|&nb| *visited & (1 << nb) == 0 || nb == last);
        if !reachable {
            return false;
        }
    }
    for &next in &adj[last] {
        if *visited & (1 << next) != 0 {
            continue;
        }
        path.push(next);
        *visited |= 1 << next;
        if backtrack(adj, n, path, visited) {
            return true;
        }
        path.pop();
        *visited &= !(1 << next);
    }
    false
}
