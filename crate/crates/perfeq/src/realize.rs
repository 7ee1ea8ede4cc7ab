//! Realizes per-player score totals as concrete game results.
//!
//! Given a pairing graph and half-point player totals, finds chess results
//! (`0`, `0.5`, `1` per game) whose row sums hit the totals exactly, or
//! reports that none exist. Equilibrium ratings depend on a tournament only
//! through per-player totals and opponent multisets, so any realization is
//! as good as any other; this one is deterministic.
//!
//! Reduction: count in half-points and solve a max-flow problem —
//! source -> player `i` with capacity `2 * m_i`, player -> each of their
//! games with capacity 2, game -> sink with capacity 2. The totals are
//! realizable iff the flow saturates every sink edge.

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: u32,
}

struct Dinic {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    next: Vec<usize>,
}

impl Dinic {
    fn new(nodes: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: vec![-1; nodes],
            next: vec![0; nodes],
        }
    }

    /// Returns the index of the forward edge.
    fn add_edge(&mut self, from: usize, to: usize, cap: u32) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.edges.push(Edge { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    fn bfs(&mut self, src: usize, sink: usize) -> bool {
        self.level.fill(-1);
        self.level[src] = 0;
        let mut queue = alloc_queue();
        queue.push(src);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    queue.push(to);
                }
            }
        }
        self.level[sink] >= 0
    }

    fn dfs(&mut self, u: usize, sink: usize, pushed: u32) -> u32 {
        if u == sink {
            return pushed;
        }
        while self.next[u] < self.adj[u].len() {
            let e = self.adj[u][self.next[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let got = self.dfs(to, sink, pushed.min(cap));
                if got > 0 {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            self.next[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, src: usize, sink: usize) -> u32 {
        let mut flow = 0;
        while self.bfs(src, sink) {
            self.next.fill(0);
            loop {
                let pushed = self.dfs(src, sink, u32::MAX);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }
}

fn alloc_queue() -> Vec<usize> {
    Vec::new()
}

/// Half-point count of a score total, or `None` when the total is not a
/// half-integer.
fn half_points(m: f64) -> Option<u32> {
    let doubled = m * 2.0;
    let rounded = doubled.round();
    if (doubled - rounded).abs() < 1e-9 && rounded >= 0.0 {
        Some(rounded as u32)
    } else {
        None
    }
}

/// Finds `score_a` values for each pair `(a, b)` in `pairs` such that every
/// player's games sum to `points[player]`. Totals must be half-integers
/// that sum to the number of games. Returns `None` when no assignment
/// exists.
pub fn realize_scores(n: usize, pairs: &[(usize, usize)], points: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(points.len(), n);
    let games = pairs.len();
    let halves: Vec<u32> = points
        .iter()
        .map(|&m| half_points(m))
        .collect::<Option<_>>()?;
    if halves.iter().map(|&h| h as u64).sum::<u64>() != 2 * games as u64 {
        return None;
    }

    // Nodes: 0 source, 1..=n players, n+1..=n+games games, n+games+1 sink.
    let src = 0;
    let sink = n + games + 1;
    let mut net = Dinic::new(sink + 1);
    for (i, &h) in halves.iter().enumerate() {
        net.add_edge(src, 1 + i, h);
    }
    let mut a_edges = Vec::with_capacity(games);
    for (g, &(a, b)) in pairs.iter().enumerate() {
        assert!(a < n && b < n && a != b);
        let game_node = n + 1 + g;
        a_edges.push(net.add_edge(1 + a, game_node, 2));
        net.add_edge(1 + b, game_node, 2);
        net.add_edge(game_node, sink, 2);
    }

    let flow = net.max_flow(src, sink);
    if flow != 2 * games as u32 {
        return None;
    }

    Some(
        a_edges
            .iter()
            .map(|&e| {
                let used = 2 - net.edges[e].cap;
                f64::from(used) / 2.0
            })
            .collect(),
    )
}
