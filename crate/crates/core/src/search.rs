//! Exact counting and existence testing of rainbow structures.
//!
//! Two independent routes are provided for Hamilton cycles: a
//! depth-first search on the coloured multigraph, and a walker on the
//! bipartite traffic graph that only moves straight ahead at coloured
//! vertices. Their counts must agree instance by instance; the tests
//! cross-check this exhaustively at small sizes.

use crate::colouring::{EquitableColouring, TrafficBipartite};
use crate::config_model::Multigraph;
use crate::error::{Error, Result};

/// Whether to count every structure or stop at the first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Count,
    Exists,
}

/// Outcome of a search; `exists == (count > 0)` in counting mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub count: u64,
    pub exists: bool,
    pub nodes_expanded: u64,
}

struct HamiltonSearch<'a> {
    n: usize,
    adj: Vec<Vec<(u32, u32)>>, // per vertex: (edge id, other endpoint)
    colour: &'a [u32],
    mode: SearchMode,
    visited: Vec<bool>,
    colour_used: Vec<bool>,
    count: u64,
    nodes: u64,
    stop: bool,
}

impl<'a> HamiltonSearch<'a> {
    fn new(mg: &Multigraph, col: &'a EquitableColouring, mode: SearchMode) -> Self {
        let mut adj = vec![Vec::new(); mg.n];
        for (e, edge) in mg.edges.iter().enumerate() {
            if edge.is_loop() {
                continue; // loops can never sit on a Hamilton cycle
            }
            adj[edge.u].push((e as u32, edge.v as u32));
            adj[edge.v].push((e as u32, edge.u as u32));
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        HamiltonSearch {
            n: mg.n,
            adj,
            colour: col.colours(),
            mode,
            visited: vec![false; mg.n],
            colour_used: vec![false; col.n_colours],
            count: 0,
            nodes: 0,
            stop: false,
        }
    }

    /// Necessary conditions for a completion: every unvisited vertex is
    /// reachable from `current` through unvisited vertices, keeps at
    /// least two usable connections, and the anchor stays attachable.
    /// Colours are ignored, so only provably dead branches are pruned.
    fn remaining_connected(&self, current: usize, remaining: usize) -> bool {
        if remaining == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![current];
        seen[current] = true;
        let mut reached = 0usize;
        let mut anchor_attachable = false;
        while let Some(v) = stack.pop() {
            for &(_, w) in &self.adj[v] {
                let w = w as usize;
                if w == 0 {
                    if v != current {
                        anchor_attachable = true;
                    }
                    continue;
                }
                if !seen[w] && !self.visited[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != remaining || !anchor_attachable {
            return false;
        }
        for v in 1..self.n {
            if self.visited[v] {
                continue;
            }
            let mut live = 0;
            for &(_, w) in &self.adj[v] {
                let w = w as usize;
                if w == 0 || w == current || !self.visited[w] {
                    live += 1;
                    if live >= 2 {
                        break;
                    }
                }
            }
            if live < 2 {
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, current: usize, depth: usize, first_edge: u32) {
        if self.stop {
            return;
        }
        self.nodes += 1;
        if depth == self.n {
            // Close back to the anchor; each unoriented cycle is counted
            // once because the closing edge id must exceed the opening one.
            for &(e, w) in &self.adj[current] {
                if w == 0 && e > first_edge && !self.colour_used[self.colour[e as usize] as usize] {
                    self.count += 1;
                    if self.mode == SearchMode::Exists {
                        self.stop = true;
                        return;
                    }
                }
            }
            return;
        }
        if !self.remaining_connected(current, self.n - depth) {
            return;
        }
        let mut idx = 0;
        while idx < self.adj[current].len() {
            let (e, w) = self.adj[current][idx];
            idx += 1;
            if w == 0
                || self.visited[w as usize]
                || self.colour_used[self.colour[e as usize] as usize]
            {
                continue;
            }
            self.visited[w as usize] = true;
            self.colour_used[self.colour[e as usize] as usize] = true;
            self.dfs(w as usize, depth + 1, first_edge);
            self.visited[w as usize] = false;
            self.colour_used[self.colour[e as usize] as usize] = false;
            if self.stop {
                return;
            }
        }
    }
}

/// Count (or detect) rainbow Hamilton cycles of a coloured multigraph.
///
/// Cycles are unoriented and unrooted; parallel edges count separately
/// and loops are never usable. The `n` edges of a counted cycle carry
/// `n` distinct colours.
pub fn count_rainbow_hamilton(
    mg: &Multigraph,
    col: &EquitableColouring,
    mode: SearchMode,
) -> Result<SearchResult> {
    if mg.n < 3 {
        return Err(Error::invalid_parameter("hamilton search needs n >= 3"));
    }
    if col.colours().len() != mg.edges.len() {
        return Err(Error::invalid_parameter(
            "colouring does not match edge count",
        ));
    }
    let mut s = HamiltonSearch::new(mg, col, mode);
    s.visited[0] = true;
    let first: Vec<(u32, u32)> = s.adj[0].clone();
    for (e, w) in first {
        if s.colour_used[s.colour[e as usize] as usize] {
            continue;
        }
        s.visited[w as usize] = true;
        s.colour_used[s.colour[e as usize] as usize] = true;
        s.dfs(w as usize, 2, e);
        s.visited[w as usize] = false;
        s.colour_used[s.colour[e as usize] as usize] = false;
        if s.stop {
            break;
        }
    }
    Ok(SearchResult {
        count: s.count,
        exists: s.count > 0,
        nodes_expanded: s.nodes,
    })
}

/// Count rainbow perfect matchings: pairwise disjoint edges of pairwise
/// distinct colours covering every vertex.
pub fn count_rainbow_matching(mg: &Multigraph, col: &EquitableColouring) -> Result<SearchResult> {
    if !mg.n.is_multiple_of(2) {
        return Err(Error::invalid_parameter(
            "perfect matchings need an even vertex count",
        ));
    }
    if col.colours().len() != mg.edges.len() {
        return Err(Error::invalid_parameter(
            "colouring does not match edge count",
        ));
    }
    let mut adj = vec![Vec::new(); mg.n];
    for (e, edge) in mg.edges.iter().enumerate() {
        if edge.is_loop() {
            continue;
        }
        adj[edge.u].push((e as u32, edge.v as u32));
        adj[edge.v].push((e as u32, edge.u as u32));
    }
    struct M<'b> {
        adj: &'b [Vec<(u32, u32)>],
        colour: &'b [u32],
        covered: Vec<bool>,
        colour_used: Vec<bool>,
        count: u64,
        nodes: u64,
    }
    impl M<'_> {
        // Always extend from the lowest uncovered vertex.
        fn rec(&mut self, from: usize) {
            self.nodes += 1;
            let v = match (from..self.covered.len()).find(|&v| !self.covered[v]) {
                Some(v) => v,
                None => {
                    self.count += 1;
                    return;
                }
            };
            self.covered[v] = true;
            for &(e, w) in &self.adj[v] {
                let w = w as usize;
                let c = self.colour[e as usize] as usize;
                if self.covered[w] || self.colour_used[c] {
                    continue;
                }
                self.covered[w] = true;
                self.colour_used[c] = true;
                self.rec(v + 1);
                self.covered[w] = false;
                self.colour_used[c] = false;
            }
            self.covered[v] = false;
        }
    }
    let mut m = M {
        adj: &adj,
        colour: col.colours(),
        covered: vec![false; mg.n],
        colour_used: vec![false; col.n_colours],
        count: 0,
        nodes: 0,
    };
    m.rec(0);
    Ok(SearchResult {
        count: m.count,
        exists: m.count > 0,
        nodes_expanded: m.nodes,
    })
}

/// Count Hamilton cycles of the bipartite graph obeying every traffic
/// rule. This walks the bipartite structure directly, independently of
/// `count_rainbow_hamilton`; the two counts agree on every instance.
pub fn count_traffic_hamilton(tb: &TrafficBipartite, mode: SearchMode) -> Result<SearchResult> {
    if tb.n_plain < 3 {
        return Err(Error::invalid_parameter("hamilton search needs n >= 3"));
    }
    struct T<'b> {
        tb: &'b TrafficBipartite,
        plain_seen: Vec<bool>,
        col_seen: Vec<bool>,
        mode: SearchMode,
        count: u64,
        nodes: u64,
        stop: bool,
    }
    impl T<'_> {
        fn walk(&mut self, plain: usize, depth: usize, first_bip: u32) {
            if self.stop {
                return;
            }
            self.nodes += 1;
            let adj_len = self.tb.plain_adj[plain].len();
            for i in 0..adj_len {
                let b = self.tb.plain_adj[plain][i];
                let c = self.tb.edges[b as usize].coloured as usize;
                if self.col_seen[c] {
                    continue;
                }
                let out = self.tb.partner(b as usize);
                let next = self.tb.edges[out].plain as usize;
                if depth == self.tb.n_plain {
                    // All plain vertices visited; the walk must return to
                    // the anchor. Reversal symmetry is broken by asking
                    // the first bipartite edge id to be the smaller one.
                    if next == 0 && b > first_bip {
                        self.count += 1;
                        if self.mode == SearchMode::Exists {
                            self.stop = true;
                            return;
                        }
                    }
                    continue;
                }
                if next == 0 || self.plain_seen[next] {
                    continue;
                }
                self.plain_seen[next] = true;
                self.col_seen[c] = true;
                self.walk(next, depth + 1, first_bip);
                self.plain_seen[next] = false;
                self.col_seen[c] = false;
                if self.stop {
                    return;
                }
            }
        }
    }
    let mut t = T {
        tb,
        plain_seen: vec![false; tb.n_plain],
        col_seen: vec![false; tb.n_coloured],
        mode,
        count: 0,
        nodes: 0,
        stop: false,
    };
    t.plain_seen[0] = true;
    let first: Vec<u32> = tb.plain_adj[0].clone();
    for b in first {
        let c = tb.edges[b as usize].coloured as usize;
        let out = tb.partner(b as usize);
        let next = tb.edges[out].plain as usize;
        if next == 0 || t.plain_seen[next] {
            continue;
        }
        t.plain_seen[next] = true;
        t.col_seen[c] = true;
        t.walk(next, 2, b);
        t.plain_seen[next] = false;
        t.col_seen[c] = false;
        if t.stop {
            break;
        }
    }
    Ok(SearchResult {
        count: t.count,
        exists: t.count > 0,
        nodes_expanded: t.nodes,
    })
}
