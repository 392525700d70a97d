//! Short-cycle census on the bipartite traffic graph.
//!
//! The statistic of interest is the number of cycles of length `2i`
//! passing through exactly `j` coloured vertices where the two used
//! half-edges are not traffic partners. Cycles are read at the
//! configuration level: a `2i`-cycle is a closed alternating sequence of
//! `2i` distinct bipartite edges through `i` distinct plain and `i`
//! distinct coloured vertices, which keeps the definition exact in the
//! presence of loops and parallel edges.
//!
//! Two enumerations are implemented: a canonical depth-first walk (any
//! cycle length, the reference), and a composition of coloured "links"
//! that covers `i <= 3` in near-linear time for the Monte Carlo harness.
//! The tests require them to agree entry by entry.

use crate::colouring::{EquitableColouring, TrafficBipartite};
use crate::config_model::Multigraph;
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Counts of `2i`-cycles by (cycle half-length, traffic violations).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusTable {
    pub i_max: usize,
    counts: Vec<Vec<u64>>,
}

impl CensusTable {
    pub fn new(i_max: usize) -> Self {
        CensusTable {
            i_max,
            counts: (1..=i_max).map(|i| vec![0u64; i + 1]).collect(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i - 1][j]
    }

    #[inline]
    fn add(&mut self, i: usize, j: usize) {
        self.counts[i - 1][j] += 1;
    }

    /// Total number of `2i`-cycles regardless of violations.
    pub fn total(&self, i: usize) -> u64 {
        self.counts[i - 1].iter().sum()
    }

    /// Entrywise sum, for merging per-instance tables.
    pub fn merge(&mut self, other: &CensusTable) {
        assert_eq!(self.i_max, other.i_max);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    /// CSV rows `i,j,count` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,count\n");
        for i in 1..=self.i_max {
            for j in 0..=i {
                out.push_str(&format!("{},{},{}\n", i, j, self.get(i, j)));
            }
        }
        out
    }
}

/// A transit through one coloured vertex: an unordered pair of its
/// bipartite edges. `viol` is false exactly when the pair is a traffic
/// partner pair, i.e. the two halves of one multigraph edge.
#[derive(Clone, Copy, Debug)]
struct Link {
    p1: u32,
    p2: u32,
    colour: u32,
    viol: bool,
    b1: u32,
    b2: u32,
}

impl Link {
    /// Far endpoint of the multigraph edge owning bipartite edge `b`.
    fn far(tb: &TrafficBipartite, b: u32) -> u32 {
        tb.edges[(b ^ 1) as usize].plain
    }
}

fn build_links(tb: &TrafficBipartite) -> Vec<Link> {
    let mut links = Vec::new();
    for c in 0..tb.n_coloured {
        let inc = &tb.coloured_adj[c];
        for x in 0..inc.len() {
            for y in x + 1..inc.len() {
                let (b1, b2) = (inc[x], inc[y]);
                links.push(Link {
                    p1: tb.edges[b1 as usize].plain,
                    p2: tb.edges[b2 as usize].plain,
                    colour: c as u32,
                    viol: b2 != (b1 ^ 1),
                    b1,
                    b2,
                });
            }
        }
    }
    links
}

/// Visit every cycle of half-length `i <= i_max <= 3` exactly once as
/// `(i, j, links)`. A cycle is one link for `i = 1`, a pair of links on
/// one plain cell pair for `i = 2`, and a link triangle for `i = 3`;
/// colour distinctness of the links makes their bipartite edges
/// automatically disjoint.
fn visit_link_cycles<F: FnMut(usize, usize, &[Link])>(
    tb: &TrafficBipartite,
    i_max: usize,
    mut visit: F,
) {
    let links = build_links(tb);

    for l in &links {
        if l.p1 == l.p2 {
            visit(1, l.viol as usize, std::slice::from_ref(l));
        }
    }
    if i_max < 2 {
        return;
    }

    let mut by_pair: HashMap<(u32, u32), Vec<Link>> = HashMap::new();
    for l in &links {
        if l.p1 != l.p2 {
            let key = (l.p1.min(l.p2), l.p1.max(l.p2));
            by_pair.entry(key).or_default().push(*l);
        }
    }

    for group in by_pair.values() {
        for a in 0..group.len() {
            for b in a + 1..group.len() {
                if group[a].colour != group[b].colour {
                    let j = group[a].viol as usize + group[b].viol as usize;
                    visit(2, j, &[group[a], group[b]]);
                }
            }
        }
    }
    if i_max < 3 {
        return;
    }

    let mut neighbours: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(a, b) in by_pair.keys() {
        neighbours.entry(a).or_default().push(b);
        neighbours.entry(b).or_default().push(a);
    }
    for ns in neighbours.values_mut() {
        ns.sort_unstable();
        ns.dedup();
    }
    let mut anchors: Vec<u32> = neighbours.keys().copied().collect();
    anchors.sort_unstable();
    for &u in &anchors {
        let above: Vec<u32> = neighbours[&u].iter().copied().filter(|&x| x > u).collect();
        for vi in 0..above.len() {
            for wi in vi + 1..above.len() {
                let (v, w) = (above[vi], above[wi]);
                let Some(gvw) = by_pair.get(&(v, w)) else { continue };
                let guv = &by_pair[&(u, v)];
                let guw = &by_pair[&(u, w)];
                for la in guv {
                    for lb in guw {
                        if lb.colour == la.colour {
                            continue;
                        }
                        for lc in gvw {
                            if lc.colour == la.colour || lc.colour == lb.colour {
                                continue;
                            }
                            let j = la.viol as usize + lb.viol as usize + lc.viol as usize;
                            visit(3, j, &[*la, *lb, *lc]);
                        }
                    }
                }
            }
        }
    }
}

fn check_i_max(tb: &TrafficBipartite, i_max: usize) -> Result<()> {
    if i_max == 0 || i_max > tb.n_plain {
        return Err(Error::invalid_parameter(format!(
            "i_max must lie in 1..=n_plain, got {i_max}"
        )));
    }
    Ok(())
}

struct Walker<'a> {
    tb: &'a TrafficBipartite,
    i_max: usize,
    start: usize,
    plain_seen: Vec<bool>,
    col_seen: Vec<bool>,
}

impl Walker<'_> {
    /// `current` is a plain vertex reached via bipartite edge `arrived`;
    /// `steps` coloured transits are complete.
    fn extend(&mut self, current: usize, arrived: u32, steps: usize, j: usize, first_b: u32, table: &mut CensusTable) {
        let deg = self.tb.plain_adj[current].len();
        for bi in 0..deg {
            let b = self.tb.plain_adj[current][bi];
            if b == arrived {
                continue;
            }
            let c = self.tb.edges[b as usize].coloured as usize;
            if self.col_seen[c] {
                continue;
            }
            let cdeg = self.tb.coloured_adj[c].len();
            for oi in 0..cdeg {
                let out = self.tb.coloured_adj[c][oi];
                if out == b {
                    continue;
                }
                let nv = self.tb.edges[out as usize].plain as usize;
                let viol = (out != (b ^ 1)) as usize;
                if nv == self.start {
                    if out > first_b {
                        table.add(steps + 1, j + viol);
                    }
                    continue;
                }
                if steps + 2 > self.i_max || nv < self.start || self.plain_seen[nv] {
                    continue;
                }
                self.plain_seen[nv] = true;
                self.col_seen[c] = true;
                self.extend(nv, out, steps + 1, j + viol, first_b, table);
                self.plain_seen[nv] = false;
                self.col_seen[c] = false;
            }
        }
    }
}

/// Reference enumeration: canonical depth-first walks anchored at the
/// least plain vertex of each cycle, reversal broken on the two anchor
/// edges. Cost grows like `n (d-1)^{2 i_max}`; fine up to `i_max = 6` at
/// desk sizes.
pub fn census_walks(tb: &TrafficBipartite, i_max: usize) -> Result<CensusTable> {
    check_i_max(tb, i_max)?;
    let mut table = CensusTable::new(i_max);
    for start in 0..tb.n_plain {
        let mut w = Walker {
            tb,
            i_max,
            start,
            plain_seen: vec![false; tb.n_plain],
            col_seen: vec![false; tb.n_coloured],
        };
        w.plain_seen[start] = true;
        let first: Vec<u32> = tb.plain_adj[start].clone();
        for b in first {
            let c = tb.edges[b as usize].coloured as usize;
            let cdeg = tb.coloured_adj[c].len();
            for oi in 0..cdeg {
                let out = tb.coloured_adj[c][oi];
                if out == b {
                    continue;
                }
                let nv = tb.edges[out as usize].plain as usize;
                let viol = (out != (b ^ 1)) as usize;
                if nv == start {
                    if out > b {
                        table.add(1, viol);
                    }
                    continue;
                }
                if i_max < 2 || nv < start {
                    continue;
                }
                w.plain_seen[nv] = true;
                w.col_seen[c] = true;
                w.extend(nv, out, 1, viol, b, &mut table);
                w.plain_seen[nv] = false;
                w.col_seen[c] = false;
            }
        }
    }
    Ok(table)
}

/// Census of `X_{i,j}` for `i <= i_max`.
///
/// Dispatches to the link composition for `i_max <= 3` and to the
/// reference walk otherwise; both enumerate each cycle exactly once.
pub fn census(tb: &TrafficBipartite, i_max: usize) -> Result<CensusTable> {
    check_i_max(tb, i_max)?;
    if i_max <= 3 {
        let mut table = CensusTable::new(i_max);
        visit_link_cycles(tb, i_max, |i, j, _| table.add(i, j));
        Ok(table)
    } else {
        census_walks(tb, i_max)
    }
}

/// Direct multigraph counts mirroring the census interpretation, plus
/// the degeneracy diagnosis for the single-violation column.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CrossCheckReport {
    pub i_max: usize,
    /// `X_{i,0}` from the census.
    pub x_i0: Vec<u64>,
    /// Rainbow cycles of length `i` counted directly in the multigraph.
    pub rainbow_cycles: Vec<u64>,
    /// `X_{i,1}` from the census.
    pub x_i1: Vec<u64>,
    /// Paths of length `i+1` with equal first and last edge colours, all
    /// vertices distinct and interior colours distinct, counted directly
    /// in the multigraph.
    pub same_end_colour_paths: Vec<u64>,
    /// Single-violation cycles whose multigraph shape collapses
    /// (coinciding endpoints or loops); `x_i1 = paths + degenerate`.
    pub degenerate: Vec<u64>,
}

impl CrossCheckReport {
    /// True when every compared column agrees, i.e. no degeneracy.
    pub fn agrees(&self) -> bool {
        self.x_i0 == self.rainbow_cycles
            && self
                .x_i1
                .iter()
                .zip(&self.same_end_colour_paths)
                .all(|(a, b)| a == b)
    }
}

/// Compare the census columns `X_{i,0}` and `X_{i,1}` with their direct
/// multigraph interpretations, for `i_max <= 3`.
pub fn interpret_cross_check(
    mg: &Multigraph,
    col: &EquitableColouring,
    i_max: usize,
) -> Result<CrossCheckReport> {
    if i_max > 3 {
        return Err(Error::invalid_parameter(
            "interpret_cross_check supports i_max <= 3",
        ));
    }
    let tb = crate::colouring::build_bipartite(mg, col)?;
    check_i_max(&tb, i_max)?;

    let mut x_i0 = vec![0u64; i_max];
    let mut x_i1 = vec![0u64; i_max];
    let mut degenerate = vec![0u64; i_max];
    visit_link_cycles(&tb, i_max, |i, j, links| {
        if j == 0 {
            x_i0[i - 1] += 1;
        } else if j == 1 {
            x_i1[i - 1] += 1;
            if violating_cycle_is_degenerate(&tb, links) {
                degenerate[i - 1] += 1;
            }
        }
    });

    let rainbow_cycles = (1..=i_max)
        .map(|i| count_rainbow_cycles(mg, col, i))
        .collect();
    let same_end_colour_paths = (1..=i_max)
        .map(|i| count_same_end_paths(mg, col, i))
        .collect();

    Ok(CrossCheckReport {
        i_max,
        x_i0,
        rainbow_cycles,
        x_i1,
        same_end_colour_paths,
        degenerate,
    })
}

/// A single-violation cycle corresponds to a genuine path of length
/// `i+1` unless an attachment endpoint lands back on the cycle cells or
/// the two attachments meet.
fn violating_cycle_is_degenerate(tb: &TrafficBipartite, links: &[Link]) -> bool {
    let viol = links.iter().find(|l| l.viol).expect("one violating link");
    let mut cells: Vec<u32> = links.iter().flat_map(|l| [l.p1, l.p2]).collect();
    cells.sort_unstable();
    cells.dedup();
    let fa = Link::far(tb, viol.b1);
    let fb = Link::far(tb, viol.b2);
    fa == fb || cells.contains(&fa) || cells.contains(&fb)
}

/// Cycles of length `i` in the multigraph whose edges carry pairwise
/// distinct colours; loops for `i = 1`, parallel pairs for `i = 2`.
fn count_rainbow_cycles(mg: &Multigraph, col: &EquitableColouring, i: usize) -> u64 {
    if i == 1 {
        return mg.edges.iter().filter(|e| e.is_loop()).count() as u64;
    }
    let mut adj = vec![Vec::new(); mg.n];
    for (e, edge) in mg.edges.iter().enumerate() {
        if edge.is_loop() {
            continue;
        }
        adj[edge.u].push((e as u32, edge.v as u32));
        adj[edge.v].push((e as u32, edge.u as u32));
    }
    struct C<'a> {
        adj: &'a [Vec<(u32, u32)>],
        colour: &'a [u32],
        len: usize,
        start: usize,
        visited: Vec<bool>,
        col_used: Vec<bool>,
        count: u64,
    }
    impl C<'_> {
        fn dfs(&mut self, v: usize, prev_edge: u32, depth: usize, first_edge: u32) {
            let deg = self.adj[v].len();
            for idx in 0..deg {
                let (e, w) = self.adj[v][idx];
                if e == prev_edge || self.col_used[self.colour[e as usize] as usize] {
                    continue;
                }
                let w = w as usize;
                if depth == self.len - 1 {
                    if w == self.start && e > first_edge {
                        self.count += 1;
                    }
                    continue;
                }
                if w <= self.start || self.visited[w] {
                    continue;
                }
                self.visited[w] = true;
                self.col_used[self.colour[e as usize] as usize] = true;
                self.dfs(w, e, depth + 1, first_edge);
                self.visited[w] = false;
                self.col_used[self.colour[e as usize] as usize] = false;
            }
        }
    }
    let mut total = 0;
    for start in 0..mg.n {
        let mut c = C {
            adj: &adj,
            colour: col.colours(),
            len: i,
            start,
            visited: vec![false; mg.n],
            col_used: vec![false; col.n_colours],
            count: 0,
        };
        c.visited[start] = true;
        let first: Vec<(u32, u32)> = adj[start].clone();
        for (e, w) in first {
            let w = w as usize;
            if w < start {
                continue;
            }
            c.visited[w] = true;
            c.col_used[col.colour(e as usize)] = true;
            c.dfs(w, e, 1, e);
            c.visited[w] = false;
            c.col_used[col.colour(e as usize)] = false;
        }
        total += c.count;
    }
    total
}

/// Paths with `i+1` edges, all vertices distinct, equal first and last
/// edge colours, interior colours pairwise distinct and different from
/// the end colour. Each path is counted once (smaller endpoint first).
fn count_same_end_paths(mg: &Multigraph, col: &EquitableColouring, i: usize) -> u64 {
    if i == 0 {
        return 0;
    }
    let mut adj = vec![Vec::new(); mg.n];
    for (e, edge) in mg.edges.iter().enumerate() {
        if edge.is_loop() {
            continue;
        }
        adj[edge.u].push((e as u32, edge.v as u32));
        adj[edge.v].push((e as u32, edge.u as u32));
    }
    struct P<'a> {
        adj: &'a [Vec<(u32, u32)>],
        colour: &'a [u32],
        edges_total: usize,
        visited: Vec<bool>,
        col_used: Vec<bool>,
        end_colour: u32,
        v0: usize,
        count: u64,
    }
    impl P<'_> {
        fn dfs(&mut self, v: usize, depth: usize) {
            let deg = self.adj[v].len();
            for idx in 0..deg {
                let (e, w) = self.adj[v][idx];
                let c = self.colour[e as usize];
                let w = w as usize;
                if self.visited[w] {
                    continue;
                }
                if depth == self.edges_total - 1 {
                    // Final edge: colour matches the first edge, and the
                    // far endpoint beats v0 to break reversal.
                    if c == self.end_colour && w > self.v0 {
                        self.count += 1;
                    }
                    continue;
                }
                if c == self.end_colour || self.col_used[c as usize] {
                    continue;
                }
                self.visited[w] = true;
                self.col_used[c as usize] = true;
                self.dfs(w, depth + 1);
                self.visited[w] = false;
                self.col_used[c as usize] = false;
            }
        }
    }
    let mut total = 0;
    for v0 in 0..mg.n {
        for &(e0, v1) in &adj[v0] {
            let mut p = P {
                adj: &adj,
                colour: col.colours(),
                edges_total: i + 1,
                visited: vec![false; mg.n],
                col_used: vec![false; col.n_colours],
                end_colour: col.colour(e0 as usize) as u32,
                v0,
                count: 0,
            };
            p.visited[v0] = true;
            p.visited[v1 as usize] = true;
            p.dfs(v1 as usize, 1);
            total += p.count;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::{build_bipartite, sample_colouring_with, EquitableColouring};
    use crate::config_model::{
        project_multigraph, sample_pairing_with, DegreeSpec, Edge, Multigraph, Pairing,
    };
    use crate::rng::stream_rng;
    use crate::search::{count_rainbow_hamilton, SearchMode};

    fn tb_of(mg: &Multigraph, col: &EquitableColouring) -> TrafficBipartite {
        build_bipartite(mg, col).unwrap()
    }

    #[test]
    fn a_loop_is_a_traffic_obeying_two_cycle() {
        let spec = DegreeSpec::new(1, 2).unwrap();
        let p = Pairing::from_partner(spec, vec![1, 0]).unwrap();
        let mg = project_multigraph(&p);
        let col = EquitableColouring::new(1, 1, vec![0]).unwrap();
        let t = census(&tb_of(&mg, &col), 1).unwrap();
        assert_eq!(t.get(1, 0), 1);
        assert_eq!(t.get(1, 1), 0);
    }

    #[test]
    fn same_coloured_parallel_edges_violate_at_both_ends() {
        let mg = Multigraph {
            n: 2,
            degree: 2,
            edges: vec![
                Edge { u: 0, v: 1, hu: 0, hv: 2 },
                Edge { u: 0, v: 1, hu: 1, hv: 3 },
            ],
        };
        let col = EquitableColouring::new(1, 2, vec![0, 0]).unwrap();
        let t = census(&tb_of(&mg, &col), 1).unwrap();
        assert_eq!(t.get(1, 0), 0);
        assert_eq!(t.get(1, 1), 2);
    }

    #[test]
    fn differently_coloured_parallel_edges_form_a_rainbow_two_cycle() {
        let mg = Multigraph {
            n: 2,
            degree: 2,
            edges: vec![
                Edge { u: 0, v: 1, hu: 0, hv: 2 },
                Edge { u: 0, v: 1, hu: 1, hv: 3 },
            ],
        };
        let col = EquitableColouring::new(2, 1, vec![0, 1]).unwrap();
        let t = census(&tb_of(&mg, &col), 2).unwrap();
        assert_eq!(t.get(1, 0), 0);
        assert_eq!(t.get(1, 1), 0);
        // One colour class per edge leaves no violating transit at all.
        assert_eq!(t.get(2, 0), 1);
        assert_eq!(t.get(2, 1), 0);
        assert_eq!(t.get(2, 2), 0);
        assert_eq!(t.total(2), 1);
    }

    #[test]
    fn link_and_walk_census_agree_on_random_instances() {
        for t in 0..200 {
            let (n, d) = [(4usize, 4usize), (5, 4), (6, 4), (4, 6), (8, 4)][t as usize % 5];
            let spec = DegreeSpec::new(n, d).unwrap();
            let mut rng = stream_rng(555, t);
            let mg = project_multigraph(&sample_pairing_with(spec, &mut rng));
            let col = sample_colouring_with(&mg, n, d / 2, &mut rng).unwrap();
            let tb = tb_of(&mg, &col);
            let i_max = 3.min(n);
            let fast = census(&tb, i_max).unwrap();
            let slow = census_walks(&tb, i_max).unwrap();
            assert_eq!(fast, slow, "(n,d)=({n},{d}) trial {t}");
        }
    }

    #[test]
    fn hamilton_count_equals_full_length_traffic_obeying_cycles() {
        let spec = DegreeSpec::new(4, 4).unwrap();
        for t in 0..300 {
            let mut rng = stream_rng(808, t);
            let mg = project_multigraph(&sample_pairing_with(spec, &mut rng));
            let col = sample_colouring_with(&mg, 4, 2, &mut rng).unwrap();
            let tb = tb_of(&mg, &col);
            let table = census_walks(&tb, 4).unwrap();
            let y = count_rainbow_hamilton(&mg, &col, SearchMode::Count).unwrap();
            assert_eq!(table.get(4, 0), y.count);
        }
    }

    #[test]
    fn census_is_invariant_under_colour_relabelling() {
        let spec = DegreeSpec::new(6, 4).unwrap();
        let mut rng = stream_rng(99, 0);
        let mg = project_multigraph(&sample_pairing_with(spec, &mut rng));
        let col = sample_colouring_with(&mg, 6, 2, &mut rng).unwrap();
        let base = census(&tb_of(&mg, &col), 3).unwrap();
        let relabelled: Vec<u32> = col
            .colours()
            .iter()
            .map(|&c| (c + 4) % col.n_colours as u32)
            .collect();
        let col2 = EquitableColouring::new(col.n_colours, col.q, relabelled).unwrap();
        let t2 = census(&tb_of(&mg, &col2), 3).unwrap();
        assert_eq!(base, t2);
    }

    #[test]
    fn cross_check_on_a_rainbow_triangle() {
        let spec = DegreeSpec::new(3, 2).unwrap();
        let p = Pairing::from_partner(spec, vec![5, 2, 1, 4, 3, 0]).unwrap();
        let mg = project_multigraph(&p);
        let col = EquitableColouring::new(3, 1, vec![0, 1, 2]).unwrap();
        let r = interpret_cross_check(&mg, &col, 3).unwrap();
        assert_eq!(r.rainbow_cycles, vec![0, 0, 1]);
        assert_eq!(r.x_i0, vec![0, 0, 1]);
        assert!(r.agrees());
    }

    #[test]
    fn cross_check_on_a_two_path_with_equal_colours() {
        // Path a-b-c, both edges coloured alike; vertex d mops up the
        // remaining degree with a distinct colour.
        let mg = Multigraph {
            n: 4,
            degree: 1,
            edges: vec![
                Edge { u: 0, v: 1, hu: 0, hv: 1 },
                Edge { u: 1, v: 2, hu: 2, hv: 3 },
                Edge { u: 0, v: 3, hu: 4, hv: 5 },
                Edge { u: 2, v: 3, hu: 6, hv: 7 },
            ],
        };
        let col = EquitableColouring::new(2, 2, vec![0, 0, 1, 1]).unwrap();
        let r = interpret_cross_check(&mg, &col, 1).unwrap();
        // a-b-c via colour 0, and mirrored a-d-c via colour 1.
        assert_eq!(r.x_i1, vec![2]);
        assert_eq!(r.same_end_colour_paths, vec![2]);
        assert_eq!(r.degenerate, vec![0]);
        assert!(r.agrees());
    }

    #[test]
    fn x_i1_decomposes_into_paths_plus_degenerate() {
        for t in 0..400 {
            let (n, d) = [(5usize, 4usize), (6, 4), (8, 4), (6, 6)][t as usize % 4];
            let spec = DegreeSpec::new(n, d).unwrap();
            let mut rng = stream_rng(4242, t);
            let mg = project_multigraph(&sample_pairing_with(spec, &mut rng));
            let col = sample_colouring_with(&mg, n, d / 2, &mut rng).unwrap();
            let r = interpret_cross_check(&mg, &col, 3).unwrap();
            for i in 0..3 {
                assert_eq!(
                    r.x_i1[i],
                    r.same_end_colour_paths[i] + r.degenerate[i],
                    "i={} trial {t}",
                    i + 1
                );
                assert_eq!(r.x_i0[i], r.rainbow_cycles[i], "i={} trial {t}", i + 1);
            }
        }
    }

    #[test]
    fn i_max_bounds_are_enforced() {
        let spec = DegreeSpec::new(3, 4).unwrap();
        let mg = project_multigraph(&sample_pairing_with(spec, &mut stream_rng(1, 0)));
        let col = sample_colouring_with(&mg, 3, 2, &mut stream_rng(1, 1)).unwrap();
        let tb = tb_of(&mg, &col);
        assert!(census(&tb, 0).is_err());
        assert!(census(&tb, 4).is_err());
        assert!(interpret_cross_check(&mg, &col, 3).is_ok());
    }
}
