//! Equitable edge colourings and the bipartite traffic-rule view.
//!
//! An equitable colouring assigns `q` edges to each of `C` colours.
//! Splitting every edge at a new vertex and merging the split points of
//! each colour class yields a bipartite multigraph whose coloured
//! vertices carry a pairing of their incident half-edges: a walk obeys
//! the traffic rule at a coloured vertex when it leaves through the
//! half-edge paired with its entry. Hamilton cycles of the bipartite
//! graph obeying all traffic rules correspond one-to-one to rainbow
//! Hamilton cycles of the original coloured multigraph.

use crate::config_model::Multigraph;
use crate::error::{Error, Result};
use crate::exact::equitable_colouring_count;
use crate::rng::{stream_rng, DetRng};
use num_bigint::BigInt;
use rand::seq::SliceRandom;

/// Edge colouring with exactly `q` edges per colour; colours are stored
/// zero-based, and printed one-based in the CSV form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquitableColouring {
    pub n_colours: usize,
    pub q: usize,
    colour: Vec<u32>,
}

impl EquitableColouring {
    pub fn new(n_colours: usize, q: usize, colour: Vec<u32>) -> Result<Self> {
        if colour.len() != n_colours * q {
            return Err(Error::invalid_parameter(format!(
                "edge count {} != colours*q = {}",
                colour.len(),
                n_colours * q
            )));
        }
        let mut class_size = vec![0usize; n_colours];
        for &c in &colour {
            if c as usize >= n_colours {
                return Err(Error::invalid_parameter("colour out of range"));
            }
            class_size[c as usize] += 1;
        }
        if class_size.iter().any(|&s| s != q) {
            return Err(Error::invalid_parameter("colouring is not equitable"));
        }
        Ok(EquitableColouring { n_colours, q, colour })
    }

    #[inline]
    pub fn colour(&self, edge: usize) -> usize {
        self.colour[edge] as usize
    }

    pub fn colours(&self) -> &[u32] {
        &self.colour
    }

    /// CSV form `edge_id,colour` with a header row, colours one-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("edge_id,colour\n");
        for (e, &c) in self.colour.iter().enumerate() {
            out.push_str(&format!("{},{}\n", e, c + 1));
        }
        out
    }

    pub fn parse_csv(n_colours: usize, q: usize, text: &str) -> Result<Self> {
        let mut colour = vec![u32::MAX; n_colours * q];
        for line in text.lines().skip(1) {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (e, c) = line
                .split_once(',')
                .ok_or_else(|| Error::invalid_parameter(format!("bad csv line: {line}")))?;
            let e: usize = e
                .parse()
                .map_err(|_| Error::invalid_parameter(format!("bad edge id: {e}")))?;
            let c: u32 = c
                .parse()
                .map_err(|_| Error::invalid_parameter(format!("bad colour: {c}")))?;
            if e >= colour.len() || c == 0 {
                return Err(Error::invalid_parameter(format!("csv entry out of range: {line}")));
            }
            colour[e] = c - 1;
        }
        EquitableColouring::new(n_colours, q, colour)
    }
}

/// Uniform equitable colouring of the edges of `mg`, from `seed`.
pub fn sample_colouring(
    mg: &Multigraph,
    colours: usize,
    q: usize,
    seed: u64,
) -> Result<EquitableColouring> {
    sample_colouring_with(mg, colours, q, &mut stream_rng(seed, 0))
}

pub fn sample_colouring_with(
    mg: &Multigraph,
    colours: usize,
    q: usize,
    rng: &mut DetRng,
) -> Result<EquitableColouring> {
    if mg.edges.len() != colours * q {
        return Err(Error::invalid_parameter(format!(
            "edge count {} != colours*q = {}",
            mg.edges.len(),
            colours * q
        )));
    }
    // A uniform shuffle of the colour multiset induces the uniform
    // distribution over equitable colourings ((q!)^C list orders each).
    let mut deck: Vec<u32> = (0..colours as u32)
        .flat_map(|c| std::iter::repeat_n(c, q))
        .collect();
    deck.shuffle(rng);
    EquitableColouring::new(colours, q, deck)
}

/// All equitable colourings in lexicographic order, when there are at
/// most 10^6 of them.
pub fn enumerate_colourings(
    edge_count: usize,
    colours: usize,
    q: usize,
) -> Result<ColouringEnumerator> {
    if edge_count != colours * q {
        return Err(Error::invalid_parameter(format!(
            "edge count {edge_count} != colours*q = {}",
            colours * q
        )));
    }
    let total = equitable_colouring_count(colours as u64, q as u64);
    if total > BigInt::from(1_000_000u64) {
        return Err(Error::size_limit(format!(
            "{total} equitable colourings exceed the enumeration bound 10^6"
        )));
    }
    let first: Vec<u32> = (0..colours as u32)
        .flat_map(|c| std::iter::repeat_n(c, q))
        .collect();
    Ok(ColouringEnumerator {
        n_colours: colours,
        q,
        state: Some(first),
    })
}

pub struct ColouringEnumerator {
    n_colours: usize,
    q: usize,
    state: Option<Vec<u32>>,
}

/// In-place next multiset permutation in lexicographic order.
fn next_multiset_perm(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

impl Iterator for ColouringEnumerator {
    type Item = EquitableColouring;

    fn next(&mut self) -> Option<EquitableColouring> {
        let state = self.state.as_mut()?;
        let out = EquitableColouring {
            n_colours: self.n_colours,
            q: self.q,
            colour: state.clone(),
        };
        if !next_multiset_perm(state) {
            self.state = None;
        }
        Some(out)
    }
}

/// One bipartite edge; it is the image of one multigraph half-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipEdge {
    pub plain: u32,
    pub coloured: u32,
    /// Originating multigraph half-edge.
    pub half: u32,
}

/// Bipartite traffic-rule multigraph: plain vertices on one side,
/// coloured vertices on the other, and at every coloured vertex a
/// fixed-point-free pairing of its incident bipartite edges.
///
/// Bipartite edges come in consecutive pairs `(2e, 2e+1)` for multigraph
/// edge `e`, so the traffic partner of bipartite edge `b` is `b ^ 1`.
#[derive(Clone, Debug)]
pub struct TrafficBipartite {
    pub n_plain: usize,
    pub n_coloured: usize,
    pub edges: Vec<BipEdge>,
    pub plain_adj: Vec<Vec<u32>>,
    pub coloured_adj: Vec<Vec<u32>>,
}

impl TrafficBipartite {
    /// Traffic partner of a bipartite edge at its coloured vertex.
    #[inline]
    pub fn partner(&self, b: usize) -> usize {
        b ^ 1
    }

    /// Multigraph edge that bipartite edge `b` belongs to.
    #[inline]
    pub fn multigraph_edge(&self, b: usize) -> usize {
        b / 2
    }

    pub fn plain_degree(&self, v: usize) -> usize {
        self.plain_adj[v].len()
    }

    pub fn coloured_degree(&self, c: usize) -> usize {
        self.coloured_adj[c].len()
    }
}

/// Split every edge of `(mg, col)` at its colour vertex.
pub fn build_bipartite(mg: &Multigraph, col: &EquitableColouring) -> Result<TrafficBipartite> {
    if col.colours().len() != mg.edges.len() {
        return Err(Error::invalid_parameter(
            "colouring does not match the edge count",
        ));
    }
    let mut edges = Vec::with_capacity(2 * mg.edges.len());
    let mut plain_adj = vec![Vec::new(); mg.n];
    let mut coloured_adj = vec![Vec::new(); col.n_colours];
    for (e, edge) in mg.edges.iter().enumerate() {
        let c = col.colour(e) as u32;
        for (end, half) in [(edge.u, edge.hu), (edge.v, edge.hv)] {
            let b = edges.len() as u32;
            edges.push(BipEdge {
                plain: end as u32,
                coloured: c,
                half,
            });
            plain_adj[end].push(b);
            coloured_adj[c as usize].push(b);
        }
    }
    Ok(TrafficBipartite {
        n_plain: mg.n,
        n_coloured: col.n_colours,
        edges,
        plain_adj,
        coloured_adj,
    })
}

/// Recover `(mg, col)` from the bipartite view; exact round trip.
pub fn project_back(tb: &TrafficBipartite) -> (Multigraph, EquitableColouring) {
    let mut edges = Vec::with_capacity(tb.edges.len() / 2);
    let mut colour = Vec::with_capacity(tb.edges.len() / 2);
    let mut degree = 0usize;
    for e in 0..tb.edges.len() / 2 {
        let a = tb.edges[2 * e];
        let b = tb.edges[2 * e + 1];
        debug_assert_eq!(a.coloured, b.coloured);
        edges.push(crate::config_model::Edge {
            u: a.plain as usize,
            v: b.plain as usize,
            hu: a.half,
            hv: b.half,
        });
        colour.push(a.coloured);
        degree = degree.max(tb.plain_degree(a.plain as usize));
    }
    let q = tb.edges.len() / 2 / tb.n_coloured;
    (
        Multigraph {
            n: tb.n_plain,
            degree,
            edges,
        },
        EquitableColouring {
            n_colours: tb.n_coloured,
            q,
            colour,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config_model::{
        enumerate_pairings, project_multigraph, sample_pairing, DegreeSpec, Edge, Pairing,
    };
    use std::collections::HashMap;

    fn triangle() -> Multigraph {
        let spec = DegreeSpec::new(3, 2).unwrap();
        let p = Pairing::from_partner(spec, vec![5, 2, 1, 4, 3, 0]).unwrap();
        project_multigraph(&p)
    }

    #[test]
    fn enumeration_has_ninety_colourings_for_three_colours_q2() {
        let cs: Vec<_> = enumerate_colourings(6, 3, 2).unwrap().collect();
        assert_eq!(cs.len(), 90);
        let mut seen = std::collections::HashSet::new();
        for c in &cs {
            assert!(seen.insert(c.colours().to_vec()));
        }
    }

    #[test]
    fn single_colour_is_unique() {
        let cs: Vec<_> = enumerate_colourings(4, 1, 4).unwrap().collect();
        assert_eq!(cs.len(), 1);
        assert!(cs[0].colours().iter().all(|&c| c == 0));
    }

    #[test]
    fn colouring_frequencies_are_uniform() {
        let spec = DegreeSpec::new(3, 4).unwrap();
        let mg = project_multigraph(&sample_pairing(spec, 5));
        let trials = 100_000u64;
        let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
        for t in 0..trials {
            let col = sample_colouring_with(&mg, 3, 2, &mut stream_rng(77, t)).unwrap();
            *counts.entry(col.colours().to_vec()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 90);
        for (_, c) in counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 1.0 / 90.0).abs() < 0.004, "freq {freq}");
        }
    }

    #[test]
    fn edge_count_mismatch_is_rejected() {
        let mg = triangle();
        assert!(sample_colouring(&mg, 2, 2, 0).is_err());
    }

    #[test]
    fn loop_becomes_partnered_two_cycle() {
        let spec = DegreeSpec::new(1, 2).unwrap();
        let p = Pairing::from_partner(spec, vec![1, 0]).unwrap();
        let mg = project_multigraph(&p);
        let col = EquitableColouring::new(1, 1, vec![0]).unwrap();
        let tb = build_bipartite(&mg, &col).unwrap();
        assert_eq!(tb.edges.len(), 2);
        assert_eq!(tb.partner(0), 1);
        assert_eq!(tb.edges[0].plain, tb.edges[1].plain);
        assert_eq!(tb.edges[0].coloured, tb.edges[1].coloured);
    }

    #[test]
    fn parallel_same_colour_edges_carry_two_partner_pairs() {
        let mg = Multigraph {
            n: 2,
            degree: 2,
            edges: vec![
                Edge { u: 0, v: 1, hu: 0, hv: 2 },
                Edge { u: 0, v: 1, hu: 1, hv: 3 },
            ],
        };
        let col = EquitableColouring::new(1, 2, vec![0, 0]).unwrap();
        let tb = build_bipartite(&mg, &col).unwrap();
        assert_eq!(tb.coloured_degree(0), 4);
        assert_eq!(tb.partner(0), 1);
        assert_eq!(tb.partner(2), 3);
    }

    #[test]
    fn degrees_are_twice_q() {
        let spec = DegreeSpec::new(4, 4).unwrap();
        let mg = project_multigraph(&sample_pairing(spec, 11));
        let col = sample_colouring(&mg, 4, 2, 3).unwrap();
        let tb = build_bipartite(&mg, &col).unwrap();
        for v in 0..tb.n_plain {
            assert_eq!(tb.plain_degree(v), 4);
        }
        for c in 0..tb.n_coloured {
            assert_eq!(tb.coloured_degree(c), 4);
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let spec = DegreeSpec::new(3, 4).unwrap();
        for (i, p) in enumerate_pairings(spec).unwrap().step_by(501).enumerate() {
            let mg = project_multigraph(&p);
            let col = sample_colouring(&mg, 3, 2, i as u64).unwrap();
            let tb = build_bipartite(&mg, &col).unwrap();
            let (mg2, col2) = project_back(&tb);
            assert_eq!(mg.n, mg2.n);
            assert_eq!(mg.edges, mg2.edges);
            assert_eq!(col, col2);
        }
    }

    #[test]
    fn csv_round_trips() {
        let mg = triangle();
        let col = sample_colouring(&mg, 3, 1, 9).unwrap();
        let text = col.to_csv();
        assert!(text.starts_with("edge_id,colour\n"));
        let back = EquitableColouring::parse_csv(3, 1, &text).unwrap();
        assert_eq!(col, back);
    }
}
