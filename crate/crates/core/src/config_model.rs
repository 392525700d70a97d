//! The pairing (configuration) model for random regular multigraphs.
//!
//! `n` cells of `d` labelled half-edges each are matched by a uniform
//! fixed-point-free involution; collapsing cells to vertices gives a
//! random `d`-regular multigraph with loops and parallel edges allowed.

use crate::error::{Error, Result};
use crate::rng::{stream_rng, DetRng};
use rand::Rng;

/// Cell count and degree of a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DegreeSpec {
    pub n: usize,
    pub d: usize,
}

impl DegreeSpec {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::invalid_parameter("n and d must be positive"));
        }
        if !(n * d).is_multiple_of(2) {
            return Err(Error::invalid_parameter(format!(
                "n*d = {} must be even",
                n * d
            )));
        }
        Ok(DegreeSpec { n, d })
    }

    /// Total number of half-edges `n*d`.
    pub fn half_edges(&self) -> usize {
        self.n * self.d
    }

    #[inline]
    pub fn cell(&self, h: usize) -> usize {
        h / self.d
    }

    #[inline]
    pub fn slot(&self, h: usize) -> usize {
        h % self.d
    }
}

/// A fixed-point-free involution on the half-edges `0..n*d`.
///
/// Half-edge `h` lives in cell `h / d`, slot `h % d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub spec: DegreeSpec,
    partner: Vec<u32>,
}

impl Pairing {
    pub fn from_partner(spec: DegreeSpec, partner: Vec<u32>) -> Result<Self> {
        if partner.len() != spec.half_edges() {
            return Err(Error::invalid_parameter("partner map has wrong length"));
        }
        for (h, &p) in partner.iter().enumerate() {
            let p = p as usize;
            if p >= partner.len() || p == h || partner[p] as usize != h {
                return Err(Error::invalid_parameter(
                    "partner map is not a fixed-point-free involution",
                ));
            }
        }
        Ok(Pairing { spec, partner })
    }

    #[inline]
    pub fn partner(&self, h: usize) -> usize {
        self.partner[h] as usize
    }

    /// The `nd/2` pairs as `(h, partner)` with `h < partner`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|(h, &p)| *h < p as usize)
            .map(|(h, &p)| (h, p as usize))
    }

    /// Canonical text form: one line `cA.sA-cB.sB` per pair, pairs sorted
    /// lexicographically. This is the golden-file format.
    pub fn serialize(&self) -> String {
        let d = self.spec.d;
        let mut out = String::new();
        for (a, b) in self.pairs() {
            out.push_str(&format!(
                "{}.{}-{}.{}\n",
                a / d,
                a % d,
                b / d,
                b % d
            ));
        }
        out
    }

    pub fn parse(spec: DegreeSpec, text: &str) -> Result<Self> {
        let mut partner = vec![u32::MAX; spec.half_edges()];
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (a, b) = line
                .split_once('-')
                .ok_or_else(|| Error::invalid_parameter(format!("bad pair line: {line}")))?;
            let parse_he = |s: &str| -> Result<usize> {
                let (c, sl) = s
                    .split_once('.')
                    .ok_or_else(|| Error::invalid_parameter(format!("bad half-edge: {s}")))?;
                let c: usize = c
                    .parse()
                    .map_err(|_| Error::invalid_parameter(format!("bad cell: {c}")))?;
                let sl: usize = sl
                    .parse()
                    .map_err(|_| Error::invalid_parameter(format!("bad slot: {sl}")))?;
                if c >= spec.n || sl >= spec.d {
                    return Err(Error::invalid_parameter(format!("half-edge out of range: {s}")));
                }
                Ok(c * spec.d + sl)
            };
            let ha = parse_he(a)?;
            let hb = parse_he(b)?;
            partner[ha] = hb as u32;
            partner[hb] = ha as u32;
        }
        Pairing::from_partner(spec, partner)
    }
}

/// Draw a uniform pairing, deterministically from `seed`.
pub fn sample_pairing(spec: DegreeSpec, seed: u64) -> Pairing {
    sample_pairing_with(spec, &mut stream_rng(seed, 0))
}

/// Uniform pairing from a caller-supplied RNG stream.
///
/// The first unmatched half-edge is matched to a uniformly chosen free
/// half-edge, repeatedly; every pairing has probability `1/(nd-1)!!`.
pub fn sample_pairing_with(spec: DegreeSpec, rng: &mut DetRng) -> Pairing {
    let m = spec.half_edges();
    let mut partner = vec![u32::MAX; m];
    // Free half-edges with O(1) swap-pop removal via a position index.
    let mut pool: Vec<u32> = (0..m as u32).collect();
    let mut pos: Vec<u32> = (0..m as u32).collect();
    let remove = |pool: &mut Vec<u32>, pos: &mut Vec<u32>, x: u32| {
        let i = pos[x as usize] as usize;
        let last = pool.len() - 1;
        pool.swap(i, last);
        pos[pool[i] as usize] = i as u32;
        pool.pop();
    };
    for h in 0..m as u32 {
        if partner[h as usize] != u32::MAX {
            continue;
        }
        remove(&mut pool, &mut pos, h);
        let r = pool[rng.random_range(0..pool.len())];
        remove(&mut pool, &mut pos, r);
        partner[h as usize] = r;
        partner[r as usize] = h;
    }
    Pairing { spec, partner }
}

/// Lazily yields every pairing of `spec` exactly once, in lexicographic
/// order of the matching choices; there are `(nd-1)!!` of them.
pub fn enumerate_pairings(spec: DegreeSpec) -> Result<PairingEnumerator> {
    if spec.half_edges() > 16 {
        return Err(Error::size_limit(format!(
            "enumerate_pairings supports n*d <= 16, got {}",
            spec.half_edges()
        )));
    }
    Ok(PairingEnumerator {
        spec,
        choices: vec![0; spec.half_edges() / 2],
        done: false,
    })
}

/// Odometer over the choice vector `(r_1, ..., r_{nd/2})` where step `s`
/// matches the first free half-edge to the `r_s`-th remaining one.
pub struct PairingEnumerator {
    spec: DegreeSpec,
    choices: Vec<usize>,
    done: bool,
}

impl PairingEnumerator {
    fn radix(&self, step: usize) -> usize {
        // After `step` completed matches, 2*step half-edges are gone.
        self.spec.half_edges() - 2 * step - 1
    }

    fn build(&self) -> Pairing {
        let m = self.spec.half_edges();
        let mut partner = vec![u32::MAX; m];
        let mut free: Vec<u32> = (0..m as u32).collect();
        for (step, &r) in self.choices.iter().enumerate() {
            let _ = step;
            let h = free[0];
            free.remove(0);
            let mate = free[r];
            free.remove(r);
            partner[h as usize] = mate;
            partner[mate as usize] = h;
        }
        Pairing { spec: self.spec, partner }
    }
}

impl Iterator for PairingEnumerator {
    type Item = Pairing;

    fn next(&mut self) -> Option<Pairing> {
        if self.done {
            return None;
        }
        let out = self.build();
        // Advance the mixed-radix counter.
        let mut s = self.choices.len();
        loop {
            if s == 0 {
                self.done = true;
                break;
            }
            s -= 1;
            if self.choices[s] + 1 < self.radix(s) {
                self.choices[s] += 1;
                for c in self.choices[s + 1..].iter_mut() {
                    *c = 0;
                }
                break;
            }
        }
        Some(out)
    }
}

/// An edge of the projected multigraph, remembering its half-edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    /// Half-edge at `u` (the smaller half-edge id of the pair).
    pub hu: u32,
    /// Half-edge at `v`.
    pub hv: u32,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn other(&self, w: usize) -> usize {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A multigraph with a fixed degree sequence; loops and parallel edges
/// are kept distinct through their half-edge ids.
#[derive(Clone, Debug)]
pub struct Multigraph {
    pub n: usize,
    pub degree: usize,
    pub edges: Vec<Edge>,
}

impl Multigraph {
    /// Degree of every vertex, loops counted twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// True when there are no loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.is_loop() {
                return false;
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert(key) {
                return false;
            }
        }
        true
    }
}

/// Collapse cells to vertices: one edge per pair.
pub fn project_multigraph(p: &Pairing) -> Multigraph {
    let d = p.spec.d;
    let edges = p
        .pairs()
        .map(|(a, b)| Edge {
            u: a / d,
            v: b / d,
            hu: a as u32,
            hv: b as u32,
        })
        .collect();
    Multigraph {
        n: p.spec.n,
        degree: p.spec.d,
        edges,
    }
}
