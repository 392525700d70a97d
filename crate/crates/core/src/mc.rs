//! Reproducible Monte Carlo experiments, exhaustive oracles and Poisson
//! goodness-of-fit.
//!
//! Trials derive their randomness from `(master seed, trial index)` and
//! are accumulated in fixed-size chunks that are merged in index order,
//! so results are bit-identical for any worker-thread count. Exhaustive
//! oracles enumerate every pairing and every equitable colouring at desk
//! sizes and return exact rationals.

use crate::census::{census, CensusTable};
use crate::colouring::{
    enumerate_colourings, sample_colouring_with, EquitableColouring,
};
use crate::config_model::{
    enumerate_pairings, project_multigraph, sample_pairing_with, DegreeSpec, Edge, Multigraph,
};
use crate::error::{Error, Result};
use crate::exact::{equitable_colouring_count, frac, frac_to_f64};
use crate::numeric::pairwise_sum;
use crate::rng::{stream_rng, DetRng};
use crate::search::{count_rainbow_hamilton, count_rainbow_matching, SearchMode};
use crate::theory::RationalValue;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Which random coloured graph each trial draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `n` vertices of even degree `d`, `n` colours with `d/2` edges each.
    Hamilton,
    /// `2n` vertices of degree `d`, `n` colours with `d` edges each.
    Matching,
    /// A planted rainbow Hamilton cycle plus an independent
    /// degree-`(d-2)` configuration carrying the leftover colours.
    Planted,
}

/// One requested statistic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StatSpec {
    MeanY,
    ProbYPositive,
    MeanZ,
    MeanX { i: usize, j: usize },
    /// Mean of `prod [X_{i,j}]_{m}` (falling factorials), optionally
    /// weighted by the Hamilton count.
    FactorialMoment {
        orders: Vec<(usize, usize, u32)>,
        weight_y: bool,
    },
}

impl StatSpec {
    pub fn label(&self) -> String {
        match self {
            StatSpec::MeanY => "mean_y".into(),
            StatSpec::ProbYPositive => "p_y_positive".into(),
            StatSpec::MeanZ => "mean_z".into(),
            StatSpec::MeanX { i, j } => format!("mean_x_{i}_{j}"),
            StatSpec::FactorialMoment { orders, weight_y } => {
                let mut s = if *weight_y { "y_fm".to_string() } else { "fm".to_string() };
                for (i, j, m) in orders {
                    s.push_str(&format!("_x_{i}_{j}_pow_{m}"));
                }
                s
            }
        }
    }
}

/// Full description of one experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub model: Model,
    pub n: usize,
    pub d: usize,
    pub trials: u64,
    pub seed: u64,
    pub i_max: usize,
    pub stats: Vec<StatSpec>,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid_parameter("trials must be >= 1"));
        }
        match self.model {
            Model::Hamilton => {
                if !self.d.is_multiple_of(2) || self.d < 4 || self.n < 3 {
                    return Err(Error::invalid_parameter(
                        "hamilton model needs even d >= 4 and n >= 3",
                    ));
                }
            }
            Model::Matching => {
                if self.d < 1 || self.n < 1 {
                    return Err(Error::invalid_parameter("matching model needs n, d >= 1"));
                }
            }
            Model::Planted => {
                if !self.d.is_multiple_of(2) || self.d < 6 || self.n < 3 {
                    return Err(Error::invalid_parameter(
                        "planted model needs even d >= 6 and n >= 3",
                    ));
                }
            }
        }
        let n_plain = match self.model {
            Model::Matching => 2 * self.n,
            _ => self.n,
        };
        if self.i_max == 0 || self.i_max > n_plain {
            return Err(Error::invalid_parameter(format!(
                "i_max must lie in 1..={n_plain}"
            )));
        }
        for s in &self.stats {
            match s {
                StatSpec::MeanY | StatSpec::ProbYPositive => {
                    if self.model == Model::Matching {
                        return Err(Error::invalid_parameter(
                            "hamilton statistics need the hamilton or planted model",
                        ));
                    }
                }
                StatSpec::MeanZ => {
                    if self.model != Model::Matching {
                        return Err(Error::invalid_parameter(
                            "mean_z needs the matching model",
                        ));
                    }
                }
                StatSpec::MeanX { i, j } => {
                    if *i == 0 || *i > self.i_max || j > i {
                        return Err(Error::invalid_parameter(format!(
                            "mean_x needs 1 <= i <= i_max and j <= i, got ({i},{j})"
                        )));
                    }
                }
                StatSpec::FactorialMoment { orders, weight_y } => {
                    if *weight_y && self.model == Model::Matching {
                        return Err(Error::invalid_parameter(
                            "weighted moments need the hamilton or planted model",
                        ));
                    }
                    let total: u32 = orders.iter().map(|(_, _, m)| m).sum();
                    if orders.is_empty() || total == 0 || total > 6 {
                        return Err(Error::invalid_parameter(
                            "factorial moment orders must be nonzero with total <= 6",
                        ));
                    }
                    for (i, j, _) in orders {
                        if *i == 0 || *i > self.i_max || j > i {
                            return Err(Error::invalid_parameter(format!(
                                "factorial moment index ({i},{j}) out of range"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn needs_census(&self) -> bool {
        self.stats.iter().any(|s| {
            matches!(
                s,
                StatSpec::MeanX { .. } | StatSpec::FactorialMoment { .. }
            )
        })
    }

    fn needs_y_count(&self) -> bool {
        self.stats.iter().any(|s| {
            matches!(s, StatSpec::MeanY)
                || matches!(
                    s,
                    StatSpec::FactorialMoment { weight_y: true, .. }
                )
        })
    }

    fn needs_y_exists(&self) -> bool {
        self.stats.iter().any(|s| matches!(s, StatSpec::ProbYPositive))
    }

    fn needs_z(&self) -> bool {
        self.stats.iter().any(|s| matches!(s, StatSpec::MeanZ))
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Draw one Hamilton-model instance.
pub fn sample_hamilton_instance(
    n: usize,
    d: usize,
    rng: &mut DetRng,
) -> Result<(Multigraph, EquitableColouring)> {
    let spec = DegreeSpec::new(n, d)?;
    let mg = project_multigraph(&sample_pairing_with(spec, rng));
    let col = sample_colouring_with(&mg, n, d / 2, rng)?;
    Ok((mg, col))
}

/// Draw one matching-model instance on `2n` vertices.
pub fn sample_matching_instance(
    n: usize,
    d: usize,
    rng: &mut DetRng,
) -> Result<(Multigraph, EquitableColouring)> {
    let spec = DegreeSpec::new(2 * n, d)?;
    let mg = project_multigraph(&sample_pairing_with(spec, rng));
    let col = sample_colouring_with(&mg, n, d, rng)?;
    Ok((mg, col))
}

/// Draw one planted instance: a uniform rainbow Hamilton cycle with a
/// uniform colour bijection, overlaid with an independent
/// degree-`(d-2)` configuration whose edges receive the remaining
/// colour multiset (each colour `d/2 - 1` more times).
pub fn sample_planted_instance(
    n: usize,
    d: usize,
    rng: &mut DetRng,
) -> Result<(Multigraph, EquitableColouring)> {
    if !d.is_multiple_of(2) || d < 6 || n < 3 {
        return Err(Error::invalid_parameter(
            "planted model needs even d >= 6 and n >= 3",
        ));
    }
    let q = d / 2;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut cycle_colours: Vec<u32> = (0..n as u32).collect();
    cycle_colours.shuffle(rng);

    let mut edges = Vec::with_capacity(n + (d - 2) * n / 2);
    let mut colours = Vec::with_capacity(n + (d - 2) * n / 2);
    for s in 0..n {
        let (u, v) = (order[s], order[(s + 1) % n]);
        let h = 2 * edges.len() as u32;
        edges.push(Edge { u, v, hu: h, hv: h + 1 });
        colours.push(cycle_colours[s]);
    }
    let spec = DegreeSpec::new(n, d - 2)?;
    let overlay = project_multigraph(&sample_pairing_with(spec, rng));
    let mut deck: Vec<u32> = (0..n as u32)
        .flat_map(|c| std::iter::repeat_n(c, q - 1))
        .collect();
    deck.shuffle(rng);
    for (e, c) in overlay.edges.iter().zip(deck) {
        let h = 2 * edges.len() as u32;
        edges.push(Edge { u: e.u, v: e.v, hu: h, hv: h + 1 });
        colours.push(c);
    }
    let mg = Multigraph { n, degree: d, edges };
    let col = EquitableColouring::new(n, q, colours)?;

    // Per-trial structural checks: regular of degree d, and the planted
    // cycle edges are rainbow.
    planted_structural_checks(&mg, n, d);
    Ok((mg, col))
}

fn planted_structural_checks(mg: &Multigraph, n: usize, d: usize) {
    let deg = mg.degrees();
    assert!(deg.iter().all(|&x| x == d), "planted union must be d-regular");
    let mut seen = vec![false; n];
    for e in mg.edges.iter().take(n) {
        seen[e.u] = true;
    }
    assert!(seen.iter().all(|&s| s), "planted cycle must cover every vertex");
}

fn sample_instance(plan: &ExperimentPlan, rng: &mut DetRng) -> Result<(Multigraph, EquitableColouring)> {
    match plan.model {
        Model::Hamilton => sample_hamilton_instance(plan.n, plan.d, rng),
        Model::Matching => sample_matching_instance(plan.n, plan.d, rng),
        Model::Planted => sample_planted_instance(plan.n, plan.d, rng),
    }
}

fn falling_u128(x: u64, m: u32) -> u128 {
    let mut acc: u128 = 1;
    for s in 0..m as u64 {
        if x < s + 1 {
            return 0;
        }
        acc = acc.saturating_mul((x - s) as u128);
    }
    acc
}

/// Evaluate every requested statistic on one instance.
fn trial_values(plan: &ExperimentPlan, rng: &mut DetRng) -> Result<Vec<f64>> {
    let (mg, col) = sample_instance(plan, rng)?;
    let table: Option<CensusTable> = if plan.needs_census() {
        let tb = crate::colouring::build_bipartite(&mg, &col)?;
        Some(census(&tb, plan.i_max)?)
    } else {
        None
    };
    let y_count = if plan.needs_y_count() {
        Some(count_rainbow_hamilton(&mg, &col, SearchMode::Count)?.count)
    } else {
        None
    };
    let y_exists = if plan.needs_y_exists() {
        match y_count {
            Some(c) => Some(c > 0),
            None => Some(count_rainbow_hamilton(&mg, &col, SearchMode::Exists)?.exists),
        }
    } else {
        None
    };
    let z_count = if plan.needs_z() {
        Some(count_rainbow_matching(&mg, &col)?.count)
    } else {
        None
    };

    let mut out = Vec::with_capacity(plan.stats.len());
    for s in &plan.stats {
        let v = match s {
            StatSpec::MeanY => y_count.unwrap() as f64,
            StatSpec::ProbYPositive => y_exists.unwrap() as u64 as f64,
            StatSpec::MeanZ => z_count.unwrap() as f64,
            StatSpec::MeanX { i, j } => table.as_ref().unwrap().get(*i, *j) as f64,
            StatSpec::FactorialMoment { orders, weight_y } => {
                let mut acc: u128 = 1;
                for (i, j, m) in orders {
                    acc = acc.saturating_mul(falling_u128(
                        table.as_ref().unwrap().get(*i, *j),
                        *m,
                    ));
                }
                let mut v = acc as f64;
                if *weight_y {
                    v *= y_count.unwrap() as f64;
                }
                v
            }
        };
        out.push(v);
    }
    Ok(out)
}

const CHUNK: u64 = 256;

#[derive(Clone)]
struct ChunkAccum {
    sums: Vec<f64>,
    sumsqs: Vec<f64>,
}

/// Run the plan with `threads` workers.
///
/// Trials are processed in fixed chunks of 256; chunk partials are
/// merged in chunk order with a pairwise reduction, so the estimates are
/// bit-identical for every thread count.
pub fn run_trials(plan: &ExperimentPlan, threads: usize) -> Result<Vec<(String, Estimate)>> {
    plan.validate()?;
    let n_stats = plan.stats.len();
    let n_chunks = plan.trials.div_ceil(CHUNK) as usize;
    let mut chunks: Vec<Option<ChunkAccum>> = vec![None; n_chunks];

    let run_chunk = |ci: usize| -> Result<ChunkAccum> {
        let lo = ci as u64 * CHUNK;
        let hi = (lo + CHUNK).min(plan.trials);
        let mut acc = ChunkAccum {
            sums: vec![0.0; n_stats],
            sumsqs: vec![0.0; n_stats],
        };
        for t in lo..hi {
            let mut rng = stream_rng(plan.seed, t);
            let vals = trial_values(plan, &mut rng)?;
            for (k, v) in vals.iter().enumerate() {
                acc.sums[k] += v;
                acc.sumsqs[k] += v * v;
            }
        }
        Ok(acc)
    };

    if threads <= 1 {
        for (ci, slot) in chunks.iter_mut().enumerate() {
            *slot = Some(run_chunk(ci)?);
        }
    } else {
        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<(usize, Result<ChunkAccum>)>> = Mutex::new(Vec::new());
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let ci = next.fetch_add(1, Ordering::Relaxed);
                    if ci >= n_chunks {
                        break;
                    }
                    let r = run_chunk(ci);
                    results.lock().unwrap().push((ci, r));
                });
            }
        });
        for (ci, r) in results.into_inner().unwrap() {
            chunks[ci] = Some(r?);
        }
    }

    let mut out = Vec::with_capacity(n_stats);
    for (k, s) in plan.stats.iter().enumerate() {
        let sums: Vec<f64> = chunks.iter().map(|c| c.as_ref().unwrap().sums[k]).collect();
        let sumsqs: Vec<f64> = chunks
            .iter()
            .map(|c| c.as_ref().unwrap().sumsqs[k])
            .collect();
        let total = pairwise_sum(&sums);
        let total_sq = pairwise_sum(&sumsqs);
        let nf = plan.trials as f64;
        let mean = total / nf;
        let var = if plan.trials > 1 {
            ((total_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        out.push((
            s.label(),
            Estimate {
                mean,
                std_error: (var / nf).sqrt(),
                trials: plan.trials,
            },
        ));
    }
    Ok(out)
}

/// Poisson goodness-of-fit report.
#[derive(Clone, Debug, Serialize)]
pub struct GofReport {
    pub lambda: f64,
    pub trials: u64,
    pub mean: f64,
    pub mean_gap: f64,
    pub mean_tolerance: f64,
    pub tv_distance: f64,
    pub pass: bool,
}

/// Total-variation distance between the sample and `Poisson(lambda)`
/// truncated at `lambda + 10 sqrt(lambda)`, plus a mean check at three
/// standard errors of the Poisson mean.
pub fn poisson_gof(samples: &[u64], lambda: f64) -> Result<GofReport> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::invalid_parameter("lambda must be positive"));
    }
    if samples.len() < 1000 {
        return Err(Error::invalid_parameter(
            "poisson_gof needs at least 1000 samples",
        ));
    }
    let n = samples.len() as f64;
    let k_max = (lambda + 10.0 * lambda.sqrt()).ceil() as usize;
    let mut emp = vec![0.0f64; k_max + 1];
    let mut emp_tail = 0.0f64;
    let mut sum = 0.0f64;
    for &x in samples {
        sum += x as f64;
        if (x as usize) <= k_max {
            emp[x as usize] += 1.0;
        } else {
            emp_tail += 1.0;
        }
    }
    let mean = sum / n;
    let mut tv = 0.0;
    let mut p = (-lambda).exp();
    let mut p_cum = 0.0;
    for (x, e) in emp.iter().enumerate() {
        tv += (e / n - p).abs();
        p_cum += p;
        p = p * lambda / (x as f64 + 1.0);
    }
    tv += (emp_tail / n - (1.0 - p_cum)).abs();
    let tv = 0.5 * tv;
    let mean_gap = (mean - lambda).abs();
    let mean_tolerance = 3.0 * (lambda / n).sqrt();
    Ok(GofReport {
        lambda,
        trials: samples.len() as u64,
        mean,
        mean_gap,
        mean_tolerance,
        tv_distance: tv,
        pass: tv <= 0.05 && mean_gap <= mean_tolerance,
    })
}

/// Collect per-trial values of one census statistic, for feeding the
/// goodness-of-fit test. Deterministic in `(seed, trial index)`.
pub fn sample_census_values(
    plan: &ExperimentPlan,
    i: usize,
    j: usize,
) -> Result<Vec<u64>> {
    plan.validate()?;
    let mut out = Vec::with_capacity(plan.trials as usize);
    for t in 0..plan.trials {
        let mut rng = stream_rng(plan.seed, t);
        let (mg, col) = sample_instance(plan, &mut rng)?;
        let tb = crate::colouring::build_bipartite(&mg, &col)?;
        let table = census(&tb, plan.i_max)?;
        out.push(table.get(i, j));
    }
    Ok(out)
}

/// Exhaustive ground truth over every pairing and every equitable
/// colouring at `(n, d)`, Hamilton model.
#[derive(Clone, Debug, Serialize)]
pub struct OracleRecord {
    pub n: usize,
    pub d: usize,
    pub instances: u64,
    pub e_y: RationalValue,
    pub e_y_sq: RationalValue,
    /// `E Y^2 / (E Y)^2`.
    pub second_moment_ratio: RationalValue,
    pub p_y_positive: RationalValue,
    pub e_x: Vec<OracleCensusRow>,
    /// Overlap census of second Hamilton configurations against a fixed
    /// first one, keyed by `(k, j)`.
    pub overlap_census: Vec<OverlapCensusRow>,
    /// All compatible second configurations, including the identity.
    pub compatible_total: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCensusRow {
    pub i: usize,
    pub j: usize,
    pub mean: RationalValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapCensusRow {
    pub k: usize,
    pub j: usize,
    pub count: u64,
}

fn rat_json(r: &BigRational) -> RationalValue {
    RationalValue {
        fraction: crate::exact::frac_str(r),
        decimal: frac_to_f64(r),
    }
}

pub fn oracle_exhaustive(n: usize, d: usize, i_max: usize) -> Result<OracleRecord> {
    if !d.is_multiple_of(2) || d < 4 || n < 3 {
        return Err(Error::invalid_parameter(
            "the exhaustive oracle runs the hamilton model: even d >= 4, n >= 3",
        ));
    }
    if n * d > 12 {
        return Err(Error::size_limit("oracle_exhaustive needs n*d <= 12"));
    }
    let colourings = equitable_colouring_count(n as u64, (d / 2) as u64);
    if colourings > BigInt::from(10_000u64) {
        return Err(Error::size_limit(
            "oracle_exhaustive needs at most 10^4 colourings",
        ));
    }
    if i_max == 0 || i_max > n {
        return Err(Error::invalid_parameter("i_max must lie in 1..=n"));
    }
    let spec = DegreeSpec::new(n, d)?;
    let q = d / 2;
    let mut instances = 0u64;
    let mut sum_y = 0u64;
    let mut sum_y_sq = 0u64;
    let mut positive = 0u64;
    let mut sum_x = CensusTable::new(i_max);
    for pairing in enumerate_pairings(spec)? {
        let mg = project_multigraph(&pairing);
        for col in enumerate_colourings(mg.edges.len(), n, q)? {
            let tb = crate::colouring::build_bipartite(&mg, &col)?;
            let y = count_rainbow_hamilton(&mg, &col, SearchMode::Count)?.count;
            sum_y += y;
            sum_y_sq += y * y;
            positive += (y > 0) as u64;
            sum_x.merge(&census(&tb, i_max)?);
            instances += 1;
        }
    }
    let total = BigInt::from(instances);
    let e_y = frac(BigInt::from(sum_y), total.clone());
    let e_y_sq = frac(BigInt::from(sum_y_sq), total.clone());
    let ratio = &e_y_sq / (&e_y * &e_y);
    let p_pos = frac(BigInt::from(positive), total.clone());
    let e_x = (1..=i_max)
        .flat_map(|i| (0..=i).map(move |j| (i, j)))
        .map(|(i, j)| OracleCensusRow {
            i,
            j,
            mean: rat_json(&frac(BigInt::from(sum_x.get(i, j)), total.clone())),
        })
        .collect();

    let h2 = h2_overlap_census(n, d)?;
    Ok(OracleRecord {
        n,
        d,
        instances,
        e_y: rat_json(&e_y),
        e_y_sq: rat_json(&e_y_sq),
        second_moment_ratio: rat_json(&ratio),
        p_y_positive: rat_json(&p_pos),
        e_x,
        overlap_census: h2
            .counts
            .iter()
            .map(|(&(k, j), &count)| OverlapCensusRow { k, j, count })
            .collect(),
        compatible_total: h2.compatible_total,
    })
}

/// Exhaustive classification of second Hamilton configurations against
/// a fixed first one.
#[derive(Clone, Debug)]
pub struct H2Census {
    pub n: usize,
    pub d: usize,
    /// Compatible configurations by overlap class, the identity
    /// excluded.
    pub counts: BTreeMap<(usize, usize), u64>,
    /// Compatible configurations including the identity.
    pub compatible_total: u64,
}

struct H2Search {
    n: usize,
    d: usize,
    /// Mate of each plain point in the fixed first configuration.
    h1_plain_mate: Vec<u32>,
    h1_col_mate: Vec<u32>,
    pair_of_plain: Vec<u32>,
    pair_of_col: Vec<u32>,
    used_plain_cells: u64,
    used_col_cells: u64,
    counts: BTreeMap<(usize, usize), u64>,
    total: u64,
    /// When false, every configuration is walked (used to validate the
    /// enumeration count); conflicts are then not classified.
    prune_conflicts: bool,
    unpruned_total: u64,
}

impl H2Search {
    fn conflict(&self, pp: u32, cp: u32) -> bool {
        let a = self.h1_plain_mate[pp as usize];
        let b = self.h1_col_mate[cp as usize];
        (a != u32::MAX && a != cp) || (b != u32::MAX && b != pp)
    }

    fn add_pair(&mut self, pp: u32, cp: u32) {
        self.pair_of_plain[pp as usize] = cp;
        self.pair_of_col[cp as usize] = pp;
    }

    fn remove_pair(&mut self, pp: u32, cp: u32) {
        self.pair_of_plain[pp as usize] = u32::MAX;
        self.pair_of_col[cp as usize] = u32::MAX;
    }

    fn classify(&mut self, first_exit: u32, close_entry: u32) {
        self.unpruned_total += 1;
        if first_exit >= close_entry {
            return;
        }
        let d = self.d;
        let mut k = 0usize;
        let mut j = 0usize;
        let mut shared_pairs = 0usize;
        for cell in 0..self.n {
            let mut shared = 0;
            for s in 0..d {
                let cp = (cell * d + s) as u32;
                let pp = self.pair_of_col[cp as usize];
                if pp != u32::MAX && self.h1_col_mate[cp as usize] == pp {
                    shared += 1;
                }
            }
            if shared == 2 {
                k += 1;
            }
            shared_pairs += shared;
            let mut pshared = 0;
            for s in 0..d {
                let pp = (cell * d + s) as u32;
                let cp = self.pair_of_plain[pp as usize];
                if cp != u32::MAX && self.h1_plain_mate[pp as usize] == cp {
                    pshared += 1;
                }
            }
            if pshared == 2 {
                j += 1;
            }
        }
        self.total += 1;
        if shared_pairs == 2 * self.n {
            // identical to the first configuration
            return;
        }
        *self.counts.entry((k, j)).or_insert(0) += 1;
    }

    /// Continue from a pending plain exit point.
    fn extend(&mut self, exit_pp: u32, first_exit: u32, cols_used: usize) {
        let d = self.d;
        for c in 0..self.n {
            if self.used_col_cells >> c & 1 == 1 {
                continue;
            }
            for s in 0..d {
                let entry = (c * d + s) as u32;
                if self.prune_conflicts && self.conflict(exit_pp, entry) {
                    continue;
                }
                let exit_cp = entry ^ 1;
                self.add_pair(exit_pp, entry);
                self.used_col_cells |= 1 << c;
                if cols_used + 1 == self.n {
                    // close back into plain cell 0
                    for s2 in 0..d {
                        let close = s2 as u32;
                        if close == first_exit {
                            continue;
                        }
                        if self.prune_conflicts && self.conflict(close, exit_cp) {
                            continue;
                        }
                        self.add_pair(close, exit_cp);
                        self.classify(first_exit, close);
                        self.remove_pair(close, exit_cp);
                    }
                } else {
                    for p in 1..self.n {
                        if self.used_plain_cells >> p & 1 == 1 {
                            continue;
                        }
                        for s2 in 0..d {
                            let entry_pp = (p * d + s2) as u32;
                            if self.prune_conflicts && self.conflict(entry_pp, exit_cp) {
                                continue;
                            }
                            self.add_pair(entry_pp, exit_cp);
                            self.used_plain_cells |= 1 << p;
                            for s3 in 0..d {
                                if s3 == s2 {
                                    continue;
                                }
                                let next_exit = (p * d + s3) as u32;
                                self.extend(next_exit, first_exit, cols_used + 1);
                            }
                            self.used_plain_cells &= !(1 << p);
                            self.remove_pair(entry_pp, exit_cp);
                        }
                    }
                }
                self.used_col_cells &= !(1 << c);
                self.remove_pair(exit_pp, entry);
            }
        }
    }
}

/// Build the canonical first configuration and walk all compatible
/// second ones.
pub fn h2_overlap_census(n: usize, d: usize) -> Result<H2Census> {
    h2_census_impl(n, d, true).map(|s| H2Census {
        n,
        d,
        counts: s.counts,
        compatible_total: s.total,
    })
}

/// Total number of traffic-obeying Hamilton configurations, by full
/// enumeration (no compatibility pruning). Exponential; keep n*d small.
pub fn h2_total_configurations(n: usize, d: usize) -> Result<u64> {
    h2_census_impl(n, d, false).map(|s| s.unpruned_total_halved())
}

impl H2Search {
    fn unpruned_total_halved(&self) -> u64 {
        self.unpruned_total / 2
    }
}

fn h2_census_impl(n: usize, d: usize, prune: bool) -> Result<H2Search> {
    if !d.is_multiple_of(2) || d < 4 || n < 3 {
        return Err(Error::invalid_parameter(
            "the overlap census needs even d >= 4 and n >= 3",
        ));
    }
    if n > 10 || n * d > 40 {
        return Err(Error::size_limit("overlap census bound exceeded"));
    }
    let points = n * d;
    let mut h1_plain_mate = vec![u32::MAX; points];
    let mut h1_col_mate = vec![u32::MAX; points];
    // First configuration: plain i slot 0 -> coloured i slot 0,
    // coloured i slot 1 -> plain (i+1) slot 1.
    for i in 0..n {
        let pp0 = (i * d) as u32;
        let cp0 = (i * d) as u32;
        h1_plain_mate[pp0 as usize] = cp0;
        h1_col_mate[cp0 as usize] = pp0;
        let cp1 = (i * d + 1) as u32;
        let pp1 = ((i + 1) % n * d + 1) as u32;
        h1_plain_mate[pp1 as usize] = cp1;
        h1_col_mate[cp1 as usize] = pp1;
    }
    let mut search = H2Search {
        n,
        d,
        h1_plain_mate,
        h1_col_mate,
        pair_of_plain: vec![u32::MAX; points],
        pair_of_col: vec![u32::MAX; points],
        used_plain_cells: 1, // cell 0 is the anchor
        used_col_cells: 0,
        counts: BTreeMap::new(),
        total: 0,
        prune_conflicts: prune,
        unpruned_total: 0,
    };
    for s in 0..d {
        let first_exit = s as u32;
        search.extend(first_exit, first_exit, 0);
    }
    Ok(search)
}
