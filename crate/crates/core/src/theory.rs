//! Closed-form quantities: Poisson rates, exact expectations, growth
//! rates, conditioned moments, the logarithmic rate sum, and the
//! perfect-matching analogues.
//!
//! Everything a finite formula can express is computed in exact big
//! rationals; floating point appears only in series evaluation and in
//! decimal conveniences next to each exact value.

use crate::error::{Error, Result};
use crate::exact::{
    big_ln, binomial, factorial, falling, frac, frac_str, frac_to_f64, int_pow,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Render an exact rational with its decimal companion.
pub fn rational_value(r: &BigRational) -> RationalValue {
    RationalValue {
        fraction: frac_str(r),
        decimal: frac_to_f64(r),
    }
}

fn rat_json(r: &BigRational) -> RationalValue {
    rational_value(r)
}

/// An exact rational together with its decimal rendering.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RationalValue {
    pub fraction: String,
    pub decimal: f64,
}

/// Poisson rate, conditioning shift and conditioned mean for one cycle
/// statistic; `mu = lambda * (1 + delta)` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitTriple {
    pub lambda: BigRational,
    pub delta: BigRational,
    pub mu: BigRational,
}

impl LimitTriple {
    pub fn to_json(&self) -> LimitTripleJson {
        LimitTripleJson {
            lambda: rat_json(&self.lambda),
            delta: rat_json(&self.delta),
            mu: rat_json(&self.mu),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LimitTripleJson {
    pub lambda: RationalValue,
    pub delta: RationalValue,
    pub mu: RationalValue,
}

fn check_hamilton_d(d: usize) -> Result<()> {
    if !d.is_multiple_of(2) || d < 4 {
        return Err(Error::invalid_parameter(format!(
            "the Hamilton model needs even d >= 4, got {d}"
        )));
    }
    Ok(())
}

fn check_ij(i: usize, j: usize) -> Result<()> {
    if i == 0 || j > i {
        return Err(Error::invalid_parameter(format!(
            "cycle statistic indices need 1 <= i and 0 <= j <= i, got ({i},{j})"
        )));
    }
    Ok(())
}

/// Limiting rate and conditioning shift of the `(i,j)` cycle statistic:
/// `lambda = C(i,j) (d-1)^i (d-2)^j / (2i)` and
/// `delta = (-1)^{i+j} 2^j / ((d-1)^i (d-2)^j)` for `j > 0`,
/// `delta = -2/(d-1)^i` for odd `i` at `j = 0`, else `0`.
pub fn lambda_delta_mu(d: usize, i: usize, j: usize) -> Result<LimitTriple> {
    check_hamilton_d(d)?;
    check_ij(i, j)?;
    let di = d as i64;
    let base = int_pow(di - 1, i as u64) * int_pow(di - 2, j as u64);
    let lambda = frac(
        binomial(i as i64, j as i64) * &base,
        BigInt::from(2 * i as i64),
    );
    let delta = if j > 0 {
        let sign = if (i + j).is_multiple_of(2) { 1 } else { -1 };
        frac(BigInt::from(sign) * int_pow(2, j as u64), base)
    } else if i % 2 == 1 {
        frac(BigInt::from(-2), int_pow(di - 1, i as u64))
    } else {
        BigRational::zero()
    };
    let mu = &lambda * (BigRational::one() + &delta);
    Ok(LimitTriple { lambda, delta, mu })
}

/// Transfer matrices of the conditioned count: `A` collects the
/// half-edge choices at a plain vertex by (incoming type, outgoing
/// type), `B` is the straight-ahead transit, `Btilde = A - B` the
/// violating one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferMatrices {
    pub a: [[BigInt; 2]; 2],
    pub b: [[BigInt; 2]; 2],
    pub btilde: [[BigInt; 2]; 2],
}

pub fn transfer_matrices(d: usize) -> TransferMatrices {
    let di = d as i64;
    let big = |x: i64| BigInt::from(x);
    TransferMatrices {
        a: [[big(1), big(di - 2)], [big(2), big(di - 3)]],
        b: [[big(1), big(0)], [big(0), big(1)]],
        btilde: [[big(0), big(di - 2)], [big(2), big(di - 4)]],
    }
}

fn mat_mul(x: &[[BigInt; 2]; 2], y: &[[BigInt; 2]; 2]) -> [[BigInt; 2]; 2] {
    let mut out = [
        [BigInt::zero(), BigInt::zero()],
        [BigInt::zero(), BigInt::zero()],
    ];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = &x[r][0] * &y[0][c] + &x[r][1] * &y[1][c];
        }
    }
    out
}

fn mat_pow(x: &[[BigInt; 2]; 2], e: usize) -> [[BigInt; 2]; 2] {
    let mut out = [
        [BigInt::one(), BigInt::zero()],
        [BigInt::zero(), BigInt::one()],
    ];
    for _ in 0..e {
        out = mat_mul(&out, x);
    }
    out
}

/// Conditioned mean via the explicit trace of `A^i Btilde^j`, with the
/// all-ones correction at `j = 0` (the walk that never leaves the
/// planted cycle is impossible). Independent route to `mu`.
pub fn trace_mu(d: usize, i: usize, j: usize) -> Result<BigRational> {
    check_hamilton_d(d)?;
    check_ij(i, j)?;
    let m = transfer_matrices(d);
    let prod = mat_mul(&mat_pow(&m.a, i), &mat_pow(&m.btilde, j));
    let mut tr = &prod[0][0] + &prod[1][1];
    if j == 0 {
        tr -= 1;
    }
    Ok(frac(
        binomial(i as i64, j as i64) * tr,
        BigInt::from(2 * i as i64),
    ))
}

/// Exact expected number of rainbow Hamilton cycles and the growth rate
/// `f(d) = (d-1)(1-2/d)^{d-2}` controlling its exponential order.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonExpectation {
    pub n: usize,
    pub d: usize,
    pub e_y: BigRational,
    pub growth_rate: BigRational,
}

impl HamiltonExpectation {
    pub fn to_json(&self) -> HamiltonExpectationJson {
        HamiltonExpectationJson {
            n: self.n,
            d: self.d,
            e_y: rat_json(&self.e_y),
            growth_rate: rat_json(&self.growth_rate),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HamiltonExpectationJson {
    pub n: usize,
    pub d: usize,
    pub e_y: RationalValue,
    pub growth_rate: RationalValue,
}

/// `E Y = d^{2n} (d-1)^n (n!)^2 ((d-2)n)! / (2n (dn)!)`.
pub fn expected_hamilton_exact(n: usize, d: usize) -> Result<HamiltonExpectation> {
    check_hamilton_d(d)?;
    if n < 3 {
        return Err(Error::invalid_parameter("the Hamilton model needs n >= 3"));
    }
    let (nb, db) = (n as u64, d as u64);
    let numer = int_pow(d as i64, 2 * nb)
        * int_pow(d as i64 - 1, nb)
        * factorial(nb).pow(2)
        * factorial((db - 2) * nb);
    let denom = BigInt::from(2 * nb) * factorial(db * nb);
    Ok(HamiltonExpectation {
        n,
        d,
        e_y: frac(numer, denom),
        growth_rate: growth_rate_f(d)?,
    })
}

/// `f(d) = (d-1) (d-2)^{d-2} / d^{d-2}`.
pub fn growth_rate_f(d: usize) -> Result<BigRational> {
    check_hamilton_d(d)?;
    Ok(frac(
        BigInt::from(d as i64 - 1) * int_pow(d as i64 - 2, d as u64 - 2),
        int_pow(d as i64, d as u64 - 2),
    ))
}

/// Exact finite-size mean of the `(i,j)` cycle statistic:
/// `2i E X_{ij} = C(i,j) d^{2i} (d-1)^i (d-2)^j [n]_i^2 / [dn]_{2i}`.
pub fn expected_census_exact(n: usize, d: usize, i: usize, j: usize) -> Result<BigRational> {
    check_hamilton_d(d)?;
    check_ij(i, j)?;
    if i > n {
        return Err(Error::invalid_parameter(format!(
            "cycle half-length {i} exceeds n = {n}"
        )));
    }
    expected_census_exact_bipartite(n, n, d, d, i, j)
}

/// Finite-size census mean for the matching model: `2n` plain cells of
/// degree `d`, `n` coloured cells of degree `2d`.
pub fn expected_census_exact_matching(
    n: usize,
    d: usize,
    i: usize,
    j: usize,
) -> Result<BigRational> {
    if n == 0 || d == 0 {
        return Err(Error::invalid_parameter("matching model needs n, d >= 1"));
    }
    check_ij(i, j)?;
    if i > n {
        return Err(Error::invalid_parameter(format!(
            "cycle half-length {i} exceeds the colour count {n}"
        )));
    }
    expected_census_exact_bipartite(2 * n, n, d, 2 * d, i, j)
}

/// The same expectation on a general bipartite configuration with
/// `n_plain` plain cells of degree `d_plain` and `n_col` coloured cells
/// of degree `2q`; total points per side must agree.
fn expected_census_exact_bipartite(
    n_plain: usize,
    n_col: usize,
    d_plain: usize,
    two_q: usize,
    i: usize,
    j: usize,
) -> Result<BigRational> {
    let points = n_plain as i64 * d_plain as i64;
    debug_assert_eq!(points, n_col as i64 * two_q as i64);
    let numer = binomial(i as i64, j as i64)
        * int_pow(d_plain as i64, i as u64)
        * int_pow(d_plain as i64 - 1, i as u64)
        * int_pow(two_q as i64, i as u64)
        * int_pow(two_q as i64 - 2, j as u64)
        * falling(n_plain as i64, i as u64)
        * falling(n_col as i64, i as u64);
    let denom = BigInt::from(2 * i as i64) * falling(points, 2 * i as u64);
    Ok(frac(numer, denom))
}

/// The two halves and total of the rate sum `sum lambda delta^2`,
/// evaluated by series and in closed form.
#[derive(Clone, Debug, Serialize)]
pub struct RateSumReport {
    pub d: usize,
    pub series_j_positive: f64,
    pub series_j_zero: f64,
    pub series_total: f64,
    pub closed_j_positive: f64,
    pub closed_j_zero: f64,
    pub closed_total: f64,
    pub terms_used: usize,
}

/// Sum the series until terms drop below 1e-15; closed forms are
/// `ln((d-2)^2 / (d(d-4))) / 2`, `ln(d/(d-2))` and `ln(d/(d-4)) / 2`.
pub fn sum_lambda_delta_sq(d: usize) -> Result<RateSumReport> {
    if d <= 4 {
        return Err(Error::divergent(format!(
            "the rate sum diverges for d <= 4, got {d}"
        )));
    }
    check_hamilton_d(d)?;
    let df = d as f64;
    // j >= 1 terms collapse to a difference of two geometric-over-i
    // series; the j = 0 terms keep only odd i.
    let r1 = (df + 2.0) / ((df - 1.0) * (df - 2.0));
    let r2 = 1.0 / (df - 1.0);
    let mut j_pos = 0.0f64;
    let mut j_zero = 0.0f64;
    let mut terms = 0usize;
    let mut p1 = 1.0f64;
    let mut p2 = 1.0f64;
    for i in 1..100_000usize {
        p1 *= r1;
        p2 *= r2;
        let t_pos = 0.5 * (p1 - p2) / i as f64;
        let t_zero = if i % 2 == 1 { 2.0 * p2 / i as f64 } else { 0.0 };
        j_pos += t_pos;
        j_zero += t_zero;
        terms = i;
        if (p1 / i as f64) < 1e-15 && (p2 / i as f64) < 1e-15 {
            break;
        }
    }
    let closed_j_positive = 0.5 * ((df - 2.0) * (df - 2.0) / (df * (df - 4.0))).ln();
    let closed_j_zero = (df / (df - 2.0)).ln();
    Ok(RateSumReport {
        d,
        series_j_positive: j_pos,
        series_j_zero: j_zero,
        series_total: j_pos + j_zero,
        closed_j_positive,
        closed_j_zero,
        closed_total: 0.5 * (df / (df - 4.0)).ln(),
        terms_used: terms,
    })
}

/// Closed forms for the rainbow perfect matching model on `2n` vertices
/// of degree `d` with `n` colours, `d` edges each.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchingTheory {
    pub n: usize,
    pub d: usize,
    /// `E Z = d^{3n} (2n)! ((2d-2)n)! / ((2dn)!)`.
    pub e_z: BigRational,
    /// `(d-1)^{2d-2} / d^{2d-3}`; the expected count grows iff this
    /// exceeds one.
    pub growth_base: BigRational,
    /// Limit of `E Z^2/(E Z)^2`, i.e. `(d-1)/sqrt(d(d-3))`; needs d >= 4.
    pub variance_ratio: Option<f64>,
}

impl MatchingTheory {
    /// `lambda = C(i,j) 2^j (d-1)^{i+j} / (2i)` for the matching model.
    pub fn lambda(&self, i: usize, j: usize) -> Result<BigRational> {
        check_ij(i, j)?;
        let di = self.d as i64;
        Ok(frac(
            binomial(i as i64, j as i64) * int_pow(2, j as u64) * int_pow(di - 1, (i + j) as u64),
            BigInt::from(2 * i as i64),
        ))
    }

    /// `delta = (-1)^{i+j} / (d-1)^{i+j}`.
    pub fn delta(&self, i: usize, j: usize) -> Result<BigRational> {
        check_ij(i, j)?;
        let di = self.d as i64;
        let sign = if (i + j).is_multiple_of(2) { 1 } else { -1 };
        Ok(frac(BigInt::from(sign), int_pow(di - 1, (i + j) as u64)))
    }

    pub fn to_json(&self) -> MatchingTheoryJson {
        MatchingTheoryJson {
            n: self.n,
            d: self.d,
            e_z: rat_json(&self.e_z),
            growth_base: rat_json(&self.growth_base),
            variance_ratio: self.variance_ratio,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchingTheoryJson {
    pub n: usize,
    pub d: usize,
    pub e_z: RationalValue,
    pub growth_base: RationalValue,
    pub variance_ratio: Option<f64>,
}

pub fn matching_theory(n: usize, d: usize) -> Result<MatchingTheory> {
    if n == 0 || d == 0 {
        return Err(Error::invalid_parameter("matching model needs n, d >= 1"));
    }
    let (nb, db) = (n as u64, d as u64);
    let e_z = frac(
        int_pow(d as i64, 3 * nb) * factorial(2 * nb) * factorial((2 * db - 2) * nb),
        factorial(2 * db * nb),
    );
    let growth_base = frac(
        int_pow(d as i64 - 1, 2 * db - 2),
        int_pow(d as i64, 2 * db - 3),
    );
    let variance_ratio = if d >= 4 {
        let df = d as f64;
        Some((df - 1.0) / (df * (df - 3.0)).sqrt())
    } else {
        None
    };
    Ok(MatchingTheory {
        n,
        d,
        e_z,
        growth_base,
        variance_ratio,
    })
}

/// Everything `theory` knows for one `(n, d)`, JSON-ready.
#[derive(Clone, Debug, Serialize)]
pub struct TheoryReport {
    pub n: usize,
    pub d: usize,
    pub hamilton: Option<HamiltonExpectationJson>,
    pub limit_triples: Vec<LimitTripleRow>,
    pub census_means: Vec<CensusMeanRow>,
    pub rate_sum: Option<RateSumReport>,
    pub matching: MatchingTheoryJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitTripleRow {
    pub i: usize,
    pub j: usize,
    #[serde(flatten)]
    pub triple: LimitTripleJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusMeanRow {
    pub i: usize,
    pub j: usize,
    pub mean: RationalValue,
}

/// Collect the closed forms for `(n, d)` with cycle statistics up to
/// `i_max`. Parts whose preconditions fail are omitted rather than
/// failing the whole report.
pub fn theory_report(n: usize, d: usize, i_max: usize) -> Result<TheoryReport> {
    let hamilton = expected_hamilton_exact(n, d).ok().map(|h| h.to_json());
    let mut limit_triples = Vec::new();
    let mut census_means = Vec::new();
    if check_hamilton_d(d).is_ok() {
        for i in 1..=i_max {
            for j in 0..=i {
                let t = lambda_delta_mu(d, i, j)?;
                limit_triples.push(LimitTripleRow {
                    i,
                    j,
                    triple: t.to_json(),
                });
                if i <= n && n >= 3 {
                    census_means.push(CensusMeanRow {
                        i,
                        j,
                        mean: rat_json(&expected_census_exact(n, d, i, j)?),
                    });
                }
            }
        }
    }
    let rate_sum = sum_lambda_delta_sq(d).ok();
    Ok(TheoryReport {
        n,
        d,
        hamilton,
        limit_triples,
        census_means,
        rate_sum,
        matching: matching_theory(n, d)?.to_json(),
    })
}

/// Decimal log of a positive rational; convenience for growth checks.
pub fn rational_ln(r: &BigRational) -> f64 {
    assert!(r.is_positive());
    big_ln(r.numer()) - big_ln(r.denom())
}

/// `E Y / f(d)^n` stays bounded and slowly varying; used by trend tests.
pub fn hamilton_rate_ratio(n: usize, d: usize) -> Result<f64> {
    let h = expected_hamilton_exact(n, d)?;
    let log_ratio = rational_ln(&h.e_y) - n as f64 * rational_ln(&h.growth_rate);
    Ok(log_ratio.exp())
}
