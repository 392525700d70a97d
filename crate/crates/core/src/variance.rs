//! Second-moment machinery for the rainbow Hamilton count: exact overlap
//! counts, the finite-size second-moment sum, the rate surface over the
//! overlap triangle, the quintic locating its interior maximum, the
//! Hessian constants and the resulting limit of `E Y^2 / (E Y)^2`.

use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, frac, frac_i64, frac_to_f64, int_pow};
use crate::numeric::{pairwise_sum, Dd, LnFactTable};
use crate::theory::{expected_hamilton_exact, RationalValue};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

fn rat_json(r: &BigRational) -> RationalValue {
    RationalValue {
        fraction: crate::exact::frac_str(r),
        decimal: frac_to_f64(r),
    }
}

/// Overlap class of a second Hamilton configuration against a fixed
/// first one: `k` coloured cells and `j` plain cells share both pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OverlapPoint {
    pub n: usize,
    pub k: usize,
    pub j: usize,
}

impl OverlapPoint {
    /// Number of maximal shared runs; each run ends at plain cells.
    pub fn strings(&self) -> i64 {
        self.k as i64 - self.j as i64
    }

    /// Plain cells sharing exactly one pair (two run ends per run).
    pub fn s1(&self) -> i64 {
        2 * (self.k as i64 - self.j as i64)
    }

    /// Plain cells sharing nothing.
    pub fn s2(&self) -> i64 {
        self.n as i64 - 2 * self.k as i64 + self.j as i64
    }

    pub fn feasible(&self) -> bool {
        let (n, k, j) = (self.n as i64, self.k as i64, self.j as i64);
        if k == 0 {
            return j == 0;
        }
        j < k && j >= 0 && n - 2 * k + j >= 0 && k < n
    }
}

/// `N(k, j)`: the number of second Hamilton configurations compatible
/// with a fixed first one and overlapping it in exactly `k` coloured and
/// `j` plain cells. Zero for infeasible classes. The `k = 0` class uses
/// placement factor one.
pub fn overlap_count(n: usize, d: usize, k: usize, j: usize) -> Result<BigRational> {
    if d < 4 || n < 3 {
        return Err(Error::invalid_parameter(
            "overlap counts need d >= 4 and n >= 3",
        ));
    }
    if k == n && j == n {
        return Err(Error::invalid_parameter(
            "the full overlap (k, j) = (n, n) is the identical configuration",
        ));
    }
    let p = OverlapPoint { n, k, j };
    if !p.feasible() {
        return Ok(BigRational::zero());
    }
    let (ni, di, ki, ji) = (n as i64, d as i64, k as i64, j as i64);
    let placement = if k == 0 {
        BigRational::one()
    } else {
        frac(
            BigInt::from(ni)
                * binomial(ki, ji)
                * binomial(ni - ki - 1, ki - ji - 1),
            BigInt::from(ki),
        )
    };
    let choices = int_pow(2, (ki - ji) as u64)
        * int_pow(di - 2, (2 * ni - ki - ji) as u64)
        * int_pow(di - 3, (ni - 2 * ki + ji) as u64);
    let pairs = frac(
        factorial((n - k) as u64) * factorial((n - k - 1) as u64),
        BigInt::from(2),
    );
    Ok(placement * frac(choices, BigInt::one()) * pairs)
}

/// `P(H_2 | H_1) = ((d-4)n + 2k)! / ((d-2)n)!` for a compatible second
/// configuration with coloured overlap `k`.
pub fn conditional_prob(n: usize, d: usize, k: usize) -> Result<BigRational> {
    if d < 4 {
        return Err(Error::invalid_parameter("conditional_prob needs d >= 4"));
    }
    if k > n {
        return Err(Error::invalid_parameter("overlap k cannot exceed n"));
    }
    Ok(frac(
        factorial(((d - 4) * n + 2 * k) as u64),
        factorial(((d - 2) * n) as u64),
    ))
}

/// One overlap term of the second-moment sum.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OverlapTerm {
    pub k: usize,
    pub j: usize,
    pub f: f64,
}

/// Finite-size `E Y^2 / (E Y)^2` with its overlap decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct SecondMomentReport {
    pub n: usize,
    pub d: usize,
    pub ratio: f64,
    /// Exact value, present when the exact route ran (small n).
    pub ratio_exact: Option<RationalValue>,
    pub one_over_e_y: f64,
    /// Limit `sqrt(d/(d-4))` when it exists.
    pub limit: Option<f64>,
    pub terms: Vec<OverlapTerm>,
}

fn feasible_classes(n: usize) -> impl Iterator<Item = (usize, usize)> {
    std::iter::once((0usize, 0usize)).chain(
        (1..n).flat_map(move |k| {
            let j_min = (2 * k).saturating_sub(n);
            (j_min..k).map(move |j| (k, j))
        }),
    )
}

/// Exact rational `E Y^2/(E Y)^2 = (1 + sum N P) / E Y`; practical for
/// n up to a few dozen.
pub fn second_moment_exact(n: usize, d: usize) -> Result<BigRational> {
    let e_y = expected_hamilton_exact(n, d)?.e_y;
    let mut acc = BigRational::one();
    for (k, j) in feasible_classes(n) {
        acc += overlap_count(n, d, k, j)? * conditional_prob(n, d, k)?;
    }
    Ok(acc / e_y)
}

/// Exact rational term `f(n,d,k,j) = N(k,j) P(H2|H1) / E Y`.
pub fn overlap_term_exact(n: usize, d: usize, k: usize, j: usize) -> Result<BigRational> {
    let e_y = expected_hamilton_exact(n, d)?.e_y;
    Ok(overlap_count(n, d, k, j)? * conditional_prob(n, d, k)? / e_y)
}

/// Log-factorial route for one term, following the factor structure of
/// `N`, `P` and `E Y` separately.
pub fn ln_term_factored(table: &LnFactTable, n: usize, d: usize, k: usize, j: usize) -> Dd {
    let (nf, df) = (n as f64, d as f64);
    let ln2 = std::f64::consts::LN_2;
    let mut ln_n = Dd::ZERO;
    if k == 0 {
        ln_n = ln_n
            .add_f64(2.0 * nf * (df - 2.0).ln())
            .add(table.ln_fact(n))
            .add(table.ln_fact(n - 1))
            .add_f64(-ln2);
        if d > 4 {
            ln_n = ln_n.add_f64(nf * (df - 3.0).ln());
        }
    } else {
        ln_n = ln_n
            .add_f64(nf.ln() - (k as f64).ln())
            .add(table.ln_binomial(k, j))
            .add(table.ln_binomial(n - k - 1, k - j - 1))
            .add_f64((k - j) as f64 * ln2)
            .add_f64((2 * n - k - j) as f64 * (df - 2.0).ln())
            .add(table.ln_fact(n - k))
            .add(table.ln_fact(n - k - 1))
            .add_f64(-ln2);
        if d > 4 {
            ln_n = ln_n.add_f64((n as i64 - 2 * k as i64 + j as i64) as f64 * (df - 3.0).ln());
        }
    }
    let ln_p = table
        .ln_fact((d - 4) * n + 2 * k)
        .sub(table.ln_fact((d - 2) * n));
    ln_n.add(ln_p).sub(ln_expected_hamilton(table, n, d))
}

/// Log-factorial route for the same term from the single displayed
/// product formula.
pub fn ln_term_product(table: &LnFactTable, n: usize, d: usize, k: usize, j: usize) -> Dd {
    assert!(k >= 1, "the product form needs k >= 1");
    let (nf, df) = (n as f64, d as f64);
    let ln2 = std::f64::consts::LN_2;
    let mut v = Dd::ZERO
        .add_f64(2.0 * nf.ln())
        .add(table.ln_fact(k - 1))
        .add(table.ln_fact(n - k).scale(3.0))
        .add_f64((k - j) as f64 * ln2)
        .add_f64((2 * n - k - j) as f64 * (df - 2.0).ln())
        .add(table.ln_fact((d - 4) * n + 2 * k))
        .add(table.ln_fact(d * n));
    if d > 4 {
        v = v.add_f64((n as i64 - 2 * k as i64 + j as i64) as f64 * (df - 3.0).ln());
    }
    v.sub(Dd::ZERO.add_f64(2.0 * ((n - k) as f64).ln()))
        .sub(table.ln_fact(k - j))
        .sub(table.ln_fact(k - j - 1))
        .sub(table.ln_fact(j))
        .sub(table.ln_fact(n + j - 2 * k))
        .sub(table.ln_fact((d - 2) * n).scale(2.0))
        .sub(Dd::ZERO.add_f64(2.0 * nf * df.ln() + nf * (df - 1.0).ln()))
        .sub(table.ln_fact(n).scale(2.0))
}

fn ln_expected_hamilton(table: &LnFactTable, n: usize, d: usize) -> Dd {
    let (nf, df) = (n as f64, d as f64);
    Dd::ZERO
        .add_f64(2.0 * nf * df.ln() + nf * (df - 1.0).ln())
        .add(table.ln_fact(n).scale(2.0))
        .add(table.ln_fact((d - 2) * n))
        .add_f64(-(2.0 * nf).ln())
        .sub(table.ln_fact(d * n))
}

/// Threshold below which the exact rational route is used.
const EXACT_N_LIMIT: usize = 12;

/// Finite-size second moment ratio.
///
/// Small sizes run in exact rationals; larger ones use double-double
/// log-factorials with a deterministic pairwise reduction of the
/// exponentiated terms.
pub fn second_moment_finite(n: usize, d: usize) -> Result<SecondMomentReport> {
    if d < 4 || !d.is_multiple_of(2) || n < 3 {
        return Err(Error::invalid_parameter(
            "second moment needs even d >= 4 and n >= 3",
        ));
    }
    let limit = if d > 4 {
        Some((d as f64 / (d as f64 - 4.0)).sqrt())
    } else {
        None
    };
    if n <= EXACT_N_LIMIT {
        let e_y = expected_hamilton_exact(n, d)?.e_y;
        let mut terms = Vec::new();
        let mut acc = BigRational::zero();
        for (k, j) in feasible_classes(n) {
            let f = overlap_count(n, d, k, j)? * conditional_prob(n, d, k)? / &e_y;
            terms.push(OverlapTerm {
                k,
                j,
                f: frac_to_f64(&f),
            });
            acc += f;
        }
        let one_over = e_y.recip();
        let ratio = &acc + &one_over;
        return Ok(SecondMomentReport {
            n,
            d,
            ratio: frac_to_f64(&ratio),
            ratio_exact: Some(rat_json(&ratio)),
            one_over_e_y: frac_to_f64(&one_over),
            limit,
            terms,
        });
    }

    let table = LnFactTable::new(d * n);
    let mut terms = Vec::new();
    let mut lns = Vec::new();
    for (k, j) in feasible_classes(n) {
        // Skip structurally empty classes (zero binomials).
        if k >= 1 && (k - j - 1) > (n - k - 1) {
            continue;
        }
        let v = ln_term_factored(&table, n, d, k, j);
        terms.push(OverlapTerm { k, j, f: 0.0 });
        lns.push(v.to_f64());
    }
    let max_ln = lns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = lns.iter().map(|&x| (x - max_ln).exp()).collect();
    for (t, s) in terms.iter_mut().zip(&scaled) {
        t.f = s * max_ln.exp();
    }
    let sum = pairwise_sum(&scaled) * max_ln.exp();
    let one_over = (-ln_expected_hamilton(&table, n, d).to_f64()).exp();
    Ok(SecondMomentReport {
        n,
        d,
        ratio: sum + one_over,
        ratio_exact: None,
        one_over_e_y: one_over,
        limit,
        terms,
    })
}

/// `x ln x` extended continuously by zero at the origin.
#[inline]
pub fn x_ln_x(x: f64) -> f64 {
    debug_assert!(x > -1e-9, "x_ln_x got {x}");
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// A point of the overlap-density triangle
/// `T = {0 <= alpha <= delta, delta + alpha <= 1}` at `t = d - 2`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SurfacePoint {
    pub t: f64,
    pub alpha: f64,
    pub delta: f64,
}

impl SurfacePoint {
    pub fn new(t: f64, alpha: f64, delta: f64) -> Result<Self> {
        let p = SurfacePoint { t, alpha, delta };
        if !t.is_finite() || t <= 2.0 {
            return Err(Error::out_of_domain(format!("need t > 2, got {t}")));
        }
        if !p.in_triangle(1e-12) {
            return Err(Error::out_of_domain(format!(
                "({alpha}, {delta}) lies outside the triangle"
            )));
        }
        Ok(p)
    }

    pub fn in_triangle(&self, slack: f64) -> bool {
        self.alpha >= -slack
            && self.alpha <= self.delta + slack
            && self.delta + self.alpha <= 1.0 + slack
    }

    pub fn kappa(&self) -> f64 {
        1.0 - self.delta
    }

    pub fn gamma(&self) -> f64 {
        1.0 - self.delta - self.alpha
    }
}

/// `ln F(alpha, delta)` with the `x^x` boundary conventions.
pub fn ln_surface(t: f64, alpha: f64, delta: f64) -> f64 {
    let a = alpha.max(0.0);
    let dl = delta.max(0.0);
    a * std::f64::consts::LN_2 + t * (t + 2.0).ln()
        + (dl - a) * (t - 1.0).ln()
        + x_ln_x(t - 2.0 * dl)
        + x_ln_x(1.0 - dl)
        + 3.0 * x_ln_x(dl)
        - (t + 1.0).ln()
        - (2.0 * t - 2.0 * dl - a) * t.ln()
        - x_ln_x(1.0 - dl - a)
        - 2.0 * x_ln_x(a)
        - x_ln_x(dl - a)
}

/// `ln G(kappa, gamma)` in the overlap-density coordinates; the same
/// function as `ln_surface` after `delta = 1 - kappa`,
/// `alpha = kappa - gamma`, grouped independently as a cross-check.
pub fn ln_surface_kappa_gamma(d: f64, kappa: f64, gamma: f64) -> f64 {
    let k = kappa.max(0.0);
    let g = gamma.max(0.0);
    (k - g) * std::f64::consts::LN_2
        + (d - 2.0) * d.ln()
        + (1.0 + g - 2.0 * k) * (d - 3.0).ln()
        + x_ln_x(d - 4.0 + 2.0 * k)
        + x_ln_x(k)
        + 3.0 * x_ln_x(1.0 - k)
        - (d - 1.0).ln()
        - (2.0 * d - 6.0 + k + g) * (d - 2.0).ln()
        - x_ln_x(g)
        - 2.0 * x_ln_x(k - g)
        - x_ln_x(1.0 - 2.0 * k + g)
}

/// Surface value and first-order diagnostics at one point.
#[derive(Clone, Debug, Serialize)]
pub struct SurfaceReport {
    pub point: SurfacePoint,
    pub f: f64,
    /// Same value computed through the `(kappa, gamma)` grouping.
    pub g: f64,
    /// `(d ln F / d delta, d ln F / d alpha)`.
    pub gradient: (f64, f64),
    /// Residuals of the two stationarity equations.
    pub stationary_residuals: (f64, f64),
}

/// Residual of `t^2 (t-1) delta^3 (1-delta-alpha)
///   = (t-2 delta)^2 (1-delta)(delta-alpha)`.
pub fn stationary_residual_delta(t: f64, alpha: f64, delta: f64) -> f64 {
    t * t * (t - 1.0) * delta.powi(3) * (1.0 - delta - alpha)
        - (t - 2.0 * delta).powi(2) * (1.0 - delta) * (delta - alpha)
}

/// Residual of `(t+1) alpha^2 - 2 t alpha + 2 t delta (1-delta) = 0`.
pub fn stationary_residual_alpha(t: f64, alpha: f64, delta: f64) -> f64 {
    (t + 1.0) * alpha * alpha - 2.0 * t * alpha + 2.0 * t * delta * (1.0 - delta)
}

pub fn surface_f(point: SurfacePoint) -> Result<SurfaceReport> {
    let SurfacePoint { t, alpha, delta } = point;
    let f = ln_surface(t, alpha, delta).exp();
    let g = ln_surface_kappa_gamma(t + 2.0, point.kappa(), point.gamma()).exp();
    let grad_delta = (t * t * (t - 1.0) * delta.powi(3) * (1.0 - delta - alpha)).ln()
        - ((t - 2.0 * delta).powi(2) * (1.0 - delta) * (delta - alpha)).ln();
    let grad_alpha = (2.0 * t * (delta - alpha) * (1.0 - delta - alpha)).ln()
        - ((t - 1.0) * alpha * alpha).ln();
    Ok(SurfaceReport {
        point,
        f,
        g,
        gradient: (grad_delta, grad_alpha),
        stationary_residuals: (
            stationary_residual_delta(t, alpha, delta),
            stationary_residual_alpha(t, alpha, delta),
        ),
    })
}

/// Second derivative of `ln F(beta delta, delta)` in `delta`; positive
/// throughout `0 < delta < 1/t`, which rules out interior maxima with
/// tiny `delta`.
pub fn ray_second_derivative(t: f64, beta: f64, delta: f64) -> f64 {
    let num = 2.0 * t - beta * t - 4.0 * t * delta + 2.0 * t * delta * delta
        - 2.0 * beta * t * delta
        + 2.0 * beta * t * delta * delta
        + 2.0 * beta * delta;
    let den = (1.0 - delta) * (1.0 - delta - beta * delta) * delta * (t - 2.0 * delta);
    num / den
}

/// Exact coefficients of the quartic factor `h` in `delta`, as
/// polynomials in `t`.
fn h_coeffs(t: &BigRational) -> [BigRational; 5] {
    let p = |e: u32| -> BigRational {
        let mut acc = BigRational::one();
        for _ in 0..e {
            acc *= t;
        }
        acc
    };
    let c = |x: i64| frac_i64(x, 1);
    [
        // delta^0 .. delta^4
        p(3),
        -c(2) * p(4) - c(6) * p(2),
        c(4) * p(4) + c(6) * p(3) + c(2) * p(2) + c(12) * p(1),
        -c(2) * p(4) - c(12) * p(3) - c(2) * p(2) - c(8) * p(1) - c(8),
        p(5) - c(4) * p(4) + c(9) * p(3) + c(6) * p(2) - c(4) * p(1) + c(8),
    ]
}

/// Exact evaluation of the quintic `g`.
pub fn g_exact(t: &BigRational, delta: &BigRational) -> BigRational {
    let one = BigRational::one();
    let two = frac_i64(2, 1);
    let inner = (t - &two * delta) * (t - &two * delta)
        - t * t * (t - &one) * delta * delta;
    (&one - delta) * &inner * &inner
        - frac_i64(2, 1)
            * t
            * t
            * t
            * delta
            * (&one - &two * delta)
            * (&one - &two * delta)
            * (t - &two * delta)
            * (t - &two * delta)
}

/// Exact evaluation of the quartic factor `h`.
pub fn h_exact(t: &BigRational, delta: &BigRational) -> BigRational {
    let cs = h_coeffs(t);
    let mut acc = BigRational::zero();
    for c in cs.iter().rev() {
        acc = acc * delta + c;
    }
    acc
}

/// Exact `h''`, from the rearranged nonnegative-term grouping.
pub fn h_second_exact(t: &BigRational, delta: &BigRational) -> BigRational {
    let p = |e: u32| -> BigRational {
        let mut acc = BigRational::one();
        for _ in 0..e {
            acc *= t;
        }
        acc
    };
    let c = |x: i64| frac_i64(x, 1);
    let d2 = delta * delta;
    c(12) * (t - &c(6)) * p(4) * &d2
        + (c(24) * &d2 - c(12) * delta + c(8)) * p(4)
        + c(12) * (c(9) * &d2 - c(6) * delta + c(1)) * p(3)
        + c(12) * delta * (p(2) - c(4))
        + c(12) * &d2 * (p(2) - c(6) * p(1))
        + c(4) * (c(15) * &d2 - c(6) * delta + c(1)) * p(2)
        + c(24) * (&d2 - c(2) * delta + c(1)) * p(1)
        + c(96) * &d2
}

/// Floating-point report of the quintic diagnostics at `(t, delta)`.
#[derive(Clone, Debug, Serialize)]
pub struct QuinticReport {
    pub t: f64,
    pub delta: f64,
    pub g: f64,
    pub h: f64,
    pub delta0: f64,
    /// `g - (t+2)(delta0 - delta) h`, which is zero identically.
    pub factorisation_residual: f64,
    pub h_second: f64,
}

pub fn quintic_tools(t: f64, delta: f64) -> Result<QuinticReport> {
    if !t.is_finite() || t <= 2.0 {
        return Err(Error::out_of_domain(format!("need t > 2, got {t}")));
    }
    let g = {
        let inner = (t - 2.0 * delta).powi(2) - t * t * (t - 1.0) * delta * delta;
        (1.0 - delta) * inner * inner
            - 2.0 * t.powi(3) * delta * (1.0 - 2.0 * delta).powi(2) * (t - 2.0 * delta).powi(2)
    };
    let tq = BigRational::from_float(t)
        .ok_or_else(|| Error::out_of_domain("t is not finite"))?;
    let dq = BigRational::from_float(delta)
        .ok_or_else(|| Error::out_of_domain("delta is not finite"))?;
    let h = frac_to_f64(&h_exact(&tq, &dq));
    let delta0 = t / (t + 2.0);
    let residual = g - (t + 2.0) * (delta0 - delta) * h;
    let h_second = frac_to_f64(&h_second_exact(&tq, &dq));
    Ok(QuinticReport {
        t,
        delta,
        g,
        h,
        delta0,
        factorisation_residual: residual,
        h_second,
    })
}

/// Hessian constants of the quadratic expansion of `ln(G^n)` about the
/// maximiser, as exact rationals in `d`, and the determinant
/// `D = 4 c1 c3 - c2^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianData {
    pub c1: BigRational,
    pub c2: BigRational,
    pub c3: BigRational,
    pub det: BigRational,
}

impl HessianData {
    pub fn to_json(&self) -> HessianJson {
        HessianJson {
            c1: rat_json(&self.c1),
            c2: rat_json(&self.c2),
            c3: rat_json(&self.c3),
            det: rat_json(&self.det),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HessianJson {
    pub c1: RationalValue,
    pub c2: RationalValue,
    pub c3: RationalValue,
    pub det: RationalValue,
}

pub fn hessian_constants(d: usize) -> Result<HessianData> {
    if d < 4 {
        return Err(Error::invalid_parameter("hessian constants need d >= 4"));
    }
    let di = d as i64;
    let c1 = frac(
        BigInt::from(-di) * BigInt::from(di * di * di - 3 * di * di + 4 * di + 4),
        BigInt::from(4 * (di - 2) * (di - 2) * (di - 3)),
    );
    let c2 = frac(
        BigInt::from(di) * BigInt::from((di - 1) * (di - 1)),
        BigInt::from((di - 2) * (di - 3)),
    );
    let c3 = frac(
        BigInt::from(-di) * BigInt::from((di - 1) * (di - 1)),
        BigInt::from(4 * (di - 3)),
    );
    let det = frac_i64(4, 1) * &c1 * &c3 - &c2 * &c2;
    Ok(HessianData { c1, c2, c3, det })
}

/// Exact square of the Gaussian-sum limit: `f0^2 (2 pi n)^2 / D`
/// evaluated at the maximiser, where every power of `n` cancels. Equals
/// `d / (d - 4)`.
pub fn laplace_limit_sq(d: usize) -> Result<BigRational> {
    if d <= 4 {
        return Err(Error::divergent("the limit needs d > 4"));
    }
    let det = hessian_constants(d)?.det;
    let di = d as i64;
    // Densities of the maximiser: kappa0 = 2/d, gamma0 = 2/(d(d-1)).
    let kappa0 = frac_i64(2, di);
    let gamma0 = frac_i64(2, di * (di - 1));
    let n = BigRational::one(); // powers of n cancel; evaluate at n = 1
    let k = &n * &kappa0;
    let j = &n * &gamma0;
    let dq = frac_i64(di, 1);
    let f0_sq_times_4pi2n2 = ((&dq - frac_i64(4, 1)) * &n + frac_i64(2, 1) * &k)
        * &n
        * &dq
        * &n
        * &n
        / ((&dq - frac_i64(2, 1)) * (&dq - frac_i64(2, 1))
            * &k
            * (&n - &k)
            * &j
            * (&n - frac_i64(2, 1) * &k + &j));
    Ok(f0_sq_times_4pi2n2 / det)
}

/// `f0(n, d, k, j)`: the Stirling prefactor of one overlap term.
pub fn stirling_prefactor(n: usize, d: usize, k: usize, j: usize) -> f64 {
    let (nf, df, kf, jf) = (n as f64, d as f64, k as f64, j as f64);
    ((df * nf - 4.0 * nf + 2.0 * kf) * nf * df).sqrt()
        / (2.0 * std::f64::consts::PI
            * (df - 2.0)
            * (kf * (nf - kf) * jf * (nf - 2.0 * kf + jf)).sqrt())
}

/// Location and diagnostics of the surface maximum over the triangle.
#[derive(Clone, Debug, Serialize)]
pub struct ArgmaxReport {
    pub t: f64,
    pub alpha_star: f64,
    pub delta_star: f64,
    pub f_star: f64,
    pub kappa0: f64,
    pub gamma0: f64,
    pub hessian: HessianJson,
    pub laplace_limit: f64,
    pub laplace_limit_sq: RationalValue,
}

/// Newton steps on the stationarity system from a starting point.
fn newton_refine(t: f64, mut alpha: f64, mut delta: f64) -> Option<(f64, f64)> {
    for _ in 0..80 {
        let s1 = stationary_residual_delta(t, alpha, delta);
        let s2 = stationary_residual_alpha(t, alpha, delta);
        let s1_d = 3.0 * t * t * (t - 1.0) * delta * delta * (1.0 - delta - alpha)
            - t * t * (t - 1.0) * delta.powi(3)
            - (-4.0 * (t - 2.0 * delta) * (1.0 - delta) * (delta - alpha)
                - (t - 2.0 * delta).powi(2) * (delta - alpha)
                + (t - 2.0 * delta).powi(2) * (1.0 - delta));
        let s1_a = -t * t * (t - 1.0) * delta.powi(3) + (t - 2.0 * delta).powi(2) * (1.0 - delta);
        let s2_d = 2.0 * t * (1.0 - 2.0 * delta);
        let s2_a = 2.0 * (t + 1.0) * alpha - 2.0 * t;
        let det = s1_d * s2_a - s1_a * s2_d;
        if det.abs() < 1e-300 {
            return None;
        }
        let step_d = (s1 * s2_a - s1_a * s2) / det;
        let step_a = (s1_d * s2 - s1 * s2_d) / det;
        delta -= step_d;
        alpha -= step_a;
        if !delta.is_finite() || !alpha.is_finite() {
            return None;
        }
        if step_d.abs() < 1e-15 && step_a.abs() < 1e-15 {
            return Some((alpha, delta));
        }
    }
    Some((alpha, delta))
}

/// Dense grid search over the triangle followed by Newton refinement
/// from the best cells. Rows can be scanned by several threads; the
/// reduction is a total-order maximum, so the result is identical for
/// any thread count.
pub fn argmax_f_with(t: f64, grid_steps: usize, threads: usize) -> Result<ArgmaxReport> {
    if t < 4.0 {
        return Err(Error::divergent(format!(
            "the second-moment limit is undefined for t < 4 (d <= 6), got t = {t}"
        )));
    }
    let d = (t as usize) + 2;
    let steps = grid_steps.max(16);

    // Grid row for one delta index: best (lnF, delta, alpha) cells.
    let row_best = |di: usize| -> Vec<(f64, f64, f64)> {
        let delta = di as f64 / steps as f64;
        let a_hi = delta.min(1.0 - delta);
        let mut best = Vec::new();
        let a_steps = (a_hi * steps as f64).floor() as usize;
        for ai in 0..=a_steps {
            let alpha = ai as f64 / steps as f64;
            let v = ln_surface(t, alpha, delta);
            if v.is_finite() {
                best.push((v, delta, alpha));
            }
        }
        best.sort_by(|x, y| y.partial_cmp(x).unwrap());
        best.truncate(4);
        best
    };

    let mut candidates: Vec<(f64, f64, f64)> = Vec::new();
    if threads <= 1 {
        for di in 0..=steps {
            candidates.extend(row_best(di));
        }
    } else {
        let rows: Vec<usize> = (0..=steps).collect();
        let chunk = rows.len().div_ceil(threads);
        let results: Vec<Vec<(f64, f64, f64)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = rows
                .chunks(chunk)
                .map(|part| {
                    let part = part.to_vec();
                    scope.spawn(move || {
                        part.iter().flat_map(|&di| row_best(di)).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for r in results {
            candidates.extend(r);
        }
    }
    // Total order: value, then delta, then alpha.
    candidates.sort_by(|x, y| {
        y.partial_cmp(x).unwrap()
    });
    candidates.truncate(10);

    let mut best = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for &(_, delta, alpha) in &candidates {
        if let Some((a, dl)) = newton_refine(t, alpha.max(1e-6), delta.max(1e-6)) {
            let p = SurfacePoint { t, alpha: a, delta: dl };
            if p.in_triangle(1e-9) {
                let v = ln_surface(t, a, dl);
                let key = (v, dl, a);
                if key > best {
                    best = key;
                }
            }
        }
    }
    // Keep the raw grid optimum as a fallback.
    if let Some(&(v, dl, a)) = candidates.first() {
        if (v, dl, a) > best {
            best = (v, dl, a);
        }
    }
    let (ln_f_star, delta_star, alpha_star) = best;
    let limit_sq = laplace_limit_sq(d)?;
    Ok(ArgmaxReport {
        t,
        alpha_star,
        delta_star,
        f_star: ln_f_star.exp(),
        kappa0: 1.0 - delta_star,
        gamma0: 1.0 - delta_star - alpha_star,
        hessian: hessian_constants(d)?.to_json(),
        laplace_limit: frac_to_f64(&limit_sq).sqrt(),
        laplace_limit_sq: rat_json(&limit_sq),
    })
}

/// Default grid density used by the reports.
pub fn argmax_f(t: f64) -> Result<ArgmaxReport> {
    argmax_f_with(t, 2000, 1)
}
