//! Floating-point support: double-double accumulation, log-factorial
//! tables and deterministic pairwise summation.

/// Unevaluated sum of two doubles (`hi + lo` with `|lo| <= ulp(hi)/2`).
///
/// Used where plain f64 cancellation would eat the budget of an exact
/// identity check, e.g. differences of log-factorials near 1e5.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[allow(clippy::should_implement_trait)] // value-style accumulator API
impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let s2 = s2 + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    pub fn add_f64(self, x: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, x);
        let s2 = s2 + self.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd { hi: -other.hi, lo: -other.lo })
    }

    pub fn scale(self, k: f64) -> Dd {
        // k is an exact small integer in every call site; the product
        // error is recovered with an FMA.
        let p = self.hi * k;
        let e = self.hi.mul_add(k, -p);
        let (hi, lo) = quick_two_sum(p, e + self.lo * k);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Table of `ln k!` for `k = 0..=max`, accumulated in double-double.
pub struct LnFactTable {
    ln_fact: Vec<Dd>,
}

impl LnFactTable {
    pub fn new(max: usize) -> Self {
        let mut ln_fact = Vec::with_capacity(max + 1);
        let mut acc = Dd::ZERO;
        ln_fact.push(acc);
        for k in 1..=max {
            acc = acc.add_f64((k as f64).ln());
            ln_fact.push(acc);
        }
        LnFactTable { ln_fact }
    }

    pub fn max(&self) -> usize {
        self.ln_fact.len() - 1
    }

    pub fn ln_fact(&self, k: usize) -> Dd {
        self.ln_fact[k]
    }

    pub fn ln_binomial(&self, a: usize, b: usize) -> Dd {
        assert!(b <= a);
        self.ln_fact(a).sub(self.ln_fact(b)).sub(self.ln_fact(a - b))
    }
}

/// Deterministic pairwise summation; the reduction tree depends only on
/// the slice length, so results are identical for any thread count that
/// produced the inputs in the same order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_recovers_cancellation() {
        // (1e16 + 1) - 1e16 == 1 exactly in dd, not in f64.
        let a = Dd::from_f64(1e16).add_f64(1.0);
        let b = Dd::from_f64(1e16);
        assert_eq!(a.sub(b).to_f64(), 1.0);
    }

    #[test]
    fn ln_fact_table_matches_direct_products() {
        let t = LnFactTable::new(40);
        let direct: f64 = (2..=40).map(|k| (k as f64).ln()).sum();
        assert!((t.ln_fact(40).to_f64() - direct).abs() < 1e-12);
        // ln C(40, 13) against exact integer value.
        let c = crate::exact::binomial(40, 13);
        let expect = crate::exact::big_ln(&c);
        assert!((t.ln_binomial(40, 13).to_f64() - expect).abs() < 1e-10);
    }

    #[test]
    fn pairwise_handles_edge_lengths() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[2.0]), 2.0);
        let xs: Vec<f64> = (0..1001).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500.0 * 1001.0);
    }
}
