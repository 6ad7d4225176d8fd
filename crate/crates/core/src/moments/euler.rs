//! Truncated Euler products over the monic primes of F_q[T].

use crate::ffpoly::count_irreducibles_q;
use crate::ComplexApprox;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::sync::Arc;

/// Default truncation degree for every Euler product.
pub const DEFAULT_TRUNCATION: usize = 30;

type DegreeRule = Arc<dyn Fn(usize) -> Complex64 + Send + Sync>;

/// Π_P (1 + δ(deg P)) over monic primes P, cut off at deg P ≤ D.
///
/// The rule returns δ = factor − 1 directly, so that factors within 10⁻³⁰ of 1
/// keep their relative precision.
#[derive(Clone)]
pub struct EulerProductSpec {
    q: u64,
    truncation: usize,
    delta: DegreeRule,
}

impl std::fmt::Debug for EulerProductSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EulerProductSpec").field("q", &self.q).field("truncation", &self.truncation).finish()
    }
}

/// log(1 + z), accurate for tiny |z|.
pub fn ln_1p(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        // alternating series; the next term is below |z|⁷/7 < 1e-21·|z|
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = z;
        for k in 1..=6 {
            let t = p / k as f64;
            acc += if k % 2 == 1 { t } else { -t };
            p *= z;
        }
        acc
    } else {
        (Complex64::new(1.0, 0.0) + z).ln()
    }
}

/// Number of monic primes of degree d, as a float.
pub fn prime_count(q: u64, d: usize) -> f64 {
    count_irreducibles_q(q, d).to_f64().expect("finite count")
}

/// Bound on Σ_{d > D} t(d), extrapolating geometrically from two windows of
/// six degrees each. Six covers every residue mod 2 and mod 3, the periods on
/// which factors (parity rules, powers of ξ_3) may vanish or oscillate.
fn geometric_tail(t: impl Fn(usize) -> f64, truncation: usize) -> f64 {
    let w1: f64 = (1..=6).map(|j| t(truncation + j)).sum();
    let w2: f64 = (7..=12).map(|j| t(truncation + j)).sum();
    if w1 == 0.0 {
        return if w2 == 0.0 { 0.0 } else { f64::INFINITY };
    }
    let r = w2 / w1;
    if r >= 1.0 {
        return f64::INFINITY;
    }
    2.0 * w1 / (1.0 - r)
}

impl EulerProductSpec {
    pub fn new(q: u64, truncation: usize, delta: impl Fn(usize) -> Complex64 + Send + Sync + 'static) -> EulerProductSpec {
        assert!(truncation >= 1, "truncation degree must be positive");
        EulerProductSpec { q, truncation, delta: Arc::new(delta) }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// δ at degree d.
    pub fn delta(&self, d: usize) -> Complex64 {
        (self.delta)(d)
    }

    fn log_term(&self, d: usize) -> Complex64 {
        ln_1p(self.delta(d)) * prime_count(self.q, d)
    }

    /// Geometric estimate of Σ_{d > D} count(d)·|log(1 + δ(d))|.
    pub fn tail_bound(&self) -> f64 {
        geometric_tail(|d| self.log_term(d).norm(), self.truncation)
    }

    /// Σ_{d ≤ D} count(d)·log(1 + δ(d)) with its rounding radius.
    fn log_sum(&self) -> (Complex64, f64) {
        let mut s = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for d in 1..=self.truncation {
            let t = self.log_term(d);
            mass += t.norm();
            s += t;
        }
        // each δ is accurate to a few ulps of its largest summand, which is at
        // most ~1/count(d) wherever the product converges
        let rounding = 8.0 * f64::EPSILON * (self.truncation as f64 + mass);
        (s, rounding)
    }

    /// The truncated product, with radius covering the tail and rounding.
    pub fn evaluate(&self) -> ComplexApprox {
        let (s, rounding) = self.log_sum();
        let v = s.exp();
        let spread = self.tail_bound() + rounding;
        ComplexApprox::new(v.re, v.im, v.norm() * spread.exp_m1())
    }

    /// The product P and its derivative P' = P·Σ count(d)·δ'(d)/(1 + δ(d)),
    /// where `d_delta` is the exact derivative of δ at each degree.
    pub fn evaluate_with_derivative(&self, d_delta: impl Fn(usize) -> Complex64) -> (ComplexApprox, ComplexApprox) {
        let value = self.evaluate();
        let one = Complex64::new(1.0, 0.0);
        let term = |d: usize| d_delta(d) / (one + self.delta(d)) * prime_count(self.q, d);
        let mut ld = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for d in 1..=self.truncation {
            let t = term(d);
            mass += t.norm();
            ld += t;
        }
        let ld_err = geometric_tail(|d| term(d).norm(), self.truncation) + 8.0 * f64::EPSILON * (self.truncation as f64 + mass);
        let log_derivative = ComplexApprox::new(ld.re, ld.im, ld_err);
        (value, value.mul(&log_derivative))
    }
}
