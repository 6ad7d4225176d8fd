//! Complex floats carrying a rigorous-in-spirit error radius.

use serde::{Deserialize, Serialize};

/// A complex number `re + i·im` known to within `err` (absolute radius).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexApprox {
    pub re: f64,
    pub im: f64,
    pub err: f64,
}

impl ComplexApprox {
    pub fn new(re: f64, im: f64, err: f64) -> ComplexApprox {
        ComplexApprox { re, im, err: err.abs() }
    }

    pub fn real(re: f64, err: f64) -> ComplexApprox {
        ComplexApprox::new(re, 0.0, err)
    }

    pub fn exact(re: f64, im: f64) -> ComplexApprox {
        let err = (re.abs() + im.abs()) * f64::EPSILON;
        ComplexApprox::new(re, im, err)
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    fn round(v: f64) -> f64 {
        v.abs() * 2.0 * f64::EPSILON
    }

    pub fn add(&self, o: &ComplexApprox) -> ComplexApprox {
        let (re, im) = (self.re + o.re, self.im + o.im);
        ComplexApprox::new(re, im, self.err + o.err + Self::round(re) + Self::round(im))
    }

    pub fn sub(&self, o: &ComplexApprox) -> ComplexApprox {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> ComplexApprox {
        ComplexApprox::new(-self.re, -self.im, self.err)
    }

    pub fn mul(&self, o: &ComplexApprox) -> ComplexApprox {
        let re = self.re * o.re - self.im * o.im;
        let im = self.re * o.im + self.im * o.re;
        let err = self.abs() * o.err + o.abs() * self.err + self.err * o.err;
        let rounding = 4.0 * f64::EPSILON * (self.abs() * o.abs());
        ComplexApprox::new(re, im, err + rounding)
    }

    pub fn scale(&self, k: f64) -> ComplexApprox {
        let re = self.re * k;
        let im = self.im * k;
        ComplexApprox::new(re, im, self.err * k.abs() + Self::round(re) + Self::round(im))
    }

    /// Reciprocal; the radius assumes `err` is small against `|self|`.
    pub fn recip(&self) -> ComplexApprox {
        let n2 = self.re * self.re + self.im * self.im;
        let a = n2.sqrt();
        assert!(a > self.err, "reciprocal of an interval containing zero");
        let err = self.err / (a * (a - self.err)) + 4.0 * f64::EPSILON / a;
        ComplexApprox::new(self.re / n2, -self.im / n2, err)
    }

    pub fn div(&self, o: &ComplexApprox) -> ComplexApprox {
        self.mul(&o.recip())
    }

    pub fn conj(&self) -> ComplexApprox {
        ComplexApprox::new(self.re, -self.im, self.err)
    }

    /// Whether the disc around `self` contains the point `(re, im)` (with slack 1e-12).
    pub fn close_to(&self, re: f64, im: f64) -> bool {
        (self.re - re).hypot(self.im - im) <= self.err + 1e-12
    }

    /// Whether two discs intersect (with a relative slack for rounding in the check).
    pub fn overlaps(&self, o: &ComplexApprox) -> bool {
        let d = (self.re - o.re).hypot(self.im - o.im);
        d <= self.err + o.err + 1e-12 * (1.0 + self.abs().max(o.abs()))
    }
}
