//! Values carrying a formal factor q^{t/3}.

use super::{CycNum, Int};

/// `value · q^{thirds/3}`. Identities combine these so that the net exponent is
/// an integer; [`ThirdPowNum::to_cyc`] refuses a fractional residue.
#[derive(Clone, Debug)]
pub struct ThirdPowNum {
    pub base: u64,
    pub value: CycNum,
    pub thirds: i64,
}

impl ThirdPowNum {
    pub fn new(base: u64, value: CycNum, thirds: i64) -> ThirdPowNum {
        ThirdPowNum { base, value, thirds }
    }

    pub fn from_cyc(base: u64, value: CycNum) -> ThirdPowNum {
        ThirdPowNum::new(base, value, 0)
    }

    pub fn mul(&self, o: &ThirdPowNum) -> ThirdPowNum {
        assert_eq!(self.base, o.base, "ThirdPowNum bases differ");
        ThirdPowNum::new(self.base, self.value.mul(&o.value), self.thirds + o.thirds)
    }

    pub fn mul_cyc(&self, x: &CycNum) -> ThirdPowNum {
        ThirdPowNum::new(self.base, self.value.mul(x), self.thirds)
    }

    /// Multiplies by q^{t/3}.
    pub fn shift(&self, t: i64) -> ThirdPowNum {
        ThirdPowNum::new(self.base, self.value.clone(), self.thirds + t)
    }

    /// Folds the exponent into the value; `None` if it is not a multiple of 3.
    pub fn to_cyc(&self) -> Option<CycNum> {
        if self.value.is_zero() {
            return Some(self.value.clone());
        }
        if self.thirds.rem_euclid(3) != 0 {
            return None;
        }
        let e = self.thirds / 3;
        let q = Int::from(self.base);
        Some(if e >= 0 {
            self.value.scale(&q.pow(e as u32))
        } else {
            self.value.scale_ratio(&Int::ONE, &q.pow((-e) as u32))
        })
    }

    pub fn to_complex(&self) -> super::ComplexApprox {
        let f = (self.base as f64).powf(self.thirds as f64 / 3.0);
        self.value.to_complex().scale(f)
    }
}
