//! Q(ξ_m)[q^{-1/2}]: pairs `even + odd·q^{-1/2}` with `(q^{-1/2})² = 1/q`.

use super::{ComplexApprox, CycNum, Int};
use std::fmt;

/// `even + odd · q^{-1/2}` over Q(ξ_m).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfPowNum {
    base: u64,
    even: CycNum,
    odd: CycNum,
}

impl HalfPowNum {
    pub fn new(base: u64, even: CycNum, odd: CycNum) -> HalfPowNum {
        assert!(base >= 2, "base must exceed 1");
        assert_eq!(even.order(), odd.order(), "component orders differ");
        HalfPowNum { base, even, odd }
    }

    pub fn from_cyc(base: u64, x: CycNum) -> HalfPowNum {
        let o = x.order();
        HalfPowNum::new(base, x, CycNum::zero(o))
    }

    pub fn zero(base: u64, order: u32) -> HalfPowNum {
        HalfPowNum::from_cyc(base, CycNum::zero(order))
    }

    pub fn one(base: u64, order: u32) -> HalfPowNum {
        HalfPowNum::from_cyc(base, CycNum::one(order))
    }

    /// q^{k/2} for any integer k.
    pub fn q_pow_half(base: u64, k: i64, order: u32) -> HalfPowNum {
        let q = Int::from(base);
        let rational_pow = |e: i64| -> CycNum {
            if e >= 0 {
                CycNum::from_int(order, q.pow(e as u32))
            } else {
                CycNum::from_ratio(order, Int::ONE, q.pow((-e) as u32))
            }
        };
        if k.rem_euclid(2) == 0 {
            HalfPowNum::new(base, rational_pow(k / 2), CycNum::zero(order))
        } else {
            // q^{k/2} = q^{(k+1)/2} · q^{-1/2}
            HalfPowNum::new(base, CycNum::zero(order), rational_pow((k + 1) / 2))
        }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn order(&self) -> u32 {
        self.even.order()
    }

    pub fn even_part(&self) -> &CycNum {
        &self.even
    }

    pub fn odd_part(&self) -> &CycNum {
        &self.odd
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_zero() && self.odd.is_zero()
    }

    /// The value as an element of Q(ξ_m) when the q^{-1/2} component vanishes.
    pub fn as_cyc(&self) -> Option<&CycNum> {
        self.odd.is_zero().then_some(&self.even)
    }

    fn check(&self, o: &HalfPowNum) {
        assert_eq!(self.base, o.base, "HalfPowNum bases differ");
    }

    pub fn add(&self, o: &HalfPowNum) -> HalfPowNum {
        self.check(o);
        HalfPowNum::new(self.base, self.even.add(&o.even), self.odd.add(&o.odd))
    }

    pub fn sub(&self, o: &HalfPowNum) -> HalfPowNum {
        self.check(o);
        HalfPowNum::new(self.base, self.even.sub(&o.even), self.odd.sub(&o.odd))
    }

    pub fn neg(&self) -> HalfPowNum {
        HalfPowNum::new(self.base, self.even.neg(), self.odd.neg())
    }

    pub fn mul(&self, o: &HalfPowNum) -> HalfPowNum {
        self.check(o);
        let q = Int::from(self.base);
        let ac = self.even.mul(&o.even);
        let bd = self.odd.mul(&o.odd).scale_ratio(&Int::ONE, &q);
        let ad = self.even.mul(&o.odd);
        let bc = self.odd.mul(&o.even);
        HalfPowNum::new(self.base, ac.add(&bd), ad.add(&bc))
    }

    pub fn mul_cyc(&self, x: &CycNum) -> HalfPowNum {
        HalfPowNum::new(self.base, self.even.mul(x), self.odd.mul(x))
    }

    pub fn scale_ratio(&self, n: &Int, d: &Int) -> HalfPowNum {
        HalfPowNum::new(self.base, self.even.scale_ratio(n, d), self.odd.scale_ratio(n, d))
    }

    pub fn conj(&self) -> HalfPowNum {
        HalfPowNum::new(self.base, self.even.conj(), self.odd.conj())
    }

    pub fn embed(&self, order: u32) -> HalfPowNum {
        HalfPowNum::new(self.base, self.even.embed(order), self.odd.embed(order))
    }

    pub fn galois(&self, a: i64) -> HalfPowNum {
        HalfPowNum::new(self.base, self.even.galois(a), self.odd.galois(a))
    }

    /// (a + b s)^{-1} = (a − b s) / (a² − b²/q).
    pub fn inverse(&self) -> HalfPowNum {
        assert!(!self.is_zero(), "inverse of zero");
        let q = Int::from(self.base);
        let n = self
            .even
            .mul(&self.even)
            .sub(&self.odd.mul(&self.odd).scale_ratio(&Int::ONE, &q));
        let ninv = n.inverse();
        HalfPowNum::new(self.base, self.even.mul(&ninv), self.odd.neg().mul(&ninv))
    }

    pub fn to_complex(&self) -> ComplexApprox {
        let s = (self.base as f64).sqrt().recip();
        let odd = self.odd.to_complex();
        let s_err = ComplexApprox::new(s, 0.0, s * f64::EPSILON);
        self.even.to_complex().add(&odd.mul(&s_err))
    }

    pub fn parse(s: &str) -> Result<HalfPowNum, crate::Error> {
        let bad = || crate::Error::Parse(format!("malformed half-power literal: {s}"));
        let (b, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let base: u64 = b.trim().parse().map_err(|_| bad())?;
        let (e, o) = rest.split_once('|').ok_or_else(bad)?;
        let even = CycNum::parse(e)?;
        let odd = CycNum::parse(o)?;
        if base < 2 || even.order() != odd.order() {
            return Err(bad());
        }
        Ok(HalfPowNum::new(base, even, odd))
    }
}

impl fmt::Display for HalfPowNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}|{}", self.base, self.even, self.odd)
    }
}

impl serde::Serialize for HalfPowNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for HalfPowNum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        HalfPowNum::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn half_powers_square_to_q() {
        let s = HalfPowNum::q_pow_half(7, -1, 3);
        let s2 = s.mul(&s);
        assert_eq!(s2, HalfPowNum::q_pow_half(7, -2, 3));
        let r = HalfPowNum::q_pow_half(7, 3, 3);
        assert_eq!(r.mul(&s).mul(&s).mul(&s), HalfPowNum::one(7, 3));
    }

    #[test]
    fn inverse_round_trip() {
        let x = HalfPowNum::new(5, CycNum::from_i64(15, 1), CycNum::root_of_unity(15, 4));
        assert_eq!(x.mul(&x.inverse()), HalfPowNum::one(5, 15));
        assert_eq!(HalfPowNum::parse(&x.to_string()).unwrap(), x);
    }

    proptest! {
        #[test]
        fn multiplication_matches_embedding(a in -9i64..9, b in -9i64..9, c in -9i64..9, d in -9i64..9, k in 0i64..3) {
            let w = CycNum::root_of_unity(3, k);
            let x = HalfPowNum::new(7, CycNum::from_i64(3, a).mul(&w), CycNum::from_i64(3, b));
            let y = HalfPowNum::new(7, CycNum::from_i64(3, c), CycNum::from_i64(3, d).mul(&w));
            let lhs = x.mul(&y).to_complex();
            let rhs = x.to_complex().mul(&y.to_complex());
            prop_assert!(lhs.overlaps(&rhs));
        }
    }
}
