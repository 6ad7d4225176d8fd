//! Exact arithmetic in cyclotomic fields Q(ξ_m), the extension by q^{-1/2},
//! a q^{1/3}-graded wrapper and a float embedding with error radii.

mod approx;
mod halfpow;
mod int;
mod thirds;

pub use approx::ComplexApprox;
pub use halfpow::HalfPowNum;
pub use int::Int;
pub use thirds::ThirdPowNum;

use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// Precomputed data for one cyclotomic order.
struct CycData {
    phi: usize,
    /// `pow[k]` holds the coordinates of ξ^k for 0 ≤ k < m.
    pow: Vec<Vec<i64>>,
}

fn cyc_data(m: u32) -> &'static CycData {
    static CACHE: OnceLock<Mutex<HashMap<u32, &'static CycData>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("cyclotomic cache poisoned");
    if let Some(d) = guard.get(&m) {
        return d;
    }
    let data: &'static CycData = Box::leak(Box::new(build_cyc_data(m)));
    guard.insert(m, data);
    data
}

/// Coefficients (low to high) of the m-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(m: u32) -> Vec<i64> {
    assert!(m >= 1, "cyclotomic order must be positive");
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            let div = cyclotomic_polynomial(d);
            num = poly_div_exact(&num, &div);
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut quot = vec![0i64; nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[k + j] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

fn build_cyc_data(m: u32) -> CycData {
    let phi_poly = cyclotomic_polynomial(m);
    let phi = phi_poly.len() - 1;
    let mut pow = Vec::with_capacity(m as usize);
    let mut cur = vec![0i64; phi];
    if phi > 0 {
        cur[0] = 1;
    }
    for _ in 0..m {
        pow.push(cur.clone());
        // multiply by x and reduce by the monic Φ_m
        let top = cur[phi - 1];
        for j in (1..phi).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for j in 0..phi {
                cur[j] -= top * phi_poly[j];
            }
        }
    }
    CycData { phi, pow }
}

/// Euler's totient of a machine integer.
pub fn totient(m: u32) -> usize {
    cyc_data(m).phi
}

/// Exact element of Q(ξ_m) in the power basis 1, ξ, …, ξ^{φ(m)−1}.
///
/// Stored as an integer numerator vector over a positive common denominator;
/// the representation is canonical (gcd of all entries with `den` is 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycNum {
    order: u32,
    num: Vec<Int>,
    den: Int,
}

impl CycNum {
    pub fn zero(order: u32) -> CycNum {
        let phi = totient(order);
        CycNum { order, num: vec![Int::ZERO; phi], den: Int::ONE }
    }

    pub fn one(order: u32) -> CycNum {
        CycNum::from_int(order, Int::ONE)
    }

    pub fn from_int(order: u32, v: Int) -> CycNum {
        let mut z = CycNum::zero(order);
        z.num[0] = v;
        z
    }

    pub fn from_i64(order: u32, v: i64) -> CycNum {
        CycNum::from_int(order, Int::from(v))
    }

    /// The rational n/d.
    pub fn from_ratio(order: u32, n: Int, d: Int) -> CycNum {
        assert!(!d.is_zero(), "zero denominator");
        let mut z = CycNum::zero(order);
        z.num[0] = n;
        z.den = d;
        z.normalize();
        z
    }

    /// ξ_m^k.
    pub fn root_of_unity(order: u32, k: i64) -> CycNum {
        let data = cyc_data(order);
        let e = k.rem_euclid(order as i64) as usize;
        CycNum {
            order,
            num: data.pow[e].iter().map(|&c| Int::from(c)).collect(),
            den: Int::ONE,
        }
    }

    /// Σ_k counts[k] ξ_m^k for a vector indexed by exponent mod m.
    pub fn from_exponent_counts(order: u32, counts: &[Int]) -> CycNum {
        assert_eq!(counts.len(), order as usize);
        let data = cyc_data(order);
        let mut num = vec![Int::ZERO; data.phi];
        for (k, c) in counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, &pc) in data.pow[k].iter().enumerate() {
                if pc != 0 {
                    num[j] = &num[j] + &(c * &Int::from(pc));
                }
            }
        }
        CycNum { order, num, den: Int::ONE }
    }

    /// Builds from rational coordinates in the power basis.
    pub fn from_coords(order: u32, coords: &[BigRational]) -> CycNum {
        assert_eq!(coords.len(), totient(order), "coordinate count must be φ(m)");
        let mut den = BigInt::from(1);
        for c in coords {
            den = num_integer::Integer::lcm(&den, c.denom());
        }
        let num = coords
            .iter()
            .map(|c| Int::from(c.numer() * (&den / c.denom())))
            .collect();
        let mut z = CycNum { order, num, den: Int::from(den) };
        z.normalize();
        z
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Rational coordinates in the power basis.
    pub fn coeffs(&self) -> Vec<BigRational> {
        let d = self.den.to_bigint();
        self.num.iter().map(|n| BigRational::new(n.to_bigint(), d.clone())).collect()
    }

    pub fn numerators(&self) -> &[Int] {
        &self.num
    }

    pub fn denominator(&self) -> &Int {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Int::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Int::is_zero)
    }

    /// The rational value if this element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Int::is_zero) {
            Some(BigRational::new(self.num[0].to_bigint(), self.den.to_bigint()))
        } else {
            None
        }
    }

    fn normalize(&mut self) {
        if self.is_zero() {
            self.den = Int::ONE;
            return;
        }
        if self.den.signum() < 0 {
            self.den = -&self.den;
            for n in &mut self.num {
                *n = -&*n;
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for n in &self.num {
            if g.is_one() {
                break;
            }
            if !n.is_zero() {
                g = g.gcd(n);
            }
        }
        if !g.is_one() {
            self.den = self.den.div_exact(&g);
            for n in &mut self.num {
                *n = n.div_exact(&g);
            }
        }
    }

    fn check_order(&self, other: &CycNum) {
        assert_eq!(self.order, other.order, "cyclotomic orders differ; embed first");
    }

    pub fn add(&self, other: &CycNum) -> CycNum {
        self.check_order(other);
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| a + b).collect();
            let mut z = CycNum { order: self.order, num, den: self.den.clone() };
            z.normalize();
            return z;
        }
        let den = &self.den * &other.den;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| &(a * &other.den) + &(b * &self.den))
            .collect();
        let mut z = CycNum { order: self.order, num, den };
        z.normalize();
        z
    }

    pub fn neg(&self) -> CycNum {
        CycNum {
            order: self.order,
            num: self.num.iter().map(|n| -n).collect(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &CycNum) -> CycNum {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CycNum) -> CycNum {
        self.check_order(other);
        if self.is_zero() || other.is_zero() {
            return CycNum::zero(self.order);
        }
        let m = self.order as usize;
        let mut acc = vec![Int::ZERO; m];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % m;
                acc[k] = &acc[k] + &(a * b);
            }
        }
        let mut z = CycNum::from_exponent_counts(self.order, &acc);
        z.den = &self.den * &other.den;
        z.normalize();
        z
    }

    pub fn scale(&self, k: &Int) -> CycNum {
        let mut z = CycNum {
            order: self.order,
            num: self.num.iter().map(|n| n * k).collect(),
            den: self.den.clone(),
        };
        z.normalize();
        z
    }

    /// Multiplication by n/d.
    pub fn scale_ratio(&self, n: &Int, d: &Int) -> CycNum {
        assert!(!d.is_zero(), "zero denominator");
        let mut z = CycNum {
            order: self.order,
            num: self.num.iter().map(|x| x * n).collect(),
            den: &self.den * d,
        };
        z.normalize();
        z
    }

    /// Multiplication by ξ_m^k.
    pub fn mul_root(&self, k: i64) -> CycNum {
        let m = self.order as i64;
        let shift = k.rem_euclid(m) as usize;
        if shift == 0 {
            return self.clone();
        }
        let mut acc = vec![Int::ZERO; m as usize];
        for (i, a) in self.num.iter().enumerate() {
            if !a.is_zero() {
                let e = (i + shift) % m as usize;
                acc[e] = &acc[e] + a;
            }
        }
        let mut z = CycNum::from_exponent_counts(self.order, &acc);
        z.den = self.den.clone();
        z.normalize();
        z
    }

    /// The automorphism ξ_m ↦ ξ_m^a for a coprime to m.
    pub fn galois(&self, a: i64) -> CycNum {
        let m = self.order as i64;
        assert_eq!(num_integer::gcd(a.rem_euclid(m), m), 1, "galois exponent must be a unit");
        let mut acc = vec![Int::ZERO; m as usize];
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                let e = (i as i64 * a).rem_euclid(m) as usize;
                acc[e] = &acc[e] + c;
            }
        }
        let mut z = CycNum::from_exponent_counts(self.order, &acc);
        z.den = self.den.clone();
        z.normalize();
        z
    }

    /// Complex conjugation ξ ↦ ξ^{-1}.
    pub fn conj(&self) -> CycNum {
        self.galois(-1)
    }

    /// Image in Q(ξ_M) for a multiple M of the current order.
    pub fn embed(&self, target: u32) -> CycNum {
        if target == self.order {
            return self.clone();
        }
        assert_eq!(target % self.order, 0, "target order must be a multiple");
        let step = (target / self.order) as usize;
        let mut acc = vec![Int::ZERO; target as usize];
        for (i, c) in self.num.iter().enumerate() {
            acc[i * step] = c.clone();
        }
        let mut z = CycNum::from_exponent_counts(target, &acc);
        z.den = self.den.clone();
        z.normalize();
        z
    }

    /// Multiplicative inverse via the product of the other Galois conjugates.
    pub fn inverse(&self) -> CycNum {
        assert!(!self.is_zero(), "inverse of zero");
        let m = self.order as i64;
        let mut other = CycNum::one(self.order);
        for a in 2..m.max(2) {
            if num_integer::gcd(a, m) == 1 {
                other = other.mul(&self.galois(a));
            }
        }
        let norm = self.mul(&other);
        let r = norm.as_rational().expect("norm is rational");
        let (n, d) = (Int::from(r.numer().clone()), Int::from(r.denom().clone()));
        other.scale_ratio(&d, &n)
    }

    pub fn pow(&self, e: u32) -> CycNum {
        let mut acc = CycNum::one(self.order);
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Integer power allowing negative exponents.
    pub fn powi(&self, e: i64) -> CycNum {
        if e >= 0 {
            self.pow(e as u32)
        } else {
            self.inverse().pow((-e) as u32)
        }
    }

    /// Evaluation at ξ_m = exp(2πi/m) with a rounding radius.
    pub fn to_complex(&self) -> ComplexApprox {
        let m = self.order as f64;
        let den = self.den.to_f64();
        let (mut re, mut im, mut mag) = (0.0f64, 0.0f64, 0.0f64);
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64() / den;
            let ang = 2.0 * std::f64::consts::PI * k as f64 / m;
            re += v * ang.cos();
            im += v * ang.sin();
            mag += v.abs();
        }
        let err = mag * 8.0 * f64::EPSILON * (self.num.len() as f64 + 2.0);
        ComplexApprox::new(re, im, err)
    }

    /// Canonical text form `m:[c0,c1,...]`.
    pub fn serialize(&self) -> String {
        self.to_string()
    }

    pub fn parse(s: &str) -> Result<CycNum, crate::Error> {
        let bad = || crate::Error::Parse(format!("malformed cyclotomic literal: {s}"));
        let (m, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let order: u32 = m.trim().parse().map_err(|_| bad())?;
        let body = rest.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        let mut coords = Vec::new();
        if !body.trim().is_empty() {
            for part in body.split(',') {
                let part = part.trim();
                let r = match part.split_once('/') {
                    Some((a, b)) => {
                        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
                        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
                        if b == BigInt::from(0) {
                            return Err(bad());
                        }
                        BigRational::new(a, b)
                    }
                    None => BigRational::from_integer(part.parse().map_err(|_| bad())?),
                };
                coords.push(r);
            }
        }
        if order == 0 || coords.len() != totient(order) {
            return Err(bad());
        }
        Ok(CycNum::from_coords(order, &coords))
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:[", self.order)?;
        for (i, c) in self.coeffs().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if c.denom() == &BigInt::from(1) {
                write!(f, "{}", c.numer())?;
            } else {
                write!(f, "{}/{}", c.numer(), c.denom())?;
            }
        }
        write!(f, "]")
    }
}

impl serde::Serialize for CycNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for CycNum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CycNum::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// The working order lcm(3, p) for characteristic p.
pub fn working_order(p: u32) -> u32 {
    if p == 3 {
        3
    } else {
        3 * p
    }
}
