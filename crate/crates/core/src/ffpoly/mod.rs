//! Finite fields, F_q[T], enumeration of monic polynomials and the
//! multiplicative functions built on factorization.

mod field;
mod poly;
mod sieve;

pub use field::{Elem, FieldSpec, QuadraticExtension, MAX_TABLE_Q};
pub use poly::Poly;
#[allow(unused_imports)]
pub(crate) use poly::{mul_raw, rem_monic_in_place, resultant_raw};
pub use sieve::FactorSieve;

use num_bigint::BigInt;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Iterator over the q^d monic polynomials of degree d, by increasing monic index.
#[derive(Clone)]
pub struct MonicIter {
    field: FieldSpec,
    d: usize,
    next: u64,
    end: u64,
}

impl Iterator for MonicIter {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.next >= self.end {
            return None;
        }
        let p = Poly::from_monic_index(&self.field, self.d, self.next);
        self.next += 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for MonicIter {}

/// All monic polynomials of degree exactly `d`.
pub fn enumerate_monic(field: &FieldSpec, d: usize) -> MonicIter {
    let end = (field.q() as u64).checked_pow(d as u32).expect("enumeration size overflows u64");
    MonicIter { field: field.clone(), d, next: 0, end }
}

/// Monic polynomials of degree `d` whose monic index lies in `range`.
pub fn enumerate_monic_range(field: &FieldSpec, d: usize, range: std::ops::Range<u64>) -> MonicIter {
    let total = (field.q() as u64).pow(d as u32);
    MonicIter { field: field.clone(), d, next: range.start.min(total), end: range.end.min(total) }
}

/// Number of monic polynomials of degree < d; the global index of a monic f is
/// `monic_offset(deg f) + f.monic_index()`.
pub fn monic_offset(q: u32, d: usize) -> u64 {
    (0..d).map(|k| (q as u64).pow(k as u32)).sum()
}

/// Rabin's test: f | T^{q^d} − T and gcd(T^{q^{d/r}} − T, f) = 1 for primes r | d.
pub fn is_irreducible(f: &Poly) -> bool {
    let d = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(d) => d,
    };
    let m = f.monic();
    let field = f.field();
    let t = Poly::t(field);
    let q = field.q() as u128;
    let frob = |k: usize| -> Poly {
        let mut x = t.clone();
        for _ in 0..k {
            x = x.powmod(q, &m);
        }
        x
    };
    if !frob(d).sub(&t).rem(&m).is_zero() {
        return false;
    }
    prime_divisors(d as u64).into_iter().all(|r| {
        let h = frob(d / r as usize).sub(&t);
        m.is_coprime(&h)
    })
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

type IrrKey = (u32, Vec<u32>, usize);

/// Monic irreducibles of degree `d`, in enumeration order; cached per field.
pub fn irreducibles(field: &FieldSpec, d: usize) -> Arc<Vec<Poly>> {
    static CACHE: OnceLock<Mutex<HashMap<IrrKey, Arc<Vec<Poly>>>>> = OnceLock::new();
    let key = (field.p(), field.modulus().to_vec(), d);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("irreducible cache poisoned").get(&key) {
        return v.clone();
    }
    let v: Arc<Vec<Poly>> = Arc::new(enumerate_monic(field, d).filter(is_irreducible).collect());
    cache.lock().expect("irreducible cache poisoned").insert(key, v.clone());
    v
}

/// Exact number of monic irreducibles of degree d: (1/d) Σ_{e|d} μ(d/e) q^e.
pub fn count_irreducibles(field: &FieldSpec, d: usize) -> BigInt {
    count_irreducibles_q(field.q() as u64, d)
}

/// [`count_irreducibles`] for a bare field size.
pub fn count_irreducibles_q(q: u64, d: usize) -> BigInt {
    assert!(d >= 1, "degree must be positive");
    let mut acc = BigInt::from(0);
    for e in 1..=d {
        if d % e == 0 {
            let mu = mobius_int((d / e) as u64);
            acc += BigInt::from(mu) * BigInt::from(q).pow(e as u32);
        }
    }
    acc / BigInt::from(d)
}

fn mobius_int(n: u64) -> i64 {
    let ps = prime_divisors(n);
    if ps.iter().any(|&p| n % (p * p) == 0) {
        0
    } else if ps.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Factorization into monic irreducibles with multiplicities (sorted), plus the leading coefficient.
pub fn factor(f: &Poly) -> Result<(Elem, Vec<(Poly, u32)>), crate::Error> {
    if f.is_zero() {
        return Err(crate::Error::Domain("cannot factor the zero polynomial".into()));
    }
    let lc = f.lc();
    let mut rest = f.monic();
    let mut out = Vec::new();
    let field = f.field().clone();
    let mut d = 1;
    while 2 * d <= rest.deg() as usize {
        for p in irreducibles(&field, d).iter() {
            if 2 * d > rest.deg() as usize {
                break;
            }
            let mut e = 0;
            while let Some(qt) = rest.div_exact(p) {
                rest = qt;
                e += 1;
            }
            if e > 0 {
                out.push((p.clone(), e));
            }
        }
        d += 1;
    }
    if rest.deg() >= 1 {
        match out.iter_mut().find(|(p, _)| *p == rest) {
            Some(entry) => entry.1 += 1,
            None => out.push((rest, 1)),
        }
    }
    out.sort();
    Ok((lc, out))
}

/// Monic factorization of a monic polynomial (the leading coefficient dropped).
pub fn factor_monic(f: &Poly) -> Vec<(Poly, u32)> {
    factor(f).expect("nonzero input").1
}

pub fn mobius(f: &Poly) -> i32 {
    let fs = factor_monic(f);
    if fs.iter().any(|&(_, e)| e > 1) {
        0
    } else if fs.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// φ(f) = |f| Π_{P|f} (1 − 1/|P|).
pub fn euler_phi(f: &Poly) -> BigInt {
    let q = BigInt::from(f.field().q());
    factor_monic(f).iter().fold(BigInt::from(1), |acc, (p, e)| {
        let d = p.deg() as u32;
        acc * (q.pow(d * e) - q.pow(d * (e - 1)))
    })
}

pub fn omega_count(f: &Poly) -> usize {
    factor_monic(f).len()
}

pub fn is_squarefree(f: &Poly) -> bool {
    !f.is_zero() && factor_monic(f).iter().all(|&(_, e)| e == 1)
}

/// f = E³ B² C with B, C squarefree and coprime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeDecomposition {
    pub e: Poly,
    pub b: Poly,
    pub c: Poly,
}

impl CubeDecomposition {
    pub fn reconstruct(&self) -> Poly {
        self.e.pow(3).mul(&self.b.pow(2)).mul(&self.c)
    }

    pub fn is_cube(&self) -> bool {
        self.b.is_one() && self.c.is_one()
    }
}

pub fn cube_decompose(f: &Poly) -> CubeDecomposition {
    let field = f.field();
    let mut e = Poly::one(field);
    let mut b = Poly::one(field);
    let mut c = Poly::one(field);
    for (p, k) in factor_monic(f) {
        e = e.mul(&p.pow(k / 3));
        match k % 3 {
            1 => c = c.mul(&p),
            2 => b = b.mul(&p),
            _ => {}
        }
    }
    CubeDecomposition { e, b, c }
}

/// Product of the distinct monic primes dividing f.
pub fn radical(f: &Poly) -> Poly {
    factor_monic(f).iter().fold(Poly::one(f.field()), |acc, (p, _)| acc.mul(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn enumeration_counts() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        assert_eq!(enumerate_monic(&f5, 3).count(), 125);
        let f7 = FieldSpec::new(7, 1).unwrap();
        let one: Vec<Poly> = enumerate_monic(&f7, 0).collect();
        assert_eq!(one, vec![Poly::one(&f7)]);
        assert_eq!(enumerate_monic(&f5, 2).filter(is_squarefree).count(), 20);
        for d in 2..=4 {
            let sf = enumerate_monic(&f5, d).filter(is_squarefree).count() as u64;
            assert_eq!(sf, 5u64.pow(d as u32) - 5u64.pow(d as u32 - 1));
        }
        let all: Vec<Poly> = enumerate_monic(&f7, 2).collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    /// Irreducibility by exhaustive search for a root or quadratic factor.
    fn brute_irreducible(f: &Poly) -> bool {
        let d = f.deg() as usize;
        (1..=d / 2).all(|k| enumerate_monic(f.field(), k).all(|g| !g.divides(f)))
    }

    #[test]
    fn irreducible_counts() {
        let f7 = FieldSpec::new(7, 1).unwrap();
        let brute = enumerate_monic(&f7, 2).filter(brute_irreducible).count();
        assert_eq!(brute, 21);
        assert_eq!(irreducibles(&f7, 2).len(), 21);
        assert_eq!(count_irreducibles(&f7, 1), BigInt::from(7));
        assert_eq!(count_irreducibles(&f7, 2), BigInt::from(21));
        let f5 = FieldSpec::new(5, 1).unwrap();
        let brute3 = enumerate_monic(&f5, 3).filter(brute_irreducible).count();
        assert_eq!(count_irreducibles(&f5, 3), BigInt::from(brute3));
        assert_eq!(brute3, 40);
        for d in 1..=4 {
            assert_eq!(count_irreducibles(&f5, d), BigInt::from(irreducibles(&f5, d).len()));
        }
        let f25 = FieldSpec::new(5, 2).unwrap();
        assert_eq!(count_irreducibles(&f25, 2), BigInt::from(irreducibles(&f25, 2).len()));
        assert!(enumerate_monic(&f7, 1).all(|p| is_irreducible(&p)));
    }

    #[test]
    fn factor_examples() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        let g = Poly::from_ints(&f5, &[1, 0, 1]);
        let fs = factor_monic(&g);
        assert_eq!(fs, vec![(Poly::linear(&f5, 2), 1), (Poly::linear(&f5, 3), 1)]);
        assert_eq!(Poly::linear(&f5, 2).mul(&Poly::linear(&f5, 3)), g);
    }

    #[test]
    fn multiplicative_functions() {
        let f7 = FieldSpec::new(7, 1).unwrap();
        let t = Poly::t(&f7);
        assert_eq!(mobius(&t.pow(2)), 0);
        assert_eq!(mobius(&t), -1);
        let p = Poly::from_ints(&f7, &[1, 0, 1]);
        assert_eq!(euler_phi(&p), BigInt::from(48));
        assert_eq!(euler_phi(&t.pow(3)), BigInt::from(343 - 49));
        assert_eq!(omega_count(&t.mul(&Poly::linear(&f7, 1))), 2);
    }

    #[test]
    fn cube_decomposition_examples() {
        let f7 = FieldSpec::new(7, 1).unwrap();
        let t = Poly::t(&f7);
        let one = Poly::one(&f7);
        let d = cube_decompose(&t.pow(3));
        assert_eq!((d.e.clone(), d.b.clone(), d.c.clone()), (t.clone(), one.clone(), one.clone()));
        assert!(d.is_cube());
        let sf = t.mul(&Poly::linear(&f7, 1));
        assert_eq!(cube_decompose(&sf), CubeDecomposition { e: one.clone(), b: one.clone(), c: sf.clone() });
        let p = Poly::from_ints(&f7, &[1, 0, 1]);
        let qq = Poly::linear(&f7, 3);
        let f = p.pow(2).mul(&qq.pow(5));
        let d = cube_decompose(&f);
        assert_eq!(d.e, qq);
        assert_eq!(d.b, p.mul(&qq));
        assert!(d.c.is_one());
        assert_eq!(d.reconstruct(), f);
    }

    #[test]
    fn zeta_euler_product() {
        // Π_P (1 − u^{deg P})^{−1} = Σ q^n u^n up to degree 8
        for q in [5u32, 7] {
            let field = FieldSpec::new(q, 1).unwrap();
            let n = 8;
            let mut series = vec![BigInt::from(0); n + 1];
            series[0] = BigInt::from(1);
            for d in 1..=n {
                let count = if d <= 4 { BigInt::from(irreducibles(&field, d).len()) } else { count_irreducibles(&field, d) };
                let count: usize = count.try_into().unwrap();
                for _ in 0..count {
                    for k in d..=n {
                        let add = series[k - d].clone();
                        series[k] += add;
                    }
                }
            }
            for (k, c) in series.iter().enumerate() {
                assert_eq!(*c, BigInt::from(q).pow(k as u32));
            }
        }
    }

    proptest! {
        #[test]
        fn factor_inverts_multiply(idx in prop::collection::vec((1usize..4, 0u64..343), 1..4)) {
            let f7 = FieldSpec::new(7, 1).unwrap();
            let mut prod = Poly::one(&f7);
            for (d, k) in idx {
                let irr = irreducibles(&f7, d);
                prod = prod.mul(&irr[(k as usize) % irr.len()]);
            }
            let back = factor_monic(&prod).iter().fold(Poly::one(&f7), |a, (p, e)| a.mul(&p.pow(*e)));
            prop_assert_eq!(back, prod);
        }
    }
}
