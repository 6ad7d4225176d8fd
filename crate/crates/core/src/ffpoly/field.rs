//! Finite fields F_q, q = p^n with p odd, realized by lookup tables.

use std::fmt;
use std::sync::Arc;

/// Table-size ceiling; desk-scale fields only.
pub const MAX_TABLE_Q: u32 = 2048;

/// Element of F_q encoded as Σ c_i p^i over its F_p-coordinates.
pub type Elem = u32;

pub(crate) struct FieldData {
    pub p: u32,
    pub n: u32,
    pub q: u32,
    /// Monic modulus over F_p, low to high, length n+1.
    pub modulus: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    trace: Vec<u32>,
    primitive_root: u32,
    log: Vec<u32>,
    exp: Vec<u32>,
}

/// Immutable handle to a finite field; cheap to clone and share.
#[derive(Clone)]
pub struct FieldSpec(pub(crate) Arc<FieldData>);

impl PartialEq for FieldSpec {
    fn eq(&self, o: &FieldSpec) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || (self.0.p == o.0.p && self.0.modulus == o.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn digits(mut e: u32, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = e % p;
            e /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Product of two F_p-coordinate vectors reduced by the monic modulus.
fn mul_mod_p(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let n = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * n];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for k in (n..2 * n).rev() {
        let c = prod[k];
        if c != 0 {
            for (j, &m) in modulus.iter().enumerate() {
                let idx = k - n + j;
                prod[idx] = (prod[idx] + (p as u64 - c) * m as u64) % p as u64;
            }
        }
    }
    prod[..n].iter().map(|&x| x as u32).collect()
}

/// Whether a monic polynomial over F_p (low to high) has no factor of degree ≤ deg/2.
fn is_irreducible_over_fp(poly: &[u32], p: u32) -> bool {
    let d = poly.len() - 1;
    if d <= 1 {
        return true;
    }
    for k in 1..=d / 2 {
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let mut g = digits(idx as u32, p, k as u32);
            g.push(1);
            if poly_rem_fp(poly, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_fp(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (j, &mj) in m.iter().enumerate() {
                r[shift + j] = (r[shift + j] + (p as u64 - c) * mj as u64) % p as u64;
            }
        }
        r.pop();
    }
    r.into_iter().map(|x| x as u32).collect()
}

impl FieldSpec {
    /// F_{p^n} with the least monic irreducible modulus in enumeration order.
    pub fn new(p: u32, n: u32) -> Result<FieldSpec, crate::Error> {
        if !is_prime(p) || p == 2 {
            return Err(crate::Error::InvalidField(format!("p = {p} must be an odd prime")));
        }
        if n == 0 {
            return Err(crate::Error::InvalidField("extension degree must be positive".into()));
        }
        let q = (p as u64).checked_pow(n).filter(|&q| q <= MAX_TABLE_Q as u64).ok_or_else(|| {
            crate::Error::InvalidField(format!("{p}^{n} exceeds the table limit {MAX_TABLE_Q}"))
        })? as u32;
        if q % 3 == 0 {
            return Err(crate::Error::InvalidField(format!("q = {q} is divisible by 3")));
        }
        let modulus = if n == 1 {
            vec![0, 1]
        } else {
            (0..p.pow(n))
                .map(|idx| {
                    let mut m = digits(idx, p, n);
                    m.push(1);
                    m
                })
                .find(|m| is_irreducible_over_fp(m, p))
                .expect("an irreducible polynomial exists in every degree")
        };
        Ok(FieldSpec(Arc::new(FieldData::build(p, n, q, modulus))))
    }

    /// F_q for a prime power q.
    pub fn from_q(q: u32) -> Result<FieldSpec, crate::Error> {
        if q < 3 {
            return Err(crate::Error::InvalidField(format!("q = {q} is not an odd prime power")));
        }
        let p = (2..=q).find(|d| q % d == 0).unwrap();
        let mut n = 0;
        let mut r = q;
        while r % p == 0 {
            r /= p;
            n += 1;
        }
        if r != 1 {
            return Err(crate::Error::InvalidField(format!("q = {q} is not a prime power")));
        }
        FieldSpec::new(p, n)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn n(&self) -> u32 {
        self.0.n
    }
    pub fn q(&self) -> u32 {
        self.0.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }
    /// q mod 3.
    pub fn residue_class(&self) -> u32 {
        self.0.q % 3
    }
    pub fn is_kummer(&self) -> bool {
        self.0.q % 3 == 1
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.0.add[(a * self.0.q + b) as usize] as Elem
    }
    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.0.mul[(a * self.0.q + b) as usize] as Elem
    }
    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.0.neg[a as usize] as Elem
    }
    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero in F_q");
        self.0.inv[a as usize] as Elem
    }
    /// tr_{F_q/F_p}(a) ∈ {0, …, p−1}.
    #[inline]
    pub fn trace(&self, a: Elem) -> u32 {
        self.0.trace[a as usize]
    }
    /// Discrete log to the least primitive root; panics on zero.
    #[inline]
    pub fn log(&self, a: Elem) -> u32 {
        assert!(a != 0, "log of zero");
        self.0.log[a as usize]
    }
    /// γ^k for the least primitive root γ.
    #[inline]
    pub fn exp(&self, k: u64) -> Elem {
        self.0.exp[(k % (self.0.q as u64 - 1)) as usize]
    }
    pub fn primitive_root(&self) -> Elem {
        self.0.primitive_root
    }
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let l = self.log(a) as u64;
        let m = self.0.q as u64 - 1;
        self.exp(((l as u128 * e as u128) % m as u128) as u64)
    }
    /// The image of an integer under Z → F_p ⊂ F_q.
    pub fn from_int(&self, k: i64) -> Elem {
        k.rem_euclid(self.0.p as i64) as Elem
    }
    /// F_p-coordinates of an element.
    pub fn coords(&self, a: Elem) -> Vec<u32> {
        digits(a, self.0.p, self.0.n)
    }
    pub fn from_coords(&self, c: &[u32]) -> Result<Elem, crate::Error> {
        if c.len() > self.0.n as usize || c.iter().any(|&x| x >= self.0.p) {
            return Err(crate::Error::Parse(format!("invalid F_{} coordinates {c:?}", self.0.q)));
        }
        Ok(undigits(c, self.0.p))
    }
    /// Frobenius a ↦ a^p.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.0.p as u64)
    }
}

impl FieldData {
    fn build(p: u32, n: u32, q: u32, modulus: Vec<u32>) -> FieldData {
        let qs = q as usize;
        let coords: Vec<Vec<u32>> = (0..q).map(|e| digits(e, p, n)).collect();
        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        for a in 0..qs {
            for b in 0..qs {
                let s: Vec<u32> = coords[a].iter().zip(&coords[b]).map(|(x, y)| (x + y) % p).collect();
                add[a * qs + b] = undigits(&s, p) as u16;
                mul[a * qs + b] = undigits(&mul_mod_p(&coords[a], &coords[b], &modulus, p), p) as u16;
            }
        }
        let neg: Vec<u16> = (0..qs)
            .map(|a| undigits(&coords[a].iter().map(|x| (p - x) % p).collect::<Vec<_>>(), p) as u16)
            .collect();
        let mut inv = vec![0u16; qs];
        for a in 1..qs {
            for b in 1..qs {
                if mul[a * qs + b] == 1 {
                    inv[a] = b as u16;
                    break;
                }
            }
        }
        // least primitive root in encoding order
        let order_of = |g: usize| -> usize {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = mul[x * qs + g] as usize;
                k += 1;
            }
            k
        };
        let primitive_root = (2..qs).chain(1..2).find(|&g| order_of(g) == qs - 1).unwrap() as u32;
        let mut exp = vec![0u32; qs - 1];
        let mut log = vec![0u32; qs];
        let mut x = 1usize;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = x as u32;
            log[x] = k as u32;
            x = mul[x * qs + primitive_root as usize] as usize;
        }
        // trace = a + a^p + … + a^{p^{n−1}}, an element of F_p
        let trace = (0..qs)
            .map(|a| {
                let mut acc = 0usize;
                let mut cur = a;
                for _ in 0..n {
                    acc = add[acc * qs + cur] as usize;
                    let mut pw = 1usize;
                    for _ in 0..p {
                        pw = mul[pw * qs + cur] as usize;
                    }
                    cur = pw;
                }
                debug_assert!(acc < p as usize);
                acc as u32
            })
            .collect();
        FieldData { p, n, q, modulus, add, mul, neg, inv, trace, primitive_root, log, exp }
    }
}

/// The quadratic extension F_{q²} with an embedding of F_q.
#[derive(Clone)]
pub struct QuadraticExtension {
    pub base: FieldSpec,
    pub ext: FieldSpec,
    /// `embed[a]` is the image of a ∈ F_q in F_{q²}.
    embed: Arc<Vec<Elem>>,
    /// Inverse of the embedding on its image (u32::MAX off the image).
    restrict: Arc<Vec<u32>>,
}

impl fmt::Debug for QuadraticExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{:?}", self.ext, self.base)
    }
}

impl QuadraticExtension {
    /// F_{p^{2n}} with its least modulus; F_q enters through the least root of its modulus.
    pub fn new(base: &FieldSpec) -> Result<QuadraticExtension, crate::Error> {
        let ext = FieldSpec::new(base.p(), 2 * base.n())?;
        let p = base.p();
        let n = base.n() as usize;
        // a root of the base modulus inside the extension
        let root = if n == 1 {
            0
        } else {
            (0..ext.q())
                .find(|&r| {
                    let mut acc = 0;
                    for &c in base.modulus().iter().rev() {
                        acc = ext.add(ext.mul(acc, r), c);
                    }
                    acc == 0
                })
                .expect("the extension contains a root of the base modulus")
        };
        let embed: Vec<Elem> = (0..base.q())
            .map(|a| {
                let c = digits(a, p, base.n());
                if n == 1 {
                    return c[0];
                }
                let mut acc = 0;
                for &ci in c.iter().rev() {
                    acc = ext.add(ext.mul(acc, root), ci);
                }
                acc
            })
            .collect();
        let mut restrict = vec![u32::MAX; ext.q() as usize];
        for (a, &e) in embed.iter().enumerate() {
            restrict[e as usize] = a as u32;
        }
        Ok(QuadraticExtension { base: base.clone(), ext, embed: Arc::new(embed), restrict: Arc::new(restrict) })
    }

    #[inline]
    pub fn embed(&self, a: Elem) -> Elem {
        self.embed[a as usize]
    }

    /// Preimage in F_q, if the element lies in the image.
    #[inline]
    pub fn restrict(&self, a: Elem) -> Option<Elem> {
        let r = self.restrict[a as usize];
        (r != u32::MAX).then_some(r)
    }

    /// The Galois conjugate a ↦ a^q of F_{q²}/F_q.
    pub fn conjugate(&self, a: Elem) -> Elem {
        self.ext.pow(a, self.base.q() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_tables() {
        let f = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f.q(), 7);
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), 5);
        assert_eq!(f.primitive_root(), 3);
        assert_eq!(f.trace(4), 4);
        assert_eq!(f.residue_class(), 1);
    }

    #[test]
    fn f25_modulus_and_trace() {
        let f = FieldSpec::new(5, 2).unwrap();
        assert_eq!(f.modulus(), &[2, 0, 1]);
        assert!((0..25).all(|a| f.trace(a) < 5));
        // trace is F_p-linear and surjective
        let counts = (0..25).filter(|&a| f.trace(a) == 0).count();
        assert_eq!(counts, 5);
        assert!(FieldSpec::new(3, 1).is_err());
        assert!(FieldSpec::new(9, 1).is_err());
    }

    #[test]
    fn quadratic_extension_embedding() {
        let base = FieldSpec::new(5, 1).unwrap();
        let ext = QuadraticExtension::new(&base).unwrap();
        assert_eq!(ext.ext.q(), 25);
        for a in 0..5 {
            for b in 0..5 {
                let s = ext.ext.mul(ext.embed(a), ext.embed(b));
                assert_eq!(ext.restrict(s), Some(base.mul(a, b)));
            }
            assert_eq!(ext.conjugate(ext.embed(a)), ext.embed(a));
        }
        let moved = (0..25).filter(|&x| ext.conjugate(x) != x).count();
        assert_eq!(moved, 20);
    }
}
