//! Polynomials over F_q, stored low to high with no trailing zeros.

use super::field::{Elem, FieldSpec};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

/// A polynomial in F_q[T]; the zero polynomial has an empty coefficient vector.
#[derive(Clone)]
pub struct Poly {
    field: FieldSpec,
    c: Vec<Elem>,
}

impl PartialEq for Poly {
    fn eq(&self, o: &Poly) -> bool {
        self.c == o.c && self.field == o.field
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

/// Degree first, then coefficients from the top: the enumeration order.
impl Ord for Poly {
    fn cmp(&self, o: &Poly) -> Ordering {
        self.c.len().cmp(&o.c.len()).then_with(|| self.c.iter().rev().cmp(o.c.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, o: &Poly) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Human-readable form such as `T^2 + 3T + 1`; extension-field coefficients print as `[a,b]`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef = if self.field.n() == 1 {
                format!("{a}")
            } else {
                format!("{:?}", self.field.coords(a))
            };
            match (i, a == 1) {
                (0, _) => write!(f, "{coef}")?,
                (1, true) => write!(f, "T")?,
                (1, false) => write!(f, "{coef}T")?,
                (_, true) => write!(f, "T^{i}")?,
                (_, false) => write!(f, "{coef}T^{i}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn trim(c: &mut Vec<Elem>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

/// Remainder of `a` modulo a monic `m`, in place.
pub(crate) fn rem_monic_in_place(f: &FieldSpec, a: &mut Vec<Elem>, m: &[Elem]) {
    let dm = m.len() - 1;
    debug_assert_eq!(m[dm], 1);
    while a.len() > dm {
        let top = a.len() - 1;
        let c = a[top];
        if c != 0 {
            let shift = top - dm;
            let nc = f.neg(c);
            for j in 0..dm {
                a[shift + j] = f.add(a[shift + j], f.mul(nc, m[j]));
            }
        }
        a.pop();
    }
    trim(a);
}

pub(crate) fn mul_raw(f: &FieldSpec, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Resultant Res(a, b) = lc(a)^{deg b} Π_{a(θ)=0} b(θ), by the Euclidean recursion.
pub(crate) fn resultant_raw(f: &FieldSpec, a: &[Elem], b: &[Elem]) -> Elem {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let mut acc: Elem = 1;
    loop {
        let da = a.len() - 1;
        let db = b.len() - 1;
        if da == 0 {
            return f.mul(acc, f.pow(a[0], db as u64));
        }
        if db == 0 {
            return f.mul(acc, f.pow(b[0], da as u64));
        }
        if da > db {
            // Res(a,b) = (−1)^{da·db} Res(b,a)
            if (da * db) % 2 == 1 {
                acc = f.neg(acc);
            }
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        // now da ≤ db: reduce b modulo a; Res(a,b) = lc(a)^{db − dr} Res(a, r)
        let la = a[da];
        let inv = f.inv(la);
        let mut r = b.clone();
        while r.len() > da {
            let top = r.len() - 1;
            let c = f.mul(r[top], inv);
            if c != 0 {
                let shift = top - da;
                let nc = f.neg(c);
                for j in 0..=da {
                    r[shift + j] = f.add(r[shift + j], f.mul(nc, a[j]));
                }
            }
            r.pop();
        }
        trim(&mut r);
        if r.is_empty() {
            return 0;
        }
        let dr = r.len() - 1;
        acc = f.mul(acc, f.pow(la, (db - dr) as u64));
        b = r;
    }
}

impl Poly {
    pub fn new(field: &FieldSpec, mut c: Vec<Elem>) -> Poly {
        assert!(c.iter().all(|&x| x < field.q()), "coefficient outside F_q");
        trim(&mut c);
        Poly { field: field.clone(), c }
    }

    /// Builds from small integer coefficients in F_p (low to high).
    pub fn from_ints(field: &FieldSpec, c: &[i64]) -> Poly {
        Poly::new(field, c.iter().map(|&k| field.from_int(k)).collect())
    }

    pub fn zero(field: &FieldSpec) -> Poly {
        Poly { field: field.clone(), c: Vec::new() }
    }

    pub fn one(field: &FieldSpec) -> Poly {
        Poly::constant(field, 1)
    }

    pub fn constant(field: &FieldSpec, a: Elem) -> Poly {
        Poly::new(field, vec![a])
    }

    /// The variable T.
    pub fn t(field: &FieldSpec) -> Poly {
        Poly::new(field, vec![0, 1])
    }

    /// T + a.
    pub fn linear(field: &FieldSpec, a: Elem) -> Poly {
        Poly::new(field, vec![a, 1])
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with deg 0 = −1 as a sentinel.
    pub fn deg(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn lc(&self) -> Elem {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == 1
    }

    /// |f|_q = q^{deg f}.
    pub fn norm(&self) -> u128 {
        (self.field.q() as u128).pow(self.deg().max(0) as u32)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let f = &self.field;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect();
        Poly::new(f, c)
    }

    pub fn neg(&self) -> Poly {
        Poly { field: self.field.clone(), c: self.c.iter().map(|&x| self.field.neg(x)).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        Poly { field: self.field.clone(), c: mul_raw(&self.field, &self.c, &o.c) }
    }

    pub fn scale(&self, a: Elem) -> Poly {
        let c = self.c.iter().map(|&x| self.field.mul(x, a)).collect();
        Poly::new(&self.field, c)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// T^k · self.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![0; k];
        c.extend_from_slice(&self.c);
        Poly { field: self.field.clone(), c }
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let f = &self.field;
        let dd = d.c.len() - 1;
        let inv = f.inv(d.lc());
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(f), self.clone());
        }
        let mut qc = vec![0; r.len() - dd];
        while r.len() > dd {
            let top = r.len() - 1;
            let c = f.mul(r[top], inv);
            let shift = top - dd;
            qc[shift] = c;
            if c != 0 {
                let nc = f.neg(c);
                for j in 0..=dd {
                    r[shift + j] = f.add(r[shift + j], f.mul(nc, d.c[j]));
                }
            }
            r.pop();
        }
        (Poly::new(f, qc), Poly::new(f, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        if d.is_monic() {
            let mut r = self.c.clone();
            rem_monic_in_place(&self.field, &mut r, &d.c);
            return Poly { field: self.field.clone(), c: r };
        }
        self.divrem(d).1
    }

    /// Quotient when `d` divides `self`, else `None`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (qt, r) = self.divrem(d);
        r.is_zero().then_some(qt)
    }

    pub fn divides(&self, o: &Poly) -> bool {
        !self.is_zero() && o.rem(self).is_zero()
    }

    /// Monic associate; zero stays zero.
    pub fn monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lc()))
    }

    /// Monic gcd; errors if both inputs are zero.
    pub fn gcd(&self, o: &Poly) -> Result<Poly, crate::Error> {
        if self.is_zero() && o.is_zero() {
            return Err(crate::Error::Domain("gcd(0, 0) is undefined".into()));
        }
        let mut a = self.monic();
        let mut b = o.monic();
        while !b.is_zero() {
            let r = a.rem(&b).monic();
            a = b;
            b = r;
        }
        Ok(a)
    }

    pub fn is_coprime(&self, o: &Poly) -> bool {
        self.gcd(o).map(|g| g.is_one()).unwrap_or(false)
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let c = self.c.iter().enumerate().skip(1).map(|(i, &a)| f.mul(f.from_int(i as i64), a)).collect();
        Poly::new(f, c)
    }

    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.field;
        self.c.iter().rev().fold(0, |acc, &a| f.add(f.mul(acc, x), a))
    }

    /// self^e mod m for monic m.
    pub fn powmod(&self, e: u128, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut acc = Poly::one(&self.field).rem(m);
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            k >>= 1;
        }
        acc
    }

    /// Res(self, o) = lc(self)^{deg o} Π_{self(θ)=0} o(θ).
    pub fn resultant(&self, o: &Poly) -> Elem {
        resultant_raw(&self.field, &self.c, &o.c)
    }

    /// Index of a monic polynomial within `enumerate_monic(deg)`.
    pub fn monic_index(&self) -> u64 {
        debug_assert!(self.is_monic());
        let q = self.field.q() as u64;
        self.c[..self.c.len() - 1].iter().rev().fold(0u64, |acc, &a| acc * q + a as u64)
    }

    /// Inverse of [`Poly::monic_index`].
    pub fn from_monic_index(field: &FieldSpec, d: usize, mut idx: u64) -> Poly {
        let q = field.q() as u64;
        let mut c = Vec::with_capacity(d + 1);
        for _ in 0..d {
            c.push((idx % q) as Elem);
            idx /= q;
        }
        c.push(1);
        Poly { field: field.clone(), c }
    }

    /// Applies a coefficient map into another field (e.g. an embedding).
    pub fn map_coeffs(&self, target: &FieldSpec, g: impl Fn(Elem) -> Elem) -> Poly {
        Poly::new(target, self.c.iter().map(|&a| g(a)).collect())
    }

    /// Text form `q=25;[c0,c1,...]`, each coefficient a vector over F_p when n > 1.
    pub fn to_literal(&self) -> String {
        let parts: Vec<String> = self
            .c
            .iter()
            .map(|&a| {
                if self.field.n() == 1 {
                    a.to_string()
                } else {
                    let v: Vec<String> = self.field.coords(a).iter().map(|x| x.to_string()).collect();
                    format!("[{}]", v.join(","))
                }
            })
            .collect();
        format!("q={};[{}]", self.field.q(), parts.join(","))
    }

    /// Parses `q=..;[...]` against a given field.
    pub fn parse_literal(field: &FieldSpec, s: &str) -> Result<Poly, crate::Error> {
        let bad = |m: &str| crate::Error::Parse(format!("malformed polynomial literal {s:?}: {m}"));
        let s = s.trim();
        let (head, body) = s.split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let q: u32 = head
            .trim()
            .strip_prefix("q=")
            .ok_or_else(|| bad("missing q="))?
            .trim()
            .parse()
            .map_err(|_| bad("q is not an integer"))?;
        if q != field.q() {
            return Err(bad("field size mismatch"));
        }
        let body = body.trim();
        let inner = body
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| bad("coefficients must be bracketed"))?;
        let mut coeffs = Vec::new();
        if field.n() == 1 {
            for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let v: i64 = part.parse().map_err(|_| bad("non-integer coefficient"))?;
                if v < 0 || v >= field.p() as i64 {
                    return Err(bad("coefficient out of range"));
                }
                coeffs.push(v as Elem);
            }
        } else {
            let mut rest = inner.trim();
            while !rest.is_empty() {
                let open = rest.strip_prefix('[').ok_or_else(|| bad("expected '['"))?;
                let (vec, tail) = open.split_once(']').ok_or_else(|| bad("unclosed '['"))?;
                let digits: Result<Vec<u32>, _> =
                    vec.split(',').map(str::trim).filter(|p| !p.is_empty()).map(|p| p.parse::<u32>()).collect();
                let digits = digits.map_err(|_| bad("non-integer digit"))?;
                coeffs.push(field.from_coords(&digits)?);
                rest = tail.trim_start().strip_prefix(',').unwrap_or(tail).trim_start();
            }
        }
        Ok(Poly::new(field, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f7() -> FieldSpec {
        FieldSpec::new(7, 1).unwrap()
    }

    #[test]
    fn gcd_examples() {
        let f = f7();
        let t = Poly::t(&f);
        assert_eq!(t.pow(2).gcd(&t.pow(3)).unwrap(), t.pow(2));
        assert_eq!(t.pow(2).gcd(&t.mul(&Poly::linear(&f, 1))).unwrap(), t);
        assert!(Poly::linear(&f, 1).gcd(&Poly::linear(&f, 2)).unwrap().is_one());
        let g = Poly::from_ints(&f, &[1, 2, 3]);
        assert_eq!(g.gcd(&g).unwrap(), g.monic());
        assert!(Poly::zero(&f).gcd(&Poly::zero(&f)).is_err());
    }

    #[test]
    fn resultant_is_norm() {
        // Res(T^2 + 1, T + a) = a^2 + 1 over F_7
        let f = f7();
        let m = Poly::from_ints(&f, &[1, 0, 1]);
        for a in 0..7 {
            let r = m.resultant(&Poly::linear(&f, a));
            assert_eq!(r, f.add(f.mul(a, a), 1));
        }
    }

    #[test]
    fn literal_round_trip() {
        let f = FieldSpec::new(5, 2).unwrap();
        let p = Poly::new(&f, vec![3, 0, 17, 1]);
        let s = p.to_literal();
        assert_eq!(Poly::parse_literal(&f, &s).unwrap(), p);
        let g = f7();
        assert_eq!(Poly::parse_literal(&g, "q=7;[1,2,1]").unwrap(), Poly::from_ints(&g, &[1, 2, 1]));
        assert!(Poly::parse_literal(&g, "q=5;[1]").is_err());
        assert!(Poly::parse_literal(&g, "q=7;[9]").is_err());
    }

    proptest! {
        #[test]
        fn divrem_reconstructs(a in prop::collection::vec(0u32..7, 0..9), b in prop::collection::vec(0u32..7, 1..6)) {
            let f = f7();
            let a = Poly::new(&f, a);
            let b = Poly::new(&f, b);
            prop_assume!(!b.is_zero());
            let (qt, r) = a.divrem(&b);
            prop_assert_eq!(qt.mul(&b).add(&r), a);
            prop_assert!(r.deg() < b.deg());
        }

        #[test]
        fn resultant_multiplicative(a in prop::collection::vec(0u32..7, 1..5), b in prop::collection::vec(0u32..7, 1..5), c in prop::collection::vec(0u32..7, 1..5)) {
            let f = f7();
            let (a, b, c) = (Poly::new(&f, a).monic(), Poly::new(&f, b), Poly::new(&f, c));
            prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
            prop_assert_eq!(a.resultant(&b.mul(&c)), f.mul(a.resultant(&b), a.resultant(&c)));
        }
    }
}
