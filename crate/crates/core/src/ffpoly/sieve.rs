//! Smallest-prime-factor sieve over all monic polynomials of bounded degree.

use super::{monic_offset, FieldSpec, Poly};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

const UNSET: u32 = u32::MAX;

/// For each monic f with deg f ≤ `max_deg` (by global index), its least prime
/// factor P in enumeration order and the cofactor f/P. Primes are their own
/// least factor with cofactor 1 (global index 0).
pub struct FactorSieve {
    field: FieldSpec,
    max_deg: usize,
    offsets: Vec<u64>,
    spf: Vec<u32>,
    cof: Vec<u32>,
}

type SieveKey = (u32, Vec<u32>, usize);

impl FactorSieve {
    /// Builds (or fetches from a process-wide cache) the sieve up to `max_deg`.
    pub fn shared(field: &FieldSpec, max_deg: usize) -> Arc<FactorSieve> {
        static CACHE: OnceLock<Mutex<HashMap<SieveKey, Arc<FactorSieve>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("sieve cache poisoned");
        if let Some(s) = guard
            .iter()
            .find(|((p, m, d), _)| *p == field.p() && m.as_slice() == field.modulus() && *d >= max_deg)
            .map(|(_, s)| s.clone())
        {
            return s;
        }
        let s = Arc::new(FactorSieve::build(field, max_deg));
        guard.insert((field.p(), field.modulus().to_vec(), max_deg), s.clone());
        s
    }

    pub fn build(field: &FieldSpec, max_deg: usize) -> FactorSieve {
        let q = field.q();
        let offsets: Vec<u64> = (0..=max_deg + 1).map(|d| monic_offset(q, d)).collect();
        let total = offsets[max_deg + 1];
        assert!(total < UNSET as u64, "sieve too large");
        let mut spf = vec![UNSET; total as usize];
        let mut cof = vec![UNSET; total as usize];
        spf[0] = 0;
        cof[0] = 0;
        let mut pc = vec![0u32; max_deg + 1];
        let mut prod = vec![0u32; max_deg + 1];
        for d in 1..=max_deg {
            for idx in offsets[d]..offsets[d + 1] {
                if spf[idx as usize] != UNSET {
                    continue;
                }
                spf[idx as usize] = idx as u32;
                cof[idx as usize] = 0;
                let p = Poly::from_monic_index(field, d, idx - offsets[d]);
                pc[..=d].copy_from_slice(p.coeffs());
                for k in 1..=max_deg - d {
                    let count = (q as u64).pow(k as u32);
                    let mut m = vec![0u32; k + 1];
                    m[k] = 1;
                    for midx in 0..count {
                        if midx > 0 {
                            // increment the base-q counter in the low coefficients
                            let mut i = 0;
                            loop {
                                m[i] += 1;
                                if m[i] < q {
                                    break;
                                }
                                m[i] = 0;
                                i += 1;
                            }
                        }
                        let n = d + k;
                        for x in prod[..=n].iter_mut() {
                            *x = 0;
                        }
                        for (i, &a) in pc[..=d].iter().enumerate() {
                            if a == 0 {
                                continue;
                            }
                            for (j, &b) in m.iter().enumerate() {
                                prod[i + j] = field.add(prod[i + j], field.mul(a, b));
                            }
                        }
                        let local = prod[..n].iter().rev().fold(0u64, |acc, &c| acc * q as u64 + c as u64);
                        let g = (offsets[n] + local) as usize;
                        if spf[g] == UNSET {
                            spf[g] = idx as u32;
                            cof[g] = (offsets[k] + midx) as u32;
                        }
                    }
                }
            }
        }
        FactorSieve { field: field.clone(), max_deg, offsets, spf, cof }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn max_deg(&self) -> usize {
        self.max_deg
    }

    pub fn offset(&self, d: usize) -> u64 {
        self.offsets[d]
    }

    pub fn global_index(&self, f: &Poly) -> u32 {
        (self.offsets[f.deg() as usize] + f.monic_index()) as u32
    }

    pub fn degree_of(&self, g: u32) -> usize {
        self.offsets.partition_point(|&o| o <= g as u64) - 1
    }

    pub fn poly(&self, g: u32) -> Poly {
        let d = self.degree_of(g);
        Poly::from_monic_index(&self.field, d, g as u64 - self.offsets[d])
    }

    pub fn is_prime(&self, g: u32) -> bool {
        g != 0 && self.spf[g as usize] == g
    }

    /// Prime factorization as (prime global index, exponent), primes in sieve order.
    pub fn factor_index(&self, mut g: u32) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        while g != 0 {
            let p = self.spf[g as usize];
            match out.last_mut() {
                Some((lp, e)) if *lp == p => *e += 1,
                _ => out.push((p, 1)),
            }
            g = self.cof[g as usize];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::{enumerate_monic, factor_monic};

    #[test]
    fn sieve_matches_trial_division() {
        let f = FieldSpec::new(5, 1).unwrap();
        let s = FactorSieve::build(&f, 5);
        for d in 0..=5 {
            for p in enumerate_monic(&f, d) {
                let g = s.global_index(&p);
                assert_eq!(s.poly(g), p);
                let mut mine: Vec<(Poly, u32)> = s.factor_index(g).into_iter().map(|(i, e)| (s.poly(i), e)).collect();
                mine.sort();
                assert_eq!(mine, factor_monic(&p));
            }
        }
    }
}
