//! Generating series of shifted cubic Gauss sums over F_q[T], q ≡ 1 mod 6.
//!
//! For a monic f the class series ψ(f, π_∞^{−i}, u) are rational in u with a
//! pole at u³ = q^{−4}; this module computes the coefficient sums
//! C(f, d) = Σ_{F ∈ M_d} G_q(f, F), the numerator polynomials P(f, i, x),
//! the residues ρ(f, i), and checks the Hecke relations, the functional
//! equation, periodicity and the explicit residue formula.
//!
//! C(f, d) is evaluated through F = A·B with A | f^∞ and (B, f) = 1:
//! G(f, AB) = G(f, A) χ̄_{fA}(B) G(1, B), and G(1, B) is a unit times
//! τ(χ_3)^{deg B}. A single pass over monic B buckets them by degree, by the
//! symbols χ_P(B) for a fixed prime set S, and by that unit.

use crate::characters::{chi_f_exp, exp_to_cyc, OmegaIso};
use crate::cyclotomic::{working_order, ComplexApprox, CycNum, Int, ThirdPowNum};
use crate::ffpoly::{cube_decompose, enumerate_monic, factor_monic, is_irreducible, FieldSpec, Poly};
use crate::gauss::{gauss_one_closed, tau, StructuralGauss};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

const MAXC: usize = 32;

/// Addition and multiplication tables for F_q, q ≤ 256.
struct SmallField {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    of_int: Vec<u8>,
    nonsquare: Vec<bool>,
    cube_exp: Vec<u8>,
    flip_discriminant: bool,
}

impl SmallField {
    fn new(iso: &OmegaIso) -> Result<SmallField> {
        let f = iso.field();
        let q = f.q() as usize;
        if q > 256 {
            return Err(Error::InvalidField(format!("bucket engine needs q ≤ 256, got {q}")));
        }
        let e = |x: usize| x as u32;
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = f.add(e(a), e(b)) as u8;
                mul[a * q + b] = f.mul(e(a), e(b)) as u8;
            }
        }
        let neg = (0..q).map(|a| f.neg(e(a)) as u8).collect();
        let inv = (0..q).map(|a| if a == 0 { 0 } else { f.inv(e(a)) as u8 }).collect();
        let of_int = (0..MAXC).map(|k| f.from_int(k as i64) as u8).collect();
        let nonsquare = (0..q).map(|a| a != 0 && f.log(e(a)) % 2 == 1).collect();
        let cube_exp = (0..q).map(|a| iso.chi3_exp(e(a)).unwrap_or(0)).collect();
        Ok(SmallField { q, add, mul, neg, inv, of_int, nonsquare, cube_exp, flip_discriminant: q % 4 == 3 })
    }

    #[inline(always)]
    fn a(&self, x: u8, y: u8) -> u8 {
        self.add[x as usize * self.q + y as usize]
    }

    #[inline(always)]
    fn m(&self, x: u8, y: u8) -> u8 {
        self.mul[x as usize * self.q + y as usize]
    }

    fn pw(&self, x: u8, k: usize) -> u8 {
        (0..k).fold(1u8, |acc, _| self.m(acc, x))
    }

    /// Res(a, b) = lc(a)^{deg b} Π_{a(α)=0} b(α), destroying both inputs.
    fn resultant(&self, a: &mut [u8; MAXC], da: usize, b: &mut [u8; MAXC], db: usize) -> u8 {
        let (mut x, mut y) = (a, b);
        let (mut dx, mut dy) = (da, db);
        let mut acc = 1u8;
        loop {
            if dx == 0 {
                return self.m(acc, self.pw(x[0], dy));
            }
            if dy == 0 {
                return self.m(acc, self.pw(y[0], dx));
            }
            if dx > dy {
                if dx * dy % 2 == 1 {
                    acc = self.neg[acc as usize];
                }
                std::mem::swap(&mut x, &mut y);
                std::mem::swap(&mut dx, &mut dy);
                continue;
            }
            let lx = x[dx];
            let il = self.inv[lx as usize];
            for top in (dx..=dy).rev() {
                let c = y[top];
                if c == 0 {
                    continue;
                }
                let nc = self.neg[self.m(c, il) as usize];
                let s = top - dx;
                for j in 0..=dx {
                    y[s + j] = self.a(y[s + j], self.m(nc, x[j]));
                }
            }
            let mut dr = dx;
            loop {
                if dr == 0 {
                    return 0;
                }
                dr -= 1;
                if y[dr] != 0 {
                    break;
                }
            }
            acc = self.m(acc, self.pw(lx, dy - dr));
            dy = dr;
        }
    }

    /// Unit index 3·[λ(D) = −1] + χ_3-exponent of G(1, B)/τ^{deg B}, or `None`
    /// when B is not squarefree.
    fn gauss_unit(&self, b: &[u8; MAXC], n: usize) -> Option<u8> {
        if n == 0 {
            return Some(0);
        }
        let mut x = *b;
        let mut y = [0u8; MAXC];
        let mut dy = 0;
        for k in 1..=n {
            y[k - 1] = self.m(self.of_int[k], b[k]);
            if y[k - 1] != 0 {
                dy = k - 1;
            }
        }
        if dy == 0 && y[0] == 0 {
            return None;
        }
        let r = self.resultant(&mut x, n, &mut y, dy);
        if r == 0 {
            return None;
        }
        let mut neg = self.nonsquare[r as usize];
        if self.flip_discriminant && (n * (n - 1) / 2) % 2 == 1 {
            neg = !neg;
        }
        Some(3 * neg as u8 + self.cube_exp[r as usize])
    }
}

/// Residue map B ↦ χ_P(B) for one prime P of small degree.
struct SymbolMap {
    k: usize,
    /// T^j mod P as k coefficients.
    tpow: Vec<Vec<u8>>,
    /// Symbol code by residue index: the χ_3 exponent, or 3 when P | B.
    code: Vec<u8>,
}

impl SymbolMap {
    fn new(iso: &OmegaIso, p: &Poly, max_deg: usize) -> Result<SymbolMap> {
        let field = iso.field();
        let k = p.deg() as usize;
        let q = field.q() as usize;
        let size = q.checked_pow(k as u32).filter(|&s| s <= 1 << 20).ok_or_else(|| Error::Domain(format!("symbol table for {p} is too large")))?;
        let tpow = (0..=max_deg)
            .map(|j| {
                let r = Poly::t(field).pow(j as u32).rem(p);
                (0..k).map(|t| r.coeff(t) as u8).collect()
            })
            .collect();
        let mut code = vec![3u8; size];
        for (idx, c) in code.iter_mut().enumerate().skip(1) {
            let mut v = Vec::with_capacity(k);
            let mut x = idx;
            for _ in 0..k {
                v.push((x % q) as u32);
                x /= q;
            }
            *c = chi_f_exp(iso, p, &Poly::new(field, v)).unwrap_or(3);
        }
        Ok(SymbolMap { k, tpow, code })
    }

    #[inline]
    fn symbol(&self, sf: &SmallField, b: &[u8; MAXC], n: usize) -> u8 {
        let mut r = [0u8; 4];
        for (j, &bj) in b.iter().enumerate().take(n + 1) {
            if bj == 0 {
                continue;
            }
            for (t, rt) in r.iter_mut().enumerate().take(self.k) {
                *rt = sf.a(*rt, sf.m(bj, self.tpow[j][t]));
            }
        }
        let idx = r.iter().take(self.k).rev().fold(0usize, |acc, &c| acc * sf.q + c as usize);
        self.code[idx]
    }
}

/// Bucketed counts of monic B by (degree, symbols at S, unit of G(1, B)).
pub struct GaussSumEngine {
    iso: OmegaIso,
    primes: Vec<Poly>,
    max_deg: usize,
    buckets: Vec<Vec<u64>>,
    tau_pows: Vec<CycNum>,
}

impl std::fmt::Debug for GaussSumEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaussSumEngine").field("q", &self.iso.field().q()).field("primes", &self.primes).field("max_deg", &self.max_deg).finish()
    }
}

fn order_of(field: &FieldSpec) -> u32 {
    working_order(field.p())
}

impl GaussSumEngine {
    /// One pass over all monic B with deg B ≤ `max_deg`; `primes` is the set S
    /// (at most 6 monic primes of degree ≤ 3).
    pub fn new(iso: &OmegaIso, primes: &[Poly], max_deg: usize) -> Result<GaussSumEngine> {
        let field = iso.field();
        if field.q() % 6 != 1 {
            return Err(Error::InvalidField(format!("Gauss-sum series need q ≡ 1 mod 6, got {}", field.q())));
        }
        if max_deg >= MAXC {
            return Err(Error::Domain(format!("degree {max_deg} is beyond the engine limit")));
        }
        if primes.len() > 6 {
            return Err(Error::Domain("at most 6 primes in S".into()));
        }
        let mut uniq: Vec<Poly> = Vec::new();
        for p in primes {
            if !p.is_monic() || p.deg() < 1 || p.deg() > 3 || !is_irreducible(p) {
                return Err(Error::Domain(format!("{p} is not a monic prime of degree ≤ 3")));
            }
            if !uniq.contains(p) {
                uniq.push(p.clone());
            }
        }
        let sf = SmallField::new(iso)?;
        let maps = uniq.iter().map(|p| SymbolMap::new(iso, p, max_deg)).collect::<Result<Vec<_>>>()?;
        let width = (1usize << (2 * maps.len())) * 6;
        let q = sf.q;
        let buckets = (0..=max_deg)
            .map(|n| {
                let split = n.min(2);
                let chunks = q.pow(split as u32);
                let inner = n - split;
                (0..chunks)
                    .into_par_iter()
                    .map(|chunk| {
                        let mut counts = vec![0u64; width];
                        let mut b = [0u8; MAXC];
                        b[n] = 1;
                        let mut c = chunk;
                        for t in 0..split {
                            b[inner + t] = (c % q) as u8;
                            c /= q;
                        }
                        loop {
                            if let Some(u) = sf.gauss_unit(&b, n) {
                                let key = maps.iter().enumerate().fold(0usize, |acc, (i, m)| acc | (m.symbol(&sf, &b, n) as usize) << (2 * i));
                                counts[key * 6 + u as usize] += 1;
                            }
                            let mut t = 0;
                            loop {
                                if t == inner {
                                    return counts;
                                }
                                b[t] += 1;
                                if (b[t] as usize) < q {
                                    break;
                                }
                                b[t] = 0;
                                t += 1;
                            }
                        }
                    })
                    .reduce(|| vec![0u64; width], |mut x, y| {
                        x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                        x
                    })
            })
            .collect();
        let m = order_of(field);
        let t = tau(iso, 1);
        let mut tau_pows = vec![CycNum::one(m)];
        for n in 1..=max_deg {
            tau_pows.push(tau_pows[n - 1].mul(&t));
        }
        Ok(GaussSumEngine { iso: iso.clone(), primes: uniq, max_deg, buckets, tau_pows })
    }

    pub fn iso(&self) -> &OmegaIso {
        &self.iso
    }

    pub fn primes(&self) -> &[Poly] {
        &self.primes
    }

    pub fn max_deg(&self) -> usize {
        self.max_deg
    }

    pub fn q(&self) -> u64 {
        self.iso.field().q() as u64
    }

    pub fn order(&self) -> u32 {
        order_of(self.iso.field())
    }

    fn index_of(&self, p: &Poly) -> Result<usize> {
        self.primes.iter().position(|x| x == p).ok_or_else(|| Error::Domain(format!("prime {p} is not in the engine's prime set")))
    }

    /// Σ_{F ∈ M_d, (F, R) = 1} G_q(f, F) for a prime list R; the primes of f and R
    /// must belong to S.
    pub fn restricted_sum(&self, f: &Poly, d: usize, coprime_to: &[Poly]) -> Result<CycNum> {
        if d > self.max_deg {
            return Err(Error::Domain(format!("degree {d} exceeds the engine bound {}", self.max_deg)));
        }
        if !f.is_monic() {
            return Err(Error::Domain(format!("{f} is not monic")));
        }
        let m = self.order();
        let fac: Vec<(usize, Poly, u32)> = factor_monic(f).into_iter().map(|(p, v)| Ok((self.index_of(&p)?, p, v))).collect::<Result<_>>()?;
        let rest: Vec<usize> = coprime_to.iter().map(|p| self.index_of(p)).collect::<Result<_>>()?;
        let mut mask = 0usize;
        for &(i, _, _) in &fac {
            mask |= 1 << i;
        }
        for &i in &rest {
            mask |= 1 << i;
        }
        // A runs over products of primes of f outside R, exponent ≤ v_P(f) + 1
        let a_primes: Vec<&(usize, Poly, u32)> = fac.iter().filter(|(i, _, _)| !rest.contains(i)).collect();
        let mut exps = vec![0u32; a_primes.len()];
        let mut total = CycNum::zero(m);
        let nprimes = self.primes.len();
        loop {
            let deg_a: usize = a_primes.iter().zip(&exps).map(|((_, p, _), &a)| p.deg() as usize * a as usize).sum();
            if deg_a <= d {
                let a_poly = a_primes.iter().zip(&exps).fold(Poly::one(f.field()), |acc, ((_, p, _), &a)| acc.mul(&p.pow(a)));
                let g_a = if a_poly.is_one() { CycNum::one(m) } else { StructuralGauss::new(&self.iso, &a_poly)?.eval(f)? };
                if !g_a.is_zero() {
                    // χ_{fA} = Π_P χ_P^{v_P(fA)}
                    let mut e_vec = [0u32; 6];
                    for &(i, _, v) in &fac {
                        e_vec[i] = v;
                    }
                    for ((i, _, _), &a) in a_primes.iter().zip(&exps) {
                        e_vec[*i] += a;
                    }
                    let e = d - deg_a;
                    let mut c = [[0i128; 3]; 2];
                    for (key, row) in self.buckets[e].chunks_exact(6).enumerate() {
                        let mut s = 0u32;
                        let mut ok = true;
                        for (i, &ei) in e_vec.iter().enumerate().take(nprimes) {
                            let code = (key >> (2 * i)) as u32 & 3;
                            if code == 3 {
                                if mask >> i & 1 == 1 {
                                    ok = false;
                                    break;
                                }
                                continue;
                            }
                            s += code * ei;
                        }
                        if !ok {
                            continue;
                        }
                        for (u, &n) in row.iter().enumerate() {
                            if n > 0 {
                                let k = (u as u32 % 3 + 3 * 3 - s % 3) % 3;
                                c[u / 3][k as usize] += n as i128;
                            }
                        }
                    }
                    let counts: Vec<Int> = (0..3).map(|k| Int::from(c[0][k] - c[1][k])).collect();
                    let inner = CycNum::from_exponent_counts(3, &counts).embed(m).mul(&self.tau_pows[e]);
                    total = total.add(&g_a.mul(&inner));
                }
            }
            let mut t = 0;
            loop {
                if t == exps.len() {
                    return Ok(total);
                }
                let bound = a_primes[t].2 + 1;
                exps[t] += 1;
                let over = a_primes.iter().zip(&exps).map(|((_, p, _), &a)| p.deg() as usize * a as usize).sum::<usize>() > d;
                if exps[t] <= bound && !over {
                    break;
                }
                exps[t] = 0;
                t += 1;
            }
        }
    }

    /// C(f, d) = Σ_{F ∈ M_d} G_q(f, F).
    pub fn coefficient_c(&self, f: &Poly, d: usize) -> Result<CycNum> {
        self.restricted_sum(f, d, &[])
    }

    /// The class series Σ_{deg F ≡ i mod 3, deg F ≤ n} G_q(f, F) u^{deg F},
    /// restricted to (F, R) = 1.
    pub fn series(&self, f: &Poly, i: i64, n: usize, coprime_to: &[Poly]) -> Result<GaussSeries> {
        let ci = i.rem_euclid(3) as u8;
        let mut coeffs = BTreeMap::new();
        for d in (ci as usize..=n).step_by(3) {
            coeffs.insert(d, self.restricted_sum(f, d, coprime_to)?);
        }
        Ok(GaussSeries { f: f.clone(), class_index: ci, truncation: n, coeffs })
    }
}

/// Σ_{F ∈ M_d, (F, R) = 1} G_q(f, F) by factoring every F.
pub fn brute_force_sum(iso: &OmegaIso, f: &Poly, d: usize, coprime_to: &[Poly]) -> Result<CycNum> {
    let m = order_of(iso.field());
    let mut acc = CycNum::zero(m);
    for big_f in enumerate_monic(iso.field(), d) {
        if coprime_to.iter().any(|p| p.divides(&big_f)) {
            continue;
        }
        acc = acc.add(&StructuralGauss::new(iso, &big_f)?.eval(f)?);
    }
    Ok(acc)
}

/// A truncated class series (1 − q³u³)·ψ(f, π_∞^{−i}, u).
#[derive(Clone, Debug)]
pub struct GaussSeries {
    pub f: Poly,
    pub class_index: u8,
    pub truncation: usize,
    pub coeffs: BTreeMap<usize, CycNum>,
}

impl GaussSeries {
    /// Dense coefficients 0..=truncation.
    pub fn dense(&self, m: u32) -> Vec<CycNum> {
        (0..=self.truncation).map(|d| self.coeffs.get(&d).cloned().unwrap_or_else(|| CycNum::zero(m))).collect()
    }
}

/// ρ(f, i) for a representative 0 ≤ i ≤ 2.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueValue {
    pub f: Poly,
    pub i: u8,
    pub value: CycNum,
}

/// x·q^e for an integer e of either sign.
pub fn q_scale(x: &CycNum, q: u64, e: i64) -> CycNum {
    let qi = Int::from(q);
    if e >= 0 {
        x.scale(&qi.pow(e as u32))
    } else {
        x.scale_ratio(&Int::ONE, &qi.pow((-e) as u32))
    }
}

/// ⌊(1 + deg f − i)/3⌋, possibly −1.
pub fn degree_bound(f: &Poly, i: u8) -> i64 {
    (1 + f.deg() - i as i64).div_euclid(3)
}

/// The first j from which C(f, i + 3(j+1)) = q⁴ C(f, i + 3j) holds: one past the degree bound.
pub fn recurrence_start(f: &Poly, i: u8) -> usize {
    (degree_bound(f, i) + 1).max(0) as usize
}

/// Coefficients of P(f, i, x), checked to be a polynomial by exact division
/// by 1 − q³x.
pub fn polynomial_p(engine: &GaussSumEngine, f: &Poly, i: u8) -> Result<Vec<CycNum>> {
    let q = engine.q();
    let m = engine.order();
    let b = recurrence_start(f, i);
    let c: Vec<CycNum> = (0..=b).map(|j| engine.coefficient_c(f, i as usize + 3 * j)).collect::<Result<_>>()?;
    // N(x) = (1 − q⁴x) Σ_{j<B} C_j x^j + C_B x^B
    let mut num = vec![CycNum::zero(m); b + 1];
    for j in 0..b {
        num[j] = num[j].add(&c[j]);
        num[j + 1] = num[j + 1].sub(&q_scale(&c[j], q, 4));
    }
    num[b] = num[b].add(&c[b]);
    let mut p = Vec::with_capacity(b);
    let mut prev = CycNum::zero(m);
    for nj in num.iter().take(b) {
        prev = nj.add(&q_scale(&prev, q, 3));
        p.push(prev.clone());
    }
    let rem = num[b].add(&q_scale(&prev, q, 3));
    if !rem.is_zero() {
        return Err(Error::Consistency(format!("P({f}, {i}, x) is not a polynomial: remainder {}", rem.serialize())));
    }
    while p.last().is_some_and(CycNum::is_zero) {
        p.pop();
    }
    if p.len() as i64 - 1 > degree_bound(f, i) {
        return Err(Error::Consistency(format!("deg P({f}, {i}, x) exceeds the bound")));
    }
    Ok(p)
}

/// P(f, i, q^{−4}).
pub fn rho_via_p(engine: &GaussSumEngine, f: &Poly, i: u8) -> Result<CycNum> {
    let q = engine.q();
    let p = polynomial_p(engine, f, i)?;
    Ok(p.iter().enumerate().fold(CycNum::zero(engine.order()), |acc, (j, c)| acc.add(&q_scale(c, q, -4 * j as i64))))
}

/// C(f, i')/((1 − 1/q) q^{4(i'−i)/3}) with i' = i + 3B past the recurrence start.
pub fn rho_via_quotient(engine: &GaussSumEngine, f: &Poly, i: u8) -> Result<CycNum> {
    let q = engine.q();
    let b = recurrence_start(f, i);
    let c = engine.coefficient_c(f, i as usize + 3 * b)?;
    // 1/(1 − 1/q) = q/(q − 1)
    let v = c.scale_ratio(&Int::from(q), &Int::from(q - 1));
    Ok(q_scale(&v, q, -4 * b as i64))
}

/// ρ(f, i) for 0 ≤ i ≤ 2, both routes required to agree.
pub fn rho(engine: &GaussSumEngine, f: &Poly, i: u8) -> Result<ResidueValue> {
    let i = i % 3;
    let a = rho_via_p(engine, f, i)?;
    let b = rho_via_quotient(engine, f, i)?;
    if a != b {
        return Err(Error::Consistency(format!("ρ({f}, {i}) routes disagree")));
    }
    Ok(ResidueValue { f: f.clone(), i, value: a })
}

/// ρ(f, i) for any integer i: ρ(f, i + 3) = q⁴ ρ(f, i).
pub fn rho_shifted(engine: &GaussSumEngine, f: &Poly, i: i64) -> Result<CycNum> {
    let r = i.rem_euclid(3);
    let base = rho(engine, f, r as u8)?.value;
    Ok(q_scale(&base, engine.q(), 4 * (i - r) / 3))
}

/// ρ(1, i) for 0 ≤ i ≤ 2 in closed form: 1, τ(χ_3)·q, 0.
pub fn rho_one_closed(iso: &OmegaIso, i: u8) -> CycNum {
    let m = order_of(iso.field());
    match i % 3 {
        0 => CycNum::one(m),
        1 => tau(iso, 1).scale(&Int::from(iso.field().q() as u64)),
        _ => CycNum::zero(m),
    }
}

/// The explicit residue Ḡ(1, f_1)|f_1|^{−2/3} q^{4i/3 − (4/3)[i − 2 deg f]_3} ρ(1, [i − 2 deg f]_3),
/// or 0 when f_2 ≠ 1.
pub fn explicit_residue(iso: &OmegaIso, f: &Poly, i: u8) -> Result<CycNum> {
    let m = order_of(iso.field());
    let dec = cube_decompose(f);
    if !dec.b.is_one() {
        return Ok(CycNum::zero(m));
    }
    let f1 = &dec.c;
    let r = (i as i64 - 2 * f.deg()).rem_euclid(3);
    let thirds = -2 * f1.deg() + 4 * i as i64 - 4 * r;
    let v = gauss_one_closed(iso, f1).conj().mul(&rho_one_closed(iso, r as u8));
    ThirdPowNum::new(iso.field().q() as u64, v, thirds)
        .to_cyc()
        .ok_or_else(|| Error::Consistency(format!("fractional q-power in the residue of {f}")))
}

pub fn verify_explicit_residue(engine: &GaussSumEngine, f: &Poly, i: u8) -> Result<bool> {
    Ok(rho(engine, f, i)?.value == explicit_residue(engine.iso(), f, i)?)
}

/// ρ(fπ, i) = Ḡ(f, π) |π|^{−2/3} q^{(8/3)deg π} ρ(f, i − 2 deg π) for π ∤ f.
pub fn verify_patterson_prime(engine: &GaussSumEngine, f: &Poly, pi: &Poly, i: u8) -> Result<bool> {
    let dp = pi.deg();
    let lhs = rho(engine, &f.mul(pi), i)?.value;
    let g = StructuralGauss::new(engine.iso(), pi)?.eval(f)?.conj();
    let rhs = ThirdPowNum::new(engine.q(), g.mul(&rho_shifted(engine, f, i as i64 - 2 * dp)?), -2 * dp + 8 * dp)
        .to_cyc()
        .ok_or_else(|| Error::Consistency("fractional q-power".into()))?;
    Ok(lhs == rhs)
}

/// ρ(fπ², i) = 0 for π ∤ f.
pub fn verify_patterson_square(engine: &GaussSumEngine, f: &Poly, pi: &Poly, i: u8) -> Result<bool> {
    Ok(rho(engine, &f.mul(&pi.pow(2)), i)?.value.is_zero())
}

/// ρ(fπ^{j+3}, i) = ρ(fπ^j, i) for π ∤ f.
pub fn verify_periodicity(engine: &GaussSumEngine, f: &Poly, pi: &Poly, j: u32, i: u8) -> Result<bool> {
    Ok(rho(engine, &f.mul(&pi.pow(j + 3)), i)?.value == rho(engine, &f.mul(&pi.pow(j)), i)?.value)
}

/// C(f, i + 3(B+1)) = q⁴ C(f, i + 3B) at the recurrence start B.
pub fn verify_recurrence(engine: &GaussSumEngine, f: &Poly, i: u8) -> Result<bool> {
    let b = recurrence_start(f, i);
    let lo = engine.coefficient_c(f, i as usize + 3 * b)?;
    let hi = engine.coefficient_c(f, i as usize + 3 * b + 3)?;
    Ok(hi == q_scale(&lo, engine.q(), 4))
}

/// Truncated power series in u.
type Series = Vec<CycNum>;

fn series_zero(n: usize, m: u32) -> Series {
    vec![CycNum::zero(m); n + 1]
}

/// s·c·u^k truncated.
fn series_shift(s: &Series, c: &CycNum, k: usize) -> Series {
    let m = c.order();
    let mut out = series_zero(s.len() - 1, m);
    for (d, x) in s.iter().enumerate() {
        if d + k < out.len() && !x.is_zero() {
            out[d + k] = x.mul(c);
        }
    }
    out
}

fn series_add(a: &Series, b: &Series) -> Series {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

fn series_sub(a: &Series, b: &Series) -> Series {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

fn series_mul(a: &Series, b: &Series) -> Series {
    let m = a[0].order();
    let mut out = series_zero(a.len() - 1, m);
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

/// (1 − c u^k) truncated.
fn one_minus(c: &CycNum, k: usize, n: usize) -> Series {
    let m = c.order();
    let mut s = series_zero(n, m);
    s[0] = CycNum::one(m);
    if k <= n {
        s[k] = c.neg();
    }
    s
}

/// (1 − c u^k)^{−1} truncated.
fn geometric(c: &CycNum, k: usize, n: usize) -> Series {
    let m = c.order();
    let mut s = series_zero(n, m);
    let mut p = CycNum::one(m);
    let mut d = 0;
    while d <= n {
        s[d] = p.clone();
        p = p.mul(c);
        d += k;
    }
    s
}

/// Outcome of the Hecke checks for one (f, π).
#[derive(Clone, Debug, Serialize)]
pub struct HeckeReport {
    pub j0: bool,
    pub j1: bool,
    pub j2: bool,
    pub another: [bool; 3],
}

impl HeckeReport {
    pub fn all(&self) -> bool {
        self.j0 && self.j1 && self.j2 && self.another.iter().all(|&b| b)
    }
}

/// The four Hecke relations, as truncated identities of (1 − q³u³)ψ-series up
/// to degree n, for every class i.
pub fn verify_hecke_relations(engine: &GaussSumEngine, f: &Poly, pi: &Poly, n: usize) -> Result<HeckeReport> {
    if pi.divides(f) {
        return Err(Error::Domain(format!("{pi} divides {f}")));
    }
    let q = engine.q();
    let m = engine.order();
    let dp = pi.deg() as usize;
    let only = std::slice::from_ref(pi);
    let s = |g: &Poly, i: i64| engine.series(g, i, n, &[]).map(|x| x.dense(m));
    let sp = |g: &Poly, i: i64| engine.series(g, i, n, only).map(|x| x.dense(m));
    let g_f_pi = StructuralGauss::new(engine.iso(), pi)?.eval(f)?;
    let qd = |e: usize| q_scale(&CycNum::one(m), q, e as i64);
    let fp = |k: u32| f.mul(&pi.pow(k));
    let mut rep = HeckeReport { j0: true, j1: true, j2: true, another: [true; 3] };
    for i in 0..3i64 {
        // ψ_π(f, i) = ψ(f, i) − G(f, π) u^{deg π} ψ_π(fπ, i − deg π)
        let rhs = series_sub(&s(f, i)?, &series_shift(&sp(&fp(1), i - dp as i64)?, &g_f_pi, dp));
        rep.j0 &= sp(f, i)? == rhs;
        // ψ_π(fπ, i) = ψ(fπ, i) − Ḡ(f, π) q^{deg π} u^{2 deg π} ψ_π(f, i − 2 deg π)
        let c = g_f_pi.conj().mul(&qd(dp));
        let rhs = series_sub(&s(&fp(1), i)?, &series_shift(&sp(f, i - 2 * dp as i64)?, &c, 2 * dp));
        rep.j1 &= sp(&fp(1), i)? == rhs;
        // (1 − q^{2 deg π} u^{3 deg π}) ψ_π(fπ², i) = ψ(fπ², i)
        let damp = one_minus(&qd(2 * dp), 3 * dp, n);
        rep.j2 &= series_mul(&damp, &sp(&fp(2), i)?) == s(&fp(2), i)?;
        for j in 0..3u32 {
            // ψ(fπ^{j+3}, i) − q^{3 deg π} u^{3 deg π} ψ(fπ^j, i) = (1 − q^{2 deg π} u^{3 deg π}) ψ_π(fπ^j, i)
            let lhs = series_sub(&s(&fp(j + 3), i)?, &series_shift(&s(&fp(j), i)?, &qd(3 * dp), 3 * dp));
            rep.another[j as usize] &= lhs == series_mul(&damp, &sp(&fp(j), i)?);
        }
    }
    Ok(rep)
}

/// Laurent polynomial in u.
type Laurent = BTreeMap<i64, CycNum>;

fn laurent_add_term(l: &mut Laurent, e: i64, c: CycNum) {
    if c.is_zero() {
        return;
    }
    let v = match l.remove(&e) {
        Some(x) => x.add(&c),
        None => c,
    };
    if !v.is_zero() {
        l.insert(e, v);
    }
}

fn laurent_mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            laurent_add_term(&mut out, ea + eb, ca.mul(cb));
        }
    }
    out
}

fn laurent_sub(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = a.clone();
    for (e, c) in b {
        laurent_add_term(&mut out, *e, c.neg());
    }
    out
}

/// Outcome of the functional-equation check for one (f, i).
#[derive(Clone, Debug, Serialize)]
pub struct HoffsteinReport {
    pub holds: bool,
    /// The same check with the restriction of χ_f not conjugated.
    pub alternative_holds: bool,
    /// Nonzero coefficients of LHS − RHS under the adopted reading.
    pub residual: Vec<(i64, String)>,
}

/// W_{f,i} = τ of α ↦ χ_3(α)^{2i−1} χ̄_f(α), where χ_f(α) = χ_3(α)^{deg f}.
pub fn hoffstein_w(iso: &OmegaIso, f: &Poly, i: u8, conjugate_f: bool) -> CycNum {
    let s = if conjugate_f { -f.deg() } else { f.deg() };
    tau(iso, (2 * i as i64 - 1 + s).rem_euclid(3) as u8)
}

/// Cross-multiplied functional equation
/// (1 − q⁴u³)ψ(f, i, u) = |f| u^{deg f}[a_1(u) ψ(f, i, 1/(q²u)) + a_2(u) ψ(f, 1 + deg f − i, 1/(q²u))]
/// with ψ(f, i, u) = u^i P(f, i, u³)/(1 − q⁴u³).
pub fn verify_hoffstein_fe(engine: &GaussSumEngine, f: &Poly, i: u8) -> Result<HoffsteinReport> {
    let iso = engine.iso();
    let q = engine.q();
    let m = engine.order();
    let qi = q as i64;
    let i = i % 3;
    let df = f.deg();
    let k2 = (1 + df - i as i64).rem_euclid(3) as u8;
    let p_i = polynomial_p(engine, f, i)?;
    let p_k = polynomial_p(engine, f, k2)?;
    let qs = |e: i64| q_scale(&CycNum::one(m), q, e);
    let mono = |e: i64, c: CycNum| -> Laurent {
        let mut l = Laurent::new();
        laurent_add_term(&mut l, e, c);
        l
    };
    // v^k P(v³) with v = q^{−2}u^{−1}
    let at_v = |p: &[CycNum], k: u8| -> Laurent {
        let mut l = Laurent::new();
        for (j, c) in p.iter().enumerate() {
            let e = k as i64 + 3 * j as i64;
            laurent_add_term(&mut l, -e, q_scale(c, q, -2 * e));
        }
        l
    };
    // LHS·(q²u³ − 1) = u^i P(u³)(q²u³ − 1)
    let mut lhs = Laurent::new();
    for (j, c) in p_i.iter().enumerate() {
        let e = i as i64 + 3 * j as i64;
        laurent_add_term(&mut lhs, e + 3, q_scale(c, q, 2));
        laurent_add_term(&mut lhs, e, c.neg());
    }
    let e1 = (df + 1 - 2 * i as i64).rem_euclid(3);
    // a_1 = −q²u (qu)^{−e1}(1 − 1/q)
    let a1 = mono(1 - e1, q_scale(&CycNum::from_i64(m, -(qi - 1)), q, 1 - e1));
    let build = |w: &CycNum| -> Laurent {
        // a_2 = −W (qu)^{−2}(1 − q³u³)
        let mut a2 = Laurent::new();
        laurent_add_term(&mut a2, -2, q_scale(&w.neg(), q, -2));
        laurent_add_term(&mut a2, 1, q_scale(w, q, 1));
        let mut br = laurent_mul(&a1, &at_v(&p_i, i));
        for (e, c) in laurent_mul(&a2, &at_v(&p_k, k2)) {
            laurent_add_term(&mut br, e, c);
        }
        // |f| u^{deg f} q² u³
        laurent_mul(&mono(df + 3, qs(df + 2)), &br)
    };
    let res = laurent_sub(&lhs, &build(&hoffstein_w(iso, f, i, true)));
    let alt = laurent_sub(&lhs, &build(&hoffstein_w(iso, f, i, false)));
    Ok(HoffsteinReport {
        holds: res.is_empty(),
        alternative_holds: alt.is_empty(),
        residual: res.iter().map(|(e, c)| (*e, c.serialize())).collect(),
    })
}

/// Ψ̃(f, u) = Σ_{(F, f) = 1} G_q(f, F) u^{deg F} truncated at degree n.
pub fn psi_tilde(engine: &GaussSumEngine, f: &Poly, n: usize) -> Result<Vec<CycNum>> {
    let primes: Vec<Poly> = factor_monic(f).into_iter().map(|(p, _)| p).collect();
    (0..=n).map(|d| engine.restricted_sum(f, d, &primes)).collect()
}

fn full_series(engine: &GaussSumEngine, g: &Poly, n: usize) -> Result<Series> {
    (0..=n).map(|d| engine.coefficient_c(g, d)).collect()
}

fn squarefree_divisors(primes: &[Poly], field: &FieldSpec) -> Vec<(Poly, Vec<Poly>)> {
    let mut out = vec![(Poly::one(field), Vec::new())];
    for p in primes {
        let more: Vec<_> = out.iter().map(|(d, ps)| (d.mul(p), ps.iter().cloned().chain([p.clone()]).collect())).collect();
        out.extend(more);
    }
    out
}

/// Ψ̃(f, u) assembled from full series Ψ(a f_1 f_2²/ℓ, u) over a | f_3^*, ℓ | a f_1,
/// with the (1 − (u³q²)^{deg P})^{−1} prefactors expanded.
pub fn psi_tilde_via_expression(engine: &GaussSumEngine, f: &Poly, n: usize) -> Result<Vec<CycNum>> {
    let iso = engine.iso();
    let q = engine.q();
    let m = engine.order();
    let field = f.field();
    let dec = cube_decompose(f);
    let (f1, f2) = (&dec.c, &dec.b);
    let f12 = f1.mul(f2);
    let f1f22 = f1.mul(&f2.pow(2));
    let star: Vec<Poly> = factor_monic(&dec.e).into_iter().map(|(p, _)| p).filter(|p| !p.divides(&f12)).collect();
    let prefactor = |p: &Poly| geometric(&q_scale(&CycNum::one(m), q, 2 * p.deg()), 3 * p.deg() as usize, n);
    let mut outer = series_zero(n, m);
    outer[0] = CycNum::one(m);
    for (p, _) in factor_monic(&f12) {
        outer = series_mul(&outer, &prefactor(&p));
    }
    let mut total = series_zero(n, m);
    for (a, a_primes) in squarefree_divisors(&star, field) {
        let mu_a = if a_primes.len() % 2 == 0 { 1 } else { -1 };
        let g_a = if a.is_one() { CycNum::one(m) } else { StructuralGauss::new(iso, &a)?.eval(&f1f22)? };
        if g_a.is_zero() {
            continue;
        }
        let mut term = series_zero(n, m);
        let af1 = a.mul(f1);
        let l_primes: Vec<Poly> = factor_monic(&af1).into_iter().map(|(p, _)| p).collect();
        for (l, lp) in squarefree_divisors(&l_primes, field) {
            let mu_l = if lp.len() % 2 == 0 { 1 } else { -1 };
            let dl = l.deg();
            let rest = a.mul(&f1f22).div_exact(&l).expect("ℓ | a f_1");
            let sym = chi_f_exp(iso, &l, &rest);
            if sym.is_none() {
                continue;
            }
            let c = gauss_one_closed(iso, &l).conj().mul(&exp_to_cyc(sym, m));
            let c = q_scale(&c, q, dl).scale(&Int::from(mu_l));
            term = series_add(&term, &series_shift(&full_series(engine, &rest, n)?, &c, 2 * dl as usize));
        }
        for p in &a_primes {
            term = series_mul(&term, &prefactor(p));
        }
        let c = g_a.scale(&Int::from(mu_a));
        total = series_add(&total, &series_shift(&term, &c, a.deg() as usize));
    }
    Ok(series_mul(&outer, &total))
}

/// The main term of Σ_{F ∈ M_d, (F, f) = 1} G_q(f, F):
/// δ_{f_2=1} q^{4d/3 − (4/3)[d + deg f_1]_3} Ḡ(1, f_1) ρ(1, [d + deg f_1]_3)
/// Π_{P | f_1 f_3^*}(1 + 1/|P|)^{−1} / (ζ_q(2) |f_1|^{2/3}).
pub fn gauss_average_main_term(iso: &OmegaIso, f: &Poly, d: usize) -> Result<CycNum> {
    let q = iso.field().q() as u64;
    let m = order_of(iso.field());
    let dec = cube_decompose(f);
    if !dec.b.is_one() {
        return Ok(CycNum::zero(m));
    }
    let f1 = &dec.c;
    let r = (d as i64 + f1.deg()).rem_euclid(3);
    let thirds = 4 * d as i64 - 4 * r - 2 * f1.deg();
    let mut v = gauss_one_closed(iso, f1).conj().mul(&rho_one_closed(iso, r as u8));
    // 1/ζ_q(2) = 1 − 1/q
    v = v.scale_ratio(&Int::from(q - 1), &Int::from(q));
    // with f_2 = 1 the primes of f_1 f_3^* are those of f_1 f_3
    for (p, _) in factor_monic(&f1.mul(&dec.e)) {
        let norm = Int::from(q).pow(p.deg() as u32);
        // (1 + 1/|P|)^{−1} = |P|/(|P| + 1)
        v = v.scale_ratio(&norm, &(&norm + &Int::ONE));
    }
    ThirdPowNum::new(q, v, thirds).to_cyc().ok_or_else(|| Error::Consistency(format!("fractional q-power in the main term for {f}")))
}

/// |Σ_{F ∈ M_d, (F, f) = 1} G_q(f, F) − main term| / q^{4d/3}.
pub fn gauss_average_relative_error(engine: &GaussSumEngine, f: &Poly, d: usize) -> Result<f64> {
    let primes: Vec<Poly> = factor_monic(f).into_iter().map(|(p, _)| p).collect();
    let exact = engine.restricted_sum(f, d, &primes)?;
    let main = gauss_average_main_term(engine.iso(), f, d)?;
    let diff: ComplexApprox = exact.sub(&main).to_complex();
    Ok(diff.abs() / (engine.q() as f64).powf(4.0 * d as f64 / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::FieldSpec;
    use crate::gauss::shifted_gauss_sum;

    fn setup() -> (FieldSpec, OmegaIso) {
        let f = FieldSpec::new(7, 1).unwrap();
        let iso = OmegaIso::canonical(&f).unwrap();
        (f, iso)
    }

    fn small_primes(f: &FieldSpec) -> Vec<Poly> {
        vec![Poly::t(f), Poly::linear(f, 1), Poly::from_ints(f, &[1, 0, 1]).monic()].into_iter().filter(is_irreducible).collect()
    }

    #[test]
    fn small_resultant_matches_generic() {
        let (f, iso) = setup();
        let sf = SmallField::new(&iso).unwrap();
        for n in 0..=4 {
            for b in enumerate_monic(&f, n) {
                let mut arr = [0u8; MAXC];
                for (k, &c) in b.coeffs().iter().enumerate() {
                    arr[k] = c as u8;
                }
                let u = sf.gauss_unit(&arr, n);
                let expect = crate::gauss::gauss_one_unit(&iso, b.coeffs()).map(|(neg, k)| 3 * neg as u8 + k);
                assert_eq!(u, expect, "{b}");
            }
        }
    }

    #[test]
    fn engine_matches_brute_force_and_oracle() {
        let (f, iso) = setup();
        let ps = small_primes(&f);
        assert_eq!(ps.len(), 3);
        let eng = GaussSumEngine::new(&iso, &ps, 4).unwrap();
        let t = Poly::t(&f);
        let fs = [Poly::one(&f), t.clone(), t.pow(2), t.mul(&Poly::linear(&f, 1)), ps[2].clone(), t.pow(3), t.pow(2).mul(&ps[2])];
        for g in &fs {
            for d in 0..=3 {
                assert_eq!(eng.coefficient_c(g, d).unwrap(), brute_force_sum(&iso, g, d, &[]).unwrap(), "C({g},{d})");
                assert_eq!(eng.restricted_sum(g, d, &ps[1..2]).unwrap(), brute_force_sum(&iso, g, d, &ps[1..2]).unwrap());
            }
        }
        // definitional sums at degree 2
        let direct = enumerate_monic(&f, 2).fold(CycNum::zero(21), |a, big| a.add(&shifted_gauss_sum(&iso, &t, &big)));
        assert_eq!(eng.coefficient_c(&t, 2).unwrap(), direct);
    }

    #[test]
    fn residues_of_one() {
        let (f, iso) = setup();
        let eng = GaussSumEngine::new(&iso, &[Poly::t(&f)], 8).unwrap();
        let one = Poly::one(&f);
        assert_eq!(eng.coefficient_c(&one, 0).unwrap(), CycNum::one(21));
        assert_eq!(rho(&eng, &one, 0).unwrap().value, CycNum::one(21));
        assert_eq!(rho(&eng, &one, 1).unwrap().value, rho_one_closed(&iso, 1));
        assert!(rho(&eng, &one, 2).unwrap().value.is_zero());
        for i in 0..3 {
            assert!(verify_recurrence(&eng, &one, i).unwrap());
        }
        // C(1, 3j) = q^{4j}(1 − 1/q), so the recurrence fails at j = 0 = ⌊(1 + deg f − i)/3⌋
        assert_ne!(eng.coefficient_c(&one, 3).unwrap(), q_scale(&eng.coefficient_c(&one, 0).unwrap(), 7, 4));
        assert_eq!(eng.coefficient_c(&one, 3).unwrap(), CycNum::from_i64(21, 7 * 7 * 7 * 6));
        let t = Poly::t(&f);
        for i in 0..3 {
            assert!(verify_recurrence(&eng, &t, i).unwrap());
            assert!(verify_explicit_residue(&eng, &t, i).unwrap());
            let r = verify_hoffstein_fe(&eng, &t, i).unwrap();
            assert!(r.holds, "{:?}", r);
        }
    }

    #[test]
    fn hecke_and_psi_tilde_small() {
        let (f, iso) = setup();
        let ps = small_primes(&f);
        let eng = GaussSumEngine::new(&iso, &ps, 4).unwrap();
        let one = Poly::one(&f);
        let rep = verify_hecke_relations(&eng, &one, &ps[0], 4).unwrap();
        assert!(rep.all(), "{rep:?}");
        for k in 1..=3 {
            let g = ps[1].pow(k);
            assert_eq!(psi_tilde(&eng, &g, 4).unwrap(), psi_tilde_via_expression(&eng, &g, 4).unwrap(), "k={k}");
        }
    }
}
