//! Gauss sums: τ(χ) on F_q^*, the shifted sums G_q(V, f), the full Gauss sum
//! G(χ), root numbers, and Poisson summation.
//!
//! Every evaluator returns an element of Q(ξ_{3p}). The definitional path sums
//! over all residues mod f; the structural path factors f and applies twisted
//! multiplicativity and the prime-power table.

use crate::characters::{conj_exp, exp_to_cyc, mul_exp, CharacterKind, CubeExp, CubicCharacter, OmegaIso, Parity};
use crate::cyclotomic::{working_order, CycNum, HalfPowNum, Int};
use crate::ffpoly::{enumerate_monic, factor_monic, resultant_raw, Elem, FieldSpec, Poly, QuadraticExtension};
use crate::{Error, Result};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

fn order_of(field: &FieldSpec) -> u32 {
    working_order(field.p())
}

/// τ(χ_3^k) = Σ_{a ∈ F_q^*} χ_3(a)^k ξ_p^{tr a}.
pub fn tau(iso: &OmegaIso, k: u8) -> CycNum {
    let field = iso.field();
    let (p, m) = (field.p(), order_of(field));
    let mut counts = vec![Int::ZERO; m as usize];
    for a in 1..field.q() {
        let j = iso.chi3_exp(a).expect("a ≠ 0") as u32 * k as u32 % 3;
        let e = ((p * j + 3 * field.trace(a)) % m) as usize;
        counts[e] = &counts[e] + &Int::ONE;
    }
    CycNum::from_exponent_counts(m, &counts)
}

/// τ of the restriction of χ to F_q^*.
pub fn tau_restriction(chi: &CubicCharacter) -> CycNum {
    let field = chi.field();
    let (p, m) = (field.p(), order_of(field));
    let mut counts = vec![Int::ZERO; m as usize];
    for a in 1..field.q() {
        let j = chi.eval_scalar_exp(a).expect("a ≠ 0") as u32;
        let e = ((p * j + 3 * field.trace(a)) % m) as usize;
        counts[e] = &counts[e] + &Int::ONE;
    }
    CycNum::from_exponent_counts(m, &counts)
}

/// ε(χ) = q^{−1/2} τ(χ) for odd χ and 1 for even χ.
pub fn epsilon(chi: &CubicCharacter) -> HalfPowNum {
    let q = chi.q() as u64;
    let m = order_of(chi.field());
    match chi.parity {
        Parity::Even => HalfPowNum::one(q, m),
        Parity::Odd => HalfPowNum::new(q, CycNum::zero(m), tau_restriction(chi)),
    }
}

/// Σ_{u mod h} χ(u) e_q(uV/h) for monic h, with χ given on residues by `chi`.
pub fn character_sum_with_shift(h: &Poly, v: &Poly, chi: impl Fn(&Poly) -> CubeExp) -> CycNum {
    let field = h.field();
    let m = order_of(field);
    let d = h.deg() as usize;
    if d == 0 {
        return CycNum::one(m);
    }
    let lin = laurent_functional(h, v);
    let (p, q) = (field.p(), field.q() as u64);
    let mut counts = vec![0u64; m as usize];
    let total = q.pow(d as u32);
    for idx in 0..total {
        let u = Poly::new(field, digits_of(idx, field.q(), d));
        if let Some(j) = chi(&u) {
            let l = dot(field, &lin, u.coeffs());
            counts[((p * j as u32 + 3 * field.trace(l)) % m) as usize] += 1;
        }
    }
    CycNum::from_exponent_counts(m, &counts.iter().map(|&c| Int::from(c)).collect::<Vec<_>>())
}

fn digits_of(mut idx: u64, q: u32, d: usize) -> Vec<Elem> {
    (0..d)
        .map(|_| {
            let r = (idx % q as u64) as Elem;
            idx /= q as u64;
            r
        })
        .collect()
}

fn dot(field: &FieldSpec, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

/// L_k = coefficient of 1/T in T^k V / h, for k < deg h (h monic): the Laurent
/// residue of uV/h is Σ u_k L_k.
fn laurent_functional(h: &Poly, v: &Poly) -> Vec<Elem> {
    let d = h.deg() as usize;
    let mut r = v.rem(h);
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        out.push(r.coeff(d - 1));
        r = r.shift(1).rem(h);
    }
    out
}

/// Definitional evaluator of G_q(V, f) for a fixed monic f, reusable across V.
pub struct GaussOracle {
    f: Poly,
    d: usize,
    /// χ_f on residues by index (3 encodes the value 0).
    chi: Vec<u8>,
}

impl GaussOracle {
    pub fn new(iso: &OmegaIso, f: &Poly) -> GaussOracle {
        assert!(f.is_monic(), "modulus must be monic");
        let field = f.field();
        let d = f.deg() as usize;
        let total = (field.q() as u64).pow(d as u32);
        let chi = (0..total)
            .map(|idx| {
                let u = digits_of(idx, field.q(), d);
                let mut u = u;
                while u.last() == Some(&0) {
                    u.pop();
                }
                if d == 0 {
                    return 0;
                }
                iso.chi3_exp(resultant_raw(field, f.coeffs(), &u)).unwrap_or(3)
            })
            .collect();
        GaussOracle { f: f.clone(), d, chi }
    }

    pub fn modulus(&self) -> &Poly {
        &self.f
    }

    /// Σ_{u mod f} χ_f(u) e_q(uV/f).
    pub fn eval(&self, v: &Poly) -> CycNum {
        let field = self.f.field();
        let m = order_of(field);
        if self.d == 0 {
            return CycNum::one(m);
        }
        let lin = laurent_functional(&self.f, v);
        let q = field.q() as usize;
        let lo_digits = self.d / 2;
        let lo_n = q.pow(lo_digits as u32);
        let table = |digits: std::ops::Range<usize>| -> Vec<Elem> {
            let n = q.pow(digits.len() as u32);
            (0..n)
                .map(|i| {
                    let ds = digits_of(i as u64, field.q(), digits.len());
                    dot(field, &lin[digits.clone()], &ds)
                })
                .collect()
        };
        let lo = table(0..lo_digits);
        let hi = table(lo_digits..self.d);
        let p = field.p() as usize;
        let mut counts = vec![0u64; 4 * p];
        for (j, &h) in hi.iter().enumerate() {
            let base = j * lo_n;
            for (i, &l) in lo.iter().enumerate() {
                let c = self.chi[base + i] as usize;
                counts[c * p + field.trace(field.add(h, l)) as usize] += 1;
            }
        }
        let mut ex = vec![Int::ZERO; m as usize];
        for c in 0..3 {
            for t in 0..p {
                let n = counts[c * p + t];
                if n > 0 {
                    let e = (p * c + 3 * t) % m as usize;
                    ex[e] = &ex[e] + &Int::from(n);
                }
            }
        }
        CycNum::from_exponent_counts(m, &ex)
    }
}

/// G_q(V, f) by its definition; G_q(V, 1) = 1.
pub fn shifted_gauss_sum(iso: &OmegaIso, v: &Poly, f: &Poly) -> CycNum {
    GaussOracle::new(iso, f).eval(v)
}

type TopKey = (u32, Vec<u32>, Vec<Elem>, bool);

/// Exponent histogram of χ_P over M_{deg P − 1}, cached per prime and Ω.
fn top_coefficient_counts(iso: &OmegaIso, p: &Poly) -> [u64; 3] {
    static CACHE: OnceLock<Mutex<HashMap<TopKey, [u64; 3]>>> = OnceLock::new();
    let field = iso.field();
    let key = (field.p(), field.modulus().to_vec(), p.coeffs().to_vec(), iso.is_canonical());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().expect("cache poisoned").get(&key) {
        return *c;
    }
    let mut c = [0u64; 3];
    for g in enumerate_monic(field, p.deg() as usize - 1) {
        if let Some(j) = crate::characters::chi_f_exp(iso, p, &g) {
            c[j as usize] += 1;
        }
    }
    cache.lock().expect("cache poisoned").insert(key, c);
    c
}

/// a_{d−1}(χ_P^k) = Σ_{g ∈ M_{d−1}} χ_P(g)^k.
pub fn prime_top_coefficient(iso: &OmegaIso, p: &Poly, k: u8) -> CycNum {
    let c = top_coefficient_counts(iso, p);
    let mut ex = vec![Int::ZERO; 3];
    for (j, &n) in c.iter().enumerate() {
        let e = j * k as usize % 3;
        ex[e] = &ex[e] + &Int::from(n);
    }
    CycNum::from_exponent_counts(3, &ex)
}

/// G_q(1, P) for the character χ_P^k (k ∈ {1,2}) through its root number:
/// ε ω |P|^{1/2}, which is τ(χ_3^{kd}) a_{d−1} when 3 ∤ d and −q a_{d−1} when 3 | d.
pub fn prime_gauss_via_root_number(iso: &OmegaIso, p: &Poly, k: u8) -> CycNum {
    let field = iso.field();
    let m = order_of(field);
    let d = p.deg() as u64;
    let a = prime_top_coefficient(iso, p, k).embed(m);
    if d % 3 == 0 {
        a.scale(&Int::from(-(field.q() as i64)))
    } else {
        a.mul(&tau(iso, ((k as u64 * d) % 3) as u8))
    }
}

/// G_q(V, P^i) by the prime-power table.
fn prime_power_gauss(iso: &OmegaIso, p: &Poly, i: u32, v: &Poly) -> CycNum {
    let field = iso.field();
    let m = order_of(field);
    let norm = Int::pow_u64(field.q() as u64, p.deg() as u32);
    let (alpha, v1) = if v.is_zero() {
        (u32::MAX, v.clone())
    } else {
        let mut a = 0;
        let mut w = v.clone();
        while let Some(t) = w.div_exact(p) {
            w = t;
            a += 1;
        }
        (a, w)
    };
    if i <= alpha {
        return if i % 3 == 0 {
            CycNum::from_int(m, &norm.pow(i) - &norm.pow(i - 1))
        } else {
            CycNum::zero(m)
        };
    }
    if i == alpha + 1 {
        let scale = norm.pow(i - 1);
        if i % 3 == 0 {
            return CycNum::from_int(m, -scale);
        }
        let k = (i % 3) as u8;
        // χ_{P^i}(V1^{-1}) = χ̄_P(V1)^i
        let sym = crate::characters::chi_f_exp(iso, p, &v1).expect("V1 is prime to P");
        let twist = exp_to_cyc(Some((3 - (sym as u32 * i % 3) as u8) % 3), m);
        return prime_gauss_via_root_number(iso, p, k).mul(&twist).scale(&scale);
    }
    CycNum::zero(m)
}

/// G_q(V, f) from the factorization of f: twisted multiplicativity
/// G(V, f1 f2) = χ̄_{f1}(f2) G(V, f1) G(V, f2) and the prime-power table.
pub fn shifted_gauss_structural(iso: &OmegaIso, v: &Poly, f: &Poly) -> Result<CycNum> {
    StructuralGauss::new(iso, f)?.eval(v)
}

/// The structural evaluator with the factorization of f computed once.
pub struct StructuralGauss {
    iso: OmegaIso,
    factors: Vec<(Poly, u32)>,
    cross: CubeExp,
}

impl StructuralGauss {
    pub fn new(iso: &OmegaIso, f: &Poly) -> Result<StructuralGauss> {
        if iso.field().q() % 6 != 1 {
            return Err(Error::InvalidField(format!("structural Gauss sums need q ≡ 1 mod 6, got {}", iso.field().q())));
        }
        if !f.is_monic() {
            return Err(Error::Domain(format!("{f} is not monic")));
        }
        let factors = factor_monic(f);
        let mut cross = Some(0u8);
        for a in 0..factors.len() {
            for b in a + 1..factors.len() {
                let s = iso.chi3_exp(factors[a].0.resultant(&factors[b].0)).expect("distinct primes are coprime");
                let e = (s as u32 * factors[a].1 * factors[b].1 % 3) as u8;
                cross = mul_exp(cross, conj_exp(Some(e)));
            }
        }
        Ok(StructuralGauss { iso: iso.clone(), factors, cross })
    }

    pub fn eval(&self, v: &Poly) -> Result<CycNum> {
        let m = order_of(self.iso.field());
        let mut acc = exp_to_cyc(self.cross, m);
        for (p, i) in &self.factors {
            let g = prime_power_gauss(&self.iso, p, *i, v);
            if g.is_zero() {
                return Ok(CycNum::zero(m));
            }
            acc = acc.mul(&g);
        }
        Ok(acc)
    }
}

/// The unit u(B) with G_q(1, B) = u(B) τ(χ_3)^{deg B} for monic B, or `None`
/// when B is not squarefree (then G_q(1, B) = 0): u(B) = λ(D) χ_3(R) with
/// R = Res(B, B'), D = (−1)^{n(n−1)/2} R, λ the quadratic character.
/// Returned as (sign, ξ_3-exponent).
#[inline]
pub fn gauss_one_unit(iso: &OmegaIso, b: &[Elem]) -> Option<(bool, u8)> {
    let field = iso.field();
    let n = b.len() - 1;
    if n == 0 {
        return Some((false, 0));
    }
    let db: Vec<Elem> = (1..=n).map(|k| field.mul(field.from_int(k as i64), b[k])).collect();
    let mut db = db;
    while db.last() == Some(&0) {
        db.pop();
    }
    let r = resultant_raw(field, b, &db);
    if r == 0 {
        return None;
    }
    let l = field.log(r);
    let mut neg = l % 2 == 1;
    if (n * (n - 1) / 2) % 2 == 1 && (field.q() - 1) % 4 == 2 {
        neg = !neg;
    }
    Some((neg, iso.chi3_exp(r).expect("r ≠ 0")))
}

/// G_q(1, B) in closed form: λ(D) χ_3(Res(B, B')) τ(χ_3)^{deg B}.
pub fn gauss_one_closed(iso: &OmegaIso, b: &Poly) -> CycNum {
    let m = order_of(iso.field());
    match gauss_one_unit(iso, b.coeffs()) {
        None => CycNum::zero(m),
        Some((neg, k)) => {
            let t = tau(iso, 1).pow(b.deg() as u32);
            let u = exp_to_cyc(Some(k), m);
            let v = t.mul(&u);
            if neg {
                v.neg()
            } else {
                v
            }
        }
    }
}

/// G(χ) = Σ_{a mod h} χ(a) e_q(a/h), by definition.
pub fn full_gauss_sum(chi: &CubicCharacter) -> CycNum {
    let one = Poly::one(chi.field());
    character_sum_with_shift(&chi.conductor, &one, |a| chi.eval_exp(a))
}

/// For non-Kummer χ_F: G_{q²}(1, F), computed over F_{q²}.
pub fn non_kummer_gauss(chi: &CubicCharacter) -> Option<CycNum> {
    match &chi.kind {
        CharacterKind::NonKummer { f, .. } => Some(shifted_gauss_sum(&chi.omega, &Poly::one(f.field()), f)),
        CharacterKind::Kummer { .. } => None,
    }
}

/// The root number ω(χ) of the functional equation.
#[derive(Clone, Debug, PartialEq)]
pub struct RootNumber {
    pub value: HalfPowNum,
    pub parity_branch: Parity,
}

/// ω(χ) from the top coefficient a_{deg h − 1}: q^{−(deg h−1)/2} a for odd χ,
/// −q^{−(deg h−2)/2} a for even χ.
pub fn root_number_from_top(chi: &CubicCharacter, top: &CycNum) -> HalfPowNum {
    let q = chi.q() as u64;
    let h = chi.conductor_degree() as i64;
    let m = order_of(chi.field());
    let a = HalfPowNum::from_cyc(q, top.embed(m));
    match chi.parity {
        Parity::Odd => a.mul(&HalfPowNum::q_pow_half(q, -(h - 1), m)),
        Parity::Even => a.mul(&HalfPowNum::q_pow_half(q, -(h - 2), m)).neg(),
    }
}

/// ω(χ) from G(χ): τ^{−1} q^{−(deg h−1)/2} G(χ) for odd χ, q^{−deg h/2} G(χ) for even χ.
pub fn root_number_from_gauss(chi: &CubicCharacter, g: &CycNum) -> HalfPowNum {
    let q = chi.q() as u64;
    let h = chi.conductor_degree() as i64;
    let m = order_of(chi.field());
    let gh = HalfPowNum::from_cyc(q, g.clone());
    match chi.parity {
        Parity::Odd => {
            // τ^{-1} = τ̄ / q
            let tinv = tau_restriction(chi).conj().scale_ratio(&Int::ONE, &Int::from(q));
            gh.mul_cyc(&tinv).mul(&HalfPowNum::q_pow_half(q, -(h - 1), m))
        }
        Parity::Even => gh.mul(&HalfPowNum::q_pow_half(q, -h, m)),
    }
}

/// a_{deg h − 1} = Σ_{f ∈ M_{deg h − 1}} χ(f), by enumeration.
pub fn top_coefficient(chi: &CubicCharacter) -> CycNum {
    let mut c = [0u64; 3];
    for f in enumerate_monic(chi.field(), chi.conductor_degree() - 1) {
        if let Some(j) = chi.eval_exp(&f) {
            c[j as usize] += 1;
        }
    }
    CycNum::from_exponent_counts(3, &c.iter().map(|&x| Int::from(x)).collect::<Vec<_>>())
}

/// ω(χ) computed through both routes, which must agree exactly; |ω| = 1 is asserted.
pub fn root_number(chi: &CubicCharacter) -> Result<RootNumber> {
    let by_top = root_number_from_top(chi, &top_coefficient(chi));
    let by_gauss = root_number_from_gauss(chi, &full_gauss_sum(chi));
    if by_top != by_gauss {
        return Err(Error::Consistency(format!(
            "root number routes disagree for {:?}: {} vs {}",
            chi.descriptor(),
            by_top,
            by_gauss
        )));
    }
    let m = order_of(chi.field());
    if by_top.mul(&by_top.conj()) != HalfPowNum::one(chi.q() as u64, m) {
        return Err(Error::Consistency(format!("|ω| ≠ 1 for {:?}", chi.descriptor())));
    }
    Ok(RootNumber { value: by_top, parity_branch: chi.parity })
}

/// Both sides of Poisson summation for Σ_{h ∈ M_m} χ_f(h), monic f.
pub fn poisson_sides(iso: &OmegaIso, f: &Poly, m: usize) -> (CycNum, CycNum) {
    let oracle = GaussOracle::new(iso, f);
    poisson_sides_with(iso, &oracle, m)
}

/// As [`poisson_sides`], reusing a prepared oracle for f.
pub fn poisson_sides_with(iso: &OmegaIso, oracle: &GaussOracle, m: usize) -> (CycNum, CycNum) {
    let f = oracle.modulus();
    let field = f.field();
    let ord = order_of(field);
    let n = f.deg() as usize;
    let mut lhs = [0u64; 3];
    for h in enumerate_monic(field, m) {
        if let Some(j) = crate::characters::chi_f_exp(iso, f, &h) {
            lhs[j as usize] += 1;
        }
    }
    let lhs = CycNum::from_exponent_counts(3, &lhs.iter().map(|&x| Int::from(x)).collect::<Vec<_>>()).embed(ord);
    let sum_deg = |d: usize| -> CycNum {
        enumerate_monic(field, d).fold(CycNum::zero(ord), |acc, v| acc.add(&oracle.eval(&v)))
    };
    let boundary = if n >= m + 1 { sum_deg(n - m - 1) } else { CycNum::zero(ord) };
    let q = Int::from(field.q() as u64);
    let prefactor = |x: CycNum| x.scale_ratio(&q.pow(m as u32), &q.pow(n as u32));
    let rhs = if n % 3 == 0 {
        let mut short = CycNum::zero(ord);
        if n >= m + 2 {
            for d in 0..=n - m - 2 {
                short = short.add(&sum_deg(d));
            }
        }
        let g0 = oracle.eval(&Poly::zero(field));
        prefactor(g0.add(&short.scale(&Int::from(field.q() as i64 - 1))).sub(&boundary))
    } else {
        let tbar = tau(iso, (n % 3) as u8).conj();
        prefactor(tbar.mul(&boundary))
    };
    (lhs, rhs)
}

pub fn poisson_check(iso: &OmegaIso, f: &Poly, m: usize) -> bool {
    let (l, r) = poisson_sides(iso, f, m);
    l == r
}

/// G_{q²}(1, f) for f ∈ F_q[T], computed in F_{q²}[T].
pub fn gauss_over_extension(ext: &QuadraticExtension, f: &Poly) -> Result<CycNum> {
    let iso = OmegaIso::canonical(&ext.ext)?;
    let lifted = f.map_coeffs(&ext.ext, |a| ext.embed(a));
    Ok(shifted_gauss_sum(&iso, &Poly::one(&ext.ext), &lifted))
}

/// Whether G_{q²}(1, f) = q^{deg f}.
pub fn no_oscillation_check(ext: &QuadraticExtension, f: &Poly) -> Result<bool> {
    let g = gauss_over_extension(ext, f)?;
    let expect = CycNum::from_int(g.order(), Int::pow_u64(ext.base.q() as u64, f.deg() as u32));
    Ok(g == expect)
}

/// Shared τ(χ_3) per field and Ω, for hot loops.
pub fn tau_cached(iso: &OmegaIso) -> Arc<CycNum> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, Vec<u32>, bool), Arc<CycNum>>>> = OnceLock::new();
    let field = iso.field();
    let key = (field.p(), field.modulus().to_vec(), iso.is_canonical());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut g = cache.lock().expect("cache poisoned");
    g.entry(key).or_insert_with(|| Arc::new(tau(iso, 1))).clone()
}
