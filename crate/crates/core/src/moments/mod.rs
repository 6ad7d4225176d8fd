//! Character counts, Euler-product constants, the sieve identity and
//! brute-force first moments of L(1/2, χ).
//!
//! Every constant is a truncated Euler product over monic primes of F_q[T]
//! ([`EulerProductSpec`]); derivatives are taken per factor, never by finite
//! differences. Exact moments live in [`brute`].

pub mod brute;
mod euler;

pub use brute::{brute_force_moment, BlockResult, MomentOptions, MomentReport, RuntimeInfo};
pub use euler::{ln_1p, prime_count, EulerProductSpec, DEFAULT_TRUNCATION};

use crate::characters::{chi_f_exp, squarefree_monic, OmegaIso, Setting};
use crate::ffpoly::{enumerate_monic, factor_monic, mobius, FieldSpec, Poly};
use crate::lfunctions::Eis;
use crate::{ComplexApprox, Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// ξ_3 = e^{2πi/3} as a float.
pub fn xi3() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// ζ_q(s) = 1/(1 − q^{1−s}).
pub fn zeta_q(q: u64, s: f64) -> f64 {
    1.0 / (1.0 - (q as f64).powf(1.0 - s))
}

fn check_setting(q: u64, setting: Setting) -> Result<()> {
    let ok = match setting {
        Setting::Kummer => q % 3 == 1,
        Setting::NonKummer => q % 3 == 2,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidField(format!("q = {q} does not fit the {setting} setting")))
    }
}

// ---------------------------------------------------------------------------
// Counting primitive characters

/// Exact and asymptotic number of primitive cubic characters of conductor degree d.
#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveCount {
    pub setting: Setting,
    pub q: u32,
    pub degree: usize,
    pub exact: u64,
    pub asymptotic: ComplexApprox,
}

impl PrimitiveCount {
    /// exact / asymptotic, or 1 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.asymptotic.re == 0.0 {
            if self.exact == 0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.exact as f64 / self.asymptotic.re
        }
    }
}

/// Σ 2^{ω(F)} over squarefree monic F of degree d (non-Kummer: only F whose
/// primes all have even degree). Covers every restriction class.
pub fn count_primitive_exact(field: &FieldSpec, setting: Setting, d: usize) -> Result<u64> {
    check_setting(field.q() as u64, setting)?;
    let mut total = 0u64;
    for f in enumerate_monic(field, d) {
        let fs = factor_monic(&f);
        if fs.iter().any(|&(_, e)| e > 1) {
            continue;
        }
        if setting == Setting::NonKummer && fs.iter().any(|(p, _)| p.deg() % 2 == 1) {
            continue;
        }
        total += 1u64 << fs.len();
    }
    Ok(total)
}

/// F_K(u) = Π_P (1 − 3u^{2d} + 2u^{3d}).
pub fn f_k(q: u64, u: f64, truncation: usize) -> EulerProductSpec {
    EulerProductSpec::new(q, truncation, move |d| c(-3.0 * u.powi(2 * d as i32) + 2.0 * u.powi(3 * d as i32)))
}

fn f_k_delta_prime(u: f64, d: usize) -> Complex64 {
    let d = d as i32;
    c(-6.0 * d as f64 * u.powi(2 * d - 1) + 6.0 * d as f64 * u.powi(3 * d - 1))
}

/// F_nK(u) = Π_{2 | d}(1 − 3u^{2d} + 2u^{3d}) Π_{2 ∤ d}(1 − u^{2d}).
pub fn f_nk(q: u64, u: f64, truncation: usize) -> EulerProductSpec {
    EulerProductSpec::new(q, truncation, move |d| {
        if d % 2 == 0 {
            c(-3.0 * u.powi(2 * d as i32) + 2.0 * u.powi(3 * d as i32))
        } else {
            c(-u.powi(2 * d as i32))
        }
    })
}

/// (F_K(1/q), F_K'(1/q)), the derivative by per-factor logarithmic differentiation.
pub fn f_k_with_derivative(q: u64, truncation: usize) -> (ComplexApprox, ComplexApprox) {
    let u = 1.0 / q as f64;
    f_k(q, u, truncation).evaluate_with_derivative(|d| f_k_delta_prime(u, d))
}

/// F_K'(1/q) analytically and by a central difference with step 10⁻⁶.
pub fn f_k_derivative_check(q: u64, truncation: usize) -> (ComplexApprox, f64) {
    let (_, analytic) = f_k_with_derivative(q, truncation);
    let h = 1e-6;
    let u = 1.0 / q as f64;
    let fd = (f_k(q, u + h, truncation).evaluate().re - f_k(q, u - h, truncation).evaluate().re) / (2.0 * h);
    (analytic, fd)
}

/// N_K(d) ≈ B_{K,1} d q^d + B_{K,2} q^d; N_nK(d) ≈ B_nK q^d for even d, 0 for odd d.
pub fn count_primitive_asymptotic(q: u64, setting: Setting, d: usize, truncation: usize) -> Result<ComplexApprox> {
    check_setting(q, setting)?;
    let qd = (q as f64).powi(d as i32);
    Ok(match setting {
        Setting::Kummer => {
            let (f, fp) = f_k_with_derivative(q, truncation);
            let b1 = f;
            let b2 = f.sub(&fp.scale(1.0 / q as f64));
            b1.scale(d as f64 * qd).add(&b2.scale(qd))
        }
        Setting::NonKummer if d % 2 == 1 => ComplexApprox::real(0.0, 0.0),
        Setting::NonKummer => f_nk(q, 1.0 / q as f64, truncation).evaluate().scale(qd),
    })
}

pub fn count_primitive(field: &FieldSpec, setting: Setting, d: usize) -> Result<PrimitiveCount> {
    if d == 0 {
        return Err(Error::Domain("conductor degree must be positive".into()));
    }
    Ok(PrimitiveCount {
        setting,
        q: field.q(),
        degree: d,
        exact: count_primitive_exact(field, setting, d)?,
        asymptotic: count_primitive_asymptotic(field.q() as u64, setting, d, DEFAULT_TRUNCATION)?,
    })
}

// ---------------------------------------------------------------------------
// The non-Kummer constants

/// A_nK(x, u): per prime R, 1/(1 + x^d) for odd d and
/// (1 + 2x^{d/2}(1 − u^d))/(1 + x^{d/2})² for even d.
pub fn a_nk_spec(q: u64, x: f64, u: f64, truncation: usize) -> Result<EulerProductSpec> {
    let qf = q as f64;
    if !(x >= 0.0) || qf * x >= 1.0 || qf * x.sqrt() * u.abs() >= 1.0 {
        return Err(Error::Domain(format!("A_nK diverges at (x, u) = ({x}, {u}) for q = {q}")));
    }
    Ok(EulerProductSpec::new(q, truncation, move |d| {
        if d % 2 == 1 {
            let xd = x.powi(d as i32);
            c(-xd / (1.0 + xd))
        } else {
            let s = x.powi(d as i32 / 2);
            let ud = u.powi(d as i32);
            c((-2.0 * s * ud - s * s) / ((1.0 + s) * (1.0 + s)))
        }
    }))
}

pub fn constant_a_nk(q: u64, x: f64, u: f64) -> Result<ComplexApprox> {
    Ok(a_nk_spec(q, x, u, DEFAULT_TRUNCATION)?.evaluate())
}

/// Π_odd(1 − 1/(|R|²+1)) Π_even(1 − 1/(|R|+1)² − 2/(|R|^{1/2}(|R|+1)²)) = A_nK(1/q², q^{−3/2}).
pub fn a_nk_closed_form_three_halves(q: u64, truncation: usize) -> ComplexApprox {
    EulerProductSpec::new(q, truncation, move |d| {
        let r = (q as f64).powi(d as i32);
        if d % 2 == 1 {
            c(-1.0 / (r * r + 1.0))
        } else {
            let s = (r + 1.0) * (r + 1.0);
            c(-1.0 / s - 2.0 / (r.sqrt() * s))
        }
    })
    .evaluate()
}

/// Π_odd(1 − 1/(|R|²+1)) Π_even(1 − 3/(|R|+1)²) = A_nK(1/q², 1/q).
pub fn a_nk_closed_form_one(q: u64, truncation: usize) -> ComplexApprox {
    EulerProductSpec::new(q, truncation, move |d| {
        let r = (q as f64).powi(d as i32);
        if d % 2 == 1 {
            c(-1.0 / (r * r + 1.0))
        } else {
            c(-3.0 / ((r + 1.0) * (r + 1.0)))
        }
    })
    .evaluate()
}

/// δ of the K_nK(u) = B_nK(u, 1)·J_nK(1) factor at a prime of degree d, taken
/// definitionally: B_nK's factor is the H_nK factor times (1 − (u q^{−5/6})^d),
/// the latter removing Z_q(u q^{−5/6}).
pub fn knk_delta(q: u64, u: f64, w: f64, d: usize) -> f64 {
    let qf = q as f64;
    let r = qf.powi(d as i32);
    let ud = u.powi(d as i32);
    let u3d = ud * ud * ud;
    let wd = w.powi(d as i32);
    let r32 = r.powf(1.5);
    let t1 = ud / (r.powf(5.0 / 6.0) * (1.0 - u3d / r32));
    let t2 = u3d / (r32 - u3d);
    // C_R(w) = 1 + |R|^{−2} − w^d |R|^{−2}; D_R(w) = (1 + |R|^{−1})² − w^d |R|^{−2}
    let denom = if d % 2 == 1 { 1.0 + (1.0 - wd) / (r * r) } else { (1.0 + 1.0 / r).powi(2) - wd / (r * r) };
    let a = -(u / qf.powf(5.0 / 6.0)).powi(d as i32);
    let b = (t1 + t2) / denom;
    let j = if d % 2 == 1 { -wd / (r * r + 1.0) } else { -wd / ((r + 1.0) * (r + 1.0)) };
    a + b + j + a * b + a * j + b * j + a * b * j
}

/// K_nK(q^{−1/6}) from its definitional factors.
pub fn knk_at_point(q: u64, truncation: usize) -> ComplexApprox {
    let u = (q as f64).powf(-1.0 / 6.0);
    EulerProductSpec::new(q, truncation, move |d| c(knk_delta(q, u, 1.0, d))).evaluate()
}

/// K_nK(q^{−1/6}) against A_nK(1/q², 1/q).
#[derive(Clone, Debug, Serialize)]
pub struct KnkCheck {
    pub q: u64,
    pub knk: ComplexApprox,
    pub ank: ComplexApprox,
    pub holds: bool,
}

pub fn knk_equals_ank_check(q: u64) -> Result<KnkCheck> {
    check_setting(q, Setting::NonKummer)?;
    let knk = knk_at_point(q, DEFAULT_TRUNCATION);
    let qf = q as f64;
    let ank = constant_a_nk(q, 1.0 / (qf * qf), 1.0 / qf)?;
    Ok(KnkCheck { q, knk, ank, holds: knk.overlaps(&ank) })
}

// ---------------------------------------------------------------------------
// The Kummer constants

/// One monomial c·(x^a y^b u^e)^{deg P}·|P|^{−3s/2} of the D_K factor.
struct Monomial {
    coef: f64,
    x: i32,
    y: i32,
    u: i32,
    s: i32,
}

const fn m(coef: f64, x: i32, y: i32, u: i32, s: i32) -> Monomial {
    Monomial { coef, x, y, u, s }
}

/// The factor of D_K minus one.
const D_K_MONOMIALS: [Monomial; 12] = [
    m(-1.0, 2, 0, 0, 0),
    m(-1.0, 0, 2, 0, 0),
    m(-1.0, 1, 1, 0, 0),
    m(1.0, 2, 1, 0, 0),
    m(1.0, 1, 2, 0, 0),
    m(-1.0, 1, 0, 1, 1),
    m(-1.0, 0, 1, 1, 1),
    m(1.0, 2, 0, 1, 1),
    m(1.0, 0, 2, 1, 1),
    m(2.0, 1, 1, 1, 1),
    m(-1.0, 2, 1, 1, 1),
    m(-1.0, 1, 2, 1, 1),
];

fn powc(z: Complex64, k: i32) -> Complex64 {
    if k == 0 {
        c(1.0)
    } else {
        z.powi(k)
    }
}

/// δ of D_K(x, y, u) at a prime of degree d.
pub fn d_k_delta(q: u64, x: Complex64, y: Complex64, u: Complex64, d: usize) -> Complex64 {
    let di = d as i32;
    let r32 = (q as f64).powf(1.5 * d as f64);
    D_K_MONOMIALS
        .iter()
        .map(|t| {
            let v = powc(x, t.x * di) * powc(y, t.y * di) * powc(u, t.u * di) * t.coef;
            if t.s == 1 {
                v / r32
            } else {
                v
            }
        })
        .sum()
}

/// D_K(x, y, u) = Π_P (1 + (x^d + y^d)(1 − u^d |P|^{−3/2}))(1 − x^d)(1 − y^d), expanded.
pub fn d_k_spec(q: u64, x: Complex64, y: Complex64, u: Complex64, truncation: usize) -> EulerProductSpec {
    EulerProductSpec::new(q, truncation, move |d| d_k_delta(q, x, y, u, d))
}

/// (D_K(x, x, u), d/dx D_K(x, x, u)) for real x.
pub fn d_k_diagonal(q: u64, x: f64, u: Complex64, truncation: usize) -> (ComplexApprox, ComplexApprox) {
    let spec = d_k_spec(q, c(x), c(x), u, truncation);
    spec.evaluate_with_derivative(|d| {
        let di = d as i32;
        let r32 = (q as f64).powf(1.5 * d as f64);
        D_K_MONOMIALS
            .iter()
            .map(|t| {
                let k = (t.x + t.y) * di;
                let v = powc(u, t.u * di) * (t.coef * k as f64 * x.powi(k - 1));
                if t.s == 1 {
                    v / r32
                } else {
                    v
                }
            })
            .sum()
    })
}

/// The constants of the Kummer first moment for a given genus (C_{K,2} and
/// D_{K,2} depend on g mod 3).
#[derive(Clone, Debug, Serialize)]
pub struct KummerConstants {
    pub q: u64,
    pub g: usize,
    pub c_k1: ComplexApprox,
    pub c_k2: ComplexApprox,
    pub d_k1: ComplexApprox,
    pub d_k2: ComplexApprox,
}

impl KummerConstants {
    /// C_{K,1} g q^{g+1} + C_{K,2} q^{g+1}.
    pub fn main_term(&self) -> ComplexApprox {
        let qg = (self.q as f64).powi(self.g as i32 + 1);
        self.c_k1.scale(self.g as f64 * qg).add(&self.c_k2.scale(qg))
    }
}

fn approx(z: Complex64) -> ComplexApprox {
    ComplexApprox::exact(z.re, z.im)
}

/// [D/3 · (first), bracket] at one value of u: returns (D(1/q,1/q,u)/3, bracket(u)) where
/// bracket = 2D/3 − D'/(3q) − D(1/q, ξ/q, u)ξ^{g+1}/(3(1−ξ)) − D(ξ²/q, 1/q, u)ξ^{2g+2}/(3(1−ξ²)).
fn kummer_brackets(q: u64, g: usize, u: Complex64, truncation: usize) -> (ComplexApprox, ComplexApprox) {
    let qf = q as f64;
    let xi = xi3();
    let one = c(1.0);
    let (d0, dp) = d_k_diagonal(q, 1.0 / qf, u, truncation);
    let d1 = d_k_spec(q, c(1.0 / qf), xi / qf, u, truncation).evaluate();
    let d2 = d_k_spec(q, xi * xi / qf, c(1.0 / qf), u, truncation).evaluate();
    let k1 = approx(xi.powi(g as i32 + 1) / ((one - xi) * 3.0));
    let k2 = approx(xi.powi(2 * g as i32 + 2) / ((one - xi * xi) * 3.0));
    let bracket = d0.scale(2.0 / 3.0).sub(&dp.scale(1.0 / (3.0 * qf))).sub(&d1.mul(&k1)).sub(&d2.mul(&k2));
    (d0.scale(1.0 / 3.0), bracket)
}

pub fn constants_kummer(q: u64, g: usize) -> Result<KummerConstants> {
    constants_kummer_with(q, g, DEFAULT_TRUNCATION)
}

pub fn constants_kummer_with(q: u64, g: usize, truncation: usize) -> Result<KummerConstants> {
    check_setting(q, Setting::Kummer)?;
    let z32 = zeta_q(q, 1.5);
    let z12 = zeta_q(q, 0.5);
    let (a1, b1) = kummer_brackets(q, g, c(1.0), truncation);
    let (a2, b2) = kummer_brackets(q, g, c((q as f64).sqrt()), truncation);
    Ok(KummerConstants {
        q,
        g,
        c_k1: a1.scale(z32),
        c_k2: b1.scale(z32),
        d_k1: a2.scale(z12),
        d_k2: b2.scale(z12),
    })
}

/// ζ_q(3/2)/ζ_q(3) · A_nK(1/q², q^{−3/2}) · q^{g+2}.
pub fn main_term_non_kummer(q: u64, g: usize) -> Result<ComplexApprox> {
    check_setting(q, Setting::NonKummer)?;
    let qf = q as f64;
    let a = constant_a_nk(q, 1.0 / (qf * qf), qf.powf(-1.5))?;
    Ok(a.scale(zeta_q(q, 1.5) / zeta_q(q, 3.0) * qf.powi(g as i32 + 2)))
}

// ---------------------------------------------------------------------------
// The sieve identity

/// Both sides of the sieve identity for Σ_{F1 ∈ H_{d1}, F2 ∈ H_{d2}, (F1,F2)=1} χ_f(F1)χ̄_f(F2):
/// the direct sum and the nested Möbius sums over H, R_i | H, D_i coprime to H, L_i.
pub fn sieve_sides(iso: &OmegaIso, f: &Poly, d1: usize, d2: usize) -> Result<(Eis, Eis)> {
    let field = iso.field();
    if f.field() != field || !f.is_monic() {
        return Err(Error::Domain("f must be monic over the field of Ω".into()));
    }
    let chi = |a: &Poly| Eis::from_exp(chi_f_exp(iso, f, a));
    let sq = |e: Eis| e.mul(e);

    let mut lhs = Eis::ZERO;
    let h1 = squarefree_monic(field, d1);
    let h2 = squarefree_monic(field, d2);
    for a in &h1 {
        let ca = chi(a);
        for b in &h2 {
            if a.is_coprime(b) {
                lhs = lhs.add(ca.mul(chi(b).conj()));
            }
        }
    }

    // S(m) = Σ_{L ∈ M_m} χ_f(L)
    let top = d1.max(d2);
    let s: Vec<Eis> = (0..=top).map(|k| enumerate_monic(field, k).fold(Eis::ZERO, |acc, l| acc.add(chi(&l)))).collect();
    let sqfree: Vec<Vec<Poly>> = (0..=top / 2).map(|k| squarefree_monic(field, k)).collect();
    // Σ_{D ∈ M_{≤ lim/2}, (D,H)=1} μ(D) w(D) S'(lim − 2 deg D)
    let d_sum = |hpoly: &Poly, lim: usize, w: &dyn Fn(&Poly) -> Eis, tail: &dyn Fn(usize) -> Eis| {
        let mut acc = Eis::ZERO;
        for e in 0..=lim / 2 {
            for dp in &sqfree[e] {
                if dp.is_coprime(hpoly) {
                    acc = acc.add(w(dp).mul(tail(lim - 2 * e)).scale(mobius(dp) as i128));
                }
            }
        }
        acc
    };

    let mut rhs = Eis::ZERO;
    for h in 0..=d1.min(d2) {
        for hp in squarefree_monic(field, h) {
            if !hp.is_coprime(f) {
                continue;
            }
            let primes: Vec<Poly> = factor_monic(&hp).into_iter().map(|(p, _)| p).collect();
            let divisors: Vec<(Poly, usize, i128)> = (0..1u32 << primes.len())
                .map(|mask| {
                    let mut r = Poly::one(field);
                    let mut k = 0;
                    for (i, p) in primes.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            r = r.mul(p);
                            k += 1;
                        }
                    }
                    let deg = r.deg() as usize;
                    (r, deg, if k % 2 == 0 { 1 } else { -1 })
                })
                .collect();
            let mu_h = mobius(&hp) as i128;
            for (r1, e1, mu1) in &divisors {
                if h + e1 > d1 {
                    continue;
                }
                let a1 = d_sum(&hp, d1 - h - e1, &|dp| sq(chi(dp)), &|k| s[k]);
                let w1 = chi(r1).scale(*mu1);
                for (r2, e2, mu2) in &divisors {
                    if h + e2 > d2 {
                        continue;
                    }
                    let a2 = d_sum(&hp, d2 - h - e2, &|dp| chi(dp), &|k| s[k].conj());
                    let w2 = sq(chi(r2)).scale(*mu2);
                    rhs = rhs.add(w1.mul(w2).mul(a1).mul(a2).scale(mu_h));
                }
            }
        }
    }
    Ok((lhs, rhs))
}

/// Whether the two sides of the sieve identity agree exactly.
pub fn sieve_identity_check(iso: &OmegaIso, f: &Poly, d1: usize, d2: usize) -> Result<bool> {
    let (l, r) = sieve_sides(iso, f, d1, d2)?;
    Ok(l == r)
}

#[cfg(test)]
mod tests;
