//! The L-polynomial 𝓛_q(u, χ) = Σ_{n < deg h} a_n u^n, its functional
//! equation, the approximate functional equation and the central value
//! L(1/2, χ) = 𝓛_q(q^{−1/2}, χ).
//!
//! Coefficients lie in Z[ξ_3]; central values are held exactly as
//! `even + odd·q^{−1/2}` over Q(ξ_3).

use crate::characters::{CubicCharacter, CubeExp, Parity};
use crate::cyclotomic::{CycNum, HalfPowNum, Int};
use crate::ffpoly::{enumerate_monic, irreducibles};
use crate::gauss::RootNumber;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

/// a + b·ξ_3 with overflow-checked i128 parts; the hot-loop form of Z[ξ_3].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Eis {
    pub a: i128,
    pub b: i128,
}

impl Eis {
    pub const ZERO: Eis = Eis { a: 0, b: 0 };
    pub const ONE: Eis = Eis { a: 1, b: 0 };

    /// ξ_3^k.
    pub fn root(k: u8) -> Eis {
        match k % 3 {
            0 => Eis { a: 1, b: 0 },
            1 => Eis { a: 0, b: 1 },
            _ => Eis { a: -1, b: -1 },
        }
    }

    pub fn from_exp(e: CubeExp) -> Eis {
        e.map_or(Eis::ZERO, Eis::root)
    }

    #[inline]
    pub fn add(self, o: Eis) -> Eis {
        Eis { a: self.a.checked_add(o.a).expect("Z[ξ_3] overflow"), b: self.b.checked_add(o.b).expect("Z[ξ_3] overflow") }
    }

    #[inline]
    pub fn sub(self, o: Eis) -> Eis {
        self.add(o.neg())
    }

    #[inline]
    pub fn neg(self) -> Eis {
        Eis { a: -self.a, b: -self.b }
    }

    /// (a + bξ)(c + dξ) = (ac − bd) + (ad + bc − bd)ξ, using ξ² = −1 − ξ.
    #[inline]
    pub fn mul(self, o: Eis) -> Eis {
        let m = |x: i128, y: i128| x.checked_mul(y).expect("Z[ξ_3] overflow");
        let bd = m(self.b, o.b);
        Eis { a: m(self.a, o.a) - bd, b: m(self.a, o.b) + m(self.b, o.a) - bd }
    }

    #[inline]
    pub fn scale(self, k: i128) -> Eis {
        Eis { a: self.a.checked_mul(k).expect("Z[ξ_3] overflow"), b: self.b.checked_mul(k).expect("Z[ξ_3] overflow") }
    }

    /// Multiplication by ξ_3^k.
    #[inline]
    pub fn mul_root(self, k: u8) -> Eis {
        match k % 3 {
            0 => self,
            // ξ(a + bξ) = −b + (a − b)ξ
            1 => Eis { a: -self.b, b: self.a - self.b },
            _ => Eis { a: self.b - self.a, b: -self.a },
        }
    }

    /// a + bξ̄ = (a − b) − bξ.
    pub fn conj(self) -> Eis {
        Eis { a: self.a - self.b, b: -self.b }
    }

    pub fn to_cyc(self) -> CycNum {
        CycNum::from_exponent_counts(3, &[Int::from(self.a), Int::from(self.b), Int::ZERO])
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.a as f64 - 0.5 * self.b as f64, self.b as f64 * 3f64.sqrt() / 2.0)
    }
}

/// 𝓛_q(u, χ) with exact coefficients a_0, …, a_{deg h − 1}.
#[derive(Clone, Debug)]
pub struct LPolynomial {
    pub chi: CubicCharacter,
    pub coeffs: Vec<CycNum>,
}

/// L(1/2, χ) as an element of Q(ξ_3)[q^{−1/2}].
#[derive(Clone, Debug, PartialEq)]
pub struct CentralValue {
    pub value: HalfPowNum,
}

/// deg h = g + 1 for odd χ and g + 2 for even χ.
pub fn genus_of(chi: &CubicCharacter) -> usize {
    let h = chi.conductor_degree();
    match chi.parity {
        Parity::Odd => h - 1,
        Parity::Even => h - 2,
    }
}

/// a_n = Σ_{f ∈ M_n} χ(f) for n < deg h, by enumeration.
pub fn l_polynomial(chi: &CubicCharacter) -> LPolynomial {
    let coeffs = (0..chi.conductor_degree())
        .map(|n| {
            let mut c = [0u64; 3];
            for f in enumerate_monic(chi.field(), n) {
                if let Some(j) = chi.eval_exp(&f) {
                    c[j as usize] += 1;
                }
            }
            CycNum::from_exponent_counts(3, &c.iter().map(|&x| Int::from(x)).collect::<Vec<_>>())
        })
        .collect();
    LPolynomial { chi: chi.clone(), coeffs }
}

/// Coefficients up to degree `len − 1` of Π_P (1 − χ(P) u^{deg P})^{−1}, given per
/// degree d the numbers `counts[d][j]` of primes of degree d with χ(P) = ξ_3^j.
pub fn euler_coefficients(counts: &[[u64; 3]], len: usize) -> Vec<Eis> {
    let mut acc = vec![Eis::ZERO; len];
    if len == 0 {
        return acc;
    }
    acc[0] = Eis::ONE;
    for (d, c) in counts.iter().enumerate() {
        if d == 0 || d >= len {
            continue;
        }
        for (j, &n) in c.iter().enumerate() {
            if n == 0 {
                continue;
            }
            // (1 − x)^{−n} = Σ_k C(n+k−1, k) x^k with x = ξ^j u^d
            let kmax = (len - 1) / d;
            let mut binom = vec![1i128; kmax + 1];
            for k in 1..=kmax {
                binom[k] = binom[k - 1] * (n as i128 + k as i128 - 1) / k as i128;
            }
            let mut next = vec![Eis::ZERO; len];
            for (e, &a) in acc.iter().enumerate() {
                if a == Eis::ZERO {
                    continue;
                }
                for (k, &bk) in binom.iter().enumerate() {
                    let t = e + k * d;
                    if t >= len {
                        break;
                    }
                    next[t] = next[t].add(a.mul_root(((j * k) % 3) as u8).scale(bk));
                }
            }
            acc = next;
        }
    }
    acc
}

/// 𝓛_q(u, χ) through the Euler product over primes of degree < deg h.
pub fn l_polynomial_euler(chi: &CubicCharacter) -> LPolynomial {
    let h = chi.conductor_degree();
    let mut counts = vec![[0u64; 3]; h];
    for (d, c) in counts.iter_mut().enumerate().skip(1) {
        for p in irreducibles(chi.field(), d).iter() {
            if let Some(j) = chi.eval_exp(p) {
                c[j as usize] += 1;
            }
        }
    }
    let coeffs = euler_coefficients(&counts, h).into_iter().map(Eis::to_cyc).collect();
    LPolynomial { chi: chi.clone(), coeffs }
}

/// Σ_n c_n q^{−n/2} for Z[ξ_3] coefficients.
pub fn half_sum(q: u64, coeffs: &[Eis]) -> HalfPowNum {
    let mut even = CycNum::zero(3);
    let mut odd = CycNum::zero(3);
    let qi = Int::from(q);
    for (n, c) in coeffs.iter().enumerate() {
        if *c == Eis::ZERO {
            continue;
        }
        // q^{−n/2} = q^{−n/2} (n even) or q^{−(n−1)/2}·q^{−1/2} (n odd)
        let v = c.to_cyc().scale_ratio(&Int::ONE, &qi.pow((n / 2) as u32));
        if n % 2 == 0 {
            even = even.add(&v);
        } else {
            odd = odd.add(&v);
        }
    }
    HalfPowNum::new(q, even, odd)
}

fn q_pow_neg_half(q: u64, n: usize) -> HalfPowNum {
    HalfPowNum::q_pow_half(q, -(n as i64), 3)
}

impl LPolynomial {
    pub fn q(&self) -> u64 {
        self.chi.q() as u64
    }

    pub fn genus(&self) -> usize {
        genus_of(&self.chi)
    }

    /// Coefficient a_n, zero beyond the stored range.
    pub fn a(&self, n: usize) -> CycNum {
        self.coeffs.get(n).cloned().unwrap_or_else(|| CycNum::zero(3))
    }

    /// Σ_{n ≤ N} a_n q^{−n/2}.
    pub fn partial_central(&self, upto: i64) -> HalfPowNum {
        let q = self.q();
        let mut acc = HalfPowNum::zero(q, 3);
        for n in 0..=upto.min(self.coeffs.len() as i64 - 1) {
            acc = acc.add(&q_pow_neg_half(q, n as usize).mul_cyc(&self.coeffs[n as usize]));
        }
        acc
    }

    /// L(1/2, χ) = Σ_{n < deg h} a_n q^{−n/2}.
    pub fn central_value(&self) -> CentralValue {
        CentralValue { value: self.partial_central(self.coeffs.len() as i64 - 1) }
    }

    /// The conjugate polynomial, i.e. 𝓛_q(u, χ̄).
    pub fn conj(&self) -> LPolynomial {
        LPolynomial { chi: self.chi.conj(), coeffs: self.coeffs.iter().map(CycNum::conj).collect() }
    }

    /// Coefficients of the completed polynomial: 𝓛 itself (odd) or 𝓛/(1 − u) (even).
    pub fn completed(&self) -> Vec<CycNum> {
        match self.chi.parity {
            Parity::Odd => self.coeffs.clone(),
            Parity::Even => {
                let g = self.genus();
                let mut b = Vec::with_capacity(g + 1);
                let mut run = CycNum::zero(3);
                for n in 0..=g {
                    run = run.add(&self.a(n));
                    b.push(run.clone());
                }
                b
            }
        }
    }

    /// The coefficient relations of the functional equation with root number ω:
    /// a_n = ω q^{n−g/2} ā_{g−n} (odd) or b_n = ω q^{n−g/2} b̄_{g−n} (even), all n ≤ g.
    pub fn functional_equation_check(&self, omega: &HalfPowNum) -> bool {
        let g = self.genus();
        let q = self.q();
        let m = omega.order();
        let c = self.completed();
        if c.len() != g + 1 {
            return false;
        }
        if self.chi.parity == Parity::Even && !self.coeffs.iter().fold(CycNum::zero(3), |a, x| a.add(x)).is_zero() {
            return false;
        }
        (0..=g).all(|n| {
            let lhs = HalfPowNum::from_cyc(q, c[n].embed(m));
            let rhs = omega
                .mul(&HalfPowNum::q_pow_half(q, 2 * n as i64 - g as i64, m))
                .mul_cyc(&c[g - n].conj().embed(m));
            lhs == rhs
        })
    }

    /// The root number read off the top coefficient.
    pub fn root_number(&self) -> HalfPowNum {
        crate::gauss::root_number_from_top(&self.chi, self.coeffs.last().expect("deg h ≥ 1"))
    }

    /// The approximate functional equation at split A, 0 ≤ A ≤ g.
    pub fn afe_value(&self, a: usize, omega: &HalfPowNum) -> Result<CentralValue> {
        let g = self.genus();
        if a > g {
            return Err(Error::Domain(format!("AFE split A = {a} exceeds g = {g}")));
        }
        let q = self.q();
        let m = omega.order();
        let conj = self.conj();
        let lift = |x: HalfPowNum| x.embed(m);
        let mut v = lift(self.partial_central(a as i64)).add(&omega.mul(&lift(conj.partial_central(g as i64 - a as i64 - 1))));
        if self.chi.parity == Parity::Even {
            // 1/(1 − √q) with √q = q·q^{−1/2}
            let one_minus_sqrt = HalfPowNum::new(q, CycNum::one(m), CycNum::from_i64(m, -(q as i64)));
            let k = one_minus_sqrt.inverse();
            let t1 = lift(q_pow_neg_half(q, a + 1).mul_cyc(&self.a(a + 1)));
            let t2 = omega.mul(&lift(q_pow_neg_half(q, g - a).mul_cyc(&self.a(g - a).conj())));
            v = v.add(&k.mul(&t1.add(&t2)));
        }
        Ok(CentralValue { value: v })
    }

    /// Roots of the completed polynomial, from the companion matrix.
    pub fn completed_roots(&self) -> Vec<Complex64> {
        let c: Vec<Complex64> = self
            .completed()
            .iter()
            .map(|x| {
                let z = x.to_complex();
                Complex64::new(z.re, z.im)
            })
            .collect();
        let g = c.len() - 1;
        if g == 0 {
            return Vec::new();
        }
        let lead = c[g];
        let mut mat = DMatrix::<Complex64>::zeros(g, g);
        for i in 1..g {
            mat[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..g {
            mat[(i, g - 1)] = -c[i] / lead;
        }
        mat.schur().eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default()
    }

    /// Largest deviation of |root| from q^{−1/2}.
    pub fn weil_deviation(&self) -> f64 {
        let target = (self.q() as f64).sqrt().recip();
        self.completed_roots().iter().map(|z| (z.norm() - target).abs()).fold(0.0, f64::max)
    }

    pub fn record(&self, omega: &RootNumber) -> LRecord {
        LRecord {
            character: self.chi.descriptor(),
            coefficients: self.coeffs.iter().map(CycNum::serialize).collect(),
            central_value: self.central_value().value.to_string(),
            omega: omega.value.to_string(),
        }
    }
}

/// JSON record for one character.
#[derive(Clone, Debug, Serialize)]
pub struct LRecord {
    pub character: crate::characters::CharacterDescriptor,
    pub coefficients: Vec<String>,
    pub central_value: String,
    pub omega: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_characters, OmegaIso, Setting};
    use crate::ffpoly::{FieldSpec, Poly};
    use crate::gauss::root_number;

    #[test]
    fn eisenstein_arithmetic() {
        let x = Eis { a: 2, b: -3 };
        let y = Eis { a: -1, b: 5 };
        assert_eq!(x.mul(y).to_cyc(), x.to_cyc().mul(&y.to_cyc()));
        assert_eq!(x.conj().to_cyc(), x.to_cyc().conj());
        for k in 0..3 {
            assert_eq!(x.mul_root(k), x.mul(Eis::root(k)));
        }
    }

    #[test]
    fn degenerate_and_genus() {
        let f = FieldSpec::new(7, 1).unwrap();
        let iso = OmegaIso::canonical(&f).unwrap();
        let chi = CubicCharacter::kummer(&iso, Poly::t(&f), Poly::one(&f)).unwrap();
        let l = l_polynomial(&chi);
        assert_eq!(l.coeffs, vec![CycNum::one(3)]);
        assert_eq!(genus_of(&chi), 0);
        let even = CubicCharacter::kummer(&iso, Poly::t(&f), Poly::linear(&f, 1)).unwrap();
        assert_eq!(even.parity, Parity::Even);
        assert_eq!(genus_of(&even), 0);
        let le = l_polynomial(&even);
        assert!(le.coeffs.iter().fold(CycNum::zero(3), |a, x| a.add(x)).is_zero());
    }

    #[test]
    fn euler_matches_enumeration_and_fe() {
        let f = FieldSpec::new(7, 1).unwrap();
        for g in 1..=2 {
            for chi in enumerate_characters(&f, g, Setting::Kummer).unwrap().iter().step_by(11) {
                let l = l_polynomial(chi);
                assert_eq!(l.coeffs, l_polynomial_euler(chi).coeffs);
                let w = root_number(chi).unwrap();
                assert_eq!(l.root_number(), w.value);
                assert!(l.functional_equation_check(&w.value));
                let direct = l.central_value().value.embed(21);
                for a in 0..=g {
                    assert_eq!(l.afe_value(a, &w.value).unwrap().value, direct, "A={a}");
                }
                assert!(l.weil_deviation() < 1e-9);
                let lc = l.conj();
                assert_eq!(lc.coeffs, l_polynomial(&chi.conj()).coeffs);
            }
        }
    }

    #[test]
    fn even_characters_afe() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        for chi in enumerate_characters(&f5, 2, Setting::NonKummer).unwrap().iter().step_by(29) {
            let l = l_polynomial(chi);
            let w = root_number(chi).unwrap();
            assert!(l.functional_equation_check(&w.value));
            let direct = l.central_value().value.embed(15);
            for a in 0..=2 {
                assert_eq!(l.afe_value(a, &w.value).unwrap().value, direct, "A={a}");
            }
            assert!(l.weil_deviation() < 1e-9);
        }
    }
}
