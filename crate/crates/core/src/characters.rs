//! Cubic residue symbols, the additive character e_q, and the primitive cubic
//! characters of F_q[T] in the Kummer (q ≡ 1 mod 3) and non-Kummer
//! (q ≡ 2 mod 3) settings.
//!
//! Character values are cube roots of unity; hot paths carry them as an
//! exponent `k ∈ {0,1,2}` of ξ_3 (`None` for the value 0) and only lift to
//! [`CycNum`] at the boundary.

use crate::cyclotomic::{working_order, CycNum};
use crate::ffpoly::{
    enumerate_monic, factor_monic, is_irreducible, is_squarefree, resultant_raw, Elem, FieldSpec, Poly,
    QuadraticExtension,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Exponent of ξ_3, or `None` for the value 0.
pub type CubeExp = Option<u8>;

/// ξ_3^k in Q(ξ_order) (order a multiple of 3), or 0.
pub fn exp_to_cyc(e: CubeExp, order: u32) -> CycNum {
    match e {
        None => CycNum::zero(order),
        Some(k) => CycNum::root_of_unity(order, (order / 3 * k as u32) as i64),
    }
}

#[inline]
pub fn mul_exp(a: CubeExp, b: CubeExp) -> CubeExp {
    Some((a? + b?) % 3)
}

#[inline]
pub fn conj_exp(a: CubeExp) -> CubeExp {
    a.map(|k| (3 - k) % 3)
}

/// The isomorphism Ω from μ_3 ⊂ C onto the cube roots of unity in F_q^*.
#[derive(Clone, Debug)]
pub struct OmegaIso {
    field: FieldSpec,
    generator_image: Elem,
    /// 1 for Ω(ξ_3) = γ^{(q−1)/3}, 2 for the conjugate choice γ^{2(q−1)/3}.
    twist: u8,
}

impl PartialEq for OmegaIso {
    fn eq(&self, o: &OmegaIso) -> bool {
        self.field == o.field && self.generator_image == o.generator_image
    }
}

impl OmegaIso {
    /// Ω(ξ_3) = γ^{(q−1)/3} for the least primitive root γ.
    pub fn canonical(field: &FieldSpec) -> Result<OmegaIso> {
        if !field.is_kummer() {
            return Err(Error::InvalidField(format!("q = {} is not 1 mod 3", field.q())));
        }
        let e = (field.q() as u64 - 1) / 3;
        Ok(OmegaIso { field: field.clone(), generator_image: field.exp(e), twist: 1 })
    }

    /// The other choice, Ω'(ξ_3) = Ω(ξ_3)².
    pub fn conjugate(&self) -> OmegaIso {
        let f = &self.field;
        OmegaIso { field: f.clone(), generator_image: f.mul(self.generator_image, self.generator_image), twist: 3 - self.twist }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn generator_image(&self) -> Elem {
        self.generator_image
    }

    pub fn is_canonical(&self) -> bool {
        self.twist == 1
    }

    /// χ_3(a) = Ω^{−1}(a^{(q−1)/3}) as an exponent.
    #[inline]
    pub fn chi3_exp(&self, a: Elem) -> CubeExp {
        if a == 0 {
            return None;
        }
        Some(((self.field.log(a) % 3) as u8 * self.twist) % 3)
    }

    /// Ω^{−1}(c) for c with c³ = 1; `None` otherwise.
    pub fn preimage(&self, c: Elem) -> CubeExp {
        if c == 0 {
            return None;
        }
        let third = (self.field.q() - 1) / 3;
        let l = self.field.log(c);
        if l % third != 0 {
            return None;
        }
        Some((((l / third) % 3) as u8 * self.twist) % 3)
    }
}

/// χ_3(a) as an element of Q(ξ_3).
pub fn chi3(iso: &OmegaIso, a: Elem) -> CycNum {
    exp_to_cyc(iso.chi3_exp(a), 3)
}

/// The residue symbol (a/P)_3 by its definition a^{(|P|−1)/3} ≡ Ω(α) mod P.
pub fn residue_symbol_exp(iso: &OmegaIso, p: &Poly, a: &Poly) -> Result<CubeExp> {
    if !p.is_monic() || !is_irreducible(p) {
        return Err(Error::Domain(format!("{p} is not a monic prime")));
    }
    let r = a.rem(p);
    if r.is_zero() {
        return Ok(None);
    }
    let e = (p.norm() - 1) / 3;
    let c = r.powmod(e, p);
    if c.deg() != 0 {
        return Err(Error::Consistency(format!("power residue of {a} mod {p} is not constant")));
    }
    iso.preimage(c.coeff(0))
        .map(Some)
        .ok_or_else(|| Error::Consistency(format!("power residue of {a} mod {p} is not a cube root of unity")))
}

pub fn residue_symbol(iso: &OmegaIso, p: &Poly, a: &Poly) -> Result<CycNum> {
    Ok(exp_to_cyc(residue_symbol_exp(iso, p, a)?, 3))
}

/// χ_F(a) for monic F, as χ_3(Res(F, a)): the residue symbol of a prime P at a
/// is χ_3 of the norm of a mod P, and the norm is Res(P, a).
#[inline]
pub fn chi_f_exp(iso: &OmegaIso, f: &Poly, a: &Poly) -> CubeExp {
    debug_assert!(f.is_monic());
    if f.deg() == 0 {
        return Some(0);
    }
    iso.chi3_exp(resultant_raw(iso.field(), f.coeffs(), a.coeffs()))
}

pub fn chi_f(iso: &OmegaIso, f: &Poly, a: &Poly) -> CycNum {
    exp_to_cyc(chi_f_exp(iso, f, a), 3)
}

/// χ_F(a) through the factorization of F and the definitional residue symbols.
pub fn chi_f_by_factors(iso: &OmegaIso, f: &Poly, a: &Poly) -> Result<CubeExp> {
    let mut acc = Some(0u8);
    for (p, e) in factor_monic(f) {
        let s = residue_symbol_exp(iso, &p, a)?;
        for _ in 0..e {
            acc = mul_exp(acc, s);
        }
    }
    Ok(acc)
}

/// The coefficient of 1/T in the Laurent expansion of num/den at infinity.
pub fn laurent_residue(num: &Poly, den: &Poly) -> Result<Elem> {
    if den.is_zero() {
        return Err(Error::Domain("e_q with zero denominator".into()));
    }
    let field = den.field();
    let d = den.deg() as usize;
    if d == 0 {
        return Ok(0);
    }
    let r = num.rem(den);
    Ok(field.mul(r.coeff(d - 1), field.inv(den.lc())))
}

/// e_q(num/den) = ξ_p^{tr(a_1)} in Q(ξ_{3p}).
pub fn e_q(num: &Poly, den: &Poly) -> Result<CycNum> {
    let field = den.field();
    let a1 = laurent_residue(num, den)?;
    let m = working_order(field.p());
    Ok(CycNum::root_of_unity(m, (m / field.p() * field.trace(a1)) as i64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Kummer,
    #[serde(rename = "nonkummer")]
    NonKummer,
}

impl std::str::FromStr for Setting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Setting> {
        match s.to_ascii_lowercase().as_str() {
            "kummer" => Ok(Setting::Kummer),
            "nonkummer" | "non-kummer" => Ok(Setting::NonKummer),
            _ => Err(Error::Parse(format!("unknown setting {s:?}"))),
        }
    }
}

impl std::fmt::Display for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Setting::Kummer => "kummer",
            Setting::NonKummer => "nonkummer",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// The restriction of χ to F_q^*.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Restriction {
    #[serde(rename = "trivial")]
    Trivial,
    #[serde(rename = "chi3")]
    Chi3,
    #[serde(rename = "chi3^2")]
    Chi3Squared,
}

impl Restriction {
    pub fn from_exp(k: u8) -> Restriction {
        match k % 3 {
            0 => Restriction::Trivial,
            1 => Restriction::Chi3,
            _ => Restriction::Chi3Squared,
        }
    }

    pub fn exp(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Debug)]
pub enum CharacterKind {
    /// χ_{F1}·χ̄_{F2} with F1, F2 coprime squarefree monic in F_q[T].
    Kummer { f1: Poly, f2: Poly },
    /// χ_F restricted to F_q[T], F squarefree monic in F_{q²}[T] with gcd(F, F̃) = 1.
    NonKummer { f: Poly, ext: QuadraticExtension },
}

/// A primitive cubic Dirichlet character of F_q[T].
#[derive(Clone, Debug)]
pub struct CubicCharacter {
    pub kind: CharacterKind,
    /// Ω for the field in which residue symbols are taken (F_q or F_{q²}).
    pub omega: OmegaIso,
    pub conductor: Poly,
    pub genus: usize,
    pub parity: Parity,
    pub restriction: Restriction,
}

/// Serializable summary of a character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterDescriptor {
    pub setting: Setting,
    pub q: u32,
    #[serde(rename = "F1", skip_serializing_if = "Option::is_none", default)]
    pub f1: Option<String>,
    #[serde(rename = "F2", skip_serializing_if = "Option::is_none", default)]
    pub f2: Option<String>,
    #[serde(rename = "F", skip_serializing_if = "Option::is_none", default)]
    pub f: Option<String>,
    pub conductor: String,
    pub genus: usize,
    pub parity: Parity,
    pub restriction: Restriction,
}

/// The Galois conjugate F̃ of a polynomial over F_{q²}.
pub fn galois_conjugate(ext: &QuadraticExtension, f: &Poly) -> Poly {
    f.map_coeffs(&ext.ext, |a| ext.conjugate(a))
}

/// F·F̃ as a polynomial over F_q.
pub fn norm_to_base(ext: &QuadraticExtension, f: &Poly) -> Result<Poly> {
    let n = f.mul(&galois_conjugate(ext, f));
    let c: Option<Vec<Elem>> = n.coeffs().iter().map(|&a| ext.restrict(a)).collect();
    c.map(|c| Poly::new(&ext.base, c))
        .ok_or_else(|| Error::Consistency("F·F̃ does not descend to F_q".into()))
}

impl CubicCharacter {
    /// χ_{F1}χ̄_{F2}; restriction χ_3^{d1+2d2}, conductor F1F2.
    pub fn kummer(omega: &OmegaIso, f1: Poly, f2: Poly) -> Result<CubicCharacter> {
        let field = omega.field();
        if f1.field() != field || f2.field() != field {
            return Err(Error::InvalidField("F1, F2 must lie over the field of Ω".into()));
        }
        if !f1.is_monic() || !f2.is_monic() || !is_squarefree(&f1) || !is_squarefree(&f2) || !f1.is_coprime(&f2) {
            return Err(Error::Domain(format!("({f1}, {f2}) is not a coprime pair of squarefree monics")));
        }
        let conductor = f1.mul(&f2);
        let h = conductor.deg() as usize;
        if h == 0 {
            return Err(Error::Domain("the trivial character is not cubic".into()));
        }
        let r = ((f1.deg() + 2 * f2.deg()) % 3) as u8;
        let parity = if r == 0 { Parity::Even } else { Parity::Odd };
        let genus = match parity {
            Parity::Odd => h - 1,
            Parity::Even if h >= 2 => h - 2,
            Parity::Even => return Err(Error::Domain("even character with conductor of degree < 2".into())),
        };
        Ok(CubicCharacter {
            kind: CharacterKind::Kummer { f1, f2 },
            omega: omega.clone(),
            conductor,
            genus,
            parity,
            restriction: Restriction::from_exp(r),
        })
    }

    /// The restriction of χ_F, F ∈ F_{q²}[T]; `omega` lives on F_{q²}.
    pub fn non_kummer(ext: &QuadraticExtension, omega: &OmegaIso, f: Poly) -> Result<CubicCharacter> {
        if omega.field() != &ext.ext || f.field() != &ext.ext {
            return Err(Error::InvalidField("F and Ω must lie over F_{q²}".into()));
        }
        if ext.base.is_kummer() {
            return Err(Error::InvalidField(format!("q = {} is not 2 mod 3", ext.base.q())));
        }
        if !f.is_monic() || f.deg() < 1 || !is_squarefree(&f) || !f.is_coprime(&galois_conjugate(ext, &f)) {
            return Err(Error::Domain(format!("{f} is not squarefree and coprime to its conjugate")));
        }
        let conductor = norm_to_base(ext, &f)?;
        Ok(CubicCharacter {
            kind: CharacterKind::NonKummer { f, ext: ext.clone() },
            omega: omega.clone(),
            genus: conductor.deg() as usize - 2,
            conductor,
            parity: Parity::Even,
            restriction: Restriction::Trivial,
        })
    }

    pub fn setting(&self) -> Setting {
        match self.kind {
            CharacterKind::Kummer { .. } => Setting::Kummer,
            CharacterKind::NonKummer { .. } => Setting::NonKummer,
        }
    }

    /// The field F_q the character is defined on.
    pub fn field(&self) -> &FieldSpec {
        self.conductor.field()
    }

    pub fn q(&self) -> u32 {
        self.field().q()
    }

    pub fn conductor_degree(&self) -> usize {
        self.conductor.deg() as usize
    }

    pub fn is_odd(&self) -> bool {
        self.parity == Parity::Odd
    }

    /// χ(a) as an exponent of ξ_3.
    pub fn eval_exp(&self, a: &Poly) -> CubeExp {
        match &self.kind {
            CharacterKind::Kummer { f1, f2 } => mul_exp(chi_f_exp(&self.omega, f1, a), conj_exp(chi_f_exp(&self.omega, f2, a))),
            CharacterKind::NonKummer { f, ext } => {
                let c: Vec<Elem> = a.coeffs().iter().map(|&x| ext.embed(x)).collect();
                self.omega.chi3_exp(resultant_raw(&ext.ext, f.coeffs(), &c))
            }
        }
    }

    /// χ(a) in Q(ξ_3).
    pub fn eval(&self, a: &Poly) -> CycNum {
        exp_to_cyc(self.eval_exp(a), 3)
    }

    /// χ(α) for a scalar α ∈ F_q.
    pub fn eval_scalar_exp(&self, a: Elem) -> CubeExp {
        self.eval_exp(&Poly::constant(self.field(), a))
    }

    /// The conjugate character χ̄.
    pub fn conj(&self) -> CubicCharacter {
        match &self.kind {
            CharacterKind::Kummer { f1, f2 } => {
                CubicCharacter::kummer(&self.omega, f2.clone(), f1.clone()).expect("swapping a valid pair stays valid")
            }
            CharacterKind::NonKummer { f, ext } => {
                CubicCharacter::non_kummer(ext, &self.omega, galois_conjugate(ext, f)).expect("F̃ is admissible with F")
            }
        }
    }

    /// The same character data read under the conjugate choice of Ω.
    pub fn with_conjugate_omega(&self) -> CubicCharacter {
        let mut c = self.clone();
        c.omega = self.omega.conjugate();
        c
    }

    pub fn descriptor(&self) -> CharacterDescriptor {
        let (f1, f2, f) = match &self.kind {
            CharacterKind::Kummer { f1, f2 } => (Some(f1.to_literal()), Some(f2.to_literal()), None),
            CharacterKind::NonKummer { f, .. } => (None, None, Some(f.to_literal())),
        };
        CharacterDescriptor {
            setting: self.setting(),
            q: self.q(),
            f1,
            f2,
            f,
            conductor: self.conductor.to_literal(),
            genus: self.genus,
            parity: self.parity,
            restriction: self.restriction,
        }
    }
}

/// The (d1, d2) blocks of the Kummer family of genus g with restriction χ_3.
pub fn kummer_blocks(g: usize) -> Vec<(usize, usize)> {
    (0..=g + 1).map(|d1| (d1, g + 1 - d1)).filter(|&(d1, d2)| (d1 + 2 * d2) % 3 == 1).collect()
}

/// Squarefree monic polynomials of degree d, in enumeration order.
pub fn squarefree_monic(field: &FieldSpec, d: usize) -> Vec<Poly> {
    enumerate_monic(field, d).filter(is_squarefree).collect()
}

/// The characters χ_{F1}χ̄_{F2} of one (d1, d2) block.
pub fn kummer_block(omega: &OmegaIso, d1: usize, d2: usize) -> Vec<CubicCharacter> {
    let field = omega.field();
    let a = squarefree_monic(field, d1);
    let b = squarefree_monic(field, d2);
    let mut out = Vec::new();
    for f1 in &a {
        for f2 in &b {
            if f1.is_coprime(f2) {
                out.push(CubicCharacter::kummer(omega, f1.clone(), f2.clone()).expect("admissible pair"));
            }
        }
    }
    out
}

/// All admissible F for the non-Kummer family of conductor degree 2·deg F.
pub fn non_kummer_polys(ext: &QuadraticExtension, deg_f: usize) -> Vec<Poly> {
    enumerate_monic(&ext.ext, deg_f)
        .filter(|f| is_squarefree(f) && f.is_coprime(&galois_conjugate(ext, f)))
        .collect()
}

/// Every primitive cubic character of genus g in the given setting (Kummer:
/// restriction χ_3 only), each exactly once, in a deterministic order.
pub fn enumerate_characters(field: &FieldSpec, g: usize, setting: Setting) -> Result<Vec<CubicCharacter>> {
    match setting {
        Setting::Kummer => {
            let omega = OmegaIso::canonical(field)?;
            Ok(enumerate_kummer(&omega, g))
        }
        Setting::NonKummer => {
            if field.is_kummer() {
                return Err(Error::InvalidField(format!("q = {} is not 2 mod 3", field.q())));
            }
            let ext = QuadraticExtension::new(field)?;
            let omega = OmegaIso::canonical(&ext.ext)?;
            Ok(enumerate_non_kummer(&ext, &omega, g))
        }
    }
}

pub fn enumerate_kummer(omega: &OmegaIso, g: usize) -> Vec<CubicCharacter> {
    kummer_blocks(g).into_iter().flat_map(|(d1, d2)| kummer_block(omega, d1, d2)).collect()
}

pub fn enumerate_non_kummer(ext: &QuadraticExtension, omega: &OmegaIso, g: usize) -> Vec<CubicCharacter> {
    if g % 2 == 1 {
        return Vec::new();
    }
    non_kummer_polys(ext, g / 2 + 1)
        .into_iter()
        .map(|f| CubicCharacter::non_kummer(ext, omega, f).expect("admissible F"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::{enumerate_monic, irreducibles};
    use proptest::prelude::*;

    fn f7() -> FieldSpec {
        FieldSpec::new(7, 1).unwrap()
    }

    #[test]
    fn chi3_canonical_values() {
        let f = f7();
        let iso = OmegaIso::canonical(&f).unwrap();
        assert_eq!(iso.generator_image(), 2);
        assert!(chi3(&iso, 1).is_one());
        assert!(chi3(&iso, 0).is_zero());
        // 3^{(7-1)/3} = 9 = 2 = Ω(ξ_3)
        assert_eq!(chi3(&iso, 3), CycNum::root_of_unity(3, 1));
        for a in 1..7u32 {
            let cube = f.pow(a, 3);
            assert!(chi3(&iso, cube).is_one());
            let direct = f.pow(a, 2);
            assert_eq!(iso.preimage(direct), iso.chi3_exp(a));
        }
        let conj = iso.conjugate();
        assert_eq!(conj.generator_image(), 4);
        for a in 1..7u32 {
            assert_eq!(conj.chi3_exp(a), conj_exp(iso.chi3_exp(a)));
        }
    }

    #[test]
    fn resultant_symbol_matches_definition() {
        let f = f7();
        let iso = OmegaIso::canonical(&f).unwrap();
        for d in 1..=3 {
            for p in irreducibles(&f, d).iter() {
                for k in 0..=3 {
                    for a in enumerate_monic(&f, k).chain(enumerate_monic(&f, k).map(|x| x.scale(3))) {
                        assert_eq!(chi_f_exp(&iso, p, &a), residue_symbol_exp(&iso, p, &a).unwrap(), "P={p} a={a}");
                    }
                }
            }
        }
    }

    #[test]
    fn reciprocity_small_instance() {
        let f = f7();
        let iso = OmegaIso::canonical(&f).unwrap();
        let t = Poly::t(&f);
        let t1 = Poly::linear(&f, 1);
        assert_eq!(residue_symbol(&iso, &t, &t1).unwrap(), residue_symbol(&iso, &t1, &t).unwrap());
    }

    #[test]
    fn chi_f_of_squares_is_conjugate() {
        let f = f7();
        let iso = OmegaIso::canonical(&f).unwrap();
        for p in irreducibles(&f, 2).iter().take(5) {
            for a in enumerate_monic(&f, 2) {
                if !p.divides(&a) {
                    assert_eq!(chi_f(&iso, &p.pow(2), &a), chi_f(&iso, p, &a).conj());
                    assert_eq!(chi_f_exp(&iso, &p.pow(2), &a), chi_f_by_factors(&iso, &p.pow(2), &a).unwrap());
                }
            }
        }
    }

    #[test]
    fn e_q_examples() {
        let f = f7();
        let t = Poly::t(&f);
        let g = Poly::from_ints(&f, &[1, 2, 3]);
        assert!(e_q(&g, &Poly::one(&f)).unwrap().is_one());
        for c in 0..7 {
            let v = e_q(&Poly::constant(&f, c), &t).unwrap();
            assert_eq!(v, CycNum::root_of_unity(21, 3 * c as i64));
        }
        assert!(e_q(&g, &Poly::zero(&f)).is_err());
        // 1/(2T+1) = (1/2)T^{-1} + …
        let v = e_q(&Poly::one(&f), &Poly::from_ints(&f, &[1, 2])).unwrap();
        assert_eq!(v, CycNum::root_of_unity(21, 3 * 4));
    }

    fn poly_strategy(max_deg: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(0i64..7, 0..=max_deg + 1)
    }

    proptest! {
        #[test]
        fn e_q_additive(a in poly_strategy(5), b in poly_strategy(5), h in poly_strategy(3)) {
            let f = f7();
            let (a, b, h) = (Poly::from_ints(&f, &a), Poly::from_ints(&f, &b), Poly::from_ints(&f, &h));
            prop_assume!(!h.is_zero());
            let lhs = e_q(&a, &h).unwrap().mul(&e_q(&b, &h).unwrap());
            prop_assert_eq!(lhs, e_q(&a.add(&b), &h).unwrap());
            prop_assert_eq!(e_q(&a, &h).unwrap(), e_q(&a.add(&h.mul(&b)), &h).unwrap());
        }

        #[test]
        fn chi_f_period_and_vanishing(fc in poly_strategy(3), a in poly_strategy(5), k in poly_strategy(2)) {
            let f = f7();
            let iso = OmegaIso::canonical(&f).unwrap();
            let mut fc = fc;
            fc.push(1);
            let m = Poly::from_ints(&f, &fc);
            let a = Poly::from_ints(&f, &a);
            let k = Poly::from_ints(&f, &k);
            let v = chi_f_exp(&iso, &m, &a);
            prop_assert_eq!(v, chi_f_exp(&iso, &m, &a.add(&k.mul(&m))));
            prop_assert_eq!(v.is_none(), !m.is_coprime(&a));
            prop_assert_eq!(v, chi_f_by_factors(&iso, &m, &a).unwrap());
        }

        #[test]
        fn chi_f_multiplicative(fc in poly_strategy(3), a in poly_strategy(4), b in poly_strategy(4)) {
            let f = f7();
            let iso = OmegaIso::canonical(&f).unwrap();
            let mut fc = fc;
            fc.push(1);
            let m = Poly::from_ints(&f, &fc);
            let (a, b) = (Poly::from_ints(&f, &a), Poly::from_ints(&f, &b));
            prop_assert_eq!(chi_f_exp(&iso, &m, &a.mul(&b)), mul_exp(chi_f_exp(&iso, &m, &a), chi_f_exp(&iso, &m, &b)));
        }
    }

    #[test]
    fn kummer_enumeration_matches_pair_count() {
        let f = f7();
        let g = 2;
        let chars = enumerate_characters(&f, g, Setting::Kummer).unwrap();
        let mut brute = 0;
        for d1 in 0..=g + 1 {
            let d2 = g + 1 - d1;
            if (d1 + 2 * d2) % 3 != 1 {
                continue;
            }
            for a in enumerate_monic(&f, d1) {
                for b in enumerate_monic(&f, d2) {
                    let sf = |x: &Poly| factor_monic(x).iter().all(|&(_, e)| e == 1);
                    if sf(&a) && sf(&b) && a.gcd(&b).unwrap().is_one() {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(chars.len(), brute);
        for c in &chars {
            assert_eq!(c.parity, Parity::Odd);
            assert_eq!(c.restriction, Restriction::Chi3);
            assert_eq!(c.genus, g);
            assert_eq!(c.conductor_degree(), g + 1);
            let iso = &c.omega;
            for a in 1..7 {
                assert_eq!(c.eval_scalar_exp(a), iso.chi3_exp(a));
            }
        }
    }

    #[test]
    fn non_kummer_enumeration() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        let ext = QuadraticExtension::new(&f5).unwrap();
        let chars = enumerate_characters(&f5, 2, Setting::NonKummer).unwrap();
        // no prime of F_5[T] (viewed in F_25[T]) divides F
        let base_primes: Vec<Poly> = (1..=2)
            .flat_map(|d| irreducibles(&f5, d).iter().map(|p| p.map_coeffs(&ext.ext, |a| ext.embed(a))).collect::<Vec<_>>())
            .collect();
        let brute = enumerate_monic(&ext.ext, 2)
            .filter(|x| is_squarefree(x) && base_primes.iter().all(|p| !p.divides(x)))
            .count();
        assert_eq!(chars.len(), brute);
        assert!(enumerate_characters(&f5, 3, Setting::NonKummer).unwrap().is_empty());
        for c in chars.iter().take(40) {
            assert_eq!(c.parity, Parity::Even);
            assert_eq!(c.conductor_degree(), 4);
            for a in 1..5 {
                assert_eq!(c.eval_scalar_exp(a), Some(0));
            }
            // χ̄ = χ_{F̃}
            for a in enumerate_monic(&f5, 2) {
                assert_eq!(c.conj().eval_exp(&a), conj_exp(c.eval_exp(&a)));
            }
        }
    }

    #[test]
    fn descriptor_json() {
        let f = f7();
        let iso = OmegaIso::canonical(&f).unwrap();
        let c = CubicCharacter::kummer(&iso, Poly::t(&f), Poly::one(&f)).unwrap();
        let j = serde_json::to_value(c.descriptor()).unwrap();
        assert_eq!(j["setting"], "kummer");
        assert_eq!(j["F1"], "q=7;[0,1]");
        assert_eq!(j["parity"], "odd");
        assert_eq!(j["restriction"], "chi3");
        assert_eq!(j["genus"], 0);
        assert!(CubicCharacter::kummer(&iso, Poly::t(&f), Poly::t(&f)).is_err());
    }
}
