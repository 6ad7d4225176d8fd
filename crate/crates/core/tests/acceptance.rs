//! Acceptance suite: every criterion runs at its stated size and tolerance and
//! prints one PASS/FAIL line. The process exits nonzero if any criterion fails.
//!
//! Exact brute-force moments are frozen in `tests/golden/moments.json`: written
//! on the first run, compared on every later run.

use cubic_core::characters::{chi_f_exp, enumerate_characters, kummer_block, CubicCharacter};
use cubic_core::ffpoly::{enumerate_monic, irreducibles, is_squarefree};
use cubic_core::gauss::{no_oscillation_check, poisson_sides_with, root_number, tau, GaussOracle};
use cubic_core::lfunctions::{l_polynomial, LPolynomial};
use cubic_core::metaplectic::{
    explicit_residue, gauss_average_relative_error, psi_tilde, psi_tilde_via_expression, rho, rho_via_p, rho_via_quotient,
    verify_hecke_relations, verify_hoffstein_fe,
};
use cubic_core::moments::{
    a_nk_closed_form_one, a_nk_closed_form_three_halves, brute_force_moment, constant_a_nk, constants_kummer, count_primitive,
    knk_equals_ank_check, DEFAULT_TRUNCATION,
};
use cubic_core::{
    CycNum, FieldSpec, GaussSumEngine, HalfPowNum, Int, MomentOptions, MomentReport, OmegaIso, Poly, QuadraticExtension,
    Setting, StructuralGauss,
};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

type Outcome = Result<(bool, String), String>;

fn f7() -> (FieldSpec, OmegaIso) {
    let f = FieldSpec::new(7, 1).unwrap();
    let iso = OmegaIso::canonical(&f).unwrap();
    (f, iso)
}

fn err(e: cubic_core::Error) -> String {
    e.to_string()
}

/// Every polynomial of degree ≤ d, zero included.
fn all_polys(field: &FieldSpec, d: usize) -> Vec<Poly> {
    let q = field.q() as u64;
    (0..q.pow(d as u32 + 1))
        .map(|mut idx| {
            let c = (0..=d)
                .map(|_| {
                    let a = (idx % q) as u32;
                    idx /= q;
                    a
                })
                .collect();
            Poly::new(field, c)
        })
        .collect()
}

fn same(a: &HalfPowNum, b: &HalfPowNum) -> bool {
    let m = a.order().max(b.order());
    a.embed(m) == b.embed(m)
}

fn gauss_structure() -> Outcome {
    let (field, iso) = f7();
    let vs = all_polys(&field, 2);
    let mut pairs = 0u64;
    for d in 0..=4 {
        for f in enumerate_monic(&field, d) {
            let oracle = GaussOracle::new(&iso, &f);
            let structural = StructuralGauss::new(&iso, &f).map_err(err)?;
            for v in &vs {
                if structural.eval(v).map_err(err)? != oracle.eval(v) {
                    return Ok((false, format!("mismatch at V = {v}, f = {f}")));
                }
                pairs += 1;
            }
        }
    }
    Ok((true, format!("{pairs} pairs (V, f) agree exactly")))
}

fn poisson() -> Outcome {
    let (field, iso) = f7();
    let mut cases = 0u64;
    for d in 1..=4 {
        for f in enumerate_monic(&field, d) {
            let oracle = GaussOracle::new(&iso, &f);
            for m in 0..=3 {
                let (l, r) = poisson_sides_with(&iso, &oracle, m);
                if l != r {
                    return Ok((false, format!("f = {f}, m = {m}")));
                }
                cases += 1;
            }
        }
    }
    Ok((true, format!("{cases} cases (f, m) exact")))
}

fn reciprocity() -> Outcome {
    let (field, iso) = f7();
    let monic: Vec<Poly> = (1..=3).flat_map(|d| enumerate_monic(&field, d)).collect();
    let mut pairs = 0u64;
    for a in &monic {
        for b in &monic {
            if !a.is_coprime(b) {
                continue;
            }
            if chi_f_exp(&iso, a, b) != chi_f_exp(&iso, b, a) {
                return Ok((false, format!("a = {a}, b = {b}")));
            }
            pairs += 1;
        }
    }
    Ok((true, format!("{pairs} coprime ordered pairs")))
}

/// Every primitive character of genus ≤ 3 over F_7 (all parities and
/// restrictions) and of genus ≤ 2 over F_5.
fn small_characters() -> Vec<CubicCharacter> {
    let (_, iso) = f7();
    let mut out: Vec<CubicCharacter> = Vec::new();
    for d1 in 0..=5 {
        for d2 in 0..=5 - d1 {
            if d1 + d2 > 0 {
                out.extend(kummer_block(&iso, d1, d2).into_iter().filter(|c| c.genus <= 3));
            }
        }
    }
    let f5 = FieldSpec::new(5, 1).unwrap();
    for g in 0..=2 {
        out.extend(enumerate_characters(&f5, g, Setting::NonKummer).unwrap());
    }
    out
}

/// L-polynomial by enumeration and ω through the Gauss sum, once per character.
fn prepare(chars: &[CubicCharacter]) -> Result<Vec<(LPolynomial, HalfPowNum)>, String> {
    chars.iter().map(|chi| Ok((l_polynomial(chi), root_number(chi).map_err(err)?.value))).collect()
}

fn functional_equation(prepared: &[(LPolynomial, HalfPowNum)]) -> Outcome {
    for (l, w) in prepared {
        if !l.functional_equation_check(w) {
            return Ok((false, format!("functional equation fails for {:?}", l.chi.descriptor())));
        }
        if w.mul(&w.conj()) != HalfPowNum::one(w.base(), w.order()) {
            return Ok((false, format!("|ω| ≠ 1 for {:?}", l.chi.descriptor())));
        }
    }
    Ok((true, format!("{} characters", prepared.len())))
}

fn afe(prepared: &[(LPolynomial, HalfPowNum)]) -> Outcome {
    let mut evaluations = 0u64;
    for (l, w) in prepared {
        let direct = l.central_value().value;
        for a in 0..=l.chi.genus {
            if !same(&l.afe_value(a, w).map_err(err)?.value, &direct) {
                return Ok((false, format!("A = {a}, {:?}", l.chi.descriptor())));
            }
            evaluations += 1;
        }
    }
    Ok((true, format!("{evaluations} evaluations over {} characters", prepared.len())))
}

fn no_oscillation() -> Outcome {
    let f5 = FieldSpec::new(5, 1).unwrap();
    let ext = QuadraticExtension::new(&f5).map_err(err)?;
    let mut n = 0;
    for d in 0..=3 {
        for f in enumerate_monic(&f5, d).filter(is_squarefree) {
            if !no_oscillation_check(&ext, &f).map_err(err)? {
                return Ok((false, format!("f = {f}")));
            }
            n += 1;
        }
    }
    Ok((true, format!("{n} squarefree f")))
}

struct Series {
    iso: OmegaIso,
    engine: GaussSumEngine,
    t: Poly,
    t1: Poly,
    t2: Poly,
    p1: Poly,
    p2: Poly,
}

/// S = {T, T+1, T+2, two quadratics}; coefficient sums to degree 10 at q = 7.
fn series() -> Result<Series, String> {
    let (field, iso) = f7();
    let quads = irreducibles(&field, 2);
    let lin = |c| Poly::from_ints(&field, &[c, 1]);
    let (t, t1, t2) = (lin(0), lin(1), lin(2));
    let (p1, p2) = (quads[0].clone(), quads[1].clone());
    let engine = GaussSumEngine::new(&iso, &[t.clone(), t1.clone(), t2.clone(), p1.clone(), p2.clone()], 10).map_err(err)?;
    Ok(Series { iso, engine, t, t1, t2, p1, p2 })
}

fn residues(s: &Series) -> Outcome {
    let field = s.iso.field().clone();
    let one = Poly::one(&field);
    let q = Int::from(7u64);
    let closed = [CycNum::one(21), tau(&s.iso, 1).scale(&q), CycNum::zero(21)];
    for (i, want) in closed.iter().enumerate() {
        let got = rho_via_quotient(&s.engine, &one, i as u8).map_err(err)?;
        if &got != want {
            return Ok((false, format!("ρ(1, {i}) = {}", got.serialize())));
        }
    }
    let mut family = Vec::new();
    for pi in [&s.t, &s.p1] {
        family.extend([pi.clone(), pi.pow(2), pi.pow(3)]);
    }
    family.extend([s.t.mul(&s.t1), s.p1.mul(&s.p2), s.t.mul(&s.p1)]);
    let mut checked = 0;
    for f in &family {
        for i in 0..3u8 {
            let (a, b) = (rho_via_p(&s.engine, f, i).map_err(err)?, rho_via_quotient(&s.engine, f, i).map_err(err)?);
            if a != b {
                return Ok((false, format!("routes disagree at f = {f}, i = {i}")));
            }
            if a != explicit_residue(&s.iso, f, i).map_err(err)? {
                return Ok((false, format!("explicit residue fails at f = {f}, i = {i}")));
            }
            checked += 1;
        }
    }
    // ρ(fπ^{j+3}, i) = ρ(fπ^j, i) for every instance whose series fit in degree 10
    let mut periodic = 0;
    let instances = [(one.clone(), s.t.clone(), 0), (one.clone(), s.p1.clone(), 0), (one.clone(), s.t.clone(), 1), (s.t1.clone(), s.t.clone(), 0), (s.p1.clone(), s.t.clone(), 0)];
    for (f, pi, j) in &instances {
        for i in 0..3u8 {
            let hi = rho(&s.engine, &f.mul(&pi.pow(j + 3)), i).map_err(err)?.value;
            let lo = rho(&s.engine, &f.mul(&pi.pow(*j)), i).map_err(err)?.value;
            if hi != lo {
                return Ok((false, format!("periodicity fails at f = {f}, π = {pi}, j = {j}, i = {i}")));
            }
            periodic += 1;
        }
    }
    Ok((true, format!("ρ(1, i) closed forms; {checked} (f, i) with both routes and the explicit residue; {periodic} periodicity instances")))
}

fn hecke_and_fe(s: &Series) -> Outcome {
    let field = s.iso.field().clone();
    let fs = [Poly::one(&field), s.t.clone(), s.t.mul(&s.t1)];
    for f in &fs {
        let rep = verify_hecke_relations(&s.engine, f, &s.t2, 6).map_err(err)?;
        if !rep.all() {
            return Ok((false, format!("Hecke relations fail for f = {f}: {rep:?}")));
        }
        for i in 0..3 {
            let r = verify_hoffstein_fe(&s.engine, f, i).map_err(err)?;
            if !r.holds {
                return Ok((false, format!("functional equation fails for f = {f}, i = {i}: {:?}", r.residual)));
            }
        }
    }
    Ok((true, "Hecke relations to degree 6 and the class-series functional equation for f ∈ {1, T, T(T+1)}, all i".into()))
}

fn psi_expression(s: &Series) -> Outcome {
    for pi in [&s.t1, &s.p1] {
        for k in 1..=3 {
            let f = pi.pow(k);
            if psi_tilde(&s.engine, &f, 6).map_err(err)? != psi_tilde_via_expression(&s.engine, &f, 6).map_err(err)? {
                return Ok((false, format!("f = {f}")));
            }
        }
    }
    Ok((true, "direct and composed series agree to degree 6 for π^k, k ≤ 3, π ∈ {T+1, quadratic}".into()))
}

fn gauss_average(s: &Series) -> Outcome {
    let one = Poly::one(s.iso.field());
    let e3 = gauss_average_relative_error(&s.engine, &one, 3).map_err(err)?;
    let e6 = gauss_average_relative_error(&s.engine, &one, 6).map_err(err)?;
    Ok((e6 < e3, format!("relative error {e3:e} at d = 3, {e6:e} at d = 6; strict decrease required")))
}

fn counting() -> Outcome {
    let (f7, _) = f7();
    let f5 = FieldSpec::new(5, 1).unwrap();
    for d in [1, 3, 5] {
        let c = count_primitive(&f5, Setting::NonKummer, d).map_err(err)?;
        if c.exact != 0 {
            return Ok((false, format!("N_nK({d}) = {}", c.exact)));
        }
    }
    let k = count_primitive(&f7, Setting::Kummer, 4).map_err(err)?;
    let n = count_primitive(&f5, Setting::NonKummer, 4).map_err(err)?;
    let (rk, rn) = (k.ratio(), n.ratio());
    let ok = (rk - 1.0).abs() <= 0.25 && (rn - 1.0).abs() <= 0.25;
    Ok((ok, format!("odd degrees vanish; ratio at d = 4: Kummer q=7 {rk:.4}, non-Kummer q=5 {rn:.4}")))
}

fn constants() -> Outcome {
    let mut notes = Vec::new();
    let q = 5u64;
    let qf = q as f64;
    for (u, closed) in [(qf.powf(-1.5), a_nk_closed_form_three_halves(q, DEFAULT_TRUNCATION)), (1.0 / qf, a_nk_closed_form_one(q, DEFAULT_TRUNCATION))] {
        let generic = constant_a_nk(q, 1.0 / (qf * qf), u).map_err(err)?;
        let gap = generic.sub(&closed).abs();
        if gap > 1e-8 + generic.err + closed.err {
            return Ok((false, format!("A_nK closed form off by {gap:e} at u = {u}")));
        }
        notes.push(format!("A_nK gap {gap:.1e}"));
    }
    for q in [5u64, 11] {
        let c = knk_equals_ank_check(q).map_err(err)?;
        let gap = c.knk.sub(&c.ank).abs();
        if !c.holds || gap > 1e-6 {
            return Ok((false, format!("K_nK ≠ A_nK at q = {q}: gap {gap:e}")));
        }
        notes.push(format!("K_nK gap {gap:.1e} at q={q}"));
    }
    let mut worst = 0f64;
    for g in 2..=5 {
        let k = constants_kummer(7, g).map_err(err)?;
        worst = worst.max(k.c_k1.im.abs()).max(k.c_k2.im.abs());
    }
    notes.push(format!("max |Im C_K| {worst:.1e}"));
    Ok((worst < 1e-8, notes.join("; ")))
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/moments.json")
}

struct Moments {
    runs: Vec<(String, MomentReport)>,
}

fn moment_runs(threads: usize) -> Result<Moments, String> {
    let (f7, _) = f7();
    let f5 = FieldSpec::new(5, 1).unwrap();
    let opts = MomentOptions { threads: Some(threads), ..MomentOptions::default() };
    let mut runs = Vec::new();
    for g in [2, 4] {
        runs.push((format!("nonkummer-q5-g{g}"), brute_force_moment(&f5, g, Setting::NonKummer, &opts).map_err(err)?));
    }
    for g in [2, 3, 5] {
        runs.push((format!("kummer-q7-g{g}"), brute_force_moment(&f7, g, Setting::Kummer, &opts).map_err(err)?));
    }
    Ok(Moments { runs })
}

/// Σ_χ L(1/2, χ) summed from L-polynomials by enumeration, independent of the block engine.
fn enumeration_moment(field: &FieldSpec, g: usize, setting: Setting) -> HalfPowNum {
    enumerate_characters(field, g, setting)
        .unwrap()
        .iter()
        .fold(HalfPowNum::zero(field.q() as u64, 3), |acc, chi| acc.add(&l_polynomial(chi).central_value().value))
}

fn moment_trends(m: &Moments) -> Outcome {
    let rel = |key: &str| m.runs.iter().find(|(k, _)| k == key).map(|(_, r)| r.relative_error).unwrap();
    let mut notes = Vec::new();
    // independent oracle for the smallest families
    let (f7, _) = f7();
    let f5 = FieldSpec::new(5, 1).unwrap();
    for (key, field, g, setting) in [("nonkummer-q5-g2", &f5, 2, Setting::NonKummer), ("kummer-q7-g2", &f7, 2, Setting::Kummer), ("kummer-q7-g3", &f7, 3, Setting::Kummer)] {
        let report = &m.runs.iter().find(|(k, _)| k == key).unwrap().1;
        if !same(&report.exact_moment, &enumeration_moment(field, g, setting)) {
            return Ok((false, format!("{key} disagrees with the enumeration oracle")));
        }
    }
    // golden regression
    let path = golden_path();
    let current: BTreeMap<String, String> = m.runs.iter().map(|(k, r)| (k.clone(), r.exact_moment.to_string())).collect();
    let mut golden_ok = true;
    if path.exists() {
        let stored: BTreeMap<String, String> = serde_json::from_str(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for (k, v) in &current {
            match stored.get(k) {
                Some(s) if HalfPowNum::parse(s).map(|x| same(&x, &HalfPowNum::parse(v).unwrap())).unwrap_or(false) => {}
                Some(_) => {
                    golden_ok = false;
                    notes.push(format!("{k} differs from its golden value"));
                }
                None => notes.push(format!("{k} has no golden value")),
            }
        }
        notes.push("golden values match".into());
    } else {
        std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::write(&path, serde_json::to_string_pretty(&current).unwrap() + "\n").map_err(|e| e.to_string())?;
        notes.push("golden values recorded".into());
    }
    let (n2, n4) = (rel("nonkummer-q5-g2"), rel("nonkummer-q5-g4"));
    let (k2, k3, k5) = (rel("kummer-q7-g2"), rel("kummer-q7-g3"), rel("kummer-q7-g5"));
    let nk_ok = n4 < n2;
    let k_ok = k2 > k3 && k3 > k5;
    notes.push(format!("non-Kummer q=5 rel. error g=2 {n2:.4} → g=4 {n4:.4} ({})", if nk_ok { "decreases" } else { "does not decrease" }));
    notes.push(format!("Kummer q=7 rel. error g=2 {k2:.4}, g=3 {k3:.4}, g=5 {k5:.4} ({})", if k_ok { "decreasing" } else { "not decreasing" }));
    Ok((golden_ok && nk_ok && k_ok, notes.join("; ")))
}

fn determinism(eight: &Moments) -> Outcome {
    let one = moment_runs(1)?;
    for ((k, a), (_, b)) in eight.runs.iter().zip(&one.runs) {
        if a.exact_moment != b.exact_moment {
            return Ok((false, format!("{k} differs between 8 and 1 workers")));
        }
    }
    Ok((true, format!("{} families bit-identical with 1 and 8 workers", one.runs.len())))
}

fn main() {
    let mut results: Vec<(&str, bool)> = Vec::new();
    let mut run = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("{} {name:<22} {:>7.1}s  {detail}", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        results.push((name, ok));
    };
    run("gauss-structure", &mut gauss_structure);
    run("poisson-summation", &mut poisson);
    run("cubic-reciprocity", &mut reciprocity);
    let mut prepared = Err(String::new());
    run("functional-equation", &mut || {
        prepared = prepare(&small_characters());
        prepared.as_deref().map_err(Clone::clone).and_then(functional_equation)
    });
    run("afe-identity", &mut || prepared.as_deref().map_err(Clone::clone).and_then(afe));
    run("no-oscillation", &mut no_oscillation);
    // the series engine and the 8-worker moments are built inside the first
    // criterion that uses them, so their cost shows up in its timing
    let mut s = Err(String::new());
    run("residues", &mut || {
        s = series();
        s.as_ref().map_err(Clone::clone).and_then(residues)
    });
    run("hecke-and-series-fe", &mut || s.as_ref().map_err(Clone::clone).and_then(hecke_and_fe));
    run("psi-tilde-expression", &mut || s.as_ref().map_err(Clone::clone).and_then(psi_expression));
    run("gauss-average", &mut || s.as_ref().map_err(Clone::clone).and_then(gauss_average));
    run("counting", &mut counting);
    run("constants", &mut constants);
    let mut moments = Err(String::new());
    run("moment-trends", &mut || {
        moments = moment_runs(8);
        moments.as_ref().map_err(Clone::clone).and_then(moment_trends)
    });
    run("determinism", &mut || moments.as_ref().map_err(Clone::clone).and_then(determinism));
    let failed: Vec<&str> = results.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    println!("{} of {} criteria pass", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failing: {}", failed.join(", "));
        std::process::exit(1);
    }
}
