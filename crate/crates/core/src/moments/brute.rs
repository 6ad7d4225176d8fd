//! Brute-force first moments Σ_χ L(1/2, χ) over a genus-g family.
//!
//! The family is cut into blocks: (d1, d2) for the Kummer family and the
//! coefficient of T^{k−1} of F for the non-Kummer family. Each block sums its
//! central values exactly, so the total is independent of thread count and
//! block order. Finished blocks can be persisted and resumed.

use super::{constants_kummer_with, main_term_non_kummer, prime_count};
use crate::characters::{chi_f_exp, kummer_blocks, non_kummer_polys, squarefree_monic, CubicCharacter, OmegaIso, Parity, Setting};
use crate::cyclotomic::{ComplexApprox, CycNum, HalfPowNum};
use crate::ffpoly::{irreducibles, FieldSpec, Poly, QuadraticExtension};
use crate::lfunctions::{euler_coefficients, Eis, LPolynomial};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Knobs for [`brute_force_moment`].
#[derive(Clone, Debug)]
pub struct MomentOptions {
    /// AFE split A; `None` picks ⌊(g−1)/2⌋.
    pub afe_split: Option<usize>,
    /// Worker count; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    pub checkpoint_dir: Option<PathBuf>,
    /// Reuse finished blocks found in `checkpoint_dir`.
    pub resume: bool,
    /// Refuse to start blocks once their projected cost exceeds this.
    pub budget_ops: Option<u128>,
    /// Every n-th character is also summed directly and compared.
    pub spot_check_stride: usize,
    pub truncation: usize,
    /// Run under the conjugate Ω.
    pub conjugate_omega: bool,
}

impl Default for MomentOptions {
    fn default() -> MomentOptions {
        MomentOptions {
            afe_split: None,
            threads: None,
            checkpoint_dir: None,
            resume: false,
            budget_ops: None,
            spot_check_stride: 10,
            truncation: super::DEFAULT_TRUNCATION,
            conjugate_omega: false,
        }
    }
}

/// The exact contribution of one block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockResult {
    pub label: String,
    pub characters: u64,
    pub spot_checked: u64,
    pub sum: HalfPowNum,
    pub ops: u128,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RuntimeInfo {
    pub threads: usize,
    pub seconds: f64,
    pub ops: u128,
    pub resumed_blocks: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentReport {
    pub setting: Setting,
    pub q: u32,
    pub g: usize,
    pub exact_moment: HalfPowNum,
    pub exact_complex: ComplexApprox,
    pub main_term: ComplexApprox,
    pub relative_error: f64,
    pub character_count: u64,
    pub afe_split: usize,
    /// The AFE dual sum Σ_{n ≤ g−A−1} is empty (A = g).
    pub empty_dual_range: bool,
    pub spot_checked: u64,
    pub canonical_omega: bool,
    pub blocks: Vec<BlockResult>,
    pub runtime: RuntimeInfo,
}

impl MomentReport {
    pub fn csv_header() -> &'static str {
        "q,g,count,exact_real,main,rel_err"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.12e},{:.12e},{:.6e}",
            self.q, self.g, self.character_count, self.exact_complex.re, self.main_term.re, self.relative_error
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Manifest {
    setting: Setting,
    q: u32,
    g: usize,
    afe_split: usize,
    canonical_omega: bool,
    blocks: Vec<String>,
    completed: Vec<String>,
}

#[derive(Clone, Debug)]
enum Block {
    Kummer { d1: usize, d2: usize },
    NonKummer { coeff: u32 },
}

impl Block {
    fn label(&self) -> String {
        match self {
            Block::Kummer { d1, d2 } => format!("d{d1}-{d2}"),
            Block::NonKummer { coeff } => format!("c{coeff}"),
        }
    }
}

fn squarefree_count(q: u128, d: usize) -> u128 {
    match d {
        0 => 1,
        1 => q,
        _ => q.pow(d as u32) - q.pow(d as u32 - 1),
    }
}

/// Projected work in character-at-prime evaluations.
fn projected_ops(q: u64, g: usize, block: &Block) -> u128 {
    let qq = q as u128;
    match *block {
        Block::Kummer { d1, d2 } => {
            let primes: u128 = (1..=g).map(|d| prime_count(q, d) as u128).sum();
            let (n1, n2) = (squarefree_count(qq, d1), squarefree_count(qq, d2));
            (n1 + n2) * primes + n1 * n2 * (primes + 64)
        }
        Block::NonKummer { .. } => {
            let primes: u128 = (1..=g + 1).map(|d| prime_count(q, d) as u128).sum();
            let k = g / 2 + 1;
            let per_shard = (qq * qq).pow(k as u32 - 1);
            per_shard * (primes + 64)
        }
    }
}

/// ω from the top coefficient, kept in Q(ξ_3)[q^{−1/2}].
fn root_number3(lp: &LPolynomial) -> HalfPowNum {
    let q = lp.q();
    let h = lp.coeffs.len() as i64;
    let a = HalfPowNum::from_cyc(q, lp.coeffs[h as usize - 1].clone());
    match lp.chi.parity {
        Parity::Odd => a.mul(&HalfPowNum::q_pow_half(q, -(h - 1), 3)),
        Parity::Even => a.mul(&HalfPowNum::q_pow_half(q, -(h - 2), 3)).neg(),
    }
}

/// Accumulated sum over a run of characters.
struct Partial {
    sum: HalfPowNum,
    count: u64,
    checked: u64,
}

impl Partial {
    fn zero(q: u64) -> Partial {
        Partial { sum: HalfPowNum::zero(q, 3), count: 0, checked: 0 }
    }

    fn merge(self, o: Partial) -> Partial {
        Partial { sum: self.sum.add(&o.sum), count: self.count + o.count, checked: self.checked + o.checked }
    }
}

/// The central value of χ through the AFE, given its prime-symbol counts.
fn central_value(chi: CubicCharacter, counts: &[[u64; 3]], a: usize, spot: bool) -> Result<(HalfPowNum, bool)> {
    let h = chi.conductor_degree();
    let coeffs: Vec<CycNum> = euler_coefficients(counts, h).into_iter().map(Eis::to_cyc).collect();
    let lp = LPolynomial { chi, coeffs };
    let omega = root_number3(&lp);
    let v = lp.afe_value(a.min(lp.genus()), &omega)?.value;
    if spot {
        let direct = lp.central_value().value;
        if direct != v {
            return Err(Error::Consistency(format!("AFE and direct central values differ for {:?}", lp.chi.descriptor())));
        }
    }
    Ok((v, spot))
}

fn primes_up_to(field: &FieldSpec, n: usize) -> Vec<(usize, Poly)> {
    (1..=n).flat_map(|d| irreducibles(field, d).iter().map(move |p| (d, p.clone())).collect::<Vec<_>>()).collect()
}

/// χ_F(P) exponents over the prime list, 3 where P | F.
fn symbols(omega: &OmegaIso, fs: &[Poly], primes: &[(usize, Poly)]) -> Vec<Vec<u8>> {
    fs.par_iter()
        .map(|f| primes.iter().map(|(_, p)| chi_f_exp(omega, f, p).unwrap_or(3)).collect())
        .collect()
}

fn kummer_block(omega: &OmegaIso, g: usize, d1: usize, d2: usize, a: usize, stride: usize) -> Result<Partial> {
    let field = omega.field();
    let q = field.q() as u64;
    let primes = primes_up_to(field, g);
    let f1s = squarefree_monic(field, d1);
    let f2s = squarefree_monic(field, d2);
    let s1 = symbols(omega, &f1s, &primes);
    let s2 = symbols(omega, &f2s, &primes);
    let n2 = f2s.len();
    (0..f1s.len())
        .into_par_iter()
        .map(|i| -> Result<Partial> {
            let mut acc = Partial::zero(q);
            let mut counts = vec![[0u64; 3]; g + 1];
            for j in 0..n2 {
                if !f1s[i].is_coprime(&f2s[j]) {
                    continue;
                }
                for c in counts.iter_mut() {
                    *c = [0; 3];
                }
                for (k, (d, _)) in primes.iter().enumerate() {
                    let (x, y) = (s1[i][k], s2[j][k]);
                    if x < 3 && y < 3 {
                        counts[*d][((x + 3 - y) % 3) as usize] += 1;
                    }
                }
                let chi = CubicCharacter::kummer(omega, f1s[i].clone(), f2s[j].clone())?;
                let spot = (i * n2 + j) % stride == 0;
                let (v, checked) = central_value(chi, &counts, a, spot)?;
                acc.sum = acc.sum.add(&v);
                acc.count += 1;
                acc.checked += checked as u64;
            }
            Ok(acc)
        })
        .try_reduce(|| Partial::zero(q), |x, y| Ok(x.merge(y)))
}

fn non_kummer_block(ext: &QuadraticExtension, omega: &OmegaIso, g: usize, fs: &[Poly], a: usize, stride: usize) -> Result<Partial> {
    let q = ext.base.q() as u64;
    let primes = primes_up_to(&ext.base, g + 1);
    fs.par_iter()
        .enumerate()
        .map(|(i, f)| -> Result<Partial> {
            let chi = CubicCharacter::non_kummer(ext, omega, f.clone())?;
            let mut counts = vec![[0u64; 3]; g + 2];
            for (d, p) in &primes {
                if let Some(j) = chi.eval_exp(p) {
                    counts[*d][j as usize] += 1;
                }
            }
            let (v, checked) = central_value(chi, &counts, a, i % stride == 0)?;
            Ok(Partial { sum: v, count: 1, checked: checked as u64 })
        })
        .try_reduce(|| Partial::zero(q), |x, y| Ok(x.merge(y)))
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_vec_pretty(value).map_err(io_err)?).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_slice(&std::fs::read(path).map_err(io_err)?).map_err(io_err)
}

/// Σ_χ L(1/2, χ) over every primitive cubic χ of genus g in the setting
/// (Kummer: restriction χ_3), with the main term it is compared against.
pub fn brute_force_moment(field: &FieldSpec, g: usize, setting: Setting, opts: &MomentOptions) -> Result<MomentReport> {
    match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().map_err(io_err)?;
            pool.install(|| run(field, g, setting, opts))
        }
        None => run(field, g, setting, opts),
    }
}

fn run(field: &FieldSpec, g: usize, setting: Setting, opts: &MomentOptions) -> Result<MomentReport> {
    let start = Instant::now();
    if g < 2 {
        return Err(Error::Domain(format!("moments need g ≥ 2, got {g}")));
    }
    if opts.spot_check_stride == 0 {
        return Err(Error::Domain("spot-check stride must be positive".into()));
    }
    let q = field.q() as u64;
    let a = opts.afe_split.unwrap_or((g - 1) / 2);
    if a > g {
        return Err(Error::Domain(format!("AFE split A = {a} exceeds g = {g}")));
    }

    // the family and its blocks
    let mut nk_data = None;
    let mut kummer_omega = None;
    let blocks: Vec<Block> = match setting {
        Setting::Kummer => {
            if !field.is_kummer() {
                return Err(Error::InvalidField(format!("q = {q} is not 1 mod 3")));
            }
            let mut omega = OmegaIso::canonical(field)?;
            if opts.conjugate_omega {
                omega = omega.conjugate();
            }
            kummer_omega = Some(omega);
            kummer_blocks(g).into_iter().map(|(d1, d2)| Block::Kummer { d1, d2 }).collect()
        }
        Setting::NonKummer => {
            if q % 3 != 2 {
                return Err(Error::InvalidField(format!("q = {q} is not 2 mod 3")));
            }
            let ext = QuadraticExtension::new(field)?;
            let mut omega = OmegaIso::canonical(&ext.ext)?;
            if opts.conjugate_omega {
                omega = omega.conjugate();
            }
            let blocks = if g % 2 == 1 { Vec::new() } else { (0..ext.ext.q()).map(|coeff| Block::NonKummer { coeff }).collect() };
            nk_data = Some((ext, omega));
            blocks
        }
    };
    let labels: Vec<String> = blocks.iter().map(Block::label).collect();

    // checkpoint state
    let mut manifest = Manifest {
        setting,
        q: field.q(),
        g,
        afe_split: a,
        canonical_omega: !opts.conjugate_omega,
        blocks: labels.clone(),
        completed: Vec::new(),
    };
    let mut done: Vec<BlockResult> = Vec::new();
    if let Some(dir) = &opts.checkpoint_dir {
        std::fs::create_dir_all(dir).map_err(io_err)?;
        let mpath = dir.join("manifest.json");
        if opts.resume && mpath.exists() {
            let old: Manifest = read_json(&mpath)?;
            let same_run = Manifest { completed: Vec::new(), ..old.clone() } == manifest;
            if !same_run {
                return Err(Error::Consistency(format!("checkpoint directory {} belongs to a different run", dir.display())));
            }
            for label in &old.completed {
                done.push(read_json(&dir.join(format!("block-{label}.json")))?);
            }
            manifest.completed = old.completed;
        }
        write_json(&mpath, &manifest)?;
    }
    let resumed = done.len();

    // budget: blocks run in order while their projected cost fits
    let pending: Vec<&Block> = blocks.iter().filter(|b| !manifest.completed.contains(&b.label())).collect();
    let projected: u128 = pending.iter().map(|b| projected_ops(q, g, b)).sum();
    let mut allowance = opts.budget_ops.unwrap_or(u128::MAX);
    if projected > allowance && opts.checkpoint_dir.is_none() {
        return Err(Error::Budget { projected, budget: allowance });
    }

    let nk_polys = nk_data.as_ref().map(|(ext, _)| if g % 2 == 0 { non_kummer_polys(ext, g / 2 + 1) } else { Vec::new() });
    let mut spent = 0u128;
    for block in pending {
        let cost = projected_ops(q, g, block);
        if cost > allowance {
            return Err(Error::Budget { projected, budget: opts.budget_ops.unwrap_or(u128::MAX) });
        }
        allowance -= cost;
        let partial = match block {
            Block::Kummer { d1, d2 } => kummer_block(kummer_omega.as_ref().expect("Kummer Ω"), g, *d1, *d2, a, opts.spot_check_stride)?,
            Block::NonKummer { coeff } => {
                let (ext, omega) = nk_data.as_ref().expect("non-Kummer data");
                let k = g / 2 + 1;
                let fs: Vec<Poly> = nk_polys.as_ref().expect("family").iter().filter(|f| f.coeff(k - 1) == *coeff).cloned().collect();
                non_kummer_block(ext, omega, g, &fs, a, opts.spot_check_stride)?
            }
        };
        spent += cost;
        let result = BlockResult { label: block.label(), characters: partial.count, spot_checked: partial.checked, sum: partial.sum, ops: cost };
        if let Some(dir) = &opts.checkpoint_dir {
            write_json(&dir.join(format!("block-{}.json", result.label)), &result)?;
            manifest.completed.push(result.label.clone());
            write_json(&dir.join("manifest.json"), &manifest)?;
        }
        done.push(result);
    }

    // blocks in canonical order; the exact sum does not depend on it
    done.sort_by_key(|b| labels.iter().position(|l| *l == b.label));
    let exact = done.iter().fold(HalfPowNum::zero(q, 3), |acc, b| acc.add(&b.sum));
    let count: u64 = done.iter().map(|b| b.characters).sum();
    let checked: u64 = done.iter().map(|b| b.spot_checked).sum();
    let exact_complex = exact.to_complex();
    let main_term = match setting {
        Setting::Kummer => constants_kummer_with(q, g, opts.truncation)?.main_term(),
        Setting::NonKummer if count == 0 => ComplexApprox::real(0.0, 0.0),
        Setting::NonKummer => main_term_non_kummer(q, g)?,
    };
    let diff = exact_complex.sub(&main_term).abs();
    let relative_error = if main_term.abs() > 0.0 {
        diff / main_term.abs()
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(MomentReport {
        setting,
        q: field.q(),
        g,
        exact_moment: exact,
        exact_complex,
        main_term,
        relative_error,
        character_count: count,
        afe_split: a,
        empty_dual_range: a == g,
        spot_checked: checked,
        canonical_omega: !opts.conjugate_omega,
        blocks: done,
        runtime: RuntimeInfo { threads: rayon::current_num_threads(), seconds: start.elapsed().as_secs_f64(), ops: spent, resumed_blocks: resumed },
    })
}
