//! Weight-aspect first moments, their off-diagonal diagnostics and the
//! amplifier.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{KloostermanTable, Sieve};
use crate::error::{Error, Result};
use crate::gl3::{l_one, SymSquareForm};
use crate::lfunctions::{
    archimedean_root_number, central_value_gl2_with, central_value_rs_with, naive_root_number, AfeKernel, DEFAULT_A,
};
use crate::modforms::{dim_cusp_forms, eigenforms, hecke_lambda, Newform};
use crate::numeric::{DoubleDouble, Kahan, KahanC};
use crate::special::TestFunction;

type C = Complex64;

/// Exponent `e` in the default off-diagonal length `𝒴 = K^e`.
pub const DEFAULT_Y_EXPONENT: f64 = 2.75;

const RS_TOL: f64 = 1e-13;
const GL2_TOL: f64 = 1e-14;

/// One eigenform's share of the moment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormEntry {
    pub k: u32,
    pub f_index: usize,
    pub omega_inv: f64,
    pub lambda_l: f64,
    pub l_gl2: Option<f64>,
    pub l_rs: f64,
    /// `W((k−1)/K)·ω_f^{−1}·λ_f(ℓ)·[L(1/2,f)]·L(1/2,F⊗f)`
    pub contribution: f64,
}

/// One weight's share of the moment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub k: u32,
    pub w: f64,
    pub dim: usize,
    pub rs_cut: f64,
    pub contribution: f64,
    pub forms: Vec<FormEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    #[serde(rename = "K")]
    pub k_param: f64,
    pub ell: u64,
    pub include_gl2: bool,
    pub moment: f64,
    /// `L(1,F)·K/4·Ŵ(0)`, only for `ℓ = 1` without the `L(1/2,f)` factor
    pub main_term: Option<f64>,
    pub gap: Option<f64>,
    pub y_param: f64,
    pub diag_t: f64,
    pub diag_t_hat: f64,
    pub err_flat_bound: f64,
    pub err_natural_bound: f64,
    pub t_vacuous: bool,
    pub per_weight: Vec<WeightEntry>,
}

impl MomentReport {
    /// The moment re-summed from the breakdown in `(k, f)` order.
    pub fn resum(&self) -> f64 {
        let mut acc = Kahan::default();
        for w in &self.per_weight {
            for f in &w.forms {
                acc.add(f.contribution);
            }
        }
        acc.sum()
    }

    /// Table `k,f_index,lambda_l,L_gl2,L_rs,weight` with `weight = W·ω_f^{−1}`.
    pub fn csv(&self) -> String {
        let mut out = String::from("k,f_index,lambda_l,L_gl2,L_rs,weight\n");
        for w in &self.per_weight {
            for f in &w.forms {
                let gl2 = f.l_gl2.map(|v| format!("{v:e}")).unwrap_or_default();
                let _ = writeln!(out, "{},{},{:e},{},{:e},{:e}", f.k, f.f_index, f.lambda_l, gl2, f.l_rs, w.w * f.omega_inv);
            }
        }
        out
    }
}

/// Even weights `k >= 2` with `(k−1)/K` inside the support of `W`.
pub fn weight_grid(k_param: f64, w: &TestFunction) -> Vec<u32> {
    let (a, b) = w.support();
    let lo = (a * k_param + 1.0).floor().max(2.0) as u32;
    let hi = (b * k_param + 1.0).ceil() as u32;
    (lo..=hi)
        .filter(|k| k % 2 == 0)
        .filter(|&k| {
            let t = (k as f64 - 1.0) / k_param;
            t > a && t < b
        })
        .collect()
}

/// Eigenforms of weight `k` to at least `n_max`, kept for the process lifetime.
fn forms_at_least(k: u32, n_max: usize) -> Result<Arc<Vec<Newform>>> {
    static MEMO: OnceLock<Mutex<HashMap<u32, Arc<Vec<Newform>>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = memo.lock().unwrap().get(&k).filter(|f| f.first().is_some_and(|g| g.n_max() >= n_max)) {
        return Ok(hit.clone());
    }
    let forms = Arc::new(eigenforms(k, n_max)?);
    memo.lock().unwrap().insert(k, forms.clone());
    Ok(forms)
}

fn at_weight(e: Error, k: u32) -> Error {
    match e {
        Error::TableExhausted { needed, available } => Error::WeightTable { weight: k, needed, available },
        other => other,
    }
}

fn weight_entry(f_gl3: &SymSquareForm, k: u32, w: f64, ell: u64, include_gl2: bool) -> Result<WeightEntry> {
    let dim = dim_cusp_forms(k);
    let rs_live = archimedean_root_number(k, f_gl3.base_weight).re > 0.0;
    let gl2_live = include_gl2 && naive_root_number(k).re > 0.0;
    if dim == 0 || w == 0.0 {
        return Ok(WeightEntry { k, w, dim, rs_cut: 0.0, contribution: 0.0, forms: Vec::new() });
    }
    let rs = if rs_live { Some(AfeKernel::rankin_selberg(f_gl3, k, DEFAULT_A, 3.0)?) } else { None };
    let gl2 = if gl2_live { Some(AfeKernel::gl2(k, DEFAULT_A, 3.0)?) } else { None };
    let rs_cut = rs.as_ref().map_or(0.0, |kr| kr.cut(RS_TOL));
    let gl2_cut = gl2.as_ref().map_or(0.0, |kg| kg.cut(GL2_TOL));
    let needed = rs_cut.max(gl2_cut).floor() as usize;
    if needed > f_gl3.n_max() {
        return Err(Error::WeightTable { weight: k, needed: needed as u64, available: f_gl3.n_max() as u64 });
    }
    let forms = forms_at_least(k, needed.max(2)).map_err(|e| at_weight(e, k))?;
    let mut entries = Vec::with_capacity(forms.len());
    let mut acc = Kahan::default();
    for f in forms.iter() {
        let omega_inv = 1.0 / f.petersson_weight;
        let lambda_l = hecke_lambda(f, ell).map_err(|e| at_weight(e, k))?;
        let l_rs = match &rs {
            Some(kr) => central_value_rs_with(kr, f_gl3, f, Some(rs_cut)).map_err(|e| at_weight(e, k))?.value,
            None => 0.0,
        };
        let l_gl2 = if include_gl2 {
            Some(match &gl2 {
                Some(kg) => central_value_gl2_with(kg, f, Some(gl2_cut)).map_err(|e| at_weight(e, k))?.value,
                None => 0.0,
            })
        } else {
            None
        };
        let contribution = w * omega_inv * lambda_l * l_gl2.unwrap_or(1.0) * l_rs;
        acc.add(contribution);
        entries.push(FormEntry { k, f_index: f.index, omega_inv, lambda_l, l_gl2, l_rs, contribution });
    }
    Ok(WeightEntry { k, w, dim, rs_cut, contribution: acc.sum(), forms: entries })
}

/// `Σ_{k even} W((k−1)/K) Σ_f ω_f^{−1} λ_f(ℓ) [L(1/2,f)] L(1/2,F⊗f)` with
/// `𝒴 = K^{2.75}` for the diagnostics.
pub fn weight_moment(f_gl3: &SymSquareForm, k_param: f64, w: &TestFunction, ell: u64, include_gl2: bool) -> Result<MomentReport> {
    weight_moment_with(f_gl3, k_param, w, ell, include_gl2, k_param.powf(DEFAULT_Y_EXPONENT))
}

pub fn weight_moment_with(
    f_gl3: &SymSquareForm,
    k_param: f64,
    w: &TestFunction,
    ell: u64,
    include_gl2: bool,
    y_param: f64,
) -> Result<MomentReport> {
    if !(k_param > 0.0) {
        return Err(Error::Precondition(format!("K = {k_param} must be positive")));
    }
    if ell == 0 {
        return Err(Error::Precondition("ℓ must be positive".into()));
    }
    let per_weight: Vec<WeightEntry> = weight_grid(k_param, w)
        .into_par_iter()
        .map(|k| weight_entry(f_gl3, k, w.eval((k as f64 - 1.0) / k_param), ell, include_gl2))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|e| e.w != 0.0)
        .collect();
    let mut acc = Kahan::default();
    for e in &per_weight {
        for f in &e.forms {
            acc.add(f.contribution);
        }
    }
    let moment = acc.sum();
    let main_term = if ell == 1 && !include_gl2 {
        Some(if per_weight.is_empty() { 0.0 } else { l_one(f_gl3)? * k_param / 4.0 * w.integral() })
    } else {
        None
    };
    let gap = main_term.map(|m| moment - m);
    let diag = if per_weight.is_empty() {
        OffDiagonal::zero(k_param, ell, y_param)
    } else {
        offdiag_diagnostics(f_gl3, k_param, ell, y_param, w)?
    };
    Ok(MomentReport {
        k_param,
        ell,
        include_gl2,
        moment,
        main_term,
        gap,
        y_param,
        diag_t: diag.t_abs,
        diag_t_hat: diag.t_hat,
        err_flat_bound: diag.err_flat,
        err_natural_bound: diag.err_nat,
        t_vacuous: diag.vacuous,
        per_weight,
    })
}

/// Off-diagonal sums `𝒯`, `𝒯̂` and the error-term sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffDiagonal {
    #[serde(rename = "K")]
    pub k_param: f64,
    pub ell: u64,
    pub y_param: f64,
    pub t_re: f64,
    pub t_im: f64,
    pub t_abs: f64,
    /// `|𝒯|/√ℓ`
    pub t_ratio: f64,
    pub t_hat: f64,
    /// `𝒴^{3/4} ℓ^{1/4} / K^{5/2}`
    pub err_flat: f64,
    /// `𝒴 √ℓ / K⁴`
    pub err_nat: f64,
    /// `c`-range of `𝒯` is `c <= √(𝒴ℓ)/K²`
    pub t_c_max: u64,
    pub vacuous: bool,
    pub n_cut: usize,
}

impl OffDiagonal {
    fn zero(k_param: f64, ell: u64, y_param: f64) -> Self {
        OffDiagonal {
            k_param,
            ell,
            y_param,
            t_re: 0.0,
            t_im: 0.0,
            t_abs: 0.0,
            t_ratio: 0.0,
            t_hat: 0.0,
            err_flat: 0.0,
            err_nat: 0.0,
            t_c_max: 0,
            vacuous: true,
            n_cut: 0,
        }
    }
}

/// `V*(n/𝒴)` realized by the weight-`k₀` kernel at `n·k₀³/𝒴`, `k₀` the even
/// weight nearest `K`.
struct ScaledVStar {
    hi: AfeKernel,
    lo: AfeKernel,
    scale: f64,
}

impl ScaledVStar {
    fn new(f_gl3: &SymSquareForm, k_param: f64, y_param: f64) -> Result<Self> {
        let k0 = (((k_param / 2.0).round() as u32) * 2).max(2);
        Ok(ScaledVStar {
            hi: AfeKernel::rankin_selberg(f_gl3, k0, DEFAULT_A, 3.0)?,
            lo: AfeKernel::rankin_selberg(f_gl3, k0, DEFAULT_A, -0.4)?,
            scale: (k0 as f64).powi(3) / y_param,
        })
    }

    fn eval(&self, n: usize) -> f64 {
        let y = n as f64 * self.scale;
        if y >= 1.0 {
            self.hi.eval(y)
        } else {
            self.lo.eval(y)
        }
    }

    fn n_cut(&self) -> usize {
        (self.hi.cut(RS_TOL) / self.scale).ceil() as usize
    }
}

pub fn offdiag_diagnostics(f_gl3: &SymSquareForm, k_param: f64, ell: u64, y_param: f64, w: &TestFunction) -> Result<OffDiagonal> {
    offdiag_diagnostics_with(f_gl3, k_param, ell, y_param, w, None)
}

/// As [`offdiag_diagnostics`] with an explicit `n`-cut.
pub fn offdiag_diagnostics_with(
    f_gl3: &SymSquareForm,
    k_param: f64,
    ell: u64,
    y_param: f64,
    w: &TestFunction,
    n_cut: Option<usize>,
) -> Result<OffDiagonal> {
    if !(k_param > 0.0) || !(y_param > 0.0) || ell == 0 {
        return Err(Error::Precondition("K, 𝒴 and ℓ must be positive".into()));
    }
    let v = ScaledVStar::new(f_gl3, k_param, y_param)?;
    let n_cut = n_cut.unwrap_or_else(|| v.n_cut()).max(1);
    if n_cut > f_gl3.n_max() {
        return Err(Error::TableExhausted { needed: n_cut as u64, available: f_gl3.n_max() as u64 });
    }
    let ellf = ell as f64;
    let coeff: Vec<f64> = (1..=n_cut).map(|n| f_gl3.first_row[n] / (n as f64).sqrt() * v.eval(n)).collect();

    let reach = (y_param * ellf).sqrt() / (k_param * k_param);
    let t_c_max = if reach >= 1.0 { reach.floor() as u64 } else { 0 };
    let t = (1..=t_c_max)
        .into_par_iter()
        .map(|c| {
            let table = KloostermanTable::new(c);
            let cd = DoubleDouble::from_u64(c);
            let mut acc = KahanC::default();
            for (i, &a) in coeff.iter().enumerate() {
                let n = (i + 1) as u64;
                let phase = DoubleDouble::from_u64(4 * n * ell).sqrt().div(cd).frac();
                let s = table.eval(n as i64, ell as i64) / c as f64;
                acc.add(C::from_polar(a * s, 2.0 * std::f64::consts::PI * phase));
            }
            acc.sum()
        })
        .collect::<Vec<C>>()
        .into_iter()
        .fold(KahanC::default(), |mut acc, z| {
            acc.add(z);
            acc
        })
        .sum();

    let (a, b) = w.support();
    let four_pi = 4.0 * std::f64::consts::PI;
    let c_top = (four_pi * (n_cut as f64 * ellf).sqrt() / (a * k_param)).ceil().max(1.0) as u64;
    let t_hat = (1..=c_top)
        .into_par_iter()
        .map(|c| {
            let table = KloostermanTable::new(c);
            let mut acc = Kahan::default();
            for (i, &a_n) in coeff.iter().enumerate() {
                let n = (i + 1) as f64;
                let arg = four_pi * (n * ellf).sqrt() / (c as f64 * k_param);
                if arg <= a || arg >= b {
                    continue;
                }
                acc.add(a_n * table.eval((i + 1) as i64, ell as i64) / c as f64 * w.eval(arg));
            }
            acc.sum()
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(Kahan::default(), |mut acc, x| {
            acc.add(x);
            acc
        })
        .sum();

    Ok(OffDiagonal {
        k_param,
        ell,
        y_param,
        t_re: t.re,
        t_im: t.im,
        t_abs: t.norm(),
        t_ratio: t.norm() / ellf.sqrt(),
        t_hat,
        err_flat: y_param.powf(0.75) * ellf.powf(0.25) / k_param.powf(2.5),
        err_nat: y_param * ellf.sqrt() / k_param.powi(4),
        t_c_max,
        vacuous: t_c_max == 0,
        n_cut,
    })
}

/// `sgn` with `sgn(0) = +1`.
pub fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Signs `x(p) = sgn λ_{f₀}(p)` and `x(p²) = sgn λ_{f₀}(p²)` on the primes of `[L, 2L]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amplifier {
    pub l_param: u64,
    pub primes: Vec<u64>,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

/// `𝔄_f` regrouped by the Hecke relations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplifierExpansion {
    /// `Σ (x(ℓ)² + x(ℓ²)²)`
    pub constant: f64,
    /// `Σ_{ℓ₁,ℓ₂} x(ℓ₁)x(ℓ₂) λ_f(ℓ₁ℓ₂)`
    pub first: f64,
    /// `Σ_{ℓ₁,ℓ₂} x(ℓ₁²)x(ℓ₂²) λ_f(ℓ₁²ℓ₂²)`
    pub second: f64,
    /// `Σ x(ℓ²)² λ_f(ℓ²)`
    pub diagonal: f64,
}

impl AmplifierExpansion {
    pub fn total(&self) -> f64 {
        self.constant + self.first + self.second + self.diagonal
    }
}

impl Amplifier {
    pub fn new(f0: &Newform, l_param: u64) -> Result<Self> {
        if l_param < 2 {
            return Err(Error::Precondition(format!("L = {l_param} must be at least 2")));
        }
        let sieve = Sieve::new(2 * l_param as usize);
        let primes: Vec<u64> = sieve.primes().map(|p| p as u64).filter(|&p| p >= l_param).collect();
        let mut x1 = Vec::with_capacity(primes.len());
        let mut x2 = Vec::with_capacity(primes.len());
        for &p in &primes {
            x1.push(sgn(f0.prime_power(p, 1)?));
            x2.push(sgn(f0.prime_power(p, 2)?));
        }
        Ok(Amplifier { l_param, primes, x1, x2 })
    }

    /// `Σ_{j=1,2} |Σ_ℓ λ_f(ℓ^j) x(ℓ^j)|²`.
    pub fn eval(&self, f: &Newform) -> Result<f64> {
        let mut s1 = Kahan::default();
        let mut s2 = Kahan::default();
        for (i, &p) in self.primes.iter().enumerate() {
            s1.add(f.prime_power(p, 1)? * self.x1[i]);
            s2.add(f.prime_power(p, 2)? * self.x2[i]);
        }
        Ok(s1.sum().powi(2) + s2.sum().powi(2))
    }

    pub fn expansion(&self, f: &Newform) -> Result<AmplifierExpansion> {
        let mut constant = Kahan::default();
        let mut first = Kahan::default();
        let mut second = Kahan::default();
        let mut diagonal = Kahan::default();
        for (i, &p) in self.primes.iter().enumerate() {
            constant.add(self.x1[i].powi(2) + self.x2[i].powi(2));
            diagonal.add(self.x2[i].powi(2) * f.prime_power(p, 2)?);
            for (j, &q) in self.primes.iter().enumerate() {
                first.add(self.x1[i] * self.x1[j] * hecke_lambda(f, p * q)?);
                second.add(self.x2[i] * self.x2[j] * hecke_lambda(f, (p * q).pow(2))?);
            }
        }
        Ok(AmplifierExpansion {
            constant: constant.sum(),
            first: first.sum(),
            second: second.sum(),
            diagonal: diagonal.sum(),
        })
    }

    /// `|𝒫_L|²/2`.
    pub fn self_lower_bound(&self) -> f64 {
        (self.primes.len() as f64).powi(2) / 2.0
    }
}

pub fn amplifier_eval(f0: &Newform, f: &Newform, l_param: u64) -> Result<f64> {
    Amplifier::new(f0, l_param)?.eval(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::petersson_lhs;
    use std::sync::OnceLock;

    fn delta_sym2() -> &'static SymSquareForm {
        static F: OnceLock<SymSquareForm> = OnceLock::new();
        F.get_or_init(|| SymSquareForm::new(&eigenforms(12, 20_000).unwrap()[0], 20_000).unwrap())
    }

    #[test]
    fn weight_grid_follows_support() {
        let w = TestFunction::canonical();
        let g = weight_grid(12.0, &w);
        assert_eq!(g.first(), Some(&8));
        assert_eq!(g.last(), Some(&30));
        assert!(g.iter().all(|k| k % 2 == 0));
    }

    #[test]
    fn zero_weight_function_gives_zero_report() {
        let r = weight_moment(delta_sym2(), 12.0, &TestFunction::zero(), 1, false).unwrap();
        assert!(r.per_weight.is_empty());
        assert_eq!(r.moment, 0.0);
        assert_eq!(r.main_term, Some(0.0));
        assert_eq!((r.diag_t, r.diag_t_hat, r.err_flat_bound, r.err_natural_bound), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn moment_breakdown_resums_and_respects_root_numbers() {
        let r = weight_moment(delta_sym2(), 12.0, &TestFunction::canonical(), 1, true).unwrap();
        assert!((r.moment - r.resum()).abs() <= 1e-12 * r.moment.abs().max(1.0));
        for e in &r.per_weight {
            for f in &e.forms {
                if e.k % 4 == 2 {
                    assert_eq!(f.l_gl2, Some(0.0));
                    assert_eq!(f.contribution, 0.0);
                }
                assert!(f.l_rs >= -1e-6);
            }
        }
        assert!(r.csv().lines().count() > 1);
    }

    #[test]
    fn harmonic_sum_matches_petersson() {
        for k in [12u32, 16, 24, 26] {
            let forms = eigenforms(k, 1000).unwrap();
            let s: f64 = forms.iter().map(|f| 1.0 / f.petersson_weight).sum();
            assert!((s - petersson_lhs(k, 1, 1).unwrap()).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn diagnostics_vacuous_and_stable() {
        let f = delta_sym2();
        let w = TestFunction::canonical();
        let k = 20.0f64;
        let d = offdiag_diagnostics(f, k, 1, k.powf(2.5), &w).unwrap();
        assert!(d.vacuous);
        assert_eq!(d.t_abs, 0.0);
        let k = 30.0f64;
        let d = offdiag_diagnostics(f, k, 31, k.powi(3), &w).unwrap();
        assert!(!d.vacuous);
        assert!(d.t_abs.is_finite() && d.t_ratio.is_finite());
        let doubled = offdiag_diagnostics_with(f, k, 31, k.powi(3), &w, Some(2 * d.n_cut)).unwrap();
        assert!((doubled.t_hat - d.t_hat).abs() <= 1e-6 * d.t_hat.abs().max(1e-12));
        assert!((d.err_flat - k.powf(2.25) * 31f64.powf(0.25) / k.powf(2.5)).abs() < 1e-12);
    }

    #[test]
    fn amplifier_expansion_and_self_bound() {
        let forms = eigenforms(24, 2000).unwrap();
        for l in [5u64, 11, 23] {
            let amp = Amplifier::new(&forms[0], l).unwrap();
            for f in &forms {
                let direct = amp.eval(f).unwrap();
                let exp = amp.expansion(f).unwrap().total();
                assert!(direct >= 0.0);
                assert!((direct - exp).abs() <= 1e-10 * direct.max(1.0), "L={l} {direct} {exp}");
            }
            assert!(amp.eval(&forms[0]).unwrap() >= amp.self_lower_bound());
        }
        assert_eq!(sgn(0.0), 1.0);
    }
}
