//! Two-sided numerical checks of exact identities: the Petersson formula,
//! the newform sieve, GL(3) Voronoi summation, and the exponential and
//! bilinear Kloosterman sums whose size the moment method bounds.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::{divisors, factorize, gcd, kloosterman, mobius, mod_inverse, ramanujan_sum, tau, KloostermanTable};
use crate::error::{Error, Result};
use crate::gl3::{gl3_coeff, SymSquareForm};
use crate::modforms::{eigenforms, hecke_lambda, Newform};
use crate::numeric::{ln_gamma_real, Kahan, KahanC};
use crate::special::{bessel_j, bessel_j_table, OmegaTable, OmegaTransform, Sign, TestFunction};

/// Outcome of one two-sided evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// imaginary parts, zero for real identities
    pub lhs_im: f64,
    pub rhs_im: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub truncation_bound: f64,
    /// floating-point accumulation allowance
    #[serde(default)]
    pub rounding_bound: f64,
    pub parameters: Value,
}

impl IdentityReport {
    pub fn new(lhs: Complex64, rhs: Complex64, truncation_bound: f64, parameters: Value) -> Self {
        let abs_gap = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm());
        let rel_gap = if scale > 0.0 { abs_gap / scale } else { 0.0 };
        IdentityReport {
            lhs: lhs.re,
            rhs: rhs.re,
            lhs_im: lhs.im,
            rhs_im: rhs.im,
            abs_gap,
            rel_gap,
            truncation_bound,
            rounding_bound: 0.0,
            parameters,
        }
    }

    pub fn with_rounding(mut self, rounding_bound: f64) -> Self {
        self.rounding_bound = rounding_bound;
        self
    }

    pub fn lhs_complex(&self) -> Complex64 {
        Complex64::new(self.lhs, self.lhs_im)
    }

    pub fn rhs_complex(&self) -> Complex64 {
        Complex64::new(self.rhs, self.rhs_im)
    }

    /// `abs_gap <= rel_tol·max(|lhs|, |rhs|) + truncation_bound + rounding_bound`.
    pub fn pass(&self, rel_tol: f64) -> bool {
        let scale = self.lhs_complex().norm().max(self.rhs_complex().norm());
        self.abs_gap <= rel_tol * scale + self.truncation_bound + self.rounding_bound
    }
}

// ---------------------------------------------------------------------------
// Petersson formula

/// Eigenvalue tables shared by the spectral sides.
pub const SPECTRAL_N_MAX: usize = 1000;

fn forms(k: u32) -> Result<Arc<Vec<Newform>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Newform>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&k) {
        return Ok(f.clone());
    }
    let f = Arc::new(eigenforms(k, SPECTRAL_N_MAX)?);
    cache.lock().unwrap().insert(k, f.clone());
    Ok(f)
}

fn check_weight(k: u32) -> Result<()> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::Precondition(format!("weight {k} must be even and at least 2")));
    }
    Ok(())
}

/// `Σ_f ω_f^{-1} λ_f(m) λ_f(n)` over the level-1 eigenbasis.
pub fn petersson_lhs(k: u32, m: u64, n: u64) -> Result<f64> {
    Ok(spectral_side(k, m, n)?.0)
}

/// Spectral side with `Σ |terms|`.
fn spectral_side(k: u32, m: u64, n: u64) -> Result<(f64, f64)> {
    check_weight(k)?;
    if m == 0 || n == 0 {
        return Err(Error::Precondition("indices must be positive".into()));
    }
    let mut acc = Kahan::default();
    let mut mass = 0.0;
    for f in forms(k)?.iter() {
        let t = hecke_lambda(f, m)? * hecke_lambda(f, n)? / f.petersson_weight;
        acc.add(t);
        mass += t.abs();
    }
    Ok((acc.sum(), mass))
}

/// Rounding allowance for a compensated sum of the given absolute mass.
fn rounding(mass: f64) -> f64 {
    64.0 * f64::EPSILON * mass
}

/// Kloosterman side at level `R`, truncated at `c <= c_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeterssonSeries {
    pub value: f64,
    pub c_max: u64,
    pub truncation_bound: f64,
    /// `2π Σ |terms|`
    pub mass: f64,
}

/// `ln` of the constant `B` in the tail bound `B·C^{1−ν}` for the terms with
/// `c > C`, from `|S(a,b;q)| <= 2√(q·(a,b))` and `|J_ν(x)| <= (x/2)^ν/ν!`.
fn ln_tail_constant(k: u32, a: u64, b: u64, level: u64) -> f64 {
    let nu = (k - 1) as f64;
    let g = gcd(a, b) as f64;
    let x1 = 4.0 * PI * ((a as f64) * (b as f64)).sqrt() / level as f64;
    (4.0 * PI * g.sqrt() / (nu - 1.0)).ln() + nu * (x1 / 2.0).ln() - ln_gamma_real(nu + 1.0)
}

/// `2π·Σ_{c > C} |S(a,b;cR)/(cR)·J_{k−1}(4π√(ab)/(cR))|` bounded above.
pub fn petersson_tail_bound(k: u32, a: u64, b: u64, level: u64, c_max: u64) -> f64 {
    if k < 4 {
        return f64::INFINITY;
    }
    let nu = (k - 1) as f64;
    (ln_tail_constant(k, a, b, level) + (1.0 - nu) * (c_max.max(1) as f64).ln()).exp()
}

/// Smallest `C` whose tail bound is at most `tol`.
pub fn petersson_cmax(k: u32, a: u64, b: u64, level: u64, tol: f64) -> u64 {
    let nu = (k - 1) as f64;
    let c = ((ln_tail_constant(k, a, b, level) - tol.ln()) / (nu - 1.0)).exp();
    (c.ceil() as u64).max(1)
}

fn i_pow_minus_k(k: u32) -> f64 {
    if (k / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `δ(a,b) + 2π i^{−k} Σ_{c <= c_max} S(a,b;cR)/(cR) · J_{k−1}(4π√(ab)/(cR))`.
pub fn petersson_rhs(k: u32, a: u64, b: u64, level: u64, c_max: u64) -> Result<PeterssonSeries> {
    check_weight(k)?;
    if a == 0 || b == 0 || level == 0 {
        return Err(Error::Precondition("indices and level must be positive".into()));
    }
    let root = 4.0 * PI * ((a as f64) * (b as f64)).sqrt();
    let mut acc = Kahan::default();
    let mut mass = 0.0;
    for c in 1..=c_max {
        let q = c * level;
        let s = kloosterman(a as i64, b as i64, q).value();
        if s != 0.0 {
            let t = s / q as f64 * bessel_j(k - 1, root / q as f64);
            acc.add(t);
            mass += t.abs();
        }
    }
    let delta = if a == b { 1.0 } else { 0.0 };
    Ok(PeterssonSeries {
        value: delta + 2.0 * PI * i_pow_minus_k(k) * acc.sum(),
        c_max,
        truncation_bound: petersson_tail_bound(k, a, b, level, c_max),
        mass: 2.0 * PI * mass,
    })
}

fn petersson_params(k: u32, m: u64, n: u64, c_max: u64) -> Value {
    json!({ "identity": "petersson", "k": k, "m": m, "n": n, "level": 1, "c_max": c_max })
}

/// Both sides of the level-1 Petersson formula with an explicit cutoff.
pub fn petersson_two_sided(k: u32, m: u64, n: u64, c_max: u64) -> Result<IdentityReport> {
    if m as usize > SPECTRAL_N_MAX || n as usize > SPECTRAL_N_MAX {
        return Err(Error::Precondition(format!("m, n must be at most {SPECTRAL_N_MAX}")));
    }
    let (lhs, lhs_mass) = spectral_side(k, m, n)?;
    let rhs = petersson_rhs(k, m, n, 1, c_max)?;
    Ok(IdentityReport::new(
        Complex64::new(lhs, 0.0),
        Complex64::new(rhs.value, 0.0),
        rhs.truncation_bound,
        petersson_params(k, m, n, c_max),
    )
    .with_rounding(rounding(lhs_mass + rhs.mass + 1.0)))
}

/// Cutoff chosen so the tail bound sits at `1e-10` of the spectral side.
pub fn petersson_auto(k: u32, m: u64, n: u64) -> Result<IdentityReport> {
    check_weight(k)?;
    if k < 4 {
        return Err(Error::Precondition("the tail bound needs k >= 4".into()));
    }
    let lhs = petersson_lhs(k, m, n)?;
    let tol = (1e-10 * lhs.abs()).max(1e-15);
    petersson_two_sided(k, m, n, petersson_cmax(k, m, n, 1, tol))
}

/// Every `(k, m, n)` with `1 <= m, n <= m_max`, sharing Kloosterman sums and
/// Bessel values across weights. Rows are ordered by `(k, m, n)`.
pub fn petersson_grid(weights: &[u32], m_max: u64) -> Result<Vec<IdentityReport>> {
    for &k in weights {
        check_weight(k)?;
        if k < 4 {
            return Err(Error::Precondition("the tail bound needs k >= 4".into()));
        }
    }
    if m_max as usize > SPECTRAL_N_MAX {
        return Err(Error::Precondition(format!("m_max must be at most {SPECTRAL_N_MAX}")));
    }
    let max_order = weights.iter().map(|&k| k as usize - 1).max().unwrap_or(0);
    struct Pair {
        m: u64,
        n: u64,
        lhs: Vec<f64>,
        lhs_mass: Vec<f64>,
        cut: Vec<u64>,
        acc: Vec<Kahan>,
        mass: Vec<f64>,
    }
    let mut pairs = Vec::new();
    for m in 1..=m_max {
        for n in 1..=m_max {
            let mut lhs = Vec::with_capacity(weights.len());
            let mut lhs_mass = Vec::with_capacity(weights.len());
            let mut cut = Vec::with_capacity(weights.len());
            for &k in weights {
                let (l, lm) = spectral_side(k, m, n)?;
                let tol = (1e-10 * l.abs()).max(1e-15);
                lhs.push(l);
                lhs_mass.push(lm);
                cut.push(petersson_cmax(k, m, n, 1, tol));
            }
            let w = weights.len();
            pairs.push(Pair { m, n, lhs, lhs_mass, cut, acc: vec![Kahan::default(); w], mass: vec![0.0; w] });
        }
    }
    let c_top = pairs.iter().flat_map(|p| p.cut.iter().copied()).max().unwrap_or(0);
    for c in 1..=c_top {
        let table = KloostermanTable::new(c);
        pairs.par_iter_mut().for_each(|p| {
            if p.cut.iter().all(|&cm| cm < c) {
                return;
            }
            let s = table.eval(p.m as i64, p.n as i64);
            if s == 0.0 {
                return;
            }
            let x = 4.0 * PI * ((p.m * p.n) as f64).sqrt() / c as f64;
            let j = bessel_j_table(max_order, x);
            for (i, &k) in weights.iter().enumerate() {
                if c <= p.cut[i] {
                    let t = s / c as f64 * j[k as usize - 1];
                    p.acc[i].add(t);
                    p.mass[i] += t.abs();
                }
            }
        });
    }
    let mut out = Vec::with_capacity(pairs.len() * weights.len());
    for (i, &k) in weights.iter().enumerate() {
        for p in &pairs {
            let delta = if p.m == p.n { 1.0 } else { 0.0 };
            let rhs = delta + 2.0 * PI * i_pow_minus_k(k) * p.acc[i].sum();
            out.push(IdentityReport::new(
                Complex64::new(p.lhs[i], 0.0),
                Complex64::new(rhs, 0.0),
                petersson_tail_bound(k, p.m, p.n, 1, p.cut[i]),
                petersson_params(k, p.m, p.n, p.cut[i]),
            )
            .with_rounding(rounding(p.lhs_mass[i] + 2.0 * PI * p.mass[i] + 1.0)));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Newform sieve

/// Largest Bessel argument `4π√(ab)/R` evaluated through the Kloosterman side.
pub const SIEVE_RHS_MAX_ARG: f64 = 1500.0;

/// Terms of the `l`-sum are kept while their size estimate exceeds this.
pub const SIEVE_TERM_CUT: f64 = 1e-12;

/// `Δ*_{k,M}(m,n)` with the estimated size of the omitted terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaStar {
    pub value: f64,
    pub truncation_bound: f64,
    pub terms: usize,
}

/// `ν(M) = M Π_{p | M} (1 + 1/p)`.
pub fn nu_index(m: u64) -> f64 {
    factorize(m).iter().fold(m as f64, |acc, &(p, _)| acc * (1.0 + 1.0 / p as f64))
}

/// `Δ_{k,R}(a·l², b)` for `l = Π p^e`, with `(value, truncation)`, or `None`
/// when neither the Kloosterman side nor a level-1 spectrum is in reach.
fn delta_level(k: u32, level: u64, a: u64, l: &[(u64, u32)], b: u64) -> Result<Option<(f64, f64)>> {
    let big_a = l.iter().try_fold(a as u128, |acc, &(p, e)| acc.checked_mul((p as u128).checked_pow(2 * e)?));
    if let Some(aa) = big_a.filter(|&v| v < 1 << 62) {
        let aa = aa as u64;
        let arg = 4.0 * PI * ((aa as f64) * (b as f64)).sqrt() / level as f64;
        if arg <= SIEVE_RHS_MAX_ARG {
            let c_max = petersson_cmax(k, aa, b, level, 1e-15);
            let r = petersson_rhs(k, aa, b, level, c_max)?;
            return Ok(Some((r.value, r.truncation_bound)));
        }
    }
    if level != 1 {
        return Ok(None);
    }
    let mut acc = Kahan::default();
    for f in forms(k)?.iter() {
        let mut lam = hecke_lambda(f, a)? * hecke_lambda(f, b)?;
        for &(p, e) in l {
            lam *= f.prime_power(p, 2 * e)?;
        }
        acc.add(lam / f.petersson_weight);
    }
    Ok(Some((acc.sum(), 0.0)))
}

/// Exponent vectors `l | S^∞` whose estimate `τ(l²)/l · scale` exceeds `cut`.
fn sieve_l_values(primes: &[u64], scale: f64, cut: f64) -> Vec<Vec<(u64, u32)>> {
    fn rec(primes: &[u64], i: usize, cur: &mut Vec<(u64, u32)>, size: f64, cut: f64, out: &mut Vec<Vec<(u64, u32)>>) {
        if i == primes.len() {
            out.push(cur.clone());
            return;
        }
        let p = primes[i] as f64;
        let mut e = 0u32;
        loop {
            let f = (2 * e + 1) as f64 / p.powi(e as i32);
            // the factor (2e+1)/p^e is decreasing from e = 1 on
            if e > 0 && size * f < cut {
                break;
            }
            cur.push((primes[i], e));
            rec(primes, i + 1, cur, size * f, cut, out);
            cur.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    rec(primes, 0, &mut Vec::new(), scale, cut, &mut out);
    out
}

/// The newform sieve with the `l`-sum cut at `term_cut`.
pub fn delta_star_with(k: u32, level: u64, m: u64, n: u64, term_cut: f64) -> Result<DeltaStar> {
    check_weight(k)?;
    if k < 4 {
        return Err(Error::Precondition("the tail bound needs k >= 4".into()));
    }
    if level == 0 || mobius(level) == 0 {
        return Err(Error::Precondition(format!("level {level} must be square-free")));
    }
    if m == 0 || n == 0 {
        return Err(Error::Precondition("indices must be positive".into()));
    }
    if gcd(m, level) != 1 {
        return Err(Error::Precondition(format!("gcd(m, M) = gcd({m}, {level}) must be 1")));
    }
    if level == 1 {
        let c_max = petersson_cmax(k, m, n, 1, 1e-15);
        let r = petersson_rhs(k, m, n, 1, c_max)?;
        return Ok(DeltaStar { value: r.value, truncation_bound: r.truncation_bound, terms: 1 });
    }
    let mut value = Kahan::default();
    let mut bound = 0.0;
    let mut terms = 0;
    for s in divisors(level) {
        let r = level / s;
        let mu_s = mobius(s) as f64;
        // ν((m,S)) = 1 since gcd(m, M) = 1
        let outer = mu_s / s as f64;
        let primes: Vec<u64> = factorize(s).iter().map(|&(p, _)| p).collect();
        let scale = match delta_level(k, r, 1, &[], 1)? {
            Some((v, _)) => v.abs(),
            None => return Err(Error::Precondition(format!("Δ at level {r} is out of reach"))),
        } * tau(m) as f64
            * tau(n) as f64;
        let kept = sieve_l_values(&primes, scale, term_cut);
        let skipped: f64 = sieve_l_values(&primes, scale, term_cut * 1e-6)
            .iter()
            .filter(|l| !kept.contains(l))
            .map(|l| scale * l.iter().map(|&(p, e)| (2 * e + 1) as f64 / (p as f64).powi(e as i32)).product::<f64>())
            .sum();
        bound += outer.abs() * skipped;
        for l in &kept {
            let lval: f64 = l.iter().map(|&(p, e)| (p as f64).powi(e as i32)).product();
            for l1 in divisors(s) {
                if n % (l1 * l1) != 0 {
                    continue;
                }
                let mu1 = mobius(l1) as f64;
                let w = outer / lval * mu1 * l1 as f64;
                let est = scale * l.iter().map(|&(p, e)| (2 * e + 1) as f64 / (p as f64).powi(e as i32)).product::<f64>();
                match delta_level(k, r, m, l, n / (l1 * l1))? {
                    Some((v, t)) => {
                        value.add(w * v);
                        bound += (w * t).abs();
                        terms += 1;
                    }
                    None => bound += (outer * mu1 * l1 as f64).abs() * est,
                }
            }
        }
    }
    Ok(DeltaStar { value: value.sum(), truncation_bound: bound, terms })
}

/// `Δ*_{k,M}(m,n)` for square-free `M` with `gcd(m, M) = 1`.
pub fn delta_star(k: u32, level: u64, m: u64, n: u64) -> Result<f64> {
    Ok(delta_star_with(k, level, m, n, SIEVE_TERM_CUT)?.value)
}

// ---------------------------------------------------------------------------
// GL(3) Voronoi

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoronoiCase {
    Unramified,
    Ramified,
}

/// Default upper end of the tabulated `Ω±` range.
pub const VORONOI_X_MAX: f64 = 1e6;

#[derive(Clone, Debug)]
struct OmegaPair {
    plus: OmegaTable,
    minus: OmegaTable,
    plus_t: OmegaTransform,
    minus_t: OmegaTransform,
}

/// `Ω±` tables for one weight and test function, reused across a grid.
#[derive(Clone, Debug)]
pub struct VoronoiKernel {
    pub kappa: u32,
    w: TestFunction,
    /// `None` for the zero function
    tables: Option<OmegaPair>,
    x_max: f64,
    /// `ln x` grid and `∫_x^∞ (|Ω₊| + |Ω₋|) dt/t` on it
    tail_ln: Vec<f64>,
    tail_int: Vec<f64>,
}

impl VoronoiKernel {
    pub fn new(w: &TestFunction, kappa: u32, x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_min > 0.0 && x_max > x_min) {
            return Err(Error::Precondition("Ω range must satisfy 0 < x_min < x_max".into()));
        }
        let steps = 400usize;
        let (l0, l1) = (x_min.ln(), x_max.ln());
        let dl = (l1 - l0) / steps as f64;
        let tail_ln: Vec<f64> = (0..=steps).map(|i| l0 + i as f64 * dl).collect();
        let (a, b) = w.support();
        let vanishes = (0..=2000).all(|i| w.eval(a + (b - a) * i as f64 / 2000.0) == 0.0);
        if vanishes {
            let tail_int = vec![0.0; steps + 1];
            return Ok(VoronoiKernel { kappa, w: w.clone(), tables: None, x_max, tail_ln, tail_int });
        }
        let plus_t = OmegaTransform::new(w, kappa, Sign::Plus)?;
        let minus_t = OmegaTransform::new(w, kappa, Sign::Minus)?;
        let plus = OmegaTable::new(&plus_t, x_min, x_max);
        let minus = OmegaTable::new(&minus_t, x_min, x_max);
        // running maximum from the right, integrated against dt/t
        let mags: Vec<f64> = tail_ln.iter().map(|&l| plus_t.eval(l.exp()).0.norm() + minus_t.eval(l.exp()).0.norm()).collect();
        let mut env = mags;
        for i in (0..steps).rev() {
            env[i] = env[i].max(env[i + 1]);
        }
        let mut tail_int = vec![0.0; steps + 1];
        // beyond x_max the transforms are at their rounding floor
        tail_int[steps] = env[steps];
        for i in (0..steps).rev() {
            tail_int[i] = tail_int[i + 1] + env[i] * dl;
        }
        let x_max = plus.x_max();
        let tables = Some(OmegaPair { plus, minus, plus_t, minus_t });
        Ok(VoronoiKernel { kappa, w: w.clone(), tables, x_max, tail_ln, tail_int })
    }

    /// Tables covering every desk-scale argument.
    pub fn standard(w: &TestFunction, kappa: u32) -> Result<Self> {
        Self::new(w, kappa, 1e-3, VORONOI_X_MAX)
    }

    pub fn test_function(&self) -> &TestFunction {
        &self.w
    }

    pub fn omega(&self, sign: Sign, x: f64) -> Complex64 {
        let Some(t) = &self.tables else {
            return Complex64::new(0.0, 0.0);
        };
        let (table, direct) = match sign {
            Sign::Plus => (&t.plus, &t.plus_t),
            Sign::Minus => (&t.minus, &t.minus_t),
        };
        match table.eval(x) {
            Some(v) => v,
            None if x > table.x_max() => Complex64::new(0.0, 0.0),
            None => direct.eval(x).0,
        }
    }

    /// `∫_x^∞ (|Ω₊(t)| + |Ω₋(t)|) dt/t` with a monotone envelope.
    pub fn tail_integral(&self, x: f64) -> f64 {
        let l = x.ln();
        let n = self.tail_ln.len();
        if l <= self.tail_ln[0] {
            return self.tail_int[0];
        }
        if l >= self.tail_ln[n - 1] {
            return self.tail_int[n - 1];
        }
        let i = ((l - self.tail_ln[0]) / (self.tail_ln[1] - self.tail_ln[0])) as usize;
        self.tail_int[i.min(n - 1)]
    }

    /// Smallest `x` on the envelope grid with `tail_integral(x) <= tol`.
    pub fn cut_for(&self, tol: f64) -> f64 {
        self.tail_ln
            .iter()
            .zip(&self.tail_int)
            .find(|(_, &t)| t <= tol)
            .map(|(&l, _)| l.exp())
            .unwrap_or(self.x_max)
    }
}

/// Truncation policy for the dual sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoronoiTruncation {
    /// `ε` in `n₂ ≪ c³m/(n₁² X^{1−ε})`
    pub epsilon: f64,
    pub safety: f64,
    /// the dual sum also runs until `∫_x^∞ |Ω| dt/t` falls below this
    pub omega_tail: f64,
}

impl Default for VoronoiTruncation {
    fn default() -> Self {
        VoronoiTruncation { epsilon: 0.1, safety: 8.0, omega_tail: 1e-9 }
    }
}

fn check_voronoi(f: &SymSquareForm, m: u64, c: u64, x: f64) -> Result<()> {
    if m == 0 || c == 0 {
        return Err(Error::Precondition("m and c must be positive".into()));
    }
    if !(x > 0.0) {
        return Err(Error::Precondition("X must be positive".into()));
    }
    if f.n_max() < 3 {
        return Err(Error::Precondition("coefficient table too short".into()));
    }
    Ok(())
}

/// `Σ_n A(m,n) e(n ā/c) w(n/X)`.
pub fn voronoi_lhs(f: &SymSquareForm, m: u64, a: i64, c: u64, w: &TestFunction, x: f64) -> Result<Complex64> {
    check_voronoi(f, m, c, x)?;
    let abar = mod_inverse(a, c)?.value();
    let (_, b) = w.support();
    let n_top = (b * x).floor() as u64;
    let mut acc = KahanC::default();
    for n in 1..=n_top {
        let wv = w.eval(n as f64 / x);
        if wv == 0.0 {
            continue;
        }
        let r = (n % c) * abar % c;
        let phase = Complex64::from_polar(1.0, 2.0 * PI * r as f64 / c as f64);
        acc.add(phase * (gl3_coeff(f, m, n)? * wv));
    }
    Ok(acc.sum())
}

/// Dual side for several residues `a` at once, with one tail bound shared by all.
pub fn voronoi_rhs_batch(
    kernel: &VoronoiKernel,
    f: &SymSquareForm,
    m: u64,
    residues: &[i64],
    c: u64,
    x: f64,
    case: VoronoiCase,
    trunc: &VoronoiTruncation,
) -> Result<(Vec<Complex64>, f64)> {
    check_voronoi(f, m, c, x)?;
    if f.base_weight != kernel.kappa {
        return Err(Error::Precondition("kernel weight differs from the form".into()));
    }
    for &a in residues {
        if gcd(a.rem_euclid(c as i64) as u64, c) != 1 && c > 1 {
            return Err(Error::Precondition(format!("gcd(a, c) = gcd({a}, {c}) must be 1")));
        }
    }
    // desk scale has N = 1, so both branches apply
    let level = 1u64;
    let cm = c * m;
    let c3m = (c as f64).powi(3) * m as f64;
    let x_cut = kernel.cut_for(trunc.omega_tail);
    let rms = {
        let n = f.n_max().min(10_000);
        ((1..=n).map(|i| f.first_row[i].powi(2)).sum::<f64>() / n as f64).sqrt()
    };
    let mut out = vec![KahanC::default(); residues.len()];
    let mut bound = 0.0;
    for n1 in divisors(cm) {
        let q = cm / n1;
        let n1sq = (n1 * n1) as f64;
        let heuristic = trunc.safety * c3m / (n1sq * x.powf(1.0 - trunc.epsilon));
        let by_tail = x_cut * c3m / (n1sq * x);
        let mut n2_max = heuristic.max(by_tail).ceil() as u64;
        // A(n1, n2) needs first-row entries up to n2
        let cap = f.n_max() as u64;
        n2_max = n2_max.min(cap);
        let table = KloostermanTable::new(q);
        let first_args: Vec<i64> = residues
            .iter()
            .map(|&a| match case {
                VoronoiCase::Unramified => {
                    let nbar = mod_inverse(level as i64, q).map(|r| r.value()).unwrap_or(0) as i64;
                    a * m as i64 * nbar
                }
                VoronoiCase::Ramified => a * m as i64,
            })
            .collect();
        let rows: Vec<Vec<f64>> = first_args.iter().map(|&u| table.row(u)).collect();
        let s_max = rows.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let a_n1: f64 = divisors(n1).iter().map(|&d| f.a((n1 / d) as usize).map(f64::abs)).sum::<Result<f64>>()?;
        let chunk: Vec<(u64, Complex64, Complex64, f64)> = (1..=n2_max)
            .into_par_iter()
            .map(|n2| -> Result<_> {
                let arg = n2 as f64 * n1sq * x / (c3m * level as f64);
                let coef = gl3_coeff(f, n1, n2)? / (n1 * n2) as f64;
                Ok((n2, kernel.omega(Sign::Plus, arg), kernel.omega(Sign::Minus, arg), coef))
            })
            .collect::<Result<_>>()?;
        for (j, row) in rows.iter().enumerate() {
            let acc = &mut out[j];
            for &(n2, op, om, coef) in &chunk {
                if coef == 0.0 {
                    continue;
                }
                let sp = row[(n2 % q) as usize];
                let sm = row[((q - n2 % q) % q) as usize];
                acc.add((op * sp + om * sm) * coef);
            }
        }
        let x_reached = (n2_max as f64 + 1.0) * n1sq * x / c3m;
        bound += c as f64 * (level as f64).sqrt() * rms * a_n1 / n1 as f64 * s_max * kernel.tail_integral(x_reached);
    }
    let scale = c as f64 * (level as f64).sqrt();
    Ok((out.iter().map(|a| a.sum() * scale).collect(), bound))
}

fn voronoi_params(m: u64, a: i64, c: u64, x: f64, case: VoronoiCase) -> Value {
    json!({ "identity": "voronoi", "m": m, "a": a, "c": c, "X": x, "case": case, "N": 1 })
}

/// Both sides of GL(3) Voronoi with precomputed `Ω±` tables.
pub fn voronoi_two_sided_with(
    kernel: &VoronoiKernel,
    f: &SymSquareForm,
    m: u64,
    a: i64,
    c: u64,
    x: f64,
    case: VoronoiCase,
) -> Result<IdentityReport> {
    let lhs = voronoi_lhs(f, m, a, c, kernel.test_function(), x)?;
    let (rhs, bound) = voronoi_rhs_batch(kernel, f, m, &[a], c, x, case, &VoronoiTruncation::default())?;
    Ok(IdentityReport::new(lhs, rhs[0], bound, voronoi_params(m, a, c, x, case)))
}

/// Both sides of GL(3) Voronoi for `F = sym² g`.
pub fn voronoi_two_sided(
    f: &SymSquareForm,
    m: u64,
    a: i64,
    c: u64,
    w: &TestFunction,
    x: f64,
    case: VoronoiCase,
) -> Result<IdentityReport> {
    let kernel = VoronoiKernel::standard(w, f.base_weight)?;
    voronoi_two_sided_with(&kernel, f, m, a, c, x, case)
}

/// One Voronoi grid point with both branches evaluated.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VoronoiGridRow {
    pub report: IdentityReport,
    /// relative gap between the unramified and ramified dual sides
    pub branch_gap: f64,
}

/// All units `a mod c` for one `(m, c, X)`, both branches.
pub fn voronoi_grid_point(kernel: &VoronoiKernel, f: &SymSquareForm, m: u64, c: u64, x: f64) -> Result<Vec<VoronoiGridRow>> {
    let residues: Vec<i64> = if c == 1 { vec![1] } else { crate::arith::units(c).into_iter().map(|u| u as i64).collect() };
    let trunc = VoronoiTruncation::default();
    let (unr, bound) = voronoi_rhs_batch(kernel, f, m, &residues, c, x, VoronoiCase::Unramified, &trunc)?;
    let (ram, _) = voronoi_rhs_batch(kernel, f, m, &residues, c, x, VoronoiCase::Ramified, &trunc)?;
    residues
        .iter()
        .zip(unr.iter().zip(&ram))
        .map(|(&a, (&u, &r))| {
            let lhs = voronoi_lhs(f, m, a, c, kernel.test_function(), x)?;
            let scale = u.norm().max(r.norm());
            let branch_gap = if scale > 0.0 { (u - r).norm() / scale } else { 0.0 };
            Ok(VoronoiGridRow {
                report: IdentityReport::new(lhs, u, bound, voronoi_params(m, a, c, x, VoronoiCase::Unramified)),
                branch_gap,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Nonlinear exponential sums

/// A real `α` with `α²` rational, stored as `±√(num/den)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticAlpha {
    pub square_num: u64,
    pub square_den: u64,
    pub negative: bool,
}

impl QuadraticAlpha {
    /// `α = p/q`.
    pub fn rational(p: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Precondition("denominator must be positive".into()));
        }
        let a = p.unsigned_abs();
        Ok(QuadraticAlpha { square_num: a * a, square_den: q * q, negative: p < 0 })
    }

    /// `α = ±√(num/den)`.
    pub fn sqrt_of(num: u64, den: u64, negative: bool) -> Result<Self> {
        if den == 0 {
            return Err(Error::Precondition("denominator must be positive".into()));
        }
        Ok(QuadraticAlpha { square_num: num, square_den: den, negative })
    }

    pub fn value(&self) -> f64 {
        let v = (self.square_num as f64 / self.square_den as f64).sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }
}

/// Caller-declared derivative envelope `x^i W^{(i)}(x/X) ≪ Z P^i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub z: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearSum {
    pub value: f64,
    pub value_im: f64,
    pub full_bound: f64,
    pub ratio: f64,
}

/// `Σ_m A(m,1)/√m · e(α√m) W(m/X)` against `Z P (1 + |α| log X)`.
pub fn nonlinear_exp_sum(f: &SymSquareForm, alpha: QuadraticAlpha, x: f64, w: &TestFunction, env: Envelope) -> Result<NonlinearSum> {
    if x < 2.0 {
        return Err(Error::Precondition("X must be at least 2".into()));
    }
    let (_, b) = w.support();
    let top = (b * x).floor() as usize;
    if top > f.n_max() {
        return Err(Error::TableExhausted { needed: top as u64, available: f.n_max() as u64 });
    }
    let al = alpha.value();
    let mut acc = KahanC::default();
    for m in 1..=top {
        let wv = w.eval(m as f64 / x);
        if wv == 0.0 {
            continue;
        }
        // α√m = √(num·m/den); reduce the phase mod 1 in double-double
        let t = crate::numeric::DoubleDouble::from_u64(alpha.square_num * m as u64)
            .div(crate::numeric::DoubleDouble::from_u64(alpha.square_den))
            .sqrt()
            .frac();
        let t = if al < 0.0 { -t } else { t };
        acc.add(Complex64::from_polar(1.0, 2.0 * PI * t) * (f.first_row[m] / (m as f64).sqrt() * wv));
    }
    let v = acc.sum();
    let full_bound = env.z * env.p * (1.0 + al.abs() * x.ln());
    Ok(NonlinearSum { value: v.re, value_im: v.im, full_bound, ratio: v.norm() / full_bound })
}

// ---------------------------------------------------------------------------
// Bilinear forms with Kloosterman sums

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BilinearLemma {
    /// general `h`
    General,
    /// `gcd(h, q) = 1`, with the large-sieve term `√Z₂ Z X q^{3/4}`
    Coprime,
}

/// `W(u, v) = W₁(u) W₂(v)`.
#[derive(Clone, Debug)]
pub struct ProductWeight {
    pub first: TestFunction,
    pub second: TestFunction,
}

impl ProductWeight {
    pub fn canonical() -> Self {
        ProductWeight { first: TestFunction::canonical(), second: TestFunction::canonical() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearRegime {
    pub x: f64,
    pub y: f64,
    pub q: u64,
    pub h: i64,
    pub z: f64,
    pub z1: f64,
    pub z2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearBoundReport {
    pub lhs_value: f64,
    pub full_bound: f64,
    /// `|lhs| / full_bound`, recorded only
    pub ratio: f64,
    pub regime: BilinearRegime,
    pub lemma: BilinearLemma,
}

fn residue_sums(weight: &TestFunction, len: f64, q: u64, coeff: impl Fn(usize) -> Result<f64>) -> Result<Vec<f64>> {
    let (_, b) = weight.support();
    let top = (b * len).floor() as usize;
    let mut sums = vec![Kahan::default(); q as usize];
    for n in 1..=top {
        let wv = weight.eval(n as f64 / len);
        if wv != 0.0 {
            sums[n % q as usize].add(coeff(n)? * wv);
        }
    }
    Ok(sums.iter().map(Kahan::sum).collect())
}

/// `Σ_r u_r e(r t/q)` for every `t mod q`.
fn dft(u: &[f64], roots: &[Complex64]) -> Vec<Complex64> {
    let q = u.len();
    (0..q)
        .into_par_iter()
        .map(|t| {
            let mut acc = KahanC::default();
            for (r, &ur) in u.iter().enumerate() {
                if ur != 0.0 {
                    acc.add(roots[(r * t) % q] * ur);
                }
            }
            acc.sum()
        })
        .collect()
}

/// `Σ_n Σ_m A(m,1)/√m · S(nh, m; q) · W(n/X, m/Y)`.
pub fn bilinear_sum(f: &SymSquareForm, h: i64, q: u64, x: f64, y: f64, w: &ProductWeight) -> Result<f64> {
    if q == 0 || !(x > 0.0 && y > 0.0) {
        return Err(Error::Precondition("q, X and Y must be positive".into()));
    }
    let u = residue_sums(&w.first, x, q, |_| Ok(1.0))?;
    let v = residue_sums(&w.second, y, q, |m| Ok(f.a(m)? / (m as f64).sqrt()))?;
    if q == 1 {
        return Ok(u[0] * v[0]);
    }
    // S(rh, s; q) = Σ_x e((rh x + s x̄)/q), so the double sum factors through DFTs
    let roots: Vec<Complex64> = (0..q).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / q as f64)).collect();
    let uh = dft(&u, &roots);
    let vh = dft(&v, &roots);
    let xs = crate::arith::units(q);
    let inv = crate::arith::batch_inverse(&xs, q)?;
    let hq = h.rem_euclid(q as i64) as u64;
    let mut acc = KahanC::default();
    for (&xu, &xb) in xs.iter().zip(&inv) {
        acc.add(uh[(hq * xu % q) as usize] * vh[xb as usize]);
    }
    Ok(acc.sum().re)
}

/// The `h = 0` collapse `S(0, m; q) = c_q(m)`, summed directly.
pub fn bilinear_sum_ramanujan(f: &SymSquareForm, q: u64, x: f64, y: f64, w: &ProductWeight) -> Result<f64> {
    let u: f64 = residue_sums(&w.first, x, 1, |_| Ok(1.0))?[0];
    let (_, b) = w.second.support();
    let top = (b * y).floor() as usize;
    let mut acc = Kahan::default();
    for m in 1..=top {
        let wv = w.second.eval(m as f64 / y);
        if wv != 0.0 {
            acc.add(f.a(m)? / (m as f64).sqrt() * wv * ramanujan_sum(m as i64, q) as f64);
        }
    }
    Ok(u * acc.sum())
}

/// The bilinear sum against the right side of the chosen lemma.
pub fn bilinear_form(f: &SymSquareForm, regime: BilinearRegime, w: &ProductWeight, lemma: BilinearLemma) -> Result<BilinearBoundReport> {
    let BilinearRegime { x, y, q, h, z, z1, z2 } = regime;
    if lemma == BilinearLemma::Coprime && gcd(h.rem_euclid(q as i64) as u64, q) != 1 && q > 1 {
        return Err(Error::Precondition(format!("gcd(h, q) = gcd({h}, {q}) must be 1")));
    }
    let lhs = bilinear_sum(f, h, q, x, y, w)?;
    let qf = q as f64;
    let hq = gcd(h.unsigned_abs(), q).max(1) as f64;
    let full_bound = match lemma {
        BilinearLemma::General => z1 * z * (x * y * qf).sqrt() + z1 * z * x * qf.powf(0.75) * hq.powf(0.25) + z1 * z * qf,
        BilinearLemma::Coprime => {
            let large = if z2 * qf > y { z2.sqrt() * z * x * qf.powf(0.75) } else { 0.0 };
            z * (x * y * qf).sqrt() + large + z * x * y.sqrt()
        }
    };
    Ok(BilinearBoundReport { lhs_value: lhs, full_bound, ratio: lhs.abs() / full_bound, regime, lemma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::eigenforms;

    fn sym_delta(n: usize) -> SymSquareForm {
        SymSquareForm::new(&eigenforms(12, n).unwrap()[0], n).unwrap()
    }

    #[test]
    fn petersson_examples() {
        let r = petersson_two_sided(12, 1, 1, 30).unwrap();
        assert!(r.rel_gap < 1e-8, "{r:?}");
        assert!(r.pass(1e-8));
        let r = petersson_auto(16, 2, 3).unwrap();
        let f = &eigenforms(16, 10).unwrap()[0];
        let want = f.lambda[2] * f.lambda[3] / f.petersson_weight;
        assert!((r.lhs - want).abs() < 1e-14);
        assert!(r.rel_gap < 1e-8 && r.pass(1e-8), "{r:?}");
        // Bessel tail collapse
        let r = petersson_rhs(60, 2, 2, 1, 50).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn petersson_small_grid_and_dimension_zero() {
        let rows = petersson_grid(&[12, 14, 26], 6).unwrap();
        assert_eq!(rows.len(), 3 * 36);
        for r in &rows {
            assert!(r.pass(1e-8), "{r:?}");
        }
        // dim S_14 = 0: the Kloosterman side cancels the delta term
        let r = petersson_auto(14, 3, 3).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.abs_gap < 1e-10);
    }

    #[test]
    fn grid_matches_single_evaluation() {
        let rows = petersson_grid(&[12], 4).unwrap();
        let single = petersson_auto(12, 3, 4).unwrap();
        let g = rows.iter().find(|r| r.parameters["m"] == 3 && r.parameters["n"] == 4).unwrap();
        assert!((g.rhs - single.rhs).abs() < 1e-13);
    }

    #[test]
    fn truncation_is_reported() {
        let r = petersson_two_sided(12, 20, 30, 3).unwrap();
        assert!(r.truncation_bound > r.abs_gap);
        assert!(r.pass(1e-8));
    }

    #[test]
    fn sieve_level_one_is_petersson() {
        let d = delta_star(12, 1, 2, 5).unwrap();
        let c = petersson_cmax(12, 2, 5, 1, 1e-15);
        assert_eq!(d, petersson_rhs(12, 2, 5, 1, c).unwrap().value);
    }

    #[test]
    fn sieve_vanishes_without_newforms() {
        // S_12(Γ0(2)) is spanned by Δ(z), Δ(2z): no newforms
        for (m, n) in [(1, 1), (1, 3), (3, 5), (5, 5), (7, 9)] {
            let d = delta_star_with(12, 2, m, n, SIEVE_TERM_CUT).unwrap();
            assert!(d.value.abs() < 1e-9, "({m},{n}) {d:?}");
        }
        // the printed sieve does not vanish once M | n
        assert!(delta_star(12, 2, 1, 2).unwrap().abs() > 1e-2);
    }

    #[test]
    fn sieve_rank_one_at_level_three() {
        // S_12^new(3) is one-dimensional
        let d = |m, n| delta_star(12, 3, m, n).unwrap();
        let d11 = d(1, 1);
        assert!(d11 > 0.0);
        for (m, n) in [(2, 5), (4, 2), (5, 7)] {
            let lhs = d(m, n) * d11;
            let rhs = d(m, 1) * d(1, n);
            assert!((lhs - rhs).abs() < 1e-8 * d11 * d11, "({m},{n}) {lhs} {rhs}");
        }
    }

    #[test]
    fn sieve_l1_loop_converges() {
        let a = delta_star_with(12, 2, 1, 4, 1e-12).unwrap();
        let b = delta_star_with(12, 2, 1, 4, 1e-14).unwrap();
        assert!((a.value - b.value).abs() < 1e-10);
        assert!(matches!(delta_star(12, 2, 2, 1), Err(Error::Precondition(_))));
        assert!(matches!(delta_star(12, 4, 1, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn voronoi_small_cases() {
        let f = sym_delta(40_000);
        let w = TestFunction::canonical();
        let kernel = VoronoiKernel::standard(&w, 12).unwrap();
        let r = voronoi_two_sided_with(&kernel, &f, 1, 1, 1, 50.0, VoronoiCase::Unramified).unwrap();
        assert!(r.abs_gap < 1e-5 * r.lhs_complex().norm().max(1.0), "{r:?}");
        let rows = voronoi_grid_point(&kernel, &f, 2, 3, 50.0).unwrap();
        for row in rows {
            assert!(row.branch_gap < 1e-8);
            assert!(row.report.pass(1e-5), "{:?}", row.report);
        }
        let k0 = VoronoiKernel::standard(&TestFunction::zero(), 12).unwrap();
        let r = voronoi_two_sided_with(&k0, &f, 1, 1, 2, 50.0, VoronoiCase::Ramified).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(voronoi_two_sided_with(&kernel, &f, 1, 2, 4, 50.0, VoronoiCase::Ramified).is_err());
    }

    #[test]
    fn nonlinear_sums() {
        let f = sym_delta(300);
        let w = TestFunction::canonical();
        let env = Envelope { z: 1.0, p: 1.0 };
        let zero = QuadraticAlpha::rational(0, 1).unwrap();
        let s = nonlinear_exp_sum(&f, zero, 100.0, &w, env).unwrap();
        let direct: f64 = (1..=250).map(|m| f.a(m).unwrap() / (m as f64).sqrt() * w.eval(m as f64 / 100.0)).sum();
        assert!((s.value - direct).abs() < 1e-12 && s.value_im == 0.0);
        let mut worst = 0.0f64;
        for x in [20.0, 50.0, 100.0] {
            for alpha in [QuadraticAlpha::rational(3, 2).unwrap(), QuadraticAlpha::sqrt_of(2, 1, false).unwrap()] {
                worst = worst.max(nonlinear_exp_sum(&f, alpha, x, &w, env).unwrap().ratio);
            }
        }
        assert!(worst <= 50.0, "{worst}");
        let z = nonlinear_exp_sum(&f, zero, 100.0, &TestFunction::zero(), env).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn bilinear_examples() {
        let f = sym_delta(1000);
        let w = ProductWeight::canonical();
        let direct = |h: i64, q: u64, x: f64, y: f64| -> f64 {
            let mut acc = 0.0;
            for n in 1..=(2.5 * x) as u64 {
                for m in 1..=(2.5 * y) as u64 {
                    let wv = w.first.eval(n as f64 / x) * w.second.eval(m as f64 / y);
                    if wv != 0.0 {
                        acc += f.a(m as usize).unwrap() / (m as f64).sqrt() * kloosterman(n as i64 * h, m as i64, q).value() * wv;
                    }
                }
            }
            acc
        };
        for (h, q) in [(1, 7), (3, 12), (0, 10)] {
            let fast = bilinear_sum(&f, h, q, 30.0, 40.0, &w).unwrap();
            let slow = direct(h, q, 30.0, 40.0);
            assert!((fast - slow).abs() < 1e-9 * slow.abs().max(1.0), "h={h} q={q}");
        }
        let r0 = bilinear_sum(&f, 0, 30, 50.0, 60.0, &w).unwrap();
        let rr = bilinear_sum_ramanujan(&f, 30, 50.0, 60.0, &w).unwrap();
        assert!((r0 - rr).abs() < 1e-9 * rr.abs().max(1.0));
        let regime = BilinearRegime { x: 200.0, y: 200.0, q: 101, h: 1, z: 1.0, z1: 1.0, z2: 1.0 };
        let rep = bilinear_form(&f, regime, &w, BilinearLemma::Coprime).unwrap();
        assert!(rep.ratio.is_finite() && rep.full_bound > 0.0);
        let bad = BilinearRegime { h: 101, ..regime };
        assert!(bilinear_form(&f, bad, &w, BilinearLemma::Coprime).is_err());
        let zw = ProductWeight { first: TestFunction::zero(), second: TestFunction::canonical() };
        assert_eq!(bilinear_sum(&f, 1, 101, 200.0, 200.0, &zw).unwrap(), 0.0);
    }
}
