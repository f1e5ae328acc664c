//! Bessel functions, weight-averaged Bessel sums, GL(3) gamma quotients and
//! the Ω± integral transforms.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gl3::archimedean_pairs;
use crate::numeric::{gamma_pole_distance, gauss_legendre_composite, lagrange_uniform, ln_gamma, tanh_sinh, DoubleDouble};

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A smooth weight supported on `[a, b] ⊂ (0, ∞)`.
#[derive(Clone)]
pub struct TestFunction {
    support: (f64, f64),
    eval: Eval,
    pub derivative_bound_hints: Option<Vec<f64>>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("support", &self.support)
            .field("derivative_bound_hints", &self.derivative_bound_hints)
            .finish()
    }
}

/// `exp(−1/t)` for `t > 0`, zero otherwise.
pub fn glue(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

impl TestFunction {
    /// `e⁴·g(t)·g(1−t)` with `t = (x−a)/(b−a)` and `g` the `exp(−1/t)` glue; peak value 1.
    pub fn bump(a: f64, b: f64) -> Result<Self> {
        check_support(a, b)?;
        let eval: Eval = Arc::new(move |x| {
            let t = (x - a) / (b - a);
            (4.0 + (-1.0 / (t * (1.0 - t)))).exp()
        });
        Ok(TestFunction { support: (a, b), eval, derivative_bound_hints: None })
    }

    /// The bump on `[1/2, 5/2]`.
    pub fn canonical() -> Self {
        Self::bump(0.5, 2.5).expect("valid support")
    }

    pub fn zero() -> Self {
        TestFunction { support: (0.5, 2.5), eval: Arc::new(|_| 0.0), derivative_bound_hints: Some(vec![0.0; 8]) }
    }

    /// Wraps an arbitrary smooth map; values outside `[a, b]` are discarded.
    pub fn from_fn<F>(a: f64, b: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_support(a, b)?;
        Ok(TestFunction { support: (a, b), eval: Arc::new(f), derivative_bound_hints: None })
    }

    /// `α·f + β·g`.
    pub fn combine(alpha: f64, f: &TestFunction, beta: f64, g: &TestFunction) -> Self {
        let support = (f.support.0.min(g.support.0), f.support.1.max(g.support.1));
        let (f, g) = (f.clone(), g.clone());
        TestFunction {
            support,
            eval: Arc::new(move |x| alpha * f.eval(x) + beta * g.eval(x)),
            derivative_bound_hints: None,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.support;
        if x <= a || x >= b {
            0.0
        } else {
            (self.eval)(x)
        }
    }

    pub fn sample(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    /// `∫ w`.
    pub fn integral(&self) -> f64 {
        let (a, b) = self.support;
        tanh_sinh(|x| self.eval(x), a, b, 1e-15).0
    }

    /// Bound on `sup |w^{(j)}|`: the stored hint if any, otherwise a
    /// finite-difference estimate on a fine grid.
    pub fn derivative_bound(&self, j: usize) -> f64 {
        if let Some(h) = self.derivative_bound_hints.as_ref().and_then(|h| h.get(j)) {
            return *h;
        }
        let (a, b) = self.support;
        let n = 4000;
        let dx = (b - a) / n as f64;
        let mut v: Vec<f64> = (0..=n).map(|i| self.eval(a + i as f64 * dx)).collect();
        for _ in 0..j {
            v = v.windows(2).map(|p| (p[1] - p[0]) / dx).collect();
        }
        v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Mellin transform `∫ w(x) x^{s−1} dx`.
    pub fn mellin(&self, s: Complex64) -> Complex64 {
        MellinNodes::new(self, s.im.abs()).eval(s)
    }
}

fn check_support(a: f64, b: f64) -> Result<()> {
    if a > 0.0 && b > a && b.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("support [{a}, {b}] must satisfy 0 < a < b < ∞")))
    }
}

/// Quadrature for `∫ w(e^u) e^{us} du` over the log-support.
struct MellinNodes {
    u: Vec<f64>,
    wt: Vec<f64>,
}

impl MellinNodes {
    /// Panel count grows with the largest frequency `height` to be resolved.
    fn new(w: &TestFunction, height: f64) -> Self {
        let (a, b) = w.support();
        let (la, lb) = (a.ln(), b.ln());
        let panels = 40 + ((lb - la) * height / 4.0).ceil() as usize;
        let (u, g) = gauss_legendre_composite(la, lb, panels, 16);
        let wt = u.iter().zip(&g).map(|(&u, &g)| g * w.eval(u.exp())).collect();
        MellinNodes { u, wt }
    }

    fn eval(&self, s: Complex64) -> Complex64 {
        self.u.iter().zip(&self.wt).map(|(&u, &w)| w * (s * u).exp()).sum()
    }
}

// ---------------------------------------------------------------------------
// Bessel J

/// `J_ν(x)` for integer order.
pub fn bessel_j(order: u32, x: f64) -> f64 {
    let nu = order as f64;
    if x == 0.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    if x <= 0.5 * nu {
        return bessel_j_series(order, x);
    }
    if x >= 25.0 && x >= nu * nu {
        if let Some(v) = hankel(nu, x) {
            return v;
        }
    }
    bessel_j_table(order as usize, x)[order as usize]
}

/// Ascending series summed in double-double arithmetic.
pub fn bessel_j_series(order: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    let nu = order as f64;
    let ln0 = nu * (0.5 * x).ln() - crate::numeric::ln_gamma_real(nu + 1.0);
    if ln0 < -745.0 {
        return 0.0;
    }
    let q = DoubleDouble::new(0.5 * x).mul(DoubleDouble::new(0.5 * x)).mul(DoubleDouble::new(-1.0));
    let mut term = DoubleDouble::new(ln0.exp());
    let mut sum = term;
    let mut k = 0u64;
    loop {
        k += 1;
        let den = DoubleDouble::from_u64(k).mul(DoubleDouble::from_u64(k + order as u64));
        term = term.mul(q).div(den);
        sum = sum.add(term);
        if (k as f64) > 0.5 * x && term.hi.abs() <= 1e-33 * sum.hi.abs().max(1e-300) {
            break;
        }
        if term.hi == 0.0 {
            break;
        }
    }
    sum.to_f64()
}

/// Hankel's large-argument expansion, `None` when the series stalls early.
fn hankel(nu: f64, x: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..80 {
        let j = (2 * k - 1) as f64;
        term *= (mu - j * j) / (k as f64 * 8.0 * x);
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            let c = (0.5 * nu + 0.25) * PI;
            let (sx, cx) = x.sin_cos();
            let (sc, cc) = c.sin_cos();
            let cos_chi = cx * cc + sx * sc;
            let sin_chi = sx * cc - cx * sc;
            return Some((2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi));
        }
        if term.abs() > prev && term.abs() > 1e-12 {
            return None;
        }
        prev = term.abs();
    }
    None
}

/// `J_0(x), …, J_N(x)`: forward recurrence when `x >= N`, Miller's backward
/// recurrence otherwise.
pub fn bessel_j_table(max_order: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x >= 25.0 && x >= max_order as f64 {
        if let (Some(j0), Some(j1)) = (hankel(0.0, x), hankel(1.0, x)) {
            out[0] = j0;
            if max_order >= 1 {
                out[1] = j1;
            }
            for n in 1..max_order {
                out[n + 1] = 2.0 * n as f64 / x * out[n] - out[n - 1];
            }
            return out;
        }
    }
    miller(&mut out, x);
    out
}

fn miller(out: &mut [f64], x: f64) {
    let max_order = out.len() - 1;
    let top = (max_order as f64).max(x.ceil());
    let mut m = (top + 20.0 + (40.0 * top).sqrt()) as usize;
    m += m % 2;
    let (mut next, mut cur) = (0.0f64, 1e-300f64);
    let mut norm = 2.0 * cur;
    let mut k = m;
    loop {
        if k <= max_order {
            out[k] = cur;
        }
        if k == 0 {
            break;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if k % 2 == 0 {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    out.iter_mut().for_each(|v| *v /= norm);
}

// ---------------------------------------------------------------------------
// Averaged Bessel sums

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesselAverage {
    /// Σ over even k of `i^{−k} h((k−1)/K) J_{k−1}(x)`
    Even,
    /// `4 Σ_{k ≡ ι mod 4} h(k/K) J_{k−1}(x)` with `ι ∈ {0, 2}`
    Mod4(u8),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AveragedBessel {
    pub lhs: f64,
    pub main_term: f64,
    pub residual: f64,
}

/// `ȟ(t) = (2π)^{−1/2} ∫ h(√u) u^{−1/2} e^{itu} du`, computed as
/// `(2π)^{−1/2} ∫ 2 h(v) e^{itv²} dv` with one tanh-sinh rule per half-period.
pub fn h_check(h: &TestFunction, t: f64) -> Complex64 {
    let (a, b) = h.support();
    let panels = 1 + (t.abs() * (b * b - a * a) / PI).ceil() as usize;
    let (a2, b2) = (a * a, b * b);
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        // equal panels in u = v² keep the phase advance per panel constant
        let lo = (a2 + (b2 - a2) * p as f64 / panels as f64).sqrt();
        let hi = (a2 + (b2 - a2) * (p + 1) as f64 / panels as f64).sqrt();
        let re = tanh_sinh(|v| 2.0 * h.eval(v) * (t * v * v).cos(), lo, hi, 1e-16).0;
        let im = tanh_sinh(|v| 2.0 * h.eval(v) * (t * v * v).sin(), lo, hi, 1e-16).0;
        acc += Complex64::new(re, im);
    }
    acc / (2.0 * PI).sqrt()
}

/// The averaged sum next to the main term of its asymptotic formula.
/// The main term takes the imaginary part of the full product
/// `e(x/2π − 1/8)·ȟ(K²/2x)`, which keeps it real.
pub fn averaged_bessel(h: &TestFunction, k_param: f64, x: f64, mode: BesselAverage) -> Result<AveragedBessel> {
    if k_param < 20.0 || x <= 0.0 {
        return Err(Error::Precondition("averaged_bessel needs K >= 20 and x > 0".into()));
    }
    let (_, b) = h.support();
    let max_order = (b * k_param).ceil() as usize + 2;
    let j = bessel_j_table(max_order, x);
    let phase = Complex64::from_polar(1.0, x - PI / 4.0);
    let osc = (phase * h_check(h, k_param * k_param / (2.0 * x))).im * k_param / x.sqrt();
    let (lhs, main_term) = match mode {
        BesselAverage::Even => {
            let mut s = 0.0;
            for k in (2..=max_order + 1).step_by(2) {
                let sign = if k % 4 == 0 { 1.0 } else { -1.0 };
                s += sign * h.eval((k - 1) as f64 / k_param) * j[k - 1];
            }
            (s, -0.5 * osc)
        }
        BesselAverage::Mod4(iota) => {
            if iota != 0 && iota != 2 {
                return Err(Error::Precondition("ι must be 0 or 2".into()));
            }
            let start = if iota == 0 { 4 } else { 2 };
            let mut s = 0.0;
            for k in (start..=max_order + 1).step_by(4) {
                s += h.eval(k as f64 / k_param) * j[k - 1];
            }
            let i_pow = if iota == 0 { 1.0 } else { -1.0 };
            (4.0 * s, h.eval(x / k_param) - i_pow * osc)
        }
    };
    Ok(AveragedBessel { lhs, main_term, residual: lhs - main_term })
}

// ---------------------------------------------------------------------------
// GL(3) gamma quotients

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Archimedean `(μ_j, δ_j)` data with `L_∞ = Π Γ_R(s + μ_j + δ_j)`.
pub type ArchPairs = [(f64, u32); 3];

/// `γ_ρ(s) = π^{−3s−3/2} Π_j Γ((1+s+μ_j+δ'_j)/2) / Γ((−s+μ_j+δ'_j)/2)` with
/// `δ' = δ` for ρ = 0 and `δ' = 1 − δ` for ρ = 1.
pub fn gamma_factor(rho: u8, s: Complex64, pairs: &ArchPairs) -> Result<Complex64> {
    let mut ln = (-3.0 * s - 1.5) * PI.ln();
    for &(mu, delta) in pairs {
        let d = if rho == 0 { delta } else { 1 - delta } as f64;
        let num = (s + 1.0 + mu + d) * 0.5;
        let dist = gamma_pole_distance(num);
        if dist < 1e-6 {
            return Err(Error::PoleProximity { re: s.re, im: s.im, dist });
        }
        let den = (-s + mu + d) * 0.5;
        if gamma_pole_distance(den) < 1e-14 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        ln += ln_gamma(num) - ln_gamma(den);
    }
    Ok(ln.exp())
}

/// `γ_±(s) = (γ_0(s) ∓ i γ_1(s))/2`.
pub fn gamma_pm(sign: Sign, s: Complex64, pairs: &ArchPairs) -> Result<Complex64> {
    let g0 = gamma_factor(0, s, pairs)?;
    let g1 = gamma_factor(1, s, pairs)?;
    let i = Complex64::new(0.0, 1.0);
    Ok(match sign {
        Sign::Plus => (g0 - i * g1) * 0.5,
        Sign::Minus => (g0 + i * g1) * 0.5,
    })
}

// ---------------------------------------------------------------------------
// Ω± by contour quadrature

/// Vertical-line quadrature `Re s = σ`, `|Im s| <= T`, `nodes` equally spaced points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub abscissa: f64,
    pub height_cut: f64,
    pub nodes: usize,
}

/// Trapezoid step; aliasing error is about `x·e^{−2π(1+σ)/step}`.
const OMEGA_STEP: f64 = 0.025;

impl ContourSpec {
    pub fn validate(&self, pairs: &ArchPairs) -> Result<()> {
        let min_shift = pairs
            .iter()
            .flat_map(|&(mu, d)| [mu + d as f64, mu + (1 - d) as f64])
            .fold(f64::INFINITY, f64::min);
        if self.abscissa <= -1.0 - min_shift {
            return Err(Error::Precondition(format!("abscissa {} is left of the first pole", self.abscissa)));
        }
        if self.nodes < 64 || !(self.height_cut > 0.0) {
            return Err(Error::Precondition("contour needs nodes >= 64 and T > 0".into()));
        }
        Ok(())
    }

    /// `σ = −1/2` and a height where the integrand envelope has fallen below
    /// `1e-14` of its peak, about the rounding floor of `w̃`.
    pub fn adaptive(w: &TestFunction, pairs: &ArchPairs) -> Result<Self> {
        let sigma = -0.5;
        let limit = 2000.0;
        let probe = MellinNodes::new(w, limit);
        let envelope = |t: f64| -> Result<f64> {
            let s = Complex64::new(sigma, t);
            let g = gamma_factor(0, s, pairs)?.norm() + gamma_factor(1, s, pairs)?.norm();
            Ok(g * probe.eval(-s).norm())
        };
        let mut peak = 0.0f64;
        let mut t = 0.0;
        let mut quiet = 0.0;
        while t < limit {
            let e = envelope(t)?;
            peak = peak.max(e);
            if e < 1e-14 * peak {
                quiet += 5.0;
                if quiet >= 100.0 {
                    let nodes = 2 * (t / OMEGA_STEP).ceil() as usize + 1;
                    return Ok(ContourSpec { abscissa: sigma, height_cut: t, nodes });
                }
            } else {
                quiet = 0.0;
            }
            t += 5.0;
        }
        Err(Error::ContourTruncation { tail: envelope(t)? / peak, tolerance: 1e-14 })
    }
}

/// Precomputed contour samples of `γ_±(s) w̃(−s)` for one weight and sign.
#[derive(Clone, Debug)]
pub struct OmegaTransform {
    pub sign: Sign,
    pub contour: ContourSpec,
    step: f64,
    coeff: Vec<Complex64>,
    mass: f64,
    tail: f64,
}

impl OmegaTransform {
    pub fn new(w: &TestFunction, kappa: u32, sign: Sign) -> Result<Self> {
        let pairs = archimedean_pairs(kappa);
        let contour = ContourSpec::adaptive(w, &pairs)?;
        Self::with_contour(w, kappa, sign, contour)
    }

    pub fn with_contour(w: &TestFunction, kappa: u32, sign: Sign, contour: ContourSpec) -> Result<Self> {
        let pairs = archimedean_pairs(kappa);
        contour.validate(&pairs)?;
        let n = contour.nodes | 1;
        let half = (n / 2) as i64;
        let step = contour.height_cut / half as f64;
        let mel = MellinNodes::new(w, contour.height_cut);
        // w̃(−s) at t_j = j·step, by rotating phasors node by node
        let base: Vec<Complex64> = mel.u.iter().zip(&mel.wt).map(|(&u, &wt)| Complex64::new(wt * (-contour.abscissa * u).exp(), 0.0)).collect();
        let rot: Vec<Complex64> = mel.u.iter().map(|&u| Complex64::from_polar(1.0, -step * u)).collect();
        let mut ph = base.clone();
        let mut coeff = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..=half {
            if j % 256 == 0 {
                for ((p, b), &u) in ph.iter_mut().zip(&base).zip(&mel.u) {
                    *p = b * Complex64::from_polar(1.0, -(j as f64) * step * u);
                }
            }
            let wt: Complex64 = ph.iter().sum();
            let t = j as f64 * step;
            let s = Complex64::new(contour.abscissa, t);
            let g0 = gamma_factor(0, s, &pairs)?;
            let g1 = gamma_factor(1, s, &pairs)?;
            let i = Complex64::new(0.0, 1.0);
            let (gp, gm) = ((g0 - i * g1) * 0.5, (g0 + i * g1) * 0.5);
            // γ_±(s̄) = conj γ_∓(s) and w̃(−s̄) = conj w̃(−s)
            let (here, mirror) = match sign {
                Sign::Plus => (gp, gm),
                Sign::Minus => (gm, gp),
            };
            let scale = step / (2.0 * PI);
            coeff[(half + j) as usize] = here * wt * scale;
            coeff[(half - j) as usize] = (mirror * wt).conj() * scale;
            for (p, r) in ph.iter_mut().zip(&rot) {
                *p *= r;
            }
        }
        let mass = coeff.iter().map(|c| c.norm()).sum();
        // envelope decays like exp(−c√t); its e-folding length near T is about 40
        let tail = coeff[0].norm().max(coeff[n - 1].norm()) * 80.0 / step;
        Ok(OmegaTransform { sign, contour, step, coeff, mass, tail })
    }

    /// `(Ω_±(x), error_estimate)`.
    pub fn eval(&self, x: f64) -> (Complex64, f64) {
        let lx = x.ln();
        let half = (self.coeff.len() / 2) as i64;
        let rot = Complex64::from_polar(1.0, -self.step * lx);
        let (mut fine, mut coarse) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut ph = Complex64::new(0.0, 0.0);
        for (idx, c) in self.coeff.iter().enumerate() {
            let j = idx as i64 - half;
            if idx % 256 == 0 {
                ph = Complex64::from_polar(1.0, -(j as f64) * self.step * lx);
            }
            let term = c * ph;
            fine += term;
            if j % 2 == 0 {
                coarse += term;
            }
            ph *= rot;
        }
        let xs = x.powf(-self.contour.abscissa);
        let value = fine * xs;
        let err = ((fine - coarse * 2.0).norm() + self.tail + 1e-15 * self.mass) * xs;
        (value, err)
    }
}

/// `Ω_±(x; w)` for `F = sym²` of a weight-κ form.
pub fn omega_pm(x: f64, w: &TestFunction, kappa: u32, sign: Sign) -> Result<(Complex64, f64)> {
    if x <= 0.0 {
        return Err(Error::Precondition("omega_pm needs x > 0".into()));
    }
    let t = OmegaTransform::new(w, kappa, sign)?;
    let (v, err) = t.eval(x);
    let tail = t.tail * x.powf(-t.contour.abscissa);
    if tail > 1e-9 {
        return Err(Error::ContourTruncation { tail, tolerance: 1e-9 });
    }
    Ok((v, err))
}

/// Ω_± sampled on a uniform grid in `log x` and read back by interpolation.
#[derive(Clone, Debug)]
pub struct OmegaTable {
    pub sign: Sign,
    ln_min: f64,
    dlog: f64,
    samples: Vec<Complex64>,
    pub max_error: f64,
}

impl OmegaTable {
    pub fn new(transform: &OmegaTransform, x_min: f64, x_max: f64) -> Self {
        use rayon::prelude::*;
        let dlog = 0.0025;
        let ln_min = x_min.ln() - 8.0 * dlog;
        let n = ((x_max.ln() - ln_min) / dlog).ceil() as usize + 9;
        let vals: Vec<(Complex64, f64)> = (0..n).into_par_iter().map(|i| transform.eval((ln_min + i as f64 * dlog).exp())).collect();
        let max_error = vals.iter().map(|v| v.1).fold(0.0, f64::max);
        OmegaTable { sign: transform.sign, ln_min, dlog, samples: vals.into_iter().map(|v| v.0).collect(), max_error }
    }

    pub fn x_max(&self) -> f64 {
        (self.ln_min + (self.samples.len() - 9) as f64 * self.dlog).exp()
    }

    /// `None` outside the tabulated range.
    pub fn eval(&self, x: f64) -> Option<Complex64> {
        let lx = x.ln();
        let pos = (lx - self.ln_min) / self.dlog;
        if pos < 6.0 || pos > (self.samples.len() - 7) as f64 {
            return None;
        }
        Some(lagrange_uniform(&self.samples, self.ln_min, self.dlog, lx, 12))
    }
}

// ---------------------------------------------------------------------------
// Ω± by the stationary-phase expansion

/// Fitted constants `c_j`, `d_j` (j = 1..) for one κ and sign.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StationaryFit {
    pub kappa: u32,
    pub sign: Sign,
    pub c: Vec<Complex64>,
    pub d: Vec<Complex64>,
    /// weighted RMS misfit on the calibration grid
    pub rms: f64,
}

const FIT_TERMS: usize = 6;
pub const STATIONARY_MIN_X: f64 = 100.0;

/// `x ∫ w(y) (xy)^{−j/3} e(±3 (xy)^{1/3}) dy`.
pub fn stationary_basis(x: f64, w: &TestFunction, j: usize, plus: bool) -> Complex64 {
    let (a, b) = w.support();
    let spread = 6.0 * PI * x.cbrt() * (b.cbrt() - a.cbrt());
    let panels = 20 + (spread / 2.0).ceil() as usize;
    let (ys, gs) = gauss_legendre_composite(a, b, panels, 16);
    let sgn = if plus { 1.0 } else { -1.0 };
    let mut acc = Complex64::new(0.0, 0.0);
    for (&y, &g) in ys.iter().zip(&gs) {
        let wy = w.eval(y);
        if wy == 0.0 {
            continue;
        }
        let u = (x * y).cbrt();
        acc += Complex64::from_polar(g * wy * u.powi(-(j as i32)), sgn * 6.0 * PI * u);
    }
    acc * x
}

fn fit_cache() -> &'static Mutex<HashMap<(u32, Sign), Arc<StationaryFit>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, Sign), Arc<StationaryFit>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Least-squares constants against the contour values of the canonical
/// bump on `x ∈ [10², 10^5.5]`; computed once per (κ, sign).
pub fn stationary_fit(kappa: u32, sign: Sign) -> Result<Arc<StationaryFit>> {
    if let Some(f) = fit_cache().lock().unwrap().get(&(kappa, sign)) {
        return Ok(f.clone());
    }
    let w = TestFunction::canonical();
    let t = OmegaTransform::new(&w, kappa, sign)?;
    let n_pts: usize = 72;
    let xs: Vec<f64> = (0..n_pts).map(|i| 10f64.powf(2.0 + 3.5 * i as f64 / (n_pts - 1) as f64)).collect();
    let evals: Vec<(Complex64, f64)> = xs.iter().map(|&x| t.eval(x)).collect();
    let target: Vec<Complex64> = evals.iter().map(|e| e.0).collect();
    // rows weighted by the local magnitude, floored by the contour error
    let weight: Vec<f64> = (0..n_pts)
        .map(|i| {
            let lo = i.saturating_sub(2);
            let hi = (i + 3).min(n_pts);
            let mag = target[lo..hi].iter().map(|z| z.norm()).fold(1e-300, f64::max);
            1.0 / mag.max(100.0 * evals[i].1)
        })
        .collect();
    let cols: Vec<Vec<Complex64>> = (1..=FIT_TERMS)
        .flat_map(|j| [true, false].map(|p| xs.iter().zip(&weight).map(|(&x, &wt)| stationary_basis(x, &w, j, p) * wt).collect()))
        .collect();
    let rhs: Vec<Complex64> = target.iter().zip(&weight).map(|(z, wt)| z * wt).collect();
    let (coef, rms) = complex_least_squares(&cols, &rhs);
    let fit = Arc::new(StationaryFit {
        kappa,
        sign,
        c: coef.iter().step_by(2).copied().collect(),
        d: coef.iter().skip(1).step_by(2).copied().collect(),
        rms,
    });
    fit_cache().lock().unwrap().insert((kappa, sign), fit.clone());
    Ok(fit)
}

/// Modified Gram–Schmidt with one reorthogonalisation pass.
fn complex_least_squares(cols: &[Vec<Complex64>], rhs: &[Complex64]) -> (Vec<Complex64>, f64) {
    let n = cols.len();
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut r = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    for (j, col) in cols.iter().enumerate() {
        let mut v = col.clone();
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let p = dot(qi, &v);
                r[i][j] += p;
                v.iter_mut().zip(qi).for_each(|(a, b)| *a -= p * b);
            }
        }
        let norm = dot(&v, &v).re.sqrt();
        r[j][j] = Complex64::new(norm, 0.0);
        q.push(v.iter().map(|z| z / norm.max(1e-300)).collect());
    }
    let qb: Vec<Complex64> = q.iter().map(|qi| dot(qi, rhs)).collect();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut acc = qb[i];
        for k in i + 1..n {
            acc -= r[i][k] * x[k];
        }
        x[i] = acc / r[i][i];
    }
    let mut resid = 0.0;
    for (row, b) in rhs.iter().enumerate() {
        let fitted: Complex64 = cols.iter().zip(&x).map(|(c, xi)| c[row] * xi).sum();
        resid += (fitted - b).norm_sqr();
    }
    (x, (resid / rhs.len() as f64).sqrt())
}

/// The `terms`-term expansion of `Ω_±(x; w)` with fitted constants, and an
/// error estimate from the omitted fitted terms and the calibration misfit.
pub fn omega_pm_stationary(x: f64, w: &TestFunction, kappa: u32, sign: Sign, terms: usize) -> Result<(Complex64, f64)> {
    if x < STATIONARY_MIN_X {
        return Err(Error::AsymptoticRegime { x, min: STATIONARY_MIN_X });
    }
    if terms == 0 || terms > FIT_TERMS {
        return Err(Error::Precondition(format!("terms must lie in 1..={FIT_TERMS}")));
    }
    let fit = stationary_fit(kappa, sign)?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut omitted = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for j in 1..=FIT_TERMS {
        let bp = stationary_basis(x, w, j, true);
        let bm = stationary_basis(x, w, j, false);
        let t = fit.c[j - 1] * bp + fit.d[j - 1] * bm;
        if j <= terms {
            value += t;
        } else {
            omitted += t;
        }
        scale += (fit.c[j - 1].norm() + fit.d[j - 1].norm()) * x.powf(1.0 - j as f64 / 3.0);
    }
    let err = 2.0 * omitted.norm() + fit.rms * value.norm() + 1e-14 * scale;
    Ok((value, err))
}
