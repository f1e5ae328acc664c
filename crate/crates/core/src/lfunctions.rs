//! Central values by approximate functional equations, the V* kernel,
//! root numbers and archimedean factors.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_squarefree, Sieve};
use crate::error::{Error, Result};
use crate::gl3::{symsq_from_primes, SymSquareForm};
use crate::modforms::Newform;
use crate::numeric::{gamma_pole_distance, ln_gamma_r, KahanC};

type C = Complex64;

/// Damping order used by the central-value kernels.
pub const DEFAULT_A: u32 = 32;

/// `Π_j Γ_R(s + μ_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaFactor {
    shifts: Vec<f64>,
}

impl GammaFactor {
    pub fn from_shifts(shifts: Vec<f64>) -> Self {
        GammaFactor { shifts }
    }

    fn push_c(shifts: &mut Vec<f64>, a: f64) {
        // Γ_C(s) = Γ_R(s) Γ_R(s+1)
        shifts.push(a);
        shifts.push(a + 1.0);
    }

    /// `Γ_R(s+1) Γ_C(s+κ−1)` for `sym² g`, g of weight κ.
    pub fn sym_square(kappa: u32) -> Self {
        let mut s = vec![1.0];
        Self::push_c(&mut s, kappa as f64 - 1.0);
        GammaFactor { shifts: s }
    }

    /// `Γ_C(s + (k−1)/2)` for a weight-k form.
    pub fn gl2(k: u32) -> Self {
        let mut s = Vec::new();
        Self::push_c(&mut s, (k as f64 - 1.0) / 2.0);
        GammaFactor { shifts: s }
    }

    /// `Γ_C(s+(k+2κ−3)/2) Γ_C(s+|k−2κ+1|/2) Γ_C(s+(k−1)/2)` for `sym² g ⊗ f`.
    pub fn rankin_selberg(k: u32, kappa: u32) -> Self {
        let (k, kap) = (k as f64, kappa as f64);
        let mut s = Vec::new();
        for a in [(k + 2.0 * kap - 3.0) / 2.0, (k - 2.0 * kap + 1.0).abs() / 2.0, (k - 1.0) / 2.0] {
            Self::push_c(&mut s, a);
        }
        GammaFactor { shifts: s }
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn ln(&self, s: C) -> C {
        self.shifts.iter().map(|&m| ln_gamma_r(s + m)).sum()
    }

    /// Distance from `s` to the nearest pole.
    pub fn pole_distance(&self, s: C) -> f64 {
        self.shifts
            .iter()
            .map(|&m| 2.0 * gamma_pole_distance((s + m) * 0.5))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Smoothed Dirichlet series for an entire self-dual `L(s)` of conductor 1:
/// `Λ(s) = Σ a(n) n^{−s} φ_s(n/x) + ε Σ a(n) n^{s−1} φ_{1−s}(nx)` with
/// Gaussian damping `e^{αz²}`. Independence of `x` certifies the functional
/// equation.
#[derive(Clone, Debug)]
pub struct SmoothedSeries {
    gamma: GammaFactor,
    root: f64,
    alpha: f64,
    abscissa: f64,
    step: f64,
    height: f64,
}

struct Kernel {
    z0: C,
    g: Vec<C>,
    step: f64,
}

impl Kernel {
    /// `Σ g_j y^{−z_j}` with the nodes on a uniform vertical grid.
    fn phi(&self, y: f64) -> C {
        let ly = y.ln();
        let rot = C::from_polar(1.0, -self.step * ly);
        let mut w = (-self.z0 * ly).exp();
        let mut acc = C::new(0.0, 0.0);
        for g in &self.g {
            acc += g * w;
            w *= rot;
        }
        acc
    }
}

impl SmoothedSeries {
    pub fn new(gamma: GammaFactor, root: f64) -> Self {
        let alpha = 0.1;
        SmoothedSeries { gamma, root, alpha, abscissa: 1.5, step: 0.1, height: (75.0 / alpha).sqrt() }
    }

    fn kernel(&self, shift: C, reference: C) -> Kernel {
        let lr = self.gamma.ln(reference);
        let j = (self.height / self.step).ceil() as i64;
        let z0 = C::new(self.abscissa, -(j as f64) * self.step);
        let g = (-j..=j)
            .map(|i| {
                let z = C::new(self.abscissa, i as f64 * self.step);
                (self.gamma.ln(shift + z) - lr + z * z * self.alpha).exp() / z * (self.step / (2.0 * PI))
            })
            .collect();
        Kernel { z0, g, step: self.step }
    }

    /// Number of coefficients after which every further term is below `tol`
    /// (assuming `|a(n)| <= √n`).
    pub fn length(&self, s: C, x: f64, tol: f64) -> usize {
        let k1 = self.kernel(s, s);
        let k2 = self.kernel(C::new(1.0, 0.0) - s, s);
        let mut run = 0;
        let mut start = 1usize;
        let mut nf = 1.0f64;
        loop {
            let n = nf.floor().max(1.0);
            let m1 = k1.phi(n / x).norm() * n.powf(0.5 - s.re);
            let m2 = k2.phi(n * x).norm() * n.powf(s.re - 0.5);
            if m1 < tol && m2 < tol {
                if run == 0 {
                    start = n as usize;
                }
                run += 1;
                if run >= 40 {
                    return start;
                }
            } else {
                run = 0;
            }
            if n > 1e8 {
                return n as usize;
            }
            nf *= 1.03;
            nf = nf.max(n + 1.0);
        }
    }

    /// `L(s)` from `coeffs[n] = a(n)`, `coeffs[0]` ignored.
    pub fn eval(&self, coeffs: &[f64], s: C, x: f64) -> Result<C> {
        self.eval_to(coeffs, s, x, 1e-17)
    }

    /// As [`Self::eval`], dropping terms once they fall below `tol`.
    pub fn eval_to(&self, coeffs: &[f64], s: C, x: f64, tol: f64) -> Result<C> {
        let need = self.length(s, x, tol);
        if need >= coeffs.len() {
            return Err(Error::TableExhausted { needed: need as u64, available: coeffs.len() as u64 - 1 });
        }
        if self.gamma.pole_distance(s) < 1e-6 {
            return Err(Error::PoleProximity { re: s.re, im: s.im, dist: self.gamma.pole_distance(s) });
        }
        let k1 = self.kernel(s, s);
        let k2 = self.kernel(C::new(1.0, 0.0) - s, s);
        let mut acc = KahanC::default();
        for (n, &a) in coeffs.iter().enumerate().take(need + 1).skip(1) {
            if a == 0.0 {
                continue;
            }
            let nf = n as f64;
            let ln = nf.ln();
            let t1 = (-s * ln).exp() * k1.phi(nf / x);
            let t2 = ((s - 1.0) * ln).exp() * k2.phi(nf * x) * self.root;
            acc.add((t1 + t2) * a);
        }
        Ok(acc.sum())
    }
}

/// Coefficient count needed for `L(1, sym² f)` at weight `k`.
pub fn sym2_length_hint(k: u32) -> usize {
    SmoothedSeries::new(GammaFactor::sym_square(k), 1.0).length(C::new(1.0, 0.0), 1.0, 1e-17) + 1
}

/// `L(1, sym² f)` from `λ_f(p)` for primes up to [`sym2_length_hint`].
pub fn sym2_l_one(k: u32, lambda_p: &dyn Fn(usize) -> f64) -> Result<f64> {
    let n = sym2_length_hint(k);
    let coeffs = symsq_from_primes(lambda_p, n);
    let series = SmoothedSeries::new(GammaFactor::sym_square(k), 1.0);
    Ok(series.eval(&coeffs, C::new(1.0, 0.0), 1.0)?.re)
}

/// Root number of `F ⊗ f` with its local pieces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootNumber {
    pub value: C,
    pub archimedean: C,
    /// `(p, −λ_f(p)√p)` for `p | M`
    pub steinberg: Vec<(u64, f64)>,
    /// primes `p | N` whose factor `ε(Π_{F,p})²` is carried symbolically
    pub symbolic_primes: Vec<u64>,
}

/// `i^k`.
pub fn naive_root_number(k: u32) -> C {
    match k % 4 {
        0 => C::new(1.0, 0.0),
        1 => C::new(0.0, 1.0),
        2 => C::new(-1.0, 0.0),
        _ => C::new(0.0, -1.0),
    }
}

/// Archimedean root number of `sym² g ⊗ f` for weights κ and k:
/// `i^k` when `k >= 2κ−1` and `−i^k` below that.
pub fn archimedean_root_number(k: u32, kappa: u32) -> C {
    let base = naive_root_number(k);
    if k + 1 >= 2 * kappa {
        base
    } else {
        -base
    }
}

pub fn root_number(f_gl3: &SymSquareForm, f: &Newform, m: u64, n: u64) -> Result<RootNumber> {
    if m == 0 || !is_squarefree(m) {
        return Err(Error::Precondition(format!("M = {m} must be square-free")));
    }
    if gcd(m, n) != 1 {
        return Err(Error::NonCoprime { left: m.to_string(), right: n.to_string() });
    }
    let archimedean = archimedean_root_number(f.weight, f_gl3.base_weight);
    let mut value = archimedean;
    let mut steinberg = Vec::new();
    for (p, _) in crate::arith::factorize(m) {
        let factor = -crate::modforms::hecke_lambda(f, p)? * (p as f64).sqrt();
        value *= factor;
        steinberg.push((p, factor));
    }
    let symbolic_primes = crate::arith::factorize(n).into_iter().map(|(p, _)| p).collect();
    Ok(RootNumber { value, archimedean, steinberg, symbolic_primes })
}

/// `cos(πs/4A)^{−24A}` in log form.
fn ln_damping(s: C, a: u32) -> C {
    let w = s * (PI / (4.0 * a as f64));
    -(24.0 * a as f64) * w.cos().ln()
}

/// The AFE kernel `V(Y) = (1/2πi)∫ G(s) γ(1/2+s)/γ(1/2) D(s) Y^{−s} ds/s`
/// sampled on one vertical line, where `D` is `L(1+2s, F)` or 1.
#[derive(Clone, Debug)]
pub struct AfeKernel {
    pub a: u32,
    pub weight: u32,
    pub sigma: f64,
    residue: f64,
    nodes: Vec<(C, C)>,
}

impl AfeKernel {
    fn build(gamma: &GammaFactor, a: u32, weight: u32, sigma: f64, extra: &dyn Fn(C) -> Result<C>, at_zero: f64) -> Result<Self> {
        let mut sigma = sigma;
        for attempt in 0..2 {
            let h = 0.1;
            let lg0 = gamma.ln(C::new(0.5, 0.0));
            let mut nodes = Vec::new();
            let mut peak = 0.0f64;
            let mut quiet = 0;
            let mut hit_pole = None;
            let mut j = 0usize;
            loop {
                let t = j as f64 * h;
                let s = C::new(sigma, t);
                let dist = gamma.pole_distance(s + 0.5);
                if dist < 1e-6 {
                    hit_pole = Some((s, dist));
                    break;
                }
                let v = (ln_damping(s, a) + gamma.ln(s + 0.5) - lg0).exp() * extra(s)? / s;
                let wgt = if j == 0 { 0.5 } else { 1.0 } * h / PI;
                let mag = v.norm();
                peak = peak.max(mag);
                nodes.push((s, v * wgt));
                if mag < 1e-19 * peak {
                    quiet += 1;
                    if quiet >= 20 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
                if t > 400.0 {
                    return Err(Error::ContourTruncation { tail: mag / peak, tolerance: 1e-19 });
                }
                j += 1;
            }
            match hit_pole {
                None => {
                    let residue = if sigma < 0.0 { at_zero } else { 0.0 };
                    return Ok(AfeKernel { a, weight, sigma, residue, nodes });
                }
                Some((s, dist)) if attempt == 1 => {
                    return Err(Error::PoleProximity { re: s.re, im: s.im, dist });
                }
                Some(_) => sigma += 0.1,
            }
        }
        unreachable!()
    }

    /// Kernel for `L(1/2, F ⊗ f)` at weight `k`.
    pub fn rankin_selberg(f: &SymSquareForm, k: u32, a: u32, sigma: f64) -> Result<Self> {
        let gamma = GammaFactor::rankin_selberg(k, f.base_weight);
        if sigma > 0.5 {
            let n = f.n_max().min(4000);
            let coeffs = &f.first_row[..=n];
            let extra = move |s: C| -> Result<C> {
                let w = s * 2.0 + 1.0;
                let mut acc = KahanC::default();
                for (m, &c) in coeffs.iter().enumerate().skip(1) {
                    acc.add((-w * (m as f64).ln()).exp() * c);
                }
                Ok(acc.sum())
            };
            Self::build(&gamma, a, k, sigma, &extra, 0.0)
        } else {
            let series = SmoothedSeries::new(f.gamma(), 1.0);
            let extra = |s: C| series.eval_to(&f.first_row, s * 2.0 + 1.0, 1.0, 1e-14);
            let l1 = crate::gl3::l_one(f)?;
            Self::build(&gamma, a, k, sigma, &extra, l1)
        }
    }

    /// Kernel for `L(1/2, f)` at weight `k`.
    pub fn gl2(k: u32, a: u32, sigma: f64) -> Result<Self> {
        Self::build(&GammaFactor::gl2(k), a, k, sigma, &|_| Ok(C::new(1.0, 0.0)), 1.0)
    }

    pub fn nodes(&self) -> usize {
        self.nodes.len()
    }

    /// `V(Y)`.
    pub fn eval(&self, y: f64) -> f64 {
        let ly = y.ln();
        let mut acc = 0.0;
        for (s, q) in &self.nodes {
            acc += (q * (-s * ly).exp()).re;
        }
        self.residue + acc
    }

    /// Smallest `Y` on a geometric grid beyond which `|V| < tol` over a
    /// factor-4 window.
    pub fn cut(&self, tol: f64) -> f64 {
        let mut y = 1.0f64;
        loop {
            let quiet = (0..=8).all(|i| self.eval(y * 2f64.powf(i as f64 / 4.0)).abs() < tol);
            if quiet || y > 1e12 {
                return y;
            }
            y *= 1.25;
        }
    }
}

/// `V*(y)` for `L(1/2, F ⊗ f)` at weight `k`. The Gamma quotient already
/// carries the size `k³` of the conductor, so the central value samples it
/// at `m³n`.
pub fn v_star(y: f64, k: u32, f: &SymSquareForm, a: u32) -> Result<f64> {
    let sigma = if y >= 1.0 { 3.0 } else { -0.4 };
    Ok(AfeKernel::rankin_selberg(f, k, a, sigma)?.eval(y))
}

/// A central value with its truncation data.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CentralValue {
    pub value: f64,
    /// terms kept: arguments up to this bound
    pub cut: f64,
}

/// `L(1/2, F ⊗ f)` with the default damping.
pub fn central_value_rs(f_gl3: &SymSquareForm, f: &Newform) -> Result<f64> {
    let eps = archimedean_root_number(f.weight, f_gl3.base_weight);
    if eps.re < 0.0 {
        return Ok(0.0);
    }
    let kernel = AfeKernel::rankin_selberg(f_gl3, f.weight, DEFAULT_A, 3.0)?;
    Ok(central_value_rs_with(&kernel, f_gl3, f, None)?.value)
}

/// `L(1/2, F ⊗ f) = (1+ε) Σ μ(m) A(n,1) λ_f(mn) (m³n)^{−1/2} V(m³n)`.
pub fn central_value_rs_with(kernel: &AfeKernel, f_gl3: &SymSquareForm, f: &Newform, cut: Option<f64>) -> Result<CentralValue> {
    let eps = archimedean_root_number(f.weight, f_gl3.base_weight);
    if eps.re < 0.0 {
        return Ok(CentralValue { value: 0.0, cut: 0.0 });
    }
    let cut = cut.unwrap_or_else(|| kernel.cut(1e-13));
    let n_max = cut.floor() as usize;
    if n_max > f.n_max() || n_max > f_gl3.n_max() {
        return Err(Error::TableExhausted { needed: n_max as u64, available: f.n_max().min(f_gl3.n_max()) as u64 });
    }
    let mu = Sieve::new(n_max.max(2)).mobius_table();
    let mut acc = crate::numeric::Kahan::default();
    let mut m = 1usize;
    while m * m * m <= n_max {
        if mu[m] != 0 {
            let m3 = m * m * m;
            for n in 1..=n_max / m3 {
                let y = (m3 * n) as f64;
                let v = kernel.eval(y);
                acc.add(mu[m] as f64 * f_gl3.first_row[n] * f.lambda[m * n] * v / y.sqrt());
            }
        }
        m += 1;
    }
    Ok(CentralValue { value: (1.0 + eps.re) * acc.sum(), cut })
}

/// `L(1/2, f)` with the default damping.
pub fn central_value_gl2(f: &Newform) -> Result<f64> {
    if f.weight % 4 == 2 {
        return Ok(0.0);
    }
    let kernel = AfeKernel::gl2(f.weight, DEFAULT_A, 3.0)?;
    Ok(central_value_gl2_with(&kernel, f, None)?.value)
}

/// `L(1/2, f) = (1 + i^k) Σ λ_f(n) n^{−1/2} V₂(n)`.
pub fn central_value_gl2_with(kernel: &AfeKernel, f: &Newform, cut: Option<f64>) -> Result<CentralValue> {
    let eps = naive_root_number(f.weight).re;
    if eps < 0.0 {
        return Ok(CentralValue { value: 0.0, cut: 0.0 });
    }
    let cut = cut.unwrap_or_else(|| kernel.cut(1e-14));
    let n_max = cut.floor() as usize;
    if n_max > f.n_max() {
        return Err(Error::TableExhausted { needed: n_max as u64, available: f.n_max() as u64 });
    }
    let mut acc = crate::numeric::Kahan::default();
    for n in 1..=n_max {
        let y = n as f64;
        acc.add(f.lambda[n] * kernel.eval(y) / y.sqrt());
    }
    Ok(CentralValue { value: (1.0 + eps) * acc.sum(), cut })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::eigenforms;
    use std::sync::OnceLock;

    fn delta_sym2() -> &'static SymSquareForm {
        static F: OnceLock<SymSquareForm> = OnceLock::new();
        F.get_or_init(|| SymSquareForm::new(&eigenforms(12, 40000).unwrap()[0], 40000).unwrap())
    }

    /// Coefficients of `L(s, F ⊗ f) = L(2s, F) Σ μ(m) A(n,1) λ_f(mn) (m³n)^{−s}`.
    fn rs_coeffs(f_gl3: &SymSquareForm, f: &Newform, n: usize) -> Vec<f64> {
        let mu = Sieve::new(n).mobius_table();
        let mut d = vec![0.0; n + 1];
        let mut m = 1;
        while m * m * m <= n {
            if mu[m] != 0 {
                for j in 1..=n / (m * m * m) {
                    d[m * m * m * j] += mu[m] as f64 * f_gl3.first_row[j] * f.lambda[m * j];
                }
            }
            m += 1;
        }
        let mut c = vec![0.0; n + 1];
        let mut e = 1;
        while e * e <= n {
            for j in 1..=n / (e * e) {
                c[e * e * j] += f_gl3.first_row[e] * d[j];
            }
            e += 1;
        }
        c
    }

    fn rs_smoothed(f_gl3: &SymSquareForm, f: &Newform, eps: f64, x: f64) -> C {
        let c = rs_coeffs(f_gl3, f, 8000.min(f.n_max()).min(f_gl3.n_max()));
        let series = SmoothedSeries::new(GammaFactor::rankin_selberg(f.weight, f_gl3.base_weight), eps);
        series.eval(&c, C::new(0.5, 0.2), x).unwrap()
    }

    #[test]
    fn root_number_sign_from_functional_equation() {
        let f_gl3 = delta_sym2();
        for k in [12u32, 16, 18, 24] {
            let f = &eigenforms(k, 8000).unwrap()[0];
            let eps = archimedean_root_number(k, 12).re;
            let a = rs_smoothed(f_gl3, f, eps, 1.0);
            let b = rs_smoothed(f_gl3, f, eps, 1.25);
            assert!((a - b).norm() < 1e-8 * a.norm().max(1e-3), "k={k}: {a} vs {b}");
            let a = rs_smoothed(f_gl3, f, -eps, 1.0);
            let b = rs_smoothed(f_gl3, f, -eps, 1.25);
            assert!((a - b).norm() > 1e-4, "wrong sign also consistent at k={k}");
        }
    }

    #[test]
    fn root_number_records() {
        let f_gl3 = delta_sym2();
        let f = &eigenforms(24, 50).unwrap()[0];
        let r = root_number(f_gl3, f, 1, 1).unwrap();
        assert_eq!(r.value, C::new(1.0, 0.0));
        assert!((r.value.norm() - 1.0).abs() < 1e-12);
        assert!(root_number(f_gl3, f, 4, 1).is_err());
        assert_eq!(naive_root_number(26), C::new(-1.0, 0.0));
        assert_eq!(archimedean_root_number(18, 12), C::new(1.0, 0.0));
    }

    #[test]
    fn gl2_functional_equation() {
        let f = &eigenforms(12, 2000).unwrap()[0];
        let series = SmoothedSeries::new(GammaFactor::gl2(12), 1.0);
        let s = C::new(0.5, 1.0);
        let a = series.eval(&f.lambda, s, 1.0).unwrap();
        let b = series.eval(&f.lambda, s, 1.4).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn gl2_central_value() {
        let f = &eigenforms(12, 2000).unwrap()[0];
        let v = central_value_gl2(f).unwrap();
        assert!(v > 0.0);
        let series = SmoothedSeries::new(GammaFactor::gl2(12), 1.0);
        let direct = series.eval(&f.lambda, C::new(0.5, 0.0), 1.0).unwrap().re;
        assert!((v - direct).abs() < 1e-9, "{v} vs {direct}");
        let k2 = AfeKernel::gl2(12, DEFAULT_A, 2.0).unwrap();
        let k3 = AfeKernel::gl2(12, DEFAULT_A, 3.0).unwrap();
        let v2 = central_value_gl2_with(&k2, f, Some(1000.0)).unwrap().value;
        let v3 = central_value_gl2_with(&k3, f, Some(1000.0)).unwrap().value;
        assert!((v2 - v3).abs() < 1e-8);
        let long = central_value_gl2_with(&k3, f, Some(2.0 * k3.cut(1e-14))).unwrap().value;
        assert!((long - v).abs() < 1e-6 * v.abs());
        assert_eq!(central_value_gl2(&eigenforms(26, 100).unwrap()[0]).unwrap(), 0.0);
    }

    #[test]
    fn rs_central_value_matches_smoothed_series() {
        let f_gl3 = delta_sym2();
        let f = &eigenforms(24, 20000).unwrap()[0];
        let v = central_value_rs(f_gl3, f).unwrap();
        assert!(v >= -1e-6);
        let direct = SmoothedSeries::new(GammaFactor::rankin_selberg(24, 12), 1.0)
            .eval(&rs_coeffs(f_gl3, f, 20000), C::new(0.5, 0.0), 1.0)
            .unwrap()
            .re;
        assert!((v - direct).abs() < 1e-7 * direct.abs().max(1.0), "{v} vs {direct}");
    }

    #[test]
    fn v_star_limits() {
        let f_gl3 = delta_sym2();
        let l1 = crate::gl3::l_one(f_gl3).unwrap();
        let near = v_star(1e-4, 12, f_gl3, DEFAULT_A).map_err(|e| e.to_string()).unwrap();
        assert!((near - l1).abs() < 1e-2 * l1.max(1.0), "{near} vs {l1}");
        let far = v_star(12f64.powi(3) * 10.0, 12, f_gl3, DEFAULT_A).unwrap();
        assert!(far.abs() < 1e-6);
        let ys = [3e-3, 1e-2, 3e-2];
        let gaps: Vec<f64> = ys.iter().map(|&y| (v_star(y, 24, f_gl3, DEFAULT_A).unwrap() - l1).abs().ln()).collect();
        let rate = crate::numeric::fit_slope(&ys.map(f64::ln), &gaps);
        assert!(rate >= 0.45, "rate {rate} {gaps:?}");
        // both contours agree where they overlap
        let hi = AfeKernel::rankin_selberg(f_gl3, 12, DEFAULT_A, 3.0).unwrap();
        let lo = AfeKernel::rankin_selberg(f_gl3, 12, DEFAULT_A, -0.4).unwrap();
        for y in [0.5, 2.0, 8.0] {
            assert!((hi.eval(y) - lo.eval(y)).abs() < 1e-9, "Y={y}");
        }
    }

    #[test]
    fn damping_order_invariance() {
        let f_gl3 = delta_sym2();
        let f = &eigenforms(24, 20000).unwrap()[0];
        let vals: Vec<f64> = [24u32, 32]
            .iter()
            .map(|&a| {
                let k = AfeKernel::rankin_selberg(f_gl3, 24, a, 3.0).unwrap();
                central_value_rs_with(&k, f_gl3, f, None).unwrap().value
            })
            .collect();
        assert!((vals[0] - vals[1]).abs() < 1e-8 * vals[1].abs());
    }
}
