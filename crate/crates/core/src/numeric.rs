//! Floating-point building blocks: compensated sums, double-double phases,
//! complex log-Gamma, quadrature rules and grid interpolation.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum over complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanC {
    re: Kahan,
    im: Kahan,
}

impl KahanC {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn sum(&self) -> Complex64 {
        Complex64::new(self.re.sum(), self.im.sum())
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut k = Kahan::default();
    for x in it {
        k.add(x);
    }
    k.sum()
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub fn new(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn from_u64(n: u64) -> Self {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        DoubleDouble { hi, lo }
    }

    pub fn add(self, o: DoubleDouble) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        DoubleDouble { hi, lo }
    }

    pub fn mul(self, o: DoubleDouble) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    pub fn div(self, o: DoubleDouble) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(DoubleDouble::new(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(DoubleDouble::new(-q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = two_sum(q1, q2);
        DoubleDouble { hi, lo }.add(DoubleDouble::new(q3))
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::default();
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = (self.hi - p - e + self.lo) / (2.0 * x);
        let (hi, lo) = two_sum(x, r);
        DoubleDouble { hi, lo }
    }

    /// Fractional part in `[0, 1)`.
    pub fn frac(self) -> f64 {
        let f = self.hi.floor();
        let (hi, lo) = two_sum(self.hi - f, self.lo);
        let v = hi + lo;
        v - v.floor()
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// log Γ(z). The imaginary part is correct modulo 2π, which is all that
/// `exp` needs.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut shifted = false;
    while w.norm_sqr() < 17.0 * 17.0 {
        prod *= w;
        w += 1.0;
        shifted = true;
    }
    let wi = w.inv();
    let wi2 = wi * wi;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pw = wi;
    for c in STIRLING {
        series += pw * c;
        pw *= wi2;
    }
    let base = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series;
    if shifted {
        base - prod.ln()
    } else {
        base
    }
}

/// log sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if z.im.abs() < 15.0 {
        return (z * PI).sin().ln();
    }
    if z.im > 0.0 {
        let e = (i * z * (2.0 * PI)).exp();
        Complex64::new(0.5f64.ln(), PI / 2.0) - i * z * PI + (Complex64::new(1.0, 0.0) - e).ln()
    } else {
        let e = (-i * z * (2.0 * PI)).exp();
        Complex64::new(0.5f64.ln(), -PI / 2.0) + i * z * PI + (Complex64::new(1.0, 0.0) - e).ln()
    }
}

pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

/// log Γ_R(s) = −(s/2) log π + log Γ(s/2).
pub fn ln_gamma_r(s: Complex64) -> Complex64 {
    -s * (0.5 * PI.ln()) + ln_gamma(s * 0.5)
}

/// log Γ_C(s) = log 2 − s log 2π + log Γ(s).
pub fn ln_gamma_c(s: Complex64) -> Complex64 {
    Complex64::new(2f64.ln(), 0.0) - s * (2.0 * PI).ln() + ln_gamma(s)
}

/// Distance from `z` to the nearest pole of Γ.
pub fn gamma_pole_distance(z: Complex64) -> f64 {
    if z.re > 0.0 {
        return f64::INFINITY;
    }
    let n = z.re.round().min(0.0);
    Complex64::new(z.re - n, z.im).norm()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` panels of `order` points.
pub fn gauss_legendre_composite(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * order);
    let mut ws = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(&gw) {
            xs.push(mid + 0.5 * h * x);
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

/// Tanh-sinh quadrature of `f` over `[a, b]`, refining until successive
/// levels agree to `tol` (absolute). Returns `(value, error_estimate)`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (b - a);
    let tmax = 3.5;
    let eval = |t: f64| -> f64 {
        let u = 0.5 * PI * t.sinh();
        let wt = 0.5 * PI * t.cosh() / (u.cosh() * u.cosh());
        // distance to the nearer endpoint, computed without cancellation
        let delta = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        if delta <= 0.0 || !wt.is_finite() {
            return 0.0;
        }
        let x = if u < 0.0 { a + r * delta } else { b - r * delta };
        f(x) * wt
    };
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut t = h;
    while t <= tmax {
        sum += eval(t) + eval(-t);
        t += h;
    }
    let mut est = sum * h * r;
    let mut err = f64::INFINITY;
    for _ in 0..12 {
        h *= 0.5;
        let mut t = h;
        let mut add = 0.0;
        while t <= tmax {
            add += eval(t) + eval(-t);
            t += 2.0 * h;
        }
        sum += add;
        let next = sum * h * r;
        err = (next - est).abs();
        est = next;
        if err <= tol {
            break;
        }
    }
    (est, err)
}

/// Lagrange interpolation of samples on a uniform grid `x0 + i·dx` using the
/// `width` nearest points.
pub fn lagrange_uniform<T>(samples: &[T], x0: f64, dx: f64, x: f64, width: usize) -> T
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + Default,
{
    let n = samples.len();
    let pos = (x - x0) / dx;
    let half = width as isize / 2;
    let start = (pos.floor() as isize - half + 1).clamp(0, n as isize - width as isize) as usize;
    let mut acc = T::default();
    for j in 0..width {
        let mut l = 1.0;
        let xj = (start + j) as f64;
        for m in 0..width {
            if m != j {
                let xm = (start + m) as f64;
                l *= (pos - xm) / (xj - xm);
            }
        }
        acc = acc + samples[start + j] * l;
    }
    acc
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Riemann zeta at real `s > 1` by Euler–Maclaurin.
pub fn zeta(s: f64) -> f64 {
    let n = 20usize;
    let mut sum = kahan_sum((1..n).map(|k| (k as f64).powf(-s)));
    let nf = n as f64;
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // Bernoulli corrections
    let b = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let mut fact = 1.0;
    let mut rising = s;
    let mut pw = nf.powf(-s - 1.0);
    for (j, bj) in b.iter().enumerate() {
        let k = 2 * j + 2;
        fact *= ((k - 1) * k) as f64;
        sum += bj / fact * rising * pw;
        rising *= (s + k as f64 - 1.0) * (s + k as f64);
        pw /= nf * nf;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut k = Kahan::default();
        k.add(1e16);
        for _ in 0..1000 {
            k.add(1.0);
        }
        k.add(-1e16);
        assert_eq!(k.sum(), 1000.0);
    }

    #[test]
    fn ln_gamma_values() {
        let g = |x: f64| ln_gamma(Complex64::new(x, 0.0)).re;
        assert!((g(0.5) - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((g(10.0) - 362880f64.ln()).abs() < 1e-12);
        assert!((g(1.0)).abs() < 1e-14);
        // |Γ(1/2 + it)|² = π / cosh(πt)
        for t in [0.3, 5.0, 40.0, 300.0] {
            let v = ln_gamma(Complex64::new(0.5, t)).re * 2.0;
            let want = PI.ln() - PI * t - (0.5 * (1.0 + (-2.0 * PI * t).exp())).ln();
            assert!((v - want).abs() < 1e-11 * want.abs().max(1.0), "t={t}");
        }
        // reflection region: Γ(-2.5) = -8√π/15
        let z = ln_gamma(Complex64::new(-2.5, 0.0)).exp();
        assert!((z.re + 8.0 * PI.sqrt() / 15.0).abs() < 1e-13);
        let z = ln_gamma(Complex64::new(-3.3, 60.0));
        let zz = ln_gamma(Complex64::new(-2.3, 60.0)) - Complex64::new(-3.3, 60.0).ln();
        assert!(((z - zz).exp() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn double_double_phase() {
        let x = DoubleDouble::from_u64(123_456_789_012_345);
        let r = x.sqrt();
        let back = r.mul(r);
        assert!((back.hi - x.hi).abs() <= 1.0 && (back.add(DoubleDouble::new(-x.hi)).to_f64() - x.lo).abs() < 1e-6);
        assert!((DoubleDouble::new(7.25).frac() - 0.25).abs() < 1e-16);
        let q = DoubleDouble::new(1.0).div(DoubleDouble::new(3.0));
        assert!((q.mul(DoubleDouble::new(3.0)).add(DoubleDouble::new(-1.0))).to_f64().abs() < 1e-30);
    }

    #[test]
    fn quadrature_rules() {
        let (x, w) = gauss_legendre(20);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let (v, _) = tanh_sinh(|x| (1.0 - x * x).sqrt(), -1.0, 1.0, 1e-13);
        assert!((v - PI / 2.0).abs() < 1e-12);
        let (v, _) = tanh_sinh(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn lagrange_exact_on_polynomials() {
        let s: Vec<f64> = (0..20).map(|i| {
            let x = 0.1 * i as f64;
            x * x * x - x
        }).collect();
        let v = lagrange_uniform(&s, 0.0, 0.1, 0.537, 6);
        assert!((v - (0.537f64.powi(3) - 0.537)).abs() < 1e-13);
    }
}
