//! Level-1 holomorphic cusp forms: Victor Miller bases, Hecke eigenforms,
//! normalized eigenvalues λ_f(n) and harmonic weights ω_f.

pub mod cache;
mod fixed;
pub mod series;

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::Sieve;
use crate::error::{Error, Result};
use fixed::Fixed;
use series::{ntt_primes, Crt, SeriesRing};

/// Integer q-expansion `Σ a(n) q^n`, stored for `0 <= n <= n_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    weight: u32,
    coeffs: Vec<BigInt>,
}

impl QExpansion {
    pub fn new(weight: u32, coeffs: Vec<BigInt>) -> Self {
        QExpansion { weight, coeffs }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }
}

/// Dimension of `S_k(SL_2(Z))`.
pub fn dim_cusp_forms(k: u32) -> usize {
    if k < 12 || k % 2 == 1 {
        return 0;
    }
    let base = (k / 12) as usize;
    if k % 12 == 2 {
        base - 1
    } else {
        base
    }
}

/// Exponents `(j, a, b)` of the monomials `Δ^j E4^a E6^b` spanning `S_k`.
fn monomials(k: u32) -> Vec<(u32, u32, u32)> {
    let b = if k % 4 == 2 { 1 } else { 0 };
    (1..=dim_cusp_forms(k) as u32)
        .map(|j| (j, (k - 12 * j - 6 * b) / 4, b))
        .collect()
}

fn sigma(n: usize, e: u32) -> BigInt {
    let mut s = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 {
            s += BigInt::from(d).pow(e);
        }
    }
    s
}

fn naive_mul(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn naive_pow(a: &[BigInt], e: u32, len: usize) -> Vec<BigInt> {
    let mut r = vec![BigInt::zero(); len];
    r[0] = BigInt::from(1);
    for _ in 0..e {
        r = naive_mul(&r, a, len);
    }
    r
}

/// Echelonizes monomial expansions in place so that `b_i(j) = δ_ij`.
fn echelonize<T, F>(rows: &mut [Vec<T>], sub_scaled: F)
where
    T: Clone,
    F: Fn(&mut Vec<T>, &Vec<T>, usize),
{
    let d = rows.len();
    for i in (0..d).rev() {
        for j in i + 1..d {
            let (head, tail) = rows.split_at_mut(j);
            sub_scaled(&mut head[i], &tail[0], j + 1);
        }
    }
}

/// Exact Victor Miller basis up to `q^len` by schoolbook multiplication.
fn small_basis(k: u32, len: usize) -> Vec<Vec<BigInt>> {
    let e4: Vec<BigInt> = (0..len)
        .map(|n| if n == 0 { BigInt::from(1) } else { sigma(n, 3) * 240 })
        .collect();
    let e6: Vec<BigInt> = (0..len)
        .map(|n| if n == 0 { BigInt::from(1) } else { sigma(n, 5) * -504 })
        .collect();
    let delta = naive_mul(&naive_pow(&e4, 3, len), &[BigInt::from(1)], len);
    let e6sq = naive_mul(&e6, &e6, len);
    let delta: Vec<BigInt> = delta.iter().zip(&e6sq).map(|(a, b)| (a - b) / 1728).collect();
    let mut rows: Vec<Vec<BigInt>> = monomials(k)
        .into_iter()
        .map(|(j, a, b)| {
            let m = naive_mul(&naive_pow(&delta, j, len), &naive_pow(&e4, a, len), len);
            naive_mul(&m, &naive_pow(&e6, b, len), len)
        })
        .collect();
    echelonize(&mut rows, |row, piv, idx| {
        let c = row[idx].clone();
        if !c.is_zero() {
            for (x, y) in row.iter_mut().zip(piv) {
                *x -= &c * y;
            }
        }
    });
    rows
}

/// Basis expansions modulo one prime, length `len`.
fn basis_mod_p(k: u32, ring: &SeriesRing) -> Vec<Vec<u64>> {
    let p = ring.p();
    let mons = monomials(k);
    if mons.is_empty() {
        return Vec::new();
    }
    let e4 = ring.eisenstein(4, 240);
    let e6 = ring.eisenstein(6, -504);
    let delta = ring.delta();
    let d = mons.len();
    let (_, a_last, b) = mons[d - 1];
    let mut g = ring.pow(&e4, a_last);
    if b == 1 {
        g = ring.mul(&g, &e6);
    }
    let c = ring.mul(&ring.mul(&e4, &e4), &e4);
    let mut dpow = vec![delta.clone()];
    for _ in 1..d {
        let next = ring.mul(dpow.last().unwrap(), &delta);
        dpow.push(next);
    }
    let mut rows = vec![Vec::new(); d];
    for j in (0..d).rev() {
        rows[j] = ring.mul(&g, &dpow[j]);
        if j > 0 {
            g = ring.mul(&g, &c);
        }
    }
    echelonize(&mut rows, |row, piv, idx| {
        let cf = row[idx];
        if cf != 0 {
            for (x, y) in row.iter_mut().zip(piv) {
                *x = (*x + p - cf * y % p) % p;
            }
        }
    });
    rows
}

/// Residues of the Victor Miller basis modulo `count` NTT primes.
struct ModularBasis {
    primes: Vec<u64>,
    /// `rows[prime][j][n]`
    rows: Vec<Vec<Vec<u64>>>,
}

impl ModularBasis {
    fn build(k: u32, n_max: usize, count: usize) -> Self {
        let len = n_max + 1;
        let log = (2 * len).next_power_of_two().trailing_zeros().max(1);
        let primes = ntt_primes(count, log);
        let rows = primes
            .iter()
            .map(|&pr| basis_mod_p(k, &SeriesRing::new(pr, len)))
            .collect();
        ModularBasis { primes: primes.iter().map(|p| p.p).collect(), rows }
    }

    fn residues(&self, j: usize, n: usize) -> Vec<u64> {
        self.rows.iter().map(|r| r[j][n]).collect()
    }
}

/// Bits needed to hold `|b_j(n)|` for `n <= n_max`, from Deligne's bound
/// and the change of basis to eigenforms.
fn coefficient_bits(k: u32, n_max: usize, inv_norm: f64) -> u64 {
    let sieve = Sieve::new(n_max.max(2));
    let max_tau = (1..=n_max)
        .map(|n| sieve.factorize(n).iter().map(|&(_, e)| e as u64 + 1).product::<u64>())
        .max()
        .unwrap_or(1) as f64;
    let log2 = max_tau.log2() + 0.5 * (k as f64 - 1.0) * (n_max as f64).log2() + inv_norm.max(1.0).log2();
    log2.ceil() as u64 + 2
}

pub fn victor_miller_basis(k: u32, n_max: usize) -> Result<Vec<QExpansion>> {
    let d = dim_cusp_forms(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    if n_max < d + 1 {
        return Err(Error::Precondition(format!("n_max must be at least {}", d + 1)));
    }
    let spectral = HeckeSpectrum::compute(k)?;
    let bits = coefficient_bits(k, n_max, spectral.inverse_norm);
    let count = (bits as usize).div_ceil(30) + 1;
    let mb = ModularBasis::build(k, n_max, count);
    let crt = Crt::new(&mb.primes);
    let mut out = Vec::with_capacity(d);
    for j in 0..d {
        let coeffs = (0..=n_max)
            .map(|n| {
                let r = mb.residues(j, n);
                let full = crt.reconstruct(&r, count);
                debug_assert_eq!(full, crt.reconstruct(&r, count - 1), "CRT not stable at n={n}");
                full
            })
            .collect();
        out.push(QExpansion::new(k, coeffs));
    }
    Ok(out)
}

/// `T_p` on the echelon basis: entry `[i][j]` is `(T_p b_j)(i)`.
fn hecke_matrix(k: u32, basis: &[Vec<BigInt>], p: usize) -> Vec<Vec<BigInt>> {
    let d = basis.len();
    let pk = BigInt::from(p).pow(k - 1);
    (1..=d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut v = basis[j][p * i].clone();
                    if i % p == 0 {
                        v += &pk * &basis[j][i / p];
                    }
                    v
                })
                .collect()
        })
        .collect()
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).fold(BigInt::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

/// Characteristic polynomial `det(xI − A)`, coefficients low to high.
fn charpoly(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let d = a.len();
    let mut c = vec![BigInt::zero(); d + 1];
    c[d] = BigInt::from(1);
    let mut m = vec![vec![BigInt::zero(); d]; d];
    for k in 1..=d {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &c[d - k + 1];
        }
        let am = mat_mul(a, &m);
        let tr = (0..d).fold(BigInt::zero(), |acc, i| acc + &am[i][i]);
        c[d - k] = -tr / BigInt::from(k);
        m = am;
    }
    c
}

/// Real roots of a polynomial with simple real roots in `[-bound, bound]`,
/// located by Durand–Kerner in double precision.
fn approx_real_roots(c: &[BigInt], bound: f64) -> Vec<f64> {
    use num_complex::Complex64;
    let d = c.len() - 1;
    // scaled coefficients of p(2^sh·y)/2^{sh·d}
    let sh = bound.log2().round() as i64;
    let q: Vec<f64> = (0..=d).map(|i| fixed::big_to_f64_scaled(&c[i], sh * (d - i) as i64)).collect();
    let eval = |z: Complex64| q.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * z + ci);
    let mut z: Vec<Complex64> = (0..d)
        .map(|i| Complex64::from_polar(0.9, 0.4 + 2.0 * PI * i as f64 / d as f64))
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    let scale = 2f64.powi(sh as i32);
    let mut r: Vec<f64> = z.iter().map(|w| w.re * scale).collect();
    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    r
}

/// Eigen-data of `T_2` (or `T_2 + 2T_3`) on the echelon basis at high precision.
struct HeckeSpectrum {
    fixed: Fixed,
    /// eigenvectors with first entry 1, in fixed point
    vectors: Vec<Vec<BigInt>>,
    /// `max_j Σ_i |(A^{-1})_{ji}|` with `A` the eigenvector matrix
    inverse_norm: f64,
    /// `|charpoly(λ)| / ||T||^d` per eigenvalue
    residuals: Vec<f64>,
}

impl HeckeSpectrum {
    fn compute(k: u32) -> Result<Self> {
        let d = dim_cusp_forms(k);
        let small = small_basis(k, 3 * d + 2);
        let t2 = hecke_matrix(k, &small, 2);
        match Self::from_operator(k, &t2, 2.0 * 2f64.powf((k as f64 - 1.0) / 2.0)) {
            Ok(s) => Ok(s),
            Err(Error::DegenerateHecke { .. }) => {
                let t3 = hecke_matrix(k, &small, 3);
                let comb: Vec<Vec<BigInt>> = t2
                    .iter()
                    .zip(&t3)
                    .map(|(r2, r3)| r2.iter().zip(r3).map(|(a, b)| a + b * 2).collect())
                    .collect();
                let bound = 2.0 * 2f64.powf((k as f64 - 1.0) / 2.0) + 4.0 * 3f64.powf((k as f64 - 1.0) / 2.0);
                Self::from_operator(k, &comb, bound)
            }
            Err(e) => Err(e),
        }
    }

    fn from_operator(k: u32, t: &[Vec<BigInt>], bound: f64) -> Result<Self> {
        let d = t.len();
        let fixed = Fixed::new(256 + 12 * k);
        let cp = charpoly(t);
        let approx = if d == 1 {
            vec![t[0][0].to_f64().unwrap()]
        } else {
            approx_real_roots(&cp, bound * 1.01)
        };
        for w in approx.windows(2) {
            if (w[1] - w[0]).abs() <= 1e-9 * bound {
                return Err(Error::DegenerateHecke { weight: k });
            }
        }
        let norm = t
            .iter()
            .flatten()
            .map(|x| x.abs())
            .max()
            .unwrap()
            .to_f64()
            .unwrap()
            .max(1.0);
        let mut eigenvalues = Vec::with_capacity(d);
        let mut residuals = Vec::with_capacity(d);
        for &x0 in &approx {
            let root = fixed.newton_root(&cp, x0);
            let res = fixed.poly_eval(&cp, &root);
            let lres = fixed::ln_abs_fixed(&res, fixed.bits) - d as f64 * norm.ln();
            residuals.push(lres.exp());
            eigenvalues.push(root);
        }
        for w in eigenvalues.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DegenerateHecke { weight: k });
            }
        }
        let vectors: Vec<Vec<BigInt>> = eigenvalues.iter().map(|l| fixed.null_vector(t, l)).collect();
        let a: Vec<Vec<f64>> = vectors
            .iter()
            .map(|v| v.iter().map(|x| fixed.to_f64(x)).collect())
            .collect();
        let inverse_norm = inverse_row_norm(&a);
        Ok(HeckeSpectrum { fixed, vectors, inverse_norm, residuals })
    }
}

/// `max_j Σ_i |(A^{-1})_{ji}|` by Gauss–Jordan elimination in double precision.
fn inverse_row_norm(a: &[Vec<f64>]) -> f64 {
    let d = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..d).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&x, &y| m[x][col].abs().partial_cmp(&m[y][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        let pv = m[col][col];
        for x in m[col].iter_mut() {
            *x /= pv;
        }
        for r in 0..d {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * d {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    // rows of the inverse are indexed by basis position j, columns by form i
    (0..d)
        .map(|j| (0..d).map(|i| m[j][d + i].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        * 4.0
}

/// A normalized level-1 Hecke eigenform.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Newform {
    pub weight: u32,
    pub index: usize,
    /// `λ_f(n)` for `0 <= n <= n_max` (entry 0 unused)
    pub lambda: Vec<f64>,
    pub petersson_weight: f64,
    pub field_degree: usize,
    /// `|charpoly(eigenvalue)| / ||T||^d` for the distinguishing operator
    pub hecke_residual: f64,
}

impl Newform {
    pub fn n_max(&self) -> usize {
        self.lambda.len() - 1
    }

    /// `λ_f(p^e)` by the Hecke recursion.
    pub fn prime_power(&self, p: u64, e: u32) -> Result<f64> {
        if e == 0 {
            return Ok(1.0);
        }
        if p as usize > self.n_max() {
            return Err(Error::TableExhausted { needed: p, available: self.n_max() as u64 });
        }
        let lp = self.lambda[p as usize];
        let (mut prev, mut cur) = (1.0, lp);
        for _ in 1..e {
            let next = lp * cur - prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }
}

/// `λ_f(n)`: table lookup when `n <= n_max`, otherwise assembled from prime
/// powers.
pub fn hecke_lambda(f: &Newform, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    if (n as usize) <= f.n_max() {
        return Ok(f.lambda[n as usize]);
    }
    let mut v = 1.0;
    for (p, e) in crate::arith::factorize(n) {
        v *= f.prime_power(p, e)?;
    }
    Ok(v)
}

pub fn petersson_weight(f: &Newform) -> f64 {
    f.petersson_weight
}

/// Fills `λ(n)` for all `n <= n_max` from prime values.
fn extend_multiplicative(prime_vals: &[(usize, f64)], n_max: usize) -> Vec<f64> {
    let sieve = Sieve::new(n_max.max(2));
    let mut lam = vec![0.0; n_max + 1];
    let mut at_prime = vec![0.0; n_max + 1];
    for &(p, v) in prime_vals {
        at_prime[p] = v;
    }
    if n_max >= 1 {
        lam[1] = 1.0;
    }
    for n in 2..=n_max {
        let fac = sieve.factorize(n);
        let (p, e) = fac[0];
        let p = p as usize;
        let pe = p.pow(e);
        let rest = n / pe;
        let lp = at_prime[p];
        let (mut prev, mut cur) = (1.0, lp);
        for _ in 1..e {
            let next = lp * cur - prev;
            prev = cur;
            cur = next;
        }
        lam[n] = cur * lam[rest];
    }
    lam
}

/// Hecke eigenforms of weight `k` with eigenvalues to `n_max`, sorted by
/// their `T_2` eigenvalue. The eigenvalue field degree is taken as the
/// dimension, since the characteristic polynomials of `T_2` are irreducible
/// throughout the desk range.
pub fn eigenforms(k: u32, n_max: usize) -> Result<Vec<Newform>> {
    let d = dim_cusp_forms(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    if let Some(hit) = cache::load_eigenforms(k, n_max)? {
        return Ok(hit);
    }
    let needed = crate::lfunctions::sym2_length_hint(k);
    let n_eff = n_max.max(needed).max(2 * d + 2);
    let spectrum = HeckeSpectrum::compute(k)?;
    let bits = coefficient_bits(k, n_eff, spectrum.inverse_norm);
    let mut count = (bits as usize).div_ceil(30) + 1;
    let sieve = Sieve::new(n_eff);
    let primes: Vec<usize> = sieve.primes().collect();
    let half = (k as f64 - 1.0) / 2.0;
    let prime_vals = loop {
        let mb = ModularBasis::build(k, n_eff, count);
        let crt = Crt::new(&mb.primes);
        let mut stable = true;
        let mut vals: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(primes.len()); d];
        'outer: for &p in &primes {
            let coeffs: Vec<BigInt> = (0..d)
                .map(|j| {
                    let r = mb.residues(j, p);
                    let full = crt.reconstruct(&r, count);
                    if full != crt.reconstruct(&r, count - 1) {
                        stable = false;
                    }
                    full
                })
                .collect();
            if !stable {
                break 'outer;
            }
            for (fi, v) in spectrum.vectors.iter().enumerate() {
                let acc = v.iter().zip(&coeffs).fold(BigInt::zero(), |acc, (x, c)| acc + x * c);
                let lam = fixed::scaled_ratio(&acc, spectrum.fixed.bits, p as f64, half);
                vals[fi].push((p, lam));
            }
        }
        if stable {
            break vals;
        }
        count += 2;
    };
    let mut out = Vec::with_capacity(d);
    for (index, pv) in prime_vals.into_iter().enumerate() {
        let lambda = extend_multiplicative(&pv, n_eff);
        let l1 = crate::lfunctions::sym2_l_one(k, &|n| lambda[n])?;
        let omega = (k as f64 - 1.0) / (2.0 * PI * PI) * l1;
        let mut lambda = lambda;
        lambda.truncate(n_max.max(2 * d + 2) + 1);
        out.push(Newform {
            weight: k,
            index,
            lambda,
            petersson_weight: omega,
            field_degree: d,
            hecke_residual: spectrum.residuals[index],
        });
    }
    cache::store_eigenforms(k, &out)?;
    Ok(out)
}

/// Integer matrices of `T_2` and `T_3` on the echelon basis.
pub fn hecke_matrices(k: u32) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let d = dim_cusp_forms(k);
    let small = small_basis(k, 3 * d + 2);
    (hecke_matrix(k, &small, 2), hecke_matrix(k, &small, 3))
}

pub fn hecke_commute(k: u32) -> bool {
    let (t2, t3) = hecke_matrices(k);
    mat_mul(&t2, &t3) == mat_mul(&t3, &t2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let dims: Vec<usize> = [10, 12, 14, 24, 26, 28, 36, 38, 80].iter().map(|&k| dim_cusp_forms(k)).collect();
        assert_eq!(dims, vec![0, 1, 0, 2, 1, 2, 3, 2, 6]);
    }

    #[test]
    fn delta_expansion() {
        let b = victor_miller_basis(12, 5).unwrap();
        assert_eq!(b.len(), 1);
        let c: Vec<i64> = b[0].coeffs().iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(c, vec![0, 1, -24, 252, -1472, 4830]);
        assert!(victor_miller_basis(10, 5).unwrap().is_empty());
        assert_eq!(victor_miller_basis(28, 10).unwrap().len(), 2);
    }

    #[test]
    fn echelon_and_modular_agree_with_exact() {
        for k in [24u32, 36, 48] {
            let vm = victor_miller_basis(k, 40).unwrap();
            let exact = small_basis(k, 41);
            for (j, b) in vm.iter().enumerate() {
                for n in 1..=vm.len() {
                    assert_eq!(b.coeff(n), &BigInt::from((n == j + 1) as i64));
                }
                assert_eq!(b.coeffs(), &exact[j][..]);
            }
        }
    }

    #[test]
    fn delta_eigenvalues() {
        let f = &eigenforms(12, 200).unwrap()[0];
        assert!((f.lambda[2] + 24.0 / 2f64.powf(5.5)).abs() < 1e-15);
        assert!((f.lambda[1] - 1.0).abs() < 1e-15);
        assert!((f.lambda[2] * f.lambda[3] - f.lambda[6]).abs() < 1e-14);
        assert!((hecke_lambda(f, 4).unwrap() - (f.lambda[2].powi(2) - 1.0)).abs() < 1e-14);
        // τ(12) = -370944
        assert!((f.lambda[12] + 370944.0 / 12f64.powf(5.5)).abs() < 1e-13);
        assert!((hecke_lambda(f, 12).unwrap() - hecke_lambda(f, 4).unwrap() * f.lambda[3]).abs() < 1e-14);
        assert!(matches!(hecke_lambda(f, 211 * 211), Err(Error::TableExhausted { .. })));
    }

    #[test]
    fn hecke_relations_higher_weight() {
        for k in [24u32, 36, 50] {
            let forms = eigenforms(k, 300).unwrap();
            assert_eq!(forms.len(), dim_cusp_forms(k));
            for f in &forms {
                assert!(f.hecke_residual < 1e-8);
                assert!((f.lambda[1] - 1.0).abs() < 1e-15);
                for p in [2usize, 3, 5, 7, 97] {
                    assert!(f.lambda[p].abs() <= 2.0 + 1e-8, "Deligne k={k} p={p}");
                }
                for (m, n) in [(4usize, 6usize), (8, 12), (9, 27), (10, 15)] {
                    let g = num_integer::gcd(m, n);
                    let rhs: f64 = (1..=g).filter(|d| g % d == 0).map(|d| f.lambda[m * n / (d * d)]).sum();
                    assert!((f.lambda[m] * f.lambda[n] - rhs).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn hecke_operators_commute() {
        for k in (12..=60).step_by(2) {
            assert!(hecke_commute(k), "k={k}");
        }
    }

    #[test]
    fn harmonic_weight_window() {
        for k in [12u32, 16, 18, 20, 22, 26] {
            for f in eigenforms(k, 100).unwrap() {
                let w = f.petersson_weight;
                assert!(w > 0.0);
                // ω_f = (k−1)/(2π²)·L(1, sym² f) with k^{-ε} ≪ L(1, sym² f) ≪ k^ε, ε = 1/2
                let kf = k as f64;
                let scale = 2.0 * PI * PI / (kf - 1.0);
                assert!(w * scale > kf.powf(-0.5) && w * scale < kf.powf(0.5), "k={k} ω={w}");
            }
        }
    }
}
