//! GL(3) coefficients of symmetric-square lifts of level-1 eigenforms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{mobius, Sieve};
use crate::error::{Error, Result};
use crate::lfunctions::{GammaFactor, SmoothedSeries};
use crate::modforms::Newform;

/// `F = sym² g` for a level-1 eigenform `g` of weight κ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymSquareForm {
    pub base_weight: u32,
    pub base_index: usize,
    /// `A(n,1)` for `0 <= n <= n_max`; entry 0 unused
    pub first_row: Vec<f64>,
    pub alpha: [Complex64; 3],
}

impl SymSquareForm {
    pub fn new(g: &Newform, n_max: usize) -> Result<Self> {
        Ok(SymSquareForm {
            base_weight: g.weight,
            base_index: g.index,
            first_row: symsq_first_row(g, n_max)?,
            alpha: langlands_params(g),
        })
    }

    pub fn n_max(&self) -> usize {
        self.first_row.len() - 1
    }

    pub fn a(&self, n: usize) -> Result<f64> {
        self.first_row
            .get(n)
            .copied()
            .filter(|_| n > 0)
            .ok_or(Error::TableExhausted { needed: n as u64, available: self.n_max() as u64 })
    }

    /// Archimedean factor `Γ_R(s+1) Γ_C(s+κ−1)` of `L(s, F)`.
    pub fn gamma(&self) -> GammaFactor {
        GammaFactor::sym_square(self.base_weight)
    }
}

/// `λ(p^r)` from `λ(p)` by the Chebyshev recursion.
fn prime_power_lambda(lp: f64, r: u32) -> f64 {
    let (mut prev, mut cur) = (1.0, lp);
    if r == 0 {
        return 1.0;
    }
    for _ in 1..r {
        let next = lp * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `A(p^e, 1) = Σ_{j <= e/2} λ(p^{2e−4j})`.
pub fn symsq_prime_power(lp: f64, e: u32) -> f64 {
    (0..=e / 2).map(|j| prime_power_lambda(lp, 2 * e - 4 * j)).sum()
}

/// First row `A(n,1)` for `n <= n_max` from prime eigenvalues `λ(p)`.
pub fn symsq_from_primes<F>(lambda_p: F, n_max: usize) -> Vec<f64>
where
    F: Fn(usize) -> f64,
{
    let sieve = Sieve::new(n_max.max(2));
    let mut a = vec![0.0; n_max + 1];
    if n_max >= 1 {
        a[1] = 1.0;
    }
    for n in 2..=n_max {
        let (p, e) = sieve.factorize(n)[0];
        let pe = (p as usize).pow(e);
        a[n] = symsq_prime_power(lambda_p(p as usize), e) * a[n / pe];
    }
    a
}

pub fn symsq_first_row(g: &Newform, n_max: usize) -> Result<Vec<f64>> {
    if n_max > g.n_max() {
        return Err(Error::TableExhausted { needed: n_max as u64, available: g.n_max() as u64 });
    }
    Ok(symsq_from_primes(|p| g.lambda[p], n_max))
}

/// `A(m,n) = Σ_{d | (m,n)} μ(d) A(m/d,1) A(1,n/d)` with `A(1,n) = A(n,1)`.
pub fn gl3_coeff(f: &SymSquareForm, m: u64, n: u64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::Precondition("indices must be positive".into()));
    }
    let g = num_integer::gcd(m, n);
    let mut acc = 0.0;
    for d in crate::arith::divisors(g) {
        let mu = mobius(d);
        if mu != 0 {
            acc += mu as f64 * f.a((m / d) as usize)? * f.a((n / d) as usize)?;
        }
    }
    Ok(acc)
}

/// The parameter label `(κ−1, 0, −(κ−1))`. Computations use the
/// archimedean factor from [`SymSquareForm::gamma`].
pub fn langlands_params(g: &Newform) -> [Complex64; 3] {
    let a = g.weight as f64 - 1.0;
    [Complex64::new(a, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-a, 0.0)]
}

/// Archimedean `(μ_j, δ_j)` pairs of `sym² g`: `L_∞ = Π Γ_R(s + μ_j + δ_j)`.
pub fn archimedean_pairs(kappa: u32) -> [(f64, u32); 3] {
    let m = kappa as f64 - 1.0;
    [(0.0, 1), (m, 0), (m, 1)]
}

/// `L(1, F)` by the smoothed functional equation.
pub fn l_one(f: &SymSquareForm) -> Result<f64> {
    let series = SmoothedSeries::new(f.gamma(), 1.0);
    let s = Complex64::new(1.0, 0.0);
    let need = series.length(s, 1.0, 1e-15);
    if need > f.n_max() {
        return Err(Error::TableExhausted { needed: need as u64, available: f.n_max() as u64 });
    }
    Ok(series.eval(&f.first_row, s, 1.0)?.re)
}

/// Relative mismatch of the functional equation with the given Γ_R shifts,
/// from evaluating the smoothed series at two scales.
pub fn functional_equation_gap(f: &SymSquareForm, shifts: &[f64], s: Complex64) -> Result<f64> {
    let series = SmoothedSeries::new(GammaFactor::from_shifts(shifts.to_vec()), 1.0);
    let need = series.length(s, 1.3, 1e-15).max(series.length(s, 1.0, 1e-15));
    if need > f.n_max() {
        return Err(Error::TableExhausted { needed: need as u64, available: f.n_max() as u64 });
    }
    let a = series.eval(&f.first_row, s, 1.0)?;
    let b = series.eval(&f.first_row, s, 1.3)?;
    Ok((a - b).norm() / a.norm().max(b.norm()).max(1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::eigenforms;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn delta() -> &'static SymSquareForm {
        static F: OnceLock<SymSquareForm> = OnceLock::new();
        F.get_or_init(|| SymSquareForm::new(&eigenforms(12, 12000).unwrap()[0], 12000).unwrap())
    }

    #[test]
    fn first_row_examples() {
        let g = &eigenforms(12, 200).unwrap()[0];
        let f = SymSquareForm::new(g, 200).unwrap();
        assert_eq!(f.a(1).unwrap(), 1.0);
        let l = |n: u64| crate::modforms::hecke_lambda(g, n).unwrap();
        assert!((f.a(7).unwrap() - l(49)).abs() < 1e-13);
        assert!((f.a(9).unwrap() - (l(81) + 1.0)).abs() < 1e-13);
        // Euler factor check at p = 2: Σ A(2^e) X^e = 1/((1−αX)(1−X)(1−βX)), αβ = 1
        let lp = g.lambda[2];
        let mut coeff = vec![1.0, 0.0, 0.0, 0.0, 0.0];
        let roots_sum = lp * lp - 1.0; // α + β + 1 with α+β = λ(p)²−2
        // power sums: h_e of {α, 1, β}; e1 = λ²−1, e2 = λ²−1, e3 = 1
        let (e1, e2, e3) = (roots_sum, roots_sum, 1.0);
        for e in 1..5 {
            let mut h = e1 * coeff[e - 1];
            if e >= 2 {
                h -= e2 * coeff[e - 2];
            }
            if e >= 3 {
                h += e3 * coeff[e - 3];
            }
            coeff[e] = h;
        }
        for (e, want) in coeff.iter().enumerate().skip(1) {
            assert!((f.a(1 << e).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn gl3_coefficient_examples() {
        let f = delta();
        for p in [2u64, 3, 5, 13] {
            let ap = f.a(p as usize).unwrap();
            assert!((gl3_coeff(f, p, p).unwrap() - (ap * ap - 1.0)).abs() < 1e-12);
        }
        assert_eq!(gl3_coeff(f, 1, 10).unwrap(), f.a(10).unwrap());
        assert!((gl3_coeff(f, 4, 9).unwrap() - f.a(4).unwrap() * f.a(9).unwrap()).abs() < 1e-12);
        assert!((gl3_coeff(f, 6, 10).unwrap() - gl3_coeff(f, 10, 6).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hecke_bound() {
        let f = delta();
        for n in 1..=10_000u64 {
            let bound = crate::arith::tau3(n) as f64 * (n as f64).powf(7.0 / 32.0 + 0.01);
            assert!(f.a(n as usize).unwrap().abs() <= bound, "n={n}");
        }
    }

    #[test]
    fn labels() {
        let g = &eigenforms(12, 50).unwrap()[0];
        let a = langlands_params(g);
        assert_eq!(a[0].re, 11.0);
        assert_eq!((a[0] + a[1] + a[2]).norm(), 0.0);
        assert_eq!(a[2], -a[0]);
    }

    #[test]
    fn functional_equation_certificate() {
        let f = delta();
        let shifts: Vec<f64> = archimedean_pairs(12).iter().map(|&(m, d)| m + d as f64).collect();
        for sigma in [0.4, 0.5, 0.6] {
            for t in [-2.0, -0.7, 0.0, 1.3, 2.0] {
                let gap = functional_equation_gap(f, &shifts, Complex64::new(sigma, t)).unwrap();
                assert!(gap < 1e-6, "σ={sigma} t={t} gap={gap}");
            }
        }
        // the literal triple read as Γ_R(s+α_j) does not satisfy the equation
        let literal = functional_equation_gap(f, &[12.0, 1.0, 11.0 - 1.0], Complex64::new(0.5, 1.0)).unwrap();
        assert!(literal > 1e-3);
    }

    #[test]
    fn l_one_converges() {
        let f = delta();
        let v = l_one(f).unwrap();
        assert!(v > 0.0);
        let direct: f64 = (1..=12000).map(|n| f.a(n).unwrap() / n as f64 * (-(n as f64) / 3000.0).exp()).sum();
        assert!((v - direct).abs() < 0.05 * v, "{v} vs {direct}");
    }

    proptest! {
        #[test]
        fn multiplicative(m in 1usize..100, n in 1usize..100) {
            prop_assume!(num_integer::gcd(m, n) == 1);
            let f = delta();
            let lhs = f.a(m * n).unwrap();
            let rhs = f.a(m).unwrap() * f.a(n).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
        }
    }
}
