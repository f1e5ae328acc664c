//! Exact integer and modular arithmetic: divisor structure, modular inverses,
//! Kloosterman and Ramanujan sums, and the elementary reciprocity law.

use std::f64::consts::TAU;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Kahan;

/// A residue class `value mod modulus` with `0 <= value < modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(a: i64, modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        Residue { value: reduce(a, modulus), modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// `a mod c` in `[0, c)` for signed `a`.
pub fn reduce(a: i64, c: u64) -> u64 {
    (a as i128).rem_euclid(c as i128) as u64
}

#[inline]
pub fn mulmod(a: u64, b: u64, c: u64) -> u64 {
    ((a as u128 * b as u128) % c as u128) as u64
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Extended gcd: returns `(g, x, y)` with `a x + b y = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// The inverse of `a` modulo `c`. Modulus 1 has the single residue 0.
pub fn mod_inverse(a: i64, c: u64) -> Result<Residue> {
    if c == 0 {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    let ar = reduce(a, c);
    let (g, x, _) = ext_gcd(ar as i128, c as i128);
    if g != 1 {
        return Err(Error::NotInvertible { a, modulus: c, gcd: g as u64 });
    }
    Ok(Residue { value: x.rem_euclid(c as i128) as u64, modulus: c })
}

/// Inverts every entry of `xs` modulo `c` with one extended gcd, using a
/// product tree: products are formed bottom-up and the root inverse is pushed
/// back down.
pub fn batch_inverse(xs: &[u64], c: u64) -> Result<Vec<u64>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    if c == 1 {
        return Ok(vec![0; xs.len()]);
    }
    let mut levels: Vec<Vec<u64>> = vec![xs.iter().map(|&x| x % c).collect()];
    while levels.last().unwrap().len() > 1 {
        let prev = levels.last().unwrap();
        let next: Vec<u64> = prev
            .chunks(2)
            .map(|p| if p.len() == 2 { mulmod(p[0], p[1], c) } else { p[0] })
            .collect();
        levels.push(next);
    }
    let root = levels.last().unwrap()[0];
    let mut inv = match mod_inverse(root as i64, c) {
        Ok(r) => vec![r.value()],
        Err(_) => {
            // report the first offending entry
            for &x in xs {
                let g = gcd(x % c, c);
                if g != 1 {
                    return Err(Error::NotInvertible { a: x as i64, modulus: c, gcd: g });
                }
            }
            unreachable!("product of units must be a unit")
        }
    };
    for lvl in (0..levels.len() - 1).rev() {
        let cur = &levels[lvl];
        let mut down = vec![0u64; cur.len()];
        for (j, &pinv) in inv.iter().enumerate() {
            let l = 2 * j;
            if l + 1 < cur.len() {
                down[l] = mulmod(pinv, cur[l + 1], c);
                down[l + 1] = mulmod(pinv, cur[l], c);
            } else {
                down[l] = pinv;
            }
        }
        inv = down;
    }
    Ok(inv)
}

/// Smallest-prime-factor sieve.
#[derive(Clone, Debug)]
pub struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(limit: usize) -> Self {
        let n = limit.max(1) + 1;
        let mut spf = vec![0u32; n];
        for i in 2..n {
            if spf[i] == 0 {
                let mut j = i;
                while j < n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Sieve { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    pub fn primes(&self) -> impl Iterator<Item = usize> + '_ {
        (2..self.spf.len()).filter(move |&n| self.spf[n] as usize == n)
    }

    pub fn factorize(&self, mut n: usize) -> Vec<(u64, u32)> {
        assert!(n <= self.limit(), "sieve too small");
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }

    /// Möbius function for every `n <= limit` (index 0 unused).
    pub fn mobius_table(&self) -> Vec<i8> {
        let n = self.spf.len();
        let mut mu = vec![0i8; n];
        if n > 1 {
            mu[1] = 1;
        }
        for i in 2..n {
            let p = self.spf[i] as usize;
            let q = i / p;
            mu[i] = if q % p == 0 { 0 } else { -mu[q] };
        }
        mu
    }
}

/// Prime factorization by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mobius(n: u64) -> i64 {
    assert!(n >= 1);
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// Number of divisors.
pub fn tau(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Number of ordered factorizations `n = abc`.
pub fn tau3(n: u64) -> u64 {
    factorize(n)
        .iter()
        .map(|&(_, e)| (e as u64 + 1) * (e as u64 + 2) / 2)
        .product()
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// S(m,n;c) with its certified imaginary residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KloostermanValue {
    pub real_part: f64,
    pub certified_imag_residual: f64,
    pub terms: u64,
}

impl KloostermanValue {
    pub fn value(&self) -> f64 {
        self.real_part
    }

    /// Whether the imaginary part is consistent with rounding noise.
    pub fn imag_certified(&self) -> bool {
        self.certified_imag_residual.abs() <= 1e-12 * (self.terms.max(1) as f64)
    }
}

/// `τ(c)·√gcd(m,n,c)·√c`.
pub fn weil_bound(m: i64, n: i64, c: u64) -> f64 {
    let g = gcd(gcd(reduce(m, c), reduce(n, c)), c);
    let g = if g == 0 { c } else { g };
    tau(c) as f64 * (g as f64).sqrt() * (c as f64).sqrt()
}

/// cos and sin of `2π r / c` for `0 <= r < c`, folded to the first half turn.
#[inline]
fn unit_root(r: u64, c: u64) -> (f64, f64) {
    if 2 * r <= c {
        let a = TAU * (r as f64) / (c as f64);
        (a.cos(), a.sin())
    } else {
        let a = TAU * ((c - r) as f64) / (c as f64);
        (a.cos(), -a.sin())
    }
}

/// Units modulo `c` in ascending order.
pub fn units(c: u64) -> Vec<u64> {
    if c == 1 {
        return vec![0];
    }
    (1..c).filter(|&x| gcd(x, c) == 1).collect()
}

/// The Kloosterman sum `S(m,n;c)`, summed over units in ascending order with
/// compensated accumulation.
pub fn kloosterman(m: i64, n: i64, c: u64) -> KloostermanValue {
    assert!(c >= 1, "modulus must be positive");
    if c == 1 {
        return KloostermanValue { real_part: 1.0, certified_imag_residual: 0.0, terms: 1 };
    }
    let xs = units(c);
    let inv = batch_inverse(&xs, c).expect("units are invertible");
    let (mr, nr) = (reduce(m, c), reduce(n, c));
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    for (&x, &xb) in xs.iter().zip(&inv) {
        let r = (mulmod(mr, x, c) + mulmod(nr, xb, c)) % c;
        let (co, si) = unit_root(r, c);
        re.add(co);
        im.add(si);
    }
    KloostermanValue {
        real_part: re.sum(),
        certified_imag_residual: im.sum(),
        terms: xs.len() as u64,
    }
}

/// Precomputed unit/inverse/cosine data for repeated sums at one modulus.
#[derive(Clone, Debug)]
pub struct KloostermanTable {
    c: u64,
    xs: Vec<u64>,
    inv: Vec<u64>,
    cos: Vec<f64>,
}

impl KloostermanTable {
    pub fn new(c: u64) -> Self {
        let xs = units(c);
        let inv = if c == 1 { vec![0] } else { batch_inverse(&xs, c).expect("units") };
        let cos = (0..c).map(|r| unit_root(r, c).0).collect();
        KloostermanTable { c, xs, inv, cos }
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    /// `S(m,n;c)`; agrees with [`kloosterman`] to rounding.
    pub fn eval(&self, m: i64, n: i64) -> f64 {
        if self.c == 1 {
            return 1.0;
        }
        let c = self.c;
        let (mr, nr) = (reduce(m, c), reduce(n, c));
        let mut acc = Kahan::default();
        for (&x, &xb) in self.xs.iter().zip(&self.inv) {
            let r = (mulmod(mr, x, c) + mulmod(nr, xb, c)) % c;
            acc.add(self.cos[r as usize]);
        }
        acc.sum()
    }

    /// `S(m, n; c)` for all `n mod c`.
    pub fn row(&self, m: i64) -> Vec<f64> {
        (0..self.c).map(|n| self.eval(m, n as i64)).collect()
    }
}

/// Ramanujan sum `c_c(m) = Σ_{d | (m,c)} d μ(c/d)`.
pub fn ramanujan_sum(m: i64, c: u64) -> i64 {
    assert!(c >= 1);
    let g = gcd(reduce(m, c), c);
    let g = if g == 0 { c } else { g };
    divisors(g)
        .into_iter()
        .map(|d| d as i64 * mobius(c / d))
        .sum()
}

/// An exact phase `t` of `e(t)`, reduced to `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalPhase(BigRational);

impl RationalPhase {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let den = den.into();
        assert!(den.is_positive(), "denominator must be positive");
        Self::from_ratio(BigRational::new(num.into(), den))
    }

    fn from_ratio(r: BigRational) -> Self {
        let fl = r.floor();
        RationalPhase(r - fl)
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl std::ops::Add for &RationalPhase {
    type Output = RationalPhase;
    fn add(self, rhs: &RationalPhase) -> RationalPhase {
        RationalPhase::from_ratio(&self.0 + &rhs.0)
    }
}

impl fmt::Display for RationalPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// The three phases of `e(N·inv(b)/C) = e(−N·inv(C)/b)·e(N/(bC))` with
/// `N = m r²`, `C = cM`, `b = ℓq²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReciprocityPhases {
    pub left: RationalPhase,
    pub right_arith: RationalPhase,
    pub right_arch: RationalPhase,
}

impl ReciprocityPhases {
    pub fn holds(&self) -> bool {
        &self.right_arith + &self.right_arch == self.left
    }
}

pub fn reciprocity_identity(m: i64, r: i64, c: i64, big_m: i64, l: i64, q: i64) -> Result<ReciprocityPhases> {
    let cm = BigInt::from(c) * BigInt::from(big_m);
    let b = BigInt::from(l) * BigInt::from(q) * BigInt::from(q);
    if !cm.is_positive() || !b.is_positive() {
        return Err(Error::Precondition("cM and ℓq² must be positive".into()));
    }
    if !cm.gcd(&b).is_one() {
        return Err(Error::NonCoprime { left: cm.to_string(), right: b.to_string() });
    }
    let n = BigInt::from(m) * BigInt::from(r) * BigInt::from(r);
    let inv_b = big_inverse(&b, &cm);
    let inv_c = big_inverse(&cm, &b);
    Ok(ReciprocityPhases {
        left: RationalPhase::new(&n * inv_b, cm.clone()),
        right_arith: RationalPhase::new(-(&n * inv_c), b.clone()),
        right_arch: RationalPhase::new(n, cm * b),
    })
}

fn big_inverse(a: &BigInt, c: &BigInt) -> BigInt {
    if c.is_one() {
        return BigInt::zero();
    }
    let e = a.mod_floor(c).extended_gcd(c);
    e.x.mod_floor(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(3, 7).unwrap().value(), 5);
        assert_eq!(mod_inverse(1, 1).unwrap().value(), 0);
        match mod_inverse(6, 9) {
            Err(Error::NotInvertible { gcd, .. }) => assert_eq!(gcd, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn batch_matches_single() {
        let c = 997 * 3;
        let xs: Vec<u64> = (1..c).filter(|&x| gcd(x, c) == 1).take(301).collect();
        let inv = batch_inverse(&xs, c).unwrap();
        for (x, xi) in xs.iter().zip(inv) {
            assert_eq!(mulmod(*x, xi, c), 1);
        }
        assert!(batch_inverse(&[2, 4], 6).is_err());
    }

    #[test]
    fn kloosterman_examples() {
        assert_eq!(kloosterman(1, 1, 1).value(), 1.0);
        assert!((kloosterman(1, 2, 3).value() - 2.0).abs() < 1e-14);
        for c in 1..40u64 {
            for m in 0..5 {
                let s = kloosterman(m, 0, c).value();
                assert!((s - ramanujan_sum(m, c) as f64).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn table_matches_direct() {
        let t = KloostermanTable::new(91);
        for (m, n) in [(1, 1), (3, 17), (0, 5), (-4, 90)] {
            assert!((t.eval(m, n) - kloosterman(m, n, 91).value()).abs() < 1e-12);
        }
    }

    #[test]
    fn ramanujan_examples() {
        assert_eq!(ramanujan_sum(1, 6), 1);
        assert_eq!(ramanujan_sum(6, 6), 2);
        assert_eq!(ramanujan_sum(0, 12), euler_phi(12) as i64);
    }

    #[test]
    fn reciprocity_example() {
        let p = reciprocity_identity(1, 1, 3, 1, 5, 1).unwrap();
        assert_eq!(p.left, RationalPhase::new(2, 3));
        assert_eq!(p.right_arith, RationalPhase::new(-2, 5));
        assert_eq!(p.right_arch, RationalPhase::new(1, 15));
        assert!(p.holds());
        let z = reciprocity_identity(0, 4, 7, 2, 3, 5).unwrap();
        assert!(z.left.is_zero() && z.right_arith.is_zero() && z.right_arch.is_zero());
        assert!(reciprocity_identity(1, 1, 3, 1, 6, 1).is_err());
    }

    #[test]
    fn arithmetic_functions() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(tau3(12), 18);
        assert_eq!(mobius(30), -1);
        let s = Sieve::new(1000);
        let mu = s.mobius_table();
        for n in 1..=1000u64 {
            assert_eq!(mu[n as usize] as i64, mobius(n));
        }
        assert_eq!(s.primes().count(), 168);
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(c in 1u64..1_000_000, a in any::<i64>()) {
            if gcd(reduce(a, c), c) == 1 {
                let x = mod_inverse(a, c).unwrap().value();
                prop_assert_eq!(mulmod(reduce(a, c), x, c), 1 % c);
            }
        }

        #[test]
        fn weil_and_symmetry(m in -500i64..500, n in -500i64..500, c in 1u64..600) {
            let s = kloosterman(m, n, c);
            prop_assert!(s.imag_certified());
            prop_assert!(s.value().abs() <= weil_bound(m, n, c) * (1.0 + 1e-12) + 1e-9);
            prop_assert!((s.value() - kloosterman(n, m, c).value()).abs() < 1e-12 * c as f64);
        }

        #[test]
        fn twisted_multiplicativity(m in -100i64..100, n in -100i64..100, c1 in 1u64..80, c2 in 1u64..80) {
            prop_assume!(gcd(c1, c2) == 1);
            let i1 = mod_inverse(c1 as i64, c2).unwrap().value() as i64;
            let i2 = mod_inverse(c2 as i64, c1).unwrap().value() as i64;
            let lhs = kloosterman(m, n, c1 * c2).value();
            let rhs = kloosterman(m * i2, n * i2, c1).value() * kloosterman(m * i1, n * i1, c2).value();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
        }

        #[test]
        fn reciprocity_exact(m in -10_000i64..10_000, r in -100i64..100, c in 1i64..500, bm in 1i64..50, l in 1i64..500, q in 1i64..50) {
            match reciprocity_identity(m, r, c, bm, l, q) {
                Ok(p) => prop_assert!(p.holds()),
                Err(Error::NonCoprime { .. }) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
