//! Power series over word-sized NTT primes and CRT reconstruction.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// A prime `p < 2^31` with `2^max_log | p − 1` and a primitive root.
#[derive(Clone, Copy, Debug)]
pub struct NttPrime {
    pub p: u64,
    pub g: u64,
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = 1u64;
        let mut base = a;
        let mut e = d;
        while e > 0 {
            if e & 1 == 1 {
                x = mulm(x, base);
            }
            base = mulm(base, base);
            e >>= 1;
        }
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The first `count` primes of the form `c·2^max_log + 1` below `2^31`,
/// scanning downward from the top.
pub fn ntt_primes(count: usize, max_log: u32) -> Vec<NttPrime> {
    let step = 1u64 << max_log;
    let mut out = Vec::with_capacity(count);
    let mut c = ((1u64 << 31) - 1) / step;
    while out.len() < count && c > 0 {
        let p = c * step + 1;
        if is_prime_u64(p) {
            let phi = p - 1;
            let mut factors = Vec::new();
            let mut m = phi;
            let mut f = 2;
            while f * f <= m {
                if m % f == 0 {
                    factors.push(f);
                    while m % f == 0 {
                        m /= f;
                    }
                }
                f += 1;
            }
            if m > 1 {
                factors.push(m);
            }
            let g = (2..p)
                .find(|&g| factors.iter().all(|&q| pow_mod(g, phi / q, p) != 1))
                .expect("primitive root");
            out.push(NttPrime { p, g });
        }
        c -= 1;
    }
    assert_eq!(out.len(), count, "ran out of NTT primes");
    out
}

#[inline]
fn shoup(w: u64, p: u64) -> u64 {
    (((w as u128) << 64) / p as u128) as u64
}

#[inline]
fn mul_shoup(x: u64, w: u64, ws: u64, p: u64) -> u64 {
    let q = ((x as u128 * ws as u128) >> 64) as u64;
    let r = x.wrapping_mul(w).wrapping_sub(q.wrapping_mul(p));
    if r >= p {
        r - p
    } else {
        r
    }
}

/// Precomputed twiddles for transforms of one size modulo one prime.
pub struct NttPlan {
    p: u64,
    n: usize,
    fwd: Vec<u64>,
    fwd_s: Vec<u64>,
    inv: Vec<u64>,
    inv_s: Vec<u64>,
    n_inv: u64,
}

impl NttPlan {
    pub fn new(prime: NttPrime, n: usize) -> Self {
        assert!(n.is_power_of_two());
        let p = prime.p;
        assert_eq!((p - 1) % n as u64, 0, "transform too long for prime");
        let root = pow_mod(prime.g, (p - 1) / n as u64, p);
        let iroot = pow_mod(root, p - 2, p);
        // stage with half-length h reads its twiddles from [h, 2h)
        let stages = |r: u64| {
            let mut tw = vec![0u64; n.max(2)];
            let mut h = 1;
            while h < n {
                let w = pow_mod(r, (n / (2 * h)) as u64, p);
                let mut x = 1u64;
                for k in 0..h {
                    tw[h + k] = x;
                    x = x * w % p;
                }
                h <<= 1;
            }
            tw
        };
        let fwd = stages(root);
        let inv = stages(iroot);
        let fwd_s = fwd.iter().map(|&w| shoup(w, p)).collect();
        let inv_s = inv.iter().map(|&w| shoup(w, p)).collect();
        NttPlan { p, n, fwd, fwd_s, inv, inv_s, n_inv: pow_mod(n as u64, p - 2, p) }
    }

    fn transform(&self, a: &mut [u64], inverse: bool) {
        let n = self.n;
        let p = self.p;
        let mut j = 0;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let (tw, tws) = if inverse { (&self.inv, &self.inv_s) } else { (&self.fwd, &self.fwd_s) };
        let mut half = 1;
        while half < n {
            let (w, ws) = (&tw[half..2 * half], &tws[half..2 * half]);
            for block in a.chunks_exact_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for k in 0..half {
                    let u = lo[k];
                    let v = mul_shoup(hi[k], w[k], ws[k], p);
                    let s = u + v;
                    lo[k] = if s >= p { s - p } else { s };
                    hi[k] = if u >= v { u - v } else { u + p - v };
                }
            }
            half <<= 1;
        }
        if inverse {
            let ns = shoup(self.n_inv, p);
            for x in a.iter_mut() {
                *x = mul_shoup(*x, self.n_inv, ns, p);
            }
        }
    }
}

/// Arithmetic on power series truncated at `q^len` modulo one prime.
pub struct SeriesRing {
    pub prime: NttPrime,
    pub len: usize,
    plan: NttPlan,
}

impl SeriesRing {
    pub fn new(prime: NttPrime, len: usize) -> Self {
        let n = (2 * len).next_power_of_two();
        SeriesRing { prime, len, plan: NttPlan::new(prime, n) }
    }

    pub fn p(&self) -> u64 {
        self.prime.p
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.plan.n;
        let p = self.prime.p;
        let mut fa = vec![0u64; n];
        fa[..a.len().min(self.len)].copy_from_slice(&a[..a.len().min(self.len)]);
        self.plan.transform(&mut fa, false);
        if std::ptr::eq(a, b) {
            for x in fa.iter_mut() {
                *x = *x * *x % p;
            }
        } else {
            let mut fb = vec![0u64; n];
            fb[..b.len().min(self.len)].copy_from_slice(&b[..b.len().min(self.len)]);
            self.plan.transform(&mut fb, false);
            for (x, y) in fa.iter_mut().zip(&fb) {
                *x = *x * *y % p;
            }
        }
        self.plan.transform(&mut fa, true);
        fa.truncate(self.len);
        fa
    }

    pub fn pow(&self, a: &[u64], mut e: u32) -> Vec<u64> {
        let mut result = vec![0u64; self.len];
        result[0] = 1;
        let mut base = a.to_vec();
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { self.mul(&result, &base) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    pub fn from_signed(&self, xs: &[i64]) -> Vec<u64> {
        let p = self.prime.p as i64;
        let mut v: Vec<u64> = xs.iter().take(self.len).map(|&x| x.rem_euclid(p) as u64).collect();
        v.resize(self.len, 0);
        v
    }

    /// Eisenstein series `1 + c Σ σ_{k−1}(n) q^n` reduced mod p.
    pub fn eisenstein(&self, k: u32, c: i64) -> Vec<u64> {
        let p = self.prime.p;
        let len = self.len;
        let mut sig = vec![0u64; len];
        for d in 1..len {
            let dk = pow_mod(d as u64, (k - 1) as u64, p);
            let mut m = d;
            while m < len {
                sig[m] += dk;
                if sig[m] >= p {
                    sig[m] -= p;
                }
                m += d;
            }
        }
        let cm = c.rem_euclid(p as i64) as u64;
        let mut e: Vec<u64> = sig.iter().map(|&s| s * cm % p).collect();
        e[0] = 1;
        e
    }

    /// `Δ = q ∏ (1 − q^n)^24` mod p, via Jacobi's `∏(1 − q^n)^3`.
    pub fn delta(&self) -> Vec<u64> {
        let len = self.len;
        let mut j3 = vec![0i64; len];
        let mut k = 0usize;
        while k * (k + 1) / 2 < len {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            j3[k * (k + 1) / 2] = sign * (2 * k as i64 + 1);
            k += 1;
        }
        let j3 = self.from_signed(&j3);
        let j6 = self.mul(&j3, &j3);
        let j12 = self.mul(&j6, &j6);
        let j24 = self.mul(&j12, &j12);
        let mut d = vec![0u64; len];
        d[1..len].copy_from_slice(&j24[..len - 1]);
        d
    }
}

/// Garner reconstruction of integers from residues, in symmetric range.
pub struct Crt {
    primes: Vec<u64>,
    inv: Vec<Vec<u64>>,
    prefix: Vec<BigInt>,
}

impl Crt {
    pub fn new(primes: &[u64]) -> Self {
        let k = primes.len();
        let mut inv = vec![vec![0u64; k]; k];
        for i in 0..k {
            for j in 0..i {
                inv[i][j] = pow_mod(primes[j] % primes[i], primes[i] - 2, primes[i]);
            }
        }
        let mut prefix = Vec::with_capacity(k + 1);
        let mut acc = BigInt::one();
        prefix.push(acc.clone());
        for &p in primes {
            acc *= p;
            prefix.push(acc.clone());
        }
        Crt { primes: primes.to_vec(), inv, prefix }
    }

    pub fn modulus_bits(&self) -> u64 {
        self.prefix.last().unwrap().bits()
    }

    /// Reconstructs from the first `use_k` residues.
    pub fn reconstruct(&self, residues: &[u64], use_k: usize) -> BigInt {
        let k = use_k;
        let mut digits = vec![0u64; k];
        for i in 0..k {
            let p = self.primes[i];
            let mut x = residues[i] % p;
            for j in 0..i {
                let d = digits[j] % p;
                x = (x + p - d) % p * self.inv[i][j] % p;
            }
            digits[i] = x;
        }
        let mut acc = BigInt::zero();
        for i in (0..k).rev() {
            acc = acc * self.primes[i] + digits[i];
        }
        let m = &self.prefix[k];
        if &acc * 2u32 > *m {
            acc - m
        } else {
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ntt_product_matches_naive() {
        let primes = ntt_primes(2, 20);
        let ring = SeriesRing::new(primes[0], 50);
        let a: Vec<u64> = (0..50).map(|i| (i * i + 3) as u64).collect();
        let b: Vec<u64> = (0..50).map(|i| (7 * i + 1) as u64).collect();
        let c = ring.mul(&a, &b);
        for n in 0..50 {
            let want: u64 = (0..=n).map(|i| a[i] * b[n - i]).sum::<u64>() % ring.p();
            assert_eq!(c[n], want);
        }
    }

    #[test]
    fn delta_first_coefficients() {
        let primes = ntt_primes(3, 20);
        let tau = [0i64, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643];
        let rings: Vec<SeriesRing> = primes.iter().map(|&p| SeriesRing::new(p, 10)).collect();
        let ds: Vec<Vec<u64>> = rings.iter().map(|r| r.delta()).collect();
        let crt = Crt::new(&primes.iter().map(|p| p.p).collect::<Vec<_>>());
        for n in 0..10 {
            let res: Vec<u64> = ds.iter().map(|d| d[n]).collect();
            assert_eq!(crt.reconstruct(&res, 3), BigInt::from(tau[n]));
        }
    }

    #[test]
    fn crt_roundtrip_signed() {
        let primes: Vec<u64> = ntt_primes(4, 20).iter().map(|p| p.p).collect();
        let crt = Crt::new(&primes);
        let x: BigInt = BigInt::from(-123456789012345678i64) * 1000003i64;
        let res: Vec<u64> = primes
            .iter()
            .map(|&p| {
                let r = &x % BigInt::from(p);
                let r = if r < BigInt::zero() { r + p } else { r };
                r.try_into().unwrap()
            })
            .collect();
        assert_eq!(crt.reconstruct(&res, 4), x);
    }
}
