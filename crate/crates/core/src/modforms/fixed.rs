//! Binary fixed-point arithmetic on `BigInt` for the Hecke eigen-problem.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// `x · 2^{-shift}` as an `f64`, keeping 60 significant bits of `x`.
pub fn big_to_f64_scaled(x: &BigInt, shift: i64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits() as i64;
    let (top, e) = if bits > 60 {
        ((x >> (bits - 60) as usize).to_f64().unwrap(), bits - 60 - shift)
    } else {
        (x.to_f64().unwrap(), -shift)
    };
    let e = e.clamp(-4000, 4000) as i32;
    top * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
}

/// `ln |x · 2^{-bits}|`, or `-inf` at zero.
pub fn ln_abs_fixed(x: &BigInt, bits: u32) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let b = x.bits() as i64;
    let top = if b > 60 { (x.abs() >> (b - 60) as usize).to_f64().unwrap() } else { x.abs().to_f64().unwrap() };
    let e = if b > 60 { b - 60 } else { 0 };
    top.ln() + (e - bits as i64) as f64 * std::f64::consts::LN_2
}

/// `x · 2^{-bits} / p^{half}` with `p^{half}` applied in log space.
pub fn scaled_ratio(x: &BigInt, bits: u32, p: f64, half: f64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let b = x.bits() as i64;
    let (top, e) = if b > 60 { ((x >> (b - 60) as usize).to_f64().unwrap(), b - 60) } else { (x.to_f64().unwrap(), 0) };
    let log2 = (e - bits as i64) as f64 - half * p.log2();
    let whole = log2.floor();
    top * (log2 - whole).exp2() * 2f64.powi(whole as i32)
}

#[derive(Clone, Copy, Debug)]
pub struct Fixed {
    pub bits: u32,
}

impl Fixed {
    pub fn new(bits: u32) -> Self {
        Fixed { bits }
    }

    pub fn from_int(&self, x: &BigInt) -> BigInt {
        x << self.bits as usize
    }

    pub fn from_f64(&self, x: f64) -> BigInt {
        use num_traits::float::FloatCore;
        let (m, e, s) = FloatCore::integer_decode(x);
        let m = BigInt::from(m) * BigInt::from(s);
        let sh = e as i64 + self.bits as i64;
        if sh >= 0 {
            m << sh as usize
        } else {
            m >> (-sh) as usize
        }
    }

    pub fn to_f64(&self, x: &BigInt) -> f64 {
        big_to_f64_scaled(x, self.bits as i64)
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits as usize
    }

    pub fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits as usize) / b
    }

    /// Horner evaluation of an integer polynomial (low to high) at `x`.
    pub fn poly_eval(&self, c: &[BigInt], x: &BigInt) -> BigInt {
        c.iter().rev().fold(BigInt::zero(), |acc, ci| self.mul(&acc, x) + self.from_int(ci))
    }

    fn poly_eval_deriv(&self, c: &[BigInt], x: &BigInt) -> (BigInt, BigInt) {
        let mut p = BigInt::zero();
        let mut dp = BigInt::zero();
        for ci in c.iter().rev() {
            dp = self.mul(&dp, x) + &p;
            p = self.mul(&p, x) + self.from_int(ci);
        }
        (p, dp)
    }

    /// Newton refinement of a simple root from a double-precision seed.
    pub fn newton_root(&self, c: &[BigInt], x0: f64) -> BigInt {
        let mut x = self.from_f64(x0);
        for _ in 0..200 {
            let (p, dp) = self.poly_eval_deriv(c, &x);
            if dp.is_zero() {
                break;
            }
            let step = self.div(&p, &dp);
            x -= &step;
            if step.abs() <= BigInt::from(1) {
                break;
            }
        }
        x
    }

    /// Solves `(T − λI) v = 0` with `v_1 = 1` by pivoted elimination.
    pub fn null_vector(&self, t: &[Vec<BigInt>], lambda: &BigInt) -> Vec<BigInt> {
        let d = t.len();
        let one = self.from_int(&BigInt::from(1));
        if d == 1 {
            return vec![one];
        }
        // augmented rows: coefficients of v_2..v_d, then right-hand side
        let mut rows: Vec<Vec<BigInt>> = (0..d)
            .map(|i| {
                let mut r: Vec<BigInt> = (1..d)
                    .map(|j| {
                        let mut v = self.from_int(&t[i][j]);
                        if i == j {
                            v -= lambda;
                        }
                        v
                    })
                    .collect();
                let mut a0 = self.from_int(&t[i][0]);
                if i == 0 {
                    a0 -= lambda;
                }
                r.push(-a0);
                r
            })
            .collect();
        let n = d - 1;
        for col in 0..n {
            let piv = (col..d).max_by_key(|&r| rows[r][col].abs()).unwrap();
            rows.swap(col, piv);
            for r in col + 1..d {
                if rows[r][col].is_zero() {
                    continue;
                }
                let f = self.div(&rows[r][col], &rows[col][col]);
                for c in col..=n {
                    let delta = self.mul(&f, &rows[col][c]);
                    rows[r][c] -= delta;
                }
            }
        }
        let mut v = vec![BigInt::zero(); n];
        for i in (0..n).rev() {
            let mut acc = rows[i][n].clone();
            for j in i + 1..n {
                acc -= self.mul(&rows[i][j], &v[j]);
            }
            v[i] = self.div(&acc, &rows[i][i]);
        }
        let mut out = vec![one];
        out.extend(v);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two_by_newton() {
        let f = Fixed::new(300);
        let c = vec![BigInt::from(-2), BigInt::zero(), BigInt::from(1)];
        let r = f.newton_root(&c, 1.4);
        assert!((f.to_f64(&r) - 2f64.sqrt()).abs() < 1e-16);
        let sq = f.mul(&r, &r) - f.from_int(&BigInt::from(2));
        assert!(ln_abs_fixed(&sq, 300) < -200.0);
    }

    #[test]
    fn scaling_helpers() {
        let x = BigInt::from(3) << 500usize;
        assert!((big_to_f64_scaled(&x, 500) - 3.0).abs() < 1e-15);
        assert!((scaled_ratio(&x, 500, 4.0, 0.5) - 1.5).abs() < 1e-15);
        assert!((ln_abs_fixed(&x, 500) - 3f64.ln()).abs() < 1e-13);
    }
}
