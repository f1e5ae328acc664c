//! On-disk caches under `MOMENTLAB_CACHE_DIR`.
//!
//! Eigenvalue tables: magic `MLEV`, version, weight, n_max, field_degree,
//! form count, then per form its Petersson weight, Hecke residual and
//! `n_max + 1` little-endian `f64` values. q-expansions: magic `MLQX`,
//! version, weight, length, then one record per coefficient made of a sign
//! byte, a `u32` byte count and the little-endian magnitude.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use num_bigint::{BigInt, Sign};

use super::{Newform, QExpansion};
use crate::error::{Error, Result};

const EIGEN_MAGIC: &[u8; 4] = b"MLEV";
const QEXP_MAGIC: &[u8; 4] = b"MLQX";
const VERSION: u32 = 1;

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("MOMENTLAB_CACHE_DIR").map(PathBuf::from)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Cache("truncated cache file".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn encode_eigenforms(forms: &[Newform]) -> Vec<u8> {
    let mut out = Vec::new();
    let first = &forms[0];
    out.extend_from_slice(EIGEN_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&first.weight.to_le_bytes());
    out.extend_from_slice(&(first.n_max() as u64).to_le_bytes());
    out.extend_from_slice(&(first.field_degree as u32).to_le_bytes());
    out.extend_from_slice(&(forms.len() as u32).to_le_bytes());
    for f in forms {
        out.extend_from_slice(&f.petersson_weight.to_le_bytes());
        out.extend_from_slice(&f.hecke_residual.to_le_bytes());
        for x in &f.lambda {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

pub fn decode_eigenforms(buf: &[u8]) -> Result<Vec<Newform>> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != EIGEN_MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    if r.u32()? != VERSION {
        return Err(Error::Cache("unsupported version".into()));
    }
    let weight = r.u32()?;
    let n_max = r.u64()? as usize;
    let field_degree = r.u32()? as usize;
    let count = r.u32()? as usize;
    let mut forms = Vec::with_capacity(count);
    for index in 0..count {
        let petersson_weight = r.f64()?;
        let hecke_residual = r.f64()?;
        let lambda = (0..=n_max).map(|_| r.f64()).collect::<Result<Vec<f64>>>()?;
        forms.push(Newform { weight, index, lambda, petersson_weight, field_degree, hecke_residual });
    }
    Ok(forms)
}

pub fn encode_qexpansion(q: &QExpansion) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(QEXP_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&q.weight().to_le_bytes());
    out.extend_from_slice(&(q.coeffs().len() as u64).to_le_bytes());
    for c in q.coeffs() {
        let (sign, mag) = c.to_bytes_le();
        out.push(match sign {
            Sign::Minus => 1,
            _ => 0,
        });
        out.extend_from_slice(&(mag.len() as u32).to_le_bytes());
        out.extend_from_slice(&mag);
    }
    out
}

pub fn decode_qexpansion(buf: &[u8]) -> Result<QExpansion> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != QEXP_MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    if r.u32()? != VERSION {
        return Err(Error::Cache("unsupported version".into()));
    }
    let weight = r.u32()?;
    let len = r.u64()? as usize;
    let mut coeffs = Vec::with_capacity(len);
    for _ in 0..len {
        let sign = if r.take(1)?[0] == 1 { Sign::Minus } else { Sign::Plus };
        let n = r.u32()? as usize;
        coeffs.push(BigInt::from_bytes_le(sign, r.take(n)?));
    }
    Ok(QExpansion::new(weight, coeffs))
}

fn eigen_path(k: u32) -> Option<PathBuf> {
    cache_dir().map(|d| d.join(format!("eigen_k{k}.bin")))
}

fn write_atomic(path: &PathBuf, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::File::create(&tmp)?.write_all(bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Cached forms of weight `k` truncated to `n_max`, if a large enough table exists.
pub fn load_eigenforms(k: u32, n_max: usize) -> Result<Option<Vec<Newform>>> {
    let Some(path) = eigen_path(k) else { return Ok(None) };
    let mut buf = Vec::new();
    match fs::File::open(&path) {
        Ok(mut f) => f.read_to_end(&mut buf)?,
        Err(_) => return Ok(None),
    };
    let mut forms = decode_eigenforms(&buf)?;
    if forms.first().is_none_or(|f| f.n_max() < n_max) {
        return Ok(None);
    }
    for f in &mut forms {
        f.lambda.truncate(n_max + 1);
    }
    Ok(Some(forms))
}

pub fn store_eigenforms(k: u32, forms: &[Newform]) -> Result<()> {
    let Some(path) = eigen_path(k) else { return Ok(()) };
    if forms.is_empty() {
        return Ok(());
    }
    write_atomic(&path, &encode_eigenforms(forms))
}

pub fn store_qexpansions(k: u32, basis: &[QExpansion]) -> Result<()> {
    let Some(dir) = cache_dir() else { return Ok(()) };
    for (j, q) in basis.iter().enumerate() {
        write_atomic(&dir.join(format!("qexp_k{k}_{j}.bin")), &encode_qexpansion(q))?;
    }
    Ok(())
}
