//! Dispatch from a validated configuration to the library.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use momentlab::arith::{gcd, kloosterman, mod_inverse, weil_bound};
use momentlab::gl3::SymSquareForm;
use momentlab::identities::{
    bilinear_form, petersson_auto, petersson_grid, voronoi_grid_point, BilinearLemma, BilinearRegime, ProductWeight,
    VoronoiKernel,
};
use momentlab::lfunctions::{
    archimedean_root_number, central_value_gl2_with, central_value_rs_with, naive_root_number, AfeKernel, DEFAULT_A,
};
use momentlab::modforms::{dim_cusp_forms, eigenforms};
use momentlab::moments::{weight_moment_with, Amplifier};
use momentlab::numeric::fit_slope;
use momentlab::special::{averaged_bessel, BesselAverage, TestFunction};
use momentlab::{Error, Result};

use crate::config::RunConfig;
use crate::output::Row;

pub struct Outcome {
    pub rows: Vec<Row>,
    /// replaces the generic CSV table
    pub table: Option<String>,
}

impl From<Vec<Row>> for Outcome {
    fn from(rows: Vec<Row>) -> Self {
        Outcome { rows, table: None }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command.name {
        "kloosterman" => kloosterman_cmd(cfg).map(Into::into),
        "petersson" => petersson_cmd(cfg).map(Into::into),
        "voronoi" => voronoi_cmd(cfg).map(Into::into),
        "bessel-avg" => bessel_cmd(cfg).map(Into::into),
        "bilinear" => bilinear_cmd(cfg).map(Into::into),
        "lvalue" => lvalue_cmd(cfg).map(Into::into),
        "moment" => moment_cmd(cfg),
        "amplifier" => amplifier_cmd(cfg).map(Into::into),
        other => Err(Error::Config(format!("unknown command {other}"))),
    }
}

fn sym_square(kappa: u64, n: usize) -> Result<SymSquareForm> {
    let forms = eigenforms(kappa as u32, n)?;
    let g = forms.first().ok_or_else(|| Error::Precondition(format!("no cusp forms of weight {kappa}")))?;
    SymSquareForm::new(g, n)
}

fn kloosterman_cmd(cfg: &RunConfig) -> Result<Vec<Row>> {
    let mode = cfg.str("mode").unwrap_or("single");
    let c_max = cfg.u64("c_max").unwrap_or(10_000);
    let count = cfg.u64("count").unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.u64("seed").unwrap_or(1));
    let weil_row = |m: i64, n: i64, c: u64| {
        let s = kloosterman(m, n, c);
        let bound = weil_bound(m, n, c);
        let sym = kloosterman(n, m, c).value();
        let tol = 1e-9 * c as f64;
        let pass = s.value().abs() <= bound + tol && (s.value() - sym).abs() <= tol;
        let data = json!({ "m": m, "n": n, "c": c, "value": s.value(), "imag_residual": s.certified_imag_residual,
                           "weil_bound": bound, "symmetric_value": sym, "tolerance": tol });
        Row::check(format!("S({m},{n};{c})"), data, pass)
    };
    match mode {
        "single" => {
            let c = cfg.u64("c").unwrap_or(1);
            if c == 0 {
                return Err(Error::Config("c must be positive".into()));
            }
            Ok(vec![weil_row(cfg.i64("m").unwrap_or(1), cfg.i64("n").unwrap_or(1), c)])
        }
        "batch" => {
            if count > 0 && c_max == 0 {
                return Err(Error::Config("c_max must be positive".into()));
            }
            let tuples: Vec<(i64, i64, u64)> = (0..count)
                .map(|_| (rng.gen_range(-50_000..=50_000), rng.gen_range(-50_000..=50_000), rng.gen_range(1..=c_max)))
                .collect();
            Ok(tuples.into_par_iter().map(|(m, n, c)| weil_row(m, n, c)).collect())
        }
        _ => {
            let side = ((c_max as f64).sqrt().floor() as u64).max(1);
            let mut tuples = Vec::new();
            while (tuples.len() as u64) < count {
                let (c1, c2) = (rng.gen_range(1..=side), rng.gen_range(1..=side));
                if gcd(c1, c2) == 1 {
                    tuples.push((rng.gen_range(-50_000..=50_000i64), rng.gen_range(-50_000..=50_000i64), c1, c2));
                }
            }
            tuples
                .into_par_iter()
                .map(|(m, n, c1, c2)| {
                    let i2 = mod_inverse(c2 as i64, c1)?.value() as i64;
                    let i1 = mod_inverse(c1 as i64, c2)?.value() as i64;
                    let whole = kloosterman(m, n, c1 * c2).value();
                    let split = kloosterman(m * i2, n * i2, c1).value() * kloosterman(m * i1, n * i1, c2).value();
                    let tol = 1e-9 * (c1 * c2) as f64;
                    let data = json!({ "m": m, "n": n, "c1": c1, "c2": c2, "whole": whole, "split": split, "tolerance": tol });
                    Ok(Row::check(format!("S({m},{n};{c1}·{c2})"), data, (whole - split).abs() <= tol))
                })
                .collect()
        }
    }
}

fn check_weight(k: u64) -> Result<u32> {
    if k < 2 || k % 2 == 1 || k > 400 {
        Err(Error::Config(format!("weight {k} must be even and in [2, 400]")))
    } else {
        Ok(k as u32)
    }
}

fn weights(cfg: &RunConfig, key: &str) -> Result<Vec<u32>> {
    cfg.u64_list(key).into_iter().map(check_weight).collect()
}

fn petersson_cmd(cfg: &RunConfig) -> Result<Vec<Row>> {
    let ks = weights(cfg, "k")?;
    let tol = cfg.f64("tol").unwrap_or(1e-8);
    let reports = match (cfg.u64("m"), cfg.u64("n")) {
        (Some(m), Some(n)) => ks.iter().map(|&k| petersson_auto(k, m, n)).collect::<Result<Vec<_>>>()?,
        (None, None) => petersson_grid(&ks, cfg.u64("m_max").unwrap_or(0))?,
        _ => return Err(Error::Config("give both m and n, or neither".into())),
    };
    Ok(reports
        .into_iter()
        .map(|r| {
            let p = &r.parameters;
            let label = format!("k={} m={} n={}", p["k"], p["m"], p["n"]);
            let pass = r.pass(tol);
            let mut data = serde_json::to_value(&r).expect("serializable");
            data["tolerance"] = json!(tol);
            Row::check(label, data, pass)
        })
        .collect())
}

fn voronoi_cmd(cfg: &RunConfig) -> Result<Vec<Row>> {
    let xs = cfg.f64_list("x");
    let (m_max, c_max) = (cfg.u64("m_max").unwrap_or(0), cfg.u64("c_max").unwrap_or(0));
    if xs.is_empty() || m_max == 0 || c_max == 0 {
        return Ok(Vec::new());
    }
    let (tol, btol) = (cfg.f64("tol").unwrap_or(1e-5), cfg.f64("branch_tol").unwrap_or(1e-8));
    let kappa = cfg.u64("kappa").unwrap_or(12);
    let n = cfg.u64("coeffs").unwrap_or(200_000) as usize;
    let f = sym_square(kappa, n)?;
    let w = TestFunction::canonical();
    let kernel = VoronoiKernel::standard(&w, kappa as u32)?;
    let mut rows = Vec::new();
    for &x in &xs {
        for m in 1..=m_max {
            for c in 1..=c_max {
                for r in voronoi_grid_point(&kernel, &f, m, c, x)? {
                    let p = &r.report.parameters;
                    let label = format!("X={x} m={m} c={c} a={}", p["a"]);
                    let pass = r.report.rel_gap < tol && r.branch_gap < btol;
                    let mut data = serde_json::to_value(&r.report).expect("serializable");
                    data["branch_gap"] = json!(r.branch_gap);
                    data["tolerance"] = json!(tol);
                    data["branch_tolerance"] = json!(btol);
                    rows.push(Row::check(label, data, pass));
                }
            }
        }
    }
    Ok(rows)
}

fn bessel_cmd(cfg: &RunConfig) -> Result<Vec<Row>> {
    let mode = match cfg.str("mode").unwrap_or("even") {
        "even" => BesselAverage::Even,
        "mod4-0" => BesselAverage::Mod4(0),
        _ => BesselAverage::Mod4(2),
    };
    let h = TestFunction::canonical();
    let ks = cfg.f64_list("K");
    let tol = cfg.f64("tol");
    let mut rows = Vec::new();
    for ratio in cfg.f64_list("ratio") {
        let mut residuals = Vec::new();
        for &k in &ks {
            let x = ratio * k * k;
            let r = averaged_bessel(&h, k, x, mode)?;
            residuals.push(r.residual.abs());
            let data = json!({ "K": k, "x": x, "ratio": ratio, "mode": mode, "lhs": r.lhs, "main_term": r.main_term,
                               "residual": r.residual, "tolerance": tol });
            let label = format!("K={k} x={x}");
            rows.push(match tol {
                Some(t) => Row::check(label, data, r.residual.abs() <= t),
                None => Row::info(label, data),
            });
        }
        if ks.len() >= 2 && residuals.iter().all(|&r| r > 0.0) {
            let beta = -fit_slope(&ks.iter().map(|k| k.ln()).collect::<Vec<_>>(), &residuals.iter().map(|r| r.ln()).collect::<Vec<_>>());
            rows.push(Row::info(format!("fit ratio={ratio}"), json!({ "ratio": ratio, "mode": mode, "decay_exponent": beta })));
        }
    }
    Ok(rows)
}

fn bilinear_cmd(cfg: &RunConfig) -> Result<Vec<Row>> {
    let (xs, ys, qs) = (cfg.f64_list("x"), cfg.f64_list("y"), cfg.u64_list("q"));
    if xs.is_empty() || ys.is_empty() || qs.is_empty() {
        return Ok(Vec::new());
    }
    if qs.contains(&0) || xs.iter().chain(&ys).any(|&v| v <= 0.0) {
        return Err(Error::Config("X, Y and q must be positive".into()));
    }
    let lemma = if cfg.str("lemma") == Some("coprime") { BilinearLemma::Coprime } else { BilinearLemma::General };
    let w = ProductWeight::canonical();
    let top = ys.iter().fold(0.0f64, |a, &b| a.max(b));
    let f = sym_square(cfg.u64("kappa").unwrap_or(12), (w.second.support().1 * top).ceil() as usize + 1)?;
    let h = cfg.i64("h").unwrap_or(1);
    let (z, z1, z2) = (cfg.f64("z").unwrap_or(1.0), cfg.f64("z1").unwrap_or(1.0), cfg.f64("z2").unwrap_or(1.0));
    let slack = cfg.f64("slack");
    let mut rows = Vec::new();
    for &x in &xs {
        for &y in &ys {
            for &q in &qs {
                let regime = BilinearRegime { x, y, q, h, z, z1, z2 };
                let r = bilinear_form(&f, regime, &w, lemma)?;
                let label = format!("X={x} Y={y} q={q} h={h}");
                let mut data = serde_json::to_value(&r).expect("serializable");
                data["slack"] = json!(slack);
                rows.push(match slack {
                    Some(s) => Row::check(label, data, r.ratio <= s),
                    None => Row::info(label, data),
                });
            }
        }
    }
    Ok(rows)
}

fn lvalue_cmd(cfg: &RunConfig) -> Result<Vec<Row>> {
    let k = check_weight(cfg.u64("k").unwrap_or(2))?;
    if dim_cusp_forms(k) == 0 {
        return Ok(Vec::new());
    }
    let kappa = cfg.u64("kappa").unwrap_or(12);
    let rs_kernel = AfeKernel::rankin_selberg(&sym_square(kappa, 5000)?, k, DEFAULT_A, 3.0)?;
    let gl2_kernel = AfeKernel::gl2(k, DEFAULT_A, 3.0)?;
    let (rs_cut, gl2_cut) = (rs_kernel.cut(1e-13), gl2_kernel.cut(1e-14));
    let n = rs_cut.max(gl2_cut).floor() as usize + 1;
    let f_gl3 = sym_square(kappa, n.max(5000))?;
    let rs_kernel = AfeKernel::rankin_selberg(&f_gl3, k, DEFAULT_A, 3.0)?;
    let forms = eigenforms(k, n)?;
    let eps_rs = archimedean_root_number(k, kappa as u32).re;
    let eps_gl2 = naive_root_number(k).re;
    let mut rows = Vec::new();
    for f in forms.iter().filter(|f| cfg.u64("index").is_none_or(|i| i as usize == f.index)) {
        let rs = central_value_rs_with(&rs_kernel, &f_gl3, f, Some(rs_cut))?;
        let gl2 = central_value_gl2_with(&gl2_kernel, f, Some(gl2_cut))?;
        let data = json!({ "k": k, "kappa": kappa, "index": f.index, "L_rs": rs.value, "L_gl2": gl2.value,
                           "root_number_rs": eps_rs, "root_number_gl2": eps_gl2, "rs_cut": rs.cut, "gl2_cut": gl2.cut,
                           "omega": f.petersson_weight, "positivity_tolerance": 1e-6 });
        rows.push(Row::check(format!("k={k} f={}", f.index), data, rs.value >= -1e-6));
    }
    Ok(rows)
}

fn moment_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let include_gl2 = cfg.str("theorem") == Some("1.3");
    let ell = cfg.u64("ell").unwrap_or(1);
    let y_exp = cfg.f64("y_exponent").unwrap_or(2.75);
    let slack = cfg.f64("slack");
    let ks = cfg.f64_list("K");
    if ks.iter().any(|&k| !(10.0..=60.0).contains(&k)) {
        return Err(Error::Config("K must lie in [10, 60]".into()));
    }
    let w = TestFunction::canonical();
    let top = ks.iter().fold(0.0f64, |a, &b| a.max(b));
    let f = if ks.is_empty() {
        None
    } else {
        let k_hi = (w.support().1 * top + 2.0) as u32;
        let need = AfeKernel::rankin_selberg(&sym_square(cfg.u64("kappa").unwrap_or(12), 5000)?, k_hi, DEFAULT_A, 3.0)?.cut(1e-13);
        Some(sym_square(cfg.u64("kappa").unwrap_or(12), (need as usize + 1).max(5000))?)
    };
    let mut rows = Vec::new();
    let mut table = String::new();
    for &k in &ks {
        let r = weight_moment_with(f.as_ref().expect("table"), k, &w, ell, include_gl2, k.powf(y_exp))?;
        let csv = r.csv();
        table += if table.is_empty() { &csv } else { csv.split_once('\n').map_or("", |s| s.1) };
        let data: Value = serde_json::to_value(&r).expect("serializable");
        let label = format!("K={k}");
        rows.push(match (slack, r.gap) {
            (Some(s), Some(g)) => {
                let mut d = data;
                d["slack_bound"] = json!(s * k.powf(-0.25));
                Row::check(label, d, g.abs() <= s * k.powf(-0.25))
            }
            _ => Row::info(label, data),
        });
    }
    Ok(Outcome { rows, table: Some(table) })
}

fn amplifier_cmd(cfg: &RunConfig) -> Result<Vec<Row>> {
    let k = check_weight(cfg.u64("k").unwrap_or(2))?;
    let tol = cfg.f64("tol").unwrap_or(1e-10);
    let ls = cfg.u64_list("L");
    if ls.is_empty() || dim_cusp_forms(k) == 0 {
        return Ok(Vec::new());
    }
    let n = (2 * ls.iter().max().copied().unwrap_or(2) as usize).max(10);
    let forms = eigenforms(k, n)?;
    let f0 = forms
        .get(cfg.u64("f0").unwrap_or(0) as usize)
        .ok_or_else(|| Error::Config(format!("f0 index out of range (dimension {})", forms.len())))?;
    let mut rows = Vec::new();
    for &l in &ls {
        let amp = Amplifier::new(f0, l)?;
        for f in forms.iter() {
            let direct = amp.eval(f)?;
            let exp = amp.expansion(f)?;
            let gap = (direct - exp.total()).abs();
            let is_self = f.index == f0.index;
            let self_ok = !is_self || direct >= amp.self_lower_bound();
            let data = json!({ "k": k, "L": l, "f0": f0.index, "f": f.index, "primes": amp.primes, "direct": direct,
                               "expansion": exp, "gap": gap, "tolerance": tol, "self_lower_bound": amp.self_lower_bound() });
            rows.push(Row::check(format!("L={l} f={}", f.index), data, gap <= tol && direct >= 0.0 && self_ok));
        }
    }
    Ok(rows)
}
