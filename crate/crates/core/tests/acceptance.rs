//! End-to-end acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are evaluated and reported but do not
//! fail the run; every other criterion must pass.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use momentlab::arith::{gcd, kloosterman, mod_inverse, reciprocity_identity, weil_bound};
use momentlab::gl3::{l_one, SymSquareForm};
use momentlab::identities::{petersson_grid, voronoi_grid_point, VoronoiKernel};
use momentlab::modforms::eigenforms;
use momentlab::moments::{weight_moment, Amplifier, MomentReport};
use momentlab::numeric::fit_slope;
use momentlab::special::{averaged_bessel, omega_pm, omega_pm_stationary, BesselAverage, Sign, TestFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: [u32; 4] = [6, 7, 8, 9];
const VORONOI_COEFFS: usize = 200_000;

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: u32, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t = Instant::now();
    let (pass, detail) = f();
    let o = Outcome { id, pass, detail, elapsed: t.elapsed() };
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!("criterion {:>2}: {tag} ({:.1}s) {}", o.id, o.elapsed.as_secs_f64(), o.detail);
    o
}

fn petersson() -> (bool, String) {
    let t = Instant::now();
    let rows = petersson_grid(&[12, 16, 18, 20, 22, 26], 50).expect("petersson grid");
    let fails = rows.iter().filter(|r| !r.pass(1e-8)).count();
    let worst = rows.iter().map(|r| r.rel_gap).fold(0.0, f64::max);
    let fast = t.elapsed() < Duration::from_secs(120);
    (fails == 0 && fast, format!("{} tuples, {fails} failures, worst raw rel_gap {worst:.2e}", rows.len()))
}

fn kloosterman_properties() -> (bool, String) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    for _ in 0..10_000 {
        let c = rng.gen_range(1..=10_000u64);
        let m = rng.gen_range(-50_000..=50_000i64);
        let n = rng.gen_range(-50_000..=50_000i64);
        let s = kloosterman(m, n, c).value();
        let tol = 1e-9 * c as f64;
        if s.abs() > weil_bound(m, n, c) + tol {
            violations += 1;
        }
        if (s - kloosterman(n, m, c).value()).abs() > tol {
            violations += 1;
        }
        let c1 = rng.gen_range(1..=100u64);
        let c2 = rng.gen_range(1..=100u64);
        if gcd(c1, c2) != 1 {
            continue;
        }
        let i2 = mod_inverse(c2 as i64, c1).unwrap().value() as i64;
        let i1 = mod_inverse(c1 as i64, c2).unwrap().value() as i64;
        let split = kloosterman(m * i2, n * i2, c1).value() * kloosterman(m * i1, n * i1, c2).value();
        if (kloosterman(m, n, c1 * c2).value() - split).abs() > 1e-9 * (c1 * c2) as f64 {
            violations += 1;
        }
    }
    let fast = t.elapsed() < Duration::from_secs(60);
    (violations == 0 && fast, format!("10000 tuples, {violations} violations"))
}

fn reciprocity() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checked, mut violations) = (0, 0);
    while checked < 10_000 {
        let m = rng.gen_range(-1000..=1000i64);
        let r = rng.gen_range(1..=100i64);
        let c = rng.gen_range(1..=1000i64);
        let big_m = rng.gen_range(1..=50i64);
        let l = rng.gen_range(1..=200i64);
        let q = rng.gen_range(1..=50i64);
        if gcd((c * big_m) as u64, (l * q * q) as u64) != 1 {
            continue;
        }
        checked += 1;
        if !reciprocity_identity(m, r, c, big_m, l, q).unwrap().holds() {
            violations += 1;
        }
    }
    (violations == 0, format!("{checked} tuples, {violations} violations"))
}

fn voronoi() -> (bool, String) {
    let t = Instant::now();
    let g = &eigenforms(12, VORONOI_COEFFS).expect("eigenforms")[0];
    let f = SymSquareForm::new(g, VORONOI_COEFFS).expect("sym²");
    let w = TestFunction::canonical();
    let kernel = VoronoiKernel::standard(&w, 12).expect("kernel");
    let (mut worst, mut worst_branch, mut rows) = (0.0f64, 0.0f64, 0);
    for x in [50.0, 200.0] {
        for m in 1..=3u64 {
            for c in 1..=10u64 {
                for row in voronoi_grid_point(&kernel, &f, m, c, x).expect("voronoi") {
                    worst = worst.max(row.report.rel_gap);
                    worst_branch = worst_branch.max(row.branch_gap);
                    rows += 1;
                }
            }
        }
    }
    let fast = t.elapsed() < Duration::from_secs(600);
    let pass = worst < 1e-5 && worst_branch < 1e-8 && fast;
    (pass, format!("{rows} residues, worst rel_gap {worst:.2e}, worst branch gap {worst_branch:.2e}"))
}

fn omega_dual() -> (bool, String) {
    let w = TestFunction::canonical();
    let mut worst = 0.0f64;
    let mut fails = 0;
    for sign in [Sign::Plus, Sign::Minus] {
        for i in 0..12 {
            let x = 10f64.powf(3.0 + 3.0 * i as f64 / 11.0);
            let (vc, ec) = omega_pm(x, &w, 12, sign).expect("contour");
            let (vs, es) = omega_pm_stationary(x, &w, 12, sign, 6).expect("stationary");
            let ratio = (vc - vs).norm() / (ec + es);
            worst = worst.max(ratio);
            if ratio > 1.0 {
                fails += 1;
            }
        }
    }
    (fails == 0, format!("24 points, {fails} outside combined error, worst gap/error {worst:.2}"))
}

fn bessel_decay() -> (bool, String) {
    let h = TestFunction::canonical();
    let ks = [50.0, 100.0, 200.0];
    let mut parts = Vec::new();
    let mut ok = true;
    for (label, mode) in [("even", BesselAverage::Even), ("mod4", BesselAverage::Mod4(0))] {
        let res: Vec<f64> = ks.iter().map(|&k| averaged_bessel(&h, k, k * k, mode).expect("bessel").residual.abs()).collect();
        let beta = -fit_slope(&ks.map(f64::ln), &res.iter().map(|r| r.ln()).collect::<Vec<_>>());
        ok &= beta >= 3.5;
        parts.push(format!("{label} β = {beta:.2}"));
    }
    (ok, format!("x = K², fitted decay {}", parts.join(", ")))
}

struct MomentRuns {
    plain: Vec<MomentReport>,
    mixed: Vec<MomentReport>,
    l_one: f64,
}

const MOMENT_KS: [f64; 3] = [12.0, 20.0, 32.0];

fn moment_runs() -> MomentRuns {
    let n = 60_000;
    let g = &eigenforms(12, n).expect("eigenforms")[0];
    let f = SymSquareForm::new(g, n).expect("sym²");
    let w = TestFunction::canonical();
    let plain = MOMENT_KS.iter().map(|&k| weight_moment(&f, k, &w, 1, false).expect("moment")).collect();
    let mixed = MOMENT_KS.iter().map(|&k| weight_moment(&f, k, &w, 1, true).expect("moment")).collect();
    MomentRuns { plain, mixed, l_one: l_one(&f).expect("L(1,F)") }
}

fn first_moment_asymptotic(runs: &MomentRuns) -> (bool, String) {
    let gaps: Vec<f64> = runs.plain.iter().map(|r| r.gap.unwrap().abs()).collect();
    let decreasing = gaps.windows(2).all(|p| p[1] < p[0]);
    let bound = 5.0 * 32f64.powf(-0.25);
    let w_int = TestFunction::canonical().integral();
    let ratios: Vec<String> = runs
        .plain
        .iter()
        .map(|r| format!("{:.4}", r.moment / (runs.l_one * r.k_param / 2.0 * w_int)))
        .collect();
    let detail = format!(
        "|gap| = {:.3e}/{:.3e}/{:.3e} vs 5·32^(-1/4) = {bound:.3}; moment/(L(1,F)·K/2·Ŵ(0)) = {}",
        gaps[0],
        gaps[1],
        gaps[2],
        ratios.join("/")
    );
    (decreasing && gaps[2] <= bound, detail)
}

fn mixed_moment_shape(runs: &MomentRuns) -> (bool, String) {
    let r: Vec<f64> = runs.mixed.iter().map(|m| m.moment.abs() / m.k_param.powf(1.1)).collect();
    let ok = r.windows(2).all(|p| p[1] <= p[0]);
    (ok, format!("|moment|/K^1.1 = {:.4}/{:.4}/{:.4}", r[0], r[1], r[2]))
}

fn root_number_annihilation(runs: &MomentRuns) -> (bool, String) {
    let mut offenders = std::collections::BTreeSet::new();
    let mut checked = 0;
    for r in runs.plain.iter().chain(&runs.mixed) {
        for e in r.per_weight.iter().filter(|e| e.k % 4 == 2) {
            for f in &e.forms {
                checked += 1;
                if f.l_rs != 0.0 || f.l_gl2.is_some_and(|v| v != 0.0) {
                    offenders.insert(e.k);
                }
            }
        }
    }
    (offenders.is_empty(), format!("{checked} forms at k ≡ 2 mod 4; nonzero L(1/2,F⊗f) at k ∈ {offenders:?}"))
}

fn amplifier() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut ok = true;
    for k in [12u32, 24, 36] {
        let forms = eigenforms(k, 200).expect("eigenforms");
        for f0 in &forms {
            for l in [5u64, 11, 23] {
                let amp = Amplifier::new(f0, l).expect("amplifier");
                for f in &forms {
                    let direct = amp.eval(f).unwrap();
                    let gap = (direct - amp.expansion(f).unwrap().total()).abs();
                    worst = worst.max(gap);
                    ok &= gap <= 1e-10 && direct >= 0.0;
                }
                ok &= amp.eval(f0).unwrap() >= amp.self_lower_bound();
            }
        }
    }
    (ok, format!("weights 12/24/36, L ∈ {{5,11,23}}, worst expansion gap {worst:.2e}"))
}

fn positivity(runs: &MomentRuns) -> (bool, String) {
    let values: Vec<f64> = runs
        .plain
        .iter()
        .chain(&runs.mixed)
        .flat_map(|r| r.per_weight.iter().flat_map(|e| e.forms.iter().map(|f| f.l_rs)))
        .collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let live: Vec<f64> = values.iter().copied().filter(|&v| v != 0.0).collect();
    let live_min = live.iter().copied().fold(f64::INFINITY, f64::min);
    let detail = format!("{} central values, minimum {min:.3e}; {} with root number +1, minimum {live_min:.3e}", values.len(), live.len());
    (min >= -1e-6, detail)
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let mut outcomes = vec![
        run(1, petersson),
        run(2, kloosterman_properties),
        run(3, reciprocity),
        run(4, voronoi),
        run(5, omega_dual),
        run(6, bessel_decay),
    ];
    let t = Instant::now();
    let runs = moment_runs();
    println!("moment runs computed in {:.1}s", t.elapsed().as_secs_f64());
    outcomes.push(run(7, || first_moment_asymptotic(&runs)));
    outcomes.push(run(8, || mixed_moment_shape(&runs)));
    outcomes.push(run(9, || root_number_annihilation(&runs)));
    outcomes.push(run(10, amplifier));
    outcomes.push(run(11, || positivity(&runs)));

    let unexpected: Vec<u32> = outcomes.iter().filter(|o| !o.pass && !KNOWN_FAILURES.contains(&o.id)).map(|o| o.id).collect();
    let fixed: Vec<u32> = outcomes.iter().filter(|o| o.pass && KNOWN_FAILURES.contains(&o.id)).map(|o| o.id).collect();
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} PASS; known failures {KNOWN_FAILURES:?}; now passing {fixed:?}", outcomes.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        ExitCode::FAILURE
    }
}
