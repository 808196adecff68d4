//! Acceptance criteria. Each check prints one line; the process fails if any
//! check fails other than those listed in `RECORDED_FAILURES`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use polarization::asymptotics::{
    epstein_partial_sum, epstein_zeta_triangular_detailed, equally_spaced_circle_series, sigma_2d_conjectured,
    triangular_spacing, Provenance,
};
use polarization::distribution::compare_distribution;
use polarization::energy::check_polarization_energy_bound;
use polarization::extremal::{check_large_s_limits, covering_radius};
use polarization::solver::{brute_force_small, optimize, seed_configuration, tile_configuration, Method, SeedStyle, SolveOptions};
use polarization::verify::run_suite;
use polarization::*;

/// Checks whose stated claim is contradicted by the exact values; see the
/// README section on acceptance results.
const RECORDED_FAILURES: &[&str] = &["1b"];

struct Report {
    lines: Vec<(String, bool)>,
}

impl Report {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        println!("criterion {id:<4} {}  {detail}", if pass { "PASS" } else { "FAIL" });
        self.lines.push((id.to_string(), pass));
    }
}

/// `Σ_k |2 sin((2k + 1)π/(2N))|^{-s}`: the potential of `N` equally spaced
/// points at a gap midpoint, where it is smallest.
fn midpoint_potential(n: usize, s: f64) -> f64 {
    (0..n).map(|k| (2.0 * ((2 * k + 1) as f64 * PI / (2 * n) as f64).sin()).abs().powf(-s)).sum()
}

/// ζ(s) by direct summation with an Euler–Maclaurin tail.
fn zeta_direct(s: f64) -> f64 {
    let n = 10_000usize;
    let nf = n as f64;
    (1..n).map(|k| (k as f64).powf(-s)).sum::<f64>() + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s / 12.0 * nf.powf(-s - 1.0)
        - s * (s + 1.0) * (s + 2.0) / 720.0 * nf.powf(-s - 3.0)
}

fn circle() -> SetDescriptor {
    SetDescriptor::circle(1.0).unwrap()
}

fn criterion_1(r: &mut Report) {
    let ns: Vec<usize> = (6..=12).map(|k| 1usize << k).collect();
    let series = equally_spaced_circle_series(&KernelSpec::riesz(3.0).unwrap(), &ns, 1e-9).unwrap();
    let target = 14.0 * zeta_direct(3.0);
    let scale = (2.0 * PI).powi(3);
    let bracketed = series.entries.iter().all(|e| {
        let exact = midpoint_potential(e.n, 3.0);
        e.lower <= exact * (1.0 + 1e-12) && exact <= e.upper * (1.0 + 1e-12)
    });
    let last = series.entries.last().unwrap().ratio * scale;
    r.check(
        "1a",
        bracketed && (last - target).abs() <= 0.01 * target,
        format!("(2π)³P₃/N³ at N=4096 = {last:.6}, 14ζ(3) = {target:.6}, tol 1%, brackets contain closed form: {bracketed}"),
    );
    let ratios: Vec<f64> = series.entries.iter().map(|e| e.ratio * scale).collect();
    r.check(
        "1b",
        ratios.windows(2).all(|w| w[1] > w[0]),
        format!("monotone increase over N=64..4096: {ratios:.6?}"),
    );
}

fn criterion_2(r: &mut Report) {
    let series = equally_spaced_circle_series(&KernelSpec::riesz(1.0).unwrap(), &[1000, 100_000], 1e-9).unwrap();
    let exact: Vec<f64> = series.entries.iter().map(|e| midpoint_potential(e.n, 1.0) / (e.n as f64 * (e.n as f64).ln())).collect();
    let agree = series.entries.iter().zip(&exact).all(|(e, x)| (e.ratio - x).abs() <= 1e-8 * x);
    let dev: Vec<f64> = series.entries.iter().map(|e| (e.ratio * PI - 1.0).abs()).collect();
    r.check(
        "2",
        agree && dev[1] <= 0.15 && dev[1] < dev[0],
        format!(
            "P₁/(N ln N) at N=1e5 = {:.5} vs 1/π = {:.5}; deviation {:.4} (N=1e3: {:.4}), tol 15%",
            series.entries[1].ratio,
            1.0 / PI,
            dev[1],
            dev[0]
        ),
    );
}

fn criterion_3(r: &mut Report) {
    let set = SetDescriptor::interval(-1.0, 1.0).unwrap();
    let log = KernelSpec::log();
    let mut worst: f64 = 0.0;
    let mut value_err = f64::INFINITY;
    for n in 2..=4 {
        let opts = SolveOptions {
            bracket: BracketOptions::absolute(1e-7),
            ..SolveOptions::default()
        };
        let res = optimize(&set, &log, n, &opts).unwrap();
        let mut xs: Vec<f64> = res.config.points().map(|x| x[0]).collect();
        xs.sort_by(f64::total_cmp);
        for (k, x) in xs.iter().enumerate() {
            let zero = -((2 * k + 1) as f64 * PI / (2 * n) as f64).cos();
            worst = worst.max((x - zero).abs());
        }
        if n == 2 {
            let pair = Configuration::new(&set, &[vec![-0.5f64.sqrt()], vec![0.5f64.sqrt()]]).unwrap();
            let oracle = mesh_minimum(&pair, &set.mesh(1e-5).unwrap(), &log);
            value_err = (res.estimate.midpoint() - oracle).abs().max((oracle - 2f64.ln()).abs());
        }
    }
    r.check(
        "3",
        worst <= 1e-3 && value_err <= 1e-4,
        format!("max node error {worst:.2e} (tol 1e-3), N=2 value error vs fine mesh and ln 2 {value_err:.2e} (tol 1e-4)"),
    );
}

fn criterion_4(r: &mut Report) {
    let c = circle();
    let mut ok = true;
    let mut detail = Vec::new();
    for s in [2.0, 3.0] {
        let k = KernelSpec::riesz(s).unwrap();
        for n in 1..=3 {
            let brute = brute_force_small(&c, 360, &k, n, 2e10).unwrap().estimate.lower;
            let opts = SolveOptions {
                start: Some(SeedStyle::JitteredUniform(5)),
                bracket: BracketOptions::absolute(1e-8),
                ..SolveOptions::default()
            };
            let res = optimize(&c, &k, n, &opts).unwrap();
            let e = &res.estimate;
            ok &= (brute - e.midpoint()).abs() <= e.gap();
            detail.push(format!("s={s} N={n}: {brute:.8}∈[{:.8},{:.8}]", e.lower, e.upper));
            if n == 2 && s == 2.0 {
                let p = res.config.to_vecs();
                let antipodal = (p[0][0] + p[1][0]).hypot(p[0][1] + p[1][1]) < 1e-4;
                ok &= antipodal && (brute - 1.0).abs() < 1e-12;
                detail.push(format!("antipodal: {antipodal}"));
            }
        }
    }
    r.check("4", ok, detail.join("; "));
}

fn criterion_5(r: &mut Report) {
    let mut holds = 0;
    let mut total = 0;
    for (set, m) in [(circle(), 120), (SetDescriptor::interval(-1.0, 1.0).unwrap(), 101)] {
        for n in 2..=4 {
            for k in [KernelSpec::riesz(2.0).unwrap(), KernelSpec::log()] {
                let rep = check_polarization_energy_bound(&set, m, &k, n, 2e10).unwrap();
                total += 1;
                holds += rep.holds as usize;
            }
        }
    }
    r.check("5", holds == 12 && total == 12, format!("𝒫 ≥ ℰ/(N−1) on {holds} of {total} exhaustive instances"));
}

fn criterion_6(r: &mut Report) {
    let opts = BracketOptions::relative(1e-8);
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [1usize, 2] {
        let cube = SetDescriptor::cube(p).unwrap();
        let s = (p + 1) as f64;
        let k = KernelSpec::riesz(s).unwrap();
        for seed in [1u64, 2] {
            let base = seed_configuration(&cube, 3 + p, SeedStyle::JitteredUniform(seed)).unwrap();
            let e = polarization_with(&base, &cube, &k, &opts).unwrap();
            for m in [2usize, 3] {
                let t = polarization_with(&tile_configuration(&base, &cube, m).unwrap(), &cube, &k, &opts).unwrap();
                let ms = (m as f64).powf(s);
                let slack = t.gap() + ms * e.gap();
                ok &= t.lower >= ms * e.upper - slack;
                detail.push(format!("p={p} m={m} seed={seed}: {:.3}≥{:.3}", t.lower, ms * e.upper));
            }
        }
    }
    r.check("6", ok, detail.join("; "));
}

fn criterion_7(r: &mut Report) {
    let c = circle();
    let w = Weight::separable(ScalarField::axial(2.0, 1.0, 2), ScalarField::Constant(1.0), 1.0).unwrap();
    let k = KernelSpec::weighted_riesz(3.0, w, &c).unwrap();
    let configs: Vec<Configuration> = [16, 32, 64]
        .iter()
        .map(|&n| {
            let opts = SolveOptions {
                bracket: BracketOptions::relative(1e-6),
                ..SolveOptions::default()
            };
            optimize(&c, &k, n, &opts).unwrap().config
        })
        .collect();

    // Midpoint-rule CDF of (2 + cos θ)^{-1/3} as an independent oracle.
    let m = 200_000;
    let h = 2.0 * PI / m as f64;
    let mut cdf = vec![0.0; m + 1];
    for i in 0..m {
        cdf[i + 1] = cdf[i] + h * (2.0 + ((i as f64 + 0.5) * h).cos()).powf(-1.0 / 3.0);
    }
    let total = cdf[m];
    let oracle: Vec<f64> = configs
        .iter()
        .map(|cfg| {
            let mut th: Vec<f64> = cfg.points().map(|x| x[1].atan2(x[0]).rem_euclid(2.0 * PI)).collect();
            th.sort_by(f64::total_cmp);
            let n = th.len() as f64;
            th.iter().enumerate().fold(0.0f64, |d, (i, t)| {
                let f = cdf[((t / h) as usize).min(m)] / total;
                d.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs())
            })
        })
        .collect();
    let rep = compare_distribution(&c, &k, &configs, 8, 0.1).unwrap();
    let lib: Vec<f64> = rep.rows.iter().map(|r| r.discrepancy).collect();
    let agree = lib.iter().zip(&oracle).all(|(a, b)| (a - b).abs() < 1e-4);
    r.check(
        "7",
        agree && oracle[2] <= 0.1 && oracle[0] > oracle[1] && oracle[1] > oracle[2],
        format!("sup-CDF distance at N=16,32,64: {oracle:.4?} (library {lib:.4?}), tol 0.1 at N=64"),
    );
}

fn criterion_8(r: &mut Report) {
    let c = circle();
    let five = seed_configuration(&c, 5, SeedStyle::EquallySpaced).unwrap();
    let rep = check_large_s_limits(&five, &c, &[200.0, 400.0]).unwrap();
    let rho = 2.0 * (PI / 10.0).sin();
    let exact: Vec<f64> = [200.0, 400.0].iter().map(|&s| (midpoint_potential(5, s).powf(1.0 / s) * rho - 1.0).abs()).collect();
    let agree = rep.rows.iter().zip(&exact).all(|(row, x)| (row.covering_deviation - x).abs() < 1e-8);
    let cover = covering_radius(&five, &c, 1e-10).unwrap();
    r.check(
        "8",
        agree && cover.contains(rho) && exact[0] <= 0.05 && exact[1] < exact[0],
        format!("|P_s^(1/s)ρ₅ − 1| = {:.5} at s=200, {:.5} at s=400 (tol 0.05)", exact[0], exact[1]),
    );
}

fn criterion_9(r: &mut Report) {
    let e = epstein_zeta_triangular_detailed(5.0).unwrap();
    let doubling = (e.value - e.previous).abs() / e.value;
    let raw = {
        let a = epstein_partial_sum(5.0, 400.0).unwrap();
        let b = epstein_partial_sum(5.0, 800.0).unwrap();
        (a - b).abs() / b
    };
    let a = triangular_spacing();
    let z100 = epstein_zeta_triangular_detailed(100.0).unwrap().value;
    // Six nearest vectors of length a with a²·√3/2 = 1.
    assert!((a * a * 3f64.sqrt() / 2.0 - 1.0).abs() < 1e-15);
    let nearest = 6.0 * a.powf(-100.0);
    let shell = (z100 - nearest).abs() / nearest;
    let flagged = sigma_2d_conjectured(5.0).unwrap().provenance == Provenance::Conjectured;
    r.check(
        "9",
        doubling <= 1e-8 && raw <= 1e-8 && shell <= 1e-6 && flagged,
        format!("R vs 2R: {doubling:.1e} (smoothed), {raw:.1e} (raw R=400); s=100 shell error {shell:.1e}; conjecture flag {flagged}"),
    );
}

fn criterion_10(r: &mut Report) {
    let checks = run_suite("trivials").unwrap();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.claim.as_str()).collect();

    let opts = BracketOptions::relative(1e-12);
    let mut worst: f64 = 0.0;
    for (set, n) in [(circle(), 6), (SetDescriptor::interval(-1.0, 1.0).unwrap(), 4), (SetDescriptor::sphere(3).unwrap(), 5)] {
        let dim = set.ambient_dim();
        let shift: Vec<f64> = (0..dim).map(|i| 0.3 - 0.7 * i as f64).collect();
        let cfg = seed_configuration(&set, n, SeedStyle::JitteredUniform(4)).unwrap();
        for (alpha, s) in [(3.0, 2.0), (0.5, 1.5)] {
            let k = KernelSpec::riesz(s).unwrap();
            let base = polarization_with(&cfg, &set, &k, &opts).unwrap().midpoint();
            let moved = polarization_with(&cfg.transformed(alpha, &shift), &set.transformed(alpha, &shift).unwrap(), &k, &opts)
                .unwrap()
                .midpoint();
            worst = worst.max((moved - alpha.powf(-s) * base).abs() / moved.abs());
        }
    }

    let c = circle();
    let k = KernelSpec::riesz(3.0).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            let opts = SolveOptions {
                method: Method::Multistart(3),
                seed: 11,
                max_evaluations: 500,
                ..SolveOptions::default()
            };
            let res = optimize(&c, &k, 5, &opts).unwrap();
            let mut bits: Vec<u64> = res.config.coords().iter().map(|v| v.to_bits()).collect();
            bits.push(res.estimate.lower.to_bits());
            bits.push(res.estimate.upper.to_bits());
            bits
        })
    };
    let identical = run(1) == run(3);
    r.check(
        "10",
        failed.is_empty() && worst <= 1e-10 && identical,
        format!(
            "trivial checks failed: {failed:?} of {}; scaling/translation worst rel {worst:.1e} (tol 1e-10); 1 vs 3 threads bit-identical: {identical}",
            checks.len()
        ),
    );
}

fn main() -> ExitCode {
    let mut report = Report { lines: Vec::new() };
    let criteria: [(&str, fn(&mut Report)); 10] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
        ("10", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    for (id, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| x == id) {
            continue;
        }
        let t = Instant::now();
        f(&mut report);
        println!("             ({:.1} s)", t.elapsed().as_secs_f64());
    }
    let failed: Vec<&str> = report.lines.iter().filter(|(_, p)| !p).map(|(id, _)| id.as_str()).collect();
    let unexpected: Vec<&&str> = failed.iter().filter(|id| !RECORDED_FAILURES.contains(id)).collect();
    println!(
        "acceptance: {} checks, {} pass, {} fail {:?} ({} recorded)",
        report.lines.len(),
        report.lines.len() - failed.len(),
        failed.len(),
        failed,
        failed.len() - unexpected.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
