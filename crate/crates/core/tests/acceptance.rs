//! Acceptance suite. Runs each criterion, prints one PASS/FAIL line per
//! criterion with its runtime, and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use spokeforge::evaluator::{
    fft_magnitudes, proxy_evaluate_detailed, OutputKind, ProxyCalibration, TimeSeries,
};
use spokeforge::geometry::{
    base_profile, generate_profile, profile_area, DesignGenotype, PolynomialCurve, AREA_TOLERANCE,
    MIN_THICKNESS_MM,
};
use spokeforge::optimizer::{
    bo_run, dominates, expected_improvement, hypervolume, pareto_filter, pso_run, BoConfig, PsoConfig, Sense,
};
use spokeforge::pipeline::{cmd_evaluate, cmd_generate, cmd_optimize, cmd_train, BackendChoice, CampaignConfig};
use spokeforge::surrogate::{polynomial_kernel, BoostedTreeModel, GbtParams, KernelRidgeModel, KrrParams};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn polynomial_fidelity() -> Check {
    let top = PolynomialCurve::reference_top().eval(0.0).map_err(|e| e.to_string())?;
    let bottom = PolynomialCurve::reference_bottom().eval(0.0).map_err(|e| e.to_string())?;
    ensure(top == 10.731, || format!("top(0) = {top}"))?;
    ensure(bottom == 0.029891, || format!("bottom(0) = {bottom}"))?;
    let base = base_profile();
    let t_min = base.min_thickness();
    ensure(base.x().len() == 150, || format!("{} samples", base.x().len()))?;
    ensure(t_min > 0.0, || format!("min thickness {t_min}"))?;
    Ok(format!("top(0)={top} bottom(0)={bottom} min t={t_min:.4} mm"))
}

fn generative_constraint() -> Check {
    let base = base_profile();
    let a0 = profile_area(&base);
    let bounds = DesignGenotype::bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut accepted, mut worst_area, mut worst_t) = (0, 0.0f64, f64::INFINITY);
    for _ in 0..100 {
        let v: Vec<f64> = bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect();
        let g = DesignGenotype::from_slice(&v).map_err(|e| e.to_string())?;
        let Ok(out) = generate_profile(&base, &g) else {
            continue;
        };
        accepted += 1;
        let rel = (profile_area(&out.profile) - a0).abs() / a0;
        worst_area = worst_area.max(rel);
        worst_t = worst_t.min(out.profile.min_thickness());
    }
    ensure(accepted > 0, || "no genotype accepted".into())?;
    ensure(worst_area <= AREA_TOLERANCE, || format!("area deviation {worst_area:e}"))?;
    ensure(worst_t > MIN_THICKNESS_MM, || format!("thickness {worst_t}"))?;

    let zero = generate_profile(&base, &DesignGenotype::zero()).map_err(|e| e.to_string())?;
    let dev = zero
        .profile
        .y_top()
        .iter()
        .zip(base.y_top())
        .chain(zero.profile.y_bottom().iter().zip(base.y_bottom()))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(dev <= 1e-9, || format!("zero genotype deviates by {dev:e}"))?;
    Ok(format!(
        "{accepted}/100 accepted, max |dA|/A={worst_area:.2e}, min t={worst_t:.3} mm, zero-genotype dev={dev:.1e}"
    ))
}

fn direct_dft_magnitudes(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let padded = n.next_power_of_two().max(2);
    (0..=padded / 2)
        .map(|k| {
            let c: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let phase = -2.0 * std::f64::consts::PI * ((k * j) % padded) as f64 / padded as f64;
                    Complex64::from_polar(v, phase)
                })
                .sum();
            let scale = if k == 0 { 1.0 } else { 2.0 };
            scale * c.norm() / n as f64
        })
        .collect()
}

fn spectral_pipeline() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(2..=1024);
        let samples: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fast = fft_magnitudes(&TimeSeries::new(2000.0, samples.clone()).map_err(|e| e.to_string())?);
        let slow = direct_dft_magnitudes(&samples);
        ensure(fast.magnitudes.len() == slow.len(), || "bin count differs".into())?;
        for (a, b) in fast.magnitudes.iter().zip(&slow) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-8, || format!("FFT vs DFT error {worst:e}"))?;

    let sine: Vec<f64> = (0..2000)
        .map(|i| (2.0 * std::f64::consts::PI * 250.0 * i as f64 / 2000.0).sin())
        .collect();
    let s = fft_magnitudes(&TimeSeries::new(2000.0, sine).map_err(|e| e.to_string())?);
    let (peak, &mag) = s
        .magnitudes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or("empty spectrum")?;
    let runner_up = s
        .magnitudes
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != peak)
        .map(|(_, m)| *m)
        .fold(0.0, f64::max);
    ensure((s.frequencies[peak] - 250.0).abs() < 1e-9, || format!("peak at {} Hz", s.frequencies[peak]))?;
    ensure((mag - 1.0).abs() <= 1e-6, || format!("peak magnitude {mag}"))?;
    ensure(runner_up < 0.5, || format!("second bin {runner_up}"))?;

    let base = base_profile();
    let cal = ProxyCalibration::from_base(&base).map_err(|e| e.to_string())?;
    let eval = proxy_evaluate_detailed(&base, &cal).map_err(|e| e.to_string())?;
    let vib = eval.record.vib_rms;
    ensure(vib == 2.4216, || format!("base band RMS {vib}"))?;
    Ok(format!(
        "max FFT-DFT error {worst:.1e}, 250 Hz peak {mag:.9} (next {runner_up:.3}), base vib_rms {vib}"
    ))
}

fn campaign(dir: &Path, seed: u64) -> CampaignConfig {
    CampaignConfig {
        seed,
        out: dir.to_path_buf(),
        backend: BackendChoice::Proxy,
        ..CampaignConfig::default()
    }
}

fn surrogate_quality() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = campaign(tmp.path(), 42);
    let generated = cmd_generate(&config).map_err(|e| e.to_string())?;
    ensure(generated.accepted == 250, || format!("{} designs", generated.accepted))?;
    cmd_evaluate(&config).map_err(|e| e.to_string())?;
    let report = cmd_train(&config).map_err(|e| e.to_string())?;
    ensure(report.train_ids.len() == 200 && report.test_ids.len() == 50, || {
        format!("split {}/{}", report.train_ids.len(), report.test_ids.len())
    })?;
    let floors = [
        (OutputKind::Rft, 0.95),
        (OutputKind::Rfc, 0.95),
        (OutputKind::Sedt, 0.80),
        (OutputKind::Sedc, 0.80),
        (OutputKind::VibRms, 0.80),
    ];
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for (kind, floor) in floors {
        let r2 = report.test_r2(kind).unwrap_or(f64::NEG_INFINITY);
        parts.push(format!("{}={r2:.4}", kind.name()));
        if r2.is_nan() || r2 < floor {
            failures.push(format!("{} test R² {r2:.4} < {floor}", kind.name()));
        }
    }
    let line = format!("test R² {}", parts.join(" "));
    if failures.is_empty() {
        Ok(line)
    } else {
        Err(format!("{line}; {}", failures.join("; ")))
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn surrogate_internals() -> Check {
    let x = vec![vec![0.5, -1.0], vec![1.5, 0.25], vec![-0.75, 2.0]];
    let y = [1.0, -2.0, 0.5];
    let params = KrrParams {
        alpha: 0.1,
        gamma: 0.5,
        degree: 2,
    };
    let model = KernelRidgeModel::fit(&x, &y, params).map_err(|e| e.to_string())?;
    // Cramer's rule on (K + αI) w = y.
    let mut a = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = polynomial_kernel(&x[i], &x[j], 0.5, 2) + if i == j { 0.1 } else { 0.0 };
        }
    }
    let d = det3(a);
    let mut krr_err = 0.0f64;
    for c in 0..3 {
        let mut ac = a;
        for r in 0..3 {
            ac[r][c] = y[r];
        }
        krr_err = krr_err.max((det3(ac) / d - model.weights[c]).abs());
    }
    ensure(krr_err <= 1e-10, || format!("KRR weight error {krr_err:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for set in 0..5 {
        let n = 60 + 20 * set;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..6).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|r| r[0].sin() * 3.0 + r[1] * r[2] - r[3].abs() + rng.random_range(-0.3..0.3))
            .collect();
        let m = BoostedTreeModel::fit(&x, &y, GbtParams::new(0.1, 50, 3)).map_err(|e| e.to_string())?;
        ensure(m.train_mse.len() == 51, || format!("dataset {set}: {} MSE entries", m.train_mse.len()))?;
        if let Some(w) = m.train_mse.windows(2).position(|w| w[1] > w[0]) {
            return Err(format!("dataset {set}: MSE rises at round {}", w + 1));
        }
    }
    Ok(format!("KRR max weight error {krr_err:.1e}; 5 datasets × 50 rounds non-increasing"))
}

fn optimizer_correctness() -> Check {
    let sphere = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>();
    let pso = pso_run(
        sphere,
        &[(-4.0, 4.0); 10],
        &PsoConfig {
            particles: 30,
            iterations: 200,
            seed: 42,
            ..PsoConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    ensure(pso.best_value < 1e-3, || format!("sphere best {}", pso.best_value))?;

    let quartic = |p: &[f64]| {
        let x = p[0];
        (x - 1.3).powi(4) - 2.0 * (x - 1.3).powi(2) + 0.3 * (x - 2.3).powi(2)
    };
    // Global minimizer by dense grid search.
    let x_star = (0..=800_000)
        .map(|i| -4.0 + 8.0 * i as f64 / 800_000.0)
        .min_by(|a, b| quartic(&[*a]).total_cmp(&quartic(&[*b])))
        .unwrap_or(0.0);
    let bo = bo_run(
        quartic,
        &[(-4.0, 4.0)],
        &BoConfig {
            n_init: 5,
            iterations: 30,
            seed: 7,
            ..BoConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let evals = bo.values.len();
    let bo_err = (bo.best_position[0] - x_star).abs();
    ensure(evals <= 35, || format!("BO used {evals} evaluations"))?;
    ensure(bo_err <= 0.1, || format!("BO found {} vs {x_star}", bo.best_position[0]))?;

    let points = [(0.0, 1.0, 0.0), (1.0, 0.5, 1.2), (-0.5, 2.0, 0.3), (2.0, 0.3, 1.0), (0.4, 1.5, -1.0)];
    let draws = 10_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_z = 0.0f64;
    for (mu, sigma, best) in points {
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..draws {
            let z: f64 = StandardNormal.sample(&mut rng);
            let imp = (best - (mu + sigma * z)).max(0.0);
            s += imp;
            s2 += imp * imp;
        }
        let mean = s / draws as f64;
        let se = ((s2 / draws as f64 - mean * mean) / draws as f64).sqrt();
        let z = (expected_improvement(mu, sigma, best) - mean).abs() / se;
        worst_z = worst_z.max(z);
    }
    ensure(worst_z <= 3.0, || format!("EI deviates by {worst_z:.2} SE"))?;

    let pts: Vec<Vec<f64>> = (0..200)
        .map(|_| (0..3).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let senses = [Sense::Minimize; 3];
    let fast = pareto_filter(&pts, &senses).map_err(|e| e.to_string())?;
    let oracle: Vec<usize> = (0..pts.len())
        .filter(|&i| !pts.iter().any(|q| q.iter().zip(&pts[i]).all(|(a, b)| a <= b) && *q != pts[i]))
        .collect();
    ensure(fast == oracle, || format!("front {} vs oracle {}", fast.len(), oracle.len()))?;
    ensure(
        oracle.iter().all(|&i| !fast.iter().any(|&j| dominates(&pts[j], &pts[i], &senses))),
        || "front member dominated".into(),
    )?;

    let hv = hypervolume(&[vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]], &[4.0, 4.0]).map_err(|e| e.to_string())?;
    ensure((hv - 6.0).abs() <= 1e-6, || format!("HV {hv}"))?;
    Ok(format!(
        "sphere {:.2e}; BO x={:.4} (x*={x_star:.4}) in {evals} evals; EI max {worst_z:.2} SE; front {} pts; HV {hv}",
        pso.best_value,
        bo.best_position[0],
        fast.len()
    ))
}

fn files_under(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if let Ok(bytes) = fs::read(&path) {
                out.insert(path.strip_prefix(root).unwrap_or(&path).to_path_buf(), bytes);
            }
        }
    }
    out
}

struct CampaignRun {
    rft_gain: f64,
    sedt_change: f64,
    monotone: bool,
}

fn run_campaign(dir: &Path) -> Result<CampaignRun, String> {
    let mut config = campaign(dir, 42);
    cmd_generate(&config).map_err(|e| e.to_string())?;
    cmd_evaluate(&config).map_err(|e| e.to_string())?;
    cmd_train(&config).map_err(|e| e.to_string())?;
    config.objective = "max:rft".into();
    let rft = cmd_optimize(&config).map_err(|e| e.to_string())?;
    config.objective = "min:sedt".into();
    let sedt = cmd_optimize(&config).map_err(|e| e.to_string())?;
    let monotone = [&rft, &sedt]
        .iter()
        .all(|o| o.trace.windows(2).all(|w| w[1].best_value <= w[0].best_value));
    Ok(CampaignRun {
        rft_gain: rft.improvement(OutputKind::Rft),
        sedt_change: sedt.improvement(OutputKind::Sedt),
        monotone,
    })
}

fn end_to_end_campaign() -> Check {
    let (a, b) = (
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    );
    let first = run_campaign(a.path())?;
    let second = run_campaign(b.path())?;
    ensure(first.rft_gain >= 30.0, || format!("RFT gain {:.2}%", first.rft_gain))?;
    ensure(first.sedt_change <= -30.0, || format!("SEDT change {:.2}%", first.sedt_change))?;
    ensure(first.monotone && second.monotone, || "g_best trace not monotone".into())?;
    let (fa, fb) = (files_under(a.path()), files_under(b.path()));
    let differing: Vec<_> = fa
        .keys()
        .chain(fb.keys())
        .filter(|k| fa.get(*k) != fb.get(*k))
        .map(|k| k.display().to_string())
        .collect();
    ensure(differing.is_empty(), || format!("runs differ in {differing:?}"))?;
    Ok(format!(
        "RFT {:+.2}%, SEDT {:+.2}%, traces monotone, {} files byte-identical across two runs",
        first.rft_gain,
        first.sedt_change,
        fa.len()
    ))
}

fn targeted_mode() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = CampaignConfig {
        objective: "target:rft=12000,target:rfc=1000,min:sedt,min:vib_rms".into(),
        ..campaign(tmp.path(), 42)
    };
    let out = cmd_optimize(&config).map_err(|e| e.to_string())?;
    let (rft, rfc) = (out.record.rft, out.record.rfc);
    let (e_rft, e_rfc) = ((rft - 12000.0).abs() / 12000.0, (rfc - 1000.0).abs() / 1000.0);
    ensure(!out.fallback, || "no feasible design".into())?;
    ensure(e_rft <= 0.10, || format!("RFT {rft:.1} ({:.1}% off)", 100.0 * e_rft))?;
    ensure(e_rfc <= 0.15, || format!("RFC {rfc:.1} ({:.1}% off)", 100.0 * e_rfc))?;
    Ok(format!(
        "RFT {rft:.1} ({:.2}% off), RFC {rfc:.1} ({:.2}% off)",
        100.0 * e_rft,
        100.0 * e_rfc
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("polynomial fidelity", Duration::from_secs(1), polynomial_fidelity),
        ("generative constraint", Duration::from_secs(10), generative_constraint),
        ("spectral pipeline", Duration::from_secs(30), spectral_pipeline),
        ("surrogate quality", Duration::from_secs(120), surrogate_quality),
        ("surrogate internals", Duration::from_secs(30), surrogate_internals),
        ("optimizer correctness", Duration::from_secs(120), optimizer_correctness),
        ("end-to-end campaign", Duration::from_secs(300), end_to_end_campaign),
        ("targeted mode", Duration::from_secs(180), targeted_mode),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(msg) if elapsed > *limit => Err(format!("{msg}; exceeded {limit:?}")),
            r => r,
        };
        let (tag, msg) = match result {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {n} [{tag}] {name} ({:.2} s): {msg}", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
