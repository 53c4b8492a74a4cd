//! Acceptance criteria 1-9, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the verdict lines always
//! reach the output. Criteria 7-9 share two full `compare` runs of the CLI on
//! the bundled fixture, which dominate the wall time (several minutes each on
//! one core).

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use modecast::neural::backward;
use modecast::pipeline::{forecast_recursive, HybridModel};
use modecast::series::fit_scaler;
use modecast::vmd::{decompose, sweep_k, VmdConfig};
use modecast::{describe, evaluate, load_csv};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

struct Suite {
    failed: usize,
}

impl Suite {
    fn check(&mut self, id: u8, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let verdict = match (verdict, budget) {
            (Ok(d), Some(b)) if elapsed > b => Err(format!("{d}; over time budget {b:?}")),
            (v, _) => v,
        };
        let (tag, detail) = match verdict {
            Ok(d) => ("PASS", d),
            Err(d) => {
                self.failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "[{tag}] criterion {id}: {name} ({:.1}s) {detail}",
            elapsed.as_secs_f64()
        );
    }
}

fn c1_two_tone() -> Verdict {
    let x = oracle::two_tone(1024);
    let m = decompose(&x, &VmdConfig::with_k(2)).map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    for (k, truth) in [0.01, 0.12].into_iter().enumerate() {
        let (_, tone) = oracle::fft_isolate(&x, truth, 8);
        let r = oracle::correlation(&m.modes[k], &tone);
        let w = m.center_freqs[k];
        ensure((w - truth).abs() <= 0.002, format!("omega_{k} = {w}"))?;
        ensure(r > 0.99, format!("mode {k} correlation {r}"))?;
        detail.push(format!("omega={w:.5} corr={r:.5}"));
    }
    Ok(detail.join(", "))
}

fn fixture() -> PathBuf {
    oracle::fixture_path()
}

fn c2_sweep() -> Verdict {
    let series = load_csv(fixture(), "Date", "Close")
        .map_err(|e| e.to_string())?
        .series;
    let scaled = fit_scaler(&series.values)
        .unwrap()
        .transform(&series.values);
    let sweep = sweep_k(&scaled, 5, 20, &VmdConfig::default()).map_err(|e| e.to_string())?;
    ensure(sweep.rows.len() == 16, "expected 16 rows")?;
    for pair in sweep.rows.windows(2) {
        let (a, b) = (pair[0].residual_energy_ratio, pair[1].residual_energy_ratio);
        ensure(
            b <= a + 1e-6,
            format!("increase at K={}: {a:e} -> {b:e}", pair[1].k),
        )?;
    }
    for row in sweep.rows.iter().filter(|r| r.k >= 11) {
        ensure(
            row.residual_energy_ratio < 1e-4,
            format!("K={} ratio {:e}", row.k, row.residual_energy_ratio),
        )?;
    }
    let at = |k: usize| sweep.rows[k - 5].residual_energy_ratio;
    Ok(format!(
        "ratio K=5 {:.2e}, K=11 {:.2e}, K=20 {:.2e}",
        at(5),
        at(11),
        at(20)
    ))
}

fn c3_gradients() -> Verdict {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let (p, windows, targets) = oracle::gradient_case(seed);
        let analytic =
            oracle::flatten(&backward(&p, &windows, &targets).map_err(|e| e.to_string())?);
        let numeric = oracle::fd_gradient(&p, &windows, &targets, 1e-5);
        let err = oracle::max_rel_error(&analytic, &numeric, 1e-6);
        ensure(
            err < 1e-4,
            format!("seed {seed}: max relative error {err:e}"),
        )?;
        worst = worst.max(err);
    }
    Ok(format!("20 seeds, worst relative error {worst:.2e}"))
}

fn c4_metrics() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let n = rng.gen_range(2..200);
        let scale = 10f64.powf(rng.gen_range(-2.0..5.0));
        let a: Vec<f64> = (0..n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect();
        let p: Vec<f64> = a
            .iter()
            .map(|v| v + scale * rng.gen_range(-0.3..0.3))
            .collect();
        let m = evaluate(&a, &p).map_err(|e| e.to_string())?;
        let (rmse, mae, mse, r2) = oracle::metrics(&a, &p);
        let r2_err = (m.r2 - r2).abs() / r2.abs().max(1.0);
        let e = rel(m.rmse, rmse)
            .max(rel(m.mae, mae))
            .max(rel(m.mse, mse))
            .max(r2_err);
        ensure(e <= 1e-12, format!("pair {i}: relative error {e:e}"))?;
        ensure(
            rel(m.rmse * m.rmse, m.mse) <= 1e-12,
            format!("pair {i}: rmse^2 != mse"),
        )?;
        ensure(
            m.mae <= m.rmse * (1.0 + 1e-12),
            format!("pair {i}: mae > rmse"),
        )?;
        worst = worst.max(e);
    }
    Ok(format!("1000 pairs, worst relative error {worst:.2e}"))
}

fn c5_scaler() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let n = rng.gen_range(2..300);
        let scale = 10f64.powf(rng.gen_range(-3.0..6.0));
        let offset = scale * rng.gen_range(-2.0..2.0);
        let x: Vec<f64> = (0..n).map(|_| offset + scale * rng.gen::<f64>()).collect();
        let Ok(s) = fit_scaler(&x) else { continue };
        let back = s.inverse_transform(&s.transform(&x));
        for (a, b) in x.iter().zip(&back) {
            // elements near zero in a wide range are judged against the range
            let e = (a - b).abs() / a.abs().max(s.range());
            ensure(
                e <= 1e-12,
                format!("vector {i}: relative error {e:e} at {a}"),
            )?;
            worst = worst.max(e);
        }
    }
    Ok(format!("1000 vectors, worst relative error {worst:.2e}"))
}

fn c6_stats() -> Verdict {
    let loaded = load_csv(fixture(), "Date", "Close").map_err(|e| e.to_string())?;
    let s = describe(&loaded.series).map_err(|e| e.to_string())?;
    ensure(s.count == 2863, format!("count {}", s.count))?;
    for (name, got, want) in [
        ("mean", s.mean, 30872.06),
        ("std", s.std, 26673.85),
        ("min", s.min, 3154.95),
        ("median", s.median, 22487.39),
        ("max", s.max, 111673.28),
    ] {
        ensure((got - want).abs() <= 0.5, format!("{name} {got} vs {want}"))?;
    }
    Ok(format!(
        "count {} mean {:.2} std {:.2} min {:.2} median {:.2} max {:.2}",
        s.count, s.mean, s.std, s.min, s.median, s.max
    ))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_modecast"))
}

fn compare_run(out: &Path) -> Result<Duration, String> {
    let start = Instant::now();
    let o = bin()
        .args(["compare", "--input"])
        .arg(fixture())
        .arg("--out")
        .arg(out)
        .env_remove("MODECAST_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        o.status.success(),
        format!(
            "compare exited {:?}: {}",
            o.status.code(),
            String::from_utf8_lossy(&o.stderr)
        ),
    )?;
    Ok(start.elapsed())
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn c7_direction(run: &Result<Duration, String>, dir: &Path) -> Verdict {
    let elapsed = run.clone()?;
    ensure(
        elapsed < Duration::from_secs(15 * 60),
        format!("compare took {elapsed:?}"),
    )?;
    let j = json(&dir.join("comparison.json"));
    let get = |m: &str, k: &str| j[m]["test"][k].as_f64().unwrap();
    let (hr, pr) = (get("vmd_lstm", "rmse"), get("plain_lstm", "rmse"));
    let (h2, p2) = (get("vmd_lstm", "r2"), get("plain_lstm", "r2"));
    let detail = format!(
        "test RMSE hybrid {hr:.2} vs plain {pr:.2}, R2 {h2:.4} vs {p2:.4}, compare {:.0}s",
        elapsed.as_secs_f64()
    );
    ensure(hr < pr && h2 > p2 && h2 > 0.95, detail.clone())?;
    Ok(detail)
}

fn c8_forecast(run: &Result<Duration, String>, model_dir: &Path, out: &Path) -> Verdict {
    run.clone()?;
    let o = bin()
        .args(["forecast", "--horizon", "30", "--model-dir"])
        .arg(model_dir)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        o.status.success(),
        String::from_utf8_lossy(&o.stderr).to_string(),
    )?;
    let csv = fs::read_to_string(out.join("forecast.csv")).unwrap();
    let rows: Vec<(String, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let (d, v) = l.split_once(',').unwrap();
            (d.to_string(), v.parse().unwrap())
        })
        .collect();
    ensure(rows.len() == 30, format!("{} rows", rows.len()))?;
    ensure(rows.iter().all(|r| r.1.is_finite()), "non-finite forecast")?;

    let model = HybridModel::load(model_dir).map_err(|e| e.to_string())?;
    let report = forecast_recursive(&model, 30).map_err(|e| e.to_string())?;
    for t in 0..30 {
        let mut sum = 0.0;
        for mode in &report.per_mode {
            sum += mode[t];
        }
        ensure(
            sum == report.ensemble_scaled[t],
            format!("ensemble differs from mode sum at {t}"),
        )?;
        ensure(
            model.series_scaler.unscale(sum) == rows[t].1,
            format!("CSV value differs from library at {t}"),
        )?;
    }
    let series = load_csv(fixture(), "Date", "Close").unwrap().series;
    let mut date = series.last_date().unwrap();
    for (d, _) in &rows {
        date = date.succ_opt().unwrap();
        ensure(
            *d == date.format("%Y-%m-%d").to_string(),
            format!("date {d}, expected {date}"),
        )?;
    }
    let mut prev = *series.values.last().unwrap();
    let mut worst: f64 = 0.0;
    for (_, v) in &rows {
        worst = worst.max((v - prev).abs() / prev.abs());
        prev = *v;
    }
    ensure(worst < 0.2, format!("one-step change {worst:.3}"))?;
    Ok(format!(
        "{} .. {}, {:.0} -> {:.0} USD, max step change {:.2}%",
        rows[0].0,
        rows[29].0,
        rows[0].1,
        rows[29].1,
        100.0 * worst
    ))
}

fn c9_determinism(runs: [&Result<Duration, String>; 2], a: &Path, b: &Path) -> Verdict {
    for r in runs {
        r.clone()?;
    }
    let mut names: Vec<String> = fs::read_dir(a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".json") && n != "run_config.json")
        .collect();
    names.sort();
    ensure(
        names.iter().any(|n| n == "comparison.json"),
        "no comparison.json",
    )?;
    ensure(
        names.iter().filter(|n| n.starts_with("imf_")).count() == 15,
        "expected 15 IMF models",
    )?;
    for name in names
        .iter()
        .map(String::as_str)
        .chain(["predictions.csv", "loss_history.csv"])
    {
        let (x, y) = (fs::read(a.join(name)), fs::read(b.join(name)));
        ensure(
            matches!((&x, &y), (Ok(x), Ok(y)) if x == y),
            format!("{name} differs between runs"),
        )?;
    }
    Ok(format!(
        "{} JSON files and both CSVs byte-identical",
        names.len()
    ))
}

fn main() {
    // `cargo test -- --list` and filters are not meaningful here
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut suite = Suite { failed: 0 };
    let secs = Duration::from_secs;
    suite.check(1, "VMD two-tone recovery", Some(secs(5)), c1_two_tone);
    suite.check(2, "residual-energy sweep shape", Some(secs(120)), c2_sweep);
    suite.check(
        3,
        "LSTM gradients vs finite differences",
        Some(secs(30)),
        c3_gradients,
    );
    suite.check(4, "metrics vs substitution oracle", None, c4_metrics);
    suite.check(5, "scaler round trip", None, c5_scaler);
    suite.check(6, "fixture descriptive statistics", None, c6_stats);

    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("run_a"), dir.path().join("run_b"));
    let run_a = compare_run(&a);
    let run_b = compare_run(&b);
    suite.check(7, "hybrid beats plain on the fixture", None, || {
        c7_direction(&run_a, &a)
    });
    suite.check(8, "30-day forecast contract", None, || {
        c8_forecast(&run_a, &a, &dir.path().join("forecast"))
    });
    suite.check(9, "identical-seed runs are byte-identical", None, || {
        c9_determinism([&run_a, &run_b], &a, &b)
    });

    println!("acceptance: {} of 9 criteria passed", 9 - suite.failed);
    if suite.failed > 0 {
        std::process::exit(1);
    }
}
