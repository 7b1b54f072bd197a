//! Acceptance suite. Each test prints one PASS/FAIL line straight to stderr
//! (so it shows even when output is captured) and then asserts.
//!
//! The tests take a shared lock so they run one at a time; the timing
//! criterion would otherwise measure contention instead of work.

use irs_hho::baselines::{alternating_optimize, no_irs, AoOptions};
use irs_hho::experiments::{
    build_instance, convergence_run, difference_report, hho_sanity, hho_seed, linear_fit_r2,
    oracle_check, run_hho, sweep_distance, timing_run, DiffRow, ExperimentConfig, OracleConfig,
    SanityConfig, Scheme, TestFunction, DEFAULT_D_GRID,
};
use irs_hho::hho::{Bounds, Branch, HarrisHawks, HhoConfig};
use irs_hho::problem::{decode, norm_sqr, penalty, EncodedSolution};
use irs_hho::rng::substream;
use rand::Rng;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[acceptance] criterion {id} {verdict}: {name} ({detail})");
}

fn diff_by_d(rows: &[DiffRow]) -> String {
    rows.iter()
        .map(|r| format!("d={}: {:+.3} dB", r.d_m, r.mean_diff_db))
        .collect::<Vec<_>>()
        .join(", ")
}

#[test]
fn criterion_1_oracle_optimality() {
    let _g = serial();
    let start = Instant::now();
    let r = oracle_check(&OracleConfig::default()).unwrap();
    let elapsed = start.elapsed();

    let worst_ao = r.rows.iter().map(|x| (x.ao_ratio - 1.0).abs()).fold(0.0, f64::max);
    let worst_bf = r.rows.iter().map(|x| x.brute_force_ratio).fold(f64::INFINITY, f64::min);
    let worst_hho = r.rows.iter().map(|x| x.hho_median_ratio).fold(f64::INFINITY, f64::min);
    let hho_misses = r.rows.iter().filter(|x| !x.hho_ok()).count();
    let bf_upper = r.rows.iter().all(|x| x.brute_force_ratio <= 1.0 + 1e-12);
    let fast = elapsed < Duration::from_secs(120);
    let ok = r.passed() && bf_upper && fast;
    report(
        1,
        "oracle optimality, M=1, N in {2,4,6}",
        ok,
        &format!(
            "max |AO/opt - 1| = {worst_ao:.2e}, min grid/opt = {worst_bf:.5}, \
             min HHO median/opt = {worst_hho:.4} ({hho_misses}/{} instances below 0.98), {:.1} s",
            r.rows.len(),
            elapsed.as_secs_f64()
        ),
    );
    assert!(r.ao_ok(), "AO deviates from the closed form");
    assert!(r.brute_force_ok() && bf_upper, "grid search outside [0.995, 1]");
    assert!(fast, "oracle check took {elapsed:?}");
    assert!(r.hho_ok(), "HHO median below 98% of the optimum on {hho_misses} instances");
}

fn parity_config(q: usize, t: usize) -> ExperimentConfig {
    ExperimentConfig {
        d_list: vec![20.0, 40.0, 51.0],
        seeds: (0..10).collect(),
        schemes: vec![Scheme::Ao, Scheme::Hho],
        q,
        t,
        ..ExperimentConfig::default()
    }
}

#[test]
fn criterion_2_full_scale_parity() {
    let _g = serial();
    let base = difference_report(&sweep_distance(&parity_config(80, 500)).unwrap(), Scheme::Hho, Scheme::Ao).unwrap();
    let large = difference_report(&sweep_distance(&parity_config(200, 1500)).unwrap(), Scheme::Hho, Scheme::Ao).unwrap();
    let base_ok = base.iter().all(|r| r.mean_diff_db.abs() <= 1.0);
    let large_ok = large.iter().all(|r| r.mean_diff_db >= -0.2);
    report(
        2,
        "HHO-AO parity at M=8, N=50",
        base_ok && large_ok,
        &format!(
            "Q=80,T=500 [{}] within 1 dB: {base_ok}; Q=200,T=1500 [{}] >= -0.2 dB: {large_ok}",
            diff_by_d(&base),
            diff_by_d(&large)
        ),
    );
    assert!(base_ok, "Q=80, T=500 mean HHO-AO outside 1 dB: {}", diff_by_d(&base));
    assert!(large_ok, "Q=200, T=1500 mean HHO-AO below -0.2 dB: {}", diff_by_d(&large));
}

#[test]
fn criterion_3_irs_benefit_grows_with_distance() {
    let _g = serial();
    let cfg = ExperimentConfig {
        d_list: DEFAULT_D_GRID.to_vec(),
        schemes: vec![Scheme::NoIrs, Scheme::Ao],
        ..ExperimentConfig::default()
    };
    let gain = difference_report(&sweep_distance(&cfg).unwrap(), Scheme::Ao, Scheme::NoIrs).unwrap();
    let at = |d: f64| gain.iter().find(|r| r.d_m == d).unwrap().mean_diff_db;
    let positive = gain.iter().all(|r| r.mean_diff_db > 0.0);
    let ordered = at(50.0) > at(25.0);
    report(
        3,
        "IRS gain over no-IRS positive and larger at d=50 than d=25",
        positive && ordered,
        &diff_by_d(&gain),
    );
    assert!(positive, "non-positive IRS gain: {}", diff_by_d(&gain));
    assert!(ordered, "gain at 50 m ({}) not above gain at 25 m ({})", at(50.0), at(25.0));
}

#[test]
fn criterion_4_convergence_profile() {
    let _g = serial();
    let cfg = ExperimentConfig {
        seeds: (0..5).collect(),
        q: 80,
        t: 1500,
        ..ExperimentConfig::default()
    };
    let mut details = Vec::new();
    let mut ok = true;
    for d in [25.0, 50.0] {
        let rows = convergence_run(&cfg, d).unwrap();
        let mut ratios = Vec::new();
        for &seed in &cfg.seeds {
            let trace: Vec<f64> = rows.iter().filter(|r| r.seed == seed).map(|r| r.best_fitness_w).collect();
            assert_eq!(trace.len(), 1500);
            let monotone = trace.windows(2).all(|w| w[1] >= w[0]);
            ok &= monotone;
            ratios.push(trace[499] / trace[1499]);
        }
        ratios.sort_by(f64::total_cmp);
        let median = ratios[ratios.len() / 2];
        ok &= median >= 0.9;
        details.push(format!("d={d}: median iter-500/final = {median:.4}"));
    }
    report(4, "monotone traces, most progress by iteration 500", ok, &details.join(", "));
    assert!(ok, "{}", details.join(", "));
}

#[test]
fn criterion_5_timing_is_linear_in_work() {
    let _g = serial();
    let cfg = ExperimentConfig {
        seeds: vec![0],
        ..ExperimentConfig::default()
    };
    let grid: Vec<(usize, usize)> = [40, 80, 160]
        .iter()
        .flat_map(|&q| [250, 500, 1000].map(move |t| (q, t)))
        .collect();
    let rows = timing_run(&cfg, &grid, 25.0, 3).unwrap();
    let x: Vec<f64> = rows.iter().map(|r| (r.q * r.t) as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.wall_time_s).collect();
    let (a, b, r2) = linear_fit_r2(&x, &y);
    let ok = r2 >= 0.9;
    report(5, "wall time linear in Q*T", ok, &format!("t = {a:.3e} + {b:.3e}*Q*T, R^2 = {r2:.4}"));
    assert!(ok, "R^2 = {r2}");
}

#[test]
fn criterion_6_optimizer_sanity() {
    let _g = serial();
    let r = hho_sanity(&SanityConfig {
        functions: vec![TestFunction::Sphere],
        ..SanityConfig::default()
    })
    .unwrap();
    let rate = r.success_rate(TestFunction::Sphere, 1e-6);

    let mut missing = Vec::new();
    for seed in 0..3 {
        let cfg = HhoConfig::new(30, 1000, Bounds::uniform(30, -100.0, 100.0).unwrap()).with_seed(seed);
        let run = HarrisHawks::new(cfg)
            .unwrap()
            .optimize(&|x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>(), &[])
            .unwrap();
        missing.extend(Branch::ALL.iter().filter(|&&b| run.branch_counts.get(b) == 0).map(|b| (seed, *b)));
    }
    let instance = build_instance(&ExperimentConfig::default(), 40.0, 0).unwrap();
    let run = run_hho(&instance, 10, 1000, hho_seed(40.0, 0), Default::default()).unwrap();
    missing.extend(Branch::ALL.iter().filter(|&&b| run.result.branch_counts.get(b) == 0).map(|b| (99, *b)));

    let ok = rate >= 0.95 && missing.is_empty() && r.all_monotone();
    report(
        6,
        "sphere convergence and branch coverage",
        ok,
        &format!("sphere success {:.0}%, branches never taken: {missing:?}", 100.0 * rate),
    );
    assert!(rate >= 0.95, "sphere success rate {rate}");
    assert!(missing.is_empty(), "branches never taken: {missing:?}");
    assert!(r.all_monotone());
}

#[test]
fn criterion_7_feasibility_and_penalty() {
    let _g = serial();
    let cfg = ExperimentConfig::default();
    let budget = cfg.p_ap_watts() * (1.0 + 1e-9);
    let mut worst_excess: f64 = 0.0;
    let mut fitness_err: f64 = 0.0;
    let mut penalty_err: f64 = 0.0;

    for (k, d) in [10.0, 25.0, 40.0, 51.0, 60.0].into_iter().enumerate() {
        let instance = build_instance(&cfg, d, k as u64).unwrap();
        let ch = &instance.channels;
        let p = instance.p_ap;

        let powers = [
            norm_sqr(&no_irs(ch, p).unwrap().w),
            norm_sqr(&alternating_optimize(ch, p, AoOptions::default()).unwrap().w),
            run_hho(&instance, 20, 100, hho_seed(d, k as u64), Default::default())
                .unwrap()
                .solution
                .transmit_power(),
        ];
        for tx in powers {
            worst_excess = worst_excess.max(tx / budget - 1.0);
        }

        let bounds = instance.search_bounds();
        let mut rng = substream(k as u64, &[7]);
        for _ in 0..200 {
            let x = bounds.sample(&mut rng);
            let mut enc = EncodedSolution::from_slice(&x, instance.m(), instance.n()).unwrap();
            let sol = decode(&x, instance.m(), instance.n()).unwrap();
            let raw = instance.received_power(&sol).unwrap();
            let tx = sol.transmit_power();
            let f = instance.fitness(&x).unwrap();
            if tx <= p {
                fitness_err = fitness_err.max((f - raw).abs());
            } else {
                penalty_err = penalty_err.max((f - raw + instance.mu * (tx - p)).abs());
                penalty_err = penalty_err.max((penalty(&sol.w, p, instance.mu) + instance.mu * (tx - p)).abs());
            }

            // same direction, rescaled to a random point inside the budget
            let scale = (rng.random::<f64>() * p / tx).sqrt();
            enc.psi.iter_mut().for_each(|v| *v *= scale);
            let y = enc.to_vec();
            let sol = decode(&y, instance.m(), instance.n()).unwrap();
            assert!(sol.transmit_power() <= p);
            let f = instance.fitness(&y).unwrap();
            fitness_err = fitness_err.max((f - instance.received_power(&sol).unwrap()).abs());
        }
    }
    let ok = worst_excess <= 0.0 && fitness_err == 0.0 && penalty_err <= 1e-12;
    report(
        7,
        "reported solutions feasible, penalty exact",
        ok,
        &format!(
            "max relative budget excess {worst_excess:.2e}, feasible fitness error {fitness_err:.1e}, \
             penalty error {penalty_err:.1e}"
        ),
    );
    assert!(worst_excess <= 0.0);
    assert_eq!(fitness_err, 0.0);
    assert!(penalty_err <= 1e-12);
}

fn run_cli(out: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_irs-hho"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("failed to launch irs-hho")
}

/// CSV text with the `wall_time_s` column removed.
fn without_timing(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let skip = header.iter().position(|h| *h == "wall_time_s");
    std::iter::once(header.join(","))
        .chain(lines.map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| Some(*i) != skip)
                .map(|(_, f)| f)
                .collect::<Vec<_>>()
                .join(",")
        }))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn criterion_8_cli_output_is_reproducible() {
    let _g = serial();
    let small = ["--seeds", "0..3", "--d-list", "20,51", "--pop", "10", "--iters", "40"];
    let commands: Vec<(Vec<&str>, String)> = vec![
        ([&small[..], &["sweep"]].concat(), "sweep.csv".into()),
        ([&small[..], &["diff"]].concat(), "diff_hho_minus_ao.csv".into()),
        ([&small[..], &["converge", "--d", "30"]].concat(), "converge_d30.csv".into()),
        (
            [&small[..], &["timing", "--pop-grid", "4,8", "--iter-grid", "10,20"]].concat(),
            "timing.csv".into(),
        ),
        (
            vec!["--pop", "10", "--iters", "50", "oracle", "--n-list", "2,3", "--instances", "3", "--hho-seeds", "0..3"],
            "oracle.csv".into(),
        ),
        (vec!["--seeds", "0..3", "--iters", "50", "sanity", "--dim", "5"], "sanity.csv".into()),
    ];

    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut mismatched = Vec::new();
    for (args, file) in &commands {
        for dir in &dirs {
            let out = run_cli(dir.path(), args);
            let code = out.status.code();
            assert!(
                matches!(code, Some(0) | Some(3)),
                "{args:?} exited with {code:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
        }
        if without_timing(&dirs[0].path().join(file)) != without_timing(&dirs[1].path().join(file)) {
            mismatched.push(file.clone());
        }
    }
    let ok = mismatched.is_empty();
    report(
        8,
        "identical CSV on rerun for every subcommand",
        ok,
        &format!("{} commands, mismatched: {mismatched:?}", commands.len()),
    );
    assert!(ok, "outputs differ between reruns: {mismatched:?}");
}
