//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use fragsim::experiment::config::LoadedRun;
use fragsim::experiment::{runner, scenarios};
use fragsim::policies::{NnaTrigger, OptimalPolicy};
use fragsim::{
    apply_migration, brute_force_stationary, fixtures, run, symmetric_spec, threshold_stationary,
    topology, AccessEvent, AllocationPolicy, ChainParams, DecisionLogMode, FragmentId,
    FragmentSpec, Placement, PolicyConfig, SimConfig, SiteId, WorkloadSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEED: u64 = 1;

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn threshold_run(n: usize, x_s: f64, t: u64, accesses: u64, seed: u64) -> SimConfig {
    SimConfig {
        topology: topology::complete(n),
        fragments: vec![FragmentSpec {
            size: 1.0,
            owner: SiteId(0),
        }],
        policy: PolicyConfig::Threshold { t },
        workload: WorkloadSpec::uniform_rate(
            n,
            1,
            symmetric_spec(n, x_s, SiteId(0)).unwrap(),
            seed,
        ),
        num_steps: accesses,
        designated: SiteId(0),
        per_hop_latency: 1.0,
        migration_blocking: false,
        log_mode: DecisionLogMode::MovesOnly,
    }
}

fn o_s_hat(cfg: &SimConfig) -> f64 {
    run(cfg).unwrap().o_s_hat
}

fn oracle(n: usize, x_s: f64, t: usize) -> f64 {
    threshold_stationary(&ChainParams::new(n, x_s, t).unwrap())
        .unwrap()
        .o_s
}

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn c1_slope_one() -> Outcome {
    let worst = (1..=9)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 / 10.0;
            (
                x,
                (o_s_hat(&threshold_run(5, x, 0, 200_000, SEED)) - x).abs(),
            )
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    (
        worst.1 <= 0.02,
        format!("max |o_s_hat - x_s| = {:.5} at x_s = {}", worst.1, worst.0),
    )
}

fn c2_symmetry_pin() -> Outcome {
    let devs: Vec<(u64, f64)> = [0u64, 1, 3, 5, 10]
        .par_iter()
        .map(|&t| {
            (
                t,
                (o_s_hat(&threshold_run(5, 0.2, t, 200_000, SEED)) - 0.2).abs(),
            )
        })
        .collect();
    let worst = devs
        .iter()
        .cloned()
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    (
        worst.1 <= 0.02,
        format!("max |o_s_hat - 0.2| = {:.5} at t = {}", worst.1, worst.0),
    )
}

fn c3_convergence() -> Outcome {
    let curve = |x: f64| (0..=30).map(|t| oracle(5, x, t)).collect::<Vec<_>>();
    let up = [0.24, 0.28]
        .iter()
        .all(|&x| curve(x).windows(2).all(|w| w[1] >= w[0]));
    let down = [0.12, 0.16]
        .iter()
        .all(|&x| curve(x).windows(2).all(|w| w[1] <= w[0]));
    let hi = oracle(5, 0.28, 30);
    let lo = oracle(5, 0.12, 30);
    (
        up && down && hi >= 0.95 && lo <= 0.05,
        format!(
            "rising {up}, falling {down}, o_s(0.28, 30) = {hi:.5} (need >= 0.95), o_s(0.12, 30) = {lo:.5} (need <= 0.05)"
        ),
    )
}

fn c4_oracle_agreement() -> Outcome {
    let mut grid = Vec::new();
    for n in [3usize, 5, 8] {
        for x in [0.1, 1.0 / n as f64, 0.4] {
            for t in [0usize, 2, 5] {
                grid.push((n, x, t));
            }
        }
    }
    let worst = grid
        .par_iter()
        .map(|&(n, x, t)| {
            let d =
                (o_s_hat(&threshold_run(n, x, t as u64, 1_000_000, SEED)) - oracle(n, x, t)).abs();
            (d, format!("n={n} x_s={x:.4} t={t}"))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, String::new()), |a, b| if b.0 > a.0 { b } else { a });
    (
        worst.0 <= 0.01,
        format!(
            "{} cells, max deviation {:.5} at {}",
            grid.len(),
            worst.0,
            worst.1
        ),
    )
}

fn c5_lumping() -> Outcome {
    let mut worst = 0.0f64;
    let mut cells = 0;
    for n in 2..=6 {
        for t in 0..=4 {
            for i in 0..=10 {
                let p = ChainParams::new(n, i as f64 / 10.0, t).unwrap();
                let d = (threshold_stationary(&p).unwrap().o_s
                    - brute_force_stationary(&p).unwrap().o_s)
                    .abs();
                worst = worst.max(d);
                cells += 1;
            }
        }
    }
    (
        worst <= 1e-9,
        format!("{cells} cells, max difference {worst:.2e}"),
    )
}

fn c6_optimal_ownership() -> Outcome {
    let runs: Vec<Result<u64, String>> = (0..8u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
            let n = rng.gen_range(2..=8);
            let g = common::seeded_graph(seed, n, 4);
            let t = g.build();
            let frags = 3;
            let weights: Vec<Vec<f64>> = (0..frags)
                .map(|_| (0..n).map(|_| rng.gen::<f64>()).collect())
                .collect();
            let mut policy = OptimalPolicy::new(frags, n, None);
            let mut placement = Placement::new((0..frags).map(|f| SiteId(f % n)).collect());
            let mut model = vec![vec![0u64; n]; frags];
            let events = 1_000_000u64;
            for step in 0..events {
                let f = rng.gen_range(0..frags);
                let total: f64 = weights[f].iter().sum();
                let mut u = rng.gen::<f64>() * total;
                let r = weights[f]
                    .iter()
                    .position(|&w| {
                        u -= w;
                        u < 0.0
                    })
                    .unwrap_or(n - 1);
                let (fid, req) = (FragmentId(f), SiteId(r));
                let owner = placement.owner(fid).unwrap();
                let owner_before = model[f][owner.0];
                model[f][r] += 1;
                let ev = AccessEvent {
                    step,
                    fragment: fid,
                    requester: req,
                };
                let d = policy.on_access(&placement, &t, &ev).unwrap();
                let moved = apply_migration(&mut placement, d.action, &mut policy).unwrap();
                if moved.is_some() != (req != owner && model[f][r] > owner_before) {
                    return Err(format!(
                        "seed {seed} step {step}: migration without strict dominance"
                    ));
                }
                let o = placement.owner(fid).unwrap();
                if model[f][o.0] != *model[f].iter().max().unwrap() {
                    return Err(format!(
                        "seed {seed} step {step}: owner counter below row maximum"
                    ));
                }
            }
            Ok(events)
        })
        .collect();
    match runs.iter().find_map(|r| r.as_ref().err()) {
        Some(e) => (false, e.clone()),
        None => (
            true,
            format!("{} runs x 10^6 events, no violation", runs.len()),
        ),
    }
}

fn c7_fig3_trace() -> Outcome {
    let run = LoadedRun::load(&fixtures_dir().join("fig3_nna.json")).unwrap();
    let m = runner::run_single(&run, None, DecisionLogMode::MovesOnly)
        .unwrap()
        .metrics;
    let mut trace = vec!['A'];
    trace.extend(
        m.decision_log
            .iter()
            .filter_map(|r| r.decision.dest())
            .map(fixtures::fig3_label),
    );
    let head: String = trace.iter().take(4).collect();
    (
        head == "ACBG",
        format!("trace begins {}", trace.iter().take(8).collect::<String>()),
    )
}

fn c8_nna_hop_law() -> Outcome {
    let results: Vec<Result<u64, String>> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(2_000 + seed);
            let n = rng.gen_range(3..=8);
            let g = common::seeded_graph(500 + seed, n, 4);
            let t = g.build();
            let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.05).collect();
            let total: f64 = raw.iter().sum();
            let cfg = SimConfig {
                topology: t.clone(),
                fragments: (0..2)
                    .map(|f| FragmentSpec {
                        size: 1.0,
                        owner: SiteId(f % n),
                    })
                    .collect(),
                policy: PolicyConfig::Nna {
                    trigger: NnaTrigger::OptimalDominance,
                    counter_cap: None,
                },
                workload: WorkloadSpec::uniform_rate(
                    n,
                    2,
                    raw.iter().map(|x| x / total).collect(),
                    seed,
                ),
                num_steps: 50_000,
                designated: SiteId(0),
                per_hop_latency: 1.0,
                migration_blocking: false,
                log_mode: DecisionLogMode::MovesOnly,
            };
            let m = run(&cfg).unwrap();
            for r in &m.decision_log {
                let dest = r.decision.dest().unwrap();
                let h = r.target.ok_or("move without a recorded target")?;
                let Some(w) = t.link_weight(r.owner_before, dest) else {
                    return Err(format!(
                        "topology {seed}: {} -> {dest} is not a link",
                        r.owner_before
                    ));
                };
                if t.distance(dest, h) != &(t.distance(r.owner_before, h) - w) {
                    return Err(format!(
                        "topology {seed}: {} -> {dest} is off every shortest path to {h}",
                        r.owner_before
                    ));
                }
            }
            Ok(m.accesses_total)
        })
        .collect();
    match results.iter().find_map(|r| r.as_ref().err()) {
        Some(e) => (false, e.clone()),
        None => {
            let events: u64 = results.iter().map(|r| *r.as_ref().unwrap()).sum();
            (
                true,
                format!("{events} events on 20 topologies, every migration on a shortest path"),
            )
        }
    }
}

fn c9_fna_oscillation() -> Outcome {
    let run = LoadedRun::load(&fixtures_dir().join("oscillation.json")).unwrap();
    let policies = scenarios::oscillation_policies();
    let trials: Vec<(u64, u64)> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let rows =
                runner::compare(&run, &policies, Some(run.config.workload.seed + i)).unwrap();
            (rows[0].migrations, rows[1].migrations)
        })
        .collect();
    let wins = trials.iter().filter(|(nna, fna)| fna < nna).count();
    let (sn, sf) = trials.iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    (
        wins >= 95,
        format!(
            "fna < nna in {wins}/100 trials (need >= 95); mean migrations nna {:.1}, fna {:.1}",
            sn as f64 / 100.0,
            sf as f64 / 100.0
        ),
    )
}

fn c10_determinism() -> Outcome {
    let outputs = || {
        let metrics = runner::run_single(
            &LoadedRun::from_config(
                serde_json::from_value(scenarios::fig1_sweep(0).base).unwrap(),
                fixtures_dir(),
            ),
            None,
            DecisionLogMode::All,
        )
        .unwrap();
        let fig3 = runner::run_single(
            &LoadedRun::load(&fixtures_dir().join("fig3_nna.json")).unwrap(),
            None,
            DecisionLogMode::All,
        )
        .unwrap();
        let mut sweep = scenarios::fig1_sweep(3);
        sweep.base["num_steps"] = 20_000.into();
        let sweep_rows = runner::run_sweep(&sweep, &fixtures_dir(), None).unwrap();
        let osc = LoadedRun::load(&fixtures_dir().join("oscillation.json")).unwrap();
        let cmp = runner::compare(&osc, &scenarios::oscillation_policies(), None).unwrap();
        let grid =
            runner::oracle_grid(5, &[0.12, 0.2, 0.28], &(0..=30).collect::<Vec<_>>()).unwrap();
        vec![
            metrics.metrics_csv(),
            metrics.decisions_csv(),
            fig3.decisions_csv(),
            runner::sweep_csv(&sweep_rows),
            runner::compare_csv(&cmp),
            runner::oracle_csv(&grid),
        ]
    };
    let a = outputs();
    let b = outputs();
    let bytes: usize = a.iter().map(Vec::len).sum();
    (
        a == b,
        format!(
            "{} CSV outputs, {bytes} bytes, identical: {}",
            a.len(),
            a == b
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("slope-one residency at t = 0", c1_slope_one),
        (
            "residency pinned at 0.2 under a symmetric workload",
            c2_symmetry_pin,
        ),
        (
            "oracle convergence directions and endpoints",
            c3_convergence,
        ),
        ("oracle vs simulation agreement", c4_oracle_agreement),
        ("lumped vs unlumped chain", c5_lumping),
        ("optimal ownership property", c6_optimal_ownership),
        ("NNA walkthrough trace on the fig3 fixture", c7_fig3_trace),
        ("NNA hop law", c8_nna_hop_law),
        (
            "FNA migrates less than NNA under oscillation",
            c9_fna_oscillation,
        ),
        ("byte-identical reruns", c10_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = check();
        println!(
            "criterion {:>2} {}: {name}: {detail} [{:.1}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        if !ok {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
