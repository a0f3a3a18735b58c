//! Scratch probe for calibration runs (not part of the deliverable surface).

use owl_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn example35() {
    let a = DenseMatrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
    let y = DenseMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);

    // Fixed gamma = 0 from the pseudo-inverse solution, alpha = 1e-4.
    let z0 = {
        let svd = compact_svd(&a, 1e-12).unwrap();
        let mut uty = svd.u.tr_mul(&y);
        for (i, mut row) in uty.row_iter_mut().enumerate() {
            row /= svd.sigma[i];
        }
        svd.vt.tr_mul(&uty)
    };
    // Perturb away from the symmetric stationary point at the pseudo-inverse.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let z0 = &z0
        + DenseMatrix::from_fn(3, 2, |_, _| {
            1e-3 * rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
    println!("z0 = {z0}");
    let opn = op_norm(&a);
    let mut cfg = SolverConfig::new(0.0, 1e-4, 1.0 / (opn * opn));
    cfg.r_tol = 1e-10;
    cfg.max_iter = 100000;
    let rpt = solve_fixed(&a, &y, &z0, &cfg).unwrap();
    println!(
        "fixed gamma=0: iters={} term={:?} fit={:.3e}\nZ={}",
        rpt.iterations, rpt.termination, rpt.fit_final, rpt.z_final
    );

    // Continuation from scratch.
    let cfg = SolverConfig::for_problem(1.0, &a, &y);
    let rpt = solve_continuation(&a, &y, 1e-8, &cfg, 0.9, 1.1, 0.1, 4).unwrap();
    println!(
        "continuation: iters={} term={:?} fit={:.3e} gammas={:?} alphas(len {})\nZ={}",
        rpt.iterations,
        rpt.termination,
        rpt.fit_final,
        rpt.gamma_trace,
        rpt.alpha_trace.len(),
        rpt.z_final
    );
}

fn stationarity_calibration() {
    println!("--- stationarity at tolerance termination ---");
    for seed in 0..5u64 {
        let spec = SynthSpec {
            n: 40,
            m: 20,
            k: 6,
            s: 6,
            r: 6,
            noise_norm: 0.0,
            trials: 1,
            seed,
        };
        let a = gen_dictionary(spec.m, spec.n, mix_seed(seed, 1, 0));
        let (x, _sup) = gen_signal(&spec, mix_seed(seed, 2, 0)).unwrap();
        let y = &a * &x;
        for rtol in [1e-6, 1e-4, 1e-2] {
            let mut cfg = SolverConfig::for_problem(0.5, &a, &y);
            cfg.alpha *= 0.01;
            cfg.sigma_max *= 0.01;
            cfg.r_tol = rtol;
            cfg.max_iter = 20000;
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 77);
            let z0 = init_z0(&a, &y, InitMode::LsqFullRank, 1e-10, &mut rng);
            let rpt = solve_fixed(&a, &y, &z0, &cfg).unwrap();
            let st = stationarity(&rpt.z_final, &a, &y, cfg.alpha, 0.5, 1e-12).unwrap();
            let j = rpt.j_trace.last().copied().unwrap_or(f64::NAN);
            println!(
                "seed={seed} rtol={rtol:.0e} iters={:4} term={:?} J={j:.4} res={:.3e} slack={:.3e} bound(10*rtol*J)={:.3e}",
                rpt.iterations, rpt.termination, st.nonzero_residual, st.zero_slack, 10.0*rtol*j
            );
        }
    }
}

fn rank_sweep_probe() {
    println!("--- desk-scale rank sweep ---");
    let spec = SynthSpec {
        n: 64,
        m: 26,
        k: 15,
        s: 15,
        r: 15,
        noise_norm: 0.0,
        trials: 10,
        seed: 7,
    };
    let tmpl = SolverConfig::new(1.0, 1.0, 1.0);
    let cont = ContinuationParams::default();
    let start = Instant::now();
    let res = run_sweep(&spec, &SweepKind::Rank(vec![1, 5, 10, 15]), &tmpl, &cont).unwrap();
    for row in &res.rows {
        println!(
            "r={:2} rate={:.2} rmse={:.3e} iters={:.0} time={:.2}s",
            row.sweep_value, row.recovery_rate, row.mean_rmse, row.mean_iters, row.mean_time
        );
    }
    for t in res.trials.iter().filter(|t| !t.success) {
        println!(
            "  miss: r={} trial={} term={:?} rmse={:.2e}",
            t.sweep_value, t.trial, t.termination, t.rmse
        );
    }
    println!("sweep wall time {:.1}s", start.elapsed().as_secs_f64());
}

fn noisy_probe() {
    println!("--- noisy discrepancy behavior ---");
    let spec = SynthSpec {
        n: 64,
        m: 32,
        k: 10,
        s: 10,
        r: 10,
        noise_norm: 0.1,
        trials: 10,
        seed: 3,
    };
    let tmpl = SolverConfig::new(1.0, 1.0, 1.0);
    let cont = ContinuationParams::default();
    let start = Instant::now();
    let res = run_sweep(&spec, &SweepKind::Rank(vec![10]), &tmpl, &cont).unwrap();
    for row in &res.rows {
        println!(
            "r={} rate={:.2} rmse={:.3e} iters={:.0} time={:.2}s",
            row.sweep_value, row.recovery_rate, row.mean_rmse, row.mean_iters, row.mean_time
        );
    }
    println!("noisy wall time {:.1}s", start.elapsed().as_secs_f64());
    for t in &res.trials {
        println!(
            "  trial={} success={} term={:?}",
            t.trial, t.success, t.termination
        );
    }
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    match which.as_str() {
        "ex35" => example35(),
        "stat" => stationarity_calibration(),
        "rank" => rank_sweep_probe(),
        "noisy" => noisy_probe(),
        "t1" => single_trial(1),
        "t5" => single_trial(5),
        "t10" => single_trial(10),
        "t15" => single_trial(15),
        _ => {
            example35();
            stationarity_calibration();
        }
    }
}

fn single_trial(r: usize) {
    let spec = SynthSpec {
        n: 64, m: 26, k: 15, s: 15, r,
        noise_norm: 0.0, trials: 1, seed: 7,
    };
    let tmpl = SolverConfig::new(1.0, 1.0, 1.0);
    let cont = ContinuationParams::default();
    let seed = mix_seed(spec.seed, r as u64, 0);
    let start = Instant::now();
    let (rec, rpt) = run_trial(&spec, &tmpl, &cont, seed).unwrap();
    println!(
        "r={r}: success={} iters={} time={:.2}s term={:?} probes={} segs={}",
        rec.success, rec.iterations, start.elapsed().as_secs_f64(),
        rec.termination, rpt.alpha_trace.len(), rpt.segments.len()
    );
    let mut per_gamma: Vec<(f64, usize, usize)> = Vec::new();
    for seg in &rpt.segments {
        if let Some(last) = per_gamma.last_mut() {
            if last.0 == seg.gamma {
                last.1 += seg.len;
                last.2 += 1;
                continue;
            }
        }
        per_gamma.push((seg.gamma, seg.len, 1));
    }
    for (g, iters, probes) in per_gamma {
        println!("  gamma={g:.4} iters={iters} probes={probes}");
    }
}
