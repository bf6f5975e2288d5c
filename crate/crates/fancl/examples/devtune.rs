use fancl::bench::metrics::{nmse_completion, rank_of};
use fancl::bench::synthetic::gen_synth_completion;
use fancl::bench::tuning::{spec_for, tune_lambda_completion};
use fancl::regularizers::RegKind;
use fancl::solver::{fancl_solve, SolverConfig};
use std::time::Instant;

fn kind_of(name: &str) -> RegKind {
    match name {
        "nuclear" => RegKind::Nuclear,
        "capped" => RegKind::CappedL1,
        "lsp" => RegKind::Lsp,
        "tnn" => RegKind::Tnn,
        "scad" => RegKind::Scad,
        "mcp" => RegKind::Mcp,
        _ => panic!("unknown kind {name}"),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args[0].as_str() {
        // trace <seed> <kind> <lambda> <nu> <theta|-> [max_iters] [lambda0_mult]
        "trace" => {
            let seed: u64 = args[1].parse().unwrap();
            let kind = kind_of(&args[2]);
            let lambda: f64 = args[3].parse().unwrap();
            let nu: f64 = args[4].parse().unwrap();
            let theta: Option<f64> = match args.get(5).map(String::as_str) {
                None | Some("-") => None,
                Some(s) => Some(s.parse().unwrap()),
            };
            let (train, valid, truth) = gen_synth_completion(500, 5, 0.1, seed).unwrap();
            let train = if std::env::var("FULL_DATA").is_ok() {
                fancl::problems::CompletionProblem::new(truth.observed.clone()).unwrap()
            } else {
                train
            };
            let spec = spec_for(kind, lambda, theta).unwrap();
            let mut cfg = SolverConfig::for_lambda(lambda);
            cfg.nu = nu;
            cfg.seed = seed;
            cfg.max_iters = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(500);
            if let Some(mult) = args.get(7) {
                cfg.lambda0 = mult.parse::<f64>().unwrap() * lambda;
            }
            let t0 = Instant::now();
            match fancl_solve(&train, &spec, &cfg) {
                Ok((x, rep)) => {
                    let nmse = nmse_completion(&x, &truth, &truth.observed).unwrap();
                    eprintln!(
                        "kind={kind:?} lambda={lambda} nu={nu} theta={:.3}: rank={} nmse={:.5} iters={} conv={} in {:.1?}",
                        spec.theta,
                        rank_of(&x),
                        nmse,
                        rep.per_iteration.len(),
                        rep.final_metrics["converged"],
                        t0.elapsed()
                    );
                    let d = &x.d;
                    let show = d.len().min(8);
                    eprintln!("  sigma head: {:?}", &d[..show]);
                    if d.len() > 5 {
                        eprintln!("  sigma5={:.3} sigma6={:.3}", d[4], d[5]);
                    }
                    for r in rep.per_iteration.iter().step_by(25) {
                        eprintln!(
                            "  t={:<4} rank={:<4} obj={:<14.3} dsq={:.3e}",
                            r.t, r.rank, r.objective, r.delta_sq
                        );
                    }
                    let _ = valid;
                }
                Err(e) => eprintln!("FAILED: {e}"),
            }
        }
        // pipeline <seed> <kind> [nu]
        "pipeline" => {
            let seed: u64 = args[1].parse().unwrap();
            let kind = kind_of(&args[2]);
            let nu: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0.98);
            let (train, valid, truth) = gen_synth_completion(500, 5, 0.1, seed).unwrap();
            let full = fancl::problems::CompletionProblem::new(truth.observed.clone()).unwrap();
            let mut base = SolverConfig::for_lambda(1.0);
            base.seed = seed;
            base.nu = nu;
            base.max_iters = 2000;
            let t1 = Instant::now();
            match tune_lambda_completion(&train, &valid, kind, None, &base) {
                Ok(out) => {
                    eprintln!(
                        "tuned lambda={:.4} rmse={:.5} in {:.1?}",
                        out.lambda,
                        out.validation_rmse,
                        t1.elapsed()
                    );
                    for g in &out.grid {
                        eprintln!(
                            "  grid lambda={:<12.4} rank={:<4} rmse={:.5}",
                            g.lambda, g.rank, g.validation_rmse
                        );
                    }
                    for mult in [1.0, 2.0] {
                        let lambda = mult * out.lambda;
                        let spec = spec_for(kind, lambda, None).unwrap();
                        let cfg = SolverConfig {
                            lambda,
                            lambda0: 50.0 * lambda,
                            ..base.clone()
                        };
                        let t2 = Instant::now();
                        match fancl_solve(&full, &spec, &cfg) {
                            Ok((x, rep)) => {
                                let nmse = nmse_completion(&x, &truth, &truth.observed).unwrap();
                                eprintln!(
                                    "final x{mult}: lambda={lambda:.4} rank={} nmse={:.5} iters={} conv={} in {:.1?}",
                                    rank_of(&x),
                                    nmse,
                                    rep.per_iteration.len(),
                                    rep.final_metrics["converged"],
                                    t2.elapsed()
                                );
                            }
                            Err(e) => eprintln!("final x{mult} FAILED: {e}"),
                        }
                    }
                }
                Err(e) => eprintln!("tune FAILED: {e}"),
            }
        }
        // bench <seed> <kind>
        "bench" => {
            let seed: u64 = args[1].parse().unwrap();
            let kind = kind_of(&args[2]);
            let t0 = Instant::now();
            match fancl::bench::protocol::run_completion_bench(500, 5, 0.1, seed, kind, None) {
                Ok(run) => {
                    let iters = run.report.per_iteration.len();
                    let conv = &run.report.final_metrics["converged"];
                    eprintln!(
                        "seed={seed} {kind:?}: lambda={:.4} nmse={:.5} rank={} iters={iters} conv={conv} total={:.1?}",
                        run.lambda, run.nmse, run.rank, t0.elapsed()
                    );
                    if let Some(t) = run.tuning {
                        for g in &t.grid {
                            eprintln!(
                                "  grid lambda={:.4} rmse={:.4} rank={}",
                                g.lambda, g.validation_rmse, g.rank
                            );
                        }
                    }
                }
                Err(e) => eprintln!("seed={seed} {kind:?}: FAILED {e}"),
            }
        }
        // rpca <seed> [nu] [lambda_scale] [beta_scale]
        "rpca" => {
            let seed: u64 = args[1].parse().unwrap();
            let nu: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.95);
            let (o, truth) = fancl::bench::synthetic::gen_synth_rpca(500, 0.1, seed).unwrap();
            let inf = o.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
            eprintln!("inf_norm={inf:.2}");
            let only: Option<RegKind> = args.get(5).map(|s| kind_of(s));
            for kind in [RegKind::CappedL1, RegKind::Lsp, RegKind::Tnn, RegKind::Nuclear] {
                if only.is_some_and(|k| k != kind) {
                    continue;
                }
                let (mut lambda, mut beta) = fancl::bench::tuning::rpca_default_weights(&o, kind);
                if let Some(ls) = args.get(3) {
                    if ls != "-" {
                        lambda = ls.parse::<f64>().unwrap() * inf;
                    }
                }
                if let Some(bs) = args.get(4) {
                    if bs != "-" {
                        beta = bs.parse::<f64>().unwrap() * inf;
                    }
                }
                let spec = spec_for(kind, lambda, None).unwrap();
                let mut cfg = SolverConfig::for_lambda(lambda);
                cfg.nu = nu;
                cfg.seed = seed;
                cfg.max_iters = std::env::var("RPCA_ITERS")
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .unwrap_or(1000);
                cfg.beta = Some(beta);
                let prob = fancl::problems::RpcaProblem::new(o.clone(), lambda, beta).unwrap();
                let t0 = Instant::now();
                match fancl::solver::fancl_rpca_solve(&prob, &spec, &cfg) {
                    Ok((x, y, rep)) => {
                        let nmse = fancl::bench::metrics::nmse_rpca(&x, &y, &truth).unwrap();
                        let acc =
                            fancl::bench::metrics::support_accuracy(&y, &truth.corruption).unwrap();
                        eprintln!(
                            "  {kind:?}: rank={} support={:.6} nmse={:.6} ynnz={} iters={} conv={} in {:.1?}",
                            rank_of(&x),
                            acc,
                            nmse,
                            y.nnz(),
                            rep.per_iteration.len(),
                            rep.final_metrics["converged"],
                            t0.elapsed()
                        );
                        if std::env::var("RPCA_TRACE").is_ok() {
                            for r in rep.per_iteration.iter().take(30) {
                                eprintln!(
                                    "    t={} rank={} khat={} restarts={} dsq={:.3e} obj={:.1}",
                                    r.t, r.rank, r.k_hat, r.restarts, r.delta_sq, r.objective
                                );
                            }
                            let d: Vec<String> =
                                x.d.iter().take(8).map(|v| format!("{v:.1}")).collect();
                            eprintln!("    sigma head: {}", d.join(" "));
                        }
                    }
                    Err(e) => eprintln!("  {kind:?}: FAILED: {e}"),
                }
            }
        }
        other => panic!("unknown mode {other}"),
    }
}
