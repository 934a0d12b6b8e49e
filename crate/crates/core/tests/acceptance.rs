//! End-to-end acceptance checks. Runs every criterion, prints one line per
//! criterion and exits nonzero if any failed.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};

use polybound::bounds::{self, EnsembleKind};
use polybound::cli::{self, BoundArgs, Ensemble, ProbArgs, DEFAULT_SEED};
use polybound::kac;
use polybound::montecarlo::{self, run_trial, SimConfig};
use polybound::specfun::{abs_cauchy_ratio_cdf, erf, erfinv};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn monic_lower_checkpoint() -> Outcome {
    let t = cli::cmd_prob(&ProbArgs {
        ensemble: Ensemble::Monic,
        n: 5,
        c: 2.0,
    })
    .map_err(|e| e.to_string())?;
    let lower = t.value("p_lower").unwrap();
    check((0.146..=0.150).contains(&lower), format!("p_lower(2, 5) = {lower:.6}"))
}

fn inverse_checkpoint() -> Outcome {
    let t = cli::cmd_bound(&BoundArgs {
        ensemble: Ensemble::Monic,
        n: 100_000,
        p: 0.99,
    })
    .map_err(|e| e.to_string())?;
    let r = t.value("radius").unwrap();
    check((6.31..=6.35).contains(&r), format!("radius = {r:.6}"))
}

fn monic_five_run() -> Result<montecarlo::EmpiricalSummary, String> {
    montecarlo::estimate_bound_probability(&SimConfig {
        ensemble: EnsembleKind::MonicNormal,
        degree: 5,
        trials: 100_000,
        seed: DEFAULT_SEED,
        c_grid: vec![2.0, 3.0],
    })
    .map_err(|e| e.to_string())
}

fn mc_checkpoint(summary: &montecarlo::EmpiricalSummary, idx: usize, lo: f64, hi: f64) -> Outcome {
    let r = summary.rows[idx];
    check(
        (lo..=hi).contains(&r.probability),
        format!(
            "P(max|z| <= {}) = {:.5} ± {:.5}, wanted [{lo}, {hi}]",
            r.c, r.probability, r.se
        ),
    )
}

fn sandwich_grid() -> Vec<f64> {
    (1..=16).map(|k| 1.0 + 0.25 * k as f64).collect()
}

fn sandwich_suite() -> Outcome {
    let mut violations = Vec::new();
    for n in [2usize, 5, 10] {
        let s = montecarlo::estimate_bound_probability(&SimConfig {
            ensemble: EnsembleKind::MonicNormal,
            degree: n,
            trials: 50_000,
            seed: DEFAULT_SEED,
            c_grid: sandwich_grid(),
        })
        .map_err(|e| e.to_string())?;
        for r in &s.rows {
            let lower = bounds::monic_lower_prob(r.c, n as u64).unwrap().value();
            let upper = bounds::monic_upper_prob(r.c, n as u64).unwrap().value();
            if lower - 3.0 * r.se > r.probability || r.probability > upper + 3.0 * r.se {
                violations.push(format!("n={n} c={}", r.c));
            }
        }
    }
    check(
        violations.is_empty(),
        format!("48 grid points, violations: {violations:?}"),
    )
}

fn general_suite() -> Outcome {
    let mut violations = Vec::new();
    for n in [2usize, 5] {
        let s = montecarlo::estimate_bound_probability(&SimConfig {
            ensemble: EnsembleKind::GeneralNormal,
            degree: n,
            trials: 50_000,
            seed: DEFAULT_SEED,
            c_grid: sandwich_grid(),
        })
        .map_err(|e| e.to_string())?;
        for r in &s.rows {
            let lower = bounds::general_lower_prob(r.c, n as u64).unwrap().value();
            if lower - 3.0 * r.se > r.probability {
                violations.push(format!("n={n} c={}", r.c));
            }
        }
    }
    check(
        violations.is_empty(),
        format!("32 grid points, violations: {violations:?}"),
    )
}

fn kac_exactness() -> Outcome {
    let one = kac::kac_integral(1, kac::DEFAULT_TOL).map_err(|e| e.to_string())?;
    let mut ok = (one.value - 1.0).abs() <= 1e-8;
    let mut detail = format!("I(1) = {:.12}", one.value);
    for n in [2u64, 5, 10] {
        let exact = kac::kac_integral(n, kac::DEFAULT_TOL).map_err(|e| e.to_string())?;
        let mc = kac::mc_real_roots(n, 100_000, DEFAULT_SEED).map_err(|e| e.to_string())?;
        let z = (mc.value - exact.value) / mc.error_indicator;
        ok &= z.abs() <= 3.0;
        detail += &format!("; n={n}: I={:.6} mc={:.5} z={z:+.2}", exact.value, mc.value);
    }
    check(ok, detail)
}

fn asymptotic_consistency() -> Outcome {
    let mut gaps = Vec::new();
    for n in [25u64, 50, 100, 200] {
        let i = kac::kac_integral(n, kac::DEFAULT_TOL).map_err(|e| e.to_string())?;
        let a = kac::kac_asymptotic(n).map_err(|e| e.to_string())?;
        gaps.push((i.value - a.value).abs());
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    check(
        gaps[2] <= 0.01 && decreasing,
        format!(
            "|I - A| at 25, 50, 100, 200: {}",
            gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn per_trial_invariants() -> Outcome {
    let (mut cauchy, mut vieta, mut parity, mut failures) = (0, 0, 0, 0);
    let mut worst_vieta = 0.0f64;
    for i in 0..100_000u64 {
        let ensemble = if i % 2 == 0 {
            EnsembleKind::MonicNormal
        } else {
            EnsembleKind::GeneralNormal
        };
        let n = 1 + (i / 2 % 30) as usize;
        let t = match run_trial(ensemble, n, DEFAULT_SEED, i) {
            Ok(t) => t,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let p = &t.polynomial;
        let bound = match ensemble {
            EnsembleKind::MonicNormal => p.cauchy_bound_monic().unwrap(),
            EnsembleKind::GeneralNormal => p.cauchy_bound_general(),
        };
        if t.roots.max_modulus() > bound {
            cauchy += 1;
        }
        let c = p.coefficients();
        let log_ratio = (c[0] / p.leading()).abs().ln();
        let rel = (t.roots.log_modulus_product() - log_ratio).exp_m1().abs();
        worst_vieta = worst_vieta.max(rel);
        if rel > 1e-6 {
            vieta += 1;
        }
        if t.roots.real_count() % 2 != n % 2 {
            parity += 1;
        }
    }
    check(
        cauchy == 0 && vieta == 0 && parity == 0 && failures == 0,
        format!(
            "violations: cauchy {cauchy}, vieta {vieta} (worst rel {worst_vieta:.1e}), \
             parity {parity}; failed trials {failures}"
        ),
    )
}

fn unit_disk_symmetry() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [1usize, 4, 9] {
        let u = montecarlo::unit_disk_count(n, 100_000, DEFAULT_SEED).map_err(|e| e.to_string())?;
        let z = (u.mean_inside - n as f64 / 2.0) / u.se_inside;
        ok &= z.abs() <= 3.0;
        detail.push(format!("n={n}: {:.4} (z={z:+.2})", u.mean_inside));
    }
    check(ok, detail.join("; "))
}

fn circular_law() -> Outcome {
    let roots = montecarlo::root_cloud(1000, 20, DEFAULT_SEED).map_err(|e| e.to_string())?;
    let near = roots.iter().filter(|z| (0.8..=1.25).contains(&z.norm())).count();
    let frac = near as f64 / roots.len() as f64;
    check(frac >= 0.9, format!("{near} of {} roots in [0.8, 1.25] ({frac:.4})", roots.len()))
}

fn sweep_shape() -> Outcome {
    let rows = montecarlo::degree_sweep(1..=20, 10_000, DEFAULT_SEED).map_err(|e| e.to_string())?;
    let dominated = rows.iter().all(|r| r.mean_cauchy_bound >= r.mean_max_modulus);
    let gap = |d: usize| {
        let r = &rows[d - 1];
        r.mean_cauchy_bound - r.mean_max_modulus
    };
    check(
        dominated && gap(20) > gap(5),
        format!(
            "cauchy >= max in all rows: {dominated}; gap(5) = {:.3}, gap(20) = {:.3}",
            gap(5),
            gap(20)
        ),
    )
}

fn special_functions() -> Outcome {
    let mut worst_p = 0.0f64;
    let mut ps: Vec<f64> = (-2000..=2000).map(|k| k as f64 / 2000.0 * (1.0 - 1e-15)).collect();
    for k in 1..=15 {
        let t = 1.0 - 10f64.powi(-k);
        ps.extend([t, -t]);
    }
    for &p in &ps {
        let back = erf(erfinv(p).unwrap()).unwrap();
        worst_p = worst_p.max((back - p).abs());
    }

    let mut worst_x = (0.0f64, 0.0f64);
    let mut x_violations = 0;
    let mut first_violation = f64::INFINITY;
    for k in -500..=500 {
        let x = k as f64 / 100.0;
        let e = erf(x).unwrap();
        if e.abs() >= 1.0 {
            x_violations += 1;
            first_violation = first_violation.min(x.abs());
            continue;
        }
        let err = (erfinv(e).unwrap() - x).abs();
        if err > 1e-10 * (1.0 + x.abs()) {
            x_violations += 1;
            first_violation = first_violation.min(x.abs());
        }
        if err > worst_x.0 {
            worst_x = (err, x);
        }
    }

    let half = abs_cauchy_ratio_cdf(1.0).value();
    let cauchy_ok = (half - 0.5).abs() <= f64::EPSILON;
    check(
        worst_p <= 1e-12 && x_violations == 0 && cauchy_ok,
        format!(
            "p-side max err {worst_p:.1e}; x-side violations {x_violations} of 1001 \
             (from |x| = {first_violation}, worst {:.1e} at x = {}); cdf(1) = {half}",
            worst_x.0, worst_x.1
        ),
    )
}

fn run_figures(dir: &Path, threads: &str) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_polybound"))
        .args(["--threads", threads, "figures", "--seed", "123", "--trials", "20000", "--out"])
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "figures exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_figures(&a, "1")?;
    run_figures(&b, "3")?;
    let mut differing = Vec::new();
    let mut names: Vec<_> = fs::read_dir(&a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for name in &names {
        if fs::read(a.join(name)).ok() != fs::read(b.join(name)).ok() {
            differing.push(name.to_string_lossy().into_owned());
        }
    }
    check(
        names.len() == 9 && differing.is_empty(),
        format!("{} files compared (1 vs 3 threads), differing: {differing:?}", names.len()),
    )
}

fn main() -> ExitCode {
    let monic_five = monic_five_run();
    let from_run = |idx, lo, hi| match &monic_five {
        Ok(s) => mc_checkpoint(s, idx, lo, hi),
        Err(e) => Err(e.clone()),
    };
    let criteria: Vec<Criterion> = vec![
        ("monic lower bound at c=2, n=5", Box::new(monic_lower_checkpoint)),
        ("inverse radius at p=0.99, n=1e5", Box::new(inverse_checkpoint)),
        ("empirical P(max <= 2), monic n=5", Box::new(move || from_run(0, 0.88, 0.94))),
        ("empirical P(max <= 3), monic n=5", Box::new(move || from_run(1, 0.97, 0.99))),
        ("monic sandwich, n in {2,5,10}", Box::new(sandwich_suite)),
        ("general lower bound, n in {2,5}", Box::new(general_suite)),
        ("Kac integral exactness and Monte Carlo", Box::new(kac_exactness)),
        ("Kac asymptotic consistency", Box::new(asymptotic_consistency)),
        ("per-trial hard invariants", Box::new(per_trial_invariants)),
        ("unit-disk symmetry", Box::new(unit_disk_symmetry)),
        ("roots cluster near the unit circle", Box::new(circular_law)),
        ("degree sweep shape", Box::new(sweep_shape)),
        ("special functions", Box::new(special_functions)),
        ("figure determinism across worker counts", Box::new(determinism)),
    ];

    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let (status, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {status} {title}: {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
