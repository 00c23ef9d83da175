//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output; exits non-zero on failure.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use common::{e, grid, simpson, thresholds, OctantArc, OracleCdf};
use pball::geometry::{
    accumulated_area, ball_volume, rel_diff_curve, surface_cdf, surface_measure, volume_cdf,
};
use pball::squigonometry::ode_cross_check;
use pball::verify::{
    ks_one_sample, ks_two_sample_power, recover_t, run_suite, SuiteConfig, TestReport, Verdict,
};
use pball::{pnormal_sample, Exponent, Mode, PNormal, SquigSampler, DEFAULT_PRECISION};

const INF: f64 = f64::INFINITY;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(failures: &mut Vec<String>, cond: bool, msg: impl FnOnce() -> String) {
    if !cond {
        failures.push(msg());
    }
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            pass: true,
            detail: summary,
        }
    } else {
        Outcome {
            pass: false,
            detail: failures.join("; "),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn constants() -> Outcome {
    let mut f = Vec::new();
    for (p, want) in [(1.0, 2.0), (2.0, std::f64::consts::PI), (INF, 4.0)] {
        let got = grid(p, 2.0, DEFAULT_PRECISION).pi_p();
        check(&mut f, (got - want).abs() <= 1e-6, || {
            format!("pi_p(p={p}) = {got}")
        });
    }
    let mut worst = 0.0_f64;
    for p in [0.5, 1.0, 1.5, 2.0, 3.0, INF] {
        let g = grid(p, 2.0, DEFAULT_PRECISION);
        for n in 2..=6 {
            let r = rel(ball_volume(&g, n).unwrap(), common::ball_volume(p, n));
            worst = worst.max(r);
            check(&mut f, r <= 1e-4, || format!("V_{n}(p={p}) rel err {r:e}"));
        }
    }
    let anchors = [
        (2.0, 3, 4.0 * std::f64::consts::PI),
        (INF, 3, 24.0),
        (1.0, 2, 8.0),
    ];
    for (p, n, want) in anchors {
        let got = surface_measure(&grid(p, p, DEFAULT_PRECISION), n).unwrap();
        check(&mut f, rel(got, want) <= 1e-4, || {
            format!("S_{n}(p=q={p}) = {got}")
        });
    }
    outcome(f, format!("max volume rel err {worst:.1e}"))
}

fn dichotomy_curves() -> Outcome {
    let mut f = Vec::new();
    let mut flat = 0.0_f64;
    for (p, q) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (INF, 2.0), (INF, INF)] {
        let m = rel_diff_curve(&grid(p, q, DEFAULT_PRECISION), 1000)
            .unwrap()
            .max_abs_diff;
        flat = flat.max(m);
        check(&mut f, m <= 1e-6, || format!("(p,q)=({p},{q}) max {m:e}"));
    }
    let mut margin = f64::INFINITY;
    for entry in thresholds().rel_diff {
        let m = rel_diff_curve(&grid(entry.p, entry.q, DEFAULT_PRECISION), 1000)
            .unwrap()
            .max_abs_diff;
        margin = margin.min(m - entry.delta);
        check(&mut f, m >= entry.delta, || {
            format!(
                "(p,q)=({},{}) max {m} < delta {}",
                entry.p, entry.q, entry.delta
            )
        });
    }
    outcome(
        f,
        format!("equality cases <= {flat:.1e}; strict cases clear delta by >= {margin:.1e}"),
    )
}

fn norm_invariants() -> Outcome {
    let mut f = Vec::new();
    let mut rows = 0usize;
    for p in [1.0, 1.5, 2.0, 3.0, INF] {
        let g = grid(p, p, DEFAULT_PRECISION);
        for n in [2, 3, 5] {
            let s = SquigSampler::new(g.clone(), n).unwrap();
            let batches = [
                s.sample(Mode::Volume, 10_000, 1).unwrap(),
                s.sample(Mode::Surface, 10_000, 2).unwrap(),
                pnormal_sample(e(p), n, Mode::Volume, 10_000, 3).unwrap(),
                pnormal_sample(e(p), n, Mode::Surface, 10_000, 4).unwrap(),
            ];
            for b in batches {
                for r in b.norms() {
                    rows += 1;
                    let ok = match b.mode {
                        Mode::Surface => (r - 1.0).abs() <= 1e-9,
                        Mode::Volume => r <= 1.0,
                    };
                    check(&mut f, ok, || {
                        format!("{:?} {:?} p={p} n={n}: norm {r}", b.algorithm, b.mode)
                    });
                }
            }
        }
    }
    f.truncate(5);
    outcome(f, format!("{rows} rows"))
}

fn summarize(reports: &[&TestReport]) -> String {
    let worst = reports
        .iter()
        .map(|r| r.statistic / r.critical_value)
        .fold(0.0, f64::max);
    format!("{} tests, max D/crit {worst:.2}", reports.len())
}

fn volume_equivalence(reports: &[TestReport]) -> Outcome {
    let vol: Vec<&TestReport> = reports
        .iter()
        .filter(|r| r.name.starts_with("volume") && r.name.contains("squig~pnormal"))
        .collect();
    let mut f = Vec::new();
    check(&mut f, vol.len() == 5 * (3 + 1 + 2 + 4), || {
        format!("{} volume tests", vol.len())
    });
    for r in &vol {
        check(
            &mut f,
            r.alpha == 0.01 && r.sizes == [50_000, 50_000] && r.passed(),
            || {
                format!(
                    "{}: D={:.5} crit={:.5}",
                    r.name, r.statistic, r.critical_value
                )
            },
        );
    }
    outcome(f, summarize(&vol))
}

fn surface_dichotomy(reports: &[TestReport], cfg: &SuiteConfig) -> Outcome {
    let mut f = Vec::new();
    let mut notes = Vec::new();
    for p in [1.0, 2.0, INF] {
        let tag = format!("p={} n=3", e(p));
        for r in reports
            .iter()
            .filter(|r| r.name.starts_with("surface") && r.name.ends_with(&tag))
        {
            check(&mut f, r.alpha == 0.01 && r.passed(), || {
                format!("{}: D={:.5}", r.name, r.statistic)
            });
        }
    }
    let gaps = thresholds().cdf_gap;
    for p in [1.5, 3.0] {
        let name = format!("surface t_3 squig~pnormal p={} n=3", e(p));
        let Some(r) = reports.iter().find(|r| r.name == name) else {
            f.push(format!("missing {name}"));
            continue;
        };
        let g = grid(p, p, cfg.precision);
        let gap = volume_cdf(&g, 3)
            .unwrap()
            .sup_distance(&surface_cdf(&g, 3).unwrap());
        let oracle_gap = gaps.iter().find(|x| x.p == p && x.n == 3).unwrap().oracle;
        let power = ks_two_sample_power(gap, cfg.count, 1e-3);
        check(&mut f, (gap - oracle_gap).abs() < 1e-6, || {
            format!("p={p}: grid gap {gap} vs oracle {oracle_gap}")
        });
        check(&mut f, power >= 0.99, || {
            format!("p={p}: predicted power {power:.3}")
        });
        check(
            &mut f,
            r.alpha == 1e-3 && r.verdict == Verdict::Reject,
            || {
                format!(
                    "{}: D={:.5} crit={:.5}",
                    r.name, r.statistic, r.critical_value
                )
            },
        );
        notes.push(format!(
            "p={p} D={:.4}>{:.4} power {power:.4}",
            r.statistic, r.critical_value
        ));
    }
    outcome(f, notes.join(", "))
}

fn squig_surface_law() -> Outcome {
    let mut f = Vec::new();
    let mut notes = Vec::new();
    let mut crit = 0.0;
    for (i, p) in [1.5, 2.0, 3.0].into_iter().enumerate() {
        let g = grid(p, p, DEFAULT_PRECISION);
        let b = SquigSampler::new(g.clone(), 3)
            .unwrap()
            .sample(Mode::Surface, 100_000, 600 + i as u64)
            .unwrap();
        let t = recover_t(&g, &b, 3).unwrap();
        let table = surface_cdf(&g, 3).unwrap();
        let r = ks_one_sample("t_3", &t, |x| table.eval(x), 0.01).unwrap();
        check(&mut f, r.passed(), || {
            format!("p={p}: D={:.5} crit={:.5}", r.statistic, r.critical_value)
        });
        let rows = OctantArc::new(p, p, 100_000).quadrant_cdfs(3);
        let oracle = OracleCdf::surface(&rows);
        let ro = ks_one_sample("t_3 oracle", &t, |x| oracle.eval(x), 0.01).unwrap();
        check(&mut f, ro.passed(), || {
            format!("p={p} vs quadrature oracle: D={:.5}", ro.statistic)
        });
        notes.push(format!("p={p} D={:.4}", r.statistic));
        crit = r.critical_value;
    }
    outcome(f, format!("{} (crit {crit:.4})", notes.join(", ")))
}

fn radius_law(reports: &[TestReport]) -> Outcome {
    let rad: Vec<&TestReport> = reports.iter().filter(|r| r.name.contains("~r^n")).collect();
    let mut f = Vec::new();
    check(&mut f, rad.len() == 30, || {
        format!("{} radius tests", rad.len())
    });
    for r in &rad {
        check(&mut f, r.alpha == 0.01 && r.passed(), || {
            format!("{}: D={:.5}", r.name, r.statistic)
        });
    }
    outcome(f, summarize(&rad))
}

fn numerical_checks() -> Outcome {
    let mut f = Vec::new();
    let mut ode = 0.0_f64;
    for p in [1.5, 2.0, 4.0] {
        let d = ode_cross_check(e(p), 1e-5).unwrap();
        ode = ode.max(d);
        check(&mut f, d <= 1e-5, || format!("ODE p={p}: {d:e}"));
    }
    let mut slope = 0.0_f64;
    for p in [1.5, 2.0, 3.0, 4.0] {
        let g = grid(p, p, DEFAULT_PRECISION);
        let (a, t) = (accumulated_area(&g), g.t());
        let skip = t.len() / 1000;
        let mut i = skip;
        while i < t.len() - skip {
            let j = i + t[i..].partition_point(|&v| v < t[i] + 1e-6);
            if j >= t.len() - skip {
                break;
            }
            slope = slope.max(((a[j] - a[i]) / (t[j] - t[i]) - 0.5).abs());
            i = j;
        }
    }
    check(&mut f, slope <= 1e-4, || format!("dA/dt off by {slope:e}"));
    let mut norm = 0.0_f64;
    for p in [0.5, 1.0, 1.5, 2.0, 3.0, 8.0] {
        let d = PNormal::new(e(p));
        let cut = common::pnormal_cutoff(p);
        let (mut total, mut a, mut b) = (0.0, 0.0, 1e-6_f64);
        while a < cut {
            total += simpson(&|x: f64| d.density(x), a, b, 1e-14);
            a = b;
            b = (2.0 * b).min(cut);
        }
        norm = norm.max((2.0 * total - 1.0).abs());
    }
    let u = PNormal::new(Exponent::INFINITY);
    norm =
        norm.max((simpson(&|x: f64| u.density(x), -1.0 + 1e-15, 1.0 - 1e-15, 1e-14) - 1.0).abs());
    check(&mut f, norm <= 1e-8, || {
        format!("density mass off by {norm:e}")
    });
    outcome(
        f,
        format!("ODE {ode:.1e}, dA/dt {slope:.1e}, mass {norm:.1e}"),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_pball");
    let runs: [&[&str]; 3] = [
        &[
            "sample", "--p", "1.5", "--n", "4", "--count", "20000", "--mode", "surface",
        ],
        &[
            "sample",
            "--p",
            "3",
            "--n",
            "3",
            "--count",
            "20000",
            "--algorithm",
            "pnormal",
            "--format",
            "jsonl",
        ],
        &["curves", "--p", "4", "--q", "2"],
    ];
    let mut f = Vec::new();
    let mut bytes = 0;
    for args in runs {
        let outs: Vec<Vec<u8>> = ["1", "4", "4"]
            .iter()
            .map(|threads| {
                let o = Command::new(bin)
                    .args(args)
                    .env("RAYON_NUM_THREADS", threads)
                    .output()
                    .unwrap();
                if !o.status.success() {
                    f.push(format!("{args:?} exited with {}", o.status));
                }
                o.stdout
            })
            .collect();
        bytes += outs[0].len();
        check(
            &mut f,
            !outs[0].is_empty() && outs.windows(2).all(|w| w[0] == w[1]),
            || format!("{args:?} output differs between runs"),
        );
    }
    outcome(f, format!("3 commands x 3 runs, {bytes} bytes each"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cfg = SuiteConfig::default();
    let reports = run_suite(&cfg).expect("suite");
    let criteria: Vec<Criterion> = vec![
        ("constants", Box::new(constants)),
        ("relative-difference dichotomy", Box::new(dichotomy_curves)),
        ("sampler norm invariants", Box::new(norm_invariants)),
        (
            "volume equivalence",
            Box::new(|| volume_equivalence(&reports)),
        ),
        (
            "surface dichotomy",
            Box::new(|| surface_dichotomy(&reports, &cfg)),
        ),
        ("surface sampler law", Box::new(squig_surface_law)),
        ("radius law", Box::new(|| radius_law(&reports))),
        ("numerical checks", Box::new(numerical_checks)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
