//! Exit criteria. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads=1` to see them.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use cflk::bounds::{
    kirane_threshold, lyapunov_threshold, max_abs_green, super_critical_max, KiraneThreshold,
};
use cflk::green::{h1, h2};
use cflk::ingest::{certify, QSignal, Verdict};
use cflk::oracle::{check_branch_signs, grid_max_abs_green};
use cflk::spectral::{smallest_characteristic_value, ScanOptions};
use cflk::sweep::{standard_alphas, STANDARD_LENGTHS};
use cflk::{Error, Problem};
use rand::{Rng, SeedableRng};

const C1_TOL: f64 = 1e-9;
const C1_BUDGET_S: f64 = 30.0;
const C1_ORACLE_N: usize = 512;
const EXACT_TOL: f64 = 1e-12;
const C4_NEAR_REL: f64 = 1e-3;
const C4_BLOWUP: f64 = 1e5;
const C5_SIGN_N: usize = 256;
const C6_SAMPLES: usize = 1000;
const C7_N: usize = 400;
const C7_REL_TOL: f64 = 1e-3;
const C7_BUDGET_S: f64 = 60.0;
const C8_N: usize = 128;
const C8_NO_MISS_ALPHA: f64 = 1.9;

fn report(id: &str, name: &str, pass: bool, detail: String) {
    println!(
        "[{}] {id} {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn sweep() -> Vec<Problem> {
    standard_alphas()
        .into_iter()
        .flat_map(|alpha| {
            STANDARD_LENGTHS
                .iter()
                .map(move |&l| Problem::with_length(alpha, l).unwrap())
        })
        .collect()
}

#[test]
fn c01_closed_form_matches_oracle_maximum() {
    let start = Instant::now();
    let worst = sweep()
        .iter()
        .map(|p| (grid_max_abs_green(p, C1_ORACLE_N).max_abs - max_abs_green(p)).abs())
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= C1_TOL && secs <= C1_BUDGET_S;
    report(
        "C1",
        "closed form vs oracle max",
        pass,
        format!("worst |diff|={worst:e}, {secs:.2} s"),
    );
    assert!(worst <= C1_TOL, "worst {worst}");
    assert!(secs <= C1_BUDGET_S, "took {secs} s");
}

#[test]
fn c02_regime_boundary_continuity() {
    let mut worst = 0.0f64;
    for k in 1..=20 {
        let alpha = 1.0 + k as f64 / 21.0;
        let c = (2.0 - alpha) / (alpha - 1.0);
        let p = Problem::with_length(alpha, c).unwrap();
        worst = worst.max((super_critical_max(&p) - (2.0 - alpha)).abs());
    }
    let pass = worst <= EXACT_TOL;
    report(
        "C2",
        "regime boundary continuity",
        pass,
        format!("worst |diff|={worst:e} over 20 orders"),
    );
    assert!(pass);
}

#[test]
fn c03_classical_reduction() {
    let mut worst = 0.0f64;
    for l in [0.5, 1.0, 2.0, 4.0] {
        let p = Problem::with_length(2.0, l).unwrap();
        let k = kirane_threshold(&p).finite().expect("finite at alpha = 2");
        worst = worst
            .max((max_abs_green(&p) - l / 4.0).abs())
            .max((lyapunov_threshold(&p) - 4.0 / l).abs())
            .max((k - 4.0 / l).abs());
    }
    let pass = worst <= EXACT_TOL;
    report(
        "C3",
        "classical reduction at alpha=2",
        pass,
        format!("worst |diff|={worst:e}"),
    );
    assert!(pass);
}

#[test]
fn c04_refutation_witness() {
    let mut pass = true;
    let mut details = Vec::new();
    for &(alpha, l) in &[(1.2, 4.0), (1.5, 1.0), (1.8, 0.25)] {
        let p = Problem::with_length(alpha, l).unwrap();
        let singular = kirane_threshold(&p).is_singular();
        let lyap_err = (lyapunov_threshold(&p) - 1.0 / (2.0 - alpha)).abs();
        let mut near_min = f64::INFINITY;
        for rel in [-C4_NEAR_REL, C4_NEAR_REL] {
            let q = Problem::with_length(alpha, l * (1.0 + rel)).unwrap();
            near_min = near_min.min(match kirane_threshold(&q) {
                KiraneThreshold::Finite(k) => k.abs(),
                KiraneThreshold::Singular => f64::INFINITY,
            });
        }
        let ok = singular && lyap_err <= EXACT_TOL && near_min > C4_BLOWUP;
        pass &= ok;
        details.push(format!(
            "(alpha={alpha}, L={l}) singular={singular} |lyap-1/(2-alpha)|={lyap_err:e} min|kirane| nearby={near_min:e}"
        ));
    }
    report("C4", "refutation witness", pass, details.join("; "));
    assert!(pass);
}

#[test]
fn c05_sign_structure_audit() {
    let (violations, worst) = sweep()
        .iter()
        .map(|p| check_branch_signs(p, C5_SIGN_N))
        .fold((0, 0.0f64), |(v, w), a| {
            (v + a.violations(), w.max(a.worst()))
        });
    let pass = violations == 0;
    report(
        "C5",
        "sign-structure audit",
        pass,
        format!("{violations} violations, worst excess {worst:e}"),
    );
    assert!(pass);
}

#[test]
fn c06_diagonal_jump() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for p in sweep() {
        for _ in 0..C6_SAMPLES {
            let s = rng.gen_range(p.a()..=p.b());
            let jump = h2(&p, s).unwrap() - h1(&p, s).unwrap();
            worst = worst.max((jump - (2.0 - p.alpha())).abs());
        }
    }
    let pass = worst <= EXACT_TOL;
    report(
        "C6",
        "diagonal jump",
        pass,
        format!("worst |diff|={worst:e}"),
    );
    assert!(pass);
}

#[test]
fn c07_spectral_anchor() {
    let mut pass = true;
    let mut details = Vec::new();
    for l in [0.5, 1.0, 2.0] {
        let p = Problem::with_length(2.0, l).unwrap();
        let start = Instant::now();
        let cv = smallest_characteristic_value(&p, C7_N, &ScanOptions::default()).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let exact = PI * PI / (l * l);
        let rel = (cv.lambda_star - exact).abs() / exact;
        pass &= rel <= C7_REL_TOL && secs <= C7_BUDGET_S;
        details.push(format!(
            "L={l}: lambda*={:.8} rel err={rel:e} ({secs:.2} s)",
            cv.lambda_star
        ));
    }
    report("C7", "spectral anchor at alpha=2", pass, details.join("; "));
    assert!(pass);
}

struct SpectralSweep {
    found: usize,
    worst_margin: f64,
    failures: Vec<String>,
    missing: Vec<(f64, f64)>,
}

fn spectral_sweep() -> SpectralSweep {
    let mut out = SpectralSweep {
        found: 0,
        worst_margin: f64::INFINITY,
        failures: Vec::new(),
        missing: Vec::new(),
    };
    for p in sweep() {
        match smallest_characteristic_value(&p, C8_N, &ScanOptions::default()) {
            Ok(cv) => {
                out.found += 1;
                let l = p.length();
                let margin = cv.lambda_star * l - lyapunov_threshold(&p)
                    + 10.0 * l * max_abs_green(&p) / C8_N as f64;
                out.worst_margin = out.worst_margin.min(margin);
                if margin < 0.0 {
                    out.failures.push(format!("(alpha={}, L={l})", p.alpha()));
                }
            }
            Err(Error::NoSignChange { .. }) => out.missing.push((p.alpha(), p.length())),
            Err(e) => panic!("{e}"),
        }
    }
    out
}

#[test]
fn c08_lyapunov_confirmation() {
    let s = spectral_sweep();
    let missing_high: Vec<_> = s
        .missing
        .iter()
        .filter(|(alpha, _)| *alpha >= C8_NO_MISS_ALPHA)
        .collect();
    println!(
        "C8 NoSignChange at {} of {} points: {:?}",
        s.missing.len(),
        s.found + s.missing.len(),
        s.missing
    );

    let inequality_ok = s.failures.is_empty() && s.found > 0;
    report(
        "C8a",
        "lyapunov inequality at every sign change",
        inequality_ok,
        format!(
            "{} points, worst slack-adjusted margin {:.6}",
            s.found, s.worst_margin
        ),
    );
    let coverage_ok = missing_high.is_empty();
    report(
        "C8b",
        "no NoSignChange for alpha >= 1.9",
        coverage_ok,
        format!("{} misses: {:?}", missing_high.len(), missing_high),
    );
    assert!(inequality_ok, "violations at {:?}", s.failures);
    assert!(
        coverage_ok,
        "NoSignChange for alpha >= 1.9 at {missing_high:?}"
    );
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("cflk-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn c09_certificate_logic() {
    let p1 = Problem::with_length(1.2, 1.0).unwrap();
    let v1 = certify(&p1, &QSignal::constant(0.0, 1.0, 1.0).unwrap())
        .unwrap()
        .verdict;
    let p2 = Problem::with_length(2.0, 1.0).unwrap();
    let v2 = certify(&p2, &QSignal::constant(0.0, 1.0, 9.87).unwrap())
        .unwrap()
        .verdict;

    let q1 = scratch("q1.csv");
    std::fs::write(&q1, "t,q\n0,1\n1,1\n").unwrap();
    let q2 = scratch("q2.csv");
    std::fs::write(&q2, "t,q\n0,9.87\n1,9.87\n").unwrap();
    let code = |alpha: &str, q: &std::path::Path| {
        Command::new(env!("CARGO_BIN_EXE_cflk"))
            .args(["certify", "--alpha", alpha, "--a", "0", "--b", "1", "--q"])
            .arg(q)
            .status()
            .unwrap()
            .code()
    };
    let (e1, e2) = (code("1.2", &q1), code("2", &q2));

    let pass = v1 == Verdict::NoNontrivialSolution
        && v2 == Verdict::Inconclusive
        && e1 == Some(0)
        && e2 == Some(1);
    report(
        "C9",
        "certificate logic",
        pass,
        format!("{v1} (exit {e1:?}), {v2} (exit {e2:?})"),
    );
    assert!(pass);
}

#[test]
fn c10_determinism() {
    let run = |threads: &str, args: &[&str]| {
        let o = Command::new(env!("CARGO_BIN_EXE_cflk"))
            .env("CFLK_THREADS", threads)
            .args(args)
            .output()
            .unwrap();
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        o.stdout
    };
    let audit = ["audit"];
    let counter = [
        "counterexample",
        "--alpha",
        "1.5",
        "--length-min",
        "0.9",
        "--length-max",
        "1.1",
        "--length-steps",
        "21",
    ];
    let mut pass = true;
    for args in [&audit[..], &counter[..]] {
        let reference = run("1", args);
        pass &= !reference.is_empty();
        pass &= run("1", args) == reference;
        pass &= run("8", args) == reference;
        pass &= run("8", args) == reference;
    }
    report(
        "C10",
        "byte-identical output across runs and thread caps",
        pass,
        "audit, counterexample".into(),
    );
    assert!(pass);
}
