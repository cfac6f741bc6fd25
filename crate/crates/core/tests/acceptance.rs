//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Tolerances and seeds are fixed here and
//! were not tuned to the outcome.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use regenstat::extremes::{approx_cdf, binomial_oracle, gamma, gamma_bruteforce};
use regenstat::models::dist::{StepDist, TailDist};
use regenstat::models::iid_block::{iid_block_profile, ClusterLaw};
use regenstat::models::prescribed::{prescribed_beta_model, MRule};
use regenstat::montecarlo::{collect_cycle_maxima, estimate_profile};
use regenstat::{
    closed_form_profile, compare, simulate_cycle, simulate_order_stats, BetaSource,
    ClusterVectorF64, CompareConfig, GridSpec, ModelSpec, RngStream, RunOptions, Thresholds,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn random_cluster(rng: &mut RngStream, len: usize) -> ClusterVectorF64 {
    let raw: Vec<f64> = (0..len).map(|_| rng.uniform_open0()).collect();
    let total: f64 = raw.iter().sum();
    let mass = rng.uniform();
    ClusterVectorF64::new(raw.iter().map(|u| mass * u / total).collect()).unwrap()
}

fn within_time(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

/// γ against ordered-sequence enumeration.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(1, 0);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for q in 2..=6 {
        for _ in 0..1000 {
            let beta = random_cluster(&mut rng, q - 1);
            for k in 0..q {
                let a = gamma(q, k, &beta).unwrap();
                let b = gamma_bruteforce(q, k, &beta).unwrap();
                worst = worst.max((a - b).abs());
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-12 && within_time(elapsed, 5.0),
        detail: format!(
            "{checked} cases, max |gamma - bruteforce| = {worst:.3e} (tol 1e-12), {:.2} s (limit 5 s)",
            elapsed.as_secs_f64()
        ),
    }
}

/// `q = 1` is exactly `G^n`; `γ_{q,0} = 1`.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(2, 0);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let gn = rng.uniform();
        let beta = random_cluster(&mut rng, 4);
        if approx_cdf(1, gn, &beta).unwrap() != gn {
            mismatches += 1;
        }
    }
    let mut gamma_ok = true;
    for q in 1..=10 {
        let beta = random_cluster(&mut rng, q - 1);
        gamma_ok &= gamma(q, 0, &beta).unwrap() == 1.0;
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: mismatches == 0 && gamma_ok && within_time(elapsed, 1.0),
        detail: format!(
            "{mismatches} of 10^4 q=1 values differ from Gn, gamma_(q,0) == 1 for q <= 10: {gamma_ok}, {:.3} s (limit 1 s)",
            elapsed.as_secs_f64()
        ),
    }
}

/// One-point cycles: the approximation against the exact binomial law.
fn criterion_3() -> Outcome {
    let start = Instant::now();
    let n = 10_000u64;
    let law = ClusterLaw::uniform(vec![1.0]);
    let profile = iid_block_profile(&law).unwrap();
    let beta = profile.cluster_limit(2).unwrap();
    let mut worst = 0.0f64;
    let mut structure_ok = profile.mu() == 1.0 && beta.as_slice() == [1.0, 0.0];
    // Prescribed values of n(1 − F), and the model's own levels nearest them.
    let mut fs: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|c| 1.0 - c / n as f64).collect();
    for m in [12.0, 13.0, 14.0] {
        let f = profile.cycle_cdf(m);
        structure_ok &= (profile.g(m) - f).abs() < 1e-15;
        fs.push(f);
    }
    for &f in &fs {
        let gn = f.powf(n as f64);
        for q in 1..=3 {
            let a = approx_cdf(q, gn, &beta).unwrap();
            worst = worst.max((a - binomial_oracle(q, n, f)).abs());
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 0.005 && structure_ok && within_time(elapsed, 1.0),
        detail: format!(
            "max |approx - binomial| = {worst:.2e} (tol 0.005), mu = 1 and beta = (1, 0): {structure_ok}, {:.3} s (limit 1 s)",
            elapsed.as_secs_f64()
        ),
    }
}

/// Geometric jump, closed-form `G` and limiting `β`.
///
/// Headroom: a pilot with 2·10^6 replicas (seed 2) gave sup_gap of 0.0045,
/// 0.0046 and 0.0048 for q = 1, 2, 3, which an exact transition-matrix
/// computation confirms is the finite-n bias. With stderr 0.0011 at
/// 2·10^5 replicas the expected sup_gap is at most about 0.0085.
fn criterion_4() -> Outcome {
    let start = Instant::now();
    let model = ModelSpec::GeometricJump { p: 0.3 };
    let cfg = CompareConfig {
        n: 2000,
        q_max: 3,
        replicas: 200_000,
        grid: GridSpec::Auto,
        beta_source: BetaSource::ClosedForm,
        seed: 4,
        estimate_cycles: 1_000_000,
    };
    let rep = compare(&model, &cfg, &RunOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let pass =
        rep.sup_gap.iter().all(|&g| g <= 0.01) && !rep.beta_fallback && within_time(elapsed, 180.0);
    Outcome {
        pass,
        detail: format!(
            "sup_gap = [{}] (tol 0.01), max stderr {:.4}, grid {}..{}, {:.1} s",
            rep.sup_gap
                .iter()
                .map(|g| format!("{g:.4}"))
                .collect::<Vec<_>>()
                .join(", "),
            rep.max_stderr(1),
            rep.grid[0],
            rep.grid[rep.grid.len() - 1],
            elapsed.as_secs_f64()
        ),
    }
}

/// Reflected walk: `β̂_1(25)` and `μ̂` from 10^6 cycles.
///
/// `P(ζ > 25) ≈ 1.1·10^{-10}` at p = 0.3, so 10^6 cycles are expected to
/// produce about 10^{-4} exceedances and the estimate is vacuous. The
/// criterion is evaluated as stated; the reachable threshold x = 5 is
/// printed alongside for information only.
fn criterion_5() -> (Outcome, String) {
    let start = Instant::now();
    let model = ModelSpec::ReflectedWalk { p: 0.3 };
    let est = estimate_profile(
        &model,
        1_000_000,
        1,
        &Thresholds::Explicit(vec![5.0, 25.0]),
        5,
        &RunOptions::default(),
    )
    .unwrap();
    let elapsed = start.elapsed();
    let at25 = &est.thresholds[1];
    let b = at25.beta(1).unwrap();
    let se = at25.beta_stderr(1).unwrap();
    let beta_ok = (b - 0.4).abs() <= 3.0 * se + 0.01;
    let mu_ok = (est.mu_hat - 1.75).abs() <= 3.0 * est.mu_stderr;
    let exact = closed_form_profile(&model).unwrap();
    let at5 = &est.thresholds[0];
    let note = format!(
        "x = 5: {} exceedances, beta1_hat = {:.4} +- {:.4}, exact beta1(5) = {:.4}, limit 0.4",
        at5.exceedances,
        at5.beta(1).unwrap(),
        at5.beta_stderr(1).unwrap(),
        exact.beta_at(5.0, 1).unwrap()
    );
    (
        Outcome {
            pass: beta_ok && mu_ok && within_time(elapsed, 60.0),
            detail: format!(
                "x = 25: {} exceedances (vacuous: {}), |beta1_hat - 0.4| = {:.4} vs 3*se + 0.01 = {:.4}; mu_hat = {:.5} +- {:.5} (ok: {mu_ok}); P(zeta > 25) = {:.2e}; {:.2} s",
                at25.exceedances,
                at25.vacuous(),
                (b - 0.4).abs(),
                3.0 * se + 0.01,
                est.mu_hat,
                est.mu_stderr,
                exact.cycle_tail(25.0),
                elapsed.as_secs_f64()
            ),
        },
        note,
    )
}

/// Lindley with Pareto(1.5) − 4 steps at the empirical 99.9% quantile of ζ.
fn criterion_6() -> Outcome {
    let start = Instant::now();
    let step = StepDist::shifted_pareto(1.5, 1.0, -4.0);
    let model = ModelSpec::Lindley { step };
    let est = estimate_profile(
        &model,
        10_000_000,
        4,
        &Thresholds::Quantiles(vec![0.999]),
        6,
        &RunOptions::default(),
    )
    .unwrap();
    let elapsed = start.elapsed();
    let s = &est.thresholds[0];
    let betas: Vec<f64> = (1..=4).map(|i| s.beta(i).unwrap()).collect();
    let reference = est.mu_hat * step.tail(s.x);
    let ratio = s.tail() / reference;
    let ratio_se = s.tail_stderr() / reference;
    let pass = !s.vacuous()
        && betas.iter().all(|&b| b <= 0.05)
        && (ratio - 1.0).abs() <= 3.0 * ratio_se + 0.1
        && within_time(elapsed, 300.0);
    Outcome {
        pass,
        detail: format!(
            "x = {:.2}, beta_hat(1..4) = [{}] (tol 0.05), tail ratio = {ratio:.4} +- {ratio_se:.4} (tol 3*se + 0.1), {:.1} s",
            s.x,
            betas.iter().map(|b| format!("{b:.4}")).collect::<Vec<_>>().join(", "),
            elapsed.as_secs_f64()
        ),
    }
}

/// Prescribed β = (0.5, 0.3, 0.2) with Pareto(2) levels.
fn criterion_7() -> Outcome {
    let start = Instant::now();
    let target = [0.5, 0.3, 0.2];
    let beta = ClusterVectorF64::new(target.to_vec()).unwrap();
    let (model, _, vseq) =
        prescribed_beta_model(&beta, TailDist::pareto(2.0), MRule::Log2).unwrap();
    let vseq_ok = vseq.verify().is_ok();
    let cycles = 10_000_000;
    let levels: Vec<u64> = vseq.v.iter().copied().take_while(|&v| v <= 1000).collect();
    let xs: Vec<f64> = levels.iter().map(|&v| v as f64 - 0.5).collect();
    let est = estimate_profile(
        &model,
        cycles,
        3,
        &Thresholds::Explicit(xs),
        7,
        &RunOptions::default(),
    )
    .unwrap();

    let (idx, stats) = est
        .thresholds
        .iter()
        .enumerate()
        .rev()
        .find(|(_, s)| s.exceedances >= 10_000)
        .expect("some level has 10^4 exceedances");
    let beta_dev = (1..=3)
        .map(|i| (stats.beta(i).unwrap() - target[i - 1]).abs())
        .fold(0.0, f64::max);

    // P(ζ > v_n − 1/2) = 1 − F(v_n) exactly; checked on every level up to
    // the one used for β̂.
    let tail = TailDist::pareto(2.0);
    let mut worst_z = 0.0f64;
    for (s, &v) in est.thresholds.iter().zip(&levels).take(idx + 1) {
        let reference = tail.tail(v as f64);
        let ratio = s.tail() / reference;
        let se = s.tail_stderr() / reference;
        let z = if se > 0.0 {
            (ratio - 1.0).abs() / se
        } else if ratio == 1.0 {
            0.0
        } else {
            f64::INFINITY
        };
        worst_z = worst_z.max(z);
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: vseq_ok && beta_dev <= 0.03 && worst_z <= 3.0 && within_time(elapsed, 180.0),
        detail: format!(
            "levels verified: {vseq_ok} ({} levels); at v = {} ({} exceedances) max |beta_hat - beta| = {beta_dev:.4} (tol 0.03); max |ratio - 1|/se over {} levels = {worst_z:.2} (tol 3); {:.1} s",
            vseq.len(),
            levels[idx],
            stats.exceedances,
            idx + 1,
            elapsed.as_secs_f64()
        ),
    }
}

/// Pathwise and reproducibility properties.
fn criterion_8() -> Outcome {
    let start = Instant::now();
    let opts = RunOptions::default();

    let model = ModelSpec::GeometricJump { p: 0.3 };
    let sample = simulate_order_stats(&model, 1000, 5, 20_000, 8, &opts).unwrap();
    let rows_ok = sample.rows().all(|r| r.windows(2).all(|w| w[0] >= w[1]));

    let mut rng = RngStream::new(8, 1);
    let mut length_ok = true;
    for _ in 0..1_000_000 {
        let c = simulate_cycle(&model, 1, &mut rng).unwrap();
        length_ok &= c.length() as f64 == c.max() + 1.0;
    }

    let mut rng = RngStream::new(8, 2);
    let mut monotone_ok = true;
    for _ in 0..10_000 {
        let gn = rng.uniform();
        let beta = random_cluster(&mut rng, 6);
        let vals: Vec<f64> = (1..=7).map(|q| approx_cdf(q, gn, &beta).unwrap()).collect();
        monotone_ok &= vals.windows(2).all(|w| w[0] <= w[1]);
    }

    let cfg = CompareConfig {
        n: 500,
        q_max: 3,
        replicas: 5000,
        grid: GridSpec::Auto,
        beta_source: BetaSource::Estimated,
        seed: 8,
        estimate_cycles: 200_000,
    };
    let lindley = ModelSpec::Lindley {
        step: StepDist::shifted_pareto(1.5, 1.0, -4.0),
    };
    let mut repro_ok = true;
    for m in [&model, &lindley] {
        let one = compare(m, &cfg, &RunOptions::with_workers(1)).unwrap();
        let four = compare(m, &cfg, &RunOptions::with_workers(4)).unwrap();
        repro_ok &= one == four;
    }
    let a = collect_cycle_maxima(&lindley, 300_000, 8, &RunOptions::with_workers(1)).unwrap();
    let b = collect_cycle_maxima(&lindley, 300_000, 8, &RunOptions::with_workers(3)).unwrap();
    repro_ok &= a == b;

    let elapsed = start.elapsed();
    Outcome {
        pass: rows_ok && length_ok && monotone_ok && repro_ok,
        detail: format!(
            "rows nonincreasing: {rows_ok}; length = zeta + 1 on 10^6 cycles: {length_ok}; approx monotone in q on 10^4 inputs: {monotone_ok}; identical across 1/3/4 workers: {repro_ok}; {:.1} s",
            elapsed.as_secs_f64()
        ),
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, o: Outcome| {
        println!(
            "{} [{id}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    };
    report(1, "gamma-oracle equivalence", criterion_1());
    report(2, "q = 1 reduction", criterion_2());
    report(3, "i.i.d. exact-oracle check", criterion_3());
    report(4, "geometric jump sup-distance", criterion_4());
    let (c5, note) = criterion_5();
    report(5, "reflected walk beta_1 and mu", c5);
    println!("NOTE [5] {note}");
    report(6, "Lindley long-tailed degeneracy", criterion_6());
    report(7, "prescribed-beta construction", criterion_7());
    report(
        8,
        "structural and reproducibility properties",
        criterion_8(),
    );
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
