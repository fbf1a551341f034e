//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::hint::black_box;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bandset::analysis::{coupled_replay, mdone_mean, simulate_x, simulate_z};
use bandset::band_solver::{dense_rank_oracle, solve, verify};
use bandset::bitkit::{words_for, CountingWords};
use bandset::format::{deserialize, serialize};
use bandset::sim_rng::{self, streams};
use bandset::{synth, BandSystem, ChunkedParams, ChunkedRetrieval, FlatParams, FlatRetrieval};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn criterion_1_and_2() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut rng = sim_rng::stream(1, streams::SYSTEMS);
    let (mut agree, mut solved, mut verified) = (0usize, 0usize, 0usize);
    let trials = 5_000;
    for _ in 0..trials {
        let n = rng.gen_range(1..=24);
        let block_len = rng.gen_range(1..=8);
        let m = rng.gen_range(0..=n);
        let r = rng.gen_range(1..=4);
        let sys = BandSystem::random(n, m, block_len, r, false, &mut rng);
        let full_rank = dense_rank_oracle(&sys).unwrap() == m;
        match solve(&sys) {
            Ok(table) => {
                solved += 1;
                agree += usize::from(full_rank);
                verified += usize::from(verify(&sys, &table).unwrap());
            }
            Err(_) => agree += usize::from(!full_rank),
        }
    }
    let elapsed = start.elapsed();
    (
        outcome(
            agree == trials && elapsed < Duration::from_secs(5),
            format!(
                "solver agrees with dense rank on {agree}/{trials} systems ({solved} solvable) in {:.2}s",
                elapsed.as_secs_f64()
            ),
        ),
        outcome(
            verified == solved,
            format!("{verified}/{solved} solutions satisfy A z = b"),
        ),
    )
}

fn criterion_3_and_4() -> (Outcome, Outcome) {
    let mut rng = sim_rng::stream(2, streams::SYSTEMS);
    let (mut ok, mut matched, mut bounded, mut failures) = (0usize, 0usize, 0usize, 0usize);
    for &m in &[100usize, 1_000] {
        let n = (m as f64 / 0.9).ceil() as usize;
        let mut successes = 0;
        while successes < 600 {
            let sys = BandSystem::random(n, m, 64, 1, false, &mut rng);
            match coupled_replay(&sys) {
                Ok(run) => {
                    successes += 1;
                    matched += usize::from(run.positions_match());
                    bounded += usize::from(run.additions_bounded());
                }
                Err(_) => failures += 1,
            }
        }
        ok += successes;
    }
    (
        outcome(
            matched == ok && ok >= 1_000,
            format!(
                "pos == piv on {matched}/{ok} successful instances ({failures} unsolvable skipped)"
            ),
        ),
        outcome(
            bounded == ok,
            format!("additions <= sum of heights on {bounded}/{ok} instances"),
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = sim_rng::stream(5, streams::ARRIVALS);
    let x = simulate_x(0.1, 1_000_000, &mut rng).unwrap();
    let z = simulate_z(x.rho, 0, &mut rng, Some(&x.arrivals)).unwrap();
    let bad = x
        .states
        .iter()
        .zip(&z.states)
        .filter(|(&xj, &zj)| xj != zj.saturating_sub(1))
        .count();
    outcome(
        bad == 0 && x.steps() == 1_000_000,
        format!(
            "X_j = max(0, Z_j - 1) violated at {bad} of {} steps",
            x.steps()
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, &rho) in [0.5, 0.9].iter().enumerate() {
        let mut rng = sim_rng::stream(60 + i as u64, streams::ARRIVALS);
        let z = simulate_z(rho, 1_000_000, &mut rng, None).unwrap();
        let expect = mdone_mean(rho).unwrap();
        let got = z.time_average();
        let rel = (got - expect).abs() / expect;
        pass &= rel <= 0.10;
        parts.push(format!(
            "rho={rho}: {got:.4} vs {expect:.4} ({:.2}%)",
            100.0 * rel
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!("{} in {:.2}s", parts.join(", "), elapsed.as_secs_f64()),
    )
}

fn chunked(epsilon: f64, seed: u64) -> ChunkedParams {
    ChunkedParams {
        epsilon,
        block_len: 64,
        value_bits: 1,
        chunk_size: 10_000,
        max_retries: 1_000,
        base_seed: seed,
        force_leading_one: false,
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let data = synth::pairs(100_000, 1, 7);
    let ds = match ChunkedRetrieval::construct(&data, chunked(0.05, 7)) {
        Ok(ds) => ds,
        Err(e) => return outcome(false, format!("construction failed: {e}")),
    };
    let wrong = data.iter().filter(|(k, v)| ds.query(k) != *v).count();
    let elapsed = start.elapsed();
    outcome(
        wrong == 0 && elapsed < Duration::from_secs(10),
        format!(
            "{} wrong of {} queries, retries histogram {:?}, {:.2}s",
            wrong,
            data.len(),
            ds.retry_histogram(),
            elapsed.as_secs_f64()
        ),
    )
}

/// Mean ns per query over a full pass, best of three passes.
fn query_ns(ds: &ChunkedRetrieval, data: &[(Vec<u8>, u64)]) -> f64 {
    (0..3)
        .map(|_| {
            let t = Instant::now();
            let mut acc = 0u64;
            for (k, _) in data {
                acc ^= ds.query(black_box(k));
            }
            black_box(acc);
            t.elapsed().as_nanos() as f64 / data.len() as f64
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let data = synth::pairs(1_000_000, 1, 8);
    let mut query_at_million = 0.0;
    for &(eps, target) in &[(0.07, 0.088), (0.05, 0.065), (0.03, 0.043)] {
        let t = Instant::now();
        match ChunkedRetrieval::construct(&data, chunked(eps, 8)) {
            Ok(ds) => {
                let construct_ns = t.elapsed().as_nanos() as f64 / data.len() as f64;
                let overhead = ds.overhead().unwrap();
                let within = (overhead - target).abs() <= 0.007;
                pass &= within;
                let q = query_ns(&ds, &data);
                if eps == 0.05 {
                    query_at_million = q;
                }
                parts.push(format!(
                    "eps={:.0}%: {:.2}% (target {:.1}%) construct {:.0} ns/key query {:.0} ns",
                    eps * 100.0,
                    overhead * 100.0,
                    target * 100.0,
                    construct_ns,
                    q
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("eps={eps}: construction failed: {e}"));
            }
        }
    }
    let small = &data[..100_000];
    match ChunkedRetrieval::construct(small, chunked(0.05, 8)) {
        Ok(ds) => {
            let q_small = query_ns(&ds, small);
            let ratio = query_at_million.max(q_small) / query_at_million.min(q_small);
            pass &= ratio <= 2.0;
            parts.push(format!(
                "query m=1e5 {q_small:.0} ns vs m=1e6 {query_at_million:.0} ns (ratio {ratio:.2})"
            ));
        }
        Err(e) => {
            pass = false;
            parts.push(format!("m=1e5 construction failed: {e}"));
        }
    }
    outcome(pass, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let data = synth::pairs(10_000, 3, 9);
    let params = ChunkedParams {
        value_bits: 3,
        chunk_size: 2_500,
        ..chunked(0.05, 9)
    };
    let ds = ChunkedRetrieval::construct(&data, params).unwrap();
    let bytes = serialize(&ds);
    let back = match deserialize(&bytes) {
        Ok(b) => b,
        Err(e) => return outcome(false, format!("deserialize failed: {e}")),
    };
    let identical = serialize(&back) == bytes;
    let probes: Vec<Vec<u8>> = data
        .iter()
        .map(|(k, _)| k.clone())
        .chain((0..10_000).map(|i| synth::pseudo_url(99, i)))
        .collect();
    let same = probes.iter().all(|k| back.query(k) == ds.query(k));
    let correct = data.iter().all(|(k, v)| back.query(k) == *v);
    outcome(
        identical && same && correct,
        format!(
            "{} bytes, byte-identical={identical}, query-identical={same} on {} probes, correct={correct}",
            bytes.len(),
            probes.len()
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut pass = true;
    let mut worst_dir = 0;
    let mut worst_table = 0;
    let mut checked = 0;
    for &(block_len, r) in &[(64usize, 1usize), (64, 3), (32, 2), (100, 2), (128, 1)] {
        let data = synth::pairs(20_000, r, 10 + block_len as u64);
        let params = ChunkedParams {
            epsilon: 0.1,
            block_len,
            value_bits: r,
            chunk_size: 5_000,
            max_retries: 1_000,
            base_seed: 10,
            force_leading_one: false,
        };
        let ds = ChunkedRetrieval::construct(&data, params).unwrap();
        let budget = r * (words_for(block_len) + 1);
        for (k, v) in data.iter().step_by(7) {
            let dir = CountingWords::new(ds.directory().words());
            let planes: Vec<_> = ds
                .planes()
                .iter()
                .map(|p| CountingWords::new(p.words()))
                .collect();
            let got = ds.query_with(&dir, &planes, k);
            let table: usize = planes.iter().map(|p| p.reads()).sum();
            pass &= got == *v
                && dir.reads() <= 2
                && dir.is_contiguous()
                && table <= budget
                && planes.iter().all(|p| p.is_contiguous());
            worst_dir = worst_dir.max(dir.reads());
            worst_table = worst_table.max(table * 100 / budget);
            checked += 1;
        }
    }
    outcome(
        pass,
        format!(
            "{checked} instrumented queries: at most {worst_dir} directory words, table reads at most {worst_table}% of r(ceil(L/64)+1), all consecutive"
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut first_try = 0;
    for seed in 0..50u64 {
        let data = synth::pairs(10_000, 1, 1_100 + seed);
        let params = FlatParams {
            epsilon: 0.1,
            block_len: 64,
            value_bits: 1,
            max_retries: 64,
            base_seed: seed,
            force_leading_one: false,
        };
        if let Ok(ds) = FlatRetrieval::construct(&data, params) {
            first_try += usize::from(ds.seed().retry == 0);
        }
    }
    outcome(
        first_try >= 45,
        format!("{first_try}/50 flat constructions succeeded at retry 0"),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let (c1, c2) = criterion_1_and_2();
    results.push((1, c1));
    results.push((2, c2));
    let (c3, c4) = criterion_3_and_4();
    results.push((3, c3));
    results.push((4, c4));
    results.push((5, criterion_5()));
    results.push((6, criterion_6()));
    results.push((7, criterion_7()));
    results.push((8, criterion_8()));
    results.push((9, criterion_9()));
    results.push((10, criterion_10()));
    results.push((11, criterion_11()));

    let mut failed = 0;
    for (n, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {n}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {} failed",
        results.len() - failed,
        failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
