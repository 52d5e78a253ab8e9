//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any asserted criterion fails.
//!
//! `LOCDEL_ACCEPT_ONLY=1,4` restricts the run to the listed criteria; 4 and 5
//! reuse the audit gathered while running 1. `LOCDEL_ACCEPT_DRAWS` overrides
//! the number of random draws per `k` in criterion 2.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use locdel::channel::{sample_with, verify_exhaustive, VerifyOptions, VerifyReport};
use locdel::cli::stats_rows;
use locdel::corrector::Hypothesis;
use locdel::dense::{enrich, intermediate, DenseEncoder};
use locdel::patterns::{check_property_rich, check_property_sparse};
use locdel::sketch::{next_prime_above, InnerSketch, PowerSumSketch};
use locdel::{BitString, Codec, CodeParameters, PatternFamily, ScaledOverrides};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

struct Outcome {
    ok: bool,
    /// Reported only; never fails the run.
    soft: bool,
    detail: String,
}

impl Outcome {
    fn hard(ok: bool, detail: String) -> Self {
        Self { ok, soft: false, detail }
    }
}

fn scaled(k: usize, n: usize) -> CodeParameters {
    CodeParameters::scaled_with(k, n, &ScaledOverrides::default()).unwrap()
}

fn ceil_log2(x: usize) -> usize {
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

/// Messages mixing uniform bits with long runs, so the marker machinery is exercised.
fn message(rng: &mut SplitMix64, n: usize) -> BitString {
    let p_one = [0.5, 0.8, 0.97, 1.0][rng.gen_range(0..4)];
    (0..n).map(|_| rng.gen_bool(p_one)).collect()
}

fn suite1() -> Vec<(usize, VerifyReport)> {
    let mut out = Vec::new();
    for n in [12, 16, 20] {
        let codec = Codec::new(&scaled(2, n)).unwrap();
        let opts = VerifyOptions {
            audit: true,
            ..Default::default()
        };
        out.push((n, verify_exhaustive(&codec, &opts).unwrap()));
    }
    out
}

fn criterion1(runs: &[(usize, VerifyReport)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, r) in runs {
        ok &= r.failure_count == 0 && r.ambiguities == 0 && r.unrecoverable == 0 && r.trials > 0;
        parts.push(format!(
            "n={n}: {} trials, {} failures, {} ambiguous, {:.1}s",
            r.trials,
            r.failure_count,
            r.ambiguities,
            r.runtime.as_secs_f64()
        ));
        for f in r.failures.iter().take(3) {
            parts.push(f.record());
        }
    }
    Outcome::hard(ok, parts.join("; "))
}

fn criterion4(runs: &[(usize, VerifyReport)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, r) in runs {
        let p = scaled(2, *n);
        let a = &r.audit;
        let d = p.delta;
        ok &= a.located > 0
            && a.coverage_misses == 0
            && a.bound_violations == 0
            && r.max_interval as u128 <= p.interval_bound()
            && a.max_f_spread <= 36 * d
            && a.max_y_gap <= 3 * d as u64;
        parts.push(format!(
            "n={n} Δ={d}: {} located, {} coverage misses, interval ≤ {} (bound {}), F spread ≤ {} (bound {}), y gap ≤ {} (bound {})",
            a.located,
            a.coverage_misses,
            r.max_interval,
            p.interval_bound(),
            a.max_f_spread,
            36 * d,
            a.max_y_gap,
            3 * d
        ));
    }
    Outcome::hard(ok, parts.join("; "))
}

fn criterion5(runs: &[(usize, VerifyReport)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, r) in runs {
        let a = &r.audit;
        ok &= a.located > 0 && a.max_count_change <= 2 && a.max_replacement <= 3;
        parts.push(format!(
            "n={n}: max |Δn_P| = {}, max replaced run = {}",
            a.max_count_change, a.max_replacement
        ));
    }
    Outcome::hard(ok, parts.join("; "))
}

fn criterion2() -> Outcome {
    let n = 100_000;
    let draws: u64 = std::env::var("LOCDEL_ACCEPT_DRAWS").ok().and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [2, 3, 4] {
        let codec = Codec::new(&scaled(k, n)).unwrap();
        let mut dec = codec.decoder();
        let mut rng = SplitMix64::seed_from_u64(0x5eed_0000 + k as u64);
        let (mut failures, mut total, mut worst) = (0u64, Duration::ZERO, Duration::ZERO);
        let mut word = codec.encode(&message(&mut rng, n)).unwrap();
        let mut u = BitString::new();
        for i in 0..draws {
            // a fresh message every tenth draw; encoding dominates otherwise
            if i % 10 == 0 {
                u = message(&mut rng, n);
                word = codec.encode(&u).unwrap();
            }
            let pat = sample_with(&mut rng, word.len(), k).unwrap();
            let y = pat.apply(&word).unwrap();
            let t0 = Instant::now();
            let got = dec.decode(y.as_slice());
            let dt = t0.elapsed();
            total += dt;
            worst = worst.max(dt);
            if got.map(|(v, _)| v != u.as_slice()).unwrap_or(true) {
                failures += 1;
            }
        }
        ok &= failures == 0 && worst < Duration::from_secs(1);
        parts.push(format!(
            "k={k}: {failures}/{draws} failures, mean {:.2} ms, max {:.2} ms per decode",
            total.as_secs_f64() * 1e3 / draws as f64,
            worst.as_secs_f64() * 1e3
        ));
    }
    Outcome::hard(ok, parts.join("; "))
}

fn criterion3() -> Outcome {
    let n = 2000;
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [2, 3, 4] {
        let p = scaled(k, n);
        let enc = DenseEncoder::new(&p).unwrap();
        let fam = PatternFamily::from_params(&p);
        let mut rng = SplitMix64::seed_from_u64(0xde05e + k as u64);
        let (mut bad, mut max_gap) = (0, 0u64);
        for _ in 0..1000 {
            let x = enc.encode(&message(&mut rng, n)).unwrap();
            let dense = fam.is_dense(&x, p.delta).unwrap();
            if !(dense && check_property_rich(&x, &p) && check_property_sparse(&x, &p)) {
                bad += 1;
            }
            max_gap = max_gap.max(fam.max_gap(&x));
        }
        ok &= bad == 0 && max_gap <= p.delta as u64 + 1;
        parts.push(format!("k={k} Δ={}: {bad}/1000 not dense, max gap {max_gap}", p.delta));
    }
    Outcome::hard(ok, parts.join("; "))
}

fn marker_free_window(rng: &mut SplitMix64, ell: usize, len: usize) -> Vec<bool> {
    let mut run = 0;
    (0..len)
        .map(|_| {
            let b = run + 1 < ell && rng.gen_bool(0.7);
            run = if b { run + 1 } else { 0 };
            b
        })
        .collect()
}

fn block_with_early_marker(rng: &mut SplitMix64, k: usize, ell: usize) -> Vec<bool> {
    let m = k + ell;
    let mut c: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.6)).collect();
    let at = rng.gen_range(0..k);
    c[at..at + ell].fill(true);
    c
}

/// Round-trips for one parameter set; returns (failures, length mismatches).
fn invert_all(p: &CodeParameters, rng: &mut SplitMix64, trials: usize) -> (usize, usize, String) {
    let enc = DenseEncoder::new(p).unwrap();
    let (mut fail, mut len_bad) = (0, 0);
    let phi = enc.phi();
    for _ in 0..trials {
        let s = marker_free_window(rng, p.ell, p.b);
        let mut c = Vec::new();
        let mut back = Vec::new();
        let ok = phi.compress(&s, &mut c).is_ok() && phi.expand(&c, &mut back).is_ok();
        fail += usize::from(!ok || back != s);
        len_bad += usize::from(c.len() != phi.out_len());
    }
    let td = p.ell >= ceil_log2(p.k) + 4;
    if td {
        for _ in 0..trials {
            let c = block_with_early_marker(rng, p.k, p.ell);
            match intermediate::encode(&c, p.k, p.ell) {
                Ok(t) => {
                    len_bad += usize::from(t.len() != p.m - 1 || locdel::bits::has_run(&t, p.ell));
                    fail += usize::from(intermediate::decode(&t, p.k, p.ell).ok() != Some(c));
                }
                Err(_) => fail += 1,
            }
        }
    }
    let (te_len, t_len) = (p.n + 2 * p.ell, p.n + 2 * p.ell + p.m);
    for _ in 0..trials {
        let u = message(rng, p.n);
        let te = enc.marker_enrich(&u).unwrap();
        len_bad += usize::from(te.len() != te_len);
        fail += usize::from(enc.marker_enrich_inv(&te).ok().as_ref() != Some(&u));
        fail += usize::from(enrich::decode(te.as_slice(), p, phi).ok().as_deref() != Some(u.as_slice()));
        let x = enc.dense_encode(&te).unwrap();
        len_bad += usize::from(x.len() != t_len);
        fail += usize::from(enc.dense_decode(&x).ok().as_ref() != Some(&te));
    }
    let label = format!(
        "k={} ℓ={} n={} (T_e {te_len}, E {t_len}{})",
        p.k,
        p.ell,
        p.n,
        if td { ", T_d checked" } else { "" }
    );
    (fail, len_bad, label)
}

fn criterion6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut rng = SplitMix64::seed_from_u64(0x1a7e);
    for k in [2, 3, 4] {
        let lg = ceil_log2(k);
        let ell = lg + 4;
        for n in [300, 1000] {
            let p = CodeParameters::scaled(k, n, ell).unwrap();
            let (fail, len_bad, label) = invert_all(&p, &mut rng, 5000);
            let closed = p.n + 2 * lg + 8 == p.n + 2 * p.ell && p.n + k + 3 * lg + 12 == p.dense_len();
            ok &= fail == 0 && len_bad == 0 && closed;
            parts.push(format!("{label}: {fail} failures, {len_bad} length mismatches"));
        }
    }
    // the suite-1 marker length, where T_d is not used
    let p = scaled(2, 500);
    let (fail, len_bad, label) = invert_all(&p, &mut rng, 10_000);
    ok &= fail == 0 && len_bad == 0;
    parts.push(format!("{label}: {fail} failures, {len_bad} length mismatches"));
    Outcome::hard(ok, parts.join("; "))
}

fn criterion7() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let ns: Vec<usize> = (12..=18).map(|e| 1 << e).collect();
    for k in [2, 3, 4] {
        let rows = stats_rows(&scaled(k, ns[0]), &ns).unwrap();
        let mut ratios = Vec::new();
        for r in &rows {
            let p = scaled(k, r.n);
            let widths: usize = (0..p.syndromes)
                .map(|j| {
                    let bound = (p.block_len as u128).checked_pow(j as u32 + 1).unwrap_or(u128::MAX).min(1 << 61);
                    let q = next_prime_above(bound as u64);
                    (u64::BITS - (q - 1).leading_zeros()) as usize
                })
                .sum();
            let closed = (2 * p.ell + p.m) + (k + 1) + (3 + ceil_log2(6 * r.n)) + 2 * widths;
            ok &= closed == r.redundancy && r.total == r.n + r.redundancy;
            ok &= r.dense + r.buffer + r.locator + r.corrector == r.redundancy;
            let excess = r.redundancy as f64 - (r.n as f64).log2();
            ratios.push(excess / r.shape);
        }
        // least-squares C through the origin, then require the ratio not to grow
        let c = rows
            .iter()
            .zip(&ratios)
            .map(|(r, q)| q * r.shape * r.shape)
            .sum::<f64>()
            / rows.iter().map(|r| r.shape * r.shape).sum::<f64>();
        let (first, last) = (ratios[0], *ratios.last().unwrap());
        ok &= last <= first * 1.05;
        parts.push(format!(
            "k={k}: N-n {}..{}, fitted C {c:.2}, ratio {first:.2} at 2^12 to {last:.2} at 2^18",
            rows[0].redundancy,
            rows.last().unwrap().redundancy
        ));
    }
    Outcome::hard(ok, parts.join("; "))
}

fn criterion8() -> Outcome {
    let n = 1_000_000;
    let t0 = Instant::now();
    let codec = Codec::new(&scaled(2, n)).unwrap();
    let mut rng = SplitMix64::seed_from_u64(8);
    let u = message(&mut rng, n);
    let word = codec.encode(&u).unwrap();
    let t_enc = t0.elapsed();
    let pat = sample_with(&mut rng, word.len(), 2).unwrap();
    let y = pat.apply(&word).unwrap();
    let t1 = Instant::now();
    let back = codec.decode(&y);
    let t_dec = t1.elapsed();
    let total = t_enc + t_dec;
    let correct = back.as_ref().ok() == Some(&u);
    Outcome {
        ok: correct && total < Duration::from_secs(10),
        soft: true,
        detail: format!(
            "n=10^6 k=2: setup+encode {:.2}s, decode {:.2}s, total {:.2}s, recovered {correct}",
            t_enc.as_secs_f64(),
            t_dec.as_secs_f64(),
            total.as_secs_f64()
        ),
    }
}

/// Every reconstruction of `y` by `kp` localized insertions, deduplicated.
fn candidates(y: &[bool], kp: usize, k: usize, out: &mut Vec<Vec<bool>>) {
    out.clear();
    let len = y.len() + kp;
    for a in 1..=len - kp + 1 {
        let width = (a + k - 1).min(len) - a;
        for mask in 0u32..1 << width {
            if mask.count_ones() as usize != kp - 1 {
                continue;
            }
            let mut positions = vec![a];
            positions.extend((0..width).filter(|b| mask >> b & 1 == 1).map(|b| a + 1 + b as usize));
            for vals in 0u32..1 << kp {
                let h = Hypothesis {
                    positions: positions.clone(),
                    values: (0..kp).map(|i| vals >> i & 1 == 1).collect(),
                };
                out.push(h.apply(y));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
}

fn collisions(sketch: &dyn InnerSketch, y: &[bool], kp: usize, k: usize, buf: &mut Vec<Vec<bool>>) -> (u64, u64) {
    candidates(y, kp, k, buf);
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(buf.len());
    let mut hits = 0;
    for (i, c) in buf.iter().enumerate() {
        if seen.insert(sketch.fields(c), i).is_some() {
            hits += 1;
        }
    }
    let pairs = (buf.len() * buf.len().saturating_sub(1) / 2) as u64;
    (pairs, hits)
}

fn criterion9() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(9);
    let mut buf = Vec::new();
    let (mut pairs, mut hits) = (0u64, 0u64);
    let mut parts = Vec::new();
    for k in 1..=3 {
        for m in [8, 12, 16, 20, 24, 28, 32, 48, 64] {
            let sketch = PowerSumSketch::new(m, 2 * k + 1);
            let (mut p_here, mut h_here) = (0, 0);
            for kp in 1..=k {
                let ylen = m - kp;
                let mut scan = |y: &[bool]| {
                    let (p, h) = collisions(&sketch, y, kp, k, &mut buf);
                    p_here += p;
                    h_here += h;
                };
                if ylen <= 15 {
                    for v in 0u64..1 << ylen {
                        let y: Vec<bool> = (0..ylen).map(|i| v >> i & 1 == 1).collect();
                        scan(&y);
                    }
                } else {
                    for _ in 0..2000 {
                        let y = message(&mut rng, ylen);
                        scan(y.as_slice());
                    }
                }
            }
            pairs += p_here;
            hits += h_here;
            if h_here > 0 {
                parts.push(format!("M={m} k={k}: {h_here} collisions"));
            }
        }
    }
    parts.insert(
        0,
        format!("power-sum, M in 8..64, k in 1..3: {pairs} candidate pairs, {hits} collisions (blocks exhaustive up to 15 received bits, 2000 sampled above)"),
    );
    Outcome::hard(hits == 0, parts.join("; "))
}

fn main() {
    let only: Option<Vec<usize>> = std::env::var("LOCDEL_ACCEPT_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let want = |i: usize| only.as_ref().map_or(true, |o| o.contains(&i));

    let mut results: Vec<(usize, Outcome)> = Vec::new();
    if want(1) || want(4) || want(5) {
        let runs = suite1();
        if want(1) {
            results.push((1, criterion1(&runs)));
        }
        if want(4) {
            results.push((4, criterion4(&runs)));
        }
        if want(5) {
            results.push((5, criterion5(&runs)));
        }
    }
    let rest: [(usize, fn() -> Outcome); 6] = [
        (2, criterion2),
        (3, criterion3),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
        (9, criterion9),
    ];
    for (i, f) in rest {
        if want(i) {
            let t0 = Instant::now();
            let mut o = f();
            o.detail.push_str(&format!(" [{:.1}s]", t0.elapsed().as_secs_f64()));
            results.push((i, o));
        }
    }
    results.sort_by_key(|(i, _)| *i);

    let mut failed = false;
    for (i, o) in &results {
        let verdict = if o.ok { "PASS" } else { "FAIL" };
        let note = if o.soft { " (reported, not asserted)" } else { "" };
        println!("{verdict} criterion {i}{note}: {}", o.detail);
        failed |= !o.ok && !o.soft;
    }
    if failed {
        std::process::exit(1);
    }
}
