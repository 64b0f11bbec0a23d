//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! `cargo test --test acceptance -- <filter>` runs only criteria whose tag contains `filter`.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::{crossing, pair_upep, single_upep};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stcm::analysis::{
    diversity_min, loglog_slope, rate_matched_table, upep, upep_mbm, upep_stcm, DistanceSpectrum, PairwiseEvent,
    TradeoffTable,
};
use stcm::channel::{add_awgn, draw_extended_channel, RngStream};
use stcm::cli::{format_csv, simulate_rows, ExperimentSpec};
use stcm::codec::{build_equivalent_channel, transmit, Scheme, SchemeConfig};
use stcm::constellation::ConstellationKind::{self, Psk, Qam};
use stcm::detect::{
    detect_alamouti, detect_bruteforce, detect_exhaustive, detect_stcm_conditional, Codebook, Detection,
};
use stcm::matrix::CMatrix;
use stcm::sim::{SimOptions, Simulator, StopRule};

type Outcome = Result<String, String>;

fn cfg(s: Scheme, m: u32, q: usize, kind: ConstellationKind, rx: usize) -> SchemeConfig {
    SchemeConfig::new(s, m, q, kind, rx).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn diversity() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (scheme, want) in [(Scheme::Stcm1, 1), (Scheme::Stcm2, 2), (Scheme::Stcm3, 2)] {
        for m in [1u32, 2] {
            for q in [2usize, 4] {
                let d = diversity_min(&cfg(scheme, m, q, Psk, 1), 1 << 16).map_err(|e| e.to_string())?;
                ok &= d == want;
                lines.push(format!("{scheme} M={m} Q={q}: {d}"));
            }
        }
    }
    check(ok, lines.join("; "))
}

fn inner_ratio(c: &CMatrix) -> f64 {
    let (c1, c2) = (c.column(0), c.column(1));
    let inner: Complex64 = c1.iter().zip(c2).map(|(a, b)| a.conj() * b).sum();
    let n1: f64 = c1.iter().map(|x| x.norm_sqr()).sum();
    let n2: f64 = c2.iter().map(|x| x.norm_sqr()).sum();
    inner.norm() / (n1 * n2).sqrt()
}

fn orthogonality() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0u64;
    for m in 1..=4u32 {
        let half = 1usize << m;
        for trial in 0..1000u64 {
            let rx = 1 + (trial % 4) as usize;
            let ch = draw_extended_channel(rx, 2 * half, &mut RngStream::new(100 + u64::from(m), trial));
            for k in 1..=half {
                for l in 1..=half {
                    // Scheme 1 uses (k, l, k, l); Scheme 2 is its k = l subset
                    let c = build_equivalent_channel(&ch, k, l, k, l).map_err(|e| e.to_string())?;
                    worst = worst.max(inner_ratio(&c));
                    checked += 1;
                }
            }
        }
    }
    let ch = draw_extended_channel(2, 8, &mut RngStream::new(7, 7));
    let mut counter = None;
    'search: for k in 1..=4 {
        for l in (1..=4).filter(|&l| l != k) {
            let r = inner_ratio(&build_equivalent_channel(&ch, k, l, l, k).map_err(|e| e.to_string())?);
            if r > 0.1 {
                counter = Some((k, l, r));
                break 'search;
            }
        }
    }
    let detail = format!("{checked} pairs, worst |c1^H c2|/(|c1||c2|) = {worst:.2e}; Scheme 3 counterexample {counter:?}");
    check(worst <= 1e-12 && counter.is_some(), detail)
}

fn table_complexity(table: &TradeoffTable, name: &str) -> Option<u64> {
    table.iter().find(|(n, _)| *n == name).and_then(|(_, r)| r.as_ref()).map(|r| r.complexity)
}

fn detector_equivalence() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for c in [cfg(Scheme::Stcm1, 2, 4, Psk, 2), cfg(Scheme::Stcm2, 4, 8, Psk, 2)] {
        let book = Codebook::new(&c, 1 << 16).map_err(|e| e.to_string())?;
        let mut mismatches = 0;
        for i in 0..10_000u64 {
            let mut rng = RngStream::new(31, i);
            let snr = (i % 13) as f64;
            let block = rng.bits(c.bits_per_codeword());
            let ch = draw_extended_channel(c.rx(), c.channel_columns(), &mut rng);
            let y = add_awgn(&transmit(&c.encode_block(block), &ch), c.n0_for_snr_db(snr), &mut rng)
                .map_err(|e| e.to_string())?;
            let fast = detect_stcm_conditional(&y, &ch, &c).map_err(|e| e.to_string())?;
            let brute = detect_bruteforce(&y, &ch, &book).map_err(|e| e.to_string())?;
            mismatches += u32::from(fast.block != brute.block);
        }
        ok &= mismatches == 0;
        lines.push(format!("{} M={} Q={}: {mismatches} mismatches", c.scheme(), c.mirrors(), c.order()));
    }
    // metric counts at eta = 5 and 6 with M = 4
    for (eta, want) in [(5u32, [1024u64, 256, 1024]), (6, [2048, 512, 4096])] {
        let table = rate_matched_table(f64::from(eta), 4, 4);
        let mut got = Vec::new();
        for (name, scheme) in [
            ("STCM Scheme 1", Scheme::Stcm1),
            ("STCM Scheme 2", Scheme::Stcm2),
            ("STCM Scheme 3", Scheme::Stcm3),
        ] {
            let q = match scheme {
                Scheme::Stcm2 => 1usize << (eta - 2),
                _ => 1 << (eta - 4),
            };
            let c = cfg(scheme, 4, q, Psk, 1);
            let ch = draw_extended_channel(1, c.channel_columns(), &mut RngStream::new(3, u64::from(eta)));
            let y = transmit(&c.encode_block(0), &ch);
            let det: Detection = match scheme {
                Scheme::Stcm3 => detect_exhaustive(&y, &ch, &c),
                _ => detect_stcm_conditional(&y, &ch, &c),
            }
            .map_err(|e| e.to_string())?;
            got.push((table_complexity(&table, name), det.metric_count));
        }
        let matches = got.iter().zip(want).all(|(&(t, d), w)| t == Some(w) && d == w);
        ok &= matches;
        lines.push(format!("eta={eta}: (table, detector) {got:?} want {want:?}"));
    }
    let a = cfg(Scheme::Alamouti, 0, 16, Qam, 1);
    let ch = draw_extended_channel(1, 2, &mut RngStream::new(3, 9));
    let det = detect_alamouti(&transmit(&a.encode_block(0), &ch), &ch, &a).map_err(|e| e.to_string())?;
    let table = table_complexity(&rate_matched_table(4.0, 4, 4), "Alamouti's STBC");
    ok &= det.metric_count == 32 && table == Some(32);
    lines.push(format!("Alamouti 16-QAM: table {table:?} detector {}", det.metric_count));
    check(ok, lines.join("; "))
}

fn sweep(c: &SchemeConfig, snrs: &[f64], stop: StopRule, seed: u64) -> Result<Vec<stcm::sim::BerRecord>, String> {
    Simulator::new(c, SimOptions::default())
        .and_then(|s| s.run_sweep(snrs, stop, seed))
        .map_err(|e| e.to_string())
}

fn ssk_equals_mbm() -> Outcome {
    let ssk = SchemeConfig::ssk(16, 8).map_err(|e| e.to_string())?;
    let mbm = cfg(Scheme::MbmSimo, 4, 1, Psk, 8);
    let snrs: Vec<f64> = (-4..=8).step_by(2).map(f64::from).collect();
    let stop = StopRule::new(2000, 20_000_000).unwrap();
    let a = sweep(&ssk, &snrs, stop, 404)?;
    let b = sweep(&mbm, &snrs, stop, 404)?;
    let same = a.iter().zip(&b).all(|(x, y)| x.errors == y.errors && x.bits == y.bits);
    let c = sweep(&mbm, &snrs, stop, 405)?;
    let mut worst: f64 = 0.0;
    // points where neither run saw an error carry no comparison
    for (x, y) in a.iter().zip(&c).filter(|(x, y)| x.errors + y.errors > 0) {
        let sigma = (x.sigma().powi(2) + y.sigma().powi(2)).sqrt();
        worst = worst.max((x.ber - y.ber).abs() / sigma);
    }
    let errors: Vec<u64> = a.iter().map(|r| r.errors).collect();
    check(
        same && worst <= 3.0,
        format!("shared streams identical: {same} (errors {errors:?}); independent seeds max |dBER|/sigma = {worst:.2}"),
    )
}

fn upep_cross_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let l: f64 = 10f64.powf(rng.random_range(-3.0..1.5));
        let n0: f64 = 10f64.powf(rng.random_range(-4.0..1.0));
        let r = rng.random_range(1..=8u32);
        let ratio: f64 = rng.random_range(0.01..0.5);
        let c = l / (4.0 * n0);
        worst = worst.max((upep(&[l], r as usize, n0) - single_upep(c, r)).abs());
        worst = worst.max((upep(&[l, l * ratio], r as usize, n0) - pair_upep(c, c * ratio, r)).abs());
    }
    let mut d1: f64 = 0.0;
    for r in 1..=8 {
        for n0 in [1e-4, 1e-2, 0.3, 3.0] {
            for d2 in [0.5, 2.0, 4.0] {
                let ev = PairwiseEvent {
                    from: 0,
                    to: 1,
                    lambdas: [d2, 0.0],
                    rank: 1,
                    bit_errors: 1,
                };
                let a = upep_stcm(&ev, r, n0).map_err(|e| e.to_string())?;
                let b = upep_mbm(d2, r, n0).map_err(|e| e.to_string())?;
                d1 = d1.max((a - b).abs());
            }
        }
    }
    check(
        worst <= 1e-10 && d1 <= 1e-12,
        format!("max |quadrature - closed form| = {worst:.2e}; D=1 max difference = {d1:.2e}"),
    )
}

fn theory_vs_simulation() -> Outcome {
    let stop = StopRule::new(5000, 200_000_000).unwrap();
    let seed = 2026;
    let mut lines = Vec::new();
    let mut ok = true;
    for c in [
        cfg(Scheme::MbmSimo, 4, 1, Psk, 8),
        cfg(Scheme::Stcm1, 4, 2, Psk, 2),
        cfg(Scheme::Stcm2, 4, 8, Psk, 2),
        cfg(Scheme::Stcm3, 4, 2, Psk, 2),
    ] {
        let spectrum = DistanceSpectrum::exact(&c, 1 << 16).map_err(|e| e.to_string())?;
        let bound = |snr: f64| spectrum.abep_bound(c.rx(), c.n0_for_snr_db(snr));
        let points: Vec<f64> = (-10..=40)
            .map(f64::from)
            .filter(|&s| (1e-4..=1e-3).contains(&bound(s)))
            .collect();
        if points.is_empty() {
            return Err(format!("{}: no grid point with bound in [1e-4, 1e-3]", c.scheme()));
        }
        let recs = sweep(&c, &points, stop, seed)?;
        let ratios: Vec<String> = recs
            .iter()
            .map(|r| {
                let b = bound(r.snr_db);
                ok &= r.ber <= b && r.ber >= b / 10.0;
                format!("{}dB {:.3}", r.snr_db, r.ber / b)
            })
            .collect();
        lines.push(format!("{} BER/bound [{}]", c.scheme(), ratios.join(", ")));
    }
    check(ok, lines.join("; "))
}

fn diversity_slope() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let snrs: Vec<f64> = (0..=40).map(f64::from).collect();
    for (scheme, q, d) in [(Scheme::Stcm1, 2usize, 1.0), (Scheme::Stcm2, 8, 2.0), (Scheme::Stcm3, 2, 2.0)] {
        let base = cfg(scheme, 4, q, Psk, 1);
        let spectrum = DistanceSpectrum::exact(&base, 1 << 16).map_err(|e| e.to_string())?;
        for rx in [1usize, 2] {
            let values: Vec<f64> = snrs.iter().map(|&s| spectrum.abep_bound(rx, base.n0_for_snr_db(s))).collect();
            let slope = loglog_slope(&snrs[30..], &values[30..]);
            let want = rx as f64 * d;
            ok &= (slope - want).abs() <= 0.15;
            lines.push(format!("{scheme} R={rx}: {slope:.3} (want {want})"));
        }
    }
    check(ok, lines.join("; "))
}

/// Brackets the SNR where the BER falls to `target` on a grid of `step` dB
/// around `start`, then interpolates.
fn required_snr(c: &SchemeConfig, target: f64, start: f64, step: f64, seed: u64) -> Result<f64, String> {
    let sim = Simulator::new(c, SimOptions::default()).map_err(|e| e.to_string())?;
    let stop = StopRule::new(400, (4000.0 / target) as u64).unwrap();
    // grid index i sits at start + i * step and always uses stream i + 1000
    let ber_at = |i: i64| -> Result<f64, String> {
        let snr = start + i as f64 * step;
        sim.run_point((i + 1000) as u64, snr, stop, seed)
            .map(|r| r.ber)
            .map_err(|e| e.to_string())
    };
    let mut i = 0i64;
    let mut ber = ber_at(i)?;
    while ber <= target {
        i -= 1;
        if i < -80 {
            return Err(format!("{} below {target} on the whole grid", c.scheme()));
        }
        ber = ber_at(i)?;
    }
    let mut points = vec![(start + i as f64 * step, ber)];
    while ber > target {
        i += 1;
        if i > 80 {
            return Err(format!("{} never reached {target}", c.scheme()));
        }
        ber = ber_at(i)?;
        points.push((start + i as f64 * step, ber));
    }
    crossing(&points, target).ok_or_else(|| format!("no crossing in {points:?}"))
}

fn figure_shapes() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    // (a) eta = 8: 256-QAM SIMO against MBM with 8 mirrors
    for (rx, start) in [(1usize, 20.0), (2, 10.0), (4, 4.0), (8, 0.0)] {
        let simo = required_snr(&cfg(Scheme::ClassicalSimo, 0, 256, Qam, rx), 1e-3, start, 1.0, 81)?;
        let mbm = required_snr(&cfg(Scheme::MbmSimo, 8, 1, Psk, rx), 1e-3, start, 1.0, 81)?;
        let want_simo = rx == 1;
        ok &= (simo < mbm) == want_simo;
        lines.push(format!("(a) R={rx}: SIMO {simo:.2} dB, MBM {mbm:.2} dB"));
    }
    // (b), (c) eta = 5, 6 with M = 4
    for eta in [5u32, 6] {
        for (rx, start) in [(2usize, 6.0), (4, 2.0)] {
            let kind = |q: usize| if q >= 4 && q.trailing_zeros().is_multiple_of(2) { Qam } else { Psk };
            let q1 = 1usize << (eta - 4);
            let q2 = 1usize << (eta - 2);
            let qa = 1usize << eta;
            let s1 = required_snr(&cfg(Scheme::Stcm1, 4, q1, kind(q1), rx), 1e-4, start, 1.0, 82)?;
            let s2 = required_snr(&cfg(Scheme::Stcm2, 4, q2, kind(q2), rx), 1e-4, start, 1.0, 82)?;
            let s3 = required_snr(&cfg(Scheme::Stcm3, 4, q1, kind(q1), rx), 1e-4, start, 1.0, 82)?;
            let al = required_snr(&cfg(Scheme::Alamouti, 0, qa, kind(qa), rx), 1e-4, start, 1.0, 82)?;
            ok &= s3 <= s2 && s3 <= s1 && s1.max(s2).max(s3) < al;
            if rx == 2 {
                ok &= s2 < s1;
            }
            lines.push(format!(
                "(b) eta={eta} R={rx}: S1 {s1:.2}, S2 {s2:.2}, S3 {s3:.2}, Alamouti {al:.2} dB"
            ));
        }
    }
    check(ok, lines.join("; "))
}

fn determinism() -> Outcome {
    let mut outputs = Vec::new();
    for workers in [1usize, 8] {
        let mut text = String::new();
        for (scheme, m, q) in [(Scheme::Stcm3, 2u32, 4usize), (Scheme::MbmSimo, 4, 1), (Scheme::Stcm1, 3, 2)] {
            let spec = ExperimentSpec {
                scheme,
                mirrors: m,
                order: q,
                rx: 2,
                snr_start: 0.0,
                snr_stop: 12.0,
                snr_step: 3.0,
                stop: StopRule::new(3000, 5_000_000).unwrap(),
                seed: 99,
                theory: true,
                workers,
                ..ExperimentSpec::default()
            };
            text.push_str(&format_csv(&simulate_rows(&spec).map_err(|e| e.to_string())?));
        }
        outputs.push(text);
    }
    check(
        outputs[0] == outputs[1],
        format!("{} CSV bytes, 1 vs 8 workers identical: {}", outputs[0].len(), outputs[0] == outputs[1]),
    )
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 9] = [
    ("1", "diversity enumeration", diversity),
    ("2", "orthogonality", orthogonality),
    ("3", "detector equivalence and metric counts", detector_equivalence),
    ("4", "SSK equals MBM", ssk_equals_mbm),
    ("5", "UPEP cross-check", upep_cross_check),
    ("6", "theory vs simulation", theory_vs_simulation),
    ("7", "diversity slope", diversity_slope),
    ("8", "figure shapes", figure_shapes),
    ("9", "determinism", determinism),
];

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected = |tag: &str, name: &str| {
        filters.is_empty() || filters.iter().any(|f| tag == f || name.contains(f.as_str()))
    };
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (tag, name, run) in CRITERIA {
        if !selected(tag, name) {
            continue;
        }
        let t = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS criterion {tag} ({name}, {secs:.1}s): {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {tag} ({name}, {secs:.1}s): {d}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
