mod common;

use common::{pair_upep, single_upep, trapezoid_theta};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stcm::analysis::{abep_bound_mbm, upep, upep_mbm, upep_stcm, DistanceSpectrum, PairwiseEvent};
use stcm::channel::{add_awgn, draw_extended_channel, RngStream};
use stcm::codec::{Scheme, SchemeConfig};
use stcm::constellation::ConstellationKind;
use stcm::matrix::CMatrix;
use stcm::sim::{run_point, StopRule};

#[test]
fn single_lambda_matches_closed_form() {
    for &c in &[1e-6, 1e-3, 0.1, 0.5, 1.0, 7.3, 250.0, 1e5] {
        for r in 1..=8u32 {
            let q = upep(&[4.0 * c], r as usize, 1.0);
            assert!((q - single_upep(c, r)).abs() < 1e-12, "c={c} r={r}");
        }
    }
}

#[test]
fn mbm_example_point() {
    // d^2 = 2, N0 = 0.5 gives c = 1, mu = sqrt(1/2)
    let mu = 0.5f64.sqrt();
    let want = 0.5 * (1.0 - mu);
    assert!((upep_mbm(2.0, 1, 0.5).unwrap() - want).abs() < 1e-13);
    assert!((want - single_upep(1.0, 1)).abs() < 1e-15);
}

#[test]
fn partial_fraction_oracle_is_self_consistent() {
    // a vanishing second root leaves the single-root closed form
    for r in 1..=6 {
        let a = pair_upep(2.5, 1e-13, r);
        assert!((a - single_upep(2.5, r)).abs() < 1e-11, "r={r}");
    }
}

#[test]
fn quadrature_matches_trapezoid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let l1: f64 = 10f64.powf(rng.random_range(-2.0..1.3));
        let l2: f64 = l1 * rng.random_range(0.05..1.0);
        let n0: f64 = 10f64.powf(rng.random_range(-2.0..0.5));
        let r = rng.random_range(1..=6usize);
        let (c1, c2) = (l1 / (4.0 * n0), l2 / (4.0 * n0));
        let f = |s: f64| (s / (s + c1)).powi(r as i32) * (s / (s + c2)).powi(r as i32);
        let oracle = trapezoid_theta(f, 1_000_000);
        let q = upep(&[l1, l2], r, n0);
        assert!((q - oracle).abs() < 1e-12, "{l1} {l2} {n0} {r}: {q} vs {oracle}");
    }
}

#[test]
fn d1_specialisation_is_the_mbm_formula() {
    let ev = PairwiseEvent {
        from: 0,
        to: 1,
        lambdas: [2.0, 0.0],
        rank: 1,
        bit_errors: 1,
    };
    for r in 1..5 {
        for n0 in [0.01, 0.3, 2.0] {
            let a = upep_stcm(&ev, r, n0).unwrap();
            let b = upep_mbm(2.0, r, n0).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn bound_limits() {
    let cfg = SchemeConfig::new(Scheme::Stcm1, 4, 2, ConstellationKind::Psk, 1).unwrap();
    let s = DistanceSpectrum::exact(&cfg, 1 << 16).unwrap();
    assert_eq!(s.total_pairs(), 1024 * 1023);
    assert!(s.abep_bound(1, 1e6) > 0.5);
    let mut prev = f64::INFINITY;
    for db in (-20..=40).step_by(5) {
        let b = s.abep_bound(1, cfg.n0_for_snr_db(f64::from(db)));
        assert!(b < prev);
        prev = b;
    }
}

#[test]
fn plain_mbm_bound_weights() {
    let n0 = 0.3;
    let p = upep_mbm(2.0, 3, n0).unwrap();
    let b = abep_bound_mbm(2, 1, ConstellationKind::Psk, 3, n0, 1 << 16).unwrap();
    assert!((b - 2.0 * p).abs() < 1e-15);
}

#[test]
fn alamouti_bpsk_simulation_matches_exact_ber() {
    // with BPSK each bit errs exactly when its own pairwise event does: lambda = (4, 4)
    let cfg = SchemeConfig::new(Scheme::Alamouti, 0, 2, ConstellationKind::Psk, 1).unwrap();
    for snr in [4.0, 10.0] {
        let n0 = cfg.n0_for_snr_db(snr);
        let exact = single_upep(1.0 / n0, 2);
        let rec = run_point(&cfg, snr, StopRule::new(4000, 50_000_000).unwrap(), 23).unwrap();
        let sigma = (exact * (1.0 - exact) / rec.bits as f64).sqrt();
        assert!((rec.ber - exact).abs() < 4.0 * sigma, "{snr} dB: {} vs {exact}", rec.ber);
    }
}

fn kolmogorov_exp(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-x).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn channel_gain_power_is_unit_exponential() {
    let mut rng = RngStream::new(4, 2);
    let ch = draw_extended_channel(10, 10_000, &mut rng);
    let mut p: Vec<f64> = ch.matrix().as_slice().iter().map(|h| h.norm_sqr()).collect();
    let d = kolmogorov_exp(&mut p);
    // critical value at significance 0.001
    let crit = (-(0.001f64 / 2.0).ln() / 2.0).sqrt() / (p.len() as f64).sqrt();
    assert!(d < crit, "KS statistic {d} exceeds {crit}");
}

#[test]
fn channel_moments() {
    let mut rng = RngStream::new(8, 3);
    let ch = draw_extended_channel(4, 250_000, &mut rng);
    let s = ch.matrix().as_slice();
    let n = s.len() as f64;
    let mean: Complex64 = s.iter().sum::<Complex64>() / n;
    let var = s.iter().map(|h| h.norm_sqr()).sum::<f64>() / n;
    let corr = s.iter().map(|h| h.re * h.im).sum::<f64>() / n / 0.5;
    assert!(mean.norm() < 0.01);
    assert!((var - 1.0).abs() < 0.01);
    assert!(corr.abs() < 0.01);
}

#[test]
fn noise_variance() {
    let n0 = 0.37;
    let zero = CMatrix::zeros(1000, 1000);
    let y = add_awgn(&zero, n0, &mut RngStream::new(5, 5)).unwrap();
    let var = y.frobenius_sqr() / 1e6;
    assert!((var / n0 - 1.0).abs() < 0.01);
    let again = add_awgn(&zero, n0, &mut RngStream::new(5, 5)).unwrap();
    assert_eq!(y, again);
}

#[test]
fn random_triples_match_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let l: f64 = 10f64.powf(rng.random_range(-3.0..1.3));
        let n0: f64 = 10f64.powf(rng.random_range(-4.0..1.0));
        let r = rng.random_range(1..=8u32);
        let c = l / (4.0 * n0);
        assert!((upep(&[l], r as usize, n0) - single_upep(c, r)).abs() < 1e-10);
        let ratio = rng.random_range(0.01..0.3);
        let got = upep(&[l, l * ratio], r as usize, n0);
        assert!((got - pair_upep(c, c * ratio, r)).abs() < 1e-10);
        assert!((upep(&[l, l], r as usize, n0) - single_upep(c, 2 * r)).abs() < 1e-10);
    }
}
