mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, LogNormal, Normal};
use synaptogen::numerics::{cholesky, frobenius_relative_error};
use synaptogen::synapse_gen::{
    build_center_surround_cov, center_surround_kernel_matrix, export_kernels_pgm, generate_kernel_bank, kernel_stats,
    read_pgm, sample_lognormal, sample_normal, write_stats_csv, CenterSurroundParams, SynapseDistribution, FIELD_SIZE,
    LOGNORMAL_MU, LOGNORMAL_SIGMA2,
};
use synaptogen::Rng;

const N: usize = 200_000;

#[test]
fn normal_draws_have_unit_moments_and_pass_ks() {
    let x = sample_normal(&mut Rng::seed_from_u64(1), N);
    let (mean, var) = mean_var(x.data());
    assert!(mean.abs() <= 0.02, "mean {mean}");
    assert!((var - 1.0).abs() <= 0.02, "var {var}");
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let d = ks_statistic(x.data(), |v| std_normal.cdf(v));
    assert!(d < ks_critical(N), "KS {d}");
}

#[test]
fn lognormal_draws_match_the_analytic_mean_and_pass_ks() {
    let x = sample_lognormal(&mut Rng::seed_from_u64(2), N, LOGNORMAL_MU, LOGNORMAL_SIGMA2).unwrap();
    let target = (LOGNORMAL_MU + LOGNORMAL_SIGMA2 / 2.0).exp();
    assert!((target - 0.7911).abs() < 1e-3);
    let (mean, _) = mean_var(x.data());
    assert!((mean - target).abs() / target <= 0.01, "mean {mean} vs {target}");
    assert!(x.data().iter().all(|&v| v > 0.0));
    let dist = LogNormal::new(LOGNORMAL_MU, LOGNORMAL_SIGMA2.sqrt()).unwrap();
    let d = ks_statistic(x.data(), |v| dist.cdf(v));
    assert!(d < ks_critical(N), "KS {d}");
}

#[test]
fn lognormal_rejects_nonpositive_variance() {
    assert!(sample_lognormal(&mut Rng::seed_from_u64(0), 4, 0.0, 0.0).is_err());
}

#[test]
fn center_surround_empirical_covariance_is_within_five_percent() {
    let err = center_surround_cov_error(N, 3);
    assert!(err <= 0.05, "Frobenius relative error {err}");
}

#[test]
fn center_surround_matrix_is_symmetric_and_psd_before_jitter() {
    let p = CenterSurroundParams::default();
    let raw = center_surround_kernel_matrix(FIELD_SIZE, p.sigma_c, p.sigma_s, p.k);
    let n = FIELD_SIZE * FIELD_SIZE;
    for a in 0..n {
        for b in 0..n {
            assert_eq!(raw[a * n + b].to_bits(), raw[b * n + a].to_bits());
        }
    }
    let m = DMatrix::from_row_slice(n, n, &raw);
    let min_eig = m.symmetric_eigenvalues().min();
    assert!(min_eig >= -1e-10, "min eigenvalue {min_eig}");
}

#[test]
fn default_covariance_cholesky_reconstructs() {
    let cov = build_center_surround_cov(FIELD_SIZE, &CenterSurroundParams::default()).unwrap();
    let l = cholesky(&cov).unwrap();
    assert!(frobenius_relative_error(&l.reconstruct(), cov.entries()) <= 1e-10);
}

#[test]
fn surround_weight_beyond_the_bound_is_rejected() {
    let mut p = CenterSurroundParams::default();
    p.k = p.k_bound() * 1.5;
    assert!(build_center_surround_cov(FIELD_SIZE, &p).is_err());
}

#[test]
fn banks_are_reproducible_and_frozen() {
    for dist in [SynapseDistribution::Normal, SynapseDistribution::lognormal(), SynapseDistribution::center_surround()]
    {
        let a = generate_kernel_bank(&dist, 64, 3, 9).unwrap();
        let b = generate_kernel_bank(&dist, 64, 3, 9).unwrap();
        let c = generate_kernel_bank(&dist, 64, 3, 10).unwrap();
        assert_eq!(a.weights.shape(), &[64, 3, 5, 5]);
        assert!(a.frozen);
        assert!(a.weights.bitwise_eq(&b.weights));
        assert!(!a.weights.bitwise_eq(&c.weights));
    }
}

#[test]
fn pgm_export_round_trips_the_rescaled_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let bank = generate_kernel_bank(&SynapseDistribution::center_surround(), 64, 1, 4).unwrap();
    let paths = export_kernels_pgm(&bank, dir.path()).unwrap();
    assert_eq!(paths.len(), 64);
    for (path, slice) in paths.iter().zip(bank.weights.data().chunks_exact(25)) {
        let pgm = read_pgm(path).unwrap();
        assert_eq!((pgm.width, pgm.height), (5, 5));
        let min = slice.iter().copied().fold(f64::INFINITY, f64::min);
        let max = slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let expected: Vec<u8> = slice.iter().map(|v| ((v - min) / (max - min) * 255.0).round() as u8).collect();
        assert_eq!(pgm.pixels, expected);
        assert!(pgm.pixels.contains(&0) && pgm.pixels.contains(&255));
    }
}

#[test]
fn stats_csv_has_one_row_per_bank() {
    let dir = tempfile::tempdir().unwrap();
    let bank = generate_kernel_bank(&SynapseDistribution::Normal, 64, 1, 0).unwrap();
    let path = dir.path().join("stats.csv");
    write_stats_csv(&[("a".into(), kernel_stats(&bank)), ("b".into(), kernel_stats(&bank))], &path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "bank_id,mean,var,min,max");
    assert_eq!(lines.len(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kernel_stats_bounds_hold(seed in any::<u64>(), channels in 1usize..=3) {
        let bank = generate_kernel_bank(&SynapseDistribution::lognormal(), 8, channels, seed).unwrap();
        let s = kernel_stats(&bank);
        prop_assert_eq!(s.count, 8 * channels * 25);
        prop_assert!(s.min > 0.0);
        prop_assert!(s.min <= s.mean && s.mean <= s.max);
        prop_assert!(s.variance >= 0.0);
    }

    #[test]
    fn admissible_surround_weights_give_a_factorable_matrix(
        sigma_c in 0.5f64..2.0,
        ratio in 1.2f64..4.0,
        frac in 0.0f64..0.95,
    ) {
        let sigma_s = sigma_c * ratio;
        let mut p = CenterSurroundParams { sigma_c, sigma_s, ..CenterSurroundParams::default() };
        p.k = frac * p.k_bound();
        p.epsilon = 1e-6;
        let cov = build_center_surround_cov(FIELD_SIZE, &p).unwrap();
        prop_assert!(cholesky(&cov).is_ok());
    }
}
