use nalgebra::DMatrix;
use qilab::channels::{
    action_distance, closeness_report, compress, fidelity, from_action, operator_norm,
    pure_state_matrix, renormalize_tp, renyi_entropy, sandwich_epsilon, trace_norm,
    QuantumChannel,
};
use qilab::ensembles::sample_haar_vector;
use qilab::linalg::{cr, hermitian_eigenvalues, CMat};
use qilab::operators::werner;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_density(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    // mixed rank-d state from a purification
    let psi = sample_haar_vector(d * d, rng);
    let full = pure_state_matrix(&psi);
    let mut rho = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                rho[(i, j)] += full[(i * d + k, j * d + k)];
            }
        }
    }
    rho
}

#[test]
fn identity_channel_has_trivial_dilation() {
    let ch = QuantumChannel::identity(3);
    assert_eq!(ch.kraus_count(), 1);
    assert_eq!(ch.kraus_rank(), 1);
    let (v, dim_env) = ch.stinespring();
    assert_eq!(dim_env, 1);
    let round = QuantumChannel::from_stinespring(&v, dim_env).unwrap();
    assert!(action_distance(&ch, &round) < 1e-12);
}

#[test]
fn fully_randomizing_channel_has_maximal_kraus_rank() {
    for d in [2usize, 3, 4] {
        let ch = QuantumChannel::fully_randomizing(d);
        assert_eq!(ch.kraus_rank(), d * d);
        assert!(ch.tp_residual() < 1e-12);
        // every state goes to the maximally mixed one
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let rho = random_density(d, &mut rng);
        let out = ch.apply(&rho);
        let target = CMat::identity(d, d) * cr(1.0 / d as f64);
        assert!((out - target).norm() < 1e-10);
    }
}

#[test]
fn stinespring_round_trip_preserves_random_isometry_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let ch = QuantumChannel::random_isometry(3, 3, 4, &mut rng).unwrap();
        let (v, dim_env) = ch.stinespring();
        let round = QuantumChannel::from_stinespring(&v, dim_env).unwrap();
        assert!(action_distance(&ch, &round) < 1e-9);
        // and the actions agree on 20 sampled states as well
        for _ in 0..20 {
            let rho = random_density(3, &mut rng);
            assert!((ch.apply(&rho) - round.apply(&rho)).norm() < 1e-9);
        }
    }
}

#[test]
fn non_tp_kraus_set_is_rejected() {
    let k = CMat::identity(2, 2) * cr(0.9);
    assert!(QuantumChannel::from_kraus(vec![k.clone()]).is_err());
    assert!(QuantumChannel::from_kraus_cp(vec![k]).is_ok());
}

#[test]
fn compression_reconstructs_the_channel_in_expectation() {
    // E_φ N_φ = N because E φφ† = Id/|E|
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ch = QuantumChannel::random_isometry(3, 3, 5, &mut rng).unwrap();
    let rho = random_density(3, &mut rng);
    let target = ch.apply(&rho);
    let hat = compress(&ch, 10_000, &mut rng).unwrap();
    let mean = hat.apply(&rho);
    assert!(
        (mean - target).norm() < 1e-2,
        "10^4-sample mean failed to reconstruct the action"
    );
}

#[test]
fn trivial_environment_compresses_exactly() {
    let ch = QuantumChannel::identity(3);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let hat = compress(&ch, 7, &mut rng).unwrap();
    assert!(action_distance(&ch, &hat) < 1e-12);
    assert!(hat.tp_residual() < 1e-12);
}

#[test]
fn randomizing_channel_compresses_with_small_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let ch = QuantumChannel::fully_randomizing(4);
    let hat = renormalize_tp(&compress(&ch, 300, &mut rng).unwrap()).unwrap();
    let report = closeness_report(&ch, &hat, 100, &mut rng).unwrap();
    assert!(
        report.error_1to1 <= 0.3,
        "1→1 error {} beyond calibration",
        report.error_1to1
    );
    assert!(report.tp_residual < 1e-9);
}

#[test]
fn compressed_outputs_stay_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let ch = QuantumChannel::random_isometry(3, 2, 6, &mut rng).unwrap();
    let hat = compress(&ch, 40, &mut rng).unwrap();
    for _ in 0..20 {
        let psi = sample_haar_vector(3, &mut rng);
        let out = hat.apply(&pure_state_matrix(&psi));
        let min_eig = hermitian_eigenvalues(&out)[0];
        assert!(min_eig >= -1e-10, "negative output eigenvalue {min_eig}");
    }
}

#[test]
fn renormalization_is_exact_and_gentle() {
    // already TP → unchanged
    let ch = QuantumChannel::fully_randomizing(3);
    let renorm = renormalize_tp(&ch).unwrap();
    assert!(action_distance(&ch, &renorm) < 1e-12);

    // S = (1+δ)·Id → uniform rescale by (1+δ)^{-1/2}
    let delta = 0.3f64;
    let scaled = QuantumChannel::from_kraus_cp(
        ch.kraus().iter().map(|k| k * cr((1.0 + delta).sqrt())).collect(),
    )
    .unwrap();
    let fixed = renormalize_tp(&scaled).unwrap();
    assert!(action_distance(&ch, &fixed) < 1e-12);

    // random compressed channel: exact TP afterwards, action change within
    // the 3‖S − Id‖_∞ audit bound on sampled states
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let orig = QuantumChannel::random_isometry(3, 3, 4, &mut rng).unwrap();
    let hat = compress(&orig, 200, &mut rng).unwrap();
    let fixed = renormalize_tp(&hat).unwrap();
    assert!(fixed.tp_residual() < 1e-10);
    let s_drift = hat.tp_residual();
    for _ in 0..20 {
        let psi = sample_haar_vector(3, &mut rng);
        let rho = pure_state_matrix(&psi);
        let change = trace_norm(&(fixed.apply(&rho) - hat.apply(&rho)));
        assert!(
            change <= 3.0 * s_drift + 1e-9,
            "renormalization moved the action by {change} > 3·{s_drift}"
        );
    }
}

#[test]
fn renormalization_rejects_singular_normalizations() {
    let mut k = CMat::zeros(2, 2);
    k[(0, 0)] = cr(1.0); // S = diag(1, 0)
    let ch = QuantumChannel::from_kraus_cp(vec![k]).unwrap();
    assert!(renormalize_tp(&ch).is_err());
}

#[test]
fn identical_channels_report_zero_gaps() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let ch = QuantumChannel::random_isometry(3, 3, 3, &mut rng).unwrap();
    let report = closeness_report(&ch, &ch.clone(), 20, &mut rng).unwrap();
    assert!(report.error_1to1 < 1e-12);
    assert!(report.error_1to2 < 1e-12);
    assert!(report.error_1toinf < 1e-12);
    assert!(report.entropy_gap_2 < 1e-10);
    assert!(report.entropy_gap_inf < 1e-10);
    assert!(report.fidelity_gap < 1e-10);
}

#[test]
fn entropy_and_fidelity_gaps_obey_the_sandwich_bounds() {
    // whenever the operator sandwich holds with ε, the ∞-entropy gap is at
    // most 4ε and the fidelity gap at most (3/√2)√ε
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let ch = QuantumChannel::fully_randomizing(3);
    let hat = compress(&ch, 400, &mut rng).unwrap();
    let d = 3;
    let reference = CMat::identity(d, d) * cr(1.0 / d as f64);
    for _ in 0..25 {
        let psi = sample_haar_vector(d, &mut rng);
        let rho = pure_state_matrix(&psi);
        let eps = sandwich_epsilon(&ch, &hat, &rho);
        let (out, out_hat) = (ch.apply(&rho), hat.apply(&rho));
        let gap_inf =
            (renyi_entropy(&out_hat, f64::INFINITY) - renyi_entropy(&out, f64::INFINITY)).abs();
        assert!(gap_inf <= 4.0 * eps + 1e-8, "S_inf gap {gap_inf} > 4·{eps}");
        let gap_2 = (renyi_entropy(&out_hat, 2.0) - renyi_entropy(&out, 2.0)).abs();
        assert!(gap_2 <= 8.0 * eps + 1e-8, "S_2 gap {gap_2} > (2/(2-1))·4·{eps}");
        let gap_f =
            (fidelity(&out_hat, &reference) - fidelity(&out, &reference)).abs();
        assert!(
            gap_f <= 3.0 / 2.0f64.sqrt() * eps.sqrt() + 1e-8,
            "fidelity gap {gap_f} > (3/√2)√{eps}"
        );
    }
}

#[test]
fn conjugate_channel_duality_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let ch = QuantumChannel::random_isometry(3, 4, 3, &mut rng).unwrap();
    for _ in 0..10 {
        let x = random_density(3, &mut rng);
        let y = random_density(4, &mut rng);
        let lhs: f64 = (ch.apply(&x) * &y).trace().re;
        let rhs: f64 = (&x * ch.dual_apply(&y)).trace().re;
        assert!((lhs - rhs).abs() < 1e-10, "duality gap {}", (lhs - rhs).abs());
    }
    // dual of a TP map is unital
    let unit = ch.dual_apply(&CMat::identity(4, 4));
    assert!((unit - CMat::identity(3, 3)).norm() < 1e-10);
}

#[test]
fn compression_error_trend_is_monotone_in_median() {
    let ch = QuantumChannel::fully_randomizing(4);
    let mut medians = Vec::new();
    for &n in &[50usize, 200, 800] {
        let mut errs: Vec<f64> = (0..20)
            .map(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
                let hat = renormalize_tp(&compress(&ch, n, &mut rng).unwrap()).unwrap();
                closeness_report(&ch, &hat, 30, &mut rng).unwrap().error_1to1
            })
            .collect();
        errs.sort_by(f64::total_cmp);
        medians.push((errs[9] + errs[10]) / 2.0);
    }
    assert!(
        medians[0] >= medians[1] && medians[1] >= medians[2],
        "medians not non-increasing: {medians:?}"
    );
}

#[test]
fn werner_channel_statics() {
    let d = 3;
    for (lambda, expected_rank) in [(0.0, d * (d - 1) / 2), (0.3, d * d), (1.0, d * (d + 1) / 2)] {
        let ch = QuantumChannel::werner(lambda, d).unwrap();
        assert!(ch.tp_residual() < 1e-9);
        assert_eq!(ch.kraus_rank(), expected_rank, "λ = {lambda}");

        // Choi state is the Werner state with symmetric weight
        // μ = λ(d+1)/(d+2λ−1)
        let mu = lambda * (d as f64 + 1.0) / (d as f64 + 2.0 * lambda - 1.0);
        let tau = ch.choi() * cr(1.0 / d as f64);
        let target = werner(mu, d).unwrap();
        assert!(
            (tau - target.matrix()).norm() < 1e-9,
            "Choi ≠ Werner(μ) at λ = {lambda}"
        );
    }
}

#[test]
fn werner_channel_outputs_are_very_mixed() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for d in [2usize, 3, 4] {
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let ch = QuantumChannel::werner(lambda, d).unwrap();
            let expected = if lambda >= 0.5 {
                2.0 * lambda / (d as f64 + 2.0 * lambda - 1.0)
            } else {
                1.0 / (d as f64 + 2.0 * lambda - 1.0)
            };
            let mut seen: f64 = 0.0;
            for _ in 0..30 {
                let psi = sample_haar_vector(d, &mut rng);
                let out = ch.apply(&pure_state_matrix(&psi));
                seen = seen.max(operator_norm(&out));
            }
            assert!(seen <= 2.0 / d as f64 + 1e-9, "mixedness bound violated");
            assert!(seen <= expected + 1e-9);
            // pure inputs attain the closed-form maximum
            assert!((seen - expected).abs() < 1e-6, "d={d} λ={lambda}: {seen} vs {expected}");
        }
    }
}

#[test]
fn from_action_recovers_kraus_form() {
    // dephasing on qubits: X ↦ diag(X)
    let ch = from_action(2, 2, |x| {
        let mut out: CMat = DMatrix::zeros(2, 2);
        out[(0, 0)] = x[(0, 0)];
        out[(1, 1)] = x[(1, 1)];
        out
    })
    .unwrap();
    assert_eq!(ch.kraus_rank(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let rho = random_density(2, &mut rng);
    let out = ch.apply(&rho);
    assert!((out[(0, 1)].norm() + out[(1, 0)].norm()) < 1e-10);
    assert!((out[(0, 0)] - rho[(0, 0)]).norm() < 1e-10);
}
