use qilab::ensembles::*;
use qilab::limits::{ks_statistic, LimitLaw};
use qilab::linalg::CMat;
use qilab::operators::TensorLayout;

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn gue_second_moment_and_mean_zero() {
    // E Tr G² = n² (single Wick pairing); E Tr G = 0
    let mut rng = SeededStream::new(42, 0).rng();
    let n = 4;
    let mut tr2 = Vec::with_capacity(20_000);
    let mut tr1 = Vec::with_capacity(20_000);
    for _ in 0..20_000 {
        let g = sample_gue(n, &mut rng);
        tr1.push(g.trace());
        tr2.push(g.inner(&g));
    }
    let (m2, se2) = mean_stderr(&tr2);
    assert!((m2 - 16.0).abs() < 3.0 * se2, "E Tr G² = {m2} ± {se2}");
    let (m1, se1) = mean_stderr(&tr1);
    assert!(m1.abs() < 3.0 * se1, "E Tr G = {m1} ± {se1}");
}

#[test]
fn wishart_first_and_second_moments() {
    // E Tr W = ns; E Tr W² = ns² + n²s
    let mut rng = SeededStream::new(43, 0).rng();
    let (n, s) = (4usize, 3usize);
    let mut t1 = Vec::with_capacity(20_000);
    let mut t2 = Vec::with_capacity(20_000);
    for _ in 0..20_000 {
        let w = sample_wishart(n, s, &mut rng);
        t1.push(w.trace());
        t2.push(w.inner(&w));
    }
    let (m1, se1) = mean_stderr(&t1);
    assert!((m1 - 12.0).abs() < 3.0 * se1, "E Tr W = {m1} ± {se1}");
    let exact2 = (n * s * s + n * n * s) as f64;
    let (m2, se2) = mean_stderr(&t2);
    assert!((m2 - exact2).abs() < 3.0 * se2, "E Tr W² = {m2} ± {se2}");
}

#[test]
fn induced_state_is_a_density() {
    let mut rng = SeededStream::new(44, 0).rng();
    for _ in 0..20 {
        let rho = sample_induced(6, 5, &mut rng).unwrap();
        assert!((rho.op().trace() - 1.0).abs() < 1e-12);
        assert!(rho.op().min_eigenvalue() >= -1e-12);
    }
}

#[test]
fn haar_unitary_is_unitary_and_matches_haar_vector() {
    let mut rng = SeededStream::new(45, 0).rng();
    let n = 5;
    for _ in 0..10 {
        let u = sample_haar_unitary(n, &mut rng);
        let res = (u.adjoint() * &u - CMat::identity(n, n)).norm();
        assert!(res < 1e-10, "unitarity residual {res}");
    }
    // first-moment test: per-coordinate |component|² of the first column vs
    // direct Haar vectors; both should average 1/n
    let reps = 4000;
    let mut col = vec![0.0f64; n];
    let mut vecs = vec![0.0f64; n];
    for _ in 0..reps {
        let u = sample_haar_unitary(n, &mut rng);
        let v = sample_haar_vector(n, &mut rng);
        for i in 0..n {
            col[i] += u[(i, 0)].norm_sqr();
            vecs[i] += v[i].norm_sqr();
        }
    }
    for i in 0..n {
        let a = col[i] / reps as f64;
        let b = vecs[i] / reps as f64;
        // se of |z|² means at 1/n scale is about 1/(n sqrt(reps)) ≈ 0.003
        assert!((a - b).abs() < 0.02, "coordinate {i}: {a} vs {b}");
        assert!((a - 1.0 / n as f64).abs() < 0.02);
    }
}

#[test]
fn subspace_projector_is_a_projector() {
    let mut rng = SeededStream::new(46, 0).rng();
    let p = sample_subspace_projector(6, 2, &mut rng);
    assert!((p.trace() - 2.0).abs() < 1e-9);
    let p2 = qilab::operators::HermitianOperator::symmetrized(
        TensorLayout::single(6),
        p.matrix() * p.matrix(),
    );
    assert!(p.frobenius_distance(&p2) < 1e-9);
}

#[test]
fn streams_are_deterministic_and_independent() {
    let a = {
        let mut rng = SeededStream::new(7, 3).rng();
        sample_gue(4, &mut rng)
    };
    let b = {
        let mut rng = SeededStream::new(7, 3).rng();
        sample_gue(4, &mut rng)
    };
    assert_eq!(a.matrix(), b.matrix());
    let c = {
        let mut rng = SeededStream::new(7, 4).rng();
        sample_gue(4, &mut rng)
    };
    assert_ne!(a.matrix(), c.matrix());
}

#[test]
fn pair_embedding_fast_path_matches_dense_eigensolve() {
    // eigenvalues of M̃(1)+M̃(2) on A⊗B⊗B via the SWAP block fast path must
    // equal the dense eigensolve of the explicitly embedded sum
    let d = 3usize;
    let mut rng = SeededStream::new(47, 0).rng();
    for wishart in [true, false] {
        let m = if wishart {
            sample_wishart(d * d, d * d, &mut rng)
        } else {
            sample_gue(d * d, &mut rng)
        };
        let m = m
            .with_layout(TensorLayout::new(vec![d, d]).unwrap())
            .unwrap();
        let fast = embedded_pair_eigenvalues(&m, d).unwrap();
        let layout = TensorLayout::uniform(d, 3);
        let dense = m
            .embed(&layout, &[0, 1])
            .unwrap()
            .add(&m.embed(&layout, &[0, 2]).unwrap())
            .eigenvalues();
        assert_eq!(fast.len(), dense.len());
        for (a, b) in fast.iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }
}

#[test]
fn single_rep_single_dim_histogram() {
    let fam = SpectrumFamily::Plain(EnsembleSpec::Gue { n: 1 });
    let (hist, pooled) = empirical_spectrum(&fam, 1, 1, &SeededStream::new(48, 0)).unwrap();
    assert_eq!(pooled.len(), 1);
    assert_eq!(hist.counts.iter().sum::<u64>(), 1);
}

#[test]
fn plain_wishart_spectrum_matches_mp1() {
    // W(16,16)/16 pooled over 100 reps vs MP(1)
    let fam = SpectrumFamily::Scaled(EnsembleSpec::Wishart { n: 16, s: 16 }, 1.0 / 16.0);
    let (_, pooled) = empirical_spectrum(&fam, 100, 24, &SeededStream::new(49, 0)).unwrap();
    let law = LimitLaw::MarchenkoPastur { lambda: 1.0 };
    let ks = ks_statistic(&pooled, &|x| law.cdf(x)).unwrap();
    assert!(ks < 0.08, "K-S to MP(1) = {ks}");
}

#[test]
fn plain_gue_spectrum_matches_sc1() {
    // GUE(16)/4 pooled over 100 reps vs SC(1)
    let fam = SpectrumFamily::Scaled(EnsembleSpec::Gue { n: 16 }, 0.25);
    let (_, pooled) = empirical_spectrum(&fam, 100, 24, &SeededStream::new(50, 0)).unwrap();
    let law = LimitLaw::Semicircle { variance: 1.0 };
    let ks = ks_statistic(&pooled, &|x| law.cdf(x)).unwrap();
    assert!(ks < 0.08, "K-S to SC(1) = {ks}");
}

#[test]
fn modified_families_small_instance_spectra() {
    // desk-scale versions of the d=12 / d=10 figures: same construction,
    // smaller d, looser K-S cutoffs
    let fam = SpectrumFamily::ModifiedWishart { d: 6, k: 2, c: 1.0 };
    let (_, pooled) = empirical_spectrum(&fam, 30, 24, &SeededStream::new(51, 0)).unwrap();
    let mp2 = LimitLaw::MarchenkoPastur { lambda: 2.0 };
    let ks = ks_statistic(&pooled, &|x| mp2.cdf(x)).unwrap();
    assert!(ks < 0.12, "K-S to MP(2) = {ks}");

    let fam = SpectrumFamily::ModifiedGue { d: 6, k: 2 };
    let (_, pooled) = empirical_spectrum(&fam, 30, 24, &SeededStream::new(52, 0)).unwrap();
    let sc2 = LimitLaw::Semicircle { variance: 2.0 };
    let ks = ks_statistic(&pooled, &|x| sc2.cdf(x)).unwrap();
    assert!(ks < 0.12, "K-S to SC(2) = {ks}");
}
