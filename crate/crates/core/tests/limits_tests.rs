use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use qilab::combinatorics::{catalan, mp_moment, sc_moment};
use qilab::limits::*;

#[test]
fn mp_density_normalization_and_moments() {
    for lambda in [0.5f64, 1.0, 2.0] {
        let law = LimitLaw::MarchenkoPastur { lambda };
        assert!((law.moment(0) - 1.0).abs() < 1e-7, "mass at λ={lambda}");
        assert!((law.moment(1) - lambda).abs() < 1e-7, "mean at λ={lambda}");
        let m2 = lambda + lambda * lambda;
        assert!((law.moment(2) - m2).abs() < 1e-6, "2nd moment at λ={lambda}");
    }
}

#[test]
fn mp_moments_match_narayana_polynomials() {
    // quadrature moments vs Σ_m Nar(p,m) λ^m evaluated exactly
    let lambda = 2.0f64;
    let law = LimitLaw::MarchenkoPastur { lambda };
    for p in 1..=4u32 {
        let exact = mp_moment(p as u64, &BigRational::from(BigInt::from(2)))
            .to_f64()
            .unwrap();
        let quad = law.moment(p);
        assert!(
            (quad - exact).abs() < 1e-5 * exact.max(1.0),
            "p={p}: {quad} vs {exact}"
        );
    }
}

#[test]
fn sc_moments_match_catalan() {
    let law = LimitLaw::Semicircle { variance: 2.0 };
    for p in 1..=3u32 {
        let exact = 2f64.powi(p as i32) * catalan(p as u64).to_f64().unwrap();
        assert!((law.moment(2 * p) - exact).abs() < 1e-6 * exact);
        assert!(law.moment(2 * p - 1).abs() < 1e-8);
    }
    // cross-check against the exact rational sc_moment
    let two = BigRational::from(BigInt::from(2));
    let exact = sc_moment(4, &two).to_f64().unwrap();
    assert!((law.moment(4) - exact).abs() < 1e-6 * exact);
}

#[test]
fn sc_cdf_matches_closed_form() {
    let variance = 1.5f64;
    let law = LimitLaw::Semicircle { variance };
    let sigma = variance.sqrt();
    let closed = |x: f64| {
        let t = (x / (2.0 * sigma)).clamp(-1.0, 1.0);
        0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / std::f64::consts::PI
    };
    for i in 0..=20 {
        let x = -2.0 * sigma + 4.0 * sigma * i as f64 / 20.0;
        assert!((law.cdf(x) - closed(x)).abs() < 1e-7, "x={x}");
    }
}

#[test]
fn mp_atom_below_one() {
    let law = LimitLaw::MarchenkoPastur { lambda: 0.25 };
    assert!((law.atom_at_zero() - 0.75).abs() < 1e-12);
    assert!((law.cdf(0.0) - 0.75).abs() < 1e-8);
    assert!((law.cdf(10.0) - 1.0).abs() < 1e-7);
}

#[test]
fn ks_statistic_basics() {
    // perfect quantile samples of the uniform law have K-S = 1/(2n)
    let n = 100usize;
    let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    let ks = ks_statistic(&samples, &|x| x.clamp(0.0, 1.0)).unwrap();
    assert!((ks - 0.005).abs() < 1e-12);
    // shifting all samples by 0.2 forces K-S ≥ 0.2
    let shifted: Vec<f64> = samples.iter().map(|x| x + 0.2).collect();
    let ks = ks_statistic(&shifted, &|x| x.clamp(0.0, 1.0)).unwrap();
    assert!(ks >= 0.2);
}

#[test]
fn simpson_exact_on_cubics() {
    let val = adaptive_simpson(&|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
    assert!((val - 2.0).abs() < 1e-10);
}
