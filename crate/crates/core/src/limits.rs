//! Limiting spectral laws — Marčenko-Pastur and semicircular — with densities
//! integrated by adaptive Simpson quadrature, and the Kolmogorov-Smirnov
//! statistic used to compare empirical spectra against them.

use crate::error::{QilabError, Result};

/// Adaptive Simpson quadrature of `f` on [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    if a >= b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

/// A limiting law given by a density on a bounded support plus an optional
/// atom at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LimitLaw {
    /// Free-Poisson / Marčenko-Pastur of parameter λ > 0: moments
    /// Σ_m Nar(p,m)·λ^m, density √((λ₊−x)(x−λ₋))/(2πx) on [(1±√λ)²],
    /// atom (1−λ)₊ at zero.
    MarchenkoPastur { lambda: f64 },
    /// Centered semicircular law of variance σ²: moments σ^{2p}·Cat_p,
    /// density √(4σ²−x²)/(2πσ²) on [−2σ, 2σ].
    Semicircle { variance: f64 },
}

impl LimitLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            LimitLaw::MarchenkoPastur { lambda } => lambda > 0.0,
            LimitLaw::Semicircle { variance } => variance > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(QilabError::ParamOutOfRange(format!(
                "limit law parameter must be positive: {self:?}"
            )))
        }
    }

    /// Support of the absolutely continuous part.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            LimitLaw::MarchenkoPastur { lambda } => {
                let r = lambda.sqrt();
                ((1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r))
            }
            LimitLaw::Semicircle { variance } => {
                let edge = 2.0 * variance.sqrt();
                (-edge, edge)
            }
        }
    }

    /// Mass of the atom at zero (nonzero only for MP with λ < 1).
    pub fn atom_at_zero(&self) -> f64 {
        match *self {
            LimitLaw::MarchenkoPastur { lambda } => (1.0 - lambda).max(0.0),
            LimitLaw::Semicircle { .. } => 0.0,
        }
    }

    /// Density of the absolutely continuous part (0 outside the support).
    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo || x >= hi {
            return 0.0;
        }
        match *self {
            LimitLaw::MarchenkoPastur { .. } => {
                ((hi - x) * (x - lo)).sqrt() / (2.0 * std::f64::consts::PI * x)
            }
            LimitLaw::Semicircle { variance } => {
                (4.0 * variance - x * x).sqrt() / (2.0 * std::f64::consts::PI * variance)
            }
        }
    }

    /// CDF by quadrature of the density (tolerance 1e-8) plus the atom.
    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        let atom = if x >= 0.0 { self.atom_at_zero() } else { 0.0 };
        if x <= lo {
            return atom.min(1.0);
        }
        let upper = x.min(hi);
        let mass = adaptive_simpson(&|t| self.density(t), lo, upper, 1e-8);
        (atom + mass).clamp(0.0, 1.0)
    }

    /// Exact moment of the law by quadrature (atom contributes only to the
    /// zeroth moment).
    pub fn moment(&self, order: u32) -> f64 {
        let (lo, hi) = self.support();
        let m = adaptive_simpson(&|t| t.powi(order as i32) * self.density(t), lo, hi, 1e-10);
        if order == 0 {
            m + self.atom_at_zero()
        } else {
            m
        }
    }
}

/// Two-sided Kolmogorov-Smirnov statistic of sorted samples against a CDF.
pub fn ks_statistic(sorted_samples: &[f64], cdf: &dyn Fn(f64) -> f64) -> Result<f64> {
    if sorted_samples.is_empty() {
        return Err(QilabError::InvalidInput("K-S needs samples".into()));
    }
    let n = sorted_samples.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in sorted_samples.iter().enumerate() {
        let f = cdf(x);
        sup = sup.max((f - i as f64 / n).abs());
        sup = sup.max((f - (i as f64 + 1.0) / n).abs());
    }
    Ok(sup)
}
