//! CPTP maps with Kraus/Stinespring interconversion, the randomized
//! environment-compression construction, trace-preserving renormalization,
//! and closeness audits in Schatten norms, Rényi entropies, and fidelity.

use nalgebra::DMatrix;
use rand::Rng;
use serde_json::json;

use crate::ensembles::{sample_haar_unitary, sample_haar_vector};
use crate::error::{QilabError, Result};
use crate::linalg::{cr, hermitian_eigen, hermitian_eigenvalues, hermitian_function, CMat, C64};

pub const TP_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-9;

/// A completely positive map given by Kraus operators A → B (each
/// `dim_out × dim_in`), trace preserving only within the stated residual.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMat>,
}

impl QuantumChannel {
    /// CPTP constructor: insists on Σ Kᵢ†Kᵢ = Id within `TP_TOL`.
    pub fn from_kraus(kraus: Vec<CMat>) -> Result<Self> {
        let ch = Self::from_kraus_cp(kraus)?;
        let residual = ch.tp_residual();
        if residual > TP_TOL {
            return Err(QilabError::InvalidInput(format!(
                "Kraus set is not trace preserving (residual {residual:.3e})"
            )));
        }
        Ok(ch)
    }

    /// CP-only constructor (no trace-preservation check); used for the
    /// compressed maps before renormalization.
    pub fn from_kraus_cp(kraus: Vec<CMat>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| QilabError::InvalidInput("empty Kraus set".into()))?;
        let (dim_out, dim_in) = (first.nrows(), first.ncols());
        if dim_in == 0 || dim_out == 0 {
            return Err(QilabError::InvalidDimension("zero-dimensional Kraus".into()));
        }
        if kraus
            .iter()
            .any(|k| k.nrows() != dim_out || k.ncols() != dim_in)
        {
            return Err(QilabError::InvalidInput(
                "Kraus operators have mismatched shapes".into(),
            ));
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    /// From an isometry V: A → B⊗E with rows indexed b·|E| + e:
    /// Kₑ = (Id_B ⊗ ⟨e|) V.
    pub fn from_stinespring(v: &CMat, dim_env: usize) -> Result<Self> {
        if dim_env == 0 || v.nrows() % dim_env != 0 {
            return Err(QilabError::InvalidDimension(format!(
                "isometry rows {} do not factor through |E| = {dim_env}",
                v.nrows()
            )));
        }
        let dim_out = v.nrows() / dim_env;
        let dim_in = v.ncols();
        let kraus = (0..dim_env)
            .map(|e| CMat::from_fn(dim_out, dim_in, |b, a| v[(b * dim_env + e, a)]))
            .collect();
        Self::from_kraus(kraus)
    }

    /// The canonical dilation isometry stacking the Kraus set; rows indexed
    /// b·s + i for s = number of Kraus operators.
    pub fn stinespring(&self) -> (CMat, usize) {
        let s = self.kraus.len();
        let v = CMat::from_fn(self.dim_out * s, self.dim_in, |row, a| {
            self.kraus[row % s][(row / s, a)]
        });
        (v, s)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    /// Conjugate (dual) map N*: L(B) → L(A), Y ↦ Σ Kᵢ†YKᵢ.
    pub fn dual_apply(&self, y: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += k.adjoint() * y * k;
        }
        out
    }

    pub fn kraus_count(&self) -> usize {
        self.kraus.len()
    }

    /// Number of linearly independent Kraus operators, read off the Gram
    /// matrix of the vectorized set.
    pub fn kraus_rank(&self) -> usize {
        let s = self.kraus.len();
        let gram = CMat::from_fn(s, s, |i, j| {
            self.kraus[i]
                .iter()
                .zip(self.kraus[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<C64>()
        });
        let scale: f64 = (0..s).map(|i| gram[(i, i)].re).sum::<f64>().max(1.0);
        hermitian_eigenvalues(&gram)
            .iter()
            .filter(|&&t| t > RANK_TOL * scale)
            .count()
    }

    /// Unnormalized Choi matrix J(N) = Σᵢⱼ Eᵢⱼ ⊗ N(Eᵢⱼ), indexed (a,b).
    pub fn choi(&self) -> CMat {
        let (da, db) = (self.dim_in, self.dim_out);
        let mut j = CMat::zeros(da * db, da * db);
        for k in &self.kraus {
            // J += vec(K) vec(K)† with vec indexed a·db + b
            let v = nalgebra::DVector::from_fn(da * db, |idx, _| k[(idx % db, idx / db)]);
            j += &v * v.adjoint();
        }
        j
    }

    pub fn tp_residual(&self) -> f64 {
        let mut s = CMat::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            s += k.adjoint() * k;
        }
        let delta = s - CMat::identity(self.dim_in, self.dim_in);
        hermitian_eigenvalues(&delta)
            .iter()
            .fold(0.0f64, |acc, t| acc.max(t.abs()))
    }

    /// Identity channel: single Kraus operator Id, |E| = 1.
    pub fn identity(d: usize) -> Self {
        Self {
            dim_in: d,
            dim_out: d,
            kraus: vec![CMat::identity(d, d)],
        }
    }

    /// Fully randomizing channel R: X ↦ tr(X)·Id/d, with the minimal Kraus
    /// decomposition {XᵃZᵇ/d} over the discrete Weyl (Pauli-type) unitaries.
    pub fn fully_randomizing(d: usize) -> Self {
        let omega = 2.0 * std::f64::consts::PI / d as f64;
        let mut kraus = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                kraus.push(CMat::from_fn(d, d, |i, j| {
                    if i == (j + a) % d {
                        C64::from_polar(1.0 / d as f64, omega * (b * j) as f64)
                    } else {
                        cr(0.0)
                    }
                }));
            }
        }
        Self {
            dim_in: d,
            dim_out: d,
            kraus,
        }
    }

    /// Werner channel 𝒲_λ: X ↦ [tr(X)·Id + (2λ−1)·Xᵀ] / (d + 2λ − 1).
    pub fn werner(lambda: f64, d: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(QilabError::ParamOutOfRange(format!(
                "Werner parameter must lie in [0,1], got {lambda}"
            )));
        }
        let norm = d as f64 + 2.0 * lambda - 1.0;
        from_action(d, d, |x| {
            let tr: C64 = (0..d).map(|i| x[(i, i)]).sum();
            let mut out = x.transpose() * cr((2.0 * lambda - 1.0) / norm);
            for i in 0..d {
                out[(i, i)] += tr / cr(norm);
            }
            out
        })
    }

    /// Haar-random isometry channel A → B with environment E.
    pub fn random_isometry(
        dim_in: usize,
        dim_out: usize,
        dim_env: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if dim_in > dim_out * dim_env {
            return Err(QilabError::InvalidDimension(format!(
                "no isometry from dimension {dim_in} into {dim_out}×{dim_env}"
            )));
        }
        let u = sample_haar_unitary(dim_out * dim_env, rng);
        let v = CMat::from_fn(dim_out * dim_env, dim_in, |r, c| u[(r, c)]);
        Self::from_stinespring(&v, dim_env)
    }
}

/// Kraus set of an arbitrary CPTP action, via eigendecomposition of the Choi
/// matrix.
pub fn from_action(
    dim_in: usize,
    dim_out: usize,
    action: impl Fn(&CMat) -> CMat,
) -> Result<QuantumChannel> {
    let (da, db) = (dim_in, dim_out);
    let mut j = CMat::zeros(da * db, da * db);
    for i in 0..da {
        for k in 0..da {
            let mut e = CMat::zeros(da, da);
            e[(i, k)] = cr(1.0);
            let out = action(&e);
            for b in 0..db {
                for bp in 0..db {
                    j[(i * db + b, k * db + bp)] = out[(b, bp)];
                }
            }
        }
    }
    let (vals, vecs) = hermitian_eigen(&j);
    let scale = vals.iter().fold(1.0f64, |acc, t| acc.max(t.abs()));
    if vals.iter().any(|&t| t < -1e-9 * scale) {
        return Err(QilabError::InvalidInput(
            "action is not completely positive".into(),
        ));
    }
    let kraus: Vec<CMat> = vals
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > RANK_TOL * scale)
        .map(|(idx, &t)| {
            CMat::from_fn(db, da, |b, a| vecs[(a * db + b, idx)] * cr(t.sqrt()))
        })
        .collect();
    QuantumChannel::from_kraus(kraus)
}

/// Environment compression: sample n uniform environment vectors φᵢ and form
/// the CP map with Kraus set Kᵢ = √(|E|/n)·(Id ⊗ ⟨φᵢ|)V, whose expectation
/// over φ reproduces the channel exactly.
pub fn compress(ch: &QuantumChannel, n: usize, rng: &mut impl Rng) -> Result<QuantumChannel> {
    if n == 0 {
        return Err(QilabError::ParamOutOfRange("need n ≥ 1 samples".into()));
    }
    let (v, dim_env) = ch.stinespring();
    let scale = cr((dim_env as f64 / n as f64).sqrt());
    let kraus = (0..n)
        .map(|_| {
            let phi = sample_haar_vector(dim_env, rng);
            CMat::from_fn(ch.dim_out, ch.dim_in, |b, a| {
                (0..dim_env)
                    .map(|e| phi[e].conj() * v[(b * dim_env + e, a)])
                    .sum::<C64>()
                    * scale
            })
        })
        .collect();
    QuantumChannel::from_kraus_cp(kraus)
}

/// Exact trace-preserving renormalization: conjugate the Kraus set by
/// S^{−1/2} for S = Σ Kᵢ†Kᵢ.
pub fn renormalize_tp(ch: &QuantumChannel) -> Result<QuantumChannel> {
    let mut s = CMat::zeros(ch.dim_in, ch.dim_in);
    for k in &ch.kraus {
        s += k.adjoint() * k;
    }
    if hermitian_eigenvalues(&s).first().is_none_or(|&t| t < 1e-12) {
        return Err(QilabError::Singular(
            "Σ Kᵢ†Kᵢ is not invertible; cannot renormalize".into(),
        ));
    }
    let s_inv_sqrt = hermitian_function(&s, |t| 1.0 / t.sqrt());
    let kraus = ch.kraus.iter().map(|k| k * &s_inv_sqrt).collect();
    QuantumChannel::from_kraus(kraus)
}

// ---------------------------------------------------------------------------
// distance and entropy audits

pub fn trace_norm(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).iter().map(|t| t.abs()).sum()
}

pub fn operator_norm(m: &CMat) -> f64 {
    hermitian_eigenvalues(m)
        .iter()
        .fold(0.0f64, |acc, t| acc.max(t.abs()))
}

/// Rényi entropy S_p(ρ) = −(p/(p−1))·log‖ρ‖_p; p = ∞ gives −log λ_max.
pub fn renyi_entropy(rho: &CMat, p: f64) -> f64 {
    let eigs = hermitian_eigenvalues(rho);
    if p.is_infinite() {
        let lmax = eigs.iter().fold(f64::MIN, |acc, &t| acc.max(t));
        return -lmax.max(1e-300).ln();
    }
    let norm_p: f64 = eigs
        .iter()
        .map(|t| t.max(0.0).powf(p))
        .sum::<f64>()
        .powf(1.0 / p);
    -(p / (p - 1.0)) * norm_p.max(1e-300).ln()
}

/// Uhlmann fidelity F(ρ,σ) = ‖√ρ √σ‖₁.
pub fn fidelity(rho: &CMat, sigma: &CMat) -> f64 {
    let sqrt_rho = hermitian_function(rho, |t| t.max(0.0).sqrt());
    let sqrt_sigma = hermitian_function(sigma, |t| t.max(0.0).sqrt());
    (sqrt_rho * sqrt_sigma).singular_values().iter().sum()
}

/// Smallest ε with −ε(N(ρ) + Id/|B|) ⪯ N̂(ρ) − N(ρ) ⪯ ε(N(ρ) + Id/|B|),
/// i.e. the operator sandwich certificate for this input:
/// ε = ‖M^{−1/2}(σ̂ − σ)M^{−1/2}‖_∞ with M = N(ρ) + Id/|B|.
pub fn sandwich_epsilon(original: &QuantumChannel, hat: &QuantumChannel, rho: &CMat) -> f64 {
    let sigma = original.apply(rho);
    let sigma_hat = hat.apply(rho);
    let db = original.dim_out;
    let mut m = sigma.clone();
    for i in 0..db {
        m[(i, i)] += cr(1.0 / db as f64);
    }
    let m_inv_sqrt = hermitian_function(&m, |t| 1.0 / t.max(1e-15).sqrt());
    operator_norm(&(&m_inv_sqrt * (sigma_hat - sigma) * &m_inv_sqrt))
}

#[derive(Clone, Debug)]
pub struct CompressionReport {
    pub samples: usize,
    pub error_1to1: f64,
    pub error_1to2: f64,
    pub error_1toinf: f64,
    pub entropy_gap_2: f64,
    pub entropy_gap_inf: f64,
    pub fidelity_gap: f64,
    pub tp_residual: f64,
}

impl CompressionReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "samples": self.samples,
            "error_1to1": self.error_1to1,
            "error_1to2": self.error_1to2,
            "error_1toinf": self.error_1toinf,
            "entropy_gap_2": self.entropy_gap_2,
            "entropy_gap_inf": self.entropy_gap_inf,
            "fidelity_gap": self.fidelity_gap,
            "tp_residual": self.tp_residual,
        })
    }
}

pub fn pure_state_matrix(psi: &nalgebra::DVector<C64>) -> CMat {
    psi * psi.adjoint()
}

/// Sampled closeness audit over Haar-random pure inputs: sup of per-input
/// output gaps in trace/Frobenius/operator norm, Rényi-2 and -∞ entropy
/// gaps, and the fidelity gap to the maximally mixed reference.
pub fn closeness_report(
    original: &QuantumChannel,
    hat: &QuantumChannel,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<CompressionReport> {
    if original.dim_in != hat.dim_in || original.dim_out != hat.dim_out {
        return Err(QilabError::LayoutMismatch(
            "channels act between different spaces".into(),
        ));
    }
    if samples == 0 {
        return Err(QilabError::ParamOutOfRange("need samples ≥ 1".into()));
    }
    let db = original.dim_out;
    let reference =
        CMat::from_fn(db, db, |i, j| if i == j { cr(1.0 / db as f64) } else { cr(0.0) });
    let mut report = CompressionReport {
        samples,
        error_1to1: 0.0,
        error_1to2: 0.0,
        error_1toinf: 0.0,
        entropy_gap_2: 0.0,
        entropy_gap_inf: 0.0,
        fidelity_gap: 0.0,
        tp_residual: hat.tp_residual(),
    };
    for _ in 0..samples {
        let psi = sample_haar_vector(original.dim_in, rng);
        let rho = pure_state_matrix(&psi);
        let out = original.apply(&rho);
        let out_hat = hat.apply(&rho);
        let delta = &out_hat - &out;
        report.error_1to1 = report.error_1to1.max(trace_norm(&delta));
        report.error_1to2 = report.error_1to2.max(delta.norm());
        report.error_1toinf = report.error_1toinf.max(operator_norm(&delta));
        report.entropy_gap_2 = report
            .entropy_gap_2
            .max((renyi_entropy(&out_hat, 2.0) - renyi_entropy(&out, 2.0)).abs());
        report.entropy_gap_inf = report
            .entropy_gap_inf
            .max((renyi_entropy(&out_hat, f64::INFINITY) - renyi_entropy(&out, f64::INFINITY)).abs());
        report.fidelity_gap = report
            .fidelity_gap
            .max((fidelity(&out_hat, &reference) - fidelity(&out, &reference)).abs());
    }
    Ok(report)
}

/// Channel action match on a spanning set of matrix units, used by the
/// round-trip audits.
pub fn action_distance(a: &QuantumChannel, b: &QuantumChannel) -> f64 {
    let d = a.dim_in;
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut e: CMat = DMatrix::zeros(d, d);
            e[(i, j)] = cr(1.0);
            let delta = a.apply(&e) - b.apply(&e);
            worst = worst.max(delta.norm());
        }
    }
    worst
}
