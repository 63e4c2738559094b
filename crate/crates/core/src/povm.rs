//! Distinguishability norms: discrete-POVM norms, the modified 2(k) norms,
//! Monte Carlo estimation of the uniform-POVM norm, random sparsification of
//! the uniform POVM, the PPT-restricted norm and an LO upper-bound estimator.

use rand::Rng;

use crate::convex::{support_value, ConvexSetSpec};
use crate::ensembles::sample_haar_vector;
use crate::error::{QilabError, Result};
use crate::linalg::{cr, hermitian_eigen, CMat, CVec};
use crate::operators::{HermitianOperator, SchattenP, TensorLayout};

/// A finite POVM: positive operators summing to the identity.
#[derive(Clone, Debug)]
pub struct DiscretePovm {
    layout: TensorLayout,
    elements: Vec<HermitianOperator>,
}

const POVM_PSD_TOL: f64 = 1e-10;
const POVM_SUM_TOL: f64 = 1e-9;

impl DiscretePovm {
    pub fn new(layout: TensorLayout, elements: Vec<HermitianOperator>) -> Result<Self> {
        if elements.is_empty() {
            return Err(QilabError::InvalidInput("POVM needs ≥ 1 element".into()));
        }
        let mut sum = HermitianOperator::zero(layout.clone());
        for e in &elements {
            if e.layout() != &layout {
                return Err(QilabError::LayoutMismatch(
                    "POVM elements must share the layout".into(),
                ));
            }
            if e.min_eigenvalue() < -POVM_PSD_TOL {
                return Err(QilabError::InvalidInput(format!(
                    "POVM element has eigenvalue {}",
                    e.min_eigenvalue()
                )));
            }
            sum = sum.add(e);
        }
        let id = HermitianOperator::identity(layout.clone());
        if sum.frobenius_distance(&id) > POVM_SUM_TOL {
            return Err(QilabError::InvalidInput(format!(
                "POVM elements sum to Id only up to {:.3e}",
                sum.frobenius_distance(&id)
            )));
        }
        Ok(Self { layout, elements })
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    /// {|i⟩⟨i|} on the layout's total dimension.
    pub fn computational_basis(layout: TensorLayout) -> Self {
        let n = layout.total_dim();
        let elements = (0..n)
            .map(|i| {
                let m = CMat::from_fn(n, n, |r, s| {
                    if r == i && s == i {
                        cr(1.0)
                    } else {
                        cr(0.0)
                    }
                });
                HermitianOperator::symmetrized(layout.clone(), m)
            })
            .collect();
        Self { layout, elements }
    }

    /// The single-element POVM {Id}, which distinguishes nothing.
    pub fn trivial(layout: TensorLayout) -> Self {
        let id = HermitianOperator::identity(layout.clone());
        Self {
            layout,
            elements: vec![id],
        }
    }

    /// Split every element into its rank-1 spectral pieces (a refinement,
    /// which can only increase distinguishability norms).
    pub fn split_rank_one(&self) -> Self {
        let n = self.layout.total_dim();
        let mut elements = Vec::new();
        for e in &self.elements {
            let (vals, u) = hermitian_eigen(e.matrix());
            for (k, &lam) in vals.iter().enumerate() {
                if lam <= 1e-12 {
                    continue;
                }
                let col = u.column(k);
                let m = CMat::from_fn(n, n, |i, j| col[i] * col[j].conj() * cr(lam));
                elements.push(HermitianOperator::symmetrized(self.layout.clone(), m));
            }
        }
        Self {
            layout: self.layout.clone(),
            elements,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    ExactSum,
    MonteCarlo,
    Eigensolve,
    BisectionSdp,
}

#[derive(Clone, Debug)]
pub struct NormEstimate {
    pub value: f64,
    pub stderr: f64,
    pub method: NormMethod,
    pub samples: Option<usize>,
}

impl NormEstimate {
    fn exact(value: f64, method: NormMethod) -> Self {
        Self {
            value,
            stderr: 0.0,
            method,
            samples: None,
        }
    }
}

/// ‖Δ‖_M = Σᵢ |tr(Δ Mᵢ)|, the distinguishability norm of the POVM M.
pub fn povm_norm(delta: &HermitianOperator, m: &DiscretePovm) -> Result<NormEstimate> {
    if delta.layout() != m.layout() {
        return Err(QilabError::LayoutMismatch(
            "Δ and POVM layouts differ".into(),
        ));
    }
    let value = m.elements().iter().map(|e| delta.inner(e).abs()).sum();
    Ok(NormEstimate::exact(value, NormMethod::ExactSum))
}

/// ‖Δ‖_{2(k)} = sqrt(Σ_I tr[(tr_I Δ)²]) over all 2^k subsets I of factors
/// (the full subset contributing (Tr Δ)²).
pub fn modified_2k_norm(delta: &HermitianOperator) -> f64 {
    let k = delta.layout().n_factors();
    let mut total = 0.0;
    for mask in 0..(1usize << k) {
        let keep: Vec<usize> = (0..k).filter(|i| mask & (1 << i) == 0).collect();
        if keep.is_empty() {
            let t = delta.trace();
            total += t * t;
        } else {
            let reduced = delta
                .partial_trace(&keep)
                .expect("keep indices are in range");
            total += reduced.inner(&reduced);
        }
    }
    total.sqrt()
}

/// Monte Carlo estimate of ‖Δ‖_U = d·E|⟨ψ|Δ|ψ⟩| for Haar ψ.
pub fn uniform_norm_mc(
    delta: &HermitianOperator,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<NormEstimate> {
    if samples < 100 {
        return Err(QilabError::ParamOutOfRange(format!(
            "need ≥ 100 samples, got {samples}"
        )));
    }
    let n = delta.layout().total_dim();
    let x = delta.matrix();
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..samples {
        let psi = sample_haar_vector(n, rng);
        let v = (psi.adjoint() * x * &psi)[(0, 0)].re.abs();
        sum += v;
        sumsq += v * v;
    }
    let mean = sum / samples as f64;
    let var = (sumsq / samples as f64 - mean * mean).max(0.0) / (samples as f64 - 1.0);
    Ok(NormEstimate {
        value: n as f64 * mean,
        stderr: n as f64 * var.sqrt(),
        method: NormMethod::MonteCarlo,
        samples: Some(samples),
    })
}

/// POVM with elements S^{−1/2} ψᵢψᵢ† S^{−1/2} for the given unit vectors,
/// S = Σ ψᵢψᵢ†.
pub fn sparsify_from_vectors(layout: TensorLayout, vectors: &[CVec]) -> Result<DiscretePovm> {
    let n = layout.total_dim();
    if vectors.len() < n {
        return Err(QilabError::ParamOutOfRange(format!(
            "need ≥ {n} vectors, got {}",
            vectors.len()
        )));
    }
    let mut s = CMat::zeros(n, n);
    for psi in vectors {
        if psi.len() != n {
            return Err(QilabError::LayoutMismatch(
                "vector length does not match the layout".into(),
            ));
        }
        s += psi * psi.adjoint();
    }
    let s_op = HermitianOperator::symmetrized(layout.clone(), s);
    if s_op.min_eigenvalue() < 1e-12 {
        return Err(QilabError::Singular(
            "frame operator S is numerically singular; resample".into(),
        ));
    }
    let s_inv_sqrt = s_op.apply_spectral(|t| 1.0 / t.sqrt());
    let root = s_inv_sqrt.matrix();
    let elements = vectors
        .iter()
        .map(|psi| {
            let phi = root * psi;
            let m = CMat::from_fn(n, n, |i, j| phi[i] * phi[j].conj());
            HermitianOperator::symmetrized(layout.clone(), m)
        })
        .collect();
    DiscretePovm::new(layout, elements)
}

/// Random sparsification of the uniform POVM on C^d with n Haar vectors.
pub fn sparsify_uniform(d: usize, n: usize, rng: &mut impl Rng) -> Result<DiscretePovm> {
    if n < d {
        return Err(QilabError::ParamOutOfRange(format!(
            "need n ≥ d, got n = {n}, d = {d}"
        )));
    }
    let vectors: Vec<CVec> = (0..n).map(|_| sample_haar_vector(d, rng)).collect();
    sparsify_from_vectors(TensorLayout::single(d), &vectors)
}

/// Upper-bound estimate for the LO norm of Δ = Σᵢ |i⟩⟨i|⊗Δᵢ.
#[derive(Clone, Debug)]
pub struct LoNormReport {
    pub estimate: NormEstimate,
    /// best value of sup_x Σᵢ |⟨x|Δᵢ|x⟩| found
    pub sup: f64,
    pub witness: CVec,
}

/// Estimates d·sup_{‖x‖=1} Σᵢ |⟨x|Δᵢ|x⟩| by a sign-relaxation fixed point:
/// for fixed signs the objective is the top eigenvector of Σᵢ sᵢΔᵢ, so we
/// alternate eigensolves and sign updates from random multi-starts.
pub fn lo_norm_upper(
    blocks: &[HermitianOperator],
    trials: usize,
    rng: &mut impl Rng,
) -> Result<LoNormReport> {
    let first = blocks
        .first()
        .ok_or_else(|| QilabError::InvalidInput("need ≥ 1 block".into()))?;
    let layout = first.layout().clone();
    for b in blocks {
        if b.layout() != &layout {
            return Err(QilabError::LayoutMismatch(
                "blocks must share a layout".into(),
            ));
        }
    }
    let d = layout.total_dim();
    let objective = |x: &CVec| -> f64 {
        blocks
            .iter()
            .map(|b| (x.adjoint() * b.matrix() * x)[(0, 0)].re.abs())
            .sum()
    };
    let mut best = 0.0;
    let mut witness = CVec::zeros(d);
    for _ in 0..trials.max(1) {
        let mut x = sample_haar_vector(d, rng);
        let mut val = objective(&x);
        for _ in 0..50 {
            let mut a = CMat::zeros(d, d);
            for b in blocks {
                let sign = (x.adjoint() * b.matrix() * &x)[(0, 0)].re.signum();
                a += b.matrix() * cr(sign);
            }
            let (_, u) = hermitian_eigen(&a);
            let top = CVec::from_fn(d, |i, _| u[(i, d - 1)]);
            let new_val = objective(&top);
            if new_val <= val + 1e-12 {
                break;
            }
            val = new_val;
            x = top;
        }
        if val > best {
            best = val;
            witness = x;
        }
    }
    Ok(LoNormReport {
        estimate: NormEstimate::exact(d as f64 * best, NormMethod::Eigensolve),
        sup: best,
        witness,
    })
}

pub const PPT_NORM_TOL: f64 = 1e-3;

/// ‖Δ‖_PPT = sup { tr(ΔA) : −Id ≤ A ≤ Id, −Id ≤ A^Γ ≤ Id }, computed by the
/// bisection support-value solver over the doubly-bounded box.
pub fn restricted_norm_ppt(delta: &HermitianOperator) -> Result<NormEstimate> {
    let layout = delta.layout();
    if layout.n_factors() != 2 {
        return Err(QilabError::LayoutMismatch(format!(
            "PPT norm needs a bipartite layout, got {} factors",
            layout.n_factors()
        )));
    }
    let box_set = ConvexSetSpec::OperatorInterval { lo: -1.0, hi: 1.0 };
    let sets = [
        box_set.clone(),
        ConvexSetSpec::PartialTransposeImage {
            inner: Box::new(box_set),
            flip: vec![1],
        },
    ];
    let x0 = HermitianOperator::zero(layout.clone());
    let one_norm = delta.schatten_norm(SchattenP::One);
    let sv = support_value(delta, &sets, &x0, PPT_NORM_TOL, Some(one_norm))?;
    Ok(NormEstimate {
        value: sv.value,
        stderr: 0.0,
        method: NormMethod::BisectionSdp,
        samples: None,
    })
}
