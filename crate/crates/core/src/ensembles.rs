//! Seeded samplers for the random objects used throughout: GUE, Ginibre,
//! Wishart, induced states, Haar vectors/unitaries, random subspace
//! projectors, and the tensor-embedded "modified" sums whose spectra the
//! experiments histogram.
//!
//! All draws are deterministic functions of a [`SeededStream`]; parallel
//! Monte Carlo uses distinct `stream_id`s of the same seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{QilabError, Result};
use crate::linalg::{c, cr, CMat, CVec, C64};
use crate::operators::{DensityOperator, HermitianOperator, TensorLayout};

/// Reproducible RNG handle: identical (seed, stream_id) pairs reproduce
/// identical draws bit-for-bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Named random ensembles with their parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnsembleSpec {
    Gue { n: usize },
    TracelessGue { n: usize },
    Wishart { n: usize, s: usize },
    Induced { n: usize, s: usize },
    HaarVector { n: usize },
    HaarUnitary { n: usize },
    SubspaceProjector { n: usize, rank: usize },
}

impl EnsembleSpec {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            EnsembleSpec::Gue { n }
            | EnsembleSpec::TracelessGue { n }
            | EnsembleSpec::HaarVector { n }
            | EnsembleSpec::HaarUnitary { n } => n >= 1,
            EnsembleSpec::Wishart { n, s } | EnsembleSpec::Induced { n, s } => n >= 1 && s >= 1,
            EnsembleSpec::SubspaceProjector { n, rank } => n >= 1 && rank >= 1 && rank <= n,
        };
        if ok {
            Ok(())
        } else {
            Err(QilabError::InvalidInput(format!(
                "invalid ensemble parameters: {self:?}"
            )))
        }
    }
}

/// What a generic [`sample`] call can hand back.
#[derive(Clone, Debug)]
pub enum Sample {
    Operator(HermitianOperator),
    State(DensityOperator),
    Vector(CVec),
    Unitary(CMat),
}

pub fn sample(spec: EnsembleSpec, rng: &mut impl Rng) -> Result<Sample> {
    spec.validate()?;
    Ok(match spec {
        EnsembleSpec::Gue { n } => Sample::Operator(sample_gue(n, rng)),
        EnsembleSpec::TracelessGue { n } => Sample::Operator(sample_traceless_gue(n, rng)),
        EnsembleSpec::Wishart { n, s } => Sample::Operator(sample_wishart(n, s, rng)),
        EnsembleSpec::Induced { n, s } => Sample::State(sample_induced(n, s, rng)?),
        EnsembleSpec::HaarVector { n } => Sample::Vector(sample_haar_vector(n, rng)),
        EnsembleSpec::HaarUnitary { n } => Sample::Unitary(sample_haar_unitary(n, rng)),
        EnsembleSpec::SubspaceProjector { n, rank } => {
            Sample::Operator(sample_subspace_projector(n, rank, rng))
        }
    })
}

fn std_complex(rng: &mut impl Rng) -> C64 {
    // standard complex normal: E|z|² = 1
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re / 2f64.sqrt(), im / 2f64.sqrt())
}

/// n×s matrix of independent standard complex normal entries.
pub fn sample_ginibre(n: usize, s: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(n, s, |_, _| std_complex(rng))
}

/// GUE(n): (H + H†)/√2 with H standard complex Ginibre, so E|G_ij|² = 1 and
/// E Tr G² = n².
pub fn sample_gue(n: usize, rng: &mut impl Rng) -> HermitianOperator {
    let h = sample_ginibre(n, n, rng);
    let g = (&h + h.adjoint()) / c(2f64.sqrt(), 0.0);
    HermitianOperator::symmetrized(TensorLayout::single(n), g)
}

/// GUE sample minus (Tr/n)·Id, projecting onto the traceless hyperplane.
pub fn sample_traceless_gue(n: usize, rng: &mut impl Rng) -> HermitianOperator {
    let g = sample_gue(n, rng);
    let t = g.trace() / n as f64;
    let id = HermitianOperator::identity(TensorLayout::single(n));
    g.sub(&id.scale(t))
}

/// Wishart(n, s): GG† with G the n×s complex Ginibre; PSD, E Tr W = ns.
pub fn sample_wishart(n: usize, s: usize, rng: &mut impl Rng) -> HermitianOperator {
    let g = sample_ginibre(n, s, rng);
    let w = &g * g.adjoint();
    HermitianOperator::symmetrized(TensorLayout::single(n), w)
}

/// Induced state μ_{n,s}: a Wishart(n, s) sample normalized by its trace.
pub fn sample_induced(n: usize, s: usize, rng: &mut impl Rng) -> Result<DensityOperator> {
    let w = sample_wishart(n, s, rng);
    let t = w.trace();
    if t <= 0.0 {
        return Err(QilabError::Singular("Wishart trace not positive".into()));
    }
    DensityOperator::new(w.scale(1.0 / t))
}

/// Haar unit vector on Cⁿ.
pub fn sample_haar_vector(n: usize, rng: &mut impl Rng) -> CVec {
    let mut v = CVec::from_fn(n, |_, _| std_complex(rng));
    let norm = v.norm();
    v /= cr(norm);
    v
}

/// Haar unitary via QR of a Ginibre matrix with the phases of diag(R) fixed.
pub fn sample_haar_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    let g = sample_ginibre(n, n, rng);
    let qr = g.qr();
    let r_diag: Vec<C64> = (0..n).map(|i| qr.r()[(i, i)]).collect();
    let mut q = qr.q();
    for j in 0..n {
        let d = r_diag[j];
        let phase = if d.norm() > 0.0 { d / cr(d.norm()) } else { cr(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// UPU† for the fixed rank-r diagonal projector P and a Haar unitary U.
pub fn sample_subspace_projector(n: usize, rank: usize, rng: &mut impl Rng) -> HermitianOperator {
    let u = sample_haar_unitary(n, rng);
    let cols = u.columns(0, rank).into_owned();
    let p = &cols * cols.adjoint();
    HermitianOperator::symmetrized(TensorLayout::single(n), p)
}

// ---------------------------------------------------------------------------
// Modified (tensor-embedded) sums and their spectra
// ---------------------------------------------------------------------------

/// What the spectrum experiments draw per repetition. The `Modified*`
/// families are the sums Σ_{j=1}^k X̃(j) on A⊗B^k with X on A⊗B_j and
/// identity elsewhere, normalized as in the reference figures: Wishart sums
/// divide by d², GUE sums by d.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectrumFamily {
    Plain(EnsembleSpec),
    /// Eigenvalues of the sampled operator multiplied by `factor`
    /// (e.g. Wishart(n,n) scaled by 1/n to target MP(1)).
    Scaled(EnsembleSpec, f64),
    /// Σ_j W̃(j)/d² with W ~ Wishart(d², s), s = round(c·d²).
    ModifiedWishart { d: usize, k: usize, c: f64 },
    /// Σ_j G̃(j)/d with G ~ GUE(d²).
    ModifiedGue { d: usize, k: usize },
}

fn embedded_sum(m: &HermitianOperator, d: usize, k: usize) -> Result<HermitianOperator> {
    let layout = TensorLayout::uniform(d, k + 1);
    let mut acc = HermitianOperator::zero(layout.clone());
    for j in 1..=k {
        acc = acc.add(&m.embed(&layout, &[0, j])?);
    }
    Ok(acc)
}

fn plain_eigenvalues(spec: EnsembleSpec, rng: &mut impl Rng) -> Result<Vec<f64>> {
    match sample(spec, rng)? {
        Sample::Operator(op) => Ok(op.eigenvalues()),
        Sample::State(st) => Ok(st.op().eigenvalues()),
        _ => Err(QilabError::InvalidInput(
            "spectrum families must sample operators".into(),
        )),
    }
}

/// Eigenvalues of one repetition of the family, already normalized.
pub fn spectrum_eigenvalues(family: &SpectrumFamily, rng: &mut impl Rng) -> Result<Vec<f64>> {
    match *family {
        SpectrumFamily::Plain(spec) => plain_eigenvalues(spec, rng),
        SpectrumFamily::Scaled(spec, factor) => Ok(plain_eigenvalues(spec, rng)?
            .into_iter()
            .map(|x| x * factor)
            .collect()),
        SpectrumFamily::ModifiedWishart { d, k, c } => {
            if d < 1 || k < 1 || c <= 0.0 {
                return Err(QilabError::InvalidInput("need d,k ≥ 1 and c > 0".into()));
            }
            let s = ((c * (d * d) as f64).round() as usize).max(1);
            let w = sample_wishart(d * d, s, rng);
            let w = w.with_layout(TensorLayout::new(vec![d, d])?)?;
            let scale = 1.0 / (d * d) as f64;
            if k == 2 {
                Ok(embedded_pair_eigenvalues(&w, d)?
                    .into_iter()
                    .map(|x| x * scale)
                    .collect())
            } else {
                Ok(embedded_sum(&w, d, k)?.scale(scale).eigenvalues())
            }
        }
        SpectrumFamily::ModifiedGue { d, k } => {
            if d < 1 || k < 1 {
                return Err(QilabError::InvalidInput("need d,k ≥ 1".into()));
            }
            let g = sample_gue(d * d, rng);
            let g = g.with_layout(TensorLayout::new(vec![d, d])?)?;
            let scale = 1.0 / d as f64;
            if k == 2 {
                Ok(embedded_pair_eigenvalues(&g, d)?
                    .into_iter()
                    .map(|x| x * scale)
                    .collect())
            } else {
                Ok(embedded_sum(&g, d, k)?.scale(scale).eigenvalues())
            }
        }
    }
}

/// Eigenvalues of M̃(1) + M̃(2) on A⊗B⊗B for M on A⊗B, without forming the
/// full matrix: the sum commutes with Id_A⊗SWAP_{BB}, so it block-diagonalizes
/// over the symmetric/antisymmetric subspaces of B⊗B. The basis vectors have
/// at most two nonzero components, so each block entry is a sum of ≤ 4 entries
/// of M.
pub fn embedded_pair_eigenvalues(m: &HermitianOperator, d: usize) -> Result<Vec<f64>> {
    let dims = m.layout().dims();
    if dims.len() != 2 || dims[0] != dims[1] || dims[1] != d {
        return Err(QilabError::LayoutMismatch(format!(
            "expected a bipartite d×d layout with d = {d}, got {dims:?}"
        )));
    }
    let da = dims[0];
    let mat = m.matrix();
    // basis of B⊗B eigform: list of ((b1,b2,w), optional (b1',b2',w'))
    let mut vals = Vec::with_capacity(da * d * d);
    for sym in [true, false] {
        let mut basis: Vec<Vec<(usize, usize, f64)>> = Vec::new();
        let s = 1.0 / 2f64.sqrt();
        for b1 in 0..d {
            for b2 in (b1 + 1)..d {
                let sign = if sym { s } else { -s };
                basis.push(vec![(b1, b2, s), (b2, b1, sign)]);
            }
        }
        if sym {
            for b in 0..d {
                basis.push(vec![(b, b, 1.0)]);
            }
        }
        let nb = basis.len();
        let dim = da * nb;
        let mut block = CMat::zeros(dim, dim);
        // M̃(1)+M̃(2) entry at ((a,b1,b2),(a',b1',b2')) =
        //   M[(a,b1),(a',b1')]·δ_{b2,b2'} + M[(a,b2),(a',b2')]·δ_{b1,b1'}
        let idx = |a: usize, b: usize| a * d + b;
        for (mu, bv) in basis.iter().enumerate() {
            for (nu, bw) in basis.iter().enumerate() {
                let mut partial = CMat::zeros(da, da);
                let mut touched = false;
                for &(b1, b2, w) in bv {
                    for &(c1, c2, w2) in bw {
                        let coef = cr(w * w2);
                        if b2 == c2 {
                            touched = true;
                            for a in 0..da {
                                for ap in 0..da {
                                    partial[(a, ap)] += coef * mat[(idx(a, b1), idx(ap, c1))];
                                }
                            }
                        }
                        if b1 == c1 {
                            touched = true;
                            for a in 0..da {
                                for ap in 0..da {
                                    partial[(a, ap)] += coef * mat[(idx(a, b2), idx(ap, c2))];
                                }
                            }
                        }
                    }
                }
                if touched {
                    for a in 0..da {
                        for ap in 0..da {
                            block[(a * nb + mu, ap * nb + nu)] = partial[(a, ap)];
                        }
                    }
                }
            }
        }
        let h = HermitianOperator::symmetrized(TensorLayout::single(dim), block);
        vals.extend(h.eigenvalues());
    }
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}

/// Probability histogram: `density[i]` integrates to 1 over the bins.
#[derive(Clone, Debug)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub n: usize,
}

impl Histogram {
    pub fn from_samples(samples: &[f64], bins: usize) -> Result<Histogram> {
        if samples.is_empty() || bins == 0 {
            return Err(QilabError::InvalidInput(
                "histogram needs samples and ≥ 1 bin".into(),
            ));
        }
        let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
        let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0u64; bins];
        for &x in samples {
            let mut b = ((x - lo) / width) as usize;
            if b >= bins {
                b = bins - 1;
            }
            counts[b] += 1;
        }
        let n = samples.len();
        let density = counts
            .iter()
            .map(|&cnt| cnt as f64 / (n as f64 * width))
            .collect();
        Ok(Histogram {
            edges,
            counts,
            density,
            n,
        })
    }
}

/// Pool the spectra of `reps` independent repetitions into a probability
/// histogram; also returns the sorted pooled eigenvalues for K-S statistics.
pub fn empirical_spectrum(
    family: &SpectrumFamily,
    reps: usize,
    bins: usize,
    stream: &SeededStream,
) -> Result<(Histogram, Vec<f64>)> {
    if reps < 1 {
        return Err(QilabError::InvalidInput("need reps ≥ 1".into()));
    }
    let mut pooled = Vec::new();
    for r in 0..reps {
        let mut rng = SeededStream::new(stream.seed, stream.stream_id.wrapping_add(r as u64)).rng();
        pooled.extend(spectrum_eigenvalues(family, &mut rng)?);
    }
    pooled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let hist = Histogram::from_samples(&pooled, bins)?;
    Ok((hist, pooled))
}
