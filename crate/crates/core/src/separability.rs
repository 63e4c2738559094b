//! Separability criteria, extendibility hierarchies and multipartite witness
//! lifting.
//!
//! Positive maps are trait objects behind a [`MapRegistry`], so user-supplied
//! maps (e.g. exotic indecomposable ones) plug into the same criterion
//! machinery as the built-in transpose, reduction and Choi maps.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Dirichlet, Distribution, StandardNormal};
use serde_json::json;

use crate::convex::{
    dykstra_feasibility, ConvexSetSpec, FeasibilityReport, DEFAULT_MAX_ITER, DEFAULT_TOL_FEAS,
};
use crate::error::{QilabError, Result};
use crate::linalg::{c, cr, CMat, CVec, C64};
use crate::operators::{
    symmetrize_extension, DensityOperator, HermitianOperator, SchattenP, TensorLayout,
};

/// A positive (not necessarily completely positive) linear map on square
/// matrices of a fixed set of admissible dimensions.
pub trait PositiveMap: Send + Sync {
    fn id(&self) -> &str;
    /// Err if the map is not defined on d×d inputs.
    fn check_dim(&self, d: usize) -> Result<()>;
    fn apply(&self, x: &CMat) -> CMat;
}

/// X ↦ Xᵀ.
pub struct TransposeMap;

impl PositiveMap for TransposeMap {
    fn id(&self) -> &str {
        "transpose"
    }
    fn check_dim(&self, _d: usize) -> Result<()> {
        Ok(())
    }
    fn apply(&self, x: &CMat) -> CMat {
        x.transpose()
    }
}

/// X ↦ Tr(X)·Id − X.
pub struct ReductionMap;

impl PositiveMap for ReductionMap {
    fn id(&self) -> &str {
        "reduction"
    }
    fn check_dim(&self, _d: usize) -> Result<()> {
        Ok(())
    }
    fn apply(&self, x: &CMat) -> CMat {
        let n = x.nrows();
        let tr = x.trace();
        CMat::from_fn(n, n, |i, j| if i == j { tr - x[(i, i)] } else { -x[(i, j)] })
    }
}

/// The qutrit Choi map X ↦ −X + 2Δ(X) + Δ′(X), where Δ keeps the diagonal
/// and Δ′ cyclically shifts it (entry i gets X_{i−1,i−1}).
pub struct ChoiMap;

impl PositiveMap for ChoiMap {
    fn id(&self) -> &str {
        "choi"
    }
    fn check_dim(&self, d: usize) -> Result<()> {
        if d == 3 {
            Ok(())
        } else {
            Err(QilabError::InvalidDimension(format!(
                "the Choi map is implemented for qutrits only, got local dimension {d}"
            )))
        }
    }
    fn apply(&self, x: &CMat) -> CMat {
        let n = x.nrows();
        CMat::from_fn(n, n, |i, j| {
            let mut v = -x[(i, j)];
            if i == j {
                v += x[(i, i)] * cr((n - 1) as f64);
                v += x[((i + n - 1) % n, (i + n - 1) % n)];
            }
            v
        })
    }
}

/// Registry of positive maps keyed by id. Starts with the three built-ins;
/// callers may register additional maps.
pub struct MapRegistry {
    maps: BTreeMap<String, Box<dyn PositiveMap>>,
}

impl Default for MapRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

impl MapRegistry {
    pub fn with_defaults() -> Self {
        let mut reg = Self {
            maps: BTreeMap::new(),
        };
        reg.register(Box::new(TransposeMap));
        reg.register(Box::new(ReductionMap));
        reg.register(Box::new(ChoiMap));
        reg
    }

    pub fn register(&mut self, map: Box<dyn PositiveMap>) {
        self.maps.insert(map.id().to_string(), map);
    }

    pub fn get(&self, id: &str) -> Result<&dyn PositiveMap> {
        self.maps
            .get(id)
            .map(|b| b.as_ref())
            .ok_or_else(|| QilabError::InvalidInput(format!("unknown positive map id '{id}'")))
    }

    pub fn ids(&self) -> Vec<&str> {
        self.maps.keys().map(|s| s.as_str()).collect()
    }
}

/// (Φ ⊗ Id)(X) with Φ acting on tensor factor `factor` of `op`'s layout.
pub fn apply_map_to_factor(
    op: &HermitianOperator,
    factor: usize,
    map: &dyn PositiveMap,
) -> Result<HermitianOperator> {
    let layout = op.layout().clone();
    layout.check_subsystems(&[factor])?;
    let dims = layout.dims();
    let d = dims[factor];
    map.check_dim(d)?;
    let post: usize = dims[factor + 1..].iter().product();
    let pre: usize = dims[..factor].iter().product();
    let n = layout.total_dim();

    // Φ(E_ij) for the d² matrix units of the mapped factor
    let mut phi = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let unit = CMat::from_fn(d, d, |r, s| if r == i && s == j { cr(1.0) } else { cr(0.0) });
            phi.push(map.apply(&unit));
        }
    }

    let x = op.matrix();
    let mut out = CMat::zeros(n, n);
    let idx = |a: usize, i: usize, b: usize| (a * d + i) * post + b;
    for a in 0..pre {
        for ap in 0..pre {
            for b in 0..post {
                for bp in 0..post {
                    for i in 0..d {
                        for j in 0..d {
                            let coeff = x[(idx(a, i, b), idx(ap, j, bp))];
                            if coeff.norm_sqr() == 0.0 {
                                continue;
                            }
                            let ph = &phi[i * d + j];
                            for k in 0..d {
                                for l in 0..d {
                                    let w = ph[(k, l)];
                                    if w.norm_sqr() != 0.0 {
                                        out[(idx(a, k, b), idx(ap, l, bp))] += w * coeff;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(HermitianOperator::symmetrized(layout, out))
}

pub const CRITERION_TOL: f64 = 1e-9;

/// Outcome of a single separability criterion evaluation.
#[derive(Clone, Debug)]
pub struct CriterionVerdict {
    pub criterion: String,
    /// min eigenvalue for map criteria, trace norm for realignment
    pub statistic: f64,
    pub threshold: f64,
    pub detected_entanglement: bool,
    pub tolerance: f64,
}

impl CriterionVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "criterion": self.criterion,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "detected": self.detected_entanglement,
            "tol": self.tolerance,
        })
    }
}

/// Applies the positive map `map` to tensor factor `cut` of `rho` and reads
/// off the minimal eigenvalue; strictly negative means entanglement across
/// that cut.
pub fn positive_map_test(
    rho: &DensityOperator,
    cut: usize,
    map: &dyn PositiveMap,
) -> Result<CriterionVerdict> {
    let mapped = apply_map_to_factor(rho.op(), cut, map)?;
    let statistic = mapped.min_eigenvalue();
    Ok(CriterionVerdict {
        criterion: format!("positive-map:{}", map.id()),
        statistic,
        threshold: 0.0,
        detected_entanglement: statistic < -CRITERION_TOL,
        tolerance: CRITERION_TOL,
    })
}

/// Trace norm of the realigned matrix R(ρ)_{(i,k),(j,l)} = ρ_{(i,j),(k,l)};
/// any separable bipartite state satisfies ‖R(ρ)‖₁ ≤ 1.
pub fn realignment_test(rho: &DensityOperator) -> Result<CriterionVerdict> {
    let layout = rho.op().layout();
    if layout.n_factors() != 2 {
        return Err(QilabError::LayoutMismatch(format!(
            "realignment needs a bipartite layout, got {} factors",
            layout.n_factors()
        )));
    }
    let (da, db) = (layout.dims()[0], layout.dims()[1]);
    let x = rho.op().matrix();
    let realigned = CMat::from_fn(da * da, db * db, |r, s| {
        let (i, k) = (r / da, r % da);
        let (j, l) = (s / db, s % db);
        x[(i * db + j, k * db + l)]
    });
    let statistic: f64 = realigned.singular_values().iter().sum();
    Ok(CriterionVerdict {
        criterion: "realignment".to_string(),
        statistic,
        threshold: 1.0,
        detected_entanglement: statistic > 1.0 + CRITERION_TOL,
        tolerance: CRITERION_TOL,
    })
}

const EXTENSION_DIM_BUDGET: usize = 256;

/// Searches for a k-extension of a bipartite `rho` (B-side copies), i.e. a
/// feasible point of {PSD} ∩ {B-perm-invariant} ∩ {AB-marginal = ρ}; with
/// `with_ppt` the extension must additionally stay PSD under partial
/// transposition of the A factor.
pub fn k_extendibility_test(
    rho: &DensityOperator,
    k: usize,
    with_ppt: bool,
) -> Result<FeasibilityReport> {
    let layout = rho.op().layout();
    if layout.n_factors() != 2 {
        return Err(QilabError::LayoutMismatch(format!(
            "k-extendibility needs a bipartite layout, got {} factors",
            layout.n_factors()
        )));
    }
    if k == 0 {
        return Err(QilabError::ParamOutOfRange("k must be ≥ 1".into()));
    }
    let (da, db) = (layout.dims()[0], layout.dims()[1]);
    let ext_dim = da
        .checked_mul(db.checked_pow(k as u32).unwrap_or(usize::MAX))
        .unwrap_or(usize::MAX);
    if ext_dim > EXTENSION_DIM_BUDGET {
        return Err(QilabError::BudgetExceeded(format!(
            "extension dimension {da}·{db}^{k} = {ext_dim} exceeds {EXTENSION_DIM_BUDGET}"
        )));
    }
    let mut dims = vec![da];
    dims.extend(std::iter::repeat(db).take(k));
    let ext_layout = TensorLayout::new(dims)?;

    let mut sets = vec![
        ConvexSetSpec::PsdCone,
        ConvexSetSpec::PermInvariantSubspace { b_copies: k },
        ConvexSetSpec::marginal(vec![0, 1], rho.op().clone()),
    ];
    if with_ppt {
        sets.push(ConvexSetSpec::PartialTransposeImage {
            inner: Box::new(ConvexSetSpec::PsdCone),
            flip: vec![0],
        });
    }

    // warm start: ρ padded with maximally mixed extra copies, symmetrized
    let mut x0 = rho.op().clone();
    for _ in 1..k {
        x0 = x0.tensor(&HermitianOperator::identity(TensorLayout::single(db)).scale(1.0 / db as f64));
    }
    let x0 = if k > 1 {
        symmetrize_extension(&x0.with_layout(ext_layout.clone())?, k)?
    } else {
        x0.with_layout(ext_layout)?
    };
    dykstra_feasibility(&sets, &x0, DEFAULT_TOL_FEAS, DEFAULT_MAX_ITER)
}

/// sup over k-extendible states σ of tr(Mσ), via the closed form
/// ‖(1/k)Σ_j M̃(j)‖_∞ with M̃(j) the copy of M acting on A and the j-th B
/// factor.
pub fn h_extendible_closed_form(m: &HermitianOperator, k: usize) -> Result<f64> {
    let layout = m.layout();
    if layout.n_factors() != 2 {
        return Err(QilabError::LayoutMismatch(format!(
            "closed form needs a bipartite direction, got {} factors",
            layout.n_factors()
        )));
    }
    if k == 0 {
        return Err(QilabError::ParamOutOfRange("k must be ≥ 1".into()));
    }
    let (da, db) = (layout.dims()[0], layout.dims()[1]);
    let ext_dim = da * db.pow(k as u32);
    if ext_dim > EXTENSION_DIM_BUDGET {
        return Err(QilabError::BudgetExceeded(format!(
            "extension dimension {ext_dim} exceeds {EXTENSION_DIM_BUDGET}"
        )));
    }
    let mut dims = vec![da];
    dims.extend(std::iter::repeat(db).take(k));
    let ext_layout = TensorLayout::new(dims)?;
    let mut acc = HermitianOperator::zero(ext_layout.clone());
    for j in 0..k {
        acc = acc.add(&m.embed(&ext_layout, &[0, 1 + j])?);
    }
    Ok(acc.scale(1.0 / k as f64).schatten_norm(SchattenP::Inf))
}

/// Entrywise Q = N + P: N holds the largest common negative real entries of
/// the witnesses, P the smallest common positive ones.
pub fn build_q_minmax(witnesses: &[HermitianOperator]) -> Result<HermitianOperator> {
    let first = witnesses
        .first()
        .ok_or_else(|| QilabError::InvalidInput("need at least one witness".into()))?;
    let layout = first.layout().clone();
    for w in witnesses {
        if w.layout() != &layout {
            return Err(QilabError::LayoutMismatch(
                "witnesses must share a layout".into(),
            ));
        }
    }
    let n = layout.total_dim();
    let q = CMat::from_fn(n, n, |i, j| {
        let res: Vec<f64> = witnesses.iter().map(|w| w.matrix()[(i, j)].re).collect();
        let lo = res.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = res.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        cr(hi.min(0.0) + lo.max(0.0))
    });
    Ok(HermitianOperator::symmetrized(layout, q))
}

/// A set of per-bipartition witnesses lifted to a single multipartite one.
#[derive(Clone, Debug)]
pub struct WitnessBundle {
    pub witnesses: Vec<HermitianOperator>,
    pub q: HermitianOperator,
    pub shifts: Vec<HermitianOperator>,
    pub w_gme: HermitianOperator,
}

/// W_GME = Q + Σ_I [W_I − Q]₊; dominates every input witness since
/// W_GME − W_I ≥ (Q − W_I) + [W_I − Q]₊ = [Q − W_I]₊ ≥ 0.
pub fn witness_lift(q: &HermitianOperator, witnesses: &[HermitianOperator]) -> Result<WitnessBundle> {
    if witnesses.is_empty() {
        return Err(QilabError::InvalidInput("need at least one witness".into()));
    }
    let mut shifts = Vec::with_capacity(witnesses.len());
    let mut w_gme = q.clone();
    for w in witnesses {
        if w.layout() != q.layout() {
            return Err(QilabError::LayoutMismatch(
                "witnesses must share Q's layout".into(),
            ));
        }
        let t = w.sub(q);
        w_gme = w_gme.add(&t.psd_part());
        shifts.push(t);
    }
    Ok(WitnessBundle {
        witnesses: witnesses.to_vec(),
        q: q.clone(),
        shifts,
        w_gme,
    })
}

pub const MIXER_TOL_S: f64 = 1e-4;
const MIXER_TOL_FEAS: f64 = 1e-6;
const MIXER_MAX_ITER: usize = 30_000;

/// Result of the map-mixer program: the largest s for which ρ splits as
/// σ₁+σ₂+σ₃ with σᵢ ≥ s·Id and (Φᵢ⊗Id)(σᵢ) ≥ s·Id.
#[derive(Clone, Debug)]
pub struct MapMixerResult {
    pub s: f64,
    pub bracket: (f64, f64),
    pub decomposition: Vec<HermitianOperator>,
}

fn clip_spectrum_above(x: &HermitianOperator, s: f64) -> HermitianOperator {
    x.apply_spectral(|t| t.max(s))
}

/// one Dykstra pass over the product-space constraints at level s; the
/// partial-transpose constraints use that Γ is a Frobenius isometry
fn mixer_feasible_at(
    rho: &HermitianOperator,
    s: f64,
    start: &[HermitianOperator; 3],
) -> (bool, [HermitianOperator; 3], f64) {
    let n_sets = 3; // σᵢ ≥ sId | Σσᵢ = ρ | Γᵢ(σᵢ) ≥ sId
    let mut sigma = start.clone();
    let zero = HermitianOperator::zero(rho.layout().clone());
    let mut corrections: Vec<[HermitianOperator; 3]> =
        vec![[zero.clone(), zero.clone(), zero.clone()]; n_sets];
    let mut residual = f64::INFINITY;
    for cycle in 0..(MIXER_MAX_ITER / n_sets) {
        for set in 0..n_sets {
            let probe: Vec<HermitianOperator> = (0..3)
                .map(|i| sigma[i].add(&corrections[set][i]))
                .collect();
            let projected: Vec<HermitianOperator> = match set {
                0 => probe.iter().map(|x| clip_spectrum_above(x, s)).collect(),
                1 => {
                    let gap = rho
                        .sub(&probe[0])
                        .sub(&probe[1])
                        .sub(&probe[2])
                        .scale(1.0 / 3.0);
                    probe.iter().map(|x| x.add(&gap)).collect()
                }
                _ => (0..3)
                    .map(|i| {
                        let flipped = probe[i].partial_transpose(&[i]).expect("valid factor");
                        clip_spectrum_above(&flipped, s)
                            .partial_transpose(&[i])
                            .expect("valid factor")
                    })
                    .collect(),
            };
            for i in 0..3 {
                corrections[set][i] = probe[i].sub(&projected[i]);
            }
            sigma = [
                projected[0].clone(),
                projected[1].clone(),
                projected[2].clone(),
            ];
        }
        // residual: how far the current iterate is from each constraint
        let r_psd = sigma
            .iter()
            .map(|x| x.frobenius_distance(&clip_spectrum_above(x, s)))
            .fold(0.0, f64::max);
        let r_sum = rho
            .sub(&sigma[0])
            .sub(&sigma[1])
            .sub(&sigma[2])
            .frobenius_norm();
        let r_pt = (0..3)
            .map(|i| {
                let flipped = sigma[i].partial_transpose(&[i]).expect("valid factor");
                flipped.frobenius_distance(&clip_spectrum_above(&flipped, s))
            })
            .fold(0.0, f64::max);
        residual = r_psd.max(r_sum).max(r_pt);
        if residual < MIXER_TOL_FEAS {
            return (true, sigma, residual);
        }
        // stall heuristic mirroring the single-operator solver
        if cycle > 0 && cycle % 400 == 0 && residual > 10.0 * MIXER_TOL_FEAS {
            break;
        }
    }
    (false, sigma, residual)
}

/// Bisection on s with product-space Dykstra feasibility at each level.
/// Only the transpose map admits the exact constraint projection used here
/// (partial transposition is a Frobenius isometry), so that is what the
/// mixer supports per cut.
pub fn map_mixer(rho: &DensityOperator, map_ids: &[&str; 3]) -> Result<MapMixerResult> {
    let layout = rho.op().layout();
    if layout.n_factors() != 3 {
        return Err(QilabError::LayoutMismatch(format!(
            "map mixer needs a tripartite layout, got {} factors",
            layout.n_factors()
        )));
    }
    if layout.total_dim() > 64 {
        return Err(QilabError::BudgetExceeded(format!(
            "map mixer budget is total dimension ≤ 64, got {}",
            layout.total_dim()
        )));
    }
    for id in map_ids {
        if *id != "transpose" {
            return Err(QilabError::InvalidInput(format!(
                "map mixer supports the transpose map per cut, got '{id}'"
            )));
        }
    }

    let third = rho.op().scale(1.0 / 3.0);
    let start = [third.clone(), third.clone(), third];
    // s is bounded above by λ_max(ρ)/3 and below by −‖ρ‖_∞ (at which point
    // σᵢ = ρ/3 already satisfies every shifted constraint)
    let norm = rho.op().schatten_norm(SchattenP::Inf);
    let mut lo = -norm - 1e-3;
    let mut hi = rho.op().max_eigenvalue() / 3.0 + 1e-3;
    let (ok, mut best, _) = mixer_feasible_at(rho.op(), lo, &start);
    if !ok {
        return Err(QilabError::Infeasible(
            "mixer infeasible even at the trivial lower bound".into(),
        ));
    }
    let mut warm = best.clone();
    while hi - lo > MIXER_TOL_S {
        let mid = 0.5 * (lo + hi);
        let (ok, sig, _) = mixer_feasible_at(rho.op(), mid, &warm);
        if ok {
            lo = mid;
            best = sig.clone();
            warm = sig;
        } else {
            hi = mid;
        }
    }
    Ok(MapMixerResult {
        s: lo,
        bracket: (lo, hi),
        decomposition: best.to_vec(),
    })
}

/// ρ_G = (Id + (α/d^{k/2})·G)/d^k with G a traceless GUE matrix; `clipped`
/// reports the (rare) PSD fallback.
pub struct GmeSampleReport {
    pub state: DensityOperator,
    pub clipped: bool,
}

pub fn random_gme_state(
    alpha: f64,
    d: usize,
    k_parties: usize,
    rng: &mut impl Rng,
) -> Result<GmeSampleReport> {
    if !(0.0..0.25).contains(&alpha) {
        return Err(QilabError::ParamOutOfRange(format!(
            "need 0 ≤ α < 1/4, got {alpha}"
        )));
    }
    let layout = TensorLayout::uniform(d, k_parties);
    let n = layout.total_dim();
    let g = crate::ensembles::sample_traceless_gue(n, rng);
    let scale = alpha / (d as f64).powf(k_parties as f64 / 2.0);
    let raw = HermitianOperator::identity(layout.clone())
        .add(&g.with_layout(layout)?.scale(scale))
        .scale(1.0 / n as f64);
    if raw.min_eigenvalue() >= 0.0 {
        Ok(GmeSampleReport {
            state: DensityOperator::new(raw)?,
            clipped: false,
        })
    } else {
        let clipped = raw.psd_part();
        let state = DensityOperator::new(clipped.scale(1.0 / clipped.trace()))?;
        Ok(GmeSampleReport { state, clipped: true })
    }
}

/// Random biseparable state: a Dirichlet mixture over bipartitions of
/// mixtures of Haar product pure states across each cut. Used to audit
/// witness soundness.
pub fn random_biseparable(
    layout: &TensorLayout,
    terms_per_cut: usize,
    rng: &mut impl Rng,
) -> Result<DensityOperator> {
    let parties = layout.n_factors();
    if parties < 3 {
        return Err(QilabError::LayoutMismatch(
            "biseparable sampling needs ≥ 3 parties".into(),
        ));
    }
    // single-party cuts {i | rest}; that covers every bipartition class for
    // three parties
    let cuts: Vec<usize> = (0..parties).collect();
    let weights = dirichlet_weights(cuts.len(), rng);
    let mut acc = HermitianOperator::zero(layout.clone());
    for (&cut, &w) in cuts.iter().zip(weights.iter()) {
        let inner = dirichlet_weights(terms_per_cut, rng);
        for &p in &inner {
            let state = haar_cut_product(layout, cut, rng)?;
            acc = acc.add(&state.scale(w * p));
        }
    }
    DensityOperator::new(acc)
}

fn dirichlet_weights(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let dir = Dirichlet::new(&vec![1.0; n]).expect("valid Dirichlet parameters");
    dir.sample(rng)
}

/// Haar product pure state |φ⟩⟨φ| ⊗ |ψ⟩⟨ψ| across the cut {cut | rest}.
fn haar_cut_product(
    layout: &TensorLayout,
    cut: usize,
    rng: &mut impl Rng,
) -> Result<HermitianOperator> {
    let dims = layout.dims();
    let d_cut = dims[cut];
    let d_rest: usize = dims
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != cut)
        .map(|(_, d)| d)
        .product();
    let a = haar_vector_raw(d_cut, rng);
    let b = haar_vector_raw(d_rest, rng);
    // stitch the two halves back into the full layout's index order
    let n = layout.total_dim();
    let strides = layout_strides(dims);
    let rest_positions: Vec<usize> = (0..dims.len()).filter(|&i| i != cut).collect();
    let mut psi = CVec::zeros(n);
    for idx in 0..n {
        let mut rest_index = 0usize;
        for &p in &rest_positions {
            rest_index = rest_index * dims[p] + (idx / strides[p]) % dims[p];
        }
        let cut_index = (idx / strides[cut]) % d_cut;
        psi[idx] = a[cut_index] * b[rest_index];
    }
    Ok(DensityOperator::from_pure(layout.clone(), &psi)?.into_operator())
}

fn layout_strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

fn haar_vector_raw(d: usize, rng: &mut impl Rng) -> CVec {
    let mut v = CVec::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    });
    let norm = v.norm();
    v /= C64::from(norm);
    v
}

/// per-cut transpose witnesses for the GHZ state: W = Id/2 − |GHZ⟩⟨GHZ|
/// works for every single-party cut
pub fn ghz_witness(d: usize) -> Result<HermitianOperator> {
    let ghz = crate::operators::ghz(d)?;
    Ok(HermitianOperator::identity(ghz.op().layout().clone())
        .scale(0.5)
        .sub(ghz.op()))
}

pub use crate::convex::FeasibilityStatus;
