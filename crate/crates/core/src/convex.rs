//! Dykstra alternating-projection engine over convex sets with exact
//! Frobenius projections, plus a bisection wrapper that turns linear
//! optimization over an intersection into a sequence of feasibility queries.
//!
//! This is the numerical backbone for the extendibility tests and the
//! restricted measurement norms.

use crate::error::{QilabError, Result};
use crate::operators::{symmetrize_extension, HermitianOperator};

/// A convex set carrying an exact Euclidean projection rule.
#[derive(Clone, Debug)]
pub enum ConvexSetSpec {
    /// Positive semidefinite cone.
    PsdCone,
    /// Spectral box lo·Id ≤ X ≤ hi·Id (projection = eigenvalue clipping).
    OperatorInterval { lo: f64, hi: f64 },
    /// Affine set { X : Tr_{complement of keep} X = target }. An empty `keep`
    /// constrains the total trace to `trace_target`.
    AffineMarginal {
        keep: Vec<usize>,
        target: Option<HermitianOperator>,
        trace_target: f64,
    },
    /// Operators invariant under permutations of the last `b_copies` factors.
    PermInvariantSubspace { b_copies: usize },
    /// Halfspace ⟨direction, X⟩ ≥ bound (Hilbert-Schmidt inner product).
    Halfspace {
        direction: HermitianOperator,
        bound: f64,
    },
    /// { X : X^Γ ∈ inner } for the partial transpose Γ over `flip`.
    /// Γ is a Frobenius isometry and an involution, so the projection is
    /// Γ ∘ P_inner ∘ Γ.
    PartialTransposeImage {
        inner: Box<ConvexSetSpec>,
        flip: Vec<usize>,
    },
}

impl ConvexSetSpec {
    pub fn marginal(keep: Vec<usize>, target: HermitianOperator) -> Self {
        ConvexSetSpec::AffineMarginal {
            keep,
            target: Some(target),
            trace_target: 0.0,
        }
    }

    pub fn unit_trace() -> Self {
        ConvexSetSpec::AffineMarginal {
            keep: vec![],
            target: None,
            trace_target: 1.0,
        }
    }

    /// Exact Frobenius projection of `x` onto the set.
    pub fn project(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        match self {
            ConvexSetSpec::PsdCone => Ok(x.psd_part()),
            ConvexSetSpec::OperatorInterval { lo, hi } => {
                if lo > hi {
                    return Err(QilabError::InvalidInput(format!(
                        "empty interval [{lo}, {hi}]"
                    )));
                }
                let (lo, hi) = (*lo, *hi);
                Ok(x.apply_spectral(move |t| t.clamp(lo, hi)))
            }
            ConvexSetSpec::AffineMarginal {
                keep,
                target,
                trace_target,
            } => {
                if keep.is_empty() {
                    let n = x.dim() as f64;
                    let shift = (trace_target - x.trace()) / n;
                    let id = HermitianOperator::identity(x.layout().clone());
                    return Ok(x.add(&id.scale(shift)));
                }
                let target = target.as_ref().ok_or_else(|| {
                    QilabError::InvalidInput("marginal constraint needs a target".into())
                })?;
                let current = x.partial_trace(keep)?;
                let gap = target.sub(&current);
                let d_rest: f64 = (x.dim() / gap.dim()) as f64;
                let corr = gap.embed(x.layout(), keep)?.scale(1.0 / d_rest);
                Ok(x.add(&corr))
            }
            ConvexSetSpec::PermInvariantSubspace { b_copies } => {
                symmetrize_extension(x, *b_copies)
            }
            ConvexSetSpec::Halfspace { direction, bound } => {
                let val = direction.inner(x);
                if val >= *bound {
                    return Ok(x.clone());
                }
                let norm2 = direction.inner(direction);
                if norm2 <= 0.0 {
                    return Err(QilabError::InvalidInput("zero halfspace direction".into()));
                }
                Ok(x.add(&direction.scale((bound - val) / norm2)))
            }
            ConvexSetSpec::PartialTransposeImage { inner, flip } => {
                let flipped = x.partial_transpose(flip)?;
                let projected = inner.project(&flipped)?;
                projected.partial_transpose(flip)
            }
        }
    }

    /// Frobenius distance from `x` to the set.
    pub fn distance(&self, x: &HermitianOperator) -> Result<f64> {
        Ok(self.project(x)?.frobenius_distance(x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    InfeasibleNumerical,
    BudgetExhausted,
}

/// Outcome of a Dykstra run. `residual` is the maximum distance of the final
/// iterate to any of the sets; `trace` records (cycle, residual) samples.
#[derive(Clone, Debug)]
pub struct FeasibilityReport {
    pub status: FeasibilityStatus,
    pub iterate: HermitianOperator,
    pub residual: f64,
    pub iterations: usize,
    pub trace: Vec<(usize, f64)>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

pub const DEFAULT_TOL_FEAS: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 20_000;
const STALL_WINDOW: usize = 200;
const STALL_IMPROVEMENT: f64 = 1e-2;

/// Dykstra's alternating projections with correction terms over the given
/// sets, from `x0`. The verdict `InfeasibleNumerical` is a heuristic: the
/// residual stalled above 10·tol_feas, improving by less than 1% relative
/// over a 200-cycle window. It is not a separation certificate.
pub fn dykstra_feasibility(
    sets: &[ConvexSetSpec],
    x0: &HermitianOperator,
    tol_feas: f64,
    max_iter: usize,
) -> Result<FeasibilityReport> {
    if sets.is_empty() {
        return Err(QilabError::InvalidInput("need at least one set".into()));
    }
    let zero = HermitianOperator::zero(x0.layout().clone());
    let mut corrections = vec![zero; sets.len()];
    let mut x = x0.clone();
    let mut trace = Vec::new();
    let mut window_best = f64::INFINITY;
    let mut prev_window_best = f64::INFINITY;
    for cycle in 1..=max_iter {
        for (set, p) in sets.iter().zip(corrections.iter_mut()) {
            let y = x.add(p);
            let projected = set.project(&y)?;
            *p = y.sub(&projected);
            x = projected;
        }
        // residual: how far the current iterate is from every set
        let mut residual: f64 = 0.0;
        for set in sets {
            residual = residual.max(set.distance(&x)?);
        }
        if cycle <= 10 || cycle % 10 == 0 {
            trace.push((cycle, residual));
        }
        if residual <= tol_feas {
            return Ok(FeasibilityReport {
                status: FeasibilityStatus::Feasible,
                iterate: x,
                residual,
                iterations: cycle,
                trace,
            });
        }
        window_best = window_best.min(residual);
        if cycle % STALL_WINDOW == 0 {
            let stalled = residual > 10.0 * tol_feas
                && window_best > (1.0 - STALL_IMPROVEMENT) * prev_window_best;
            if stalled {
                return Ok(FeasibilityReport {
                    status: FeasibilityStatus::InfeasibleNumerical,
                    iterate: x,
                    residual,
                    iterations: cycle,
                    trace,
                });
            }
            prev_window_best = window_best;
            window_best = f64::INFINITY;
        }
    }
    let mut residual: f64 = 0.0;
    for set in sets {
        residual = residual.max(set.distance(&x)?);
    }
    Ok(FeasibilityReport {
        status: FeasibilityStatus::BudgetExhausted,
        iterate: x,
        residual,
        iterations: max_iter,
        trace,
    })
}

/// Result of a support-function bisection.
#[derive(Clone, Debug)]
pub struct SupportValue {
    pub value: f64,
    pub bracket: (f64, f64),
    pub certificate: HermitianOperator,
    pub halvings: usize,
}

pub const DEFAULT_TOL_VAL: f64 = 1e-3;
const MAX_HALVINGS: usize = 40;

/// sup ⟨direction, σ⟩ over σ in the intersection of `sets`, computed by
/// bisection on the extra halfspace ⟨direction, σ⟩ ≥ c. The caller must make
/// the intersection nonempty and bounded (e.g. via a unit-trace marginal
/// constraint). The default upper bracket is the top eigenvalue of
/// `direction`, which is valid for unit-trace state sets; other callers pass
/// their own bound.
pub fn support_value(
    direction: &HermitianOperator,
    sets: &[ConvexSetSpec],
    x0: &HermitianOperator,
    tol_val: f64,
    upper_bound: Option<f64>,
) -> Result<SupportValue> {
    let base = dykstra_feasibility(sets, x0, DEFAULT_TOL_FEAS, DEFAULT_MAX_ITER)?;
    if !base.is_feasible() {
        return Err(QilabError::Infeasible(
            "base intersection is not feasible".into(),
        ));
    }
    let mut lo = direction.inner(&base.iterate);
    let mut hi = upper_bound.unwrap_or_else(|| direction.max_eigenvalue());
    if hi < lo {
        hi = lo;
    }
    let mut certificate = base.iterate.clone();
    let mut halvings = 0;
    while hi - lo > tol_val && halvings < MAX_HALVINGS {
        let c = 0.5 * (lo + hi);
        let mut probe = sets.to_vec();
        probe.push(ConvexSetSpec::Halfspace {
            direction: direction.clone(),
            bound: c,
        });
        let report = dykstra_feasibility(&probe, &certificate, DEFAULT_TOL_FEAS, DEFAULT_MAX_ITER)?;
        if report.is_feasible() {
            certificate = report.iterate;
            lo = direction.inner(&certificate).max(c);
        } else {
            hi = c;
        }
        halvings += 1;
    }
    Ok(SupportValue {
        value: 0.5 * (lo + hi),
        bracket: (lo, hi),
        certificate,
        halvings,
    })
}
