//! Dense Hermitian/complex operator algebra over explicitly factorized
//! tensor-product spaces.
//!
//! Every operator carries a [`TensorLayout`] naming its local dimensions, and
//! all subsystem arithmetic is row-major over that declared order.

use crate::combinatorics::Permutation;
use crate::error::{QilabError, Result};
use crate::linalg::{cr, hermitian_eigen, hermitian_eigenvalues, CMat, CVec, C64};
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Relative Frobenius drift tolerated when accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalue floor below which an operator is reported genuinely non-PSD.
pub const PSD_FLOOR: f64 = -1e-10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorLayout {
    dims: Vec<usize>,
}

impl TensorLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(QilabError::InvalidDimension(format!(
                "layout dims must be nonempty and positive, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn single(d: usize) -> Self {
        Self::new(vec![d]).expect("positive dimension")
    }

    /// `n` tensor factors, each of local dimension `d`.
    pub fn uniform(d: usize, n: usize) -> Self {
        Self::new(vec![d; n]).expect("positive dimensions")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &TensorLayout) -> TensorLayout {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        TensorLayout { dims }
    }

    pub fn restrict(&self, keep: &[usize]) -> TensorLayout {
        TensorLayout {
            dims: keep.iter().map(|&i| self.dims[i]).collect(),
        }
    }

    pub fn check_subsystems(&self, subsystems: &[usize]) -> Result<()> {
        for &i in subsystems {
            if i >= self.dims.len() {
                return Err(QilabError::InvalidSubsystem {
                    index: i,
                    n_factors: self.dims.len(),
                });
            }
        }
        Ok(())
    }

    /// Row-major strides: index = Σ_j multi[j] * stride[j].
    pub fn strides(&self) -> Vec<usize> {
        let n = self.dims.len();
        let mut s = vec![1usize; n];
        for j in (0..n.saturating_sub(1)).rev() {
            s[j] = s[j + 1] * self.dims[j + 1];
        }
        s
    }

    pub fn index_to_multi(&self, mut index: usize) -> Vec<usize> {
        let mut multi = vec![0usize; self.dims.len()];
        for j in (0..self.dims.len()).rev() {
            multi[j] = index % self.dims[j];
            index /= self.dims[j];
        }
        multi
    }

    pub fn multi_to_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dims.len());
        let mut index = 0;
        for (j, &m) in multi.iter().enumerate() {
            debug_assert!(m < self.dims[j]);
            index = index * self.dims[j] + m;
        }
        index
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchattenP {
    One,
    Two,
    Inf,
}

#[derive(Clone, Debug)]
pub struct HermitianOperator {
    layout: TensorLayout,
    mat: CMat,
}

impl HermitianOperator {
    /// Accepts a matrix that is Hermitian up to [`HERMITICITY_TOL`] relative
    /// Frobenius drift, then symmetrizes it exactly.
    pub fn new(layout: TensorLayout, mat: CMat) -> Result<Self> {
        let n = layout.total_dim();
        if mat.nrows() != n || mat.ncols() != n {
            return Err(QilabError::LayoutMismatch(format!(
                "matrix is {}x{} but layout total dimension is {n}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let drift = (&mat - mat.adjoint()).norm() / mat.norm().max(1.0);
        if drift > HERMITICITY_TOL {
            return Err(QilabError::NotHermitian(drift));
        }
        Ok(Self::symmetrized(layout, mat))
    }

    /// Symmetrizes (x + x†)/2 without a drift check; for internal results that
    /// are Hermitian by construction.
    pub fn symmetrized(layout: TensorLayout, mat: CMat) -> Self {
        let sym = (&mat + mat.adjoint()).scale(0.5);
        Self { layout, mat: sym }
    }

    pub fn zero(layout: TensorLayout) -> Self {
        let n = layout.total_dim();
        Self {
            layout,
            mat: CMat::zeros(n, n),
        }
    }

    pub fn identity(layout: TensorLayout) -> Self {
        let n = layout.total_dim();
        Self {
            layout,
            mat: CMat::identity(n, n),
        }
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Reinterpret the same matrix under a different factorization of the same
    /// total dimension.
    pub fn with_layout(&self, layout: TensorLayout) -> Result<Self> {
        if layout.total_dim() != self.dim() {
            return Err(QilabError::LayoutMismatch(format!(
                "cannot relabel a dim-{} operator with a dim-{} layout",
                self.dim(),
                layout.total_dim()
            )));
        }
        Ok(Self {
            layout,
            mat: self.mat.clone(),
        })
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    /// Hilbert–Schmidt inner product ⟨a, b⟩ = Tr(a b); real for Hermitian a, b.
    pub fn inner(&self, other: &Self) -> f64 {
        (&self.mat * &other.mat)
            .diagonal()
            .iter()
            .map(|z| z.re)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            layout: self.layout.clone(),
            mat: self.mat.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            layout: self.layout.clone(),
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            layout: self.layout.clone(),
            mat: &self.mat - &other.mat,
        }
    }

    /// Eigenvalues ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    pub fn eigen(&self) -> (Vec<f64>, CMat) {
        hermitian_eigen(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("nonempty spectrum")
    }

    pub fn schatten_norm(&self, p: SchattenP) -> f64 {
        let eigs = self.eigenvalues();
        match p {
            SchattenP::One => eigs.iter().map(|x| x.abs()).sum(),
            SchattenP::Two => eigs.iter().map(|x| x * x).sum::<f64>().sqrt(),
            SchattenP::Inf => eigs.iter().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }

    /// Apply a real function to the spectrum.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> Self {
        let (vals, u) = self.eigen();
        let n = self.dim();
        let d = CMat::from_fn(n, n, |i, j| {
            if i == j {
                cr(f(vals[i]))
            } else {
                cr(0.0)
            }
        });
        Self::symmetrized(self.layout.clone(), &u * d * u.adjoint())
    }

    /// Positive part [x]₊: negative eigenvalues clipped to zero.
    pub fn psd_part(&self) -> Self {
        self.apply_spectral(|t| t.max(0.0))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            layout: self.layout.concat(&other.layout),
            mat: self.mat.kronecker(&other.mat),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        self.layout.check_subsystems(keep)?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(QilabError::InvalidInput(
                "partial_trace requires a nonempty keep set".into(),
            ));
        }
        let traced: Vec<usize> = (0..self.layout.n_factors())
            .filter(|i| !keep.contains(i))
            .collect();
        let out_layout = self.layout.restrict(&keep);
        let traced_layout = if traced.is_empty() {
            None
        } else {
            Some(self.layout.restrict(&traced))
        };
        let out_dim = out_layout.total_dim();
        let t_dim = traced_layout.as_ref().map_or(1, |l| l.total_dim());
        let n_factors = self.layout.n_factors();
        let mut out = CMat::zeros(out_dim, out_dim);
        let mut row_multi = vec![0usize; n_factors];
        let mut col_multi = vec![0usize; n_factors];
        for rk in 0..out_dim {
            let rkm = out_layout.index_to_multi(rk);
            for ck in 0..out_dim {
                let ckm = out_layout.index_to_multi(ck);
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..t_dim {
                    let tm = traced_layout
                        .as_ref()
                        .map_or_else(Vec::new, |l| l.index_to_multi(t));
                    for (pos, &f) in keep.iter().enumerate() {
                        row_multi[f] = rkm[pos];
                        col_multi[f] = ckm[pos];
                    }
                    for (pos, &f) in traced.iter().enumerate() {
                        row_multi[f] = tm[pos];
                        col_multi[f] = tm[pos];
                    }
                    let r = self.layout.multi_to_index(&row_multi);
                    let c = self.layout.multi_to_index(&col_multi);
                    acc += self.mat[(r, c)];
                }
                out[(rk, ck)] = acc;
            }
        }
        Ok(Self {
            layout: out_layout,
            mat: out,
        })
    }

    pub fn partial_transpose(&self, flip: &[usize]) -> Result<Self> {
        self.layout.check_subsystems(flip)?;
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for r in 0..n {
            let rm = self.layout.index_to_multi(r);
            for c in 0..n {
                let cm = self.layout.index_to_multi(c);
                let mut rm2 = rm.clone();
                let mut cm2 = cm.clone();
                for &f in flip {
                    rm2[f] = cm[f];
                    cm2[f] = rm[f];
                }
                out[(
                    self.layout.multi_to_index(&rm2),
                    self.layout.multi_to_index(&cm2),
                )] = self.mat[(r, c)];
            }
        }
        Ok(Self {
            layout: self.layout.clone(),
            mat: out,
        })
    }

    /// Embed this operator into `target`, placing its i-th factor at
    /// `positions[i]` and acting as identity elsewhere.
    pub fn embed(&self, target: &TensorLayout, positions: &[usize]) -> Result<Self> {
        if positions.len() != self.layout.n_factors() {
            return Err(QilabError::InvalidInput(
                "embed: positions must name every factor of the operator".into(),
            ));
        }
        target.check_subsystems(positions)?;
        for (i, &p) in positions.iter().enumerate() {
            if target.dims()[p] != self.layout.dims()[i] {
                return Err(QilabError::LayoutMismatch(format!(
                    "embed: factor {i} has dim {} but target slot {p} has dim {}",
                    self.layout.dims()[i],
                    target.dims()[p]
                )));
            }
        }
        let rest: Vec<usize> = (0..target.n_factors())
            .filter(|i| !positions.contains(i))
            .collect();
        let rest_layout = target.restrict(&rest);
        let rest_dim = rest_layout.total_dim();
        let n = target.total_dim();
        let sd = self.dim();
        let mut out = CMat::zeros(n, n);
        let mut row_multi = vec![0usize; target.n_factors()];
        let mut col_multi = vec![0usize; target.n_factors()];
        for r in 0..sd {
            let rm = self.layout.index_to_multi(r);
            for c in 0..sd {
                let cm = self.layout.index_to_multi(c);
                let v = self.mat[(r, c)];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                for t in 0..rest_dim {
                    let tm = rest_layout.index_to_multi(t);
                    for (i, &p) in positions.iter().enumerate() {
                        row_multi[p] = rm[i];
                        col_multi[p] = cm[i];
                    }
                    for (i, &p) in rest.iter().enumerate() {
                        row_multi[p] = tm[i];
                        col_multi[p] = tm[i];
                    }
                    out[(
                        target.multi_to_index(&row_multi),
                        target.multi_to_index(&col_multi),
                    )] = v;
                }
            }
        }
        Ok(Self {
            layout: target.clone(),
            mat: out,
        })
    }

    /// u x u† (u need not be a permutation matrix, only square of equal size).
    pub fn conjugate_by(&self, u: &CMat) -> Self {
        Self::symmetrized(self.layout.clone(), u * &self.mat * u.adjoint())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.dim();
        let re: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| self.mat[(i, j)].re).collect())
            .collect();
        let im: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| self.mat[(i, j)].im).collect())
            .collect();
        json!({"dims": self.layout.dims(), "re": re, "im": im})
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let parse = || -> Option<(Vec<usize>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
            let dims: Vec<usize> = serde_json::from_value(v.get("dims")?.clone()).ok()?;
            let re: Vec<Vec<f64>> = serde_json::from_value(v.get("re")?.clone()).ok()?;
            let im: Vec<Vec<f64>> = serde_json::from_value(v.get("im")?.clone()).ok()?;
            Some((dims, re, im))
        };
        let (dims, re, im) =
            parse().ok_or_else(|| QilabError::Parse("operator JSON requires dims/re/im".into()))?;
        let layout = TensorLayout::new(dims)?;
        let n = layout.total_dim();
        if re.len() != n || im.len() != n || re.iter().chain(im.iter()).any(|r| r.len() != n) {
            return Err(QilabError::Parse(format!(
                "operator JSON: expected {n}x{n} re/im entries"
            )));
        }
        let mat = CMat::from_fn(n, n, |i, j| C64::new(re[i][j], im[i][j]));
        Self::new(layout, mat)
    }
}

#[derive(Clone, Debug)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        if (op.trace() - 1.0).abs() > 1e-10 {
            return Err(QilabError::NotDensity(format!(
                "trace is {}, expected 1",
                op.trace()
            )));
        }
        let min_eig = op.min_eigenvalue();
        if min_eig < PSD_FLOOR {
            return Err(QilabError::NotDensity(format!(
                "minimum eigenvalue {min_eig:.3e} is genuinely negative"
            )));
        }
        Ok(Self { op })
    }

    pub fn from_pure(layout: TensorLayout, psi: &CVec) -> Result<Self> {
        let norm = psi.norm();
        if norm < 1e-300 {
            return Err(QilabError::NotDensity("zero vector".into()));
        }
        let v = psi.scale(1.0 / norm);
        let mat = &v * v.adjoint();
        Self::new(HermitianOperator::symmetrized(layout, mat))
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    pub fn layout(&self) -> &TensorLayout {
        self.op.layout()
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }
}

/// Permutation unitary U(π) on (C^d)^{⊗n}: moves subsystem j to slot π(j),
/// so that U(π)U(σ) = U(π∘σ).
pub fn permutation_unitary(pi: &Permutation, d: usize) -> CMat {
    let n = pi.len();
    let layout = TensorLayout::uniform(d, n);
    let total = layout.total_dim();
    let mut u = CMat::zeros(total, total);
    for col in 0..total {
        let cm = layout.index_to_multi(col);
        let mut rm = vec![0usize; n];
        for j in 0..n {
            rm[pi.image(j)] = cm[j];
        }
        u[(layout.multi_to_index(&rm), col)] = cr(1.0);
    }
    u
}

/// Orthogonal projector onto the symmetric subspace Sym^n(C^d),
/// (1/n!) Σ_π U(π); its trace is binomial(n+d−1, n).
pub fn symmetric_projector(n: usize, d: usize) -> Result<HermitianOperator> {
    if n == 0 || d == 0 {
        return Err(QilabError::ParamOutOfRange(
            "symmetric_projector needs n ≥ 1, d ≥ 1".into(),
        ));
    }
    let layout = TensorLayout::uniform(d, n);
    let total = layout.total_dim();
    let mut acc = CMat::zeros(total, total);
    let mut count = 0usize;
    for pi in Permutation::all(n) {
        acc += permutation_unitary(&pi, d);
        count += 1;
    }
    Ok(HermitianOperator::symmetrized(
        layout,
        acc.scale(1.0 / count as f64),
    ))
}

/// Average of (Id_A ⊗ U(π)) x (Id_A ⊗ U(π))† over all π permuting the last
/// `b_copies` factors; the orthogonal projection onto the B-permutation-
/// invariant subspace.
pub fn symmetrize_extension(x: &HermitianOperator, b_copies: usize) -> Result<HermitianOperator> {
    let nf = x.layout().n_factors();
    if b_copies == 0 || b_copies >= nf {
        return Err(QilabError::InvalidInput(format!(
            "symmetrize_extension: need 1 ≤ b_copies < {nf}, got {b_copies}"
        )));
    }
    let first_b = nf - b_copies;
    let db = x.layout().dims()[first_b];
    if x.layout().dims()[first_b..].iter().any(|&d| d != db) {
        return Err(QilabError::LayoutMismatch(
            "symmetrize_extension: trailing B factors must share one dimension".into(),
        ));
    }
    let layout = x.layout().clone();
    let n = x.dim();
    let mut acc = CMat::zeros(n, n);
    let mut count = 0usize;
    // Conjugation by a permutation unitary is a relabeling of indices; apply
    // it directly instead of multiplying matrices.
    for pi in Permutation::all(b_copies) {
        let perm_index = |idx: usize| -> usize {
            let mut m = layout.index_to_multi(idx);
            let tail: Vec<usize> = (0..b_copies).map(|j| m[first_b + j]).collect();
            for j in 0..b_copies {
                m[first_b + pi.image(j)] = tail[j];
            }
            layout.multi_to_index(&m)
        };
        for r in 0..n {
            let pr = perm_index(r);
            for c in 0..n {
                acc[(pr, perm_index(c))] += x.matrix()[(r, c)];
            }
        }
        count += 1;
    }
    Ok(HermitianOperator::symmetrized(
        layout,
        acc.scale(1.0 / count as f64),
    ))
}

pub fn max_mixed(layout: TensorLayout) -> DensityOperator {
    let n = layout.total_dim();
    let op = HermitianOperator::identity(layout).scale(1.0 / n as f64);
    DensityOperator::new(op).expect("maximally mixed state is a state")
}

/// |Ω⟩⟨Ω| with Ω = (1/√d) Σ_i |ii⟩ on C^d ⊗ C^d.
pub fn max_entangled(d: usize) -> Result<DensityOperator> {
    if d < 2 {
        return Err(QilabError::ParamOutOfRange("max_entangled needs d ≥ 2".into()));
    }
    let layout = TensorLayout::uniform(d, 2);
    let mut psi = CVec::zeros(d * d);
    for i in 0..d {
        psi[i * d + i] = cr(1.0);
    }
    DensityOperator::from_pure(layout, &psi)
}

/// |GHZ⟩⟨GHZ| with GHZ = (1/√d) Σ_i |iii⟩ on (C^d)^{⊗3}.
pub fn ghz(d: usize) -> Result<DensityOperator> {
    if d < 2 {
        return Err(QilabError::ParamOutOfRange("ghz needs d ≥ 2".into()));
    }
    let layout = TensorLayout::uniform(d, 3);
    let mut psi = CVec::zeros(d * d * d);
    for i in 0..d {
        psi[i * d * d + i * d + i] = cr(1.0);
    }
    DensityOperator::from_pure(layout, &psi)
}

/// π_s = 2/(d(d+1)) P_{Sym²}, the symmetric Werner state.
pub fn sym_state(d: usize) -> Result<DensityOperator> {
    let p = symmetric_projector(2, d)?;
    let dim_sym = (d * (d + 1) / 2) as f64;
    DensityOperator::new(p.scale(1.0 / dim_sym))
}

/// π_a = 2/(d(d−1)) P_{Asym²}, the antisymmetric Werner state.
pub fn antisym_state(d: usize) -> Result<DensityOperator> {
    if d < 2 {
        return Err(QilabError::ParamOutOfRange("antisym_state needs d ≥ 2".into()));
    }
    let p = symmetric_projector(2, d)?;
    let anti = HermitianOperator::identity(p.layout().clone()).sub(&p);
    let dim_asym = (d * (d - 1) / 2) as f64;
    DensityOperator::new(anti.scale(1.0 / dim_asym))
}

/// Werner family ρ_λ = λ π_s + (1−λ) π_a; separable exactly for λ ≥ 1/2.
pub fn werner(lambda: f64, d: usize) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(QilabError::ParamOutOfRange(format!(
            "werner needs 0 ≤ λ ≤ 1, got {lambda}"
        )));
    }
    let s = sym_state(d)?;
    let a = antisym_state(d)?;
    DensityOperator::new(s.op().scale(lambda).add(&a.op().scale(1.0 - lambda)))
}

/// Isotropic family ρ_p = p |Ω⟩⟨Ω| + (1−p) Id/d².
pub fn isotropic(p: f64, d: usize) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QilabError::ParamOutOfRange(format!(
            "isotropic needs 0 ≤ p ≤ 1, got {p}"
        )));
    }
    let phi = max_entangled(d)?;
    let mm = max_mixed(TensorLayout::uniform(d, 2));
    DensityOperator::new(phi.op().scale(p).add(&mm.op().scale(1.0 - p)))
}
