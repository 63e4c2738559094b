//! Exact big-integer evaluation of the combinatorial moment formulas for
//! plain and tensor-embedded ("modified") GUE/Wishart ensembles, plus the
//! permutation/pairing machinery they are built from.
//!
//! Everything here is exact: coefficients are `BigInt`, evaluations at
//! concrete (d, s) are big-integer arithmetic, and no floats appear.

use crate::error::{QilabError, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Hard enumeration caps: permutations up to 8!, pairings up to 15!! terms.
pub const MAX_PERMUTATION_P: usize = 8;
pub const MAX_PAIRING_2P: usize = 16;
/// Abort any moment sum that would enumerate more than this many terms.
pub const MAX_ENUMERATED_TERMS: u64 = 10_000_000;

// ---------------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------------

/// A permutation of {0, …, p−1} in one-line notation: `images[i] = π(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(p: usize) -> Self {
        Self {
            images: (0..p).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let p = images.len();
        let mut seen = vec![false; p];
        for &x in &images {
            if x >= p || seen[x] {
                return Err(QilabError::InvalidInput(format!(
                    "not a bijection on [{p}]: {images:?}"
                )));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    /// Canonical full cycle γ = (p … 1): i ↦ i−1 (mod p).
    pub fn full_cycle(p: usize) -> Self {
        Self {
            images: (0..p).map(|i| (i + p - 1) % p).collect(),
        }
    }

    /// Canonical full cycle on a subset (ascending `support`), identity
    /// elsewhere: a_j ↦ a_{j−1}, a_0 ↦ a_{m−1}.
    pub fn canonical_cycle_on(p: usize, support: &[usize]) -> Self {
        let mut images: Vec<usize> = (0..p).collect();
        let m = support.len();
        if m > 0 {
            for j in 0..m {
                images[support[j]] = support[(j + m - 1) % m];
            }
        }
        Self { images }
    }

    pub fn transposition(p: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..p).collect();
        images.swap(a, b);
        Self { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0usize; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Self { images }
    }

    /// ♯(π), the number of disjoint cycles (fixed points included).
    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for mut i in 0..self.len() {
            if seen[i] {
                continue;
            }
            count += 1;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
            }
        }
        count
    }

    /// |π| = p − ♯(π), the minimal number of transpositions.
    pub fn translength(&self) -> usize {
        self.len() - self.cycle_count()
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i);
                i = self.images[i];
            }
            out.push(cyc);
        }
        out
    }

    /// All permutations of [p] in lexicographic order of one-line notation.
    pub fn all(p: usize) -> impl Iterator<Item = Permutation> {
        itertools::Itertools::permutations(0..p, p).map(|images| Permutation { images })
    }
}

/// Geodesic defect δ ≥ 0 in |σ⁻¹α| + |α| = |σ| + 2δ.
pub fn geodesic_defect(alpha: &Permutation, sigma: &Permutation) -> Result<u64> {
    if alpha.len() != sigma.len() {
        return Err(QilabError::InvalidInput(
            "geodesic_defect: permutations must act on the same [p]".into(),
        ));
    }
    let lhs = sigma.inverse().compose(alpha).translength() + alpha.translength();
    let rhs = sigma.translength();
    debug_assert!(lhs >= rhs && (lhs - rhs) % 2 == 0);
    Ok(((lhs - rhs) / 2) as u64)
}

// ---------------------------------------------------------------------------
// Pairings
// ---------------------------------------------------------------------------

/// A perfect matching of {0, …, 2p−1}, stored with each pair ascending and
/// pairs ordered by their smaller element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    pairs: Vec<(usize, usize)>,
}

impl Pairing {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn n_points(&self) -> usize {
        2 * self.pairs.len()
    }

    /// All pairings of [2p], generated smallest-unmatched-first (deterministic
    /// order).
    pub fn enumerate(two_p: usize) -> Result<Vec<Pairing>> {
        if two_p % 2 != 0 {
            return Err(QilabError::InvalidInput(
                "pairings need an even ground set".into(),
            ));
        }
        if two_p > MAX_PAIRING_2P {
            return Err(QilabError::BudgetExceeded(format!(
                "pairings of [{two_p}] exceed the 2p ≤ {MAX_PAIRING_2P} cap"
            )));
        }
        let mut out = Vec::new();
        let mut used = vec![false; two_p];
        let mut current = Vec::new();
        fn rec(
            used: &mut Vec<bool>,
            current: &mut Vec<(usize, usize)>,
            out: &mut Vec<Pairing>,
        ) {
            let first = match used.iter().position(|&u| !u) {
                None => {
                    out.push(Pairing {
                        pairs: current.clone(),
                    });
                    return;
                }
                Some(f) => f,
            };
            used[first] = true;
            for mate in first + 1..used.len() {
                if !used[mate] {
                    used[mate] = true;
                    current.push((first, mate));
                    rec(used, current, out);
                    current.pop();
                    used[mate] = false;
                }
            }
            used[first] = false;
        }
        rec(&mut used, &mut current, &mut out);
        Ok(out)
    }

    /// The pairing as a fixed-point-free involution.
    pub fn as_permutation(&self) -> Permutation {
        let mut images: Vec<usize> = (0..self.n_points()).collect();
        for &(a, b) in &self.pairs {
            images[a] = b;
            images[b] = a;
        }
        Permutation { images }
    }

    /// Two chords (a,b), (c,d) cross iff a < c < b < d.
    pub fn is_noncrossing(&self) -> bool {
        for (idx, &(a, b)) in self.pairs.iter().enumerate() {
            for &(c, d) in &self.pairs[idx + 1..] {
                let crosses = (a < c && c < b && b < d) || (c < a && a < d && d < b);
                if crosses {
                    return false;
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Set partitions (for the non-crossing enumerations)
// ---------------------------------------------------------------------------

/// All set partitions of [p] as lists of blocks (each block ascending, blocks
/// ordered by minimum), generated via restricted-growth strings.
pub fn enumerate_partitions(p: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    if p > MAX_PERMUTATION_P {
        return Err(QilabError::BudgetExceeded(format!(
            "partitions of [{p}] exceed the p ≤ {MAX_PERMUTATION_P} cap"
        )));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; p];
    fn rec(i: usize, max_used: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == rgs.len() {
            let n_blocks = max_used + 1;
            let mut blocks = vec![Vec::new(); n_blocks];
            for (j, &b) in rgs.iter().enumerate() {
                blocks[b].push(j);
            }
            out.push(blocks);
            return;
        }
        for b in 0..=max_used + 1 {
            rgs[i] = b;
            rec(i + 1, max_used.max(b), rgs, out);
        }
    }
    if p > 0 {
        rgs[0] = 0;
        rec(1, 0, &mut rgs, &mut out);
    }
    Ok(out)
}

/// A partition is non-crossing iff there is no a < b < c < d with {a,c} in
/// one block and {b,d} in another.
pub fn partition_is_noncrossing(blocks: &[Vec<usize>]) -> bool {
    let mut block_of = BTreeMap::new();
    for (bi, block) in blocks.iter().enumerate() {
        for &x in block {
            block_of.insert(x, bi);
        }
    }
    let items: Vec<(usize, usize)> = block_of.into_iter().collect();
    let n = items.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let (ba, bb, bc, bd) =
                        (items[i].1, items[j].1, items[k].1, items[l].1);
                    if ba == bc && bb == bd && ba != bb {
                        return false;
                    }
                }
            }
        }
    }
    true
}

pub fn enumerate_noncrossing_partitions(p: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    Ok(enumerate_partitions(p)?
        .into_iter()
        .filter(|b| partition_is_noncrossing(b))
        .collect())
}

pub fn enumerate_noncrossing_pairings(two_p: usize) -> Result<Vec<Pairing>> {
    Ok(Pairing::enumerate(two_p)?
        .into_iter()
        .filter(Pairing::is_noncrossing)
        .collect())
}

// ---------------------------------------------------------------------------
// Small exact sequences
// ---------------------------------------------------------------------------

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k.min(n - k) {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Cat_p = C(2p, p)/(p+1).
pub fn catalan(p: u64) -> BigInt {
    binomial(2 * p, p) / BigInt::from(p + 1)
}

/// Nar(p, m) = (1/p) C(p, m) C(p, m−1), for 1 ≤ m ≤ p.
pub fn narayana(p: u64, m: u64) -> BigInt {
    if m == 0 || m > p {
        return BigInt::zero();
    }
    binomial(p, m) * binomial(p, m - 1) / BigInt::from(p)
}

/// Moments of the centered semicircular distribution SC(σ²):
/// odd orders vanish, order 2p equals σ^{2p} Cat_p.
pub fn sc_moment(order: u64, sigma2: &BigRational) -> BigRational {
    if order % 2 == 1 {
        return BigRational::zero();
    }
    let p = order / 2;
    BigRational::from(catalan(p)) * sigma2.pow(p as i32)
}

/// Coefficients of the Marčenko–Pastur moment polynomial:
/// M_MP^{(p)}(λ) = Σ_{m=1}^p Nar(p, m) λ^m; entry m−1 holds Nar(p, m).
pub fn mp_moment_coeffs(p: u64) -> Vec<BigInt> {
    (1..=p).map(|m| narayana(p, m)).collect()
}

pub fn mp_moment(p: u64, lambda: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, c) in mp_moment_coeffs(p).into_iter().enumerate() {
        acc += BigRational::from(c) * lambda.pow((i + 1) as i32);
    }
    acc
}

// ---------------------------------------------------------------------------
// Level functions
// ---------------------------------------------------------------------------

/// f : [p] → [k], stored 0-based (`values[i] ∈ 0..k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelFunction {
    values: Vec<usize>,
    k: usize,
}

impl LevelFunction {
    pub fn new(values: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 || values.iter().any(|&v| v >= k) {
            return Err(QilabError::InvalidInput(format!(
                "level function values must lie in 0..{k}"
            )));
        }
        Ok(Self { values, k })
    }

    pub fn p(&self) -> usize {
        self.values.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn value(&self, i: usize) -> usize {
        self.values[i]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn image_size(&self) -> usize {
        let mut seen = vec![false; self.k];
        for &v in &self.values {
            seen[v] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }

    /// γ_f = γ_{f=1} ⋯ γ_{f=k}: the product of canonical full cycles on the
    /// level sets of f (disjoint supports, so the order is immaterial).
    pub fn gamma_f(&self) -> Permutation {
        let p = self.p();
        let mut result = Permutation::identity(p);
        for r in 0..self.k {
            let support: Vec<usize> =
                (0..p).filter(|&i| self.values[i] == r).collect();
            result = Permutation::canonical_cycle_on(p, &support).compose(&result);
        }
        result
    }

    /// All k^p level functions, lexicographic.
    pub fn all(p: usize, k: usize) -> impl Iterator<Item = LevelFunction> {
        itertools::Itertools::multi_cartesian_product(
            std::iter::repeat_with(move || 0..k).take(p),
        )
        .map(move |values| LevelFunction { values, k })
    }

    /// Representatives of the orbits under relabeling of [k] (restricted-
    /// growth canonical form) together with orbit sizes k(k−1)⋯(k−m+1).
    pub fn orbit_representatives(p: usize, k: usize) -> Vec<(LevelFunction, BigInt)> {
        let mut out = Vec::new();
        let mut values = vec![0usize; p];
        fn rec(
            i: usize,
            max_used: usize,
            p: usize,
            k: usize,
            values: &mut Vec<usize>,
            out: &mut Vec<(LevelFunction, BigInt)>,
        ) {
            if i == p {
                let m = max_used + 1;
                let mut orbit = BigInt::one();
                for j in 0..m {
                    orbit *= BigInt::from((k - j) as u64);
                }
                out.push((
                    LevelFunction {
                        values: values.clone(),
                        k,
                    },
                    orbit,
                ));
                return;
            }
            for b in 0..=(max_used + 1).min(k - 1) {
                values[i] = b;
                rec(i + 1, max_used.max(b), p, k, values, out);
            }
        }
        if p == 0 {
            return vec![(LevelFunction { values: vec![], k }, BigInt::one())];
        }
        values[0] = 0;
        rec(1, 0, p, k, &mut values, &mut out);
        out
    }
}

/// ♯(γ̂⁻¹ α̂_f) on [p]×[k], computed directly AND via the identity
/// ♯(γ̂⁻¹ α̂_f) = ♯(γ_f⁻¹ α) + k − |im f|; panics if the two disagree,
/// which would signal an implementation bug.
pub fn lifted_cycle_count(alpha: &Permutation, f: &LevelFunction) -> Result<usize> {
    let p = alpha.len();
    if f.p() != p {
        return Err(QilabError::InvalidInput(
            "lifted_cycle_count: α and f must share the same [p]".into(),
        ));
    }
    let k = f.k();
    // Direct computation of σ = γ̂⁻¹ ∘ α̂_f as a permutation of [p]×[k],
    // node (i, r) encoded as i*k + r.
    let gamma = Permutation::full_cycle(p);
    let gamma_inv = gamma.inverse();
    let mut images = vec![0usize; p * k];
    for i in 0..p {
        for r in 0..k {
            let (ai, ar) = if r == f.value(i) {
                (alpha.image(i), f.value(alpha.image(i)))
            } else {
                (i, r)
            };
            images[i * k + r] = gamma_inv.image(ai) * k + ar;
        }
    }
    let direct = Permutation::from_images(images)?.cycle_count();
    let via_identity =
        f.gamma_f().inverse().compose(alpha).cycle_count() + k - f.image_size();
    assert_eq!(
        direct, via_identity,
        "lifted cycle identity violated: direct {direct} vs identity {via_identity}"
    );
    Ok(direct)
}

// ---------------------------------------------------------------------------
// Moment polynomials
// ---------------------------------------------------------------------------

/// Σ coeff · d^{dexp} s^{sexp}, with exact big-integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MomentPolynomial {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl MomentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, d_exp: u32, s_exp: u32, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry((d_exp, s_exp)).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&(d_exp, s_exp));
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (&key, coeff) in &other.terms {
            self.add_term(key.0, key.1, coeff.clone());
        }
    }

    pub fn scaled(&self, factor: &BigInt) -> Self {
        let mut out = Self::zero();
        for (&(de, se), coeff) in &self.terms {
            out.add_term(de, se, coeff * factor);
        }
        out
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), BigInt> {
        &self.terms
    }

    pub fn eval(&self, d: &BigInt, s: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for (&(de, se), coeff) in &self.terms {
            acc += coeff * d.pow(de) * s.pow(se);
        }
        acc
    }

    /// Coefficient of d^{d_exp}, summed over all s-exponents with s
    /// substituted by 1 (useful for the pure-GUE families where s is absent).
    pub fn coeff_of_d(&self, d_exp: u32) -> BigInt {
        self.terms
            .iter()
            .filter(|(&(de, _), _)| de == d_exp)
            .map(|(_, c)| c.clone())
            .sum()
    }

    pub fn max_d_exp(&self) -> Option<u32> {
        self.terms.keys().map(|&(de, _)| de).max()
    }
}

// ---------------------------------------------------------------------------
// Word and sum moments for the modified ensembles
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModifiedFamily {
    /// Σ_j G̃(j) with G ~ GUE(d²) embedded at each B slot.
    Gue,
    /// Σ_j W̃(j) with W ~ Wishart(d², s).
    Wishart,
    /// Σ_j G̃(j)^Γ, partial transpose over the last ⌈k/2⌉ B factors.
    GuePt,
}

fn check_budget(terms: u64) -> Result<()> {
    if terms > MAX_ENUMERATED_TERMS {
        return Err(QilabError::BudgetExceeded(format!(
            "moment enumeration would visit {terms} terms (cap {MAX_ENUMERATED_TERMS})"
        )));
    }
    Ok(())
}

fn double_factorial_odd(two_p: u64) -> u64 {
    // (2p − 1)!! = number of pairings of [2p]; saturates so oversized inputs
    // fail the budget check instead of overflowing
    let mut acc = 1u64;
    let mut i = 1;
    while i < two_p {
        acc = acc.saturating_mul(i);
        i += 2;
    }
    acc
}

fn factorial(p: u64) -> u64 {
    (1..=p).fold(1u64, u64::saturating_mul)
}

/// Number of free b-parameters for the partially transposed word: connected
/// components of the Wick constraint graph on [2p]×[k].
///
/// A factor at slot i carries B-register indices (b_i^r)_r on its row side and
/// (b_{γ⁻¹(i)}^r)_r on its column side, except that the transposed register
/// f(i) (when f(i) lies on the high side) has its row/column roles swapped.
/// The identity registers r ≠ f(i) chain neighbouring slots together, and the
/// Wick pairing λ identifies row indices of i with column indices of λ(i).
/// When both paired factors sit on the same side this yields the "cross"
/// identifications b_i ~ b_{γ⁻¹(j)}, b_j ~ b_{γ⁻¹(i)}; when exactly one of the
/// two is transposed, the swap turns them into the "parallel" identifications
/// b_i ~ b_j, b_{γ⁻¹(i)} ~ b_{γ⁻¹(j)}.
fn pt_free_parameters(lambda: &Permutation, f: &LevelFunction) -> usize {
    let two_p = lambda.len();
    let k = f.k();
    let half = k / 2; // 0-based: levels < half are untransposed
    let mut uf = UnionFind::new(two_p * k);
    let node = |i: usize, r: usize| i * k + r;
    let gamma_inv = |i: usize| (i + 1) % two_p; // γ(i) = i−1, so γ⁻¹(i) = i+1
    for i in 0..two_p {
        let fi = f.value(i);
        for r in 0..k {
            if r != fi {
                uf.union(node(gamma_inv(i), r), node(i, r));
            }
        }
        let j = lambda.image(i);
        if j < i {
            continue; // each pair handled once
        }
        let fj = f.value(j);
        let same_side = (fi < half) == (fj < half);
        if same_side {
            uf.union(node(i, fi), node(gamma_inv(j), fj));
            uf.union(node(j, fj), node(gamma_inv(i), fi));
        } else {
            uf.union(node(i, fi), node(j, fj));
            uf.union(node(gamma_inv(i), fi), node(gamma_inv(j), fj));
        }
    }
    uf.component_count()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn component_count(&mut self) -> usize {
        let n = self.parent.len();
        (0..n).filter(|&x| self.find(x) == x).count()
    }
}

/// Exact moment of one word: E Tr[∏_i X̃(f(i))] as a polynomial in d (and s
/// for the Wishart family). GUE families return the zero polynomial for
/// odd-length words.
pub fn word_moment_exact(family: ModifiedFamily, word: &LevelFunction) -> Result<MomentPolynomial> {
    let p = word.p();
    let mut poly = MomentPolynomial::zero();
    match family {
        ModifiedFamily::Gue | ModifiedFamily::GuePt => {
            if p % 2 == 1 {
                return Ok(poly);
            }
            if p > MAX_PAIRING_2P {
                return Err(QilabError::BudgetExceeded(format!(
                    "GUE word length {p} exceeds the 2p ≤ {MAX_PAIRING_2P} cap"
                )));
            }
            check_budget(double_factorial_odd(p as u64))?;
            let gamma = Permutation::full_cycle(p);
            let gamma_inv = gamma.inverse();
            for pairing in Pairing::enumerate(p)? {
                let lambda = pairing.as_permutation();
                let a_exp = gamma_inv.compose(&lambda).cycle_count() as u32;
                let b_exp = match family {
                    ModifiedFamily::Gue => lifted_cycle_count(&lambda, word)? as u32,
                    ModifiedFamily::GuePt => pt_free_parameters(&lambda, word) as u32,
                    ModifiedFamily::Wishart => unreachable!(),
                };
                poly.add_term(a_exp + b_exp, 0, BigInt::one());
            }
        }
        ModifiedFamily::Wishart => {
            if p > MAX_PERMUTATION_P {
                return Err(QilabError::BudgetExceeded(format!(
                    "Wishart word length {p} exceeds the p ≤ {MAX_PERMUTATION_P} cap"
                )));
            }
            check_budget(factorial(p as u64))?;
            let gamma = Permutation::full_cycle(p);
            let gamma_inv = gamma.inverse();
            for alpha in Permutation::all(p) {
                let a_exp = gamma_inv.compose(&alpha).cycle_count() as u32;
                let b_exp = lifted_cycle_count(&alpha, word)? as u32;
                let s_exp = alpha.cycle_count() as u32;
                poly.add_term(a_exp + b_exp, s_exp, BigInt::one());
            }
        }
    }
    Ok(poly)
}

/// Exact E Tr[(Σ_{j=1}^k X̃(j))^p] as a polynomial, summing word moments over
/// all level functions f: [p] → [k]. Words are enumerated up to relabeling of
/// [k] and weighted by orbit size.
pub fn sum_moment_poly(family: ModifiedFamily, p: usize, k: usize) -> Result<MomentPolynomial> {
    if k == 0 {
        return Err(QilabError::InvalidInput("need k ≥ 1".into()));
    }
    let inner = match family {
        ModifiedFamily::Wishart => factorial(p as u64),
        _ => double_factorial_odd(p as u64),
    };
    let words = (k as u64)
        .checked_pow(p.min(32) as u32)
        .unwrap_or(u64::MAX / 2);
    check_budget(words.saturating_mul(inner))?;
    let mut poly = MomentPolynomial::zero();
    for (word, orbit) in LevelFunction::orbit_representatives(p, k) {
        let term = word_moment_exact(family, &word)?;
        poly.add_assign(&term.scaled(&orbit));
    }
    Ok(poly)
}

/// Exact big-integer value of E Tr[(Σ_{j=1}^k X̃(j))^p] at concrete (d, s).
pub fn sum_moment_exact(
    family: ModifiedFamily,
    p: usize,
    k: usize,
    d: u64,
    s: u64,
) -> Result<BigInt> {
    Ok(sum_moment_poly(family, p, k)?.eval(&BigInt::from(d), &BigInt::from(s)))
}

/// Plain GUE genus expansion: E Tr G^{2p} = Σ_{λ∈P²(2p)} n^{♯(γ⁻¹λ)}
/// (odd moments vanish).
pub fn gue_moment_exact(order: usize, n: u64) -> Result<BigInt> {
    if order % 2 == 1 {
        return Ok(BigInt::zero());
    }
    let gamma_inv = Permutation::full_cycle(order).inverse();
    let n = BigInt::from(n);
    let mut acc = BigInt::zero();
    for pairing in Pairing::enumerate(order)? {
        let c = gamma_inv.compose(&pairing.as_permutation()).cycle_count();
        acc += n.pow(c as u32);
    }
    Ok(acc)
}

/// Plain Wishart genus expansion: E Tr W^p = Σ_{α∈S(p)} n^{♯(γ⁻¹α)} s^{♯α}.
pub fn wishart_moment_exact(p: usize, n: u64, s: u64) -> Result<BigInt> {
    if p > MAX_PERMUTATION_P {
        return Err(QilabError::BudgetExceeded(format!(
            "Wishart moment order {p} exceeds the p ≤ {MAX_PERMUTATION_P} cap"
        )));
    }
    let gamma_inv = Permutation::full_cycle(p).inverse();
    let (n, s) = (BigInt::from(n), BigInt::from(s));
    let mut acc = BigInt::zero();
    for alpha in Permutation::all(p) {
        let a = gamma_inv.compose(&alpha).cycle_count();
        acc += n.pow(a as u32) * s.pow(alpha.cycle_count() as u32);
    }
    Ok(acc)
}

/// Census of pairings of [2p] by geodesic defect from γ; entry δ holds the
/// number of pairings at defect δ.
pub fn pairing_defect_census(two_p: usize) -> Result<Vec<u64>> {
    let gamma = Permutation::full_cycle(two_p);
    let mut census = Vec::new();
    for pairing in Pairing::enumerate(two_p)? {
        let delta = geodesic_defect(&pairing.as_permutation(), &gamma)? as usize;
        if census.len() <= delta {
            census.resize(delta + 1, 0);
        }
        census[delta] += 1;
    }
    Ok(census)
}
