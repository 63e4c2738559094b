//! Multi-player non-local games: exact rational LP values for the
//! no-signalling (NS) and sub-no-signalling (SNOS) classes, classical values
//! by strategy enumeration, parallel repetition and threshold builders, and
//! the two-player SNOS→NS bump-up.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{QilabError, Result};

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn encode(digits: &[usize], radices: &[usize]) -> usize {
    digits
        .iter()
        .zip(radices)
        .fold(0, |acc, (&d, &r)| acc * r + d)
}

fn decode(mut idx: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for i in (0..radices.len()).rev() {
        out[i] = idx % radices[i];
        idx /= radices[i];
    }
    out
}

const GAME_SIZE_BUDGET: usize = 20_000;
const CLASSICAL_BUDGET: u64 = 10_000_000;

/// An ℓ-player game: a rational input distribution T on X̲ and a binary
/// predicate V on A̲ × X̲.
#[derive(Clone, Debug, PartialEq)]
pub struct Game {
    pub players: usize,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    /// T indexed by the mixed-radix input word
    pub t: Vec<BigRational>,
    /// V indexed by a · NX + x
    pub v: Vec<bool>,
}

impl Game {
    pub fn new(
        inputs: Vec<usize>,
        outputs: Vec<usize>,
        t: Vec<BigRational>,
        v: Vec<bool>,
    ) -> Result<Self> {
        let players = inputs.len();
        if players == 0 || players != outputs.len() {
            return Err(QilabError::InvalidInput(
                "inputs and outputs must list the same positive number of players".into(),
            ));
        }
        let nx: usize = inputs.iter().product();
        let na: usize = outputs.iter().product();
        if na * nx > GAME_SIZE_BUDGET {
            return Err(QilabError::BudgetExceeded(format!(
                "|A×X| = {} exceeds {GAME_SIZE_BUDGET}",
                na * nx
            )));
        }
        if t.len() != nx || v.len() != na * nx {
            return Err(QilabError::InvalidInput("table sizes do not match".into()));
        }
        let total: BigRational = t.iter().cloned().sum();
        if !total.is_one() {
            return Err(QilabError::InvalidInput(format!(
                "T must sum to 1 exactly, got {total}"
            )));
        }
        if t.iter().any(|p| p.is_negative()) {
            return Err(QilabError::InvalidInput("T must be non-negative".into()));
        }
        Ok(Self {
            players,
            inputs,
            outputs,
            t,
            v,
        })
    }

    pub fn nx(&self) -> usize {
        self.inputs.iter().product()
    }

    pub fn na(&self) -> usize {
        self.outputs.iter().product()
    }

    /// CHSH: binary everything, T uniform, win iff a⊕b = x∧y.
    pub fn chsh() -> Self {
        let inputs = vec![2, 2];
        let outputs = vec![2, 2];
        let t = vec![rat(1, 4); 4];
        let mut v = vec![false; 16];
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let xi = encode(&[x, y], &inputs);
                        let ai = encode(&[a, b], &outputs);
                        v[ai * 4 + xi] = (a ^ b) == (x & y);
                    }
                }
            }
        }
        Self::new(inputs, outputs, t, v).expect("CHSH is well formed")
    }

    /// Three-player anti-correlation game: T uniform on {011, 101, 110};
    /// whenever two inputs are 1 the matching outputs must differ.
    pub fn anti3() -> Self {
        let inputs = vec![2, 2, 2];
        let outputs = vec![2, 2, 2];
        let nx = 8;
        let mut t = vec![BigRational::zero(); nx];
        for x in [3usize, 5, 6] {
            // binary words 011, 101, 110
            t[x] = rat(1, 3);
        }
        let mut v = vec![false; 64];
        for x in 0..nx {
            let xs = decode(x, &inputs);
            for a in 0..8 {
                let avec = decode(a, &outputs);
                let mut ok = true;
                for i in 0..3 {
                    for j in (i + 1)..3 {
                        if xs[i] == 1 && xs[j] == 1 && avec[i] == avec[j] {
                            ok = false;
                        }
                    }
                }
                v[a * nx + x] = ok;
            }
        }
        Self::new(inputs, outputs, t, v).expect("A3 is well formed")
    }

    /// n-fold parallel repetition: product inputs, product predicate.
    pub fn repeat(&self, n: usize) -> Result<Game> {
        self.threshold(n, n)
    }

    /// Win iff at least t of the n parallel instances are won.
    pub fn threshold(&self, t_wins: usize, n: usize) -> Result<Game> {
        if n == 0 || t_wins > n {
            return Err(QilabError::ParamOutOfRange(format!(
                "need 1 ≤ t ≤ n, got t = {t_wins}, n = {n}"
            )));
        }
        let inputs: Vec<usize> = self.inputs.iter().map(|&s| s.pow(n as u32)).collect();
        let outputs: Vec<usize> = self.outputs.iter().map(|&s| s.pow(n as u32)).collect();
        let nx: usize = inputs.iter().product();
        let na: usize = outputs.iter().product();
        if na.checked_mul(nx).is_none_or(|s| s > GAME_SIZE_BUDGET) {
            return Err(QilabError::BudgetExceeded(format!(
                "repeated game needs |A×X| = {} ≤ {GAME_SIZE_BUDGET}",
                na as u128 * nx as u128
            )));
        }
        // a repeated input word is, per player, an n-digit base-|X_i| number;
        // instance k of the repeated game reads digit k of every player
        let instance_x = |x: usize, k: usize| -> usize {
            let per_player = decode(x, &inputs);
            let digits: Vec<usize> = per_player
                .iter()
                .zip(&self.inputs)
                .map(|(&w, &r)| decode(w, &vec![r; n])[k])
                .collect();
            encode(&digits, &self.inputs)
        };
        let instance_a = |a: usize, k: usize| -> usize {
            let per_player = decode(a, &outputs);
            let digits: Vec<usize> = per_player
                .iter()
                .zip(&self.outputs)
                .map(|(&w, &r)| decode(w, &vec![r; n])[k])
                .collect();
            encode(&digits, &self.outputs)
        };
        let mut t = vec![BigRational::zero(); nx];
        for (x, slot) in t.iter_mut().enumerate() {
            let mut p = BigRational::one();
            for k in 0..n {
                p *= self.t[instance_x(x, k)].clone();
            }
            *slot = p;
        }
        let mut v = vec![false; na * nx];
        for x in 0..nx {
            for a in 0..na {
                let wins = (0..n)
                    .filter(|&k| self.v[instance_a(a, k) * self.nx() + instance_x(x, k)])
                    .count();
                v[a * nx + x] = wins >= t_wins;
            }
        }
        Game::new(inputs, outputs, t, v)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let t_entries: Vec<serde_json::Value> = (0..self.nx())
            .filter(|&x| !self.t[x].is_zero())
            .map(|x| {
                json!({
                    "x": decode(x, &self.inputs),
                    "p": self.t[x].to_string(),
                })
            })
            .collect();
        let v_entries: Vec<serde_json::Value> = (0..self.na() * self.nx())
            .filter(|&i| self.v[i])
            .map(|i| {
                let (a, x) = (i / self.nx(), i % self.nx());
                json!({
                    "x": decode(x, &self.inputs),
                    "a": decode(a, &self.outputs),
                    "v": 1,
                })
            })
            .collect();
        json!({
            "players": self.players,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "T": t_entries,
            "V": v_entries,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Game> {
        let parse = || -> Option<Game> {
            let players = v.get("players")?.as_u64()? as usize;
            let inputs: Vec<usize> = serde_json::from_value(v.get("inputs")?.clone()).ok()?;
            let outputs: Vec<usize> = serde_json::from_value(v.get("outputs")?.clone()).ok()?;
            if inputs.len() != players || outputs.len() != players {
                return None;
            }
            let nx: usize = inputs.iter().product();
            let na: usize = outputs.iter().product();
            let mut t = vec![BigRational::zero(); nx];
            for entry in v.get("T")?.as_array()? {
                let x: Vec<usize> = serde_json::from_value(entry.get("x")?.clone()).ok()?;
                let p = parse_rational(entry.get("p")?.as_str()?)?;
                t[encode(&x, &inputs)] = p;
            }
            let mut table = vec![false; na * nx];
            for entry in v.get("V")?.as_array()? {
                let x: Vec<usize> = serde_json::from_value(entry.get("x")?.clone()).ok()?;
                let a: Vec<usize> = serde_json::from_value(entry.get("a")?.clone()).ok()?;
                let val = entry.get("v")?.as_u64()?;
                if val > 1 {
                    return None;
                }
                table[encode(&a, &outputs) * nx + encode(&x, &inputs)] = val == 1;
            }
            Game::new(inputs, outputs, t, table).ok()
        };
        parse().ok_or_else(|| QilabError::Parse("malformed game description".into()))
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let mut parts = s.splitn(2, '/');
    let num: BigInt = parts.next()?.trim().parse().ok()?;
    let den: BigInt = match parts.next() {
        Some(d) => d.trim().parse().ok()?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrelationClass {
    Classical,
    Ns,
    Snos,
}

/// A conditional density table P(a̲|x̲), indexed a · NX + x.
#[derive(Clone, Debug)]
pub struct Correlation {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub p: Vec<BigRational>,
}

impl Correlation {
    pub fn nx(&self) -> usize {
        self.inputs.iter().product()
    }
    pub fn na(&self) -> usize {
        self.outputs.iter().product()
    }
}

/// LP outcome: exact rational simplex below the size threshold, floating
/// revised simplex above it.
#[derive(Clone, Debug)]
pub enum GameValue {
    Exact {
        value: BigRational,
        correlation: Correlation,
    },
    Approx {
        value: f64,
    },
}

impl GameValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            GameValue::Exact { value, .. } => value.to_f64().unwrap_or(f64::NAN),
            GameValue::Approx { value } => *value,
        }
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        match self {
            GameValue::Exact { value, .. } => Some(value),
            GameValue::Approx { .. } => None,
        }
    }
}

// ---------------------------------------------------------------------------
// LP construction

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LpOp {
    Eq,
    Le,
}

struct LpConstraint {
    terms: Vec<(usize, BigRational)>,
    op: LpOp,
    rhs: BigRational,
}

struct LpProblem {
    n_vars: usize,
    objective: Vec<BigRational>,
    constraints: Vec<LpConstraint>,
}

/// proper subsets of [ℓ] (excluding [ℓ] itself), optionally only the ℓ
/// complements of singletons plus the empty set
fn constraint_subsets(players: usize, reduced: bool) -> Vec<Vec<usize>> {
    if reduced {
        let mut out = vec![vec![]];
        for i in 0..players {
            out.push((0..players).filter(|&j| j != i).collect());
        }
        return out;
    }
    (0..(1usize << players) - 1)
        .map(|mask| (0..players).filter(|&i| mask & (1 << i) != 0).collect())
        .collect()
}

fn build_game_lp(g: &Game, cls: CorrelationClass, reduced_ns: bool) -> LpProblem {
    let nx = g.nx();
    let na = g.na();
    let n_p = na * nx;
    let p_var = |a: usize, x: usize| a * nx + x;

    let mut objective = vec![BigRational::zero(); n_p];
    for x in 0..nx {
        if g.t[x].is_zero() {
            continue;
        }
        for a in 0..na {
            if g.v[a * nx + x] {
                objective[p_var(a, x)] = g.t[x].clone();
            }
        }
    }

    let mut constraints = Vec::new();
    let subsets = constraint_subsets(g.players, reduced_ns && cls == CorrelationClass::Ns);

    // marginal of P(·|x) on a_I as LP terms
    let marginal_terms = |a_i: &[usize], set: &[usize], x: usize| -> Vec<(usize, BigRational)> {
        let comp: Vec<usize> = (0..g.players).filter(|i| !set.contains(i)).collect();
        let comp_sizes: Vec<usize> = comp.iter().map(|&i| g.outputs[i]).collect();
        let n_comp: usize = comp_sizes.iter().product();
        let mut terms = Vec::with_capacity(n_comp);
        for rest in 0..n_comp {
            let rest_digits = decode(rest, &comp_sizes);
            let mut full = vec![0usize; g.players];
            for (pos, &i) in set.iter().enumerate() {
                full[i] = a_i[pos];
            }
            for (pos, &i) in comp.iter().enumerate() {
                full[i] = rest_digits[pos];
            }
            terms.push((p_var(encode(&full, &g.outputs), x), BigRational::one()));
        }
        terms
    };

    let mut n_vars = n_p;
    for set in &subsets {
        let set_in_sizes: Vec<usize> = set.iter().map(|&i| g.inputs[i]).collect();
        let set_out_sizes: Vec<usize> = set.iter().map(|&i| g.outputs[i]).collect();
        let n_xi: usize = set_in_sizes.iter().product();
        let n_ai: usize = set_out_sizes.iter().product();
        // group the x's by their restriction to the subset
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n_xi];
        for x in 0..nx {
            let digits = decode(x, &g.inputs);
            let restricted: Vec<usize> = set.iter().map(|&i| digits[i]).collect();
            groups[encode(&restricted, &set_in_sizes)].push(x);
        }

        match cls {
            CorrelationClass::Ns => {
                if set.is_empty() {
                    // normalization per input word
                    for x in 0..nx {
                        constraints.push(LpConstraint {
                            terms: marginal_terms(&[], &[], x),
                            op: LpOp::Eq,
                            rhs: BigRational::one(),
                        });
                    }
                    continue;
                }
                for group in &groups {
                    let x_ref = group[0];
                    for ai in 0..n_ai {
                        let a_digits = decode(ai, &set_out_sizes);
                        let ref_terms = marginal_terms(&a_digits, set, x_ref);
                        for &x in &group[1..] {
                            let mut terms = marginal_terms(&a_digits, set, x);
                            for (var, coef) in &ref_terms {
                                terms.push((*var, -coef.clone()));
                            }
                            constraints.push(LpConstraint {
                                terms,
                                op: LpOp::Eq,
                                rhs: BigRational::zero(),
                            });
                        }
                    }
                }
            }
            CorrelationClass::Snos => {
                if set.is_empty() {
                    for x in 0..nx {
                        constraints.push(LpConstraint {
                            terms: marginal_terms(&[], &[], x),
                            op: LpOp::Le,
                            rhs: BigRational::one(),
                        });
                    }
                    continue;
                }
                // auxiliary normalized distributions Q_I(a_I|x_I)
                let q_base = n_vars;
                n_vars += n_ai * n_xi;
                let q_var = |ai: usize, xi: usize| q_base + ai * n_xi + xi;
                for xi in 0..n_xi {
                    constraints.push(LpConstraint {
                        terms: (0..n_ai).map(|ai| (q_var(ai, xi), BigRational::one())).collect(),
                        op: LpOp::Eq,
                        rhs: BigRational::one(),
                    });
                }
                for (xi, group) in groups.iter().enumerate() {
                    for ai in 0..n_ai {
                        let a_digits = decode(ai, &set_out_sizes);
                        for &x in group {
                            let mut terms = marginal_terms(&a_digits, set, x);
                            terms.push((q_var(ai, xi), -BigRational::one()));
                            constraints.push(LpConstraint {
                                terms,
                                op: LpOp::Le,
                                rhs: BigRational::zero(),
                            });
                        }
                    }
                }
            }
            CorrelationClass::Classical => unreachable!("classical is enumerated, not an LP"),
        }
    }

    let mut full_objective = vec![BigRational::zero(); n_vars];
    full_objective[..n_p].clone_from_slice(&objective);
    LpProblem {
        n_vars,
        objective: full_objective,
        constraints,
    }
}

// ---------------------------------------------------------------------------
// exact dense two-phase simplex with Bland's rule

fn solve_exact(lp: &LpProblem) -> Result<(BigRational, Vec<BigRational>)> {
    let m = lp.constraints.len();
    let n = lp.n_vars;
    let n_slack = lp.constraints.iter().filter(|c| c.op == LpOp::Le).count();
    let total = n + n_slack + m; // one artificial per row keeps the logic simple
    let mut tab = vec![vec![BigRational::zero(); total + 1]; m];
    let mut basis = vec![0usize; m];

    let mut slack_idx = n;
    for (r, cons) in lp.constraints.iter().enumerate() {
        if cons.rhs.is_negative() {
            return Err(QilabError::InvalidInput(
                "LP rows must have non-negative right-hand sides".into(),
            ));
        }
        for (var, coef) in &cons.terms {
            tab[r][*var] += coef.clone();
        }
        if cons.op == LpOp::Le {
            tab[r][slack_idx] = BigRational::one();
            slack_idx += 1;
        }
        let art = n + n_slack + r;
        tab[r][art] = BigRational::one();
        basis[r] = art;
        tab[r][total] = cons.rhs.clone();
    }

    let run = |tab: &mut Vec<Vec<BigRational>>,
               basis: &mut Vec<usize>,
               cost: &[BigRational],
               allowed: usize|
     -> Result<()> {
        let mut guard = 0usize;
        loop {
            guard += 1;
            if guard > 200_000 {
                return Err(QilabError::BudgetExceeded(
                    "simplex iteration budget exhausted".into(),
                ));
            }
            // reduced costs r_j = c_j − c_B · column_j; Bland: smallest
            // improving index enters
            let mut entering = None;
            'cols: for j in 0..allowed {
                if basis.contains(&j) {
                    continue;
                }
                let mut rj = cost[j].clone();
                for r in 0..tab.len() {
                    let cb = &cost[basis[r]];
                    if !cb.is_zero() && !tab[r][j].is_zero() {
                        rj -= cb * &tab[r][j];
                    }
                }
                if rj.is_positive() {
                    entering = Some(j);
                    break 'cols;
                }
            }
            let Some(j) = entering else { return Ok(()) };
            let total = tab[0].len() - 1;
            let mut leave: Option<usize> = None;
            let mut best: Option<BigRational> = None;
            for r in 0..tab.len() {
                if tab[r][j].is_positive() {
                    let ratio = &tab[r][total] / &tab[r][j];
                    let better = match &best {
                        None => true,
                        Some(b) => ratio < *b || (ratio == *b && basis[r] < basis[leave.unwrap()]),
                    };
                    if better {
                        best = Some(ratio);
                        leave = Some(r);
                    }
                }
            }
            let Some(r) = leave else {
                return Err(QilabError::Infeasible("unbounded LP".into()));
            };
            // pivot on (r, j)
            let piv = tab[r][j].clone();
            for v in tab[r].iter_mut() {
                *v /= piv.clone();
            }
            for rr in 0..tab.len() {
                if rr == r || tab[rr][j].is_zero() {
                    continue;
                }
                let factor = tab[rr][j].clone();
                for cc in 0..=total {
                    let delta = &factor * &tab[r][cc];
                    tab[rr][cc] -= delta;
                }
            }
            basis[r] = j;
        }
    };

    // phase 1: drive the artificials out
    let mut phase1 = vec![BigRational::zero(); total];
    for c in phase1.iter_mut().skip(n + n_slack) {
        *c = -BigRational::one();
    }
    run(&mut tab, &mut basis, &phase1, total)?;
    let infeas: BigRational = (0..m)
        .filter(|&r| basis[r] >= n + n_slack)
        .map(|r| tab[r][total].clone())
        .sum();
    if !infeas.is_zero() {
        return Err(QilabError::Infeasible("LP has no feasible point".into()));
    }

    // phase 2: artificials may not re-enter
    let mut phase2 = vec![BigRational::zero(); total];
    phase2[..n].clone_from_slice(&lp.objective);
    run(&mut tab, &mut basis, &phase2, n + n_slack)?;

    let mut solution = vec![BigRational::zero(); n];
    for r in 0..m {
        if basis[r] < n {
            solution[basis[r]] = tab[r][total].clone();
        }
    }
    let value = lp
        .objective
        .iter()
        .zip(&solution)
        .map(|(c, v)| c * v)
        .sum();
    Ok((value, solution))
}

fn solve_float(lp: &LpProblem) -> Result<f64> {
    use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<minilp::Variable> = (0..lp.n_vars)
        .map(|i| {
            problem.add_var(
                lp.objective[i].to_f64().unwrap_or(0.0),
                (0.0, f64::INFINITY),
            )
        })
        .collect();
    for cons in &lp.constraints {
        let mut expr = LinearExpr::empty();
        for (var, coef) in &cons.terms {
            expr.add(vars[*var], coef.to_f64().unwrap_or(0.0));
        }
        let op = match cons.op {
            LpOp::Eq => ComparisonOp::Eq,
            LpOp::Le => ComparisonOp::Le,
        };
        problem.add_constraint(expr, op, cons.rhs.to_f64().unwrap_or(0.0));
    }
    let solution = problem
        .solve()
        .map_err(|e| QilabError::Infeasible(format!("float LP failed: {e}")))?;
    Ok(solution.objective())
}

const EXACT_LP_VAR_BUDGET: usize = 700;
const EXACT_LP_ROW_BUDGET: usize = 700;

/// Value of the game in the given correlation class (with all NS subset
/// constraints emitted; see [`game_value_with_options`] for the reduced set).
pub fn game_value(g: &Game, cls: CorrelationClass) -> Result<GameValue> {
    game_value_with_options(g, cls, false)
}

pub fn game_value_with_options(
    g: &Game,
    cls: CorrelationClass,
    reduced_ns: bool,
) -> Result<GameValue> {
    if g.t.iter().all(|p| p.is_zero()) {
        return Err(QilabError::InvalidInput("degenerate all-zero T".into()));
    }
    if cls == CorrelationClass::Classical {
        return classical_value(g);
    }
    let lp = build_game_lp(g, cls, reduced_ns);
    if lp.n_vars <= EXACT_LP_VAR_BUDGET && lp.constraints.len() <= EXACT_LP_ROW_BUDGET {
        let (value, solution) = solve_exact(&lp)?;
        let correlation = Correlation {
            inputs: g.inputs.clone(),
            outputs: g.outputs.clone(),
            p: solution[..g.na() * g.nx()].to_vec(),
        };
        Ok(GameValue::Exact { value, correlation })
    } else {
        Ok(GameValue::Approx {
            value: solve_float(&lp)?,
        })
    }
}

/// Max over products of deterministic strategies, by full enumeration.
fn classical_value(g: &Game) -> Result<GameValue> {
    let mut count: u64 = 1;
    for i in 0..g.players {
        let per_player = (g.outputs[i] as u64).checked_pow(g.inputs[i] as u32);
        count = per_player
            .and_then(|p| count.checked_mul(p))
            .unwrap_or(u64::MAX);
    }
    if count > CLASSICAL_BUDGET {
        return Err(QilabError::BudgetExceeded(format!(
            "{count} deterministic strategies exceed {CLASSICAL_BUDGET}"
        )));
    }
    let nx = g.nx();
    let na = g.na();
    // strategy of player i: a function table X_i → A_i, encoded mixed-radix
    let strategy_counts: Vec<usize> = (0..g.players)
        .map(|i| g.outputs[i].pow(g.inputs[i] as u32))
        .collect();
    let mut best = BigRational::zero();
    let mut best_answers: Vec<usize> = vec![0; nx];
    let mut strategy = vec![0usize; g.players];
    loop {
        // per-player function tables
        let tables: Vec<Vec<usize>> = (0..g.players)
            .map(|i| decode(strategy[i], &vec![g.outputs[i]; g.inputs[i]]))
            .collect();
        let mut score = BigRational::zero();
        let mut answers = vec![0usize; nx];
        for x in 0..nx {
            if g.t[x].is_zero() {
                continue;
            }
            let xd = decode(x, &g.inputs);
            let a_digits: Vec<usize> = (0..g.players).map(|i| tables[i][xd[i]]).collect();
            let a = encode(&a_digits, &g.outputs);
            answers[x] = a;
            if g.v[a * nx + x] {
                score += g.t[x].clone();
            }
        }
        if score > best {
            best = score;
            best_answers = answers;
        }
        // next strategy profile
        let mut i = 0;
        loop {
            if i == g.players {
                let mut p = vec![BigRational::zero(); na * nx];
                for x in 0..nx {
                    p[best_answers[x] * nx + x] = BigRational::one();
                }
                return Ok(GameValue::Exact {
                    value: best,
                    correlation: Correlation {
                        inputs: g.inputs.clone(),
                        outputs: g.outputs.clone(),
                        p,
                    },
                });
            }
            strategy[i] += 1;
            if strategy[i] < strategy_counts[i] {
                break;
            }
            strategy[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// two-player SNOS → NS bump-up

fn marginal_a(p: &Correlation, a: usize, x: usize, y: usize) -> BigRational {
    let (nb, nx) = (p.outputs[1], p.nx());
    (0..nb)
        .map(|b| p.p[(a * nb + b) * nx + x * p.inputs[1] + y].clone())
        .sum()
}

fn marginal_b(p: &Correlation, b: usize, x: usize, y: usize) -> BigRational {
    let (nb, nx) = (p.outputs[1], p.nx());
    (0..p.outputs[0])
        .map(|a| p.p[(a * nb + b) * nx + x * p.inputs[1] + y].clone())
        .sum()
}

/// checks the two-player SNOS characterization: for every x,
/// Σ_a max_y P(a|xy) ≤ 1, and symmetrically for every y
fn check_snos_two_player(p: &Correlation) -> Result<()> {
    let (n_x, n_y) = (p.inputs[0], p.inputs[1]);
    if p.p.iter().any(|v| v.is_negative()) {
        return Err(QilabError::InvalidInput("negative correlation entry".into()));
    }
    for x in 0..n_x {
        let total: BigRational = (0..p.outputs[0])
            .map(|a| {
                (0..n_y)
                    .map(|y| marginal_a(p, a, x, y))
                    .max()
                    .unwrap_or_else(BigRational::zero)
            })
            .sum();
        if total > BigRational::one() {
            return Err(QilabError::InvalidInput(format!(
                "input violates SNOS on the first marginal at x = {x}"
            )));
        }
    }
    for y in 0..n_y {
        let total: BigRational = (0..p.outputs[1])
            .map(|b| {
                (0..n_x)
                    .map(|x| marginal_b(p, b, x, y))
                    .max()
                    .unwrap_or_else(BigRational::zero)
            })
            .sum();
        if total > BigRational::one() {
            return Err(QilabError::InvalidInput(format!(
                "input violates SNOS on the second marginal at y = {y}"
            )));
        }
    }
    Ok(())
}

/// Completes a two-player SNOS correlation to a pointwise-dominating NS one
/// by greedy maximal rational increments.
pub fn bump_to_ns(p: &Correlation) -> Result<Correlation> {
    if p.inputs.len() != 2 {
        return Err(QilabError::InvalidInput(
            "bump-up is a two-player construction".into(),
        ));
    }
    check_snos_two_player(p)?;
    let mut out = p.clone();
    let (n_x, n_y) = (out.inputs[0], out.inputs[1]);
    let (n_a, n_b) = (out.outputs[0], out.outputs[1]);
    let nx = out.nx();
    let one = BigRational::one();
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 100_000 {
            return Err(QilabError::BudgetExceeded(
                "bump-up failed to terminate".into(),
            ));
        }
        let mut done = true;
        'outer: for x in 0..n_x {
            for y in 0..n_y {
                let weight: BigRational = (0..n_a * n_b)
                    .map(|ab| out.p[ab * nx + x * n_y + y].clone())
                    .sum();
                if weight >= one {
                    continue;
                }
                done = false;
                // slack available to entry a on the first marginal: lift up
                // to the running max over y', plus whatever headroom remains
                // in Σ_a max_y' P(a|xy')
                let maxes_a: Vec<BigRational> = (0..n_a)
                    .map(|a| (0..n_y).map(|yy| marginal_a(&out, a, x, yy)).max().unwrap())
                    .collect();
                let head_a = &one - maxes_a.iter().cloned().sum::<BigRational>();
                let eps_a: Vec<BigRational> = (0..n_a)
                    .map(|a| &maxes_a[a] - marginal_a(&out, a, x, y) + &head_a)
                    .collect();
                let maxes_b: Vec<BigRational> = (0..n_b)
                    .map(|b| (0..n_x).map(|xx| marginal_b(&out, b, xx, y)).max().unwrap())
                    .collect();
                let head_b = &one - maxes_b.iter().cloned().sum::<BigRational>();
                let eps_b: Vec<BigRational> = (0..n_b)
                    .map(|b| &maxes_b[b] - marginal_b(&out, b, x, y) + &head_b)
                    .collect();
                let a_star = (0..n_a).max_by(|&i, &j| eps_a[i].cmp(&eps_a[j])).unwrap();
                let b_star = (0..n_b).max_by(|&i, &j| eps_b[i].cmp(&eps_b[j])).unwrap();
                let eps = eps_a[a_star]
                    .clone()
                    .min(eps_b[b_star].clone())
                    .min(&one - &weight);
                if !eps.is_positive() {
                    return Err(QilabError::Infeasible(
                        "no admissible increment found; input not SNOS".into(),
                    ));
                }
                out.p[(a_star * n_b + b_star) * nx + x * n_y + y] += eps;
                continue 'outer;
            }
        }
        if done {
            return Ok(out);
        }
    }
}

/// Exact NS membership audit for a correlation (all marginal equalities plus
/// normalization).
pub fn is_ns(p: &Correlation) -> bool {
    let players = p.inputs.len();
    let nx = p.nx();
    let na = p.na();
    for x in 0..nx {
        let total: BigRational = (0..na).map(|a| p.p[a * nx + x].clone()).sum();
        if !total.is_one() {
            return false;
        }
    }
    for set in constraint_subsets(players, false) {
        if set.is_empty() {
            continue;
        }
        let set_in: Vec<usize> = set.iter().map(|&i| p.inputs[i]).collect();
        let set_out: Vec<usize> = set.iter().map(|&i| p.outputs[i]).collect();
        let n_ai: usize = set_out.iter().product();
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); set_in.iter().product()];
        for x in 0..nx {
            let digits = decode(x, &p.inputs);
            let restricted: Vec<usize> = set.iter().map(|&i| digits[i]).collect();
            groups[encode(&restricted, &set_in)].push(x);
        }
        let comp: Vec<usize> = (0..players).filter(|i| !set.contains(i)).collect();
        let comp_sizes: Vec<usize> = comp.iter().map(|&i| p.outputs[i]).collect();
        let n_comp: usize = comp_sizes.iter().product();
        let marginal = |ai: usize, x: usize| -> BigRational {
            let a_digits = decode(ai, &set_out);
            (0..n_comp)
                .map(|rest| {
                    let rest_digits = decode(rest, &comp_sizes);
                    let mut full = vec![0usize; players];
                    for (pos, &i) in set.iter().enumerate() {
                        full[i] = a_digits[pos];
                    }
                    for (pos, &i) in comp.iter().enumerate() {
                        full[i] = rest_digits[pos];
                    }
                    p.p[encode(&full, &p.outputs) * nx + x].clone()
                })
                .sum()
        };
        for group in &groups {
            for ai in 0..n_ai {
                let reference = marginal(ai, group[0]);
                for &x in &group[1..] {
                    if marginal(ai, x) != reference {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// pointwise domination audit used by the bump-up tests
pub fn dominates(big: &Correlation, small: &Correlation) -> bool {
    big.p.len() == small.p.len() && big.p.iter().zip(&small.p).all(|(b, s)| b >= s)
}
