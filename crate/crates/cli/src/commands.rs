//! One function per subcommand; each returns the populated `RunOutput`
//! (with artifacts written and assertions recorded) or a failure.

use std::path::Path;

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qilab::channels::{closeness_report, compress, renormalize_tp, QuantumChannel};
use qilab::combinatorics::{sum_moment_exact, ModifiedFamily};
use qilab::ensembles::{
    empirical_spectrum, sample_gue, sample_traceless_gue, sample_wishart, SeededStream,
    SpectrumFamily,
};
use qilab::error::QilabError;
use qilab::games::{game_value, CorrelationClass, Game, GameValue};
use qilab::limits::{ks_statistic, LimitLaw};
use qilab::linalg::CMat;
use qilab::operators::{ghz, max_entangled, HermitianOperator, TensorLayout};
use qilab::povm::{povm_norm, sparsify_uniform, uniform_norm_mc};
use qilab::separability::{build_q_minmax, ghz_witness, random_biseparable, witness_lift};

use crate::artifacts::{csv, RunOutput};
use crate::svg::histogram_svg;
use crate::Failure;

type CmdResult = Result<RunOutput, Failure>;

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn lift(e: QilabError) -> Failure {
    match e {
        QilabError::BudgetExceeded(m) => Failure::Budget(m),
        QilabError::ParamOutOfRange(m) | QilabError::InvalidInput(m) => Failure::Config(m),
        other => Failure::Assertion(other.to_string()),
    }
}

fn io_fail(e: std::io::Error) -> Failure {
    Failure::Config(format!("cannot write artifacts: {e}"))
}

#[allow(clippy::too_many_arguments)]
pub fn spectrum(
    family: &str,
    d: usize,
    k: usize,
    c: f64,
    reps: usize,
    bins: usize,
    seed: u64,
    out: &Path,
    name: &str,
) -> CmdResult {
    let (fam, law, law_label) = match family {
        "modified-wishart" => (
            SpectrumFamily::ModifiedWishart { d, k, c },
            LimitLaw::MarchenkoPastur {
                lambda: c * k as f64,
            },
            format!("MP({})", c * k as f64),
        ),
        "modified-gue" => (
            SpectrumFamily::ModifiedGue { d, k },
            LimitLaw::Semicircle {
                variance: k as f64,
            },
            format!("SC({k})"),
        ),
        other => return Err(config_err(format!("unknown spectrum family '{other}'"))),
    };
    law.validate().map_err(lift)?;
    let mut run = RunOutput::new(
        out,
        name,
        json!({"command": "spectrum", "family": family, "d": d, "k": k, "c": c,
               "reps": reps, "bins": bins, "seed": seed}),
    );
    let stream = SeededStream::new(seed, 0);
    let (hist, pooled) = empirical_spectrum(&fam, reps, bins, &stream).map_err(lift)?;
    let ks = ks_statistic(&pooled, &|x| law.cdf(x)).map_err(lift)?;

    let rows: Vec<Vec<String>> = (0..hist.counts.len())
        .map(|i| {
            vec![
                format!("{:.12e}", hist.edges[i]),
                format!("{:.12e}", hist.edges[i + 1]),
                hist.counts[i].to_string(),
                format!("{:.12e}", hist.density[i]),
            ]
        })
        .collect();
    run.write("csv", &csv(&["bin_lo", "bin_hi", "count", "density"], &rows))
        .map_err(io_fail)?;
    run.write_json(&json!({
        "family": family, "law": law_label, "pooled_eigenvalues": pooled.len(),
        "ks_statistic": ks,
    }))
    .map_err(io_fail)?;
    let title = format!("{family} d={d} k={k} reps={reps}: K-S vs {law_label} = {ks:.4}");
    run.write("svg", &histogram_svg(&hist, |x| law.density(x), &title))
        .map_err(io_fail)?;
    run.assert(
        "ks_below_0.08",
        ks < 0.08,
        format!("K-S distance {ks:.4} against {law_label}"),
    );
    println!("K-S vs {law_label}: {ks:.4} ({} eigenvalues pooled)", pooled.len());
    Ok(run)
}

fn mc_trace_moment(
    family: ModifiedFamily,
    p: usize,
    k: usize,
    d: usize,
    s: usize,
    reps: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64), QilabError> {
    let layout = TensorLayout::uniform(d, k + 1);
    let mut vals = Vec::with_capacity(reps);
    for _ in 0..reps {
        let base = match family {
            ModifiedFamily::Wishart => sample_wishart(d * d, s, rng),
            _ => sample_gue(d * d, rng),
        };
        let base = base.with_layout(TensorLayout::new(vec![d, d])?)?;
        let mut acc = HermitianOperator::zero(layout.clone());
        for j in 1..=k {
            let mut term = base.embed(&layout, &[0, j])?;
            if family == ModifiedFamily::GuePt {
                term = term.partial_transpose(&[j])?;
            }
            acc = acc.add(&term);
        }
        let m = acc.matrix();
        let mut pow: CMat = m.clone();
        for _ in 1..p {
            pow *= m;
        }
        vals.push(pow.trace().re);
    }
    let mean = vals.iter().sum::<f64>() / reps as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
    Ok((mean, (var / reps as f64).sqrt()))
}

#[allow(clippy::too_many_arguments)]
pub fn moments(
    family: &str,
    p: usize,
    k: usize,
    d: u64,
    s: u64,
    mc_reps: usize,
    seed: u64,
    out: &Path,
    name: &str,
) -> CmdResult {
    let fam = match family {
        "gue" => ModifiedFamily::Gue,
        "wishart" => ModifiedFamily::Wishart,
        "gue-pt" => ModifiedFamily::GuePt,
        other => return Err(config_err(format!("unknown moment family '{other}'"))),
    };
    let mut run = RunOutput::new(
        out,
        name,
        json!({"command": "moments", "family": family, "p": p, "k": k, "d": d, "s": s,
               "mc_reps": mc_reps, "seed": seed}),
    );
    let exact = sum_moment_exact(fam, p, k, d, s).map_err(lift)?;
    println!("E Tr[(Σ_j X̃(j))^{p}] = {exact}");
    let mut payload = json!({
        "family": family, "p": p, "k": k, "d": d, "s": s, "exact": exact.to_string(),
    });
    if mc_reps > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mean, se) =
            mc_trace_moment(fam, p, k, d as usize, s as usize, mc_reps, &mut rng).map_err(lift)?;
        let exact_f = exact.to_f64().unwrap_or(f64::NAN);
        let sigmas = if se > 0.0 { (mean - exact_f).abs() / se } else { 0.0 };
        payload["monte_carlo"] = json!({"mean": mean, "stderr": se, "deviation_sigmas": sigmas});
        run.assert(
            "mc_within_4_stderr",
            sigmas <= 4.0,
            format!("MC mean {mean:.4} vs exact {exact_f:.4} ({sigmas:.2}σ, {mc_reps} reps)"),
        );
        println!("Monte Carlo ({mc_reps} reps): {mean:.4} ± {se:.4} ({sigmas:.2}σ)");
    }
    run.write_json(&payload).map_err(io_fail)?;
    Ok(run)
}

pub fn extendibility(d: usize, k_max: usize, out: &Path, name: &str, seed: u64) -> CmdResult {
    if k_max < 1 {
        return Err(config_err("need k_max ≥ 1"));
    }
    let mut run = RunOutput::new(
        out,
        name,
        json!({"command": "extendibility", "d": d, "k_max": k_max, "seed": seed}),
    );
    let phi = max_entangled(d).map_err(lift)?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for k in 1..=k_max {
        let h = qilab::separability::h_extendible_closed_form(phi.op(), k).map_err(lift)?;
        // shrinkage trend scale (k−1)²/4k from the non-extendibility bound
        let trend = ((k as f64 - 1.0).powi(2)) / (4.0 * k as f64);
        rows.push(vec![
            k.to_string(),
            format!("{:.12e}", h),
            format!("{:.12e}", trend),
        ]);
        values.push(h);
        println!("k = {k}: sup over k-extendible = {h:.6}");
    }
    run.write("csv", &csv(&["k", "sup_k_extendible", "c_eps_scale"], &rows))
        .map_err(io_fail)?;
    run.write_json(&json!({"d": d, "values": values})).map_err(io_fail)?;
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    run.assert(
        "monotone_in_k",
        monotone,
        format!("hierarchy values {values:?}"),
    );
    if d == 2 && k_max >= 2 {
        run.assert(
            "phi_plus_k2_equals_3_4",
            (values[1] - 0.75).abs() <= 1e-3,
            format!("k = 2 value {}", values[1]),
        );
    }
    Ok(run)
}

#[allow(clippy::too_many_arguments)]
pub fn sparsify(
    d: usize,
    n: usize,
    trials: usize,
    mc_samples: usize,
    seed: u64,
    out: &Path,
    name: &str,
) -> CmdResult {
    let mut run = RunOutput::new(
        out,
        name,
        json!({"command": "sparsify", "d": d, "n": n, "trials": trials,
               "mc_samples": mc_samples, "seed": seed}),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let povm = sparsify_uniform(d, n, &mut rng).map_err(lift)?;
    let mut rows = Vec::new();
    let mut max_rel = 0.0f64;
    for t in 0..trials {
        let delta = sample_traceless_gue(d, &mut rng);
        let m_norm = povm_norm(&delta, &povm).map_err(lift)?;
        let u_norm = uniform_norm_mc(&delta, mc_samples, &mut rng).map_err(lift)?;
        let rel = (m_norm.value - u_norm.value).abs() / u_norm.value.max(1e-12);
        max_rel = max_rel.max(rel);
        rows.push(vec![
            t.to_string(),
            format!("{:.12e}", m_norm.value),
            format!("{:.12e}", u_norm.value),
            format!("{:.12e}", u_norm.stderr),
            format!("{:.12e}", rel),
        ]);
    }
    run.write(
        "csv",
        &csv(&["trial", "povm_norm", "uniform_norm_mc", "mc_stderr", "rel_dev"], &rows),
    )
    .map_err(io_fail)?;
    run.write_json(&json!({"d": d, "n": n, "max_rel_deviation": max_rel}))
        .map_err(io_fail)?;
    println!("max relative deviation over {trials} directions: {max_rel:.4}");
    if n >= 50 * d * d {
        run.assert(
            "calibrated_deviation_below_0.25",
            max_rel < 0.25,
            format!("max relative deviation {max_rel:.4} at n = {n} ≥ 50d²"),
        );
    }
    Ok(run)
}

pub fn games(
    game: &str,
    class: &str,
    repeat: usize,
    out: &Path,
    name: &str,
) -> CmdResult {
    let base = match game {
        "chsh" => Game::chsh(),
        "anti3" => Game::anti3(),
        other => return Err(config_err(format!("unknown game '{other}'"))),
    };
    let cls = match class {
        "ns" => CorrelationClass::Ns,
        "snos" => CorrelationClass::Snos,
        "classical" => CorrelationClass::Classical,
        other => return Err(config_err(format!("unknown correlation class '{other}'"))),
    };
    if repeat == 0 {
        return Err(config_err("need --repeat ≥ 1"));
    }
    let g = if repeat > 1 {
        base.repeat(repeat).map_err(lift)?
    } else {
        base
    };
    let mut run = RunOutput::new(
        out,
        name,
        json!({"command": "games", "game": game, "class": class, "repeat": repeat}),
    );
    let value = game_value(&g, cls).map_err(lift)?;
    let (printed, payload) = match &value {
        GameValue::Exact { value, .. } => (value.to_string(), json!({"exact": value.to_string()})),
        GameValue::Approx { value } => (
            format!("{value:.6} (approximate, floating LP)"),
            json!({"approx": value}),
        ),
    };
    println!("{printed}");
    run.write_json(&json!({
        "game": game, "class": class, "repeat": repeat, "value": payload,
        "definition": g.to_json(),
    }))
    .map_err(io_fail)?;
    // canonical single-instance values double as embedded assertions
    if repeat == 1 {
        let oracle = match (game, class) {
            ("anti3", "ns") => Some("2/3"),
            ("anti3", "snos") | ("chsh", "ns") => Some("1"),
            ("chsh", "classical") => Some("3/4"),
            _ => None,
        };
        if let Some(expect) = oracle {
            let got = value
                .exact_value()
                .map(|v| v.to_string())
                .unwrap_or_default();
            run.assert(
                "canonical_value",
                got == expect,
                format!("expected {expect}, got {got}"),
            );
        }
    }
    Ok(run)
}

pub fn witness(bundles: usize, states: usize, seed: u64, out: &Path, name: &str) -> CmdResult {
    let mut run = RunOutput::new(
        out,
        name,
        json!({"command": "witness", "bundles": bundles, "states": states, "seed": seed}),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layout = TensorLayout::uniform(2, 3);

    // GHZ oracle bundle: lifting the GHZ witness against itself returns it
    let w = ghz_witness(2).map_err(lift)?;
    let ghz_bundle = witness_lift(&w, &[w.clone(), w.clone(), w.clone()]).map_err(lift)?;
    let overlap = ghz_bundle.w_gme.inner(ghz(2).map_err(lift)?.op());
    run.assert(
        "ghz_overlap_minus_half",
        (overlap + 0.5).abs() <= 1e-10,
        format!("tr(W_GME · GHZ) = {overlap:.12}"),
    );
    println!("GHZ bundle: tr(W_GME · GHZ) = {overlap:.6}");

    let mut worst_domination = f64::INFINITY;
    let mut worst_soundness = f64::INFINITY;
    let mut rows = Vec::new();
    for b in 0..bundles {
        let ws: Vec<HermitianOperator> = (0..3)
            .map(|_| {
                let g = sample_traceless_gue(layout.total_dim(), &mut rng);
                g.with_layout(layout.clone()).expect("dims match")
            })
            .collect();
        let q = build_q_minmax(&ws).map_err(lift)?;
        let bundle = witness_lift(&q, &ws).map_err(lift)?;
        let mut dom = f64::INFINITY;
        for wi in &ws {
            dom = dom.min(bundle.w_gme.sub(wi).min_eigenvalue());
        }
        worst_domination = worst_domination.min(dom);
        let mut sound = f64::INFINITY;
        for _ in 0..states {
            let sigma = random_biseparable(&layout, 3, &mut rng).map_err(lift)?;
            sound = sound.min(bundle.w_gme.inner(sigma.op()));
        }
        worst_soundness = worst_soundness.min(sound);
        rows.push(vec![
            b.to_string(),
            format!("{:.12e}", dom),
            format!("{:.12e}", sound),
        ]);
    }
    run.write("csv", &csv(&["bundle", "min_eig_domination", "min_biseparable_trace"], &rows))
        .map_err(io_fail)?;
    run.write_json(&json!({
        "bundles": bundles, "states_per_bundle": states,
        "worst_domination_eig": worst_domination,
        "worst_biseparable_trace": worst_soundness,
        "ghz_overlap": overlap,
    }))
    .map_err(io_fail)?;
    run.assert(
        "domination",
        worst_domination >= -1e-9,
        format!("min eig of W_GME − W_I over all bundles: {worst_domination:.3e}"),
    );
    run.assert(
        "biseparable_soundness",
        worst_soundness >= -1e-8,
        format!("min tr(W_GME·σ) over biseparable samples: {worst_soundness:.3e}"),
    );
    println!(
        "{bundles} bundles: domination ≥ {worst_domination:.3e}, soundness ≥ {worst_soundness:.3e}"
    );
    Ok(run)
}

#[allow(clippy::too_many_arguments)]
pub fn compress_cmd(
    d: usize,
    n_grid: &[usize],
    samples: usize,
    seed: u64,
    out: &Path,
    name: &str,
) -> CmdResult {
    if n_grid.is_empty() {
        return Err(config_err("need at least one Kraus budget in --n"));
    }
    let mut run = RunOutput::new(
        out,
        name,
        json!({"command": "compress", "d": d, "n_grid": n_grid, "samples": samples, "seed": seed}),
    );
    let ch = QuantumChannel::fully_randomizing(d);
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &n in n_grid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hat = renormalize_tp(&compress(&ch, n, &mut rng).map_err(lift)?).map_err(lift)?;
        let report = closeness_report(&ch, &hat, samples, &mut rng).map_err(lift)?;
        println!(
            "n = {n}: error_1to1 = {:.4}, tp_residual = {:.2e}",
            report.error_1to1, report.tp_residual
        );
        rows.push(vec![
            n.to_string(),
            format!("{:.12e}", report.error_1to1),
            format!("{:.12e}", report.error_1to2),
            format!("{:.12e}", report.error_1toinf),
            format!("{:.12e}", report.tp_residual),
        ]);
        if report.tp_residual >= 1e-9 {
            run.assert(
                "tp_residual",
                false,
                format!("residual {} at n = {n}", report.tp_residual),
            );
        }
        if d == 4 && n >= 300 {
            run.assert(
                "calibrated_error_below_0.3",
                report.error_1to1 <= 0.3,
                format!("error_1to1 = {} at n = {n}", report.error_1to1),
            );
        }
        reports.push(json!({"n": n, "report": report.to_json()}));
    }
    run.write(
        "csv",
        &csv(
            &["n", "error_1to1", "error_1to2", "error_1toinf", "tp_residual"],
            &rows,
        ),
    )
    .map_err(io_fail)?;
    run.write_json(&json!({"d": d, "runs": reports})).map_err(io_fail)?;
    Ok(run)
}
