use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use catamp::cascade::{cascade_run_full, window_discretize, CascadePolicy, Conditioning, PairingRule};
use catamp::closed_form::quadrature_curves;
use catamp::cstate::DEFAULT_PRUNE_TOL;
use catamp::table::{ResultTable, Value};
use catamp::wigner::{wigner_state, zero_crossings, Axes, GridSpec, PhaseGrid};
use catamp::{AmpConfig, Amplifier, DyadMix, Pairing, PureCSS};

use crate::params::Params;
use crate::CliError;

const DEFAULT_TARGETS: [f64; 3] = [0.90, 0.95, 0.99];

fn amplifiers(alphas: &[f64], losses: &[f64], pairing: Pairing) -> Result<Vec<(f64, f64, Amplifier)>, CliError> {
    let mut out = Vec::with_capacity(alphas.len() * losses.len());
    for &alpha in alphas {
        for &r2 in losses {
            out.push((alpha, r2, Amplifier::new(AmpConfig::with_loss(alpha, pairing, r2)?)));
        }
    }
    Ok(out)
}

pub fn curves(p: &mut Params) -> Result<ResultTable, CliError> {
    let alphas = p.alphas("0.5:2:0.5")?;
    let xs = p.range("x-range", "-5:5:0.01")?.values();
    if let Some(&bad) = alphas.iter().find(|a| !(**a > 0.0)) {
        return Err(catamp::Error::InvalidAmplitude(bad).into());
    }
    let mut t = ResultTable::new("curves", &["alpha", "x", "vacuum", "even_combination", "odd_combination"]);
    for &alpha in &alphas {
        for &x in &xs {
            let (v, s, d) = quadrature_curves(alpha, x);
            t.push(vec![alpha.into(), x.into(), v.into(), s.into(), d.into()]);
        }
    }
    Ok(t)
}

pub fn sweep(p: &mut Params) -> Result<ResultTable, CliError> {
    let pairing = p.pairing(Pairing::EvenOdd)?;
    let alphas = p.alphas("0.01:2.5:0.01")?;
    let xs = p.range("x-range", "-3:3:0.01")?.values();
    let losses = p.list("loss", &[0.0])?;
    let amps = amplifiers(&alphas, &losses, pairing)?;
    let blocks: Vec<Vec<Vec<Value>>> = amps
        .par_iter()
        .map(|(alpha, r2, amp)| {
            xs.iter()
                .map(|&x| {
                    let (d, f) = amp.point(x);
                    vec![(*alpha).into(), x.into(), f.into(), d.into(), (*r2).into()]
                })
                .collect()
        })
        .collect();
    let mut t = ResultTable::new("sweep", &["alpha", "x0", "fidelity", "density", "loss"]);
    blocks.into_iter().flatten().for_each(|r| t.push(r));
    t.set_meta("pairing", pairing);
    Ok(t)
}

pub fn density(p: &mut Params) -> Result<ResultTable, CliError> {
    let pairing = p.pairing(Pairing::EvenOdd)?;
    let alphas = p.alphas("1.2:1.2:1")?;
    let xs = p.range("x-range", "-4:4:0.01")?.values();
    let losses = p.list("loss", &[0.0])?;
    let window = p.optional::<f64>("window")?;
    let amps = amplifiers(&alphas, &losses, pairing)?;
    let mut t = ResultTable::new("density", &["alpha", "loss", "x0", "density", "fidelity"]);
    let blocks: Vec<Vec<Vec<Value>>> = amps
        .par_iter()
        .map(|(alpha, r2, amp)| {
            xs.iter()
                .map(|&x| {
                    let (d, f) = amp.point(x);
                    vec![(*alpha).into(), (*r2).into(), x.into(), d.into(), f.into()]
                })
                .collect()
        })
        .collect();
    blocks.into_iter().flatten().for_each(|r| t.push(r));
    if let Some(w) = window {
        let stats = amps
            .iter()
            .map(|(alpha, r2, amp)| {
                let s = amp.window(w)?;
                Ok(serde_json::json!({"alpha": alpha, "loss": r2, "window": s}))
            })
            .collect::<Result<Vec<_>, catamp::Error>>()?;
        t.set_meta("window_stats", stats);
    }
    t.set_meta("pairing", pairing);
    Ok(t)
}

pub fn success(p: &mut Params) -> Result<ResultTable, CliError> {
    let pairing = p.pairing(Pairing::EvenOdd)?;
    let alphas = p.alphas("0.1:2.5:0.05")?;
    let losses = p.list("loss", &[0.0])?;
    let targets = p.list("targets", &DEFAULT_TARGETS)?;
    let amps = amplifiers(&alphas, &losses, pairing)?;
    let blocks: Vec<Vec<Vec<Value>>> = amps
        .par_iter()
        .map(|(alpha, r2, amp)| {
            targets
                .iter()
                .map(|&target| {
                    let s = amp.max_prob_at_target(target)?;
                    Ok(vec![
                        (*alpha).into(),
                        target.into(),
                        (*r2).into(),
                        s.probability.into(),
                        s.half_width.into(),
                        s.avg_fidelity.into(),
                    ])
                })
                .collect::<Result<Vec<_>, catamp::Error>>()
        })
        .collect::<Result<_, _>>()?;
    let mut t = ResultTable::new("success", &["alpha", "target", "loss", "probability", "window", "avg_fidelity"]);
    blocks.into_iter().flatten().for_each(|r| t.push(r));
    t.set_meta("pairing", pairing);
    Ok(t)
}

fn conditioning(p: &mut Params) -> Result<Conditioning, CliError> {
    let w = p.single("window", 1.0)?;
    if w == 0.0 {
        let x0 = p.value("x0", 0.0)?;
        Ok(Conditioning::Exact { x0 })
    } else {
        let nodes = p.value("nodes", 21usize)?;
        Ok(Conditioning::Window { half_width: w, nodes })
    }
}

fn grid_spec(p: &mut Params) -> Result<GridSpec, CliError> {
    let half = p.value("grid-half", 4.0)?;
    let step = p.value("grid-step", 0.05)?;
    let axes = match p.value("axes", "amplitude".to_string())?.as_str() {
        "amplitude" => Axes::Amplitude,
        "quadrature" => Axes::Quadrature,
        other => return Err(CliError::Usage(format!("--axes: expected amplitude or quadrature, got `{other}`"))),
    };
    if !(half > 0.0) {
        return Err(CliError::Usage(format!("--grid-half must be positive, got {half}")));
    }
    Ok(GridSpec::square(half, step, axes))
}

pub fn wigner(p: &mut Params) -> Result<ResultTable, CliError> {
    let pairing = p.pairing(Pairing::EvenOdd)?;
    let alpha = p.single("alpha", 1.2)?;
    let r2 = p.single("loss", 0.0)?;
    let cond = conditioning(p)?;
    let spec = grid_spec(p)?;
    let cfg = AmpConfig::with_loss(alpha, pairing, r2)?;
    let amp = Amplifier::new(cfg);

    let (output, stats) = match cond {
        Conditioning::Window { half_width, nodes } => {
            let (state, _) = window_discretize(&cfg, half_width, nodes)?;
            (state, amp.window(half_width)?)
        }
        Conditioning::Exact { x0 } => {
            let state = amp.projected_state(x0)?.to_dyads();
            let (d, f) = amp.point(x0);
            (state, catamp::WindowStats { half_width: 0.0, probability: d, avg_fidelity: f })
        }
    };
    let (q0, q1) = pairing.input_parities();
    let states = [
        ("input_mode0", DyadMix::from(PureCSS::scs(alpha, q0)?)),
        ("input_mode1", DyadMix::from(PureCSS::scs(alpha, q1)?)),
        ("output", output.clone()),
    ];
    let grids: Vec<(&str, PhaseGrid)> = states
        .iter()
        .map(|(name, m)| Ok((*name, wigner_state(m, &spec)?)))
        .collect::<Result<_, catamp::Error>>()?;

    let (cx, cp) = match spec.axes {
        Axes::Amplitude => ("re_beta", "im_beta"),
        Axes::Quadrature => ("x", "p"),
    };
    let mut t = ResultTable::new("wigner", &["state", cx, cp, "w"]);
    let mut summary = serde_json::Map::new();
    for (name, g) in &grids {
        for (ix, &x) in g.x.iter().enumerate() {
            for (ip, &pv) in g.p.iter().enumerate() {
                t.push(vec![(*name).into(), x.into(), pv.into(), g.at(ix, ip).into()]);
            }
        }
        summary.insert(
            name.to_string(),
            serde_json::json!({
                "integral": g.integral(),
                "min": g.min(),
                "max": g.max(),
                "p_axis_zero_crossings": zero_crossings(&g.p_slice(0.0), 1e-6),
                "max_imag_residue": g.max_imag_residue,
            }),
        );
    }
    t.set_meta("pairing", pairing);
    t.set_meta("probability", stats.probability);
    t.set_meta("fidelity", stats.avg_fidelity);
    t.set_meta("discretized_fidelity", output.fidelity_with_pure(&cfg.target_state())?);
    t.set_meta("grids", summary);
    Ok(t)
}

pub fn cascade(p: &mut Params) -> Result<ResultTable, CliError> {
    let seed = p.pairing(Pairing::EvenOdd)?;
    let alpha = p.single("alpha", 1.0)?;
    let r2 = p.single("loss", 0.0)?;
    let stages = p.value("stages", 2usize)?;
    let rule = match p.value("rule", "clone-state".to_string())?.as_str() {
        "clone-state" => PairingRule::CloneState,
        "ideal-refresh" => PairingRule::IdealRefresh,
        other => return Err(CliError::Usage(format!("--rule: expected clone-state or ideal-refresh, got `{other}`"))),
    };
    let cond = conditioning(p)?;
    let mut policy = CascadePolicy::new(stages, cond, rule).with_loss(r2);
    policy.max_terms = p.value("max-terms", policy.max_terms)?;
    policy.prune_tol = p.value("prune-tol", DEFAULT_PRUNE_TOL)?;
    let reports_path = p.optional::<PathBuf>("reports")?;
    let checkpoints = p.optional::<PathBuf>("checkpoints")?;

    let run = cascade_run_full(alpha, seed, &policy)?;
    let mut t = ResultTable::new(
        "cascade",
        &[
            "stage",
            "pairing",
            "input_alpha",
            "target_alpha",
            "target_parity",
            "fidelity",
            "probability",
            "cumulative_probability",
            "dyad_terms",
            "label_count",
        ],
    );
    for r in &run.reports {
        t.push(vec![
            r.stage.into(),
            r.pairing.as_str().into(),
            r.input_alpha.into(),
            r.target_alpha.into(),
            r.target_parity.to_string().as_str().into(),
            r.fidelity.into(),
            r.probability.into(),
            r.cumulative_probability.into(),
            r.dyad_terms.into(),
            r.label_count.into(),
        ]);
    }
    if let Some(path) = reports_path {
        let lines: Vec<String> = run
            .reports
            .iter()
            .map(|r| serde_json::to_string(r).map_err(|e| CliError::Io(e.to_string())))
            .collect::<Result<_, _>>()?;
        fs::write(&path, lines.join("\n") + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    if let Some(dir) = checkpoints {
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        for (i, state) in run.states.iter().enumerate() {
            let path = dir.join(format!("stage_{}.json", i + 1));
            fs::write(&path, state.to_json()?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
    }
    t.set_meta("policy", policy);
    Ok(t)
}
