//! `wavepax <subcommand> --config <path> [--out <dir>] [--seed <u64>]`
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 for numerical
//! or horizon errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use wavepax::config::{ExperimentConfig, Source};
use wavepax::decompose::{l2_residual, GaussianMixture};
use wavepax::grid::GridSpec;
use wavepax::io::{encode_field, field_slice_csv, mixture_to_json, write_file, FieldHeader};
use wavepax::observability::{self, CertificateRequest};
use wavepax::oscillator::hamiltonian_flow;
use wavepax::propagate::{grid_for, parametrix};
use wavepax::reference::{compare_parametrix, split_step_solve_every};
use wavepax::riccati::{linear_reduction_check, solve_riccati, RiccatiSolution};
use wavepax::{Error, Result};

#[derive(Parser)]
#[command(name = "wavepax", version, about = "Gaussian wavepacket parametrices and observability certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `outputs.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random test mixtures; overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Classical trajectory and the first zero T_D.
    Flow(Common),
    /// Phase coefficients y₁, y₂, y₃, a.
    Riccati(Common),
    /// Gaussian mixture for the initial data.
    Decompose(Common),
    /// Parametrix field dumps at the requested times.
    Propagate(Common),
    /// Observability certificate.
    Certify(Common),
    /// Parametrix against the split-step reference solver.
    Validate(Common),
    /// Mass of shifted packets in [R, ∞)^d against the shift.
    Counterexample(Common),
}

struct Run {
    cfg: ExperimentConfig,
    hash: String,
    out: PathBuf,
    seed: Option<u64>,
}

impl Run {
    fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.out.join(name);
        write_file(&path, contents)?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    fn report(&self, name: &str, mut body: Value) -> Result<()> {
        body["config_sha256"] = json!(self.hash);
        self.write(name, serde_json::to_string_pretty(&body)? + "\n")
    }

    fn riccati(&self) -> Result<RiccatiSolution> {
        solve_riccati(&self.cfg.oscillator, self.cfg.t_max, self.cfg.tol())
    }

    /// Phase solution that must cover all of `[0, T]`.
    fn riccati_covering(&self) -> Result<RiccatiSolution> {
        let ric = self.riccati()?;
        if ric.horizon < self.cfg.t_max {
            return Err(Error::Horizon {
                t: self.cfg.t_max,
                last_valid: ric.horizon,
                reason: "T lies beyond the non-zero-flow horizon".into(),
            });
        }
        Ok(ric)
    }

    fn grid(&self, mix: &GaussianMixture, ric: &RiccatiSolution) -> Result<GridSpec> {
        let n = self.cfg.points_per_dim();
        match self.cfg.grid.and_then(|g| g.half_width) {
            Some(l) => GridSpec::new(self.cfg.dim, l, n),
            None => grid_for(mix, ric, self.cfg.t_max, n),
        }
    }
}

fn load(common: &Common) -> Result<Run> {
    let bytes = std::fs::read(&common.config).map_err(|e| Error::Config {
        path: "<file>".into(),
        message: format!("cannot read {}: {e}", common.config.display()),
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Config {
        path: "<file>".into(),
        message: "config is not UTF-8".into(),
    })?;
    let base = common.config.parent().unwrap_or(Path::new("."));
    let cfg = ExperimentConfig::from_json_str(&text, base)?;
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output_dir().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("wavepax-out"));
    Ok(Run {
        hash: hex::encode(Sha256::digest(&bytes)),
        seed: common.seed.or(cfg.seed),
        cfg,
        out,
    })
}

fn flow(run: &Run) -> Result<()> {
    let flow = hamiltonian_flow(&run.cfg.oscillator, run.cfg.t_max, run.cfg.tol().max(1e-12))?;
    run.write("flow.csv", flow.to_csv())?;
    run.report(
        "flow.json",
        json!({
            "T": run.cfg.t_max,
            "horizon": flow.horizon,
            "T_D": flow.horizon.finite(),
            "t_end": flow.t_end(),
            "samples": flow.t.len(),
            "max_ode_residual": flow.max_ode_residual(&run.cfg.oscillator),
        }),
    )
}

fn riccati(run: &Run) -> Result<()> {
    let ric = run.riccati()?;
    let reduction = linear_reduction_check(&run.cfg.oscillator, &ric)?;
    run.write("riccati.csv", ric.to_csv())?;
    run.report(
        "riccati.json",
        json!({
            "T": run.cfg.t_max,
            "horizon": ric.horizon,
            "flow_horizon": ric.flow_horizon,
            "samples": ric.len(),
            "amplitude_identity_deviation": ric.amplitude_identity_deviation(),
            "linear_reduction_deviation": reduction,
        }),
    )
}

fn decompose(run: &Run) -> Result<()> {
    let prep = run.cfg.prepare_initial(run.seed)?;
    let mix = &prep.mixture;
    run.write("mixture.json", mixture_to_json(mix) + "\n")?;
    run.write("mixture.csv", mix.to_csv())?;
    let mut report = json!({
        "terms": mix.len(),
        "N": mix.order,
        "eps0": mix.eps0,
        "eta": mix.eta,
        "tail": mix.tail,
        "class_A": mix.is_class_a(),
        "alpha_N": mix.center_spread(),
        "max_center_norm": mix.max_center_norm(),
    });
    match &prep.source {
        Source::Hermite(c) => {
            run.write("hermite.csv", c.to_csv())?;
            let n = mix.order as f64;
            let half = n * mix.eps0 + 8.0;
            let points = if mix.dim == 1 { 1 << 12 } else { 1 << 9 };
            let f_norm = l2_residual(&GaussianMixture::empty(mix.dim), &|x: &[f64]| c.reconstruct(x), -half, half, points)?;
            report["residual"] = json!(mix.eta);
            report["f_norm"] = json!(f_norm);
            report["bound"] = json!((n.exp() * n * mix.eps0).powi(mix.dim as i32) * f_norm + mix.tail);
        }
        Source::Step(st) => {
            report["sup_bound_per_coord"] = json!(st.sup_bound_per_coord);
            report["sup_bound"] = json!(st.sup_bound);
        }
        Source::Mixture => {}
    }
    run.report("decompose.json", report)
}

fn propagate(run: &Run) -> Result<()> {
    let prep = run.cfg.prepare_initial(run.seed)?;
    let ric = run.riccati_covering()?;
    let grid = run.grid(&prep.mixture, &ric)?;
    let times = run.cfg.times.clone().unwrap_or_else(|| vec![run.cfg.t_max]);
    let mut dumps = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let field = parametrix(&prep.mixture, &ric, t, &grid)?;
        let bin = format!("field_{i:03}.bin");
        let csv = format!("field_{i:03}.csv");
        run.write(&bin, encode_field(&FieldHeader::new(&grid, t), &field.values))?;
        run.write(&csv, field_slice_csv(&grid, &field.values))?;
        dumps.push(json!({"t": t, "field": bin, "slice": csv, "l2_norm": grid.l2_norm(&field.values)}));
    }
    run.report("propagate.json", json!({"grid": grid, "dumps": dumps}))
}

fn certify(run: &Run) -> Result<()> {
    let dom = run.cfg.domain_spec()?;
    let ric = run.riccati_covering()?;
    let prep = match &run.cfg.initial_data {
        Some(_) => Some(run.cfg.prepare_initial(run.seed)?),
        None => None,
    };
    let cert_cfg = run.cfg.certificate;
    let order = run.cfg.order.or(prep.as_ref().map(|p| p.mixture.order)).unwrap_or(3).max(3);
    let request = CertificateRequest {
        order,
        eps: cert_cfg.and_then(|c| c.eps).unwrap_or(run.cfg.eps0()),
        alpha_n: cert_cfg
            .and_then(|c| c.alpha_n)
            .or(prep.as_ref().map(|p| p.mixture.center_spread()))
            .unwrap_or(0.0),
        r1: cert_cfg
            .and_then(|c| c.r1)
            .or(prep.as_ref().map(|p| p.mixture.max_center_norm()))
            .unwrap_or(dom.r),
    };
    let cert = observability::certify(&ric, &dom, run.cfg.t_max, &request)?;
    let mut report = serde_json::to_value(&cert)?;
    report["main3_C_T"] = json!(observability::main3_constant(run.cfg.t_max));
    if let Some(Source::Step(st)) = prep.as_ref().map(|p| &p.source) {
        let r = st.support_radius();
        let points = if st.mixture.dim == 1 { 1 << 14 } else { 1 << 9 };
        let phi_l2 = l2_residual(&GaussianMixture::empty(st.mixture.dim), &|x: &[f64]| st.phi(x), -r, r, points)?;
        report["linfty"] = json!({
            "ok": observability::linfty_check(st.m, st.dx, st.mixture.dim, phi_l2)?,
            "phi_l2": phi_l2,
        });
    }
    run.write("certificate.csv", cert.to_csv())?;
    run.report("certificate.json", report)
}

fn validate(run: &Run) -> Result<()> {
    let prep = run.cfg.prepare_initial(run.seed)?;
    let ric = run.riccati_covering()?;
    let grid = run.grid(&prep.mixture, &ric)?;
    let u0 = grid.sample_real(|x| prep.source_value(x));
    let steps = ((run.cfg.steps_per_unit() as f64) * run.cfg.t_max).ceil().max(1.0) as usize;
    let store_every = steps.div_ceil(256);
    let sol = split_step_solve_every(&run.cfg.oscillator, &u0, &grid, run.cfg.t_max, steps, store_every)?;
    let cmp = compare_parametrix(&sol, &prep.mixture, &ric)?;
    let mut csv = String::from("t,error\n");
    for (t, e) in sol.t_samples.iter().zip(&cmp.errors) {
        csv.push_str(&format!("{t:.17e},{e:.17e}\n"));
    }
    run.write("validate.csv", csv)?;
    run.report(
        "validate.json",
        json!({
            "T": run.cfg.t_max,
            "grid": grid,
            "steps": steps,
            "error": cmp.error,
            "bound": cmp.bound,
            "ok": cmp.ok,
            "sup_error": cmp.sup_error,
            "mass_drift": sol.mass_drift,
        }),
    )
}

fn counterexample(run: &Run) -> Result<()> {
    let ric = run.riccati_covering()?;
    let c = run.cfg.counterexample.unwrap_or(wavepax::config::CounterexampleConfig {
        shift_max: 20.0,
        shift_step: 0.5,
        t: None,
        r: 0.0,
    });
    let t = c.t.unwrap_or(run.cfg.t_max);
    let count = (c.shift_max / c.shift_step).floor() as usize;
    let mut csv = String::from("shift,mass\n");
    let mut masses = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let s = i as f64 * c.shift_step;
        let m = observability::counterexample_mass(s, &ric, t, c.r, run.cfg.dim)?;
        csv.push_str(&format!("{s:.17e},{m:.17e}\n"));
        masses.push(m);
    }
    run.write("counterexample.csv", csv)?;
    run.report(
        "counterexample.json",
        json!({
            "t": t,
            "R": c.r,
            "monotone": masses.windows(2).all(|w| w[1] <= w[0]),
            "mass_first": masses.first(),
            "mass_last": masses.last(),
        }),
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, action): (&Common, fn(&Run) -> Result<()>) = match &cli.command {
        Command::Flow(c) => (c, flow),
        Command::Riccati(c) => (c, riccati),
        Command::Decompose(c) => (c, decompose),
        Command::Propagate(c) => (c, propagate),
        Command::Certify(c) => (c, certify),
        Command::Validate(c) => (c, validate),
        Command::Counterexample(c) => (c, counterexample),
    };
    let run = match load(common) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match action(&run) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
