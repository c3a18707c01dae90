use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use swstab::coupling::{smallness_check, Speed};
use swstab::dynamics::{
    c_limit_study, evolve_hartree, evolve_sw_field, evolve_sw_memory, measure_growth_rate,
    perturbed_plane_wave, reference_perturbation, InitialFieldContribution, MonitorTrace,
    SolverOptions,
};
use swstab::hartree_spec::{coercivity_margins_hartree, spectrum_report_hartree};
use swstab::io::checkpoint::write_checkpoint;
use swstab::io::config::OutputFormat;
use swstab::io::{write_bundle, write_series, write_timings, ReportBundle, RunConfig, Series};
use swstab::sw_spec::{locate_unstable_roots, spectrum_report_sw, unstable_mode_set};
use swstab::torus_volume;

const EXIT_OUT_OF_REGIME: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "swstab", version, about = "Plane-wave stability for Hartree and Schrodinger-wave systems on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides output.directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for the parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output formats; overrides output.formats.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Reserved; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Per-mode spectrum and coercivity margins of the linearized Hartree flow.
    AnalyzeHartree,
    /// Negative-eigenvalue count, counting identity and located roots for the coupled system.
    AnalyzeSw,
    /// Unstable roots of the dispersion function.
    Roots,
    /// Nonlinear run from a perturbed plane wave.
    Simulate,
    /// Measured growth rate of the most unstable eigenvector against a*.
    Growth,
    /// Gap between coupled and Hartree runs for each c in dynamics.c_list.
    LimitC,
    /// kappa, Upsilon* and the smallness margin.
    CheckConstants,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::AnalyzeHartree => "analyze-hartree",
            Command::AnalyzeSw => "analyze-sw",
            Command::Roots => "roots",
            Command::Simulate => "simulate",
            Command::Growth => "growth",
            Command::LimitC => "limit-c",
            Command::CheckConstants => "check-constants",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatArg {
    Json,
    Csv,
    Both,
}

struct Outcome {
    result: Value,
    series: Vec<(String, Series)>,
    out_of_regime: bool,
}

impl Outcome {
    fn new(result: Value) -> Self {
        Outcome {
            result,
            series: vec![],
            out_of_regime: false,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::from(EXIT_OUT_OF_REGIME),
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns whether the analysis left the proven regime.
fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be >= 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    if cli.seed.is_some() {
        log::info!("--seed is ignored: all computations are deterministic");
    }
    let path = cli
        .config
        .as_ref()
        .context("--config PATH is required")?;
    let mut cfg = RunConfig::from_path(path)?;
    if let Some(out) = &cli.out {
        cfg.output.directory = out.to_string_lossy().into_owned();
    }
    if let Some(f) = cli.format {
        cfg.output.formats = match f {
            FormatArg::Json => vec![OutputFormat::Json],
            FormatArg::Csv => vec![OutputFormat::Csv],
            FormatArg::Both => vec![OutputFormat::Json, OutputFormat::Csv],
        };
    }
    let name = cli.command.name();
    let start = Instant::now();
    let outcome = dispatch(cli.command, &cfg)?;
    let elapsed = start.elapsed().as_secs_f64();

    let dir = Path::new(&cfg.output.directory);
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    if cfg.output.formats.contains(&OutputFormat::Json) {
        let bundle = ReportBundle::new(name, cfg.canonical(), &outcome.result)?;
        write_bundle(&dir.join(format!("{name}.json")), &bundle)?;
    }
    if cfg.output.formats.contains(&OutputFormat::Csv) {
        for (suffix, s) in &outcome.series {
            write_series(&dir.join(format!("{name}_{suffix}.csv")), s)?;
        }
    }
    write_timings(
        &dir.join(format!("{name}.timings.json")),
        name,
        elapsed,
        rayon::current_num_threads(),
    )?;
    println!("{}", summary_line(name, &outcome.result));
    if outcome.out_of_regime {
        eprintln!("{name}: smallness condition fails; counts are outside the proven regime");
    }
    Ok(outcome.out_of_regime)
}

fn summary_line(name: &str, v: &Value) -> String {
    let pick = |keys: &[&str]| -> String {
        keys.iter()
            .filter_map(|k| v.get(*k).map(|x| format!("{k}={x}")))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let body = match name {
        "check-constants" => pick(&["kappa", "smallness_margin", "holds"]),
        "analyze-hartree" | "analyze-sw" => pick(&["verdict", "n_L", "N_Cplus", "unstable_modes"]),
        "roots" => pick(&["a_star", "unstable_modes"]),
        "growth" => pick(&["a_predicted", "a_measured", "relative_gap"]),
        "limit-c" => pick(&["nonincreasing"]),
        _ => pick(&["samples", "mass_drift"]),
    };
    format!("{name}: {body}")
}

fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.coupling_spec()?;
    let k = cfg.k_mode();
    let m_max = cfg.m_max();
    let tol = cfg.root_tolerances();
    match cmd {
        Command::CheckConstants => {
            let c = spec.constants();
            let s = smallness_check(&c);
            Ok(Outcome::new(json!({
                "kappa": c.kappa,
                "upsilon_star": c.upsilon_star,
                "sigma1_mean": c.sigma1_mean,
                "sigma1_l1": c.sigma1_l1,
                "kappa_l1_sigma1_product": c.kappa_l1_sigma1_product,
                "smallness_margin": s.margin,
                "holds": s.holds,
            })))
        }
        Command::AnalyzeHartree => {
            let hs = spec.with_c(Speed::Infinite);
            let report = spectrum_report_hartree(&k, m_max, &hs);
            let mut v = serde_json::to_value(&report)?;
            v["coercivity"] = serde_json::to_value(coercivity_margins_hartree(m_max, &hs))?;
            Ok(Outcome::new(v))
        }
        Command::AnalyzeSw => {
            let report = spectrum_report_sw(&k, m_max, &spec, true, cfg.analysis.rect, &tol)?;
            let out_of_regime = !report.in_proven_regime;
            let mut v = serde_json::to_value(&report)?;
            flatten_counts(&mut v);
            Ok(Outcome {
                out_of_regime,
                ..Outcome::new(v)
            })
        }
        Command::Roots => {
            let roots = locate_unstable_roots(&k, m_max, &spec, cfg.analysis.rect, &tol)?;
            let a_star = roots.iter().map(|r| r.lambda.re).reduce(f64::max);
            Ok(Outcome::new(json!({
                "k": k,
                "a_star": a_star,
                "unstable_modes": unstable_mode_set(&roots),
                "roots": roots,
            })))
        }
        Command::Simulate => simulate(cfg),
        Command::Growth => {
            let mut grid = cfg.grid_spec();
            grid.t_final = cfg.dynamics.growth_t_final.unwrap_or(0.0);
            let m = measure_growth_rate(&k, cfg.dynamics.amplitude, &spec, &grid, &cfg.growth_options())?;
            Ok(Outcome::new(serde_json::to_value(&m)?))
        }
        Command::LimitC => {
            let w = reference_perturbation(spec.d);
            let study = c_limit_study(
                &spec,
                &cfg.grid_spec(),
                k,
                cfg.dynamics.perturbation,
                &w,
                &cfg.dynamics.c_list,
                cfg.dynamics.sample_every,
            )?;
            let series = Series::new(
                &["c", "sup_gap", "p_c_integral", "p_c_integral_error"],
                vec![
                    study.rows.iter().map(|r| r.c).collect(),
                    study.rows.iter().map(|r| r.sup_gap).collect(),
                    study.rows.iter().map(|r| r.p_c_integral).collect(),
                    study.rows.iter().map(|r| r.p_c_integral_error).collect(),
                ],
            )?;
            Ok(Outcome {
                series: vec![("rows".into(), series)],
                ..Outcome::new(serde_json::to_value(&study)?)
            })
        }
    }
}

/// Lifts the counting fields to the top level next to the verdict.
fn flatten_counts(v: &mut Value) {
    let Some(Value::Object(counts)) = v.as_object_mut().and_then(|o| o.remove("counts")) else {
        return;
    };
    let obj = v.as_object_mut().unwrap();
    for (key, val) in counts {
        obj.entry(key).or_insert(val);
    }
}

fn simulate(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.coupling_spec()?;
    let grid = cfg.grid_spec();
    let k = cfg.k_mode();
    let w = reference_perturbation(spec.d);
    let state = perturbed_plane_wave(&spec, &grid, k, cfg.dynamics.perturbation, &w)?;
    let opts = SolverOptions::new(k, cfg.dynamics.sample_every);
    let run = match cfg.dynamics.solver.as_str() {
        "field" => evolve_sw_field(&state, &spec, &grid, &opts)?,
        "memory" => {
            let init = InitialFieldContribution::from_state(&state, &spec)?;
            evolve_sw_memory(&state, &init, &spec, &grid, &opts, &cfg.memory_options())?
        }
        "hartree" => evolve_hartree(&state.u, &spec.with_c(Speed::Infinite), &grid, &opts)?,
        other => bail!("unknown solver {other}"),
    };
    let tr = &run.trace;
    let drift = |col: &[f64]| {
        let d = MonitorTrace::relative_drift(col);
        if d.is_finite() {
            Some(d)
        } else {
            None
        }
    };
    let result = json!({
        "solver": cfg.dynamics.solver,
        "k": k,
        "t_final": run.state.t,
        "samples": tr.len(),
        "mass_drift": drift(&tr.l2_mass),
        "h_sw_drift": drift(&tr.h_sw),
        "h_ha_drift": drift(&tr.h_ha),
        "final_fluct_nonzero": tr.fluct_nonzero.last().map(|v| v / torus_volume(spec.d).sqrt()),
        "trace": tr,
    });
    let dir = Path::new(&cfg.output.directory);
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_checkpoint(&dir.join("simulate_final.chk"), &run.state, spec.n)?;
    Ok(Outcome {
        series: vec![("trace".into(), Series::from_trace(tr))],
        ..Outcome::new(result)
    })
}
