use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hsp_core::dao::Regularizer;
use hsp_core::pac::{sample_complexity, vc_report};
use hsp_core::rng::SplitRng;
use hsp_core::solver::{DirectSampler, KernelIntersection};
use hsp_core::Group;
use hsp_experiments::config::{
    output_dir, CandidateMode, ExperimentConfig, GridSpec, GroupSpec, InferenceSpec, SamplingMode,
    SamplingSpec, SolverSpec, SCHEMA_VERSION,
};
use hsp_experiments::nuisance::{nuisance_demo, NuisanceConfig};
use hsp_experiments::presets::{run_preset, Preset};
use hsp_experiments::report::{run_experiment, SubgroupView};
use hsp_experiments::{ExpError, Result};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "hsp",
    version,
    about = "Hidden subgroup simulation and inference from finite data"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the standard algorithm with exact coset-state sampling.
    SolveHsp {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Full run: sample, solver attempt, leakage, DAO inference; writes reports.
    Infer {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Print the DAO cost of every candidate.
    DaoScan {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Print annihilator mass, SNR and false-signal masses.
    Leakage {
        #[command(flatten)]
        data: DataArgs,
    },
    /// VC dimension of the coset-relation class.
    Vc {
        #[arg(long, value_delimiter = ',', required = true)]
        factors: Vec<i64>,
        /// Also compute the largest shattered set by search.
        #[arg(long)]
        brute_force: bool,
    },
    /// PAC sample-size estimate.
    SampleComplexity {
        #[arg(long, value_delimiter = ',', required = true)]
        factors: Vec<i64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        constant: f64,
    },
    /// Infer the stabilizer of a noisy score on the dodecagon world.
    DemoNuisance {
        /// TOML file with the full nuisance config; overrides the flags below.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        m: usize,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Repeat over this many consecutive seeds and report frequencies.
        #[arg(long, default_value_t = 1)]
        runs: u64,
    },
    /// Run a named preset.
    Preset {
        #[arg(value_enum)]
        name: PresetName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetName {
    Z12Walkthrough,
    Z12Sparse,
    StandardFails,
    LeakCurve,
}

impl From<PresetName> for Preset {
    fn from(p: PresetName) -> Self {
        match p {
            PresetName::Z12Walkthrough => Preset::Z12Walkthrough,
            PresetName::Z12Sparse => Preset::Z12Sparse,
            PresetName::StandardFails => Preset::StandardFails,
            PresetName::LeakCurve => Preset::LeakCurve,
        }
    }
}

#[derive(Args)]
struct DataArgs {
    /// Experiment config (TOML). Flags below are ignored when given, except `--seed` and `--out`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cyclic factors, e.g. `12` or `2,4`.
    #[arg(long, value_delimiter = ',')]
    factors: Vec<i64>,
    /// Hidden-subgroup generator as comma-separated residues; repeatable.
    #[arg(long = "gen")]
    generators: Vec<String>,
    /// Explicit training inputs (flat indices).
    #[arg(long, value_delimiter = ',')]
    inputs: Option<Vec<usize>>,
    /// Training-set size for sampled modes; defaults to |G| when no inputs are given.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Restrict candidates to subgroups consistent with the labels.
    #[arg(long)]
    consistent: bool,
    /// Penalize by annihilator size instead of subgroup order.
    #[arg(long)]
    annihilator_penalty: bool,
    /// SWAP-test shots per candidate.
    #[arg(long, default_value_t = 0)]
    shots: usize,
    /// Log-spaced λ grid as `lo,hi,count`.
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    /// Output directory; defaults to `$HSPLEARN_OUT_DIR` or `hsp-out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Uniform,
    Iid,
    Explicit,
}

impl DataArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_path(p)?,
            None => self.config_from_flags()?,
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.resolve()?;
        Ok(cfg)
    }

    fn config_from_flags(&self) -> Result<ExperimentConfig> {
        if self.factors.is_empty() {
            return Err(ExpError::config("--factors", "required without --config"));
        }
        let hidden = self
            .generators
            .iter()
            .map(|s| {
                s.split(',')
                    .map(|r| r.trim().parse::<i64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| ExpError::config("--gen", format!("`{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mode = match (self.mode, &self.inputs) {
            (Some(Mode::Uniform), _) => SamplingMode::UniformWithoutReplacement,
            (Some(Mode::Iid), _) => SamplingMode::Iid,
            (Some(Mode::Explicit), _) | (None, Some(_)) => SamplingMode::Explicit,
            (None, None) => SamplingMode::UniformWithoutReplacement,
        };
        let lambda_grid = match self.lambda_grid.as_deref() {
            Some(&[lo, hi, count]) => {
                if count < 1.0 || count.fract() != 0.0 {
                    return Err(ExpError::config(
                        "--lambda-grid",
                        "count must be a positive integer",
                    ));
                }
                Some(GridSpec {
                    lo,
                    hi,
                    count: count as usize,
                })
            }
            Some(_) => return Err(ExpError::config("--lambda-grid", "expected `lo,hi,count`")),
            None => None,
        };
        Ok(ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            seed: self.seed.unwrap_or(0),
            group: GroupSpec {
                factors: self.factors.clone(),
                hidden,
            },
            sampling: SamplingSpec {
                mode,
                n: self.n.or_else(|| {
                    let order = self.factors.iter().try_fold(1usize, |acc, &f| {
                        usize::try_from(f)
                            .ok()
                            .filter(|&f| f > 0)
                            .and_then(|f| acc.checked_mul(f))
                    });
                    if self.inputs.is_none() {
                        order
                    } else {
                        None
                    }
                }),
                inputs: self.inputs.clone(),
                weights: None,
            },
            inference: InferenceSpec {
                lambda: self.lambda,
                regularizer: if self.annihilator_penalty {
                    Regularizer::AnnihilatorOrder
                } else {
                    Regularizer::SubgroupOrder
                },
                candidates: if self.consistent {
                    CandidateMode::Consistent
                } else {
                    CandidateMode::All
                },
                shots: self.shots,
                lambda_grid,
                ..Default::default()
            },
            solver: SolverSpec::default(),
        })
    }
}

fn group_from(factors: &[i64]) -> Result<Group> {
    Group::new(factors).map_err(|e| ExpError::config("--factors", e))
}

/// Writes a line to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(line: impl std::fmt::Display) -> Result<()> {
    match writeln!(io::stdout().lock(), "{line}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(ExpError::io("<stdout>", e)),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    emit(serde_json::to_string_pretty(value)?)
}

#[derive(Serialize)]
struct SolveOutput {
    group: String,
    hidden: SubgroupView,
    result: SubgroupView,
    success: bool,
    samples_used: usize,
    stabilized: bool,
}

#[derive(Serialize)]
struct NuisanceEnsemble {
    runs: u64,
    first_seed: u64,
    /// Inferred stabilizer and how many runs produced it; `null` counts inconsistent labellings.
    outcomes: Vec<(Option<String>, u64)>,
    unstable_runs: u64,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::SolveHsp { data } => {
            let cfg = data.config()?;
            let r = cfg.resolve()?;
            let sampler = DirectSampler::new(&r.hidden);
            let mut rng = SplitRng::seed_from(cfg.seed);
            let run = KernelIntersection::new(&r.group).solve(
                || sampler.sample(&mut rng),
                cfg.solver.c,
                cfg.solver.max_steps,
                Some(&r.hidden),
            )?;
            print_json(&SolveOutput {
                group: r.group.to_string(),
                hidden: (&r.hidden).into(),
                result: (&run.result).into(),
                success: run.success == Some(true),
                samples_used: run.samples.len(),
                stabilized: run.stabilized,
            })
        }
        Command::Infer { data } => {
            let cfg = data.config()?;
            let dir = output_dir(data.out.as_deref());
            let outcome = run_experiment(&cfg, Some(&dir))?;
            print_json(&outcome.summary)?;
            eprintln!("wrote {}", dir.display());
            Ok(())
        }
        Command::DaoScan { data } => {
            let cfg = data.config()?;
            let mut quiet = cfg.clone();
            quiet.solver.enabled = false;
            let outcome = run_experiment(&quiet, None)?;
            emit("rank\tsubgroup\torder\tbeta_norm\tcost")?;
            for (i, r) in outcome.inference.reports.iter().enumerate() {
                emit(format_args!(
                    "{}\t{}\t{}\t{:.12}\t{:.12}",
                    i + 1,
                    r.description(),
                    r.candidate.order(),
                    r.beta_norm,
                    r.cost
                ))?;
            }
            match outcome.summary.sweep.map(|s| s.hidden_window) {
                Some(Some((lo, hi))) => emit(format_args!(
                    "hidden subgroup wins for lambda in [{lo:e}, {hi:e}]"
                )),
                Some(None) => emit("hidden subgroup does not win anywhere on the grid"),
                None => Ok(()),
            }
        }
        Command::Leakage { data } => {
            let cfg = data.config()?;
            let mut quiet = cfg.clone();
            quiet.solver.enabled = false;
            let outcome = run_experiment(&quiet, None)?;
            print_json(&outcome.leakage)
        }
        Command::Vc {
            factors,
            brute_force,
        } => {
            let g = group_from(&factors)?;
            let r = vc_report(&g, brute_force)?;
            match r.vc_brute_force {
                Some(b) => emit(format_args!("{} (search: {b})", r.vc_closed_form)),
                None => emit(r.vc_closed_form),
            }
        }
        Command::SampleComplexity {
            factors,
            epsilon,
            delta,
            constant,
        } => {
            let g = group_from(&factors)?;
            let s = sample_complexity(&g, epsilon, delta, constant)
                .map_err(|e| ExpError::config("sample-complexity", e))?;
            print_json(&s)
        }
        Command::DemoNuisance {
            config,
            seed,
            m,
            epsilon,
            runs,
        } => {
            let base = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| ExpError::io(&p, e))?;
                    toml::from_str::<NuisanceConfig>(&text)
                        .map_err(|e| ExpError::config("nuisance config", e.message()))?
                }
                None => NuisanceConfig {
                    m,
                    epsilon,
                    ..NuisanceConfig::dodecagon(seed)
                },
            };
            if runs <= 1 {
                return print_json(&nuisance_demo(&base)?);
            }
            let mut outcomes: Vec<(Option<String>, u64)> = Vec::new();
            let mut unstable_runs = 0;
            for i in 0..runs {
                let r = nuisance_demo(&NuisanceConfig {
                    seed: base.seed + i,
                    ..base.clone()
                })?;
                unstable_runs += r.unstable as u64;
                let key = r.inferred.map(|v| v.description);
                match outcomes.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, c)) => *c += 1,
                    None => outcomes.push((key, 1)),
                }
            }
            outcomes.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            print_json(&NuisanceEnsemble {
                runs,
                first_seed: base.seed,
                outcomes,
                unstable_runs,
            })
        }
        Command::Preset { name, out } => {
            let preset = Preset::from(name);
            let dir = output_dir(out.as_deref()).join(preset.name());
            let output = run_preset(preset, &dir)?;
            for f in &output.files {
                emit(Path::new(&dir).join(f).display())?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
