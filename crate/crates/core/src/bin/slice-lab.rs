use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slice_lab::campaign::{CampaignConfig, DecomposeInstance, GeneratorRanges, ModelChoice};
use slice_lab::model::{ConvexCombo, Field, Point};
use slice_lab::scenario::{
    self, generate_instance, load_payload, parse_json, ComboPayload, EpsilonPair, Job, L1Payload,
    LemmaPayload, RemarkPayload, Scenario, ScenarioKind, ShrinkagePayload,
};
use slice_lab::{Error, Result};

/// Slices of C(K) unit balls: decompositions, diameters, sphere witnesses.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on
/// malformed or invalid input.
#[derive(Parser)]
#[command(name = "slice-lab", version)]
struct Cli {
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    /// Seed for every randomized step (overrides the scenario seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run { scenario: PathBuf },
    /// Chord bound on the unit circle: one instance or a random sweep.
    Lemma {
        #[arg(long, allow_hyphen_values = true, requires_all = ["beta", "mu"])]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, conflicts_with = "alpha")]
        samples: Option<usize>,
    },
    /// Decompose points of the neighborhood of an instance.
    Decompose {
        #[arg(long)]
        instance: PathBuf,
        /// Point to decompose (JSON point).
        #[arg(long, conflicts_with = "sample")]
        y: Option<PathBuf>,
        /// Draw the point from the neighborhood with this seed.
        #[arg(long)]
        sample: Option<u64>,
        /// Number of sampled points when no `--y` is given.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Sup-norm diameter of a convex combination of slices of real ℓ∞ⁿ.
    Diameter {
        #[arg(long)]
        combo: PathBuf,
    },
    /// Norm of λS₁ + (1 − λ)S₂ in ℝ ⊕_p ℝ.
    Shrinkage {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
    },
    /// Norm of ½S(x*, ε) + ½S(−x*, ε) in ℓ₂ⁿ.
    Remark {
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        dimension: usize,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
    },
    /// Fresh-coordinate witness on the unit sphere of c₀.
    SphereWitness {
        #[arg(long)]
        combo: PathBuf,
    },
    /// Disjoint-cell witness in a discrete probability space.
    L1Witness {
        #[arg(long)]
        space: PathBuf,
    },
    /// Randomized decomposition campaign.
    Campaign {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a random decompose scenario.
    Generate {
        #[command(flatten)]
        ranges: RangeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    #[arg(long, default_value_t = 1)]
    k_min: usize,
    #[arg(long, default_value_t = 5)]
    k_max: usize,
    /// Restrict to one field (`real` or `complex`).
    #[arg(long, value_parser = parse_field)]
    field: Option<Field>,
    /// Restrict to one model (`finite-discrete`, `c0` or `c-omega`).
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelChoice>,
    #[arg(long)]
    force_case_three: bool,
}

fn parse_field(s: &str) -> std::result::Result<Field, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|e| e.to_string())
}

fn parse_model(s: &str) -> std::result::Result<ModelChoice, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|e| e.to_string())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// A combo given as a scenario, as `{"combo": [...]}` or as a bare list.
fn load_combo(path: &Path, kind: ScenarioKind) -> Result<ConvexCombo> {
    let text = read(path)?;
    if text.trim_start().starts_with('[') {
        return parse_json(&text);
    }
    load_payload::<ComboPayload>(path, kind).map(|p| p.combo)
}

fn build(cli: &Cli) -> Result<Option<Scenario>> {
    let job = match &cli.command {
        Command::Run { scenario } => {
            let mut s = scenario::load_scenario(scenario)?;
            s.seed = cli.seed.or(s.seed);
            return Ok(Some(s));
        }
        Command::Lemma {
            alpha,
            beta,
            mu,
            samples,
        } => Job::Lemma(LemmaPayload {
            alpha: *alpha,
            beta: *beta,
            mu: *mu,
            samples: match (alpha, samples) {
                (None, None) => Some(1_000_000),
                _ => *samples,
            },
        }),
        Command::Decompose {
            instance,
            y,
            sample,
            samples,
        } => {
            let mut inst: DecomposeInstance = load_payload(instance, ScenarioKind::Decompose)?;
            if let Some(path) = y {
                inst.y = Some(parse_json::<Point>(&read(path)?)?);
            }
            if sample.is_some() {
                inst.y = None;
            }
            if samples.is_some() {
                inst.samples = *samples;
            }
            return Ok(Some(Scenario {
                job: Job::Decompose(inst),
                seed: sample.or(cli.seed),
            }));
        }
        Command::Diameter { combo } => Job::Diameter(ComboPayload {
            combo: load_combo(combo, ScenarioKind::Diameter)?,
        }),
        Command::Shrinkage {
            p,
            eps,
            lambda,
            samples,
        } => Job::Shrinkage(ShrinkagePayload {
            p: *p,
            lambda: *lambda,
            epsilon: EpsilonPair::Same(*eps),
            samples: *samples,
        }),
        Command::Remark {
            eps,
            dimension,
            samples,
        } => Job::Remark(RemarkPayload {
            direction: None,
            dimension: Some(*dimension),
            epsilon: *eps,
            samples: *samples,
        }),
        Command::SphereWitness { combo } => Job::SphereWitness(ComboPayload {
            combo: load_combo(combo, ScenarioKind::SphereWitness)?,
        }),
        Command::L1Witness { space } => {
            Job::L1Witness(load_payload::<L1Payload>(space, ScenarioKind::L1Witness)?)
        }
        Command::Campaign { config } => {
            Job::Campaign(load_payload::<CampaignConfig>(config, ScenarioKind::Campaign)?)
        }
        Command::Generate { ranges, out } => {
            let defaults = GeneratorRanges::default();
            let ranges = GeneratorRanges {
                n_max: ranges.n_max,
                k_min: ranges.k_min,
                k_max: ranges.k_max,
                fields: ranges.field.map_or(defaults.fields, |f| vec![f]),
                models: ranges.model.map_or(defaults.models, |m| vec![m]),
                force_case_three: ranges.force_case_three,
            };
            let scenario = generate_instance(cli.seed.unwrap_or(1), &ranges)?;
            let mut text = serde_json::to_string_pretty(&scenario)?;
            text.push('\n');
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            return Ok(None);
        }
    };
    Ok(Some(Scenario { job, seed: cli.seed }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build(&cli).and_then(|s| match s {
        Some(s) => scenario::run(&s, None).map(Some),
        None => Ok(None),
    });
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(report)) => {
            let text = if cli.pretty {
                serde_json::to_string_pretty(&report)
            } else {
                serde_json::to_string(&report)
            };
            match text {
                Ok(text) => println!("{text}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
