use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use fairclust::harness::{self, ColorblindAlgo, ExperimentConfig, ReportRow};
use fairclust::oracle;
use fairclust::types::{ColorModel, Dataset, FairnessSpec, Objective, Point};
use fairclust::Result;

#[derive(Parser)]
#[command(name = "fairclust", about = "Fair clustering experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment sweep from a JSON config (flags override the file).
    Run(RunArgs),
    /// Exact reference solvers for small instances (testing only; these
    /// enumerate and refuse anything non-tiny).
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// kcenter | kmedian | kmeans
    #[arg(long)]
    objective: Option<Objective>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    p_acc: Option<f64>,
    #[arg(long)]
    epsilon_relax: Option<f64>,
    #[arg(long)]
    cluster_lb: Option<f64>,
    /// gonzalez | kmeanspp | localsearch
    #[arg(long)]
    colorblind: Option<ColorblindAlgo>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    subsample: Option<usize>,
    /// Output prefix for <out>.csv and <out>.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// JSON instance: coordinates, colors/probabilities/values, k, bounds.
    #[arg(long)]
    instance: PathBuf,
}

/// Small self-contained instance format for the oracle subcommand.
#[derive(Deserialize)]
struct OracleInstance {
    coords: Vec<Vec<f64>>,
    #[serde(default)]
    colors: Option<Vec<usize>>,
    #[serde(default)]
    probs: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    values: Option<Vec<u64>>,
    k: usize,
    objective: Objective,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

fn oracle_dataset(inst: &OracleInstance) -> Result<Dataset> {
    let n = inst.coords.len();
    if let Some(colors) = &inst.colors {
        let m = colors.iter().max().map(|&c| c + 1).unwrap_or(0).max(2);
        let points = (0..n)
            .map(|i| Point::new(i, inst.coords[i].clone()).with_color(colors[i]))
            .collect();
        Dataset::new(points, ColorModel::Deterministic { num_colors: m })
    } else if let Some(probs) = &inst.probs {
        let m = probs.first().map(Vec::len).unwrap_or(0);
        let points = (0..n)
            .map(|i| Point::new(i, inst.coords[i].clone()).with_probs(probs[i].clone()))
            .collect();
        Dataset::new(points, ColorModel::Probabilistic { num_colors: m })
    } else if let Some(values) = &inst.values {
        let r = *values.iter().max().unwrap_or(&0);
        let points = (0..n)
            .map(|i| Point::new(i, inst.coords[i].clone()).with_value(values[i]))
            .collect();
        Dataset::new(points, ColorModel::MetricMembership { r_max: r })
    } else {
        Err(fairclust::Error::Input(
            "instance needs one of colors, probs, or values".into(),
        ))
    }
}

fn run(args: RunArgs) -> Result<Vec<ReportRow>> {
    let mut config: ExperimentConfig = harness::load_config(&args.config)?;
    if let Some(v) = args.k_min {
        config.k_min = v;
    }
    if let Some(v) = args.k_max {
        config.k_max = v;
    }
    if let Some(v) = args.objective {
        config.objective = v;
    }
    if let Some(v) = args.delta {
        config.delta = v;
    }
    if let Some(v) = args.p_acc {
        config.p_acc = Some(v);
    }
    if let Some(v) = args.epsilon_relax {
        config.epsilon_relax = Some(v);
    }
    if let Some(v) = args.cluster_lb {
        config.cluster_lb = Some(v);
    }
    if let Some(v) = args.colorblind {
        config.colorblind = Some(v);
    }
    if let Some(v) = args.trials {
        config.trials = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.subsample {
        config.subsample = Some(v);
    }
    if let Some(v) = args.out {
        config.out = Some(v.to_string_lossy().into_owned());
    }
    harness::run_experiment(&config)
}

fn print_summary(rows: &[ReportRow]) {
    println!(
        "{:>3} {:>6} {:>14} {:>14} {:>8} {:>10} {:>10}",
        "k", "rows", "cb_cost(mean)", "fair_cost(mean)", "pof", "gamma_cb", "gamma_fair"
    );
    let ks: Vec<usize> = {
        let mut ks: Vec<usize> = rows.iter().map(|r| r.k).collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    };
    for k in ks {
        let ok: Vec<&ReportRow> =
            rows.iter().filter(|r| r.k == k && r.error.is_none()).collect();
        if ok.is_empty() {
            println!("{k:>3}  all rows failed");
            continue;
        }
        let mean = |f: fn(&ReportRow) -> f64| {
            ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
        };
        println!(
            "{:>3} {:>6} {:>14.4} {:>14.4} {:>8.4} {:>10.4} {:>10.4}",
            k,
            ok.len(),
            mean(|r| r.colorblind_cost.unwrap()),
            mean(|r| r.fair_cost.unwrap()),
            mean(|r| r.pof.unwrap()),
            mean(|r| r.gamma_colorblind.unwrap()),
            mean(|r| r.gamma_fair.unwrap()),
        );
    }
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("row k={} seed={} failed: {}", r.k, r.seed, r.error.as_ref().unwrap());
    }
}

fn oracle_main(args: OracleArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.instance)?;
    let inst: OracleInstance = serde_json::from_str(&text)?;
    let ds = oracle_dataset(&inst)?;
    let spec = FairnessSpec::new(inst.lower.clone(), inst.upper.clone(), 0.0)?;
    match oracle::brute_force_fair_opt(&ds, inst.k, inst.objective, &spec)? {
        Some(sol) => {
            println!("optimal cost: {:.9}", sol.cost);
            println!("centers: {:?}", sol.centers);
            println!("assignment: {:?}", sol.assignment);
        }
        None => println!("infeasible: no fair integral assignment exists"),
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args).map(|rows| print_summary(&rows)),
        Command::Oracle(args) => oracle_main(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
