use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use wgof::cache::CriticalCache;
use wgof::engine::{McConfig, Workers};
use wgof::figures::{figure_bundle, Figure, FigureOptions};
use wgof::input::{load_sample, NullDist};
use wgof::manifest::RunRecorder;
use wgof::parse::{parse_counts, parse_list, parse_model, parse_shape, parse_statistic, statistic_label};
use wgof::power::{power_curves_vs_n, power_curves_vs_param, write_power_csv};
use wgof::probe::{index_estimate, write_probe_csv, ProbeSpec, WRule};
use wgof::report::{write_efficiency_csv, write_efficiency_json, EfficiencyEntry};
use wgof::{Error, Result};

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "wgof",
    version,
    about = "Weighted goodness-of-fit statistics: evaluation, calibration, power and probes"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Serialize)]
struct Global {
    /// Master seed of every simulation.
    #[arg(long, global = true, default_value_t = 20_190_301)]
    seed: u64,
    /// Null replicates per critical value (and per size check).
    #[arg(long, global = true, default_value_t = 100_000)]
    reps_critical: usize,
    /// Replicates per power estimate.
    #[arg(long, global = true, default_value_t = 10_000)]
    reps_power: usize,
    #[arg(long, global = true, default_value_t = 0.01)]
    alpha: f64,
    /// Worker threads, or "auto".
    #[arg(long, global = true, default_value = "auto")]
    workers: Workers,
    #[arg(long, global = true, default_value = "wgof-out")]
    out_dir: PathBuf,
    /// Critical-value cache file [default: <out-dir>/critical_values.csv].
    #[arg(long, global = true, env = "WGOF_CACHE")]
    cache: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
enum Command {
    /// Evaluate statistics on a data file (one value per line).
    Stat {
        #[arg(long)]
        input: PathBuf,
        /// uniform, gaussian or gaussian(mu,sigma).
        #[arg(long, default_value = "uniform")]
        null: String,
        /// Comma-separated statistics, e.g. ks,eo,estar,ad_int,ad_log.
        #[arg(long, default_value = "ks,eo,estar,ad_int,ad_log")]
        statistics: String,
    },
    /// Compute (or reuse) Monte Carlo critical values.
    Critvals {
        #[arg(long, default_value = "ks,eo,estar,ad_int,ad_log")]
        statistics: String,
        /// Comma-separated sample sizes.
        #[arg(long)]
        n: String,
    },
    /// Power against a model over an n grid, or over a parameter grid at one n.
    Power {
        /// Model, e.g. "m3 p=0.05 mu=2.0"; may be repeated.
        #[arg(long, required = true)]
        model: Vec<String>,
        #[arg(long, default_value = "ks,eo,estar,ad_int,ad_log")]
        statistics: String,
        #[arg(long)]
        n: String,
        /// Parameter to sweep (requires a single n).
        #[arg(long, requires = "values")]
        param: Option<String>,
        /// Comma-separated parameter values.
        #[arg(long)]
        values: Option<String>,
    },
    /// Data for fig1, fig2 or fig3 as long-format CSV.
    Figures {
        which: String,
        /// Explicit comma-separated n grid for fig1/fig2.
        #[arg(long)]
        n_grid: Option<String>,
        #[arg(long, default_value_t = 100)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 100_000)]
        n_cap: usize,
        /// Sample size of the fig3 sweeps.
        #[arg(long, default_value_t = 1000)]
        sweep_n: usize,
        /// Mixing weight (or tail width) of the fig3 sweeps.
        #[arg(long, default_value_t = 0.1)]
        sweep_p: f64,
        #[arg(long, default_value_t = 25)]
        sweep_points: usize,
    },
    /// Efficiency report for models ("m1 mu=0.15"), "tt" or "table:<path>".
    Efficiency {
        #[arg(long, required = true)]
        shape: Vec<String>,
        /// Comma-separated fixed truncation points for e_GK.
        #[arg(long, default_value = "0.01,0.05,0.1,0.25")]
        kappas: String,
    },
    /// Estimate a moderate-deviation index along w_n.
    Probe {
        #[arg(long)]
        statistic: String,
        /// power:<scale>:<exponent> or root-loglog:<scale>.
        #[arg(long, default_value = "power:1.2:0.25")]
        w_rule: String,
        #[arg(long, default_value = "1000,10000,100000")]
        n_grid: String,
        #[arg(long, default_value_t = 1_000_000)]
        reps: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Stat { .. } => "stat",
            Command::Critvals { .. } => "critvals",
            Command::Power { .. } => "power",
            Command::Figures { .. } => "figures",
            Command::Efficiency { .. } => "efficiency",
            Command::Probe { .. } => "probe",
        }
    }
}

fn statistics(s: &str) -> Result<Vec<wgof_core::StatisticSpec>> {
    s.split(',').map(parse_statistic).collect()
}

fn open_cache(g: &Global) -> Result<CriticalCache> {
    let path = g.cache.clone().unwrap_or_else(|| g.out_dir.join("critical_values.csv"));
    CriticalCache::open(path)
}

#[derive(Serialize)]
struct StatRow {
    statistic: String,
    n: usize,
    value: f64,
    critical_value: Option<f64>,
    reject: Option<bool>,
}

fn run(cli: &Cli, argv: Vec<String>) -> Result<()> {
    let g = &cli.global;
    let cfg = McConfig {
        reps_critical: g.reps_critical,
        reps_power: g.reps_power,
        alpha: g.alpha,
        seed: g.seed,
        workers: g.workers,
    };
    cfg.validate()?;
    let config = serde_json::to_value(cli)?;
    let mut rec = RunRecorder::new(&g.out_dir, argv, config, vec![g.seed]);
    let name = cli.command.name();
    match &cli.command {
        Command::Stat {
            input,
            null,
            statistics: list,
        } => {
            let null: NullDist = null.parse()?;
            let sample = load_sample(input, null)?;
            let cache = open_cache(g)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for spec in statistics(list)? {
                let v = spec.evaluate(&sample).map_err(|e| Error::Statistic {
                    spec: statistic_label(&spec),
                    source: e,
                })?;
                let crit = cache.get(&spec, sample.len(), g.alpha).map(|c| c.value);
                w.serialize(StatRow {
                    statistic: statistic_label(&spec),
                    n: sample.len(),
                    value: v.value,
                    critical_value: crit,
                    reject: crit.map(|c| wgof::engine::rejects(v.value, c)),
                })?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
            print!("{}", String::from_utf8_lossy(&bytes));
            rec.write("stat.csv", &bytes)?;
        }
        Command::Critvals { statistics: list, n } => {
            let specs = statistics(list)?;
            let mut cache = open_cache(g)?;
            let mut out = CriticalCache::in_memory();
            for n in parse_counts("n", n)? {
                for cv in cache.get_or_compute(&specs, n, &cfg)? {
                    out.insert(cv)?;
                }
            }
            cache.save()?;
            rec.write("critvals.csv", &out.to_csv()?)?;
        }
        Command::Power {
            model,
            statistics: list,
            n,
            param,
            values,
        } => {
            let specs = statistics(list)?;
            let ns = parse_counts("n", n)?;
            let mut cache = open_cache(g)?;
            let mut curves = Vec::new();
            for m in model {
                let m = parse_model(m)?;
                match (param, values) {
                    (Some(p), Some(v)) => {
                        let [n] = ns.as_slice() else {
                            return Err(Error::Config("a parameter sweep needs exactly one n".into()));
                        };
                        let vals = parse_list("values", v)?;
                        curves.extend(power_curves_vs_param(&specs, &m, p, &vals, *n, &cfg, &mut cache)?);
                    }
                    _ => curves.extend(power_curves_vs_n(&specs, &m, &ns, &cfg, &mut cache)?),
                }
            }
            cache.save()?;
            let mut bytes = Vec::new();
            write_power_csv(&mut bytes, &curves)?;
            rec.write("power.csv", &bytes)?;
        }
        Command::Figures {
            which,
            n_grid,
            n_min,
            steps,
            n_cap,
            sweep_n,
            sweep_p,
            sweep_points,
        } => {
            let fig: Figure = which.parse()?;
            let opts = FigureOptions {
                n_grid: n_grid.as_deref().map(|s| parse_counts("n grid", s)).transpose()?,
                n_min: *n_min,
                steps: *steps,
                n_cap: *n_cap,
                sweep_n: *sweep_n,
                sweep_p: *sweep_p,
                sweep_points: *sweep_points,
            };
            let mut cache = open_cache(g)?;
            let bundle = figure_bundle(fig, &opts, &cfg, &mut cache)?;
            cache.save()?;
            for (file, bytes) in &bundle.files {
                rec.write(file, bytes)?;
            }
            for note in bundle.notes {
                rec.note(note);
            }
        }
        Command::Efficiency { shape, kappas } => {
            let kappas = parse_list("kappas", kappas)?;
            let mut entries = Vec::new();
            for s in shape {
                let sh = parse_shape(s)?;
                entries.push(EfficiencyEntry::new(s, &sh, &kappas)?);
            }
            let mut csv_bytes = Vec::new();
            write_efficiency_csv(&mut csv_bytes, &entries, &kappas)?;
            let mut json = Vec::new();
            write_efficiency_json(&mut json, &entries)?;
            rec.write("efficiency.csv", &csv_bytes)?;
            rec.write("efficiency.json", &json)?;
        }
        Command::Probe {
            statistic,
            w_rule,
            n_grid,
            reps,
        } => {
            let probe = ProbeSpec {
                spec: parse_statistic(statistic)?,
                w_rule: w_rule.parse::<WRule>()?,
                n_grid: parse_counts("n grid", n_grid)?,
                reps: *reps,
                seed: g.seed,
            };
            let res = index_estimate(&probe, &cfg)?;
            let mut bytes = Vec::new();
            write_probe_csv(&mut bytes, &res.rows)?;
            rec.write("probe.csv", &bytes)?;
            rec.note(format!("regime: {}", res.regime.regime.as_str()));
            for c in &res.regime.conditions {
                rec.note(format!(
                    "condition {}: {}",
                    c.name,
                    if c.holds { "holds" } else { "fails" }
                ));
            }
            for n in res.regime.notes.iter().chain(&res.warnings) {
                eprintln!("warning: {n}");
                rec.note(n.clone());
            }
        }
    }
    let dir: &Path = rec.dir();
    let dir = dir.to_path_buf();
    rec.finish(name)?;
    eprintln!("wrote {name} outputs and manifest to {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(&cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{msg}");
            ExitCode::FAILURE
        }
    }
}
