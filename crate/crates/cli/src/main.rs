use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use analog_codes::codes::{load_generator, save_generator};
use analog_codes::harness::{
    compare_codes, emit_csv, emit_json, run_sweep_with, SimConfig, SimResult, Workers,
};
use analog_codes::linalg::format_complex;
use analog_codes::metrics::{
    eigenvalue_spread, encoding_power_gain, gram_spectrum, is_mds, small_weight_witness, MdsMode,
    Tolerances, DEFAULT_MDS_COND_TOL, MAX_EXHAUSTIVE_SUBSETS,
};
use analog_codes::{CodeDescriptor, Error, ErrorClass, Family, Generator, MetricsReport};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "lacode",
    version,
    about = "Construct, analyze and simulate linear analog codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a generator matrix and write it to a file.
    Construct {
        #[arg(long)]
        family: Family,
        /// Codeword length. Implied by k*t for repetition codes.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: usize,
        /// Transform rows to keep, comma separated. Defaults to 0..k.
        #[arg(long, value_delimiter = ',')]
        rows: Option<Vec<usize>>,
        /// Repetition factor.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scale to unit power gain.
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print structural metrics of a generator file.
    Analyze {
        path: PathBuf,
        #[arg(long)]
        json: bool,
        /// Random subsets for the MDS check when exhaustive search is too large.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run one Monte Carlo SNR sweep.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads. Results do not depend on this.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run several sweeps on a shared SNR grid into one CSV.
    Compare {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Check whether every k columns of the generator are independent.
    MdsCheck {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MDS_COND_TOL)]
        cond_tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Print a nonzero source whose codeword weight is below epsilon.
    Witness {
        path: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    Exhaustive,
    Sampled,
}

fn descriptor(
    family: Family,
    n: Option<usize>,
    k: usize,
    rows: Option<Vec<usize>>,
    t: Option<usize>,
    seed: u64,
    normalize: bool,
) -> Result<CodeDescriptor, Error> {
    let usage = |m: String| Error::InvalidParameter(m);
    let need_n = || n.ok_or_else(|| usage(format!("--n is required for {family} codes")));
    let d = match family {
        Family::Repetition => {
            let t = t.ok_or_else(|| usage("--t is required for repetition codes".into()))?;
            if let Some(n) = n {
                if n != k * t {
                    return Err(usage(format!("--n {n} does not equal k*t = {}", k * t)));
                }
            }
            CodeDescriptor::repetition(k, t)
        }
        Family::Random => CodeDescriptor::random(k, need_n()?, seed),
        Family::Custom => {
            return Err(usage(
                "custom codes are loaded from files, not constructed".into(),
            ))
        }
        _ => {
            let n = need_n()?;
            let rows = rows.unwrap_or_else(|| (0..k).collect());
            if rows.len() != k {
                return Err(usage(format!(
                    "--rows lists {} rows but --k is {k}",
                    rows.len()
                )));
            }
            CodeDescriptor::transform(family, n, rows)
        }
    };
    Ok(CodeDescriptor {
        normalized: d.normalized || normalize,
        ..d
    })
}

fn print_summary(results: &[SimResult]) {
    for r in results {
        println!(
            "{}: n={} k={} gamma={} min_distance_ratio={} points={}",
            r.code_id,
            r.n,
            r.k,
            r.gamma,
            r.min_distance_ratio,
            r.points.len()
        );
    }
}

fn write_csv(results: &[SimResult], out: &PathBuf) -> Result<(), Error> {
    let file = std::fs::File::create(out)?;
    let mut w = std::io::BufWriter::new(file);
    emit_csv(results, &mut w)?;
    w.flush()?;
    Ok(())
}

fn run(cmd: Command) -> Result<(), Error> {
    let stdout = std::io::stdout();
    match cmd {
        Command::Construct {
            family,
            n,
            k,
            rows,
            t,
            seed,
            normalize,
            out,
        } => {
            let d = descriptor(family, n, k, rows, t, seed, normalize)?;
            d.validate()?;
            let g = Generator::build(&d)?;
            if let Some(path) = &out {
                save_generator(&g, path)?;
            }
            let spread = eigenvalue_spread(&gram_spectrum(&g));
            println!(
                "{} gamma={} eigenvalue_spread={spread:e}",
                d.id(),
                encoding_power_gain(&g)
            );
            if let Some(path) = out {
                println!("wrote {}", path.display());
            }
        }
        Command::Analyze {
            path,
            json,
            samples,
            seed,
        } => {
            let g = load_generator(&path)?;
            let report = MetricsReport::compute(&g, Tolerances::default(), samples, seed)?;
            if json {
                emit_json(&report, stdout.lock())?;
            } else {
                println!("code={}", g.descriptor().id());
                println!("n={} k={}", g.n(), g.k());
                println!("gamma={}", report.gamma);
                println!("min_distance_ratio={}", report.min_distance_ratio);
                println!("eigenvalue_spread={:e}", report.eigenvalue_spread);
                println!("mdre={}", report.mdre);
                println!("mds={}", report.mds);
                println!("mds_worst_condition={:e}", report.mds_worst_condition);
                println!(
                    "mse_lower_bound_per_sigma2={}",
                    report.mse_lower_bound_per_sigma2
                );
            }
        }
        Command::Simulate {
            config,
            out,
            workers,
        } => {
            let cfg = SimConfig::load(&config)?;
            let res = run_sweep_with(&cfg, Workers(workers))?;
            let results = [res];
            write_csv(&results, &out)?;
            print_summary(&results);
        }
        Command::Compare {
            configs,
            out,
            workers,
        } => {
            let cfgs = configs
                .iter()
                .map(SimConfig::load)
                .collect::<Result<Vec<_>, _>>()?;
            let cmp = compare_codes(&cfgs, Workers(workers))?;
            write_csv(&cmp.results, &out)?;
            print_summary(&cmp.results);
        }
        Command::MdsCheck {
            path,
            mode,
            samples,
            seed,
            cond_tol,
            json,
        } => {
            let g = load_generator(&path)?;
            let exhaustive = match mode {
                Mode::Exhaustive => true,
                Mode::Sampled => false,
                Mode::Auto => {
                    analog_codes::metrics::binomial(g.n(), g.k()) <= MAX_EXHAUSTIVE_SUBSETS
                }
            };
            let mode = if exhaustive {
                MdsMode::Exhaustive
            } else {
                MdsMode::Sampled { samples, seed }
            };
            let rep = is_mds(&g, mode, cond_tol)?;
            if json {
                emit_json(&rep, stdout.lock())?;
            } else {
                println!("verdict={}", rep.verdict);
                println!("subsets_checked={}", rep.subsets_checked);
                println!("worst_condition={:e}", rep.worst_condition);
                println!("worst_positions={:?}", rep.worst_positions);
            }
        }
        Command::Witness {
            path,
            epsilon,
            json,
        } => {
            let g = load_generator(&path)?;
            let w = small_weight_witness(&g, epsilon)?;
            if json {
                emit_json(&w, stdout.lock())?;
            } else {
                let u: Vec<String> = w.source.iter().map(|z| format_complex(*z)).collect();
                println!("u=[{}]", u.join(", "));
                println!("weight={:e}", w.weight);
                println!("epsilon={:e}", w.epsilon);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Usage => 1,
                ErrorClass::Numeric => 2,
                ErrorClass::Io => 3,
            })
        }
    }
}
