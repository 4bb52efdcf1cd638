use std::error::Error;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phasesynth::{
    steiner_gauss, synthesize_with, Architecture, BitMatrix, Circuit, LowestIndex, PhasePolynomial,
    VERIFY_TOLERANCE,
};
use phasesynth_bench::plot::emit_plots;
use phasesynth_bench::{
    run_gadget_scaling, run_qubit_scaling, BenchReport, GadgetScalingConfig, QubitScalingConfig,
};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(
    name = "phasesynth",
    version,
    about = "Connectivity-aware phase polynomial synthesis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesise a phase polynomial file into OpenQASM.
    Synth {
        /// Catalog name (line_N, square_N, aspen_16, ...) or TOML file.
        #[arg(long)]
        arch: String,
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print every step and the live parity matrix to standard error.
        #[arg(long)]
        trace: bool,
    },
    /// Synthesise a CX circuit for an invertible GF(2) matrix.
    SynthLinear {
        #[arg(long)]
        arch: String,
        /// One row of bits per line.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a random phase polynomial.
    Random {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        gadgets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the phase polynomial of an OpenQASM circuit.
    Extract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a circuit against a phase polynomial and an architecture.
    Verify {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        qasm: PathBuf,
        #[arg(long)]
        arch: String,
        #[arg(long, default_value_t = VERIFY_TOLERANCE)]
        tolerance: f64,
    },
    /// Run benchmark experiments.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Draw SVG charts from a summary CSV.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Vary the number of gadgets on fixed architectures.
    GadgetScaling {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "line_36,square_36,complete_36"
        )]
        archs: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10,50,100,500,1000")]
        gadgets: Vec<usize>,
        #[command(flatten)]
        common: BenchArgs,
    },
    /// Vary the number of qubits at a fixed gadget count.
    QubitScaling {
        #[arg(long, value_delimiter = ',', default_value = "line,square,complete")]
        families: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "4,9,16,25,36,49,64")]
        qubits: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        gadgets: usize,
        #[command(flatten)]
        common: BenchArgs,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    /// Leave the runtime column empty so output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
    /// Also write SVG charts next to the CSV files.
    #[arg(long)]
    plots: bool,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_matrix(text: &str) -> Result<BitMatrix> {
    let rows: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect();
    Ok(BitMatrix::parse_rows(&rows)?)
}

fn report_bench(report: &BenchReport, out: &Path, plots: bool) -> Result<bool> {
    for notice in &report.notices {
        eprintln!("notice: {notice}");
    }
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    for f in &report.failures {
        eprintln!(
            "FAILED {} with {} gadgets, instance {}: {} (reproducer: {})",
            f.arch,
            f.gadgets,
            f.instance,
            f.detail,
            f.reproducer.display()
        );
    }
    eprintln!(
        "{} records, {} cells -> {}, {}",
        report.records.len(),
        report.summaries.len(),
        report.records_csv.display(),
        report.summary_csv.display()
    );
    if plots && !report.summaries.is_empty() {
        for path in emit_plots(&report.summary_csv, out)? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(report.failures.is_empty())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Synth {
            arch,
            input,
            out,
            trace,
        } => {
            let g = Architecture::resolve(&arch)?;
            let p = PhasePolynomial::parse(&read(&input)?)?;
            let s = synthesize_with(&p, &g, &mut LowestIndex, trace)?;
            for event in &s.trace {
                eprintln!("{}\n{}\n", event.action, event.matrix);
            }
            emit(out.as_deref(), &s.circuit.to_qasm())?;
            eprintln!(
                "{} gates, {} CX ({} in post-processing), CX depth {}",
                s.circuit.len(),
                s.circuit.cx_count(),
                s.post_circuit.cx_count(),
                s.circuit.cx_depth()
            );
        }
        Command::SynthLinear { arch, matrix, out } => {
            let g = Architecture::resolve(&arch)?;
            let m = parse_matrix(&read(&matrix)?)?;
            let c = steiner_gauss(&m, &g)?;
            emit(out.as_deref(), &c.to_qasm())?;
            eprintln!("{} CX, CX depth {}", c.cx_count(), c.cx_depth());
        }
        Command::Random {
            qubits,
            gadgets,
            seed,
            out,
        } => {
            let p = PhasePolynomial::random(qubits, gadgets, seed)?;
            emit(out.as_deref(), &p.render())?;
        }
        Command::Extract { input, out } => {
            let c = Circuit::from_qasm(&read(&input)?)?;
            emit(out.as_deref(), &c.extract_phase_polynomial().render())?;
        }
        Command::Verify {
            poly,
            qasm,
            arch,
            tolerance,
        } => {
            let g = Architecture::resolve(&arch)?;
            let p = PhasePolynomial::parse(&read(&poly)?)?;
            let c = Circuit::from_qasm(&read(&qasm)?)?;
            return Ok(match c.verify(&p, &g, tolerance) {
                Ok(()) => {
                    println!("PASS");
                    true
                }
                Err(violation) => {
                    println!("FAIL: {violation}");
                    false
                }
            });
        }
        Command::Bench(BenchCommand::GadgetScaling {
            archs,
            gadgets,
            common,
        }) => {
            let cfg = GadgetScalingConfig {
                archs,
                gadgets,
                instances: common.instances,
                seed: common.seed,
                out_dir: common.out.clone(),
                timing: !common.no_timing,
            };
            return report_bench(&run_gadget_scaling(&cfg)?, &common.out, common.plots);
        }
        Command::Bench(BenchCommand::QubitScaling {
            families,
            qubits,
            gadgets,
            common,
        }) => {
            let cfg = QubitScalingConfig {
                families,
                qubits,
                gadgets,
                instances: common.instances,
                seed: common.seed,
                out_dir: common.out.clone(),
                timing: !common.no_timing,
            };
            return report_bench(&run_qubit_scaling(&cfg)?, &common.out, common.plots);
        }
        Command::Plot { csv, out } => {
            for path in emit_plots(&csv, &out)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
