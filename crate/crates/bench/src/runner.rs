//! Experiment runners.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use phasesynth::{synthesize, Architecture, Circuit, PhasePolynomial, VERIFY_TOLERANCE};
use rayon::prelude::*;

use crate::report::{write_csv, BenchRecord, CellSummary};
use crate::{io_error, BenchError, DEFAULT_ARCHS, DEFAULT_GADGETS};

#[derive(Debug, Clone)]
pub struct GadgetScalingConfig {
    /// Catalog names or architecture file paths.
    pub archs: Vec<String>,
    pub gadgets: Vec<usize>,
    pub instances: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// When false the `runtime_s` column is left empty, which makes the
    /// output byte-for-byte reproducible.
    pub timing: bool,
}

impl Default for GadgetScalingConfig {
    fn default() -> Self {
        GadgetScalingConfig {
            archs: DEFAULT_ARCHS.iter().map(|s| s.to_string()).collect(),
            gadgets: DEFAULT_GADGETS.to_vec(),
            instances: 20,
            seed: 0,
            out_dir: PathBuf::from("bench-out"),
            timing: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QubitScalingConfig {
    /// Families understood by the catalog: `line`, `cycle`, `square`,
    /// `complete`.
    pub families: Vec<String>,
    pub qubits: Vec<usize>,
    pub gadgets: usize,
    pub instances: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub timing: bool,
}

impl Default for QubitScalingConfig {
    fn default() -> Self {
        QubitScalingConfig {
            families: ["line", "square", "complete"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            qubits: vec![4, 9, 16, 25, 36, 49, 64],
            gadgets: 100,
            instances: 20,
            seed: 0,
            out_dir: PathBuf::from("bench-out"),
            timing: true,
        }
    }
}

/// A cell that was aborted because one of its instances failed.
#[derive(Debug, Clone)]
pub struct CellFailure {
    pub arch: String,
    pub gadgets: usize,
    pub instance: usize,
    pub seed: u64,
    pub detail: String,
    pub reproducer: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summaries: Vec<CellSummary>,
    pub failures: Vec<CellFailure>,
    /// Cells skipped because they cannot be generated.
    pub notices: Vec<String>,
    /// Soft trend checks that did not hold.
    pub warnings: Vec<String>,
    pub records_csv: PathBuf,
    pub summary_csv: PathBuf,
}

/// Seed of one instance, derived from the run seed and the cell
/// coordinates (FNV-1a, then a SplitMix64 finaliser).
pub fn instance_seed(seed: u64, arch: &str, gadgets: usize, instance: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let bytes = seed
        .to_le_bytes()
        .into_iter()
        .chain(arch.bytes())
        .chain([0xff])
        .chain((gadgets as u64).to_le_bytes())
        .chain((instance as u64).to_le_bytes());
    for b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// Generates, synthesises and verifies one instance.
pub fn run_instance(
    g: &Architecture,
    gadgets: usize,
    instance: usize,
    seed: u64,
    timing: bool,
) -> Result<(BenchRecord, Circuit), String> {
    let p = PhasePolynomial::random(g.n_qubits(), gadgets, seed).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let circuit = synthesize(&p, g).map_err(|e| format!("synthesis failed: {e}"))?;
    let elapsed = start.elapsed().as_secs_f64();
    circuit
        .verify(&p, g, VERIFY_TOLERANCE)
        .map_err(|v| format!("verification failed: {v}"))?;
    let record = BenchRecord {
        arch: g.name().to_string(),
        gadgets,
        instance,
        cx_count: circuit.cx_count(),
        cx_depth: circuit.cx_depth(),
        runtime_s: timing.then_some(elapsed),
        verified: true,
    };
    Ok((record, circuit))
}

fn run_cell(
    g: &Architecture,
    gadgets: usize,
    instances: usize,
    seed: u64,
    timing: bool,
    out_dir: &Path,
) -> Result<Result<Vec<BenchRecord>, CellFailure>, BenchError> {
    let outcomes: Vec<Result<BenchRecord, String>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let s = instance_seed(seed, g.name(), gadgets, i);
            run_instance(g, gadgets, i, s, timing).map(|(r, _)| r)
        })
        .collect();
    let mut records = Vec::with_capacity(instances);
    for (instance, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => records.push(r),
            Err(detail) => {
                let s = instance_seed(seed, g.name(), gadgets, instance);
                let reproducer = write_reproducer(out_dir, g, gadgets, instance, s, &detail)?;
                return Ok(Err(CellFailure {
                    arch: g.name().to_string(),
                    gadgets,
                    instance,
                    seed: s,
                    detail,
                    reproducer,
                }));
            }
        }
    }
    Ok(Ok(records))
}

fn write_reproducer(
    out_dir: &Path,
    g: &Architecture,
    gadgets: usize,
    instance: usize,
    seed: u64,
    detail: &str,
) -> Result<PathBuf, BenchError> {
    let dir = out_dir.join("reproducers");
    fs::create_dir_all(&dir).map_err(io_error(&dir))?;
    let safe: String = g
        .name()
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect();
    let path = dir.join(format!("{safe}_k{gadgets}_i{instance}.txt"));
    let poly = PhasePolynomial::random(g.n_qubits(), gadgets, seed)
        .map(|p| p.render())
        .unwrap_or_default();
    let mut text = format!(
        "# arch {}\n# gadgets {gadgets}\n# instance {instance}\n# seed {seed}\n# {}\n",
        g.name(),
        detail.replace('\n', "\n# ")
    );
    text.push_str(&poly);
    fs::write(&path, text).map_err(io_error(&path))?;
    Ok(path)
}

fn validate(instances: usize, gadgets: &[usize]) -> Result<(), BenchError> {
    if instances == 0 {
        return Err(BenchError::Config("instances must be at least 1".into()));
    }
    if gadgets.is_empty() || gadgets.contains(&0) {
        return Err(BenchError::Config("gadget counts must be positive".into()));
    }
    Ok(())
}

fn fits(n: usize, gadgets: usize) -> bool {
    n >= 64 || (gadgets as u128) < (1u128 << n)
}

/// Every `(arch, gadgets)` cell, in configuration order. Writes
/// `gadget_scaling.csv` and `gadget_scaling_summary.csv` to the output
/// directory.
pub fn run_gadget_scaling(cfg: &GadgetScalingConfig) -> Result<BenchReport, BenchError> {
    validate(cfg.instances, &cfg.gadgets)?;
    if cfg.archs.is_empty() {
        return Err(BenchError::Config("no architectures given".into()));
    }
    let archs = cfg
        .archs
        .iter()
        .map(|a| Architecture::resolve(a))
        .collect::<Result<Vec<_>, _>>()?;
    fs::create_dir_all(&cfg.out_dir).map_err(io_error(&cfg.out_dir))?;

    let mut report = BenchReport::default();
    for g in &archs {
        for &k in &cfg.gadgets {
            if !fits(g.n_qubits(), k) {
                report.notices.push(format!(
                    "skipping {} with {k} gadgets: only {} nonzero parities exist",
                    g.name(),
                    (1u128 << g.n_qubits()) - 1
                ));
                continue;
            }
            match run_cell(g, k, cfg.instances, cfg.seed, cfg.timing, &cfg.out_dir)? {
                Ok(records) => {
                    report
                        .summaries
                        .extend(CellSummary::from_records(g.n_qubits(), &records));
                    report.records.extend(records);
                }
                Err(failure) => report.failures.push(failure),
            }
        }
    }
    finish(report, &cfg.out_dir, "gadget_scaling")
}

/// Every `(family, qubits)` cell at a fixed gadget count. Writes
/// `qubit_scaling.csv` and `qubit_scaling_summary.csv`, and warns when the
/// mean CX count of a family drops as the qubit count grows.
pub fn run_qubit_scaling(cfg: &QubitScalingConfig) -> Result<BenchReport, BenchError> {
    validate(cfg.instances, &[cfg.gadgets])?;
    if cfg.families.is_empty() || cfg.qubits.is_empty() {
        return Err(BenchError::Config(
            "no families or qubit counts given".into(),
        ));
    }
    fs::create_dir_all(&cfg.out_dir).map_err(io_error(&cfg.out_dir))?;
    let mut qubits = cfg.qubits.clone();
    qubits.sort_unstable();
    qubits.dedup();

    let mut report = BenchReport::default();
    for family in &cfg.families {
        let mut previous: Option<(usize, f64)> = None;
        for &n in &qubits {
            let name = format!("{family}_{n}");
            let g = match Architecture::from_catalog(&name) {
                Ok(g) => g,
                Err(phasesynth::ArchError::UnknownName(_)) => {
                    report
                        .notices
                        .push(format!("skipping {name}: no such architecture"));
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            if !fits(n, cfg.gadgets) {
                report.notices.push(format!(
                    "skipping {name}: {} gadgets exceed the {} nonzero parities",
                    cfg.gadgets,
                    (1u128 << n) - 1
                ));
                continue;
            }
            match run_cell(
                &g,
                cfg.gadgets,
                cfg.instances,
                cfg.seed,
                cfg.timing,
                &cfg.out_dir,
            )? {
                Ok(records) => {
                    if let Some(summary) = CellSummary::from_records(n, &records) {
                        if let Some((prev_n, prev_cx)) = previous {
                            if summary.cx_count < prev_cx {
                                report.warnings.push(format!(
                                    "{family}: mean CX count fell from {prev_cx:.2} at {prev_n} qubits to {:.2} at {n}",
                                    summary.cx_count
                                ));
                            }
                        }
                        previous = Some((n, summary.cx_count));
                        report.summaries.push(summary);
                    }
                    report.records.extend(records);
                }
                Err(failure) => report.failures.push(failure),
            }
        }
    }
    finish(report, &cfg.out_dir, "qubit_scaling")
}

fn finish(mut report: BenchReport, out_dir: &Path, stem: &str) -> Result<BenchReport, BenchError> {
    report.records_csv = out_dir.join(format!("{stem}.csv"));
    report.summary_csv = out_dir.join(format!("{stem}_summary.csv"));
    write_csv(&report.records_csv, &report.records)?;
    write_csv(&report.summary_csv, &report.summaries)?;
    Ok(report)
}
