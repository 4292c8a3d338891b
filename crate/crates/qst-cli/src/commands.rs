//! Subcommand implementations. Every command resolves its options against
//! the config file, computes with `qst_core`, and writes one deterministic
//! artifact (CSV or JSON) to the configured sink.

use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qst_core::amplitudes;
use qst_core::analysis::{self, SweepPoint};
use qst_core::chain::{build_chain, ChainSpec, ProtocolConfig, ProtocolKind};
use qst_core::ed_oracle;
use qst_core::fidelity::{self, TransferSetup};
use qst_core::spectral::{self, Parity};

use crate::config::{
    parse_f64, parse_f64_list, parse_u64, parse_usize, parse_usize_list, resolve, resolve_str,
    ConfigMap,
};
use crate::output::{num, opt_num, Csv, Sink};
use crate::{core_err, CliError};

pub fn parse_protocol(s: &str) -> Result<ProtocolKind, String> {
    match s {
        "uniform" => Ok(ProtocolKind::Uniform),
        "weak-edge-1q" => Ok(ProtocolKind::WeakEdge1Q),
        "barrier-edge-1q" => Ok(ProtocolKind::BarrierEdge1Q),
        "barrier-nn-1q" => Ok(ProtocolKind::BarrierNN1Q),
        "weak-block-2q" => Ok(ProtocolKind::WeakBlock2Q),
        "barrier-block-2q" => Ok(ProtocolKind::BarrierBlock2Q),
        other => Err(format!(
            "unknown protocol '{other}' (expected uniform, weak-edge-1q, barrier-edge-1q, \
             barrier-nn-1q, weak-block-2q or barrier-block-2q)"
        )),
    }
}

fn build(kind: ProtocolKind, n: usize, xi: f64) -> Result<ChainSpec, CliError> {
    build_chain(&ProtocolConfig { kind, perturbation: xi, n_sites: n }).map_err(core_err)
}

fn default_setup(kind: ProtocolKind, n: usize) -> Result<TransferSetup, CliError> {
    match kind.qubits() {
        2 => TransferSetup::default_2q(n).map_err(core_err),
        _ => TransferSetup::default_1q(n).map_err(core_err),
    }
}

// ---------------------------------------------------------------------------
// spectrum

#[derive(Serialize)]
struct DegenerateSetReport {
    energy: f64,
    multiplicity: usize,
}

#[derive(Serialize)]
struct ClassReport {
    protocol: &'static str,
    n_sites: usize,
    xi: f64,
    parity: &'static str,
    residue_class: &'static str,
    has_zero_mode: bool,
    degenerate_sets: Vec<DegenerateSetReport>,
}

pub struct SpectrumArgs {
    pub protocol: Option<ProtocolKind>,
    pub n: Option<usize>,
    pub xi: Option<f64>,
}

/// Eigenvalues with edge/block localization weights, plus the spectral-class
/// report as JSON. The CSV goes to the sink; the JSON goes to stdout when the
/// sink is a file, to stderr otherwise (so the CSV stream stays parseable).
pub fn cmd_spectrum(args: SpectrumArgs, cfg: &ConfigMap, sink: &Sink) -> Result<u8, CliError> {
    let kind = resolve(args.protocol, cfg, "protocol", parse_protocol, None)?;
    let n = resolve(args.n, cfg, "n", parse_usize, None)?;
    let xi = resolve(args.xi, cfg, "xi", parse_f64, Some(0.0))?;

    let chain = build(kind, n, xi)?;
    let decomp = spectral::diagonalize(&chain).map_err(core_err)?;
    let block: Vec<usize> = match kind.qubits() {
        2 => vec![1, 2, n - 1, n],
        _ => vec![1, n],
    };

    let mut csv = Csv::new(&["k", "eigenvalue", "weight_site1", "weight_siteN", "weight_block"]);
    for k in 1..=n {
        let w1 = spectral::localization_weight(&decomp, &[1], k).map_err(core_err)?;
        let wn = spectral::localization_weight(&decomp, &[n], k).map_err(core_err)?;
        let wb = spectral::localization_weight(&decomp, &block, k).map_err(core_err)?;
        csv.row(&[k.to_string(), num(decomp.eigenvalue(k)), num(w1), num(wn), num(wb)]);
    }
    sink.write(&csv.finish())?;

    let class = spectral::classify_spectrum(&decomp, n);
    let report = ClassReport {
        protocol: kind.name(),
        n_sites: n,
        xi,
        parity: match class.parity {
            Parity::Even => "even",
            Parity::Odd => "odd",
        },
        residue_class: class.residue_class.name(),
        has_zero_mode: class.has_zero_mode,
        degenerate_sets: class
            .degenerate_sets
            .iter()
            .map(|&(energy, multiplicity)| DegenerateSetReport { energy, multiplicity })
            .collect(),
    };
    let json =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::numerical(e.to_string()))?;
    if sink.is_file() {
        println!("{json}");
    } else {
        eprintln!("{json}");
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// evolve

pub struct EvolveArgs {
    pub protocol: Option<ProtocolKind>,
    pub n: Option<usize>,
    pub xi: Option<f64>,
    pub t_max: Option<f64>,
    pub t_step: Option<f64>,
    pub senders: Option<String>,
    pub receivers: Option<String>,
}

/// Average-fidelity trace on a uniform time grid with amplitude diagnostics.
pub fn cmd_evolve(args: EvolveArgs, cfg: &ConfigMap, sink: &Sink) -> Result<u8, CliError> {
    let kind = resolve(args.protocol, cfg, "protocol", parse_protocol, None)?;
    let n = resolve(args.n, cfg, "n", parse_usize, None)?;
    let xi = resolve(args.xi, cfg, "xi", parse_f64, Some(0.0))?;
    let senders =
        resolve_str(args.senders.as_deref(), cfg, "senders", parse_usize_list, Some(Vec::new()))?;
    let receivers = resolve_str(
        args.receivers.as_deref(),
        cfg,
        "receivers",
        parse_usize_list,
        Some(Vec::new()),
    )?;

    let chain = build(kind, n, xi)?;
    let decomp = spectral::diagonalize(&chain).map_err(core_err)?;
    let setup = if senders.is_empty() && receivers.is_empty() {
        default_setup(kind, n)?
    } else {
        TransferSetup::new(senders, receivers, n).map_err(core_err)?
    };

    let default_step = core::f64::consts::PI / (10.0 * decomp.max_abs_eigenvalue().max(1e-12));
    let t_step = resolve(args.t_step, cfg, "t-step", parse_f64, Some(default_step))?;
    let default_max = analysis::default_t_max(&decomp, setup.qubits());
    let t_max = resolve(args.t_max, cfg, "t-max", parse_f64, Some(default_max))?;
    if !t_step.is_finite() || t_step <= 0.0 {
        return Err(CliError::usage(format!("t-step must be positive, got {t_step}")));
    }

    let mut times = vec![0.0];
    let mut t = t_step;
    while t <= t_max {
        times.push(t);
        t += t_step;
    }

    let trace = fidelity::fidelity_trace(&decomp, &setup, &times).map_err(core_err)?;
    let mut csv = Csv::new(&["time", "fbar", "re_f_s1r1", "abs_f_s1r1", "abs_g"]);
    for i in 0..trace.times.len() {
        let d = trace.diagnostics[i];
        csv.row(&[
            num(trace.times[i]),
            num(trace.fbar[i]),
            num(d.re_f_s1r1),
            num(d.abs_f_s1r1),
            opt_num(d.abs_g),
        ]);
    }
    sink.write(&csv.finish())?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// sweep / fit

pub struct SweepArgs {
    pub protocol: Option<ProtocolKind>,
    pub n_list: Option<String>,
    pub xi_list: Option<String>,
    pub threshold: Option<f64>,
}

struct ResolvedSweep {
    kind: ProtocolKind,
    n_list: Vec<usize>,
    xi_list: Vec<f64>,
    threshold: f64,
}

fn resolve_sweep(args: SweepArgs, cfg: &ConfigMap) -> Result<ResolvedSweep, CliError> {
    Ok(ResolvedSweep {
        kind: resolve(args.protocol, cfg, "protocol", parse_protocol, None)?,
        n_list: resolve_str(args.n_list.as_deref(), cfg, "n-list", parse_usize_list, None)?,
        xi_list: resolve_str(args.xi_list.as_deref(), cfg, "xi-list", parse_f64_list, None)?,
        threshold: resolve(
            args.threshold,
            cfg,
            "threshold",
            parse_f64,
            Some(analysis::DEFAULT_THRESHOLD),
        )?,
    })
}

/// Run the (N, xi) grid across `jobs` worker threads. Points are assigned by
/// index stride and merged back in key order, so the output never depends on
/// scheduling.
fn run_sweep_grid(rs: &ResolvedSweep, jobs: usize) -> Result<Vec<SweepPoint>, CliError> {
    let grid: Vec<(usize, f64)> =
        rs.n_list.iter().flat_map(|&n| rs.xi_list.iter().map(move |&xi| (n, xi))).collect();
    let jobs = jobs.max(1).min(grid.len().max(1));
    let slots: Mutex<Vec<Option<Result<SweepPoint, qst_core::Error>>>> =
        Mutex::new(vec![None; grid.len()]);

    std::thread::scope(|scope| {
        for worker in 0..jobs {
            let grid = &grid;
            let slots = &slots;
            let rs = &*rs;
            scope.spawn(move || {
                for idx in (worker..grid.len()).step_by(jobs) {
                    let (n, xi) = grid[idx];
                    let res = analysis::sweep_point(rs.kind, n, xi, rs.threshold);
                    slots.lock().unwrap()[idx] = Some(res);
                }
            });
        }
    });

    let mut out = Vec::with_capacity(grid.len());
    for slot in slots.into_inner().unwrap() {
        out.push(slot.expect("all grid points evaluated").map_err(core_err)?);
    }
    Ok(out)
}

pub fn cmd_sweep(
    args: SweepArgs,
    cfg: &ConfigMap,
    jobs: usize,
    sink: &Sink,
) -> Result<u8, CliError> {
    let rs = resolve_sweep(args, cfg)?;
    let points = run_sweep_grid(&rs, jobs)?;
    let mut csv = Csv::new(&[
        "protocol",
        "N",
        "xi",
        "threshold",
        "tau",
        "fbar_at_tau",
        "delta_omega",
        "tau_predicted",
        "reached",
    ]);
    for p in &points {
        csv.row(&[
            p.kind.name().to_string(),
            p.n_sites.to_string(),
            num(p.xi),
            num(p.result.threshold),
            opt_num(p.result.tau),
            opt_num(p.result.fbar_at_tau),
            opt_num(p.result.rabi_gap),
            opt_num(p.result.tau_predicted),
            p.result.reached.to_string(),
        ]);
    }
    sink.write(&csv.finish())?;
    Ok(0)
}

#[derive(Serialize)]
struct FitReport {
    exponent: f64,
    prefactor: f64,
    r_squared: f64,
    n_samples: usize,
    n_excluded: usize,
}

pub struct FitArgs {
    pub sweep: SweepArgs,
    pub vs: Option<String>,
}

/// Sweep then fit `tau` against the chosen variable on log-log axes.
pub fn cmd_fit(args: FitArgs, cfg: &ConfigMap, jobs: usize, sink: &Sink) -> Result<u8, CliError> {
    let vs = resolve(args.vs, cfg, "vs", |s| Ok(s.to_string()), Some("xi".to_string()))?;
    let rs = resolve_sweep(args.sweep, cfg)?;
    let points = run_sweep_grid(&rs, jobs)?;
    let fit = match vs.as_str() {
        "xi" => analysis::fit_sweep(&points, |p| p.xi),
        "n" => analysis::fit_sweep(&points, |p| p.n_sites as f64),
        other => {
            return Err(CliError::usage(format!("--vs must be 'xi' or 'n', got '{other}'")));
        }
    }
    .map_err(core_err)?;
    let report = FitReport {
        exponent: fit.exponent,
        prefactor: fit.prefactor,
        r_squared: fit.r_squared,
        n_samples: fit.samples.len(),
        n_excluded: fit.n_excluded,
    };
    let mut json =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::numerical(e.to_string()))?;
    json.push('\n');
    sink.write(&json)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify

pub struct VerifyArgs {
    pub n_max: Option<usize>,
    pub times: Option<usize>,
    pub seed: Option<u64>,
}

const VERIFY_TOLERANCE: f64 = 1e-8;

/// Cross-check the spectral fast path against the spin-basis sector ED
/// oracle on small chains at random times. Exit code 1 when any deviation
/// exceeds 1e-8.
pub fn cmd_verify(args: VerifyArgs, cfg: &ConfigMap, sink: &Sink) -> Result<u8, CliError> {
    let n_max = resolve(args.n_max, cfg, "n-max", parse_usize, Some(10))?;
    let n_times = resolve(args.times, cfg, "times", parse_usize, Some(20))?;
    let seed = resolve(args.seed, cfg, "seed", parse_u64, Some(7))?;
    if n_max > ed_oracle::SIZE_CAP {
        return Err(CliError::usage(format!(
            "n-max {n_max} exceeds the oracle size cap {}",
            ed_oracle::SIZE_CAP
        )));
    }

    let kinds: &[(ProtocolKind, f64)] = &[
        (ProtocolKind::Uniform, 0.0),
        (ProtocolKind::WeakEdge1Q, 0.1),
        (ProtocolKind::BarrierEdge1Q, 5.0),
        (ProtocolKind::BarrierNN1Q, 5.0),
        (ProtocolKind::WeakBlock2Q, 0.1),
        (ProtocolKind::BarrierBlock2Q, 5.0),
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = String::new();
    let mut worst_amp: f64 = 0.0;
    let mut worst_fid: f64 = 0.0;
    for n in 4..=n_max {
        for &(kind, xi) in kinds {
            let chain = build(kind, n, xi)?;
            let decomp = spectral::diagonalize(&chain).map_err(core_err)?;
            let setup = TransferSetup::default_2q(n).map_err(core_err)?;
            let mut amp_dev: f64 = 0.0;
            let mut fid_dev: f64 = 0.0;
            for _ in 0..n_times {
                let t = rng.gen::<f64>() * 500.0;
                amp_dev =
                    amp_dev.max(ed_oracle::max_deviation(&chain, &decomp, t).map_err(core_err)?);
                let m = amplitudes::amplitude_matrix(&decomp, t);
                let fast = fidelity::fidelity_2q_exact(&m, &setup).map_err(core_err)?;
                let oracle = ed_oracle::fidelity_2q(&chain, &setup, t).map_err(core_err)?;
                fid_dev = fid_dev.max((fast - oracle).abs());
            }
            report.push_str(&format!(
                "protocol={} n={n} amplitude_deviation={} fidelity_deviation={}\n",
                kind.name(),
                num(amp_dev),
                num(fid_dev)
            ));
            worst_amp = worst_amp.max(amp_dev);
            worst_fid = worst_fid.max(fid_dev);
        }
    }
    let ok = worst_amp <= VERIFY_TOLERANCE && worst_fid <= VERIFY_TOLERANCE;
    report.push_str(&format!(
        "max_amplitude_deviation={} max_fidelity_deviation={} status={}\n",
        num(worst_amp),
        num(worst_fid),
        if ok { "ok" } else { "fail" }
    ));
    sink.write(&report)?;
    Ok(if ok { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_names_round_trip() {
        for kind in [
            ProtocolKind::Uniform,
            ProtocolKind::WeakEdge1Q,
            ProtocolKind::BarrierEdge1Q,
            ProtocolKind::BarrierNN1Q,
            ProtocolKind::WeakBlock2Q,
            ProtocolKind::BarrierBlock2Q,
        ] {
            assert_eq!(parse_protocol(kind.name()).unwrap(), kind);
        }
        assert!(parse_protocol("xy-model").is_err());
    }
}
