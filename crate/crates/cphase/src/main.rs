//! Command-line interface: gate-fidelity evaluations, parameter scans,
//! optimized curves, figure data sets and the rational-timing tables.
//!
//! All rates are dimensionless (units of g). Exit codes: 0 on success, 1 on
//! usage errors, 2 on numerical failures.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cphase::error::Error;
use cphase::figures::{figure, FigureId};
use cphase::lossy;
use cphase::mscheme;
use cphase::params::{FidelityReport, SystemParams, DEFAULT_DT};
use cphase::rational;
use cphase::scan::{
    grid_scan, optimize_vs_gamma, Axis, GateObjective, OptimizeScheme, OptimizeSettings, ScanSpec,
};
use cphase::table::{fmt_f64, OutputFormat, Table};
use cphase::two_level;
use cphase::vatom;

#[derive(Parser)]
#[command(
    name = "cphase",
    version,
    about = "Conditional-phase gate fidelities for photons in a cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    /// Single V-type three-level atom.
    V,
    /// Single two-level atom, dual-rail encoding.
    TwoLevel,
    /// Two V-type atoms decaying collectively.
    TwoAtom,
    /// Five-level M-scheme with classical drives.
    FiveLevel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

/// lo:hi:steps axis syntax.
#[derive(Clone, Copy, Debug)]
struct RangeSpec {
    lo: f64,
    hi: f64,
    steps: usize,
}

impl FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lo:hi:steps, got `{s}`"));
        }
        let lo: f64 = parts[0].parse().map_err(|e| format!("bad lo: {e}"))?;
        let hi: f64 = parts[1].parse().map_err(|e| format!("bad hi: {e}"))?;
        let steps: usize = parts[2].parse().map_err(|e| format!("bad steps: {e}"))?;
        Ok(RangeSpec { lo, hi, steps })
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result table to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// File format for --out.
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the gate fidelity at one parameter point.
    Fidelity {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Detuning δ/g.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Amplitude decay rate γ/g.
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Classical drive Ω/g (five-level only).
        #[arg(long, default_value_t = 0.0)]
        omega: f64,
        /// Interaction time gT.
        #[arg(long = "gT", visible_alias = "gt")]
        g_t: f64,
        /// Atom count; inferred from the scheme when omitted.
        #[arg(long)]
        n_atoms: Option<u32>,
        /// Integrator step (units of 1/g).
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        /// Report the conditional fidelity as the headline value.
        #[arg(long)]
        conditional: bool,
        /// Cross-check with a Monte-Carlo state average of this many samples
        /// (lossless V scheme only).
        #[arg(long)]
        monte_carlo: Option<usize>,
        /// Seed for the Monte-Carlo average.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dense fidelity grid over (gT, δ/g).
    Scan {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// gT axis as lo:hi:steps.
        #[arg(long = "gT", visible_alias = "gt")]
        g_t: RangeSpec,
        /// δ/g axis as lo:hi:steps.
        #[arg(long)]
        delta: RangeSpec,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        omega: f64,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimize the fidelity over (gT, δ/g) for each loss rate.
    Optimize {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// γ/g grid as lo:hi:steps.
        #[arg(long)]
        gamma: RangeSpec,
        #[arg(long, default_value_t = 20.0)]
        gt_max: f64,
        #[arg(long, default_value_t = 2.0)]
        delta_max: f64,
        /// Ω/g grid as lo:hi:steps (five-level only; default fixed Ω = 0).
        #[arg(long)]
        omega_grid: Option<RangeSpec>,
        /// Coarse-grid spacing along gT.
        #[arg(long, default_value_t = 0.05)]
        gt_step: f64,
        /// Coarse-grid spacing along δ/g.
        #[arg(long, default_value_t = 0.01)]
        delta_step: f64,
        /// Integrator step for the coarse scan.
        #[arg(long, default_value_t = 5e-3)]
        scan_dt: f64,
        /// Integrator step for refinement.
        #[arg(long, default_value_t = 1e-3)]
        refine_dt: f64,
        /// Report the best grid cell without coordinate descent.
        #[arg(long)]
        no_refine: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Emit the data behind one of the reproduced figures.
    Figure {
        /// fig2 | fig3 | fig4 | fig6 | fig7
        id: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Continued-fraction convergents of √D.
    Convergents {
        /// The integer D under the square root.
        #[arg(long)]
        surd: u64,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Integer triples (n, m, q) with 2n² ≈ m² + q² and their operating points.
    Triples {
        #[arg(long)]
        max_n: u64,
        /// Keep only the best-ranked entries.
        #[arg(long)]
        top: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NonFinite { .. }
        | Error::Physicality { .. }
        | Error::PhaseFloor
        | Error::Evaluation { .. } => 2,
        _ => 1,
    }
}

fn emit(table: &Table, output: &OutputArgs, meta: &Value) -> cphase::Result<()> {
    match &output.out {
        Some(path) => {
            table.write(path, output.format.into(), meta)?;
            println!("wrote {} rows to {}", table.rows.len(), path.display());
        }
        None => {
            print!("{}", table.to_csv());
        }
    }
    Ok(())
}

fn report_table(report: &FidelityReport) -> Table {
    let mut t = Table::new(vec![
        "f_uncond",
        "f_cond",
        "phi1",
        "phi2",
        "nonlinear_phase",
        "nonlinear_defined",
        "prob_g1",
        "prob_g2",
        "loss_prob",
    ]);
    t.push(vec![
        report.f_uncond,
        report.f_cond,
        report.phi1,
        report.phi2,
        report.nonlinear_phase.unwrap_or(0.0),
        if report.nonlinear_phase.is_some() {
            1.0
        } else {
            0.0
        },
        report.prob_g1,
        report.prob_g2,
        report.loss_prob,
    ]);
    t
}

fn print_report(report: &FidelityReport, conditional: bool) {
    let headline = if conditional {
        ("F_cond", report.f_cond)
    } else {
        ("F", report.f_uncond)
    };
    println!("{} = {}", headline.0, fmt_f64(headline.1));
    println!("f_uncond        = {}", fmt_f64(report.f_uncond));
    println!("f_cond          = {}", fmt_f64(report.f_cond));
    println!("phi1            = {}", fmt_f64(report.phi1));
    println!("phi2            = {}", fmt_f64(report.phi2));
    match report.nonlinear_phase {
        Some(phi) => println!("nonlinear_phase = {}", fmt_f64(phi)),
        None => {
            println!("nonlinear_phase = undefined");
            eprintln!("warning: ground amplitude below the phase floor; phases are unreliable");
        }
    }
    println!("prob_g1         = {}", fmt_f64(report.prob_g1));
    println!("prob_g2         = {}", fmt_f64(report.prob_g2));
    println!("loss_prob       = {}", fmt_f64(report.loss_prob));
}

fn scheme_atoms(scheme: SchemeArg, n_atoms: Option<u32>) -> cphase::Result<u32> {
    let implied = match scheme {
        SchemeArg::TwoAtom => 2,
        _ => 1,
    };
    match n_atoms {
        None => Ok(implied),
        Some(n) if n == implied => Ok(n),
        Some(n) => Err(Error::InvalidParams(format!(
            "--n-atoms {n} conflicts with the selected scheme (expects {implied})"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_fidelity(
    scheme: SchemeArg,
    delta: f64,
    gamma: f64,
    omega: f64,
    g_t: f64,
    n_atoms: Option<u32>,
    dt: f64,
    conditional: bool,
    monte_carlo: Option<usize>,
    seed: u64,
    output: &OutputArgs,
) -> cphase::Result<()> {
    let n = scheme_atoms(scheme, n_atoms)?;
    if omega != 0.0 && scheme != SchemeArg::FiveLevel {
        return Err(Error::InvalidParams(
            "--omega only applies to the five-level scheme".into(),
        ));
    }
    let params = SystemParams::in_units_of_g(delta, gamma, omega, n, g_t)?;
    let report = match scheme {
        SchemeArg::V => {
            if gamma == 0.0 {
                let amps = vatom::closed_form_amplitudes(&params, g_t)?;
                vatom::gate_fidelity_lossless(&amps)
            } else {
                lossy::gate_fidelity_lossy_with(&params, dt)?
            }
        }
        SchemeArg::TwoLevel => two_level::two_level_gate_fidelity(&params)?,
        SchemeArg::TwoAtom => cphase::collective::two_atom_gate_fidelity_with(&params, dt)?,
        SchemeArg::FiveLevel => {
            mscheme::five_level_master_fidelity_with(&params, mscheme::DEFAULT_BRANCH_TO_G, dt)?.0
        }
    };
    print_report(&report, conditional);
    if let Some(samples) = monte_carlo {
        if scheme != SchemeArg::V || gamma != 0.0 {
            return Err(Error::InvalidParams(
                "--monte-carlo applies to the lossless V scheme".into(),
            ));
        }
        let amps = vatom::closed_form_amplitudes(&params, g_t)?;
        let (mean, se) = vatom::monte_carlo_fidelity(&amps, samples, seed)?;
        println!(
            "monte_carlo     = {} +- {} ({samples} samples, seed {seed})",
            fmt_f64(mean),
            fmt_f64(se)
        );
    }
    if output.out.is_some() {
        let meta = json!({
            "command": "fidelity",
            "scheme": format!("{scheme:?}"),
            "delta": delta, "gamma": gamma, "omega": omega,
            "gT": g_t, "n_atoms": n, "dt": dt, "seed": seed,
        });
        emit(&report_table(&report), output, &meta)?;
    }
    Ok(())
}

fn objective_for(scheme: SchemeArg, gamma: f64, omega: f64) -> cphase::Result<GateObjective> {
    match scheme {
        SchemeArg::V => Ok(if gamma == 0.0 {
            GateObjective::VLossless
        } else {
            GateObjective::VLossy { gamma }
        }),
        SchemeArg::TwoAtom => Ok(GateObjective::TwoAtom { gamma }),
        SchemeArg::FiveLevel => Ok(GateObjective::FiveLevel { gamma, omega }),
        SchemeArg::TwoLevel => {
            if gamma != 0.0 {
                Err(Error::InvalidParams(
                    "no loss treatment is defined for the two-level scheme".into(),
                ))
            } else {
                Ok(GateObjective::TwoLevel)
            }
        }
    }
}

fn run_scan(
    scheme: SchemeArg,
    g_t: RangeSpec,
    delta: RangeSpec,
    gamma: f64,
    omega: f64,
    dt: f64,
    output: &OutputArgs,
) -> cphase::Result<()> {
    let objective = objective_for(scheme, gamma, omega)?;
    let spec = ScanSpec {
        objective,
        gt_axis: Axis::new("gT", g_t.lo, g_t.hi, g_t.steps)?,
        delta_axis: Axis::new("delta_over_g", delta.lo, delta.hi, delta.steps)?,
        dt,
    };
    let rows = grid_scan(&spec)?;
    let mut table = Table::new(vec!["gT", "delta_over_g", "fidelity"]);
    for r in &rows {
        table.push(vec![r.g_t, r.delta, r.fidelity]);
    }
    let meta = json!({
        "command": "scan",
        "scheme": format!("{scheme:?}"),
        "gT": [g_t.lo, g_t.hi, g_t.steps],
        "delta": [delta.lo, delta.hi, delta.steps],
        "gamma": gamma, "omega": omega, "dt": dt,
    });
    emit(&table, output, &meta)
}

#[allow(clippy::too_many_arguments)]
fn run_optimize(
    scheme: SchemeArg,
    gamma: RangeSpec,
    gt_max: f64,
    delta_max: f64,
    omega_grid: Option<RangeSpec>,
    settings: OptimizeSettings,
    output: &OutputArgs,
) -> cphase::Result<()> {
    let gammas = Axis::new("gamma", gamma.lo, gamma.hi, gamma.steps)?.points();
    let (opt_scheme, omegas) = match scheme {
        SchemeArg::V => (OptimizeScheme::VLossy, vec![]),
        SchemeArg::TwoAtom => (OptimizeScheme::TwoAtom, vec![]),
        SchemeArg::FiveLevel => {
            let omegas = match omega_grid {
                Some(r) => Axis::new("omega", r.lo, r.hi, r.steps)?.points(),
                None => vec![0.0],
            };
            (OptimizeScheme::FiveLevel, omegas)
        }
        SchemeArg::TwoLevel => {
            return Err(Error::InvalidParams(
                "optimize supports the v, two-atom and five-level schemes".into(),
            ))
        }
    };
    let curve = optimize_vs_gamma(opt_scheme, &gammas, gt_max, delta_max, &omegas, &settings)?;
    let with_omega = opt_scheme == OptimizeScheme::FiveLevel;
    let mut columns = vec!["gamma_over_g", "gT", "delta_over_g"];
    if with_omega {
        columns.push("omega_over_g");
    }
    columns.extend(["fidelity", "hit_gt_boundary", "hit_delta_boundary"]);
    let mut table = Table::new(columns);
    for (g, p) in &curve {
        let mut row = vec![*g, p.g_t, p.delta];
        if with_omega {
            row.push(p.omega.unwrap_or(0.0));
        }
        row.extend([
            p.value,
            if p.hit_gt_boundary { 1.0 } else { 0.0 },
            if p.hit_delta_boundary { 1.0 } else { 0.0 },
        ]);
        table.push(row);
    }
    let meta = json!({
        "command": "optimize",
        "scheme": format!("{scheme:?}"),
        "gamma": [gamma.lo, gamma.hi, gamma.steps],
        "gt_max": gt_max, "delta_max": delta_max,
        "gt_step": settings.gt_step, "delta_step": settings.delta_step,
        "scan_dt": settings.scan_dt, "refine_dt": settings.refine_dt,
        "refine": settings.refine,
    });
    emit(&table, output, &meta)
}

fn run_figure(id: &str, output: &OutputArgs) -> cphase::Result<()> {
    let fig: FigureId = id.parse()?;
    let table = figure(fig)?;
    let meta = json!({ "command": "figure", "id": id });
    emit(&table, output, &meta)
}

fn run_convergents(surd: u64, count: usize, output: &OutputArgs) -> cphase::Result<()> {
    let list = rational::surd_convergents(surd, count)?;
    let mut table = Table::new(vec!["index", "p", "q", "value", "error"]);
    for c in &list {
        table.push(vec![
            c.index as f64,
            c.p as f64,
            c.q as f64,
            c.value(),
            c.error(),
        ]);
    }
    let meta = json!({ "command": "convergents", "surd": surd, "count": count });
    emit(&table, output, &meta)
}

fn run_triples(max_n: u64, top: Option<usize>, output: &OutputArgs) -> cphase::Result<()> {
    let mut list = rational::resonance_triples(max_n)?;
    if let Some(k) = top {
        list.truncate(k);
    }
    let mut table = Table::new(vec!["n", "m", "q", "residual", "delta_over_g", "gT"]);
    for t in &list {
        table.push(vec![
            t.n as f64,
            t.m as f64,
            t.q as f64,
            t.residual as f64,
            t.delta_over_g,
            t.g_t,
        ]);
    }
    let meta = json!({ "command": "triples", "max_n": max_n, "top": top });
    emit(&table, output, &meta)
}

fn run(cli: Cli) -> cphase::Result<()> {
    match cli.command {
        Command::Fidelity {
            scheme,
            delta,
            gamma,
            omega,
            g_t,
            n_atoms,
            dt,
            conditional,
            monte_carlo,
            seed,
            output,
        } => run_fidelity(
            scheme,
            delta,
            gamma,
            omega,
            g_t,
            n_atoms,
            dt,
            conditional,
            monte_carlo,
            seed,
            &output,
        ),
        Command::Scan {
            scheme,
            g_t,
            delta,
            gamma,
            omega,
            dt,
            output,
        } => run_scan(scheme, g_t, delta, gamma, omega, dt, &output),
        Command::Optimize {
            scheme,
            gamma,
            gt_max,
            delta_max,
            omega_grid,
            gt_step,
            delta_step,
            scan_dt,
            refine_dt,
            no_refine,
            output,
        } => run_optimize(
            scheme,
            gamma,
            gt_max,
            delta_max,
            omega_grid,
            OptimizeSettings {
                gt_step,
                delta_step,
                scan_dt,
                refine_dt,
                refine: !no_refine,
            },
            &output,
        ),
        Command::Figure { id, output } => run_figure(&id, &output),
        Command::Convergents {
            surd,
            count,
            output,
        } => run_convergents(surd, count, &output),
        Command::Triples { max_n, top, output } => run_triples(max_n, top, &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
