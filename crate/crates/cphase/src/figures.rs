//! Figure-ready data sets: the contour grid, the fidelity-vs-loss curves,
//! the two-atom comparison, and the driven five-level sweeps.

use crate::error::{Error, Result};
use crate::lossy;
use crate::scan::{
    grid_scan, optimize_vs_gamma, Axis, GateObjective, OptimizeScheme, OptimizeSettings, ScanSpec,
};
use crate::table::Table;

/// Identifier of a reproduced figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Lossless fidelity over the (gT, δ/g) plane.
    Fig2,
    /// Unconditional and conditional fidelity vs γ/g at the tabulated regimes.
    Fig3,
    /// Optimized single-atom vs two-atom fidelity as a function of γ/g.
    Fig4,
    /// Five-level fidelity vs γ/g for several drive strengths.
    Fig6,
    /// Five-level fidelity vs Ω/g for several loss rates.
    Fig7,
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(FigureId::Fig2),
            "fig3" => Ok(FigureId::Fig3),
            "fig4" => Ok(FigureId::Fig4),
            "fig6" => Ok(FigureId::Fig6),
            "fig7" => Ok(FigureId::Fig7),
            other => Err(Error::InvalidParams(format!("unknown figure id `{other}`"))),
        }
    }
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    Axis::new("grid", lo, hi, steps)
        .map(|a| a.points())
        .unwrap_or_default()
}

/// Lossless fidelity on the 0.05 × 0.01 grid over [0, 20] × [0, 2].
pub fn fig2() -> Result<Table> {
    let spec = ScanSpec {
        objective: GateObjective::VLossless,
        gt_axis: Axis::new("gT", 0.0, 20.0, 401)?,
        delta_axis: Axis::new("delta_over_g", 0.0, 2.0, 201)?,
        dt: 1e-3,
    };
    let rows = grid_scan(&spec)?;
    let mut table = Table::new(vec!["gT", "delta_over_g", "fidelity"]);
    for r in rows {
        table.push(vec![r.g_t, r.delta, r.fidelity]);
    }
    Ok(table)
}

/// Fidelity vs γ/g on the four tabulated operating regimes.
pub fn fig3() -> Result<Table> {
    let gammas = linspace(0.0, 0.155, 32);
    let pts = lossy::figure3_curve(&gammas)?;
    let mut table = Table::new(vec!["gamma_over_g", "f_uncond", "f_cond"]);
    for (g, fu, fc) in pts {
        table.push(vec![g, fu, fc]);
    }
    Ok(table)
}

/// Optimized single-atom vs two-atom unconditional fidelity.
pub fn fig4() -> Result<Table> {
    let gammas = linspace(0.0, 0.15, 16);
    let settings = OptimizeSettings::default();
    let single = optimize_vs_gamma(OptimizeScheme::VLossy, &gammas, 20.0, 2.0, &[], &settings)?;
    let double = optimize_vs_gamma(OptimizeScheme::TwoAtom, &gammas, 20.0, 2.0, &[], &settings)?;
    let mut table = Table::new(vec!["gamma_over_g", "f_single_atom", "f_two_atom"]);
    for ((g, p1), (_, p2)) in single.into_iter().zip(double) {
        table.push(vec![g, p1.value, p2.value]);
    }
    Ok(table)
}

/// Coarse settings for the 20-dimensional five-level optimizations; the
/// windows are gT ≤ 30 and δ/g ≤ 10 where many optima sit on the boundary.
fn five_level_settings() -> OptimizeSettings {
    OptimizeSettings {
        gt_step: 0.25,
        delta_step: 0.5,
        scan_dt: 5e-3,
        refine_dt: 2.5e-3,
        refine: false,
    }
}

/// Five-level fidelity vs γ/g, one column per drive strength Ω.
pub fn fig6() -> Result<Table> {
    let gammas = linspace(0.02, 0.16, 8);
    let omegas = [0.0, 0.4, 0.8, 1.2];
    let settings = five_level_settings();
    let mut columns = vec!["gamma_over_g".to_string()];
    for om in omegas {
        columns.push(format!("f_omega_{om:.1}"));
    }
    let mut table = Table::new(columns);
    let mut per_omega = Vec::new();
    for &omega in &omegas {
        per_omega.push(optimize_vs_gamma(
            OptimizeScheme::FiveLevel,
            &gammas,
            30.0,
            10.0,
            &[omega],
            &settings,
        )?);
    }
    for (k, &gamma) in gammas.iter().enumerate() {
        let mut row = vec![gamma];
        for col in &per_omega {
            row.push(col[k].1.value);
        }
        table.push(row);
    }
    Ok(table)
}

/// Five-level fidelity vs Ω/g, one column per loss rate γ.
pub fn fig7() -> Result<Table> {
    let omegas = linspace(0.0, 1.6, 9);
    let gammas = [0.05, 0.1, 0.15];
    let settings = five_level_settings();
    let mut columns = vec!["omega_over_g".to_string()];
    for g in gammas {
        columns.push(format!("f_gamma_{g:.2}"));
    }
    let mut table = Table::new(columns);
    let mut rows = vec![Vec::new(); omegas.len()];
    for (k, &omega) in omegas.iter().enumerate() {
        rows[k].push(omega);
        for &gamma in &gammas {
            let out = optimize_vs_gamma(
                OptimizeScheme::FiveLevel,
                &[gamma],
                30.0,
                10.0,
                &[omega],
                &settings,
            )?;
            rows[k].push(out[0].1.value);
        }
    }
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// Dispatch by figure id.
pub fn figure(id: FigureId) -> Result<Table> {
    match id {
        FigureId::Fig2 => fig2(),
        FigureId::Fig3 => fig3(),
        FigureId::Fig4 => fig4(),
        FigureId::Fig6 => fig6(),
        FigureId::Fig7 => fig7(),
    }
}
