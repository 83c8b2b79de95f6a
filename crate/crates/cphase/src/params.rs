//! Physical parameters of a run and the quantities reported for a gate.
//!
//! All rates are expressed in units of the atom-field coupling `g`; every
//! solver in this crate works with `g = 1` internally and the command-line
//! interface only accepts the dimensionless combinations δ/g, γ/g, Ω/g, gT.

use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Ground amplitudes smaller than this have numerically meaningless phases.
pub const PHASE_FLOOR: f64 = 1e-6;

/// Default fixed step (units of 1/g) for all integrators.
pub const DEFAULT_DT: f64 = 1e-3;

/// Average of |α|⁴ over input states drawn uniformly from the amplitude simplex.
pub const W_QUARTIC: f64 = 0.1;

/// Average of |α_ij|²|α_kl|² over the same distribution, (i,j) ≠ (k,l).
pub const W_CROSS: f64 = 0.05;

/// Physical constants of a run, in units of the coupling rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    /// Atom-field coupling rate; the unit all other rates are quoted in.
    pub g: f64,
    /// Detuning δ of the excited states from the field mode(s).
    pub delta: f64,
    /// Amplitude decay rate γ of the excited states (population decays at 2γ).
    pub gamma: f64,
    /// Classical drive Ω coupling the auxiliary levels; zero except for the
    /// five-level scheme.
    pub omega_rabi: f64,
    /// Number of atoms sharing the mode.
    pub n_atoms: u32,
    /// Interaction time T.
    pub t_final: f64,
}

impl SystemParams {
    /// Parameters in units of g (g = 1): detuning, decay, drive, atom count
    /// and interaction time gT.
    pub fn in_units_of_g(
        delta: f64,
        gamma: f64,
        omega_rabi: f64,
        n_atoms: u32,
        g_t: f64,
    ) -> Result<Self> {
        let p = SystemParams {
            g: 1.0,
            delta,
            gamma,
            omega_rabi,
            n_atoms,
            t_final: g_t,
        };
        p.validate()?;
        Ok(p)
    }

    /// Lossless single V-atom at detuning δ, evolved for gT.
    pub fn lossless(delta: f64, g_t: f64) -> Result<Self> {
        Self::in_units_of_g(delta, 0.0, 0.0, 1, g_t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0) {
            return Err(Error::InvalidParams(format!(
                "g must be > 0, got {}",
                self.g
            )));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        if !(self.omega_rabi >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "omega_rabi must be >= 0, got {}",
                self.omega_rabi
            )));
        }
        if self.n_atoms < 1 {
            return Err(Error::InvalidParams("n_atoms must be >= 1".into()));
        }
        if !(self.t_final >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "t_final must be >= 0, got {}",
                self.t_final
            )));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParams("delta must be finite".into()));
        }
        Ok(())
    }

    /// Replace the interaction time, keeping everything else.
    pub fn with_t(&self, t_final: f64) -> Self {
        SystemParams { t_final, ..*self }
    }
}

/// Gate-quality numbers extracted from one run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FidelityReport {
    /// Gate fidelity averaged over input states, including loss channels.
    pub f_uncond: f64,
    /// Gate fidelity conditioned on no spontaneous-emission event.
    pub f_cond: f64,
    /// Single-photon phase φ₁ = arg C_g⁽¹⁾(T).
    pub phi1: f64,
    /// Two-photon phase φ₂ = arg C_g⁽²⁾(T).
    pub phi2: f64,
    /// φ₂ − 2φ₁ wrapped to (−π, π]; `None` when a ground amplitude sits
    /// below [`PHASE_FLOOR`].
    pub nonlinear_phase: Option<f64>,
    /// |C_g⁽¹⁾(T)|².
    pub prob_g1: f64,
    /// |C_g⁽²⁾(T)|².
    pub prob_g2: f64,
    /// Probability that at least one photon was lost to spontaneous emission
    /// over [0, T], starting from the two-photon input.
    pub loss_prob: f64,
}

/// Wrap an angle into (−π, π].
///
/// The half-open interval keeps the target nonlinear phase π representable.
/// Panics on non-finite input.
pub fn wrap_phase(theta: f64) -> f64 {
    assert!(theta.is_finite(), "wrap_phase: non-finite input {theta}");
    let k = ((theta - PI) / TAU).ceil();
    let wrapped = theta - TAU * k;
    // Rounding at the boundary can land exactly on -π; fold it back.
    if wrapped <= -PI {
        wrapped + TAU
    } else {
        wrapped
    }
}
