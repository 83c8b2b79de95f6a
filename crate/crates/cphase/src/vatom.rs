//! Closed-form dynamics and gate fidelity of a single V-type atom.
//!
//! With one photon per polarization mode and the atom starting in the ground
//! state, each excitation manifold is a two- or three-level problem with
//! Rabi frequencies ω₁ = √(δ²+4g²)/2 and ω₂ = √(δ²+8g²)/2. The same
//! expressions evaluated at complex detuning δ − iγ give the quasi-pure
//! amplitudes used by the lossy solver.
//!
//! ```
//! use cphase::{SystemParams, vatom};
//!
//! // The first usable timing: gT = 6.473, near cos(gt) ≈ 1, cos(√2 gt) ≈ −1.
//! let params = SystemParams::lossless(0.0, 6.473)?;
//! let amps = vatom::closed_form_amplitudes(&params, 6.473)?;
//! let report = vatom::gate_fidelity_lossless(&amps);
//! assert!((report.f_uncond - 0.9714).abs() < 5e-4);
//!
//! // The Monte-Carlo average agrees within its statistical error.
//! let (mean, se) = vatom::monte_carlo_fidelity(&amps, 50_000, 1)?;
//! assert!((mean - report.f_uncond).abs() < 3.0 * se);
//! # Ok::<(), cphase::Error>(())
//! ```

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fidelity::{self, PureAmplitudes};
use crate::params::{FidelityReport, SystemParams, PHASE_FLOOR};

/// Closed-form single- and two-photon amplitudes of the lossless atom.
#[derive(Debug, Clone, Copy)]
pub struct LosslessAmplitudes {
    /// Ground amplitude with one photon present.
    pub c_g1: C64,
    /// Excited amplitude with one photon present.
    pub c_e1: C64,
    /// Ground amplitude with both photons present.
    pub c_g2: C64,
    /// Common value of the two singly-excited two-photon amplitudes.
    pub c_e2: C64,
    pub omega1: f64,
    pub omega2: f64,
}

/// Single-manifold solution at (possibly complex) detuning:
/// c_g = e^{−iδt/2}[cos ωt + iδ/(2ω) sin ωt], c_e = −i g_eff e^{−iδt/2} sin ωt / ω,
/// with ω = √(δ² + 4 g_eff²)/2.
fn manifold_amplitudes(delta: C64, g_eff: f64, t: f64) -> (C64, C64, C64) {
    let omega = (delta * delta + 4.0 * g_eff * g_eff).sqrt() * 0.5;
    let phase = (-C64::i() * delta * t * 0.5).exp();
    // sin(ωt)/ω is entire; expand near ω = 0 to stay finite.
    let (sin_over, cos) = if omega.norm() < 1e-12 {
        let wt2 = (omega * t).powi(2);
        (
            C64::new(t, 0.0) * (C64::new(1.0, 0.0) - wt2 / 6.0),
            C64::new(1.0, 0.0) - wt2 / 2.0,
        )
    } else {
        ((omega * t).sin() / omega, (omega * t).cos())
    };
    let c_g = phase * (cos + C64::i() * delta * 0.5 * sin_over);
    let c_e = -C64::i() * g_eff * phase * sin_over;
    (c_g, c_e, omega)
}

/// Quasi-pure amplitudes at complex detuning δ_c = δ − iγ.
///
/// The two-photon ground state couples to the symmetric excited combination
/// with strength g√2, so both manifolds reduce to the same closed form.
pub(crate) fn damped_amplitudes(delta_c: C64, g: f64, t: f64) -> PureAmplitudes {
    let (c_g1, c_e1, _) = manifold_amplitudes(delta_c, g, t);
    let (c_g2, c_sym, _) = manifold_amplitudes(delta_c, g * 2f64.sqrt(), t);
    // c_sym is the symmetric-combination amplitude; each bare excited state
    // carries c_sym/√2.
    PureAmplitudes::v_system(c_g1, c_e1, c_g2, c_sym / 2f64.sqrt())
}

/// Exact amplitudes of the lossless single atom at time `t`.
///
/// Requires γ = 0, Ω = 0 and a single atom.
pub fn closed_form_amplitudes(params: &SystemParams, t: f64) -> Result<LosslessAmplitudes> {
    params.validate()?;
    if params.gamma != 0.0 || params.omega_rabi != 0.0 || params.n_atoms != 1 {
        return Err(Error::InvalidParams(
            "closed-form amplitudes require gamma = 0, omega = 0, n_atoms = 1".into(),
        ));
    }
    let delta = C64::new(params.delta, 0.0);
    let amps = damped_amplitudes(delta, params.g, t);
    let omega1 = 0.5 * (params.delta.powi(2) + 4.0 * params.g.powi(2)).sqrt();
    let omega2 = 0.5 * (params.delta.powi(2) + 8.0 * params.g.powi(2)).sqrt();
    Ok(LosslessAmplitudes {
        c_g1: amps.c_g1,
        c_e1: amps.c_e1,
        c_g2: amps.c_g2,
        c_e2: amps.c_e2,
        omega1,
        omega2,
    })
}

impl LosslessAmplitudes {
    pub fn as_pure(&self) -> PureAmplitudes {
        PureAmplitudes::v_system(self.c_g1, self.c_e1, self.c_g2, self.c_e2)
    }
}

/// Average gate fidelity of the lossless atom (conditional equals
/// unconditional here). Below the phase floor the report is flagged.
pub fn gate_fidelity_lossless(amps: &LosslessAmplitudes) -> FidelityReport {
    fidelity::report_from_amplitudes(&amps.as_pure(), 0.0, 0.0)
}

/// Nonlinear phase φ₂ − 2φ₁ at the end of the run.
pub fn nonlinear_phase(amps: &LosslessAmplitudes) -> Result<f64> {
    fidelity::nonlinear_phase_of(amps.c_g1, amps.c_g2).ok_or(Error::PhaseFloor)
}

/// ⟨Φ_ideal|ρ_f|Φ_ideal⟩ for one explicit input state (α₀₀, α₀₁, α₁₀, α₁₁).
///
/// The final field density matrix splits over the atomic level the state is
/// entangled with; each block contributes the squared overlap with the ideal
/// state.
pub fn fidelity_for_input(amps: &LosslessAmplitudes, alphas: &[C64; 4]) -> f64 {
    let [a00, a01, a10, a11] = *alphas;
    let m1 = amps.c_g1.norm();
    debug_assert!(m1 >= PHASE_FLOOR, "ideal state needs a phase reference");
    let phase1 = amps.c_g1 / m1;
    // Ground-block overlap: diagonal in the input amplitudes.
    let g_block = a00.norm_sqr()
        + (a01.norm_sqr() + a10.norm_sqr()) * amps.c_g1 * phase1.conj()
        - a11.norm_sqr() * amps.c_g2 * (phase1 * phase1).conj();
    // Each excited block pairs a one-photon-lost component with the ideal state.
    let ea_block = a00.conj() * a10 * amps.c_e1 + (a01 * phase1).conj() * a11 * amps.c_e2;
    let eb_block = a00.conj() * a01 * amps.c_e1 + (a10 * phase1).conj() * a11 * amps.c_e2;
    g_block.norm_sqr() + ea_block.norm_sqr() + eb_block.norm_sqr()
}

/// Monte-Carlo estimate of the state-averaged gate fidelity.
///
/// Squared magnitudes are drawn uniformly from the 3-simplex (sorted uniform
/// spacings), phases independently uniform. Returns (mean, standard error).
pub fn monte_carlo_fidelity(
    amps: &LosslessAmplitudes,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n_samples < 1000 {
        return Err(Error::InvalidParams(
            "monte_carlo_fidelity needs at least 1000 samples".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..n_samples {
        let mut cuts = [
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
        ];
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mags = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 1.0 - cuts[2]];
        let mut alphas = [C64::new(0.0, 0.0); 4];
        for (a, &m) in alphas.iter_mut().zip(mags.iter()) {
            let phi = rng.random::<f64>() * std::f64::consts::TAU;
            *a = C64::from_polar(m.sqrt(), phi);
        }
        let f = fidelity_for_input(amps, &alphas);
        sum += f;
        sum_sq += f * f;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) / (n - 1.0);
    Ok((mean, var.sqrt()))
}
