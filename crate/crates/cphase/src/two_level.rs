//! Two-level atoms with a dual-rail photonic encoding.
//!
//! A logical state |ε₁ε₂⟩ maps to a single cavity mode holding ε₁ + ε₂
//! photons, so the gate only needs the 0-, 1- and 2-photon Fock dynamics of
//! an ordinary Jaynes-Cummings coupling. The ground amplitudes coincide with
//! the V-system ones (the two-photon coupling is g√2 either way); what
//! changes is the fidelity bookkeeping: a final excited atom leaves the
//! field one photon short of every dual-rail basis state, so the excited
//! population contributes nothing and the fidelity is the V-system value
//! minus (|C_e⁽¹⁾|² + |C_e⁽²⁾|²)/10.
//!
//! The mapping is pure bookkeeping: |00⟩→0, |01⟩,|10⟩→1, |11⟩→2 photons,
//! with ideal phases {0, φ₁, φ₁, 2φ₁+π}, the same target as the V gate.
//!
//! ```
//! use cphase::{SystemParams, two_level, vatom};
//!
//! let p = SystemParams::lossless(0.0, 6.473)?;
//! let dual = two_level::two_level_gate_fidelity(&p)?;
//! let amps = vatom::closed_form_amplitudes(&p, 6.473)?;
//! let v = vatom::gate_fidelity_lossless(&amps);
//! let correction = (amps.c_e1.norm_sqr() + amps.c_e2.norm_sqr()) / 10.0;
//! assert!((dual.f_uncond - (v.f_uncond - correction)).abs() < 1e-10);
//! # Ok::<(), cphase::Error>(())
//! ```

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fidelity;
use crate::ode::rk4_evolve;
use crate::params::{FidelityReport, SystemParams, DEFAULT_DT};

/// Fock-basis amplitudes of the N-atom dual-rail system.
#[derive(Debug, Clone, Copy)]
pub struct TwoLevelAmplitudes {
    pub c_g1: C64,
    pub c_e1: C64,
    pub c_g2: C64,
    /// Amplitude of |1⟩|ψ_e⟩.
    pub c_e2: C64,
    /// Amplitude of |0⟩|ψ_ee⟩; identically zero for a single atom.
    pub c_ee2: C64,
    pub n_atoms: u32,
}

/// Integrate the one- and two-photon equations of motion for N two-level
/// atoms; couplings are g√N (single photon) and g√(2N), g√(2(N−1)) for the
/// two-photon ladder. γ folds in as −iγ per unit of excitation.
pub fn two_level_amplitudes(params: &SystemParams, t: f64) -> Result<TwoLevelAmplitudes> {
    params.validate()?;
    if params.omega_rabi != 0.0 {
        return Err(Error::InvalidParams(
            "the two-level scheme takes no classical drive".into(),
        ));
    }
    let n = params.n_atoms as f64;
    let g = params.g;
    let delta_c = C64::new(params.delta, -params.gamma);
    let i = C64::i();
    let k_single = g * (2.0 * n).sqrt();
    let k_double = g * (2.0 * (n - 1.0)).sqrt();
    let k_one_photon = g * n.sqrt();
    // State: (c_g2, c_e2, c_ee2, c_g1, c_e1).
    let rhs = move |_t: f64, y: &Array1<C64>, dy: &mut Array1<C64>| {
        dy[0] = -i * k_single * y[1];
        dy[1] = -i * delta_c * y[1] - i * k_double * y[2] - i * k_single * y[0];
        dy[2] = -2.0 * i * delta_c * y[2] - i * k_double * y[1];
        dy[3] = -i * k_one_photon * y[4];
        dy[4] = -i * delta_c * y[4] - i * k_one_photon * y[3];
    };
    let mut y0 = Array1::<C64>::zeros(5);
    y0[0] = C64::new(1.0, 0.0);
    y0[3] = C64::new(1.0, 0.0);
    let dt = DEFAULT_DT / n.sqrt();
    let last = rk4_evolve(&y0, t, dt, rhs, |_, _| {})?;
    Ok(TwoLevelAmplitudes {
        c_g2: last[0],
        c_e2: last[1],
        c_ee2: last[2],
        c_g1: last[3],
        c_e1: last[4],
        n_atoms: params.n_atoms,
    })
}

/// Dual-rail gate fidelity for a single lossless two-level atom.
pub fn two_level_gate_fidelity(params: &SystemParams) -> Result<FidelityReport> {
    params.validate()?;
    if params.n_atoms != 1 {
        return Err(Error::InvalidParams(
            "the dual-rail fidelity formula holds for a single atom".into(),
        ));
    }
    if params.gamma != 0.0 {
        return Err(Error::InvalidParams(
            "no loss treatment is defined for the two-level scheme".into(),
        ));
    }
    let amps = two_level_amplitudes(params, params.t_final)?;
    let f = fidelity::pure_fidelity_dual_rail(amps.c_g1, amps.c_g2);
    Ok(FidelityReport {
        f_uncond: f,
        f_cond: f,
        phi1: amps.c_g1.arg(),
        phi2: amps.c_g2.arg(),
        nonlinear_phase: fidelity::nonlinear_phase_of(amps.c_g1, amps.c_g2),
        prob_g1: amps.c_g1.norm_sqr(),
        prob_g2: amps.c_g2.norm_sqr(),
        loss_prob: 0.0,
    })
}
