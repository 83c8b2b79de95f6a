//! Gate-fidelity assembly from pure (or quasi-pure) amplitudes.
//!
//! The fidelity is an average of ⟨Φ_ideal|ρ_f|Φ_ideal⟩ over input field
//! states drawn uniformly from the amplitude simplex with random phases.
//! For a state that stays pure, the average reduces to a closed polynomial
//! in the amplitudes with the weights [`W_QUARTIC`] and [`W_CROSS`]:
//! same-photon-number terms carry 1/10, photon-changing terms 1/20.
//!
//! A perfect gate scores 1; doing nothing at all scores 0.4, the price of
//! the missing π on the two-photon phase:
//!
//! ```
//! use cphase::fidelity::{pure_fidelity, PureAmplitudes};
//! use num_complex::Complex64 as C64;
//!
//! let identity = PureAmplitudes::v_system(
//!     C64::new(1.0, 0.0), C64::new(0.0, 0.0),   // one photon: C_g, C_e
//!     C64::new(1.0, 0.0), C64::new(0.0, 0.0),   // two photons: C_g, C_e
//! );
//! assert!((pure_fidelity(&identity) - 0.4).abs() < 1e-15);
//!
//! let perfect = PureAmplitudes::v_system(
//!     C64::new(1.0, 0.0), C64::new(0.0, 0.0),
//!     C64::new(-1.0, 0.0), C64::new(0.0, 0.0),
//! );
//! assert!((pure_fidelity(&perfect) - 1.0).abs() < 1e-15);
//! ```

use num_complex::Complex64 as C64;

use crate::params::{wrap_phase, FidelityReport, PHASE_FLOOR, W_CROSS, W_QUARTIC};

/// Amplitudes of the quasi-pure state at the end of a run.
///
/// `c_e1`/`c_e2` are the common values of the (symmetric) singly-excited
/// amplitudes, `c_ee2` the doubly-excited amplitude (multi-atom schemes) and
/// `c_aux1`/`c_aux2` the driven auxiliary ground amplitudes (five-level
/// scheme). Unused channels stay zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct PureAmplitudes {
    pub c_g1: C64,
    pub c_e1: C64,
    pub c_aux1: C64,
    pub c_g2: C64,
    pub c_e2: C64,
    pub c_ee2: C64,
    pub c_aux2: C64,
}

impl PureAmplitudes {
    pub fn v_system(c_g1: C64, c_e1: C64, c_g2: C64, c_e2: C64) -> Self {
        PureAmplitudes {
            c_g1,
            c_e1,
            c_g2,
            c_e2,
            ..Default::default()
        }
    }

    /// Norm² of the one-photon manifold.
    pub fn norm1_sqr(&self) -> f64 {
        self.c_g1.norm_sqr() + self.c_e1.norm_sqr() + self.c_aux1.norm_sqr()
    }

    /// Norm² of the two-photon manifold; the symmetric excited and auxiliary
    /// amplitudes each label two basis states.
    pub fn norm2_sqr(&self) -> f64 {
        self.c_g2.norm_sqr()
            + 2.0 * self.c_e2.norm_sqr()
            + self.c_ee2.norm_sqr()
            + 2.0 * self.c_aux2.norm_sqr()
    }

    /// Rescale each manifold to unit norm (post-selection on no loss).
    pub fn renormalized(&self) -> Self {
        let n1 = self.norm1_sqr().sqrt();
        let n2 = self.norm2_sqr().sqrt();
        let s1 = if n1 > 0.0 { 1.0 / n1 } else { 0.0 };
        let s2 = if n2 > 0.0 { 1.0 / n2 } else { 0.0 };
        PureAmplitudes {
            c_g1: self.c_g1 * s1,
            c_e1: self.c_e1 * s1,
            c_aux1: self.c_aux1 * s1,
            c_g2: self.c_g2 * s2,
            c_e2: self.c_e2 * s2,
            c_ee2: self.c_ee2 * s2,
            c_aux2: self.c_aux2 * s2,
        }
    }
}

/// Re[(c_g1*)² c_g2] / |c_g1|², the phase-sensitive two-photon overlap.
/// Zero when the ground amplitude vanishes entirely.
fn phase_overlap(c_g1: C64, c_g2: C64) -> f64 {
    let n = c_g1.norm_sqr();
    if n == 0.0 {
        0.0
    } else {
        (c_g1.conj() * c_g1.conj() * c_g2).re / n
    }
}

/// Contribution of the ground (photon-conserving) amplitudes to 10·F.
fn ground_sum(c_g1: C64, c_g2: C64) -> f64 {
    let m1 = c_g1.norm();
    1.0 + 2.0 * m1 + 3.0 * c_g1.norm_sqr() + c_g2.norm_sqr()
        - (1.0 + 2.0 * m1) * phase_overlap(c_g1, c_g2)
}

/// Average gate fidelity of a pure final state, all population channels
/// included.
pub fn pure_fidelity(amps: &PureAmplitudes) -> f64 {
    W_QUARTIC
        * (ground_sum(amps.c_g1, amps.c_g2)
            + amps.c_e1.norm_sqr()
            + amps.c_e2.norm_sqr()
            + amps.c_aux1.norm_sqr()
            + amps.c_aux2.norm_sqr()
            + 0.5 * amps.c_ee2.norm_sqr())
}

/// Dual-rail variant: any excited-atom component leaves the field with a
/// missing photon and is orthogonal to the ideal state, so only the ground
/// amplitudes contribute.
pub fn pure_fidelity_dual_rail(c_g1: C64, c_g2: C64) -> f64 {
    W_QUARTIC * ground_sum(c_g1, c_g2)
}

/// φ₂ − 2φ₁ wrapped to (−π, π], or `None` below the phase floor.
pub fn nonlinear_phase_of(c_g1: C64, c_g2: C64) -> Option<f64> {
    if c_g1.norm() < PHASE_FLOOR || c_g2.norm() < PHASE_FLOOR {
        None
    } else {
        Some(wrap_phase(c_g2.arg() - 2.0 * c_g1.arg()))
    }
}

/// Assemble a report: `extra_uncond` carries the decay-fed population terms
/// of the unconditional fidelity, the conditional fidelity renormalizes the
/// quasi-pure state.
pub fn report_from_amplitudes(
    amps: &PureAmplitudes,
    extra_uncond: f64,
    loss_prob: f64,
) -> FidelityReport {
    let f_uncond = pure_fidelity(amps) + extra_uncond;
    let f_cond = if extra_uncond == 0.0 && loss_prob == 0.0 {
        f_uncond
    } else {
        pure_fidelity(&amps.renormalized())
    };
    FidelityReport {
        f_uncond,
        f_cond,
        phi1: amps.c_g1.arg(),
        phi2: amps.c_g2.arg(),
        nonlinear_phase: nonlinear_phase_of(amps.c_g1, amps.c_g2),
        prob_g1: amps.c_g1.norm_sqr(),
        prob_g2: amps.c_g2.norm_sqr(),
        loss_prob,
    }
}

#[allow(dead_code)]
const _WEIGHT_RELATION: () = assert!(W_QUARTIC == 2.0 * W_CROSS);
