//! N-atom V systems in the symmetric collective basis, and the lossy
//! two-atom gate.
//!
//! From the collective ground state the Hamiltonian never leaves the
//! permutation-symmetric subspace, so the N-atom problem stays three
//! amplitudes wide regardless of N, with couplings g√N and g√(N−1). In the
//! large-N limit the two-photon amplitudes factorize into products of
//! single-photon ones and the nonlinear phase vanishes; at δ = 0 the ground
//! amplitude has the closed form (N−1+N·cos(√(4N−2) gt))/(2N−1), whose
//! minimum −1/(2N−1) keeps every N > 1 strictly away from the ideal gate.
//!
//! For two atoms decaying into a common reservoir the loss treatment
//! parallels the single-atom cascade with collectively enhanced rates:
//! excited amplitudes damp at 2γ and the fed blocks follow the same
//! structure with coupling g√2.
//!
//! ```
//! use cphase::collective::n_atom_ground_closed_form;
//! use std::f64::consts::PI;
//!
//! // N = 2: the minimum sits at √6 gt = π and equals −1/3.
//! let t_min = PI / 6f64.sqrt();
//! let min = n_atom_ground_closed_form(2, 1.0, t_min);
//! assert!((min + 1.0 / 3.0).abs() < 1e-12);
//! ```

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::basis::{enumerate_basis, AtomLevel, BasisEnumeration, Scheme};
use crate::error::{Error, Result};
use crate::fidelity::{self, PureAmplitudes};
use crate::lindblad::LindbladSpec;
use crate::ode::{rk4_at_times, rk4_evolve};
use crate::oracle::{master_fidelity, SectorIndex};
use crate::params::{FidelityReport, SystemParams, DEFAULT_DT};

const CONSERVATION_TOL: f64 = 1e-6;

/// Collective-state amplitudes of the N-atom system.
#[derive(Debug, Clone, Copy)]
pub struct CollectiveAmplitudes {
    pub c_g1: C64,
    pub c_e1: C64,
    pub c_g2: C64,
    /// Common amplitude of |ψ_a⟩|01⟩ and |ψ_b⟩|10⟩.
    pub c_e2: C64,
    /// Amplitude of the doubly-excited |ψ_ab⟩|00⟩.
    pub c_ee2: C64,
    pub n_atoms: u32,
}

fn collective_rhs(n: f64, g: f64, delta_c: C64) -> impl Fn(f64, &Array1<C64>, &mut Array1<C64>) {
    // State: (c_g2, c_e2, c_ee2, c_g1, c_e1).
    let i = C64::i();
    let root_n = n.sqrt();
    let root_nm1 = (n - 1.0).max(0.0).sqrt();
    move |_t, y, dy| {
        dy[0] = -2.0 * i * g * root_n * y[1];
        dy[1] = -i * delta_c * y[1] - i * g * root_nm1 * y[2] - i * g * root_n * y[0];
        dy[2] = -2.0 * i * delta_c * y[2] - 2.0 * i * g * root_nm1 * y[1];
        dy[3] = -i * g * root_n * y[4];
        dy[4] = -i * delta_c * y[4] - i * g * root_n * y[3];
    }
}

/// Integrate the collective amplitude equations to time `t`.
///
/// Loss enters as the quasi-pure substitution δ → δ − iγ, so each unit of
/// excitation adds an amplitude decay γ. The step is rescaled with √N to
/// resolve the collectively enhanced Rabi frequency.
pub fn n_atom_amplitudes(params: &SystemParams, t: f64) -> Result<CollectiveAmplitudes> {
    params.validate()?;
    if params.omega_rabi != 0.0 {
        return Err(Error::InvalidParams(
            "collective V dynamics take no classical drive".into(),
        ));
    }
    let n = params.n_atoms as f64;
    let delta_c = C64::new(params.delta, -params.gamma);
    let dt = DEFAULT_DT / n.sqrt();
    let mut y0 = Array1::<C64>::zeros(5);
    y0[0] = C64::new(1.0, 0.0);
    y0[3] = C64::new(1.0, 0.0);
    let last = rk4_evolve(&y0, t, dt, collective_rhs(n, params.g, delta_c), |_, _| {})?;
    Ok(CollectiveAmplitudes {
        c_g2: last[0],
        c_e2: last[1],
        c_ee2: last[2],
        c_g1: last[3],
        c_e1: last[4],
        n_atoms: params.n_atoms,
    })
}

/// Resonant two-photon ground amplitude, (N−1+N·cos(√(4N−2) gt))/(2N−1).
/// Its most negative value is −1/(2N−1), reached when the cosine hits −1.
pub fn n_atom_ground_closed_form(n_atoms: u32, g: f64, t: f64) -> f64 {
    let n = n_atoms as f64;
    (n - 1.0 + n * ((4.0 * n - 2.0).sqrt() * g * t).cos()) / (2.0 * n - 1.0)
}

// Two-atom cascade state layout.
const CG2: usize = 0;
const CE2: usize = 1;
const CEE2: usize = 2;
const CG1: usize = 3;
const CE1: usize = 4;
const FED_B: usize = 5;
const FED_A: usize = 9;
const R2_00G: usize = 13;
const R1_00G: usize = 14;
const DIM: usize = 15;

/// Quasi-pure amplitudes plus decay-fed populations of the two-atom run.
#[derive(Debug, Clone)]
pub struct TwoAtomState {
    pub t: f64,
    pub amps: PureAmplitudes,
    /// (population of |01,gg⟩, coherences with |00,ψ_b⟩, population of |00,ψ_b⟩).
    pub fed_b: [C64; 4],
    pub fed_a: [C64; 4],
    pub rho2_00g: f64,
    pub rho1_00g: f64,
}

impl TwoAtomState {
    fn from_vector(t: f64, y: &Array1<C64>) -> Self {
        let mut amps = PureAmplitudes::v_system(y[CG1], y[CE1], y[CG2], y[CE2]);
        amps.c_ee2 = y[CEE2];
        TwoAtomState {
            t,
            amps,
            fed_b: [y[FED_B], y[FED_B + 1], y[FED_B + 2], y[FED_B + 3]],
            fed_a: [y[FED_A], y[FED_A + 1], y[FED_A + 2], y[FED_A + 3]],
            rho2_00g: y[R2_00G].re,
            rho1_00g: y[R1_00G].re,
        }
    }

    pub fn total_two_photon(&self) -> f64 {
        self.amps.norm2_sqr()
            + self.fed_b[0].re
            + self.fed_b[3].re
            + self.fed_a[0].re
            + self.fed_a[3].re
            + self.rho2_00g
    }

    pub fn total_one_photon(&self) -> f64 {
        self.amps.norm1_sqr() + self.rho1_00g
    }

    fn validate(&self) -> Result<()> {
        for (total, check) in [
            (self.total_two_photon(), "two-photon probability"),
            (self.total_one_photon(), "one-photon probability"),
        ] {
            if (total - 1.0).abs() > CONSERVATION_TOL {
                return Err(Error::Physicality {
                    check,
                    t: self.t,
                    magnitude: (total - 1.0).abs(),
                });
            }
        }
        for blk in [&self.fed_b, &self.fed_a] {
            if (blk[1] - blk[2].conj()).norm() > 1e-10 {
                return Err(Error::Physicality {
                    check: "fed-block Hermiticity",
                    t: self.t,
                    magnitude: (blk[1] - blk[2].conj()).norm(),
                });
            }
        }
        Ok(())
    }
}

fn two_atom_rhs(params: &SystemParams) -> impl Fn(f64, &Array1<C64>, &mut Array1<C64>) {
    let g = params.g;
    let gamma = params.gamma;
    let delta = params.delta;
    let i = C64::i();
    let root2 = 2f64.sqrt();
    move |_t, y, dy| {
        // Collective decay: every excited collective amplitude damps at 2γ.
        dy[CG2] = -2.0 * i * g * root2 * y[CE2];
        dy[CE2] = -C64::new(2.0 * gamma, delta) * y[CE2] - i * g * y[CEE2] - i * g * root2 * y[CG2];
        dy[CEE2] = -C64::new(2.0 * gamma, 2.0 * delta) * y[CEE2] - 2.0 * i * g * y[CE2];
        dy[CG1] = -i * g * root2 * y[CE1];
        dy[CE1] = -C64::new(2.0 * gamma, delta) * y[CE1] - i * g * root2 * y[CG1];
        // Fed blocks: sources 4γ|C_e|² (one collective decay) and 2γ|C_ee|²
        // (the doubly-excited state dropping one excitation), exchange at
        // g√2, coherence damping 2γ ± iδ, excited population decay 4γ.
        let photon_source = C64::new(4.0 * gamma * y[CE2].norm_sqr(), 0.0);
        let excited_source = C64::new(2.0 * gamma * y[CEE2].norm_sqr(), 0.0);
        for base in [FED_B, FED_A] {
            let pop_g = y[base];
            let coh_eg = y[base + 1];
            let coh_ge = y[base + 2];
            let pop_e = y[base + 3];
            dy[base] = photon_source - i * g * root2 * (coh_eg - coh_ge);
            dy[base + 1] = -C64::new(2.0 * gamma, delta) * coh_eg - i * g * root2 * (pop_g - pop_e);
            dy[base + 2] =
                -C64::new(2.0 * gamma, -delta) * coh_ge + i * g * root2 * (pop_g - pop_e);
            dy[base + 3] =
                -4.0 * gamma * pop_e + i * g * root2 * (coh_eg - coh_ge) + excited_source;
        }
        dy[R2_00G] = 4.0 * gamma * (y[FED_B + 3] + y[FED_A + 3]);
        dy[R1_00G] = C64::new(4.0 * gamma * y[CE1].norm_sqr(), 0.0);
    }
}

fn two_atom_initial() -> Array1<C64> {
    let mut y = Array1::zeros(DIM);
    y[CG2] = C64::new(1.0, 0.0);
    y[CG1] = C64::new(1.0, 0.0);
    y
}

fn check_two_atom(params: &SystemParams) -> Result<()> {
    params.validate()?;
    if params.n_atoms != 2 || params.omega_rabi != 0.0 {
        return Err(Error::InvalidParams(
            "the two-atom cascade requires n_atoms = 2 and omega = 0".into(),
        ));
    }
    Ok(())
}

/// Integrate the two-atom cascade, validating conservation at every sample.
pub fn evolve_two_atom_cascade(
    params: &SystemParams,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<Vec<TwoAtomState>> {
    check_two_atom(params)?;
    let rhs = two_atom_rhs(params);
    let stride = stride.max(1);
    let mut out: Vec<TwoAtomState> = Vec::new();
    let mut violation = None;
    let mut count = 0usize;
    let last = rk4_evolve(&two_atom_initial(), t_final, dt, rhs, |t, y| {
        if count % stride == 0 && violation.is_none() {
            let state = TwoAtomState::from_vector(t, y);
            if let Err(e) = state.validate() {
                violation = Some(e);
            }
            out.push(state);
        }
        count += 1;
    })?;
    if let Some(e) = violation {
        return Err(e);
    }
    if out.last().map(|s| s.t) != Some(t_final) {
        let state = TwoAtomState::from_vector(t_final, &last);
        state.validate()?;
        out.push(state);
    }
    Ok(out)
}

fn report_from_state(state: &TwoAtomState) -> FidelityReport {
    let extra = 0.1 * state.rho1_00g
        + 0.05 * state.rho2_00g
        + 0.05 * (state.fed_b[3].re + state.fed_a[3].re)
        + 0.05 * (state.fed_b[0].re + state.fed_a[0].re);
    let loss_prob = 1.0 - state.amps.norm2_sqr();
    fidelity::report_from_amplitudes(&state.amps, extra, loss_prob.max(0.0))
}

/// Unconditional and conditional gate fidelity of the lossy two-atom system.
pub fn two_atom_gate_fidelity(params: &SystemParams) -> Result<FidelityReport> {
    two_atom_gate_fidelity_with(params, DEFAULT_DT)
}

pub fn two_atom_gate_fidelity_with(params: &SystemParams, dt: f64) -> Result<FidelityReport> {
    check_two_atom(params)?;
    let rhs = two_atom_rhs(params);
    let last = rk4_evolve(&two_atom_initial(), params.t_final, dt, rhs, |_, _| {})?;
    let state = TwoAtomState::from_vector(params.t_final, &last);
    state.validate()?;
    Ok(report_from_state(&state))
}

/// Unconditional fidelity at several interaction times in one pass.
pub fn two_atom_fidelity_time_sweep(
    delta: f64,
    gamma: f64,
    times: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    let params = SystemParams::in_units_of_g(delta, gamma, 0.0, 2, 0.0)?;
    let rhs = two_atom_rhs(&params);
    let mut out = Vec::with_capacity(times.len());
    rk4_at_times(&two_atom_initial(), times, dt, rhs, |idx, y| {
        let state = TwoAtomState::from_vector(times[idx], y);
        out.push(report_from_state(&state).f_uncond);
    })?;
    Ok(out)
}

/// Collective jump operator: lowers ψ_a → √2·gg and ψ_ab → ψ_b (side `a`),
/// or the mirror (side `b`), acting trivially on the photons.
pub fn collective_jump(basis: &BasisEnumeration, side_a: bool) -> Array2<C64> {
    let dim = basis.len();
    let mut j = Array2::<C64>::zeros((dim, dim));
    let (single, double_from, double_to) = if side_a {
        (AtomLevel::PsiA, AtomLevel::PsiAb, AtomLevel::PsiB)
    } else {
        (AtomLevel::PsiB, AtomLevel::PsiAb, AtomLevel::PsiA)
    };
    for (k, label) in basis.labels.iter().enumerate() {
        if label.atom == single {
            let tgt = basis.index(&label.photons, AtomLevel::G).unwrap();
            j[(tgt, k)] = C64::new(2f64.sqrt(), 0.0);
        } else if label.atom == double_from {
            let tgt = basis.index(&label.photons, double_to).unwrap();
            j[(tgt, k)] = C64::new(1.0, 0.0);
        }
    }
    j
}

/// Full master equation of the two-atom system on the 16-dimensional
/// collective basis.
pub fn two_atom_lindblad_spec(params: &SystemParams) -> Result<(LindbladSpec, BasisEnumeration)> {
    params.validate()?;
    let basis = enumerate_basis(Scheme::TwoAtomCollectiveV, 2)?;
    let dim = basis.len();
    let g2 = params.g * 2f64.sqrt();
    let mut h = Array2::<C64>::zeros((dim, dim));
    for (k, label) in basis.labels.iter().enumerate() {
        let (na, nb) = (label.photons[0], label.photons[1]);
        match label.atom {
            AtomLevel::PsiA | AtomLevel::PsiB => h[(k, k)] = C64::new(params.delta, 0.0),
            AtomLevel::PsiAb => h[(k, k)] = C64::new(2.0 * params.delta, 0.0),
            _ => {}
        }
        let mut couple = |target: Option<usize>, strength: f64| {
            if let Some(j) = target {
                h[(j, k)] = C64::new(strength, 0.0);
                h[(k, j)] = C64::new(strength, 0.0);
            }
        };
        match label.atom {
            AtomLevel::G => {
                if na > 0 {
                    couple(
                        basis.index(&[na - 1, nb], AtomLevel::PsiA),
                        g2 * (na as f64).sqrt(),
                    );
                }
                if nb > 0 {
                    couple(
                        basis.index(&[na, nb - 1], AtomLevel::PsiB),
                        g2 * (nb as f64).sqrt(),
                    );
                }
            }
            AtomLevel::PsiB if na > 0 => {
                couple(
                    basis.index(&[na - 1, nb], AtomLevel::PsiAb),
                    params.g * (na as f64).sqrt(),
                );
            }
            AtomLevel::PsiA if nb > 0 => {
                couple(
                    basis.index(&[na, nb - 1], AtomLevel::PsiAb),
                    params.g * (nb as f64).sqrt(),
                );
            }
            _ => {}
        }
    }
    let jumps = vec![
        (params.gamma, collective_jump(&basis, true)),
        (params.gamma, collective_jump(&basis, false)),
    ];
    Ok((LindbladSpec::new(h, jumps)?, basis))
}

/// Fidelity via brute-force master-equation runs on the collective basis;
/// the oracle for [`two_atom_gate_fidelity`].
pub fn two_atom_lindblad_fidelity(params: &SystemParams, dt: f64) -> Result<f64> {
    let (spec, basis) = two_atom_lindblad_spec(params)?;
    let idx = SectorIndex::from_basis(&basis)?;
    master_fidelity(&spec, &idx, params.t_final, dt)
}
