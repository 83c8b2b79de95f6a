//! Brute-force master-equation integrator.
//!
//! Evolves dρ/dt = −i[H,ρ] − Σ_l γ_l (ρ J_l†J_l + J_l†J_l ρ − 2 J_l ρ J_l†)
//! by RK4 on the full density matrix. The rate convention keeps γ as an
//! amplitude decay rate: the population of a decaying level falls at 2γ.
//!
//! This integrator is the oracle every faster manifold decomposition in the
//! crate is checked against; it trades speed for directness.
//!
//! ```
//! use cphase::lindblad::{integrate_lindblad, LindbladSpec};
//! use ndarray::Array2;
//! use num_complex::Complex64 as C64;
//!
//! // Free decay of a two-level atom: population falls as exp(−2γt).
//! let gamma = 0.3;
//! let h = Array2::<C64>::zeros((2, 2));
//! let mut j = Array2::<C64>::zeros((2, 2));
//! j[(0, 1)] = C64::new(1.0, 0.0);
//! let spec = LindbladSpec::new(h, vec![(gamma, j)])?;
//! let mut rho0 = Array2::<C64>::zeros((2, 2));
//! rho0[(1, 1)] = C64::new(1.0, 0.0);
//! let traj = integrate_lindblad(&spec, &rho0, 2.0, 1e-3, 100)?;
//! let pe = traj.final_state()[(1, 1)].re;
//! assert!((pe - (-2.0 * gamma * 2.0f64).exp()).abs() < 1e-9);
//! # Ok::<(), cphase::Error>(())
//! ```

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, trace};
use crate::ode::rk4_evolve;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-8;
const EIGENVALUE_FLOOR: f64 = -1e-8;

/// Hamiltonian plus weighted jump operators over one enumerated basis.
pub struct LindbladSpec {
    pub hamiltonian: Array2<C64>,
    /// (rate, operator) pairs; the rate multiplies the full dissipator bracket.
    pub jumps: Vec<(f64, Array2<C64>)>,
}

#[derive(Clone, Copy)]
struct Triplet {
    row: usize,
    col: usize,
    val: C64,
}

fn triplets(m: &Array2<C64>) -> Vec<Triplet> {
    let mut out = Vec::new();
    for ((row, col), &val) in m.indexed_iter() {
        if val.norm() > 0.0 {
            out.push(Triplet { row, col, val });
        }
    }
    out
}

/// Precomputed sparse form of the superoperator.
///
/// With M = −iH − Σ_l γ_l J_l†J_l the coherent and damping parts combine
/// into dρ = Mρ + (Mρ†)† + Σ_l 2γ_l J_l ρ J_l†, which runs as contiguous
/// row operations.
struct Superop {
    dim: usize,
    m_eff: Vec<Triplet>,
    /// (2γ_l, J_l triplets) for the refill term +2γ_l J ρ J†.
    refills: Vec<(f64, Vec<Triplet>)>,
}

impl LindbladSpec {
    pub fn new(hamiltonian: Array2<C64>, jumps: Vec<(f64, Array2<C64>)>) -> Result<Self> {
        if hamiltonian.nrows() != hamiltonian.ncols() {
            return Err(Error::InvalidParams("Hamiltonian must be square".into()));
        }
        if hermiticity_defect(&hamiltonian) > HERMITICITY_TOL {
            return Err(Error::InvalidParams(
                "Hamiltonian is not Hermitian to 1e-12".into(),
            ));
        }
        for (rate, op) in &jumps {
            if *rate < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "jump rate must be >= 0, got {rate}"
                )));
            }
            if op.raw_dim() != hamiltonian.raw_dim() {
                return Err(Error::InvalidParams(
                    "jump operator shape differs from the Hamiltonian".into(),
                ));
            }
        }
        Ok(LindbladSpec { hamiltonian, jumps })
    }

    pub fn dimension(&self) -> usize {
        self.hamiltonian.nrows()
    }

    fn superop(&self) -> Superop {
        let dim = self.dimension();
        let mut m_eff = self.hamiltonian.mapv(|z| z * C64::new(0.0, -1.0));
        let mut refills = Vec::new();
        for (rate, j) in &self.jumps {
            if *rate == 0.0 {
                continue;
            }
            let jdagj = j.t().mapv(|z| z.conj()).dot(j);
            m_eff -= &jdagj.mapv(|z| z * *rate);
            refills.push((2.0 * rate, triplets(j)));
        }
        Superop {
            dim,
            m_eff: triplets(&m_eff),
            refills,
        }
    }
}

/// States reachable from `seed_states` along the generator's couplings; the
/// evolution of a matrix supported there never leaves the closure, so runs
/// can be restricted to it.
fn support_closure(superop: &Superop, dim: usize, seed_states: &[usize]) -> Vec<usize> {
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); dim];
    for t in &superop.m_eff {
        if t.row != t.col {
            adjacency[t.col].push(t.row);
            // Hermitian couplings go both ways; damping diagonals do not add
            // edges.
            adjacency[t.row].push(t.col);
        }
    }
    for (_, j_triplets) in &superop.refills {
        for t in j_triplets {
            adjacency[t.col].push(t.row);
        }
    }
    let mut seen = vec![false; dim];
    let mut stack: Vec<usize> = seed_states.to_vec();
    for &s in seed_states {
        seen[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &nxt in &adjacency[s] {
            if !seen[nxt] {
                seen[nxt] = true;
                stack.push(nxt);
            }
        }
    }
    (0..dim).filter(|&i| seen[i]).collect()
}

/// A superoperator restricted to a reachable subspace, with embed/extract
/// maps back to the full basis.
struct ReducedRun {
    superop: Superop,
    support: Vec<usize>,
}

impl ReducedRun {
    fn new(spec: &LindbladSpec, seed: &Array2<C64>) -> Self {
        let full = spec.superop();
        let dim = spec.dimension();
        let mut seed_states: Vec<usize> = Vec::new();
        for ((i, j), v) in seed.indexed_iter() {
            if v.norm() > 0.0 {
                seed_states.push(i);
                seed_states.push(j);
            }
        }
        seed_states.sort_unstable();
        seed_states.dedup();
        let support = support_closure(&full, dim, &seed_states);
        if support.len() == dim {
            return ReducedRun {
                superop: full,
                support,
            };
        }
        let mut position = vec![usize::MAX; dim];
        for (k, &s) in support.iter().enumerate() {
            position[s] = k;
        }
        let reduce = |ts: &[Triplet]| -> Vec<Triplet> {
            ts.iter()
                .filter(|t| position[t.row] != usize::MAX && position[t.col] != usize::MAX)
                .map(|t| Triplet {
                    row: position[t.row],
                    col: position[t.col],
                    val: t.val,
                })
                .collect()
        };
        let superop = Superop {
            dim: support.len(),
            m_eff: reduce(&full.m_eff),
            refills: full
                .refills
                .iter()
                .map(|(w, ts)| (*w, reduce(ts)))
                .collect(),
        };
        ReducedRun { superop, support }
    }

    fn project(&self, full: &Array2<C64>) -> Array2<C64> {
        let n = self.support.len();
        let mut out = Array2::zeros((n, n));
        for (a, &i) in self.support.iter().enumerate() {
            for (b, &j) in self.support.iter().enumerate() {
                out[(a, b)] = full[(i, j)];
            }
        }
        out
    }

    fn embed(&self, reduced: &Array2<C64>, dim: usize) -> Array2<C64> {
        let mut out = Array2::zeros((dim, dim));
        for (a, &i) in self.support.iter().enumerate() {
            for (b, &j) in self.support.iter().enumerate() {
                out[(i, j)] = reduced[(a, b)];
            }
        }
        out
    }
}

impl Superop {
    /// out = Mρ + (Mρ†)† + Σ 2γ JρJ†
    fn apply(&self, rho: &Array2<C64>, out: &mut Array2<C64>) {
        let n = self.dim;
        out.fill(C64::new(0.0, 0.0));
        let rho_s = rho.as_slice().expect("density matrix is contiguous");
        // ρ† in row-major form.
        let mut adj = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                adj[i * n + j] = rho_s[j * n + i].conj();
            }
        }
        // q accumulates Mρ†; its adjoint lands in `out` afterwards.
        let mut q = vec![C64::new(0.0, 0.0); n * n];
        {
            let out_s = out.as_slice_mut().expect("contiguous");
            for t in &self.m_eff {
                let w = t.val;
                let src = &rho_s[t.col * n..(t.col + 1) * n];
                let dst = &mut out_s[t.row * n..(t.row + 1) * n];
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d += w * s;
                }
                let src = &adj[t.col * n..(t.col + 1) * n];
                let dst = &mut q[t.row * n..(t.row + 1) * n];
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d += w * s;
                }
            }
            for i in 0..n {
                for j in 0..n {
                    out_s[i * n + j] += q[j * n + i].conj();
                }
            }
        }
        for (w, j_triplets) in &self.refills {
            for a in j_triplets {
                for b in j_triplets {
                    out[(a.row, b.row)] += a.val * rho[(a.col, b.col)] * b.val.conj() * *w;
                }
            }
        }
    }
}

/// Sampled density matrices; the last entry is the final state.
#[derive(Debug, Clone)]
pub struct DensityTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Array2<C64>>,
}

impl DensityTrajectory {
    pub fn final_state(&self) -> &Array2<C64> {
        self.states.last().expect("trajectory is never empty")
    }
}

fn check_physical(rho: &Array2<C64>, t: f64, check_positivity: bool) -> Result<()> {
    let tr = trace(rho);
    let drift = (tr - C64::new(1.0, 0.0)).norm();
    if drift > TRACE_TOL {
        return Err(Error::Physicality {
            check: "trace preservation",
            t,
            magnitude: drift,
        });
    }
    let herm = hermiticity_defect(rho);
    if herm > 1e-10 {
        return Err(Error::Physicality {
            check: "Hermiticity",
            t,
            magnitude: herm,
        });
    }
    if check_positivity {
        let min = hermitian_eigenvalues(rho).first().copied().unwrap_or(0.0);
        if min < EIGENVALUE_FLOOR {
            return Err(Error::Physicality {
                check: "positivity",
                t,
                magnitude: min,
            });
        }
    }
    Ok(())
}

/// Integrate the master equation from a physical state `rho0`.
///
/// Trace and Hermiticity are verified at every sampled time, positivity
/// (smallest eigenvalue ≥ −1e-8) likewise; violations abort with the time
/// stamp.
pub fn integrate_lindblad(
    spec: &LindbladSpec,
    rho0: &Array2<C64>,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<DensityTrajectory> {
    if rho0.raw_dim() != spec.hamiltonian.raw_dim() {
        return Err(Error::InvalidParams(
            "initial density matrix shape differs from the Hamiltonian".into(),
        ));
    }
    check_physical(rho0, 0.0, true)?;
    let dim = spec.dimension();
    let run = ReducedRun::new(spec, rho0);
    let y0 = run.project(rho0);
    let stride = stride.max(1);
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut count = 0usize;
    let mut violation: Option<Error> = None;
    let last = rk4_evolve(
        &y0,
        t_final,
        dt,
        |_t, y, dydt| run.superop.apply(y, dydt),
        |t, y| {
            if count % stride == 0 && violation.is_none() {
                if let Err(e) = check_physical(y, t, true) {
                    violation = Some(e);
                }
                times.push(t);
                states.push(run.embed(y, dim));
            }
            count += 1;
        },
    )?;
    if let Some(e) = violation {
        return Err(e);
    }
    if times.last().copied() != Some(t_final) {
        check_physical(&last, t_final, true)?;
        times.push(t_final);
        states.push(run.embed(&last, dim));
    }
    Ok(DensityTrajectory { times, states })
}

/// Apply the (linear) Lindblad map to an arbitrary matrix seed.
///
/// Used for coherence blocks such as |01⟩⟨11| that are not density matrices;
/// no physicality checks apply.
pub fn propagate_matrix(
    spec: &LindbladSpec,
    seed: &Array2<C64>,
    t_final: f64,
    dt: f64,
) -> Result<Array2<C64>> {
    let run = ReducedRun::new(spec, seed);
    let last = rk4_evolve(
        &run.project(seed),
        t_final,
        dt,
        |_t, y, dydt| run.superop.apply(y, dydt),
        |_, _| {},
    )?;
    Ok(run.embed(&last, spec.dimension()))
}

/// Integrate once to `times.last()`, invoking `observe(k, state)` exactly at
/// each requested time. `times` must be sorted ascending and start at ≥ 0.
///
/// Each segment between consecutive sample times is integrated with a step
/// adjusted to divide the segment exactly, so the samples carry no
/// interpolation error.
pub fn propagate_sampled<F>(
    spec: &LindbladSpec,
    seed: &Array2<C64>,
    times: &[f64],
    dt: f64,
    mut observe: F,
) -> Result<()>
where
    F: FnMut(usize, &Array2<C64>),
{
    let run = ReducedRun::new(spec, seed);
    let dim = spec.dimension();
    let mut state = run.project(seed);
    let mut t = 0.0;
    for (k, &target) in times.iter().enumerate() {
        if target < t - 1e-12 {
            return Err(Error::InvalidParams(
                "sample times must be sorted ascending".into(),
            ));
        }
        let span = (target - t).max(0.0);
        if span > 0.0 {
            let n = (span / dt).ceil().max(1.0);
            let h = span / n;
            state = rk4_evolve(
                &state,
                span,
                h,
                |_t, y, dydt| run.superop.apply(y, dydt),
                |_, _| {},
            )?;
        }
        t = target;
        observe(k, &run.embed(&state, dim));
    }
    Ok(())
}

/// Tr(ρ²), the purity of a state.
pub fn purity(rho: &Array2<C64>) -> f64 {
    crate::linalg::trace_of_product(rho, rho).re
}
