//! Fixed-step RK4 integration for small complex ODE systems.
//!
//! One stepping routine serves every solver in the crate: state vectors
//! (amplitude equations, manifold cascades) and density matrices share the
//! same accuracy budget. The step is fixed, with the final step shortened to
//! land exactly on `t_final`, which keeps results bit-reproducible.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// State that RK4 can advance: element-wise linear arithmetic is enough.
pub trait Rk4State: Clone {
    fn zeros_like(&self) -> Self;
    /// self += c * other
    fn scaled_add(&mut self, c: f64, other: &Self);
    fn is_finite(&self) -> bool;
}

impl Rk4State for Array1<C64> {
    fn zeros_like(&self) -> Self {
        Array1::zeros(self.len())
    }

    fn scaled_add(&mut self, c: f64, other: &Self) {
        self.zip_mut_with(other, |a, &b| *a += b * c);
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Rk4State for Array2<C64> {
    fn zeros_like(&self) -> Self {
        Array2::zeros(self.raw_dim())
    }

    fn scaled_add(&mut self, c: f64, other: &Self) {
        self.zip_mut_with(other, |a, &b| *a += b * c);
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

fn rk4_step<S, F>(rhs: &mut F, t: f64, y: &S, dt: f64, k: &mut [S; 4], scratch: &mut S) -> S
where
    S: Rk4State,
    F: FnMut(f64, &S, &mut S),
{
    rhs(t, y, &mut k[0]);

    scratch.clone_from(y);
    scratch.scaled_add(0.5 * dt, &k[0]);
    rhs(t + 0.5 * dt, scratch, &mut k[1]);

    scratch.clone_from(y);
    scratch.scaled_add(0.5 * dt, &k[1]);
    rhs(t + 0.5 * dt, scratch, &mut k[2]);

    scratch.clone_from(y);
    scratch.scaled_add(dt, &k[2]);
    rhs(t + dt, scratch, &mut k[3]);

    let mut out = y.clone();
    out.scaled_add(dt / 6.0, &k[0]);
    out.scaled_add(dt / 3.0, &k[1]);
    out.scaled_add(dt / 3.0, &k[2]);
    out.scaled_add(dt / 6.0, &k[3]);
    out
}

/// Advance `y0` to `t_final` calling `observe(t, y)` at every step boundary
/// (including t = 0 and the shortened final step). Returns the final state.
pub fn rk4_evolve<S, F, O>(y0: &S, t_final: f64, dt: f64, mut rhs: F, mut observe: O) -> Result<S>
where
    S: Rk4State,
    F: FnMut(f64, &S, &mut S),
    O: FnMut(f64, &S),
{
    if !(dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
    }
    if !(t_final >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "t_final must be >= 0, got {t_final}"
        )));
    }
    let mut y = y0.clone();
    let mut k = [
        y.zeros_like(),
        y.zeros_like(),
        y.zeros_like(),
        y.zeros_like(),
    ];
    let mut scratch = y.zeros_like();
    observe(0.0, &y);
    let mut t = 0.0;
    let mut step = 0u64;
    while t < t_final {
        let h = dt.min(t_final - t);
        y = rk4_step(&mut rhs, t, &y, h, &mut k, &mut scratch);
        step += 1;
        t = if h < dt { t_final } else { step as f64 * dt };
        if !y.is_finite() {
            return Err(Error::NonFinite { t });
        }
        observe(t, &y);
    }
    Ok(y)
}

/// Advance `y0` through the sorted `times`, calling `observe(k, y)` exactly
/// at each one. Segments between samples use a step adjusted to divide the
/// segment, so the samples carry no interpolation error.
pub fn rk4_at_times<S, F, O>(
    y0: &S,
    times: &[f64],
    dt: f64,
    mut rhs: F,
    mut observe: O,
) -> Result<S>
where
    S: Rk4State,
    F: FnMut(f64, &S, &mut S),
    O: FnMut(usize, &S),
{
    if !(dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
    }
    let mut y = y0.clone();
    let mut k = [
        y.zeros_like(),
        y.zeros_like(),
        y.zeros_like(),
        y.zeros_like(),
    ];
    let mut scratch = y.zeros_like();
    let mut t = 0.0;
    for (idx, &target) in times.iter().enumerate() {
        if target < t - 1e-12 {
            return Err(Error::InvalidParams(
                "sample times must be sorted ascending and >= 0".into(),
            ));
        }
        let span = (target - t).max(0.0);
        if span > 0.0 {
            let n = (span / dt).ceil().max(1.0) as u64;
            let h = span / n as f64;
            for step in 0..n {
                let t_local = t + step as f64 * h;
                y = rk4_step(&mut rhs, t_local, &y, h, &mut k, &mut scratch);
            }
            if !y.is_finite() {
                return Err(Error::NonFinite { t: target });
            }
        }
        t = target;
        observe(idx, &y);
    }
    Ok(y)
}

/// Time-independent linear system d(state)/dt = M·state + s(t).
pub struct LinearSystem {
    pub generator: Array2<C64>,
    pub source: Option<Box<dyn Fn(f64) -> Array1<C64> + Sync>>,
}

impl LinearSystem {
    pub fn homogeneous(generator: Array2<C64>) -> Self {
        LinearSystem {
            generator,
            source: None,
        }
    }

    pub fn dimension(&self) -> usize {
        self.generator.nrows()
    }
}

/// Sampled states of an integration; the last entry is the final state.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Array1<C64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &Array1<C64> {
        self.states.last().expect("trajectory is never empty")
    }
}

/// RK4 integration of a [`LinearSystem`], sampling every `stride` steps.
pub fn integrate_linear(
    sys: &LinearSystem,
    initial: &Array1<C64>,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    if initial.len() != sys.dimension() {
        return Err(Error::InvalidParams(format!(
            "initial state has dimension {}, generator expects {}",
            initial.len(),
            sys.dimension()
        )));
    }
    let stride = stride.max(1);
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut count = 0usize;
    let rhs = |t: f64, y: &Array1<C64>, dydt: &mut Array1<C64>| {
        dydt.fill(C64::new(0.0, 0.0));
        for (i, row) in sys.generator.rows().into_iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (m, yk) in row.iter().zip(y.iter()) {
                acc += m * yk;
            }
            dydt[i] = acc;
        }
        if let Some(src) = &sys.source {
            let s = src(t);
            dydt.zip_mut_with(&s, |a, &b| *a += b);
        }
    };
    let last = rk4_evolve(initial, t_final, dt, rhs, |t, y| {
        if count % stride == 0 {
            times.push(t);
            states.push(y.clone());
        }
        count += 1;
    })?;
    if times.last().copied() != Some(t_final) {
        times.push(t_final);
        states.push(last);
    }
    Ok(Trajectory { times, states })
}
