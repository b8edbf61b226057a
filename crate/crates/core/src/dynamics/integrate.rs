use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::Boundary;
use crate::emitter_model::{EffectiveHamiltonian, SingleExcitationState};
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Default RK4 step as a fraction of `1 / ||H||_inf`.
pub const DEFAULT_STEP_FRACTION: f64 = 0.01;

/// Edge amplitude above which an open-boundary run is flagged.
pub const EDGE_GUARD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum Integrator {
    /// Classical fixed-step RK4 with `dt <= step_fraction / ||H||_inf`.
    Rk4 { step_fraction: f64 },
    /// Dormand-Prince 5(4) with error control relative to the state norm.
    Adaptive { rtol: f64 },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Rk4 {
            step_fraction: DEFAULT_STEP_FRACTION,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub integrator: Integrator,
    pub record_snapshots: bool,
    /// Record a snapshot at every n-th grid time.
    pub snapshot_every: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            integrator: Integrator::default(),
            record_snapshots: true,
            snapshot_every: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub c_x: Vec<Complex64>,
}

/// First time an open lattice edge picked up amplitude above [`EDGE_GUARD`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryWarning {
    pub t: f64,
    pub site: usize,
    pub amplitude: f64,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub c_e_series: Vec<Complex64>,
    pub snapshots: Vec<Snapshot>,
    pub photon_population_series: Vec<f64>,
    pub ground_prob_series: Vec<f64>,
    pub boundary_warning: Option<BoundaryWarning>,
    pub steps: usize,
    pub final_state: SingleExcitationState,
}

impl EvolutionResult {
    /// `|c_e(t)|^2` at each recorded time.
    pub fn emitter_population(&self) -> Vec<f64> {
        self.c_e_series.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Total norm `|c_e|^2 + sum |c_x|^2` at each recorded time.
    pub fn norm_series(&self) -> Vec<f64> {
        self.c_e_series
            .iter()
            .zip(&self.photon_population_series)
            .map(|(c, p)| c.norm_sqr() + p)
            .collect()
    }
}

/// `n` uniformly spaced times from 0 to `t_max` inclusive.
pub fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a time grid needs at least two points");
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

/// Integrates `d psi / dt = -i H psi` from the excited emitter.
pub fn evolve_numeric(h: &EffectiveHamiltonian, t_grid: &[f64], opts: &EvolveOptions) -> Result<EvolutionResult> {
    let initial = SingleExcitationState::excited_emitter(h.bath().length);
    evolve_state(h, &initial, t_grid, opts)
}

/// Integrates from an arbitrary single-excitation state.
pub fn evolve_state(
    h: &EffectiveHamiltonian,
    initial: &SingleExcitationState,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<EvolutionResult> {
    if t_grid.is_empty() || t_grid[0] != 0.0 {
        return Err(Error::InvalidArgument("time grid must start at t = 0".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
    }
    if initial.c_x.len() != h.bath().length {
        return Err(Error::InvalidArgument(format!(
            "initial state has {} sites, lattice has {}",
            initial.c_x.len(),
            h.bath().length
        )));
    }
    let matrix = h.matrix();
    let norm = matrix.inf_norm().max(f64::MIN_POSITIVE);
    let mut stepper = Stepper::new(matrix, opts.integrator, norm)?;
    let edges = edge_sites(h);
    let every = opts.snapshot_every.max(1);

    let mut psi = initial.to_flat();
    let mut out = EvolutionResult {
        times: Vec::with_capacity(t_grid.len()),
        c_e_series: Vec::with_capacity(t_grid.len()),
        snapshots: Vec::new(),
        photon_population_series: Vec::with_capacity(t_grid.len()),
        ground_prob_series: Vec::with_capacity(t_grid.len()),
        boundary_warning: None,
        steps: 0,
        final_state: initial.clone(),
    };
    let last = t_grid.len() - 1;
    for (idx, &t) in t_grid.iter().enumerate() {
        if idx > 0 {
            stepper.advance(&mut psi, t_grid[idx - 1], t)?;
        }
        let photons: f64 = psi[1..].iter().map(|c| c.norm_sqr()).sum();
        out.times.push(t);
        out.c_e_series.push(psi[0]);
        out.photon_population_series.push(photons);
        out.ground_prob_series.push(1.0 - psi[0].norm_sqr() - photons);
        if opts.record_snapshots && idx % every == 0 {
            out.snapshots.push(Snapshot { t, c_x: psi[1..].to_vec() });
        }
        if idx < last && out.boundary_warning.is_none() {
            for &site in &edges {
                let a = psi[1 + site].norm();
                if a > EDGE_GUARD {
                    warn!("photon amplitude {a:.3e} reached open edge site {site} at t = {t}");
                    out.boundary_warning = Some(BoundaryWarning { t, site, amplitude: a });
                    break;
                }
            }
        }
    }
    out.steps = stepper.steps;
    out.final_state = SingleExcitationState::from_flat(&psi);
    Ok(out)
}

fn edge_sites(h: &EffectiveHamiltonian) -> Vec<usize> {
    if h.bath().boundary != Boundary::Open {
        return Vec::new();
    }
    let l = h.bath().length;
    let x0 = h.emitter().x0;
    [0, l - 1]
        .into_iter()
        .filter(|&e| e.abs_diff(x0) > 1)
        .collect()
}

struct Stepper<'a> {
    matrix: &'a SparseMatrix,
    integrator: Integrator,
    max_dt: f64,
    // adaptive step carried between grid intervals
    dt: f64,
    k: Vec<Vec<Complex64>>,
    tmp: Vec<Complex64>,
    steps: usize,
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl<'a> Stepper<'a> {
    fn new(matrix: &'a SparseMatrix, integrator: Integrator, norm: f64) -> Result<Self> {
        let (max_dt, stages) = match integrator {
            Integrator::Rk4 { step_fraction } => {
                if !(step_fraction > 0.0 && step_fraction <= 0.1) {
                    return Err(Error::InvalidArgument(format!(
                        "RK4 step fraction must lie in (0, 0.1] (got {step_fraction})"
                    )));
                }
                (step_fraction / norm, 4)
            }
            Integrator::Adaptive { rtol } => {
                if !(rtol > 0.0 && rtol < 1e-2) {
                    return Err(Error::InvalidArgument(format!("adaptive rtol must lie in (0, 1e-2) (got {rtol})")));
                }
                (f64::INFINITY, 7)
            }
        };
        let n = matrix.dim();
        Ok(Stepper {
            matrix,
            integrator,
            max_dt,
            dt: 0.1 / norm,
            k: vec![vec![Complex64::new(0.0, 0.0); n]; stages],
            tmp: vec![Complex64::new(0.0, 0.0); n],
            steps: 0,
        })
    }

    // out = -i H v
    fn rhs(matrix: &SparseMatrix, v: &[Complex64], out: &mut [Complex64]) {
        matrix.matvec_into(v, out);
        for o in out.iter_mut() {
            *o = Complex64::new(o.im, -o.re);
        }
    }

    fn advance(&mut self, psi: &mut [Complex64], t0: f64, t1: f64) -> Result<()> {
        match self.integrator {
            Integrator::Rk4 { .. } => {
                let span = t1 - t0;
                let n = (span / self.max_dt).ceil().max(1.0) as usize;
                let dt = span / n as f64;
                for _ in 0..n {
                    self.rk4_step(psi, dt);
                }
                Ok(())
            }
            Integrator::Adaptive { rtol } => self.adaptive(psi, t0, t1, rtol),
        }
    }

    fn rk4_step(&mut self, psi: &mut [Complex64], dt: f64) {
        let (k1, rest) = self.k.split_at_mut(1);
        let (k2, rest) = rest.split_at_mut(1);
        let (k3, k4) = rest.split_at_mut(1);
        let (k1, k2, k3, k4) = (&mut k1[0], &mut k2[0], &mut k3[0], &mut k4[0]);
        let tmp = &mut self.tmp;
        Self::rhs(self.matrix, psi, k1);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k1[i] * (0.5 * dt);
        }
        Self::rhs(self.matrix, tmp, k2);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k2[i] * (0.5 * dt);
        }
        Self::rhs(self.matrix, tmp, k3);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k3[i] * dt;
        }
        Self::rhs(self.matrix, tmp, k4);
        let w = dt / 6.0;
        for i in 0..psi.len() {
            psi[i] += (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) * w;
        }
        self.steps += 1;
    }

    fn adaptive(&mut self, psi: &mut [Complex64], t0: f64, t1: f64, rtol: f64) -> Result<()> {
        let n = psi.len();
        let mut t = t0;
        let mut y_new = vec![Complex64::new(0.0, 0.0); n];
        while t < t1 {
            let mut dt = self.dt.min(t1 - t);
            if dt < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::StepSizeUnderflow { t });
            }
            let last_piece = t + dt >= t1 * (1.0 - 1e-15);
            if last_piece {
                dt = t1 - t;
            }
            Self::rhs(self.matrix, psi, &mut self.k[0]);
            for s in 0..6 {
                for i in 0..n {
                    let mut acc = psi[i];
                    for (j, a) in A[s].iter().enumerate().take(s + 1) {
                        if *a != 0.0 {
                            acc += self.k[j][i] * (a * dt);
                        }
                    }
                    self.tmp[i] = acc;
                }
                let (_, tail) = self.k.split_at_mut(s + 1);
                Self::rhs(self.matrix, &self.tmp, &mut tail[0]);
            }
            // stage 7 was evaluated at the 5th-order solution (FSAL row)
            let mut err_sq = 0.0;
            let mut y_sq = 0.0;
            let mut ynew_sq = 0.0;
            for i in 0..n {
                let mut acc = psi[i];
                let mut err = Complex64::new(0.0, 0.0);
                for s in 0..7 {
                    acc += self.k[s][i] * (B5[s] * dt);
                    err += self.k[s][i] * (ERR[s] * dt);
                }
                y_new[i] = acc;
                err_sq += err.norm_sqr();
                y_sq += psi[i].norm_sqr();
                ynew_sq += acc.norm_sqr();
            }
            let scale = rtol * y_sq.max(ynew_sq).sqrt() + f64::MIN_POSITIVE;
            let ratio = err_sq.sqrt() / scale;
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            if ratio <= 1.0 {
                psi.copy_from_slice(&y_new);
                t = if last_piece { t1 } else { t + dt };
                self.steps += 1;
                if !last_piece || factor < 1.0 {
                    self.dt = dt * factor;
                }
            } else {
                self.dt = dt * factor;
            }
        }
        Ok(())
    }
}

/// `sum_x |c_x(t)|^2` for every recorded snapshot, as `(t, population)`.
pub fn photon_population_series(result: &EvolutionResult) -> Result<Vec<(f64, f64)>> {
    if result.snapshots.is_empty() {
        return Err(Error::InvalidArgument("evolution recorded no snapshots".into()));
    }
    Ok(result
        .snapshots
        .iter()
        .map(|s| (s.t, s.c_x.iter().map(|c| c.norm_sqr()).sum()))
        .collect())
}
