//! Emitter self-energy, bound-state energies and photon profiles.
//!
//! Three routes are provided: the closed form for the unidirectional
//! lattice in the thermodynamic limit, direct diagonalization of the
//! finite effective Hamiltonian, and Newton refinement of
//! `E - Delta - Sigma_L(E) = 0` with the finite momentum sum. They are
//! cross-checked against each other in the tests.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::bath::{BathSpec, Boundary, Lattice};
use crate::emitter_model::{EffectiveHamiltonian, EmitterSpec};
use crate::error::{Error, Result};
use crate::linfit::fit_line;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Amplitudes at or below this magnitude are treated as numerically zero
/// when fitting exponential tails.
pub const TAIL_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LoopClass {
    /// Energy enclosed by the periodic-boundary spectral loop (skin-effect
    /// origin, pinned at the detuning).
    InsideLoop,
    /// Energy outside the loop; behaves like a Hermitian bound state.
    OutsideLoop,
    /// The bath spectrum encloses no area (alternating-loss lattice).
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalizationFit {
    /// Localization length in sites; infinite for a non-decaying profile.
    pub xi: f64,
    pub r_squared: f64,
    pub side: Side,
    pub sites: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundState {
    pub energy: Complex64,
    /// `|c_e|^2` of the unit-norm eigenvector.
    pub emitter_weight: f64,
    /// Emitter amplitude, phase-fixed to be real and positive.
    pub emitter_amplitude: Complex64,
    /// Photon amplitudes `c_x` for every lattice site.
    pub profile: Vec<Complex64>,
    /// Exponential tail fit; `None` for a decoupled emitter with no photon
    /// component.
    pub tail: Option<LocalizationFit>,
    pub loop_class: LoopClass,
}

impl BoundState {
    pub fn xi(&self) -> Option<f64> {
        self.tail.map(|t| t.xi)
    }
}

/// Bound state of the unidirectional lattice in the thermodynamic limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosedFormBoundState {
    pub energy: Complex64,
    pub loop_class: LoopClass,
    pub emitter_weight: f64,
    /// `None` when `g = 0` (no photon component).
    pub xi: Option<f64>,
}

/// Gates used to pick bound states out of a full diagonalization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchOptions {
    /// Minimum emitter weight `|c_e|^2`.
    pub weight_threshold: f64,
    /// Number of sites next to the emitter used for the tail fit.
    pub tail_window: usize,
    /// Minimum `R^2` of the fit of `ln|c_x|` against distance.
    pub min_r_squared: f64,
    /// Minimum e-folding count `L / xi` of the tail across the lattice.
    /// On a ring every dressed band mode has an exact exponential profile
    /// with `xi` of order `L`; this gate sets them apart.
    pub min_tail_decay: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            weight_threshold: 1e-3,
            tail_window: 20,
            min_r_squared: 0.99,
            min_tail_decay: 1000f64.ln(),
        }
    }
}

fn check_off_spectrum(bath: &BathSpec, e: Complex64) -> Result<()> {
    let distance = bath.distance_to_spectrum(e, bath.cells());
    if distance <= 1e-9 * bath.energy_scale() {
        Err(Error::PoleCollision { energy: e, distance })
    } else {
        Ok(())
    }
}

/// `Sigma_L(E) = (g^2 / N) sum_k [(E - h_k)^{-1}]_{ss}` over the `N` unit
/// cell momenta, with `s` the orbital of site `x0`.
pub fn self_energy_finite(bath: &BathSpec, g: f64, x0: usize, e: Complex64) -> Result<Complex64> {
    Ok(self_energy_with_derivative(bath, g, x0, e)?.0)
}

fn self_energy_with_derivative(bath: &BathSpec, g: f64, x0: usize, e: Complex64) -> Result<(Complex64, Complex64)> {
    if g == 0.0 {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    check_off_spectrum(bath, e)?;
    let orbital = bath.orbital_of(x0);
    let momenta = bath.momenta();
    let n = momenta.len() as f64;
    let (s, ds) = momenta
        .iter()
        .map(|&k| bath.orbital_resolvent(k, orbital, e))
        .fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |acc, v| (acc.0 + v.0, acc.1 + v.1));
    Ok((g * g * s / n, g * g * ds / n))
}

/// Thermodynamic-limit self-energy of the unidirectional lattice: zero
/// inside the loop `|E + i kappa| < kappa`, `g^2 / (E + i kappa)` outside.
pub fn self_energy_closed_unidirectional(e: Complex64, g: f64, kappa: f64) -> Result<Complex64> {
    let u = e + I * kappa;
    let r = u.norm();
    if (r - kappa).abs() <= 1e-12 * kappa.max(f64::MIN_POSITIVE) {
        return Err(Error::OnLoop { energy: e });
    }
    if r < kappa {
        Ok(Complex64::new(0.0, 0.0))
    } else {
        Ok(g * g / u)
    }
}

/// Poles `E_pm = [(Delta - i kappa) +- sqrt((Delta + i kappa)^2 + 4 g^2)] / 2`
/// of the emitter Green's function with the exterior self-energy.
pub fn unidirectional_poles(delta: Complex64, g: f64, kappa: f64) -> (Complex64, Complex64) {
    let root = ((delta + I * kappa).powi(2) + 4.0 * g * g).sqrt();
    let base = delta - I * kappa;
    ((base + root) / 2.0, (base - root) / 2.0)
}

/// Closed-form bound states of the unidirectional lattice.
///
/// The hidden state sits at `Delta` whenever the detuning lies inside the
/// loop. Each pole `E_pm` is kept only when it lies outside the loop,
/// where the exterior self-energy it was derived from applies. A detuning
/// on the loop carries no hidden state (its tail would not decay), so only
/// the poles are reported; for `g = 0` that case is an error.
pub fn bound_states_closed_unidirectional(delta: Complex64, g: f64, kappa: f64) -> Result<Vec<ClosedFormBoundState>> {
    let u = delta + I * kappa;
    let on_loop = (u.norm() - kappa).abs() <= 1e-12 * kappa;
    if on_loop && g == 0.0 {
        return Err(Error::OnLoop { energy: delta });
    }
    let mut out = Vec::new();
    if !on_loop && u.norm() < kappa {
        let zeta = u.norm() / kappa;
        let ratio = g / kappa;
        out.push(ClosedFormBoundState {
            energy: delta,
            loop_class: LoopClass::InsideLoop,
            // c_{x0-1-n} = -(g / kappa) zeta^n c_e
            emitter_weight: 1.0 / (1.0 + ratio * ratio / (1.0 - zeta * zeta)),
            xi: (g > 0.0).then(|| 1.0 / (1.0 / zeta).ln()),
        });
    } else if g == 0.0 {
        out.push(ClosedFormBoundState {
            energy: delta,
            loop_class: LoopClass::OutsideLoop,
            emitter_weight: 1.0,
            xi: None,
        });
        return Ok(out);
    }
    if g == 0.0 {
        return Ok(out);
    }
    let (ep, em) = unidirectional_poles(delta, g, kappa);
    for e in [ep, em] {
        let zeta = (e + I * kappa).norm() / kappa;
        if zeta > 1.0 + 1e-12 {
            // c_{x0+n} = ((E - Delta) / g) zeta^{-n} c_e
            let lead = (e - delta).norm_sqr() / (g * g);
            out.push(ClosedFormBoundState {
                energy: e,
                loop_class: LoopClass::OutsideLoop,
                emitter_weight: 1.0 / (1.0 + lead / (1.0 - 1.0 / (zeta * zeta))),
                xi: Some(1.0 / zeta.ln()),
            });
        }
    }
    Ok(out)
}

/// Inside/outside classification of an energy with respect to the
/// periodic-boundary spectrum.
pub fn classify_loop(bath: &BathSpec, e: Complex64) -> LoopClass {
    match bath.lattice {
        Lattice::Unidirectional => {
            if (e + I * bath.kappa).norm() < bath.kappa {
                LoopClass::InsideLoop
            } else {
                LoopClass::OutsideLoop
            }
        }
        Lattice::HatanoNelson { .. } => match bath.spectral_winding(e, 4096) {
            Ok(0) => LoopClass::OutsideLoop,
            Ok(_) => LoopClass::InsideLoop,
            Err(_) => LoopClass::NotApplicable,
        },
        Lattice::AlternatingLoss { .. } => LoopClass::NotApplicable,
    }
}

/// Fits `ln|c_x|` against distance from `x0` on one side, using every
/// contiguous site above [`TAIL_FLOOR`] (no wrap-around).
pub fn localization_length_fit(profile: &[Complex64], x0: usize, side: Side) -> Result<LocalizationFit> {
    fit_tail(profile, x0, side, usize::MAX, false)
}

/// Tail fit over at most `max_sites` sites starting next to `x0`. With
/// `periodic` the walk wraps around the ring, up to half its length.
pub fn fit_tail(profile: &[Complex64], x0: usize, side: Side, max_sites: usize, periodic: bool) -> Result<LocalizationFit> {
    let len = profile.len() as isize;
    let reach = if periodic { len / 2 } else { len };
    let mut dist = Vec::new();
    let mut logs = Vec::new();
    for d in 1..reach {
        if dist.len() >= max_sites {
            break;
        }
        let raw = match side {
            Side::Left => x0 as isize - d,
            Side::Right => x0 as isize + d,
        };
        let idx = if periodic {
            raw.rem_euclid(len)
        } else if (0..len).contains(&raw) {
            raw
        } else {
            break;
        };
        let a = profile[idx as usize].norm();
        if a <= TAIL_FLOOR {
            break;
        }
        dist.push(d as f64);
        logs.push(a.ln());
    }
    if dist.len() < 8 {
        return Err(Error::InsufficientTail {
            needed: 8,
            found: dist.len(),
        });
    }
    let fit = fit_line(&dist, &logs).expect("distinct distances");
    let xi = if fit.slope < 0.0 { -1.0 / fit.slope } else { f64::INFINITY };
    Ok(LocalizationFit {
        xi,
        r_squared: fit.r_squared,
        side,
        sites: fit.points,
    })
}

fn side_weight(profile: &[Complex64], x0: usize, side: Side, window: usize, periodic: bool) -> f64 {
    let len = profile.len() as isize;
    (1..=window as isize)
        .filter_map(|d| {
            let raw = match side {
                Side::Left => x0 as isize - d,
                Side::Right => x0 as isize + d,
            };
            if periodic {
                Some(raw.rem_euclid(len))
            } else {
                (0..len).contains(&raw).then_some(raw)
            }
        })
        .map(|i| profile[i as usize].norm_sqr())
        .sum()
}

/// Applies the weight and tail-quality gates to a candidate eigenvector
/// (emitter amplitude first). Returns `None` when it is not a bound state.
fn gate_candidate(
    bath: &BathSpec,
    x0: usize,
    energy: Complex64,
    vector: &[Complex64],
    opts: &SearchOptions,
) -> Option<BoundState> {
    let norm: f64 = vector.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let c_e = vector[0] / norm;
    let weight = c_e.norm_sqr();
    if weight <= opts.weight_threshold {
        return None;
    }
    let phase = c_e.conj() / c_e.norm();
    let profile: Vec<Complex64> = vector[1..].iter().map(|c| c * phase / norm).collect();
    let c_e = c_e * phase;
    let photons: f64 = profile.iter().map(|c| c.norm_sqr()).sum();
    let periodic = bath.boundary == Boundary::Periodic;
    let tail = if photons < 1e-24 {
        None
    } else {
        let w = opts.tail_window;
        let side = if side_weight(&profile, x0, Side::Left, w, periodic) > side_weight(&profile, x0, Side::Right, w, periodic) {
            Side::Left
        } else {
            Side::Right
        };
        let fit = fit_tail(&profile, x0, side, w, periodic).ok()?;
        let decay = bath.length as f64 / fit.xi;
        if !(fit.r_squared > opts.min_r_squared && fit.xi > 0.0 && decay >= opts.min_tail_decay) {
            return None;
        }
        Some(fit)
    };
    Some(BoundState {
        energy,
        emitter_weight: weight,
        emitter_amplitude: c_e,
        profile,
        tail,
        loop_class: classify_loop(bath, energy),
    })
}

/// Diagonalizes the full effective Hamiltonian and keeps eigenvectors that
/// carry emitter weight and an exponentially localized photon tail.
/// Results are sorted by decreasing emitter weight.
pub fn bound_states_numeric(h: &EffectiveHamiltonian, opts: &SearchOptions) -> Result<Vec<BoundState>> {
    if h.dim() > 4097 {
        return Err(Error::InvalidArgument(format!(
            "dense diagonalization supports L <= 4096 (got {})",
            h.dim() - 1
        )));
    }
    let dense = h.to_dense();
    let eig = dense
        .eigen()
        .map_err(|e| Error::ConvergenceFailure(format!("{e:?}")))?;
    let values = eig.S().column_vector();
    let vectors = eig.U();
    let x0 = h.emitter().x0;
    let mut out: Vec<BoundState> = (0..h.dim())
        .filter_map(|j| {
            let v: Vec<Complex64> = (0..h.dim()).map(|i| vectors[(i, j)]).collect();
            gate_candidate(h.bath(), x0, values[j], &v, opts)
        })
        .collect();
    out.sort_by(|a, b| b.emitter_weight.total_cmp(&a.emitter_weight));
    Ok(out)
}

/// Photon amplitudes of the eigenstate at `e_b`: the inverse Fourier
/// transform of `c_k = g (E_b - h_k)^{-1} e_s c_e` for a periodic lattice.
pub fn bound_state_profile(bath: &BathSpec, g: f64, x0: usize, e_b: Complex64, c_e: Complex64) -> Result<Vec<Complex64>> {
    check_off_spectrum(bath, e_b)?;
    let momenta = bath.momenta();
    let cells = momenta.len();
    let bands = bath.bands();
    let orbital = bath.orbital_of(x0);
    let home = x0 / bands;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(cells);
    let mut profile = vec![Complex64::new(0.0, 0.0); bath.length];
    let columns: Vec<Vec<Complex64>> = momenta.iter().map(|&k| bath.orbital_column(k, orbital, e_b)).collect();
    for target in 0..bands {
        let mut buf: Vec<Complex64> = columns.iter().map(|col| g * c_e * col[target]).collect();
        fft.process(&mut buf);
        // k_j = 2 pi (j - h) / N, so e^{i k_j m} = e^{-2 pi i h m / N} e^{2 pi i j m / N}
        let h = (cells / 2) as f64;
        for (m, value) in buf.into_iter().enumerate() {
            let shift = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * h * m as f64 / cells as f64);
            let cell = (home + m) % cells;
            profile[cell * bands + target] = value * shift / cells as f64;
        }
    }
    Ok(profile)
}

/// Emitter weight `(1 + g^2 N^{-1} sum_k |(E_b - h_k)^{-1} e_s|^2)^{-1}`.
pub fn emitter_weight_from_momenta(bath: &BathSpec, g: f64, x0: usize, e_b: Complex64) -> Result<f64> {
    check_off_spectrum(bath, e_b)?;
    let orbital = bath.orbital_of(x0);
    let momenta = bath.momenta();
    let n = momenta.len() as f64;
    let sum: f64 = momenta
        .iter()
        .map(|&k| bath.orbital_column(k, orbital, e_b).iter().map(|c| c.norm_sqr()).sum::<f64>())
        .sum();
    Ok(1.0 / (1.0 + g * g * sum / n))
}

/// Builds the normalized bound state at a known energy from the
/// momentum-space construction.
pub fn bound_state_from_energy(bath: &BathSpec, g: f64, x0: usize, e_b: Complex64, tail_window: usize) -> Result<BoundState> {
    let weight = emitter_weight_from_momenta(bath, g, x0, e_b)?;
    let c_e = Complex64::new(weight.sqrt(), 0.0);
    let profile = bound_state_profile(bath, g, x0, e_b, c_e)?;
    let photons: f64 = profile.iter().map(|c| c.norm_sqr()).sum();
    let tail = if photons < 1e-24 {
        None
    } else {
        let periodic = bath.boundary == Boundary::Periodic;
        let side = if side_weight(&profile, x0, Side::Left, tail_window, periodic)
            > side_weight(&profile, x0, Side::Right, tail_window, periodic)
        {
            Side::Left
        } else {
            Side::Right
        };
        fit_tail(&profile, x0, side, tail_window, periodic).ok()
    };
    Ok(BoundState {
        energy: e_b,
        emitter_weight: weight,
        emitter_amplitude: c_e,
        profile,
        tail,
        loop_class: classify_loop(bath, e_b),
    })
}

/// Solves `E - Delta - Sigma_L(E) = 0` by complex Newton iteration from a
/// 16 x 16 grid of seeds, then applies the same gates as
/// [`bound_states_numeric`]. Works for every bath variant.
pub fn bound_states_self_consistent(bath: &BathSpec, emitter: &EmitterSpec, opts: &SearchOptions) -> Result<Vec<BoundState>> {
    bath.validate()?;
    let scale = bath.energy_scale();
    let delta = emitter.delta();
    let g = emitter.g;
    let x0 = emitter.x0;
    if g == 0.0 {
        let mut profile = vec![Complex64::new(0.0, 0.0); bath.length];
        profile.shrink_to_fit();
        return Ok(vec![BoundState {
            energy: delta,
            emitter_weight: 1.0,
            emitter_amplitude: Complex64::new(1.0, 0.0),
            profile,
            tail: None,
            loop_class: classify_loop(bath, delta),
        }]);
    }
    let spectrum: Vec<Complex64> = bath.momenta().into_iter().flat_map(|k| bath.dispersion(k)).collect();
    let margin = 2.0 * g + 0.1 * scale;
    let (mut re_lo, mut re_hi, mut im_lo, mut im_hi) = (delta.re, delta.re, delta.im, delta.im);
    for w in &spectrum {
        re_lo = re_lo.min(w.re);
        re_hi = re_hi.max(w.re);
        im_lo = im_lo.min(w.im);
        im_hi = im_hi.max(w.im);
    }
    let (re_lo, re_hi, im_lo, im_hi) = (re_lo - margin, re_hi + margin, im_lo - margin, im_hi + margin);
    let mut roots: Vec<Complex64> = Vec::new();
    let seeds = 16;
    for a in 0..seeds {
        for b in 0..seeds {
            let mut e = Complex64::new(
                re_lo + (re_hi - re_lo) * (a as f64 + 0.5) / seeds as f64,
                im_lo + (im_hi - im_lo) * (b as f64 + 0.5) / seeds as f64,
            );
            let mut converged = false;
            for _ in 0..100 {
                let Ok((s, ds)) = self_energy_with_derivative(bath, g, x0, e) else {
                    break;
                };
                let f = e - delta - s;
                if f.norm() < 1e-13 * scale {
                    converged = true;
                    break;
                }
                let step = f / (1.0 - ds);
                e -= step;
                if !e.re.is_finite() || !e.im.is_finite() {
                    break;
                }
                if step.norm() < 1e-15 * scale {
                    converged = true;
                    break;
                }
            }
            if !converged {
                continue;
            }
            let residual = self_energy_finite(bath, g, x0, e).map(|s| (e - delta - s).norm());
            if !matches!(residual, Ok(r) if r < 1e-9 * scale) {
                continue;
            }
            if roots.iter().all(|r| (r - e).norm() > 1e-7 * scale) {
                roots.push(e);
            }
        }
    }
    let mut out = Vec::new();
    for e in roots {
        let Ok(state) = bound_state_from_energy(bath, g, x0, e, opts.tail_window) else {
            continue;
        };
        let mut flat = Vec::with_capacity(bath.length + 1);
        flat.push(state.emitter_amplitude);
        flat.extend_from_slice(&state.profile);
        if let Some(gated) = gate_candidate(bath, x0, e, &flat, opts) {
            out.push(gated);
        }
    }
    out.sort_by(|a, b| b.emitter_weight.total_cmp(&a.emitter_weight));
    Ok(out)
}
