//! Closed-form emission dynamics for the unidirectional lattice, from the
//! residues of the Green's functions with the exterior self-energy
//! `g^2 / (E + i kappa)`.
//!
//! Positions are measured from the emitter site; photons only exist at
//! `x >= 0`.

use num_complex::Complex64;
use serde::Serialize;

use super::rfunc::{ln_factorial, scaled_tail};
use crate::boundstates::unidirectional_poles;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The two poles of `G_e` and their loop coordinates
/// `zeta = (E + i kappa) / kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolePair {
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    pub zeta_plus: Complex64,
    pub zeta_minus: Complex64,
}

impl PolePair {
    pub fn unidirectional(delta: Complex64, g: f64, kappa: f64) -> Self {
        let (e_plus, e_minus) = unidirectional_poles(delta, g, kappa);
        PolePair {
            e_plus,
            e_minus,
            zeta_plus: (e_plus + I * kappa) / kappa,
            zeta_minus: (e_minus + I * kappa) / kappa,
        }
    }

    fn check_distinct(&self, kappa: f64) -> Result<()> {
        let separation = (self.e_plus - self.e_minus).norm();
        if separation < 1e-9 * kappa {
            Err(Error::DegeneratePoles { separation })
        } else {
            Ok(())
        }
    }
}

/// `c_e(t) = [(E+ + i kappa) e^{-i E+ t} - (E- + i kappa) e^{-i E- t}] / (E+ - E-)`.
pub fn emitter_amplitude_analytic_unidirectional(t: f64, delta: Complex64, g: f64, kappa: f64) -> Result<Complex64> {
    let p = PolePair::unidirectional(delta, g, kappa);
    p.check_distinct(kappa)?;
    let up = p.e_plus + I * kappa;
    let um = p.e_minus + I * kappa;
    Ok((up * (-I * p.e_plus * t).exp() - um * (-I * p.e_minus * t).exp()) / (p.e_plus - p.e_minus))
}

/// Limit of the residue formula when the two poles coalesce:
/// `(1 - i (E + i kappa) t) e^{-i E t}`.
pub fn emitter_amplitude_confluent(t: f64, delta: Complex64, g: f64, kappa: f64) -> Complex64 {
    let p = PolePair::unidirectional(delta, g, kappa);
    let e = (p.e_plus + p.e_minus) / 2.0;
    (1.0 - I * (e + I * kappa) * t) * (-I * e * t).exp()
}

/// Emitter amplitude that falls back to the confluent formula at an
/// exceptional coalescence of the poles.
pub fn emitter_amplitude_unidirectional(t: f64, delta: Complex64, g: f64, kappa: f64) -> Complex64 {
    match emitter_amplitude_analytic_unidirectional(t, delta, g, kappa) {
        Ok(c) => c,
        Err(_) => emitter_amplitude_confluent(t, delta, g, kappa),
    }
}

/// Exact real-space photon amplitude at distance `x` from the emitter:
///
/// `c_x(t) = g e^{-kappa t} [zeta+^{-x} R_x(-i kappa zeta+ t) - zeta-^{-x} R_x(-i kappa zeta- t)] / (kappa (zeta+ - zeta-))`.
pub fn photon_profile_analytic_unidirectional(x: i64, t: f64, delta: Complex64, g: f64, kappa: f64) -> Result<Complex64> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("time must be >= 0 (got {t})")));
    }
    if x < 0 || g == 0.0 || t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let p = PolePair::unidirectional(delta, g, kappa);
    p.check_distinct(kappa)?;
    let x = x as usize;
    let branch = |zeta: Complex64| -> Result<Complex64> {
        let z = -I * kappa * zeta * t;
        let log_scale = Complex64::new(-kappa * t, 0.0) - zeta.ln() * x as f64;
        scaled_tail(x, z, log_scale)
    };
    let plus = branch(p.zeta_plus)?;
    let minus = branch(p.zeta_minus)?;
    Ok(g * (plus - minus) / (kappa * (p.zeta_plus - p.zeta_minus)))
}

/// Photon amplitudes for `x = 0..sites`.
pub fn photon_profile_snapshot(sites: usize, t: f64, delta: Complex64, g: f64, kappa: f64) -> Result<Vec<Complex64>> {
    (0..sites as i64)
        .map(|x| photon_profile_analytic_unidirectional(x, t, delta, g, kappa))
        .collect()
}

/// Momentum amplitude `c_k(t)`: the sum of the residues of
/// `g G_e(E) e^{-iEt} / (E - omega_k)` at `E+`, `E-` and `omega_k`.
pub fn photon_momentum_amplitude_analytic(k: f64, t: f64, delta: Complex64, g: f64, kappa: f64) -> Result<Complex64> {
    if g == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let p = PolePair::unidirectional(delta, g, kappa);
    p.check_distinct(kappa)?;
    let omega = kappa * ((-I * k).exp() - I);
    for e in [p.e_plus, p.e_minus] {
        let distance = (omega - e).norm();
        if distance < 1e-9 * kappa {
            return Err(Error::PoleCollision { energy: omega, distance });
        }
    }
    let (ep, em) = (p.e_plus, p.e_minus);
    let r_plus = (ep + I * kappa) * (-I * ep * t).exp() / ((ep - em) * (ep - omega));
    let r_minus = (em + I * kappa) * (-I * em * t).exp() / ((em - ep) * (em - omega));
    let r_band = (omega + I * kappa) * (-I * omega * t).exp() / ((omega - ep) * (omega - em));
    Ok(g * (r_plus + r_minus + r_band))
}

/// Leading large-`t` behaviour of `|c_x|` when neither pole lies in the
/// upper half of the loop coordinate:
/// `kappa e^{-kappa t} (kappa t)^{x-1} / (g (x-1)!)`, for `x >= 1`.
///
/// Exact for `x << kappa t`; near the front `x ~ kappa t` it fixes the shape
/// but not the overall prefactor.
pub fn free_like_asymptote(x: i64, t: f64, g: f64, kappa: f64) -> f64 {
    if x < 1 || t <= 0.0 {
        return 0.0;
    }
    let n = (x - 1) as usize;
    let log = (kappa / g).ln() - kappa * t + n as f64 * (kappa * t).ln() - ln_factorial(n);
    log.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::momentum_grid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn initial_conditions() {
        let d = c(0.0, 0.0);
        let ce = emitter_amplitude_analytic_unidirectional(0.0, d, 0.6, 1.0).unwrap();
        assert!((ce - c(1.0, 0.0)).norm() < 1e-15);
        for x in [-3, 0, 1, 10] {
            assert_eq!(photon_profile_analytic_unidirectional(x, 0.0, d, 0.6, 1.0).unwrap(), c(0.0, 0.0));
        }
        assert_eq!(photon_profile_analytic_unidirectional(-3, 7.0, d, 0.6, 1.0).unwrap(), c(0.0, 0.0));
        for k in [-2.0, 0.3, 1.0] {
            assert!(photon_momentum_amplitude_analytic(k, 0.0, d, 0.6, 1.0).unwrap().norm() < 1e-12);
            assert_eq!(photon_momentum_amplitude_analytic(k, 3.0, d, 0.0, 1.0).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn critical_coupling_is_degenerate() {
        let err = emitter_amplitude_analytic_unidirectional(1.0, c(0.0, 0.0), 0.5, 1.0).unwrap_err();
        assert!(matches!(err, Error::DegeneratePoles { .. }));
        for t in [0.0, 1.0, 4.0] {
            let conf = emitter_amplitude_confluent(t, c(0.0, 0.0), 0.5, 1.0);
            let expect = (1.0 + t / 2.0) * (-t / 2.0f64).exp();
            assert!((conf - c(expect, 0.0)).norm() < 1e-14, "t = {t}");
            let near = emitter_amplitude_analytic_unidirectional(t, c(0.0, 0.0), 0.5 + 1e-6, 1.0).unwrap();
            assert!((near - conf).norm() < 1e-5);
        }
    }

    #[test]
    fn free_like_front_follows_the_poisson_asymptote() {
        let (d, g, t) = (c(0.0, -2.0), 0.6, 40.0);
        let amp = |x: i64| photon_profile_analytic_unidirectional(x, t, d, g, 1.0).unwrap().norm();
        let peak = (1..80).max_by(|&a, &b| amp(a).total_cmp(&amp(b))).unwrap();
        let norm = amp(peak) / free_like_asymptote(peak, t, g, 1.0);
        for x in peak - 2..=peak + 2 {
            let ratio = amp(x) / free_like_asymptote(x, t, g, 1.0) / norm;
            assert!((ratio - 1.0).abs() < 0.1, "x = {x}: ratio {ratio}");
        }
    }

    #[test]
    fn momentum_transform_reproduces_real_space() {
        let (d, g, t) = (c(0.0, 0.0), 0.6, 6.0);
        let n = 1024;
        let cks: Vec<Complex64> = momentum_grid(n)
            .into_iter()
            .map(|k| photon_momentum_amplitude_analytic(k, t, d, g, 1.0).unwrap())
            .collect();
        for x in 0..40i64 {
            let cx: Complex64 = momentum_grid(n)
                .into_iter()
                .zip(&cks)
                .map(|(k, ck)| (I * k * x as f64).exp() * ck)
                .sum::<Complex64>()
                / n as f64;
            let exact = photon_profile_analytic_unidirectional(x, t, d, g, 1.0).unwrap();
            assert!((cx - exact).norm() < 1e-8, "x = {x}: {cx} vs {exact}");
        }
    }
}
