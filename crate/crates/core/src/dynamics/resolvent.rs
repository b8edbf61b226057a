//! Numerical inverse transform of the resolvent,
//! `c(t) = (i / 2 pi) int dE G(E + i eta) e^{-i (E + i eta) t}`, along a
//! horizontal line above every singularity.

use num_complex::Complex64;
use serde::Serialize;

use crate::bath::{BathSpec, BathVariant};
use crate::boundstates::{self_energy_finite, unidirectional_poles};
use crate::emitter_model::EmitterSpec;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

const I: Complex64 = Complex64::new(0.0, 1.0);
const PANEL: usize = 16;
const MAX_GROWTH: f64 = 30.0;
const MAX_TRUNCATION: f64 = 1e-4;

/// Which bath self-energy enters `G_e`.
#[derive(Clone, Debug, PartialEq)]
pub enum SelfEnergyModel {
    /// No bath: `G_e = 1 / (E - Delta)`.
    None,
    /// `Sigma = g^2 / (E + i kappa)` everywhere in the plane.
    UnidirectionalExterior { kappa: f64 },
    /// Exact momentum sum over the finite periodic lattice.
    FiniteLattice { bath: BathSpec, x0: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreenFunction {
    pub delta: Complex64,
    pub g: f64,
    pub model: SelfEnergyModel,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ResolventChannel {
    Emitter,
    /// Photon amplitude in the plane wave of momentum `k`.
    Photon { k: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResolventEstimate {
    pub value: Complex64,
    /// `|I(2 e_max) - I(e_max)|` at equal node density.
    pub error_estimate: f64,
}

impl GreenFunction {
    pub fn bare(delta: Complex64) -> Self {
        GreenFunction {
            delta,
            g: 0.0,
            model: SelfEnergyModel::None,
        }
    }

    pub fn unidirectional(delta: Complex64, g: f64, kappa: f64) -> Self {
        GreenFunction {
            delta,
            g,
            model: SelfEnergyModel::UnidirectionalExterior { kappa },
        }
    }

    pub fn finite_lattice(bath: &BathSpec, emitter: &EmitterSpec) -> Result<Self> {
        bath.validate()?;
        if emitter.x0 >= bath.length {
            return Err(Error::IndexOutOfRange {
                index: emitter.x0,
                length: bath.length,
            });
        }
        Ok(GreenFunction {
            delta: emitter.delta(),
            g: emitter.g,
            model: SelfEnergyModel::FiniteLattice {
                bath: *bath,
                x0: emitter.x0,
            },
        })
    }

    pub fn self_energy(&self, e: Complex64) -> Result<Complex64> {
        match &self.model {
            SelfEnergyModel::None => Ok(Complex64::new(0.0, 0.0)),
            SelfEnergyModel::UnidirectionalExterior { kappa } => Ok(self.g * self.g / (e + I * kappa)),
            SelfEnergyModel::FiniteLattice { bath, x0 } => self_energy_finite(bath, self.g, *x0, e),
        }
    }

    /// `G_e(E) = 1 / (E - Delta - Sigma(E))`.
    pub fn emitter(&self, e: Complex64) -> Result<Complex64> {
        Ok(1.0 / (e - self.delta - self.self_energy(e)?))
    }

    /// `G_k(E) = g G_e(E) / (E - omega_k)`.
    pub fn photon(&self, k: f64, e: Complex64) -> Result<Complex64> {
        let omega = self.dispersion(k)?;
        Ok(self.g * self.emitter(e)? / (e - omega))
    }

    fn dispersion(&self, k: f64) -> Result<Complex64> {
        match &self.model {
            SelfEnergyModel::None => Ok(Complex64::new(0.0, 0.0)),
            SelfEnergyModel::UnidirectionalExterior { kappa } => Ok(kappa * ((-I * k).exp() - I)),
            SelfEnergyModel::FiniteLattice { bath, .. } => {
                if bath.variant() == BathVariant::AlternatingLoss {
                    return Err(Error::WrongVariant {
                        operation: "photon resolvent",
                        expected: "a single-band lattice",
                    });
                }
                Ok(bath.dispersion(k)[0])
            }
        }
    }

    fn scale(&self) -> f64 {
        match &self.model {
            SelfEnergyModel::None => self.delta.norm().max(1.0),
            SelfEnergyModel::UnidirectionalExterior { kappa } => *kappa,
            SelfEnergyModel::FiniteLattice { bath, .. } => bath.energy_scale(),
        }
    }

    /// Singularities known in closed form, used to check the contour height.
    fn known_singularities(&self) -> Vec<Complex64> {
        match &self.model {
            SelfEnergyModel::None => vec![self.delta],
            SelfEnergyModel::UnidirectionalExterior { kappa } => {
                let (ep, em) = unidirectional_poles(self.delta, self.g, *kappa);
                vec![ep, em]
            }
            SelfEnergyModel::FiniteLattice { .. } => vec![self.delta],
        }
    }
}

/// Inverse transform of one channel of `G` at time `t`.
///
/// The large-`|E|` part of the integrand is removed and added back in closed
/// form, using a reference pole `p` one energy scale below the contour:
/// `1 / (E - p) + (Delta - p) / (E - p)^2` for the emitter and
/// `g / ((E - p)(E - omega_k))` for a photon, so the truncated remainder
/// falls off as `E^{-3}`.
pub fn resolvent_inverse_transform(
    green: &GreenFunction,
    channel: ResolventChannel,
    t: f64,
    contour_height: f64,
    e_max: f64,
    n_quad: usize,
) -> Result<ResolventEstimate> {
    let eta = contour_height;
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!("contour height must be > 0 (got {eta})")));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be >= 0 (got {t})")));
    }
    if t * eta > MAX_GROWTH {
        return Err(Error::InvalidArgument(format!(
            "t * contour_height = {} exceeds {MAX_GROWTH}",
            t * eta
        )));
    }
    if !(e_max > 0.0) || n_quad < PANEL {
        return Err(Error::InvalidArgument(format!(
            "need e_max > 0 and n_quad >= {PANEL} (got {e_max}, {n_quad})"
        )));
    }
    if let Some(bad) = green.known_singularities().into_iter().find(|s| s.im >= eta) {
        return Err(Error::InvalidArgument(format!(
            "contour height {eta} is not above the singularity at {bad}"
        )));
    }

    let delta = green.delta;
    // reference pole well below the contour, so the subtracted terms are smooth on it
    let p = Complex64::new(delta.re, delta.im.min(0.0) - green.scale());
    let (remainder, closed): (Box<dyn Fn(Complex64) -> Result<Complex64> + '_>, Complex64) = match channel {
        ResolventChannel::Emitter => (
            Box::new(move |e| {
                let w = 1.0 / (e - p);
                Ok(green.emitter(e)? - w - (delta - p) * w * w)
            }),
            (-I * p * t).exp() * (1.0 - I * (delta - p) * t),
        ),
        ResolventChannel::Photon { k } => {
            let omega = green.dispersion(k)?;
            let g = green.g;
            (
                Box::new(move |e| Ok(green.photon(k, e)? - g / ((e - p) * (e - omega)))),
                g * ((-I * p * t).exp() - (-I * omega * t).exp()) / (p - omega),
            )
        }
    };

    let (nodes, weights) = gauss_legendre(PANEL);
    let panels = n_quad.div_ceil(PANEL);
    let integrate = |a: f64, panels: usize| -> Result<Complex64> {
        let h = 2.0 * a / panels as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = -a + (p as f64 + 0.5) * h;
            for (x, w) in nodes.iter().zip(&weights) {
                let e = Complex64::new(mid + 0.5 * h * x, eta);
                sum += 0.5 * h * w * remainder(e)? * (-I * e * t).exp();
            }
        }
        Ok(I * sum / (2.0 * std::f64::consts::PI))
    };
    let coarse = integrate(e_max, panels)?;
    let fine = integrate(2.0 * e_max, 2 * panels)?;
    let error_estimate = (fine - coarse).norm();
    if error_estimate > MAX_TRUNCATION {
        return Err(Error::TruncationTooLarge {
            value: fine + closed,
            estimate: error_estimate,
        });
    }
    Ok(ResolventEstimate {
        value: fine + closed,
        error_estimate,
    })
}
