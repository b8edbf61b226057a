//! Emission-regime classification from the pole structure, and rate and
//! exponent fits on simulated series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundstates::{unidirectional_poles, TAIL_FLOOR};
use crate::error::{Error, Result};
use crate::linfit::fit_line;

const I: Complex64 = Complex64::new(0.0, 1.0);
const MIN_SAMPLES: usize = 10;
const MIN_SITES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Both poles have `Im zeta <= 0`: the photon front spreads like the
    /// uncoupled lattice.
    FreeLike,
    /// Dominant pole inside the unit circle: amplitude grows away from the
    /// emitter behind the front.
    PoleAmplification,
    /// Dominant pole outside the unit circle: amplitude decays with distance.
    SpatialDecay,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleLabel {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegimeReport {
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    pub zeta_plus: Complex64,
    pub zeta_minus: Complex64,
    pub regime: Regime,
    /// Pole with the larger `Im zeta`, whose term decays slowest.
    pub dominant_pole: PoleLabel,
    /// `-ln |zeta*|`, the expected slope of `ln |c_x|` per site behind the
    /// front; `None` in the free-like regime.
    pub predicted_spatial_slope: Option<f64>,
}

impl RegimeReport {
    pub fn dominant_zeta(&self) -> Complex64 {
        match self.dominant_pole {
            PoleLabel::Plus => self.zeta_plus,
            PoleLabel::Minus => self.zeta_minus,
        }
    }
}

/// Classifies the long-time emission of the unidirectional lattice.
pub fn classify_regime(delta: Complex64, g: f64, kappa: f64) -> Result<RegimeReport> {
    if !(g > 0.0) || !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "classification needs g > 0 and kappa > 0 (got g = {g}, kappa = {kappa})"
        )));
    }
    let (e_plus, e_minus) = unidirectional_poles(delta, g, kappa);
    let zeta_plus = (e_plus + I * kappa) / kappa;
    let zeta_minus = (e_minus + I * kappa) / kappa;
    let tie = (zeta_plus.im - zeta_minus.im).abs() <= 1e-12;
    let dominant_pole = if (tie && zeta_plus.norm() >= zeta_minus.norm()) || (!tie && zeta_plus.im > zeta_minus.im) {
        PoleLabel::Plus
    } else {
        PoleLabel::Minus
    };
    let zeta = match dominant_pole {
        PoleLabel::Plus => zeta_plus,
        PoleLabel::Minus => zeta_minus,
    };
    let (regime, predicted_spatial_slope) = if zeta_plus.im <= 0.0 && zeta_minus.im <= 0.0 {
        (Regime::FreeLike, None)
    } else {
        let r = zeta.norm();
        if (r - 1.0).abs() <= 1e-9 {
            return Err(Error::OnLoop { energy: zeta * kappa - I * kappa });
        }
        let regime = if r < 1.0 {
            Regime::PoleAmplification
        } else {
            Regime::SpatialDecay
        };
        (regime, Some(-r.ln()))
    };
    Ok(RegimeReport {
        e_plus,
        e_minus,
        zeta_plus,
        zeta_minus,
        regime,
        dominant_pole,
        predicted_spatial_slope,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitReport {
    /// Rate, exponent or per-site slope, depending on the fit.
    pub value: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// How the slope of `ln(values)` maps to a rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateSemantics {
    /// `rate = -slope`.
    #[default]
    Direct,
    /// Values are `|c|^2`; report the amplitude rate `-slope / 2`.
    AmplitudeFromProbability,
}

fn windowed(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>)> {
    if times.len() != values.len() {
        return Err(Error::InvalidArgument(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    let (t_min, t_max) = window;
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t >= t_min && t <= t_max {
            if !(v > 0.0) {
                return Err(Error::NonPositiveValues { t, value: v });
            }
            ts.push(t);
            vs.push(v.ln());
        }
    }
    if ts.len() < MIN_SAMPLES {
        return Err(Error::EmptyWindow {
            t_min,
            t_max,
            found: ts.len(),
            needed: MIN_SAMPLES,
        });
    }
    Ok((ts, vs))
}

fn report(x: &[f64], y: &[f64], window: (f64, f64), scale: f64) -> Result<FitReport> {
    let fit = fit_line(x, y).ok_or(Error::InsufficientData {
        needed: 2,
        found: x.len(),
    })?;
    Ok(FitReport {
        value: scale * fit.slope,
        stderr: scale.abs() * fit.slope_stderr,
        r_squared: fit.r_squared,
        window,
        points: fit.points,
    })
}

/// Least-squares slope of `ln(values)` against `t` inside `window`.
pub fn fit_exponential_rate(
    times: &[f64],
    values: &[f64],
    window: (f64, f64),
    semantics: RateSemantics,
) -> Result<FitReport> {
    let (ts, ln_v) = windowed(times, values, window)?;
    let scale = match semantics {
        RateSemantics::Direct => -1.0,
        RateSemantics::AmplitudeFromProbability => -0.5,
    };
    report(&ts, &ln_v, window, scale)
}

/// Least-squares slope of `ln(values)` against `ln(t)` inside `window`.
pub fn fit_power_law(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<FitReport> {
    let (ts, ln_v) = windowed(times, values, window)?;
    if let Some(&t) = ts.iter().find(|&&t| t <= 0.0) {
        return Err(Error::InvalidArgument(format!("power-law fit needs t > 0 (got {t})")));
    }
    let ln_t: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    report(&ln_t, &ln_v, window, 1.0)
}

/// Slope of `ln |c_x|` against `x` over sites `x_min..=x_max`, skipping
/// sites below the numerical floor.
pub fn spatial_growth_rate(profile: &[Complex64], window: (usize, usize)) -> Result<FitReport> {
    let (x_min, x_max) = window;
    let hi = x_max.min(profile.len().saturating_sub(1));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    if x_min <= hi {
        for (x, c) in profile.iter().enumerate().take(hi + 1).skip(x_min) {
            let a = c.norm();
            if a > TAIL_FLOOR {
                xs.push(x as f64);
                ys.push(a.ln());
            }
        }
    }
    if xs.len() < MIN_SITES {
        return Err(Error::InsufficientData {
            needed: MIN_SITES,
            found: xs.len(),
        });
    }
    report(&xs, &ys, (x_min as f64, x_max as f64), 1.0)
}

/// Spatial rate from a two-term linear prediction
/// `c_{x+2} = a_1 c_{x+1} + a_0 c_x` fitted by least squares over
/// `x_min..=x_max`. The roots `lambda` of `lambda^2 = a_1 lambda + a_0` are
/// the per-site growth factors of the two pole terms, so two terms of equal
/// modulus and different phase are resolved without fitting the
/// interference pattern. `value` is `ln |lambda|` of the larger root and
/// `stderr` half the spread of `ln |lambda|` between the two roots.
pub fn spatial_growth_rate_two_pole(profile: &[Complex64], window: (usize, usize)) -> Result<FitReport> {
    let (x_min, x_max) = window;
    let hi = x_max.min(profile.len().saturating_sub(1));
    let rows = (hi + 1).saturating_sub(x_min + 2);
    if x_min > hi || rows < MIN_SITES - 2 {
        return Err(Error::InsufficientData {
            needed: MIN_SITES,
            found: (hi + 1).saturating_sub(x_min),
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    // normal equations of the 2-column complex least-squares problem
    let (mut m11, mut m12, mut m22, mut r1, mut r2, mut yy) = (0.0, zero, 0.0, zero, zero, 0.0);
    for x in x_min..x_min + rows {
        let (u, v, y) = (profile[x + 1], profile[x], profile[x + 2]);
        m11 += u.norm_sqr();
        m12 += u.conj() * v;
        m22 += v.norm_sqr();
        r1 += u.conj() * y;
        r2 += v.conj() * y;
        yy += y.norm_sqr();
    }
    let det = m11 * m22 - m12.norm_sqr();
    if !(det > 0.0) || !(det.is_finite()) {
        return Err(Error::InsufficientData {
            needed: MIN_SITES,
            found: rows + 2,
        });
    }
    let a1 = (r1 * m22 - m12 * r2) / det;
    let a0 = (r2 * m11 - m12.conj() * r1) / det;
    let mut ss_res = 0.0;
    for x in x_min..x_min + rows {
        ss_res += (profile[x + 2] - a1 * profile[x + 1] - a0 * profile[x]).norm_sqr();
    }
    let disc = (a1 * a1 + 4.0 * a0).sqrt();
    let (l1, l2) = ((a1 + disc).norm() / 2.0, (a1 - disc).norm() / 2.0);
    let (big, small) = if l1 >= l2 { (l1, l2) } else { (l2, l1) };
    if !(small > 0.0) {
        return Err(Error::InsufficientData {
            needed: MIN_SITES,
            found: rows + 2,
        });
    }
    Ok(FitReport {
        value: big.ln(),
        stderr: 0.5 * (big.ln() - small.ln()),
        r_squared: if yy > 0.0 { (1.0 - ss_res / yy).clamp(0.0, 1.0) } else { 0.0 },
        window: (x_min as f64, x_max as f64),
        points: rows + 2,
    })
}

/// Indices of strict interior local maxima.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

/// Times and values at the local maxima of a series, for rate fits on
/// oscillating populations.
pub fn peak_envelope(times: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    local_maxima(values).into_iter().map(|i| (times[i], values[i])).unzip()
}

/// Exploratory window: drops the first 20% and the last 10% of the span.
pub fn heuristic_window(times: &[f64]) -> Option<(f64, f64)> {
    let (&first, &last) = (times.first()?, times.last()?);
    let span = last - first;
    Some((first + 0.2 * span, last - 0.1 * span))
}
