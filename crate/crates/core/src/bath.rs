//! Lattice bath models: complex dispersions, Bloch Hamiltonians, real-space
//! matrices and spectral diagnostics.
//!
//! Sites are indexed `0..length`. Hopping is written so that amplitude
//! moves from `x` to `x + 1` through the lower off-diagonal, which makes
//! the unidirectional lattice emit toward increasing `x`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BathVariant {
    UnidirectionalHatanoNelson,
    GeneralHatanoNelson,
    AlternatingLoss,
}

/// Lattice-specific parameters. All rates share the unit of `kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Lattice {
    /// Right-only hopping `kappa` with uniform loss; jump operators
    /// `a_x - i a_{x+1}`.
    Unidirectional,
    /// Independent right/left hops plus uniform on-site loss `-i kappa`.
    HatanoNelson { j_right: f64, j_left: f64 },
    /// Symmetric hopping with loss `kappa` on even sites and a staggered
    /// real energy `+delta` (even) / `-delta` (odd).
    AlternatingLoss { j_hop: f64, delta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub lattice: Lattice,
    pub kappa: f64,
    pub length: usize,
    pub boundary: Boundary,
}

/// A 2x2 complex matrix stored row-major.
pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionSample {
    pub k: f64,
    pub energies: Vec<Complex64>,
    /// `|dE/dk|` per band; `None` where the band derivative is singular
    /// (exceptional points).
    pub group_speed: Option<Vec<f64>>,
}

/// Histogram of band damping rates `Im E` over Brillouin-zone samples.
#[derive(Clone, Debug)]
pub struct DampingHistogram {
    pub lower: f64,
    pub upper: f64,
    pub bin_width: f64,
    pub counts: Vec<u64>,
    /// `counts / (n_k * bin_width)`; integrates to the number of bands.
    pub density: Vec<f64>,
    /// Largest sampled `Im E`.
    pub max_imag: f64,
    /// Smallest sampled `Im E`.
    pub min_imag: f64,
}

impl DampingHistogram {
    /// Centre of bin `i`.
    pub fn bin_center(&self, i: usize) -> f64 {
        self.lower + (i as f64 + 0.5) * self.bin_width
    }

    /// Index of the bin containing `im_e`, clamped to the histogram range.
    pub fn bin_of(&self, im_e: f64) -> usize {
        let raw = ((im_e - self.lower) / self.bin_width).floor();
        (raw.max(0.0) as usize).min(self.counts.len() - 1)
    }
}

impl BathSpec {
    pub fn unidirectional(kappa: f64, length: usize, boundary: Boundary) -> Self {
        BathSpec {
            lattice: Lattice::Unidirectional,
            kappa,
            length,
            boundary,
        }
    }

    pub fn hatano_nelson(j_right: f64, j_left: f64, kappa: f64, length: usize, boundary: Boundary) -> Self {
        BathSpec {
            lattice: Lattice::HatanoNelson { j_right, j_left },
            kappa,
            length,
            boundary,
        }
    }

    pub fn alternating_loss(j_hop: f64, kappa: f64, delta: f64, length: usize, boundary: Boundary) -> Self {
        BathSpec {
            lattice: Lattice::AlternatingLoss { j_hop, delta },
            kappa,
            length,
            boundary,
        }
    }

    pub fn variant(&self) -> BathVariant {
        match self.lattice {
            Lattice::Unidirectional => BathVariant::UnidirectionalHatanoNelson,
            Lattice::HatanoNelson { .. } => BathVariant::GeneralHatanoNelson,
            Lattice::AlternatingLoss { .. } => BathVariant::AlternatingLoss,
        }
    }

    /// Collects every violated invariant.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.kappa.is_finite() || self.kappa < 0.0 {
            out.push(format!("kappa must be finite and >= 0 (got {})", self.kappa));
        }
        if self.length < 4 {
            out.push(format!("length must be >= 4 (got {})", self.length));
        }
        match self.lattice {
            Lattice::Unidirectional => {}
            Lattice::HatanoNelson { j_right, j_left } => {
                if !j_right.is_finite() || !j_left.is_finite() {
                    out.push("j_right and j_left must be finite".into());
                } else if (j_right - j_left).abs() > self.kappa + 1e-12 {
                    // Im(omega_k) = -kappa + (j_left - j_right) sin k must stay <= 0
                    out.push(format!(
                        "|j_right - j_left| = {} exceeds kappa = {}: bath would have gain",
                        (j_right - j_left).abs(),
                        self.kappa
                    ));
                }
            }
            Lattice::AlternatingLoss { j_hop, delta } => {
                if !j_hop.is_finite() || !delta.is_finite() {
                    out.push("j_hop and delta_stagger must be finite".into());
                }
                if self.length % 2 != 0 {
                    out.push(format!("alternating-loss bath needs an even length (got {})", self.length));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Rate used to scale tolerances: `kappa`, or the hopping when `kappa = 0`.
    pub fn energy_scale(&self) -> f64 {
        if self.kappa > 0.0 {
            return self.kappa;
        }
        let hop = match self.lattice {
            Lattice::Unidirectional => 0.0,
            Lattice::HatanoNelson { j_right, j_left } => j_right.abs().max(j_left.abs()),
            Lattice::AlternatingLoss { j_hop, .. } => j_hop.abs(),
        };
        if hop > 0.0 {
            hop
        } else {
            1.0
        }
    }

    pub fn bands(&self) -> usize {
        match self.lattice {
            Lattice::AlternatingLoss { .. } => 2,
            _ => 1,
        }
    }

    /// Number of unit cells.
    pub fn cells(&self) -> usize {
        self.length / self.bands()
    }

    /// Orbital (sublattice) index of site `x` within its unit cell.
    pub fn orbital_of(&self, x: usize) -> usize {
        x % self.bands()
    }

    /// Unit-cell momenta `k_n = 2 pi n / N - pi`, `n = 0..N`.
    pub fn momenta(&self) -> Vec<f64> {
        momentum_grid(self.cells())
    }

    /// Eigenvalues of the Bloch Hamiltonian at momentum `k`.
    pub fn dispersion(&self, k: f64) -> Vec<Complex64> {
        match self.lattice {
            Lattice::Unidirectional => vec![self.kappa * ((-I * k).exp() - I)],
            Lattice::HatanoNelson { j_right, j_left } => {
                vec![j_right * (-I * k).exp() + j_left * (I * k).exp() - I * self.kappa]
            }
            Lattice::AlternatingLoss { j_hop, delta } => {
                let s = self.two_band_root(j_hop, delta, k);
                let centre = -I * (self.kappa / 2.0);
                vec![centre + s, centre - s]
            }
        }
    }

    // sqrt(2 J^2 (1 + cos k) + (delta - i kappa / 2)^2) on the branch with
    // Im >= 0, so band 0 is the less damped one
    fn two_band_root(&self, j_hop: f64, delta: f64, k: f64) -> Complex64 {
        let d = Complex64::new(delta, -self.kappa / 2.0);
        let s = (2.0 * j_hop * j_hop * (1.0 + k.cos()) + d * d).sqrt();
        if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
            -s
        } else {
            s
        }
    }

    pub fn dispersion_sample(&self, k: f64) -> DispersionSample {
        let energies = self.dispersion(k);
        let group_speed = match self.lattice {
            Lattice::Unidirectional => Some(vec![self.kappa]),
            Lattice::HatanoNelson { j_right, j_left } => {
                Some(vec![(-I * j_right * (-I * k).exp() + I * j_left * (I * k).exp()).norm()])
            }
            Lattice::AlternatingLoss { j_hop, delta } => {
                let s = self.two_band_root(j_hop, delta, k);
                if s.norm() < 1e-12 * self.energy_scale() {
                    None
                } else {
                    let v = (j_hop * j_hop * k.sin() / s).norm();
                    Some(vec![v, v])
                }
            }
        };
        DispersionSample {
            k,
            energies,
            group_speed,
        }
    }

    /// Bloch matrix of the alternating-loss lattice on the (A, B) = (even,
    /// odd) basis.
    pub fn bloch_hamiltonian_2band(&self, k: f64) -> Result<Matrix2> {
        match self.lattice {
            Lattice::AlternatingLoss { j_hop, delta } => Ok(alternating_bloch(j_hop, delta, self.kappa, k)),
            _ => Err(Error::WrongVariant {
                operation: "bloch_hamiltonian_2band",
                expected: "alternating-loss",
            }),
        }
    }

    /// `det(h_k - e)`; for one band this is `omega_k - e`.
    fn characteristic(&self, k: f64, e: Complex64) -> Complex64 {
        match self.lattice {
            Lattice::AlternatingLoss { j_hop, delta } => {
                let h = alternating_bloch(j_hop, delta, self.kappa, k);
                (h[0][0] - e) * (h[1][1] - e) - h[0][1] * h[1][0]
            }
            _ => self.dispersion(k)[0] - e,
        }
    }

    /// Diagonal element `[(e - h_k)^{-1}]_{ss}` and its `e`-derivative.
    pub(crate) fn orbital_resolvent(&self, k: f64, orbital: usize, e: Complex64) -> (Complex64, Complex64) {
        match self.lattice {
            Lattice::AlternatingLoss { j_hop, delta } => {
                let h = alternating_bloch(j_hop, delta, self.kappa, k);
                let a = e - h[0][0];
                let d = e - h[1][1];
                let bc = h[0][1] * h[1][0];
                let det = a * d - bc;
                let other = if orbital == 0 { d } else { a };
                let g = other / det;
                // d/de [other / det] with d(det)/de = a + d
                let dg = (det - other * (a + d)) / (det * det);
                (g, dg)
            }
            _ => {
                let r = 1.0 / (e - self.dispersion(k)[0]);
                (r, -r * r)
            }
        }
    }

    /// Photon amplitudes of `(e - h_k)^{-1}` applied to orbital `orbital`.
    pub(crate) fn orbital_column(&self, k: f64, orbital: usize, e: Complex64) -> Vec<Complex64> {
        match self.lattice {
            Lattice::AlternatingLoss { j_hop, delta } => {
                let h = alternating_bloch(j_hop, delta, self.kappa, k);
                let a = e - h[0][0];
                let d = e - h[1][1];
                let det = a * d - h[0][1] * h[1][0];
                // inverse of [[a, -h01], [-h10, d]] is [[d, h01], [h10, a]] / det
                if orbital == 0 {
                    vec![d / det, h[1][0] / det]
                } else {
                    vec![h[0][1] / det, a / det]
                }
            }
            _ => vec![1.0 / (e - self.dispersion(k)[0])],
        }
    }

    /// Minimum distance from `e` to the band energies sampled on `n_k`
    /// momenta.
    pub fn distance_to_spectrum(&self, e: Complex64, n_k: usize) -> f64 {
        momentum_grid(n_k)
            .into_iter()
            .flat_map(|k| self.dispersion(k))
            .map(|w| (w - e).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding number of `k -> det(h_k - e_ref)` over the Brillouin zone.
    ///
    /// The phase is accumulated step by step; whenever a single step turns
    /// by more than `pi / 2` the grid is doubled, up to `2^20` points.
    pub fn spectral_winding(&self, e_ref: Complex64, n_k: usize) -> Result<i32> {
        if n_k < 256 {
            return Err(Error::InvalidArgument(format!("winding needs n_k >= 256 (got {n_k})")));
        }
        let tol = 1e-9 * self.energy_scale();
        let distance = self.distance_to_spectrum(e_ref, n_k);
        if distance <= tol {
            return Err(Error::ReferenceOnSpectrum { e_ref, distance });
        }
        let mut n = n_k;
        while n <= 1 << 20 {
            let mut total = 0.0;
            let mut max_step: f64 = 0.0;
            let mut prev = self.characteristic(-PI, e_ref);
            for j in 1..=n {
                let k = -PI + 2.0 * PI * j as f64 / n as f64;
                let cur = self.characteristic(k, e_ref);
                let step = (cur / prev).arg();
                max_step = max_step.max(step.abs());
                total += step;
                prev = cur;
            }
            if max_step <= PI / 2.0 {
                return Ok((total / (2.0 * PI)).round() as i32);
            }
            n *= 2;
        }
        Err(Error::NonConvergence { terms: 1 << 20 })
    }

    /// Momenta of the exceptional points of the alternating-loss lattice.
    ///
    /// Empty when `delta != 0` (the staggered energy lifts the coalescence)
    /// or when `kappa >= 4 J`.
    pub fn exceptional_points(&self) -> Result<Vec<f64>> {
        let Lattice::AlternatingLoss { j_hop, delta } = self.lattice else {
            return Err(Error::WrongVariant {
                operation: "exceptional_points",
                expected: "alternating-loss",
            });
        };
        if delta != 0.0 || self.kappa <= 0.0 || j_hop == 0.0 || self.kappa >= 4.0 * j_hop.abs() {
            return Ok(Vec::new());
        }
        let k_ep = (self.kappa * self.kappa / (8.0 * j_hop * j_hop) - 1.0).acos();
        Ok(vec![-k_ep, k_ep])
    }

    /// Histogram of `Im E` for all bands over `n_k` uniformly spaced momenta.
    pub fn dos_damping(&self, n_k: usize, bins: usize) -> Result<DampingHistogram> {
        if bins == 0 || n_k < 10 * bins {
            return Err(Error::InvalidArgument(format!(
                "dos_damping needs bins >= 1 and n_k >= 10 * bins (got n_k = {n_k}, bins = {bins})"
            )));
        }
        let lower = match self.lattice {
            Lattice::Unidirectional => -2.0 * self.kappa,
            Lattice::HatanoNelson { j_right, j_left } => -self.kappa - (j_right - j_left).abs(),
            Lattice::AlternatingLoss { .. } => -self.kappa,
        };
        let upper = 0.0;
        let lower = if lower < upper { lower } else { -self.energy_scale() };
        let bin_width = (upper - lower) / bins as f64;
        let mut hist = DampingHistogram {
            lower,
            upper,
            bin_width,
            counts: vec![0; bins],
            density: vec![0.0; bins],
            max_imag: f64::NEG_INFINITY,
            min_imag: f64::INFINITY,
        };
        for k in momentum_grid(n_k) {
            for e in self.dispersion(k) {
                let b = hist.bin_of(e.im);
                hist.counts[b] += 1;
                hist.max_imag = hist.max_imag.max(e.im);
                hist.min_imag = hist.min_imag.min(e.im);
            }
        }
        let norm = n_k as f64 * bin_width;
        for (d, &c) in hist.density.iter_mut().zip(&hist.counts) {
            *d = c as f64 / norm;
        }
        Ok(hist)
    }

    /// Real-space effective bath Hamiltonian.
    pub fn build_matrix(&self) -> SparseMatrix {
        let l = self.length;
        let periodic = self.boundary == Boundary::Periodic;
        let mut t = Vec::with_capacity(3 * l);
        let bond = |t: &mut Vec<_>, from: usize, to: usize, right: Complex64, left: Complex64| {
            t.push((to, from, right));
            t.push((from, to, left));
        };
        let bonds = if periodic { l } else { l - 1 };
        match self.lattice {
            Lattice::Unidirectional => {
                for x in 0..l {
                    t.push((x, x, -I * self.kappa));
                }
                for x in 0..bonds {
                    bond(&mut t, x, (x + 1) % l, self.kappa.into(), 0.0.into());
                }
            }
            Lattice::HatanoNelson { j_right, j_left } => {
                for x in 0..l {
                    t.push((x, x, -I * self.kappa));
                }
                for x in 0..bonds {
                    bond(&mut t, x, (x + 1) % l, j_right.into(), j_left.into());
                }
            }
            Lattice::AlternatingLoss { j_hop, delta } => {
                for x in 0..l {
                    let onsite = if x % 2 == 0 {
                        Complex64::new(delta, -self.kappa)
                    } else {
                        Complex64::new(-delta, 0.0)
                    };
                    t.push((x, x, onsite));
                }
                for x in 0..bonds {
                    bond(&mut t, x, (x + 1) % l, j_hop.into(), j_hop.into());
                }
            }
        }
        SparseMatrix::from_triplets(l, t)
    }
}

fn alternating_bloch(j_hop: f64, delta: f64, kappa: f64, k: f64) -> Matrix2 {
    let off_ab = j_hop * (1.0 + (-I * k).exp());
    let off_ba = j_hop * (1.0 + (I * k).exp());
    [
        [Complex64::new(delta, -kappa), off_ab],
        [off_ba, Complex64::new(-delta, 0.0)],
    ]
}

/// The `n_k` allowed Bloch momenta of a ring in `[-pi, pi)`:
/// `k_n = 2 pi (n - floor(n_k / 2)) / n_k`, which is `2 pi n / n_k - pi` for
/// even `n_k`. For odd `n_k` the shifted grid would not be a set of
/// allowed momenta.
pub fn momentum_grid(n_k: usize) -> Vec<f64> {
    let half = (n_k / 2) as f64;
    (0..n_k).map(|n| 2.0 * PI * (n as f64 - half) / n_k as f64).collect()
}
