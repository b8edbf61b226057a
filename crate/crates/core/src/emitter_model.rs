//! Single-excitation effective Hamiltonian of one two-level emitter coupled
//! to a lattice bath.
//!
//! Basis layout: index 0 is the excited emitter, index `1 + x` is one
//! photon on site `x`.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmitterSpec {
    /// Bare detuning.
    pub delta0: f64,
    /// Spontaneous decay rate of the emitter.
    pub gamma: f64,
    /// Coupling strength to site `x0`.
    pub g: f64,
    /// Coupled site. On the alternating-loss lattice an even site is lossy
    /// and an odd one is loss-free.
    pub x0: usize,
}

impl EmitterSpec {
    pub fn new(delta0: f64, gamma: f64, g: f64, x0: usize) -> Self {
        EmitterSpec { delta0, gamma, g, x0 }
    }

    /// Emitter with a given complex detuning `delta0 - i gamma / 2`.
    pub fn with_complex_detuning(delta: Complex64, g: f64, x0: usize) -> Self {
        EmitterSpec {
            delta0: delta.re,
            gamma: -2.0 * delta.im,
            g,
            x0,
        }
    }

    /// Complex detuning `delta0 - i gamma / 2`.
    pub fn delta(&self) -> Complex64 {
        Complex64::new(self.delta0, -self.gamma / 2.0)
    }

    pub fn violations(&self, length: usize) -> Vec<String> {
        let mut out = Vec::new();
        if !self.delta0.is_finite() {
            out.push("delta0 must be finite".into());
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            out.push(format!("gamma must be finite and >= 0 (got {})", self.gamma));
        }
        if !self.g.is_finite() || self.g < 0.0 {
            out.push(format!("g must be finite and >= 0 (got {})", self.g));
        }
        if self.x0 >= length {
            out.push(format!("x0 = {} outside lattice of length {}", self.x0, length));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleExcitationState {
    pub c_e: Complex64,
    pub c_x: Vec<Complex64>,
}

impl SingleExcitationState {
    /// `|e> (x) |vac>` on a lattice of `length` sites.
    pub fn excited_emitter(length: usize) -> Self {
        SingleExcitationState {
            c_e: Complex64::new(1.0, 0.0),
            c_x: vec![Complex64::new(0.0, 0.0); length],
        }
    }

    /// Rebuilds a state from the flattened basis (emitter first).
    pub fn from_flat(v: &[Complex64]) -> Self {
        SingleExcitationState {
            c_e: v[0],
            c_x: v[1..].to_vec(),
        }
    }

    pub fn to_flat(&self) -> Vec<Complex64> {
        std::iter::once(self.c_e).chain(self.c_x.iter().copied()).collect()
    }

    pub fn photon_population(&self) -> f64 {
        self.c_x.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_e.norm_sqr() + self.photon_population()
    }

    /// Probability of having relaxed to `|g> (x) |vac>`.
    pub fn ground_probability(&self) -> f64 {
        ground_probability(self)
    }
}

/// `p_t = 1 - (|c_e|^2 + sum_x |c_x|^2)` for a state evolved from a
/// normalized initial condition.
pub fn ground_probability(state: &SingleExcitationState) -> f64 {
    1.0 - state.norm_sqr()
}

#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian {
    matrix: SparseMatrix,
    bath: BathSpec,
    emitter: EmitterSpec,
}

impl EffectiveHamiltonian {
    /// Places the emitter block, the bath block and the symmetric coupling
    /// `g` between the emitter and site `x0`.
    pub fn assemble(bath: &BathSpec, emitter: &EmitterSpec) -> Result<Self> {
        if emitter.x0 >= bath.length {
            return Err(Error::IndexOutOfRange {
                index: emitter.x0,
                length: bath.length,
            });
        }
        let mut problems = bath.violations();
        problems.extend(emitter.violations(bath.length));
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        let bath_block = bath.build_matrix();
        let mut t: Vec<(usize, usize, Complex64)> = bath_block.iter().map(|(r, c, v)| (r + 1, c + 1, v)).collect();
        t.push((0, 0, emitter.delta()));
        let site = 1 + emitter.x0;
        t.push((0, site, emitter.g.into()));
        t.push((site, 0, emitter.g.into()));
        Ok(EffectiveHamiltonian {
            matrix: SparseMatrix::from_triplets(bath.length + 1, t),
            bath: *bath,
            emitter: *emitter,
        })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn emitter(&self) -> &EmitterSpec {
        &self.emitter
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix.get(row, col)
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        self.matrix.to_dense()
    }

    pub fn inf_norm(&self) -> f64 {
        self.matrix.inf_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::Boundary;

    #[test]
    fn placement_of_blocks() {
        let bath = BathSpec::unidirectional(1.0, 4, Boundary::Periodic);
        let em = EmitterSpec::with_complex_detuning(Complex64::new(0.3, -0.5), 0.5, 1);
        let h = EffectiveHamiltonian::assemble(&bath, &em).unwrap();
        assert_eq!(h.dim(), 5);
        assert_eq!(h.get(0, 0), Complex64::new(0.3, -0.5));
        assert_eq!(h.get(0, 2), Complex64::new(0.5, 0.0));
        assert_eq!(h.get(2, 0), Complex64::new(0.5, 0.0));
        let b = bath.build_matrix();
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(h.get(r + 1, c + 1), b.get(r, c));
            }
        }
    }

    #[test]
    fn decoupled_emitter_is_block_diagonal() {
        let bath = BathSpec::unidirectional(1.0, 6, Boundary::Open);
        let h = EffectiveHamiltonian::assemble(&bath, &EmitterSpec::new(0.0, 1.0, 0.0, 2)).unwrap();
        assert_eq!(h.get(0, 0), Complex64::new(0.0, -0.5));
        for x in 1..7 {
            assert_eq!(h.get(0, x), Complex64::new(0.0, 0.0));
            assert_eq!(h.get(x, 0), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn bad_site_is_rejected() {
        let bath = BathSpec::unidirectional(1.0, 6, Boundary::Open);
        let err = EffectiveHamiltonian::assemble(&bath, &EmitterSpec::new(0.0, 0.0, 0.5, 6)).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 6, length: 6 }));
    }

    #[test]
    fn initial_state_has_no_ground_population() {
        let s = SingleExcitationState::excited_emitter(10);
        assert_eq!(ground_probability(&s), 0.0);
        let flat = s.to_flat();
        assert_eq!(SingleExcitationState::from_flat(&flat), s);
    }
}
