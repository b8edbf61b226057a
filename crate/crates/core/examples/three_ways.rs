//! The emitter amplitude computed three independent ways: integrating the
//! lattice equations, the residue formula, and numerically inverting the
//! resolvent along a contour above the real axis.

use nhemitter::dynamics::{
    emitter_amplitude_unidirectional, evolve_numeric, resolvent_inverse_transform, EvolveOptions, GreenFunction,
    ResolventChannel,
};
use nhemitter::{BathSpec, Boundary, EffectiveHamiltonian, EmitterSpec};
use num_complex::Complex64;

fn main() -> nhemitter::Result<()> {
    let kappa = 1.0;
    let times = [0.0, 1.0, 5.0, 10.0];
    let bath = BathSpec::unidirectional(kappa, 400, Boundary::Open);
    let opts = EvolveOptions {
        record_snapshots: false,
        ..EvolveOptions::default()
    };
    for (delta, g) in [(Complex64::new(0.0, 0.0), 0.6), (Complex64::new(0.3, -0.5), 0.8), (Complex64::new(0.0, 0.0), 1.6)] {
        let h = EffectiveHamiltonian::assemble(&bath, &EmitterSpec::with_complex_detuning(delta, g, 0))?;
        let numeric = evolve_numeric(&h, &times, &opts)?;
        let green = GreenFunction::unidirectional(delta, g, kappa);
        println!("Delta = {delta}, g = {g}");
        for (i, &t) in times.iter().enumerate().skip(1) {
            let residue = emitter_amplitude_unidirectional(t, delta, g, kappa);
            let contour = resolvent_inverse_transform(&green, ResolventChannel::Emitter, t, 1e-3, 200.0, 200_000)?;
            println!(
                "  t = {t:4}: numeric {:.8}  residue {:.8}  contour {:.8} (+- {:.0e})",
                numeric.c_e_series[i], residue, contour.value, contour.error_estimate
            );
        }
    }
    Ok(())
}
