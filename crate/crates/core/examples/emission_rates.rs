//! Emitter decay on the unidirectional lattice: exponential rate versus
//! coupling, from direct integration of a short open chain.
//!
//! Below g = kappa/2 the rate is (kappa - sqrt(kappa^2 - 4 g^2)) / 2
//! (g^2/kappa in the Zeno limit); above it saturates at kappa/2 and the
//! population oscillates, so the fit runs over its local maxima.

use nhemitter::analysis::{fit_exponential_rate, peak_envelope, RateSemantics};
use nhemitter::dynamics::{evolve_numeric, uniform_grid, EvolveOptions};
use nhemitter::{BathSpec, Boundary, EffectiveHamiltonian, EmitterSpec};

fn main() -> nhemitter::Result<()> {
    let kappa = 1.0;
    let bath = BathSpec::unidirectional(kappa, 64, Boundary::Open);
    let opts = EvolveOptions {
        record_snapshots: false,
        ..EvolveOptions::default()
    };
    println!("{:>6} {:>12} {:>12} {:>10}", "g", "fitted", "expected", "rel.err");
    for g in [0.05, 0.1, 0.3, 0.45, 0.6, 0.8, 1.0] {
        let h = EffectiveHamiltonian::assemble(&bath, &EmitterSpec::new(0.0, 0.0, g, 0))?;
        let (t_max, window, expected) = if g < kappa / 2.0 {
            let slow = (kappa - (kappa * kappa - 4.0 * g * g).sqrt()) / 2.0;
            (60.0 / slow.max(0.1), (30.0 / slow.max(0.1) * 0.5, 60.0 / slow.max(0.1)), slow)
        } else {
            (200.0, (5.0, 200.0), kappa / 2.0)
        };
        let times = uniform_grid(t_max, 8001);
        let res = evolve_numeric(&h, &times, &opts)?;
        let pop = res.emitter_population();
        let fit = if g < kappa / 2.0 {
            fit_exponential_rate(&times, &pop, window, RateSemantics::AmplitudeFromProbability)?
        } else {
            let (tp, vp) = peak_envelope(&times, &pop);
            fit_exponential_rate(&tp, &vp, window, RateSemantics::AmplitudeFromProbability)?
        };
        println!(
            "{g:>6.2} {:>12.6} {:>12.6} {:>10.2e}",
            fit.value,
            expected,
            (fit.value / expected - 1.0).abs()
        );
    }
    Ok(())
}
