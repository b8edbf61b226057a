//! Total photon population in the pole-amplification regime decays as
//! t^-1/2 even though the emitter decays exponentially.

use std::time::Instant;

use nhemitter::analysis::fit_power_law;
use nhemitter::dynamics::{evolve_numeric, photon_population_series, uniform_grid, EvolveOptions};
use nhemitter::{BathSpec, Boundary, EffectiveHamiltonian, EmitterSpec};

fn main() -> nhemitter::Result<()> {
    let bath = BathSpec::unidirectional(1.0, 4000, Boundary::Open);
    let h = EffectiveHamiltonian::assemble(&bath, &EmitterSpec::new(0.0, 0.0, 0.6, 0))?;
    let times = uniform_grid(300.0, 601);
    let opts = EvolveOptions {
        snapshot_every: 1,
        ..EvolveOptions::default()
    };
    let start = Instant::now();
    let res = evolve_numeric(&h, &times, &opts)?;
    let (t, n): (Vec<f64>, Vec<f64>) = photon_population_series(&res)?.into_iter().unzip();
    let fit = fit_power_law(&t, &n, (50.0, 300.0))?;
    for i in (0..t.len()).step_by(100) {
        println!("t = {:6.1}  N_ph = {:.6e}", t[i], n[i]);
    }
    println!(
        "log-log slope over [50, 300]: {:+.4} +- {:.1e} (R^2 = {:.6}), {:.1} s",
        fit.value,
        fit.stderr,
        fit.r_squared,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
