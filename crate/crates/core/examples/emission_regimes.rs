//! The three emission regimes of the unidirectional lattice, predicted
//! from the poles and measured on a simulated photon profile at t = 40.

use nhemitter::analysis::{classify_regime, spatial_growth_rate, spatial_growth_rate_two_pole};
use nhemitter::dynamics::{
    evolve_numeric, photon_profile_snapshot, EvolveOptions,
};
use nhemitter::{BathSpec, Boundary, EffectiveHamiltonian, EmitterSpec};
use num_complex::Complex64;

fn main() -> nhemitter::Result<()> {
    let kappa = 1.0;
    let t = 40.0;
    let bath = BathSpec::unidirectional(kappa, 2000, Boundary::Open);
    let opts = EvolveOptions {
        snapshot_every: 1,
        ..EvolveOptions::default()
    };
    for (delta, g) in [(Complex64::new(0.0, -2.0), 0.6), (Complex64::new(0.0, 0.0), 0.6), (Complex64::new(0.0, 0.0), 1.6)] {
        let report = classify_regime(delta, g, kappa)?;
        println!(
            "Delta = {delta}, g = {g}: zeta+ = {:.4}, zeta- = {:.4} -> {:?}",
            report.zeta_plus, report.zeta_minus, report.regime
        );
        let h = EffectiveHamiltonian::assemble(&bath, &EmitterSpec::with_complex_detuning(delta, g, 0))?;
        let res = evolve_numeric(&h, &[0.0, t], &opts)?;
        let numeric = &res.snapshots.last().expect("final snapshot").c_x;
        let analytic = photon_profile_snapshot(60, t, delta, g, kappa)?;
        let max_diff = analytic.iter().zip(numeric).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        println!("  max |analytic - numeric| over x < 60: {max_diff:.2e}");
        let wide = spatial_growth_rate(numeric, (1, 60))?;
        println!("  wide-window ln|c_x| slope {:+.4}, R^2 = {:.4}", wide.value, wide.r_squared);
        if let Some(expected) = report.predicted_spatial_slope {
            let near = spatial_growth_rate_two_pole(numeric, (0, 8))?;
            println!(
                "  two-pole slope over x <= 8: {:+.4} (predicted {:+.4}, R^2 = {:.4})",
                near.value, expected, near.r_squared
            );
        }
    }
    Ok(())
}
