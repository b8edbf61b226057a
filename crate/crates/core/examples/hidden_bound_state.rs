//! The bound state hidden inside the spectral loop of the unidirectional
//! ring: its energy and localization length do not move with g, while an
//! ordinary pair of bound states leaves the loop once g > kappa.

use nhemitter::boundstates::{bound_states_closed_unidirectional, bound_states_numeric, LoopClass, SearchOptions};
use nhemitter::{BathSpec, Boundary, EffectiveHamiltonian, EmitterSpec};
use num_complex::Complex64;

fn main() -> nhemitter::Result<()> {
    let kappa = 1.0;
    let delta = Complex64::new(0.3, -0.5);
    let bath = BathSpec::unidirectional(kappa, 400, Boundary::Periodic);
    let x0 = 200;
    println!("closed-form xi = {:.7}", 1.0 / (kappa / (delta + Complex64::i() * kappa).norm()).ln());
    for g in [0.2, 0.8, 1.6, 2.4] {
        let h = EffectiveHamiltonian::assemble(&bath, &EmitterSpec::with_complex_detuning(delta, g, x0))?;
        let states = bound_states_numeric(&h, &SearchOptions::default())?;
        println!("g = {g}:");
        for s in &states {
            let right: f64 = s.profile[x0 + 1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
            println!(
                "  {:?} E = {:.8} |c_e|^2 = {:.4} xi = {:.5} max|c_x>x0| = {right:.1e}",
                s.loop_class,
                s.energy,
                s.emitter_weight,
                s.xi().unwrap_or(f64::NAN)
            );
        }
    }

    // thermodynamic limit at zero detuning: the pole pair crosses the loop at g = kappa
    for g in [0.6, 0.99, 1.01, 1.6] {
        let outside = bound_states_closed_unidirectional(Complex64::new(0.0, 0.0), g, kappa)?
            .into_iter()
            .filter(|s| s.loop_class == LoopClass::OutsideLoop)
            .count();
        println!("Delta = 0, g = {g}: {outside} outside-loop states");
    }
    Ok(())
}
