//! Point-gap topology of the baths: winding numbers of the unidirectional
//! loop, and the exceptional points and damping density of the
//! alternating-loss chain.

use nhemitter::{BathSpec, Boundary};
use num_complex::Complex64;

fn main() -> nhemitter::Result<()> {
    let uni = BathSpec::unidirectional(1.0, 400, Boundary::Periodic);
    for e in [Complex64::new(0.0, -1.0), Complex64::new(0.5, -0.8), Complex64::new(0.0, 0.5), Complex64::new(2.5, -1.0)] {
        println!("winding around {e}: {}", uni.spectral_winding(e, 4096)?);
    }
    let hn = BathSpec::hatano_nelson(1.0, 0.5, 1.0, 400, Boundary::Periodic);
    println!("Hatano-Nelson winding around -i: {}", hn.spectral_winding(Complex64::new(0.0, -1.0), 4096)?);

    for delta in [0.0, 0.3] {
        let alt = BathSpec::alternating_loss(1.0, 1.0, delta, 400, Boundary::Periodic);
        let eps = alt.exceptional_points()?;
        println!("alternating loss, delta = {delta}: exceptional points {eps:?}");
        let h = alt.dos_damping(4096, 40)?;
        let peak = (0..h.counts.len()).max_by_key(|&i| h.counts[i]).unwrap_or(0);
        println!(
            "  least damped Im E = {:.4}, densest bin at Im E = {:.4} ({} samples)",
            h.max_imag,
            h.bin_center(peak),
            h.counts[peak]
        );
    }
    println!("arccos(-7/8) = {:.15}", (-7.0f64 / 8.0).acos());
    Ok(())
}
