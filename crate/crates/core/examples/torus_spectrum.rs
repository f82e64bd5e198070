//! Sorted spectrum of a torus with r = 10 mm, R = 20 mm (eps = 0.5).

use torospec::{build_spectrum, ground_state, Geometry, SpectralModel, SPEED_OF_LIGHT};

fn main() -> torospec::Result<()> {
    let cavity = Geometry::torus(0.010, 0.020)?;
    let model = SpectralModel::TorusPerturbative;
    let spectrum = build_spectrum(&cavity, &model, 14e9, SPEED_OF_LIGHT)?;

    println!("ground state: {}", ground_state(&cavity, &model)?);
    println!(
        "{:>4} {:>8} {:>10} {:>11} {}",
        "#", "mode", "F", "f / GHz", "mult"
    );
    for (i, e) in spectrum.entries.iter().enumerate() {
        println!(
            "{:>4} {:>8} {:>10.6} {:>11.6} {}{}",
            i + 1,
            e.mode.to_string(),
            e.f_dimensionless,
            e.frequency / 1e9,
            e.multiplicity,
            if e.extrapolated { "  extrapolated" } else { "" }
        );
    }
    Ok(())
}
