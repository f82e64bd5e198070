//! Wall-loss estimates: skin depth, V/(delta A) for four cavity families,
//! and photon lifetimes.

use torospec::quality::{family_comparison, quality_report, ring_mode_frequency};
use torospec::{photon_lifetime, Geometry, Material, SPEED_OF_LIGHT};

fn main() -> torospec::Result<()> {
    let torus = Geometry::torus(0.010, 0.020)?;
    for material in [Material::aluminium(), Material::copper()] {
        let q = quality_report(&torus, 10e9, &material)?;
        println!(
            "{:>9}: delta = {:.3} um, R_s = {:.1} mOhm, V/(delta A) = {:.0}",
            material.name,
            q.skin_depth * 1e6,
            q.surface_resistance * 1e3,
            q.q_ratio
        );
    }

    let delta = quality_report(&torus, 10e9, &Material::aluminium())?.skin_depth;
    println!("\nmatched r = 10 mm, aluminium at 10 GHz:");
    for row in family_comparison(0.010, 0.020, delta)? {
        println!("  {:>9} {:.0}", row.family, row.q_ratio);
    }

    println!("\nphoton lifetime at 7.5 GHz:");
    for q in [1e6, 1e9, 1e11] {
        println!("  Q = {q:.0e}: {:.3e} s", photon_lifetime(q, 7.5e9));
    }
    println!(
        "\nn = 10 ring mode of a 1 cm sapphire-like ring: {:.2} GHz",
        ring_mode_frequency(10, 0.01, 9.4, SPEED_OF_LIGHT) / 1e9
    );
    Ok(())
}
