//! Bessel zeros behind every mode function: p_kn, p'_kn and their
//! scaled forms z = p/pi.

use torospec::special::{BesselZeroTable, ZeroKind};
use torospec::{bessel_j, bessel_j_prime};

fn main() -> torospec::Result<()> {
    let j = BesselZeroTable::build(ZeroKind::J, 4, 3)?;
    let jp = BesselZeroTable::build(ZeroKind::JPrime, 4, 3)?;

    println!(
        "{:>3} {:>3} {:>14} {:>14} {:>10}",
        "k", "n", "p_kn", "p'_kn", "z_kn"
    );
    for k in 0..=4 {
        for n in 1..=3 {
            let p = j.get(k, n).unwrap();
            let pp = jp.get(k, n).unwrap();
            println!(
                "{k:>3} {n:>3} {p:>14.10} {pp:>14.10} {:>10.6}",
                p / std::f64::consts::PI
            );
        }
    }

    let p01 = j.get(0, 1).unwrap();
    println!("\nJ_0(p_01) = {:.1e}", bessel_j(0, p01)?);
    println!(
        "J_1'(p'_11) = {:.1e}",
        bessel_j_prime(1, jp.get(1, 1).unwrap())?
    );
    Ok(())
}
