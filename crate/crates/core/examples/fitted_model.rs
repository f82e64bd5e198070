//! Swap the perturbative torus model for fitted curves F^2 = c0 + c2 eps^2 + c4 eps^4.

use torospec::{build_spectrum, FitTable, Geometry, SpectralModel, SPEED_OF_LIGHT};

const TABLE: &str = "\
family,parity,k,n,m,c0,c2,c4
TE,1,1,1,0,0.343475,-0.025330,-0.004
TE,-1,1,1,0,0.343475,0.025330,0.002
TM,0,0,1,0,0.585973,0.075991,-0.010
";

fn main() -> torospec::Result<()> {
    let fitted = SpectralModel::TorusFitted(FitTable::from_csv_reader(TABLE.as_bytes())?);
    let cavity = Geometry::torus(0.018, 0.020)?;
    for (name, model) in [
        ("perturbative", SpectralModel::TorusPerturbative),
        ("fitted", fitted),
    ] {
        let s = build_spectrum(&cavity, &model, 8e9, SPEED_OF_LIGHT)?;
        println!("{name}:");
        for e in &s.entries {
            println!(
                "  {:>8} {:.4} GHz{}",
                e.mode.to_string(),
                e.frequency / 1e9,
                if e.extrapolated {
                    " (extrapolated)"
                } else {
                    ""
                }
            );
        }
    }
    Ok(())
}
