//! Dark TM_k10 modes: rank and neighbouring gaps as the torus closes up.

use torospec::{
    build_spectrum, dark_modes, gaps, mode_rank, Geometry, SpectralModel, SPEED_OF_LIGHT,
};

fn main() -> torospec::Result<()> {
    let model = SpectralModel::TorusPerturbative;
    let r = 0.010;
    for major in [0.040, 0.020, 0.0125, 0.0111, 0.010] {
        let cavity = Geometry::torus(r, major)?;
        let spectrum = build_spectrum(&cavity, &model, 20e9, SPEED_OF_LIGHT)?;
        println!(
            "R = {:.1} mm, eps = {:.3}",
            major * 1e3,
            cavity.evaluation_aspect_ratio()
        );
        for dm in dark_modes(&spectrum)? {
            let g = gaps(&spectrum, &dm.mode)?;
            let mhz = |v: Option<f64>| v.map_or("-".into(), |v| format!("{:+.0}", v / 1e6));
            print!(
                "  {} {:.4} GHz rank {} gaps {} / {} MHz",
                dm.mode,
                dm.frequency / 1e9,
                mode_rank(&spectrum, &dm.mode)?,
                mhz(g.below),
                mhz(g.above)
            );
            if let Some(n) = g.named {
                print!(
                    ", TE+-112 {:+.0} / {:+.0} MHz{}",
                    n.plus / 1e6,
                    n.minus / 1e6,
                    if n.extrapolated {
                        " (extrapolated)"
                    } else {
                        ""
                    }
                );
            }
            println!();
        }
    }
    Ok(())
}
