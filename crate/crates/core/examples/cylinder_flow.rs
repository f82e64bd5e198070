//! Universal flow diagram of a cylinder and its ground-state crossover.

use torospec::mode::enumerate_modes;
use torospec::{cylinder_crossover, cylinder_f, flow_sweep, CavityKind, ModeId, SpectralModel};

fn main() -> torospec::Result<()> {
    let eps_c = cylinder_crossover();
    println!("TE111 and TM010 cross at eps = d/h = {eps_c:.5}");

    let te111 = ModeId::cylinder_te(1, 1, 1);
    let tm010 = ModeId::tm(0, 1, 0);
    for eps in [0.5, eps_c, 1.5] {
        println!(
            "eps {eps:.4}: F(TE111) = {:.5}, F(TM010) = {:.5}",
            cylinder_f(&te111, eps)?,
            cylinder_f(&tm010, eps)?
        );
    }

    // every curve with F <= 1 at eps = 1, sampled on a coarse grid
    let modes = enumerate_modes(CavityKind::Cylinder, 1.0, 1.0)?;
    let grid: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();
    let rows = flow_sweep(&modes, &grid, &SpectralModel::CylinderExact)?;
    println!("\n{} curves, {} points", modes.len(), rows.len());
    for mode in &modes {
        let line: Vec<String> = rows
            .iter()
            .filter(|r| r.mode == *mode)
            .map(|r| format!("{:.3}", r.f_dimensionless))
            .collect();
        println!("{mode:>8}: {}", line.join(" "));
    }
    Ok(())
}
