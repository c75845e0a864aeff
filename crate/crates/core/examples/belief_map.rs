//! Fuses two point estimates with Dempster's rule over a floor grid and
//! writes the fused belief map as CSV and PGM.

use fpfuse::datamodel::{Bounds, Position};
use fpfuse::fuse::{argmax_belief, bba_from_point, dempster_combine, export_belief_map, fused_point, make_grid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = make_grid(Bounds::rect(6.0, 14.0)?, 0.5)?;
    let rf = Position::new(2.1, 7.4);
    let knn = Position::new(2.6, 6.9);
    let m_rf = bba_from_point(&rf, &grid, 1.0, 0.05)?;
    let m_knn = bba_from_point(&knn, &grid, 1.0, 0.05)?;
    let fused = dempster_combine(&m_rf, &m_knn)?;

    let (cell, centroid) = argmax_belief(&fused, &grid);
    let p = fused_point(&fused, &grid);
    println!("{} cells ({:?}), theta mass {:.2e}", grid.len(), grid.shape(), fused.theta);
    println!("peak cell {cell} at ({:.2}, {:.2})", centroid.x, centroid.y);
    println!("fused point ({:.3}, {:.3})", p.x, p.y);

    let dir = tempfile::tempdir()?;
    let stem = dir.path().join("belief");
    export_belief_map(&fused, &grid, &stem)?;
    let pgm = std::fs::read(stem.with_extension("pgm"))?;
    println!("wrote {} byte PGM", pgm.len());
    Ok(())
}
