//! Bound states of a square well: energies below the rest mass and the
//! free states above it.

use relquant::field::{square_well, stationary_solve, EnergyWindow, PotentialConfig};
use relquant::geometry::{Axis, AxisKind};
use relquant::Physics;

fn main() -> relquant::Result<()> {
    let phys = Physics::with_mass(1.0);
    let x = Axis::span(AxisKind::X, -15.0, 15.0, 301);
    let well = square_well(x, 0.0, 4.0, 0.3)?;
    let pot = PotentialConfig::free().with_scalar(well)?;
    let states = stationary_solve(x, &pot, &phys, EnergyWindow { min: 0.5, max: 1.1 })?;

    println!("# level E[m] bound residual[m^2]");
    for (k, s) in states.iter().enumerate() {
        println!("{k} {:.10} {} {:.3e}", s.energy, s.energy < phys.mass, s.residual);
    }
    Ok(())
}
