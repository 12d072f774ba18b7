//! Evolve a Gaussian packet with the leapfrog scheme and print the charge
//! history together with the final density profile.

use relquant::field::{evolve, gaussian_packet, EnergyBranch, EvolveOptions, PotentialConfig};
use relquant::geometry::{Axis, AxisKind};
use relquant::io::{format_columns, Column};
use relquant::Physics;

fn main() -> relquant::Result<()> {
    let phys = Physics::with_mass(1.0);
    let x = Axis::periodic(AxisKind::X, -20.0, 40.0, 400);
    let init = gaussian_packet(x, -5.0, 1.5, 1.2, phys.mass, EnergyBranch::Positive)?;
    let dt = 0.5 * x.spacing;
    let ev = evolve(&init, &PotentialConfig::free(), &phys, &EvolveOptions { dt, steps: 400, record_every: 1 })?;

    println!("# charge drift {:.3e}", ev.charge_drift());
    let nx = x.count;
    let last = ev.history.values.len() - nx;
    let rho = ev.history.values[last..].iter().map(|z| z.norm_sqr()).collect();
    print!("{}", format_columns(&[Column::new("x", "1/m", x.coords()), Column::new("abs_psi_sq", "1", rho)])?);
    Ok(())
}
