//! Guidance-equation paths through a free Gaussian packet.

use relquant::field::{evolve, gaussian_packet, EnergyBranch, EvolveOptions, PotentialConfig};
use relquant::geometry::{Axis, AxisKind, FourVector, MetricField};
use relquant::madelung::{decompose, integrate_trajectory, TrajectoryOptions};
use relquant::Physics;

fn main() -> relquant::Result<()> {
    let phys = Physics::with_mass(1.0);
    let free = PotentialConfig::free();
    let x = Axis::periodic(AxisKind::X, -15.0, 30.0, 600);
    let init = gaussian_packet(x, 0.0, 1.0, 0.5, phys.mass, EnergyBranch::Positive)?;
    let dt = 0.5 * x.spacing;
    let ev = evolve(&init, &free, &phys, &EvolveOptions { dt, steps: (4.0 / dt).round() as usize, record_every: 1 })?;
    let mp = decompose(&ev.history, 1e-8)?;
    let g = MetricField::flat(mp.grid());

    println!("# seed_x[1/m] tau[1/m] t[1/m] x[1/m] stop");
    for seed in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let tr = integrate_trajectory(FourVector::tx(0.1, seed), &mp, &free, &g, &phys, &TrajectoryOptions { tau_span: 3.0, dtau: 0.01 })?;
        let end = tr.states.last().expect("trajectory has a start");
        println!("{seed:.2} {:.4} {:.6} {:.6} {:?}", end.tau, end.x[0], end.x[1], tr.stop);
    }
    Ok(())
}
