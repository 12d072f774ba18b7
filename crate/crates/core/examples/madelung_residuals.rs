//! Split an evolved packet into R and S and print the continuity and
//! Hamilton-Jacobi residuals on successively finer grids.

use relquant::field::{evolve, gaussian_packet, EnergyBranch, EvolveOptions, PotentialConfig};
use relquant::geometry::{Axis, AxisKind, MetricField};
use relquant::madelung::{continuity_residual, decompose, hamilton_jacobi_residual};
use relquant::numerics::loglog_slope;
use relquant::Physics;

fn main() -> relquant::Result<()> {
    let phys = Physics::with_mass(1.0);
    let free = PotentialConfig::free();
    let (mut hs, mut ct, mut hj) = (vec![], vec![], vec![]);
    println!("# h[1/m] continuity[m] hamilton_jacobi[m]");
    for n in [200usize, 400, 800, 1600] {
        let x = Axis::periodic(AxisKind::X, -10.0, 20.0, n);
        let init = gaussian_packet(x, 0.0, 1.0, 0.8, phys.mass, EnergyBranch::Positive)?;
        let dt = 0.5 * x.spacing;
        let ev = evolve(&init, &free, &phys, &EvolveOptions { dt, steps: (1.0 / dt).round() as usize, record_every: 1 })?;
        let mp = decompose(&ev.history, 1e-8)?;
        let g = MetricField::flat(mp.grid());
        let rmax = mp.r.max_abs();
        let core = |k: usize| mp.r.values[k] > 1e-2 * rmax && mp.grid().is_interior(k, 2);
        hs.push(x.spacing);
        ct.push(continuity_residual(&mp, &g, &phys, &free)?.max_abs_where(core));
        hj.push(hamilton_jacobi_residual(&mp, &g, &phys, &free)?.max_abs_where(core));
        println!("{:.5} {:.6e} {:.6e}", x.spacing, ct[ct.len() - 1], hj[hj.len() - 1]);
    }
    println!("# slopes: continuity {:.3}, Hamilton-Jacobi {:.3}", loglog_slope(&hs, &ct), loglog_slope(&hs, &hj));
    Ok(())
}
