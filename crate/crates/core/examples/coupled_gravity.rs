//! Self-consistent ground state in its own statistical metric, printing
//! the fixed-point iteration history.

use relquant::gravity::{coupled_solve, GravityConfig};

fn main() -> relquant::Result<()> {
    let cfg = GravityConfig { newton_g: 1e-3, relaxation: 0.5, ..Default::default() };
    let sol = coupled_solve(&cfg)?;
    println!("# iteration energy[m] field_residual[1] quantum_residual[m^2] metric_change[1]");
    for r in &sol.trace {
        println!("{} {:.12} {:.3e} {:.3e} {:.3e}", r.iteration, r.energy, r.field_residual, r.quantum_residual, r.metric_change);
    }
    println!("# converged {} after {} iterations, Phi(0) = {:.6e}", sol.converged, sol.iterations(), sol.phi[0]);
    Ok(())
}
