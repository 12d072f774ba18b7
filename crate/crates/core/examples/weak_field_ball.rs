//! Weak-field potential of a uniform ball compared with the closed form.

use relquant::gravity::{solve_metric_weak_field, ExternalMatter, GravityConfig, StressTensor};

fn main() -> relquant::Result<()> {
    let cfg = GravityConfig { newton_g: 1e-3, cells: 200, r_max: 10.0, ..Default::default() };
    let grid = cfg.grid()?;
    let axis = *grid.axis(0);
    let (radius, mass) = (2.5, 1.0);
    let rho = ExternalMatter::UniformBall { radius, mass }.density(&axis);
    let field = solve_metric_weak_field(&StressTensor::dust(&grid, &rho)?, &cfg)?;

    println!("# r[1/m] phi[1] phi_exact[1]");
    for (i, r) in axis.coords().iter().enumerate().step_by(10) {
        let gm = cfg.newton_g * mass;
        let exact = if *r < radius { -gm * (3.0 * radius * radius - r * r) / (2.0 * radius.powi(3)) } else { -gm / r };
        println!("{r:.3} {:.12e} {exact:.12e}", field.phi[i]);
    }
    Ok(())
}
