//! Two-point density of a Gaussian mixture as a function of separation,
//! and the mean momentum read off its slope at zero separation.

use relquant::geometry::FourVector;
use relquant::phase_space::{
    mean_momentum_from_density, phase_space_moment, wigner_moyal_transform, CarrierDensity, GaussianCarrier, PhaseSpaceDistribution,
};

fn main() -> relquant::Result<()> {
    let m = 1.0;
    let mut left = GaussianCarrier::slice(-1.0, 0.6, 0.8, 0.4, m);
    let mut right = GaussianCarrier::slice(1.5, 0.9, -0.5, 0.3, m);
    left.weight = 0.7;
    right.weight = 0.3;
    let dist = PhaseSpaceDistribution::Mixture(vec![left, right]);

    println!("# dx[1/m] re_rho[m] im_rho[m]");
    for k in 0..=40 {
        let d = -4.0 + 0.2 * k as f64;
        let v = wigner_moyal_transform(&dist, &FourVector::tx(0.0, 0.0), &FourVector::tx(0.0, d), &Default::default())?.value;
        println!("{d:.2} {:.10e} {:.10e}", v.re, v.im);
    }

    let est = mean_momentum_from_density(&CarrierDensity::new(&dist, Default::default(), 10.0, 201)?)?;
    let direct = phase_space_moment(&dist)?;
    println!("# <p1> from density {:.12}, from F {:.12}", est.momentum[1], direct[1]);
    Ok(())
}
