use num_complex::Complex64;

use super::pair::{recompose, MadelungPair};
use super::potential::phase_gradient_with;
use crate::geometry::{Field, FourVector, ScalarField};
use crate::numerics::Stencil;
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct ExpansionCheck {
    /// `Psi*(x - dx/2) Psi(x + dx/2)`.
    pub exact: Complex64,
    /// `exp(i d_a S dx^a) {R^2 - (1/4) dx^a dx^b [R_a R_b - R R_ab]}`.
    pub expansion: Complex64,
    pub error: f64,
}

/// Second-order small-separation expansion of the two-point product against
/// the exact product (cubic interpolation between nodes, fourth-order
/// derivatives). The remainder is `O(|dx|^3)`.
pub fn expansion_check(mp: &MadelungPair, x: &FourVector, dx: &FourVector) -> Result<ExpansionCheck> {
    let psi = recompose(mp);
    let y = *x + *dx * 0.5;
    let yp = *x - *dx * 0.5;
    let exact = psi.interpolate_cubic(&yp.0)?.conj() * psi.interpolate_cubic(&y.0)?;

    let g = mp.grid();
    let at = |f: &ScalarField| f.interpolate_cubic(&x.0);
    let r = at(&mp.r)?;
    let ds = phase_gradient_with(mp, Stencil::Fourth)?;
    let mut first: Vec<(usize, ScalarField)> = Vec::new();
    for (axis, a) in g.axes().iter().enumerate() {
        first.push((a.kind.component(), mp.r.partial_with(axis, Stencil::Fourth)?));
    }
    let mut phase = 0.0;
    let mut quad = 0.0;
    for (ia, (ca, ra)) in first.iter().enumerate() {
        let sa = Field::new(g.clone(), ds.values.iter().map(|v| v[*ca]).collect())?;
        phase += at(&sa)? * dx[*ca];
        for (cb, rb) in first.iter() {
            let rab = if ca == cb {
                mp.r.partial2_with(ia, Stencil::Fourth)?
            } else {
                let ib = g.axes().iter().position(|a| a.kind.component() == *cb).unwrap_or(ia);
                ra.partial_with(ib, Stencil::Fourth)?
            };
            quad += dx[*ca] * dx[*cb] * (at(ra)? * at(rb)? - r * at(&rab)?);
        }
    }
    let expansion = Complex64::from_polar(1.0, phase) * (r * r - 0.25 * quad);
    Ok(ExpansionCheck { exact, expansion, error: (exact - expansion).norm() })
}
