use crate::geometry::{Field, Grid, ScalarField};
use crate::phase_space::EMPotential;
use crate::{Error, Result};

/// Electric and magnetic field vectors sampled on the potential's grid.
/// Only `E^1` can be nonzero in 1+1 dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct EMFields {
    pub grid: Grid,
    pub electric: Vec<[f64; 3]>,
    pub magnetic: Vec<[f64; 3]>,
}

/// `E = -grad phi - dA/dt`, `B = curl A` (zero for a single `A^1(t, x)`).
pub fn em_fields_from_potential(em: &EMPotential) -> Result<EMFields> {
    let e1 = electric_x(em)?;
    Ok(EMFields {
        grid: em.grid.clone(),
        electric: e1.values.iter().map(|e| [*e, 0.0, 0.0]).collect(),
        magnetic: vec![[0.0; 3]; em.grid.len()],
    })
}

fn split(em: &EMPotential) -> Result<(ScalarField, ScalarField)> {
    Ok((Field::new(em.grid.clone(), em.phi.clone())?, Field::new(em.grid.clone(), em.ax.clone())?))
}

fn electric_x(em: &EMPotential) -> Result<ScalarField> {
    let (phi, ax) = split(em)?;
    let sa = em.grid.space_axis().ok_or_else(|| Error::Domain("potential grid has no spatial axis".into()))?;
    let mut e = phi.partial(sa)?.map(|v| -v);
    if let Some(ta) = em.grid.time_axis() {
        e = e.zip_map(&ax.partial(ta)?, |a, b| a - b);
    }
    Ok(e)
}

/// `(d_t phi, d_x A^1)`.
fn rates(em: &EMPotential) -> Result<(ScalarField, ScalarField)> {
    let (phi, ax) = split(em)?;
    let sa = em.grid.space_axis().ok_or_else(|| Error::Domain("potential grid has no spatial axis".into()))?;
    let phi_t = match em.grid.time_axis() {
        Some(ta) => phi.partial(ta)?,
        None => phi.map(|_| 0.0),
    };
    Ok((phi_t, ax.partial(sa)?))
}

#[derive(Debug, Clone, PartialEq)]
struct EmDerived {
    e1: ScalarField,
    phi_t: ScalarField,
    ax_x: ScalarField,
}

/// External fields seen by the amplitude: scalar potential `V`, the
/// electromagnetic four-potential and the electric/magnetic moments, which
/// enter through `W = V + pi.E + mu.B`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialConfig {
    scalar: Option<ScalarField>,
    em: Option<EMPotential>,
    derived: Option<EmDerived>,
    pub electric_moment: f64,
    pub magnetic_moment: f64,
}

/// Coefficients of the amplitude equation at one instant on a set of nodes.
#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    pub phi: Vec<f64>,
    pub ax: Vec<f64>,
    pub phi_t: Vec<f64>,
    pub ax_x: Vec<f64>,
    /// `W = V + pi^1 E^1`.
    pub w: Vec<f64>,
}

impl PotentialConfig {
    pub fn free() -> Self {
        Self::default()
    }

    pub fn with_scalar(mut self, v: ScalarField) -> Result<Self> {
        if v.values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("scalar potential must be finite".into()));
        }
        self.scalar = Some(v);
        Ok(self)
    }

    pub fn with_em(mut self, em: EMPotential) -> Result<Self> {
        let (phi_t, ax_x) = rates(&em)?;
        self.derived = Some(EmDerived { e1: electric_x(&em)?, phi_t, ax_x });
        self.em = Some(em);
        Ok(self)
    }

    pub fn with_moments(mut self, electric: f64, magnetic: f64) -> Result<Self> {
        if !electric.is_finite() || !magnetic.is_finite() {
            return Err(Error::Config("moments must be finite".into()));
        }
        self.electric_moment = electric;
        self.magnetic_moment = magnetic;
        Ok(self)
    }

    pub fn scalar(&self) -> Option<&ScalarField> {
        self.scalar.as_ref()
    }

    pub fn em(&self) -> Option<&EMPotential> {
        self.em.as_ref()
    }

    pub fn has_em(&self) -> bool {
        self.em.as_ref().is_some_and(|e| !e.is_zero())
    }

    pub fn is_static(&self) -> bool {
        self.scalar.as_ref().is_none_or(|v| v.grid.time_axis().is_none()) && self.em.as_ref().is_none_or(|e| e.is_static())
    }

    fn sample(f: &ScalarField, t: f64, x: f64) -> Result<f64> {
        f.interpolate(&[t, x, 0.0, 0.0])
    }

    pub fn scalar_at(&self, t: f64, x: f64) -> Result<f64> {
        self.scalar.as_ref().map_or(Ok(0.0), |v| Self::sample(v, t, x))
    }

    /// `(phi, A^1)` at `(t, x)`.
    pub fn em_at(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        self.em.as_ref().map_or(Ok((0.0, 0.0)), |e| e.at(t, x))
    }

    pub fn electric_at(&self, t: f64, x: f64) -> Result<f64> {
        self.derived.as_ref().map_or(Ok(0.0), |d| Self::sample(&d.e1, t, x))
    }

    /// `W = V + pi^1 E^1` (`B = 0` in 1+1, so `mu` drops out).
    pub fn effective_at(&self, t: f64, x: f64) -> Result<f64> {
        let mut w = self.scalar_at(t, x)?;
        if self.electric_moment != 0.0 {
            w += self.electric_moment * self.electric_at(t, x)?;
        }
        Ok(w)
    }

    pub fn snapshot(&self, t: f64, xs: &[f64]) -> Result<Snapshot> {
        let mut s = Snapshot::default();
        for &x in xs {
            let (phi, ax) = self.em_at(t, x)?;
            s.phi.push(phi);
            s.ax.push(ax);
            let (pt, axx) = match &self.derived {
                Some(d) => (Self::sample(&d.phi_t, t, x)?, Self::sample(&d.ax_x, t, x)?),
                None => (0.0, 0.0),
            };
            s.phi_t.push(pt);
            s.ax_x.push(axx);
            s.w.push(self.effective_at(t, x)?);
        }
        Ok(s)
    }
}
