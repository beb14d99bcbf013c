use crate::error::Result;
use crate::level::Level;
use crate::model::State;
use crate::potentials::PotentialPack;
use crate::spectral::{Field, Torus, VectorField};

use super::rhs::{eval_continuity_rhs, eval_momentum_rhs};
use super::stepper::Forcing;

/// A prescribed trajectory and its time derivative at one instant.
#[derive(Debug, Clone)]
pub struct ExactSnapshot {
    pub rho: Field,
    pub m: VectorField,
    pub drho_dt: Field,
    pub dm_dt: VectorField,
}

/// Forcing `f = ∂tX − T(X)` that makes a prescribed `X = (ρ, m)` an exact
/// solution of the semi-discrete system.
pub struct ManufacturedForcing<'a, E> {
    torus: &'a Torus,
    pack: &'a PotentialPack,
    level: Level,
    exact: E,
}

impl<'a, E> ManufacturedForcing<'a, E>
where
    E: Fn(f64) -> ExactSnapshot + Sync,
{
    pub fn new(torus: &'a Torus, pack: &'a PotentialPack, level: Level, exact: E) -> Self {
        Self {
            torus,
            pack,
            level,
            exact,
        }
    }

    /// The prescribed state at time `t`.
    pub fn state_at(&self, t: f64) -> Result<State> {
        let snap = (self.exact)(t);
        snapshot_state(&snap, t)
    }
}

fn snapshot_state(snap: &ExactSnapshot, t: f64) -> Result<State> {
    let u = VectorField::from_components(
        snap.m
            .components()
            .iter()
            .map(|c| c.zip_map(&snap.rho, |m, r| m / r))
            .collect::<Result<Vec<_>>>()?,
    )?;
    State::new(u, snap.rho.clone(), t)
}

impl<E> Forcing for ManufacturedForcing<'_, E>
where
    E: Fn(f64) -> ExactSnapshot + Sync,
{
    fn evaluate(&self, t: f64) -> Result<(Field, VectorField)> {
        let snap = (self.exact)(t);
        let state = snapshot_state(&snap, t)?;
        let f_rho = &snap.drho_dt - &eval_continuity_rhs(self.torus, self.pack, &state, self.level)?;
        let terms = eval_momentum_rhs(self.torus, self.pack, &state, self.level)?;
        let f_m = &snap.dm_dt - &terms.momentum_total();
        Ok((f_rho, f_m))
    }
}
