//! Scalar thermodynamics: the singular potential and its truncation, the
//! density coordinates, the entropy pressure, confinement and the `χ`
//! test functions.

mod confinement;
mod pack;
mod params;
mod profile;

pub use confinement::{holder_embedding_constant, ConfinementSpec};
pub use pack::{c_star, GrowthReport, Pair, PotentialPack};
pub use params::{Params, ParamsSpec};
pub use profile::{concave, SingularProfile, Taylor2};
