//! Closed-form core of the two-factor CIR- model and its deterministic shift.

mod bonds;
mod factor;
mod params;

pub use bonds::{bond_ab, forward_rate_model, zcb_cirminus, zcb_shifted, AffineBonds, ShiftedModel};
pub use factor::{Factor, FactorParams, FactorPhi};
pub use params::{
    admissibility_violation, is_admissible, ksigma_from_phi, phi_from_ksigma, ModelParams, ADMISSIBLE_TOL,
    CONSTRAINT_MATRIX, LOWER_BOUNDS, PARAM_NAMES,
};

#[cfg(test)]
mod tests;
