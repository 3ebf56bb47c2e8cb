//! Towers of algebra presentations built by successive adjunctions.

pub mod qmodule;
pub mod regularity;
pub mod serial;
pub mod state;
pub mod symbol;
pub mod witness;

pub use qmodule::{Generator, Provenance, QuadraticModuleDesc};
pub use regularity::{check_regularity, check_regularity_sampling, Method, RegularityCase, RegularityData, RegularityResult, Verdict};
pub use state::{init_tower, BaseSpec, CharVariant, SamplingConfig, TowerState};
pub use symbol::{BaseCoord, FunctionSymbol, Mode, Symbol};
pub use witness::{ArchimedeanWitness, VarStatus};
