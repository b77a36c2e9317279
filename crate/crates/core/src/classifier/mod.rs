//! Fredholm classification of operators on real interpolation spaces from
//! the kernel data of their action on the sum `X0 + X1`.

mod classify;
mod factor;
pub mod linalg;
mod model;
mod rows;

pub use classify::{
    classify, classify_sweep, classify_with, omega_set, sampled_kernel_indices, split_kernel,
    Classification, ClassifyOptions, ComplementOrder, ConditionCheck, ElementMembership, KernelSplit,
    NamedIndexSet, OmegaSet, Verdict, OMEGA_DENSITY,
};
pub use factor::{factorize, FactorClass, FactorDescriptor, FactorizationData};
pub use model::{reduce_to_surjective, KernelBasis, OperatorModel, Reduction};
pub use rows::{Row, RowModel};
