//! Exact q-brackets of partition functions, quasi-Jacobi kernels in jet and Fourier
//! form, and certification of quasimodularity by exact linear algebra.

pub mod bracket;
pub mod constants;
pub mod cyclotomic;
pub mod eisenstein;
pub mod families;
pub mod jet;
pub mod kernels;
pub mod field;
pub mod fourier;
pub mod grammar;
pub mod linalg;
pub mod npoint;
pub mod partition;
pub mod qj;
pub mod quasimodular;
pub mod qseries;
pub mod structure;
pub mod suites;
pub mod taylor;
pub mod wseries;

pub use bracket::{odot, qbracket, qbrackets, ubracket, USeries};
pub use cyclotomic::{cyc_root, CycQ};
pub use families::{Family, FamilyError, PartitionFunction};
pub use field::{rat, rat_int, Rat};
pub use partition::{enumerate_partitions, Partition};
pub use qseries::{QSeries, SeriesError};
