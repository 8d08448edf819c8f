pub mod bricks;
pub mod error;
pub mod exact;
pub mod ffmat;
pub mod filt;
pub mod presets;
pub mod repcat;
pub mod selftest;
pub mod universe;
pub mod verify;
pub mod wide;

pub use bricks::BrickSet;
pub use filt::{FiltStep, FiltrationCertificate};
pub use error::{Error, Result};
pub use exact::{Conflation, ExactCtx, ExactStructure, Subuniverse};
pub use ffmat::{FpMatrix, Prime, SolutionSet};
pub use presets::preset_quiver;
pub use repcat::{Arrow, HomSpace, Mor, Quiver, Rep};
pub use selftest::{run_selftest, SelftestReport};
pub use universe::{enumerate_universe, IsoClassId, Limits, TruncationEvent, Universe};
pub use verify::{BijectionReport, CorollaryReport, ExampleReport, Verdict};
pub use wide::{SubcatCandidate, WideReport};
