//! Fourier restriction on finite abelian groups.
//!
//! The crate builds Littlewood-Paley ball systems on `[Z/NZ]^n` and `F_q^n`,
//! measures supported on graphs such as the paraboloid, and every constant
//! and exponent of the abstract `L^2` restriction theorem. The [`verifier`]
//! module then checks the explicit inequalities of its proof on concrete
//! groups, exhaustively or by seeded sampling.

pub mod arith;
pub mod balls;
pub mod char_sums;
pub mod error;
pub mod exponents;
pub mod group;
pub mod measures;
pub mod report;
pub mod verifier;

pub use balls::{BallFamily, LpSystem, Scale, ScaleSet, SystemKind};
pub use char_sums::{quad_sum_bruteforce, quad_sum_closed, QuadSumInput};
pub use error::{Error, Result};
pub use exponents::{Exponent, ExponentProfile, SystemConstants};
pub use group::{Domain, FiniteField, GFunction, Group, GroupPoint, GroupSpec, DEFAULT_SIZE_CAP};
pub use measures::{DualMeasure, MeasureProfile, Polynomial};
pub use report::{Measurement, Record, VerificationReport, SCHEMA_VERSION};
pub use verifier::{verify_suite, OperatorNorm, ScanMode, ScanStrategy, SuiteOptions};
