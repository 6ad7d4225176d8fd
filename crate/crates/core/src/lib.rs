//! Cubic characters, Gauss sums and L-functions over F_q[T], computed exactly.
//!
//! Every value a character or Gauss sum takes lives in a cyclotomic field and
//! is held as a [`CycNum`]; central values carry an extra `q^{-1/2}` grading
//! ([`HalfPowNum`]). Floats appear only in Euler-product constants and in the
//! asymptotic comparisons, always with an error radius ([`ComplexApprox`]).

pub mod characters;
pub mod cyclotomic;
mod error;
pub mod ffpoly;
pub mod gauss;
pub mod lfunctions;
pub mod metaplectic;
pub mod moments;

pub use cyclotomic::{ComplexApprox, CycNum, HalfPowNum, Int, ThirdPowNum};
pub use error::{Error, Result};
pub use ffpoly::{CubeDecomposition, FieldSpec, Poly, QuadraticExtension};
pub use characters::{CharacterDescriptor, CubicCharacter, OmegaIso, Parity, Restriction, Setting};
pub use gauss::{RootNumber, StructuralGauss};
pub use lfunctions::{CentralValue, Eis, LPolynomial};
pub use metaplectic::{GaussSeries, GaussSumEngine, ResidueValue};
pub use moments::{EulerProductSpec, MomentOptions, MomentReport};
