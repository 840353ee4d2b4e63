//! Finite group arithmetic: permutations and prime-field matrices,
//! breadth-first enumeration, quotient families and intersection quotients.

mod element;
mod family;
mod finite;

pub(crate) use element::{inv_mod, is_prime};
pub use element::{ElementKind, GroupElement, Permutation, PrimeMatrix};
pub use family::{coordinate_indices, kernel_fiber, GeneratorSymbolSet, Level, QuotientFamily, SymmetryReport};
pub use finite::{generate_closure, FiniteGroup, DEFAULT_CAP};

#[derive(Debug, thiserror::Error)]
pub enum GroupError {
    #[error("permutation images are not a bijection")]
    NotABijection,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matrix payload is not square")]
    NotSquare,
    #[error("matrix payload is singular mod p")]
    Singular,
    #[error("generating set is empty")]
    EmptyGenerators,
    #[error("closure grew beyond the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("generators have incompatible kinds")]
    MixedKinds,
    #[error("symbol {symbol} is out of range")]
    InvalidSymbol { symbol: usize },
    #[error("level {level} is out of range")]
    InvalidLevel { level: usize },
    #[error("product image needs two distinct levels, got {level} twice")]
    SameLevel { level: usize },
    #[error("symbol pairing is not an involution at symbol {symbol}")]
    NotAnInvolution { symbol: usize },
    #[error("level {level} has {found} generator images, expected {expected}")]
    InconsistentArity {
        level: usize,
        expected: usize,
        found: usize,
    },
    #[error("level {level}: image of the inverse of symbol {symbol} is not the inverse image")]
    NotSymmetric { level: usize, symbol: usize },
    #[error("group elements are not pairs")]
    NotAProduct,
    #[error("pair coordinate {coordinate} does not exist")]
    InvalidCoordinate { coordinate: usize },
}
