//! Shift spaces, words, cylinders and locally constant potentials.

mod potential;
mod subset;
mod system;
mod word;

pub use potential::{birkhoff_sup, Potential};
pub(crate) use potential::encode;
pub(crate) use subset::SubsetOracle;
pub use subset::{sub_sft_is_irreducible, SubsetSpec};
pub(crate) use system::strongly_connected;
pub use system::{make_full_shift, ShiftSystem, Sidedness};
pub use word::{admissible_words, for_each_word, CylinderSet, Word};
