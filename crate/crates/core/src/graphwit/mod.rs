//! Stabilizer algebra on graph states and Bell inequalities built from GHZ
//! paradoxes among stabilizer elements.

mod catalog;
mod graph;
mod paradox;
mod pauli;
mod synth;

pub use catalog::{catalog, printed_form, selection, CatalogEntry, FULL_NAMES, PARADOX_NAMES};
pub use graph::Graph;
pub use paradox::{
    biseparable_saturation, build_paradox_expression, map_to_correlator, three_setting_expression,
    verify_paradox, BiseparableReport, ParadoxReport, ParadoxSelection, SettingDictionary,
};
pub use pauli::{generator, stabilizer_element, vertex_mask, Pauli, PauliString};
pub use synth::{synthesize, SynthOptions, SynthesizedInequality, MAX_SYNTH_VERTICES};
