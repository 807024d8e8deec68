//! Classical baseline segmenter and synthetic-data tools.
//!
//! * [`segment_region_growing`]: lumen-seeded region growing bounded by a
//!   dilated nuclei barrier;
//! * [`postprocess`]: small-object removal and hole filling;
//! * [`synth_glands`]: ring-shaped synthetic glands with exact truth maps;
//! * [`perturb`]: controlled edits of label maps for metamorphic tests.

pub mod morphology;
mod perturb;
mod postprocess;
mod segment;
mod synth;

pub use perturb::{perturb, PerturbOutcome, Perturbation};
pub use postprocess::{fill_holes, postprocess, remove_small_objects};
pub use segment::{otsu_threshold, segment_region_growing, SegmenterConfig, Threshold};
pub use synth::{synth_glands, SynthImage, SynthSpec};
