//! Granulometric feature extraction and neural-network triage of texture images.

pub mod features;
pub mod feedforward;
pub mod granulometry;
pub mod image;
pub mod kohonen;
pub mod morphology;
pub mod seed;
pub mod segmentation;
pub mod harness;
pub mod cli;
