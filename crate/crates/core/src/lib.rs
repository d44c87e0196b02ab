pub mod imgproc;
pub mod metrics;
pub mod descriptors;
pub mod features;
pub mod preprocess;
pub mod synth;
pub mod engine;
