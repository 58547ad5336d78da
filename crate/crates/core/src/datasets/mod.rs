//! Measurement records, the published-experiment registry and a
//! simulator for synthetic records.

pub mod record;
pub mod registry;
pub mod simulate;

pub use record::{read_record, write_record, MeasurementRecord, RecordKind, Sample};
pub use registry::{lookup, registry, EntrySystem, ExperimentEntry, MethodTag, PublishedBound};
pub use simulate::{simulate_record, uniform_grid, Protocol, Shots, DEFAULT_POINTS, DEFAULT_THETA0};
