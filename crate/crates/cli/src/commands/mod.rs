pub mod bound;
pub mod exact;
pub mod fit;
pub mod report;
pub mod simulate;
