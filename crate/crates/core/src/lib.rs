pub mod doc;
pub mod families;
pub mod field;
pub mod intersection;
pub mod matrix;
pub mod parray;
pub mod poly;
pub mod recurrence;
pub mod report;
pub mod suite;
pub mod system;
