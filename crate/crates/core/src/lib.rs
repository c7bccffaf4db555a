pub mod coeff;
pub mod dsl;
pub mod nc;
pub mod properties;
pub mod report;
pub mod supermatrix;
pub mod mside;
pub mod series;
pub mod suites;
pub mod tside;
