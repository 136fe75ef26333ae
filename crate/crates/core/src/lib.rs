pub mod cli;
pub mod error;
pub mod zlinalg;
pub mod groups;
pub mod lattices;
pub mod cohomology;
pub mod gallery;
pub mod resolutions;
pub mod lattice_file;
pub mod report;
