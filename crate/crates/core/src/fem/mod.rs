//! Bilinear finite elements on uniform square grids, sparse storage and a
//! projected conjugate-gradient solver.

pub mod cg;
pub mod mesh;
pub mod sparse;

pub use cg::{solve, CgOptions, CgReport};
pub use mesh::{assemble, assemble_vector, element_load, element_macro_load, element_mass, element_stiffness, DofMap, Grid};
pub use sparse::{axpy, dot, norm, CsrMatrix};
