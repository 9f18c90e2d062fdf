//! Exact tensor algebra on 2x2 matrices: isotropic tensors, ellipticity
//! constants, the cofactor shift `K`, the degenerate laminate in closed form,
//! and plane-wave dispersion.

pub mod dispersion;
pub mod ellipticity;
pub mod gutierrez;
pub mod tensor;

pub use dispersion::{acoustic_tensor, dispersion, sym_eigen2, Dispersion, Mode};
pub use ellipticity::{se_constant, se_constant_argmin, vse_constant, vse_constant_normalized, RankOneMin};
pub use gutierrez::{
    check_hypothesis, gutierrez_tensor, project_onto_constraint, reference_phases, GutierrezModuli,
    HypothesisReport,
};
pub use tensor::{cof, iso_tensor, k_spectrum, k_transform, IsotropicPhase, KSpectrum, Tensor4};
