//! Exact computation of multivariable Alexander polynomials via Fox calculus,
//! the graded Euler characteristics they determine, and the surgery-triangle
//! slope calculus built on negative continued fractions.

pub mod alexander;
pub mod eulerchi;
pub mod fpgroup;
pub mod laurent;
pub mod linkdiag;
pub mod triangle;

pub use alexander::{
    delta_of_diagram, delta_of_presentation, knot_delta_of_diagram, symmetrize_knot_delta,
    AlexanderMatrix,
};
pub use eulerchi::{
    chi_khi_minus, chi_knot, chi_link, chi_sharp_decompose, chi_slope, stabilization_shift,
    support_bound_check, ChiMode, GradedChi,
};
pub use fpgroup::{abelianize, fox_derivative, Presentation, Word};
pub use laurent::{LaurentPoly, TruncatedSeries};
pub use linkdiag::{parse_braid, parse_pd, wirtinger, LinkDiagram};
pub use triangle::{
    bypass_decompose, cobordism_degree, ncf, ncf_eval, surgery_parity, triangle_solve,
    unknot_chi, Slope, TriangleChi,
};
