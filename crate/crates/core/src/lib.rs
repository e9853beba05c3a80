//! The P1-nonconforming quadrilateral and hexahedral element on uniform
//! periodic meshes.
//!
//! * [`mesh`]: structured grids, periodic identification, coloring, strips.
//! * [`fem_core`]: the local element, quadrature and face functionals.
//! * [`space`]: node-based and alternating function sets, kernels, dimensions.
//! * [`linalg`]: CSR storage, CG, restarted GMRES, dense Drazin inverse.
//! * [`schemes`]: assembly and the four solution options.
//! * [`analysis`]: manufactured problems, norms and studies.

pub mod analysis;
pub mod error;
pub mod fem_core;
pub mod linalg;
pub mod mesh;
pub mod schemes;
pub mod space;

pub use error::{Error, Result};
pub use fem_core::{LocalLinear, QuadratureRule};
pub use linalg::{CsrMatrix, SolveReport, SolverConfig};
pub use mesh::{build_mesh, BoundaryCondition, GridSpec, Mesh};
pub use schemes::{DiscreteSolution, SchemeConfig, SchemeOption};
pub use space::{build_catalog, BasisCatalog, CatalogKind};
