pub mod algebra;
pub mod connection;
pub mod constructions;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod metric;
pub mod poly;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::{Inertia, Matrix};
pub use scalar::{Mode, Rational, Scalar};
pub use algebra::{LieAlgebra, StructureReport, Subspace};
pub use metric::{Signature, SymBilinearForm, SymmetricIso};
pub use connection::{biinvariant_connection, levi_civita, CurvatureTensor, FlatnessReport, ProductTensor};
pub use constructions::{catalog, catalog_names, CatalogEntry, CatalogParams};
pub use dynamics::{IntegratorOptions, Status, Trajectory};

pub type ExactAlgebra = LieAlgebra<Rational>;
pub type FloatAlgebra = LieAlgebra<f64>;
pub type ExactForm = SymBilinearForm<Rational>;
pub type FloatForm = SymBilinearForm<f64>;
pub type ExactProduct = ProductTensor<Rational>;
pub type FloatProduct = ProductTensor<f64>;
pub type ExactMatrix = Matrix<Rational>;
pub type FloatMatrix = Matrix<f64>;
