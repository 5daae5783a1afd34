pub mod contact;
pub mod error;
pub mod manifold;
pub mod oracle;
pub mod report;
pub mod sampling;
pub mod sphere_bundle;
pub mod suites;
pub mod tangent_bundle;
pub mod tensor;
