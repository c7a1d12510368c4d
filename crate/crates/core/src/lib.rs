//! Fuzzy ARTMAP classification with a technology-assisted review (TAR)
//! simulation harness.
//!
//! The ART dynamics ([`art`], [`artmap`], [`explain`]) are generic over the
//! floating-point type; the text pipeline, the review harness, and the
//! statistics work in `f64`. Concrete aliases for both precisions live at the
//! crate root.

pub mod art;
pub mod artmap;
pub mod error;
pub mod explain;
pub mod scalar;
pub mod stats;
pub mod tar;
pub mod vectorize;

pub use art::{
    category_subsethood, choice, complement_code, fuzzy_and, learn, match_degree, norm1, search,
    ArtParams, Category, ComplementCoded, FeatureVector, Label,
};
pub use artmap::{subsethood, ArtmapModel, CodingReport, Prediction};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Model = ArtmapModel<f64>;
pub type ModelF32 = ArtmapModel<f32>;
pub type Params = ArtParams<f64>;
pub type ParamsF32 = ArtParams<f32>;
pub type CategoryF64 = Category<f64>;
pub type CategoryF32 = Category<f32>;
pub type Features = FeatureVector<f64>;
pub type FeaturesF32 = FeatureVector<f32>;
pub type Rectangle = explain::HyperRectangle<f64>;
pub type RectangleF32 = explain::HyperRectangle<f32>;
