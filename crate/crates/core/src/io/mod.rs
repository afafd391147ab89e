//! Matrix Market files, pencil manifests and analysis documents.

mod document;
mod matrix_market;

pub use document::{AnalysisDocument, CondensedForms, IoError, MatrixSource, PencilDescriptor, PerturbationDocument};
pub use matrix_market::{
    format_f64, format_matrix_market, parse_matrix_market, read_matrix_market, write_matrix_market,
    write_matrix_market_as, Layout, MmError, Symmetry,
};
