use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::matrix_market::{read_matrix_market, write_matrix_market, MmError};
use crate::canonical::CondensedFormEQ;
use crate::kronecker::KroneckerStructure;
use crate::linalg::{Field, Matrix, Tolerance, C64};
use crate::pencil::{check_structure, PencilError, StructureReport, StructuredPencil};
use crate::stability::{analyze_dh_pencil, StabilityReport};
use crate::stabilization::{Section5Form, StabilizingPerturbation};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    MatrixMarket(#[from] MmError),
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("invalid descriptor: {0}")]
    Invalid(String),
    #[error(transparent)]
    Pencil(#[from] PencilError),
}

/// A matrix given inline or as a Matrix Market path relative to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    File(String),
    Real(Vec<Vec<f64>>),
    /// Rows of `[re, im]` pairs.
    Complex(Vec<Vec<[f64; 2]>>),
}

impl MatrixSource {
    fn load(&self, base: &Path, name: &str) -> Result<Matrix, IoError> {
        let rect = |lens: Vec<usize>| -> Result<usize, IoError> {
            let cols = lens.first().copied().unwrap_or(0);
            if lens.iter().any(|&l| l != cols) {
                return Err(IoError::Invalid(format!("`{name}` has rows of different lengths")));
            }
            Ok(cols)
        };
        match self {
            MatrixSource::File(p) => Ok(read_matrix_market(base.join(p))?),
            MatrixSource::Real(rows) => {
                let cols = rect(rows.iter().map(Vec::len).collect())?;
                let data: Vec<f64> = rows.iter().flatten().copied().collect();
                Ok(Matrix::from_real(rows.len(), cols, &data))
            }
            MatrixSource::Complex(rows) => {
                let cols = rect(rows.iter().map(Vec::len).collect())?;
                let data: Vec<C64> = rows.iter().flatten().map(|&[a, b]| C64::new(a, b)).collect();
                Ok(Matrix::from_complex(rows.len(), cols, data))
            }
        }
    }
}

/// JSON manifest binding `E`, `Q` and `L` of a pencil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilDescriptor {
    pub field: Field,
    #[serde(rename = "E")]
    pub e: MatrixSource,
    #[serde(rename = "Q")]
    pub q: MatrixSource,
    #[serde(rename = "L")]
    pub l: MatrixSource,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl PencilDescriptor {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, IoError> {
        serde_json::from_str(text).map_err(|source| IoError::Json { path: origin.to_string(), source })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    /// Loads the matrices, resolving file paths against `base`.
    pub fn resolve(&self, base: &Path) -> Result<StructuredPencil, IoError> {
        let load = |src: &MatrixSource, name: &str| -> Result<Matrix, IoError> {
            let m = src.load(base, name)?;
            if self.field == Field::Real && m.data().iter().any(|z| z.im != 0.0) {
                return Err(IoError::Invalid(format!("`{name}` has complex entries under the real field")));
            }
            Ok(m.with_field(self.field))
        };
        let e = load(&self.e, "E")?;
        let q = load(&self.q, "Q")?;
        let l = load(&self.l, "L")?;
        Ok(StructuredPencil::new(e, q, l)?)
    }

    /// Reads a manifest and its matrices.
    pub fn load(path: impl AsRef<Path>) -> Result<(Self, StructuredPencil), IoError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| IoError::File { path: path.display().to_string(), source })?;
        let d = Self::from_json(&text, &path.display().to_string())?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        let p = d.resolve(&base)?;
        Ok((d, p))
    }

    /// Writes `E`, `Q`, `L` as Matrix Market files next to a manifest `<stem>.json` in `dir`.
    pub fn save(
        p: &StructuredPencil,
        dir: impl AsRef<Path>,
        stem: &str,
        metadata: BTreeMap<String, String>,
    ) -> Result<(Self, PathBuf), IoError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|source| IoError::File { path: dir.display().to_string(), source })?;
        let file = |m: &Matrix, name: &str| -> Result<MatrixSource, IoError> {
            let f = format!("{stem}_{name}.mtx");
            write_matrix_market(m, dir.join(&f))?;
            Ok(MatrixSource::File(f))
        };
        let d = PencilDescriptor { field: p.field(), e: file(p.e(), "E")?, q: file(p.q(), "Q")?, l: file(p.l(), "L")?, metadata };
        let manifest = dir.join(format!("{stem}.json"));
        std::fs::write(&manifest, d.to_json())
            .map_err(|source| IoError::File { path: manifest.display().to_string(), source })?;
        Ok((d, manifest))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensedForms {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq: Option<CondensedFormEQ>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section5: Option<Section5Form>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationDocument {
    pub perturbation: StabilizingPerturbation,
    /// Analysis of `λE − (J + Δ_J − R − Δ_R)Q`.
    pub perturbed: StabilityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub version: String,
    pub tolerance: Tolerance,
    pub structure: StructureReport,
    pub kronecker: KroneckerStructure,
    pub stability: StabilityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condensed: Option<CondensedForms>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationDocument>,
}

impl AnalysisDocument {
    pub fn new(p: &StructuredPencil, tol: &Tolerance) -> Self {
        let stability = analyze_dh_pencil(p, tol);
        AnalysisDocument {
            version: env!("CARGO_PKG_VERSION").to_string(),
            tolerance: *tol,
            structure: check_structure(p, tol),
            kronecker: stability.eigen_data.clone(),
            stability,
            condensed: None,
            perturbation: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        serde_json::from_str(text).map_err(|source| IoError::Json { path: "<document>".into(), source })
    }
}
