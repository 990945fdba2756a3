//! Input documents and the JSON/CSV writers used for every output file.

use std::fs;
use std::path::Path;

use greedy_widths_core::linalg::{self, Matrix, Vector};
use greedy_widths_core::verify::dalpha_points;
use greedy_widths_core::{CompactSet, LpExponent, NormedSpace};
use serde::{Deserialize, Serialize};

use crate::config::SCHEMA_VERSION;
use crate::error::{CliError, Result};

/// The git-describe identifier of this build.
pub const BUILD_ID: &str = env!("GREEDY_WIDTHS_BUILD_ID");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "norm", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    /// ℓ_p^dim; `p` is a number ≥ 1 or "inf".
    Lp { dim: usize, p: LpExponent },
    /// √(xᵀGx) for a symmetric positive-definite Gram matrix given by rows.
    Weighted { gram: Vec<Vec<f64>> },
}

impl SpaceSpec {
    pub fn build(&self) -> Result<NormedSpace> {
        Ok(match self {
            SpaceSpec::Lp { dim, p } => NormedSpace::with_exponent(*dim, *p)?,
            SpaceSpec::Weighted { gram } => NormedSpace::weighted(linalg::from_rows(gram)?)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Points {
        points: Vec<Vec<f64>>,
    },
    /// T(B_E) discretized by `sphere_samples` points of the domain sphere.
    OperatorBall {
        matrix: Vec<Vec<f64>>,
        domain: SpaceSpec,
        sphere_samples: usize,
        #[serde(default)]
        seed: u64,
    },
    /// {(k+1)^{−α} e_k : k < m}.
    ScaledBasis {
        alpha: f64,
        m: usize,
    },
}

/// A compact set together with the space it is measured in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFile {
    pub schema_version: String,
    pub space: SpaceSpec,
    pub set: SetSpec,
}

impl SetFile {
    pub fn build(&self) -> Result<(CompactSet, NormedSpace)> {
        let space = self.space.build()?;
        let set = match &self.set {
            SetSpec::Points { points } => CompactSet::point_cloud(
                points
                    .iter()
                    .map(|p| Vector::from_column_slice(p))
                    .collect(),
            )?,
            SetSpec::OperatorBall {
                matrix,
                domain,
                sphere_samples,
                seed,
            } => CompactSet::operator_ball(
                linalg::from_rows(matrix)?,
                domain.build()?,
                *sphere_samples,
                *seed,
            )?,
            SetSpec::ScaledBasis { alpha, m } => {
                if alpha.is_nan() || *alpha <= 0.0 || *m == 0 {
                    return Err(CliError::config("scaled_basis needs alpha > 0 and m > 0"));
                }
                CompactSet::point_cloud(dalpha_points(*alpha, *m))?
            }
        };
        if set.target_dim() != space.dim() {
            return Err(CliError::config(format!(
                "the set lives in dimension {} but the space has dimension {}",
                set.target_dim(),
                space.dim()
            )));
        }
        Ok((set, space))
    }
}

/// A matrix operator between two spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub schema_version: String,
    /// Rows of the matrix; columns index the domain.
    pub matrix: Vec<Vec<f64>>,
    pub domain: SpaceSpec,
    pub target: SpaceSpec,
}

impl OperatorFile {
    pub fn build(&self) -> Result<(Matrix, NormedSpace, NormedSpace)> {
        let t = linalg::from_rows(&self.matrix)?;
        let domain = self.domain.build()?;
        let target = self.target.build()?;
        if t.ncols() != domain.dim() || t.nrows() != target.dim() {
            return Err(CliError::config(format!(
                "a {}×{} matrix does not map dimension {} to dimension {}",
                t.nrows(),
                t.ncols(),
                domain.dim(),
                target.dim()
            )));
        }
        Ok((t, domain, target))
    }
}

/// A subspace given by basis vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceFile {
    pub schema_version: String,
    pub space: SpaceSpec,
    pub basis: Vec<Vec<f64>>,
}

fn check_schema(found: &str, path: &Path) -> Result<()> {
    if found == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "{}: schema_version {found:?} is not supported (expected {SCHEMA_VERSION:?})",
            path.display()
        )))
    }
}

/// Reads a versioned input document.
pub fn read_document<T: serde::de::DeserializeOwned>(
    path: &Path,
    version: impl Fn(&T) -> &str,
) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: T = serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    check_schema(version(&doc), path)?;
    Ok(doc)
}

/// Envelope of every JSON output file.
#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema_version: &'a str,
    build: &'a str,
    kind: &'a str,
    data: &'a T,
}

pub fn json_document<T: Serialize>(kind: &str, data: &T) -> String {
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        build: BUILD_ID,
        kind,
        data,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("output documents serialize");
    s.push('\n');
    s
}

/// First line of every CSV output file.
pub fn csv_preamble() -> String {
    format!("# schema_version={SCHEMA_VERSION} build={BUILD_ID}\n")
}

/// A CSV table with a fixed header.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row).expect("writing to memory");
        }
        let body =
            String::from_utf8(w.into_inner().expect("writing to memory")).expect("CSV is UTF-8");
        csv_preamble() + &body
    }

    pub fn read(path: &Path) -> Result<Table> {
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|source| CliError::Csv {
                path: path.to_path_buf(),
                source,
            })?;
        let csv_err = |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let header = r
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(String::from)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec.map_err(csv_err)?.iter().map(String::from).collect());
        }
        Ok(Table { header, rows })
    }
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}
