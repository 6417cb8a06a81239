//! JSON and CSV formats shared by the subcommands.

use std::fmt::Write as _;

use lumpkit_core::dynamics::{RegionCell, Trajectory};
use lumpkit_core::linalg::{EigenSource, EigenSystem, Matrix, C64};
use lumpkit_core::lumping::LumpedModel;
use lumpkit_core::model::{default_labels, KineticReport, ReactionNetwork};
use lumpkit_core::realizer::RealizabilityCertificate;
use lumpkit_core::CompartmentalModel;
use serde::{Deserialize, Serialize};

/// A matrix entry: a plain number or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn to_c64(self) -> C64 {
        match self {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

fn tidy(x: f64) -> f64 {
    x + 0.0
}

pub fn real_rows(m: &Matrix<f64>) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&x| tidy(x)).collect()).collect()
}

/// Rows of plain numbers when every imaginary part is zero, `[re, im]` pairs
/// otherwise.
pub fn complex_rows(m: &Matrix<C64>) -> Vec<Vec<Entry>> {
    let real = m.as_slice().iter().all(|z| z.im == 0.0);
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|z| if real { Entry::Real(tidy(z.re)) } else { Entry::Complex([tidy(z.re), tidy(z.im)]) })
                .collect()
        })
        .collect()
}

pub fn complex_vec(v: &[C64]) -> Vec<Entry> {
    let real = v.iter().all(|z| z.im == 0.0);
    v.iter()
        .map(|z| if real { Entry::Real(tidy(z.re)) } else { Entry::Complex([tidy(z.re), tidy(z.im)]) })
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<Entry>]) -> Result<Matrix<C64>, String> {
    if rows.is_empty() {
        return Err("matrix has no rows".into());
    }
    let data: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|e| e.to_c64()).collect()).collect();
    Matrix::from_rows(&data).map_err(|e| e.to_string())
}

/// Reads a matrix file: a JSON array of rows.
pub fn parse_matrix(text: &str) -> Result<Matrix<C64>, String> {
    let rows: Vec<Vec<Entry>> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    matrix_from_rows(&rows)
}

/// Model file `{"species", "A", "b", "y"}`; only `A` is required.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub species: Option<Vec<String>>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<u32>>,
}

impl ModelJson {
    pub fn from_model(m: &CompartmentalModel) -> Self {
        Self {
            species: Some(m.species().to_vec()),
            a: real_rows(m.a()),
            b: Some(m.b().iter().map(|&x| tidy(x)).collect()),
            y: Some(m.y().to_vec()),
        }
    }

    pub fn to_model(&self) -> Result<CompartmentalModel, ModelError> {
        let n = self.a.len();
        let a = Matrix::from_rows(&self.a).map_err(|e| ModelError::Parse(e.to_string()))?;
        let species = self.species.clone().unwrap_or_else(|| default_labels("X", n));
        let b = self.b.clone().unwrap_or_else(|| vec![0.0; n]);
        let y = self.y.clone().unwrap_or_else(|| vec![1; n]);
        CompartmentalModel::new(species, a, b, y).map_err(ModelError::Domain)
    }
}

/// A malformed file, or a well-formed one the core rejects.
#[derive(Debug)]
pub enum ModelError {
    Parse(String),
    Domain(lumpkit_core::Error),
}

#[derive(Clone, Debug, Serialize)]
pub struct PairJson {
    pub lambda: [f64; 2],
    pub vector: Vec<[f64; 2]>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenJson {
    pub source: &'static str,
    pub pairs: Vec<PairJson>,
}

impl EigenJson {
    pub fn from_system(sys: &EigenSystem) -> Self {
        let source = match sys.source {
            EigenSource::ClosedForm => "closed-form",
            EigenSource::Numeric => "numeric",
        };
        Self {
            source,
            pairs: sys
                .pairs
                .iter()
                .map(|p| PairJson {
                    lambda: [tidy(p.value.re), tidy(p.value.im)],
                    vector: p.vector.iter().map(|z| [tidy(z.re), tidy(z.im)]).collect(),
                    multiplicity: p.multiplicity,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerateJson {
    pub family: String,
    pub model: ModelJson,
    pub eigensystem: EigenJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationJson {
    pub condition: &'static str,
    pub row: Option<usize>,
    pub col: Option<usize>,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KineticJson {
    pub is_kinetic: bool,
    pub is_compartmental: bool,
    pub violations: Vec<ViolationJson>,
}

impl KineticJson {
    pub fn from_report(r: &KineticReport) -> Self {
        Self {
            is_kinetic: r.is_kinetic,
            is_compartmental: r.is_compartmental,
            violations: r
                .violations
                .iter()
                .map(|v| ViolationJson {
                    condition: v.condition.code(),
                    row: v.row,
                    col: v.col,
                    value: tidy(v.value),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NetworkJson {
    pub classification: &'static str,
    pub steps: Vec<String>,
    pub mass_conserving: bool,
}

impl NetworkJson {
    pub fn from_network(net: &ReactionNetwork, mass_conserving: bool) -> Self {
        let sp = net.species();
        Self {
            classification: net.classification().code(),
            steps: net
                .steps()
                .iter()
                .map(|s| format!("{} -> {} ({})", s.reactant.render(sp), s.product.render(sp), s.rate))
                .collect(),
            mass_conserving,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckJson {
    #[serde(flatten)]
    pub kinetic: KineticJson,
    pub network: Option<NetworkJson>,
    pub network_error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LumpJson {
    #[serde(rename = "A_hat")]
    pub a_hat: Vec<Vec<Entry>>,
    pub b_hat: Vec<Entry>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<Entry>>,
    #[serde(rename = "Qbar")]
    pub qbar: Vec<Vec<Entry>>,
    pub residual: f64,
    pub kinetic: KineticJson,
    /// The lumped system as a model when it is real.
    pub lumped_model: Option<ModelJson>,
    /// Row test for a nonnegative generalized inverse; only for nonnegative `Q`.
    pub farkas: Option<FarkasJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FarkasJson {
    pub has_nonneg_geninverse: bool,
    pub witness_row: Option<usize>,
}

impl LumpJson {
    pub fn from_lumped(l: &LumpedModel, real_tol: f64) -> Self {
        Self {
            a_hat: complex_rows(&l.a_hat),
            b_hat: complex_vec(&l.b_hat),
            q: complex_rows(l.q.matrix()),
            qbar: complex_rows(&l.qbar.qbar),
            residual: l.exactness_residual,
            kinetic: KineticJson::from_report(&l.kinetic),
            lumped_model: l.to_real_model(real_tol).map(|m| ModelJson::from_model(&m)),
            farkas: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateJson {
    pub feasible: bool,
    #[serde(rename = "P")]
    pub p: Option<Vec<Vec<Entry>>>,
    /// `PQ`, with rounding-level imaginary parts dropped.
    #[serde(rename = "PQ")]
    pub pq: Option<Vec<Vec<Entry>>>,
    pub reason: Option<&'static str>,
    pub columns: Vec<usize>,
    pub pattern: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CertificateJson {
    pub fn from_certificate(c: &RealizabilityCertificate, q: &Matrix<C64>, seed: Option<u64>) -> Self {
        let pq = c.witness_p.as_ref().and_then(|p| p.matmul(q).ok()).map(|m| {
            if m.max_imag() <= 1e-12 * m.max_abs().max(1.0) {
                m.real_part().to_complex()
            } else {
                m
            }
        });
        Self {
            feasible: c.feasible,
            p: c.witness_p.as_ref().map(complex_rows),
            pq: pq.as_ref().map(complex_rows),
            reason: c.reason.map(|r| r.code()),
            columns: c.columns.clone(),
            pattern: c.pattern.iter().map(|s| char::from(b'0' + s.number())).collect(),
            seed,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorJson {
    pub error: String,
    pub detail: String,
}

/// Seventeen significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{:.16e}", tidy(x))
}

/// `t,X1,...` followed by one row per sample.
pub fn trajectory_csv(species: &[String], tr: &Trajectory) -> String {
    let mut out = String::from("t");
    for s in species {
        out.push(',');
        out.push_str(s);
    }
    out.push('\n');
    for (t, x) in tr.times.iter().zip(&tr.states) {
        out.push_str(&fmt_float(*t));
        for v in x {
            out.push(',');
            out.push_str(&fmt_float(*v));
        }
        out.push('\n');
    }
    out
}

pub fn region_csv(cells: &[RegionCell]) -> String {
    let mut out = String::from("k2,k3,D,label\n");
    for c in cells {
        let label = if c.real { "real" } else { "complex" };
        let _ = writeln!(out, "{},{},{},{}", fmt_float(c.k2), fmt_float(c.k3), fmt_float(c.discriminant), label);
    }
    out
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
