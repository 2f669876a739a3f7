//! Run configuration schema: one JSON document per run, unknown keys
//! rejected, complex numbers as [re, im] pairs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Deserialize;

use twirl_core::{GroupElement, LevyMeasure, LieRepresentation, RepresentationKit};

use crate::CliError;

/// A complex N×N matrix as nested rows of [re, im] pairs.
pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub representation: ReprConfig,
    #[serde(default)]
    pub kit: Option<KitConfig>,
    #[serde(default)]
    pub generator: Option<GeneratorConfig>,
    #[serde(default)]
    pub crosscheck: Option<CrosscheckConfig>,
    #[serde(default)]
    pub convergence: Option<ConvergenceConfig>,
    #[serde(default)]
    pub verify: Option<VerifyConfig>,
    #[serde(default)]
    pub oracle: Option<OracleConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "family", rename_all = "snake_case")]
pub enum ReprConfig {
    Su2Spin {
        j: f64,
        #[serde(default)]
        cutoff_radius: Option<f64>,
    },
    SunDefining {
        n: usize,
        #[serde(default)]
        cutoff_radius: Option<f64>,
    },
    U1Charges {
        charges: Vec<i64>,
        #[serde(default)]
        cutoff_radius: Option<f64>,
    },
    TorusCharges {
        rows: Vec<Vec<i64>>,
        #[serde(default)]
        cutoff_radius: Option<f64>,
    },
    Custom {
        generators: Vec<ComplexRows>,
        #[serde(default)]
        cutoff_radius: Option<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KitConfig {
    pub b: Vec<f64>,
    /// Row-major n×n diffusion matrix, flattened.
    pub a: Vec<f64>,
    #[serde(default)]
    pub eta: Vec<AtomConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    #[serde(default)]
    pub coords: Option<Vec<f64>>,
    #[serde(default)]
    pub unitary: Option<ComplexRows>,
    pub weight: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub times: Vec<f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosscheckConfig {
    pub t: f64,
    pub n_samples: usize,
    pub dt: f64,
    pub seed: u64,
    pub tolerance: f64,
    #[serde(default)]
    pub dump_endpoints: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "study", rename_all = "snake_case")]
pub enum ConvergenceConfig {
    /// Truncation sequence deviation across the m-list.
    Truncation { m_list: Vec<u64> },
    /// Monte-Carlo deviation from the exact evolution across a dt-list.
    Dt {
        t: f64,
        dt_list: Vec<f64>,
        n_samples: usize,
        seed: u64,
    },
    /// Monte-Carlo deviation from the exact evolution across an n-list.
    N {
        t: f64,
        dt: f64,
        n_list: Vec<usize>,
        seed: u64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub times: Vec<f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Group elements (chart coordinates) to test for covariance.
    #[serde(default)]
    pub covariance: Vec<CovarianceElement>,
    /// Atomic probability measure for the principal-log embeddability
    /// heuristic on its exact twirl.
    #[serde(default)]
    pub embeddability_atoms: Vec<AtomConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceElement {
    pub coords: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub scalar: ScalarKitConfig,
    pub t: f64,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarKitConfig {
    pub b: f64,
    pub a: f64,
    #[serde(default)]
    pub jumps: Vec<JumpConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    pub x: f64,
    pub w: f64,
}

pub fn parse_complex_rows(rows: &ComplexRows) -> Result<DMatrix<Complex64>, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config("complex matrix must be square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn build_representation(cfg: &ReprConfig) -> Result<LieRepresentation, CliError> {
    let (rep, cutoff) = match cfg {
        ReprConfig::Su2Spin { j, cutoff_radius } => {
            (LieRepresentation::su2_spin(*j)?, *cutoff_radius)
        }
        ReprConfig::SunDefining { n, cutoff_radius } => {
            (LieRepresentation::sun_defining(*n)?, *cutoff_radius)
        }
        ReprConfig::U1Charges {
            charges,
            cutoff_radius,
        } => (LieRepresentation::u1_charges(charges)?, *cutoff_radius),
        ReprConfig::TorusCharges {
            rows,
            cutoff_radius,
        } => (LieRepresentation::torus_charges(rows)?, *cutoff_radius),
        ReprConfig::Custom {
            generators,
            cutoff_radius,
        } => {
            let gens = generators
                .iter()
                .map(parse_complex_rows)
                .collect::<Result<Vec<_>, _>>()?;
            (LieRepresentation::custom(gens, *cutoff_radius)?, None)
        }
    };
    match cutoff {
        Some(r) => Ok(rep.with_cutoff_radius(r)?),
        None => Ok(rep),
    }
}

pub fn build_atoms(
    rep: &LieRepresentation,
    atoms: &[AtomConfig],
) -> Result<Vec<(GroupElement, f64)>, CliError> {
    atoms
        .iter()
        .map(|atom| {
            let g = match (&atom.coords, &atom.unitary) {
                (Some(coords), None) => {
                    let x = DVector::from_vec(coords.clone());
                    rep.group_exp(&x)?
                }
                (None, Some(rows)) => {
                    let u = parse_complex_rows(rows)?;
                    if u.nrows() != rep.dim_hilbert() {
                        return Err(CliError::Config(format!(
                            "atom unitary is {}×{}, representation needs {n}×{n}",
                            u.nrows(),
                            u.ncols(),
                            n = rep.dim_hilbert()
                        )));
                    }
                    GroupElement::from_unitary(u)?
                }
                _ => {
                    return Err(CliError::Config(
                        "each atom needs exactly one of `coords` or `unitary`".into(),
                    ))
                }
            };
            Ok((g, atom.weight))
        })
        .collect()
}

pub fn build_kit(
    rep: &LieRepresentation,
    cfg: &KitConfig,
) -> Result<RepresentationKit, CliError> {
    let n = rep.dim_group();
    if cfg.b.len() != n {
        return Err(CliError::Config(format!(
            "kit drift has length {}, representation needs {n}",
            cfg.b.len()
        )));
    }
    if cfg.a.len() != n * n {
        return Err(CliError::Config(format!(
            "kit diffusion has {} entries, expected {}",
            cfg.a.len(),
            n * n
        )));
    }
    let b = DVector::from_vec(cfg.b.clone());
    let a = DMatrix::from_row_slice(n, n, &cfg.a);
    let atoms = build_atoms(rep, &cfg.eta)?;
    let eta = LevyMeasure::new(atoms)?;
    Ok(RepresentationKit::new(b, a, eta)?)
}
