//! The five subcommands: generator, crosscheck, convergence, verify,
//! oracle. Each writes deterministic primary outputs into the run
//! directory plus a timestamp sidecar.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use twirl_core::analyzer::{
    ccp_default_tol, choi, covariance_defect, is_ccp_generator, is_cptp, pauli_decompose,
    truncation_convergence, PauliOutcome,
};
use twirl_core::linalg::logm_principal;
use twirl_core::oracle::{u1_coherence_factor, ScalarKit};
use twirl_core::sampler::{sample_endpoints, twirl_mc, PathConfig, RNG_ALGORITHM};
use twirl_core::superop::VuProjector;
use twirl_core::{
    evolve, full_generator, gkls_canonical, twirl_exact, GklsForm, LieRepresentation,
    RepresentationKit, ReprFamily, Superoperator,
};

use crate::config::{
    build_atoms, build_kit, build_representation, ConvergenceConfig, RunConfig,
};
use crate::matfile;
use crate::{CliError, Overrides};

/// Whether every configured check passed; drives the process exit code.
pub struct Outcome {
    pub passed: bool,
}

fn matrix_rows(m: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

#[derive(Serialize)]
struct Sidecar {
    command: &'static str,
    timestamp_unix_secs: u64,
}

fn write_sidecar(out: &Path, command: &'static str) -> Result<(), CliError> {
    let timestamp_unix_secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    write_json(
        &out.join("sidecar.json"),
        &Sidecar {
            command,
            timestamp_unix_secs,
        },
    )
}

fn prepare(cfg: &RunConfig, out: &Path) -> Result<(LieRepresentation, Option<RepresentationKit>), CliError> {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", out.display())))?;
    let rep = build_representation(&cfg.representation)?;
    let kit = cfg
        .kit
        .as_ref()
        .map(|k| build_kit(&rep, k))
        .transpose()?;
    Ok((rep, kit))
}

fn require_kit(kit: Option<RepresentationKit>) -> Result<RepresentationKit, CliError> {
    kit.ok_or_else(|| CliError::Config("this command needs a `kit` section".into()))
}

#[derive(Serialize)]
struct ChannelReportJson {
    t: f64,
    is_cptp: bool,
    is_trace_preserving: bool,
    trace_margin: f64,
    is_unital: bool,
    unital_margin: f64,
    choi_min_eig: f64,
    pauli_probs: Option<[f64; 4]>,
    notes: String,
}

fn channel_report_json(
    s: &Superoperator,
    t: f64,
    tol: f64,
    with_pauli: bool,
) -> Result<ChannelReportJson, CliError> {
    let r = is_cptp(s, tol)?;
    let pauli_probs = if with_pauli && s.dim_hilbert() == 2 {
        match pauli_decompose(s)? {
            PauliOutcome::Pauli(p) => Some(p),
            PauliOutcome::NotPauli => None,
        }
    } else {
        None
    };
    Ok(ChannelReportJson {
        t,
        is_cptp: r.is_cptp,
        is_trace_preserving: r.is_trace_preserving,
        trace_margin: r.trace_margin,
        is_unital: r.is_unital,
        unital_margin: r.unital_margin,
        choi_min_eig: r.choi_min_eig,
        pauli_probs,
        notes: r.notes,
    })
}

#[derive(Serialize)]
struct GklsPairJson {
    rate: f64,
    jump: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct ResidualJson {
    gamma0: f64,
    atoms: Vec<GklsAtomJson>,
}

#[derive(Serialize)]
struct GklsAtomJson {
    unitary: Vec<Vec<[f64; 2]>>,
    weight: f64,
}

#[derive(Serialize)]
struct GklsJson {
    hamiltonian: Vec<Vec<[f64; 2]>>,
    pairs: Vec<GklsPairJson>,
    residual: Option<ResidualJson>,
    dim_vu: usize,
}

fn gkls_json(form: &GklsForm, dim_vu: usize) -> GklsJson {
    GklsJson {
        hamiltonian: matrix_rows(&form.hamiltonian),
        pairs: form
            .pairs
            .iter()
            .map(|p| GklsPairJson {
                rate: p.rate,
                jump: matrix_rows(&p.jump),
            })
            .collect(),
        residual: form.residual.as_ref().map(|r| ResidualJson {
            gamma0: r.gamma0,
            atoms: r
                .atoms
                .iter()
                .map(|(g, w)| GklsAtomJson {
                    unitary: matrix_rows(g.unitary()),
                    weight: *w,
                })
                .collect(),
        }),
        dim_vu,
    }
}

/// generator: write 𝔏, its GKLS form, and channel reports at each time.
pub fn cmd_generator(cfg: &RunConfig, out: &Path, ov: &Overrides) -> Result<Outcome, CliError> {
    let (rep, kit) = prepare(cfg, out)?;
    let kit = require_kit(kit)?;
    let gcfg = cfg
        .generator
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `generator` section".into()))?;
    let tol = ov.tol.or(gcfg.tolerance).unwrap_or(1e-9);

    let l = full_generator(&rep, &kit)?;
    matfile::write_matrix(&out.join("generator.mat"), l.matrix())?;

    let form = gkls_canonical(&rep, &kit)?;
    let d = VuProjector::new(&rep).dim();
    write_json(&out.join("gkls.json"), &gkls_json(&form, d))?;

    let mut reports = Vec::new();
    for &t in &gcfg.times {
        let s = evolve(&l, t)?;
        reports.push(channel_report_json(&s, t, tol, true)?);
    }
    write_json(&out.join("channel_report.json"), &reports)?;
    write_sidecar(out, "generator")?;
    Ok(Outcome { passed: true })
}

#[derive(Serialize)]
struct CrosscheckReport {
    t: f64,
    n_samples: usize,
    dt: f64,
    seed: u64,
    rng: &'static str,
    deviation: f64,
    std_error: f64,
    tolerance: f64,
    pass: bool,
}

/// crosscheck: ‖twirl_mc − evolve‖_F against the configured tolerance.
pub fn cmd_crosscheck(cfg: &RunConfig, out: &Path, ov: &Overrides) -> Result<Outcome, CliError> {
    let (rep, kit) = prepare(cfg, out)?;
    let kit = require_kit(kit)?;
    let ccfg = cfg
        .crosscheck
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `crosscheck` section".into()))?;
    let seed = ov.seed.unwrap_or(ccfg.seed);
    let tolerance = ov.tol.unwrap_or(ccfg.tolerance);

    let path_cfg = PathConfig::new(ccfg.dt, ccfg.t.max(ccfg.dt), seed)?;
    let est = twirl_mc(&rep, &kit, ccfg.t, ccfg.n_samples, &path_cfg)?;
    let exact = evolve(&full_generator(&rep, &kit)?, ccfg.t)?;
    let deviation = (est.mean.matrix() - exact.matrix()).norm();
    let pass = deviation <= tolerance;

    matfile::write_matrix(&out.join("mc_mean.mat"), est.mean.matrix())?;
    matfile::write_matrix(&out.join("exact.mat"), exact.matrix())?;
    write_json(
        &out.join("crosscheck.json"),
        &CrosscheckReport {
            t: ccfg.t,
            n_samples: ccfg.n_samples,
            dt: ccfg.dt,
            seed,
            rng: RNG_ALGORITHM,
            deviation,
            std_error: est.std_error,
            tolerance,
            pass,
        },
    )?;

    if ccfg.dump_endpoints {
        let endpoints = sample_endpoints(&rep, &kit, ccfg.t, ccfg.n_samples, &path_cfg)?;
        let mut bytes = Vec::with_capacity(endpoints.len() * rep.dim_hilbert().pow(2) * 16);
        for g in &endpoints {
            // Column-major complex entries, little-endian f64 pairs.
            for z in g.unitary().iter() {
                bytes.extend_from_slice(&z.re.to_le_bytes());
                bytes.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        std::fs::write(out.join("endpoints.bin"), bytes)
            .map_err(|e| CliError::Io(format!("writing endpoints: {e}")))?;
    }
    write_sidecar(out, "crosscheck")?;
    Ok(Outcome { passed: pass })
}

/// convergence: truncation or dt/n scaling study, emitted as CSV.
pub fn cmd_convergence(cfg: &RunConfig, out: &Path, ov: &Overrides) -> Result<Outcome, CliError> {
    let (rep, kit) = prepare(cfg, out)?;
    let kit = require_kit(kit)?;
    let vcfg = cfg
        .convergence
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `convergence` section".into()))?;

    let mut csv = String::from("m_or_dt_or_n,deviation,std_error\n");
    match vcfg {
        ConvergenceConfig::Truncation { m_list } => {
            let rows = truncation_convergence(&rep, &kit, m_list)?;
            for (m, dev) in rows {
                csv.push_str(&format!("{m},{dev},0\n"));
            }
        }
        ConvergenceConfig::Dt {
            t,
            dt_list,
            n_samples,
            seed,
        } => {
            let seed = ov.seed.unwrap_or(*seed);
            let exact = evolve(&full_generator(&rep, &kit)?, *t)?;
            for &dt in dt_list {
                let pcfg = PathConfig::new(dt, t.max(dt), seed)?;
                let est = twirl_mc(&rep, &kit, *t, *n_samples, &pcfg)?;
                let dev = (est.mean.matrix() - exact.matrix()).norm();
                csv.push_str(&format!("{dt},{dev},{}\n", est.std_error));
            }
        }
        ConvergenceConfig::N {
            t,
            dt,
            n_list,
            seed,
        } => {
            let seed = ov.seed.unwrap_or(*seed);
            let exact = evolve(&full_generator(&rep, &kit)?, *t)?;
            for &n in n_list {
                let pcfg = PathConfig::new(*dt, t.max(*dt), seed)?;
                let est = twirl_mc(&rep, &kit, *t, n, &pcfg)?;
                let dev = (est.mean.matrix() - exact.matrix()).norm();
                csv.push_str(&format!("{n},{dev},{}\n", est.std_error));
            }
        }
    }
    std::fs::write(out.join("convergence.csv"), csv)
        .map_err(|e| CliError::Io(format!("writing convergence.csv: {e}")))?;
    write_sidecar(out, "convergence")?;
    Ok(Outcome { passed: true })
}

#[derive(Serialize)]
struct CovarianceJson {
    coords: Vec<f64>,
    defect: f64,
    commutes: bool,
}

#[derive(Serialize)]
struct EmbeddabilityJson {
    method: &'static str,
    log_converged: bool,
    generator_ccp: Option<bool>,
    heuristically_embeddable: Option<bool>,
    note: &'static str,
}

#[derive(Serialize)]
struct VerifyReport {
    tolerance: f64,
    generator_is_ccp: bool,
    ccp_tolerance: f64,
    channels: Vec<ChannelReportJson>,
    covariance: Vec<CovarianceJson>,
    embeddability: Option<EmbeddabilityJson>,
    pass: bool,
}

/// verify: CPTP at each time, conditional complete positivity, optional
/// covariance membership and the principal-log embeddability heuristic.
pub fn cmd_verify(cfg: &RunConfig, out: &Path, ov: &Overrides) -> Result<Outcome, CliError> {
    let (rep, kit) = prepare(cfg, out)?;
    let kit = require_kit(kit)?;
    let vcfg = cfg
        .verify
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `verify` section".into()))?;
    let tol = ov.tol.or(vcfg.tolerance).unwrap_or(1e-9);

    let l = full_generator(&rep, &kit)?;
    let ccp_tol = ccp_default_tol(&l);
    let generator_is_ccp = is_ccp_generator(&l, ccp_tol);

    let mut channels = Vec::new();
    let mut all_cptp = true;
    for (idx, &t) in vcfg.times.iter().enumerate() {
        let s = evolve(&l, t)?;
        matfile::write_matrix(&out.join(format!("choi_{idx}.mat")), &choi(&s))?;
        let r = channel_report_json(&s, t, tol, true)?;
        all_cptp = all_cptp && r.is_cptp && r.is_unital;
        channels.push(r);
    }

    let mut covariance = Vec::new();
    for element in &vcfg.covariance {
        let x = DVector::from_vec(element.coords.clone());
        let g = rep.group_exp(&x)?;
        let defect = covariance_defect(&rep, &l, &g)?;
        covariance.push(CovarianceJson {
            coords: element.coords.clone(),
            defect,
            commutes: defect <= tol,
        });
    }

    let embeddability = if vcfg.embeddability_atoms.is_empty() {
        None
    } else {
        let atoms = build_atoms(&rep, &vcfg.embeddability_atoms)?;
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if total <= 0.0 {
            return Err(CliError::Config("embeddability atoms need positive weight".into()));
        }
        let normalized: Vec<_> = atoms.into_iter().map(|(g, w)| (g, w / total)).collect();
        let s = twirl_exact(&rep, &normalized)?;
        match logm_principal(s.matrix()) {
            Ok(log_mat) => {
                let log_super = Superoperator::from_matrix(log_mat)?;
                let ccp = is_ccp_generator(&log_super, ccp_default_tol(&log_super));
                Some(EmbeddabilityJson {
                    method: "principal-log",
                    log_converged: true,
                    generator_ccp: Some(ccp),
                    heuristically_embeddable: Some(ccp),
                    note: "heuristic only: a negative result does not decide membership in a twirling semigroup",
                })
            }
            Err(_) => Some(EmbeddabilityJson {
                method: "principal-log",
                log_converged: false,
                generator_ccp: None,
                heuristically_embeddable: None,
                note: "heuristic only: a negative result does not decide membership in a twirling semigroup",
            }),
        }
    };

    let pass = generator_is_ccp && all_cptp;
    write_json(
        &out.join("verify.json"),
        &VerifyReport {
            tolerance: tol,
            generator_is_ccp,
            ccp_tolerance: ccp_tol,
            channels,
            covariance,
            embeddability,
            pass,
        },
    )?;
    write_sidecar(out, "verify")?;
    Ok(Outcome { passed: pass })
}

#[derive(Serialize)]
struct OracleModeJson {
    j: usize,
    l: usize,
    delta_charge: i64,
    expected: [f64; 2],
    computed: [f64; 2],
    deviation: f64,
}

#[derive(Serialize)]
struct OracleReport {
    t: f64,
    tolerance: f64,
    chart_radius: f64,
    max_deviation: f64,
    pass: bool,
    modes: Vec<OracleModeJson>,
}

/// oracle: lift a scalar kit to the configured charge representation and
/// compare every coherence multiplier against exp(t·ψ(Δk)).
pub fn cmd_oracle(cfg: &RunConfig, out: &Path, ov: &Overrides) -> Result<Outcome, CliError> {
    let (rep, _) = prepare(cfg, out)?;
    let ocfg = cfg
        .oracle
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `oracle` section".into()))?;
    let charges = match rep.family() {
        ReprFamily::U1Charges { charges } => charges.clone(),
        _ => {
            return Err(CliError::Config(
                "the oracle command needs a u1_charges representation".into(),
            ))
        }
    };
    let tolerance = ov.tol.or(ocfg.tolerance).unwrap_or(1e-10);

    let jumps: Vec<(f64, f64)> = ocfg.scalar.jumps.iter().map(|j| (j.x, j.w)).collect();
    let scalar =
        ScalarKit::with_chart_radius(ocfg.scalar.b, ocfg.scalar.a, jumps.clone(), rep.cutoff_radius())?;

    let atoms = jumps
        .iter()
        .map(|(x, w)| Ok((rep.group_exp(&DVector::from_vec(vec![*x]))?, *w)))
        .collect::<Result<Vec<_>, twirl_core::Error>>()?;
    let kit = RepresentationKit::new(
        DVector::from_vec(vec![ocfg.scalar.b]),
        DMatrix::from_row_slice(1, 1, &[ocfg.scalar.a]),
        twirl_core::LevyMeasure::new(atoms)?,
    )?;
    let s = evolve(&full_generator(&rep, &kit)?, ocfg.t)?;

    let nh = rep.dim_hilbert();
    let mut modes = Vec::new();
    let mut max_deviation = 0.0_f64;
    for j in 0..nh {
        for l in 0..nh {
            let m = charges[j] - charges[l];
            let expected = u1_coherence_factor(&scalar, m, ocfg.t)?;
            let computed = s.matrix()[(l * nh + j, l * nh + j)];
            let deviation = (computed - expected).norm();
            max_deviation = max_deviation.max(deviation);
            modes.push(OracleModeJson {
                j,
                l,
                delta_charge: m,
                expected: [expected.re, expected.im],
                computed: [computed.re, computed.im],
                deviation,
            });
        }
    }
    let pass = max_deviation <= tolerance;
    write_json(
        &out.join("oracle.json"),
        &OracleReport {
            t: ocfg.t,
            tolerance,
            chart_radius: rep.cutoff_radius(),
            max_deviation,
            pass,
            modes,
        },
    )?;
    write_sidecar(out, "oracle")?;
    Ok(Outcome { passed: pass })
}
