//! Shared helpers for integration tests: deterministic random kits over the
//! supported representation families.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use twirl_core::{LevyMeasure, LieRepresentation, RepresentationKit};

pub type RVector = DVector<f64>;
pub type RMatrix = DMatrix<f64>;

pub fn rep_families() -> Vec<(&'static str, LieRepresentation)> {
    vec![
        ("su2_spin_half", LieRepresentation::su2_spin(0.5).unwrap()),
        ("su2_spin_one", LieRepresentation::su2_spin(1.0).unwrap()),
        ("su3_defining", LieRepresentation::sun_defining(3).unwrap()),
        ("u1_charges", LieRepresentation::u1_charges(&[0, 1, 3]).unwrap()),
        (
            "torus",
            LieRepresentation::torus_charges(&[vec![1, -1, 0, 0], vec![0, 0, 1, -1]]).unwrap(),
        ),
    ]
}

/// Random atom location: a coordinate vector of norm in
/// [0.1, 1.5]·cutoff, so both in-chart and out-of-chart atoms occur.
fn random_atom_coords(rep: &LieRepresentation, rng: &mut ChaCha12Rng) -> RVector {
    let n = rep.dim_group();
    let mut x = RVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let norm = x.norm();
    if norm < 1e-6 {
        x[0] = 1.0;
    }
    let target = rng.gen_range(0.1..1.5) * rep.cutoff_radius();
    let scale = target / x.norm();
    x * scale
}

pub fn random_kit(
    rep: &LieRepresentation,
    rng: &mut ChaCha12Rng,
    max_atoms: usize,
) -> RepresentationKit {
    let n = rep.dim_group();
    let b = RVector::from_fn(n, |_, _| rng.gen_range(-0.7..0.7));
    let scale = 0.5 / (n as f64).sqrt();
    let g = RMatrix::from_fn(n, n, |_, _| rng.gen_range(-scale..scale));
    let a = &g * g.transpose();
    let n_atoms = rng.gen_range(0..=max_atoms);
    let mut atoms = Vec::with_capacity(n_atoms);
    for _ in 0..n_atoms {
        let x = random_atom_coords(rep, rng);
        let point = rep.group_exp(&x).unwrap();
        atoms.push((point, rng.gen_range(0.1..0.9)));
    }
    let eta = LevyMeasure::new(atoms).unwrap();
    RepresentationKit::new(b, a, eta).unwrap()
}
