//! Convergence of the coupled system to the Hartree equation as c grows.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{kernel_p_c_integral, CouplingSpec, Speed};
use crate::error::{Error, Result};
use crate::modes::Mode;

use super::field::evolve_sw_field;
use super::hartree::evolve_hartree;
use super::perturb::perturbed_plane_wave;
use super::state::GridSpec;
use super::{sup_gap, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CLimitRow {
    pub c: f64,
    /// sup over samples of ||U_c - U_Hartree||_{L2}.
    pub sup_gap: f64,
    /// int_0^infty p_c and its deviation from kappa / c^2.
    pub p_c_integral: f64,
    pub p_c_integral_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CLimitStudy {
    pub rows: Vec<CLimitRow>,
    pub nonincreasing: bool,
}

/// Runs the coupled solver at each c and the Hartree solver once from the same
/// perturbed plane wave (wave field at Psi*, Pi = 0) and compares U.
pub fn c_limit_study(
    spec: &CouplingSpec,
    grid: &GridSpec,
    k: Mode,
    eps: f64,
    perturbation: &[(Mode, C64)],
    c_list: &[f64],
    sample_every: usize,
) -> Result<CLimitStudy> {
    if c_list.is_empty() || c_list.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
        return Err(Error::invalid("c_list must hold finite positive speeds"));
    }
    let opts = SolverOptions::new(k, sample_every).with_snapshots().light();
    let start = perturbed_plane_wave(spec, grid, k, eps, perturbation)?;
    let hartree = evolve_hartree(&start.u, spec, grid, &opts)?;
    let kappa = spec.table().kappa();
    let rows: Result<Vec<CLimitRow>> = c_list
        .par_iter()
        .map(|&c| {
            let sc = spec.with_c(Speed::Finite(c));
            let run = evolve_sw_field(&start, &sc, grid, &opts)?;
            // p is negligible beyond tau = 20 for rapidly decaying sigma_2_hat.
            let integral = kernel_p_c_integral(sc.table(), c, 20.0 / c);
            Ok(CLimitRow {
                c,
                sup_gap: sup_gap(&run.snapshots, &hartree.snapshots, spec.d),
                p_c_integral: integral,
                p_c_integral_error: (integral - kappa / (c * c)).abs(),
            })
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by(|a, b| a.c.partial_cmp(&b.c).unwrap());
    let nonincreasing = rows.windows(2).all(|w| w[1].sup_gap <= w[0].sup_gap);
    Ok(CLimitStudy {
        rows,
        nonincreasing,
    })
}
