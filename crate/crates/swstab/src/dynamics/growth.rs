//! Measured exponential growth of an unstable perturbation versus the predicted rate.

use serde::{Deserialize, Serialize};

use crate::coupling::CouplingSpec;
use crate::error::{Error, Result};
use crate::modes::Mode;
use crate::sw_spec::{growth_rate_predicted, RootTolerances};
use crate::torus_volume;

use super::field::evolve_sw_field;
use super::linear::ols_slope;
use super::perturb::eigenvector_perturbation;
use super::state::GridSpec;
use super::SolverOptions;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthOptions {
    /// The fit window starts where the relative fluctuation reaches lo_factor * amplitude.
    pub lo_factor: f64,
    /// ... and ends where it reaches hi.
    pub hi: f64,
    /// Relative fluctuation size that counts as leaving the neighbourhood.
    pub exit_threshold: f64,
    pub sample_every: usize,
    /// Points required inside the window.
    pub min_points: usize,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            lo_factor: 10.0,
            hi: 1e-2,
            exit_threshold: 1e-2,
            sample_every: 20,
            min_points: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
}

/// OLS fit of log(obs) over the window where obs lies in [lo_factor * amplitude, hi].
pub fn fit_growth(t: &[f64], obs: &[f64], amplitude: f64, opts: &GrowthOptions) -> Result<GrowthFit> {
    let lo = opts.lo_factor * amplitude;
    let start = obs.iter().position(|v| *v >= lo);
    let Some(start) = start else {
        return Err(Error::NoGrowthWindow(format!(
            "fluctuation never reached {lo:.3e} (max {:.3e}); growth is flat or T is too short",
            obs.iter().cloned().fold(0.0, f64::max)
        )));
    };
    let end = obs[start..]
        .iter()
        .position(|v| *v > opts.hi)
        .map(|i| start + i)
        .unwrap_or(obs.len());
    if end == obs.len() {
        return Err(Error::NoGrowthWindow(format!(
            "fluctuation did not reach {:.3e} before the end of the run",
            opts.hi
        )));
    }
    let pts: Vec<(f64, f64)> = (start..end).map(|i| (t[i], obs[i].ln())).collect();
    if pts.len() < opts.min_points {
        return Err(Error::NoGrowthWindow(format!(
            "only {} samples in the exponential window; use a smaller amplitude",
            pts.len()
        )));
    }
    Ok(GrowthFit {
        slope: ols_slope(&pts),
        t_start: pts[0].0,
        t_end: pts[pts.len() - 1].0,
        points: pts.len(),
    })
}

/// First time obs reaches the threshold, interpolated linearly in log(obs).
pub fn exit_time(t: &[f64], obs: &[f64], threshold: f64) -> Option<f64> {
    let i = obs.iter().position(|v| *v >= threshold)?;
    if i == 0 {
        return Some(t[0]);
    }
    let (l0, l1) = (obs[i - 1].ln(), obs[i].ln());
    let f = (threshold.ln() - l0) / (l1 - l0);
    Some(t[i - 1] + f * (t[i] - t[i - 1]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthMeasurement {
    pub k: Mode,
    pub amplitude: f64,
    pub mode: Mode,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub a_predicted: f64,
    pub a_measured: f64,
    pub relative_gap: f64,
    pub fit: GrowthFit,
    pub exit_time: Option<f64>,
    pub t_final: f64,
}

/// Perturbs the plane wave along the eigenvector of the most unstable located root,
/// evolves with the field solver and fits the growth of the nonzero-mode fluctuation.
///
/// A nonpositive `grid.t_final` is replaced by 1.25 ln(hi / amplitude) / a*.
pub fn measure_growth_rate(
    k: &Mode,
    amplitude: f64,
    spec: &CouplingSpec,
    grid: &GridSpec,
    opts: &GrowthOptions,
) -> Result<GrowthMeasurement> {
    if !(amplitude > 0.0 && amplitude < opts.hi) {
        return Err(Error::invalid(format!(
            "amplitude must lie in (0, {}), got {amplitude}",
            opts.hi
        )));
    }
    let (a_star, roots) =
        growth_rate_predicted(k, spec, spec.sigma1.band_limit(), &RootTolerances::default())?;
    let root = &roots[0];
    let mut g = *grid;
    if g.t_final <= 0.0 {
        g.t_final = 1.25 * (opts.hi / amplitude).ln() / a_star;
    }
    let state = eigenvector_perturbation(spec, &g, *k, root, amplitude)?;
    let sopts = SolverOptions::new(*k, opts.sample_every).light();
    let run = evolve_sw_field(&state, spec, &g, &sopts)?;
    let norm = torus_volume(spec.d).sqrt();
    let obs: Vec<f64> = run.trace.fluct_nonzero.iter().map(|v| v / norm).collect();
    let fit = fit_growth(&run.trace.t, &obs, amplitude, opts)?;
    Ok(GrowthMeasurement {
        k: *k,
        amplitude,
        mode: root.m,
        lambda_re: root.lambda.re,
        lambda_im: root.lambda.im,
        a_predicted: a_star,
        a_measured: fit.slope,
        relative_gap: (fit.slope - a_star).abs() / a_star,
        exit_time: exit_time(&run.trace.t, &obs, opts.exit_threshold),
        fit,
        t_final: g.t_final,
    })
}
