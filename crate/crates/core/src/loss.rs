//! Loss sweeps: exponential contrast decay for N-photon states and the
//! breakeven loss against coherent light.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{tensor_product, FockOptions, PureState};
use crate::interferometry::{
    contrast_factor, fringe_scan, phase_sensitivity, FringeScan, MziLayout, Observable,
};
use crate::states::CoherentSpec;

/// Tolerance between simulated contrasts and their closed forms.
pub const CONTRAST_CHECK: f64 = 1e-9;
/// Tolerance between the simulated and closed-form breakeven loss.
pub const BREAKEVEN_CHECK: f64 = 1e-8;
/// Poisson tail dropped from coherent inputs here; loss reweights the
/// truncated tail, so the default would leave a few 1e-12 in the contrast.
const COHERENT_TAIL: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossSweep {
    pub gammas: Vec<f64>,
    pub coherent_contrast: Vec<f64>,
    pub noon_contrast: Vec<f64>,
    #[serde(rename = "N")]
    pub n: u32,
}

/// Phases `kπ/(4N)` over one turn; they include every extremum of both the
/// coherent fringe and the `N`-fold fringe.
fn contrast_grid(n: u32) -> Vec<f64> {
    let steps = 8 * n;
    (0..=steps)
        .map(|k| PI * f64::from(k) / (4.0 * f64::from(n)))
        .collect()
}

fn coherent_input(n_coherent: f64, options: FockOptions) -> Result<PureState> {
    if !(n_coherent > 0.0) {
        return Err(Error::Parameter(format!(
            "coherent photon number must be positive, got {n_coherent}"
        )));
    }
    let beam = options
        .coherent(&CoherentSpec::real(n_coherent.sqrt()).with_tail_epsilon(COHERENT_TAIL)?)?;
    tensor_product(&beam, &options.fock(&[0])?)
}

struct ContrastProbe {
    n: u32,
    phis: Vec<f64>,
    coherent: PureState,
    noon: PureState,
    coherent_ref: FringeScan,
    noon_ref: FringeScan,
}

impl ContrastProbe {
    fn new(n: u32, n_coherent: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("N must be at least 1".into()));
        }
        let options = FockOptions::default();
        let phis = contrast_grid(n);
        let coherent = coherent_input(n_coherent, options)?;
        let noon = options.noon(n)?;
        let coherent_ref = fringe_scan(
            &coherent,
            &phis,
            0.0,
            Observable::Difference,
            MziLayout::Full,
        )?;
        let noon_ref = fringe_scan(
            &noon,
            &phis,
            0.0,
            Observable::NPhotonRate(n),
            MziLayout::BarePhase,
        )?;
        Ok(Self {
            n,
            phis,
            coherent,
            noon,
            coherent_ref,
            noon_ref,
        })
    }

    fn coherent_contrast(&self, gamma: f64) -> Result<f64> {
        let scan = fringe_scan(
            &self.coherent,
            &self.phis,
            gamma,
            Observable::Difference,
            MziLayout::Full,
        )?;
        contrast_factor(&scan, &self.coherent_ref)
    }

    fn noon_contrast(&self, gamma: f64) -> Result<f64> {
        let scan = fringe_scan(
            &self.noon,
            &self.phis,
            gamma,
            Observable::NPhotonRate(self.n),
            MziLayout::BarePhase,
        )?;
        contrast_factor(&scan, &self.noon_ref)
    }
}

/// Simulated contrast factors for coherent light (mean `n_coherent` photons)
/// and for N00N(`N`) over a loss grid.
///
/// Each simulated value is checked against `e^{−γ}` or `e^{−Nγ}`.
pub fn contrast_curves(n: u32, n_coherent: f64, gamma_grid: &[f64]) -> Result<LossSweep> {
    if gamma_grid.is_empty() {
        return Err(Error::Parameter("loss grid is empty".into()));
    }
    if gamma_grid[0] < 0.0 || gamma_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Parameter(
            "loss grid must be non-negative and increasing".into(),
        ));
    }
    let probe = ContrastProbe::new(n, n_coherent)?;
    let mut coherent_contrast = Vec::with_capacity(gamma_grid.len());
    let mut noon_contrast = Vec::with_capacity(gamma_grid.len());
    for &gamma in gamma_grid {
        let c = probe.coherent_contrast(gamma)?;
        let q = probe.noon_contrast(gamma)?;
        let (c_exact, q_exact) = ((-gamma).exp(), (-f64::from(n) * gamma).exp());
        if (c - c_exact).abs() > CONTRAST_CHECK || (q - q_exact).abs() > CONTRAST_CHECK {
            return Err(Error::Consistency(format!(
                "contrast at gamma = {gamma}: simulated ({c}, {q}), expected ({c_exact}, {q_exact})"
            )));
        }
        coherent_contrast.push(c);
        noon_contrast.push(q);
    }
    Ok(LossSweep {
        gammas: gamma_grid.to_vec(),
        coherent_contrast,
        noon_contrast,
        n,
    })
}

/// Loss at which the N00N fringe's maximum slope `N e^{−Nγ}` falls to the
/// coherent fringe's `e^{−γ}`: `ln N / (N − 1)`.
pub fn breakeven_gamma_closed_form(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter(format!("breakeven needs N ≥ 2, got {n}")));
    }
    let nf = f64::from(n);
    Ok(nf.ln() / (nf - 1.0))
}

/// The same crossing located by bisection on simulated contrasts.
pub fn breakeven_gamma_simulated(n: u32) -> Result<f64> {
    let guess = breakeven_gamma_closed_form(n)?;
    let probe = ContrastProbe::new(n, 1.0)?;
    let gap = |gamma: f64| -> Result<f64> {
        Ok(f64::from(n) * probe.noon_contrast(gamma)? - probe.coherent_contrast(gamma)?)
    };
    let (mut lo, mut hi) = (0.0, 2.0 * guess + 1.0);
    if !(gap(lo)? > 0.0 && gap(hi)? < 0.0) {
        return Err(Error::Consistency(
            "slope gap does not change sign on the search interval".into(),
        ));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Breakeven loss `ln N / (N − 1)`, cross-checked against the simulated crossing.
pub fn breakeven_gamma(n: u32) -> Result<f64> {
    let closed = breakeven_gamma_closed_form(n)?;
    let simulated = breakeven_gamma_simulated(n)?;
    if (closed - simulated).abs() > BREAKEVEN_CHECK {
        return Err(Error::Consistency(format!(
            "breakeven for N = {n}: closed form {closed}, simulated {simulated}"
        )));
    }
    Ok(closed)
}

/// Slope-based breakeven together with the noise-propagated sensitivities
/// at that loss, for N00N(`N`) and for coherent light carrying `N` photons
/// on average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreakevenReport {
    #[serde(rename = "N")]
    pub n: u32,
    pub gamma: f64,
    pub noon_delta_phi: f64,
    pub coherent_delta_phi: f64,
}

pub fn breakeven_report(n: u32) -> Result<BreakevenReport> {
    let gamma = breakeven_gamma(n)?;
    let options = FockOptions::default();
    let noon_delta_phi = phase_sensitivity(
        &options.noon(n)?,
        Observable::NoonProjector(n),
        FRAC_PI_2 / f64::from(n),
        gamma,
        MziLayout::BarePhase,
    )?
    .delta_phi;
    let coherent_delta_phi = phase_sensitivity(
        &coherent_input(f64::from(n), options)?,
        Observable::Difference,
        FRAC_PI_2,
        gamma,
        MziLayout::Full,
    )?
    .delta_phi;
    Ok(BreakevenReport {
        n,
        gamma,
        noon_delta_phi,
        coherent_delta_phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn three_db_contrasts() {
        let sweep = contrast_curves(3, 1.0, &[0.0, LN_2]).unwrap();
        assert_abs_diff_eq!(sweep.coherent_contrast[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sweep.noon_contrast[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sweep.coherent_contrast[1], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(sweep.noon_contrast[1], 0.125, epsilon = 1e-9);
    }

    #[test]
    fn single_photon_noon_decays_like_coherent() {
        let sweep = contrast_curves(1, 1.0, &[LN_2]).unwrap();
        assert_abs_diff_eq!(
            sweep.coherent_contrast[0],
            sweep.noon_contrast[0],
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(sweep.noon_contrast[0], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn grid_validation() {
        assert!(contrast_curves(3, 1.0, &[]).is_err());
        assert!(contrast_curves(3, 1.0, &[-0.1, 0.2]).is_err());
        assert!(contrast_curves(3, 1.0, &[0.2, 0.2]).is_err());
        assert!(contrast_curves(0, 1.0, &[0.2]).is_err());
    }

    #[test]
    fn breakeven_values() {
        assert_abs_diff_eq!(
            breakeven_gamma(3).unwrap(),
            3f64.ln() / 2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(breakeven_gamma(2).unwrap(), LN_2, epsilon = 1e-12);
        assert!(breakeven_gamma(3).unwrap() < LN_2);
        assert!(matches!(breakeven_gamma(1), Err(Error::Parameter(_))));
    }

    #[test]
    fn breakeven_decreases_with_n() {
        let values: Vec<f64> = (2..=6).map(|n| breakeven_gamma(n).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn report_at_breakeven() {
        let r = breakeven_report(3).unwrap();
        assert_abs_diff_eq!(r.gamma, 3f64.ln() / 2.0, epsilon = 1e-12);
        assert!(r.noon_delta_phi > 0.0 && r.coherent_delta_phi > 0.0);
    }
}
