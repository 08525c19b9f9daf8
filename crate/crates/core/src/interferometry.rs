//! Mach-Zehnder interferometry: fringe scans, visibility and phase sensitivity.
//!
//! Mode 0 is arm `A` and carries the phase and loss; after the second beam
//! splitter it exits at port `C`. Mode 1 exits at port `D`. The difference
//! signal is `M = n_D − n_C`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::elements::{apply_beamsplitter, apply_phase};
use crate::error::{Error, Result};
use crate::fock::{FockOptions, Moments, PureState};
use crate::states::OpaSpec;

/// Central-difference step for slopes, in radians.
pub const SLOPE_STEP: f64 = 1e-5;
/// Largest relative disagreement allowed between the `h` and `h/2` slopes.
pub const SLOPE_AGREEMENT: f64 = 1e-6;

/// Port intensities of a classical MZI fed only through port `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalSignal {
    pub i_c: f64,
    pub i_d: f64,
    pub m: f64,
}

/// `I_C = I_A sin²(φ/2)`, `I_D = I_A cos²(φ/2)`, `M = I_D − I_C = I_A cos φ`.
pub fn classical_mzi_signal(intensity_a: f64, phi: f64) -> ClassicalSignal {
    let i_c = intensity_a * (phi / 2.0).sin().powi(2);
    ClassicalSignal {
        i_c,
        i_d: intensity_a - i_c,
        m: intensity_a * phi.cos(),
    }
}

/// Where the input state is defined relative to the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MziLayout {
    /// Input enters before the first beam splitter; both splitters are applied.
    Full,
    /// Input is already between the splitters; only the phase is applied.
    BarePhase,
}

pub fn run_mzi(input: &PureState, phi: f64, gamma: f64, layout: MziLayout) -> Result<PureState> {
    input.expect_modes(2)?;
    match layout {
        MziLayout::BarePhase => apply_phase(input, 0, phi, gamma),
        MziLayout::Full => {
            let split = apply_beamsplitter(input, 0, 1, FRAC_PI_4)?;
            let shifted = apply_phase(&split, 0, phi, gamma)?;
            apply_beamsplitter(&shifted, 0, 1, FRAC_PI_4)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// `n_D − n_C`, on the renormalized state.
    Difference,
    /// `(ê†)^N ê^N` with `ê = (â + b̂)/√2`; photons lost to loss count as no event.
    NPhotonRate(u32),
    /// `|N,0⟩⟨0,N| + |0,N⟩⟨N,0|`, on the renormalized state.
    NoonProjector(u32),
}

impl Observable {
    pub fn tag(&self) -> String {
        match self {
            Self::Difference => "difference".to_string(),
            Self::NPhotonRate(n) => format!("nphoton_rate_{n}"),
            Self::NoonProjector(n) => format!("noon_projector_{n}"),
        }
    }

    /// Whether the observable can go negative.
    pub fn is_signed(&self) -> bool {
        !matches!(self, Self::NPhotonRate(_))
    }

    pub fn measure(&self, state: &PureState) -> Result<Moments> {
        match *self {
            Self::Difference => difference_signal(state),
            Self::NPhotonRate(n) => nphoton_rate(state, n),
            Self::NoonProjector(n) => noon_projector(state, n),
        }
    }
}

fn two_mode_norm(state: &PureState) -> Result<f64> {
    state.expect_modes(2)?;
    let norm = state.norm_squared();
    if norm <= 0.0 {
        return Err(Error::UndefinedState);
    }
    Ok(norm)
}

/// Moments of `n_D − n_C` on the renormalized state.
pub fn difference_signal(state: &PureState) -> Result<Moments> {
    let norm = two_mode_norm(state)?;
    let (mut first, mut second) = (0.0, 0.0);
    for (k, amp) in state.terms() {
        let p = amp.norm_sqr();
        let m = f64::from(k.get(1)) - f64::from(k.get(0));
        first += p * m;
        second += p * m * m;
    }
    Ok(Moments::from_raw(first / norm, second / norm))
}

/// Two-mode amplitudes grouped by total photon number, each sector dense in `n_A`.
type Sectors = BTreeMap<u32, Vec<Complex64>>;

fn lower_symmetric(sectors: &Sectors) -> Sectors {
    let mut out = Sectors::new();
    for (&total, amps) in sectors {
        if total == 0 {
            continue;
        }
        let target = out
            .entry(total - 1)
            .or_insert_with(|| vec![Complex64::new(0.0, 0.0); total as usize]);
        for (na, &amp) in amps.iter().enumerate() {
            let nb = total as usize - na;
            if na > 0 {
                target[na - 1] += amp * (na as f64 / 2.0).sqrt();
            }
            if nb > 0 {
                target[na] += amp * (nb as f64 / 2.0).sqrt();
            }
        }
    }
    out
}

fn raise_symmetric(sectors: &Sectors) -> Sectors {
    let mut out = Sectors::new();
    for (&total, amps) in sectors {
        let target = out
            .entry(total + 1)
            .or_insert_with(|| vec![Complex64::new(0.0, 0.0); total as usize + 2]);
        for (na, &amp) in amps.iter().enumerate() {
            let nb = total as usize - na;
            target[na + 1] += amp * ((na + 1) as f64 / 2.0).sqrt();
            target[na] += amp * ((nb + 1) as f64 / 2.0).sqrt();
        }
    }
    out
}

fn sectors_norm(sectors: &Sectors) -> f64 {
    sectors.values().flatten().map(|a| a.norm_sqr()).sum()
}

/// Moments of the `N`-photon detection operator `(ê†)^N ê^N`, `ê = (â + b̂)/√2`.
///
/// Expectations are taken on the state as given, without renormalizing: a
/// subnormalized state is treated as the mixture of itself with a vacuum
/// event that never fires the detector, so loss lowers the rate.
pub fn nphoton_rate(state: &PureState, n: u32) -> Result<Moments> {
    two_mode_norm(state)?;
    let mut sectors = Sectors::new();
    for (k, a) in state.terms() {
        let (na, total) = (k.get(0), k.get(0) + k.get(1));
        sectors
            .entry(total)
            .or_insert_with(|| vec![Complex64::new(0.0, 0.0); total as usize + 1])[na as usize] +=
            *a;
    }
    for _ in 0..n {
        sectors = lower_symmetric(&sectors);
    }
    let mean = sectors_norm(&sectors);
    for _ in 0..n {
        sectors = raise_symmetric(&sectors);
    }
    Ok(Moments::from_raw(mean, sectors_norm(&sectors)))
}

/// Moments of `|N,0⟩⟨0,N| + |0,N⟩⟨N,0|` on the renormalized state.
///
/// Its square is the projector onto `{|N,0⟩, |0,N⟩}`, so on a N00N state the
/// variance is `1 − mean²`.
pub fn noon_projector(state: &PureState, n: u32) -> Result<Moments> {
    let norm = two_mode_norm(state)?;
    if n == 0 {
        return Err(Error::Parameter("N00N projector needs N ≥ 1".into()));
    }
    let left = state.amplitude(&[n, 0]);
    let right = state.amplitude(&[0, n]);
    let mean = 2.0 * (left.conj() * right).re / norm;
    let second = (left.norm_sqr() + right.norm_sqr()) / norm;
    Ok(Moments::from_raw(mean, second))
}

/// Observable means and variances over a phase grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FringeScan {
    pub phis: Vec<f64>,
    pub values: Vec<f64>,
    pub variances: Vec<f64>,
    pub observable_tag: String,
}

impl FringeScan {
    fn extremes(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn peak_to_peak(&self) -> f64 {
        let (lo, hi) = self.extremes();
        hi - lo
    }

    /// Grid phases of local maxima that reach the global maximum within
    /// `rel_tol` of the peak-to-peak amplitude.
    pub fn peak_phases(&self, rel_tol: f64) -> Vec<f64> {
        let (lo, hi) = self.extremes();
        let floor = hi - rel_tol * (hi - lo);
        let v = &self.values;
        (0..v.len())
            .filter(|&i| {
                v[i] >= floor
                    && (i == 0 || v[i] >= v[i - 1])
                    && (i + 1 == v.len() || v[i] > v[i + 1])
            })
            .map(|i| self.phis[i])
            .collect()
    }

    /// Mean spacing between successive fringe maxima.
    pub fn period(&self) -> Option<f64> {
        let peaks = self.peak_phases(1e-6);
        if peaks.len() < 2 {
            return None;
        }
        Some((peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64)
    }
}

/// `steps` evenly spaced phases from `min` to `max`, both ends included.
pub fn phase_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::Parameter(format!(
            "a grid needs at least 2 points, got {steps}"
        )));
    }
    if !(min < max) || !min.is_finite() || !max.is_finite() {
        return Err(Error::Parameter(format!(
            "grid bounds must satisfy min < max, got [{min}, {max}]"
        )));
    }
    let step = (max - min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                max
            } else {
                min + i as f64 * step
            }
        })
        .collect())
}

/// One full fringe, `[0, 2π]`.
pub fn full_turn(steps: usize) -> Result<Vec<f64>> {
    phase_grid(0.0, 2.0 * PI, steps)
}

/// Evaluates `observable` after the interferometer at every grid phase.
///
/// Grid points are independent and evaluated in parallel; results are
/// collected in grid order.
pub fn fringe_scan(
    input: &PureState,
    phis: &[f64],
    gamma: f64,
    observable: Observable,
    layout: MziLayout,
) -> Result<FringeScan> {
    if phis.is_empty() {
        return Err(Error::Parameter("phase grid is empty".into()));
    }
    if phis.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Parameter(
            "phase grid must be strictly increasing".into(),
        ));
    }
    input.expect_modes(2)?;
    let moments: Vec<Moments> = phis
        .par_iter()
        .map(|&phi| observable.measure(&run_mzi(input, phi, gamma, layout)?))
        .collect::<Result<_>>()?;
    Ok(FringeScan {
        phis: phis.to_vec(),
        values: moments.iter().map(|m| m.mean).collect(),
        variances: moments.iter().map(|m| m.variance).collect(),
        observable_tag: observable.tag(),
    })
}

/// `(max − min)/(max + min)` of a non-negative rate scan.
pub fn visibility(scan: &FringeScan) -> Result<f64> {
    if scan.observable_tag == Observable::Difference.tag()
        || scan.observable_tag.starts_with("noon_projector")
    {
        return Err(Error::Contract(format!(
            "'{}' is a signed signal; use contrast_factor against a lossless reference",
            scan.observable_tag
        )));
    }
    if scan.values.iter().any(|&v| v < 0.0) {
        return Err(Error::Contract(
            "visibility needs a non-negative rate".into(),
        ));
    }
    let (lo, hi) = scan.extremes();
    if !(hi + lo > 0.0) {
        return Err(Error::Contract(
            "visibility is undefined for an all-zero scan".into(),
        ));
    }
    Ok((hi - lo) / (hi + lo))
}

/// Ratio of peak-to-peak amplitudes of a lossy scan to its lossless reference.
pub fn contrast_factor(lossy: &FringeScan, lossless: &FringeScan) -> Result<f64> {
    if lossy.phis != lossless.phis {
        return Err(Error::Contract(
            "contrast needs identical phase grids".into(),
        ));
    }
    if lossy.observable_tag != lossless.observable_tag {
        return Err(Error::Contract(format!(
            "contrast compares like with like, got '{}' and '{}'",
            lossy.observable_tag, lossless.observable_tag
        )));
    }
    let reference = lossless.peak_to_peak();
    let (lo, hi) = lossless.extremes();
    let scale = lo.abs().max(hi.abs());
    if !(reference > 1e-14 * scale) || reference == 0.0 {
        return Err(Error::DegenerateReference);
    }
    Ok(lossy.peak_to_peak() / reference)
}

/// Two-photon-rate fringe of an OPA state through the balanced interferometer.
///
/// The detected mode `(a + b)/√2` is an eigenmode of the balanced splitter,
/// so the second splitter only contributes a global phase and is skipped.
pub fn opa_fringe(spec: &OpaSpec, options: FockOptions, phis: &[f64]) -> Result<FringeScan> {
    let mixed = apply_beamsplitter(&options.opa(spec)?, 0, 1, FRAC_PI_4)?;
    fringe_scan(
        &mixed,
        phis,
        0.0,
        Observable::NPhotonRate(2),
        MziLayout::BarePhase,
    )
}

pub fn opa_visibility(spec: &OpaSpec, options: FockOptions, phis: &[f64]) -> Result<f64> {
    visibility(&opa_fringe(spec, options, phis)?)
}

/// Error-propagation phase uncertainty `ΔM / |∂⟨M⟩/∂φ|` at one phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub delta_phi: f64,
    pub at_phi: f64,
    pub slope: f64,
    pub noise: f64,
}

/// Phase sensitivity from a Richardson-checked central difference.
///
/// The slope is estimated with steps `h` and `h/2`; they must agree to
/// [`SLOPE_AGREEMENT`] and the extrapolated value is reported.
pub fn phase_sensitivity(
    input: &PureState,
    observable: Observable,
    phi: f64,
    gamma: f64,
    layout: MziLayout,
) -> Result<SensitivityReport> {
    let mean_at = |p: f64| -> Result<f64> {
        Ok(observable.measure(&run_mzi(input, p, gamma, layout)?)?.mean)
    };
    let centre = observable.measure(&run_mzi(input, phi, gamma, layout)?)?;
    let h = SLOPE_STEP;
    let coarse = (mean_at(phi + h)? - mean_at(phi - h)?) / (2.0 * h);
    let fine = (mean_at(phi + h / 2.0)? - mean_at(phi - h / 2.0)?) / h;
    let slope = (4.0 * fine - coarse) / 3.0;

    let scale = centre.mean.abs().max(centre.std_dev()).max(1.0);
    if slope.abs() < 1e-8 * scale {
        return Err(Error::SingularPoint { phi });
    }
    if (coarse - fine).abs() > SLOPE_AGREEMENT * fine.abs() {
        return Err(Error::Consistency(format!(
            "slope estimates {coarse} (h) and {fine} (h/2) disagree at phi = {phi}"
        )));
    }
    let noise = centre.std_dev();
    Ok(SensitivityReport {
        delta_phi: noise / slope.abs(),
        at_phi: phi,
        slope,
        noise,
    })
}

/// Shot-noise and Heisenberg limits in phase and in path length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceLimits {
    pub snl_phi: f64,
    pub hl_phi: f64,
    pub snl_x: f64,
    pub hl_x: f64,
}

pub fn reference_limits(n: f64, wavelength: f64) -> Result<ReferenceLimits> {
    if !(n > 0.0) {
        return Err(Error::Parameter(format!(
            "photon number must be positive, got {n}"
        )));
    }
    if !(wavelength > 0.0) {
        return Err(Error::Parameter(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    let reduced = wavelength / (2.0 * PI);
    let snl_phi = 1.0 / n.sqrt();
    let hl_phi = 1.0 / n;
    Ok(ReferenceLimits {
        snl_phi,
        hl_phi,
        snl_x: reduced * snl_phi,
        hl_x: reduced * hl_phi,
    })
}

/// Wavelength seen by an `N`-photon absorber, `λ/N`.
pub fn effective_wavelength(wavelength: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("N must be at least 1".into()));
    }
    if !(wavelength > 0.0) {
        return Err(Error::Parameter(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    Ok(wavelength / f64::from(n))
}
