//! Heralded N00N-state generation.
//!
//! Two generators are modelled: a cross-Kerr coupled pair of interferometers
//! in which one ancilla photon switches the phase of the second interferometer,
//! and a linear-optics scheme that taps a twin-Fock `|3,3⟩` interferometer with
//! two weak beam splitters and heralds one photon in each tap.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::elements::{apply_circuit, CircuitStep};
use crate::error::{Error, Result};
use crate::fock::{inner_product, FockOptions, OccupationVector, PureState};
use crate::optimize::{maximize, Optimum, SearchOptions};

/// Exact photon counts demanded on ancilla modes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeraldPattern {
    requirements: BTreeMap<usize, u32>,
}

impl HeraldPattern {
    pub fn new(requirements: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (mode, count) in requirements {
            if map.insert(mode, count).is_some() {
                return Err(Error::Parameter(format!(
                    "mode {mode} appears twice in a herald pattern"
                )));
            }
        }
        Ok(Self { requirements: map })
    }

    pub fn requirements(&self) -> &BTreeMap<usize, u32> {
        &self.requirements
    }

    fn matches(&self, key: &OccupationVector) -> bool {
        self.requirements.iter().all(|(&m, &n)| key.get(m) == n)
    }
}

/// Post-selected output of a heralded process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationResult {
    /// Renormalized, with the heralded modes removed. Empty when the herald never fires.
    pub output: PureState,
    pub success_probability: f64,
    pub fidelity_to_target: Option<f64>,
}

/// `|⟨target|state⟩|²` on renormalized states, maximized over global phase by construction.
pub fn fidelity(target: &PureState, state: &PureState) -> Result<f64> {
    let nt = target.norm_squared();
    let ns = state.norm_squared();
    if nt <= 0.0 || ns <= 0.0 {
        return Ok(0.0);
    }
    let overlap = inner_product(target, state)?;
    Ok((overlap.norm_sqr() / (nt * ns)).clamp(0.0, 1.0))
}

/// Fidelity to the closest `(|N,0⟩ + e^{iδ}|0,N⟩)/√2` over the relative phase `δ`.
///
/// Equals `(|c_{N0}| + |c_{0N}|)² / (2‖ψ‖²)`.
pub fn noon_fidelity(state: &PureState, n: u32) -> Result<f64> {
    state.expect_modes(2)?;
    let norm = state.norm_squared();
    if norm <= 0.0 {
        return Ok(0.0);
    }
    let sum = state.amplitude(&[n, 0]).norm() + state.amplitude(&[0, n]).norm();
    Ok((sum * sum / (2.0 * norm)).clamp(0.0, 1.0))
}

/// Keeps the terms matching `pattern`, drops the heralded modes and renormalizes.
///
/// An outcome that never occurs is reported with probability 0 and an empty
/// output rather than as an error.
pub fn herald_project(
    state: &PureState,
    pattern: &HeraldPattern,
    target: Option<&PureState>,
) -> Result<GenerationResult> {
    for &mode in pattern.requirements.keys() {
        state.check_mode(mode)?;
    }
    let kept_modes: Vec<usize> = (0..state.modes())
        .filter(|m| !pattern.requirements.contains_key(m))
        .collect();
    if kept_modes.is_empty() {
        return Err(Error::Parameter("herald pattern covers every mode".into()));
    }
    if let Some(t) = target {
        t.expect_modes(kept_modes.len())?;
    }

    let mut kept = BTreeMap::new();
    for (key, amp) in state.terms() {
        if pattern.matches(key) {
            let label: Vec<u32> = kept_modes.iter().map(|&m| key.get(m)).collect();
            kept.insert(OccupationVector::new(label), *amp);
        }
    }
    let projected = PureState::from_map(kept_modes.len(), kept, state.options());
    let success_probability = projected.norm_squared();
    let output = if success_probability > 0.0 {
        projected.renormalized()?
    } else {
        projected
    };
    let fidelity_to_target = match target {
        Some(t) => Some(fidelity(t, &output)?),
        None => None,
    };
    Ok(GenerationResult {
        output,
        success_probability,
        fidelity_to_target,
    })
}

/// The two heralded branches of the cross-Kerr generator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KerrGeneration {
    /// Ancilla photon detected in the upper output of the control interferometer.
    pub ancilla_upper: GenerationResult,
    /// Ancilla photon detected in the lower output.
    pub ancilla_lower: GenerationResult,
}

/// Cross-Kerr N00N generator with an ideal conditional `π` shift.
pub fn generate_noon_gc(n: u32) -> Result<KerrGeneration> {
    generate_noon_gc_with(n, PI, FockOptions::default())
}

/// Cross-Kerr generator with coupling `chi`.
///
/// Modes 0 and 1 are the arms of the control interferometer fed by one
/// ancilla photon; modes 2 and 3 are the arms of the signal interferometer
/// fed by `|N,0⟩`. The Kerr element couples the control's lower arm (1) to
/// signal arm 2. Each branch's fidelity is to the nearest N00N state over the
/// relative phase, since the two ancilla ports herald opposite signs.
pub fn generate_noon_gc_with(n: u32, chi: f64, options: FockOptions) -> Result<KerrGeneration> {
    if n == 0 {
        return Err(Error::Parameter("N must be at least 1".into()));
    }
    let input = options.fock(&[1, 0, n, 0])?;
    let steps = [
        CircuitStep::balanced_splitter(0, 1),
        CircuitStep::balanced_splitter(2, 3),
        CircuitStep::CrossKerr { modes: (1, 2), chi },
        CircuitStep::balanced_splitter(0, 1),
        CircuitStep::balanced_splitter(2, 3),
    ];
    let out = apply_circuit(&input, &steps)?;
    let branch = |upper: u32| -> Result<GenerationResult> {
        let pattern = HeraldPattern::new([(0, upper), (1, 1 - upper)])?;
        let mut result = herald_project(&out, &pattern, None)?;
        result.fidelity_to_target = Some(noon_fidelity(&result.output, n)?);
        Ok(result)
    };
    Ok(KerrGeneration {
        ancilla_upper: branch(1)?,
        ancilla_lower: branch(0)?,
    })
}

fn check_tap(tap_theta: f64) -> Result<()> {
    if !(tap_theta > 0.0 && tap_theta < FRAC_PI_2) {
        return Err(Error::Parameter(format!(
            "tap angle must lie in (0, π/2), got {tap_theta}"
        )));
    }
    Ok(())
}

/// The tapped `|3,3⟩` interferometer up to and including the herald.
///
/// Modes 0 and 1 are the interferometer arms, modes 2 and 3 the ancillas
/// tapping arms 0 and 1. Only heralds with one photon in each ancilla are kept.
pub fn lkd_heralded_state(tap_theta: f64) -> Result<GenerationResult> {
    check_tap(tap_theta)?;
    let input = FockOptions::default().fock(&[3, 3, 0, 0])?;
    let steps = [
        CircuitStep::balanced_splitter(0, 1),
        CircuitStep::BeamSplitter {
            modes: (0, 2),
            theta: tap_theta,
        },
        CircuitStep::BeamSplitter {
            modes: (1, 3),
            theta: tap_theta,
        },
    ];
    let tapped = apply_circuit(&input, &steps)?;
    herald_project(&tapped, &HeraldPattern::new([(2, 1), (3, 1)])?, None)
}

/// Linear-optics N = 4 N00N generator.
pub fn generate_noon4_lkd(tap_theta: f64) -> Result<GenerationResult> {
    generate_noon4_lkd_with(tap_theta, 0)
}

/// As [`generate_noon4_lkd`], with the quarter-wave mirror on arm `mirror_arm`.
///
/// Symmetric taps leave the heralded state as `|3,1⟩ + |1,3⟩`, which a
/// balanced splitter maps back onto itself. The `π/2` mirror phase on one
/// arm turns it into `|3,1⟩ − |1,3⟩`, which recombines into `|4,0⟩ ± |0,4⟩`.
pub fn generate_noon4_lkd_with(tap_theta: f64, mirror_arm: usize) -> Result<GenerationResult> {
    if mirror_arm > 1 {
        return Err(Error::Parameter(format!(
            "mirror arm must be 0 or 1, got {mirror_arm}"
        )));
    }
    let heralded = lkd_heralded_state(tap_theta)?;
    if heralded.success_probability == 0.0 {
        return Ok(GenerationResult {
            fidelity_to_target: Some(0.0),
            ..heralded
        });
    }
    let steps = [
        CircuitStep::Mirror { mode: mirror_arm },
        CircuitStep::balanced_splitter(mirror_arm, 1 - mirror_arm),
    ];
    let output = apply_circuit(&heralded.output, &steps)?;
    let fidelity_to_target = Some(noon_fidelity(&output, 4)?);
    Ok(GenerationResult {
        output,
        success_probability: heralded.success_probability,
        fidelity_to_target,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuccessObjective {
    Probability,
    ProbabilityTimesFidelity,
}

/// Tunes the tap reflectivity of the linear-optics generator.
pub fn optimize_success(objective: SuccessObjective, theta_bounds: (f64, f64)) -> Result<Optimum> {
    let (lo, hi) = theta_bounds;
    if !(lo > 0.0 && hi < FRAC_PI_2 && lo < hi) {
        return Err(Error::Parameter(format!(
            "tap bounds must lie inside (0, π/2), got [{lo}, {hi}]"
        )));
    }
    maximize(
        |theta| {
            let r = generate_noon4_lkd(theta)?;
            Ok(match objective {
                SuccessObjective::Probability => r.success_probability,
                SuccessObjective::ProbabilityTimesFidelity => {
                    r.success_probability * r.fidelity_to_target.unwrap_or(0.0)
                }
            })
        },
        theta_bounds,
        SearchOptions::default(),
    )
}
