//! Optical elements acting on [`PureState`]s.
//!
//! Every element returns a new state and prunes amplitudes below the state's
//! threshold. Beam splitters and cross-Kerr couplers are unitary and conserve
//! the photon number of each term; the lossy phase shifter is the only
//! element that reduces the norm.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{OccupationVector, PureState};

/// One optical element with the modes it acts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitStep {
    PhaseShift {
        mode: usize,
        phi: f64,
    },
    /// Phase `phi` plus amplitude decay `e^{-γ}` per photon.
    LossyPhaseShift {
        mode: usize,
        phi: f64,
        gamma: f64,
    },
    /// `theta` is the mixing angle; 50-50 is `π/4`.
    BeamSplitter {
        modes: (usize, usize),
        theta: f64,
    },
    /// A lossless `π/2` phase on one mode.
    Mirror {
        mode: usize,
    },
    CrossKerr {
        modes: (usize, usize),
        chi: f64,
    },
}

impl CircuitStep {
    pub fn balanced_splitter(a: usize, b: usize) -> Self {
        Self::BeamSplitter {
            modes: (a, b),
            theta: std::f64::consts::FRAC_PI_4,
        }
    }

    /// The step that undoes this one. Lossy phases have no inverse.
    pub fn inverse(&self) -> Result<Self> {
        Ok(match *self {
            Self::PhaseShift { mode, phi } => Self::PhaseShift { mode, phi: -phi },
            Self::LossyPhaseShift { mode, phi, gamma } if gamma == 0.0 => Self::LossyPhaseShift {
                mode,
                phi: -phi,
                gamma,
            },
            Self::LossyPhaseShift { .. } => {
                return Err(Error::Parameter(
                    "a lossy phase shift is not invertible".into(),
                ))
            }
            Self::BeamSplitter { modes, theta } => Self::BeamSplitter {
                modes,
                theta: -theta,
            },
            Self::Mirror { mode } => Self::PhaseShift {
                mode,
                phi: -FRAC_PI_2,
            },
            Self::CrossKerr { modes, chi } => Self::CrossKerr { modes, chi: -chi },
        })
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        match *self {
            Self::PhaseShift { mode, phi } => apply_phase(state, mode, phi, 0.0),
            Self::LossyPhaseShift { mode, phi, gamma } => apply_phase(state, mode, phi, gamma),
            Self::BeamSplitter { modes, theta } => {
                apply_beamsplitter(state, modes.0, modes.1, theta)
            }
            Self::Mirror { mode } => apply_phase(state, mode, FRAC_PI_2, 0.0),
            Self::CrossKerr { modes, chi } => apply_cross_kerr(state, modes.0, modes.1, chi),
        }
    }
}

fn map_terms<F>(state: &PureState, mut f: F) -> PureState
where
    F: FnMut(&OccupationVector) -> Complex64,
{
    let terms = state.terms().map(|(k, a)| (k.clone(), a * f(k))).collect();
    PureState::from_map(state.modes(), terms, state.options())
}

fn check_pair(state: &PureState, a: usize, b: usize) -> Result<()> {
    state.check_mode(a)?;
    state.check_mode(b)?;
    if a == b {
        return Err(Error::Parameter(format!(
            "two-mode element needs distinct modes, got {a} twice"
        )));
    }
    Ok(())
}

/// Multiplies every term with `n` photons in `mode` by `e^{inφ − nγ}`.
///
/// With `gamma > 0` the result is subnormalized and its squared norm is the
/// survival probability.
pub fn apply_phase(state: &PureState, mode: usize, phi: f64, gamma: f64) -> Result<PureState> {
    state.check_mode(mode)?;
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::Parameter(format!(
            "loss exponent must be ≥ 0, got {gamma}"
        )));
    }
    let per_photon = Complex64::new(-gamma, phi);
    Ok(map_terms(state, |k| {
        (per_photon * f64::from(k.get(mode))).exp()
    }))
}

/// Multiplies every term by `e^{iχ n_a n_b}`.
pub fn apply_cross_kerr(state: &PureState, a: usize, b: usize, chi: f64) -> Result<PureState> {
    check_pair(state, a, b)?;
    Ok(map_terms(state, |k| {
        let product = f64::from(k.get(a)) * f64::from(k.get(b));
        Complex64::from_polar(1.0, chi * product)
    }))
}

/// Beam splitter with `a† → cos θ a† + i sin θ b†`, `b† → i sin θ a† + cos θ b†`.
///
/// The action on each `n`-photon sector is the matrix
/// `M⁽ⁿ⁾[k'][k] = ⟨k', n−k'| U |k, n−k⟩`, built from `M⁽ⁿ⁻¹⁾` by adding one
/// input photon. Adding it through `a†` or through `b†` gives two exact
/// recursions; weighting them by `k/n` and `(n−k)/n` yields an update with
/// operator norm at most one, so the expansion stays accurate at hundreds of
/// photons where the closed-form binomial sum cancels catastrophically.
pub fn apply_beamsplitter(state: &PureState, a: usize, b: usize, theta: f64) -> Result<PureState> {
    check_pair(state, a, b)?;
    let (sin, cos) = theta.sin_cos();
    let columns = SplitterColumns::build(
        Complex64::new(cos, 0.0),
        Complex64::new(0.0, sin),
        state.terms().map(|(k, _)| (k.get(a), k.get(b))),
    );

    let mut out: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
    for (key, amp) in state.terms() {
        let (na, nb) = (key.get(a), key.get(b));
        let total = na + nb;
        for (ka, coeff) in columns.get(na, nb).iter().enumerate() {
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            let mut label = key.clone();
            let counts = label.counts_mut();
            counts[a] = ka as u32;
            counts[b] = total - ka as u32;
            *out.entry(label).or_default() += amp * coeff;
        }
    }
    Ok(PureState::from_map(state.modes(), out, state.options()))
}

/// Output amplitudes `U|na, nb⟩` for the input pairs a state actually uses,
/// each indexed by the photon count left in mode `a`.
struct SplitterColumns {
    columns: HashMap<(u32, u32), Vec<Complex64>>,
}

impl SplitterColumns {
    fn build(t: Complex64, r: Complex64, pairs: impl Iterator<Item = (u32, u32)>) -> Self {
        let mut wanted: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (na, nb) in pairs {
            let inputs = wanted.entry(na + nb).or_default();
            if !inputs.contains(&na) {
                inputs.push(na);
            }
        }
        let mut columns = HashMap::new();
        let Some(&max_n) = wanted.keys().next_back() else {
            return Self { columns };
        };
        let bands = column_bands(&wanted, max_n);
        let sqrt: Vec<f64> = (0..=max_n).map(|i| f64::from(i).sqrt()).collect();

        let zero = Complex64::new(0.0, 0.0);
        // Sector n keeps rows 0..=n (output k') and only the columns (input k)
        // in its band, row-major.
        let mut prev = vec![Complex64::new(1.0, 0.0)];
        let (mut plo, mut pwidth) = (0usize, 1usize);
        let mut next = Vec::new();
        for n in 0..=max_n as usize {
            let (lo, hi) = bands[n];
            let width = hi - lo + 1;
            if n > 0 {
                let pdim = n;
                let inv_n = 1.0 / n as f64;
                next.clear();
                next.resize((n + 1) * width, zero);
                let at = |row: usize, col: usize| prev[row * pwidth + col - plo];
                for kp in 0..=n {
                    let up = sqrt[kp];
                    let down = sqrt[n - kp];
                    let row = &mut next[kp * width..(kp + 1) * width];
                    for k in lo..=hi {
                        let mut acc = zero;
                        if k > 0 {
                            let mut via_a = zero;
                            if kp > 0 {
                                via_a += t * at(kp - 1, k - 1) * up;
                            }
                            if kp < pdim {
                                via_a += r * at(kp, k - 1) * down;
                            }
                            acc += via_a * (sqrt[k] * inv_n);
                        }
                        if k < pdim {
                            let mut via_b = zero;
                            if kp > 0 {
                                via_b += r * at(kp - 1, k) * up;
                            }
                            if kp < pdim {
                                via_b += t * at(kp, k) * down;
                            }
                            acc += via_b * (sqrt[n - k] * inv_n);
                        }
                        row[k - lo] = acc;
                    }
                }
                std::mem::swap(&mut prev, &mut next);
                (plo, pwidth) = (lo, width);
            }
            if let Some(inputs) = wanted.get(&(n as u32)) {
                for &na in inputs {
                    let col = (0..=n)
                        .map(|kp| prev[kp * width + na as usize - lo])
                        .collect();
                    columns.insert((na, n as u32 - na), col);
                }
            }
        }
        Self { columns }
    }

    fn get(&self, na: u32, nb: u32) -> &[Complex64] {
        &self.columns[&(na, nb)]
    }
}

/// Columns `[lo, hi]` of each sector that feed a wanted column. Input
/// `(n, k)` depends on columns `k − (n − m) ..= k` of sector `m`.
fn column_bands(wanted: &BTreeMap<u32, Vec<u32>>, max_n: u32) -> Vec<(usize, usize)> {
    let len = max_n as usize + 1;
    let mut offset = vec![i64::MAX; len];
    let mut top = vec![0i64; len];
    for (&n, inputs) in wanted {
        for &k in inputs {
            let i = n as usize;
            offset[i] = offset[i].min(i64::from(k) - i64::from(n));
            top[i] = top[i].max(i64::from(k));
        }
    }
    for i in (0..len - 1).rev() {
        offset[i] = offset[i].min(offset[i + 1]);
        top[i] = top[i].max(top[i + 1]);
    }
    (0..len)
        .map(|m| {
            let lo = (offset[m] + m as i64).max(0) as usize;
            let hi = (top[m] as usize).min(m);
            (lo, hi)
        })
        .collect()
}

/// Applies `steps` left to right; the first failing step aborts with its index.
pub fn apply_circuit(state: &PureState, steps: &[CircuitStep]) -> Result<PureState> {
    let mut current = state.clone();
    for (index, step) in steps.iter().enumerate() {
        current = step.apply(&current).map_err(|source| Error::Step {
            index,
            source: Box::new(source),
        })?;
    }
    Ok(current)
}
