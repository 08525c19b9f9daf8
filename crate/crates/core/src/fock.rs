//! Sparse multi-mode Fock states.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_PHOTON_CAP: u32 = 64;
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-14;

/// Environment variable that overrides the photon cap in [`FockOptions::from_env`].
pub const PHOTON_CAP_ENV: &str = "NOON_LAB_NCAP";

/// Truncation policy carried by every state.
///
/// The photon cap is a hard limit: constructors refuse terms above it rather
/// than truncating them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockOptions {
    pub photon_cap: u32,
    pub prune_threshold: f64,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self {
            photon_cap: DEFAULT_PHOTON_CAP,
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
        }
    }
}

impl FockOptions {
    pub fn with_photon_cap(mut self, photon_cap: u32) -> Self {
        self.photon_cap = photon_cap;
        self
    }

    pub fn with_prune_threshold(mut self, prune_threshold: f64) -> Self {
        self.prune_threshold = prune_threshold;
        self
    }

    /// Defaults, with the photon cap taken from `NOON_LAB_NCAP` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(PHOTON_CAP_ENV) {
            Ok(raw) => {
                let cap = raw.trim().parse::<u32>().map_err(|_| {
                    Error::Parameter(format!("{PHOTON_CAP_ENV}={raw:?} is not a photon count"))
                })?;
                Ok(Self::default().with_photon_cap(cap))
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub(crate) fn check_total(&self, total: u64) -> Result<()> {
        if total > u64::from(self.photon_cap) {
            Err(Error::Capacity {
                total,
                cap: self.photon_cap,
            })
        } else {
            Ok(())
        }
    }
}

/// Photon counts per mode; a Fock basis label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&n| u64::from(n)).sum()
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }
}

impl From<Vec<u32>> for OccupationVector {
    fn from(counts: Vec<u32>) -> Self {
        Self(counts)
    }
}

impl From<&[u32]> for OccupationVector {
    fn from(counts: &[u32]) -> Self {
        Self(counts.to_vec())
    }
}

impl<const N: usize> From<[u32; N]> for OccupationVector {
    fn from(counts: [u32; N]) -> Self {
        Self(counts.to_vec())
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// Mean and variance of an observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    /// Builds moments from `⟨O⟩` and `⟨O²⟩`; rounding noise below zero is clamped.
    pub fn from_raw(mean: f64, second_moment: f64) -> Self {
        let variance = second_moment - mean * mean;
        Self {
            mean,
            variance: variance.max(0.0),
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// A possibly subnormalized pure state on a fixed number of modes.
///
/// Terms are kept in a `BTreeMap` so iteration order, and therefore every
/// floating-point reduction over the state, is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    modes: usize,
    terms: BTreeMap<OccupationVector, Complex64>,
    options: FockOptions,
}

impl PureState {
    pub fn vacuum(modes: usize, options: FockOptions) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(OccupationVector(vec![0; modes]), Complex64::new(1.0, 0.0));
        Self {
            modes,
            terms,
            options,
        }
    }

    /// Collects terms into a state, summing repeated labels and pruning.
    pub fn from_terms<I, K>(modes: usize, terms: I, options: FockOptions) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Complex64)>,
        K: Into<OccupationVector>,
    {
        if modes == 0 {
            return Err(Error::Parameter("a state needs at least one mode".into()));
        }
        let mut map: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
        for (key, amp) in terms {
            let key = key.into();
            if key.modes() != modes {
                return Err(Error::Dimension {
                    expected: modes,
                    found: key.modes(),
                });
            }
            options.check_total(key.total())?;
            *map.entry(key).or_default() += amp;
        }
        Ok(Self::from_map(modes, map, options))
    }

    /// Builds a state from a map whose keys are already validated.
    pub(crate) fn from_map(
        modes: usize,
        mut terms: BTreeMap<OccupationVector, Complex64>,
        options: FockOptions,
    ) -> Self {
        let threshold = options.prune_threshold;
        terms.retain(|_, amp| amp.norm() > threshold);
        Self {
            modes,
            terms,
            options,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn options(&self) -> FockOptions {
        self.options
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, counts: &[u32]) -> Complex64 {
        self.terms
            .get(&OccupationVector(counts.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    /// Squared magnitude of one basis amplitude; not renormalized.
    pub fn probability(&self, counts: &[u32]) -> f64 {
        self.amplitude(counts).norm_sqr()
    }

    pub fn norm_squared(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Largest total photon number over all terms.
    pub fn max_photons(&self) -> u64 {
        self.terms.keys().map(|k| k.total()).max().unwrap_or(0)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, a)| (k.clone(), a * factor))
            .collect();
        Self::from_map(self.modes, terms, self.options)
    }

    pub fn renormalized(&self) -> Result<Self> {
        let norm = self.norm_squared();
        if norm <= 0.0 {
            return Err(Error::UndefinedState);
        }
        Ok(self.scaled(Complex64::new(1.0 / norm.sqrt(), 0.0)))
    }

    pub fn with_options(mut self, options: FockOptions) -> Result<Self> {
        options.check_total(self.max_photons())?;
        self.options = options;
        let threshold = options.prune_threshold;
        self.terms.retain(|_, amp| amp.norm() > threshold);
        Ok(self)
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            Err(Error::Parameter(format!(
                "mode {mode} out of range for a {}-mode state",
                self.modes
            )))
        } else {
            Ok(())
        }
    }

    pub(crate) fn expect_modes(&self, modes: usize) -> Result<()> {
        if self.modes != modes {
            Err(Error::Dimension {
                expected: modes,
                found: self.modes,
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i){k}", a.re, a.im)?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct TermRecord<'a> {
    counts: &'a [u32],
    re: f64,
    im: f64,
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermRecord<'_>> = self
            .terms
            .iter()
            .map(|(k, a)| TermRecord {
                counts: &k.0,
                re: a.re,
                im: a.im,
            })
            .collect();
        let mut st = serializer.serialize_struct("PureState", 2)?;
        st.serialize_field("modes", &self.modes)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<Complex64> {
    b.expect_modes(a.modes)?;
    let (small, large, conj_small) = if a.len() <= b.len() {
        (a, b, true)
    } else {
        (b, a, false)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, amp) in &small.terms {
        if let Some(other) = large.terms.get(k) {
            acc += if conj_small {
                amp.conj() * other
            } else {
                other.conj() * amp
            };
        }
    }
    Ok(acc)
}

/// Photon-number mean and variance of one mode, on the renormalized state.
pub fn number_moments(state: &PureState, mode: usize) -> Result<Moments> {
    state.check_mode(mode)?;
    let norm = state.norm_squared();
    if norm <= 0.0 {
        return Err(Error::UndefinedState);
    }
    let (mut first, mut second) = (0.0, 0.0);
    for (k, amp) in &state.terms {
        let p = amp.norm_sqr();
        let n = f64::from(k.get(mode));
        first += p * n;
        second += p * n * n;
    }
    Ok(Moments::from_raw(first / norm, second / norm))
}

/// Joint state of two independent systems; modes of `a` come first.
///
/// The result keeps `a`'s options, and every combined term must fit under
/// that photon cap.
pub fn tensor_product(a: &PureState, b: &PureState) -> Result<PureState> {
    let options = a.options;
    options.check_total(a.max_photons() + b.max_photons())?;
    let modes = a.modes + b.modes;
    let mut terms = BTreeMap::new();
    for (ka, aa) in &a.terms {
        for (kb, ab) in &b.terms {
            let mut counts = Vec::with_capacity(modes);
            counts.extend_from_slice(&ka.0);
            counts.extend_from_slice(&kb.0);
            terms.insert(OccupationVector(counts), aa * ab);
        }
    }
    Ok(PureState::from_map(modes, terms, options))
}
