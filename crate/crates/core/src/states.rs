//! Input-state constructors: Fock, coherent, N00N and two-mode squeezed (OPA) states.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockOptions, OccupationVector, PureState};

pub const DEFAULT_TAIL_EPSILON: f64 = 1e-12;
pub const MAX_TAIL_EPSILON: f64 = 1e-6;

/// Largest probability mass an OPA state may lose to truncation.
pub const OPA_TAIL_LIMIT: f64 = 1e-10;

/// Single-mode coherent state `|α⟩`, truncated once the Poisson tail drops
/// below `tail_epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentSpec {
    alpha: Complex64,
    tail_epsilon: f64,
}

impl CoherentSpec {
    pub fn new(alpha: Complex64) -> Self {
        Self {
            alpha,
            tail_epsilon: DEFAULT_TAIL_EPSILON,
        }
    }

    pub fn real(alpha: f64) -> Self {
        Self::new(Complex64::new(alpha, 0.0))
    }

    pub fn with_tail_epsilon(mut self, tail_epsilon: f64) -> Result<Self> {
        if !(tail_epsilon > 0.0 && tail_epsilon <= MAX_TAIL_EPSILON) {
            return Err(Error::Parameter(format!(
                "tail_epsilon must lie in (0, {MAX_TAIL_EPSILON:e}], got {tail_epsilon:e}"
            )));
        }
        self.tail_epsilon = tail_epsilon;
        Ok(self)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn tail_epsilon(&self) -> f64 {
        self.tail_epsilon
    }

    pub fn mean_photons(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// Smallest `n*` such that the Poisson mass above `n*` is below `tail_epsilon`.
    pub fn cutoff(&self) -> u32 {
        poisson_cutoff(self.mean_photons(), self.tail_epsilon)
    }
}

fn poisson_cutoff(mean: f64, epsilon: f64) -> u32 {
    if mean == 0.0 {
        return 0;
    }
    // Probabilities are generated upward and the tail summed from the far end
    // so small tails are not lost to cancellation against 1.
    let mut probs = Vec::new();
    let mut p = (-mean).exp();
    let mut n = 0u32;
    loop {
        probs.push(p);
        n += 1;
        p *= mean / f64::from(n);
        if f64::from(n) > mean && p < epsilon * 1e-6 {
            break;
        }
    }
    let mut tail = 0.0;
    let mut cutoff = probs.len() as u32;
    for k in (0..probs.len()).rev() {
        // `tail` holds the mass strictly above k.
        if tail >= epsilon {
            break;
        }
        cutoff = k as u32;
        tail += probs[k];
    }
    cutoff
}

/// Two-mode squeezed vacuum `Σ tanhⁿ(r)/cosh(r) |n,n⟩`, truncated at `pair_cutoff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpaSpec {
    gain_r: f64,
    pair_cutoff: u32,
}

impl OpaSpec {
    /// Checks that the truncated pair tail `tanh^{2(K+1)} r` stays below 1e-10.
    pub fn new(gain_r: f64, pair_cutoff: u32) -> Result<Self> {
        if !(gain_r >= 0.0 && gain_r.is_finite()) {
            return Err(Error::Parameter(format!(
                "gain r must be finite and ≥ 0, got {gain_r}"
            )));
        }
        if pair_cutoff == 0 {
            return Err(Error::Parameter("pair_cutoff must be positive".into()));
        }
        let tail = opa_tail(gain_r, pair_cutoff);
        if tail >= OPA_TAIL_LIMIT {
            return Err(Error::Parameter(format!(
                "pair_cutoff {pair_cutoff} leaves tail probability {tail:e} at r = {gain_r}"
            )));
        }
        Ok(Self {
            gain_r,
            pair_cutoff,
        })
    }

    /// Smallest cutoff satisfying the tail limit.
    pub fn with_minimal_cutoff(gain_r: f64) -> Result<Self> {
        if !(gain_r >= 0.0 && gain_r.is_finite()) {
            return Err(Error::Parameter(format!(
                "gain r must be finite and ≥ 0, got {gain_r}"
            )));
        }
        let t2 = gain_r.tanh().powi(2);
        let mut k = 1u32;
        if t2 > 0.0 {
            // tanh^{2(K+1)} < limit  ⇔  K + 1 > ln(limit)/ln(tanh²)
            let est = (OPA_TAIL_LIMIT.ln() / t2.ln()).ceil() as u32;
            k = est.saturating_sub(2).max(1);
            while opa_tail(gain_r, k) >= OPA_TAIL_LIMIT {
                k += 1;
            }
        }
        Self::new(gain_r, k)
    }

    pub fn gain_r(&self) -> f64 {
        self.gain_r
    }

    pub fn pair_cutoff(&self) -> u32 {
        self.pair_cutoff
    }
}

fn opa_tail(gain_r: f64, pair_cutoff: u32) -> f64 {
    gain_r.tanh().powi(2).powf(f64::from(pair_cutoff) + 1.0)
}

impl FockOptions {
    pub fn fock(&self, counts: &[u32]) -> Result<PureState> {
        PureState::from_terms(
            counts.len(),
            [(OccupationVector::from(counts), Complex64::new(1.0, 0.0))],
            *self,
        )
    }

    pub fn coherent(&self, spec: &CoherentSpec) -> Result<PureState> {
        let mean = spec.mean_photons();
        if mean > f64::from(self.photon_cap) / 4.0 {
            return Err(Error::Capacity {
                total: (4.0 * mean).ceil() as u64,
                cap: self.photon_cap,
            });
        }
        let cutoff = spec.cutoff();
        self.check_total(u64::from(cutoff))?;
        let mut amp = Complex64::new((-mean / 2.0).exp(), 0.0);
        let mut terms = Vec::with_capacity(cutoff as usize + 1);
        for n in 0..=cutoff {
            if n > 0 {
                amp = amp * spec.alpha / f64::from(n).sqrt();
            }
            terms.push(([n], amp));
        }
        PureState::from_terms(1, terms, *self)
    }

    pub fn noon(&self, n: u32) -> Result<PureState> {
        if n == 0 {
            return Err(Error::Parameter(
                "N00N photon number must be positive".into(),
            ));
        }
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        PureState::from_terms(2, [([n, 0], h), ([0, n], h)], *self)
    }

    pub fn opa(&self, spec: &OpaSpec) -> Result<PureState> {
        self.check_total(2 * u64::from(spec.pair_cutoff))?;
        let t = spec.gain_r.tanh();
        let mut amp = 1.0 / spec.gain_r.cosh();
        let mut coeffs = Vec::with_capacity(spec.pair_cutoff as usize + 1);
        for n in 0..=spec.pair_cutoff {
            if n > 0 {
                amp *= t;
            }
            coeffs.push(amp);
        }
        let norm = coeffs.iter().map(|a| a * a).sum::<f64>().sqrt();
        let terms = coeffs
            .into_iter()
            .enumerate()
            .map(|(n, a)| ([n as u32, n as u32], Complex64::new(a / norm, 0.0)));
        PureState::from_terms(2, terms, *self)
    }
}

pub fn make_fock(counts: &[u32]) -> Result<PureState> {
    FockOptions::default().fock(counts)
}

pub fn make_coherent(spec: &CoherentSpec) -> Result<PureState> {
    FockOptions::default().coherent(spec)
}

/// `(|N,0⟩ + |0,N⟩)/√2`, normalization kept explicit.
pub fn make_noon(n: u32) -> Result<PureState> {
    FockOptions::default().noon(n)
}

pub fn make_opa(spec: &OpaSpec) -> Result<PureState> {
    FockOptions::default().opa(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::number_moments;
    use approx::assert_abs_diff_eq;

    fn poisson(mean: f64, n: u32) -> f64 {
        let mut p = (-mean).exp();
        for k in 1..=n {
            p *= mean / f64::from(k);
        }
        p
    }

    #[test]
    fn fock_twin_and_vacuum() {
        let s = make_fock(&[3, 3]).unwrap();
        assert_eq!(s.probability(&[3, 3]), 1.0);
        let v = make_fock(&[0, 0]).unwrap();
        assert_eq!(v.norm_squared(), 1.0);
        assert!(matches!(make_fock(&[60, 5]), Err(Error::Capacity { .. })));
    }

    #[test]
    fn coherent_zero_is_vacuum() {
        let s = make_coherent(&CoherentSpec::real(0.0)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.probability(&[0]), 1.0);
    }

    #[test]
    fn coherent_two_has_poisson_moments() {
        let s = make_coherent(&CoherentSpec::real(2.0)).unwrap();
        let m = number_moments(&s, 0).unwrap();
        assert_abs_diff_eq!(m.mean, 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.variance, 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.norm_squared(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_cutoff_for_unit_amplitude() {
        // Poisson(1) mass above 13 is 4.5e-12, above 14 it is 3.0e-13.
        assert_eq!(CoherentSpec::real(1.0).cutoff(), 14);
        let loose = CoherentSpec::real(1.0).with_tail_epsilon(5e-12).unwrap();
        assert_eq!(loose.cutoff(), 13);
    }

    #[test]
    fn coherent_distribution_is_poissonian() {
        let spec = CoherentSpec::new(Complex64::new(1.2, -0.7));
        let s = make_coherent(&spec).unwrap();
        for n in 0..=spec.cutoff() {
            assert_abs_diff_eq!(
                s.probability(&[n]),
                poisson(spec.mean_photons(), n),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn coherent_headroom_and_epsilon_checks() {
        assert!(matches!(
            make_coherent(&CoherentSpec::real(4.1)),
            Err(Error::Capacity { .. })
        ));
        assert!(make_coherent(&CoherentSpec::real(4.0)).is_ok());
        assert!(CoherentSpec::real(1.0).with_tail_epsilon(0.0).is_err());
        assert!(CoherentSpec::real(1.0).with_tail_epsilon(1e-5).is_err());
    }

    #[test]
    fn noon_states() {
        let h = FRAC_1_SQRT_2;
        let one = make_noon(1).unwrap();
        assert_eq!(one.amplitude(&[1, 0]), Complex64::new(h, 0.0));
        assert_eq!(one.amplitude(&[0, 1]), Complex64::new(h, 0.0));
        let three = make_noon(3).unwrap();
        assert_eq!(three.len(), 2);
        assert_abs_diff_eq!(three.norm_squared(), 1.0, epsilon = 1e-12);
        let m = number_moments(&make_noon(4).unwrap(), 0).unwrap();
        assert_abs_diff_eq!(m.mean, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.variance, 4.0, epsilon = 1e-12);
        let m = number_moments(&make_noon(2).unwrap(), 0).unwrap();
        assert_abs_diff_eq!(m.mean, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.variance, 1.0, epsilon = 1e-12);
        assert!(make_noon(0).is_err());
        assert!(matches!(make_noon(65), Err(Error::Capacity { .. })));
    }

    #[test]
    fn opa_zero_gain_is_vacuum() {
        let s = make_opa(&OpaSpec::new(0.0, 1).unwrap()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.probability(&[0, 0]), 1.0);
    }

    #[test]
    fn opa_pair_ratio() {
        let spec = OpaSpec::with_minimal_cutoff(0.5).unwrap();
        let s = make_opa(&spec).unwrap();
        let ratio = s.probability(&[1, 1]) / s.probability(&[0, 0]);
        assert_abs_diff_eq!(ratio, 0.5f64.tanh().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(ratio, 0.2135, epsilon = 1e-4);
        assert_abs_diff_eq!(s.norm_squared(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn opa_cutoff_validation() {
        assert!(OpaSpec::new(1.0, 5).is_err());
        let spec = OpaSpec::with_minimal_cutoff(1.0).unwrap();
        let k = spec.pair_cutoff();
        assert!(opa_tail(1.0, k) < OPA_TAIL_LIMIT);
        assert!(opa_tail(1.0, k - 1) >= OPA_TAIL_LIMIT);
        // r = 2 needs more pairs than the default cap allows.
        let big = OpaSpec::with_minimal_cutoff(2.0).unwrap();
        assert!(matches!(make_opa(&big), Err(Error::Capacity { .. })));
        let opts = FockOptions::default().with_photon_cap(2 * big.pair_cutoff());
        let s = opts.opa(&big).unwrap();
        assert_abs_diff_eq!(s.norm_squared(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn opa_marginals_match() {
        let s = make_opa(&OpaSpec::with_minimal_cutoff(0.8).unwrap()).unwrap();
        let a = number_moments(&s, 0).unwrap();
        let b = number_moments(&s, 1).unwrap();
        assert_eq!(a, b);
    }
}
