//! Electron-density closure `rho_e(phi)`.
//!
//! Two analytic families are supported: the polytropic law
//! `rho_e = [1 - (gamma_e - 1)/gamma_e * phi/A_e]^(1/(gamma_e - 1))` on
//! `(-inf, gamma_e A_e/(gamma_e - 1))` and its `gamma_e -> 1` limit, the
//! Boltzmann relation `rho_e = exp(-phi/A_e)`. Both are normalized so that
//! `rho_e(0) = 1` and are strictly decreasing.

use crate::error::{NspError, Result};
use crate::quadrature;

/// Evaluations closer than this to the upper end of the potential interval
/// of the polytropic family are rejected.
pub const PHI_MAX_GUARD: f64 = 1e-9;

/// Absolute tolerance of the quasineutral pressure quadrature.
pub const PRESSURE_QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityKind {
    Generalized { gamma_e: f64, a_e: f64 },
    Boltzmann { a_e: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronDensityModel {
    kind: DensityKind,
    phi_min: f64,
    phi_max: f64,
}

impl ElectronDensityModel {
    pub fn boltzmann(a_e: f64) -> Result<Self> {
        if !(a_e > 0.0 && a_e.is_finite()) {
            return Err(NspError::InvalidInput(format!("A_e must be positive, got {a_e}")));
        }
        Ok(Self {
            kind: DensityKind::Boltzmann { a_e },
            phi_min: f64::NEG_INFINITY,
            phi_max: f64::INFINITY,
        })
    }

    /// Polytropic family. `gamma_e == 1` is mapped to the Boltzmann relation.
    pub fn generalized(gamma_e: f64, a_e: f64) -> Result<Self> {
        if !(gamma_e >= 1.0 && gamma_e.is_finite()) {
            return Err(NspError::InvalidInput(format!(
                "gamma_e must be at least 1, got {gamma_e}"
            )));
        }
        if gamma_e == 1.0 {
            return Self::boltzmann(a_e);
        }
        if !(a_e > 0.0 && a_e.is_finite()) {
            return Err(NspError::InvalidInput(format!("A_e must be positive, got {a_e}")));
        }
        Ok(Self {
            kind: DensityKind::Generalized { gamma_e, a_e },
            phi_min: f64::NEG_INFINITY,
            phi_max: gamma_e * a_e / (gamma_e - 1.0),
        })
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    pub fn phi_min(&self) -> f64 {
        self.phi_min
    }

    pub fn phi_max(&self) -> f64 {
        self.phi_max
    }

    /// Largest potential accepted by the evaluators.
    fn phi_upper(&self) -> f64 {
        match self.kind {
            DensityKind::Generalized { .. } => self.phi_max - PHI_MAX_GUARD,
            DensityKind::Boltzmann { .. } => f64::INFINITY,
        }
    }

    fn check_phi(&self, phi: f64) -> Result<()> {
        if phi.is_finite() && phi > self.phi_min && phi < self.phi_upper() {
            Ok(())
        } else {
            Err(NspError::Domain {
                what: "phi",
                value: phi,
                lo: self.phi_min,
                hi: self.phi_upper(),
            })
        }
    }

    /// Open range `(rho_m, rho_M)` of densities reachable from admissible potentials.
    pub fn density_range(&self) -> (f64, f64) {
        match self.kind {
            DensityKind::Generalized { .. } => {
                // rho_e is increasing without bound as phi -> -inf.
                let lo = self.density_unchecked(self.phi_upper());
                (lo, f64::INFINITY)
            }
            DensityKind::Boltzmann { .. } => (0.0, f64::INFINITY),
        }
    }

    fn density_unchecked(&self, phi: f64) -> f64 {
        match self.kind {
            DensityKind::Generalized { gamma_e, a_e } => {
                let base = 1.0 - (gamma_e - 1.0) / gamma_e * phi / a_e;
                base.powf(1.0 / (gamma_e - 1.0))
            }
            DensityKind::Boltzmann { a_e } => (-phi / a_e).exp(),
        }
    }

    pub fn density(&self, phi: f64) -> Result<f64> {
        self.check_phi(phi)?;
        Ok(self.density_unchecked(phi))
    }

    /// Returns `(rho_e'(phi), rho_e''(phi))`.
    pub fn density_derivatives(&self, phi: f64) -> Result<(f64, f64)> {
        self.check_phi(phi)?;
        Ok(match self.kind {
            DensityKind::Generalized { gamma_e, a_e } => {
                let base = 1.0 - (gamma_e - 1.0) / gamma_e * phi / a_e;
                let k1 = (2.0 - gamma_e) / (gamma_e - 1.0);
                let d1 = -base.powf(k1) / (gamma_e * a_e);
                let d2 = (2.0 - gamma_e) / (gamma_e * a_e).powi(2) * base.powf(k1 - 1.0);
                (d1, d2)
            }
            DensityKind::Boltzmann { a_e } => {
                let rho = (-phi / a_e).exp();
                (-rho / a_e, rho / (a_e * a_e))
            }
        })
    }

    pub fn inverse_density(&self, rho: f64) -> Result<f64> {
        let (lo, hi) = self.density_range();
        if !(rho.is_finite() && rho > lo && rho < hi) {
            return Err(NspError::Domain {
                what: "rho",
                value: rho,
                lo,
                hi,
            });
        }
        let phi = match self.kind {
            DensityKind::Generalized { gamma_e, a_e } => {
                gamma_e * a_e / (gamma_e - 1.0) * (1.0 - rho.powf(gamma_e - 1.0))
            }
            DensityKind::Boltzmann { a_e } => -a_e * rho.ln(),
        };
        // One Newton polish step against rounding in the closed form.
        let (d1, _) = self.density_derivatives(phi)?;
        Ok(phi - (self.density_unchecked(phi) - rho) / d1)
    }

    /// Integrand of the quasineutral pressure, `1 / (s^3 rho_e'(rho_e^{-1}(1/s)))`.
    /// Negative on the whole admissible range.
    pub fn pressure_integrand(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(NspError::Domain {
                what: "specific volume",
                value: s,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let phi = self.inverse_density(1.0 / s)?;
        let (d1, _) = self.density_derivatives(phi)?;
        Ok(1.0 / (s * s * s * d1))
    }

    /// Oriented integral of [`Self::pressure_integrand`] from `v_ref` to `v`.
    pub fn quasineutral_pressure(&self, v: f64, v_ref: f64) -> Result<f64> {
        for (what, value) in [("v", v), ("v_ref", v_ref)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(NspError::Domain {
                    what,
                    value,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
        }
        let r = quadrature::integrate(|s| self.pressure_integrand(s), v_ref, v, PRESSURE_QUAD_TOL)?;
        Ok(r.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn models() -> Vec<ElectronDensityModel> {
        vec![
            ElectronDensityModel::boltzmann(1.0).unwrap(),
            ElectronDensityModel::boltzmann(0.7).unwrap(),
            ElectronDensityModel::generalized(2.0, 1.0).unwrap(),
            ElectronDensityModel::generalized(3.0, 1.0).unwrap(),
            ElectronDensityModel::generalized(5.0 / 3.0, 1.3).unwrap(),
        ]
    }

    #[test]
    fn unit_density_at_zero_potential() {
        for m in models() {
            assert_eq!(m.density(0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn closed_form_values() {
        let b = ElectronDensityModel::boltzmann(1.0).unwrap();
        assert_relative_eq!(b.density(1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        let g2 = ElectronDensityModel::generalized(2.0, 1.0).unwrap();
        assert_relative_eq!(g2.density(0.5).unwrap(), 0.75, max_relative = 1e-15);
        assert_eq!(b.density_derivatives(0.0).unwrap(), (-1.0, 1.0));
        let (d1, d2) = g2.density_derivatives(0.0).unwrap();
        assert_relative_eq!(d1, -0.5, max_relative = 1e-15);
        assert_eq!(d2, 0.0);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let m = ElectronDensityModel::generalized(3.0, 1.0).unwrap();
        let (phi, h) = (0.3, 1e-5);
        let (d1, d2) = m.density_derivatives(phi).unwrap();
        let fd1 = (m.density(phi + h).unwrap() - m.density(phi - h).unwrap()) / (2.0 * h);
        let fd2 = (m.density_derivatives(phi + h).unwrap().0
            - m.density_derivatives(phi - h).unwrap().0)
            / (2.0 * h);
        assert!(((d1 - fd1) / d1).abs() < 1e-8);
        assert!(((d2 - fd2) / d2).abs() < 1e-8);
    }

    #[test]
    fn inverse_values() {
        for m in models() {
            assert!(m.inverse_density(1.0).unwrap().abs() < 1e-15);
        }
        let g2 = ElectronDensityModel::generalized(2.0, 1.0).unwrap();
        assert_relative_eq!(g2.inverse_density(0.75).unwrap(), 0.5, max_relative = 1e-14);
        let b = ElectronDensityModel::boltzmann(1.0).unwrap();
        assert_relative_eq!(b.inverse_density((-2.0f64).exp()).unwrap(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn domain_errors() {
        let g2 = ElectronDensityModel::generalized(2.0, 1.0).unwrap();
        assert_eq!(g2.phi_max(), 2.0);
        assert!(g2.density(2.0).is_err());
        assert!(g2.density(2.0 - 0.5 * PHI_MAX_GUARD).is_err());
        assert!(g2.density(1.999).is_ok());
        assert!(g2.inverse_density(0.0).is_err());
        assert!(g2.inverse_density(-1.0).is_err());
        assert!(ElectronDensityModel::generalized(0.9, 1.0).is_err());
        assert!(ElectronDensityModel::boltzmann(0.0).is_err());
        assert!(matches!(
            ElectronDensityModel::generalized(1.0, 2.0).unwrap().kind(),
            DensityKind::Boltzmann { a_e } if a_e == 2.0
        ));
    }

    #[test]
    fn quasineutral_pressure_examples() {
        let b = ElectronDensityModel::boltzmann(1.0).unwrap();
        assert_eq!(b.quasineutral_pressure(1.3, 1.3).unwrap(), 0.0);
        assert!((b.quasineutral_pressure(2.0, 1.0).unwrap() + 0.5).abs() < 1e-13);
    }

    #[test]
    fn quasineutral_pressure_matches_fine_simpson() {
        let m = ElectronDensityModel::generalized(2.0, 1.0).unwrap();
        let (a, b) = (1.0, 1.5);
        let n = 1_000_000usize;
        let h = (b - a) / n as f64;
        let mut s = m.pressure_integrand(a).unwrap() + m.pressure_integrand(b).unwrap();
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * m.pressure_integrand(a + i as f64 * h).unwrap();
        }
        let oracle = s * h / 3.0;
        let value = m.quasineutral_pressure(b, a).unwrap();
        assert!((value - oracle).abs() < 1e-10, "{value} vs {oracle}");
    }

    #[test]
    fn generalized_approaches_boltzmann() {
        let a_e = 1.0;
        let g = ElectronDensityModel::generalized(1.0 + 1e-6, a_e).unwrap();
        let b = ElectronDensityModel::boltzmann(a_e).unwrap();
        let hi = 2.0f64.min(g.phi_max() / 2.0);
        for k in 0..=400 {
            let phi = -2.0 + (hi + 2.0) * k as f64 / 400.0;
            let (x, y) = (g.density(phi).unwrap(), b.density(phi).unwrap());
            assert!(((x - y) / y).abs() < 1e-5);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn positivity_and_monotonicity(idx in 0usize..5, t in 0.0f64..1.0) {
            let m = models()[idx];
            let hi = m.phi_max().min(20.0) - 1e-6;
            let phi = -5.0 + t * (hi + 5.0);
            prop_assert!(m.density(phi).unwrap() > 0.0);
            prop_assert!(m.density_derivatives(phi).unwrap().0 < 0.0);
        }

        #[test]
        fn inverse_roundtrip(idx in 0usize..5, t in 0.0f64..1.0) {
            let m = models()[idx];
            let hi = m.phi_max().min(3.0) * 0.999;
            let phi = -3.0 + t * (hi + 3.0);
            let back = m.inverse_density(m.density(phi).unwrap()).unwrap();
            prop_assert!((back - phi).abs() < 1e-10);
        }

        #[test]
        fn pressure_antisymmetric_and_decreasing(idx in 0usize..5, a in 0.6f64..1.8, b in 0.6f64..1.8) {
            let m = models()[idx];
            let ab = m.quasineutral_pressure(a, b).unwrap();
            let ba = m.quasineutral_pressure(b, a).unwrap();
            prop_assert!((ab + ba).abs() < 1e-13);
            if a > b + 1e-6 {
                prop_assert!(ab < 0.0);
            }
        }
    }
}
