//! Weight functions `σ(x)` solving the moment problem `∫ xⁿ σ(x) dx = m(n)`
//! for the cases where a weight is known in closed form.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::quadrature::{integrate_adaptive, Domain, Integral};
use crate::numerics::NumericsConfig;
use crate::spectra::{Branch, SpectrumModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// Stated in closed form in the literature.
    ClosedForm,
    /// Reduced to an elementary form here and confirmed by quadrature.
    DerivedClosedForm,
    Unavailable,
}

#[derive(Clone)]
pub struct WeightFunction {
    pub model: String,
    pub branch: Branch,
    pub kind: WeightKind,
    /// Integration domain; `Interval { radius }` gives the support radius.
    pub support: Domain,
    pub formula: &'static str,
    evaluator: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("model", &self.model)
            .field("branch", &self.branch)
            .field("kind", &self.kind)
            .field("support", &self.support)
            .field("formula", &self.formula)
            .finish()
    }
}

impl WeightFunction {
    fn new(
        model: &SpectrumModel,
        branch: Branch,
        kind: WeightKind,
        support: Domain,
        formula: &'static str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { model: model.label(), branch, kind, support, formula, evaluator: Some(Arc::new(f)) }
    }

    fn unavailable(model: &SpectrumModel, branch: Branch) -> Self {
        Self {
            model: model.label(),
            branch,
            kind: WeightKind::Unavailable,
            support: Domain::HalfLine { scale: 1.0 },
            formula: "",
            evaluator: None,
        }
    }

    pub fn is_available(&self) -> bool {
        self.evaluator.is_some()
    }

    /// `σ(x)`; `None` when no weight is registered.
    pub fn eval(&self, x: f64) -> Option<f64> {
        self.evaluator.as_ref().map(|f| f(x))
    }

    pub fn support_radius(&self) -> f64 {
        match self.support {
            Domain::Interval { radius } => radius,
            Domain::HalfLine { .. } => f64::INFINITY,
        }
    }

    /// `∫ xⁿ σ(x) dx` by adaptive Gauss-Legendre.
    pub fn moment(&self, n: usize, cfg: &NumericsConfig) -> Option<Result<Integral>> {
        let f = self.evaluator.clone()?;
        let support = match self.support {
            // stretch the map with n so the peak of xⁿσ(x) sits mid-range
            Domain::HalfLine { scale } => Domain::HalfLine { scale: scale * (1.0 + n as f64) },
            d => d,
        };
        Some(integrate_adaptive(move |x| x.powi(n as i32) * f(x), support, 20, cfg))
    }
}

/// Registered weight for `(model, branch)`.
pub fn weight_for(model: &SpectrumModel, branch: Branch) -> WeightFunction {
    let params = model.params();
    let unit = Domain::Interval { radius: 1.0 };
    match (model.name(), branch) {
        ("harmonic", _) => {
            WeightFunction::new(model, branch, WeightKind::ClosedForm, Domain::HalfLine { scale: 1.0 }, "exp(-x)", |x| {
                (-x).exp()
            })
        }
        ("poschl_teller", Branch::Dual) => {
            let nu = params["nu"];
            WeightFunction::new(model, branch, WeightKind::ClosedForm, unit, "nu (1-x)^(nu-1)", move |x| {
                nu * (1.0 - x).powf(nu - 1.0)
            })
        }
        ("infinite_well", Branch::Dual) => {
            WeightFunction::new(model, branch, WeightKind::ClosedForm, unit, "2 (1-x)", |x| 2.0 * (1.0 - x))
        }
        ("morse", Branch::Dual) => {
            let m = params["M"];
            WeightFunction::new(
                model,
                branch,
                WeightKind::DerivedClosedForm,
                Domain::HalfLine { scale: m + 2.0 },
                "(M+1)/(M+2) (1 + x/(M+2))^-(M+2)",
                move |x| (m + 1.0) / (m + 2.0) * (1.0 + x / (m + 2.0)).powf(-(m + 2.0)),
            )
        }
        // ρ_GP(n) = n! Γ(2κ)/Γ(n+2κ) = (2κ-1) B(n+1, 2κ-1)
        ("su11_gp", Branch::Gk) | ("su11_bg", Branch::Dual) => {
            let c = 2.0 * params["kappa"] - 1.0;
            WeightFunction::new(model, branch, WeightKind::DerivedClosedForm, unit, "(2k-1) (1-x)^(2k-2)", move |x| {
                c * (1.0 - x).powf(c - 1.0)
            })
        }
        _ => WeightFunction::unavailable(model, branch),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_moments(model: &SpectrumModel, branch: Branch, top: usize, tol: f64) {
        let w = weight_for(model, branch);
        assert!(w.is_available());
        let t = model.moment_table(top).unwrap();
        let cfg = NumericsConfig::default();
        for n in 0..=top {
            let got = w.moment(n, &cfg).unwrap().unwrap().value;
            let want = t.log_moment(branch, n).exp();
            assert!(((got - want) / want).abs() < tol, "{} n={n}: {got} vs {want}", model.label());
        }
    }

    #[test]
    fn dual_weights_reproduce_moments() {
        for nu in [2.5, 3.0, 5.0] {
            check_moments(&SpectrumModel::poschl_teller(nu).unwrap(), Branch::Dual, 15, 1e-10);
        }
        check_moments(&SpectrumModel::infinite_well(), Branch::Dual, 15, 1e-10);
        for m in [3, 4, 8] {
            check_moments(&SpectrumModel::morse(m).unwrap(), Branch::Dual, m, 1e-8);
        }
    }

    #[test]
    fn other_registered_weights() {
        check_moments(&SpectrumModel::harmonic(), Branch::Gk, 15, 1e-10);
        check_moments(&SpectrumModel::su11_gp(1.5).unwrap(), Branch::Gk, 15, 1e-10);
        check_moments(&SpectrumModel::su11_bg(2.0).unwrap(), Branch::Dual, 15, 1e-10);
    }

    #[test]
    fn weights_are_non_negative() {
        let w = weight_for(&SpectrumModel::morse(4).unwrap(), Branch::Dual);
        assert!((0..1000).all(|i| w.eval(i as f64 * 0.1).unwrap() >= 0.0));
        assert_eq!(w.support_radius(), f64::INFINITY);
        let w = weight_for(&SpectrumModel::poschl_teller(3.0).unwrap(), Branch::Dual);
        assert!((0..=100).all(|i| w.eval(i as f64 * 0.01).unwrap() >= 0.0));
        assert_eq!(w.support_radius(), 1.0);
    }

    #[test]
    fn unavailable_weights() {
        let w = weight_for(&SpectrumModel::hydrogen(), Branch::Dual);
        assert_eq!(w.kind, WeightKind::Unavailable);
        assert!(w.moment(1, &NumericsConfig::default()).is_none());
        assert!(!weight_for(&SpectrumModel::poschl_teller(3.0).unwrap(), Branch::Gk).is_available());
    }
}
