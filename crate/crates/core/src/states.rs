//! Coherent-state families as normalized truncated Fock vectors.
//!
//! The GK family has coefficients `zⁿ e^{-iα e_n} / sqrt(ρ(n))` and the dual
//! family `zⁿ e^{-iα ε_n} / sqrt(μ(n))`. Amplitudes are assembled as
//! `exp(n ln|z| - ln m(n)/2 - ln N/2)` times a phase, so moments far beyond
//! `f64` range are fine.
//!
//! Truncation: terms `t_n = |z|^{2n}/m(n)` are accumulated until the
//! geometric bound `t_{N+1} / (1 - |z|²/E_{N+2})` on the remaining mass,
//! relative to the partial sum, falls below the tolerance. The bound relies
//! on the branch energies `E_n` being non-decreasing past `N`, which
//! validation guarantees for custom spectra. Finite-dimensional models are
//! summed exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GkError, Result};
use crate::numerics::cis_product;
use crate::spectra::{Branch, Radius, SpectrumModel};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gk,
    DualGk,
    EvenDual,
    OddDual,
    CatReal,
    CatImag,
    GeneralizedGk,
    GeneralizedDual,
}

impl Family {
    pub fn branch(self) -> Branch {
        match self {
            Family::Gk | Family::GeneralizedGk => Branch::Gk,
            _ => Branch::Dual,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Gk => "gk",
            Family::DualGk => "dual",
            Family::EvenDual => "even",
            Family::OddDual => "odd",
            Family::CatReal => "cat-real",
            Family::CatImag => "cat-imag",
            Family::GeneralizedGk => "generalized-gk",
            Family::GeneralizedDual => "generalized-dual",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = GkError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('_', "-").as_str() {
            "gk" => Family::Gk,
            "dual" | "dual-gk" | "dgk" => Family::DualGk,
            "even" | "even-dual" => Family::EvenDual,
            "odd" | "odd-dual" => Family::OddDual,
            "cat-real" => Family::CatReal,
            "cat-imag" => Family::CatImag,
            "generalized-gk" => Family::GeneralizedGk,
            "generalized-dual" => Family::GeneralizedDual,
            _ => return Err(GkError::Parse(format!("unknown family `{s}`"))),
        })
    }
}

/// Labels of a state. `J = |z|²` and `θ = arg z` are stored alongside `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateLabel {
    pub z: C64,
    pub j: f64,
    pub theta: f64,
    pub alpha: f64,
    pub family: Family,
    pub model: String,
    pub time: Option<f64>,
}

impl StateLabel {
    fn new(model: &SpectrumModel, family: Family, z: C64, alpha: f64, time: Option<f64>) -> Self {
        Self { z, j: z.norm_sqr(), theta: z.arg(), alpha, family, model: model.label(), time }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    /// Relative probability mass allowed beyond the cutoff.
    pub tail_tolerance: f64,
    /// Hard cap on the automatic cutoff.
    pub max_cutoff: usize,
    /// Use exactly this cutoff instead of growing one. The radius check is
    /// skipped and `tail_bound` only reports what was left out.
    pub fixed_cutoff: Option<usize>,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self { tail_tolerance: 1e-14, max_cutoff: 5000, fixed_cutoff: None }
    }
}

impl TruncationConfig {
    pub fn fixed(cutoff: usize) -> Self {
        Self { fixed_cutoff: Some(cutoff), ..Self::default() }
    }
}

/// Normalized state on `|0⟩..|N⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    pub amplitudes: Vec<C64>,
    pub label: StateLabel,
    /// The normalization constant `N(|z|²)` (or its analogue) used.
    pub norm_constant: f64,
    pub log_norm_constant: f64,
    /// Upper estimate of the probability mass beyond the cutoff.
    pub tail_bound: f64,
}

impl FockVector {
    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        photon_distribution(self)
    }

    /// Zero-padded copy with cutoff `n` (no-op if already at least `n`).
    pub fn padded(&self, n: usize) -> Self {
        let mut out = self.clone();
        if out.amplitudes.len() < n + 1 {
            out.amplitudes.resize(n + 1, C64::new(0.0, 0.0));
        }
        out
    }
}

/// One unnormalized amplitude as `ln|c|` and a phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogAmplitude {
    pub ln_abs: f64,
    pub phase: f64,
}

impl LogAmplitude {
    pub fn value(&self) -> C64 {
        if self.ln_abs == f64::NEG_INFINITY {
            C64::new(0.0, 0.0)
        } else {
            C64::from_polar(self.ln_abs.exp(), self.phase)
        }
    }
}

/// Summed series `Σ |z|^{2n}/m(n)` with the per-term logs kept.
#[derive(Debug, Clone)]
pub(crate) struct Series {
    /// `ln(|z|ⁿ / sqrt(m(n)))`.
    pub ln_abs: Vec<f64>,
    pub energies: Vec<f64>,
    pub ln_norm: f64,
    pub tail_bound: f64,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn check_custom(model: &SpectrumModel, branch: Branch) -> Result<()> {
    if model.name() != "custom" {
        return Ok(());
    }
    let cutoff = model.max_index().unwrap_or(2).max(2);
    let report = model.validate(cutoff)?;
    match report.describe_failure(branch) {
        Some(message) => Err(GkError::InvalidSpectrum { model: model.label(), message }),
        None => Ok(()),
    }
}

pub(crate) fn series(model: &SpectrumModel, branch: Branch, modulus: f64, cfg: &TruncationConfig) -> Result<Series> {
    if !(modulus >= 0.0) || !modulus.is_finite() {
        return Err(GkError::Domain(format!("|z| must be finite, got {modulus}")));
    }
    check_custom(model, branch)?;
    let max_index = model.max_index();
    if let (Some(fixed), Some(max)) = (cfg.fixed_cutoff, max_index) {
        if fixed > max {
            return Err(GkError::IndexOutOfRange { model: model.label(), index: fixed, max });
        }
    }
    if cfg.fixed_cutoff.is_none() {
        let radius = model.convergence_radius(branch)?;
        if modulus >= radius.admissible() {
            let r = match radius {
                Radius::Finite(r) => r,
                _ => f64::INFINITY,
            };
            return Err(GkError::OutsideRadius {
                model: model.label(),
                branch: branch.to_string(),
                modulus,
                radius: r,
            });
        }
    }

    let ln_r = modulus.ln();
    let ln_x = 2.0 * ln_r;
    let term_ln_abs = |n: usize, ln_m: f64| if n == 0 { -0.5 * ln_m } else { n as f64 * ln_r - 0.5 * ln_m };

    let mut ln_abs = vec![0.0];
    let mut energies = vec![0.0];
    let mut ln_m = 0.0;
    let mut ln_sum = 0.0;
    let mut n = 0usize;

    let stop_at = cfg.fixed_cutoff.or(max_index);
    if modulus == 0.0 {
        let len = stop_at.map_or(1, |s| s + 1);
        let mut ln_abs = vec![f64::NEG_INFINITY; len];
        ln_abs[0] = 0.0;
        let energies = (0..len).map(|k| model.energy(branch, k)).collect::<Result<_>>()?;
        return Ok(Series { ln_abs, energies, ln_norm: 0.0, tail_bound: 0.0 });
    }

    let tail_estimate = |n: usize, ln_t: f64, ln_sum: f64| -> Result<f64> {
        // ln t_{n+1} = ln t_n + ln x - ln E_{n+1}
        let ln_next = ln_t + ln_x - model.ln_energy(branch, n + 1)?;
        let ratio = (ln_x - model.ln_energy(branch, n + 2)?).exp();
        if ratio >= 1.0 {
            return Ok(f64::INFINITY);
        }
        Ok((ln_next - ln_sum - (1.0 - ratio).ln()).exp())
    };

    loop {
        if let Some(s) = stop_at {
            if n == s {
                let tail_bound = if max_index == Some(n) {
                    0.0
                } else {
                    tail_estimate(n, 2.0 * ln_abs[n], ln_sum)?
                };
                return Ok(Series { ln_abs, energies, ln_norm: ln_sum, tail_bound });
            }
        } else {
            let tail = tail_estimate(n, 2.0 * ln_abs[n], ln_sum)?;
            if tail <= cfg.tail_tolerance {
                return Ok(Series { ln_abs, energies, ln_norm: ln_sum, tail_bound: tail });
            }
            if n >= cfg.max_cutoff {
                return Err(GkError::TruncationCap { tolerance: cfg.tail_tolerance, cap: cfg.max_cutoff });
            }
        }
        n += 1;
        ln_m += model.ln_energy(branch, n)?;
        let la = term_ln_abs(n, ln_m);
        ln_abs.push(la);
        energies.push(model.energy(branch, n)?);
        ln_sum = log_add(ln_sum, 2.0 * la);
    }
}

fn coherent(
    model: &SpectrumModel,
    family: Family,
    z: C64,
    alpha: f64,
    time: Option<f64>,
    cfg: &TruncationConfig,
) -> Result<FockVector> {
    let branch = family.branch();
    let s = series(model, branch, z.norm(), cfg)?;
    let theta = z.arg();
    let half_norm = 0.5 * s.ln_norm;
    let amplitudes = s
        .ln_abs
        .iter()
        .zip(&s.energies)
        .enumerate()
        .map(|(n, (&la, &e))| {
            if la == f64::NEG_INFINITY {
                C64::new(0.0, 0.0)
            } else {
                C64::from_polar((la - half_norm).exp(), n as f64 * theta) * cis_product(-alpha, e)
            }
        })
        .collect();
    Ok(FockVector {
        amplitudes,
        label: StateLabel::new(model, family, z, alpha, time),
        norm_constant: s.ln_norm.exp(),
        log_norm_constant: s.ln_norm,
        tail_bound: s.tail_bound,
    })
}

/// `|z, α⟩ ∝ Σ zⁿ e^{-iα e_n} / sqrt(ρ(n)) |n⟩`.
pub fn gkcs(model: &SpectrumModel, z: C64, alpha: f64, cfg: &TruncationConfig) -> Result<FockVector> {
    coherent(model, Family::Gk, z, alpha, None, cfg)
}

/// Dual family `Σ zⁿ e^{-iα ε_n} / sqrt(μ(n)) |n⟩`.
pub fn dgkcs(model: &SpectrumModel, z: C64, alpha: f64, cfg: &TruncationConfig) -> Result<FockVector> {
    coherent(model, Family::DualGk, z, alpha, None, cfg)
}

/// Branch-generic constructor (GK or dual).
pub fn coherent_state(model: &SpectrumModel, branch: Branch, z: C64, alpha: f64, cfg: &TruncationConfig) -> Result<FockVector> {
    match branch {
        Branch::Gk => gkcs(model, z, alpha, cfg),
        Branch::Dual => dgkcs(model, z, alpha, cfg),
    }
}

/// Series value of `N(x) = Σ xⁿ/ρ(n)` (or `Ñ` with `μ`).
pub fn normalization(model: &SpectrumModel, x: f64, branch: Branch, cfg: &TruncationConfig) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(GkError::Domain(format!("normalization needs x = |z|^2 >= 0, got {x}")));
    }
    Ok(series(model, branch, x.sqrt(), cfg)?.ln_norm.exp())
}

/// `⟨a|b⟩ = Σ conj(a_n) b_n`; the shorter vector is zero-padded.
pub fn overlap(a: &FockVector, b: &FockVector) -> Result<C64> {
    if a.label.model != b.label.model {
        return Err(GkError::ModelMismatch { left: a.label.model.clone(), right: b.label.model.clone() });
    }
    Ok(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum())
}

pub fn photon_distribution(s: &FockVector) -> Vec<f64> {
    s.amplitudes.iter().map(|c| c.norm_sqr()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

/// Even (odd) dual states `∝ |z̃,α⟩ ± |-z̃,α⟩`, built by superposing the
/// dual amplitudes. `|-z⟩` is obtained from `|z⟩` by the exact sign flip
/// `(-1)ⁿ`, so the unwanted parity is exactly zero.
pub fn even_odd(model: &SpectrumModel, z: C64, alpha: f64, parity: Parity, cfg: &TruncationConfig) -> Result<FockVector> {
    let base = dgkcs(model, z, alpha, cfg)?;
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let combined: Vec<C64> = base
        .amplitudes
        .iter()
        .enumerate()
        .map(|(n, &c)| {
            let flipped = if n % 2 == 1 { -c } else { c };
            c + flipped * sign
        })
        .collect();
    let family = match parity {
        Parity::Even => Family::EvenDual,
        Parity::Odd => Family::OddDual,
    };
    finish_superposition(model, family, base, combined, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatKind {
    Real,
    Imaginary,
}

/// Real (imaginary) cat states `∝ |z̃,α⟩ ± |z̃*,α⟩`. The stored
/// normalization constant is `Σ r^{2n} cos²(nθ)/μ(n)` (resp. `sin²`).
pub fn cat(model: &SpectrumModel, z: C64, alpha: f64, kind: CatKind, cfg: &TruncationConfig) -> Result<FockVector> {
    let a = dgkcs(model, z, alpha, cfg)?;
    let b = dgkcs(model, z.conj(), alpha, cfg)?;
    let sign = match kind {
        CatKind::Real => 1.0,
        CatKind::Imaginary => -1.0,
    };
    let combined: Vec<C64> = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x + y * sign).collect();
    let family = match kind {
        CatKind::Real => Family::CatReal,
        CatKind::Imaginary => Family::CatImag,
    };
    finish_superposition(model, family, a, combined, 0.25)
}

fn finish_superposition(
    model: &SpectrumModel,
    family: Family,
    base: FockVector,
    combined: Vec<C64>,
    constant_scale: f64,
) -> Result<FockVector> {
    let norm_sq: f64 = combined.iter().map(|c| c.norm_sqr()).sum();
    if !(norm_sq.sqrt() > 1e-12) {
        return Err(GkError::ZeroNorm(format!("{family} superposition at z={} vanishes", base.label.z)));
    }
    let inv = 1.0 / norm_sq.sqrt();
    let log_norm = base.log_norm_constant + (norm_sq * constant_scale).ln();
    Ok(FockVector {
        amplitudes: combined.into_iter().map(|c| c * inv).collect(),
        label: StateLabel::new(model, family, base.label.z, base.label.alpha, None),
        norm_constant: log_norm.exp(),
        log_norm_constant: log_norm,
        tail_bound: base.tail_bound / norm_sq,
    })
}

/// Nonlinear coherent states with time-stable phases for the deformation encoded
/// in `model` (`e_n = n f²(n)`, see [`SpectrumModel::from_nonlinearity`]):
/// coefficients `zⁿ e^{-iα e_n} / (sqrt(n!) [f(n)]!)`, or for `dual` the
/// Roy-type `zⁿ [f(n)]! e^{-iα ε_n} / sqrt(n!)`. At `α = 0` these are the
/// ordinary nonlinear coherent states.
pub fn temporally_stable_nonlinear(
    model: &SpectrumModel,
    z: C64,
    alpha: f64,
    dual: bool,
    cfg: &TruncationConfig,
) -> Result<FockVector> {
    coherent_state(model, if dual { Branch::Dual } else { Branch::Gk }, z, alpha, cfg)
}

/// `|J, θ, t⟩ = e^{-iĤt}|J, θ⟩`, amplitudes `∝ J^{n/2} e^{inθ} e^{-iω E_n t} / sqrt(m(n))`.
pub fn generalized_gkcs(
    model: &SpectrumModel,
    j: f64,
    theta: f64,
    t: f64,
    branch: Branch,
    cfg: &TruncationConfig,
) -> Result<FockVector> {
    if !(j >= 0.0) {
        return Err(GkError::Domain(format!("J must be >= 0, got {j}")));
    }
    let family = match branch {
        Branch::Gk => Family::GeneralizedGk,
        Branch::Dual => Family::GeneralizedDual,
    };
    let z = C64::from_polar(j.sqrt(), theta);
    let mut s = coherent(model, family, z, model.omega() * t, Some(t), cfg)?;
    s.label.j = j;
    s.label.theta = theta;
    Ok(s)
}

/// Unnormalized amplitudes `zⁿ e^{-iα E_n} / sqrt(m(n))` on `0..=cutoff`.
pub fn unnormalized_log_amplitudes(
    model: &SpectrumModel,
    branch: Branch,
    z: C64,
    alpha: f64,
    cutoff: usize,
) -> Result<Vec<LogAmplitude>> {
    let table = model.moment_table(cutoff)?;
    let ln_r = z.norm().ln();
    let theta = z.arg();
    Ok((0..=cutoff)
        .map(|n| {
            let ln_abs = if n == 0 {
                0.0
            } else if z.norm() == 0.0 {
                f64::NEG_INFINITY
            } else {
                n as f64 * ln_r - 0.5 * table.log_moment(branch, n)
            };
            LogAmplitude { ln_abs, phase: n as f64 * theta - alpha * table.energy(branch, n) }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg() -> TruncationConfig {
        TruncationConfig::default()
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    fn max_diff(a: &[C64], b: &[C64]) -> f64 {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or_default();
                let y = b.get(i).copied().unwrap_or_default();
                (x - y).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn canonical_coherent_state() {
        let s = gkcs(&SpectrumModel::harmonic(), C64::new(1.0, 0.0), 0.0, &cfg()).unwrap();
        for (n, c) in s.amplitudes.iter().enumerate() {
            let want = (-0.5f64).exp() / factorial(n).sqrt();
            assert!((c - want).norm() < 1e-15, "n={n}");
        }
        assert!(s.tail_bound <= 1e-14);
        assert_relative_eq!(s.norm_constant, 1f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn canonical_with_phase() {
        let s = gkcs(&SpectrumModel::harmonic(), C64::new(1.0, 0.0), 0.3, &cfg()).unwrap();
        for (n, c) in s.amplitudes.iter().enumerate() {
            let want = C64::from_polar((-0.5f64).exp() / factorial(n).sqrt(), -0.3 * n as f64);
            assert!((c - want).norm() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn morse_is_finite() {
        let m = SpectrumModel::morse(4).unwrap();
        let s = gkcs(&m, C64::new(2.0, 0.0), 0.0, &cfg()).unwrap();
        assert_eq!(s.amplitudes.len(), 5);
        assert_eq!(s.tail_bound, 0.0);
        let t = m.moment_table(4).unwrap();
        let w: Vec<f64> = (0..=4).map(|n| 4f64.powi(n as i32) / t.rho(n)).collect();
        let total: f64 = w.iter().sum();
        for (p, w) in s.probabilities().iter().zip(&w) {
            assert_relative_eq!(*p, w / total, max_relative = 1e-13);
        }
    }

    #[test]
    fn dual_examples() {
        let h = SpectrumModel::harmonic();
        let z = C64::new(0.7, -0.4);
        let a = gkcs(&h, z, 1.3, &cfg()).unwrap();
        let b = dgkcs(&h, z, 1.3, &cfg()).unwrap();
        assert_eq!(a.amplitudes, b.amplitudes);

        let well = SpectrumModel::infinite_well();
        let s = dgkcs(&well, C64::new(0.5, 0.0), 0.0, &cfg()).unwrap();
        assert_relative_eq!(s.amplitudes[0].norm_sqr(), 0.421_875, max_relative = 1e-12);

        let pt = SpectrumModel::poschl_teller(3.0).unwrap();
        let s = dgkcs(&pt, C64::new(0.5, 0.0), 0.0, &cfg()).unwrap();
        let p = s.probabilities();
        assert_relative_eq!(p[1] / p[0], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn radius_rejection() {
        let pt = SpectrumModel::poschl_teller(3.0).unwrap();
        assert!(matches!(dgkcs(&pt, C64::new(0.99, 0.0), 0.0, &cfg()), Err(GkError::OutsideRadius { .. })));
        assert!(matches!(gkcs(&SpectrumModel::hydrogen(), C64::new(1.0, 0.0), 0.0, &cfg()), Err(GkError::OutsideRadius { .. })));
        assert!(dgkcs(&pt, C64::new(0.9, 0.0), 0.0, &cfg()).is_ok());
        // finite-dimensional models accept any z
        assert!(dgkcs(&SpectrumModel::morse(3).unwrap(), C64::new(50.0, 3.0), 0.0, &cfg()).is_ok());
    }

    #[test]
    fn truncation_cap() {
        let tight = TruncationConfig { max_cutoff: 10, ..cfg() };
        let r = dgkcs(&SpectrumModel::poschl_teller(3.0).unwrap(), C64::new(0.9, 0.0), 0.0, &tight);
        assert!(matches!(r, Err(GkError::TruncationCap { cap: 10, .. })));
    }

    #[test]
    fn normalization_examples() {
        let pt = SpectrumModel::poschl_teller(3.0).unwrap();
        assert_relative_eq!(normalization(&pt, 0.5, Branch::Dual, &cfg()).unwrap(), 16.0, max_relative = 1e-12);
        let morse = SpectrumModel::morse(4).unwrap();
        assert_relative_eq!(normalization(&morse, 3.0, Branch::Dual, &cfg()).unwrap(), 5.0625, max_relative = 1e-13);
        for m in crate::spectra::catalog_models() {
            for b in [Branch::Gk, Branch::Dual] {
                assert_eq!(normalization(&m, 0.0, b, &cfg()).unwrap(), 1.0);
            }
        }
        // hydrogen dual at x = 1: (2 I₁(2) + I₂(2))/2, by an independent Bessel series
        let i1 = 1.590_636_854_637_329_1;
        let i2 = 0.688_948_447_698_738_2;
        let got = normalization(&SpectrumModel::hydrogen(), 1.0, Branch::Dual, &cfg()).unwrap();
        assert_relative_eq!(got, 0.5 * (2.0 * i1 + i2), max_relative = 1e-12);
    }

    #[test]
    fn overlap_examples() {
        let well = SpectrumModel::infinite_well();
        let a = dgkcs(&well, C64::new(0.3, 0.0), 0.0, &cfg()).unwrap();
        let b = dgkcs(&well, C64::new(0.5, 0.0), 0.0, &cfg()).unwrap();
        assert_relative_eq!(overlap(&a, &a).unwrap().re, 1.0, max_relative = 1e-13);
        let want = (0.91f64 * 0.75).powf(1.5) / 0.85f64.powi(3);
        // `a` stops earlier than `b`, which costs about 1e-11
        assert_relative_eq!(overlap(&a, &b).unwrap().re, want, max_relative = 1e-10);
        let common = TruncationConfig::fixed(b.cutoff());
        let a2 = dgkcs(&well, C64::new(0.3, 0.0), 0.0, &common).unwrap();
        assert_relative_eq!(overlap(&a2, &b).unwrap().re, want, max_relative = 1e-13);
        assert_relative_eq!(want, 0.918_115_261, max_relative = 1e-8);
        let c = gkcs(&SpectrumModel::harmonic(), C64::new(0.3, 0.0), 0.0, &cfg()).unwrap();
        assert!(matches!(overlap(&a, &c), Err(GkError::ModelMismatch { .. })));
    }

    #[test]
    fn distribution_examples() {
        let well = SpectrumModel::infinite_well();
        let s = dgkcs(&well, C64::new(0.5f64.sqrt(), 0.0), 0.0, &cfg()).unwrap();
        assert_relative_eq!(s.probabilities()[0], 0.125, max_relative = 1e-12);
        let h = gkcs(&SpectrumModel::harmonic(), C64::new(1.0, 0.0), 0.0, &cfg()).unwrap();
        for (n, p) in h.probabilities().iter().enumerate() {
            assert_relative_eq!(*p, (-1f64).exp() / factorial(n), max_relative = 1e-13);
        }
        let a = dgkcs(&well, C64::new(0.4, 0.3), 0.0, &cfg()).unwrap();
        let b = dgkcs(&well, C64::new(0.4, 0.3), 2.7, &cfg()).unwrap();
        for (x, y) in a.probabilities().iter().zip(b.probabilities()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn even_odd_states() {
        let well = SpectrumModel::infinite_well();
        let odd = even_odd(&well, C64::new(0.5, 0.2), 0.4, Parity::Odd, &cfg()).unwrap();
        assert!(odd.probabilities().iter().step_by(2).all(|&p| p == 0.0));
        let even = even_odd(&well, C64::new(0.5, 0.2), 0.4, Parity::Even, &cfg()).unwrap();
        assert!(even.probabilities().iter().skip(1).step_by(2).all(|&p| p == 0.0));
        assert_relative_eq!(even.norm(), 1.0, max_relative = 1e-13);

        // harmonic even state at z = 1: p_{2n} = 1/((2n)! cosh 1)
        let h = even_odd(&SpectrumModel::harmonic(), C64::new(1.0, 0.0), 0.0, Parity::Even, &cfg()).unwrap();
        for (n, p) in h.probabilities().iter().enumerate().step_by(2) {
            assert_relative_eq!(*p, 1.0 / (factorial(n) * 1f64.cosh()), max_relative = 1e-13);
        }
        assert!(matches!(
            even_odd(&well, C64::new(0.0, 0.0), 0.0, Parity::Odd, &cfg()),
            Err(GkError::ZeroNorm(_))
        ));
    }

    #[test]
    fn cat_states() {
        let well = SpectrumModel::infinite_well();
        let r = 0.4;
        let real0 = cat(&well, C64::new(r, 0.0), 0.3, CatKind::Real, &cfg()).unwrap();
        let base = dgkcs(&well, C64::new(r, 0.0), 0.3, &cfg()).unwrap();
        assert!(max_diff(&real0.amplitudes, &base.amplitudes) < 1e-13);
        assert!(matches!(
            cat(&well, C64::new(r, 0.0), 0.3, CatKind::Imaginary, &cfg()),
            Err(GkError::ZeroNorm(_))
        ));

        // θ = π/2: sin(mπ/2) = 0 for even m
        let z = C64::from_polar(r, std::f64::consts::FRAC_PI_2);
        let im = cat(&well, z, 0.0, CatKind::Imaginary, &cfg()).unwrap();
        for (m, c) in im.amplitudes.iter().enumerate() {
            if m % 2 == 0 {
                assert!(c.norm() < 1e-15, "m={m}: {c}");
            }
        }
        // stored normalization is Σ r^{2n} cos²(nθ)/μ(n)
        let theta = 1.1;
        let z = C64::from_polar(r, theta);
        let s = cat(&well, z, 0.0, CatKind::Real, &cfg()).unwrap();
        let t = well.moment_table(s.cutoff()).unwrap();
        let want: f64 = (0..=s.cutoff()).map(|n| r.powi(2 * n as i32) * (n as f64 * theta).cos().powi(2) / t.mu(n)).sum();
        assert_relative_eq!(s.norm_constant, want, max_relative = 1e-12);
    }

    #[test]
    fn nonlinear_states() {
        let z = C64::new(0.8, 0.1);
        let unit = SpectrumModel::from_nonlinearity("unit", |_| 1.0);
        let canonical = gkcs(&SpectrumModel::harmonic(), z, 0.0, &cfg()).unwrap();
        for dual in [false, true] {
            let s = temporally_stable_nonlinear(&unit, z, 0.0, dual, &cfg()).unwrap();
            assert!(max_diff(&s.amplitudes, &canonical.amplitudes) < 1e-14);
        }

        // f(n) = q^{1-n}: amplitudes ∝ q^{n(n-1)/2} zⁿ/sqrt(n!)
        for q in [0.9f64, 1.1] {
            let ps = SpectrumModel::from_nonlinearity("ps", move |n| q.powf(1.0 - n as f64));
            let z = C64::new(0.6, 0.0);
            let s = temporally_stable_nonlinear(&ps, z, 0.0, false, &TruncationConfig::fixed(12)).unwrap();
            let raw: Vec<f64> = (0..=12usize).map(|n| q.powf((n * n.saturating_sub(1)) as f64 / 2.0) * 0.6f64.powi(n as i32) / factorial(n).sqrt()).collect();
            let ratio = s.amplitudes[0].re / raw[0];
            for (c, w) in s.amplitudes.iter().zip(&raw) {
                assert_relative_eq!(c.re, w * ratio, max_relative = 1e-12);
            }
        }
        // q > 1 has zero radius: no automatic cutoff exists
        let ps = SpectrumModel::penson_solomon(1.1).unwrap();
        assert!(gkcs(&ps, C64::new(0.6, 0.0), 0.0, &cfg()).is_err());

        // GP type: phase of c_n is -α n/(n+1) at κ = 1
        let gp = SpectrumModel::su11_gp(1.0).unwrap();
        let s = temporally_stable_nonlinear(&gp, C64::new(0.5, 0.0), 0.5, false, &cfg()).unwrap();
        for (n, c) in s.amplitudes.iter().enumerate() {
            let want = -0.5 * n as f64 / (n as f64 + 1.0);
            assert!((c.arg() - want).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn generalized_states() {
        let well = SpectrumModel::infinite_well();
        let j = 0.4;
        let at0 = generalized_gkcs(&well, j, 0.0, 0.0, Branch::Gk, &cfg()).unwrap();
        let kps = gkcs(&well, C64::new(j.sqrt(), 0.0), 0.0, &cfg()).unwrap();
        assert!(max_diff(&at0.amplitudes, &kps.amplitudes) < 1e-15);
        let t = 0.8;
        let g = generalized_gkcs(&well, j, 0.0, t, Branch::Gk, &cfg()).unwrap();
        let s = gkcs(&well, C64::new(j.sqrt(), 0.0), t, &cfg()).unwrap();
        assert!(max_diff(&g.amplitudes, &s.amplitudes) < 1e-12);

        // ⟨J,θ,t|Ĥ|J,θ,t⟩ = ωJ
        let g = generalized_gkcs(&well, j, 1.2, 0.7, Branch::Gk, &cfg()).unwrap();
        let mean: f64 = g.probabilities().iter().enumerate().map(|(n, p)| p * (n * (n + 2)) as f64).sum();
        // the truncated mean falls short by the mass of the last kept level
        assert_relative_eq!(mean, j, max_relative = 1e-10);
        assert_eq!(g.label.j, j);
        assert_eq!(g.label.time, Some(0.7));
    }

    #[test]
    fn custom_validation_gates_construction() {
        let bad = SpectrumModel::custom(vec![0.0, 2.0, 1.0, 3.0]).unwrap();
        assert!(matches!(gkcs(&bad, C64::new(0.5, 0.0), 0.0, &cfg()), Err(GkError::InvalidSpectrum { .. })));
        let good = SpectrumModel::custom(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let s = gkcs(&good, C64::new(0.5, 0.0), 0.0, &cfg()).unwrap();
        assert_eq!(s.cutoff(), 3);
    }

    #[test]
    fn unnormalized_amplitudes_match_state() {
        let pt = SpectrumModel::poschl_teller(3.0).unwrap();
        let z = C64::new(0.5, 0.5);
        let s = dgkcs(&pt, z, 0.9, &cfg()).unwrap();
        let eta = unnormalized_log_amplitudes(&pt, Branch::Dual, z, 0.9, s.cutoff()).unwrap();
        let scale = s.norm_constant.sqrt();
        for (c, e) in s.amplitudes.iter().zip(&eta) {
            assert!((c * scale - e.value()).norm() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn states_are_normalized(re in -0.9f64..0.9, im in -0.4f64..0.4, alpha in -5.0f64..5.0, which in 0usize..5) {
            let models = [
                SpectrumModel::harmonic(),
                SpectrumModel::poschl_teller(3.0).unwrap(),
                SpectrumModel::infinite_well(),
                SpectrumModel::morse(4).unwrap(),
                SpectrumModel::hydrogen(),
            ];
            let m = &models[which];
            let z = C64::new(re, im);
            for b in [Branch::Gk, Branch::Dual] {
                let s = coherent_state(m, b, z, alpha, &TruncationConfig::default()).unwrap();
                prop_assert!((s.norm() - 1.0).abs() < 1e-12);
                prop_assert!(s.tail_bound <= 1e-14);
                // α only moves phases
                let s0 = coherent_state(m, b, z, 0.0, &TruncationConfig::default()).unwrap();
                for (p, q) in s.probabilities().iter().zip(s0.probabilities()) {
                    prop_assert!((p - q).abs() < 1e-15);
                }
            }
        }

        #[test]
        fn overlap_is_hermitian(a in -0.8f64..0.8, b in -0.8f64..0.8, c in -0.5f64..0.5, d in 0.0f64..3.0) {
            let m = SpectrumModel::infinite_well();
            let s = dgkcs(&m, C64::new(a, c), d, &TruncationConfig::default()).unwrap();
            let t = dgkcs(&m, C64::new(b, -c), 0.3, &TruncationConfig::default()).unwrap();
            let st = overlap(&s, &t).unwrap();
            let ts = overlap(&t, &s).unwrap();
            prop_assert!((st - ts.conj()).norm() < 1e-14);
        }
    }
}
