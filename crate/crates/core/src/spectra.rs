//! Catalog of physical spectra `e_n`, their duals `ε_n = n²/e_n`, and the
//! factorial moments `ρ(n) = [e_n]!`, `μ(n) = [ε_n]! = (n!)²/ρ(n)`.
//!
//! Every catalog Hamiltonian is shifted so that `e_0 = 0`. Moments are kept
//! in the log domain: hydrogen's `μ(n) = 2 n! (n+1)! / (n+2)` overflows an
//! `f64` well before `n = 170`.
//!
//! The SU(1,1) entries use the factorial-moment convention
//! `ρ_GP(n) = n! Γ(2κ) / Γ(n+2κ)`, i.e. `e_n = n/(n+2κ-1)`. The familiar
//! Gilmore-Perelomov coefficient `[n!/Γ(n+2κ)]^{1/2}` differs from this by
//! the constant `Γ(2κ)`, which is absorbed into the normalization, so the
//! normalized states are identical. The Barut-Girardello entry is the dual:
//! `e_n = n(n+2κ-1)`.
//!
//! Morse is finite dimensional with levels `n = 0..=M`: `μ(n)⁻¹` vanishes past
//! `M` and `ε_{M+1}` is singular.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GkError, Result};
use crate::numerics::special::ln_factorial;
use crate::C64;

/// Which member of a dual pair: the GK family built on
/// `(e_n, ρ)` or its dual built on `(ε_n, μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Gk,
    Dual,
}

impl Branch {
    pub fn other(self) -> Self {
        match self {
            Branch::Gk => Branch::Dual,
            Branch::Dual => Branch::Gk,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Gk => "gk",
            Branch::Dual => "dual",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

type Deformation = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Law {
    Harmonic,
    PoschlTeller { nu: f64 },
    InfiniteWell,
    Morse { m: usize },
    Hydrogen,
    PensonSolomon { q: f64 },
    Su11Gp { kappa: f64 },
    Su11Bg { kappa: f64 },
    Custom { e: Arc<[f64]> },
    Deformed { label: String, f: Deformation },
}

/// A named, non-degenerate eigenvalue sequence `e_n` with `e_0 = 0`.
#[derive(Clone)]
pub struct SpectrumModel {
    law: Law,
    omega: f64,
}

impl fmt::Debug for SpectrumModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectrumModel").field("label", &self.label()).finish()
    }
}

impl PartialEq for SpectrumModel {
    fn eq(&self, other: &Self) -> bool {
        if self.omega != other.omega {
            return false;
        }
        match (&self.law, &other.law) {
            (Law::Custom { e: a }, Law::Custom { e: b }) => a == b,
            (Law::Deformed { label: la, f: fa }, Law::Deformed { label: lb, f: fb }) => {
                la == lb && Arc::ptr_eq(fa, fb)
            }
            _ => self.label() == other.label(),
        }
    }
}

/// On-disk form of a custom spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomSpectrumFile {
    pub e: Vec<f64>,
    #[serde(default = "one")]
    pub omega: f64,
}

fn one() -> f64 {
    1.0
}

fn invalid(model: &str, message: impl Into<String>) -> GkError {
    GkError::InvalidParameter { model: model.to_string(), message: message.into() }
}

impl SpectrumModel {
    pub fn harmonic() -> Self {
        Self { law: Law::Harmonic, omega: 1.0 }
    }

    pub fn poschl_teller(nu: f64) -> Result<Self> {
        if !(nu > 2.0) || !nu.is_finite() {
            return Err(invalid("poschl_teller", format!("requires nu > 2, got nu={nu}")));
        }
        Ok(Self { law: Law::PoschlTeller { nu }, omega: 1.0 })
    }

    pub fn infinite_well() -> Self {
        Self { law: Law::InfiniteWell, omega: 1.0 }
    }

    pub fn morse(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(invalid("morse", "requires integer M >= 1"));
        }
        Ok(Self { law: Law::Morse { m }, omega: 1.0 })
    }

    pub fn hydrogen() -> Self {
        Self { law: Law::Hydrogen, omega: 1.0 }
    }

    pub fn penson_solomon(q: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(invalid("penson_solomon", format!("requires q > 0, got q={q}")));
        }
        Ok(Self { law: Law::PensonSolomon { q }, omega: 1.0 })
    }

    pub fn su11_gp(kappa: f64) -> Result<Self> {
        check_kappa("su11_gp", kappa)?;
        Ok(Self { law: Law::Su11Gp { kappa }, omega: 1.0 })
    }

    pub fn su11_bg(kappa: f64) -> Result<Self> {
        check_kappa("su11_bg", kappa)?;
        Ok(Self { law: Law::Su11Bg { kappa }, omega: 1.0 })
    }

    /// A finite table `e_0..e_{len-1}`. Only `e_0 = 0` and finiteness are
    /// enforced here; ordering is left to [`SpectrumModel::validate`].
    pub fn custom(e: Vec<f64>) -> Result<Self> {
        if e.is_empty() {
            return Err(invalid("custom", "eigenvalue table is empty"));
        }
        if e[0] != 0.0 {
            return Err(invalid("custom", format!("e_0 must be 0, got {}", e[0])));
        }
        if let Some(i) = e.iter().position(|v| !v.is_finite()) {
            return Err(invalid("custom", format!("e_{i} is not finite")));
        }
        Ok(Self { law: Law::Custom { e: e.into() }, omega: 1.0 })
    }

    pub fn custom_from_json(text: &str) -> Result<Self> {
        let file: CustomSpectrumFile = serde_json::from_str(text)?;
        Self::custom(file.e)?.with_omega(file.omega)
    }

    /// Spectrum `e_n = n f²(n)` of an f-deformed oscillator.
    pub fn from_nonlinearity(label: impl Into<String>, f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        Self { law: Law::Deformed { label: label.into(), f: Arc::new(f) }, omega: 1.0 }
    }

    pub fn with_omega(mut self, omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(invalid(self.name(), format!("omega must be positive, got {omega}")));
        }
        self.omega = omega;
        Ok(self)
    }

    /// Parse `name[:key=value[,key=value]...]`, e.g. `poschl_teller:nu=3`,
    /// `morse:M=4`, `custom:file=spec.json` or an inline table
    /// `custom:[0,2,1,3]`. `omega=` is accepted by every model.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let bad = |message: String| GkError::ModelSpec { spec: spec.to_string(), message };
        if let Some(table) = spec.trim().strip_prefix("custom:").filter(|r| r.trim_start().starts_with('[')) {
            let e: Vec<f64> = serde_json::from_str(table).map_err(|err| bad(format!("bad eigenvalue array: {err}")))?;
            return Self::custom(e);
        }
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (spec.trim(), ""),
        };
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        if !rest.is_empty() {
            for part in rest.split(',') {
                let (k, v) = part.split_once('=').ok_or_else(|| bad(format!("expected key=value, got `{part}`")))?;
                kv.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let mut take_f64 = |key: &str| -> Result<Option<f64>> {
            match kv.remove(key) {
                None => Ok(None),
                Some(v) => v.parse::<f64>().map(Some).map_err(|_| bad(format!("`{key}` is not a number: `{v}`"))),
            }
        };
        let omega = take_f64("omega")?;
        let model = match name {
            "harmonic" => Self::harmonic(),
            "poschl_teller" => Self::poschl_teller(take_f64("nu")?.ok_or_else(|| bad("missing nu".into()))?)?,
            "infinite_well" => Self::infinite_well(),
            "morse" => {
                let m = match take_f64("M")? {
                    Some(m) => Some(m),
                    None => take_f64("m")?,
                }
                .ok_or_else(|| bad("missing M".into()))?;
                if m.fract() != 0.0 || m < 1.0 {
                    return Err(invalid("morse", format!("requires integer M >= 1, got M={m}")));
                }
                Self::morse(m as usize)?
            }
            "hydrogen" => Self::hydrogen(),
            "penson_solomon" => Self::penson_solomon(take_f64("q")?.ok_or_else(|| bad("missing q".into()))?)?,
            "su11_gp" => Self::su11_gp(take_f64("kappa")?.ok_or_else(|| bad("missing kappa".into()))?)?,
            "su11_bg" => Self::su11_bg(take_f64("kappa")?.ok_or_else(|| bad("missing kappa".into()))?)?,
            "custom" => {
                let path = kv.remove("file").ok_or_else(|| bad("custom spectra need file=<path.json>".into()))?;
                let text = std::fs::read_to_string(&path)?;
                Self::custom_from_json(&text)?
            }
            other => return Err(GkError::UnknownModel(other.to_string())),
        };
        if let Some(k) = kv.keys().next() {
            return Err(bad(format!("unknown parameter `{k}` for {name}")));
        }
        match omega {
            Some(w) => model.with_omega(w),
            None => Ok(model),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.law {
            Law::Harmonic => "harmonic",
            Law::PoschlTeller { .. } => "poschl_teller",
            Law::InfiniteWell => "infinite_well",
            Law::Morse { .. } => "morse",
            Law::Hydrogen => "hydrogen",
            Law::PensonSolomon { .. } => "penson_solomon",
            Law::Su11Gp { .. } => "su11_gp",
            Law::Su11Bg { .. } => "su11_bg",
            Law::Custom { .. } => "custom",
            Law::Deformed { .. } => "deformed",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut p = BTreeMap::new();
        match &self.law {
            Law::PoschlTeller { nu } => {
                p.insert("nu".into(), *nu);
            }
            Law::Morse { m } => {
                p.insert("M".into(), *m as f64);
            }
            Law::PensonSolomon { q } => {
                p.insert("q".into(), *q);
            }
            Law::Su11Gp { kappa } | Law::Su11Bg { kappa } => {
                p.insert("kappa".into(), *kappa);
            }
            Law::Custom { e } => {
                p.insert("levels".into(), e.len() as f64);
            }
            _ => {}
        }
        p
    }

    /// Canonical spec string, parseable by [`SpectrumModel::from_spec`] for
    /// catalog models.
    pub fn label(&self) -> String {
        let mut s = match &self.law {
            Law::Deformed { label, .. } => format!("deformed:{label}"),
            _ => {
                let params = self.params();
                if params.is_empty() {
                    self.name().to_string()
                } else {
                    let kv: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    format!("{}:{}", self.name(), kv.join(","))
                }
            }
        };
        if self.omega != 1.0 {
            s.push_str(if s.contains(':') { "," } else { ":" });
            s.push_str(&format!("omega={}", self.omega));
        }
        s
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Hilbert-space dimension for finite models (Morse: `M + 1`).
    pub fn dimension(&self) -> Option<usize> {
        match &self.law {
            Law::Morse { m } => Some(m + 1),
            Law::Custom { e } => Some(e.len()),
            _ => None,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.dimension().map(|d| d - 1)
    }

    fn check_index(&self, n: usize) -> Result<()> {
        match self.max_index() {
            Some(max) if n > max => Err(GkError::IndexOutOfRange { model: self.label(), index: n, max }),
            _ => Ok(()),
        }
    }

    /// `e_n`.
    pub fn eigenvalue(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        let x = n as f64;
        Ok(match &self.law {
            Law::Harmonic => x,
            Law::PoschlTeller { nu } => x * (x + nu),
            Law::InfiniteWell => x * (x + 2.0),
            Law::Morse { m } => x * (*m as f64 + 1.0 - x) / (*m as f64 + 2.0),
            // 1 - 1/(n+1)², written to avoid cancellation
            Law::Hydrogen => x * (x + 2.0) / ((x + 1.0) * (x + 1.0)),
            Law::PensonSolomon { q } => {
                if n == 0 {
                    0.0
                } else {
                    x * q.powf(2.0 * (1.0 - x))
                }
            }
            Law::Su11Gp { kappa } => x / (x + 2.0 * kappa - 1.0),
            Law::Su11Bg { kappa } => x * (x + 2.0 * kappa - 1.0),
            Law::Custom { e } => e[n],
            Law::Deformed { f, .. } => {
                if n == 0 {
                    0.0
                } else {
                    let fv = f(n);
                    x * fv * fv
                }
            }
        })
    }

    /// `ln e_n` for `n >= 1`, computed in the log domain where the closed
    /// form would under- or overflow.
    pub fn ln_eigenvalue(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(f64::NEG_INFINITY);
        }
        self.check_index(n)?;
        let x = n as f64;
        let v = match &self.law {
            Law::PensonSolomon { q } => x.ln() + 2.0 * (1.0 - x) * q.ln(),
            Law::Deformed { f, .. } => x.ln() + 2.0 * f(n).abs().ln(),
            _ => {
                let e = self.eigenvalue(n)?;
                if !(e > 0.0) {
                    return Err(GkError::InvalidSpectrum {
                        model: self.label(),
                        message: format!("e_{n} = {e} is not positive"),
                    });
                }
                e.ln()
            }
        };
        Ok(v)
    }

    /// `ε_n = n²/e_n`, with `ε_0 = 0`.
    pub fn dual_eigenvalue(&self, n: usize) -> Result<f64> {
        if n == 0 {
            self.check_index(0)?;
            return Ok(0.0);
        }
        let e = self.eigenvalue(n)?;
        if !(e > 0.0) {
            return Err(GkError::InvalidSpectrum { model: self.label(), message: format!("e_{n} = {e} is not positive") });
        }
        let x = n as f64;
        Ok(match &self.law {
            Law::PensonSolomon { q } => x * q.powf(2.0 * (x - 1.0)),
            _ => x * x / e,
        })
    }

    /// Energy of either branch.
    pub fn energy(&self, branch: Branch, n: usize) -> Result<f64> {
        match branch {
            Branch::Gk => self.eigenvalue(n),
            Branch::Dual => self.dual_eigenvalue(n),
        }
    }

    /// `ln` of the branch energy for `n >= 1`.
    pub fn ln_energy(&self, branch: Branch, n: usize) -> Result<f64> {
        let le = self.ln_eigenvalue(n)?;
        Ok(match branch {
            Branch::Gk => le,
            Branch::Dual => 2.0 * (n as f64).ln() - le,
        })
    }

    pub fn moment_table(&self, cutoff: usize) -> Result<MomentTable> {
        MomentTable::new(self, cutoff)
    }

    /// `f_GK(α, n) = e^{iα(e_n - e_{n-1})} sqrt(e_n / n)`.
    pub fn nonlinearity(&self, n: usize, alpha: f64) -> Result<C64> {
        self.branch_nonlinearity(Branch::Gk, n, alpha)
    }

    /// The dual nonlinearity, with `ε` in place of `e`.
    pub fn dual_nonlinearity(&self, n: usize, alpha: f64) -> Result<C64> {
        self.branch_nonlinearity(Branch::Dual, n, alpha)
    }

    fn branch_nonlinearity(&self, branch: Branch, n: usize, alpha: f64) -> Result<C64> {
        if n == 0 {
            return Err(GkError::ZeroIndex);
        }
        let e = self.energy(branch, n)?;
        let e_prev = self.energy(branch, n - 1)?;
        let modulus = (0.5 * (self.ln_energy(branch, n)? - (n as f64).ln())).exp();
        Ok(C64::from_polar(modulus, alpha * (e - e_prev)))
    }

    /// Ordering checks on `e_n` and `ε_n` up to `cutoff` (clamped to the
    /// model's last level).
    pub fn validate(&self, cutoff: usize) -> Result<ValidationReport> {
        if cutoff < 2 {
            return Err(GkError::Domain(format!("validation needs cutoff >= 2, got {cutoff}")));
        }
        let top = self.max_index().map_or(cutoff, |m| m.min(cutoff));
        let e: Vec<f64> = (0..=top).map(|n| self.eigenvalue(n)).collect::<Result<_>>()?;
        let positive_from = e.iter().skip(1).position(|&v| !(v > 0.0)).map(|i| i + 1);
        let eps: Vec<f64> = e.iter().enumerate().map(|(n, &v)| if n == 0 { 0.0 } else { (n * n) as f64 / v }).collect();

        let first_break = |xs: &[f64]| xs.windows(2).position(|w| !(w[0] < w[1]));
        let e_break = first_break(&e);
        let eps_break = if positive_from.is_some() { Some(0) } else { first_break(&eps) };

        let mut ratio_break = None;
        let mut f_ratio_break = None;
        for n in 1..top {
            let r = e[n] / e[n + 1];
            let lower = (n * n) as f64 / ((n + 1) * (n + 1)) as f64;
            if ratio_break.is_none() && !(r < 1.0 && r > lower) {
                ratio_break = Some(n);
            }
            if f_ratio_break.is_none() {
                let ok = match (self.nonlinearity(n, 0.0), self.nonlinearity(n + 1, 0.0)) {
                    (Ok(a), Ok(b)) => {
                        let ratio = a.norm() / b.norm();
                        let nf = n as f64;
                        ratio < ((nf + 1.0) / nf).sqrt() && ratio > (nf / (nf + 1.0)).sqrt()
                    }
                    _ => false,
                };
                if !ok {
                    f_ratio_break = Some(n);
                }
            }
        }
        Ok(ValidationReport {
            model: self.label(),
            checked_up_to: top,
            e0_zero: e[0] == 0.0,
            positive: positive_from.is_none(),
            first_non_positive: positive_from,
            e_increasing: e_break.is_none(),
            e_violation: e_break,
            eps_increasing: eps_break.is_none(),
            eps_violation: eps_break,
            ratio_bound: ratio_break.is_none(),
            ratio_violation: ratio_break,
            f_ratio_bound: f_ratio_break.is_none(),
            f_ratio_violation: f_ratio_break,
        })
    }

    /// Convergence radius of the coherent-state series of `branch`.
    ///
    /// The estimate is `exp(mean of the last 16 increments of ln m(n) / 2)`,
    /// i.e. the ratio test on `m(n) = ρ(n)` or `μ(n)`, taken at two probe
    /// cutoffs; growth of more than 5% between them is read as an unbounded
    /// radius.
    pub fn convergence_radius(&self, branch: Branch) -> Result<Radius> {
        if self.dimension().is_some() {
            return Ok(Radius::FiniteDimensional);
        }
        let r1 = self.estimate_radius(branch, RADIUS_PROBE / 2)?;
        let r2 = self.estimate_radius(branch, RADIUS_PROBE)?;
        if r2 > 1.05 * r1 {
            Ok(Radius::Unbounded)
        } else {
            Ok(Radius::Finite(r2))
        }
    }

    /// Raw ratio-test radius estimate at `cutoff`.
    pub fn estimate_radius(&self, branch: Branch, cutoff: usize) -> Result<f64> {
        const K: usize = 16;
        let top = self.max_index().map_or(cutoff, |m| m.min(cutoff));
        let lo = top.saturating_sub(K - 1).max(1);
        let mut acc = 0.0;
        let mut count = 0;
        for n in lo..=top {
            acc += self.ln_energy(branch, n)?;
            count += 1;
        }
        Ok((0.5 * acc / count as f64).exp())
    }
}

const RADIUS_PROBE: usize = 4096;

fn check_kappa(model: &str, kappa: f64) -> Result<()> {
    let two = 2.0 * kappa;
    if !(kappa >= 1.0) || two.fract() != 0.0 {
        return Err(invalid(model, format!("requires kappa in {{1, 3/2, 2, 5/2, ...}}, got kappa={kappa}")));
    }
    Ok(())
}

/// Convergence radius classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Radius {
    FiniteDimensional,
    Unbounded,
    Finite(f64),
}

impl Radius {
    /// Largest admissible `|z|` under the 2% rejection margin.
    pub fn admissible(&self) -> f64 {
        match self {
            Radius::Finite(r) => 0.98 * r,
            _ => f64::INFINITY,
        }
    }
}

/// Outcome of [`SpectrumModel::validate`]. Failures are flags, not errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub model: String,
    pub checked_up_to: usize,
    pub e0_zero: bool,
    pub positive: bool,
    pub first_non_positive: Option<usize>,
    pub e_increasing: bool,
    pub e_violation: Option<usize>,
    pub eps_increasing: bool,
    pub eps_violation: Option<usize>,
    /// `1 > e_n/e_{n+1} > n²/(n+1)²` for all checked `n >= 1`.
    pub ratio_bound: bool,
    pub ratio_violation: Option<usize>,
    /// The same bound expressed through `|f(n)/f(n+1)|`.
    pub f_ratio_bound: bool,
    pub f_ratio_violation: Option<usize>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.e0_zero && self.positive && self.e_increasing && self.eps_increasing && self.ratio_bound && self.f_ratio_bound
    }

    /// The ordering the given branch is built on: `e_n` for the GK family,
    /// `ε_n` for the dual.
    pub fn passes_for(&self, branch: Branch) -> bool {
        self.e0_zero
            && self.positive
            && match branch {
                Branch::Gk => self.e_increasing,
                Branch::Dual => self.eps_increasing,
            }
    }

    pub fn describe_failure(&self, branch: Branch) -> Option<String> {
        if !self.e0_zero {
            return Some("e_0 != 0".into());
        }
        if let Some(n) = self.first_non_positive {
            return Some(format!("e_{n} is not positive"));
        }
        match branch {
            Branch::Gk => self.e_violation.map(|n| format!("e_n not strictly increasing at n={n} -> {}", n + 1)),
            Branch::Dual => self.eps_violation.map(|n| format!("eps_n not strictly increasing at n={n} -> {}", n + 1)),
        }
    }
}

/// Precomputed `e_n`, `ε_n`, `ln ρ(n)`, `ln μ(n)` for `n = 0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub model: SpectrumModel,
    pub cutoff: usize,
    pub e: Vec<f64>,
    pub eps: Vec<f64>,
    pub log_rho: Vec<f64>,
    pub log_mu: Vec<f64>,
}

impl MomentTable {
    pub fn new(model: &SpectrumModel, cutoff: usize) -> Result<Self> {
        model.check_index(cutoff)?;
        let mut e = Vec::with_capacity(cutoff + 1);
        let mut eps = Vec::with_capacity(cutoff + 1);
        let mut log_rho = Vec::with_capacity(cutoff + 1);
        let mut log_mu = Vec::with_capacity(cutoff + 1);
        e.push(model.eigenvalue(0)?);
        eps.push(0.0);
        log_rho.push(0.0);
        log_mu.push(0.0);
        for n in 1..=cutoff {
            e.push(model.eigenvalue(n)?);
            eps.push(model.dual_eigenvalue(n)?);
            let ln_e = model.ln_eigenvalue(n)?;
            log_rho.push(log_rho[n - 1] + ln_e);
            log_mu.push(log_mu[n - 1] + 2.0 * (n as f64).ln() - ln_e);
        }
        Ok(Self { model: model.clone(), cutoff, e, eps, log_rho, log_mu })
    }

    pub fn rho(&self, n: usize) -> f64 {
        self.log_rho[n].exp()
    }

    pub fn mu(&self, n: usize) -> f64 {
        self.log_mu[n].exp()
    }

    pub fn log_moment(&self, branch: Branch, n: usize) -> f64 {
        match branch {
            Branch::Gk => self.log_rho[n],
            Branch::Dual => self.log_mu[n],
        }
    }

    pub fn energy(&self, branch: Branch, n: usize) -> f64 {
        match branch {
            Branch::Gk => self.e[n],
            Branch::Dual => self.eps[n],
        }
    }

    /// `max_n |ρ(n) μ(n) / (n!)² - 1|`.
    pub fn duality_residual(&self) -> f64 {
        (0..=self.cutoff)
            .map(|n| (self.log_rho[n] + self.log_mu[n] - 2.0 * ln_factorial(n)).exp_m1().abs())
            .fold(0.0, f64::max)
    }
}

/// Static description of a catalog entry, for listings.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub params: &'static str,
    pub constraint: &'static str,
    pub e_n: &'static str,
    pub eps_n: &'static str,
    pub radius_gk: &'static str,
    pub radius_dual: &'static str,
}

pub const CATALOG: [CatalogEntry; 8] = [
    CatalogEntry {
        name: "harmonic",
        params: "",
        constraint: "-",
        e_n: "n",
        eps_n: "n",
        radius_gk: "inf",
        radius_dual: "inf",
    },
    CatalogEntry {
        name: "poschl_teller",
        params: "nu",
        constraint: "nu > 2",
        e_n: "n(n+nu)",
        eps_n: "n/(n+nu)",
        radius_gk: "inf",
        radius_dual: "1",
    },
    CatalogEntry {
        name: "infinite_well",
        params: "",
        constraint: "-",
        e_n: "n(n+2)",
        eps_n: "n/(n+2)",
        radius_gk: "inf",
        radius_dual: "1",
    },
    CatalogEntry {
        name: "morse",
        params: "M",
        constraint: "integer M >= 1; levels n = 0..M",
        e_n: "n(M+1-n)/(M+2)",
        eps_n: "n(M+2)/(M+1-n)",
        radius_gk: "finite dim",
        radius_dual: "finite dim",
    },
    CatalogEntry {
        name: "hydrogen",
        params: "",
        constraint: "-",
        e_n: "1 - 1/(n+1)^2",
        eps_n: "n(n+1)^2/(n+2)",
        radius_gk: "1",
        radius_dual: "inf",
    },
    CatalogEntry {
        name: "penson_solomon",
        params: "q",
        constraint: "q > 0",
        e_n: "n q^(2(1-n))",
        eps_n: "n q^(2(n-1))",
        radius_gk: "inf (q<1), 0 (q>1)",
        radius_dual: "0 (q<1), inf (q>1)",
    },
    CatalogEntry {
        name: "su11_gp",
        params: "kappa",
        constraint: "kappa in {1, 3/2, 2, ...}",
        e_n: "n/(n+2kappa-1)",
        eps_n: "n(n+2kappa-1)",
        radius_gk: "1",
        radius_dual: "inf",
    },
    CatalogEntry {
        name: "su11_bg",
        params: "kappa",
        constraint: "kappa in {1, 3/2, 2, ...}",
        e_n: "n(n+2kappa-1)",
        eps_n: "n/(n+2kappa-1)",
        radius_gk: "inf",
        radius_dual: "1",
    },
];

/// One instance of every catalog entry at representative parameters.
pub fn catalog_models() -> Vec<SpectrumModel> {
    vec![
        SpectrumModel::harmonic(),
        SpectrumModel::poschl_teller(3.0).unwrap(),
        SpectrumModel::infinite_well(),
        SpectrumModel::morse(4).unwrap(),
        SpectrumModel::hydrogen(),
        SpectrumModel::penson_solomon(0.9).unwrap(),
        SpectrumModel::su11_gp(1.0).unwrap(),
        SpectrumModel::su11_bg(1.0).unwrap(),
    ]
}
