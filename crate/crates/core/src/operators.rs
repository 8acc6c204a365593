//! Operators on the truncated Fock space `|0⟩..|N⟩` as dense matrices.
//!
//! Annihilation-type operators live on the superdiagonal (entry `(n-1, n)`
//! maps `|n⟩` to `|n-1⟩`), creation-type ones on the subdiagonal. The
//! truncated creation operator has no `|N⟩ → |N+1⟩` output, so identities
//! such as `[A, A†] = diag(e_{n+1} - e_n)` only hold away from the last row
//! and column; checks compare the interior and report the boundary apart.
//!
//! `α` is frozen into each operator at construction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GkError, Result};
use crate::numerics::expm::matrix_exp;
use crate::numerics::matrix::CMatrix;
use crate::numerics::cis_product;
use crate::spectra::{Branch, SpectrumModel};
use crate::states::{FockVector, LogAmplitude};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedOperator {
    pub matrix: CMatrix,
    pub tag: String,
    /// Model label, `None` for model-independent operators such as `n̂`.
    pub model: Option<String>,
    pub alpha: Option<f64>,
}

impl TruncatedOperator {
    fn new(matrix: CMatrix, tag: impl Into<String>, model: &SpectrumModel, alpha: Option<f64>) -> Self {
        Self { matrix, tag: tag.into(), model: Some(model.label()), alpha }
    }

    pub fn cutoff(&self) -> usize {
        self.matrix.dim() - 1
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), tag: format!("{}^dag", self.tag), model: self.model.clone(), alpha: self.alpha }
    }

    pub fn identity(cutoff: usize) -> Self {
        Self { matrix: CMatrix::identity(cutoff + 1), tag: "I".into(), model: None, alpha: None }
    }

    /// Number operator `n̂ = diag(0, 1, .., N)`.
    pub fn number(cutoff: usize) -> Self {
        let d: Vec<f64> = (0..=cutoff).map(|n| n as f64).collect();
        Self { matrix: CMatrix::from_real_diagonal(&d), tag: "n".into(), model: None, alpha: None }
    }

    /// Product `self · rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        check_compatible(self, rhs)?;
        Ok(Self {
            matrix: self.matrix.try_mul(&rhs.matrix)?,
            tag: format!("{}*{}", self.tag, rhs.tag),
            model: self.model.clone().or_else(|| rhs.model.clone()),
            alpha: self.alpha.or(rhs.alpha),
        })
    }
}

fn check_compatible(a: &TruncatedOperator, b: &TruncatedOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(GkError::ShapeMismatch { left: a.dim(), right: b.dim() });
    }
    if let (Some(x), Some(y)) = (&a.model, &b.model) {
        if x != y {
            return Err(GkError::ModelMismatch { left: x.clone(), right: y.clone() });
        }
    }
    Ok(())
}

fn check_cutoff(model: &SpectrumModel, cutoff: usize) -> Result<()> {
    match model.max_index() {
        Some(max) if cutoff > max => Err(GkError::IndexOutOfRange { model: model.label(), index: cutoff, max }),
        _ => Ok(()),
    }
}

fn energies(model: &SpectrumModel, branch: Branch, cutoff: usize) -> Result<Vec<f64>> {
    (0..=cutoff).map(|n| model.energy(branch, n)).collect()
}

/// Superdiagonal operator with entries `w(n) e^{iα(E_n - E_{n-1})}`.
fn lowering(model: &SpectrumModel, branch: Branch, alpha: f64, cutoff: usize, w: impl Fn(usize, f64) -> f64) -> Result<CMatrix> {
    check_cutoff(model, cutoff)?;
    let e = energies(model, branch, cutoff)?;
    let mut m = CMatrix::zeros(cutoff + 1);
    for n in 1..=cutoff {
        m[(n - 1, n)] = cis_product(alpha, e[n] - e[n - 1]) * w(n, e[n]);
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ladder {
    A,
    ADag,
    DualA,
    DualADag,
}

impl Ladder {
    fn branch(self) -> Branch {
        match self {
            Ladder::A | Ladder::ADag => Branch::Gk,
            _ => Branch::Dual,
        }
    }
}

/// `A|n⟩ = sqrt(e_n) e^{iα(e_n - e_{n-1})} |n-1⟩`; dual variants use `ε_n`.
pub fn ladder(model: &SpectrumModel, alpha: f64, cutoff: usize, which: Ladder) -> Result<TruncatedOperator> {
    let m = lowering(model, which.branch(), alpha, cutoff, |_, e| e.sqrt())?;
    Ok(match which {
        Ladder::A => TruncatedOperator::new(m, "A", model, Some(alpha)),
        Ladder::DualA => TruncatedOperator::new(m, "dualA", model, Some(alpha)),
        Ladder::ADag => TruncatedOperator::new(m.adjoint(), "Adag", model, Some(alpha)),
        Ladder::DualADag => TruncatedOperator::new(m.adjoint(), "dualAdag", model, Some(alpha)),
    })
}

/// Lowering operator of the given family.
pub fn annihilation(model: &SpectrumModel, branch: Branch, alpha: f64, cutoff: usize) -> Result<TruncatedOperator> {
    ladder(model, alpha, cutoff, if branch == Branch::Gk { Ladder::A } else { Ladder::DualA })
}

/// `diag(e_n)` or `diag(ε_n)`, in units of `ħω`.
pub fn hamiltonian(model: &SpectrumModel, cutoff: usize, dual: bool) -> Result<TruncatedOperator> {
    check_cutoff(model, cutoff)?;
    let branch = if dual { Branch::Dual } else { Branch::Gk };
    let m = CMatrix::from_real_diagonal(&energies(model, branch, cutoff)?);
    Ok(TruncatedOperator::new(m, if dual { "dualH" } else { "H" }, model, None))
}

/// `S(α) = diag(e^{-iα e_n})` (dual: `ε_n`).
pub fn evolution(model: &SpectrumModel, alpha: f64, cutoff: usize, dual: bool) -> Result<TruncatedOperator> {
    check_cutoff(model, cutoff)?;
    let branch = if dual { Branch::Dual } else { Branch::Gk };
    let d: Vec<C64> = energies(model, branch, cutoff)?.iter().map(|&e| cis_product(-alpha, e)).collect();
    Ok(TruncatedOperator::new(CMatrix::from_diagonal(&d), if dual { "dualS" } else { "S" }, model, Some(alpha)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conjugate {
    B,
    BDag,
    DualB,
    DualBDag,
}

/// `B|n⟩ = (n / sqrt(e_n)) e^{iα(e_n - e_{n-1})} |n-1⟩`, so that `[A, B†] = I`.
pub fn conjugate_b(model: &SpectrumModel, alpha: f64, cutoff: usize, which: Conjugate) -> Result<TruncatedOperator> {
    let branch = match which {
        Conjugate::B | Conjugate::BDag => Branch::Gk,
        _ => Branch::Dual,
    };
    check_cutoff(model, cutoff)?;
    for n in 1..=cutoff {
        let e = model.energy(branch, n)?;
        if !(e > 0.0) {
            return Err(GkError::InvalidSpectrum { model: model.label(), message: format!("B needs E_{n} > 0, got {e}") });
        }
    }
    let m = lowering(model, branch, alpha, cutoff, |n, e| n as f64 / e.sqrt())?;
    Ok(match which {
        Conjugate::B => TruncatedOperator::new(m, "B", model, Some(alpha)),
        Conjugate::DualB => TruncatedOperator::new(m, "dualB", model, Some(alpha)),
        Conjugate::BDag => TruncatedOperator::new(m.adjoint(), "Bdag", model, Some(alpha)),
        Conjugate::DualBDag => TruncatedOperator::new(m.adjoint(), "dualBdag", model, Some(alpha)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Displacement {
    /// `exp(z B† - z* A)`
    D,
    /// `exp(z B̃† - z* Ã)`
    DualD,
    /// `exp(z A† - z* B)`
    V,
    /// `exp(z Ã† - z* B̃)`
    DualV,
}

impl FromStr for Displacement {
    type Err = GkError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "D" => Displacement::D,
            "dualD" | "Dtilde" => Displacement::DualD,
            "V" => Displacement::V,
            "dualV" | "Vtilde" => Displacement::DualV,
            _ => return Err(GkError::Parse(format!("unknown displacement variant `{s}`"))),
        })
    }
}

impl fmt::Display for Displacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Displacement::D => "D",
            Displacement::DualD => "dualD",
            Displacement::V => "V",
            Displacement::DualV => "dualV",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementConfig {
    /// Extra levels used for the exponential before cropping.
    pub margin: usize,
    /// Allowed relative mass of `exp(G)|0⟩` beyond the requested cutoff.
    pub leakage_tolerance: f64,
}

impl Default for DisplacementConfig {
    fn default() -> Self {
        Self { margin: 15, leakage_tolerance: 1e-10 }
    }
}

/// Displacement-type exponential with the default margin and leakage check.
pub fn displacement(model: &SpectrumModel, z: C64, alpha: f64, cutoff: usize, variant: Displacement) -> Result<TruncatedOperator> {
    displacement_with(model, z, alpha, cutoff, variant, &DisplacementConfig::default())
}

pub fn displacement_with(
    model: &SpectrumModel,
    z: C64,
    alpha: f64,
    cutoff: usize,
    variant: Displacement,
    cfg: &DisplacementConfig,
) -> Result<TruncatedOperator> {
    check_cutoff(model, cutoff)?;
    let big = match model.max_index() {
        Some(max) => (cutoff + cfg.margin).min(max),
        None => cutoff + cfg.margin,
    };
    let (up, down) = match variant {
        Displacement::D => (conjugate_b(model, alpha, big, Conjugate::BDag)?, ladder(model, alpha, big, Ladder::A)?),
        Displacement::DualD => {
            (conjugate_b(model, alpha, big, Conjugate::DualBDag)?, ladder(model, alpha, big, Ladder::DualA)?)
        }
        Displacement::V => (ladder(model, alpha, big, Ladder::ADag)?, conjugate_b(model, alpha, big, Conjugate::B)?),
        Displacement::DualV => {
            (ladder(model, alpha, big, Ladder::DualADag)?, conjugate_b(model, alpha, big, Conjugate::DualB)?)
        }
    };
    let generator = up.matrix.scale(z).try_sub(&down.matrix.scale(z.conj()))?;
    let full = matrix_exp(&generator)?;
    let total: f64 = (0..=big).map(|n| full[(n, 0)].norm_sqr()).sum();
    let outside: f64 = (cutoff + 1..=big).map(|n| full[(n, 0)].norm_sqr()).sum();
    let leakage = if total > 0.0 { outside / total } else { 0.0 };
    if leakage > cfg.leakage_tolerance {
        return Err(GkError::BoundaryLeakage { leakage, tolerance: cfg.leakage_tolerance, suggested_cutoff: 2 * cutoff.max(1) });
    }
    Ok(TruncatedOperator::new(full.crop(cutoff + 1), variant.to_string(), model, Some(alpha)))
}

/// Phase-free ladder `ǎ|n⟩ = sqrt(E_n)|n-1⟩` (or its adjoint).
pub fn check_a(model: &SpectrumModel, cutoff: usize, dag: bool, branch: Branch) -> Result<TruncatedOperator> {
    let m = lowering(model, branch, 0.0, cutoff, |_, e| e.sqrt())?;
    let tag = match (branch, dag) {
        (Branch::Gk, false) => "a_check",
        (Branch::Gk, true) => "a_check_dag",
        (Branch::Dual, false) => "dual_a_check",
        (Branch::Dual, true) => "dual_a_check_dag",
    };
    Ok(TruncatedOperator::new(if dag { m.adjoint() } else { m }, tag, model, None))
}

/// Heisenberg-picture lowering operator `A(t) = e^{iĤt} ǎ e^{-iĤt}`.
pub fn heisenberg_ladder(model: &SpectrumModel, t: f64, cutoff: usize, branch: Branch) -> Result<TruncatedOperator> {
    let dual = branch == Branch::Dual;
    let s = evolution(model, -model.omega() * t, cutoff, dual)?;
    let a = check_a(model, cutoff, false, branch)?;
    let mut out = s.compose(&a)?.compose(&s.adjoint())?;
    out.tag = format!("A(t={t})");
    out.alpha = Some(-model.omega() * t);
    Ok(out)
}

/// Interpolation operator `T = diag(sqrt(ρ(n)/μ(n)))` kept as `ln` of the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interpolator {
    pub model: String,
    pub log_diagonal: Vec<f64>,
}

impl Interpolator {
    pub fn cutoff(&self) -> usize {
        self.log_diagonal.len() - 1
    }

    /// `T η`, elementwise in log space.
    pub fn apply_log(&self, eta: &[LogAmplitude]) -> Result<Vec<LogAmplitude>> {
        if eta.len() != self.log_diagonal.len() {
            return Err(GkError::ShapeMismatch { left: self.log_diagonal.len(), right: eta.len() });
        }
        Ok(eta
            .iter()
            .zip(&self.log_diagonal)
            .map(|(a, t)| LogAmplitude { ln_abs: a.ln_abs + t, phase: a.phase })
            .collect())
    }

    /// Dense form; fails once a diagonal entry leaves `f64` range.
    pub fn to_operator(&self) -> Result<TruncatedOperator> {
        if let Some(&big) = self.log_diagonal.iter().find(|v| v.abs() > 700.0) {
            return Err(GkError::ExpOverflow(big));
        }
        let d: Vec<f64> = self.log_diagonal.iter().map(|v| v.exp()).collect();
        Ok(TruncatedOperator { matrix: CMatrix::from_real_diagonal(&d), tag: "T".into(), model: Some(self.model.clone()), alpha: None })
    }
}

pub fn interpolator(model: &SpectrumModel, cutoff: usize) -> Result<Interpolator> {
    let t = model.moment_table(cutoff)?;
    Ok(Interpolator {
        model: model.label(),
        log_diagonal: t.log_rho.iter().zip(&t.log_mu).map(|(r, m)| 0.5 * (r - m)).collect(),
    })
}

/// `ab - ba`. Its last row and column are affected by truncation.
pub fn commutator(a: &TruncatedOperator, b: &TruncatedOperator) -> Result<TruncatedOperator> {
    check_compatible(a, b)?;
    let m = a.matrix.try_mul(&b.matrix)?.try_sub(&b.matrix.try_mul(&a.matrix)?)?;
    Ok(TruncatedOperator {
        matrix: m,
        tag: format!("[{},{}]", a.tag, b.tag),
        model: a.model.clone().or_else(|| b.model.clone()),
        alpha: if a.alpha == b.alpha { a.alpha } else { None },
    })
}

/// Result of [`apply`]; not renormalized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Applied {
    pub amplitudes: Vec<C64>,
    pub norm: f64,
    /// `|out_N|`, the component most exposed to truncation.
    pub boundary: f64,
    /// Tail bound of the input state.
    pub input_tail_bound: f64,
}

impl Applied {
    pub fn normalized(&self) -> Vec<C64> {
        self.amplitudes.iter().map(|c| c / self.norm).collect()
    }
}

pub fn apply(op: &TruncatedOperator, s: &FockVector) -> Result<Applied> {
    if op.dim() != s.amplitudes.len() {
        return Err(GkError::ShapeMismatch { left: op.dim(), right: s.amplitudes.len() });
    }
    if let Some(m) = &op.model {
        if *m != s.label.model {
            return Err(GkError::ModelMismatch { left: m.clone(), right: s.label.model.clone() });
        }
    }
    let out = op.matrix.mul_vec(&s.amplitudes)?;
    let norm = out.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let boundary = out.last().map_or(0.0, |c| c.norm());
    Ok(Applied { amplitudes: out, norm, boundary, input_tail_bound: s.tail_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{dgkcs, even_odd, gkcs, unnormalized_log_amplitudes, Parity, TruncationConfig};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn interior(a: &TruncatedOperator, b: &CMatrix) -> f64 {
        a.matrix.max_abs_diff_interior(b).unwrap()
    }

    fn models() -> Vec<SpectrumModel> {
        vec![
            SpectrumModel::harmonic(),
            SpectrumModel::poschl_teller(3.0).unwrap(),
            SpectrumModel::infinite_well(),
            SpectrumModel::hydrogen(),
        ]
    }

    #[test]
    fn harmonic_ladder_is_standard() {
        let h = SpectrumModel::harmonic();
        let a = ladder(&h, 0.0, 10, Ladder::A).unwrap();
        for n in 1..=10 {
            assert_eq!(a.matrix[(n - 1, n)], C64::new((n as f64).sqrt(), 0.0));
        }
        let b = conjugate_b(&h, 0.0, 10, Conjugate::B).unwrap();
        assert!(b.matrix.try_sub(&a.matrix).unwrap().max_abs() < 1e-15);
        let c = check_a(&h, 10, false, Branch::Gk).unwrap();
        assert_eq!(c.matrix, a.matrix);
    }

    #[test]
    fn entry_examples() {
        let well = SpectrumModel::infinite_well();
        let da = ladder(&well, 0.0, 5, Ladder::DualA).unwrap();
        assert_relative_eq!(da.matrix[(1, 2)].re, 0.5f64.sqrt(), max_relative = 1e-15);
        let b = conjugate_b(&well, 0.0, 5, Conjugate::B).unwrap();
        assert_relative_eq!(b.matrix[(0, 1)].re, 1.0 / 3f64.sqrt(), max_relative = 1e-15);
        let c = check_a(&SpectrumModel::hydrogen(), 5, false, Branch::Gk).unwrap();
        assert_relative_eq!(c.matrix[(0, 1)].re, 0.75f64.sqrt(), max_relative = 1e-15);
        let comm = commutator(&ladder(&well, 0.0, 8, Ladder::A).unwrap(), &ladder(&well, 0.0, 8, Ladder::ADag).unwrap()).unwrap();
        assert_relative_eq!(comm.matrix[(3, 3)].re, 9.0, max_relative = 1e-13);
        let h = hamiltonian(&SpectrumModel::poschl_teller(3.0).unwrap(), 3, true).unwrap();
        let d: Vec<f64> = h.matrix.diagonal().iter().map(|c| c.re).collect();
        assert_eq!(d, vec![0.0, 0.25, 0.4, 0.5]);
        let t = interpolator(&well, 4).unwrap().to_operator().unwrap();
        assert_relative_eq!(t.matrix[(2, 2)].re, 12.0, max_relative = 1e-13);
        let ti = interpolator(&SpectrumModel::harmonic(), 30).unwrap();
        assert!(ti.log_diagonal.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn algebra_on_interior() {
        let n = 60;
        for m in models() {
            for alpha in [0.0, 0.7, 2.3] {
                let a = ladder(&m, alpha, n, Ladder::A).unwrap();
                let ad = ladder(&m, alpha, n, Ladder::ADag).unwrap();
                assert_eq!(ad.matrix, a.matrix.adjoint());
                let e: Vec<f64> = (0..=n).map(|k| m.eigenvalue(k).unwrap()).collect();
                let h = ad.compose(&a).unwrap();
                assert!(interior(&h, &CMatrix::from_real_diagonal(&e)) < 1e-12 * e[n]);
                let de: Vec<f64> = (0..=n).map(|k| if k < n { e[k + 1] - e[k] } else { 0.0 }).collect();
                let c = commutator(&a, &ad).unwrap();
                assert!(interior(&c, &CMatrix::from_real_diagonal(&de)) < 1e-12 * e[n]);
                let bd = conjugate_b(&m, alpha, n, Conjugate::BDag).unwrap();
                assert!(interior(&commutator(&a, &bd).unwrap(), &CMatrix::identity(n + 1)) < 1e-12 * n as f64);
                let b = conjugate_b(&m, alpha, n, Conjugate::B).unwrap();
                assert!(interior(&commutator(&b, &ad).unwrap(), &CMatrix::identity(n + 1)) < 1e-12 * n as f64);
                let s = evolution(&m, alpha, n, false).unwrap();
                let chk = check_a(&m, n, false, Branch::Gk).unwrap();
                let conj = s.compose(&chk).unwrap().compose(&s.adjoint()).unwrap();
                assert!(conj.matrix.try_sub(&a.matrix).unwrap().max_abs() < 1e-13 * e[n].sqrt().max(1.0));
            }
        }
    }

    #[test]
    fn dual_number_commutator() {
        let well = SpectrumModel::infinite_well();
        let a = ladder(&well, 0.4, 30, Ladder::DualA).unwrap();
        let c = commutator(&a, &TruncatedOperator::number(30)).unwrap();
        assert!(c.matrix.try_sub(&a.matrix).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn evolution_group_law() {
        let m = SpectrumModel::poschl_teller(3.0).unwrap();
        let s1 = evolution(&m, 0.4, 20, false).unwrap();
        let s2 = evolution(&m, 1.1, 20, false).unwrap();
        let s3 = evolution(&m, 1.5, 20, false).unwrap();
        assert!(s1.compose(&s2).unwrap().matrix.try_sub(&s3.matrix).unwrap().max_abs() < 1e-14 * 20.0 * 23.0);
        assert_eq!(evolution(&m, 0.0, 5, true).unwrap().matrix, CMatrix::identity(6));
    }

    #[test]
    fn evolution_gives_temporal_stability() {
        let m = SpectrumModel::infinite_well();
        let cfg = TruncationConfig::default();
        let z = C64::new(0.3, 0.2);
        let s0 = gkcs(&m, z, 0.0, &cfg).unwrap();
        let s = evolution(&m, 1.7, s0.cutoff(), false).unwrap();
        let out = apply(&s, &s0).unwrap();
        let want = gkcs(&m, z, 1.7, &cfg).unwrap();
        for (x, y) in out.amplitudes.iter().zip(&want.amplitudes) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenstates_on_interior() {
        let cfg = TruncationConfig::default();
        let z = C64::from_polar(0.7, 0.4);
        let pt = SpectrumModel::poschl_teller(3.0).unwrap();
        let s = gkcs(&pt, z, 0.9, &cfg).unwrap();
        let a = annihilation(&pt, Branch::Gk, 0.9, s.cutoff()).unwrap();
        let out = apply(&a, &s).unwrap();
        let n = s.cutoff();
        for k in 0..n {
            assert!((out.amplitudes[k] - z * s.amplitudes[k]).norm() < 1e-15);
        }
        let odd = even_odd(&SpectrumModel::infinite_well(), z, 0.3, Parity::Odd, &cfg).unwrap();
        let a = annihilation(&SpectrumModel::infinite_well(), Branch::Dual, 0.3, odd.cutoff()).unwrap();
        let a2 = a.compose(&a).unwrap();
        let out = apply(&a2, &odd).unwrap();
        for k in 0..odd.cutoff() - 1 {
            assert!((out.amplitudes[k] - z * z * odd.amplitudes[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn heisenberg_picture() {
        let cfg = TruncationConfig::default();
        let m = SpectrumModel::infinite_well();
        let z = C64::new(0.5, -0.3);
        let t = 1.3;
        let s = gkcs(&m, z, -t, &cfg).unwrap();
        let at = heisenberg_ladder(&m, t, s.cutoff(), Branch::Gk).unwrap();
        let out = apply(&at, &s).unwrap();
        for k in 0..s.cutoff() {
            assert!((out.amplitudes[k] - z * s.amplitudes[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn canonical_displacement() {
        let h = SpectrumModel::harmonic();
        let z = C64::new(0.3, 0.0);
        let d = displacement(&h, z, 0.0, 40, Displacement::D).unwrap();
        for n in 0..=40usize {
            let f: f64 = (1..=n).map(|k| k as f64).product();
            let want = (-0.045f64).exp() * 0.3f64.powi(n as i32) / f.sqrt();
            assert!((d.matrix[(n, 0)] - want).norm() < 1e-12, "n={n}");
        }
        for v in [Displacement::DualD, Displacement::V, Displacement::DualV] {
            let o = displacement(&h, z, 0.0, 40, v).unwrap();
            assert!(o.matrix.try_sub(&d.matrix).unwrap().max_abs() < 1e-12);
        }
        let id = displacement(&h, C64::new(0.0, 0.0), 0.0, 10, Displacement::D).unwrap();
        assert_eq!(id.matrix, CMatrix::identity(11));
    }

    #[test]
    fn deformed_displacement_fidelity() {
        let cfg = TruncationConfig::default();
        let m = SpectrumModel::infinite_well();
        let z = C64::new(0.3, 0.0);
        let d = displacement(&m, z, 0.5, 60, Displacement::D).unwrap();
        let col: Vec<C64> = (0..=60).map(|n| d.matrix[(n, 0)]).collect();
        let s = gkcs(&m, z, 0.5, &cfg).unwrap().padded(60);
        let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let fid = col.iter().zip(&s.amplitudes).map(|(c, a)| a.conj() * c).sum::<C64>().norm() / norm;
        assert!(fid >= 1.0 - 1e-6, "fidelity {fid}");
        let s = dgkcs(&m, z, 0.5, &cfg).unwrap().padded(60);
        let d = displacement(&m, z, 0.5, 60, Displacement::DualD).unwrap();
        let col: Vec<C64> = (0..=60).map(|n| d.matrix[(n, 0)]).collect();
        let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let fid = col.iter().zip(&s.amplitudes).map(|(c, a)| a.conj() * c).sum::<C64>().norm() / norm;
        assert!(fid >= 1.0 - 1e-6, "dual fidelity {fid}");
    }

    #[test]
    fn leakage_is_reported() {
        let h = SpectrumModel::harmonic();
        let r = displacement(&h, C64::new(3.0, 0.0), 0.0, 5, Displacement::D);
        assert!(matches!(r, Err(GkError::BoundaryLeakage { suggested_cutoff: 10, .. })));
    }

    #[test]
    fn interpolation_maps_gk_to_dual() {
        let m = SpectrumModel::hydrogen();
        let z = C64::new(0.4, 0.2);
        let n = 200;
        let t = interpolator(&m, n).unwrap();
        assert!(t.to_operator().is_err());
        let eta = unnormalized_log_amplitudes(&m, Branch::Gk, z, 0.0, n).unwrap();
        let dual = unnormalized_log_amplitudes(&m, Branch::Dual, z, 0.0, n).unwrap();
        for (a, b) in t.apply_log(&eta).unwrap().iter().zip(&dual) {
            assert!((a.ln_abs - b.ln_abs).abs() <= 1e-12 * (1.0 + b.ln_abs.abs()));
            assert_eq!(a.phase, b.phase);
        }
    }

    #[test]
    fn shape_and_model_mismatch() {
        let h = SpectrumModel::harmonic();
        let a = ladder(&h, 0.0, 4, Ladder::A).unwrap();
        let b = ladder(&h, 0.0, 5, Ladder::A).unwrap();
        assert!(matches!(commutator(&a, &b), Err(GkError::ShapeMismatch { .. })));
        let w = ladder(&SpectrumModel::infinite_well(), 0.0, 4, Ladder::A).unwrap();
        assert!(matches!(commutator(&a, &w), Err(GkError::ModelMismatch { .. })));
        assert!(ladder(&SpectrumModel::morse(4).unwrap(), 0.0, 5, Ladder::A).is_err());
    }

    #[test]
    fn apply_examples() {
        let cfg = TruncationConfig::fixed(5);
        let h = SpectrumModel::harmonic();
        let s = gkcs(&h, C64::new(0.2, 0.1), 0.0, &cfg).unwrap();
        let out = apply(&TruncatedOperator::identity(5), &s).unwrap();
        assert_eq!(out.amplitudes, s.amplitudes);
        let mut basis = s.clone();
        basis.amplitudes = (0..=5).map(|k| C64::new(if k == 3 { 1.0 } else { 0.0 }, 0.0)).collect();
        let out = apply(&TruncatedOperator::number(5), &basis).unwrap();
        assert_eq!(out.amplitudes[3], C64::new(3.0, 0.0));
    }

    proptest! {
        #[test]
        fn adjoint_pairs_are_exact(alpha in -4.0f64..4.0, nu in 2.1f64..8.0) {
            let m = SpectrumModel::poschl_teller(nu).unwrap();
            let a = ladder(&m, alpha, 20, Ladder::DualA).unwrap();
            let ad = ladder(&m, alpha, 20, Ladder::DualADag).unwrap();
            prop_assert_eq!(ad.matrix, a.matrix.adjoint());
            let b = conjugate_b(&m, alpha, 20, Conjugate::DualB).unwrap();
            let bd = conjugate_b(&m, alpha, 20, Conjugate::DualBDag).unwrap();
            prop_assert_eq!(bd.matrix, b.matrix.adjoint());
        }
    }
}
