//! Closed-form normalizations, overlaps, dual moments and cat-state
//! distributions for the models where they are known.
//!
//! Every normalization here is the restriction to real `x = |z|²` of a
//! generating function `K(w) = Σ wⁿ/m(n)`; the overlap of two normalized
//! states at equal `α` is `K(z* z') / sqrt(K(|z|²) K(|z'|²))`.

use crate::error::{GkError, Result};
use crate::numerics::special::{bessel_i_complex, ln_factorial, log_gamma};
use crate::spectra::{Branch, SpectrumModel};
use crate::states::CatKind;
use crate::C64;

fn param(model: &SpectrumModel, key: &str) -> f64 {
    model.params().get(key).copied().unwrap_or(f64::NAN)
}

/// Whether `K(w)` is registered for this model and family.
pub fn has_closed_form(model: &SpectrumModel, branch: Branch) -> bool {
    matches!(
        (model.name(), branch),
        ("harmonic", _)
            | ("poschl_teller", Branch::Dual)
            | ("infinite_well", Branch::Dual)
            | ("morse", Branch::Dual)
            | ("hydrogen", Branch::Dual)
            | ("su11_gp", Branch::Gk)
            | ("su11_bg", Branch::Dual)
    )
}

/// Hydrogen dual kernel `(2 I₁(2√w) + √w I₂(2√w)) / (2√w)`, equal to 1 at `w = 0`.
pub fn hydrogen_dual_kernel(w: C64) -> C64 {
    if w.norm() < 1e-300 {
        return C64::new(1.0, 0.0);
    }
    let s = w.sqrt();
    let two_s = s * 2.0;
    (bessel_i_complex(1, two_s) * 2.0 + s * bessel_i_complex(2, two_s)) / (two_s)
}

/// Generating function `K(w) = Σ wⁿ/m(n)` where a closed form is known.
pub fn kernel(model: &SpectrumModel, branch: Branch, w: C64) -> Option<Result<C64>> {
    if !has_closed_form(model, branch) {
        return None;
    }
    let one = C64::new(1.0, 0.0);
    let inside_unit = |w: C64| -> Result<()> {
        if w.norm() >= 1.0 {
            Err(GkError::Domain(format!("closed form needs |w| < 1, got {}", w.norm())))
        } else {
            Ok(())
        }
    };
    let value = match model.name() {
        "harmonic" => Ok(w.exp()),
        "poschl_teller" => inside_unit(w).map(|_| (one - w).powf(-1.0 - param(model, "nu"))),
        "infinite_well" => inside_unit(w).map(|_| (one - w).powi(-3)),
        "morse" => {
            let m = param(model, "M");
            Ok(((w + (m + 2.0)) / (m + 2.0)).powi(m as i32))
        }
        "hydrogen" => Ok(hydrogen_dual_kernel(w)),
        "su11_gp" | "su11_bg" => inside_unit(w).map(|_| (one - w).powf(-2.0 * param(model, "kappa"))),
        _ => unreachable!(),
    };
    Some(value)
}

/// Closed-form `N(x)` (or `Ñ(x)`).
pub fn normalization_closed_form(model: &SpectrumModel, branch: Branch, x: f64) -> Option<Result<f64>> {
    kernel(model, branch, C64::new(x, 0.0)).map(|r| r.map(|k| k.re))
}

/// Closed-form overlap `⟨z,α|z',α⟩` of normalized states.
pub fn overlap_closed_form(model: &SpectrumModel, branch: Branch, z: C64, z2: C64) -> Option<Result<C64>> {
    let k = kernel(model, branch, z.conj() * z2)?;
    let n1 = normalization_closed_form(model, branch, z.norm_sqr())?;
    let n2 = normalization_closed_form(model, branch, z2.norm_sqr())?;
    Some((|| Ok(k? / (n1? * n2?).sqrt()))())
}

/// `ln μ(n)` from the explicit dual-moment formulas, independent of the
/// `[ε_n]!` product.
pub fn dual_moment_ln(model: &SpectrumModel, n: usize) -> Option<Result<f64>> {
    let nf = n as f64;
    let value = match model.name() {
        "harmonic" => Ok(ln_factorial(n)),
        "poschl_teller" => {
            let nu = param(model, "nu");
            (|| Ok(ln_factorial(n) + log_gamma(nu + 1.0)? - log_gamma(nf + nu + 1.0)?))()
        }
        "infinite_well" => Ok(2f64.ln() - ((nf + 1.0) * (nf + 2.0)).ln()),
        "morse" => {
            let m = param(model, "M") as usize;
            if n > m {
                return Some(Err(GkError::IndexOutOfRange { model: model.label(), index: n, max: m }));
            }
            let ln_binom = ln_factorial(m) - ln_factorial(n) - ln_factorial(m - n);
            Ok(nf * (m as f64 + 2.0).ln() - ln_binom)
        }
        // 2 n! [(n+1)!]² / (n+2)!
        "hydrogen" => Ok(2f64.ln() + ln_factorial(n) + 2.0 * ln_factorial(n + 1) - ln_factorial(n + 2)),
        _ => return None,
    };
    Some(value)
}

/// Cat-state photon distribution `∝ r^{2n}(1 ± cos 2nθ)/μ(n)` on `0..=cutoff`,
/// normalized by its own sum.
pub fn cat_distribution(model: &SpectrumModel, r: f64, theta: f64, kind: CatKind, cutoff: usize) -> Result<Vec<f64>> {
    let table = model.moment_table(cutoff)?;
    let sign = match kind {
        CatKind::Real => 1.0,
        CatKind::Imaginary => -1.0,
    };
    let ln_r = r.ln();
    let raw: Vec<f64> = (0..=cutoff)
        .map(|n| {
            let weight = 1.0 + sign * (2.0 * n as f64 * theta).cos();
            if n == 0 {
                weight
            } else {
                weight * (2.0 * n as f64 * ln_r - table.log_mu[n]).exp()
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(GkError::ZeroNorm(format!("cat distribution at r={r}, theta={theta}")));
    }
    Ok(raw.into_iter().map(|p| p / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn series_kernel(model: &SpectrumModel, branch: Branch, w: C64, terms: usize) -> C64 {
        let t = model.moment_table(terms).unwrap();
        (0..=terms).map(|n| w.powu(n as u32) * (-t.log_moment(branch, n)).exp()).sum()
    }

    #[test]
    fn examples() {
        let pt = SpectrumModel::poschl_teller(3.0).unwrap();
        assert_relative_eq!(normalization_closed_form(&pt, Branch::Dual, 0.5).unwrap().unwrap(), 16.0, max_relative = 1e-14);
        let morse = SpectrumModel::morse(4).unwrap();
        assert_relative_eq!(normalization_closed_form(&morse, Branch::Dual, 3.0).unwrap().unwrap(), 5.0625, max_relative = 1e-14);
        let h = SpectrumModel::hydrogen();
        let want = 0.5 * (2.0 * 1.590_636_854_637_329_1 + 0.688_948_447_698_738_2);
        assert_relative_eq!(normalization_closed_form(&h, Branch::Dual, 1.0).unwrap().unwrap(), want, max_relative = 1e-14);
        assert!(normalization_closed_form(&h, Branch::Gk, 0.5).is_none());
        assert!(normalization_closed_form(&pt, Branch::Dual, 1.0).unwrap().is_err());
        let well = SpectrumModel::infinite_well();
        let ov = overlap_closed_form(&well, Branch::Dual, C64::new(0.3, 0.0), C64::new(0.5, 0.0)).unwrap().unwrap();
        assert_relative_eq!(ov.re, (0.91f64 * 0.75).powf(1.5) / 0.85f64.powi(3), max_relative = 1e-14);
    }

    #[test]
    fn kernels_match_series() {
        let w = C64::new(0.31, -0.22);
        let cases = [
            (SpectrumModel::harmonic(), Branch::Gk),
            (SpectrumModel::harmonic(), Branch::Dual),
            (SpectrumModel::poschl_teller(2.5).unwrap(), Branch::Dual),
            (SpectrumModel::infinite_well(), Branch::Dual),
            (SpectrumModel::hydrogen(), Branch::Dual),
            (SpectrumModel::su11_gp(1.5).unwrap(), Branch::Gk),
            (SpectrumModel::su11_bg(2.0).unwrap(), Branch::Dual),
        ];
        for (m, b) in cases {
            let closed = kernel(&m, b, w).unwrap().unwrap();
            let series = series_kernel(&m, b, w, 200);
            assert!((closed - series).norm() < 1e-13 * series.norm(), "{} {b}", m.label());
        }
        let morse = SpectrumModel::morse(8).unwrap();
        let big = C64::new(5.0, 3.0);
        let closed = kernel(&morse, Branch::Dual, big).unwrap().unwrap();
        assert!((closed - series_kernel(&morse, Branch::Dual, big, 8)).norm() < 1e-12 * closed.norm());
    }

    #[test]
    fn dual_moments_match_products() {
        let models = [
            SpectrumModel::harmonic(),
            SpectrumModel::poschl_teller(3.0).unwrap(),
            SpectrumModel::infinite_well(),
            SpectrumModel::morse(4).unwrap(),
            SpectrumModel::hydrogen(),
        ];
        for m in models {
            let top = m.max_index().unwrap_or(60);
            let t = m.moment_table(top).unwrap();
            for n in 0..=top {
                let ln = dual_moment_ln(&m, n).unwrap().unwrap();
                assert!((ln - t.log_mu[n]).abs() < 1e-12 * (1.0 + ln.abs()), "{} n={n}", m.label());
            }
        }
        assert!(dual_moment_ln(&SpectrumModel::morse(4).unwrap(), 5).unwrap().is_err());
    }

    #[test]
    fn cat_distribution_sums_to_one() {
        let well = SpectrumModel::infinite_well();
        let p = cat_distribution(&well, 0.4, std::f64::consts::FRAC_PI_3, CatKind::Imaginary, 40).unwrap();
        assert_eq!(p[0], 0.0);
        assert_relative_eq!(p.iter().sum::<f64>(), 1.0, max_relative = 1e-14);
    }
}
