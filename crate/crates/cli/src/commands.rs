use std::f64::consts::PI;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use gkcs_core::closed_forms::{cat_distribution, normalization_closed_form, overlap_closed_form};
use gkcs_core::operators::{self, Conjugate, Displacement, Ladder};
use gkcs_core::spectra::{Radius, CATALOG};
use gkcs_core::states::{self, CatKind, Parity};
use gkcs_core::verify::run_suite;
use gkcs_core::{Branch, Family, FockVector, SpectrumModel, SuiteConfig, TruncatedOperator, TruncationConfig, C64};
use serde_json::{json, Value};

use crate::config::{parse_z, Format, OpArgs, Quantity, RunConfig, StateArgs, SweepArgs, Task, VerifyArgs};
use crate::output::{emit, float_json, Artifact};

fn model(spec: &str) -> anyhow::Result<SpectrumModel> {
    SpectrumModel::from_spec(spec).with_context(|| format!("model `{spec}`"))
}

fn family(s: &str) -> anyhow::Result<Family> {
    Ok(s.parse::<Family>()?)
}

fn truncation(tail_tol: f64, cutoff: Option<usize>) -> TruncationConfig {
    TruncationConfig { tail_tolerance: tail_tol, fixed_cutoff: cutoff, ..TruncationConfig::default() }
}

/// `a..b` or `a..=b`, both inclusive.
fn parse_range(s: &str) -> anyhow::Result<(usize, usize)> {
    let (a, b) = s.split_once("..").ok_or_else(|| anyhow!("range must look like a..b, got `{s}`"))?;
    let b = b.trim_start_matches('=');
    let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
    if a > b {
        bail!("empty range `{s}`");
    }
    Ok((a, b))
}

fn radius_text(r: Radius) -> String {
    match r {
        Radius::FiniteDimensional => "finite dim".into(),
        Radius::Unbounded => "inf".into(),
        Radius::Finite(v) => v.to_string(),
    }
}

pub fn spectra_list(spec: Option<&str>, range: &str, json: bool) -> anyhow::Result<String> {
    let Some(spec) = spec else {
        if json {
            return Ok(serde_json::to_string_pretty(&CATALOG)? + "\n");
        }
        let header = ["name", "params", "constraint", "e_n", "eps_n", "R_gk", "R_dual"];
        let rows: Vec<[&str; 7]> = CATALOG
            .iter()
            .map(|c| [c.name, c.params, c.constraint, c.e_n, c.eps_n, c.radius_gk, c.radius_dual])
            .collect();
        let mut widths = header.map(str::len);
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[&str; 7]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&header);
        for r in &rows {
            out.push_str(&line(r));
        }
        return Ok(out);
    };

    let m = model(spec)?;
    let (a, b) = parse_range(range)?;
    let table = m.moment_table(b)?;
    let r_gk = radius_text(m.convergence_radius(Branch::Gk)?);
    let r_dual = radius_text(m.convergence_radius(Branch::Dual)?);
    let rows: Vec<(usize, f64, f64, f64, f64)> =
        (a..=b).map(|n| (n, table.e[n], table.eps[n], table.log_rho[n], table.log_mu[n])).collect();
    if json {
        let body = json!({
            "model": m.label(),
            "radius_gk": r_gk,
            "radius_dual": r_dual,
            "rows": rows.iter().map(|r| json!({"n": r.0, "e": r.1, "eps": r.2, "ln_rho": r.3, "ln_mu": r.4})).collect::<Vec<_>>(),
        });
        return Ok(serde_json::to_string_pretty(&body)? + "\n");
    }
    let mut out = format!("# model: {}\n# radius_gk: {r_gk}\n# radius_dual: {r_dual}\nn,e,eps,ln_rho,ln_mu\n", m.label());
    for (n, e, eps, lr, lm) in rows {
        out.push_str(&format!("{n},{e},{eps},{lr},{lm}\n"));
    }
    Ok(out)
}

pub fn execute(cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    match &cfg.task {
        Task::State(a) => state_eval(cfg, a),
        Task::Op(a) => op_dump(cfg, a),
        Task::Sweep(a) => sweep(cfg, a),
        Task::Verify(a) => verify_suite(cfg, a),
    }
}

fn file_name(stem: &str, format: Format) -> String {
    match format {
        Format::Csv => format!("{stem}.csv"),
        Format::Json => format!("{stem}.json"),
    }
}

fn build_state(m: &SpectrumModel, fam: Family, z: C64, alpha: f64, trunc: &TruncationConfig) -> anyhow::Result<FockVector> {
    Ok(match fam {
        Family::Gk => states::gkcs(m, z, alpha, trunc)?,
        Family::DualGk => states::dgkcs(m, z, alpha, trunc)?,
        Family::EvenDual => states::even_odd(m, z, alpha, Parity::Even, trunc)?,
        Family::OddDual => states::even_odd(m, z, alpha, Parity::Odd, trunc)?,
        Family::CatReal => states::cat(m, z, alpha, CatKind::Real, trunc)?,
        Family::CatImag => states::cat(m, z, alpha, CatKind::Imaginary, trunc)?,
        Family::GeneralizedGk | Family::GeneralizedDual => {
            states::generalized_gkcs(m, z.norm_sqr(), z.arg(), alpha / m.omega(), fam.branch(), trunc)?
        }
    })
}

fn state_eval(cfg: &RunConfig, a: &StateArgs) -> anyhow::Result<ExitCode> {
    let m = model(&a.model)?;
    let fam = family(&a.family)?;
    let z = parse_z(&a.z)?;
    let s = build_state(&m, fam, z, a.alpha, &truncation(a.tail_tol, a.cutoff))?;
    let mut art = Artifact::default();
    art.meta("model", m.label());
    art.meta("family", fam.as_str());
    art.meta_f64("z_re", z.re);
    art.meta_f64("z_im", z.im);
    art.meta_f64("alpha", a.alpha);
    art.meta("cutoff", s.cutoff());
    art.meta_f64("norm_constant", s.norm_constant);
    art.meta_f64("log_norm_constant", s.log_norm_constant);
    art.meta_f64("tail_bound", s.tail_bound);
    art.columns = vec![("n", "Fock index"), ("re", "Re c_n"), ("im", "Im c_n"), ("p", "|c_n|^2")];
    art.rows = s.amplitudes.iter().enumerate().map(|(n, c)| vec![n.into(), c.re.into(), c.im.into(), c.norm_sqr().into()]).collect();
    let format = a.format.format();
    emit(cfg.output_path(&file_name("state", format)), &art.render(cfg, format)?)?;
    Ok(ExitCode::SUCCESS)
}

fn operator(m: &SpectrumModel, a: &OpArgs) -> anyhow::Result<TruncatedOperator> {
    let n = a.cutoff;
    let branch = if a.dual { Branch::Dual } else { Branch::Gk };
    let z = || -> anyhow::Result<C64> {
        parse_z(a.z.as_deref().ok_or_else(|| anyhow!("--op {} needs --z re,im", a.op))?)
    };
    Ok(match (a.op.as_str(), a.dual) {
        ("A", false) => operators::ladder(m, a.alpha, n, Ladder::A)?,
        ("A", true) => operators::ladder(m, a.alpha, n, Ladder::DualA)?,
        ("Adag", false) => operators::ladder(m, a.alpha, n, Ladder::ADag)?,
        ("Adag", true) => operators::ladder(m, a.alpha, n, Ladder::DualADag)?,
        ("B", false) => operators::conjugate_b(m, a.alpha, n, Conjugate::B)?,
        ("B", true) => operators::conjugate_b(m, a.alpha, n, Conjugate::DualB)?,
        ("Bdag", false) => operators::conjugate_b(m, a.alpha, n, Conjugate::BDag)?,
        ("Bdag", true) => operators::conjugate_b(m, a.alpha, n, Conjugate::DualBDag)?,
        ("S", dual) => operators::evolution(m, a.alpha, n, dual)?,
        ("H", dual) => operators::hamiltonian(m, n, dual)?,
        ("T", _) => operators::interpolator(m, n)?.to_operator()?,
        ("D", false) => operators::displacement(m, z()?, a.alpha, n, Displacement::D)?,
        ("D", true) => operators::displacement(m, z()?, a.alpha, n, Displacement::DualD)?,
        ("V", false) => operators::displacement(m, z()?, a.alpha, n, Displacement::V)?,
        ("V", true) => operators::displacement(m, z()?, a.alpha, n, Displacement::DualV)?,
        ("acheck", _) => operators::check_a(m, n, false, branch)?,
        ("acheck_dag", _) => operators::check_a(m, n, true, branch)?,
        (other, _) => bail!("unknown operator `{other}` (A, Adag, B, Bdag, S, T, H, D, V, acheck, acheck_dag)"),
    })
}

fn op_dump(cfg: &RunConfig, a: &OpArgs) -> anyhow::Result<ExitCode> {
    let m = model(&a.model)?;
    let op = operator(&m, a)?;
    let dim = op.dim();
    let mut art = Artifact::default();
    art.meta("model", m.label());
    art.meta("op", op.tag.clone());
    art.meta("dual", a.dual);
    art.meta_f64("alpha", a.alpha);
    art.meta("cutoff", op.cutoff());
    art.meta("dim", dim);
    art.columns = vec![("row", "bra index"), ("col", "ket index"), ("re", "Re entry"), ("im", "Im entry")];
    for r in 0..dim {
        for c in 0..dim {
            let v = op.matrix[(r, c)];
            art.rows.push(vec![r.into(), c.into(), v.re.into(), v.im.into()]);
        }
    }
    let dense = |f: fn(C64) -> f64| -> Value {
        Value::Array((0..dim).map(|r| Value::Array((0..dim).map(|c| float_json(f(op.matrix[(r, c)]))).collect())).collect())
    };
    art.json_body = Some(("matrix", json!({ "re": dense(|v| v.re), "im": dense(|v| v.im) })));
    let format = a.format.format();
    emit(cfg.output_path(&file_name(&format!("op_{}", a.op), format)), &art.render(cfg, format)?)?;
    Ok(ExitCode::SUCCESS)
}

fn sweep(cfg: &RunConfig, a: &SweepArgs) -> anyhow::Result<ExitCode> {
    let m = model(&a.model)?;
    let fam = family(&a.family)?;
    let branch = fam.branch();
    let trunc = truncation(a.tail_tol, None);
    let radius = m.convergence_radius(branch)?;
    let scale = match radius {
        Radius::Finite(r) => r,
        _ => a.infinite_radius,
    };
    let admissible = radius.admissible();

    let mut art = Artifact::default();
    art.meta("model", m.label());
    art.meta("family", fam.as_str());
    art.meta("quantity", serde_json::to_value(a.quantity)?);
    art.meta_f64("alpha", a.alpha);
    art.meta("radius", radius_text(radius));
    let mut skipped: Vec<String> = Vec::new();

    let radial: Vec<C64> = {
        let steps = a.points.max(2) - 1;
        (0..a.points)
            .map(|k| C64::from_polar(scale * (a.r_min + (a.r_max - a.r_min) * k as f64 / steps as f64), a.theta))
            .collect()
    };
    let mut in_radius = Vec::new();
    for z in radial {
        if z.norm() >= admissible {
            skipped.push(format!("|z|={} outside the admissible radius {admissible}", z.norm()));
        } else {
            in_radius.push(z);
        }
    }

    match a.quantity {
        Quantity::Action => {
            art.columns = vec![
                ("r", "|z|"),
                ("x", "|z|^2"),
                ("mean_energy", "<H>/omega in the state"),
                ("rel_residual", "|<H>/omega - |z|^2| / |z|^2"),
            ];
            for z in in_radius {
                let s = build_state(&m, fam, z, a.alpha, &trunc)?;
                let table = m.moment_table(s.cutoff())?;
                let mean: f64 = s.probabilities().iter().enumerate().map(|(n, p)| p * table.energy(branch, n)).sum();
                let x = z.norm_sqr();
                art.rows.push(vec![z.norm().into(), x.into(), mean.into(), ((mean - x).abs() / x).into()]);
            }
        }
        Quantity::Distribution => {
            let z = parse_z(a.z.as_deref().ok_or_else(|| anyhow!("--quantity distribution needs --z re,im"))?)?;
            let s = build_state(&m, fam, z, a.alpha, &trunc)?;
            art.meta_f64("z_re", z.re);
            art.meta_f64("z_im", z.im);
            art.meta("cutoff", s.cutoff());
            art.meta_f64("tail_bound", s.tail_bound);
            art.columns = vec![("n", "Fock index"), ("p", "photon-number probability")];
            art.rows = s.probabilities().into_iter().enumerate().map(|(n, p)| vec![n.into(), p.into()]).collect();
        }
        Quantity::CatTheta => {
            let kind = match fam {
                Family::CatReal => CatKind::Real,
                Family::CatImag => CatKind::Imaginary,
                _ => bail!("--quantity cat-theta needs --family cat-real or cat-imag"),
            };
            let r = a.r.unwrap_or(0.5 * scale);
            if r >= admissible {
                bail!("r={r} is outside the admissible radius {admissible}");
            }
            art.meta_f64("r", r);
            art.columns = vec![
                ("theta", "arg z"),
                ("n", "Fock index"),
                ("p", "probability from the constructed state"),
                ("p_formula", "r^(2n)(1 +- cos 2n theta)/mu(n), normalized on the same cutoff"),
                ("abs_diff", "|p - p_formula|"),
            ];
            let steps = a.theta_points.max(2) - 1;
            for k in 0..a.theta_points {
                let theta = PI * k as f64 / steps as f64;
                let s = match states::cat(&m, C64::from_polar(r, theta), a.alpha, kind, &trunc) {
                    Ok(s) => s,
                    Err(e) => {
                        skipped.push(format!("theta={theta}: {e}"));
                        continue;
                    }
                };
                let formula = cat_distribution(&m, r, theta, kind, s.cutoff())?;
                for (n, (p, q)) in s.probabilities().into_iter().zip(formula).enumerate() {
                    art.rows.push(vec![theta.into(), n.into(), p.into(), q.into(), (p - q).abs().into()]);
                }
            }
        }
        Quantity::Overlap => {
            let Some(&z0) = in_radius.first() else { bail!("no grid point inside the radius") };
            art.meta_f64("z0_re", z0.re);
            art.meta_f64("z0_im", z0.im);
            art.columns = vec![
                ("r", "|z|"),
                ("re", "Re <z0|z>"),
                ("im", "Im <z0|z>"),
                ("abs", "|<z0|z>|"),
                ("closed_re", "closed form, NaN where unknown"),
                ("closed_im", "closed form, NaN where unknown"),
            ];
            let s0 = build_state(&m, fam, z0, a.alpha, &trunc)?;
            for z in in_radius {
                let s = build_state(&m, fam, z, a.alpha, &trunc)?;
                let ov = states::overlap(&s0, &s)?;
                let closed = match fam {
                    Family::Gk | Family::DualGk if a.alpha == 0.0 => overlap_closed_form(&m, branch, z0, z).transpose()?,
                    _ => None,
                }
                .unwrap_or(C64::new(f64::NAN, f64::NAN));
                art.rows.push(vec![z.norm().into(), ov.re.into(), ov.im.into(), ov.norm().into(), closed.re.into(), closed.im.into()]);
            }
        }
        Quantity::Normalization => {
            art.columns = vec![
                ("x", "|z|^2"),
                ("series", "truncated series normalization"),
                ("closed", "closed form, NaN where unknown"),
                ("rel_err", "|series - closed| / closed"),
            ];
            for z in in_radius {
                let x = z.norm_sqr();
                let series = states::normalization(&m, x, branch, &trunc)?;
                let closed = normalization_closed_form(&m, branch, x).transpose()?.unwrap_or(f64::NAN);
                art.rows.push(vec![x.into(), series.into(), closed.into(), ((series - closed).abs() / closed).into()]);
            }
        }
    }

    for s in &skipped {
        eprintln!("skipped: {s}");
    }
    art.meta("skipped", Value::Array(skipped.into_iter().map(Value::String).collect()));
    let format = a.format.format();
    let stem = format!("sweep_{}", serde_json::to_value(a.quantity)?.as_str().unwrap_or("data"));
    emit(cfg.output_path(&file_name(&stem, format)), &art.render(cfg, format)?)?;
    Ok(ExitCode::SUCCESS)
}

fn verify_suite(cfg: &RunConfig, a: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let m = model(&a.model)?;
    let fam = family(&a.family)?;
    let suite: SuiteConfig = match (&a.suite, &a.config) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, None) => SuiteConfig::default(),
    };
    // Record the resolved suite so the report reruns without the config file.
    let mut recorded = cfg.clone();
    if let Task::Verify(args) = &mut recorded.task {
        args.suite = Some(suite.clone());
    }

    let report = run_suite(&m, fam, &suite);
    if !a.quiet {
        for e in &report.entries {
            let status = serde_json::to_value(e.status)?;
            eprintln!("{:<8} {:<32} residual={:.3e} tol={:.1e}", status.as_str().unwrap_or("?").to_uppercase(), e.name, e.residual, e.tolerance);
        }
        if report.aborted {
            eprintln!("aborted after a failed spectrum validation");
        }
        let failing = report.failing();
        if !failing.is_empty() {
            eprintln!("failing: {}", failing.join(", "));
        }
        eprintln!("overall: {}", if report.pass { "PASS" } else { "FAIL" });
    }

    let mut body = serde_json::to_value(&report)?;
    if let Value::Object(map) = &mut body {
        map.insert("run_config".into(), serde_json::to_value(&recorded)?);
    }
    let text = serde_json::to_string_pretty(&body)? + "\n";
    emit(cfg.output_path("report.json"), &text)?;
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..5").unwrap(), (0, 5));
        assert_eq!(parse_range("2..=4").unwrap(), (2, 4));
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("5").is_err());
    }

    #[test]
    fn catalog_listing_has_eight_models() {
        let text = spectra_list(None, "0..10", false).unwrap();
        assert_eq!(text.lines().count(), 9);
    }
}
