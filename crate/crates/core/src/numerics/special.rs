use crate::error::{GkError, Result};
use crate::C64;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Natural log of the gamma function for `x > 0`.
///
/// Positive integers up to 171 are summed exactly as `ln((x-1)!)` so that
/// `Γ(1) = Γ(2) = 1` come out as exact zeros; everything else goes through
/// the Lanczos series, with the reflection formula below one half.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(GkError::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    if x.fract() == 0.0 && x <= 171.0 {
        return Ok(ln_factorial(x as usize - 1));
    }
    Ok(lanczos_ln_gamma(x))
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx); sin(πx) > 0 on (0, 1/2)
        let s = (std::f64::consts::PI * x).sin();
        return std::f64::consts::PI.ln() - s.ln() - lanczos_ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln(n!)`, summed directly.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Modified Bessel function of the first kind `I_ν(x)` for integer order
/// and `x >= 0`, by the ascending series
/// `Σ (x/2)^{2k+ν} / (k! (k+ν)!)`.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(GkError::Domain(format!("bessel_i requires finite x >= 0, got {x}")));
    }
    Ok(bessel_i_complex(order, C64::new(x, 0.0)).re)
}

/// Ascending series for `I_ν(w)` at complex argument; entire in `w`.
///
/// Accurate to roughly machine precision for `|w|` up to a few tens, which
/// covers every argument used here.
pub fn bessel_i_complex(order: u32, w: C64) -> C64 {
    let half = w * 0.5;
    let q = half * half;
    // first term (w/2)^ν / ν!
    let mut term = C64::new(1.0, 0.0);
    for k in 1..=order {
        term = term * half / k as f64;
    }
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term = term * q / (k as f64 * (k + order) as f64);
        sum += term;
        // terms decay monotonically once k exceeds |q|
        if (k as f64) > q.norm() && term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        if k > 10_000 || term.norm() == 0.0 {
            break;
        }
    }
    sum
}
