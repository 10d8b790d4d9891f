//! Bessel function `J₀`, accurate to ~1e-11 over the full real line.
//!
//! Used by the radial kernel evaluator in two dimensions, where radial
//! Fourier inversion reduces to a Hankel transform of order zero. The
//! implementation is the classical split: Maclaurin series up to `|x| = 12`,
//! Hankel's asymptotic expansion beyond. Both pieces are checked against
//! high-precision reference values in the tests.

/// Bessel function of the first kind, order zero.
pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 12.0 {
        j0_series(ax)
    } else {
        j0_asymptotic(ax)
    }
}

/// Maclaurin series Σ (-x²/4)^k / (k!)². At `x = 12` the largest term is
/// ~4e3, so f64 cancellation costs ~5 digits, leaving ~1e-12 absolute.
fn j0_series(x: f64) -> f64 {
    let q = -x * x / 4.0;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..=48 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}

/// Hankel expansion: J₀(x) = √(2/πx)·[P cos(x-π/4) - Q sin(x-π/4)] with
/// P ~ Σ (-1)^m A_{2m} x^{-2m}, Q ~ Σ (-1)^{m+1} A_{2m+1} x^{-2m-1},
/// A_m = (1·3·…·(2m-1))² / (m!·8^m). Summed to the smallest term.
fn j0_asymptotic(x: f64) -> f64 {
    let mut p = 0.0f64;
    let mut q = 0.0f64;
    // a = A_m / x^m, built up recursively: a_{m+1} = a_m (2m+1)^2 / (8 x (m+1))
    let mut a = 1.0f64;
    let mut prev = f64::INFINITY;
    for m in 0..24u32 {
        if a.abs() >= prev || a.abs() < 1e-18 {
            break; // smallest term reached (or negligible)
        }
        prev = a.abs();
        if m % 2 == 0 {
            // even m contributes to P with sign (-1)^{m/2}
            let s = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
            p += s * a;
        } else {
            // odd m contributes to Q with sign (-1)^{(m+1)/2}
            let s = if ((m + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            q += s * a;
        }
        let mf = m as f64;
        a *= (2.0 * mf + 1.0).powi(2) / (8.0 * x * (mf + 1.0));
    }
    let chi = x - std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference values computed with 50-digit arithmetic.
    const REFERENCE: &[(f64, f64)] = &[
        (0.0, 1.0),
        (0.5, 0.93846980724081290423),
        (1.0, 0.76519768655796655145),
        (2.0, 0.22389077914123566805),
        (5.0, -0.17759677131433830435),
        (8.0, 0.17165080713755390609),
        (10.0, -0.2459357644513483352),
        (11.99, 0.045451560352858556046),
        (12.01, 0.049920430319825401734),
        (14.0, 0.17107347611045865906),
        (20.0, 0.16702466434058315473),
        (50.0, 0.055812327669251815005),
        (123.456, -0.07103006241837072687),
        (1000.0, 0.024786686152420174561),
        (16000.0, -0.0038374975364160445506),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, expect) in REFERENCE {
            let got = j0(x);
            assert!(
                (got - expect).abs() < 1e-10,
                "j0({x}) = {got:.17e}, want {expect:.17e}"
            );
        }
    }

    #[test]
    fn even_function() {
        for &(x, _) in REFERENCE {
            assert_eq!(j0(x), j0(-x));
        }
    }

    /// The two branches agree to high accuracy in a window around the
    /// crossover point.
    #[test]
    fn branch_crossover_is_smooth() {
        for i in 0..100 {
            let x = 11.5 + i as f64 * 0.01;
            let a = j0_series(x);
            let b = j0_asymptotic(x);
            assert!(
                (a - b).abs() < 5e-12,
                "series/asymptotic mismatch at {x}: {a} vs {b}"
            );
        }
    }
}
