//! Function-space norms on grid functions: Lebesgue, Lorentz, Herz, and
//! power-weighted L².
//!
//! All of these act on spatial samples; cells carry Lebesgue mass `Δx^d`,
//! and radial weights use the origin-regularized cell radius
//! (`r(0) := Δx/2`, see [`crate::grid::GridSpec::cell_radius`]).

use crate::error::{Error, Result};
use crate::grid::{annuli, AnnulusDecomposition, DomainTag, GridFunction, GridSpec, TestBank};
use crate::report::RatioReport;

fn expect_space(f: &GridFunction, what: &str) -> Result<()> {
    if f.domain != DomainTag::Space {
        return Err(Error::DomainMismatch(format!(
            "{what} expects spatial samples"
        )));
    }
    Ok(())
}

/// `‖f‖_p = (Σ |f|^p Δx^d)^{1/p}` for finite `p > 0`; `p = ∞` gives the sup.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    expect_space(f, "lp_norm")?;
    if p.is_infinite() {
        return Ok(f.sup_norm());
    }
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "exponent must be positive, got {p}"
        )));
    }
    let vol = f.spec.cell_volume();
    let sum: f64 = f.values.iter().map(|v| v.norm().powf(p)).sum();
    Ok((sum * vol).powf(1.0 / p))
}

/// Lorentz norm by decreasing rearrangement:
///
/// ```text
/// ‖f‖_{p,q} = ( ∫_0^∞ (t^{1/p} f*(t))^q dt/t )^{1/q}
/// ```
///
/// with `‖f‖_{p,∞} = sup_t t^{1/p} f*(t)`. The rearrangement is the step
/// function over cells sorted by `|f|`, each of mass `Δx^d`, and the `t`
/// integral is evaluated in closed form per step. With this normalization
/// `‖f‖_{p,p} = ‖f‖_p` exactly, and an indicator of measure `m` has norm
/// `(p/q)^{1/q} m^{1/p}`.
pub fn lorentz_norm(f: &GridFunction, p: f64, q: f64) -> Result<f64> {
    expect_space(f, "lorentz_norm")?;
    if !(p > 0.0) || !p.is_finite() || !(q > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lorentz exponents must be positive with p finite, got ({p}, {q})"
        )));
    }
    let mut mags: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let vol = f.spec.cell_volume();
    if q.is_infinite() {
        // on a step [t0, t1] with value v the sup of t^{1/p} v is at t1
        let mut best = 0.0f64;
        for (i, v) in mags.iter().enumerate() {
            if *v == 0.0 {
                break;
            }
            let t1 = (i + 1) as f64 * vol;
            best = best.max(v * t1.powf(1.0 / p));
        }
        return Ok(best);
    }
    let ratio = q / p;
    let mut acc = 0.0;
    for (i, v) in mags.iter().enumerate() {
        if *v == 0.0 {
            break;
        }
        let t0 = i as f64 * vol;
        let t1 = (i + 1) as f64 * vol;
        acc += v.powf(q) * (t1.powf(ratio) - t0.powf(ratio)) * (p / q);
    }
    Ok(acc.powf(1.0 / q))
}

/// Herz norm over dyadic annuli:
///
/// ```text
/// ‖f‖ = ( Σ_l (2^{lγ} ‖f‖_{L²(A_l)})^q )^{1/q}
/// ```
///
/// (`q = ∞` takes the sup over annuli). The decomposition must cover the
/// function: if more than a 1e-8 relative fraction of the L² mass lies
/// outside the annuli, the value would silently depend on the cutoff, so
/// this is a guard error instead.
pub fn herz_norm(
    f: &GridFunction,
    dec: &AnnulusDecomposition,
    gamma: f64,
    q: f64,
) -> Result<f64> {
    expect_space(f, "herz_norm")?;
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "herz exponent must be positive, got {q}"
        )));
    }
    let missing = dec.uncovered_fraction(f)?;
    if missing > 1e-8 {
        return Err(Error::Guard(format!(
            "annuli [{}, {}] miss a {missing:.3e} fraction of the L2 mass",
            dec.l_min, dec.l_max
        )));
    }
    let mut acc = 0.0f64;
    let mut sup = 0.0f64;
    for l in dec.levels() {
        let mass = dec.l2_mass_sq(f, l)?.sqrt();
        let term = 2f64.powf(gamma * l as f64) * mass;
        if q.is_infinite() {
            sup = sup.max(term);
        } else {
            acc += term.powf(q);
        }
    }
    if q.is_infinite() {
        Ok(sup)
    } else {
        Ok(acc.powf(1.0 / q))
    }
}

/// Power-weighted L² norm `(Σ |f(x)|² r(x)^a Δx^d)^{1/2}` with the
/// origin-regularized radius.
pub fn weighted_l2_norm(f: &GridFunction, a: f64) -> Result<f64> {
    expect_space(f, "weighted_l2_norm")?;
    let vol = f.spec.cell_volume();
    let mut acc = 0.0;
    for (flat, v) in f.values.iter().enumerate() {
        let r = f.spec.cell_radius(flat);
        acc += v.norm_sqr() * r.powf(a);
    }
    Ok((acc * vol).sqrt())
}

/// Annulus-blocked weighted norm `( Σ_l [ ∫_{A_l} |f|^r r(x)^{-a} ]^{q/r} )^{1/q}`
/// (`q = ∞` takes the sup over blocks), with the same coverage guard as the
/// Herz norm.
fn weighted_block_norm(
    f: &GridFunction,
    dec: &AnnulusDecomposition,
    a: f64,
    r: f64,
    q: f64,
) -> Result<f64> {
    let missing = dec.uncovered_fraction(f)?;
    if missing > 1e-8 {
        return Err(Error::Guard(format!(
            "annuli [{}, {}] miss a {missing:.3e} fraction of the L2 mass",
            dec.l_min, dec.l_max
        )));
    }
    let vol = f.spec.cell_volume();
    let mut acc = 0.0f64;
    let mut sup = 0.0f64;
    for l in dec.levels() {
        let mask = dec
            .mask(l)
            .ok_or_else(|| Error::InvalidParameter(format!("annulus {l} out of range")))?;
        let mut block = 0.0;
        for (flat, (v, &m)) in f.values.iter().zip(mask.iter()).enumerate() {
            if m {
                block += v.norm().powf(r) * f.spec.cell_radius(flat).powf(-a);
            }
        }
        let term = (block * vol).powf(1.0 / r);
        if q.is_infinite() {
            sup = sup.max(term);
        } else {
            acc += term.powf(q);
        }
    }
    if q.is_infinite() {
        Ok(sup)
    } else {
        Ok(acc.powf(1.0 / q))
    }
}

/// Embedding of the Lorentz space into the weighted annulus-block space at
/// the scaling-critical integrability index.
///
/// For each bank entry the check compares
///
/// ```text
/// lhs = ( Σ_l [ ∫_{A_l} |f|^r |x|^{-a} dx ]^{q/r} )^{1/q}
/// rhs = ‖f‖_{L^{p,q}}      with  p = r·d/(d−a),
/// ```
///
/// so both sides obey the same dilation law and the ratio is scale-free.
/// The report records per-entry ratios, their extremes, the argmax entry id
/// (in `params`), and the symmetry drift under exact dyadic dilation —
/// realized by reinterpreting the same samples on a grid of half the width,
/// which shifts every annulus index by one and rescales every cell radius
/// bit-exactly, so the drift isolates pure floating-point error.
pub fn check_embedding(bank: &TestBank, a: f64, r: f64, q: f64) -> Result<RatioReport> {
    let d = bank.spec.dim as f64;
    if !(a > 0.0 && a < d) {
        return Err(Error::InvalidParameter(format!(
            "weight exponent must satisfy 0 < a < d = {d}, got {a}"
        )));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "block integrability r must be positive and finite, got {r}"
        )));
    }
    if !(q > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "outer exponent must satisfy 1 < q ≤ ∞, got {q}"
        )));
    }
    let p = r * d / (d - a);

    let ratio_on = |spec: GridSpec, values: &[num_complex::Complex64]| -> Result<f64> {
        let mut g = GridFunction::zeros(spec, DomainTag::Space);
        g.values.copy_from_slice(values);
        let (l_min, l_max) = AnnulusDecomposition::default_range(&spec);
        let dec = annuli(spec, l_min, l_max)?;
        let lhs = weighted_block_norm(&g, &dec, a, r, q)?;
        let rhs = lorentz_norm(&g, p, q)?;
        if rhs == 0.0 {
            return Err(Error::Guard(
                "embedding check needs a nonzero entry".into(),
            ));
        }
        Ok(lhs / rhs)
    };

    let mut rows = Vec::with_capacity(bank.entries.len());
    let mut drift = 0.0f64;
    for (f, label) in bank.entries.iter().zip(bank.labels.iter()) {
        let (l_min, l_max) = AnnulusDecomposition::default_range(&bank.spec);
        let dec = annuli(bank.spec, l_min, l_max)?;
        let lhs = weighted_block_norm(f, &dec, a, r, q)?;
        let rhs = lorentz_norm(f, p, q)?;
        rows.push((label.clone(), lhs, rhs));
        if rhs == 0.0 {
            continue;
        }
        let base = lhs / rhs;
        for m in [-1i32, 1] {
            let spec = GridSpec::new(
                bank.spec.dim,
                bank.spec.n,
                bank.spec.half_width * 2f64.powi(-m),
            )?;
            let scaled = ratio_on(spec, &f.values)?;
            drift = drift.max((scaled / base - 1.0).abs());
        }
    }

    let argmax = rows
        .iter()
        .max_by(|x, y| (x.1 / x.2).partial_cmp(&(y.1 / y.2)).unwrap())
        .map(|e| e.0.clone())
        .unwrap_or_default();
    let params = serde_json::json!({
        "a": a, "r": r, "q": q, "p": p,
        "grid": {"dim": bank.spec.dim, "n": bank.spec.n, "half_width": bank.spec.half_width},
        "seed": bank.seed,
        "argmax": argmax,
        "dilation_exponents": [-1, 1],
    });
    RatioReport::new("embedding", rows, Some(drift), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{annuli, make_bank, GridSpec};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn spec2() -> GridSpec {
        GridSpec::new(2, 256, 16.0).unwrap()
    }

    #[test]
    fn lorentz_diagonal_is_lp() {
        let spec = spec2();
        let f = GridFunction::from_space_fn(spec, |x| {
            Complex64::new((-(x[0] * x[0] + 0.7 * x[1] * x[1]) / 3.0).exp(), 0.2 * x[0].sin())
        });
        for &p in &[1.0f64, 1.5, 2.0, 4.0] {
            let a = lorentz_norm(&f, p, p).unwrap();
            let b = lp_norm(&f, p).unwrap();
            assert!(
                (a - b).abs() < 1e-12 * b,
                "collapse failed at p={p}: {a:.15e} vs {b:.15e}"
            );
        }
    }

    #[test]
    fn lorentz_indicator_closed_form() {
        let spec = spec2();
        let f = GridFunction::from_space_fn(spec, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            Complex64::new(if r2 < 4.0 { 1.0 } else { 0.0 }, 0.0)
        });
        // exact discrete measure of the support
        let m = f.values.iter().filter(|v| v.re != 0.0).count() as f64 * spec.cell_volume();
        for &(p, q) in &[(2.0f64, 1.0f64), (1.5, 3.0), (2.0, f64::INFINITY), (3.0, 0.5)] {
            let got = lorentz_norm(&f, p, q).unwrap();
            let expect = if q.is_infinite() {
                m.powf(1.0 / p)
            } else {
                (p / q).powf(1.0 / q) * m.powf(1.0 / p)
            };
            assert!(
                (got - expect).abs() < 1e-12 * expect,
                "indicator norm at ({p},{q}): {got:.15e} vs {expect:.15e}"
            );
        }
    }

    /// Weak-type bound with the sharp constant of this normalization:
    /// `sup_α α·|{|f|>α}|^{1/p} ≤ (q/p)^{1/q} ‖f‖_{p,q}`, with equality for
    /// indicators.
    #[test]
    fn lorentz_weak_type_constant() {
        let spec = GridSpec::new(2, 64, 8.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..20 {
            // random superposition of up to 4 nested indicator levels
            let levels: Vec<(f64, f64)> = (0..rng.gen_range(1..=4))
                .map(|_| (rng.gen_range(0.5..4.0), rng.gen_range(0.2..2.0)))
                .collect();
            let f = GridFunction::from_space_fn(spec, |x| {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                let mut v = 0.0;
                for (rad, amp) in &levels {
                    if r < *rad {
                        v += amp;
                    }
                }
                Complex64::new(v, 0.0)
            });
            let p = rng.gen_range(1.0..3.0);
            let q = rng.gen_range(0.7..3.0);
            let norm = lorentz_norm(&f, p, q).unwrap();
            // distribution function from the exact cell measure
            let mut mags: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
            mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let vol = spec.cell_volume();
            let mut weak = 0.0f64;
            for (i, v) in mags.iter().enumerate() {
                if *v == 0.0 {
                    break;
                }
                // alpha just below v captures at least (i+1) cells
                weak = weak.max(v * ((i + 1) as f64 * vol).powf(1.0 / p));
            }
            let bound = (q / p).powf(1.0 / q) * norm;
            assert!(
                weak <= bound * (1.0 + 1e-12),
                "trial {trial}: weak {weak:.12e} > bound {bound:.12e}"
            );
        }
    }

    #[test]
    fn herz_of_unit_annulus_indicator() {
        let spec = spec2();
        let dec = annuli(spec, -3, 3).unwrap();
        let f = GridFunction::from_space_fn(spec, |x| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            Complex64::new(if (1.0..2.0).contains(&r) { 1.0 } else { 0.0 }, 0.0)
        });
        // single annulus: the norm is its L² mass = sqrt(area) = sqrt(3π),
        // for any gamma weighted by 2^{0·γ} = 1, and independent of q
        let expect = (3.0 * PI).sqrt();
        for &(gamma, q) in &[(0.75f64, 1.0f64), (0.75, 2.0), (0.75, f64::INFINITY), (-0.5, 1.0)] {
            let got = herz_norm(&f, &dec, gamma, q).unwrap();
            assert!(
                (got / expect - 1.0).abs() < 0.02,
                "herz at ({gamma},{q}): {got} vs {expect}"
            );
        }
    }

    #[test]
    fn herz_q_monotone_and_guard() {
        let spec = spec2();
        let (l_min, l_max) = AnnulusDecomposition::default_range(&spec);
        let dec = annuli(spec, l_min, l_max).unwrap();
        let bank = make_bank(spec, 4, 4).unwrap();
        for f in &bank.entries {
            let n1 = herz_norm(f, &dec, 0.75, 1.0).unwrap();
            let n2 = herz_norm(f, &dec, 0.75, 2.0).unwrap();
            let ni = herz_norm(f, &dec, 0.75, f64::INFINITY).unwrap();
            assert!(ni <= n2 * (1.0 + 1e-12) && n2 <= n1 * (1.0 + 1e-12));
        }
        // a constant function has corner mass outside every annulus family
        let ones = GridFunction::from_space_fn(spec, |_| Complex64::new(1.0, 0.0));
        let err = herz_norm(&ones, &dec, 0.75, 2.0).unwrap_err();
        assert!(err.is_guard(), "expected guard, got {err}");
    }

    /// Comparability with the power weight: on each annulus the weight
    /// `r^{2γ}` is within a factor `2^{2|γ|}` of `2^{2lγ}`, so the q = 2
    /// Herz norm and the weighted L² norm agree within `2^{|γ|}` once the
    /// mass is covered.
    #[test]
    fn herz_weighted_comparability() {
        let spec = spec2();
        let (l_min, l_max) = AnnulusDecomposition::default_range(&spec);
        let dec = annuli(spec, l_min, l_max).unwrap();
        let bank = make_bank(spec, 21, 6).unwrap();
        for (f, label) in bank.entries.iter().zip(bank.labels.iter()) {
            for &gamma in &[0.5f64, 0.75, -0.25] {
                let herz = herz_norm(f, &dec, gamma, 2.0).unwrap();
                let weighted = weighted_l2_norm(f, 2.0 * gamma).unwrap();
                let factor = 2f64.powf(gamma.abs());
                let lo = weighted / (factor * (1.0 + 1e-6));
                let hi = weighted * factor * (1.0 + 1e-6);
                assert!(
                    herz >= lo && herz <= hi,
                    "{label} gamma={gamma}: herz {herz} outside [{lo}, {hi}]"
                );
            }
        }
    }

    #[test]
    fn weighted_norm_origin_regularization() {
        let spec = GridSpec::new(1, 8, 1.0).unwrap();
        let mut f = GridFunction::zeros(spec, DomainTag::Space);
        // unit mass at the origin cell only
        f.values[4] = Complex64::new(1.0, 0.0);
        let a = -0.5;
        let got = weighted_l2_norm(&f, a).unwrap();
        let expect = ((0.5 * spec.spacing()).powf(a) * spec.cell_volume()).sqrt();
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn all_norms_absolutely_homogeneous() {
        let spec = spec2();
        let (l_min, l_max) = AnnulusDecomposition::default_range(&spec);
        let dec = annuli(spec, l_min, l_max).unwrap();
        let bank = make_bank(spec, 5, 3).unwrap();
        let c = Complex64::new(-1.3, 2.4);
        for f in &bank.entries {
            let mut g = f.clone();
            for v in g.values.iter_mut() {
                *v *= c;
            }
            let pairs = [
                (lorentz_norm(f, 1.7, 2.4).unwrap(), lorentz_norm(&g, 1.7, 2.4).unwrap()),
                (herz_norm(f, &dec, 0.6, 2.0).unwrap(), herz_norm(&g, &dec, 0.6, 2.0).unwrap()),
                (weighted_l2_norm(f, -0.8).unwrap(), weighted_l2_norm(&g, -0.8).unwrap()),
            ];
            for (nf, ng) in pairs {
                assert!(
                    (ng - c.norm() * nf).abs() < 1e-12 * ng,
                    "homogeneity broken: {ng:.15e} vs {:.15e}",
                    c.norm() * nf
                );
            }
        }
    }

    /// Single-annulus indicator: both sides of the embedding have closed
    /// forms. With `f = χ_{1≤|x|<2}` in d = 2 and block index r = 2,
    /// the left side is `(2π(2^{2−a}−1)/(2−a))^{1/2}` (one block), the right
    /// is `(p/q)^{1/q}(3π)^{1/p}` with `p = 2d/(d−a)`.
    #[test]
    fn embedding_single_annulus_closed_form() {
        let spec = spec2();
        let indicator = GridFunction::from_space_fn(spec, |x| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            Complex64::new(if (1.0..2.0).contains(&r) { 1.0 } else { 0.0 }, 0.0)
        });
        let bank = TestBank {
            spec,
            seed: 0,
            entries: vec![indicator],
            labels: vec!["annulus-indicator".into()],
        };
        for &(a, q) in &[(0.5f64, 1.5f64), (1.5, 3.0), (0.5, f64::INFINITY)] {
            let report = check_embedding(&bank, a, 2.0, q).unwrap();
            let p = 4.0 / (2.0 - a);
            let lhs = (2.0 * PI * (2f64.powf(2.0 - a) - 1.0) / (2.0 - a)).sqrt();
            let rhs = if q.is_infinite() {
                (3.0 * PI).powf(1.0 / p)
            } else {
                (p / q).powf(1.0 / q) * (3.0 * PI).powf(1.0 / p)
            };
            let got = report.per_entry[0].ratio;
            assert!(
                (got / (lhs / rhs) - 1.0).abs() < 0.05,
                "a={a}, q={q}: ratio {got:.6e} vs closed form {:.6e}",
                lhs / rhs
            );
        }
    }

    /// Over a mixed bank the embedding ratio is bounded with a recorded
    /// constant, and exact dyadic dilation moves it only at roundoff level.
    #[test]
    fn embedding_bounded_with_scale_free_ratio() {
        let spec = spec2();
        let bank = make_bank(spec, 33, 6).unwrap();
        for &(a, q) in &[(0.75f64, 2.0f64), (1.2, 1.5)] {
            let report = check_embedding(&bank, a, 2.0, q).unwrap();
            assert!(report.max_ratio.is_finite() && report.max_ratio > 0.0);
            assert!(
                report.min_ratio > 0.01 * report.max_ratio,
                "ratios spread too widely: [{:.3e}, {:.3e}]",
                report.min_ratio,
                report.max_ratio
            );
            let drift = report.symmetry_drift.unwrap();
            assert!(
                drift < 1e-9,
                "dyadic dilation is exact on this grid, drift {drift:.3e}"
            );
            assert!(report.params["argmax"].is_string());
        }
        assert!(check_embedding(&bank, 2.5, 2.0, 2.0).is_err());
        assert!(check_embedding(&bank, 0.75, 2.0, 1.0).is_err());
    }
}
