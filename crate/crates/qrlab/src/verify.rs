//! Measured-inequality experiments.
//!
//! Every entry point here drives one operator-vs-norm inequality across a
//! deterministic bank of test inputs and returns a [`RatioReport`] (or, for
//! the pointwise-convergence study, a [`ConvergenceReport`]). The philosophy
//! is fixed throughout:
//!
//! * **Constants are measured, never asserted.** A check computes the left
//!   and right side of its inequality per entry and records the ratios; the
//!   numerical thresholds live in the test suites next to the tolerances
//!   that justify them.
//! * **Structural failures are hard errors.** Parameter ranges under which
//!   the quantities are undefined, unresolved spectra, vanishing right
//!   sides, and quadrature tails that would silently dominate the answer all
//!   surface as `Err`, never as a quietly wrong number. Range conditions
//!   that merely leave the *proven* regime are policy-controlled
//!   ([`RangePolicy`]), so sharpness outside the range can be explored
//!   deliberately.
//! * **Dyadic dilation is the symmetry probe.** Where the inequality has an
//!   exact rescaling law on the grid (see [`dyadic_reinterpret`]), each entry
//!   is re-run as `f(2^m ·)` and the worst relative change of the
//!   (law-compensated) ratio is reported as `symmetry_drift`. A ratio that
//!   is exactly scale-covariant in the continuum drifts only by rounding, so
//!   drift measures harness error, not mathematics.
//!
//! Banks are evaluated in parallel; per-entry values are collected in bank
//! order and every aggregate is computed serially, so reports are
//! bit-for-bit reproducible for a fixed configuration and seed.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde_json::json;

use crate::distance::{sphere_quadrature, RhoDistance, SurfaceNode};
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{
    annuli, smooth_fall, smooth_rise, AnnulusDecomposition, DomainTag, GridFunction, GridSpec,
    TestBank, MAX_DIM,
};
use crate::numeric::gauss_legendre_on;
use crate::operator::{
    active_rho_range, apply_oscillating_window, maximal_function, multiplier_convolve, riesz_mean,
    square_function_exact, square_function_geometric, FrequencyMap, TGrid,
};
use crate::profile::{
    kernel_1d, lp_block, mu_lorentz_norm, vj_decompose, Profile, ProfileKind, VjDecomposition,
    VjOptions,
};
use crate::report::{ConvergenceReport, RatioReport};
use crate::spaces::{herz_norm, lorentz_norm, lp_norm, weighted_l2_norm};

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

/// What to do when a parameter leaves the range for which the tested
/// inequality is actually proved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RangePolicy {
    /// Out-of-range parameters are hard errors (the default posture).
    Enforce,
    /// Out-of-range parameters are recorded as warnings in the report's
    /// `params` and the experiment runs anyway — for probing sharpness
    /// outside the proven regime, on purpose and on the record.
    WarnAndRun,
}

/// Collects range-condition violations according to the active policy.
struct RangeGuard {
    policy: RangePolicy,
    warnings: Vec<String>,
}

impl RangeGuard {
    fn new(policy: RangePolicy) -> Self {
        RangeGuard {
            policy,
            warnings: Vec::new(),
        }
    }

    /// Require `ok`; on failure either error out or record a warning.
    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
        if ok {
            return Ok(());
        }
        match self.policy {
            RangePolicy::Enforce => Err(Error::InvalidParameter(msg())),
            RangePolicy::WarnAndRun => {
                self.warnings.push(msg());
                Ok(())
            }
        }
    }

    fn warnings_json(&self) -> serde_json::Value {
        json!(self.warnings)
    }
}

/// View the samples of `f` as the dyadic dilate `x ↦ f(2^m x)`.
///
/// On the grid this is exact: the dilate lives on the grid with half-width
/// `2^{-m} L` and carries the *same* value array, so no resampling (and no
/// resampling error) is involved. Cell coordinates and frequencies scale by
/// exact powers of two, and symbol arguments of the form `ρ/t` reproduce
/// bit-identical quotients after the rescaling — which is what makes dyadic
/// dilation the right symmetry to probe numerically.
pub fn dyadic_reinterpret(f: &GridFunction, m: i32) -> Result<GridFunction> {
    let spec = GridSpec::new(f.spec.dim, f.spec.n, f.spec.half_width * 2f64.powi(-m))?;
    let mut g = GridFunction::zeros(spec, f.domain);
    g.values.copy_from_slice(&f.values);
    Ok(g)
}

fn grid_json(spec: &GridSpec) -> serde_json::Value {
    json!({ "dim": spec.dim, "n": spec.n, "half_width": spec.half_width })
}

fn rho_json(rho: &RhoDistance) -> serde_json::Value {
    json!({ "kind": format!("{:?}", rho.kind), "beta": rho.beta })
}

/// Besov block norm extended to `s = ∞` (sup over the block terms).
fn besov_norm_ext(dec: &VjDecomposition, alpha: f64, s: f64) -> Result<f64> {
    if s.is_infinite() {
        Ok(dec
            .besov_block_terms(alpha)
            .into_iter()
            .fold(0.0, f64::max))
    } else {
        dec.besov_norm(alpha, s)
    }
}

/// Annulus decomposition extended one level past the inscribed ball so the
/// corner cells of the box are covered too (the default range stops at the
/// ball `|x| < L`, which would trip the coverage guard on any field with
/// mass near the corners).
fn covering_annuli(spec: GridSpec) -> Result<AnnulusDecomposition> {
    let (lo, hi) = AnnulusDecomposition::default_range(&spec);
    annuli(spec, lo, hi + 1)
}

/// Dilation grid covering every `t` whose symbol band `h(ρ/t)` meets the
/// active spectrum *while staying inside the unambiguous frequency shell*
/// `ρ ≤ 0.8·Nyquist`. Larger `t` would push symbol support onto Nyquist and
/// corner bins, which the scan guard rightly rejects; dropping those
/// dilations only shrinks the sampled sup, so the maximal inequality under
/// test stays one-sided. All derived endpoints scale by exact powers of two
/// under [`dyadic_reinterpret`], keeping the dilation symmetry bit-exact.
fn adapted_tgrid(
    fhat: &GridFunction,
    map: &FrequencyMap,
    profile: &Profile,
    per_octave: usize,
    max_octaves: usize,
) -> Result<TGrid> {
    let (rho_lo, rho_hi) = active_rho_range(fhat, map, 1e-6)?
        .ok_or_else(|| Error::Guard("cannot adapt a dilation grid to an empty spectrum".into()))?;
    let cap = 0.8 * map.spec.nyquist();
    let rho_hi = rho_hi.min(cap);
    let rho_lo = rho_lo.min(rho_hi);
    let s_lo = profile.support_lower();
    let s_hi = profile.support_upper();
    if !s_hi.is_finite() || !(s_hi > 0.0) {
        return Err(Error::InvalidParameter(
            "dilation grids need a profile with bounded positive support".into(),
        ));
    }
    let t_lo = rho_lo / s_hi;
    let slide_top = if s_lo > 0.0 { rho_hi / s_lo } else { 4.0 * rho_hi };
    let t_hi = slide_top.min(cap / s_hi).max(t_lo * 2.0);
    let mut octaves = (t_hi / t_lo).log2().ceil().max(1.0) as usize;
    let mut t_lo = t_lo;
    if octaves > max_octaves {
        octaves = max_octaves;
        t_lo = t_hi * 2f64.powi(-(max_octaves as i32));
    }
    TGrid::geometric(t_lo, octaves, per_octave)
}

/// Max over `|v/base − 1|`, the relative drift of a family against its base.
fn max_rel_drift(base: f64, others: &[f64]) -> Result<f64> {
    if !(base > 0.0) {
        return Err(Error::Guard(
            "symmetry drift is undefined against a vanishing base ratio".into(),
        ));
    }
    Ok(others
        .iter()
        .map(|&v| (v / base - 1.0).abs())
        .fold(0.0, f64::max))
}

/// Partition rows into kept (positive right side) and skipped ids, erroring
/// only when nothing survives.
fn split_degenerate(
    rows: Vec<(String, f64, f64)>,
) -> Result<(Vec<(String, f64, f64)>, Vec<String>)> {
    let mut keep = Vec::with_capacity(rows.len());
    let mut skipped = Vec::new();
    for (id, lhs, rhs) in rows {
        if rhs > 0.0 {
            keep.push((id, lhs, rhs));
        } else {
            skipped.push(id);
        }
    }
    if keep.is_empty() {
        return Err(Error::Guard(
            "every entry has a vanishing right side; nothing to measure".into(),
        ));
    }
    Ok((keep, skipped))
}

// ---------------------------------------------------------------------------
// maximal function vs Herz/Besov control
// ---------------------------------------------------------------------------

/// Maximal-function bound in Herz norms: for a profile `h` supported in
/// `(1/2, 2)` and `1/2 < α < d/2`, the sampled maximal function
/// `sup_t |F⁻¹[h(ρ/t) f̂]|` is tested against
/// `‖h‖_{B²_{α,s}} · ‖f‖` with `s = q/(q−1)`, both sides in Herz norms of
/// target index `−α`; the left side uses outer exponent `max(q, 2)`.
///
/// The symmetry drift re-runs every entry as `f(2^m·)`, `m ∈ {−2,…,2}`; the
/// ratio is exactly dilation-invariant in the continuum (the index pairing
/// `(−α, α)` is scale-critical), so the measured drift is pure harness
/// error.
pub fn check_herz_maximal(
    bank: &TestBank,
    rho: &RhoDistance,
    h: &Profile,
    alpha: f64,
    q: f64,
    policy: RangePolicy,
) -> Result<RatioReport> {
    let spec = bank.spec;
    let d = spec.dim as f64;
    let mut guard = RangeGuard::new(policy);
    guard.require(alpha > 0.5 && alpha < d / 2.0, || {
        format!("smoothness index α = {alpha} outside the proven range (1/2, {})", d / 2.0)
    })?;
    let (s_lo, s_hi) = (h.support_lower(), h.support_upper());
    guard.require(s_lo >= 0.5 - 1e-9 && s_hi <= 2.0 + 1e-9, || {
        format!("profile support [{s_lo:.3}, {s_hi:.3}] not inside (1/2, 2)")
    })?;
    let s = if q == 1.0 {
        f64::INFINITY
    } else if q == 2.0 {
        2.0
    } else if q.is_infinite() {
        1.0
    } else {
        return Err(Error::InvalidParameter(format!(
            "outer Herz exponent must be 1, 2 or ∞, got {q}"
        )));
    };
    let q_lhs = if q.is_infinite() { f64::INFINITY } else { 2.0 };

    // Resolution tuned for smooth band profiles: Δs = 2^{-11} resolves any
    // admissible `h`, blocks above 2^12 carry only superalgebraically small
    // mass, and the piece tables are not consumed here.
    let vj_opts = VjOptions {
        samples_per_unit: 1 << 11,
        t_ext: 64.0,
        keep_upto: 2.0,
        weight_exponents: Vec::new(),
    };
    let dec_h = vj_decompose(h, &vj_opts)?;
    let besov = besov_norm_ext(&dec_h, alpha, s)?;
    if !(besov > 0.0) {
        return Err(Error::Guard(
            "profile has vanishing Besov norm; the bound is degenerate".into(),
        ));
    }

    // lhs = Herz(-α, max(q,2)) of the maximal field, rhs-core = Herz(-α, q)
    // of the input; the Besov factor multiplies the core afterwards.
    let eval = |f: &GridFunction| -> Result<(f64, f64)> {
        let map = FrequencyMap::new(f.spec, rho)?;
        let fhat = f.dft_forward()?;
        let tg = adapted_tgrid(&fhat, &map, h, 8, 24)?;
        let mf = maximal_function(f, &map, h, &tg)?;
        let dec = covering_annuli(f.spec)?;
        let lhs = herz_norm(&mf, &dec, -alpha, q_lhs)?;
        let core = herz_norm(f, &dec, -alpha, q)?;
        Ok((lhs, core))
    };

    let shifts: [i32; 4] = [-2, -1, 1, 2];
    let per_entry: Vec<(String, f64, f64, f64)> = bank
        .entries
        .par_iter()
        .zip(bank.labels.par_iter())
        .map(|(f, label)| -> Result<(String, f64, f64, f64)> {
            let (lhs, core) = eval(f)?;
            if !(core > 0.0) {
                return Err(Error::Guard(format!("bank entry {label} has no Herz mass")));
            }
            let base = lhs / core;
            let mut scaled = Vec::with_capacity(shifts.len());
            for &m in &shifts {
                let g = dyadic_reinterpret(f, m)?;
                let (l, c) = eval(&g)?;
                scaled.push(l / c);
            }
            let drift = max_rel_drift(base, &scaled)?;
            Ok((label.clone(), lhs, besov * core, drift))
        })
        .collect::<Result<Vec<_>>>()?;

    let drift = per_entry.iter().map(|r| r.3).fold(0.0, f64::max);
    let rows = per_entry.into_iter().map(|(id, l, r, _)| (id, l, r)).collect();
    let params = json!({
        "grid": grid_json(&spec),
        "rho": rho_json(rho),
        "seed": bank.seed,
        "alpha": alpha,
        "q": q,
        "besov_s": if s.is_infinite() { json!("inf") } else { json!(s) },
        "lhs_outer_exponent": if q_lhs.is_infinite() { json!("inf") } else { json!(q_lhs) },
        "besov_norm": besov,
        "dilation_exponents": shifts,
        "t_grid": { "per_octave": 8, "max_octaves": 24 },
        "warnings": guard.warnings_json(),
    });
    RatioReport::new("herz_maximal", rows, Some(drift), params)
}

// ---------------------------------------------------------------------------
// weighted multiplier norm vs line Sobolev sup
// ---------------------------------------------------------------------------

/// `L²_α(ℝ)` norm of a compactly supported line function, by periodized DFT:
/// `(2π)^{-1} ∫ (1+τ²)^α |ĝ(τ)|² dτ` over the window `[0, 4)`.
fn line_sobolev_norm<G: Fn(f64) -> f64>(g: G, alpha: f64) -> f64 {
    const N: usize = 4096;
    const SPAN: f64 = 4.0;
    let ds = SPAN / N as f64;
    let mut buf: Vec<Complex64> = (0..N)
        .map(|k| Complex64::new(g(k as f64 * ds), 0.0))
        .collect();
    fft::dft_1d(&mut buf, FftDirection::Forward);
    let dtau = 2.0 * PI / SPAN;
    let mut acc = 0.0;
    for (k, v) in buf.iter().enumerate() {
        let signed = if k < N / 2 { k as f64 } else { k as f64 - N as f64 };
        let tau = signed * dtau;
        let ghat_sq = v.norm_sqr() * ds * ds;
        acc += (1.0 + tau * tau).powf(alpha) * ghat_sq;
    }
    (acc * dtau / (2.0 * PI)).sqrt()
}

/// The localization window used on the multiplier line: a bump identically
/// one on `(7/8, 13/8)` and supported in `(1/2, 2)`.
fn multiplier_window() -> Profile {
    Profile::new(ProfileKind::Bump {
        center: 1.25,
        width: 0.75,
    })
    .expect("static window parameters are valid")
}

/// Weighted-L² multiplier bound: for `m(s) = Σ_k c_k ζ(2^{-k} s)` built from
/// dyadic frequency blocks, the operator norm of `f ↦ F⁻¹[m∘ρ · f̂]` on
/// `L²(|x|^{-2α})` is tested against `sup_t ‖φ · m(t·)‖_{L²_α(ℝ)}` (forward
/// direction; `φ` is [`multiplier_window`]). The reverse direction sends
/// quasiradial probes `ĝ = φ(ρ/2^k)·e^{i(ωρ/2^k + θ)}` through the operator
/// and records how much of the professed sup they witness; a duality
/// spot-check repeats the forward run with weight `|x|^{+2α}`. Reverse and
/// duality constants land in `params`; the report rows are the forward
/// ratios.
///
/// The symmetry drift shifts every block index by `m` and dilates the bank
/// entry to match — an exactly covariant pairing, so drift is rounding only.
pub fn check_multiplier_equivalence(
    bank: &TestBank,
    rho: &RhoDistance,
    coeffs: &[(i32, f64)],
    alpha: f64,
    policy: RangePolicy,
) -> Result<RatioReport> {
    let spec = bank.spec;
    let d = spec.dim as f64;
    if coeffs.is_empty() || coeffs.iter().all(|&(_, c)| c == 0.0) {
        return Err(Error::InvalidParameter(
            "degenerate multiplier: every block coefficient vanishes".into(),
        ));
    }
    if coeffs.iter().any(|&(_, c)| !c.is_finite()) {
        return Err(Error::InvalidParameter(
            "block coefficients must be finite".into(),
        ));
    }
    let mut guard = RangeGuard::new(policy);
    guard.require(alpha > 0.5 && alpha < d / 2.0, || {
        format!("smoothness index α = {alpha} outside the proven range (1/2, {})", d / 2.0)
    })?;
    let k_lo = coeffs.iter().map(|&(k, _)| k).min().unwrap();
    let k_hi = coeffs.iter().map(|&(k, _)| k).max().unwrap();
    let nyq = spec.nyquist();
    guard.require(2f64.powi(k_hi) <= 0.8 * nyq, || {
        format!("top block 2^{k_hi} reaches past the unambiguous shell 0.8·Nyquist = {:.3}", 0.8 * nyq)
    })?;
    guard.require(2f64.powi(k_lo - 2) >= 2.0 * spec.freq_spacing(), || {
        format!(
            "bottom block support 2^{} is below twice the frequency spacing {:.3e}",
            k_lo - 2,
            spec.freq_spacing()
        )
    })?;

    let phi = multiplier_window();
    let phi_norm = line_sobolev_norm(|v| phi.eval(v), alpha);

    // sup_t ‖φ · m(t·)‖_{L²_α} over a geometric t-grid covering every t for
    // which the window meets the multiplier's support. For a shifted
    // coefficient family the same line functions reappear at shifted t, so
    // the sup is reused verbatim by the drift runs (bit-exactly equal).
    let sup_line = {
        let m_fn = |v: f64| -> f64 {
            coeffs
                .iter()
                .map(|&(k, c)| c * lp_block(v * 2f64.powi(-k)))
                .sum()
        };
        let tg = TGrid::geometric(2f64.powi(k_lo - 3), (k_hi - k_lo + 4) as usize, 16)?;
        tg.values
            .iter()
            .map(|&t| line_sobolev_norm(|v| phi.eval(v) * m_fn(t * v), alpha))
            .fold(0.0, f64::max)
    };
    if !(sup_line > 0.0) {
        return Err(Error::Guard(
            "the window sees no multiplier mass: sup_t ‖φ·m(t·)‖ = 0".into(),
        ));
    }

    // Forward and duality ratios for one entry against one coefficient
    // family (possibly index-shifted, with the entry dilated to match).
    let op_ratios = |f: &GridFunction, shift: i32| -> Result<(f64, f64)> {
        let map = FrequencyMap::new(f.spec, rho)?;
        let symbol = move |r: f64| -> f64 {
            coeffs
                .iter()
                .map(|&(k, c)| c * lp_block(r * 2f64.powi(-(k + shift))))
                .sum()
        };
        let tf = multiplier_convolve(f, &map, symbol)?;
        let minus = weighted_l2_norm(&tf, -2.0 * alpha)? / weighted_l2_norm(f, -2.0 * alpha)?;
        let plus = weighted_l2_norm(&tf, 2.0 * alpha)? / weighted_l2_norm(f, 2.0 * alpha)?;
        Ok((minus, plus))
    };

    let shifts: [i32; 2] = [-1, 1];
    let per_entry: Vec<(String, f64, f64, f64, f64)> = bank
        .entries
        .par_iter()
        .zip(bank.labels.par_iter())
        .map(|(f, label)| -> Result<(String, f64, f64, f64, f64)> {
            let (minus, plus) = op_ratios(f, 0)?;
            let mut scaled = Vec::with_capacity(shifts.len());
            for &m in &shifts {
                let g = dyadic_reinterpret(f, m)?;
                let (sm, _) = op_ratios(&g, m)?;
                scaled.push(sm);
            }
            let drift = max_rel_drift(minus, &scaled)?;
            let wnorm = weighted_l2_norm(f, -2.0 * alpha)?;
            Ok((label.clone(), minus * wnorm, sup_line * wnorm, plus, drift))
        })
        .collect::<Result<Vec<_>>>()?;

    let drift = per_entry.iter().map(|r| r.4).fold(0.0, f64::max);
    let fwd_max = per_entry
        .iter()
        .map(|r| r.1 / r.2 * sup_line)
        .fold(0.0, f64::max);
    let plus_max = per_entry.iter().map(|r| r.3).fold(0.0, f64::max);
    let duality_factor = if fwd_max > 0.0 { plus_max / fwd_max } else { f64::NAN };

    // Reverse direction: quasiradial probes. Drawn serially (determinism),
    // evaluated in parallel. Probe blocks are restricted to those whose
    // support fits the unambiguous shell.
    let mut probes: Vec<(String, GridFunction)> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(bank.seed ^ 0x9e37_79b9_7f4a_7c15);
    let map0 = FrequencyMap::new(spec, rho)?;
    let mut probe_ks = Vec::new();
    for k in k_lo..=k_hi {
        let scale = 2f64.powi(k);
        if scale * phi.support_upper() > 0.8 * nyq {
            continue;
        }
        probe_ks.push(k);
        for j in 0..2 {
            let omega: f64 = rng.gen_range(0.0..(0.25 * spec.half_width));
            let theta: f64 = rng.gen_range(0.0..(2.0 * PI));
            let mut gh = GridFunction::zeros(spec, DomainTag::Frequency);
            for (i, v) in gh.values.iter_mut().enumerate() {
                let r = map0.rho_values[i] / scale;
                let w = phi.eval(r);
                if w != 0.0 {
                    *v = Complex64::from_polar(w, omega * r + theta);
                }
            }
            probes.push((format!("probe-k{k}-{j}"), gh.dft_inverse()?));
        }
    }
    if probes.is_empty() {
        guard.require(false, || {
            "no probe block fits the unambiguous shell; reverse direction skipped".into()
        })?;
    }
    let probe_ratios: Vec<f64> = probes
        .par_iter()
        .map(|(_, g)| -> Result<f64> { Ok(op_ratios(g, 0)?.0) })
        .collect::<Result<Vec<_>>>()?;
    let reverse_best = probe_ratios.iter().fold(0.0f64, |a, &b| a.max(b));
    let reverse_constant = if reverse_best > 0.0 {
        sup_line / reverse_best
    } else {
        f64::INFINITY
    };

    let rows = per_entry
        .into_iter()
        .map(|(id, l, r, _, _)| (id, l, r))
        .collect();
    let params = json!({
        "grid": grid_json(&spec),
        "rho": rho_json(rho),
        "seed": bank.seed,
        "alpha": alpha,
        "coefficients": coeffs.iter().map(|&(k, c)| json!([k, c])).collect::<Vec<_>>(),
        "window": "bump on (1/2,2), plateau (7/8,13/8)",
        "window_line_norm": phi_norm,
        "sup_line": sup_line,
        "forward_constant": fwd_max,
        "duality": { "plus_weight_norm": plus_max, "factor": duality_factor },
        "reverse": {
            "probe_blocks": probe_ks,
            "probe_count": probe_ratios.len(),
            "best_ratio": reverse_best,
            "constant": reverse_constant,
        },
        "dilation_exponents": shifts,
        "warnings": guard.warnings_json(),
    });
    RatioReport::new("multiplier_equivalence", rows, Some(drift), params)
}

// ---------------------------------------------------------------------------
// square function vs weighted L²
// ---------------------------------------------------------------------------

/// Square-function bound `‖G_α f‖_{L²(|x|^{-2α})} ≲ ‖f‖_{L²(|x|^{-2α})}` for
/// the smoothed-mean generator at smoothness `α ∈ (1/2, 1]`.
///
/// Entries whose spectrum is structured (at most 96 distinct ρ-levels) are
/// evaluated with the quadrature-free scale integral
/// ([`square_function_exact`]); everything else uses the geometric `t`-grid,
/// whose range is capped at the unambiguous frequency shell — a one-sided
/// truncation (it can only shrink the left side) of relative size
/// `O((ρ/Nyquist)²)`. The per-entry path taken is recorded in `params`.
pub fn check_square_function(
    bank: &TestBank,
    rho: &RhoDistance,
    alpha: f64,
    policy: RangePolicy,
) -> Result<RatioReport> {
    let spec = bank.spec;
    let d = spec.dim as f64;
    let mut guard = RangeGuard::new(policy);
    guard.require(alpha > 0.5 && alpha < d / 2.0, || {
        format!("smoothness index α = {alpha} outside the proven range (1/2, {})", d / 2.0)
    })?;

    // The generator support is (0, 1], so the symbol band at dilation t is
    // ρ ∈ (0, t); capping t at 0.8·Nyquist keeps every sampled dilation off
    // the ambiguous bins.
    let field = |f: &GridFunction| -> Result<(GridFunction, &'static str)> {
        let map = FrequencyMap::new(f.spec, rho)?;
        match square_function_exact(f, &map, alpha) {
            Ok(g) => Ok((g, "exact")),
            Err(Error::Unsupported(_)) => {
                let fhat = f.dft_forward()?;
                let (rho_lo, rho_hi) = active_rho_range(&fhat, &map, 1e-6)?
                    .ok_or_else(|| Error::Guard("empty spectrum".into()))?;
                let cap = 0.8 * f.spec.nyquist();
                let t_hi = cap.max(rho_lo * 2.0);
                let t_lo = rho_lo.min(rho_hi).min(t_hi / 2.0);
                let octaves = (t_hi / t_lo).log2().ceil().max(1.0) as usize;
                let tg = TGrid::geometric(t_lo, octaves, 16)?;
                Ok((square_function_geometric(f, &map, alpha, &tg)?, "geometric"))
            }
            Err(e) => Err(e),
        }
    };

    let ratio_of = |f: &GridFunction| -> Result<(f64, f64, &'static str)> {
        let (g, path) = field(f)?;
        let lhs = weighted_l2_norm(&g, -2.0 * alpha)?;
        let rhs = weighted_l2_norm(f, -2.0 * alpha)?;
        if !(rhs > 0.0) {
            return Err(Error::Guard("entry has no weighted mass".into()));
        }
        Ok((lhs, rhs, path))
    };

    let shifts: [i32; 2] = [-1, 1];
    let per_entry: Vec<(String, f64, f64, f64, &'static str)> = bank
        .entries
        .par_iter()
        .zip(bank.labels.par_iter())
        .map(|(f, label)| -> Result<(String, f64, f64, f64, &'static str)> {
            let (lhs, rhs, path) = ratio_of(f)?;
            let base = lhs / rhs;
            let mut scaled = Vec::with_capacity(shifts.len());
            for &m in &shifts {
                let g = dyadic_reinterpret(f, m)?;
                let (l, r, _) = ratio_of(&g)?;
                scaled.push(l / r);
            }
            let drift = max_rel_drift(base, &scaled)?;
            Ok((label.clone(), lhs, rhs, drift, path))
        })
        .collect::<Result<Vec<_>>>()?;

    let drift = per_entry.iter().map(|r| r.3).fold(0.0, f64::max);
    let paths: Vec<serde_json::Value> = per_entry
        .iter()
        .map(|(id, _, _, _, p)| json!({ "entry": id, "quadrature": p }))
        .collect();
    let rows = per_entry
        .into_iter()
        .map(|(id, l, r, _, _)| (id, l, r))
        .collect();
    let params = json!({
        "grid": grid_json(&spec),
        "rho": rho_json(rho),
        "seed": bank.seed,
        "alpha": alpha,
        "quadrature_paths": paths,
        "dilation_exponents": shifts,
        "warnings": guard.warnings_json(),
    });
    RatioReport::new("square_function", rows, Some(drift), params)
}

// ---------------------------------------------------------------------------
// d-dimensional Lorentz norm vs one-dimensional oscillatory kernel
// ---------------------------------------------------------------------------

/// Two-sided kernel reduction: for a profile `h` supported away from the
/// origin and `1 < u < 2`, the Lorentz norm `‖F⁻¹[h∘ρ]‖_{L^{u,s}(ℝ^d)}` is
/// compared against the one-dimensional reduction
/// `‖(1+|·|)^{-(d-1)/2} K_β‖_{L^{u,s}(μ_d)}` with
/// `K_β = (2π)^{-1} ∫ h(t^β) e^{irt} dt` and `dμ_d = (1+r)^{d-1} dr`.
///
/// Both sides are truncated at the same radius `r ≤ L` (the box half-width):
/// the grid cannot see further, and the kernel side must not be allowed to
/// integrate tail mass the grid side structurally misses. The family spread
/// `max_ratio / min_ratio` is the quantity of interest; no dilation
/// symmetry is declared (the two sides discretize different spaces).
pub fn check_flu_equivalence(
    spec: GridSpec,
    rho: &RhoDistance,
    family: &[(String, Profile)],
    u: f64,
    s: f64,
    policy: RangePolicy,
) -> Result<RatioReport> {
    let d = spec.dim;
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty profile family".into()));
    }
    if !s.is_finite() || !(s >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "secondary exponent s must be finite and ≥ 1, got {s}"
        )));
    }
    let mut guard = RangeGuard::new(policy);
    guard.require(u > 1.0 && u < 2.0, || {
        format!("primary exponent u = {u} outside the proven range (1, 2)")
    })?;
    guard.require(d >= 2, || format!("the reduction is stated for d ≥ 2, got {d}"))?;

    let map = FrequencyMap::new(spec, rho)?;
    let r_max = spec.half_width;
    const KERNEL_N: usize = 1 << 20;
    const KERNEL_T_EXT: f64 = 64.0;

    let rows: Vec<(String, f64, f64)> = family
        .par_iter()
        .map(|(label, h)| -> Result<(String, f64, f64)> {
            // grid side: h ∘ ρ synthesized directly on the frequency grid
            let mut fhat = GridFunction::zeros(spec, DomainTag::Frequency);
            let mut peak = 0.0f64;
            let mut nyq = 0.0f64;
            for (i, v) in fhat.values.iter_mut().enumerate() {
                let w = h.eval(map.rho_values[i]);
                *v = Complex64::new(w, 0.0);
                let a = w.abs();
                if a > peak {
                    peak = a;
                }
                if map.nyquist_mask[i] && a > nyq {
                    nyq = a;
                }
            }
            if !(peak > 0.0) {
                return Err(Error::Guard(format!("profile {label} vanishes on the grid")));
            }
            if nyq > 1e-8 * peak {
                return Err(Error::Guard(format!(
                    "profile {label} leaves relative magnitude {:.3e} on the Nyquist rows",
                    nyq / peak
                )));
            }
            let g = fhat.dft_inverse()?;
            let mut gt = g.clone();
            for (i, v) in gt.values.iter_mut().enumerate() {
                if gt.spec.cell_radius(i) > r_max {
                    *v = Complex64::default();
                }
            }
            let lhs = lorentz_norm(&gt, u, s)?;
            // kernel side: same horizon
            let kernel = kernel_1d(h, rho.beta, KERNEL_N, KERNEL_T_EXT)?;
            let rhs = mu_lorentz_norm(&kernel, d, u, s, Some(r_max))?;
            Ok((label.clone(), lhs, rhs))
        })
        .collect::<Result<Vec<_>>>()?;

    let params = json!({
        "grid": grid_json(&spec),
        "rho": rho_json(rho),
        "u": u,
        "s": s,
        "truncation_radius": r_max,
        "kernel": { "n": KERNEL_N, "t_ext": KERNEL_T_EXT },
        "warnings": guard.warnings_json(),
    });
    RatioReport::new("flu_equivalence", rows, None, params)
}

// ---------------------------------------------------------------------------
// restriction trace vs weighted mass
// ---------------------------------------------------------------------------

/// Quadrature of `∫_{Σ_ρ} |ĝ(ξ)|² dσ(ξ)` by direct nonuniform evaluation of
/// the forward transform at the surface nodes:
/// `ĝ(ξ') = Σ_x g(x) e^{-i⟨x,ξ'⟩} Δx^d`, summed over the active cells only.
pub fn surface_spectrum_mass(g: &GridFunction, nodes: &[SurfaceNode]) -> Result<f64> {
    if g.domain != DomainTag::Space {
        return Err(Error::DomainMismatch(
            "surface_spectrum_mass expects a space-domain function".into(),
        ));
    }
    if nodes.is_empty() {
        return Err(Error::InvalidParameter("empty surface quadrature".into()));
    }
    let dim = g.spec.dim;
    let vol = g.spec.cell_volume();
    let cells: Vec<([f64; MAX_DIM], Complex64)> = g
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm_sqr() > 0.0)
        .map(|(flat, v)| (g.spec.point(flat), *v))
        .collect();
    let contributions: Vec<f64> = nodes
        .par_iter()
        .map(|node| {
            let mut acc = Complex64::default();
            for (x, v) in &cells {
                let mut phase = 0.0;
                for a in 0..dim {
                    phase -= x[a] * node.point[a];
                }
                acc += v * Complex64::from_polar(1.0, phase);
            }
            (acc * vol).norm_sqr() * node.weight
        })
        .collect();
    Ok(contributions.iter().sum())
}

/// Trace inequality `∫_{Σ_ρ} |ĝ|² dσ ≲ ∫ |g|² |x|^b dx` for `1 < b < d`.
///
/// Both sides are quadratic (no square roots), so the ratio is the constant
/// of the inequality as stated. The statement has no dilation invariance —
/// under `g → g(2^m·)` the two sides scale by different powers *and* the
/// left side reads the spectrum on `2^{-m}`-rescaled spheres — so the
/// symmetry drift compensates the exact grid factor `2^{m(b-d)}` and what
/// remains measures the spectral non-flatness of the entry across the probed
/// spheres plus harness error. Entries with a plateau spectrum across one
/// octave of Σ_ρ make the residual pure harness error.
pub fn check_trace(
    bank: &TestBank,
    rho: &RhoDistance,
    b: f64,
    node_count: usize,
    policy: RangePolicy,
) -> Result<RatioReport> {
    let spec = bank.spec;
    let d = spec.dim as f64;
    let mut guard = RangeGuard::new(policy);
    guard.require(b > 1.0 && b < d, || {
        format!("weight exponent b = {b} outside the proven range (1, {d})")
    })?;
    let nodes = sphere_quadrature(rho, spec.dim, node_count)?;

    let ratio_of = |f: &GridFunction| -> Result<f64> {
        let lhs = surface_spectrum_mass(f, &nodes)?;
        let rhs = weighted_l2_norm(f, b)?.powi(2);
        if !(rhs > 0.0) {
            return Err(Error::Guard("entry has no weighted mass".into()));
        }
        Ok(lhs / rhs)
    };

    let shifts: [i32; 2] = [-1, 1];
    let per_entry: Vec<(String, f64, f64, f64)> = bank
        .entries
        .par_iter()
        .zip(bank.labels.par_iter())
        .map(|(f, label)| -> Result<(String, f64, f64, f64)> {
            let lhs = surface_spectrum_mass(f, &nodes)?;
            let rhs = weighted_l2_norm(f, b)?.powi(2);
            if !(rhs > 0.0) {
                return Err(Error::Guard(format!("bank entry {label} has no weighted mass")));
            }
            let base = lhs / rhs;
            // the grid law is ratio_m = 2^{m(b-d)}·R_m·ratio_0 with R_m the
            // spectral-flatness factor across the probed spheres; compensate
            // the exact power so the residual is R_m − 1 plus rounding.
            let mut compensated = Vec::with_capacity(shifts.len());
            for &m in &shifts {
                let g = dyadic_reinterpret(f, m)?;
                compensated.push(ratio_of(&g)? * 2f64.powf(m as f64 * (d - b)));
            }
            let drift = max_rel_drift(base, &compensated)?;
            Ok((label.clone(), lhs, rhs, drift))
        })
        .collect::<Result<Vec<_>>>()?;

    let drift = per_entry.iter().map(|r| r.3).fold(0.0, f64::max);
    let rows = per_entry.into_iter().map(|(id, l, r, _)| (id, l, r)).collect();
    let params = json!({
        "grid": grid_json(&spec),
        "rho": rho_json(rho),
        "seed": bank.seed,
        "b": b,
        "surface_nodes": node_count,
        "dilation_exponents": shifts,
        "dilation_compensation": "2^{m(d-b)}",
        "warnings": guard.warnings_json(),
    });
    RatioReport::new("trace", rows, Some(drift), params)
}

// ---------------------------------------------------------------------------
// single-octave maximal bound with explicit constant
// ---------------------------------------------------------------------------

/// `∫_0^∞ |h(s)|² s^{p-1} ds` by dyadically graded Gauss–Legendre panels
/// from the top of the profile's support downward (the grading absorbs the
/// integrable `s^{p-1}` singularity at the origin for `0 < p < 1`).
fn profile_power_mass(h: &Profile, p: f64) -> f64 {
    let top = {
        let hi = h.support_upper();
        if hi.is_finite() {
            hi
        } else {
            64.0
        }
    };
    let mut acc = 0.0;
    for j in 0..90 {
        let hi = top * 2f64.powi(-j);
        let lo = 0.5 * hi;
        let (xs, ws) = gauss_legendre_on(24, lo, hi);
        for (x, w) in xs.iter().zip(ws.iter()) {
            let v = h.eval(*x);
            acc += v * v * x.powf(p - 1.0) * w;
        }
    }
    acc
}

/// Single-octave maximal bound with the explicit constant
/// `A = (∫ |h(s)|² s^{b/β-1} ds)^{1/2}`:
/// `‖sup_{t ∈ [2^e, 2^{e+1}]} |F⁻¹[h(ρ/t) f̂]|‖_{L²(|x|^{-b})} ≤ C·A·‖f‖₂`.
///
/// The octave anchor `e` is computed once per entry from the spectrum
/// (geometric midpoint of the active band against the midpoint of the
/// profile support) — the bound holds for every octave, and anchoring makes
/// the dilation symmetry exact: the `m`-dilated entry is scanned over the
/// octave `e+m`, whose symbol values match bit-for-bit, so after
/// compensating the exact weight factor `2^{mb/2}` the drift is rounding
/// only. A vanishing profile (`A = 0`) is verified to produce a vanishing
/// maximal field and then reported as a guard error (the inequality is
/// trivially true but witnesses no finite ratio).
pub fn check_basic_maximal(
    bank: &TestBank,
    rho: &RhoDistance,
    h: &Profile,
    b: f64,
    per_octave: usize,
    policy: RangePolicy,
) -> Result<RatioReport> {
    let spec = bank.spec;
    let d = spec.dim as f64;
    let mut guard = RangeGuard::new(policy);
    guard.require(b > 1.0 && b < d, || {
        format!("weight exponent b = {b} outside the proven range (1, {d})")
    })?;
    if per_octave == 0 {
        return Err(Error::InvalidParameter("per_octave must be positive".into()));
    }
    let a_const = profile_power_mass(h, b / rho.beta).sqrt();

    let s_hi = {
        let hi = h.support_upper();
        if hi.is_finite() {
            hi
        } else {
            64.0
        }
    };
    let s_lo = h.support_lower().max(s_hi / 16.0);
    let s_mid = (s_lo * s_hi).sqrt();

    if !(a_const > 0.0) {
        // Degenerate profile: confirm the trivial direction (both sides
        // vanish), then refuse to report a ratio.
        for (f, label) in bank.entries.iter().zip(bank.labels.iter()) {
            let map = FrequencyMap::new(f.spec, rho)?;
            let tg = TGrid::geometric(1.0, 1, per_octave)?;
            let mf = maximal_function(f, &map, h, &tg)?;
            if mf.sup_norm() > 1e-12 {
                return Err(Error::Unsupported(format!(
                    "profile integrates to zero but the maximal field of {label} does not vanish"
                )));
            }
        }
        return Err(Error::Guard(
            "degenerate profile: A = 0 and the maximal field vanishes identically \
             (the inequality is trivially 0 ≤ 0)"
            .into(),
        ));
    }

    let octave_ratio = |f: &GridFunction, anchor: i32| -> Result<f64> {
        let map = FrequencyMap::new(f.spec, rho)?;
        let tg = TGrid::geometric(2f64.powi(anchor), 1, per_octave)?;
        let mf = maximal_function(f, &map, h, &tg)?;
        let lhs = weighted_l2_norm(&mf, -b)?;
        let rhs = a_const * lp_norm(f, 2.0)?;
        Ok(lhs / rhs)
    };

    let shifts: [i32; 2] = [-1, 1];
    let per_entry: Vec<(String, f64, f64, f64, i32)> = bank
        .entries
        .par_iter()
        .zip(bank.labels.par_iter())
        .map(|(f, label)| -> Result<(String, f64, f64, f64, i32)> {
            let map = FrequencyMap::new(f.spec, rho)?;
            let fhat = f.dft_forward()?;
            let (rho_lo, rho_hi) = active_rho_range(&fhat, &map, 1e-6)?
                .ok_or_else(|| Error::Guard(format!("bank entry {label} has empty spectrum")))?;
            let rho_mid = (rho_lo.max(rho_hi * 2f64.powi(-7)) * rho_hi).sqrt();
            let anchor = (rho_mid / s_mid).log2().round() as i32;
            let base = octave_ratio(f, anchor)?;
            let mut compensated = Vec::with_capacity(shifts.len());
            for &m in &shifts {
                let g = dyadic_reinterpret(f, m)?;
                let r = octave_ratio(&g, anchor + m)?;
                compensated.push(r * 2f64.powf(-(m as f64) * b / 2.0));
            }
            let drift = max_rel_drift(base, &compensated)?;
            let lhs = base * a_const * lp_norm(f, 2.0)?;
            let rhs = a_const * lp_norm(f, 2.0)?;
            Ok((label.clone(), lhs, rhs, drift, anchor))
        })
        .collect::<Result<Vec<_>>>()?;

    let drift = per_entry.iter().map(|r| r.3).fold(0.0, f64::max);
    let anchors: Vec<serde_json::Value> = per_entry
        .iter()
        .map(|(id, _, _, _, e)| json!({ "entry": id, "octave_exponent": e }))
        .collect();
    let rows = per_entry
        .into_iter()
        .map(|(id, l, r, _, _)| (id, l, r))
        .collect();
    let params = json!({
        "grid": grid_json(&spec),
        "rho": rho_json(rho),
        "seed": bank.seed,
        "b": b,
        "beta": rho.beta,
        "constant_a": a_const,
        "per_octave": per_octave,
        "anchors": anchors,
        "dilation_exponents": shifts,
        "dilation_compensation": "2^{-mb/2}",
        "warnings": guard.warnings_json(),
    });
    RatioReport::new("basic_maximal", rows, Some(drift), params)
}

// ---------------------------------------------------------------------------
// oscillating-window square integral
// ---------------------------------------------------------------------------

/// Windowed wave-propagator bound
/// `∫ ‖A_τ f‖²_{L²(|x|^{-b})} dτ ≲ ‖f‖₂²` with
/// `A_τ = F⁻¹[η(ρ) e^{-iρτ} f̂]`, tested by symmetric trapezoid quadrature
/// on `[-τ_max, τ_max]`.
///
/// The integrand decays like `(1+|τ|)^{-b}` only while the propagated wave
/// stays inside the box — the grid is a torus, so `τ_max` must not exceed
/// the half-width (policy-checked). A boundary-panel contribution above 5%
/// of the total is a hard coverage error. Under `f → f(2^m·)` with the
/// τ-grid rescaled in tandem the exact law is `ratio_m = 2^{m(b-1)}·ratio_0`
/// for window-plateau spectra; the drift compensates that factor.
pub fn check_atau(
    bank: &TestBank,
    rho: &RhoDistance,
    b: f64,
    tau_max: f64,
    tau_count: usize,
    policy: RangePolicy,
) -> Result<RatioReport> {
    let spec = bank.spec;
    let d = spec.dim as f64;
    let mut guard = RangeGuard::new(policy);
    guard.require(b > 1.0 && b < d, || {
        format!("weight exponent b = {b} outside the proven range (1, {d})")
    })?;
    if !(tau_max > 0.0) || tau_count < 3 || tau_count % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "the τ-grid needs tau_max > 0 and an odd tau_count ≥ 3, got ({tau_max}, {tau_count})"
        )));
    }
    guard.require(tau_max <= spec.half_width, || {
        format!(
            "tau_max = {tau_max} exceeds the box half-width {}; the propagated wave would wrap",
            spec.half_width
        )
    })?;

    // trapezoid integral of τ ↦ ‖A_τ f‖²_{-b} over the scaled grid
    // τ_i = 2^{-m}·(-τ_max + i·dτ); returns (integral, tail_fraction).
    let integral = |f: &GridFunction, m: i32| -> Result<(f64, f64)> {
        let map = FrequencyMap::new(f.spec, rho)?;
        let fhat = f.dft_forward()?;
        let scale = 2f64.powi(-m);
        let dtau = scale * 2.0 * tau_max / (tau_count - 1) as f64;
        let taus: Vec<f64> = (0..tau_count)
            .map(|i| scale * (-tau_max) + i as f64 * dtau)
            .collect();
        let values: Vec<f64> = taus
            .par_iter()
            .map(|&tau| -> Result<f64> {
                let a_tau = apply_oscillating_window(&fhat, &map, tau)?.dft_inverse()?;
                Ok(weighted_l2_norm(&a_tau, -b)?.powi(2))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut total = 0.0;
        for (i, v) in values.iter().enumerate() {
            let w = if i == 0 || i == tau_count - 1 { 0.5 } else { 1.0 };
            total += w * v * dtau;
        }
        let tail = (values[0] + values[tau_count - 1]) * 0.5 * dtau;
        let tail_fraction = if total > 0.0 { tail / total } else { 0.0 };
        Ok((total, tail_fraction))
    };

    let shifts: [i32; 2] = [-1, 1];
    let per_entry: Vec<(String, f64, f64, f64, f64)> = bank
        .entries
        .par_iter()
        .zip(bank.labels.par_iter())
        .map(|(f, label)| -> Result<(String, f64, f64, f64, f64)> {
            let (total, tail_fraction) = integral(f, 0)?;
            if tail_fraction > 0.05 {
                return Err(Error::Guard(format!(
                    "τ-integrand of {label} still carries a {tail_fraction:.3} fraction in the \
                     boundary panels at |τ| = {tau_max}; the quadrature window is too short"
                )));
            }
            let rhs = lp_norm(f, 2.0)?.powi(2);
            if !(rhs > 0.0) {
                return Err(Error::Guard(format!("bank entry {label} vanishes")));
            }
            let base = total / rhs;
            let drift = if base > 0.0 {
                let mut compensated = Vec::with_capacity(shifts.len());
                for &m in &shifts {
                    let g = dyadic_reinterpret(f, m)?;
                    let (tm, _) = integral(&g, m)?;
                    let rm = tm / lp_norm(&g, 2.0)?.powi(2);
                    compensated.push(rm * 2f64.powf(-(m as f64) * (b - 1.0)));
                }
                max_rel_drift(base, &compensated)?
            } else {
                0.0
            };
            Ok((label.clone(), total, rhs, drift, tail_fraction))
        })
        .collect::<Result<Vec<_>>>()?;

    let drift = per_entry.iter().map(|r| r.3).fold(0.0, f64::max);
    let tails: Vec<serde_json::Value> = per_entry
        .iter()
        .map(|(id, _, _, _, t)| json!({ "entry": id, "tail_fraction": t }))
        .collect();
    let rows = per_entry
        .into_iter()
        .map(|(id, l, r, _, _)| (id, l, r))
        .collect();
    let params = json!({
        "grid": grid_json(&spec),
        "rho": rho_json(rho),
        "seed": bank.seed,
        "b": b,
        "tau_max": tau_max,
        "tau_count": tau_count,
        "tail_fractions": tails,
        "dilation_exponents": shifts,
        "dilation_compensation": "2^{-m(b-1)} with the τ-grid scaled by 2^{-m}",
        "warnings": guard.warnings_json(),
    });
    RatioReport::new("atau", rows, Some(drift), params)
}

// ---------------------------------------------------------------------------
// weighted convolution on the line measure
// ---------------------------------------------------------------------------

/// A deterministic bank of real test sequences on the symmetric line grid
/// `r_i = (i − n/2)·spacing`, for the one-dimensional measure experiments.
#[derive(Clone, Debug)]
pub struct LineBank {
    pub n: usize,
    pub spacing: f64,
    pub seed: u64,
    pub entries: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

/// Build a line bank of `count` entries cycling through three families:
/// off-center Gaussian bumps, cosine-modulated packets, and smooth plateaus.
/// Deterministic in `(n, spacing, seed, count)`.
pub fn make_line_bank(n: usize, spacing: f64, seed: u64, count: usize) -> Result<LineBank> {
    if n < 16 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "line banks need an even grid length ≥ 16, got {n}"
        )));
    }
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "line spacing must be positive, got {spacing}"
        )));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("bank count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = (n / 2) as f64 * spacing;
    let r_of = |i: usize| (i as f64 - (n / 2) as f64) * spacing;
    let mut entries = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for idx in 0..count {
        let (values, label): (Vec<f64>, String) = match idx % 3 {
            0 => {
                let c = rng.gen_range(-half / 4.0..half / 4.0);
                let w = rng.gen_range(half / 32.0..half / 8.0);
                (
                    (0..n)
                        .map(|i| {
                            let r = r_of(i);
                            (-(r - c) * (r - c) / (2.0 * w * w)).exp()
                        })
                        .collect(),
                    format!("bump-{idx}"),
                )
            }
            1 => {
                let c = rng.gen_range(-half / 4.0..half / 4.0);
                let w = rng.gen_range(half / 24.0..half / 8.0);
                let omega = rng.gen_range(1.0..(0.25 * PI / spacing).max(1.5));
                (
                    (0..n)
                        .map(|i| {
                            let r = r_of(i);
                            (-(r - c) * (r - c) / (2.0 * w * w)).exp() * (omega * r).cos()
                        })
                        .collect(),
                    format!("packet-{idx}"),
                )
            }
            _ => {
                let a = rng.gen_range(half / 16.0..half / 6.0);
                let b = rng.gen_range(half / 4.0..half / 2.5);
                (
                    (0..n)
                        .map(|i| {
                            let r = r_of(i).abs();
                            smooth_rise(r, 0.5 * a, a) * smooth_fall(r, b, 1.3 * b)
                        })
                        .collect(),
                    format!("plateau-{idx}"),
                )
            }
        };
        let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let values = if peak > 0.0 {
            values.iter().map(|v| v / peak).collect()
        } else {
            values
        };
        entries.push(values);
        labels.push(label);
    }
    Ok(LineBank {
        n,
        spacing,
        seed,
        entries,
        labels,
    })
}

/// Lorentz norm `L^{u,s}(μ_d)` of a cell-sampled function on the symmetric
/// line grid `r_i = (i − n/2)·Δr`, with `dμ_d = (1+|r|)^{d-1} dr` integrated
/// exactly over each cell (cells straddling the origin split there). The
/// normalization matches the grid and kernel Lorentz norms used elsewhere:
/// an indicator of μ-mass `M` has norm `(u/s)^{1/s} M^{1/u}`.
pub fn line_mu_lorentz_norm(
    values: &[f64],
    spacing: f64,
    dim: usize,
    u: f64,
    s: f64,
) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("empty sample vector".into()));
    }
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    if !(u > 0.0) || !u.is_finite() || !(s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lorentz exponents must be positive (u finite), got ({u}, {s})"
        )));
    }
    let d = dim as f64;
    let n = values.len();
    let mu_halfline = |lo: f64, hi: f64| ((1.0 + hi).powf(d) - (1.0 + lo).powf(d)) / d;
    let mu = |a: f64, b: f64| -> f64 {
        if a >= 0.0 {
            mu_halfline(a, b)
        } else if b <= 0.0 {
            mu_halfline(-b, -a)
        } else {
            mu_halfline(0.0, -a) + mu_halfline(0.0, b)
        }
    };
    let mut cells: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let r = (i as f64 - (n / 2) as f64) * spacing;
            (values[i].abs(), mu(r - 0.5 * spacing, r + 0.5 * spacing))
        })
        .collect();
    cells.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    if s.is_infinite() {
        let mut acc = 0.0f64;
        let mut t = 0.0;
        for (w, mass) in cells {
            if w == 0.0 {
                break;
            }
            t += mass;
            acc = acc.max(w * t.powf(1.0 / u));
        }
        return Ok(acc);
    }
    let ratio = s / u;
    let mut acc = 0.0;
    let mut t0 = 0.0;
    for (w, mass) in cells {
        if w == 0.0 {
            break;
        }
        let t1 = t0 + mass;
        acc += w.powf(s) * (t1.powf(ratio) - t0.powf(ratio)) * (u / s);
        t0 = t1;
    }
    Ok(acc.powf(1.0 / s))
}

/// Weighted-convolution bound on the line measure: with
/// `M_a g(r) = g(r)(1+|r|)^a` and a rapidly decaying kernel `ς`,
/// `‖M_{-a}[ς ∗ (M_a g)]‖_{L^{u,s}(μ_d)} ≲ ‖g‖_{L^{u,s}(μ_d)}`.
///
/// The convolution is direct quadrature (`O(n²)`), the norms are
/// [`line_mu_lorentz_norm`]. Entries that vanish identically are verified to
/// map to zero and recorded under `params.skipped` rather than dividing by
/// zero. No dilation symmetry is declared (the measure `μ_d` is not
/// homogeneous).
pub fn check_weight_convolution<V>(
    bank: &LineBank,
    varsigma: V,
    varsigma_label: &str,
    a: f64,
    dim: usize,
    u: f64,
    s: f64,
    policy: RangePolicy,
) -> Result<RatioReport>
where
    V: Fn(f64) -> f64 + Sync,
{
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut guard = RangeGuard::new(policy);
    guard.require(u >= 1.0 && u.is_finite(), || {
        format!("primary exponent u = {u} outside [1, ∞)")
    })?;
    guard.require(s >= 1.0, || format!("secondary exponent s = {s} below 1"))?;
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "weight exponent must be finite, got {a}"
        )));
    }
    let n = bank.n;
    let dr = bank.spacing;
    let r_of = |i: usize| (i as f64 - (n / 2) as f64) * dr;

    // kernel samples on the difference grid, with a decay check at the edge
    let kernel: Vec<f64> = (0..(2 * n - 1))
        .map(|k| varsigma((k as f64 - (n - 1) as f64) * dr))
        .collect();
    let k_peak = kernel.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(k_peak > 0.0) {
        return Err(Error::InvalidParameter("convolution kernel vanishes".into()));
    }
    let edge = kernel[0].abs().max(kernel[2 * n - 2].abs());
    guard.require(edge <= 1e-8 * k_peak, || {
        format!(
            "kernel is not negligible at the grid edge (relative magnitude {:.3e})",
            edge / k_peak
        )
    })?;
    let kernel_l1: f64 = kernel.iter().map(|v| v.abs()).sum::<f64>() * dr;

    let weights: Vec<f64> = (0..n).map(|i| (1.0 + r_of(i).abs()).powf(a)).collect();

    let results: Vec<(String, Option<(f64, f64)>)> = bank
        .entries
        .par_iter()
        .zip(bank.labels.par_iter())
        .map(|(g, label)| -> Result<(String, Option<(f64, f64)>)> {
            if g.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "entry {label} has length {}, bank declares {n}",
                    g.len()
                )));
            }
            let rhs = line_mu_lorentz_norm(g, dr, dim, u, s)?;
            let lifted: Vec<f64> = g.iter().zip(weights.iter()).map(|(v, w)| v * w).collect();
            let mut out = vec![0.0f64; n];
            for (i, dst) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, v) in lifted.iter().enumerate() {
                    acc += kernel[i + (n - 1) - j] * v;
                }
                *dst = acc * dr / weights[i];
            }
            let lhs = line_mu_lorentz_norm(&out, dr, dim, u, s)?;
            if rhs == 0.0 {
                if lhs > 0.0 {
                    return Err(Error::Unsupported(format!(
                        "zero entry {label} produced a nonzero convolution"
                    )));
                }
                return Ok((label.clone(), None));
            }
            Ok((label.clone(), Some((lhs, rhs))))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (label, r) in results {
        match r {
            Some((lhs, rhs)) => rows.push((label, lhs, rhs)),
            None => skipped.push(label),
        }
    }
    if rows.is_empty() {
        return Err(Error::Guard(
            "every line entry vanishes; nothing to measure".into(),
        ));
    }
    let params = json!({
        "line_grid": { "n": n, "spacing": dr, "seed": bank.seed },
        "dim": dim,
        "a": a,
        "u": u,
        "s": s,
        "kernel": varsigma_label,
        "kernel_l1": kernel_l1,
        "kernel_edge_relative": edge / k_peak,
        "skipped": skipped,
        "warnings": guard.warnings_json(),
    });
    RatioReport::new("weight_convolution", rows, None, params)
}

// ---------------------------------------------------------------------------
// pointwise convergence of generalized means
// ---------------------------------------------------------------------------

/// Which part of the dilated means a convergence run drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceMode {
    /// Full profile: the reported error is `sup |S_t f − f|` over the probe.
    Full,
    /// Origin-cut remainder `χ·h`: the reported quantity is `sup |T_t f|`
    /// itself, which must die as `t → ∞` (the cut kills the symbol near the
    /// origin, so nothing converges to `f`).
    Cutoff,
}

/// Convergence experiment for the generalized dilated means: evaluates
/// `S_t f` at each `t` and reports the sup over the probe annulus
/// `R^{-1} ≤ |x| ≤ R` of `|S_t f − f|` ([`ConvergenceMode::Full`]) or of
/// `|T_t f|` for the origin-cut profile ([`ConvergenceMode::Cutoff`]).
///
/// Dilations beyond the Nyquist frequency are hard errors: the symbol's
/// transition region would fall outside the resolvable band, and the
/// resulting "convergence" would be an artifact of the grid seeing only the
/// symbol's plateau.
pub fn convergence_experiment(
    f: &GridFunction,
    rho: &RhoDistance,
    lambda: f64,
    gamma: f64,
    mode: ConvergenceMode,
    probe_radius: f64,
    t_values: &[f64],
) -> Result<ConvergenceReport> {
    let spec = f.spec;
    if f.domain != DomainTag::Space {
        return Err(Error::DomainMismatch(
            "convergence_experiment expects a space-domain function".into(),
        ));
    }
    if !(probe_radius > 1.0) || !probe_radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "probe radius must exceed 1, got {probe_radius}"
        )));
    }
    if t_values.is_empty() {
        return Err(Error::InvalidParameter("empty dilation sequence".into()));
    }
    let nyq = spec.nyquist();
    for &t in t_values {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dilation parameters must be positive, got {t}"
            )));
        }
        if t > nyq {
            return Err(Error::Guard(format!(
                "dilation t = {t} exceeds the Nyquist frequency {nyq:.3}; the symbol transition \
                 is unresolvable"
            )));
        }
    }
    let profile = match mode {
        ConvergenceMode::Full => Profile::riesz(lambda, gamma)?,
        ConvergenceMode::Cutoff => Profile::new(ProfileKind::RieszCut { lambda, gamma })?,
    };
    let mask: Vec<bool> = (0..spec.len())
        .map(|i| {
            let r = spec.cell_radius(i);
            r >= 1.0 / probe_radius && r <= probe_radius
        })
        .collect();
    if !mask.iter().any(|&b| b) {
        return Err(Error::InvalidParameter(format!(
            "probe annulus [{:.3e}, {probe_radius:.3e}] contains no grid cell",
            1.0 / probe_radius
        )));
    }
    let map = FrequencyMap::new(spec, rho)?;
    let sup_errors: Vec<f64> = t_values
        .par_iter()
        .map(|&t| -> Result<f64> {
            let st = riesz_mean(f, &map, &profile, t)?;
            let mut sup = 0.0f64;
            for (i, keep) in mask.iter().enumerate() {
                if !keep {
                    continue;
                }
                let err = match mode {
                    ConvergenceMode::Full => (st.values[i] - f.values[i]).norm(),
                    ConvergenceMode::Cutoff => st.values[i].norm(),
                };
                sup = sup.max(err);
            }
            Ok(sup)
        })
        .collect::<Result<Vec<_>>>()?;
    let probe = format!(
        "annulus {:.6e} <= |x| <= {:.6e}",
        1.0 / probe_radius,
        probe_radius
    );
    let params = json!({
        "grid": grid_json(&spec),
        "rho": rho_json(rho),
        "lambda": lambda,
        "gamma": gamma,
        "mode": format!("{mode:?}"),
        "nyquist": nyq,
    });
    ConvergenceReport::new("convergence", t_values.to_vec(), sup_errors, probe, params)
}

// ---------------------------------------------------------------------------
// oscillatory kernel asymptotics
// ---------------------------------------------------------------------------

/// Compensated lower-bound band for the origin-cut kernel: over the local
/// maxima of `|κ_{λ,γ}(r)|` in `[r_lo, r_hi]`, the quantity
/// `|κ(r)| · r^{λ+1} · (log r)^γ` should stay inside a fixed positive band
/// if the kernel really decays like `r^{-λ-1}(log r)^{-γ}` along its crests.
/// Each report row is one sampled crest (right side 1), so `min_ratio > 0`
/// *is* the band-positivity statement and `max/min` is the band width.
pub fn check_kappa_asymptotics(
    lambda: f64,
    gamma: f64,
    r_lo: f64,
    r_hi: f64,
    n: usize,
    t_ext: f64,
    policy: RangePolicy,
) -> Result<RatioReport> {
    if !(lambda > 0.0) || !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kernel asymptotics need λ > 0 and γ ≥ 0, got ({lambda}, {gamma})"
        )));
    }
    if !(r_lo > 1.0 && r_hi > r_lo) {
        return Err(Error::InvalidParameter(format!(
            "bad crest range [{r_lo}, {r_hi}]"
        )));
    }
    let mut guard = RangeGuard::new(policy);
    guard.require(r_lo >= 64.0 && r_hi <= 4096.0, || {
        format!("crest range [{r_lo}, {r_hi}] outside the calibrated window [2^6, 2^12]")
    })?;
    let profile = Profile::new(ProfileKind::RieszCut { lambda, gamma })?;
    let kernel = kernel_1d(&profile, 1.0, n, t_ext)?;
    if kernel.r_max() < 1.05 * r_hi {
        return Err(Error::Guard(format!(
            "kernel horizon {:.1} does not reach past r_hi = {r_hi}",
            kernel.r_max()
        )));
    }
    if kernel.spacing > 0.15 {
        return Err(Error::Guard(format!(
            "kernel spacing {:.3} too coarse to separate unit-period crests",
            kernel.spacing
        )));
    }

    // local maxima of |κ| in range
    let mut crests: Vec<(f64, f64)> = Vec::new();
    let vals = &kernel.values;
    for k in 1..vals.len() - 1 {
        let r = k as f64 * kernel.spacing;
        if r < r_lo || r > r_hi {
            continue;
        }
        let (a, b, c) = (vals[k - 1].abs(), vals[k].abs(), vals[k + 1].abs());
        if b > a && b >= c {
            crests.push((r, b));
        }
    }
    if crests.len() < 8 {
        return Err(Error::Guard(format!(
            "only {} kernel crests resolved in [{r_lo}, {r_hi}]",
            crests.len()
        )));
    }
    let total = crests.len();
    let step = total.div_ceil(256);
    let rows: Vec<(String, f64, f64)> = crests
        .iter()
        .step_by(step)
        .map(|&(r, v)| {
            let compensated = v * r.powf(lambda + 1.0) * r.ln().powf(gamma);
            (format!("r={r:.6e}"), compensated, 1.0)
        })
        .collect();
    let params = json!({
        "lambda": lambda,
        "gamma": gamma,
        "r_range": [r_lo, r_hi],
        "kernel": { "n": n, "t_ext": t_ext, "spacing": kernel.spacing },
        "crest_count": total,
        "reported_crests": rows.len(),
        "warnings": guard.warnings_json(),
    });
    RatioReport::new("kappa_asymptotics", rows, None, params)
}

// ---------------------------------------------------------------------------
// weighted block sums vs Besov norm
// ---------------------------------------------------------------------------

/// Weighted block-sum bound
/// `(Σ_j [2^{jα} Λ_b^j(h)]^s)^{1/s} ≲ ‖h‖_{B²_{α,s}}` with
/// `Λ_b^j(h) = (∫ |V_j h(ρ)|² ρ^{b-1} dρ)^{1/2}`, for profiles supported in
/// `(1/2, 2)` (support and the exponents `b > 0`, `α > 0` are hard
/// requirements of the statement; the support condition is policy-checked so
/// profiles reaching the origin can be probed deliberately).
///
/// Profiles with vanishing Besov norm are recorded under `params.skipped`.
pub fn check_lambda_besov(
    profiles: &[(String, Profile)],
    alpha: f64,
    s: f64,
    b: f64,
    policy: RangePolicy,
) -> Result<RatioReport> {
    if profiles.is_empty() {
        return Err(Error::InvalidParameter("empty profile family".into()));
    }
    if !(alpha > 0.0) || !(b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "the block-sum bound needs α > 0 and b > 0, got ({alpha}, {b})"
        )));
    }
    if !(s >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "summation exponent s must be ≥ 1 (or ∞), got {s}"
        )));
    }
    let mut guard = RangeGuard::new(policy);
    for (label, h) in profiles {
        let (lo, hi) = (h.support_lower(), h.support_upper());
        guard.require(lo >= 0.5 - 1e-9 && hi <= 2.0 + 1e-9, || {
            format!("profile {label} support [{lo:.3}, {hi:.3}] not inside (1/2, 2)")
        })?;
    }

    // Same sampling rationale as the maximal-function check: Δs = 2^{-11}
    // and a 64-long window resolve every admissible band profile, and the
    // interpolation tables are not consumed here.
    let opts = VjOptions {
        samples_per_unit: 1 << 11,
        t_ext: 64.0,
        keep_upto: 2.0,
        weight_exponents: vec![b],
    };
    let raw: Vec<(String, f64, f64)> = profiles
        .par_iter()
        .map(|(label, h)| -> Result<(String, f64, f64)> {
            let dec = vj_decompose(h, &opts)?;
            let lhs = if s.is_infinite() {
                (0..dec.piece_count())
                    .map(|j| Ok(2f64.powf(alpha * j as f64) * dec.weighted_norm(b, j)?))
                    .collect::<Result<Vec<f64>>>()?
                    .into_iter()
                    .fold(0.0, f64::max)
            } else {
                let mut acc = 0.0;
                for j in 0..dec.piece_count() {
                    let term = 2f64.powf(alpha * j as f64) * dec.weighted_norm(b, j)?;
                    acc += term.powf(s);
                }
                acc.powf(1.0 / s)
            };
            let rhs = besov_norm_ext(&dec, alpha, s)?;
            Ok((label.clone(), lhs, rhs))
        })
        .collect::<Result<Vec<_>>>()?;

    let (rows, skipped) = split_degenerate(raw)?;
    let params = json!({
        "alpha": alpha,
        "s": if s.is_infinite() { json!("inf") } else { json!(s) },
        "b": b,
        "skipped": skipped,
        "warnings": guard.warnings_json(),
    });
    RatioReport::new("lambda_besov", rows, None, params)
}
