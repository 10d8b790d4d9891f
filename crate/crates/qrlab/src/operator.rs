//! Quasiradial multiplier operators and their scale families.
//!
//! Everything here acts through the symbol side: an operator is a map
//! `f ↦ F⁻¹[m(ρ(ξ)) f̂]` for a radial-in-ρ symbol `m`. The module provides
//!
//! * [`FrequencyMap`] — cached `ρ(ξ_k)` per frequency bin of a grid;
//! * [`apply_symbol`] / [`multiplier_convolve`] — one multiplier application,
//!   guarded against content leaking into the unpaired Nyquist row;
//! * [`TGrid`] + [`scan_dilations`] — a geometric sweep over dilations `t`,
//!   accumulating the pointwise supremum and the pointwise square sum in one
//!   pass (deterministically parallel over fixed chunks);
//! * [`square_function_exact`] — the dilation square function evaluated
//!   *exactly* in the scale variable by grouping frequency bins into their
//!   discrete ρ-levels and integrating the scale correlation in closed
//!   quadrature, so no `t`-discretization bias enters;
//! * Littlewood–Paley pieces, fattened windows, windowed profile blocks, and
//!   oscillating-window symbols;
//! * [`kernel_decay_probe`] — grid-free pointwise kernel values for windowed
//!   profile blocks via the dimension-reduced radial inverse transform, used
//!   to read off kernel decay laws far beyond any affordable grid.

use crate::bessel::j0;
use crate::distance::{RhoDistance, RhoKind};
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{DomainTag, GridFunction, GridSpec};
use crate::numeric::gauss_legendre;
use crate::profile::{lp_block, window_eta, Profile, VjDecomposition};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;
use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

/// Relative tolerance for the Nyquist-row leak guard: a multiplier output
/// whose boundary-row magnitude exceeds this fraction of its peak is aliased
/// beyond repair and the computation refuses to continue.
const NYQUIST_LEAK_TOL: f64 = 1e-8;

/// Fixed chunk count for dilation scans. Partial results are produced per
/// chunk and merged serially in chunk order, so the outcome is bit-identical
/// for any thread count.
const SCAN_CHUNKS: usize = 8;

// ---------------------------------------------------------------------------
// frequency-side plumbing
// ---------------------------------------------------------------------------

/// Precomputed `ρ(ξ_k)` for every frequency bin of a grid, plus the mask of
/// unpaired Nyquist bins (any axis index equal to `n/2`).
#[derive(Clone, Debug)]
pub struct FrequencyMap {
    pub spec: GridSpec,
    pub rho: RhoDistance,
    pub rho_values: Vec<f64>,
    pub nyquist_mask: Vec<bool>,
}

impl FrequencyMap {
    pub fn new(spec: GridSpec, rho: &RhoDistance) -> Result<Self> {
        rho.validate()?;
        if let RhoKind::Ellipse { semi_axes } = &rho.kind {
            if semi_axes.len() != spec.dim {
                return Err(Error::DomainMismatch(format!(
                    "ellipse with {} semi-axes used on a {}-dimensional grid",
                    semi_axes.len(),
                    spec.dim
                )));
            }
        }
        let mut rho_values = Vec::with_capacity(spec.len());
        let mut nyquist_mask = Vec::with_capacity(spec.len());
        let half = spec.n / 2;
        for flat in 0..spec.len() {
            let xi = spec.frequency(flat);
            rho_values.push(rho.eval(&xi[..spec.dim]));
            let idx = spec.axis_indices(flat);
            nyquist_mask.push((0..spec.dim).any(|a| idx[a] == half));
        }
        Ok(FrequencyMap {
            spec,
            rho: rho.clone(),
            rho_values,
            nyquist_mask,
        })
    }

    fn check_compatible(&self, g: &GridFunction) -> Result<()> {
        if g.spec != self.spec {
            return Err(Error::DomainMismatch(
                "grid function and frequency map live on different grids".into(),
            ));
        }
        Ok(())
    }
}

/// Range `[ρ_lo, ρ_hi]` of positive ρ-values over bins where `|ĝ|` exceeds
/// `rel_tol` times its peak; `None` when the spectrum is empty (or carries
/// only the ρ = 0 bin).
pub fn active_rho_range(
    fhat: &GridFunction,
    map: &FrequencyMap,
    rel_tol: f64,
) -> Result<Option<(f64, f64)>> {
    map.check_compatible(fhat)?;
    let peak = fhat.sup_norm();
    if peak == 0.0 {
        return Ok(None);
    }
    let cut = rel_tol * peak;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (v, &r) in fhat.values.iter().zip(map.rho_values.iter()) {
        if r > 0.0 && v.norm() > cut {
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    if hi == 0.0 {
        return Ok(None);
    }
    Ok(Some((lo, hi)))
}

fn expect_frequency(g: &GridFunction, what: &str) -> Result<()> {
    if g.domain != DomainTag::Frequency {
        return Err(Error::DomainMismatch(format!(
            "{what} expects a frequency-domain function"
        )));
    }
    Ok(())
}

fn expect_space(g: &GridFunction, what: &str) -> Result<()> {
    if g.domain != DomainTag::Space {
        return Err(Error::DomainMismatch(format!(
            "{what} expects a space-domain function"
        )));
    }
    Ok(())
}

/// Multiply a frequency-domain function by a complex symbol of ρ.
///
/// Guards against Nyquist leakage: if after multiplication the magnitude on
/// the unpaired Nyquist rows exceeds `1e-8` of the output peak, the symbol is
/// moving content into bins whose frequency sign is ambiguous and the result
/// would be silently aliased, so an [`Error::Guard`] is returned instead.
/// Outputs whose peak falls below `1e-13` of the input peak are exempt: such
/// a result is all floating-point residue (e.g. a block symbol supported
/// where the spectrum only carries round-trip noise), and the ratio of two
/// noise values says nothing about aliasing.
pub fn apply_symbol<F>(fhat: &GridFunction, map: &FrequencyMap, symbol: F) -> Result<GridFunction>
where
    F: Fn(f64) -> Complex64,
{
    expect_frequency(fhat, "apply_symbol")?;
    map.check_compatible(fhat)?;
    let mut out = fhat.clone();
    let mut in_peak_sq = 0.0f64;
    let mut peak_sq = 0.0f64;
    let mut nyq_sq = 0.0f64;
    for (m, v) in out.values.iter_mut().enumerate() {
        in_peak_sq = in_peak_sq.max(v.norm_sqr());
        *v *= symbol(map.rho_values[m]);
        let a = v.norm_sqr();
        if a > peak_sq {
            peak_sq = a;
        }
        if map.nyquist_mask[m] && a > nyq_sq {
            nyq_sq = a;
        }
    }
    let noise_floor = 1e-26 * in_peak_sq;
    if nyq_sq > NYQUIST_LEAK_TOL * NYQUIST_LEAK_TOL * peak_sq && peak_sq > noise_floor {
        return Err(Error::Guard(format!(
            "multiplier output has relative magnitude {:.3e} on the Nyquist rows; \
             the grid cannot represent it",
            (nyq_sq / peak_sq).sqrt()
        )));
    }
    Ok(out)
}

/// [`apply_symbol`] for a real-valued symbol.
pub fn apply_real_symbol<F>(
    fhat: &GridFunction,
    map: &FrequencyMap,
    symbol: F,
) -> Result<GridFunction>
where
    F: Fn(f64) -> f64,
{
    apply_symbol(fhat, map, |r| Complex64::new(symbol(r), 0.0))
}

/// Space → space multiplier application `f ↦ F⁻¹[m(ρ) f̂]`.
pub fn multiplier_convolve<F>(
    f: &GridFunction,
    map: &FrequencyMap,
    symbol: F,
) -> Result<GridFunction>
where
    F: Fn(f64) -> f64,
{
    expect_space(f, "multiplier_convolve")?;
    let fhat = f.dft_forward()?;
    apply_real_symbol(&fhat, map, symbol)?.dft_inverse()
}

/// Generalized mean of `f` at dilation `t`: the multiplier `h(ρ(ξ)/t)`.
pub fn riesz_mean(
    f: &GridFunction,
    map: &FrequencyMap,
    profile: &Profile,
    t: f64,
) -> Result<GridFunction> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "dilation t must be positive, got {t}"
        )));
    }
    multiplier_convolve(f, map, |r| profile.eval(r / t))
}

// ---------------------------------------------------------------------------
// dilation grids and scans
// ---------------------------------------------------------------------------

/// Geometric grid of dilation parameters `t`, with `per_octave` samples per
/// doubling. The induced quadrature weight for `∫ … dt/t` is
/// `ln 2 / per_octave` per sample.
#[derive(Clone, Debug)]
pub struct TGrid {
    pub per_octave: usize,
    pub values: Vec<f64>,
}

impl TGrid {
    /// `t_i = t_lo · 2^{i/per_octave}` for `i = 0 ..= octaves · per_octave`.
    pub fn geometric(t_lo: f64, octaves: usize, per_octave: usize) -> Result<TGrid> {
        if !(t_lo > 0.0) || !t_lo.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t_lo must be positive, got {t_lo}"
            )));
        }
        if octaves == 0 || per_octave == 0 {
            return Err(Error::InvalidParameter(
                "octaves and per_octave must be at least 1".into(),
            ));
        }
        let count = octaves * per_octave + 1;
        if count > 65536 {
            return Err(Error::InvalidParameter(format!(
                "dilation grid with {count} samples is too large"
            )));
        }
        let values = (0..count)
            .map(|i| t_lo * 2f64.powf(i as f64 / per_octave as f64))
            .collect();
        Ok(TGrid { per_octave, values })
    }

    /// Dilation grid adapted to a spectrum and a profile: covers every `t`
    /// for which the symbol `h(ρ/t)` meets the active band of `f̂`, from the
    /// first contact `t = ρ_lo / sup supp h` up to either the top of the
    /// sliding regime `ρ_hi / inf supp h` or, for profiles alive at the
    /// origin, the start of the large-`t` plateau at `4 ρ_hi`. The range is
    /// clamped to `max_octaves` by raising the lower end (little happens
    /// there: only the band edge has entered the symbol).
    pub fn for_spectrum(
        fhat: &GridFunction,
        map: &FrequencyMap,
        profile: &Profile,
        per_octave: usize,
        max_octaves: usize,
    ) -> Result<TGrid> {
        let (rho_lo, rho_hi) = active_rho_range(fhat, map, 1e-12)?.ok_or_else(|| {
            Error::InvalidParameter("cannot adapt a dilation grid to an empty spectrum".into())
        })?;
        let rho_lo = rho_lo.max(rho_hi * 2f64.powi(-7));
        let s_hi = profile.support_upper();
        let s_lo = profile.support_lower();
        let t_min = rho_lo / s_hi;
        let t_max = if s_lo > 0.0 {
            rho_hi / s_lo
        } else {
            4.0 * rho_hi
        };
        let mut octaves = (t_max / t_min).log2().ceil().max(1.0) as usize;
        let mut t_lo = t_min;
        if octaves > max_octaves {
            octaves = max_octaves;
            t_lo = t_max * 2f64.powi(-(max_octaves as i32));
        }
        TGrid::geometric(t_lo, octaves, per_octave)
    }

    /// Quadrature weight per sample for `∫ … dt/t`.
    pub fn log_weight(&self) -> f64 {
        LN_2 / self.per_octave as f64
    }
}

/// One sweep over a dilation grid: for each grid point `x`, the maximum of
/// `|S_t f(x)|²` and the sum `Σ_t |S_t f(x)|²` over all sampled `t`.
#[derive(Clone, Debug)]
pub struct DilationScan {
    pub spec: GridSpec,
    pub per_octave: usize,
    pub t_count: usize,
    pub sup_sq: Vec<f64>,
    pub sum_sq: Vec<f64>,
}

impl DilationScan {
    /// The sampled maximal function `x ↦ sup_t |S_t f(x)|` as a real field.
    pub fn maximal_field(&self) -> GridFunction {
        let mut g = GridFunction::zeros(self.spec, DomainTag::Space);
        for (dst, &s) in g.values.iter_mut().zip(self.sup_sq.iter()) {
            *dst = Complex64::new(s.sqrt(), 0.0);
        }
        g
    }

    /// The geometric-quadrature square function
    /// `x ↦ (Σ_t |S_t f(x)|² · ln2/per_octave)^{1/2}`.
    pub fn square_field(&self) -> GridFunction {
        let w = LN_2 / self.per_octave as f64;
        let mut g = GridFunction::zeros(self.spec, DomainTag::Space);
        for (dst, &s) in g.values.iter_mut().zip(self.sum_sq.iter()) {
            *dst = Complex64::new((s * w).sqrt(), 0.0);
        }
        g
    }

    /// Largest pointwise excess of `sup_t |S_t f|²` over `Σ_t |S_t f|²`.
    /// Nonpositive by construction (the max is one of the summands); exposed
    /// so tests can pin the pointwise domination chain exactly.
    pub fn majorant_gap(&self) -> f64 {
        self.sup_sq
            .iter()
            .zip(self.sum_sq.iter())
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn inverse_in_place(spec: &GridSpec, values: &mut [Complex64]) {
    let scale = spec.freq_cell_volume() / (2.0 * PI).powi(spec.dim as i32);
    for flat in 0..values.len() {
        let sign = if spec.index_parity(flat) { -scale } else { scale };
        values[flat] *= sign;
    }
    let shape = vec![spec.n; spec.dim];
    fft::dft_nd(values, &shape, FftDirection::Inverse);
}

/// Sweep the dilation family `S_t f = F⁻¹[m(ρ, t) f̂]` over a [`TGrid`] with
/// a caller-supplied real symbol, accumulating pointwise `sup_t |S_t f|²`
/// and `Σ_t |S_t f|²` in one pass.
///
/// The forward transform of `f` is taken once. The `t`-loop is split into
/// [`SCAN_CHUNKS`] fixed contiguous chunks processed in parallel; each chunk
/// accumulates serially and the partials are merged in chunk order, so the
/// result does not depend on the number of worker threads.
pub fn scan_dilations_with<S>(
    f: &GridFunction,
    map: &FrequencyMap,
    tgrid: &TGrid,
    symbol: S,
) -> Result<DilationScan>
where
    S: Fn(f64, f64) -> f64 + Sync,
{
    expect_space(f, "scan_dilations_with")?;
    map.check_compatible(f)?;
    if tgrid.values.is_empty() {
        return Err(Error::InvalidParameter("empty dilation grid".into()));
    }
    let fhat = f.dft_forward()?;
    let spec = f.spec;
    let nlen = spec.len();
    let tvals = &tgrid.values;
    let chunk_len = tvals.len().div_ceil(SCAN_CHUNKS);

    let partials: Result<Vec<(Vec<f64>, Vec<f64>)>> = (0..SCAN_CHUNKS)
        .into_par_iter()
        .map(|ci| {
            let lo = (ci * chunk_len).min(tvals.len());
            let hi = ((ci + 1) * chunk_len).min(tvals.len());
            let mut sup = vec![0.0f64; nlen];
            let mut ssq = vec![0.0f64; nlen];
            let mut scratch: Vec<Complex64> = Vec::with_capacity(nlen);
            for &t in &tvals[lo..hi] {
                scratch.clear();
                scratch.extend_from_slice(&fhat.values);
                let mut peak_sq = 0.0f64;
                let mut nyq_sq = 0.0f64;
                for (m, v) in scratch.iter_mut().enumerate() {
                    *v *= symbol(map.rho_values[m], t);
                    let a = v.norm_sqr();
                    if a > peak_sq {
                        peak_sq = a;
                    }
                    if map.nyquist_mask[m] && a > nyq_sq {
                        nyq_sq = a;
                    }
                }
                if nyq_sq > NYQUIST_LEAK_TOL * NYQUIST_LEAK_TOL * peak_sq {
                    return Err(Error::Guard(format!(
                        "dilation t = {t:.6e} pushes relative magnitude {:.3e} onto the \
                         Nyquist rows",
                        (nyq_sq / peak_sq).sqrt()
                    )));
                }
                inverse_in_place(&spec, &mut scratch);
                for (m, v) in scratch.iter().enumerate() {
                    let a = v.norm_sqr();
                    if a > sup[m] {
                        sup[m] = a;
                    }
                    ssq[m] += a;
                }
            }
            Ok((sup, ssq))
        })
        .collect();
    let partials = partials?;

    let mut sup_sq = vec![0.0f64; nlen];
    let mut sum_sq = vec![0.0f64; nlen];
    for (sup, ssq) in &partials {
        for m in 0..nlen {
            if sup[m] > sup_sq[m] {
                sup_sq[m] = sup[m];
            }
            sum_sq[m] += ssq[m];
        }
    }
    Ok(DilationScan {
        spec,
        per_octave: tgrid.per_octave,
        t_count: tvals.len(),
        sup_sq,
        sum_sq,
    })
}

/// [`scan_dilations_with`] for the profile family `m(ρ, t) = h(ρ/t)`.
pub fn scan_dilations(
    f: &GridFunction,
    map: &FrequencyMap,
    profile: &Profile,
    tgrid: &TGrid,
) -> Result<DilationScan> {
    scan_dilations_with(f, map, tgrid, |r, t| profile.eval(r / t))
}

/// Sampled maximal function `sup_t |F⁻¹[h(ρ/t) f̂]|` over the dilation grid.
pub fn maximal_function(
    f: &GridFunction,
    map: &FrequencyMap,
    profile: &Profile,
    tgrid: &TGrid,
) -> Result<GridFunction> {
    Ok(scan_dilations(f, map, profile, tgrid)?.maximal_field())
}

/// L² norms of the dilation residuals `‖S_t f − f‖₂` for every `t` in the
/// grid, evaluated on the frequency side (no inverse transforms needed).
pub fn dilation_residual_norms(
    f: &GridFunction,
    map: &FrequencyMap,
    profile: &Profile,
    tgrid: &TGrid,
) -> Result<Vec<f64>> {
    expect_space(f, "dilation_residual_norms")?;
    map.check_compatible(f)?;
    let fhat = f.dft_forward()?;
    let vol = fhat.spec.freq_cell_volume() / (2.0 * PI).powi(fhat.spec.dim as i32);
    let mut out = Vec::with_capacity(tgrid.values.len());
    for &t in &tgrid.values {
        let mut acc = 0.0;
        for (v, &r) in fhat.values.iter().zip(map.rho_values.iter()) {
            let d = profile.eval(r / t) - 1.0;
            acc += v.norm_sqr() * d * d;
        }
        out.push((acc * vol).sqrt());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// square functions in the dilation variable
// ---------------------------------------------------------------------------

/// Generator weight of the smoothed-mean square function at smoothness
/// `alpha`: the dilation family uses the symbol `ψ(r) = (1-r)₊^{α-1} · r`.
fn square_generator(alpha: f64, r: f64) -> f64 {
    let u = 1.0 - r;
    if u <= 0.0 || r <= 0.0 {
        return 0.0;
    }
    u.powf(alpha - 1.0) * r
}

fn check_square_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "square-function smoothness must lie in (1/2, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// Square function by geometric quadrature in `t`:
/// `(Σ_t |F⁻¹[ψ(ρ/t) f̂]|² · ln2/per_octave)^{1/2}`.
///
/// The scale integrand has an integrable singularity where `t` crosses an
/// active ρ-level (for `alpha < 1`), which a geometric grid resolves only to
/// `O((ln2/per_octave)^{2α-1})`; use [`square_function_exact`] when the
/// `t`-quadrature bias must be excluded.
pub fn square_function_geometric(
    f: &GridFunction,
    map: &FrequencyMap,
    alpha: f64,
    tgrid: &TGrid,
) -> Result<GridFunction> {
    check_square_alpha(alpha)?;
    let scan = scan_dilations_with(f, map, tgrid, |r, t| square_generator(alpha, r / t))?;
    Ok(scan.square_field())
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static CELL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CELL.get_or_init(|| gauss_legendre(16))
}

/// Scale autocorrelation of the square-function generator:
/// `R(v) = ∫₀^∞ Φ(s) Φ(s + |v|) ds` with `Φ(s) = (1 - e⁻ˢ)^{α-1} e⁻ˢ`,
/// so that `∫₀^∞ ψ(ρ₁/t) ψ(ρ₂/t) dt/t = R(ln ρ₁ − ln ρ₂)`.
///
/// At `v = 0` this is the Beta value `1/(2α(2α−1))`; for `α = 1` it is
/// `e^{−v}/2` — both are pinned by tests. Computed by substituting
/// `u = 1 − e^{−s}` and then `u = x^m` with `m = ⌈2/(2α−1)⌉`, which flattens
/// the endpoint singularity; dyadically graded Gauss–Legendre panels in `x`
/// then converge to near machine precision.
pub fn riesz_autocorrelation(alpha: f64, v: f64) -> Result<f64> {
    check_square_alpha(alpha)?;
    let v = v.abs();
    let ev = (-v).exp();
    let one_m_ev = -(-v).exp_m1();
    let m = (2.0 / (2.0 * alpha - 1.0)).ceil().max(2.0);
    let (xs, ws) = gl16();
    let mut acc = 0.0;
    for k in 0..=50 {
        let b = 2f64.powi(-k);
        let a = 0.5 * b;
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (x_ref, w_ref) in xs.iter().zip(ws.iter()) {
            let x = mid + half * x_ref;
            let u = x.powi(m as i32);
            // 1 − (1−u)e^{−v} = (1−e^{−v}) + u e^{−v}, split to avoid
            // cancellation; factor out whichever term dominates so the
            // fractional power never sees a denormal argument.
            let uev = u * ev;
            let g = if uev >= one_m_ev {
                let q = if one_m_ev == 0.0 { 0.0 } else { one_m_ev / uev };
                m * (1.0 - u)
                    * ev.powf(alpha - 1.0)
                    * x.powf(m * (2.0 * alpha - 1.0) - 1.0)
                    * (1.0 + q).powf(alpha - 1.0)
            } else {
                m * (1.0 - u)
                    * one_m_ev.powf(alpha - 1.0)
                    * x.powf(m * alpha - 1.0)
                    * (1.0 + uev / one_m_ev).powf(alpha - 1.0)
            };
            acc += w_ref * half * g;
        }
    }
    Ok(ev * acc)
}

/// Square function with the scale integral done exactly.
///
/// On a grid the spectrum of `f` occupies finitely many discrete ρ-levels
/// `ρ_1 < … < ρ_L`. Writing `g_i` for the spatial field carried by level `i`,
///
/// `G(x)² = Σ_{i,j} R(ln ρ_i − ln ρ_j) · g_i(x) · conj(g_j(x))`,
///
/// with `R` the generator autocorrelation — the `t`-integral in closed form,
/// leaving no quadrature bias in the scale variable. Bins whose magnitude is
/// below `1e-13` of the spectral peak are dropped (they carry round-off from
/// the forward transform, and keeping them would explode the level count).
///
/// Intended for deliberately structured spectra: the level count is capped at
/// 96 and the total work at `levels × len ≤ 1.6e7` bins.
pub fn square_function_exact(
    f: &GridFunction,
    map: &FrequencyMap,
    alpha: f64,
) -> Result<GridFunction> {
    check_square_alpha(alpha)?;
    expect_space(f, "square_function_exact")?;
    map.check_compatible(f)?;
    let fhat = f.dft_forward()?;
    let peak = fhat.sup_norm();
    let spec = f.spec;
    if peak == 0.0 {
        return Ok(GridFunction::zeros(spec, DomainTag::Space));
    }
    let cut = 1e-13 * peak;

    // Group active bins by their exact ρ value. Bins on one lattice orbit
    // produce bit-identical ρ (the coordinate squares commute), so orbits
    // coalesce without any tolerance.
    let mut groups: std::collections::HashMap<u64, Vec<usize>> = std::collections::HashMap::new();
    for (flat, v) in fhat.values.iter().enumerate() {
        let r = map.rho_values[flat];
        if r > 0.0 && v.norm() > cut {
            groups.entry(r.to_bits()).or_default().push(flat);
        }
    }
    let mut levels: Vec<(f64, Vec<usize>)> = groups
        .into_iter()
        .map(|(bits, bins)| (f64::from_bits(bits), bins))
        .collect();
    levels.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let nlevels = levels.len();
    if nlevels == 0 {
        return Ok(GridFunction::zeros(spec, DomainTag::Space));
    }
    if nlevels > 96 {
        return Err(Error::Unsupported(format!(
            "exact square function needs a structured spectrum; got {nlevels} distinct \
             ρ-levels (max 96)"
        )));
    }
    if nlevels * spec.len() > 16_000_000 {
        return Err(Error::Unsupported(format!(
            "exact square function: {nlevels} levels × {} bins exceeds the work cap",
            spec.len()
        )));
    }

    // Per-level spatial fields.
    let mut fields: Vec<Vec<Complex64>> = Vec::with_capacity(nlevels);
    for (_, bins) in &levels {
        let mut scratch = vec![Complex64::default(); spec.len()];
        for &flat in bins {
            scratch[flat] = fhat.values[flat];
        }
        inverse_in_place(&spec, &mut scratch);
        fields.push(scratch);
    }

    // Scale-correlation matrix.
    let mut corr = vec![vec![0.0f64; nlevels]; nlevels];
    for i in 0..nlevels {
        for j in i..nlevels {
            let v = (levels[i].0.ln() - levels[j].0.ln()).abs();
            let r = riesz_autocorrelation(alpha, v)?;
            corr[i][j] = r;
            corr[j][i] = r;
        }
    }

    let mut gsq = vec![0.0f64; spec.len()];
    for i in 0..nlevels {
        let rii = corr[i][i];
        for (dst, v) in gsq.iter_mut().zip(fields[i].iter()) {
            *dst += rii * v.norm_sqr();
        }
        for j in (i + 1)..nlevels {
            let rij = 2.0 * corr[i][j];
            for (m, dst) in gsq.iter_mut().enumerate() {
                let a = fields[i][m];
                let b = fields[j][m];
                *dst += rij * (a.re * b.re + a.im * b.im);
            }
        }
    }

    let mut out = GridFunction::zeros(spec, DomainTag::Space);
    for (dst, &s) in out.values.iter_mut().zip(gsq.iter()) {
        *dst = Complex64::new(s.max(0.0).sqrt(), 0.0);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// dyadic pieces and windowed blocks
// ---------------------------------------------------------------------------

/// Littlewood–Paley piece `j`: the symbol `ζ(2^{-j} ρ)`, supported on
/// `ρ ∈ [2^{j-2}, 2^j]`.
pub fn lp_piece(fhat: &GridFunction, map: &FrequencyMap, j: i32) -> Result<GridFunction> {
    apply_real_symbol(fhat, map, |r| lp_block(2f64.powi(-j) * r))
}

/// Smallest dyadic range `(j_min, j_max)` whose pieces sum to exactly 1 on
/// the active band of `f̂`: `Σ_{j=a}^{b} ζ(2^{-j}ρ) = 1` for
/// `ρ ∈ [2^{a-1}, 2^{b-1}]`. `None` when the spectrum is empty.
pub fn lp_cover_range(fhat: &GridFunction, map: &FrequencyMap) -> Result<Option<(i32, i32)>> {
    let range = active_rho_range(fhat, map, 1e-12)?;
    Ok(range.map(|(lo, hi)| {
        let a = (lo.log2() + 1.0).floor() as i32;
        let b = (hi.log2() + 1.0).ceil() as i32;
        (a, b)
    }))
}

/// Fattened dyadic window at scale `k`: the symbol `η(2^{-k} ρ)`, equal to 1
/// on `ρ ∈ [2^{k-2}, 2^{k+2}]` and supported on `ρ ∈ [2^{k-3}, 2^{k+3}]`.
/// Since the plateau covers the piece support, `window_fatten(lp_piece(f))`
/// reproduces `lp_piece(f)` bit for bit.
pub fn window_fatten(fhat: &GridFunction, map: &FrequencyMap, k: i32) -> Result<GridFunction> {
    apply_real_symbol(fhat, map, |r| window_eta(2f64.powi(-k) * r))
}

/// All dyadic frequency blocks `P_k f` for `k ∈ [k_lo, k_hi]`, in frequency
/// domain, with a coverage guard: the block windows must reproduce the
/// spectrum, i.e. the relative L² mass of `f̂ · (1 - Σ_k ζ(2^{-k}ρ))` must
/// stay below 1e-10 (this catches both a too-narrow `k` range and content
/// parked at ρ = 0, which no dyadic block covers).
pub fn lp_blocks(
    fhat: &GridFunction,
    map: &FrequencyMap,
    k_lo: i32,
    k_hi: i32,
) -> Result<Vec<GridFunction>> {
    expect_frequency(fhat, "lp_blocks")?;
    map.check_compatible(fhat)?;
    if k_lo > k_hi {
        return Err(Error::InvalidParameter(format!(
            "empty block range [{k_lo}, {k_hi}]"
        )));
    }
    let mut total = 0.0f64;
    let mut missed = 0.0f64;
    for (flat, v) in fhat.values.iter().enumerate() {
        let sq = v.norm_sqr();
        total += sq;
        let r = map.rho_values[flat];
        let mut wsum = 0.0;
        for k in k_lo..=k_hi {
            wsum += lp_block(2f64.powi(-k) * r);
        }
        missed += sq * (1.0 - wsum) * (1.0 - wsum);
    }
    if total > 0.0 && missed.sqrt() > 1e-10 * total.sqrt() {
        return Err(Error::Guard(format!(
            "blocks [{k_lo}, {k_hi}] miss a {:.3e} relative fraction of the spectrum",
            missed.sqrt() / total.sqrt()
        )));
    }
    (k_lo..=k_hi).map(|k| lp_piece(fhat, map, k)).collect()
}

/// Windowed profile-block symbol at dyadic scale `k`, block `j`, dilation
/// `t`: multiplies by `η(2^{-k}ρ) · (V_j h)(2^{-k}ρ / t)`, the elementary
/// piece into which a quasiradial multiplier decomposes across frequency
/// scales and profile-smoothness blocks. The block factor is read from the
/// decomposition's kept tables (quintic interpolation).
pub fn apply_windowed_piece(
    fhat: &GridFunction,
    map: &FrequencyMap,
    pieces: &VjDecomposition,
    j: usize,
    k: i32,
    t: f64,
) -> Result<GridFunction> {
    if j >= pieces.piece_count() {
        return Err(Error::InvalidParameter(format!(
            "block index {j} out of range (decomposition has {} pieces)",
            pieces.piece_count()
        )));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "dilation t must be positive, got {t}"
        )));
    }
    let scale = 2f64.powi(-k);
    apply_real_symbol(fhat, map, |r| {
        let s = scale * r;
        let w = window_eta(s);
        if w == 0.0 {
            0.0
        } else {
            w * pieces.piece_interp6(j, s / t)
        }
    })
}

/// Scale-`k` localized maximal function over an in-octave dilation grid:
/// `sup_{t ∈ tgrid} |Σ_j F⁻¹[η(2^{-k}ρ) V_j h(2^{-k}ρ/t) f̂]|`, the sum
/// running over every block of the decomposition. This is the undecomposed
/// quantity that the two spatial maximal pieces of [`m_pieces`] majorize.
pub fn localized_maximal(
    f: &GridFunction,
    map: &FrequencyMap,
    pieces: &VjDecomposition,
    k: i32,
    tgrid: &TGrid,
) -> Result<GridFunction> {
    expect_space(f, "localized_maximal")?;
    let fhat = f.dft_forward()?;
    let mut sup = vec![0.0f64; f.values.len()];
    for &t in &tgrid.values {
        let mut acc = vec![Complex64::default(); f.values.len()];
        for j in 0..pieces.piece_count() {
            let g = apply_windowed_piece(&fhat, map, pieces, j, k, t)?;
            for (a, b) in acc.iter_mut().zip(g.values.iter()) {
                *a += *b;
            }
        }
        inverse_in_place(&f.spec, &mut acc);
        for (s, v) in sup.iter_mut().zip(acc.iter()) {
            *s = s.max(v.norm());
        }
    }
    let mut out = GridFunction::zeros(f.spec, DomainTag::Space);
    for (dst, s) in out.values.iter_mut().zip(sup.iter()) {
        *dst = Complex64::new(*s, 0.0);
    }
    Ok(out)
}

/// The two spatial maximal pieces of the scale-`k` localized maximal
/// function. For each block `j` the input is split at the spatial radius
/// `2^{-k+j+c₀}` — the ceiling under which the block kernel at scale `k` is
/// effectively supported — and the near parts feed the first piece, the far
/// parts the second:
///
/// ```text
/// M₁(x) = sup_t |Σ_j F⁻¹[η(2^{-k}ρ) V_j h(2^{-k}ρ/t) · (χ_{near,j} f)^]|
/// M₂(x) = sup_t |Σ_j F⁻¹[η(2^{-k}ρ) V_j h(2^{-k}ρ/t) · (χ_{far,j} f)^]|
/// ```
///
/// Because `χ_{near,j} + χ_{far,j} = 1` exactly, the triangle inequality
/// gives `M₁ + M₂ ≥ localized_maximal` pointwise (up to roundoff); the split
/// is what lets near parts be summed with kernel decay and far parts with
/// plain L² bounds.
pub fn m_pieces(
    f: &GridFunction,
    map: &FrequencyMap,
    pieces: &VjDecomposition,
    k: i32,
    c0: u32,
    tgrid: &TGrid,
) -> Result<(GridFunction, GridFunction)> {
    expect_space(f, "m_pieces")?;
    for &t in &tgrid.values {
        if !(1.0..=2.0 + 1e-12).contains(&t) {
            return Err(Error::InvalidParameter(format!(
                "spatial maximal pieces expect in-octave dilations t ∈ [1, 2], got {t}"
            )));
        }
    }
    let count = pieces.piece_count();
    let mut near_hats = Vec::with_capacity(count);
    let mut far_hats = Vec::with_capacity(count);
    for j in 0..count {
        let radius = 2f64.powi(-k + j as i32 + c0 as i32);
        let (near, far) = spatial_split(f, radius)?;
        near_hats.push(near.dft_forward()?);
        far_hats.push(far.dft_forward()?);
    }

    let len = f.values.len();
    let mut sup1 = vec![0.0f64; len];
    let mut sup2 = vec![0.0f64; len];
    for &t in &tgrid.values {
        let mut acc1 = vec![Complex64::default(); len];
        let mut acc2 = vec![Complex64::default(); len];
        for j in 0..count {
            let g1 = apply_windowed_piece(&near_hats[j], map, pieces, j, k, t)?;
            let g2 = apply_windowed_piece(&far_hats[j], map, pieces, j, k, t)?;
            for i in 0..len {
                acc1[i] += g1.values[i];
                acc2[i] += g2.values[i];
            }
        }
        inverse_in_place(&f.spec, &mut acc1);
        inverse_in_place(&f.spec, &mut acc2);
        for i in 0..len {
            sup1[i] = sup1[i].max(acc1[i].norm());
            sup2[i] = sup2[i].max(acc2[i].norm());
        }
    }

    let mut m1 = GridFunction::zeros(f.spec, DomainTag::Space);
    let mut m2 = GridFunction::zeros(f.spec, DomainTag::Space);
    for i in 0..len {
        m1.values[i] = Complex64::new(sup1[i], 0.0);
        m2.values[i] = Complex64::new(sup2[i], 0.0);
    }
    Ok((m1, m2))
}

/// Oscillating-window symbol `η(ρ) e^{-iρτ}`: a band-limited wave propagator
/// whose kernel travels along the ρ-gradient flow as `τ` grows. Unimodular
/// on the window, so it preserves the L² norm of window-band content exactly,
/// and collapses to the scalar `e^{-iτ} η(1)` on a unit-shell spectrum.
pub fn apply_oscillating_window(
    fhat: &GridFunction,
    map: &FrequencyMap,
    tau: f64,
) -> Result<GridFunction> {
    apply_symbol(fhat, map, |r| {
        let w = window_eta(r);
        if w == 0.0 {
            Complex64::default()
        } else {
            Complex64::from_polar(w, -tau * r)
        }
    })
}

/// Split a spatial field into the parts supported at cell radius ≤ `radius`
/// and > `radius` (exact partition: the two parts sum back to the input).
pub fn spatial_split(g: &GridFunction, radius: f64) -> Result<(GridFunction, GridFunction)> {
    expect_space(g, "spatial_split")?;
    let mut inner = GridFunction::zeros(g.spec, DomainTag::Space);
    let mut outer = GridFunction::zeros(g.spec, DomainTag::Space);
    for flat in 0..g.values.len() {
        if g.spec.cell_radius(flat) <= radius {
            inner.values[flat] = g.values[flat];
        } else {
            outer.values[flat] = g.values[flat];
        }
    }
    Ok((inner, outer))
}

/// Periodic convolution `(u * v)(x) = ∫ u(y) v(x−y) dy` on the grid torus
/// via the transform pair. Faithful to the convolution on ℝ^d only when both
/// factors decay inside the box.
pub fn torus_convolve(u: &GridFunction, v: &GridFunction) -> Result<GridFunction> {
    expect_space(u, "torus_convolve")?;
    expect_space(v, "torus_convolve")?;
    if u.spec != v.spec {
        return Err(Error::DomainMismatch(
            "convolution factors live on different grids".into(),
        ));
    }
    let uh = u.dft_forward()?;
    let vh = v.dft_forward()?;
    let mut wh = uh;
    for (a, b) in wh.values.iter_mut().zip(vh.values.iter()) {
        *a *= *b;
    }
    wh.dft_inverse()
}

// ---------------------------------------------------------------------------
// grid-free radial kernel probe
// ---------------------------------------------------------------------------

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Inverse Fourier transform of a radial symbol `g₀(|ξ|)` in dimension `d`,
/// evaluated at Euclidean radii:
///
/// * `d = 1`: `K(r) = π⁻¹ ∫ g₀(s) cos(rs) ds`
/// * `d = 2`: `K(r) = (2π)⁻¹ ∫ g₀(s) s J₀(rs) ds`
/// * `d = 3`: `K(r) = (2π²)⁻¹ ∫ g₀(s) s² sinc(rs) ds`
///
/// `g0` holds midpoint samples on `[s_lo, s_hi]` (power-of-two count); the
/// symbol must vanish smoothly at both ends, which makes the rectangle rule
/// superalgebraically accurate once the oscillation `rs` is resolved. Large
/// radii use the full sample set; small radii decimate it (12 points per
/// oscillation period are kept at minimum).
pub fn radial_inverse_transform(
    dim: usize,
    s_lo: f64,
    s_hi: f64,
    g0: &[f64],
    radii: &[f64],
) -> Result<Vec<f64>> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter(format!(
            "radial transform dimension must be 1..=3, got {dim}"
        )));
    }
    let n = g0.len();
    if n < 1024 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "radial symbol needs a power-of-two sample count ≥ 1024, got {n}"
        )));
    }
    if !(s_hi > s_lo) || !(s_lo >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bad radial support [{s_lo}, {s_hi}]"
        )));
    }
    let span = s_hi - s_lo;
    let ds = span / n as f64;
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let r = r.abs();
        let target = (12.0 * r * span / (2.0 * PI)).ceil().max(4096.0) as usize;
        let n_r = target.next_power_of_two().min(n);
        if (12.0 * r * span / (2.0 * PI)) > n as f64 {
            return Err(Error::InvalidParameter(format!(
                "radius {r:.3e} oscillates faster than the symbol sampling resolves"
            )));
        }
        let stride = n / n_r;
        let mut acc = 0.0;
        let mut m = 0;
        while m < n {
            let s = s_lo + (m as f64 + 0.5) * ds;
            let w = match dim {
                1 => (r * s).cos() / PI,
                2 => s * j0(r * s) / (2.0 * PI),
                _ => s * s * sinc(r * s) / (2.0 * PI * PI),
            };
            acc += g0[m] * w;
            m += stride;
        }
        out.push(acc * ds * stride as f64);
    }
    Ok(out)
}

/// Pointwise values of the windowed-block kernel
/// `K_{j,s} = F⁻¹[η(ρ(ξ)) · (V_j h)(ρ(ξ)/s)]` along the first coordinate
/// axis, computed grid-free through the radial reduction (`s ∈ [1/2, 2]` is
/// the in-octave dilation of the block).
///
/// Requires a distance whose core is a diagonal image of the Euclidean norm,
/// `b(ξ) = |diag(1/a) ξ|`; then `K(x) = (Π aᵢ) · K_rad(|diag(a) x|)` with
/// `K_rad` the `d`-dimensional radial inverse transform of
/// `u ↦ η(u^β) (V_j h)(u^β/s)`. Returned values are `K(r·e₁)` for the given
/// radii — exact continuum kernel values (no grid, no periodization), which
/// is what makes decay laws readable over many octaves.
pub fn kernel_decay_probe(
    rho: &RhoDistance,
    dim: usize,
    pieces: &VjDecomposition,
    j: usize,
    s: f64,
    radii: &[f64],
) -> Result<Vec<f64>> {
    rho.validate()?;
    if j >= pieces.piece_count() {
        return Err(Error::InvalidParameter(format!(
            "block index {j} out of range (decomposition has {} pieces)",
            pieces.piece_count()
        )));
    }
    if !(0.5..=2.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "block dilation s must lie in [1/2, 2], got {s}"
        )));
    }
    let scales = rho.diagonal_scales(dim).ok_or_else(|| {
        Error::Unsupported(
            "kernel probe needs a distance with a diagonal Euclidean core".into(),
        )
    })?;
    let jac: f64 = scales.iter().product();
    let beta = rho.beta;
    let u_lo = 0.125f64.powf(1.0 / beta);
    let u_hi = 8f64.powf(1.0 / beta);
    let span = u_hi - u_lo;

    let r_eff_max = radii
        .iter()
        .map(|r| (r * scales[0]).abs())
        .fold(0.0f64, f64::max);
    let target = (12.0 * r_eff_max * span / (2.0 * PI)).ceil().max(16384.0) as usize;
    let n = target.next_power_of_two();
    if n > (1 << 20) {
        return Err(Error::InvalidParameter(format!(
            "probe radius {r_eff_max:.3e} needs more than 2^20 quadrature samples"
        )));
    }

    let ds = span / n as f64;
    let mut g0 = Vec::with_capacity(n);
    for m in 0..n {
        let u = u_lo + (m as f64 + 0.5) * ds;
        let rho_val = if beta == 1.0 { u } else { u.powf(beta) };
        let w = window_eta(rho_val);
        g0.push(if w == 0.0 {
            0.0
        } else {
            w * pieces.piece_interp6(j, rho_val / s)
        });
    }

    let reduced: Vec<f64> = radii.iter().map(|r| r * scales[0]).collect();
    let vals = radial_inverse_transform(dim, u_lo, u_hi, &g0, &reduced)?;
    Ok(vals.into_iter().map(|v| v * jac).collect())
}

/// Decay statistics of a windowed-block kernel, measured by
/// [`kernel_decay_probe`] on the two regions where the stationary-phase
/// geometry forces smallness: deep inside (`|x| ≤ 2^{-j-c₀}`, where the
/// phase gradient stays ≥ 2^{j-c₀}) and far outside (`|x| ≥ 2^{j+c₀}`,
/// where it stays ≥ |x|/2).
#[derive(Clone, Debug)]
pub struct DecayProbe {
    /// Upper edge `2^{-j-c₀}` of the probed inner region.
    pub inner_radius: f64,
    /// sup |K| over `[0, inner_radius]`.
    pub inner_sup: f64,
    /// Lower edge `2^{j+c₀}` of the probed outer region.
    pub outer_start: f64,
    /// Envelope per octave: `sups[m] = sup |K|` over
    /// `[outer_start·2^m, outer_start·2^{m+1}]`.
    pub outer_octave_sups: Vec<f64>,
    /// Least-squares slope of `log2(octave sup)` against the octave midpoint
    /// `log2 r`, over the last four probed octaves (the first octaves past
    /// the packet edge still carry the prefactor transition, not the
    /// asymptotic law). `None` for `j = 0` (no decay claim at the base
    /// block) or when fewer than two octaves carry signal.
    pub outer_slope: Option<f64>,
}

/// Probe the inner/outer decay of the block kernel `K_{j,s}` and fit the
/// outer envelope. The outer sup per octave is taken over 64 geometrically
/// spaced radii — enough phase samples that the oscillation's crests are hit
/// to within a few percent, which is far below an octave on the log scale.
pub fn kernel_decay_fit(
    rho: &RhoDistance,
    dim: usize,
    pieces: &VjDecomposition,
    j: usize,
    s: f64,
    c0: u32,
    octaves: usize,
) -> Result<DecayProbe> {
    if octaves == 0 || octaves > 12 {
        return Err(Error::InvalidParameter(format!(
            "outer fit needs 1..=12 octaves, got {octaves}"
        )));
    }
    let inner_radius = 2f64.powi(-(j as i32) - c0 as i32);
    let outer_start = 2f64.powi(j as i32 + c0 as i32);

    const INNER_SAMPLES: usize = 33;
    const PER_OCTAVE: usize = 64;
    let mut radii = Vec::with_capacity(INNER_SAMPLES + octaves * PER_OCTAVE);
    for i in 0..INNER_SAMPLES {
        radii.push(inner_radius * i as f64 / (INNER_SAMPLES - 1) as f64);
    }
    for m in 0..octaves {
        for i in 0..PER_OCTAVE {
            let frac = (i as f64 + 0.5) / PER_OCTAVE as f64;
            radii.push(outer_start * 2f64.powf(m as f64 + frac));
        }
    }

    let values = kernel_decay_probe(rho, dim, pieces, j, s, &radii)?;
    let inner_sup = values[..INNER_SAMPLES]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let mut outer_octave_sups = Vec::with_capacity(octaves);
    for m in 0..octaves {
        let base = INNER_SAMPLES + m * PER_OCTAVE;
        let sup = values[base..base + PER_OCTAVE]
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        outer_octave_sups.push(sup);
    }

    // Fit log2(sup) against the octave midpoint log2 radius, using only the
    // last four octaves when more were probed.
    let fit_from = outer_octave_sups.len().saturating_sub(4);
    let pts: Vec<(f64, f64)> = outer_octave_sups
        .iter()
        .enumerate()
        .skip(fit_from)
        .filter(|(_, sup)| **sup > 0.0)
        .map(|(m, sup)| (j as f64 + c0 as f64 + m as f64 + 0.5, sup.log2()))
        .collect();
    let outer_slope = if j == 0 || pts.len() < 2 {
        None
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Some(sxy / sxx)
    };

    Ok(DecayProbe {
        inner_radius,
        inner_sup,
        outer_start,
        outer_octave_sups,
        outer_slope,
    })
}
