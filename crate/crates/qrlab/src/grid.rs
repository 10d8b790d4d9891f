//! Periodized grids, the unitary DFT pair, annulus decompositions, and
//! deterministic banks of test functions.
//!
//! A grid covers `[-L, L)^d` with `n` points per axis (`x_i = -L + i·Δx`,
//! `Δx = 2L/n`). Its frequency lattice is the unshifted DFT lattice with
//! spacing `Δξ = π/L`: bin `k` carries `ξ = s(k)·Δξ` where `s(k) = k` for
//! `k < n/2` and `k - n` otherwise. With the continuum convention
//! `ĝ(ξ) = ∫ g e^{-i⟨x,ξ⟩} dx` the discrete pair is
//!
//! ```text
//! ĝ[k] = (-1)^{Σ k_i} Δx^d · DFT[g][k]
//! g[j] = (2π)^{-d} Δξ^d · IDFT[(-1)^{Σ k_i} ĝ[k]][j]
//! ```
//!
//! (the sign flips absorb the `e^{±iπ s(k)}` phases from the `-L` grid
//! offset; `Δx·Δξ·n = 2π` makes the pair exactly inverse to each other).

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{BufRead, Write};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Per-axis size cap in three dimensions (keeps `n^3` grids desk-sized).
pub const MAX_N_3D: usize = 64;

/// Rectangular grid specification: dimension, points per axis, half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub half_width: f64,
}

impl GridSpec {
    /// Validated constructor: `dim ∈ {1,2,3}`, `n` a power of two `≥ 8`
    /// (`≤ 64` when `dim == 3`), `half_width > 0`.
    pub fn new(dim: usize, n: usize, half_width: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid(format!("dim must be 1..=3, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        if dim == 3 && n > MAX_N_3D {
            return Err(Error::InvalidGrid(format!(
                "n must be <= {MAX_N_3D} in three dimensions, got {n}"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half_width must be positive and finite, got {half_width}"
            )));
        }
        Ok(GridSpec { dim, n, half_width })
    }

    /// Spatial spacing `Δx = 2L/n`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Frequency spacing `Δξ = π/L`.
    pub fn freq_spacing(&self) -> f64 {
        PI / self.half_width
    }

    /// Largest representable frequency magnitude per axis, `(n/2)·Δξ`.
    pub fn nyquist(&self) -> f64 {
        (self.n / 2) as f64 * self.freq_spacing()
    }

    /// Total number of grid points `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial cell volume `Δx^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Frequency cell volume `Δξ^d`.
    pub fn freq_cell_volume(&self) -> f64 {
        self.freq_spacing().powi(self.dim as i32)
    }

    /// Decompose a flat row-major index into per-axis indices.
    #[inline]
    pub fn axis_indices(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut out = [0usize; MAX_DIM];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rem % self.n;
            rem /= self.n;
        }
        out
    }

    /// Signed frequency integer for axis index `i`: `i` if `i < n/2`, else `i-n`.
    #[inline]
    pub fn signed_index(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Spatial coordinates of a flat index (unused axes are zero).
    #[inline]
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.axis_indices(flat);
        let dx = self.spacing();
        let mut out = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            out[axis] = -self.half_width + idx[axis] as f64 * dx;
        }
        out
    }

    /// Frequency coordinates of a flat index (unused axes are zero).
    #[inline]
    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.axis_indices(flat);
        let dxi = self.freq_spacing();
        let mut out = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            out[axis] = self.signed_index(idx[axis]) as f64 * dxi;
        }
        out
    }

    /// Parity of the sum of axis indices (the `(-1)^{Σ k_i}` DFT phase).
    #[inline]
    pub fn index_parity(&self, flat: usize) -> bool {
        let idx = self.axis_indices(flat);
        let mut s = 0usize;
        for axis in 0..self.dim {
            s += idx[axis];
        }
        s % 2 == 1
    }

    /// Euclidean radius of the *spatial* cell center, with the origin cell
    /// regularized to half a spacing (`r(0) := Δx/2`). Every radial weight
    /// and annulus-membership test in the crate uses this radius.
    #[inline]
    pub fn cell_radius(&self, flat: usize) -> f64 {
        let x = self.point(flat);
        let mut r2 = 0.0;
        for axis in 0..self.dim {
            r2 += x[axis] * x[axis];
        }
        let r = r2.sqrt();
        if r == 0.0 {
            0.5 * self.spacing()
        } else {
            r
        }
    }

    /// Companion grid for the dyadic dilation `x ↦ 2^m x`: same `n`, half
    /// width `2^{-m} L`. A sample array reinterpreted on the companion grid
    /// represents `x' ↦ f(2^m x')` exactly, index by index.
    pub fn dilated(&self, m: i32) -> Result<GridSpec> {
        GridSpec::new(self.dim, self.n, self.half_width * 2f64.powi(-m))
    }
}

/// Which side of the transform a sample array lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainTag {
    Space,
    Frequency,
}

/// Complex samples on a grid, tagged by domain.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub domain: DomainTag,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(spec: GridSpec, domain: DomainTag) -> Self {
        GridFunction {
            spec,
            domain,
            values: vec![Complex64::default(); spec.len()],
        }
    }

    /// Sample a function of the spatial coordinates.
    pub fn from_space_fn<F: Fn(&[f64]) -> Complex64>(spec: GridSpec, f: F) -> Self {
        let mut g = GridFunction::zeros(spec, DomainTag::Space);
        for flat in 0..spec.len() {
            let x = spec.point(flat);
            g.values[flat] = f(&x[..spec.dim]);
        }
        g
    }

    /// Sample a function of the frequency coordinates.
    pub fn from_frequency_fn<F: Fn(&[f64]) -> Complex64>(spec: GridSpec, f: F) -> Self {
        let mut g = GridFunction::zeros(spec, DomainTag::Frequency);
        for flat in 0..spec.len() {
            let xi = spec.frequency(flat);
            g.values[flat] = f(&xi[..spec.dim]);
        }
        g
    }

    fn expect_domain(&self, domain: DomainTag, what: &str) -> Result<()> {
        if self.domain != domain {
            return Err(Error::DomainMismatch(format!(
                "{what} expects a {domain:?}-domain function, got {:?}",
                self.domain
            )));
        }
        Ok(())
    }

    /// Forward transform `ĝ(ξ) = ∫ g e^{-i⟨x,ξ⟩} dx` (space → frequency).
    pub fn dft_forward(&self) -> Result<GridFunction> {
        self.expect_domain(DomainTag::Space, "dft_forward")?;
        let spec = self.spec;
        let mut values = self.values.clone();
        let shape = vec![spec.n; spec.dim];
        fft::dft_nd(&mut values, &shape, FftDirection::Forward);
        let scale = spec.cell_volume();
        for flat in 0..values.len() {
            let sign = if spec.index_parity(flat) { -scale } else { scale };
            values[flat] *= sign;
        }
        Ok(GridFunction {
            spec,
            domain: DomainTag::Frequency,
            values,
        })
    }

    /// Inverse transform `g(x) = (2π)^{-d} ∫ ĝ e^{+i⟨x,ξ⟩} dξ` (frequency → space).
    pub fn dft_inverse(&self) -> Result<GridFunction> {
        self.expect_domain(DomainTag::Frequency, "dft_inverse")?;
        let spec = self.spec;
        let mut values = self.values.clone();
        let scale = spec.freq_cell_volume() / (2.0 * PI).powi(spec.dim as i32);
        for flat in 0..values.len() {
            let sign = if spec.index_parity(flat) { -scale } else { scale };
            values[flat] *= sign;
        }
        let shape = vec![spec.n; spec.dim];
        fft::dft_nd(&mut values, &shape, FftDirection::Inverse);
        Ok(GridFunction {
            spec,
            domain: DomainTag::Space,
            values,
        })
    }

    /// L² norm: `(Σ|g|²·Δx^d)^{1/2}` in space,
    /// `((2π)^{-d} Σ|ĝ|²·Δξ^d)^{1/2}` in frequency (Parseval-consistent).
    pub fn l2_norm(&self) -> f64 {
        let vol = match self.domain {
            DomainTag::Space => self.spec.cell_volume(),
            DomainTag::Frequency => {
                self.spec.freq_cell_volume() / (2.0 * PI).powi(self.spec.dim as i32)
            }
        };
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (sum * vol).sqrt()
    }

    /// Supremum of |g| over the grid.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Max of |g| over the outermost layer of cells (any axis index 0 or n-1).
    pub fn boundary_max(&self) -> f64 {
        let n = self.spec.n;
        let mut best = 0.0f64;
        for flat in 0..self.values.len() {
            let idx = self.spec.axis_indices(flat);
            let on_boundary = (0..self.spec.dim).any(|a| idx[a] == 0 || idx[a] == n - 1);
            if on_boundary {
                best = best.max(self.values[flat].norm());
            }
        }
        best
    }

    /// Rescale all values in place.
    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// Reinterpret these samples on the companion grid of the dyadic
    /// dilation `x ↦ 2^m x` (exact, index by index: the array for `f` on the
    /// grid of half-width `L` is the array for `f(2^m ·)` on half-width
    /// `2^{-m} L`).
    pub fn dilated_view(&self, m: i32) -> Result<GridFunction> {
        Ok(GridFunction {
            spec: self.spec.dilated(m)?,
            domain: self.domain,
            values: self.values.clone(),
        })
    }

    /// Write samples as `<prefix>.csv` (row-major `i0,..,i_{d-1},re,im` rows,
    /// 17 significant digits) plus a JSON header `<prefix>.json` carrying
    /// `dim`, `n`, `half_width`, `domain_tag`.
    pub fn save(&self, prefix: &str) -> Result<()> {
        let header = serde_json::json!({
            "dim": self.spec.dim,
            "n": self.spec.n,
            "half_width": self.spec.half_width,
            "domain_tag": match self.domain { DomainTag::Space => "space", DomainTag::Frequency => "frequency" },
        });
        std::fs::write(
            format!("{prefix}.json"),
            serde_json::to_string_pretty(&header)?,
        )?;
        let file = std::fs::File::create(format!("{prefix}.csv"))?;
        let mut w = std::io::BufWriter::new(file);
        let mut cols: Vec<String> = (0..self.spec.dim).map(|a| format!("i{a}")).collect();
        cols.push("re".into());
        cols.push("im".into());
        writeln!(w, "{}", cols.join(","))?;
        for flat in 0..self.values.len() {
            let idx = self.spec.axis_indices(flat);
            let mut row: Vec<String> = (0..self.spec.dim).map(|a| idx[a].to_string()).collect();
            row.push(format!("{:.16e}", self.values[flat].re));
            row.push(format!("{:.16e}", self.values[flat].im));
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Inverse of [`GridFunction::save`]; round-trips values exactly.
    pub fn load(prefix: &str) -> Result<GridFunction> {
        let header: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(format!("{prefix}.json"))?)?;
        let dim = header["dim"]
            .as_u64()
            .ok_or_else(|| Error::InvalidParameter("header missing dim".into()))?
            as usize;
        let n = header["n"]
            .as_u64()
            .ok_or_else(|| Error::InvalidParameter("header missing n".into()))?
            as usize;
        let half_width = header["half_width"]
            .as_f64()
            .ok_or_else(|| Error::InvalidParameter("header missing half_width".into()))?;
        let domain = match header["domain_tag"].as_str() {
            Some("space") => DomainTag::Space,
            Some("frequency") => DomainTag::Frequency,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "bad domain_tag in header: {other:?}"
                )))
            }
        };
        let spec = GridSpec::new(dim, n, half_width)?;
        let mut g = GridFunction::zeros(spec, domain);
        let file = std::fs::File::open(format!("{prefix}.csv"))?;
        let reader = std::io::BufReader::new(file);
        let mut lines = reader.lines();
        let _header = lines.next();
        let mut count = 0usize;
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != dim + 2 {
                return Err(Error::InvalidParameter(format!(
                    "bad row width {} (want {})",
                    parts.len(),
                    dim + 2
                )));
            }
            let mut flat = 0usize;
            for axis in 0..dim {
                let i: usize = parts[axis]
                    .parse()
                    .map_err(|e| Error::InvalidParameter(format!("bad index: {e}")))?;
                flat = flat * n + i;
            }
            let re: f64 = parts[dim]
                .parse()
                .map_err(|e| Error::InvalidParameter(format!("bad re: {e}")))?;
            let im: f64 = parts[dim + 1]
                .parse()
                .map_err(|e| Error::InvalidParameter(format!("bad im: {e}")))?;
            g.values[flat] = Complex64::new(re, im);
            count += 1;
        }
        if count != spec.len() {
            return Err(Error::InvalidParameter(format!(
                "row count {count} does not match grid size {}",
                spec.len()
            )));
        }
        Ok(g)
    }
}

/// Dyadic annuli `A_l = {2^l ≤ |x| < 2^{l+1}}` as boolean masks over a grid.
///
/// Membership is decided by the (origin-regularized) Euclidean radius of the
/// cell center, so the masks for distinct `l` are disjoint by construction.
#[derive(Clone, Debug)]
pub struct AnnulusDecomposition {
    pub spec: GridSpec,
    pub l_min: i32,
    pub l_max: i32,
    masks: Vec<Vec<bool>>,
    pub cell_counts: Vec<usize>,
}

/// Build the annulus masks for `l = l_min..=l_max`.
///
/// Requires `2^{l_max+1} ≤ half_width` so the largest annulus is fully
/// inside the box along the axes (corner regions beyond `|x| = L` are never
/// covered; test functions must be negligible there).
pub fn annuli(spec: GridSpec, l_min: i32, l_max: i32) -> Result<AnnulusDecomposition> {
    if l_min > l_max {
        return Err(Error::InvalidParameter(format!(
            "l_min {l_min} exceeds l_max {l_max}"
        )));
    }
    let outer = 2f64.powi(l_max + 1);
    if outer > spec.half_width * (1.0 + 1e-12) {
        return Err(Error::InvalidGrid(format!(
            "outer annulus radius 2^{} = {outer} exceeds half_width {}",
            l_max + 1,
            spec.half_width
        )));
    }
    let count = (l_max - l_min + 1) as usize;
    let mut masks = vec![vec![false; spec.len()]; count];
    let mut cell_counts = vec![0usize; count];
    let lo = 2f64.powi(l_min);
    let hi = 2f64.powi(l_max + 1);
    for flat in 0..spec.len() {
        let r = spec.cell_radius(flat);
        if r < lo || r >= hi {
            continue;
        }
        let l = r.log2().floor() as i32;
        // guard against log2 rounding at dyadic boundaries
        let l = if r < 2f64.powi(l) {
            l - 1
        } else if r >= 2f64.powi(l + 1) {
            l + 1
        } else {
            l
        };
        if l < l_min || l > l_max {
            continue;
        }
        let slot = (l - l_min) as usize;
        masks[slot][flat] = true;
        cell_counts[slot] += 1;
    }
    Ok(AnnulusDecomposition {
        spec,
        l_min,
        l_max,
        masks,
        cell_counts,
    })
}

impl AnnulusDecomposition {
    /// Default annulus range for a grid: the lowest annulus catches the
    /// origin-regularized radius `Δx/2`, the highest reaches `half_width`.
    pub fn default_range(spec: &GridSpec) -> (i32, i32) {
        let l_min = (0.5 * spec.spacing()).log2().floor() as i32;
        let l_max = spec.half_width.log2().floor() as i32 - 1;
        (l_min, l_max.max(l_min))
    }

    pub fn mask(&self, l: i32) -> Option<&[bool]> {
        if l < self.l_min || l > self.l_max {
            return None;
        }
        Some(&self.masks[(l - self.l_min) as usize])
    }

    pub fn levels(&self) -> impl Iterator<Item = i32> + '_ {
        self.l_min..=self.l_max
    }

    /// `Σ |f|²·Δx^d` over one annulus.
    pub fn l2_mass_sq(&self, f: &GridFunction, l: i32) -> Result<f64> {
        if f.spec != self.spec {
            return Err(Error::DomainMismatch(
                "annulus decomposition built for a different grid".into(),
            ));
        }
        let mask = self
            .mask(l)
            .ok_or_else(|| Error::InvalidParameter(format!("annulus {l} out of range")))?;
        let vol = self.spec.cell_volume();
        let mut acc = 0.0;
        for (v, &m) in f.values.iter().zip(mask.iter()) {
            if m {
                acc += v.norm_sqr();
            }
        }
        Ok(acc * vol)
    }

    /// Relative L² mass of `f` on cells not covered by any annulus.
    pub fn uncovered_fraction(&self, f: &GridFunction) -> Result<f64> {
        if f.spec != self.spec {
            return Err(Error::DomainMismatch(
                "annulus decomposition built for a different grid".into(),
            ));
        }
        let lo = 2f64.powi(self.l_min);
        let hi = 2f64.powi(self.l_max + 1);
        let mut out = 0.0;
        let mut total = 0.0;
        for flat in 0..f.values.len() {
            let m = f.values[flat].norm_sqr();
            total += m;
            let r = self.spec.cell_radius(flat);
            if r < lo || r >= hi {
                out += m;
            }
        }
        if total == 0.0 {
            return Ok(0.0);
        }
        Ok((out / total).sqrt())
    }
}

/// Smooth transition equal to 1 for `u ≤ 0` and 0 for `u ≥ 1`
/// (`e^{-1/v}`-type partition step; `C^∞`, exactly constant outside `(0,1)`).
pub fn smooth_step(u: f64) -> f64 {
    fn phi(v: f64) -> f64 {
        if v > 0.0 {
            (-1.0 / v).exp()
        } else {
            0.0
        }
    }
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        let a = phi(1.0 - u);
        let b = phi(u);
        a / (a + b)
    }
}

/// Smooth rise from 0 (at `r ≤ a`) to 1 (at `r ≥ b`).
pub fn smooth_rise(r: f64, a: f64, b: f64) -> f64 {
    smooth_step((b - r) / (b - a))
}

/// Smooth fall from 1 (at `r ≤ a`) to 0 (at `r ≥ b`).
pub fn smooth_fall(r: f64, a: f64, b: f64) -> f64 {
    smooth_step((r - a) / (b - a))
}

/// A deterministic bank of unit-L² test functions.
#[derive(Clone, Debug)]
pub struct TestBank {
    pub spec: GridSpec,
    pub seed: u64,
    pub entries: Vec<GridFunction>,
    pub labels: Vec<String>,
}

/// Frequency shell `[lo, hi]` of admissible band-limited centers for this
/// grid, or `None` when the grid is too coarse or too small to hold one
/// (the window must fit under Nyquist and still decay by the box boundary).
pub fn band_shell_range(spec: GridSpec) -> Option<(f64, f64)> {
    let lo = (198.0 / spec.half_width).max(3.0);
    let hi = 0.85 * spec.nyquist() / 1.5;
    if hi >= lo {
        Some((lo, hi))
    } else {
        None
    }
}

/// Build a bank of `count` unit-norm test functions, cycling through four
/// families: Gaussians, modulated Gaussians, smoothed annulus indicators,
/// and band-limited fields whose spectrum lies exactly inside a declared
/// euclidean shell. On grids too small to hold such a shell the fourth
/// family is dropped and the cycle has length three. All parameters are
/// drawn from a `ChaCha8` stream seeded by `seed`, so the same
/// `(spec, seed, count)` reproduces the bank bit-for-bit.
///
/// Every entry is checked to be negligible at the box boundary
/// (max < 1e-10), which is what lets the periodized DFT stand in for the
/// continuum transform.
pub fn make_bank(spec: GridSpec, seed: u64, count: usize) -> Result<TestBank> {
    if count == 0 {
        return Err(Error::InvalidParameter("bank count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = spec.half_width;
    let families = if band_shell_range(spec).is_some() { 4 } else { 3 };
    let mut entries = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for i in 0..count {
        let (mut f, label) = match i % families {
            0 => (bank_gaussian(spec, &mut rng, false), format!("gauss-{i}")),
            1 => (bank_gaussian(spec, &mut rng, true), format!("modgauss-{i}")),
            2 => (bank_ring(spec, &mut rng), format!("ring-{i}")),
            _ => (bank_band_limited(spec, &mut rng)?, format!("band-{i}")),
        };
        let norm = f.l2_norm();
        if !(norm > 0.0) {
            return Err(Error::Guard(format!("bank entry {label} vanished")));
        }
        f.scale(1.0 / norm);
        let boundary = f.boundary_max();
        if boundary >= 1e-10 {
            return Err(Error::Guard(format!(
                "bank entry {label} leaks to the boundary: max {boundary:.3e} at |x| ~ {l}"
            )));
        }
        entries.push(f);
        labels.push(label);
    }
    Ok(TestBank {
        spec,
        seed,
        entries,
        labels,
    })
}

fn bank_gaussian(spec: GridSpec, rng: &mut ChaCha8Rng, modulated: bool) -> GridFunction {
    let l = spec.half_width;
    let dim = spec.dim;
    let mut center = [0.0; MAX_DIM];
    for c in center.iter_mut().take(dim) {
        *c = rng.gen_range(-l / 6.0..l / 6.0);
    }
    let sigma = rng.gen_range(l / 24.0..l / 12.0);
    let mut omega = [0.0; MAX_DIM];
    if modulated {
        let nu_max = (spec.nyquist() / 3.0).min(6.0).max(1.5);
        let mag = rng.gen_range(1.0..nu_max);
        let mut dir = [0.0; MAX_DIM];
        let mut norm = 0.0;
        for d in dir.iter_mut().take(dim) {
            *d = rng.gen_range(-1.0..1.0f64);
            norm += *d * *d;
        }
        let norm = norm.sqrt().max(1e-6);
        for a in 0..dim {
            omega[a] = dir[a] / norm * mag;
        }
    }
    GridFunction::from_space_fn(spec, |x| {
        let mut q = 0.0;
        let mut phase = 0.0;
        for a in 0..dim {
            let dxa = x[a] - center[a];
            q += dxa * dxa;
            phase += x[a] * omega[a];
        }
        Complex64::from_polar((-q / (2.0 * sigma * sigma)).exp(), phase)
    })
}

fn bank_ring(spec: GridSpec, rng: &mut ChaCha8Rng) -> GridFunction {
    let l = spec.half_width;
    let r0 = rng.gen_range(l / 8.0..l / 5.0);
    let r1 = r0 * rng.gen_range(1.3..1.8);
    let w = r0 / 4.0;
    GridFunction::from_space_fn(spec, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let v = smooth_rise(r, r0 - w, r0) * smooth_fall(r, r1, r1 + w);
        Complex64::new(v, 0.0)
    })
}

fn bank_band_limited(spec: GridSpec, rng: &mut ChaCha8Rng) -> Result<GridFunction> {
    let l = spec.half_width;
    let dim = spec.dim;
    // window: truncated Gaussian ring around rho_c, identically zero outside
    // the shell [rho_c/2, 3 rho_c/2] (exact band limitation); the ring width
    // is wide enough that the spatial kernel decays below 1e-12 by the box
    // boundary, and the truncation happens at least 4.5 ring-widths out
    let (lo, hi) = band_shell_range(spec).ok_or_else(|| {
        Error::InvalidGrid(format!(
            "grid cannot hold a band-limited shell (nyquist {:.3}, half_width {l})",
            spec.nyquist()
        ))
    })?;
    let rho_c = rng.gen_range(lo..hi.max(lo * (1.0 + 1e-9)));
    // three modulated Gaussian lobes concentrated near the origin
    let mut lobes = Vec::new();
    for _ in 0..3 {
        let mut center = [0.0; MAX_DIM];
        for c in center.iter_mut().take(dim) {
            *c = rng.gen_range(-l / 8.0..l / 8.0);
        }
        let sigma = rng.gen_range(l / 20.0..l / 10.0);
        let mut dir = [0.0; MAX_DIM];
        let mut norm = 0.0;
        for d in dir.iter_mut().take(dim) {
            *d = rng.gen_range(-1.0..1.0f64);
            norm += *d * *d;
        }
        let norm = norm.sqrt().max(1e-6);
        for a in 0..dim {
            dir[a] = dir[a] / norm * rho_c;
        }
        let amp = rng.gen_range(0.5..1.0);
        lobes.push((center, sigma, dir, amp));
    }
    let mix = GridFunction::from_space_fn(spec, |x| {
        let mut acc = Complex64::default();
        for (center, sigma, omega, amp) in &lobes {
            let mut q = 0.0;
            let mut phase = 0.0;
            for a in 0..dim {
                let dxa = x[a] - center[a];
                q += dxa * dxa;
                phase += x[a] * omega[a];
            }
            acc += Complex64::from_polar(amp * (-q / (2.0 * sigma * sigma)).exp(), phase);
        }
        acc
    });
    let mut spectrum = mix.dft_forward()?;
    let w = (rho_c / 10.0).max(22.0 / l);
    let lo_edge = rho_c / 2.0;
    let hi_edge = 1.5 * rho_c;
    for flat in 0..spectrum.values.len() {
        let xi = spec.frequency(flat);
        let rho = xi[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
        let win = if rho <= lo_edge || rho >= hi_edge {
            0.0
        } else {
            (-((rho - rho_c) / w).powi(2)).exp()
        };
        spectrum.values[flat] *= win;
    }
    spectrum.dft_inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gauss2(spec: GridSpec) -> GridFunction {
        GridFunction::from_space_fn(spec, |x| {
            Complex64::new((-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp(), 0.0)
        })
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(2, 256, 16.0).is_ok());
        assert!(GridSpec::new(0, 256, 16.0).is_err());
        assert!(GridSpec::new(4, 16, 1.0).is_err());
        assert!(GridSpec::new(2, 100, 16.0).is_err());
        assert!(GridSpec::new(2, 4, 16.0).is_err());
        assert!(GridSpec::new(3, 128, 16.0).is_err());
        assert!(GridSpec::new(2, 256, -1.0).is_err());
    }

    #[test]
    fn spacing_and_nyquist() {
        let spec = GridSpec::new(2, 256, 16.0).unwrap();
        assert_relative_eq!(spec.spacing(), 0.125);
        assert_relative_eq!(spec.freq_spacing(), PI / 16.0);
        assert_relative_eq!(spec.nyquist(), 8.0 * PI);
    }

    #[test]
    fn coordinate_maps() {
        let spec = GridSpec::new(2, 8, 4.0).unwrap();
        // index (0,0) is the corner -L
        assert_eq!(spec.point(0), [-4.0, -4.0, 0.0]);
        // index n/2 per axis is the origin
        let mid = 4 * 8 + 4;
        assert_eq!(spec.point(mid), [0.0, 0.0, 0.0]);
        // frequency bin 5 is signed index -3
        let f = spec.frequency(5);
        assert_relative_eq!(f[1], -3.0 * spec.freq_spacing());
        // origin regularization
        assert_relative_eq!(spec.cell_radius(mid), 0.5 * spec.spacing());
    }

    /// Forward-transform oracle: in d=2 the Gaussian e^{-|x|²/2} maps to
    /// 2π e^{-|ξ|²/2}. Checked in sup norm, and independently against direct
    /// Simpson quadrature of the defining integral at a few frequencies.
    #[test]
    fn gaussian_forward_oracle() {
        let spec = GridSpec::new(2, 256, 16.0).unwrap();
        let f = gauss2(spec);
        let fhat = f.dft_forward().unwrap();
        let mut worst = 0.0f64;
        for flat in 0..fhat.values.len() {
            let xi = spec.frequency(flat);
            let expect = 2.0 * PI * (-(xi[0] * xi[0] + xi[1] * xi[1]) / 2.0).exp();
            worst = worst.max((fhat.values[flat] - Complex64::new(expect, 0.0)).norm());
        }
        assert!(worst < 1e-6, "sup deviation from 2π e^(-|ξ|²/2): {worst:.3e}");

        // independent oracle: Simpson quadrature of ∫ e^{-x²/2} cos(xξ) dx
        // per axis (separable), on its own node set
        let simpson_1d = |xi: f64| -> f64 {
            let m = 4001usize;
            let a = -16.0;
            let h = 32.0 / (m - 1) as f64;
            let mut acc = 0.0;
            for i in 0..m {
                let x = a + i as f64 * h;
                let w = if i == 0 || i == m - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * (-x * x / 2.0).exp() * (x * xi).cos();
            }
            acc * h / 3.0
        };
        for &(k0, k1) in &[(3usize, 5usize), (250, 2), (128, 128)] {
            let flat = k0 * 256 + k1;
            let xi = spec.frequency(flat);
            let expect = simpson_1d(xi[0]) * simpson_1d(xi[1]);
            let got = fhat.values[flat].re;
            assert!(
                (got - expect).abs() < 1e-8,
                "quadrature oracle at ξ=({:.3},{:.3}): {got} vs {expect}",
                xi[0],
                xi[1]
            );
        }
    }

    #[test]
    fn roundtrip_and_parseval() {
        let spec = GridSpec::new(2, 64, 8.0).unwrap();
        let f = GridFunction::from_space_fn(spec, |x| {
            Complex64::new(
                (-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 3.0).exp() * (1.3 * x[0]).cos(),
                0.3 * (-(x[0] * x[0] + x[1] * x[1])).exp(),
            )
        });
        let fhat = f.dft_forward().unwrap();
        let back = fhat.dft_inverse().unwrap();
        let mut worst = 0.0f64;
        for (a, b) in back.values.iter().zip(f.values.iter()) {
            worst = worst.max((a - b).norm());
        }
        assert!(worst < 1e-10, "roundtrip sup error {worst:.3e}");
        let rel = (f.l2_norm() - fhat.l2_norm()).abs() / f.l2_norm();
        assert!(rel < 1e-9, "Parseval relative error {rel:.3e}");
    }

    /// Translating a band-limited function by a whole cell multiplies its
    /// transform by the expected phase.
    #[test]
    fn translation_phase() {
        let spec = GridSpec::new(1, 64, 8.0).unwrap();
        let f = GridFunction::from_space_fn(spec, |x| {
            Complex64::new((-(x[0] * x[0]) / 2.0).exp(), 0.0)
        });
        let shift = spec.spacing() * 3.0;
        let g = GridFunction::from_space_fn(spec, |x| {
            let y = x[0] - shift;
            Complex64::new((-(y * y) / 2.0).exp(), 0.0)
        });
        let fh = f.dft_forward().unwrap();
        let gh = g.dft_forward().unwrap();
        for flat in 0..fh.values.len() {
            let xi = spec.frequency(flat)[0];
            let expect = fh.values[flat] * Complex64::from_polar(1.0, -xi * shift);
            // Gaussian tail is ~1e-14 at the box edge; tolerate its wrap
            assert!(
                (gh.values[flat] - expect).norm() < 1e-9,
                "phase law broken at bin {flat}"
            );
        }
    }

    #[test]
    fn annuli_partition_and_counts() {
        let spec = GridSpec::new(2, 256, 16.0).unwrap();
        let dec = annuli(spec, -3, 3).unwrap();
        // every point is in at most one mask; points in [2^l, 2^{l+1}) are
        // in exactly the mask for l
        for flat in 0..spec.len() {
            let r = spec.cell_radius(flat);
            let member: Vec<i32> = dec
                .levels()
                .filter(|&l| dec.mask(l).unwrap()[flat])
                .collect();
            if r >= 0.125 && r < 16.0 {
                assert_eq!(member.len(), 1, "radius {r} in {} masks", member.len());
                let l = member[0];
                assert!(r >= 2f64.powi(l) && r < 2f64.powi(l + 1));
            } else {
                assert!(member.is_empty());
            }
        }
        // point (1.0, 0) lies in the l=0 mask
        let i0 = (128 + (1.0 / spec.spacing()) as usize) * 256 + 128;
        let p = spec.point(i0);
        assert_eq!(p[0], 1.0);
        assert_eq!(p[1], 0.0);
        assert!(dec.mask(0).unwrap()[i0]);
        // areas scale like 4^l: count·Δx² vs 3π·4^l (looser at l = 0 where
        // cells are not small against the annulus width)
        for l in 0..=3 {
            let area = dec.cell_counts[(l + 3) as usize] as f64 * spec.cell_volume();
            let expect = 3.0 * PI * 4f64.powi(l);
            let tol = if l == 0 { 0.2 } else { 0.1 };
            assert!(
                (area / expect - 1.0).abs() < tol,
                "annulus {l} area {area} vs {expect}"
            );
        }
        // range guard
        assert!(annuli(spec, -3, 4).is_err());
    }

    #[test]
    fn bank_is_deterministic_unit_norm_and_boundary_clean() {
        let spec = GridSpec::new(2, 256, 32.0).unwrap();
        let bank1 = make_bank(spec, 7, 8).unwrap();
        let bank2 = make_bank(spec, 7, 8).unwrap();
        for (a, b) in bank1.entries.iter().zip(bank2.entries.iter()) {
            assert_eq!(a.values, b.values, "bank not bit-reproducible");
        }
        let bank3 = make_bank(spec, 8, 8).unwrap();
        assert_ne!(bank1.entries[0].values, bank3.entries[0].values);
        for (f, label) in bank1.entries.iter().zip(bank1.labels.iter()) {
            assert_relative_eq!(f.l2_norm(), 1.0, max_relative = 1e-12);
            assert!(f.boundary_max() < 1e-10, "{label} leaks at boundary");
        }
    }

    /// Band-limited entries have spectrum exactly inside the declared shell:
    /// outside it the transform vanishes identically.
    #[test]
    fn band_limited_spectrum_is_in_shell() {
        let spec = GridSpec::new(2, 256, 32.0).unwrap();
        let (lo, hi) = band_shell_range(spec).unwrap();
        let bank = make_bank(spec, 3, 4).unwrap();
        let f = &bank.entries[3];
        assert!(bank.labels[3].starts_with("band-"));
        let fhat = f.dft_forward().unwrap();
        // the recomputed spectrum outside [c/2, 3c/2] (any admissible
        // center c) sits at the roundoff floor of the transform pair
        let peak = fhat.sup_norm();
        assert!(peak > 0.0);
        for flat in 0..fhat.values.len() {
            let xi = spec.frequency(flat);
            let rho = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            let mag = fhat.values[flat].norm();
            if rho < 0.5 * lo || rho > 1.5 * hi {
                assert!(
                    mag <= 1e-12 * peak,
                    "spectral leak at rho={rho}: {mag:.3e} vs peak {peak:.3e}"
                );
            }
        }
    }

    #[test]
    fn save_load_roundtrip() {
        let spec = GridSpec::new(2, 8, 2.0).unwrap();
        let f = GridFunction::from_space_fn(spec, |x| Complex64::new(x[0] * 0.3, x[1] - 0.1));
        let dir = std::env::temp_dir().join(format!("qrlab-grid-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let prefix = dir.join("field").to_string_lossy().into_owned();
        f.save(&prefix).unwrap();
        let g = GridFunction::load(&prefix).unwrap();
        assert_eq!(f.spec, g.spec);
        assert_eq!(f.domain, g.domain);
        assert_eq!(f.values, g.values);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn dilated_view_is_exact() {
        let spec = GridSpec::new(2, 64, 16.0).unwrap();
        let f = GridFunction::from_space_fn(spec, |x| {
            Complex64::new((-(x[0] * x[0] + x[1] * x[1]) / 8.0).exp(), 0.0)
        });
        let g = f.dilated_view(1).unwrap(); // g(x') = f(2x') on half-width 8
        assert_eq!(g.spec.half_width, 8.0);
        for flat in 0..g.values.len() {
            let xp = g.spec.point(flat);
            let expect = (-(4.0 * (xp[0] * xp[0] + xp[1] * xp[1])) / 8.0).exp();
            assert!((g.values[flat].re - expect).abs() < 1e-15);
        }
    }
}
