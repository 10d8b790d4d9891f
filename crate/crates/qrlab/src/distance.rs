//! Quasiradial distance functions on frequency space.
//!
//! A distance here is `ρ(ξ) = b(ξ)^β` where `b` is a smooth, positively
//! 1-homogeneous norm-like core and `β > 0` is the homogeneity degree, so
//! that `ρ(t^{1/β} ξ) = t·ρ(ξ)`. The unit surface `Σ = {ρ = 1} = {b = 1}`
//! does not depend on `β`.
//!
//! Provided cores: the Euclidean norm, a scaled Euclidean norm, an
//! axis-aligned ellipse `b(ξ) = (Σ (ξ_i/a_i)²)^{1/2}`, and a smooth
//! `ℓ^p`-ball core `b(ξ) = (Σ ξ_i^p)^{1/p}` for even `p ≥ 4`.

use crate::error::{Error, Result};
use crate::grid::MAX_DIM;
use crate::numeric::{gauss_legendre, logspace};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The 1-homogeneous core of a distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RhoKind {
    /// `b(ξ) = |ξ|`
    Euclidean,
    /// `b(ξ) = c·|ξ|`
    Scaled { c: f64 },
    /// `b(ξ) = (Σ (ξ_i/a_i)²)^{1/2}`; the unit surface is the ellipse with
    /// semi-axes `a_i`
    Ellipse { semi_axes: Vec<f64> },
    /// `b(ξ) = (Σ ξ_i^p)^{1/p}` for even integer `p ≥ 4` (smooth away
    /// from the origin, genuinely non-Euclidean level sets)
    LpSmooth { p: f64 },
}

fn default_beta() -> f64 {
    1.0
}

/// A distance `ρ = b^β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoDistance {
    #[serde(flatten)]
    pub kind: RhoKind,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

impl RhoDistance {
    pub fn new(kind: RhoKind, beta: f64) -> Result<Self> {
        let rho = RhoDistance { kind, beta };
        rho.validate()?;
        Ok(rho)
    }

    pub fn euclidean() -> Self {
        RhoDistance {
            kind: RhoKind::Euclidean,
            beta: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        match &self.kind {
            RhoKind::Euclidean => {}
            RhoKind::Scaled { c } => {
                if !(*c > 0.0) || !c.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "scale must be positive, got {c}"
                    )));
                }
            }
            RhoKind::Ellipse { semi_axes } => {
                if semi_axes.is_empty() || semi_axes.len() > MAX_DIM {
                    return Err(Error::InvalidParameter(format!(
                        "ellipse needs 1..=3 semi-axes, got {}",
                        semi_axes.len()
                    )));
                }
                if semi_axes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "ellipse semi-axes must be positive".into(),
                    ));
                }
            }
            RhoKind::LpSmooth { p } => {
                let ok = p.is_finite() && *p >= 4.0 && p.fract() == 0.0 && (*p as i64) % 2 == 0;
                if !ok {
                    return Err(Error::InvalidParameter(format!(
                        "lp core needs an even integer exponent >= 4, got {p}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if let RhoKind::Ellipse { semi_axes } = &self.kind {
            if semi_axes.len() != dim {
                return Err(Error::DomainMismatch(format!(
                    "ellipse with {} semi-axes used in dimension {dim}",
                    semi_axes.len()
                )));
            }
        }
        Ok(())
    }

    /// The 1-homogeneous core `b(ξ)`.
    pub fn base(&self, xi: &[f64]) -> f64 {
        match &self.kind {
            RhoKind::Euclidean => xi.iter().map(|v| v * v).sum::<f64>().sqrt(),
            RhoKind::Scaled { c } => c * xi.iter().map(|v| v * v).sum::<f64>().sqrt(),
            RhoKind::Ellipse { semi_axes } => xi
                .iter()
                .zip(semi_axes.iter())
                .map(|(v, a)| (v / a) * (v / a))
                .sum::<f64>()
                .sqrt(),
            RhoKind::LpSmooth { p } => {
                let k = *p as i32;
                let s: f64 = xi.iter().map(|v| v.powi(k)).sum();
                s.powf(1.0 / p)
            }
        }
    }

    /// Gradient of the core (undefined at the origin; returns zeros there).
    pub fn base_grad(&self, xi: &[f64]) -> [f64; MAX_DIM] {
        let mut out = [0.0; MAX_DIM];
        let b = self.base(xi);
        if b == 0.0 {
            return out;
        }
        match &self.kind {
            RhoKind::Euclidean => {
                for (o, v) in out.iter_mut().zip(xi.iter()) {
                    *o = v / (b); // b = |ξ| here
                }
            }
            RhoKind::Scaled { c } => {
                let r = b / c;
                for (o, v) in out.iter_mut().zip(xi.iter()) {
                    *o = c * v / r;
                }
            }
            RhoKind::Ellipse { semi_axes } => {
                for ((o, v), a) in out.iter_mut().zip(xi.iter()).zip(semi_axes.iter()) {
                    *o = v / (a * a) / b;
                }
            }
            RhoKind::LpSmooth { p } => {
                let k = *p as i32;
                for (o, v) in out.iter_mut().zip(xi.iter()) {
                    *o = (v / b).powi(k - 1);
                }
            }
        }
        out
    }

    /// The distance `ρ(ξ) = b(ξ)^β`.
    pub fn eval(&self, xi: &[f64]) -> f64 {
        let b = self.base(xi);
        if self.beta == 1.0 {
            b
        } else {
            b.powf(self.beta)
        }
    }

    /// Gradient `∇ρ = β b^{β-1} ∇b` (zeros at the origin).
    pub fn grad(&self, xi: &[f64]) -> [f64; MAX_DIM] {
        let mut g = self.base_grad(xi);
        if self.beta != 1.0 {
            let b = self.base(xi);
            if b == 0.0 {
                return [0.0; MAX_DIM];
            }
            let factor = self.beta * b.powf(self.beta - 1.0);
            for v in &mut g {
                *v *= factor;
            }
        }
        g
    }

    /// If the core is a linear image of the Euclidean norm,
    /// `b(ξ) = |diag(1/a)·ξ|`, return the axis scales `a`.
    /// (`None` for genuinely non-ellipsoidal cores.)
    pub fn diagonal_scales(&self, dim: usize) -> Option<Vec<f64>> {
        match &self.kind {
            RhoKind::Euclidean => Some(vec![1.0; dim]),
            RhoKind::Scaled { c } => Some(vec![1.0 / c; dim]),
            RhoKind::Ellipse { semi_axes } if semi_axes.len() == dim => Some(semi_axes.clone()),
            _ => None,
        }
    }
}

/// A quadrature node on the unit surface `Σ = {ρ = 1}` with its surface
/// measure weight.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceNode {
    pub point: [f64; MAX_DIM],
    pub weight: f64,
}

/// Quadrature for the surface measure of `Σ = {ρ = 1}`.
///
/// Each node is the radial root along a ray: for a 1-homogeneous core the
/// root is `r(u) = 1/b(u)` in closed form, which we verify to 1e-12.
/// Weights carry the geometric surface element:
///
/// * `d = 1`: the two root points, weight 1 each (counting measure);
/// * `d = 2`: arc length of `θ ↦ r(θ)u(θ)` on a uniform angular grid
///   (periodic trapezoid rule — superalgebraically accurate for smooth
///   closed curves);
/// * `d = 3`: star-shaped surface element `f·√(f² + |∇_S f|²)` with
///   Gauss–Legendre × uniform product quadrature on the parameter sphere.
///
/// `n` controls resolution: the angular point count in `d = 2`, roughly the
/// total node count in `d = 3`; ignored in `d = 1`.
pub fn sphere_quadrature(rho: &RhoDistance, dim: usize, n: usize) -> Result<Vec<SurfaceNode>> {
    rho.validate()?;
    rho.check_dim(dim)?;
    match dim {
        1 => {
            let mut out = Vec::with_capacity(2);
            for sign in [1.0, -1.0] {
                let u = [sign, 0.0, 0.0];
                let r = radial_root(rho, &u[..1])?;
                out.push(SurfaceNode {
                    point: [sign * r, 0.0, 0.0],
                    weight: 1.0,
                });
            }
            Ok(out)
        }
        2 => {
            let n = n.max(16);
            let dth = 2.0 * PI / n as f64;
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                let th = i as f64 * dth;
                let u = [th.cos(), th.sin(), 0.0];
                let r = radial_root(rho, &u[..2])?;
                // r(θ) = 1/b(u(θ)); r' = -b'/b², b' = ∇b·u'
                let g = rho.base_grad(&u[..2]);
                let up = [-th.sin(), th.cos()];
                let bprime = g[0] * up[0] + g[1] * up[1];
                let rprime = -bprime * r * r;
                let speed = (r * r + rprime * rprime).sqrt();
                out.push(SurfaceNode {
                    point: [r * u[0], r * u[1], 0.0],
                    weight: speed * dth,
                });
            }
            Ok(out)
        }
        3 => {
            // product rule: Gauss-Legendre in z = cos(polar), trapezoid in
            // azimuth; node budget n ≈ m_z · m_phi with m_phi = 2 m_z
            let m_z = (((n.max(128)) as f64 / 2.0).sqrt().ceil() as usize).max(8);
            let m_phi = 2 * m_z;
            let (zs, wzs) = gauss_legendre(m_z);
            let dphi = 2.0 * PI / m_phi as f64;
            let mut out = Vec::with_capacity(m_z * m_phi);
            for (z, wz) in zs.iter().zip(wzs.iter()) {
                let s = (1.0 - z * z).sqrt();
                for j in 0..m_phi {
                    let phi = j as f64 * dphi;
                    let u = [s * phi.cos(), s * phi.sin(), *z];
                    let r = radial_root(rho, &u)?;
                    // f = 1/b on the round sphere; spherical gradient =
                    // tangential part of ∇(1/b) = -∇b/b²
                    let g = rho.base_grad(&u);
                    let b = rho.base(&u);
                    let mut amb = [0.0f64; 3];
                    for a in 0..3 {
                        amb[a] = -g[a] / (b * b);
                    }
                    let radial: f64 = amb.iter().zip(u.iter()).map(|(x, y)| x * y).sum();
                    let mut tan2 = 0.0;
                    for a in 0..3 {
                        let t = amb[a] - radial * u[a];
                        tan2 += t * t;
                    }
                    let area = r * (r * r + tan2).sqrt();
                    out.push(SurfaceNode {
                        point: [r * u[0], r * u[1], r * u[2]],
                        weight: area * wz * dphi,
                    });
                }
            }
            Ok(out)
        }
        other => Err(Error::InvalidParameter(format!(
            "sphere quadrature supports dimensions 1..=3, got {other}"
        ))),
    }
}

/// Radial root `r` with `b(r·u) = 1` along the unit ray `u`, from the
/// closed form `r = 1/b(u)` (homogeneity), verified on the spot.
fn radial_root(rho: &RhoDistance, u: &[f64]) -> Result<f64> {
    let b = rho.base(u);
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::RootFind(format!(
            "core is degenerate along direction {u:?}"
        )));
    }
    let r = 1.0 / b;
    let scaled: Vec<f64> = u.iter().map(|v| v * r).collect();
    let check = rho.base(&scaled);
    if (check - 1.0).abs() > 1e-12 {
        return Err(Error::RootFind(format!(
            "radial root check failed: b = {check} at r = {r}"
        )));
    }
    Ok(r)
}

/// Smallest admissible gradient-envelope constant: the least integer
/// `c₀ ≥ 2` such that, over the shell `1/8 ≤ ρ ≤ 8`,
///
/// ```text
/// 0.9·2^{-c₀+2} ≤ |∇ρ| ≤ 1.1·2^{c₀-2}
/// ```
///
/// (the 10% margins keep the constant stable under sampling; the envelope
/// is sampled on 49 log-spaced levels × a surface quadrature per level).
pub fn compute_c0(rho: &RhoDistance, dim: usize) -> Result<u32> {
    rho.validate()?;
    rho.check_dim(dim)?;
    let nodes = sphere_quadrature(rho, dim, if dim == 3 { 2048 } else { 256 })?;
    let levels = logspace(0.125, 8.0, 49);
    let mut g_min = f64::INFINITY;
    let mut g_max = 0.0f64;
    for t in &levels {
        let scale = t.powf(1.0 / rho.beta);
        for node in &nodes {
            let xi: Vec<f64> = node.point[..dim].iter().map(|v| v * scale).collect();
            let g = rho.grad(&xi);
            let mag = g[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
            g_min = g_min.min(mag);
            g_max = g_max.max(mag);
        }
    }
    let slack = 1.0 + 1e-12;
    for c0 in 2..=40u32 {
        let upper = 1.1 * 2f64.powi(c0 as i32 - 2) * slack;
        let lower = 0.9 * 2f64.powi(2 - c0 as i32) / slack;
        if g_max <= upper && g_min >= lower {
            return Ok(c0);
        }
    }
    Err(Error::Guard(format!(
        "gradient envelope [{g_min:.3e}, {g_max:.3e}] needs c0 > 40"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn surface_measure(rho: &RhoDistance, dim: usize, n: usize) -> f64 {
        sphere_quadrature(rho, dim, n)
            .unwrap()
            .iter()
            .map(|p| p.weight)
            .sum()
    }

    #[test]
    fn euler_relation_and_homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cases: Vec<(RhoDistance, usize)> = vec![
            (RhoDistance::euclidean(), 2),
            (RhoDistance::new(RhoKind::Scaled { c: 2.0 }, 1.0).unwrap(), 2),
            (
                RhoDistance::new(
                    RhoKind::Ellipse {
                        semi_axes: vec![1.0, 4.0],
                    },
                    1.0,
                )
                .unwrap(),
                2,
            ),
            (RhoDistance::new(RhoKind::LpSmooth { p: 4.0 }, 1.0).unwrap(), 3),
            (RhoDistance::new(RhoKind::Euclidean, 2.0).unwrap(), 2),
            (RhoDistance::new(RhoKind::LpSmooth { p: 6.0 }, 0.5).unwrap(), 2),
        ];
        for (rho, dim) in &cases {
            for _ in 0..200 {
                let xi: Vec<f64> = (0..*dim).map(|_| rng.gen_range(-5.0..5.0f64)).collect();
                let r = rho.eval(&xi);
                if r < 1e-6 {
                    continue;
                }
                // Euler: ρ = ⟨ξ, ∇ρ⟩ / β
                let g = rho.grad(&xi);
                let dot: f64 = xi.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
                assert!(
                    (dot / rho.beta - r).abs() < 1e-9 * r.max(1.0),
                    "euler relation broke for {:?} at {xi:?}",
                    rho.kind
                );
                // homogeneity: ρ(t^{1/β} ξ) = t ρ(ξ)
                let t = rng.gen_range(0.1..10.0f64);
                let scale = t.powf(1.0 / rho.beta);
                let scaled: Vec<f64> = xi.iter().map(|v| v * scale).collect();
                let lhs = rho.eval(&scaled);
                assert!(
                    (lhs - t * r).abs() < 1e-9 * (t * r).max(1.0),
                    "homogeneity broke for {:?}",
                    rho.kind
                );
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = RhoDistance::new(RhoKind::LpSmooth { p: 4.0 }, 1.5).unwrap();
        for _ in 0..100 {
            let xi: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..3.0f64)).collect();
            let g = rho.grad(&xi);
            let h = 1e-6;
            for a in 0..3 {
                let mut plus = xi.clone();
                let mut minus = xi.clone();
                plus[a] += h;
                minus[a] -= h;
                let fd = (rho.eval(&plus) - rho.eval(&minus)) / (2.0 * h);
                assert!(
                    (fd - g[a]).abs() < 1e-6 * (1.0 + g[a].abs()),
                    "grad component {a}: fd {fd} vs {}",
                    g[a]
                );
            }
        }
    }

    #[test]
    fn circle_and_sphere_measures() {
        let rho = RhoDistance::euclidean();
        let circ = surface_measure(&rho, 2, 512);
        assert!(
            (circ - 2.0 * PI).abs() < 1e-6,
            "unit circle perimeter: {circ}"
        );
        let sphere = surface_measure(&rho, 3, 4096);
        assert!(
            (sphere - 4.0 * PI).abs() < 1e-3,
            "unit sphere area: {sphere}"
        );
        // two points in d = 1
        let line = surface_measure(&rho, 1, 0);
        assert!((line - 2.0).abs() < 1e-14);
    }

    /// Ellipse perimeters against 50-digit reference values.
    #[test]
    fn ellipse_perimeters() {
        let cases = [
            (vec![1.0, 4.0], 17.156843550313668446),
            (vec![1.0, 2.0], 9.6884482205476761984),
            (vec![0.7, 1.3], 6.4253707428389257365),
        ];
        for (axes, expect) in cases {
            let rho = RhoDistance::new(RhoKind::Ellipse { semi_axes: axes }, 1.0).unwrap();
            let got = surface_measure(&rho, 2, 4096);
            assert!(
                (got - expect).abs() < 1e-5,
                "perimeter {got:.12} vs {expect:.12}"
            );
        }
    }

    /// Nodes of the quadrature really lie on the unit surface, and beta
    /// does not move the surface.
    #[test]
    fn quadrature_nodes_on_surface() {
        let rho = RhoDistance::new(RhoKind::LpSmooth { p: 4.0 }, 2.0).unwrap();
        for node in sphere_quadrature(&rho, 2, 64).unwrap() {
            let v = rho.eval(&node.point[..2]);
            assert!((v - 1.0).abs() < 1e-10, "node off surface: rho = {v}");
        }
    }

    #[test]
    fn envelope_constants() {
        assert_eq!(compute_c0(&RhoDistance::euclidean(), 2).unwrap(), 2);
        let scaled = RhoDistance::new(RhoKind::Scaled { c: 2.0 }, 1.0).unwrap();
        assert_eq!(compute_c0(&scaled, 2).unwrap(), 3);
        let ellipse = RhoDistance::new(
            RhoKind::Ellipse {
                semi_axes: vec![1.0, 4.0],
            },
            1.0,
        )
        .unwrap();
        // gradient magnitude spans [1/4, 1] on the ellipse shell
        assert_eq!(compute_c0(&ellipse, 2).unwrap(), 4);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(RhoDistance::new(RhoKind::Scaled { c: -1.0 }, 1.0).is_err());
        assert!(RhoDistance::new(RhoKind::LpSmooth { p: 3.0 }, 1.0).is_err());
        assert!(RhoDistance::new(RhoKind::LpSmooth { p: 4.5 }, 1.0).is_err());
        assert!(RhoDistance::new(RhoKind::Euclidean, 0.0).is_err());
        assert!(RhoDistance::new(
            RhoKind::Ellipse {
                semi_axes: vec![1.0, -2.0]
            },
            1.0
        )
        .is_err());
        // dimension mismatch surfaces as an error in quadrature
        let e2 = RhoDistance::new(
            RhoKind::Ellipse {
                semi_axes: vec![1.0, 2.0],
            },
            1.0,
        )
        .unwrap();
        assert!(sphere_quadrature(&e2, 3, 64).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let rho = RhoDistance::new(
            RhoKind::Ellipse {
                semi_axes: vec![0.7, 1.3],
            },
            2.0,
        )
        .unwrap();
        let s = serde_json::to_string(&rho).unwrap();
        let back: RhoDistance = serde_json::from_str(&s).unwrap();
        assert_eq!(rho, back);
        // beta defaults to 1
        let parsed: RhoDistance = serde_json::from_str(r#"{"kind":"euclidean"}"#).unwrap();
        assert_eq!(parsed.beta, 1.0);
    }
}
