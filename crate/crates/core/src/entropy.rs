//! Entropies `Φ` with `ξ·(DΦ(ξ)ξ⊥) = 0`, their `(Ψ, α)` pairs, lattice
//! entropy productions and the limit wall functionals on polygonal fields.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{div_d, IndexRect, VectorField};
use crate::spin_energy::region_rect;
use crate::sum::tree_sum;

pub type Vec2 = [f64; 2];
/// `m[a][b] = ∂Φ_a/∂ξ_b`
pub type Mat2 = [[f64; 2]; 2];

type MapFn = Arc<dyn Fn(Vec2) -> Vec2 + Send + Sync>;
type JacFn = Arc<dyn Fn(Vec2) -> Mat2 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyMeta {
    Analytic,
    Sampled,
}

/// An entropy carried as the pair of callables `(Φ, DΦ)`.
#[derive(Clone)]
pub struct Entropy {
    phi: MapFn,
    dphi: JacFn,
    pub meta: EntropyMeta,
    pub label: String,
}

impl fmt::Debug for Entropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Entropy")
            .field("label", &self.label)
            .field("meta", &self.meta)
            .finish()
    }
}

#[inline]
pub(crate) fn perp(v: Vec2) -> Vec2 {
    [-v[1], v[0]]
}

#[inline]
fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn matvec(m: Mat2, v: Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn check_unit(v: Vec2, what: &str, tol: f64) -> Result<()> {
    let n = v[0].hypot(v[1]);
    if (n - 1.0).abs() > tol || !n.is_finite() {
        Err(Error::Domain(format!("{what} must be a unit vector, |{what}| = {n}")))
    } else {
        Ok(())
    }
}

impl Entropy {
    pub fn new<P, D>(label: impl Into<String>, phi: P, dphi: D, meta: EntropyMeta) -> Entropy
    where
        P: Fn(Vec2) -> Vec2 + Send + Sync + 'static,
        D: Fn(Vec2) -> Mat2 + Send + Sync + 'static,
    {
        Entropy {
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
            meta,
            label: label.into(),
        }
    }

    pub fn zero() -> Entropy {
        Entropy::new("zero", |_| [0.0, 0.0], |_| [[0.0; 2]; 2], EntropyMeta::Analytic)
    }

    pub fn phi(&self, xi: Vec2) -> Vec2 {
        (self.phi)(xi)
    }

    pub fn dphi(&self, xi: Vec2) -> Mat2 {
        (self.dphi)(xi)
    }

    /// `s·Φ`.
    pub fn scaled(&self, s: f64) -> Entropy {
        let (p, d) = (self.phi.clone(), self.dphi.clone());
        Entropy::new(
            format!("{s}*{}", self.label),
            move |x| {
                let v = p(x);
                [s * v[0], s * v[1]]
            },
            move |x| {
                let m = d(x);
                [[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]]
            },
            self.meta,
        )
    }

    /// `ξ·(DΦ(ξ)ξ⊥)`, zero for an entropy.
    pub fn condition_residual(&self, xi: Vec2) -> f64 {
        dot(xi, matvec(self.dphi(xi), perp(xi)))
    }
}

/// `Σ_ν(ξ) = (2/3)((ξ·ν⊥)³ν + (ξ·ν)³ν⊥)`.
pub fn jin_kohn(nu: Vec2) -> Result<Entropy> {
    check_unit(nu, "nu", 1e-12)?;
    let np = perp(nu);
    Ok(Entropy::new(
        format!("jin-kohn({}, {})", nu[0], nu[1]),
        move |x| {
            let (a, b) = (dot(x, np).powi(3), dot(x, nu).powi(3));
            [2.0 / 3.0 * (a * nu[0] + b * np[0]), 2.0 / 3.0 * (a * nu[1] + b * np[1])]
        },
        move |x| {
            let (a, b) = (dot(x, np).powi(2), dot(x, nu).powi(2));
            let mut m = [[0.0; 2]; 2];
            for (r, row) in m.iter_mut().enumerate() {
                for (c, v) in row.iter_mut().enumerate() {
                    *v = 2.0 * (a * nu[r] * np[c] + b * np[r] * nu[c]);
                }
            }
            m
        },
        EntropyMeta::Analytic,
    ))
}

/// `α = ξ⊥·(DΦξ⊥)/|ξ|²` and `Ψ = −(DΦ − αI)ξ/(2|ξ|²)`.
pub fn psi_alpha(e: &Entropy, xi: Vec2) -> Result<(Vec2, f64)> {
    let n2 = dot(xi, xi);
    if !(n2 > 0.0) {
        return Err(Error::Domain("psi_alpha is singular at xi = 0".into()));
    }
    let m = e.dphi(xi);
    let xp = perp(xi);
    let alpha = dot(xp, matvec(m, xp)) / n2;
    let mx = matvec(m, xi);
    let psi = [
        -(mx[0] - alpha * xi[0]) / (2.0 * n2),
        -(mx[1] - alpha * xi[1]) / (2.0 * n2),
    ];
    Ok((psi, alpha))
}

/// Max-norm of `DΦ + 2Ψ⊗ξ − αI`.
pub fn relation_residual(e: &Entropy, xi: Vec2) -> Result<f64> {
    let (psi, alpha) = psi_alpha(e, xi)?;
    let m = e.dphi(xi);
    let mut worst: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c { alpha } else { 0.0 };
            worst = worst.max((m[r][c] + 2.0 * psi[r] * xi[c] - id).abs());
        }
    }
    Ok(worst)
}

/// Axis-aligned sampling box for Lipschitz estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleBox {
    pub min: Vec2,
    pub max: Vec2,
}

/// Sampled estimate of the Ent norm `Lip(Ψ)` over `sample_box`.
///
/// Ψ is evaluated on a `resolution²` grid and difference quotients are taken
/// over all offsets of up to two steps in each direction, so the result is a
/// lower bound of the Lipschitz constant on the box.
pub fn ent_norm_estimate(e: &Entropy, sample_box: SampleBox, resolution: usize) -> Result<f64> {
    let SampleBox { min, max } = sample_box;
    if !(max[0] > min[0] && max[1] > min[1]) || resolution < 2 {
        return Err(Error::Domain("empty sampling box".into()));
    }
    let contains_zero = min[0] <= 0.0 && max[0] >= 0.0 && min[1] <= 0.0 && max[1] >= 0.0;
    if contains_zero {
        return Err(Error::Domain("sampling box must exclude a neighbourhood of 0".into()));
    }
    let n = resolution;
    let h = [(max[0] - min[0]) / (n - 1) as f64, (max[1] - min[1]) / (n - 1) as f64];
    let point = |i: usize, j: usize| [min[0] + h[0] * i as f64, min[1] + h[1] * j as f64];
    let mut psi = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            psi.push(psi_alpha(e, point(i, j))?.0);
        }
    }
    let offsets: Vec<(isize, isize)> = (-2..=2isize)
        .flat_map(|dj| (0..=2isize).map(move |di| (di, dj)))
        .filter(|&(di, dj)| di > 0 || (di == 0 && dj > 0))
        .collect();
    let mut best: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let a = psi[j * n + i];
            for &(di, dj) in &offsets {
                let (ii, jj) = (i as isize + di, j as isize + dj);
                if ii >= n as isize || jj < 0 || jj >= n as isize {
                    continue;
                }
                let b = psi[jj as usize * n + ii as usize];
                let dx = [h[0] * di as f64, h[1] * dj as f64];
                let q = (a[0] - b[0]).hypot(a[1] - b[1]) / dx[0].hypot(dx[1]);
                best = best.max(q);
            }
        }
    }
    Ok(best)
}

/// `div_d(Φ∘χ⊥)`.
fn production_density(chi: &VectorField, e: &Entropy) -> Result<crate::lattice::ScalarField> {
    let flux = chi.map(|c| e.phi(perp(c)));
    div_d(&flux)
}

/// Lattice pairing `l² Σ ζ(x_ij) div_d(Φ∘χ⊥)_ij` with `ζ` sampled at cell corners.
pub fn entropy_production<Z>(chi: &VectorField, e: &Entropy, zeta: Z) -> Result<f64>
where
    Z: Fn(Vec2) -> f64 + Sync,
{
    let div = production_density(chi, e)?;
    let g = *chi.grid();
    let valid = div.rect();
    for (i, j) in g.full_rect().cells() {
        if !valid.contains(i, j) && zeta(g.corner(i, j)) != 0.0 {
            return Err(Error::Domain(format!(
                "test weight does not vanish at cell ({i}, {j}) outside the valid set"
            )));
        }
    }
    let terms: Vec<f64> = div.iter().map(|((i, j), d)| zeta(g.corner(i, j)) * d).collect();
    let l = g.spacing();
    Ok(l * l * tree_sum(&terms))
}

/// `l² Σ |div_d(Φ∘χ⊥)|` over the region.
pub fn total_variation_production(chi: &VectorField, e: &Entropy, region: Option<IndexRect>) -> Result<f64> {
    let div = production_density(chi, e)?;
    let rect = region_rect(div.rect(), region)?;
    let terms: Vec<f64> = rect.cells().map(|(i, j)| div.get(i as isize, j as isize).unwrap().abs()).collect();
    let l = chi.grid().spacing();
    Ok(l * l * tree_sum(&terms))
}

/// Convex polygon with a constant unit chirality.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// Vertices in counter-clockwise order.
    pub vertices: Vec<Vec2>,
    pub value: Vec2,
}

impl Region {
    pub fn contains(&self, x: Vec2) -> bool {
        let n = self.vertices.len();
        (0..n).all(|k| {
            let a = self.vertices[k];
            let b = self.vertices[(k + 1) % n];
            (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) >= -1e-12
        })
    }
}

/// Straight interface with traces `χ⁺` (on the `ν` side) and `χ⁻`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interface {
    pub start: Vec2,
    pub end: Vec2,
    pub chi_plus: Vec2,
    pub chi_minus: Vec2,
    pub nu: Vec2,
}

impl Interface {
    pub fn length(&self) -> f64 {
        (self.end[0] - self.start[0]).hypot(self.end[1] - self.start[1])
    }

    pub fn jump(&self) -> Vec2 {
        [self.chi_plus[0] - self.chi_minus[0], self.chi_plus[1] - self.chi_minus[1]]
    }
}

/// Piecewise-constant curl-free unit field on a polygonal partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalBvField {
    regions: Vec<Region>,
    interfaces: Vec<Interface>,
}

impl PolygonalBvField {
    pub fn new(regions: Vec<Region>, interfaces: Vec<Interface>) -> Result<PolygonalBvField> {
        let invalid = |m: String| Error::InvalidField(m);
        for r in &regions {
            if r.vertices.len() < 3 {
                return Err(invalid("region polygon needs at least three vertices".into()));
            }
            check_unit(r.value, "region value", 1e-10).map_err(|e| invalid(e.to_string()))?;
        }
        for s in &interfaces {
            for (v, name) in [(s.chi_plus, "chi_plus"), (s.chi_minus, "chi_minus"), (s.nu, "nu")] {
                check_unit(v, name, 1e-10).map_err(|e| invalid(e.to_string()))?;
            }
            let j = s.jump();
            if (j[0] * s.nu[1] - j[1] * s.nu[0]).abs() > 1e-10 {
                return Err(invalid("jump is not parallel to the interface normal".into()));
            }
            let t = [s.end[0] - s.start[0], s.end[1] - s.start[1]];
            let len = s.length();
            if len == 0.0 || dot(t, s.nu).abs() > 1e-10 * len {
                return Err(invalid("interface normal is not normal to the segment".into()));
            }
            let mid = [(s.start[0] + s.end[0]) / 2.0, (s.start[1] + s.end[1]) / 2.0];
            let h = 1e-7 * len.max(1.0);
            for (side, expect) in [(1.0, s.chi_plus), (-1.0, s.chi_minus)] {
                let x = [mid[0] + side * h * s.nu[0], mid[1] + side * h * s.nu[1]];
                if let Some(r) = regions.iter().find(|r| r.contains(x)) {
                    if (r.value[0] - expect[0]).abs() > 1e-10 || (r.value[1] - expect[1]).abs() > 1e-10 {
                        return Err(invalid("interface traces disagree with adjacent regions".into()));
                    }
                }
            }
        }
        Ok(PolygonalBvField { regions, interfaces })
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn interfaces(&self) -> &[Interface] {
        &self.interfaces
    }
}

/// `(1/6)∫_J |[χ]|³ dH¹`.
pub fn limit_h_bv(field: &PolygonalBvField) -> f64 {
    field
        .interfaces
        .iter()
        .map(|s| {
            let j = s.jump();
            j[0].hypot(j[1]).powi(3) / 6.0 * s.length()
        })
        .sum()
}

/// Jump of the normal flux `|[Σ_μ(χ⊥)]·ν|` across one interface.
pub fn jin_kohn_jump_density(s: &Interface, mu: Vec2) -> Result<f64> {
    let e = jin_kohn(mu)?;
    let a = e.phi(perp(s.chi_plus));
    let b = e.phi(perp(s.chi_minus));
    Ok(dot([a[0] - b[0], a[1] - b[1]], s.nu).abs())
}

/// Segmentwise Jin-Kohn production with the entropy direction aligned to
/// the jump, which attains the supremum over directions.
pub fn limit_h0(field: &PolygonalBvField) -> Result<f64> {
    let mut total = 0.0;
    for s in &field.interfaces {
        let j = s.jump();
        let n = j[0].hypot(j[1]);
        if n == 0.0 {
            continue;
        }
        total += jin_kohn_jump_density(s, [j[0] / n, j[1] / n])? * s.length();
    }
    Ok(total)
}

/// `σ(a, b, ν) = |a − b|³/6`.
pub fn sigma_surface_density(a: Vec2, b: Vec2, nu: Vec2) -> Result<f64> {
    check_unit(a, "a", 1e-10)?;
    check_unit(b, "b", 1e-10)?;
    check_unit(nu, "nu", 1e-10)?;
    let d = [a[0] - b[0], a[1] - b[1]];
    let n = d[0].hypot(d[1]);
    if n == 0.0 {
        return Err(Error::Domain("a and b must differ".into()));
    }
    if (d[0] * nu[1] - d[1] * nu[0]).abs() > 1e-10 {
        return Err(Error::Domain("a - b is not parallel to nu".into()));
    }
    Ok(n.powi(3) / 6.0)
}

/// Half-width of the truncated line for the profile quadrature.
pub const PROFILE_HALF_WIDTH: f64 = 12.0;

/// `(|d|³/16)∫(1 − γ²)² + γ′² ds` for `γ = tanh`, by the trapezoidal rule
/// with `n_quad` intervals on `[−12, 12]`.
pub fn modica_mortola_profile_energy(d: f64, n_quad: usize) -> Result<f64> {
    if !(d.is_finite() && d != 0.0) {
        return Err(Error::Parameter("jump size must be finite and nonzero".into()));
    }
    if n_quad < 64 {
        return Err(Error::Parameter(format!("n_quad must be at least 64, got {n_quad}")));
    }
    let (a, b) = (-PROFILE_HALF_WIDTH, PROFILE_HALF_WIDTH);
    let h = (b - a) / n_quad as f64;
    let f = |s: f64| {
        let g = s.tanh();
        let dg = 1.0 - g * g;
        (1.0 - g * g).powi(2) + dg * dg
    };
    let terms: Vec<f64> = (0..=n_quad)
        .map(|k| {
            let w = if k == 0 || k == n_quad { 0.5 } else { 1.0 };
            w * f(a + h * k as f64)
        })
        .collect();
    Ok(d.abs().powi(3) / 16.0 * h * tree_sum(&terms))
}
