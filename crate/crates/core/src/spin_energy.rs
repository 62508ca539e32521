//! Spin fields, chirality order parameters and the lattice energies
//! `E_n`, `F_n`, `H_n`, `H_n*` and the discrete Aviles-Giga energies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, CellValue, Field, Grid, IndexRect, Reach, ScalarField, VectorField};
use crate::sum::tree_sum;

/// Largest tolerated deviation of a spin from unit length.
pub const UNIT_TOL: f64 = 1e-12;

/// Model parameters `(l, α, β)` with `δ = 4 − α/2` and `ε = l/√δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    l: f64,
    alpha: f64,
    beta: f64,
}

impl ModelParams {
    pub fn new(l: f64, alpha: f64, beta: f64) -> Result<ModelParams> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Parameter(format!("lattice spacing must be positive, got {l}")));
        }
        if !alpha.is_finite() {
            return Err(Error::Parameter("alpha must be finite".into()));
        }
        if !(0.0..=2.0).contains(&beta) {
            return Err(Error::Parameter(format!("beta must lie in [0, 2], got {beta}")));
        }
        Ok(ModelParams { l, alpha, beta })
    }

    /// Critical coupling `β = 2`, requiring `0 < δ < 4`.
    pub fn critical(l: f64, alpha: f64) -> Result<ModelParams> {
        let p = ModelParams::new(l, alpha, 2.0)?;
        p.require_critical()?;
        Ok(p)
    }

    /// `β = 2` with `α = 8 − 2δ`.
    pub fn from_delta(l: f64, delta: f64) -> Result<ModelParams> {
        ModelParams::critical(l, 8.0 - 2.0 * delta)
    }

    /// `β = 2` with `l = ε√δ`.
    pub fn from_eps_delta(eps: f64, delta: f64) -> Result<ModelParams> {
        if !(delta > 0.0) {
            return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
        }
        ModelParams::from_delta(eps * delta.sqrt(), delta)
    }

    pub fn l(&self) -> f64 {
        self.l
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn delta(&self) -> f64 {
        4.0 - self.alpha / 2.0
    }
    pub fn eps(&self) -> f64 {
        self.l / self.delta().sqrt()
    }

    pub(crate) fn require_positive_delta(&self) -> Result<f64> {
        let d = self.delta();
        if d > 0.0 {
            Ok(d)
        } else {
            Err(Error::Parameter(format!("delta must be positive, got {d}")))
        }
    }

    pub(crate) fn require_critical(&self) -> Result<()> {
        if self.beta != 2.0 {
            return Err(Error::Parameter(format!("requires beta = 2, got {}", self.beta)));
        }
        let d = self.delta();
        if !(d > 0.0 && d < 4.0) {
            return Err(Error::Parameter(format!("requires 0 < delta < 4, got {d}")));
        }
        Ok(())
    }
}

/// Unit-vector spin per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinField(VectorField);

impl SpinField {
    pub fn new(v: VectorField) -> Result<SpinField> {
        if let Some(((i, j), u)) = v.iter().find(|(_, u)| ((u[0].hypot(u[1])) - 1.0).abs() > UNIT_TOL) {
            return Err(Error::InvalidField(format!(
                "spin at ({i}, {j}) has length {}",
                u[0].hypot(u[1])
            )));
        }
        if v.rect() != v.grid().full_rect() {
            return Err(Error::InvalidField("spin fields must cover the grid".into()));
        }
        Ok(SpinField(v))
    }

    /// `u = (cos ψ, sin ψ)`.
    pub fn from_lift(psi: &ScalarField) -> Result<SpinField> {
        SpinField::new(psi.map(|a| [a.cos(), a.sin()]))
    }

    pub fn tabulate<F>(grid: Grid, f: F) -> Result<SpinField>
    where
        F: Fn(usize, usize) -> [f64; 2] + Sync + Send,
    {
        SpinField::new(VectorField::tabulate(grid, f)?)
    }

    /// Angle lift `ψ = atan2(u₂, u₁)` in `(−π, π]`.
    pub fn lift(&self) -> ScalarField {
        self.0.map(|u| u[1].atan2(u[0]))
    }

    pub fn grid(&self) -> &Grid {
        self.0.grid()
    }

    pub fn field(&self) -> &VectorField {
        &self.0
    }

    pub fn into_field(self) -> VectorField {
        self.0
    }
}

/// Energy split into its potential and derivative parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub total: f64,
    pub potential_part: f64,
    pub derivative_part: f64,
}

impl EnergyRecord {
    fn from_parts(pot: f64, der: f64) -> EnergyRecord {
        EnergyRecord {
            total: pot + der,
            potential_part: pot,
            derivative_part: der,
        }
    }

    pub fn scaled(self, s: f64) -> EnergyRecord {
        EnergyRecord {
            total: self.total * s,
            potential_part: self.potential_part * s,
            derivative_part: self.derivative_part * s,
        }
    }
}

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn norm2(a: [f64; 2]) -> f64 {
    dot(a, a)
}

/// Oriented angle from `a` to `b` in `[−π, π)`; antiparallel spins give `−π`.
pub fn oriented_angle(a: [f64; 2], b: [f64; 2]) -> f64 {
    let c = cross(a, b);
    let d = dot(a, b);
    let t = c.atan2(d);
    if t >= std::f64::consts::PI {
        -std::f64::consts::PI
    } else {
        t
    }
}

/// Well potential `W(ξ) = (1 − |ξ|²)²`.
pub fn w_potential(xi: [f64; 2]) -> f64 {
    let s = 1.0 - norm2(xi);
    s * s
}

/// Horizontal and vertical oriented angles between neighbouring spins.
pub fn angles(u: &SpinField) -> (ScalarField, ScalarField) {
    let f = u.field();
    let hor = f.stencil(Reach::new(0, 1, 0, 0), |at| oriented_angle(at(0, 0), at(1, 0)));
    let ver = f.stencil(Reach::new(0, 0, 0, 1), |at| oriented_angle(at(0, 0), at(0, 1)));
    (hor, ver)
}

/// Angles and the three chirality order parameters of a spin field.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralityFields {
    pub theta_hor: ScalarField,
    pub theta_ver: ScalarField,
    /// `(2/√δ) sin(θ/2)`
    pub chi: VectorField,
    /// `sin(θ)/√δ`
    pub chi_tilde: VectorField,
    /// `θ/√δ`
    pub chi_bar: VectorField,
    pub delta: f64,
}

pub fn chirality(u: &SpinField, p: &ModelParams) -> Result<ChiralityFields> {
    let delta = p.require_positive_delta()?;
    let (theta_hor, theta_ver) = angles(u);
    Ok(chirality_from_angles(theta_hor, theta_ver, delta))
}

pub(crate) fn chirality_from_angles(theta_hor: ScalarField, theta_ver: ScalarField, delta: f64) -> ChiralityFields {
    let sd = delta.sqrt();
    let theta = VectorField::from_components(&theta_hor, &theta_ver).expect("angle fields share a grid");
    let chi = theta.map(|t| [2.0 / sd * (t[0] / 2.0).sin(), 2.0 / sd * (t[1] / 2.0).sin()]);
    let chi_tilde = theta.map(|t| [t[0].sin() / sd, t[1].sin() / sd]);
    let chi_bar = theta.map(|t| [t[0] / sd, t[1] / sd]);
    ChiralityFields {
        theta_hor,
        theta_ver,
        chi,
        chi_tilde,
        chi_bar,
        delta,
    }
}

/// `W^d = (1/4)(2 − χ₁² − χ₁(i−1,j)² − χ₂² − χ₂(i,j−1)²)²`.
pub fn wd(chi: &ChiralityFields) -> Result<ScalarField> {
    let f = chi.chi.stencil(Reach::new(1, 0, 1, 0), |at| {
        let c = at(0, 0);
        let s = 2.0 - c[0] * c[0] - at(-1, 0)[0].powi(2) - c[1] * c[1] - at(0, -1)[1].powi(2);
        0.25 * s * s
    });
    nonempty(f, "Wd")
}

/// `A^d = ∂₁χ̃₁(i−1,j) + ∂₂χ̃₂(i,j−1)`.
pub fn ad(chi: &ChiralityFields) -> Result<ScalarField> {
    let inv = 1.0 / chi.chi_tilde.grid().spacing();
    let f = chi.chi_tilde.stencil(Reach::new(1, 0, 1, 0), |at| {
        let c = at(0, 0);
        (c[0] - at(-1, 0)[0]) * inv + (c[1] - at(0, -1)[1]) * inv
    });
    nonempty(f, "Ad")
}

fn nonempty<T: CellValue>(f: Field<T>, what: &str) -> Result<Field<T>> {
    if f.rect().is_empty() {
        Err(Error::Dimension(format!("{what}: valid index set is empty")))
    } else {
        Ok(f)
    }
}

/// Resolves the summation rectangle: `region` (default: everything) clipped
/// to the valid set.
pub(crate) fn region_rect(valid: IndexRect, region: Option<IndexRect>) -> Result<IndexRect> {
    let r = match region {
        Some(r) => valid.intersect(&r),
        None => valid,
    };
    if r.is_empty() {
        Err(Error::Dimension("region has an empty valid set".into()))
    } else {
        Ok(r)
    }
}

/// Values of a field on `rect` in row-major order.
fn gather<T: CellValue>(f: &Field<T>, rect: IndexRect) -> Vec<T> {
    rect.cells().map(|(i, j)| f.at(i, j, 0, 0)).collect()
}

fn sum_over(f: &ScalarField, rect: IndexRect) -> f64 {
    tree_sum(&gather(f, rect))
}

fn sum_all(f: &ScalarField) -> f64 {
    tree_sum(f.values())
}

/// `E_n`: nearest (−α), diagonal (+β) and third-neighbour (+1) couplings.
/// Sums over cells where every evaluation exists; an empty set gives 0.
pub fn energy_e(u: &SpinField, p: &ModelParams) -> f64 {
    let (a, b) = (p.alpha(), p.beta());
    let cells = u.field().stencil(Reach::new(1, 2, 0, 2), |at| {
        let c = at(0, 0);
        -a * (dot(c, at(1, 0)) + dot(c, at(0, 1)))
            + b * (dot(c, at(1, 1)) + dot(c, at(-1, 1)))
            + (dot(c, at(2, 0)) + dot(c, at(0, 2)))
    });
    p.l() * p.l() * sum_all(&cells)
}

/// `F_n`, the non-negative form of `E_n` with the bulk constant removed.
pub fn energy_f(u: &SpinField, p: &ModelParams) -> f64 {
    p.l() * p.l() * sum_all(&f_density(u, p))
}

/// Per-cell integrand of `F_n` without the `l²` factor.
pub(crate) fn f_density(u: &SpinField, p: &ModelParams) -> ScalarField {
    let beta = p.beta();
    let a = p.alpha() / (beta + 2.0);
    u.field().stencil(Reach::new(1, 1, 1, 1), |at| {
        let c = at(0, 0);
        let (r, le, up, dn) = (at(1, 0), at(-1, 0), at(0, 1), at(0, -1));
        let s = [
            r[0] + le[0] + up[0] + dn[0] - 2.0 * a * c[0],
            r[1] + le[1] + up[1] + dn[1] - 2.0 * a * c[1],
        ];
        let h = [r[0] + le[0] - a * c[0], r[1] + le[1] - a * c[1]];
        let v = [up[0] + dn[0] - a * c[0], up[1] + dn[1] - a * c[1]];
        let mut out = 0.0;
        if beta != 0.0 {
            out += beta / 4.0 * norm2(s);
        }
        if beta != 2.0 {
            out += (2.0 - beta) / 4.0 * (norm2(h) + norm2(v));
        }
        out
    })
}

/// Relative residual of `E_n + l²N(α²/(2(β+2)) + 2) = F_n` on a periodic grid.
pub fn bulk_identity_check(u: &SpinField, p: &ModelParams) -> Result<f64> {
    if u.grid().boundary() != Boundary::Periodic {
        return Err(Error::Unsupported("bulk identity needs a periodic grid".into()));
    }
    let e = energy_e(u, p);
    let f = energy_f(u, p);
    let n = u.grid().cell_count() as f64;
    let bulk = p.l() * p.l() * n * (p.alpha().powi(2) / (2.0 * (p.beta() + 2.0)) + 2.0);
    Ok(((e + bulk) - f).abs() / (1.0 + f.abs()))
}

/// `H_n = (1/2)∫(1/ε)W^d(χ) + ε|A^d(χ)|²`.
pub fn energy_hn(u: &SpinField, p: &ModelParams, region: Option<IndexRect>) -> Result<EnergyRecord> {
    p.require_critical()?;
    let chi = chirality(u, p)?;
    hn_from_chirality(&chi, p, region)
}

pub fn hn_from_chirality(chi: &ChiralityFields, p: &ModelParams, region: Option<IndexRect>) -> Result<EnergyRecord> {
    let w = wd(chi)?;
    let a = ad(chi)?;
    let rect = region_rect(w.rect().intersect(&a.rect()), region)?;
    let (eps, l2) = (p.eps(), p.l() * p.l());
    let pot = 0.5 * l2 / eps * sum_over(&w, rect);
    let a2 = a.map(|x| x * x);
    let der = 0.5 * l2 * eps * sum_over(&a2, rect);
    Ok(EnergyRecord::from_parts(pot, der))
}

/// `H_n* = (1/2)∫(1/ε)W(χ) + ε|D^dχ|²`.
pub fn energy_hn_star(u: &SpinField, p: &ModelParams, region: Option<IndexRect>) -> Result<EnergyRecord> {
    p.require_critical()?;
    let chi = chirality(u, p)?;
    let inv = 1.0 / p.l();
    let cells = chi.chi.stencil(Reach::new(0, 1, 0, 1), |at| {
        let c = at(0, 0);
        let (r, up) = (at(1, 0), at(0, 1));
        let d = [(r[0] - c[0]) * inv, (r[1] - c[1]) * inv, (up[0] - c[0]) * inv, (up[1] - c[1]) * inv];
        [w_potential(c), d.iter().map(|x| x * x).sum()]
    });
    integrate_pair(&cells, p, region)
}

/// `AG^d(φ) = (1/2)∫(1/ε)W(D^dφ) + ε|D^dD^dφ|²` with the full second-difference matrix.
pub fn energy_agd(phi: &ScalarField, p: &ModelParams, region: Option<IndexRect>) -> Result<EnergyRecord> {
    let inv = 1.0 / p.l();
    let inv2 = inv * inv;
    let cells = phi.stencil(Reach::new(0, 2, 0, 2), |at| {
        let c = at(0, 0);
        let g = [(at(1, 0) - c) * inv, (at(0, 1) - c) * inv];
        let d11 = (at(2, 0) - 2.0 * at(1, 0) + c) * inv2;
        let d22 = (at(0, 2) - 2.0 * at(0, 1) + c) * inv2;
        let d12 = (at(1, 1) - at(1, 0) - at(0, 1) + c) * inv2;
        [w_potential(g), d11 * d11 + d22 * d22 + 2.0 * d12 * d12]
    });
    integrate_pair(&cells, p, region)
}

/// `(1/2)∫(1/ε)W(D^dφ) + ε|Δ^d_s φ|²`, the discrete Laplacian energy.
pub fn energy_ag_laplace(phi: &ScalarField, p: &ModelParams, region: Option<IndexRect>) -> Result<EnergyRecord> {
    let inv = 1.0 / p.l();
    let inv2 = inv * inv;
    let cells = phi.stencil(Reach::new(1, 1, 1, 1), |at| {
        let c = at(0, 0);
        let g = [(at(1, 0) - c) * inv, (at(0, 1) - c) * inv];
        let lap = ((at(1, 0) - 2.0 * c + at(-1, 0)) + (at(0, 1) - 2.0 * c + at(0, -1))) * inv2;
        [w_potential(g), lap * lap]
    });
    integrate_pair(&cells, p, region)
}

/// `(1/2) l² Σ [(1/ε) pot + ε der]` over the region.
fn integrate_pair(cells: &VectorField, p: &ModelParams, region: Option<IndexRect>) -> Result<EnergyRecord> {
    let rect = region_rect(cells.rect(), region)?;
    let (eps, l2) = (p.eps(), p.l() * p.l());
    let pot = 0.5 * l2 / eps * sum_over(&cells.component(0), rect);
    let der = 0.5 * l2 * eps * sum_over(&cells.component(1), rect);
    Ok(EnergyRecord::from_parts(pot, der))
}

/// `q_n(ξ) = 1 − (4/δ)sin²(√δξ₁/2) − (4/δ)sin²(√δξ₂/2)`; needs `δ > 0`.
pub fn q_n(xi: [f64; 2], p: &ModelParams) -> f64 {
    let d = p.delta();
    let sd = d.sqrt();
    1.0 - 4.0 / d * (sd * xi[0] / 2.0).sin().powi(2) - 4.0 / d * (sd * xi[1] / 2.0).sin().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn periodic(n: usize, l: f64) -> Grid {
        Grid::new(l, n, n, Boundary::Periodic).unwrap()
    }

    #[test]
    fn params_derive_delta_and_eps() {
        let p = ModelParams::critical(0.01, 7.92).unwrap();
        assert!((p.delta() - 0.04).abs() < 1e-12);
        assert_eq!(p.eps(), 0.01 / p.delta().sqrt());
        assert!(ModelParams::critical(0.01, 8.0).is_err());
        assert!(ModelParams::critical(0.01, -0.1).is_err());
        assert!(ModelParams::new(0.01, 7.0, 2.5).is_err());
        assert!(ModelParams::new(0.0, 7.0, 2.0).is_err());
    }

    #[test]
    fn angle_conventions() {
        assert!((oriented_angle([1.0, 0.0], [0.0, 1.0]) - PI / 2.0).abs() < 1e-15);
        assert_eq!(oriented_angle([1.0, 0.0], [-1.0, 0.0]), -PI);
        assert_eq!(oriented_angle([1.0, 0.0], [-1.0, -0.0]), -PI);
        assert_eq!(oriented_angle([0.6, 0.8], [0.6, 0.8]), 0.0);
        let a = [0.6, 0.8];
        let b = [-0.8, 0.6];
        assert_eq!(oriented_angle(a, b), -oriented_angle(b, a));
    }

    #[test]
    fn chirality_examples() {
        let g = periodic(4, 0.1);
        let p = ModelParams::from_delta(0.1, 0.04).unwrap();
        let u = SpinField::tabulate(g, |i, _| {
            let t = PI / 2.0 * i as f64;
            [t.cos(), t.sin()]
        })
        .unwrap();
        let c = chirality(&u, &p).unwrap();
        for (_, x) in c.chi.iter() {
            assert!((x[0] - 10.0 * (PI / 4.0).sin()).abs() < 1e-12);
            assert!(x[1].abs() < 1e-12);
        }
        let zero = SpinField::tabulate(g, |_, _| [1.0, 0.0]).unwrap();
        let c0 = chirality(&zero, &p).unwrap();
        assert!(c0.chi.values().iter().chain(c0.chi_bar.values()).all(|v| *v == [0.0, 0.0]));
    }

    #[test]
    fn constant_spin_energies() {
        let l = 0.05;
        let g = periodic(6, l);
        let n = 36.0;
        let u = SpinField::tabulate(g, |_, _| [0.6, 0.8]).unwrap();
        let p = ModelParams::new(l, 8.0, 2.0).unwrap();
        assert!((energy_e(&u, &p) - l * l * n * (-10.0)).abs() < 1e-12);
        let p = ModelParams::from_delta(l, 0.3).unwrap();
        let f = energy_f(&u, &p);
        assert!((f - 0.5 * l * l * n * 0.09).abs() < 1e-14);
        let h = energy_hn(&u, &p, None).unwrap();
        assert!((h.total - l * l * n / (2.0 * p.eps())).abs() < 1e-12);
        assert_eq!(h.derivative_part, 0.0);
    }

    #[test]
    fn checkerboard_energy() {
        let l = 0.1;
        let g = periodic(4, l);
        let u = SpinField::tabulate(g, |i, j| if (i + j) % 2 == 0 { [1.0, 0.0] } else { [-1.0, 0.0] }).unwrap();
        let (a, b) = (3.0, 1.5);
        let p = ModelParams::new(l, a, b).unwrap();
        let expect = l * l * 16.0 * (2.0 * a + 2.0 * b + 2.0);
        assert!((energy_e(&u, &p) - expect).abs() < 1e-12);
    }

    #[test]
    fn tiny_open_grid_has_empty_e_stencil() {
        let g = Grid::new(0.1, 2, 2, Boundary::Open).unwrap();
        let u = SpinField::tabulate(g, |_, _| [1.0, 0.0]).unwrap();
        let p = ModelParams::new(0.1, 1.0, 1.0).unwrap();
        assert_eq!(energy_e(&u, &p), 0.0);
        assert!(energy_hn(&u, &ModelParams::from_delta(0.1, 0.1).unwrap(), None).is_err());
    }

    #[test]
    fn beta_zero_helix_is_ground_state() {
        // a = α/2 < 2 and θ = arccos(a/2) along both axes.
        let alpha = 2.0;
        let t = (alpha / 4.0f64).acos();
        assert!((t - PI / 3.0).abs() < 1e-15);
        let g = periodic(6, 0.1);
        let u = SpinField::tabulate(g, |i, j| {
            let s = t * (i + j) as f64;
            [s.cos(), s.sin()]
        })
        .unwrap();
        let p = ModelParams::new(0.1, alpha, 0.0).unwrap();
        assert!(energy_f(&u, &p) < 1e-28);
    }

    #[test]
    fn wd_and_ad_examples() {
        let g = Grid::new(0.1, 5, 5, Boundary::Open).unwrap();
        let th = ScalarField::tabulate(g, |_, _| 0.0).unwrap();
        let c = chirality_from_angles(th.clone(), th.clone(), 0.2);
        assert!(wd(&c).unwrap().values().iter().all(|&x| (x - 1.0).abs() < 1e-15));

        let mut c = c;
        let cval = 0.7;
        c.chi = VectorField::tabulate(g, |_, _| [cval, 0.0]).unwrap();
        let expect = (1.0f64 - cval * cval).powi(2);
        assert!(wd(&c).unwrap().values().iter().all(|&x| (x - expect).abs() < 1e-15));
        c.chi = VectorField::tabulate(g, |_, _| [1.0, 0.0]).unwrap();
        assert!(wd(&c).unwrap().values().iter().all(|&x| x.abs() < 1e-15));

        let a = 2.5;
        c.chi_tilde = VectorField::tabulate(g, |i, _| [a * i as f64 * 0.1, 0.0]).unwrap();
        assert!(ad(&c).unwrap().values().iter().all(|&x| (x - a).abs() < 1e-12));
    }

    #[test]
    fn agd_examples() {
        let l = 0.05;
        let g = Grid::new(l, 12, 10, Boundary::Open).unwrap();
        let p = ModelParams::from_delta(l, 0.1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ScalarField::tabulate(g, |i, j| (i as f64 * s + j as f64 * s) * l).unwrap();
        assert!(energy_agd(&phi, &p, None).unwrap().total < 1e-25);
        let c = 0.4;
        let phi = ScalarField::tabulate(g, |i, _| i as f64 * l * c).unwrap();
        let e = energy_agd(&phi, &p, None).unwrap();
        let area = (10 * 8) as f64 * l * l;
        let expect = area * (1.0f64 - c * c).powi(2) / (2.0 * p.eps());
        assert!((e.total - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn hn_star_potential_for_ferromagnet() {
        let l = 0.1;
        let g = periodic(5, l);
        let p = ModelParams::from_delta(l, 0.5).unwrap();
        let u = SpinField::tabulate(g, |_, _| [0.0, 1.0]).unwrap();
        let e = energy_hn_star(&u, &p, None).unwrap();
        assert!((e.potential_part - 25.0 * l * l / (2.0 * p.eps())).abs() < 1e-12);
        assert_eq!(e.derivative_part, 0.0);
    }

    #[test]
    fn q_n_examples() {
        let p = ModelParams::from_delta(0.01, 0.04).unwrap();
        assert_eq!(q_n([0.0, 0.0], &p), 1.0);
        // cell with |χ| = 1: χ̄ = θ/√δ with θ = 2 arcsin(√δ χ/2)
        let chi = [0.6, 0.8];
        let sd = p.delta().sqrt();
        let bar = [2.0 * (sd * chi[0] / 2.0).asin() / sd, 2.0 * (sd * chi[1] / 2.0).asin() / sd];
        assert!(q_n(bar, &p).abs() < 1e-12);
    }

    #[test]
    fn q_n_small_delta_limit() {
        let xi = [0.9, -0.4];
        let n2 = xi[0] * xi[0] + xi[1] * xi[1];
        for d in [1e-2, 1e-3, 1e-4] {
            let p = ModelParams::from_delta(0.01, d).unwrap();
            let err = (q_n(xi, &p) - (1.0 - n2)).abs();
            let quartic = xi[0].powi(4) + xi[1].powi(4);
            assert!(err <= d * quartic / 12.0 * 1.01 + 1e-15, "delta {d}: {err}");
        }
    }
}
