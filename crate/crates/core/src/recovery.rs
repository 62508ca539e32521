//! Recovery sequences for a single straight chirality wall.
//!
//! The roof potential `φ` with `∇φ = χ±` is mollified at scale `ε`, sampled
//! at the lattice nodes and turned into spins `u = (cos, sin)(φ_n/ε)`, whose
//! linearized chirality is exactly `D^dφ_n`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{curl_l1, hn_vs_hnstar, lp_norm};
use crate::entropy::{
    jin_kohn, limit_h_bv, perp, total_variation_production, Interface, PolygonalBvField, Region, Vec2,
};
use crate::error::{Error, Result};
use crate::lattice::{grad_d, Boundary, Grid, IndexRect, ScalarField};
use crate::quadrature::gauss_legendre;
use crate::spin_energy::{
    chirality, energy_ag_laplace, energy_hn, w_potential, wd, EnergyRecord, ModelParams, SpinField,
};
use crate::sum::tree_sum;

/// Continuum potential with an optional straight kink line.
pub trait Potential: Send + Sync {
    fn value(&self, x: Vec2) -> f64;
    fn gradient(&self, x: Vec2) -> Vec2;
    /// Line `{x·normal = offset}` across which the gradient jumps.
    fn ridge(&self) -> Option<Ridge> {
        None
    }
    /// Length scale below which lattice sampling under-resolves the potential.
    fn resolution_length(&self) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ridge {
    pub normal: Vec2,
    pub offset: f64,
}

#[inline]
fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn unit(v: Vec2, what: &str) -> Result<()> {
    let n = v[0].hypot(v[1]);
    if (n - 1.0).abs() > 1e-12 {
        Err(Error::Domain(format!("{what} must be a unit vector, |{what}| = {n}")))
    } else {
        Ok(())
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Rect> {
        if !(x1 > x0 && y1 > y0) {
            return Err(Error::Domain("empty rectangle".into()));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    fn corners(&self) -> [Vec2; 4] {
        [[self.x0, self.y0], [self.x1, self.y0], [self.x1, self.y1], [self.x0, self.y1]]
    }

    /// Segment of the line `{x·ν = o}` inside the rectangle, if any.
    fn clip_line(&self, nu: Vec2, o: f64) -> Option<(Vec2, Vec2)> {
        let c = self.corners();
        let mut hits: Vec<Vec2> = Vec::new();
        for k in 0..4 {
            let (a, b) = (c[k], c[(k + 1) % 4]);
            let (fa, fb) = (dot(a, nu) - o, dot(b, nu) - o);
            if fa == 0.0 {
                hits.push(a);
            }
            if fa * fb < 0.0 {
                let t = fa / (fa - fb);
                hits.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
        if hits.len() < 2 {
            return None;
        }
        let dir = perp(nu);
        hits.sort_by(|p, q| dot(*p, dir).total_cmp(&dot(*q, dir)));
        Some((hits[0], hits[hits.len() - 1]))
    }
}

/// Single straight wall with traces `χ⁺` on the `ν` side and `χ⁻`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallConfig {
    pub chi_plus: Vec2,
    pub chi_minus: Vec2,
    pub nu: Vec2,
    pub wall_offset: f64,
    pub domain: Rect,
}

impl WallConfig {
    pub fn new(chi_plus: Vec2, chi_minus: Vec2, nu: Vec2, wall_offset: f64, domain: Rect) -> Result<WallConfig> {
        let cfg = WallConfig {
            chi_plus,
            chi_minus,
            nu,
            wall_offset,
            domain,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        unit(self.chi_plus, "chi_plus")?;
        unit(self.chi_minus, "chi_minus")?;
        unit(self.nu, "nu")?;
        let j = self.jump();
        let n = j[0].hypot(j[1]);
        if n < 1e-12 {
            return Err(Error::Domain("chi_plus and chi_minus must differ".into()));
        }
        if (j[0] * self.nu[1] - j[1] * self.nu[0]).abs() > 1e-10 {
            return Err(Error::Domain("jump must be parallel to the wall normal".into()));
        }
        Rect::new(self.domain.x0, self.domain.x1, self.domain.y0, self.domain.y1)?;
        Ok(())
    }

    /// `χ± = (1/√2)(1, ±1)`, `ν = e₂` through the middle of `[0,1] × [−1/2, 1/2]`.
    pub fn canonical() -> WallConfig {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        WallConfig {
            chi_plus: [s, s],
            chi_minus: [s, -s],
            nu: [0.0, 1.0],
            wall_offset: 0.0,
            domain: Rect {
                x0: 0.0,
                x1: 1.0,
                y0: -0.5,
                y1: 0.5,
            },
        }
    }

    /// Canonical wall rotated by `angle` about the centre of its domain.
    pub fn canonical_rotated(angle: f64) -> WallConfig {
        let c = WallConfig::canonical();
        let rot = |v: Vec2| [angle.cos() * v[0] - angle.sin() * v[1], angle.sin() * v[0] + angle.cos() * v[1]];
        let nu = rot(c.nu);
        let centre = [0.5, 0.0];
        WallConfig {
            chi_plus: rot(c.chi_plus),
            chi_minus: rot(c.chi_minus),
            nu,
            wall_offset: dot(centre, nu),
            domain: c.domain,
        }
    }

    pub fn jump(&self) -> Vec2 {
        [self.chi_plus[0] - self.chi_minus[0], self.chi_plus[1] - self.chi_minus[1]]
    }

    /// Sharp field `∇φ` with the one-sided value `χ⁻` on the wall line.
    pub fn sharp(&self, x: Vec2) -> Vec2 {
        if dot(x, self.nu) - self.wall_offset > 0.0 {
            self.chi_plus
        } else {
            self.chi_minus
        }
    }

    /// The wall restricted to a rectangle, as a polygonal BV field.
    pub fn bv_field(&self, rect: Rect) -> Result<PolygonalBvField> {
        let interfaces = match rect.clip_line(self.nu, self.wall_offset) {
            Some((start, end)) if (end[0] - start[0]).hypot(end[1] - start[1]) > 0.0 => vec![Interface {
                start,
                end,
                chi_plus: self.chi_plus,
                chi_minus: self.chi_minus,
                nu: self.nu,
            }],
            _ => vec![],
        };
        let regions = if self.nu == [0.0, 1.0] && rect.y0 < self.wall_offset && self.wall_offset < rect.y1 {
            vec![
                Region {
                    vertices: vec![
                        [rect.x0, self.wall_offset],
                        [rect.x1, self.wall_offset],
                        [rect.x1, rect.y1],
                        [rect.x0, rect.y1],
                    ],
                    value: self.chi_plus,
                },
                Region {
                    vertices: vec![
                        [rect.x0, rect.y0],
                        [rect.x1, rect.y0],
                        [rect.x1, self.wall_offset],
                        [rect.x0, self.wall_offset],
                    ],
                    value: self.chi_minus,
                },
            ]
        } else {
            vec![]
        };
        PolygonalBvField::new(regions, interfaces)
    }
}

/// `φ(x) = a·x + c|x·ν − o|` with `a ± cν = χ±`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofPotential {
    a: Vec2,
    c: f64,
    nu: Vec2,
    offset: f64,
}

impl Potential for RoofPotential {
    fn value(&self, x: Vec2) -> f64 {
        dot(self.a, x) + self.c * (dot(x, self.nu) - self.offset).abs()
    }

    fn gradient(&self, x: Vec2) -> Vec2 {
        let s = if dot(x, self.nu) - self.offset > 0.0 { 1.0 } else { -1.0 };
        [self.a[0] + s * self.c * self.nu[0], self.a[1] + s * self.c * self.nu[1]]
    }

    fn ridge(&self) -> Option<Ridge> {
        Some(Ridge {
            normal: self.nu,
            offset: self.offset,
        })
    }
}

pub fn single_wall_potential(cfg: &WallConfig) -> Result<RoofPotential> {
    cfg.validate()?;
    let a = [
        (cfg.chi_plus[0] + cfg.chi_minus[0]) / 2.0,
        (cfg.chi_plus[1] + cfg.chi_minus[1]) / 2.0,
    ];
    let c = dot(cfg.jump(), cfg.nu) / 2.0;
    Ok(RoofPotential {
        a,
        c,
        nu: cfg.nu,
        offset: cfg.wall_offset,
    })
}

/// Affine potential `φ(x) = g·x + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinePotential {
    pub gradient: Vec2,
    pub constant: f64,
}

impl Potential for AffinePotential {
    fn value(&self, x: Vec2) -> f64 {
        dot(self.gradient, x) + self.constant
    }
    fn gradient(&self, _x: Vec2) -> Vec2 {
        self.gradient
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelShape {
    /// `(1 − r²)^power`
    Polynomial { power: u32 },
    /// `exp(−1/(1 − r²))`
    Exponential,
}

/// Radial kernel `η(z) = k(|z|/R)/(R² c)` supported in `|z| ≤ R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    shape: KernelShape,
    radius: f64,
    /// `∫_{|y| ≤ 1} k(|y|) dy`
    mass: f64,
}

/// Default kernel radius. The limit wall energy of a mollified roof depends
/// on the radius; for the quartic bump it is within 1% of the optimal
/// profile constant near `R = 4`.
pub const DEFAULT_RADIUS: f64 = 4.0;

impl Mollifier {
    pub fn new(shape: KernelShape, radius: f64) -> Result<Mollifier> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Parameter(format!("kernel radius must be positive, got {radius}")));
        }
        let mass = match shape {
            KernelShape::Polynomial { power } => {
                if power < 3 {
                    return Err(Error::Parameter("polynomial kernels need power >= 3".into()));
                }
                PI / (power as f64 + 1.0)
            }
            KernelShape::Exponential => {
                let (x, w) = gauss_legendre(64);
                let panels = 16;
                let h = 1.0 / panels as f64;
                let mut s = 0.0;
                for p in 0..panels {
                    for (xi, wi) in x.iter().zip(&w) {
                        let r = h * (p as f64 + 0.5 * (xi + 1.0));
                        s += 0.5 * h * wi * bump_exp(r * r) * r;
                    }
                }
                2.0 * PI * s
            }
        };
        Ok(Mollifier { shape, radius, mass })
    }

    pub fn quartic(radius: f64) -> Result<Mollifier> {
        Mollifier::new(KernelShape::Polynomial { power: 4 }, radius)
    }

    pub fn shape(&self) -> KernelShape {
        self.shape
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn profile(&self, r2: f64) -> f64 {
        if r2 >= 1.0 {
            return 0.0;
        }
        match self.shape {
            KernelShape::Polynomial { power } => (1.0 - r2).powi(power as i32),
            KernelShape::Exponential => bump_exp(r2),
        }
    }

    /// Normalized kernel value.
    pub fn eval(&self, z: Vec2) -> f64 {
        let r2 = (z[0] * z[0] + z[1] * z[1]) / (self.radius * self.radius);
        self.profile(r2) / (self.radius * self.radius * self.mass)
    }

    fn polynomial(&self) -> bool {
        matches!(self.shape, KernelShape::Polynomial { power } if power <= 15)
    }
}

impl Default for Mollifier {
    fn default() -> Mollifier {
        Mollifier::quartic(DEFAULT_RADIUS).expect("default kernel is valid")
    }
}

fn bump_exp(r2: f64) -> f64 {
    if r2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r2)).exp()
    }
}

/// Quadrature order of every panel.
pub const QUAD_ORDER: usize = 16;
/// Stability target of the panel-doubling loop.
pub const QUAD_TOL: f64 = 1e-10;
const MAX_PANELS: usize = 64;

/// `φ^ε(x) = ∫η(z)φ(x + εz)dz`.
pub struct Mollified<P> {
    phi: P,
    eps: f64,
    kernel: Mollifier,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

pub fn mollify<P: Potential>(phi: P, eps: f64, m: Mollifier) -> Result<Mollified<P>> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
    }
    let (nodes, weights) = gauss_legendre(QUAD_ORDER);
    Ok(Mollified {
        phi,
        eps,
        kernel: m,
        nodes,
        weights,
    })
}

impl<P: Potential> Mollified<P> {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn inner(&self) -> &P {
        &self.phi
    }

    /// Kernel-weighted averages of `f(x + εz)` over the support, as
    /// `(Σwηf, Σwη)`. The outer variable runs along the ridge normal in the
    /// chord angle `s = R sin θ`, split at the kink; the inner one along the
    /// chord.
    fn moments<const K: usize, F>(&self, x: Vec2, panels: usize, f: &F) -> ([f64; K], f64)
    where
        F: Fn(Vec2) -> [f64; K],
    {
        let r = self.kernel.radius;
        let (n, kink) = match self.phi.ridge() {
            Some(rg) => {
                let s = (rg.offset - dot(x, rg.normal)) / self.eps;
                (rg.normal, (s.abs() < r).then_some(s))
            }
            None => ([1.0, 0.0], None),
        };
        let t = perp(n);
        let half = PI / 2.0;
        let pieces: Vec<(f64, f64)> = match kink {
            Some(s) => {
                let th = (s / r).asin();
                vec![(-half, th), (th, half)]
            }
            None => vec![(-half, half)],
        };
        let inner_panels = if self.kernel.polynomial() { 1 } else { panels };
        let mut acc = [0.0; K];
        let mut mass = 0.0;
        for (a, b) in pieces {
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                let lo = a + h * p as f64;
                for (xo, wo) in self.nodes.iter().zip(&self.weights) {
                    let th = lo + 0.5 * h * (xo + 1.0);
                    let s = r * th.sin();
                    let ds = 0.5 * h * wo * r * th.cos();
                    let chord = (r * r - s * s).max(0.0).sqrt();
                    let hi = 2.0 * chord / inner_panels as f64;
                    for q in 0..inner_panels {
                        let lo_t = -chord + hi * q as f64;
                        for (xi, wi) in self.nodes.iter().zip(&self.weights) {
                            let tt = lo_t + 0.5 * hi * (xi + 1.0);
                            let z = [s * n[0] + tt * t[0], s * n[1] + tt * t[1]];
                            let w = ds * 0.5 * hi * wi * self.kernel.eval(z);
                            let v = f([x[0] + self.eps * z[0], x[1] + self.eps * z[1]]);
                            for k in 0..K {
                                acc[k] += w * v[k];
                            }
                            mass += w;
                        }
                    }
                }
            }
        }
        (acc, mass)
    }

    fn average<const K: usize, F>(&self, x: Vec2, f: F) -> [f64; K]
    where
        F: Fn(Vec2) -> [f64; K],
    {
        let eval = |panels| {
            let (acc, mass) = self.moments(x, panels, &f);
            acc.map(|a| a / mass)
        };
        let mut panels = 1;
        let mut prev = eval(panels);
        while panels < MAX_PANELS {
            panels *= 2;
            let next = eval(panels);
            let stable = prev.iter().zip(&next).all(|(a, b)| (a - b).abs() <= QUAD_TOL);
            prev = next;
            if stable {
                break;
            }
        }
        prev
    }

    /// Raw kernel mass at `x` before per-point normalization.
    pub fn quadrature_mass(&self, x: Vec2, panels: usize) -> f64 {
        self.moments::<1, _>(x, panels, &|_| [0.0]).1
    }
}

impl<P: Potential> Potential for Mollified<P> {
    fn value(&self, x: Vec2) -> f64 {
        self.average(x, |y| [self.phi.value(y)])[0]
    }

    fn gradient(&self, x: Vec2) -> Vec2 {
        self.average(x, |y| self.phi.gradient(y))
    }

    fn resolution_length(&self) -> Option<f64> {
        Some(self.eps * self.kernel.radius)
    }
}

/// Minimum number of lattice spacings across the mollification radius.
pub const MIN_NODES_PER_RADIUS: f64 = 4.0;

/// `φ_n(i, j) = φ(l·(i, j))` at the lattice nodes.
pub fn discretize_potential<P: Potential>(phi: &P, grid: Grid) -> Result<ScalarField> {
    if let Some(len) = phi.resolution_length() {
        if len < MIN_NODES_PER_RADIUS * grid.spacing() {
            return Err(Error::Scaling(format!(
                "mollification radius {len:e} spans fewer than {MIN_NODES_PER_RADIUS} lattice spacings"
            )));
        }
    }
    ScalarField::tabulate(grid, |i, j| phi.value(grid.corner(i, j)))
}

/// `u = (cos, sin)(√δ φ_n / l)`.
pub fn spin_from_potential(phi_n: &ScalarField, p: &ModelParams) -> Result<SpinField> {
    let delta = p.require_positive_delta()?;
    let sd = delta.sqrt();
    let g = grad_d(phi_n)?;
    let max = g.values().iter().fold(0.0f64, |m, v| m.max(v[0].abs()).max(v[1].abs()));
    if sd * max >= PI {
        return Err(Error::Scaling(format!(
            "largest lattice angle sqrt(delta)*max|D phi| = {} reaches pi",
            sd * max
        )));
    }
    let k = sd / p.l();
    SpinField::from_lift(&phi_n.map(|v| k * v))
}

/// One level `(l_n, δ_n, ε_n)` of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub n: usize,
    pub params: ModelParams,
}

/// Sequence of parameters with `ε ↓ 0`, `δ ↓ 0` and `δ^{5/2}/l ↓ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSchedule {
    entries: Vec<ScheduleEntry>,
}

impl ScalingSchedule {
    pub fn new(params: Vec<ModelParams>) -> Result<ScalingSchedule> {
        if params.is_empty() {
            return Err(Error::Configuration("schedule is empty".into()));
        }
        for p in &params {
            p.require_critical()?;
        }
        for (k, w) in params.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            let ratio = |p: &ModelParams| p.delta().powf(2.5) / p.l();
            if !(b.eps() < a.eps()) {
                return Err(Error::Scaling(format!("eps does not decrease at level {}", k + 1)));
            }
            if !(b.delta() < a.delta()) {
                return Err(Error::Scaling(format!("delta does not decrease at level {}", k + 1)));
            }
            if !(ratio(b) < ratio(a)) {
                return Err(Error::Scaling(format!(
                    "delta^(5/2)/l does not decrease at level {} ({} -> {})",
                    k + 1,
                    ratio(a),
                    ratio(b)
                )));
            }
        }
        Ok(ScalingSchedule {
            entries: params
                .into_iter()
                .enumerate()
                .map(|(n, params)| ScheduleEntry { n, params })
                .collect(),
        })
    }

    /// `ε_n = ε₀2^{−n}`, `δ_n = ε_n^{exponent}`, `l_n = ε_n√δ_n`.
    pub fn geometric(eps0: f64, levels: usize, exponent: f64) -> Result<ScalingSchedule> {
        let eps: Vec<f64> = (0..levels).map(|n| eps0 * 0.5f64.powi(n as i32)).collect();
        ScalingSchedule::from_eps(&eps, exponent)
    }

    /// `δ = ε^{exponent}` and `l = ε√δ` for each listed `ε`.
    pub fn from_eps(eps: &[f64], exponent: f64) -> Result<ScalingSchedule> {
        let params = eps
            .iter()
            .map(|&e| ModelParams::from_eps_delta(e, e.powf(exponent)))
            .collect::<Result<Vec<_>>>()?;
        ScalingSchedule::new(params)
    }

    /// Explicit `(ε, δ)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<ScalingSchedule> {
        let params = pairs
            .iter()
            .map(|&(e, d)| ModelParams::from_eps_delta(e, d))
            .collect::<Result<Vec<_>>>()?;
        ScalingSchedule::new(params)
    }

    pub fn entries(&self) -> &[ScheduleEntry] {
        &self.entries
    }
}

/// Extra cells around the measured region so every stencil is defined.
pub const MARGIN: usize = 4;

/// Lattice realisation of a wall at one schedule level.
#[derive(Debug, Clone)]
pub struct RecoveryLevel {
    pub n: usize,
    pub params: ModelParams,
    pub grid: Grid,
    /// Cells `Ω_l` fully inside the domain, in grid indices.
    pub region: IndexRect,
    /// `Ω_l` in physical coordinates.
    pub region_rect: Rect,
    pub phi_n: ScalarField,
    pub spins: SpinField,
}

fn cell_range(lo: f64, hi: f64, l: f64) -> (i64, i64) {
    let a = (lo / l - 1e-9).ceil() as i64;
    let b = (hi / l + 1e-9).floor() as i64;
    (a, b)
}

fn check_layer_fits(cfg: &WallConfig, params: &ModelParams, m: &Mollifier) -> Result<()> {
    let half = params.eps() * m.radius();
    let sides: Vec<f64> = cfg.domain.corners().iter().map(|c| dot(*c, cfg.nu) - cfg.wall_offset).collect();
    let (lo, hi) = sides.iter().fold((f64::MAX, f64::MIN), |(a, b), &s| (a.min(s), b.max(s)));
    if hi < half || -lo < half {
        return Err(Error::Configuration(format!(
            "mollified layer of half-width {half} does not fit inside the domain"
        )));
    }
    Ok(())
}

/// Builds the recovery field of `cfg` at one parameter level.
pub fn recovery_level(cfg: &WallConfig, n: usize, params: &ModelParams, m: &Mollifier) -> Result<RecoveryLevel> {
    check_layer_fits(cfg, params, m)?;
    let l = params.l();
    let d = cfg.domain;
    let (i0, i1) = cell_range(d.x0, d.x1, l);
    let (j0, j1) = cell_range(d.y0, d.y1, l);
    if i1 - i0 < 1 || j1 - j0 < 1 {
        return Err(Error::Dimension("domain holds no whole cells".into()));
    }
    let (w, h) = ((i1 - i0) as usize, (j1 - j0) as usize);
    let grid = Grid::new(l, w + 2 * MARGIN, h + 2 * MARGIN, Boundary::Open)?
        .with_origin([i0 - MARGIN as i64, j0 - MARGIN as i64]);
    let region = IndexRect::new(MARGIN, MARGIN + w, MARGIN, MARGIN + h);
    let region_rect = Rect {
        x0: i0 as f64 * l,
        x1: i1 as f64 * l,
        y0: j0 as f64 * l,
        y1: j1 as f64 * l,
    };
    let phi = mollify(single_wall_potential(cfg)?, params.eps(), *m)?;
    let phi_n = discretize_potential(&phi, grid)?;
    let spins = spin_from_potential(&phi_n, params)?;
    Ok(RecoveryLevel {
        n,
        params: *params,
        grid,
        region,
        region_rect,
        phi_n,
        spins,
    })
}

/// One row of the limsup table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub n: usize,
    pub l: f64,
    pub delta: f64,
    pub eps: f64,
    pub hn: EnergyRecord,
    pub ags: EnergyRecord,
    /// `|H_n − AG_s|/H_n`
    pub gap: f64,
    /// `(1/6)|[χ]|³ × wall length inside Ω_l`
    pub limit: f64,
    pub rel_err: f64,
}

impl RecoveryLevel {
    pub fn row(&self, cfg: &WallConfig) -> Result<GammaRow> {
        let p = &self.params;
        let hn = energy_hn(&self.spins, p, Some(self.region))?;
        let ags = energy_ag_laplace(&self.phi_n, p, Some(self.region))?;
        let limit = limit_h_bv(&cfg.bv_field(self.region_rect)?);
        Ok(GammaRow {
            n: self.n,
            l: p.l(),
            delta: p.delta(),
            eps: p.eps(),
            hn,
            ags,
            gap: (hn.total - ags.total).abs() / hn.total,
            limit,
            rel_err: (hn.total - limit).abs() / limit,
        })
    }
}

/// Secondary measurements on one recovery level, all over `Ω_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelDiagnostics {
    pub n: usize,
    /// `l²Σ|div_d(Σ_ν∘χ_n⊥)|` with `ν` the wall normal.
    pub tv_production: f64,
    /// `l²Σ|χ_n − χ|` against the sharp field at cell centres.
    pub l1_distance: f64,
    /// `(1/(2ε)) l²Σ|W^d(χ_n) − W(χ_n)|`
    pub wd_gap: f64,
    pub curl_l1: f64,
    pub chi_sup: f64,
    pub chi_l4: f64,
    pub chi_l6: f64,
    /// Cells with an angle above [`COUNT_THRESHOLD`].
    pub large_angle_cells: usize,
    /// `count·l/δ^{3/2}`
    pub counting_constant: f64,
    pub hn_star_ratio: Option<f64>,
}

/// Angle threshold used for large-angle counts on recovery levels.
pub const COUNT_THRESHOLD: f64 = 0.5;

impl RecoveryLevel {
    pub fn diagnostics(&self, cfg: &WallConfig) -> Result<LevelDiagnostics> {
        let p = &self.params;
        let r = self.region;
        let chi = chirality(&self.spins, p)?;
        let tv = total_variation_production(&chi.chi, &jin_kohn(cfg.nu)?, Some(r))?;
        let l = p.l();
        let mut l1 = Vec::with_capacity(r.len());
        let mut sup: f64 = 0.0;
        for (i, j) in r.cells() {
            let c = chi.chi.get(i as isize, j as isize).expect("region inside the chirality set");
            let x = self.grid.corner(i, j);
            let s = cfg.sharp([x[0] + 0.5 * l, x[1] + 0.5 * l]);
            l1.push((c[0] - s[0]).hypot(c[1] - s[1]));
            sup = sup.max(c[0].hypot(c[1]));
        }
        let w = wd(&chi)?;
        let gap: Vec<f64> = r
            .cells()
            .map(|(i, j)| {
                let c = chi.chi.get(i as isize, j as isize).unwrap();
                (w.get(i as isize, j as isize).unwrap() - w_potential(c)).abs()
            })
            .collect();
        let count = r
            .cells()
            .filter(|&(i, j)| {
                let h = chi.theta_hor.get(i as isize, j as isize).unwrap();
                let v = chi.theta_ver.get(i as isize, j as isize).unwrap();
                h.abs() > COUNT_THRESHOLD || v.abs() > COUNT_THRESHOLD
            })
            .count();
        let star = hn_vs_hnstar(&self.spins, p, r)?;
        Ok(LevelDiagnostics {
            n: self.n,
            tv_production: tv,
            l1_distance: l * l * tree_sum(&l1),
            wd_gap: 0.5 * l * l / p.eps() * tree_sum(&gap),
            curl_l1: curl_l1(&chi.chi_bar, Some(r))?,
            chi_sup: sup,
            chi_l4: lp_norm(&chi.chi, 4, Some(r))?,
            chi_l6: lp_norm(&chi.chi, 6, Some(r))?,
            large_angle_cells: count,
            counting_constant: count as f64 * l / p.delta().powf(1.5),
            hn_star_ratio: star.ratio,
        })
    }
}

/// Recovery energies along a schedule.
pub fn gamma_limsup_experiment(cfg: &WallConfig, schedule: &ScalingSchedule, m: &Mollifier) -> Result<Vec<GammaRow>> {
    Ok(gamma_limsup_with_diagnostics(cfg, schedule, m)?
        .into_iter()
        .map(|(row, _)| row)
        .collect())
}

/// [`gamma_limsup_experiment`] with the per-level diagnostics.
pub fn gamma_limsup_with_diagnostics(
    cfg: &WallConfig,
    schedule: &ScalingSchedule,
    m: &Mollifier,
) -> Result<Vec<(GammaRow, LevelDiagnostics)>> {
    cfg.validate()?;
    schedule
        .entries()
        .iter()
        .map(|e| {
            let lvl = recovery_level(cfg, e.n, &e.params, m)?;
            Ok((lvl.row(cfg)?, lvl.diagnostics(cfg)?))
        })
        .collect()
}
