//! Descent on the angle lift `ψ` of `F_n` at `β = 2`.
//!
//! With `u = (cos ψ, sin ψ)` read as a complex number and
//! `R_c = S_c − (α/2)u_c` (`S_c` the sum of the four neighbours),
//! `F_n = (l²/2)Σ|R_c|²` and `∂F_n/∂ψ_k = l² Im(ū_k G_k)` where
//! `G_k = Σ_{c ~ k} R_c − (α/2)R_k` over valid cells only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground_states::chiral_angles;
use crate::lattice::{Boundary, Grid, ScalarField};
use crate::spin_energy::{ModelParams, SpinField};
use crate::sum::tree_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelaxBoundary {
    /// Columns `0, 1` follow the helix of `left`, columns `nx−2, nx−1` that
    /// of `right`. Both chiralities must share their second component.
    FixedAngles { left: [f64; 2], right: [f64; 2] },
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GradientDescent,
    /// Heavy-ball direction `d = −g + μd_prev`, reset to `−g` when not a descent direction.
    Momentum { momentum: f64 },
    /// Polak-Ribière+ conjugate gradient.
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxConfig {
    pub max_iters: usize,
    /// Initial trial step of the line search.
    pub step: f64,
    /// Stop once `‖∇(F_n/l²)‖_∞ ≤ tol_grad`.
    pub tol_grad: f64,
    pub boundary: RelaxBoundary,
    pub method: Method,
    /// Seed for random initial fields.
    pub seed: u64,
}

impl RelaxConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Parameter(format!("step must be positive, got {}", self.step)));
        }
        if !(self.tol_grad.is_finite() && self.tol_grad > 0.0) {
            return Err(Error::Parameter(format!("tol_grad must be positive, got {}", self.tol_grad)));
        }
        if let Method::Momentum { momentum } = self.method {
            if !(0.0..1.0).contains(&momentum) {
                return Err(Error::Parameter(format!("momentum must lie in [0, 1), got {momentum}")));
            }
        }
        Ok(())
    }
}

impl Default for RelaxConfig {
    fn default() -> RelaxConfig {
        RelaxConfig {
            max_iters: 20_000,
            step: 1e-2,
            tol_grad: 1e-9,
            boundary: RelaxBoundary::Periodic,
            method: Method::ConjugateGradient,
            seed: 0,
        }
    }
}

const ARMIJO_C: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iter: usize,
    /// `F_n` after the step.
    pub energy: f64,
    pub grad_inf: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct RelaxOutcome {
    pub spins: SpinField,
    pub lift: ScalarField,
    /// Entry 0 is the initial state.
    pub trace: Vec<TracePoint>,
    pub iterations: usize,
    pub converged: bool,
    /// Local descent only; no optimality claim attaches to the result.
    pub heuristic: bool,
}

/// Stencil geometry of a full grid.
struct Lattice {
    nx: usize,
    ny: usize,
    px: bool,
    py: bool,
}

impl Lattice {
    fn new(g: &Grid) -> Lattice {
        Lattice {
            nx: g.nx(),
            ny: g.ny(),
            px: g.boundary().periodic_x(),
            py: g.boundary().periodic_y(),
        }
    }

    fn len(&self) -> usize {
        self.nx * self.ny
    }

    fn valid(&self, i: usize, j: usize) -> bool {
        (self.px || (i >= 1 && i + 1 < self.nx)) && (self.py || (j >= 1 && j + 1 < self.ny))
    }

    /// Neighbours right, left, up, down; `None` off an open grid.
    fn neighbours(&self, i: usize, j: usize) -> [Option<usize>; 4] {
        let (nx, ny) = (self.nx, self.ny);
        let idx = |i: usize, j: usize| j * nx + i;
        let step = |k: usize, n: usize, periodic: bool, up: bool| -> Option<usize> {
            match (periodic, up) {
                (true, true) => Some((k + 1) % n),
                (true, false) => Some((k + n - 1) % n),
                (false, true) => (k + 1 < n).then_some(k + 1),
                (false, false) => k.checked_sub(1),
            }
        };
        [
            step(i, nx, self.px, true).map(|a| idx(a, j)),
            step(i, nx, self.px, false).map(|a| idx(a, j)),
            step(j, ny, self.py, true).map(|b| idx(i, b)),
            step(j, ny, self.py, false).map(|b| idx(i, b)),
        ]
    }

    fn spins(psi: &[f64]) -> Vec<[f64; 2]> {
        psi.par_iter().map(|t| [t.cos(), t.sin()]).collect()
    }

    /// `R_c` at valid cells, zero elsewhere.
    fn residuals(&self, u: &[[f64; 2]], half_alpha: f64) -> Vec<[f64; 2]> {
        (0..self.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k % self.nx, k / self.nx);
                if !self.valid(i, j) {
                    return [0.0, 0.0];
                }
                let mut s = [0.0, 0.0];
                for c in self.neighbours(i, j).into_iter().flatten() {
                    s[0] += u[c][0];
                    s[1] += u[c][1];
                }
                [s[0] - half_alpha * u[k][0], s[1] - half_alpha * u[k][1]]
            })
            .collect()
    }

    /// `F_n/l²`.
    fn objective(&self, psi: &[f64], half_alpha: f64) -> f64 {
        let r = self.residuals(&Lattice::spins(psi), half_alpha);
        let d: Vec<f64> = r.par_iter().map(|v| 0.5 * (v[0] * v[0] + v[1] * v[1])).collect();
        tree_sum(&d)
    }

    /// `(F_n/l², ∇(F_n/l²))`.
    fn objective_grad(&self, psi: &[f64], half_alpha: f64) -> (f64, Vec<f64>) {
        let u = Lattice::spins(psi);
        let r = self.residuals(&u, half_alpha);
        let d: Vec<f64> = r.par_iter().map(|v| 0.5 * (v[0] * v[0] + v[1] * v[1])).collect();
        let g = (0..self.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k % self.nx, k / self.nx);
                let mut acc = [0.0, 0.0];
                for c in self.neighbours(i, j).into_iter().flatten() {
                    let (ci, cj) = (c % self.nx, c / self.nx);
                    if self.valid(ci, cj) {
                        acc[0] += r[c][0];
                        acc[1] += r[c][1];
                    }
                }
                acc[0] -= half_alpha * r[k][0];
                acc[1] -= half_alpha * r[k][1];
                u[k][0] * acc[1] - u[k][1] * acc[0]
            })
            .collect();
        (tree_sum(&d), g)
    }
}

fn full_grid_values(psi: &ScalarField) -> Result<Vec<f64>> {
    if psi.rect() != psi.grid().full_rect() {
        return Err(Error::Dimension("angle lift must cover the whole grid".into()));
    }
    Ok(psi.values().to_vec())
}

/// `∂F_n/∂ψ` at every cell.
pub fn f_gradient(psi: &ScalarField, p: &ModelParams) -> Result<ScalarField> {
    p.require_critical()?;
    let lat = Lattice::new(psi.grid());
    let (_, g) = lat.objective_grad(&full_grid_values(psi)?, p.alpha() / 2.0);
    let l2 = p.l() * p.l();
    ScalarField::from_values(*psi.grid(), g.into_iter().map(|x| l2 * x).collect())
}

/// Lift of two helices meeting at column `nx/2`:
/// `ψ = θ₀ + θ_h^L i + θ_v j` left of it and `θ₀ + θ_h^L m + θ_h^R(i − m) + θ_v j` right of it.
pub fn fixed_angle_lift(grid: Grid, left: [f64; 2], right: [f64; 2], p: &ModelParams, theta0: f64) -> Result<ScalarField> {
    if (left[1] - right[1]).abs() > 1e-12 {
        return Err(Error::Configuration(
            "left and right chiralities must share their second component".into(),
        ));
    }
    let a = chiral_angles(left, p)?;
    let b = chiral_angles(right, p)?;
    if grid.boundary().periodic_y() {
        let turns = grid.ny() as f64 * a.theta_v / (2.0 * std::f64::consts::PI);
        if (turns - turns.round()).abs() * 2.0 * std::f64::consts::PI > crate::ground_states::COMMENSURATE_TOL {
            return Err(Error::Configuration(format!(
                "theta_v = {} is not commensurate with ny = {}",
                a.theta_v,
                grid.ny()
            )));
        }
    }
    let m = grid.nx() / 2;
    ScalarField::tabulate(grid, |i, j| {
        let h = if i < m {
            a.theta_h * i as f64
        } else {
            a.theta_h * m as f64 + b.theta_h * (i - m) as f64
        };
        theta0 + h + a.theta_v * j as f64
    })
}

/// Spins with angles drawn uniformly from `[−π, π)`.
pub fn random_spin_field(grid: Grid, seed: u64) -> Result<SpinField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi: Vec<f64> = (0..grid.cell_count())
        .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();
    SpinField::from_lift(&ScalarField::from_values(grid, psi)?)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    tree_sum(&p)
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Minimizes `F_n` over the angle lift of `u0`.
pub fn relax(u0: &SpinField, p: &ModelParams, cfg: &RelaxConfig) -> Result<RelaxOutcome> {
    cfg.validate()?;
    p.require_critical()?;
    let grid = *u0.grid();
    let mut psi = full_grid_values(&u0.lift())?;
    let mut frozen = vec![false; psi.len()];
    match cfg.boundary {
        RelaxBoundary::Periodic => {
            if grid.boundary() != Boundary::Periodic {
                return Err(Error::Configuration("periodic relaxation needs a periodic grid".into()));
            }
        }
        RelaxBoundary::FixedAngles { left, right } => {
            if grid.boundary().periodic_x() {
                return Err(Error::Configuration(
                    "fixed-angle relaxation needs a grid open in x".into(),
                ));
            }
            if grid.nx() < 6 {
                return Err(Error::Dimension("fixed-angle relaxation needs nx >= 6".into()));
            }
            let lift = fixed_angle_lift(grid, left, right, p, psi[0])?;
            let nx = grid.nx();
            for j in 0..grid.ny() {
                for i in [0, 1, nx - 2, nx - 1] {
                    let k = j * nx + i;
                    psi[k] = lift.values()[k];
                    frozen[k] = true;
                }
            }
        }
    }

    let lat = Lattice::new(&grid);
    let ha = p.alpha() / 2.0;
    let l2 = p.l() * p.l();
    let project = |g: &mut Vec<f64>| {
        for (x, f) in g.iter_mut().zip(&frozen) {
            if *f {
                *x = 0.0;
            }
        }
    };

    let (mut j_cur, mut g) = lat.objective_grad(&psi, ha);
    project(&mut g);
    let mut trace = vec![TracePoint {
        iter: 0,
        energy: l2 * j_cur,
        grad_inf: inf_norm(&g),
        step: 0.0,
    }];
    let mut d: Vec<f64> = g.iter().map(|x| -x).collect();
    let mut t_prev = cfg.step;
    let mut first = true;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        if inf_norm(&g) <= cfg.tol_grad {
            converged = true;
            break;
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            d = g.iter().map(|x| -x).collect();
            slope = dot(&g, &d);
        }
        let mut t = if first { cfg.step } else { 2.0 * t_prev };
        first = false;
        let mut accepted = None;
        let mut last = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = psi.iter().zip(&d).map(|(x, y)| x + t * y).collect();
            let j_new = lat.objective(&trial, ha);
            if j_new <= j_cur + ARMIJO_C * t * slope {
                accepted = Some((trial, j_new));
                break;
            }
            last = Some((trial, j_new));
            t *= BACKTRACK;
        }
        let (trial, j_new) = match accepted {
            Some(a) => a,
            // Armijo can fail at rounding level near a minimum; a
            // non-increasing step is still taken and ends the run.
            None => match last {
                Some((trial, j_new)) if j_new <= j_cur => {
                    psi = trial;
                    j_cur = j_new;
                    iterations += 1;
                    let (_, g_new) = lat.objective_grad(&psi, ha);
                    g = g_new;
                    project(&mut g);
                    trace.push(TracePoint {
                        iter: iterations,
                        energy: l2 * j_cur,
                        grad_inf: inf_norm(&g),
                        step: t,
                    });
                    converged = inf_norm(&g) <= cfg.tol_grad;
                    break;
                }
                _ => {
                    return Err(Error::Optimization(format!(
                        "no decrease after {MAX_BACKTRACKS} backtracks at iteration {iterations}"
                    )))
                }
            },
        };
        psi = trial;
        j_cur = j_new;
        t_prev = t;
        iterations += 1;
        let (_, mut g_new) = lat.objective_grad(&psi, ha);
        project(&mut g_new);
        d = match cfg.method {
            Method::GradientDescent => g_new.iter().map(|x| -x).collect(),
            Method::Momentum { momentum } => g_new.iter().zip(&d).map(|(x, y)| -x + momentum * y).collect(),
            Method::ConjugateGradient => {
                let gg = dot(&g, &g);
                let diff: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
                let b = if gg > 0.0 { (dot(&g_new, &diff) / gg).max(0.0) } else { 0.0 };
                g_new.iter().zip(&d).map(|(x, y)| -x + b * y).collect()
            }
        };
        g = g_new;
        trace.push(TracePoint {
            iter: iterations,
            energy: l2 * j_cur,
            grad_inf: inf_norm(&g),
            step: t,
        });
    }
    if !converged && inf_norm(&g) <= cfg.tol_grad {
        converged = true;
    }

    let lift = ScalarField::from_values(grid, psi)?;
    Ok(RelaxOutcome {
        spins: SpinField::from_lift(&lift)?,
        lift,
        trace,
        iterations,
        converged,
        heuristic: true,
    })
}
