//! Ferromagnetic and helical ground states.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Grid;
use crate::spin_energy::{ModelParams, SpinField};

/// Tolerance for `n·θ ∈ 2πℤ` on periodic grids.
pub const COMMENSURATE_TOL: f64 = 1e-9;

/// Helix `u(i, j) = (cos, sin)(θ₀ + iθ_h + jθ_v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelixSpec {
    pub theta0: f64,
    pub theta_h: f64,
    pub theta_v: f64,
}

impl HelixSpec {
    pub fn new(theta0: f64, theta_h: f64, theta_v: f64) -> Result<HelixSpec> {
        for (name, t) in [("theta_h", theta_h), ("theta_v", theta_v)] {
            if !(t.is_finite() && t.abs() < PI) {
                return Err(Error::Parameter(format!("{name} must lie in (-pi, pi), got {t}")));
            }
        }
        if !theta0.is_finite() {
            return Err(Error::Parameter("theta0 must be finite".into()));
        }
        Ok(HelixSpec {
            theta0,
            theta_h,
            theta_v,
        })
    }

    /// Lift `θ₀ + iθ_h + jθ_v` at cell `(i, j)`.
    pub fn phase(&self, i: usize, j: usize) -> f64 {
        self.theta0 + i as f64 * self.theta_h + j as f64 * self.theta_v
    }
}

fn winding_defect(n: usize, theta: f64) -> f64 {
    let turns = n as f64 * theta / (2.0 * PI);
    (turns - turns.round()).abs() * 2.0 * PI
}

pub fn helical_field(spec: HelixSpec, grid: Grid) -> Result<SpinField> {
    let b = grid.boundary();
    for (periodic, n, t, axis) in [
        (b.periodic_x(), grid.nx(), spec.theta_h, "x"),
        (b.periodic_y(), grid.ny(), spec.theta_v, "y"),
    ] {
        if periodic {
            let d = winding_defect(n, t);
            if d > COMMENSURATE_TOL {
                return Err(Error::Configuration(format!(
                    "helix is not commensurate with the periodic grid along {axis} (defect {d:e})"
                )));
            }
        }
    }
    SpinField::tabulate(grid, |i, j| {
        let s = spec.phase(i, j);
        [s.cos(), s.sin()]
    })
}

/// Rotation angles of the ground state with unit chirality `χ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiralAngles {
    pub theta_h: f64,
    pub theta_v: f64,
    /// Some `√δ|χ_k|/2` lies within `1e-9` of the arcsin branch end.
    pub near_branch_limit: bool,
}

/// `θ_h = 2 arcsin(√δχ₁/2)`, `θ_v = 2 arcsin(√δχ₂/2)`.
pub fn chiral_angles(chi: [f64; 2], p: &ModelParams) -> Result<ChiralAngles> {
    p.require_critical()?;
    let norm = chi[0].hypot(chi[1]);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("chirality must be a unit vector, |chi| = {norm}")));
    }
    let sd = p.delta().sqrt();
    let s = [sd * chi[0] / 2.0, sd * chi[1] / 2.0];
    if s.iter().any(|x| x.abs() > 1.0) {
        return Err(Error::Domain(format!("sqrt(delta)|chi_k|/2 exceeds 1: {s:?}")));
    }
    Ok(ChiralAngles {
        theta_h: 2.0 * s[0].asin(),
        theta_v: 2.0 * s[1].asin(),
        near_branch_limit: s.iter().any(|x| 1.0 - x.abs() < 1e-9),
    })
}

/// Helical ground state with chirality `χ` and phase `θ₀` on `grid`.
pub fn ground_state_from_chirality(chi: [f64; 2], p: &ModelParams, theta0: f64, grid: Grid) -> Result<SpinField> {
    let a = chiral_angles(chi, p)?;
    helical_field(HelixSpec::new(theta0, a.theta_h, a.theta_v)?, grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Ferromagnetic,
    Helimagnetic,
    Boundary,
}

/// Sign of `α/(β+2) − 2`.
pub fn classify_regime(p: &ModelParams) -> Regime {
    let r = p.alpha() / (p.beta() + 2.0) - 2.0;
    if r.abs() <= 1e-12 {
        Regime::Boundary
    } else if r > 0.0 {
        Regime::Ferromagnetic
    } else {
        Regime::Helimagnetic
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use crate::spin_energy::{angles, chirality, energy_f, energy_hn};

    #[test]
    fn zero_angles_give_constant_field() {
        let g = Grid::new(0.1, 5, 3, Boundary::Periodic).unwrap();
        let u = helical_field(HelixSpec::new(0.3, 0.0, 0.0).unwrap(), g).unwrap();
        let first = u.field().values()[0];
        assert!(u.field().values().iter().all(|v| *v == first));
    }

    #[test]
    fn quarter_turn_spiral() {
        let g = Grid::new(0.1, 4, 3, Boundary::Periodic).unwrap();
        let u = helical_field(HelixSpec::new(0.0, PI / 2.0, 0.0).unwrap(), g).unwrap();
        let (h, v) = angles(&u);
        assert!(h.values().iter().all(|t| (t - PI / 2.0).abs() < 1e-12));
        assert!(v.values().iter().all(|t| t.abs() < 1e-12));
    }

    #[test]
    fn incommensurate_periodic_rejected() {
        let g = Grid::new(0.1, 5, 4, Boundary::Periodic).unwrap();
        let r = helical_field(HelixSpec::new(0.0, PI / 2.0, 0.0).unwrap(), g);
        assert!(matches!(r, Err(Error::Configuration(_))));
        let open = Grid::new(0.1, 5, 4, Boundary::Open).unwrap();
        assert!(helical_field(HelixSpec::new(0.0, PI / 2.0, 0.0).unwrap(), open).is_ok());
        let strip = Grid::new(0.1, 5, 4, Boundary::PeriodicY).unwrap();
        assert!(helical_field(HelixSpec::new(0.0, PI / 3.0, PI / 2.0).unwrap(), strip).is_ok());
        assert!(helical_field(HelixSpec::new(0.0, 0.0, PI / 3.0).unwrap(), strip).is_err());
    }

    #[test]
    fn beta_below_two_helix_has_zero_f() {
        // θ = arccos(α/(2(β+2))) with β = 1, α = 3 gives θ = π/3.
        let (alpha, beta): (f64, f64) = (3.0, 1.0);
        let t = (alpha / (2.0 * (beta + 2.0))).acos();
        let g = Grid::new(0.1, 6, 6, Boundary::Periodic).unwrap();
        let u = helical_field(HelixSpec::new(0.2, t, -t).unwrap(), g).unwrap();
        let p = ModelParams::new(0.1, alpha, beta).unwrap();
        assert!(energy_f(&u, &p) < 1e-28);
    }

    #[test]
    fn chiral_angle_examples() {
        let p = ModelParams::from_delta(0.01, 0.04).unwrap();
        let a = chiral_angles([1.0, 0.0], &p).unwrap();
        assert!((a.theta_h - 2.0 * 0.1f64.asin()).abs() < 1e-15);
        assert!((a.theta_h - 0.200335).abs() < 1e-6);
        assert_eq!(a.theta_v, 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b = chiral_angles([s, s], &p).unwrap();
        let expect = 2.0 * (0.2 / (2.0 * 2f64.sqrt())).asin();
        assert!((b.theta_h - expect).abs() < 1e-15 && (b.theta_v - expect).abs() < 1e-15);
        assert!((b.theta_h.cos() + b.theta_v.cos() - p.alpha() / 4.0).abs() < 1e-12);
        assert!(chiral_angles([0.5, 0.5], &p).is_err());
    }

    #[test]
    fn ground_state_energies_vanish_on_open_grid() {
        let p = ModelParams::from_delta(0.02, 0.25).unwrap();
        let g = Grid::new(0.02, 20, 20, Boundary::Open).unwrap();
        let u = ground_state_from_chirality([0.8, -0.6], &p, 1.1, g).unwrap();
        assert!(energy_f(&u, &p) < 1e-28);
        assert!(energy_hn(&u, &p, None).unwrap().total < 1e-24);
        let chi = chirality(&u, &p).unwrap();
        assert!(chi.chi.values().iter().all(|c| (c[0].hypot(c[1]) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn regimes() {
        let at = |a, b| classify_regime(&ModelParams::new(0.1, a, b).unwrap());
        assert_eq!(at(8.0, 2.0), Regime::Boundary);
        assert_eq!(at(9.0, 2.0), Regime::Ferromagnetic);
        assert_eq!(at(4.0, 0.0), Regime::Boundary);
        assert_eq!(at(7.0, 2.0), Regime::Helimagnetic);
    }
}
