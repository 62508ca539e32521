use std::f64::consts::PI;
use std::io::BufReader;

use serde_json::{json, Value};

use chiral_core::diagnostics::diagnose;
use chiral_core::entropy::{jin_kohn, limit_h_bv, total_variation_production};
use chiral_core::ground_states::{chiral_angles, ground_state_from_chirality};
use chiral_core::io::{csv_table, fmt_f64, read_field, write_vector_field, FieldFile};
use chiral_core::lattice::{Boundary, Grid, IndexRect, VectorField};
use chiral_core::recovery::{gamma_limsup_experiment, recovery_level, Rect};
use chiral_core::relaxation::{fixed_angle_lift, random_spin_field, relax, RelaxBoundary, RelaxConfig};
use chiral_core::spin_energy::{chirality, energy_e, energy_f, energy_hn, ModelParams, SpinField};

use crate::error::CliError;
use crate::output::Run;
use crate::settings::*;

/// Inputs within this distance of the unit circle are normalized.
pub const CHI_NORM_TOLERANCE: f64 = 1e-3;

fn unit_chi(chi: [f64; 2], name: &str) -> Result<[f64; 2], CliError> {
    let n = chi[0].hypot(chi[1]);
    if !((n - 1.0).abs() <= CHI_NORM_TOLERANCE) {
        return Err(CliError::Config(format!(
            "{name} must be a unit vector (|{name}| = {n}, tolerance {CHI_NORM_TOLERANCE})"
        )));
    }
    Ok([chi[0] / n, chi[1] / n])
}

fn params_json(p: &ModelParams) -> Value {
    json!({ "l": p.l(), "alpha": p.alpha(), "beta": p.beta(), "delta": p.delta(), "eps": p.eps() })
}

fn field_bytes(u: &VectorField, meta: &[(&str, String)]) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_vector_field(&mut buf, u, meta)?;
    Ok(buf)
}

fn param_meta(p: &ModelParams) -> Vec<(&'static str, String)> {
    vec![
        ("alpha", fmt_f64(p.alpha())),
        ("beta", fmt_f64(p.beta())),
        ("delta", fmt_f64(p.delta())),
        ("eps", fmt_f64(p.eps())),
    ]
}

fn load_field(path: &std::path::Path) -> Result<FieldFile, CliError> {
    let f = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(read_field(BufReader::new(f))?)
}

/// β = 2 parameters of a stored field: the override, then `alpha`, then `delta` metadata.
fn stored_params(f: &FieldFile, delta: Option<f64>) -> Result<ModelParams, CliError> {
    let l = f.grid.spacing();
    if let Some(d) = delta {
        return Ok(ModelParams::from_delta(l, d)?);
    }
    if let Some(a) = f.meta_f64("alpha")? {
        return Ok(ModelParams::critical(l, a)?);
    }
    match f.meta_f64("delta")? {
        Some(d) => Ok(ModelParams::from_delta(l, d)?),
        None => Err(CliError::Config("field file records neither alpha nor delta; pass --delta".into())),
    }
}

pub fn ground_state(s: &GroundStateSettings) -> Result<Run, CliError> {
    let chi = unit_chi(s.chi, "chi")?;
    let p = ModelParams::critical(s.l, s.alpha)?;
    let grid = Grid::new(s.l, s.nx, s.ny, s.boundary.into())?;
    let a = chiral_angles(chi, &p)?;
    let u = ground_state_from_chirality(chi, &p, s.theta0, grid)?;
    let (e, f) = (energy_e(&u, &p), energy_f(&u, &p));
    let hn = energy_hn(&u, &p, None)?;
    let per_cell = f / (p.l() * p.l() * grid.cell_count() as f64);
    let table = csv_table(
        &["l", "alpha", "delta", "eps", "chi1", "chi2", "theta_h", "theta_v", "E", "F", "F_per_cell", "Hn", "Hn_pot", "Hn_der"],
        [[p.l(), p.alpha(), p.delta(), p.eps(), chi[0], chi[1], a.theta_h, a.theta_v, e, f, per_cell, hn.total, hn.potential_part, hn.derivative_part]
            .iter()
            .map(|&x| fmt_f64(x))
            .collect()],
    );
    let mut run = Run::default();
    run.file("ground_state_field.csv", field_bytes(u.field(), &param_meta(&p))?);
    run.file("ground_state_energies.csv", table.clone());
    run.derived = json!({
        "params": params_json(&p),
        "chi_used": chi,
        "theta_h": a.theta_h,
        "theta_v": a.theta_v,
        "near_branch_limit": a.near_branch_limit,
    });
    run.stdout = table;
    Ok(run)
}

fn schedule_json(s: &WallSettings) -> Result<Value, CliError> {
    let levels: Vec<Value> = s
        .schedule()?
        .entries()
        .iter()
        .map(|e| json!({ "n": e.n, "l": e.params.l(), "delta": e.params.delta(), "eps": e.params.eps() }))
        .collect();
    let w = s.wall();
    Ok(json!({
        "levels": levels,
        "wall": { "chi_plus": w.chi_plus, "chi_minus": w.chi_minus, "nu": w.nu, "offset": w.wall_offset },
    }))
}

pub fn wall_energy(s: &WallSettings) -> Result<Run, CliError> {
    let sched = s.schedule()?;
    let m = s.mollifier()?;
    let cfg = s.wall();
    cfg.validate()?;
    let mut rows = Vec::new();
    for e in sched.entries() {
        let lvl = recovery_level(&cfg, e.n, &e.params, &m)?;
        let p = &lvl.params;
        let hn = energy_hn(&lvl.spins, p, Some(lvl.region))?;
        let mut r = vec![e.n.to_string()];
        r.extend(
            [p.l(), p.delta(), p.eps(), energy_e(&lvl.spins, p), energy_f(&lvl.spins, p), hn.total, hn.potential_part, hn.derivative_part]
                .iter()
                .map(|&x| fmt_f64(x)),
        );
        rows.push(r);
    }
    let table = csv_table(&["n", "l", "delta", "eps", "E", "F", "Hn", "Hn_potential", "Hn_derivative"], rows);
    let mut run = Run::default();
    run.file("wall_energy.csv", table.clone());
    run.derived = schedule_json(s)?;
    run.stdout = table;
    Ok(run)
}

pub fn gamma_table(s: &WallSettings) -> Result<Run, CliError> {
    let rows = gamma_limsup_experiment(&s.wall(), &s.schedule()?, &s.mollifier()?)?;
    let table = csv_table(
        &["n", "l", "delta", "eps", "Hn", "Hn_pot", "Hn_der", "AGs_energy", "gap", "limit", "rel_err"],
        rows.iter().map(|r| {
            let mut v = vec![r.n.to_string()];
            v.extend(
                [r.l, r.delta, r.eps, r.hn.total, r.hn.potential_part, r.hn.derivative_part, r.ags.total, r.gap, r.limit, r.rel_err]
                    .iter()
                    .map(|&x| fmt_f64(x)),
            );
            v
        }),
    );
    let mut run = Run::default();
    run.file("gamma_table.csv", table.clone());
    run.derived = schedule_json(s)?;
    run.stdout = table;
    Ok(run)
}

pub fn relax_cmd(s: &mut RelaxSettings) -> Result<Run, CliError> {
    let fixed = s.boundary == RelaxEdges::Fixed;
    let (left, right) = if fixed {
        (unit_chi(s.chi_left, "chi_left")?, unit_chi(s.chi_right, "chi_right")?)
    } else {
        (s.chi_left, s.chi_right)
    };
    // θ_v·ny = 2π, so the frozen columns wrap seamlessly in y
    let delta_source = match s.delta {
        Some(_) => "given",
        None if fixed && left[1] != 0.0 => {
            let sd = 2.0 * (PI / s.ny as f64).sin() / left[1].abs();
            s.delta = Some(sd * sd);
            "commensurate"
        }
        None => {
            s.delta = Some(0.1);
            "default"
        }
    };
    let delta = s.delta.expect("delta resolved above");
    let start = *s.start.get_or_insert(if fixed { StartKind::Sharp } else { StartKind::Random });
    let p = ModelParams::from_eps_delta(s.eps, delta)?;
    let boundary = if fixed { Boundary::PeriodicY } else { Boundary::Periodic };
    let grid = Grid::new(p.l(), s.nx, s.ny, boundary)?;
    let u0 = match start {
        StartKind::Sharp => {
            if !fixed {
                return Err(CliError::Config("a sharp start needs fixed edges".into()));
            }
            SpinField::from_lift(&fixed_angle_lift(grid, left, right, &p, s.theta0)?)?
        }
        StartKind::Random => random_spin_field(grid, s.seed)?,
        StartKind::Ferromagnet => SpinField::tabulate(grid, |_, _| [s.theta0.cos(), s.theta0.sin()])?,
    };
    let cfg = RelaxConfig {
        max_iters: s.max_iters,
        step: s.step,
        tol_grad: s.tol_grad,
        boundary: if fixed {
            RelaxBoundary::FixedAngles { left, right }
        } else {
            RelaxBoundary::Periodic
        },
        method: s.method(),
        seed: s.seed,
    };
    let out = relax(&u0, &p, &cfg)?;
    let trace = csv_table(
        &["iter", "energy", "grad_inf", "step"],
        out.trace
            .iter()
            .map(|t| vec![t.iter.to_string(), fmt_f64(t.energy), fmt_f64(t.grad_inf), fmt_f64(t.step)]),
    );
    let region = if fixed && s.nx > 8 {
        Some(IndexRect::new(4, s.nx - 4, 0, s.ny))
    } else {
        None
    };
    let hn = energy_hn(&out.spins, &p, region)?.total;
    let per_length = if fixed { Some(hn / (s.ny as f64 * p.l())) } else { None };
    let final_energy = out.trace.last().map(|t| t.energy).unwrap_or(f64::NAN);
    let mut meta = param_meta(&p);
    meta.extend([
        ("heuristic", out.heuristic.to_string()),
        ("converged", out.converged.to_string()),
        ("iterations", out.iterations.to_string()),
    ]);
    let mut run = Run::default();
    run.file("relax_trace.csv", trace);
    run.file("relax_field.csv", field_bytes(out.spins.field(), &meta)?);
    run.derived = json!({
        "params": params_json(&p),
        "delta_source": delta_source,
        "heuristic": out.heuristic,
        "converged": out.converged,
        "iterations": out.iterations,
        "final_energy_f": final_energy,
        "hn": hn,
        "hn_per_unit_length": per_length,
    });
    run.stdout = format!(
        "iterations,converged,F,Hn\n{},{},{},{}\n",
        out.iterations,
        out.converged,
        fmt_f64(final_energy),
        fmt_f64(hn)
    );
    Ok(run)
}

pub fn entropy_scan(s: &EntropyScanSettings) -> Result<Run, CliError> {
    if s.count < 2 {
        return Err(CliError::Config("count must be at least 2".into()));
    }
    if !(s.angle_min.is_finite() && s.angle_max.is_finite() && s.angle_min < s.angle_max) {
        return Err(CliError::Config("angle range must satisfy angle_min < angle_max".into()));
    }
    let (chi, derived) = match &s.field {
        Some(path) => {
            let f = load_field(path)?;
            let p = stored_params(&f, s.delta)?;
            let u = f.into_spins()?;
            let c = chirality(&u, &p)?.chi;
            (c, json!({ "source": path, "params": params_json(&p) }))
        }
        None => {
            let n = s.resolution;
            if n < 2 {
                return Err(CliError::Config("resolution must be at least 2".into()));
            }
            let l = 1.0 / n as f64;
            let wall = WallSettings { wall_angle: s.wall_angle, ..WallSettings::default() }.wall();
            let grid = Grid::new(l, n, n, Boundary::Open)?.with_origin([0, -(n as i64) / 2]);
            let c = VectorField::tabulate(grid, |i, j| {
                let x = grid.corner(i, j);
                wall.sharp([x[0] + 0.5 * l, x[1] + 0.5 * l])
            })?;
            let o = grid.corner(0, 0);
            let rect = Rect::new(o[0], o[0] + (n - 1) as f64 * l, o[1], o[1] + (n - 1) as f64 * l)?;
            let limit = limit_h_bv(&wall.bv_field(rect)?);
            (c, json!({ "source": "sharp_wall", "l": l, "limit_h": limit }))
        }
    };
    let step = (s.angle_max - s.angle_min) / (s.count - 1) as f64;
    let mut rows = Vec::with_capacity(s.count);
    for k in 0..s.count {
        let a = s.angle_min + step * k as f64;
        let prod = total_variation_production(&chi, &jin_kohn([a.cos(), a.sin()])?, None)?;
        rows.push(vec![fmt_f64(a), fmt_f64(prod)]);
    }
    let table = csv_table(&["angle", "production"], rows);
    let mut run = Run::default();
    run.file("entropy_scan.csv", table.clone());
    run.derived = derived;
    run.stdout = table;
    Ok(run)
}

pub fn diagnose_cmd(s: &DiagnoseSettings) -> Result<Run, CliError> {
    let path = s
        .field
        .as_ref()
        .ok_or_else(|| CliError::Config("diagnose needs a field file (--field)".into()))?;
    let f = load_field(path)?;
    let p = stored_params(&f, s.delta)?;
    let u = f.into_spins()?;
    let report = diagnose(&u, &p, s.threshold)?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    let mut run = Run::default();
    run.file("diagnose.json", text.clone());
    run.derived = json!({ "params": params_json(&p) });
    run.stdout = text;
    Ok(run)
}
