//! A-priori estimates checked on concrete fields: large-angle counts, curl
//! decay and quantization, Lᵖ bounds and the `H_n`/`H_n*` comparison.
//! Constants are reported, never asserted.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{curl_d, IndexRect, Reach, VectorField};
use crate::spin_energy::{
    ad, chirality, energy_f, energy_hn, energy_hn_star, region_rect, wd, ChiralityFields, EnergyRecord, ModelParams,
    SpinField,
};
use crate::sum::tree_sum;

/// Cells of the chirality valid set with `|θ^hor| > t` or `|θ^ver| > t`.
pub fn count_large_angle_cells(u: &SpinField, p: &ModelParams, t: f64) -> Result<usize> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("threshold must lie in (0, pi), got {t}")));
    }
    let chi = chirality(u, p)?;
    Ok(count_in(&chi, t))
}

fn count_in(chi: &ChiralityFields, t: f64) -> usize {
    let rect = chi.theta_hor.rect().intersect(&chi.theta_ver.rect());
    rect.cells()
        .filter(|&(i, j)| {
            let h = chi.theta_hor.get(i as isize, j as isize).unwrap_or(0.0);
            let v = chi.theta_ver.get(i as isize, j as isize).unwrap_or(0.0);
            h.abs() > t || v.abs() > t
        })
        .count()
}

/// `l²Σ|curl^d χ̄|` over the region.
pub fn curl_l1(chi_bar: &VectorField, region: Option<IndexRect>) -> Result<f64> {
    let c = curl_d(chi_bar)?;
    let rect = region_rect(c.rect(), region)?;
    let l = chi_bar.grid().spacing();
    let vals: Vec<f64> = rect.cells().map(|(i, j)| c.get(i as isize, j as isize).unwrap().abs()).collect();
    Ok(l * l * tree_sum(&vals))
}

/// `(l²Σ|χ|ᵖ)^{1/p}` for `p ∈ {2, 4, 6}`.
pub fn lp_norm(chi: &VectorField, p: u32, region: Option<IndexRect>) -> Result<f64> {
    if !matches!(p, 2 | 4 | 6) {
        return Err(Error::Parameter(format!("exponent must be 2, 4 or 6, got {p}")));
    }
    let rect = region_rect(chi.rect(), region)?;
    let l = chi.grid().spacing();
    let vals: Vec<f64> = rect
        .cells()
        .map(|(i, j)| {
            let v = chi.get(i as isize, j as isize).unwrap();
            (v[0] * v[0] + v[1] * v[1]).powi(p as i32 / 2)
        })
        .collect();
    Ok((l * l * tree_sum(&vals)).powf(1.0 / p as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HnComparison {
    pub hn: EnergyRecord,
    pub hn_star: EnergyRecord,
    /// `H_n*/H_n`, absent when `H_n = 0`.
    pub ratio: Option<f64>,
}

/// Minimum distance in cells between the inner region and the edge of the valid set.
pub const INNER_MARGIN: usize = 2;

pub fn hn_vs_hnstar(u: &SpinField, p: &ModelParams, inner: IndexRect) -> Result<HnComparison> {
    let chi = chirality(u, p)?;
    let valid = wd(&chi)?
        .rect()
        .intersect(&ad(&chi)?.rect())
        .intersect(&u.grid().valid_rect(chi.chi.rect(), Reach::new(0, 1, 0, 1)));
    let m = INNER_MARGIN;
    if !u.grid().valid_rect(valid, Reach::new(m, m, m, m)).contains_rect(&inner) || inner.is_empty() {
        return Err(Error::Domain(format!(
            "inner region {inner:?} is not {m} cells inside the valid set {valid:?}"
        )));
    }
    let hn = energy_hn(u, p, Some(inner))?;
    let hn_star = energy_hn_star(u, p, Some(inner))?;
    Ok(HnComparison {
        hn,
        hn_star,
        ratio: (hn.total > 0.0).then(|| hn_star.total / hn.total),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantaCounts {
    pub minus: usize,
    pub zero: usize,
    pub plus: usize,
    /// Plaquettes at other multiples of `2π`.
    pub other: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurlQuantization {
    /// Largest distance of `l√δ curl^d χ̄` from `2πℤ`.
    pub max_deviation: f64,
    pub counts: QuantaCounts,
}

pub fn curl_quantization(chi_bar: &VectorField, p: &ModelParams) -> Result<CurlQuantization> {
    let s = p.l() * p.delta().sqrt();
    let c = curl_d(chi_bar)?;
    let mut counts = QuantaCounts {
        minus: 0,
        zero: 0,
        plus: 0,
        other: 0,
    };
    let mut max_deviation: f64 = 0.0;
    for &v in c.values() {
        let q = s * v / (2.0 * PI);
        let k = q.round();
        max_deviation = max_deviation.max((q - k).abs() * 2.0 * PI);
        match k as i64 {
            -1 => counts.minus += 1,
            0 => counts.zero += 1,
            1 => counts.plus += 1,
            _ => counts.other += 1,
        }
    }
    Ok(CurlQuantization { max_deviation, counts })
}

/// Largest `|χ − χ̄|/((δ/24)|χ̄|³)` and `|χ̃|/|χ|` over cells with `χ̄ ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseBounds {
    pub chi_vs_chi_bar: f64,
    pub chi_tilde_vs_chi: f64,
}

pub fn pointwise_bounds(chi: &ChiralityFields) -> PointwiseBounds {
    let mut a: f64 = 0.0;
    let mut b: f64 = 0.0;
    for ((c, t), bar) in chi.chi.values().iter().zip(chi.chi_tilde.values()).zip(chi.chi_bar.values()) {
        for k in 0..2 {
            let nb = bar[k].abs();
            if nb > 0.0 {
                a = a.max((c[k] - bar[k]).abs() / (chi.delta / 24.0 * nb.powi(3)));
            }
            if c[k] != 0.0 {
                b = b.max(t[k].abs() / c[k].abs());
            }
        }
    }
    PointwiseBounds {
        chi_vs_chi_bar: a,
        chi_tilde_vs_chi: b,
    }
}

/// All checks on one stored field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub nx: usize,
    pub ny: usize,
    pub l: f64,
    pub delta: f64,
    pub eps: f64,
    pub energy_f: f64,
    pub hn: EnergyRecord,
    pub hn_star: Option<HnComparison>,
    pub threshold: f64,
    pub large_angle_cells: usize,
    /// `count·l/δ^{3/2}`
    pub counting_constant: f64,
    pub curl_l1: f64,
    /// `curl_l1/δ`
    pub curl_constant: f64,
    pub curl_quantization: CurlQuantization,
    pub chi_l2: f64,
    pub chi_l4: f64,
    pub chi_l6: f64,
    pub pointwise: PointwiseBounds,
}

pub fn diagnose(u: &SpinField, p: &ModelParams, threshold: f64) -> Result<DiagnosticReport> {
    p.require_critical()?;
    let g = *u.grid();
    let chi = chirality(u, p)?;
    let delta = p.delta();
    let count = count_large_angle_cells(u, p, threshold)?;
    let curl = curl_l1(&chi.chi_bar, None)?;
    let m = INNER_MARGIN + 1;
    let inner = Some(g.valid_rect(g.full_rect(), Reach::new(m, m + 1, m, m + 1))).filter(|r| !r.is_empty());
    let hn_star = match inner {
        Some(r) => Some(hn_vs_hnstar(u, p, r)?),
        None => None,
    };
    Ok(DiagnosticReport {
        nx: g.nx(),
        ny: g.ny(),
        l: p.l(),
        delta,
        eps: p.eps(),
        energy_f: energy_f(u, p),
        hn: energy_hn(u, p, None)?,
        hn_star,
        threshold,
        large_angle_cells: count,
        counting_constant: count as f64 * p.l() / delta.powf(1.5),
        curl_l1: curl,
        curl_constant: curl / delta,
        curl_quantization: curl_quantization(&chi.chi_bar, p)?,
        chi_l2: lp_norm(&chi.chi, 2, None)?,
        chi_l4: lp_norm(&chi.chi, 4, None)?,
        chi_l6: lp_norm(&chi.chi, 6, None)?,
        pointwise: pointwise_bounds(&chi),
    })
}
