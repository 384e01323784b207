//! Conditioning of the matching systems and the velocity direction error
//! `η = arccos(v̂_des · v̂_re)/π` on real parts, averaged over disks.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldGrid, GridSpec, VelocityVector};
use crate::operators::OperatorCache;
use crate::reproduction::{singular_values, ArrayScenario};

/// Points whose real velocity norm falls below this fraction of the disk RMS
/// are left out of the mean.
pub const EXCLUSION_RATIO: f64 = 1e-12;

fn real_norm(v: &VelocityVector) -> f64 {
    v.real().iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Direction error between the real parts of two velocities, in `[0, 1]`.
/// `None` when either real part is the zero vector.
pub fn direction_error(desired: &VelocityVector, reproduced: &VelocityVector) -> Option<f64> {
    let nd = real_norm(desired);
    let nr = real_norm(reproduced);
    if nd == 0.0 || nr == 0.0 {
        return None;
    }
    let d = desired.real();
    let r = reproduced.real();
    let dot = (d[0] * r[0] + d[1] * r[1] + d[2] * r[2]) / (nd * nr);
    Some(dot.clamp(-1.0, 1.0).acos() / std::f64::consts::PI)
}

/// Mean direction error over one disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskError {
    pub radius: f64,
    pub mean: f64,
    pub included: usize,
    pub excluded: usize,
}

fn disk_rms(grid: &FieldGrid, inside: &[bool]) -> f64 {
    let (sum, n) = grid
        .samples
        .iter()
        .zip(inside)
        .filter(|(_, &i)| i)
        .fold((0.0, 0usize), |(s, n), (x, _)| {
            (s + real_norm(&x.velocity).powi(2), n + 1)
        });
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// Arithmetic mean of `η` over the grid points with `x² + y² <= radius²`.
pub fn mean_error_over_disk(
    desired: &FieldGrid,
    reproduced: &FieldGrid,
    radius: f64,
) -> Result<DiskError> {
    if desired.len() != reproduced.len()
        || desired
            .samples
            .iter()
            .zip(&reproduced.samples)
            .any(|(a, b)| a.position != b.position)
    {
        return Err(Error::ShapeMismatch {
            expected: "grids with identical sample points".into(),
            got: format!("{} and {} samples", desired.len(), reproduced.len()),
        });
    }
    let r2 = radius * radius * (1.0 + 1e-12);
    let inside: Vec<bool> = desired
        .samples
        .iter()
        .map(|s| s.position[0].powi(2) + s.position[1].powi(2) <= r2)
        .collect();
    let floor_des = EXCLUSION_RATIO * disk_rms(desired, &inside);
    let floor_re = EXCLUSION_RATIO * disk_rms(reproduced, &inside);

    let mut sum = 0.0;
    let mut included = 0;
    let mut excluded = 0;
    for ((d, r), _) in desired
        .samples
        .iter()
        .zip(&reproduced.samples)
        .zip(&inside)
        .filter(|(_, &i)| i)
    {
        let usable = real_norm(&d.velocity) > floor_des && real_norm(&r.velocity) > floor_re;
        match direction_error(&d.velocity, &r.velocity).filter(|_| usable) {
            Some(eta) => {
                sum += eta;
                included += 1;
            }
            None => excluded += 1,
        }
    }
    if included == 0 {
        return Err(Error::EmptyDisk { radius });
    }
    Ok(DiskError {
        radius,
        mean: sum / included as f64,
        included,
        excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionNumber {
    /// `σ_max / σ_min` over singular values above the rank tolerance.
    pub value: f64,
    pub rank: usize,
    /// Fewer significant singular values than `min(rows, cols)`.
    pub rank_deficient: bool,
}

pub fn condition_number(matrix: &DMatrix<Complex64>) -> Result<ConditionNumber> {
    let s = singular_values(matrix);
    let sigma_max = s.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return Err(Error::UndefinedConditioning);
    }
    let (rows, cols) = matrix.shape();
    let tol = rows.max(cols) as f64 * f64::EPSILON * sigma_max;
    let significant: Vec<f64> = s.iter().copied().filter(|&v| v > tol).collect();
    let sigma_min = *significant.last().expect("sigma_max is significant");
    Ok(ConditionNumber {
        value: sigma_max / sigma_min,
        rank: significant.len(),
        rank_deficient: significant.len() < rows.min(cols),
    })
}

/// One frequency of an error sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub frequency_hz: f64,
    pub cond_h: ConditionNumber,
    pub cond_g: ConditionNumber,
    pub eta_vm_full: DiskError,
    pub eta_pm_full: DiskError,
    pub eta_vm_inner: DiskError,
    pub eta_pm_inner: DiskError,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorSweep {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_HEADER: &str =
    "frequency_hz,cond_H,cond_G,eta_vm_r050,eta_pm_r050,eta_vm_r015,eta_pm_r015,excluded_counts";

impl ErrorSweep {
    /// `excluded_counts` lists the excluded points of the four means, separated
    /// by `;`, in column order.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{SWEEP_CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{};{};{};{}",
                r.frequency_hz,
                r.cond_h.value,
                r.cond_g.value,
                r.eta_vm_full.mean,
                r.eta_pm_full.mean,
                r.eta_vm_inner.mean,
                r.eta_pm_inner.mean,
                r.eta_vm_full.excluded,
                r.eta_pm_full.excluded,
                r.eta_vm_inner.excluded,
                r.eta_pm_inner.excluded,
            )?;
        }
        Ok(())
    }
}

/// `start, start + step, …` up to and including `stop`.
pub fn frequency_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if step.is_nan() || step <= 0.0 || stop < start {
        return Vec::new();
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// Errors and conditioning of both methods at one frequency.
pub fn sweep_row(
    scenario: &ArrayScenario,
    frequency_hz: f64,
    grid: &GridSpec,
    inner_radius: f64,
    cache: &OperatorCache,
) -> Result<SweepRow> {
    let solution = scenario.solve(frequency_hz, cache)?;
    let grids = scenario.reproduced_grids(&solution, grid, cache)?;
    let full = grid.mask_radius;
    Ok(SweepRow {
        frequency_hz,
        cond_h: condition_number(&solution.system.h)?,
        cond_g: condition_number(&solution.system.g)?,
        eta_vm_full: mean_error_over_disk(&grids.desired, &grids.velocity_method, full)?,
        eta_pm_full: mean_error_over_disk(&grids.desired, &grids.pressure_method, full)?,
        eta_vm_inner: mean_error_over_disk(&grids.desired, &grids.velocity_method, inner_radius)?,
        eta_pm_inner: mean_error_over_disk(&grids.desired, &grids.pressure_method, inner_radius)?,
    })
}

/// Sweeps `frequencies` in order; rows come back in the same order.
pub fn run_sweep(
    scenario: &ArrayScenario,
    frequencies: &[f64],
    grid: &GridSpec,
    inner_radius: f64,
    cache: &OperatorCache,
) -> Result<ErrorSweep> {
    use rayon::prelude::*;
    let rows = frequencies
        .par_iter()
        .map(|&f| sweep_row(scenario, f, grid, inner_radius, cache))
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorSweep { rows })
}
