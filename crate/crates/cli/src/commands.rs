//! The `field`, `reproduce` and `sweep` subcommands.

use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::{json, Value};
use shvel::field::sample_plane;
use shvel::metrics::{condition_number, mean_error_over_disk, run_sweep, DiskError};
use shvel::operators::OperatorCache;
use shvel::reproduction::{write_weights_csv, FrequencySolution, ReproducedGrids};
use shvel::{FieldGrid, GridSpec, ShVector, SoundField, VelocityOperators};

use crate::error::CliError;
use crate::output::OutputDir;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Field,
    Reproduce,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Field => "field",
            Command::Reproduce => "reproduce",
            Command::Sweep => "sweep",
        }
    }
}

/// Runs `command` and returns the files written, in write order.
pub fn run(command: Command, scenario: &Scenario) -> Result<Vec<PathBuf>, CliError> {
    let mut out = OutputDir::create(&scenario.output_dir, command.name(), &scenario.sha256)?;
    match command {
        Command::Field => cmd_field(scenario, &mut out)?,
        Command::Reproduce => cmd_reproduce(scenario, &mut out)?,
        Command::Sweep => cmd_sweep(scenario, &mut out)?,
    }
    Ok(out.into_written())
}

fn label(frequency_hz: f64) -> String {
    format!("{frequency_hz}Hz")
}

fn grid_json(grid: &GridSpec, points: usize) -> Value {
    json!({
        "spacing": grid.spacing,
        "mask_radius": grid.mask_radius,
        "z": grid.z,
        "points": points,
        "reconstructed_spacing": grid.spacing == GridSpec::DEFAULT_SPACING,
    })
}

fn common_json(s: &Scenario) -> Value {
    json!({
        "medium": { "density": s.medium.density, "sound_speed": s.medium.sound_speed },
        "region_radius": s.region_radius,
        "frequencies": s.frequencies,
    })
}

fn file_names(out: &OutputDir) -> Vec<String> {
    out.written()
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect()
}

fn write_field(out: &mut OutputDir, name: &str, grid: &FieldGrid) -> Result<(), CliError> {
    out.csv(name, |w| grid.write_csv(w))
}

pub fn cmd_field(s: &Scenario, out: &mut OutputDir) -> Result<(), CliError> {
    let sources = s.require_sources()?;
    let frequencies = s.require_frequencies()?;
    for src in sources {
        src.check_outside(s.region_radius)?;
    }
    let validity = sources
        .iter()
        .map(|x| x.validity_radius())
        .fold(f64::INFINITY, f64::min);
    let l = s.max_degree;
    let ops = VelocityOperators::build(l, s.medium)?;

    let grids = frequencies
        .par_iter()
        .map(|&f| {
            let k = s.medium.wavenumber(f);
            let mut alpha = ShVector::zeros(l);
            for src in sources {
                let a = src.coeffs(k, l)?;
                for i in 0..alpha.len() {
                    alpha[i] += a[i];
                }
            }
            let field = SoundField::new(alpha, k, &ops, s.region_radius, validity)?;
            sample_plane(&field, &s.grid)
        })
        .collect::<shvel::Result<Vec<_>>>()?;

    let points = grids.first().map_or(0, FieldGrid::len);
    for (f, grid) in frequencies.iter().zip(&grids) {
        write_field(out, &format!("field_{}.csv", label(*f)), grid)?;
    }
    let mut meta = common_json(s);
    meta["degrees"] = json!({ "pressure": l, "velocity": l - 1 });
    meta["grid"] = grid_json(&s.grid, points);
    meta["sources"] = json!(sources.len());
    meta["files"] = json!(file_names(out));
    out.json("run.json", meta)
}

struct Reproduced {
    solution: FrequencySolution,
    grids: ReproducedGrids,
    eval_degree: usize,
    errors: Vec<(&'static str, DiskError)>,
}

pub fn cmd_reproduce(s: &Scenario, out: &mut OutputDir) -> Result<(), CliError> {
    let sc = s.array_scenario()?;
    let frequencies = s.require_frequencies()?;
    let cache = OperatorCache::new(s.medium);
    let mask = s.grid.mask_radius;

    let results = frequencies
        .par_iter()
        .map(|&f| {
            let solution = sc.solve(f, &cache)?;
            let grids = sc.reproduced_grids(&solution, &s.grid, &cache)?;
            let mut errors = vec![
                (
                    "vm_full",
                    mean_error_over_disk(&grids.desired, &grids.velocity_method, mask)?,
                ),
                (
                    "pm_full",
                    mean_error_over_disk(&grids.desired, &grids.pressure_method, mask)?,
                ),
            ];
            if s.inner_radius < mask {
                let r = s.inner_radius;
                errors.push((
                    "vm_inner",
                    mean_error_over_disk(&grids.desired, &grids.velocity_method, r)?,
                ));
                errors.push((
                    "pm_inner",
                    mean_error_over_disk(&grids.desired, &grids.pressure_method, r)?,
                ));
            }
            Ok(Reproduced {
                eval_degree: sc.eval_degree(solution.k),
                solution,
                grids,
                errors,
            })
        })
        .collect::<shvel::Result<Vec<_>>>()?;

    out.csv("weights_vm.csv", |w| {
        write_weights_csv(results.iter().map(|r| &r.solution.velocity_method), w)
    })?;
    out.csv("weights_pm.csv", |w| {
        write_weights_csv(results.iter().map(|r| &r.solution.pressure_method), w)
    })?;
    let mut per_frequency = Vec::new();
    for r in &results {
        let f = r.solution.frequency_hz;
        write_field(out, &format!("desired_{}.csv", label(f)), &r.grids.desired)?;
        write_field(
            out,
            &format!("vm_{}.csv", label(f)),
            &r.grids.velocity_method,
        )?;
        write_field(
            out,
            &format!("pm_{}.csv", label(f)),
            &r.grids.pressure_method,
        )?;
        let cond_h = condition_number(&r.solution.system.h)?;
        let cond_g = condition_number(&r.solution.system.g)?;
        let mut eta = serde_json::Map::new();
        for (name, e) in &r.errors {
            eta.insert(
                name.to_string(),
                json!({ "radius": e.radius, "mean": e.mean, "included": e.included, "excluded": e.excluded }),
            );
        }
        per_frequency.push(json!({
            "frequency_hz": f,
            "evaluation_degree": r.eval_degree,
            "cond_H": cond_h.value,
            "cond_G": cond_g.value,
            "H_rank_deficient": cond_h.rank_deficient,
            "G_rank_deficient": cond_g.rank_deficient,
            "eta": eta,
        }));
    }
    let points = results.first().map_or(0, |r| r.grids.desired.len());
    let mut meta = common_json(s);
    meta["degrees"] = json!({ "matching": s.max_degree, "velocity": s.max_degree - 1, "evaluation_margin": s.eval_margin });
    meta["loudspeakers"] = json!(sc.array.len());
    meta["H_shape"] = json!([3 * s.max_degree * s.max_degree, sc.array.len()]);
    meta["G_shape"] = json!([(s.max_degree + 1) * (s.max_degree + 1), sc.array.len()]);
    meta["grid"] = grid_json(&s.grid, points);
    meta["per_frequency"] = Value::Array(per_frequency);
    meta["files"] = json!(file_names(out));
    out.json("run.json", meta)
}

pub fn cmd_sweep(s: &Scenario, out: &mut OutputDir) -> Result<(), CliError> {
    let sc = s.array_scenario()?;
    let frequencies = s.require_frequencies()?;
    if s.inner_radius > s.grid.mask_radius {
        return Err(CliError::validation(
            "grid.inner_radius",
            format!(
                "{} m exceeds the grid radius {} m",
                s.inner_radius, s.grid.mask_radius
            ),
        ));
    }
    let cache = OperatorCache::new(s.medium);
    let sweep = run_sweep(&sc, frequencies, &s.grid, s.inner_radius, &cache)?;
    out.csv("sweep.csv", |w| sweep.write_csv(w))?;

    let inner = GridSpec {
        mask_radius: s.inner_radius,
        ..s.grid
    };
    let mut meta = common_json(s);
    meta["degrees"] = json!({ "matching": s.max_degree, "velocity": s.max_degree - 1, "evaluation_margin": s.eval_margin });
    meta["grid"] = grid_json(&s.grid, s.grid.points().len());
    meta["inner_grid"] = grid_json(&inner, inner.points().len());
    meta["files"] = json!(file_names(out));
    out.json("run.json", meta)
}
