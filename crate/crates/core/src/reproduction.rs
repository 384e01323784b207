//! Velocity-matching and pressure-matching loudspeaker weights.
//!
//! For each wavenumber the velocity system stacks `[ζ_x; ζ_y; ζ_z]` of every
//! unit-gain loudspeaker as the columns of `H` (`3L² × S`), and the pressure
//! system stacks the loudspeakers' global coefficients as the columns of `G`
//! (`(L+1)² × S`). Both are solved with the same SVD pseudoinverse.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{sample_plane, FieldGrid, GridSpec, SoundField};
use crate::operators::{MediumConstants, OperatorCache, VelocityOperators};
use crate::sh_basis::ShVector;
use crate::sources::{LoudspeakerArray, SourceSpec};

/// Singular-value cut-off for the pseudoinverse, relative to `σ_max`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PinvTolerance {
    /// `max(rows, cols) · ε`
    #[default]
    Default,
    Relative(f64),
}

impl PinvTolerance {
    pub fn relative(&self, rows: usize, cols: usize) -> f64 {
        match *self {
            PinvTolerance::Default => rows.max(cols) as f64 * f64::EPSILON,
            PinvTolerance::Relative(t) => t,
        }
    }
}

/// Loudspeaker driving functions at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub frequency_hz: f64,
    pub w: DVector<Complex64>,
}

pub const WEIGHTS_CSV_HEADER: &str = "frequency_hz,speaker_index,re_w,im_w";

/// One row per frequency and loudspeaker, in the order given.
pub fn write_weights_csv<'a>(
    weights: impl IntoIterator<Item = &'a Weights>,
    mut w: impl std::io::Write,
) -> std::io::Result<()> {
    writeln!(w, "{WEIGHTS_CSV_HEADER}")?;
    for set in weights {
        for (s, x) in set.w.iter().enumerate() {
            writeln!(w, "{},{s},{:.17e},{:.17e}", set.frequency_hz, x.re, x.im)?;
        }
    }
    Ok(())
}

fn stack_columns(columns: Vec<Vec<Complex64>>) -> DMatrix<Complex64> {
    let rows = columns.first().map_or(0, Vec::len);
    let cols = columns.len();
    let flat: Vec<Complex64> = columns.into_iter().flatten().collect();
    DMatrix::from_column_slice(rows, cols, &flat)
}

/// Stacked velocity coefficients `[ζ_x; ζ_y; ζ_z]` of one pressure field.
pub fn stacked_zeta(ops: &VelocityOperators, alpha: &ShVector) -> Result<Vec<Complex64>> {
    let [x, y, z] = ops.apply(alpha)?;
    Ok(x.into_vec()
        .into_iter()
        .chain(y.into_vec())
        .chain(z.into_vec())
        .collect())
}

/// `H(k)`: column `s` is the stacked velocity coefficients of loudspeaker `s`.
pub fn build_h(
    array: &LoudspeakerArray,
    ops: &VelocityOperators,
    k: f64,
    region_radius: f64,
) -> Result<DMatrix<Complex64>> {
    array.check_outside(region_radius)?;
    let degree = ops.max_degree();
    let columns = array
        .sources()
        .map(|s| stacked_zeta(ops, &s.coeffs(k, degree)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(stack_columns(columns))
}

/// `G(k)`: column `s` is the global pressure coefficients of loudspeaker `s`.
pub fn build_g(
    array: &LoudspeakerArray,
    max_degree: usize,
    k: f64,
    region_radius: f64,
) -> Result<DMatrix<Complex64>> {
    array.check_outside(region_radius)?;
    let columns = array
        .sources()
        .map(|s| s.coeffs(k, max_degree).map(ShVector::into_vec))
        .collect::<Result<Vec<_>>>()?;
    Ok(stack_columns(columns))
}

/// Singular values in descending order.
pub fn singular_values(matrix: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = matrix.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Minimum-norm least-squares solution `A⁺ b` through the SVD, discarding
/// singular values below `tol · σ_max`.
pub fn solve_weights(
    matrix: &DMatrix<Complex64>,
    desired: &DVector<Complex64>,
    tolerance: PinvTolerance,
) -> Result<DVector<Complex64>> {
    let (rows, cols) = matrix.shape();
    if desired.len() != rows {
        return Err(Error::ShapeMismatch {
            expected: format!("desired vector of length {rows}"),
            got: format!("{}", desired.len()),
        });
    }
    if rows == 0 || cols == 0 || matrix.iter().all(|z| z.norm() == 0.0) {
        return Ok(DVector::zeros(cols));
    }
    let svd = matrix.clone().svd(true, true);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = tolerance.relative(rows, cols) * sigma_max;

    // w = V Σ⁺ Uᴴ b
    let mut projected = u.adjoint() * desired;
    for (c, s) in projected.iter_mut().zip(svd.singular_values.iter()) {
        *c = if *s > cutoff {
            *c / *s
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    Ok(v_t.adjoint() * projected)
}

/// Matching systems and desired vectors at one wavenumber.
#[derive(Debug, Clone)]
pub struct ReproductionSystem {
    pub k: f64,
    pub h: DMatrix<Complex64>,
    pub g: DMatrix<Complex64>,
    pub zeta_desired: DVector<Complex64>,
    pub alpha_desired: DVector<Complex64>,
}

impl ReproductionSystem {
    pub fn velocity_weights(&self, tolerance: PinvTolerance) -> Result<DVector<Complex64>> {
        solve_weights(&self.h, &self.zeta_desired, tolerance)
    }

    pub fn pressure_weights(&self, tolerance: PinvTolerance) -> Result<DVector<Complex64>> {
        solve_weights(&self.g, &self.alpha_desired, tolerance)
    }
}

/// Global coefficients of the superposition `Σ_s w_s · (loudspeaker s)`.
pub fn superposed_coeffs(
    array: &LoudspeakerArray,
    weights: &DVector<Complex64>,
    k: f64,
    max_degree: usize,
) -> Result<ShVector> {
    if weights.len() != array.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} weights", array.len()),
            got: format!("{}", weights.len()),
        });
    }
    let mut total = ShVector::zeros(max_degree);
    for (source, w) in array.sources().zip(weights.iter()) {
        let alpha = source.coeffs(k, max_degree)?;
        for i in 0..total.len() {
            total[i] += w * alpha[i];
        }
    }
    Ok(total)
}

/// The reproduced field as a `SoundField` expanded to the degree of `ops`.
pub fn reproduced_field(
    array: &LoudspeakerArray,
    weights: &DVector<Complex64>,
    k: f64,
    ops: &VelocityOperators,
    region_radius: f64,
) -> Result<SoundField> {
    let alpha = superposed_coeffs(array, weights, k, ops.max_degree())?;
    SoundField::new(alpha, k, ops, region_radius, array.min_radius())
}

/// Reproduced pressure and velocity on `grid`.
pub fn reproduce_field(
    array: &LoudspeakerArray,
    weights: &DVector<Complex64>,
    k: f64,
    ops: &VelocityOperators,
    grid: &GridSpec,
) -> Result<FieldGrid> {
    let field = reproduced_field(array, weights, k, ops, grid.mask_radius)?;
    sample_plane(&field, grid)
}

/// A loudspeaker array reproducing one desired source over a spherical region.
#[derive(Debug, Clone)]
pub struct ArrayScenario {
    pub array: LoudspeakerArray,
    pub desired: SourceSpec,
    pub region_radius: f64,
    /// Truncation `L` of the matching systems.
    pub max_degree: usize,
    pub medium: MediumConstants,
    pub tolerance: PinvTolerance,
    /// Extra degrees above `⌈k·R⌉` used when evaluating fields on the grid.
    pub eval_margin: usize,
}

/// Weights of both methods at one frequency.
#[derive(Debug, Clone)]
pub struct FrequencySolution {
    pub frequency_hz: f64,
    pub k: f64,
    pub system: ReproductionSystem,
    pub velocity_method: Weights,
    pub pressure_method: Weights,
}

/// Desired and reproduced fields of both methods, all on the same grid.
#[derive(Debug, Clone)]
pub struct ReproducedGrids {
    pub desired: FieldGrid,
    pub velocity_method: FieldGrid,
    pub pressure_method: FieldGrid,
}

impl ArrayScenario {
    /// Five loudspeakers on a 1.21 m circle at azimuths 0, π/4, 3π/4, 5π/4,
    /// 7π/4, a 0.5 m listening region, `L = 4`, and a plane wave from (π/2, π/3).
    pub fn five_speaker_reference() -> Self {
        use std::f64::consts::PI;
        let azimuths = [
            0.0,
            PI / 4.0,
            3.0 * PI / 4.0,
            5.0 * PI / 4.0,
            7.0 * PI / 4.0,
        ];
        Self {
            array: LoudspeakerArray::horizontal_circle(1.21, &azimuths)
                .expect("valid reference array"),
            desired: SourceSpec::plane_wave(PI / 2.0, PI / 3.0),
            region_radius: 0.5,
            max_degree: 4,
            medium: MediumConstants::default(),
            tolerance: PinvTolerance::Default,
            eval_margin: 12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_degree < 1 {
            return Err(Error::DegreeTooSmall {
                needed: 1,
                got: self.max_degree,
            });
        }
        if self.region_radius.is_nan() || self.region_radius <= 0.0 {
            return Err(Error::Domain(format!(
                "region radius must be > 0, got {}",
                self.region_radius
            )));
        }
        self.array.check_outside(self.region_radius)?;
        self.desired.check_outside(self.region_radius)
    }

    /// Truncation used to evaluate fields over the region at wavenumber `k`.
    pub fn eval_degree(&self, k: f64) -> usize {
        (k * self.region_radius).ceil() as usize + self.eval_margin
    }

    pub fn system(&self, k: f64, ops: &VelocityOperators) -> Result<ReproductionSystem> {
        self.validate()?;
        if ops.max_degree() != self.max_degree {
            return Err(Error::ShapeMismatch {
                expected: format!("operators of degree {}", self.max_degree),
                got: format!("degree {}", ops.max_degree()),
            });
        }
        let alpha_des = self.desired.coeffs(k, self.max_degree)?;
        let zeta_des = stacked_zeta(ops, &alpha_des)?;
        Ok(ReproductionSystem {
            k,
            h: build_h(&self.array, ops, k, self.region_radius)?,
            g: build_g(&self.array, self.max_degree, k, self.region_radius)?,
            zeta_desired: DVector::from_vec(zeta_des),
            alpha_desired: DVector::from_vec(alpha_des.into_vec()),
        })
    }

    pub fn solve(&self, frequency_hz: f64, cache: &OperatorCache) -> Result<FrequencySolution> {
        let k = self.medium.wavenumber(frequency_hz);
        let ops = cache.get(self.max_degree)?;
        let system = self.system(k, &ops)?;
        let velocity_method = Weights {
            frequency_hz,
            w: system.velocity_weights(self.tolerance)?,
        };
        let pressure_method = Weights {
            frequency_hz,
            w: system.pressure_weights(self.tolerance)?,
        };
        Ok(FrequencySolution {
            frequency_hz,
            k,
            system,
            velocity_method,
            pressure_method,
        })
    }

    /// The desired field expanded to `ops`' degree.
    pub fn desired_field(&self, k: f64, ops: &VelocityOperators) -> Result<SoundField> {
        let alpha = self.desired.coeffs(k, ops.max_degree())?;
        SoundField::new(
            alpha,
            k,
            ops,
            self.region_radius,
            self.desired.validity_radius(),
        )
    }

    /// Samples desired and both reproduced fields on `grid`.
    pub fn reproduced_grids(
        &self,
        solution: &FrequencySolution,
        grid: &GridSpec,
        cache: &OperatorCache,
    ) -> Result<ReproducedGrids> {
        let k = solution.k;
        let ops = cache.get(self.eval_degree(k))?;
        Ok(ReproducedGrids {
            desired: sample_plane(&self.desired_field(k, &ops)?, grid)?,
            velocity_method: reproduce_field(
                &self.array,
                &solution.velocity_method.w,
                k,
                &ops,
                grid,
            )?,
            pressure_method: reproduce_field(
                &self.array,
                &solution.pressure_method.w,
                k,
                &ops,
                grid,
            )?,
        })
    }
}
