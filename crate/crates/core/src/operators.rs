//! Frequency-independent operator matrices.
//!
//! `B1m(m)` maps the global pressure coefficients `α` (degree `L`) onto the
//! SH coefficients `γ₁ᵐ` (degree `L−1`) of the translated first-degree local
//! coefficient `β₁ᵐ(k, r_b)`. The velocity operators `B_x, B_y, B_z` fold in the
//! first-degree gradient weights and the `i/(ρ₀c)` factor, so that
//! `ζ_e = B_e · α` directly gives the region-wide velocity coefficients.
//!
//! Operators are cached on disk as a little-endian dump:
//!
//! ```text
//! magic   b"SHVOP"      5 bytes
//! version u8            currently 1
//! kind    u8            0,1,2 = order −1,0,+1; 3,4,5 = axis x,y,z
//! L       u32
//! rows    u32
//! cols    u32
//! data    rows·cols·(re f64, im f64), row-major
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::coupling::gaunt_g;
use crate::error::{Error, Result};
use crate::sh_basis::{sh_len, DegreeOrder, ShVector};

pub const CACHE_MAGIC: &[u8; 5] = b"SHVOP";
pub const CACHE_VERSION: u8 = 1;

/// Density and sound speed of the propagation medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumConstants {
    pub density: f64,
    pub sound_speed: f64,
}

impl MediumConstants {
    pub fn new(density: f64, sound_speed: f64) -> Result<Self> {
        if !(density > 0.0 && sound_speed > 0.0 && density.is_finite() && sound_speed.is_finite()) {
            return Err(Error::InvalidMedium {
                density,
                sound_speed,
            });
        }
        Ok(Self {
            density,
            sound_speed,
        })
    }

    /// `ρ₀c`
    pub fn impedance(&self) -> f64 {
        self.density * self.sound_speed
    }

    pub fn wavenumber(&self, frequency_hz: f64) -> f64 {
        2.0 * PI * frequency_hz / self.sound_speed
    }
}

impl Default for MediumConstants {
    /// Air at 20 °C.
    fn default() -> Self {
        Self {
            density: 1.2041,
            sound_speed: 343.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// What an operator maps to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// `B1m` for first-degree order `m ∈ {−1, 0, 1}`.
    Order(i8),
    Velocity(Axis),
}

impl OperatorKind {
    fn code(self) -> u8 {
        match self {
            OperatorKind::Order(m) => (m + 1) as u8,
            OperatorKind::Velocity(a) => 3 + a.index() as u8,
        }
    }

    fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0..=2 => OperatorKind::Order(code as i8 - 1),
            3 => OperatorKind::Velocity(Axis::X),
            4 => OperatorKind::Velocity(Axis::Y),
            5 => OperatorKind::Velocity(Axis::Z),
            _ => return None,
        })
    }
}

/// Dense `L² × (L+1)²` complex operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    kind: OperatorKind,
    max_degree: usize,
    matrix: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// Maximum degree `L` of the pressure coefficients it accepts.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Maximum degree `A = L − 1` of its output.
    pub fn output_degree(&self) -> usize {
        self.max_degree - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        let (rows, cols) = self.shape();
        w.write_all(CACHE_MAGIC).map_err(io)?;
        w.write_all(&[CACHE_VERSION, self.kind.code()])
            .map_err(io)?;
        for v in [self.max_degree, rows, cols] {
            w.write_all(&(v as u32).to_le_bytes()).map_err(io)?;
        }
        let mut buf = Vec::with_capacity(rows * cols * 16);
        for r in 0..rows {
            for c in 0..cols {
                let z = self.matrix[(r, c)];
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        w.write_all(&buf).map_err(io)
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        let mut head = [0u8; 7];
        r.read_exact(&mut head).map_err(io)?;
        if &head[..5] != CACHE_MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        if head[5] != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported version {}", head[5])));
        }
        let kind = OperatorKind::from_code(head[6])
            .ok_or_else(|| Error::Cache(format!("unknown operator kind {}", head[6])))?;
        let mut dims = [0usize; 3];
        for d in dims.iter_mut() {
            let mut b = [0u8; 4];
            r.read_exact(&mut b).map_err(io)?;
            *d = u32::from_le_bytes(b) as usize;
        }
        let [max_degree, rows, cols] = dims;
        if max_degree == 0 || rows != max_degree * max_degree || cols != sh_len(max_degree) {
            return Err(Error::Cache(format!(
                "inconsistent header: L = {max_degree}, {rows} x {cols}"
            )));
        }
        let mut data = vec![0u8; rows * cols * 16];
        r.read_exact(&mut data).map_err(io)?;
        let mut chunks = data.chunks_exact(8).map(|c| {
            let mut b = [0u8; 8];
            b.copy_from_slice(c);
            f64::from_le_bytes(b)
        });
        let mut matrix = DMatrix::from_element(rows, cols, Complex64::default());
        for rr in 0..rows {
            for cc in 0..cols {
                let re = chunks.next().unwrap_or_default();
                let im = chunks.next().unwrap_or_default();
                matrix[(rr, cc)] = Complex64::new(re, im);
            }
        }
        Ok(Self {
            kind,
            max_degree,
            matrix,
        })
    }
}

fn check_degree(max_degree: usize) -> Result<()> {
    if max_degree < 1 {
        return Err(Error::DegreeTooSmall {
            needed: 1,
            got: max_degree,
        });
    }
    Ok(())
}

/// Builds `B1m` for `m ∈ {−1, 0, 1}`:
/// entry `((a, d), (ℓ, q)) = G_{1m}^{ℓqa}` for `d = q − m`, `a ∈ {ℓ−1, ℓ+1}`, `a <= L−1`.
pub fn build_b1m(order: i8, max_degree: usize) -> Result<OperatorMatrix> {
    check_degree(max_degree)?;
    if !(-1..=1).contains(&order) {
        return Err(Error::InvalidOrder {
            degree: 1,
            order: order as isize,
        });
    }
    let out_degree = max_degree - 1;
    let rows = sh_len(out_degree);
    let cols = sh_len(max_degree);
    let m = order as i64;
    let mut matrix = DMatrix::from_element(rows, cols, Complex64::new(0.0, 0.0));
    for col in 0..cols {
        let DegreeOrder {
            degree: l,
            order: q,
        } = DegreeOrder::from_index(col);
        let (l, q) = (l as i64, q as i64);
        let d = q - m;
        for a in [l - 1, l + 1] {
            if a < 0 || a > out_degree as i64 || d.abs() > a {
                continue;
            }
            let row = (a * a + a + d) as usize;
            matrix[(row, col)] = gaunt_g(l, q, 1, m, a);
        }
    }
    Ok(OperatorMatrix {
        kind: OperatorKind::Order(order),
        max_degree,
        matrix,
    })
}

/// The three `B1m` operators, `m = −1, 0, 1`.
pub fn build_b1_all(max_degree: usize) -> Result<[OperatorMatrix; 3]> {
    Ok([
        build_b1m(-1, max_degree)?,
        build_b1m(0, max_degree)?,
        build_b1m(1, max_degree)?,
    ])
}

fn combine_velocity(
    axis: Axis,
    b1: &[OperatorMatrix; 3],
    medium: &MediumConstants,
) -> OperatorMatrix {
    let pre = Complex64::new(0.0, 1.0 / (3.0 * medium.impedance()));
    let c8 = (3.0 / (8.0 * PI)).sqrt();
    let c4 = (3.0 / (4.0 * PI)).sqrt();
    let i = Complex64::new(0.0, 1.0);
    let [bm, b0, bp] = b1;
    let matrix = match axis {
        Axis::X => (bm.matrix() - bp.matrix()) * (pre * c8),
        Axis::Y => (bm.matrix() + bp.matrix()) * (pre * (-i) * c8),
        Axis::Z => b0.matrix() * (pre * c4),
    };
    OperatorMatrix {
        kind: OperatorKind::Velocity(axis),
        max_degree: b0.max_degree,
        matrix,
    }
}

/// Builds the velocity operator `B_e` for one Cartesian axis.
pub fn build_velocity_operator(
    axis: Axis,
    max_degree: usize,
    medium: &MediumConstants,
) -> Result<OperatorMatrix> {
    let b1 = build_b1_all(max_degree)?;
    Ok(combine_velocity(axis, &b1, medium))
}

/// `op · alpha`, returning an `ShVector` of degree `L − 1`.
pub fn apply_operator(op: &OperatorMatrix, alpha: &ShVector) -> Result<ShVector> {
    let (rows, cols) = op.shape();
    if alpha.len() != cols {
        return Err(Error::ShapeMismatch {
            expected: format!("{cols} coefficients (degree {})", op.max_degree),
            got: format!("{} coefficients", alpha.len()),
        });
    }
    let m = op.matrix();
    let a = alpha.as_slice();
    let out = (0..rows)
        .map(|r| (0..cols).map(|c| m[(r, c)] * a[c]).sum())
        .collect();
    ShVector::from_coeffs(op.output_degree(), out)
}

/// `B_x, B_y, B_z` for one truncation degree and medium.
#[derive(Debug, Clone)]
pub struct VelocityOperators {
    ops: [OperatorMatrix; 3],
    medium: MediumConstants,
}

impl VelocityOperators {
    pub fn build(max_degree: usize, medium: MediumConstants) -> Result<Self> {
        let b1 = build_b1_all(max_degree)?;
        let ops = Axis::ALL.map(|axis| combine_velocity(axis, &b1, &medium));
        Ok(Self { ops, medium })
    }

    pub fn max_degree(&self) -> usize {
        self.ops[0].max_degree
    }

    pub fn medium(&self) -> &MediumConstants {
        &self.medium
    }

    pub fn get(&self, axis: Axis) -> &OperatorMatrix {
        &self.ops[axis.index()]
    }

    /// `[ζ_x, ζ_y, ζ_z]` for the pressure coefficients `alpha`.
    pub fn apply(&self, alpha: &ShVector) -> Result<[ShVector; 3]> {
        Ok([
            apply_operator(&self.ops[0], alpha)?,
            apply_operator(&self.ops[1], alpha)?,
            apply_operator(&self.ops[2], alpha)?,
        ])
    }
}

/// Velocity operators keyed by truncation degree, built on first use.
#[derive(Debug)]
pub struct OperatorCache {
    medium: MediumConstants,
    built: Mutex<HashMap<usize, Arc<VelocityOperators>>>,
}

impl OperatorCache {
    pub fn new(medium: MediumConstants) -> Self {
        Self {
            medium,
            built: Mutex::new(HashMap::new()),
        }
    }

    pub fn medium(&self) -> &MediumConstants {
        &self.medium
    }

    pub fn get(&self, max_degree: usize) -> Result<Arc<VelocityOperators>> {
        if let Some(ops) = self
            .built
            .lock()
            .expect("operator cache poisoned")
            .get(&max_degree)
        {
            return Ok(Arc::clone(ops));
        }
        let ops = Arc::new(VelocityOperators::build(max_degree, self.medium)?);
        self.built
            .lock()
            .expect("operator cache poisoned")
            .entry(max_degree)
            .or_insert_with(|| Arc::clone(&ops));
        Ok(ops)
    }
}
