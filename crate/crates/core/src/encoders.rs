//! Classical-to-quantum encodings as state-preparation fragments.
//!
//! A register given as `[q_lo, q_hi]` stores local index `b_lo + 2 b_hi`,
//! matching the global little-endian convention.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::sim::GateOp;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EncodingMethod {
    Basis,
    Rotation,
    Amplitude,
}

impl EncodingMethod {
    pub const ALL: [EncodingMethod; 3] = [
        EncodingMethod::Basis,
        EncodingMethod::Rotation,
        EncodingMethod::Amplitude,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EncodingMethod::Basis => "basis",
            EncodingMethod::Rotation => "rotation",
            EncodingMethod::Amplitude => "amplitude",
        }
    }
}

impl fmt::Display for EncodingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EncodingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "basis" => Ok(EncodingMethod::Basis),
            "rotation" | "angle" => Ok(EncodingMethod::Rotation),
            "amplitude" => Ok(EncodingMethod::Amplitude),
            other => Err(Error::Config(format!("unknown encoding method '{other}'"))),
        }
    }
}

/// One classical sample ready for loading onto the two data qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EncodedInput {
    /// Integer stored as a computational basis state.
    Basis(u32),
    /// Angles in radians: RY/RZ on the low qubit, then RY/RZ on the high one.
    Rotation([f64; 4]),
    /// Unnormalized real amplitudes for the four register basis states.
    Amplitude([f64; 4]),
}

impl EncodedInput {
    pub fn method(&self) -> EncodingMethod {
        match self {
            EncodedInput::Basis(_) => EncodingMethod::Basis,
            EncodedInput::Rotation(_) => EncodingMethod::Rotation,
            EncodedInput::Amplitude(_) => EncodingMethod::Amplitude,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EncodedInput::Basis(v) if *v > 3 => Err(Error::Encoding(format!(
                "basis value {v} does not fit on two qubits"
            ))),
            EncodedInput::Rotation(a) => {
                if a.iter().all(|t| t.is_finite() && (0.0..=TAU).contains(t)) {
                    Ok(())
                } else {
                    Err(Error::Encoding(format!("rotation angles {a:?} outside [0, 2π]")))
                }
            }
            EncodedInput::Amplitude(x) => l2_norm(x).map(|_| ()),
            EncodedInput::Basis(_) => Ok(()),
        }
    }

    /// State-preparation gates on `qubits = [q_lo, q_hi]`.
    pub fn fragment(&self, qubits: [usize; 2]) -> Result<Vec<GateOp>> {
        self.validate()?;
        match self {
            EncodedInput::Basis(v) => basis_encode(u64::from(*v), &qubits),
            EncodedInput::Rotation(a) => rotation_encode(a, qubits),
            EncodedInput::Amplitude(x) => amplitude_encode(x, qubits),
        }
    }
}

/// X gates on every qubit whose binary digit of `value` is 1; `qubits[0]`
/// holds the least significant digit.
pub fn basis_encode(value: u64, qubits: &[usize]) -> Result<Vec<GateOp>> {
    let n = qubits.len();
    if n >= 64 || value >> n != 0 {
        return Err(Error::Encoding(format!(
            "value {value} does not fit in {n} qubit(s)"
        )));
    }
    Ok(qubits
        .iter()
        .enumerate()
        .filter(|(bit, _)| value >> bit & 1 == 1)
        .map(|(_, &q)| GateOp::x(q))
        .collect())
}

/// `[RY(a0) q_lo, RZ(a1) q_lo, RY(a2) q_hi, RZ(a3) q_hi]`.
pub fn rotation_encode(angles: &[f64], qubits: [usize; 2]) -> Result<Vec<GateOp>> {
    let [a0, a1, a2, a3] = <[f64; 4]>::try_from(angles).map_err(|_| {
        Error::Encoding(format!("rotation encoding needs 4 angles, got {}", angles.len()))
    })?;
    let [lo, hi] = qubits;
    Ok(vec![
        GateOp::ry(lo, a0),
        GateOp::rz(lo, a1),
        GateOp::ry(hi, a2),
        GateOp::rz(hi, a3),
    ])
}

/// Prepares `x / ‖x‖` on the register. An RY on the high qubit splits the
/// weight between the two halves; controlled RYs (control on high, one of
/// them conjugated by X to fire on |0>) rotate the low qubit within each
/// half. Angles come from `atan2`, so negative components get their sign
/// without extra phase gates.
pub fn amplitude_encode(x: &[f64], qubits: [usize; 2]) -> Result<Vec<GateOp>> {
    let x = <[f64; 4]>::try_from(x).map_err(|_| {
        Error::Encoding(format!("amplitude encoding needs 4 values, got {}", x.len()))
    })?;
    l2_norm(&x)?;
    let [lo, hi] = qubits;
    let r0 = x[0].hypot(x[1]);
    let r1 = x[2].hypot(x[3]);
    let split = 2.0 * r1.atan2(r0);
    let low_half = 2.0 * x[1].atan2(x[0]);
    let high_half = 2.0 * x[3].atan2(x[2]);
    Ok(vec![
        GateOp::ry(hi, split),
        GateOp::x(hi),
        GateOp::cry(hi, lo, low_half),
        GateOp::x(hi),
        GateOp::cry(hi, lo, high_half),
    ])
}

/// Qubits needed for `n_points` values of `bits_per_point` bits each.
pub fn qubit_cost(method: EncodingMethod, n_points: usize, bits_per_point: usize) -> Result<usize> {
    if n_points == 0 {
        return Err(Error::Encoding("need at least one data point".into()));
    }
    match method {
        EncodingMethod::Basis => Ok(n_points * bits_per_point),
        EncodingMethod::Rotation => Ok(n_points),
        EncodingMethod::Amplitude if n_points.is_power_of_two() => {
            Ok(n_points.trailing_zeros() as usize)
        }
        EncodingMethod::Amplitude => Err(Error::Encoding(format!(
            "amplitude encoding needs a power-of-two point count, got {n_points}"
        ))),
    }
}

fn l2_norm(x: &[f64]) -> Result<f64> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Encoding(format!("non-finite amplitude input {x:?}")));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= 1e-12 {
        return Err(Error::Encoding("cannot normalize a zero vector".into()));
    }
    Ok(norm)
}
