use std::f64::consts::FRAC_1_SQRT_2;

use super::{Matrix, C64};
use crate::{Error, Result};

/// Gate kinds supported by the simulator. Angles are in radians; idle
/// durations are in abstract time units (circuit moments).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    /// Qubits `[control, target]`.
    Cnot,
    Cz,
    /// Qubits `[control, target]`.
    Cry(f64),
    /// Qubits `[control, a, b]`.
    Cswap,
    Idle(f64),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Cry(_) => 2,
            GateKind::Cswap => 3,
            _ => 1,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Rx(t) | GateKind::Ry(t) | GateKind::Rz(t) | GateKind::Cry(t) => Some(t),
            _ => None,
        }
    }

    /// Same kind with its rotation angle replaced. Non-parametric kinds are
    /// returned unchanged.
    pub fn with_angle(self, theta: f64) -> Self {
        match self {
            GateKind::Rx(_) => GateKind::Rx(theta),
            GateKind::Ry(_) => GateKind::Ry(theta),
            GateKind::Rz(_) => GateKind::Rz(theta),
            GateKind::Cry(_) => GateKind::Cry(theta),
            other => other,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::Rx(_) => "RX",
            GateKind::Ry(_) => "RY",
            GateKind::Rz(_) => "RZ",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Cry(_) => "CRY",
            GateKind::Cswap => "CSWAP",
            GateKind::Idle(_) => "IDLE",
        }
    }

    /// Unitary in the local basis where bit `k` of the row/column index is
    /// the state of the op's `k`-th qubit. `None` for idle markers.
    pub fn matrix(&self) -> Option<Matrix> {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let m = match *self {
            GateKind::H => {
                let h = C64::new(FRAC_1_SQRT_2, 0.0);
                Matrix::from_rows(&[&[h, h], &[h, -h]])
            }
            GateKind::X => Matrix::from_rows(&[&[z, o], &[o, z]]),
            GateKind::Y => Matrix::from_rows(&[&[z, -i], &[i, z]]),
            GateKind::Z => Matrix::diag(&[o, -o]),
            GateKind::Rx(t) => {
                let (c, s) = half_angle(t);
                Matrix::from_rows(&[&[c.into(), -i * s], &[-i * s, c.into()]])
            }
            GateKind::Ry(t) => ry(t),
            GateKind::Rz(t) => rz(t),
            GateKind::Cnot => controlled(&GateKind::X.matrix()?),
            GateKind::Cz => Matrix::diag(&[o, o, o, -o]),
            GateKind::Cry(t) => controlled(&ry(t)),
            GateKind::Cswap => {
                let mut m = Matrix::identity(8);
                // local index = c + 2a + 4b; swap |c=1,a=1,b=0> <-> |c=1,a=0,b=1>
                m.set(3, 3, z);
                m.set(5, 5, z);
                m.set(3, 5, o);
                m.set(5, 3, o);
                m
            }
            GateKind::Idle(_) => return None,
        };
        Some(m)
    }
}

pub(crate) fn half_angle(theta: f64) -> (f64, f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    (c, s)
}

fn ry(theta: f64) -> Matrix {
    let (c, s) = half_angle(theta);
    Matrix::from_rows(&[
        &[C64::new(c, 0.0), C64::new(-s, 0.0)],
        &[C64::new(s, 0.0), C64::new(c, 0.0)],
    ])
}

fn rz(theta: f64) -> Matrix {
    let p = C64::from_polar(1.0, theta / 2.0);
    Matrix::diag(&[p.conj(), p])
}

/// Controlled 2x2 unitary with the control on local bit 0.
fn controlled(u: &Matrix) -> Matrix {
    let mut m = Matrix::identity(4);
    for r in 0..2 {
        for c in 0..2 {
            m.set(1 + 2 * r, 1 + 2 * c, u.get(r, c));
        }
    }
    m
}

/// A gate kind bound to concrete qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self { kind, qubits }
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q])
    }
    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Self::new(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, vec![q])
    }
    pub fn rx(q: usize, theta: f64) -> Self {
        Self::new(GateKind::Rx(theta), vec![q])
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Self::new(GateKind::Ry(theta), vec![q])
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Self::new(GateKind::Rz(theta), vec![q])
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cnot, vec![control, target])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::Cz, vec![a, b])
    }
    pub fn cry(control: usize, target: usize, theta: f64) -> Self {
        Self::new(GateKind::Cry(theta), vec![control, target])
    }
    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Self::new(GateKind::Cswap, vec![control, a, b])
    }
    pub fn idle(q: usize, duration: f64) -> Self {
        Self::new(GateKind::Idle(duration), vec![q])
    }

    pub fn is_idle(&self) -> bool {
        matches!(self.kind, GateKind::Idle(_))
    }

    /// Checks arity, index range, distinctness and numeric parameters.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.qubits.len() != self.kind.arity() {
            return Err(Error::Dimension(format!(
                "{} expects {} qubit(s), got {}",
                self.kind.name(),
                self.kind.arity(),
                self.qubits.len()
            )));
        }
        for (k, &q) in self.qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::Dimension(format!(
                    "{} targets qubit {q} on a {num_qubits}-qubit register",
                    self.kind.name()
                )));
            }
            if self.qubits[..k].contains(&q) {
                return Err(Error::Dimension(format!(
                    "{} repeats qubit {q}",
                    self.kind.name()
                )));
            }
        }
        match self.kind {
            GateKind::Idle(d) if !(d.is_finite() && d >= 0.0) => Err(Error::Dimension(format!(
                "idle duration must be finite and nonnegative, got {d}"
            ))),
            k => match k.angle() {
                Some(t) if !t.is_finite() => Err(Error::Dimension(format!(
                    "{} angle is not finite",
                    k.name()
                ))),
                _ => Ok(()),
            },
        }
    }
}
