//! Dense simulation of small circuits (up to [`MAX_QUBITS`] qubits).
//!
//! The state-vector path applies gates by direct index-pair iteration; the
//! density-matrix path conjugates by the gate matrix on the touched qubits
//! only. Both share the qubit convention documented at the crate root.

mod circuit;
mod density;
mod gate;
mod kernel;
mod matrix;
mod state;

pub use circuit::Circuit;
pub use density::DensityMatrix;
pub use gate::{GateKind, GateOp};
pub use matrix::Matrix;
pub use state::StateVector;

pub type C64 = num_complex::Complex<f64>;

pub const MAX_QUBITS: usize = 12;

pub(crate) fn check_qubit_count(num_qubits: usize) -> crate::Result<()> {
    if (1..=MAX_QUBITS).contains(&num_qubits) {
        Ok(())
    } else {
        Err(crate::Error::Config(format!(
            "qubit count {num_qubits} outside 1..={MAX_QUBITS}"
        )))
    }
}

pub(crate) fn check_outcome(outcome: u8) -> crate::Result<()> {
    if outcome > 1 {
        return Err(crate::Error::Dimension(format!(
            "measurement outcome must be 0 or 1, got {outcome}"
        )));
    }
    Ok(())
}
