#![allow(dead_code)]

use std::f64::consts::TAU;

use proptest::prelude::*;
use qenc_core::encoders::EncodedInput;
use qenc_core::model::{Entangler, LayerSpec};
use qenc_core::sim::{GateKind, GateOp, StateVector, C64};

pub fn random_state(num_qubits: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << num_qubits)
        .prop_filter("nonzero", |v| v.iter().any(|(r, i)| r.abs() + i.abs() > 1e-3))
        .prop_map(|v| {
            let n = v.iter().map(|(r, i)| r * r + i * i).sum::<f64>().sqrt();
            StateVector::from_amplitudes(v.iter().map(|(r, i)| C64::new(r / n, i / n)).collect())
                .unwrap()
        })
}

/// Any gate kind except IDLE on distinct qubits of an `n`-qubit register.
pub fn random_gate(n: usize) -> impl Strategy<Value = GateOp> {
    (0..11usize, 0.0f64..TAU, Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|(k, a, q)| {
            let kind = [
                GateKind::H,
                GateKind::X,
                GateKind::Y,
                GateKind::Z,
                GateKind::Rx(a),
                GateKind::Ry(a),
                GateKind::Rz(a),
                GateKind::Cnot,
                GateKind::Cz,
                GateKind::Cry(a),
                GateKind::Cswap,
            ][k];
            GateOp::new(kind, q[..kind.arity()].to_vec())
        })
}

pub fn random_input() -> impl Strategy<Value = EncodedInput> {
    prop_oneof![
        (0u32..4).prop_map(EncodedInput::Basis),
        prop::array::uniform4(0.0f64..TAU).prop_map(EncodedInput::Rotation),
        prop::array::uniform4(-1.0f64..1.0)
            .prop_filter("nonzero", |x| x.iter().map(|v| v * v).sum::<f64>() > 1e-4)
            .prop_map(EncodedInput::Amplitude),
    ]
}

pub fn random_stack() -> impl Strategy<Value = Vec<LayerSpec>> {
    prop::collection::vec(
        prop_oneof![
            Just(LayerSpec::SingleQubitUnitary),
            Just(LayerSpec::DualQubitUnitary),
            Just(LayerSpec::Entanglement(Entangler::Cz)),
            Just(LayerSpec::Entanglement(Entangler::Cry)),
        ],
        1..5,
    )
    .prop_map(|mut s| {
        if s.iter().all(|l| l.param_count() == 0) {
            s.push(LayerSpec::SingleQubitUnitary);
        }
        s
    })
}

pub fn params_for(stack: &[LayerSpec]) -> impl Strategy<Value = Vec<f64>> {
    let n: usize = stack.iter().map(LayerSpec::param_count).sum();
    prop::collection::vec(0.0f64..TAU, n)
}

/// 2-qubit register state from the gate fragment, simulated on its own.
pub fn register_state(ops: &[GateOp]) -> StateVector {
    let mut s = StateVector::zero_state(2).unwrap();
    for op in ops {
        s.apply_gate(op).unwrap();
    }
    s
}
