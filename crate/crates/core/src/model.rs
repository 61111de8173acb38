//! Five-qubit swap-test classifier.
//!
//! Qubit 0 is the measured ancilla, qubits 1-2 carry the trainable class
//! state and qubits 3-4 carry the encoded sample. The ancilla's `P(0)`
//! equals `(1 + |<learned|data>|²) / 2` in the noiseless case.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::encoders::EncodedInput;
use crate::noise::{insert_dd, DdPolicy, NoiseConfig, NoiseModel};
use crate::sim::{Circuit, GateOp, StateVector};
use crate::{Error, Result};

pub const NUM_QUBITS: usize = 5;
pub const ANCILLA: usize = 0;
pub const LEARNING_QUBITS: [usize; 2] = [1, 2];
pub const DATA_QUBITS: [usize; 2] = [3, 4];

/// Predictions with `|f3 - f6|` below this go to class '3'.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLabel {
    Three,
    Six,
}

impl ClassLabel {
    pub const BOTH: [ClassLabel; 2] = [ClassLabel::Three, ClassLabel::Six];

    pub fn digit(&self) -> u8 {
        match self {
            ClassLabel::Three => 3,
            ClassLabel::Six => 6,
        }
    }

    pub fn from_digit(d: u8) -> Option<Self> {
        match d {
            3 => Some(ClassLabel::Three),
            6 => Some(ClassLabel::Six),
            _ => None,
        }
    }

    /// Binary target for the loss: '3' is the positive class.
    pub fn target(&self) -> u8 {
        match self {
            ClassLabel::Three => 1,
            ClassLabel::Six => 0,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.digit())
    }
}

/// Two-qubit entangler used by an entanglement layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entangler {
    Cz,
    /// Controlled-RY from the first to the second learning qubit; trainable.
    Cry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSpec {
    /// Independent RY, RZ on each learning qubit (4 parameters).
    SingleQubitUnitary,
    /// One shared RY angle and one shared RZ angle applied to both learning
    /// qubits (2 parameters).
    DualQubitUnitary,
    Entanglement(Entangler),
}

impl LayerSpec {
    pub fn param_count(&self) -> usize {
        match self {
            LayerSpec::SingleQubitUnitary => 4,
            LayerSpec::DualQubitUnitary => 2,
            LayerSpec::Entanglement(Entangler::Cz) => 0,
            LayerSpec::Entanglement(Entangler::Cry) => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LayerSpec::SingleQubitUnitary => "single",
            LayerSpec::DualQubitUnitary => "dual",
            LayerSpec::Entanglement(Entangler::Cz) => "cz",
            LayerSpec::Entanglement(Entangler::Cry) => "cry",
        }
    }

    /// `[DualQubitUnitary, Entanglement(CZ), SingleQubitUnitary]`.
    pub fn default_stack() -> Vec<LayerSpec> {
        vec![
            LayerSpec::DualQubitUnitary,
            LayerSpec::Entanglement(Entangler::Cz),
            LayerSpec::SingleQubitUnitary,
        ]
    }
}

impl fmt::Display for LayerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LayerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(LayerSpec::SingleQubitUnitary),
            "dual" => Ok(LayerSpec::DualQubitUnitary),
            "cz" => Ok(LayerSpec::Entanglement(Entangler::Cz)),
            "cry" => Ok(LayerSpec::Entanglement(Entangler::Cry)),
            other => Err(Error::Config(format!("unknown layer kind '{other}'"))),
        }
    }
}

/// Trainable state for one class. Angles are kept unwrapped.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassModel {
    pub label: ClassLabel,
    layers: Vec<LayerSpec>,
    params: Vec<f64>,
}

impl ClassModel {
    pub fn new(label: ClassLabel, layers: Vec<LayerSpec>, params: Vec<f64>) -> Result<Self> {
        let want: usize = layers.iter().map(LayerSpec::param_count).sum();
        if params.len() != want {
            return Err(Error::Model(format!(
                "layer stack needs {want} parameters, got {}",
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Model("non-finite parameter".into()));
        }
        Ok(Self {
            label,
            layers,
            params,
        })
    }

    pub fn zeros(label: ClassLabel, layers: Vec<LayerSpec>) -> Self {
        let n = layers.iter().map(LayerSpec::param_count).sum();
        Self {
            label,
            layers,
            params: vec![0.0; n],
        }
    }

    /// Parameters drawn uniformly from `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(label: ClassLabel, layers: Vec<LayerSpec>, rng: &mut R) -> Self {
        let n = layers.iter().map(LayerSpec::param_count).sum();
        let params = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
        Self {
            label,
            layers,
            params,
        }
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Learning-layer gates on `qubits`, each paired with the index of the
    /// parameter it reads (if any). A shared parameter appears once per gate
    /// that uses it.
    pub fn learning_ops(&self, qubits: [usize; 2]) -> Vec<(GateOp, Option<usize>)> {
        let [a, b] = qubits;
        let mut ops = Vec::new();
        let mut next = 0;
        for layer in &self.layers {
            let p = &self.params;
            match layer {
                LayerSpec::SingleQubitUnitary => {
                    ops.push((GateOp::ry(a, p[next]), Some(next)));
                    ops.push((GateOp::rz(a, p[next + 1]), Some(next + 1)));
                    ops.push((GateOp::ry(b, p[next + 2]), Some(next + 2)));
                    ops.push((GateOp::rz(b, p[next + 3]), Some(next + 3)));
                }
                LayerSpec::DualQubitUnitary => {
                    for q in [a, b] {
                        ops.push((GateOp::ry(q, p[next]), Some(next)));
                        ops.push((GateOp::rz(q, p[next + 1]), Some(next + 1)));
                    }
                }
                LayerSpec::Entanglement(Entangler::Cz) => ops.push((GateOp::cz(a, b), None)),
                LayerSpec::Entanglement(Entangler::Cry) => {
                    ops.push((GateOp::cry(a, b, p[next]), Some(next)))
                }
            }
            next += layer.param_count();
        }
        ops
    }

    /// The learned class state on its own 2-qubit register.
    pub fn learned_state(&self) -> Result<StateVector> {
        let ops = self.learning_ops([0, 1]).into_iter().map(|(op, _)| op);
        Circuit::from_ops(2, ops.collect())?.run(&StateVector::zero_state(2)?)
    }

    /// Plain-text checkpoint: label, layer stack and full-precision
    /// parameters, one `key = value` per line.
    pub fn to_checkpoint(&self) -> String {
        let layers: Vec<_> = self.layers.iter().map(LayerSpec::name).collect();
        let params: Vec<_> = self.params.iter().map(|p| format!("{p:?}")).collect();
        format!(
            "label = {}\nlayers = {}\nparams = {}\n",
            self.label,
            layers.join(","),
            params.join(",")
        )
    }

    pub fn from_checkpoint(text: &str) -> Result<Self> {
        let mut label = None;
        let mut layers = None;
        let mut params = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Model(format!("checkpoint line {}: expected key = value", lineno + 1))
            })?;
            let value = value.trim();
            match key.trim() {
                "label" => {
                    let d: u8 = value
                        .parse()
                        .map_err(|_| Error::Model(format!("bad label '{value}'")))?;
                    label = Some(
                        ClassLabel::from_digit(d)
                            .ok_or_else(|| Error::Model(format!("unsupported label {d}")))?,
                    );
                }
                "layers" => {
                    layers = Some(
                        split_list(value)
                            .map(str::parse)
                            .collect::<Result<Vec<LayerSpec>>>()?,
                    )
                }
                "params" => {
                    params = Some(
                        split_list(value)
                            .map(|v| {
                                v.parse::<f64>()
                                    .map_err(|_| Error::Model(format!("bad parameter '{v}'")))
                            })
                            .collect::<Result<Vec<f64>>>()?,
                    )
                }
                other => return Err(Error::Model(format!("unknown checkpoint key '{other}'"))),
            }
        }
        match (label, layers, params) {
            (Some(l), Some(s), Some(p)) => Self::new(l, s, p),
            _ => Err(Error::Model("checkpoint missing label, layers or params".into())),
        }
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Swap-test circuit without idle markers, plus the op index and parameter
/// index of every trainable gate.
pub(crate) fn classifier_ops(
    model: &ClassModel,
    input: &EncodedInput,
) -> Result<(Circuit, Vec<(usize, usize)>)> {
    let mut circuit = Circuit::new(NUM_QUBITS)?;
    circuit.push(GateOp::h(ANCILLA))?;
    let mut sites = Vec::new();
    for (op, param) in model.learning_ops(LEARNING_QUBITS) {
        if let Some(p) = param {
            sites.push((circuit.len(), p));
        }
        circuit.push(op)?;
    }
    circuit.extend(input.fragment(DATA_QUBITS)?)?;
    circuit.push(GateOp::cswap(ANCILLA, LEARNING_QUBITS[0], DATA_QUBITS[0]))?;
    circuit.push(GateOp::cswap(ANCILLA, LEARNING_QUBITS[1], DATA_QUBITS[1]))?;
    circuit.push(GateOp::h(ANCILLA))?;
    Ok((circuit, sites))
}

/// Full classifier circuit with idle markers on every scheduling gap.
pub fn build_classifier_circuit(model: &ClassModel, input: &EncodedInput) -> Result<Circuit> {
    Ok(classifier_ops(model, input)?.0.with_idle_markers())
}

/// Ancilla `P(0)` and the fidelity estimate `2 P(0) - 1`, clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapTestResult {
    pub p0: f64,
    pub fidelity: f64,
}

impl SwapTestResult {
    pub fn from_p0(p0: f64) -> Self {
        Self {
            p0,
            fidelity: (2.0 * p0 - 1.0).clamp(0.0, 1.0),
        }
    }
}

/// Where swap tests are evaluated.
#[derive(Debug, Clone)]
pub enum Backend {
    /// Exact state-vector simulation.
    Pure,
    /// Density-matrix simulation under a noise model, optionally with DD.
    Noisy {
        noise: NoiseModel,
        dd: Option<DdPolicy>,
    },
}

impl Backend {
    pub fn noisy(config: NoiseConfig, dd: Option<DdPolicy>) -> Result<Self> {
        if let Some(policy) = &dd {
            policy.validate()?;
        }
        Ok(Backend::Noisy {
            noise: NoiseModel::new(config)?,
            dd,
        })
    }

    /// Ancilla `P(0)` of `circuit`, after readout error on noisy backends.
    pub fn ancilla_p0(&self, circuit: &Circuit) -> Result<f64> {
        match self {
            Backend::Pure => {
                let out = circuit.run(&StateVector::zero_state(circuit.num_qubits())?)?;
                out.probability(ANCILLA, 0)
            }
            Backend::Noisy { noise, dd } => {
                let rho = match dd {
                    Some(policy) => noise.run(&insert_dd(circuit, policy)?)?,
                    None => noise.run(circuit)?,
                };
                Ok(noise.config().apply_readout(rho.probability(ANCILLA, 0)?))
            }
        }
    }
}

pub fn swap_test(model: &ClassModel, input: &EncodedInput, backend: &Backend) -> Result<SwapTestResult> {
    let circuit = build_classifier_circuit(model, input)?;
    Ok(SwapTestResult::from_p0(backend.ancilla_p0(&circuit)?))
}

/// Fidelities normalized to class probabilities `(p3, p6)`; `(0.5, 0.5)`
/// when both fidelities vanish.
pub fn class_probabilities(f3: f64, f6: f64) -> (f64, f64) {
    let total = f3 + f6;
    if total < 1e-12 {
        (0.5, 0.5)
    } else {
        (f3 / total, f6 / total)
    }
}

/// Label with the larger fidelity; near-ties go to '3'.
pub fn predict_from_fidelities(f3: f64, f6: f64) -> ClassLabel {
    if f6 - f3 > TIE_TOLERANCE {
        ClassLabel::Six
    } else {
        ClassLabel::Three
    }
}

/// Prediction plus both swap-test fidelities for one sample.
pub fn predict(
    input: &EncodedInput,
    model3: &ClassModel,
    model6: &ClassModel,
    backend: &Backend,
) -> Result<(ClassLabel, f64, f64)> {
    let f3 = swap_test(model3, input, backend)?.fidelity;
    let f6 = swap_test(model6, input, backend)?.fidelity;
    Ok((predict_from_fidelities(f3, f6), f3, f6))
}
