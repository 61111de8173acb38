//! Gradient-ascent training of class models and the per-epoch metrics.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::encoders::EncodedInput;
use crate::model::{
    class_probabilities, classifier_ops, predict_from_fidelities, swap_test, Backend, ClassLabel,
    ClassModel,
};
use crate::sim::{GateKind, StateVector};
use crate::{Error, Result};

const PROB_CLAMP: f64 = 1e-12;
pub const FINITE_DIFFERENCE_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMethod {
    ParameterShift,
    FiniteDifference,
}

impl FromStr for GradientMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parameter_shift" | "parameter-shift" => Ok(GradientMethod::ParameterShift),
            "finite_difference" | "finite-difference" => Ok(GradientMethod::FiniteDifference),
            other => Err(Error::Config(format!("unknown gradient method '{other}'"))),
        }
    }
}

impl fmt::Display for GradientMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradientMethod::ParameterShift => "parameter_shift",
            GradientMethod::FiniteDifference => "finite_difference",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs_per_class: usize,
    pub batch_size: usize,
    pub gradient_method: GradientMethod,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            epochs_per_class: 5,
            batch_size: 1,
            gradient_method: GradientMethod::ParameterShift,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::Config(format!(
                "learning_rate {} must be finite and nonnegative",
                self.learning_rate
            )));
        }
        if self.epochs_per_class == 0 {
            return Err(Error::Config("epochs_per_class must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Test-split metrics after one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    /// 1-based, counted across both class phases.
    pub epoch: usize,
    /// Class whose model was trained during this epoch.
    pub class_phase: ClassLabel,
    pub accuracy: f64,
    pub loss: f64,
    pub entropy: f64,
    /// Mean noiseless fidelity of the trained model on its own samples.
    pub train_fidelity: f64,
    /// Seconds since training started.
    pub wall_time: f64,
}

/// Binary cross-entropy with `p` clamped to `[1e-12, 1 - 1e-12]`.
pub fn bce_loss(y: u8, p: f64) -> f64 {
    let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    let y = f64::from(y);
    let loss = -(y * p.ln() + (1.0 - y) * (1.0 - p).ln());
    // exact match lands on the clamp; report it as zero
    if loss < 2.0 * PROB_CLAMP {
        0.0
    } else {
        loss
    }
}

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn entropy(p: &[f64]) -> Result<f64> {
    if p.is_empty() || p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Metrics(format!("invalid probability vector {p:?}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Metrics(format!("probabilities sum to {total}, not 1")));
    }
    Ok(-p.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>())
}

pub fn accuracy(predictions: &[ClassLabel], truths: &[ClassLabel]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::Metrics("accuracy of an empty set".into()));
    }
    if predictions.len() != truths.len() {
        return Err(Error::Metrics(format!(
            "{} predictions for {} labels",
            predictions.len(),
            truths.len()
        )));
    }
    let hits = predictions.iter().zip(truths).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / predictions.len() as f64)
}

/// Noiseless swap-test fidelity `2 P(0) - 1` (unclipped, so it stays
/// differentiable).
pub fn fidelity(model: &ClassModel, input: &EncodedInput) -> Result<f64> {
    let (circuit, _) = classifier_ops(model, input)?;
    let out = circuit.run(&StateVector::zero_state(circuit.num_qubits())?)?;
    Ok(2.0 * out.probability(crate::model::ANCILLA, 0)? - 1.0)
}

/// `∂F/∂θ_k` of the noiseless swap-test fidelity.
///
/// Parameter shift handles shared parameters by the product rule: every
/// gate reading `θ_k` is shifted on its own and the contributions add.
/// Single-qubit rotations use the two-term rule with shift `π/2`;
/// controlled rotations use the four-term rule.
pub fn fidelity_gradient(
    model: &ClassModel,
    input: &EncodedInput,
    param_index: usize,
    method: GradientMethod,
) -> Result<f64> {
    if param_index >= model.params().len() {
        return Err(Error::Model(format!(
            "parameter index {param_index} out of range ({} parameters)",
            model.params().len()
        )));
    }
    match method {
        GradientMethod::FiniteDifference => {
            let h = FINITE_DIFFERENCE_STEP;
            let mut plus = model.clone();
            plus.params_mut()[param_index] += h;
            let mut minus = model.clone();
            minus.params_mut()[param_index] -= h;
            Ok((fidelity(&plus, input)? - fidelity(&minus, input)?) / (2.0 * h))
        }
        GradientMethod::ParameterShift => {
            let (circuit, sites) = classifier_ops(model, input)?;
            let zero = StateVector::zero_state(circuit.num_qubits())?;
            let eval_shifted = |op_index: usize, delta: f64| -> Result<f64> {
                let mut shifted = circuit.clone();
                let op = &mut shifted.ops_mut()[op_index];
                let theta = op.kind.angle().expect("trainable gate has an angle");
                op.kind = op.kind.with_angle(theta + delta);
                let out = shifted.run(&zero)?;
                Ok(2.0 * out.probability(crate::model::ANCILLA, 0)? - 1.0)
            };
            let mut grad = 0.0;
            for &(op_index, p) in &sites {
                if p != param_index {
                    continue;
                }
                let diff = |d: f64| -> Result<f64> {
                    Ok(eval_shifted(op_index, d)? - eval_shifted(op_index, -d)?)
                };
                grad += match circuit.ops()[op_index].kind {
                    GateKind::Cry(_) => {
                        let c_plus = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
                        let c_minus = (SQRT_2 - 1.0) / (4.0 * SQRT_2);
                        c_plus * diff(FRAC_PI_2)? - c_minus * diff(3.0 * FRAC_PI_2)?
                    }
                    _ => diff(FRAC_PI_2)? / 2.0,
                };
            }
            Ok(grad)
        }
    }
}

/// Gradient with respect to every parameter.
pub fn gradient(model: &ClassModel, input: &EncodedInput, method: GradientMethod) -> Result<Vec<f64>> {
    (0..model.params().len())
        .map(|k| fidelity_gradient(model, input, k, method))
        .collect()
}

/// Accuracy, mean loss and mean entropy of a model pair on a labelled set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub loss: f64,
    pub entropy: f64,
}

/// Scores `test` with both models. The loss uses `y = 1` for class '3' and
/// `p = p3` from the normalized fidelities.
pub fn evaluate(
    model3: &ClassModel,
    model6: &ClassModel,
    test: &[(EncodedInput, ClassLabel)],
    backend: &Backend,
) -> Result<Evaluation> {
    if test.is_empty() {
        return Err(Error::Metrics("evaluation on an empty test set".into()));
    }
    let fids: Vec<(f64, f64)> = test
        .par_iter()
        .map(|(input, _)| {
            Ok((
                swap_test(model3, input, backend)?.fidelity,
                swap_test(model6, input, backend)?.fidelity,
            ))
        })
        .collect::<Result<_>>()?;
    let mut preds = Vec::with_capacity(test.len());
    let mut loss = 0.0;
    let mut ent = 0.0;
    for ((f3, f6), (_, truth)) in fids.iter().zip(test) {
        preds.push(predict_from_fidelities(*f3, *f6));
        let (p3, p6) = class_probabilities(*f3, *f6);
        loss += bce_loss(truth.target(), p3);
        ent += entropy(&[p3, p6])?;
    }
    let truths: Vec<_> = test.iter().map(|(_, t)| *t).collect();
    let n = test.len() as f64;
    Ok(Evaluation {
        accuracy: accuracy(&preds, &truths)?,
        loss: loss / n,
        entropy: ent / n,
    })
}

/// Mean noiseless fidelity of `model` on `samples`.
pub fn mean_fidelity(model: &ClassModel, samples: &[EncodedInput]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Metrics("mean fidelity of an empty set".into()));
    }
    let f: Vec<f64> = samples
        .par_iter()
        .map(|s| fidelity(model, s))
        .collect::<Result<_>>()?;
    Ok(f.iter().sum::<f64>() / f.len() as f64)
}

/// Gradient ascent on the mean fidelity over each mini-batch. The batch
/// gradient is reduced in sample order, so results do not depend on the
/// thread count.
pub fn ascend_epoch<R: Rng + ?Sized>(
    model: &mut ClassModel,
    samples: &[EncodedInput],
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<()> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(rng);
    for batch in order.chunks(cfg.batch_size) {
        let grads: Vec<Vec<f64>> = batch
            .par_iter()
            .map(|&i| gradient(model, &samples[i], cfg.gradient_method))
            .collect::<Result<_>>()?;
        let scale = cfg.learning_rate / batch.len() as f64;
        for g in &grads {
            for (p, d) in model.params_mut().iter_mut().zip(g) {
                *p += scale * d;
            }
        }
    }
    Ok(())
}

/// Everything needed for one class-phase of training.
pub struct Phase<'a> {
    pub samples: &'a [EncodedInput],
    pub test: &'a [(EncodedInput, ClassLabel)],
    pub backend: &'a Backend,
    pub cfg: &'a TrainConfig,
    /// Epoch number of the first epoch in this phase.
    pub first_epoch: usize,
    pub started: Instant,
}

/// Trains `model` for `epochs_per_class` epochs on its own class's samples
/// and scores the test split after each epoch together with `other`.
pub fn train_class<R: Rng + ?Sized>(
    model: &mut ClassModel,
    other: &ClassModel,
    phase: &Phase<'_>,
    rng: &mut R,
) -> Result<Vec<MetricsRecord>> {
    train_class_with(model, other, phase, rng, |_, _| Ok(()))
}

/// [`train_class`] with a hook called after every epoch, e.g. to write a
/// checkpoint. An error from the hook stops training.
pub fn train_class_with<R, F>(
    model: &mut ClassModel,
    other: &ClassModel,
    phase: &Phase<'_>,
    rng: &mut R,
    mut on_epoch: F,
) -> Result<Vec<MetricsRecord>>
where
    R: Rng + ?Sized,
    F: FnMut(&ClassModel, &MetricsRecord) -> Result<()>,
{
    if phase.samples.is_empty() {
        return Err(Error::Data(format!("no training samples for class {}", model.label)));
    }
    phase.cfg.validate()?;
    let mut records = Vec::with_capacity(phase.cfg.epochs_per_class);
    for e in 0..phase.cfg.epochs_per_class {
        ascend_epoch(model, phase.samples, phase.cfg, rng)?;
        let (m3, m6) = match model.label {
            ClassLabel::Three => (&*model, other),
            ClassLabel::Six => (other, &*model),
        };
        let eval = evaluate(m3, m6, phase.test, phase.backend)?;
        records.push(MetricsRecord {
            epoch: phase.first_epoch + e,
            class_phase: model.label,
            accuracy: eval.accuracy,
            loss: eval.loss,
            entropy: eval.entropy,
            train_fidelity: mean_fidelity(model, phase.samples)?,
            wall_time: phase.started.elapsed().as_secs_f64(),
        });
        on_epoch(model, records.last().expect("just pushed"))?;
    }
    Ok(records)
}
