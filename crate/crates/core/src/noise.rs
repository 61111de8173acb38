//! Parametric noise channels for density-matrix simulation and
//! dynamical-decoupling (DD) pulse insertion into idle windows.

use crate::sim::{Circuit, DensityMatrix, GateKind, GateOp, Matrix, StateVector, C64};
use crate::{Error, Result};

const COMPLETENESS_TOL: f64 = 1e-10;

/// Per-gate depolarizing strengths, per-time-unit idle decoherence and a
/// classical readout flip on the measured qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseConfig {
    /// Depolarizing probability after each 1-qubit gate.
    pub p_depol_1q: f64,
    /// Depolarizing probability after each 2- or 3-qubit gate.
    pub p_depol_2q: f64,
    /// Amplitude-damping probability per idle time unit.
    pub gamma_amp: f64,
    /// Phase-damping probability per idle time unit.
    pub gamma_phase: f64,
    /// Systematic Z rotation, radians per idle time unit.
    pub coherent_z_rate: f64,
    /// Probability that the ancilla readout is flipped.
    pub readout_flip: f64,
}

impl NoiseConfig {
    pub const PRESETS: [&'static str; 4] = ["none", "torino_like", "legacy_like", "coherent_idle"];

    pub fn zero() -> Self {
        Self::default()
    }

    /// Named presets standing in for hardware noise models.
    ///
    /// * `torino_like`: light gate depolarizing, weak damping and a small
    ///   detuning during idles.
    /// * `legacy_like`: every rate an order of magnitude above `torino_like`.
    /// * `coherent_idle`: idle windows carry only a coherent Z drift.
    pub fn preset(name: &str) -> Result<Self> {
        let cfg = match name {
            "none" | "ideal" => Self::zero(),
            "torino_like" => Self {
                p_depol_1q: 0.001,
                p_depol_2q: 0.01,
                gamma_amp: 0.002,
                gamma_phase: 0.002,
                coherent_z_rate: 0.02,
                readout_flip: 0.01,
            },
            "legacy_like" => Self {
                p_depol_1q: 0.01,
                p_depol_2q: 0.1,
                gamma_amp: 0.02,
                gamma_phase: 0.02,
                coherent_z_rate: 0.2,
                readout_flip: 0.1,
            },
            "coherent_idle" => Self {
                coherent_z_rate: 0.5,
                ..Self::zero()
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown noise preset '{other}' (known: {})",
                    Self::PRESETS.join(", ")
                )))
            }
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("p_depol_1q", self.p_depol_1q),
            ("p_depol_2q", self.p_depol_2q),
            ("gamma_amp", self.gamma_amp),
            ("gamma_phase", self.gamma_phase),
            ("readout_flip", self.readout_flip),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is not a probability")));
            }
        }
        if !self.coherent_z_rate.is_finite() {
            return Err(Error::Config("coherent_z_rate must be finite".into()));
        }
        Ok(())
    }

    /// `p0' = (1 - r) p0 + r (1 - p0)`.
    pub fn apply_readout(&self, p0: f64) -> f64 {
        let r = self.readout_flip;
        (1.0 - r) * p0 + r * (1.0 - p0)
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn paulis() -> [Matrix; 4] {
    [
        Matrix::identity(2),
        GateKind::X.matrix().unwrap(),
        GateKind::Y.matrix().unwrap(),
        GateKind::Z.matrix().unwrap(),
    ]
}

/// `ρ → (1 - p) ρ + p · I/2^k ⊗ tr_k ρ` on `k` qubits, as `4^k` weighted
/// Pauli strings.
pub fn depolarizing_kraus(p: f64, num_qubits: usize) -> Vec<Matrix> {
    let n = 4usize.pow(num_qubits as u32);
    let rest = (p / n as f64).sqrt();
    let first = (1.0 - p + p / n as f64).sqrt();
    let singles = paulis();
    (0..n)
        .map(|idx| {
            // digit k of idx (base 4) picks the Pauli on local qubit k
            let mut m = Matrix::identity(1);
            for k in (0..num_qubits).rev() {
                m = m.kron(&singles[idx / 4usize.pow(k as u32) % 4]);
            }
            m.scale(c(if idx == 0 { first } else { rest }))
        })
        .filter(|m| m.data().iter().any(|v| *v != C64::new(0.0, 0.0)))
        .collect()
}

pub fn amplitude_damping_kraus(gamma: f64) -> Vec<Matrix> {
    let z = c(0.0);
    vec![
        Matrix::from_rows(&[&[c(1.0), z], &[z, c((1.0 - gamma).sqrt())]]),
        Matrix::from_rows(&[&[z, c(gamma.sqrt())], &[z, z]]),
    ]
}

pub fn phase_damping_kraus(lambda: f64) -> Vec<Matrix> {
    let z = c(0.0);
    vec![
        Matrix::from_rows(&[&[c(1.0), z], &[z, c((1.0 - lambda).sqrt())]]),
        Matrix::from_rows(&[&[z, z], &[z, c(lambda.sqrt())]]),
    ]
}

/// Every product `b·a` with `a` from `first` and `b` from `second`.
fn compose(first: &[Matrix], second: &[Matrix]) -> Vec<Matrix> {
    second
        .iter()
        .flat_map(|b| first.iter().map(move |a| b * a))
        .filter(|m| m.data().iter().any(|v| v.norm() > 0.0))
        .collect()
}

/// `Σ K†K = I` within `tol`.
pub fn is_complete(kraus: &[Matrix], tol: f64) -> bool {
    let Some(first) = kraus.first() else {
        return false;
    };
    let dim = first.dim();
    let mut sum = Matrix::from_vec(dim, vec![c(0.0); dim * dim]);
    for k in kraus {
        if k.dim() != dim {
            return false;
        }
        sum = sum.add(&(&k.adjoint() * k));
    }
    sum.max_abs_diff(&Matrix::identity(dim)) < tol
}

/// Kraus operators of the channel that follows `gate` (acting on
/// `gate.qubits`). Gates get depolarizing noise; idle markers get amplitude
/// damping, phase damping and a coherent Z rotation, each compounded over
/// the idle duration.
pub fn kraus_for(config: &NoiseConfig, gate: &GateOp) -> Result<Vec<Matrix>> {
    config.validate()?;
    let arity = gate.kind.arity();
    let ops = match gate.kind {
        GateKind::Idle(d) => {
            let gamma = 1.0 - (1.0 - config.gamma_amp).powf(d);
            let lambda = 1.0 - (1.0 - config.gamma_phase).powf(d);
            let mut set = vec![Matrix::identity(2)];
            if gamma > 0.0 {
                set = compose(&set, &amplitude_damping_kraus(gamma));
            }
            if lambda > 0.0 {
                set = compose(&set, &phase_damping_kraus(lambda));
            }
            let angle = config.coherent_z_rate * d;
            if angle != 0.0 {
                set = compose(&set, &[GateKind::Rz(angle).matrix().unwrap()]);
            }
            set
        }
        _ => {
            let p = if arity == 1 {
                config.p_depol_1q
            } else {
                config.p_depol_2q
            };
            if p > 0.0 {
                depolarizing_kraus(p, arity)
            } else {
                vec![Matrix::identity(1 << arity)]
            }
        }
    };
    if !is_complete(&ops, COMPLETENESS_TOL) {
        return Err(Error::Noise(format!(
            "Kraus set for {} violates completeness",
            gate.kind.name()
        )));
    }
    Ok(ops)
}

/// Noise configuration with the gate channels precomputed, for repeated
/// circuit evaluation.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    config: NoiseConfig,
    /// Depolarizing probability after 1-, 2- and 3-qubit gates.
    gate_depol: [f64; 3],
}

impl NoiseModel {
    pub fn new(config: NoiseConfig) -> Result<Self> {
        config.validate()?;
        for (arity, kind) in [(1, GateKind::X), (2, GateKind::Cz), (3, GateKind::Cswap)] {
            kraus_for(&config, &GateOp::new(kind, (0..arity).collect()))?;
        }
        Ok(Self {
            config,
            gate_depol: [config.p_depol_1q, config.p_depol_2q, config.p_depol_2q],
        })
    }

    pub fn config(&self) -> &NoiseConfig {
        &self.config
    }

    /// Density-matrix evolution from `|0...0>`: each gate is applied and then
    /// followed by its channel; idle markers apply only their channel. Gate
    /// depolarizing uses the closed form rather than the Kraus sum.
    pub fn run(&self, circuit: &Circuit) -> Result<DensityMatrix> {
        let zero = StateVector::zero_state(circuit.num_qubits())?;
        let mut rho = DensityMatrix::from_state(&zero);
        for op in circuit.ops() {
            op.validate(circuit.num_qubits())?;
            if op.is_idle() {
                let set = kraus_for(&self.config, op)?;
                if !(set.len() == 1 && set[0] == Matrix::identity(2)) {
                    rho.apply_kraus(&op.qubits, &set)?;
                }
                continue;
            }
            rho.apply_gate(op)?;
            let p = self.gate_depol[op.qubits.len() - 1];
            if p > 0.0 {
                rho.depolarize(&op.qubits, p)?;
            }
        }
        Ok(rho)
    }
}

/// Runs `circuit` from `|0...0>` under `config`.
pub fn run_noisy(circuit: &Circuit, config: &NoiseConfig) -> Result<DensityMatrix> {
    NoiseModel::new(*config)?.run(circuit)
}

/// Pulse sequence inserted into idle windows.
#[derive(Debug, Clone, PartialEq)]
pub struct DdPolicy {
    pub enabled: bool,
    pub sequence: Vec<GateKind>,
    /// Idle windows shorter than this are left alone.
    pub min_idle_duration: f64,
}

impl Default for DdPolicy {
    fn default() -> Self {
        Self {
            enabled: true,
            sequence: vec![GateKind::X, GateKind::X],
            min_idle_duration: 1.0,
        }
    }
}

impl DdPolicy {
    /// The sequence must be non-empty single-qubit unitaries whose product
    /// is the identity up to a global phase.
    pub fn validate(&self) -> Result<()> {
        if self.sequence.is_empty() {
            return Err(Error::Policy("empty pulse sequence".into()));
        }
        if !(self.min_idle_duration.is_finite() && self.min_idle_duration >= 0.0) {
            return Err(Error::Policy(format!(
                "min_idle_duration {} must be finite and nonnegative",
                self.min_idle_duration
            )));
        }
        let mut total = Matrix::identity(2);
        for kind in &self.sequence {
            if kind.arity() != 1 || matches!(kind, GateKind::Idle(_)) {
                return Err(Error::Policy(format!(
                    "{} is not a single-qubit pulse",
                    kind.name()
                )));
            }
            total = &kind.matrix().unwrap() * &total;
        }
        if !total.equals_up_to_phase(&Matrix::identity(2), 1e-10) {
            let names: Vec<_> = self.sequence.iter().map(|k| k.name()).collect();
            return Err(Error::Policy(format!(
                "pulse sequence [{}] does not compose to the identity",
                names.join(", ")
            )));
        }
        Ok(())
    }
}

/// Replaces every idle window of duration `d >= min_idle_duration` by
/// `n` equal idle slices each followed by one pulse, e.g. for `[X, X]`:
/// `IDLE(d/2), X, IDLE(d/2), X`.
pub fn insert_dd(circuit: &Circuit, policy: &DdPolicy) -> Result<Circuit> {
    policy.validate()?;
    if !policy.enabled {
        return Ok(circuit.clone());
    }
    let n = policy.sequence.len();
    let mut ops = Vec::with_capacity(circuit.len());
    for op in circuit.ops() {
        match op.kind {
            GateKind::Idle(d) if d >= policy.min_idle_duration && d > 0.0 => {
                let q = op.qubits[0];
                for pulse in &policy.sequence {
                    ops.push(GateOp::idle(q, d / n as f64));
                    ops.push(GateOp::new(*pulse, vec![q]));
                }
            }
            _ => ops.push(op.clone()),
        }
    }
    Circuit::from_ops(circuit.num_qubits(), ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_depolarizing_matches_kraus_sum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let amps: Vec<C64> = (0..16)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let psi = StateVector::from_amplitudes(amps.iter().map(|a| a / norm).collect()).unwrap();
        let base = DensityMatrix::from_state(&psi);
        for (targets, p) in [(vec![2], 0.3), (vec![3, 0], 0.07), (vec![1, 3, 2], 0.9), (vec![0, 1], 1.0)] {
            let mut direct = base.clone();
            direct.depolarize(&targets, p).unwrap();
            let mut summed = base.clone();
            summed
                .apply_kraus(&targets, &depolarizing_kraus(p, targets.len()))
                .unwrap();
            assert!(direct.to_matrix().max_abs_diff(&summed.to_matrix()) < 1e-12, "{targets:?}");
        }
    }

    #[test]
    fn zero_config_gives_identity() {
        let set = kraus_for(&NoiseConfig::zero(), &GateOp::h(0)).unwrap();
        assert_eq!(set, vec![Matrix::identity(2)]);
        let set = kraus_for(&NoiseConfig::zero(), &GateOp::idle(0, 3.0)).unwrap();
        assert_eq!(set, vec![Matrix::identity(2)]);
        let set = kraus_for(&NoiseConfig::zero(), &GateOp::cswap(0, 1, 2)).unwrap();
        assert_eq!(set, vec![Matrix::identity(8)]);
    }

    #[test]
    fn presets_are_valid_and_complete() {
        for name in NoiseConfig::PRESETS {
            let cfg = NoiseConfig::preset(name).unwrap();
            for op in [
                GateOp::h(0),
                GateOp::cz(0, 1),
                GateOp::cswap(0, 1, 2),
                GateOp::idle(0, 2.5),
            ] {
                let set = kraus_for(&cfg, &op).unwrap();
                assert!(is_complete(&set, 1e-10), "{name} {}", op.kind.name());
            }
        }
        assert!(NoiseConfig::preset("ibm_torino_live").is_err());
    }

    #[test]
    fn full_depolarizing_gives_maximally_mixed() {
        let cfg = NoiseConfig {
            p_depol_1q: 1.0,
            ..NoiseConfig::zero()
        };
        let s = StateVector::zero_state(1)
            .unwrap()
            .applied(&GateOp::ry(0, 1.1))
            .unwrap();
        let mut rho = DensityMatrix::from_state(&s);
        rho.apply_kraus(&[0], &kraus_for(&cfg, &GateOp::h(0)).unwrap())
            .unwrap();
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(rho.to_matrix().max_abs_diff(&mixed.to_matrix()) < 1e-12);
    }

    #[test]
    fn full_amplitude_damping_resets_one() {
        let cfg = NoiseConfig {
            gamma_amp: 1.0,
            ..NoiseConfig::zero()
        };
        let one = StateVector::zero_state(1)
            .unwrap()
            .applied(&GateOp::x(0))
            .unwrap();
        let mut rho = DensityMatrix::from_state(&one);
        rho.apply_kraus(&[0], &kraus_for(&cfg, &GateOp::idle(0, 1.0)).unwrap())
            .unwrap();
        assert!((rho.probability(0, 0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn readout_mixture() {
        let cfg = NoiseConfig {
            readout_flip: 0.1,
            ..NoiseConfig::zero()
        };
        assert!((cfg.apply_readout(1.0) - 0.9).abs() < 1e-15);
        assert!((cfg.apply_readout(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = NoiseConfig {
            gamma_amp: 1.5,
            ..NoiseConfig::zero()
        };
        assert!(cfg.validate().is_err());
        assert!(kraus_for(&cfg, &GateOp::h(0)).is_err());
    }

    #[test]
    fn dd_policy_validation() {
        DdPolicy::default().validate().unwrap();
        let xyxy = DdPolicy {
            sequence: vec![GateKind::X, GateKind::Y, GateKind::X, GateKind::Y],
            ..DdPolicy::default()
        };
        xyxy.validate().unwrap();
        let odd = DdPolicy {
            sequence: vec![GateKind::X, GateKind::X, GateKind::X],
            ..DdPolicy::default()
        };
        assert!(matches!(odd.validate(), Err(Error::Policy(_))));
        let two_qubit = DdPolicy {
            sequence: vec![GateKind::Cz],
            ..DdPolicy::default()
        };
        assert!(two_qubit.validate().is_err());
    }

    #[test]
    fn insert_dd_shapes() {
        let plain = Circuit::from_ops(2, vec![GateOp::h(0), GateOp::cnot(0, 1)]).unwrap();
        assert_eq!(insert_dd(&plain, &DdPolicy::default()).unwrap(), plain);

        let idle = Circuit::from_ops(1, vec![GateOp::h(0), GateOp::idle(0, 3.0), GateOp::h(0)])
            .unwrap();
        let dd = insert_dd(&idle, &DdPolicy::default()).unwrap();
        let kinds: Vec<_> = dd.ops().iter().map(|o| o.kind).collect();
        assert_eq!(
            kinds,
            vec![
                GateKind::H,
                GateKind::Idle(1.5),
                GateKind::X,
                GateKind::Idle(1.5),
                GateKind::X,
                GateKind::H
            ]
        );
        assert_eq!(dd.idle_time(), idle.idle_time());

        let short = DdPolicy {
            min_idle_duration: 4.0,
            ..DdPolicy::default()
        };
        assert_eq!(insert_dd(&idle, &short).unwrap(), idle);
    }

    #[test]
    fn echo_identity_for_coherent_z() {
        let theta = 0.731;
        let x = GateKind::X.matrix().unwrap();
        let rz = GateKind::Rz(theta).matrix().unwrap();
        let echo = &(&(&x * &rz) * &x) * &rz;
        assert!(echo.equals_up_to_phase(&Matrix::identity(2), 1e-14));
        // without the pulses the drift survives
        let drift = &rz * &rz;
        assert!(!drift.equals_up_to_phase(&Matrix::identity(2), 1e-3));
    }
}
