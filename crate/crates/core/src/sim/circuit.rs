use super::{check_qubit_count, DensityMatrix, GateOp, StateVector};
use crate::{Error, Result};

/// Ordered gate list over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        Ok(Self {
            num_qubits,
            ops: Vec::new(),
        })
    }

    pub fn from_ops(num_qubits: usize, ops: Vec<GateOp>) -> Result<Self> {
        let mut c = Self::new(num_qubits)?;
        c.extend(ops)?;
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn ops_mut(&mut self) -> &mut [GateOp] {
        &mut self.ops
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn extend(&mut self, ops: impl IntoIterator<Item = GateOp>) -> Result<()> {
        for op in ops {
            self.push(op)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Left fold of gate application over the ops. Idle markers are skipped.
    pub fn run(&self, initial: &StateVector) -> Result<StateVector> {
        self.check_register(initial.num_qubits())?;
        let mut state = initial.clone();
        for op in &self.ops {
            state.apply_gate(op)?;
        }
        Ok(state)
    }

    /// Noiseless density-matrix evolution.
    pub fn run_density(&self, initial: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_register(initial.num_qubits())?;
        let mut rho = initial.clone();
        for op in &self.ops {
            rho.apply_gate(op)?;
        }
        Ok(rho)
    }

    /// Copy of the circuit with existing idle markers removed and fresh ones
    /// inserted. Gates are scheduled as soon as possible into unit-length
    /// moments; whenever a qubit sits untouched between two of its gates, an
    /// `IDLE(gap)` marker is placed just before the later gate, `gap` being
    /// the number of skipped moments.
    pub fn with_idle_markers(&self) -> Circuit {
        let mut last_moment: Vec<Option<usize>> = vec![None; self.num_qubits];
        let mut ops = Vec::with_capacity(self.ops.len() * 2);
        for op in self.ops.iter().filter(|op| !op.is_idle()) {
            let moment = op
                .qubits
                .iter()
                .filter_map(|&q| last_moment[q].map(|m| m + 1))
                .max()
                .unwrap_or(0);
            for &q in &op.qubits {
                if let Some(prev) = last_moment[q] {
                    let gap = moment - prev - 1;
                    if gap > 0 {
                        ops.push(GateOp::idle(q, gap as f64));
                    }
                }
                last_moment[q] = Some(moment);
            }
            ops.push(op.clone());
        }
        Circuit {
            num_qubits: self.num_qubits,
            ops,
        }
    }

    /// Sum of idle durations per qubit.
    pub fn idle_time(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.num_qubits];
        for op in &self.ops {
            if let super::GateKind::Idle(d) = op.kind {
                totals[op.qubits[0]] += d;
            }
        }
        totals
    }

    fn check_register(&self, n: usize) -> Result<()> {
        if n != self.num_qubits {
            return Err(Error::Dimension(format!(
                "{}-qubit circuit run on a {n}-qubit state",
                self.num_qubits
            )));
        }
        Ok(())
    }
}
