use super::gate::half_angle;
use super::{check_outcome, check_qubit_count, GateKind, GateOp, C64};
use crate::{Error, Result};

/// Pure state of `num_qubits` qubits as `2^num_qubits` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; the norm is
    /// not checked so that linear combinations can be represented.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Dimension(format!(
                "inner product of {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Applies `gate` in place. Idle markers are no-ops.
    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.num_qubits)?;
        let q = &gate.qubits;
        match gate.kind {
            GateKind::Idle(_) => {}
            GateKind::X => self.for_pairs(q[0], std::mem::swap),
            GateKind::Z => self.phase_on(1 << q[0], C64::new(-1.0, 0.0)),
            GateKind::Rz(t) => {
                let p = C64::from_polar(1.0, t / 2.0);
                let (lo, hi) = (p.conj(), p);
                self.for_pairs(q[0], |a, b| {
                    *a *= lo;
                    *b *= hi;
                });
            }
            GateKind::Cz => self.phase_on((1 << q[0]) | (1 << q[1]), C64::new(-1.0, 0.0)),
            GateKind::Cnot => self.for_pairs_controlled(q[0], q[1], std::mem::swap),
            GateKind::Cry(t) => {
                let (c, s) = half_angle(t);
                self.for_pairs_controlled(q[0], q[1], |a, b| {
                    let (x, y) = (*a, *b);
                    *a = x * c - y * s;
                    *b = x * s + y * c;
                });
            }
            GateKind::Cswap => {
                let (c, a, b) = (1 << q[0], 1 << q[1], 1 << q[2]);
                for i in 0..self.amps.len() {
                    // visit each swapped pair once, from its a=1,b=0 member
                    if i & c != 0 && i & a != 0 && i & b == 0 {
                        self.amps.swap(i, (i & !a) | b);
                    }
                }
            }
            kind => {
                let m = kind.matrix().expect("non-idle gate has a matrix");
                let (m00, m01, m10, m11) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
                self.for_pairs(q[0], |a, b| {
                    let (x, y) = (*a, *b);
                    *a = m00 * x + m01 * y;
                    *b = m10 * x + m11 * y;
                });
            }
        }
        Ok(())
    }

    /// Value-returning form of [`StateVector::apply_gate`].
    pub fn applied(&self, gate: &GateOp) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_gate(gate)?;
        Ok(out)
    }

    /// Probability of reading `outcome` on `qubit`.
    pub fn probability(&self, qubit: usize, outcome: u8) -> Result<f64> {
        if qubit >= self.num_qubits {
            return Err(Error::Dimension(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits
            )));
        }
        check_outcome(outcome)?;
        let bit = 1 << qubit;
        let want = if outcome == 1 { bit } else { 0 };
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn for_pairs(&mut self, qubit: usize, mut f: impl FnMut(&mut C64, &mut C64)) {
        let bit = 1 << qubit;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (lo, hi) = self.amps.split_at_mut(i | bit);
                f(&mut lo[i], &mut hi[0]);
            }
        }
    }

    fn for_pairs_controlled(
        &mut self,
        control: usize,
        target: usize,
        mut f: impl FnMut(&mut C64, &mut C64),
    ) {
        let (c, t) = (1 << control, 1 << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                let (lo, hi) = self.amps.split_at_mut(i | t);
                f(&mut lo[i], &mut hi[0]);
            }
        }
    }

    fn phase_on(&mut self, mask: usize, phase: C64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }
}
