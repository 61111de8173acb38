use super::kernel::{apply_local, apply_local_conj};
use super::{check_outcome, check_qubit_count, GateOp, Matrix, StateVector, C64};
use crate::{linalg, Error, Result};

/// Mixed state of `num_qubits` qubits, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: Vec<C64>,
}

impl DensityMatrix {
    /// `|ψ><ψ|`.
    pub fn from_state(state: &StateVector) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in amps {
            entries.extend(amps.iter().map(|b| a * b.conj()));
        }
        Self {
            num_qubits: state.num_qubits(),
            entries,
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1 << num_qubits;
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self {
            num_qubits,
            entries,
        })
    }

    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        if !m.dim().is_power_of_two() {
            return Err(Error::Dimension(format!(
                "density dimension {} is not a power of two",
                m.dim()
            )));
        }
        let num_qubits = m.dim().trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        Ok(Self {
            num_qubits,
            entries: m.data().to_vec(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim() + col]
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec(self.dim(), self.entries.clone())
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.entries[i * d + i].re).sum()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // ρ Hermitian: tr(ρ²) = Σ |ρ_ij|²
        self.entries.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Conjugates by the gate unitary. Idle markers are no-ops here; noise
    /// models attach their channels separately.
    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match gate.kind.matrix() {
            Some(u) => {
                self.conjugate_in_place(&gate.qubits, &u);
                Ok(())
            }
            None => Ok(()),
        }
    }

    pub fn applied(&self, gate: &GateOp) -> Result<DensityMatrix> {
        let mut out = self.clone();
        out.apply_gate(gate)?;
        Ok(out)
    }

    /// `ρ → U ρ U†` with `U` acting on `targets` (bit `k` ↔ `targets[k]`).
    pub fn apply_unitary(&mut self, targets: &[usize], u: &Matrix) -> Result<()> {
        self.check_targets(targets, u)?;
        self.conjugate_in_place(targets, u);
        Ok(())
    }

    /// `ρ → Σ K ρ K†` over the Kraus set acting on `targets`.
    pub fn apply_kraus(&mut self, targets: &[usize], kraus: &[Matrix]) -> Result<()> {
        if kraus.is_empty() {
            return Err(Error::Noise("empty Kraus set".into()));
        }
        for k in kraus {
            self.check_targets(targets, k)?;
        }
        if let [single] = kraus {
            self.conjugate_in_place(targets, single);
            return Ok(());
        }
        let mut acc = vec![C64::new(0.0, 0.0); self.entries.len()];
        for k in kraus {
            let mut term = self.clone();
            term.conjugate_in_place(targets, k);
            for (a, t) in acc.iter_mut().zip(&term.entries) {
                *a += t;
            }
        }
        self.entries = acc;
        Ok(())
    }

    /// Depolarizing channel `ρ → (1 - p) ρ + p · I/2^k ⊗ tr_targets ρ` on
    /// `k = targets.len()` qubits, computed directly instead of as a sum
    /// over `4^k` Pauli conjugations.
    pub fn depolarize(&mut self, targets: &[usize], p: f64) -> Result<()> {
        self.check_targets(targets, &Matrix::identity(1 << targets.len()))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Noise(format!("depolarizing probability {p} outside [0, 1]")));
        }
        let d = self.dim();
        let mask: usize = targets.iter().map(|q| 1 << q).sum();
        let spread: Vec<usize> = (0..1usize << targets.len())
            .map(|t| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| t >> k & 1 == 1)
                    .map(|(_, q)| 1 << q)
                    .sum()
            })
            .collect();
        let weight = p / spread.len() as f64;
        let rest: Vec<usize> = (0..d).filter(|i| i & mask == 0).collect();
        let traced: Vec<C64> = rest
            .iter()
            .flat_map(|&i0| rest.iter().map(move |&j0| (i0, j0)))
            .map(|(i0, j0)| {
                spread
                    .iter()
                    .map(|t| self.entries[(i0 | t) * d + (j0 | t)])
                    .sum()
            })
            .collect();
        for v in self.entries.iter_mut() {
            *v *= 1.0 - p;
        }
        let pairs = rest.iter().flat_map(|&i0| rest.iter().map(move |&j0| (i0, j0)));
        for ((i0, j0), tr) in pairs.zip(traced) {
            for t in &spread {
                self.entries[(i0 | t) * d + (j0 | t)] += weight * tr;
            }
        }
        Ok(())
    }

    /// `tr(P ρ)` for the projector onto `outcome` of `qubit`.
    pub fn probability(&self, qubit: usize, outcome: u8) -> Result<f64> {
        if qubit >= self.num_qubits {
            return Err(Error::Dimension(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits
            )));
        }
        check_outcome(outcome)?;
        let d = self.dim();
        let bit = 1 << qubit;
        let want = if outcome == 1 { bit } else { 0 };
        Ok((0..d)
            .filter(|i| i & bit == want)
            .map(|i| self.entries[i * d + i].re)
            .sum())
    }

    /// Reduced state on `keep`; `keep[k]` becomes qubit `k` of the result.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_qubit_count(keep.len())?;
        for (k, &q) in keep.iter().enumerate() {
            if q >= self.num_qubits || keep[..k].contains(&q) {
                return Err(Error::Dimension(format!("invalid kept qubit {q}")));
            }
        }
        let traced: Vec<usize> = (0..self.num_qubits).filter(|q| !keep.contains(q)).collect();
        let kd = 1 << keep.len();
        let d = self.dim();
        let embed = |local: usize, positions: &[usize]| -> usize {
            positions
                .iter()
                .enumerate()
                .filter(|(b, _)| local >> b & 1 == 1)
                .map(|(_, &q)| 1 << q)
                .sum()
        };
        let mut out = vec![C64::new(0.0, 0.0); kd * kd];
        for r in 0..kd {
            let rb = embed(r, keep);
            for c in 0..kd {
                let cb = embed(c, keep);
                let mut s = C64::new(0.0, 0.0);
                for e in 0..(1 << traced.len()) {
                    let eb = embed(e, &traced);
                    s += self.entries[(rb | eb) * d + (cb | eb)];
                }
                out[r * kd + c] = s;
            }
        }
        Ok(DensityMatrix {
            num_qubits: keep.len(),
            entries: out,
        })
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        // Hermitian A + iB ↦ real symmetric [[A, -B], [B, A]]; each eigenvalue
        // appears twice in the embedding.
        let d = self.dim();
        let n = 2 * d;
        let mut real = vec![0.0; n * n];
        for i in 0..d {
            for j in 0..d {
                let v = self.entries[i * d + j];
                real[i * n + j] = v.re;
                real[(i + d) * n + j + d] = v.re;
                real[i * n + j + d] = -v.im;
                real[(i + d) * n + j] = v.im;
            }
        }
        let eig = linalg::symmetric_eigen(&real, n, 1e-14);
        eig.values.into_iter().step_by(2).collect()
    }

    /// Hermitian and unit trace within `tol`, no eigenvalue below `-1e-9`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                let diff = (self.entries[i * d + j] - self.entries[j * d + i].conj()).norm();
                if diff > tol {
                    return Err(Error::Dimension(format!(
                        "density matrix not Hermitian at ({i},{j}): {diff:e}"
                    )));
                }
            }
        }
        let t = self.trace();
        if (t - 1.0).abs() > tol {
            return Err(Error::Dimension(format!("density trace {t} != 1")));
        }
        let min = self.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -1e-9 {
            return Err(Error::Dimension(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    fn check_targets(&self, targets: &[usize], m: &Matrix) -> Result<()> {
        if m.dim() != 1 << targets.len() {
            return Err(Error::Dimension(format!(
                "{}x{} operator on {} qubit(s)",
                m.dim(),
                m.dim(),
                targets.len()
            )));
        }
        for (k, &q) in targets.iter().enumerate() {
            if q >= self.num_qubits || targets[..k].contains(&q) {
                return Err(Error::Dimension(format!("invalid target qubit {q}")));
            }
        }
        Ok(())
    }

    fn conjugate_in_place(&mut self, targets: &[usize], u: &Matrix) {
        let (n, d) = (self.num_qubits, self.dim());
        for col in 0..d {
            apply_local(&mut self.entries, col, d, n, targets, u);
        }
        for row in 0..d {
            apply_local_conj(&mut self.entries, row * d, 1, n, targets, u);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GateKind;

    #[test]
    fn to_density_examples() {
        let zero = StateVector::zero_state(1).unwrap();
        let rho = DensityMatrix::from_state(&zero);
        assert_eq!(rho.get(0, 0), C64::new(1.0, 0.0));
        assert_eq!(rho.get(1, 1), C64::new(0.0, 0.0));
        assert_eq!(rho.get(0, 1), C64::new(0.0, 0.0));

        let plus = zero.applied(&GateOp::h(0)).unwrap();
        let rho = DensityMatrix::from_state(&plus);
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.get(i, j) - C64::new(0.5, 0.0)).norm() < 1e-15);
            }
        }
        rho.check_invariants(1e-10).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_maps_zero_to_one() {
        let zero = StateVector::zero_state(1).unwrap();
        let one = zero.applied(&GateOp::x(0)).unwrap();
        let rho = DensityMatrix::from_state(&zero).applied(&GateOp::x(0)).unwrap();
        assert_eq!(rho, DensityMatrix::from_state(&one));
    }

    #[test]
    fn unitaries_fix_maximally_mixed() {
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        for op in [
            GateOp::h(0),
            GateOp::ry(1, 0.7),
            GateOp::cry(2, 0, 1.9),
            GateOp::cswap(1, 0, 2),
            GateOp::rx(2, -2.3),
        ] {
            let out = mixed.applied(&op).unwrap();
            assert!(out.to_matrix().max_abs_diff(&mixed.to_matrix()) < 1e-15);
        }
    }

    #[test]
    fn maximally_mixed_probabilities() {
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((mixed.probability(0, 0).unwrap() - 0.5).abs() < 1e-15);
        assert!((mixed.probability(0, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(mixed.probability(1, 0), Err(Error::Dimension(_))));
    }

    #[test]
    fn partial_trace_of_bell_state_is_mixed() {
        let mut s = StateVector::zero_state(2).unwrap();
        s.apply_gate(&GateOp::h(0)).unwrap();
        s.apply_gate(&GateOp::cnot(0, 1)).unwrap();
        let reduced = DensityMatrix::from_state(&s).partial_trace(&[1]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(reduced.to_matrix().max_abs_diff(&mixed.to_matrix()) < 1e-15);
    }

    #[test]
    fn eigenvalues_of_mixture() {
        let rho = DensityMatrix::from_matrix(&Matrix::from_rows(&[
            &[C64::new(0.75, 0.0), C64::new(0.0, 0.25)],
            &[C64::new(0.0, -0.25), C64::new(0.25, 0.0)],
        ]))
        .unwrap();
        let ev = rho.eigenvalues();
        let s = 0.125f64.sqrt();
        assert!((ev[0] - (0.5 + s)).abs() < 1e-12);
        assert!((ev[1] - (0.5 - s)).abs() < 1e-12);
        rho.check_invariants(1e-10).unwrap();
    }

    #[test]
    fn invariant_check_rejects_bad_matrices() {
        let not_psd = DensityMatrix::from_matrix(&Matrix::diag(&[
            C64::new(1.5, 0.0),
            C64::new(-0.5, 0.0),
        ]))
        .unwrap();
        assert!(not_psd.check_invariants(1e-10).is_err());
        let bad_trace =
            DensityMatrix::from_matrix(&Matrix::diag(&[C64::new(0.5, 0.0), C64::new(0.0, 0.0)]))
                .unwrap();
        assert!(bad_trace.check_invariants(1e-10).is_err());
    }

    #[test]
    fn kraus_dimension_mismatch_is_rejected() {
        let mut rho = DensityMatrix::maximally_mixed(2).unwrap();
        let two_qubit = GateKind::Cz.matrix().unwrap();
        assert!(rho.apply_kraus(&[0], &[two_qubit]).is_err());
        assert!(rho.apply_kraus(&[0], &[]).is_err());
    }
}
