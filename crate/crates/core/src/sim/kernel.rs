//! Index arithmetic shared by the state-vector and density-matrix paths.

use super::{Matrix, C64};

/// Inserts a zero bit at each position in `sorted_positions` (ascending).
#[inline]
fn spread(mut index: usize, sorted_positions: &[usize]) -> usize {
    for &p in sorted_positions {
        let low = index & ((1 << p) - 1);
        index = ((index >> p) << (p + 1)) | low;
    }
    index
}

/// Applies `m` to the qubits `targets` of a strided vector living inside
/// `buf`: element `i` of the logical vector is `buf[offset + i * stride]`.
/// Bit `k` of the matrix's local index corresponds to `targets[k]`.
pub(crate) fn apply_local(
    buf: &mut [C64],
    offset: usize,
    stride: usize,
    num_qubits: usize,
    targets: &[usize],
    m: &Matrix,
) {
    let k = targets.len();
    let local = 1usize << k;
    debug_assert_eq!(m.dim(), local);
    let mut sorted = targets.to_vec();
    sorted.sort_unstable();

    let mut masks = [0usize; 8];
    for (j, mask) in masks.iter_mut().enumerate().take(local) {
        *mask = targets
            .iter()
            .enumerate()
            .filter(|(bit, _)| j >> bit & 1 == 1)
            .map(|(_, &q)| 1 << q)
            .sum();
    }
    let mut gathered = [C64::new(0.0, 0.0); 8];
    let data = m.data();
    for base in 0..(1usize << (num_qubits - k)) {
        let b = spread(base, &sorted);
        for j in 0..local {
            gathered[j] = buf[offset + (b | masks[j]) * stride];
        }
        for r in 0..local {
            let row = &data[r * local..(r + 1) * local];
            let v: C64 = row.iter().zip(&gathered[..local]).map(|(a, x)| a * x).sum();
            buf[offset + (b | masks[r]) * stride] = v;
        }
    }
}

/// Same as [`apply_local`] with the elementwise conjugate of `m`.
pub(crate) fn apply_local_conj(
    buf: &mut [C64],
    offset: usize,
    stride: usize,
    num_qubits: usize,
    targets: &[usize],
    m: &Matrix,
) {
    let conj = Matrix::from_vec(m.dim(), m.data().iter().map(|v| v.conj()).collect());
    apply_local(buf, offset, stride, num_qubits, targets, &conj);
}
