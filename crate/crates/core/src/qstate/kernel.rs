//! Bitmask kernels over raw amplitude slices. No full 2^n x 2^n matrix is
//! ever formed: a single-target gate touches amplitude pairs (i, i | 1<<t)
//! whose control bits satisfy the masks.

use super::gate::{Mat2, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
fn fires(i: usize, controls: usize, open: usize) -> bool {
    i & controls == controls && i & open == 0
}

/// `amps <- G amps` where G applies `m` to `target` whenever the control masks fire.
pub fn apply(amps: &mut [C64], target: usize, controls: usize, open: usize, m: &Mat2) {
    let stride = 1usize << target;
    let len = amps.len();
    debug_assert!(stride < len);
    let is_swap = m[0][0] == ZERO && m[1][1] == ZERO && m[0][1] == ONE && m[1][0] == ONE;
    let is_diag = m[0][1] == ZERO && m[1][0] == ZERO;
    let mut block = 0;
    while block < len {
        for i0 in block..block + stride {
            if !fires(i0, controls, open) {
                continue;
            }
            let i1 = i0 | stride;
            if is_swap {
                amps.swap(i0, i1);
            } else if is_diag {
                amps[i0] *= m[0][0];
                amps[i1] *= m[1][1];
            } else {
                let (a0, a1) = (amps[i0], amps[i1]);
                amps[i0] = m[0][0] * a0 + m[0][1] * a1;
                amps[i1] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        block += 2 * stride;
    }
}

/// Like [`apply`] but amplitudes outside the firing subspace are set to zero
/// instead of being left alone. This realizes `|c><c| (x) m`, the derivative
/// of a controlled rotation.
pub fn apply_projected(amps: &mut [C64], target: usize, controls: usize, open: usize, m: &Mat2) {
    let stride = 1usize << target;
    let len = amps.len();
    let mut block = 0;
    while block < len {
        for i0 in block..block + stride {
            let i1 = i0 | stride;
            if fires(i0, controls, open) {
                let (a0, a1) = (amps[i0], amps[i1]);
                amps[i0] = m[0][0] * a0 + m[0][1] * a1;
                amps[i1] = m[1][0] * a0 + m[1][1] * a1;
            } else {
                amps[i0] = ZERO;
                amps[i1] = ZERO;
            }
        }
        block += 2 * stride;
    }
}

pub fn expectation_z(amps: &[C64], qubit: usize) -> f64 {
    let mut acc = 0.0;
    for (i, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        if (i >> qubit) & 1 == 0 {
            acc += p;
        } else {
            acc -= p;
        }
    }
    acc
}

/// `Re <a|b>`.
pub fn real_inner(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}
