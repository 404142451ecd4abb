use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// In-place forward DFT `X_k = Σ_j x_j e^{−2πijk/N}`; `N` must be a power of two.
pub fn fft(buf: &mut [Complex64]) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n < 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    // exact twiddles rather than repeated multiplication
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|k| {
            let theta = -2.0 * PI * k as f64 / n as f64;
            Complex64::new(libm::cos(theta), libm::sin(theta))
        })
        .collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let w = twiddles[j * stride];
                let u = buf[start + j];
                let v = buf[start + j + half] * w;
                buf[start + j] = u + v;
                buf[start + j + half] = u - v;
            }
        }
        len <<= 1;
    }
}
