use num_complex::Complex64;
use rustfft::FftPlanner;

pub(crate) fn forward(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

pub(crate) fn forward_real(input: &[f64]) -> Vec<Complex64> {
    let buf: Vec<Complex64> = input.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    forward(&buf)
}

/// Inverse transform scaled by 1/N.
pub(crate) fn inverse(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    let n = buf.len();
    FftPlanner::new()
        .plan_fft_inverse(n)
        .process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let x: Vec<f64> = (0..37).map(|i| (i as f64 * 0.7).sin() + 0.1 * i as f64).collect();
        let back = inverse(&forward_real(&x));
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b.re).abs() < 1e-12);
            assert!(b.im.abs() < 1e-12);
        }
    }
}
