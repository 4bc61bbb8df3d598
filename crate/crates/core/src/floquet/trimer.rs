//! Closed-form populations of the unit-filling Bose-Hubbard trimer.

use crate::linalg::{C64, I};

/// `(P0, P1, P2)` under the integer drive: `cos²(√2 J0 t)` and `sin²(√2 J0 t)/2`.
pub fn trimer_populations_integer(j0: f64, t: f64) -> (f64, f64, f64) {
    let x = std::f64::consts::SQRT_2 * j0 * t;
    let s = x.sin().powi(2);
    (x.cos().powi(2), 0.5 * s, 0.5 * s)
}

/// Effective two-level problem of the fractional drive on `{ψ0, ψ3}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrimerOracle {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lambda: f64,
}

impl TrimerOracle {
    pub fn new(j0: f64, u: f64) -> Self {
        let r = j0 * j0 / u;
        let (a, b, c) = (16.0 * r / 3.0, 3.0 * r, 4.0 * r / 5.0);
        let lambda = ((a - c).powi(2) + 4.0 * b * b).sqrt() / 2.0;
        Self { a, b, c, lambda }
    }

    /// Amplitudes `(c0, c1)` on ψ0 and ψ3.
    pub fn amplitudes(&self, t: f64) -> (C64, C64) {
        let Self { a, b, c, lambda } = *self;
        let c0 = ((2.0 * lambda + a - c) * (-0.5 * I * t * (2.0 * lambda + a + c)).exp()
            + (2.0 * lambda - a + c) * (0.5 * I * t * (2.0 * lambda - a - c)).exp())
            / (4.0 * lambda);
        let c1 = -I * b * (-0.5 * I * t * (a + c)).exp() * (lambda * t).sin() / lambda;
        (c0, c1)
    }

    /// `(P0, P3)`.
    pub fn populations(&self, t: f64) -> (f64, f64) {
        let Self { a, b, c, lambda } = *self;
        let cos = (2.0 * lambda * t).cos();
        let l2 = lambda * lambda;
        (
            (2.0 * b * b * cos + (a - c).powi(2) + 2.0 * b * b) / (4.0 * l2),
            b * b * (1.0 - cos) / (2.0 * l2),
        )
    }

    pub fn max_transfer(&self) -> f64 {
        (self.b / self.lambda).powi(2)
    }

    pub fn peak_time(&self) -> f64 {
        std::f64::consts::PI / (2.0 * self.lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn integer_populations() {
        assert_eq!(trimer_populations_integer(0.01, 0.0), (1.0, 0.0, 0.0));
        let t = PI / (2.0 * 2f64.sqrt() * 0.01);
        let (p0, p1, p2) = trimer_populations_integer(0.01, t);
        assert_abs_diff_eq!(p0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p2, 0.5, epsilon = 1e-15);
        // full transfer after 10/√2 periods of 2π/U
        let u = 0.4;
        assert_abs_diff_eq!(t / (2.0 * PI / u), 10.0 / 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn fractional_constants() {
        let o = TrimerOracle::new(0.01, 0.4);
        assert_abs_diff_eq!(o.lambda / (0.01 * 0.01 / 0.4), 3.76, epsilon = 1e-3);
        // b²/λ² = 8100/12724
        assert_abs_diff_eq!(o.max_transfer(), 8100.0 / 12724.0, epsilon = 1e-12);
        let periods = o.peak_time() / (4.0 * PI / 0.4);
        assert!((periods - 53.0).abs() < 1.0, "{periods}");
        assert_eq!(o.populations(0.0), (1.0, 0.0));
    }

    #[test]
    fn amplitudes_match_populations() {
        let o = TrimerOracle::new(0.01, 0.4);
        for t in [0.0, 100.0, 1234.5, 9000.0] {
            let (c0, c1) = o.amplitudes(t);
            let (p0, p3) = o.populations(t);
            assert_abs_diff_eq!(c0.norm_sqr(), p0, epsilon = 1e-12);
            assert_abs_diff_eq!(c1.norm_sqr(), p3, epsilon = 1e-12);
            assert_abs_diff_eq!(p0 + p3, 1.0, epsilon = 1e-12);
        }
    }
}
