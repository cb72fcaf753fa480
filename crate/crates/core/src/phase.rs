//! Exact arithmetic in `Z[ζ]/2^k` with `ζ = e^{iπ/4}`, enough to evaluate
//! the phase-factor projector formulas without floating point.

use std::ops::Mul;

/// `(c0 + c1 ζ + c2 ζ² + c3 ζ³) / 2^shift`, reduced so that not every
/// coefficient is even unless `shift == 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cyclo8 {
    coeffs: [i64; 4],
    shift: u32,
}

impl Cyclo8 {
    pub const ONE: Cyclo8 = Cyclo8 { coeffs: [1, 0, 0, 0], shift: 0 };

    pub fn integer(n: i64) -> Self {
        Cyclo8 { coeffs: [n, 0, 0, 0], shift: 0 }
    }

    /// `e^{iπ k / 4}`.
    pub fn zeta_pow(k: i64) -> Self {
        let k = k.rem_euclid(8) as usize;
        let mut coeffs = [0i64; 4];
        if k < 4 {
            coeffs[k] = 1;
        } else {
            coeffs[k - 4] = -1;
        }
        Cyclo8 { coeffs, shift: 0 }
    }

    /// `(1 + sign * e^{iπ k/4}) / 2`.
    pub fn half_sum(sign: i64, k: i64) -> Self {
        let z = Self::zeta_pow(k);
        let mut coeffs = z.coeffs.map(|c| sign * c);
        coeffs[0] += 1;
        Cyclo8 { coeffs, shift: 1 }.reduced()
    }

    fn reduced(mut self) -> Self {
        if self.coeffs.iter().all(|&c| c == 0) {
            return Cyclo8 { coeffs: [0; 4], shift: 0 };
        }
        while self.shift > 0 && self.coeffs.iter().all(|c| c % 2 == 0) {
            self.coeffs = self.coeffs.map(|c| c / 2);
            self.shift -= 1;
        }
        self
    }

    /// `Some(n)` when the value is the integer `n`.
    pub fn as_integer(&self) -> Option<i64> {
        (self.shift == 0 && self.coeffs[1..].iter().all(|&c| c == 0)).then_some(self.coeffs[0])
    }
}

impl Mul for Cyclo8 {
    type Output = Cyclo8;

    fn mul(self, rhs: Cyclo8) -> Cyclo8 {
        let mut out = [0i64; 4];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let k = i + j;
                if k < 4 {
                    out[k] += a * b;
                } else {
                    out[k - 4] -= a * b;
                }
            }
        }
        Cyclo8 { coeffs: out, shift: self.shift + rhs.shift }.reduced()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eighth_roots() {
        let z = Cyclo8::zeta_pow(1);
        let mut p = Cyclo8::ONE;
        for _ in 0..8 {
            p = p * z;
        }
        assert_eq!(p, Cyclo8::ONE);
        assert_eq!((Cyclo8::zeta_pow(2) * Cyclo8::zeta_pow(2)).as_integer(), Some(-1));
        assert_eq!(Cyclo8::zeta_pow(-3), Cyclo8::zeta_pow(5));
    }

    #[test]
    fn half_sums() {
        assert_eq!(Cyclo8::half_sum(1, 0).as_integer(), Some(1));
        assert_eq!(Cyclo8::half_sum(-1, 0).as_integer(), Some(0));
        assert_eq!(Cyclo8::half_sum(1, 4).as_integer(), Some(0));
        // (1 + i)/2 is not an integer
        assert_eq!(Cyclo8::half_sum(1, 2).as_integer(), None);
        // (1+i)/2 * (1-i)/2 = 1/2
        let h = Cyclo8::half_sum(1, 2) * Cyclo8::half_sum(-1, 2);
        assert_eq!(h.as_integer(), None);
        assert_eq!(h * Cyclo8::integer(2), Cyclo8::ONE);
    }
}
