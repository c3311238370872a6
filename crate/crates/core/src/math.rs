//! Small float helpers that `core` does not provide.

#[inline]
pub(crate) fn powu(mut base: f64, mut exp: usize) -> f64 {
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// Binomial coefficient as a float; exact for the small degrees used here.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    libm::round(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        let row: alloc::vec::Vec<f64> = (0..=5).map(|k| binomial(5, k)).collect();
        assert_eq!(row, [1.0, 5.0, 10.0, 10.0, 5.0, 1.0]);
        assert_eq!(binomial(3, 4), 0.0);
    }

    #[test]
    fn integer_powers() {
        assert_eq!(powu(0.5, 5), 0.03125);
        assert_eq!(powu(3.0, 0), 1.0);
        assert_eq!(powu(0.0, 0), 1.0);
        assert_eq!(powu(-2.0, 3), -8.0);
    }
}
