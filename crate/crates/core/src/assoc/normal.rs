use libm::erfc;
use statrs::function::erf::erfc_inv;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal CDF Φ(x), evaluated through `erfc` so both tails keep
/// full relative precision.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Inverse standard normal CDF; returns ±∞ at 0 and 1.
pub fn std_normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    // Work in the lower tail for relative accuracy, then polish with Halley.
    let (q, sign) = if p > 0.5 { (1.0 - p, -1.0) } else { (p, 1.0) };
    let mut x = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * q);
    for _ in 0..2 {
        let f = std_normal_pdf(x);
        if f == 0.0 {
            break;
        }
        let r = (std_normal_cdf(x) - q) / f;
        x -= r / (1.0 + 0.5 * x * r);
    }
    sign * x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetry_point() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
    }

    #[test]
    fn upper_quantile() {
        // Φ(1.959964) from 30-digit evaluation.
        assert!((std_normal_cdf(1.959964) - 0.975_000_000_903_557_6).abs() < 1e-12);
        assert!((std_normal_cdf(1.959964) - 0.975).abs() < 1e-6);
    }

    #[test]
    fn far_tail() {
        let v = std_normal_cdf(-8.0);
        assert!(v <= 1e-15);
        assert!((v - 6.220_960_574_271_784e-16).abs() < 1e-28);
    }

    #[test]
    fn reference_points() {
        // 30-digit references.
        for (x, want) in [
            (-1.0, 0.158_655_253_931_457_05),
            (0.5, 0.691_462_461_274_013_1),
            (2.5, 0.993_790_334_674_223_8),
            (-3.7, 1.077_997_334_773_883e-4),
        ] {
            assert!((std_normal_cdf(x) - want).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for p in [1e-10, 0.001, 0.27, 0.5, 0.62, 0.975, 1.0 - 1e-9] {
            let x = std_normal_quantile(p);
            assert!((std_normal_cdf(x) - p).abs() < 1e-12 * p.max(1e-3), "{p}");
        }
        assert_eq!(std_normal_quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(std_normal_quantile(1.0), f64::INFINITY);
    }
}
