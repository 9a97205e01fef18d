//! C^∞ building blocks: the bump exp(1 − 1/(1−u²)) and plateau cutoffs built
//! from the exp(−1/x) germ.

/// exp(1 − 1/(1−u²)) on (−1, 1), zero outside; equals 1 at u = 0.
pub fn unit_bump(u: f64) -> f64 {
    let q = 1.0 - u * u;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

fn germ(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth monotone step: 0 for u ≤ 0, 1 for u ≥ 1.
pub fn smooth_step(u: f64) -> f64 {
    let a = germ(u);
    let b = germ(1.0 - u);
    if a + b == 0.0 {
        // Only reachable outside [0, 1].
        return if u >= 1.0 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// 1 for r ≤ inner, 0 for r ≥ outer, smooth and monotone in between.
pub fn plateau(r: f64, inner: f64, outer: f64) -> f64 {
    1.0 - smooth_step((r - inner) / (outer - inner))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        assert_eq!(unit_bump(0.0), 1.0);
        assert_eq!(unit_bump(1.0), 0.0);
        assert_eq!(unit_bump(-1.5), 0.0);
        assert!((unit_bump(0.5) - unit_bump(-0.5)).abs() < 1e-16);
        assert!(unit_bump(0.999) < 1e-200);
    }

    #[test]
    fn step_is_monotone_and_symmetric() {
        let mut prev = 0.0;
        for i in 0..=1000 {
            let u = i as f64 / 1000.0;
            let v = smooth_step(u);
            assert!(v >= prev);
            assert!((v + smooth_step(1.0 - u) - 1.0).abs() < 1e-14);
            prev = v;
        }
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(1.1), 1.0);
    }

    #[test]
    fn plateau_limits() {
        assert_eq!(plateau(1.9, 2.0, 4.0), 1.0);
        assert_eq!(plateau(4.0, 2.0, 4.0), 0.0);
        assert!((plateau(3.0, 2.0, 4.0) - 0.5).abs() < 1e-15);
    }
}
