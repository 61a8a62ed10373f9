//! Complex scalar arithmetic and numerically stable quadratic roots.

/// Complex number with `f64` components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexScalar {
    pub re: f64,
    pub im: f64,
}

impl ComplexScalar {
    pub const fn new(re: f64, im: f64) -> Self {
        ComplexScalar { re, im }
    }

    pub const fn real(re: f64) -> Self {
        ComplexScalar { re, im: 0.0 }
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn conj(&self) -> Self {
        ComplexScalar::new(self.re, -self.im)
    }

    pub fn add(&self, o: ComplexScalar) -> Self {
        ComplexScalar::new(self.re + o.re, self.im + o.im)
    }

    pub fn sub(&self, o: ComplexScalar) -> Self {
        ComplexScalar::new(self.re - o.re, self.im - o.im)
    }

    pub fn mul(&self, o: ComplexScalar) -> Self {
        ComplexScalar::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexScalar::new(s * self.re, s * self.im)
    }

    pub fn div(&self, o: ComplexScalar) -> Self {
        // Smith's algorithm avoids overflow for wide magnitude ranges.
        if o.re.abs() >= o.im.abs() {
            let r = o.im / o.re;
            let d = o.re + o.im * r;
            ComplexScalar::new((self.re + self.im * r) / d, (self.im - self.re * r) / d)
        } else {
            let r = o.re / o.im;
            let d = o.re * r + o.im;
            ComplexScalar::new((self.re * r + self.im) / d, (self.im * r - self.re) / d)
        }
    }

    /// `e^{i theta}` scaled by `r`.
    pub fn from_polar(r: f64, theta: f64) -> Self {
        ComplexScalar::new(r * theta.cos(), r * theta.sin())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Both roots of `s^2 + b s + c`.
///
/// The larger-magnitude root is formed first to avoid cancellation; the
/// other follows from the product of roots `c / s1` when `s1 != 0`.
pub fn quadratic_roots(b: f64, c: f64) -> (ComplexScalar, ComplexScalar) {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // -(b + sign(b) sqrt(disc)) / 2 has no cancellation.
        let s1 = if b >= 0.0 { -(b + sq) / 2.0 } else { (-b + sq) / 2.0 };
        let s2 = if s1 != 0.0 { c / s1 } else { 0.0 };
        (ComplexScalar::real(s1), ComplexScalar::real(s2))
    } else {
        let re = -b / 2.0;
        let im = (-disc).sqrt() / 2.0;
        (ComplexScalar::new(re, im), ComplexScalar::new(re, -im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn factored_real_roots() {
        // (s - 1)(s - 2) = s^2 - 3s + 2
        let (s1, s2) = quadratic_roots(-3.0, 2.0);
        let mut roots = [s1.re, s2.re];
        roots.sort_by(f64::total_cmp);
        assert!((roots[0] - 1.0).abs() < 1e-14);
        assert!((roots[1] - 2.0).abs() < 1e-14);
        assert_eq!(s1.im, 0.0);
    }

    #[test]
    fn unit_imaginary_pair() {
        let (s1, s2) = quadratic_roots(0.0, 1.0);
        assert!((s1.abs() - 1.0).abs() < 1e-15);
        assert_eq!(s1.re, 0.0);
        assert_eq!(s1.im, -s2.im);
    }

    #[test]
    fn double_zero() {
        let (s1, s2) = quadratic_roots(0.0, 0.0);
        assert_eq!((s1.re, s1.im), (0.0, 0.0));
        assert_eq!((s2.re, s2.im), (0.0, 0.0));
    }

    #[test]
    fn vieta_on_random_coefficients() {
        let mut rng = Rng::seed_from(3);
        for _ in 0..500 {
            let b = 10.0 * rng.next_gaussian();
            let c = 10.0 * rng.next_gaussian();
            let (s1, s2) = quadratic_roots(b, c);
            let sum = s1.add(s2);
            let prod = s1.mul(s2);
            let scale_b = b.abs().max(1.0);
            let scale_c = c.abs().max(1.0);
            assert!((sum.re + b).abs() / scale_b < 1e-12, "sum: {} vs {}", sum.re, -b);
            assert!(sum.im.abs() / scale_b < 1e-12);
            assert!((prod.re - c).abs() / scale_c < 1e-12);
            assert!(prod.im.abs() / scale_c < 1e-12);
        }
    }

    #[test]
    fn complex_division_roundtrip() {
        let a = ComplexScalar::new(3.0, -4.0);
        let b = ComplexScalar::new(-1.5, 2.0);
        let q = a.div(b).mul(b);
        assert!((q.re - a.re).abs() < 1e-14);
        assert!((q.im - a.im).abs() < 1e-14);
    }
}
