use std::ops::{Add, Mul, Neg, Sub};

use super::octonion::{Basis, Octonion};
use super::tables::SplitUnit;
use crate::Scalar;

pub type Vec3 = [Scalar; 3];

const ZERO: Scalar = Scalar::new(0.0, 0.0);

pub fn dot(a: &Vec3, b: &Vec3) -> Scalar {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Cross product with `e_1 x e_2 = e_3`.
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn axpby(a: Scalar, x: &Vec3, b: Scalar, y: &Vec3) -> Vec3 {
    std::array::from_fn(|i| a * x[i] + b * y[i])
}

/// Zorn vector matrix
///
/// ```text
/// ( a  x )
/// ( y  b )
/// ```
///
/// with scalar diagonal and 3-vector off-diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZornMatrix {
    pub a: Scalar,
    pub x: Vec3,
    pub y: Vec3,
    pub b: Scalar,
}

impl ZornMatrix {
    pub fn new(a: Scalar, x: Vec3, y: Vec3, b: Scalar) -> Self {
        Self { a, x, y, b }
    }

    pub fn zero() -> Self {
        Self::new(ZERO, [ZERO; 3], [ZERO; 3], ZERO)
    }

    pub fn identity() -> Self {
        let one = Scalar::new(1.0, 0.0);
        Self::new(one, [ZERO; 3], [ZERO; 3], one)
    }

    /// Zorn product:
    ///
    /// ```text
    /// (a x; y b)(c u; v d) = ( ac + x.v          au + dx - y*v )
    ///                        ( cy + bv + x*u     bd + y.u      )
    /// ```
    pub fn mul_zorn(&self, rhs: &ZornMatrix) -> ZornMatrix {
        let (a, x, y, b) = (self.a, &self.x, &self.y, self.b);
        let (c, u, v, d) = (rhs.a, &rhs.x, &rhs.y, rhs.b);
        let yv = cross(y, v);
        let xu = cross(x, u);
        let top_right: Vec3 = std::array::from_fn(|i| a * u[i] + d * x[i] - yv[i]);
        let bottom_left: Vec3 = std::array::from_fn(|i| c * y[i] + b * v[i] + xu[i]);
        ZornMatrix::new(a * c + dot(x, v), top_right, bottom_left, b * d + dot(y, u))
    }

    /// `ab - x.y`, multiplicative under [`Self::mul_zorn`].
    pub fn norm(&self) -> Scalar {
        self.a * self.b - dot(&self.x, &self.y)
    }

    pub fn scale(&self, s: Scalar) -> ZornMatrix {
        ZornMatrix::new(self.a * s, self.x.map(|c| c * s), self.y.map(|c| c * s), self.b * s)
    }

    /// Matrix image of a split octonion:
    /// `u_0* -> (1 0; 0 0)`, `u_0 -> (0 0; 0 1)`, `u_i* -> (0 -e_i; 0 0)`, `u_i -> (0 0; e_i 0)`.
    pub fn from_octonion(z: &Octonion) -> ZornMatrix {
        let s = z.to_split();
        let c = |u: SplitUnit| s.coeff(u.index());
        ZornMatrix::new(
            c(SplitUnit::U0c),
            std::array::from_fn(|i| -c(SplitUnit::u_star(i + 1))),
            std::array::from_fn(|i| c(SplitUnit::u(i + 1))),
            c(SplitUnit::U0),
        )
    }

    /// Inverse of [`Self::from_octonion`], returned in the split basis.
    pub fn to_octonion(&self) -> Octonion {
        let mut s = [ZERO; 8];
        s[SplitUnit::U0c.index()] = self.a;
        s[SplitUnit::U0.index()] = self.b;
        for i in 0..3 {
            s[SplitUnit::u_star(i + 1).index()] = -self.x[i];
            s[SplitUnit::u(i + 1).index()] = self.y[i];
        }
        Octonion::new(s, Basis::Split)
    }

    pub fn max_abs(&self) -> f64 {
        std::iter::once(self.a)
            .chain(self.x)
            .chain(self.y)
            .chain(std::iter::once(self.b))
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ZornMatrix, tol: f64) -> bool {
        (*self - *other).max_abs() <= tol
    }
}

/// `to_zorn` in free-function form.
pub fn to_zorn(z: &Octonion) -> ZornMatrix {
    ZornMatrix::from_octonion(z)
}

/// `from_zorn` in free-function form.
pub fn from_zorn(m: &ZornMatrix) -> Octonion {
    m.to_octonion()
}

impl Add for ZornMatrix {
    type Output = ZornMatrix;
    fn add(self, r: ZornMatrix) -> ZornMatrix {
        let one = Scalar::new(1.0, 0.0);
        ZornMatrix::new(self.a + r.a, axpby(one, &self.x, one, &r.x), axpby(one, &self.y, one, &r.y), self.b + r.b)
    }
}

impl Neg for ZornMatrix {
    type Output = ZornMatrix;
    fn neg(self) -> ZornMatrix {
        self.scale(Scalar::new(-1.0, 0.0))
    }
}

impl Sub for ZornMatrix {
    type Output = ZornMatrix;
    fn sub(self, r: ZornMatrix) -> ZornMatrix {
        self + (-r)
    }
}

impl Mul for ZornMatrix {
    type Output = ZornMatrix;
    fn mul(self, r: ZornMatrix) -> ZornMatrix {
        self.mul_zorn(&r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SplitUnit::*;

    fn r(x: f64) -> Scalar {
        Scalar::new(x, 0.0)
    }

    fn z(u: SplitUnit) -> ZornMatrix {
        to_zorn(&Octonion::split_unit(u))
    }

    #[test]
    fn hand_evaluated_product() {
        // (1, e1; 0, 0)(0, e2; 0, 1): top-left 0, top-right 1*e2 + 1*e1,
        // bottom-left e1 x e2 = e3, bottom-right 0.
        let a = ZornMatrix::new(r(1.0), [r(1.0), r(0.0), r(0.0)], [r(0.0); 3], r(0.0));
        let b = ZornMatrix::new(r(0.0), [r(0.0), r(1.0), r(0.0)], [r(0.0); 3], r(1.0));
        let expected = ZornMatrix::new(r(0.0), [r(1.0), r(1.0), r(0.0)], [r(0.0), r(0.0), r(1.0)], r(0.0));
        assert_eq!(a * b, expected);
        // Reverse order: the top-right block vanishes and the cross term flips sign.
        let expected_rev = ZornMatrix::new(r(0.0), [r(0.0); 3], [r(0.0), r(0.0), r(-1.0)], r(0.0));
        assert_eq!(b * a, expected_rev);
    }

    #[test]
    fn basis_images() {
        assert_eq!(z(U0c), ZornMatrix::new(r(1.0), [r(0.0); 3], [r(0.0); 3], r(0.0)));
        assert_eq!(z(U0), ZornMatrix::new(r(0.0), [r(0.0); 3], [r(0.0); 3], r(1.0)));
        assert_eq!(z(U2), ZornMatrix::new(r(0.0), [r(0.0); 3], [r(0.0), r(1.0), r(0.0)], r(0.0)));
        assert_eq!(z(U3c), ZornMatrix::new(r(0.0), [r(0.0), r(0.0), r(-1.0)], [r(0.0); 3], r(0.0)));
    }

    #[test]
    fn products_of_images() {
        assert_eq!(z(U1) * z(U2), z(U3c));
        assert_eq!(z(U3c), ZornMatrix::new(r(0.0), [r(0.0), r(0.0), r(-1.0)], [r(0.0); 3], r(0.0)));
        assert_eq!(z(U1) * z(U1c), -z(U0));
    }

    #[test]
    fn norms() {
        assert_eq!(ZornMatrix::identity().norm(), r(1.0));
        assert_eq!(z(U0).norm(), r(0.0));
    }

    #[test]
    fn zero_divisors() {
        let p = z(U1) * z(U0);
        assert_eq!(p, ZornMatrix::zero());
        assert!(z(U1).max_abs() > 0.0 && z(U0).max_abs() > 0.0);
    }
}
