use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use super::tables::{split_table, SplitUnit, StructureTable};
use crate::Scalar;

/// Default absolute tolerance for approximate equality of algebra values.
pub const DEFAULT_TOL: f64 = 1e-12;

const I: Scalar = Scalar::new(0.0, 1.0);
const HALF: Scalar = Scalar::new(0.5, 0.0);

/// Which basis the eight coefficients of an [`Octonion`] refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `1, e_1, ..., e_7`.
    Real,
    /// `u_0, u_0*, u_1, u_2, u_3, u_1*, u_2*, u_3*`.
    Split,
}

/// An element of the complexified octonion algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Octonion {
    coeffs: [Scalar; 8],
    basis: Basis,
}

impl Octonion {
    pub fn new(coeffs: [Scalar; 8], basis: Basis) -> Self {
        Self { coeffs, basis }
    }

    pub fn from_real_parts(parts: [f64; 8], basis: Basis) -> Self {
        Self::new(parts.map(|p| Scalar::new(p, 0.0)), basis)
    }

    pub fn zero(basis: Basis) -> Self {
        Self::new([Scalar::new(0.0, 0.0); 8], basis)
    }

    pub fn one(basis: Basis) -> Self {
        Self::scalar(Scalar::new(1.0, 0.0), basis)
    }

    /// `c * 1` in the given basis.
    pub fn scalar(c: Scalar, basis: Basis) -> Self {
        let mut z = Self::zero(basis);
        match basis {
            Basis::Real => z.coeffs[0] = c,
            Basis::Split => {
                z.coeffs[SplitUnit::U0.index()] = c;
                z.coeffs[SplitUnit::U0c.index()] = c;
            }
        }
        z
    }

    /// `e_a` for `a` in `0..8`, with `e_0 = 1`.
    pub fn real_unit(a: usize) -> Self {
        let mut z = Self::zero(Basis::Real);
        z.coeffs[a] = Scalar::new(1.0, 0.0);
        z
    }

    pub fn split_unit(u: SplitUnit) -> Self {
        let mut z = Self::zero(Basis::Split);
        z.coeffs[u.index()] = Scalar::new(1.0, 0.0);
        z
    }

    pub fn coeffs(&self) -> &[Scalar; 8] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs[i]
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn to_basis(&self, basis: Basis) -> Self {
        match (self.basis, basis) {
            (Basis::Real, Basis::Split) => self.real_to_split(),
            (Basis::Split, Basis::Real) => self.split_to_real(),
            _ => *self,
        }
    }

    pub fn to_split(&self) -> Self {
        self.to_basis(Basis::Split)
    }

    pub fn to_real(&self) -> Self {
        self.to_basis(Basis::Real)
    }

    // u_i = (e_i + i e_{i+3})/2, u_i* = (e_i - i e_{i+3})/2,
    // u_0 = (1 + i e_7)/2,        u_0* = (1 - i e_7)/2.
    fn split_to_real(&self) -> Self {
        let s = &self.coeffs;
        let mut r = [Scalar::new(0.0, 0.0); 8];
        let (u0, u0c) = (s[SplitUnit::U0.index()], s[SplitUnit::U0c.index()]);
        r[0] = HALF * (u0 + u0c);
        r[7] = HALF * I * (u0 - u0c);
        for i in 1..=3 {
            let (u, uc) = (s[SplitUnit::u(i).index()], s[SplitUnit::u_star(i).index()]);
            r[i] = HALF * (u + uc);
            r[i + 3] = HALF * I * (u - uc);
        }
        Self::new(r, Basis::Real)
    }

    // Inverse map: 1 = u_0 + u_0*, e_7 = -i (u_0 - u_0*),
    // e_i = u_i + u_i*, e_{i+3} = -i (u_i - u_i*).
    fn real_to_split(&self) -> Self {
        let r = &self.coeffs;
        let mut s = [Scalar::new(0.0, 0.0); 8];
        s[SplitUnit::U0.index()] = r[0] - I * r[7];
        s[SplitUnit::U0c.index()] = r[0] + I * r[7];
        for i in 1..=3 {
            s[SplitUnit::u(i).index()] = r[i] - I * r[i + 3];
            s[SplitUnit::u_star(i).index()] = r[i] + I * r[i + 3];
        }
        Self::new(s, Basis::Split)
    }

    /// Product through the split-basis table; the result carries `self`'s basis.
    pub fn mul_oct(&self, rhs: &Octonion) -> Octonion {
        let a = self.to_split();
        let b = rhs.to_split();
        let table = split_table();
        let mut out = [Scalar::new(0.0, 0.0); 8];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == Scalar::new(0.0, 0.0) {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                if let Some((sign, k)) = table[i][j] {
                    out[k] += x * y * f64::from(sign);
                }
            }
        }
        Octonion::new(out, Basis::Split).to_basis(self.basis)
    }

    /// Product through the structure constants of the real basis.
    ///
    /// Independent of the split table; kept as a cross-check for [`Self::mul_oct`].
    pub fn mul_structure(&self, rhs: &Octonion) -> Octonion {
        let a = self.to_real();
        let b = rhs.to_real();
        let table = StructureTable::get();
        let mut out = [Scalar::new(0.0, 0.0); 8];
        for (i, &x) in a.coeffs.iter().enumerate() {
            for (j, &y) in b.coeffs.iter().enumerate() {
                let (sign, k) = table.unit_product(i, j);
                out[k] += x * y * f64::from(sign);
            }
        }
        Octonion::new(out, Basis::Real).to_basis(self.basis)
    }

    /// Algebra conjugation: negates the `e_1..e_7` coefficients. Coefficients are
    /// not complex-conjugated.
    pub fn conj(&self) -> Octonion {
        let mut r = self.to_real();
        for c in &mut r.coeffs[1..] {
            *c = -*c;
        }
        r.to_basis(self.basis)
    }

    /// Coefficient of `1` in the real basis.
    pub fn scalar_part(&self) -> Scalar {
        self.to_real().coeffs[0]
    }

    /// Scalar part of `z conj(z)`.
    pub fn quadratic_form(&self) -> Scalar {
        self.mul_oct(&self.conj()).scalar_part()
    }

    pub fn scale(&self, c: Scalar) -> Octonion {
        Octonion::new(self.coeffs.map(|x| x * c), self.basis)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Maximum coefficient distance, compared in `self`'s basis.
    pub fn distance(&self, other: &Octonion) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn approx_eq(&self, other: &Octonion, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
}

/// `(xy)z - x(yz)`.
pub fn associator(x: &Octonion, y: &Octonion, z: &Octonion) -> Octonion {
    x.mul_oct(y).mul_oct(z) - x.mul_oct(&y.mul_oct(z))
}

/// `xy - yx`.
pub fn commutator(x: &Octonion, y: &Octonion) -> Octonion {
    x.mul_oct(y) - y.mul_oct(x)
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, rhs: Octonion) -> Octonion {
        let rhs = rhs.to_basis(self.basis);
        let mut c = self.coeffs;
        c.iter_mut().zip(rhs.coeffs).for_each(|(a, b)| *a += b);
        Octonion::new(c, self.basis)
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, rhs: Octonion) -> Octonion {
        self + (-rhs)
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        Octonion::new(self.coeffs.map(|c| -c), self.basis)
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        self.mul_oct(&rhs)
    }
}

impl Mul<Scalar> for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Scalar) -> Octonion {
        self.scale(rhs)
    }
}

/// Compact rendering of a complex coefficient: `2`, `-i`, `0.5i`, `(1+2i)`.
pub fn format_scalar(c: Scalar) -> String {
    let clean = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
    let (re, im) = (clean(c.re), clean(c.im));
    match (re == 0.0, im == 0.0) {
        (_, true) => format!("{re}"),
        (true, false) if im == 1.0 => "i".into(),
        (true, false) if im == -1.0 => "-i".into(),
        (true, false) => format!("{im}i"),
        (false, false) => {
            let sign = if im < 0.0 { '-' } else { '+' };
            format!("({re}{sign}{}i)", im.abs())
        }
    }
}

fn unit_name(basis: Basis, i: usize) -> String {
    match basis {
        Basis::Real if i == 0 => "1".into(),
        Basis::Real => format!("e{i}"),
        Basis::Split => SplitUnit::from_index(i).name().into(),
    }
}

impl fmt::Display for Octonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.norm() < 1e-15 {
                continue;
            }
            let name = unit_name(self.basis, i);
            let negative = (c.im.abs() < 1e-15 && c.re < 0.0) || (c.re.abs() < 1e-15 && c.im < 0.0);
            let shown = if negative { -c } else { c };
            if !first || negative {
                f.write_str(match (first, negative) {
                    (true, _) => "-",
                    (false, true) => " - ",
                    (false, false) => " + ",
                })?;
            }
            first = false;
            if shown == Scalar::new(1.0, 0.0) {
                f.write_str(&name)?;
            } else if name == "1" {
                f.write_str(&format_scalar(shown))?;
            } else {
                write!(f, "{}*{}", format_scalar(shown), name)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{self, ScalarMode};

    fn e(a: usize) -> Octonion {
        Octonion::real_unit(a)
    }

    fn u(x: SplitUnit) -> Octonion {
        Octonion::split_unit(x)
    }

    #[test]
    fn e1_e2_is_e3() {
        assert!((e(1) * e(2)).approx_eq(&e(3), 0.0));
        assert!(e(1).mul_structure(&e(2)).approx_eq(&e(3), 0.0));
    }

    #[test]
    fn split_examples() {
        use SplitUnit::*;
        assert!((u(U1) * u(U2)).approx_eq(&u(U3c), 0.0));
        assert!((u(U1) * u(U0)).is_zero(0.0));
    }

    #[test]
    fn identity_element() {
        let mut rng = random::rng(1, 0);
        for basis in [Basis::Real, Basis::Split] {
            let one = Octonion::one(basis);
            for _ in 0..50 {
                let z = random::octonion(&mut rng, basis, ScalarMode::Complex);
                assert!((one * z).approx_eq(&z, 1e-15));
                assert!((z * one).approx_eq(&z, 1e-15));
            }
        }
    }

    #[test]
    fn basis_round_trip() {
        let mut rng = random::rng(2, 0);
        for _ in 0..200 {
            let z = random::octonion(&mut rng, Basis::Real, ScalarMode::Complex);
            assert!(z.to_split().to_real().approx_eq(&z, 1e-14));
            let s = random::octonion(&mut rng, Basis::Split, ScalarMode::Complex);
            assert!(s.to_real().to_split().approx_eq(&s, 1e-14));
        }
    }

    #[test]
    fn conjugation_examples() {
        use SplitUnit::*;
        assert!(Octonion::one(Basis::Real).conj().approx_eq(&Octonion::one(Basis::Real), 0.0));
        assert!(e(3).conj().approx_eq(&-e(3), 0.0));
        assert!(u(U0).conj().approx_eq(&u(U0c), 1e-15));
        assert!(u(U2).conj().approx_eq(&-u(U2), 1e-15));
    }

    #[test]
    fn conjugation_reverses_products() {
        let mut rng = random::rng(3, 0);
        for _ in 0..500 {
            let x = random::octonion(&mut rng, Basis::Split, ScalarMode::Complex);
            let y = random::octonion(&mut rng, Basis::Split, ScalarMode::Complex);
            assert!((x * y).conj().approx_eq(&(y.conj() * x.conj()), 1e-13));
            assert!(x.conj().conj().approx_eq(&x, 1e-15));
        }
    }

    #[test]
    fn quadratic_form_examples() {
        use SplitUnit::*;
        assert_eq!(Octonion::one(Basis::Real).quadratic_form(), Scalar::new(1.0, 0.0));
        assert!(u(U0).quadratic_form().norm() < 1e-15);
        let z = Octonion::from_real_parts([1.0, 2.0, 0.0, -1.0, 0.5, 0.0, 0.0, 3.0], Basis::Real);
        assert!((z.quadratic_form() - Scalar::new(15.25, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn associator_witness() {
        use SplitUnit::*;
        let a = associator(&u(U1), &u(U2), &u(U3));
        let ie7 = e(7).scale(I);
        assert!(a.approx_eq(&ie7, 0.0), "{a}");
        assert!(a.approx_eq(&(u(U0) - u(U0c)), 0.0));
    }

    #[test]
    fn display_is_readable() {
        use SplitUnit::*;
        assert_eq!(format!("{}", e(7).scale(I)), "i*e7");
        assert_eq!(format!("{}", -u(U0c)), "-u0c");
        assert_eq!(format!("{}", Octonion::zero(Basis::Real)), "0");
        assert_eq!(format!("{}", Octonion::scalar(Scalar::new(2.0, 0.0), Basis::Real) - e(1)), "2 - e1");
        assert_eq!(format_scalar(Scalar::new(1.0, -2.0)), "(1-2i)");
    }
}
