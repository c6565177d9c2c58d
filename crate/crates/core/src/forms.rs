//! The graded ring of twisted powers of the cotangent module.
//!
//! With a chosen coordinate x, the module of invariant forms is free of rank
//! one on dx, so a homogeneous element is coeff * dx^(tensor m). Only even
//! cohomological degrees carry anything: twist m sits in cohomological degree
//! -2m (homological 2m). Changing the coordinate by y = g(x) rescales the
//! basis by dy = g'(0) dx, because the higher terms of g die in the square of
//! the augmentation ideal.

use crate::error::{Error, Result};
use crate::fgl::CoordinateChange;
use crate::ring::{Ring, RingElement};

/// A homogeneous twisted form: coeff * dx^(tensor twist) over the named
/// coordinate's basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FormElement {
    pub twist: i64,
    pub coeff: RingElement,
    pub basis_coord: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    Cohomological,
    Homological,
}

impl FormElement {
    pub fn new(twist: i64, coeff: RingElement, basis_coord: impl Into<String>) -> FormElement {
        FormElement {
            twist,
            coeff,
            basis_coord: basis_coord.into(),
        }
    }

    pub fn ring(&self) -> &Ring {
        self.coeff.ring()
    }

    /// Multiply: twists add, coefficients multiply. The bases must agree;
    /// convert first with [`FormElement::change_basis`] otherwise.
    pub fn mul(&self, other: &FormElement) -> Result<FormElement> {
        if self.ring() != other.ring() {
            return Err(Error::RingMismatch("forms over different rings".into()));
        }
        if self.basis_coord != other.basis_coord {
            return Err(Error::Invalid(format!(
                "basis mismatch: dx bases `{}` and `{}` (change basis first)",
                self.basis_coord, other.basis_coord
            )));
        }
        Ok(FormElement {
            twist: self.twist + other.twist,
            coeff: self.coeff.mul(&other.coeff),
            basis_coord: self.basis_coord.clone(),
        })
    }

    /// Re-express in the basis of the coordinate y = g(x): dy = g'(0) dx, so
    /// the coefficient picks up g'(0)^(-twist).
    pub fn change_basis(
        &self,
        g: &CoordinateChange,
        new_coord: impl Into<String>,
    ) -> Result<FormElement> {
        if g.ring() != self.ring() {
            return Err(Error::RingMismatch(
                "coordinate change over a different ring".into(),
            ));
        }
        let slope = g.linear_coeff();
        let m = self.twist;
        let factor = if m >= 0 {
            slope.try_invert()?.pow(m as u32)
        } else {
            slope.pow((-m) as u32)
        };
        Ok(FormElement {
            twist: self.twist,
            coeff: self.coeff.mul(&factor),
            basis_coord: new_coord.into(),
        })
    }

    /// Degree bookkeeping: twist m has cohomological degree -2m and
    /// homological degree 2m; odd degrees carry only zero.
    pub fn degree(&self, grading: Grading) -> i64 {
        match grading {
            Grading::Cohomological => -2 * self.twist,
            Grading::Homological => 2 * self.twist,
        }
    }
}

/// Convert a degree between the two grading conventions (an involution).
pub fn regrade(degree: i64, from: Grading) -> i64 {
    let _ = from;
    -degree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;
    use crate::series::Series1;

    fn q_ring() -> Ring {
        Ring::new(RingSpec::rationals()).unwrap()
    }

    #[test]
    fn multiplication_adds_twists() {
        let r = q_ring();
        let a = FormElement::new(1, r.from_int(2), "x");
        let b = FormElement::new(2, r.from_int(3), "x");
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.twist, 3);
        assert_eq!(ab.coeff, r.from_int(6));
    }

    #[test]
    fn twist_zero_is_the_unit() {
        let r = q_ring();
        let one = FormElement::new(0, r.one(), "x");
        let z = FormElement::new(-2, r.from_int(5), "x");
        assert_eq!(one.mul(&z).unwrap(), z);
    }

    #[test]
    fn dual_pairing() {
        let r = q_ring();
        let a = FormElement::new(1, r.from_int(2), "x");
        let b = FormElement::new(-1, r.from_int(3), "x");
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.twist, 0);
        assert_eq!(ab.coeff, r.from_int(6));
    }

    #[test]
    fn basis_mismatch_is_rejected() {
        let r = q_ring();
        let a = FormElement::new(1, r.one(), "x");
        let b = FormElement::new(1, r.one(), "y");
        assert!(a.mul(&b).is_err());
    }

    fn change(r: &Ring, order: usize, coeffs: &[i64]) -> CoordinateChange {
        let elems: Vec<_> = coeffs.iter().map(|&c| r.from_int(c)).collect();
        CoordinateChange::new(Series1::from_elements(r, order, &elems).unwrap()).unwrap()
    }

    #[test]
    fn identity_change_fixes_forms() {
        let r = q_ring();
        let z = FormElement::new(3, r.from_int(7), "x");
        let id = change(&r, 3, &[0, 1, 0, 0]);
        let moved = z.change_basis(&id, "x").unwrap();
        assert_eq!(moved, z);
    }

    #[test]
    fn linear_coefficient_extraction() {
        // z = 3 dx, g = 2t + t^2: dy = 2 dx so z = (3/2) dy
        let r = q_ring();
        let z = FormElement::new(1, r.from_int(3), "x");
        let g = change(&r, 3, &[0, 2, 1, 0]);
        let moved = z.change_basis(&g, "y").unwrap();
        assert_eq!(
            moved.coeff,
            r.from_rational(&num_rational::BigRational::new(3.into(), 2.into()))
                .unwrap()
        );
        assert_eq!(moved.basis_coord, "y");
    }

    #[test]
    fn dual_square_picks_up_the_square() {
        // z = dx^(-2), g = 2t: coefficient multiplies by 2^2 = 4
        let r = q_ring();
        let z = FormElement::new(-2, r.one(), "x");
        let g = change(&r, 3, &[0, 2, 0, 0]);
        let moved = z.change_basis(&g, "y").unwrap();
        assert_eq!(moved.coeff, r.from_int(4));
    }

    #[test]
    fn change_basis_roundtrip() {
        let r = q_ring();
        let z = FormElement::new(4, r.from_int(9), "x");
        let g = change(&r, 4, &[0, 3, 1, -2, 0]);
        let there = z.change_basis(&g, "y").unwrap();
        let back = there.change_basis(&g.reverse().unwrap(), "x").unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn change_basis_commutes_with_multiplication() {
        let r = q_ring();
        let a = FormElement::new(2, r.from_int(5), "x");
        let b = FormElement::new(-1, r.from_int(7), "x");
        let g = change(&r, 3, &[0, 2, 1, 0]);
        let lhs = a.mul(&b).unwrap().change_basis(&g, "y").unwrap();
        let rhs = a
            .change_basis(&g, "y")
            .unwrap()
            .mul(&b.change_basis(&g, "y").unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn regrading_is_an_involution() {
        let r = q_ring();
        let z = FormElement::new(1, r.one(), "x");
        assert_eq!(z.degree(Grading::Cohomological), -2);
        assert_eq!(z.degree(Grading::Homological), 2);
        let z0 = FormElement::new(0, r.one(), "x");
        assert_eq!(z0.degree(Grading::Cohomological), 0);
        let zm = FormElement::new(-3, r.one(), "x");
        assert_eq!(zm.degree(Grading::Cohomological), 6);
        assert_eq!(zm.degree(Grading::Homological), -6);
        for d in [-6, 0, 2, 8] {
            assert_eq!(regrade(regrade(d, Grading::Cohomological), Grading::Homological), d);
        }
    }
}
