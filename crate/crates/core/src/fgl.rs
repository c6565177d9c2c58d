//! Formal group laws and coordinate changes.
//!
//! A law is a bivariate series F with F(x,0) = x, F(0,y) = y, F(x,y) =
//! F(y,x) and F(F(x,y),z) = F(x,F(y,z)), all to the truncation order.
//! Validation reports the first violated axiom (units, then commutativity,
//! then associativity) with the lowest failing degree. A coordinate change
//! is a reversible substitution g with g(0) = 0 and unit g'(0); it
//! transports a law by F^g(x,y) = g(F(gbar(x), gbar(y))), i.e. the new
//! coordinate is g applied to the old one.

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement, RingHom, UnitStatus};
use crate::series::{self, compose1_into2, Axis3, Plane3, Series1, Series2, Series3};

/// A validated formal group law.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalGroupLaw {
    series: Series2,
}

/// A reversible coordinate change: g(0) = 0 and g'(0) a unit.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateChange {
    series: Series1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Axiom {
    UnitX,
    UnitY,
    Commutativity,
    Associativity,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axiom::UnitX => write!(f, "unit axiom F(x,0) = x"),
            Axiom::UnitY => write!(f, "unit axiom F(0,y) = y"),
            Axiom::Commutativity => write!(f, "commutativity"),
            Axiom::Associativity => write!(f, "associativity"),
        }
    }
}

/// The first violated axiom, its lowest failing exponent, and the
/// coefficient discrepancy there.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub degree: (usize, usize, Option<usize>),
    pub discrepancy: RingElement,
}

impl std::fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (i, j, k) = &self.degree;
        match k {
            Some(k) => write!(
                f,
                "{} fails at ({i},{j},{k}) with discrepancy {}",
                self.axiom,
                self.discrepancy.format()
            ),
            None => write!(
                f,
                "{} fails at ({i},{j}) with discrepancy {}",
                self.axiom,
                self.discrepancy.format()
            ),
        }
    }
}

/// Check the axioms and wrap the series as a law, or report the first
/// violation.
pub fn validate(series: Series2) -> std::result::Result<FormalGroupLaw, Box<AxiomViolation>> {
    let ring = series.ring().clone();
    let n = series.order();

    // units: F(x,0) = x reads off the (i,0) column, F(0,y) = y the (0,j) row
    for i in 0..=n {
        let expected = if i == 1 { ring.one() } else { ring.zero() };
        let got = series.coeff(i, 0);
        if got != expected {
            return Err(Box::new(AxiomViolation {
                axiom: Axiom::UnitX,
                degree: (i, 0, None),
                discrepancy: got.sub(&expected),
            }));
        }
    }
    for j in 0..=n {
        let expected = if j == 1 { ring.one() } else { ring.zero() };
        let got = series.coeff(0, j);
        if got != expected {
            return Err(Box::new(AxiomViolation {
                axiom: Axiom::UnitY,
                degree: (0, j, None),
                discrepancy: got.sub(&expected),
            }));
        }
    }

    // commutativity: c_ij = c_ji, lowest total degree first
    for d in 2..=n {
        for j in 0..=d {
            let i = d - j;
            if i <= j {
                continue;
            }
            let a = series.coeff(i, j);
            let b = series.coeff(j, i);
            if a != b {
                return Err(Box::new(AxiomViolation {
                    axiom: Axiom::Commutativity,
                    degree: (i, j, None),
                    discrepancy: a.sub(&b),
                }));
            }
        }
    }

    // associativity: compare F(F(x,y),z) and F(x,F(y,z)) as trivariate series
    let f_xy = Series3::embed2(&series, Plane3::XY);
    let z = Series3::variable(&ring, n, Axis3::Z);
    let lhs = series::subst2_into3(&series, &f_xy, &z);
    let x = Series3::variable(&ring, n, Axis3::X);
    let f_yz = Series3::embed2(&series, Plane3::YZ);
    let rhs = series::subst2_into3(&series, &x, &f_yz);
    for d in 3..=n {
        for j in 0..=d {
            for k in 0..=(d - j) {
                let i = d - j - k;
                let a = lhs.coeff_value(i, j, k);
                let b = rhs.coeff_value(i, j, k);
                if a != b {
                    let diff = ring
                        .elem_unchecked(a.clone())
                        .sub(&ring.elem_unchecked(b.clone()));
                    return Err(Box::new(AxiomViolation {
                        axiom: Axiom::Associativity,
                        degree: (i, j, Some(k)),
                        discrepancy: diff,
                    }));
                }
            }
        }
    }

    Ok(FormalGroupLaw { series })
}

/// Built-in law constructors.
#[derive(Clone, Debug)]
pub enum LawKind {
    Additive,
    Multiplicative,
    /// (x + y) / (1 + xy), expanded integrally, so it exists over any ring.
    Lorentz,
    /// exp(l(x) + l(y)) for a logarithm l with l(0) = 0, l'(0) = 1; only
    /// available in characteristic zero.
    FromLog(Series1),
}

pub fn construct(kind: LawKind, ring: &Ring, order: usize) -> Result<FormalGroupLaw> {
    let series = match kind {
        LawKind::Additive => Series2::var_x(ring, order).add(&Series2::var_y(ring, order))?,
        LawKind::Multiplicative => {
            let mut s = Series2::var_x(ring, order).add(&Series2::var_y(ring, order))?;
            s.set_coeff(1, 1, ring.one().value().clone());
            s
        }
        LawKind::Lorentz => {
            // (x+y) * sum_k (-xy)^k, truncated
            let x = Series2::var_x(ring, order);
            let y = Series2::var_y(ring, order);
            let xy = x.mul(&y)?;
            let mut geom = Series2::zero(ring, order);
            geom.set_coeff(0, 0, ring.one().value().clone());
            let mut power = geom.clone();
            for k in 1..=(order / 2) {
                power = power.mul(&xy)?;
                geom = if k % 2 == 1 {
                    geom.sub(&power)?
                } else {
                    geom.add(&power)?
                };
            }
            x.add(&y)?.mul(&geom)?
        }
        LawKind::FromLog(log) => {
            if ring.characteristic() != 0 {
                return Err(Error::Invalid(
                    "logarithms only exist in characteristic zero".into(),
                ));
            }
            if log.ring() != ring {
                return Err(Error::RingMismatch("logarithm over the wrong ring".into()));
            }
            if !log.coeff(0).is_zero() {
                return Err(Error::NonzeroConstantTerm("a logarithm vanishes at 0".into()));
            }
            if !log.coeff(1).is_one() {
                return Err(Error::Invalid("a logarithm has derivative 1 at 0".into()));
            }
            let log = if log.order() == order {
                log
            } else if log.order() > order {
                log.truncate(order)
            } else {
                return Err(Error::Invalid(format!(
                    "logarithm order {} is below the requested order {order}",
                    log.order()
                )));
            };
            let exp = log.reverse()?;
            let lx = series::embed1(&log, series::Axis2::X);
            let ly = series::embed1(&log, series::Axis2::Y);
            compose1_into2(&exp, &lx.add(&ly)?)?
        }
    };
    validate(series).map_err(|v| Error::Invalid(format!("constructed law fails: {v}")))
}

impl FormalGroupLaw {
    pub fn series(&self) -> &Series2 {
        &self.series
    }

    pub fn ring(&self) -> &Ring {
        self.series.ring()
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn coeff(&self, i: usize, j: usize) -> RingElement {
        self.series.coeff(i, j)
    }

    /// Transport along a coordinate change: F^g(x,y) = g(F(gbar x, gbar y)).
    pub fn transform(&self, g: &CoordinateChange) -> Result<FormalGroupLaw> {
        if g.series.ring() != self.ring() {
            return Err(Error::RingMismatch(
                "coordinate change over a different ring".into(),
            ));
        }
        if g.series.order() != self.order() {
            return Err(Error::Invalid(
                "coordinate change and law must share the truncation order".into(),
            ));
        }
        let gbar = g.series.reverse()?;
        let inner = self.series.subst_univariate(&gbar, &gbar)?;
        let out = compose1_into2(&g.series, &inner)?;
        validate(out).map_err(|v| Error::Invalid(format!("transformed law fails: {v}")))
    }

    /// The formal inverse: the unique series i(x) with F(x, i(x)) = 0,
    /// solved degree by degree; i(0) = 0 and i'(0) = -1.
    pub fn formal_inverse(&self) -> Result<Series1> {
        let ring = self.ring().clone();
        let n = self.order();
        let x = Series1::identity(&ring, n);
        let mut inv = Series1::zero(&ring, n);
        inv.set_coeff(1, ring.from_int(-1).value().clone());
        for k in 2..=n {
            // with inv known below degree k, the degree-k defect enters the
            // composite linearly through the y-linear term of F
            let composed = self.series.subst_into1(&x, &inv)?;
            let defect = composed.coeff(k);
            inv.set_coeff(k, defect.neg().value().clone());
        }
        debug_assert!(self.series.subst_into1(&x, &inv)?.is_zero());
        Ok(inv)
    }

    /// Map coefficients through a ring homomorphism, revalidating the image.
    pub fn map(&self, hom: &RingHom) -> Result<FormalGroupLaw> {
        let target = hom.target().clone();
        let mapped = map_series2(hom, &self.series)?;
        let _ = target;
        validate(mapped).map_err(|v| Error::Invalid(format!("mapped law fails: {v}")))
    }
}

impl CoordinateChange {
    /// Requires g(0) = 0 and a decidably-unit g'(0).
    pub fn new(series: Series1) -> Result<CoordinateChange> {
        if !series.coeff(0).is_zero() {
            return Err(Error::NonzeroConstantTerm(
                "a coordinate change vanishes at 0".into(),
            ));
        }
        match series.coeff(1).is_unit() {
            UnitStatus::Unit => Ok(CoordinateChange { series }),
            UnitStatus::NonUnit => Err(Error::NotReversible(
                "g'(0) must be a unit for a coordinate change".into(),
            )),
            UnitStatus::Unknown => Err(Error::Undecidable(
                "unit status of g'(0) is unknown".into(),
            )),
        }
    }

    pub fn identity(ring: &Ring, order: usize) -> CoordinateChange {
        CoordinateChange {
            series: Series1::identity(ring, order),
        }
    }

    pub fn series(&self) -> &Series1 {
        &self.series
    }

    pub fn ring(&self) -> &Ring {
        self.series.ring()
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// g'(0), the linear coefficient.
    pub fn linear_coeff(&self) -> RingElement {
        self.series.coeff(1)
    }

    pub fn reverse(&self) -> Result<CoordinateChange> {
        Ok(CoordinateChange {
            series: self.series.reverse()?,
        })
    }

    /// Composition (self after other): (self o other)(t).
    pub fn compose(&self, other: &CoordinateChange) -> Result<CoordinateChange> {
        CoordinateChange::new(self.series.compose(&other.series)?)
    }
}

/// Outcome of the isomorphism check between two laws.
#[derive(Clone, Debug, PartialEq)]
pub enum IsoClass {
    NotIso(IsoFailure),
    /// f'(0) = 1.
    StrictIso,
    /// f'(0) a unit different from 1.
    GeneralIso,
}

#[derive(Clone, Debug, PartialEq)]
pub enum IsoFailure {
    NonUnitLinearCoeff,
    /// The homomorphism equation fails; lowest failing exponent recorded.
    Equation { degree: (usize, usize) },
}

/// Classify f as an isomorphism from `source` to `target`: checks
/// f(source(x,y)) = target(f(x), f(y)) to the common order.
pub fn iso_class(
    f: &Series1,
    source: &FormalGroupLaw,
    target: &FormalGroupLaw,
) -> Result<IsoClass> {
    if f.ring() != source.ring() || f.ring() != target.ring() {
        return Err(Error::RingMismatch("isomorphism over a different ring".into()));
    }
    if source.order() != target.order() || f.order() != source.order() {
        return Err(Error::Invalid(
            "isomorphism check requires a common truncation order".into(),
        ));
    }
    if !f.coeff(0).is_zero() {
        return Err(Error::NonzeroConstantTerm(
            "an isomorphism of laws vanishes at 0".into(),
        ));
    }
    let strict = match f.coeff(1).is_unit() {
        UnitStatus::Unit => f.coeff(1).is_one(),
        UnitStatus::NonUnit => return Ok(IsoClass::NotIso(IsoFailure::NonUnitLinearCoeff)),
        UnitStatus::Unknown => {
            return Err(Error::Undecidable(
                "unit status of f'(0) is unknown".into(),
            ))
        }
    };
    let lhs = compose1_into2(f, source.series())?;
    let rhs = target.series().subst_univariate(f, f)?;
    let n = lhs.order().min(rhs.order());
    for d in 0..=n {
        for j in 0..=d {
            let i = d - j;
            if lhs.coeff(i, j) != rhs.coeff(i, j) {
                return Ok(IsoClass::NotIso(IsoFailure::Equation { degree: (i, j) }));
            }
        }
    }
    Ok(if strict {
        IsoClass::StrictIso
    } else {
        IsoClass::GeneralIso
    })
}

/// Map a univariate series through a ring homomorphism coefficient-wise.
pub fn map_series1(hom: &RingHom, s: &Series1) -> Result<Series1> {
    let mut coeffs = Vec::with_capacity(s.order() + 1);
    for i in 0..=s.order() {
        coeffs.push(hom.apply(&s.coeff(i))?);
    }
    Series1::from_elements(hom.target(), s.order(), &coeffs)
}

/// Map a bivariate series through a ring homomorphism coefficient-wise.
pub fn map_series2(hom: &RingHom, s: &Series2) -> Result<Series2> {
    let mut entries = Vec::new();
    for (i, j, c) in s.entries() {
        let img = hom.apply(&c)?;
        if !img.is_zero() {
            entries.push((i, j, img));
        }
    }
    Series2::from_entries(hom.target(), s.order(), &entries)
}
