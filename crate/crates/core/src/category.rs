//! Formal groups with a system of r+1 coordinates, and the equivalence with
//! chains of laws and isomorphisms.
//!
//! An object stores the law of the distinguished coordinate x_0 together with
//! the coordinate changes h_1..h_r, where x_i = h_i(x_0). The equivalent
//! chain presentation has laws F_0..F_r with F_i the law of x_i, and
//! connecting isomorphisms f_i with x_i = f_i(x_{i+1}), so f_i = h_i o
//! reverse(h_{i+1}). Both directions are constructive and mutually inverse,
//! coefficient-exact at the truncation order.

use crate::error::{Error, Result};
use crate::fgl::{map_series1, map_series2, iso_class, CoordinateChange, FormalGroupLaw, IsoClass};
use crate::ring::{Ring, RingElement, RingHom};
use crate::series::Series1;

/// A formal group with chosen coordinates x_0..x_r over its base ring.
#[derive(Clone, Debug, PartialEq)]
pub struct FgObject {
    law0: FormalGroupLaw,
    coords: Vec<CoordinateChange>,
}

/// The chain form: laws F_0..F_r and isomorphisms f_i from F_{i+1} to F_i.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgSystem {
    laws: Vec<FormalGroupLaw>,
    isos: Vec<Series1>,
}

impl FgObject {
    pub fn new(law0: FormalGroupLaw, coords: Vec<CoordinateChange>) -> Result<FgObject> {
        for h in &coords {
            if h.ring() != law0.ring() {
                return Err(Error::RingMismatch(
                    "coordinate change over a different base ring".into(),
                ));
            }
            if h.order() != law0.order() {
                return Err(Error::Invalid(
                    "coordinate changes must share the law's truncation order".into(),
                ));
            }
        }
        Ok(FgObject { law0, coords })
    }

    pub fn base(&self) -> &Ring {
        self.law0.ring()
    }

    pub fn order(&self) -> usize {
        self.law0.order()
    }

    /// Number of extra coordinates r.
    pub fn extra_coords(&self) -> usize {
        self.coords.len()
    }

    pub fn law0(&self) -> &FormalGroupLaw {
        &self.law0
    }

    pub fn coords(&self) -> &[CoordinateChange] {
        &self.coords
    }

    /// The change h_i with x_i = h_i(x_0); h_0 is the identity.
    pub fn coord(&self, i: usize) -> CoordinateChange {
        if i == 0 {
            CoordinateChange::identity(self.base(), self.order())
        } else {
            self.coords[i - 1].clone()
        }
    }
}

impl AlgSystem {
    /// Validates the chain: every f_i must classify as a (possibly
    /// non-strict) isomorphism from F_{i+1} to F_i.
    pub fn new(laws: Vec<FormalGroupLaw>, isos: Vec<Series1>) -> Result<AlgSystem> {
        if laws.is_empty() {
            return Err(Error::Invalid("a system carries at least one law".into()));
        }
        if isos.len() + 1 != laws.len() {
            return Err(Error::Invalid(format!(
                "{} laws need {} connecting isomorphisms, got {}",
                laws.len(),
                laws.len() - 1,
                isos.len()
            )));
        }
        for i in 0..isos.len() {
            match iso_class(&isos[i], &laws[i + 1], &laws[i])? {
                IsoClass::StrictIso | IsoClass::GeneralIso => {}
                IsoClass::NotIso(fail) => {
                    return Err(Error::Invalid(format!(
                        "f_{i} is not an isomorphism from F_{} to F_{i}: {fail:?}",
                        i + 1
                    )))
                }
            }
        }
        Ok(AlgSystem { laws, isos })
    }

    pub fn laws(&self) -> &[FormalGroupLaw] {
        &self.laws
    }

    pub fn isos(&self) -> &[Series1] {
        &self.isos
    }

    pub fn base(&self) -> &Ring {
        self.laws[0].ring()
    }
}

/// Chain presentation of an object: F_i = law of x_i, f_i = h_i o
/// reverse(h_{i+1}).
pub fn to_alg_system(x: &FgObject) -> Result<AlgSystem> {
    let r = x.extra_coords();
    let mut laws = Vec::with_capacity(r + 1);
    for i in 0..=r {
        laws.push(x.law0().transform(&x.coord(i))?);
    }
    let mut isos = Vec::with_capacity(r);
    for i in 0..r {
        let f = x.coord(i).compose(&x.coord(i + 1).reverse()?)?;
        isos.push(f.series().clone());
    }
    AlgSystem::new(laws, isos)
}

/// Inverse direction: rebuild the coordinates from the chain,
/// h_{i+1} = reverse(f_i) o h_i starting from the identity.
pub fn from_alg_system(sys: &AlgSystem) -> Result<FgObject> {
    let law0 = sys.laws[0].clone();
    let mut coords = Vec::with_capacity(sys.isos.len());
    let mut h = CoordinateChange::identity(law0.ring(), law0.order());
    for f in &sys.isos {
        let f_change = CoordinateChange::new(f.clone())?;
        h = f_change.reverse()?.compose(&h)?;
        coords.push(h.clone());
    }
    FgObject::new(law0, coords)
}

/// Verdict of the morphism condition for phi: Y.base -> X.base.
#[derive(Clone, Debug, PartialEq)]
pub enum MorphismOutcome {
    Accept,
    Violation(MorphismViolation),
}

#[derive(Clone, Debug, PartialEq)]
pub enum MorphismViolation {
    /// phi(Y.law0) and X.law0 differ at this coefficient.
    Law { i: usize, j: usize },
    /// phi(h_k of Y) and h_k of X differ at this degree.
    Coordinate { index: usize, degree: usize },
}

impl std::fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MorphismViolation::Law { i, j } => {
                write!(f, "law coefficients differ at ({i},{j})")
            }
            MorphismViolation::Coordinate { index, degree } => {
                write!(f, "coordinate h_{index} differs at degree {degree}")
            }
        }
    }
}

/// A map of based formal groups is determined by the base-ring map; it is a
/// morphism iff it matches the distinguished laws and every coordinate,
/// coefficient-wise.
pub fn check_morphism(phi: &RingHom, x: &FgObject, y: &FgObject) -> Result<MorphismOutcome> {
    if x.extra_coords() != y.extra_coords() {
        return Err(Error::Invalid(
            "objects carry different numbers of coordinates".into(),
        ));
    }
    if x.order() != y.order() {
        return Err(Error::Invalid("objects have different truncation orders".into()));
    }
    if phi.source() != y.base() || phi.target() != x.base() {
        return Err(Error::RingMismatch(
            "the base map must go from the target object's ring to the source's".into(),
        ));
    }
    let mapped_law = map_series2(phi, y.law0().series())?;
    let n = x.order();
    for d in 0..=n {
        for j in 0..=d {
            let i = d - j;
            if mapped_law.coeff(i, j) != x.law0().coeff(i, j) {
                return Ok(MorphismOutcome::Violation(MorphismViolation::Law { i, j }));
            }
        }
    }
    for k in 1..=x.extra_coords() {
        let mapped = map_series1(phi, y.coord(k).series())?;
        for deg in 0..=n {
            if mapped.coeff(deg) != x.coord(k).series().coeff(deg) {
                return Ok(MorphismOutcome::Violation(MorphismViolation::Coordinate {
                    index: k,
                    degree: deg,
                }));
            }
        }
    }
    Ok(MorphismOutcome::Accept)
}

/// The classifying data of an object at the truncation order: the nonlinear
/// coefficients of the distinguished law, keyed (i,j) ascending with
/// i, j >= 1, and the coefficient lists (degrees 1..=N) of the connecting
/// isomorphisms f_0..f_{r-1}.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifyTable {
    pub law_coeffs: Vec<((usize, usize), RingElement)>,
    pub iso_coeffs: Vec<Vec<RingElement>>,
}

pub fn classify(x: &FgObject) -> Result<ClassifyTable> {
    let n = x.order();
    let mut law_coeffs = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i + j > n {
                continue;
            }
            law_coeffs.push(((i, j), x.law0().coeff(i, j)));
        }
    }
    law_coeffs.sort_by_key(|((i, j), _)| (*i, *j));
    let sys = to_alg_system(x)?;
    let iso_coeffs = sys
        .isos()
        .iter()
        .map(|f| (1..=n).map(|d| f.coeff(d)).collect())
        .collect();
    Ok(ClassifyTable {
        law_coeffs,
        iso_coeffs,
    })
}

/// Re-base the object at coordinate sigma(0): the new distinguished law is
/// the law of x_sigma(0) and the new h_i is h_sigma(i) o reverse(h_sigma(0)).
pub fn permute_coordinates(x: &FgObject, sigma: &[usize]) -> Result<FgObject> {
    let r = x.extra_coords();
    if sigma.len() != r + 1 {
        return Err(Error::Invalid(format!(
            "permutation must have length {}, got {}",
            r + 1,
            sigma.len()
        )));
    }
    let mut seen = vec![false; r + 1];
    for &s in sigma {
        if s > r || seen[s] {
            return Err(Error::Invalid("not a permutation of 0..=r".into()));
        }
        seen[s] = true;
    }
    let base_change = x.coord(sigma[0]);
    let law0 = x.law0().transform(&base_change)?;
    let back = base_change.reverse()?;
    let mut coords = Vec::with_capacity(r);
    for &s in &sigma[1..] {
        coords.push(x.coord(s).compose(&back)?);
    }
    FgObject::new(law0, coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgl::{construct, LawKind};
    use crate::ring::RingSpec;

    fn q_ring() -> Ring {
        Ring::new(RingSpec::rationals()).unwrap()
    }

    fn s1(ring: &Ring, order: usize, coeffs: &[(i64, i64)]) -> Series1 {
        let elems: Vec<_> = coeffs
            .iter()
            .map(|&(n, d)| {
                ring.from_rational(&num_rational::BigRational::new(n.into(), d.into()))
                    .unwrap()
            })
            .collect();
        Series1::from_elements(ring, order, &elems).unwrap()
    }

    fn t_plus_t2(ring: &Ring, order: usize) -> CoordinateChange {
        let mut coeffs = vec![(0i64, 1i64); order + 1];
        coeffs[1] = (1, 1);
        coeffs[2] = (1, 1);
        CoordinateChange::new(s1(ring, order, &coeffs)).unwrap()
    }

    #[test]
    fn single_coordinate_system() {
        let r = q_ring();
        let law = construct(LawKind::Multiplicative, &r, 6).unwrap();
        let x = FgObject::new(law.clone(), vec![]).unwrap();
        let sys = to_alg_system(&x).unwrap();
        assert_eq!(sys.laws().len(), 1);
        assert!(sys.isos().is_empty());
        assert_eq!(from_alg_system(&sys).unwrap(), x);
    }

    #[test]
    fn additive_with_quadratic_coordinate() {
        // h_1 = t + t^2 at order 4: F_1 = transform, f_0 = reverse(h_1)
        let r = q_ring();
        let law = construct(LawKind::Additive, &r, 4).unwrap();
        let h1 = t_plus_t2(&r, 4);
        let x = FgObject::new(law.clone(), vec![h1.clone()]).unwrap();
        let sys = to_alg_system(&x).unwrap();
        assert_eq!(&sys.laws()[0], &law);
        assert_eq!(&sys.laws()[1], &law.transform(&h1).unwrap());
        assert_eq!(
            sys.isos()[0],
            s1(&r, 4, &[(0, 1), (1, 1), (-1, 1), (2, 1), (-5, 1)])
        );
        assert_eq!(from_alg_system(&sys).unwrap(), x);
    }

    #[test]
    fn multiplicative_with_linear_rescale() {
        // h_1 = 2t: F_1 = x + y + xy/2 and f_0 = t/2
        let r = q_ring();
        let law = construct(LawKind::Multiplicative, &r, 4).unwrap();
        let h1 = CoordinateChange::new(s1(
            &r,
            4,
            &[(0, 1), (2, 1), (0, 1), (0, 1), (0, 1)],
        ))
        .unwrap();
        let x = FgObject::new(law, vec![h1]).unwrap();
        let sys = to_alg_system(&x).unwrap();
        assert_eq!(
            sys.laws()[1].coeff(1, 1),
            r.from_rational(&num_rational::BigRational::new(1.into(), 2.into()))
                .unwrap()
        );
        assert_eq!(
            sys.isos()[0],
            s1(&r, 4, &[(0, 1), (1, 2), (0, 1), (0, 1), (0, 1)])
        );
    }

    #[test]
    fn linear_chain_reconstruction() {
        // f_0 = 2t between additive laws recovers h_1 = t/2
        let r = q_ring();
        let add = construct(LawKind::Additive, &r, 4).unwrap();
        let f0 = s1(&r, 4, &[(0, 1), (2, 1), (0, 1), (0, 1), (0, 1)]);
        let sys = AlgSystem::new(vec![add.clone(), add], vec![f0]).unwrap();
        let x = from_alg_system(&sys).unwrap();
        assert_eq!(
            x.coords()[0].series(),
            &s1(&r, 4, &[(0, 1), (1, 2), (0, 1), (0, 1), (0, 1)])
        );
    }

    #[test]
    fn identity_morphism_accepts() {
        let r = q_ring();
        let law = construct(LawKind::Multiplicative, &r, 5).unwrap();
        let x = FgObject::new(law, vec![t_plus_t2(&r, 5)]).unwrap();
        let id = RingHom::identity(r).unwrap();
        assert_eq!(
            check_morphism(&id, &x, &x).unwrap(),
            MorphismOutcome::Accept
        );
    }

    #[test]
    fn law_mismatch_is_a_violation() {
        let r = q_ring();
        let xm = FgObject::new(construct(LawKind::Multiplicative, &r, 5).unwrap(), vec![]).unwrap();
        let ya = FgObject::new(construct(LawKind::Additive, &r, 5).unwrap(), vec![]).unwrap();
        let id = RingHom::identity(r).unwrap();
        assert_eq!(
            check_morphism(&id, &xm, &ya).unwrap(),
            MorphismOutcome::Violation(MorphismViolation::Law { i: 1, j: 1 })
        );
    }

    #[test]
    fn specialising_a_parameter_is_a_morphism() {
        // Y over Q[c] with law x + y + cxy, phi: c -> 1 lands on the
        // multiplicative law over Q
        let qc = Ring::new(RingSpec::polynomial(RingSpec::rationals(), &["c"])).unwrap();
        let c = qc.var("c").unwrap();
        let mut s = crate::series::Series2::var_x(&qc, 4)
            .add(&crate::series::Series2::var_y(&qc, 4))
            .unwrap();
        s.set_coeff(1, 1, c.value().clone());
        let y_law = crate::fgl::validate(s).unwrap();
        let y = FgObject::new(y_law, vec![]).unwrap();

        let q = q_ring();
        let x = FgObject::new(construct(LawKind::Multiplicative, &q, 4).unwrap(), vec![]).unwrap();
        let phi = RingHom::new(qc, q, vec![x.base().from_int(1)]).unwrap();
        assert_eq!(
            check_morphism(&phi, &x, &y).unwrap(),
            MorphismOutcome::Accept
        );
    }

    #[test]
    fn classify_reads_off_coefficients() {
        let r = q_ring();
        let mult = FgObject::new(construct(LawKind::Multiplicative, &r, 4).unwrap(), vec![]).unwrap();
        let table = classify(&mult).unwrap();
        for ((i, j), c) in &table.law_coeffs {
            if (*i, *j) == (1, 1) {
                assert_eq!(c, &r.one());
            } else {
                assert!(c.is_zero(), "a_{i}{j} should vanish");
            }
        }
        assert!(table.iso_coeffs.is_empty());

        let add = FgObject::new(construct(LawKind::Additive, &r, 4).unwrap(), vec![]).unwrap();
        assert!(classify(&add)
            .unwrap()
            .law_coeffs
            .iter()
            .all(|(_, c)| c.is_zero()));
    }

    #[test]
    fn classify_transformed_additive() {
        // transform by t + t^3 at order 4: a_21 = a_12 = 3, others 0
        let r = q_ring();
        let g = CoordinateChange::new(s1(
            &r,
            4,
            &[(0, 1), (1, 1), (0, 1), (1, 1), (0, 1)],
        ))
        .unwrap();
        let law = construct(LawKind::Additive, &r, 4)
            .unwrap()
            .transform(&g)
            .unwrap();
        let table = classify(&FgObject::new(law, vec![]).unwrap()).unwrap();
        for ((i, j), c) in &table.law_coeffs {
            match (i, j) {
                (2, 1) | (1, 2) => assert_eq!(c, &r.from_int(3)),
                _ => assert!(c.is_zero()),
            }
        }
    }

    #[test]
    fn permutation_action() {
        let r = q_ring();
        let law = construct(LawKind::Additive, &r, 4).unwrap();
        let h1 = t_plus_t2(&r, 4);
        let x = FgObject::new(law.clone(), vec![h1.clone()]).unwrap();

        // identity permutation: exact equality
        assert_eq!(permute_coordinates(&x, &[0, 1]).unwrap(), x);

        // swap: new law is the transform, new h_1 is reverse(h_1)
        let swapped = permute_coordinates(&x, &[1, 0]).unwrap();
        assert_eq!(swapped.law0(), &law.transform(&h1).unwrap());
        assert_eq!(
            swapped.coords()[0].series(),
            h1.reverse().unwrap().series()
        );

        // double swap is the identity on every coefficient
        let back = permute_coordinates(&swapped, &[1, 0]).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn classify_is_natural_for_morphisms() {
        // phi applied to Y's table gives X's table entry-wise
        let qc = Ring::new(RingSpec::polynomial(RingSpec::rationals(), &["c"])).unwrap();
        let c = qc.var("c").unwrap();
        let mut s = crate::series::Series2::var_x(&qc, 4)
            .add(&crate::series::Series2::var_y(&qc, 4))
            .unwrap();
        s.set_coeff(1, 1, c.value().clone());
        let y = FgObject::new(crate::fgl::validate(s).unwrap(), vec![]).unwrap();
        let q = q_ring();
        let x = FgObject::new(construct(LawKind::Multiplicative, &q, 4).unwrap(), vec![]).unwrap();
        let phi = RingHom::new(y.base().clone(), q, vec![x.base().from_int(1)]).unwrap();
        assert_eq!(
            check_morphism(&phi, &x, &y).unwrap(),
            MorphismOutcome::Accept
        );
        let tx = classify(&x).unwrap();
        let ty = classify(&y).unwrap();
        for (((i1, j1), cx), ((i2, j2), cy)) in tx.law_coeffs.iter().zip(ty.law_coeffs.iter()) {
            assert_eq!((i1, j1), (i2, j2));
            assert_eq!(&phi.apply(cy).unwrap(), cx);
        }
    }
}
