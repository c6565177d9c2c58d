//! Localised regular quotient presentations and their certificates.
//!
//! A presentation is (base ring, inverted list, sequence): the presented ring
//! is the localisation of the base at the inverted elements, quotiented by
//! the ideal the sequence generates. Validation decides, element by element,
//! whether each sequence entry is a non-zero-divisor modulo its predecessors:
//! structurally for unit-monic triangular elements and odd-prime scalars over
//! domain coefficients, by exact matrix rank on module-finite intermediate
//! rings, and *unknown* otherwise — reported, never silently accepted. The
//! final quotient must be nonzero.
//!
//! Presentations may be given over the result ring of another presentation
//! ("relative"); composition flattens such a tower into a single presentation
//! over the inner base, choosing polynomial preimages by clearing the
//! declared-invertible factors from normal forms.

mod certify;
mod standard;

pub use certify::{certify_goodness, GoodnessCertificate, MpSurrogate};
pub use standard::{standard_presentation, IsoWitness, StandardPresentation};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ring::{Ring, RingElement, RingSpec, UnitStatus, Value};
use crate::scalar::{Scalar, ScalarRing};

/// A localised-regular-quotient presentation. The result ring is derived
/// from the three declared fields, never stored independently.
#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    base: Ring,
    inverted: Vec<RingElement>,
    sequence: Vec<RingElement>,
}

/// Verdict of [`Presentation::validate`]. `index` is the offending sequence
/// position; None means the localisation stage itself failed.
#[derive(Clone, Debug)]
pub enum SequenceVerdict {
    Accept { result: Ring },
    Reject { index: Option<usize>, reason: String },
    Unknown { index: Option<usize>, reason: String },
}

impl SequenceVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, SequenceVerdict::Accept { .. })
    }

    pub fn result(&self) -> Option<&Ring> {
        match self {
            SequenceVerdict::Accept { result } => Some(result),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SequenceVerdict::Accept { result } => format!("accept; result ring {result}"),
            SequenceVerdict::Reject { index, reason } => match index {
                Some(i) => format!("reject at sequence index {i}: {reason}"),
                None => format!("reject: {reason}"),
            },
            SequenceVerdict::Unknown { index, reason } => match index {
                Some(i) => format!("unknown at sequence index {i}: {reason}"),
                None => format!("unknown: {reason}"),
            },
        }
    }
}

impl Presentation {
    /// Shape checks only; regularity is decided by [`Presentation::validate`].
    /// The base may be a polynomial ring, or the result ring of another
    /// presentation (a relative presentation).
    pub fn new(
        base: Ring,
        inverted: Vec<RingElement>,
        sequence: Vec<RingElement>,
    ) -> Result<Presentation> {
        match base.spec() {
            RingSpec::PolynomialRing { .. } | RingSpec::TriangularQuotient { .. } => {}
            _ => {
                return Err(Error::InvalidRing(
                    "a presentation needs a polynomial (or presented) base ring".into(),
                ))
            }
        }
        for e in inverted.iter().chain(sequence.iter()) {
            if e.ring() != &base {
                return Err(Error::RingMismatch(
                    "presentation element lies outside the base ring".into(),
                ));
            }
        }
        Ok(Presentation {
            base,
            inverted,
            sequence,
        })
    }

    pub fn base(&self) -> &Ring {
        &self.base
    }

    pub fn inverted(&self) -> &[RingElement] {
        &self.inverted
    }

    pub fn sequence(&self) -> &[RingElement] {
        &self.sequence
    }

    /// Flatten to data over the underlying polynomial ring: (polynomial base
    /// spec, inverted polynomials, relations inherited from a relative base,
    /// sequence polynomials).
    fn flat_parts(&self) -> Result<(RingSpec, Vec<Poly>, Vec<Poly>, Vec<Poly>)> {
        match self.base.spec().clone() {
            RingSpec::PolynomialRing { .. } => {
                let inv = self
                    .inverted
                    .iter()
                    .map(|e| value_poly(e.value()))
                    .collect::<Result<Vec<_>>>()?;
                let seq = self
                    .sequence
                    .iter()
                    .map(|e| value_poly(e.value()))
                    .collect::<Result<Vec<_>>>()?;
                Ok((self.base.spec().clone(), inv, seq, Vec::new()))
            }
            RingSpec::TriangularQuotient {
                base,
                inverted,
                relations,
            } => {
                let poly_spec = (*base).clone();
                let core_scalar = scalar_of(&poly_spec)?;
                let mut inv = inverted;
                for e in &self.inverted {
                    inv.push(lift_element(&self.base, e, &core_scalar)?);
                }
                let seq = self
                    .sequence
                    .iter()
                    .map(|e| lift_element(&self.base, e, &core_scalar))
                    .collect::<Result<Vec<_>>>()?;
                Ok((poly_spec, inv, seq, relations))
            }
            _ => unreachable!("checked at construction"),
        }
    }

    /// Decide regularity of the whole sequence and construct the result ring.
    pub fn validate(&self) -> SequenceVerdict {
        let (poly_spec, inverted, seq, pre_relations) = match self.flat_parts() {
            Ok(parts) => parts,
            Err(Error::Undecidable(why)) => {
                return SequenceVerdict::Unknown {
                    index: None,
                    reason: why,
                }
            }
            Err(e) => {
                return SequenceVerdict::Reject {
                    index: None,
                    reason: e.to_string(),
                }
            }
        };

        // localisation stage (plus inherited relations for relative bases)
        let mut relations = pre_relations;
        let mut current = match Ring::new(RingSpec::quotient(
            poly_spec.clone(),
            inverted.clone(),
            relations.clone(),
        )) {
            Ok(r) => r,
            Err(e) => return verdict_from_ring_error(e, None),
        };

        for (k, elem) in seq.iter().enumerate() {
            let nf = match current.element_from_poly(elem.clone()) {
                Ok(e) => e,
                Err(e) => {
                    return SequenceVerdict::Reject {
                        index: Some(k),
                        reason: e.to_string(),
                    }
                }
            };
            if nf.is_zero() {
                return SequenceVerdict::Reject {
                    index: Some(k),
                    reason: "reduces to zero modulo its predecessors (a zero-divisor)".into(),
                };
            }
            if nf.is_unit() == UnitStatus::Unit {
                return SequenceVerdict::Reject {
                    index: Some(k),
                    reason: "is a unit, so the quotient collapses to the zero ring".into(),
                };
            }
            relations.push(elem.clone());
            match Ring::new(RingSpec::quotient(
                poly_spec.clone(),
                inverted.clone(),
                relations.clone(),
            )) {
                Ok(next) => {
                    current = next;
                }
                Err(Error::NotTriangular(_)) => {
                    // not structurally regular: fall back to the exact
                    // zero-divisor decision on module-finite rings
                    match current.is_zero_divisor(nf.value()) {
                        Some(true) => {
                            return SequenceVerdict::Reject {
                                index: Some(k),
                                reason: "is a zero-divisor modulo its predecessors".into(),
                            }
                        }
                        Some(false) => {
                            return SequenceVerdict::Unknown {
                                index: Some(k),
                                reason: "regular, but the intermediate quotient is not \
                                         representable in triangular form"
                                    .into(),
                            }
                        }
                        None => {
                            return SequenceVerdict::Unknown {
                                index: Some(k),
                                reason: "regularity is not structurally decidable".into(),
                            }
                        }
                    }
                }
                Err(e) => return verdict_from_ring_error(e, Some(k)),
            }
        }

        SequenceVerdict::Accept { result: current }
    }

    /// The result ring of an accepted presentation.
    pub fn result_ring(&self) -> Result<Ring> {
        match self.validate() {
            SequenceVerdict::Accept { result } => Ok(result),
            SequenceVerdict::Reject { index, reason } => Err(Error::Invalid(format!(
                "presentation rejected{}: {reason}",
                index.map(|i| format!(" at index {i}")).unwrap_or_default()
            ))),
            SequenceVerdict::Unknown { index, reason } => Err(Error::Undecidable(format!(
                "presentation unknown{}: {reason}",
                index.map(|i| format!(" at index {i}")).unwrap_or_default()
            ))),
        }
    }
}

fn verdict_from_ring_error(e: Error, index: Option<usize>) -> SequenceVerdict {
    match e {
        Error::ZeroRing => SequenceVerdict::Reject {
            index,
            reason: Error::ZeroRing.to_string(),
        },
        Error::Undecidable(why) => SequenceVerdict::Unknown { index, reason: why },
        Error::NotInvertible(why) => SequenceVerdict::Unknown {
            index,
            reason: format!("{why}; the localised quotient is not representable"),
        },
        other => SequenceVerdict::Reject {
            index,
            reason: other.to_string(),
        },
    }
}

fn scalar_of(poly_spec: &RingSpec) -> Result<ScalarRing> {
    match poly_spec {
        RingSpec::PolynomialRing { base, .. } => match &**base {
            RingSpec::Rationals => Ok(ScalarRing::Rationals),
            RingSpec::LocalizedIntegers { inverted_primes } => Ok(ScalarRing::LocalizedIntegers {
                inverted: inverted_primes.clone(),
            }),
            RingSpec::PrimeField { p } => Ok(ScalarRing::PrimeField { p: *p }),
            _ => Err(Error::InvalidRing("nested polynomial base".into())),
        },
        _ => Err(Error::InvalidRing("expected a polynomial ring".into())),
    }
}

fn value_poly(v: &Value) -> Result<Poly> {
    match v {
        Value::P(p) => Ok(p.clone()),
        Value::S(_) => Err(Error::Invalid(
            "scalar-ring element where a polynomial was expected".into(),
        )),
    }
}

/// Choose a polynomial preimage of a quotient element: clear the declared
/// invertible (Laurent) factors from its normal form, then re-express the
/// coefficients in the requested scalar ring (integer lifts for residues).
fn lift_element(quot: &Ring, e: &RingElement, target_scalar: &ScalarRing) -> Result<Poly> {
    let p = value_poly(e.value())?;
    let inverted = quot.inverted_var_indices();
    let nvars = quot.vars().len();
    let mut shift = vec![0i32; nvars];
    for &v in &inverted {
        let m = p.min_exp_in(v);
        if m < 0 {
            shift[v] = -m;
        }
    }
    let cleared = p.mul_monomial(
        quot.scalar_ring(),
        &shift,
        &crate::scalar::one(quot.scalar_ring()),
    );
    // residues lift to their canonical integer representatives
    let mut out = Poly::zero();
    for (exps, c) in &cleared.terms {
        let lifted = match (c, target_scalar) {
            (Scalar::Mod(m), ScalarRing::PrimeField { .. }) => Scalar::Mod(*m),
            (Scalar::Mod(m), _) => Scalar::from_int(target_scalar, *m as i64),
            (Scalar::Rat(r), _) => Scalar::from_rational(target_scalar, r.clone())
                .ok_or_else(|| {
                    Error::Undecidable(format!(
                        "coefficient {r} has no preimage in the base coefficient ring"
                    ))
                })?,
        };
        out.add_term(target_scalar, exps.clone(), &lifted);
    }
    Ok(out)
}

/// Flatten a relative presentation onto the base of `inner`: the inverted
/// list is the union (with the outer witnesses lifted), and the sequence is
/// `inner`'s followed by chosen preimages of `outer`'s. The composed
/// presentation is validated, and its result ring must agree with the
/// two-step construction on the normal form of every generator.
pub fn compose(outer: &Presentation, inner: &Presentation) -> Result<Presentation> {
    let inner_result = inner.result_ring().map_err(|e| match e {
        Error::Undecidable(w) => Error::Undecidable(format!("inner presentation: {w}")),
        other => Error::Invalid(format!("inner presentation: {other}")),
    })?;
    if outer.base() != &inner_result {
        return Err(Error::RingMismatch(
            "the outer presentation must live over the inner result ring".into(),
        ));
    }
    let outer_result = outer.result_ring().map_err(|e| match e {
        Error::Undecidable(w) => Error::Undecidable(format!("outer presentation: {w}")),
        other => Error::Invalid(format!("outer presentation: {other}")),
    })?;

    let core_scalar = scalar_of(&match inner.base().spec() {
        RingSpec::PolynomialRing { .. } => inner.base().spec().clone(),
        _ => {
            return Err(Error::InvalidRing(
                "composition flattens onto a polynomial base".into(),
            ))
        }
    })?;

    let mut inverted = inner.inverted.clone();
    for w in &outer.inverted {
        let lifted = lift_element(&inner_result, w, &core_scalar)?;
        inverted.push(inner.base.element_from_poly(lifted)?);
    }
    let mut sequence = inner.sequence.clone();
    for z in &outer.sequence {
        let lifted = lift_element(&inner_result, z, &core_scalar)?;
        sequence.push(inner.base.element_from_poly(lifted)?);
    }

    let composed = Presentation::new(inner.base.clone(), inverted, sequence)?;
    let composed_result = composed.result_ring().map_err(|e| match e {
        Error::Undecidable(w) => Error::Undecidable(format!("composed presentation: {w}")),
        other => Error::Invalid(format!("composed presentation: {other}")),
    })?;

    // the flattening must present the same ring as the two-step construction:
    // every generator's normal form agrees
    for name in composed_result.vars() {
        let a = composed_result.var(name)?;
        let b = outer_result.var(name)?;
        if a.value() != b.value() {
            return Err(Error::Invalid(format!(
                "composition mismatch: generator {name} normalises to {} vs {}",
                a.format(),
                b.format()
            )));
        }
    }

    Ok(composed)
}

/// Presentation-level tensor product: joint polynomial base (colliding
/// variables of `q` are renamed), union of the localisations, concatenated
/// sequences. Fails if the concatenated sequence does not validate.
pub fn tensor(p: &Presentation, q: &Presentation) -> Result<Presentation> {
    let (p_spec, p_inv, p_seq, p_pre) = p.flat_parts()?;
    let (q_spec, q_inv, q_seq, q_pre) = q.flat_parts()?;
    let (p_scalar, p_vars) = match &p_spec {
        RingSpec::PolynomialRing { vars, .. } => (scalar_of(&p_spec)?, vars.clone()),
        _ => unreachable!(),
    };
    let (q_scalar, q_vars) = match &q_spec {
        RingSpec::PolynomialRing { vars, .. } => (scalar_of(&q_spec)?, vars.clone()),
        _ => unreachable!(),
    };
    if p_scalar != q_scalar {
        return Err(Error::RingMismatch(
            "tensor requires the same coefficient core".into(),
        ));
    }

    // disjoint variable names: rename colliding q-variables deterministically
    let mut names: BTreeSet<String> = p_vars.iter().cloned().collect();
    let mut q_renamed = Vec::with_capacity(q_vars.len());
    for v in &q_vars {
        let mut candidate = v.clone();
        let mut n = 1usize;
        while names.contains(&candidate) {
            n += 1;
            candidate = format!("{v}_{n}");
        }
        names.insert(candidate.clone());
        q_renamed.push(candidate);
    }

    let joint_vars: Vec<String> = p_vars.iter().cloned().chain(q_renamed).collect();
    let joint_spec = RingSpec::PolynomialRing {
        base: Box::new(match &p_spec {
            RingSpec::PolynomialRing { base, .. } => (**base).clone(),
            _ => unreachable!(),
        }),
        vars: joint_vars.clone(),
    };
    let joint = Ring::new(joint_spec)?;

    let p_map: Vec<usize> = (0..p_vars.len()).collect();
    let q_map: Vec<usize> = (0..q_vars.len()).map(|i| p_vars.len() + i).collect();
    let reindex = |polys: Vec<Poly>, map: &[usize]| -> Result<Vec<RingElement>> {
        polys
            .into_iter()
            .map(|poly| joint.element_from_poly(poly.reindex(map, joint_vars.len())))
            .collect()
    };

    let mut inverted = reindex(p_inv, &p_map)?;
    inverted.extend(reindex(q_inv, &q_map)?);
    let mut sequence = reindex(p_pre, &p_map)?;
    sequence.extend(reindex(p_seq, &p_map)?);
    sequence.extend(reindex(q_pre, &q_map)?);
    sequence.extend(reindex(q_seq, &q_map)?);

    let out = Presentation::new(joint, inverted, sequence)?;
    match out.validate() {
        SequenceVerdict::Accept { .. } => Ok(out),
        SequenceVerdict::Reject { index, reason } => Err(Error::Invalid(format!(
            "tensor does not validate{}: {reason}",
            index.map(|i| format!(" at index {i}")).unwrap_or_default()
        ))),
        SequenceVerdict::Unknown { index, reason } => Err(Error::Undecidable(format!(
            "tensor regularity unknown{}: {reason}",
            index.map(|i| format!(" at index {i}")).unwrap_or_default()
        ))),
    }
}

/// Finite-basis algebra data over a presented ring, with its multiplication
/// table: `table[i][j]` holds the coordinates of e_i * e_j in the basis.
/// `declared` pins selected products (the algebra's defining relations) the
/// table must reproduce.
#[derive(Clone, Debug)]
pub struct FreeAlgebraData {
    pub coeff_ring: Ring,
    pub basis: Vec<String>,
    pub unit_index: usize,
    pub table: Vec<Vec<Vec<RingElement>>>,
    pub declared: Vec<(usize, usize, Vec<RingElement>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FreeModuleOutcome {
    Accept,
    Violation(FreeModuleViolation),
}

#[derive(Clone, Debug, PartialEq)]
pub enum FreeModuleViolation {
    Unit { index: usize },
    Commutativity { i: usize, j: usize },
    Associativity { i: usize, j: usize, k: usize },
    Declared { i: usize, j: usize },
}

impl std::fmt::Display for FreeModuleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FreeModuleViolation::Unit { index } => {
                write!(f, "unit law fails against basis element {index}")
            }
            FreeModuleViolation::Commutativity { i, j } => {
                write!(f, "commutativity fails at pair ({i},{j})")
            }
            FreeModuleViolation::Associativity { i, j, k } => {
                write!(f, "associativity fails at triple ({i},{j},{k})")
            }
            FreeModuleViolation::Declared { i, j } => {
                write!(f, "table entry ({i},{j}) contradicts the declared product")
            }
        }
    }
}

/// Check that the table defines a commutative, unital, associative algebra
/// structure on the free module with the given basis.
pub fn check_free_module(data: &FreeAlgebraData) -> Result<FreeModuleOutcome> {
    let n = data.basis.len();
    if data.unit_index >= n {
        return Err(Error::Invalid("unit index out of range".into()));
    }
    if data.table.len() != n || data.table.iter().any(|row| row.len() != n) {
        return Err(Error::Invalid("multiplication table must be n x n".into()));
    }
    for row in &data.table {
        for entry in row {
            if entry.len() != n {
                return Err(Error::Invalid(
                    "table entries are coordinate vectors over the basis".into(),
                ));
            }
            for c in entry {
                if c.ring() != &data.coeff_ring {
                    return Err(Error::RingMismatch(
                        "table coefficient outside the coefficient ring".into(),
                    ));
                }
            }
        }
    }

    let ring = &data.coeff_ring;
    let unit_vec = |idx: usize| -> Vec<RingElement> {
        (0..n)
            .map(|l| if l == idx { ring.one() } else { ring.zero() })
            .collect()
    };
    // unit
    for j in 0..n {
        if data.table[data.unit_index][j] != unit_vec(j)
            || data.table[j][data.unit_index] != unit_vec(j)
        {
            return Ok(FreeModuleOutcome::Violation(FreeModuleViolation::Unit {
                index: j,
            }));
        }
    }
    // commutativity
    for i in 0..n {
        for j in (i + 1)..n {
            if data.table[i][j] != data.table[j][i] {
                return Ok(FreeModuleOutcome::Violation(
                    FreeModuleViolation::Commutativity { i, j },
                ));
            }
        }
    }
    // declared products
    for (i, j, expected) in &data.declared {
        if *i >= n || *j >= n || expected.len() != n {
            return Err(Error::Invalid("declared product out of range".into()));
        }
        if &data.table[*i][*j] != expected {
            return Ok(FreeModuleOutcome::Violation(FreeModuleViolation::Declared {
                i: *i,
                j: *j,
            }));
        }
    }
    // associativity: (e_i e_j) e_k = e_i (e_j e_k), expanded through the table
    let mul_vec = |v: &[RingElement], k: usize| -> Vec<RingElement> {
        let mut out = vec![ring.zero(); n];
        for (l, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (m, d) in data.table[l][k].iter().enumerate() {
                out[m] = out[m].add(&c.mul(d));
            }
        }
        out
    };
    let mul_vec_left = |i: usize, v: &[RingElement]| -> Vec<RingElement> {
        let mut out = vec![ring.zero(); n];
        for (l, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (m, d) in data.table[i][l].iter().enumerate() {
                out[m] = out[m].add(&c.mul(d));
            }
        }
        out
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = mul_vec(&data.table[i][j], k);
                let rhs = mul_vec_left(i, &data.table[j][k]);
                if lhs != rhs {
                    return Ok(FreeModuleOutcome::Violation(
                        FreeModuleViolation::Associativity { i, j, k },
                    ));
                }
            }
        }
    }
    Ok(FreeModuleOutcome::Accept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RawTerm;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn raw(terms: &[(i64, &[(&str, i32)])]) -> Vec<RawTerm> {
        terms
            .iter()
            .map(|(n, es)| RawTerm {
                coeff: BigRational::from(BigInt::from(*n)),
                exps: es.iter().map(|(v, e)| (v.to_string(), *e)).collect(),
            })
            .collect()
    }

    fn z2_poly(vars: &[&str]) -> Ring {
        Ring::new(RingSpec::polynomial(RingSpec::localized(&[2]), vars)).unwrap()
    }

    #[test]
    fn fresh_variables_are_regular() {
        // Z[1/2][x1,x2], sequence (x1, x2) accepts
        let base = z2_poly(&["x1", "x2"]);
        let p = Presentation::new(
            base.clone(),
            vec![],
            vec![base.var("x1").unwrap(), base.var("x2").unwrap()],
        )
        .unwrap();
        assert!(p.validate().is_accept());
    }

    #[test]
    fn repeated_element_is_rejected() {
        // (x1, x1): the second x1 reduces to zero
        let base = z2_poly(&["x1", "x2"]);
        let p = Presentation::new(
            base.clone(),
            vec![],
            vec![base.var("x1").unwrap(), base.var("x1").unwrap()],
        )
        .unwrap();
        match p.validate() {
            SequenceVerdict::Reject { index, .. } => assert_eq!(index, Some(1)),
            v => panic!("expected rejection, got {}", v.describe()),
        }
    }

    #[test]
    fn zero_divisor_detected_by_enumeration_scale_check() {
        // F_3[x], sequence (x^2) then x: x is a zero-divisor in F_3[x]/(x^2)
        let base = Ring::new(RingSpec::polynomial(RingSpec::prime_field(3), &["x"])).unwrap();
        let x2 = base.normalize(&raw(&[(1, &[("x", 2)])])).unwrap();
        let x = base.var("x").unwrap();
        let p = Presentation::new(base, vec![], vec![x2, x]).unwrap();
        match p.validate() {
            SequenceVerdict::Reject { index, reason } => {
                assert_eq!(index, Some(1));
                assert!(reason.contains("zero-divisor"), "reason: {reason}");
            }
            v => panic!("expected rejection, got {}", v.describe()),
        }
    }

    #[test]
    fn unit_element_collapses_quotient() {
        let base = z2_poly(&["x"]);
        let two = base.from_int(2);
        let p = Presentation::new(base, vec![], vec![two]).unwrap();
        match p.validate() {
            SequenceVerdict::Reject { index, .. } => assert_eq!(index, Some(0)),
            v => panic!("expected rejection, got {}", v.describe()),
        }
    }

    #[test]
    fn odd_prime_scalar_folds_the_coefficients() {
        let base = z2_poly(&["x"]);
        let three = base.from_int(3);
        let rel = base.normalize(&raw(&[(1, &[("x", 2)]), (1, &[])])).unwrap();
        let p = Presentation::new(base, vec![], vec![three, rel]).unwrap();
        let result = p.validate().result().cloned().expect("accepts");
        assert_eq!(result.characteristic(), 3);
        assert_eq!(result.bounded_dim(), Some(2));
    }

    #[test]
    fn composite_scalar_is_unknown() {
        let base = z2_poly(&["x"]);
        let fifteen = base.from_int(15);
        let x = base.var("x").unwrap();
        let p = Presentation::new(base, vec![], vec![fifteen, x]).unwrap();
        assert!(matches!(p.validate(), SequenceVerdict::Unknown { .. }));
    }

    #[test]
    fn compose_flattens_a_tower() {
        // inner: Z[1/2][x,y]/(x); outer over it: invert y, quotient (y-1);
        // combined: invert {y}, sequence (x, y-1), result = Z[1/2]
        let base = z2_poly(&["x", "y"]);
        let inner = Presentation::new(base.clone(), vec![], vec![base.var("x").unwrap()]).unwrap();
        let inner_result = inner.result_ring().unwrap();
        let y_in_result = inner_result.var("y").unwrap();
        let y_minus_1 = y_in_result.sub(&inner_result.one());
        let outer =
            Presentation::new(inner_result.clone(), vec![y_in_result], vec![y_minus_1]).unwrap();

        let composed = compose(&outer, &inner).unwrap();
        assert_eq!(composed.base(), &base);
        assert_eq!(composed.sequence().len(), 2);
        let result = composed.result_ring().unwrap();
        // x and y-1 both die; y is invertible; the ring is Z[1/2] in disguise
        assert!(result.var("x").unwrap().is_zero());
        assert_eq!(result.var("y").unwrap(), result.one());
    }

    #[test]
    fn compose_of_pure_localisations() {
        let base = z2_poly(&["x", "y"]);
        let inner =
            Presentation::new(base.clone(), vec![base.var("x").unwrap()], vec![]).unwrap();
        let inner_result = inner.result_ring().unwrap();
        let outer = Presentation::new(
            inner_result.clone(),
            vec![inner_result.var("y").unwrap()],
            vec![],
        )
        .unwrap();
        let composed = compose(&outer, &inner).unwrap();
        assert_eq!(composed.inverted().len(), 2);
        let result = composed.result_ring().unwrap();
        // x^{-1} y^{-1} reduces identically on both construction routes
        let xy_inv = result
            .normalize(&raw(&[(1, &[("x", -1), ("y", -1)])]))
            .unwrap();
        let xy = result
            .normalize(&raw(&[(1, &[("x", 1), ("y", 1)])]))
            .unwrap();
        assert!(xy_inv.mul(&xy).is_one());
    }

    #[test]
    fn compose_with_identity_inner() {
        let base = z2_poly(&["x"]);
        let inner = Presentation::new(base.clone(), vec![], vec![]).unwrap();
        let inner_result = inner.result_ring().unwrap();
        let x_rel = inner_result.var("x").unwrap().sub(&inner_result.from_int(1));
        let outer = Presentation::new(inner_result, vec![], vec![x_rel]).unwrap();
        let composed = compose(&outer, &inner).unwrap();
        assert_eq!(composed.sequence().len(), 1);
        assert!(composed.validate().is_accept());
    }

    #[test]
    fn tensor_of_disjoint_quotients() {
        // (Z[1/2][x]/(x-1)) tensor (Z[1/2][y]/(y-2)) accepts and kills both
        let bx = z2_poly(&["x"]);
        let by = z2_poly(&["y"]);
        let p = Presentation::new(
            bx.clone(),
            vec![],
            vec![bx.var("x").unwrap().sub(&bx.one())],
        )
        .unwrap();
        let q = Presentation::new(
            by.clone(),
            vec![],
            vec![by.var("y").unwrap().sub(&by.from_int(2))],
        )
        .unwrap();
        let t = tensor(&p, &q).unwrap();
        let result = t.result_ring().unwrap();
        assert_eq!(result.var("x").unwrap(), result.one());
        assert_eq!(result.var("y").unwrap(), result.from_int(2));
    }

    #[test]
    fn tensor_renames_collisions() {
        let bx = z2_poly(&["x"]);
        let p = Presentation::new(bx.clone(), vec![], vec![]).unwrap();
        let q = Presentation::new(
            bx.clone(),
            vec![],
            vec![bx.var("x").unwrap().sub(&bx.one())],
        )
        .unwrap();
        let t = tensor(&p, &q).unwrap();
        assert_eq!(t.base().vars(), &["x".to_string(), "x_2".to_string()]);
    }

    #[test]
    fn tensor_of_finite_fields_counts_nine_elements() {
        // (F_3[x]/(x^2+1)) tensor (F_3[y]/(y-1)) = F_9 by exhaustive count
        let bx = Ring::new(RingSpec::polynomial(RingSpec::prime_field(3), &["x"])).unwrap();
        let by = Ring::new(RingSpec::polynomial(RingSpec::prime_field(3), &["y"])).unwrap();
        let x2p1 = bx.normalize(&raw(&[(1, &[("x", 2)]), (1, &[])])).unwrap();
        let p = Presentation::new(bx, vec![], vec![x2p1]).unwrap();
        let ym1 = by.var("y").unwrap().sub(&by.one());
        let q = Presentation::new(by, vec![], vec![ym1]).unwrap();
        let t = tensor(&p, &q).unwrap();
        let result = t.result_ring().unwrap();
        let all = result.enumerate().expect("finite ring");
        assert_eq!(all.len(), 9);
        // and it is a field: every nonzero element is a unit
        for e in all {
            if !e.is_zero() {
                assert_eq!(e.is_unit(), UnitStatus::Unit);
            }
        }
    }

    #[test]
    fn free_module_certificate_for_f9_over_f3() {
        // basis {1, a} with a^2 = -1: 4 products, all checks pass
        let f3 = Ring::new(RingSpec::prime_field(3)).unwrap();
        let one = || f3.one();
        let zero = || f3.zero();
        let neg1 = || f3.from_int(-1);
        let table = vec![
            vec![vec![one(), zero()], vec![zero(), one()]],
            vec![vec![zero(), one()], vec![neg1(), zero()]],
        ];
        let data = FreeAlgebraData {
            coeff_ring: f3.clone(),
            basis: vec!["1".into(), "a".into()],
            unit_index: 0,
            table,
            declared: vec![(1, 1, vec![neg1(), zero()])],
        };
        assert_eq!(check_free_module(&data).unwrap(), FreeModuleOutcome::Accept);

        // a^2 = a contradicts the declared product a^2 = -1
        let mut bad = data;
        bad.table[1][1] = vec![zero(), one()];
        assert_eq!(
            check_free_module(&bad).unwrap(),
            FreeModuleOutcome::Violation(FreeModuleViolation::Declared { i: 1, j: 1 })
        );
    }

    #[test]
    fn trivial_free_module_over_itself() {
        let f3 = Ring::new(RingSpec::prime_field(3)).unwrap();
        let data = FreeAlgebraData {
            coeff_ring: f3.clone(),
            basis: vec!["1".into()],
            unit_index: 0,
            table: vec![vec![vec![f3.one()]]],
            declared: vec![],
        };
        assert_eq!(check_free_module(&data).unwrap(), FreeModuleOutcome::Accept);
    }

    #[test]
    fn sequence_order_within_block_is_immaterial() {
        // permuting an (independently triangular) block leaves all generator
        // normal forms unchanged
        let base = z2_poly(&["x", "y", "z"]);
        let rels = [
            base.normalize(&raw(&[(1, &[("x", 1)]), (-5, &[])])).unwrap(),
            base.normalize(&raw(&[(1, &[("y", 1)]), (1, &[("x", 2)])]))
                .unwrap(),
            base.normalize(&raw(&[(1, &[("z", 1)]), (-1, &[("x", 1)])]))
                .unwrap(),
        ];
        let p1 = Presentation::new(base.clone(), vec![], rels.to_vec()).unwrap();
        let p2 = Presentation::new(
            base.clone(),
            vec![],
            vec![rels[2].clone(), rels[0].clone(), rels[1].clone()],
        )
        .unwrap();
        let r1 = p1.result_ring().unwrap();
        let r2 = p2.result_ring().unwrap();
        for v in ["x", "y", "z"] {
            assert_eq!(r1.var(v).unwrap().value(), r2.var(v).unwrap().value());
        }
    }
}
