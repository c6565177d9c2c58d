//! Presentations of standard rings (localised integers, Q, finite fields,
//! and module-finite field data over Q) over a polynomial base, with
//! explicit isomorphism witnesses.
//!
//! For an integer-localisation target the sequence is (x_k - a_k), clearing
//! denominators into localisation witnesses. For field targets the sequence
//! is (p, z_1, z_2, ...) where z_k is a monic lift of the minimal polynomial
//! of the k-th image over the subfield generated by the earlier ones; the
//! minimal polynomials are found by exact linear algebra over the prime
//! field. The images must generate the target, so that the presented ring is
//! the whole of it; every target generator receives an explicit polynomial
//! preimage.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::Poly;
use crate::ring::{Ring, RingElement, RingSpec, Value};
use crate::scalar::{self, Scalar, ScalarRing};

use super::{Presentation, SequenceVerdict};

/// Mutually inverse maps on generators: `forward_images[k]` is the target
/// image of the k-th base variable, and `back_images` assigns each target
/// generator a polynomial preimage over the base variables.
#[derive(Clone, Debug)]
pub struct IsoWitness {
    pub target: Ring,
    pub forward_images: Vec<RingElement>,
    pub back_images: BTreeMap<String, Poly>,
}

/// A presentation together with the witness that its result ring is the
/// target, generator by generator.
#[derive(Clone, Debug)]
pub struct StandardPresentation {
    pub presentation: Presentation,
    pub witness: IsoWitness,
}

impl IsoWitness {
    /// Express a target element as a polynomial over the base variables
    /// (scalars embed, residues lift to canonical integers, target variables
    /// go through their recorded preimages). Also reports the odd primes
    /// appearing in denominators, which the ambient presentation must invert.
    pub fn lift(&self, a: &RingElement, base_vars: usize) -> Result<(Poly, BTreeSet<u64>)> {
        if a.ring() != &self.target {
            return Err(Error::RingMismatch("lift of a foreign element".into()));
        }
        let q = ScalarRing::Rationals;
        let mut primes = BTreeSet::new();
        let lift_scalar = |s: &Scalar, primes: &mut BTreeSet<u64>| -> Result<Scalar> {
            match s {
                Scalar::Mod(m) => Ok(Scalar::Rat(num_bigint::BigInt::from(*m).into())),
                Scalar::Rat(r) => {
                    collect_odd_primes(r.denom(), primes)?;
                    Ok(Scalar::Rat(r.clone()))
                }
            }
        };
        match a.value() {
            Value::S(s) => {
                let c = lift_scalar(s, &mut primes)?;
                Ok((Poly::constant(&q, c, base_vars), primes))
            }
            Value::P(p) => {
                let tvars = self.target.vars();
                let mut acc = Poly::zero();
                for (exps, c) in &p.terms {
                    let mut term = Poly::constant(&q, lift_scalar(c, &mut primes)?, base_vars);
                    for (i, &e) in exps.iter().enumerate() {
                        if e == 0 {
                            continue;
                        }
                        if e < 0 {
                            return Err(Error::Undecidable(
                                "lift of a localised target element".into(),
                            ));
                        }
                        let back = self.back_images.get(&tvars[i]).ok_or_else(|| {
                            Error::Invalid(format!(
                                "no preimage recorded for target generator `{}`",
                                tvars[i]
                            ))
                        })?;
                        term = term.mul(&q, &back.pow(&q, e as u32));
                    }
                    acc = acc.add(&q, &term);
                }
                Ok((acc, primes))
            }
        }
    }

    /// Check that the forward and backward maps are mutually inverse on all
    /// generators of the given result ring and of the target.
    pub fn verify(&self, result: &Ring) -> Result<()> {
        use crate::ring::RingHom;
        let phi = RingHom::new(result.clone(), self.target.clone(), self.forward_images.clone())?;
        let nvars = result.vars().len();
        for (k, name) in result.vars().iter().enumerate() {
            let (lifted, _) = self.lift(&self.forward_images[k], nvars)?;
            let roundtrip = result.element_from_poly(lifted)?;
            let direct = result.var(name)?;
            if roundtrip != direct {
                return Err(Error::Invalid(format!(
                    "witness mismatch: generator {name} is not fixed by the composite"
                )));
            }
        }
        for name in self.target.vars() {
            let back = self.back_images.get(name).ok_or_else(|| {
                Error::Invalid(format!("no preimage recorded for target generator `{name}`"))
            })?;
            let in_result = result.element_from_poly(back.clone())?;
            let image = phi.apply(&in_result)?;
            if image != self.target.var(name)? {
                return Err(Error::Invalid(format!(
                    "witness mismatch: target generator {name} is not fixed by the composite"
                )));
            }
        }
        Ok(())
    }
}

fn collect_odd_primes(n: &num_bigint::BigInt, primes: &mut BTreeSet<u64>) -> Result<()> {
    let mut m = n.abs();
    let two: num_bigint::BigInt = 2.into();
    while (&m % &two) == 0.into() && m != 0.into() {
        m /= &two;
    }
    let small = u64::try_from(m).map_err(|_| {
        Error::Undecidable("denominator too large to factor at desk scale".into())
    })?;
    if small > 1 {
        for (p, _) in scalar::factor(small)
            .ok_or_else(|| Error::Undecidable(format!("cannot factor {small}")))?
        {
            primes.insert(p);
        }
    }
    Ok(())
}

/// Present a standard target over a fresh polynomial base on the given
/// generators, sending generator k to `images[k]`.
pub fn standard_presentation(
    target: &Ring,
    gens: &[String],
    images: &[RingElement],
    degree_bound: usize,
) -> Result<StandardPresentation> {
    if gens.len() != images.len() {
        return Err(Error::Invalid(format!(
            "{} generators but {} images",
            gens.len(),
            images.len()
        )));
    }
    for im in images {
        if im.ring() != target {
            return Err(Error::RingMismatch("image outside the target ring".into()));
        }
    }
    let gen_refs: Vec<&str> = gens.iter().map(|s| s.as_str()).collect();
    let base_spec = RingSpec::polynomial(RingSpec::localized(&[2]), &gen_refs);
    let base = Ring::new(base_spec)?;

    let out = match target.spec() {
        RingSpec::Rationals | RingSpec::LocalizedIntegers { .. } => {
            scalar_target(target, &base, images)?
        }
        RingSpec::PrimeField { .. } | RingSpec::TriangularQuotient { .. } => {
            field_target(target, &base, images, degree_bound)?
        }
        _ => {
            return Err(Error::Invalid(
                "target is not standard: expected a field or a localisation of Z".into(),
            ))
        }
    };

    match out.presentation.validate() {
        SequenceVerdict::Accept { result } => {
            out.witness.verify(&result)?;
            Ok(out)
        }
        SequenceVerdict::Reject { index, reason } => Err(Error::Invalid(format!(
            "standard presentation rejected{}: {reason}",
            index.map(|i| format!(" at index {i}")).unwrap_or_default()
        ))),
        SequenceVerdict::Unknown { index, reason } => Err(Error::Undecidable(format!(
            "standard presentation unknown{}: {reason}",
            index.map(|i| format!(" at index {i}")).unwrap_or_default()
        ))),
    }
}

/// Z[1/2n] and Q targets: sequence x_k - a_k with denominators cleared into
/// witnesses, plus the target's own declared odd primes.
fn scalar_target(
    target: &Ring,
    base: &Ring,
    images: &[RingElement],
) -> Result<StandardPresentation> {
    let mut primes: BTreeSet<u64> = BTreeSet::new();
    if let RingSpec::LocalizedIntegers { inverted_primes } = target.spec() {
        primes.extend(inverted_primes.iter().copied().filter(|&p| p != 2));
    }
    let nvars = base.vars().len();
    let q = ScalarRing::Rationals;
    let mut sequence = Vec::with_capacity(images.len());
    for (k, a) in images.iter().enumerate() {
        let Value::S(Scalar::Rat(r)) = a.value() else {
            return Err(Error::Invalid("scalar target image must be a scalar".into()));
        };
        collect_odd_primes(r.denom(), &mut primes)?;
        // d x_k - n, i.e. x_k - a_k scaled by the (invertible) denominator
        let mut z = Poly::variable(&q, k, nvars)
            .scalar_mul(&q, &Scalar::Rat(r.denom().clone().into()));
        z = z.sub(
            &q,
            &Poly::constant(&q, Scalar::Rat(r.numer().clone().into()), nvars),
        );
        sequence.push(base.element_from_poly(z)?);
    }
    let inverted = primes
        .iter()
        .map(|&p| base.from_int(p as i64))
        .collect::<Vec<_>>();
    let presentation = Presentation::new(base.clone(), inverted, sequence)?;
    Ok(StandardPresentation {
        presentation,
        witness: IsoWitness {
            target: target.clone(),
            forward_images: images.to_vec(),
            back_images: BTreeMap::new(),
        },
    })
}

/// Field targets: prime fields, finite fields, and module-finite field data
/// over Q. Builds the tower of subfields generated by successive images and
/// lifts each minimal polynomial to a monic triangular sequence element.
fn field_target(
    target: &Ring,
    base: &Ring,
    images: &[RingElement],
    degree_bound: usize,
) -> Result<StandardPresentation> {
    let kappa = target.scalar_ring().clone();
    if !kappa.is_field() {
        return Err(Error::Invalid(
            "target is not standard: field data must live over Q or F_p".into(),
        ));
    }
    let p = kappa.characteristic();
    if target.monomial_basis().is_none() {
        return Err(Error::Invalid(
            "field data must be module-finite over its prime coefficients".into(),
        ));
    }
    // finite targets get an exhaustive field check
    if p > 0 {
        if let Some(all) = target.enumerate() {
            for e in &all {
                if !e.is_zero() && e.is_unit() != crate::ring::UnitStatus::Unit {
                    return Err(Error::Invalid(
                        "target is not a field: found a nonzero non-unit".into(),
                    ));
                }
            }
        }
    }

    let coords = |e: &RingElement| -> Result<Vec<Scalar>> {
        target
            .coordinates(e.value())
            .ok_or_else(|| Error::Invalid("target coordinates unavailable".into()))
    };

    let q = ScalarRing::Rationals;
    let nvars = base.vars().len();
    let mut primes: BTreeSet<u64> = BTreeSet::new();

    // the subfield generated so far: elements, their coordinate vectors, and
    // polynomial preimages over the base variables
    let mut span_elems: Vec<RingElement> = vec![target.one()];
    let mut span_vecs: Vec<Vec<Scalar>> = vec![coords(&target.one())?];
    let mut span_reprs: Vec<Poly> = vec![Poly::one(&q, nvars)];

    let mut sequence: Vec<Poly> = Vec::new();
    if p > 0 {
        sequence.push(Poly::constant(
            &q,
            Scalar::Rat(num_bigint::BigInt::from(p).into()),
            nvars,
        ));
    }

    // scale a rational-coefficient preimage by a kappa scalar
    let scale_repr = |repr: &Poly, c: &Scalar, primes: &mut BTreeSet<u64>| -> Result<Poly> {
        match c {
            Scalar::Mod(m) => Ok(repr.scalar_mul(&q, &Scalar::Rat(num_bigint::BigInt::from(*m).into()))),
            Scalar::Rat(r) => {
                collect_odd_primes(r.denom(), primes)?;
                Ok(repr.scalar_mul(&q, &Scalar::Rat(r.clone())))
            }
        }
    };

    for (k, a) in images.iter().enumerate() {
        // powers 1, a, a^2, ... and the least d with a^d in the span of
        // lower powers over the current subfield
        let mut powers: Vec<RingElement> = vec![target.one()];
        let mut found: Option<(usize, Vec<Scalar>)> = None;
        for d in 1..=degree_bound {
            let next = powers.last().unwrap().mul(a);
            powers.push(next);
            let mut columns: Vec<Vec<Scalar>> = Vec::new();
            for power in powers.iter().take(d) {
                for b in &span_elems {
                    columns.push(coords(&b.mul(power))?);
                }
            }
            let rhs = coords(&powers[d])?;
            if let Some(sol) = linalg::solve(&kappa, &columns, &rhs) {
                found = Some((d, sol));
                break;
            }
        }
        let Some((d, sol)) = found else {
            return Err(Error::Undecidable(format!(
                "minimal polynomial of image {k} not found within degree bound {degree_bound}"
            )));
        };

        // z_k = x_k^d - sum_i (lift of the i-th coefficient) x_k^i
        let nb = span_elems.len();
        let mut z = Poly::monomial(&q, unit_exp(nvars, k, d as i32), scalar::one(&q));
        for i in 0..d {
            let mut coeff_repr = Poly::zero();
            for (l, repr) in span_reprs.iter().enumerate() {
                let c = &sol[i * nb + l];
                if c.is_zero() {
                    continue;
                }
                coeff_repr = coeff_repr.add(&q, &scale_repr(repr, c, &mut primes)?);
            }
            let shifted = coeff_repr.mul_monomial(&q, &unit_exp(nvars, k, i as i32), &scalar::one(&q));
            z = z.sub(&q, &shifted);
        }
        sequence.push(z);

        // extend the subfield span by the new powers, keeping a deterministic
        // independent subset
        let old_elems = span_elems.clone();
        let old_vecs_reprs: Vec<(Vec<Scalar>, Poly)> = span_vecs
            .iter()
            .cloned()
            .zip(span_reprs.iter().cloned())
            .collect();
        for i in 1..d {
            for (b, (_, repr)) in old_elems.iter().zip(old_vecs_reprs.iter()) {
                let cand = b.mul(&powers[i]);
                let cand_vec = coords(&cand)?;
                if !linalg::in_span(&kappa, &span_vecs, &cand_vec) {
                    let cand_repr =
                        repr.mul_monomial(&q, &unit_exp(nvars, k, i as i32), &scalar::one(&q));
                    span_elems.push(cand);
                    span_vecs.push(cand_vec);
                    span_reprs.push(cand_repr);
                }
            }
        }
    }

    // every target generator must lie in the generated subfield
    let mut back_images = BTreeMap::new();
    for name in target.vars() {
        let w = target.var(name)?;
        let wv = coords(&w)?;
        let Some(sol) = linalg::solve(&kappa, &span_vecs, &wv) else {
            return Err(Error::Invalid(format!(
                "images do not generate the target: `{name}` is outside the image subfield; \
                 add a generating image"
            )));
        };
        let mut repr = Poly::zero();
        for (l, c) in sol.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            repr = repr.add(&q, &scale_repr(&span_reprs[l], c, &mut primes)?);
        }
        back_images.insert(name.clone(), repr);
    }

    let inverted = primes
        .iter()
        .map(|&pr| base.from_int(pr as i64))
        .collect::<Vec<_>>();
    let sequence = sequence
        .into_iter()
        .map(|z| base.element_from_poly(z))
        .collect::<Result<Vec<_>>>()?;
    let presentation = Presentation::new(base.clone(), inverted, sequence)?;
    Ok(StandardPresentation {
        presentation,
        witness: IsoWitness {
            target: target.clone(),
            forward_images: images.to_vec(),
            back_images,
        },
    })
}

fn unit_exp(nvars: usize, var: usize, e: i32) -> Vec<i32> {
    let mut exps = vec![0; nvars];
    exps[var] = e;
    exps
}
