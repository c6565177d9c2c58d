//! Goodness certificates: a coordinate system over a presented base ring is
//! certified by exhibiting the whole system's classifying data as a
//! localised regular quotient of the finite surrogate ring.
//!
//! The surrogate ring for r extra coordinates is the base polynomial ring on
//! the mp-generators extended by one block of u-generators per extra
//! coordinate, with the first generator of each block inverted. The images
//! of the u-generators are the coefficients of the connecting isomorphisms
//! f_0..f_{r-1}; appending v = u - image for every u-generator presents the
//! base ring again, as a quotient of a quotient, flattened by composition.

use std::collections::BTreeSet;

use crate::category::{classify, FgObject};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ring::{Ring, RingElement, RingSpec, UnitStatus};
use crate::scalar;

use super::standard::{IsoWitness, StandardPresentation};
use super::{compose, Presentation};

/// Finite stand-in for the coefficient ring of r+1 smash factors: a scalar
/// core, named generators for the first factor, and one u-block per extra
/// factor whose first generator is inverted.
#[derive(Clone, Debug)]
pub struct MpSurrogate {
    core: RingSpec,
    mp_gens: Vec<String>,
    u_blocks: Vec<Vec<String>>,
}

impl MpSurrogate {
    pub fn new(core: RingSpec, mp_gens: Vec<String>, u_blocks: Vec<Vec<String>>) -> Result<MpSurrogate> {
        match core {
            RingSpec::Rationals | RingSpec::LocalizedIntegers { .. } | RingSpec::PrimeField { .. } => {}
            _ => {
                return Err(Error::InvalidRing(
                    "the surrogate core must be a scalar ring".into(),
                ))
            }
        }
        let mut seen = BTreeSet::new();
        for name in mp_gens.iter().chain(u_blocks.iter().flatten()) {
            if name.is_empty() || !seen.insert(name.clone()) {
                return Err(Error::Invalid(format!(
                    "surrogate generator names must be distinct; `{name}` repeats"
                )));
            }
        }
        for block in &u_blocks {
            if block.is_empty() {
                return Err(Error::Invalid("empty u-generator block".into()));
            }
        }
        Ok(MpSurrogate {
            core,
            mp_gens,
            u_blocks,
        })
    }

    pub fn core(&self) -> &RingSpec {
        &self.core
    }

    pub fn mp_gens(&self) -> &[String] {
        &self.mp_gens
    }

    pub fn u_blocks(&self) -> &[Vec<String>] {
        &self.u_blocks
    }

    /// The full surrogate polynomial ring on all generators.
    pub fn full_ring(&self) -> Result<Ring> {
        let vars: Vec<String> = self
            .mp_gens
            .iter()
            .cloned()
            .chain(self.u_blocks.iter().flatten().cloned())
            .collect();
        let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        Ring::new(RingSpec::polynomial(self.core.clone(), &refs))
    }
}

/// The emitted certificate: the base presentation, the lifted presentation
/// over the full surrogate, the appended elements v = u - a, and the
/// validated result ring (isomorphic to the object's base, witness-checked).
#[derive(Clone, Debug)]
pub struct GoodnessCertificate {
    pub object: FgObject,
    pub base: StandardPresentation,
    pub lifted: Presentation,
    pub aux_sequence: Vec<RingElement>,
    pub result: Ring,
}

/// Certify the coordinate system `x` against a surrogate and a validating
/// presentation of its base ring over the mp-generators.
pub fn certify_goodness(
    x: &FgObject,
    surrogate: &MpSurrogate,
    base: &StandardPresentation,
) -> Result<GoodnessCertificate> {
    let r = x.extra_coords();
    if surrogate.u_blocks.len() != r {
        return Err(Error::Invalid(format!(
            "surrogate has {} u-blocks for an object with r = {r}",
            surrogate.u_blocks.len()
        )));
    }
    if base.witness.target != *x.base() {
        return Err(Error::RingMismatch(
            "the base presentation's target is not the object's base ring".into(),
        ));
    }
    {
        let gen_refs: Vec<&str> = surrogate.mp_gens.iter().map(|s| s.as_str()).collect();
        let expected = RingSpec::polynomial(surrogate.core.clone(), &gen_refs);
        if base.presentation.base().spec() != &expected {
            return Err(Error::RingMismatch(
                "the base presentation must live on the surrogate's mp-generators".into(),
            ));
        }
    }
    let base_result = base.presentation.result_ring()?;
    base.witness.verify(&base_result)?;

    // r = 0: the certificate is the base presentation itself
    if r == 0 {
        return Ok(GoodnessCertificate {
            object: x.clone(),
            base: base.clone(),
            lifted: base.presentation.clone(),
            aux_sequence: Vec::new(),
            result: base_result,
        });
    }

    let n = x.order();
    let table = classify(x)?;
    for (j, block) in surrogate.u_blocks.iter().enumerate() {
        if block.len() > n {
            return Err(Error::Invalid(format!(
                "u-block {j} has {} generators but only {n} coefficients exist at this order",
                block.len()
            )));
        }
    }

    // images of the u-generators: coefficients of f_0..f_{r-1}; the first
    // slot of each block is inverted, so its image must be a unit
    let mut u_images: Vec<Vec<RingElement>> = Vec::with_capacity(r);
    for (j, block) in surrogate.u_blocks.iter().enumerate() {
        let coeffs = &table.iso_coeffs[j];
        let images: Vec<RingElement> = coeffs[..block.len()].to_vec();
        match images[0].is_unit() {
            UnitStatus::Unit => {}
            UnitStatus::NonUnit => {
                return Err(Error::NotInvertible(format!(
                    "the image {} of inverted generator `{}` (block {j}) is not a unit",
                    images[0].format(),
                    block[0]
                )))
            }
            UnitStatus::Unknown => {
                return Err(Error::Undecidable(format!(
                    "unit status of the image of inverted generator `{}` (block {j}) is unknown",
                    block[0]
                )))
            }
        }
        u_images.push(images);
    }

    let big = surrogate.full_ring()?;
    let m = surrogate.mp_gens.len();
    let big_nvars = big.vars().len();
    let prefix_map: Vec<usize> = (0..m).collect();

    // base presentation data re-embedded into the full surrogate ring
    let (_, base_inv, base_seq, base_pre) = base.presentation.flat_parts()?;
    debug_assert!(base_pre.is_empty());
    let mut inner_inverted: Vec<RingElement> = base_inv
        .iter()
        .map(|p| big.element_from_poly(p.reindex(&prefix_map, big_nvars)))
        .collect::<Result<Vec<_>>>()?;
    let inner_sequence: Vec<RingElement> = base_seq
        .iter()
        .map(|p| big.element_from_poly(p.reindex(&prefix_map, big_nvars)))
        .collect::<Result<Vec<_>>>()?;

    // lift every u-image to a polynomial over the mp-generators, collecting
    // any new denominator witnesses
    let mut lifted_images: Vec<Vec<Poly>> = Vec::with_capacity(r);
    let mut new_primes: BTreeSet<u64> = BTreeSet::new();
    for images in &u_images {
        let mut block = Vec::with_capacity(images.len());
        for a in images {
            let (p, primes) = base.witness.lift(a, m)?;
            new_primes.extend(primes);
            block.push(p.reindex(&prefix_map, big_nvars));
        }
        lifted_images.push(block);
    }
    let declared: BTreeSet<String> = inner_inverted.iter().map(|e| e.format()).collect();
    for &p in &new_primes {
        let c = big.from_int(p as i64);
        if !declared.contains(&c.format()) {
            inner_inverted.push(c);
        }
    }
    for block in &surrogate.u_blocks {
        inner_inverted.push(big.var(&block[0])?);
    }

    let inner = Presentation::new(big.clone(), inner_inverted, inner_sequence)?;
    let inner_result = inner.result_ring()?;

    // the appended sequence v = u - a, block by block, as a presentation
    // over the inner result
    let mut outer_sequence = Vec::new();
    let mut aux_sequence = Vec::new();
    for (j, block) in surrogate.u_blocks.iter().enumerate() {
        for (k, name) in block.iter().enumerate() {
            let u_idx = big.var_index(name).expect("surrogate variable");
            let u_poly = Poly::variable(&scalar::ScalarRing::Rationals, u_idx, big_nvars);
            let v = u_poly.sub(&scalar::ScalarRing::Rationals, &lifted_images[j][k]);
            outer_sequence.push(inner_result.element_from_poly(v.clone())?);
            aux_sequence.push(big.element_from_poly(v)?);
        }
    }
    let outer = Presentation::new(inner_result, Vec::new(), outer_sequence)?;

    // "a quotient of a quotient": flatten by composition; this validates the
    // whole chain
    let lifted = compose(&outer, &inner)?;
    let result = lifted.result_ring()?;

    // final witness: generators of the full surrogate map forward to their
    // classifying images, and the composites fix all generators
    let forward: Vec<RingElement> = base
        .witness
        .forward_images
        .iter()
        .cloned()
        .chain(u_images.iter().flatten().cloned())
        .collect();
    let back_images = base
        .witness
        .back_images
        .iter()
        .map(|(name, p)| (name.clone(), p.reindex(&prefix_map, big_nvars)))
        .collect();
    let big_witness = IsoWitness {
        target: x.base().clone(),
        forward_images: forward,
        back_images,
    };
    big_witness.verify(&result)?;

    Ok(GoodnessCertificate {
        object: x.clone(),
        base: base.clone(),
        lifted,
        aux_sequence,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FgObject;
    use crate::fgl::{construct, CoordinateChange, LawKind};
    use crate::lrq::standard_presentation;
    use crate::series::Series1;

    fn f3() -> Ring {
        Ring::new(RingSpec::prime_field(3)).unwrap()
    }

    fn coord(ring: &Ring, order: usize, coeffs: &[i64]) -> CoordinateChange {
        let elems: Vec<_> = coeffs.iter().map(|&c| ring.from_int(c)).collect();
        CoordinateChange::new(Series1::from_elements(ring, order, &elems).unwrap()).unwrap()
    }

    fn gen_names(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn base_for(x: &FgObject, m: usize) -> StandardPresentation {
        // images: the first nonlinear law coefficients, padded with 1s
        let table = classify(x).unwrap();
        let mut images: Vec<RingElement> = table
            .law_coeffs
            .iter()
            .map(|(_, c)| c.clone())
            .take(m)
            .collect();
        while images.len() < m {
            images.push(x.base().one());
        }
        standard_presentation(x.base(), &gen_names("b", m), &images, 8).unwrap()
    }

    #[test]
    fn r_zero_certificate_is_the_base() {
        let ring = f3();
        let law = construct(LawKind::Multiplicative, &ring, 4).unwrap();
        let x = FgObject::new(law, vec![]).unwrap();
        let base = base_for(&x, 3);
        let surrogate = MpSurrogate::new(
            RingSpec::localized(&[2]),
            gen_names("b", 3),
            vec![],
        )
        .unwrap();
        let cert = certify_goodness(&x, &surrogate, &base).unwrap();
        assert_eq!(&cert.lifted, &base.presentation);
        assert!(cert.aux_sequence.is_empty());
    }

    #[test]
    fn multiplicative_over_f3_with_quadratic_coordinate() {
        // h_1 = t + t^2 at order 4: f_0 = reverse = t - t^2 + 2t^3 - 5t^4,
        // so the u-images mod 3 are 1, 1(-1), 2, 1(-5)
        let ring = f3();
        let law = construct(LawKind::Multiplicative, &ring, 4).unwrap();
        let h1 = coord(&ring, 4, &[0, 1, 1, 0, 0]);
        let x = FgObject::new(law, vec![h1]).unwrap();
        let base = base_for(&x, 3);
        let surrogate = MpSurrogate::new(
            RingSpec::localized(&[2]),
            gen_names("b", 3),
            vec![gen_names("u", 4)],
        )
        .unwrap();
        let cert = certify_goodness(&x, &surrogate, &base).unwrap();
        assert_eq!(cert.aux_sequence.len(), 4);
        assert_eq!(cert.aux_sequence[0].format(), "u1 - 1");
        assert_eq!(cert.aux_sequence[1].format(), "u2 - 2");
        assert_eq!(cert.aux_sequence[2].format(), "u3 - 2");
        assert_eq!(cert.aux_sequence[3].format(), "u4 - 1");
        // the result ring normalises each u to its image
        assert_eq!(cert.result.var("u1").unwrap(), cert.result.one());
        assert_eq!(cert.result.var("u2").unwrap(), cert.result.from_int(2));
        // and the certified presentation validates
        assert!(cert.lifted.validate().is_accept());
    }

    #[test]
    fn two_blocks_over_localised_integers() {
        // O_S = Z[1/6], r = 2 with h_1 = t + t^2, h_2 = 2t at order 4
        let ring = Ring::new(RingSpec::localized(&[2, 3])).unwrap();
        let law = construct(LawKind::Multiplicative, &ring, 4).unwrap();
        let h1 = coord(&ring, 4, &[0, 1, 1, 0, 0]);
        let h2 = coord(&ring, 4, &[0, 2, 0, 0, 0]);
        let x = FgObject::new(law, vec![h1, h2]).unwrap();
        let base = base_for(&x, 2);
        let surrogate = MpSurrogate::new(
            RingSpec::localized(&[2]),
            gen_names("b", 2),
            vec![gen_names("u", 4), gen_names("v", 4)],
        )
        .unwrap();
        let cert = certify_goodness(&x, &surrogate, &base).unwrap();
        assert_eq!(cert.aux_sequence.len(), 8);
        assert!(cert.lifted.validate().is_accept());
        // the inverted list contains both first-slot u-generators
        let inv: Vec<String> = cert.lifted.inverted().iter().map(|e| e.format()).collect();
        assert!(inv.contains(&"u1".to_string()));
        assert!(inv.contains(&"v1".to_string()));
    }

    #[test]
    fn block_longer_than_order_is_rejected() {
        let ring = f3();
        let law = construct(LawKind::Multiplicative, &ring, 4).unwrap();
        let h1 = coord(&ring, 4, &[0, 1, 1, 0, 0]);
        let x = FgObject::new(law, vec![h1]).unwrap();
        let base = base_for(&x, 2);
        let surrogate = MpSurrogate::new(
            RingSpec::localized(&[2]),
            gen_names("b", 2),
            vec![gen_names("u", 9)],
        )
        .unwrap();
        assert!(certify_goodness(&x, &surrogate, &base).is_err());
    }
}
