//! Seeded random generation of elements, series, laws, objects, and
//! presentations. Everything is driven by a ChaCha stream, so a fixed seed
//! reproduces the same sample on every platform.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::category::FgObject;
use crate::fgl::{construct, CoordinateChange, FormalGroupLaw, LawKind};
use crate::lrq::Presentation;
use crate::poly::Poly;
use crate::ring::{Ring, RingElement, RingSpec, UnitStatus};
use crate::scalar::{Scalar, ScalarRing};
use crate::series::Series1;

pub struct Sampler {
    rng: ChaCha8Rng,
}

/// The coefficient rings the property suites run over.
pub fn ring_suite() -> Vec<Ring> {
    vec![
        Ring::new(RingSpec::rationals()).unwrap(),
        Ring::new(RingSpec::prime_field(3)).unwrap(),
        Ring::new(RingSpec::prime_field(5)).unwrap(),
        Ring::new(RingSpec::prime_field(7)).unwrap(),
        Ring::new(RingSpec::localized(&[2, 3])).unwrap(),
    ]
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn gen_range(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..hi)
    }

    /// A small element of the ring (coefficient-sized, not necessarily a unit).
    pub fn element(&mut self, ring: &Ring) -> RingElement {
        match ring.scalar_ring() {
            ScalarRing::Rationals => {
                let n = self.rng.gen_range(-9i64..10);
                let d = self.rng.gen_range(1i64..5);
                ring.from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)))
                    .unwrap()
            }
            ScalarRing::LocalizedIntegers { inverted } => {
                let n = self.rng.gen_range(-9i64..10);
                let primes: Vec<u64> = inverted.iter().copied().collect();
                let mut d = 1i64;
                for _ in 0..self.rng.gen_range(0usize..3) {
                    d *= primes[self.rng.gen_range(0..primes.len())] as i64;
                }
                ring.from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)))
                    .unwrap()
            }
            ScalarRing::PrimeField { p } => ring.from_int(self.rng.gen_range(0..*p) as i64),
        }
    }

    /// A decidable unit of the ring.
    pub fn unit(&mut self, ring: &Ring) -> RingElement {
        for _ in 0..64 {
            let candidate = match ring.scalar_ring() {
                ScalarRing::Rationals => {
                    let n = self.rng.gen_range(1i64..9) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
                    let d = self.rng.gen_range(1i64..4);
                    ring.from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)))
                        .unwrap()
                }
                ScalarRing::LocalizedIntegers { .. } => {
                    let a = self.rng.gen_range(0u32..3);
                    let b = self.rng.gen_range(0u32..3);
                    let sign = if self.rng.gen_bool(0.5) { 1 } else { -1 };
                    let n = sign * 2i64.pow(a) * 3i64.pow(b);
                    // denominators are units too; keep it integral for clarity
                    ring.from_int(n)
                }
                ScalarRing::PrimeField { p } => ring.from_int(self.rng.gen_range(1..*p) as i64),
            };
            if candidate.is_unit() == UnitStatus::Unit {
                return candidate;
            }
        }
        ring.one()
    }

    /// A quotient-ring element sampled over the monomial basis; falls back to
    /// scalar constants when the ring is not module-finite.
    pub fn quotient_element(&mut self, ring: &Ring) -> RingElement {
        match ring.monomial_basis() {
            Some(basis) => {
                let sr = ring.scalar_ring().clone();
                let mut p = Poly::zero();
                for m in &basis {
                    let c = match &sr {
                        ScalarRing::PrimeField { p: pr } => {
                            Scalar::from_int(&sr, self.rng.gen_range(0..*pr) as i64)
                        }
                        _ => Scalar::from_int(&sr, self.rng.gen_range(-4i64..5)),
                    };
                    p.add_term(&sr, m.clone(), &c);
                }
                ring.element_from_poly(p).unwrap_or_else(|_| ring.zero())
            }
            None => self.element(ring),
        }
    }

    /// A reversible series: zero constant term, unit linear coefficient.
    pub fn reversible_series(&mut self, ring: &Ring, order: usize) -> Series1 {
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(ring.zero());
        coeffs.push(self.unit(ring));
        for _ in 2..=order {
            // bias towards sparse higher coefficients
            if self.rng.gen_bool(0.5) {
                coeffs.push(ring.zero());
            } else {
                coeffs.push(self.element(ring));
            }
        }
        Series1::from_elements(ring, order, &coeffs).expect("well-formed series")
    }

    pub fn coordinate_change(&mut self, ring: &Ring, order: usize) -> CoordinateChange {
        CoordinateChange::new(self.reversible_series(ring, order)).expect("unit linear coefficient")
    }

    /// A strict coordinate change (linear coefficient 1), handy when the
    /// sample must stay within strict isomorphisms.
    pub fn strict_coordinate_change(&mut self, ring: &Ring, order: usize) -> CoordinateChange {
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(ring.zero());
        coeffs.push(ring.one());
        for _ in 2..=order {
            if self.rng.gen_bool(0.5) {
                coeffs.push(ring.zero());
            } else {
                coeffs.push(self.element(ring));
            }
        }
        CoordinateChange::new(Series1::from_elements(ring, order, &coeffs).unwrap()).unwrap()
    }

    /// A valid law: one of the built-in families transported along a random
    /// coordinate change.
    pub fn law(&mut self, ring: &Ring, order: usize) -> FormalGroupLaw {
        let base = match self.rng.gen_range(0u8..3) {
            0 => construct(LawKind::Additive, ring, order),
            1 => construct(LawKind::Multiplicative, ring, order),
            _ => construct(LawKind::Lorentz, ring, order),
        }
        .expect("built-in laws are valid");
        let g = self.coordinate_change(ring, order);
        base.transform(&g).expect("transforms of valid laws are valid")
    }

    /// An object with r extra coordinates.
    pub fn fg_object(&mut self, ring: &Ring, order: usize, r: usize) -> FgObject {
        let law = self.law(ring, order);
        let coords = (0..r).map(|_| self.coordinate_change(ring, order)).collect();
        FgObject::new(law, coords).expect("sampled coordinates share ring and order")
    }

    /// A triangular presentation over Z[1/2][v1..vn]: each sequence element
    /// is unit-monic in a fresh variable with a tail in the earlier ones;
    /// optionally some variables are localised.
    pub fn triangular_presentation(&mut self, nvars: usize, quotients: usize) -> Presentation {
        assert!(quotients <= nvars && nvars >= 1);
        let names: Vec<String> = (1..=nvars).map(|i| format!("v{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let base = Ring::new(RingSpec::polynomial(RingSpec::localized(&[2]), &refs)).unwrap();

        // invert a (possibly empty) suffix of the non-quotiented variables
        let mut inverted = Vec::new();
        for name in names.iter().skip(quotients) {
            if self.rng.gen_bool(0.3) {
                inverted.push(base.var(name).unwrap());
            }
        }

        let mut sequence = Vec::new();
        for k in 0..quotients {
            let var = base.var(&names[k]).unwrap();
            let degree = self.rng.gen_range(1u32..3);
            let mut elem = var.pow(degree);
            // tail built from earlier variables only
            for j in 0..k {
                if self.rng.gen_bool(0.5) {
                    let c = self.element(&base);
                    let earlier = base.var(&names[j]).unwrap();
                    elem = elem.add(&c.mul(&earlier));
                }
            }
            elem = elem.add(&base.from_int(self.gen_range(-4, 5)));
            sequence.push(elem);
        }
        Presentation::new(base, inverted, sequence).expect("sampled elements lie in the base")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let ring = Ring::new(RingSpec::rationals()).unwrap();
        let a: Vec<_> = {
            let mut s = Sampler::new(7);
            (0..5).map(|_| s.element(&ring)).collect()
        };
        let b: Vec<_> = {
            let mut s = Sampler::new(7);
            (0..5).map(|_| s.element(&ring)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn sampled_laws_validate() {
        let mut s = Sampler::new(11);
        for ring in ring_suite() {
            for _ in 0..3 {
                let law = s.law(&ring, 6);
                assert!(crate::fgl::validate(law.series().clone()).is_ok());
            }
        }
    }

    #[test]
    fn sampled_presentations_validate() {
        let mut s = Sampler::new(13);
        for _ in 0..10 {
            let p = s.triangular_presentation(4, 2);
            assert!(p.validate().is_accept(), "{}", p.validate().describe());
        }
    }
}
