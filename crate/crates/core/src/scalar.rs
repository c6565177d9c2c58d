//! Exact coefficient arithmetic: arbitrary-precision rationals and odd-prime residues.
//!
//! Every ring in this crate is a Z[1/2]-algebra, so the scalar (coefficient)
//! rings are the rationals, a localisation of the integers at a finite prime
//! set containing 2, or an odd prime field. No floating point anywhere.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficient ring of a polynomial or quotient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarRing {
    /// The field of rational numbers.
    Rationals,
    /// Z localised at a finite set of primes, which must contain 2.
    LocalizedIntegers { inverted: BTreeSet<u64> },
    /// The field F_p for an odd prime p.
    PrimeField { p: u64 },
}

impl ScalarRing {
    /// Characteristic: 0 for the first two variants, p for prime fields.
    pub fn characteristic(&self) -> u64 {
        match self {
            ScalarRing::PrimeField { p } => *p,
            _ => 0,
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, ScalarRing::Rationals | ScalarRing::PrimeField { .. })
    }
}

impl fmt::Display for ScalarRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarRing::Rationals => write!(f, "Q"),
            ScalarRing::LocalizedIntegers { inverted } => {
                let ps: Vec<String> = inverted.iter().map(|p| p.to_string()).collect();
                write!(f, "Z[1/{{{}}}]", ps.join(","))
            }
            ScalarRing::PrimeField { p } => write!(f, "F_{}", p),
        }
    }
}

/// A normal-form scalar: a reduced fraction in characteristic 0, or a residue
/// in `0..p` over a prime field. Which variant is legal is determined by the
/// ambient [`ScalarRing`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod(u64),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod(m) => *m == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Mod(m) => *m == 1,
        }
    }

    pub fn from_int(ring: &ScalarRing, n: i64) -> Scalar {
        match ring {
            ScalarRing::PrimeField { p } => {
                let p = *p as i128;
                Scalar::Mod(((n as i128).rem_euclid(p)) as u64)
            }
            _ => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn from_rational(ring: &ScalarRing, r: BigRational) -> Option<Scalar> {
        match ring {
            ScalarRing::Rationals => Some(Scalar::Rat(r)),
            ScalarRing::LocalizedIntegers { inverted } => {
                if denominator_supported(r.denom(), inverted) {
                    Some(Scalar::Rat(r))
                } else {
                    None
                }
            }
            ScalarRing::PrimeField { p } => {
                let p_big = BigInt::from(*p);
                let den = r.denom().mod_floor(&p_big);
                if den.is_zero() {
                    return None;
                }
                let den_u = den.to_u64()?;
                let num = r.numer().mod_floor(&p_big).to_u64()?;
                let inv = mod_inverse(den_u, *p)?;
                Some(Scalar::Mod(mul_mod(num % *p, inv, *p)))
            }
        }
    }
}

pub fn zero(ring: &ScalarRing) -> Scalar {
    Scalar::from_int(ring, 0)
}

pub fn one(ring: &ScalarRing) -> Scalar {
    Scalar::from_int(ring, 1)
}

pub fn add(ring: &ScalarRing, a: &Scalar, b: &Scalar) -> Scalar {
    match (ring, a, b) {
        (ScalarRing::PrimeField { p }, Scalar::Mod(x), Scalar::Mod(y)) => {
            Scalar::Mod((x + y) % p)
        }
        (_, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
        _ => panic!("scalar does not belong to ring {ring}"),
    }
}

pub fn sub(ring: &ScalarRing, a: &Scalar, b: &Scalar) -> Scalar {
    add(ring, a, &neg(ring, b))
}

pub fn neg(ring: &ScalarRing, a: &Scalar) -> Scalar {
    match (ring, a) {
        (ScalarRing::PrimeField { p }, Scalar::Mod(x)) => Scalar::Mod((p - x) % p),
        (_, Scalar::Rat(x)) => Scalar::Rat(-x),
        _ => panic!("scalar does not belong to ring {ring}"),
    }
}

pub fn mul(ring: &ScalarRing, a: &Scalar, b: &Scalar) -> Scalar {
    match (ring, a, b) {
        (ScalarRing::PrimeField { p }, Scalar::Mod(x), Scalar::Mod(y)) => {
            Scalar::Mod(mul_mod(*x, *y, *p))
        }
        (_, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
        _ => panic!("scalar does not belong to ring {ring}"),
    }
}

/// Multiplicative inverse, when the scalar is a unit of the ring.
pub fn invert(ring: &ScalarRing, a: &Scalar) -> Option<Scalar> {
    match (ring, a) {
        (ScalarRing::Rationals, Scalar::Rat(x)) => {
            if x.is_zero() {
                None
            } else {
                Some(Scalar::Rat(x.recip()))
            }
        }
        (ScalarRing::LocalizedIntegers { inverted }, Scalar::Rat(x)) => {
            if x.is_zero() || !denominator_supported(x.numer(), inverted) {
                None
            } else {
                Some(Scalar::Rat(x.recip()))
            }
        }
        (ScalarRing::PrimeField { p }, Scalar::Mod(x)) => mod_inverse(*x, *p).map(Scalar::Mod),
        _ => panic!("scalar does not belong to ring {ring}"),
    }
}

pub fn is_unit(ring: &ScalarRing, a: &Scalar) -> bool {
    invert(ring, a).is_some()
}

pub fn pow(ring: &ScalarRing, a: &Scalar, e: u32) -> Scalar {
    let mut acc = one(ring);
    for _ in 0..e {
        acc = mul(ring, &acc, a);
    }
    acc
}

/// Display form: decimal integers, or "p/q" in lowest terms.
pub fn format(a: &Scalar) -> String {
    match a {
        Scalar::Rat(r) => {
            if r.denom().is_one() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        Scalar::Mod(m) => m.to_string(),
    }
}

/// True iff every prime factor of `n` lies in `primes` (signs ignored; 1 is supported).
pub fn denominator_supported(n: &BigInt, primes: &BTreeSet<u64>) -> bool {
    strip_primes(n, primes).magnitude().is_one()
}

/// Divide out all factors of the given primes from `n`.
pub fn strip_primes(n: &BigInt, primes: &BTreeSet<u64>) -> BigInt {
    let mut m = n.abs();
    if m.is_zero() {
        return m;
    }
    for &p in primes {
        let pb = BigInt::from(p);
        loop {
            let (q, r) = m.div_rem(&pb);
            if r.is_zero() {
                m = q;
            } else {
                break;
            }
        }
    }
    m
}

/// Trial-division primality test; the primes in this crate are desk-scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorisation by trial division. Returns None past the effort cap.
pub fn factor(n: u64) -> Option<Vec<(u64, u32)>> {
    if n == 0 {
        return None;
    }
    let mut n = n;
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if d > 1_000_000 {
            return None;
        }
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    Some(out)
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    // extended Euclid
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(p as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ScalarRing {
        ScalarRing::Rationals
    }

    fn zloc(ps: &[u64]) -> ScalarRing {
        ScalarRing::LocalizedIntegers {
            inverted: ps.iter().copied().collect(),
        }
    }

    #[test]
    fn residue_reduction() {
        // 7 -> 1 in F_3
        let f3 = ScalarRing::PrimeField { p: 3 };
        assert_eq!(Scalar::from_int(&f3, 7), Scalar::Mod(1));
        assert_eq!(Scalar::from_int(&f3, -1), Scalar::Mod(2));
    }

    #[test]
    fn localized_units_by_support() {
        // 12 = 2^2 * 3 is a unit of Z[1/6]
        let r = zloc(&[2, 3]);
        assert!(is_unit(&r, &Scalar::from_int(&r, 12)));
        assert!(!is_unit(&r, &Scalar::from_int(&r, 5)));
        assert!(!is_unit(&r, &Scalar::from_int(&r, 0)));
    }

    #[test]
    fn rational_membership_in_localisation() {
        let r = zloc(&[2, 3]);
        let half = BigRational::new(BigInt::from(1), BigInt::from(18));
        assert!(Scalar::from_rational(&r, half).is_some());
        let fifth = BigRational::new(BigInt::from(1), BigInt::from(5));
        assert!(Scalar::from_rational(&r, fifth).is_none());
    }

    #[test]
    fn prime_field_inverse() {
        let f7 = ScalarRing::PrimeField { p: 7 };
        let three = Scalar::from_int(&f7, 3);
        let inv = invert(&f7, &three).unwrap();
        assert_eq!(mul(&f7, &three, &inv), one(&f7));
    }

    #[test]
    fn field_embedding_of_fractions() {
        // 1/2 = 2 in F_3
        let f3 = ScalarRing::PrimeField { p: 3 };
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(Scalar::from_rational(&f3, half), Some(Scalar::Mod(2)));
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(Scalar::from_rational(&f3, third), None);
    }

    #[test]
    fn ring_axioms_on_rationals_sample() {
        let r = q();
        let xs: Vec<Scalar> = (-4..5).map(|n| Scalar::from_int(&r, n)).collect();
        for a in &xs {
            for b in &xs {
                assert_eq!(add(&r, a, b), add(&r, b, a));
                assert_eq!(mul(&r, a, b), mul(&r, b, a));
                for c in &xs {
                    let left = mul(&r, a, &add(&r, b, c));
                    let right = add(&r, &mul(&r, a, b), &mul(&r, a, c));
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn trial_division_factor() {
        assert_eq!(factor(12), Some(vec![(2, 2), (3, 1)]));
        assert_eq!(factor(97), Some(vec![(97, 1)]));
        assert!(is_prime(2) && is_prime(97) && !is_prime(91));
    }
}
