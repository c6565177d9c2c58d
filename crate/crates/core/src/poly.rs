//! Sparse multivariate polynomials with exact scalar coefficients.
//!
//! Exponents are signed: negative exponents are Laurent terms and are only
//! legal for variables that the ambient ring has inverted. Keys are exponent
//! vectors of a fixed length (the ring's variable count), kept in a BTreeMap
//! so every traversal is deterministic.

use std::collections::BTreeMap;

use crate::scalar::{self, Scalar, ScalarRing};

pub type Exps = Vec<i32>;

/// A polynomial in normal form *as a polynomial*: no zero coefficients.
/// Reduction modulo relations is the ring's job, not this type's.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    pub terms: BTreeMap<Exps, Scalar>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &ScalarRing, c: Scalar, nvars: usize) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            let _ = ring;
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(ring: &ScalarRing, nvars: usize) -> Poly {
        Poly::constant(ring, scalar::one(ring), nvars)
    }

    pub fn variable(ring: &ScalarRing, index: usize, nvars: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Poly::monomial(ring, e, scalar::one(ring))
    }

    pub fn monomial(_ring: &ScalarRing, exps: Exps, c: Scalar) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant coefficient, if the polynomial is a constant (or zero).
    pub fn as_constant(&self, ring: &ScalarRing) -> Option<Scalar> {
        if self.terms.is_empty() {
            return Some(scalar::zero(ring));
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            if e.iter().all(|&x| x == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn add_term(&mut self, ring: &ScalarRing, exps: Exps, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                let sum = scalar::add(ring, existing, c);
                if sum.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(exps, c.clone());
            }
        }
    }

    pub fn add(&self, ring: &ScalarRing, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(ring, e.clone(), c);
        }
        out
    }

    pub fn neg(&self, ring: &ScalarRing) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), scalar::neg(ring, c));
        }
        out
    }

    pub fn sub(&self, ring: &ScalarRing, other: &Poly) -> Poly {
        self.add(ring, &other.neg(ring))
    }

    pub fn scalar_mul(&self, ring: &ScalarRing, s: &Scalar) -> Poly {
        let mut out = Poly::zero();
        if s.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            let p = scalar::mul(ring, s, c);
            if !p.is_zero() {
                out.terms.insert(e.clone(), p);
            }
        }
        out
    }

    pub fn mul(&self, ring: &ScalarRing, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exps = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                out.add_term(ring, e, &scalar::mul(ring, ca, cb));
            }
        }
        out
    }

    pub fn mul_monomial(&self, ring: &ScalarRing, exps: &[i32], c: &Scalar) -> Poly {
        let mut out = Poly::zero();
        if c.is_zero() {
            return out;
        }
        for (e, coeff) in &self.terms {
            let ne: Exps = e.iter().zip(exps.iter()).map(|(x, y)| x + y).collect();
            let nc = scalar::mul(ring, coeff, c);
            if !nc.is_zero() {
                out.terms.insert(ne, nc);
            }
        }
        out
    }

    pub fn pow(&self, ring: &ScalarRing, e: u32) -> Poly {
        let nvars = self.terms.keys().next().map_or(0, |k| k.len());
        let mut acc = Poly::one(ring, nvars);
        for _ in 0..e {
            acc = acc.mul(ring, self);
        }
        acc
    }

    /// Degree in one variable (maximum exponent; zero polynomial gives 0).
    pub fn degree_in(&self, var: usize) -> i32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Minimum exponent of one variable across all terms (0 for the zero polynomial).
    pub fn min_exp_in(&self, var: usize) -> i32 {
        self.terms.keys().map(|e| e[var]).min().unwrap_or(0)
    }

    /// Coefficient of `var^k`, as a polynomial in the remaining variables
    /// (the `var` slot of each key is zeroed).
    pub fn coefficient_of(&self, var: usize, k: i32) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            if e[var] == k {
                let mut ne = e.clone();
                ne[var] = 0;
                out.terms.insert(ne, c.clone());
            }
        }
        out
    }

    /// Largest variable index that occurs with a nonzero exponent.
    pub fn highest_variable(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for e in self.terms.keys() {
            for (i, &x) in e.iter().enumerate().rev() {
                if x != 0 {
                    best = Some(best.map_or(i, |b| b.max(i)));
                    break;
                }
            }
        }
        best
    }

    pub fn variables_used(&self) -> Vec<usize> {
        let mut used: Vec<bool> = Vec::new();
        for e in self.terms.keys() {
            if used.len() < e.len() {
                used.resize(e.len(), false);
            }
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    used[i] = true;
                }
            }
        }
        used.iter()
            .enumerate()
            .filter_map(|(i, &u)| u.then_some(i))
            .collect()
    }

    /// Re-index variables into a larger ring: `map[i]` is the new index of old variable `i`.
    pub fn reindex(&self, map: &[usize], new_nvars: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let mut ne = vec![0; new_nvars];
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    ne[map[i]] = x;
                }
            }
            out.terms.insert(ne, c.clone());
        }
        out
    }

    /// Map all coefficients through `f`, dropping terms sent to zero.
    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let nc = f(c);
            if !nc.is_zero() {
                out.terms.insert(e.clone(), nc);
            }
        }
        out
    }

    /// Deterministic display with variable names; terms ordered by the
    /// latest variable first, so leading terms print before their tails.
    pub fn format(&self, vars: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut ordered: Vec<(&Exps, &Scalar)> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| {
            let ra = a.iter().rev();
            let rb = b.iter().rev();
            rb.cmp(ra)
        });
        let mut parts = Vec::new();
        for (e, c) in ordered {
            let mut factors = Vec::new();
            let cs = scalar::format(c);
            for (i, &x) in e.iter().enumerate() {
                if x == 1 {
                    factors.push(vars[i].clone());
                } else if x != 0 {
                    factors.push(format!("{}^{}", vars[i], x));
                }
            }
            if factors.is_empty() {
                parts.push(cs);
            } else if cs == "1" {
                parts.push(factors.join("*"));
            } else if cs == "-1" {
                parts.push(format!("-{}", factors.join("*")));
            } else {
                parts.push(format!("{}*{}", cs, factors.join("*")));
            }
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ScalarRing {
        ScalarRing::Rationals
    }

    fn int(n: i64) -> Scalar {
        Scalar::from_int(&ScalarRing::Rationals, n)
    }

    #[test]
    fn add_cancels_to_zero() {
        let r = q();
        let x = Poly::variable(&r, 0, 2);
        let diff = x.sub(&r, &x);
        assert!(diff.is_zero());
    }

    #[test]
    fn product_of_binomials() {
        // (1+x)(1-x) = 1 - x^2
        let r = q();
        let one = Poly::one(&r, 1);
        let x = Poly::variable(&r, 0, 1);
        let a = one.add(&r, &x);
        let b = one.sub(&r, &x);
        let prod = a.mul(&r, &b);
        let expected = one.sub(&r, &x.mul(&r, &x));
        assert_eq!(prod, expected);
    }

    #[test]
    fn freshmans_dream_mod_three() {
        // (1+x)^3 = 1 + x^3 over F_3
        let f3 = ScalarRing::PrimeField { p: 3 };
        let one = Poly::one(&f3, 1);
        let x = Poly::variable(&f3, 0, 1);
        let cube = one.add(&f3, &x).pow(&f3, 3);
        let expected = one.add(&f3, &x.pow(&f3, 3));
        assert_eq!(cube, expected);
    }

    #[test]
    fn laurent_monomial_product() {
        let r = q();
        let m1 = Poly::monomial(&r, vec![-1, 2], int(3));
        let m2 = Poly::monomial(&r, vec![2, -2], int(2));
        let prod = m1.mul(&r, &m2);
        assert_eq!(prod, Poly::monomial(&r, vec![1, 0], int(6)));
    }

    #[test]
    fn coefficient_extraction() {
        let r = q();
        // x^2*y + 2x + 1, coefficient of x^1 is 2
        let mut p = Poly::zero();
        p.add_term(&r, vec![2, 1], &int(1));
        p.add_term(&r, vec![1, 0], &int(2));
        p.add_term(&r, vec![0, 0], &int(1));
        assert_eq!(p.degree_in(0), 2);
        assert_eq!(p.coefficient_of(0, 1), Poly::constant(&r, int(2), 2));
        assert_eq!(p.highest_variable(), Some(1));
    }

    #[test]
    fn format_is_readable() {
        let r = q();
        let vars = vec!["x".to_string(), "y".to_string()];
        let mut p = Poly::zero();
        p.add_term(&r, vec![2, 0], &int(1));
        p.add_term(&r, vec![0, 1], &int(-3));
        // later variables lead the display
        assert_eq!(p.format(&vars), "-3*y + x^2");
    }
}
