//! Coefficient rings with computable normal forms.
//!
//! The supported rings are exactly the ones the constructions need: Q,
//! localised integers Z[1/S] with 2 in S, odd prime fields, polynomial rings
//! over those scalars, and localised quotients of polynomial rings by
//! *triangular* relation lists. A relation list is triangular when each
//! relation, reduced modulo the earlier ones, is unit-monic in a variable not
//! led by an earlier relation; the leading variable is chosen
//! deterministically as the highest-indexed candidate. The leading monomials
//! are then pairwise coprime pure powers, so reduction terminates and normal
//! forms are unique: two elements are equal iff their normal forms are
//! identical.
//!
//! Localisation is by a finite list of declared elements, each of which must
//! be a monomial: its scalar content folds into the coefficient ring and its
//! variables become Laurent directions. A relation whose normal form is a
//! single odd prime p (over integer-localised coefficients) folds the
//! coefficient ring to F_p.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{Exps, Poly};
use crate::scalar::{self, Scalar, ScalarRing};

/// Cap on the nilpotency-index bound used by the localisation collapse check.
const NILPOTENCE_DIM_CAP: u64 = 4096;
/// Cap on the module dimension for matrix-based unit/zero-divisor decisions.
const MATRIX_DIM_CAP: u64 = 4096;
/// Cap on the element count for exhaustive enumeration of finite rings.
const ENUMERATION_CAP: u64 = 65536;

/// Declarative description of a ring. [`Ring::new`] validates it.
#[derive(Clone, Debug, PartialEq)]
pub enum RingSpec {
    Rationals,
    LocalizedIntegers {
        inverted_primes: BTreeSet<u64>,
    },
    PrimeField {
        p: u64,
    },
    PolynomialRing {
        base: Box<RingSpec>,
        vars: Vec<String>,
    },
    TriangularQuotient {
        base: Box<RingSpec>,
        inverted: Vec<Poly>,
        relations: Vec<Poly>,
    },
}

impl RingSpec {
    pub fn rationals() -> RingSpec {
        RingSpec::Rationals
    }

    pub fn localized(primes: &[u64]) -> RingSpec {
        RingSpec::LocalizedIntegers {
            inverted_primes: primes.iter().copied().collect(),
        }
    }

    pub fn prime_field(p: u64) -> RingSpec {
        RingSpec::PrimeField { p }
    }

    pub fn polynomial(base: RingSpec, vars: &[&str]) -> RingSpec {
        RingSpec::PolynomialRing {
            base: Box::new(base),
            vars: vars.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn quotient(base: RingSpec, inverted: Vec<Poly>, relations: Vec<Poly>) -> RingSpec {
        RingSpec::TriangularQuotient {
            base: Box::new(base),
            inverted,
            relations,
        }
    }
}

/// One established rewrite: `var^degree -> rhs`, with `rhs` in normal form
/// with respect to the earlier rewrites. For an inverted leading variable,
/// `inv_rhs` is the inverse of `rhs`, used to clear negative powers via
/// `var^(e) -> var^(e+degree) * inv_rhs` for `e < 0`.
#[derive(Clone, Debug)]
struct Rewrite {
    var: usize,
    degree: i32,
    rhs: Poly,
    inv_rhs: Option<Poly>,
}

#[derive(Clone, Debug)]
struct QuotientCtx {
    scalar: ScalarRing,
    vars: Vec<String>,
    inverted_vars: BTreeSet<usize>,
    rewrites: Vec<Rewrite>,
    led: BTreeMap<usize, usize>,
    /// Monomial-basis size over the scalar ring, when every variable is led.
    bounded_dim: Option<u64>,
}

#[derive(Clone, Debug)]
enum RingKind {
    Scalar(ScalarRing),
    Poly { scalar: ScalarRing, vars: Vec<String> },
    Quotient(QuotientCtx),
}

struct RingInner {
    spec: RingSpec,
    kind: RingKind,
}

/// A validated ring; cheap to clone, compared by spec.
#[derive(Clone)]
pub struct Ring {
    inner: Arc<RingInner>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.spec == other.inner.spec
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({self})")
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inner.spec {
            RingSpec::Rationals => write!(f, "Q"),
            RingSpec::LocalizedIntegers { inverted_primes } => {
                let ps: Vec<String> = inverted_primes.iter().map(|p| p.to_string()).collect();
                write!(f, "Z[1/{{{}}}]", ps.join(","))
            }
            RingSpec::PrimeField { p } => write!(f, "F_{p}"),
            RingSpec::PolynomialRing { base, vars } => {
                let b = Ring::new((**base).clone()).map_err(|_| fmt::Error)?;
                write!(f, "{}[{}]", b, vars.join(","))
            }
            RingSpec::TriangularQuotient { .. } => {
                let vars = self.vars();
                match &self.inner.kind {
                    RingKind::Quotient(q) => {
                        let rels: Vec<String> = q
                            .rewrites
                            .iter()
                            .map(|rw| {
                                let mut lead = vec![0; q.vars.len()];
                                lead[rw.var] = rw.degree;
                                Poly::monomial(&q.scalar, lead, scalar::one(&q.scalar))
                                    .sub(&q.scalar, &rw.rhs)
                                    .format(vars)
                            })
                            .collect();
                        let inv: Vec<String> =
                            q.inverted_vars.iter().map(|&i| q.vars[i].clone()).collect();
                        write!(f, "{}[{}]", q.scalar, q.vars.join(","))?;
                        if !inv.is_empty() {
                            write!(f, "[1/{{{}}}]", inv.join(","))?;
                        }
                        if !rels.is_empty() {
                            write!(f, "/({})", rels.join(", "))?;
                        }
                        Ok(())
                    }
                    _ => unreachable!(),
                }
            }
        }
    }
}

/// Normal-form value of a ring element: a bare scalar over scalar rings, a
/// reduced polynomial otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    S(Scalar),
    P(Poly),
}

impl Value {
    pub fn is_zero(&self) -> bool {
        match self {
            Value::S(s) => s.is_zero(),
            Value::P(p) => p.is_zero(),
        }
    }
}

/// An element tagged with its ring. Equality requires equal rings and
/// identical normal forms.
#[derive(Clone, Debug, PartialEq)]
pub struct RingElement {
    ring: Ring,
    value: Value,
}

impl RingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::S(s) => s.is_zero(),
            Value::P(p) => p.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        self == &self.ring.one()
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        assert_eq!(self.ring, other.ring, "ring mismatch in add");
        self.ring.elem(self.ring.add_values(&self.value, &other.value))
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        assert_eq!(self.ring, other.ring, "ring mismatch in sub");
        self.ring.elem(self.ring.sub_values(&self.value, &other.value))
    }

    pub fn mul(&self, other: &RingElement) -> RingElement {
        assert_eq!(self.ring, other.ring, "ring mismatch in mul");
        self.ring.elem(self.ring.mul_values(&self.value, &other.value))
    }

    pub fn neg(&self) -> RingElement {
        self.ring.elem(self.ring.neg_value(&self.value))
    }

    pub fn pow(&self, e: u32) -> RingElement {
        let mut acc = self.ring.one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_unit(&self) -> UnitStatus {
        self.ring.unit_status(&self.value)
    }

    pub fn try_invert(&self) -> Result<RingElement> {
        match self.ring.invert_value(&self.value) {
            InvertOutcome::Unit(v) => Ok(self.ring.elem(v)),
            InvertOutcome::NonUnit => Err(Error::NotInvertible(format!(
                "{} is not a unit of {}",
                self.format(),
                self.ring
            ))),
            InvertOutcome::Unknown(why) => Err(Error::Undecidable(why)),
        }
    }

    pub fn format(&self) -> String {
        match &self.value {
            Value::S(s) => scalar::format(s),
            Value::P(p) => p.format(self.ring.vars()),
        }
    }
}

/// Tri-state unit decision. `Unknown` is an explicit outcome, never a guess.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitStatus {
    Unit,
    NonUnit,
    Unknown,
}

enum InvertOutcome {
    Unit(Value),
    NonUnit,
    Unknown(String),
}

/// A single input term: a rational coefficient and named exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTerm {
    pub coeff: BigRational,
    pub exps: BTreeMap<String, i32>,
}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Ring> {
        let kind = match &spec {
            RingSpec::Rationals => RingKind::Scalar(ScalarRing::Rationals),
            RingSpec::LocalizedIntegers { inverted_primes } => {
                if !inverted_primes.contains(&2) {
                    return Err(Error::InvalidRing(
                        "2 must be invertible in every ring".into(),
                    ));
                }
                for &p in inverted_primes {
                    if !scalar::is_prime(p) {
                        return Err(Error::InvalidRing(format!("{p} is not prime")));
                    }
                }
                RingKind::Scalar(ScalarRing::LocalizedIntegers {
                    inverted: inverted_primes.clone(),
                })
            }
            RingSpec::PrimeField { p } => {
                if *p == 2 {
                    return Err(Error::InvalidRing(
                        "F_2 is rejected: 2 must be invertible".into(),
                    ));
                }
                if !scalar::is_prime(*p) || *p >= (1 << 31) {
                    return Err(Error::InvalidRing(format!(
                        "{p} is not an odd prime in the supported range"
                    )));
                }
                RingKind::Scalar(ScalarRing::PrimeField { p: *p })
            }
            RingSpec::PolynomialRing { base, vars } => {
                let base_ring = Ring::new((**base).clone())?;
                let scalar_ring = match &base_ring.inner.kind {
                    RingKind::Scalar(s) => s.clone(),
                    _ => {
                        return Err(Error::InvalidRing(
                            "polynomial rings must have scalar coefficients; \
                             use one flat variable list"
                                .into(),
                        ))
                    }
                };
                let mut seen = BTreeSet::new();
                for v in vars {
                    if v.is_empty() || !seen.insert(v.clone()) {
                        return Err(Error::InvalidRing(format!("bad variable list at `{v}`")));
                    }
                }
                RingKind::Poly {
                    scalar: scalar_ring,
                    vars: vars.clone(),
                }
            }
            RingSpec::TriangularQuotient {
                base,
                inverted,
                relations,
            } => RingKind::Quotient(build_quotient(base, inverted, relations)?),
        };
        Ok(Ring {
            inner: Arc::new(RingInner { spec, kind }),
        })
    }

    pub fn spec(&self) -> &RingSpec {
        &self.inner.spec
    }

    pub fn vars(&self) -> &[String] {
        match &self.inner.kind {
            RingKind::Scalar(_) => &[],
            RingKind::Poly { vars, .. } => vars,
            RingKind::Quotient(q) => &q.vars,
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars().iter().position(|v| v == name)
    }

    /// The effective scalar coefficient ring (after any prime folds).
    pub fn scalar_ring(&self) -> &ScalarRing {
        match &self.inner.kind {
            RingKind::Scalar(s) => s,
            RingKind::Poly { scalar, .. } => scalar,
            RingKind::Quotient(q) => &q.scalar,
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.scalar_ring().characteristic()
    }

    /// Indices of inverted variables (empty unless a localised quotient).
    pub fn inverted_var_indices(&self) -> BTreeSet<usize> {
        match &self.inner.kind {
            RingKind::Quotient(q) => q.inverted_vars.clone(),
            _ => BTreeSet::new(),
        }
    }

    fn elem(&self, value: Value) -> RingElement {
        RingElement {
            ring: self.clone(),
            value,
        }
    }

    /// Wrap an already-normal value produced by this ring's own operations.
    pub(crate) fn elem_unchecked(&self, value: Value) -> RingElement {
        self.elem(value)
    }

    pub(crate) fn v_zero(&self) -> Value {
        match &self.inner.kind {
            RingKind::Scalar(s) => Value::S(scalar::zero(s)),
            _ => Value::P(Poly::zero()),
        }
    }

    pub(crate) fn v_one(&self) -> Value {
        self.one().value
    }

    pub(crate) fn v_add(&self, a: &Value, b: &Value) -> Value {
        self.add_values(a, b)
    }

    pub(crate) fn v_sub(&self, a: &Value, b: &Value) -> Value {
        self.sub_values(a, b)
    }

    pub(crate) fn v_neg(&self, a: &Value) -> Value {
        self.neg_value(a)
    }

    pub(crate) fn v_mul(&self, a: &Value, b: &Value) -> Value {
        self.mul_values(a, b)
    }

    pub fn zero(&self) -> RingElement {
        match &self.inner.kind {
            RingKind::Scalar(s) => self.elem(Value::S(scalar::zero(s))),
            _ => self.elem(Value::P(Poly::zero())),
        }
    }

    pub fn one(&self) -> RingElement {
        match &self.inner.kind {
            RingKind::Scalar(s) => self.elem(Value::S(scalar::one(s))),
            RingKind::Poly { scalar, vars } => {
                self.elem(Value::P(Poly::one(scalar, vars.len())))
            }
            RingKind::Quotient(q) => self.elem(Value::P(Poly::one(&q.scalar, q.vars.len()))),
        }
    }

    pub fn from_int(&self, n: i64) -> RingElement {
        let s = Scalar::from_int(self.scalar_ring(), n);
        match &self.inner.kind {
            RingKind::Scalar(_) => self.elem(Value::S(s)),
            _ => self.elem(Value::P(Poly::constant(
                self.scalar_ring(),
                s,
                self.vars().len(),
            ))),
        }
    }

    pub fn from_rational(&self, r: &BigRational) -> Result<RingElement> {
        let s = Scalar::from_rational(self.scalar_ring(), r.clone()).ok_or_else(|| {
            Error::Invalid(format!("{r} does not lie in {self}"))
        })?;
        match &self.inner.kind {
            RingKind::Scalar(_) => Ok(self.elem(Value::S(s))),
            _ => Ok(self.elem(Value::P(Poly::constant(
                self.scalar_ring(),
                s,
                self.vars().len(),
            )))),
        }
    }

    pub fn var(&self, name: &str) -> Result<RingElement> {
        let i = self
            .var_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(self.elem(self.reduce_value(Value::P(Poly::variable(
            self.scalar_ring(),
            i,
            self.vars().len(),
        )))))
    }

    /// Reduce a raw polynomial expression to its unique normal form.
    /// Idempotent: reducing a normal form returns it unchanged.
    pub fn normalize(&self, raw: &[RawTerm]) -> Result<RingElement> {
        match &self.inner.kind {
            RingKind::Scalar(s) => {
                let mut acc = scalar::zero(s);
                for t in raw {
                    if !t.exps.is_empty() && t.exps.values().any(|&e| e != 0) {
                        let name = t.exps.keys().next().unwrap().clone();
                        return Err(Error::UnknownVariable(name));
                    }
                    let c = Scalar::from_rational(s, t.coeff.clone())
                        .ok_or_else(|| Error::Invalid(format!("{} not in {self}", t.coeff)))?;
                    acc = scalar::add(s, &acc, &c);
                }
                Ok(self.elem(Value::S(acc)))
            }
            _ => {
                let p = self.raw_to_poly(raw)?;
                Ok(self.elem(self.reduce_value(Value::P(p))))
            }
        }
    }

    fn raw_to_poly(&self, raw: &[RawTerm]) -> Result<Poly> {
        let vars = self.vars();
        let sr = self.scalar_ring();
        let inverted = self.inverted_var_indices();
        let mut p = Poly::zero();
        for t in raw {
            let mut exps: Exps = vec![0; vars.len()];
            for (name, &e) in &t.exps {
                let i = self
                    .var_index(name)
                    .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                if e < 0 && !inverted.contains(&i) {
                    return Err(Error::Invalid(format!(
                        "negative exponent on non-inverted variable `{name}`"
                    )));
                }
                exps[i] += e;
            }
            let c = Scalar::from_rational(sr, t.coeff.clone())
                .ok_or_else(|| Error::Invalid(format!("{} not in {self}", t.coeff)))?;
            p.add_term(sr, exps, &c);
        }
        Ok(p)
    }

    /// Build an element directly from an exponent-vector polynomial over this
    /// ring's variables, converting coefficients into the effective scalar
    /// ring (prime folds change it) and reducing.
    pub fn element_from_poly(&self, p: Poly) -> Result<RingElement> {
        match &self.inner.kind {
            RingKind::Scalar(s) => {
                let c = p.as_constant(s).ok_or_else(|| {
                    Error::Invalid("scalar ring element must be constant".into())
                })?;
                Ok(self.elem(Value::S(c)))
            }
            _ => {
                let converted = convert_poly(&p, self.scalar_ring())?;
                Ok(self.elem(self.reduce_value(Value::P(converted))))
            }
        }
    }

    fn reduce_value(&self, v: Value) -> Value {
        match (&self.inner.kind, v) {
            (RingKind::Quotient(q), Value::P(p)) => Value::P(reduce_poly(q, p)),
            (_, v) => v,
        }
    }

    fn add_values(&self, a: &Value, b: &Value) -> Value {
        let sr = self.scalar_ring();
        match (a, b) {
            (Value::S(x), Value::S(y)) => Value::S(scalar::add(sr, x, y)),
            (Value::P(x), Value::P(y)) => Value::P(x.add(sr, y)),
            _ => panic!("mixed value kinds"),
        }
    }

    fn sub_values(&self, a: &Value, b: &Value) -> Value {
        let sr = self.scalar_ring();
        match (a, b) {
            (Value::S(x), Value::S(y)) => Value::S(scalar::sub(sr, x, y)),
            (Value::P(x), Value::P(y)) => Value::P(x.sub(sr, y)),
            _ => panic!("mixed value kinds"),
        }
    }

    fn neg_value(&self, a: &Value) -> Value {
        let sr = self.scalar_ring();
        match a {
            Value::S(x) => Value::S(scalar::neg(sr, x)),
            Value::P(x) => Value::P(x.neg(sr)),
        }
    }

    fn mul_values(&self, a: &Value, b: &Value) -> Value {
        let sr = self.scalar_ring();
        match (a, b) {
            (Value::S(x), Value::S(y)) => Value::S(scalar::mul(sr, x, y)),
            (Value::P(x), Value::P(y)) => self.reduce_value(Value::P(x.mul(sr, y))),
            _ => panic!("mixed value kinds"),
        }
    }

    /// Structural unit decision; see the module docs for the cases that are
    /// decided versus reported unknown.
    pub fn unit_status(&self, v: &Value) -> UnitStatus {
        match self.invert_value(v) {
            InvertOutcome::Unit(_) => UnitStatus::Unit,
            InvertOutcome::NonUnit => UnitStatus::NonUnit,
            InvertOutcome::Unknown(_) => UnitStatus::Unknown,
        }
    }

    fn invert_value(&self, v: &Value) -> InvertOutcome {
        match (&self.inner.kind, v) {
            (RingKind::Scalar(s), Value::S(x)) => match scalar::invert(s, x) {
                Some(inv) => InvertOutcome::Unit(Value::S(inv)),
                None => InvertOutcome::NonUnit,
            },
            (RingKind::Poly { scalar: s, vars }, Value::P(p)) => match p.as_constant(s) {
                Some(c) => match scalar::invert(s, &c) {
                    Some(inv) => {
                        InvertOutcome::Unit(Value::P(Poly::constant(s, inv, vars.len())))
                    }
                    None => InvertOutcome::NonUnit,
                },
                // units of a polynomial ring over a domain are the unit constants
                None => InvertOutcome::NonUnit,
            },
            (RingKind::Quotient(q), Value::P(p)) => invert_in_quotient(q, p),
            _ => panic!("mixed value kinds"),
        }
    }

    /// Is multiplication by `v` injective? Decided by matrix rank on bounded
    /// quotients; `None` when not decidable here. Scalars and plain
    /// polynomial rings live over domains, so only zero divides zero there.
    pub fn is_zero_divisor(&self, v: &Value) -> Option<bool> {
        match (&self.inner.kind, v) {
            (RingKind::Scalar(_), Value::S(x)) => Some(x.is_zero()),
            (RingKind::Poly { .. }, Value::P(p)) => Some(p.is_zero()),
            (RingKind::Quotient(q), Value::P(p)) => {
                if p.is_zero() {
                    return Some(true);
                }
                let dim = q.bounded_dim?;
                if dim > MATRIX_DIM_CAP {
                    return None;
                }
                let basis = bounded_basis(q, dim as usize);
                let field = match &q.scalar {
                    ScalarRing::LocalizedIntegers { .. } => ScalarRing::Rationals,
                    s => s.clone(),
                };
                let columns: Vec<Vec<Scalar>> = basis
                    .iter()
                    .map(|m| {
                        let prod =
                            reduce_poly(q, p.mul_monomial(&q.scalar, m, &scalar::one(&q.scalar)));
                        poly_coordinates(&prod, &basis, &field)
                    })
                    .collect();
                // p is a zero-divisor iff multiplication by p has a kernel
                Some(columns_dependent(&field, &columns))
            }
            _ => panic!("mixed value kinds"),
        }
    }

    /// Enumerate all elements of a finite ring (F_p scalars, every variable
    /// led). Used as an exhaustive oracle and by brute-force decisions.
    pub fn enumerate(&self) -> Option<Vec<RingElement>> {
        match &self.inner.kind {
            RingKind::Scalar(ScalarRing::PrimeField { p }) => {
                Some((0..*p).map(|n| self.from_int(n as i64)).collect())
            }
            RingKind::Quotient(q) => {
                let p = match &q.scalar {
                    ScalarRing::PrimeField { p } => *p,
                    _ => return None,
                };
                let dim = q.bounded_dim?;
                let count = p.checked_pow(u32::try_from(dim).ok()?)?;
                if count > ENUMERATION_CAP {
                    return None;
                }
                let basis = bounded_basis(q, dim as usize);
                let mut out = Vec::with_capacity(count as usize);
                let mut digits = vec![0u64; basis.len()];
                loop {
                    let mut poly = Poly::zero();
                    for (m, &d) in basis.iter().zip(digits.iter()) {
                        if d != 0 {
                            poly.add_term(&q.scalar, m.clone(), &Scalar::Mod(d));
                        }
                    }
                    out.push(self.elem(Value::P(poly)));
                    let mut i = 0;
                    loop {
                        if i == digits.len() {
                            return Some(out);
                        }
                        digits[i] += 1;
                        if digits[i] < p {
                            break;
                        }
                        digits[i] = 0;
                        i += 1;
                    }
                }
            }
            _ => None,
        }
    }

    /// The module dimension over the scalar coefficients, when every
    /// variable is bounded by a relation.
    pub fn bounded_dim(&self) -> Option<u64> {
        match &self.inner.kind {
            RingKind::Quotient(q) => q.bounded_dim,
            RingKind::Scalar(_) => Some(1),
            _ => None,
        }
    }

    /// The sorted monomial basis of a bounded quotient (or `[1]` for scalar
    /// rings); None when the ring is not module-finite over its scalars.
    pub(crate) fn monomial_basis(&self) -> Option<Vec<Exps>> {
        match &self.inner.kind {
            RingKind::Scalar(_) => Some(vec![Vec::new()]),
            RingKind::Quotient(q) => {
                let dim = q.bounded_dim?;
                if dim > MATRIX_DIM_CAP {
                    return None;
                }
                Some(bounded_basis(q, dim as usize))
            }
            _ => None,
        }
    }

    /// Coordinates of a normal-form value in the bounded monomial basis.
    pub(crate) fn coordinates(&self, v: &Value) -> Option<Vec<Scalar>> {
        let basis = self.monomial_basis()?;
        match v {
            Value::S(s) => Some(vec![s.clone()]),
            Value::P(p) => {
                let index: BTreeMap<&Exps, usize> =
                    basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
                let sr = self.scalar_ring();
                let mut out = vec![scalar::zero(sr); basis.len()];
                for (e, c) in &p.terms {
                    out[*index.get(e)?] = c.clone();
                }
                Some(out)
            }
        }
    }
}

/// Structural/matrix unit decision inside a localised triangular quotient.
fn invert_in_quotient(q: &QuotientCtx, p: &Poly) -> InvertOutcome {
    if p.is_zero() {
        return InvertOutcome::NonUnit;
    }
    let sr = &q.scalar;
    if let Some(c) = p.as_constant(sr) {
        return match scalar::invert(sr, &c) {
            Some(inv) => InvertOutcome::Unit(Value::P(Poly::constant(sr, inv, q.vars.len()))),
            None => InvertOutcome::NonUnit,
        };
    }
    // single monomial supported entirely on inverted variables
    if p.terms.len() == 1 {
        let (e, c) = p.terms.iter().next().unwrap();
        let all_inverted = e
            .iter()
            .enumerate()
            .all(|(i, &x)| x == 0 || q.inverted_vars.contains(&i));
        if all_inverted {
            if let Some(cinv) = scalar::invert(sr, c) {
                let ne: Exps = e.iter().map(|&x| -x).collect();
                let inv = reduce_poly(q, Poly::monomial(sr, ne, cinv));
                return InvertOutcome::Unit(Value::P(inv));
            }
        }
    }
    // a term-wise positive degree in some free non-inverted variable
    // survives every rewrite, so such elements are never units
    let free_floor: i32 = p
        .terms
        .keys()
        .map(|e| {
            e.iter()
                .enumerate()
                .filter(|(i, _)| !q.led.contains_key(i) && !q.inverted_vars.contains(i))
                .map(|(_, &x)| x)
                .sum::<i32>()
        })
        .min()
        .unwrap_or(0);
    if free_floor >= 1 {
        return InvertOutcome::NonUnit;
    }
    // finite-dimensional case: decide by solving p*t = 1 on the monomial basis
    if let Some(dim) = q.bounded_dim {
        if dim <= MATRIX_DIM_CAP {
            return matrix_invert(q, p, dim);
        }
    }
    InvertOutcome::Unknown(format!(
        "unit status of {} is not structurally decidable here",
        p.format(&q.vars),
    ))
}

/// Solve `p * t = 1` over the finite monomial basis of a bounded quotient.
/// Over Q and F_p this is decisive. Over localised integers the system is
/// solved over Q and the solution checked for membership; a unique rational
/// solution outside the ring means no ring inverse exists.
fn matrix_invert(q: &QuotientCtx, p: &Poly, dim: u64) -> InvertOutcome {
    let basis = bounded_basis(q, dim as usize);
    let field = match &q.scalar {
        ScalarRing::LocalizedIntegers { .. } => ScalarRing::Rationals,
        s => s.clone(),
    };
    let columns: Vec<Vec<Scalar>> = basis
        .iter()
        .map(|m| {
            let prod = reduce_poly(q, p.mul_monomial(&q.scalar, m, &scalar::one(&q.scalar)));
            poly_coordinates(&prod, &basis, &field)
        })
        .collect();
    let mut target = vec![scalar::zero(&field); basis.len()];
    target[0] = scalar::one(&field);
    match linalg::solve(&field, &columns, &target) {
        None => InvertOutcome::NonUnit,
        Some(sol) => {
            let mut inv = Poly::zero();
            for (m, c) in basis.iter().zip(sol.iter()) {
                if c.is_zero() {
                    continue;
                }
                let cc = match (&q.scalar, c) {
                    (ScalarRing::LocalizedIntegers { .. }, Scalar::Rat(r)) => {
                        match Scalar::from_rational(&q.scalar, r.clone()) {
                            Some(s) => s,
                            // inverse exists over Q but not in the ring
                            None => return InvertOutcome::NonUnit,
                        }
                    }
                    _ => c.clone(),
                };
                inv.add_term(&q.scalar, m.clone(), &cc);
            }
            InvertOutcome::Unit(Value::P(inv))
        }
    }
}

fn columns_dependent(field: &ScalarRing, columns: &[Vec<Scalar>]) -> bool {
    // dependence check by elimination: rank < number of columns
    let ncols = columns.len();
    let nrows = columns.first().map_or(0, |c| c.len());
    let mut m: Vec<Vec<Scalar>> = (0..nrows)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            return true;
        };
        m.swap(rank, p);
        let inv = scalar::invert(field, &m[rank][col]).expect("nonzero field element");
        for j in col..ncols {
            m[rank][j] = scalar::mul(field, &m[rank][j], &inv);
        }
        for r in 0..nrows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..ncols {
                    let d = scalar::mul(field, &f, &m[rank][j]);
                    m[r][j] = scalar::sub(field, &m[r][j], &d);
                }
            }
        }
        rank += 1;
    }
    rank < ncols
}

/// Coordinates of a reduced polynomial in a bounded monomial basis, with
/// scalars converted into `field` (identity, or embedding Z[1/S] into Q).
fn poly_coordinates(p: &Poly, basis: &[Exps], field: &ScalarRing) -> Vec<Scalar> {
    let index: BTreeMap<&Exps, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut out = vec![scalar::zero(field); basis.len()];
    for (e, c) in &p.terms {
        let i = *index
            .get(e)
            .expect("reduced polynomial must be supported on the bounded basis");
        out[i] = c.clone();
    }
    out
}

/// All monomials with led-variable exponents in `[0, degree)`; only valid
/// when every variable is led.
fn bounded_basis(q: &QuotientCtx, dim: usize) -> Vec<Exps> {
    let mut basis: Vec<Exps> = vec![vec![0; q.vars.len()]];
    for rw in &q.rewrites {
        let mut next = Vec::with_capacity(basis.len() * rw.degree as usize);
        for b in &basis {
            for e in 0..rw.degree {
                let mut nb = b.clone();
                nb[rw.var] = e;
                next.push(nb);
            }
        }
        basis = next;
    }
    debug_assert_eq!(basis.len(), dim);
    basis.sort();
    basis
}

/// Reduce a polynomial to normal form modulo the quotient's rewrites.
fn reduce_poly(q: &QuotientCtx, p: Poly) -> Poly {
    let sr = &q.scalar;
    let mut out = Poly::zero();
    let mut work: Vec<(Exps, Scalar)> = p.terms.into_iter().collect();
    while let Some((e, c)) = work.pop() {
        if c.is_zero() {
            continue;
        }
        let mut applied = false;
        for rw in &q.rewrites {
            let x = e[rw.var];
            if x >= rw.degree {
                let mut ne = e.clone();
                ne[rw.var] -= rw.degree;
                for (re, rc) in &rw.rhs.terms {
                    let sum: Exps = ne.iter().zip(re.iter()).map(|(a, b)| a + b).collect();
                    work.push((sum, scalar::mul(sr, &c, rc)));
                }
                applied = true;
                break;
            }
            if x < 0 {
                // var^(-degree) = rhs^(-1)
                let inv = rw
                    .inv_rhs
                    .as_ref()
                    .expect("inverted leading variable carries an inverse rewrite");
                let mut ne = e.clone();
                ne[rw.var] += rw.degree;
                for (re, rc) in &inv.terms {
                    let sum: Exps = ne.iter().zip(re.iter()).map(|(a, b)| a + b).collect();
                    work.push((sum, scalar::mul(sr, &c, rc)));
                }
                applied = true;
                break;
            }
        }
        if !applied {
            out.add_term(sr, e, &c);
        }
    }
    out
}

fn build_quotient(base: &RingSpec, inverted: &[Poly], relations: &[Poly]) -> Result<QuotientCtx> {
    let base_ring = Ring::new(base.clone())?;
    let (mut scalar_ring, vars) = match &base_ring.inner.kind {
        RingKind::Poly { scalar, vars } => (scalar.clone(), vars.clone()),
        _ => {
            return Err(Error::InvalidRing(
                "a triangular quotient must be presented over a polynomial ring".into(),
            ))
        }
    };

    // Localisation first: each declared element must be a monomial. Scalar
    // content folds into the coefficient ring, variables become Laurent.
    let mut inverted_vars: BTreeSet<usize> = BTreeSet::new();
    for inv in inverted {
        if inv.is_zero() {
            return Err(Error::InvalidRing(
                "an inverted element reduces to zero".into(),
            ));
        }
        if inv.terms.len() != 1 {
            return Err(Error::Undecidable(
                "only scalar and monomial localisations are supported at desk scale".into(),
            ));
        }
        let (e, c) = inv.terms.iter().next().unwrap();
        for (i, &x) in e.iter().enumerate() {
            if x != 0 {
                inverted_vars.insert(i);
            }
        }
        scalar_ring = fold_inverted_scalar(scalar_ring, c)?;
    }

    let mut q = QuotientCtx {
        scalar: scalar_ring,
        vars,
        inverted_vars,
        rewrites: Vec::new(),
        led: BTreeMap::new(),
        bounded_dim: None,
    };

    for rel in relations {
        let reduced = reduce_poly(&q, convert_poly(rel, &q.scalar)?);
        install_relation(&mut q, reduced)?;
    }

    // bounded dimension over the scalar ring, if every variable is led
    if (0..q.vars.len()).all(|i| q.led.contains_key(&i)) {
        let mut dim: u64 = 1;
        for rw in &q.rewrites {
            dim = dim.saturating_mul(rw.degree as u64);
        }
        q.bounded_dim = Some(dim);
    }

    // localisation collapse: an inverted variable must not be nilpotent
    for &v in q.inverted_vars.clone().iter() {
        let nf = reduce_poly(
            &q,
            Poly::variable(&q.scalar, v, q.vars.len()),
        );
        if nf.is_zero() {
            return Err(Error::ZeroRing);
        }
        if is_nilpotent(&q, &nf)? {
            return Err(Error::ZeroRing);
        }
    }

    Ok(q)
}

/// Fold a scalar factor of an inverted monomial into the coefficient ring.
fn fold_inverted_scalar(sr: ScalarRing, c: &Scalar) -> Result<ScalarRing> {
    if c.is_zero() {
        return Err(Error::InvalidRing("inverting zero".into()));
    }
    match (&sr, c) {
        (ScalarRing::Rationals, _) | (ScalarRing::PrimeField { .. }, _) => Ok(sr),
        (ScalarRing::LocalizedIntegers { inverted }, Scalar::Rat(r)) => {
            let mut primes = inverted.clone();
            let residual = scalar::strip_primes(r.numer(), &primes);
            let n = u64::try_from(residual.magnitude().clone())
                .map_err(|_| Error::Undecidable("inverted scalar too large to factor".into()))?;
            if n > 1 {
                let factors = factor_or_err(n)?;
                for (p, _) in factors {
                    primes.insert(p);
                }
            }
            Ok(ScalarRing::LocalizedIntegers { inverted: primes })
        }
        _ => unreachable!("scalar/ring mismatch"),
    }
}

fn factor_or_err(n: u64) -> Result<Vec<(u64, u32)>> {
    scalar::factor(n).ok_or_else(|| Error::Undecidable(format!("cannot factor {n}")))
}

/// Convert a polynomial's coefficients into the (possibly folded) scalar ring.
fn convert_poly(p: &Poly, sr: &ScalarRing) -> Result<Poly> {
    let mut out = Poly::zero();
    for (e, c) in &p.terms {
        let nc = match (c, sr) {
            (Scalar::Rat(r), _) => Scalar::from_rational(sr, r.clone())
                .ok_or_else(|| Error::Invalid(format!("coefficient {r} not in {sr}")))?,
            (Scalar::Mod(m), ScalarRing::PrimeField { p }) => Scalar::Mod(*m % *p),
            (Scalar::Mod(_), _) => {
                return Err(Error::Invalid(
                    "residue coefficient used over a characteristic-zero ring".into(),
                ))
            }
        };
        out.add_term(sr, e.clone(), &nc);
    }
    Ok(out)
}

/// Install one relation: fold scalar primes, or add a triangular rewrite.
fn install_relation(q: &mut QuotientCtx, reduced: Poly) -> Result<()> {
    if reduced.is_zero() {
        return Err(Error::InvalidRing(
            "a relation reduces to zero modulo the earlier relations".into(),
        ));
    }
    if let Some(c) = reduced.as_constant(&q.scalar) {
        return fold_scalar_relation(q, &c);
    }

    // clear Laurent denominators (multiplying by a unit monomial)
    let mut cleared = reduced;
    {
        let mut shift = vec![0i32; q.vars.len()];
        let mut needed = false;
        for &v in &q.inverted_vars {
            let m = cleared.min_exp_in(v);
            if m < 0 {
                shift[v] = -m;
                needed = true;
            }
        }
        if needed {
            cleared = cleared.mul_monomial(&q.scalar, &shift, &scalar::one(&q.scalar));
        }
    }

    // deterministic leading-variable choice: highest index with a unit-monic
    // top coefficient, not already led
    let top = cleared.highest_variable().expect("nonconstant");
    let mut chosen: Option<(usize, i32, Scalar)> = None;
    for v in (0..=top).rev() {
        if q.led.contains_key(&v) {
            continue;
        }
        let d = cleared.degree_in(v);
        if d < 1 {
            continue;
        }
        let lead = cleared.coefficient_of(v, d);
        if let Some(c) = lead.as_constant(&q.scalar) {
            if scalar::is_unit(&q.scalar, &c) {
                chosen = Some((v, d, c));
                break;
            }
        }
    }
    let Some((v, d, lead)) = chosen else {
        return Err(Error::NotTriangular(format!(
            "no fresh variable with a unit leading coefficient in {}",
            cleared.format(&q.vars)
        )));
    };

    // scale monic, split lv^d -> rhs
    let inv_lead = scalar::invert(&q.scalar, &lead).expect("unit");
    let monic = cleared.scalar_mul(&q.scalar, &inv_lead);
    let mut lead_exps = vec![0i32; q.vars.len()];
    lead_exps[v] = d;
    let rhs = Poly::monomial(&q.scalar, lead_exps, scalar::one(&q.scalar)).sub(&q.scalar, &monic);
    let rhs = reduce_poly(q, rhs);

    let inv_rhs = if q.inverted_vars.contains(&v) {
        // negative powers of an inverted led variable reduce through the
        // inverse of rhs, which must exist and involve only earlier
        // variables; invert in the sub-context on those variables so the
        // bounded matrix decision is available mid-construction
        if rhs.is_zero() {
            // the inverted variable is nilpotent, so 1 = 0 after localising
            return Err(Error::ZeroRing);
        }
        let sub = sub_context(q, v);
        match invert_in_quotient(&sub, &rhs) {
            InvertOutcome::Unit(Value::P(inv)) => {
                if inv.highest_variable().map_or(false, |h| h >= v) {
                    return Err(Error::Undecidable(format!(
                        "inverse of the image of `{}` involves later variables",
                        q.vars[v]
                    )));
                }
                Some(inv)
            }
            InvertOutcome::Unit(_) => unreachable!(),
            InvertOutcome::NonUnit => {
                return Err(Error::NotInvertible(format!(
                    "inverted variable `{}` is sent to a non-unit by its relation",
                    q.vars[v]
                )))
            }
            InvertOutcome::Unknown(why) => return Err(Error::Undecidable(why)),
        }
    } else {
        None
    };

    // consistency of the inverse rewrite
    if let Some(inv) = &inv_rhs {
        let prod = reduce_poly(q, rhs.mul(&q.scalar, inv));
        if prod.as_constant(&q.scalar).map_or(true, |c| !c.is_one()) {
            return Err(Error::Undecidable(
                "inconsistent inverse for an inverted leading variable".into(),
            ));
        }
    }

    q.rewrites.push(Rewrite {
        var: v,
        degree: d,
        rhs,
        inv_rhs,
    });
    q.led.insert(v, q.rewrites.len() - 1);
    Ok(())
}

/// The quotient context restricted to variables below `v` (indices are kept,
/// so exponent vectors stay full length). Only rewrites led by earlier
/// variables can ever fire on such elements.
fn sub_context(q: &QuotientCtx, v: usize) -> QuotientCtx {
    let rewrites: Vec<Rewrite> = q
        .rewrites
        .iter()
        .filter(|rw| rw.var < v)
        .cloned()
        .collect();
    let led: BTreeMap<usize, usize> = rewrites
        .iter()
        .enumerate()
        .map(|(i, rw)| (rw.var, i))
        .collect();
    let bounded_dim = if (0..v).all(|i| led.contains_key(&i)) {
        let mut dim: u64 = 1;
        for rw in &rewrites {
            dim = dim.saturating_mul(rw.degree as u64);
        }
        Some(dim)
    } else {
        None
    };
    QuotientCtx {
        scalar: q.scalar.clone(),
        vars: q.vars.clone(),
        inverted_vars: q.inverted_vars.iter().copied().filter(|&i| i < v).collect(),
        rewrites,
        led,
        bounded_dim,
    }
}

/// A relation that reduced to a scalar: supported when it is a unit multiple
/// of a single odd prime over integer-localised coefficients, which folds the
/// coefficient ring to F_p.
fn fold_scalar_relation(q: &mut QuotientCtx, c: &Scalar) -> Result<()> {
    if scalar::is_unit(&q.scalar, c) {
        return Err(Error::ZeroRing);
    }
    let ScalarRing::LocalizedIntegers { inverted } = q.scalar.clone() else {
        // over a field every nonzero scalar is a unit, so this is unreachable
        // for Q / F_p unless c = 0, which was rejected earlier
        return Err(Error::Undecidable(
            "scalar relation over a field that is neither zero nor a unit".into(),
        ));
    };
    let Scalar::Rat(r) = c else { unreachable!() };
    let residual = scalar::strip_primes(r.numer(), &inverted);
    let n = u64::try_from(residual.magnitude().clone())
        .map_err(|_| Error::Undecidable("scalar relation too large to factor".into()))?;
    if !scalar::is_prime(n) || n == 2 {
        return Err(Error::Undecidable(format!(
            "quotient by the scalar {n} is not an odd-prime quotient"
        )));
    }
    let new_scalar = ScalarRing::PrimeField { p: n };

    // re-express every established rewrite mod p; denominators are supported
    // on the inverted primes, all distinct from p, hence invertible
    let remap = |p_old: &Poly| -> Result<Poly> {
        let mut out = Poly::zero();
        for (e, cc) in &p_old.terms {
            let Scalar::Rat(rr) = cc else { unreachable!() };
            let nc = Scalar::from_rational(&new_scalar, rr.clone())
                .ok_or_else(|| Error::Undecidable("prime fold hit an unsupported denominator".into()))?;
            out.add_term(&new_scalar, e.clone(), &nc);
        }
        Ok(out)
    };
    let mut new_rewrites = Vec::with_capacity(q.rewrites.len());
    for rw in &q.rewrites {
        new_rewrites.push(Rewrite {
            var: rw.var,
            degree: rw.degree,
            rhs: remap(&rw.rhs)?,
            inv_rhs: rw.inv_rhs.as_ref().map(|p| remap(p)).transpose()?,
        });
    }
    q.scalar = new_scalar;
    q.rewrites = new_rewrites;
    Ok(())
}

/// Exact nilpotence test for the localisation collapse check: coefficients
/// with respect to free-variable monomials are squared up to the module
/// dimension bound of the led part.
fn is_nilpotent(q: &QuotientCtx, p: &Poly) -> Result<bool> {
    if p.is_zero() {
        return Ok(true);
    }
    let mut dim: u64 = 1;
    for rw in &q.rewrites {
        dim = dim.saturating_mul(rw.degree as u64);
        if dim > NILPOTENCE_DIM_CAP {
            return Err(Error::Undecidable(
                "localisation collapse check exceeds the dimension cap".into(),
            ));
        }
    }
    if dim == 1 {
        // no relations of degree > 1 anywhere: the ring is a free module with
        // entire monomial basis over a domain, so only 0 is nilpotent
        return Ok(false);
    }
    let steps = 64 - (dim - 1).leading_zeros();
    let mut acc = p.clone();
    for _ in 0..steps {
        acc = reduce_poly(q, acc.mul(&q.scalar, &acc));
        if acc.is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A ring homomorphism given by generator images; validated on construction:
/// every relation of the source must map to zero and every inverted element
/// of the source to a unit.
#[derive(Clone, Debug)]
pub struct RingHom {
    source: Ring,
    target: Ring,
    images: Vec<RingElement>,
}

impl RingHom {
    pub fn new(source: Ring, target: Ring, images: Vec<RingElement>) -> Result<RingHom> {
        if images.len() != source.vars().len() {
            return Err(Error::InvalidHom(format!(
                "expected {} generator images, got {}",
                source.vars().len(),
                images.len()
            )));
        }
        for img in &images {
            if img.ring() != &target {
                return Err(Error::RingMismatch(
                    "homomorphism image lies in the wrong ring".into(),
                ));
            }
        }
        // characteristic compatibility of the canonical scalar map
        let sc = source.characteristic();
        let tc = target.characteristic();
        if sc != 0 && sc != tc {
            return Err(Error::InvalidHom(format!(
                "no ring map from characteristic {sc} to characteristic {tc}"
            )));
        }
        if sc == 0 && tc != 0 {
            match source.scalar_ring() {
                ScalarRing::Rationals => {
                    return Err(Error::InvalidHom(
                        "no ring map from a Q-algebra to positive characteristic".into(),
                    ))
                }
                ScalarRing::LocalizedIntegers { inverted } => {
                    if inverted.contains(&tc) {
                        return Err(Error::InvalidHom(format!(
                            "{tc} is inverted in the source but zero in the target"
                        )));
                    }
                }
                _ => {}
            }
        }
        let hom = RingHom {
            source,
            target,
            images,
        };
        // relations map to zero
        if let RingSpec::TriangularQuotient { relations, inverted, .. } = hom.source.spec() {
            for rel in relations {
                let img = hom.apply_base_poly(rel)?;
                if !img.is_zero() {
                    return Err(Error::InvalidHom(format!(
                        "relation {} does not map to zero",
                        rel.format(hom.source.vars())
                    )));
                }
            }
            for inv in inverted {
                let img = hom.apply_base_poly(inv)?;
                match img.is_unit() {
                    UnitStatus::Unit => {}
                    UnitStatus::NonUnit => {
                        return Err(Error::InvalidHom(format!(
                            "inverted element {} does not map to a unit",
                            inv.format(hom.source.vars())
                        )))
                    }
                    UnitStatus::Unknown => {
                        return Err(Error::Undecidable(format!(
                            "unit status of the image of {} is unknown",
                            inv.format(hom.source.vars())
                        )))
                    }
                }
            }
        }
        Ok(hom)
    }

    pub fn identity(ring: Ring) -> Result<RingHom> {
        let images = ring
            .vars()
            .to_vec()
            .iter()
            .map(|v| ring.var(v))
            .collect::<Result<Vec<_>>>()?;
        RingHom::new(ring.clone(), ring, images)
    }

    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn target(&self) -> &Ring {
        &self.target
    }

    pub fn images(&self) -> &[RingElement] {
        &self.images
    }

    fn convert_scalar(&self, s: &Scalar) -> Result<RingElement> {
        match s {
            Scalar::Rat(r) => self.target.from_rational(r).map_err(|_| {
                Error::InvalidHom(format!(
                    "coefficient {r} has no image in {}",
                    self.target
                ))
            }),
            Scalar::Mod(m) => {
                if self.target.characteristic() == self.source.characteristic() {
                    Ok(self.target.from_int(*m as i64))
                } else {
                    Err(Error::InvalidHom("characteristic mismatch".into()))
                }
            }
        }
    }

    /// Apply to a polynomial over the source's variables (not necessarily
    /// reduced); the image is computed in the target and reduced there.
    fn apply_base_poly(&self, p: &Poly) -> Result<RingElement> {
        let mut acc = self.target.zero();
        let mut inverse_cache: BTreeMap<usize, RingElement> = BTreeMap::new();
        for (e, c) in &p.terms {
            let mut term = self.convert_scalar(c)?;
            for (i, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let base = if x > 0 {
                    self.images[i].clone()
                } else {
                    match inverse_cache.get(&i) {
                        Some(inv) => inv.clone(),
                        None => {
                            let inv = self.images[i].try_invert()?;
                            inverse_cache.insert(i, inv.clone());
                            inv
                        }
                    }
                };
                term = term.mul(&base.pow(x.unsigned_abs()));
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Apply the homomorphism. Preserves 0, 1, sums and products; the result
    /// is in normal form.
    pub fn apply(&self, e: &RingElement) -> Result<RingElement> {
        if e.ring() != &self.source {
            return Err(Error::RingMismatch(
                "element does not lie in the homomorphism's source".into(),
            ));
        }
        match e.value() {
            Value::S(s) => self.convert_scalar(s),
            Value::P(p) => self.apply_base_poly(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    pub fn raw(terms: &[(i64, i64, &[(&str, i32)])]) -> Vec<RawTerm> {
        terms
            .iter()
            .map(|(n, d, es)| RawTerm {
                coeff: BigRational::new(BigInt::from(*n), BigInt::from(*d)),
                exps: es.iter().map(|(v, e)| (v.to_string(), *e)).collect(),
            })
            .collect()
    }

    fn q_x() -> RingSpec {
        RingSpec::polynomial(RingSpec::rationals(), &["x"])
    }

    #[test]
    fn normal_form_by_polynomial_division() {
        // Q[x]/(x^2+1): x^3 -> -x. Oracle: x^3 - x*(x^2+1) = -x.
        let sr = ScalarRing::Rationals;
        let rel = {
            let x = Poly::variable(&sr, 0, 1);
            x.mul(&sr, &x).add(&sr, &Poly::one(&sr, 1))
        };
        let ring = Ring::new(RingSpec::quotient(q_x(), vec![], vec![rel.clone()])).unwrap();
        let x3 = ring.normalize(&raw(&[(1, 1, &[("x", 3)])])).unwrap();
        let x = Poly::variable(&sr, 0, 1);
        let oracle = x.pow(&sr, 3).sub(&sr, &x.mul(&sr, &rel));
        assert_eq!(x3.value(), &Value::P(oracle));
        assert_eq!(x3.format(), "-x");
        // idempotence
        let again = ring
            .normalize(&raw(&[(-1, 1, &[("x", 1)])]))
            .unwrap();
        assert_eq!(&again, &x3);
    }

    #[test]
    fn identity_normal_form() {
        // Z[1/2][x]: x + 0 -> x
        let ring = Ring::new(RingSpec::polynomial(RingSpec::localized(&[2]), &["x"])).unwrap();
        let e = ring
            .normalize(&raw(&[(1, 1, &[("x", 1)]), (0, 1, &[])]))
            .unwrap();
        assert_eq!(&e, &ring.var("x").unwrap());
    }

    #[test]
    fn residue_normal_form() {
        let f3 = Ring::new(RingSpec::prime_field(3)).unwrap();
        let e = f3.normalize(&raw(&[(7, 1, &[])])).unwrap();
        assert_eq!(&e, &f3.one());
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let ring = Ring::new(q_x()).unwrap();
        assert!(matches!(
            ring.normalize(&raw(&[(1, 1, &[("y", 1)])])),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn p_equal_two_rejected() {
        assert!(Ring::new(RingSpec::prime_field(2)).is_err());
        assert!(Ring::new(RingSpec::localized(&[3])).is_err());
    }

    #[test]
    fn unit_decisions() {
        let z16 = Ring::new(RingSpec::localized(&[2, 3])).unwrap();
        assert_eq!(z16.from_int(12).is_unit(), UnitStatus::Unit);
        assert_eq!(z16.from_int(5).is_unit(), UnitStatus::NonUnit);

        let zx = Ring::new(RingSpec::polynomial(RingSpec::localized(&[2]), &["x"])).unwrap();
        assert_eq!(zx.var("x").unwrap().is_unit(), UnitStatus::NonUnit);
    }

    #[test]
    fn unit_in_quotient_agrees_with_enumeration() {
        // F_3[x]/(x^2-1): x*x = 1, so x IS a unit; the exhaustive oracle
        // over all 9 elements must agree with the matrix decision.
        let sr = ScalarRing::PrimeField { p: 3 };
        let x = Poly::variable(&sr, 0, 1);
        let rel = x.mul(&sr, &x).sub(&sr, &Poly::one(&sr, 1));
        let base = RingSpec::polynomial(RingSpec::prime_field(3), &["x"]);
        let ring = Ring::new(RingSpec::quotient(base, vec![], vec![rel])).unwrap();
        let xe = ring.var("x").unwrap();
        assert_eq!(xe.is_unit(), UnitStatus::Unit);

        let all = ring.enumerate().unwrap();
        assert_eq!(all.len(), 9);
        let brute = all.iter().any(|t| xe.mul(t).is_one());
        assert!(brute, "enumeration oracle must also find an inverse");
        let inv = xe.try_invert().unwrap();
        assert!(xe.mul(&inv).is_one());
    }

    #[test]
    fn non_unit_with_zero_divisors() {
        // F_3[x]/(x^2): x is nilpotent, not a unit
        let sr = ScalarRing::PrimeField { p: 3 };
        let x = Poly::variable(&sr, 0, 1);
        let rel = x.mul(&sr, &x);
        let base = RingSpec::polynomial(RingSpec::prime_field(3), &["x"]);
        let ring = Ring::new(RingSpec::quotient(base, vec![], vec![rel])).unwrap();
        let xe = ring.var("x").unwrap();
        assert_eq!(xe.is_unit(), UnitStatus::NonUnit);
        assert_eq!(ring.is_zero_divisor(xe.value()), Some(true));
    }

    #[test]
    fn zero_ring_detection() {
        // relations (x - 1, x) force 1 = 0
        let sr = ScalarRing::Rationals;
        let x = Poly::variable(&sr, 0, 1);
        let r1 = x.sub(&sr, &Poly::one(&sr, 1));
        let r2 = x.clone();
        let err = Ring::new(RingSpec::quotient(q_x(), vec![], vec![r1, r2])).unwrap_err();
        assert_eq!(err, Error::ZeroRing);
    }

    #[test]
    fn localisation_collapse_detection() {
        // F_3[x]/(x^2) with x inverted is the zero ring
        let sr = ScalarRing::PrimeField { p: 3 };
        let x = Poly::variable(&sr, 0, 1);
        let rel = x.mul(&sr, &x);
        let base = RingSpec::polynomial(RingSpec::prime_field(3), &["x"]);
        let err = Ring::new(RingSpec::quotient(base, vec![x], vec![rel])).unwrap_err();
        assert_eq!(err, Error::ZeroRing);
    }

    #[test]
    fn laurent_normal_forms() {
        // Z[1/2][x,u][1/u]: u^-1 * u^2 = u, and x*u^-1 is already normal
        let sr = ScalarRing::LocalizedIntegers {
            inverted: [2u64].into_iter().collect(),
        };
        let base = RingSpec::polynomial(RingSpec::localized(&[2]), &["x", "u"]);
        let u = Poly::variable(&sr, 1, 2);
        let ring = Ring::new(RingSpec::quotient(base, vec![u], vec![])).unwrap();
        let e = ring
            .normalize(&raw(&[(1, 1, &[("u", -1)])]))
            .unwrap();
        let u_elem = ring.var("u").unwrap();
        assert!(e.mul(&u_elem).is_one());
        assert_eq!(u_elem.is_unit(), UnitStatus::Unit);
    }

    #[test]
    fn prime_fold_in_quotient() {
        // Z[1/2][x] / (3, x - 2) has F_3 coefficients; x maps to 2
        let sr = ScalarRing::LocalizedIntegers {
            inverted: [2u64].into_iter().collect(),
        };
        let base = RingSpec::polynomial(RingSpec::localized(&[2]), &["x"]);
        let three = Poly::constant(&sr, Scalar::from_int(&sr, 3), 1);
        let x_minus_2 = Poly::variable(&sr, 0, 1).sub(
            &sr,
            &Poly::constant(&sr, Scalar::from_int(&sr, 2), 1),
        );
        let ring = Ring::new(RingSpec::quotient(base, vec![], vec![three, x_minus_2])).unwrap();
        assert_eq!(ring.characteristic(), 3);
        let x = ring.var("x").unwrap();
        assert_eq!(&x, &ring.from_int(2));
        assert_eq!(&ring.from_int(5), &ring.from_int(2));
    }

    #[test]
    fn hom_evaluation_mod_three() {
        // h: Z[1/2][x] -> F_3 with x -> 2; x^2 + x -> 4 + 2 = 0
        let src = Ring::new(RingSpec::polynomial(RingSpec::localized(&[2]), &["x"])).unwrap();
        let tgt = Ring::new(RingSpec::prime_field(3)).unwrap();
        let h = RingHom::new(src.clone(), tgt.clone(), vec![tgt.from_int(2)]).unwrap();
        let e = src
            .normalize(&raw(&[(1, 1, &[("x", 2)]), (1, 1, &[("x", 1)])]))
            .unwrap();
        assert_eq!(h.apply(&e).unwrap(), tgt.zero());
    }

    #[test]
    fn identity_hom_is_identity() {
        let ring = Ring::new(q_x()).unwrap();
        let h = RingHom::identity(ring.clone()).unwrap();
        let e = ring
            .normalize(&raw(&[(3, 2, &[("x", 2)]), (-1, 1, &[])]))
            .unwrap();
        assert_eq!(h.apply(&e).unwrap(), e);
    }

    #[test]
    fn swap_hom() {
        // x -> y, y -> x on Q[x,y]; x - y -> y - x
        let ring = Ring::new(RingSpec::polynomial(RingSpec::rationals(), &["x", "y"])).unwrap();
        let h = RingHom::new(
            ring.clone(),
            ring.clone(),
            vec![ring.var("y").unwrap(), ring.var("x").unwrap()],
        )
        .unwrap();
        let e = ring
            .normalize(&raw(&[(1, 1, &[("x", 1)]), (-1, 1, &[("y", 1)])]))
            .unwrap();
        let img = h.apply(&e).unwrap();
        assert_eq!(img, e.neg());
    }

    #[test]
    fn hom_rejects_unkilled_relation() {
        // Q[x]/(x^2+1) -> Q has no real point: x must go to a square root of -1
        let sr = ScalarRing::Rationals;
        let x = Poly::variable(&sr, 0, 1);
        let rel = x.mul(&sr, &x).add(&sr, &Poly::one(&sr, 1));
        let src = Ring::new(RingSpec::quotient(q_x(), vec![], vec![rel])).unwrap();
        let tgt = Ring::new(RingSpec::rationals()).unwrap();
        let err = RingHom::new(src, tgt.clone(), vec![tgt.from_int(1)]).unwrap_err();
        assert!(matches!(err, Error::InvalidHom(_)));
    }

    #[test]
    fn no_hom_from_q_to_positive_characteristic() {
        let src = Ring::new(q_x()).unwrap();
        let tgt = Ring::new(RingSpec::prime_field(3)).unwrap();
        assert!(RingHom::new(src, tgt.clone(), vec![tgt.from_int(1)]).is_err());
    }

    #[test]
    fn triangular_order_does_not_change_normal_forms() {
        // relations in either order present the same ring
        let sr = ScalarRing::Rationals;
        let base = RingSpec::polynomial(RingSpec::rationals(), &["x", "y"]);
        let x = Poly::variable(&sr, 0, 2);
        let y = Poly::variable(&sr, 1, 2);
        let r1 = x.mul(&sr, &x).add(&sr, &Poly::one(&sr, 2)); // x^2 + 1
        let r2 = y.sub(&sr, &x); // y - x
        let ring_a = Ring::new(RingSpec::quotient(
            base.clone(),
            vec![],
            vec![r1.clone(), r2.clone()],
        ))
        .unwrap();
        let ring_b = Ring::new(RingSpec::quotient(base, vec![], vec![r2, r1])).unwrap();
        for name in ["x", "y"] {
            let a = ring_a.var(name).unwrap();
            let b = ring_b.var(name).unwrap();
            assert_eq!(a.value(), b.value());
        }
    }
}
