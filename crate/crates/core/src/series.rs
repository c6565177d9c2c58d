//! Exact truncated power series in one and two variables.
//!
//! A series of order N stores the coefficients of degrees 0..=N; terms of
//! higher total degree are discarded. Binary operations truncate to the
//! minimum of the operand orders. The trivariate type is internal and exists
//! for the associativity checks on formal group laws.

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement, Value};

/// Truncated power series in one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Series1 {
    ring: Ring,
    order: usize,
    coeffs: Vec<Value>, // degree 0..=order
}

/// Truncated power series in two variables; coefficients are stored in the
/// triangular layout (i, j) with i + j <= order.
#[derive(Clone, Debug, PartialEq)]
pub struct Series2 {
    ring: Ring,
    order: usize,
    coeffs: Vec<Value>,
}

pub(crate) fn idx2(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

pub(crate) fn len2(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

impl Series1 {
    pub fn zero(ring: &Ring, order: usize) -> Series1 {
        assert!(order >= 1, "truncation order must be at least 1");
        Series1 {
            ring: ring.clone(),
            order,
            coeffs: vec![ring.v_zero(); order + 1],
        }
    }

    /// The identity series t.
    pub fn identity(ring: &Ring, order: usize) -> Series1 {
        let mut s = Series1::zero(ring, order);
        s.coeffs[1] = ring.v_one();
        s
    }

    pub fn from_elements(ring: &Ring, order: usize, coeffs: &[RingElement]) -> Result<Series1> {
        if order < 1 {
            return Err(Error::Invalid("truncation order must be at least 1".into()));
        }
        if coeffs.len() != order + 1 {
            return Err(Error::Invalid(format!(
                "expected {} coefficients, got {}",
                order + 1,
                coeffs.len()
            )));
        }
        let mut vs = Vec::with_capacity(order + 1);
        for c in coeffs {
            if c.ring() != ring {
                return Err(Error::RingMismatch(
                    "series coefficient lies in the wrong ring".into(),
                ));
            }
            vs.push(c.value().clone());
        }
        Ok(Series1 {
            ring: ring.clone(),
            order,
            coeffs: vs,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub(crate) fn coeff_value(&self, i: usize) -> &Value {
        &self.coeffs[i]
    }

    pub(crate) fn set_coeff(&mut self, i: usize, v: Value) {
        self.coeffs[i] = v;
    }

    pub fn coeff(&self, i: usize) -> RingElement {
        self.ring.elem_unchecked(self.coeffs[i].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Value::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Series1 {
        assert!(order >= 1 && order <= self.order);
        Series1 {
            ring: self.ring.clone(),
            order,
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    fn check_same(&self, other: &Series1) -> Result<usize> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch("series over different rings".into()));
        }
        Ok(self.order.min(other.order))
    }

    pub fn add(&self, other: &Series1) -> Result<Series1> {
        let n = self.check_same(other)?;
        let mut out = Series1::zero(&self.ring, n);
        for i in 0..=n {
            out.coeffs[i] = self.ring.v_add(&self.coeffs[i], &other.coeffs[i]);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series1) -> Result<Series1> {
        let n = self.check_same(other)?;
        let mut out = Series1::zero(&self.ring, n);
        for i in 0..=n {
            out.coeffs[i] = self.ring.v_sub(&self.coeffs[i], &other.coeffs[i]);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Series1 {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = self.ring.v_neg(c);
        }
        out
    }

    pub fn scale(&self, s: &RingElement) -> Result<Series1> {
        if s.ring() != &self.ring {
            return Err(Error::RingMismatch("scalar lies in the wrong ring".into()));
        }
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = self.ring.v_mul(c, s.value());
        }
        Ok(out)
    }

    /// Truncated product, to the minimum of the operand orders.
    pub fn mul(&self, other: &Series1) -> Result<Series1> {
        let n = self.check_same(other)?;
        let mut out = Series1::zero(&self.ring, n);
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let prod = self.ring.v_mul(&self.coeffs[i], &other.coeffs[j]);
                out.coeffs[i + j] = self.ring.v_add(&out.coeffs[i + j], &prod);
            }
        }
        Ok(out)
    }

    /// Composition `self(inner)`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Series1) -> Result<Series1> {
        let n = self.check_same(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm(
                "substitution requires a series with zero constant term".into(),
            ));
        }
        let inner = inner.truncate(n);
        // Horner: ((c_n inner + c_{n-1}) inner + ...) + c_0
        let mut acc = Series1::zero(&self.ring, n);
        for k in (0..=n).rev() {
            acc = acc.mul(&inner)?;
            let c = if k < self.coeffs.len() {
                self.coeffs[k].clone()
            } else {
                self.ring.v_zero()
            };
            acc.coeffs[0] = self.ring.v_add(&acc.coeffs[0], &c);
        }
        Ok(acc)
    }

    /// Compositional inverse: a series `r` with `self(r) = r(self) = t` to
    /// this order. Requires zero constant term and a unit linear coefficient;
    /// an unknown unit status is an error, never an assumption.
    pub fn reverse(&self) -> Result<Series1> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm(
                "only series with zero constant term are reversible".into(),
            ));
        }
        let c1 = self.coeff(1);
        let c1_inv = match c1.try_invert() {
            Ok(inv) => inv,
            Err(Error::Undecidable(why)) => return Err(Error::Undecidable(why)),
            Err(_) => {
                return Err(Error::NotReversible(
                    "the linear coefficient is not a unit".into(),
                ))
            }
        };
        let n = self.order;
        let mut rev = Series1::zero(&self.ring, n);
        rev.coeffs[1] = c1_inv.value().clone();
        // solve degree by degree: with rev known below degree k and rev_k
        // still zero, the degree-k coefficient of self(rev) is the known
        // defect, and the unknown enters linearly through c1
        for k in 2..=n {
            let composed = self.compose(&rev)?;
            let known = &composed.coeffs[k];
            let correction = self.ring.v_mul(&self.ring.v_neg(known), c1_inv.value());
            rev.coeffs[k] = correction;
        }
        Ok(rev)
    }

    pub fn coefficients(&self) -> Vec<RingElement> {
        (0..=self.order).map(|i| self.coeff(i)).collect()
    }

    pub fn format(&self, var: &str) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = self.ring.elem_unchecked(c.clone()).format();
            let term = match i {
                0 => cs,
                1 if cs == "1" => var.to_string(),
                1 => format!("({cs})*{var}"),
                _ if cs == "1" => format!("{var}^{i}"),
                _ => format!("({cs})*{var}^{i}"),
            };
            parts.push(term);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

impl Series2 {
    pub fn zero(ring: &Ring, order: usize) -> Series2 {
        assert!(order >= 1, "truncation order must be at least 1");
        Series2 {
            ring: ring.clone(),
            order,
            coeffs: vec![ring.v_zero(); len2(order)],
        }
    }

    pub fn var_x(ring: &Ring, order: usize) -> Series2 {
        let mut s = Series2::zero(ring, order);
        s.coeffs[idx2(1, 0)] = ring.v_one();
        s
    }

    pub fn var_y(ring: &Ring, order: usize) -> Series2 {
        let mut s = Series2::zero(ring, order);
        s.coeffs[idx2(0, 1)] = ring.v_one();
        s
    }

    pub fn from_entries(
        ring: &Ring,
        order: usize,
        entries: &[(usize, usize, RingElement)],
    ) -> Result<Series2> {
        if order < 1 {
            return Err(Error::Invalid("truncation order must be at least 1".into()));
        }
        let mut s = Series2::zero(ring, order);
        for (i, j, c) in entries {
            if c.ring() != ring {
                return Err(Error::RingMismatch(
                    "series coefficient lies in the wrong ring".into(),
                ));
            }
            if i + j > order {
                return Err(Error::Invalid(format!(
                    "entry ({i},{j}) exceeds the truncation order {order}"
                )));
            }
            let slot = &mut s.coeffs[idx2(*i, *j)];
            *slot = ring.v_add(slot, c.value());
        }
        Ok(s)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub(crate) fn coeff_value(&self, i: usize, j: usize) -> &Value {
        &self.coeffs[idx2(i, j)]
    }

    pub fn coeff(&self, i: usize, j: usize) -> RingElement {
        self.ring.elem_unchecked(self.coeffs[idx2(i, j)].clone())
    }

    pub(crate) fn set_coeff(&mut self, i: usize, j: usize, v: Value) {
        self.coeffs[idx2(i, j)] = v;
    }

    pub fn truncate(&self, order: usize) -> Series2 {
        assert!(order >= 1 && order <= self.order);
        let mut out = Series2::zero(&self.ring, order);
        for i in 0..=order {
            for j in 0..=(order - i) {
                out.coeffs[idx2(i, j)] = self.coeffs[idx2(i, j)].clone();
            }
        }
        out
    }

    fn check_same(&self, other: &Series2) -> Result<usize> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch("series over different rings".into()));
        }
        Ok(self.order.min(other.order))
    }

    pub fn add(&self, other: &Series2) -> Result<Series2> {
        let n = self.check_same(other)?;
        let mut out = Series2::zero(&self.ring, n);
        for d in 0..=n {
            for j in 0..=d {
                let i = d - j;
                out.coeffs[idx2(i, j)] = self
                    .ring
                    .v_add(self.coeff_value(i, j), other.coeff_value(i, j));
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series2) -> Result<Series2> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series2 {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = self.ring.v_neg(c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Value::is_zero)
    }

    pub fn mul(&self, other: &Series2) -> Result<Series2> {
        let n = self.check_same(other)?;
        let mut out = Series2::zero(&self.ring, n);
        for d1 in 0..=n {
            for j1 in 0..=d1 {
                let i1 = d1 - j1;
                let a = self.coeff_value(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for d2 in 0..=(n - d1) {
                    for j2 in 0..=d2 {
                        let i2 = d2 - j2;
                        let b = other.coeff_value(i2, j2);
                        if b.is_zero() {
                            continue;
                        }
                        let prod = self.ring.v_mul(a, b);
                        let slot = &mut out.coeffs[idx2(i1 + i2, j1 + j2)];
                        *slot = self.ring.v_add(slot, &prod);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Substitute univariate series for the two variables: `u` replaces x,
    /// `v` replaces y. Both must have zero constant term.
    pub fn subst_univariate(&self, u: &Series1, v: &Series1) -> Result<Series2> {
        let u2 = embed1(u, Axis2::X);
        let v2 = embed1(v, Axis2::Y);
        self.subst_bivariate(&u2, &v2)
    }

    /// Substitute bivariate series for the two variables; both arguments must
    /// have zero constant term. Substituting (x, y) returns the series
    /// unchanged.
    pub fn subst_bivariate(&self, u: &Series2, v: &Series2) -> Result<Series2> {
        let n = self
            .check_same(u)?
            .min(self.check_same(v)?)
            .min(u.check_same(v)?);
        if !u.coeff_value(0, 0).is_zero() || !v.coeff_value(0, 0).is_zero() {
            return Err(Error::NonzeroConstantTerm(
                "substitution requires series with zero constant term".into(),
            ));
        }
        let u = u.truncate(n);
        let v = v.truncate(n);
        // F(u, v) = sum_i (sum_j c_ij v^j) u^i, both sums by Horner
        let mut outer = Series2::zero(&self.ring, n);
        for i in (0..=n).rev() {
            let mut inner = Series2::zero(&self.ring, n);
            for j in (0..=(n - i)).rev() {
                inner = inner.mul(&v)?;
                let c = self.coeff_value(i, j).clone();
                let slot = &mut inner.coeffs[0];
                *slot = self.ring.v_add(slot, &c);
            }
            outer = outer.mul(&u)?.add(&inner)?;
        }
        Ok(outer)
    }

    /// Substitute two series in the *same* single variable, producing a
    /// univariate series: `self(u(t), v(t))`.
    pub fn subst_into1(&self, u: &Series1, v: &Series1) -> Result<Series1> {
        if self.ring != *u.ring() || self.ring != *v.ring() {
            return Err(Error::RingMismatch("series over different rings".into()));
        }
        let n = self.order.min(u.order()).min(v.order());
        if !u.coeff_value(0).is_zero() || !v.coeff_value(0).is_zero() {
            return Err(Error::NonzeroConstantTerm(
                "substitution requires series with zero constant term".into(),
            ));
        }
        let u = u.truncate(n);
        let v = v.truncate(n);
        let mut outer = Series1::zero(&self.ring, n);
        for i in (0..=n).rev() {
            let mut inner = Series1::zero(&self.ring, n);
            for j in (0..=(n - i)).rev() {
                inner = inner.mul(&v)?;
                inner.coeffs[0] = self.ring.v_add(&inner.coeffs[0], self.coeff_value(i, j));
            }
            outer = outer.mul(&u)?.add(&inner)?;
        }
        Ok(outer)
    }

    pub fn entries(&self) -> Vec<(usize, usize, RingElement)> {
        let mut out = Vec::new();
        for d in 0..=self.order {
            for j in 0..=d {
                let i = d - j;
                out.push((i, j, self.coeff(i, j)));
            }
        }
        out
    }

    pub fn format(&self, x: &str, y: &str) -> String {
        let mut parts = Vec::new();
        for d in 0..=self.order {
            for j in 0..=d {
                let i = d - j;
                let c = self.coeff_value(i, j);
                if c.is_zero() {
                    continue;
                }
                let cs = self.ring.elem_unchecked(c.clone()).format();
                let mut factors = Vec::new();
                if i == 1 {
                    factors.push(x.to_string());
                } else if i > 1 {
                    factors.push(format!("{x}^{i}"));
                }
                if j == 1 {
                    factors.push(y.to_string());
                } else if j > 1 {
                    factors.push(format!("{y}^{j}"));
                }
                if factors.is_empty() {
                    parts.push(cs);
                } else if cs == "1" {
                    parts.push(factors.join("*"));
                } else {
                    parts.push(format!("({cs})*{}", factors.join("*")));
                }
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// Compose a univariate outer series with a bivariate inner series (which
/// must have zero constant term), yielding a bivariate series.
pub fn compose1_into2(outer: &Series1, inner: &Series2) -> Result<Series2> {
    if outer.ring() != inner.ring() {
        return Err(Error::RingMismatch("series over different rings".into()));
    }
    if !inner.coeff_value(0, 0).is_zero() {
        return Err(Error::NonzeroConstantTerm(
            "substitution requires a series with zero constant term".into(),
        ));
    }
    let ring = inner.ring().clone();
    let n = outer.order().min(inner.order());
    let inner = inner.truncate(n);
    let mut acc = Series2::zero(&ring, n);
    for k in (0..=n).rev() {
        acc = acc.mul(&inner)?;
        let c = outer.coeff_value(k).clone();
        let slot = &mut acc.coeffs[0];
        *slot = ring.v_add(slot, &c);
    }
    Ok(acc)
}

pub(crate) enum Axis2 {
    X,
    Y,
}

/// Embed a univariate series along one axis of the bivariate algebra.
pub(crate) fn embed1(s: &Series1, axis: Axis2) -> Series2 {
    let mut out = Series2::zero(s.ring(), s.order());
    for k in 0..=s.order() {
        let v = s.coeff_value(k).clone();
        match axis {
            Axis2::X => out.coeffs[idx2(k, 0)] = v,
            Axis2::Y => out.coeffs[idx2(0, k)] = v,
        }
    }
    out
}

// ---------------------------------------------------------------------------
// trivariate support (internal): needed for associativity checks
// ---------------------------------------------------------------------------

fn idx3(i: usize, j: usize, k: usize) -> usize {
    let d = i + j + k;
    let base = d * (d + 1) * (d + 2) / 6;
    // within degree d, enumerate (j, k) with j + k <= d
    base + j * (d + 1) + k - (j * j - j) / 2
}

fn len3(order: usize) -> usize {
    (order + 1) * (order + 2) * (order + 3) / 6
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Series3 {
    ring: Ring,
    order: usize,
    coeffs: Vec<Value>,
}

pub(crate) enum Plane3 {
    XY,
    YZ,
}

pub(crate) enum Axis3 {
    X,
    Z,
}

impl Series3 {
    pub(crate) fn zero(ring: &Ring, order: usize) -> Series3 {
        Series3 {
            ring: ring.clone(),
            order,
            coeffs: vec![ring.v_zero(); len3(order)],
        }
    }

    pub(crate) fn variable(ring: &Ring, order: usize, axis: Axis3) -> Series3 {
        let mut s = Series3::zero(ring, order);
        match axis {
            Axis3::X => s.coeffs[idx3(1, 0, 0)] = ring.v_one(),
            Axis3::Z => s.coeffs[idx3(0, 0, 1)] = ring.v_one(),
        }
        s
    }

    pub(crate) fn embed2(f: &Series2, plane: Plane3) -> Series3 {
        let mut out = Series3::zero(f.ring(), f.order());
        for d in 0..=f.order() {
            for j in 0..=d {
                let i = d - j;
                let v = f.coeff_value(i, j).clone();
                match plane {
                    Plane3::XY => out.coeffs[idx3(i, j, 0)] = v,
                    Plane3::YZ => out.coeffs[idx3(0, i, j)] = v,
                }
            }
        }
        out
    }

    pub(crate) fn coeff_value(&self, i: usize, j: usize, k: usize) -> &Value {
        &self.coeffs[idx3(i, j, k)]
    }

    fn mul(&self, other: &Series3) -> Series3 {
        let n = self.order.min(other.order);
        let mut out = Series3::zero(&self.ring, n);
        for d1 in 0..=n {
            for j1 in 0..=d1 {
                for k1 in 0..=(d1 - j1) {
                    let i1 = d1 - j1 - k1;
                    let a = self.coeff_value(i1, j1, k1);
                    if a.is_zero() {
                        continue;
                    }
                    for d2 in 0..=(n - d1) {
                        for j2 in 0..=d2 {
                            for k2 in 0..=(d2 - j2) {
                                let i2 = d2 - j2 - k2;
                                let b = other.coeff_value(i2, j2, k2);
                                if b.is_zero() {
                                    continue;
                                }
                                let prod = self.ring.v_mul(a, b);
                                let slot = &mut out.coeffs[idx3(i1 + i2, j1 + j2, k1 + k2)];
                                *slot = self.ring.v_add(slot, &prod);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn add(&self, other: &Series3) -> Series3 {
        let n = self.order.min(other.order);
        let mut out = Series3::zero(&self.ring, n);
        for idx in 0..len3(n) {
            out.coeffs[idx] = self.ring.v_add(&self.coeffs[idx], &other.coeffs[idx]);
        }
        out
    }
}

/// Substitute two trivariate series (zero constant term) into a bivariate
/// series: `f(a, b)` as a trivariate series.
pub(crate) fn subst2_into3(f: &Series2, a: &Series3, b: &Series3) -> Series3 {
    let ring = f.ring().clone();
    let n = f.order().min(a.order).min(b.order);
    debug_assert!(a.coeff_value(0, 0, 0).is_zero() && b.coeff_value(0, 0, 0).is_zero());
    let mut outer = Series3::zero(&ring, n);
    for i in (0..=n).rev() {
        let mut inner = Series3::zero(&ring, n);
        for j in (0..=(n - i)).rev() {
            inner = inner.mul(b);
            inner.coeffs[0] = ring.v_add(&inner.coeffs[0], f.coeff_value(i, j));
        }
        outer = outer.mul(a).add(&inner);
    }
    outer
}
