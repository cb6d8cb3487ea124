//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] stores the Taylor coefficients `∂^α f / α!` of a scalar quantity
//! for every multi-index `α` of total degree `≤ order` in `n_vars` seed
//! variables. Multi-indices are kept in graded lexicographic order, so the
//! coefficients of a lower order form a prefix of the higher-order layout:
//! index 0 is the value and indices `1..=n_vars` are the first partials.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Interned jet spaces keyed by `(variables, order)`.
type SpaceCache = HashMap<(usize, usize), Arc<JetSpace>>;

/// Highest order a [`JetSpace`] may be built with. Public derivative queries
/// are restricted to order 3; the extra headroom serves nested evaluations
/// (e.g. Christoffel symbols evaluated on second-order jets).
pub const MAX_INTERNAL_ORDER: usize = 6;

/// Layout shared by all jets of a given `(n_vars, order)`.
pub struct JetSpace {
    n_vars: usize,
    order: usize,
    exponents: Vec<Vec<u8>>,
    degree: Vec<usize>,
    lookup: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)`: coefficient `i` times coefficient `j` contributes to `k`.
    mul: Vec<(u32, u32, u32)>,
    /// `raise[v][i]` is the index of `α_i + e_v`, or `usize::MAX` past `order`.
    raise: Vec<Vec<usize>>,
    /// `α!` for each multi-index.
    factorial: Vec<f64>,
    /// Number of multi-indices of degree `≤ k`, for `k = 0..=order`.
    prefix: Vec<usize>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("n_vars", &self.n_vars)
            .field("order", &self.order)
            .field("len", &self.len())
            .finish()
    }
}

/// Number of multi-indices of total degree `≤ order` in `n_vars` variables.
pub fn multi_index_count(n_vars: usize, order: usize) -> usize {
    // binomial(n_vars + order, order)
    let mut c: u128 = 1;
    for k in 1..=order as u128 {
        c = c * (n_vars as u128 + k) / k;
    }
    c as usize
}

impl JetSpace {
    /// Shared space for `(n_vars, order)`. Spaces are cached process-wide.
    pub fn get(n_vars: usize, order: usize) -> Arc<JetSpace> {
        assert!(
            order <= MAX_INTERNAL_ORDER,
            "jet order {order} exceeds internal maximum {MAX_INTERNAL_ORDER}"
        );
        let order = if n_vars == 0 { 0 } else { order };
        static CACHE: OnceLock<Mutex<SpaceCache>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(s) = cache.lock().unwrap().get(&(n_vars, order)) {
            return s.clone();
        }
        let built = Arc::new(JetSpace::build(n_vars, order));
        cache
            .lock()
            .unwrap()
            .entry((n_vars, order))
            .or_insert(built)
            .clone()
    }

    /// The zero-variable space holding plain constants.
    pub fn constants() -> Arc<JetSpace> {
        JetSpace::get(0, 0)
    }

    fn build(n_vars: usize, order: usize) -> JetSpace {
        let mut exponents: Vec<Vec<u8>> = vec![vec![0u8; n_vars]];
        let mut degree = vec![0usize];
        let mut prefix = vec![1usize];
        // degree-k indices as non-decreasing variable tuples, lexicographic
        let mut tuples: Vec<Vec<usize>> = vec![vec![]];
        for k in 1..=order {
            let mut next = Vec::new();
            for t in &tuples {
                let start = t.last().copied().unwrap_or(0);
                for v in start..n_vars {
                    let mut nt = t.clone();
                    nt.push(v);
                    next.push(nt);
                }
            }
            for t in &next {
                let mut e = vec![0u8; n_vars];
                for &v in t {
                    e[v] += 1;
                }
                exponents.push(e);
                degree.push(k);
            }
            prefix.push(exponents.len());
            tuples = next;
        }
        let lookup: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();

        let mut mul = Vec::new();
        for i in 0..exponents.len() {
            let room = order - degree[i];
            for j in 0..prefix[room] {
                let sum: Vec<u8> = exponents[i]
                    .iter()
                    .zip(&exponents[j])
                    .map(|(a, b)| a + b)
                    .collect();
                mul.push((i as u32, j as u32, lookup[&sum] as u32));
            }
        }

        let mut raise = vec![vec![usize::MAX; exponents.len()]; n_vars];
        for (i, e) in exponents.iter().enumerate() {
            if degree[i] < order {
                for (v, row) in raise.iter_mut().enumerate() {
                    let mut r = e.clone();
                    r[v] += 1;
                    row[i] = lookup[&r];
                }
            }
        }

        let factorial = exponents
            .iter()
            .map(|e| e.iter().map(|&a| fact(a as usize)).product())
            .collect();

        JetSpace {
            n_vars,
            order,
            exponents,
            degree,
            lookup,
            mul,
            raise,
            factorial,
            prefix,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exponent vector of coefficient `i`.
    pub fn exponent(&self, i: usize) -> &[u8] {
        &self.exponents[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degree[i]
    }

    /// Index of a multi-index given as an exponent vector.
    pub fn index_of(&self, exponent: &[u8]) -> Option<usize> {
        self.lookup.get(exponent).copied()
    }

    /// Number of coefficients of total degree `≤ k`.
    pub fn prefix_len(&self, k: usize) -> usize {
        self.prefix[k.min(self.order)]
    }

    fn is_constant_space(&self) -> bool {
        self.n_vars == 0
    }
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// A truncated Taylor expansion of a scalar quantity.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    c: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Jet(n={}, k={}, {:?})",
            self.space.n_vars, self.space.order, self.c
        )
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.space.n_vars == other.space.n_vars
            && self.space.order == other.space.order
            && self.c == other.c
    }
}

impl Jet {
    /// A constant in the given space.
    pub fn constant(space: &Arc<JetSpace>, value: f64) -> Jet {
        let mut c = vec![0.0; space.len()];
        c[0] = value;
        Jet {
            space: space.clone(),
            c,
        }
    }

    /// Seed variable `var` at `value`.
    pub fn variable(space: &Arc<JetSpace>, var: usize, value: f64) -> Jet {
        assert!(var < space.n_vars, "variable {var} out of range");
        let mut j = Jet::constant(space, value);
        if space.order >= 1 {
            j.c[1 + var] = 1.0;
        }
        j
    }

    /// All `space.n_vars()` variables seeded at `point`.
    pub fn variables(space: &Arc<JetSpace>, point: &[f64]) -> Vec<Jet> {
        assert_eq!(point.len(), space.n_vars);
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(space, i, v))
            .collect()
    }

    /// A plain number carried as a zero-variable jet.
    pub fn scalar(value: f64) -> Jet {
        Jet {
            space: JetSpace::constants(),
            c: vec![value],
        }
    }

    /// Builds a jet from raw coefficients in the space's layout.
    pub fn from_coeffs(space: &Arc<JetSpace>, coeffs: Vec<f64>) -> Jet {
        assert_eq!(coeffs.len(), space.len());
        Jet {
            space: space.clone(),
            c: coeffs,
        }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    /// First partial derivative with respect to seed variable `var`.
    pub fn d(&self, var: usize) -> f64 {
        if self.space.order == 0 || self.space.is_constant_space() {
            0.0
        } else {
            self.c[1 + var]
        }
    }

    /// Gradient with respect to all seed variables.
    pub fn gradient(&self) -> Vec<f64> {
        (0..self.space.n_vars).map(|v| self.d(v)).collect()
    }

    /// Partial derivative `∂^α f` for the multi-index given as exponents.
    pub fn derivative(&self, exponent: &[u8]) -> f64 {
        match self.space.index_of(exponent) {
            Some(i) => self.c[i] * self.space.factorial[i],
            None => 0.0,
        }
    }

    /// Partial derivative `∂/∂var` as a jet of one lower order.
    pub fn partial(&self, var: usize) -> Jet {
        let s = &self.space;
        assert!(s.order >= 1, "cannot differentiate an order-0 jet");
        let lower = JetSpace::get(s.n_vars, s.order - 1);
        let c = (0..lower.len())
            .map(|i| {
                let r = s.raise[var][i];
                (s.exponents[r][var] as f64) * self.c[r]
            })
            .collect();
        Jet { space: lower, c }
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.space.order {
            return self.clone();
        }
        let lower = JetSpace::get(self.space.n_vars, order);
        let c = self.c[..lower.len()].to_vec();
        Jet { space: lower, c }
    }

    /// Promotes a zero-variable jet into `space`.
    pub fn promote(&self, space: &Arc<JetSpace>) -> Jet {
        if Arc::ptr_eq(&self.space, space) {
            return self.clone();
        }
        assert!(
            self.space.is_constant_space(),
            "cannot promote a jet between incompatible spaces"
        );
        Jet::constant(space, self.c[0])
    }

    fn compatible(&self, other: &Jet) -> bool {
        Arc::ptr_eq(&self.space, &other.space)
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: f64, other: &Jet) {
        if other.space.is_constant_space() {
            self.c[0] += s * other.c[0];
            return;
        }
        if self.space.is_constant_space() && !other.space.is_constant_space() {
            *self = self.promote(&other.space);
        }
        assert!(self.compatible(other), "jet space mismatch");
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            *a += s * b;
        }
    }

    /// `self += a * b`.
    pub fn add_product(&mut self, a: &Jet, b: &Jet) {
        let p = a * b;
        *self += &p;
    }

    fn mul_into(&self, other: &Jet) -> Jet {
        if other.space.is_constant_space() {
            return self * other.c[0];
        }
        if self.space.is_constant_space() {
            return other * self.c[0];
        }
        assert!(self.compatible(other), "jet space mismatch");
        let s = &self.space;
        let a = &self.c;
        let b = &other.c;
        let mut c = vec![0.0; a.len()];
        if s.order == 1 {
            c[0] = 0.0 + a[0] * b[0];
            for k in 1..a.len() {
                c[k] = 0.0 + a[0] * b[k] + a[k] * b[0];
            }
        } else {
            for &(i, j, k) in &s.mul {
                c[k as usize] += a[i as usize] * b[j as usize];
            }
        }
        Jet {
            space: s.clone(),
            c,
        }
    }

    /// Evaluates `Σ_k coeffs[k] (self - value)^k`, the Taylor composition of
    /// a univariate function whose scaled derivatives are `coeffs`.
    fn compose_univariate(&self, coeffs: &[f64]) -> Jet {
        let order = self.space.order;
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut r = Jet::constant(&self.space, coeffs[order]);
        for k in (0..order).rev() {
            r = &r * &h;
            r.c[0] += coeffs[k];
        }
        r
    }

    fn order(&self) -> usize {
        self.space.order
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let coeffs: Vec<f64> = (0..=self.order()).map(|k| e / fact(k)).collect();
        self.compose_univariate(&coeffs)
    }

    pub fn ln(&self) -> Result<Jet> {
        let x = self.value();
        if x <= 0.0 || !x.is_finite() {
            return Err(Error::Singular { op: "log", at: x });
        }
        let mut coeffs = vec![x.ln()];
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            coeffs.push(sign / (k as f64 * x.powi(k as i32)));
        }
        Ok(self.compose_univariate(&coeffs))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cyc = [s, c, -s, -c];
        let coeffs: Vec<f64> = (0..=self.order()).map(|k| cyc[k % 4] / fact(k)).collect();
        self.compose_univariate(&coeffs)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cyc = [c, -s, -c, s];
        let coeffs: Vec<f64> = (0..=self.order()).map(|k| cyc[k % 4] / fact(k)).collect();
        self.compose_univariate(&coeffs)
    }

    /// Real power `self^p`; requires a positive base unless the jet is a
    /// plain constant.
    pub fn powf(&self, p: f64) -> Result<Jet> {
        let x = self.value();
        if self.order() == 0 {
            let v = x.powf(p);
            if !v.is_finite() {
                return Err(Error::Singular { op: "pow", at: x });
            }
            return Ok(Jet::constant(&self.space, v));
        }
        if x <= 0.0 || !x.is_finite() {
            return Err(Error::Singular { op: "pow", at: x });
        }
        let mut coeffs = Vec::with_capacity(self.order() + 1);
        let mut falling = 1.0;
        for k in 0..=self.order() {
            coeffs.push(falling * x.powf(p - k as f64) / fact(k));
            falling *= p - k as f64;
        }
        Ok(self.compose_univariate(&coeffs))
    }

    /// Integer power; defined for any base.
    pub fn powi(&self, n: i32) -> Result<Jet> {
        let x = self.value();
        if n < 0 && x == 0.0 {
            return Err(Error::Singular { op: "pow", at: x });
        }
        let mut coeffs = Vec::with_capacity(self.order() + 1);
        let mut falling = 1.0;
        for k in 0..=self.order() {
            let e = n - k as i32;
            let term = if falling == 0.0 { 0.0 } else { falling * x.powi(e) };
            coeffs.push(term / fact(k));
            falling *= (n - k as i32) as f64;
        }
        Ok(self.compose_univariate(&coeffs))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let x = self.value();
        if self.order() == 0 && x == 0.0 {
            return Ok(Jet::constant(&self.space, 0.0));
        }
        if x <= 0.0 {
            return Err(Error::Singular { op: "sqrt", at: x });
        }
        self.powf(0.5)
    }

    pub fn recip(&self) -> Result<Jet> {
        let x = self.value();
        if x == 0.0 || !x.is_finite() {
            return Err(Error::Singular { op: "division", at: x });
        }
        let mut coeffs = Vec::with_capacity(self.order() + 1);
        let mut p = 1.0 / x;
        for k in 0..=self.order() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            coeffs.push(sign * p);
            p /= x;
        }
        Ok(self.compose_univariate(&coeffs))
    }

    /// `self / other`, failing when `other` vanishes.
    pub fn checked_div(&self, other: &Jet) -> Result<Jet> {
        if other.space.is_constant_space() || other.order() == 0 {
            let d = other.value();
            if d == 0.0 {
                return Err(Error::Singular { op: "division", at: d });
            }
            return Ok(self * (1.0 / d));
        }
        Ok(self * &other.recip()?)
    }

    pub fn square(&self) -> Jet {
        self * self
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a, b| {
    let mut r = a.clone();
    r += b;
    r
});
jet_binop!(Sub, sub, |a, b| {
    let mut r = a.clone();
    r -= b;
    r
});
jet_binop!(Mul, mul, |a, b| a.mul_into(b));

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        if rhs.space.is_constant_space() {
            self.c[0] += rhs.c[0];
            return;
        }
        if self.space.is_constant_space() {
            *self = self.promote(&rhs.space);
        }
        assert!(self.compatible(rhs), "jet space mismatch");
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a += b;
        }
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self += &rhs;
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        if rhs.space.is_constant_space() {
            self.c[0] -= rhs.c[0];
            return;
        }
        if self.space.is_constant_space() {
            *self = self.promote(&rhs.space);
        }
        assert!(self.compatible(rhs), "jet space mismatch");
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a -= b;
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            space: self.space.clone(),
            c: self.c.iter().map(|v| -v).collect(),
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut r = self.clone();
        r.c[0] += rhs;
        r
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self + (-rhs)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self + (-rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        Jet {
            space: self.space.clone(),
            c: self.c.iter().map(|v| v * rhs).collect(),
        }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for v in &mut self.c {
            *v *= rhs;
        }
        self
    }
}

impl Mul<&Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        rhs * self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Div<f64> for &Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

/// Sum of jets; `None` on empty input.
pub fn sum<'a>(items: impl IntoIterator<Item = &'a Jet>) -> Option<Jet> {
    let mut it = items.into_iter();
    let mut acc = it.next()?.clone();
    for j in it {
        acc += j;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_count_matches_binomial() {
        for n in 0..6 {
            for k in 0..=3 {
                let s = JetSpace::get(n, k);
                let expected = if n == 0 { 1 } else { multi_index_count(n, k) };
                assert_eq!(s.len(), expected, "n={n} k={k}");
            }
        }
        assert_eq!(multi_index_count(2, 3), 10);
        assert_eq!(multi_index_count(12, 2), 91);
    }

    #[test]
    fn first_partials_follow_value() {
        let s = JetSpace::get(3, 2);
        for v in 0..3 {
            let mut e = vec![0u8; 3];
            e[v] = 1;
            assert_eq!(s.index_of(&e), Some(1 + v));
        }
    }

    #[test]
    fn product_of_variables_has_unit_mixed_partial() {
        let s = JetSpace::get(2, 2);
        let x = Jet::variable(&s, 0, 1.5);
        let y = Jet::variable(&s, 1, -2.0);
        let p = &x * &y;
        assert_eq!(p.value(), -3.0);
        assert_eq!(p.derivative(&[1, 1]), 1.0);
        assert_eq!(p.derivative(&[2, 0]), 0.0);
        assert_eq!(p.d(0), -2.0);
        assert_eq!(p.d(1), 1.5);
    }

    #[test]
    fn exp_series_coefficients() {
        let s = JetSpace::get(1, 3);
        let x = Jet::variable(&s, 0, 0.0);
        let e = x.exp();
        assert_eq!(e.coeffs(), &[1.0, 1.0, 0.5, 1.0 / 6.0]);
    }

    #[test]
    fn ln_of_nonpositive_is_an_error() {
        let s = JetSpace::get(1, 2);
        let x = Jet::variable(&s, 0, 0.0);
        assert!(matches!(x.ln(), Err(Error::Singular { op: "log", .. })));
        assert!(x.sqrt().is_err());
        assert!(x.recip().is_err());
        assert!(Jet::scalar(1.0).checked_div(&x).is_err());
    }

    #[test]
    fn division_recovers_polynomial_quotient() {
        // (1 + 2x + x^2) / (1 + x) = 1 + x
        let s = JetSpace::get(1, 3);
        let x = Jet::variable(&s, 0, 0.0);
        let num = (&x * &x) + (&x * 2.0) + 1.0;
        let den = &x + 1.0;
        let q = num.checked_div(&den).unwrap();
        for (a, b) in q.coeffs().iter().zip([1.0, 1.0, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn partial_lowers_order() {
        let s = JetSpace::get(2, 3);
        let x = Jet::variable(&s, 0, 0.7);
        let y = Jet::variable(&s, 1, 0.2);
        let f = &(&x * &x) * &y; // x^2 y
        let fx = f.partial(0); // 2xy
        assert_eq!(fx.space().order(), 2);
        assert!((fx.value() - 2.0 * 0.7 * 0.2).abs() < 1e-15);
        assert!((fx.d(1) - 1.4).abs() < 1e-15);
        assert!((fx.derivative(&[1, 1]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn powi_handles_negative_base() {
        let s = JetSpace::get(1, 3);
        let x = Jet::variable(&s, 0, -2.0);
        let c = x.powi(3).unwrap();
        assert_eq!(c.value(), -8.0);
        assert_eq!(c.derivative(&[1]), 12.0);
        assert_eq!(c.derivative(&[2]), -12.0);
        assert_eq!(c.derivative(&[3]), 6.0);
    }

    #[test]
    fn constants_mix_with_any_space() {
        let s = JetSpace::get(2, 1);
        let x = Jet::variable(&s, 0, 3.0);
        let k = Jet::scalar(2.0);
        let r = &x * &k + &k;
        assert_eq!(r.value(), 8.0);
        assert_eq!(r.d(0), 2.0);
        let r2 = &k - &x;
        assert_eq!(r2.d(0), -1.0);
    }
}
