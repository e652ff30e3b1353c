//! Exact arithmetic in the cyclotomic field Q(ζ_L).
//!
//! A [`CyclotomicContext`] fixes the order `L` and the modulus Φ_L. Every
//! [`Scalar`] is a residue class of a rational polynomial modulo Φ_L, stored
//! in canonical form (degree below φ(L)). All structure constants of the
//! quantum groups built by this crate live in one such field.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Divisors of `n` in increasing order.
pub(crate) fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// Exact division of integer polynomials (low degree first); the divisor must be monic.
fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem: Vec<i128> = num.iter().map(|&c| c as i128).collect();
    let dd = den.len() - 1;
    assert_eq!(den[dd], 1, "divisor must be monic");
    let qlen = num.len() - dd;
    let mut quot = vec![0i128; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[k + j] -= c * d as i128;
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "division is not exact");
    quot.into_iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
        .collect()
}

/// The n-th cyclotomic polynomial Φ_n, coefficients from the constant term up.
///
/// Computed by dividing x^n − 1 by Φ_d for every proper divisor d of n.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    assert!(n > 0, "cyclotomic_polynomial: n must be positive");
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in divisors(n) {
        if d < n {
            poly = exact_div(&poly, &cyclotomic_polynomial(d));
        }
    }
    poly
}

/// The field Q(ζ_L) presented as Q[x]/(Φ_L).
pub struct CyclotomicContext {
    order: u64,
    modulus: Vec<i64>,
    degree: usize,
    /// `roots[k]` = canonical coefficients of ζ^k, 0 ≤ k < L.
    roots: Vec<Vec<BigRational>>,
}

impl fmt::Debug for CyclotomicContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CyclotomicContext")
            .field("order", &self.order)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for CyclotomicContext {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
    }
}

impl Eq for CyclotomicContext {}

impl CyclotomicContext {
    pub fn new(order: u64) -> Result<Arc<Self>> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "root-of-unity order must be positive".into(),
            ));
        }
        let modulus = cyclotomic_polynomial(order);
        let degree = modulus.len() - 1;
        let mut ctx = CyclotomicContext {
            order,
            modulus,
            degree,
            roots: Vec::with_capacity(order as usize),
        };
        let mut cur = vec![BigRational::zero(); degree];
        cur[0] = BigRational::one();
        for _ in 0..order {
            ctx.roots.push(cur.clone());
            // multiply by x and reduce
            let mut next = vec![BigRational::zero(); degree + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] = c.clone();
            }
            ctx.reduce_in_place(&mut next);
            next.truncate(degree);
            cur = next;
        }
        Ok(Arc::new(ctx))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Φ_L, constant term first.
    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    /// φ(L), the number of stored coefficients per scalar.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Reduce a coefficient vector of arbitrary length modulo Φ_L (length ≥ degree on return).
    fn reduce_in_place(&self, coeffs: &mut Vec<BigRational>) {
        let d = self.degree;
        if coeffs.len() < d {
            coeffs.resize(d, BigRational::zero());
            return;
        }
        for k in (d..coeffs.len()).rev() {
            if coeffs[k].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut coeffs[k]);
            for (j, &m) in self.modulus[..d].iter().enumerate() {
                if m != 0 {
                    coeffs[k - d + j] -= &c * BigInt::from(m);
                }
            }
        }
        coeffs.truncate(d);
    }
}

/// An element of Q(ζ_L).
#[derive(Clone)]
pub struct Scalar {
    ctx: Arc<CyclotomicContext>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.order == other.ctx.order && self.coeffs == other.coeffs
    }
}

impl Eq for Scalar {}

impl std::hash::Hash for Scalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ctx.order.hash(state);
        self.coeffs.hash(state);
    }
}

impl Scalar {
    pub fn zero(ctx: &Arc<CyclotomicContext>) -> Self {
        Scalar {
            ctx: ctx.clone(),
            coeffs: vec![BigRational::zero(); ctx.degree],
        }
    }

    pub fn one(ctx: &Arc<CyclotomicContext>) -> Self {
        Self::from_integer(ctx, 1)
    }

    pub fn from_integer(ctx: &Arc<CyclotomicContext>, n: i64) -> Self {
        Self::from_rational(ctx, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(ctx: &Arc<CyclotomicContext>, q: BigRational) -> Self {
        let mut s = Self::zero(ctx);
        s.coeffs[0] = q;
        s
    }

    /// Build from coefficients of an arbitrary-degree polynomial in ζ; reduced on entry.
    pub fn from_coeffs(ctx: &Arc<CyclotomicContext>, coeffs: Vec<BigRational>) -> Self {
        let mut coeffs = coeffs;
        ctx.reduce_in_place(&mut coeffs);
        Scalar {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    /// ζ_L^k with `k` taken modulo L.
    pub fn root_of_unity(ctx: &Arc<CyclotomicContext>, k: i64) -> Self {
        let idx = k.rem_euclid(ctx.order as i64) as usize;
        Scalar {
            ctx: ctx.clone(),
            coeffs: ctx.roots[idx].clone(),
        }
    }

    pub fn context(&self) -> &Arc<CyclotomicContext> {
        &self.ctx
    }

    /// Canonical coefficients (length φ(L)), constant term first.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn check_ctx(&self, other: &Scalar) -> Result<()> {
        if self.ctx.order != other.ctx.order {
            return Err(Error::ContextMismatch {
                left: self.ctx.order,
                right: other.ctx.order,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_ctx(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.check_ctx(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Scalar {
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check_ctx(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Scalar) -> Scalar {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Scalar {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    fn mul_unchecked(&self, other: &Scalar) -> Scalar {
        let d = self.ctx.degree;
        // fast paths: rational times anything
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            return other.scale(&self.coeffs[0]);
        }
        if other.coeffs[1..].iter().all(Zero::is_zero) {
            return self.scale(&other.coeffs[0]);
        }
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        self.ctx.reduce_in_place(&mut prod);
        Scalar {
            ctx: self.ctx.clone(),
            coeffs: prod,
        }
    }

    /// Multiply by a rational number.
    pub fn scale(&self, q: &BigRational) -> Scalar {
        if q.is_zero() {
            return Scalar::zero(&self.ctx);
        }
        Scalar {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// Integer power; negative exponents invert first.
    pub fn powi(&self, e: i64) -> Result<Scalar> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.invert()?.pow(e.unsigned_abs()))
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Φ_L.
    pub fn invert(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            let mut s = Scalar::zero(&self.ctx);
            s.coeffs[0] = self.coeffs[0].recip();
            return Ok(s);
        }
        let modulus: Vec<BigRational> = self
            .ctx
            .modulus
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        // invariant: t0 * a ≡ r0, t1 * a ≡ r1 (mod Φ)
        let mut r0 = modulus;
        let mut r1 = trim(self.coeffs.clone());
        let mut t0: Vec<BigRational> = Vec::new();
        let mut t1: Vec<BigRational> = vec![BigRational::one()];
        while !(r1.len() == 1) {
            let (q, r) = poly_divmod(&r0, &r1);
            let t2 = poly_sub(&t0, &poly_mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t2);
            if r1.is_empty() {
                // gcd is non-constant: impossible for irreducible Φ and nonzero a
                return Err(Error::DivisionByZero);
            }
        }
        let c = r1[0].recip();
        let inv: Vec<BigRational> = t1.iter().map(|x| x * &c).collect();
        Ok(Scalar::from_coeffs(&self.ctx, inv))
    }

    /// Least m ≥ 1 with self^m = 1, searched up to L.
    pub fn multiplicative_order(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::NotRootOfUnity);
        }
        let mut acc = self.clone();
        for m in 1..=self.ctx.order {
            if acc.is_one() {
                return Ok(m);
            }
            acc = acc.mul_unchecked(self);
        }
        Err(Error::NotRootOfUnity)
    }

    /// If this scalar is ζ^k for some k, return k in [0, L).
    pub fn as_root_exponent(&self) -> Option<u64> {
        self.ctx
            .roots
            .iter()
            .position(|r| *r == self.coeffs)
            .map(|k| k as u64)
    }

    /// Canonical text form: coefficient strings "p/q" (or "p") constant term first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational_to_string).collect()
    }

    pub fn from_strings(ctx: &Arc<CyclotomicContext>, parts: &[String]) -> Result<Scalar> {
        if parts.len() != ctx.degree {
            return Err(Error::Parse(format!(
                "expected {} coefficients, found {}",
                ctx.degree,
                parts.len()
            )));
        }
        let coeffs = parts
            .iter()
            .map(|p| parse_rational(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Scalar {
            ctx: ctx.clone(),
            coeffs,
        })
    }
}

pub(crate) fn rational_to_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    let out = (0..n)
        .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
        .collect();
    trim(out)
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = trim(a.to_vec());
    let db = b.len() - 1;
    let lead = &b[db];
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    while rem.len() >= b.len() {
        let k = rem.len() - 1 - db;
        let c = rem.last().unwrap() / lead;
        for (j, y) in b.iter().enumerate() {
            rem[k + j] -= &c * y;
        }
        quot[k] = c;
        rem = trim(rem);
    }
    (trim(quot), rem)
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mag = rational_to_string(&abs);
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

// Operator impls panic on context mismatch; use the `try_*` methods to get an error instead.

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar context mismatch")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar context mismatch")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar context mismatch")
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(mut self) -> Scalar {
        for c in &mut self.coeffs {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        assert_eq!(self.ctx.order, rhs.ctx.order, "scalar context mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        assert_eq!(self.ctx.order, rhs.ctx.order, "scalar context mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(l: u64) -> Arc<CyclotomicContext> {
        CyclotomicContext::new(l).unwrap()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(5), vec![1, 1, 1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
    }

    #[test]
    fn modulus_is_monic_of_totient_degree_and_divides() {
        for n in 1..=30u64 {
            let p = cyclotomic_polynomial(n);
            assert_eq!(p.len() as u64 - 1, totient(n));
            assert_eq!(*p.last().unwrap(), 1);
            let mut xn = vec![0i64; n as usize + 1];
            xn[0] = -1;
            xn[n as usize] = 1;
            exact_div(&xn, &p);
        }
    }

    #[test]
    fn roots_of_unity() {
        let c4 = ctx(4);
        assert_eq!(
            Scalar::root_of_unity(&c4, 2),
            Scalar::from_integer(&c4, -1)
        );
        let c6 = ctx(6);
        assert!(Scalar::root_of_unity(&c6, 0).is_one());
        assert_eq!(
            Scalar::root_of_unity(&c6, 3),
            Scalar::from_integer(&c6, -1)
        );
        assert_eq!(Scalar::root_of_unity(&c6, -1), Scalar::root_of_unity(&c6, 5));
    }

    #[test]
    fn arithmetic_examples() {
        let c4 = ctx(4);
        let one = Scalar::one(&c4);
        let z = Scalar::root_of_unity(&c4, 1);
        assert_eq!(&(&one + &z) * &(&one - &z), Scalar::from_integer(&c4, 2));
        assert_eq!(&z + &Scalar::zero(&c4), z);
        let c6 = ctx(6);
        let z6 = Scalar::root_of_unity(&c6, 1);
        assert!((&z6 * &Scalar::root_of_unity(&c6, 5)).is_one());
    }

    #[test]
    fn inverses() {
        let c6 = ctx(6);
        let two = Scalar::from_integer(&c6, 2);
        assert_eq!(
            two.invert().unwrap(),
            Scalar::from_rational(&c6, BigRational::new(1.into(), 2.into()))
        );
        let z = Scalar::root_of_unity(&c6, 1);
        assert_eq!(z.invert().unwrap(), Scalar::root_of_unity(&c6, 5));
        let a = &Scalar::one(&c6) - &z;
        let u = a.invert().unwrap();
        assert!((&a * &u).is_one());
        assert!(matches!(
            Scalar::zero(&c6).invert(),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn orders() {
        let c8 = ctx(8);
        assert_eq!(Scalar::root_of_unity(&c8, 2).multiplicative_order().unwrap(), 4);
        assert_eq!(Scalar::one(&c8).multiplicative_order().unwrap(), 1);
        let c6 = ctx(6);
        assert_eq!(Scalar::root_of_unity(&c6, 4).multiplicative_order().unwrap(), 3);
        assert!(matches!(
            Scalar::from_integer(&c6, 2).multiplicative_order(),
            Err(Error::NotRootOfUnity)
        ));
    }

    #[test]
    fn context_mismatch_is_reported() {
        let a = Scalar::one(&ctx(4));
        let b = Scalar::one(&ctx(6));
        assert!(matches!(a.try_add(&b), Err(Error::ContextMismatch { .. })));
    }

    #[test]
    fn order_matches_gcd_rule_brute_force() {
        for l in 1..=24u64 {
            let c = ctx(l);
            for k in 1..l {
                let expected = l / k.gcd(&l);
                // brute force: smallest m with k*m ≡ 0 mod l
                let brute = (1..=l).find(|m| (k * m) % l == 0).unwrap();
                assert_eq!(expected, brute);
                assert_eq!(
                    Scalar::root_of_unity(&c, k as i64)
                        .multiplicative_order()
                        .unwrap(),
                    expected,
                    "L={l} k={k}"
                );
            }
        }
    }

    #[test]
    fn reciprocal_roots() {
        for l in [2u64, 3, 4, 5, 6, 7, 8, 12] {
            let c = ctx(l);
            for k in 0..l as i64 {
                let p = &Scalar::root_of_unity(&c, k) * &Scalar::root_of_unity(&c, l as i64 - k);
                assert!(p.is_one());
            }
        }
    }

    #[test]
    fn string_round_trip() {
        let c = ctx(6);
        let a = &Scalar::from_rational(&c, BigRational::new(3.into(), 7.into()))
            - &Scalar::root_of_unity(&c, 1);
        let back = Scalar::from_strings(&c, &a.to_strings()).unwrap();
        assert_eq!(a, back);
    }
}
