//! Exact arithmetic in the cyclotomic field Q(z), z a primitive 2n-th root of unity.
//!
//! Elements are residues modulo the 2n-th cyclotomic polynomial, stored as
//! integer coefficient vectors of length deg(Phi) over a common denominator.
//! Fixed conventions: `zeta = z^2` (order n) and `q = z^(2n-1) = z^-1`, so
//! that `q^-2 = zeta`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CycError {
    #[error("invalid Taft order {0}: need n >= 2")]
    InvalidOrder(i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("scalars from different fields (n = {0} vs n = {1})")]
    FieldMismatch(u32, u32),
}

/// Shared description of Q(z) for a fixed Taft order n.
#[derive(Debug, PartialEq, Eq)]
pub struct CycContext {
    n: u32,
    /// Monic Phi_{2n}, ascending coefficients.
    phi: Vec<i64>,
}

pub type Ctx = Arc<CycContext>;

impl CycContext {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Root order N = 2n.
    pub fn root_order(&self) -> u32 {
        2 * self.n
    }

    pub fn phi(&self) -> &[i64] {
        &self.phi
    }

    /// Degree of Phi, i.e. the dimension of the field over Q.
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }
}

pub fn make_context(n: i64) -> Result<Ctx, CycError> {
    if n < 2 || n > 10_000 {
        return Err(CycError::InvalidOrder(n));
    }
    let n = n as u32;
    Ok(Arc::new(CycContext {
        n,
        phi: cyclotomic_poly((2 * n) as usize),
    }))
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

// Exact division of integer polynomials by a monic divisor.
fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qlen = rem.len() - dn;
    let mut quot = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn];
        quot[k] = c;
        for (i, &d) in den.iter().enumerate() {
            rem[k + i] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// The m-th cyclotomic polynomial, ascending integer coefficients.
pub fn cyclotomic_poly(m: usize) -> Vec<i64> {
    assert!(m > 0);
    let mut p = vec![0i64; m + 1];
    p[0] = -1;
    p[m] = 1;
    for d in divisors(m) {
        if d < m {
            p = exact_div_monic(&p, &cyclotomic_poly(d));
        }
    }
    p
}

/// Element of Q(z) in canonical reduced form.
///
/// Stored as integer numerators over one positive denominator, with the
/// content of the numerators coprime to the denominator. Zero is `0/1`.
#[derive(Clone)]
pub struct CycScalar {
    ctx: Ctx,
    num: Vec<BigInt>,
    den: BigInt,
}

impl PartialEq for CycScalar {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.n == other.ctx.n && self.den == other.den && self.num == other.num
    }
}

impl Eq for CycScalar {}

impl PartialOrd for CycScalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CycScalar {
    /// Lexicographic on the rational coefficients; only meant for deterministic sorting.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.num.iter().zip(&other.num) {
            let o = (a * &other.den).cmp(&(b * &self.den));
            if o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        self.num.len().cmp(&other.num.len())
    }
}

impl Hash for CycScalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.n.hash(state);
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

type Poly = Vec<BigRational>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

// Long division over Q; returns (quotient, remainder).
fn poly_divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut r = a.clone();
    trim(&mut r);
    let mut b = b.clone();
    trim(&mut b);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            let t = &c * bi;
            r[k + i] -= t;
        }
        q[k] = c;
        r.pop();
        trim(&mut r);
    }
    (q, r)
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

impl CycScalar {
    /// Reduce an integer polynomial modulo the monic Phi and normalize.
    fn from_int_poly(ctx: &Ctx, mut poly: Vec<BigInt>, den: BigInt) -> Self {
        let d = ctx.degree();
        while poly.len() > d {
            let top = poly.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let k = poly.len() - d;
            for (i, &p) in ctx.phi[..d].iter().enumerate() {
                match p {
                    0 => {}
                    1 => poly[k + i] -= &top,
                    -1 => poly[k + i] += &top,
                    _ => poly[k + i] -= &top * p,
                }
            }
        }
        poly.resize(d, BigInt::zero());
        Self::normalized(ctx, poly, den)
    }

    fn normalized(ctx: &Ctx, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if num.iter().all(Zero::is_zero) {
            return Self::zero(ctx);
        }
        if den.is_negative() {
            den = -den;
            num.iter_mut().for_each(|x| *x = -&*x);
        }
        if !den.is_one() {
            let mut g = den.clone();
            for x in &num {
                if g.is_one() {
                    break;
                }
                if !x.is_zero() {
                    g = g.gcd(x);
                }
            }
            if !g.is_one() {
                num.iter_mut().for_each(|x| *x = &*x / &g);
                den = &den / &g;
            }
        }
        CycScalar {
            ctx: ctx.clone(),
            num,
            den,
        }
    }

    fn raw(ctx: &Ctx, poly: Poly) -> Self {
        let den = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = poly.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Self::from_int_poly(ctx, num, den)
    }

    fn rational_coeffs(&self) -> Poly {
        self.num
            .iter()
            .map(|x| BigRational::new(x.clone(), self.den.clone()))
            .collect()
    }

    pub fn zero(ctx: &Ctx) -> Self {
        CycScalar {
            ctx: ctx.clone(),
            num: vec![BigInt::zero(); ctx.degree()],
            den: BigInt::one(),
        }
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Ctx, v: i64) -> Self {
        let mut s = Self::zero(ctx);
        s.num[0] = BigInt::from(v);
        s
    }

    pub fn from_ratio(ctx: &Ctx, num: i64, den: i64) -> Self {
        Self::from_rational(ctx, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(ctx: &Ctx, v: BigRational) -> Self {
        let mut s = Self::zero(ctx);
        if !v.is_zero() {
            s.num[0] = v.numer().clone();
            s.den = v.denom().clone();
        }
        s
    }

    /// Build from ascending coefficients of a polynomial in z (any length).
    pub fn from_coeffs(ctx: &Ctx, coeffs: Vec<BigRational>) -> Self {
        Self::raw(ctx, coeffs)
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// Canonical coefficient vector (length deg Phi).
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.rational_coeffs()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    pub fn try_inv(&self) -> Result<Self, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Self::normalized(
                &self.ctx,
                {
                    let mut v = vec![BigInt::zero(); self.num.len()];
                    v[0] = self.den.clone();
                    v
                },
                self.num[0].clone(),
            ));
        }
        // extended Euclid: find s with s*a = 1 mod Phi
        let phi: Poly = self
            .ctx
            .phi
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        let mut a = self.rational_coeffs();
        trim(&mut a);
        let (mut r0, mut r1) = (phi, a);
        let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = poly_divmod(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r1 is a nonzero constant since Phi is irreducible
        let c = r1[0].clone();
        let inv: Poly = s1.into_iter().map(|x| x / &c).collect();
        Ok(Self::raw(&self.ctx, inv))
    }

    pub fn inv(&self) -> Self {
        self.try_inv().expect("inverse of zero")
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, CycError> {
        Ok(self * &other.try_inv()?)
    }

    pub fn pow(&self, e: i64) -> Self {
        self.try_pow(e).expect("negative power of zero")
    }

    pub fn try_pow(&self, e: i64) -> Result<Self, CycError> {
        let mut base = if e < 0 { self.try_inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one(&self.ctx);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    fn check(&self, other: &Self) {
        assert!(
            self.ctx.n == other.ctx.n,
            "{}",
            CycError::FieldMismatch(self.ctx.n, other.ctx.n)
        );
    }

    fn add_signed(&self, other: &Self, negate: bool) -> Self {
        let combine = |x: &BigInt, y: &BigInt| if negate { x - y } else { x + y };
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(x, y)| combine(x, y)).collect();
            return Self::normalized(&self.ctx, num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(x, y)| combine(&(x * &other.den), &(y * &self.den)))
            .collect();
        Self::normalized(&self.ctx, num, &self.den * &other.den)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.ctx);
        }
        let den = &self.den * &other.den;
        if self.is_rational() {
            let r = &self.num[0];
            return Self::normalized(&self.ctx, other.num.iter().map(|y| r * y).collect(), den);
        }
        if other.is_rational() {
            let r = &other.num[0];
            return Self::normalized(&self.ctx, self.num.iter().map(|x| x * r).collect(), den);
        }
        let mut out = vec![BigInt::zero(); self.num.len() + other.num.len() - 1];
        for (i, x) in self.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.num.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        Self::from_int_poly(&self.ctx, out, den)
    }
}

/// z^k, k reduced mod 2n.
pub fn root_power(ctx: &Ctx, k: i64) -> CycScalar {
    let big_n = ctx.root_order() as i64;
    let k = k.rem_euclid(big_n) as usize;
    let mut p = vec![BigRational::zero(); k + 1];
    p[k] = BigRational::one();
    CycScalar::raw(ctx, p)
}

/// zeta = z^2, a primitive n-th root of unity.
pub fn zeta(ctx: &Ctx) -> CycScalar {
    root_power(ctx, 2)
}

/// q = z^(2n-1), a primitive 2n-th root of unity with q^-2 = zeta.
pub fn q(ctx: &Ctx) -> CycScalar {
    root_power(ctx, 2 * ctx.n as i64 - 1)
}

/// zeta^k.
pub fn zeta_pow(ctx: &Ctx, k: i64) -> CycScalar {
    root_power(ctx, 2 * k)
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&CycScalar> for &CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: &CycScalar) -> CycScalar {
                self.check(rhs);
                $body(self, rhs)
            }
        }
        impl $tr<CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: CycScalar) -> CycScalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: &CycScalar) -> CycScalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<CycScalar> for &CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: CycScalar) -> CycScalar {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a: &CycScalar, b: &CycScalar| a.add_signed(b, false));
binop!(Sub, sub, |a: &CycScalar, b: &CycScalar| a.add_signed(b, true));
binop!(Mul, mul, |a: &CycScalar, b: &CycScalar| a.mul_impl(b));
binop!(Div, div, |a: &CycScalar, b: &CycScalar| a * &b.inv());

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        CycScalar {
            ctx: self.ctx.clone(),
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        -&self
    }
}

impl AddAssign<&CycScalar> for CycScalar {
    fn add_assign(&mut self, rhs: &CycScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&CycScalar> for CycScalar {
    fn sub_assign(&mut self, rhs: &CycScalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&CycScalar> for CycScalar {
    fn mul_assign(&mut self, rhs: &CycScalar) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CycScalar {
    /// Ascending powers, e.g. `1/2 + z - 3*z^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.rational_coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            if k == 0 {
                write!(f, "{}", fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_rational(&a))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

pub fn format_scalar(s: &CycScalar) -> String {
    s.to_string()
}

/// Parse an expression over rationals and `z` with `+ - * / ^ ( )`.
pub fn parse_scalar(ctx: &Ctx, text: &str) -> Result<CycScalar, CycError> {
    let mut p = Parser {
        ctx,
        s: text.as_bytes(),
        pos: 0,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos < p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    ctx: &'a Ctx,
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> CycError {
        CycError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<CycScalar, CycError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<CycScalar, CycError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' {
                acc * rhs
            } else {
                acc.try_div(&rhs)?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<CycScalar, CycError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<CycScalar, CycError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            let e: i64 = digits
                .parse()
                .map_err(|_| CycError::Syntax {
                    pos: start,
                    msg: "expected integer exponent".into(),
                })?;
            return base.try_pow(if neg { -e } else { e });
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<CycScalar, CycError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(root_power(self.ctx, 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits();
                let v: BigInt = d.parse().map_err(|_| self.err("bad integer"))?;
                Ok(CycScalar::from_rational(self.ctx, BigRational::from_integer(v)))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Smallest k > 0 with s^k = 1, if any k <= limit.
pub fn multiplicative_order(s: &CycScalar, limit: u32) -> Option<u32> {
    let mut acc = s.clone();
    for k in 1..=limit {
        if acc.is_one() {
            return Some(k);
        }
        acc = &acc * s;
    }
    None
}

/// Rough size used to bias random searches toward small entries.
pub fn height(s: &CycScalar) -> u64 {
    s.rational_coeffs()
        .iter()
        .map(|c| {
            let bits = c.numer().bits() + c.denom().bits();
            bits.to_u64().unwrap_or(u64::MAX)
        })
        .sum()
}
