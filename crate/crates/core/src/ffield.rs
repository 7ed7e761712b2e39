//! Arithmetic in F_q for odd prime powers q = p^n.
//!
//! Elements are stored by their index in a fixed enumeration: the polynomial
//! basis coordinates `c_0 + c_1 t + ... + c_{n-1} t^{n-1}` map to
//! `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`. For n = 1 this is the residue itself.
//! Multiplication goes through discrete log/exp tables built from the smallest
//! generator, so every field in range costs O(q) memory.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Largest field order accepted by [`make_field`]; a single axis of a grid
/// can never exceed the default grid budget.
pub const MAX_FIELD_ORDER: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("even characteristic: p = {0} is not odd")]
    EvenCharacteristic(u64),
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("no built-in modulus for q = {0}; supply one explicitly")]
    MissingModulus(u64),
    #[error("modulus must be monic of degree {expected} with coefficients in [0, p)")]
    MalformedModulus { expected: u32 },
    #[error("modulus {0:?} is reducible over F_p")]
    ReducibleModulus(Vec<u32>),
    #[error("field order {0} exceeds the supported range")]
    UnsupportedOrder(u64),
    #[error("inversion of zero")]
    InverseOfZero,
    #[error("element index {0} out of range for this field")]
    OutOfRange(u32),
}

/// An element of F_q, stored as its enumeration index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a raw index. Callers are responsible for `index < q`;
    /// use [`FieldSpec::element`] for a checked constructor.
    pub const fn from_index(index: u32) -> Self {
        FieldElement(index)
    }

    pub const fn index(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Polynomial-basis coordinates, constant term first.
    pub fn coeffs(self, field: &FieldSpec) -> Vec<u32> {
        let p = field.p;
        let mut rest = self.0;
        (0..field.n)
            .map(|_| {
                let c = rest % p;
                rest /= p;
                c
            })
            .collect()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
    Pow(u64),
}

/// A validated finite field F_q with q = p^n, p odd.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: FieldElement,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
    eta: Vec<i8>,
    sqrt: Vec<Option<u32>>,
    roots: Vec<Complex64>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

/// Built-in irreducible moduli, little-endian and monic.
fn builtin_modulus(p: u32, n: u32) -> Option<Vec<u32>> {
    match (p, n) {
        (3, 2) => Some(vec![1, 0, 1]),       // t^2 + 1
        (5, 2) => Some(vec![2, 0, 1]),       // t^2 + 2
        (7, 2) => Some(vec![1, 0, 1]),       // t^2 + 1
        (3, 3) => Some(vec![1, 2, 0, 1]),    // t^3 + 2t + 1
        (3, 4) => Some(vec![2, 0, 0, 1, 1]), // t^4 + t^3 + 2
        _ => None,
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits q into (p, n) with q = p^n.
pub fn prime_power_decompose(q: u64) -> Result<(u64, u32), FieldError> {
    if q < 2 {
        return Err(FieldError::NotPrimePower(q));
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut n = 0;
    while rest % p == 0 {
        rest /= p;
        n += 1;
    }
    if rest != 1 {
        return Err(FieldError::NotPrimePower(q));
    }
    if p == 2 {
        return Err(FieldError::EvenCharacteristic(p));
    }
    Ok((p, n))
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `b` over F_p. Both little-endian.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    let p = p as u64;
    while r.len() > db {
        let lead = r.pop().unwrap() % p;
        if lead != 0 {
            let shift = r.len() - db;
            for (i, &bc) in b[..db].iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - lead * bc as u64 % p) % p;
            }
        }
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

/// Exhaustive trial division by every monic polynomial of degree 1..=n/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let n = modulus.len() - 1;
    for k in 1..=n / 2 {
        let count = (p as u64).pow(k as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(k + 1);
            let mut rest = code;
            for _ in 0..k {
                divisor.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            divisor.push(1);
            if poly_rem(modulus, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Builds and validates F_{p^n}. For n > 1 without a modulus, a built-in one is
/// used for q in {9, 25, 27, 49, 81}.
pub fn make_field(p: u64, n: u32, modulus: Option<&[u32]>) -> Result<FieldSpec, FieldError> {
    if p == 2 {
        return Err(FieldError::EvenCharacteristic(p));
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if n == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = (p as u128).checked_pow(n).unwrap_or(u128::MAX);
    if q > MAX_FIELD_ORDER as u128 {
        return Err(FieldError::UnsupportedOrder(q.min(u64::MAX as u128) as u64));
    }
    let (p, q) = (p as u32, q as u32);

    let modulus = match (n, modulus) {
        (1, None) => vec![0, 1],
        (_, Some(m)) => m.to_vec(),
        (_, None) => builtin_modulus(p, n).ok_or(FieldError::MissingModulus(q as u64))?,
    };
    if modulus.len() != n as usize + 1
        || modulus.last() != Some(&1)
        || modulus.iter().any(|&c| c >= p)
    {
        return Err(FieldError::MalformedModulus { expected: n });
    }
    if n > 1 && !is_irreducible(&modulus, p) {
        return Err(FieldError::ReducibleModulus(modulus));
    }

    let mut field = FieldSpec {
        p,
        n,
        q,
        modulus,
        generator: FieldElement::ZERO,
        exp: Vec::new(),
        log: Vec::new(),
        trace: Vec::new(),
        eta: Vec::new(),
        sqrt: Vec::new(),
        roots: (0..p)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64))
            .collect(),
    };
    field.build_tables();
    Ok(field)
}

/// Builds F_q from its order alone, using the built-in modulus table when q is
/// not prime.
pub fn field_of_order(q: u64) -> Result<FieldSpec, FieldError> {
    let (p, n) = prime_power_decompose(q)?;
    make_field(p, n, None)
}

impl FieldSpec {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn element(&self, index: u32) -> Result<FieldElement, FieldError> {
        if index < self.q {
            Ok(FieldElement(index))
        } else {
            Err(FieldError::OutOfRange(index))
        }
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.n as usize {
            return Err(FieldError::OutOfRange(u32::MAX));
        }
        let mut index = 0u32;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(FieldError::OutOfRange(c));
            }
            index = index * self.p + c;
        }
        Ok(FieldElement(index))
    }

    /// Embeds a signed integer through the prime subfield: -1 becomes p - 1.
    pub fn from_signed(&self, value: i64) -> FieldElement {
        FieldElement(value.rem_euclid(self.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.n == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.n {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.n == 1 {
            return FieldElement((self.p - a.0) % self.p);
        }
        let mut x = a.0;
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.n {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let order = self.q - 1;
        let e = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % order as u64;
        FieldElement(self.exp[e as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::InverseOfZero);
        }
        let order = self.q - 1;
        let e = (order - self.log[a.0 as usize]) % order;
        Ok(FieldElement(self.exp[e as usize]))
    }

    /// `a^e` with `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let order = (self.q - 1) as u64;
        let k = (self.log[a.0 as usize] as u64 * (e % order)) % order;
        FieldElement(self.exp[k as usize])
    }

    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Absolute trace to F_p, as a residue in [0, p).
    pub fn trace(&self, x: FieldElement) -> u32 {
        self.trace[x.0 as usize]
    }

    /// The canonical additive character `exp(2 pi i Tr(x) / p)`.
    pub fn character(&self, x: FieldElement) -> Complex64 {
        self.roots[self.trace[x.0 as usize] as usize]
    }

    /// `exp(2 pi i k / p)`.
    pub fn root_of_unity(&self, k: u32) -> Complex64 {
        self.roots[(k % self.p) as usize]
    }

    /// Quadratic character: 0 at 0, +1 on nonzero squares, -1 otherwise.
    pub fn eta(&self, x: FieldElement) -> i8 {
        self.eta[x.0 as usize]
    }

    pub fn is_square(&self, x: FieldElement) -> bool {
        self.eta[x.0 as usize] >= 0
    }

    /// The square root with the smaller index, if `x` is a square.
    pub fn sqrt(&self, x: FieldElement) -> Option<FieldElement> {
        self.sqrt[x.0 as usize].map(FieldElement)
    }

    /// `G_t = sum_{s != 0} eta(s) chi(t s)`.
    pub fn gauss_sum(&self, t: FieldElement) -> Complex64 {
        self.elements()
            .skip(1)
            .map(|s| self.character(self.mul(t, s)) * self.eta(s) as f64)
            .sum()
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        if self.n == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let ca = FieldElement(a).coeffs(self);
        let cb = FieldElement(b).coeffs(self);
        let mut prod = vec![0u32; 2 * self.n as usize - 1];
        for (i, &x) in ca.iter().enumerate() {
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % self.p as u64) as u32;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.n as usize, 0);
        let mut index = 0;
        for &c in r.iter().rev() {
            index = index * self.p + c;
        }
        index
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&mut self) {
        let q = self.q;
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let generator = (1..q)
            .find(|&g| factors.iter().all(|&l| self.slow_pow(g, order / l) != 1))
            .expect("a finite field has a generator");
        self.generator = FieldElement(generator);

        let mut exp = vec![0u32; q as usize - 1];
        let mut log = vec![0u32; q as usize];
        let mut acc = 1u32;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = acc;
            log[acc as usize] = k as u32;
            acc = self.slow_mul(acc, generator);
        }
        self.exp = exp;
        self.log = log;

        let mut eta = vec![-1i8; q as usize];
        let mut sqrt = vec![None; q as usize];
        eta[0] = 0;
        sqrt[0] = Some(0);
        for x in 1..q {
            let s = self.mul(FieldElement(x), FieldElement(x)).0 as usize;
            eta[s] = 1;
            if sqrt[s].is_none() {
                sqrt[s] = Some(x);
            }
        }
        self.eta = eta;
        self.sqrt = sqrt;

        let trace = (0..q)
            .map(|x| {
                let mut sum = FieldElement::ZERO;
                let mut frob = FieldElement(x);
                for _ in 0..self.n {
                    sum = self.add(sum, frob);
                    frob = self.pow(frob, self.p as u64);
                }
                debug_assert!(sum.0 < self.p, "trace must land in the prime field");
                sum.0
            })
            .collect();
        self.trace = trace;
    }
}

/// Dispatches a single arithmetic operation; `b` is ignored for unary ops.
pub fn field_arith(
    field: &FieldSpec,
    a: FieldElement,
    b: FieldElement,
    op: ArithOp,
) -> Result<FieldElement, FieldError> {
    for x in [a, b] {
        field.element(x.index())?;
    }
    Ok(match op {
        ArithOp::Add => field.add(a, b),
        ArithOp::Sub => field.sub(a, b),
        ArithOp::Mul => field.mul(a, b),
        ArithOp::Inv => field.inv(a)?,
        ArithOp::Neg => field.neg(a),
        ArithOp::Pow(e) => field.pow(a, e),
    })
}
