//! Arithmetic in the Galois ring A/p^N, the finite-precision model of the
//! unramified coefficient ring A with residue field F_q, q = p^d.
//!
//! Elements are stored as `d` integers in `[0, p^N)`, the coordinates in the
//! power basis `1, x, ..., x^(d-1)` of a root `x` of the defining polynomial
//! `h`. Since the extension is unramified, `p^v` divides an element exactly
//! when it divides every coordinate.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::ring::CommRing;

/// Largest admissible modulus p^N. Sums of two residues stay below 2^63 and
/// products are formed in `u128`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// A residue class of A/p^N.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoeffElem(SmallVec<[u64; 2]>);

impl CoeffElem {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

/// Parameters of the coefficient ring: the prime, the residue degree, the
/// precision exponent and the defining polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingConfig {
    p: u64,
    d: usize,
    nprec: u32,
    /// Monic, low-to-high, length d + 1, reduced mod p^N.
    h: Vec<u64>,
    modulus: u64,
    /// p^k for k = 0..=N (the last entry is the modulus itself).
    powers: Vec<u64>,
}

/// Serialized form `{p, d, Nprec, h}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub p: u64,
    pub d: usize,
    #[serde(rename = "Nprec")]
    pub nprec: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<u64>>,
}

/// Selector for [`RingConfig::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

impl RingConfig {
    /// Builds the ring A/p^N of residue degree `d`. When `h` is `None` the
    /// first monic irreducible polynomial of degree `d` over F_p (ordered by
    /// its coefficients read as a base-p number) is used; for `d = 1` that is `x`.
    pub fn new(p: u64, d: usize, nprec: u32, h: Option<Vec<u64>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidConfig(format!("{p} is not prime")));
        }
        if d == 0 {
            return Err(Error::InvalidConfig(
                "residue degree must be at least 1".into(),
            ));
        }
        if nprec == 0 {
            return Err(Error::InvalidConfig(
                "precision exponent must be at least 1".into(),
            ));
        }
        let mut powers = vec![1u64];
        for _ in 0..nprec {
            let next = powers
                .last()
                .unwrap()
                .checked_mul(p)
                .filter(|&m| m <= MAX_MODULUS);
            match next {
                Some(m) => powers.push(m),
                None => {
                    return Err(Error::InvalidConfig(format!(
                        "modulus {p}^{nprec} exceeds 2^62"
                    )))
                }
            }
        }
        let modulus = powers[nprec as usize];
        let h = match h {
            Some(h) => {
                if h.len() != d + 1 || h[d] != 1 {
                    return Err(Error::InvalidConfig(format!(
                        "defining polynomial must be monic of degree {d}"
                    )));
                }
                let reduced: Vec<u64> = h.iter().map(|c| c % p).collect();
                if !fp_irreducible(&reduced, p) {
                    return Err(Error::InvalidConfig(format!(
                        "defining polynomial {h:?} is reducible mod {p}"
                    )));
                }
                h.iter().map(|c| c % modulus).collect()
            }
            None => default_modulus(p, d)?,
        };
        Ok(Self {
            p,
            d,
            nprec,
            h,
            modulus,
            powers,
        })
    }

    pub fn from_spec(spec: &RingSpec) -> Result<Self> {
        Self::new(spec.p, spec.d, spec.nprec, spec.h.clone())
    }

    pub fn spec(&self) -> RingSpec {
        RingSpec {
            p: self.p,
            d: self.d,
            nprec: self.nprec,
            h: Some(self.h.clone()),
        }
    }

    /// Same ring at a different precision, with the same defining polynomial.
    pub fn with_precision(&self, nprec: u32) -> Result<Self> {
        Self::new(self.p, self.d, nprec, Some(self.h.clone()))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nprec(&self) -> u32 {
        self.nprec
    }

    pub fn h(&self) -> &[u64] {
        &self.h
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// log_p of the residue field size.
    pub fn q_log(&self) -> u32 {
        self.d as u32
    }

    /// Number of elements of A/p^N, if it fits in a `u64`.
    pub fn size(&self) -> Option<u64> {
        self.modulus.checked_pow(self.d as u32)
    }

    pub fn zero(&self) -> CoeffElem {
        CoeffElem(SmallVec::from_elem(0, self.d))
    }

    pub fn one(&self) -> CoeffElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> CoeffElem {
        let mut c = self.zero();
        c.0[0] = n.rem_euclid(self.modulus as i64) as u64;
        c
    }

    /// Element with the given power-basis coordinates (reduced mod p^N).
    pub fn from_coords(&self, coords: &[u64]) -> Result<CoeffElem> {
        if coords.len() != self.d {
            return Err(Error::ConfigMismatch(format!(
                "expected {} coordinates, got {}",
                self.d,
                coords.len()
            )));
        }
        Ok(CoeffElem(coords.iter().map(|c| c % self.modulus).collect()))
    }

    /// The class of the root x of h (requires d >= 2; for d = 1 this is -h_0).
    pub fn generator(&self) -> CoeffElem {
        if self.d == 1 {
            return self.from_int(-(self.h[0] as i64));
        }
        let mut c = self.zero();
        c.0[1] = 1;
        c
    }

    /// Checks that `x` has the shape and range of an element of this ring.
    pub fn check(&self, x: &CoeffElem) -> Result<()> {
        if x.0.len() != self.d || x.0.iter().any(|&c| c >= self.modulus) {
            return Err(Error::ConfigMismatch(format!(
                "{:?} is not an element of GR({}^{}, {})",
                x.0, self.p, self.nprec, self.d
            )));
        }
        Ok(())
    }

    /// p^k, which is zero once k >= N.
    pub fn p_pow(&self, k: u32) -> CoeffElem {
        if k >= self.nprec {
            self.zero()
        } else {
            self.from_int(self.powers[k as usize] as i64)
        }
    }

    pub fn is_zero(&self, x: &CoeffElem) -> bool {
        x.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, x: &CoeffElem, y: &CoeffElem) -> CoeffElem {
        let m = self.modulus;
        CoeffElem(
            x.0.iter()
                .zip(&y.0)
                .map(|(&a, &b)| {
                    let s = a + b;
                    if s >= m {
                        s - m
                    } else {
                        s
                    }
                })
                .collect(),
        )
    }

    pub fn sub(&self, x: &CoeffElem, y: &CoeffElem) -> CoeffElem {
        let m = self.modulus;
        CoeffElem(
            x.0.iter()
                .zip(&y.0)
                .map(|(&a, &b)| if a >= b { a - b } else { a + m - b })
                .collect(),
        )
    }

    pub fn neg(&self, x: &CoeffElem) -> CoeffElem {
        let m = self.modulus;
        CoeffElem(
            x.0.iter()
                .map(|&a| if a == 0 { 0 } else { m - a })
                .collect(),
        )
    }

    #[inline]
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn mul(&self, x: &CoeffElem, y: &CoeffElem) -> CoeffElem {
        let m = self.modulus;
        if self.d == 1 {
            return CoeffElem(SmallVec::from_elem(self.mulmod(x.0[0], y.0[0]), 1));
        }
        let d = self.d;
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &a) in x.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.0.iter().enumerate() {
                let s = prod[i + j] + self.mulmod(a, b);
                prod[i + j] = if s >= m { s - m } else { s };
            }
        }
        // x^d = -(h_0 + h_1 x + ... + h_{d-1} x^{d-1})
        for k in (d..2 * d - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..d {
                let t = self.mulmod(c, self.h[i]);
                let slot = &mut prod[k - d + i];
                *slot = if *slot >= t { *slot - t } else { *slot + m - t };
            }
        }
        prod.truncate(d);
        CoeffElem(prod.into_iter().collect())
    }

    /// Multiplication by a rational integer.
    pub fn scale(&self, x: &CoeffElem, n: i64) -> CoeffElem {
        let k = n.rem_euclid(self.modulus as i64) as u64;
        CoeffElem(x.0.iter().map(|&a| self.mulmod(a, k)).collect())
    }

    /// Checked arithmetic: both operands must be elements of this ring.
    pub fn arith(&self, op: ArithOp, x: &CoeffElem, y: &CoeffElem) -> Result<CoeffElem> {
        self.check(x)?;
        self.check(y)?;
        Ok(match op {
            ArithOp::Add => self.add(x, y),
            ArithOp::Sub => self.sub(x, y),
            ArithOp::Mul => self.mul(x, y),
        })
    }

    pub fn pow(&self, x: &CoeffElem, mut e: u64) -> CoeffElem {
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// p-adic valuation, capped at N (which stands for zero at this precision).
    pub fn valuation(&self, x: &CoeffElem) -> u32 {
        x.0.iter()
            .filter(|&&c| c != 0)
            .map(|&c| {
                let mut v = 0;
                let mut c = c;
                while c % self.p == 0 {
                    c /= self.p;
                    v += 1;
                }
                v
            })
            .min()
            .unwrap_or(self.nprec)
    }

    pub fn is_unit(&self, x: &CoeffElem) -> bool {
        x.0.iter().any(|&c| c % self.p != 0)
    }

    /// Reduction modulo p: `d` integers in `[0, p)`.
    pub fn residue(&self, x: &CoeffElem) -> Vec<u64> {
        x.0.iter().map(|&c| c % self.p).collect()
    }

    pub fn unit_inverse(&self, x: &CoeffElem) -> Result<CoeffElem> {
        if !self.is_unit(x) {
            return Err(Error::NotAUnit(self.valuation(x)));
        }
        if self.d == 1 {
            let inv = int_inverse(x.0[0], self.modulus).expect("unit has an inverse");
            return Ok(self.from_int(inv as i64));
        }
        // invert modulo p, then Newton steps y <- y(2 - xy) lift it
        let mut inv = fp_poly_inverse(&self.residue(x), &self.h, self.p);
        inv.resize(self.d, 0);
        let mut y = self.from_coords(&inv)?;
        let two = self.from_int(2);
        let one = self.one();
        for _ in 0..64 {
            let xy = self.mul(x, &y);
            if xy == one {
                return Ok(y);
            }
            y = self.mul(&y, &self.sub(&two, &xy));
        }
        unreachable!("Newton iteration for a unit inverse did not converge")
    }

    /// Exact division by p^v; requires valuation(x) >= v. The quotient is
    /// defined modulo p^(N-v); the representative with coordinates below
    /// p^(N-v) is returned.
    pub fn div_p_pow(&self, x: &CoeffElem, v: u32) -> CoeffElem {
        let pv = self.powers[v as usize];
        debug_assert!(x.0.iter().all(|&c| c % pv == 0));
        CoeffElem(x.0.iter().map(|&c| c / pv).collect())
    }

    /// Writes x = quot * p^v + rem with the coordinates of `rem` in `[0, p^v)`.
    /// `rem` is the canonical representative of x modulo p^v.
    pub fn split_p_pow(&self, x: &CoeffElem, v: u32) -> (CoeffElem, CoeffElem) {
        let pv = self.powers[v as usize];
        let quot = CoeffElem(x.0.iter().map(|&c| c / pv).collect());
        let rem = CoeffElem(x.0.iter().map(|&c| c % pv).collect());
        (quot, rem)
    }

    /// Iterates over every element (only sensible for tiny rings).
    pub fn elements(&self) -> impl Iterator<Item = CoeffElem> + '_ {
        let total = self.size().expect("ring too large to enumerate");
        (0..total).map(move |mut k| {
            let mut c = self.zero();
            for slot in c.0.iter_mut() {
                *slot = k % self.modulus;
                k /= self.modulus;
            }
            c
        })
    }
}

impl CommRing for RingConfig {
    type Elem = CoeffElem;

    fn zero(&self) -> CoeffElem {
        RingConfig::zero(self)
    }
    fn one(&self) -> CoeffElem {
        RingConfig::one(self)
    }
    fn add(&self, a: &CoeffElem, b: &CoeffElem) -> CoeffElem {
        RingConfig::add(self, a, b)
    }
    fn sub(&self, a: &CoeffElem, b: &CoeffElem) -> CoeffElem {
        RingConfig::sub(self, a, b)
    }
    fn mul(&self, a: &CoeffElem, b: &CoeffElem) -> CoeffElem {
        RingConfig::mul(self, a, b)
    }
    fn is_zero(&self, a: &CoeffElem) -> bool {
        RingConfig::is_zero(self, a)
    }
}

fn int_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo `b` over F_p (low-to-high, `b` nonzero).
fn fp_poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let b = fp_trim(b.iter().map(|c| c % p).collect());
    let inv = int_inverse(*b.last().expect("nonzero divisor"), p).expect("p prime");
    let mut r: Vec<u64> = a.iter().map(|c| c % p).collect();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = r.pop().unwrap() * inv % p;
        if lead == 0 {
            continue;
        }
        let shift = r.len() - db;
        for i in 0..db {
            r[shift + i] = (r[shift + i] + p - lead * b[i] % p) % p;
        }
    }
    fp_trim(r)
}

fn fp_poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

fn fp_poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p;
    }
    fp_trim(out)
}

fn fp_poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    while !b.is_empty() {
        let r = fp_poly_rem(&a, &b, p);
        (a, b) = (b, r);
    }
    a
}

/// g^(p^k) modulo f, by k Frobenius steps.
fn fp_frobenius_pow(g: &[u64], k: usize, f: &[u64], p: u64) -> Vec<u64> {
    let mut x = fp_poly_rem(g, f, p);
    for _ in 0..k {
        let mut acc = vec![1u64];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = fp_poly_rem(&fp_poly_mul(&acc, &base, p), f, p);
            }
            base = fp_poly_rem(&fp_poly_mul(&base, &base, p), f, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut r = 2;
    while r * r <= n {
        if n.is_multiple_of(r) {
            out.push(r);
            while n.is_multiple_of(r) {
                n /= r;
            }
        }
        r += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: a monic f of degree n is irreducible over F_p iff
/// x^(p^n) = x mod f and gcd(x^(p^(n/r)) - x, f) = 1 for every prime r | n.
pub fn fp_irreducible(f: &[u64], p: u64) -> bool {
    let f = fp_trim(f.iter().map(|c| c % p).collect());
    if f.len() < 2 {
        return false;
    }
    let n = f.len() - 1;
    let x = vec![0u64, 1];
    for r in prime_divisors(n) {
        let h = fp_poly_sub(&fp_frobenius_pow(&x, n / r, &f, p), &x, p);
        if fp_poly_gcd(&h, &f, p).len() != 1 {
            return false;
        }
    }
    fp_poly_sub(&fp_frobenius_pow(&x, n, &f, p), &fp_poly_rem(&x, &f, p), p).is_empty()
}

/// Inverse of a nonzero `a` in F_p[x]/(f), f irreducible.
fn fp_poly_inverse(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let (mut r0, mut r1) = (
        fp_trim(f.iter().map(|c| c % p).collect()),
        fp_poly_rem(a, f, p),
    );
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
    while r1.len() > 1 {
        let (q, r) = fp_poly_divrem(&r0, &r1, p);
        let s = fp_poly_sub(&s0, &fp_poly_mul(&q, &s1, p), p);
        (r0, r1, s0, s1) = (r1, r, s1, s);
    }
    let c = int_inverse(r1[0], p).expect("a is invertible");
    s1.iter().map(|&v| v * c % p).collect()
}

fn fp_poly_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let inv = int_inverse(*b.last().expect("nonzero divisor"), p).expect("p prime");
    let mut r = fp_trim(a.to_vec());
    let db = b.len() - 1;
    let mut q = vec![0u64; r.len().saturating_sub(db)];
    while r.len() > db {
        let lead = r.pop().unwrap() * inv % p;
        let shift = r.len() - db;
        q[shift] = lead;
        for i in 0..db {
            r[shift + i] = (r[shift + i] + p - lead * b[i] % p) % p;
        }
    }
    (fp_trim(q), fp_trim(r))
}

fn default_modulus(p: u64, d: usize) -> Result<Vec<u64>> {
    if d == 1 {
        return Ok(vec![0, 1]);
    }
    // candidates in base-p order of their lower coefficients
    let mut idx = 0u128;
    loop {
        let mut h = vec![0u64; d + 1];
        let mut n = idx;
        for slot in h.iter_mut().take(d) {
            *slot = (n % p as u128) as u64;
            n /= p as u128;
        }
        if n > 0 {
            return Err(Error::InvalidConfig(format!(
                "no irreducible polynomial of degree {d} over F_{p}"
            )));
        }
        h[d] = 1;
        if fp_irreducible(&h, p) {
            return Ok(h);
        }
        idx += 1;
    }
}
