//! Z_p[G] for a finite abelian group G with p^2 not dividing #G splits as a
//! product of rings A_f and A_f[C_p], one for each orbit of multiplication by
//! p on the character group of the prime-to-p part.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coeff::RingConfig;
use crate::error::{Error, Result};
use crate::modpres::{ModuleReport, PidReport};

/// Largest group whose elements are enumerated for the orbit computation.
pub const MAX_GROUP_ORDER: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    cyclic_orders: Vec<u64>,
}

impl AbelianGroup {
    pub fn new(cyclic_orders: Vec<u64>) -> Result<Self> {
        if cyclic_orders.contains(&0) {
            return Err(Error::InvalidConfig(
                "cyclic orders must be positive".into(),
            ));
        }
        let order = cyclic_orders
            .iter()
            .try_fold(1u64, |acc, &n| acc.checked_mul(n))
            .filter(|&n| n <= MAX_GROUP_ORDER);
        if order.is_none() {
            return Err(Error::Capacity(format!(
                "group order exceeds {MAX_GROUP_ORDER}"
            )));
        }
        Ok(Self { cyclic_orders })
    }

    /// Parses "n1,n2,...".
    pub fn parse(text: &str) -> Result<Self> {
        let orders = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidConfig(format!("bad cyclic order {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(orders)
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        &self.cyclic_orders
    }

    pub fn order(&self) -> u64 {
        self.cyclic_orders.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.cyclic_orders.iter().fold(1, |acc, &n| lcm(acc, n))
    }

    /// G = H × (p-part): the orders with every factor p removed, and the
    /// total exponent of p.
    fn split_p(&self, p: u64) -> (AbelianGroup, u32) {
        let mut power = 0;
        let orders = self
            .cyclic_orders
            .iter()
            .map(|&n| {
                let mut n = n;
                while n % p == 0 {
                    n /= p;
                    power += 1;
                }
                n
            })
            .collect();
        (
            AbelianGroup {
                cyclic_orders: orders,
            },
            power,
        )
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// One family of isomorphic factors: A_f, or A_f[C_p] when `has_c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompFactor {
    pub f: usize,
    pub has_c: bool,
    pub multiplicity: usize,
}

/// Orbit sizes of x ↦ p·x on ∏ Z/n_i, listed in order of each orbit's
/// smallest element.
pub fn frobenius_orbits(h: &AbelianGroup, p: u64) -> Result<Vec<usize>> {
    if h.order().is_multiple_of(p) {
        return Err(Error::Hypothesis(format!(
            "p = {p} divides #H = {}",
            h.order()
        )));
    }
    let orders = h.cyclic_orders();
    let total = h.order() as usize;
    // mixed-radix index of an element
    let index = |x: &[u64]| {
        x.iter()
            .zip(orders)
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
    };
    let mut seen = vec![false; total];
    let mut sizes = Vec::new();
    let mut x = vec![0u64; orders.len()];
    for start in 0..total {
        let mut rem = start;
        for (slot, &n) in x.iter_mut().zip(orders).rev() {
            *slot = rem as u64 % n;
            rem /= n as usize;
        }
        if seen[start] {
            continue;
        }
        let mut size = 0;
        let mut y = x.clone();
        while !seen[index(&y)] {
            seen[index(&y)] = true;
            size += 1;
            for (c, &n) in y.iter_mut().zip(orders) {
                *c = *c * p % n;
            }
        }
        sizes.push(size);
    }
    Ok(sizes)
}

/// Factors of Z_p[G], grouped by residue degree.
pub fn decompose_group_ring(g: &AbelianGroup, p: u64) -> Result<Vec<DecompFactor>> {
    if !crate::coeff::is_prime(p) {
        return Err(Error::InvalidConfig(format!("{p} is not prime")));
    }
    let (h, power) = g.split_p(p);
    if power >= 2 {
        return Err(Error::Hypothesis(format!("p^2 divides #G = {}", g.order())));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for f in frobenius_orbits(&h, p)? {
        *counts.entry(f).or_default() += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(f, multiplicity)| DecompFactor {
            f,
            has_c: power == 1,
            multiplicity,
        })
        .collect())
}

/// Σ multiplicity·f·(p or 1), which equals #G.
pub fn factor_rank(factors: &[DecompFactor], p: u64) -> u64 {
    factors
        .iter()
        .map(|x| (x.multiplicity * x.f) as u64 * if x.has_c { p } else { 1 })
        .sum()
}

/// The coefficient ring A_f at precision `nprec`.
pub fn factor_ring(p: u64, f: usize, nprec: u32) -> Result<Arc<RingConfig>> {
    Ok(Arc::new(RingConfig::new(p, f, nprec, None)?))
}

/// The two sides of the inequality for the part of a module living on one
/// factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSides {
    pub f: usize,
    pub has_c: bool,
    pub card_log_p: u32,
    pub fit_quot_log_p: u32,
    pub principal: bool,
}

impl From<&ModuleReport> for FactorSides {
    fn from(r: &ModuleReport) -> Self {
        FactorSides {
            f: r.values.ring.d,
            has_c: true,
            card_log_p: r.values.card_log_p,
            fit_quot_log_p: r.values.fit_quot_log_p,
            principal: r.values.principal,
        }
    }
}

impl FactorSides {
    /// A module over the factor A_f; every ideal of A_f is principal.
    pub fn from_pid(f: usize, r: &PidReport) -> Self {
        FactorSides {
            f,
            has_c: false,
            card_log_p: r.card_log_p,
            fit_quot_log_p: r.fit_quot_log_p,
            principal: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductOutcome {
    pub card_log_p: u32,
    pub fit_quot_log_p: u32,
    pub all_principal: bool,
    pub holds: bool,
}

/// Checks #M ≤ #S/Fit_S(M) for M = ∏ M_i over S = ∏ S_i, from per-factor
/// data: cardinalities and Fitting-ideal indices multiply, and Fit is
/// principal exactly when every factor's is. `sides` must list one entry per
/// factor copy, in the order of `decompose_group_ring`.
pub fn product_check(g: &AbelianGroup, p: u64, sides: &[FactorSides]) -> Result<ProductOutcome> {
    let factors = decompose_group_ring(g, p)?;
    let expected: Vec<(usize, bool)> = factors
        .iter()
        .flat_map(|x| std::iter::repeat_n((x.f, x.has_c), x.multiplicity))
        .collect();
    let got: Vec<(usize, bool)> = sides.iter().map(|s| (s.f, s.has_c)).collect();
    if expected != got {
        return Err(Error::ConfigMismatch(format!(
            "factors {expected:?} do not match supplied modules {got:?}"
        )));
    }
    let card_log_p = sides.iter().map(|s| s.card_log_p).sum();
    let fit_quot_log_p = sides.iter().map(|s| s.fit_quot_log_p).sum();
    let all_principal = sides.iter().all(|s| s.principal);
    Ok(ProductOutcome {
        card_log_p,
        fit_quot_log_p,
        all_principal,
        holds: card_log_p <= fit_quot_log_p && (!all_principal || card_log_p == fit_quot_log_p),
    })
}
