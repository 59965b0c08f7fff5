//! Brute force over the finite ring R/p^N: #M by enumerating the relation
//! subgroup of (R/p^N)^t, and Fit by enumerating the ideal generated by the
//! t×t minors. Shares only coefficient arithmetic with the lattice code.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::analyze;
use crate::coeff::{CoeffElem, RingConfig};
use crate::error::{Error, Result};
use crate::modpres::Presentation;

/// Largest #(R/p^N)^t the oracle will enumerate.
pub const ORACLE_MAX_ELEMENTS: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub oracle_card_log_p: u32,
    pub analyzed_card_log_p: u32,
    /// log_p of the number of elements of Fit mod p^N.
    pub oracle_fit_log_p: u32,
    pub card_agrees: bool,
    pub fit_agrees: bool,
}

impl OracleOutcome {
    pub fn agrees(&self) -> bool {
        self.card_agrees && self.fit_agrees
    }
}

type Poly = Vec<CoeffElem>;

struct Brute<'a> {
    ring: &'a RingConfig,
    p: usize,
    /// C(p, j) for j = 0..=p, as ring elements.
    binom: Vec<CoeffElem>,
}

impl Brute<'_> {
    /// Product in A[T]/((1+T)^p - 1) by long division of the full product.
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let ring = self.ring;
        let p = self.p;
        let mut prod = vec![ring.zero(); 2 * p - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = ring.add(&prod[i + j], &ring.mul(x, y));
            }
        }
        for k in (p..2 * p - 1).rev() {
            let c = prod[k].clone();
            for j in 1..=p {
                let slot = k - p + j;
                prod[slot] = ring.sub(&prod[slot], &ring.mul(&c, &self.binom[j]));
            }
        }
        prod.truncate(p);
        prod
    }

    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.iter().zip(b).map(|(x, y)| self.ring.add(x, y)).collect()
    }

    fn monomial(&self, j: usize) -> Poly {
        let mut m = vec![self.ring.zero(); self.p];
        m[j] = self.ring.one();
        m
    }

    /// Leibniz expansion over all permutations.
    fn det(&self, cols: &[&[Poly]]) -> Poly {
        let n = cols.len();
        let mut total = vec![self.ring.zero(); self.p];
        for perm in (0..n).permutations(n) {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            let mut term = self.monomial(0);
            for (c, &r) in perm.iter().enumerate() {
                term = self.mul(&term, &cols[c][r]);
            }
            if inversions % 2 == 1 {
                term = term.iter().map(|x| self.ring.neg(x)).collect();
            }
            total = self.add(&total, &term);
        }
        total
    }

    /// A-module generators x^k·T^j·v of the R-module generated by `v`.
    fn r_span_generators(&self, v: &[Poly]) -> Vec<Vec<u64>> {
        let ring = self.ring;
        let mut out = Vec::new();
        for k in 0..ring.d() {
            let mut coords = vec![0u64; ring.d()];
            coords[k] = 1;
            let xk = ring.from_coords(&coords).expect("shape");
            for j in 0..self.p {
                let mut scalar = vec![ring.zero(); self.p];
                scalar[j] = xk.clone();
                out.push(
                    v.iter()
                        .flat_map(|entry| self.mul(&scalar, entry))
                        .flat_map(|c| c.coords().to_vec())
                        .collect(),
                );
            }
        }
        out
    }
}

/// The additive subgroup of (Z/p^N)^len generated by `gens`, as a membership
/// table indexed in mixed radix.
fn subgroup(modulus: u64, len: usize, gens: &[Vec<u64>]) -> Vec<bool> {
    let total = (modulus as usize).pow(len as u32);
    let encode = |v: &[u64]| {
        v.iter()
            .fold(0usize, |acc, &c| acc * modulus as usize + c as usize)
    };
    let mut seen = vec![false; total];
    seen[0] = true;
    let mut queue = vec![vec![0u64; len]];
    while let Some(x) = queue.pop() {
        for g in gens {
            let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % modulus).collect();
            let k = encode(&y);
            if !seen[k] {
                seen[k] = true;
                queue.push(y);
            }
        }
    }
    seen
}

fn log_count(table: &[bool], p: u64) -> u32 {
    let count = table.iter().filter(|&&b| b).count() as u64;
    count.ilog(p)
}

/// Recomputes #M and Fit_R(M) mod p^N by enumeration at the presentation's
/// own precision and compares them with [`analyze`].
pub fn oracle_check(pres: &Presentation, cap: u64) -> Result<OracleOutcome> {
    let ring = pres.ring();
    let p = pres.group_ring().p();
    let t = pres.t();
    let coords_per_elem = p * ring.d();
    let exponent = ring.nprec() as u64 * (coords_per_elem * t) as u64;
    let fits = |e: u64| {
        ring.p()
            .checked_pow(e as u32)
            .is_some_and(|n| n <= ORACLE_MAX_ELEMENTS)
    };
    if exponent > 64 || !fits(exponent) {
        return Err(Error::Capacity(format!(
            "#(R/p^N)^t = {}^{exponent} exceeds the oracle limit {ORACLE_MAX_ELEMENTS}",
            ring.p()
        )));
    }
    let brute = Brute {
        ring,
        p,
        binom: (0..=p)
            .map(|j| {
                ring.from_int((0..j).fold(1i64, |acc, i| acc * (p - i) as i64 / (i + 1) as i64))
            })
            .collect(),
    };
    let columns: Vec<Vec<Poly>> = pres
        .columns()
        .into_iter()
        .map(|c| c.into_iter().map(|x| x.0).collect())
        .collect();

    let k_gens: Vec<Vec<u64>> = columns
        .iter()
        .flat_map(|c| brute.r_span_generators(c))
        .collect();
    let k = subgroup(ring.modulus(), coords_per_elem * t, &k_gens);
    let oracle_card = exponent as u32 - log_count(&k, ring.p());

    let subsets: Vec<Vec<usize>> = (0..columns.len()).combinations(t).collect();
    if subsets.len() as u64 > cap {
        return Err(Error::Capacity(format!(
            "{} minors exceed the cap {cap}",
            subsets.len()
        )));
    }
    let minors: Vec<Poly> = subsets
        .into_iter()
        .map(|subset| {
            let chosen: Vec<&[Poly]> = subset.iter().map(|&i| columns[i].as_slice()).collect();
            brute.det(&chosen)
        })
        .collect();
    let fit_gens: Vec<Vec<u64>> = minors
        .iter()
        .flat_map(|m| brute.r_span_generators(std::slice::from_ref(m)))
        .collect();
    let fit = subgroup(ring.modulus(), coords_per_elem, &fit_gens);

    let report = analyze(pres, cap)?;
    let analyzed_gens: Vec<Vec<u64>> = report
        .values
        .fit
        .iter()
        .flat_map(|b| {
            let reduced: Poly =
                b.0.iter()
                    .map(|c| ring.from_coords(c.coords()).expect("shape"))
                    .collect();
            brute.r_span_generators(std::slice::from_ref(&reduced))
        })
        .collect();
    let analyzed_fit = subgroup(ring.modulus(), coords_per_elem, &analyzed_gens);

    Ok(OracleOutcome {
        oracle_card_log_p: oracle_card,
        analyzed_card_log_p: report.values.card_log_p,
        oracle_fit_log_p: log_count(&fit, ring.p()),
        card_agrees: oracle_card == report.values.card_log_p,
        fit_agrees: fit == analyzed_fit,
    })
}
