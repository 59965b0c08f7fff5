//! The normalization R~ = A[T]/(T) x A[T]/(N) of R, where
//! N = ((1+T)^p - 1)/T, together with the embedding eta: R -> R~ and the
//! residue map vartheta: R~ -> F_q whose kernel is eta(R).
//!
//! R~ is handled purely through its A-lattice structure: an element is a
//! vector of p coefficients, slot 0 for the A-factor and slots 1..p for the
//! basis 1, T, ..., T^(p-2) of A[T]/(N). Modules over R~ are lattices stable
//! under the idempotent e1 = (1, 0) and under T.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coeff::{CoeffElem, RingConfig};
use crate::error::{Error, Result};
use crate::groupring::{binomials, GroupRing, GroupRingElem, RIdeal};
use crate::linalg::{cokernel_cardinality, Lattice, Matrix};
use crate::ring::CommRing;

/// An element (a, z) of R~, flattened as `[a, z_0, ..., z_{p-2}]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TildeElem(pub Vec<CoeffElem>);

impl TildeElem {
    pub fn a_part(&self) -> &CoeffElem {
        &self.0[0]
    }

    pub fn z_part(&self) -> &[CoeffElem] {
        &self.0[1..]
    }
}

/// A lattice in R~^t that is an R~-module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TildeLattice {
    lat: Lattice,
}

impl TildeLattice {
    pub fn lattice(&self) -> &Lattice {
        &self.lat
    }

    pub fn into_lattice(self) -> Lattice {
        self.lat
    }
}

/// Whether the multiplier ring (J:J) = {x in R~ : xJ ⊆ J} is R or all of R~.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MultiplierRing {
    R,
    RTilde,
}

#[derive(Clone, Debug)]
pub struct TildeRing {
    gr: GroupRing,
    /// Coordinates in A[T]/(N) of T^(p-1+j), j = 0..max(p-2, 1).
    reductions: Vec<Vec<CoeffElem>>,
    /// Coefficients of N, low-to-high (degree p-1, monic).
    norm_poly: Vec<CoeffElem>,
}

impl TildeRing {
    pub fn new(gr: &GroupRing) -> Self {
        let coeff = gr.coeff().clone();
        let p = gr.p();
        let binom = binomials(p);
        let norm_poly: Vec<CoeffElem> = (0..p)
            .map(|k| coeff.from_int(binom[k + 1] as i64))
            .collect();
        let zdim = p - 1;
        // T^(p-1) = -(N - T^(p-1))
        let first: Vec<CoeffElem> = norm_poly[..zdim].iter().map(|c| coeff.neg(c)).collect();
        let mut reductions = vec![first.clone()];
        let mut top = first;
        for _ in 1..zdim.saturating_sub(1) {
            let carry = top.pop().expect("nonempty");
            top.insert(0, coeff.zero());
            for (slot, r) in top.iter_mut().zip(&reductions[0]) {
                *slot = coeff.add(slot, &coeff.mul(&carry, r));
            }
            reductions.push(top.clone());
        }
        Self {
            gr: gr.clone(),
            reductions,
            norm_poly,
        }
    }

    pub fn group_ring(&self) -> &GroupRing {
        &self.gr
    }

    fn coeff(&self) -> &Arc<RingConfig> {
        self.gr.coeff()
    }

    pub fn p(&self) -> usize {
        self.gr.p()
    }

    /// Coefficients of N = ((1+T)^p - 1)/T.
    pub fn norm_polynomial(&self) -> &[CoeffElem] {
        &self.norm_poly
    }

    pub fn zero(&self) -> TildeElem {
        TildeElem(vec![self.coeff().zero(); self.p()])
    }

    pub fn one(&self) -> TildeElem {
        let mut x = self.zero();
        x.0[0] = self.coeff().one();
        x.0[1] = self.coeff().one();
        x
    }

    /// The idempotent e1 = (1, 0).
    pub fn e1(&self) -> TildeElem {
        let mut x = self.zero();
        x.0[0] = self.coeff().one();
        x
    }

    pub fn from_parts(&self, a: CoeffElem, z: Vec<CoeffElem>) -> Result<TildeElem> {
        if z.len() != self.p() - 1 {
            return Err(Error::ConfigMismatch(
                "wrong number of A[zeta] coordinates".into(),
            ));
        }
        let mut v = Vec::with_capacity(self.p());
        v.push(a);
        v.extend(z);
        v.iter().try_for_each(|c| self.coeff().check(c))?;
        Ok(TildeElem(v))
    }

    fn z_mul(&self, x: &[CoeffElem], y: &[CoeffElem]) -> Vec<CoeffElem> {
        let ring = &**self.coeff();
        let zdim = x.len();
        if zdim == 1 {
            return vec![ring.mul(&x[0], &y[0])];
        }
        let mut prod = vec![ring.zero(); 2 * zdim - 1];
        for (i, a) in x.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                prod[i + j] = ring.add(&prod[i + j], &ring.mul(a, b));
            }
        }
        let (low, high) = prod.split_at_mut(zdim);
        for (c, red) in high.iter().zip(&self.reductions) {
            if ring.is_zero(c) {
                continue;
            }
            for (slot, r) in low.iter_mut().zip(red) {
                *slot = ring.add(slot, &ring.mul(c, r));
            }
        }
        prod.truncate(zdim);
        prod
    }

    fn z_mul_t(&self, z: &[CoeffElem]) -> Vec<CoeffElem> {
        let ring = &**self.coeff();
        let zdim = z.len();
        let carry = &z[zdim - 1];
        let mut out = Vec::with_capacity(zdim);
        out.push(ring.zero());
        out.extend(z[..zdim - 1].iter().cloned());
        if !ring.is_zero(carry) {
            for (slot, r) in out.iter_mut().zip(&self.reductions[0]) {
                *slot = ring.add(slot, &ring.mul(carry, r));
            }
        }
        out
    }

    pub fn mul(&self, x: &TildeElem, y: &TildeElem) -> TildeElem {
        let ring = &**self.coeff();
        let mut out = Vec::with_capacity(self.p());
        out.push(ring.mul(&x.0[0], &y.0[0]));
        out.extend(self.z_mul(&x.0[1..], &y.0[1..]));
        TildeElem(out)
    }

    /// Multiplication by T: zero on the A-factor, the class of T on A[T]/(N).
    pub fn mul_t(&self, x: &TildeElem) -> TildeElem {
        let mut out = Vec::with_capacity(self.p());
        out.push(self.coeff().zero());
        out.extend(self.z_mul_t(&x.0[1..]));
        TildeElem(out)
    }

    /// eta(r) = (r mod T, r mod N).
    pub fn eta(&self, r: &GroupRingElem) -> TildeElem {
        let ring = &**self.coeff();
        let p = self.p();
        let mut out = Vec::with_capacity(p);
        out.push(r.0[0].clone());
        let mut z: Vec<CoeffElem> = r.0[..p - 1].to_vec();
        let top = &r.0[p - 1];
        if !ring.is_zero(top) {
            for (slot, c) in z.iter_mut().zip(&self.reductions[0]) {
                *slot = ring.add(slot, &ring.mul(top, c));
            }
        }
        out.extend(z);
        TildeElem(out)
    }

    /// Matrix of eta in the T-power basis of R and the flattened basis of R~.
    pub fn eta_matrix(&self) -> Matrix {
        let cols: Vec<Vec<CoeffElem>> = (0..self.p())
            .map(|j| self.eta(&self.gr.t_pow(j)).0)
            .collect();
        Matrix::from_columns(self.p(), &cols)
    }

    /// vartheta(a, z) = a - z mod m, an element of the residue field F_q.
    pub fn vartheta(&self, x: &TildeElem) -> Vec<u64> {
        let ring = &**self.coeff();
        ring.residue(&ring.sub(&x.0[0], &x.0[1]))
    }

    /// Blockwise eta on a vector of R^t.
    pub fn eta_vector(&self, v: &[CoeffElem]) -> Vec<CoeffElem> {
        v.chunks(self.p())
            .flat_map(|block| self.eta(&GroupRingElem(block.to_vec())).0)
            .collect()
    }

    /// Blockwise multiplication by T on a vector of R~^t.
    pub fn mul_t_vector(&self, v: &[CoeffElem]) -> Vec<CoeffElem> {
        v.chunks(self.p())
            .flat_map(|block| self.mul_t(&TildeElem(block.to_vec())).0)
            .collect()
    }

    /// Blockwise multiplication by e1 on a vector of R~^t.
    pub fn e1_vector(&self, v: &[CoeffElem]) -> Vec<CoeffElem> {
        let zero = self.coeff().zero();
        v.chunks(self.p())
            .flat_map(|block| {
                std::iter::once(block[0].clone())
                    .chain(std::iter::repeat_n(zero.clone(), block.len() - 1))
            })
            .collect()
    }

    /// Image of an A-lattice in R^t under blockwise eta (no closure).
    pub fn eta_lattice(&self, lat: &Lattice) -> Lattice {
        lat.map(lat.ambient_rank(), |v| self.eta_vector(v))
    }

    /// The smallest R~-submodule containing `lat` (closure under e1 and T).
    pub fn closure(&self, lat: &Lattice) -> TildeLattice {
        let mut current = lat.clone();
        loop {
            let extra: Vec<Vec<CoeffElem>> = current
                .basis()
                .iter()
                .flat_map(|v| [self.e1_vector(v), self.mul_t_vector(v)])
                .collect();
            let next = current.extend(extra);
            if next == current {
                return TildeLattice { lat: current };
            }
            current = next;
        }
    }

    /// Wraps a lattice after checking stability under e1 and T.
    pub fn tilde_lattice(&self, lat: Lattice) -> Result<TildeLattice> {
        if !lat.ambient_rank().is_multiple_of(self.p()) {
            return Err(Error::ConfigMismatch(
                "ambient rank is not a multiple of p".into(),
            ));
        }
        let stable = lat.basis().iter().all(|v| {
            lat.contains_vector(&self.e1_vector(v)) && lat.contains_vector(&self.mul_t_vector(v))
        });
        if !stable {
            return Err(Error::Hypothesis("lattice is not an R~-module".into()));
        }
        Ok(TildeLattice { lat })
    }

    /// R~^t as a lattice.
    pub fn full(&self, t: usize) -> TildeLattice {
        TildeLattice {
            lat: Lattice::full(self.coeff().clone(), self.p() * t),
        }
    }

    /// J·R~ inside R~.
    pub fn extend_ideal(&self, j: &RIdeal) -> TildeLattice {
        self.closure(&self.eta_lattice(j.lattice()))
    }

    /// Whether J is already an R~-ideal, i.e. J·R~ = eta(J).
    pub fn is_tilde_stable(&self, j: &RIdeal) -> bool {
        *self.extend_ideal(j).lattice() == self.eta_lattice(j.lattice())
    }

    /// (J:J) computed directly: since R~ = eta(R) + A·e1, it is R~ exactly
    /// when e1·eta(J) ⊆ eta(J).
    pub fn multiplier_ring(&self, j: &RIdeal) -> MultiplierRing {
        let image = self.eta_lattice(j.lattice());
        let stable = image
            .basis()
            .iter()
            .all(|v| image.contains_vector(&self.e1_vector(v)));
        if stable {
            MultiplierRing::RTilde
        } else {
            MultiplierRing::R
        }
    }

    /// log_p #(R~^t / L).
    pub fn tilde_quotient_card(&self, l: &TildeLattice) -> Result<u32> {
        cokernel_cardinality(l.lat.ambient_rank(), &l.lat)
    }

    /// The kernel of vartheta, built from its definition: (1, 1), (p, 0),
    /// (0, p) and the A[T]/(N) basis vectors T^k for k >= 1.
    pub fn vartheta_kernel(&self) -> Lattice {
        let ring = self.coeff();
        let p = self.p();
        let mut gens = Vec::new();
        let mut diag = self.zero();
        diag.0[0] = ring.one();
        diag.0[1] = ring.one();
        gens.push(diag.0);
        let mut pa = self.zero();
        pa.0[0] = ring.from_int(p as i64);
        gens.push(pa.0);
        let mut pz = self.zero();
        pz.0[1] = ring.from_int(p as i64);
        gens.push(pz.0);
        for k in 2..p {
            let mut x = self.zero();
            x.0[k] = ring.one();
            gens.push(x.0);
        }
        Lattice::new(ring.clone(), p, gens)
    }
}

impl CommRing for TildeRing {
    type Elem = TildeElem;

    fn zero(&self) -> TildeElem {
        TildeRing::zero(self)
    }
    fn one(&self) -> TildeElem {
        TildeRing::one(self)
    }
    fn add(&self, a: &TildeElem, b: &TildeElem) -> TildeElem {
        let ring = &**self.coeff();
        TildeElem(a.0.iter().zip(&b.0).map(|(x, y)| ring.add(x, y)).collect())
    }
    fn sub(&self, a: &TildeElem, b: &TildeElem) -> TildeElem {
        let ring = &**self.coeff();
        TildeElem(a.0.iter().zip(&b.0).map(|(x, y)| ring.sub(x, y)).collect())
    }
    fn mul(&self, a: &TildeElem, b: &TildeElem) -> TildeElem {
        TildeRing::mul(self, a, b)
    }
    fn is_zero(&self, a: &TildeElem) -> bool {
        a.0.iter().all(|x| self.coeff().is_zero(x))
    }
}
