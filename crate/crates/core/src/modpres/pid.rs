//! Finite modules over A alone, where Fit_A(L) is generated by the product
//! of the elementary divisors.

use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::coeff::{CoeffElem, RingConfig};
use crate::error::{Error, Result};
use crate::linalg::{cokernel_cardinality, Lattice};
use crate::ring::det_cofactor;

/// L = A^t / (columns + p^e A^t).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PidPresentation {
    ring: Arc<RingConfig>,
    t: usize,
    e: u32,
    relations: Vec<Vec<CoeffElem>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PidReport {
    /// log_p #L, from the Smith form.
    pub card_log_p: u32,
    /// v with Fit_A(L) = (p^v), the least valuation of a t×t minor.
    pub fit_valuation: u32,
    pub fit_quot_log_p: u32,
}

impl PidReport {
    pub fn holds(&self) -> bool {
        self.card_log_p == self.fit_quot_log_p
    }
}

impl PidPresentation {
    pub fn new(
        ring: Arc<RingConfig>,
        t: usize,
        e: u32,
        relations: Vec<Vec<CoeffElem>>,
    ) -> Result<Self> {
        if t == 0 || e == 0 || ring.nprec() < e {
            return Err(Error::InvalidConfig(
                "need t >= 1 and 1 <= e <= Nprec".into(),
            ));
        }
        for col in &relations {
            if col.len() != t {
                return Err(Error::ConfigMismatch(format!(
                    "relation column of length {}, expected {t}",
                    col.len()
                )));
            }
            col.iter().try_for_each(|x| ring.check(x))?;
        }
        Ok(Self {
            ring,
            t,
            e,
            relations,
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn ring(&self) -> &Arc<RingConfig> {
        &self.ring
    }

    pub fn columns(&self) -> Vec<Vec<CoeffElem>> {
        let mut cols = self.relations.clone();
        for i in 0..self.t {
            let mut col = vec![self.ring.zero(); self.t];
            col[i] = self.ring.p_pow(self.e);
            cols.push(col);
        }
        cols
    }

    /// Lifts to precision e·t + 2, where every minor's valuation is visible.
    pub fn at_working_precision(&self) -> Result<Self> {
        let nprec = self.ring.nprec().max(self.e * self.t as u32 + 2);
        let ring = Arc::new(self.ring.with_precision(nprec)?);
        let relations = self
            .relations
            .iter()
            .map(|c| {
                c.iter()
                    .map(|x| ring.from_coords(x.coords()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, self.t, self.e, relations)
    }

    pub fn analyze(&self, cap: u64) -> Result<PidReport> {
        let lifted = self.at_working_precision()?;
        let ring = &lifted.ring;
        let cols = lifted.columns();
        let lattice = Lattice::new(ring.clone(), lifted.t, cols.clone());
        let card_log_p = cokernel_cardinality(lifted.t, &lattice)?;
        let total = cols.len();
        let mut fit_valuation = ring.nprec();
        let mut seen = 0u64;
        for subset in (0..total).combinations(lifted.t) {
            seen += 1;
            if seen > cap {
                return Err(Error::Capacity(format!("more than {cap} minors")));
            }
            let chosen: Vec<&[CoeffElem]> = subset.iter().map(|&k| cols[k].as_slice()).collect();
            fit_valuation = fit_valuation.min(ring.valuation(&det_cofactor(&**ring, &chosen)));
        }
        if fit_valuation >= ring.nprec() {
            return Err(Error::exhausted(ring.nprec(), "all minors vanish"));
        }
        Ok(PidReport {
            card_log_p,
            fit_valuation,
            fit_quot_log_p: fit_valuation * ring.q_log(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_examples() {
        let ring = Arc::new(RingConfig::new(3, 2, 4, None).unwrap());
        let c = |n: i64| ring.from_int(n);
        // A/3 x A/9: product of the divisors is 27
        let pres =
            PidPresentation::new(ring.clone(), 2, 3, vec![vec![c(3), c(0)], vec![c(0), c(9)]])
                .unwrap();
        let report = pres.analyze(1000).unwrap();
        assert_eq!(report.fit_valuation, 3);
        assert_eq!(report.card_log_p, 6);
        assert!(report.holds());
        // no relations beyond the kill columns: (A/p^e)^t
        let pres = PidPresentation::new(ring.clone(), 3, 2, vec![]).unwrap();
        assert_eq!(pres.analyze(1000).unwrap().card_log_p, 12);
    }

    #[test]
    fn unit_relation_kills_a_generator() {
        let ring = Arc::new(RingConfig::new(5, 1, 3, None).unwrap());
        let c = |n: i64| ring.from_int(n);
        let pres = PidPresentation::new(ring.clone(), 2, 2, vec![vec![c(2), c(5)]]).unwrap();
        let report = pres.analyze(1000).unwrap();
        assert_eq!(report.card_log_p, 2);
        assert!(report.holds());
    }
}
