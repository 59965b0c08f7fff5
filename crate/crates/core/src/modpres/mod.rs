//! Finite R-modules given by presentations R^s -> R^t -> M -> 0.
//!
//! A presentation always carries the kill columns p^e·e_i, so M is finite
//! and every lattice in the analysis contains p^(e·t + 1) R^t. Computations
//! run at a working precision chosen so that nothing vanishes.

mod pid;
mod report;

use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::coeff::{CoeffElem, RingConfig, RingSpec};
use crate::error::{Error, Result};
use crate::groupring::{GroupRing, GroupRingElem, RIdeal};
use crate::linalg::{cokernel_cardinality, quotient_cardinality, Lattice};
use crate::normalization::{TildeElem, TildeLattice, TildeRing};
use crate::ring::det_cofactor;

pub use pid::{PidPresentation, PidReport};
pub use report::{analyze_presentation, Flags, ModuleReport, ModuleValues};

/// Default bound on the number of t×t minors a Fitting ideal may enumerate.
pub const DEFAULT_MINOR_CAP: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PresentationSpec", into = "PresentationSpec")]
pub struct Presentation {
    gr: GroupRing,
    t: usize,
    e: u32,
    /// Relation columns, each of length t, without the kill columns.
    relations: Vec<Vec<GroupRingElem>>,
}

/// JSON form `{p, d, Nprec, h?, t, e, relations}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationSpec {
    #[serde(flatten)]
    pub ring: RingSpec,
    pub t: usize,
    pub e: u32,
    pub relations: Vec<Vec<GroupRingElem>>,
}

impl TryFrom<PresentationSpec> for Presentation {
    type Error = Error;

    fn try_from(spec: PresentationSpec) -> Result<Self> {
        let gr = GroupRing::new(Arc::new(RingConfig::from_spec(&spec.ring)?))?;
        Presentation::new(&gr, spec.t, spec.e, spec.relations)
    }
}

impl From<Presentation> for PresentationSpec {
    fn from(p: Presentation) -> Self {
        PresentationSpec {
            ring: p.gr.coeff().spec(),
            t: p.t,
            e: p.e,
            relations: p.relations,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k as u128).fold(1u128, |acc, i| acc.saturating_mul(n as u128 - i) / (i + 1))
}

impl Presentation {
    /// Columns equal to a kill column p^e·e_i are dropped; the kill columns
    /// are implicit and regenerated at every precision.
    pub fn new(
        gr: &GroupRing,
        t: usize,
        e: u32,
        relations: Vec<Vec<GroupRingElem>>,
    ) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidConfig(
                "a presentation needs t >= 1 generators".into(),
            ));
        }
        if e == 0 {
            return Err(Error::InvalidConfig(
                "kill exponent e must be at least 1".into(),
            ));
        }
        if gr.coeff().nprec() < e {
            return Err(Error::InvalidConfig(format!(
                "precision {} is below the kill exponent {e}",
                gr.coeff().nprec()
            )));
        }
        for col in &relations {
            if col.len() != t {
                return Err(Error::ConfigMismatch(format!(
                    "relation column of length {}, expected {t}",
                    col.len()
                )));
            }
            col.iter().try_for_each(|x| gr.check(x))?;
        }
        let mut pres = Presentation {
            gr: gr.clone(),
            t,
            e,
            relations: Vec::new(),
        };
        let kills = pres.kill_columns();
        pres.relations = relations
            .into_iter()
            .filter(|c| !kills.contains(c))
            .collect();
        Ok(pres)
    }

    pub fn group_ring(&self) -> &GroupRing {
        &self.gr
    }

    pub fn ring(&self) -> &Arc<RingConfig> {
        self.gr.coeff()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Number of explicit relation columns (kill columns excluded).
    pub fn s(&self) -> usize {
        self.relations.len()
    }

    pub fn relations(&self) -> &[Vec<GroupRingElem>] {
        &self.relations
    }

    pub fn kill_columns(&self) -> Vec<Vec<GroupRingElem>> {
        let pe = self.gr.from_coeff(&self.ring().p_pow(self.e));
        (0..self.t)
            .map(|i| {
                let mut col = vec![self.gr.zero(); self.t];
                col[i] = pe.clone();
                col
            })
            .collect()
    }

    /// Relations followed by the kill columns.
    pub fn columns(&self) -> Vec<Vec<GroupRingElem>> {
        let mut cols = self.relations.clone();
        cols.extend(self.kill_columns());
        cols
    }

    /// Precision at which every quantity of the analysis is exact:
    /// the Fitting ideal contains p^(e·t), the modules K and H contain
    /// p^(e+1) times the ambient module, and the multiplicativity partner
    /// adds one more factor of m.
    pub fn working_precision(&self) -> u32 {
        let e = self.e;
        self.ring().nprec().max(e * self.t as u32 + e + 2)
    }

    /// The same module over the ring at precision `nprec` (lifting or
    /// reducing the relation entries coordinatewise).
    pub fn at_precision(&self, nprec: u32) -> Result<Presentation> {
        let coeff = Arc::new(self.ring().with_precision(nprec)?);
        let gr = GroupRing::new(coeff.clone())?;
        let relations = self
            .relations
            .iter()
            .map(|col| {
                col.iter()
                    .map(|x| transfer(&gr, x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(&gr, self.t, self.e, relations)
    }

    pub fn from_json(text: &str) -> Result<Presentation> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// K, the A-lattice in R^t spanned by T^j·c for every column c.
    pub fn relation_lattice(&self) -> Lattice {
        let p = self.gr.p();
        let mut gens = Vec::new();
        for col in self.columns() {
            let mut x = col;
            for _ in 0..p {
                gens.push(flatten(&x));
                x = x.iter().map(|y| self.gr.mul_t(y)).collect();
            }
        }
        Lattice::new(self.ring().clone(), p * self.t, gens)
    }

    /// log_p #M.
    pub fn module_cardinality(&self) -> Result<u32> {
        cokernel_cardinality(self.gr.p() * self.t, &self.relation_lattice())
    }

    fn minor_subsets(&self, cap: u64) -> Result<Vec<Vec<usize>>> {
        let s = self.relations.len() + self.t;
        let count = binomial(s, self.t);
        if count > cap as u128 {
            return Err(Error::Capacity(format!(
                "C({s}, {}) = {count} minors exceeds the cap {cap}",
                self.t
            )));
        }
        Ok((0..s).combinations(self.t).collect())
    }

    /// Fit_R(M), the ideal generated by all t×t minors.
    pub fn fitting_ideal(&self, cap: u64) -> Result<RIdeal> {
        let cols = self.columns();
        let minors: Vec<GroupRingElem> = self
            .minor_subsets(cap)?
            .into_iter()
            .map(|subset| {
                let chosen: Vec<&[GroupRingElem]> =
                    subset.iter().map(|&k| cols[k].as_slice()).collect();
                det_cofactor(&self.gr, &chosen)
            })
            .collect();
        Ok(self.gr.ideal_from_generators(&minors))
    }

    /// Fit_{R~}(M~), from the minors of the relation matrix pushed into R~.
    pub fn tilde_fitting_ideal(&self, tr: &TildeRing, cap: u64) -> Result<TildeLattice> {
        let cols: Vec<Vec<TildeElem>> = self
            .columns()
            .iter()
            .map(|c| c.iter().map(|x| tr.eta(x)).collect())
            .collect();
        let minors: Vec<Vec<CoeffElem>> = self
            .minor_subsets(cap)?
            .into_iter()
            .map(|subset| {
                let chosen: Vec<&[TildeElem]> =
                    subset.iter().map(|&k| cols[k].as_slice()).collect();
                det_cofactor(tr, &chosen).0
            })
            .collect();
        Ok(tr.closure(&Lattice::new(self.ring().clone(), self.gr.p(), minors)))
    }

    /// dim_{F_q} K/mK, the minimal number of generators of K.
    pub fn kernel_min_gens(&self) -> Result<u32> {
        let k = self.relation_lattice();
        Ok(quotient_cardinality(&k, &m_times(&self.gr, &k))? / self.ring().q_log())
    }

    /// H = R~·K inside R~^t.
    pub fn h_lattice(&self, tr: &TildeRing) -> TildeLattice {
        tr.closure(&tr.eta_lattice(&self.relation_lattice()))
    }

    /// log_p #M~, with M~ = R~^t / H.
    pub fn base_change_card(&self, tr: &TildeRing) -> Result<u32> {
        tr.tilde_quotient_card(&self.h_lattice(tr))
    }

    /// log_p #(H/K).
    pub fn hk_quotient(&self, tr: &TildeRing) -> Result<u32> {
        let k = tr.eta_lattice(&self.relation_lattice());
        quotient_cardinality(self.h_lattice(tr).lattice(), &k)
    }

    /// (log_p #ker psi, log_p #coker psi) for psi: M -> M~. The kernel is
    /// (eta(R^t) ∩ H) / eta(K), the cokernel R~^t / (eta(R^t) + H).
    pub fn psi_counts(&self, tr: &TildeRing) -> Result<(u32, u32)> {
        let n = self.gr.p() * self.t;
        let image = tr.eta_lattice(&Lattice::full(self.ring().clone(), n));
        let h = self.h_lattice(tr);
        let k = tr.eta_lattice(&self.relation_lattice());
        let ker = quotient_cardinality(&image.intersection(h.lattice())?, &k)?;
        let coker = cokernel_cardinality(n, &image.sum(h.lattice())?)?;
        Ok((ker, coker))
    }

    /// log_p #(M/mM).
    pub fn m_mod_mm(&self) -> Result<u32> {
        let n = self.gr.p() * self.t;
        let k = self.relation_lattice();
        cokernel_cardinality(
            n,
            &k.sum(&m_times(&self.gr, &Lattice::full(self.ring().clone(), n)))?,
        )
    }

    /// M1 ⊕ M2 with a block-diagonal relation matrix.
    pub fn direct_sum(&self, other: &Presentation) -> Result<Presentation> {
        if self.ring() != other.ring() {
            return Err(Error::ConfigMismatch(
                "direct sum of presentations over different rings".into(),
            ));
        }
        let t = self.t + other.t;
        let e = self.e.max(other.e);
        let zero = self.gr.zero();
        let pad = |col: &[GroupRingElem], before: usize, after: usize| -> Vec<GroupRingElem> {
            std::iter::repeat_n(zero.clone(), before)
                .chain(col.iter().cloned())
                .chain(std::iter::repeat_n(zero.clone(), after))
                .collect()
        };
        let mut relations = Vec::new();
        for col in self.columns() {
            relations.push(pad(&col, 0, other.t));
        }
        for col in other.columns() {
            relations.push(pad(&col, self.t, 0));
        }
        Presentation::new(&self.gr, t, e, relations)
    }

    /// The same module with one more relation, an R-combination of existing
    /// columns.
    pub fn with_redundant_column(&self) -> Result<Presentation> {
        let cols = self.columns();
        let last = &cols[cols.len() - 1];
        let extra: Vec<GroupRingElem> = cols[0]
            .iter()
            .zip(last)
            .map(|(a, b)| {
                self.gr
                    .add(&self.gr.mul(&self.gr.c(), a), &self.gr.mul_t(b))
            })
            .collect();
        let mut relations = self.relations.clone();
        relations.push(extra);
        Presentation::new(&self.gr, self.t, self.e, relations)
    }

    /// R/m presented by the columns p and T.
    pub fn residue_field(gr: &GroupRing) -> Result<Presentation> {
        Presentation::new(
            gr,
            1,
            1,
            vec![vec![gr.from_int(gr.p() as i64)], vec![gr.t()]],
        )
    }

    /// R/I for the ideal generated by `gens`.
    pub fn cyclic(gr: &GroupRing, gens: &[GroupRingElem], e: u32) -> Result<Presentation> {
        Presentation::new(gr, 1, e, gens.iter().map(|g| vec![g.clone()]).collect())
    }
}

fn transfer(gr: &GroupRing, x: &GroupRingElem) -> Result<GroupRingElem> {
    let coeff = gr.coeff();
    let coords =
        x.0.iter()
            .map(|c| coeff.from_coords(c.coords()))
            .collect::<Result<Vec<_>>>()?;
    gr.from_coords(coords)
}

pub(crate) fn flatten(col: &[GroupRingElem]) -> Vec<CoeffElem> {
    col.iter().flat_map(|x| x.0.iter().cloned()).collect()
}

/// m·L = pL + TL for an R-submodule L of R^t.
pub(crate) fn m_times(gr: &GroupRing, lat: &Lattice) -> Lattice {
    let p = gr.p();
    let prime = gr.coeff().from_int(p as i64);
    let mut gens = Vec::with_capacity(2 * lat.basis().len());
    for v in lat.basis() {
        gens.push(v.iter().map(|x| gr.coeff().mul(&prime, x)).collect());
        gens.push(
            v.chunks(p)
                .flat_map(|b| gr.mul_t(&GroupRingElem(b.to_vec())).0)
                .collect(),
        );
    }
    Lattice::new(gr.coeff().clone(), lat.ambient_rank(), gens)
}

/// m·L = pL + TL for an R~-submodule L of R~^t.
pub(crate) fn m_times_tilde(tr: &TildeRing, lat: &Lattice) -> Lattice {
    let ring = lat.ring();
    let prime = ring.from_int(tr.p() as i64);
    let mut gens = Vec::with_capacity(2 * lat.basis().len());
    for v in lat.basis() {
        gens.push(v.iter().map(|x| ring.mul(&prime, x)).collect());
        gens.push(tr.mul_t_vector(v));
    }
    Lattice::new(ring.clone(), lat.ambient_rank(), gens)
}
