use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{m_times, m_times_tilde, Presentation};
use crate::coeff::{RingConfig, RingSpec};
use crate::error::{Error, Result};
use crate::groupring::{GroupRing, GroupRingElem};
use crate::linalg::{cokernel_cardinality, quotient_cardinality, Lattice};
use crate::normalization::TildeRing;

macro_rules! flag_set {
    ($($name:ident),* $(,)?) => {
        /// Pass/fail outcome of every checked identity.
        #[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
        pub struct Flags {
            $(pub $name: bool,)*
        }

        impl Flags {
            pub const NAMES: &'static [&'static str] = &[$(stringify!($name)),*];

            pub fn entries(&self) -> Vec<(&'static str, bool)> {
                vec![$((stringify!($name), self.$name)),*]
            }
        }
    };
}

flag_set! {
    main_inequality,
    principal_equality,
    dim_at_least_t,
    free_iff_principal,
    counting_identity,
    case1_tilde_equal,
    case2_chain,
    case2_index_split,
    tilde_fit_identity,
    h_mod_mh,
    psi_coker,
    psi_exact_count,
    hk_killed_by_m,
    psi_kernel_killed,
    tau_psi_zero,
    tau_exact,
    nonprincipal_tilde_stable,
    case2_mh_eq_mk,
    base_change_fit,
    fit_multiplicative,
    presentation_independent,
}

impl Flags {
    pub fn all_pass(&self) -> bool {
        self.entries().iter().all(|&(_, ok)| ok)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.entries()
            .into_iter()
            .filter(|&(_, ok)| !ok)
            .map(|(n, _)| n)
            .collect()
    }

    /// Overwrites the flags that are functions of the stored numbers.
    fn set_numeric(&mut self, v: &ModuleValues) {
        let d = v.ring.d as u32;
        let t = v.t as u32;
        self.main_inequality = v.card_log_p <= v.fit_quot_log_p;
        self.principal_equality = !v.principal || v.card_log_p == v.fit_quot_log_p;
        self.dim_at_least_t = v.dim_k_mod_mk >= t;
        self.free_iff_principal = (v.dim_k_mod_mk == t) == v.principal;
        self.counting_identity = v.tilde_card_log_p + v.hk_log_p == v.card_log_p + d * t;
        self.case1_tilde_equal = !v.principal || v.tilde_card_log_p == v.card_log_p;
        self.case2_chain = v.principal || v.tilde_card_log_p == d + v.fit_quot_log_p;
        self.case2_index_split = v.principal || v.hk_log_p + d * v.dim_k_mod_mk == 2 * d * t;
        self.tilde_fit_identity = v.tilde_card_log_p == v.tilde_fit_quot_log_p;
        self.h_mod_mh = v.h_mod_mh_log_p == 2 * d * t;
        self.psi_coker = v.psi_cokernel_log_p == v.m_mod_mm_log_p;
        self.psi_exact_count =
            v.psi_kernel_log_p + v.tilde_card_log_p == v.card_log_p + v.psi_cokernel_log_p;
    }
}

/// Every computed quantity of one module. Cardinalities are log_p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleValues {
    /// The ring at the precision the analysis ran at.
    pub ring: RingSpec,
    pub t: usize,
    pub s: usize,
    pub e: u32,
    pub card_log_p: u32,
    /// Canonical A-basis of Fit_R(M).
    pub fit: Vec<GroupRingElem>,
    pub fit_quot_log_p: u32,
    pub fit_min_gens: u32,
    pub principal: bool,
    #[serde(rename = "dim_K_mod_mK")]
    pub dim_k_mod_mk: u32,
    pub tilde_card_log_p: u32,
    pub tilde_fit_quot_log_p: u32,
    pub hk_log_p: u32,
    pub h_mod_mh_log_p: u32,
    pub m_mod_mm_log_p: u32,
    pub psi_kernel_log_p: u32,
    pub psi_cokernel_log_p: u32,
    pub equality: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UncheckedReport")]
pub struct ModuleReport {
    #[serde(flatten)]
    pub values: ModuleValues,
    pub flags: Flags,
}

#[derive(Deserialize)]
struct UncheckedReport {
    #[serde(flatten)]
    values: ModuleValues,
    flags: Flags,
}

impl TryFrom<UncheckedReport> for ModuleReport {
    type Error = Error;

    fn try_from(raw: UncheckedReport) -> Result<Self> {
        let v = &raw.values;
        let gr = GroupRing::new(Arc::new(RingConfig::from_spec(&v.ring)?))?;
        v.fit.iter().try_for_each(|x| gr.check(x))?;
        let fit = gr.ideal_from_lattice(Lattice::new(
            gr.coeff().clone(),
            gr.p(),
            v.fit.iter().map(|x| x.0.clone()).collect(),
        ))?;
        let mismatch = |what: &str| {
            Error::ConfigMismatch(format!("report field {what} disagrees with the data"))
        };
        if gr.ideal_quotient_card(&fit)? != v.fit_quot_log_p {
            return Err(mismatch("fit_quot_log_p"));
        }
        if gr.is_principal(&fit)? != v.principal {
            return Err(mismatch("principal"));
        }
        if v.equality != (v.card_log_p == v.fit_quot_log_p) {
            return Err(mismatch("equality"));
        }
        let mut expected = raw.flags;
        expected.set_numeric(v);
        if expected != raw.flags {
            return Err(mismatch("flags"));
        }
        Ok(ModuleReport {
            values: raw.values,
            flags: raw.flags,
        })
    }
}

impl ModuleReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<ModuleReport> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Runs every computation on `pres` at its own precision. Use a precision
/// of at least [`Presentation::working_precision`] to avoid exhaustion.
pub fn analyze_presentation(pres: &Presentation, cap: u64) -> Result<ModuleReport> {
    let gr = pres.group_ring();
    let ring = gr.coeff();
    let tr = TildeRing::new(gr);
    let p = gr.p();
    let t = pres.t();
    let n = p * t;

    let k = pres.relation_lattice();
    let card = cokernel_cardinality(n, &k)?;
    let fit = pres.fitting_ideal(cap)?;
    let fit_quot = gr.ideal_quotient_card(&fit)?;
    let fit_min_gens = gr.min_generators(&fit)?;
    let principal = gr.is_principal(&fit)?;
    let mk = m_times(gr, &k);
    let dim = quotient_cardinality(&k, &mk)? / ring.q_log();

    let eta_k = tr.eta_lattice(&k);
    let h = tr.closure(&eta_k);
    let h = h.lattice();
    let tilde_card = cokernel_cardinality(n, h)?;
    let hk = quotient_cardinality(h, &eta_k)?;
    let mh = m_times_tilde(&tr, h);
    let h_mod_mh = quotient_cardinality(h, &mh)?;

    let full = Lattice::full(ring.clone(), n);
    let eta_full = tr.eta_lattice(&full);
    let psi_image_plus_h = eta_full.sum(h)?;
    let coker_psi = cokernel_cardinality(n, &psi_image_plus_h)?;
    let ker_lift = eta_full.intersection(h)?;
    let ker_psi = quotient_cardinality(&ker_lift, &eta_k)?;
    let m_mod_mm = cokernel_cardinality(n, &k.sum(&m_times(gr, &full))?)?;

    // tau: R~^t -> M/mM is blockwise vartheta followed by reduction mod the
    // image of K; its kernel is ker(vartheta)^t + e1·eta(K).
    let tau_kernel =
        block_vartheta_kernel(&tr, t).extend(eta_k.basis().iter().map(|v| tr.e1_vector(v)));
    let generators_die = full.basis().iter().all(|v| {
        tr.eta_vector(v).chunks(p).all(|b| {
            tr.vartheta(&crate::normalization::TildeElem(b.to_vec()))
                .iter()
                .all(|&c| c == 0)
        })
    });
    let tau_psi_zero = generators_die && tau_kernel.contains(h)?;
    let tau_exact = tau_kernel == psi_image_plus_h;

    let tilde_fit = pres.tilde_fitting_ideal(&tr, cap)?;
    let tilde_fit_quot = tr.tilde_quotient_card(&tilde_fit)?;
    let base_change_fit = tilde_fit == tr.extend_ideal(&fit);

    let partner = Presentation::residue_field(gr)?;
    let fit_multiplicative = pres.direct_sum(&partner)?.fitting_ideal(cap)?
        == gr.ideal_product(&fit, &gr.maximal_ideal());
    let presentation_independent = pres.with_redundant_column()?.fitting_ideal(cap)? == fit;

    let values = ModuleValues {
        ring: ring.spec(),
        t,
        s: pres.s(),
        e: pres.e(),
        card_log_p: card,
        fit: fit.elements(),
        fit_quot_log_p: fit_quot,
        fit_min_gens,
        principal,
        dim_k_mod_mk: dim,
        tilde_card_log_p: tilde_card,
        tilde_fit_quot_log_p: tilde_fit_quot,
        hk_log_p: hk,
        h_mod_mh_log_p: h_mod_mh,
        m_mod_mm_log_p: m_mod_mm,
        psi_kernel_log_p: ker_psi,
        psi_cokernel_log_p: coker_psi,
        equality: card == fit_quot,
    };
    let mut flags = Flags {
        hk_killed_by_m: eta_k.contains(&mh)?,
        psi_kernel_killed: eta_k.contains(&m_times_tilde(&tr, &ker_lift))?,
        tau_psi_zero,
        tau_exact,
        nonprincipal_tilde_stable: principal || tr.is_tilde_stable(&fit),
        case2_mh_eq_mk: principal || tr.eta_lattice(&mk) == mh,
        base_change_fit,
        fit_multiplicative,
        presentation_independent,
        ..Flags::default()
    };
    flags.set_numeric(&values);
    Ok(ModuleReport { values, flags })
}

fn block_vartheta_kernel(tr: &TildeRing, t: usize) -> Lattice {
    let block = tr.vartheta_kernel();
    let p = tr.p();
    let ring = block.ring().clone();
    let mut gens = Vec::new();
    for i in 0..t {
        for b in block.basis() {
            let mut v = vec![ring.zero(); p * t];
            v[i * p..(i + 1) * p].clone_from_slice(b);
            gens.push(v);
        }
    }
    Lattice::new(ring, p * t, gens)
}
