//! Presentation generators, per-case analysis, brute-force oracles and
//! campaign orchestration.

mod analyze;
mod campaign;
mod compose;
mod generate;
mod oracle;

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coeff::{is_prime, RingConfig};
use crate::error::{Error, Result};
use crate::groupring::{GroupRing, GroupRingElem};
use crate::modpres::DEFAULT_MINOR_CAP;

pub use analyze::{analyze, analyze_with_retries, Analysis};
pub use campaign::{
    campaign, campaign_detailed, write_outputs, CampaignSummary, CaseOutcome, CaseRow, Violation,
};
pub use compose::{composed_check, composed_check_group, random_abelian_group, ComposedCase};
pub use generate::{enumerate_presentations, random_presentation, PresentationStream};
pub use oracle::{oracle_check, OracleOutcome, ORACLE_MAX_ELEMENTS};

/// Campaign precision retries: Nprec is doubled at most this many times.
pub const CAMPAIGN_RETRIES: u32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// e·t_max + e + 2.
    #[default]
    Auto,
    Fixed(u32),
}

impl std::str::FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Precision::Auto);
        }
        s.parse().map(Precision::Fixed).map_err(|_| {
            Error::InvalidConfig(format!(
                "precision must be \"auto\" or an integer, got {s:?}"
            ))
        })
    }
}

/// The entries relation matrices are drawn from. Elements are written as
/// integer coefficients of 1, T, T^2, ...
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueSet {
    Elements(Vec<Vec<i64>>),
    /// Every element whose T-coefficients all lie in the grid.
    Grid(Vec<i64>),
}

impl ValueSet {
    /// {0, 1, p, T, 1+T, p+T}.
    pub fn standard(p: u64) -> Self {
        let p = p as i64;
        ValueSet::Elements(vec![
            vec![0],
            vec![1],
            vec![p],
            vec![0, 1],
            vec![1, 1],
            vec![p, 1],
        ])
    }

    pub fn len(&self, p: usize) -> u64 {
        match self {
            ValueSet::Elements(v) => v.len() as u64,
            ValueSet::Grid(g) => (g.len() as u64).saturating_pow(p as u32),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ValueSet::Elements(v) => v.is_empty(),
            ValueSet::Grid(g) => g.is_empty(),
        }
    }

    pub fn elements(&self, gr: &GroupRing) -> Result<Vec<GroupRingElem>> {
        let p = gr.p();
        let lift = |coords: &[i64]| {
            if coords.len() > p {
                return Err(Error::InvalidConfig(format!(
                    "value {coords:?} has more than p = {p} coefficients"
                )));
            }
            let mut full = coords.to_vec();
            full.resize(p, 0);
            Ok(gr.from_ints(&full))
        };
        match self {
            ValueSet::Elements(v) => v.iter().map(|c| lift(c)).collect(),
            ValueSet::Grid(g) => {
                let total = self.len(p);
                if total > 1 << 20 {
                    return Err(Error::Capacity(format!("grid yields {total} values")));
                }
                (0..total)
                    .map(|mut k| {
                        let coords: Vec<i64> = (0..p)
                            .map(|_| {
                                let c = g[(k % g.len() as u64) as usize];
                                k /= g.len() as u64;
                                c
                            })
                            .collect();
                        lift(&coords)
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Random,
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub p: u64,
    pub d: usize,
    pub precision: Precision,
    pub t_min: usize,
    pub t_max: usize,
    pub s_min: usize,
    pub s_max: usize,
    pub values: ValueSet,
    /// Kill exponent: every presentation includes p^e·e_i.
    pub e: u32,
    pub samples: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub minor_cap: u64,
    /// Exhaustive mode refuses to enumerate more presentations than this.
    pub max_presentations: u64,
    /// Writes the JSON summary here and the per-case CSV next to it.
    pub out: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn random(p: u64, d: usize, t_max: usize, s_max: usize, samples: usize, seed: u64) -> Self {
        CampaignConfig {
            p,
            d,
            precision: Precision::Auto,
            t_min: 1,
            t_max,
            s_min: 0,
            s_max,
            values: ValueSet::standard(p),
            e: 2,
            samples,
            seed,
            mode: Mode::Random,
            threads: None,
            minor_cap: DEFAULT_MINOR_CAP,
            max_presentations: 1_000_000,
            out: None,
        }
    }

    pub fn exhaustive(p: u64, d: usize, t: usize, s_max: usize, values: ValueSet, e: u32) -> Self {
        CampaignConfig {
            t_min: t,
            t_max: t,
            values,
            e,
            mode: Mode::Exhaustive,
            samples: 1,
            ..CampaignConfig::random(p, d, t, s_max, 1, 0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !is_prime(self.p) {
            return fail(format!("p = {} is not prime", self.p));
        }
        if self.d == 0 {
            return fail("d must be at least 1".into());
        }
        if self.t_min == 0 || self.t_min > self.t_max {
            return fail(format!(
                "bad generator range {}..={}",
                self.t_min, self.t_max
            ));
        }
        if self.s_min > self.s_max {
            return fail(format!(
                "bad relation range {}..={}",
                self.s_min, self.s_max
            ));
        }
        if self.e == 0 {
            return fail("kill exponent e must be at least 1".into());
        }
        if self.mode == Mode::Random && self.samples == 0 {
            return fail("sample count must be at least 1".into());
        }
        if self.values.is_empty() {
            return fail("the value set is empty".into());
        }
        if self.nprec() < self.e {
            return fail(format!(
                "precision {} is below the kill exponent {}",
                self.nprec(),
                self.e
            ));
        }
        Ok(())
    }

    /// The precision presentations are declared at.
    pub fn nprec(&self) -> u32 {
        match self.precision {
            Precision::Auto => self.e * self.t_max as u32 + self.e + 2,
            Precision::Fixed(n) => n,
        }
    }

    pub fn group_ring(&self) -> Result<GroupRing> {
        GroupRing::new(Arc::new(RingConfig::new(
            self.p,
            self.d,
            self.nprec(),
            None,
        )?))
    }
}
