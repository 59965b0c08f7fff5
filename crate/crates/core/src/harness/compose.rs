use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::generate::draw;
use super::{analyze, CampaignConfig};
use crate::decomp::{
    decompose_group_ring, factor_rank, factor_ring, product_check, AbelianGroup, DecompFactor,
    FactorSides, ProductOutcome,
};
use crate::error::Result;
use crate::modpres::{PidPresentation, DEFAULT_MINOR_CAP};

/// A random G with p^2 ∤ #G: up to three cyclic factors of order at most 12.
pub fn random_abelian_group(rng: &mut ChaCha8Rng, p: u64) -> AbelianGroup {
    loop {
        let k = rng.gen_range(1..=3);
        let orders: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=12)).collect();
        if orders.iter().product::<u64>() % (p * p) != 0 {
            return AbelianGroup::new(orders).expect("small orders");
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedCase {
    pub p: u64,
    pub group: AbelianGroup,
    pub factors: Vec<DecompFactor>,
    /// Σ f·(p or 1) = #G.
    pub counting_ok: bool,
    pub sides: Vec<FactorSides>,
    /// Every per-factor report passed all of its own checks.
    pub factor_reports_ok: bool,
    pub outcome: ProductOutcome,
}

impl ComposedCase {
    pub fn holds(&self) -> bool {
        self.counting_ok && self.factor_reports_ok && self.outcome.holds
    }
}

/// Draws G, decomposes Z_p[G], puts a random module on every factor (a
/// presentation over A_f[C_p], or over A_f alone) and checks the inequality
/// for the product module.
pub fn composed_check(p: u64, seed: u64, index: u64) -> Result<ComposedCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let group = random_abelian_group(&mut rng, p);
    check_with(group, p, &mut rng)
}

/// The same check for a given G, with factor modules drawn from `seed`.
pub fn composed_check_group(group: &AbelianGroup, p: u64, seed: u64) -> Result<ComposedCase> {
    check_with(group.clone(), p, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn check_with(group: AbelianGroup, p: u64, rng: &mut ChaCha8Rng) -> Result<ComposedCase> {
    let factors = decompose_group_ring(&group, p)?;
    let counting_ok = factor_rank(&factors, p) == group.order();
    let mut sides = Vec::new();
    let mut factor_reports_ok = true;
    for factor in &factors {
        for _ in 0..factor.multiplicity {
            let sub_seed = rng.gen::<u64>();
            if factor.has_c {
                let mut cfg = CampaignConfig::random(p, factor.f, 2, 2, 1, sub_seed);
                cfg.e = 1;
                let gr = cfg.group_ring()?;
                let values = cfg.values.elements(&gr)?;
                let report = analyze(&draw(&gr, &values, &cfg, 0), DEFAULT_MINOR_CAP)?;
                factor_reports_ok &= report.flags.all_pass();
                sides.push(FactorSides::from(&report));
            } else {
                let pres = random_pid_presentation(rng, p, factor.f)?;
                let report = pres.analyze(DEFAULT_MINOR_CAP)?;
                factor_reports_ok &= report.holds();
                sides.push(FactorSides::from_pid(factor.f, &report));
            }
        }
    }
    let outcome = product_check(&group, p, &sides)?;
    Ok(ComposedCase {
        p,
        group,
        factors,
        counting_ok,
        sides,
        factor_reports_ok,
        outcome,
    })
}

/// t ≤ 3 generators, s ≤ 3 relations with entries u·p^k (or 0), e = 2.
pub(crate) fn random_pid_presentation(
    rng: &mut ChaCha8Rng,
    p: u64,
    f: usize,
) -> Result<PidPresentation> {
    let e = 2;
    let t = rng.gen_range(1..=3);
    let s = rng.gen_range(0..=3);
    let ring = factor_ring(p, f, e * t as u32 + 2)?;
    let rels = (0..s)
        .map(|_| {
            (0..t)
                .map(|_| {
                    let k = rng.gen_range(0..=e + 1);
                    let u = loop {
                        let coords: Vec<u64> =
                            (0..f).map(|_| rng.gen_range(0..ring.modulus())).collect();
                        let x = ring.from_coords(&coords).expect("shape");
                        if ring.is_unit(&x) {
                            break x;
                        }
                    };
                    ring.mul(&u, &ring.p_pow(k))
                })
                .collect()
        })
        .collect();
    PidPresentation::new(ring, t, e, rels)
}
