use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CampaignConfig;
use crate::coeff::CoeffElem;
use crate::error::{Error, Result};
use crate::groupring::{GroupRing, GroupRingElem};
use crate::modpres::Presentation;

/// Every t×s matrix over the value set, for each (t, s) in the configured
/// ranges, in a fixed order: by t, then s, then the matrix read as a
/// base-|values| numeral with the first entry least significant.
pub struct PresentationStream {
    gr: GroupRing,
    values: Vec<GroupRingElem>,
    e: u32,
    shapes: Vec<(usize, usize, u64)>,
    shape: usize,
    next: u64,
    remaining: u64,
}

impl Iterator for PresentationStream {
    type Item = Presentation;

    fn next(&mut self) -> Option<Presentation> {
        while let Some(&(t, s, count)) = self.shapes.get(self.shape) {
            if self.next == count {
                self.shape += 1;
                self.next = 0;
                continue;
            }
            let base = self.values.len() as u64;
            let mut k = self.next;
            self.next += 1;
            self.remaining -= 1;
            let rels = (0..s)
                .map(|_| {
                    (0..t)
                        .map(|_| {
                            let v = self.values[(k % base) as usize].clone();
                            k /= base;
                            v
                        })
                        .collect()
                })
                .collect();
            return Some(Presentation::new(&self.gr, t, self.e, rels).expect("validated shape"));
        }
        None
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}

impl ExactSizeIterator for PresentationStream {}

pub fn enumerate_presentations(cfg: &CampaignConfig) -> Result<PresentationStream> {
    cfg.validate()?;
    let gr = cfg.group_ring()?;
    let base = cfg.values.len(gr.p());
    let mut shapes = Vec::new();
    let mut total = 0u64;
    for t in cfg.t_min..=cfg.t_max {
        for s in cfg.s_min..=cfg.s_max {
            let count = u32::try_from(t * s)
                .ok()
                .and_then(|k| base.checked_pow(k))
                .filter(|&c| c <= cfg.max_presentations);
            let Some(count) = count else {
                return Err(Error::Capacity(format!(
                    "more than {} presentations",
                    cfg.max_presentations
                )));
            };
            total += count;
            shapes.push((t, s, count));
        }
    }
    if total > cfg.max_presentations {
        return Err(Error::Capacity(format!(
            "{total} presentations exceed the cap {}",
            cfg.max_presentations
        )));
    }
    let values = cfg.values.elements(&gr)?;
    Ok(PresentationStream {
        gr,
        values,
        e: cfg.e,
        shapes,
        shape: 0,
        next: 0,
        remaining: total,
    })
}

/// A small unit of A: coordinates in [-2, 2] with a unit residue.
fn small_unit(gr: &GroupRing, rng: &mut ChaCha8Rng) -> CoeffElem {
    let ring = gr.coeff();
    loop {
        let mut x = ring.zero();
        for k in 0..ring.d() {
            let mut coords = vec![0u64; ring.d()];
            coords[k] = 1;
            let basis = ring.from_coords(&coords).expect("shape");
            x = ring.add(&x, &ring.scale(&basis, rng.gen_range(-2..=2)));
        }
        if ring.is_unit(&x) {
            return x;
        }
    }
}

pub(crate) fn draw(
    gr: &GroupRing,
    values: &[GroupRingElem],
    cfg: &CampaignConfig,
    index: u64,
) -> Presentation {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let t = rng.gen_range(cfg.t_min..=cfg.t_max);
    let s = rng.gen_range(cfg.s_min..=cfg.s_max);
    let mut entry = || {
        let mut x = gr.zero();
        for _ in 0..2 {
            let v = &values[rng.gen_range(0..values.len())];
            let u = small_unit(gr, &mut rng);
            x = gr.add(&x, &gr.scale(&u, v));
        }
        x
    };
    let rels = (0..s).map(|_| (0..t).map(|_| entry()).collect()).collect();
    Presentation::new(gr, t, cfg.e, rels).expect("validated shape")
}

/// The `index`-th random presentation of the campaign: each entry is
/// u1·v1 + u2·v2 with v_i from the value set and u_i small units of A. A
/// function of (seed, index) alone.
pub fn random_presentation(cfg: &CampaignConfig, index: u64) -> Result<Presentation> {
    cfg.validate()?;
    let gr = cfg.group_ring()?;
    let values = cfg.values.elements(&gr)?;
    Ok(draw(&gr, &values, cfg, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ValueSet;

    #[test]
    fn enumeration_counts() {
        let values = ValueSet::Elements(vec![vec![0], vec![1], vec![2], vec![0, 1]]);
        let mut cfg = CampaignConfig::exhaustive(2, 1, 1, 1, values.clone(), 1);
        cfg.s_min = 1;
        assert_eq!(enumerate_presentations(&cfg).unwrap().count(), 4);
        let cfg = CampaignConfig::exhaustive(2, 1, 2, 2, values, 1);
        let stream = enumerate_presentations(&cfg).unwrap();
        assert_eq!(stream.len(), 1 + 16 + 256);
        let mut cfg = CampaignConfig::exhaustive(2, 1, 1, 0, ValueSet::standard(2), 2);
        cfg.s_max = 0;
        let only: Vec<_> = enumerate_presentations(&cfg).unwrap().collect();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].s(), 0);
        assert_eq!(only[0].module_cardinality().unwrap(), 2 * 2);
    }

    #[test]
    fn enumeration_is_distinct_and_ordered() {
        let cfg = CampaignConfig::exhaustive(3, 1, 1, 2, ValueSet::standard(3), 2);
        let all: Vec<_> = enumerate_presentations(&cfg).unwrap().collect();
        assert_eq!(all.len(), 1 + 6 + 36);
        assert!(all.windows(2).all(|w| w[0].s() <= w[1].s()));
        let again: Vec<_> = enumerate_presentations(&cfg).unwrap().collect();
        assert_eq!(all, again);
    }

    #[test]
    fn grid_value_set() {
        let cfg = CampaignConfig::exhaustive(2, 1, 1, 2, ValueSet::Grid((0..6).collect()), 2);
        assert_eq!(
            enumerate_presentations(&cfg).unwrap().len(),
            1 + 36 + 36 * 36
        );
    }

    #[test]
    fn explosion_guard() {
        let mut cfg = CampaignConfig::exhaustive(2, 1, 3, 3, ValueSet::Grid((0..6).collect()), 2);
        cfg.max_presentations = 10_000;
        assert!(matches!(
            enumerate_presentations(&cfg),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn random_draws_are_reproducible() {
        let cfg = CampaignConfig::random(3, 2, 3, 3, 10, 42);
        for index in 0..20 {
            let a = random_presentation(&cfg, index).unwrap();
            let b = random_presentation(&cfg, index).unwrap();
            assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
            assert!((1..=3).contains(&a.t()) && a.s() <= 3);
        }
        let first: Vec<_> = (0..10)
            .map(|i| random_presentation(&cfg, i).unwrap())
            .collect();
        assert!(first.windows(2).any(|w| w[0] != w[1]));
        let mut other = cfg.clone();
        other.seed = 43;
        assert_ne!(
            first[0..5],
            (0..5)
                .map(|i| random_presentation(&other, i).unwrap())
                .collect::<Vec<_>>()[..]
        );
    }
}
