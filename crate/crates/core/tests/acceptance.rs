//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status if
//! any criterion fails. All tolerances are exact integer equalities; the
//! only thresholds are wall-clock budgets.

use std::sync::Arc;
use std::time::{Duration, Instant};

use fitbound_core::harness::{campaign, composed_check, oracle_check, random_presentation};
use fitbound_core::linalg::{cokernel_cardinality, snf_valuations};
use fitbound_core::modpres::{analyze_presentation, DEFAULT_MINOR_CAP};
use fitbound_core::{
    CampaignConfig, CampaignSummary, CoeffElem, GroupRing, PidPresentation, Precision,
    Presentation, RingConfig, TildeRing, ValueSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, budget_secs: u64) -> bool {
    elapsed < Duration::from_secs(budget_secs)
}

fn passes(summary: &CampaignSummary, flag: &str) -> u64 {
    summary.invariant_passes[flag]
}

fn exhaustive_summary() -> (CampaignSummary, Duration) {
    // t = 1, s <= 2, entries a + bT with a, b in {0, ..., 5}
    let cfg = CampaignConfig::exhaustive(2, 1, 1, 2, ValueSet::Grid((0..6).collect()), 2);
    let start = Instant::now();
    let summary = campaign(&cfg).expect("exhaustive campaign");
    (summary, start.elapsed())
}

fn criterion_exhaustive(summary: &CampaignSummary, elapsed: Duration) -> Outcome {
    let pass = summary.passed()
        && summary.cases == 1 + 36 + 36 * 36
        && summary.analyzed == summary.cases
        && passes(summary, "main_inequality") == summary.analyzed
        && passes(summary, "principal_equality") == summary.analyzed
        && within(elapsed, 60);
    outcome(
        pass,
        format!(
            "{} presentations, {} violations, {} principal (all equal), {} strict, {} non-principal equalities, {:.2}s",
            summary.cases,
            summary.violations.len(),
            summary.principal_cases,
            summary.strict_cases,
            summary.nonprincipal_equality_cases,
            elapsed.as_secs_f64()
        ),
    )
}

fn random_summaries() -> Vec<(CampaignSummary, Duration)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        for d in [1usize, 2] {
            let cfg = CampaignConfig::random(p, d, 3, 3, 1000, SEED);
            let start = Instant::now();
            let summary = campaign(&cfg).expect("random campaign");
            out.push((summary, start.elapsed()));
        }
    }
    out
}

fn criterion_random(runs: &[(CampaignSummary, Duration)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (s, elapsed) in runs {
        let ok = s.passed() && s.analyzed == 1000 && within(*elapsed, 300);
        pass &= ok;
        parts.push(format!(
            "p={} d={}: {} viol, {} indet, {:.1}s",
            s.config.p,
            s.config.d,
            s.violations.len(),
            s.indeterminate.len(),
            elapsed.as_secs_f64()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_k_times_k() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, d) in [(2u64, 1usize), (2, 2), (3, 1), (3, 2), (5, 1), (7, 1)] {
        let gr = GroupRing::new(Arc::new(RingConfig::new(p, d, 2, None).unwrap())).unwrap();
        let (pe, t, z) = (gr.from_int(p as i64), gr.t(), gr.zero());
        let rels = vec![
            vec![pe.clone(), z.clone()],
            vec![t.clone(), z.clone()],
            vec![z.clone(), pe],
            vec![z, t],
        ];
        let pres = Presentation::new(&gr, 2, 1, rels).unwrap();
        let lifted = pres.at_precision(pres.working_precision()).unwrap();
        let r = analyze_presentation(&lifted, DEFAULT_MINOR_CAP).unwrap();
        let lifted_gr = lifted.group_ring();
        let dim_m = lifted_gr
            .min_generators(&lifted_gr.maximal_ideal())
            .unwrap();
        let d = d as u32;
        let ok = r.values.card_log_p == 2 * d
            && r.values.fit_quot_log_p == d * (1 + dim_m)
            && dim_m == 2;
        pass &= ok;
        parts.push(format!(
            "p={p} d={d}: #M=p^{} #R/Fit=p^{}",
            r.values.card_log_p, r.values.fit_quot_log_p
        ));
    }
    outcome(pass, parts.join("; "))
}

fn all_campaigns<'a>(
    exhaustive: &'a CampaignSummary,
    random: &'a [(CampaignSummary, Duration)],
) -> Vec<&'a CampaignSummary> {
    std::iter::once(exhaustive)
        .chain(random.iter().map(|(s, _)| s))
        .collect()
}

fn criterion_flags(
    campaigns: &[&CampaignSummary],
    flags: &[&str],
    count: impl Fn(&CampaignSummary) -> u64,
) -> Outcome {
    let mut pass = true;
    let mut checked = 0;
    for s in campaigns {
        for flag in flags {
            pass &= passes(s, flag) == s.analyzed;
        }
        checked += count(s);
    }
    pass &= checked > 0;
    outcome(
        pass,
        format!(
            "{checked} cases checked across {} campaigns",
            campaigns.len()
        ),
    )
}

fn criterion_tilde_stable(campaigns: &[&CampaignSummary]) -> Outcome {
    let mut pass = true;
    let (mut ideals, mut powers) = (0, 0);
    for s in campaigns {
        pass &= passes(s, "nonprincipal_tilde_stable") == s.analyzed;
        pass &= passes(s, "maximal_power_tilde_stable") == s.maximal_power_checks.len() as u64;
        pass &= !s.maximal_power_checks.is_empty();
        ideals += s.nonprincipal_cases;
        powers += s.maximal_power_checks.len();
    }
    outcome(
        pass,
        format!("{ideals} non-principal Fitting ideals, {powers} powers of m"),
    )
}

fn criterion_oracle() -> Outcome {
    let mut cfg = CampaignConfig::random(2, 1, 2, 3, 600, SEED);
    cfg.precision = Precision::Fixed(2);
    cfg.e = 1;
    let start = Instant::now();
    let mut agree = 0;
    let mut total = 0;
    for index in 0..cfg.samples as u64 {
        let pres = random_presentation(&cfg, index).unwrap();
        total += 1;
        if oracle_check(&pres, DEFAULT_MINOR_CAP).is_ok_and(|o| o.agrees()) {
            agree += 1;
        }
    }
    // every module with t = 1 and s <= 2 over the standard values as well
    let mut small = CampaignConfig::exhaustive(2, 1, 1, 2, ValueSet::standard(2), 1);
    small.precision = Precision::Fixed(2);
    for pres in fitbound_core::harness::enumerate_presentations(&small).unwrap() {
        total += 1;
        if oracle_check(&pres, DEFAULT_MINOR_CAP).is_ok_and(|o| o.agrees()) {
            agree += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        total >= 500 && agree == total && within(elapsed, 120),
        format!("{agree}/{total} agree, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn criterion_pid() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut ok = 0;
    let total = 200;
    for _ in 0..total {
        let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let d = rng.gen_range(1..=3);
        let t = rng.gen_range(1..=3);
        let s = rng.gen_range(0..=4);
        let e = rng.gen_range(1..=3);
        let ring = Arc::new(RingConfig::new(p, d, e, None).unwrap());
        let rels: Vec<Vec<CoeffElem>> = (0..s)
            .map(|_| {
                (0..t)
                    .map(|_| {
                        let coords: Vec<u64> =
                            (0..d).map(|_| rng.gen_range(0..ring.modulus())).collect();
                        let k = rng.gen_range(0..=e);
                        ring.mul(&ring.from_coords(&coords).unwrap(), &ring.p_pow(k))
                    })
                    .collect()
            })
            .collect();
        let pres = PidPresentation::new(ring, t, e, rels).unwrap();
        if pres.analyze(DEFAULT_MINOR_CAP).is_ok_and(|r| r.holds()) {
            ok += 1;
        }
    }
    outcome(
        ok == total,
        format!("{ok}/{total} modules with #L = #A/Fit_A(L)"),
    )
}

fn criterion_exactness() -> Outcome {
    let mut pass = true;
    let mut configs = 0;
    for p in [2u64, 3, 5, 7, 11] {
        for d in [1usize, 2, 3] {
            for nprec in [2u32, 4] {
                let gr =
                    GroupRing::new(Arc::new(RingConfig::new(p, d, nprec, None).unwrap())).unwrap();
                let tr = TildeRing::new(&gr);
                let ring = gr.coeff();
                // eta has full rank with a single elementary divisor p
                let divisors = snf_valuations(ring, &tr.eta_matrix());
                let injective = divisors.len() == p as usize && divisors.iter().sum::<u32>() == 1;
                let image = tr.eta_lattice(gr.unit_ideal().lattice());
                let exact = image == tr.vartheta_kernel();
                let index = cokernel_cardinality(p as usize, &image).unwrap() == d as u32;
                pass &= injective && exact && index;
                configs += 1;
            }
        }
    }
    outcome(pass, format!("{configs} ring configurations"))
}

fn criterion_decomposition() -> Outcome {
    let mut ok = 0;
    let total = 50;
    let mut factors = 0;
    for index in 0..total {
        let p = [2u64, 3, 5][index as usize % 3];
        match composed_check(p, SEED, index) {
            Ok(case) if case.holds() => {
                ok += 1;
                factors += case.sides.len();
            }
            _ => {}
        }
    }
    outcome(
        ok == total,
        format!("{ok}/{total} groups, {factors} factor modules"),
    )
}

fn report(failed: &mut usize, name: &str, o: Outcome) {
    println!(
        "criterion {name}: {} ({})",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
    if !o.pass {
        *failed += 1;
    }
}

fn main() {
    let mut failed = 0;
    let (exhaustive, exhaustive_time) = exhaustive_summary();
    report(
        &mut failed,
        "1 exhaustive sweep p=2 d=1 t=1 s<=2",
        criterion_exhaustive(&exhaustive, exhaustive_time),
    );
    let random = random_summaries();
    report(
        &mut failed,
        "2 random campaigns p in {2,3,5}, d in {1,2}",
        criterion_random(&random),
    );
    report(
        &mut failed,
        "3 k x k: #M = q^2, #R/Fit = q^3",
        criterion_k_times_k(),
    );
    let campaigns = all_campaigns(&exhaustive, &random);
    report(
        &mut failed,
        "4 non-principal chain and counting identity",
        criterion_flags(&campaigns, &["case2_chain", "counting_identity"], |s| {
            s.nonprincipal_cases
        }),
    );
    report(
        &mut failed,
        "5 #H/mH = q^(2t)",
        criterion_flags(&campaigns, &["h_mod_mh"], |s| s.analyzed),
    );
    report(
        &mut failed,
        "6 non-principal Fit and powers of m are R~-ideals",
        criterion_tilde_stable(&campaigns),
    );
    report(
        &mut failed,
        "7 brute-force oracle p=2 d=1 Nprec=2 t<=2",
        criterion_oracle(),
    );
    report(
        &mut failed,
        "8 PID cardinality via elementary divisors",
        criterion_pid(),
    );
    report(
        &mut failed,
        "9 0 -> R -> R~ -> F_q -> 0 exact, index q",
        criterion_exactness(),
    );
    report(
        &mut failed,
        "10 decomposition of Z_p[G] and product check",
        criterion_decomposition(),
    );
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
