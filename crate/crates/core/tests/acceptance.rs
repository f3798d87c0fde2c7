//! End-to-end acceptance checks, one per shipped guarantee.  Run with
//! `--nocapture` to see the per-criterion verdict lines.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fmcg::characterizations::roundtrip;
use fmcg::coarse_structure::{coarse_asdim_verify, sako_property_a_verify, Entourage};
use fmcg::covers_asdim::{lebesgue_pair_check, verify_asdim_witness, Cover, DisjointFamilies};
use fmcg::embedding::{build_embedding, distortion_report, EmbeddingConfig};
use fmcg::fuzzy_space::{
    ball_correspondence_check, default_t_grid, random_metric, random_stationary_space, BuiltinId,
    FuzzyMetric, FuzzySpace,
};
use fmcg::numerics::{op_norm_upper, psd_sqrt, sym_eig, SymMatrix};
use fmcg::property_a::{
    construct_from_cover, ex39_witness, fuzzy_to_metric_radius, metric_to_fuzzy_params,
    subexp_bound, subexp_field, verify_witness, verify_witness_metric, ParamTuple, WitnessFamily,
};
use fmcg::Tolerance;

fn path64() -> FuzzySpace {
    FuzzySpace::builtin(BuiltinId::Path, 64).unwrap()
}

fn halved_cover(n: usize) -> Cover {
    Cover::new(
        n,
        vec![
            (0..n).collect(),
            (0..n / 2).collect(),
            (n / 2..n).collect(),
        ],
    )
    .unwrap()
}

fn standard_from_seed(n: usize, seed: u64) -> (Vec<Vec<f64>>, FuzzySpace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_metric(n, &mut rng);
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let space = FuzzySpace::standard(format!("rand-{seed}"), labels, d.clone()).unwrap();
    (d, space)
}

fn criterion_1_axioms() -> bool {
    let grid = default_t_grid();
    for seed in 0..20u64 {
        let (_, space) = standard_from_seed(32, seed);
        if !space.verify_axioms(&grid, &grid).unwrap().all_passed() {
            return false;
        }
    }
    for id in [BuiltinId::NatRatio, BuiltinId::NatProduct] {
        let space = FuzzySpace::builtin(id, 64).unwrap();
        if !space.verify_axioms(&grid, &grid).unwrap().all_passed() {
            return false;
        }
    }
    // a corrupted entry far above the triangle bound must be caught and the
    // offending tuple named
    let (mut d, _) = standard_from_seed(32, 99);
    d[0][2] = 4.0 * (d[0][1] + d[1][2]);
    d[2][0] = d[0][2];
    let labels = (0..32).map(|i| format!("p{i}")).collect();
    let bad = FuzzySpace::standard("corrupted", labels, d).unwrap();
    let report = bad.verify_axioms(&grid, &grid).unwrap();
    let tri = &report.triangle;
    !tri.passed
        && tri
            .worst
            .as_ref()
            .is_some_and(|v| v.z.is_some() && v.s.is_some())
}

fn criterion_2_ball_correspondence() -> bool {
    let (_, space) = standard_from_seed(32, 1234);
    let mut rng = ChaCha8Rng::seed_from_u64(4321);
    for _ in 0..200 {
        let radius = rng.gen_range(0.1..30.0);
        let t = rng.gen_range(0.05..50.0);
        let r = rng.gen_range(0.01..0.99);
        if !ball_correspondence_check(&space, radius, t, r).unwrap() {
            return false;
        }
    }
    true
}

fn criterion_3_metric_fuzzy_roundtrip() -> bool {
    let space = path64();
    let d = match space.metric() {
        FuzzyMetric::Standard { d } => d.clone(),
        _ => return false,
    };
    let cover = halved_cover(64);
    let radius = 2.0;
    for eps in [1.0, 0.5, 0.1] {
        // metric-side witness at (eps, R); convert to (eps, 1/2, R) and back
        let p = metric_to_fuzzy_params(eps, radius).unwrap();
        let (w, report) = construct_from_cover(&space, &cover, p, 1).unwrap();
        if !report.certificate.pass {
            return false;
        }
        let metric_cert =
            verify_witness_metric(&d, &w, eps, radius, Tolerance::default()).unwrap();
        if !metric_cert.pass {
            return false;
        }
        let back = fuzzy_to_metric_radius(p.r, p.t);
        if (back - radius).abs() > 1e-12 {
            return false;
        }
        let again = verify_witness(&space, &w, p).unwrap();
        if !again.pass {
            return false;
        }
    }
    true
}

fn criterion_4_construction() -> bool {
    let space = path64();
    let cover = halved_cover(64);
    let p = ParamTuple::new(1.0, 0.6, 1.0).unwrap();
    let leb = lebesgue_pair_check(&space, &cover, p.r, p.t).unwrap();
    if !leb.ok {
        return false;
    }
    let (w, report) = construct_from_cover(&space, &cover, p, 1).unwrap();
    let cert = verify_witness(&space, &w, p).unwrap();
    cert.pass && report.max_projection <= 2 && report.worst_delta <= 3
}

fn criterion_5_anchor_witness() -> bool {
    let space = FuzzySpace::builtin(BuiltinId::NatProduct, 50).unwrap();
    for r in [0.5, 0.9, 0.99] {
        let witness = ex39_witness(&space, r).unwrap();
        let p = ParamTuple::new(1e-6, r, space.t_max()).unwrap();
        let cert = verify_witness(&space, &witness.family, p).unwrap();
        if !cert.pass || cert.worst_ratio != 0.0 {
            return false;
        }
    }
    true
}

fn criterion_6_characterization_roundtrip() -> bool {
    let space = path64();
    let cover = halved_cover(64);
    let p = ParamTuple::new(0.01, 0.6, 1.0).unwrap();
    let (w, report) = construct_from_cover(&space, &cover, p, 1).unwrap();
    if !report.certificate.pass {
        return false;
    }
    let rt = roundtrip(&space, &w, p).unwrap();
    rt.pass
        && rt.steps.iter().all(|s| s.pass)
        && rt.final_cert.pass
        && rt.final_cert.worst_ratio < rt.quantization.eps_prime
}

fn criterion_7_averaging_bound() -> bool {
    let space = path64();
    let cover = halved_cover(64);
    let r = 0.6;
    for n in [4usize, 8, 16, 32] {
        let field = subexp_field(&space, &cover, r, n).unwrap();
        let bound = subexp_bound(2, 1.0, n);
        for (x, y) in space.close_pairs(r, 1.0) {
            if x < y && field.l1_distance(x, y) > bound + 1e-12 {
                return false;
            }
        }
    }
    true
}

fn criterion_8_embedding_diagnostics() -> bool {
    let space = path64();
    let cover = halved_cover(64);
    let cfg = EmbeddingConfig::standard(6, 0).unwrap();
    let witnesses: Vec<WitnessFamily> = (0..cfg.levels)
        .map(|i| {
            let (r, t) = cfg.ladder[i];
            let eps_sq = cfg.eps(i) * cfg.eps(i);
            construct_from_cover(&space, &cover, ParamTuple::new(eps_sq, r, t).unwrap(), 1)
                .unwrap()
                .0
        })
        .collect();
    let emb = build_embedding(&space, &witnesses, cfg).unwrap();
    let report = distortion_report(&space, &emb).unwrap();
    if !report.pass {
        return false;
    }
    // distance <= R forces at most R^2/2 maximally separated blocks
    for pair in &report.pairs {
        for radius in [1.0f64, 2.0, 3.0] {
            if pair.dist <= radius && pair.sqrt2_count as f64 > radius * radius / 2.0 {
                return false;
            }
        }
    }
    true
}

fn criterion_9_crosschecks() -> bool {
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
        let n = rng.gen_range(6..=32usize);
        let space = random_stationary_space(format!("x{seed}"), n, &mut rng).unwrap();
        let r = rng.gen_range(0.2..0.9);
        let t = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
        let eps = rng.gen_range(0.3..2.0);

        // random witness family, one to three entries per point
        let heights: Vec<BTreeMap<usize, u32>> = (0..n)
            .map(|_| {
                (0..rng.gen_range(1..=3usize))
                    .map(|_| (rng.gen_range(0..n), rng.gen_range(1..=3u32)))
                    .collect()
            })
            .collect();
        let w = WitnessFamily::from_heights(n, heights).unwrap();
        let p = ParamTuple::new(eps, r, t).unwrap();
        let fuzzy = verify_witness(&space, &w, p).unwrap();
        let e = Entourage::closeness(&space, r, t).unwrap();
        let sako = sako_property_a_verify(&space, &e, &w, eps).unwrap();
        if fuzzy.pass != sako.pass {
            return false;
        }

        // random partition into families of singletons
        let n_families = rng.gen_range(1..=3usize);
        let mut families: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n_families];
        for x in 0..n {
            families[rng.gen_range(0..n_families)].push(vec![x]);
        }
        families.retain(|f| !f.is_empty());
        let fuzzy_dim = verify_asdim_witness(
            &space,
            &DisjointFamilies {
                families: families.clone(),
                r,
                t,
            },
        )
        .unwrap();
        let coarse_dim = coarse_asdim_verify(&space, &e, &families).unwrap();
        if fuzzy_dim.pass != coarse_dim.pass {
            return false;
        }
    }
    true
}

fn criterion_10_numerics() -> bool {
    let n = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(555);
    for _ in 0..100 {
        let mut b = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                b.set(i, j, v);
            }
        }
        let a = b.matmul(&b);
        let mut a_sym = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a_sym.set(i, j, a[i * n + j]);
            }
        }
        let norm = a_sym.frobenius_norm();
        let root = psd_sqrt(&a_sym, Tolerance::default()).unwrap();
        let back = root.matmul(&root);
        let mut err = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                err += (back[i * n + j] - a[i * n + j]).powi(2);
            }
        }
        if err.sqrt() > 1e-8 * norm.max(1.0) {
            return false;
        }
        let eig = sym_eig(&a_sym, Tolerance::default()).unwrap();
        let top = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if (op_norm_upper(&a_sym) - top).abs() > 1e-6 {
            return false;
        }
    }
    true
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> bool)> = vec![
        ("axiom suite with corruption detection", criterion_1_axioms),
        ("metric/fuzzy ball correspondence", criterion_2_ball_correspondence),
        ("metric witness round trip", criterion_3_metric_fuzzy_roundtrip),
        ("witness construction from a cover", criterion_4_construction),
        ("anchor witness on the reciprocal-product space", criterion_5_anchor_witness),
        ("characterization chain round trip", criterion_6_characterization_roundtrip),
        ("subexponential averaging bound", criterion_7_averaging_bound),
        ("embedding diagnostics", criterion_8_embedding_diagnostics),
        ("fuzzy vs coarse-structure verdicts", criterion_9_crosschecks),
        ("matrix square root and operator norm", criterion_10_numerics),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let pass = f();
        println!(
            "criterion {:2}: {} - {}",
            i + 1,
            if pass { "pass" } else { "FAIL" },
            name
        );
        all &= pass;
    }
    assert!(all, "an acceptance criterion failed; see the lines above");
}
