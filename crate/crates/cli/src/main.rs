//! fmcg: verify fuzzy metric space axioms, Property A certificates, covers,
//! coarse maps, and Hilbert space embedding diagnostics from the command line.
//!
//! Exit codes: 0 all certificates pass, 1 a certificate failed (reports are
//! still written), 2 malformed input.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use fmcg::characterizations::{
    kernel_to_operator, propagation_compose, roundtrip,
};
use fmcg::coarse_maps::{
    check_effectively_proper, check_uniformly_expansive, find_coarse_inverse,
    metric_target_moduli, restrict_witness, transport_witness, DEFAULT_LADDER,
};
use fmcg::coarse_structure::{
    coarse_asdim_verify, coarse_axioms_check, sako_property_a_verify, Entourage,
};
use fmcg::covers_asdim::{
    ad_x_estimate, enlarge_family, lebesgue_pair_check, multiplicity, rt_disjointness,
    verify_asdim_witness, DisjointFamilies,
};
use fmcg::embedding::{build_embedding, distortion_report, EmbeddingConfig};
use fmcg::formats;
use fmcg::fuzzy_space::{default_t_grid, random_stationary_space, BuiltinId, FuzzySpace};
use fmcg::property_a::{
    construct_from_cover, ex39_witness, subexp_bound, subexp_field, verify_witness, ParamTuple,
};
use fmcg::{Error, Result, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(name = "fmcg", version, about = "Coarse geometry of finite fuzzy metric spaces")]
struct Cli {
    /// output format for the report
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// write the JSON report to this path
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// comparison tolerance as "tau,margin"
    #[arg(long, global = true, value_delimiter = ',', num_args = 2)]
    tol: Option<Vec<f64>>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the fuzzy metric axioms over a time grid
    VerifyAxioms {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_delimiter = ',')]
        t_grid: Option<Vec<f64>>,
    },
    /// List the ball B(x, r, t)
    Ball {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        t: f64,
    },
    /// Emit a builtin or seeded random space file
    Gen {
        /// nat-ratio | nat-product | path | grid-z | random
        #[arg(long)]
        builtin: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Property A witnesses: verify, construct, and bound
    PropertyA {
        #[command(subcommand)]
        cmd: PropertyACmd,
    },
    /// Walk the characterization chain between witness, field, kernel, and
    /// operator forms
    Transform {
        /// i-ii | ii-iii | iii-iv | iv-v | v-vi | vi-iii | iii-i | roundtrip
        #[arg(long)]
        step: Step,
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
        /// kernel file; runs iv-v directly from it
        #[arg(long)]
        kernel: Option<PathBuf>,
        /// operator file; required for v-vi
        #[arg(long)]
        operator: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Asymptotic dimension witnesses and estimates
    Asdim {
        #[command(subcommand)]
        cmd: AsdimCmd,
    },
    /// Coarse map diagnostics
    CoarseMap {
        #[command(subcommand)]
        cmd: CoarseMapCmd,
    },
    /// Truncated Hilbert space embedding
    Embed {
        #[command(subcommand)]
        cmd: EmbedCmd,
    },
    /// Compare fuzzy-level and coarse-space-level verdicts
    Appendix {
        #[command(subcommand)]
        cmd: AppendixCmd,
    },
}

#[derive(Subcommand)]
enum PropertyACmd {
    /// Verify a witness family against its parameter tuple
    Verify {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Build a witness from a cover with a verified Lebesgue pair
    FromCover {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        t: f64,
        /// cover multiplicity budget: at most n+1
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Anchor witness on the reciprocal-product space
    Ex39 {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
    },
    /// Averaged unit-vector field with the subexponential variation bound
    Subexp {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        r: f64,
        /// averaging depth
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Step {
    #[value(name = "i-ii")]
    IToII,
    #[value(name = "ii-iii")]
    IIToIII,
    #[value(name = "iii-iv")]
    IIIToIV,
    #[value(name = "iv-v")]
    IVToV,
    #[value(name = "v-vi")]
    VToVI,
    #[value(name = "vi-iii")]
    VIToIII,
    #[value(name = "iii-i")]
    IIIToI,
    Roundtrip,
}

#[derive(Subcommand)]
enum AsdimCmd {
    /// Verify n+1 disjoint families as an asymptotic dimension witness
    Verify {
        #[arg(long)]
        space: PathBuf,
        /// families file: {"r", "t", "families": [[["label", ...], ...], ...]}
        #[arg(long)]
        families: PathBuf,
    },
    /// Enlarge a family by (r,t)-balls and report the disjointness margin
    Enlarge {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        t: f64,
    },
    /// Greedy upper bounds for the dimension function over a time ladder
    Adx {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CoarseMapCmd {
    /// Expansiveness and properness modulus tables
    Check {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<f64>>,
    },
    /// Search for a coarse inverse and verify both compositions
    Inverse {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Push a witness family through a coarse equivalence
    Transport {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Restrict a witness family to a subspace
    Restrict {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        /// comma-separated point labels of the subspace
        #[arg(long, value_delimiter = ',')]
        subset: Vec<String>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
}

#[derive(Subcommand)]
enum EmbedCmd {
    /// Build level witnesses from a cover and assemble the embedding
    Build {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// base point label; its image is the origin
        #[arg(long)]
        base: String,
    },
    /// Build the embedding and run the full pairwise diagnostics
    Report {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long)]
        base: String,
    },
}

#[derive(Subcommand)]
enum AppendixCmd {
    /// Fuzzy witness verdict vs the entourage-level verdict, plus the
    /// coarse structure axioms on sample entourages
    Crosscheck {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
}

#[derive(Debug, Deserialize, Serialize)]
struct FamiliesFile {
    r: f64,
    t: f64,
    families: Vec<Vec<Vec<String>>>,
}

struct Output {
    format: Format,
    out: Option<PathBuf>,
}

impl Output {
    fn emit<T: Serialize>(&self, report: &T, summary: &str) -> Result<()> {
        let text = serde_json::to_string_pretty(report)?;
        if let Some(path) = &self.out {
            std::fs::write(path, &text)?;
        }
        match self.format {
            Format::Json => println!("{text}"),
            Format::Text => println!("{summary}"),
        }
        Ok(())
    }
}

fn load_space(path: &PathBuf, tol: &Option<Vec<f64>>) -> Result<FuzzySpace> {
    let mut space = formats::load_space(path)?;
    if let Some(pair) = tol {
        space.set_tolerance(Tolerance::new(pair[0], pair[1])?);
    }
    Ok(space)
}

fn resolve_params(
    file: Option<ParamTuple>,
    eps: Option<f64>,
    r: Option<f64>,
    t: Option<f64>,
) -> Result<ParamTuple> {
    let pick = |flag: Option<f64>, from_file: Option<f64>, name: &str| {
        flag.or(from_file)
            .ok_or_else(|| Error::Format(format!("missing parameter {name}: pass --{name} or put params in the witness file")))
    };
    ParamTuple::new(
        pick(eps, file.map(|p| p.eps), "eps")?,
        pick(r, file.map(|p| p.r), "r")?,
        pick(t, file.map(|p| p.t), "t")?,
    )
}

fn main() {
    let cli = Cli::parse();
    let output = Output {
        format: cli.format,
        out: cli.out.clone(),
    };
    match run(&cli, &output) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(Error::Rejected(msg)) => {
            eprintln!("rejected: {msg}");
            std::process::exit(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn run(cli: &Cli, out: &Output) -> Result<bool> {
    match &cli.cmd {
        Cmd::VerifyAxioms { space, t_grid } => {
            let space = load_space(space, &cli.tol)?;
            let grid = t_grid.clone().unwrap_or_else(default_t_grid);
            let report = space.verify_axioms(&grid, &grid)?;
            let pass = report.all_passed();
            out.emit(
                &report,
                &format!(
                    "axioms {} on {} ({} points, {} grid times)",
                    verdict(pass),
                    space.name(),
                    space.len(),
                    grid.len()
                ),
            )?;
            Ok(pass)
        }
        Cmd::Ball { space, point, r, t } => {
            let space = load_space(space, &cli.tol)?;
            let x = space.points().index_of(point)?;
            let ball = space.ball(x, *r, *t)?;
            let labels: Vec<&str> = ball.iter().map(|&y| space.points().label(y)).collect();
            out.emit(
                &json!({"point": point, "r": r, "t": t, "ball": labels}),
                &format!("B({point}, {r}, {t}) = {{{}}}", labels.join(", ")),
            )?;
            Ok(true)
        }
        Cmd::Gen { builtin, n, seed } => {
            let space = if builtin == "random" {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                random_stationary_space(format!("random-{n}-{seed}"), *n, &mut rng)?
            } else {
                let id: BuiltinId = serde_json::from_value(json!(builtin))
                    .map_err(|_| Error::Format(format!("unknown builtin {builtin:?}")))?;
                FuzzySpace::builtin(id, *n)?
            };
            let text = formats::space_to_json(&space)?;
            if let Some(path) = &out.out {
                std::fs::write(path, &text)?;
                println!("wrote {} ({} points)", space.name(), space.len());
            } else {
                println!("{text}");
            }
            Ok(true)
        }
        Cmd::PropertyA { cmd } => run_property_a(cli, cmd, out),
        Cmd::Transform {
            step,
            space,
            witness,
            kernel,
            operator,
            eps,
            r,
            t,
        } => run_transform(cli, *step, space, witness, kernel, operator, *eps, *r, *t, out),
        Cmd::Asdim { cmd } => run_asdim(cli, cmd, out),
        Cmd::CoarseMap { cmd } => run_coarse_map(cli, cmd, out),
        Cmd::Embed { cmd } => run_embed(cli, cmd, out),
        Cmd::Appendix { cmd } => run_appendix(cli, cmd, out),
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn run_property_a(cli: &Cli, cmd: &PropertyACmd, out: &Output) -> Result<bool> {
    match cmd {
        PropertyACmd::Verify {
            space,
            witness,
            eps,
            r,
            t,
        } => {
            let space = load_space(space, &cli.tol)?;
            let (w, file_params) = formats::load_witness(witness, &space)?;
            let p = resolve_params(file_params, *eps, *r, *t)?;
            let cert = verify_witness(&space, &w, p)?;
            let pass = cert.pass;
            out.emit(
                &cert,
                &format!(
                    "witness {} at (eps={}, r={}, t={}): worst ratio {:.6} over {} close pairs",
                    verdict(pass),
                    p.eps,
                    p.r,
                    p.t,
                    cert.worst_ratio,
                    cert.close_pairs
                ),
            )?;
            Ok(pass)
        }
        PropertyACmd::FromCover {
            space,
            cover,
            eps,
            r,
            t,
            n,
        } => {
            let space = load_space(space, &cli.tol)?;
            let cover = formats::load_cover(cover, &space)?;
            let p = ParamTuple::new(*eps, *r, *t)?;
            let (w, report) = construct_from_cover(&space, &cover, p, *n)?;
            let pass = report.certificate.pass;
            let summary = format!(
                "construction {}: K={}, T={:.4}, R={:.6}, worst delta {}, worst ratio {:.6}",
                verdict(pass),
                report.k,
                report.big_t,
                report.big_r,
                report.worst_delta,
                report.certificate.worst_ratio
            );
            if let Some(path) = &out.out {
                std::fs::write(path, formats::witness_to_json(&w, Some(p), &space)?)?;
            }
            match out.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                Format::Text => println!("{summary}"),
            }
            Ok(pass)
        }
        PropertyACmd::Ex39 { space, r, eps } => {
            let space = load_space(space, &cli.tol)?;
            let witness = ex39_witness(&space, *r)?;
            let p = ParamTuple::new(*eps, *r, space.t_max())?;
            let cert = verify_witness(&space, &witness.family, p)?;
            let pass = cert.pass;
            let summary = format!(
                "anchor witness {} at r={}: threshold N={}, worst ratio {:.6}",
                verdict(pass),
                r,
                witness.threshold,
                cert.worst_ratio
            );
            if let Some(path) = &out.out {
                std::fs::write(
                    path,
                    formats::witness_to_json(&witness.family, Some(p), &space)?,
                )?;
            }
            match out.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&cert)?),
                Format::Text => println!("{summary}"),
            }
            Ok(pass)
        }
        PropertyACmd::Subexp { space, cover, r, n } => {
            let space = load_space(space, &cli.tol)?;
            let cover = formats::load_cover(cover, &space)?;
            let field = subexp_field(&space, &cover, *r, *n)?;
            let mult = multiplicity(&cover, space.len());
            // worst variation over pairs close at (r, t) for t up to the
            // averaging depth, against the bound 2(1 - mult^(-2t/n))
            let mut rows = Vec::new();
            let mut pass = true;
            for t in 1..=*n {
                let t = t as f64;
                let bound = subexp_bound(mult, t, *n);
                let mut worst = 0.0f64;
                for (x, y) in space.close_pairs(field.r, t) {
                    if x < y {
                        worst = worst.max(field.l1_distance(x, y));
                    }
                }
                if worst > bound + space.tolerance().tau {
                    pass = false;
                }
                rows.push(json!({"t": t, "worst": worst, "bound": bound}));
            }
            out.emit(
                &json!({
                    "n": n,
                    "r": field.r,
                    "r_prime": field.r_prime,
                    "multiplicity": mult,
                    "rows": rows,
                    "pass": pass,
                }),
                &format!(
                    "averaged field {} at depth n={} (multiplicity {}, r'={:.6})",
                    verdict(pass),
                    n,
                    mult,
                    field.r_prime
                ),
            )?;
            Ok(pass)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_transform(
    cli: &Cli,
    step: Step,
    space: &PathBuf,
    witness: &Option<PathBuf>,
    kernel: &Option<PathBuf>,
    operator: &Option<PathBuf>,
    eps: Option<f64>,
    r: Option<f64>,
    t: Option<f64>,
    out: &Output,
) -> Result<bool> {
    let space = load_space(space, &cli.tol)?;

    if step == Step::VToVI {
        let path = operator
            .as_ref()
            .ok_or_else(|| Error::Format("step v-vi needs --operator".into()))?;
        let op = formats::load_operator(path, &space)?;
        let (window, ok) = propagation_compose(&space, &op, &op)?;
        out.emit(
            &json!({"step": "propagation_compose", "window": window, "pass": ok}),
            &format!(
                "composed propagation {}: window (r={:.6}, t={})",
                verdict(ok),
                window.r,
                window.t
            ),
        )?;
        return Ok(ok);
    }

    if step == Step::IVToV {
        if let Some(path) = kernel {
            let k = formats::load_kernel(path, &space)?;
            let (op, cert) = kernel_to_operator(&space, &k)?;
            if let Some(path) = &out.out {
                std::fs::write(path, formats::operator_to_json(&op, &space)?)?;
            }
            match out.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&cert)?),
                Format::Text => println!(
                    "{}: {} (measured {:.6} against {:.6})",
                    cert.step,
                    verdict(cert.pass),
                    cert.measured,
                    cert.bound
                ),
            }
            return Ok(cert.pass);
        }
    }

    let path = witness
        .as_ref()
        .ok_or_else(|| Error::Format("this step needs --witness".into()))?;
    let (w, file_params) = formats::load_witness(path, &space)?;
    let p = resolve_params(file_params, eps, r, t)?;
    let rt = roundtrip(&space, &w, p)?;
    let keep = match step {
        Step::IToII => 1,
        Step::IIToIII => 2,
        Step::IIIToIV => 3,
        Step::IVToV => 4,
        Step::VIToIII => 5,
        Step::IIIToI | Step::Roundtrip => rt.steps.len(),
        Step::VToVI => unreachable!(),
    };
    if matches!(step, Step::IIIToI | Step::Roundtrip) {
        let pass = rt.pass;
        out.emit(
            &rt,
            &format!(
                "roundtrip {} from eps={}: final ratio bound at eps'={:.6}, inflation {:.2}x",
                verdict(pass),
                p.eps,
                rt.quantization.eps_prime,
                rt.inflation
            ),
        )?;
        Ok(pass)
    } else {
        let steps = &rt.steps[..keep.min(rt.steps.len())];
        let pass = steps.iter().all(|c| c.pass);
        let last = steps.last().unwrap();
        out.emit(
            &json!({"steps": steps, "pass": pass}),
            &format!(
                "{}: {} (measured {:.6} against {:.6})",
                last.step,
                verdict(pass),
                last.measured,
                last.bound
            ),
        )?;
        Ok(pass)
    }
}

fn run_asdim(cli: &Cli, cmd: &AsdimCmd, out: &Output) -> Result<bool> {
    match cmd {
        AsdimCmd::Verify { space, families } => {
            let space = load_space(space, &cli.tol)?;
            let file: FamiliesFile = serde_json::from_str(&std::fs::read_to_string(families)?)?;
            let mut fams = Vec::with_capacity(file.families.len());
            for family in file.families {
                let mut sets = Vec::with_capacity(family.len());
                for labels in family {
                    let mut set = Vec::with_capacity(labels.len());
                    for l in labels {
                        set.push(space.points().index_of(&l)?);
                    }
                    sets.push(set);
                }
                fams.push(sets);
            }
            let families = DisjointFamilies {
                families: fams,
                r: file.r,
                t: file.t,
            };
            let report = verify_asdim_witness(&space, &families)?;
            let pass = report.pass;
            out.emit(
                &report,
                &format!(
                    "asymptotic dimension witness {}: n={} at (r={}, t={})",
                    verdict(pass),
                    report.n,
                    families.r,
                    families.t
                ),
            )?;
            Ok(pass)
        }
        AsdimCmd::Enlarge { space, cover, r, t } => {
            let space = load_space(space, &cli.tol)?;
            let cover = formats::load_cover(cover, &space)?;
            let enlarged = enlarge_family(&space, cover.sets(), *r, *t)?;
            let mut disjoint = true;
            let mut sup = 0.0f64;
            for i in 0..enlarged.len() {
                for j in (i + 1)..enlarged.len() {
                    let (o, s) = rt_disjointness(&space, &enlarged[i], &enlarged[j], *r, *t)?;
                    if o == fmcg::numerics::Outcome::Fail {
                        disjoint = false;
                    }
                    sup = sup.max(s);
                }
            }
            let leb = lebesgue_pair_check(&space, &cover, *r, *t)?;
            let labels: Vec<Vec<&str>> = enlarged
                .iter()
                .map(|s| s.iter().map(|&x| space.points().label(x)).collect())
                .collect();
            out.emit(
                &json!({
                    "enlarged": labels,
                    "disjoint": disjoint,
                    "pairwise_sup": sup,
                    "lebesgue": leb,
                }),
                &format!(
                    "enlarged {} sets; disjoint {} (sup {:.6}), Lebesgue pair {}",
                    enlarged.len(),
                    disjoint,
                    sup,
                    verdict(leb.ok)
                ),
            )?;
            Ok(true)
        }
        AsdimCmd::Adx {
            space,
            r,
            ladder,
            seed,
        } => {
            let space = load_space(space, &cli.tol)?;
            let ladder = ladder.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0, 4.0, 8.0]);
            let table = ad_x_estimate(&space, *r, &ladder, *seed)?;
            let shown: Vec<String> = table
                .entries
                .iter()
                .map(|e| match e.estimate {
                    Some(v) => format!("ad({}) <= {}", e.t, v),
                    None => format!("ad({}) unresolved", e.t),
                })
                .collect();
            out.emit(
                &table,
                &format!("dimension estimates at r={} (greedy upper bounds): {}", r, shown.join(", ")),
            )?;
            Ok(true)
        }
    }
}

fn run_coarse_map(cli: &Cli, cmd: &CoarseMapCmd, out: &Output) -> Result<bool> {
    match cmd {
        CoarseMapCmd::Check {
            space,
            target,
            map,
            ladder,
        } => {
            let source = load_space(space, &cli.tol)?;
            let target = load_space(target, &cli.tol)?;
            let f = formats::load_map(map, &source, &target)?;
            let ladder = ladder.clone().unwrap_or_else(|| DEFAULT_LADDER.to_vec());
            let expansive = check_uniformly_expansive(&source, &target, &f, &ladder)?;
            let proper = check_effectively_proper(&source, &target, &f, &ladder)?;
            let metric = match target.metric() {
                fmcg::fuzzy_space::FuzzyMetric::Standard { .. } => {
                    Some(metric_target_moduli(&source, &target, &f, &ladder)?)
                }
                _ => None,
            };
            let pass = expansive.all_positive && proper.ladder_improves;
            out.emit(
                &json!({
                    "expansive": expansive,
                    "proper": proper,
                    "metric_moduli": metric,
                    "pass": pass,
                }),
                &format!(
                    "coarse map {}: expansive moduli positive {}, properness ladder improves {}",
                    verdict(pass),
                    expansive.all_positive,
                    proper.ladder_improves
                ),
            )?;
            Ok(pass)
        }
        CoarseMapCmd::Inverse { space, target, map } => {
            let source = load_space(space, &cli.tol)?;
            let target = load_space(target, &cli.tol)?;
            let f = formats::load_map(map, &source, &target)?;
            let report = find_coarse_inverse(&source, &target, &f)?;
            let pass = report.accepted;
            let summary = format!(
                "coarse inverse {}: f.g close at min M {:.6}, g.f close at min M {:.6}",
                verdict(pass),
                report.fg_closeness.min_m,
                report.gf_closeness.min_m
            );
            if let Some(path) = &out.out {
                std::fs::write(path, formats::map_to_json(&report.g, &target, &source)?)?;
            }
            match out.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "g": report.g.images(),
                        "g_expansive": report.g_expansive,
                        "fg_closeness": report.fg_closeness,
                        "gf_closeness": report.gf_closeness,
                        "accepted": report.accepted,
                    }))?
                ),
                Format::Text => println!("{summary}"),
            }
            Ok(pass)
        }
        CoarseMapCmd::Transport {
            space,
            target,
            map,
            witness,
            eps,
            r,
            t,
        } => {
            let source = load_space(space, &cli.tol)?;
            let target = load_space(target, &cli.tol)?;
            let f = formats::load_map(map, &source, &target)?;
            let (w, file_params) = formats::load_witness(witness, &source)?;
            let p = resolve_params(file_params, *eps, *r, *t)?;
            let inverse = find_coarse_inverse(&source, &target, &f)?;
            if !inverse.accepted {
                return Err(Error::Rejected(
                    "no coarse inverse found; the map is not a coarse equivalence here".into(),
                ));
            }
            let (family, cert) = transport_witness(&source, &target, &f, &inverse.g, &w, p)?;
            let pass = cert.pass;
            let summary = format!(
                "transported witness {}: worst ratio {:.6} over {} close pairs on {}",
                verdict(pass),
                cert.worst_ratio,
                cert.close_pairs,
                target.name()
            );
            if let Some(path) = &out.out {
                std::fs::write(path, formats::witness_to_json(&family, Some(p), &target)?)?;
            }
            match out.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&cert)?),
                Format::Text => println!("{summary}"),
            }
            Ok(pass)
        }
        CoarseMapCmd::Restrict {
            space,
            witness,
            subset,
            eps,
            r,
            t,
        } => {
            let space = load_space(space, &cli.tol)?;
            let (w, file_params) = formats::load_witness(witness, &space)?;
            let p = resolve_params(file_params, *eps, *r, *t)?;
            let mut indices = Vec::with_capacity(subset.len());
            for l in subset {
                indices.push(space.points().index_of(l)?);
            }
            let (sub, family, cert) = restrict_witness(&space, &indices, &w, p)?;
            let pass = cert.pass;
            let summary = format!(
                "restricted witness {} on {} points: worst ratio {:.6}",
                verdict(pass),
                sub.len(),
                cert.worst_ratio
            );
            if let Some(path) = &out.out {
                std::fs::write(path, formats::witness_to_json(&family, Some(p), &sub)?)?;
            }
            match out.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&cert)?),
                Format::Text => println!("{summary}"),
            }
            Ok(pass)
        }
    }
}

fn level_witnesses(
    space: &FuzzySpace,
    cover: &fmcg::covers_asdim::Cover,
    cfg: &EmbeddingConfig,
) -> Result<Vec<fmcg::WitnessFamily>> {
    (0..cfg.levels)
        .map(|i| {
            let (r, t) = cfg.ladder[i];
            let eps_sq = cfg.eps(i) * cfg.eps(i);
            let p = ParamTuple::new(eps_sq, r, t)?;
            Ok(construct_from_cover(space, cover, p, 1)?.0)
        })
        .collect()
}

fn run_embed(cli: &Cli, cmd: &EmbedCmd, out: &Output) -> Result<bool> {
    let (space_path, cover_path, levels, base, full) = match cmd {
        EmbedCmd::Build {
            space,
            cover,
            levels,
            base,
        } => (space, cover, *levels, base, false),
        EmbedCmd::Report {
            space,
            cover,
            levels,
            base,
        } => (space, cover, *levels, base, true),
    };
    let space = load_space(space_path, &cli.tol)?;
    let cover = formats::load_cover(cover_path, &space)?;
    let base_idx = space.points().index_of(base)?;
    let cfg = EmbeddingConfig::standard(levels, base_idx)?;
    let witnesses = level_witnesses(&space, &cover, &cfg)?;
    let emb = build_embedding(&space, &witnesses, cfg)?;
    let report = distortion_report(&space, &emb)?;
    let pass = report.pass;
    if full {
        out.emit(
            &report,
            &format!(
                "embedding diagnostics {}: {} levels, {} pairs, tail bound {:.6}",
                verdict(pass),
                report.levels,
                report.pairs.len(),
                report.tail_bound
            ),
        )?;
    } else {
        let pairs: Vec<_> = report
            .pairs
            .iter()
            .map(|p| {
                json!({"x": p.x, "y": p.y, "dist": p.dist, "blocks": p.blocks,
                       "sqrt2_count": p.sqrt2_count})
            })
            .collect();
        out.emit(
            &json!({"base": base, "levels": levels, "pairs": pairs, "pass": pass}),
            &format!(
                "embedding {} built: {} levels over {} points, base {}",
                verdict(pass),
                levels,
                space.len(),
                base
            ),
        )?;
    }
    Ok(pass)
}

fn run_appendix(cli: &Cli, cmd: &AppendixCmd, out: &Output) -> Result<bool> {
    match cmd {
        AppendixCmd::Crosscheck {
            space,
            witness,
            eps,
            r,
            t,
        } => {
            let space = load_space(space, &cli.tol)?;
            let (w, file_params) = formats::load_witness(witness, &space)?;
            let p = resolve_params(file_params, *eps, *r, *t)?;
            let fuzzy = verify_witness(&space, &w, p)?;
            let entourage = Entourage::closeness(&space, p.r, p.t)?;
            let sako = sako_property_a_verify(&space, &entourage, &w, p.eps)?;
            let axioms = coarse_axioms_check(
                &space,
                &[entourage.clone(), Entourage::diagonal(space.len())],
            )?;
            // one coarse asdim comparison on the trivial single-family witness
            let whole: Vec<Vec<usize>> = vec![(0..space.len()).collect()];
            let coarse_dim = coarse_asdim_verify(&space, &entourage, &[whole])?;
            let agree = fuzzy.pass == sako.pass;
            let pass = agree && axioms.pass;
            out.emit(
                &json!({
                    "fuzzy": fuzzy,
                    "sako": sako,
                    "verdicts_agree": agree,
                    "coarse_axioms": axioms,
                    "coarse_asdim_trivial_family": coarse_dim,
                    "pass": pass,
                }),
                &format!(
                    "crosscheck {}: fuzzy {} vs entourage {} on E(r={}, t={}); axioms {}",
                    verdict(pass),
                    verdict(fuzzy.pass),
                    verdict(sako.pass),
                    p.r,
                    p.t,
                    verdict(axioms.pass)
                ),
            )?;
            Ok(pass)
        }
    }
}
