//! Unit vectors from witness families and the explicit coarse embedding
//! into a truncated direct sum of Hilbert spaces, with per-pair distortion
//! diagnostics.

use serde::{Deserialize, Serialize};

use crate::fuzzy_space::FuzzySpace;
use crate::property_a::{verify_witness, ParamTuple, WitnessFamily};
use crate::{Error, Result};

/// Normalized indicator vectors `xi_x = |A_x|^{-1/2} chi_{A_x}` kept in set
/// form; inner products and distances come from cardinalities alone.
#[derive(Debug, Clone)]
pub struct AceField {
    pub eps: f64,
    /// support window: projections lie in `B(x, support_r, support_t)`
    pub support_r: f64,
    pub support_t: f64,
    family: WitnessFamily,
}

impl AceField {
    pub fn inner(&self, x: usize, y: usize) -> f64 {
        let inter = self.family.intersection_card(x, y) as f64;
        inter / ((self.family.card(x) as f64) * (self.family.card(y) as f64)).sqrt()
    }

    pub fn dist_sq(&self, x: usize, y: usize) -> f64 {
        2.0 - 2.0 * self.inner(x, y)
    }

    pub fn supports_disjoint(&self, x: usize, y: usize) -> bool {
        self.family.intersection_card(x, y) == 0
    }

    pub fn family(&self) -> &WitnessFamily {
        &self.family
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AceCert {
    pub eps: f64,
    pub close_pairs: usize,
    /// min inner product over close pairs; must exceed `2 / (2 + eps^2)`
    pub worst_inner: f64,
    pub inner_floor: f64,
    /// max squared distance over close pairs; must stay below `eps^2`
    pub worst_dist_sq: f64,
    pub pass: bool,
}

/// Build the unit-vector field of a witness verified at ratio bound
/// `eps^2`; close pairs then have inner product above `2/(2+eps^2)` and
/// squared distance below `eps^2`, both recomputed from the raw sets.
pub fn ace_vectors(space: &FuzzySpace, w: &WitnessFamily, p: ParamTuple) -> Result<(AceField, AceCert)> {
    let cert = verify_witness(space, w, ParamTuple::new(p.eps * p.eps, p.r, p.t)?)?;
    if !cert.pass {
        return Err(Error::Rejected(format!(
            "witness does not verify at eps^2 = {}; worst ratio {}",
            p.eps * p.eps,
            cert.worst_ratio
        )));
    }
    let field = AceField {
        eps: p.eps,
        support_r: cert.support_r,
        support_t: cert.support_t,
        family: w.clone(),
    };
    let inner_floor = 2.0 / (2.0 + p.eps * p.eps);
    let mut worst_inner = 1.0f64;
    let mut worst_dist_sq = 0.0f64;
    let mut close_pairs = 0usize;
    let mut pass = true;
    for (x, y) in space.close_pairs(p.r, p.t) {
        if x >= y {
            continue;
        }
        close_pairs += 1;
        // the counting identity, from raw cardinalities
        let card_sum = w.card(x) + w.card(y);
        let inter = w.intersection_card(x, y);
        let delta = w.symmetric_difference_card(x, y);
        debug_assert_eq!(card_sum, 2 * inter + delta);
        if !((card_sum as f64) < (2.0 + p.eps * p.eps) * inter as f64) {
            pass = false;
        }
        let ip = field.inner(x, y);
        worst_inner = worst_inner.min(ip);
        let d2 = field.dist_sq(x, y);
        worst_dist_sq = worst_dist_sq.max(d2);
        if !(ip > inner_floor) || !(d2 < p.eps * p.eps) {
            pass = false;
        }
    }
    Ok((
        field,
        AceCert {
            eps: p.eps,
            close_pairs,
            worst_inner,
            inner_floor,
            worst_dist_sq,
            pass,
        },
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    /// number of levels retained from the infinite direct sum
    pub levels: usize,
    /// base point index; `F(base) = 0`
    pub base: usize,
    /// per level `(r_n, t_n)`; `r_n` strictly increasing in `(0,1)`
    pub ladder: Vec<(f64, f64)>,
}

impl EmbeddingConfig {
    /// Default ladder `r_n = n/(n+1)`, `t_n = n`.
    pub fn standard(levels: usize, base: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Domain("need at least one level".into()));
        }
        let ladder = (1..=levels)
            .map(|n| (n as f64 / (n as f64 + 1.0), n as f64))
            .collect();
        Ok(EmbeddingConfig {
            levels,
            base,
            ladder,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 || self.ladder.len() != self.levels {
            return Err(Error::Structural(format!(
                "ladder has {} entries for {} levels",
                self.ladder.len(),
                self.levels
            )));
        }
        let mut prev = 0.0f64;
        for &(r, t) in &self.ladder {
            if !(r > prev && r < 1.0) {
                return Err(Error::Domain(format!(
                    "ladder radii must increase strictly inside (0,1), got {r} after {prev}"
                )));
            }
            if !(t > 0.0) {
                return Err(Error::Domain(format!("ladder time {t} must be positive")));
            }
            prev = r;
        }
        Ok(())
    }

    pub fn eps(&self, level: usize) -> f64 {
        0.5f64.powi(level as i32 + 1)
    }
}

/// One level of the truncated direct sum: the unit-vector field at
/// `eps_n = 2^{-n}` over the closeness scale `(r_n, t_n)`.
#[derive(Debug, Clone)]
pub struct EmbeddingLevel {
    pub eps: f64,
    pub r: f64,
    pub t: f64,
    pub field: AceField,
}

/// Sparse form of `F(x) = (+)_n (xi^n_x - xi^n_base)`: the pairwise block
/// structure is recovered from the level fields, since the base terms cancel
/// in differences.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub cfg: EmbeddingConfig,
    pub levels: Vec<EmbeddingLevel>,
    n_points: usize,
}

impl Embedding {
    pub fn block_dist(&self, level: usize, x: usize, y: usize) -> f64 {
        self.levels[level].field.dist_sq(x, y).max(0.0).sqrt()
    }

    /// `||F(x) - F(y)||`, the orthogonal sum over blocks.
    pub fn dist(&self, x: usize, y: usize) -> f64 {
        (0..self.levels.len())
            .map(|n| self.levels[n].field.dist_sq(x, y).max(0.0))
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self, x: usize) -> f64 {
        self.dist(x, self.cfg.base)
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    /// Tail mass dropped by the truncation, `sum_{n > N} 2^{-n}`.
    pub fn tail_bound(&self) -> f64 {
        0.5f64.powi(self.cfg.levels as i32)
    }
}

/// Assemble the embedding from one verified witness family per level.
pub fn build_embedding(
    space: &FuzzySpace,
    witnesses: &[WitnessFamily],
    cfg: EmbeddingConfig,
) -> Result<Embedding> {
    cfg.validate()?;
    if witnesses.len() != cfg.levels {
        return Err(Error::Structural(format!(
            "{} witnesses supplied for {} levels",
            witnesses.len(),
            cfg.levels
        )));
    }
    if cfg.base >= space.len() {
        return Err(Error::Structural("base point out of range".into()));
    }
    let mut levels = Vec::with_capacity(cfg.levels);
    for (i, w) in witnesses.iter().enumerate() {
        let eps = cfg.eps(i);
        let (r, t) = cfg.ladder[i];
        let (field, cert) = ace_vectors(space, w, ParamTuple::new(eps, r, t)?)?;
        if !cert.pass {
            return Err(Error::Rejected(format!(
                "level {} field fails its certificate: {cert:?}",
                i + 1
            )));
        }
        levels.push(EmbeddingLevel { eps, r, t, field });
    }
    Ok(Embedding {
        cfg,
        levels,
        n_points: space.len(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDiagnostics {
    pub x: String,
    pub y: String,
    /// M at the grid max; a lower bound for the sup over all times
    pub sup_m: f64,
    pub dist: f64,
    pub blocks: Vec<f64>,
    pub sqrt2_count: usize,
    /// largest level at which the pair is not yet close (0 if always close)
    pub n_threshold: usize,
    /// the pair's squared distance stays under `4 n_threshold + 1`
    pub norm_bound_ok: bool,
    /// window-disjoint levels have block distance sqrt(2) exactly
    pub disjointness_ok: bool,
    /// close levels have block distance at most `2^{-n}`
    pub expansive_ok: bool,
    /// `sqrt2_count <= dist^2 / 2`
    pub proper_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistortionReport {
    pub base: String,
    pub levels: usize,
    pub tail_bound: f64,
    pub base_norm: f64,
    pub pairs: Vec<PairDiagnostics>,
    pub pass: bool,
}

pub fn distortion_report(space: &FuzzySpace, emb: &Embedding) -> Result<DistortionReport> {
    let n = space.len();
    let tau = space.tolerance().tau;
    let t_max = space.t_max();
    let mut pairs = Vec::new();
    let mut pass = true;
    for x in 0..n {
        for y in (x + 1)..n {
            let dist = emb.dist(x, y);
            let mut blocks = Vec::with_capacity(emb.levels.len());
            let mut sqrt2_count = 0usize;
            let mut n_threshold = 0usize;
            let mut disjointness_ok = true;
            let mut expansive_ok = true;
            for (i, level) in emb.levels.iter().enumerate() {
                let b = emb.block_dist(i, x, y);
                blocks.push(b);
                let disjoint = level.field.supports_disjoint(x, y);
                if disjoint {
                    sqrt2_count += 1;
                    if (b - std::f64::consts::SQRT_2).abs() > tau {
                        disjointness_ok = false;
                    }
                }
                // support windows separated at the doubled scale force
                // disjointness
                let sep = space.tnorm_apply(
                    1.0 - level.field.support_r,
                    1.0 - level.field.support_r,
                );
                if space.eval(x, y, 2.0 * level.field.support_t)? < sep && !disjoint {
                    disjointness_ok = false;
                }
                let close = space.eval(x, y, level.t)? > 1.0 - level.r;
                if close {
                    if b > level.eps + tau {
                        expansive_ok = false;
                    }
                } else {
                    n_threshold = i + 1;
                }
            }
            let norm_bound_ok = dist * dist < 4.0 * n_threshold as f64 + 1.0;
            let proper_ok = (sqrt2_count as f64) <= dist * dist / 2.0 + tau;
            let ok = disjointness_ok && expansive_ok && norm_bound_ok && proper_ok;
            pass &= ok;
            pairs.push(PairDiagnostics {
                x: space.points().label(x).to_string(),
                y: space.points().label(y).to_string(),
                sup_m: space.eval(x, y, t_max)?,
                dist,
                blocks,
                sqrt2_count,
                n_threshold,
                norm_bound_ok,
                disjointness_ok,
                expansive_ok,
                proper_ok,
            });
        }
    }
    let base_norm = emb.norm(emb.cfg.base);
    if base_norm != 0.0 {
        pass = false;
    }
    Ok(DistortionReport {
        base: space.points().label(emb.cfg.base).to_string(),
        levels: emb.cfg.levels,
        tail_bound: emb.tail_bound(),
        base_norm,
        pairs,
        pass,
    })
}
