//! Property A witness families over `X x N`, their certificates, the
//! chain-length construction from admissible covers, the reciprocal-product
//! example family, and the averaged subexponential-growth field.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::covers_asdim::{lebesgue_pair_check, multiplicity, Cover};
use crate::fuzzy_space::{BuiltinId, FuzzyMetric, FuzzySpace};
use crate::numerics::{tnorm_power, Outcome, Tolerance};
use crate::{Error, Result};

/// One finite nonempty subset of `X x N` per point, levels starting at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessFamily {
    sets: Vec<BTreeSet<(usize, u32)>>,
}

impl WitnessFamily {
    pub fn from_sets(n_points: usize, sets: Vec<BTreeSet<(usize, u32)>>) -> Result<Self> {
        if sets.len() != n_points {
            return Err(Error::Structural(format!(
                "witness family has {} sets for {} points",
                sets.len(),
                n_points
            )));
        }
        for (x, s) in sets.iter().enumerate() {
            for &(z, lvl) in s {
                if z >= n_points {
                    return Err(Error::Structural(format!(
                        "witness set for point {x} references point index {z} out of range"
                    )));
                }
                if lvl == 0 {
                    return Err(Error::Structural(format!(
                        "witness set for point {x} uses level 0; levels start at 1"
                    )));
                }
            }
        }
        Ok(WitnessFamily { sets })
    }

    /// Column form: `heights[x]` maps a point `z` to `h`, meaning the set for
    /// `x` contains `(z, 1), ..., (z, h)`.
    pub fn from_heights(n_points: usize, heights: Vec<BTreeMap<usize, u32>>) -> Result<Self> {
        let sets = heights
            .into_iter()
            .map(|h| {
                h.into_iter()
                    .filter(|&(_, height)| height > 0)
                    .flat_map(|(z, height)| (1..=height).map(move |l| (z, l)))
                    .collect()
            })
            .collect();
        WitnessFamily::from_sets(n_points, sets)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn set(&self, x: usize) -> &BTreeSet<(usize, u32)> {
        &self.sets[x]
    }

    pub fn card(&self, x: usize) -> usize {
        self.sets[x].len()
    }

    /// Points of `X` appearing in the set for `x`.
    pub fn projection(&self, x: usize) -> BTreeSet<usize> {
        self.sets[x].iter().map(|&(z, _)| z).collect()
    }

    pub fn intersection_card(&self, x: usize, y: usize) -> usize {
        merge_count(&self.sets[x], &self.sets[y]).0
    }

    pub fn symmetric_difference_card(&self, x: usize, y: usize) -> usize {
        merge_count(&self.sets[x], &self.sets[y]).1
    }
}

fn merge_count(a: &BTreeSet<(usize, u32)>, b: &BTreeSet<(usize, u32)>) -> (usize, usize) {
    let mut ia = a.iter().peekable();
    let mut ib = b.iter().peekable();
    let mut inter = 0usize;
    let mut delta = 0usize;
    loop {
        match (ia.peek(), ib.peek()) {
            (Some(&x), Some(&y)) => {
                if x == y {
                    inter += 1;
                    ia.next();
                    ib.next();
                } else if x < y {
                    delta += 1;
                    ia.next();
                } else {
                    delta += 1;
                    ib.next();
                }
            }
            (Some(_), None) => {
                delta += 1;
                ia.next();
            }
            (None, Some(_)) => {
                delta += 1;
                ib.next();
            }
            (None, None) => return (inter, delta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamTuple {
    pub eps: f64,
    pub r: f64,
    pub t: f64,
}

impl ParamTuple {
    pub fn new(eps: f64, r: f64, t: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("r must lie in (0,1), got {r}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("t must be positive, got {t}")));
        }
        Ok(ParamTuple { eps, r, t })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub params: ParamTuple,
    /// support window: every set lives inside `B(x, support_r, support_t)`
    pub support_r: f64,
    pub support_t: f64,
    pub close_pairs: usize,
    /// max of `|A_x delta A_y| / |A_x cap A_y|` over close pairs
    pub worst_ratio: f64,
    pub worst_pair: Option<(String, String)>,
    /// some pair passed only inside the certification margin
    pub boundary: bool,
    pub pass: bool,
}

/// Check `|A_x delta A_y| < eps |A_x cap A_y|` over all pairs with
/// `M(x,y,t) > 1-r`, and report a support window covering every set.
pub fn verify_witness(space: &FuzzySpace, w: &WitnessFamily, p: ParamTuple) -> Result<WitnessCertificate> {
    if w.len() != space.len() {
        return Err(Error::Structural(format!(
            "witness family covers {} points, space has {}",
            w.len(),
            space.len()
        )));
    }
    for x in 0..w.len() {
        if w.set(x).is_empty() {
            return Err(Error::Structural(format!(
                "witness set for point {} is empty",
                space.points().label(x)
            )));
        }
    }
    let tol = space.tolerance();
    let support_t = space.t_max();
    let mut min_m = 1.0f64;
    for x in 0..w.len() {
        for z in w.projection(x) {
            min_m = min_m.min(space.eval(x, z, support_t)?);
        }
    }
    let support_r = 1.0 - min_m * (1.0 - tol.margin);

    let mut close_pairs = 0usize;
    let mut worst_ratio = 0.0f64;
    let mut worst_pair = None;
    let mut boundary = false;
    let mut pass = true;
    for x in 0..w.len() {
        for y in (x + 1)..w.len() {
            if !(space.eval(x, y, p.t)? > 1.0 - p.r) {
                continue;
            }
            close_pairs += 1;
            let (inter, delta) = merge_count(w.set(x), w.set(y));
            let ratio = if inter == 0 {
                f64::INFINITY
            } else {
                delta as f64 / inter as f64
            };
            if ratio > worst_ratio || worst_pair.is_none() {
                worst_ratio = ratio;
                worst_pair = Some((
                    space.points().label(x).to_string(),
                    space.points().label(y).to_string(),
                ));
            }
            match tol.certify_lt(delta as f64, p.eps * inter as f64) {
                Outcome::Pass => {}
                Outcome::Boundary => boundary = true,
                Outcome::Fail => pass = false,
            }
        }
    }
    Ok(WitnessCertificate {
        params: p,
        support_r,
        support_t,
        close_pairs,
        worst_ratio,
        worst_pair,
        boundary,
        pass,
    })
}

#[derive(Debug, Clone)]
pub struct Ex39Witness {
    pub family: WitnessFamily,
    /// least `N` with `1/(N+1) < 1-r`
    pub threshold: usize,
}

/// Singleton witness family on the reciprocal-product space: points up to the
/// threshold share one anchor pair, larger points sit on themselves.
pub fn ex39_witness(space: &FuzzySpace, r: f64) -> Result<Ex39Witness> {
    match space.metric() {
        FuzzyMetric::Builtin {
            id: BuiltinId::NatProduct,
            ..
        } => {}
        _ => {
            return Err(Error::Structural(
                "this witness construction is specific to the nat-product space".into(),
            ));
        }
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r must lie in (0,1), got {r}")));
    }
    let mut big_n = 1usize;
    while 1.0 / (big_n as f64 + 1.0) >= 1.0 - r {
        big_n += 1;
    }
    // point labelled n has index n-1; when the threshold outruns the finite
    // truncation every point shares the last available anchor
    let anchor = big_n.min(space.len()) - 1;
    let sets = (0..space.len())
        .map(|i| {
            let z = if i + 1 <= big_n { anchor } else { i };
            BTreeSet::from([(z, 1u32)])
        })
        .collect();
    Ok(Ex39Witness {
        family: WitnessFamily::from_sets(space.len(), sets)?,
        threshold: big_n,
    })
}

/// Fewest closeness-graph steps from `x` to a point outside `u`, capped at
/// `cap`.  Edges join distinct points with `M > 1-r` at time `t`.
pub fn chain_length(space: &FuzzySpace, x: usize, u: &[usize], r: f64, t: f64, cap: usize) -> Result<usize> {
    if cap == 0 {
        return Err(Error::Domain("chain cap must be at least 1".into()));
    }
    let inside: BTreeSet<usize> = u.iter().copied().collect();
    if !inside.contains(&x) {
        return Err(Error::Domain(format!(
            "point {} is not in the set",
            space.points().label(x)
        )));
    }
    let n = space.len();
    let mut dist = vec![usize::MAX; n];
    dist[x] = 0;
    let mut queue = VecDeque::from([x]);
    while let Some(y) = queue.pop_front() {
        if dist[y] + 1 > cap {
            continue;
        }
        for z in 0..n {
            if z == y || dist[z] != usize::MAX {
                continue;
            }
            if space.eval(y, z, t)? > 1.0 - r {
                if !inside.contains(&z) {
                    return Ok(dist[y] + 1);
                }
                dist[z] = dist[y] + 1;
                queue.push_back(z);
            }
        }
    }
    Ok(cap)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub params: ParamTuple,
    pub k: usize,
    pub big_t: f64,
    pub big_r: f64,
    pub cover_multiplicity: usize,
    pub max_projection: usize,
    /// max `|A_x delta A_y|` over close pairs; at most `2n+1` by design
    pub worst_delta: usize,
    pub certificate: WitnessCertificate,
}

/// Build a Property A witness from a cover of multiplicity at most `n+1`
/// whose Lebesgue pair reaches `(R, T)` with `K = floor(2 + (2n+1)/eps)`,
/// `T = (2 + (2n+1)/eps) t`, `R = 1 - (1-r)^{*(K+1)}`.  Each point collects
/// the anchors of its members up to the capped exit-chain length.
pub fn construct_from_cover(
    space: &FuzzySpace,
    cover: &Cover,
    p: ParamTuple,
    n: usize,
) -> Result<(WitnessFamily, ConstructionReport)> {
    let scale = 2.0 + (2 * n + 1) as f64 / p.eps;
    let k = scale.floor() as usize;
    let big_t = scale * p.t;
    // for large K the t-norm power underflows and 1 - power rounds to 1;
    // keep R a valid radius, the threshold change is far below any M value
    let big_r = (1.0 - tnorm_power(space.tnorm(), 1.0 - p.r, (k + 1) as u32)?).min(1.0 - 1e-12);

    let n_points = space.len();
    if !cover.covers(n_points) {
        return Err(Error::Rejected("cover does not cover the space".into()));
    }
    let mult = multiplicity(cover, n_points);
    if mult > n + 1 {
        return Err(Error::Rejected(format!(
            "cover multiplicity {mult} exceeds n+1 = {}",
            n + 1
        )));
    }
    let leb = lebesgue_pair_check(space, cover, big_r, big_t)?;
    if !leb.ok {
        return Err(Error::Rejected(format!(
            "cover is not Lebesgue at ({big_r}, {big_t}); first failure at point {}",
            leb.failing_point.unwrap_or_default()
        )));
    }

    let mut heights: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); n_points];
    for member in cover.sets() {
        let anchor = member[0];
        for &x in member {
            let l = chain_length(space, x, member, p.r, p.t, k)? as u32;
            let h = heights[x].entry(anchor).or_insert(0);
            *h = (*h).max(l);
        }
    }
    let family = WitnessFamily::from_heights(n_points, heights)?;

    let max_projection = (0..n_points).map(|x| family.projection(x).len()).max().unwrap_or(0);
    let mut worst_delta = 0usize;
    for &(x, y) in space.close_pairs(p.r, p.t).iter() {
        if x < y {
            worst_delta = worst_delta.max(family.symmetric_difference_card(x, y));
        }
    }
    let certificate = verify_witness(space, &family, p)?;
    let report = ConstructionReport {
        params: p,
        k,
        big_t,
        big_r,
        cover_multiplicity: mult,
        max_projection,
        worst_delta,
        certificate,
    };
    Ok((family, report))
}

/// Normalized point-supported l1 vectors obtained by averaging the indicator
/// vectors of "ball fits in member" index sets over integer times
/// `n+1, ..., 2n`, then pushing member indices to their anchor points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubexpField {
    pub n: usize,
    pub r: f64,
    /// closeness threshold under which the averaging bound applies:
    /// `r' = 1 - (1-r)^{*(2)} / 2`
    pub r_prime: f64,
    pub anchors: Vec<usize>,
    pub vectors: Vec<BTreeMap<usize, f64>>,
}

impl SubexpField {
    pub fn l1_distance(&self, x: usize, y: usize) -> f64 {
        let mut keys: BTreeSet<usize> = self.vectors[x].keys().copied().collect();
        keys.extend(self.vectors[y].keys().copied());
        keys.into_iter()
            .map(|z| {
                let a = self.vectors[x].get(&z).copied().unwrap_or(0.0);
                let b = self.vectors[y].get(&z).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .sum()
    }
}

/// The averaging bound `2 (1 - mult^{-2t/n})` for pairs close at `(r', t)`.
pub fn subexp_bound(mult: usize, t: f64, n: usize) -> f64 {
    2.0 * (1.0 - (mult as f64).powf(-2.0 * t / n as f64))
}

pub fn subexp_field(space: &FuzzySpace, cover: &Cover, r: f64, n: usize) -> Result<SubexpField> {
    if n == 0 {
        return Err(Error::Domain("averaging depth n must be at least 1".into()));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r must lie in (0,1), got {r}")));
    }
    let n_points = space.len();
    if !cover.covers(n_points) {
        return Err(Error::Rejected("cover does not cover the space".into()));
    }
    let anchors: Vec<usize> = cover.sets().iter().map(|s| s[0]).collect();
    let mut vectors = Vec::with_capacity(n_points);
    for x in 0..n_points {
        let mut eta: BTreeMap<usize, f64> = BTreeMap::new();
        for k in (n + 1)..=(2 * n) {
            let ball = space.ball(x, r, k as f64)?;
            let hits: Vec<usize> = cover
                .sets()
                .iter()
                .enumerate()
                .filter(|(_, s)| ball.iter().all(|p| s.binary_search(p).is_ok()))
                .map(|(i, _)| i)
                .collect();
            if hits.is_empty() {
                return Err(Error::Rejected(format!(
                    "no cover member contains B({}, {r}, {k})",
                    space.points().label(x)
                )));
            }
            let w = 1.0 / (n as f64 * hits.len() as f64);
            for i in hits {
                *eta.entry(anchors[i]).or_insert(0.0) += w;
            }
        }
        vectors.push(eta);
    }
    let r_prime = 1.0 - 0.5 * tnorm_power(space.tnorm(), 1.0 - r, 2)?;
    Ok(SubexpField {
        n,
        r,
        r_prime,
        anchors,
        vectors,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricWitnessCertificate {
    /// max distance from a point to its own support
    pub support_radius: f64,
    pub close_pairs: usize,
    pub worst_ratio: f64,
    pub pass: bool,
}

/// The plain-metric reading of the witness condition: pairs with
/// `d(x,y) < radius`, same difference-versus-intersection test.
pub fn verify_witness_metric(
    d: &[Vec<f64>],
    w: &WitnessFamily,
    eps: f64,
    radius: f64,
    tol: Tolerance,
) -> Result<MetricWitnessCertificate> {
    let n = d.len();
    if w.len() != n {
        return Err(Error::Structural(format!(
            "witness family covers {} points, metric has {}",
            w.len(),
            n
        )));
    }
    let mut support_radius = 0.0f64;
    for x in 0..n {
        for z in w.projection(x) {
            support_radius = support_radius.max(d[x][z]);
        }
    }
    let mut close_pairs = 0usize;
    let mut worst_ratio = 0.0f64;
    let mut pass = true;
    for x in 0..n {
        for y in (x + 1)..n {
            if !(d[x][y] < radius) {
                continue;
            }
            close_pairs += 1;
            let (inter, delta) = merge_count(w.set(x), w.set(y));
            let ratio = if inter == 0 {
                f64::INFINITY
            } else {
                delta as f64 / inter as f64
            };
            worst_ratio = worst_ratio.max(ratio);
            if !tol.certify_lt(delta as f64, eps * inter as f64).passed() {
                pass = false;
            }
        }
    }
    Ok(MetricWitnessCertificate {
        support_radius,
        close_pairs,
        worst_ratio,
        pass,
    })
}

/// Under the standard fuzzy metric, `M(x,y,t) > 1-r` with `r = 1/2` and
/// `t = radius` captures exactly `d(x,y) < radius`.
pub fn metric_to_fuzzy_params(eps: f64, radius: f64) -> Result<ParamTuple> {
    ParamTuple::new(eps, 0.5, radius)
}

/// The metric radius matching the fuzzy closeness `(r, t)` on a standard
/// space: `d < t r / (1-r)`.
pub fn fuzzy_to_metric_radius(r: f64, t: f64) -> f64 {
    t * r / (1.0 - r)
}
