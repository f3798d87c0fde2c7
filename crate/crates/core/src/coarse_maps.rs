//! Maps between finite fuzzy metric spaces: expansiveness and properness
//! modulus tables, closeness and coarse-onto witnesses, coarse-inverse
//! search, witness transport along a coarse equivalence, and subspace
//! restriction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fuzzy_space::{FuzzyMetric, FuzzySpace, PointSet};
use crate::property_a::{verify_witness, ParamTuple, WitnessCertificate, WitnessFamily};
use crate::{Error, Result};

pub const DEFAULT_LADDER: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// A total map between the point sets of two spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointMap {
    pub from: String,
    pub to: String,
    map: Vec<usize>,
}

impl PointMap {
    pub fn new(source: &FuzzySpace, target: &FuzzySpace, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::Structural(format!(
                "map defined on {} points, source has {}",
                map.len(),
                source.len()
            )));
        }
        for (x, &y) in map.iter().enumerate() {
            if y >= target.len() {
                return Err(Error::Structural(format!(
                    "image of point {} is index {y}, out of range in target",
                    source.points().label(x)
                )));
            }
        }
        Ok(PointMap {
            from: source.name().to_string(),
            to: target.name().to_string(),
            map,
        })
    }

    pub fn from_labels(
        source: &FuzzySpace,
        target: &FuzzySpace,
        pairs: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut map = Vec::with_capacity(source.len());
        for x in 0..source.len() {
            let label = source.points().label(x);
            let image = pairs
                .get(label)
                .ok_or_else(|| Error::Structural(format!("map is missing point {label}")))?;
            map.push(target.points().index_of(image)?);
        }
        PointMap::new(source, target, map)
    }

    pub fn identity(space: &FuzzySpace) -> Self {
        PointMap {
            from: space.name().to_string(),
            to: space.name().to_string(),
            map: (0..space.len()).collect(),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &PointMap) -> Result<PointMap> {
        if other.map.len() <= self.map.iter().copied().max().unwrap_or(0) {
            return Err(Error::Structural("composition domain mismatch".into()));
        }
        Ok(PointMap {
            from: self.from.clone(),
            to: other.to.clone(),
            map: self.map.iter().map(|&y| other.map[y]).collect(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusRow {
    /// threshold on the qualifying side
    pub a: f64,
    pub t: f64,
    /// time at which the modulus is measured
    pub t_prime: f64,
    /// worst proximity over qualifying pairs
    pub b: f64,
    pub qualifying_pairs: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusTable {
    pub ladder: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub rows: Vec<ModulusRow>,
    /// every row satisfies `b >= a` (informational; expansiveness tables)
    pub dominating: bool,
    /// some time exhibits strict modulus improvement along the ladder, or is
    /// already maximal at its foot (properness tables; heuristic diagnostic,
    /// every map on a finite space is coarse in the literal sense)
    pub ladder_improves: bool,
    /// all moduli positive, automatic on finite spaces
    pub all_positive: bool,
}

fn build_table(
    qualify: impl Fn(usize, usize, f64) -> Result<f64>,
    measure: impl Fn(usize, usize, f64) -> Result<f64>,
    n: usize,
    ladder: &[f64],
    t_grid: &[f64],
    t_prime: f64,
    tau: f64,
) -> Result<ModulusTable> {
    let mut rows = Vec::new();
    let mut dominating = true;
    let mut ladder_improves = false;
    let mut all_positive = true;
    for &t in t_grid {
        let mut per_t: Vec<(f64, f64)> = Vec::new();
        for &a in ladder {
            let mut b = 1.0f64;
            let mut count = 0usize;
            for x in 0..n {
                for y in 0..n {
                    if qualify(x, y, t)? >= a {
                        count += 1;
                        b = b.min(measure(x, y, t_prime)?);
                    }
                }
            }
            per_t.push((a, b));
            if b < a {
                dominating = false;
            }
            if b <= 0.0 {
                all_positive = false;
            }
            rows.push(ModulusRow {
                a,
                t,
                t_prime,
                b,
                qualifying_pairs: count,
            });
        }
        if let (Some(&(_, first)), Some(&(_, last))) = (per_t.first(), per_t.last()) {
            if last - first > tau || first >= 1.0 - tau {
                ladder_improves = true;
            }
        }
    }
    Ok(ModulusTable {
        ladder: ladder.to_vec(),
        t_grid: t_grid.to_vec(),
        rows,
        dominating,
        ladder_improves,
        all_positive,
    })
}

/// For each `(A, t)`: over pairs with `M_1(x,x',t) >= A`, the worst
/// `M_2(f(x),f(x'),t')` at the target grid max `t'`.
pub fn check_uniformly_expansive(
    source: &FuzzySpace,
    target: &FuzzySpace,
    f: &PointMap,
    ladder: &[f64],
) -> Result<ModulusTable> {
    let t_prime = target.t_max();
    build_table(
        |x, y, t| source.eval(x, y, t),
        |x, y, tp| target.eval(f.apply(x), f.apply(y), tp),
        source.len(),
        ladder,
        source.t_grid(),
        t_prime,
        source.tolerance().tau,
    )
}

/// Dual table: over pairs with `M_2(f(x),f(x'),t) >= C`, the worst
/// `M_1(x,x',t')` at the source grid max `t'`.
pub fn check_effectively_proper(
    source: &FuzzySpace,
    target: &FuzzySpace,
    f: &PointMap,
    ladder: &[f64],
) -> Result<ModulusTable> {
    let t_prime = source.t_max();
    build_table(
        |x, y, t| target.eval(f.apply(x), f.apply(y), t),
        |x, y, tp| source.eval(x, y, tp),
        source.len(),
        ladder,
        target.t_grid(),
        t_prime,
        source.tolerance().tau,
    )
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClosenessWitness {
    pub r: f64,
    pub t: f64,
    pub min_m: f64,
}

/// `(r, t)` with `M(f(x), g(x), t) > 1-r` for all `x`, at the target grid
/// max; always exists on finite spaces.
pub fn check_closeness(target: &FuzzySpace, f: &PointMap, g: &PointMap) -> Result<ClosenessWitness> {
    if f.images().len() != g.images().len() {
        return Err(Error::Structural("maps have different sources".into()));
    }
    let t = target.t_max();
    let mut min_m = 1.0f64;
    for x in 0..f.images().len() {
        min_m = min_m.min(target.eval(f.apply(x), g.apply(x), t)?);
    }
    Ok(ClosenessWitness {
        r: 1.0 - min_m / 2.0,
        t,
        min_m,
    })
}

/// Every target point within closeness of some image point.
pub fn check_coarsely_onto(target: &FuzzySpace, f: &PointMap) -> Result<ClosenessWitness> {
    if f.images().is_empty() {
        return Err(Error::Structural("empty source".into()));
    }
    let t = target.t_max();
    let mut min_m = 1.0f64;
    for y in 0..target.len() {
        let best = f
            .images()
            .iter()
            .map(|&fx| target.eval(fx, y, t))
            .try_fold(0.0f64, |acc, m| m.map(|m| acc.max(m)))?;
        min_m = min_m.min(best);
    }
    Ok(ClosenessWitness {
        r: 1.0 - min_m / 2.0,
        t,
        min_m,
    })
}

/// Fixed-scale variant of the onto check.
pub fn is_coarsely_onto_at(target: &FuzzySpace, f: &PointMap, r: f64, t: f64) -> Result<bool> {
    for y in 0..target.len() {
        let mut covered = false;
        for &fx in f.images() {
            if target.eval(fx, y, t)? > 1.0 - r {
                covered = true;
                break;
            }
        }
        if !covered {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub struct CoarseInverseReport {
    pub g: PointMap,
    pub g_expansive: ModulusTable,
    pub fg_closeness: ClosenessWitness,
    pub gf_closeness: ClosenessWitness,
    pub accepted: bool,
}

/// `g(y)` = the source point whose image best approximates `y` at the grid
/// max, smallest index on ties; accepted when `g` is expansive with positive
/// moduli and both compositions carry closeness witnesses.
pub fn find_coarse_inverse(
    source: &FuzzySpace,
    target: &FuzzySpace,
    f: &PointMap,
) -> Result<CoarseInverseReport> {
    let t = target.t_max();
    let mut g_map = Vec::with_capacity(target.len());
    for y in 0..target.len() {
        let mut best = (0usize, -1.0f64);
        for x in 0..source.len() {
            let m = target.eval(f.apply(x), y, t)?;
            if m > best.1 {
                best = (x, m);
            }
        }
        g_map.push(best.0);
    }
    let g = PointMap::new(target, source, g_map)?;
    let g_expansive = check_uniformly_expansive(target, source, &g, &DEFAULT_LADDER)?;
    let fg = f.compose(&g)?;
    let gf = g.compose(f)?;
    let gf_on_source = check_closeness(source, &PointMap::identity(source), &fg)?;
    let fg_on_target = check_closeness(target, &PointMap::identity(target), &gf)?;
    // fg maps X->X via f then g; gf maps Y->Y
    let accepted = g_expansive.all_positive && gf_on_source.min_m > 0.0 && fg_on_target.min_m > 0.0;
    Ok(CoarseInverseReport {
        g,
        g_expansive,
        fg_closeness: fg_on_target,
        gf_closeness: gf_on_source,
        accepted,
    })
}

/// Push a witness family through a coarse equivalence: the set for a target
/// point repartitions `A_{g(y0)}` along the fibers of `f`, preserving
/// cardinalities, then is re-verified on the target.
pub fn transport_witness(
    source: &FuzzySpace,
    target: &FuzzySpace,
    f: &PointMap,
    g: &PointMap,
    w: &WitnessFamily,
    p: ParamTuple,
) -> Result<(WitnessFamily, WitnessCertificate)> {
    if w.len() != source.len() {
        return Err(Error::Structural("witness family does not match the source".into()));
    }
    let mut heights_all = Vec::with_capacity(target.len());
    for y0 in 0..target.len() {
        let x0 = g.apply(y0);
        let mut heights: BTreeMap<usize, u32> = BTreeMap::new();
        for &(z, _) in w.set(x0) {
            *heights.entry(f.apply(z)).or_insert(0) += 1;
        }
        heights_all.push(heights);
    }
    let family = WitnessFamily::from_heights(target.len(), heights_all)?;
    for y0 in 0..target.len() {
        debug_assert_eq!(family.card(y0), w.card(g.apply(y0)));
    }
    let cert = verify_witness(target, &family, p)?;
    Ok((family, cert))
}

/// The induced fuzzy metric space on a subset of points.  Standard and
/// stationary data restrict exactly; other metrics are sampled on the time
/// grid.
pub fn subspace(space: &FuzzySpace, subset: &[usize]) -> Result<FuzzySpace> {
    if subset.is_empty() {
        return Err(Error::Structural("empty subspace".into()));
    }
    let labels: Vec<String> = subset
        .iter()
        .map(|&x| space.points().label(x).to_string())
        .collect();
    let name = format!("{}|{}", space.name(), subset.len());
    let k = subset.len();
    let metric = match space.metric() {
        FuzzyMetric::Standard { d } => FuzzyMetric::Standard {
            d: subset
                .iter()
                .map(|&i| subset.iter().map(|&j| d[i][j]).collect())
                .collect(),
        },
        FuzzyMetric::Stationary { values } => FuzzyMetric::Stationary {
            values: subset
                .iter()
                .map(|&i| subset.iter().map(|&j| values[i][j]).collect())
                .collect(),
        },
        _ => {
            let t_grid = space.t_grid().to_vec();
            let mut values = std::collections::HashMap::new();
            for a in 0..k {
                for b in (a + 1)..k {
                    let samples = t_grid
                        .iter()
                        .map(|&t| space.eval(subset[a], subset[b], t))
                        .collect::<Result<Vec<f64>>>()?;
                    values.insert((a, b), samples);
                }
            }
            FuzzyMetric::Sampled { t_grid, values }
        }
    };
    FuzzySpace::new(name, PointSet::new(labels)?, space.tnorm(), metric)
}

/// Restrict a witness family to a subspace by transporting it along the
/// nearest-point retraction onto the subset.
pub fn restrict_witness(
    space: &FuzzySpace,
    subset: &[usize],
    w: &WitnessFamily,
    p: ParamTuple,
) -> Result<(FuzzySpace, WitnessFamily, WitnessCertificate)> {
    let sub = subspace(space, subset)?;
    let t = space.t_max();
    // retraction X -> subspace: best-approximating subset point, smallest
    // index on ties
    let mut retraction = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        let mut best = (0usize, -1.0f64);
        for (si, &s) in subset.iter().enumerate() {
            let m = space.eval(x, s, t)?;
            if m > best.1 {
                best = (si, m);
            }
        }
        retraction.push(best.0);
    }
    let f = PointMap::new(space, &sub, retraction)?;
    let g = PointMap::new(&sub, space, subset.to_vec())?;
    let (family, cert) = transport_witness(space, &sub, &f, &g, w, p)?;
    Ok((sub, family, cert))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricModulusRow {
    pub a: f64,
    pub t: f64,
    /// sup of target distances over qualifying pairs
    pub s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricModulusTable {
    pub expansive: Vec<MetricModulusRow>,
    /// per row, the fuzzy-level modulus `t'/(t'+S)` it corresponds to
    pub fuzzy_equivalent: Vec<f64>,
    pub t_prime: f64,
}

/// Expansiveness moduli in metric units for maps into a standard-metric
/// space: each `(A,t)` row records `S = sup d(f(x),f(x'))` over qualifying
/// pairs, together with the matching fuzzy modulus at the target grid max.
pub fn metric_target_moduli(
    source: &FuzzySpace,
    target: &FuzzySpace,
    f: &PointMap,
    ladder: &[f64],
) -> Result<MetricModulusTable> {
    let d = match target.metric() {
        FuzzyMetric::Standard { d } => d,
        _ => {
            return Err(Error::Structural(
                "metric moduli need a standard-metric target".into(),
            ))
        }
    };
    let t_prime = target.t_max();
    let mut expansive = Vec::new();
    let mut fuzzy_equivalent = Vec::new();
    for &t in source.t_grid() {
        for &a in ladder {
            let mut s = 0.0f64;
            for x in 0..source.len() {
                for y in 0..source.len() {
                    if source.eval(x, y, t)? >= a {
                        s = s.max(d[f.apply(x)][f.apply(y)]);
                    }
                }
            }
            expansive.push(MetricModulusRow { a, t, s });
            fuzzy_equivalent.push(t_prime / (t_prime + s));
        }
    }
    Ok(MetricModulusTable {
        expansive,
        fuzzy_equivalent,
        t_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers_asdim::Cover;
    use crate::fuzzy_space::BuiltinId;
    use crate::property_a::construct_from_cover;

    fn path(n: usize) -> FuzzySpace {
        FuzzySpace::builtin(BuiltinId::Path, n).unwrap()
    }

    #[test]
    fn identity_map_tables() {
        let s = path(16);
        let f = PointMap::identity(&s);
        let exp = check_uniformly_expansive(&s, &s, &f, &DEFAULT_LADDER).unwrap();
        assert!(exp.dominating);
        assert!(exp.all_positive);
        let prop = check_effectively_proper(&s, &s, &f, &DEFAULT_LADDER).unwrap();
        assert!(prop.ladder_improves);
        assert!(prop.all_positive);
    }

    #[test]
    fn constant_map_tables() {
        let s = path(16);
        let f = PointMap::new(&s, &s, vec![0; 16]).unwrap();
        let exp = check_uniformly_expansive(&s, &s, &f, &DEFAULT_LADDER).unwrap();
        // equal images: modulus 1 on every row
        assert!(exp.rows.iter().all(|r| r.b == 1.0));
        let prop = check_effectively_proper(&s, &s, &f, &DEFAULT_LADDER).unwrap();
        // every pair qualifies at every threshold, so the ladder never moves
        assert!(!prop.ladder_improves);
    }

    #[test]
    fn doubling_map_tables() {
        let small = path(32);
        let big = path(64);
        let f = PointMap::new(&small, &big, (0..32).map(|x| 2 * x).collect()).unwrap();
        let exp = check_uniformly_expansive(&small, &big, &f, &DEFAULT_LADDER).unwrap();
        assert!(exp.all_positive);
        let prop = check_effectively_proper(&small, &big, &f, &DEFAULT_LADDER).unwrap();
        assert!(prop.ladder_improves);
        // direct pair-enumeration oracle for one row
        let t = 1.0;
        let a = 0.5;
        let tp = big.t_max();
        let mut oracle = 1.0f64;
        for x in 0..32 {
            for y in 0..32 {
                if small.eval(x, y, t).unwrap() >= a {
                    oracle = oracle.min(big.eval(2 * x, 2 * y, tp).unwrap());
                }
            }
        }
        let row = exp
            .rows
            .iter()
            .find(|r| r.a == a && r.t == t)
            .expect("grid contains t = 1");
        assert_eq!(row.b, oracle);
    }

    #[test]
    fn closeness_and_onto() {
        let s = path(16);
        let f = PointMap::identity(&s);
        let w = check_closeness(&s, &f, &f).unwrap();
        assert_eq!(w.min_m, 1.0);
        let onto = check_coarsely_onto(&s, &f).unwrap();
        assert_eq!(onto.min_m, 1.0);

        let small = path(32);
        let big = path(64);
        let dbl = PointMap::new(&small, &big, (0..32).map(|x| 2 * x).collect()).unwrap();
        // every odd point is one step from an even image
        assert!(is_coarsely_onto_at(&big, &dbl, 0.6, 1.0).unwrap());
        assert!(!is_coarsely_onto_at(&big, &dbl, 0.3, 1.0).unwrap());
    }

    #[test]
    fn coarse_inverse_of_identity_and_doubling() {
        let s = path(16);
        let report = find_coarse_inverse(&s, &s, &PointMap::identity(&s)).unwrap();
        assert!(report.accepted);
        assert_eq!(report.g.images(), PointMap::identity(&s).images());
        assert_eq!(report.fg_closeness.min_m, 1.0);

        let small = path(32);
        let big = path(64);
        let dbl = PointMap::new(&small, &big, (0..32).map(|x| 2 * x).collect()).unwrap();
        let report = find_coarse_inverse(&small, &big, &dbl).unwrap();
        assert!(report.accepted);
        // halving up to tie-break: g(y) maximizes M(2x, y), so g(2k)=k and
        // g(2k+1) is k (smallest index wins the tie)
        for y in 0..64usize {
            assert_eq!(report.g.apply(y), y / 2);
        }
        assert!(report.fg_closeness.min_m >= 0.9);
    }

    #[test]
    fn transport_along_identity_preserves_cardinalities() {
        let s = path(64);
        let cover = Cover::new(
            64,
            vec![(0..=63).collect(), (0..=31).collect(), (32..=63).collect()],
        )
        .unwrap();
        let p = ParamTuple::new(1.0, 0.6, 1.0).unwrap();
        let (w, _) = construct_from_cover(&s, &cover, p, 1).unwrap();
        let id = PointMap::identity(&s);
        let (tw, cert) = transport_witness(&s, &s, &id, &id, &w, p).unwrap();
        assert!(cert.pass);
        for x in 0..64 {
            assert_eq!(tw.card(x), w.card(x));
        }
        // identity transport flattens levels per point but keeps the sets
        assert_eq!(tw.projection(40), w.projection(40));
    }

    #[test]
    fn transport_along_relabeling_keeps_ratios() {
        let s = path(16);
        // reversal is a self-equivalence of the path space
        let rev = PointMap::new(&s, &s, (0..16).rev().collect()).unwrap();
        // shared anchor keeps intersections nonempty across close pairs
        let heights: Vec<BTreeMap<usize, u32>> = (0..16)
            .map(|x| {
                let mut h = BTreeMap::from([(0usize, 3u32)]);
                if x != 0 {
                    h.insert(x, 1);
                }
                h
            })
            .collect();
        let w = WitnessFamily::from_heights(16, heights).unwrap();
        let p = ParamTuple::new(1.0, 0.6, 1.0).unwrap();
        let before = verify_witness(&s, &w, p).unwrap();
        let (_, after) = transport_witness(&s, &s, &rev, &rev, &w, p).unwrap();
        assert_eq!(before.pass, after.pass);
        assert!((before.worst_ratio - after.worst_ratio).abs() < 1e-12);
        assert_eq!(before.close_pairs, after.close_pairs);
    }

    #[test]
    fn restriction_to_even_points() {
        let s = path(64);
        let cover = Cover::new(
            64,
            vec![(0..=63).collect(), (0..=31).collect(), (32..=63).collect()],
        )
        .unwrap();
        let p = ParamTuple::new(1.0, 0.6, 1.0).unwrap();
        let (w, _) = construct_from_cover(&s, &cover, p, 1).unwrap();
        let evens: Vec<usize> = (0..32).map(|k| 2 * k).collect();
        // even points are 2 apart: close pairs need a wider window
        let p_sub = ParamTuple::new(1.0, 0.7, 1.0).unwrap();
        let (sub, _family, cert) = restrict_witness(&s, &evens, &w, p_sub).unwrap();
        assert_eq!(sub.len(), 32);
        assert!(cert.pass, "{cert:?}");
    }

    #[test]
    fn restriction_to_whole_space_is_canonicalization() {
        let s = path(16);
        let heights: Vec<BTreeMap<usize, u32>> =
            (0..16).map(|x| BTreeMap::from([(x, 2u32)])).collect();
        let w = WitnessFamily::from_heights(16, heights).unwrap();
        let all: Vec<usize> = (0..16).collect();
        let p = ParamTuple::new(5.0, 0.6, 1.0).unwrap();
        let (sub, family, _) = restrict_witness(&s, &all, &w, p).unwrap();
        assert_eq!(sub.len(), 16);
        for x in 0..16 {
            assert_eq!(family.card(x), w.card(x));
        }
    }

    #[test]
    fn singleton_subspace_accepts_any_witness() {
        let s = path(16);
        let heights: Vec<BTreeMap<usize, u32>> =
            (0..16).map(|x| BTreeMap::from([(x, 1u32)])).collect();
        let w = WitnessFamily::from_heights(16, heights).unwrap();
        let p = ParamTuple::new(0.001, 0.9, 1.0).unwrap();
        let (_, _, cert) = restrict_witness(&s, &[7], &w, p).unwrap();
        assert!(cert.pass);
        assert_eq!(cert.close_pairs, 0);
    }

    #[test]
    fn metric_moduli_match_fuzzy_moduli() {
        let s = path(32);
        let f = PointMap::identity(&s);
        let table = metric_target_moduli(&s, &s, &f, &DEFAULT_LADDER).unwrap();
        let fuzzy = check_uniformly_expansive(&s, &s, &f, &DEFAULT_LADDER).unwrap();
        assert_eq!(table.expansive.len(), fuzzy.rows.len());
        for (i, row) in table.expansive.iter().enumerate() {
            let frow = &fuzzy.rows[i];
            assert_eq!(row.a, frow.a);
            assert_eq!(row.t, frow.t);
            // t'/(t'+S) is exactly the standard-metric modulus
            assert!((table.fuzzy_equivalent[i] - frow.b).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_moduli_scale_with_the_map() {
        let s = path(32);
        let big = path(64);
        let f = PointMap::new(&s, &big, (0..32).map(|x| 2 * x).collect()).unwrap();
        let id = PointMap::identity(&s);
        let scaled = metric_target_moduli(&s, &big, &f, &DEFAULT_LADDER).unwrap();
        let plain = metric_target_moduli(&s, &s, &id, &DEFAULT_LADDER).unwrap();
        for (a, b) in scaled.expansive.iter().zip(plain.expansive.iter()) {
            assert_eq!(a.s, 2.0 * b.s);
        }
    }

    #[test]
    fn metric_moduli_reject_non_standard_targets() {
        let s = path(8);
        let t = FuzzySpace::builtin(BuiltinId::NatProduct, 8).unwrap();
        let f = PointMap::new(&s, &t, (0..8).collect()).unwrap();
        assert!(metric_target_moduli(&s, &t, &f, &DEFAULT_LADDER).is_err());
    }

    #[test]
    fn map_validation() {
        let s = path(4);
        let t = path(2);
        assert!(PointMap::new(&s, &t, vec![0, 1, 2, 0]).is_err());
        assert!(PointMap::new(&s, &t, vec![0, 1]).is_err());
        let pairs: BTreeMap<String, String> = [("0", "1"), ("1", "0"), ("2", "1"), ("3", "0")]
            .iter()
            .map(|&(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let f = PointMap::from_labels(&s, &t, &pairs).unwrap();
        assert_eq!(f.images(), &[1, 0, 1, 0]);
    }
}
