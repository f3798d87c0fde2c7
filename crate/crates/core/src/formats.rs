//! JSON file formats: spaces, covers, entourages, witness families, point
//! maps, kernels and operators, plus deterministic serialization helpers.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::characterizations::{Kernel, PropagatedOperator, Window};
use crate::coarse_maps::PointMap;
use crate::coarse_structure::Entourage;
use crate::covers_asdim::{Cover, CoverClaims};
use crate::fuzzy_space::{BuiltinId, FuzzyMetric, FuzzySpace, PointSet};
use crate::numerics::{SymMatrix, TNorm};
use crate::property_a::{ParamTuple, WitnessFamily};
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct SpaceFile {
    name: String,
    tnorm: TNorm,
    points: Vec<String>,
    metric: MetricFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum MetricFile {
    Standard { d: Vec<Vec<f64>> },
    Stationary { values: Vec<Vec<f64>> },
    Sampled {
        t_grid: Vec<f64>,
        values: BTreeMap<String, Vec<f64>>,
    },
    Builtin { id: BuiltinId, n: usize },
}

fn parse_pair_key(key: &str) -> Result<(usize, usize)> {
    let (a, b) = key
        .split_once(',')
        .ok_or_else(|| Error::Format(format!("sampled key {key:?} is not \"i,j\"")))?;
    let i = a
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("bad index in sampled key {key:?}")))?;
    let j = b
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("bad index in sampled key {key:?}")))?;
    Ok((i, j))
}

pub fn space_from_json(text: &str) -> Result<FuzzySpace> {
    let file: SpaceFile = serde_json::from_str(text)?;
    match file.metric {
        MetricFile::Builtin { id, n } => {
            // builtin spaces fix their own labels; the declared points must agree
            let space = FuzzySpace::builtin(id, n)?;
            if !file.points.is_empty() && file.points != space.points().labels() {
                return Err(Error::Format(
                    "declared points do not match the builtin labels".into(),
                ));
            }
            Ok(space)
        }
        MetricFile::Standard { d } => FuzzySpace::new(
            file.name,
            PointSet::new(file.points)?,
            file.tnorm,
            FuzzyMetric::Standard { d },
        ),
        MetricFile::Stationary { values } => FuzzySpace::new(
            file.name,
            PointSet::new(file.points)?,
            file.tnorm,
            FuzzyMetric::Stationary { values },
        ),
        MetricFile::Sampled { t_grid, values } => {
            let mut map = std::collections::HashMap::new();
            for (key, samples) in values {
                map.insert(parse_pair_key(&key)?, samples);
            }
            FuzzySpace::new(
                file.name,
                PointSet::new(file.points)?,
                file.tnorm,
                FuzzyMetric::Sampled {
                    t_grid,
                    values: map,
                },
            )
        }
    }
}

pub fn space_to_json(space: &FuzzySpace) -> Result<String> {
    let metric = match space.metric() {
        FuzzyMetric::Standard { d } => MetricFile::Standard { d: d.clone() },
        FuzzyMetric::Stationary { values } => MetricFile::Stationary {
            values: values.clone(),
        },
        FuzzyMetric::Sampled { t_grid, values } => MetricFile::Sampled {
            t_grid: t_grid.clone(),
            values: values
                .iter()
                .map(|(&(i, j), v)| (format!("{i},{j}"), v.clone()))
                .collect(),
        },
        FuzzyMetric::Builtin { id, n } => MetricFile::Builtin { id: *id, n: *n },
    };
    let file = SpaceFile {
        name: space.name().to_string(),
        tnorm: space.tnorm(),
        points: space.points().labels().to_vec(),
        metric,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn load_space(path: impl AsRef<Path>) -> Result<FuzzySpace> {
    space_from_json(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct CoverFile {
    sets: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claims: Option<CoverClaimsFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoverClaimsFile {
    #[serde(default)]
    r: Option<f64>,
    #[serde(default)]
    t: Option<f64>,
    #[serde(default)]
    lebesgue: Option<(f64, f64)>,
    #[serde(default)]
    multiplicity: Option<usize>,
}

pub fn cover_from_json(text: &str, space: &FuzzySpace) -> Result<Cover> {
    let file: CoverFile = serde_json::from_str(text)?;
    let mut sets = Vec::with_capacity(file.sets.len());
    for labels in file.sets {
        let mut set = Vec::with_capacity(labels.len());
        for l in labels {
            set.push(space.points().index_of(&l)?);
        }
        sets.push(set);
    }
    let mut cover = Cover::new(space.len(), sets)?;
    if let Some(claims) = file.claims {
        cover.claims = Some(CoverClaims {
            bounded: claims.r.zip(claims.t),
            lebesgue: claims.lebesgue,
            multiplicity: claims.multiplicity,
        });
    }
    Ok(cover)
}

pub fn cover_to_json(cover: &Cover, space: &FuzzySpace) -> Result<String> {
    let file = CoverFile {
        sets: cover
            .sets()
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&x| space.points().label(x).to_string())
                    .collect()
            })
            .collect(),
        claims: cover.claims.as_ref().map(|c| CoverClaimsFile {
            r: c.bounded.map(|b| b.0),
            t: c.bounded.map(|b| b.1),
            lebesgue: c.lebesgue,
            multiplicity: c.multiplicity,
        }),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn load_cover(path: impl AsRef<Path>, space: &FuzzySpace) -> Result<Cover> {
    cover_from_json(&std::fs::read_to_string(path)?, space)
}

#[derive(Debug, Serialize, Deserialize)]
struct EntourageFile {
    pairs: Vec<(String, String)>,
}

pub fn entourage_from_json(text: &str, space: &FuzzySpace) -> Result<Entourage> {
    let file: EntourageFile = serde_json::from_str(text)?;
    let mut pairs = Vec::with_capacity(file.pairs.len());
    for (a, b) in file.pairs {
        pairs.push((space.points().index_of(&a)?, space.points().index_of(&b)?));
    }
    Entourage::new(space.len(), pairs)
}

pub fn entourage_to_json(e: &Entourage, space: &FuzzySpace) -> Result<String> {
    let file = EntourageFile {
        pairs: e
            .pairs()
            .iter()
            .map(|&(x, y)| {
                (
                    space.points().label(x).to_string(),
                    space.points().label(y).to_string(),
                )
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn load_entourage(path: impl AsRef<Path>, space: &FuzzySpace) -> Result<Entourage> {
    entourage_from_json(&std::fs::read_to_string(path)?, space)
}

#[derive(Debug, Serialize, Deserialize)]
struct WitnessFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<ParamTuple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sets: Option<BTreeMap<String, Vec<(String, u32)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    heights: Option<BTreeMap<String, BTreeMap<String, u32>>>,
}

pub fn witness_from_json(
    text: &str,
    space: &FuzzySpace,
) -> Result<(WitnessFamily, Option<ParamTuple>)> {
    let file: WitnessFile = serde_json::from_str(text)?;
    let n = space.len();
    let family = match (file.sets, file.heights) {
        (Some(sets), None) => {
            let mut by_point = vec![std::collections::BTreeSet::new(); n];
            for (label, entries) in sets {
                let x = space.points().index_of(&label)?;
                for (zl, level) in entries {
                    by_point[x].insert((space.points().index_of(&zl)?, level));
                }
            }
            WitnessFamily::from_sets(n, by_point)?
        }
        (None, Some(heights)) => {
            let mut by_point = vec![BTreeMap::new(); n];
            for (label, hs) in heights {
                let x = space.points().index_of(&label)?;
                for (zl, h) in hs {
                    by_point[x].insert(space.points().index_of(&zl)?, h);
                }
            }
            WitnessFamily::from_heights(n, by_point)?
        }
        (Some(_), Some(_)) => {
            return Err(Error::Format(
                "witness file has both sets and heights".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Format(
                "witness file needs either sets or heights".into(),
            ))
        }
    };
    Ok((family, file.params))
}

pub fn witness_to_json(
    w: &WitnessFamily,
    params: Option<ParamTuple>,
    space: &FuzzySpace,
) -> Result<String> {
    let mut sets = BTreeMap::new();
    for x in 0..w.len() {
        let entries: Vec<(String, u32)> = w
            .set(x)
            .iter()
            .map(|&(z, l)| (space.points().label(z).to_string(), l))
            .collect();
        sets.insert(space.points().label(x).to_string(), entries);
    }
    let file = WitnessFile {
        params,
        sets: Some(sets),
        heights: None,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn load_witness(
    path: impl AsRef<Path>,
    space: &FuzzySpace,
) -> Result<(WitnessFamily, Option<ParamTuple>)> {
    witness_from_json(&std::fs::read_to_string(path)?, space)
}

#[derive(Debug, Serialize, Deserialize)]
struct MapFile {
    from: String,
    to: String,
    map: BTreeMap<String, String>,
}

pub fn map_from_json(text: &str, source: &FuzzySpace, target: &FuzzySpace) -> Result<PointMap> {
    let file: MapFile = serde_json::from_str(text)?;
    if file.from != source.name() || file.to != target.name() {
        return Err(Error::Format(format!(
            "map is declared {} -> {}, spaces are {} -> {}",
            file.from,
            file.to,
            source.name(),
            target.name()
        )));
    }
    PointMap::from_labels(source, target, &file.map)
}

pub fn map_to_json(f: &PointMap, source: &FuzzySpace, target: &FuzzySpace) -> Result<String> {
    let mut map = BTreeMap::new();
    for x in 0..source.len() {
        map.insert(
            space_label(source, x),
            space_label(target, f.apply(x)),
        );
    }
    let file = MapFile {
        from: f.from.clone(),
        to: f.to.clone(),
        map,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

fn space_label(space: &FuzzySpace, x: usize) -> String {
    space.points().label(x).to_string()
}

pub fn load_map(
    path: impl AsRef<Path>,
    source: &FuzzySpace,
    target: &FuzzySpace,
) -> Result<PointMap> {
    map_from_json(&std::fs::read_to_string(path)?, source, target)
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    labels: Vec<String>,
    matrix: Vec<Vec<f64>>,
    window: Window,
}

fn matrix_from_json(text: &str, space: &FuzzySpace) -> Result<(SymMatrix, Window)> {
    let file: MatrixFile = serde_json::from_str(text)?;
    if file.labels != space.points().labels() {
        return Err(Error::Format(
            "matrix labels do not match the space points".into(),
        ));
    }
    Ok((SymMatrix::from_rows(&file.matrix)?, file.window))
}

pub fn kernel_from_json(text: &str, space: &FuzzySpace) -> Result<Kernel> {
    let (k, window) = matrix_from_json(text, space)?;
    Ok(Kernel { k, window })
}

pub fn operator_from_json(text: &str, space: &FuzzySpace) -> Result<PropagatedOperator> {
    let (matrix, window) = matrix_from_json(text, space)?;
    Ok(PropagatedOperator { matrix, window })
}

pub fn kernel_to_json(k: &Kernel, space: &FuzzySpace) -> Result<String> {
    let file = MatrixFile {
        labels: space.points().labels().to_vec(),
        matrix: k.k.rows(),
        window: k.window,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn operator_to_json(op: &PropagatedOperator, space: &FuzzySpace) -> Result<String> {
    let file = MatrixFile {
        labels: space.points().labels().to_vec(),
        matrix: op.matrix.rows(),
        window: op.window,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn load_kernel(path: impl AsRef<Path>, space: &FuzzySpace) -> Result<Kernel> {
    kernel_from_json(&std::fs::read_to_string(path)?, space)
}

pub fn load_operator(path: impl AsRef<Path>, space: &FuzzySpace) -> Result<PropagatedOperator> {
    operator_from_json(&std::fs::read_to_string(path)?, space)
}
