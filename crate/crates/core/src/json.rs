//! JSON formats for spaces, maps, graphs, and bundles.
//!
//! Space: `{ "points": [ids], "dist": [[number or "inf"]], "labels": {...}? }`
//! Map:   `{ "source": name, "target": name, "assign": { id: id } }`
//! Graph: `{ "vertices": [ids], "edges": [[u, v, weight, kind]] }`
//!
//! A bundle groups named spaces and maps (plus optional windows and graphs)
//! so pipelines can pass everything through one stream. Integral matrices
//! round-trip bit-stably. Parse errors carry a JSON-pointer-style location.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::graph::{EdgeKind, WeightedGraph};
use crate::map::MappedPair;
use crate::space::{Space, SpaceRef};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceJson {
    pub points: Vec<String>,
    pub dist: Vec<Vec<Dist>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

impl SpaceJson {
    pub fn from_space(space: &Space) -> SpaceJson {
        let n = space.len();
        let dist = (0..n)
            .map(|i| (0..n).map(|j| space.dist(i as u32, j as u32)).collect())
            .collect();
        SpaceJson {
            points: space.ids().to_vec(),
            dist,
            labels: space.labels().clone(),
        }
    }

    pub fn into_space(self, at: &str) -> Result<SpaceRef> {
        let n = self.points.len();
        if self.dist.len() != n {
            return Err(Error::Parse {
                pointer: format!("{at}/dist"),
                message: format!("expected {n} rows, got {}", self.dist.len()),
            });
        }
        for (i, row) in self.dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse {
                    pointer: format!("{at}/dist/{i}"),
                    message: format!("expected {n} entries, got {}", row.len()),
                });
            }
        }
        let space = Space::new(self.points, self.dist, self.labels).map_err(|e| match e {
            Error::MetricViolation(m) => Error::Parse {
                pointer: format!("{at}/dist"),
                message: m,
            },
            other => other,
        })?;
        Ok(Arc::new(space))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapJson {
    pub source: String,
    pub target: String,
    pub assign: BTreeMap<String, String>,
}

impl MapJson {
    pub fn from_map(source: &str, target: &str, map: &MappedPair) -> MapJson {
        let assign = map
            .source()
            .ids()
            .iter()
            .enumerate()
            .map(|(i, id)| {
                (id.clone(), map.target().id(map.apply(i as u32)).to_string())
            })
            .collect();
        MapJson {
            source: source.to_string(),
            target: target.to_string(),
            assign,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, Dist, EdgeKind)>,
}

impl GraphJson {
    pub fn from_graph(g: &WeightedGraph) -> GraphJson {
        GraphJson {
            vertices: g.ids().to_vec(),
            edges: g
                .edges()
                .map(|(u, v, w, k)| {
                    (
                        g.ids()[u as usize].clone(),
                        g.ids()[v as usize].clone(),
                        w,
                        k,
                    )
                })
                .collect(),
        }
    }

    pub fn into_graph(self, at: &str) -> Result<WeightedGraph> {
        let mut g = WeightedGraph::new(self.vertices).map_err(|e| Error::Parse {
            pointer: format!("{at}/vertices"),
            message: e.to_string(),
        })?;
        for (k, (u, v, w, kind)) in self.edges.into_iter().enumerate() {
            let ui = g.index_of(&u).ok_or_else(|| Error::Parse {
                pointer: format!("{at}/edges/{k}/0"),
                message: format!("unknown vertex {u:?}"),
            })?;
            let vi = g.index_of(&v).ok_or_else(|| Error::Parse {
                pointer: format!("{at}/edges/{k}/1"),
                message: format!("unknown vertex {v:?}"),
            })?;
            g.add_edge(ui, vi, w, kind).map_err(|e| Error::Parse {
                pointer: format!("{at}/edges/{k}"),
                message: e.to_string(),
            })?;
        }
        Ok(g)
    }
}

/// Named spaces and maps travelling together through a pipeline.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BundleJson {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub spaces: BTreeMap<String, SpaceJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub graphs: BTreeMap<String, GraphJson>,
    /// Interior windows as id lists, keyed by space name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub windows: BTreeMap<String, Vec<String>>,
}

/// A decoded bundle: spaces resolved, maps bound to their spaces.
pub struct Bundle {
    pub spaces: BTreeMap<String, SpaceRef>,
    pub maps: BTreeMap<String, MappedPair>,
    pub map_ends: BTreeMap<String, (String, String)>,
    pub windows: BTreeMap<String, Vec<String>>,
}

impl Bundle {
    pub fn decode(json: BundleJson) -> Result<Bundle> {
        let mut spaces = BTreeMap::new();
        for (name, sj) in json.spaces {
            let space = sj.into_space(&format!("/spaces/{name}"))?;
            spaces.insert(name, space);
        }
        let mut maps = BTreeMap::new();
        let mut map_ends = BTreeMap::new();
        for (name, mj) in json.maps {
            let at = format!("/maps/{name}");
            let source = spaces.get(&mj.source).ok_or_else(|| Error::Parse {
                pointer: format!("{at}/source"),
                message: format!("unknown space {:?}", mj.source),
            })?;
            let target = spaces.get(&mj.target).ok_or_else(|| Error::Parse {
                pointer: format!("{at}/target"),
                message: format!("unknown space {:?}", mj.target),
            })?;
            let map = MappedPair::from_assign(source.clone(), target.clone(), &mj.assign)
                .map_err(|e| Error::Parse {
                    pointer: format!("{at}/assign"),
                    message: e.to_string(),
                })?;
            map_ends.insert(name.clone(), (mj.source, mj.target));
            maps.insert(name, map);
        }
        Ok(Bundle { spaces, maps, map_ends, windows: json.windows })
    }

    /// Window mask for a named space; `None` when no window is declared.
    pub fn window_mask(&self, space_name: &str) -> Result<Option<Vec<bool>>> {
        let Some(ids) = self.windows.get(space_name) else {
            return Ok(None);
        };
        let space = self.spaces.get(space_name).ok_or_else(|| Error::Parse {
            pointer: format!("/windows/{space_name}"),
            message: "window names an unknown space".into(),
        })?;
        let mut mask = vec![false; space.len()];
        for id in ids {
            let i = space.index_of(id).ok_or_else(|| Error::Parse {
                pointer: format!("/windows/{space_name}"),
                message: format!("unknown point {id:?}"),
            })?;
            mask[i as usize] = true;
        }
        Ok(Some(mask))
    }
}

/// Requires every space in the bundle to be integral (the exact path).
pub fn require_integral(bundle: &Bundle) -> Result<()> {
    for (name, space) in &bundle.spaces {
        if !space.is_integral() {
            return Err(Error::NonIntegral(format!("space {name:?}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_round_trip_is_bit_stable() {
        let ids: Vec<String> = (0..4u32).map(|i| i.to_string()).collect();
        let s = Space::from_fn_unchecked(ids, |i, j| {
            if (i as i32 - j as i32).abs() == 3 {
                Dist::INF
            } else {
                Dist::from_raw(((i as i64 - j as i64).abs()) as f64)
            }
        });
        let j1 = serde_json::to_string(&SpaceJson::from_space(&s)).unwrap();
        let parsed: SpaceJson = serde_json::from_str(&j1).unwrap();
        let s2 = parsed.into_space("/spaces/x").unwrap();
        let j2 = serde_json::to_string(&SpaceJson::from_space(&s2)).unwrap();
        assert_eq!(j1, j2);
        assert_eq!(s, *s2);
    }

    #[test]
    fn bad_matrix_reports_pointer() {
        let json = r#"{"points":["a","b"],"dist":[[0,1],[1]]}"#;
        let sj: SpaceJson = serde_json::from_str(json).unwrap();
        let err = sj.into_space("/spaces/x").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("/spaces/x/dist/1"), "{msg}");
    }

    #[test]
    fn bundle_binds_maps_to_spaces() {
        let json = r#"{
            "spaces": {
                "X": {"points": ["a", "b"], "dist": [[0, 2], [2, 0]]},
                "Y": {"points": ["u"], "dist": [[0]]}
            },
            "maps": {
                "f": {"source": "X", "target": "Y", "assign": {"a": "u", "b": "u"}}
            },
            "windows": {"X": ["a"]}
        }"#;
        let bj: BundleJson = serde_json::from_str(json).unwrap();
        let bundle = Bundle::decode(bj).unwrap();
        let f = &bundle.maps["f"];
        assert_eq!(f.apply(0), 0);
        assert_eq!(bundle.window_mask("X").unwrap(), Some(vec![true, false]));
        assert!(require_integral(&bundle).is_ok());
    }

    #[test]
    fn graph_round_trip() {
        let mut g = WeightedGraph::new(vec!["a".into(), "b".into()]).unwrap();
        g.add_edge(0, 1, Dist::from_raw(2.0), EdgeKind::Glued).unwrap();
        let gj = GraphJson::from_graph(&g);
        let s = serde_json::to_string(&gj).unwrap();
        let back: GraphJson = serde_json::from_str(&s).unwrap();
        let g2 = back.into_graph("/graphs/g").unwrap();
        assert_eq!(g2.weight(0, 1), Some(Dist::from_raw(2.0)));
    }
}
