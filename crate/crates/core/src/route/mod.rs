//! Time-slotted road graph with parking lots, the three route objectives, and
//! the weighted-sum scalarization that the genetic algorithm minimizes.

mod ga;

pub use ga::{compare_weightings, evolve, FitnessSummary, GaConfig, GaTrace, PairedTrace, RunTrace};

use std::collections::{BinaryHeap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::simplex::{check_len, ObjectiveValues, WeightVector};

/// Randomized walks used to estimate the longest origin-to-lot distance.
pub const NORMALIZATION_SAMPLES: usize = 10_000;

const NORMALIZATION_SEED: u64 = 0x005e_ed0f_d1a7;

/// Graph document as read from disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    pub parking_lots: Vec<LotSpec>,
    pub origin: String,
    pub slots: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    pub distance_km: f64,
    pub speeds: Vec<f64>,
    #[serde(default)]
    pub oneway: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LotSpec {
    pub node: String,
    pub availability: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
struct Arc {
    to: usize,
    distance: f64,
    speeds: Vec<f64>,
}

/// Validated routing problem. Nodes are addressed by index internally.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteProblem {
    ids: Vec<String>,
    adjacency: Vec<Vec<Arc>>,
    availability: Vec<Option<Vec<f64>>>,
    origin: usize,
    slots: usize,
    d_max: f64,
    v_max: Vec<f64>,
}

impl RouteProblem {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::GraphParse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self> {
        let GraphDocument {
            nodes,
            edges,
            parking_lots,
            origin,
            slots,
        } = doc;
        if slots == 0 {
            return Err(Error::Graph("slots must be positive".into()));
        }
        if nodes.is_empty() {
            return Err(Error::Graph("no nodes".into()));
        }
        let mut index = HashMap::new();
        for (i, id) in nodes.iter().enumerate() {
            if index.insert(id.as_str(), i).is_some() {
                return Err(Error::Graph(format!("duplicate node {id:?}")));
            }
        }
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::Graph(format!("unknown node {id:?}")))
        };

        let mut adjacency: Vec<Vec<Arc>> = vec![Vec::new(); nodes.len()];
        let mut seen = HashSet::new();
        for e in &edges {
            let (a, b) = (lookup(&e.from)?, lookup(&e.to)?);
            if a == b {
                return Err(Error::Graph(format!("self-loop at {:?}", e.from)));
            }
            if !(e.distance_km.is_finite() && e.distance_km > 0.0) {
                return Err(Error::Graph(format!(
                    "edge {}-{}: distance must be positive",
                    e.from, e.to
                )));
            }
            if e.speeds.len() != slots {
                return Err(Error::Graph(format!(
                    "edge {}-{}: {} speeds for {slots} slots",
                    e.from,
                    e.to,
                    e.speeds.len()
                )));
            }
            if e.speeds.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::Graph(format!(
                    "edge {}-{}: speeds must be positive",
                    e.from, e.to
                )));
            }
            let mut add = |x: usize, y: usize| {
                if !seen.insert((x, y)) {
                    return Err(Error::Graph(format!("duplicate edge {}-{}", nodes[x], nodes[y])));
                }
                adjacency[x].push(Arc {
                    to: y,
                    distance: e.distance_km,
                    speeds: e.speeds.clone(),
                });
                Ok(())
            };
            add(a, b)?;
            if !e.oneway {
                add(b, a)?;
            }
        }

        let mut availability = vec![None; nodes.len()];
        for lot in &parking_lots {
            let i = lookup(&lot.node)?;
            if availability[i].is_some() {
                return Err(Error::Graph(format!("duplicate parking lot {:?}", lot.node)));
            }
            if lot.availability.len() != slots {
                return Err(Error::Graph(format!(
                    "lot {:?}: {} availability values for {slots} slots",
                    lot.node,
                    lot.availability.len()
                )));
            }
            if lot.availability.iter().any(|a| !(0.0..=1.0).contains(a)) {
                return Err(Error::Graph(format!("lot {:?}: availability outside [0, 1]", lot.node)));
            }
            availability[i] = Some(lot.availability.clone());
        }
        if parking_lots.is_empty() {
            return Err(Error::Graph("no parking lots".into()));
        }

        let origin = lookup(&origin)?;
        if availability[origin].is_some() {
            return Err(Error::Graph("origin must not be a parking lot".into()));
        }

        let v_max = (0..slots)
            .map(|s| adjacency.iter().flatten().map(|arc| arc.speeds[s]).fold(0.0, f64::max))
            .collect();

        let mut problem = RouteProblem {
            ids: nodes,
            adjacency,
            availability,
            origin,
            slots,
            d_max: 0.0,
            v_max,
        };
        let shortest = problem.shortest_distances();
        let reachable: Vec<f64> = (0..problem.len())
            .filter(|&v| problem.is_lot(v) && shortest[v].is_finite())
            .map(|v| shortest[v])
            .collect();
        if reachable.is_empty() {
            return Err(Error::Graph("no parking lot is reachable from the origin".into()));
        }
        problem.d_max = reachable
            .into_iter()
            .fold(problem.sampled_longest(NORMALIZATION_SAMPLES), f64::max);
        Ok(problem)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn node_id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn is_lot(&self, v: usize) -> bool {
        self.availability[v].is_some()
    }

    /// Distance normalizer for the first objective.
    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// Fastest edge speed in `slot`.
    pub fn v_max(&self, slot: usize) -> f64 {
        self.v_max[slot]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().map(|a| a.to)
    }

    fn arc(&self, from: usize, to: usize) -> Option<&Arc> {
        self.adjacency[from].iter().find(|a| a.to == to)
    }

    pub fn check_slot(&self, slot: usize) -> Result<()> {
        if slot >= self.slots {
            return Err(Error::SlotOutOfRange {
                slot,
                slots: self.slots,
            });
        }
        Ok(())
    }

    /// Checks that `path` is a simple origin-to-lot path along existing edges.
    pub fn check_path(&self, path: &[usize]) -> Result<()> {
        let (&first, &last) = match (path.first(), path.last()) {
            (Some(f), Some(l)) if path.len() >= 2 => (f, l),
            _ => return Err(Error::InvalidPath("path needs at least two nodes".into())),
        };
        if first != self.origin {
            return Err(Error::InvalidPath("path does not start at the origin".into()));
        }
        if path.iter().any(|&v| v >= self.len()) {
            return Err(Error::InvalidPath("unknown node index".into()));
        }
        if !self.is_lot(last) {
            return Err(Error::InvalidPath(format!("{} is not a parking lot", self.ids[last])));
        }
        let mut seen = HashSet::new();
        if !path.iter().all(|v| seen.insert(v)) {
            return Err(Error::InvalidPath("path repeats a node".into()));
        }
        for w in path.windows(2) {
            if self.arc(w[0], w[1]).is_none() {
                return Err(Error::InvalidPath(format!(
                    "no edge {} -> {}",
                    self.ids[w[0]], self.ids[w[1]]
                )));
            }
        }
        Ok(())
    }

    /// Resolves node ids to a checked index path.
    pub fn path_from_ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        let path = ids
            .iter()
            .map(|id| {
                self.node_index(id.as_ref())
                    .ok_or_else(|| Error::InvalidPath(format!("unknown node {:?}", id.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        self.check_path(&path)?;
        Ok(path)
    }

    pub fn path_distance(&self, path: &[usize]) -> f64 {
        path.windows(2)
            .map(|w| self.arc(w[0], w[1]).map_or(f64::NAN, |a| a.distance))
            .sum()
    }

    fn shortest_distances(&self) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl PartialOrd for Item {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Item {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
            }
        }

        let mut dist = vec![f64::INFINITY; self.len()];
        dist[self.origin] = 0.0;
        let mut heap = BinaryHeap::from([Item(0.0, self.origin)]);
        while let Some(Item(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for a in &self.adjacency[v] {
                let nd = d + a.distance;
                if nd < dist[a.to] {
                    dist[a.to] = nd;
                    heap.push(Item(nd, a.to));
                }
            }
        }
        dist
    }

    /// Longest origin-to-lot distance seen over `samples` self-avoiding walks.
    fn sampled_longest(&self, samples: usize) -> f64 {
        let mut rng = RngSeed::new(NORMALIZATION_SEED).rng();
        let mut best = 0.0f64;
        let mut visited = vec![false; self.len()];
        for _ in 0..samples {
            visited.iter_mut().for_each(|v| *v = false);
            let mut v = self.origin;
            let mut dist = 0.0;
            visited[v] = true;
            loop {
                let options: Vec<&Arc> = self.adjacency[v].iter().filter(|a| !visited[a.to]).collect();
                let Some(a) = options.get(rng.random_range(0..options.len().max(1))) else {
                    break;
                };
                dist += a.distance;
                v = a.to;
                visited[v] = true;
                if self.is_lot(v) {
                    best = best.max(dist);
                }
            }
        }
        best
    }

    /// Random simple path from `from` to the first node satisfying `is_target`,
    /// never entering `blocked`. Depth-first with shuffled neighbor order, so a
    /// path is found whenever one exists.
    pub(crate) fn random_path<R: Rng>(
        &self,
        rng: &mut R,
        from: usize,
        is_target: impl Fn(usize) -> bool,
        blocked: &[bool],
    ) -> Option<Vec<usize>> {
        let mut visited = blocked.to_vec();
        visited[from] = true;
        let mut path = vec![from];
        let mut stack = vec![self.shuffled_neighbors(from, rng)];
        while let Some(frontier) = stack.last_mut() {
            match frontier.pop() {
                Some(next) if !visited[next] => {
                    path.push(next);
                    if is_target(next) {
                        return Some(path);
                    }
                    visited[next] = true;
                    stack.push(self.shuffled_neighbors(next, rng));
                }
                Some(_) => {}
                None => {
                    stack.pop();
                    path.pop();
                }
            }
        }
        None
    }

    fn shuffled_neighbors<R: Rng>(&self, v: usize, rng: &mut R) -> Vec<usize> {
        let mut n: Vec<usize> = self.neighbors(v).collect();
        n.shuffle(rng);
        n
    }
}

/// `(f1, f2, f3)` for `path` in `slot`: normalized distance, speed shortfall
/// against the fastest edge in the slot, and unavailability at the lot.
pub fn route_objectives(problem: &RouteProblem, path: &[usize], slot: usize) -> Result<ObjectiveValues> {
    problem.check_slot(slot)?;
    problem.check_path(path)?;
    let mut dist = 0.0;
    let mut weighted_speed = 0.0;
    for w in path.windows(2) {
        let a = problem.arc(w[0], w[1]).expect("checked path");
        dist += a.distance;
        weighted_speed += a.distance * a.speeds[slot];
    }
    let f1 = (dist / problem.d_max).clamp(0.0, 1.0);
    let f2 = (1.0 - weighted_speed / dist / problem.v_max[slot]).clamp(0.0, 1.0);
    let lot = path[path.len() - 1];
    let avail = problem.availability[lot].as_ref().expect("checked path")[slot];
    let f3 = (1.0 - avail).clamp(0.0, 1.0);
    ObjectiveValues::new(vec![f1, f2, f3])
}

/// `Σ w_i f_i`.
pub fn scalarize(weights: &WeightVector, objectives: &ObjectiveValues) -> Result<f64> {
    check_len(weights.len(), objectives.len())?;
    Ok(weights
        .as_slice()
        .iter()
        .zip(objectives.as_slice())
        .map(|(w, f)| w * f)
        .sum())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::RouteProblem;

    /// O -> A -> L with a direct O -> L shortcut.
    pub const TRIANGLE: &str = r#"{
        "nodes": ["O", "A", "L"],
        "edges": [
            {"from": "O", "to": "A", "distance_km": 1.0, "speeds": [40, 20]},
            {"from": "A", "to": "L", "distance_km": 2.0, "speeds": [60, 30]},
            {"from": "O", "to": "L", "distance_km": 2.5, "speeds": [30, 30]}
        ],
        "parking_lots": [{"node": "L", "availability": [0.75, 0.5]}],
        "origin": "O",
        "slots": 2
    }"#;

    /// Two layers of crossings feeding two lots; a few dozen simple paths.
    pub const LADDER: &str = r#"{
        "nodes": ["O", "a1", "a2", "a3", "b1", "b2", "b3", "P", "Q"],
        "edges": [
            {"from": "O", "to": "a1", "distance_km": 1.0, "speeds": [50]},
            {"from": "O", "to": "a2", "distance_km": 1.4, "speeds": [30]},
            {"from": "O", "to": "a3", "distance_km": 0.8, "speeds": [20]},
            {"from": "a1", "to": "a2", "distance_km": 0.7, "speeds": [40]},
            {"from": "a2", "to": "a3", "distance_km": 0.9, "speeds": [35]},
            {"from": "a1", "to": "b1", "distance_km": 1.2, "speeds": [60]},
            {"from": "a2", "to": "b2", "distance_km": 1.1, "speeds": [25]},
            {"from": "a3", "to": "b3", "distance_km": 1.3, "speeds": [45]},
            {"from": "b1", "to": "b2", "distance_km": 0.6, "speeds": [30]},
            {"from": "b2", "to": "b3", "distance_km": 0.5, "speeds": [50]},
            {"from": "b1", "to": "P", "distance_km": 0.9, "speeds": [55]},
            {"from": "b3", "to": "Q", "distance_km": 0.8, "speeds": [20]},
            {"from": "b2", "to": "Q", "distance_km": 1.5, "speeds": [65]}
        ],
        "parking_lots": [
            {"node": "P", "availability": [0.3]},
            {"node": "Q", "availability": [0.8]}
        ],
        "origin": "O",
        "slots": 1
    }"#;

    pub fn triangle() -> RouteProblem {
        RouteProblem::from_json(TRIANGLE).unwrap()
    }

    pub fn ladder() -> RouteProblem {
        RouteProblem::from_json(LADDER).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    fn obj(v: &[f64]) -> ObjectiveValues {
        ObjectiveValues::new(v.to_vec()).unwrap()
    }

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn scalarize_examples() {
        assert!((scalarize(&wv(&[0.29, 0.30, 0.41]), &obj(&[0.5; 3])).unwrap() - 0.5).abs() < 1e-15);
        assert!((scalarize(&wv(&[0.32, 0.28, 0.40]), &obj(&[1.0, 0.0, 0.0])).unwrap() - 0.32).abs() < 1e-15);
        assert!((scalarize(&wv(&[1.0, 1.0, 1.0]), &obj(&[0.3, 0.6, 0.9])).unwrap() - 0.6).abs() < 1e-15);
        assert!(matches!(
            scalarize(&wv(&[0.5, 0.5]), &obj(&[0.1, 0.2, 0.3])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn triangle_hand_values() {
        let p = triangle();
        // Longest simple path O-A-L is 3 km.
        assert_eq!(p.d_max(), 3.0);
        assert_eq!(p.v_max(0), 60.0);
        assert_eq!(p.v_max(1), 30.0);

        let via = p.path_from_ids(&["O", "A", "L"]).unwrap();
        let f = route_objectives(&p, &via, 0).unwrap();
        let mean_speed = (1.0 * 40.0 + 2.0 * 60.0) / 3.0;
        assert_eq!(f.as_slice()[0], 1.0);
        assert!((f.as_slice()[1] - (1.0 - mean_speed / 60.0)).abs() < 1e-15);
        assert!((f.as_slice()[2] - 0.25).abs() < 1e-15);

        let direct = p.path_from_ids(&["O", "L"]).unwrap();
        let f = route_objectives(&p, &direct, 1).unwrap();
        assert!((f.as_slice()[0] - 2.5 / 3.0).abs() < 1e-15);
        // single edge at the slot's top speed
        assert_eq!(f.as_slice()[1], 0.0);
        assert_eq!(f.as_slice()[2], 0.5);
    }

    #[test]
    fn best_case_speed_and_availability() {
        let doc = r#"{"nodes":["O","L"],"edges":[{"from":"O","to":"L","distance_km":1.0,"speeds":[50]}],
            "parking_lots":[{"node":"L","availability":[1.0]}],"origin":"O","slots":1}"#;
        let p = RouteProblem::from_json(doc).unwrap();
        let f = route_objectives(&p, &[0, 1], 0).unwrap();
        assert_eq!(f.as_slice(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn distance_term_is_slot_invariant() {
        let p = triangle();
        for path in [vec![0, 1, 2], vec![0, 2]] {
            let a = route_objectives(&p, &path, 0).unwrap();
            let b = route_objectives(&p, &path, 1).unwrap();
            assert_eq!(a.as_slice()[0], b.as_slice()[0]);
        }
    }

    #[test]
    fn path_errors() {
        let p = triangle();
        assert!(route_objectives(&p, &[0, 1], 0).is_err());
        assert!(route_objectives(&p, &[1, 2], 0).is_err());
        assert!(route_objectives(&p, &[0], 0).is_err());
        assert!(route_objectives(&p, &[0, 2, 1, 2], 0).is_err());
        assert!(matches!(
            route_objectives(&p, &[0, 2], 2),
            Err(Error::SlotOutOfRange { slot: 2, slots: 2 })
        ));
    }

    #[test]
    fn oneway_edges_are_directed() {
        let doc = r#"{"nodes":["O","A","L"],"edges":[
            {"from":"A","to":"O","distance_km":1.0,"speeds":[50],"oneway":true},
            {"from":"A","to":"L","distance_km":1.0,"speeds":[50]}],
            "parking_lots":[{"node":"L","availability":[1.0]}],"origin":"O","slots":1}"#;
        assert!(RouteProblem::from_json(doc).is_err());
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = RouteProblem::from_json("{\n  \"nodes\": [\"O\",\n  oops]\n}").unwrap_err();
        match err {
            Error::GraphParse { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_errors() {
        let base: GraphDocument = serde_json::from_str(TRIANGLE).unwrap();
        let broken = |f: &dyn Fn(&mut GraphDocument)| {
            let mut d = base.clone();
            f(&mut d);
            RouteProblem::from_document(d)
        };
        assert!(broken(&|_| {}).is_ok());
        assert!(broken(&|d| d.slots = 3).is_err());
        assert!(broken(&|d| d.edges[0].distance_km = 0.0).is_err());
        assert!(broken(&|d| d.edges[0].speeds[0] = -1.0).is_err());
        assert!(broken(&|d| d.edges[0].to = "X".into()).is_err());
        assert!(broken(&|d| d.edges[0].to = "O".into()).is_err());
        assert!(broken(&|d| d.edges.push(d.edges[0].clone())).is_err());
        assert!(broken(&|d| d.parking_lots[0].availability[0] = 1.5).is_err());
        assert!(broken(&|d| d.parking_lots.clear()).is_err());
        assert!(broken(&|d| d.origin = "L".into()).is_err());
        assert!(broken(&|d| d.nodes.push("O".into())).is_err());
        assert!(broken(&|d| {
            d.nodes.push("Z".into());
            d.parking_lots = vec![LotSpec {
                node: "Z".into(),
                availability: vec![1.0, 1.0],
            }];
        })
        .is_err());
    }

    #[test]
    fn random_paths_are_valid() {
        let p = ladder();
        let mut rng = RngSeed::new(3).rng();
        let blocked = vec![false; p.len()];
        for _ in 0..200 {
            let path = p.random_path(&mut rng, p.origin(), |v| p.is_lot(v), &blocked).unwrap();
            p.check_path(&path).unwrap();
        }
    }

    #[test]
    fn random_path_respects_blocked_nodes() {
        let p = ladder();
        let mut rng = RngSeed::new(4).rng();
        let mut blocked = vec![false; p.len()];
        let b2 = p.node_index("b2").unwrap();
        let q = p.node_index("Q").unwrap();
        blocked[b2] = true;
        for _ in 0..50 {
            let path = p.random_path(&mut rng, p.origin(), |v| v == q, &blocked).unwrap();
            assert!(!path.contains(&b2));
        }
        blocked[p.node_index("b3").unwrap()] = true;
        assert!(p.random_path(&mut rng, p.origin(), |v| v == q, &blocked).is_none());
    }

    proptest! {
        #[test]
        fn fitness_is_a_convex_combination(w in prop::collection::vec(0.01f64..1.0, 3),
                                            f in prop::collection::vec(0.0f64..=1.0, 3)) {
            let s = scalarize(&wv(&w), &obj(&f)).unwrap();
            let lo = f.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(s >= lo - 1e-12 && s <= hi + 1e-12);
        }

        #[test]
        fn shifting_fitness_keeps_ranking(values in prop::collection::vec(0.0f64..1.0, 2..20), c in -1.0f64..1.0) {
            let rank = |v: &[f64]| {
                let mut idx: Vec<usize> = (0..v.len()).collect();
                idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
                idx
            };
            let shifted: Vec<f64> = values.iter().map(|x| x + c).collect();
            // near-ties may swap through rounding after the shift
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 1e-9));
            prop_assert_eq!(rank(&values), rank(&shifted));
        }

        #[test]
        fn objectives_stay_in_unit_interval(seed in any::<u64>()) {
            static LADDER_PROBLEM: std::sync::OnceLock<RouteProblem> = std::sync::OnceLock::new();
            let p = LADDER_PROBLEM.get_or_init(ladder);
            let mut rng = RngSeed::new(seed).rng();
            let path = p.random_path(&mut rng, p.origin(), |v| p.is_lot(v), &vec![false; p.len()]).unwrap();
            let f = route_objectives(p, &path, 0).unwrap();
            prop_assert!(f.as_slice().iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }
}
