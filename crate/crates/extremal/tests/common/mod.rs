#![allow(dead_code)]

//! Shared helpers for integration tests: an independent brute-force
//! shortest-path oracle and a real inverse-edit implementation.

use extremal::payload::{Cell, GraphForm, GraphInput, Payload, WeightPolicy, URI_COMPONENTS};

/// All-simple-paths minimum distance, by exhaustive DFS with plain f64
/// sums. Independent of the Dijkstra implementation under test; usable for
/// small node counts only.
pub fn brute_force_shortest(graph: &GraphInput) -> Option<f64> {
    let (n, edges) = flatten(graph);
    let (source, target) = (graph.source - 1, graph.target - 1);
    assert!(source < n && target < n, "oracle: ids in range");

    let mut best: Option<f64> = None;
    let mut visited = vec![false; n];
    fn dfs(
        node: usize,
        target: usize,
        dist: f64,
        edges: &[Vec<(usize, f64)>],
        visited: &mut [bool],
        best: &mut Option<f64>,
    ) {
        if node == target {
            *best = Some(best.map_or(dist, |b: f64| b.min(dist)));
            return;
        }
        visited[node] = true;
        for &(next, weight) in &edges[node] {
            if !visited[next] {
                dfs(next, target, dist + weight, edges, visited, best);
            }
        }
        visited[node] = false;
    }
    dfs(source, target, 0.0, &edges, &mut visited, &mut best);
    best
}

/// Adjacency (directed for matrices, both directions for edge lists),
/// applying the default-1 policy where it applies.
fn flatten(graph: &GraphInput) -> (usize, Vec<Vec<(usize, f64)>>) {
    match &graph.form {
        GraphForm::Matrix(m) => {
            let n = m.len();
            let mut edges = vec![Vec::new(); n];
            for (i, row) in m.iter().enumerate() {
                for (j, cell) in row.iter().enumerate() {
                    if i != j {
                        if let Cell::Weight(w) = cell {
                            edges[i].push((j, *w));
                        }
                    }
                }
            }
            (n, edges)
        }
        GraphForm::Edges(list) => {
            let n = list
                .iter()
                .map(|e| e.from.max(e.to))
                .max()
                .unwrap_or(0)
                .max(graph.source)
                .max(graph.target);
            let mut edges = vec![Vec::new(); n];
            for e in list {
                let w = match (e.weight, graph.weight_policy) {
                    (Some(w), _) => w,
                    (None, WeightPolicy::Default1) => 1.0,
                    (None, WeightPolicy::Strict) => panic!("oracle: missing weight under strict"),
                };
                edges[e.from - 1].push((e.to - 1, w));
                edges[e.to - 1].push((e.from - 1, w));
            }
            (n, edges)
        }
    }
}

/// Applies the inverse edit: restores the seed's value for every component
/// the case changed, by actually editing the case payload.
pub fn apply_inverse_edit(seed: &Payload, case: &Payload) -> Payload {
    match (seed, case) {
        (Payload::DnsName(seed_name), Payload::DnsName(_)) => {
            Payload::DnsName(seed_name.clone())
        }
        (Payload::Uri(seed_parts), Payload::Uri(case_parts)) => {
            let mut restored = case_parts.clone();
            for component in URI_COMPONENTS {
                if restored.component(component) != seed_parts.component(component) {
                    restored
                        .set_component(component, seed_parts.component(component).map(String::from));
                }
            }
            Payload::Uri(restored)
        }
        (Payload::BgpFilter(_), Payload::BgpFilter(_)) => {
            let seed_value = seed.to_value();
            let mut case_value = case.to_value();
            for side in ["route", "rmap"] {
                let seed_obj = seed_value[side].as_object().cloned().unwrap_or_default();
                let keys: Vec<String> = case_value[side]
                    .as_object()
                    .map(|o| o.keys().cloned().collect())
                    .unwrap_or_default();
                let case_obj = case_value[side].as_object_mut().unwrap();
                for key in keys {
                    if seed_obj.get(&key) != case_obj.get(&key) {
                        match seed_obj.get(&key) {
                            Some(v) => {
                                case_obj.insert(key, v.clone());
                            }
                            None => {
                                case_obj.remove(&key);
                            }
                        }
                    }
                }
                for (key, value) in &seed_obj {
                    case_obj.entry(key.clone()).or_insert_with(|| value.clone());
                }
            }
            Payload::from_value(extremal::Protocol::BgpFilter, &case_value)
                .expect("restored bgp payload parses")
        }
        (Payload::Graph(seed_graph), Payload::Graph(_)) => Payload::Graph(seed_graph.clone()),
        _ => panic!("inverse edit across protocols"),
    }
}
