//! The market's upper convex frontier in (ln p, ln r) space.
//!
//! Two constructions are provided: a max-slope scan that walks the hull
//! vertex by vertex, and an O(N log N) monotone chain. Both return the same
//! canonical frontier: vertices ordered by strictly increasing ln p with
//! strictly decreasing, strictly negative edge slopes (collinear middle
//! points removed).

use std::collections::HashMap;

use thiserror::Error;

use crate::market::{MarketSnapshot, NormalizedItem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrontierError {
    #[error("EmptyMarket: cannot build a frontier from no items")]
    EmptyMarket,
    #[error("VerticalPair: items {0} and {1} share the same ln p")]
    VerticalPair(String, String),
    #[error("MismatchedMarket: frontier was not built from this market")]
    MismatchedMarket,
}

/// Log-plane slope between two items: (ln r_b - ln r_a) / (ln p_b - ln p_a).
pub fn slope(a: &NormalizedItem, b: &NormalizedItem) -> Result<f64, FrontierError> {
    if a.ln_p == b.ln_p {
        return Err(FrontierError::VerticalPair(a.id.clone(), b.id.clone()));
    }
    Ok((b.ln_r - a.ln_r) / (b.ln_p - a.ln_p))
}

/// Ordered frontier vertices plus the slopes of consecutive edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    pub vertices: Vec<NormalizedItem>,
    pub edge_slopes: Vec<f64>,
}

impl Frontier {
    fn from_vertices(vertices: Vec<NormalizedItem>) -> Self {
        let edge_slopes = vertices
            .windows(2)
            .map(|w| (w[1].ln_r - w[0].ln_r) / (w[1].ln_p - w[0].ln_p))
            .collect();
        let f = Frontier {
            vertices,
            edge_slopes,
        };
        debug_assert!(f.check_invariants().is_ok(), "{:?}", f.check_invariants());
        f
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Verify ordering, slope negativity and strict concavity.
    pub fn check_invariants(&self) -> Result<(), String> {
        for w in self.vertices.windows(2) {
            if !(w[0].ln_p < w[1].ln_p) {
                return Err(format!("ln_p not increasing at {} -> {}", w[0].id, w[1].id));
            }
            if !(w[0].ln_r > w[1].ln_r) {
                return Err(format!("ln_r not decreasing at {} -> {}", w[0].id, w[1].id));
            }
        }
        for s in &self.edge_slopes {
            if !(*s < 0.0) {
                return Err(format!("non-negative edge slope {s}"));
            }
        }
        for w in self.edge_slopes.windows(2) {
            if !(w[0] > w[1]) {
                return Err(format!("slopes not strictly decreasing: {} then {}", w[0], w[1]));
            }
        }
        Ok(())
    }
}

/// How each market item relates to the frontier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Role {
    /// On the frontier, at this position in `Frontier::vertices`.
    Vertex(usize),
    /// Strictly below the frontier in log space.
    Interior,
    /// Removed by the tie policy: exact duplicate, or equal ln p with lower r.
    DominatedDuplicate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierClassification {
    /// One (id, role) entry per market item, in market order.
    pub roles: Vec<(String, Role)>,
}

impl FrontierClassification {
    pub fn role_of(&self, id: &str) -> Option<&Role> {
        self.roles.iter().find(|(i, _)| i == id).map(|(_, r)| r)
    }
}

/// Tie policy: collapse exact duplicate points to the lowest id, then keep
/// only the max-r item among equal-ln_p groups. Returns surviving indices.
fn representatives(market: &MarketSnapshot) -> Vec<usize> {
    let mut by_point: HashMap<(u64, u64), usize> = HashMap::new();
    for (i, it) in market.items.iter().enumerate() {
        let key = (it.ln_p.to_bits(), it.ln_r.to_bits());
        match by_point.get(&key) {
            Some(&j) if market.items[j].id <= it.id => {}
            _ => {
                by_point.insert(key, i);
            }
        }
    }
    let mut by_price: HashMap<u64, usize> = HashMap::new();
    for &i in by_point.values() {
        let it = &market.items[i];
        let key = it.ln_p.to_bits();
        match by_price.get(&key) {
            Some(&j) if market.items[j].ln_r >= it.ln_r => {}
            _ => {
                by_price.insert(key, i);
            }
        }
    }
    let mut survivors: Vec<usize> = by_price.into_values().collect();
    survivors.sort_unstable();
    survivors
}

/// Max-slope scan: start at the top-left extreme (max r, then max p) and
/// repeatedly jump to the right-side candidate with the greatest slope,
/// farthest on ties so collinear middles are skipped.
pub fn upper_frontier_scan(market: &MarketSnapshot) -> Result<Frontier, FrontierError> {
    if market.items.is_empty() {
        return Err(FrontierError::EmptyMarket);
    }
    let idx = representatives(market);
    let items = &market.items;

    let mut cur = idx[0];
    for &i in &idx[1..] {
        let (a, b) = (&items[i], &items[cur]);
        if a.ln_r > b.ln_r || (a.ln_r == b.ln_r && a.ln_p > b.ln_p) {
            cur = i;
        }
    }

    let mut vertices = vec![items[cur].clone()];
    loop {
        let mut best: Option<(f64, usize)> = None;
        for &i in &idx {
            let c = &items[i];
            if c.ln_p <= items[cur].ln_p {
                continue;
            }
            let k = (c.ln_r - items[cur].ln_r) / (c.ln_p - items[cur].ln_p);
            best = match best {
                None => Some((k, i)),
                Some((bk, bi)) => {
                    if k > bk || (k == bk && c.ln_p > items[bi].ln_p) {
                        Some((k, i))
                    } else {
                        Some((bk, bi))
                    }
                }
            };
        }
        match best {
            Some((_, next)) => {
                vertices.push(items[next].clone());
                cur = next;
            }
            None => break,
        }
    }
    Ok(Frontier::from_vertices(vertices))
}

/// Monotone-chain construction: sort by ln p, build the upper hull, then
/// keep the portion from the last maximum-ln_r vertex rightward (the part
/// with negative slopes).
pub fn upper_frontier_chain(market: &MarketSnapshot) -> Result<Frontier, FrontierError> {
    if market.items.is_empty() {
        return Err(FrontierError::EmptyMarket);
    }
    let idx = representatives(market);
    let items = &market.items;

    let mut order = idx;
    order.sort_by(|&a, &b| items[a].ln_p.partial_cmp(&items[b].ln_p).unwrap());

    let mut hull: Vec<usize> = Vec::with_capacity(order.len());
    for &i in &order {
        while hull.len() >= 2 {
            let o = &items[hull[hull.len() - 2]];
            let a = &items[hull[hull.len() - 1]];
            let b = &items[i];
            let cross = (a.ln_p - o.ln_p) * (b.ln_r - o.ln_r) - (a.ln_r - o.ln_r) * (b.ln_p - o.ln_p);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }

    let mut start = 0;
    for (pos, &i) in hull.iter().enumerate() {
        if items[i].ln_r >= items[hull[start]].ln_r {
            start = pos;
        }
    }
    let vertices = hull[start..].iter().map(|&i| items[i].clone()).collect();
    Ok(Frontier::from_vertices(vertices))
}

/// Classify every market item against a frontier built from that market.
pub fn classify(
    market: &MarketSnapshot,
    frontier: &Frontier,
) -> Result<FrontierClassification, FrontierError> {
    for v in &frontier.vertices {
        let found = market
            .items
            .iter()
            .any(|it| it.id == v.id && it.ln_p == v.ln_p && it.ln_r == v.ln_r);
        if !found {
            return Err(FrontierError::MismatchedMarket);
        }
    }
    let surviving: std::collections::HashSet<usize> =
        representatives(market).into_iter().collect();
    let vertex_pos: HashMap<&str, usize> = frontier
        .vertices
        .iter()
        .enumerate()
        .map(|(pos, v)| (v.id.as_str(), pos))
        .collect();

    let roles = market
        .items
        .iter()
        .enumerate()
        .map(|(i, it)| {
            let role = if let Some(&pos) = vertex_pos.get(it.id.as_str()) {
                Role::Vertex(pos)
            } else if surviving.contains(&i) {
                Role::Interior
            } else {
                Role::DominatedDuplicate
            };
            (it.id.clone(), role)
        })
        .collect();
    Ok(FrontierClassification { roles })
}
