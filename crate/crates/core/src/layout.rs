//! Radial placement and polar fisheye distortion of graph views.
//!
//! The focus sits at the origin. Every other node hangs off a spanning tree
//! rooted at the focus (breadth first over the view's edges, neighbors taken
//! in node id order) and sits on ring `depth / max_depth`. The focus's
//! children split the full circle evenly starting at angle 0; deeper nodes
//! share their parent's angular sector. In views with a single level-0 node
//! the ring of a node is its level.
//!
//! Other level-0 nodes (the root theme overview has several) and nodes not
//! reachable through edges are attached directly to the focus.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::navigation::GraphView;
use crate::scalar::Scalar;

pub const DEFAULT_DISTORTION: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutPoint<S> {
    pub node_id: String,
    pub x: S,
    pub y: S,
}

impl<S: Scalar> LayoutPoint<S> {
    pub fn radius(&self) -> S {
        self.x.hypot(self.y)
    }

    pub fn angle(&self) -> S {
        self.y.atan2(self.x)
    }
}

/// A view plus one point per node, in node order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaidOutView<S> {
    pub view: GraphView,
    pub points: Vec<LayoutPoint<S>>,
    pub distortion: S,
}

impl<S: Scalar> LaidOutView<S> {
    pub fn point(&self, node_id: &str) -> Option<&LayoutPoint<S>> {
        self.points.iter().find(|p| p.node_id == node_id)
    }
}

/// Polar fisheye radius map: `((d + 1) r) / (d r + 1)`.
pub fn distort_radius<S: Scalar>(r: S, d: S) -> S {
    ((d + S::one()) * r) / (d * r + S::one())
}

pub fn radial_layout<S: Scalar>(view: &GraphView) -> Result<LaidOutView<S>> {
    view.validate()?;
    let ids: BTreeSet<&str> = view.nodes.iter().map(|n| n.id.as_str()).collect();
    let mut adjacency: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for e in &view.edges {
        adjacency.entry(e.from.as_str()).or_default().insert(e.to.as_str());
        adjacency.entry(e.to.as_str()).or_default().insert(e.from.as_str());
    }
    let focus = view.focus.as_str();

    let mut depth: BTreeMap<&str, usize> = BTreeMap::from([(focus, 0)]);
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut queue = VecDeque::from([focus]);
    let mut detached: Vec<&str> = view
        .nodes
        .iter()
        .filter(|n| n.level == 0 && n.id != focus)
        .map(|n| n.id.as_str())
        .collect();
    detached.sort_unstable();
    let mut detached = detached.into_iter();

    loop {
        while let Some(cur) = queue.pop_front() {
            let mut next: Vec<&str> = adjacency
                .get(cur)
                .into_iter()
                .flatten()
                .copied()
                .filter(|n| !depth.contains_key(n))
                .collect();
            if cur == focus {
                next.extend(detached.by_ref().filter(|n| !depth.contains_key(n)));
                next.sort_unstable();
                next.dedup();
            }
            for n in next {
                depth.insert(n, depth[cur] + 1);
                children.entry(cur).or_default().push(n);
                queue.push_back(n);
            }
        }
        // Anything still unplaced hangs off the focus.
        let Some(orphan) = ids.iter().copied().find(|n| !depth.contains_key(n)) else {
            break;
        };
        depth.insert(orphan, 1);
        let list = children.entry(focus).or_default();
        list.push(orphan);
        list.sort_unstable();
        queue.push_back(orphan);
    }

    let max_depth = depth.values().copied().max().unwrap_or(0);
    let two_pi = S::PI() + S::PI();
    let mut polar: BTreeMap<&str, (S, S)> = BTreeMap::from([(focus, (S::zero(), S::zero()))]);
    // node -> (sector start, sector width)
    let mut stack: Vec<(&str, S, S)> = Vec::new();
    if let Some(kids) = children.get(focus) {
        let w = two_pi / S::from_count(kids.len());
        for (i, &k) in kids.iter().enumerate() {
            let angle = w * S::from_count(i);
            polar.insert(k, (ring(depth[k], max_depth), angle));
            stack.push((k, angle - w / (S::one() + S::one()), w));
        }
    }
    while let Some((node, start, width)) = stack.pop() {
        let Some(kids) = children.get(node) else {
            continue;
        };
        let w = width / S::from_count(kids.len());
        let half = S::from_f64_lossy(0.5);
        for (j, &k) in kids.iter().enumerate() {
            let sub_start = start + w * S::from_count(j);
            polar.insert(k, (ring(depth[k], max_depth), sub_start + w * half));
            stack.push((k, sub_start, w));
        }
    }

    let points = view
        .nodes
        .iter()
        .map(|n| {
            let (r, theta) = polar[n.id.as_str()];
            LayoutPoint {
                node_id: n.id.clone(),
                x: r * theta.cos(),
                y: r * theta.sin(),
            }
        })
        .collect();
    Ok(LaidOutView {
        view: view.clone(),
        points,
        distortion: S::zero(),
    })
}

fn ring<S: Scalar>(depth: usize, max_depth: usize) -> S {
    if max_depth == 0 {
        S::zero()
    } else {
        S::from_count(depth) / S::from_count(max_depth)
    }
}

/// Pushes every point outward along its ray with [`distort_radius`].
/// Applying `d1` then `d2` equals a single pass with `(d1 + 1)(d2 + 1) - 1`,
/// which is what `distortion` records.
pub fn fisheye_distort<S: Scalar>(lay: &LaidOutView<S>, d: S) -> Result<LaidOutView<S>> {
    if d.is_nan() || d < S::zero() || d.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "distortion must be a finite value >= 0, got {d}"
        )));
    }
    let points = lay
        .points
        .iter()
        .map(|p| {
            let r = p.radius();
            if r <= S::zero() {
                return p.clone();
            }
            let scale = distort_radius(r.min(S::one()), d) / r;
            LayoutPoint {
                node_id: p.node_id.clone(),
                x: p.x * scale,
                y: p.y * scale,
            }
        })
        .collect();
    Ok(LaidOutView {
        view: lay.view.clone(),
        points,
        distortion: (lay.distortion + S::one()) * (d + S::one()) - S::one(),
    })
}
