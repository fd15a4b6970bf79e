//! Closest-point projection onto an open polyline with arclength bookkeeping.

use thiserror::Error;

use crate::vector::{add_scaled, dist_sq, dot, norm_sq, sub, Point};

#[derive(Debug, Error, PartialEq)]
pub enum PolylineError {
    #[error("polyline needs at least 2 nodes, found {0}")]
    TooFewNodes(usize),
    #[error("segment {0} has zero length")]
    DegenerateSegment(usize),
}

/// Where a point lands on the polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolylineProjection {
    pub segment: usize,
    /// Fraction along the segment, in `[0, 1]`.
    pub t: f64,
    /// Distance along the polyline from its first node.
    pub arclength: f64,
    /// Euclidean distance from the point to its projection.
    pub distance: f64,
}

/// Node sequence with precomputed segment lengths.
#[derive(Debug, Clone)]
pub struct Polyline<'a> {
    nodes: &'a [Point],
    // cumulative[k] = arclength at node k
    cumulative: Vec<f64>,
}

impl<'a> Polyline<'a> {
    pub fn new(nodes: &'a [Point]) -> Result<Self, PolylineError> {
        if nodes.len() < 2 {
            return Err(PolylineError::TooFewNodes(nodes.len()));
        }
        let mut cumulative = Vec::with_capacity(nodes.len());
        cumulative.push(0.0);
        for (k, pair) in nodes.windows(2).enumerate() {
            let len = dist_sq(&pair[0], &pair[1]).sqrt();
            if len == 0.0 {
                return Err(PolylineError::DegenerateSegment(k));
            }
            cumulative.push(cumulative[k] + len);
        }
        Ok(Self { nodes, cumulative })
    }

    pub fn nodes(&self) -> &[Point] {
        self.nodes
    }

    pub fn segment_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().expect("at least two nodes")
    }

    pub fn segment_length(&self, k: usize) -> f64 {
        self.cumulative[k + 1] - self.cumulative[k]
    }

    /// Point on segment `k` at fraction `t`.
    pub fn point_at(&self, k: usize, t: f64) -> Point {
        let dir = sub(&self.nodes[k + 1], &self.nodes[k]);
        add_scaled(&self.nodes[k], &dir, t)
    }

    /// Closest point on segment `k`: clamped parameter and squared distance.
    pub fn project_on_segment(&self, point: &Point, k: usize) -> (f64, f64) {
        let start = &self.nodes[k];
        let dir = sub(&self.nodes[k + 1], start);
        let t = (dot(&sub(point, start), &dir) / norm_sq(&dir)).clamp(0.0, 1.0);
        (t, dist_sq(point, &add_scaled(start, &dir, t)))
    }

    /// Exact closest point over all segments; ties go to the lower segment.
    pub fn project(&self, point: &Point) -> PolylineProjection {
        let mut best = (0, 0.0, f64::INFINITY);
        for k in 0..self.segment_count() {
            let (t, d2) = self.project_on_segment(point, k);
            if d2 < best.2 {
                best = (k, t, d2);
            }
        }
        let (segment, t, d2) = best;
        PolylineProjection {
            segment,
            t,
            arclength: self.cumulative[segment] + t * self.segment_length(segment),
            distance: d2.sqrt(),
        }
    }
}

/// One-shot projection of `point` onto the polyline through `nodes`.
pub fn project_point(point: &Point, nodes: &[Point]) -> Result<PolylineProjection, PolylineError> {
    Ok(Polyline::new(nodes)?.project(point))
}
