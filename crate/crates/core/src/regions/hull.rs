//! Convex hulls of rate points.

use std::cmp::Ordering;

use robust::{orient2d, Coord};
use serde::{Deserialize, Serialize};

/// Cross-product tolerance for dropping nearly collinear hull vertices.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// A rate pair in bits per channel use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        RatePoint { r1, r2 }
    }

    /// `λ·r1 + (1−λ)·r2`
    pub fn weighted(&self, lambda: f64) -> f64 {
        lambda * self.r1 + (1.0 - lambda) * self.r2
    }
}

/// Identifies where a point came from; smaller keys win ties so the hull
/// does not depend on the order points were produced in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Origin {
    Seed(usize),
    Grid(u128),
    Refined(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Tagged {
    pub p: RatePoint,
    pub origin: Origin,
}

fn coord(p: &RatePoint) -> Coord<f64> {
    Coord { x: p.r1, y: p.r2 }
}

fn cmp_tagged(a: &Tagged, b: &Tagged) -> Ordering {
    a.p.r1
        .total_cmp(&b.p.r1)
        .then(a.p.r2.total_cmp(&b.p.r2))
        .then(a.origin.cmp(&b.origin))
}

/// Counterclockwise hull starting from the lowest-leftmost point, with
/// exact orientation tests and a final collinear prune.
pub(crate) fn convex_hull(mut pts: Vec<Tagged>) -> Vec<Tagged> {
    pts.sort_by(cmp_tagged);
    pts.dedup_by(|b, a| a.p == b.p);
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Tagged> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && orient2d(
                coord(&lower[lower.len() - 2].p),
                coord(&lower[lower.len() - 1].p),
                coord(&p.p),
            ) <= 0.0
        {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<Tagged> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && orient2d(
                coord(&upper[upper.len() - 2].p),
                coord(&upper[upper.len() - 1].p),
                coord(&p.p),
            ) <= 0.0
        {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    prune_collinear(lower)
}

fn cross(a: &RatePoint, b: &RatePoint, c: &RatePoint) -> f64 {
    (b.r1 - a.r1) * (c.r2 - a.r2) - (b.r2 - a.r2) * (c.r1 - a.r1)
}

/// Whether `b` lies within the bounding box of `a`–`c`; a projection test
/// misbehaves when `a` and `c` nearly coincide.
fn between(a: &RatePoint, b: &RatePoint, c: &RatePoint) -> bool {
    const SLACK: f64 = 1e-12;
    let within = |x: f64, lo: f64, hi: f64| x >= lo.min(hi) - SLACK && x <= lo.max(hi) + SLACK;
    within(b.r1, a.r1, c.r1) && within(b.r2, a.r2, c.r2)
}

fn prune_collinear(mut v: Vec<Tagged>) -> Vec<Tagged> {
    loop {
        if v.len() <= 2 {
            return v;
        }
        let k = v.len();
        // never drop the starting vertex so the output stays anchored; only
        // drop vertices lying between their neighbours, so the far corner of
        // a sliver-thin hull survives
        let drop = (1..k).find(|&i| {
            let a = &v[i - 1].p;
            let b = &v[i].p;
            let c = &v[(i + 1) % k].p;
            cross(a, b, c).abs() <= COLLINEAR_TOL && between(a, b, c)
        });
        match drop {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

/// Maximum of `λ·r1 + (1−λ)·r2` over a vertex list.
pub(crate) fn support(vertices: &[RatePoint], lambda: f64) -> f64 {
    vertices
        .iter()
        .map(|p| p.weighted(lambda))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn segment_distance(a: &RatePoint, b: &RatePoint, p: &RatePoint) -> f64 {
    let (dx, dy) = (b.r1 - a.r1, b.r2 - a.r2);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.r1 - a.r1) * dx + (p.r2 - a.r2) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a.r1 + t * dx, a.r2 + t * dy);
    ((p.r1 - qx).powi(2) + (p.r2 - qy).powi(2)).sqrt()
}

/// How far `p` lies outside the polygon (0 when inside or on it).
pub(crate) fn outside_distance(vertices: &[RatePoint], p: &RatePoint) -> f64 {
    match vertices.len() {
        0 => f64::INFINITY,
        1 => segment_distance(&vertices[0], &vertices[0], p),
        2 => segment_distance(&vertices[0], &vertices[1], p),
        k => {
            let mut worst: f64 = 0.0;
            let mut outside = false;
            for i in 0..k {
                let a = &vertices[i];
                let b = &vertices[(i + 1) % k];
                let len = ((b.r1 - a.r1).powi(2) + (b.r2 - a.r2).powi(2)).sqrt();
                let signed = cross(a, b, p) / len;
                if signed < 0.0 {
                    outside = true;
                    worst = worst.max(-signed);
                }
            }
            if !outside {
                return 0.0;
            }
            // for points beyond a corner the half-plane depth underestimates
            let edge_min = (0..k)
                .map(|i| segment_distance(&vertices[i], &vertices[(i + 1) % k], p))
                .fold(f64::INFINITY, f64::min);
            edge_min.max(worst)
        }
    }
}
