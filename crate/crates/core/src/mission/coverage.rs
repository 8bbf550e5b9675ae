//! Swept-area bookkeeping and the end-of-run coverage report.

use std::collections::HashSet;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default raster resolution for swept area, m.
pub const COVERAGE_CELL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub t: f64,
    pub position: Vector2<f64>,
    /// The sensor was searching while travelling to this point.
    pub active: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoverageMetrics {
    pub area_searched: f64,
    pub area_per_hour: f64,
    pub active_time: f64,
    pub detections: usize,
    pub confirmations: usize,
    pub distance_traveled: f64,
}

/// Raster of cells whose centres fall inside the swept corridor.
///
/// Each track segment sweeps a `swath`-wide rectangle centred on it; a cell
/// counts when its centre lies in at least one rectangle.
#[derive(Debug, Clone)]
pub struct SweptArea {
    pub swath: f64,
    pub cell: f64,
    cells: HashSet<(i64, i64)>,
}

impl SweptArea {
    pub fn new(swath: f64, cell: f64) -> Result<Self> {
        if !(swath > 0.0 && cell > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "swath and cell size must be > 0, got {swath} and {cell}"
            )));
        }
        Ok(Self {
            swath,
            cell,
            cells: HashSet::new(),
        })
    }

    pub fn add_segment(&mut self, a: Vector2<f64>, b: Vector2<f64>) {
        let ab = b - a;
        let len = ab.norm();
        if len == 0.0 {
            return;
        }
        let dir = ab / len;
        let half = 0.5 * self.swath;
        let normal = Vector2::new(-dir.y, dir.x) * half;
        let corners = [a + normal, a - normal, b + normal, b - normal];
        let lo = corners.iter().fold(Vector2::repeat(f64::INFINITY), |m, c| m.inf(c));
        let hi = corners.iter().fold(Vector2::repeat(f64::NEG_INFINITY), |m, c| m.sup(c));
        let c = self.cell;
        let (i0, i1) = ((lo.x / c - 0.5).ceil() as i64, (hi.x / c - 0.5).floor() as i64);
        let (j0, j1) = ((lo.y / c - 0.5).ceil() as i64, (hi.y / c - 0.5).floor() as i64);
        for i in i0..=i1 {
            for j in j0..=j1 {
                let p = Vector2::new((i as f64 + 0.5) * c, (j as f64 + 0.5) * c) - a;
                let along = p.dot(&dir);
                let across = p.x * dir.y - p.y * dir.x;
                if along >= 0.0 && along <= len && across.abs() <= half {
                    self.cells.insert((i, j));
                }
            }
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn area(&self) -> f64 {
        self.cells.len() as f64 * self.cell * self.cell
    }
}

/// Swept area of a polyline. Vertices closer together than one cell are
/// merged, which leaves straight runs unchanged.
pub fn swept_area(track: &[Vector2<f64>], swath: f64, cell: f64) -> Result<f64> {
    let mut sweep = SweptArea::new(swath, cell)?;
    for (a, b) in decimate(track, cell) {
        sweep.add_segment(a, b);
    }
    Ok(sweep.area())
}

fn decimate(track: &[Vector2<f64>], spacing: f64) -> Vec<(Vector2<f64>, Vector2<f64>)> {
    let mut out = Vec::new();
    let Some(&first) = track.first() else {
        return out;
    };
    let mut anchor = first;
    let last = track.len() - 1;
    for (k, &p) in track.iter().enumerate().skip(1) {
        if (p - anchor).norm() >= spacing || k == last {
            out.push((anchor, p));
            anchor = p;
        }
    }
    out
}

/// Area, rate and counts for a run. Segments count toward the swept area and
/// the active time only when both ends are active.
pub fn coverage_report(
    track: &[TrackPoint],
    swath: f64,
    detections: usize,
    confirmations: usize,
) -> Result<CoverageMetrics> {
    if track.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut sweep = SweptArea::new(swath, COVERAGE_CELL)?;
    let mut active_time = 0.0;
    let mut distance = 0.0;
    let mut run: Vec<Vector2<f64>> = Vec::new();
    let flush = |run: &mut Vec<Vector2<f64>>, sweep: &mut SweptArea| {
        for (a, b) in decimate(run, COVERAGE_CELL) {
            sweep.add_segment(a, b);
        }
        run.clear();
    };
    for w in track.windows(2) {
        distance += (w[1].position - w[0].position).norm();
        if w[0].active && w[1].active {
            active_time += w[1].t - w[0].t;
            if run.is_empty() {
                run.push(w[0].position);
            }
            run.push(w[1].position);
        } else {
            flush(&mut run, &mut sweep);
        }
    }
    flush(&mut run, &mut sweep);
    let area = sweep.area();
    Ok(CoverageMetrics {
        area_searched: area,
        area_per_hour: if active_time > 0.0 { area / (active_time / 3600.0) } else { 0.0 },
        active_time,
        detections,
        confirmations,
        distance_traveled: distance,
    })
}
