//! Boustrophedon (lawnmower) coverage patterns over a rectangle.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle in the navigation frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Vector2<f64>,
    pub max: Vector2<f64>,
}

impl Rect {
    pub fn new(min: Vector2<f64>, max: Vector2<f64>) -> Result<Self> {
        if !(min.iter().chain(max.iter()).all(|v| v.is_finite()) && max.x > min.x && max.y > min.y) {
            return Err(Error::DegenerateGeometry(format!(
                "search area needs max > min on both axes, got min ({}, {}) max ({}, {})",
                min.x, min.y, max.x, max.y
            )));
        }
        Ok(Self { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: Vector2<f64>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corner {
    #[default]
    SouthWest,
    SouthEast,
    NorthWest,
    NorthEast,
}

impl Corner {
    fn starts_east(self) -> bool {
        matches!(self, Corner::SouthEast | Corner::NorthEast)
    }

    fn starts_north(self) -> bool {
        matches!(self, Corner::NorthWest | Corner::NorthEast)
    }
}

/// A straight pass from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub start: Vector2<f64>,
    pub end: Vector2<f64>,
}

impl Leg {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    pub fn direction(&self) -> Vector2<f64> {
        (self.end - self.start).normalize()
    }

    /// Same line, lengthened by `by` metres at both ends.
    pub fn extended(&self, by: f64) -> Leg {
        let d = self.direction() * by;
        Leg {
            start: self.start - d,
            end: self.end + d,
        }
    }
}

/// Distance from `p` to the segment `a`-`b`.
pub fn point_segment_distance(p: Vector2<f64>, a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * s)).norm()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchPattern {
    pub area: Rect,
    pub swath: f64,
    pub entry: Corner,
    /// Passes in flight order; consecutive passes run in opposite directions.
    pub legs: Vec<Leg>,
}

impl SearchPattern {
    /// Vertices of the full route: every leg joined by crossovers.
    pub fn waypoints(&self) -> Vec<Vector2<f64>> {
        self.legs.iter().flat_map(|l| [l.start, l.end]).collect()
    }

    pub fn entry_point(&self) -> Vector2<f64> {
        self.legs[0].start
    }

    pub fn path_length(&self) -> f64 {
        self.waypoints().windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Distance from `p` to the nearest point on the route.
    pub fn distance_to_path(&self, p: Vector2<f64>) -> f64 {
        self.waypoints()
            .windows(2)
            .map(|w| point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// North-south passes spaced evenly across the area, starting from `entry`.
///
/// `ceil(width / swath)` passes are laid at the centres of equal strips, so
/// every point of the area is within `width / (2 n) <= swath / 2` of a pass.
pub fn generate_lawnmower(area: Rect, swath: f64, entry: Corner) -> Result<SearchPattern> {
    let area = Rect::new(area.min, area.max)?;
    if !(swath.is_finite() && swath > 0.0) {
        return Err(Error::InvalidArgument(format!("swath must be > 0, got {swath}")));
    }
    let n = (area.width() / swath).ceil().max(1.0) as usize;
    let strip = area.width() / n as f64;
    let mut legs = Vec::with_capacity(n);
    for k in 0..n {
        let i = if entry.starts_east() { n - 1 - k } else { k };
        let x = area.min.x + (i as f64 + 0.5) * strip;
        let northbound = (k % 2 == 0) != entry.starts_north();
        let (y0, y1) = if northbound {
            (area.min.y, area.max.y)
        } else {
            (area.max.y, area.min.y)
        };
        legs.push(Leg {
            start: Vector2::new(x, y0),
            end: Vector2::new(x, y1),
        });
    }
    Ok(SearchPattern {
        area,
        swath,
        entry,
        legs,
    })
}
