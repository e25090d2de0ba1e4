//! Interfering interval extraction for disk robots moving along 2-D
//! polylines at constant speed.
//!
//! Both paths are sampled at `resolution` evenly spaced arclength
//! parameters. A grid cell `(s, t)` interferes when the two disks overlap.
//! Every 8-connected component of interfering cells is reported as the pair
//! of its projections on the two parameter axes, after merging components
//! whose projections overlap on either axis.

use std::collections::VecDeque;
use std::fs;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{IntervalPair, RobotId};

pub const DEFAULT_RESOLUTION: usize = 512;

/// A polyline path followed at constant `speed` by a disk of `radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub id: u64,
    pub radius: f64,
    pub speed: f64,
    pub waypoints: Vec<[f64; 2]>,
}

impl Path {
    pub fn new(id: u64, radius: f64, speed: f64, waypoints: Vec<[f64; 2]>) -> Self {
        Self {
            id,
            radius,
            speed,
            waypoints,
        }
    }

    pub fn check(&self) -> Result<()> {
        let fail = |reason: &str| Error::InvalidPath {
            id: self.id,
            reason: reason.into(),
        };
        if self.waypoints.len() < 2 {
            return Err(fail("needs at least two waypoints"));
        }
        if !(self.radius > 0.0) || !(self.speed > 0.0) {
            return Err(fail("radius and speed must be positive"));
        }
        if self.waypoints.iter().flatten().any(|c| !c.is_finite()) {
            return Err(fail("waypoints must be finite"));
        }
        Ok(())
    }

    fn cumulative(&self) -> Vec<f64> {
        let mut acc = vec![0.0];
        for w in self.waypoints.windows(2) {
            let d = dist(w[0], w[1]);
            acc.push(acc.last().unwrap() + d);
        }
        acc
    }

    pub fn arclength(&self) -> f64 {
        *self.cumulative().last().unwrap_or(&0.0)
    }

    /// Position at arclength fraction `sigma` in `[0, 1]`.
    pub fn point_at(&self, sigma: f64) -> [f64; 2] {
        sample_points(self, &[sigma])[0]
    }
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn sample_points(path: &Path, sigmas: &[f64]) -> Vec<[f64; 2]> {
    let cum = path.cumulative();
    let total = *cum.last().unwrap();
    let mut seg = 0;
    sigmas
        .iter()
        .map(|&sigma| {
            let s = sigma.clamp(0.0, 1.0) * total;
            // sigmas are usually ascending; restart the scan otherwise
            if seg > 0 && cum[seg] > s {
                seg = 0;
            }
            while seg + 2 < cum.len() && cum[seg + 1] < s {
                seg += 1;
            }
            let (p, q) = (path.waypoints[seg], path.waypoints[seg + 1]);
            let len = cum[seg + 1] - cum[seg];
            let f = if len > 0.0 { ((s - cum[seg]) / len).clamp(0.0, 1.0) } else { 0.0 };
            [p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])]
        })
        .collect()
}

/// Binary disk-overlap relation between two sampled paths.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceGrid {
    resolution: usize,
    mask: Vec<bool>,
}

impl InterferenceGrid {
    pub fn new(pi: &Path, pj: &Path, resolution: usize) -> Self {
        let sigmas: Vec<f64> = (0..resolution).map(|s| param(s, resolution)).collect();
        let xi = sample_points(pi, &sigmas);
        let xj = sample_points(pj, &sigmas);
        let reach = pi.radius + pj.radius;
        let mut mask = vec![false; resolution * resolution];
        for (s, p) in xi.iter().enumerate() {
            for (t, q) in xj.iter().enumerate() {
                mask[s * resolution + t] = dist(*p, *q) < reach;
            }
        }
        Self { resolution, mask }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn get(&self, s: usize, t: usize) -> bool {
        self.mask[s * self.resolution + t]
    }

    pub fn transpose(&self) -> Self {
        let m = self.resolution;
        let mut mask = vec![false; m * m];
        for s in 0..m {
            for t in 0..m {
                mask[t * m + s] = self.mask[s * m + t];
            }
        }
        Self {
            resolution: m,
            mask,
        }
    }

    /// Bounding boxes `(s_lo, s_hi, t_lo, t_hi)` of the 8-connected
    /// components, merged until no two boxes overlap on either axis.
    pub fn component_boxes(&self) -> Vec<(usize, usize, usize, usize)> {
        let m = self.resolution;
        let mut seen = vec![false; m * m];
        let mut boxes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..m * m {
            if !self.mask[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut bx = (usize::MAX, 0, usize::MAX, 0);
            while let Some(c) = queue.pop_front() {
                let (s, t) = (c / m, c % m);
                bx = (bx.0.min(s), bx.1.max(s), bx.2.min(t), bx.3.max(t));
                for ds in -1i64..=1 {
                    for dt in -1i64..=1 {
                        let (ns, nt) = (s as i64 + ds, t as i64 + dt);
                        if ns < 0 || nt < 0 || ns >= m as i64 || nt >= m as i64 {
                            continue;
                        }
                        let n = ns as usize * m + nt as usize;
                        if self.mask[n] && !seen[n] {
                            seen[n] = true;
                            queue.push_back(n);
                        }
                    }
                }
            }
            boxes.push(bx);
        }

        let overlaps = |a: (usize, usize), b: (usize, usize)| a.0 <= b.1 && b.0 <= a.1;
        loop {
            let mut merged = false;
            'outer: for i in 0..boxes.len() {
                for j in i + 1..boxes.len() {
                    let (x, y) = (boxes[i], boxes[j]);
                    if overlaps((x.0, x.1), (y.0, y.1)) || overlaps((x.2, x.3), (y.2, y.3)) {
                        boxes[i] = (x.0.min(y.0), x.1.max(y.1), x.2.min(y.2), x.3.max(y.3));
                        boxes.swap_remove(j);
                        merged = true;
                        break 'outer;
                    }
                }
            }
            if !merged {
                break;
            }
        }
        boxes.sort();
        boxes
    }
}

fn param(s: usize, resolution: usize) -> f64 {
    s as f64 / (resolution - 1) as f64
}

/// Parameter interval covered by grid samples `lo..=hi`, widened by half a
/// grid step on each side so single-sample contacts stay non-degenerate.
fn cell_span(lo: usize, hi: usize, resolution: usize) -> (f64, f64) {
    let step = (resolution - 1) as f64;
    (
        ((lo as f64 - 0.5) / step).max(0.0),
        ((hi as f64 + 0.5) / step).min(1.0),
    )
}

/// Maximal interfering interval pairs of two paths in arclength-parameter
/// units (`robot_a` is `pi`).
pub fn interfering_intervals(pi: &Path, pj: &Path, resolution: usize) -> Result<Vec<IntervalPair>> {
    if resolution < 2 {
        return Err(Error::InvalidParams(format!("resolution must be at least 2, got {resolution}")));
    }
    pi.check()?;
    pj.check()?;
    let grid = InterferenceGrid::new(pi, pj, resolution);
    Ok(grid
        .component_boxes()
        .into_iter()
        .map(|(s0, s1, t0, t1)| {
            IntervalPair::new(
                RobotId(pi.id),
                cell_span(s0, s1, resolution),
                RobotId(pj.id),
                cell_span(t0, t1, resolution),
            )
        })
        .collect())
}

/// Expected enter/exit times for a parameter interval at constant speed.
pub fn to_expected_times(path: &Path, interval: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = interval;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidParams(format!("parameter interval [{lo}, {hi}] not within [0, 1]")));
    }
    let length = path.arclength();
    if !(length > 0.0) {
        return Err(Error::InvalidPath {
            id: path.id,
            reason: "path has zero length".into(),
        });
    }
    if !(path.speed > 0.0) {
        return Err(Error::InvalidPath {
            id: path.id,
            reason: "speed must be positive".into(),
        });
    }
    let scale = length / path.speed;
    Ok((lo * scale, hi * scale))
}

/// All interfering pairs among `paths`, in expected-time units.
pub fn extract_pairs(paths: &[Path], resolution: usize) -> Result<Vec<IntervalPair>> {
    let mut out = Vec::new();
    for (i, pi) in paths.iter().enumerate() {
        for pj in &paths[i + 1..] {
            for pair in interfering_intervals(pi, pj, resolution)? {
                out.push(IntervalPair::new(
                    pair.robot_a,
                    to_expected_times(pi, (pair.enter_a, pair.exit_a))?,
                    pair.robot_b,
                    to_expected_times(pj, (pair.enter_b, pair.exit_b))?,
                ));
            }
        }
    }
    Ok(out)
}

/// Reads a JSON path file: a list of `{"id", "radius", "speed", "waypoints"}`.
pub fn read_paths(path: impl AsRef<FsPath>) -> Result<Vec<Path>> {
    let text = fs::read_to_string(path)?;
    let paths: Vec<Path> = serde_json::from_str(&text)?;
    for p in &paths {
        p.check()?;
    }
    Ok(paths)
}
