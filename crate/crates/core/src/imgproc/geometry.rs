//! Convex hull and minimum-area enclosing rectangles.
//!
//! Angles are in degrees, counter-clockwise as seen on screen (image y axis
//! points down), normalized so the reported edge direction lies in (-45, 45].

/// Rotated rectangle; `size.0` runs along `angle`, `size.1` across it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedRect {
    pub center: (f64, f64),
    pub size: (f64, f64),
    pub angle: f64,
}

impl OrientedRect {
    pub fn area(&self) -> f64 {
        self.size.0 * self.size.1
    }

    /// Corners in image coordinates.
    pub fn corners(&self) -> [(f64, f64); 4] {
        let a = self.angle.to_radians();
        // Screen-CCW direction expressed in y-down coordinates.
        let u = (a.cos(), -a.sin());
        let v = (a.sin(), a.cos());
        let (hw, hh) = (self.size.0 / 2.0, self.size.1 / 2.0);
        let (cx, cy) = self.center;
        let p = |su: f64, sv: f64| (cx + su * hw * u.0 + sv * hh * v.0, cy + su * hw * u.1 + sv * hh * v.1);
        [p(-1.0, -1.0), p(1.0, -1.0), p(1.0, 1.0), p(-1.0, 1.0)]
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain; collinear points dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Minimum-area enclosing rectangle by rotating calipers over hull edges.
///
/// Panics on an empty point set.
pub fn min_area_rect(points: &[(f64, f64)]) -> OrientedRect {
    assert!(!points.is_empty(), "min_area_rect needs at least one point");
    let hull = convex_hull(points);
    if hull.len() == 1 {
        return OrientedRect {
            center: hull[0],
            size: (0.0, 0.0),
            angle: 0.0,
        };
    }
    let n = hull.len();
    let mut best: Option<(f64, (f64, f64), (f64, f64, f64, f64))> = None;
    let edges = if n == 2 { 1 } else { n };
    for i in 0..edges {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        if len == 0.0 {
            continue;
        }
        let u = ((b.0 - a.0) / len, (b.1 - a.1) / len);
        let v = (-u.1, u.0);
        let (mut umin, mut umax, mut vmin, mut vmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in &hull {
            let pu = p.0 * u.0 + p.1 * u.1;
            let pv = p.0 * v.0 + p.1 * v.1;
            umin = umin.min(pu);
            umax = umax.max(pu);
            vmin = vmin.min(pv);
            vmax = vmax.max(pv);
        }
        let area = (umax - umin) * (vmax - vmin);
        if best.as_ref().is_none_or(|b| area < b.0) {
            best = Some((area, u, (umin, umax, vmin, vmax)));
        }
    }
    let (_, u, (umin, umax, vmin, vmax)) = best.expect("hull has a non-degenerate edge");
    let v = (-u.1, u.0);
    let cu = (umin + umax) / 2.0;
    let cv = (vmin + vmax) / 2.0;
    let center = (cu * u.0 + cv * v.0, cu * u.1 + cv * v.1);
    let mut w = umax - umin;
    let mut h = vmax - vmin;
    let mut angle = (-u.1).atan2(u.0).to_degrees();
    // Edge directions are undirected: fold into (-90, 90] first.
    if angle > 90.0 {
        angle -= 180.0;
    } else if angle <= -90.0 {
        angle += 180.0;
    }
    if angle > 45.0 {
        angle -= 90.0;
        std::mem::swap(&mut w, &mut h);
    } else if angle <= -45.0 {
        angle += 90.0;
        std::mem::swap(&mut w, &mut h);
    }
    OrientedRect {
        center,
        size: (w, h),
        angle,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rotate_about(p: (f64, f64), c: (f64, f64), deg: f64) -> (f64, f64) {
        // Screen-CCW rotation in y-down coordinates.
        let a = deg.to_radians();
        let (dx, dy) = (p.0 - c.0, p.1 - c.1);
        (c.0 + dx * a.cos() + dy * a.sin(), c.1 - dx * a.sin() + dy * a.cos())
    }

    #[test]
    fn axis_aligned_rectangle() {
        let pts = [(0.0, 0.0), (10.0, 0.0), (10.0, 4.0), (0.0, 4.0)];
        let r = min_area_rect(&pts);
        assert!(r.angle.abs() < 1e-9);
        assert!((r.size.0 - 10.0).abs() < 1e-9 && (r.size.1 - 4.0).abs() < 1e-9);
        assert!((r.center.0 - 5.0).abs() < 1e-9 && (r.center.1 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rotated_rectangle_recovers_angle() {
        let c = (5.0, 2.0);
        let pts: Vec<_> = [(0.0, 0.0), (10.0, 0.0), (10.0, 4.0), (0.0, 4.0)]
            .iter()
            .map(|&p| rotate_about(p, c, 30.0))
            .collect();
        let r = min_area_rect(&pts);
        assert!((r.angle - 30.0).abs() < 0.5, "angle {}", r.angle);
        assert!((r.size.0 - 10.0).abs() < 0.5 && (r.size.1 - 4.0).abs() < 0.5);
        for deg in [-30.0, -10.0, 5.0, 44.0] {
            let pts: Vec<_> = [(0.0, 0.0), (10.0, 0.0), (10.0, 4.0), (0.0, 4.0)]
                .iter()
                .map(|&p| rotate_about(p, c, deg))
                .collect();
            assert!((min_area_rect(&pts).angle - deg).abs() < 1e-6);
        }
    }

    #[test]
    fn corners_round_trip() {
        let r = OrientedRect { center: (3.0, 4.0), size: (6.0, 2.0), angle: 20.0 };
        let back = min_area_rect(&r.corners());
        assert!((back.angle - 20.0).abs() < 1e-9);
        assert!((back.area() - 12.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        let r = min_area_rect(&[(2.0, 3.0)]);
        assert_eq!(r.size, (0.0, 0.0));
        assert_eq!(r.center, (2.0, 3.0));
        let r = min_area_rect(&[(0.0, 0.0), (3.0, 4.0), (6.0, 8.0)]);
        assert!((r.size.0.max(r.size.1) - 10.0).abs() < 1e-9);
        assert!(r.area().abs() < 1e-9);
    }

    // Brute-force hull: an ordered pair is a hull edge when every other
    // point lies on its left (or on the segment).
    fn brute_hull_edges(pts: &[(f64, f64)]) -> Vec<((f64, f64), (f64, f64))> {
        let mut edges = Vec::new();
        for (i, &a) in pts.iter().enumerate() {
            for (j, &b) in pts.iter().enumerate() {
                if i == j {
                    continue;
                }
                if pts.iter().all(|&p| cross(a, b, p) >= 0.0) {
                    edges.push((a, b));
                }
            }
        }
        edges
    }

    #[test]
    fn matches_exhaustive_edge_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let pts: Vec<(f64, f64)> = (0..200)
                .map(|_| (rng.random_range(-50.0..50.0), rng.random_range(-20.0..30.0)))
                .collect();
            let mut best = f64::MAX;
            for (a, b) in brute_hull_edges(&pts) {
                let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
                let u = ((b.0 - a.0) / len, (b.1 - a.1) / len);
                let v = (-u.1, u.0);
                let pu: Vec<f64> = pts.iter().map(|p| p.0 * u.0 + p.1 * u.1).collect();
                let pv: Vec<f64> = pts.iter().map(|p| p.0 * v.0 + p.1 * v.1).collect();
                let span = |xs: &[f64]| xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
                best = best.min(span(&pu) * span(&pv));
            }
            let r = min_area_rect(&pts);
            assert!((r.area() - best).abs() < 1e-6, "{} vs {}", r.area(), best);
            // Never worse than the axis-aligned box.
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let span = |xs: &[f64]| xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
            assert!(r.area() <= span(&xs) * span(&ys) + 1e-9);
            assert!(r.angle > -90.0 && r.angle <= 90.0);
        }
    }
}
