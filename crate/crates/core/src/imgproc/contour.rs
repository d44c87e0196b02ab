//! Outer-border following on 8-connected components and polygon filling.

use std::collections::VecDeque;

use super::{BinaryMask, ImgError, Result};

/// Closed outer boundary, 8-connected, in tracing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contour {
    points: Vec<(i32, i32)>,
}

// Clockwise on screen (y grows downwards), starting east.
const DIRS: [(i32, i32); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

fn dir_index(dx: i32, dy: i32) -> usize {
    DIRS.iter()
        .position(|&d| d == (dx, dy))
        .expect("offset is an 8-neighbour")
}

impl Contour {
    /// Panics on an empty point list.
    pub fn new(points: Vec<(i32, i32)>) -> Self {
        assert!(!points.is_empty(), "a contour needs at least one point");
        Self { points }
    }

    pub fn points(&self) -> &[(i32, i32)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Bounding box `(x1, y1, x2, y2)` with exclusive far edges.
    pub fn bounding_box(&self) -> (i32, i32, i32, i32) {
        let mut b = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
        for &(x, y) in &self.points {
            b = (b.0.min(x), b.1.min(y), b.2.max(x + 1), b.3.max(y + 1));
        }
        b
    }

    /// Shoelace area of the polygon through the boundary pixel centers.
    pub fn area(&self) -> f64 {
        let n = self.points.len();
        let mut acc = 0i64;
        for i in 0..n {
            let (x0, y0) = self.points[i];
            let (x1, y1) = self.points[(i + 1) % n];
            acc += x0 as i64 * y1 as i64 - x1 as i64 * y0 as i64;
        }
        (acc as f64 / 2.0).abs()
    }
}

/// One outer contour per 8-connected foreground component, largest
/// enclosed area first. Holes are not reported.
pub fn find_contours(mask: &BinaryMask) -> Vec<Contour> {
    let (w, h) = mask.dims();
    let mut label = vec![0u32; w * h];
    let mut next = 0u32;
    let mut contours = Vec::new();
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !mask.bits()[i] || label[i] != 0 {
                continue;
            }
            next += 1;
            label[i] = next;
            queue.push_back((x, y));
            while let Some((cx, cy)) = queue.pop_front() {
                for &(dx, dy) in &DIRS {
                    let nx = cx as i64 + dx as i64;
                    let ny = cy as i64 + dy as i64;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if mask.bits()[j] && label[j] == 0 {
                        label[j] = next;
                        queue.push_back((nx as usize, ny as usize));
                    }
                }
            }
            contours.push(trace(mask, x as i32, y as i32));
        }
    }
    // Stable: equal areas keep raster order of their start pixel.
    contours.sort_by(|a, b| b.area().total_cmp(&a.area()));
    contours
}

/// Moore-neighbour tracing from the first (raster-order) pixel of a
/// component, with Jacob's stopping criterion.
fn trace(mask: &BinaryMask, sx: i32, sy: i32) -> Contour {
    let (w, h) = (mask.width() as i32, mask.height() as i32);
    let fg = |x: i32, y: i32| x >= 0 && y >= 0 && x < w && y < h && mask.get(x as usize, y as usize);

    let start = (sx, sy);
    let mut points = vec![start];
    let mut cur = start;
    // The west neighbour of the first pixel is background.
    let mut back = 4usize;
    let mut first_move: Option<(i32, i32)> = None;
    loop {
        let mut found = None;
        for k in 1..=8 {
            let d = (back + k) % 8;
            let (nx, ny) = (cur.0 + DIRS[d].0, cur.1 + DIRS[d].1);
            if fg(nx, ny) {
                let prev = (back + k - 1) % 8;
                let bpx = (cur.0 + DIRS[prev].0, cur.1 + DIRS[prev].1);
                found = Some(((nx, ny), dir_index(bpx.0 - nx, bpx.1 - ny)));
                break;
            }
        }
        let Some((nextp, nback)) = found else {
            break; // isolated pixel
        };
        match first_move {
            None => first_move = Some(nextp),
            Some(fm) => {
                if cur == start && nextp == fm {
                    points.pop();
                    break;
                }
            }
        }
        points.push(nextp);
        cur = nextp;
        back = nback;
    }
    Contour { points }
}

/// Fill each contour's interior (boundary included) into a fresh mask.
pub fn fill_contours(contours: &[Contour], width: usize, height: usize) -> Result<BinaryMask> {
    let mut out = BinaryMask::new(width, height);
    for c in contours {
        for &(x, y) in c.points() {
            if x < 0 || y < 0 || x as usize >= width || y as usize >= height {
                return Err(ImgError::OutOfBounds(x as i64, y as i64, width, height));
            }
        }
        fill_one(c, &mut out);
    }
    Ok(out)
}

fn fill_one(c: &Contour, out: &mut BinaryMask) {
    let (x1, y1, x2, y2) = c.bounding_box();
    // Local canvas padded by one pixel so the exterior is connected.
    let lw = (x2 - x1 + 2) as usize;
    let lh = (y2 - y1 + 2) as usize;
    let ox = x1 - 1;
    let oy = y1 - 1;
    let mut boundary = vec![false; lw * lh];
    let pts = c.points();
    let n = pts.len();
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        for (x, y) in line_pixels(a, b) {
            boundary[(y - oy) as usize * lw + (x - ox) as usize] = true;
        }
    }
    // 4-connected flood of the exterior cannot cross an 8-connected curve.
    let mut outside = vec![false; lw * lh];
    let mut stack = vec![0usize];
    outside[0] = true;
    while let Some(i) = stack.pop() {
        let (x, y) = (i % lw, i / lw);
        let mut visit = |j: usize| {
            if !outside[j] && !boundary[j] {
                outside[j] = true;
                stack.push(j);
            }
        };
        if x > 0 {
            visit(i - 1);
        }
        if x + 1 < lw {
            visit(i + 1);
        }
        if y > 0 {
            visit(i - lw);
        }
        if y + 1 < lh {
            visit(i + lw);
        }
    }
    for ly in 1..lh - 1 {
        for lx in 1..lw - 1 {
            if !outside[ly * lw + lx] {
                out.set((lx as i32 + ox) as usize, (ly as i32 + oy) as usize, true);
            }
        }
    }
}

/// Bresenham segment, endpoints included.
fn line_pixels(a: (i32, i32), b: (i32, i32)) -> Vec<(i32, i32)> {
    let (mut x0, mut y0) = a;
    let (x1, y1) = b;
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut out = Vec::new();
    loop {
        out.push((x0, y0));
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rect_mask(w: usize, h: usize, rects: &[(usize, usize, usize, usize)]) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            rects.iter().any(|&(x1, y1, x2, y2)| x >= x1 && x < x2 && y >= y1 && y < y2)
        })
    }

    #[test]
    fn empty_mask_has_no_contours() {
        assert!(find_contours(&BinaryMask::new(10, 10)).is_empty());
        assert_eq!(fill_contours(&[], 4, 3).unwrap(), BinaryMask::new(4, 3));
    }

    #[test]
    fn two_squares_two_contours_largest_first() {
        let m = rect_mask(30, 20, &[(1, 1, 5, 5), (10, 2, 20, 12)]);
        let cs = find_contours(&m);
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].bounding_box(), (10, 2, 20, 12));
        assert_eq!(cs[1].bounding_box(), (1, 1, 5, 5));
    }

    #[test]
    fn square_contour_bounds_and_boundary() {
        let m = rect_mask(10, 10, &[(2, 2, 7, 7)]);
        let cs = find_contours(&m);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].bounding_box(), (2, 2, 7, 7));
        // Boundary pixels of a 5x5 square: 16, each visited once.
        let mut pts = cs[0].points().to_vec();
        assert_eq!(pts.len(), 16);
        pts.sort();
        pts.dedup();
        assert_eq!(pts.len(), 16);
        for &(x, y) in &pts {
            assert!(x == 2 || x == 6 || y == 2 || y == 6);
        }
    }

    #[test]
    fn single_pixel_and_thin_line() {
        let mut m = BinaryMask::new(6, 6);
        m.set(3, 3, true);
        let cs = find_contours(&m);
        assert_eq!(cs[0].points(), &[(3, 3)]);
        let line = rect_mask(10, 3, &[(1, 1, 8, 2)]);
        let cs = find_contours(&line);
        assert_eq!(cs.len(), 1);
        assert_eq!(fill_contours(&cs, 10, 3).unwrap(), line);
    }

    #[test]
    fn fill_rejects_out_of_bounds() {
        let c = Contour::new(vec![(0, 0), (5, 0)]);
        assert!(matches!(fill_contours(&[c], 4, 4), Err(ImgError::OutOfBounds(..))));
    }

    fn point_in_polygon_or_on_edge(px: f64, py: f64, poly: &[(i32, i32)]) -> bool {
        let n = poly.len();
        let mut inside = false;
        for i in 0..n {
            let (x0, y0) = (poly[i].0 as f64, poly[i].1 as f64);
            let (x1, y1) = (poly[(i + 1) % n].0 as f64, poly[(i + 1) % n].1 as f64);
            let cross = (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0);
            let within = px >= x0.min(x1) && px <= x0.max(x1) && py >= y0.min(y1) && py <= y0.max(y1);
            if cross.abs() < 1e-12 && within {
                return true;
            }
            if (y0 > py) != (y1 > py) && px < (x1 - x0) * (py - y0) / (y1 - y0) + x0 {
                inside = !inside;
            }
        }
        inside
    }

    #[test]
    fn l_shape_fill_matches_point_in_polygon() {
        let m = rect_mask(20, 20, &[(3, 3, 8, 16), (3, 11, 15, 16)]);
        let cs = find_contours(&m);
        assert_eq!(cs.len(), 1);
        let filled = fill_contours(&cs, 20, 20).unwrap();
        let mut oracle = 0;
        for y in 0..20 {
            for x in 0..20 {
                if point_in_polygon_or_on_edge(x as f64, y as f64, cs[0].points()) {
                    oracle += 1;
                }
            }
        }
        assert_eq!(filled.count(), oracle);
        assert_eq!(filled, m);
    }

    #[test]
    fn holes_are_filled() {
        let ring = BinaryMask::from_fn(12, 12, |x, y| {
            (2..10).contains(&x) && (2..10).contains(&y) && !((4..8).contains(&x) && (4..8).contains(&y))
        });
        let cs = find_contours(&ring);
        assert_eq!(cs.len(), 1);
        let filled = fill_contours(&cs, 12, 12).unwrap();
        assert_eq!(filled, rect_mask(12, 12, &[(2, 2, 10, 10)]));
    }

    proptest! {
        #[test]
        fn trace_fill_reproduces_convex_blobs(
            rects in proptest::collection::vec((0usize..6, 0usize..6, 1usize..6, 1usize..6), 1..4)
        ) {
            // Separate cells of a 3x3 layout keep the blobs disjoint.
            let mut m = BinaryMask::new(40, 40);
            for (k, &(x, y, w, h)) in rects.iter().enumerate() {
                let (ox, oy) = ((k % 3) * 13, (k / 3) * 13);
                for yy in 0..h { for xx in 0..w { m.set(ox + x + xx, oy + y + yy, true); } }
            }
            let cs = find_contours(&m);
            prop_assert_eq!(cs.len(), rects.len());
            prop_assert_eq!(fill_contours(&cs, 40, 40).unwrap(), m);
        }

        #[test]
        fn contour_points_are_8_connected(bits in proptest::collection::vec(any::<bool>(), 144)) {
            let m = BinaryMask::from_vec(12, 12, bits).unwrap();
            for c in find_contours(&m) {
                let p = c.points();
                for i in 0..p.len() {
                    let a = p[i];
                    let b = p[(i + 1) % p.len()];
                    prop_assert!((a.0 - b.0).abs() <= 1 && (a.1 - b.1).abs() <= 1);
                    prop_assert!(m.get(a.0 as usize, a.1 as usize));
                }
            }
        }
    }
}
