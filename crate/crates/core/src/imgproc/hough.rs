//! Standard (rho, theta) Hough transform for lines.

use std::f64::consts::PI;

use super::{BinaryMask, ImgError, Result};

/// Line in normal form `x cos(theta) + y sin(theta) = rho`, theta in [0, pi).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSegment {
    pub rho: f64,
    pub theta: f64,
    pub support: u32,
}

impl LineSegment {
    /// Screen-CCW angle of the line direction in degrees, in (-90, 90].
    pub fn direction_degrees(&self) -> f64 {
        let a = 90.0 - self.theta.to_degrees();
        if a <= -90.0 {
            a + 180.0
        } else {
            a
        }
    }
}

/// Vote table over `n_theta` x `n_rho` cells, theta-major.
#[derive(Clone, Debug)]
pub struct HoughAccumulator {
    pub votes: Vec<u32>,
    pub n_theta: usize,
    pub n_rho: usize,
    pub rho_step: f64,
    pub theta_step: f64,
    pub rho_max: f64,
}

impl HoughAccumulator {
    pub fn rho_bin(&self, rho: f64) -> usize {
        ((rho + self.rho_max) / self.rho_step).round() as usize
    }

    pub fn theta(&self, t: usize) -> f64 {
        t as f64 * self.theta_step
    }
}

fn check(rho_step: f64, theta_step: f64) -> Result<()> {
    if !(rho_step > 0.0) || !(theta_step > 0.0) {
        return Err(ImgError::InvalidParameter("Hough steps must be positive"));
    }
    Ok(())
}

pub fn hough_accumulator(edges: &BinaryMask, rho_step: f64, theta_step: f64) -> Result<HoughAccumulator> {
    check(rho_step, theta_step)?;
    let (w, h) = edges.dims();
    let rho_max = ((w * w + h * h) as f64).sqrt();
    let n_theta = ((PI / theta_step).round() as usize).max(1);
    let n_rho = (2.0 * rho_max / rho_step).ceil() as usize + 1;
    let trig: Vec<(f64, f64)> = (0..n_theta)
        .map(|t| {
            let th = t as f64 * theta_step;
            (th.cos(), th.sin())
        })
        .collect();
    let mut votes = vec![0u32; n_theta * n_rho];
    for y in 0..h {
        for x in 0..w {
            if !edges.get(x, y) {
                continue;
            }
            for (t, &(c, s)) in trig.iter().enumerate() {
                let rho = x as f64 * c + y as f64 * s;
                let r = ((rho + rho_max) / rho_step).round() as usize;
                votes[t * n_rho + r] += 1;
            }
        }
    }
    Ok(HoughAccumulator {
        votes,
        n_theta,
        n_rho,
        rho_step,
        theta_step,
        rho_max,
    })
}

/// Local-maximum accumulator cells with at least `vote_threshold` votes,
/// strongest first.
pub fn hough_lines(
    edges: &BinaryMask,
    rho_step: f64,
    theta_step: f64,
    vote_threshold: u32,
) -> Result<Vec<LineSegment>> {
    if vote_threshold == 0 {
        return Err(ImgError::InvalidParameter("vote threshold must be >= 1"));
    }
    let acc = hough_accumulator(edges, rho_step, theta_step)?;
    let (nt, nr) = (acc.n_theta as isize, acc.n_rho as isize);
    let mut lines = Vec::new();
    for t in 0..nt {
        for r in 0..nr {
            let v = acc.votes[(t * nr + r) as usize];
            if v < vote_threshold {
                continue;
            }
            let mut is_max = true;
            'nb: for dt in -1..=1isize {
                for dr in -1..=1isize {
                    if dt == 0 && dr == 0 {
                        continue;
                    }
                    let (tt, rr) = (t + dt, r + dr);
                    if tt < 0 || rr < 0 || tt >= nt || rr >= nr {
                        continue;
                    }
                    let o = acc.votes[(tt * nr + rr) as usize];
                    // Plateaus resolve to their first cell in scan order.
                    let earlier = dt < 0 || (dt == 0 && dr < 0);
                    if o > v || (earlier && o == v) {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                lines.push(LineSegment {
                    rho: r as f64 * acc.rho_step - acc.rho_max,
                    theta: acc.theta(t as usize),
                    support: v,
                });
            }
        }
    }
    lines.sort_by(|a, b| b.support.cmp(&a.support));
    Ok(lines)
}
