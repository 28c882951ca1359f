//! Zero-contour extraction by marching squares.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::snakes::{Contour, Point};

/// Grid edge carrying a crossing: horizontal `(x,y)-(x+1,y)` or vertical
/// `(x,y)-(x,y+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum EdgeKey {
    H(usize, usize),
    V(usize, usize),
}

#[inline]
fn inside(v: f64) -> bool {
    v > 0.0
}

/// Position of the zero between the two ends of a grid edge. The values one
/// cell beyond each end, where present, add a curvature term so the crossing
/// of a curved `phi` is not biased toward its concave side.
fn crossing(phi: &ScalarField, key: EdgeKey) -> Point {
    let (w, h) = phi.shape();
    let (x, y, horizontal) = match key {
        EdgeKey::H(x, y) => (x, y, true),
        EdgeKey::V(x, y) => (x, y, false),
    };
    let (len, pos) = if horizontal { (w, x) } else { (h, y) };
    let at = |k: usize| {
        if horizontal {
            phi.get(k, y)
        } else {
            phi.get(x, k)
        }
    };
    let (a, b) = (at(pos), at(pos + 1));
    let mut second = Vec::with_capacity(2);
    if pos > 0 {
        second.push(at(pos - 1) - 2.0 * a + b);
    }
    if pos + 2 < len {
        second.push(a - 2.0 * b + at(pos + 2));
    }
    let t = quadratic_root(
        a,
        b,
        second.iter().sum::<f64>() / second.len().max(1) as f64,
    );
    if horizontal {
        Point::new(x as f64 + t, y as f64)
    } else {
        Point::new(x as f64, y as f64 + t)
    }
}

/// Root in `[0, 1]` of the quadratic through `a` at 0 and `b` at 1 with
/// second derivative `c`; the linear root when there is none.
fn quadratic_root(a: f64, b: f64, c: f64) -> f64 {
    let linear = a / (a - b);
    let qa = 0.5 * c;
    let qb = b - a - qa;
    if qa.abs() <= 1e-12 * (a.abs() + b.abs()) {
        return linear;
    }
    let disc = qb * qb - 4.0 * qa * a;
    if disc < 0.0 {
        return linear;
    }
    // numerically stable pair of roots
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let roots = [q / qa, if q != 0.0 { a / q } else { f64::NAN }];
    roots
        .into_iter()
        .filter(|t| (0.0..=1.0).contains(t))
        .min_by(|s, t| (s - linear).abs().total_cmp(&(t - linear).abs()))
        .unwrap_or(linear)
}

/// Segments of the zero level over all cell quads. Saddles are resolved by
/// the sign of the mean of the four corners.
fn segments(phi: &ScalarField) -> Vec<(EdgeKey, EdgeKey)> {
    let (w, h) = phi.shape();
    let mut out = Vec::new();
    for y in 0..h - 1 {
        for x in 0..w - 1 {
            let va = phi.get(x, y);
            let vb = phi.get(x + 1, y);
            let vc = phi.get(x + 1, y + 1);
            let vd = phi.get(x, y + 1);
            let (a, b, c, d) = (inside(va), inside(vb), inside(vc), inside(vd));
            let top = EdgeKey::H(x, y);
            let right = EdgeKey::V(x + 1, y);
            let bottom = EdgeKey::H(x, y + 1);
            let left = EdgeKey::V(x, y);
            let mut crossed = Vec::with_capacity(4);
            if a != b {
                crossed.push(top);
            }
            if b != c {
                crossed.push(right);
            }
            if c != d {
                crossed.push(bottom);
            }
            if d != a {
                crossed.push(left);
            }
            match crossed.len() {
                0 => {}
                2 => out.push((crossed[0], crossed[1])),
                4 => {
                    let center = inside(0.25 * (va + vb + vc + vd));
                    if center == a {
                        // a and c joined through the middle: cut off b and d
                        out.push((top, right));
                        out.push((bottom, left));
                    } else {
                        out.push((left, top));
                        out.push((right, bottom));
                    }
                }
                _ => unreachable!("a closed cell boundary crosses zero an even number of times"),
            }
        }
    }
    out
}

/// All closed zero-level loops as point lists.
pub(crate) fn zero_loops(phi: &ScalarField) -> Result<Vec<Vec<Point>>> {
    let segs = segments(phi);
    if segs.is_empty() {
        return Err(Error::ContourVanished);
    }
    let mut at: HashMap<EdgeKey, Vec<usize>> = HashMap::with_capacity(segs.len() * 2);
    for (i, &(p, q)) in segs.iter().enumerate() {
        at.entry(p).or_default().push(i);
        at.entry(q).or_default().push(i);
    }
    let mut used = vec![false; segs.len()];
    let mut loops = Vec::new();
    for start in 0..segs.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (first, mut cur) = segs[start];
        let mut keys = vec![first];
        while cur != first {
            keys.push(cur);
            let next = at[&cur].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else {
                return Err(Error::OpenChain);
            };
            used[s] = true;
            let (p, q) = segs[s];
            cur = if p == cur { q } else { p };
        }
        loops.push(keys.into_iter().map(|k| crossing(phi, k)).collect());
    }
    Ok(loops)
}

/// Largest closed component of `{phi = 0}`, counter-clockwise.
pub fn extract_zero_level(phi: &ScalarField) -> Result<Contour> {
    zero_loops(phi)?
        .into_iter()
        .filter_map(|pts| Contour::from_points_dedup(pts).ok())
        .max_by(|a, b| a.area().total_cmp(&b.area()))
        .ok_or(Error::ContourVanished)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_vertices_lie_on_the_circle() {
        let phi = ScalarField::from_fn(64, 64, |x, y| {
            10.0 - (x as f64 - 32.0).hypot(y as f64 - 32.0)
        })
        .unwrap();
        let c = extract_zero_level(&phi).unwrap();
        assert!(c.signed_area() > 0.0);
        for v in c.vertices() {
            let r = v.distance(Point::new(32.0, 32.0));
            assert!((r - 10.0).abs() < 0.005, "r = {r}");
        }
    }

    #[test]
    fn quadratic_root_is_exact_on_parabolas() {
        // (t - 0.3)(t + 2) = t^2 + 1.7 t - 0.6
        let f = |t: f64| t * t + 1.7 * t - 0.6;
        assert!((quadratic_root(f(0.0), f(1.0), 2.0) - 0.3).abs() < 1e-12);
        assert_eq!(quadratic_root(1.0, -1.0, 0.0), 0.5);
    }

    #[test]
    fn no_crossing_is_an_error() {
        let phi = ScalarField::from_fn(8, 8, |_, _| 1.0).unwrap();
        assert!(matches!(
            extract_zero_level(&phi),
            Err(Error::ContourVanished)
        ));
    }

    #[test]
    fn border_touching_interface_is_open() {
        // a planar interface x = 5.5 clamped to a band; its ends hit the
        // top and bottom rows
        let phi = ScalarField::from_fn(12, 12, |x, _| (x as f64 - 5.5).clamp(-3.0, 3.0)).unwrap();
        assert!(matches!(extract_zero_level(&phi), Err(Error::OpenChain)));
    }

    #[test]
    fn picks_the_largest_component() {
        let phi = ScalarField::from_fn(64, 64, |x, y| {
            let a = 12.0 - (x as f64 - 20.0).hypot(y as f64 - 20.0);
            let b = 5.0 - (x as f64 - 50.0).hypot(y as f64 - 50.0);
            a.max(b)
        })
        .unwrap();
        assert_eq!(zero_loops(&phi).unwrap().len(), 2);
        let c = extract_zero_level(&phi).unwrap();
        let (center, r) = c.fit_circle();
        assert!(center.distance(Point::new(20.0, 20.0)) < 0.1);
        assert!((r - 12.0).abs() < 0.1);
    }

    #[test]
    fn saddle_follows_center_value() {
        // checkerboard quad: a, c inside; center positive joins them
        let mut v = vec![-1.0; 16];
        let set = |v: &mut Vec<f64>, x: usize, y: usize, val: f64| v[y * 4 + x] = val;
        set(&mut v, 1, 1, 3.0);
        set(&mut v, 2, 2, 3.0);
        set(&mut v, 2, 1, -1.0);
        set(&mut v, 1, 2, -1.0);
        let phi = ScalarField::new(4, 4, v).unwrap();
        assert_eq!(zero_loops(&phi).unwrap().len(), 1);
        let v2: Vec<f64> = phi
            .values()
            .iter()
            .map(|&x| if x > 0.0 { 1.0 } else { -3.0 })
            .collect();
        let phi2 = ScalarField::new(4, 4, v2).unwrap();
        assert_eq!(zero_loops(&phi2).unwrap().len(), 2);
    }
}
