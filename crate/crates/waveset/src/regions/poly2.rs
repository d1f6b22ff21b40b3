//! Exact convex polygon primitives over ℚ.
//!
//! Polygons are stored as CCW vertex lists with positive area; degenerate
//! results of clipping are dropped by the callers via the exact area test.
//! All predicates are measure-theoretic: sets are closed, and "disjoint"
//! means the intersection has zero area.

use num_traits::{Signed, Zero};

use crate::rat::Q;

pub type Pt = [Q; 2];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexPoly {
    verts: Vec<Pt>,
}

fn cross(o: &Pt, a: &Pt, b: &Pt) -> Q {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

impl ConvexPoly {
    /// Builds a polygon from vertices (any orientation); returns `None` for
    /// degenerate (zero-area) input.  Vertices must describe a convex cycle.
    pub fn new(mut verts: Vec<Pt>) -> Option<ConvexPoly> {
        verts.dedup();
        if verts.len() > 1 && verts.first() == verts.last() {
            verts.pop();
        }
        if verts.len() < 3 {
            return None;
        }
        // Twice the signed area.
        let mut area2 = Q::zero();
        let n = verts.len();
        for i in 0..n {
            let a = &verts[i];
            let b = &verts[(i + 1) % n];
            area2 += &a[0] * &b[1] - &a[1] * &b[0];
        }
        if area2.is_zero() {
            return None;
        }
        if area2.is_negative() {
            verts.reverse();
        }
        // Remove collinear runs for canonical storage.
        let mut out: Vec<Pt> = Vec::with_capacity(verts.len());
        let n = verts.len();
        for i in 0..n {
            let prev = &verts[(i + n - 1) % n];
            let cur = &verts[i];
            let next = &verts[(i + 1) % n];
            if !cross(prev, cur, next).is_zero() {
                out.push(cur.clone());
            }
        }
        if out.len() < 3 {
            return None;
        }
        Some(ConvexPoly { verts: out })
    }

    pub fn from_box(lo: &Pt, hi: &Pt) -> Option<ConvexPoly> {
        ConvexPoly::new(vec![
            [lo[0].clone(), lo[1].clone()],
            [hi[0].clone(), lo[1].clone()],
            [hi[0].clone(), hi[1].clone()],
            [lo[0].clone(), hi[1].clone()],
        ])
    }

    pub fn vertices(&self) -> &[Pt] {
        &self.verts
    }

    /// Twice the (positive) area, exact.
    pub fn area2(&self) -> Q {
        let mut s = Q::zero();
        let n = self.verts.len();
        for i in 0..n {
            let a = &self.verts[i];
            let b = &self.verts[(i + 1) % n];
            s += &a[0] * &b[1] - &a[1] * &b[0];
        }
        s
    }

    pub fn area(&self) -> Q {
        self.area2() / crate::rat::q(2)
    }

    /// Clips by the half-plane `a·x + b·y ≤ c`.
    pub fn clip_halfplane(&self, a: &Q, b: &Q, c: &Q) -> Option<ConvexPoly> {
        let n = self.verts.len();
        let side = |p: &Pt| -> Q { a * &p[0] + b * &p[1] - c };
        let mut out: Vec<Pt> = Vec::new();
        for i in 0..n {
            let cur = &self.verts[i];
            let nxt = &self.verts[(i + 1) % n];
            let sc = side(cur);
            let sn = side(nxt);
            let cur_in = !sc.is_positive();
            let nxt_in = !sn.is_positive();
            if cur_in {
                out.push(cur.clone());
            }
            if cur_in != nxt_in {
                // Intersection point: cur + t·(nxt − cur) with t = sc/(sc − sn).
                let t = &sc / (&sc - &sn);
                let x = &cur[0] + &t * (&nxt[0] - &cur[0]);
                let y = &cur[1] + &t * (&nxt[1] - &cur[1]);
                out.push([x, y]);
            }
        }
        ConvexPoly::new(out)
    }

    pub fn intersect(&self, other: &ConvexPoly) -> Option<ConvexPoly> {
        let mut cur = self.clone();
        let n = other.verts.len();
        for i in 0..n {
            let p = &other.verts[i];
            let q = &other.verts[(i + 1) % n];
            // Inside of the CCW edge (p→q) is the left side, which in the
            // ≤ convention is a·x + b·y ≤ c with the coefficients below.
            let a = &q[1] - &p[1];
            let b = &p[0] - &q[0];
            let c = &a * &p[0] + &b * &p[1];
            cur = cur.clip_halfplane(&a, &b, &c)?;
        }
        Some(cur)
    }

    /// Exact set difference as disjoint convex pieces (fan decomposition
    /// over the edges of `other`).
    pub fn subtract(&self, other: &ConvexPoly) -> Vec<ConvexPoly> {
        let n = other.verts.len();
        let mut out = Vec::new();
        let mut rest = Some(self.clone());
        for i in 0..n {
            let Some(r) = rest else { break };
            let p = &other.verts[i];
            let q = &other.verts[(i + 1) % n];
            let a = &q[1] - &p[1];
            let b = &p[0] - &q[0];
            let c = &a * &p[0] + &b * &p[1];
            // Inside of the edge is a·x + b·y ≤ c; the outside piece and the
            // inside remainder overlap only on the line (measure zero).
            if let Some(piece) = r.clip_halfplane(&-a.clone(), &-b.clone(), &-c.clone()) {
                out.push(piece);
            }
            rest = r.clip_halfplane(&a, &b, &c);
        }
        out
    }

    pub fn translate(&self, t: &Pt) -> ConvexPoly {
        ConvexPoly {
            verts: self
                .verts
                .iter()
                .map(|p| [&p[0] + &t[0], &p[1] + &t[1]])
                .collect(),
        }
    }

    /// Image under an invertible linear map (rows m00 m01 / m10 m11) plus a
    /// translation.
    pub fn affine(&self, m: &[[Q; 2]; 2], t: &Pt) -> Option<ConvexPoly> {
        ConvexPoly::new(
            self.verts
                .iter()
                .map(|p| {
                    [
                        &m[0][0] * &p[0] + &m[0][1] * &p[1] + &t[0],
                        &m[1][0] * &p[0] + &m[1][1] * &p[1] + &t[1],
                    ]
                })
                .collect(),
        )
    }

    pub fn bbox(&self) -> (Pt, Pt) {
        let mut lo = self.verts[0].clone();
        let mut hi = self.verts[0].clone();
        for p in &self.verts {
            for k in 0..2 {
                if p[k] < lo[k] {
                    lo[k] = p[k].clone();
                }
                if p[k] > hi[k] {
                    hi[k] = p[k].clone();
                }
            }
        }
        (lo, hi)
    }

    pub fn contains(&self, p: &Pt) -> bool {
        let n = self.verts.len();
        (0..n).all(|i| {
            let a = &self.verts[i];
            let b = &self.verts[(i + 1) % n];
            !cross(a, b, p).is_negative()
        })
    }

    /// Fan triangulation (the polygon is convex).
    pub fn triangulate(&self) -> Vec<[Pt; 3]> {
        let mut out = Vec::new();
        for i in 1..self.verts.len() - 1 {
            out.push([
                self.verts[0].clone(),
                self.verts[i].clone(),
                self.verts[i + 1].clone(),
            ]);
        }
        out
    }

    /// Squared Euclidean distance from the origin to the polygon (0 when the
    /// origin lies inside).
    pub fn min_norm_sq(&self) -> Q {
        let origin = [Q::zero(), Q::zero()];
        if self.contains(&origin) {
            return Q::zero();
        }
        let n = self.verts.len();
        let mut best: Option<Q> = None;
        for i in 0..n {
            let a = &self.verts[i];
            let b = &self.verts[(i + 1) % n];
            let d = seg_dist_sq_origin(a, b);
            if best.as_ref().map_or(true, |bv| &d < bv) {
                best = Some(d);
            }
        }
        best.unwrap()
    }

    pub fn max_norm_sq(&self) -> Q {
        self.verts
            .iter()
            .map(|p| &p[0] * &p[0] + &p[1] * &p[1])
            .max()
            .unwrap()
    }

    /// Per-coordinate range of |x_k| over the polygon: (min, max).
    pub fn abs_coord_range(&self, k: usize) -> (Q, Q) {
        let lo = self.verts.iter().map(|p| p[k].clone()).min().unwrap();
        let hi = self.verts.iter().map(|p| p[k].clone()).max().unwrap();
        let max = lo.clone().abs().max(hi.clone().abs());
        let min = if !lo.is_positive() && !hi.is_negative() {
            Q::zero()
        } else {
            lo.abs().min(hi.abs())
        };
        (min, max)
    }

    /// Lexicographic key for deterministic ordering.
    pub fn sort_key(&self) -> Vec<Pt> {
        let mut k = self.verts.clone();
        k.sort();
        k
    }
}

fn seg_dist_sq_origin(a: &Pt, b: &Pt) -> Q {
    let dx = &b[0] - &a[0];
    let dy = &b[1] - &a[1];
    let len2 = &dx * &dx + &dy * &dy;
    if len2.is_zero() {
        return &a[0] * &a[0] + &a[1] * &a[1];
    }
    // Projection parameter of the origin onto the segment, clamped to [0,1].
    let mut t = -(&a[0] * &dx + &a[1] * &dy) / &len2;
    if t.is_negative() {
        t = Q::zero();
    } else if t > Q::from_integer(1.into()) {
        t = Q::from_integer(1.into());
    }
    let px = &a[0] + &t * &dx;
    let py = &a[1] + &t * &dy;
    &px * &px + &py * &py
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qr};

    fn unit_square() -> ConvexPoly {
        ConvexPoly::from_box(&[q(0), q(0)], &[q(1), q(1)]).unwrap()
    }

    #[test]
    fn area_and_orientation() {
        let s = unit_square();
        assert_eq!(s.area(), q(1));
        // CW input gets normalized.
        let p = ConvexPoly::new(vec![
            [q(0), q(0)],
            [q(0), q(1)],
            [q(1), q(1)],
            [q(1), q(0)],
        ])
        .unwrap();
        assert_eq!(p.area(), q(1));
        // Degenerate input rejected.
        assert!(ConvexPoly::new(vec![[q(0), q(0)], [q(1), q(1)], [q(2), q(2)]]).is_none());
    }

    #[test]
    fn clip_and_intersect() {
        let s = unit_square();
        let half = s.clip_halfplane(&q(1), &q(0), &qr(1, 2)).unwrap();
        assert_eq!(half.area(), qr(1, 2));
        let t = ConvexPoly::from_box(&[qr(1, 2), qr(1, 2)], &[q(2), q(2)]).unwrap();
        let inter = s.intersect(&t).unwrap();
        assert_eq!(inter.area(), qr(1, 4));
        // Disjoint boxes: zero-area intersection is None.
        let far = ConvexPoly::from_box(&[q(5), q(5)], &[q(6), q(6)]).unwrap();
        assert!(s.intersect(&far).is_none());
    }

    #[test]
    fn subtraction_partitions() {
        let s = unit_square();
        let t = ConvexPoly::from_box(&[qr(1, 4), qr(1, 4)], &[qr(3, 4), qr(3, 4)]).unwrap();
        let pieces = s.subtract(&t);
        let total: Q = pieces.iter().map(|p| p.area()).sum();
        assert_eq!(total, q(1) - qr(1, 4));
        // Pieces are pairwise disjoint.
        for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                assert!(pieces[i].intersect(&pieces[j]).map_or(true, |p| p.area().is_zero()));
            }
        }
        // Subtracting a disjoint polygon changes nothing.
        let far = ConvexPoly::from_box(&[q(5), q(5)], &[q(6), q(6)]).unwrap();
        let pieces = s.subtract(&far);
        let total: Q = pieces.iter().map(|p| p.area()).sum();
        assert_eq!(total, q(1));
    }

    #[test]
    fn shear_preserves_area() {
        let s = unit_square();
        let sheared = s
            .affine(&[[q(1), q(3)], [q(0), q(1)]], &[q(0), q(0)])
            .unwrap();
        assert_eq!(sheared.area(), q(1));
        // Reflection flips orientation but the polygon is still valid.
        let refl = s
            .affine(&[[q(-1), q(0)], [q(0), q(1)]], &[q(0), q(0)])
            .unwrap();
        assert_eq!(refl.area(), q(1));
    }

    #[test]
    fn norms_and_ranges() {
        let s = ConvexPoly::from_box(&[q(1), q(1)], &[q(2), q(2)]).unwrap();
        assert_eq!(s.min_norm_sq(), q(2));
        assert_eq!(s.max_norm_sq(), q(8));
        let (mn, mx) = s.abs_coord_range(0);
        assert_eq!((mn, mx), (q(1), q(2)));
        let across = ConvexPoly::from_box(&[q(-1), q(3)], &[q(1), q(4)]).unwrap();
        let (mn, mx) = across.abs_coord_range(0);
        assert_eq!((mn, mx), (q(0), q(1)));
        assert_eq!(across.min_norm_sq(), q(9));
    }

    #[test]
    fn triangulation_sums() {
        let p = ConvexPoly::new(vec![
            [q(0), q(0)],
            [q(2), q(0)],
            [q(3), q(2)],
            [q(1), q(3)],
        ])
        .unwrap();
        let tris = p.triangulate();
        let total: Q = tris
            .iter()
            .map(|t| (cross(&t[0], &t[1], &t[2])).abs() / q(2))
            .sum();
        assert_eq!(total, p.area());
    }
}
