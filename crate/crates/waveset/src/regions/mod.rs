//! Exact measurable-set algebra on finite polytope unions (dimensions 1–3).
//!
//! Regions are finite unions of convex pieces with rational data: intervals
//! in ℝ¹, convex polygons in ℝ², and axis-aligned boxes in ℝ³ (the
//! three-dimensional cases in scope are all diagonal).  The internal
//! representation keeps pieces pairwise disjoint up to measure zero, so
//! volumes are plain sums and pack/cover predicates reduce to exact rational
//! comparisons.

mod dilation;
mod lattice_ops;
pub mod poly2;

pub use dilation::{certified_dilation_window, d_map, dilation_check};
pub use lattice_ops::{
    fundamental_domain, reduce_mod_lattice, redundant_partition, tau_map, translation_check,
    translation_multiplicity, FundamentalDomain, ReducedFragment, TilingReport,
};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rat::Q;

use poly2::ConvexPoly;

/// An axis-aligned box in ℝ³.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Box3 {
    pub lo: [Q; 3],
    pub hi: [Q; 3],
}

impl Box3 {
    pub fn new(lo: [Q; 3], hi: [Q; 3]) -> Option<Box3> {
        if (0..3).all(|k| lo[k] < hi[k]) {
            Some(Box3 { lo, hi })
        } else {
            None
        }
    }

    pub fn volume(&self) -> Q {
        (0..3).map(|k| &self.hi[k] - &self.lo[k]).product()
    }

    pub fn intersect(&self, o: &Box3) -> Option<Box3> {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        for k in 0..3 {
            if o.lo[k] > lo[k] {
                lo[k] = o.lo[k].clone();
            }
            if o.hi[k] < hi[k] {
                hi[k] = o.hi[k].clone();
            }
        }
        Box3::new(lo, hi)
    }

    /// `self ∖ o` as up to six disjoint boxes.
    pub fn subtract(&self, o: &Box3) -> Vec<Box3> {
        let Some(inter) = self.intersect(o) else {
            return vec![self.clone()];
        };
        let mut out = Vec::new();
        let mut cur = self.clone();
        for k in 0..3 {
            if inter.lo[k] > cur.lo[k] {
                let mut hi = cur.hi.clone();
                hi[k] = inter.lo[k].clone();
                out.extend(Box3::new(cur.lo.clone(), hi));
                cur.lo[k] = inter.lo[k].clone();
            }
            if inter.hi[k] < cur.hi[k] {
                let mut lo = cur.lo.clone();
                lo[k] = inter.hi[k].clone();
                out.extend(Box3::new(lo, cur.hi.clone()));
                cur.hi[k] = inter.hi[k].clone();
            }
        }
        out
    }

    pub fn translate(&self, t: &[Q]) -> Box3 {
        Box3 {
            lo: [&self.lo[0] + &t[0], &self.lo[1] + &t[1], &self.lo[2] + &t[2]],
            hi: [&self.hi[0] + &t[0], &self.hi[1] + &t[1], &self.hi[2] + &t[2]],
        }
    }
}

/// A finite union of convex pieces; pieces are pairwise disjoint.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    D1(Vec<(Q, Q)>),
    D2(Vec<ConvexPoly>),
    D3(Vec<Box3>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Intersect,
    Difference,
    SymmetricDifference,
}

impl Region {
    pub fn empty(dim: usize) -> Result<Region> {
        match dim {
            1 => Ok(Region::D1(vec![])),
            2 => Ok(Region::D2(vec![])),
            3 => Ok(Region::D3(vec![])),
            d => Err(Error::Unsupported(format!("dimension {d}"))),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::D1(_) => 1,
            Region::D2(_) => 2,
            Region::D3(_) => 3,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.volume().is_zero()
    }

    pub fn piece_count(&self) -> usize {
        match self {
            Region::D1(v) => v.len(),
            Region::D2(v) => v.len(),
            Region::D3(v) => v.len(),
        }
    }

    /// Interval [lo, hi).
    pub fn interval(lo: Q, hi: Q) -> Region {
        if lo < hi {
            Region::D1(vec![(lo, hi)])
        } else {
            Region::D1(vec![])
        }
    }

    pub fn intervals(spans: Vec<(Q, Q)>) -> Region {
        let mut r = Region::D1(vec![]);
        for (lo, hi) in spans {
            r = r.boolean(&Region::interval(lo, hi), BoolOp::Union).unwrap();
        }
        r
    }

    pub fn polygon(verts: Vec<[Q; 2]>) -> Result<Region> {
        let p = ConvexPoly::new(verts)
            .ok_or_else(|| Error::InvalidInput("degenerate polygon".into()))?;
        Ok(Region::D2(vec![p]))
    }

    pub fn from_polys(polys: Vec<ConvexPoly>) -> Region {
        let mut r = Region::D2(vec![]);
        for p in polys {
            r = r.boolean(&Region::D2(vec![p]), BoolOp::Union).unwrap();
        }
        r
    }

    pub fn box2(lo: [Q; 2], hi: [Q; 2]) -> Result<Region> {
        let p = ConvexPoly::from_box(&lo, &hi)
            .ok_or_else(|| Error::InvalidInput("degenerate box".into()))?;
        Ok(Region::D2(vec![p]))
    }

    pub fn box3(lo: [Q; 3], hi: [Q; 3]) -> Result<Region> {
        let b =
            Box3::new(lo, hi).ok_or_else(|| Error::InvalidInput("degenerate box".into()))?;
        Ok(Region::D3(vec![b]))
    }

    /// Exact Lebesgue measure.
    pub fn volume(&self) -> Q {
        match self {
            Region::D1(v) => v.iter().map(|(a, b)| b - a).sum(),
            Region::D2(v) => v.iter().map(|p| p.area()).sum(),
            Region::D3(v) => v.iter().map(|b| b.volume()).sum(),
        }
    }

    /// Exact boolean set operation; the result is in disjoint normal form.
    pub fn boolean(&self, other: &Region, op: BoolOp) -> Result<Region> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(
                "regions have different dimensions".into(),
            ));
        }
        Ok(match op {
            BoolOp::Union => self.union_impl(other),
            BoolOp::Intersect => self.intersect_impl(other),
            BoolOp::Difference => self.difference_impl(other),
            BoolOp::SymmetricDifference => {
                let a = self.difference_impl(other);
                let b = other.difference_impl(self);
                a.concat_disjoint(b)
            }
        })
    }

    /// Concatenates two regions known to be disjoint.
    fn concat_disjoint(self, other: Region) -> Region {
        match (self, other) {
            (Region::D1(mut a), Region::D1(b)) => {
                a.extend(b);
                normalize_intervals(&mut a);
                Region::D1(a)
            }
            (Region::D2(mut a), Region::D2(b)) => {
                a.extend(b);
                Region::D2(a)
            }
            (Region::D3(mut a), Region::D3(b)) => {
                a.extend(b);
                Region::D3(a)
            }
            _ => unreachable!("dimension checked"),
        }
    }

    fn union_impl(&self, other: &Region) -> Region {
        let extra = other.difference_impl(self);
        self.clone().concat_disjoint(extra)
    }

    fn intersect_impl(&self, other: &Region) -> Region {
        match (self, other) {
            (Region::D1(a), Region::D1(b)) => {
                let mut out = Vec::new();
                for (al, ah) in a {
                    for (bl, bh) in b {
                        let lo = al.max(bl).clone();
                        let hi = ah.min(bh).clone();
                        if lo < hi {
                            out.push((lo, hi));
                        }
                    }
                }
                normalize_intervals(&mut out);
                Region::D1(out)
            }
            (Region::D2(a), Region::D2(b)) => {
                let mut out = Vec::new();
                for pa in a {
                    for pb in b {
                        if let Some(p) = pa.intersect(pb) {
                            if !p.area2().is_zero() {
                                out.push(p);
                            }
                        }
                    }
                }
                Region::D2(out)
            }
            (Region::D3(a), Region::D3(b)) => {
                let mut out = Vec::new();
                for ba in a {
                    for bb in b {
                        if let Some(x) = ba.intersect(bb) {
                            out.push(x);
                        }
                    }
                }
                Region::D3(out)
            }
            _ => unreachable!(),
        }
    }

    fn difference_impl(&self, other: &Region) -> Region {
        match (self, other) {
            (Region::D1(a), Region::D1(b)) => {
                let mut out: Vec<(Q, Q)> = a.clone();
                for (bl, bh) in b {
                    let mut next = Vec::new();
                    for (al, ah) in out {
                        if &ah <= bl || &al >= bh {
                            next.push((al, ah));
                            continue;
                        }
                        if &al < bl {
                            next.push((al.clone(), bl.clone()));
                        }
                        if &ah > bh {
                            next.push((bh.clone(), ah.clone()));
                        }
                    }
                    out = next;
                }
                normalize_intervals(&mut out);
                Region::D1(out)
            }
            (Region::D2(a), Region::D2(b)) => {
                let mut out = Vec::new();
                for pa in a {
                    let mut frags = vec![pa.clone()];
                    for pb in b {
                        let mut next = Vec::new();
                        for f in frags {
                            next.extend(f.subtract(pb));
                        }
                        frags = next;
                    }
                    out.extend(frags);
                }
                Region::D2(out)
            }
            (Region::D3(a), Region::D3(b)) => {
                let mut out = Vec::new();
                for ba in a {
                    let mut frags = vec![ba.clone()];
                    for bb in b {
                        let mut next = Vec::new();
                        for f in frags {
                            next.extend(f.subtract(bb));
                        }
                        frags = next;
                    }
                    out.extend(frags);
                }
                Region::D3(out)
            }
            _ => unreachable!(),
        }
    }

    pub fn translate(&self, t: &[Q]) -> Result<Region> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch("translation vector".into()));
        }
        Ok(match self {
            Region::D1(v) => Region::D1(v.iter().map(|(a, b)| (a + &t[0], b + &t[0])).collect()),
            Region::D2(v) => Region::D2(
                v.iter()
                    .map(|p| p.translate(&[t[0].clone(), t[1].clone()]))
                    .collect(),
            ),
            Region::D3(v) => Region::D3(v.iter().map(|b| b.translate(t)).collect()),
        })
    }

    /// Exact image under an invertible rational matrix plus optional
    /// translation.  In ℝ³ only diagonal matrices are supported.
    pub fn affine_image(&self, m: &QMatrix, t: &[Q]) -> Result<Region> {
        let n = self.dim();
        if m.nrows() != n || m.ncols() != n || t.len() != n {
            return Err(Error::DimensionMismatch("affine map shape".into()));
        }
        if m.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(match self {
            Region::D1(v) => {
                let a = m.at(0, 0);
                let mut out: Vec<(Q, Q)> = v
                    .iter()
                    .map(|(lo, hi)| {
                        let x = a * lo + &t[0];
                        let y = a * hi + &t[0];
                        if x < y {
                            (x, y)
                        } else {
                            (y, x)
                        }
                    })
                    .collect();
                normalize_intervals(&mut out);
                Region::D1(out)
            }
            Region::D2(v) => {
                let mm = [
                    [m.at(0, 0).clone(), m.at(0, 1).clone()],
                    [m.at(1, 0).clone(), m.at(1, 1).clone()],
                ];
                let tt = [t[0].clone(), t[1].clone()];
                Region::D2(v.iter().filter_map(|p| p.affine(&mm, &tt)).collect())
            }
            Region::D3(v) => {
                if !m.is_diagonal() {
                    return Err(Error::Unsupported(
                        "3-D regions support diagonal matrices only".into(),
                    ));
                }
                let d: Vec<Q> = (0..3).map(|k| m.at(k, k).clone()).collect();
                Region::D3(
                    v.iter()
                        .map(|b| {
                            let mut lo = [Q::zero(), Q::zero(), Q::zero()];
                            let mut hi = lo.clone();
                            for k in 0..3 {
                                let x = &d[k] * &b.lo[k] + &t[k];
                                let y = &d[k] * &b.hi[k] + &t[k];
                                if x < y {
                                    lo[k] = x;
                                    hi[k] = y;
                                } else {
                                    lo[k] = y;
                                    hi[k] = x;
                                }
                            }
                            Box3 { lo, hi }
                        })
                        .collect(),
                )
            }
        })
    }

    /// Axis-aligned bounding box as (lo, hi) coordinate vectors.
    pub fn bbox(&self) -> Option<(Vec<Q>, Vec<Q>)> {
        match self {
            Region::D1(v) => {
                if v.is_empty() {
                    return None;
                }
                Some((
                    vec![v.iter().map(|(a, _)| a.clone()).min().unwrap()],
                    vec![v.iter().map(|(_, b)| b.clone()).max().unwrap()],
                ))
            }
            Region::D2(v) => {
                if v.is_empty() {
                    return None;
                }
                let boxes: Vec<_> = v.iter().map(|p| p.bbox()).collect();
                Some((
                    (0..2)
                        .map(|k| boxes.iter().map(|(lo, _)| lo[k].clone()).min().unwrap())
                        .collect(),
                    (0..2)
                        .map(|k| boxes.iter().map(|(_, hi)| hi[k].clone()).max().unwrap())
                        .collect(),
                ))
            }
            Region::D3(v) => {
                if v.is_empty() {
                    return None;
                }
                Some((
                    (0..3)
                        .map(|k| v.iter().map(|b| b.lo[k].clone()).min().unwrap())
                        .collect(),
                    (0..3)
                        .map(|k| v.iter().map(|b| b.hi[k].clone()).max().unwrap())
                        .collect(),
                ))
            }
        }
    }

    /// Exact (min, max) of ‖x‖² over the region; `None` when empty.
    pub fn norm_sq_range(&self) -> Option<(Q, Q)> {
        match self {
            Region::D1(v) => {
                if v.is_empty() {
                    return None;
                }
                let mut mins = Vec::new();
                let mut maxs = Vec::new();
                for (a, b) in v {
                    let (mn, mx) = abs_range_1d(a, b);
                    mins.push(&mn * &mn);
                    maxs.push(&mx * &mx);
                }
                Some((mins.into_iter().min()?, maxs.into_iter().max()?))
            }
            Region::D2(v) => {
                if v.is_empty() {
                    return None;
                }
                Some((
                    v.iter().map(|p| p.min_norm_sq()).min()?,
                    v.iter().map(|p| p.max_norm_sq()).max()?,
                ))
            }
            Region::D3(v) => {
                if v.is_empty() {
                    return None;
                }
                let mut mins = Vec::new();
                let mut maxs = Vec::new();
                for b in v {
                    let mut mn = Q::zero();
                    let mut mx = Q::zero();
                    for k in 0..3 {
                        let (a, z) = abs_range_1d(&b.lo[k], &b.hi[k]);
                        mn += &a * &a;
                        mx += &z * &z;
                    }
                    mins.push(mn);
                    maxs.push(mx);
                }
                Some((mins.into_iter().min()?, maxs.into_iter().max()?))
            }
        }
    }

    /// Exact (min, max) of |x_k| over the region; `None` when empty.
    pub fn abs_coord_range(&self, k: usize) -> Option<(Q, Q)> {
        match self {
            Region::D1(v) => {
                if v.is_empty() || k != 0 {
                    return None;
                }
                let mut mins = Vec::new();
                let mut maxs = Vec::new();
                for (a, b) in v {
                    let (mn, mx) = abs_range_1d(a, b);
                    mins.push(mn);
                    maxs.push(mx);
                }
                Some((mins.into_iter().min()?, maxs.into_iter().max()?))
            }
            Region::D2(v) => {
                if v.is_empty() || k >= 2 {
                    return None;
                }
                let ranges: Vec<_> = v.iter().map(|p| p.abs_coord_range(k)).collect();
                Some((
                    ranges.iter().map(|(a, _)| a.clone()).min()?,
                    ranges.iter().map(|(_, b)| b.clone()).max()?,
                ))
            }
            Region::D3(v) => {
                if v.is_empty() || k >= 3 {
                    return None;
                }
                let mut mins = Vec::new();
                let mut maxs = Vec::new();
                for b in v {
                    let (mn, mx) = abs_range_1d(&b.lo[k], &b.hi[k]);
                    mins.push(mn);
                    maxs.push(mx);
                }
                Some((mins.into_iter().min()?, maxs.into_iter().max()?))
            }
        }
    }

    /// Deterministic trim: a sub-region of exactly the requested volume
    /// (plus the remainder), swept in lexicographic piece order.
    pub fn trim_to_volume(&self, target: &Q) -> Result<(Region, Region)> {
        if target.is_negative() || target > &self.volume() {
            return Err(Error::Precondition(format!(
                "trim target {} outside [0, {}]",
                crate::rat::fmt_q(target),
                crate::rat::fmt_q(&self.volume())
            )));
        }
        match self {
            Region::D1(v) => {
                let mut spans = v.clone();
                spans.sort();
                let mut kept = Vec::new();
                let mut rest = Vec::new();
                let mut left = target.clone();
                for (a, b) in spans {
                    let len = &b - &a;
                    if left.is_zero() {
                        rest.push((a, b));
                    } else if len <= left {
                        left -= &len;
                        kept.push((a, b));
                    } else {
                        let cut = &a + &left;
                        kept.push((a, cut.clone()));
                        rest.push((cut, b));
                        left = Q::zero();
                    }
                }
                Ok((Region::D1(kept), Region::D1(rest)))
            }
            Region::D2(v) => {
                let mut tris: Vec<[poly2::Pt; 3]> = Vec::new();
                for p in v {
                    tris.extend(p.triangulate());
                }
                tris.sort();
                let mut kept = Vec::new();
                let mut rest = Vec::new();
                let mut left = target.clone();
                for t in tris {
                    let poly = ConvexPoly::new(t.to_vec()).expect("nondegenerate triangle");
                    let area = poly.area();
                    if left.is_zero() {
                        rest.push(poly);
                    } else if area <= left {
                        left -= &area;
                        kept.push(poly);
                    } else {
                        // Cevian cut through vertex t[0]: the point p on the
                        // segment t[1]→t[2] at fraction f = left/area splits
                        // off exactly the requested area.
                        let f = &left / &area;
                        let p = [
                            &t[1][0] + &f * (&t[2][0] - &t[1][0]),
                            &t[1][1] + &f * (&t[2][1] - &t[1][1]),
                        ];
                        if let Some(first) =
                            ConvexPoly::new(vec![t[0].clone(), t[1].clone(), p.clone()])
                        {
                            kept.push(first);
                        }
                        if let Some(second) = ConvexPoly::new(vec![t[0].clone(), p, t[2].clone()])
                        {
                            rest.push(second);
                        }
                        left = Q::zero();
                    }
                }
                Ok((Region::D2(kept), Region::D2(rest)))
            }
            Region::D3(v) => {
                let mut boxes = v.clone();
                boxes.sort_by_key(|b| (b.lo.clone(), b.hi.clone()));
                let mut kept = Vec::new();
                let mut rest = Vec::new();
                let mut left = target.clone();
                for b in boxes {
                    let vol = b.volume();
                    if left.is_zero() {
                        rest.push(b);
                    } else if vol <= left {
                        left -= &vol;
                        kept.push(b);
                    } else {
                        // Cut along the first axis: volume is linear in the
                        // cut coordinate.
                        let frac = &left / &vol;
                        let cut = &b.lo[0] + &frac * (&b.hi[0] - &b.lo[0]);
                        let mut hi = b.hi.clone();
                        hi[0] = cut.clone();
                        let mut lo = b.lo.clone();
                        lo[0] = cut;
                        kept.extend(Box3::new(b.lo.clone(), hi));
                        rest.extend(Box3::new(lo, b.hi.clone()));
                        left = Q::zero();
                    }
                }
                Ok((Region::D3(kept), Region::D3(rest)))
            }
        }
    }

    /// Deterministic total order key (piece-count, then sorted piece data).
    pub fn canonical_key(&self) -> String {
        match self {
            Region::D1(v) => {
                let mut s: Vec<String> = v
                    .iter()
                    .map(|(a, b)| format!("[{},{}]", crate::rat::fmt_q(a), crate::rat::fmt_q(b)))
                    .collect();
                s.sort();
                s.join(";")
            }
            Region::D2(v) => {
                let mut s: Vec<String> = v
                    .iter()
                    .map(|p| {
                        p.sort_key()
                            .iter()
                            .map(|q| {
                                format!("({},{})", crate::rat::fmt_q(&q[0]), crate::rat::fmt_q(&q[1]))
                            })
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .collect();
                s.sort();
                s.join(";")
            }
            Region::D3(v) => {
                let mut s: Vec<String> = v
                    .iter()
                    .map(|b| {
                        format!(
                            "[{}..{}]",
                            b.lo.iter().map(crate::rat::fmt_q).collect::<Vec<_>>().join(","),
                            b.hi.iter().map(crate::rat::fmt_q).collect::<Vec<_>>().join(",")
                        )
                    })
                    .collect();
                s.sort();
                s.join(";")
            }
        }
    }
}

fn abs_range_1d(a: &Q, b: &Q) -> (Q, Q) {
    let mx = a.clone().abs().max(b.clone().abs());
    let mn = if !a.is_positive() && !b.is_negative() {
        Q::zero()
    } else {
        a.clone().abs().min(b.clone().abs())
    };
    (mn, mx)
}

fn normalize_intervals(v: &mut Vec<(Q, Q)>) {
    v.retain(|(a, b)| a < b);
    v.sort();
    let mut out: Vec<(Q, Q)> = Vec::with_capacity(v.len());
    for (a, b) in v.drain(..) {
        if let Some(last) = out.last_mut() {
            if a <= last.1 {
                if b > last.1 {
                    last.1 = b;
                }
                continue;
            }
        }
        out.push((a, b));
    }
    *v = out;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qr};

    #[test]
    fn interval_algebra() {
        let a = Region::intervals(vec![(q(0), q(2)), (q(3), q(4))]);
        let b = Region::interval(q(1), q(3));
        assert_eq!(a.volume(), q(3));
        let u = a.boolean(&b, BoolOp::Union).unwrap();
        assert_eq!(u.volume(), q(4));
        assert_eq!(u.piece_count(), 1);
        let i = a.boolean(&b, BoolOp::Intersect).unwrap();
        assert_eq!(i.volume(), q(1));
        let d = a.boolean(&b, BoolOp::Difference).unwrap();
        assert_eq!(d.volume(), q(2));
        let s = a.boolean(&b, BoolOp::SymmetricDifference).unwrap();
        assert_eq!(s.volume(), q(3));
    }

    #[test]
    fn inclusion_exclusion_2d() {
        // Two unit squares overlapping in area 1/4 → union 7/4.
        let a = Region::box2([q(0), q(0)], [q(1), q(1)]).unwrap();
        let b = Region::box2([qr(1, 2), qr(1, 2)], [qr(3, 2), qr(3, 2)]).unwrap();
        let u = a.boolean(&b, BoolOp::Union).unwrap();
        let i = a.boolean(&b, BoolOp::Intersect).unwrap();
        assert_eq!(u.volume(), qr(7, 4));
        assert_eq!(i.volume(), qr(1, 4));
        // |A∪B| + |A∩B| = |A| + |B|.
        assert_eq!(u.volume() + i.volume(), a.volume() + b.volume());
        // S ∩ S = S up to measure.
        let ss = a.boolean(&a, BoolOp::Intersect).unwrap();
        assert_eq!(ss.volume(), a.volume());
        let sd = a.boolean(&a, BoolOp::SymmetricDifference).unwrap();
        assert!(sd.volume().is_zero());
    }

    #[test]
    fn affine_volume_scaling() {
        let a = Region::box2([q(0), q(0)], [q(1), q(1)]).unwrap();
        let m = QMatrix::diagonal(&[q(2), q(2)]);
        let img = a.affine_image(&m, &[q(0), q(0)]).unwrap();
        assert_eq!(img.volume(), q(4));
        // Shear preserves volume.
        let shear = QMatrix::from_rows(vec![vec![q(1), q(1)], vec![q(0), q(1)]]).unwrap();
        let tri = Region::polygon(vec![[q(0), q(0)], [q(1), q(0)], [q(0), q(1)]]).unwrap();
        let img = tri.affine_image(&shear, &[q(0), q(0)]).unwrap();
        assert_eq!(img.volume(), tri.volume());
    }

    #[test]
    fn box3_algebra() {
        let a = Region::box3([q(0), q(0), q(0)], [q(2), q(2), q(2)]).unwrap();
        let b = Region::box3([q(1), q(1), q(1)], [q(3), q(3), q(3)]).unwrap();
        let u = a.boolean(&b, BoolOp::Union).unwrap();
        assert_eq!(u.volume(), q(15));
        let d = a.boolean(&b, BoolOp::Difference).unwrap();
        assert_eq!(d.volume(), q(7));
        let m = QMatrix::diagonal(&[q(2), q(1), qr(1, 3)]);
        let img = a.affine_image(&m, &[q(0), q(0), q(0)]).unwrap();
        assert_eq!(img.volume(), q(8) * qr(2, 3));
        // Non-diagonal 3-D maps are rejected.
        let nd = QMatrix::from_rows(vec![
            vec![q(1), q(1), q(0)],
            vec![q(0), q(1), q(0)],
            vec![q(0), q(0), q(1)],
        ])
        .unwrap();
        assert!(a.affine_image(&nd, &[q(0), q(0), q(0)]).is_err());
    }

    #[test]
    fn trim_exact_volumes() {
        let r = Region::from_polys(vec![
            ConvexPoly::from_box(&[q(0), q(0)], &[q(1), q(1)]).unwrap(),
            ConvexPoly::new(vec![[q(2), q(0)], [q(4), q(0)], [q(3), q(3)]]).unwrap(),
        ]);
        let total = r.volume();
        for target in [qr(1, 3), q(1), qr(7, 4), total.clone()] {
            let (kept, rest) = r.trim_to_volume(&target).unwrap();
            assert_eq!(kept.volume(), target);
            assert_eq!(kept.volume() + rest.volume(), total);
        }
        assert!(r.trim_to_volume(&q(100)).is_err());
    }

    #[test]
    fn norm_ranges() {
        let r = Region::intervals(vec![(q(-2), q(-1)), (q(1), q(2))]);
        let (mn, mx) = r.norm_sq_range().unwrap();
        assert_eq!((mn, mx), (q(1), q(4)));
        let r2 = Region::box2([q(1), q(0)], [q(2), q(1)]).unwrap();
        let (mn, mx) = r2.norm_sq_range().unwrap();
        assert_eq!(mn, q(1));
        assert_eq!(mx, q(5));
    }
}
