//! Translation-side verification: reduction modulo the lattice, pack/cover
//! reports, redundancy layering, and the translation equivalency map τ.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::QMatrix;
use crate::rat::Q;

use super::{BoolOp, Region};

/// The half-open basis parallelepiped of Γ (stored closed; all predicates
/// are up to measure zero).
#[derive(Clone, Debug)]
pub struct FundamentalDomain {
    pub region: Region,
    pub covolume: Q,
}

/// Verification report for a pack/cover/tile test.
#[derive(Clone, Debug)]
pub struct TilingReport {
    pub packs: bool,
    pub covers: bool,
    /// Total overlap mass (zero iff packs).
    pub excess_volume: Q,
    /// Uncovered mass within the reference window (zero iff covers).
    pub deficit_volume: Q,
    /// Certified bound on anything the finite window could have missed;
    /// zero when the window certification is complete.
    pub truncation_bound: Q,
}

impl TilingReport {
    pub fn tiles(&self) -> bool {
        self.packs && self.covers
    }
}

fn rational_generators(lat: &Lattice) -> Result<&QMatrix> {
    lat.generator_matrix().as_q().ok_or_else(|| {
        Error::Unsupported("region/lattice operations need a rational lattice".into())
    })
}

/// Builds the fundamental parallelepiped of a rational lattice.
pub fn fundamental_domain(lat: &Lattice) -> Result<FundamentalDomain> {
    let g = rational_generators(lat)?;
    let n = lat.dim();
    let covolume = lat.covolume_q().expect("rational");
    let region = match n {
        1 => {
            let a = g.at(0, 0).clone();
            let (lo, hi) = if a.is_negative() {
                (a, Q::zero())
            } else {
                (Q::zero(), a)
            };
            Region::interval(lo, hi)
        }
        2 => {
            let g0 = [g.at(0, 0).clone(), g.at(1, 0).clone()];
            let g1 = [g.at(0, 1).clone(), g.at(1, 1).clone()];
            Region::polygon(vec![
                [Q::zero(), Q::zero()],
                g0.clone(),
                [&g0[0] + &g1[0], &g0[1] + &g1[1]],
                g1,
            ])?
        }
        3 => {
            if !g.is_diagonal() {
                return Err(Error::Unsupported(
                    "3-D region work needs a diagonal lattice basis".into(),
                ));
            }
            let mut lo = [Q::zero(), Q::zero(), Q::zero()];
            let mut hi = lo.clone();
            for k in 0..3 {
                let a = g.at(k, k).clone();
                if a.is_negative() {
                    lo[k] = a;
                } else {
                    hi[k] = a;
                }
            }
            Region::box3(lo, hi)?
        }
        d => return Err(Error::Unsupported(format!("dimension {d}"))),
    };
    Ok(FundamentalDomain { region, covolume })
}

/// One reduced fragment: `region ⊆ F` together with the lattice coefficient
/// vector it was translated back by (original piece = region + G·gamma).
#[derive(Clone, Debug)]
pub struct ReducedFragment {
    pub region: Region,
    pub gamma: Vec<BigInt>,
}

/// Integer range of lattice coefficients whose fundamental cell can touch
/// the given bounding box.
fn coefficient_window(
    g: &QMatrix,
    lo: &[Q],
    hi: &[Q],
) -> Result<Vec<(i64, i64)>> {
    let n = g.nrows();
    let ginv = g.inverse().ok_or(Error::SingularMatrix)?;
    // Extremes of G⁻¹ over the box corners.
    let mut mins = vec![Q::zero(); n];
    let mut maxs = vec![Q::zero(); n];
    let corners = 1usize << n;
    for c in 0..corners {
        let pt: Vec<Q> = (0..n)
            .map(|k| {
                if c >> k & 1 == 1 {
                    hi[k].clone()
                } else {
                    lo[k].clone()
                }
            })
            .collect();
        let y = ginv.mul_vec(&pt);
        for k in 0..n {
            if c == 0 || y[k] < mins[k] {
                mins[k] = y[k].clone();
            }
            if c == 0 || y[k] > maxs[k] {
                maxs[k] = y[k].clone();
            }
        }
    }
    Ok((0..n)
        .map(|k| {
            let lo_k = (&mins[k] - Q::from_integer(1.into())).ceil().to_integer();
            let hi_k = maxs[k].floor().to_integer();
            let lo_i: i64 = lo_k.try_into().unwrap_or(i64::MIN / 2);
            let hi_i: i64 = hi_k.try_into().unwrap_or(i64::MAX / 2);
            (lo_i, hi_i)
        })
        .collect())
}

fn iter_window(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &(lo, hi) in ranges {
        let mut next = Vec::new();
        for prefix in &out {
            for v in lo..=hi {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Cuts a bounded region into fragments lying in the fundamental domain,
/// each tagged with the lattice vector that was subtracted.
pub fn reduce_mod_lattice(s: &Region, lat: &Lattice) -> Result<Vec<ReducedFragment>> {
    let g = rational_generators(lat)?;
    let fd = fundamental_domain(lat)?;
    let Some((lo, hi)) = s.bbox() else {
        return Ok(vec![]);
    };
    let ranges = coefficient_window(g, &lo, &hi)?;
    let mut out = Vec::new();
    for z in iter_window(&ranges) {
        let zq: Vec<Q> = z.iter().map(|&v| crate::rat::q(v)).collect();
        let gz = g.mul_vec(&zq);
        let cell = fd.region.translate(&gz)?;
        let frag = s.boolean(&cell, BoolOp::Intersect)?;
        if frag.is_empty() {
            continue;
        }
        let neg: Vec<Q> = gz.iter().map(|x| -x.clone()).collect();
        out.push(ReducedFragment {
            region: frag.translate(&neg)?,
            gamma: z.iter().map(|&v| BigInt::from(v)).collect(),
        });
    }
    // Deterministic order.
    out.sort_by(|a, b| {
        a.gamma
            .cmp(&b.gamma)
            .then_with(|| a.region.canonical_key().cmp(&b.region.canonical_key()))
    });
    Ok(out)
}

/// Pack/cover/tile verification for Γ translations of a bounded region.
///
/// Reduces every piece modulo Γ into the fundamental domain: the region
/// packs iff the reduced fragments overlap in measure zero, and covers iff
/// their union exhausts the fundamental domain.
pub fn translation_check(s: &Region, lat: &Lattice) -> Result<TilingReport> {
    let fd = fundamental_domain(lat)?;
    let frags = reduce_mod_lattice(s, lat)?;
    let mut union = Region::empty(s.dim())?;
    let mut total = Q::zero();
    for f in &frags {
        total += f.region.volume();
        union = union.boolean(&f.region, BoolOp::Union)?;
    }
    let union_vol = union.volume();
    let excess = &total - &union_vol;
    let deficit = &fd.covolume - &union_vol;
    Ok(TilingReport {
        packs: excess.is_zero(),
        covers: deficit.is_zero(),
        excess_volume: excess,
        deficit_volume: deficit,
        truncation_bound: Q::zero(),
    })
}

/// Maximal translation multiplicity of the region (smallest M such that it
/// packs M-redundantly), via the reduction layering.
pub fn translation_multiplicity(s: &Region, lat: &Lattice) -> Result<usize> {
    let layers = layer_reduction(s, lat, usize::MAX)?;
    Ok(layers.len())
}

fn layer_reduction(
    u: &Region,
    lat: &Lattice,
    max_layers: usize,
) -> Result<Vec<(Region, Region)>> {
    // Each layer is (occupied-in-F, content-in-original-coordinates).
    let g = rational_generators(lat)?.clone();
    let frags = reduce_mod_lattice(u, lat)?;
    let mut layers: Vec<(Region, Region)> = Vec::new();
    for f in &frags {
        let mut rem = f.region.clone();
        let zq: Vec<Q> = f
            .gamma
            .iter()
            .map(|v| Q::from_integer(v.clone()))
            .collect();
        let gz = g.mul_vec(&zq);
        let mut m = 0usize;
        while !rem.is_empty() {
            if m == layers.len() {
                layers.push((Region::empty(u.dim())?, Region::empty(u.dim())?));
            }
            if layers.len() > max_layers {
                return Err(Error::Precondition(format!(
                    "redundancy exceeds the allowed {max_layers} layers"
                )));
            }
            let fresh = rem.boolean(&layers[m].0, BoolOp::Difference)?;
            if !fresh.is_empty() {
                layers[m].0 = layers[m].0.boolean(&fresh, BoolOp::Union)?;
                let original = fresh.translate(&gz)?;
                layers[m].1 = layers[m].1.boolean(&original, BoolOp::Union)?;
                rem = rem.boolean(&fresh, BoolOp::Difference)?;
            }
            m += 1;
        }
    }
    Ok(layers)
}

/// Splits an M-redundantly packing region into M pieces, each packing by
/// translations (multiplicity layering with lexicographic tie-breaking).
pub fn redundant_partition(u: &Region, lat: &Lattice, m: usize) -> Result<Vec<Region>> {
    let layers = layer_reduction(u, lat, m)?;
    if layers.len() > m {
        return Err(Error::Precondition(format!(
            "actual redundancy {} exceeds declared {m}",
            layers.len()
        )));
    }
    let mut out: Vec<Region> = layers.into_iter().map(|(_, content)| content).collect();
    while out.len() < m {
        out.push(Region::empty(u.dim())?);
    }
    Ok(out)
}

/// Translation equivalency map `τ_U(V) = ⋃_γ (γ + V) ∩ U` over the finite
/// window of lattice vectors that can reach U from V.
pub fn tau_map(v: &Region, u: &Region, lat: &Lattice) -> Result<Region> {
    let g = rational_generators(lat)?;
    let (Some((ulo, uhi)), Some((vlo, vhi))) = (u.bbox(), v.bbox()) else {
        return Region::empty(v.dim());
    };
    // γ + V touches U only when γ ∈ [ulo − vhi, uhi − vlo].
    let lo: Vec<Q> = ulo.iter().zip(&vhi).map(|(a, b)| a - b).collect();
    let hi: Vec<Q> = uhi.iter().zip(&vlo).map(|(a, b)| a - b).collect();
    let ranges = coefficient_window(g, &lo, &hi)?;
    // Widen by one cell: the window above was derived for fundamental cells,
    // here γ itself must lie in the box.
    let ranges: Vec<(i64, i64)> = ranges.iter().map(|&(a, b)| (a - 1, b + 1)).collect();
    let mut out = Region::empty(v.dim())?;
    for z in iter_window(&ranges) {
        let zq: Vec<Q> = z.iter().map(|&x| crate::rat::q(x)).collect();
        let gz = g.mul_vec(&zq);
        let shifted = v.translate(&gz)?;
        let piece = shifted.boolean(u, BoolOp::Intersect)?;
        if !piece.is_empty() {
            out = out.boolean(&piece, BoolOp::Union)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qr};

    #[test]
    fn fundamental_domain_tiles() {
        let lat = Lattice::from_q_rows(vec![vec![q(2), q(1)], vec![q(0), q(1)]]).unwrap();
        let fd = fundamental_domain(&lat).unwrap();
        assert_eq!(fd.covolume, q(2));
        let rep = translation_check(&fd.region, &lat).unwrap();
        assert!(rep.packs && rep.covers, "{rep:?}");
    }

    #[test]
    fn double_interval_covers_with_excess() {
        // S = [0, 2) over ℤ: covers, fails pack with excess 1.
        let s = Region::interval(q(0), q(2));
        let rep = translation_check(&s, &Lattice::standard(1)).unwrap();
        assert!(!rep.packs);
        assert!(rep.covers);
        assert_eq!(rep.excess_volume, q(1));
        assert_eq!(rep.deficit_volume, q(0));
    }

    #[test]
    fn shannon_set_tiles_by_translations() {
        let s = Region::intervals(vec![(q(-1), qr(-1, 2)), (qr(1, 2), q(1))]);
        let rep = translation_check(&s, &Lattice::standard(1)).unwrap();
        assert!(rep.packs && rep.covers, "{rep:?}");
        assert!(rep.excess_volume.is_zero() && rep.deficit_volume.is_zero());
    }

    #[test]
    fn partial_square_packs_not_covers() {
        let s = Region::box2([q(0), q(0)], [qr(1, 2), q(1)]).unwrap();
        let rep = translation_check(&s, &Lattice::standard(2)).unwrap();
        assert!(rep.packs && !rep.covers);
        assert_eq!(rep.deficit_volume, qr(1, 2));
    }

    #[test]
    fn redundant_partition_interval() {
        // U = [0, 2), ℤ, M = 2 → layers [0,1) and [1,2).
        let u = Region::interval(q(0), q(2));
        let parts = redundant_partition(&u, &Lattice::standard(1), 2).unwrap();
        assert_eq!(parts.len(), 2);
        for p in &parts {
            assert_eq!(p.volume(), q(1));
            let rep = translation_check(p, &Lattice::standard(1)).unwrap();
            assert!(rep.packs);
        }
        let total: Q = parts.iter().map(|p| p.volume()).sum();
        assert_eq!(total, u.volume());
    }

    #[test]
    fn packing_region_single_layer() {
        let u = Region::interval(qr(1, 4), qr(3, 4));
        let parts = redundant_partition(&u, &Lattice::standard(1), 1).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].volume(), u.volume());
    }

    #[test]
    fn redundancy_exceeded_error() {
        let u = Region::interval(q(0), q(3));
        assert!(redundant_partition(&u, &Lattice::standard(1), 2).is_err());
    }

    #[test]
    fn overlapping_union_layers() {
        // U = [0, 3/2) ∪ [2, 5/2): the residue class [0, 1/2) is hit by the
        // translates 0, +1, and +2, so the multiplicity is 3 and the layers
        // have measures 1, 1/2, 1/2 (explicit reduction).
        let u = Region::intervals(vec![(q(0), qr(3, 2)), (q(2), qr(5, 2))]);
        assert!(redundant_partition(&u, &Lattice::standard(1), 2).is_err());
        let parts = redundant_partition(&u, &Lattice::standard(1), 3).unwrap();
        assert_eq!(parts[0].volume(), q(1));
        assert_eq!(parts[1].volume(), qr(1, 2));
        assert_eq!(parts[2].volume(), qr(1, 2));
        for p in &parts {
            assert!(translation_check(p, &Lattice::standard(1)).unwrap().packs);
        }
        let total: Q = parts.iter().map(|p| p.volume()).sum();
        assert_eq!(total, u.volume());
    }

    #[test]
    fn tau_map_properties() {
        let lat = Lattice::standard(1);
        // U = fundamental domain: τ_U is reduction mod Γ.
        let u = Region::interval(q(0), q(1));
        let v = Region::interval(qr(5, 2), qr(7, 2));
        let t = tau_map(&v, &u, &lat).unwrap();
        assert_eq!(t.volume(), q(1));
        // Idempotence: τ_U(τ_U(V)) = τ_U(V).
        let tt = tau_map(&t, &u, &lat).unwrap();
        assert_eq!(
            tt.boolean(&t, BoolOp::SymmetricDifference).unwrap().volume(),
            q(0)
        );
        // V ⊆ U packing: τ_U(V) ⊇ V.
        let small = Region::interval(qr(1, 4), qr(1, 2));
        let ts = tau_map(&small, &u, &lat).unwrap();
        assert_eq!(
            ts.boolean(&small, BoolOp::Intersect).unwrap().volume(),
            small.volume()
        );
        // |τ_U(V)| ≤ |V| when V packs.
        assert!(t.volume() <= v.volume());
    }

    #[test]
    fn multiplicity_counts() {
        assert_eq!(
            translation_multiplicity(&Region::interval(q(0), q(3)), &Lattice::standard(1))
                .unwrap(),
            3
        );
        assert_eq!(
            translation_multiplicity(
                &Region::interval(qr(1, 8), qr(3, 8)),
                &Lattice::standard(1)
            )
            .unwrap(),
            1
        );
    }
}
