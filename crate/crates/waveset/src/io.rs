//! JSON / CSV / SVG interchange.
//!
//! Matrices are row-major JSON arrays, either of strings ("p/q" rationals)
//! in rational mode or of numbers in float mode; lattices are given by basis
//! rows in the same scalar convention; regions are piece lists of rational
//! vertex arrays.  All writers are deterministic: identical inputs produce
//! byte-identical output.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::existence::Verdict;
use crate::lattice::{CountSeries, Lattice, Subspace};
use crate::linalg::{Matrix, QMatrix};
use crate::rat::{fmt_q, parse_q, q_to_f64, Q};
use crate::regions::Region;

// ---------------------------------------------------------------------------
// Matrices and lattices
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct MatrixJson {
    pub mode: String,
    pub rows: Vec<Vec<Value>>,
}

fn rows_to_q(rows: &[Vec<Value>]) -> Result<Vec<Vec<Q>>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|v| match v {
                    Value::String(s) => parse_q(s),
                    Value::Number(x) => {
                        // Integers are exact; reject non-integer numbers in
                        // rational mode to avoid silent precision loss.
                        if let Some(i) = x.as_i64() {
                            Ok(Q::from_integer(i.into()))
                        } else {
                            Err(Error::InvalidInput(format!(
                                "rational mode needs string or integer entries, got {x}"
                            )))
                        }
                    }
                    other => Err(Error::InvalidInput(format!("bad rational entry: {other}"))),
                })
                .collect()
        })
        .collect()
}

fn rows_to_f64(rows: &[Vec<Value>]) -> Result<Vec<Vec<f64>>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|v| {
                    v.as_f64().ok_or_else(|| {
                        Error::InvalidInput(format!("float mode needs numeric entries, got {v}"))
                    })
                })
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(mj: &MatrixJson) -> Result<Matrix> {
    match mj.mode.as_str() {
        "rational" => {
            let rows = rows_to_q(&mj.rows)?;
            Matrix::from_q(QMatrix::from_rows(rows)?)
        }
        "float" => Matrix::from_f64_rows(rows_to_f64(&mj.rows)?),
        other => Err(Error::InvalidInput(format!(
            "matrix mode must be \"rational\" or \"float\", got {other:?}"
        ))),
    }
}

pub fn matrix_to_json(m: &Matrix) -> MatrixJson {
    match m {
        Matrix::Rational(mq) => MatrixJson {
            mode: "rational".into(),
            rows: (0..mq.nrows())
                .map(|r| {
                    (0..mq.ncols())
                        .map(|c| Value::String(fmt_q(mq.at(r, c))))
                        .collect()
                })
                .collect(),
        },
        Matrix::Float(mf) => MatrixJson {
            mode: "float".into(),
            rows: (0..mf.nrows())
                .map(|r| {
                    (0..mf.ncols())
                        .map(|c| serde_json::json!(mf[(r, c)]))
                        .collect()
                })
                .collect(),
        },
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct LatticeJson {
    pub mode: String,
    pub basis: Vec<Vec<Value>>,
}

pub fn lattice_from_json(lj: &LatticeJson) -> Result<Lattice> {
    match lj.mode.as_str() {
        "rational" => Lattice::from_q_rows(rows_to_q(&lj.basis)?),
        "float" => {
            let rows = rows_to_f64(&lj.basis)?;
            Lattice::from_rows(&Matrix::from_f64_rows(rows)?)
        }
        other => Err(Error::InvalidInput(format!(
            "lattice mode must be \"rational\" or \"float\", got {other:?}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct RegionPieceJson {
    pub vertices: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct RegionJson {
    pub dim: usize,
    pub pieces: Vec<RegionPieceJson>,
}

pub fn region_from_json(rj: &RegionJson) -> Result<Region> {
    let mut region = Region::empty(rj.dim)?;
    for piece in &rj.pieces {
        let verts: Vec<Vec<Q>> = piece
            .vertices
            .iter()
            .map(|v| v.iter().map(|s| parse_q(s)).collect::<Result<Vec<Q>>>())
            .collect::<Result<Vec<_>>>()?;
        if verts.iter().any(|v| v.len() != rj.dim) {
            return Err(Error::DimensionMismatch(
                "vertex length differs from region dimension".into(),
            ));
        }
        let piece_region = match rj.dim {
            1 => {
                if verts.len() != 2 {
                    return Err(Error::InvalidInput(
                        "1-D pieces are two endpoint vertices".into(),
                    ));
                }
                let (a, b) = (verts[0][0].clone(), verts[1][0].clone());
                if a < b {
                    Region::interval(a, b)
                } else {
                    Region::interval(b, a)
                }
            }
            2 => Region::polygon(verts.iter().map(|v| [v[0].clone(), v[1].clone()]).collect())?,
            3 => {
                let lo: Vec<Q> = (0..3)
                    .map(|k| verts.iter().map(|v| v[k].clone()).min().unwrap())
                    .collect();
                let hi: Vec<Q> = (0..3)
                    .map(|k| verts.iter().map(|v| v[k].clone()).max().unwrap())
                    .collect();
                if verts.len() != 8 {
                    return Err(Error::Unsupported(
                        "3-D pieces are axis boxes given by their 8 corners".into(),
                    ));
                }
                for v in &verts {
                    for k in 0..3 {
                        if v[k] != lo[k] && v[k] != hi[k] {
                            return Err(Error::Unsupported(
                                "3-D pieces must be axis-aligned boxes".into(),
                            ));
                        }
                    }
                }
                Region::box3(
                    [lo[0].clone(), lo[1].clone(), lo[2].clone()],
                    [hi[0].clone(), hi[1].clone(), hi[2].clone()],
                )?
            }
            d => return Err(Error::Unsupported(format!("dimension {d}"))),
        };
        region = region.boolean(&piece_region, crate::regions::BoolOp::Union)?;
    }
    Ok(region)
}

pub fn region_to_json(r: &Region) -> RegionJson {
    let pieces = match r {
        Region::D1(v) => v
            .iter()
            .map(|(a, b)| RegionPieceJson {
                vertices: vec![vec![fmt_q(a)], vec![fmt_q(b)]],
            })
            .collect(),
        Region::D2(v) => v
            .iter()
            .map(|p| RegionPieceJson {
                vertices: p
                    .vertices()
                    .iter()
                    .map(|q| vec![fmt_q(&q[0]), fmt_q(&q[1])])
                    .collect(),
            })
            .collect(),
        Region::D3(v) => v
            .iter()
            .map(|b| {
                let mut verts = Vec::new();
                for c in 0..8usize {
                    verts.push(
                        (0..3)
                            .map(|k| {
                                if c >> k & 1 == 1 {
                                    fmt_q(&b.hi[k])
                                } else {
                                    fmt_q(&b.lo[k])
                                }
                            })
                            .collect(),
                    );
                }
                RegionPieceJson { vertices: verts }
            })
            .collect(),
    };
    RegionJson {
        dim: r.dim(),
        pieces,
    }
}

// ---------------------------------------------------------------------------
// Problem specification
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Deserialize)]
pub struct SubspaceJson {
    pub rows: Vec<Vec<Value>>,
    #[serde(default)]
    pub mode: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ProblemSpecJson {
    pub matrix: MatrixJson,
    pub lattice: LatticeJson,
    #[serde(default)]
    pub radius: Option<String>,
    #[serde(default)]
    pub jmax: Option<u32>,
    #[serde(default)]
    pub subspaces: Vec<SubspaceJson>,
}

/// A parsed problem instance.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub matrix: Matrix,
    pub lattice: Lattice,
    pub radius: Q,
    pub jmax: u32,
    pub subspaces: Vec<Subspace>,
}

pub fn parse_problem_spec(text: &str) -> Result<ProblemSpec> {
    let pj: ProblemSpecJson = serde_json::from_str(text)?;
    let matrix = matrix_from_json(&pj.matrix)?;
    let lattice = lattice_from_json(&pj.lattice)?;
    if matrix.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch(
            "matrix and lattice dimensions differ".into(),
        ));
    }
    let radius = match &pj.radius {
        Some(s) => {
            let r = parse_q(s)?;
            if !r.is_positive() {
                return Err(Error::InvalidInput("radius must be positive".into()));
            }
            r
        }
        None => Q::from_integer(1.into()),
    };
    let mut subspaces = Vec::new();
    for sj in &pj.subspaces {
        let mode = sj.mode.as_deref().unwrap_or("rational");
        let s = match mode {
            "rational" => Subspace::from_q_rows(rows_to_q(&sj.rows)?)?,
            "float" => Subspace::from_f64_rows(rows_to_f64(&sj.rows)?)?,
            other => {
                return Err(Error::InvalidInput(format!(
                    "subspace mode must be \"rational\" or \"float\", got {other:?}"
                )))
            }
        };
        if s.ambient_dim() != matrix.dim() {
            return Err(Error::DimensionMismatch(
                "subspace ambient dimension differs from matrix".into(),
            ));
        }
        subspaces.push(s);
    }
    Ok(ProblemSpec {
        matrix,
        lattice,
        radius,
        jmax: pj.jmax.unwrap_or(20),
        subspaces,
    })
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mj: MatrixJson = serde_json::from_str(text)?;
    matrix_from_json(&mj)
}

pub fn parse_lattice(text: &str) -> Result<Lattice> {
    let lj: LatticeJson = serde_json::from_str(text)?;
    lattice_from_json(&lj)
}

pub fn parse_region(text: &str) -> Result<Region> {
    let rj: RegionJson = serde_json::from_str(text)?;
    region_from_json(&rj)
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub seed: u64,
    pub verdict: Verdict,
    pub exit_code: i32,
    /// Paths of files written next to the report, when an output directory
    /// was given.
    pub artifacts: Vec<String>,
}

pub fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// CSV columns (j, N_j, 1/N_j, partial_sum).
pub fn count_series_csv(s: &CountSeries) -> String {
    let mut out = String::from("j,N_j,inv_N_j,partial_sum\n");
    let mut acc = 0.0f64;
    for &(j, n) in &s.entries {
        let inv = 1.0 / n as f64;
        acc += inv;
        out.push_str(&format!("{j},{n},{inv:.15e},{acc:.15e}\n"));
    }
    out
}

/// CSV for the inner-recursion trace.
pub fn build_trace_csv(t: &crate::construct::BuildTrace) -> String {
    let mut out = String::from(
        "j,residual,redundancy,new_piece,sym_diff,d_sym_diff,cum_sym_diff,cum_d_sym_diff,decay_ok,term_bound_ok\n",
    );
    for r in &t.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.j,
            fmt_q(&r.residual),
            r.redundancy,
            fmt_q(&r.new_piece),
            fmt_q(&r.sym_diff),
            fmt_q(&r.d_sym_diff),
            fmt_q(&r.cum_sym_diff),
            fmt_q(&r.cum_d_sym_diff),
            r.decay_ok,
            r.term_bound_ok
        ));
    }
    out
}

pub fn outer_trace_csv(rows: &[crate::construct::OuterTraceRow]) -> String {
    let mut out = String::from("k,deficit,new_piece,exchange_mass,exchange_budget,sym_diff\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.k,
            fmt_q(&r.deficit),
            fmt_q(&r.new_piece),
            fmt_q(&r.exchange_mass),
            fmt_q(&r.exchange_budget),
            fmt_q(&r.sym_diff)
        ));
    }
    out
}

pub fn csb_trace_csv(rows: &[crate::construct::CsbTraceRow]) -> String {
    let mut out = String::from("iteration,deficit,moved\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            r.iteration,
            fmt_q(&r.deficit),
            fmt_q(&r.moved)
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// SVG rendering (dims 1–2)
// ---------------------------------------------------------------------------

/// Renders a region as a standalone SVG document.
pub fn region_svg(r: &Region) -> Result<String> {
    let Some((lo, hi)) = r.bbox() else {
        return Ok(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"100\" height=\"40\"/>\n".into(),
        );
    };
    match r {
        Region::D1(spans) => {
            let x0 = q_to_f64(&lo[0]);
            let x1 = q_to_f64(&hi[0]);
            let w = (x1 - x0).max(1e-9);
            let scale = 560.0 / w;
            let mut s = String::from(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"60\" viewBox=\"0 0 600 60\">\n",
            );
            s.push_str("  <line x1=\"20\" y1=\"30\" x2=\"580\" y2=\"30\" stroke=\"#888\"/>\n");
            for (a, b) in spans {
                let xa = 20.0 + (q_to_f64(a) - x0) * scale;
                let xb = 20.0 + (q_to_f64(b) - x0) * scale;
                s.push_str(&format!(
                    "  <rect x=\"{:.3}\" y=\"18\" width=\"{:.3}\" height=\"24\" fill=\"#4477aa\" fill-opacity=\"0.7\"/>\n",
                    xa,
                    (xb - xa).max(0.5)
                ));
            }
            s.push_str("</svg>\n");
            Ok(s)
        }
        Region::D2(polys) => {
            let x0 = q_to_f64(&lo[0]);
            let y0 = q_to_f64(&lo[1]);
            let w = (q_to_f64(&hi[0]) - x0).max(1e-9);
            let h = (q_to_f64(&hi[1]) - y0).max(1e-9);
            let scale = (560.0 / w).min(560.0 / h);
            let mut s = String::from(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n",
            );
            for p in polys {
                let pts: Vec<String> = p
                    .vertices()
                    .iter()
                    .map(|v| {
                        let x = 20.0 + (q_to_f64(&v[0]) - x0) * scale;
                        let y = 580.0 - (q_to_f64(&v[1]) - y0) * scale;
                        format!("{x:.3},{y:.3}")
                    })
                    .collect();
                s.push_str(&format!(
                    "  <polygon points=\"{}\" fill=\"#4477aa\" fill-opacity=\"0.6\" stroke=\"#223355\" stroke-width=\"0.8\"/>\n",
                    pts.join(" ")
                ));
            }
            s.push_str("</svg>\n");
            Ok(s)
        }
        Region::D3(_) => Err(Error::Unsupported(
            "SVG rendering covers dimensions 1–2".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qr};
    use crate::regions::BoolOp;
    use num_traits::Zero;

    #[test]
    fn matrix_roundtrip() {
        let text = r#"{"mode":"rational","rows":[["2","0"],["0","1/2"]]}"#;
        let m = parse_matrix(text).unwrap();
        let mq = m.as_q().unwrap();
        assert_eq!(mq.at(1, 1), &qr(1, 2));
        let back = matrix_to_json(&m);
        let m2 = matrix_from_json(&back).unwrap();
        assert_eq!(m, m2);
        // Floats in rational mode are rejected.
        assert!(parse_matrix(r#"{"mode":"rational","rows":[[0.5]]}"#).is_err());
        // Malformed JSON is a parse error.
        assert!(parse_matrix("{not json").is_err());
    }

    #[test]
    fn float_matrix_and_lattice() {
        let m = parse_matrix(r#"{"mode":"float","rows":[[1.0,0.0],[1.4142135623730951,1.0]]}"#)
            .unwrap();
        assert!(!m.is_rational());
        let l =
            parse_lattice(r#"{"mode":"float","basis":[[1.0,0.0],[1.4142135623730951,1.0]]}"#)
                .unwrap();
        assert_eq!(l.dim(), 2);
    }

    #[test]
    fn region_roundtrip_2d() {
        let r = Region::box2([q(0), q(0)], [q(1), qr(1, 2)]).unwrap();
        let j = region_to_json(&r);
        let r2 = region_from_json(&j).unwrap();
        assert!(r
            .boolean(&r2, BoolOp::SymmetricDifference)
            .unwrap()
            .volume()
            .is_zero());
    }

    #[test]
    fn region_roundtrip_1d_and_3d() {
        let r = Region::intervals(vec![(q(-1), qr(-1, 2)), (qr(1, 2), q(1))]);
        let j = serde_json::to_string(&region_to_json(&r)).unwrap();
        let r2 = parse_region(&j).unwrap();
        assert_eq!(r, r2);

        let b = Region::box3([q(0), q(0), q(0)], [q(1), q(2), q(3)]).unwrap();
        let j3 = region_to_json(&b);
        let b2 = region_from_json(&j3).unwrap();
        assert!(b
            .boolean(&b2, BoolOp::SymmetricDifference)
            .unwrap()
            .volume()
            .is_zero());
        // Non-box 3-D vertex soup is rejected.
        let bad = r#"{"dim":3,"pieces":[{"vertices":[["0","0","0"],["1","0","0"],["0","1","0"],["0","0","1"],["1","1","0"],["1","0","1"],["0","1","1"],["2","1","1"]]}]}"#;
        assert!(parse_region(bad).is_err());
    }

    #[test]
    fn problem_spec_parses() {
        let text = r#"{
            "matrix": {"mode":"rational","rows":[["2","0"],["0","1/2"]]},
            "lattice": {"mode":"rational","basis":[["1","0"],["0","1"]]},
            "radius": "1",
            "jmax": 12,
            "subspaces": [{"rows": [["0","1"]]}]
        }"#;
        let spec = parse_problem_spec(text).unwrap();
        assert_eq!(spec.jmax, 12);
        assert_eq!(spec.subspaces.len(), 1);
        let bad = r#"{
            "matrix": {"mode":"rational","rows":[["2"]]},
            "lattice": {"mode":"rational","basis":[["1","0"],["0","1"]]}
        }"#;
        assert!(parse_problem_spec(bad).is_err());
    }

    #[test]
    fn csv_and_svg_deterministic() {
        let s = CountSeries {
            entries: vec![(1, 5), (2, 9)],
            radius: Q::from_integer(1.into()),
            truncated_at: None,
            matrix_desc: String::new(),
            lattice_desc: String::new(),
        };
        let c1 = count_series_csv(&s);
        let c2 = count_series_csv(&s);
        assert_eq!(c1, c2);
        assert!(c1.starts_with("j,N_j,inv_N_j,partial_sum\n1,5,"));
        let r = Region::intervals(vec![(q(-1), q(1))]);
        assert_eq!(region_svg(&r).unwrap(), region_svg(&r).unwrap());
        let r2 = Region::box2([q(0), q(0)], [q(1), q(1)]).unwrap();
        assert!(region_svg(&r2).unwrap().contains("<polygon"));
    }
}
