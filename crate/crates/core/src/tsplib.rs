//! TSPLIB `EUC_2D` files.
//!
//! Exported files scale coordinates (10000 by default), round half away from
//! zero and write integers. The header is always `NAME`, `TYPE`, `DIMENSION`,
//! `EDGE_WEIGHT_TYPE`, `NODE_COORD_SECTION`, then the rows and `EOF`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::{nint, round_coord, Point};
use crate::instances::Instance;

pub const DEFAULT_SCALE: u32 = 10_000;

/// Largest absolute coordinate written to a file.
pub const COORD_LIMIT: f64 = i32::MAX as f64;

#[derive(Debug, Clone, PartialEq)]
pub struct TsplibNode {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsplibFile {
    pub name: String,
    pub dimension: usize,
    pub nodes: Vec<TsplibNode>,
}

/// Scales and rounds every coordinate of `inst`.
pub fn export_instance(inst: &Instance, scale: u32) -> Result<TsplibFile> {
    if scale == 0 {
        return Err(Error::Precondition(String::from(
            "scale must be at least 1",
        )));
    }
    let s = f64::from(scale);
    let mut nodes = Vec::with_capacity(inst.len());
    for (i, (label, p)) in inst.vertices().iter().enumerate() {
        let (x, y) = (round_coord(p.x * s), round_coord(p.y * s));
        if !(x.abs() <= COORD_LIMIT && y.abs() <= COORD_LIMIT) {
            return Err(Error::Overflow(format!(
                "vertex {label} scaled by {scale} gives ({x}, {y}), outside +-{COORD_LIMIT}"
            )));
        }
        nodes.push(TsplibNode { id: i + 1, x, y });
    }
    Ok(TsplibFile {
        name: inst.name().to_string(),
        dimension: nodes.len(),
        nodes,
    })
}

/// TSPLIB `EUC_2D` weight between two integer points.
pub fn euc2d_distance(p: (i64, i64), q: (i64, i64)) -> i64 {
    let dx = (p.0 - q.0) as f64;
    let dy = (p.1 - q.1) as f64;
    nint(libm::sqrt(dx * dx + dy * dy)) as i64
}

fn write_coord(out: &mut String, v: f64) {
    if v == libm::trunc(v) && v.abs() < 9.0e15 {
        let _ = write!(out, "{}", v as i64);
    } else {
        let _ = write!(out, "{v}");
    }
}

impl TsplibFile {
    /// The file text, ASCII, newline-terminated.
    pub fn render(&self) -> String {
        let mut out = String::with_capacity(64 + 24 * self.nodes.len());
        let _ = writeln!(out, "NAME: {}", self.name);
        out.push_str("TYPE: TSP\n");
        let _ = writeln!(out, "DIMENSION: {}", self.dimension);
        out.push_str("EDGE_WEIGHT_TYPE: EUC_2D\n");
        out.push_str("NODE_COORD_SECTION\n");
        for node in &self.nodes {
            let _ = write!(out, "{} ", node.id);
            write_coord(&mut out, node.x);
            out.push(' ');
            write_coord(&mut out, node.y);
            out.push('\n');
        }
        out.push_str("EOF\n");
        out
    }

    /// Integer coordinates, or `None` if any coordinate is fractional.
    pub fn integer_coords(&self) -> Option<Vec<(i64, i64)>> {
        self.nodes
            .iter()
            .map(|n| {
                (n.x == libm::trunc(n.x) && n.y == libm::trunc(n.y))
                    .then_some((n.x as i64, n.y as i64))
            })
            .collect()
    }

    /// Full `EUC_2D` weight matrix, row-major. Fractional coordinates use the
    /// unrounded point distance before `nint`, as TSPLIB does.
    pub fn distance_matrix(&self) -> Vec<i64> {
        let n = self.nodes.len();
        let mut d = alloc::vec![0i64; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (&self.nodes[i], &self.nodes[j]);
                let v = nint(Point::new(a.x, a.y).dist(Point::new(b.x, b.y))) as i64;
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        d
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = String::new();
        let mut dimension: Option<usize> = None;
        let mut weight_type: Option<String> = None;
        let mut lines = text.lines().enumerate();
        let mut section: Option<String> = None;
        for (no, raw) in lines.by_ref() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line == "EOF" {
                break;
            }
            let Some((key, value)) = line.split_once(':') else {
                if line.ends_with("SECTION") {
                    section = Some(line.to_string());
                    break;
                }
                return Err(Error::Parse {
                    line: no + 1,
                    msg: format!("expected `KEY: VALUE`, got `{line}`"),
                });
            };
            let value = value.trim();
            match key.trim() {
                "NAME" => name = value.to_string(),
                "TYPE" => {
                    if value != "TSP" {
                        return Err(Error::Unsupported(format!("TYPE {value}")));
                    }
                }
                "DIMENSION" => {
                    dimension = Some(value.parse().map_err(|_| Error::Parse {
                        line: no + 1,
                        msg: format!("bad DIMENSION `{value}`"),
                    })?)
                }
                "EDGE_WEIGHT_TYPE" => weight_type = Some(value.to_string()),
                key if key.ends_with("SECTION") => {
                    section = Some(key.to_string());
                    break;
                }
                _ => {}
            }
        }
        match weight_type.as_deref() {
            Some("EUC_2D") => {}
            Some(other) => {
                return Err(Error::Unsupported(format!(
                    "EDGE_WEIGHT_TYPE {other} is unsupported (only EUC_2D)"
                )))
            }
            None => {
                return Err(Error::Parse {
                    line: 0,
                    msg: String::from("missing EDGE_WEIGHT_TYPE"),
                })
            }
        }
        let dimension = dimension.ok_or(Error::Parse {
            line: 0,
            msg: String::from("missing DIMENSION"),
        })?;
        match section.as_deref() {
            Some("NODE_COORD_SECTION") => {}
            Some(other) => return Err(Error::Unsupported(format!("section {other}"))),
            None => {
                return Err(Error::Parse {
                    line: 0,
                    msg: String::from("missing NODE_COORD_SECTION"),
                })
            }
        }
        let mut nodes = Vec::with_capacity(dimension);
        for (no, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line == "EOF" {
                break;
            }
            let bad = |msg: String| Error::Parse { line: no + 1, msg };
            let mut fields = line.split_whitespace();
            let (Some(id), Some(x), Some(y), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(bad(format!("expected `id x y`, got `{line}`")));
            };
            let id: usize = id.parse().map_err(|_| bad(format!("bad node id `{id}`")))?;
            let x: f64 = x.parse().map_err(|_| bad(format!("bad x `{x}`")))?;
            let y: f64 = y.parse().map_err(|_| bad(format!("bad y `{y}`")))?;
            if id != nodes.len() + 1 {
                return Err(bad(format!(
                    "node ids must be 1..{dimension} in order, got {id}"
                )));
            }
            if !(x.is_finite() && y.is_finite()) {
                return Err(bad(String::from("non-finite coordinate")));
            }
            nodes.push(TsplibNode { id, x, y });
        }
        if nodes.len() != dimension {
            return Err(Error::Parse {
                line: 0,
                msg: format!(
                    "DIMENSION is {dimension} but {} rows were read",
                    nodes.len()
                ),
            });
        }
        Ok(Self {
            name,
            dimension,
            nodes,
        })
    }

    /// An imported instance with the file coordinates as points.
    pub fn to_instance(&self) -> Result<Instance> {
        let name = if self.name.is_empty() {
            "imported"
        } else {
            self.name.as_str()
        };
        Instance::imported(
            name,
            self.nodes.iter().map(|n| Point::new(n.x, n.y)).collect(),
        )
    }
}

/// Parses EUC_2D text into an imported instance.
pub fn parse_tsplib(text: &str) -> Result<Instance> {
    TsplibFile::parse(text)?.to_instance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{build_tetrahedron, build_three_lines};

    #[test]
    fn t95_export_header_and_rows() {
        let inst = build_tetrahedron(9, 5).unwrap();
        let file = export_instance(&inst, DEFAULT_SCALE).unwrap();
        assert_eq!(file.dimension, 40);
        let text = file.render();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("NAME: tetra_9_5"));
        assert_eq!(lines.next(), Some("TYPE: TSP"));
        assert_eq!(lines.next(), Some("DIMENSION: 40"));
        assert_eq!(lines.next(), Some("EDGE_WEIGHT_TYPE: EUC_2D"));
        assert_eq!(lines.next(), Some("NODE_COORD_SECTION"));
        assert_eq!(lines.next(), Some("1 0 0"));
        assert!(text.ends_with("EOF\n"));
        assert!(text.is_ascii());
    }

    #[test]
    fn third_rounds_down() {
        let inst = Instance::imported("t", alloc::vec![Point::new(1.0 / 3.0, 0.0)]).unwrap();
        let file = export_instance(&inst, DEFAULT_SCALE).unwrap();
        assert_eq!(file.nodes[0].x, 3333.0);
        let inst = Instance::imported("t", alloc::vec![Point::new(-0.00005, 0.00005)]).unwrap();
        let file = export_instance(&inst, DEFAULT_SCALE).unwrap();
        assert_eq!((file.nodes[0].x, file.nodes[0].y), (-1.0, 1.0));
    }

    #[test]
    fn overflow_is_reported() {
        let inst = build_three_lines(3, 1.0e6).unwrap();
        assert!(matches!(
            export_instance(&inst, DEFAULT_SCALE),
            Err(Error::Overflow(_))
        ));
        assert!(export_instance(&inst, 0).is_err());
    }

    #[test]
    fn euc2d_examples() {
        assert_eq!(euc2d_distance((0, 0), (3, 4)), 5);
        assert_eq!(euc2d_distance((0, 0), (1, 1)), 1);
        assert_eq!(euc2d_distance((0, 0), (10_000, 0)), 10_000);
        // 0.5 rounds up
        assert_eq!(euc2d_distance((0, 0), (0, 0)), 0);
    }

    #[test]
    fn parse_without_eof_and_with_spaces() {
        let text = "NAME : tiny\nCOMMENT : hand made\nTYPE : TSP\nDIMENSION : 3\n\
                    EDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 3 0\n3 0 4\n";
        let inst = parse_tsplib(text).unwrap();
        assert_eq!(inst.len(), 3);
        assert_eq!(inst.name(), "tiny");
        assert_eq!(inst.point(2), Point::new(0.0, 4.0));
    }

    #[test]
    fn parse_errors() {
        let explicit = "NAME: x\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\n\
                        EDGE_WEIGHT_SECTION\n1 2 3\nEOF\n";
        let err = parse_tsplib(explicit).unwrap_err();
        assert!(matches!(err, Error::Unsupported(ref m) if m.contains("unsupported")));

        let short = "NAME: x\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n";
        assert!(matches!(parse_tsplib(short), Err(Error::Parse { .. })));

        let garbled =
            "NAME: x\nDIMENSION: 1\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 zero 0\n";
        assert!(matches!(
            parse_tsplib(garbled),
            Err(Error::Parse { line: 5, .. })
        ));

        let unordered =
            "DIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n2 0 0\n1 1 1\n";
        assert!(parse_tsplib(unordered).is_err());
    }

    #[test]
    fn round_trip_t95() {
        let inst = build_tetrahedron(9, 5).unwrap();
        let file = export_instance(&inst, DEFAULT_SCALE).unwrap();
        let back = TsplibFile::parse(&file.render()).unwrap();
        assert_eq!(back, file);
        let again = export_instance(&back.to_instance().unwrap(), 1).unwrap();
        assert_eq!(again.integer_coords(), file.integer_coords());
    }
}
