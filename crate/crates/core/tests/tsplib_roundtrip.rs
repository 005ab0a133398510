//! Export -> render -> parse preserves the integer distance matrix.

use proptest::prelude::*;
use tetra_tsp_core::geometry::Point;
use tetra_tsp_core::instances::{build_modified, build_tetrahedron, build_three_lines};
use tetra_tsp_core::tsplib::{export_instance, TsplibFile, DEFAULT_SCALE};
use tetra_tsp_core::{Instance, Metric};

const MAX_N: usize = 400;

/// Integer EUC_2D matrix of the parsed file, computed here from the text's
/// coordinates: `floor(sqrt(dx^2 + dy^2) + 0.5)`.
fn matrix_from_file(f: &TsplibFile) -> Vec<i64> {
    let n = f.nodes.len();
    let mut d = vec![0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = f.nodes[i].x - f.nodes[j].x;
            let dy = f.nodes[i].y - f.nodes[j].y;
            let v = ((dx * dx + dy * dy).sqrt() + 0.5).floor() as i64;
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

fn check(inst: &Instance) {
    let exported = export_instance(inst, DEFAULT_SCALE).unwrap();
    let parsed = TsplibFile::parse(&exported.render()).unwrap();
    assert_eq!(parsed, exported, "{}", inst.name());
    assert_eq!(parsed.dimension, inst.len());
    let m = matrix_from_file(&parsed);
    assert_eq!(parsed.distance_matrix(), m, "{}", inst.name());
    // the rounded metric on the unscaled instance sees the same matrix
    // (spot-checked on the smaller instances to keep the sweep fast)
    let n = inst.len();
    if n > 100 {
        return;
    }
    let direct = inst.distance_matrix(Metric::TSPLIB);
    assert!(
        (0..n * n).all(|k| direct[k] == m[k] as f64),
        "{}",
        inst.name()
    );
}

#[test]
fn every_generated_instance_up_to_400_vertices() {
    let mut count = 0;
    for n in 2..=MAX_N / 3 {
        for m in 1.. {
            if 3 * (n + m) - 2 > MAX_N {
                break;
            }
            check(&build_tetrahedron(n, m).unwrap());
            count += 1;
            if let Ok(inst) = build_modified(n, m) {
                if inst.len() <= MAX_N {
                    check(&inst);
                    count += 1;
                }
            }
        }
    }
    for n in 1..=MAX_N / 3 {
        for d in [0.1, 0.5, 1.0, 2.5] {
            check(&build_three_lines(n, d).unwrap());
            count += 1;
        }
    }
    assert!(count > 8000, "{count}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn imported_points_round_trip(
        pts in proptest::collection::vec((-1e5f64..1e5, -1e5f64..1e5), 3..40)
    ) {
        let inst = Instance::imported(
            "random",
            pts.iter().map(|&(x, y)| Point::new(x, y)).collect(),
        ).unwrap();
        check(&inst);
    }
}
