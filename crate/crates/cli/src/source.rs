//! Resolving an instance from a TSPLIB path or from `--n/--m`.
//!
//! A file written by `generate` is recognized by its name and coordinates and
//! rebuilt with exact (unscaled) coordinates, so closed forms and structural
//! checks apply to it. Anything else is loaded as an imported point set in
//! file units.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use tetra_tsp_core::instances::{
    build_modified, build_modified_forced, build_tetrahedron, build_three_lines,
};
use tetra_tsp_core::tsplib::{export_instance, TsplibFile};
use tetra_tsp_core::{Error, Instance, Metric};

#[derive(Debug, Clone)]
pub struct Loaded {
    pub inst: Instance,
    /// True for generated families (coordinates in base-edge units).
    pub structured: bool,
}

impl Loaded {
    /// The EUC_2D view: generated families are scaled like their export,
    /// imported files are already in integer units.
    pub fn euc2d(&self, scale: u32) -> Metric {
        if self.structured {
            Metric::Euc2dRounded { scale }
        } else {
            Metric::Euc2dRounded { scale: 1 }
        }
    }
}

pub fn read_tsplib(path: &Path) -> Result<TsplibFile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    TsplibFile::parse(&text).with_context(|| format!("in {}", path.display()))
}

pub fn load_path(path: &Path, scale: u32) -> Result<Loaded> {
    let file = read_tsplib(path)?;
    if let Some(inst) = recognize(&file, scale) {
        return Ok(Loaded {
            inst,
            structured: true,
        });
    }
    Ok(Loaded {
        inst: file.to_instance()?,
        structured: false,
    })
}

/// `T'(n,m)`, or the sub-threshold drawing variant when `force` is set.
pub fn modified(n: usize, m: usize, force: bool, i0: Option<usize>) -> Result<Instance> {
    if force || i0.is_some() {
        Ok(build_modified_forced(n, m, i0)?)
    } else {
        Ok(build_modified(n, m)?)
    }
}

/// Rebuilds a generated instance whose export at `scale` reproduces `file`.
pub fn recognize(file: &TsplibFile, scale: u32) -> Option<Instance> {
    let (family, rest) = file.name.split_once('_')?;
    let (a, b) = rest.split_once('_')?;
    let candidate = match family {
        "tetra" => build_tetrahedron(a.parse().ok()?, b.parse().ok()?).ok()?,
        "tetramod" => {
            let (n, m): (usize, usize) = (a.parse().ok()?, b.parse().ok()?);
            // N = 3n + 3(m - i0) + 1 fixes i0
            let internal = file.dimension.checked_sub(3 * n + 1)?;
            if internal % 3 != 0 || internal / 3 >= m {
                return None;
            }
            let i0 = m - internal / 3;
            match build_modified(n, m) {
                Ok(inst) if inst.i0() == Some(i0) => inst,
                _ => build_modified_forced(n, m, Some(i0)).ok()?,
            }
        }
        "lines" => build_three_lines(a.parse().ok()?, b.replace('p', ".").parse().ok()?).ok()?,
        _ => return None,
    };
    let exported = export_instance(&candidate, scale).ok()?;
    (exported.nodes == file.nodes).then_some(candidate)
}

/// Instance given either as a path or as `T'(n,m)` parameters.
pub fn resolve(
    path: Option<&Path>,
    n: Option<usize>,
    m: Option<usize>,
    force: bool,
    i0: Option<usize>,
    scale: u32,
) -> Result<Loaded> {
    match (path, n, m) {
        (Some(p), None, None) => load_path(p, scale),
        (None, Some(n), Some(m)) => Ok(Loaded {
            inst: modified(n, m, force, i0)?,
            structured: true,
        }),
        _ => Err(
            Error::Precondition("give either an instance file or both --n and --m".into()).into(),
        ),
    }
}
