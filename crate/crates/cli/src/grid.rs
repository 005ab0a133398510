//! Integer list syntax for grid flags: `40,48,60`, `40..80:20`, or a mix.

use anyhow::{bail, Context, Result};

/// Parses comma-separated items, each a number or an inclusive range
/// `lo..hi` with optional `:step` (default 1).
pub fn parse_list(spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, rest)) = item.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((hi, step)) => (hi, step),
                None => (rest, "1"),
            };
            let lo: usize = num(lo, item)?;
            let hi: usize = num(hi, item)?;
            let step: usize = num(step, item)?;
            if step == 0 {
                bail!("step must be positive in `{item}`");
            }
            if lo > hi {
                bail!("empty range `{item}`");
            }
            out.extend((lo..=hi).step_by(step));
        } else {
            out.push(num(item, item)?);
        }
    }
    Ok(out)
}

fn num(tok: &str, item: &str) -> Result<usize> {
    tok.trim()
        .parse()
        .with_context(|| format!("`{tok}` in `{item}` is not a nonnegative integer"))
}
