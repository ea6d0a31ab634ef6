//! Mask file formats.
//!
//! Text: a header `nx ny h` (followed by `ox oy` when the origin is not
//! `(0, 0)`), then `ny` rows of `0`/`1`, top row (`j = ny - 1`) first.
//! JSON: `{"nx", "ny", "h", "origin", "rows"}` with the same rows.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::grid::GridSpec;
use crate::domain::mask::DomainMask;
use crate::error::{Error, Result};

fn rows(mask: &DomainMask) -> Vec<String> {
    let g = mask.grid();
    (0..g.ny)
        .rev()
        .map(|j| {
            (0..g.nx)
                .map(|i| if mask.is_active(g.index(i, j)) { '1' } else { '0' })
                .collect()
        })
        .collect()
}

fn from_rows(grid: GridSpec, rows: &[&str]) -> Result<DomainMask> {
    grid.validate()?;
    if rows.len() != grid.ny {
        return Err(Error::Parse(format!("expected {} rows, got {}", grid.ny, rows.len())));
    }
    let mut active = vec![false; grid.len()];
    for (r, row) in rows.iter().enumerate() {
        let j = grid.ny - 1 - r;
        if row.len() != grid.nx {
            return Err(Error::Parse(format!(
                "row {} has {} characters, expected {}",
                r + 1,
                row.len(),
                grid.nx
            )));
        }
        for (i, ch) in row.bytes().enumerate() {
            active[grid.index(i, j)] = match ch {
                b'1' => true,
                b'0' => false,
                other => {
                    return Err(Error::Parse(format!(
                        "row {}: unexpected character {:?}",
                        r + 1,
                        other as char
                    )))
                }
            };
        }
    }
    DomainMask::new(grid, active)
}

pub fn mask_to_text(mask: &DomainMask) -> String {
    let g = mask.grid();
    let mut out = format!("{} {} {:?}", g.nx, g.ny, g.h);
    if g.origin != [0.0, 0.0] {
        out.push_str(&format!(" {:?} {:?}", g.origin[0], g.origin[1]));
    }
    out.push('\n');
    for row in rows(mask) {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn mask_from_text(text: &str) -> Result<DomainMask> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty mask file".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let bad = || Error::Parse(format!("bad mask header {header:?}"));
    if tokens.len() != 3 && tokens.len() != 5 {
        return Err(bad());
    }
    let nx: usize = tokens[0].parse().map_err(|_| bad())?;
    let ny: usize = tokens[1].parse().map_err(|_| bad())?;
    let h: f64 = tokens[2].parse().map_err(|_| bad())?;
    let origin = if tokens.len() == 5 {
        [
            tokens[3].parse().map_err(|_| bad())?,
            tokens[4].parse().map_err(|_| bad())?,
        ]
    } else {
        [0.0, 0.0]
    };
    let grid = GridSpec::new(nx, ny, h, origin)?;
    let rows: Vec<&str> = lines.collect();
    from_rows(grid, &rows)
}

#[derive(Serialize, Deserialize)]
struct MaskJson {
    nx: usize,
    ny: usize,
    h: f64,
    #[serde(default)]
    origin: [f64; 2],
    rows: Vec<String>,
}

pub fn mask_to_json(mask: &DomainMask) -> String {
    let g = mask.grid();
    serde_json::to_string_pretty(&MaskJson {
        nx: g.nx,
        ny: g.ny,
        h: g.h,
        origin: g.origin,
        rows: rows(mask),
    })
    .expect("mask serializes")
}

pub fn mask_from_json(text: &str) -> Result<DomainMask> {
    let m: MaskJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("mask JSON: {e}")))?;
    let grid = GridSpec::new(m.nx, m.ny, m.h, m.origin)?;
    let rows: Vec<&str> = m.rows.iter().map(String::as_str).collect();
    from_rows(grid, &rows)
}

/// Reads a mask, choosing the format from the extension (`.json` or text).
pub fn read_mask(path: &Path) -> Result<DomainMask> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        mask_from_json(&text)
    } else {
        mask_from_text(&text)
    };
    parsed.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_mask(path: &Path, mask: &DomainMask) -> Result<()> {
    let text = if path.extension().is_some_and(|e| e == "json") {
        mask_to_json(mask)
    } else {
        mask_to_text(mask)
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn text_layout_is_top_row_first() {
        let grid = GridSpec::new(4, 4, 0.25, [0.0, 0.0]).unwrap();
        let mask = DomainMask::from_fn(grid, |i, j| i == 1 && j == 2).unwrap();
        assert_eq!(mask_to_text(&mask), "4 4 0.25\n0000\n0100\n0000\n0000\n");
    }

    #[test]
    fn malformed_text_is_rejected() {
        assert!(mask_from_text("").is_err());
        assert!(mask_from_text("4 4\n0000\n").is_err());
        assert!(mask_from_text("4 4 0.25\n0000\n0100\n0000\n").is_err());
        assert!(mask_from_text("4 4 0.25\n0000\n01x0\n0000\n0000\n").is_err());
        // Active frame cell.
        assert!(mask_from_text("4 4 0.25\n1000\n0100\n0000\n0000\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trips_are_bit_exact(
            nx in 4usize..12,
            ny in 4usize..12,
            h in 1e-3f64..10.0,
            ox in -5.0f64..5.0,
            seed in any::<u64>(),
        ) {
            let origin = if seed % 3 == 0 { [0.0, 0.0] } else { [ox, -ox / 3.0] };
            let grid = GridSpec::new(nx, ny, h, origin).unwrap();
            let mut bits = seed;
            let mut active = vec![false; grid.len()];
            for c in 0..grid.len() {
                bits = bits.rotate_left(7) ^ 0x9e37_79b9_7f4a_7c15;
                active[c] = !grid.is_frame(c) && bits & 1 == 1;
            }
            active[grid.index(1, 1)] = true;
            let mask = DomainMask::new(grid, active).unwrap();

            let text = mask_to_text(&mask);
            let back = mask_from_text(&text).unwrap();
            prop_assert_eq!(&back, &mask);
            prop_assert_eq!(back.grid().h.to_bits(), h.to_bits());
            prop_assert_eq!(mask_to_text(&back), text);

            let json = mask_to_json(&mask);
            let back = mask_from_json(&json).unwrap();
            prop_assert_eq!(&back, &mask);
            prop_assert_eq!(back.grid().origin, origin);
        }
    }
}
