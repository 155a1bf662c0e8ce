//! Set comparison by linear scans.

pub type Cell = (String, String, f64);

#[derive(Debug, Default, PartialEq)]
pub struct Split {
    pub both: Vec<Cell>,
    pub reference_only: Vec<Cell>,
    pub matcher_only: Vec<Cell>,
}

fn has(cells: &[Cell], s: &str, t: &str) -> bool {
    cells.iter().any(|c| c.0 == s && c.1 == t)
}

/// Cells of `both` come from the reference. Output is sorted by key.
pub fn split(reference: &[Cell], matcher: &[Cell]) -> Split {
    let mut out = Split::default();
    for c in reference {
        if has(matcher, &c.0, &c.1) {
            out.both.push(c.clone());
        } else {
            out.reference_only.push(c.clone());
        }
    }
    for c in matcher {
        if !has(reference, &c.0, &c.1) {
            out.matcher_only.push(c.clone());
        }
    }
    for v in [&mut out.both, &mut out.reference_only, &mut out.matcher_only] {
        v.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    }
    out
}
