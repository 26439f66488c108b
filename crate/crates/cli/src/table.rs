//! Plain-text tables for terminal output.

use std::collections::BTreeMap;

/// Columns padded to their widest cell; the first column is left-aligned,
/// the rest right-aligned.
pub fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut out = line(header.to_vec());
    out.push_str(&line(widths.iter().map(|&w| &"--------------------------------"[..w.min(32)]).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

/// Value, count and a bar scaled to at most 40 characters.
pub fn histogram(label: &str, counts: &BTreeMap<usize, usize>) -> String {
    if counts.is_empty() {
        return format!("{label}: (empty)\n");
    }
    let max = counts.values().copied().max().unwrap_or(1).max(1);
    let vw = counts.keys().map(|v| v.to_string().len()).max().unwrap_or(0).max(label.len());
    let nw = counts.values().map(|n| n.to_string().len()).max().unwrap_or(0).max("count".len());
    let mut out = format!("{label:<vw$}  {:>nw$}\n", "count");
    for (value, &n) in counts {
        let bar = "#".repeat((n * 40).div_ceil(max));
        out.push_str(&format!("{value:<vw$}  {n:>nw$}  {bar}\n"));
    }
    out
}
