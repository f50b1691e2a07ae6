use std::collections::BTreeMap;
use std::path::Path;

use crate::failure::Failure;

/// Counts indexed by symbol `1..=k` read from a `symbol,count` CSV.
pub fn read_histogram(path: &Path, k: Option<usize>) -> Result<Vec<u64>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let headers = reader.headers().map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if headers.len() != 2 || &headers[0] != "symbol" || &headers[1] != "count" {
        return Err(Failure::input(format!("{}: line 1: expected header `symbol,count`", path.display())));
    }
    let mut counts = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        let at = |msg: String| Failure::input(format!("{}: line {line}: {msg}", path.display()));
        if record.len() != 2 {
            return Err(at(format!("expected 2 fields, found {}", record.len())));
        }
        let symbol: usize = record[0].parse().map_err(|_| at(format!("bad symbol `{}`", &record[0])))?;
        if symbol == 0 {
            return Err(at("symbols are 1-based".into()));
        }
        let count: u64 = record[1].parse().map_err(|_| at(format!("bad count `{}`", &record[1])))?;
        if counts.insert(symbol, count).is_some() {
            return Err(at(format!("symbol {symbol} appears twice")));
        }
    }
    let max = counts.keys().next_back().copied().unwrap_or(0);
    let k = match k {
        Some(k) if k < max => {
            return Err(Failure::input(format!("--k {k} is smaller than the largest symbol {max}")));
        }
        Some(k) => k,
        None => max,
    };
    if k == 0 {
        return Err(Failure::input(format!("{}: histogram is empty", path.display())));
    }
    let mut out = vec![0; k];
    for (s, c) in counts {
        out[s - 1] = c;
    }
    Ok(out)
}
