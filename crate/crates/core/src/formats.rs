//! Plain-text triple-system files.
//!
//! ```text
//! sts v1 n=7
//! 0 1 2
//! 0 3 4
//! # schema sts v1
//! ```
//!
//! Blocks are written sorted, one per line. The `(n, q, r)` format lives
//! with [`QSystem`](crate::general_designs::QSystem).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::triple::{Triple, TripleSystem};

const TRAILER: &str = "# schema sts v1";

pub fn write_sts(s: &TripleSystem) -> String {
    let mut out = format!("sts v1 n={}\n", s.n());
    let mut blocks = s.block_vec();
    blocks.sort_unstable();
    for t in blocks {
        writeln!(out, "{} {} {}", t.a(), t.b(), t.c()).unwrap();
    }
    out.push_str(TRAILER);
    out.push('\n');
    out
}

pub fn read_sts(text: &str) -> Result<TripleSystem> {
    let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let lines: Vec<&str> = text.lines().map(str::trim_end).collect();
    let header: Vec<&str> = lines.first().ok_or_else(|| err(1, "empty input"))?.split_whitespace().collect();
    match header.as_slice() {
        ["sts", "v1", n] if n.starts_with("n=") => {}
        ["sts", v, _] => return Err(Error::UnsupportedVersion(format!("sts {v}"))),
        _ => return Err(err(1, "expected `sts v1 n=<n>`")),
    }
    let n: usize = header[2][2..].parse().map_err(|_| err(1, "bad vertex count"))?;
    let body_end = match lines.iter().rposition(|l| !l.is_empty()) {
        Some(i) if lines[i] == TRAILER => i,
        Some(i) if lines[i].starts_with("# schema ") => return Err(Error::UnsupportedVersion(lines[i].to_string())),
        _ => return Err(err(lines.len(), "missing schema line")),
    };
    let mut s = TripleSystem::new(n);
    for (idx, line) in lines[1..body_end].iter().enumerate() {
        let ln = idx + 2;
        let v: Vec<u32> = line
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| err(ln, "bad vertex")))
            .collect::<Result<_>>()?;
        let [a, b, c] = v[..] else {
            return Err(err(ln, "expected three vertices"));
        };
        let t = Triple::try_new(a, b, c).map_err(|e| err(ln, &e.to_string()))?;
        if !s.insert(t).map_err(|e| err(ln, &e.to_string()))? {
            return Err(err(ln, "duplicate block"));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_order() {
        let s = TripleSystem::from_blocks(7, [Triple::new(1, 3, 5), Triple::new(0, 1, 2)]).unwrap();
        let text = write_sts(&s);
        assert_eq!(text, "sts v1 n=7\n0 1 2\n1 3 5\n# schema sts v1\n");
        assert_eq!(read_sts(&text).unwrap(), s);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(read_sts("sts v2 n=7\n# schema sts v2\n"), Err(Error::UnsupportedVersion(_))));
        assert!(matches!(read_sts("sts v1 n=7\n0 1 2\n# schema sts v9\n"), Err(Error::UnsupportedVersion(_))));
        assert!(read_sts("sts v1 n=7\n0 1 2\n").is_err());
        assert!(read_sts("sts v1 n=7\n0 1 9\n# schema sts v1\n").is_err());
        assert!(read_sts("sts v1 n=7\n0 1\n# schema sts v1\n").is_err());
        assert!(read_sts("sts v1 n=7\n0 1 2\n2 1 0\n# schema sts v1\n").is_err());
        assert!(read_sts("").is_err());
    }
}
