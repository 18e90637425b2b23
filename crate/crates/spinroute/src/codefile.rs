//! Plain-text code files.
//!
//! ```text
//! n k d name          (k or d may be `?`)
//! HX
//! <one row of n bits per X check>
//! HZ
//! <one row of n bits per Z check>
//! LAYOUT              (optional: n lines `x y`)
//! ORDER               (optional: lines `row q0 q1 ...`, rows stacked X first)
//! ```
//! Blank lines and `#` comments are ignored.

use std::fmt::Write;

use spinroute_core::code::DataLayout;
use spinroute_core::error::CodeError;
use spinroute_core::gf2::{BitMatrix, BitVec};
use spinroute_core::{Cell, CssCode};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CodeFile {
    pub code: CssCode,
    pub layout: Option<DataLayout>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Hx,
    Hz,
    Layout,
    Order,
}

fn optional<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<Option<T>> {
    if tok == "?" {
        return Ok(None);
    }
    tok.parse().map(Some).map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))
}

pub fn parse_code(text: &str) -> Result<CodeFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "empty code file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 3 {
        return Err(Error::parse(hline, "header must be `n k d name`"));
    }
    let n: usize = toks[0].parse().map_err(|_| Error::parse(hline, format!("bad n `{}`", toks[0])))?;
    let k: Option<usize> = optional(toks[1], hline, "k")?;
    let d: Option<u32> = optional(toks[2], hline, "d")?;
    let name = toks.get(3..).map(|t| t.join(" ")).filter(|s| !s.is_empty()).unwrap_or_else(|| "code".into());

    let mut section = None;
    let (mut hx, mut hz) = (BitMatrix::empty(n), BitMatrix::empty(n));
    let mut cells = Vec::new();
    let mut orders = Vec::new();
    for (ln, line) in lines {
        let tag = match line {
            "HX" => Some(Section::Hx),
            "HZ" => Some(Section::Hz),
            "LAYOUT" => Some(Section::Layout),
            "ORDER" => Some(Section::Order),
            _ => None,
        };
        if tag.is_some() {
            section = tag;
            continue;
        }
        let nums = || -> Result<Vec<usize>> {
            line.split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::parse(ln, format!("bad number `{t}`"))))
                .collect()
        };
        match section {
            None => return Err(Error::parse(ln, "expected HX")),
            Some(s @ (Section::Hx | Section::Hz)) => {
                let bits = nums()?;
                if bits.len() != n {
                    return Err(Error::parse(ln, format!("row has {} entries, expected {n}", bits.len())));
                }
                if bits.iter().any(|&b| b > 1) {
                    return Err(Error::parse(ln, CodeError::NonBinary.to_string()));
                }
                let row = BitVec::from_bools(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>());
                if s == Section::Hx {
                    hx.push_row(row)
                } else {
                    hz.push_row(row)
                }
            }
            Some(Section::Layout) => match nums()?.as_slice() {
                &[x, y] => cells.push(Cell::new(x as u32, y as u32)),
                _ => return Err(Error::parse(ln, "layout lines are `x y`")),
            },
            Some(Section::Order) => {
                let v = nums()?;
                let (&row, order) = v.split_first().ok_or_else(|| Error::parse(ln, "empty order line"))?;
                orders.push((row, order.to_vec()));
            }
        }
    }

    let mut code = CssCode::new(name, hx, hz, d)?;
    if let Some(k) = k {
        if k != code.k() {
            return Err(CodeError::LogicalCountMismatch { declared: k, computed: code.k() }.into());
        }
    }
    for (row, order) in orders {
        if row >= code.num_checks() {
            return Err(CodeError::BadOrder { row }.into());
        }
        code = code.with_order(row, order)?;
    }
    let layout = if cells.is_empty() {
        None
    } else if cells.len() != n {
        return Err(CodeError::LayoutSize { expected: n, got: cells.len() }.into());
    } else {
        Some(DataLayout::new(cells)?)
    };
    Ok(CodeFile { code, layout })
}

pub fn write_code(code: &CssCode, layout: Option<&DataLayout>) -> String {
    let mut out = String::new();
    let d = code.distance.map_or("?".to_string(), |d| d.to_string());
    let _ = writeln!(out, "{} {} {d} {}", code.n(), code.k(), code.name);
    for (tag, m) in [("HX", code.hx()), ("HZ", code.hz())] {
        out.push_str(tag);
        out.push('\n');
        for row in m.rows() {
            let bits: Vec<&str> = (0..code.n()).map(|q| if row.get(q) { "1" } else { "0" }).collect();
            out.push_str(&bits.join(" "));
            out.push('\n');
        }
    }
    if let Some(l) = layout {
        out.push_str("LAYOUT\n");
        for c in l.cells() {
            let _ = writeln!(out, "{} {}", c.x, c.y);
        }
    }
    let orders: Vec<(usize, &[usize])> = (0..code.num_checks()).filter_map(|r| code.order(r).map(|o| (r, o))).collect();
    if !orders.is_empty() {
        out.push_str("ORDER\n");
        for (r, o) in orders {
            let qs: Vec<String> = o.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(out, "{r} {}", qs.join(" "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use spinroute_core::code::surface_code;

    #[test]
    fn surface_round_trip() {
        let (code, layout) = surface_code(3).unwrap();
        let text = write_code(&code, Some(&layout));
        assert!(text.starts_with("9 1 3 surface-d3\nHX\n"));
        let back = parse_code(&text).unwrap();
        assert_eq!(back.code.hx(), code.hx());
        assert_eq!(back.code.hz(), code.hz());
        assert_eq!(back.code.k(), 1);
        assert_eq!(back.layout.unwrap().cells(), layout.cells());
        for r in 0..code.num_checks() {
            assert_eq!(back.code.order(r), code.order(r));
        }
    }

    #[test]
    fn anticommuting_pair_is_reported() {
        let err = parse_code("2 ? ? bad\nHX\n1 1\nHZ\n1 0\n").unwrap_err();
        assert!(matches!(err, Error::Code(CodeError::Anticommuting { x_row: 0, z_row: 0 })), "{err}");
    }

    #[test]
    fn even_overlap_commutes() {
        let f = parse_code("2 ? ? pair\nHX\n1 1\nHZ\n1 1\n").unwrap();
        assert_eq!(f.code.k(), 0);
    }

    #[test]
    fn malformed_files() {
        assert!(matches!(parse_code(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_code("3 1 1 r\nHX\n1 1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_code("3 1 1 r\n1 1 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_code("2 1 1 r\nHZ\n1 2\n"), Err(Error::Parse { .. })));
        let wrong_k = parse_code("3 2 1 rep\nHZ\n1 1 0\n0 1 1\n").unwrap_err();
        assert!(matches!(wrong_k, Error::Code(CodeError::LogicalCountMismatch { declared: 2, computed: 1 })));
    }
}
