//! Plain-text point files: one point per line, coordinates separated by single
//! spaces, `#` comment lines allowed anywhere. The dimension is taken from the
//! first data line.

use std::io::{BufRead, Write};
use std::path::Path;

use super::{Point, PointSet};
use crate::error::{Error, Result};

/// Writes `set` with 17 significant digits per coordinate, which is enough
/// for an exact round trip.
pub fn write_points<W: Write>(mut w: W, set: &PointSet) -> Result<()> {
    writeln!(w, "# dim={} n={}", set.dim(), set.len())?;
    if let Some(seed) = set.meta.seed {
        writeln!(w, "# seed={seed}")?;
    }
    if !set.meta.field.is_empty() {
        writeln!(w, "# field={}", set.meta.field)?;
    }
    if let Some(gf) = set.meta.grid_factor {
        writeln!(w, "# grid_factor={gf}")?;
    }
    let mut line = String::new();
    for p in set {
        line.clear();
        for a in 0..set.dim() {
            if a > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{:.16e}", p[a]));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_points<R: BufRead>(r: R) -> Result<PointSet> {
    let mut set: Option<PointSet> = None;
    let mut coords = Vec::with_capacity(3);
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        coords.clear();
        for tok in trimmed.split_whitespace() {
            let v: f64 =
                tok.parse().map_err(|_| Error::Parse { line: n + 1, msg: format!("not a number: {tok:?}") })?;
            coords.push(v);
        }
        let set = set.get_or_insert_with(|| PointSet::new(coords.len().clamp(2, 3)));
        if coords.len() != set.dim() {
            return Err(Error::Parse {
                line: n + 1,
                msg: format!("expected {} coordinates, found {}", set.dim(), coords.len()),
            });
        }
        let p = Point::from_slice(&coords).map_err(|e| Error::Parse { line: n + 1, msg: e.to_string() })?;
        set.push(p);
    }
    set.ok_or(Error::Parse { line: 0, msg: "no data lines".into() })
}

pub fn read_points(path: impl AsRef<Path>) -> Result<PointSet> {
    let file = std::fs::File::open(path)?;
    parse_points(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_infers_dimension() {
        let text = "# header\n0.5 0.25 1\n\n# mid\n1e-3 2 3\n";
        let set = parse_points(text.as_bytes()).unwrap();
        assert_eq!(set.dim(), 3);
        assert_eq!(set.points()[1], Point::xyz(1e-3, 2.0, 3.0));
    }

    #[test]
    fn rejects_ragged_and_bad_tokens() {
        assert!(parse_points("0 0\n0 0 0\n".as_bytes()).is_err());
        assert!(parse_points("0 x\n".as_bytes()).is_err());
        assert!(parse_points("1\n".as_bytes()).is_err());
        assert!(parse_points("# only comments\n".as_bytes()).is_err());
    }

    #[test]
    fn writes_seventeen_significant_digits() {
        let set = PointSet::from_points(2, vec![Point::xy(0.1, 1.0 / 3.0)]);
        let mut buf = Vec::new();
        write_points(&mut buf, &set).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let data = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(data, "1.0000000000000001e-1 3.3333333333333331e-1");
        assert_eq!(parse_points(text.as_bytes()).unwrap().points(), set.points());
    }
}
