//! Field snapshot files: a plain-text header followed by raw little-endian
//! `f64` (re, im) pairs, component-major, first axis slowest.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::Field4;
use super::grid::GridSpec;
use crate::{Result, StratoError};

const MAGIC: &str = "strato-field 1";
const END: &str = "end-header";

pub fn write_snapshot(path: &Path, f: &Field4) -> Result<()> {
    let g = f.grid();
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "n = {} {} {}", g.n[0], g.n[1], g.n[2])?;
    writeln!(
        w,
        "periods = {:e} {:e} {:e}",
        g.lengths[0], g.lengths[1], g.lengths[2]
    )?;
    writeln!(w, "dealias = {:e}", g.dealias)?;
    writeln!(w, "components = 4")?;
    writeln!(w, "endianness = little")?;
    writeln!(
        w,
        "layout = component-major; xi1 slowest; complex as (re, im) f64 pairs"
    )?;
    writeln!(w, "{END}")?;
    for c in 0..4 {
        for v in f.comp(c) {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| StratoError::Format(format!("bad number '{t}'")))
        })
        .collect()
}

pub fn read_snapshot(path: &Path) -> Result<Field4> {
    let mut r = BufReader::new(File::open(path)?);
    let mut line = String::new();
    r.read_line(&mut line)?;
    if line.trim_end() != MAGIC {
        return Err(StratoError::Format("missing magic line".into()));
    }
    let (mut n, mut periods, mut dealias, mut comps, mut little) = (None, None, None, None, false);
    loop {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Err(StratoError::Format("header not terminated".into()));
        }
        let l = line.trim_end();
        if l == END {
            break;
        }
        let (key, val) = l
            .split_once('=')
            .ok_or_else(|| StratoError::Format(format!("bad header line '{l}'")))?;
        let val = val.trim();
        match key.trim() {
            "n" => n = Some(parse_floats(val)?),
            "periods" => periods = Some(parse_floats(val)?),
            "dealias" => dealias = parse_floats(val)?.first().copied(),
            "components" => comps = val.parse::<usize>().ok(),
            "endianness" => little = val == "little",
            _ => {}
        }
    }
    let (n, periods) = match (n, periods) {
        (Some(n), Some(p)) if n.len() == 3 && p.len() == 3 => (n, p),
        _ => return Err(StratoError::Format("grid sizes or periods missing".into())),
    };
    if comps != Some(4) || !little {
        return Err(StratoError::Format(
            "expected four little-endian components".into(),
        ));
    }
    let grid = GridSpec::new(
        [n[0] as usize, n[1] as usize, n[2] as usize],
        [periods[0], periods[1], periods[2]],
        dealias.unwrap_or(2.0 / 3.0),
    )?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let expect = 4 * grid.len() * 16;
    if bytes.len() != expect {
        return Err(StratoError::SizeMismatch {
            expected: expect,
            got: bytes.len(),
        });
    }
    let mut data: [Vec<Complex64>; 4] = Default::default();
    let mut chunks = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")));
    for d in data.iter_mut() {
        *d = (0..grid.len())
            .map(|_| {
                let re = chunks.next().expect("length checked");
                let im = chunks.next().expect("length checked");
                Complex64::new(re, im)
            })
            .collect();
    }
    Ok(Field4::from_components(grid, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip_is_exact() {
        let g = GridSpec::new([4, 6, 8], [1.0, 2.0, 3.5], 2.0 / 3.0).unwrap();
        let mut f = Field4::zeros(&g);
        for c in 0..4 {
            for (i, v) in f.comp_mut(c).iter_mut().enumerate() {
                *v = Complex64::new((i * (c + 1)) as f64 * 0.1, -(i as f64).sqrt());
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.snap");
        write_snapshot(&p, &f).unwrap();
        assert_eq!(read_snapshot(&p).unwrap(), f);
    }
}
