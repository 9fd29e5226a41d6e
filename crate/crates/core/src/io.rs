//! Text and image formats for coefficients, traces and indicator maps.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex;

use crate::data::{DataOrigin, RayleighData, SourceRecord};
use crate::error::{Error, Result};
use crate::forward::Trace;
use crate::grid::Grid2D;
use crate::imaging::{IndicatorMap, Method};
use crate::medium::MediumParams;
use crate::real::{lit, to_f64, Real};

/// Shortest round-trip decimal; exponent form only for very small or large magnitudes.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits a data line into trimmed fields with their 1-based start columns.
fn fields(line: &str, sep: impl Fn(char) -> bool) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in line.char_indices() {
        if sep(c) {
            out.push((start, &line[start..i]));
            start = i + c.len_utf8();
        }
    }
    out.push((start, &line[start..]));
    out.into_iter()
        .map(|(s, f)| {
            let lead = f.len() - f.trim_start().len();
            (s + lead + 1, f.trim())
        })
        .filter(|(_, f)| !f.is_empty())
        .collect()
}

fn num<F: std::str::FromStr>(line: usize, (col, text): (usize, &str)) -> Result<F> {
    text.parse()
        .map_err(|_| parse_err(line, col, format!("cannot parse '{text}' as a number")))
}

const RAYLEIGH_HEADER: &str = "# k alpha h r_meas n_sources";
const RAYLEIGH_COLUMNS: &str = "source_id,j,re_uplus,im_uplus,re_uminus,im_uminus";

/// Header comment, parameter comment, column line, then one row per source and mode.
pub fn rayleigh_to_csv<T: Real>(data: &RayleighData<T>) -> String {
    let p = data.params();
    let mut s = String::new();
    let _ = writeln!(s, "{RAYLEIGH_HEADER}");
    let _ = writeln!(
        s,
        "# {} {} {} {} {}",
        fmt_num(to_f64(p.k())),
        fmt_num(to_f64(p.alpha())),
        fmt_num(to_f64(p.h())),
        fmt_num(to_f64(p.r_meas())),
        data.n_sources()
    );
    let _ = writeln!(s, "{RAYLEIGH_COLUMNS}");
    for (l, rec) in data.sources().iter().enumerate() {
        for j in data.window() {
            let [up, dn] = data.coeff(l, j);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                rec.id,
                j,
                fmt_num(to_f64(up.re)),
                fmt_num(to_f64(up.im)),
                fmt_num(to_f64(dn.re)),
                fmt_num(to_f64(dn.im))
            );
        }
    }
    s
}

/// Inverse of [`rayleigh_to_csv`]. Every source must list the same
/// contiguous mode window; the Wood guard is not re-applied on load.
pub fn rayleigh_from_csv<T: Real>(text: &str) -> Result<RayleighData<T>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut params: Option<(MediumParams<T>, usize)> = None;
    let mut rows: Vec<(usize, usize, i64, [Complex<T>; 2])> = Vec::new();
    for (no, line) in &mut lines {
        let t = line.trim();
        if t.is_empty() || t == RAYLEIGH_HEADER || t.starts_with("source_id") {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            if params.is_some() {
                continue;
            }
            let f = fields(rest, char::is_whitespace);
            if f.len() != 5 {
                return Err(parse_err(no, 1, "expected '# k alpha h r_meas n_sources' values"));
            }
            let v: Vec<f64> = f[..4].iter().map(|&x| num(no, x)).collect::<Result<_>>()?;
            let n: usize = num(no, f[4])?;
            let p = MediumParams::with_wood_tol(lit(v[0]), lit(v[1]), lit(v[2]), lit(v[3]), T::zero())
                .map_err(|e| Error::Validation {
                    message: format!("line {no}: invalid medium parameters"),
                    cause: Some(Box::new(e)),
                })?;
            params = Some((p, n));
            continue;
        }
        let f = fields(line, |c| c == ',');
        if f.len() != 6 {
            return Err(parse_err(no, 1, format!("expected 6 comma-separated fields, found {}", f.len())));
        }
        let id: usize = num(no, f[0])?;
        let j: i64 = num(no, f[1])?;
        let v: Vec<f64> = f[2..].iter().map(|&x| num(no, x)).collect::<Result<_>>()?;
        let c = [
            Complex::new(lit(v[0]), lit(v[1])),
            Complex::new(lit(v[2]), lit(v[3])),
        ];
        rows.push((no, id, j, c));
    }
    let (params, n_sources) = params.ok_or_else(|| Error::Format("missing parameter line".into()))?;
    let (j_min, j_max) = rows
        .iter()
        .fold((i64::MAX, i64::MIN), |(a, b), r| (a.min(r.2), b.max(r.2)));
    if rows.is_empty() {
        return Err(Error::Format("no coefficient rows".into()));
    }
    let width = (j_max - j_min + 1) as usize;
    let mut data = RayleighData::new(params, j_min..=j_max, DataOrigin::External)?;
    let mut i = 0;
    while i < rows.len() {
        let id = rows[i].1;
        let block = &rows[i..(i + width).min(rows.len())];
        for (k, &(no, rid, j, _)) in block.iter().enumerate() {
            if rid != id || j != j_min + k as i64 {
                return Err(parse_err(no, 1, format!("expected source {id}, mode {}", j_min + k as i64)));
            }
        }
        if block.len() != width {
            return Err(Error::Format(format!("source {id} is missing modes")));
        }
        data.push_source(SourceRecord { id, incident: None }, block.iter().map(|r| r.3).collect())?;
        i += width;
    }
    if data.n_sources() != n_sources {
        return Err(Error::Format(format!(
            "header announces {n_sources} sources, file holds {}",
            data.n_sources()
        )));
    }
    Ok(data)
}

/// One row per sample: `source_id,boundary,index,x1,re,im` with boundary `+` or `-`.
pub fn traces_to_csv<T: Real>(traces: &[(usize, Trace<T>)]) -> String {
    let mut s = String::from("source_id,boundary,index,x1,re,im\n");
    for (id, tr) in traces {
        for (sign, vals) in [('+', &tr.upper), ('-', &tr.lower)] {
            for (n, (x, v)) in tr.x1.iter().zip(vals.iter()).enumerate() {
                let _ = writeln!(
                    s,
                    "{id},{sign},{n},{},{},{}",
                    fmt_num(to_f64(*x)),
                    fmt_num(to_f64(v.re)),
                    fmt_num(to_f64(v.im))
                );
            }
        }
    }
    s
}

/// Header comment, its values, then the normalized map, one x2 row per line
/// from `x2_min` upwards.
pub fn indicator_to_csv<T: Real>(map: &IndicatorMap<T>) -> String {
    let g = &map.grid;
    let norm = map.normalized();
    let mut s = String::from("# n1 n2 x1min x1max x2min x2max method p\n");
    let _ = writeln!(
        s,
        "# {} {} {} {} {} {} {} {}",
        g.n1,
        g.n2,
        fmt_num(to_f64(g.x1_min)),
        fmt_num(to_f64(g.x1_max)),
        fmt_num(to_f64(g.x2_min)),
        fmt_num(to_f64(g.x2_max)),
        map.method,
        map.p
    );
    write_rows(&mut s, g.n1, &norm);
    s
}

fn write_rows<T: Real>(s: &mut String, n1: usize, values: &[T]) {
    for row in values.chunks(n1) {
        let line: Vec<String> = row.iter().map(|&v| fmt_num(to_f64(v))).collect();
        let _ = writeln!(s, "{}", line.join(","));
    }
}

/// Plain map CSV without method metadata (kernel panels).
pub fn grid_values_to_csv<T: Real>(grid: &Grid2D<T>, values: &[T]) -> String {
    let mut s = String::from("# n1 n2 x1min x1max x2min x2max\n");
    let _ = writeln!(
        s,
        "# {} {} {} {} {} {}",
        grid.n1,
        grid.n2,
        fmt_num(to_f64(grid.x1_min)),
        fmt_num(to_f64(grid.x1_max)),
        fmt_num(to_f64(grid.x2_min)),
        fmt_num(to_f64(grid.x2_max))
    );
    write_rows(&mut s, grid.n1, values);
    s
}

/// Parsed indicator CSV: grid, normalized values, method and exponent.
pub fn indicator_from_csv(text: &str) -> Result<(Grid2D<f64>, Vec<f64>, Method, u32)> {
    let mut meta = None;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let no = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with("# n1") {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            let f = fields(rest, char::is_whitespace);
            if f.len() != 8 {
                return Err(parse_err(no, 1, "expected 8 header values"));
            }
            let n1: usize = num(no, f[0])?;
            let n2: usize = num(no, f[1])?;
            let b: Vec<f64> = f[2..6].iter().map(|&x| num(no, x)).collect::<Result<_>>()?;
            let method: Method = f[6].1.parse()?;
            let p: u32 = num(no, f[7])?;
            meta = Some((Grid2D::new(b[0], b[1], b[2], b[3], n1, n2)?, method, p));
            continue;
        }
        for fv in fields(line, |c| c == ',') {
            values.push(num::<f64>(no, fv)?);
        }
    }
    let (grid, method, p) = meta.ok_or_else(|| Error::Format("missing indicator header".into()))?;
    if values.len() != grid.len() {
        return Err(Error::Format(format!(
            "expected {} values, found {}",
            grid.len(),
            values.len()
        )));
    }
    Ok((grid, values, method, p))
}

/// Binary 16-bit greyscale PGM of values in `[0, 1]` (clamped), stored
/// x2-major with `x2` increasing; the image puts the largest `x2` on top.
pub fn pgm16<T: Real>(n1: usize, n2: usize, values: &[T]) -> Vec<u8> {
    assert_eq!(values.len(), n1 * n2);
    let mut out = format!("P5\n{n1} {n2}\n65535\n").into_bytes();
    out.reserve(2 * n1 * n2);
    for i2 in (0..n2).rev() {
        for &v in &values[i2 * n1..(i2 + 1) * n1] {
            let x = to_f64(v).clamp(0.0, 1.0);
            let q = (65535.0 * x).round() as u16;
            out.extend_from_slice(&q.to_be_bytes());
        }
    }
    out
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}
