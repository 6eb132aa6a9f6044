use std::io::{BufRead, Write};

use super::{Field, Value};
use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<T: Value, W: Write>(field: &Field<T>, mut w: W) -> Result<()> {
    writeln!(w, "nx,ny,h,ox,oy,components")?;
    writeln!(
        w,
        "{},{},{},{},{},{}",
        field.nx,
        field.ny,
        fmt_f64(field.h),
        fmt_f64(field.origin[0]),
        fmt_f64(field.origin[1]),
        T::COMPONENTS
    )?;
    for v in &field.values {
        let row: Vec<String> = (0..T::COMPONENTS).map(|k| fmt_f64(v.component(k))).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_csv<T: Value, R: BufRead>(r: R) -> Result<Field<T>> {
    let mut lines = r.lines();
    let mut next = |what: &str| -> Result<String> {
        lines.next().ok_or_else(|| Error::Parse(format!("missing {what}")))?.map_err(Error::from)
    };
    let header = next("header")?;
    if header.trim() != "nx,ny,h,ox,oy,components" {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let meta = next("metadata row")?;
    let parts: Vec<&str> = meta.trim().split(',').collect();
    if parts.len() != 6 {
        return Err(Error::Parse("metadata row needs 6 entries".into()));
    }
    let pu = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
    let pf = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
    let (nx, ny, h) = (pu(parts[0])?, pu(parts[1])?, pf(parts[2])?);
    let origin = [pf(parts[3])?, pf(parts[4])?];
    if pu(parts[5])? != T::COMPONENTS {
        return Err(Error::Parse(format!("expected {} components, file has {}", T::COMPONENTS, parts[5])));
    }
    let mut values = Vec::with_capacity(nx * ny);
    for k in 0..nx * ny {
        let line = next(&format!("value row {k}"))?;
        let comps = line.trim().split(',').map(pf).collect::<Result<Vec<f64>>>()?;
        if comps.len() != T::COMPONENTS {
            return Err(Error::Parse(format!("row {k} has {} components", comps.len())));
        }
        values.push(T::from_components(&comps));
    }
    Ok(Field { nx, ny, h, origin, values })
}
