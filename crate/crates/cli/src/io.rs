//! State and observable files. Both are UTF-8 JSON: a state carries `dims`
//! (the two subsystem dimensions) plus `re`/`im` entry grids of the joint
//! matrix; an observable carries `eigenvalues` plus one `re`/`im` grid per
//! projector. Floats are written with 17 significant digits, so a write
//! followed by a read reproduces every entry exactly.

use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde_json::Value as Parsed;

use crate::error::CliError;
use crate::json::Value;
use qcorr::{BipartiteState64, DensityMatrix64, Matrix64, Observable64};

pub fn read_state(path: &Path) -> Result<BipartiteState64, CliError> {
    let ctx = format!("state file {}", path.display());
    let parsed = read_json(path, &ctx)?;
    state_from_json(&parsed, &ctx)
}

pub fn write_state(path: &Path, s: &BipartiteState64) -> Result<(), CliError> {
    write_text(path, &state_to_json(s).render())
}

pub fn read_observable(path: &Path) -> Result<Observable64, CliError> {
    let ctx = format!("observable file {}", path.display());
    let parsed = read_json(path, &ctx)?;
    observable_from_json(&parsed, &ctx)
}

pub fn write_observable(path: &Path, a: &Observable64) -> Result<(), CliError> {
    write_text(path, &observable_to_json(a).render())
}

fn read_json(path: &Path, ctx: &str) -> Result<Parsed, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{ctx}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{ctx}: {e}")))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display())))
}

pub fn state_from_json(v: &Parsed, ctx: &str) -> Result<BipartiteState64, CliError> {
    let dims = field(v, "dims", ctx)?
        .as_array()
        .ok_or_else(|| parse(ctx, "dims", "expected an array of two positive integers"))?;
    if dims.len() != 2 {
        return Err(parse(
            ctx,
            "dims",
            &format!("expected two subsystem dimensions, found {}", dims.len()),
        ));
    }
    let d1 = positive_int(&dims[0], "dims[0]", ctx)?;
    let d2 = positive_int(&dims[1], "dims[1]", ctx)?;
    let total = d1 * d2;
    let re = sized_grid(field(v, "re", ctx)?, "re", total, ctx)?;
    let im = sized_grid(field(v, "im", ctx)?, "im", total, ctx)?;
    let rho = DensityMatrix64::new(matrix_from_grids(&re, &im))
        .map_err(|e| CliError::from_lib(ctx, e))?;
    BipartiteState64::new(rho, d1, d2).map_err(|e| CliError::from_lib(ctx, e))
}

pub fn state_to_json(s: &BipartiteState64) -> Value {
    let (re, im) = grids_from_matrix(s.state().matrix());
    Value::Obj(vec![
        (
            "dims".into(),
            Value::Arr(vec![Value::UInt(s.d1() as u64), Value::UInt(s.d2() as u64)]),
        ),
        ("re".into(), re),
        ("im".into(), im),
    ])
}

pub fn observable_from_json(v: &Parsed, ctx: &str) -> Result<Observable64, CliError> {
    let eigenvalues = field(v, "eigenvalues", ctx)?
        .as_array()
        .ok_or_else(|| parse(ctx, "eigenvalues", "expected an array of numbers"))?;
    let projectors = field(v, "projectors", ctx)?
        .as_array()
        .ok_or_else(|| parse(ctx, "projectors", "expected an array of objects"))?;
    if eigenvalues.len() != projectors.len() {
        return Err(parse(
            ctx,
            "projectors",
            &format!(
                "{} projectors for {} eigenvalues",
                projectors.len(),
                eigenvalues.len()
            ),
        ));
    }
    if projectors.is_empty() {
        return Err(parse(ctx, "projectors", "expected at least one projector"));
    }

    let mut branches = Vec::with_capacity(projectors.len());
    let mut dim = None;
    for (l, (ev, pv)) in eigenvalues.iter().zip(projectors).enumerate() {
        let eigenvalue = number(ev, &format!("eigenvalues[{l}]"), ctx)?;
        let base = format!("projectors[{l}]");
        let re_field = pv
            .get("re")
            .ok_or_else(|| parse(ctx, &base, "missing field \"re\""))?;
        let im_field = pv
            .get("im")
            .ok_or_else(|| parse(ctx, &base, "missing field \"im\""))?;
        let n = match dim {
            Some(n) => n,
            None => {
                let n = re_field
                    .as_array()
                    .ok_or_else(|| parse(ctx, &format!("{base}.re"), "expected an array of rows"))?
                    .len();
                dim = Some(n);
                n
            }
        };
        let re = sized_grid(re_field, &format!("{base}.re"), n, ctx)?;
        let im = sized_grid(im_field, &format!("{base}.im"), n, ctx)?;
        branches.push((eigenvalue, matrix_from_grids(&re, &im)));
    }
    Observable64::new(branches).map_err(|e| CliError::from_lib(ctx, e))
}

pub fn observable_to_json(a: &Observable64) -> Value {
    let eigenvalues = Value::Arr(a.eigenvalues().into_iter().map(Value::Num).collect());
    let projectors = Value::Arr(
        (0..a.branch_count())
            .map(|l| {
                let (re, im) = grids_from_matrix(a.projector(l));
                Value::Obj(vec![("re".into(), re), ("im".into(), im)])
            })
            .collect(),
    );
    Value::Obj(vec![
        ("eigenvalues".into(), eigenvalues),
        ("projectors".into(), projectors),
    ])
}

fn parse(ctx: &str, path: &str, what: &str) -> CliError {
    CliError::Parse(format!("{ctx}: field \"{path}\": {what}"))
}

fn field<'a>(v: &'a Parsed, key: &str, ctx: &str) -> Result<&'a Parsed, CliError> {
    v.get(key)
        .ok_or_else(|| CliError::Parse(format!("{ctx}: missing field \"{key}\"")))
}

fn positive_int(v: &Parsed, path: &str, ctx: &str) -> Result<usize, CliError> {
    v.as_u64()
        .filter(|&x| x > 0)
        .map(|x| x as usize)
        .ok_or_else(|| parse(ctx, path, "expected a positive integer"))
}

fn number(v: &Parsed, path: &str, ctx: &str) -> Result<f64, CliError> {
    v.as_f64().ok_or_else(|| parse(ctx, path, "expected a number"))
}

/// A `size` by `size` grid of numbers; the expected size comes from `dims`
/// (states) or the first projector (observables), so a mismatch is reported
/// against that source.
fn sized_grid(v: &Parsed, path: &str, size: usize, ctx: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let rows = v
        .as_array()
        .ok_or_else(|| parse(ctx, path, "expected an array of rows"))?;
    if rows.len() != size {
        return Err(parse(
            ctx,
            path,
            &format!("expected {size} rows to match \"dims\", found {}", rows.len()),
        ));
    }
    let mut grid = Vec::with_capacity(size);
    for (i, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| parse(ctx, &format!("{path}[{i}]"), "expected an array of numbers"))?;
        if entries.len() != size {
            return Err(parse(
                ctx,
                &format!("{path}[{i}]"),
                &format!("expected {size} entries, found {}", entries.len()),
            ));
        }
        let mut out = Vec::with_capacity(size);
        for (j, entry) in entries.iter().enumerate() {
            out.push(number(entry, &format!("{path}[{i}][{j}]"), ctx)?);
        }
        grid.push(out);
    }
    Ok(grid)
}

fn matrix_from_grids(re: &[Vec<f64>], im: &[Vec<f64>]) -> Matrix64 {
    let n = re.len();
    let mut m = Matrix64::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex::new(re[i][j], im[i][j]);
        }
    }
    m
}

fn grids_from_matrix(m: &Matrix64) -> (Value, Value) {
    let row = |i: usize, pick: fn(&Complex<f64>) -> f64| {
        Value::Arr((0..m.cols()).map(|j| Value::Num(pick(&m[(i, j)]))).collect())
    };
    let re = Value::Arr((0..m.rows()).map(|i| row(i, |c| c.re)).collect());
    let im = Value::Arr((0..m.rows()).map(|i| row(i, |c| c.im)).collect());
    (re, im)
}
