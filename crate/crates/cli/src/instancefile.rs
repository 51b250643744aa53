//! Self-describing text serialization of feasibility instances.
//!
//! Layout: `key=value` metadata (manifold, n, m, r, eps, optional seed)
//! followed by labeled coordinate sections `[target]`, `[start]`,
//! `[center 0]` ... `[center m-1]`. Sphere points are one line of `n`
//! values; positive-definite points are `n` lines of `n` values, row-major.
//! Floats use 17 significant digits, so a write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use geodescent::{FeasibilityInstance, ManifoldHandle, ManifoldKind, Point};
use geodescent::nalgebra::DMatrix;

use crate::config::parse_manifold;
use crate::csvio::format_float;
use crate::error::{CliError, Result};

fn push_point(out: &mut String, label: &str, point: &Point, kind: ManifoldKind) {
    out.push('[');
    out.push_str(label);
    out.push_str("]\n");
    let coords = point.coords();
    match kind {
        ManifoldKind::Sphere => {
            let row: Vec<String> = (0..coords.nrows())
                .map(|i| format_float(coords[(i, 0)]))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        ManifoldKind::Spd => {
            for i in 0..coords.nrows() {
                let row: Vec<String> = (0..coords.ncols())
                    .map(|j| format_float(coords[(i, j)]))
                    .collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
    }
}

pub fn write_instance(path: &Path, instance: &FeasibilityInstance) -> Result<()> {
    let m = instance.manifold();
    let mut out = String::new();
    out.push_str("# geodescent feasibility instance\n");
    writeln!(out, "manifold={}", m.kind()).expect("string write");
    writeln!(out, "n={}", m.n()).expect("string write");
    writeln!(out, "m={}", instance.centers().len()).expect("string write");
    writeln!(out, "r={}", format_float(instance.radius())).expect("string write");
    writeln!(out, "eps={}", format_float(instance.slack())).expect("string write");
    if let Some(seed) = instance.seed() {
        writeln!(out, "seed={seed}").expect("string write");
    }
    push_point(&mut out, "target", instance.target(), m.kind());
    push_point(&mut out, "start", instance.start(), m.kind());
    for (i, center) in instance.centers().iter().enumerate() {
        push_point(&mut out, &format!("center {i}"), center, m.kind());
    }
    std::fs::write(path, out).map_err(CliError::io(path))
}

struct Reader<'a> {
    path: &'a Path,
    lines: Vec<&'a str>,
    cursor: usize,
}

impl<'a> Reader<'a> {
    fn fail<T>(&self, line: usize, message: String) -> Result<T> {
        Err(CliError::Parse {
            path: self.path.to_path_buf(),
            line,
            message,
        })
    }

    /// Next non-blank, non-comment line with its 1-based number.
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        while self.cursor < self.lines.len() {
            let line_no = self.cursor + 1;
            let line = self.lines[self.cursor].trim();
            self.cursor += 1;
            if !line.is_empty() && !line.starts_with('#') {
                return Some((line_no, line));
            }
        }
        None
    }

    fn expect_section(&mut self, label: &str) -> Result<()> {
        match self.next_line() {
            Some((_, line)) if line == format!("[{label}]") => Ok(()),
            Some((line_no, line)) => {
                self.fail(line_no, format!("expected section `[{label}]`, got `{line}`"))
            }
            None => self.fail(
                self.lines.len(),
                format!("expected section `[{label}]`, got end of file"),
            ),
        }
    }

    fn float_row(&mut self, expected: usize, context: &str) -> Result<Vec<f64>> {
        let Some((line_no, line)) = self.next_line() else {
            return self.fail(
                self.lines.len(),
                format!("expected {expected} coordinates for {context}, got end of file"),
            );
        };
        let mut row = Vec::with_capacity(expected);
        for token in line.split_whitespace() {
            match token.parse::<f64>() {
                Ok(x) => row.push(x),
                Err(e) => {
                    return self.fail(line_no, format!("{context}: bad float `{token}`: {e}"))
                }
            }
        }
        if row.len() != expected {
            return self.fail(
                line_no,
                format!("{context}: expected {expected} values, got {}", row.len()),
            );
        }
        Ok(row)
    }

    fn point(&mut self, handle: &ManifoldHandle, label: &str) -> Result<Point> {
        self.expect_section(label)?;
        let n = handle.n();
        let coords = match handle.kind() {
            ManifoldKind::Sphere => {
                let row = self.float_row(n, label)?;
                DMatrix::from_vec(n, 1, row)
            }
            ManifoldKind::Spd => {
                let mut data = Vec::with_capacity(n * n);
                for _ in 0..n {
                    data.extend(self.float_row(n, label)?);
                }
                DMatrix::from_row_slice(n, n, &data)
            }
        };
        Ok(handle.point(coords)?)
    }
}

pub fn read_instance(path: &Path) -> Result<FeasibilityInstance> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let lines: Vec<&str> = text.lines().collect();
    let mut reader = Reader {
        path,
        lines,
        cursor: 0,
    };

    // Metadata phase: key=value until the first section header.
    let mut manifold_kind = None;
    let mut n = None;
    let mut m = None;
    let mut r = None;
    let mut eps = None;
    let mut seed = None;
    loop {
        let Some((line_no, line)) = reader.next_line() else {
            return reader.fail(reader.lines.len(), "missing coordinate sections".into());
        };
        if line.starts_with('[') {
            reader.cursor -= 1; // hand the section header back
            break;
        }
        let Some((key, value)) = line.split_once('=') else {
            return reader.fail(line_no, format!("expected `key=value`, got `{line}`"));
        };
        let (key, value) = (key.trim(), value.trim());
        let parse_err = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        match key {
            "manifold" => {
                manifold_kind =
                    Some(parse_manifold(value).map_err(|e| parse_err(format!("field `manifold`: {e}")))?)
            }
            "n" => {
                n = Some(value.parse::<usize>().map_err(|e| {
                    parse_err(format!("field `n`: invalid value `{value}`: {e}"))
                })?)
            }
            "m" => {
                m = Some(value.parse::<usize>().map_err(|e| {
                    parse_err(format!("field `m`: invalid value `{value}`: {e}"))
                })?)
            }
            "r" => {
                r = Some(value.parse::<f64>().map_err(|e| {
                    parse_err(format!("field `r`: invalid value `{value}`: {e}"))
                })?)
            }
            "eps" => {
                eps = Some(value.parse::<f64>().map_err(|e| {
                    parse_err(format!("field `eps`: invalid value `{value}`: {e}"))
                })?)
            }
            "seed" => {
                seed = Some(value.parse::<u64>().map_err(|e| {
                    parse_err(format!("field `seed`: invalid value `{value}`: {e}"))
                })?)
            }
            other => return reader.fail(line_no, format!("unknown field `{other}`")),
        }
    }

    let missing = |field: &str| {
        CliError::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("missing field `{field}`"),
        }
    };
    let manifold_kind = manifold_kind.ok_or_else(|| missing("manifold"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    let m = m.ok_or_else(|| missing("m"))?;
    let r = r.ok_or_else(|| missing("r"))?;
    let eps = eps.ok_or_else(|| missing("eps"))?;

    let handle = match manifold_kind {
        ManifoldKind::Sphere => ManifoldHandle::sphere(n)?,
        ManifoldKind::Spd => ManifoldHandle::spd(n)?,
    };
    let target = reader.point(&handle, "target")?;
    let start = reader.point(&handle, "start")?;
    let mut centers = Vec::with_capacity(m);
    for i in 0..m {
        centers.push(reader.point(&handle, &format!("center {i}"))?);
    }
    if let Some((line_no, line)) = reader.next_line() {
        return reader.fail(line_no, format!("unexpected trailing content `{line}`"));
    }
    Ok(FeasibilityInstance::from_parts(
        handle, target, start, centers, r, eps, seed,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use geodescent::feasibility;

    #[test]
    fn spd_instances_round_trip_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("instance.txt");
        let original = feasibility::generate_spd(6, 4, 1.0, 0.1, 13).unwrap();
        write_instance(&path, &original).unwrap();
        let loaded = read_instance(&path).unwrap();
        assert_eq!(original.target().coords(), loaded.target().coords());
        assert_eq!(original.start().coords(), loaded.start().coords());
        assert_eq!(original.seed(), loaded.seed());
        assert_eq!(original.radius(), loaded.radius());
        assert_eq!(original.slack(), loaded.slack());
        for (a, b) in original.centers().iter().zip(loaded.centers()) {
            for (x, y) in a.coords().iter().zip(b.coords().iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        // A second write of the loaded instance is byte-identical.
        let path2 = dir.path().join("instance2.txt");
        write_instance(&path2, &loaded).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn sphere_instances_round_trip_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("instance.txt");
        let original =
            feasibility::generate_sphere(50, 8, std::f64::consts::PI / 16.0, 1e-3, 21, None)
                .unwrap();
        write_instance(&path, &original).unwrap();
        let loaded = read_instance(&path).unwrap();
        for (x, y) in original
            .start()
            .coords()
            .iter()
            .zip(loaded.start().coords().iter())
        {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(original.centers().len(), loaded.centers().len());
    }

    #[test]
    fn malformed_files_fail_with_line_diagnostics() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");

        std::fs::write(&path, "manifold=torus\n").unwrap();
        let err = read_instance(&path).unwrap_err().to_string();
        assert!(err.contains(":1:") && err.contains("manifold"), "{err}");

        std::fs::write(&path, "manifold=sphere\nn=3\nm=1\nr=0.2\neps=0.01\n[target]\n1 0\n")
            .unwrap();
        let err = read_instance(&path).unwrap_err().to_string();
        assert!(err.contains("expected 3 values"), "{err}");

        std::fs::write(
            &path,
            "manifold=sphere\nn=2\nm=1\nr=0.2\neps=0.01\n[start]\n1 0\n",
        )
        .unwrap();
        let err = read_instance(&path).unwrap_err().to_string();
        assert!(err.contains("expected section `[target]`"), "{err}");
    }

    #[test]
    fn instances_violating_invariants_are_rejected_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("drifted.txt");
        // A center at distance 0.3 from the target, but r claims 0.2.
        let text = format!(
            "manifold=sphere\nn=2\nm=1\nr=0.2\neps=0.01\n[target]\n1 0\n[start]\n1 0\n[center 0]\n{} {}\n",
            format_float(0.3f64.cos()),
            format_float(0.3f64.sin()),
        );
        std::fs::write(&path, text).unwrap();
        let err = read_instance(&path).unwrap_err().to_string();
        assert!(err.contains("distance"), "{err}");
    }
}
