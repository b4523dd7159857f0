//! Text formats for instances and solutions. All numbers are exact fractions.
//!
//! Instance file:
//!
//! ```text
//! # comment lines are allowed anywhere; `#` starts a comment
//! D W H
//! N
//! length volume value     (N rows)
//! ```
//!
//! Solution file: one row per placement,
//! `item holder origin_x origin_z depth height packed_volume`,
//! followed by `objective <value>`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{Instance, InvalidInstance, Placement, RawItem, Solution};
use crate::exact::{ParseFractionError, Rational};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("expected {expected} item rows, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Invalid(#[from] InvalidInstance),
}

/// An instance together with the comment lines of the file it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub instance: Instance,
    pub comments: Vec<String>,
}

struct Lines<'a> {
    rows: Vec<(usize, Vec<&'a str>)>,
    comments: Vec<String>,
}

fn split_lines(text: &str) -> Lines<'_> {
    let mut rows = Vec::new();
    let mut comments = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let (body, comment) = match line.find('#') {
            Some(pos) => (&line[..pos], Some(line[pos + 1..].trim())),
            None => (line, None),
        };
        if let Some(c) = comment {
            comments.push(c.to_string());
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !fields.is_empty() {
            rows.push((k + 1, fields));
        }
    }
    Lines { rows, comments }
}

fn fraction(line: usize, token: &str) -> Result<Rational, FormatError> {
    Rational::parse_fraction(token).map_err(|e| FormatError::Syntax {
        line,
        message: match e {
            ParseFractionError::Malformed(t) => format!("malformed fraction `{t}`"),
            ParseFractionError::ZeroDenominator(t) => format!("zero denominator in `{t}`"),
        },
    })
}

fn expect_fields(line: usize, fields: &[&str], n: usize, what: &str) -> Result<(), FormatError> {
    if fields.len() != n {
        return Err(FormatError::Syntax {
            line,
            message: format!("expected {n} fields ({what}), found {}", fields.len()),
        });
    }
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, FormatError> {
    let Lines { rows, comments } = split_lines(text);
    let mut it = rows.iter();
    let (line, dims) = it.next().ok_or(FormatError::Syntax {
        line: 1,
        message: "missing container dimensions".into(),
    })?;
    expect_fields(*line, dims, 3, "D W H")?;
    let depth = fraction(*line, dims[0])?;
    let width = fraction(*line, dims[1])?;
    let height = fraction(*line, dims[2])?;

    let (line, count) = it.next().ok_or(FormatError::Syntax {
        line: line + 1,
        message: "missing item count".into(),
    })?;
    expect_fields(*line, count, 1, "item count")?;
    let n: usize = count[0].parse().map_err(|_| FormatError::Syntax {
        line: *line,
        message: format!("malformed item count `{}`", count[0]),
    })?;

    let mut raw = Vec::with_capacity(n);
    for (line, fields) in it {
        expect_fields(*line, fields, 3, "length volume value")?;
        raw.push(RawItem::new(
            fraction(*line, fields[0])?,
            fraction(*line, fields[1])?,
            fraction(*line, fields[2])?,
        ));
    }
    if raw.len() != n {
        return Err(FormatError::CountMismatch {
            expected: n,
            found: raw.len(),
        });
    }
    let instance = Instance::new(depth, width, height, raw)?;
    Ok(InstanceFile { instance, comments })
}

pub fn format_instance(instance: &Instance, header: &[String]) -> String {
    let mut out = String::new();
    for line in header {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(
        out,
        "{} {} {}",
        instance.depth, instance.width, instance.height
    );
    let _ = writeln!(out, "{}", instance.len());
    for item in instance.items() {
        let _ = writeln!(out, "{} {} {}", item.length, item.volume, item.value);
    }
    out
}

fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<InstanceFile, FormatError> {
    parse_instance(&read_text(path.as_ref())?)
}

/// Writes items in canonical order, each header line as a `#` comment.
pub fn write_instance(
    path: impl AsRef<Path>,
    instance: &Instance,
    header: &[String],
) -> Result<(), FormatError> {
    write_text(path.as_ref(), &format_instance(instance, header))
}

pub fn format_solution(solution: &Solution) -> String {
    let mut out = String::new();
    for p in &solution.placements {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {}",
            p.item, p.holder, p.origin_x, p.origin_z, p.depth, p.height, p.volume
        );
    }
    let _ = writeln!(out, "objective {}", solution.value);
    out
}

pub fn parse_solution(text: &str) -> Result<Solution, FormatError> {
    let Lines { rows, .. } = split_lines(text);
    let mut placements = Vec::new();
    let mut value = None;
    for (line, fields) in &rows {
        let line = *line;
        if value.is_some() {
            return Err(FormatError::Syntax {
                line,
                message: "content after the objective line".into(),
            });
        }
        if fields[0] == "objective" {
            expect_fields(line, fields, 2, "objective value")?;
            value = Some(fraction(line, fields[1])?);
            continue;
        }
        expect_fields(
            line,
            fields,
            7,
            "item holder origin_x origin_z depth height volume",
        )?;
        let index = |k: usize| -> Result<usize, FormatError> {
            fields[k].parse().map_err(|_| FormatError::Syntax {
                line,
                message: format!("malformed index `{}`", fields[k]),
            })
        };
        placements.push(Placement {
            item: index(0)?,
            holder: index(1)?,
            origin_x: fraction(line, fields[2])?,
            origin_z: fraction(line, fields[3])?,
            depth: fraction(line, fields[4])?,
            height: fraction(line, fields[5])?,
            volume: fraction(line, fields[6])?,
        });
    }
    let value = value.ok_or(FormatError::Syntax {
        line: rows.last().map_or(1, |(l, _)| l + 1),
        message: "missing objective line".into(),
    })?;
    Ok(Solution { placements, value })
}

pub fn read_solution(path: impl AsRef<Path>) -> Result<Solution, FormatError> {
    parse_solution(&read_text(path.as_ref())?)
}

pub fn write_solution(path: impl AsRef<Path>, solution: &Solution) -> Result<(), FormatError> {
    write_text(path.as_ref(), &format_solution(solution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn reads_minimal_file() {
        let f = parse_instance("1 1 1\n1\n1/2 1/4 3/10\n").unwrap();
        let inst = f.instance;
        assert_eq!(inst.depth, r(1, 1));
        assert_eq!(inst.width, r(1, 1));
        assert_eq!(inst.height, r(1, 1));
        assert_eq!(inst.len(), 1);
        assert_eq!(inst.item(0).length, r(1, 2));
        assert_eq!(inst.item(0).volume, r(1, 4));
        assert_eq!(inst.item(0).value, r(3, 10));
    }

    #[test]
    fn comments_are_kept_and_ignored() {
        let text = "# family=easy\n1 1 1 # container\n\n2\n1 1/2 1\n# mid\n1/2 1/2 2\n";
        let f = parse_instance(text).unwrap();
        assert_eq!(f.comments, vec!["family=easy", "container", "mid"]);
        assert_eq!(f.instance.len(), 2);
    }

    #[test]
    fn zero_denominator_reports_line() {
        let err = parse_instance("1 1 1\n2\n1/2 1/4 1\n1/0 1/4 1\n").unwrap_err();
        match err {
            FormatError::Syntax { line, message } => {
                assert_eq!(line, 4);
                assert!(message.contains("1/0"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn count_mismatch() {
        let err = parse_instance("1 1 1\n3\n1/2 1/4 1\n").unwrap_err();
        assert!(matches!(
            err,
            FormatError::CountMismatch {
                expected: 3,
                found: 1
            }
        ));
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(
            parse_instance("1 1\n1\n1 1 1\n"),
            Err(FormatError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_instance("1 1 1\nx\n1 1 1\n"),
            Err(FormatError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_instance("1 1 1\n1\n1 1 1.5\n"),
            Err(FormatError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_instance("1 1 1\n1\n2 1 1\n"),
            Err(FormatError::Invalid(_))
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_instance("/nonexistent/semifluid.txt").unwrap_err();
        assert!(matches!(err, FormatError::Io { .. }));
    }

    #[test]
    fn solution_text_round_trip() {
        let sol = Solution {
            placements: vec![Placement {
                item: 0,
                holder: 3,
                origin_x: r(1, 3),
                origin_z: r(0, 1),
                depth: r(1, 2),
                height: r(2, 7),
                volume: r(1, 7),
            }],
            value: r(5, 11),
        };
        let text = format_solution(&sol);
        assert_eq!(text, "0 3 1/3 0 1/2 2/7 1/7\nobjective 5/11\n");
        assert_eq!(parse_solution(&text).unwrap(), sol);
        assert!(parse_solution("0 3 1/3 0 1/2 2/7 1/7\n").is_err());
        assert!(parse_solution("objective 1\n0 0 0 0 1 1 1\n").is_err());
    }

    proptest! {
        #[test]
        fn instance_text_round_trip(
            dims in (1i64..50, 1i64..50, 1i64..50),
            spec in prop::collection::vec((1i64..=100, 1i64..1000, 0i64..1000, 1i64..37), 1..10)
        ) {
            let raw: Vec<RawItem> = spec
                .iter()
                .map(|&(l, v, w, d)| RawItem::new(r(l, 100), r(v, d), r(w, 1000)))
                .collect();
            let inst = Instance::new(r(dims.0, dims.0), r(dims.1, 7), r(dims.2, 3), raw).unwrap();
            let header = vec!["seed=3".to_string()];
            let text = format_instance(&inst, &header);
            let back = parse_instance(&text).unwrap();
            prop_assert_eq!(&back.instance.depth, &inst.depth);
            prop_assert_eq!(&back.instance.width, &inst.width);
            prop_assert_eq!(&back.instance.height, &inst.height);
            prop_assert_eq!(back.instance.raw_items(), inst.raw_items());
            prop_assert_eq!(format_instance(&back.instance, &header), text);
            prop_assert_eq!(back.comments, header);
        }
    }
}
