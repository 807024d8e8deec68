use std::path::Path;

use crate::error::{GlasError, Result};
use crate::ranking::{Direction, MetricId, ScoreColumn, ScoreTable};

/// Parses a score table from CSV text.
///
/// ```text
/// # comment lines start with '#'
/// entry,f1:A,f1:B,hausdorff_obj:A
/// direction,higher,higher,lower
/// TeamX,0.91,0.72,45.4
/// ```
///
/// Column headers are `metric:part`; the second row gives each column's direction.
pub fn parse_scores(text: &str) -> Result<ScoreTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let invalid = |m: String| GlasError::Validation(m);

    let header = records
        .next()
        .ok_or_else(|| invalid("score table is empty".into()))??;
    if header.len() < 2 {
        return Err(invalid(
            "score table needs an entry column and at least one score column".into(),
        ));
    }
    let mut columns = Vec::with_capacity(header.len() - 1);
    for name in header.iter().skip(1) {
        let (metric, part) = name
            .split_once(':')
            .ok_or_else(|| invalid(format!("column `{name}` is not of the form metric:part")))?;
        let metric: MetricId = metric
            .parse()
            .map_err(|e: String| invalid(format!("column `{name}`: {e}")))?;
        columns.push(ScoreColumn {
            metric,
            part: part.to_string(),
            direction: metric.direction(),
        });
    }

    let dir_row = records
        .next()
        .ok_or_else(|| invalid("missing `direction` row".into()))??;
    if !dir_row
        .get(0)
        .is_some_and(|c| c.eq_ignore_ascii_case("direction"))
    {
        return Err(invalid(format!(
            "second row must start with `direction`, found `{}`",
            dir_row.get(0).unwrap_or("")
        )));
    }
    if dir_row.len() != header.len() {
        return Err(invalid(format!(
            "direction row has {} cells, header has {}",
            dir_row.len(),
            header.len()
        )));
    }
    for (col, cell) in columns.iter_mut().zip(dir_row.iter().skip(1)) {
        col.direction = cell
            .parse::<Direction>()
            .map_err(|e| invalid(format!("column `{}`: {e}", col.name())))?;
    }

    let mut entries = Vec::new();
    let mut values = Vec::new();
    for record in records {
        let record = record?;
        let entry = record.get(0).unwrap_or("").to_string();
        if entry.is_empty() {
            return Err(invalid("row with an empty entry name".into()));
        }
        let mut row = Vec::with_capacity(columns.len());
        for (c, col) in columns.iter().enumerate() {
            let cell = record.get(c + 1).unwrap_or("");
            if cell.is_empty() {
                return Err(invalid(format!(
                    "entry `{entry}` has no value in column `{}`",
                    col.name()
                )));
            }
            let v: f64 = cell.parse().map_err(|_| {
                invalid(format!(
                    "entry `{entry}`, column `{}`: `{cell}` is not a number",
                    col.name()
                ))
            })?;
            row.push(v);
        }
        if record.len() > columns.len() + 1 {
            return Err(invalid(format!(
                "entry `{entry}` has more cells than the header"
            )));
        }
        entries.push(entry);
        values.push(row);
    }
    ScoreTable::new(entries, columns, values)
}

/// Loads a score table from a CSV file.
pub fn load_scores(path: impl AsRef<Path>) -> Result<ScoreTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| GlasError::io(path, e))?;
    parse_scores(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row() {
        let t =
            parse_scores("entry,f1:A,hausdorff_obj:A\ndirection,higher,lower\nx,0.9,45\n").unwrap();
        assert_eq!(t.entries(), &["x".to_string()]);
        assert_eq!(t.columns()[1].direction, Direction::LowerBetter);
    }

    #[test]
    fn blank_cell_names_entry_and_column() {
        let err = parse_scores("entry,f1:A,f1:B\ndirection,higher,higher\nx,0.9,\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, GlasError::Validation(_)));
        assert!(msg.contains("`x`") && msg.contains("f1:B"), "{msg}");
    }

    #[test]
    fn missing_direction_row() {
        assert!(parse_scores("entry,f1:A\nx,0.9\n").is_err());
    }

    #[test]
    fn wrong_direction_rejected() {
        assert!(parse_scores("entry,f1:A\ndirection,lower\nx,0.9\n").is_err());
    }
}
