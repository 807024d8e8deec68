//! Leaderboards: standard competition ranking per score column and rank sums.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{GlasError, Result};

/// Whether larger or smaller scores are better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "higher" | "higher-better" | "max" => Ok(Direction::HigherBetter),
            "lower" | "lower-better" | "min" => Ok(Direction::LowerBetter),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

/// Metrics a leaderboard column may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    F1,
    DiceObj,
    HausdorffObj,
    Ari,
    DicePixel,
}

impl MetricId {
    /// Only the Hausdorff column ranks lower-is-better.
    pub fn direction(self) -> Direction {
        match self {
            MetricId::HausdorffObj => Direction::LowerBetter,
            _ => Direction::HigherBetter,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::F1 => "f1",
            MetricId::DiceObj => "dice_obj",
            MetricId::HausdorffObj => "hausdorff_obj",
            MetricId::Ari => "ari",
            MetricId::DicePixel => "dice_pixel",
        }
    }
}

impl std::str::FromStr for MetricId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f1" | "f1score" => Ok(MetricId::F1),
            "dice_obj" | "diceobj" | "object_dice" => Ok(MetricId::DiceObj),
            "hausdorff_obj" | "h_obj" | "hobj" | "object_hausdorff" => Ok(MetricId::HausdorffObj),
            "ari" => Ok(MetricId::Ari),
            "dice_pixel" | "dice" => Ok(MetricId::DicePixel),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

/// One (metric, test part) column of a score table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreColumn {
    pub metric: MetricId,
    pub part: String,
    pub direction: Direction,
}

impl ScoreColumn {
    pub fn name(&self) -> String {
        format!("{}:{}", self.metric.as_str(), self.part)
    }
}

/// Entries x columns matrix of scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    entries: Vec<String>,
    columns: Vec<ScoreColumn>,
    values: Vec<Vec<f64>>,
}

impl ScoreTable {
    /// Validates shape, names, directions and score values.
    pub fn new(
        entries: Vec<String>,
        columns: Vec<ScoreColumn>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if entries.is_empty() || columns.is_empty() {
            return Err(GlasError::Validation(
                "score table needs at least one entry and one column".into(),
            ));
        }
        if values.len() != entries.len() {
            return Err(GlasError::Validation(format!(
                "{} score rows for {} entries",
                values.len(),
                entries.len()
            )));
        }
        let mut names = BTreeSet::new();
        for (entry, row) in entries.iter().zip(&values) {
            if !names.insert(entry.as_str()) {
                return Err(GlasError::Validation(format!(
                    "duplicate entry name `{entry}`"
                )));
            }
            if row.len() != columns.len() {
                return Err(GlasError::Validation(format!(
                    "entry `{entry}` has {} scores, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            if let Some((c, v)) = columns.iter().zip(row).find(|(_, v)| !v.is_finite()) {
                return Err(GlasError::Validation(format!(
                    "entry `{entry}`, column `{}`: invalid score {v}",
                    c.name()
                )));
            }
        }
        let mut col_names = BTreeSet::new();
        for c in &columns {
            if !col_names.insert(c.name()) {
                return Err(GlasError::Validation(format!(
                    "duplicate column `{}`",
                    c.name()
                )));
            }
            if c.direction != c.metric.direction() {
                return Err(GlasError::Validation(format!(
                    "column `{}` must be {:?}",
                    c.name(),
                    c.metric.direction()
                )));
            }
        }
        Ok(ScoreTable {
            entries,
            columns,
            values,
        })
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn columns(&self) -> &[ScoreColumn] {
        &self.columns
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn column_values(&self, col: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[col]).collect()
    }

    /// Keeps only the columns accepted by `keep`, e.g. one test part or a
    /// different metric triple.
    pub fn select_columns(&self, keep: impl Fn(&ScoreColumn) -> bool) -> Result<ScoreTable> {
        let idx: Vec<usize> = (0..self.columns.len())
            .filter(|&i| keep(&self.columns[i]))
            .collect();
        ScoreTable::new(
            self.entries.clone(),
            idx.iter().map(|&i| self.columns[i].clone()).collect(),
            self.values
                .iter()
                .map(|row| idx.iter().map(|&i| row[i]).collect())
                .collect(),
        )
    }
}

/// Ranks and rank sums derived from a [`ScoreTable`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaderboard {
    pub entries: Vec<String>,
    pub columns: Vec<ScoreColumn>,
    /// `per_column_ranks[entry][column]`
    pub per_column_ranks: Vec<Vec<u32>>,
    pub rank_sums: Vec<u32>,
    /// Entry indices, best first.
    pub final_order: Vec<usize>,
    /// True for entries whose rank sum equals another entry's.
    pub tied: Vec<bool>,
}

impl Leaderboard {
    /// Entry names in final order.
    pub fn ordered_names(&self) -> Vec<&str> {
        self.final_order
            .iter()
            .map(|&i| self.entries[i].as_str())
            .collect()
    }
}

/// Standard competition ("1224") ranking: an entry's rank is one plus the
/// number of entries with a strictly better score.
pub fn rank_column(scores: &[f64], direction: Direction) -> Result<Vec<u32>> {
    if scores.is_empty() {
        return Err(GlasError::Validation("cannot rank an empty column".into()));
    }
    if let Some(i) = scores.iter().position(|v| v.is_nan()) {
        return Err(GlasError::Validation(format!("score {i} is NaN")));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    let better = |a: f64, b: f64| match direction {
        Direction::HigherBetter => b.total_cmp(&a),
        Direction::LowerBetter => a.total_cmp(&b),
    };
    order.sort_by(|&a, &b| better(scores[a], scores[b]));
    let mut ranks = vec![0u32; scores.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = if pos > 0 && scores[order[pos - 1]] == scores[i] {
            ranks[order[pos - 1]]
        } else {
            pos as u32 + 1
        };
    }
    Ok(ranks)
}

/// Ranks every column, sums ranks per entry and orders entries by ascending
/// rank sum. Tied sums are ordered by entry name and flagged.
pub fn rank_sum(table: &ScoreTable) -> Result<Leaderboard> {
    let n = table.entries.len();
    let mut per_column_ranks = vec![Vec::with_capacity(table.columns.len()); n];
    for (c, col) in table.columns.iter().enumerate() {
        for (row, r) in per_column_ranks
            .iter_mut()
            .zip(rank_column(&table.column_values(c), col.direction)?)
        {
            row.push(r);
        }
    }
    let rank_sums: Vec<u32> = per_column_ranks.iter().map(|r| r.iter().sum()).collect();
    let mut final_order: Vec<usize> = (0..n).collect();
    final_order.sort_by(|&a, &b| {
        rank_sums[a]
            .cmp(&rank_sums[b])
            .then_with(|| table.entries[a].cmp(&table.entries[b]))
    });
    let tied = (0..n)
        .map(|i| (0..n).any(|j| j != i && rank_sums[j] == rank_sums[i]))
        .collect();
    Ok(Leaderboard {
        entries: table.entries.clone(),
        columns: table.columns.clone(),
        per_column_ranks,
        rank_sums,
        final_order,
        tied,
    })
}
