//! Single-vote survey files: one `respondent_id,category` row per respondent.

use std::collections::{HashMap, HashSet};
use std::io::Read;

use prefweights::PreferenceCounts;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("survey has no rows")]
    Empty,
    #[error("expected header `respondent_id,category`, found `{0}`")]
    Header(String),
    #[error("line {line}: respondent {id:?} already voted")]
    DuplicateRespondent { line: u64, id: String },
    #[error("line {line}: unknown category {category:?}")]
    UnknownCategory { line: u64, category: String },
    #[error("line {line}: expected 2 fields, found {found}")]
    Fields { line: u64, found: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Counts(#[from] prefweights::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Survey {
    pub categories: Vec<String>,
    pub counts: PreferenceCounts,
}

/// Tallies votes per category. Without `declared`, categories are ordered by
/// first appearance.
pub fn ingest<R: Read>(input: R, declared: Option<&[String]>) -> Result<Survey, SurveyError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let header = reader.headers()?.clone();
    if header.len() != 2 || &header[0] != "respondent_id" || &header[1] != "category" {
        return Err(SurveyError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }

    let mut categories: Vec<String> = declared.map(<[String]>::to_vec).unwrap_or_default();
    let mut slot: HashMap<String, usize> = categories.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let mut counts = vec![0u64; categories.len()];
    let mut seen = HashSet::new();
    let mut rows = 0;

    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(SurveyError::Fields {
                line,
                found: record.len(),
            });
        }
        let (id, category) = (&record[0], &record[1]);
        if !seen.insert(id.to_string()) {
            return Err(SurveyError::DuplicateRespondent {
                line,
                id: id.to_string(),
            });
        }
        let i = match slot.get(category) {
            Some(&i) => i,
            None if declared.is_some() => {
                return Err(SurveyError::UnknownCategory {
                    line,
                    category: category.to_string(),
                })
            }
            None => {
                categories.push(category.to_string());
                counts.push(0);
                slot.insert(category.to_string(), categories.len() - 1);
                categories.len() - 1
            }
        };
        counts[i] += 1;
        rows += 1;
    }
    if rows == 0 {
        return Err(SurveyError::Empty);
    }
    Ok(Survey {
        categories,
        counts: PreferenceCounts::new(counts)?,
    })
}
