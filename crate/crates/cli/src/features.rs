//! Feature and target extraction from telemetry-style tables.
//!
//! Columns resolve measurement-first: for a canonical name like `p1` the
//! sensed channel `p1_sensed` is used when present, the bare column
//! otherwise. Simulator telemetry therefore trains on what the sensors
//! report (the realistic setting) while plain user files with bare
//! `p1,p2,x,q` columns work unchanged. Ground-truth evaluation reads the
//! bare `q` column strictly.

use crate::table::Table;

/// Resolves a canonical channel to a concrete column, sensed-first.
pub fn resolve_column(table: &Table, canonical: &str) -> Result<Vec<f64>, String> {
    let sensed = format!("{canonical}_sensed");
    if table.column_index(&sensed).is_some() {
        table.f64_column(&sensed)
    } else if table.column_index(canonical).is_some() {
        table.f64_column(canonical)
    } else {
        Err(format!("missing column `{canonical}` (also looked for `{sensed}`)"))
    }
}

/// A feature matrix with its column names and, for lagged extraction, the
/// original row index behind each output row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// `source_rows[j]` is the table row that produced output row `j`
    /// (the first `lagged` table rows produce no output).
    pub source_rows: Vec<usize>,
}

/// Extracts the base columns and, when `lagged > 0`, appends the features
/// of the `lagged` previous samples to each row (dropping the first
/// `lagged` rows, which have no complete history).
pub fn extract_features(
    table: &Table,
    base_names: &[&str],
    lagged: usize,
) -> Result<FeatureMatrix, String> {
    let columns: Vec<Vec<f64>> = base_names
        .iter()
        .map(|name| resolve_column(table, name))
        .collect::<Result<_, _>>()?;
    let n = table.len();
    let mut names: Vec<String> = base_names.iter().map(|s| s.to_string()).collect();
    for lag in 1..=lagged {
        for base in base_names {
            names.push(format!("{base}_lag{lag}"));
        }
    }
    let mut rows = Vec::with_capacity(n.saturating_sub(lagged));
    let mut source_rows = Vec::with_capacity(n.saturating_sub(lagged));
    for i in lagged..n {
        let mut row = Vec::with_capacity(names.len());
        for lag in 0..=lagged {
            for col in &columns {
                row.push(col[i - lag]);
            }
        }
        rows.push(row);
        source_rows.push(i);
    }
    Ok(FeatureMatrix {
        names,
        rows,
        source_rows,
    })
}

/// Recovers the base column names from a saved model's feature names.
pub fn base_names(feature_names: &[String], lagged: usize) -> Vec<String> {
    let base_len = feature_names.len() / (lagged + 1);
    feature_names[..base_len].to_vec()
}
