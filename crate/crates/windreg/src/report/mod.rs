//! Report emission: CSV tables and SVG figures with fixed file names, built
//! deterministically so re-runs produce byte-identical output.

use std::fs;
use std::path::PathBuf;

use thiserror::Error;

pub mod figures;
pub mod svg;
pub mod tables;

pub use figures::{fit_plot, overlay_plot, scatter_matrix, COLUMN_LABELS};
pub use tables::{
    emit_tables, render_cv_csv, render_errors_csv, render_importance_csv, render_stats_csv,
    validate_importance,
};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("dataset has too few rows to plot")]
    EmptyDataset,
    #[error("series length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("incomplete results: {0}")]
    IncompleteResults(String),
    #[error(
        "importance values sum to {sum:.6}, expected 1 within {}",
        tables::IMPORTANCE_TOLERANCE
    )]
    UnnormalizedImportance { sum: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Documents queued for one output directory: tables first, then figures,
/// written in insertion order.
pub struct ReportBundle {
    dir: PathBuf,
    tables: Vec<(String, String)>,
    figures: Vec<(String, String)>,
}

impl ReportBundle {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into(), tables: Vec::new(), figures: Vec::new() }
    }

    pub fn add_table(&mut self, name: &str, content: String) {
        assert!(name.ends_with(".csv"), "table files must end in .csv");
        self.tables.push((String::from(name), content));
    }

    pub fn add_figure(&mut self, name: &str, content: String) {
        assert!(name.ends_with(".svg"), "figure files must end in .svg");
        self.figures.push((String::from(name), content));
    }

    /// File names in write order.
    pub fn file_names(&self) -> Vec<&str> {
        self.tables.iter().chain(&self.figures).map(|(name, _)| name.as_str()).collect()
    }

    /// Creates the directory if needed and writes every document.
    pub fn write(&self) -> Result<Vec<PathBuf>, ReportError> {
        fs::create_dir_all(&self.dir)?;
        let mut paths = Vec::with_capacity(self.tables.len() + self.figures.len());
        for (name, content) in self.tables.iter().chain(&self.figures) {
            let path = self.dir.join(name);
            fs::write(&path, content)?;
            paths.push(path);
        }
        Ok(paths)
    }
}
