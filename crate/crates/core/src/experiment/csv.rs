use std::fmt::Write as _;

use super::spec::ExperimentSpec;

/// A CSV document whose header comment embeds the resolved spec.
pub(crate) struct CsvTable {
    text: String,
}

impl CsvTable {
    pub(crate) fn new(spec: &ExperimentSpec, columns: &[&str]) -> Self {
        let mut text = format!("# irs-oob {} output\n", spec.kind);
        for line in spec.to_config_string().lines() {
            let _ = writeln!(text, "# {line}");
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub(crate) fn row(&mut self, fields: &[&dyn std::fmt::Display]) {
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            let _ = write!(self.text, "{f}");
        }
        self.text.push('\n');
    }

    pub(crate) fn finish(self) -> String {
        self.text
    }
}
