use std::fmt::Write as _;

/// One checked value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub id: String,
    pub anchor: String,
    pub expected: String,
    pub computed: String,
}

impl Row {
    pub fn new(id: impl Into<String>, anchor: &str, expected: impl Into<String>, computed: impl Into<String>) -> Self {
        Row { id: id.into(), anchor: anchor.to_string(), expected: expected.into(), computed: computed.into() }
    }

    /// A row passes exactly when the two renderings agree.
    pub fn passed(&self) -> bool {
        self.expected == self.computed
    }

    pub fn status(&self) -> &'static str {
        if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Tsv,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub rows: Vec<Row>,
    /// Free-form context such as the fuzz seed.
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.to_string(), ..Default::default() }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn passed_count(&self) -> usize {
        self.rows.iter().filter(|r| r.passed()).count()
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(Row::passed)
    }

    pub fn first_failure(&self) -> Option<&Row> {
        self.rows.iter().find(|r| !r.passed())
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Tsv => self.to_tsv(),
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("id\tanchor\texpected\tcomputed\tstatus\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.id, r.anchor, r.expected, r.computed, r.status());
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.notes {
            let _ = writeln!(out, "# {n}");
        }
        for r in &self.rows {
            let _ = writeln!(out, "[{}] {}  ({})", r.status(), r.id, r.anchor);
            if r.passed() {
                let _ = writeln!(out, "    value:    {}", r.computed);
            } else {
                let _ = writeln!(out, "    expected: {}", r.expected);
                let _ = writeln!(out, "    computed: {}", r.computed);
            }
        }
        let _ = writeln!(out, "{}: {}/{} checks pass", self.suite, self.passed_count(), self.rows.len());
        out
    }
}
