//! Certificate reports: one row per hypothesis with both sides of the
//! inequality, and an overall verdict.

use std::fmt;

/// Three-valued verdict for a numerically decided condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    /// Conjunction: any failure fails, otherwise any inconclusive row makes
    /// the whole inconclusive.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Holds,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A single checked hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateRow {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Relation the row asserts between `lhs` and `rhs`, e.g. "<=" or ">".
    pub relation: String,
    pub verdict: Verdict,
    pub note: String,
    /// Diagnostic rows are printed but excluded from the overall verdict.
    pub diagnostic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub title: String,
    pub rows: Vec<CertificateRow>,
    /// Conclusion stated when every hypothesis holds.
    pub conclusion: String,
}

impl CertificateReport {
    pub fn new(title: impl Into<String>, conclusion: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            rows: Vec::new(),
            conclusion: conclusion.into(),
        }
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        lhs: f64,
        relation: &str,
        rhs: f64,
        verdict: Verdict,
        note: impl Into<String>,
    ) -> &mut Self {
        self.rows.push(CertificateRow {
            name: name.into(),
            lhs,
            rhs,
            relation: relation.to_string(),
            verdict,
            note: note.into(),
            diagnostic: false,
        });
        self
    }

    /// Row whose verdict follows directly from comparing the two sides.
    pub fn compare(
        &mut self,
        name: impl Into<String>,
        lhs: f64,
        relation: &str,
        rhs: f64,
        note: impl Into<String>,
    ) -> &mut Self {
        let ok = match relation {
            "<" => lhs < rhs,
            "<=" => lhs <= rhs,
            ">" => lhs > rhs,
            ">=" => lhs >= rhs,
            "==" => lhs == rhs,
            other => panic!("unknown relation {other}"),
        };
        let verdict = if lhs.is_nan() || rhs.is_nan() {
            Verdict::Inconclusive
        } else {
            Verdict::from_bool(ok)
        };
        self.push(name, lhs, relation, rhs, verdict, note)
    }

    pub fn diagnostic(
        &mut self,
        name: impl Into<String>,
        lhs: f64,
        relation: &str,
        rhs: f64,
        verdict: Verdict,
        note: impl Into<String>,
    ) -> &mut Self {
        self.push(name, lhs, relation, rhs, verdict, note);
        if let Some(last) = self.rows.last_mut() {
            last.diagnostic = true;
        }
        self
    }

    pub fn extend(&mut self, other: CertificateReport) {
        self.rows.extend(other.rows);
    }

    pub fn overall(&self) -> Verdict {
        self.rows
            .iter()
            .filter(|r| !r.diagnostic)
            .fold(Verdict::Holds, |acc, r| acc.and(r.verdict))
    }

    pub fn row(&self, name: &str) -> Option<&CertificateRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Text rendering with aligned columns.
    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
        let mut out = format!("# {}\n", self.title);
        for r in &self.rows {
            out.push_str(&format!(
                "{:<width$}  {:>24}  {:<2}  {:<24}  {:<12}{}{}\n",
                r.name,
                crate::fmt17(r.lhs),
                r.relation,
                crate::fmt17(r.rhs),
                r.verdict.to_string(),
                if r.diagnostic { "  [diagnostic]" } else { "" },
                if r.note.is_empty() {
                    String::new()
                } else {
                    format!("  # {}", r.note)
                },
                width = width
            ));
        }
        let overall = self.overall();
        out.push_str(&format!("overall = {overall}\n"));
        if overall.holds() {
            out.push_str(&format!("conclusion = {}\n", self.conclusion));
        } else {
            out.push_str("conclusion = hypotheses not all verified; no conclusion drawn\n");
        }
        out
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_ignores_diagnostics() {
        let mut r = CertificateReport::new("t", "c");
        r.compare("a", 1.0, "<=", 2.0, "");
        r.diagnostic("d", 3.0, "<=", 2.0, Verdict::Fails, "");
        assert_eq!(r.overall(), Verdict::Holds);
        r.push("b", 0.0, "?", 0.0, Verdict::Inconclusive, "");
        assert_eq!(r.overall(), Verdict::Inconclusive);
        r.compare("c", 3.0, "<", 2.0, "");
        assert_eq!(r.overall(), Verdict::Fails);
    }

    #[test]
    fn nan_side_is_inconclusive() {
        let mut r = CertificateReport::new("t", "c");
        r.compare("a", f64::NAN, "<=", 2.0, "");
        assert_eq!(r.rows[0].verdict, Verdict::Inconclusive);
    }
}
