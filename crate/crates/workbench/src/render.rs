//! Plain-text renderings of the reports.

use std::fmt::Write;

use perfchain::lang::line_col;
use perfchain::model::{InfluencingOptionsReport, OptionHotspotsReport, TermContribution};
use perfchain::profile_diff::{PresenceStatus, ProfileDiff, DISPLAY_THRESHOLD};
use perfchain::slice::{ChainWarning, ChopResult, Role};

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (c, cell) in r.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            if c + 1 < r.len() {
                let _ = write!(line, "{cell:<w$}", w = widths[c]);
            } else {
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn terms(ts: &[TermContribution]) -> String {
    ts.iter()
        .map(|t| format!("{}·{}", t.coefficient, t.term))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn influencing_options(r: &InfluencingOptionsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "from {}  {:.1} s", r.from_config, r.from_time);
    let _ = writeln!(out, "to   {}  {:.1} s", r.to_config, r.to_time);
    if r.approximate {
        out.push_str("model is approximate\n");
    }
    out.push('\n');
    if r.influences.is_empty() {
        out.push_str("no influencing options\n");
    } else {
        let mut rows = vec![vec!["options".to_string(), "delta".into()]];
        for i in &r.influences {
            rows.push(vec![i.options.join(", "), format!("{:+.1} s", i.delta)]);
        }
        rows.push(vec!["total".into(), format!("{:+.1} s", r.total_delta())]);
        out.push_str(&table(&rows));
    }
    if !r.unexplained_changes.is_empty() {
        let _ = writeln!(out, "\nno performance influence: {}", r.unexplained_changes.join(", "));
    }
    out
}

pub fn option_hotspots(r: &OptionHotspotsReport) -> String {
    let mut out = String::new();
    if r.hotspots.is_empty() {
        out.push_str("no option hotspots\n");
    } else {
        let mut rows = vec![vec!["function".to_string(), "delta".into(), "options".into(), "terms".into()]];
        for h in &r.hotspots {
            rows.push(vec![
                h.function.clone(),
                format!("{:+.1} s", h.delta),
                h.options.join(", "),
                terms(&h.terms),
            ]);
        }
        out.push_str(&table(&rows));
    }
    if r.omitted > 0 {
        let _ = writeln!(out, "{} more below {:.2} s, together {:+.2} s", r.omitted, r.min_delta, r.omitted_delta);
    }
    out
}

pub fn profile_diff(d: &ProfileDiff) -> String {
    let v = d.visible(DISPLAY_THRESHOLD);
    let mut rows = vec![vec![
        String::new(),
        "function".to_string(),
        "from".into(),
        "to".into(),
        "delta".into(),
        "self delta".into(),
        "status".into(),
    ]];
    for e in &v.rows {
        let status = match e.status {
            PresenceStatus::Both if e.stack_diff.is_unchanged() => "same stacks",
            PresenceStatus::Both => "stacks changed",
            PresenceStatus::OnlyA => "only in from",
            PresenceStatus::OnlyB => "only in to",
        };
        rows.push(vec![
            if e.is_option_hotspot { "*" } else { "" }.into(),
            e.function.clone(),
            format!("{:.1}", e.time_a),
            format!("{:.1}", e.time_b),
            format!("{:+.1}", e.delta),
            format!("{:+.1}", e.self_delta()),
            status.into(),
        ]);
    }
    let mut out = table(&rows);
    if v.hidden > 0 {
        let _ = writeln!(out, "{} functions below {:.2} s, self delta {:+.2} s", v.hidden, DISPLAY_THRESHOLD, v.hidden_self_delta);
    }
    let _ = writeln!(out, "total self delta {:+.1} s", d.self_delta_sum());
    out
}

pub fn cause_effect(c: &ChopResult, file: &str, source: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "chop {}  options: {}  hotspots: {}", c.chop_id, c.options.join(", "), c.hotspot_functions.join(", "));
    for w in &c.warnings {
        match w {
            ChainWarning::NoSources { options } => {
                let _ = writeln!(out, "warning: never read: {}", options.join(", "));
            }
            ChainWarning::NoPath => out.push_str("warning: no cause-effect path covered\n"),
        }
    }
    if c.method_graph.nodes.is_empty() {
        return out;
    }
    out.push_str("\nmethods\n");
    for n in &c.method_graph.nodes {
        let role = match n.role {
            Role::Source => "source",
            Role::Target => "target",
            Role::Intermediate => "intermediate",
        };
        let _ = writeln!(out, "  {:<13}{}", role, n.function);
    }
    if !c.method_graph.edges.is_empty() {
        out.push_str("\ndependences\n");
        for e in &c.method_graph.edges {
            let _ = writeln!(out, "  {} -> {}", e.from, e.to);
        }
    }
    if let Some(hs) = c.highlights.get(file) {
        out.push_str("\nstatements\n");
        for h in hs {
            let (line, col) = line_col(source, h.span.start);
            let text = source[h.span.start..h.span.end].lines().next().unwrap_or("");
            let _ = writeln!(out, "  {file}:{line}:{col}  {}", text.trim());
        }
    }
    out
}
