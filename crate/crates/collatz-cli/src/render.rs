//! Text, JSON and CSV emitters. Text output mirrors the bundled reference
//! fixtures byte for byte; JSON is the full report; CSV is a flat data table.

use collatz::core::{Term, Trajectory};
use collatz::enumeration::{FibRow, LengthClassReport};
use collatz::limits::LimitReport;
use collatz::stopping::{
    Conjecture3Report, Conjecture4Report, CountTable, SigmaClassReport, StoppingProfile,
    TauClassReport,
};
use collatz::subseq::{Decomposition, Kind, Subsequence, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

pub fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

pub fn terms_line(terms: &[Term]) -> String {
    join(terms, ", ")
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn trajectory(t: &Trajectory, format: Format) -> String {
    match format {
        Format::Text => format!("{}\n", terms_line(&t.terms)),
        Format::Json => json(t),
        Format::Csv => {
            let mut out = String::from("index,term\n");
            for (i, term) in t.terms.iter().enumerate() {
                out.push_str(&format!("{i},{term}\n"));
            }
            out
        }
    }
}

pub fn subsequence(sub: &Subsequence, format: Format) -> String {
    match format {
        Format::Text => {
            let kind = match sub.kind() {
                Kind::T => "t",
                Kind::H => "h",
            };
            let variant = match sub.variant() {
                Variant::A => "A",
                Variant::B => "B",
            };
            let mut out = format!("{kind}={}, variant={variant}\n", sub.length_index());
            out.push_str(&format!("{}\n", terms_line(sub.terms())));
            if let (Some(mo), Some(me)) = (sub.max_odd(), sub.max_even()) {
                out.push_str(&format!("max_odd={mo}, max_even={me}\n"));
            }
            out
        }
        Format::Json => json(sub),
        Format::Csv => {
            let mut out = String::from("index,term\n");
            for (i, term) in sub.terms().iter().enumerate() {
                out.push_str(&format!("{i},{term}\n"));
            }
            out
        }
    }
}

pub fn decomposition(d: &Decomposition, format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = String::new();
            if !d.preamble.is_empty() {
                out.push_str(&format!("preamble: {}\n", terms_line(&d.preamble)));
            }
            for entry in &d.entries {
                out.push_str(&format!("({})\n", terms_line(entry.subsequence.terms())));
            }
            out
        }
        Format::Json => json(d),
        Format::Csv => {
            let mut out = String::from("block,entry_offset,index,term\n");
            for (i, term) in d.preamble.iter().enumerate() {
                out.push_str(&format!("preamble,0,{i},{term}\n"));
            }
            for (b, entry) in d.entries.iter().enumerate() {
                for (i, term) in entry.subsequence.terms().iter().enumerate() {
                    out.push_str(&format!("{b},{},{i},{term}\n", entry.entry_offset));
                }
            }
            out
        }
    }
}

/// `h=2` header plus `9 (mod 48)` class line, the appendix-faithful shape.
pub fn length_block(report: &LengthClassReport) -> String {
    format!(
        "{}\n{} (mod {})\n",
        report.header(),
        join(&report.classes, ", "),
        report.modulus
    )
}

pub fn length_report(report: &LengthClassReport, format: Format) -> String {
    match format {
        Format::Text => length_block(report),
        Format::Json => json(report),
        Format::Csv => {
            let kind = match report.kind {
                Kind::T => "t",
                Kind::H => "h",
            };
            let mut out = String::from("kind,length,modulus,residue\n");
            for r in &report.classes {
                out.push_str(&format!("{kind},{},{},{r}\n", report.length, report.modulus));
            }
            out
        }
    }
}

pub fn fib_rows(kind: Kind, rows: &[FibRow], format: Format) -> String {
    let k = match kind {
        Kind::T => "t",
        Kind::H => "h",
    };
    match format {
        Format::Text => {
            let mut out = String::new();
            for row in rows {
                out.push_str(&format!(
                    "{k}={}: observed={} expected={} {}\n",
                    row.length,
                    row.observed,
                    row.expected,
                    if row.matches { "ok" } else { "MISMATCH" }
                ));
            }
            out
        }
        Format::Json => json(&rows),
        Format::Csv => {
            let mut out = String::from("kind,length,observed,expected,matches\n");
            for row in rows {
                out.push_str(&format!(
                    "{k},{},{},{},{}\n",
                    row.length, row.observed, row.expected, row.matches
                ));
            }
            out
        }
    }
}

/// `sigma=7` header plus `7, 15, 59 (mod 128)` class line.
pub fn sigma_block(report: &SigmaClassReport) -> String {
    format!(
        "sigma={}\n{} (mod {})\n",
        report.sigma,
        join(&report.classes, ", "),
        report.modulus
    )
}

pub fn sigma_report(report: &SigmaClassReport, format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = sigma_block(report);
            for d in &report.discrepancies {
                out.push_str(&format!(
                    "discrepancy: representative {} simulated {:?} expected {}\n",
                    d.representative, d.simulated_sigma, d.expected_sigma
                ));
            }
            out
        }
        Format::Json => json(report),
        Format::Csv => {
            let mut out = String::from("n,sigma,modulus,residue\n");
            for r in &report.classes {
                out.push_str(&format!("{},{},{},{r}\n", report.n, report.sigma, report.modulus));
            }
            out
        }
    }
}

/// One `n=8, sigma=13, A_3(n)=40` block per tau group.
pub fn tau_blocks(report: &TauClassReport) -> String {
    let mut blocks = Vec::new();
    for group in &report.groups {
        blocks.push(format!(
            "n={}, sigma={}, A_{}(n)={}\n{} (mod {})\n",
            report.n,
            report.sigma,
            group.tau,
            group.classes.len(),
            join(&group.classes, ", "),
            report.modulus
        ));
    }
    blocks.join("\n")
}

pub fn tau_report(report: &TauClassReport, format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = tau_blocks(report);
            for v in &report.violations {
                out.push_str(&format!(
                    "uniformity violation: residue {} representative {} observed {:?} expected {:?}\n",
                    v.residue, v.representative, v.observed, v.expected
                ));
            }
            out
        }
        Format::Json => json(report),
        Format::Csv => {
            let mut out = String::from("n,sigma,modulus,tau,residue\n");
            for group in &report.groups {
                for r in &group.classes {
                    out.push_str(&format!(
                        "{},{},{},{},{r}\n",
                        report.n, report.sigma, report.modulus, group.tau
                    ));
                }
            }
            out
        }
    }
}

/// Tab-separated table: `n` and `sigma` header rows, one row per tau, and the
/// independently computed `z` row. Empty cells print as `.`.
pub fn count_table(table: &CountTable, format: Format) -> String {
    match format {
        Format::Text => {
            let ns: Vec<u64> = (2..=table.n_max).collect();
            let mut out = format!("n\t{}\n", join(&ns, "\t"));
            let sigmas: Vec<String> = ns
                .iter()
                .map(|n| table.sigma_of_n.get(n).map_or(".".into(), |s| s.to_string()))
                .collect();
            out.push_str(&format!("sigma\t{}\n", sigmas.join("\t")));
            for (tau, row) in &table.counts {
                let cells: Vec<String> = ns
                    .iter()
                    .map(|n| row.get(n).map_or(".".into(), |c| c.to_string()))
                    .collect();
                out.push_str(&format!("tau={tau}\t{}\n", cells.join("\t")));
            }
            let zs: Vec<String> = ns
                .iter()
                .map(|n| table.z.get(n).map_or(".".into(), |z| z.to_string()))
                .collect();
            out.push_str(&format!("z\t{}\n", zs.join("\t")));
            out
        }
        Format::Json => json(table),
        Format::Csv => {
            let mut out = String::from("metric,tau,n,value\n");
            for (tau, row) in &table.counts {
                for (n, count) in row {
                    out.push_str(&format!("A,{tau},{n},{count}\n"));
                }
            }
            for (n, z) in &table.z {
                out.push_str(&format!("z,,{n},{z}\n"));
            }
            for (n, s) in &table.sigma_of_n {
                out.push_str(&format!("sigma,,{n},{s}\n"));
            }
            out
        }
    }
}

pub fn conjecture3(report: &Conjecture3Report, format: Format) -> String {
    match format {
        Format::Text => format!(
            "n={}\nz={}\ntau_counts={}\nhalf_sum={}\n{}\n",
            report.n,
            report.z,
            join(&report.tau_counts, ", "),
            if report.tau_sum % 2 == 0 {
                (report.tau_sum / 2).to_string()
            } else {
                format!("{}/2", report.tau_sum)
            },
            if report.matches { "ok" } else { "MISMATCH" }
        ),
        Format::Json => json(report),
        Format::Csv => format!(
            "n,z,tau_sum,matches\n{},{},{},{}\n",
            report.n, report.z, report.tau_sum, report.matches
        ),
    }
}

pub fn conjecture4(report: &Conjecture4Report, format: Format) -> String {
    match format {
        Format::Text => format!(
            "n={}\nobserved={}\nexpected=2^{}={}\n{}\n",
            report.n,
            report.observed,
            report.m,
            report.expected,
            if report.matches { "ok" } else { "MISMATCH" }
        ),
        Format::Json => json(report),
        Format::Csv => format!(
            "n,observed,m,expected,matches\n{},{},{},{},{}\n",
            report.n, report.observed, report.m, report.expected, report.matches
        ),
    }
}

pub fn stopping_profile(p: &StoppingProfile, format: Format) -> String {
    match format {
        Format::Text => format!(
            "sigma={}\ntau={}\ncrossing={}\nstarts={}\n",
            p.sigma,
            p.tau,
            p.crossing_value,
            terms_line(&p.subsequence_starts)
        ),
        Format::Json => json(p),
        Format::Csv => format!(
            "s,sigma,tau,crossing\n{},{},{},{}\n",
            p.s, p.sigma, p.tau, p.crossing_value
        ),
    }
}

pub fn limit_report(r: &LimitReport, format: Format) -> String {
    match format {
        Format::Text => format!(
            "G={}\ndenominator={}\nquotient={}/{}\ndecimal={}\n",
            r.g, r.denominator, r.quotient.numerator, r.quotient.denominator, r.decimal
        ),
        Format::Json => json(r),
        Format::Csv => {
            let mut out = String::from("n,numerator,exponent\n");
            for term in &r.terms {
                out.push_str(&format!(
                    "{},{},{}\n",
                    term.n,
                    term.contribution.numerator(),
                    term.contribution.exponent()
                ));
            }
            out
        }
    }
}

/// One row of `o` glyphs per block; stopping-sequences carry a `*` prefix in
/// plain mode or are colored in ANSI mode. Non-stopping rows are indented to
/// keep the columns aligned in plain mode.
pub fn profile(d: &Decomposition, stopping: &[bool], ansi: bool) -> String {
    let mut out = String::new();
    if !d.preamble.is_empty() {
        out.push_str(&format!("  {}\n", "o".repeat(d.preamble.len())));
    }
    for (entry, &stop) in d.entries.iter().zip(stopping) {
        let row = "o".repeat(entry.subsequence.terms().len());
        if stop {
            if ansi {
                out.push_str(&format!("\x1b[31m{row}\x1b[0m\n"));
            } else {
                out.push_str(&format!("* {row}\n"));
            }
        } else if ansi {
            out.push_str(&format!("{row}\n"));
        } else {
            out.push_str(&format!("  {row}\n"));
        }
    }
    out
}

pub fn profile_csv(d: &Decomposition, stopping: &[bool]) -> String {
    let mut out = String::from("block,start,length,stopping\n");
    for (b, (entry, stop)) in d.entries.iter().zip(stopping).enumerate() {
        out.push_str(&format!(
            "{b},{},{},{}\n",
            entry.subsequence.start(),
            entry.subsequence.terms().len(),
            stop
        ));
    }
    out
}
