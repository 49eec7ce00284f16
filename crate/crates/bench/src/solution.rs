//! Plain-text record of a seeding solution.
//!
//! ```text
//! #adaptive-seed-solution v1
//! algo greedy
//! budget 10
//! second_stage_budget 6
//! value 41.5
//! seeds 3 17 28 40
//! ```
//!
//! Seeds are core node ids as they appear in the instance dump.

use std::fmt::Write as _;

use crate::error::{BenchError, Result};

pub const SOLUTION_HEADER: &str = "#adaptive-seed-solution v1";

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub algo: String,
    pub budget: usize,
    pub second_stage_budget: usize,
    pub value: f64,
    pub seeds: Vec<usize>,
}

impl SolutionRecord {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{SOLUTION_HEADER}");
        let _ = writeln!(s, "algo {}", self.algo);
        let _ = writeln!(s, "budget {}", self.budget);
        let _ = writeln!(s, "second_stage_budget {}", self.second_stage_budget);
        let _ = writeln!(s, "value {}", self.value);
        let ids: Vec<String> = self.seeds.iter().map(|x| x.to_string()).collect();
        if ids.is_empty() {
            s.push_str("seeds\n");
        } else {
            let _ = writeln!(s, "seeds {}", ids.join(" "));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, message: String| BenchError::Config { line, message };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == SOLUTION_HEADER => {}
            _ => return Err(bad(1, format!("expected header {SOLUTION_HEADER:?}"))),
        }
        let (mut algo, mut budget, mut t, mut value, mut seeds) = (None, None, None, None, None);
        for (i, line) in lines {
            let n = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            let rest = rest.trim();
            let num = |what: &str| -> Result<usize> {
                rest.parse()
                    .map_err(|_| bad(n, format!("bad {what} `{rest}`")))
            };
            match key {
                "algo" => algo = Some(rest.to_string()),
                "budget" => budget = Some(num("budget")?),
                "second_stage_budget" => t = Some(num("second-stage budget")?),
                "value" => {
                    value = Some(
                        rest.parse()
                            .map_err(|_| bad(n, format!("bad value `{rest}`")))?,
                    )
                }
                "seeds" => {
                    let ids = rest
                        .split_whitespace()
                        .map(|x| x.parse().map_err(|_| bad(n, format!("bad seed id `{x}`"))))
                        .collect::<Result<Vec<usize>>>()?;
                    seeds = Some(ids);
                }
                other => return Err(bad(n, format!("unknown key `{other}`"))),
            }
        }
        let missing = |k: &str| BenchError::Invalid(format!("solution record lacks `{k}`"));
        Ok(SolutionRecord {
            algo: algo.ok_or_else(|| missing("algo"))?,
            budget: budget.ok_or_else(|| missing("budget"))?,
            second_stage_budget: t.ok_or_else(|| missing("second_stage_budget"))?,
            value: value.ok_or_else(|| missing("value"))?,
            seeds: seeds.ok_or_else(|| missing("seeds"))?,
        })
    }
}
