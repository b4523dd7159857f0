//! One entry point for every solution method.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::heuristics::{ascent, pack, Rule};
use crate::model::{Instance, Solution};
use crate::search::{
    bfd, branch_and_bound, lds, SearchConfig, SearchOutcome, SearchStats, TracePoint,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Bf,
    Lff,
    Lbf,
    Wff,
    Wbf,
    /// Local ascent around LBF.
    La,
    Bb,
    Bfd,
    Lds,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Bf,
        Method::Lff,
        Method::Lbf,
        Method::Wff,
        Method::Wbf,
        Method::La,
        Method::Bb,
        Method::Bfd,
        Method::Lds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Bf => "BF",
            Method::Lff => "LFF",
            Method::Lbf => "LBF",
            Method::Wff => "WFF",
            Method::Wbf => "WBF",
            Method::La => "LA",
            Method::Bb => "BB",
            Method::Bfd => "BFD",
            Method::Lds => "LDS",
        }
    }

    pub fn rule(self) -> Option<Rule> {
        match self {
            Method::Bf => Some(Rule::Bf),
            Method::Lff => Some(Rule::Lff),
            Method::Lbf => Some(Rule::Lbf),
            Method::Wff => Some(Rule::Wff),
            Method::Wbf => Some(Rule::Wbf),
            _ => None,
        }
    }

    pub fn is_search(self) -> bool {
        matches!(self, Method::Bb | Method::Bfd | Method::Lds)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("bfs") {
            return Ok(Method::Bfd);
        }
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                format!(
                    "unknown method `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

impl serde::Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> serde::Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Result of one run of any method.
#[derive(Debug, Clone)]
pub struct Report {
    pub method: Method,
    pub solution: Solution,
    /// Proven optimal within the ceiling-split search space. Always false for heuristics.
    pub optimal: bool,
    /// Node counters for tree searches.
    pub stats: Option<SearchStats>,
    pub first_leaf: Option<crate::Rational>,
    pub trace: Vec<TracePoint>,
    pub wall_time: Duration,
}

impl Report {
    fn from_search(method: Method, out: SearchOutcome) -> Self {
        Report {
            method,
            optimal: out.optimal,
            wall_time: out.stats.wall_time,
            solution: out.best,
            stats: Some(out.stats),
            first_leaf: out.first_leaf,
            trace: out.trace,
        }
    }
}

/// Runs `method`; limits apply to the tree searches only.
pub fn solve(instance: &Instance, method: Method, config: &SearchConfig) -> Report {
    let start = Instant::now();
    let solution = match method {
        Method::Bb => return Report::from_search(method, branch_and_bound(instance, config)),
        Method::Bfd => return Report::from_search(method, bfd(instance, config)),
        Method::Lds => return Report::from_search(method, lds(instance, config)),
        Method::La => ascent(instance, Rule::Lbf),
        m => pack(instance, m.rule().expect("construction rule")),
    };
    let wall_time = start.elapsed();
    Report {
        method,
        optimal: false,
        stats: None,
        first_leaf: None,
        trace: vec![TracePoint {
            elapsed: wall_time,
            value: solution.value.clone(),
        }],
        solution,
        wall_time,
    }
}
