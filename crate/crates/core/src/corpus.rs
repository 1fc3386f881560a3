//! Programs used by the test suites, benchmarks and README examples.

pub const QUEENS: &str = include_str!("../corpus/queens.lp");
pub const LISTS: &str = include_str!("../corpus/lists.lp");
pub const FAILING: &str = include_str!("../corpus/failing.lp");

/// Query for the n-queens board `[1..n]`.
pub fn queens_query(n: u32) -> String {
    let cells: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    format!("queen([{}], Out).", cells.join(","))
}

/// One program/query pair from the corpus.
#[derive(Clone, Debug)]
pub struct CorpusRun {
    pub label: String,
    pub module: &'static str,
    pub source: &'static str,
    pub query: String,
    pub all_solutions: bool,
}

impl CorpusRun {
    fn new(module: &'static str, source: &'static str, query: &str, all_solutions: bool) -> Self {
        let mode = if all_solutions { "all" } else { "first" };
        CorpusRun {
            label: format!("{module}: {query} ({mode})"),
            module,
            source,
            query: query.to_string(),
            all_solutions,
        }
    }

    pub fn program(&self) -> crate::Program {
        crate::parse_program(self.source)
            .expect("corpus programs parse")
            .with_module(self.module)
    }

    pub fn goal(&self) -> crate::Goal {
        crate::parse_query(&self.query).expect("corpus queries parse")
    }

    pub fn options(&self, emit_internal_events: bool) -> crate::EngineOptions {
        crate::EngineOptions {
            emit_internal_events,
            all_solutions: self.all_solutions,
            ..crate::EngineOptions::default()
        }
    }
}

/// Queens boards 4 to 6 and `main`, list predicates, and a failing query,
/// each in first- and all-solution mode.
pub fn standard_runs() -> Vec<CorpusRun> {
    let mut runs = Vec::new();
    for all in [false, true] {
        for n in 4..=6 {
            runs.push(CorpusRun::new("queens", QUEENS, &queens_query(n), all));
        }
        runs.push(CorpusRun::new("queens", QUEENS, "main.", all));
        runs.push(CorpusRun::new("lists", LISTS, "append(X, Y, [1,2,3]).", all));
        runs.push(CorpusRun::new("lists", LISTS, "member(X, [a,b,c]).", all));
        runs.push(CorpusRun::new("lists", LISTS, "common(X, [1,2,3], [3,2]).", all));
        runs.push(CorpusRun::new("failing", FAILING, "unreachable.", all));
    }
    runs
}
