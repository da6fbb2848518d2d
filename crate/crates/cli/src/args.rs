//! Command-line flags. Every subcommand is turned into the same [`JobSpec`]
//! a job file would produce, so both paths share one validator.

use std::path::Path;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::job::JobSpec;
use crate::Failure;

#[derive(Debug, Parser)]
#[command(name = "riesz", version, about = "Exact integration over rational intervals")]
pub struct Cli {
    /// Annotate every rational in the result with a decimal approximation.
    #[arg(long, global = true)]
    float_view: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

/// Each `<json>` argument is inline JSON or a path to a JSON file.
#[derive(Debug, Subcommand)]
enum Cmd {
    /// Integral of a formal sum (fails if it is indefinite).
    Integrate(MeasureSum),
    /// The four variations of a formal sum.
    Variations(MeasureSum),
    /// Colored decomposition of several nonnegative formal sums.
    Decompose {
        #[arg(long)]
        inputs: String,
        /// diagonal | rowmajor
        #[arg(long)]
        listing: Option<String>,
    },
    /// Refinements of a pair of formal sums.
    Refine {
        #[arg(long)]
        c: String,
        #[arg(long)]
        d: String,
        /// common | subdecompose | minmax | four-corner
        #[arg(long)]
        op: Option<String>,
    },
    /// Jordan parts of a measure.
    Jordan {
        #[arg(long)]
        measure: String,
    },
    /// Semivariation interval of a measure on a finite union of intervals.
    Svar {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        region: String,
    },
    /// Lower and upper step bounds for a polynomial or step integrand.
    Darboux {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Truncated series of formal sums with a certified tail.
    Series {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        terms: Option<String>,
        #[arg(long)]
        tail: Option<String>,
        /// {"first", "ratio", "set", "n"}
        #[arg(long)]
        geometric: Option<String>,
    },
    /// Certificate that a finite set of points is negligible.
    Negligible {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        points: String,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Gauge divisions and Riemann sums
    #[command(subcommand)]
    Gauge(GaugeCmd),
    /// Membership of Stone points in an interval.
    Stone {
        #[arg(long)]
        interval: String,
        #[arg(long)]
        points: String,
    },
    /// Daniell representation of a measure-backed functional
    #[command(subcommand)]
    Daniell(DaniellCmd),
    /// Run the built-in property suites.
    Selftest {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a job file.
    Job {
        #[arg(long)]
        spec: String,
    },
}

#[derive(Debug, Args)]
struct MeasureSum {
    #[arg(long)]
    measure: String,
    #[arg(long)]
    fsum: String,
}

#[derive(Debug, Subcommand)]
enum GaugeCmd {
    /// Tagged division subordinate to a gauge.
    Divide {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        gauge: String,
        /// mcshane | kh
        #[arg(long)]
        kind: Option<String>,
    },
    /// Riemann sum over a tagged division.
    Sum {
        #[arg(long)]
        f: String,
        #[arg(long)]
        measure: String,
        #[arg(long)]
        division: String,
    },
    /// Riemann sums for a list of gauges against the exact integral.
    Table {
        #[arg(long)]
        f: String,
        #[arg(long)]
        measure: String,
        #[arg(long)]
        domain: String,
        #[arg(long)]
        gauges: String,
        #[arg(long)]
        kind: Option<String>,
        /// json | csv
        #[arg(long)]
        format: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum DaniellCmd {
    /// Represent a measure-backed functional and diff it against the measure.
    Roundtrip {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        generators: String,
    },
}

/// Inline JSON, else the contents of the named file.
pub(crate) fn load(arg: &str) -> Result<Value, Failure> {
    if let Ok(v) = serde_json::from_str(arg) {
        return Ok(v);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(format!("{arg:?} is neither JSON nor a readable file: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

struct Builder {
    command: &'static str,
    inputs: Map<String, Value>,
    options: Map<String, Value>,
}

impl Builder {
    fn new(command: &'static str) -> Builder {
        Builder {
            command,
            inputs: Map::new(),
            options: Map::new(),
        }
    }

    fn input(mut self, name: &str, arg: &str) -> Result<Builder, Failure> {
        self.inputs.insert(name.to_string(), load(arg)?);
        Ok(self)
    }

    fn maybe_input(self, name: &str, arg: Option<&String>) -> Result<Builder, Failure> {
        match arg {
            Some(a) => self.input(name, a),
            None => Ok(self),
        }
    }

    fn option(mut self, name: &str, v: Option<Value>) -> Builder {
        if let Some(v) = v {
            self.options.insert(name.to_string(), v);
        }
        self
    }

    fn text(self, name: &str, v: Option<String>) -> Builder {
        self.option(name, v.map(Value::String))
    }

    fn done(self, float_view: bool) -> Result<JobSpec, Failure> {
        let mut options = self.options;
        if float_view {
            options.insert("float_view".into(), Value::Bool(true));
        }
        let v = json!({ "command": self.command, "inputs": self.inputs, "options": options });
        JobSpec::from_value(v)
    }
}

impl Cli {
    pub(crate) fn into_spec(self) -> Result<JobSpec, Failure> {
        let fv = self.float_view;
        let b = match self.cmd {
            Cmd::Integrate(a) => Builder::new("integrate").input("measure", &a.measure)?.input("fsum", &a.fsum)?,
            Cmd::Variations(a) => Builder::new("variations").input("measure", &a.measure)?.input("fsum", &a.fsum)?,
            Cmd::Decompose { inputs, listing } => Builder::new("decompose").input("inputs", &inputs)?.text("listing", listing),
            Cmd::Refine { c, d, op } => Builder::new("refine").input("c", &c)?.input("d", &d)?.text("op", op),
            Cmd::Jordan { measure } => Builder::new("jordan").input("measure", &measure)?,
            Cmd::Svar { measure, region } => Builder::new("svar").input("measure", &measure)?.input("region", &region)?,
            Cmd::Darboux { measure, f, depth } => Builder::new("darboux")
                .input("measure", &measure)?
                .input("f", &f)?
                .option("depth", depth.map(Value::from)),
            Cmd::Series {
                measure,
                terms,
                tail,
                geometric,
            } => Builder::new("series")
                .input("measure", &measure)?
                .maybe_input("terms", terms.as_ref())?
                .maybe_input("tail", tail.as_ref())?
                .maybe_input("geometric", geometric.as_ref())?,
            Cmd::Negligible {
                measure,
                points,
                depth,
                epsilon,
            } => Builder::new("negligible")
                .input("measure", &measure)?
                .input("points", &points)?
                .option("depth", depth.map(Value::from))
                .text("epsilon", epsilon),
            Cmd::Gauge(GaugeCmd::Divide { domain, gauge, kind }) => Builder::new("gauge-divide")
                .input("domain", &domain)?
                .input("gauge", &gauge)?
                .text("kind", kind),
            Cmd::Gauge(GaugeCmd::Sum { f, measure, division }) => Builder::new("gauge-sum")
                .input("f", &f)?
                .input("measure", &measure)?
                .input("division", &division)?,
            Cmd::Gauge(GaugeCmd::Table {
                f,
                measure,
                domain,
                gauges,
                kind,
                format,
            }) => Builder::new("gauge-table")
                .input("f", &f)?
                .input("measure", &measure)?
                .input("domain", &domain)?
                .input("gauges", &gauges)?
                .text("kind", kind)
                .text("format", format),
            Cmd::Stone { interval, points } => Builder::new("stone").input("interval", &interval)?.input("points", &points)?,
            Cmd::Daniell(DaniellCmd::Roundtrip { measure, generators }) => Builder::new("daniell-roundtrip")
                .input("measure", &measure)?
                .input("generators", &generators)?,
            Cmd::Selftest { suite, seed } => Builder::new("selftest")
                .text("suite", Some(suite))
                .option("seed", seed.map(Value::from)),
            Cmd::Job { spec } => {
                let mut spec = JobSpec::from_value(load(&spec)?)?;
                spec.options.float_view |= fv;
                return Ok(spec);
            }
        };
        b.done(fv)
    }
}
