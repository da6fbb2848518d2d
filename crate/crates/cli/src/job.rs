//! Job files: one command, its JSON inputs, and options.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use riesz_core::daniell::{represent, DaniellFunctional, RepresentationTable, StepLatticeElem, TableDiff};
use riesz_core::formal_sums::{common_refine, four_corner, minmax, procedure1, subdecompose_dominated, Listing};
use riesz_core::gauge::{
    convergence_table, divide, gauge_to_tag_system, riemann_sum, stone_lim, stone_member, DivisionKind, Gauge,
    StonePoint, TaggedDivision,
};
use riesz_core::integral::{
    darboux_bounds, geometric_series, negligible_certificate, series_integrate, variations, Polynomial,
    RefinableFunction,
};
use riesz_core::measures::{jordan, semivariation};
use riesz_core::{Error, FormalSum, Interval, Rat, RealMeasure, StepProfile, XNonneg, XReal};

use crate::render;
use crate::{Failure, EXIT_OK, EXIT_SELFTEST};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Integrate,
    Variations,
    Decompose,
    Refine,
    Jordan,
    Svar,
    Darboux,
    Series,
    Negligible,
    GaugeDivide,
    GaugeSum,
    GaugeTable,
    Stone,
    DaniellRoundtrip,
    Selftest,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefineOp {
    #[default]
    Common,
    Subdecompose,
    Minmax,
    FourCorner,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub listing: Option<Listing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<DivisionKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<RefineOp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub float_view: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default)]
    pub inputs: Map<String, Value>,
    #[serde(default)]
    pub options: Options,
}

impl JobSpec {
    pub fn from_value(v: Value) -> Result<JobSpec, Failure> {
        let spec: JobSpec = serde_json::from_value(v).map_err(|e| Failure::Invalid(format!("job: {e}")))?;
        spec.check_options()?;
        Ok(spec)
    }

    fn check_options(&self) -> Result<(), Failure> {
        use Command::*;
        let o = &self.options;
        let given = [
            ("listing", o.listing.is_some(), matches!(self.command, Decompose)),
            ("depth", o.depth.is_some(), matches!(self.command, Darboux | Negligible)),
            ("epsilon", o.epsilon.is_some(), matches!(self.command, Negligible)),
            ("format", o.format.is_some(), matches!(self.command, GaugeTable)),
            ("kind", o.kind.is_some(), matches!(self.command, GaugeDivide | GaugeTable)),
            ("op", o.op.is_some(), matches!(self.command, Refine)),
            ("suite", o.suite.is_some(), matches!(self.command, Selftest)),
            ("seed", o.seed.is_some(), matches!(self.command, Selftest)),
        ];
        for (name, present, applies) in given {
            if present && !applies {
                return Err(Failure::Invalid(format!("option {name:?} does not apply to {:?}", self.command)));
            }
        }
        if o.float_view && o.format == Some(OutputFormat::Csv) {
            return Err(Failure::Invalid("float_view is not available for CSV output".into()));
        }
        Ok(())
    }

    fn inputs<T: DeserializeOwned>(&self) -> Result<T, Failure> {
        serde_json::from_value(Value::Object(self.inputs.clone()))
            .map_err(|e| Failure::Invalid(format!("inputs: {e}")))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureSum {
    measure: RealMeasure,
    fsum: FormalSum,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecomposeIn {
    inputs: Vec<FormalSum>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RefineIn {
    c: FormalSum,
    d: FormalSum,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureIn {
    measure: RealMeasure,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SvarIn {
    measure: RealMeasure,
    region: Vec<Interval>,
}

/// Integrand for the bracket command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Integrand {
    Polynomial(Polynomial),
    Step(StepProfile),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DarbouxIn {
    measure: RealMeasure,
    f: Integrand,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Geometric {
    first: Rat,
    ratio: Rat,
    set: Interval,
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesIn {
    measure: RealMeasure,
    terms: Option<Vec<FormalSum>>,
    tail: Option<XNonneg>,
    geometric: Option<Geometric>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NegligibleIn {
    measure: RealMeasure,
    points: Vec<Rat>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DivideIn {
    domain: Interval,
    gauge: Gauge,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SumIn {
    f: StepProfile,
    measure: RealMeasure,
    division: TaggedDivision,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableIn {
    f: StepProfile,
    measure: RealMeasure,
    domain: Interval,
    gauges: Vec<Gauge>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StoneIn {
    interval: Interval,
    points: Vec<StonePoint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DaniellIn {
    measure: RealMeasure,
    generators: Vec<StepLatticeElem>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoInputs {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SvarOut {
    pub lower: Rat,
    pub upper: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumOut {
    pub sum: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoneRow {
    pub point: StonePoint,
    pub member: bool,
    pub lim: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DaniellOut {
    pub table: RepresentationTable,
    /// Disagreements between the table and the backing measure.
    pub diff: Vec<TableDiff>,
}

pub const DEFAULT_SEED: u64 = 2024;
const DEFAULT_DARBOUX_DEPTH: u32 = 4;

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("engine values serialize")
}

/// Runs a validated job; returns the exit code and the rendered output.
pub(crate) fn execute(spec: &JobSpec) -> Result<(i32, String), Failure> {
    let o = &spec.options;
    let mut code = EXIT_OK;
    let result = match spec.command {
        Command::Integrate => {
            let i: MeasureSum = spec.inputs()?;
            let rep = variations(&i.measure, &i.fsum);
            if rep.overall == XReal::BothInf {
                return Err(Error::IndefiniteIntegral.into());
            }
            to_value(&rep)
        }
        Command::Variations => {
            let i: MeasureSum = spec.inputs()?;
            to_value(&variations(&i.measure, &i.fsum))
        }
        Command::Decompose => {
            let i: DecomposeIn = spec.inputs()?;
            to_value(&procedure1(&i.inputs, o.listing.unwrap_or_default())?)
        }
        Command::Refine => {
            let i: RefineIn = spec.inputs()?;
            match o.op.unwrap_or_default() {
                RefineOp::Common => to_value(&common_refine(&i.c, &i.d)?),
                RefineOp::Subdecompose => to_value(&subdecompose_dominated(&i.c, &i.d)?),
                RefineOp::Minmax => to_value(&minmax(&i.c, &i.d)?),
                RefineOp::FourCorner => to_value(&four_corner(&i.c, &i.d)?),
            }
        }
        Command::Jordan => {
            let i: MeasureIn = spec.inputs()?;
            to_value(&jordan(&i.measure))
        }
        Command::Svar => {
            let i: SvarIn = spec.inputs()?;
            let (lower, upper) = semivariation(&i.measure, &i.region)?;
            to_value(&SvarOut { lower, upper })
        }
        Command::Darboux => {
            let i: DarbouxIn = spec.inputs()?;
            let f: &dyn RefinableFunction = match &i.f {
                Integrand::Polynomial(p) => p,
                Integrand::Step(s) => s,
            };
            to_value(&darboux_bounds(&i.measure, f, o.depth.unwrap_or(DEFAULT_DARBOUX_DEPTH))?)
        }
        Command::Series => {
            let i: SeriesIn = spec.inputs()?;
            let out = match (i.terms, i.tail, i.geometric) {
                (Some(terms), Some(tail), None) => series_integrate(&i.measure, &terms, tail)?,
                (None, None, Some(g)) => geometric_series(&i.measure, &g.first, &g.ratio, &g.set, g.n)?,
                _ => {
                    return Err(Failure::Invalid(
                        "inputs: give either \"terms\" with \"tail\", or \"geometric\"".into(),
                    ))
                }
            };
            to_value(&out)
        }
        Command::Negligible => {
            let i: NegligibleIn = spec.inputs()?;
            let eps = o.epsilon.clone().unwrap_or_else(|| Rat::new(1, 1000));
            let depth = o.depth.unwrap_or(1) as usize;
            to_value(&negligible_certificate(&i.points, depth, &eps, &i.measure)?)
        }
        Command::GaugeDivide => {
            let i: DivideIn = spec.inputs()?;
            let t = gauge_to_tag_system(&i.domain, &i.gauge)?;
            to_value(&divide(&t, o.kind.unwrap_or_default()))
        }
        Command::GaugeSum => {
            let i: SumIn = spec.inputs()?;
            to_value(&SumOut {
                sum: riemann_sum(&i.f, &i.measure, &i.division)?,
            })
        }
        Command::GaugeTable => {
            let i: TableIn = spec.inputs()?;
            let rows = convergence_table(&i.f, &i.measure, &i.domain, &i.gauges, o.kind.unwrap_or_default())?;
            if o.format == Some(OutputFormat::Csv) {
                return Ok((EXIT_OK, render::csv(&rows)?));
            }
            to_value(&rows)
        }
        Command::Stone => {
            let i: StoneIn = spec.inputs()?;
            let rows: Vec<StoneRow> = i
                .points
                .into_iter()
                .map(|p| StoneRow {
                    member: stone_member(&i.interval, &p),
                    lim: stone_lim(&p),
                    point: p,
                })
                .collect();
            to_value(&rows)
        }
        Command::DaniellRoundtrip => {
            let i: DaniellIn = spec.inputs()?;
            let table = represent(&DaniellFunctional::new(i.measure.clone()), &i.generators)?;
            let diff = table.diff_against(&i.measure);
            to_value(&DaniellOut { table, diff })
        }
        Command::Selftest => {
            let _: NoInputs = spec.inputs()?;
            let suite = o.suite.as_deref().unwrap_or("all");
            let reports = riesz_core::selftest::run(suite, o.seed.unwrap_or(DEFAULT_SEED))
                .ok_or_else(|| Failure::Invalid(format!("unknown suite {suite:?}")))?;
            for r in &reports {
                log::info!("suite {}: {} cases, {} failures", r.suite, r.cases, r.failures.len());
            }
            if reports.iter().any(|r| !r.passed()) {
                code = EXIT_SELFTEST;
            }
            to_value(&reports)
        }
    };
    Ok((code, render::json(result, o.float_view)))
}
