//! End-to-end compilation of a polynomial of degree at most four.

use crate::ancilla::{min_ancilla_plan, reduce_min_greedy, IlpSolution, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::gadget::{
    apply_plan, max_introduced_coefficient, GadgetMode, ReducedInstance, ReductionPlan,
};
use crate::poly::{Coeff, Polynomial};
use crate::precision::{arbitrary_plan, greedy_precision_plan};
use crate::quartic::{
    apply_quartic_plan, build_wmaxsat, decode_ancilla_set, solve_wmaxsat_exact, QuarticAncillaSet,
    WMaxSatInstance, WMaxSatSolution, DEFAULT_WMAXSAT_BUDGET,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Exact minimum set cover of the cubic terms.
    #[default]
    MinAncilla,
    /// Most frequent pair first.
    ReduceMin,
    /// Greedy control-precision planner.
    MinPrecision,
    /// Uniformly random pair per term.
    Arbitrary,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::MinAncilla,
        Strategy::ReduceMin,
        Strategy::MinPrecision,
        Strategy::Arbitrary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::MinAncilla => "min-ancilla",
            Strategy::ReduceMin => "reduce-min",
            Strategy::MinPrecision => "min-precision",
            Strategy::Arbitrary => "arbitrary",
        }
    }

    /// Label used in benchmark CSV files.
    pub fn bench_name(self) -> &'static str {
        match self {
            Strategy::MinAncilla => "ilp",
            Strategy::ReduceMin => "reduce-min",
            Strategy::MinPrecision => "greedy",
            Strategy::Arbitrary => "arbitrary",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s || st.bench_name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    pub strategy: Strategy,
    pub gadget: GadgetMode,
    pub ilp_budget: u64,
    pub wmaxsat_budget: u64,
    /// Seed of the arbitrary planner, also used for the baseline comparison.
    pub seed: u64,
    /// Model from an external MaxSAT solver, used instead of the internal one.
    pub wmaxsat_model: Option<Vec<bool>>,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            strategy: Strategy::MinAncilla,
            gadget: GadgetMode::SingleAncilla,
            ilp_budget: DEFAULT_NODE_BUDGET,
            wmaxsat_budget: DEFAULT_WMAXSAT_BUDGET,
            seed: 0,
            wmaxsat_model: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Compilation {
    pub reduced: ReducedInstance,
    pub plan: Option<ReductionPlan>,
    pub ilp: Option<IlpSolution>,
    pub wmaxsat: Option<(WMaxSatInstance, WMaxSatSolution)>,
    pub quartic_set: Option<QuarticAncillaSet>,
    /// Exact ancilla minimization finished within budget; `None` for
    /// heuristic strategies.
    pub proven_optimal: Option<bool>,
    /// Largest coefficient introduced by the cubic plan.
    pub introduced_max: Option<Coeff>,
    /// Same quantity for the arbitrary plan with the same seed.
    pub baseline_introduced_max: Option<Coeff>,
}

/// Choose collapse pairs for a polynomial of degree at most three.
pub fn plan_cubic(
    poly: &Polynomial,
    strategy: Strategy,
    mode: GadgetMode,
    ilp_budget: u64,
    seed: u64,
) -> Result<(ReductionPlan, Option<IlpSolution>)> {
    match strategy {
        Strategy::MinAncilla => {
            let (plan, sol) = min_ancilla_plan(poly, mode, ilp_budget)?;
            Ok((plan, Some(sol)))
        }
        Strategy::ReduceMin => Ok((reduce_min_greedy(poly, mode)?, None)),
        Strategy::MinPrecision => Ok((greedy_precision_plan(poly, mode)?, None)),
        Strategy::Arbitrary => Ok((arbitrary_plan(poly, seed, mode)?, None)),
    }
}

pub fn compile(poly: &Polynomial, opts: &CompileOptions) -> Result<Compilation> {
    match poly.degree() {
        0..=2 => Ok(Compilation {
            reduced: ReducedInstance::identity(poly)?,
            plan: None,
            ilp: None,
            wmaxsat: None,
            quartic_set: None,
            proven_optimal: (opts.strategy == Strategy::MinAncilla).then_some(true),
            introduced_max: None,
            baseline_introduced_max: None,
        }),
        3 => {
            let (plan, ilp) =
                plan_cubic(poly, opts.strategy, opts.gadget, opts.ilp_budget, opts.seed)?;
            let reduced = apply_plan(poly, &plan)?;
            let introduced_max = Some(max_introduced_coefficient(&plan, poly)?);
            let baseline_introduced_max = if opts.strategy == Strategy::MinPrecision {
                let base = arbitrary_plan(poly, opts.seed, opts.gadget)?;
                Some(max_introduced_coefficient(&base, poly)?)
            } else {
                None
            };
            Ok(Compilation {
                reduced,
                proven_optimal: ilp.as_ref().map(|s| s.proven_optimal),
                plan: Some(plan),
                ilp,
                wmaxsat: None,
                quartic_set: None,
                introduced_max,
                baseline_introduced_max,
            })
        }
        _ => {
            if opts.strategy != Strategy::MinAncilla {
                return Err(Error::InvalidArgument(format!(
                    "degree-4 input is reduced by ancilla minimization only; strategy `{}` is unsupported",
                    opts.strategy.name()
                )));
            }
            if opts.gadget != GadgetMode::SingleAncilla {
                return Err(Error::InvalidArgument(
                    "the triple gadget applies to cubic reductions only".into(),
                ));
            }
            let inst = build_wmaxsat(poly)?;
            let sol = match &opts.wmaxsat_model {
                Some(model) => {
                    if model.len() != inst.vars.len() {
                        return Err(Error::InvalidArgument(format!(
                            "model assigns {} variables, instance has {}",
                            model.len(),
                            inst.vars.len()
                        )));
                    }
                    WMaxSatSolution {
                        cost: model.iter().filter(|b| **b).count() as u64,
                        assignment: model.clone(),
                        proven_optimal: false,
                        nodes: 0,
                    }
                }
                None => solve_wmaxsat_exact(&inst, opts.wmaxsat_budget)?,
            };
            let set = decode_ancilla_set(&inst, &sol.assignment)?;
            let reduced = apply_quartic_plan(poly, &set)?;
            Ok(Compilation {
                reduced,
                plan: None,
                ilp: None,
                proven_optimal: opts.wmaxsat_model.is_none().then_some(sol.proven_optimal),
                wmaxsat: Some((inst, sol)),
                quartic_set: Some(set),
                introduced_max: None,
                baseline_introduced_max: None,
            })
        }
    }
}
