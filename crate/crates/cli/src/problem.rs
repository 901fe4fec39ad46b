//! Builds the cost functions a command runs on.

use std::path::Path;

use ucurve::baselines::nested_trap;
use ucurve::cost::{synth_u_instance, CostFunction, PenalizedMce, SyntheticUInstance, TableCost};
use ucurve::data::{filter_sparse_features, load_dataset, quantize_levels, zscore_binarize, Dataset};
use ucurve::FeatureSubset;

use crate::args::{CostKind, Preprocess, ProblemArgs};
use crate::CliError;

pub enum Problem {
    Pmce(PenalizedMce),
    Synth(SyntheticUInstance),
    Table(TableCost),
}

impl CostFunction for Problem {
    fn degree(&self) -> usize {
        match self {
            Self::Pmce(c) => c.degree(),
            Self::Synth(c) => c.degree(),
            Self::Table(c) => c.degree(),
        }
    }

    fn cost(&self, subset: &FeatureSubset) -> f64 {
        match self {
            Self::Pmce(c) => c.cost(subset),
            Self::Synth(c) => c.cost(subset),
            Self::Table(c) => c.cost(subset),
        }
    }
}

/// A cost function plus the name it is reported under.
pub struct Instance {
    pub id: String,
    pub cost: Problem,
}

/// Filters first, then at most one discretizer.
pub fn preprocess(dataset: Dataset, steps: &[Preprocess]) -> Result<Dataset, CliError> {
    let discretizers = steps.iter().filter(|s| !matches!(s, Preprocess::Filter(_))).count();
    if discretizers > 1 {
        return Err(CliError::Usage("use at most one of binarize and quantize=<k>".into()));
    }
    let mut d = dataset;
    for step in steps {
        if let Preprocess::Filter(m) = *step {
            d = filter_sparse_features(&d, m)?;
        }
    }
    for step in steps {
        match *step {
            Preprocess::Binarize => d = zscore_binarize(&d),
            Preprocess::Quantize(k) => d = quantize_levels(&d, k)?,
            Preprocess::Filter(_) => {}
        }
    }
    Ok(d)
}

fn dataset_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Resolves `--cost` and friends; `seed` stands in for a missing `--instance-seed`.
pub fn load_problems(args: &ProblemArgs, seed: u64) -> Result<Vec<Instance>, CliError> {
    if args.cost != CostKind::Pmce && (!args.data.is_empty() || !args.preprocess.is_empty()) {
        return Err(CliError::Usage("--data and --preprocess only apply to --cost pmce".into()));
    }
    match args.cost {
        CostKind::Pmce => {
            if args.data.is_empty() {
                return Err(CliError::Usage("--cost pmce needs --data <file>".into()));
            }
            args.data
                .iter()
                .map(|path| {
                    let d = preprocess(load_dataset(path, args.format)?, &args.preprocess)?;
                    Ok(Instance {
                        id: dataset_id(path),
                        cost: Problem::Pmce(PenalizedMce::new(&d)?),
                    })
                })
                .collect()
        }
        CostKind::Synth => {
            let s = args.instance_seed.unwrap_or(seed);
            let inst = synth_u_instance(args.n, s).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(vec![Instance {
                id: format!("synth-n{}-s{s}", args.n),
                cost: Problem::Synth(inst),
            }])
        }
        CostKind::Trap => Ok(vec![Instance {
            id: "trap".into(),
            cost: Problem::Table(nested_trap()),
        }]),
    }
}
