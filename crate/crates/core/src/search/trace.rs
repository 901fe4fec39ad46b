use std::fmt;

use super::{Completion, Direction};
use crate::lattice::{FeatureSubset, RestrictionKind};

/// Why a restriction was added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RestrictionOrigin {
    /// A chain start that was already covered from the other side.
    Discard,
    /// The element before the chain minimum, or the element that stopped the chain.
    ChainStop,
    /// A costlier neighbour met while exhausting a minimum.
    ExhaustNeighbor,
    /// A minimum-exhausted element leaving the stack.
    ExhaustPop,
}

impl fmt::Display for RestrictionOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Discard => "discard",
            Self::ChainStop => "chain_stop",
            Self::ExhaustNeighbor => "exhaust_neighbor",
            Self::ExhaustPop => "exhaust_pop",
        })
    }
}

/// One search event. `Display` renders a tab-separated line whose first
/// field names the event.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    Direction(Direction),
    ChainStep {
        subset: FeatureSubset,
        cost: f64,
    },
    Restrict {
        kind: RestrictionKind,
        subset: FeatureSubset,
        origin: RestrictionOrigin,
        changed: bool,
    },
    Result {
        subset: FeatureSubset,
        cost: f64,
    },
    Push {
        subset: FeatureSubset,
        cost: f64,
    },
    Pop {
        subset: FeatureSubset,
        cost: f64,
    },
    Finish(Completion),
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Direction(d) => write!(f, "direction\t{d}"),
            Self::ChainStep { subset, cost } => write!(f, "chain\t{subset}\t{cost}"),
            Self::Restrict {
                kind,
                subset,
                origin,
                changed,
            } => write!(f, "restrict\t{kind}\t{subset}\t{origin}\t{}", u8::from(*changed)),
            Self::Result { subset, cost } => write!(f, "result\t{subset}\t{cost}"),
            Self::Push { subset, cost } => write!(f, "push\t{subset}\t{cost}"),
            Self::Pop { subset, cost } => write!(f, "pop\t{subset}\t{cost}"),
            Self::Finish(c) => write!(f, "finish\t{c}"),
        }
    }
}
