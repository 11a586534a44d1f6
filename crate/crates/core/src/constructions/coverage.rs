use crate::analysis::{classify, Relation};
use crate::error::Result;

/// Starting point of a route to a convex but not sos-convex example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseExample {
    /// The ternary sextic form `f36`.
    TernarySextic,
    /// Its dehomogenization `f26`.
    BivariateSextic,
    /// The quaternary quartic form `h44`.
    QuaternaryQuartic,
    /// Its dehomogenization `h34`.
    TernaryQuartic,
    /// The double-integral construction on a seed of the given degree.
    DoubleIntegral { seed_degree: u32 },
    /// The same construction dehomogenized at `x3 = 1`.
    DehomogenizedDoubleIntegral { seed_degree: u32 },
}

impl BaseExample {
    /// Variables of the base example.
    pub fn num_vars(self) -> usize {
        match self {
            BaseExample::TernarySextic | BaseExample::TernaryQuartic | BaseExample::DoubleIntegral { .. } => 3,
            BaseExample::BivariateSextic | BaseExample::DehomogenizedDoubleIntegral { .. } => 2,
            BaseExample::QuaternaryQuartic => 4,
        }
    }

    pub fn label(self) -> String {
        match self {
            BaseExample::TernarySextic => "f36".into(),
            BaseExample::BivariateSextic => "f26".into(),
            BaseExample::QuaternaryQuartic => "h44".into(),
            BaseExample::TernaryQuartic => "h34".into(),
            BaseExample::DoubleIntegral { seed_degree } => {
                format!("double-integral construction, seed degree {seed_degree}")
            }
            BaseExample::DehomogenizedDoubleIntegral { seed_degree } => {
                format!("dehomogenized double-integral construction, seed degree {seed_degree}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoveragePlan {
    /// Convexity and sos-convexity coincide; nothing to construct.
    EqualCase,
    /// Start from `base` and add `extensions` variables with `x^d` terms.
    Route { base: BaseExample, extensions: usize },
}

/// How to reach a convex but not sos-convex member for `(n, d)`.
pub fn coverage_plan(n: usize, d: u32, homogeneous: bool) -> Result<CoveragePlan> {
    if classify(n, d, homogeneous)?.convex_vs_sos_convex == Relation::Equal {
        return Ok(CoveragePlan::EqualCase);
    }
    let base = match (homogeneous, d) {
        (true, 4) => BaseExample::QuaternaryQuartic,
        (true, 6) => BaseExample::TernarySextic,
        (true, _) => BaseExample::DoubleIntegral { seed_degree: d - 2 },
        (false, 4) => BaseExample::TernaryQuartic,
        (false, 6) => BaseExample::BivariateSextic,
        (false, _) => BaseExample::DehomogenizedDoubleIntegral { seed_degree: d - 2 },
    };
    Ok(CoveragePlan::Route {
        base,
        extensions: n - base.num_vars(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes() {
        assert_eq!(
            coverage_plan(3, 6, true).unwrap(),
            CoveragePlan::Route {
                base: BaseExample::TernarySextic,
                extensions: 0
            }
        );
        assert_eq!(
            coverage_plan(5, 4, true).unwrap(),
            CoveragePlan::Route {
                base: BaseExample::QuaternaryQuartic,
                extensions: 1
            }
        );
        assert_eq!(
            coverage_plan(3, 8, true).unwrap(),
            CoveragePlan::Route {
                base: BaseExample::DoubleIntegral { seed_degree: 6 },
                extensions: 0
            }
        );
        assert_eq!(coverage_plan(2, 4, false).unwrap(), CoveragePlan::EqualCase);
        assert!(coverage_plan(3, 5, true).is_err());
    }

    #[test]
    fn agrees_with_classification() {
        for n in 1..=8 {
            for d in (2..=12).step_by(2) {
                for h in [false, true] {
                    let strict = classify(n, d, h).unwrap().convex_vs_sos_convex == Relation::Strict;
                    let plan = coverage_plan(n, d, h).unwrap();
                    assert_eq!(strict, plan != CoveragePlan::EqualCase, "({n},{d},{h})");
                }
            }
        }
    }
}
