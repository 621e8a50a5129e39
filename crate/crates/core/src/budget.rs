use std::collections::BTreeMap;

use crate::cost::CostTuple;
use crate::dfg::OpType;
use crate::library::ResourceLibrary;

/// User constraint on a schedule's cost. Types missing from an area budget
/// are unconstrained.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum Budget {
    #[default]
    None,
    Area(BTreeMap<OpType, u32>),
    /// Power cap in mW.
    Power(f64),
}

impl Budget {
    /// Parses `mul=3,add=2,comp=1`.
    pub fn parse_area(text: &str) -> Result<Self, String> {
        let mut caps = BTreeMap::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("expected type=count, got `{part}`"))?;
            let n: u32 = v.trim().parse().map_err(|_| format!("invalid instance count `{v}`"))?;
            if k.trim().is_empty() {
                return Err(format!("missing op type in `{part}`"));
            }
            if caps.insert(OpType::new(k.trim()), n).is_some() {
                return Err(format!("op type `{}` capped twice", k.trim()));
            }
        }
        Ok(Budget::Area(caps))
    }

    pub fn power(cap: f64) -> Result<Self, String> {
        if cap.is_nan() || cap < 0.0 {
            return Err(format!("power budget must be non-negative, got {cap}"));
        }
        Ok(Budget::Power(cap))
    }

    /// Area caps aligned with the library's type order.
    pub fn caps_for(&self, lib: &ResourceLibrary) -> Vec<Option<u32>> {
        lib.types()
            .iter()
            .map(|t| match self {
                Budget::Area(caps) => caps.get(&t.op).copied(),
                _ => None,
            })
            .collect()
    }

    pub fn power_cap(&self) -> Option<f64> {
        match self {
            Budget::Power(p) => Some(*p),
            _ => None,
        }
    }

    /// Whether a (partial or complete) cost respects the budget. Power is
    /// compared exactly; the cap is a hard limit.
    pub fn admits(&self, cost: &CostTuple, caps: &[Option<u32>]) -> bool {
        match self {
            Budget::None => true,
            Budget::Power(cap) => cost.power <= *cap,
            Budget::Area(_) => cost.area_by_type.iter().zip(caps).all(|(&a, cap)| cap.is_none_or(|c| a <= c)),
        }
    }

    /// Whether `self` is at least as permissive as `other`.
    pub fn relaxes(&self, other: &Budget) -> bool {
        match (self, other) {
            (Budget::None, _) => true,
            (Budget::Power(a), Budget::Power(b)) => a >= b,
            (Budget::Area(a), Budget::Area(b)) => a.iter().all(|(k, &cap)| b.get(k).is_some_and(|&other| cap >= other)),
            _ => false,
        }
    }
}

impl std::fmt::Display for Budget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Budget::None => f.write_str("none"),
            Budget::Power(p) => write!(f, "power<={p}"),
            Budget::Area(caps) => {
                let parts: Vec<String> = caps.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(f, "area:{}", parts.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_caps_parsing() {
        let b = Budget::parse_area("mul=3, add=2,comp=0").unwrap();
        let Budget::Area(caps) = &b else { panic!() };
        assert_eq!(caps.get(&OpType::from("mul")), Some(&3));
        assert_eq!(caps.get(&OpType::from("comp")), Some(&0));
        assert!(Budget::parse_area("mul").is_err());
        assert!(Budget::parse_area("mul=x").is_err());
        assert!(Budget::parse_area("mul=1,mul=2").is_err());
        assert!(Budget::power(-1.0).is_err());
    }

    #[test]
    fn caps_follow_library_order_and_gaps_are_free() {
        let lib = ResourceLibrary::default_library();
        let b = Budget::parse_area("comp=1,mul=3").unwrap();
        assert_eq!(b.caps_for(&lib), vec![Some(3), None, Some(1)]);
        let caps = b.caps_for(&lib);
        let cost = CostTuple::new(vec![3, 9, 1], Default::default(), 0);
        assert!(b.admits(&cost, &caps));
        let cost = CostTuple::new(vec![4, 0, 0], Default::default(), 0);
        assert!(!b.admits(&cost, &caps));
    }

    #[test]
    fn relaxation_order() {
        let tight = Budget::parse_area("mul=2,add=1").unwrap();
        let loose = Budget::parse_area("mul=3,add=1").unwrap();
        assert!(loose.relaxes(&tight));
        assert!(!tight.relaxes(&loose));
        assert!(Budget::None.relaxes(&tight));
        assert!(Budget::Power(10.0).relaxes(&Budget::Power(5.0)));
    }
}
