//! Batch entry points over independent inputs, parallel or sequential.

use crate::error::Result;
use crate::filtered::{FilteredIsocrystal, Verdict};
use crate::isocrystal::{Isocrystal, SlopeData};
use crate::par::{self, Strategy};
use crate::periods::{Coefficient, PairingCategory};

pub fn slopes(strategy: Strategy, items: &[Isocrystal]) -> Vec<Result<SlopeData>> {
    par::map(strategy, items, Isocrystal::slopes)
}

pub fn weak_admissibility(strategy: Strategy, items: &[FilteredIsocrystal]) -> Vec<Result<Verdict>> {
    par::map(strategy, items, FilteredIsocrystal::weak_admissibility)
}

pub fn frobenius_span_checks(strategy: Strategy, items: &[FilteredIsocrystal]) -> Vec<Result<bool>> {
    par::map(strategy, items, FilteredIsocrystal::frobenius_span_check)
}

/// Formal dimension followed by dim of each depth space 1..=max_depth.
pub fn depth_dimensions<T: Coefficient>(
    strategy: Strategy,
    items: &[PairingCategory<T>],
    max_depth: usize,
) -> Vec<Vec<usize>> {
    par::map(strategy, items, |c| {
        let mut dims = vec![c.formal_period_space().dim];
        dims.extend((1..=max_depth).map(|i| c.depth_space(i).dim));
        dims
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn strategies_agree() {
        let mut rng = StdRng::seed_from_u64(7);
        let cats: Vec<_> = (0..12).map(|_| fixtures::random_category(&mut rng, 3)).collect();
        assert_eq!(depth_dimensions(Strategy::Sequential, &cats, 3), depth_dimensions(Strategy::Parallel, &cats, 3));
        let isos: Vec<_> = [3, 7, 11].iter().map(|&p| fixtures::katz(p, 20).unwrap()).collect();
        let a: Vec<_> = slopes(Strategy::Sequential, &isos).into_iter().map(|s| s.unwrap()).collect();
        let b: Vec<_> = slopes(Strategy::Parallel, &isos).into_iter().map(|s| s.unwrap()).collect();
        assert_eq!(a, b);
    }
}
