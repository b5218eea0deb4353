//! Runge-type conditions from divisor incidence data.
//!
//! A family of divisors `D₁, …, D_r` on a variety with a closed subset `Y` is
//! described combinatorially: which index sets have a nonempty common
//! intersection, and which of those intersections are not contained in `Y`.
//! Indices are 1-based throughout, in memory and in JSON.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest level accepted by the closed formulas.
pub const MAX_LEVEL: u32 = 20;

/// Incidence data for `r` divisors.
///
/// `outside_y` lists index sets whose intersection is nonempty and not
/// contained in `Y`. `nonempty` lists index sets with nonempty intersection;
/// when absent, `Y` is empty and the two families coincide. Both are stored
/// as antichains of maximal sets: every nonempty subset of a listed set is
/// implied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IncidenceRepr", into = "IncidenceRepr")]
pub struct DivisorIncidence {
    r: usize,
    outside_y: Vec<Vec<usize>>,
    nonempty: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct IncidenceRepr {
    r: usize,
    #[serde(rename = "outside_Y")]
    outside_y: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nonempty: Option<Vec<Vec<usize>>>,
}

impl TryFrom<IncidenceRepr> for DivisorIncidence {
    type Error = Error;

    fn try_from(repr: IncidenceRepr) -> Result<Self> {
        match repr.nonempty {
            Some(nonempty) => Self::with_nonempty(repr.r, repr.outside_y, nonempty),
            None => Self::new(repr.r, repr.outside_y),
        }
    }
}

impl From<DivisorIncidence> for IncidenceRepr {
    fn from(inc: DivisorIncidence) -> Self {
        Self { r: inc.r, outside_y: inc.outside_y, nonempty: inc.nonempty }
    }
}

/// Reduces a family of index sets to its maximal members, sorted.
pub fn normalize_antichain(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let sets: BTreeSet<BTreeSet<usize>> = sets
        .iter()
        .map(|s| s.iter().copied().collect())
        .filter(|s: &BTreeSet<usize>| !s.is_empty())
        .collect();
    let mut maximal: Vec<Vec<usize>> = sets
        .iter()
        .filter(|s| !sets.iter().any(|t| t.len() > s.len() && s.is_subset(t)))
        .map(|s| s.iter().copied().collect())
        .collect();
    maximal.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    maximal
}

fn check_indices(r: usize, sets: &[Vec<usize>]) -> Result<()> {
    for s in sets {
        if s.is_empty() {
            return Err(Error::InvalidInput("listed index sets must be nonempty".into()));
        }
        if let Some(&i) = s.iter().find(|&&i| i == 0 || i > r) {
            return Err(Error::InvalidInput(format!("divisor index {i} is outside 1..={r}")));
        }
    }
    Ok(())
}

fn implied_by(family: &[Vec<usize>], set: &[usize]) -> bool {
    family.iter().any(|t| set.iter().all(|i| t.contains(i)))
}

impl DivisorIncidence {
    /// Incidence with `Y = ∅`: `outside_y` lists the nonempty intersections.
    pub fn new(r: usize, outside_y: Vec<Vec<usize>>) -> Result<Self> {
        check_indices(r, &outside_y)?;
        Ok(Self { r, outside_y: normalize_antichain(&outside_y), nonempty: None })
    }

    /// Incidence with both families given. Every set in `outside_y` must be
    /// implied by `nonempty`.
    pub fn with_nonempty(r: usize, outside_y: Vec<Vec<usize>>, nonempty: Vec<Vec<usize>>) -> Result<Self> {
        check_indices(r, &outside_y)?;
        check_indices(r, &nonempty)?;
        let outside_y = normalize_antichain(&outside_y);
        let nonempty = normalize_antichain(&nonempty);
        if let Some(s) = outside_y.iter().find(|s| !implied_by(&nonempty, s)) {
            return Err(Error::InvalidInput(format!(
                "{s:?} meets outside Y but is not listed as a nonempty intersection"
            )));
        }
        Ok(Self { r, outside_y, nonempty: Some(nonempty) })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn outside_y(&self) -> &[Vec<usize>] {
        &self.outside_y
    }

    /// Maximal index sets with nonempty intersection.
    pub fn nonempty(&self) -> &[Vec<usize>] {
        self.nonempty.as_deref().unwrap_or(&self.outside_y)
    }

    /// Divisors that do not appear in any listed set of `outside_y`, i.e.
    /// divisors contained in `Y`.
    pub fn divisors_inside_y(&self) -> Vec<usize> {
        (1..=self.r).filter(|i| !implied_by(&self.outside_y, &[*i])).collect()
    }
}

fn largest(family: &[Vec<usize>]) -> usize {
    family.iter().map(Vec::len).max().unwrap_or(0)
}

/// `m`: the largest number of distinct divisors with nonempty intersection.
pub fn m_value(inc: &DivisorIncidence) -> Result<usize> {
    if inc.r == 0 {
        return Err(Error::InvalidInput("no divisors given".into()));
    }
    Ok(largest(inc.nonempty()))
}

/// `m_Y`: the largest number of distinct divisors whose intersection is not
/// contained in `Y`.
pub fn m_y_value(inc: &DivisorIncidence) -> Result<usize> {
    if inc.r == 0 {
        return Err(Error::InvalidInput("no divisors given".into()));
    }
    let inside = inc.divisors_inside_y();
    if !inside.is_empty() {
        return Err(Error::InvalidInput(format!("divisors {inside:?} are contained in Y")));
    }
    Ok(largest(&inc.outside_y))
}

/// Outcome of `m·s < r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RungeVerdict {
    pub holds: bool,
    #[serde(rename = "m")]
    pub m_used: u64,
    pub s: u64,
    pub r: u64,
}

/// The tubular Runge condition `m_Y·s < r` (strict).
pub fn runge_condition(m_y: u64, s: u64, r: u64) -> Result<RungeVerdict> {
    if m_y == 0 || s == 0 || r == 0 {
        return Err(Error::InvalidInput(format!("m_Y = {m_y}, s = {s} and r = {r} must all be at least 1")));
    }
    let holds = m_y.checked_mul(s).is_some_and(|p| p < r);
    Ok(RungeVerdict { holds, m_used: m_y, s, r })
}

fn check_level(n: u32) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) || n > MAX_LEVEL {
        return Err(Error::InvalidInput(format!("level {n} must be even and in 2..={MAX_LEVEL}")));
    }
    Ok(())
}

/// Number of distinct divisors `D_{n,a,b}` on `A₂(n)`: `n⁴/2 + 2`.
pub fn siegel_divisor_count(n: u32) -> Result<u64> {
    check_level(n)?;
    Ok(u64::from(n).pow(4) / 2 + 2)
}

/// `m_Y` for `Y` the boundary of `A₂(n)`: `n² − 3`.
pub fn siegel_m_y(n: u32) -> Result<u64> {
    check_level(n)?;
    Ok(u64::from(n).pow(2) - 3)
}

/// `(n² − 3)·s_L < n⁴/2 + 2`.
pub fn siegel_runge_condition(n: u32, s_l: u64) -> Result<RungeVerdict> {
    runge_condition(siegel_m_y(n)?, s_l, siegel_divisor_count(n)?)
}

/// The ten divisors of `A₂(2)` parametrising products of elliptic curves,
/// with `Y` the boundary: any two of them meet only inside `Y`.
pub fn siegel_incidence(n: u32) -> Result<DivisorIncidence> {
    if n != 2 {
        return Err(Error::Unsupported(format!("incidence data is only available for level 2, not {n}")));
    }
    let r = siegel_divisor_count(2)? as usize;
    let singletons = (1..=r).map(|i| vec![i]).collect();
    let pairs = (1..=r).flat_map(|i| (i + 1..=r).map(move |j| vec![i, j])).collect();
    DivisorIncidence::with_nonempty(r, singletons, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    /// Orbits of `(ℤ/n)⁴` under `x ↦ −x`, without the six classes of odd
    /// 2-torsion characteristics.
    fn enumerate_divisor_classes(n: u32) -> usize {
        let n = n as i64;
        let h = n / 2;
        let mut orbits = HashSet::new();
        for x in 0..n.pow(4) {
            let v = [x % n, (x / n) % n, (x / n / n) % n, x / n / n / n];
            let neg = v.map(|c| (n - c) % n);
            orbits.insert(v.min(neg));
        }
        let odd_torsion = orbits
            .iter()
            .filter(|v| v.iter().all(|&c| c % h == 0))
            .filter(|v| {
                let b = v.map(|c| c / h);
                (b[0] * b[2] + b[1] * b[3]) % 2 == 1
            })
            .count();
        assert_eq!(odd_torsion, 6);
        orbits.len() - odd_torsion
    }

    fn lines(y_points: &[Vec<usize>]) -> DivisorIncidence {
        let all_pairs = vec![vec![1, 2], vec![1, 3], vec![2, 3]];
        let outside: Vec<Vec<usize>> = all_pairs
            .iter()
            .filter(|p| !y_points.contains(p))
            .cloned()
            .chain((1..=3).map(|i| vec![i]))
            .collect();
        DivisorIncidence::with_nonempty(3, outside, all_pairs).unwrap()
    }

    #[test]
    fn m_examples() {
        let general = DivisorIncidence::new(3, vec![vec![1, 2], vec![2, 3], vec![1, 3]]).unwrap();
        assert_eq!(m_value(&general).unwrap(), 2);
        let disjoint = DivisorIncidence::new(4, (1..=4).map(|i| vec![i]).collect()).unwrap();
        assert_eq!(m_value(&disjoint).unwrap(), 1);
        let pencil = DivisorIncidence::new(4, vec![vec![1, 2, 3, 4], vec![2, 3]]).unwrap();
        assert_eq!(m_value(&pencil).unwrap(), 4);
        assert_eq!(pencil.outside_y(), &[vec![1, 2, 3, 4]]);
        assert!(matches!(m_value(&DivisorIncidence::new(0, vec![]).unwrap()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn m_y_examples() {
        let all = lines(&[vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!((m_value(&all).unwrap(), m_y_value(&all).unwrap()), (2, 1));
        assert_eq!(m_y_value(&lines(&[vec![1, 2]])).unwrap(), 2);
        let missing = DivisorIncidence::new(3, vec![vec![1, 2]]).unwrap();
        assert_eq!(missing.divisors_inside_y(), vec![3]);
        assert!(matches!(m_y_value(&missing), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn invalid_incidence_is_rejected() {
        assert!(DivisorIncidence::new(3, vec![vec![0, 1]]).is_err());
        assert!(DivisorIncidence::new(3, vec![vec![4]]).is_err());
        assert!(DivisorIncidence::new(3, vec![vec![]]).is_err());
        assert!(DivisorIncidence::with_nonempty(3, vec![vec![1, 2]], vec![vec![1], vec![2]]).is_err());
    }

    #[test]
    fn runge_examples() {
        assert!(runge_condition(1, 9, 10).unwrap().holds);
        assert!(!runge_condition(1, 10, 10).unwrap().holds);
        assert!(runge_condition(13, 9, 130).unwrap().holds);
        assert!(!runge_condition(13, 10, 130).unwrap().holds);
        assert!(!runge_condition(u64::MAX, 2, 5).unwrap().holds);
        assert!(runge_condition(0, 1, 1).is_err());
        assert!(runge_condition(1, 0, 1).is_err());
    }

    #[test]
    fn siegel_formulas() {
        assert_eq!(siegel_divisor_count(2).unwrap(), 10);
        assert_eq!(siegel_divisor_count(4).unwrap(), 130);
        assert_eq!(siegel_divisor_count(6).unwrap(), 650);
        assert_eq!([2, 4, 6].map(|n| siegel_m_y(n).unwrap()), [1, 13, 33]);
        for n in [0, 1, 3, 22] {
            assert!(matches!(siegel_divisor_count(n), Err(Error::InvalidInput(_))));
            assert!(siegel_m_y(n).is_err());
        }
        assert!(siegel_runge_condition(2, 9).unwrap().holds);
        assert!(!siegel_runge_condition(2, 10).unwrap().holds);
        assert!(siegel_runge_condition(4, 9).unwrap().holds);
        assert!(!siegel_runge_condition(4, 10).unwrap().holds);
    }

    #[test]
    fn divisor_count_matches_orbit_enumeration() {
        for n in [2, 4, 6, 8, 10, 12] {
            assert_eq!(siegel_divisor_count(n).unwrap(), enumerate_divisor_classes(n) as u64, "n = {n}");
        }
    }

    #[test]
    fn level_two_incidence() {
        let inc = siegel_incidence(2).unwrap();
        assert_eq!(inc.r(), 10);
        assert_eq!(m_y_value(&inc).unwrap(), 1);
        assert_eq!(m_y_value(&inc).unwrap() as u64, siegel_m_y(2).unwrap());
        assert_eq!(m_value(&inc).unwrap(), 2);
        assert!(runge_condition(1, 9, inc.r() as u64).unwrap().holds);
        assert!(matches!(siegel_incidence(4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn incidence_json_is_one_based() {
        let inc = DivisorIncidence::new(3, vec![vec![2, 1], vec![3]]).unwrap();
        let json = serde_json::to_string(&inc).unwrap();
        assert_eq!(json, r#"{"r":3,"outside_Y":[[1,2],[3]]}"#);
        assert_eq!(serde_json::from_str::<DivisorIncidence>(&json).unwrap(), inc);
        assert!(serde_json::from_str::<DivisorIncidence>(r#"{"r":2,"outside_Y":[[0]]}"#).is_err());
    }

    fn family() -> impl Strategy<Value = Vec<Vec<usize>>> {
        prop::collection::vec(prop::collection::vec(1usize..=6, 1..5), 0..8)
    }

    proptest! {
        #[test]
        fn antichain_normalization_is_idempotent_and_order_free(sets in family(), seed in any::<u64>()) {
            let once = normalize_antichain(&sets);
            prop_assert_eq!(normalize_antichain(&once), once.clone());
            let mut shuffled: Vec<Vec<usize>> = sets.iter().map(|s| s.iter().rev().copied().collect()).collect();
            let k = if shuffled.is_empty() { 0 } else { (seed as usize) % shuffled.len() };
            shuffled.rotate_left(k);
            prop_assert_eq!(normalize_antichain(&shuffled), once.clone());
            for (i, a) in once.iter().enumerate() {
                for b in &once[i + 1..] {
                    prop_assert!(!a.iter().all(|x| b.contains(x)) && !b.iter().all(|x| a.contains(x)));
                }
            }
        }

        #[test]
        fn m_y_never_exceeds_m(outside in family(), extra in family()) {
            let mut outside = outside;
            outside.extend((1..=6).map(|i| vec![i]));
            let nonempty: Vec<Vec<usize>> = outside.iter().chain(extra.iter()).cloned().collect();
            let inc = DivisorIncidence::with_nonempty(6, outside, nonempty).unwrap();
            prop_assert!(m_y_value(&inc).unwrap() <= m_value(&inc).unwrap());
        }

        #[test]
        fn runge_condition_is_monotone(m in 1u64..50, s in 1u64..50, r in 1u64..2000) {
            if runge_condition(m, s, r).unwrap().holds {
                if s > 1 {
                    prop_assert!(runge_condition(m, s - 1, r).unwrap().holds);
                }
                if m > 1 {
                    prop_assert!(runge_condition(m - 1, s, r).unwrap().holds);
                }
            }
        }
    }
}
