//! The level schedule behind the separator-based recursion: window counts
//! s_i, thickness budgets theta_i, component-size thresholds n_i, and the
//! recursive builder that turns bounded-span layerings into subgraph-based
//! systems of size exactly s_1 * ... * s_i. All arithmetic is exact; the
//! schedule doubles exponentially and must fail loudly instead of wrapping.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::builders::{identity_system, windowed_members};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layering::{depth_band_layering, Layering};
use crate::overlay::HostRef;
use crate::separator::separator_tree_decomposition;
use crate::system::{ratio, OverlaySystem};
use crate::td::TreeDecomposition;

const LEVEL_LIMIT: usize = 64;
const COUNT_LIMIT: u64 = 1 << 31;

fn big(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Size threshold of a schedule level. Finite thresholds are exact
/// rationals; a zero decay rate sends them to infinity once the base of the
/// recurrence exceeds one.
#[derive(Clone, Debug, PartialEq)]
pub enum LevelSize {
    Finite(BigRational),
    Infinite,
}

impl LevelSize {
    pub fn admits(&self, size: usize) -> bool {
        match self {
            LevelSize::Finite(q) => big(size as u64) <= *q,
            LevelSize::Infinite => true,
        }
    }

    fn exceeds(&self, other: &LevelSize) -> bool {
        match (self, other) {
            (LevelSize::Infinite, LevelSize::Infinite) => false,
            (LevelSize::Infinite, LevelSize::Finite(_)) => true,
            (LevelSize::Finite(_), LevelSize::Infinite) => false,
            (LevelSize::Finite(a), LevelSize::Finite(b)) => a > b,
        }
    }
}

impl std::fmt::Display for LevelSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LevelSize::Finite(q) => write!(f, "{q}"),
            LevelSize::Infinite => write!(f, "infinity"),
        }
    }
}

/// Parameters of the level schedule: growth rate alpha, decay rate delta,
/// expansion base c, radius r, accuracy k, and base-case size t. Per level,
/// s_1 = 1 and s_i = ceil(4 * alpha^-1 * (1+alpha)^i * r * k); theta_1 = 1
/// and theta_i = theta_{i-1} + 4r/s_i; n_1 = t and
/// n_i = (n_{i-1} / c^{s_i + 2r})^{1/delta}.
///
/// delta must be zero or the reciprocal of a positive integer so that the
/// n_i recurrence stays exactly representable; at delta = 0 the power is
/// taken as a limit (base > 1 gives an infinite threshold).
#[derive(Clone, Debug)]
pub struct ScheduleParams {
    alpha: BigRational,
    delta: BigRational,
    /// 1/delta when delta > 0.
    inv_delta: Option<u32>,
    c: u64,
    r: u32,
    k: u32,
    t: u64,
}

impl ScheduleParams {
    pub fn new(
        alpha: BigRational,
        delta: BigRational,
        c: u64,
        r: u32,
        k: u32,
        t: u64,
    ) -> Result<ScheduleParams> {
        if !alpha.is_positive() {
            return Err(Error::Build("schedule growth rate must be positive".into()));
        }
        if delta.is_negative() || delta >= BigRational::one() {
            return Err(Error::Build(
                "schedule decay rate must lie in [0, 1)".into(),
            ));
        }
        let inv_delta = if delta.is_zero() {
            None
        } else {
            if !delta.numer().is_one() {
                return Err(Error::Build(format!(
                    "decay rate {delta} is not the reciprocal of an integer; \
                     the level thresholds would leave exact arithmetic"
                )));
            }
            Some(delta.denom().to_u32().ok_or_else(|| {
                Error::Build(format!("decay rate {delta} is too small to invert"))
            })?)
        };
        if c < 2 {
            return Err(Error::Build("expansion base must be at least 2".into()));
        }
        if r == 0 || k == 0 {
            return Err(Error::Build(
                "radius and accuracy must both be positive".into(),
            ));
        }
        if t == 0 {
            return Err(Error::Build("base-case size must be positive".into()));
        }
        Ok(ScheduleParams {
            alpha,
            delta,
            inv_delta,
            c,
            r,
            k,
            t,
        })
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Window count of level i: s_1 = 1, then the ceiling of
    /// 4 * alpha^-1 * (1+alpha)^i * r * k. Rejects counts beyond 2^31.
    pub fn s(&self, i: usize) -> Result<u64> {
        if i == 0 {
            return Err(Error::Build("levels are numbered from 1".into()));
        }
        if i == 1 {
            return Ok(1);
        }
        let mut grow = BigRational::one();
        let base = BigRational::one() + self.alpha.clone();
        for _ in 0..i {
            grow *= &base;
        }
        let raw = big(4) * grow * big(self.r as u64) * big(self.k as u64) / self.alpha.clone();
        let ceil = raw.ceil().to_integer();
        match ceil.to_u64() {
            Some(v) if v <= COUNT_LIMIT => Ok(v),
            _ => Err(Error::Build(format!(
                "window count s_{i} = {ceil} exceeds 2^31"
            ))),
        }
    }

    /// Thickness budget of level i: theta_1 = 1, theta_i = theta_{i-1}
    /// + 4r/s_i. Stays below 1 + 1/k for every alpha, which is also
    /// asserted.
    pub fn theta(&self, i: usize) -> Result<BigRational> {
        if i == 0 {
            return Err(Error::Build("levels are numbered from 1".into()));
        }
        let mut th = BigRational::one();
        for j in 2..=i {
            th += big(4 * self.r as u64) / big(self.s(j)?);
        }
        let bound = BigRational::one() + ratio(1, self.k as u64);
        if th > bound {
            return Err(Error::Build(format!(
                "thickness budget theta_{i} = {th} exceeds 1 + 1/k = {bound}"
            )));
        }
        Ok(th)
    }

    /// Component-size threshold of level i: n_1 = t, then
    /// n_i = (n_{i-1} / c^{s_i + 2r})^{1/delta}, taken as a limit when
    /// delta = 0 (base above one means no threshold at all).
    pub fn n(&self, i: usize) -> Result<LevelSize> {
        if i == 0 {
            return Err(Error::Build("levels are numbered from 1".into()));
        }
        let mut cur = LevelSize::Finite(big(self.t));
        for j in 2..=i {
            let prev = match cur {
                LevelSize::Infinite => return Ok(LevelSize::Infinite),
                LevelSize::Finite(q) => q,
            };
            let div = BigInt::from(self.c).pow(self.s(j)? as u32 + 2 * self.r);
            let base = prev / BigRational::from_integer(div);
            cur = match self.inv_delta {
                None => {
                    if base > BigRational::one() {
                        LevelSize::Infinite
                    } else if base == BigRational::one() {
                        LevelSize::Finite(BigRational::one())
                    } else {
                        LevelSize::Finite(BigRational::zero())
                    }
                }
                Some(m) => {
                    let mut acc = BigRational::one();
                    for _ in 0..m {
                        acc *= &base;
                    }
                    LevelSize::Finite(acc)
                }
            };
        }
        Ok(cur)
    }

    /// Smallest level whose threshold admits a component of the given size.
    /// A schedule whose thresholds stop increasing before reaching the size
    /// is infeasible.
    pub fn level_for(&self, size: usize) -> Result<usize> {
        let mut prev: Option<LevelSize> = None;
        for i in 1..=LEVEL_LIMIT {
            let ni = self.n(i)?;
            if ni.admits(size) {
                return Ok(i);
            }
            if let Some(p) = &prev {
                if !ni.exceeds(p) {
                    return Err(Error::Build(format!(
                        "schedule is infeasible: n_{i} = {ni} does not exceed \
                         n_{} = {p}, so no level admits components of {size} vertices",
                        i - 1
                    )));
                }
            }
            prev = Some(ni);
        }
        Err(Error::Build(format!(
            "components of {size} vertices need more than {LEVEL_LIMIT} schedule levels"
        )))
    }
}

/// Accuracy parameter of the sublinear-separator regime:
/// epsilon = min(1/delta - 1, 1/2), with delta = 0 read as the limit 1/2.
pub fn sublin_epsilon(delta: &BigRational) -> Result<BigRational> {
    if delta.is_negative() || *delta >= BigRational::one() {
        return Err(Error::Build("decay rate must lie in [0, 1)".into()));
    }
    let half = ratio(1, 2);
    if delta.is_zero() {
        return Ok(half);
    }
    let candidate = delta.recip() - BigRational::one();
    Ok(candidate.min(half))
}

/// Growth rate derived from the accuracy parameter: alpha = eps(1 - eps)/2.
pub fn sublin_alpha(eps: &BigRational) -> BigRational {
    eps * (BigRational::one() - eps) / big(2)
}

/// Exponent E such that the base-case size is c^E:
/// t = (c^{2r} * (c^{8rk/alpha})^{(1+alpha)^2})^{2/eps}
///   = c^{(2/eps) * (2r + (8rk/alpha)(1+alpha)^2)}.
pub fn sublin_t_exponent(
    eps: &BigRational,
    alpha: &BigRational,
    r: u32,
    k: u32,
) -> BigRational {
    let inner = big(2 * r as u64)
        + big(8 * r as u64 * k as u64) / alpha.clone()
            * (BigRational::one() + alpha) * (BigRational::one() + alpha);
    big(2) / eps.clone() * inner
}

/// Schedule parameters of the sublinear-separator regime for a graph of n
/// vertices. The base-case size t = max(3, c^E) doubles past 2^31 for every
/// c >= 2 (the exponent E is at least 264), so this reports the symbolic
/// size and refuses; choose desk-scale schedules through ScheduleParams
/// directly.
pub fn sublin_params(
    c: u64,
    delta: &BigRational,
    r: u32,
    k: u32,
    n: u64,
) -> Result<ScheduleParams> {
    if c < 2 {
        return Err(Error::Build("expansion base must be at least 2".into()));
    }
    if r == 0 || k == 0 {
        return Err(Error::Build(
            "radius and accuracy must both be positive".into(),
        ));
    }
    let eps = sublin_epsilon(delta)?;
    let alpha = sublin_alpha(&eps);
    let exp = sublin_t_exponent(&eps, &alpha, r, k);
    let (p, q) = (exp.numer().clone(), exp.denom().clone());
    // t > 2^31 iff c^p > 2^(31 q); both sides stay exact
    let pu = p.to_u32().ok_or_else(|| {
        Error::Build(format!("base-case exponent {exp} is out of range"))
    })?;
    let qu = q.to_u32().ok_or_else(|| {
        Error::Build(format!("base-case exponent {exp} is out of range"))
    })?;
    let lhs = BigInt::from(c).pow(pu);
    let rhs = BigInt::from(2).pow(31 * qu);
    if lhs > rhs {
        return Err(Error::Build(format!(
            "base-case size t = max(3, (c^(2r) * (c^(8rk/alpha))^((1+alpha)^2))^(2/eps)) \
             = {c}^({exp}) exceeds 2^31 at c = {c}, r = {r}, k = {k}, eps = {eps}, \
             alpha = {alpha}; pick a desk-scale schedule through ScheduleParams instead"
        )));
    }
    // unreachable for c >= 2; kept for completeness of the contract
    let root = lhs.to_biguint().unwrap().nth_root(qu);
    let mut t = root.clone();
    if BigInt::from(root.pow(qu)) < lhs {
        t += 1u32;
    }
    let t = t.to_u64().unwrap().max(3);
    let params = ScheduleParams::new(alpha, delta.clone(), c, r, k, t)?;
    let level = params.level_for(n as usize)?;
    if !params.n(level)?.admits(n as usize) {
        return Err(Error::Build(format!(
            "level {level} does not reach graphs of {n} vertices"
        )));
    }
    Ok(params)
}

/// Where the layering of a level comes from: a freshly built separator tree
/// with the given separator budget, or a caller-provided decomposition of
/// the whole graph. Recursion into a window restricts a provided
/// decomposition to the window's vertices; the separator variant rebuilds.
#[derive(Clone, Debug)]
pub enum LayeringSource {
    SeparatorTree { budget: usize },
    Provided { td: TreeDecomposition },
}

/// Depth-band layering of the source's decomposition, with the band width
/// set to the largest depth span of any vertex.
fn layering_for(g: &Graph, source: &LayeringSource) -> Result<Layering> {
    let owned;
    let td = match source {
        LayeringSource::SeparatorTree { budget } => {
            owned = separator_tree_decomposition(g, *budget)?;
            &owned
        }
        LayeringSource::Provided { td } => td,
    };
    let (min_depth, max_depth) = td.vertex_depth_ranges(g.n())?;
    let band = (0..g.n())
        .map(|v| max_depth[v] - min_depth[v] + 1)
        .max()
        .unwrap_or(1);
    depth_band_layering(g, td, band)
}

fn source_for_window(source: &LayeringSource, verts: &[u32]) -> LayeringSource {
    match source {
        LayeringSource::SeparatorTree { budget } => {
            LayeringSource::SeparatorTree { budget: *budget }
        }
        LayeringSource::Provided { td } => {
            let keep: std::collections::HashSet<u32> = verts.iter().copied().collect();
            let restricted = td
                .filter_bags(|v| keep.contains(&v))
                .relabel(|v| verts.binary_search(&v).unwrap() as u32);
            LayeringSource::Provided { td: restricted }
        }
    }
}

/// Recursive windowed system of the level schedule: level 1 components get
/// the identity system, level i >= 2 slides windows of s_i layers with r
/// buffers over the level's layering and recurses one level down inside
/// each window, exactly as the layering lift does with its window length
/// replaced by s_i. The result is subgraph-based with thickness at most
/// theta_i <= 1 + 1/k and size exactly s_1 * ... * s_i.
pub fn separator_system(
    g: &Graph,
    params: &ScheduleParams,
    source: &LayeringSource,
) -> Result<OverlaySystem> {
    let max_comp = g
        .components()
        .iter()
        .map(|c| c.len())
        .max()
        .unwrap_or(0);
    if max_comp == 0 {
        return Err(Error::Build("the empty graph has no system".into()));
    }
    let level = params.level_for(max_comp)?;
    build_at_level(g, params, level, source)
}

fn build_at_level(
    g: &Graph,
    params: &ScheduleParams,
    level: usize,
    source: &LayeringSource,
) -> Result<OverlaySystem> {
    let max_comp = g
        .components()
        .iter()
        .map(|c| c.len())
        .max()
        .unwrap_or(0);
    let ni = params.n(level)?;
    if !ni.admits(max_comp) {
        return Err(Error::Build(format!(
            "a component of {max_comp} vertices exceeds the level-{level} threshold \
             n_{level} = {ni}; the level is too small"
        )));
    }
    let host = HostRef::plain(g.clone());
    if level == 1 {
        return identity_system(&host, params.r());
    }
    let l = layering_for(g, source)?;
    let s_i = params.s(level)? as i64;
    let bound = params.theta(level - 1)?;
    let mut base = |_whost: &HostRef, verts: &[u32]| -> Result<OverlaySystem> {
        let wg = crate::graph::Subgraph::induced(g, verts)?.graph().clone();
        if level - 1 == 1 {
            // the base level needs no layering, so skip the source restriction
            return build_at_level(&wg, params, 1, source);
        }
        let child = source_for_window(source, verts);
        build_at_level(&wg, params, level - 1, &child)
    };
    let members = windowed_members(&host, &l, s_i, params.r(), &bound, &mut base)?;
    let mut expected: usize = 1;
    for j in 2..=level {
        expected = expected
            .checked_mul(params.s(j)? as usize)
            .ok_or_else(|| Error::Build("system size overflows".into()))?;
    }
    if members.len() != expected {
        return Err(Error::Build(format!(
            "level {level} built {} members, expected exactly {expected}",
            members.len()
        )));
    }
    let tw = members.iter().map(|m| m.width()).max().unwrap_or(-1);
    OverlaySystem::new(members, tw, params.theta(level)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::overlay::verify_overlay;

    fn params_unit_alpha(t: u64) -> ScheduleParams {
        // alpha = 1, delta = 1/20, c = 2, r = k = 1
        ScheduleParams::new(big(1), ratio(1, 20), 2, 1, 1, t).unwrap()
    }

    #[test]
    fn window_counts_match_the_closed_form() {
        let p = params_unit_alpha(100);
        assert_eq!(p.s(1).unwrap(), 1);
        // 4 * 1 * 2^2 * 1 * 1 = 16
        assert_eq!(p.s(2).unwrap(), 16);
        assert_eq!(p.s(3).unwrap(), 32);
        assert_eq!(p.s(4).unwrap(), 64);
        let third = ScheduleParams::new(ratio(1, 3), ratio(1, 20), 2, 1, 2, 5).unwrap();
        // 4 * 3 * (4/3)^2 * 1 * 2 = 128/3, ceiling 43
        assert_eq!(third.s(2).unwrap(), 43);
    }

    #[test]
    fn thickness_budgets_accumulate_and_stay_bounded() {
        let p = params_unit_alpha(100);
        assert_eq!(p.theta(1).unwrap(), ratio(1, 1));
        assert_eq!(p.theta(2).unwrap(), ratio(5, 4));
        // 5/4 + 4/32 = 11/8
        assert_eq!(p.theta(3).unwrap(), ratio(11, 8));
        for i in 1..=12 {
            assert!(p.theta(i).unwrap() <= ratio(2, 1));
        }
        let k4 = ScheduleParams::new(big(1), ratio(1, 20), 2, 1, 4, 5).unwrap();
        for i in 1..=12 {
            assert!(k4.theta(i).unwrap() <= ratio(5, 4));
        }
    }

    #[test]
    fn oversized_window_counts_are_rejected() {
        let p = params_unit_alpha(100);
        let err = p.s(40).unwrap_err();
        assert!(err.to_string().contains("exceeds 2^31"), "{err}");
    }

    #[test]
    fn thresholds_follow_the_decay_recurrence() {
        // t = 2^19, c = 2, s_2 + 2r = 18: n_2 = (2^19 / 2^18)^20 = 2^20
        let p = params_unit_alpha(1 << 19);
        assert_eq!(p.n(1).unwrap(), LevelSize::Finite(big(1 << 19)));
        assert_eq!(p.n(2).unwrap(), LevelSize::Finite(big(1 << 20)));
        assert_eq!(p.level_for(100).unwrap(), 1);
        assert_eq!(p.level_for((1 << 19) + 5).unwrap(), 2);
    }

    #[test]
    fn zero_decay_sends_thresholds_to_infinity() {
        let p = ScheduleParams::new(big(1), BigRational::zero(), 2, 1, 1, 1 << 19).unwrap();
        assert_eq!(p.n(2).unwrap(), LevelSize::Infinite);
        assert_eq!(p.level_for(usize::MAX / 2).unwrap(), 2);
    }

    #[test]
    fn stalled_schedules_report_infeasibility() {
        // t = 100 < 2^18, so n_2 collapses toward zero
        let p = params_unit_alpha(100);
        let err = p.level_for(101).unwrap_err();
        assert!(err.to_string().contains("infeasible"), "{err}");
    }

    #[test]
    fn decay_rates_must_be_integer_reciprocals() {
        let err = ScheduleParams::new(big(1), ratio(3, 4), 2, 1, 1, 5).unwrap_err();
        assert!(err.to_string().contains("reciprocal"), "{err}");
    }

    #[test]
    fn sublin_accuracy_examples() {
        assert_eq!(sublin_epsilon(&ratio(1, 2)).unwrap(), ratio(1, 2));
        assert_eq!(sublin_epsilon(&ratio(3, 4)).unwrap(), ratio(1, 3));
        assert_eq!(sublin_epsilon(&BigRational::zero()).unwrap(), ratio(1, 2));
        assert_eq!(sublin_alpha(&ratio(1, 2)), ratio(1, 8));
        assert_eq!(sublin_alpha(&ratio(1, 3)), ratio(1, 9));
    }

    #[test]
    fn sublin_base_case_size_overflows_symbolically() {
        // eps = 1/2, alpha = 1/8: E = 4 * (2 + 64 * (81/64)) = 332
        let exp = sublin_t_exponent(&ratio(1, 2), &ratio(1, 8), 1, 1);
        assert_eq!(exp, big(332));
        let err = sublin_params(2, &ratio(1, 2), 1, 1, 1000).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("exceeds 2^31"), "{text}");
        assert!(text.contains("2^(332)"), "{text}");
        assert!(text.contains("(1+alpha)^2"), "{text}");
    }

    #[test]
    fn threshold_growth_dominates_the_power_law() {
        // with the sublinear-regime alpha = 1/8 and a large enough base
        // case, each threshold beats the previous one raised to 1 + alpha:
        // n_i^8 >= n_{i-1}^9, checked exactly
        let delta = ratio(1, 20);
        let eps = sublin_epsilon(&delta).unwrap();
        let alpha = sublin_alpha(&eps);
        assert_eq!(alpha, ratio(1, 8));
        let p = ScheduleParams::new(alpha, delta, 2, 1, 1, 1 << 46).unwrap();
        assert_eq!(p.s(2).unwrap(), 41);
        assert_eq!(p.s(3).unwrap(), 46);
        // n_2 = (2^46 / 2^43)^20 = 2^60, n_3 = (2^60 / 2^48)^20 = 2^240
        assert_eq!(p.n(2).unwrap(), LevelSize::Finite(big(1) * big(1u64 << 60)));
        let pow2 = |e: u32| BigRational::from_integer(BigInt::from(2).pow(e));
        assert_eq!(p.n(3).unwrap(), LevelSize::Finite(pow2(240)));
        for i in 2..=4usize {
            let prev = match p.n(i - 1).unwrap() {
                LevelSize::Finite(q) => q,
                LevelSize::Infinite => unreachable!(),
            };
            let cur = match p.n(i).unwrap() {
                LevelSize::Finite(q) => q,
                LevelSize::Infinite => unreachable!(),
            };
            let mut lhs = BigRational::one();
            for _ in 0..8 {
                lhs *= &cur;
            }
            let mut rhs = BigRational::one();
            for _ in 0..9 {
                rhs *= &prev;
            }
            assert!(lhs >= rhs, "n_{i}^8 fell below n_{}^9", i - 1);
        }
    }

    #[test]
    fn level_one_components_get_the_identity_system() {
        let g = generators::random_tree(40, 7).unwrap();
        let p = params_unit_alpha(1 << 19);
        let source = LayeringSource::SeparatorTree { budget: 1 };
        let sys = separator_system(&g, &p, &source).unwrap();
        assert_eq!(sys.size(), 1);
        let (_, max) = sys.thickness();
        assert_eq!(max, ratio(1, 1));
        for m in sys.members() {
            verify_overlay(m).unwrap();
        }
    }

    #[test]
    fn separator_source_layers_small_graphs() {
        let g = generators::grid(5, 5).unwrap();
        let l = layering_for(&g, &LayeringSource::SeparatorTree { budget: 5 }).unwrap();
        crate::layering::verify_layering(&g, &l).unwrap();
        assert!(l.d() >= 1);
    }

    #[test]
    fn provided_source_restricts_to_windows() {
        let g = generators::path(10).unwrap();
        let bags: Vec<Vec<u32>> = (0..9).map(|i| vec![i as u32, i as u32 + 1]).collect();
        let parent: Vec<Option<usize>> =
            (0..9).map(|i| if i == 0 { None } else { Some(i - 1) }).collect();
        let td = TreeDecomposition::new(bags, parent).unwrap();
        let source = LayeringSource::Provided { td };
        let child = source_for_window(&source, &[3, 4, 5, 6]);
        match child {
            LayeringSource::Provided { td } => {
                let sub = crate::graph::Subgraph::induced(&g, &[3, 4, 5, 6]).unwrap();
                td.validate(sub.graph()).unwrap();
            }
            _ => panic!("provided sources must restrict, not rebuild"),
        }
    }

    #[test]
    fn empty_graphs_are_rejected() {
        let g = Graph::new(0);
        let p = params_unit_alpha(1 << 19);
        let err = separator_system(&g, &p, &LayeringSource::SeparatorTree { budget: 1 })
            .unwrap_err();
        assert!(err.to_string().contains("empty"), "{err}");
    }
}
