//! Limit behaviour of `F_N(s)` along structured subsequences of `N`, the
//! Poissonian reference `2s`, and s-sweeps over the three engines.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::closedform::{f_closed_form, f_closed_form_unchecked, in_validated_domain};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::paircount::{pair_count_naive, pair_count_sorted};
use crate::sequence::{vdc_prefix, PointSet};

/// `2s`, the limit for Poissonian pair correlations.
pub fn poisson_reference(s: &Rational) -> Result<Rational> {
    if s.is_negative() {
        return Err(Error::Domain(format!("s must be nonnegative, got {s}")));
    }
    Ok(s + s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubsequenceKind {
    /// `N = 2^M`
    PowersOfTwo,
    /// `N = 2^M + 1`
    PowerPlusOne,
    /// `N = 2^M + 2^k` for a fixed `k`
    PowerPlusPower(u32),
    /// The given `N` values, strictly increasing; the `M` range is ignored.
    ExplicitList(Vec<u64>),
}

impl SubsequenceKind {
    fn member(&self, m: u32) -> u64 {
        match self {
            SubsequenceKind::PowersOfTwo => 1 << m,
            SubsequenceKind::PowerPlusOne => (1 << m) + 1,
            SubsequenceKind::PowerPlusPower(k) => (1 << m) + (1 << k),
            SubsequenceKind::ExplicitList(_) => unreachable!("explicit lists are not generated"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeSeries {
    pub s: Rational,
    pub kind: SubsequenceKind,
    /// `(N, F_N(s))`, strictly increasing in `N`.
    pub entries: Vec<(u64, Rational)>,
}

impl ProbeSeries {
    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.entries.iter().map(|(_, f)| f)
    }
}

/// Evaluates the closed form along the subsequence `kind` for `M` in
/// `m_min..=m_max` (at most 62).
pub fn limit_probe(s: &Rational, kind: SubsequenceKind, m_min: u32, m_max: u32) -> Result<ProbeSeries> {
    if s.is_negative() {
        return Err(Error::Domain(format!("s must be nonnegative, got {s}")));
    }
    let ns: Vec<u64> = match &kind {
        SubsequenceKind::ExplicitList(list) => {
            if list.is_empty() || list.windows(2).any(|w| w[0] >= w[1]) || list[0] == 0 {
                return Err(Error::Domain(
                    "explicit N list must be positive and strictly increasing".into(),
                ));
            }
            list.clone()
        }
        _ => {
            if m_min < 1 || m_min > m_max || m_max > 62 {
                return Err(Error::Domain(format!(
                    "need 1 <= m_min <= m_max <= 62, got {m_min}..{m_max}"
                )));
            }
            if let SubsequenceKind::PowerPlusPower(k) = kind {
                if k > 62 {
                    return Err(Error::Domain(format!("power offset k = {k} exceeds 62")));
                }
            }
            (m_min..=m_max).map(|m| kind.member(m)).collect()
        }
    };
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("probed N values are not strictly increasing".into()));
    }
    let entries = ns
        .into_iter()
        .map(|n| f_closed_form(n, s).map(|f| (n, f)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeSeries {
        s: s.clone(),
        kind,
        entries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    ClosedForm,
    Sorted,
    Naive,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::ClosedForm, Engine::Sorted, Engine::Naive];

    pub fn name(self) -> &'static str {
        match self {
            Engine::ClosedForm => "closed",
            Engine::Sorted => "sorted",
            Engine::Naive => "naive",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "closed" | "closed_form" => Ok(Engine::ClosedForm),
            "sorted" => Ok(Engine::Sorted),
            "naive" => Ok(Engine::Naive),
            other => Err(format!("unknown engine {other:?} (expected closed, sorted or naive)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordStatus {
    Ok,
    OutOfDomain,
}

impl RecordStatus {
    pub fn name(self) -> &'static str {
        match self {
            RecordStatus::Ok => "ok",
            RecordStatus::OutOfDomain => "out_of_domain",
        }
    }
}

/// One evaluated grid point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationRecord {
    pub n: u64,
    pub s: Rational,
    /// Absent when the engine refused the input.
    pub f: Option<Rational>,
    pub poisson: Rational,
    pub engine: Engine,
    pub elapsed_nanos: u64,
    pub status: RecordStatus,
}

/// Evaluates `F_N(s)` of a fixed point set, or of the base-2 sequence via the
/// closed form when `points` is `None`.
fn evaluate(engine: Engine, n: u64, points: Option<&PointSet>, s: &Rational) -> Result<Rational> {
    match (engine, points) {
        (Engine::ClosedForm, None) => f_closed_form(n, s),
        (Engine::ClosedForm, Some(_)) => Err(Error::Domain(
            "the closed form applies only to the base-2 van der Corput sequence".into(),
        )),
        (Engine::Sorted, Some(p)) => pair_count_sorted(p, s).map(|r| r.f_value),
        (Engine::Naive, Some(p)) => pair_count_naive(p, s).map(|r| r.f_value),
        (_, None) => unreachable!("oracle engines need points"),
    }
}

fn record(engine: Engine, n: u64, points: Option<&PointSet>, s: &Rational) -> CorrelationRecord {
    let start = Instant::now();
    let outcome = evaluate(engine, n, points, s);
    let elapsed_nanos = start.elapsed().as_nanos() as u64;
    let (f, status) = match outcome {
        Ok(f) => (Some(f), RecordStatus::Ok),
        Err(_) => (None, RecordStatus::OutOfDomain),
    };
    CorrelationRecord {
        n,
        s: s.clone(),
        f,
        poisson: s + s,
        engine,
        elapsed_nanos,
        status,
    }
}

/// `F_N(s)` of the base-2 sequence at every `s`, in grid order. Inputs an
/// engine refuses come back with [`RecordStatus::OutOfDomain`].
pub fn sweep(n: u64, s_values: &[Rational], engine: Engine) -> Result<Vec<CorrelationRecord>> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    if let Some(bad) = s_values.iter().find(|s| s.is_negative()) {
        return Err(Error::Domain(format!("s must be nonnegative, got {bad}")));
    }
    let points = match engine {
        Engine::ClosedForm => None,
        _ => {
            let len = usize::try_from(n).map_err(|_| Error::Domain(format!("N = {n} too large to generate")))?;
            Some(vdc_prefix(len, 2)?)
        }
    };
    Ok(s_values
        .par_iter()
        .map(|s| record(engine, n, points.as_ref(), s))
        .collect())
}

/// Like [`sweep`] for an arbitrary point set; the closed-form engine is refused.
pub fn sweep_points(points: &PointSet, s_values: &[Rational], engine: Engine) -> Vec<CorrelationRecord> {
    let n = points.len() as u64;
    s_values
        .par_iter()
        .map(|s| record(engine, n, Some(points), s))
        .collect()
}

/// Where the unguarded closed form first departs from the oracle for one `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryReport {
    pub n: u64,
    /// Grid points with `s < N/2` at which formula and oracle disagreed.
    pub mismatches_below_half: Vec<Rational>,
    /// Smallest grid `s` with a disagreement, if any.
    pub first_mismatch: Option<Rational>,
}

/// Compares the unguarded closed form with the sorted oracle on `s_grid`.
pub fn validity_boundary(n: u64, s_grid: &[Rational]) -> Result<BoundaryReport> {
    let len = usize::try_from(n).map_err(|_| Error::Domain(format!("N = {n} too large to generate")))?;
    let pts = vdc_prefix(len, 2)?;
    let mut mismatches_below_half = Vec::new();
    let mut first_mismatch: Option<Rational> = None;
    for s in s_grid {
        let oracle = pair_count_sorted(&pts, s)?.f_value;
        let formula = f_closed_form_unchecked(n, s);
        if oracle != formula {
            if in_validated_domain(n, s) {
                mismatches_below_half.push(s.clone());
            }
            if first_mismatch.as_ref().is_none_or(|f| s < f) {
                first_mismatch = Some(s.clone());
            }
        }
    }
    Ok(BoundaryReport {
        n,
        mismatches_below_half,
        first_mismatch,
    })
}

/// Median wall time of `runs` evaluations after one discarded warm-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Timing {
    pub engine: Engine,
    pub n: u64,
    pub s: Rational,
    pub median_nanos: u64,
    pub f: Rational,
}

/// Times one engine on the base-2 sequence. Point generation for the oracle
/// engines happens once, outside the timed region.
pub fn time_engine(engine: Engine, n: u64, s: &Rational, runs: usize) -> Result<Timing> {
    if runs == 0 {
        return Err(Error::Domain("need at least one timed run".into()));
    }
    let points = match engine {
        Engine::ClosedForm => None,
        _ => {
            let len = usize::try_from(n).map_err(|_| Error::Domain(format!("N = {n} too large to generate")))?;
            Some(vdc_prefix(len, 2)?)
        }
    };
    let f = evaluate(engine, n, points.as_ref(), s)?;
    let mut samples: Vec<u64> = (0..runs)
        .map(|_| {
            let start = Instant::now();
            let out = evaluate(engine, n, points.as_ref(), s);
            let elapsed = start.elapsed().as_nanos() as u64;
            debug_assert_eq!(out.as_ref().ok(), Some(&f));
            elapsed
        })
        .collect();
    samples.sort_unstable();
    Ok(Timing {
        engine,
        n,
        s: s.clone(),
        median_nanos: samples[samples.len() / 2],
        f,
    })
}
