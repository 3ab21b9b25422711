//! The dimensional number `s(t)` and its partition sets.

use serde::Serialize;

use crate::{Error, Result};

/// Ambient product space: Ahlfors exponents per factor and the scaling parameter κ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductSpaceSpec {
    deltas: Vec<f64>,
    kappa: f64,
}

impl ProductSpaceSpec {
    pub fn new(deltas: Vec<f64>, kappa: f64) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::InvalidSpace("need at least one factor".into()));
        }
        if let Some(d) = deltas.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::InvalidSpace(format!(
                "delta must be positive, got {d}"
            )));
        }
        if !(0.0..1.0).contains(&kappa) {
            return Err(Error::InvalidSpace(format!(
                "kappa must lie in [0,1), got {kappa}"
            )));
        }
        Ok(Self { deltas, kappa })
    }

    /// `d` factors with the same exponent.
    pub fn uniform(d: usize, delta: f64, kappa: f64) -> Result<Self> {
        Self::new(vec![delta; d], kappa)
    }

    pub fn d(&self) -> usize {
        self.deltas.len()
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Σδᵢ, the dimension of the ambient space.
    pub fn total(&self) -> f64 {
        self.deltas.iter().sum()
    }
}

/// Side-length exponents: big side `ρ^{aᵢ}`, shrunk side `ρ^{aᵢ+tᵢ}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentProfile {
    a: Vec<f64>,
    t: Vec<f64>,
}

impl ExponentProfile {
    pub fn new(a: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != t.len() {
            return Err(Error::InvalidProfile(format!(
                "a and t must be non-empty with equal lengths ({} vs {})",
                a.len(),
                t.len()
            )));
        }
        if let Some(x) = a.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::InvalidProfile(format!(
                "a must be positive, got {x}"
            )));
        }
        if let Some(x) = t.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidProfile(format!(
                "t must be non-negative, got {x}"
            )));
        }
        Ok(Self { a, t })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn d(&self) -> usize {
        self.a.len()
    }

    pub fn is_unshrunk(&self) -> bool {
        self.t.iter().all(|&x| x == 0.0)
    }

    /// Same profile with every exponent multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.a.iter().map(|x| x * c).collect(),
            self.t.iter().map(|x| x * c).collect(),
        )
    }

    /// Same `a` with a different shrink vector.
    pub fn with_t(&self, t: Vec<f64>) -> Result<Self> {
        Self::new(self.a.clone(), t)
    }
}

/// Candidate covering exponents `{aᵢ} ∪ {aᵢ+tᵢ}` and the shrunk subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Alphabet {
    pub entries: Vec<f64>,
    pub hat_entries: Vec<f64>,
}

fn sorted_distinct(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn build_alphabet(profile: &ExponentProfile) -> Alphabet {
    let hat: Vec<f64> = profile
        .a
        .iter()
        .zip(&profile.t)
        .map(|(a, t)| a + t)
        .collect();
    let mut all = profile.a.clone();
    all.extend_from_slice(&hat);
    Alphabet {
        entries: sorted_distinct(all),
        hat_entries: sorted_distinct(hat),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    #[default]
    Default,
    StrictK1,
    MergeEqualIntoK2,
}

/// Split of the directions for one candidate `A` (indices are 0-based).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub candidate: f64,
    pub k1: Vec<usize>,
    pub k2: Vec<usize>,
    pub k3: Vec<usize>,
}

pub fn partition_for(a_cand: f64, profile: &ExponentProfile, tie: TiePolicy) -> Result<Partition> {
    if !(a_cand.is_finite() && a_cand > 0.0) {
        return Err(Error::OutOfRange(format!(
            "candidate must be positive, got {a_cand}"
        )));
    }
    let mut p = Partition {
        candidate: a_cand,
        k1: Vec::new(),
        k2: Vec::new(),
        k3: Vec::new(),
    };
    for (k, (&a, &t)) in profile.a.iter().zip(&profile.t).enumerate() {
        let hat = a + t;
        let in_k1 = match tie {
            TiePolicy::StrictK1 => a > a_cand,
            TiePolicy::Default => a >= a_cand,
            TiePolicy::MergeEqualIntoK2 => a > a_cand || (a == a_cand && hat != a_cand),
        };
        if in_k1 {
            p.k1.push(k);
        } else if hat <= a_cand {
            p.k2.push(k);
        } else {
            p.k3.push(k);
        }
    }
    Ok(p)
}

fn check_dims(space: &ProductSpaceSpec, profile: &ExponentProfile) -> Result<()> {
    if space.d() != profile.d() {
        return Err(Error::InvalidProfile(format!(
            "profile has {} directions but the space has {}",
            profile.d(),
            space.d()
        )));
    }
    Ok(())
}

fn evaluate(p: &Partition, space: &ProductSpaceSpec, profile: &ExponentProfile) -> f64 {
    let delta = space.deltas();
    let kappa = space.kappa();
    let sum = |ks: &[usize], f: &dyn Fn(usize) -> f64| ks.iter().map(|&k| f(k)).sum::<f64>();
    let full =
        sum(&p.k1, &|k| delta[k]) + sum(&p.k2, &|k| delta[k]) + kappa * sum(&p.k3, &|k| delta[k]);
    let gain = sum(&p.k3, &|k| profile.a[k] * delta[k]);
    let loss = sum(&p.k2, &|k| profile.t[k] * delta[k]);
    full + (1.0 - kappa) * (gain - loss) / p.candidate
}

pub fn candidate_dim(
    a_cand: f64,
    space: &ProductSpaceSpec,
    profile: &ExponentProfile,
    tie: TiePolicy,
) -> Result<f64> {
    check_dims(space, profile)?;
    let p = partition_for(a_cand, profile, tie)?;
    Ok(evaluate(&p, space, profile))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateRow {
    pub partition: Partition,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub value: f64,
    pub argmin: f64,
    pub partition: Partition,
    pub table: Vec<CandidateRow>,
    /// Set when the set is of full measure and `value` is the ambient dimension.
    pub full_measure: bool,
}

fn minimize(
    entries: &[f64],
    space: &ProductSpaceSpec,
    profile: &ExponentProfile,
    tie: TiePolicy,
) -> Result<DimensionReport> {
    check_dims(space, profile)?;
    let table = entries
        .iter()
        .map(|&a| {
            let partition = partition_for(a, profile, tie)?;
            let value = evaluate(&partition, space, profile);
            Ok(CandidateRow { partition, value })
        })
        .collect::<Result<Vec<_>>>()?;
    // entries are ascending, so a strict comparison keeps the smallest A on ties
    let best = table
        .iter()
        .reduce(|best, row| if row.value < best.value { row } else { best })
        .ok_or(Error::EmptyCandidates)?;
    Ok(DimensionReport {
        value: best.value,
        argmin: best.partition.candidate,
        partition: best.partition.clone(),
        full_measure: profile.is_unshrunk(),
        table,
    })
}

pub fn compute_s(space: &ProductSpaceSpec, profile: &ExponentProfile) -> Result<DimensionReport> {
    compute_s_with(space, profile, TiePolicy::Default)
}

pub fn compute_s_with(
    space: &ProductSpaceSpec,
    profile: &ExponentProfile,
    tie: TiePolicy,
) -> Result<DimensionReport> {
    minimize(&build_alphabet(profile).entries, space, profile, tie)
}

/// Same minimization restricted to the shrunk exponents `aᵢ+tᵢ`.
pub fn compute_s_hat(
    space: &ProductSpaceSpec,
    profile: &ExponentProfile,
) -> Result<DimensionReport> {
    minimize(
        &build_alphabet(profile).hat_entries,
        space,
        profile,
        TiePolicy::Default,
    )
}

/// Largest `s(t)` over a finite candidate list; ties go to the first index.
pub fn sup_over_candidates(
    space: &ProductSpaceSpec,
    profiles: &[ExponentProfile],
) -> Result<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (i, p) in profiles.iter().enumerate() {
        let v = compute_s(space, p)?.value;
        if best.map_or(true, |(b, _)| v > b) {
            best = Some((v, i));
        }
    }
    best.ok_or(Error::EmptyCandidates)
}
