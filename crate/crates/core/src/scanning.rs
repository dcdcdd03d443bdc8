//! The scanning homotopy: a vertical line sweeps the circle from `(-1, 0)`
//! to `(1, 0)`, carries two vertices where it meets the circle, and erases
//! the unmarked vertices it has passed.
//!
//! The line is parametrized by the turn `w ∈ [0, 1/2]` of its upper
//! intersection point, so its abscissa is `s = cos(2πw)`. A vertex at turn
//! `u` lies strictly right of the line iff `u < w` or `u > 1 - w`, which keeps
//! the whole map exact.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moduli_space::{
    in_neighborhood, sample_neighbor, x_coord, CloseMode, MarkedCycle, ModuliPoint, Status,
};
use crate::rational::{frac, from_f64_with_den, half, Rational};
use crate::seed;

/// Keeps generated scan lines away from the strip boundary.
pub const BOUNDARY_BAND: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScanParameter {
    #[serde(with = "crate::rational")]
    w: Rational,
}

impl ScanParameter {
    pub fn new(w: Rational) -> Result<Self> {
        if w < Rational::zero() || w > half() {
            return Err(Error::Domain(format!("scan turn {w} is outside [0, 1/2]")));
        }
        Ok(Self { w })
    }

    pub fn w(&self) -> &Rational {
        &self.w
    }

    /// Abscissa of the scan line.
    pub fn s(&self) -> f64 {
        x_coord(&self.w)
    }

    /// Scan line nearest to abscissa `s`, on a grid of `1 / den` turns.
    pub fn near_abscissa(s: f64, den: u64) -> Self {
        let w = s.clamp(-1.0, 1.0).acos() / std::f64::consts::TAU;
        let w = from_f64_with_den(w, den);
        let w = if w > half() { half() } else if w < Rational::zero() { Rational::zero() } else { w };
        Self { w }
    }
}

/// Homotopy time: `tau = 0` is the identity end, `tau = 1` lands in the
/// retract subspace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomotopyTime {
    #[serde(with = "crate::rational")]
    tau: Rational,
}

impl HomotopyTime {
    pub fn new(tau: Rational) -> Result<Self> {
        if tau < Rational::zero() || tau > Rational::one() {
            return Err(Error::Domain(format!("homotopy time {tau} is outside [0, 1]")));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> &Rational {
        &self.tau
    }

    pub fn scan_parameter(&self) -> ScanParameter {
        ScanParameter {
            w: (Rational::one() - &self.tau) / Rational::from_integer(2.into()),
        }
    }
}

/// The scanned graph: marked vertices stay, the line's two intersection
/// points become vertices, unmarked vertices left of the line disappear.
pub fn scan(x: &ModuliPoint, param: &ScanParameter) -> ModuliPoint {
    scan_cycle(x.cycle(), param).canonical()
}

/// [`scan`] on a raw representative, without choosing a canonical form.
pub fn scan_cycle(c: &MarkedCycle, param: &ScanParameter) -> MarkedCycle {
    let w = param.w();
    let mirror = Rational::one() - w;
    let kept = c
        .points()
        .iter()
        .filter(|p| p.is_marked() || p.turn <= *w || p.turn >= mirror)
        .map(|p| (p.turn.clone(), p.marks.clone()));
    let line = [(w.clone(), Default::default()), (frac(&mirror), Default::default())];
    MarkedCycle::collect(kept.chain(line))
}

pub fn homotopy_frame(x: &ModuliPoint, time: &HomotopyTime) -> ModuliPoint {
    scan(x, &time.scan_parameter())
}

/// Scans at two nearby lines land in each other's `eps`-neighborhoods.
pub fn lemma_step1_check(x: &ModuliPoint, w0: &ScanParameter, w1: &ScanParameter, eps: f64) -> Result<bool> {
    let gap = (w1.s() - w0.s()).abs();
    if eps.partial_cmp(&gap) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Domain(format!("eps {eps} must exceed the abscissa gap {gap}")));
    }
    let (a, b) = (scan(x, w0), scan(x, w1));
    let mode = CloseMode::Symmetric;
    Ok(in_neighborhood(&a, &b, eps, mode).is_inside() && in_neighborhood(&b, &a, eps, mode).is_inside())
}

/// Scanning two `eps`-close points at the same line keeps them `eps`-close.
pub fn lemma_step2_check(x: &ModuliPoint, y: &ModuliPoint, w: &ScanParameter, eps: f64) -> Result<bool> {
    let mode = CloseMode::Symmetric;
    if !in_neighborhood(x, y, eps, mode).is_inside() {
        return Err(Error::Domain(format!("{y} is not inside N_{eps}({x})")));
    }
    Ok(in_neighborhood(&scan(x, w), &scan(y, w), eps, mode).is_inside())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFailure {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_prime: Option<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub samples: usize,
    pub passed: usize,
    pub failures: Vec<CertificateFailure>,
}

impl CertificateReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.samples
    }
}

const SCAN_DEN: u64 = 1 << 30;
const MAX_ATTEMPTS: usize = 64;

/// Samples `(y, w')` with `y ∈ N_alpha(x)` and `|s' - s| < alpha` and counts
/// how often `scan(y, w') ∈ N_eps(scan(x, w))`. Samples whose verdict falls
/// in the boundary band are redrawn.
pub fn continuity_certificate(
    x: &ModuliPoint,
    w: &ScanParameter,
    alpha: f64,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<CertificateReport> {
    if !(alpha > 0.0 && alpha < eps / 2.0) {
        return Err(Error::Domain(format!("need 0 < alpha < eps/2, got alpha = {alpha}, eps = {eps}")));
    }
    let target = scan(x, w);
    let s = w.s();
    let outcomes: Vec<Option<CertificateFailure>> = (0..samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, 0xCE27, index as u64));
            let mut last = None;
            for _ in 0..MAX_ATTEMPTS {
                let w_prime = if alpha <= 4.0 * BOUNDARY_BAND || rng.random_bool(0.05) {
                    w.clone()
                } else {
                    let cand = ScanParameter::near_abscissa(s + rng.random_range(-1.0..1.0) * alpha, SCAN_DEN);
                    if (cand.s() - s).abs() >= alpha - BOUNDARY_BAND {
                        continue;
                    }
                    cand
                };
                let y = match sample_neighbor(x, alpha, rng.random()) {
                    Ok(y) => y,
                    Err(e) => {
                        return Some(CertificateFailure {
                            index,
                            y: None,
                            w_prime: Some(w_prime.w().to_string()),
                            reason: e.to_string(),
                        })
                    }
                };
                let verdict = in_neighborhood(&target, &scan(&y, &w_prime), eps, CloseMode::Symmetric);
                match verdict.status {
                    Status::Inside => return None,
                    Status::Boundary => last = Some((y, w_prime)),
                    Status::Outside => {
                        return Some(CertificateFailure {
                            index,
                            y: serde_json::to_value(y.cycle()).ok(),
                            w_prime: Some(w_prime.w().to_string()),
                            reason: "scanned neighbor is outside N_eps of the scanned point".into(),
                        })
                    }
                }
            }
            Some(CertificateFailure {
                index,
                y: last.as_ref().and_then(|(y, _)| serde_json::to_value(y.cycle()).ok()),
                w_prime: last.map(|(_, w)| w.w().to_string()),
                reason: "no sample away from the boundary band".into(),
            })
        })
        .collect();
    let failures: Vec<CertificateFailure> = outcomes.into_iter().flatten().collect();
    Ok(CertificateReport {
        samples,
        passed: samples - failures.len(),
        failures,
    })
}

/// A point of the retract subspace that the homotopy moves at an
/// intermediate time.
pub fn non_strongness_witness() -> (ModuliPoint, ScanParameter) {
    let y = MarkedCycle::from_turns(&[("0", &[]), ("1/2", &[1])])
        .expect("valid cycle")
        .canonical();
    let w = ScanParameter::new(Rational::new(1.into(), 4.into())).expect("in range");
    (y, w)
}
