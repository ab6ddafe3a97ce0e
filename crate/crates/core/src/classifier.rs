//! The exhaustive decision procedure: maps `(n, k, s, branch, h)` — plus the
//! sign of `xi_tt` where a case splits on it — to the case label, the maximal
//! domain of definition, the endpoint behaviors with their exponents, and the
//! cone class.
//!
//! Case labels (`Thm1.*`, `Thm2.*`, `Thm3.*`) follow the standard
//! classification trees for positive, negative and vanishing normalized
//! constant. Endpoints are reported `(inner, outer)` for the representative
//! normalized under the inversion `t -> -t` the way each case is usually
//! stated: blow-up/degenerate end inward and the complete end outward in the
//! `Thm*.II` cases, the null end outward in the `Thm*.III` cases.

use std::cmp::Ordering;

use crate::closed_forms::{self, ClosedForm, FlatFamily};
use crate::error::{Error, Result};
use crate::first_integral::{critical_h, snap, validate_admissible};
use crate::ode::rhs;
use crate::params::{MetricParams, SigmaSign};
use crate::schouten::{cone_class, Branch, ConeClass, LogState};

/// Sign of `xi_tt`, the extra datum distinguishing the `Thm2.I.3` sub-cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiTtSign {
    Negative,
    Zero,
    Positive,
}

impl XiTtSign {
    pub fn as_i8(self) -> i8 {
        match self {
            XiTtSign::Negative => -1,
            XiTtSign::Zero => 0,
            XiTtSign::Positive => 1,
        }
    }

    pub fn from_i8(v: i8) -> Result<Self> {
        match v {
            -1 => Ok(XiTtSign::Negative),
            0 => Ok(XiTtSign::Zero),
            1 => Ok(XiTtSign::Positive),
            _ => Err(Error::InvalidParams(format!("xi_tt sign must be -1, 0 or +1 (got {v})"))),
        }
    }
}

/// Maximal domain of definition of the conformal factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainType {
    /// `0 < |x| < inf`, extending smoothly over 0 and infinity (the sphere).
    FullSpace,
    /// `0 < |x| < inf`.
    PuncturedSpace,
    /// `|x| < r_+`.
    Ball,
    /// `0 < |x| < r_+`.
    PuncturedBall,
    /// `r_- < |x| < r_+`.
    Annulus,
}

impl std::fmt::Display for DomainType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainType::FullSpace => write!(f, "full space"),
            DomainType::PuncturedSpace => write!(f, "punctured space"),
            DomainType::Ball => write!(f, "ball"),
            DomainType::PuncturedBall => write!(f, "punctured ball"),
            DomainType::Annulus => write!(f, "annulus"),
        }
    }
}

/// Limit of the first derivative at a second-derivative blow-up point:
/// `xi_t -> -1` gives `v_r -> 0`; `xi_t -> +1` gives `r v_r / v -> 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VrLimit {
    Zero,
    SlopeTwo,
}

/// Behavior of a solution at one end of its domain. Exponents are the
/// deterministic functions of `(n, k, h)` displayed in the case analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointBehavior {
    /// The metric closes up to the round sphere.
    RoundSphereClosure,
    /// `v, v_r` bounded, `v_rr ~ |r - r*|^{-1 + 1/k}`.
    SecondDerivBlowup { v_r_limit: VrLimit, rate_exponent: f64 },
    /// Interior end of a periodic (complete) orbit on the punctured space.
    PeriodicComplete,
    /// Cone-type incomplete end, `g ~ |x|^{exponent} |dx|^2` with
    /// `exponent = -2 (1 -+ sqrt(1 - h^{1/k}))`.
    ConeIncomplete { exponent: f64 },
    /// `v^{-2} = rho^{-2} (1 + coefficient (|x|/rho)^{holder} + ...)`,
    /// a `C^{2 - n/k}` extension across the end.
    CkExtension { holder: f64, expansion_coefficient: f64 },
    /// Smooth interior closure of the hyperbolic ball metric.
    HyperbolicComplete,
    /// Complete end with `g ~ (ln(r_+/|x|))^{-2} |dx|^2`, i.e.
    /// `v^{-2} ~ (r_+ - r)^{-2}`.
    LogComplete,
    /// `g ~ (r - r_-)^{exponent} |dx|^2` with `exponent = 4k/(n - 2k)`.
    PowerDegeneracy { exponent: f64 },
    /// `g ~ |x|^{exponent} |dx|^2` with
    /// `exponent = 2 (sqrt(1 + |h|^{1/k}) - 1)`.
    ConicalDegeneracy { exponent: f64 },
    /// Asymptotic to the cylinder `|x|^{-2} |dx|^2`.
    CylinderAsymptote,
    /// Exactly the cylinder.
    CylinderExact,
    /// `v^{-2} ~ |x|^{-2} (ln 1/|x|)^{-2/k}`, complete near 0.
    LogCuspComplete { radial_exponent: f64, log_exponent: f64 },
    /// End of a `sigma_k = 0` family, asymptotic to the lines `xi_t = +-1`.
    FlatAsymptote,
}

/// One leaf of the classification trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CasePath {
    Thm1I1,
    Thm1I2,
    Thm1I3a,
    Thm1I3b,
    Thm1I3c,
    Thm1II1,
    Thm1II2,
    Thm1II3a,
    Thm1II3b,
    Thm1II3c,
    Thm1III1,
    Thm1III2,
    Thm1III3,
    Thm2I1,
    Thm2I2a,
    Thm2I2b,
    Thm2I2c,
    Thm2I3a,
    Thm2I3b,
    Thm2I3c,
    Thm2I3d,
    Thm2I3e,
    Thm2I3f,
    Thm2II1,
    Thm2II2,
    Thm2II3a,
    Thm2II3b,
    Thm2II3c,
    Thm2III1,
    Thm2III2,
    Thm2III3,
    Thm3Linear,
    Thm3Sinh,
    Thm3Cosh,
}

impl CasePath {
    pub fn label(&self) -> &'static str {
        use CasePath::*;
        match self {
            Thm1I1 => "Thm1.I.1",
            Thm1I2 => "Thm1.I.2",
            Thm1I3a => "Thm1.I.3a",
            Thm1I3b => "Thm1.I.3b",
            Thm1I3c => "Thm1.I.3c",
            Thm1II1 => "Thm1.II.1",
            Thm1II2 => "Thm1.II.2",
            Thm1II3a => "Thm1.II.3a",
            Thm1II3b => "Thm1.II.3b",
            Thm1II3c => "Thm1.II.3c",
            Thm1III1 => "Thm1.III.1",
            Thm1III2 => "Thm1.III.2",
            Thm1III3 => "Thm1.III.3",
            Thm2I1 => "Thm2.I.1",
            Thm2I2a => "Thm2.I.2a",
            Thm2I2b => "Thm2.I.2b",
            Thm2I2c => "Thm2.I.2c",
            Thm2I3a => "Thm2.I.3a",
            Thm2I3b => "Thm2.I.3b",
            Thm2I3c => "Thm2.I.3c",
            Thm2I3d => "Thm2.I.3d",
            Thm2I3e => "Thm2.I.3e",
            Thm2I3f => "Thm2.I.3f",
            Thm2II1 => "Thm2.II.1",
            Thm2II2 => "Thm2.II.2",
            Thm2II3a => "Thm2.II.3a",
            Thm2II3b => "Thm2.II.3b",
            Thm2II3c => "Thm2.II.3c",
            Thm2III1 => "Thm2.III.1",
            Thm2III2 => "Thm2.III.2",
            Thm2III3 => "Thm2.III.3",
            Thm3Linear => "Thm3.1",
            Thm3Sinh => "Thm3.2",
            Thm3Cosh => "Thm3.3",
        }
    }

    /// All leaves of the two fixed-sign trees (the sweep coverage target).
    pub const FIXED_SIGN_LEAVES: [CasePath; 31] = {
        use CasePath::*;
        [
            Thm1I1, Thm1I2, Thm1I3a, Thm1I3b, Thm1I3c, Thm1II1, Thm1II2, Thm1II3a, Thm1II3b,
            Thm1II3c, Thm1III1, Thm1III2, Thm1III3, Thm2I1, Thm2I2a, Thm2I2b, Thm2I2c, Thm2I3a,
            Thm2I3b, Thm2I3c, Thm2I3d, Thm2I3e, Thm2I3f, Thm2II1, Thm2II2, Thm2II3a, Thm2II3b,
            Thm2II3c, Thm2III1, Thm2III2, Thm2III3,
        ]
    };
}

impl std::fmt::Display for CasePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Closed-form reference attached to the leaves that are exact solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormRef {
    RoundSphere,
    Cylinder,
    Hyperbolic,
    FlatLinear,
    FlatSinh,
    FlatCosh,
}

impl ClosedFormRef {
    pub fn name(&self) -> &'static str {
        match self {
            ClosedFormRef::RoundSphere => "round-sphere",
            ClosedFormRef::Cylinder => "cylinder",
            ClosedFormRef::Hyperbolic => "hyperbolic",
            ClosedFormRef::FlatLinear => "flat-linear",
            ClosedFormRef::FlatSinh => "flat-sinh",
            ClosedFormRef::FlatCosh => "flat-cosh",
        }
    }
}

/// The classification verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionClass {
    pub case_path: CasePath,
    pub domain: DomainType,
    /// Endpoint behaviors ordered (inner, outer).
    pub endpoints: [EndpointBehavior; 2],
    pub cone: ConeClass,
    pub closed_form: Option<ClosedFormRef>,
}

fn kth_root_abs(h: f64, k: f64) -> f64 {
    h.abs().powf(1.0 / k)
}

/// `v_rr ~ |r - r*|^{-1 + 1/k}` blow-up with the given approach side.
fn blowup(params: &MetricParams, v_r_limit: VrLimit) -> EndpointBehavior {
    EndpointBehavior::SecondDerivBlowup { v_r_limit, rate_exponent: -1.0 + 1.0 / params.kf() }
}

fn power_degeneracy(params: &MetricParams) -> EndpointBehavior {
    EndpointBehavior::PowerDegeneracy {
        exponent: 4.0 * params.kf() / (params.nf() - 2.0 * params.kf()),
    }
}

fn conical(params: &MetricParams, h: f64) -> EndpointBehavior {
    EndpointBehavior::ConicalDegeneracy {
        exponent: 2.0 * ((1.0 + kth_root_abs(h, params.kf())).sqrt() - 1.0),
    }
}

/// `C^{2-n/k}` end; the expansion coefficient is `-h^{1/k} k/(2k-n)` on the
/// positive branch and `+|h|^{1/k} k/(2k-n)` on the negative branch.
fn ck_extension(params: &MetricParams, h: f64, branch: Branch) -> EndpointBehavior {
    let k = params.kf();
    let sign = match branch {
        Branch::Positive => -1.0,
        Branch::Negative => 1.0,
    };
    EndpointBehavior::CkExtension {
        holder: 2.0 - params.nf() / k,
        expansion_coefficient: sign * kth_root_abs(h, k) * k / (2.0 * k - params.nf()),
    }
}

/// Classify a fixed-sign solution from `(h, branch)` and, where the case
/// tree needs it (`s = -1`, `2k > n`, branch +1, `h >= h*`), the sign of
/// `xi_tt` along the orbit.
pub fn classify(
    params: &MetricParams,
    h: f64,
    branch: Branch,
    xi_tt_sign: Option<XiTtSign>,
) -> Result<SolutionClass> {
    if params.k < 2 {
        return Err(Error::ConeOrder(params.k));
    }
    if !h.is_finite() {
        return Err(Error::NonFinite("first integral level"));
    }
    validate_admissible(params, h, branch)?;
    let cone = cone_class(branch, params)?;
    let h = snap(h, 0.0);
    let rel = params.two_k_vs_n();
    let k_even = params.k % 2 == 0;

    let (case_path, domain, endpoints, closed_form) = match (params.s, branch) {
        (SigmaSign::Positive, Branch::Positive) => classify_thm1_case_i(params, h, rel)?,
        (SigmaSign::Positive, Branch::Negative) if k_even => classify_complete_outer(
            params,
            h,
            rel,
            Branch::Negative,
            [CasePath::Thm1II1, CasePath::Thm1II2, CasePath::Thm1II3a, CasePath::Thm1II3b, CasePath::Thm1II3c],
        ),
        (SigmaSign::Positive, Branch::Negative) => classify_null_outer(
            params,
            h,
            rel,
            [CasePath::Thm1III1, CasePath::Thm1III2, CasePath::Thm1III3],
        ),
        (SigmaSign::Negative, Branch::Positive) => classify_thm2_case_i(params, h, rel, xi_tt_sign)?,
        (SigmaSign::Negative, Branch::Negative) if !k_even => classify_complete_outer(
            params,
            h,
            rel,
            Branch::Negative,
            [CasePath::Thm2II1, CasePath::Thm2II2, CasePath::Thm2II3a, CasePath::Thm2II3b, CasePath::Thm2II3c],
        ),
        (SigmaSign::Negative, Branch::Negative) => classify_null_outer(
            params,
            h,
            rel,
            [CasePath::Thm2III1, CasePath::Thm2III2, CasePath::Thm2III3],
        ),
        (SigmaSign::Zero, _) => {
            return Err(Error::InvalidParams(
                "sigma_k = 0 solutions are classified by family; use classify_flat".into(),
            ))
        }
    };

    Ok(SolutionClass { case_path, domain, endpoints, cone, closed_form })
}

type Leaf = (CasePath, DomainType, [EndpointBehavior; 2], Option<ClosedFormRef>);

/// `s = +1`, branch +1 (Thm1 Case I).
fn classify_thm1_case_i(params: &MetricParams, h: f64, rel: Ordering) -> Result<Leaf> {
    use EndpointBehavior::*;
    if h == 0.0 {
        return Ok((
            CasePath::Thm1I1,
            DomainType::FullSpace,
            [RoundSphereClosure, RoundSphereClosure],
            Some(ClosedFormRef::RoundSphere),
        ));
    }
    if h < 0.0 {
        // Orbit between the turning point and the null point: an annulus
        // with v_r -> 0 inward and r v_r / v -> 2 outward.
        return Ok((
            CasePath::Thm1I2,
            DomainType::Annulus,
            [blowup(params, VrLimit::Zero), blowup(params, VrLimit::SlopeTwo)],
            None,
        ));
    }
    Ok(match rel {
        Ordering::Less => {
            let hs = critical_h(params)?;
            if snap(h / hs, 1.0) == 1.0 {
                (
                    CasePath::Thm1I3a,
                    DomainType::PuncturedSpace,
                    [CylinderExact, CylinderExact],
                    Some(ClosedFormRef::Cylinder),
                )
            } else {
                (
                    CasePath::Thm1I3a,
                    DomainType::PuncturedSpace,
                    [PeriodicComplete, PeriodicComplete],
                    None,
                )
            }
        }
        Ordering::Equal => {
            let root = (1.0 - h.powf(1.0 / params.kf())).sqrt();
            (
                CasePath::Thm1I3b,
                DomainType::PuncturedSpace,
                [
                    ConeIncomplete { exponent: -2.0 * (1.0 - root) },
                    ConeIncomplete { exponent: -2.0 * (1.0 + root) },
                ],
                None,
            )
        }
        Ordering::Greater => {
            let e = ck_extension(params, h, Branch::Positive);
            (CasePath::Thm1I3c, DomainType::PuncturedSpace, [e, e], None)
        }
    })
}

/// The branch -1 cases that are complete at the outer end
/// (`Thm1.II`: k even with s = +1; `Thm2.II`: k odd with s = -1).
/// `cases = [h=0 leaf, blow-up leaf, 2k<n, 2k=n, 2k>n]`; the sign of `h`
/// selecting the blow-up leaf differs between the trees, but the geometry
/// is shared: the inner end is the null point for one sign of `h`, the
/// hyperbolic ball for `h = 0`, and the degenerate family otherwise.
fn classify_complete_outer(
    params: &MetricParams,
    h: f64,
    rel: Ordering,
    branch: Branch,
    cases: [CasePath; 5],
) -> Leaf {
    use EndpointBehavior::*;
    if h == 0.0 {
        return (
            cases[0],
            DomainType::Ball,
            [HyperbolicComplete, LogComplete],
            Some(ClosedFormRef::Hyperbolic),
        );
    }
    // The null point bounds the branch region when D can vanish: for
    // s = +1 (k even) that needs h < 0, for s = -1 (k odd) h > 0.
    let null_side = match params.s {
        SigmaSign::Positive => h < 0.0,
        _ => h > 0.0,
    };
    if null_side {
        return (cases[1], DomainType::Annulus, [blowup(params, VrLimit::Zero), LogComplete], None);
    }
    match rel {
        Ordering::Less => (cases[2], DomainType::Annulus, [power_degeneracy(params), LogComplete], None),
        Ordering::Equal => (cases[3], DomainType::PuncturedBall, [conical(params, h), LogComplete], None),
        Ordering::Greater => (
            cases[4],
            DomainType::PuncturedBall,
            [ck_extension(params, h, branch), LogComplete],
            None,
        ),
    }
}

/// The branch -1 cases whose outer end is the null point
/// (`Thm1.III`: k odd with s = +1, h < 0; `Thm2.III`: k even with s = -1,
/// h > 0). `cases = [2k<n, 2k=n, 2k>n]`.
fn classify_null_outer(params: &MetricParams, h: f64, rel: Ordering, cases: [CasePath; 3]) -> Leaf {
    let outer = blowup(params, VrLimit::Zero);
    match rel {
        Ordering::Less => (cases[0], DomainType::Annulus, [power_degeneracy(params), outer], None),
        Ordering::Equal => (cases[1], DomainType::PuncturedBall, [conical(params, h), outer], None),
        Ordering::Greater => (
            cases[2],
            DomainType::PuncturedBall,
            [ck_extension(params, h, Branch::Negative), outer],
            None,
        ),
    }
}

/// `s = -1`, branch +1 (Thm2 Case I); h > 0 is already validated.
fn classify_thm2_case_i(
    params: &MetricParams,
    h: f64,
    rel: Ordering,
    xi_tt_sign: Option<XiTtSign>,
) -> Result<Leaf> {
    use EndpointBehavior::*;
    Ok(match rel {
        Ordering::Less => (
            CasePath::Thm2I1,
            DomainType::Annulus,
            [blowup(params, VrLimit::SlopeTwo), blowup(params, VrLimit::Zero)],
            None,
        ),
        Ordering::Equal => {
            let h1 = snap(h, 1.0);
            if h1 == 1.0 {
                (
                    CasePath::Thm2I2b,
                    DomainType::PuncturedBall,
                    [
                        LogCuspComplete { radial_exponent: -2.0, log_exponent: -2.0 / params.kf() },
                        blowup(params, VrLimit::Zero),
                    ],
                    None,
                )
            } else if h1 < 1.0 {
                let root = (1.0 - h.powf(1.0 / params.kf())).sqrt();
                (
                    CasePath::Thm2I2a,
                    DomainType::PuncturedBall,
                    [ConeIncomplete { exponent: -2.0 * (1.0 - root) }, blowup(params, VrLimit::Zero)],
                    None,
                )
            } else {
                (
                    CasePath::Thm2I2c,
                    DomainType::Annulus,
                    [blowup(params, VrLimit::SlopeTwo), blowup(params, VrLimit::Zero)],
                    None,
                )
            }
        }
        Ordering::Greater => {
            let hs = critical_h(params)?;
            let at_star = snap(h / hs, 1.0) == 1.0;
            if at_star {
                let sign = xi_tt_sign.ok_or_else(|| {
                    Error::Inadmissible(
                        "Thm 2 Case I.3 at h = h* splits on the sign of xi_tt; pass it explicitly or supply a state".into(),
                    )
                })?;
                match sign {
                    XiTtSign::Negative => (
                        CasePath::Thm2I3b,
                        DomainType::PuncturedBall,
                        [CylinderAsymptote, blowup(params, VrLimit::Zero)],
                        None,
                    ),
                    XiTtSign::Positive => (
                        CasePath::Thm2I3c,
                        DomainType::PuncturedSpace,
                        [ck_extension(params, h, Branch::Positive), CylinderAsymptote],
                        None,
                    ),
                    XiTtSign::Zero => (
                        CasePath::Thm2I3d,
                        DomainType::PuncturedSpace,
                        [CylinderExact, CylinderExact],
                        Some(ClosedFormRef::Cylinder),
                    ),
                }
            } else if h < hs {
                (
                    CasePath::Thm2I3a,
                    DomainType::PuncturedBall,
                    [ck_extension(params, h, Branch::Positive), blowup(params, VrLimit::Zero)],
                    None,
                )
            } else {
                let sign = xi_tt_sign.ok_or_else(|| {
                    Error::Inadmissible(
                        "Thm 2 Case I.3 with h > h* splits on the sign of xi_tt; pass it explicitly or supply a state".into(),
                    )
                })?;
                match sign {
                    XiTtSign::Negative => (
                        CasePath::Thm2I3e,
                        DomainType::Annulus,
                        [blowup(params, VrLimit::SlopeTwo), blowup(params, VrLimit::Zero)],
                        None,
                    ),
                    XiTtSign::Positive => {
                        let e = ck_extension(params, h, Branch::Positive);
                        (CasePath::Thm2I3f, DomainType::PuncturedSpace, [e, e], None)
                    }
                    XiTtSign::Zero => {
                        return Err(Error::Inadmissible(format!(
                            "xi_tt = 0 occurs only at the equilibrium, which requires h = h* = {hs:.6} (got h = {h})"
                        )))
                    }
                }
            }
        }
    })
}

/// Classify a `sigma_k = 0` solution by family (Thm3). The linear family is
/// implemented as `xi_t = +-1` (constant `xi` does not solve the equation;
/// the flat forms all have `xi_t -> +-1` ends).
pub fn classify_flat(params: &MetricParams, family: FlatFamily) -> Result<SolutionClass> {
    if params.s != SigmaSign::Zero {
        return Err(Error::InvalidParams("classify_flat applies to sigma_k = 0".into()));
    }
    use EndpointBehavior::*;
    let (case_path, domain, endpoints, closed_form) = match family {
        FlatFamily::Linear { positive_slope } => (
            CasePath::Thm3Linear,
            // xi = -t + c is the flat metric on all of R^n; xi = +t + c is
            // its inversion, living on the punctured space.
            if positive_slope { DomainType::PuncturedSpace } else { DomainType::FullSpace },
            [FlatAsymptote, FlatAsymptote],
            Some(ClosedFormRef::FlatLinear),
        ),
        FlatFamily::Sinh => {
            if params.two_k_vs_n() == Ordering::Equal {
                return Err(Error::DegenerateFlatFamily);
            }
            // One flat end and, at the t0 singularity, the same power
            // degeneracy in ln(r/r0) as the fixed-sign degenerate cases.
            (
                CasePath::Thm3Sinh,
                DomainType::PuncturedBall,
                [FlatAsymptote, power_degeneracy(params)],
                Some(ClosedFormRef::FlatSinh),
            )
        }
        FlatFamily::Cosh => {
            if params.two_k_vs_n() == Ordering::Equal {
                return Err(Error::DegenerateFlatFamily);
            }
            (
                CasePath::Thm3Cosh,
                DomainType::PuncturedSpace,
                [FlatAsymptote, FlatAsymptote],
                Some(ClosedFormRef::FlatCosh),
            )
        }
    };
    Ok(SolutionClass { case_path, domain, endpoints, cone: ConeClass::Indeterminate, closed_form })
}

/// Computes the sign of `xi_tt` at a state from the second-order form,
/// the helper the `Thm2.I.3` disambiguation calls for when the caller has a
/// state rather than an explicit sign.
pub fn xi_tt_sign_from_state(state: &LogState, params: &MetricParams) -> Result<XiTtSign> {
    let v = rhs(state, params)?;
    // The equilibrium is the only orbit with xi_tt = 0; everything below
    // the step tolerance counts as it (together with xi_t = 0).
    Ok(if v.abs() < 1e-11 && state.xi_t.abs() < 1e-11 {
        XiTtSign::Zero
    } else if v > 0.0 {
        XiTtSign::Positive
    } else {
        XiTtSign::Negative
    })
}

/// Whether the trajectory through `state`, parametrized forward in `t`,
/// is the inversion (`t -> -t`) of the normalized representative whose
/// endpoints [`classify`] reports. Inversion-symmetric families return
/// `false` for every state.
pub fn orientation_inverted(state: &LogState, class: &SolutionClass) -> bool {
    use CasePath::*;
    let asymmetric = matches!(
        class.case_path,
        Thm1II1 | Thm1II2 | Thm1II3a | Thm1II3b | Thm1II3c
            | Thm1III1 | Thm1III2 | Thm1III3
            | Thm2II1 | Thm2II2 | Thm2II3a | Thm2II3b | Thm2II3c
            | Thm2III1 | Thm2III2 | Thm2III3
            | Thm2I2a | Thm2I2b | Thm2I3a | Thm2I3b | Thm2I3c
    );
    asymmetric && state.xi_t > 0.0
}

/// A concrete fit template for one endpoint, consumable by the verifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoticLaw {
    /// Nothing to fit (interior closure, periodic or exact-cylinder ends).
    None,
    /// `|v_rr| ~ |r - r*|^{exponent}` at a second-derivative blow-up.
    SecondDerivRate { exponent: f64 },
    /// `v^{-2} ~ (r_+ - r)^{exponent}` at a complete boundary end.
    BoundaryPower { exponent: f64 },
    /// `v^{-2} ~ |x|^{exponent}` toward 0 or infinity.
    RadialPower { exponent: f64 },
    /// `v^{-2} ~ (r - r_-)^{exponent}` at a degenerate inner boundary.
    OffsetPower { exponent: f64 },
    /// `v^{-2} = A (1 + coefficient u^{exponent} + ...)`, `u = r/rho`:
    /// the correction exponent is what a fit of `d v^{-2}/d ln r` sees.
    HolderCorrection { exponent: f64, coefficient: f64 },
    /// `v^{-2} ~ |x|^{radial_exponent} (ln 1/|x|)^{log_exponent}`.
    LogCusp { radial_exponent: f64, log_exponent: f64 },
}

/// Fill in the numeric expansion data for both endpoints of a classified
/// solution. Formula evaluation only; admissibility belongs to `classify`.
pub fn endpoint_asymptotics(
    class: &SolutionClass,
    _h: f64,
    _params: &MetricParams,
) -> (AsymptoticLaw, AsymptoticLaw) {
    let law = |e: &EndpointBehavior| match *e {
        EndpointBehavior::SecondDerivBlowup { rate_exponent, .. } => {
            AsymptoticLaw::SecondDerivRate { exponent: rate_exponent }
        }
        EndpointBehavior::ConeIncomplete { exponent } => AsymptoticLaw::RadialPower { exponent },
        EndpointBehavior::CkExtension { holder, expansion_coefficient } => {
            AsymptoticLaw::HolderCorrection { exponent: holder, coefficient: expansion_coefficient }
        }
        EndpointBehavior::LogComplete | EndpointBehavior::HyperbolicComplete => {
            AsymptoticLaw::BoundaryPower { exponent: -2.0 }
        }
        EndpointBehavior::PowerDegeneracy { exponent } => AsymptoticLaw::OffsetPower { exponent },
        EndpointBehavior::ConicalDegeneracy { exponent } => AsymptoticLaw::RadialPower { exponent },
        EndpointBehavior::LogCuspComplete { radial_exponent, log_exponent } => {
            AsymptoticLaw::LogCusp { radial_exponent, log_exponent }
        }
        EndpointBehavior::CylinderAsymptote | EndpointBehavior::CylinderExact => {
            AsymptoticLaw::RadialPower { exponent: -2.0 }
        }
        EndpointBehavior::RoundSphereClosure
        | EndpointBehavior::PeriodicComplete
        | EndpointBehavior::FlatAsymptote => AsymptoticLaw::None,
    };
    (law(&class.endpoints[0]), law(&class.endpoints[1]))
}

/// Construct the matching closed form for leaves that have one.
pub fn closed_form_of(class: &SolutionClass, h: f64, params: &MetricParams) -> Result<Option<ClosedForm>> {
    Ok(match class.closed_form {
        None => None,
        Some(ClosedFormRef::RoundSphere) => Some(closed_forms::round_sphere(1.0)?),
        Some(ClosedFormRef::Cylinder) => Some(closed_forms::cylinder(params, h)?),
        Some(ClosedFormRef::Hyperbolic) => Some(closed_forms::hyperbolic(params)?),
        Some(ClosedFormRef::FlatLinear) => {
            Some(closed_forms::flat_family(FlatFamily::Linear { positive_slope: false }, 0.0, 0.0, params)?)
        }
        Some(ClosedFormRef::FlatSinh) => Some(closed_forms::flat_family(FlatFamily::Sinh, 0.0, 0.0, params)?),
        Some(ClosedFormRef::FlatCosh) => Some(closed_forms::flat_family(FlatFamily::Cosh, 0.0, 0.0, params)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::first_integral::conserved_h;

    fn p(n: u32, k: u32, s: SigmaSign) -> MetricParams {
        MetricParams::new(n, k, s).unwrap()
    }

    #[test]
    fn sphere_leaf() {
        let params = p(5, 2, SigmaSign::Positive);
        let c = classify(&params, 0.0, Branch::Positive, None).unwrap();
        assert_eq!(c.case_path, CasePath::Thm1I1);
        assert_eq!(c.domain, DomainType::FullSpace);
        assert_eq!(c.endpoints[0], EndpointBehavior::RoundSphereClosure);
        assert_eq!(c.cone, ConeClass::GammaPlusK);
        assert_eq!(c.closed_form, Some(ClosedFormRef::RoundSphere));
    }

    #[test]
    fn periodic_leaf() {
        let params = p(5, 2, SigmaSign::Positive);
        let c = classify(&params, 0.3, Branch::Positive, None).unwrap();
        assert_eq!(c.case_path, CasePath::Thm1I3a);
        assert_eq!(c.domain, DomainType::PuncturedSpace);
        assert_eq!(c.endpoints, [EndpointBehavior::PeriodicComplete, EndpointBehavior::PeriodicComplete]);

        // h = h* routes to the cylinder variant of the same leaf.
        let hs = critical_h(&params).unwrap();
        let c = classify(&params, hs, Branch::Positive, None).unwrap();
        assert_eq!(c.case_path, CasePath::Thm1I3a);
        assert_eq!(c.closed_form, Some(ClosedFormRef::Cylinder));
        assert_eq!(c.endpoints[0], EndpointBehavior::CylinderExact);
    }

    #[test]
    fn cone_incomplete_leaf() {
        let params = p(4, 2, SigmaSign::Positive);
        let c = classify(&params, 0.5, Branch::Positive, None).unwrap();
        assert_eq!(c.case_path, CasePath::Thm1I3b);
        assert_eq!(c.domain, DomainType::PuncturedSpace);
        let root = (1.0f64 - 0.5f64.sqrt()).sqrt();
        match (c.endpoints[0], c.endpoints[1]) {
            (EndpointBehavior::ConeIncomplete { exponent: e0 }, EndpointBehavior::ConeIncomplete { exponent: e1 }) => {
                assert!((e0 - (-2.0 * (1.0 - root))).abs() < 1e-14);
                assert!((e1 - (-2.0 * (1.0 + root))).abs() < 1e-14);
            }
            other => panic!("unexpected endpoints {other:?}"),
        }
    }

    #[test]
    fn annulus_and_ck_leaves() {
        // k even with branch -1 belongs to Case II: (3, 2, +1, h = -1) is
        // the annulus with a null point inward and a complete outer end.
        let params = p(3, 2, SigmaSign::Positive);
        let c = classify(&params, -1.0, Branch::Negative, None).unwrap();
        assert_eq!(c.case_path, CasePath::Thm1II2);
        assert_eq!(c.domain, DomainType::Annulus);
        assert!(matches!(
            c.endpoints[0],
            EndpointBehavior::SecondDerivBlowup { v_r_limit: VrLimit::Zero, .. }
        ));
        assert_eq!(c.endpoints[1], EndpointBehavior::LogComplete);

        // Case III needs k odd: (5, 3, +1, branch -1, h = -1) with 2k > n.
        let params = p(5, 3, SigmaSign::Positive);
        let c = classify(&params, -1.0, Branch::Negative, None).unwrap();
        assert_eq!(c.case_path, CasePath::Thm1III3);
        assert_eq!(c.domain, DomainType::PuncturedBall);
        match c.endpoints[0] {
            EndpointBehavior::CkExtension { holder, expansion_coefficient } => {
                assert!((holder - (2.0 - 5.0 / 3.0)).abs() < 1e-14);
                assert!((expansion_coefficient - 3.0).abs() < 1e-14); // +|h|^{1/3} * 3/(6-5)
            }
            other => panic!("unexpected inner endpoint {other:?}"),
        }
        match c.endpoints[1] {
            EndpointBehavior::SecondDerivBlowup { v_r_limit, rate_exponent } => {
                assert_eq!(v_r_limit, VrLimit::Zero);
                assert!((rate_exponent - (-1.0 + 1.0 / 3.0)).abs() < 1e-14);
            }
            other => panic!("unexpected outer endpoint {other:?}"),
        }
    }

    #[test]
    fn cylinder_leaf_thm2() {
        let params = p(3, 2, SigmaSign::Negative);
        let hs = critical_h(&params).unwrap();
        let c = classify(&params, hs, Branch::Positive, Some(XiTtSign::Zero)).unwrap();
        assert_eq!(c.case_path, CasePath::Thm2I3d);
        assert_eq!(c.domain, DomainType::PuncturedSpace);
        assert_eq!(c.endpoints[0], EndpointBehavior::CylinderExact);
        assert_eq!(c.closed_form, Some(ClosedFormRef::Cylinder));

        let b = classify(&params, hs, Branch::Positive, Some(XiTtSign::Negative)).unwrap();
        assert_eq!(b.case_path, CasePath::Thm2I3b);
        let f = classify(&params, 1.5 * hs, Branch::Positive, Some(XiTtSign::Positive)).unwrap();
        assert_eq!(f.case_path, CasePath::Thm2I3f);
        // Missing xi_tt sign where required is a named error.
        let err = classify(&params, hs, Branch::Positive, None).unwrap_err();
        assert!(matches!(err, Error::Inadmissible(ref m) if m.contains("xi_tt")));
        // xi_tt = 0 off the critical level is impossible.
        let err = classify(&params, 1.5 * hs, Branch::Positive, Some(XiTtSign::Zero)).unwrap_err();
        assert!(matches!(err, Error::Inadmissible(_)));
    }

    #[test]
    fn inadmissible_inputs_name_the_constraint() {
        let p52 = p(5, 2, SigmaSign::Positive);
        let err = classify(&p52, 0.6, Branch::Positive, None).unwrap_err();
        assert!(matches!(err, Error::Inadmissible(ref m) if m.contains("h exceeds h*")), "{err}");

        let p53 = p(5, 3, SigmaSign::Positive);
        let err = classify(&p53, 0.5, Branch::Negative, None).unwrap_err();
        assert!(matches!(err, Error::Inadmissible(ref m) if m.contains("Thm 1 Case III")));

        let n32 = p(3, 2, SigmaSign::Negative);
        let err = classify(&n32, -0.5, Branch::Positive, None).unwrap_err();
        assert!(matches!(err, Error::Inadmissible(ref m) if m.contains("Thm 2 Case I")));

        let err = classify(&n32, -0.5, Branch::Negative, None).unwrap_err();
        assert!(matches!(err, Error::Inadmissible(ref m) if m.contains("Thm 2 Case III")));

        assert!(matches!(classify(&p(5, 1, SigmaSign::Positive), 0.0, Branch::Positive, None), Err(Error::ConeOrder(1))));
    }

    #[test]
    fn snapping_routes_to_critical_leaves() {
        let params = p(5, 2, SigmaSign::Positive);
        let hs = critical_h(&params).unwrap();
        let c = classify(&params, hs * (1.0 + 1e-12), Branch::Positive, None).unwrap();
        assert_eq!(c.endpoints[0], EndpointBehavior::CylinderExact);
        let c = classify(&params, 1e-13, Branch::Positive, None).unwrap();
        assert_eq!(c.case_path, CasePath::Thm1I1);
    }

    #[test]
    fn flat_families_classify() {
        let params = p(5, 2, SigmaSign::Zero);
        let lin = classify_flat(&params, FlatFamily::Linear { positive_slope: false }).unwrap();
        assert_eq!(lin.case_path, CasePath::Thm3Linear);
        assert_eq!(lin.domain, DomainType::FullSpace);
        let sinh = classify_flat(&params, FlatFamily::Sinh).unwrap();
        assert_eq!(sinh.case_path, CasePath::Thm3Sinh);
        let cosh = classify_flat(&params, FlatFamily::Cosh).unwrap();
        assert_eq!(cosh.case_path, CasePath::Thm3Cosh);

        let p42 = p(4, 2, SigmaSign::Zero);
        assert_eq!(classify_flat(&p42, FlatFamily::Sinh), Err(Error::DegenerateFlatFamily));
        // Fixed-sign params belong to classify, not classify_flat.
        assert!(classify_flat(&p(5, 2, SigmaSign::Positive), FlatFamily::Cosh).is_err());
    }

    #[test]
    fn asymptotic_templates() {
        // Holder correction for (3,2), h = 1: exponent 1/2, coefficient -2.
        let params = p(3, 2, SigmaSign::Positive);
        let c = classify(&params, 1.0, Branch::Positive, None).unwrap();
        assert_eq!(c.case_path, CasePath::Thm1I3c);
        let (inner, _) = endpoint_asymptotics(&c, 1.0, &params);
        match inner {
            AsymptoticLaw::HolderCorrection { exponent, coefficient } => {
                assert!((exponent - 0.5).abs() < 1e-14);
                assert!((coefficient + 2.0).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }

        // Power degeneracy for (5,2): exponent 8.
        let params = p(5, 2, SigmaSign::Positive);
        let c = classify(&params, 0.5, Branch::Negative, None).unwrap();
        assert_eq!(c.case_path, CasePath::Thm1II3a);
        let (inner, outer) = endpoint_asymptotics(&c, 0.5, &params);
        assert_eq!(inner, AsymptoticLaw::OffsetPower { exponent: 8.0 });
        assert_eq!(outer, AsymptoticLaw::BoundaryPower { exponent: -2.0 });

        // Conical exponent 2(sqrt(2) - 1) at 2k = n with |h| = 1.
        let params = p(4, 2, SigmaSign::Positive);
        let c = classify(&params, 1.0, Branch::Negative, None).unwrap();
        assert_eq!(c.case_path, CasePath::Thm1II3b);
        let (inner, _) = endpoint_asymptotics(&c, 1.0, &params);
        match inner {
            AsymptoticLaw::RadialPower { exponent } => {
                assert!((exponent - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn totality_over_stratified_sweep() {
        // Every admissible cell maps to exactly one leaf; inadmissible cells
        // raise Inadmissible and nothing else.
        let mut classified = 0;
        let mut rejected = 0;
        for n in 3..=8u32 {
            for k in 2..=4u32.min(n) {
                for s in [SigmaSign::Positive, SigmaSign::Negative] {
                    let params = p(n, k, s);
                    let mut hs_list = vec![-2.0, -1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0];
                    if let Ok(hs) = critical_h(&params) {
                        hs_list.extend([0.5 * hs, hs, 1.5 * hs]);
                    }
                    for h in hs_list {
                        for branch in [Branch::Positive, Branch::Negative] {
                            for xi_tt in [None, Some(XiTtSign::Negative), Some(XiTtSign::Zero), Some(XiTtSign::Positive)] {
                                match classify(&params, h, branch, xi_tt) {
                                    Ok(_) => classified += 1,
                                    Err(Error::Inadmissible(_)) => rejected += 1,
                                    Err(e) => panic!("unexpected error for n={n} k={k} s={s} h={h}: {e}"),
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(classified > 500, "classified {classified}");
        assert!(rejected > 100, "rejected {rejected}");
    }

    #[test]
    fn cone_coherence() {
        for n in 3..=8u32 {
            for k in 2..=4u32.min(n) {
                for s in [SigmaSign::Positive, SigmaSign::Negative] {
                    let params = p(n, k, s);
                    for branch in [Branch::Positive, Branch::Negative] {
                        for h in [-1.0, 0.0, 0.3] {
                            if let Ok(c) = classify(&params, h, branch, Some(XiTtSign::Negative)) {
                                assert_eq!(c.cone, cone_class(branch, &params).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn inversion_symmetry_of_states() {
        // Reflecting a state (xi_t -> -xi_t) classifies to the same leaf;
        // the orientation flag flips exactly on the asymmetric families.
        let params = p(3, 2, SigmaSign::Negative);
        let st = LogState::new(0.0, -1.0, -1.7);
        let fi = conserved_h(&st, &params).unwrap();
        let class = classify(&params, fi.h, fi.branch, None).unwrap();
        let reflected = LogState::new(0.0, st.xi, -st.xi_t);
        let fi_r = conserved_h(&reflected, &params).unwrap();
        assert!((fi.h - fi_r.h).abs() < 1e-15);
        let class_r = classify(&params, fi_r.h, fi_r.branch, None).unwrap();
        assert_eq!(class.case_path, class_r.case_path);
        assert_ne!(orientation_inverted(&st, &class), orientation_inverted(&reflected, &class_r));
    }

    #[test]
    fn inversion_symmetry_across_the_sweep() {
        // Same property over every admissible cell of the default grid for
        // which a state can be placed on the level set.
        for cell in crate::verify::default_sweep_cells() {
            let params = p(cell.n, cell.k, cell.s);
            let Ok(class) = classify(&params, cell.h, cell.branch, cell.xi_tt_sign) else {
                continue;
            };
            let mut state = None;
            for xi0 in [-1.5, -0.5, 0.0, 0.5, 1.5, 2.5] {
                if let Ok(st) = crate::verify::state_on_level(&params, cell.h, cell.branch, xi0, 1.0) {
                    if st.xi_t.abs() > 1e-6 {
                        state = Some(st);
                        break;
                    }
                }
            }
            let Some(st) = state else { continue };
            let reflected = LogState::new(-st.t, st.xi, -st.xi_t);
            let fi = conserved_h(&st, &params).unwrap();
            let fi_r = conserved_h(&reflected, &params).unwrap();
            assert!((fi.h - fi_r.h).abs() <= 1e-12 * (1.0 + fi.h.abs()));
            assert_eq!(fi.branch, fi_r.branch);
            // xi_tt is even under the reflection, so the same stratum applies.
            let class_r = classify(&params, fi_r.h, fi_r.branch, cell.xi_tt_sign).unwrap();
            assert_eq!(class.case_path, class_r.case_path, "cell {cell:?}");
            // The two orientations are never both flagged as inverted; the
            // inversion-symmetric families (orbits covering both ends in one
            // sweep) are flagged for neither, the monotone families for
            // exactly one.
            let inv = orientation_inverted(&st, &class);
            let inv_r = orientation_inverted(&reflected, &class_r);
            assert!(!(inv && inv_r), "cell {cell:?}");
            if class.endpoints[0] != class.endpoints[1]
                && matches!(cell.branch, Branch::Negative)
            {
                // Branch -1 trajectories are xi-monotone: the flag flips.
                assert_ne!(inv, inv_r, "cell {cell:?}");
            }
        }
    }

    #[test]
    fn xi_tt_sign_helper() {
        let params = p(3, 2, SigmaSign::Negative);
        let hs = critical_h(&params).unwrap();
        let xi_star = (4.0 / hs).ln() / 3.0;
        let st = LogState::new(0.0, xi_star, 0.0);
        assert_eq!(xi_tt_sign_from_state(&st, &params).unwrap(), XiTtSign::Zero);
        // Below the equilibrium on the h* level: xi_tt < 0 side.
        let d = crate::first_integral::profile_d(xi_star - 0.2, hs, &params);
        let xi_t = -(1.0 - d.powf(0.5)).sqrt();
        let st = LogState::new(0.0, xi_star - 0.2, xi_t);
        assert_eq!(xi_tt_sign_from_state(&st, &params).unwrap(), XiTtSign::Negative);
    }
}
