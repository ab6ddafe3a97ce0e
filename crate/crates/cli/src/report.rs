//! JSON-serializable classification report.

use serde::{Deserialize, Serialize};
use sigmak::classifier::{DomainType, EndpointBehavior, SolutionClass, VrLimit, XiTtSign};
use sigmak::first_integral::critical_h_opt;
use sigmak::{ConeClass, MetricParams};

/// Echo of the classified inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportInputs {
    pub n: u32,
    pub k: u32,
    pub sign: i8,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub branch: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub xi_tt_sign: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub xi_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub family: Option<String>,
}

/// One endpoint of the domain with its numeric expansion data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointReport {
    pub position: String,
    pub behavior: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub secondary_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coefficient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub v_r_limit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationReport {
    pub inputs: ReportInputs,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub h_star: Option<f64>,
    pub case_path: String,
    pub domain: String,
    pub endpoints: [EndpointReport; 2],
    pub cone: String,
    pub inversion_applied: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub closed_form: Option<String>,
}

pub fn domain_slug(d: DomainType) -> &'static str {
    match d {
        DomainType::FullSpace => "full-space",
        DomainType::PuncturedSpace => "punctured-space",
        DomainType::Ball => "ball",
        DomainType::PuncturedBall => "punctured-ball",
        DomainType::Annulus => "annulus",
    }
}

pub fn cone_slug(c: ConeClass) -> &'static str {
    match c {
        ConeClass::GammaPlusK => "gamma-plus-k",
        ConeClass::GammaMinusK => "gamma-minus-k",
        ConeClass::Indeterminate => "indeterminate",
    }
}

fn endpoint_report(position: &str, e: &EndpointBehavior) -> EndpointReport {
    let mut r = EndpointReport {
        position: position.into(),
        behavior: String::new(),
        exponent: None,
        secondary_exponent: None,
        coefficient: None,
        v_r_limit: None,
    };
    match *e {
        EndpointBehavior::RoundSphereClosure => r.behavior = "round-sphere-closure".into(),
        EndpointBehavior::SecondDerivBlowup { v_r_limit, rate_exponent } => {
            r.behavior = "second-derivative-blowup".into();
            r.exponent = Some(rate_exponent);
            r.v_r_limit = Some(match v_r_limit {
                VrLimit::Zero => "v_r -> 0".into(),
                VrLimit::SlopeTwo => "r v_r / v -> 2".into(),
            });
        }
        EndpointBehavior::PeriodicComplete => r.behavior = "periodic-complete".into(),
        EndpointBehavior::ConeIncomplete { exponent } => {
            r.behavior = "cone-incomplete".into();
            r.exponent = Some(exponent);
        }
        EndpointBehavior::CkExtension { holder, expansion_coefficient } => {
            r.behavior = "ck-extension".into();
            r.exponent = Some(holder);
            r.coefficient = Some(expansion_coefficient);
        }
        EndpointBehavior::HyperbolicComplete => r.behavior = "hyperbolic-complete".into(),
        EndpointBehavior::LogComplete => {
            r.behavior = "log-complete".into();
            r.exponent = Some(-2.0);
        }
        EndpointBehavior::PowerDegeneracy { exponent } => {
            r.behavior = "power-degeneracy".into();
            r.exponent = Some(exponent);
        }
        EndpointBehavior::ConicalDegeneracy { exponent } => {
            r.behavior = "conical-degeneracy".into();
            r.exponent = Some(exponent);
        }
        EndpointBehavior::CylinderAsymptote => {
            r.behavior = "cylinder-asymptote".into();
            r.exponent = Some(-2.0);
        }
        EndpointBehavior::CylinderExact => {
            r.behavior = "cylinder-exact".into();
            r.exponent = Some(-2.0);
        }
        EndpointBehavior::LogCuspComplete { radial_exponent, log_exponent } => {
            r.behavior = "log-cusp-complete".into();
            r.exponent = Some(radial_exponent);
            r.secondary_exponent = Some(log_exponent);
        }
        EndpointBehavior::FlatAsymptote => r.behavior = "flat-asymptote".into(),
    }
    r
}

pub fn build_report(
    params: &MetricParams,
    inputs: ReportInputs,
    class: &SolutionClass,
    inversion_applied: bool,
) -> ClassificationReport {
    ClassificationReport {
        inputs,
        h_star: critical_h_opt(params),
        case_path: class.case_path.label().to_string(),
        domain: domain_slug(class.domain).to_string(),
        endpoints: [
            endpoint_report("inner", &class.endpoints[0]),
            endpoint_report("outer", &class.endpoints[1]),
        ],
        cone: cone_slug(class.cone).to_string(),
        inversion_applied,
        closed_form: class.closed_form.map(|c| c.name().to_string()),
    }
}

/// Human-readable rendering for `--format text`.
pub fn render_text(r: &ClassificationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("case: {}\n", r.case_path));
    out.push_str(&format!("domain: {}\n", r.domain));
    out.push_str(&format!("cone: {}\n", r.cone));
    if let Some(h) = r.inputs.h {
        out.push_str(&format!("h: {h:.16e}\n"));
    }
    if let Some(hs) = r.h_star {
        out.push_str(&format!("h*: {hs:.16e}\n"));
    }
    for e in &r.endpoints {
        let mut line = format!("{} endpoint: {}", e.position, e.behavior);
        if let Some(x) = e.exponent {
            line.push_str(&format!(", exponent {x:.6}"));
        }
        if let Some(x) = e.secondary_exponent {
            line.push_str(&format!(", log exponent {x:.6}"));
        }
        if let Some(x) = e.coefficient {
            line.push_str(&format!(", coefficient {x:.6}"));
        }
        if let Some(v) = &e.v_r_limit {
            line.push_str(&format!(", {v}"));
        }
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&format!(
        "closed form: {}\n",
        r.closed_form.as_deref().unwrap_or("(none)")
    ));
    out.push_str(&format!("inversion applied: {}\n", r.inversion_applied));
    out
}

/// xi_tt sign helper for serialization.
pub fn xi_tt_sign_i8(s: Option<XiTtSign>) -> Option<i8> {
    s.map(|v| v.as_i8())
}

#[cfg(test)]
mod tests {
    use super::*;
    use sigmak::classifier::classify;
    use sigmak::{Branch, SigmaSign};

    #[test]
    fn report_round_trips_losslessly() {
        let params = MetricParams::new(5, 2, SigmaSign::Positive).unwrap();
        let class = classify(&params, 0.3, Branch::Positive, None).unwrap();
        let inputs = ReportInputs {
            n: 5,
            k: 2,
            sign: 1,
            h: Some(0.3),
            branch: Some(1),
            xi_tt_sign: None,
            xi: None,
            xi_t: None,
            family: None,
        };
        let report = build_report(&params, inputs, &class, false);
        let json = serde_json::to_string_pretty(&report).unwrap();
        let back: ClassificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn unknown_fields_fail_loudly() {
        let params = MetricParams::new(5, 2, SigmaSign::Positive).unwrap();
        let class = classify(&params, 0.0, Branch::Positive, None).unwrap();
        let inputs = ReportInputs {
            n: 5,
            k: 2,
            sign: 1,
            h: Some(0.0),
            branch: Some(1),
            xi_tt_sign: None,
            xi: None,
            xi_t: None,
            family: None,
        };
        let report = build_report(&params, inputs, &class, false);
        let json = serde_json::to_string(&report).unwrap();
        let spiked = json.replacen('{', "{\"surprise_field\":1,", 1);
        assert!(serde_json::from_str::<ClassificationReport>(&spiked).is_err());
    }
}
