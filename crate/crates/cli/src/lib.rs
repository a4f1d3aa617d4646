//! Command implementations behind the `vfunc` binary.
//!
//! Every command returns a serialisable report; `main.rs` only handles
//! argument parsing, printing and exit codes.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use vfunc_core::ramification::{
    filtration_fingerprint, lines, lower_filtration, quotient_compat_check, upper_filtration, Filtration,
};
use vfunc_core::vfunction::{v_formula, v_oracle};
use vfunc_core::{sample, validate_pair, ExtensionPair, FieldParams, FqElem, GaloisField, LaurentPoly, VResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_DISAGREEMENT: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{name}: {message}")]
    Validation { name: String, message: String },
    #[error("formula and oracle disagree: {0}")]
    Disagreement(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Validation { .. } => EXIT_VALIDATION,
            CliError::Disagreement(_) => EXIT_DISAGREEMENT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn validation(name: &str, message: impl ToString) -> Self {
        CliError::Validation { name: name.to_string(), message: message.to_string() }
    }
}

impl From<vfunc_core::Error> for CliError {
    fn from(e: vfunc_core::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

/// Input file for `v` and `filtration`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobSpec {
    pub p: u32,
    pub n: usize,
    /// Monic modulus, lowest coefficient first, e.g. `"1,1,1"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    pub a: String,
    pub g1: Vec<(i64, String)>,
    pub g2: Vec<(i64, String)>,
}

impl JobSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn field(&self) -> Result<GaloisField, CliError> {
        build_field(self.p, self.n, self.modulus.as_deref())
    }

    pub fn to_pair(&self) -> Result<ExtensionPair, CliError> {
        let field = self.field()?;
        let a = field.parse(&self.a).map_err(|e| CliError::Parse(format!("a: {e}")))?;
        let g1 = LaurentPoly::from_encoded(&field, &self.g1).map_err(|e| CliError::Parse(format!("g1: {e}")))?;
        let g2 = LaurentPoly::from_encoded(&field, &self.g2).map_err(|e| CliError::Parse(format!("g2: {e}")))?;
        validate_pair(&field, a, g1, g2).map_err(|e| CliError::validation(e.name(), e))
    }
}

pub fn build_field(p: u32, n: usize, modulus: Option<&str>) -> Result<GaloisField, CliError> {
    let params = match modulus {
        None => FieldParams::default_for(p, n),
        Some(text) => {
            let coeffs = text
                .split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Parse(format!("modulus {text:?}")))?;
            FieldParams::new(p, n, coeffs)
        }
    }
    .map_err(|e| CliError::validation("InvalidField", e))?;
    Ok(GaloisField::new(params))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VReport {
    /// Exact value in decimal-slash notation.
    pub value: String,
    pub s: i64,
    pub route: String,
}

impl From<&VResult> for VReport {
    fn from(r: &VResult) -> Self {
        VReport { value: r.value.to_string(), s: r.s, route: r.route.to_string() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub formula: VReport,
    pub oracle: VReport,
    pub agree: bool,
}

/// Both routes on one pair; `agree` requires equal values and equal `s`.
pub fn evaluate(pair: &ExtensionPair) -> Result<CrossCheck, CliError> {
    let formula = v_formula(pair);
    let oracle = v_oracle(pair).map_err(|e| CliError::Internal(e.to_string()))?;
    let agree = formula.value == oracle.value && formula.s == oracle.s;
    Ok(CrossCheck { formula: (&formula).into(), oracle: (&oracle).into(), agree })
}

pub fn cmd_v(spec: &JobSpec) -> Result<CrossCheck, CliError> {
    evaluate(&spec.to_pair()?)
}

pub fn encode_poly(x: &LaurentPoly) -> String {
    serde_json::to_string(&x.to_encoded()).expect("plain data serialises")
}

/// One-row CSV rendering of a `v` result.
pub fn v_csv(spec: &JobSpec, check: &CrossCheck) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(["a", "g1", "g2", "v_formula", "v_oracle", "agree", "s"]).map_err(err)?;
    w.write_record([
        spec.a.clone(),
        serde_json::to_string(&spec.g1).unwrap(),
        serde_json::to_string(&spec.g2).unwrap(),
        check.formula.value.clone(),
        check.oracle.value.clone(),
        check.agree.to_string(),
        check.formula.s.to_string(),
    ])
    .map_err(err)?;
    String::from_utf8(w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?)
        .map_err(|e| CliError::Internal(e.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct BreakReport {
    #[serde(rename = "break")]
    pub at: String,
    pub order: u64,
    /// Generators `[i, j]` of the subgroup after the break, meaning `σ^i τ^j`.
    pub basis: Vec<[u32; 2]>,
}

fn breaks(filt: &Filtration) -> Vec<BreakReport> {
    filt.breaks
        .iter()
        .map(|(u, h)| BreakReport {
            at: u.to_string(),
            order: h.order(),
            basis: h.basis().iter().map(|g| [g.i, g.j]).collect(),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LineReport {
    pub lambda: u32,
    pub mu: u32,
    pub jump: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiltrationReport {
    pub lines: Vec<LineReport>,
    pub upper: Vec<BreakReport>,
    pub lower: Vec<BreakReport>,
    pub fingerprint: String,
    pub lower_fingerprint: String,
    pub quotient_compat: bool,
}

pub fn filtration_report(pair: &ExtensionPair) -> Result<FiltrationReport, CliError> {
    let wrap = |e: vfunc_core::RamificationError| CliError::from(vfunc_core::Error::from(e));
    let upper = upper_filtration(pair).map_err(wrap)?;
    let lower = lower_filtration(pair).map_err(wrap)?;
    Ok(FiltrationReport {
        lines: lines(pair)
            .map_err(wrap)?
            .into_iter()
            .map(|l| LineReport { lambda: l.lambda, mu: l.mu, jump: l.jump })
            .collect(),
        upper: breaks(&upper),
        lower: breaks(&lower),
        fingerprint: filtration_fingerprint(&upper),
        lower_fingerprint: filtration_fingerprint(&lower),
        quotient_compat: quotient_compat_check(pair).map_err(wrap)?,
    })
}

pub fn cmd_filtration(spec: &JobSpec) -> Result<FiltrationReport, CliError> {
    filtration_report(&spec.to_pair()?)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub c: String,
    pub v_formula: String,
    pub v_oracle: String,
    pub agree: bool,
    pub s: i64,
    pub fingerprint: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub p: u32,
    pub n: usize,
    pub modulus: String,
    pub a: String,
    pub rows: Vec<SweepRow>,
    pub filtration_constant: bool,
    pub v_constant: bool,
    pub all_agree: bool,
    /// Coefficients `c` with `v = 1`.
    pub exceptional: Vec<String>,
    /// Whether every other `c` gives `v = p`.
    pub others_equal_p: bool,
    pub minus_a_p: String,
    pub exceptional_is_minus_a_p: bool,
    /// `-a²`, which agrees with `-a^p` only for `p = 2`.
    pub minus_a_squared: String,
    pub exceptional_is_minus_a_squared: bool,
}

/// Sweep `c` over `F_q ∖ F_p` in the family `g1 = t^{-(p²-1)}`,
/// `g2 = c·t^{-(p²-1)} + t^{-1}` with `a = w`.
pub fn cmd_counterexample(p: u32, n: usize, modulus: Option<&str>) -> Result<SweepReport, CliError> {
    if n < 2 {
        return Err(CliError::validation("AInPrimeField", "need n >= 2 so that a lies outside F_p"));
    }
    let field = build_field(p, n, modulus)?;
    let a = field.generator();
    let cs: Vec<FqElem> = field.elements().filter(|&c| !field.is_in_prime_field(c)).collect();
    let rows = cs
        .par_iter()
        .map(|&c| {
            let pair = sample::counterexample_pair(&field, a, c).map_err(|e| CliError::validation(e.name(), e))?;
            let check = evaluate(&pair)?;
            let fingerprint = filtration_report(&pair)?.fingerprint;
            Ok(SweepRow {
                c: field.format(c),
                v_formula: check.formula.value,
                v_oracle: check.oracle.value,
                agree: check.agree,
                s: check.formula.s,
                fingerprint,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let minus_a_p = field.format(field.neg(field.frobenius(a)));
    let minus_a_squared = field.format(field.neg(field.mul(a, a)));
    let exceptional: Vec<String> = rows.iter().filter(|r| r.v_formula == "1").map(|r| r.c.clone()).collect();
    let p_str = p.to_string();
    Ok(SweepReport {
        p,
        n,
        modulus: field.params().modulus.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
        a: field.format(a),
        filtration_constant: rows.windows(2).all(|w| w[0].fingerprint == w[1].fingerprint),
        v_constant: rows.windows(2).all(|w| w[0].v_formula == w[1].v_formula),
        all_agree: rows.iter().all(|r| r.agree),
        others_equal_p: rows.iter().filter(|r| r.v_formula != "1").all(|r| r.v_formula == p_str),
        exceptional_is_minus_a_p: exceptional == [minus_a_p.clone()],
        exceptional_is_minus_a_squared: exceptional == [minus_a_squared.clone()],
        exceptional,
        minus_a_p,
        minus_a_squared,
        rows,
    })
}

pub const SWEEP_HEADER: [&str; 8] = ["a", "g1", "g2", "v_formula", "v_oracle", "agree", "s", "fingerprint"];

/// Random formula-vs-oracle comparison; returns the CSV text and whether
/// every row agreed. Pairs are drawn sequentially from a seeded ChaCha8
/// stream and evaluated in parallel, rows kept in draw order.
pub fn cmd_sweep(
    p: u32,
    n: usize,
    modulus: Option<&str>,
    max_degree: i64,
    seed: u64,
    count: usize,
) -> Result<(String, bool), CliError> {
    if n < 2 {
        return Err(CliError::validation("AInPrimeField", "need n >= 2 so that a lies outside F_p"));
    }
    if !(2..=256).contains(&max_degree) {
        return Err(CliError::validation("InvalidDegree", "max-degree must lie in 2..=256"));
    }
    let field = build_field(p, n, modulus)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<ExtensionPair> = (0..count).map(|_| sample::random_pair(&field, max_degree, &mut rng)).collect();
    let rows = pairs
        .par_iter()
        .map(|pair| {
            let check = evaluate(pair)?;
            let fingerprint = filtration_report(pair)?.fingerprint;
            Ok([
                field.format(pair.a()),
                encode_poly(pair.g1()),
                encode_poly(pair.g2()),
                check.formula.value,
                check.oracle.value,
                check.agree.to_string(),
                check.formula.s.to_string(),
                fingerprint,
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let all_agree = rows.iter().all(|r| r[5] == "true");
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(SWEEP_HEADER).map_err(err)?;
    for r in &rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    Ok((String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))?, all_agree))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(g1: &str, g2: &str, a: &str) -> JobSpec {
        JobSpec::from_json(&format!(r#"{{"p":2,"n":2,"a":"{a}","g1":{g1},"g2":{g2}}}"#)).unwrap()
    }

    #[test]
    fn v_on_family_instances() {
        let r = cmd_v(&job(r#"[[-3,"1,0"]]"#, r#"[[-3,"0,1"],[-1,"1,0"]]"#, "0,1")).unwrap();
        assert_eq!((r.formula.value.as_str(), r.oracle.value.as_str(), r.agree), ("2", "2", true));
        let r = cmd_v(&job(r#"[[-3,"1,0"]]"#, r#"[[-3,"1,1"],[-1,"1,0"]]"#, "0,1")).unwrap();
        assert_eq!((r.formula.value.as_str(), r.oracle.value.as_str(), r.agree), ("1", "1", true));
    }

    #[test]
    fn validation_errors_are_named() {
        let err = cmd_v(&job("[]", r#"[[-1,"0,1"]]"#, "0,1")).unwrap_err();
        assert!(matches!(&err, CliError::Validation { name, .. } if name == "G1Zero"));
        assert_eq!(err.exit_code(), EXIT_VALIDATION);
        let err = cmd_v(&job(r#"[[-3,"1,0"]]"#, r#"[[-1,"0,1"]]"#, "1,0")).unwrap_err();
        assert!(matches!(&err, CliError::Validation { name, .. } if name == "AInPrimeField"));
        let err = cmd_v(&job(r#"[[-3,"1,0"]]"#, r#"[[-1,"0,7"]]"#, "0,1")).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_PARSE);
    }

    #[test]
    fn filtration_of_mixed_instance() {
        let r = cmd_filtration(&job(r#"[[-1,"1,0"]]"#, r#"[[-3,"0,1"]]"#, "0,1")).unwrap();
        let up: Vec<&str> = r.upper.iter().map(|b| b.at.as_str()).collect();
        let low: Vec<&str> = r.lower.iter().map(|b| b.at.as_str()).collect();
        assert_eq!((up, low), (vec!["1", "3"], vec!["1", "5"]));
        assert!(r.quotient_compat);
    }

    #[test]
    fn counterexample_p2() {
        let r = cmd_counterexample(2, 2, None).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.filtration_constant && !r.v_constant && r.all_agree);
        assert_eq!(r.exceptional, vec!["1,1".to_string()]);
        assert!(r.exceptional_is_minus_a_p && r.exceptional_is_minus_a_squared);
    }

    #[test]
    fn modulus_override() {
        assert!(build_field(3, 2, Some("2,1,1")).is_ok());
        let err = build_field(3, 2, Some("1,1,1")).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_VALIDATION);
        assert_eq!(build_field(3, 2, Some("x")).unwrap_err().exit_code(), EXIT_PARSE);
    }
}
