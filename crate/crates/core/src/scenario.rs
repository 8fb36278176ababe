//! Scenario files.
//!
//! One `key = value` pair per line; `#` starts a comment. Keys:
//!
//! ```text
//! name             free text up to the end of the line
//! variant          standard | duncan_to_harry | alice_to_harry
//! w x y z          probabilities
//! a b c d e f g    Alice's payoffs
//! B C D E F G      Tom's payoffs (B may be -inf)
//! H I              Tom's attempt costs
//! risk_alice       CARA coefficient, default 0
//! risk_tom         CARA coefficient, default 0
//! tie_alice        act | refrain, default refrain
//! tie_tom          act | refrain, default act
//! expected_outcome outcome class slug, e.g. blocked
//! ```
//!
//! Every numeric key is required except those the variant pins (`x`, `y`
//! for `duncan_to_harry`; also `w` and `B` for `alice_to_harry`), which
//! default to the pinned value.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::Setup;
use crate::model::{GameParameters, OutcomeClass, Param, ParamError, Variant};
use crate::payoff::Payoff;
use crate::solver::{RiskProfile, TiePolicy, TieRule};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub name: String,
    pub parameters: GameParameters,
    pub risk: RiskProfile,
    pub ties: TiePolicy,
    /// Outcome class expected to be the most probable in equilibrium.
    pub expected_outcome: Option<OutcomeClass>,
}

impl ScenarioFile {
    pub fn setup(&self) -> Setup {
        Setup { params: self.parameters, risk: self.risk, ties: self.ties }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioErrorKind {
    #[error("expected `key = value`")]
    Syntax,
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("key {0:?} given twice")]
    DuplicateKey(String),
    #[error("missing value for {0:?}")]
    MissingValue(String),
    #[error("missing key {0:?}")]
    MissingKey(String),
    #[error("invalid value for {key}: {message}")]
    Value { key: String, message: String },
    #[error("{0}")]
    Range(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ScenarioError {
    pub line: usize,
    pub column: usize,
    pub kind: ScenarioErrorKind,
}

const TEXT_KEYS: [&str; 7] = ["name", "variant", "risk_alice", "risk_tom", "tie_alice", "tie_tom", "expected_outcome"];

struct Entry<'a> {
    line: usize,
    /// Column of the value (1-based).
    column: usize,
    value: &'a str,
}

fn is_decimal(s: &str) -> bool {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let mut parts = mantissa.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next();
    let digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    let mantissa_ok = digits(int) && frac.is_none_or(digits) && (!int.is_empty() || frac.is_some_and(|f| !f.is_empty()));
    let exponent_ok = exponent.is_none_or(|e| {
        let e = e.strip_prefix(['-', '+']).unwrap_or(e);
        !e.is_empty() && digits(e)
    });
    mantissa_ok && exponent_ok
}

fn number(key: &str, e: &Entry) -> Result<f64, ScenarioError> {
    let err = |message: String| ScenarioError {
        line: e.line,
        column: e.column,
        kind: ScenarioErrorKind::Value { key: key.to_string(), message },
    };
    if e.value == "-inf" {
        return Err(err("-inf is only allowed for B".into()));
    }
    if !is_decimal(e.value) {
        return Err(err(format!("{:?} is not a decimal number", e.value)));
    }
    let v: f64 = e.value.parse().map_err(|_| err(format!("{:?} is not a decimal number", e.value)))?;
    if !v.is_finite() {
        return Err(err(format!("{:?} is out of range", e.value)));
    }
    Ok(v)
}

fn parsed<T: std::str::FromStr<Err = String>>(key: &str, e: &Entry) -> Result<T, ScenarioError> {
    e.value.parse().map_err(|message| ScenarioError {
        line: e.line,
        column: e.column,
        kind: ScenarioErrorKind::Value { key: key.to_string(), message },
    })
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let Some(eq) = content.find('=') else {
            return Err(ScenarioError { line, column: indent + 1, kind: ScenarioErrorKind::Syntax });
        };
        let key = content[..eq].trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ScenarioError { line, column: indent + 1, kind: ScenarioErrorKind::Syntax });
        }
        if !TEXT_KEYS.contains(&key) && key.parse::<Param>().is_err() {
            return Err(ScenarioError { line, column: indent + 1, kind: ScenarioErrorKind::UnknownKey(key.into()) });
        }
        let after = &content[eq + 1..];
        let value = after.trim();
        let column = eq + 2 + (after.len() - after.trim_start().len());
        if value.is_empty() && key != "name" {
            return Err(ScenarioError { line, column, kind: ScenarioErrorKind::MissingValue(key.into()) });
        }
        if entries.contains_key(key) {
            return Err(ScenarioError { line, column: indent + 1, kind: ScenarioErrorKind::DuplicateKey(key.into()) });
        }
        entries.insert(key.to_string(), Entry { line, column, value });
    }

    let mut s = ScenarioFile::default();
    if let Some(e) = entries.get("name") {
        s.name = e.value.to_string();
    }
    if let Some(e) = entries.get("variant") {
        s.parameters.variant = parsed::<Variant>("variant", e)?;
    }
    let pinned = GameParameters::variant_requirements(s.parameters.variant);
    for param in Param::ALL {
        let key = param.name();
        let value = match entries.get(key) {
            Some(e) if param == Param::TomBlocked && e.value == "-inf" => Payoff::NegInf,
            Some(e) => Payoff::Finite(number(key, e)?),
            None => match pinned.iter().find(|(p, _)| *p == param) {
                Some(&(_, v)) => v,
                None => {
                    return Err(ScenarioError {
                        line: last_line + 1,
                        column: 1,
                        kind: ScenarioErrorKind::MissingKey(key.into()),
                    })
                }
            },
        };
        s.parameters.set(param, value);
    }
    if let Some(e) = entries.get("risk_alice") {
        s.risk.alice = number("risk_alice", e)?;
    }
    if let Some(e) = entries.get("risk_tom") {
        s.risk.tom = number("risk_tom", e)?;
    }
    if let Some(e) = entries.get("tie_alice") {
        s.ties.alice = parsed::<TieRule>("tie_alice", e)?;
    }
    if let Some(e) = entries.get("tie_tom") {
        s.ties.tom = parsed::<TieRule>("tie_tom", e)?;
    }
    if let Some(e) = entries.get("expected_outcome") {
        s.expected_outcome = Some(parsed::<OutcomeClass>("expected_outcome", e)?);
    }

    if let Err(err) = s.parameters.validate() {
        let key = match &err {
            ParamError::NotAProbability { param, .. }
            | ParamError::NonFinite { param, .. }
            | ParamError::VariantConflict { param, .. } => param.name(),
            ParamError::NegInfNotAllowed(param) => param.name(),
            ParamError::Simplex { .. } => {
                let line_of = |k: &str| entries.get(k).map_or(0, |e| e.line);
                if line_of("x") > line_of("y") {
                    "x"
                } else {
                    "y"
                }
            }
        };
        let (line, column) = entries.get(key).map_or((last_line + 1, 1), |e| (e.line, e.column));
        return Err(ScenarioError { line, column, kind: ScenarioErrorKind::Range(err.to_string()) });
    }
    Ok(s)
}

/// Canonical text form; `parse_scenario(&render_scenario(s)) == s` for every
/// valid `s` whose name is a single line without `#` or surrounding spaces.
pub fn render_scenario(s: &ScenarioFile) -> String {
    let mut out = String::new();
    if !s.name.is_empty() {
        let _ = writeln!(out, "name = {}", s.name);
    }
    let _ = writeln!(out, "variant = {}", s.parameters.variant);
    for param in Param::ALL {
        let _ = writeln!(out, "{} = {}", param.name(), s.parameters.get(param));
    }
    let _ = writeln!(out, "risk_alice = {}", s.risk.alice);
    let _ = writeln!(out, "risk_tom = {}", s.risk.tom);
    let _ = writeln!(out, "tie_alice = {}", s.ties.alice);
    let _ = writeln!(out, "tie_tom = {}", s.ties.tom);
    if let Some(c) = s.expected_outcome {
        let _ = writeln!(out, "expected_outcome = {c}");
    }
    out
}

impl fmt::Display for ScenarioFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_scenario(self))
    }
}

/// The scenarios shipped with the crate.
pub mod corpus {
    pub const BASELINE: &str = include_str!("../scenarios/baseline.scn");
    pub const BASELINE_NO_LEAK: &str = include_str!("../scenarios/baseline_no_leak.scn");
    pub const SNOWDEN: &str = include_str!("../scenarios/snowden.scn");
    pub const WEINSTEIN_PRE: &str = include_str!("../scenarios/weinstein_pre.scn");
    pub const WEINSTEIN_POST: &str = include_str!("../scenarios/weinstein_post.scn");

    /// `(file name, contents)` pairs.
    pub const ALL: [(&str, &str); 5] = [
        ("baseline.scn", BASELINE),
        ("baseline_no_leak.scn", BASELINE_NO_LEAK),
        ("snowden.scn", SNOWDEN),
        ("weinstein_pre.scn", WEINSTEIN_PRE),
        ("weinstein_post.scn", WEINSTEIN_POST),
    ];
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = "\
w = 0.5
x = 0.2
y = 0.3
z = 0.5
a = -1
b = -2
c = -9
d = 1
e = 5
f = 2
g = -9
B = -4
C = 3
D = 1
E = 0
F = -1
G = 4
H = -1
I = -0.5
";

    #[test]
    fn minimal_file_gets_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.name, "");
        assert_eq!(s.parameters.variant, Variant::Standard);
        assert_eq!(s.risk, RiskProfile::NEUTRAL);
        assert_eq!(s.ties, TiePolicy::default());
        assert_eq!(s.expected_outcome, None);
        assert_eq!(s.parameters.deanon_cost, -0.5);
        assert_eq!(s.parameters.tom.blocked, Payoff::Finite(-4.0));
    }

    #[test]
    fn simplex_violation_reports_sum_and_line() {
        let text = MINIMAL.replace("x = 0.2", "x = 0.5").replace("y = 0.3", "y = 0.6");
        let err = parse_scenario(&text).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.to_string().contains("x + y = 1.1"), "{err}");
        assert!(err.to_string().contains("> 1"));
    }

    #[test]
    fn probability_out_of_range() {
        let err = parse_scenario(&MINIMAL.replace("w = 0.5", "w = 1.5")).unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        assert!(matches!(err.kind, ScenarioErrorKind::Range(_)));
    }

    #[test]
    fn neg_inf_only_for_block_payoff() {
        let ok = parse_scenario(&MINIMAL.replace("B = -4", "B = -inf")).unwrap();
        assert_eq!(ok.parameters.tom.blocked, Payoff::NegInf);
        let err = parse_scenario(&MINIMAL.replace("C = 3", "C = -inf")).unwrap_err();
        assert_eq!(err.line, 13);
        assert!(err.to_string().contains("only allowed for B"));
        assert!(parse_scenario(&MINIMAL.replace("a = -1", "a = inf")).is_err());
        assert!(parse_scenario(&MINIMAL.replace("a = -1", "a = nan")).is_err());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_scenario(&format!("{MINIMAL}  oops\n")).unwrap_err();
        assert_eq!((err.line, err.column, err.kind), (20, 3, ScenarioErrorKind::Syntax));
        let err = parse_scenario(&format!("{MINIMAL}colour = red\n")).unwrap_err();
        assert_eq!(err.kind, ScenarioErrorKind::UnknownKey("colour".into()));
        let err = parse_scenario(&format!("{MINIMAL}w = 0.1\n")).unwrap_err();
        assert_eq!(err.kind, ScenarioErrorKind::DuplicateKey("w".into()));
        let err = parse_scenario(&MINIMAL.replace("e = 5", "e = five")).unwrap_err();
        assert_eq!((err.line, err.column), (9, 5));
        let err = parse_scenario(&MINIMAL.replace("I = -0.5\n", "")).unwrap_err();
        assert_eq!(err.kind, ScenarioErrorKind::MissingKey("I".into()));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("# header\n\n{}", MINIMAL.replace("a = -1", "a = -1   # no trust"));
        assert_eq!(parse_scenario(&text).unwrap().parameters.alice.no_trust, -1.0);
    }

    #[test]
    fn variant_pins_may_be_omitted_but_not_contradicted() {
        let text = MINIMAL.replace("x = 0.2\n", "").replace("y = 0.3\n", "") + "variant = duncan_to_harry\n";
        let s = parse_scenario(&text).unwrap();
        assert_eq!((s.parameters.world_tom, s.parameters.world_duncan), (0.0, 1.0));
        let err = parse_scenario(&(MINIMAL.to_string() + "variant = duncan_to_harry\n")).unwrap_err();
        assert!(err.to_string().contains("requires"), "{err}");
    }

    #[test]
    fn options_parse() {
        let text = MINIMAL.to_string()
            + "name = test case\nrisk_alice = 0.5\nrisk_tom = -0.25\ntie_alice = act\ntie_tom = refrain\nexpected_outcome = censored-jailed\n";
        let s = parse_scenario(&text).unwrap();
        assert_eq!(s.name, "test case");
        assert_eq!(s.risk, RiskProfile { alice: 0.5, tom: -0.25 });
        assert_eq!(s.ties, TiePolicy { alice: TieRule::ActOnTie, tom: TieRule::RefrainOnTie });
        assert_eq!(s.expected_outcome, Some(OutcomeClass::CensoredJailed));
        assert!(parse_scenario(&(MINIMAL.to_string() + "tie_tom = maybe\n")).is_err());
    }

    #[test]
    fn shipped_corpus_parses() {
        for (file, text) in corpus::ALL {
            parse_scenario(text).unwrap_or_else(|e| panic!("{file}: {e}"));
        }
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6..1e6f64, (-100i32..100).prop_map(f64::from), Just(-0.0), Just(1e-300)]
    }

    fn scenario() -> impl Strategy<Value = ScenarioFile> {
        let probs = (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64);
        let payoffs = proptest::collection::vec(finite(), 15);
        let extras = (
            prop::option::of(finite()),
            "[a-zA-Z0-9_.-]([a-zA-Z0-9 _.-]{0,20}[a-zA-Z0-9_.-])?",
            (any::<bool>(), any::<bool>()),
            prop::option::of(prop::sample::select(OutcomeClass::ALL.to_vec())),
            (-2.0..2.0f64, -2.0..2.0f64),
            0..3u8,
        );
        (probs, payoffs, extras).prop_map(|((w, x, y, z), v, (blocked, name, (ta, tt), expected, (ra, rt), variant))| {
            let mut p = GameParameters { trust: w, world_tom: x * (1.0 - y), world_duncan: y, harry_strong: z, ..Default::default() };
            for (param, value) in Param::ALL[4..].iter().zip(v) {
                p.set(*param, Payoff::Finite(value));
            }
            p.tom.blocked = blocked.map_or(Payoff::NegInf, Payoff::Finite);
            let variant = [Variant::Standard, Variant::DuncanToHarry, Variant::AliceToHarry][variant as usize];
            let rule = |act: bool| if act { TieRule::ActOnTie } else { TieRule::RefrainOnTie };
            ScenarioFile {
                name,
                parameters: p.apply_variant(variant),
                risk: RiskProfile { alice: ra, tom: rt },
                ties: TiePolicy { alice: rule(ta), tom: rule(tt) },
                expected_outcome: expected,
            }
        })
    }

    proptest! {
        #[test]
        fn render_then_parse_round_trips(s in scenario()) {
            prop_assume!(s.parameters.validate().is_ok());
            let text = render_scenario(&s);
            let back = parse_scenario(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(back, s);
        }
    }
}
