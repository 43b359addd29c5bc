//! Scenario files, the built-in catalog and report assembly.
//!
//! Scenarios and reports are JSON. Series coefficients are written as decimal
//! strings so no precision is lost; everything else is small integers.

use rayon::ThreadPoolBuilder;
use serde::{Deserialize, Serialize};

use crate::cone::make_cone;
use crate::duality::{
    assemble_pair, validate_pair, GradedDualPair, GradedToricDatum, ValidationReport,
};
use crate::field::{CharacterSpec, Curve, MonomialValue, SpinEntry};
use crate::height::{
    height_fourier_global, verify_height_bridge, HeightBridgeReport, PiecewiseLinearHeight,
};
use crate::lattice::LatticeMap;
use crate::periods::{verify_weak_duality, PeriodReport};
use crate::regularization::{verify_langlands_dual_periods, OrbitDualityReport};
use crate::stacks::{
    induced_pair, verify_stack_duality, IsogenyDatum, StackCharacters, StackReport,
};

pub const ENGINE: &str = concat!("toric-periods ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    WeakDuality,
    OrbitDuality,
    StackDuality,
    HeightBridge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CharacterInput {
    /// `z_i` independent formal variables.
    Formal {
        #[serde(default = "one")]
        order: u32,
    },
    /// `z_i = ζ_N^{k_i} u^{c_i}`, given as `[k_i, c_i]`.
    Specialized { order: u32, values: Vec<(i64, i64)> },
    Mixed {
        order: u32,
        variables: usize,
        values: Vec<MonomialValue>,
    },
}

fn one() -> u32 {
    1
}

impl CharacterInput {
    pub fn order(&self) -> &u32 {
        match self {
            CharacterInput::Formal { order }
            | CharacterInput::Specialized { order, .. }
            | CharacterInput::Mixed { order, .. } => order,
        }
    }

    pub fn to_spec(&self, rank: usize) -> std::result::Result<CharacterSpec, String> {
        if *self.order() == 0 {
            return Err("cyclotomic order must be positive".into());
        }
        let spec = match self {
            CharacterInput::Formal { order } => CharacterSpec::formal(rank)
                .with_order(*order)
                .map_err(|e| e.to_string())?,
            CharacterInput::Specialized { order, values } => {
                CharacterSpec::specialized(*order, values)
            }
            CharacterInput::Mixed {
                order,
                variables,
                values,
            } => {
                if values.iter().any(|v| v.z.len() != *variables) {
                    return Err(format!("z exponents must have length {variables}"));
                }
                CharacterSpec::new(*order, *variables, values.clone())
            }
        };
        if spec.rank() != rank {
            return Err(format!(
                "character has {} values, expected {rank}",
                spec.rank()
            ));
        }
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCharacter {
    pub name: String,
    #[serde(flatten)]
    pub character: CharacterInput,
    /// Checks this character takes part in; all character checks when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<CheckKind>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveInput {
    pub q: u64,
    #[serde(default)]
    pub genus: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<Vec<SpinEntry>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsogenyInput {
    /// Rows of the matrix of `X_*(T) → X_*(T')`; the pair data describe `T'`.
    pub inclusion: Vec<Vec<i64>>,
    /// Character of `[T']` extending the tested character of `[T]`.
    pub base_lift: CharacterInput,
    /// Character of `[Ť]` for the stack automorphic period.
    pub chi_check: CharacterInput,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeightInput {
    /// Rays of each maximal cone.
    pub fan: Vec<Vec<Vec<i64>>>,
    pub slopes: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub rho: Vec<i64>,
    pub eta: Vec<i64>,
    pub curve: CurveInput,
    pub order: i64,
    pub characters: Vec<NamedCharacter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isogeny: Option<IsogenyInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<HeightInput>,
    pub checks: Vec<CheckKind>,
}

/// A scenario that cannot be turned into data; exit status 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchemaError {
    pub field: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

fn schema(field: &str, message: impl ToString) -> SchemaError {
    SchemaError {
        field: field.to_string(),
        message: message.to_string(),
        line: None,
        column: None,
    }
}

pub fn parse_scenario(text: &str) -> std::result::Result<Scenario, SchemaError> {
    serde_json::from_str(text).map_err(|e| SchemaError {
        field: String::new(),
        message: e.to_string(),
        line: Some(e.line()),
        column: Some(e.column()),
    })
}

pub struct BuiltScenario {
    pub datum: GradedToricDatum,
    pub pair: GradedDualPair,
    pub curve: Curve,
    pub characters: Vec<(String, CharacterSpec, Vec<CheckKind>)>,
    pub stack: Option<(crate::stacks::InducedGradedPair, StackCharacters)>,
    pub height: Option<PiecewiseLinearHeight>,
}

fn check_len(field: &str, v: &[i64], rank: usize) -> std::result::Result<(), SchemaError> {
    if v.len() != rank {
        return Err(schema(
            field,
            format!("expected length {rank}, got {}", v.len()),
        ));
    }
    Ok(())
}

pub fn build(s: &Scenario) -> std::result::Result<BuiltScenario, SchemaError> {
    let r = s.rank;
    if r == 0 {
        return Err(schema("rank", "rank must be positive"));
    }
    for (i, ray) in s.rays.iter().enumerate() {
        check_len(&format!("rays[{i}]"), ray, r)?;
    }
    check_len("rho", &s.rho, r)?;
    check_len("eta", &s.eta, r)?;
    if s.order < 0 {
        return Err(schema("order", "truncation order must be nonnegative"));
    }
    let sigma = make_cone(r, &s.rays).map_err(|e| schema("rays", e))?;
    let datum = GradedToricDatum::new(sigma, s.rho.clone(), s.eta.clone())
        .map_err(|e| schema("rays", e))?;
    let pair = assemble_pair(&datum).map_err(|e| schema("rho", e))?;
    let curve = match &s.curve.spin {
        None if s.curve.genus == 0 => Curve::projective_line(s.curve.q),
        spin => Curve::new(
            s.curve.q,
            s.curve.genus,
            spin.clone().unwrap_or_default(),
            None,
        ),
    }
    .map_err(|e| schema("curve", e))?;
    let all: Vec<CheckKind> = vec![
        CheckKind::WeakDuality,
        CheckKind::OrbitDuality,
        CheckKind::HeightBridge,
    ];
    let characters = s
        .characters
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let spec = c
                .character
                .to_spec(r)
                .map_err(|e| schema(&format!("characters[{i}]"), e))?;
            Ok((
                c.name.clone(),
                spec,
                c.checks.clone().unwrap_or_else(|| all.clone()),
            ))
        })
        .collect::<std::result::Result<Vec<_>, SchemaError>>()?;
    let stack = match &s.isogeny {
        None => None,
        Some(iso) => {
            if iso.inclusion.len() != r || iso.inclusion.iter().any(|row| row.len() != r) {
                return Err(schema(
                    "isogeny.inclusion",
                    format!("expected a {r}x{r} matrix"),
                ));
            }
            let datum = IsogenyDatum::new(LatticeMap::new(r, r, iso.inclusion.clone()))
                .map_err(|e| schema("isogeny.inclusion", e))?;
            let induced = induced_pair(pair.clone(), datum).map_err(|e| schema("isogeny", e))?;
            let chars = StackCharacters {
                chi_check: iso
                    .chi_check
                    .to_spec(r)
                    .map_err(|e| schema("isogeny.chi_check", e))?,
                base_lift: iso
                    .base_lift
                    .to_spec(r)
                    .map_err(|e| schema("isogeny.base_lift", e))?,
            };
            Some((induced, chars))
        }
    };
    let height = match &s.height {
        None => None,
        Some(h) => {
            let fan = h
                .fan
                .iter()
                .map(|rays| {
                    if rays.is_empty() {
                        Ok(crate::cone::Cone::zero(r))
                    } else {
                        make_cone(r, rays)
                    }
                })
                .collect::<crate::Result<Vec<_>>>()
                .map_err(|e| schema("height.fan", e))?;
            Some(
                PiecewiseLinearHeight::new(r, fan, h.slopes.clone())
                    .map_err(|e| schema("height", e))?,
            )
        }
    };
    for c in &s.checks {
        match c {
            CheckKind::StackDuality if stack.is_none() => {
                return Err(schema("checks", "stack_duality needs an isogeny block"))
            }
            CheckKind::HeightBridge if s.eta.iter().any(|x| x % 2 != 0) => {
                return Err(schema("checks", "height_bridge needs an even eigenform"))
            }
            _ => {}
        }
    }
    Ok(BuiltScenario {
        datum,
        pair,
        curve,
        characters,
        stack,
        height,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum CheckDetail {
    WeakDuality(Box<PeriodReport>),
    OrbitDuality(Box<OrbitDualityReport>),
    StackDuality(Box<StackReport>),
    HeightBridge(Box<HeightBridgeReport>),
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub check: CheckKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub character: Option<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<CheckDetail>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub engine: String,
    /// Nothing in the engines is random; recorded so reports are self-describing.
    pub seed: u64,
    pub scenario: Scenario,
    pub validation: ValidationReport,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height_transform: Option<crate::field::TruncatedSeries>,
    pub passed: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check, for terminal output.
    pub fn summary(&self) -> String {
        let mut out = format!("{} ({})\n", self.scenario.name, self.engine);
        let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
        out.push_str(&format!("  {} validation\n", mark(self.validation.passed)));
        for c in &self
            .validation
            .checks
            .iter()
            .filter(|c| !c.passed)
            .collect::<Vec<_>>()
        {
            out.push_str(&format!(
                "       {} {:?}: witness {:?} pairing {:?}\n",
                c.side, c.condition, c.witness, c.pairing
            ));
        }
        for c in &self.checks {
            let name = serde_json::to_value(c.check).unwrap();
            let who = c
                .character
                .as_deref()
                .map(|s| format!(" [{s}]"))
                .unwrap_or_default();
            out.push_str(&format!(
                "  {} {}{}",
                mark(c.passed),
                name.as_str().unwrap(),
                who
            ));
            if let Some(e) = &c.error {
                out.push_str(&format!(": {e}"));
            }
            if let Some(m) = first_mismatch(c) {
                out.push_str(&format!(": {m}"));
            }
            out.push('\n');
        }
        out
    }
}

fn first_mismatch(c: &CheckOutcome) -> Option<String> {
    use crate::periods::Verdict;
    let show = |v: &Verdict| match v {
        Verdict::Mismatch { exponent, .. } => Some(format!("first mismatch at u^{exponent}")),
        Verdict::Equal { .. } => None,
    };
    match c.detail.as_ref()? {
        CheckDetail::WeakDuality(r) => r.directions.iter().find_map(|d| show(&d.verdict)),
        CheckDetail::StackDuality(r) => {
            show(&r.stack_automorphic.verdict).or_else(|| show(&r.unramified.verdict))
        }
        CheckDetail::HeightBridge(r) => show(&r.global),
        CheckDetail::OrbitDuality(r) => r
            .directions
            .iter()
            .flat_map(|d| &d.pairs)
            .find(|p| !p.verdict.passed())
            .map(|p| {
                format!(
                    "orbit pair {:?} / {:?}",
                    p.automorphic.face, p.spectral.face
                )
            }),
    }
}

fn outcome<T>(
    check: CheckKind,
    character: Option<&str>,
    r: crate::Result<T>,
    wrap: impl Fn(T) -> (bool, CheckDetail),
) -> CheckOutcome {
    let character = character.map(str::to_string);
    match r {
        Ok(x) => {
            let (passed, detail) = wrap(x);
            CheckOutcome {
                check,
                character,
                passed,
                error: None,
                detail: Some(detail),
            }
        }
        Err(e) => CheckOutcome {
            check,
            character,
            passed: false,
            error: Some(e.to_string()),
            detail: None,
        },
    }
}

fn run_checks(s: &Scenario, b: &BuiltScenario) -> Report {
    let validation = validate_pair(&b.pair);
    let mut checks = Vec::new();
    let mut kinds = s.checks.clone();
    kinds.sort();
    kinds.dedup();
    if validation.passed {
        for kind in &kinds {
            match kind {
                CheckKind::WeakDuality => {
                    for (name, chi, _) in b.characters.iter().filter(|c| c.2.contains(kind)) {
                        let r = verify_weak_duality(&b.pair, &b.curve, chi, s.order);
                        checks.push(outcome(*kind, Some(name), r, |x| {
                            (x.passed, CheckDetail::WeakDuality(Box::new(x)))
                        }));
                    }
                }
                CheckKind::OrbitDuality => {
                    for (name, chi, _) in b.characters.iter().filter(|c| c.2.contains(kind)) {
                        let r = verify_langlands_dual_periods(&b.pair, &b.curve, chi, s.order);
                        checks.push(outcome(*kind, Some(name), r, |x| {
                            (x.passed, CheckDetail::OrbitDuality(Box::new(x)))
                        }));
                    }
                }
                CheckKind::HeightBridge => {
                    for (name, chi, _) in b.characters.iter().filter(|c| c.2.contains(kind)) {
                        let r = verify_height_bridge(&b.datum, &b.curve, chi, s.order);
                        checks.push(outcome(*kind, Some(name), r, |x| {
                            (x.passed, CheckDetail::HeightBridge(Box::new(x)))
                        }));
                    }
                }
                CheckKind::StackDuality => {
                    let (pair, chars) = b.stack.as_ref().expect("checked in build");
                    let r = verify_stack_duality(pair, &b.curve, chars, s.order);
                    checks.push(outcome(*kind, None, r, |x| {
                        (x.passed, CheckDetail::StackDuality(Box::new(x)))
                    }));
                }
            }
        }
    }
    let height_transform = b.height.as_ref().and_then(|h| {
        let chi = b
            .characters
            .first()
            .map(|c| c.1.clone())
            .unwrap_or_else(|| CharacterSpec::formal(s.rank));
        height_fourier_global(h, &b.curve, &chi, s.order).ok()
    });
    let passed = validation.passed && checks.iter().all(|c| c.passed);
    Report {
        engine: ENGINE.to_string(),
        seed: 0,
        scenario: s.clone(),
        validation,
        checks,
        height_transform,
        passed,
    }
}

/// Runs every requested check with `jobs` worker threads. Report content does
/// not depend on `jobs`.
pub fn run_scenario(s: &Scenario, jobs: usize) -> std::result::Result<Report, SchemaError> {
    let built = build(s)?;
    let pool = ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    Ok(pool.install(|| run_checks(s, &built)))
}

pub const CATALOG: &[&str] = &[
    "tate",
    "orthant_a2",
    "quadric_cone",
    "quadric_cone_eta21",
    "square_cone_3d",
    "weight_2_stack",
    "weight_3_stack",
    "height_p1",
];

fn formal(name: &str, checks: Option<Vec<CheckKind>>) -> NamedCharacter {
    NamedCharacter {
        name: name.into(),
        character: CharacterInput::Formal { order: 1 },
        checks,
    }
}

fn base(
    name: &str,
    rank: usize,
    rays: Vec<Vec<i64>>,
    rho: Vec<i64>,
    eta: Vec<i64>,
    q: u64,
    order: i64,
) -> Scenario {
    Scenario {
        name: name.into(),
        rank,
        rays,
        rho,
        eta,
        curve: CurveInput {
            q,
            genus: 0,
            spin: None,
        },
        order,
        characters: vec![formal("formal", None)],
        isogeny: None,
        height: None,
        checks: vec![CheckKind::WeakDuality, CheckKind::OrbitDuality],
    }
}

/// `z_1 = u^{-1}` with the other coordinates formal.
fn degenerate_first(rank: usize) -> NamedCharacter {
    let mut values = vec![MonomialValue {
        zeta: 0,
        u: -1,
        z: vec![0; rank - 1],
    }];
    for i in 0..rank - 1 {
        values.push(MonomialValue {
            zeta: 0,
            u: 0,
            z: (0..rank - 1).map(|j| (i == j) as i64).collect(),
        });
    }
    NamedCharacter {
        name: "z1_equals_u_inverse".into(),
        character: CharacterInput::Mixed {
            order: 1,
            variables: rank - 1,
            values,
        },
        checks: Some(vec![CheckKind::OrbitDuality]),
    }
}

fn weight_n_stack(n: i64, q: Option<u64>) -> Scenario {
    let q = q.unwrap_or_else(|| {
        (2..)
            .find(|&q| crate::field::curve::is_prime_power(q) && (q - 1) % n as u64 == 0)
            .unwrap()
    });
    let mut s = base(
        &format!("weight_{n}_stack"),
        1,
        vec![vec![1]],
        vec![1],
        vec![1],
        q,
        10,
    );
    s.isogeny = Some(IsogenyInput {
        inclusion: vec![vec![n]],
        base_lift: CharacterInput::Formal { order: n as u32 },
        chi_check: CharacterInput::Formal { order: 1 },
    });
    s.checks = vec![CheckKind::WeakDuality, CheckKind::StackDuality];
    s
}

/// A catalog scenario. `n` selects the weight for `weight_n_stack`.
pub fn catalog_entry(
    name: &str,
    q: Option<u64>,
    order: Option<i64>,
    n: Option<i64>,
) -> std::result::Result<Scenario, String> {
    let mut s = match name {
        "tate" => {
            let mut s = base("tate", 1, vec![vec![1]], vec![1], vec![1], 2, 16);
            s.characters.push(NamedCharacter {
                name: "cube_root_of_unity".into(),
                character: CharacterInput::Specialized {
                    order: 3,
                    values: vec![(1, 0)],
                },
                checks: None,
            });
            s
        }
        "orthant_a2" => {
            let mut s = base(
                "orthant_a2",
                2,
                vec![vec![1, 0], vec![0, 1]],
                vec![1, 1],
                vec![1, 1],
                2,
                10,
            );
            s.characters.push(degenerate_first(2));
            s
        }
        "quadric_cone" => {
            let mut s = base(
                "quadric_cone",
                2,
                vec![vec![1, 0], vec![1, 2]],
                vec![1, 1],
                vec![1, 1],
                2,
                10,
            );
            s.characters.push(degenerate_first(2));
            s
        }
        "quadric_cone_eta21" => base(
            "quadric_cone_eta21",
            2,
            vec![vec![1, 0], vec![1, 2]],
            vec![1, 1],
            vec![2, 1],
            2,
            10,
        ),
        "square_cone_3d" => base(
            "square_cone_3d",
            3,
            vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 1]],
            vec![1, 1, 3],
            vec![0, 0, 1],
            2,
            10,
        ),
        "weight_n_stack" => match n {
            Some(n) if n >= 1 => weight_n_stack(n, q),
            _ => return Err("weight_n_stack needs --n with n ≥ 1".into()),
        },
        "weight_2_stack" => weight_n_stack(2, q),
        "weight_3_stack" => weight_n_stack(3, q),
        "height_p1" => {
            let mut s = base("height_p1", 1, vec![vec![1]], vec![1], vec![2], 2, 8);
            s.height = Some(HeightInput {
                fan: vec![vec![vec![1]], vec![vec![-1]]],
                slopes: vec![vec![1], vec![-1]],
            });
            s.checks = vec![CheckKind::WeakDuality, CheckKind::HeightBridge];
            s
        }
        other => return Err(format!("unknown catalog entry '{other}'")),
    };
    if let Some(q) = q {
        s.curve.q = q;
    }
    if let Some(u) = order {
        s.order = u;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shapes() {
        assert!(CATALOG.len() >= 6);
        let s = catalog_entry("weight_n_stack", None, None, Some(2)).unwrap();
        assert_eq!(
            (s.curve.q, s.isogeny.as_ref().unwrap().inclusion.clone()),
            (3, vec![vec![2]])
        );
        let s = catalog_entry("quadric_cone", None, None, None).unwrap();
        assert_eq!(
            (s.rays.clone(), s.rho.clone(), s.eta.clone()),
            (vec![vec![1, 0], vec![1, 2]], vec![1, 1], vec![1, 1])
        );
        assert!(catalog_entry("nope", None, None, None).is_err());
    }

    #[test]
    fn schema_errors() {
        let mut s = catalog_entry("orthant_a2", None, None, None).unwrap();
        s.rays = vec![vec![1, 0], vec![-1, 0]];
        let e = run_scenario(&s, 1).err().unwrap();
        assert!(e.message.contains("strongly convex"), "{e}");
        let e = parse_scenario("{\"name\": 3}").err().unwrap();
        assert_eq!(e.line, Some(1));
    }

    #[test]
    fn tate_runs() {
        let s = catalog_entry("tate", None, Some(6), None).unwrap();
        let r = run_scenario(&s, 2).unwrap();
        assert!(r.passed, "{}", r.summary());
        let text = r.to_json();
        let back = parse_scenario(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert_eq!(run_scenario(&s, 1).unwrap().to_json(), text);
    }

    #[test]
    fn wrong_eta_fails_validation() {
        let mut s = catalog_entry("quadric_cone", None, Some(4), None).unwrap();
        s.eta = vec![0, 1];
        let r = run_scenario(&s, 1).unwrap();
        assert_eq!(r.exit_code(), 1);
        assert!(r
            .validation
            .checks
            .iter()
            .any(|c| c.witness == Some(vec![1, 0])));
    }
}
