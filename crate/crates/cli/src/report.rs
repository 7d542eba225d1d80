use serde::Serialize;

/// Numeric check with its tolerance and outcome, the unit every report is
/// built from.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Whether a failed check fails the command, or is informational only.
    pub gating: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub kind: String,
    pub feasible: bool,
    pub trivial: bool,
    pub cost: usize,
    pub opt: Option<usize>,
    pub ratio: Option<f64>,
    pub k: usize,
    pub seed: u64,
    pub runtime_ms: u128,
    pub iterations: Vec<IterationLine>,
    pub solution_links: Vec<[usize; 2]>,
    pub solution_steiner: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationLine {
    pub iter: usize,
    pub objective: f64,
    pub sum_x: f64,
    pub component_terminals: Vec<usize>,
    pub component_cost: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub mode: String,
    pub h_average: RationalValue,
    pub steiner_count: usize,
    pub checks: Vec<BoundCheck>,
    pub per_node: Vec<PerNode>,
    pub audit: Option<AuditSummary>,
    pub witness_edges: Vec<[usize; 2]>,
    pub runtime_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalValue {
    pub numerator: String,
    pub denominator: String,
    pub float: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerNode {
    pub node: usize,
    pub label: String,
    pub w: u64,
    pub h_w: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditSummary {
    pub components: usize,
    pub subtrees_checked: usize,
    pub holds: bool,
    pub base_case_exact: bool,
    pub structure_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<CriterionLine>,
    pub all_passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionLine {
    pub name: String,
    pub passed: bool,
    pub millis: u128,
    pub budget_millis: u128,
    pub details: String,
}
