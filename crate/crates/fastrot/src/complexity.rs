//! Delay and area estimates for the rotation hardware, parameterized by
//! the word width Λ and a unit-cost table. Every subtractor is counted as
//! an adder plus an inverter array with carry-in, and λ = ceil(log2 Λ)
//! throughout.

use std::collections::HashMap;
use thiserror::Error;

/// Unit costs for one metric (delay or area).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCosts {
    /// Λ-bit adder
    pub add_word: f64,
    /// λ-bit adder
    pub add_index: f64,
    pub inv: f64,
    pub xor2: f64,
    pub and2: f64,
    pub and3: f64,
    pub and4: f64,
    pub or2: f64,
    pub or3: f64,
    pub or4: f64,
    pub or5: f64,
    /// (λ+1)-input NOR
    pub nor_index: f64,
    pub mux2: f64,
    /// Λ-bit priority encoder
    pub penc: f64,
    /// Λ-bit barrel shifter
    pub bshift: f64,
    /// Λ-bit comparator
    pub cmp: f64,
}

impl Default for UnitCosts {
    fn default() -> Self {
        Self {
            add_word: 1.0,
            add_index: 1.0,
            inv: 1.0,
            xor2: 1.0,
            and2: 1.0,
            and3: 1.0,
            and4: 1.0,
            or2: 1.0,
            or3: 1.0,
            or4: 1.0,
            or5: 1.0,
            nor_index: 1.0,
            mux2: 1.0,
            penc: 1.0,
            bshift: 1.0,
            cmp: 1.0,
        }
    }
}

impl UnitCosts {
    fn set(&mut self, key: &str, value: f64) -> bool {
        let slot = match key {
            "add_word" => &mut self.add_word,
            "add_index" => &mut self.add_index,
            "inv" => &mut self.inv,
            "xor2" => &mut self.xor2,
            "and2" => &mut self.and2,
            "and3" => &mut self.and3,
            "and4" => &mut self.and4,
            "or2" => &mut self.or2,
            "or3" => &mut self.or3,
            "or4" => &mut self.or4,
            "or5" => &mut self.or5,
            "nor_index" => &mut self.nor_index,
            "mux2" => &mut self.mux2,
            "penc" => &mut self.penc,
            "bshift" => &mut self.bshift,
            "cmp" => &mut self.cmp,
            _ => return false,
        };
        *slot = value;
        true
    }
}

/// Unit delays and areas for the primitive blocks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GateCostModel {
    pub delay: UnitCosts,
    pub area: UnitCosts,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}: expected `delay.<key>=<value>` or `area.<key>=<value>`")]
    Syntax { line: usize },
    #[error("line {line}: unknown cost key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: negative cost")]
    Negative { line: usize },
}

impl GateCostModel {
    /// Parse a `metric.key=value` text config; missing keys keep 1.0.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut model = Self::default();
        let known: HashMap<&str, ()> = [
            "add_word", "add_index", "inv", "xor2", "and2", "and3", "and4", "or2", "or3",
            "or4", "or5", "nor_index", "mux2", "penc", "bshift", "cmp",
        ]
        .into_iter()
        .map(|k| (k, ()))
        .collect();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (lhs, rhs) = trimmed.split_once('=').ok_or(ModelError::Syntax { line })?;
            let (metric, key) = lhs.trim().split_once('.').ok_or(ModelError::Syntax { line })?;
            let key = key.trim();
            if !known.contains_key(key) {
                return Err(ModelError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            let value: f64 = rhs
                .trim()
                .parse()
                .map_err(|_| ModelError::Syntax { line })?;
            if value < 0.0 {
                return Err(ModelError::Negative { line });
            }
            match metric.trim() {
                "delay" => model.delay.set(key, value),
                "area" => model.area.set(key, value),
                _ => return Err(ModelError::Syntax { line }),
            };
        }
        Ok(model)
    }
}

/// Steps with a critical-path delay estimate (step 4 runs in parallel with
/// step 3, so it carries no delay of its own).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayStep {
    Step1,
    Step2,
    Step3,
    Multiply,
    Scale,
    Apply,
}

/// Steps with an area estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AreaStep {
    Step1,
    Step2,
    Step3,
    Step4,
    Multiply,
    Scale,
    Apply,
}

fn lambda_of(width: u32) -> f64 {
    (32 - (width - 1).leading_zeros()) as f64 // ceil(log2 width), width >= 2
}

/// Critical-path delay of one step with the given unit costs.
pub fn step_delay(step: DelayStep, width: u32, model: &GateCostModel) -> f64 {
    assert!(width >= 2);
    let d = &model.delay;
    match step {
        DelayStep::Step1 => 2.0 * d.add_word + 2.0 * d.inv + d.xor2 + d.penc + d.add_index,
        DelayStep::Step2 => {
            let l_ckt1 = d.inv + d.and2 + d.or2;
            d.add_word + d.xor2 + l_ckt1 + d.add_index + d.mux2
        }
        DelayStep::Step3 => {
            let l_ckt1 = d.inv + d.or3 + d.and4;
            2.0 * d.add_index + d.nor_index + l_ckt1 + d.inv + 2.0 * d.mux2
        }
        DelayStep::Multiply => d.add_index + d.bshift + d.xor2 + d.add_word,
        DelayStep::Scale => d.bshift + 4.0 * d.add_word + d.inv + 5.0 * d.mux2,
        DelayStep::Apply => {
            2.0 * (step_delay(DelayStep::Multiply, width, model)
                + d.add_word
                + step_delay(DelayStep::Scale, width, model))
        }
    }
}

/// Area of one step with the given unit costs.
pub fn step_area(step: AreaStep, width: u32, model: &GateCostModel) -> f64 {
    assert!(width >= 2);
    let a = &model.area;
    let w = width as f64;
    let lam = lambda_of(width);
    match step {
        AreaStep::Step1 => {
            8.0 * a.add_word + 2.0 * (w + lam) * a.inv + 4.0 * w * a.xor2 + 4.0 * a.penc
                + 2.0 * a.add_index
        }
        AreaStep::Step2 => {
            let l_ckt1 = 3.0 * (a.inv + a.or2 + 2.0 * a.and2);
            let l_ckt2 = a.or3 + a.and2;
            2.0 * (a.add_word + a.bshift + 3.0 * a.cmp + l_ckt1 + 4.0 * l_ckt2 + a.add_index
                + lam * a.mux2)
        }
        AreaStep::Step3 => {
            let l_ckt1 =
                6.0 * a.inv + 2.0 * a.or3 + 2.0 * a.or2 + 4.0 * a.and3 + 6.0 * a.and4;
            let l_ckt2 =
                2.0 * a.inv + 2.0 * a.or3 + 2.0 * a.or5 + 3.0 * a.and2 + 2.0 * a.and3;
            3.0 * a.add_index + 3.0 * a.nor_index + l_ckt1 + l_ckt2 + 10.0 * a.inv
                + w * a.mux2
        }
        AreaStep::Step4 => {
            let l_ckt1 = a.or4 + a.or3 + 3.0 * a.and3 + 4.0 * a.and2;
            a.mux2 + l_ckt1 + a.xor2
        }
        AreaStep::Multiply => {
            a.add_index + a.add_word + w * a.xor2 + a.bshift + (w + lam) * a.mux2
        }
        AreaStep::Scale => a.bshift + 4.0 * a.add_word + w * a.inv + scale_mux_count(width) as f64 * a.mux2,
        AreaStep::Apply => {
            4.0 * (lam * step_area(AreaStep::Multiply, width, model)
                + 4.0 * a.add_word
                + 4.0 * step_area(AreaStep::Scale, width, model))
        }
    }
}

/// Two-input multiplexers in one barrel shifter: one Λ-wide mux column per
/// select level.
pub fn bshifter_mux_count(width: u32) -> u64 {
    (width as u64) * lambda_of(width) as u64
}

/// Two-input multiplexers in the staged scaling circuit: one Λ-wide column
/// of 2-input muxes plus two Λ-wide columns of 4-input muxes (three 2-input
/// muxes each).
pub fn scale_mux_count(width: u32) -> u64 {
    (width as u64) * 7
}

/// Multiplexer economics of the staged scaling circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalingSavings {
    pub baseline_mux: u64,
    pub design_mux: u64,
    pub saving: i64,
    pub per_bshifter_mux: u64,
    /// True only for the 32-bit case the figures are stated for; other
    /// widths are a linear extrapolation.
    pub paper_exact: bool,
}

/// Mux counts of the staged scaling circuit against the shift-and-add
/// baseline. Stated for 32 bits; other widths scale linearly and are
/// flagged as extrapolations.
pub fn scaling_savings(width: u32) -> ScalingSavings {
    let design = scale_mux_count(width);
    let baseline = (380 * width as u64) / 32;
    ScalingSavings {
        baseline_mux: baseline,
        design_mux: design,
        saving: baseline as i64 - design as i64,
        per_bshifter_mux: bshifter_mux_count(width),
        paper_exact: width == 32,
    }
}

/// Evaluated report for one width and model.
#[derive(Debug, Clone)]
pub struct CostReport {
    pub width: u32,
    pub delays: Vec<(String, f64)>,
    pub areas: Vec<(String, f64)>,
    pub calc_delay_total: f64,
    pub calc_area_total: f64,
    pub apply_delay_total: f64,
    pub apply_area_total: f64,
    pub savings: ScalingSavings,
}

pub fn cost_report(width: u32, model: &GateCostModel) -> CostReport {
    let delays: Vec<(String, f64)> = [
        ("step1", DelayStep::Step1),
        ("step2", DelayStep::Step2),
        ("step3", DelayStep::Step3),
        ("multiply", DelayStep::Multiply),
        ("scale", DelayStep::Scale),
        ("apply", DelayStep::Apply),
    ]
    .into_iter()
    .map(|(name, s)| (name.to_string(), step_delay(s, width, model)))
    .collect();
    let areas: Vec<(String, f64)> = [
        ("step1", AreaStep::Step1),
        ("step2", AreaStep::Step2),
        ("step3", AreaStep::Step3),
        ("step4", AreaStep::Step4),
        ("multiply", AreaStep::Multiply),
        ("scale", AreaStep::Scale),
        ("apply", AreaStep::Apply),
    ]
    .into_iter()
    .map(|(name, s)| (name.to_string(), step_area(s, width, model)))
    .collect();
    let calc_delay_total = step_delay(DelayStep::Step1, width, model)
        + step_delay(DelayStep::Step2, width, model)
        + step_delay(DelayStep::Step3, width, model);
    let calc_area_total = step_area(AreaStep::Step1, width, model)
        + step_area(AreaStep::Step2, width, model)
        + step_area(AreaStep::Step3, width, model)
        + step_area(AreaStep::Step4, width, model);
    CostReport {
        width,
        delays,
        areas,
        calc_delay_total,
        calc_area_total,
        apply_delay_total: step_delay(DelayStep::Apply, width, model),
        apply_area_total: step_area(AreaStep::Apply, width, model),
        savings: scaling_savings(width),
    }
}
