//! Run reports: one JSON document per invocation, or a human-readable table.

use realign::criteria::{CriterionReport, ThresholdResult};
use realign::measures::BoundReport;
use realign::optimizer::OptimizationResult;
use realign::reproduce::ExampleReport;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CSV_HEADER: &str = "family,param,criterion,lhs,rhs,margin,verdict";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Item {
    Criterion(CriterionReport),
    Bound(BoundReport),
    Threshold(ThresholdResult),
    GridPoint { family: String, param: f64, report: CriterionReport },
    Optimization(OptimizationResult),
    Example(ExampleReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    /// SHA-256 of the input state (or family) and the evaluation parameters.
    pub digest: String,
    pub items: Vec<Item>,
    pub wall_time_s: f64,
}

/// Incremental SHA-256 over the inputs that determine a run's results.
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn new() -> Self {
        Self(Sha256::new())
    }

    pub fn state(&mut self, rho: &realign::linalg::DensityMatrix) {
        for &d in rho.dims() {
            self.0.update((d as u64).to_le_bytes());
        }
        for z in rho.matrix().as_slice() {
            self.0.update(z.re.to_le_bytes());
            self.0.update(z.im.to_le_bytes());
        }
    }

    pub fn text(&mut self, s: &str) {
        self.0.update((s.len() as u64).to_le_bytes());
        self.0.update(s.as_bytes());
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

/// Six significant digits: fixed notation for moderate magnitudes, else scientific.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn verdict(r: &CriterionReport) -> &'static str {
    if r.is_entangled() {
        "ENTANGLED"
    } else {
        "INCONCLUSIVE"
    }
}

pub fn csv_row(family: &str, param: f64, r: &CriterionReport) -> String {
    format!("{family},{param},{},{},{},{},{}", r.criterion, r.lhs, r.rhs, r.margin, verdict(r))
}

fn criterion_line(r: &CriterionReport) -> String {
    format!(
        "{:<8} lhs {:>12}  rhs {:>12}  margin {:>13}  {}",
        r.criterion,
        sig6(r.lhs),
        sig6(r.rhs),
        sig6(r.margin),
        verdict(r)
    )
}

fn example_lines(e: &ExampleReport, out: &mut Vec<String>) {
    out.push(format!("example {}: {} [{}]", e.id, e.title, if e.pass() { "ok" } else { "DEVIATION" }));
    out.push(format!("  {:<16} {:>12} {:>12} {:>10} {:>8}", "quantity", "reference", "computed", "|delta|", "tol"));
    for c in &e.checks {
        let tol = c.tol.map_or("-".to_string(), sig6);
        out.push(format!(
            "  {:<16} {:>12} {:>12} {:>10} {:>8} {}",
            c.key,
            sig6(c.reference),
            sig6(c.computed),
            format!("{:.2e}", c.delta),
            tol,
            if c.pass { "" } else { "<- outside tolerance" }
        ));
    }
    for o in &e.orderings {
        out.push(format!("  order {} {}", o.description, if o.pass { "holds" } else { "VIOLATED" }));
    }
    for w in &e.warnings {
        out.push(format!("  warning: {w}"));
    }
}

impl RunReport {
    pub fn human(&self) -> String {
        let mut out = Vec::new();
        for item in &self.items {
            match item {
                Item::Criterion(r) => out.push(criterion_line(r)),
                Item::Bound(b) => out.push(format!(
                    "{:<16} bound {:>12}  (margin {} x {}, d = {}){}",
                    b.measure,
                    sig6(b.bound),
                    sig6(b.margin),
                    sig6(b.scale),
                    b.d,
                    if b.vacuous { "  vacuous" } else { "" }
                )),
                Item::Threshold(t) => {
                    let side = match t.side {
                        realign::criteria::DetectedSide::Upper => "above",
                        realign::criteria::DetectedSide::Lower => "below",
                    };
                    out.push(format!(
                        "{} {}: threshold {} (bracket [{}, {}], {} bisections), entangled {side}",
                        t.family,
                        t.lo_report.criterion,
                        sig6(t.threshold),
                        sig6(t.bracket.0),
                        sig6(t.bracket.1),
                        t.iterations
                    ));
                    out.push(format!("  lo: {}", criterion_line(&t.lo_report)));
                    out.push(format!("  hi: {}", criterion_line(&t.hi_report)));
                }
                Item::GridPoint { family, param, report } => {
                    out.push(format!("{family} @ {}: {}", sig6(*param), criterion_line(report)))
                }
                Item::Optimization(o) => {
                    out.push(format!(
                        "optimized margin {} after {} evaluations (restart {}){}",
                        sig6(o.margin),
                        o.evaluations,
                        o.best_restart,
                        if o.exhausted { ", iteration budget exhausted in some restarts" } else { "" }
                    ));
                    let fmt = |v: &[f64]| v.iter().map(|x| sig6(*x)).collect::<Vec<_>>().join(",");
                    out.push(format!("  mu = ({})", fmt(o.best.mu())));
                    out.push(format!("  nu = ({})", fmt(o.best.nu())));
                }
                Item::Example(e) => example_lines(e, &mut out),
            }
        }
        out.push(format!("digest {}  ({:.3}s)", self.digest, self.wall_time_s));
        out.join("\n")
    }

    pub fn csv(&self) -> String {
        let mut out = vec![CSV_HEADER.to_string()];
        for item in &self.items {
            match item {
                Item::GridPoint { family, param, report } => out.push(csv_row(family, *param, report)),
                Item::Threshold(t) => {
                    out.push(csv_row(&t.family, t.lo, &t.lo_report));
                    out.push(csv_row(&t.family, t.hi, &t.hi_report));
                }
                _ => {}
            }
        }
        out.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.232959123), "0.232959");
        assert_eq!(sig6(2.0), "2.00000");
        assert_eq!(sig6(-1234.5678), "-1234.57");
        assert_eq!(sig6(1.5e-7), "1.50000e-7");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let rho = realign::states::bell(2);
        let run = |extra: &str| {
            let mut d = InputDigest::new();
            d.state(&rho);
            d.text(extra);
            d.finish()
        };
        assert_eq!(run("a"), run("a"));
        assert_ne!(run("a"), run("b"));
        assert_eq!(run("a").len(), 64);
    }

    #[test]
    fn json_round_trip() {
        let report = RunReport {
            command: vec!["detect".into()],
            digest: "00".into(),
            items: vec![Item::Criterion(CriterionReport::new("ccnr", 2.0, 1.0, 1e-9))],
            wall_time_s: 0.5,
        };
        let text = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<RunReport>(&text).unwrap(), report);
    }
}
