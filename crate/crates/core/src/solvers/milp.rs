use std::fmt::Write as _;

use crate::model::{EdgeId, ProblemInstance};
use crate::schedule::Objective;

/// Linear expression with coefficients merged by variable, in first-use order.
#[derive(Default)]
struct Expr {
    terms: Vec<(String, f64)>,
}

impl Expr {
    fn add(mut self, var: impl Into<String>, coef: f64) -> Self {
        let var = var.into();
        match self.terms.iter_mut().find(|(v, _)| *v == var) {
            Some((_, c)) => *c += coef,
            None => self.terms.push((var, coef)),
        }
        self
    }

    fn render(&self, out: &mut String) {
        let mut first = true;
        for (i, (var, coef)) in self.terms.iter().filter(|(_, c)| *c != 0.0).enumerate() {
            if i > 0 && i % 8 == 0 {
                out.push_str("\n   ");
            }
            let sign = if *coef < 0.0 { "-" } else { "+" };
            if first && *coef >= 0.0 {
                write!(out, " {} {var}", coef.abs()).unwrap();
            } else {
                write!(out, " {sign} {} {var}", coef.abs()).unwrap();
            }
            first = false;
        }
        if first {
            out.push_str(" 0 d_none");
        }
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Writes the big-M model of `instance` in CPLEX LP format.
///
/// Variables: `y<e>` (0: a before b, 1: b before a), `z<e>` (1: following)
/// and one nonnegative delay `d<k>` per event, where the updated time is
/// the expected time plus the delay.
pub fn export_milp(instance: &ProblemInstance, objective: Objective) -> String {
    let events = instance.events();
    let t = events.expected();
    let robots = instance.robots().len();
    let nf = robots.max(1) as f64;

    // last event of each robot, if any
    let last: Vec<Option<usize>> = (0..robots)
        .map(|r| events.robot_events(r).last())
        .collect();
    let completion_t = |r: usize| last[r].map_or(0.0, |k| t[k]);
    let max_t = t.iter().copied().fold(0.0, f64::max);
    let spans: f64 = (0..robots).map(completion_t).sum();
    let big_m = ((max_t + spans) * 2.0).max(1.0);

    let mut out = String::new();
    writeln!(out, "\\ coordination assignment, objective {objective}").unwrap();
    writeln!(out, "Minimize").unwrap();

    let mut obj = Expr::default();
    let mut constant = 0.0;
    let mut extra_rows: Vec<(String, Expr, &str, f64)> = Vec::new();
    let mut extra_vars: Vec<String> = Vec::new();
    match objective {
        Objective::Avg => {
            for r in 0..robots {
                constant += completion_t(r) / nf;
                if let Some(k) = last[r] {
                    obj = obj.add(format!("d{k}"), 1.0 / nf);
                }
            }
        }
        Objective::Max => {
            obj = obj.add("tmax", 1.0);
            extra_vars.push("tmax".into());
            for r in 0..robots {
                let mut row = Expr::default().add("tmax", 1.0);
                if let Some(k) = last[r] {
                    row = row.add(format!("d{k}"), -1.0);
                }
                extra_rows.push((format!("max_{r}"), row, ">=", completion_t(r)));
            }
        }
        Objective::Sync => {
            let mean_t: f64 = (0..robots).map(completion_t).sum::<f64>() / nf;
            constant += mean_t;
            for r in 0..robots {
                if let Some(k) = last[r] {
                    obj = obj.add(format!("d{k}"), 1.0 / nf);
                }
            }
            for r in 0..robots {
                obj = obj.add(format!("p{r}"), 1.0 / nf).add(format!("n{r}"), 1.0 / nf);
                extra_vars.push(format!("p{r}"));
                extra_vars.push(format!("n{r}"));
                // c_r - avg = p_r - n_r
                let mut row = Expr::default();
                if let Some(k) = last[r] {
                    row = row.add(format!("d{k}"), 1.0);
                }
                for k in last.iter().flatten() {
                    row = row.add(format!("d{k}"), -1.0 / nf);
                }
                row = row.add(format!("p{r}"), -1.0).add(format!("n{r}"), 1.0);
                extra_rows.push((format!("abs_{r}"), row, "=", mean_t - completion_t(r)));
            }
        }
        Objective::Delay => {
            for r in 0..robots {
                let range = events.robot_events(r);
                let c = range.len() as f64;
                for k in range {
                    obj = obj.add(format!("d{k}"), 1.0 / (nf * c));
                }
            }
        }
    }
    out.push_str(" obj:");
    obj.render(&mut out);
    if constant != 0.0 {
        write!(out, " + {}", num(constant)).unwrap();
    }
    out.push('\n');

    writeln!(out, "Subject To").unwrap();
    let mut row = |name: String, expr: Expr, sense: &str, rhs: f64| {
        write!(out, " {name}:").unwrap();
        expr.render(&mut out);
        writeln!(out, " {sense} {}", num(rhs)).unwrap();
    };

    for e in 0..instance.num_edges() {
        let [a_in, a_out, b_in, b_out] = events.edge_events(EdgeId(e));
        let (y, z) = (format!("y{e}"), format!("z{e}"));
        let d = |k: usize| format!("d{k}");
        // a -> b exclusive: b enters after a exits
        row(
            format!("excl_ab_{e}"),
            Expr::default().add(&y, big_m).add(&z, big_m).add(d(b_in), 1.0).add(d(a_out), -1.0),
            ">=",
            t[a_out] - t[b_in],
        );
        // b -> a exclusive
        row(
            format!("excl_ba_{e}"),
            Expr::default().add(&y, -big_m).add(&z, big_m).add(d(a_in), 1.0).add(d(b_out), -1.0),
            ">=",
            t[b_out] - t[a_in] - big_m,
        );
        // entry order follows the direction for both types
        row(
            format!("enter_ab_{e}"),
            Expr::default().add(&y, big_m).add(d(b_in), 1.0).add(d(a_in), -1.0),
            ">=",
            t[a_in] - t[b_in],
        );
        row(
            format!("enter_ba_{e}"),
            Expr::default().add(&y, -big_m).add(d(a_in), 1.0).add(d(b_in), -1.0),
            ">=",
            t[b_in] - t[a_in] - big_m,
        );
    }

    for (k, clique) in instance.cliques().iter().enumerate() {
        let mut expr = Expr::default();
        for &e in instance.topology().clique_edges(k) {
            expr = expr.add(format!("z{}", e.index()), 1.0);
        }
        row(format!("clique_{k}"), expr, "<=", clique.budget as f64);
    }

    for r in 0..robots {
        let mut prev: Option<usize> = None;
        for k in events.robot_events(r) {
            let mut expr = Expr::default().add(format!("d{k}"), 1.0);
            if let Some(p) = prev {
                expr = expr.add(format!("d{p}"), -1.0);
            }
            row(format!("chain_{r}_{k}"), expr, ">=", 0.0);
            prev = Some(k);
        }
    }

    for (name, expr, sense, rhs) in extra_rows {
        row(name, expr, sense, rhs);
    }

    writeln!(out, "Bounds").unwrap();
    for k in 0..events.num_events() {
        writeln!(out, " d{k} >= 0").unwrap();
    }
    for v in &extra_vars {
        if v == "tmax" {
            writeln!(out, " tmax free").unwrap();
        } else {
            writeln!(out, " {v} >= 0").unwrap();
        }
    }
    if instance.num_edges() > 0 {
        writeln!(out, "Binary").unwrap();
        for e in 0..instance.num_edges() {
            writeln!(out, " y{e} z{e}").unwrap();
        }
    }
    writeln!(out, "End").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fixtures, InstanceData};
    use crate::schedule::{check_feasible, Assignment, Direction, JointValue};
    use crate::solvers::testing::enumerate_costs;
    use std::collections::HashMap;

    /// Minimal reader for the subset of LP this module writes.
    struct Lp {
        objective: Vec<(String, f64)>,
        constant: f64,
        rows: Vec<(String, Vec<(String, f64)>, String, f64)>,
        binaries: Vec<String>,
    }

    fn parse_terms(text: &str) -> (Vec<(String, f64)>, f64) {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let mut terms = Vec::new();
        let mut constant = 0.0;
        let mut i = 0;
        let mut sign = 1.0;
        while i < tokens.len() {
            match tokens[i] {
                "+" => sign = 1.0,
                "-" => sign = -1.0,
                tok => {
                    let coef: f64 = tok.parse().unwrap();
                    match tokens.get(i + 1) {
                        Some(v) if !matches!(*v, "+" | "-") => {
                            terms.push((v.to_string(), sign * coef));
                            i += 1;
                        }
                        _ => constant += sign * coef,
                    }
                    sign = 1.0;
                }
            }
            i += 1;
        }
        (terms, constant)
    }

    fn parse(text: &str) -> Lp {
        // join continuation lines
        let mut logical: Vec<String> = Vec::new();
        for line in text.lines() {
            if line.starts_with("   ") {
                logical.last_mut().unwrap().push_str(line);
            } else {
                logical.push(line.to_string());
            }
        }
        let mut lp = Lp {
            objective: Vec::new(),
            constant: 0.0,
            rows: Vec::new(),
            binaries: Vec::new(),
        };
        let mut section = "";
        for line in &logical {
            let l = line.trim();
            match l {
                "Minimize" | "Subject To" | "Bounds" | "Binary" | "End" => {
                    section = if l == "Minimize" { "min" } else { l };
                    continue;
                }
                _ if l.starts_with('\\') => continue,
                _ => {}
            }
            match section {
                "min" => {
                    let (terms, c) = parse_terms(l.strip_prefix("obj:").unwrap());
                    lp.objective = terms;
                    lp.constant = c;
                }
                "Subject To" => {
                    let (name, body) = l.split_once(':').unwrap();
                    let sense = ["<=", ">=", "="].into_iter().find(|s| body.contains(s)).unwrap();
                    let (lhs, rhs) = body.split_once(sense).unwrap();
                    let (terms, c) = parse_terms(lhs);
                    assert_eq!(c, 0.0);
                    lp.rows.push((name.to_string(), terms, sense.to_string(), rhs.trim().parse().unwrap()));
                }
                "Binary" => lp.binaries.extend(l.split_whitespace().map(String::from)),
                _ => {}
            }
        }
        lp
    }

    fn eval(terms: &[(String, f64)], x: &HashMap<String, f64>) -> f64 {
        terms.iter().map(|(v, c)| c * x.get(v).copied().unwrap_or(0.0)).sum()
    }

    /// The assignment's schedule as an LP point.
    fn point(inst: &ProblemInstance, a: &Assignment) -> HashMap<String, f64> {
        let events = inst.events();
        let delays = events.delays(&crate::solvers::as_partial(a)).unwrap();
        let mut x = HashMap::new();
        for (k, d) in delays.iter().enumerate() {
            x.insert(format!("d{k}"), *d);
        }
        for (e, v) in a.values().iter().enumerate() {
            x.insert(format!("y{e}"), if v.direction() == Direction::BToA { 1.0 } else { 0.0 });
            x.insert(format!("z{e}"), if v.is_following() { 1.0 } else { 0.0 });
        }
        let summary = events.summarize_assignment(a).unwrap();
        let avg = summary.cost(Objective::Avg);
        x.insert("tmax".into(), summary.cost(Objective::Max));
        for (r, c) in summary.completion.iter().enumerate() {
            x.insert(format!("p{r}"), (c - avg).max(0.0));
            x.insert(format!("n{r}"), (avg - c).max(0.0));
        }
        x
    }

    #[test]
    fn two_node_row_counts() {
        let lp = parse(&export_milp(&fixtures::two_robot(1), Objective::Avg));
        assert_eq!(lp.binaries.len(), 2);
        let count = |p: &str| lp.rows.iter().filter(|r| r.0.starts_with(p)).count();
        assert_eq!(count("excl_") + count("enter_"), 4);
        assert_eq!(count("clique_"), 1);
        assert_eq!(count("chain_0_"), 2);
        assert_eq!(count("chain_1_"), 2);
    }

    #[test]
    fn max_adds_one_variable_and_n_rows() {
        let inst = fixtures::triangle(2);
        let text = export_milp(&inst, Objective::Max);
        let lp = parse(&text);
        assert_eq!(lp.rows.iter().filter(|r| r.0.starts_with("max_")).count(), inst.robots().len());
        assert_eq!(lp.objective, vec![("tmax".to_string(), 1.0)]);
    }

    #[test]
    fn no_edges_objective_is_constant() {
        let data = InstanceData {
            joints: Vec::new(),
            cliques: None,
            ..fixtures::two_robot(1).data().clone()
        };
        let inst = ProblemInstance::new(data).unwrap();
        let lp = parse(&export_milp(&inst, Objective::Avg));
        assert!(lp.binaries.is_empty());
        // all delays are zero at the optimum, leaving the constant
        let cost = crate::schedule::evaluate(&inst, &Assignment::new(Vec::new()), Objective::Avg).unwrap();
        assert!((lp.constant - cost).abs() < 1e-12);
    }

    #[test]
    fn feasible_assignments_satisfy_every_row() {
        for inst in [fixtures::two_robot(2), fixtures::triangle(1), fixtures::triangle(2)] {
            for objective in Objective::ALL {
                let lp = parse(&export_milp(&inst, objective));
                for (a, cost) in enumerate_costs(&inst, objective) {
                    let x = point(&inst, &a);
                    for (name, terms, sense, rhs) in &lp.rows {
                        let lhs = eval(terms, &x);
                        let ok = match sense.as_str() {
                            ">=" => lhs >= rhs - 1e-9,
                            "<=" => lhs <= rhs + 1e-9,
                            _ => (lhs - rhs).abs() < 1e-9,
                        };
                        assert!(ok, "{name}: {lhs} {sense} {rhs}");
                    }
                    let value = eval(&lp.objective, &x) + lp.constant;
                    assert!((value - cost).abs() < 1e-9, "{objective}: {value} vs {cost}");
                }
            }
        }
    }

    #[test]
    fn budget_violations_break_a_clique_row() {
        let inst = fixtures::triangle(1);
        let lp = parse(&export_milp(&inst, Objective::Avg));
        let a = Assignment::uniform(3, JointValue::AbFollow);
        assert!(!check_feasible(&inst, &a).is_feasible());
        let mut x = HashMap::new();
        for e in 0..3 {
            x.insert(format!("z{e}"), 1.0);
        }
        assert!(lp
            .rows
            .iter()
            .filter(|r| r.0.starts_with("clique_"))
            .any(|(_, terms, _, rhs)| eval(terms, &x) > *rhs));
    }
}
