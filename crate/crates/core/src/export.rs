//! CSV writers. Floats use the shortest round-trip representation; optional
//! `#` comment lines precede the header.

use std::io::Write;

use crate::control::{ControlSignal, ControlSolution, MomentProblem};
use crate::error::Result;
use crate::gaps::GapClassification;
use crate::modes::ModeShape;
use crate::observability::ObservabilityExperiment;
use crate::shooting::SideSolution;
use crate::simulator::Trajectory;
use crate::spectrum::SpectrumTable;

pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn write_csv<W: Write>(
    mut out: W,
    comments: &[String],
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_side_solution<W: Write>(out: W, sol: &SideSolution) -> Result<()> {
    let rows = (0..sol.grid.len()).map(|i| vec![num(sol.grid[i]), num(sol.y[i]), num(sol.y_prime[i])]);
    write_csv(out, &[format!("side {:?}, lambda {}", sol.side, num(sol.lambda))], &["x", "y", "y_prime"], rows)
}

pub fn write_spectrum<W: Write>(out: W, table: &SpectrumTable) -> Result<()> {
    let rows = (0..table.len()).map(|i| {
        let mu = table.mu.get(i);
        vec![
            (i + 1).to_string(),
            mu.map_or(String::new(), |m| num(m.value)),
            mu.map_or(String::new(), |m| m.tag.as_str().to_string()),
            table.lambda_prime.get(i).map_or(String::new(), |v| num(*v)),
            num(table.lambda[i]),
            num(table.lambda[i].sqrt()),
            table.gaps.get(i).map_or(String::new(), |v| num(*v)),
        ]
    });
    let header = ["n", "mu", "mu_tag", "lambda_prime", "lambda", "sqrt_lambda", "delta_n"];
    write_csv(out, &[format!("mass {}", num(table.config().mass()))], &header, rows)
}

pub fn write_gaps<W: Write>(out: W, table: &SpectrumTable, classes: &GapClassification) -> Result<()> {
    let rows = (0..classes.labels.len()).map(|i| {
        let n = i + 1;
        let d = table.gaps.get(i).copied();
        vec![
            n.to_string(),
            d.map_or(String::new(), num),
            d.map_or(String::new(), |d| num(n as f64 * d)),
            classes.labels[i].as_str().to_string(),
            classes.in_lambda(n).to_string(),
        ]
    });
    let header = ["n", "delta_n", "n_times_delta_n", "set_label", "lambda_in_Gamma_star"];
    write_csv(out, &[format!("delta_prime {}", num(classes.delta_prime))], &header, rows)
}

pub fn write_mode<W: Write>(out: W, mode: &ModeShape) -> Result<()> {
    let rows = mode.rows().into_iter().map(|(x, p, d)| vec![num(x), num(p), num(d)]);
    let comment = format!("mode {}, lambda {}, branch {}", mode.n, num(mode.lambda), mode.branch.as_str());
    write_csv(out, &[comment], &["x", "phi", "phi_prime"], rows)
}

pub fn write_mode_summary<W: Write>(out: W, modes: &[ModeShape]) -> Result<()> {
    let rows = modes.iter().map(|m| {
        vec![
            m.n.to_string(),
            num(m.lambda),
            num(m.phi0),
            num(m.slope1),
            num(m.norm_w),
            num(m.norm_h0),
            m.branch.as_str().to_string(),
        ]
    });
    write_csv(out, &[], &["n", "lambda", "phi0", "slope1", "normW", "normH0", "branch"], rows)
}

pub fn write_observability<W: Write>(out: W, exp: &ObservabilityExperiment) -> Result<()> {
    let comments = [
        format!("T {}", num(exp.t_end)),
        format!("N_modes {}", exp.n_modes),
        format!("seed {}", exp.seed),
        format!("delta_prime {}", num(exp.delta_prime)),
        format!("D_plus_estimate {}", num(exp.d_plus_estimate)),
        format!("data a_n = (x + iy)/n, x, y uniform on [-1, 1], ChaCha8 stream per trial; c_min {} c_max {}", num(exp.c_min), num(exp.c_max)),
    ];
    let rows = exp.trials.iter().map(|t| vec![t.trial.to_string(), num(t.integral), num(t.y_norm), num(t.ratio)]);
    write_csv(out, &comments, &["trial", "integral", "y_norm", "ratio"], rows)
}

pub fn write_control_signal<W: Write>(out: W, signal: &ControlSignal) -> Result<()> {
    let rows = signal.t.iter().zip(&signal.p).map(|(t, p)| vec![num(*t), num(*p)]);
    write_csv(out, &[format!("L2 norm {}", num(signal.l2_norm))], &["t", "p"], rows)
}

pub fn write_control_report<W: Write>(out: W, problem: &MomentProblem, solution: &ControlSolution) -> Result<()> {
    let mut comments = vec![
        format!("T {}", num(problem.t_end)),
        format!("epsilon {}", num(solution.epsilon)),
        format!("condition {}", num(solution.condition)),
        format!("relative moment residual {}", num(solution.moment_residual)),
    ];
    if let Some(tail) = problem.truncation_tail {
        comments.push(format!("energy outside truncation {}", num(tail)));
        if problem.truncation_warning() {
            comments.push("warning: truncation too aggressive".into());
        }
    }
    let rows = problem.indices.iter().enumerate().map(|(i, k)| {
        let (m, a) = (problem.targets[i], solution.achieved[i]);
        vec![k.to_string(), num(m.re), num(m.im), num(a.re), num(a.im), num((a - m).norm())]
    });
    let header = ["n", "target_re", "target_im", "achieved_re", "achieved_im", "residual"];
    write_csv(out, &comments, &header, rows)
}

pub fn write_snapshots<W: Write>(out: W, traj: &Trajectory) -> Result<()> {
    let rows = traj
        .snapshots
        .iter()
        .flat_map(|(t, w)| traj.x.iter().zip(w).map(move |(x, w)| vec![num(*t), num(*x), num(*w)]));
    write_csv(out, &[format!("dx {}, dt {}", num(traj.dx), num(traj.dt))], &["t", "x", "w"], rows)
}

pub fn write_trace<W: Write>(out: W, traj: &Trajectory) -> Result<()> {
    let rows = traj.t.iter().zip(&traj.trace).map(|(t, v)| vec![num(*t), num(*v)]);
    write_csv(out, &[format!("dx {}, dt {}", num(traj.dx), num(traj.dt))], &["t", "vx1"], rows)
}

pub fn write_energy<W: Write>(out: W, traj: &Trajectory) -> Result<()> {
    let rows = traj.energy.iter().map(|(t, e)| vec![num(*t), num(*e)]);
    write_csv(out, &[format!("relative drift {}", num(traj.energy_drift()))], &["t", "E"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::SystemConfig;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, std::f64::consts::PI] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn spectrum_csv_layout() {
        let t = SpectrumTable::build(4, &SystemConfig::unit(1.0)).unwrap();
        let mut buf = Vec::new();
        write_spectrum(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        assert_eq!(lines.next().unwrap(), "n,mu,mu_tag,lambda_prime,lambda,sqrt_lambda,delta_n");
        let row: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "2");
        assert_eq!(row[4].parse::<f64>().unwrap(), t.lambda[1]);
    }
}
