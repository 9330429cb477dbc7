use std::io::{self, Write};

use serde::Serialize;

use super::episode::{EpisodeSummary, ThetaSnapshot, TraceRecord};

pub const TRACE_HEADER: &str = "t,x,y,z,V,gamma,chi,mu,beta,action,reward,E,wx,wy,wz,ap";

pub fn write_trace_csv<W: Write>(mut out: W, records: &[TraceRecord]) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in records {
        let action = r.action.map_or(-1, i32::from);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.x,
            r.y,
            r.z,
            r.v,
            r.gamma,
            r.chi,
            r.mu,
            r.beta,
            action,
            r.reward,
            r.energy,
            r.wind.w_x,
            r.wind.w_y,
            r.wind.w_z,
            u8::from(r.autopilot)
        )?;
    }
    out.flush()
}

/// One row per snapshot: the step index followed by every weight.
pub fn write_theta_csv<W: Write>(mut out: W, history: &[ThetaSnapshot]) -> io::Result<()> {
    let n = history.first().map_or(0, |s| s.theta.len());
    write!(out, "step")?;
    for i in 0..n {
        write!(out, ",theta{i}")?;
    }
    writeln!(out)?;
    for snap in history {
        write!(out, "{}", snap.step)?;
        for w in &snap.theta {
            write!(out, ",{w}")?;
        }
        writeln!(out)?;
    }
    out.flush()
}

#[derive(Serialize)]
struct SummaryDocument<'a, C: Serialize> {
    #[serde(flatten)]
    summary: &'a EpisodeSummary,
    config: &'a C,
}

/// Writes the summary with the resolved configuration echoed alongside.
pub fn write_summary_json<W: Write, C: Serialize>(
    mut out: W,
    summary: &EpisodeSummary,
    config: &C,
) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, &SummaryDocument { summary, config })?;
    writeln!(out)?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atmosphere::WindVector;

    #[test]
    fn trace_layout() {
        let rec = TraceRecord {
            t: 0.01,
            x: 1.0,
            y: 2.0,
            z: 300.0,
            v: 15.0,
            gamma: -0.05,
            chi: 0.0,
            mu: 0.0,
            beta: 0.0,
            action: None,
            reward: -0.7,
            energy: 311.0,
            wind: WindVector::default(),
            autopilot: true,
            in_updraft: false,
        };
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER);
        assert_eq!(lines[1], "0.01,1,2,300,15,-0.05,0,0,0,-1,-0.7,311,0,0,0,1");
        assert_eq!(lines[1].split(',').count(), TRACE_HEADER.split(',').count());
    }

    #[test]
    fn theta_layout() {
        let h = vec![ThetaSnapshot {
            step: 100,
            t: 0.1,
            theta: vec![0.5, -1.0],
        }];
        let mut buf = Vec::new();
        write_theta_csv(&mut buf, &h).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "step,theta0,theta1\n100,0.5,-1\n"
        );
    }
}
