use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::Instant;

use wait_timeout::ChildExt;

use super::{Budget, SatError, SolveOutcome, SolveStats, Status};
use crate::cnf::CnfFormula;

/// What a solver printed, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolverOutput {
    pub status: Option<Status>,
    /// Literals from `v` lines, without the terminating 0.
    pub values: Vec<i32>,
    pub saw_values: bool,
}

/// Parses the competition output format: an `s` status line and `v` value
/// lines. Falls back to exit codes 10 (SAT) and 20 (UNSAT) when there is no
/// status line.
pub fn parse_solver_output(stdout: &str, exit_code: Option<i32>) -> Result<SolverOutput, String> {
    let mut out = SolverOutput::default();
    for line in stdout.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            out.status = Some(match rest.trim() {
                "SATISFIABLE" => Status::Satisfiable,
                "UNSATISFIABLE" => Status::Unsatisfiable,
                "UNKNOWN" => Status::Unknown,
                other => return Err(format!("unrecognised status line `s {other}`")),
            });
        } else if let Some(rest) = line.strip_prefix('v') {
            out.saw_values = true;
            for tok in rest.split_whitespace() {
                let lit: i32 = tok
                    .parse()
                    .map_err(|_| format!("bad literal `{tok}` in value line"))?;
                if lit != 0 {
                    out.values.push(lit);
                }
            }
        }
    }
    if out.status.is_none() {
        out.status = match exit_code {
            Some(10) => Some(Status::Satisfiable),
            Some(20) => Some(Status::Unsatisfiable),
            _ => None,
        };
    }
    Ok(out)
}

fn command_line(template: &str, path: &str) -> Vec<String> {
    let mut argv: Vec<String> = template.split_whitespace().map(str::to_string).collect();
    if argv.iter().any(|a| a.contains("{cnf}")) {
        for a in &mut argv {
            *a = a.replace("{cnf}", path);
        }
    } else {
        argv.push(path.to_string());
    }
    argv
}

/// Writes `f` to a temporary DIMACS file and runs `command` on it.
///
/// The command is split on whitespace; every `{cnf}` is replaced with the
/// file path, which is appended when no placeholder is present. A claimed
/// model is checked against `f` and rejected with an error if it falsifies
/// any clause.
pub fn solve_external(
    f: &CnfFormula,
    command: &str,
    budget: &Budget,
) -> Result<SolveOutcome, SatError> {
    let started = Instant::now();
    let unknown = |msg: String| {
        let stats = SolveStats {
            wall_time: started.elapsed(),
            ..SolveStats::default()
        };
        Ok(SolveOutcome::without_model(
            Status::Unknown,
            stats,
            Some(msg),
        ))
    };

    let mut file = tempfile::Builder::new()
        .prefix("dnftaut-")
        .suffix(".cnf")
        .tempfile()
        .map_err(|e| SatError::Io(e.to_string()))?;
    file.write_all(f.to_dimacs(&[]).as_bytes())
        .and_then(|_| file.flush())
        .map_err(|e| SatError::Io(e.to_string()))?;
    let path = file.path().to_string_lossy().into_owned();

    let argv = command_line(command, &path);
    let Some((program, args)) = argv.split_first() else {
        return unknown("empty solver command".into());
    };
    let mut child = match Command::new(program)
        .args(args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return unknown(format!("cannot start `{program}`: {e}")),
    };

    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let waited = match budget.time {
        Some(limit) => child.wait_timeout(limit),
        None => child.wait().map(Some),
    };
    let exit = match waited {
        Ok(Some(status)) => status,
        Ok(None) => {
            let _ = child.kill();
            let _ = child.wait();
            let stats = SolveStats {
                wall_time: started.elapsed(),
                ..SolveStats::default()
            };
            return Ok(SolveOutcome::without_model(
                Status::Timeout,
                stats,
                Some(format!(
                    "`{program}` killed after {:?}",
                    budget.time.unwrap_or_default()
                )),
            ));
        }
        Err(e) => return unknown(format!("waiting for `{program}` failed: {e}")),
    };
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    let stats = SolveStats {
        wall_time: started.elapsed(),
        ..SolveStats::default()
    };

    let parsed = match parse_solver_output(&stdout, exit.code()) {
        Ok(p) => p,
        Err(msg) => return unknown(msg),
    };
    match parsed.status {
        Some(Status::Satisfiable) => {
            if !parsed.saw_values {
                return unknown("solver reported SAT without a model".into());
            }
            let mut model = vec![false; f.num_vars() as usize];
            for lit in parsed.values {
                if let Some(slot) = model.get_mut(lit.unsigned_abs() as usize - 1) {
                    *slot = lit > 0;
                }
            }
            if let Some(i) = f.first_falsified(&model) {
                return Err(SatError::ModelRejected {
                    clause: i,
                    lits: f.clauses()[i].clone(),
                });
            }
            Ok(SolveOutcome {
                status: Status::Satisfiable,
                model: Some(model),
                stats,
                diagnostic: None,
            })
        }
        Some(status) => Ok(SolveOutcome::without_model(status, stats, None)),
        None => {
            let tail: String = stderr
                .lines()
                .last()
                .unwrap_or("")
                .chars()
                .take(200)
                .collect();
            unknown(format!(
                "no result from `{program}` (exit {:?}) {tail}",
                exit.code()
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_status_and_values() {
        let out = parse_solver_output("c hello\ns SATISFIABLE\nv 1 -2\nv 3 0\n", Some(10)).unwrap();
        assert_eq!(out.status, Some(Status::Satisfiable));
        assert_eq!(out.values, vec![1, -2, 3]);

        let out = parse_solver_output("s UNSATISFIABLE\n", Some(20)).unwrap();
        assert_eq!(out.status, Some(Status::Unsatisfiable));
        assert!(parse_solver_output("s MAYBE\n", None).is_err());
    }

    #[test]
    fn exit_code_fallback() {
        assert_eq!(
            parse_solver_output("", Some(20)).unwrap().status,
            Some(Status::Unsatisfiable)
        );
        assert_eq!(
            parse_solver_output("", Some(10)).unwrap().status,
            Some(Status::Satisfiable)
        );
        assert_eq!(parse_solver_output("", Some(0)).unwrap().status, None);
    }

    #[test]
    fn placeholder_substitution() {
        assert_eq!(
            command_line("kissat -q {cnf}", "/t/x.cnf"),
            vec!["kissat", "-q", "/t/x.cnf"]
        );
        assert_eq!(
            command_line("minisat", "/t/x.cnf"),
            vec!["minisat", "/t/x.cnf"]
        );
        assert_eq!(command_line("s --in={cnf}", "a"), vec!["s", "--in=a"]);
    }

    #[test]
    fn missing_program_is_unknown() {
        let f = CnfFormula::new(1);
        let out = solve_external(&f, "/nonexistent/solver-binary", &Budget::default()).unwrap();
        assert_eq!(out.status, Status::Unknown);
        assert!(out.diagnostic.unwrap().contains("cannot start"));
    }
}
