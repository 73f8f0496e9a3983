//! Batch harness around the gapstream library: generate instances, run
//! solver sweeps, apply reductions, verify with oracles, and emit CSV.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage errors.

use std::process::ExitCode;

mod commands;
mod config;

use config::Config;

const USAGE: &str = "\
usage: gapstream <command> key=value ...

commands:
  gen     n= k= case={k|2k|hybrid} seed= out= [p=1] [directed=0] [hybrid=bits]
  run     solver={sample_bfs|single_pass|baseline} n= k= [p=1] trials= [seed=0]
          [case={mix|k|2k}] [rate_mult=1.0] [c=36] [space_limit=bits]
          [timings=0] [out=csv]
  reduce  in=prefix problem={mst|matching|maxcut|acyclic|connectivity|bipartite|cyclefree}
          out=prefix [W=5]
  verify  in=prefix
  sweep   param={rate_mult|p|k} values=v1,v2,... n= k= [p=1] [trials=100]
          [seed=0] [out=csv]
  xor     mode=bias biases=b1,b2,...
          mode=game file=table.txt
          mode=ip m= l=

Any command also accepts config=FILE with key=value lines; command-line
pairs win over the file.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some((command, rest)) = args.split_first() else {
        eprint!("{USAGE}");
        return ExitCode::from(2);
    };

    let run = || -> anyhow::Result<i32> {
        let config = Config::from_args(rest)?;
        match command.as_str() {
            "gen" => commands::cmd_gen(&config),
            "run" => commands::cmd_run(&config),
            "reduce" => commands::cmd_reduce(&config),
            "verify" => commands::cmd_verify(&config),
            "sweep" => commands::cmd_sweep(&config),
            "xor" => commands::cmd_xor(&config),
            other => anyhow::bail!("unknown command {other:?}\n{USAGE}"),
        }
    };

    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
