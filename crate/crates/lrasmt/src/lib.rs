//! A small SMT solver for quantifier-free linear real arithmetic: a CDCL SAT
//! core (batsat) with an exact-rational simplex theory, fronted by the
//! SMT-LIB2 commands needed for incremental bounded model checking.

pub mod engine;
pub mod rational;
pub mod sexpr;
pub mod simplex;
pub mod term;
pub mod theory;

pub use engine::{Engine, Model, Response, SatResult};

use std::io::{BufRead, Write};

/// Serve SMT-LIB2 over arbitrary reader/writer pairs; used by the binary for
/// stdin/stdout and by tests for in-memory sessions.
pub fn serve<R: BufRead, W: Write>(input: R, mut output: W) -> std::io::Result<()> {
    let mut engine = Engine::new();
    let mut reader = sexpr::Reader::new();
    for line in input.lines() {
        let line = line?;
        reader.feed(&line);
        reader.feed("\n");
        loop {
            match reader.next_expr() {
                Ok(Some(cmd)) => match engine.exec(&cmd) {
                    Response::Ack => {
                        if engine.print_success() {
                            writeln!(output, "success")?;
                        }
                    }
                    Response::Answer(s) => writeln!(output, "{s}")?,
                    Response::Error(e) => writeln!(output, "(error \"{e}\")")?,
                    Response::Exit => {
                        output.flush()?;
                        return Ok(());
                    }
                },
                Ok(None) => break,
                Err(e) => {
                    writeln!(output, "(error \"{e}\")")?;
                    return Ok(());
                }
            }
            output.flush()?;
        }
        output.flush()?;
    }
    Ok(())
}
