use std::io::{self, BufReader};

fn main() {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let reader = BufReader::new(stdin.lock());
    let writer = stdout.lock();
    if let Err(e) = lrasmt::serve(reader, writer) {
        eprintln!("lrasmt: io error: {e}");
        std::process::exit(1);
    }
}
