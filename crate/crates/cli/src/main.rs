use std::io::Write;

fn main() {
    let seed = std::env::var("MODULI_SEED").ok();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match metric_moduli_cli::run(std::env::args_os(), seed.as_deref(), &mut out) {
        Ok(()) => 0,
        Err(failure) => {
            let (metric_moduli_cli::Failure::Input(msg) | metric_moduli_cli::Failure::Check(msg)) = &failure;
            eprintln!("error: {}", msg.trim_end());
            failure.exit_code()
        }
    };
    let _ = out.flush();
    std::process::exit(code);
}
