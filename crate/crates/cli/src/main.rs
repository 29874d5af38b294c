use clap::Parser;

fn main() {
    let cli = erbc_cli::Cli::parse();
    match erbc_cli::run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            for p in &out.written {
                eprintln!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("erbc: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
