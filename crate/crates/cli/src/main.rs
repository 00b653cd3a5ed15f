use clap::Parser;

fn main() {
    let cli = fqtile_cli::Cli::parse();
    let code = fqtile_cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
