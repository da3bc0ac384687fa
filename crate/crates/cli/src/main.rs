use clap::Parser;

fn main() {
    let cli = teig_cli::args::Cli::parse();
    std::process::exit(teig_cli::run(cli));
}
