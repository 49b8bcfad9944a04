fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mut stdout = std::io::stdout();
    std::process::exit(mzsim::run_cli(&args, &mut stdout));
}
