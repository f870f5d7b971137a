fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(fewbody::cli::run_command(&args));
}
