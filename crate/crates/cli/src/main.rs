fn main() {
    std::process::exit(opinion_merge_cli::main_with_args(std::env::args_os()));
}
