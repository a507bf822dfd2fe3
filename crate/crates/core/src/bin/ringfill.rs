fn main() -> std::process::ExitCode {
    ringfill::cli::main()
}
