fn main() -> std::process::ExitCode {
    wrongsmith::cli::main()
}
