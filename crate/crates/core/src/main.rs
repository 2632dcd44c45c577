fn main() -> std::process::ExitCode {
    unidisc::cli::main()
}
