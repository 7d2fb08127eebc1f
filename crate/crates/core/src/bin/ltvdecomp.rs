fn main() {
    let exit = ltvdecomp::cli::main_with(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(exit.code());
}
