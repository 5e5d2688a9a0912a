use abelkit::cli;

fn main() {
    let out = cli::run(std::env::args_os());
    let text = out.payload.trim_end();
    if text.starts_with("error") {
        eprintln!("{text}");
    } else {
        println!("{text}");
    }
    std::process::exit(out.code);
}
