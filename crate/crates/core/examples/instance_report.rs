//! Runs the command-line front end in process on a bundled instance.

use conetop::cli;

fn main() {
    let inst = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/z2-half-cone.inst");
    for args in [
        vec!["conetop", "--format", "text", "profile", inst],
        vec!["conetop", "--format", "text", "certify", inst, "--property", "2pc", "--space", "cone-star", "--verify"],
    ] {
        let out = cli::run(args);
        print!("{}", out.stdout);
        eprint!("{}", out.stderr);
        println!("exit code {}", out.code);
    }
}
