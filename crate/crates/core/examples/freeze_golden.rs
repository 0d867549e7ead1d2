//! Regenerates the golden-values file from the oracles, then checks the
//! library against it.
//!
//! ```text
//! cargo run --release --example freeze_golden [path]
//! ```

use std::path::PathBuf;

use bregproj::oracle::golden;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(golden::default_path);
    let file = golden::freeze()?;
    file.save(&path)?;
    println!("wrote {} entries to {}", file.entries.len(), path.display());
    for report in golden::verify(&file)? {
        println!("{report}");
    }
    Ok(())
}
