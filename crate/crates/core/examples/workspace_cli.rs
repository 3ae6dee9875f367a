// Drive an on-disk workspace the way the `rdfview` binary does: copy the
// case study into a scratch directory, materialize, apply an update and
// list the changeset folder.

use std::fs;
use std::path::Path;

use rdfview::workspace::{cmd_apply, cmd_materialize, Workspace};

fn copy_tree(from: &Path, to: &Path) -> std::io::Result<()> {
    fs::create_dir_all(to)?;
    for entry in fs::read_dir(from)? {
        let entry = entry?;
        let dest = to.join(entry.file_name());
        if entry.file_type()?.is_dir() {
            copy_tree(&entry.path(), &dest)?;
        } else {
            fs::copy(entry.path(), dest)?;
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scratch = tempfile::tempdir()?;
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/musicbrainz");
    copy_tree(&src, scratch.path())?;

    let mut ws = Workspace::load(scratch.path())?;
    let (path, view) = cmd_materialize(&ws)?;
    println!("{} quads in {}", view.len(), path.display());

    let update = scratch.path().join("updates/example-track-credit.json");
    let applied = cmd_apply(&mut ws, &update, None)?;
    println!(
        "changeset {} in {}",
        applied.sequence,
        applied.folder.display()
    );
    for entry in fs::read_dir(&applied.folder)? {
        let entry = entry?;
        println!(
            "  {} ({} bytes)",
            entry.file_name().to_string_lossy(),
            entry.metadata()?.len()
        );
    }
    Ok(())
}
