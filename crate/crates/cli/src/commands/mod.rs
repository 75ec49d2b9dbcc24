pub mod checks;
pub mod cv;
pub mod gen;
pub mod predict;
pub mod train;

use std::path::Path;

use hypodx::{Error, Result};

pub fn ensure_out_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)
        .map_err(|e| Error::Data(format!("cannot create output dir {}: {e}", path.display())))
}

/// Write via a temp file and rename, so consumers never see partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
