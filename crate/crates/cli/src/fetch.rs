//! MNIST download with checksum verification.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use md5::{Digest, Md5};

use crate::error::{RunError, RunResult};

pub const DEFAULT_MIRROR: &str = "https://ossci-datasets.s3.amazonaws.com/mnist/";

/// Gzipped IDX files and the MD5 of each archive as distributed.
pub const MNIST_FILES: [(&str, &str); 4] = [
    ("train-images-idx3-ubyte", "f68b3c2dcbeaaa9fbdd348bbdeb94873"),
    ("train-labels-idx1-ubyte", "d53e105ee54ea40749a09fcbcd1e9432"),
    ("t10k-images-idx3-ubyte", "9fb629c4189551a2d022fa330f9573f3"),
    ("t10k-labels-idx1-ubyte", "ec29112dd5afa0611ce80d1b7f02629c"),
];

const MAX_ARCHIVE_BYTES: u64 = 64 * 1024 * 1024;

pub fn md5_hex(bytes: &[u8]) -> String {
    format!("{:x}", Md5::digest(bytes))
}

/// Checks `archive` against `expected_md5`, gunzips it and writes the
/// result to `dest` (through a temporary file, so `dest` is never partial).
pub fn install_archive(archive: &[u8], expected_md5: &str, dest: &Path) -> RunResult<()> {
    let got = md5_hex(archive);
    if !got.eq_ignore_ascii_case(expected_md5) {
        return Err(RunError::Fetch(format!(
            "checksum mismatch for {}: expected {expected_md5}, got {got}",
            dest.display()
        )));
    }
    let mut raw = Vec::new();
    GzDecoder::new(archive)
        .read_to_end(&mut raw)
        .map_err(|e| RunError::Fetch(format!("decompressing {}: {e}", dest.display())))?;
    let tmp = dest.with_extension("part");
    fs::write(&tmp, &raw).map_err(|e| RunError::io(&tmp, e))?;
    fs::rename(&tmp, dest).map_err(|e| RunError::io(dest, e))
}

fn download(url: &str) -> RunResult<Vec<u8>> {
    let response = ureq::get(url)
        .call()
        .map_err(|e| RunError::Fetch(format!("{url}: {e}")))?;
    response
        .into_body()
        .with_config()
        .limit(MAX_ARCHIVE_BYTES)
        .read_to_vec()
        .map_err(|e| RunError::Fetch(format!("{url}: {e}")))
}

/// Downloads the four MNIST files from `mirror` into `dest`, skipping files
/// that already exist. Returns the paths of the files now present.
pub fn fetch_mnist(dest: &Path, mirror: &str) -> RunResult<Vec<PathBuf>> {
    fs::create_dir_all(dest).map_err(|e| RunError::io(dest, e))?;
    let base = mirror.trim_end_matches('/');
    MNIST_FILES
        .iter()
        .map(|(name, md5)| {
            let path = dest.join(name);
            if !path.exists() {
                let archive = download(&format!("{base}/{name}.gz"))?;
                install_archive(&archive, md5, &path)?;
            }
            Ok(path)
        })
        .collect()
}
