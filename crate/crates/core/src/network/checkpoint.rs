//! Binary parameter files: magic, version, config text, then named
//! tensors as little-endian `f32` in row-major order.

use std::fs;
use std::path::Path;

use super::config::NetworkConfig;
use super::params::NetworkParams;
use super::NetworkError;

pub const MAGIC: &[u8; 8] = b"XDIMCKPT";
pub const VERSION: u32 = 1;

pub fn to_bytes(params: &NetworkParams) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    put_str(&mut out, &params.config.to_text());
    out.extend_from_slice(&(params.tensors.len() as u32).to_le_bytes());
    for t in &params.tensors {
        put_str(&mut out, &t.name);
        out.extend_from_slice(&(t.shape.len() as u32).to_le_bytes());
        for &d in &t.shape {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for &v in &t.data {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<NetworkParams, NetworkError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(bad("missing XDIMCKPT magic"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(bad(&format!("unsupported checkpoint version {version}")));
    }
    let config = NetworkConfig::from_text(&r.string()?)?;
    let mut params = NetworkParams::zeros(config);
    let count = r.u32()? as usize;
    if count != params.tensors.len() {
        return Err(NetworkError::ShapeMismatch(format!(
            "checkpoint has {count} tensors, config expects {}",
            params.tensors.len()
        )));
    }
    for t in &mut params.tensors {
        let name = r.string()?;
        if name != t.name {
            return Err(NetworkError::ShapeMismatch(format!(
                "expected tensor {}, found {name}",
                t.name
            )));
        }
        let rank = r.u32()? as usize;
        let shape = (0..rank)
            .map(|_| r.u32().map(|d| d as usize))
            .collect::<Result<Vec<_>, _>>()?;
        if shape != t.shape {
            return Err(NetworkError::ShapeMismatch(format!(
                "tensor {name}: shape {shape:?}, expected {:?}",
                t.shape
            )));
        }
        for v in &mut t.data {
            let b = r.take(4)?;
            *v = f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]]));
        }
    }
    if r.pos != bytes.len() {
        return Err(bad("trailing bytes after last tensor"));
    }
    if !params.is_finite() {
        return Err(bad("non-finite parameter values"));
    }
    Ok(params)
}

pub fn save(params: &NetworkParams, path: &Path) -> Result<(), NetworkError> {
    fs::write(path, to_bytes(params))
        .map_err(|e| NetworkError::Io(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<NetworkParams, NetworkError> {
    let bytes = fs::read(path).map_err(|e| NetworkError::Io(format!("{}: {e}", path.display())))?;
    from_bytes(&bytes)
}

fn bad(msg: &str) -> NetworkError {
    NetworkError::BadCheckpoint(msg.to_string())
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NetworkError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| bad("truncated checkpoint"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, NetworkError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn string(&mut self) -> Result<String, NetworkError> {
        let n = self.u32()? as usize;
        let b = self.take(n)?;
        String::from_utf8(b.to_vec()).map_err(|_| bad("string is not UTF-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::config::Architecture;
    use crate::network::params::init_network;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> NetworkConfig {
        NetworkConfig {
            architecture: Architecture::XdimRes,
            layers: 2,
            channels: 4,
            scalars: 6,
            ..NetworkConfig::default()
        }
    }

    #[test]
    fn bytes_round_trip_exactly() {
        let p = init_network(small(), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let bytes = to_bytes(&p);
        let q = from_bytes(&bytes).unwrap();
        assert_eq!(p, q);
        assert_eq!(to_bytes(&q), bytes);
    }

    #[test]
    fn corrupt_inputs_are_rejected() {
        let p = init_network(small(), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let bytes = to_bytes(&p);
        assert!(from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(from_bytes(b"NOTACKPT").is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(from_bytes(&extra).is_err());
        let mut wrong_version = bytes;
        wrong_version[8] = 9;
        assert!(from_bytes(&wrong_version).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.xdim");
        let p = init_network(small(), &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        save(&p, &path).unwrap();
        assert_eq!(load(&path).unwrap(), p);
        assert!(matches!(
            load(&dir.path().join("missing")),
            Err(NetworkError::Io(_))
        ));
    }
}
