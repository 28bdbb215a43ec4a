//! Binary model format, all integers and floats little-endian:
//!
//! ```text
//! magic      8 bytes  "KDCMODEL"
//! version    u32
//! arch       u8       0 grat, 1 gat, 2 gcn
//! hidden     u8       activation tag
//! output     u8       activation tag
//! reserved   u8       0
//! layers     u32
//! dims       (layers + 1) x u32
//! params     per layer: W (n_out x n_in, row-major), b, a (attention only) as f64
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Activation, Architecture, LayerParams, Model, ModelError};

pub const MAGIC: [u8; 8] = *b"KDCMODEL";
pub const FORMAT_VERSION: u32 = 1;

const MAX_LAYERS: u32 = 64;
const MAX_DIM: u32 = 1 << 16;

pub fn write_model<W: Write>(model: &Model, mut out: W) -> Result<(), ModelError> {
    model.validate()?;
    out.write_all(&MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&[model.arch.tag(), model.hidden.tag(), model.output.tag(), 0])?;
    out.write_all(&(model.layers.len() as u32).to_le_bytes())?;
    for d in model.dims() {
        out.write_all(&(d as u32).to_le_bytes())?;
    }
    for x in model.params() {
        out.write_all(&x.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, ModelError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(truncated)?;
    Ok(u32::from_le_bytes(buf))
}

fn truncated(e: std::io::Error) -> ModelError {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        ModelError::Corrupt("file is truncated".into())
    } else {
        ModelError::Io(e)
    }
}

pub fn read_model<R: Read>(mut r: R) -> Result<Model, ModelError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| ModelError::BadMagic)?;
    if magic != MAGIC {
        return Err(ModelError::BadMagic);
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(ModelError::UnsupportedVersion(version));
    }
    let mut tags = [0u8; 4];
    r.read_exact(&mut tags).map_err(truncated)?;
    let arch = Architecture::from_tag(tags[0])
        .ok_or_else(|| ModelError::Corrupt(format!("unknown architecture tag {}", tags[0])))?;
    let activation = |t: u8| {
        Activation::from_tag(t).ok_or_else(|| ModelError::Corrupt(format!("unknown activation tag {t}")))
    };
    let (hidden, output) = (activation(tags[1])?, activation(tags[2])?);

    let count = read_u32(&mut r)?;
    if count == 0 || count > MAX_LAYERS {
        return Err(ModelError::Corrupt(format!("implausible layer count {count}")));
    }
    let mut dims = Vec::with_capacity(count as usize + 1);
    for _ in 0..=count {
        let d = read_u32(&mut r)?;
        if d == 0 || d > MAX_DIM {
            return Err(ModelError::Corrupt(format!("implausible layer width {d}")));
        }
        dims.push(d as usize);
    }

    let mut layers: Vec<LayerParams> = dims
        .windows(2)
        .map(|w| LayerParams::zeros(w[0], w[1], arch.has_attention()))
        .collect();
    let mut buf = [0u8; 8];
    for x in layers.iter_mut().flat_map(LayerParams::values_mut) {
        r.read_exact(&mut buf).map_err(truncated)?;
        *x = f64::from_le_bytes(buf);
    }
    if r.read(&mut buf)? != 0 {
        return Err(ModelError::Corrupt("trailing bytes after parameters".into()));
    }
    let model = Model { arch, layers, hidden, output };
    model.validate()?;
    Ok(model)
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<(), ModelError> {
    write_model(model, BufWriter::new(File::create(path)?))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model, ModelError> {
    read_model(BufReader::new(File::open(path)?))
}
