//! `SWDF` binary array container and CSV ingestion.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "SWDF" | u32 version = 1 | u32 ndim | ndim x u64 extent | u8 dtype | u8 normalization | payload
//! ```
//!
//! `dtype` 0 is real float64, 1 is complex float64 interleaved `re, im`. The
//! payload is row-major. Real payloads are promoted to complex on load.

use std::io::{BufRead, Read, Write};

use crate::array::NdArray;
use crate::error::{Result, SwdftError};
use crate::window::Normalization;
use crate::Complex64;

pub const MAGIC: &[u8; 4] = b"SWDF";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    Real = 0,
    Complex = 1,
}

impl Dtype {
    fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Dtype::Real),
            1 => Ok(Dtype::Complex),
            other => Err(SwdftError::Format(format!("unknown dtype {other}"))),
        }
    }
}

pub fn write_container<W: Write>(
    mut w: W,
    array: &NdArray,
    dtype: Dtype,
    normalization: Normalization,
) -> Result<()> {
    if dtype == Dtype::Real && array.data().iter().any(|z| z.im != 0.0) {
        return Err(SwdftError::Format(
            "cannot store complex data with the real dtype".into(),
        ));
    }
    let mut header = Vec::with_capacity(14 + 8 * array.rank());
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.extend_from_slice(&(array.rank() as u32).to_le_bytes());
    for &n in array.dims() {
        header.extend_from_slice(&(n as u64).to_le_bytes());
    }
    header.push(dtype as u8);
    header.push(normalization.code());
    w.write_all(&header)?;

    let per = if dtype == Dtype::Real { 8 } else { 16 };
    let mut payload = Vec::with_capacity(array.len() * per);
    for z in array.data() {
        payload.extend_from_slice(&z.re.to_le_bytes());
        if dtype == Dtype::Complex {
            payload.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&payload)?;
    w.flush()?;
    Ok(())
}

fn read_exact_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => SwdftError::Format("truncated container".into()),
        _ => SwdftError::Io(e),
    })?;
    Ok(buf)
}

/// Reads a container, rejecting non-finite values.
pub fn read_container<R: Read>(mut r: R) -> Result<(NdArray, Normalization)> {
    let magic: [u8; 4] = read_exact_array(&mut r)?;
    if &magic != MAGIC {
        return Err(SwdftError::Format("missing SWDF magic".into()));
    }
    let version = u32::from_le_bytes(read_exact_array(&mut r)?);
    if version != VERSION {
        return Err(SwdftError::Format(format!("unsupported version {version}")));
    }
    let ndim = u32::from_le_bytes(read_exact_array(&mut r)?) as usize;
    if ndim == 0 || ndim > 64 {
        return Err(SwdftError::Format(format!("implausible rank {ndim}")));
    }
    let mut dims = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        let n = u64::from_le_bytes(read_exact_array(&mut r)?);
        let n = usize::try_from(n)
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| SwdftError::Format(format!("bad extent {n}")))?;
        dims.push(n);
    }
    let [dtype, norm]: [u8; 2] = read_exact_array(&mut r)?;
    let dtype = Dtype::from_code(dtype)?;
    let normalization = Normalization::from_code(norm)?;

    let count = dims
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .ok_or_else(|| SwdftError::Format("element count overflows".into()))?;
    let per = if dtype == Dtype::Real { 8 } else { 16 };
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != count.saturating_mul(per) {
        return Err(SwdftError::Format(format!(
            "payload holds {} bytes, shape {dims:?} needs {}",
            payload.len(),
            count.saturating_mul(per)
        )));
    }
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8-byte chunk"));
    let data = payload
        .chunks_exact(per)
        .map(|chunk| match dtype {
            Dtype::Real => Complex64::new(f(chunk), 0.0),
            Dtype::Complex => Complex64::new(f(&chunk[..8]), f(&chunk[8..])),
        })
        .collect();
    Ok((NdArray::from_finite(&dims, data)?, normalization))
}

/// Reads a 2D real array from comma-separated rows (no header).
pub fn read_csv_real<R: BufRead>(r: R) -> Result<NdArray> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(SwdftError::Format(format!(
                    "row {rows} has {} fields, expected {c}",
                    record.len()
                )))
            }
            _ => {}
        }
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| SwdftError::Format(format!("not a number: `{field}`")))?;
            values.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| SwdftError::Format("empty CSV input".into()))?;
    NdArray::from_real(&[rows, cols], &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let a = NdArray::from_real(&[1, 2], &[1.5, -2.0]).unwrap();
        let mut bytes = Vec::new();
        write_container(&mut bytes, &a, Dtype::Real, Normalization::Unitary).unwrap();
        assert_eq!(&bytes[..4], b"SWDF");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(&bytes[12..20], &1u64.to_le_bytes());
        assert_eq!(&bytes[20..28], &2u64.to_le_bytes());
        assert_eq!(bytes[28], 0);
        assert_eq!(bytes[29], 3);
        assert_eq!(&bytes[30..38], &1.5f64.to_le_bytes());
        assert_eq!(bytes.len(), 30 + 16);

        let (back, norm) = read_container(&bytes[..]).unwrap();
        assert_eq!(back, a);
        assert_eq!(norm, Normalization::Unitary);
    }

    #[test]
    fn rejects_bad_input() {
        let a = NdArray::from_vec(&[1], vec![Complex64::new(0.0, 1.0)]).unwrap();
        assert!(write_container(Vec::new(), &a, Dtype::Real, Normalization::None).is_err());

        let mut bytes = Vec::new();
        write_container(&mut bytes, &a, Dtype::Complex, Normalization::None).unwrap();
        assert!(read_container(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(read_container(&bad[..]).is_err());
        let mut nan = bytes.clone();
        let at = nan.len() - 8;
        nan[at..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(
            read_container(&nan[..]),
            Err(SwdftError::NonFinite(0))
        ));
    }

    #[test]
    fn csv_parsing() {
        let a = read_csv_real("1,2\n3, 4\n".as_bytes()).unwrap();
        assert_eq!(a.dims(), &[2, 2]);
        assert_eq!(a.data()[3], Complex64::new(4.0, 0.0));
        assert!(read_csv_real("1,2\n3\n".as_bytes()).is_err());
        assert!(read_csv_real("1,x\n".as_bytes()).is_err());
        assert!(read_csv_real("".as_bytes()).is_err());
        assert!(read_csv_real("1,nan\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn complex_round_trip_is_bitwise(
            dims in proptest::collection::vec(1usize..4, 1..4),
            values in proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 64),
        ) {
            let a = NdArray::from_fn(&dims, |idx| {
                let k = idx.iter().sum::<usize>() % values.len();
                Complex64::new(values[k].0, values[k].1)
            });
            let mut bytes = Vec::new();
            write_container(&mut bytes, &a, Dtype::Complex, Normalization::Paper2d).unwrap();
            let (back, norm) = read_container(&bytes[..]).unwrap();
            prop_assert_eq!(norm, Normalization::Paper2d);
            prop_assert!(back.data().iter().zip(a.data()).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
        }
    }
}
