//! Dense row-major matrices and their raw binary encoding.

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::default(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// `None` if `data.len() != rows·cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn map<U: Copy + Default>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }
}

impl Matrix<i8> {
    pub fn read_raw(mut reader: impl Read, rows: usize, cols: usize) -> io::Result<Self> {
        let mut buf = vec![0u8; rows * cols];
        reader.read_exact(&mut buf)?;
        let mut rest = [0u8; 1];
        if reader.read(&mut rest)? != 0 {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "matrix file is larger than its dimensions"));
        }
        Ok(Self { rows, cols, data: buf.into_iter().map(|b| b as i8).collect() })
    }

    pub fn write_raw(&self, mut writer: impl Write) -> io::Result<()> {
        let bytes: Vec<u8> = self.data.iter().map(|&v| v as u8).collect();
        writer.write_all(&bytes)
    }
}

impl Matrix<i32> {
    /// Little-endian 32-bit values, row-major.
    pub fn write_raw(&self, mut writer: impl Write) -> io::Result<()> {
        for v in &self.data {
            writer.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_raw(mut reader: impl Read, rows: usize, cols: usize) -> io::Result<Self> {
        let mut buf = vec![0u8; rows * cols * 4];
        reader.read_exact(&mut buf)?;
        let data = buf.chunks_exact(4).map(|c| i32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        Ok(Self { rows, cols, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_i8_round_trip() {
        let m = Matrix::from_fn(3, 4, |r, c| (r as i8 - 1) * 40 + c as i8);
        let mut bytes = Vec::new();
        m.write_raw(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 12);
        assert_eq!(Matrix::<i8>::read_raw(bytes.as_slice(), 3, 4).unwrap(), m);
        assert!(Matrix::<i8>::read_raw(&bytes[..11], 3, 4).is_err());
        assert!(Matrix::<i8>::read_raw(bytes.as_slice(), 3, 3).is_err());
    }

    #[test]
    fn raw_i32_is_little_endian() {
        let m = Matrix::from_vec(1, 2, vec![1i32, -2]).unwrap();
        let mut bytes = Vec::new();
        m.write_raw(&mut bytes).unwrap();
        assert_eq!(bytes, [1, 0, 0, 0, 0xfe, 0xff, 0xff, 0xff]);
        assert_eq!(Matrix::<i32>::read_raw(bytes.as_slice(), 1, 2).unwrap(), m);
    }
}
