//! Deterministic writers: CSV rows in computation order, JSON with fixed key
//! order (serde struct order); output goes to `--out` or stdout.

use crate::CliError;
use std::io::Write;
use std::path::Path;

pub fn write_all(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

/// Inclusive linear range parsed from `start:stop:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        let err = || CliError::Usage(format!("range '{text}' must be start:stop:count"));
        if parts.len() != 3 {
            return Err(err());
        }
        let start: f64 = parts[0].parse().map_err(|_| err())?;
        let stop: f64 = parts[1].parse().map_err(|_| err())?;
        let count: usize = parts[2].parse().map_err(|_| err())?;
        if count < 1 || !start.is_finite() || !stop.is_finite() {
            return Err(CliError::Usage(format!(
                "range '{text}' needs finite endpoints and count >= 1"
            )));
        }
        Ok(Self { start, stop, count })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r = Range::parse("-4:4:101").unwrap();
        assert_eq!(r, Range { start: -4.0, stop: 4.0, count: 101 });
        let v = r.values();
        assert_eq!(v.len(), 101);
        assert_eq!(v[0], -4.0);
        assert_eq!(v[100], 4.0);
        assert!((v[50] - 0.0).abs() < 1e-14);

        assert_eq!(Range::parse("1:2:1").unwrap().values(), vec![1.0]);
        assert!(Range::parse("1:2").is_err());
        assert!(Range::parse("a:2:3").is_err());
        assert!(Range::parse("1:2:0").is_err());
    }
}
